fn main() {
    if let Err(e) = treemix::cli::run() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
