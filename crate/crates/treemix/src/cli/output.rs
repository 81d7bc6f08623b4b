//! Artifact writers. Every float is printed with 17 significant digits so
//! reruns are byte-identical and values round-trip exactly.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Pretty JSON with fixed-precision floats; non-finite floats become `null`.
struct Sig17<F>(F);

macro_rules! delegate {
    ($($m:ident($($a:ident : $t:ty),*)),* $(,)?) => {
        $(fn $m<W: ?Sized + Write>(&mut self, w: &mut W $(, $a: $t)*) -> io::Result<()> {
            self.0.$m(w $(, $a)*)
        })*
    };
}

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Compact form, used for hashing.
pub fn to_json_compact<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(serde_json::ser::CompactFormatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (None, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => fmt_f64(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => to_json_compact(other).unwrap_or_default(),
    }
}

/// One CSV row per record; the header is the field order of the first record.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for r in rows {
        let Value::Object(obj) = serde_json::to_value(r)? else {
            return Err(Error::Parse("CSV rows must be records".into()));
        };
        if header.is_none() {
            let keys: Vec<String> = obj.keys().cloned().collect();
            w.write_record(&keys).map_err(csv_err)?;
            header = Some(keys);
        }
        let keys = header.as_ref().unwrap();
        w.write_record(keys.iter().map(|k| obj.get(k).map(cell).unwrap_or_default()))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    command: &'a str,
    version: &'static str,
    config: &'a Value,
    config_hash: String,
    seeds: &'a [u64],
    artifacts: &'a [String],
    complete: bool,
}

/// Owns an output directory. The manifest is written (incomplete) before the
/// first artifact and rewritten once all artifacts exist.
pub struct Run {
    dir: PathBuf,
    command: String,
    config: Value,
    seeds: Vec<u64>,
    artifacts: Vec<String>,
}

pub const SCHEMA: &str = "treemix/1";

impl Run {
    pub fn start<C: Serialize>(dir: &Path, command: &str, config: &C, seeds: Vec<u64>) -> Result<Run> {
        std::fs::create_dir_all(dir)?;
        let run = Run {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seeds,
            artifacts: Vec::new(),
        };
        run.write_manifest(false)?;
        Ok(run)
    }

    pub fn config_hash(&self) -> Result<String> {
        let text = to_json_compact(&self.config)?;
        Ok(format!("{:x}", Sha256::digest(text.as_bytes())))
    }

    fn write_manifest(&self, complete: bool) -> Result<()> {
        let m = Manifest {
            schema: SCHEMA,
            command: &self.command,
            version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            config_hash: self.config_hash()?,
            seeds: &self.seeds,
            artifacts: &self.artifacts,
            complete,
        };
        std::fs::write(self.dir.join("manifest.json"), to_json(&m)?)?;
        Ok(())
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), data)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        self.bytes(name, to_json(value)?.as_bytes())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        self.bytes(name, csv_string(rows)?.as_bytes())
    }

    /// Row-major little-endian `f64` data plus a JSON header.
    pub fn matrix(&mut self, stem: &str, rows: usize, cols: usize, data: impl Iterator<Item = f64>, header: Value) -> Result<()> {
        let mut buf = Vec::with_capacity(rows * cols * 8);
        for x in data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        if buf.len() != rows * cols * 8 {
            return Err(Error::Parse(format!("matrix {stem}: expected {rows}x{cols} entries")));
        }
        let mut h = serde_json::json!({
            "rows": rows,
            "cols": cols,
            "dtype": "f64",
            "endianness": "little",
            "order": "row-major",
            "data": format!("{stem}.bin"),
        });
        if let (Value::Object(a), Value::Object(b)) = (&mut h, header) {
            a.extend(b);
        }
        self.bytes(&format!("{stem}.bin"), &buf)?;
        self.json(&format!("{stem}.json"), &h)
    }

    pub fn finish(self) -> Result<PathBuf> {
        self.write_manifest(true)?;
        Ok(self.dir)
    }
}
