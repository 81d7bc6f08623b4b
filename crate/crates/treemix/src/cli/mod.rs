//! Command-line front end. Each subcommand resolves its configuration
//! (defaults < `--config` file < flags), writes a manifest into `--out`, then
//! its artifacts, and prints the main report on stdout.

pub mod config;
pub mod output;

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dynamics::{block_step, glauber_step, rc_edge_hb_step, rc_sw_step, single_bond_step, sw_step};
use crate::dynamics::{BlockKind, BlockSpec};
use crate::error::{check_cap, invalid, Result, DENSE_CAP};
use crate::exact::compare::compare_chain;
use crate::exact::kernels::{block_hb_matrix, glauber_matrix, rc_edge_hb_kernel, rc_sw_matrix, single_bond_kernel, sw_block_matrix};
use crate::exact::mixing::{relaxation_bracket, tv_mixing_time};
use crate::exact::orbits::{rc_orbits, spin_orbits};
use crate::exact::spectral::lanczos;
use crate::exact::swfast::SwOperator;
use crate::exact::ullrich::{tiled_blocks, ullrich_check};
use crate::exact::{spectrum, Kernel, SparseKernel, TransitionMatrix};
use crate::experiments::{cmd_check, decay_profile, lb_experiment, mixing_scaling, random_events};
use crate::experiments::{LbSpec, ScalingChain, ScalingMode, ScalingSpec};
use crate::mixcond::{em_epsilon_estimate, factorization_audit, pvm_epsilon, random_joint, vm_epsilon};
use crate::mixcond::{Certificate, Condition, Mode, UpDown};
use crate::model::{Potts, RcBoundarySpec, RcGraph, SpinBoundarySpec, SpinModel};
use crate::rng::{domain, Streams};
use crate::slowmix::{bad_set_conductance, embed_boundary, gap_transfer_check, mhb_chain, mhb_step, tail_monte_carlo, Embedding, RcBlockChain};
use crate::tree::Tree;

use config::{config, coupling, host_graph, read_config, req, resolve, Defaults};
use output::Run;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    Sw,
    Glauber,
    BlockHb,
    BlockSw,
    RcSw,
    RcEdge,
    SingleBond,
    Mhb,
}

impl ChainKind {
    fn is_spin(self) -> bool {
        matches!(self, ChainKind::Sw | ChainKind::Glauber | ChainKind::BlockHb | ChainKind::BlockSw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Exhaustive,
    Sampled,
}

config! {
    TreeInfoCfg {
        d: usize = Some(2),
        h: usize = Some(2),
        ell: usize = Some(1),
    }
}

config! {
    /// Instance and chain for the exact commands. For `mhb`, `h` and `ell`
    /// describe the embedding and `graph` the host graph.
    ExactCfg {
        chain: ChainKind = Some(ChainKind::Sw),
        d: usize = Some(2),
        h: usize = Some(1),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        /// Edge probability; overrides `beta` when set.
        p: f64 = None,
        /// `mono:K`, `free`, `random:SEED`, `list:a,b,..`, JSON or `@file.json`.
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Mono { spin: 1 }),
        /// `wired`, `free`, JSON or `@file.json`.
        wiring: RcBoundarySpec = Some(RcBoundarySpec::Wired),
        ell: usize = Some(1),
        /// `edge`, `path:M`, `cycle:M` or an edge-list file.
        graph: String = Some("edge".into()),
        functions: usize = Some(200),
        max_t: usize = Some(100_000),
        lanczos_iters: usize = Some(300),
        seed: u64 = Some(default_seed()),
    }
}

config! {
    CheckCfg {
        d: usize = Some(2),
        h: usize = Some(2),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        p: f64 = None,
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Mono { spin: 1 }),
        ell: usize = Some(1),
        mode: ModeKind = Some(ModeKind::Exhaustive),
        budget: usize = Some(1000),
        seed: u64 = Some(default_seed()),
        /// gvm: JSON file holding a joint law (`[[..]]` or `{"rho": [[..]]}`).
        rho: String = None,
        /// gvm: shape of a random joint law when no file is given.
        nphi: usize = Some(3),
        npsi: usize = Some(4),
        samples: usize = Some(2000),
        restarts: usize = Some(4),
        iters: usize = Some(200),
        functions: usize = Some(100),
    }
}

config! {
    SimCfg {
        chain: ChainKind = Some(ChainKind::Sw),
        d: usize = Some(2),
        h: usize = Some(3),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        p: f64 = None,
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Mono { spin: 1 }),
        wiring: RcBoundarySpec = Some(RcBoundarySpec::Wired),
        ell: usize = Some(1),
        graph: String = Some("edge".into()),
        steps: usize = Some(100),
        every: usize = Some(1),
        seed: u64 = Some(default_seed()),
        /// Spin chains: `mono:K` or `random`. Edge chains: `empty`, `full` or `random`.
        start: String = None,
        /// Spin chains: magnetization, bichromatic, root. Edge chains: open, components.
        #[arg(value_delimiter = ',')]
        observables: Vec<String> = None,
    }
}

config! {
    LbCfg {
        d: usize = Some(LbSpec::default().d),
        h: usize = Some(LbSpec::default().h),
        q: usize = Some(LbSpec::default().q),
        beta: f64 = Some(LbSpec::default().beta),
        p: f64 = None,
        boundary: SpinBoundarySpec = Some(LbSpec::default().boundary),
        #[arg(value_delimiter = ',')]
        alphas: Vec<f64> = Some(LbSpec::default().alphas),
        xi: f64 = Some(LbSpec::default().xi),
        replicas: usize = Some(LbSpec::default().replicas),
        seed: u64 = Some(default_seed()),
    }
}

config! {
    CmdCfg {
        chain: ChainKind = Some(ChainKind::Sw),
        d: usize = Some(2),
        h: usize = Some(1),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        p: f64 = None,
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Mono { spin: 1 }),
        ell: usize = Some(1),
        events: usize = Some(20),
        horizon: usize = Some(20),
        seed: u64 = Some(default_seed()),
    }
}

config! {
    DecayCfg {
        d: usize = Some(2),
        #[arg(value_delimiter = ',')]
        heights: Vec<usize> = Some(vec![1, 2, 3, 4, 5, 6]),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        p: f64 = None,
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Free),
        /// 1-based spins placed above the root.
        spin_a: u8 = Some(1),
        spin_b: u8 = Some(2),
    }
}

config! {
    ScalingCfg {
        chain: ScalingChain = Some(ScalingChain::Sw),
        mode: ScalingMode = Some(ScalingMode::Exact),
        d: usize = Some(2),
        q: usize = Some(2),
        beta: f64 = Some(LN_2),
        p: f64 = None,
        #[arg(value_delimiter = ',')]
        heights: Vec<usize> = Some(vec![1, 2]),
        boundary: SpinBoundarySpec = Some(SpinBoundarySpec::Mono { spin: 1 }),
        wiring: RcBoundarySpec = Some(RcBoundarySpec::Wired),
        max_t: usize = Some(100_000),
        replicas: usize = Some(20_000),
        seed: u64 = Some(default_seed()),
    }
}

config! {
    /// `graph`: `edge`, `path:M`, `cycle:M` or an edge-list file.
    SlowCfg {
        graph: String = Some("edge".into()),
        h: usize = Some(2),
        ell: usize = Some(1),
        p_hat: f64 = Some(0.5),
        q: f64 = Some(2.0),
        big_m: usize = Some(0),
        /// Host edge sets (bitmasks) forming `S*`; default is found by search.
        #[arg(value_delimiter = ',')]
        s_star: Vec<u64> = None,
        samples: usize = Some(100_000),
        seed: u64 = Some(default_seed()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "treemix", version, about = "Exact and Monte Carlo mixing tools for Potts dynamics on trees")]
pub struct Cli {
    /// JSON file with the command's parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for the manifest and artifacts.
    #[arg(long, global = true, default_value = "treemix-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Level sets, parity classes, B-sets and tiles as JSON.
    TreeInfo(TreeInfoCfg),
    /// Exact matrices, gaps, mixing times and factorization checks.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Spatial-mixing certificates as JSON.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Run a chain and record observables as CSV.
    Simulate(SimCfg),
    /// Coupled SW runs: disagreement containment and one-step surplus (CSV).
    Lowerbound(LbCfg),
    /// Complete monotonicity of Pr(X_t in B) on random events (CSV).
    CmdCheck(CmdCfg),
    /// Influence of the spin above the root against height (CSV).
    Decay(DecayCfg),
    /// Mixing time against height, exact or statistical (CSV).
    Scaling(ScalingCfg),
    /// Boundary gadgets for slow mixing (JSON).
    #[command(subcommand)]
    Slowmix(SlowCmd),
}

#[derive(Subcommand, Debug)]
pub enum ExactCmd {
    /// Dense kernel as row-major f64 plus a JSON header.
    Matrix(ExactCfg),
    /// Spectral gap (dense, or Lanczos above 4096 states).
    Gap(ExactCfg),
    /// Worst-start TV mixing time and the TV curve.
    Mix(ExactCfg),
    /// SW = T R T* and the block identity.
    Ullrich(ExactCfg),
    /// Dirichlet-form comparison of SW, block SW and heat-bath blocks.
    Compare(ExactCfg),
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    Gvm(CheckCfg),
    Vm(CheckCfg),
    Pvm(CheckCfg),
    Em(CheckCfg),
    Factorization(CheckCfg),
}

#[derive(Subcommand, Debug)]
pub enum SlowCmd {
    /// Gadget layout and wiring classes of a host graph.
    Embed(SlowCfg),
    /// Gap of the two-edge chain against edge heat-bath on the host graph.
    GapTransfer(SlowCfg),
    /// Conductance of the bad set under MHB.
    Conductance(SlowCfg),
    /// Monte Carlo tail of the reached-gadget count.
    Tail(SlowCfg),
}

/// Parses `std::env::args` and runs; returns the printed report.
pub fn run() -> Result<()> {
    let cli = Cli::parse();
    let report = execute(&cli)?;
    print!("{report}");
    Ok(())
}

/// Runs a parsed command line and returns the main report text.
pub fn execute(cli: &Cli) -> Result<String> {
    let file = cli.config.as_deref().map(read_config).transpose()?;
    let file = file.as_ref();
    let out = cli.out.as_path();
    match &cli.cmd {
        Cmd::TreeInfo(a) => tree_info(&resolve(a, file)?, out),
        Cmd::Exact(c) => {
            let (name, a) = match c {
                ExactCmd::Matrix(a) => ("matrix", a),
                ExactCmd::Gap(a) => ("gap", a),
                ExactCmd::Mix(a) => ("mix", a),
                ExactCmd::Ullrich(a) => ("ullrich", a),
                ExactCmd::Compare(a) => ("compare", a),
            };
            exact(name, &resolve(a, file)?, out)
        }
        Cmd::Check(c) => {
            let (cond, a) = match c {
                CheckCmd::Gvm(a) => ("gvm", a),
                CheckCmd::Vm(a) => ("vm", a),
                CheckCmd::Pvm(a) => ("pvm", a),
                CheckCmd::Em(a) => ("em", a),
                CheckCmd::Factorization(a) => ("factorization", a),
            };
            check(cond, &resolve(a, file)?, out)
        }
        Cmd::Simulate(a) => simulate(&resolve(a, file)?, out),
        Cmd::Lowerbound(a) => lowerbound(&resolve(a, file)?, out),
        Cmd::CmdCheck(a) => cmd(&resolve(a, file)?, out),
        Cmd::Decay(a) => decay(&resolve(a, file)?, out),
        Cmd::Scaling(a) => scaling(&resolve(a, file)?, out),
        Cmd::Slowmix(c) => {
            let (name, a) = match c {
                SlowCmd::Embed(a) => ("embed", a),
                SlowCmd::GapTransfer(a) => ("gap-transfer", a),
                SlowCmd::Conductance(a) => ("conductance", a),
                SlowCmd::Tail(a) => ("tail", a),
            };
            slowmix(name, &resolve(a, file)?, out)
        }
    }
}

fn seeds(seed: &Option<u64>) -> Vec<u64> {
    seed.iter().copied().collect()
}

fn spin_model(d: &Option<usize>, h: &Option<usize>, q: &Option<usize>, beta: f64, b: &Option<SpinBoundarySpec>) -> Result<SpinModel> {
    let t = Tree::new(req(d, "d")?, req(h, "h")?)?;
    let potts = Potts::new(req(q, "q")?, beta)?;
    let b = req(b, "boundary")?.resolve(&t, potts.q)?;
    SpinModel::new(t, potts, b)
}

fn tree_info(c: &TreeInfoCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "tree-info", c, vec![])?;
    let t = Tree::new(req(&c.d, "d")?, req(&c.h, "h")?)?;
    let dec = t.decompose(req(&c.ell, "ell")?)?;
    run.json("tree.json", &dec)?;
    run.finish()?;
    output::to_json(&dec)
}

/// A chain in whichever representation suits its size.
enum Built {
    Dense(TransitionMatrix),
    Sparse(SparseKernel),
    Sw(SwOperator),
    Blocks(RcBlockChain),
}

impl Kernel for Built {
    fn dim(&self) -> usize {
        match self {
            Built::Dense(k) => k.dim(),
            Built::Sparse(k) => k.dim(),
            Built::Sw(k) => k.dim(),
            Built::Blocks(k) => k.dim(),
        }
    }

    fn push(&self, mu: &[f64], out: &mut [f64]) {
        match self {
            Built::Dense(k) => k.push(mu, out),
            Built::Sparse(k) => k.push(mu, out),
            Built::Sw(k) => k.push(mu, out),
            Built::Blocks(k) => k.push(mu, out),
        }
    }
}

impl Built {
    fn pi(&self) -> &[f64] {
        match self {
            Built::Dense(k) => &k.pi,
            Built::Sparse(k) => &k.pi,
            Built::Sw(k) => &k.pi,
            Built::Blocks(k) => &k.pi,
        }
    }

    fn dense(self) -> Result<TransitionMatrix> {
        match self {
            Built::Dense(k) => Ok(k),
            Built::Sparse(k) => k.to_dense(),
            Built::Sw(k) => k.to_dense(),
            Built::Blocks(k) => k.to_dense(),
        }
    }
}

const SPIN_ENCODING: &str = "state = sum_v sigma_v q^v over internal vertices in breadth-first order, spins 0-based";
const EDGE_ENCODING: &str = "state = sum_e 2^e over open edges, edge e joins node e+1 to its parent (breadth-first)";

fn embedding(c: &ExactCfg) -> Result<Embedding> {
    embed_boundary(&host_graph(&req(&c.graph, "graph")?)?, req(&c.h, "h")?, req(&c.ell, "ell")?)
}

fn build(c: &ExactCfg) -> Result<(Built, Vec<usize>, &'static str)> {
    let chain = req(&c.chain, "chain")?;
    let beta = coupling(&c.beta, &c.p)?;
    if chain.is_spin() {
        let m = spin_model(&c.d, &c.h, &c.q, beta, &c.boundary)?;
        let blocks = || tiled_blocks(&m.tree, c.ell.unwrap_or(1));
        let k = match chain {
            ChainKind::Sw => Built::Sw(SwOperator::new(&m)?),
            ChainKind::Glauber => Built::Dense(glauber_matrix(&m)?),
            ChainKind::BlockHb => {
                BlockSpec::tiled(&m.tree, req(&c.ell, "ell")?)?;
                Built::Dense(block_hb_matrix(&m, &blocks())?)
            }
            _ => {
                BlockSpec::tiled(&m.tree, req(&c.ell, "ell")?)?;
                Built::Dense(sw_block_matrix(&m, &blocks())?)
            }
        };
        return Ok((k, spin_orbits(&m)?, SPIN_ENCODING));
    }
    let q = req(&c.q, "q")?;
    let p = Potts::new(q, beta)?.p();
    if chain == ChainKind::Mhb {
        let emb = embedding(c)?;
        let k = mhb_chain(&emb, p, q as f64)?;
        let all = (0..k.dim()).collect();
        return Ok((Built::Blocks(k), all, EDGE_ENCODING));
    }
    let t = Tree::new(req(&c.d, "d")?, req(&c.h, "h")?)?;
    let w = req(&c.wiring, "wiring")?.resolve(&t)?;
    let g = RcGraph::tree(&t, w.clone())?;
    let k = match chain {
        ChainKind::RcSw => Built::Dense(rc_sw_matrix(&g, p, q)?),
        ChainKind::RcEdge => Built::Sparse(rc_edge_hb_kernel(&g, p, q as f64)?),
        _ => Built::Sparse(single_bond_kernel(&g, p, q as f64)?),
    };
    Ok((k, rc_orbits(&t, &w)?, EDGE_ENCODING))
}

#[derive(Serialize)]
struct GapOut {
    chain: ChainKind,
    states: usize,
    method: &'static str,
    gap: f64,
    gap_abs: f64,
    lambda2: f64,
    lambda_min: f64,
    relaxation_time: f64,
    /// `(t_rel - 1) ln 2 <= tau(1/4) <= t_rel ln(4 / pi_min)`.
    tau_lower: f64,
    tau_upper: f64,
    residual: Option<f64>,
}

fn exact(what: &str, c: &ExactCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, &format!("exact {what}"), c, seeds(&c.seed))?;
    let chain = req(&c.chain, "chain")?;
    let report = match what {
        "matrix" => {
            let (k, _, encoding) = build(c)?;
            let m = k.dense()?;
            let n = m.n();
            // nalgebra stores columns; walk rows explicitly.
            let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.p[(i, j)]);
            let header = json!({
                "chain": chain,
                "encoding": encoding,
                "params": c,
                "pi": m.pi,
                "row_sum_error": m.row_sum_error(),
                "detailed_balance_error": m.detailed_balance_error(),
            });
            run.matrix("matrix", n, n, data, header)?;
            json!({ "chain": chain, "states": n, "artifacts": ["matrix.bin", "matrix.json"] })
        }
        "gap" => {
            let (k, _, _) = build(c)?;
            let n = k.dim();
            let pi_min = k.pi().iter().cloned().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
            let (method, l2, lmin, residual) = if n as u128 <= DENSE_CAP {
                let s = spectrum(&k.dense()?)?;
                ("dense", s.lambda2, s.lambda_min, None)
            } else {
                let r = lanczos(&k, k.pi(), req(&c.lanczos_iters, "lanczos_iters")?, req(&c.seed, "seed")?)?;
                ("lanczos", r.lambda2, r.lambda_min, Some(r.residual))
            };
            let gap_abs = 1.0 - l2.abs().max(lmin.abs());
            let (lo, hi) = relaxation_bracket(gap_abs, pi_min);
            serde_json::to_value(GapOut {
                chain,
                states: n,
                method,
                gap: 1.0 - l2,
                gap_abs,
                lambda2: l2,
                lambda_min: lmin,
                relaxation_time: 1.0 / gap_abs,
                tau_lower: lo,
                tau_upper: hi,
                residual,
            })?
        }
        "mix" => {
            let (k, starts, _) = build(c)?;
            let r = tv_mixing_time(&k, k.pi(), Some(&starts), req(&c.max_t, "max_t")?);
            #[derive(Serialize)]
            struct Tv {
                t: usize,
                tv: f64,
            }
            let curve: Vec<Tv> = r.tv_curve.iter().enumerate().map(|(t, &tv)| Tv { t, tv }).collect();
            run.csv("tv_curve.csv", &curve)?;
            json!({
                "chain": chain,
                "states": k.dim(),
                "tau": r.tau,
                "worst_start": r.worst_start,
                "starts": r.starts,
            })
        }
        "ullrich" | "compare" => {
            if !chain.is_spin() {
                return Err(invalid("chain", format!("`exact {what}` works on the spin model")));
            }
            let beta = coupling(&c.beta, &c.p)?;
            let m = spin_model(&c.d, &c.h, &c.q, beta, &c.boundary)?;
            let ell = req(&c.ell, "ell")?;
            BlockSpec::tiled(&m.tree, ell)?;
            let blocks = tiled_blocks(&m.tree, ell);
            if what == "ullrich" {
                serde_json::to_value(ullrich_check(&m, &blocks)?)?
            } else {
                let f = req(&c.functions, "functions")?;
                serde_json::to_value(compare_chain(&m, &blocks, f, req(&c.seed, "seed")?)?)?
            }
        }
        _ => unreachable!("clap restricts exact subcommands"),
    };
    if what != "matrix" {
        run.json(&format!("{what}.json"), &report)?;
    }
    run.finish()?;
    output::to_json(&report)
}

fn read_rho(path: &str) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid("rho", format!("{path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| invalid("rho", e.to_string()))?;
    let rows = v.get("rho").unwrap_or(&v);
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows.clone())
        .map_err(|e| invalid("rho", format!("expected a matrix of numbers: {e}")))?;
    let ncol = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || ncol == 0 || rows.iter().any(|r| r.len() != ncol) {
        return Err(invalid("rho", "rows must be non-empty and of equal length"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncol, |i, j| rows[i][j]))
}

fn check(cond: &str, c: &CheckCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, &format!("check {cond}"), c, seeds(&c.seed))?;
    let seed = req(&c.seed, "seed")?;
    let report = if cond == "gvm" {
        let rho = match &c.rho {
            Some(path) => read_rho(path)?,
            None => random_joint(req(&c.nphi, "nphi")?, req(&c.npsi, "npsi")?, seed),
        };
        let ud = UpDown::new(&rho)?;
        let rep = ud.report()?;
        let cert = Certificate {
            condition: Condition::Gvm,
            ell: 0,
            epsilon: rep.epsilon,
            lower_bound: false,
            mode: Mode::Exhaustive,
            cells: 1,
            witness: None,
        };
        json!({
            "certificate": cert,
            "report": rep,
            "variational": ud.variational_sup(req(&c.samples, "samples")?, seed),
        })
    } else {
        let beta = coupling(&c.beta, &c.p)?;
        let m = spin_model(&c.d, &c.h, &c.q, beta, &c.boundary)?;
        let ell = req(&c.ell, "ell")?;
        let mode = match req(&c.mode, "mode")? {
            ModeKind::Exhaustive => Mode::Exhaustive,
            ModeKind::Sampled => Mode::Sampled { budget: req(&c.budget, "budget")?, seed },
        };
        let effort = (req(&c.restarts, "restarts")?, req(&c.iters, "iters")?);
        match cond {
            "vm" => serde_json::to_value(vm_epsilon(&m, ell, mode)?)?,
            "pvm" => serde_json::to_value(pvm_epsilon(&m, ell, mode)?)?,
            "em" => serde_json::to_value(em_epsilon_estimate(&m, ell, effort.0, effort.1, seed)?)?,
            _ => {
                let f = req(&c.functions, "functions")?;
                let a = factorization_audit(&m, ell, f, seed, effort)?;
                let passed = a.passed();
                let mut v = serde_json::to_value(a)?;
                v["passed"] = json!(passed);
                v
            }
        }
    };
    run.json("certificate.json", &report)?;
    run.finish()?;
    output::to_json(&report)
}

enum SimState {
    Spin(SpinModel, Vec<u8>),
    Edge(RcGraph, Vec<bool>),
}

fn simulate(c: &SimCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "simulate", c, seeds(&c.seed))?;
    let chain = req(&c.chain, "chain")?;
    let beta = coupling(&c.beta, &c.p)?;
    let q = req(&c.q, "q")?;
    let streams = Streams::new(req(&c.seed, "seed")?);
    let mut init = streams.stream(u64::MAX, domain::INIT);
    let steps = req(&c.steps, "steps")?;
    let every = req(&c.every, "every")?.max(1);
    let p = Potts::new(q, beta)?.p();

    let mut emb = None;
    let mut blocks = None;
    let mut state = if chain.is_spin() {
        let m = spin_model(&c.d, &c.h, &c.q, beta, &c.boundary)?;
        if matches!(chain, ChainKind::BlockHb | ChainKind::BlockSw) {
            blocks = Some(BlockSpec::tiled(&m.tree, req(&c.ell, "ell")?)?);
        }
        let start = c.start.clone().unwrap_or_else(|| "mono:1".into());
        let sigma = if start == "random" {
            use rand::Rng;
            (0..m.n()).map(|_| init.gen_range(0..q) as u8).collect()
        } else {
            match start.strip_prefix("mono:").and_then(|k| k.parse::<u8>().ok()) {
                Some(k) if k >= 1 && k as usize <= q => vec![k - 1; m.n()],
                _ => return Err(invalid("start", format!("`{start}` is not mono:K (1..={q}) or random"))),
            }
        };
        SimState::Spin(m, sigma)
    } else {
        let g = if chain == ChainKind::Mhb {
            let e = embed_boundary(&host_graph(&req(&c.graph, "graph")?)?, req(&c.h, "h")?, req(&c.ell, "ell")?)?;
            let g = e.rc_graph()?;
            emb = Some(e);
            g
        } else {
            let t = Tree::new(req(&c.d, "d")?, req(&c.h, "h")?)?;
            RcGraph::tree(&t, req(&c.wiring, "wiring")?.resolve(&t)?)?
        };
        let ne = g.num_edges();
        let start = c.start.clone().unwrap_or_else(|| "empty".into());
        let a = match start.as_str() {
            "empty" => vec![false; ne],
            "full" => vec![true; ne],
            "random" => {
                use rand::Rng;
                (0..ne).map(|_| init.gen::<bool>()).collect()
            }
            _ => return Err(invalid("start", format!("`{start}` is not empty, full or random"))),
        };
        SimState::Edge(g, a)
    };

    let known: &[&str] = if chain.is_spin() { &["magnetization", "bichromatic", "root"] } else { &["open", "components"] };
    let obs = c.observables.clone().unwrap_or_else(|| known.iter().map(|s| s.to_string()).collect());
    if let Some(bad) = obs.iter().find(|o| !known.contains(&o.as_str())) {
        return Err(invalid("observables", format!("`{bad}` is not one of {}", known.join(", "))));
    }

    let record = |step: usize, s: &SimState| -> Map<String, Value> {
        let mut row = Map::new();
        row.insert("step".into(), json!(step));
        for o in &obs {
            let v = match (s, o.as_str()) {
                (SimState::Spin(_, x), "magnetization") => {
                    let ones = x.iter().filter(|&&s| s == 0).count() as f64 / x.len() as f64;
                    json!((q as f64 * ones - 1.0) / (q as f64 - 1.0))
                }
                (SimState::Spin(m, x), "bichromatic") => json!(m.bichromatic(x)),
                (SimState::Spin(_, x), "root") => json!(x[0] + 1),
                (SimState::Edge(_, a), "open") => json!(a.iter().filter(|&&b| b).count()),
                (SimState::Edge(g, a), "components") => json!(g.report_flags(a, None).c_xi),
                _ => Value::Null,
            };
            row.insert(o.clone(), v);
        }
        row
    };

    let mut rows = vec![record(0, &state)];
    for t in 0..steps {
        let step = t as u64;
        match &mut state {
            SimState::Spin(m, x) => match chain {
                ChainKind::Sw => sw_step(m, x, &streams, step),
                ChainKind::Glauber => glauber_step(m, x, &streams, step),
                ChainKind::BlockHb => block_step(m, x, blocks.as_ref().unwrap(), BlockKind::HeatBath, &streams, step),
                _ => block_step(m, x, blocks.as_ref().unwrap(), BlockKind::Sw, &streams, step),
            },
            SimState::Edge(g, a) => match chain {
                ChainKind::RcSw => rc_sw_step(g, a, p, q, &streams, step)?,
                ChainKind::RcEdge => rc_edge_hb_step(g, a, p, q as f64, &streams, step),
                ChainKind::SingleBond => single_bond_step(g, a, p, q as f64, &streams, step),
                _ => mhb_step(a, emb.as_ref().unwrap(), p, q as f64, &streams, step)?,
            },
        }
        if (t + 1) % every == 0 {
            rows.push(record(t + 1, &state));
        }
    }
    run.csv("trace.csv", &rows)?;
    run.finish()?;
    Ok(format!("{} rows written to {}\n", rows.len(), out.join("trace.csv").display()))
}

fn lowerbound(c: &LbCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "lowerbound", c, seeds(&c.seed))?;
    let spec = LbSpec {
        d: req(&c.d, "d")?,
        h: req(&c.h, "h")?,
        q: req(&c.q, "q")?,
        beta: coupling(&c.beta, &c.p)?,
        boundary: req(&c.boundary, "boundary")?,
        alphas: req(&c.alphas, "alphas")?,
        xi: req(&c.xi, "xi")?,
        replicas: req(&c.replicas, "replicas")?,
        seed: req(&c.seed, "seed")?,
    };
    let r = lb_experiment(&spec)?;
    run.csv("lowerbound.csv", &r.rows)?;
    run.csv("surplus.csv", &r.surplus)?;
    run.json("lowerbound.json", &r)?;
    run.finish()?;
    output::to_json(&r)
}

fn cmd(c: &CmdCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "cmd-check", c, seeds(&c.seed))?;
    let chain = req(&c.chain, "chain")?;
    if !matches!(chain, ChainKind::Sw | ChainKind::Glauber | ChainKind::BlockHb) {
        return Err(invalid("chain", "cmd-check supports sw, glauber and block-hb"));
    }
    let ec = ExactCfg {
        chain: Some(chain),
        d: c.d,
        h: c.h,
        q: c.q,
        beta: c.beta,
        p: c.p,
        boundary: c.boundary.clone(),
        ell: c.ell,
        ..ExactCfg::defaults()
    };
    let m = build(&ec)?.0.dense()?;
    check_cap("cmd-check states", m.n() as u128, DENSE_CAP)?;
    let events = random_events(m.n(), req(&c.events, "events")?, req(&c.seed, "seed")?);
    let rows = cmd_check(&m, &events, req(&c.horizon, "horizon")?)?;
    let worst = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    run.csv("cmd.csv", &rows)?;
    let summary = json!({ "chain": chain, "states": m.n(), "rows": rows.len(), "min_slack": worst, "passed": worst >= -1e-12 });
    run.json("cmd.json", &summary)?;
    run.finish()?;
    output::to_json(&summary)
}

fn decay(c: &DecayCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "decay", c, vec![])?;
    let prof = decay_profile(
        req(&c.d, "d")?,
        &req(&c.heights, "heights")?,
        req(&c.q, "q")?,
        coupling(&c.beta, &c.p)?,
        &req(&c.boundary, "boundary")?,
        (req(&c.spin_a, "spin_a")?, req(&c.spin_b, "spin_b")?),
    )?;
    #[derive(Serialize)]
    struct Row {
        h: usize,
        tv: f64,
    }
    let rows: Vec<Row> = prof.heights.iter().zip(&prof.tv).map(|(&h, &tv)| Row { h, tv }).collect();
    run.csv("decay.csv", &rows)?;
    run.json("decay.json", &prof)?;
    run.finish()?;
    output::to_json(&prof)
}

fn scaling(c: &ScalingCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, "scaling", c, seeds(&c.seed))?;
    let spec = ScalingSpec {
        chain: req(&c.chain, "chain")?,
        mode: req(&c.mode, "mode")?,
        d: req(&c.d, "d")?,
        q: req(&c.q, "q")?,
        beta: coupling(&c.beta, &c.p)?,
        heights: req(&c.heights, "heights")?,
        boundary: req(&c.boundary, "boundary")?,
        wiring: req(&c.wiring, "wiring")?,
        max_t: req(&c.max_t, "max_t")?,
        replicas: req(&c.replicas, "replicas")?,
        seed: req(&c.seed, "seed")?,
    };
    let r = mixing_scaling(&spec)?;
    run.csv("scaling.csv", &r.rows)?;
    run.json("scaling.json", &r)?;
    run.finish()?;
    output::to_json(&r)
}

fn slowmix(what: &str, c: &SlowCfg, out: &Path) -> Result<String> {
    let mut run = Run::start(out, &format!("slowmix {what}"), c, seeds(&c.seed))?;
    let g = host_graph(&req(&c.graph, "graph")?)?;
    let p_hat = req(&c.p_hat, "p_hat")?;
    let emb = || embed_boundary(&g, req(&c.h, "h")?, req(&c.ell, "ell")?);
    let report = match what {
        "embed" => serde_json::to_value(emb()?.report())?,
        "gap-transfer" => serde_json::to_value(gap_transfer_check(&g, p_hat, req(&c.q, "q")?)?)?,
        "conductance" => serde_json::to_value(bad_set_conductance(
            &emb()?,
            p_hat,
            req(&c.q, "q")?,
            req(&c.big_m, "big_m")?,
            c.s_star.clone(),
        )?)?,
        _ => serde_json::to_value(tail_monte_carlo(
            &emb()?,
            p_hat,
            req(&c.big_m, "big_m")?,
            req(&c.samples, "samples")?,
            req(&c.seed, "seed")?,
        )?)?,
    };
    run.json(&format!("{what}.json"), &report)?;
    run.finish()?;
    output::to_json(&report)
}
