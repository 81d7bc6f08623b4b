//! Both sides of the variance and entropy factorization inequalities on
//! random test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::exact::functionals::{dirichlet, ent, mean, var, Groups};
use crate::exact::kernels::block_hb_matrix;
use crate::exact::spectral::spectrum;
use crate::mixcond::em::em_epsilon_estimate;
use crate::mixcond::vm::pvm_epsilon;
use crate::mixcond::Mode;
use crate::model::SpinModel;

/// One audited statement. `slack` is the smallest `rhs - lhs` seen (or the
/// largest error, for identities); `constant` is a supremum estimate where
/// the statement only asserts that some constant exists.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub applicable: bool,
    pub samples: usize,
    pub skipped: usize,
    pub slack: f64,
    pub constant: Option<f64>,
    pub passed: bool,
    pub note: String,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            applicable: true,
            samples: 0,
            skipped: 0,
            slack: f64::INFINITY,
            constant: None,
            passed: true,
            note: String::new(),
        }
    }

    fn inapplicable(name: &'static str, note: String) -> Self {
        Check {
            applicable: false,
            note,
            ..Check::new(name)
        }
    }

    fn slack(&mut self, lhs: f64, rhs: f64, tol: f64) {
        let s = rhs - lhs;
        self.slack = self.slack.min(s);
        if s < -tol {
            self.passed = false;
        }
    }

    fn ratio(&mut self, num: f64, den: f64) {
        if num <= 1e-14 {
            self.skipped += 1;
            return;
        }
        if den <= 0.0 {
            self.passed = false;
            self.constant = Some(f64::INFINITY);
            return;
        }
        let r = num / den;
        self.constant = Some(self.constant.map_or(r, |c| c.max(r)));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub ell: usize,
    pub functions: usize,
    pub eps_pvm: f64,
    pub eps_pvm_levels: Vec<f64>,
    pub eps_em_lower: f64,
    pub p_min: f64,
    pub gap_tb: f64,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Smallest single-site conditional probability over all neighborhoods.
pub fn p_min(m: &SpinModel) -> f64 {
    let t = &m.tree;
    let w = m.potts.w();
    let q = m.q() as f64;
    (0..t.n)
        .map(|v| {
            let k = t.neighbors(v).iter().filter(|&&u| u < t.n || m.boundary.at(t, u).is_some()).count() as i32;
            w.powi(k) / (1.0 + (q - 1.0) * w.powi(k))
        })
        .fold(1.0, f64::min)
}

struct Sets {
    tiles: Vec<Groups>,
    /// Per level `i`: `(B_i, F_{i-ell-1}, F_i, F_{i-1})`.
    levels: Vec<[Groups; 4]>,
    even: Groups,
    odd: Groups,
}

fn sets(m: &SpinModel, ell: usize) -> Sets {
    let t = &m.tree;
    let (q, n) = (m.q(), m.n());
    let g = |s: &[usize]| Groups::outside(q, n, s);
    let tiles = (1..=ell + 1).map(|j| g(&t.t_set(j, ell))).collect();
    let levels = (1..=t.h + 1)
        .map(|i| {
            let i = i as i64;
            [
                g(&t.b_set(i, ell)),
                g(&t.f_set(i - ell as i64 - 1)),
                g(&t.f_set(i)),
                g(&t.f_set(i - 1)),
            ]
        })
        .collect();
    Sets {
        tiles,
        levels,
        even: g(&t.even_set()),
        odd: g(&t.odd_set()),
    }
}

fn positive_function(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> Vec<f64> {
    match kind % 3 {
        0 => (0..n).map(|_| rng.gen::<f64>()).collect(),
        1 => (0..n).map(|_| (2.0 * rng.sample::<f64, _>(StandardNormal)).exp()).collect(),
        _ => (0..n).map(|_| if rng.gen::<f64>() < 0.1 { 1.0 } else { 1e-3 * rng.gen::<f64>() }).collect(),
    }
}

/// Runs every check on `functions` random test functions per statement.
/// `em_effort = (restarts, iterations)` for the entropy-mixing estimate.
pub fn factorization_audit(m: &SpinModel, ell: usize, functions: usize, seed: u64, em_effort: (usize, usize)) -> Result<AuditReport> {
    let t = &m.tree;
    let pi = m.gibbs()?.probs;
    let n = pi.len();
    let s = sets(m, ell);
    let tiles: Vec<Vec<usize>> = (1..=ell + 1).map(|j| t.t_set(j, ell)).collect();
    let p_tb = block_hb_matrix(m, &tiles)?;
    let gap_tb = spectrum(&p_tb)?.gap_abs;
    let pvm = pvm_epsilon(m, ell, Mode::Exhaustive)?;
    let eps = pvm.certificate.epsilon;
    let em = em_epsilon_estimate(m, ell, em_effort.0, em_effort.1, seed)?.epsilon;
    let pm = p_min(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cal_e = Check::new("calE");
    let mut dirich = Check::new("dirich-bound");
    let delta = 1.0 - 2.0 * (ell as f64 + 1.0) * eps;
    let mut var_bound = if delta > 0.0 {
        Check::new("var-bound")
    } else {
        Check::inapplicable("var-bound", format!("eps_PVM = {eps} exceeds 1/(2(ell+1))"))
    };
    let mut pvm_var = Check::new("pvm-varbound");
    let mut ent1 = Check::new("ent1-bound");
    let mut em_ent = if em < pm * pm {
        Check::new("em-entbound")
    } else {
        Check::inapplicable("em-entbound", format!("eps_EM >= {em} is not below p_min^2 = {}", pm * pm))
    };
    let mut eof = Check::new("em-eof");
    let mut tbf = Check::new("em-tbf");
    let mut ent2 = Check::new("ent2-bound");
    let mut pvm_gap = if delta > 0.0 {
        Check::new("pvm-gap")
    } else {
        Check::inapplicable("pvm-gap", format!("eps_PVM = {eps} exceeds 1/(2(ell+1))"))
    };
    if pvm_gap.applicable {
        pvm_gap.samples = 1;
        pvm_gap.slack(delta / (2.0 * (ell as f64 + 1.0)), gap_tb, 1e-9);
    }
    let eps_prime = em.sqrt() / pm;

    for _ in 0..functions {
        let f: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let vf = var(&pi, &f);
        if vf <= 1e-14 {
            for c in [&mut cal_e, &mut dirich, &mut var_bound, &mut pvm_var] {
                c.skipped += 1;
            }
            continue;
        }
        let tile_sum: f64 = s.tiles.iter().map(|g| mean(&pi, &g.variance(&pi, &f))).sum();
        let e_tb = dirichlet(&p_tb.p, &pi, &f);
        cal_e.samples += 1;
        let err = (e_tb - tile_sum / (ell as f64 + 1.0)).abs();
        cal_e.slack = cal_e.slack.min(-err);
        if err > 1e-12 {
            cal_e.passed = false;
        }
        let level_sum: f64 = s
            .levels
            .iter()
            .map(|[b, far, _, _]| mean(&pi, &b.variance(&pi, &far.expect(&pi, &f))))
            .sum();
        dirich.samples += 1;
        dirich.slack(level_sum, tile_sum, 1e-12);
        if var_bound.applicable {
            var_bound.samples += 1;
            var_bound.slack(vf, 2.0 / delta * level_sum, 1e-12);
        }
        for (i, [b, far, fi, fprev]) in s.levels.iter().enumerate() {
            let e_i = pvm.per_level[i];
            if e_i >= 0.5 {
                continue;
            }
            let c1 = 2.0 * (1.0 - e_i) / (1.0 - 2.0 * e_i);
            let c2 = 2.0 * e_i / (1.0 - 2.0 * e_i);
            let lhs = fi.variance(&pi, &fprev.expect(&pi, &f));
            let rhs_b = fi.expect(&pi, &b.variance(&pi, &f));
            let rhs_a = fi.expect(&pi, &fprev.variance(&pi, &f));
            let g = far.expect(&pi, &f);
            let rhs_b2 = fi.expect(&pi, &b.variance(&pi, &g));
            let rhs_a2 = fi.expect(&pi, &fprev.variance(&pi, &g));
            pvm_var.samples += 1;
            for st in 0..n {
                pvm_var.slack(lhs[st], c1 * rhs_b[st] + c2 * rhs_a[st], 1e-12);
                pvm_var.slack(lhs[st], c1 * rhs_b2[st] + c2 * rhs_a2[st], 1e-12);
            }
        }
    }

    for k in 0..functions {
        let f = positive_function(&mut rng, n, k);
        let ef = ent(&pi, &f)?;
        let tile_sum = s
            .tiles
            .iter()
            .map(|g| Ok(mean(&pi, &g.entropy(&pi, &f)?)))
            .sum::<Result<f64>>()?;
        let level_sum = s
            .levels
            .iter()
            .map(|[b, far, _, _]| Ok(mean(&pi, &b.entropy(&pi, &far.expect(&pi, &f))?)))
            .sum::<Result<f64>>()?;
        ent1.samples += 1;
        ent1.slack(level_sum, tile_sum, 1e-12);
        let eo = mean(&pi, &s.even.entropy(&pi, &f)?) + mean(&pi, &s.odd.entropy(&pi, &f)?);
        for (c, den) in [(&mut eof, eo), (&mut tbf, tile_sum), (&mut ent2, level_sum)] {
            c.samples += 1;
            c.ratio(ef, den);
        }
        if em_ent.applicable {
            em_ent.samples += 1;
            for [b, _, fi, fprev] in &s.levels {
                let lhs = fi.entropy(&pi, &f)?;
                let rb = fi.expect(&pi, &b.entropy(&pi, &f)?);
                let ra = fi.expect(&pi, &fprev.entropy(&pi, &f)?);
                for st in 0..n {
                    em_ent.slack((1.0 - eps_prime) * lhs[st], rb[st] + ra[st], 1e-12);
                }
            }
        }
    }
    cal_e.slack = -cal_e.slack;
    cal_e.note = "largest |E_TB(f,f) - sum_j E[Var_Tj(f)]/(ell+1)|".into();
    for c in [&mut eof, &mut tbf, &mut ent2] {
        c.note = "constant is the largest observed ratio".into();
    }
    let checks = vec![cal_e, dirich, var_bound, pvm_var, ent1, em_ent, eof, tbf, ent2, pvm_gap];
    Ok(AuditReport {
        ell,
        functions,
        eps_pvm: eps,
        eps_pvm_levels: pvm.per_level,
        eps_em_lower: em,
        p_min: pm,
        gap_tb,
        checks,
    })
}
