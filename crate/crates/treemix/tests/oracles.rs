//! Closed forms and frozen values. Frozen numbers were produced by this
//! crate and pin regressions; closed forms are derived by hand.

use std::f64::consts::LN_2;

use treemix::exact::kernels::{glauber_matrix, rc_edge_hb_kernel, sw_matrix};
use treemix::exact::mixing::tv_mixing_time;
use treemix::exact::spectral::lanczos;
use treemix::exact::spectrum;
use treemix::experiments::decay_profile;
use treemix::mixcond::{pvm_epsilon, random_joint, vm_epsilon, Mode, UpDown};
use treemix::model::{cut_edge_prob, Potts, RcBoundary, RcGraph, SpinBoundary, SpinBoundarySpec, SpinModel};
use treemix::slowmix::{bad_set_conductance, clopper_pearson, embed_boundary, tail_monte_carlo, transfer_p, HostGraph};
use treemix::tree::Tree;

const FROZEN: f64 = 1e-12;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
}

fn mono(h: usize, q: usize, beta: f64) -> SpinModel {
    let t = Tree::new(2, h).unwrap();
    SpinModel::new(t.clone(), Potts::new(q, beta).unwrap(), SpinBoundary::mono(&t, 0)).unwrap()
}

#[test]
fn single_vertex_sw_gap() {
    // One vertex between two boundary 1s: leaves spin 1 w.p. e^{-2 beta}/2, leaves 2 w.p. 1/2.
    for beta in [0.3, 1.0, 2.5] {
        let s = spectrum(&sw_matrix(&mono(0, 2, beta)).unwrap()).unwrap();
        close(s.gap, (1.0 + (-2.0 * beta).exp()) / 2.0, 1e-13);
    }
}

#[test]
fn infinite_temperature() {
    let s = spectrum(&sw_matrix(&mono(2, 2, 0.0)).unwrap()).unwrap();
    close(s.gap, 1.0, 1e-12);
    assert_eq!(vm_epsilon(&mono(2, 2, 0.0), 1, Mode::Exhaustive).unwrap().epsilon.abs() < 1e-12, true);
}

#[test]
fn ising_decay_is_a_power_of_theta() {
    for beta in [0.5, LN_2, 1.5] {
        let theta = (beta.exp() - 1.0) / (beta.exp() + 1.0);
        let p = decay_profile(2, &[1, 2, 3, 4], 2, beta, &SpinBoundarySpec::Free, (1, 2)).unwrap();
        for (h, tv) in p.heights.iter().zip(&p.tv) {
            close(*tv, theta.powi(*h as i32), 1e-12);
        }
    }
}

#[test]
fn edge_probabilities() {
    close(cut_edge_prob(0.6, 3.0), 1.0 / 3.0, 1e-15);
    close(transfer_p(0.5, 2.0), 0.2, 1e-15);
    close(transfer_p(1.0 / 3.0, 3.0), 1.0 / 17.0, 1e-15);
}

#[test]
fn clopper_pearson_zero_successes() {
    let (lo, hi) = clopper_pearson(0, 10, 0.95);
    assert_eq!(lo, 0.0);
    close(hi, 1.0 - 0.025f64.powf(0.1), 1e-9);
}

#[test]
fn frozen_gaps() {
    let m = mono(2, 2, 1.0);
    close(spectrum(&sw_matrix(&m).unwrap()).unwrap().gap, 4.9368694519602474e-1, FROZEN);
    close(spectrum(&glauber_matrix(&m).unwrap()).unwrap().gap, 5.8770575939825487e-2, FROZEN);
    let t = Tree::new(2, 1).unwrap();
    let g = RcGraph::tree(&t, RcBoundary::wired(&t)).unwrap();
    let k = rc_edge_hb_kernel(&g, 0.5, 2.0).unwrap();
    let r = lanczos(&k, &k.pi, 200, 1).unwrap();
    close(1.0 - r.lambda2, 1.3264068302073440e-1, 1e-10);
}

#[test]
fn frozen_mixing_constants() {
    close(vm_epsilon(&mono(2, 2, 0.3), 1, Mode::Exhaustive).unwrap().epsilon, 4.3054111210747620e-2, FROZEN);
    close(
        pvm_epsilon(&mono(2, 2, 1.0), 2, Mode::Exhaustive).unwrap().certificate.epsilon,
        4.0480229018358738e-2,
        FROZEN,
    );
    close(UpDown::new(&random_joint(5, 7, 9)).unwrap().epsilon().unwrap(), 3.2116726358610881e-1, FROZEN);
}

#[test]
fn frozen_mixing_time() {
    let m = mono(2, 2, 2.0);
    let p = sw_matrix(&m).unwrap();
    assert_eq!(tv_mixing_time(&p, &p.pi, None, 1000).tau, Some(5));
}

#[test]
fn frozen_slowmix() {
    let c = bad_set_conductance(&embed_boundary(&HostGraph::single_edge(), 2, 1).unwrap(), 0.5, 2.0, 0, None).unwrap();
    close(c.pi_a, 4.0 / 9.0, 1e-12);
    close(c.phi_a, 5.0 / 27.0, 1e-12);
    close(c.gap_mhb, 1.0 / 3.0, 1e-12);
    let emb = embed_boundary(&HostGraph::cycle(8).unwrap(), 5, 2).unwrap();
    assert_eq!(tail_monte_carlo(&emb, 0.5, 6, 10_000, 1).unwrap().hits, 345);
}
