use proptest::prelude::*;

use treemix::exact::kernels::{rc_edge_hb_kernel, sw_matrix};
use treemix::model::{Potts, RcBoundary, RcGraph, SpinBoundary, SpinModel};
use treemix::slowmix::{embed_boundary, HostGraph};
use treemix::tree::Tree;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sw_is_stochastic_and_reversible(h in 0usize..=2, q in 2usize..=3, beta in 0.0f64..3.0, seed in 0u64..1000) {
        prop_assume!(q.pow(((1 << (h + 1)) - 1) as u32) <= 4096);
        let t = Tree::new(2, h).unwrap();
        let m = SpinModel::new(t.clone(), Potts::new(q, beta).unwrap(), SpinBoundary::random(&t, q, seed)).unwrap();
        let p = sw_matrix(&m).unwrap();
        prop_assert!(p.row_sum_error() < 1e-12);
        prop_assert!(p.stationarity_error() < 1e-12);
        prop_assert!(p.detailed_balance_error() < 1e-10);
    }

    #[test]
    fn encode_decode_roundtrip(d in 2usize..=3, h in 0usize..=2, q in 2usize..=4, code in 0usize..100_000) {
        let t = Tree::new(d, h).unwrap();
        let m = SpinModel::new(t.clone(), Potts::new(q, 1.0).unwrap(), SpinBoundary::free(&t)).unwrap();
        let ns = (q as u128).pow(t.n as u32);
        let code = (code as u128 % ns) as usize;
        prop_assert_eq!(m.encode(&m.decode(code)), code);
    }

    #[test]
    fn edge_heat_bath_keeps_rc_measure(p in 0.05f64..0.95, q in 1.0f64..4.0, wired in any::<bool>()) {
        let t = Tree::new(2, 1).unwrap();
        let w = if wired { RcBoundary::wired(&t) } else { RcBoundary::free() };
        let g = RcGraph::tree(&t, w).unwrap();
        let k = rc_edge_hb_kernel(&g, p, q).unwrap();
        prop_assert!(k.stationarity_error() < 1e-12);
        prop_assert!(k.detailed_balance_error() < 1e-12);
    }

    #[test]
    fn embedding_decodes_to_host(m in 1usize..=8) {
        let g = HostGraph::path(m);
        let emb = embed_boundary(&g, 5, 2).unwrap();
        prop_assert!(emb.report().roundtrip);
        prop_assert_eq!(emb.used().len(), m);
    }
}
