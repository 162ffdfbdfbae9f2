use commcap::bounds::majority_vote_error;
use commcap::{
    bound_report, eta0, fannes_penalty, optimized_repetition_bound, FannesVariant, Provenance,
};
use proptest::prelude::*;

const VARIANTS: [FannesVariant; 2] = [FannesVariant::Paper, FannesVariant::Conservative];

proptest! {
    #[test]
    fn report_relations(frac in 0.0f64..=1.0, n in 1usize..=13, eps in 0.0f64..0.49, paper in any::<bool>()) {
        let h = frac * n as f64;
        let variant = if paper { FannesVariant::Paper } else { FannesVariant::Conservative };
        let r = bound_report(h, n, eps, variant, Provenance::User).unwrap();
        prop_assert!(r.q_eps_fannes <= r.q_exact);
        prop_assert_eq!(r.q_exact_ent, r.q_exact / 2.0);
        prop_assert_eq!(r.q_eps_ent_fannes, r.q_eps_fannes / 2.0);
        prop_assert!(r.q_eps_repeated >= r.q_eps_fannes - 1e-12);
    }

    #[test]
    fn repetition_never_below_single_run(frac in 0.0f64..=1.0, n in 1usize..=13, eps in 1e-6f64..0.49) {
        let h = frac * n as f64;
        for variant in VARIANTS {
            let rep = optimized_repetition_bound(h, n, eps, variant).unwrap();
            let single = h - fannes_penalty(n, majority_vote_error(1, eps), variant);
            prop_assert!(rep.bound >= single);
            prop_assert!(rep.k_star % 2 == 1);
        }
    }

    #[test]
    fn majority_error_is_valid(k in 1usize..200, eps in 0.0f64..0.5) {
        let e = majority_vote_error(k, eps);
        prop_assert!((0.0..=eps).contains(&e));
    }
}

#[test]
fn eta0_peak_and_continuity() {
    let peak = std::f64::consts::LOG2_E / std::f64::consts::E;
    let step = 1e-4;
    let mut prev = eta0(0.0).unwrap();
    let mut best = (0.0, prev);
    for i in 1..=10_000 {
        let x = i as f64 * step;
        let v = eta0(x).unwrap();
        // |d eta0/dx| <= log2(e) * |ln x| + log2(e); bounded away from 0 on this grid.
        assert!((v - prev).abs() < 2e-3, "jump at {x}");
        if v > best.1 {
            best = (x, v);
        }
        prev = v;
    }
    assert!((best.1 - peak).abs() < 1e-9);
    assert!((best.0 - (-1.0f64).exp()).abs() <= step);
    let e = (-1.0f64).exp();
    assert!((eta0(e - 1e-12).unwrap() - eta0(e + 1e-12).unwrap()).abs() < 1e-9);
}

#[test]
fn penalty_monotone_on_grid() {
    for variant in VARIANTS {
        for n in [1, 4, 10] {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..2500 {
                let p = fannes_penalty(n, i as f64 * 1e-4, variant);
                assert!(
                    p >= prev - 1e-12,
                    "{variant:?} n={n} eps={}",
                    i as f64 * 1e-4
                );
                prev = p;
            }
        }
    }
}
