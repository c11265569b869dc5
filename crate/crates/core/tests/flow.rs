//! Laplacian flow from `G_s` against the self-similar soliton solution.

use g2forge_core::dense::to_dense;
use g2forge_core::family::Builtin;
use g2forge_core::g2::G2Structure;
use g2forge_core::solitons::{
    flow_integrate, reconstruct, self_similar_profile, solve_laplacian_soliton, FlowConfig, FlowHalt, Rk4,
    DIAGONAL_BLADES,
};
use g2forge_core::{Blade, KForm};

fn gs(s: f64) -> G2Structure<f64> {
    G2Structure::standard(Builtin::Gs(s).spec().into_algebra())
}

#[test]
fn rk4_trajectory_is_self_similar() {
    let g = gs(0.0);
    let sol = solve_laplacian_soliton(&g, 1e-9);
    let mut cfg = FlowConfig::new(0.1, 1e-4);
    cfg.sample_interval = Some(0.01);
    let tr = flow_integrate(g.algebra(), g.phi(), &cfg, &Rk4).unwrap();
    assert!(tr.halt.is_none());
    assert_eq!(tr.states.len(), 11);
    for st in &tr.states {
        let pred = to_dense(&reconstruct(g.phi(), sol.c, &sol.d, st.t).unwrap());
        let rel = (&st.phi - &pred).norm() / pred.norm();
        assert!(rel < 1e-4, "t = {}: relative error {rel:e}", st.t);
        assert!(st.off_diagonal() < 1e-12);
    }
}

#[test]
fn blow_up_is_detected_near_four_fifths() {
    let g = gs(0.0);
    let tr = flow_integrate(g.algebra(), g.phi(), &FlowConfig::new(1.0, 1e-4), &Rk4).unwrap();
    match tr.halt {
        Some(FlowHalt::BlowUp { t, laplacian_norm }) => {
            assert!(laplacian_norm > 1e6);
            assert!((t - 0.8).abs() / 0.8 < 0.02, "blow-up at t = {t}");
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
    let margins: Vec<f64> = tr.states.iter().map(|s| s.margin).collect();
    assert!(margins.last().unwrap() < &(margins[0] * 1e-2));
}

/// Exponents of the self-similar solution: the `e^{ijk}` coefficient is
/// `c(t)·exp(r(t)(dᵢ+dⱼ+dₖ))` times its initial value.
#[test]
fn e245_exponent_is_fifteen_eighths_minus_eight_s_squared() {
    for s in [0.0, 0.25, 0.5] {
        let g = gs(s);
        let tr = flow_integrate(g.algebra(), g.phi(), &FlowConfig::new(0.05, 1e-4), &Rk4).unwrap();
        let last = tr.last();
        let c = -15.0 / 8.0 + 8.0 * s * s;
        let p = self_similar_profile(c, last.t).unwrap();
        let form: KForm<f64> = last.form();
        let phi0 = g.phi();
        let measured = |b: [u8; 3]| {
            let blade = Blade::new(&b).unwrap();
            (form.get(blade) / phi0.get(blade) / p.scale).ln() / p.r
        };
        let e245 = measured([2, 4, 5]);
        assert!((e245 - (15.0 / 8.0 - 8.0 * s * s)).abs() < 1e-6, "s = {s}: {e245}");
        assert!((e245 - (35.0 / 8.0 - 8.0 * s * s)).abs() > 1.0);
        // every blade follows the reference derivation D_s
        let d = Builtin::Gs(s).reference_derivation();
        for b in DIAGONAL_BLADES {
            let expected: f64 = b.iter().map(|&i| d[(i as usize - 1, i as usize - 1)]).sum();
            assert!((measured(b) - expected).abs() < 1e-6, "s = {s}, blade {b:?}");
        }
        assert!((measured([1, 3, 5]) - (35.0 / 8.0 - 8.0 * s * s)).abs() < 1e-6);
    }
}
