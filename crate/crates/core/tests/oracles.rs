//! Closed-form family formulas against the formula-agnostic pipeline on
//! randomly sampled instances.

use g2forge_core::exterior::Mat7;
use g2forge_core::family::FamilySpec;
use g2forge_core::g2::G2Structure;
use g2forge_core::sampling::random_family_specs;
use g2forge_core::{KForm, Rational};

type Q = Rational;

fn specs() -> Vec<FamilySpec<Q>> {
    random_family_specs(20240611, 100)
}

fn assert_same(label: &str, i: usize, a: &KForm<Q>, b: &KForm<Q>) {
    assert_eq!(a, b, "{label} differs on sample {i}: family {a} vs generic {b}");
}

#[test]
fn structural_differential_matches_chevalley_eilenberg() {
    for (i, spec) in specs().iter().enumerate() {
        for blade in g2forge_core::Blade::all() {
            let f = KForm::<Q>::basis(blade);
            assert_same("d", i, &spec.structural_d(&f), &spec.algebra().ce_differential(&f));
        }
    }
}

#[test]
fn derivative_forms_match_generic() {
    let mut with_a1 = 0;
    for (i, spec) in specs().iter().enumerate() {
        let g = G2Structure::standard(spec.algebra().clone());
        let f = spec.derivative_forms();
        let dphi = g.d(g.phi());
        let star_dphi = g.star(&dphi);
        let d_star_dphi = g.d(&star_dphi);
        let star_phi = g.star_phi();
        let d_star_phi = g.d(&star_phi);
        let star_d_star_phi = g.star(&d_star_phi);
        assert_same("dφ", i, &f.dphi, &dphi);
        assert_same("∗dφ", i, &f.star_dphi, &star_dphi);
        assert_same("d∗dφ", i, &f.d_star_dphi, &d_star_dphi);
        assert_same("∗d∗dφ", i, &f.star_d_star_dphi, &g.star(&d_star_dphi));
        assert_same("∗φ", i, &f.star_phi, &star_phi);
        assert_same("d∗φ", i, &f.d_star_phi, &d_star_phi);
        assert_same("∗d∗φ", i, &f.star_d_star_phi, &star_d_star_phi);
        assert_same("d∗d∗φ", i, &f.d_star_d_star_phi, &g.d(&star_d_star_phi));
        assert_same("Δφ", i, &f.laplacian(), &g.laplacian_phi());
        if !dphi.is_empty() && spec.a1().iter().any(|v| *v != Q::from_integer(0.into())) {
            with_a1 += 1;
        }
    }
    // the A1 correction terms must actually be exercised
    assert!(with_a1 > 10, "only {with_a1} non-closed samples with A1 ≠ 0");
}

#[test]
fn closedness_and_coclosedness_criteria_match_generic() {
    for (i, spec) in specs().iter().enumerate() {
        let g = G2Structure::standard(spec.algebra().clone());
        assert_eq!(spec.is_closed(0.0), g.d(g.phi()).is_empty(), "closed, sample {i}");
        assert_eq!(spec.is_coclosed(0.0), g.d(&g.star_phi()).is_empty(), "coclosed, sample {i}");
    }
}

#[test]
fn specialized_torsion_matches_generic() {
    for (i, spec) in specs().iter().enumerate() {
        let g = G2Structure::standard(spec.algebra().clone());
        let generic = g.torsion();
        let family = spec.specialized_torsion();
        assert_eq!(family, generic, "torsion differs on sample {i}");
        let (d_res, dstar_res) = generic.reconstruction_residual(&g);
        assert_eq!((d_res, dstar_res), (0.0, 0.0), "reconstruction, sample {i}");
        assert_eq!(generic.type_residual(&g), 0.0, "types, sample {i}");
    }
}

#[test]
fn family_ricci_matches_generic() {
    for (i, spec) in specs().iter().enumerate() {
        let generic: Mat7<Q> = spec.algebra().ricci_operator();
        assert_eq!(spec.ricci().operator, generic, "Ricci differs on sample {i}");
    }
}

#[test]
fn float_backend_agrees_with_exact() {
    for spec in specs().iter().take(20) {
        let exact = spec.derivative_forms().laplacian();
        let float = spec.to_f64().derivative_forms().laplacian();
        let diff = (&exact.to_f64() - &float).max_abs();
        assert!(diff < 1e-9, "float Laplacian off by {diff}");
    }
}
