//! Algebraic identities checked on random inputs.

use g2forge_core::exterior::{omega1, omega2, omega7, upsilon, SplitContext, Mat4, DIM};
use g2forge_core::family::{pinching_functional, theta_upsilon_matrix, Builtin};
use g2forge_core::g2::{G2Structure, TypeComponents};
use g2forge_core::sampling::{random_closed_diagonal_torsion, random_family_specs, sample_rng};
use g2forge_core::{Blade, KForm, Mat7, Rational, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;

type Q = Rational;

fn qi(v: i64) -> Q {
    <Q as Scalar>::from_i64(v)
}

fn form_on(indices: Vec<Blade>, coeffs: Vec<i64>) -> KForm<Q> {
    let degree = indices.first().map_or(0, |b| b.degree());
    let mut f = KForm::zero(degree);
    for (b, c) in indices.into_iter().zip(coeffs) {
        f.add_term(b, qi(c));
    }
    f
}

fn kform(degree: usize) -> impl Strategy<Value = KForm<Q>> {
    let blades = Blade::all_of_degree(degree);
    let n = blades.len();
    prop::collection::vec(-3i64..=3, n).prop_map(move |c| form_on(blades.clone(), c))
}

fn g1_form(degree: usize) -> impl Strategy<Value = KForm<Q>> {
    let g1 = Blade::new(&[3, 4, 5, 6]).unwrap();
    let blades: Vec<Blade> = Blade::all_of_degree(degree).into_iter().filter(|b| b.is_subset_of(g1)).collect();
    let n = blades.len();
    prop::collection::vec(-3i64..=3, n).prop_map(move |c| form_on(blades.clone(), c))
}

fn mat4() -> impl Strategy<Value = Mat4<Q>> {
    prop::collection::vec(-4i64..=4, 16).prop_map(|v| Mat4::from_fn(|i, j| qi(v[i * 4 + j])))
}

fn mat7() -> impl Strategy<Value = Mat7<Q>> {
    prop::collection::vec(-3i64..=3, 49).prop_map(|v| Mat7::from_fn(|i, j| qi(v[i * 7 + j])))
}

#[test]
fn double_star_is_identity_on_every_blade() {
    for b in Blade::all() {
        let f = KForm::<Q>::basis(b);
        assert_eq!(f.hodge_star().hodge_star(), f, "{b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_with_star_is_inner_product((k, a, b) in (0usize..=7).prop_flat_map(|k| (Just(k), kform(k), kform(k)))) {
        let lhs = b.wedge(&a.hodge_star());
        let rhs = KForm::basis(Blade::VOLUME).scale(&b.inner(&a).unwrap());
        prop_assert_eq!(lhs, rhs, "degree {}", k);
    }

    #[test]
    fn theta_is_a_derivation(m in mat7(), a in kform(2), b in kform(3)) {
        let lhs = a.wedge(&b).theta(&m);
        let rhs = a.theta(&m).wedge(&b) + a.wedge(&b.theta(&m));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_g1_intertwines_theta(m in mat4(), (k, a) in (1usize..=3).prop_flat_map(|k| (Just(k), g1_form(k)))) {
        let lhs = SplitContext::star_g1(&a.theta_g1(&m)).unwrap();
        let star_a = SplitContext::star_g1(&a).unwrap();
        let rhs = -star_a.theta_g1(&m.transpose()) - star_a.scale(&m.trace());
        prop_assert_eq!(lhs, rhs, "degree {}", k);
    }

    #[test]
    fn theta_on_upsilon_has_block_form(m in mat4()) {
        let t = theta_upsilon_matrix(&m);
        let half_tr = m.trace() / qi(2);
        for i in 0..3 {
            for j in 0..3 {
                let shift = if i == j { half_tr.clone() } else { Q::zero() };
                // diagonal blocks: antisymmetric minus (tr/2)·id
                prop_assert_eq!(t[(i, j)].clone() + shift.clone(), -(t[(j, i)].clone() + shift.clone()));
                prop_assert_eq!(t[(i + 3, j + 3)].clone() + shift.clone(), -(t[(j + 3, i + 3)].clone() + shift));
                // off-diagonal blocks are transposes of each other
                prop_assert_eq!(t[(i, j + 3)].clone(), t[(j + 3, i)].clone());
            }
        }
        // θ(M) is recovered from its Υ-matrix
        let basis = upsilon::<Q>();
        for (c, u) in basis.iter().enumerate() {
            let rebuilt = (0..6).fold(KForm::zero(2), |acc, r| acc + basis[r].scale(&t[(r, c)]));
            prop_assert_eq!(rebuilt, u.theta_g1(&m));
        }
    }

    #[test]
    fn theta_trace_on_two_forms(m in mat4()) {
        let g1 = Blade::new(&[3, 4, 5, 6]).unwrap();
        let tr = Blade::all_of_degree(2)
            .into_iter()
            .filter(|b| b.is_subset_of(g1))
            .fold(Q::zero(), |acc, b| acc + KForm::basis(b).theta_g1(&m).get(b));
        prop_assert_eq!(tr, -qi(3) * m.trace());
    }

    #[test]
    fn theta_rows_on_omegas(m in mat4()) {
        let e = |i: u8, j: u8| KForm::<Q>::e(&[i, j]);
        let a = |i: usize, j: usize| m[(i - 3, j - 3)].clone();
        let w7 = e(3, 4).scale(&-(a(3, 3) + a(4, 4)))
            + e(3, 5).scale(&(a(6, 3) - a(4, 5)))
            + e(3, 6).scale(&-(a(4, 6) + a(5, 3)))
            + e(4, 5).scale(&(a(6, 4) + a(3, 5)))
            + e(4, 6).scale(&(a(3, 6) - a(5, 4)))
            + e(5, 6).scale(&-(a(5, 5) + a(6, 6)));
        let w1 = e(3, 4).scale(&-(a(5, 4) + a(6, 3)))
            // often stated as −(m₃₃ − m₅₅)
            + e(3, 5).scale(&-(a(3, 3) + a(5, 5)))
            + e(3, 6).scale(&(a(4, 3) - a(5, 6)))
            + e(4, 5).scale(&(a(6, 5) - a(3, 4)))
            + e(4, 6).scale(&(a(4, 4) + a(6, 6)))
            + e(5, 6).scale(&(a(4, 5) + a(3, 6)));
        let w2 = e(3, 4).scale(&(a(6, 4) - a(5, 3)))
            + e(3, 5).scale(&(a(4, 3) + a(6, 5)))
            + e(3, 6).scale(&(a(3, 3) + a(6, 6)))
            + e(4, 5).scale(&(a(4, 4) + a(5, 5)))
            // often stated as m₅₆ + m₅₄
            + e(4, 6).scale(&(a(5, 6) + a(3, 4)))
            + e(5, 6).scale(&(a(3, 5) - a(4, 6)));
        prop_assert_eq!(omega7::<Q>().theta_g1(&m), w7);
        prop_assert_eq!(omega1::<Q>().theta_g1(&m), w1);
        prop_assert_eq!(omega2::<Q>().theta_g1(&m), w2);
    }

    #[test]
    fn type_components_are_orthogonal_projections(a2 in kform(2), a3 in kform(3)) {
        let g = G2Structure::<Q>::standard(g2forge_core::LieAlgebra::abelian());
        for a in [a2, a3] {
            let parts = g.type_decompose(&a).unwrap();
            prop_assert_eq!(parts.sum(), a.clone());
            let list = parts.parts();
            for (i, p) in list.iter().enumerate() {
                for q in list.iter().skip(i + 1) {
                    prop_assert!(p.inner(q).unwrap().is_zero());
                }
                // idempotent: a component decomposes into itself
                let again = g.type_decompose(p).unwrap();
                prop_assert_eq!(again.parts()[i].clone(), (*p).clone());
            }
        }
    }
}

#[test]
fn contraction_lies_in_lambda2_7() {
    let g = G2Structure::<Q>::standard(g2forge_core::LieAlgebra::abelian());
    for i in 1..=7u8 {
        match g.type_decompose(&g.phi().contract(i)).unwrap() {
            TypeComponents::Two { p14, .. } => assert!(p14.is_empty()),
            _ => unreachable!(),
        }
    }
}

#[test]
fn d_squared_vanishes_on_random_specs() {
    for spec in random_family_specs(11, 50) {
        let alg = spec.algebra();
        for b in Blade::all() {
            let f = KForm::<Q>::basis(b);
            assert!(alg.ce_differential(&alg.ce_differential(&f)).is_empty());
        }
    }
}

#[test]
fn non_jacobi_bracket_breaks_d_squared() {
    let mut entries = Builtin::<Q>::Gs(qi(0)).spec().algebra().entries();
    // [e₁,e₂] = e₃ is incompatible with the ad e₇ weights
    entries.push((1, 2, 3, qi(1)));
    let alg = g2forge_core::LieAlgebra::from_brackets(entries).unwrap();
    assert!(!alg.is_lie_algebra(0.0));
    assert!(Blade::all()
        .into_iter()
        .any(|b| !alg.ce_differential(&alg.ce_differential(&KForm::basis(b))).is_empty()));
}

#[test]
fn laplacian_pairs_with_phi_to_torsion_norm() {
    for i in 0..20 {
        let spec = random_closed_diagonal_torsion(&mut sample_rng(5, i));
        let g = G2Structure::standard(spec.algebra().clone());
        let tau = g.torsion();
        assert!(tau.tau0.is_zero() && tau.tau1.is_empty() && tau.tau3.is_empty());
        assert_eq!(g.laplacian_phi(), g.d(&tau.tau2));
        assert_eq!(g.inner(&g.laplacian_phi(), g.phi()), g.norm_sq(&tau.tau2));
    }
}

#[test]
fn pinching_is_bounded_by_seven() {
    for spec in random_family_specs(13, 100) {
        if let Ok(f) = pinching_functional(&spec) {
            assert!(f <= qi(7), "F = {f}");
        }
    }
}

#[test]
fn gs_pinching_decreases() {
    let mut prev = None;
    for k in 0..=300 {
        let s = <Q as Scalar>::from_ratio(k, 100);
        let f = pinching_functional(&Builtin::Gs(s.clone()).spec()).unwrap();
        let s2 = s.clone() * s;
        let expected = {
            let num = qi(75) + qi(64) * s2.clone();
            num.clone() * num / (qi(1725) + qi(4224) * s2.clone() + qi(4096) * s2.clone() * s2)
        };
        assert_eq!(f, expected);
        if let Some(p) = prev {
            assert!(f < p);
        }
        prev = Some(f);
    }
}

#[test]
fn derivations_close_under_commutator() {
    for spec in random_family_specs(17, 10) {
        let alg = spec.algebra();
        let der = alg.derivation_space();
        for d in &der.basis {
            assert!(alg.derivation_defect(d).is_zero());
        }
        for (i, a) in der.basis.iter().enumerate() {
            for b in der.basis.iter().skip(i + 1) {
                assert!(alg.derivation_defect(&(a * b - b * a)).is_zero());
            }
        }
    }
}

#[test]
fn abelian_derivations_are_everything() {
    let der = g2forge_core::LieAlgebra::<Q>::abelian().derivation_space();
    assert_eq!(der.dim(), DIM * DIM);
    assert!(der.basis.iter().all(|m| m.iter().filter(|v| v.is_one()).count() == 1));
}
