//! Random valid family instances.
//!
//! `B` and `C` are drawn first from a shape that makes `[B,C] = 0` and
//! `tr B = tr C = 0` automatic; every remaining constraint is then linear
//! (or affine) in `(A1, A)`, so it is solved exactly over the rationals and
//! a random integer combination of the solution space is taken. Each
//! sample uses its own ChaCha stream derived from `(seed, index)`, so
//! results do not depend on scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use rayon::prelude::*;

use crate::exterior::{standard_phi, Blade, KForm, Mat2, Mat4};
use crate::family::FamilySpec;
use crate::g2::G2Structure;
use crate::linalg;
use crate::scalar::{Rational, Scalar};

type Q = Rational;

fn qi(v: i64) -> Q {
    <Q as Scalar>::from_i64(v)
}

/// Per-sample RNG, independent of evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn small_int(rng: &mut ChaCha8Rng, bound: i64) -> Q {
    qi(rng.random_range(-bound..=bound))
}

/// Unknowns `(x, y, z, w, A₀₀, …, A₃₃)` packed into a vector of length 20.
fn unpack(v: &DVector<Q>) -> (Mat2<Q>, Mat4<Q>) {
    let a1 = Mat2::new(v[0].clone(), v[2].clone(), v[1].clone(), v[3].clone());
    let a = Mat4::from_fn(|i, j| v[4 + i * 4 + j].clone());
    (a1, a)
}

const UNKNOWNS: usize = 20;

/// Matrix of a linear map `R²⁰ → Rⁿ` given as a closure, plus its value at
/// zero (so affine maps are handled too).
fn affine_system(f: impl Fn(&DVector<Q>) -> Vec<Q>) -> (DMatrix<Q>, DVector<Q>) {
    let zero = DVector::from_element(UNKNOWNS, qi(0));
    let f0 = f(&zero);
    let rows = f0.len();
    let mut m = DMatrix::from_element(rows, UNKNOWNS, qi(0));
    for k in 0..UNKNOWNS {
        let mut ek = zero.clone();
        ek[k] = qi(1);
        let fk = f(&ek);
        for r in 0..rows {
            m[(r, k)] = fk[r].clone() - f0[r].clone();
        }
    }
    (m, DVector::from_vec(f0))
}

/// `[A,B] − xB − yC` and `[A,C] − zB − wC` as a matrix acting on the
/// unknowns, built entrywise (much cheaper than rational matrix products).
fn jacobi_system(b: &Mat4<Q>, c: &Mat4<Q>) -> DMatrix<Q> {
    let mut m = DMatrix::from_element(32, UNKNOWNS, qi(0));
    for (slot, t) in [b, c].into_iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let r = slot * 16 + i * 4 + j;
                for k in 0..4 {
                    m[(r, 4 + i * 4 + k)] += t[(k, j)].clone();
                    m[(r, 4 + k * 4 + j)] -= t[(i, k)].clone();
                }
                m[(r, 2 * slot)] -= b[(i, j)].clone();
                m[(r, 2 * slot + 1)] -= c[(i, j)].clone();
            }
        }
    }
    m
}

/// Shapes for `(B, C)` that commute and are traceless by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Both map `span{e₃,e₄}` into `span{e₅,e₆}`.
    Nilpotent,
    /// Both diagonal and traceless.
    Diagonal,
    Zero,
}

fn pick_shape(rng: &mut ChaCha8Rng) -> Shape {
    match rng.random_range(0..10) {
        0..=5 => Shape::Nilpotent,
        6..=8 => Shape::Diagonal,
        _ => Shape::Zero,
    }
}

/// Basis pairs `(B, C)` spanning the chosen shape.
fn shape_basis(shape: Shape) -> Vec<(Mat4<Q>, Mat4<Q>)> {
    let zero = || Mat4::from_element(qi(0));
    let unit = |r: usize, c: usize| {
        let mut m = zero();
        m[(r, c)] = qi(1);
        m
    };
    let mut out = Vec::new();
    match shape {
        Shape::Nilpotent => {
            for r in 2..4 {
                for c in 0..2 {
                    out.push((unit(r, c), zero()));
                    out.push((zero(), unit(r, c)));
                }
            }
        }
        Shape::Diagonal => {
            for k in 0..3 {
                let d = unit(k, k) - unit(3, 3);
                out.push((d.clone(), zero()));
                out.push((zero(), d));
            }
        }
        Shape::Zero => {}
    }
    out
}

fn combine(basis: &[(Mat4<Q>, Mat4<Q>)], coeffs: &[Q]) -> (Mat4<Q>, Mat4<Q>) {
    let zero = Mat4::from_element(qi(0));
    basis
        .iter()
        .zip(coeffs)
        .fold((zero.clone(), zero), |(b, c), ((bb, cc), k)| {
            (b + bb * k.clone(), c + cc * k.clone())
        })
}

fn random_point(rng: &mut ChaCha8Rng, particular: &DVector<Q>, directions: &[DVector<Q>]) -> DVector<Q> {
    let mut v = particular.clone();
    for d in directions {
        let k = small_int(rng, 2) / qi(rng.random_range(1..=3));
        v += d * k;
    }
    v
}

/// A random valid `FamilySpec` with small rational entries.
pub fn random_family_spec(rng: &mut ChaCha8Rng) -> FamilySpec<Q> {
    loop {
        let basis = shape_basis(pick_shape(rng));
        let coeffs: Vec<Q> = basis.iter().map(|_| small_int(rng, 2)).collect();
        let (b, c) = combine(&basis, &coeffs);
        let ns = linalg::nullspace(&jacobi_system(&b, &c), 0.0);
        let zero = DVector::from_element(UNKNOWNS, qi(0));
        let v = random_point(rng, &zero, &ns.basis);
        let (a1, a) = unpack(&v);
        if let Ok(spec) = FamilySpec::new(a1, a, b, c, 0.0) {
            return spec;
        }
    }
}

/// `n` random valid specs, deterministic in `seed`.
pub fn random_family_specs(seed: u64, n: usize) -> Vec<FamilySpec<Q>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| random_family_spec(&mut sample_rng(seed, i)))
        .collect()
}

const SHAPE_BLADES: [&[u8]; 3] = [&[1, 2], &[3, 4], &[5, 6]];

fn off_shape(form: &KForm<Q>) -> Vec<Q> {
    let keep: Vec<Blade> = SHAPE_BLADES.iter().map(|i| Blade::new(i).expect("valid")).collect();
    Blade::all_of_degree(2)
        .into_iter()
        .filter(|b| !keep.contains(b))
        .map(|b| form.get(b))
        .collect()
}

fn coefficients(form: &KForm<Q>) -> Vec<Q> {
    Blade::all_of_degree(form.degree())
        .into_iter()
        .map(|b| form.get(b))
        .collect()
}

/// Per shape, `(B, C)` pairs spanning the solutions of `θ(B)ω₂ = θ(C)ω₁`
/// (the only closedness condition not involving `A1`, `A`).
fn closed_bc_directions() -> &'static [Vec<(Mat4<Q>, Mat4<Q>)>; 3] {
    static DIRECTIONS: OnceLock<[Vec<(Mat4<Q>, Mat4<Q>)>; 3]> = OnceLock::new();
    DIRECTIONS.get_or_init(|| {
        [Shape::Nilpotent, Shape::Diagonal, Shape::Zero].map(|shape| {
            let basis = shape_basis(shape);
            if basis.is_empty() {
                return Vec::new();
            }
            let mut m = DMatrix::from_element(21, basis.len(), qi(0));
            for (k, (b, c)) in basis.iter().enumerate() {
                let spec = FamilySpec::unchecked(Mat2::zeros(), Mat4::zeros(), b.clone(), c.clone());
                for (r, v) in coefficients(&spec.closedness_conditions()[2]).into_iter().enumerate() {
                    m[(r, k)] = v;
                }
            }
            linalg::nullspace(&m, 0.0)
                .basis
                .iter()
                .map(|v| combine(&basis, v.as_slice()))
                .collect()
        })
    })
}

fn closed_rows(a1: &Mat2<Q>, a: &Mat4<Q>, b: &Mat4<Q>, c: &Mat4<Q>) -> Vec<Q> {
    static STAR_PHI: OnceLock<KForm<Q>> = OnceLock::new();
    let star_phi = STAR_PHI.get_or_init(|| standard_phi::<Q>().hodge_star());
    let spec = FamilySpec::unchecked(a1.clone(), a.clone(), b.clone(), c.clone());
    let [c1, c2, _] = spec.closedness_conditions();
    // for closed φ, τ₂ = −∗d∗φ
    let tau = -spec.algebra().ce_differential(star_phi).hodge_star();
    let mut rows = coefficients(&c1);
    rows.extend(coefficients(&c2));
    rows.extend(off_shape(&tau));
    rows
}

fn closed_rows_linear() -> &'static DMatrix<Q> {
    static LINEAR: OnceLock<DMatrix<Q>> = OnceLock::new();
    LINEAR.get_or_init(|| {
        let zero = Mat4::zeros();
        affine_system(|v| {
            let (a1, a) = unpack(v);
            closed_rows(&a1, &a, &zero, &zero)
        })
        .0
    })
}

/// A random closed instance whose torsion 2-form is `a e¹² + b e³⁴ + c e⁵⁶`.
pub fn random_closed_diagonal_torsion(rng: &mut ChaCha8Rng) -> FamilySpec<Q> {
    loop {
        let directions = &closed_bc_directions()[pick_shape(rng) as usize];
        // sparse combinations keep instances like G_s within reach
        let weights: Vec<Q> = directions
            .iter()
            .map(|_| if rng.random_bool(0.5) { small_int(rng, 2) } else { qi(0) })
            .collect();
        let (b, c) = combine(directions, &weights);
        // the closedness and off-shape rows are jointly linear in all four
        // matrices, so their (A1, A)-part is fixed and only the offset
        // depends on (B, C)
        let lin = closed_rows_linear();
        let f0 = DVector::from_vec(closed_rows(&Mat2::zeros(), &Mat4::zeros(), &b, &c));
        let jac = jacobi_system(&b, &c);
        let mut m = DMatrix::from_element(jac.nrows() + lin.nrows(), UNKNOWNS, qi(0));
        m.rows_mut(0, jac.nrows()).copy_from(&jac);
        m.rows_mut(jac.nrows(), lin.nrows()).copy_from(&lin);
        let mut rhs = DVector::from_element(m.nrows(), qi(0));
        rhs.rows_mut(jac.nrows(), lin.nrows()).copy_from(&(-f0));
        let Some(sol) = linalg::solve_affine(&m, &rhs, 0.0) else {
            continue;
        };
        let v = random_point(rng, &sol.particular, &sol.directions);
        let (a1, a) = unpack(&v);
        if let Ok(spec) = FamilySpec::new(a1, a, b, c, 0.0) {
            if spec.is_closed(0.0) {
                return spec;
            }
        }
    }
}

/// Outcome of one falsification sample.
#[derive(Debug, Clone)]
pub struct EigenformSample {
    pub index: u64,
    pub tau_norm: f64,
    pub lambda: f64,
    pub residual: f64,
    pub off_shape: f64,
}

/// Samples closed instances with diagonal-shape torsion and evaluates the
/// eigenform residual through the generic pipeline.
pub fn eigenform_scan(seed: u64, n: usize) -> Vec<EigenformSample> {
    (0..n as u64)
        .into_par_iter()
        .map(|index| {
            let spec = random_closed_diagonal_torsion(&mut sample_rng(seed, index));
            let g = G2Structure::standard(spec.algebra().clone());
            let report = g.eigenform_residual(0.0).expect("sampled instances are closed");
            let tau = g.torsion().tau2;
            EigenformSample {
                index,
                tau_norm: tau.norm(),
                lambda: Scalar::to_f64(&report.lambda),
                residual: report.residual,
                off_shape: off_shape(&tau).iter().map(|v| Scalar::to_f64(v).abs()).fold(0.0, f64::max),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_valid_and_deterministic() {
        let a = random_family_specs(7, 20);
        let b = random_family_specs(7, 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.algebra().entries(), y.algebra().entries());
            assert!(x.algebra().is_lie_algebra(0.0));
        }
        // several instances should carry a nonzero A1
        assert!(a.iter().filter(|s| !s.a1().iter().all(|v| v == &qi(0))).count() > 3);
    }

    #[test]
    fn closed_samples_have_diagonal_torsion() {
        for i in 0..10 {
            let spec = random_closed_diagonal_torsion(&mut sample_rng(3, i));
            let g = G2Structure::standard(spec.algebra().clone());
            assert!(g.d(g.phi()).is_empty());
            assert!(off_shape(&g.torsion().tau2).iter().all(|v| v == &qi(0)));
        }
    }
}
