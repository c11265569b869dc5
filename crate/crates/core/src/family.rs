//! The family `G_{A1,A,B,C}`: seven-dimensional solvable Lie algebras with
//! `A1 = ad e₇|span{e₁,e₂}`, `A = ad e₇|g₁`, `B = ad e₁|g₁`, `C = ad e₂|g₁`,
//! where `g₁ = span{e₃,…,e₆}` is an abelian ideal.
//!
//! Everything here is computed from the matrices through the `θ`
//! representation on `Λ²g₁*` and never through the generic
//! Chevalley–Eilenberg pipeline, so that [`crate::g2`] can serve as an
//! independent check.
//!
//! Matrix conventions: 4×4 matrices are indexed `0..4` internally, which
//! corresponds to basis indices `3..6`; `A[(j,i)]` is the `e_{j+3}`
//! component of `A e_{i+3}` (so `a_{ij}` in 3..6 labels is `A[(i-3,j-3)]`).
//! `A1 = [[x, z], [y, w]]`, i.e. `[e₇,e₁] = x e₁ + y e₂`.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{
    omega1, omega2, omega7, upsilon, Blade, KForm, Mat2, Mat4, Mat7, SplitContext,
};
use crate::g2::TorsionForms;
use crate::liealg::LieAlgebra;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("h is not unimodular: tr {matrix} = {value}")]
    Trace { matrix: &'static str, value: String },
    #[error("commutator constraint {constraint} violated (max deviation {deviation})")]
    Commutator {
        constraint: &'static str,
        deviation: String,
    },
    #[error("Jacobi identity fails (residual {0})")]
    Jacobi(String),
    #[error("unknown builtin instance '{0}' (expected gs, sa or fr)")]
    UnknownBuiltin(String),
    #[error("builtin '{0}' needs a parameter")]
    MissingParameter(&'static str),
    #[error("builtin 'fr' takes no parameter")]
    UnexpectedParameter,
    #[error("metric is flat; the pinching functional is undefined")]
    Flat,
}

/// Validated matrices `(A1, A, B, C)` plus the expanded Lie algebra.
#[derive(Debug, Clone)]
pub struct FamilySpec<S: Scalar> {
    a1: Mat2<S>,
    a: Mat4<S>,
    b: Mat4<S>,
    c: Mat4<S>,
    algebra: LieAlgebra<S>,
}

/// Structure constants of `G_{A1,A,B,C}` without any validation.
pub fn brackets_of<S: Scalar>(
    a1: &Mat2<S>,
    a: &Mat4<S>,
    b: &Mat4<S>,
    c: &Mat4<S>,
) -> LieAlgebra<S> {
    let mut entries = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            // [e_h, e_{i+3}] = Σ_j M[(j,i)] e_{j+3}
            for (h, m) in [(7u8, a), (1, b), (2, c)] {
                let v = m[(j, i)].clone();
                if !v.is_zero() {
                    entries.push((h, i as u8 + 3, j as u8 + 3, v));
                }
            }
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            let v = a1[(j, i)].clone();
            if !v.is_zero() {
                entries.push((7, i as u8 + 1, j as u8 + 1, v));
            }
        }
    }
    LieAlgebra::from_brackets(entries).expect("indices are in range and distinct")
}

fn commutator<S: Scalar>(p: &Mat4<S>, q: &Mat4<S>) -> Mat4<S> {
    p * q - q * p
}

fn max_abs<S: Scalar>(m: &Mat4<S>) -> S {
    m.iter()
        .map(|v| v.abs())
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc })
}

impl<S: Scalar> FamilySpec<S> {
    /// Validates `tr B = tr C = 0`, `[A,B] = xB + yC`, `[A,C] = zB + wC`,
    /// `[B,C] = 0` and the Jacobi identity, reporting the first failure.
    pub fn new(a1: Mat2<S>, a: Mat4<S>, b: Mat4<S>, c: Mat4<S>, tol: f64) -> Result<Self, FamilyError> {
        for (name, m) in [("B", &b), ("C", &c)] {
            let t = m.trace();
            if !t.is_negligible(tol) {
                return Err(FamilyError::Trace {
                    matrix: name,
                    value: t.to_string(),
                });
            }
        }
        let (x, y, z, w) = (
            a1[(0, 0)].clone(),
            a1[(1, 0)].clone(),
            a1[(0, 1)].clone(),
            a1[(1, 1)].clone(),
        );
        let checks = [
            ("[A,B] = xB + yC", commutator(&a, &b) - (&b * x + &c * y)),
            ("[A,C] = zB + wC", commutator(&a, &c) - (&b * z + &c * w)),
            ("[B,C] = 0", commutator(&b, &c)),
        ];
        for (constraint, defect) in checks {
            let dev = max_abs(&defect);
            if !dev.is_negligible(tol) {
                return Err(FamilyError::Commutator {
                    constraint,
                    deviation: dev.to_string(),
                });
            }
        }
        let algebra = brackets_of(&a1, &a, &b, &c);
        let jac = algebra.jacobi_residual();
        if !jac.is_negligible(tol) {
            return Err(FamilyError::Jacobi(jac.to_string()));
        }
        Ok(FamilySpec { a1, a, b, c, algebra })
    }

    pub fn a1(&self) -> &Mat2<S> {
        &self.a1
    }
    pub fn a(&self) -> &Mat4<S> {
        &self.a
    }
    pub fn b(&self) -> &Mat4<S> {
        &self.b
    }
    pub fn c(&self) -> &Mat4<S> {
        &self.c
    }
    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn into_algebra(self) -> LieAlgebra<S> {
        self.algebra
    }

    /// Skips validation; for samplers that only need the linear formulas.
    pub(crate) fn unchecked(a1: Mat2<S>, a: Mat4<S>, b: Mat4<S>, c: Mat4<S>) -> Self {
        let algebra = brackets_of(&a1, &a, &b, &c);
        FamilySpec { a1, a, b, c, algebra }
    }

    pub fn to_f64(&self) -> FamilySpec<f64> {
        FamilySpec {
            a1: self.a1.map(|v| v.to_f64()),
            a: self.a.map(|v| v.to_f64()),
            b: self.b.map(|v| v.to_f64()),
            c: self.c.map(|v| v.to_f64()),
            algebra: self.algebra.to_f64(),
        }
    }

    fn xyzw(&self) -> (S, S, S, S) {
        (
            self.a1[(0, 0)].clone(),
            self.a1[(1, 0)].clone(),
            self.a1[(0, 1)].clone(),
            self.a1[(1, 1)].clone(),
        )
    }

    /// `Ric|_{g0×g1}` is zero; the remaining blocks follow the family
    /// formula. Stored in `e₁…e₇` order.
    pub fn ricci(&self) -> RicciData<S> {
        let ricci = family_ricci(&self.a1, &self.a, &self.b, &self.c);
        RicciData::from_operator(ricci)
    }
}

/// `S_M = (M + Mᵗ)/2`.
fn sym<S: Scalar, const N: usize>(m: &nalgebra::SMatrix<S, N, N>) -> nalgebra::SMatrix<S, N, N> {
    (m + m.transpose()) * S::from_ratio(1, 2)
}

fn family_ricci<S: Scalar>(a1: &Mat2<S>, a: &Mat4<S>, b: &Mat4<S>, c: &Mat4<S>) -> Mat7<S> {
    let half = S::from_ratio(1, 2);
    let tr_sum = a1.trace() + a.trace();
    let (sa, sb, sc, sa1) = (sym(a), sym(b), sym(c), sym(a1));
    let g1 = (commutator(a, &a.transpose())
        + commutator(b, &b.transpose())
        + commutator(c, &c.transpose()))
        * half.clone()
        - &sa * tr_sum.clone();
    let tr = |p: &Mat4<S>, q: &Mat4<S>| (p * q).trace();
    // the e₇ direction also sees the e₁,e₂ part of ad e₇
    let r77 = -tr(&sa, &sa) - (&sa1 * &sa1).trace();
    let r71 = -tr(&sa, b);
    let r72 = -tr(&sa, c);
    let a1_comm = a1 * a1.transpose() - a1.transpose() * a1;
    let low = Mat2::new(
        -tr(&sb, &sb),
        -tr(&sb, c),
        -tr(&sb, c),
        -tr(&sc, &sc),
    ) + a1_comm * half
        - sa1 * tr_sum;
    let mut ric = Mat7::zeros();
    for i in 0..4 {
        for j in 0..4 {
            ric[(i + 2, j + 2)] = g1[(i, j)].clone();
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            ric[(i, j)] = low[(i, j)].clone();
        }
    }
    ric[(6, 6)] = r77;
    ric[(6, 0)] = r71.clone();
    ric[(0, 6)] = r71;
    ric[(6, 1)] = r72.clone();
    ric[(1, 6)] = r72;
    ric
}

/// Ricci operator with its scalar invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciData<S: Scalar> {
    pub operator: Mat7<S>,
    pub scalar_curvature: S,
    /// `|Ric|² = tr(Ric²)`.
    pub norm_sq: S,
    pub pinching: Pinching<S>,
}

/// `F = scal²/|Ric|²`, or an explicit marker on flat metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum Pinching<S> {
    Value(S),
    Undefined,
}

impl<S: Scalar> Pinching<S> {
    pub fn value(&self) -> Result<&S, FamilyError> {
        match self {
            Pinching::Value(v) => Ok(v),
            Pinching::Undefined => Err(FamilyError::Flat),
        }
    }
}

impl<S: Scalar> fmt::Display for Pinching<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pinching::Value(v) => write!(f, "{v}"),
            Pinching::Undefined => f.write_str("flat"),
        }
    }
}

impl<S: Scalar> RicciData<S> {
    pub fn from_operator(operator: Mat7<S>) -> Self {
        let scalar_curvature = operator.trace();
        let norm_sq = (&operator * &operator).trace();
        let pinching = if norm_sq.is_zero() {
            Pinching::Undefined
        } else {
            Pinching::Value(scalar_curvature.clone() * scalar_curvature.clone() / norm_sq.clone())
        };
        RicciData {
            operator,
            scalar_curvature,
            norm_sq,
            pinching,
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.to_f64().sqrt()
    }
}

/// `F = scal²/|Ric|²` from the family Ricci formula.
pub fn pinching_functional<S: Scalar>(spec: &FamilySpec<S>) -> Result<S, FamilyError> {
    spec.ricci().pinching.value().cloned()
}

/// `θ(M)` on `Λ²g₁*` in the ordered basis
/// `Υ = (ω̄₇, ω̄₁, ω̄₂, ω₇, ω₁, ω₂)`; every element has squared norm 2.
pub fn theta_upsilon_matrix<S: Scalar>(m: &Mat4<S>) -> DMatrix<S> {
    let basis = upsilon::<S>();
    let half = S::from_ratio(1, 2);
    let images: Vec<KForm<S>> = basis.iter().map(|u| u.theta_g1(m)).collect();
    DMatrix::from_fn(6, 6, |r, c| {
        images[c].inner(&basis[r]).expect("2-forms") * half.clone()
    })
}

/// The eight forms of the closed-form theorems.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeForms<S: Scalar> {
    pub dphi: KForm<S>,
    pub star_dphi: KForm<S>,
    pub d_star_dphi: KForm<S>,
    pub star_d_star_dphi: KForm<S>,
    pub star_phi: KForm<S>,
    pub d_star_phi: KForm<S>,
    pub star_d_star_phi: KForm<S>,
    pub d_star_d_star_phi: KForm<S>,
}

impl<S: Scalar> DerivativeForms<S> {
    /// `Δφ = ∗d∗dφ − d∗d∗φ`.
    pub fn laplacian(&self) -> KForm<S> {
        &self.star_d_star_dphi - &self.d_star_d_star_phi
    }

    pub fn named(&self) -> [(&'static str, &KForm<S>); 8] {
        [
            ("dphi", &self.dphi),
            ("star_dphi", &self.star_dphi),
            ("d_star_dphi", &self.d_star_dphi),
            ("star_d_star_dphi", &self.star_d_star_dphi),
            ("star_phi", &self.star_phi),
            ("d_star_phi", &self.d_star_phi),
            ("star_d_star_phi", &self.star_d_star_phi),
            ("d_star_d_star_phi", &self.d_star_d_star_phi),
        ]
    }
}

fn e<S: Scalar>(idx: &[u8]) -> KForm<S> {
    KForm::e(idx)
}

fn star_g1<S: Scalar>(a: &KForm<S>) -> KForm<S> {
    SplitContext::star_g1(a).expect("supported on g1 by construction")
}

impl<S: Scalar> FamilySpec<S> {
    /// `d` on the whole exterior algebra assembled from
    /// `dα = (−1)ⁱ(θ(A)α∧e⁷ + θ(B)α∧e¹ + θ(C)α∧e²)` on `Λⁱg₁*`,
    /// `de¹ = (x e¹ + z e²)∧e⁷`, `de² = (y e¹ + w e²)∧e⁷`, `de⁷ = 0`
    /// and the Leibniz rule.
    pub fn structural_d(&self, form: &KForm<S>) -> KForm<S> {
        let mut out = KForm::zero((form.degree() + 1).min(7));
        if form.degree() >= 7 {
            return KForm::zero(7);
        }
        for (blade, coef) in form.terms() {
            let g1 = Blade::from_mask(blade.mask() & SplitContext::G1.mask());
            let g0 = Blade::from_mask(blade.mask() & SplitContext::G0.mask());
            let sign = Blade::wedge_sign(g1, g0).expect("disjoint");
            let alpha = KForm::basis(g1);
            let beta = KForm::basis(g0);
            let i = g1.degree();
            let mut d = self.d_g1(&alpha).wedge(&beta);
            let second = alpha.wedge(&self.d_g0(&beta));
            d = if i % 2 == 0 { d + second } else { d - second };
            let c = if sign > 0 { coef.clone() } else { -coef.clone() };
            out = out + d.scale(&c);
        }
        out
    }

    /// `dα` for `α ∈ Λⁱg₁*`.
    pub fn d_g1(&self, alpha: &KForm<S>) -> KForm<S> {
        let i = alpha.degree();
        let s = alpha.theta_g1(&self.a).wedge(&e(&[7]))
            + alpha.theta_g1(&self.b).wedge(&e(&[1]))
            + alpha.theta_g1(&self.c).wedge(&e(&[2]));
        if i % 2 == 0 {
            s
        } else {
            -s
        }
    }

    fn d_g0(&self, beta: &KForm<S>) -> KForm<S> {
        let (x, y, z, w) = self.xyzw();
        let de1 = (e::<S>(&[1]).scale(&x) + e(&[2]).scale(&z)).wedge(&e(&[7]));
        let de2 = (e::<S>(&[1]).scale(&y) + e(&[2]).scale(&w)).wedge(&e(&[7]));
        let mut out = KForm::zero(beta.degree() + 1);
        for (blade, coef) in beta.terms() {
            // Leibniz over the (at most three) factors e¹, e², e⁷
            let idx: Vec<u8> = blade.indices().collect();
            for (pos, &k) in idx.iter().enumerate() {
                let dk = match k {
                    1 => de1.clone(),
                    2 => de2.clone(),
                    _ => continue,
                };
                let before = idx[..pos].iter().fold(KForm::constant(S::one()), |acc, &j| acc.wedge(&e(&[j])));
                let after = idx[pos + 1..].iter().fold(KForm::constant(S::one()), |acc, &j| acc.wedge(&e(&[j])));
                let term = before.wedge(&dk).wedge(&after);
                let term = if pos % 2 == 0 { term } else { -term };
                out = out + term.scale(coef);
            }
        }
        out
    }

    /// The eight derivative forms from the closed-form theorems.
    ///
    /// `d∗dφ` and `∗d∗dφ` include the contributions of `de¹`, `de²` through
    /// `A1` (the terms `(y s₂ + x s₁)∧e¹⁷ + (w s₂ + z s₁)∧e²⁷` and their
    /// stars), which vanish when `A1 = 0`.
    pub fn derivative_forms(&self) -> DerivativeForms<S> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
        let (x, y, z, w) = self.xyzw();
        let tr_a = a.trace();
        let tr_a1 = self.a1.trace();
        let (w7, w1, w2) = (omega7::<S>(), omega1::<S>(), omega2::<S>());
        let th = |m: &Mat4<S>, f: &KForm<S>| f.theta_g1(m);
        let sc = |s: &S, f: &KForm<S>| f.scale(s);

        // dφ
        let p12 = th(b, &w2) - th(c, &w1);
        let p17 = th(b, &w7) - th(a, &w1) + sc(&x, &w1) + sc(&y, &w2);
        let p27 = th(c, &w7) - th(a, &w2) + sc(&z, &w1) + sc(&w, &w2);
        let dphi = p12.wedge(&e(&[1, 2])) + p17.wedge(&e(&[1, 7])) + p27.wedge(&e(&[2, 7]));

        // ∗dφ
        let s7 = -th(&bt, &w2) + th(&ct, &w1);
        let s2 = th(&bt, &w7) - th(&at, &w1) - sc(&(tr_a.clone() + x.clone()), &w1) - sc(&y, &w2);
        let s1 = -th(&ct, &w7) + th(&at, &w2) + sc(&(tr_a.clone() + w.clone()), &w2) + sc(&z, &w1);
        let star_dphi = s7.wedge(&e(&[7])) + s2.wedge(&e(&[2])) + s1.wedge(&e(&[1]));

        // d∗dφ
        let k17 = sc(&y, &s2) + sc(&x, &s1);
        let k27 = sc(&w, &s2) + sc(&z, &s1);
        let d_star_dphi = th(b, &s7).wedge(&e(&[1, 7]))
            + th(c, &s7).wedge(&e(&[2, 7]))
            + th(a, &(-s2.clone())).wedge(&e(&[2, 7]))
            + th(b, &s2).wedge(&e(&[1, 2]))
            + th(a, &(-s1.clone())).wedge(&e(&[1, 7]))
            + th(c, &(-s1.clone())).wedge(&e(&[1, 2]))
            + k17.wedge(&e(&[1, 7]))
            + k27.wedge(&e(&[2, 7]));

        // ∗d∗dφ
        let ta = |f: &KForm<S>| th(&at, f) + sc(&tr_a, f);
        let star_d_star_dphi = th(&bt, &p12).wedge(&e(&[2]))
            - th(&ct, &p12).wedge(&e(&[1]))
            - ta(&p17).wedge(&e(&[1]))
            - ta(&p27).wedge(&e(&[2]))
            + th(&bt, &p17).wedge(&e(&[7]))
            + th(&ct, &p27).wedge(&e(&[7]))
            // ∗(K∧e¹⁷) = −∗g₁K∧e², ∗(K∧e²⁷) = ∗g₁K∧e¹
            - star_g1(&k17).wedge(&e(&[2]))
            + star_g1(&k27).wedge(&e(&[1]));

        // ∗φ and its derivatives
        let star_phi = e::<S>(&[3, 4, 5, 6])
            + w7.wedge(&e(&[1, 2]))
            + w1.wedge(&e(&[2, 7]))
            - w2.wedge(&e(&[1, 7]));
        let q = th(a, &w7) - sc(&tr_a1, &w7) + th(b, &w1) + th(c, &w2);
        let d_star_phi = -e::<S>(&[3, 4, 5, 6, 7]).scale(&tr_a) + q.wedge(&e(&[1, 2, 7]));
        let star_d_star_phi = -e::<S>(&[1, 2]).scale(&tr_a) + star_g1(&q);
        let r = sc(&(tr_a1.clone() + tr_a.clone()), &w7) + th(&at, &w7) + th(&bt, &w1) + th(&ct, &w2);
        let d_star_d_star_phi = e::<S>(&[1, 2, 7]).scale(&(tr_a1 * tr_a))
            - th(a, &r).wedge(&e(&[7]))
            - th(b, &r).wedge(&e(&[1]))
            - th(c, &r).wedge(&e(&[2]));

        DerivativeForms {
            dphi,
            star_dphi,
            d_star_dphi,
            star_d_star_dphi,
            star_phi,
            d_star_phi,
            star_d_star_phi,
            d_star_d_star_phi,
        }
    }

    /// The three 2-forms whose vanishing characterizes `dφ = 0`:
    /// `θ(A)ω₁ − θ(B)ω₇ − xω₁ − yω₂`, `θ(A)ω₂ − θ(C)ω₇ − zω₁ − wω₂`,
    /// `θ(B)ω₂ − θ(C)ω₁`.
    pub fn closedness_conditions(&self) -> [KForm<S>; 3] {
        closedness_residuals(&self.a1, &self.a, &self.b, &self.c)
    }

    pub fn is_closed(&self, tol: f64) -> bool {
        self.closedness_conditions().iter().all(|f| f.is_negligible(tol))
    }

    /// `(tr A, θ(A)ω₇ + θ(B)ω₁ + θ(C)ω₂ − (tr A1)ω₇)`; `d∗φ = 0` iff both
    /// vanish.
    pub fn coclosedness_conditions(&self) -> (S, KForm<S>) {
        let (w7, w1, w2) = (omega7::<S>(), omega1::<S>(), omega2::<S>());
        let form = w7.theta_g1(&self.a) + w1.theta_g1(&self.b) + w2.theta_g1(&self.c)
            - w7.scale(&self.a1.trace());
        (self.a.trace(), form)
    }

    pub fn is_coclosed(&self, tol: f64) -> bool {
        let (t, f) = self.coclosedness_conditions();
        t.is_negligible(tol) && f.is_negligible(tol)
    }

    /// Torsion forms from the coefficient formulas. They use `tr B = tr C = 0`,
    /// which every valid spec satisfies. The `A`-part of `τ₀` is
    /// `a₃₄ − a₄₃ + a₅₆ − a₆₅` and the `e¹²⁷` coefficient of `τ₃` is `−τ₀`
    /// (both forced by `τ₀ = ⅐∗(dφ∧φ)` and `τ₃ = ∗dφ − τ₀φ − 3∗(τ₁∧φ)`).
    pub fn specialized_torsion(&self) -> TorsionForms<S> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let (x, y, z, w) = self.xyzw();
        // entries labelled by basis indices 3..6
        let m = |mat: &Mat4<S>, i: usize, j: usize| mat[(i - 3, j - 3)].clone();
        let am = |i, j| m(a, i, j);
        let bm = |i, j| m(b, i, j);
        let cm = |i, j| m(c, i, j);
        let tr_a = a.trace();
        let tr_a1 = self.a1.trace();
        let two = S::from_i64(2);
        let three = S::from_i64(3);

        let tau0 = S::from_ratio(2, 7)
            * (am(3, 4) - am(4, 3) + am(5, 6) - am(6, 5) + bm(3, 5) + bm(6, 4) - bm(5, 3) - bm(4, 6)
                + cm(5, 4)
                + cm(6, 3)
                - cm(4, 5)
                - cm(3, 6)
                + z.clone()
                - y.clone());

        let m12 = S::from_ratio(-1, 12);
        let lambda2 = m12.clone()
            * (am(6, 4) + am(3, 5) - am(4, 6) - am(5, 3) + bm(4, 3) + bm(6, 5) - bm(3, 4) - bm(5, 6));
        let lambda1 = m12.clone()
            * (am(3, 6) + am(4, 5) - am(6, 3) - am(5, 4) + cm(5, 6) + cm(3, 4) - cm(6, 5) - cm(4, 3));
        let lambda7 = m12
            * (bm(6, 3) + bm(5, 4) - bm(3, 6) - bm(4, 5) + cm(4, 6) + cm(5, 3) - cm(6, 4) - cm(3, 5)
                + two.clone() * (tr_a1.clone() + tr_a.clone()));
        let tau1 = KForm::from_terms(
            1,
            [
                (Blade::from_mask(1), lambda1.clone()),
                (Blade::from_mask(1 << 1), lambda2.clone()),
                (Blade::from_mask(1 << 6), lambda7.clone()),
            ],
        )
        .expect("1-blades");

        let third = S::from_ratio(1, 3);
        let coeffs: [(&[u8], S); 9] = [
            (
                &[1, 2],
                tr_a.clone() - two.clone() * tr_a1.clone() + bm(4, 5) + bm(3, 6) - bm(5, 4) - bm(6, 3)
                    + cm(3, 5)
                    + cm(6, 4)
                    - cm(5, 3)
                    - cm(4, 6),
            ),
            (
                &[1, 7],
                am(6, 4) + am(3, 5) - am(4, 6) - am(5, 3) + bm(6, 5) + bm(4, 3) - bm(5, 6) - bm(3, 4),
            ),
            (
                &[2, 7],
                am(5, 4) + am(6, 3) - am(4, 5) - am(3, 6) + cm(6, 5) + cm(4, 3) - cm(5, 6) - cm(3, 4),
            ),
            (
                &[3, 4],
                tr_a1.clone() - two.clone() * am(3, 3) - two.clone() * am(4, 4) + am(5, 5) + am(6, 6)
                    + two.clone() * cm(4, 6)
                    - two.clone() * cm(3, 5)
                    - two.clone() * bm(4, 5)
                    - two.clone() * bm(3, 6)
                    - cm(5, 3)
                    + cm(6, 4)
                    - bm(6, 3)
                    - bm(5, 4),
            ),
            (
                &[3, 5],
                -two.clone() * am(5, 4) + two.clone() * am(3, 6) + two.clone() * cm(5, 6)
                    + two.clone() * cm(3, 4)
                    + am(6, 3)
                    - am(4, 5)
                    + cm(6, 5)
                    + cm(4, 3)
                    - three.clone() * bm(5, 5)
                    - three.clone() * bm(3, 3),
            ),
            (
                &[3, 6],
                -two.clone() * am(6, 4) - two.clone() * am(3, 5) - two.clone() * bm(6, 5)
                    + two.clone() * bm(3, 4)
                    - am(4, 6)
                    - am(5, 3)
                    - bm(5, 6)
                    + bm(4, 3)
                    + three.clone() * cm(6, 6)
                    + three.clone() * cm(3, 3),
            ),
            (
                &[4, 5],
                am(6, 4) + am(3, 5) + bm(6, 5) - bm(3, 4) + two.clone() * am(4, 6) + two.clone() * am(5, 3)
                    + two.clone() * bm(5, 6)
                    - two.clone() * bm(4, 3)
                    + three.clone() * cm(5, 5)
                    + three.clone() * cm(4, 4),
            ),
            (
                &[4, 6],
                -am(5, 4) + am(3, 6) + cm(5, 6) + cm(3, 4) + two.clone() * am(6, 3) - two.clone() * am(4, 5)
                    + two.clone() * cm(6, 5)
                    + two.clone() * cm(4, 3)
                    + three.clone() * bm(6, 6)
                    + three.clone() * bm(4, 4),
            ),
            (
                &[5, 6],
                tr_a1 + am(3, 3) + am(4, 4) - two.clone() * am(5, 5) - two.clone() * am(6, 6) - cm(4, 6)
                    + cm(3, 5)
                    + bm(4, 5)
                    + bm(3, 6)
                    + two.clone() * cm(5, 3)
                    - two.clone() * cm(6, 4)
                    + two.clone() * bm(6, 3)
                    + two * bm(5, 4),
            ),
        ];
        let tau2 = KForm::from_terms(
            2,
            coeffs
                .into_iter()
                .map(|(idx, v)| (Blade::new(idx).expect("valid"), v * third.clone())),
        )
        .expect("2-blades");

        let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
        let (w7, w1, w2) = (omega7::<S>(), omega1::<S>(), omega2::<S>());
        let th = |m: &Mat4<S>, f: &KForm<S>| f.theta_g1(m);
        let sc = |s: &S, f: &KForm<S>| f.scale(s);
        let three = S::from_i64(3);
        let t7 = -th(&bt, &w2) + th(&ct, &w1) - sc(&tau0, &w7) - sc(&(three.clone() * lambda1.clone()), &w2)
            + sc(&(three.clone() * lambda2.clone()), &w1);
        let t2 = th(&bt, &w7) - th(&at, &w1)
            - sc(&(tr_a.clone() + x + three.clone() * lambda7.clone()), &w1)
            + sc(&(-y - tau0.clone()), &w2)
            + sc(&(three.clone() * lambda1), &w7);
        let t1 = -th(&ct, &w7) + th(&at, &w2) + sc(&(z - tau0.clone()), &w1)
            + sc(&(tr_a + w + three.clone() * lambda7), &w2)
            - sc(&(three * lambda2), &w7);
        let tau3 = -e::<S>(&[1, 2, 7]).scale(&tau0)
            + t7.wedge(&e(&[7]))
            + t2.wedge(&e(&[2]))
            + t1.wedge(&e(&[1]));

        TorsionForms {
            tau0,
            tau1,
            tau2,
            tau3,
        }
    }

    /// Eigenvalues of `ad e₇` restricted to the center of
    /// `h = span{e₁,…,e₆}`, as `(re, im)` pairs sorted lexicographically.
    /// Empty if the center is not `ad e₇`-invariant.
    pub fn center_spectrum(&self) -> Vec<(f64, f64)> {
        let g = self.algebra.to_f64();
        // X ∈ h central in h iff [X, eⱼ] = 0 for j = 1..6
        let mut sys = DMatrix::zeros(36, 6);
        for j in 0..6 {
            let adj = g.ad(j as u8 + 1);
            for i in 0..6 {
                for k in 0..6 {
                    // [eᵢ, eⱼ]ₖ = −(ad eⱼ)ₖᵢ
                    sys[(j * 6 + k, i)] = -adj[(k, i)];
                }
            }
        }
        let center = crate::linalg::float_nullspace(&sys, 1e-10).basis;
        if center.is_empty() {
            return Vec::new();
        }
        let basis = DMatrix::from_columns(&center);
        let ad7 = g.ad(7);
        let h_ad7 = ad7.view((0, 0), (6, 6)).into_owned();
        let image = &h_ad7 * &basis;
        // coordinates of the image in the (orthonormal) center basis
        let coords = basis.transpose() * &image;
        if (&basis * &coords - &image).amax() > 1e-8 {
            return Vec::new();
        }
        let mut eig: Vec<(f64, f64)> = coords
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect();
        eig.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        eig
    }
}

/// Closedness residuals straight from raw matrices (no validation).
pub fn closedness_residuals<S: Scalar>(
    a1: &Mat2<S>,
    a: &Mat4<S>,
    b: &Mat4<S>,
    c: &Mat4<S>,
) -> [KForm<S>; 3] {
    let (x, y, z, w) = (
        a1[(0, 0)].clone(),
        a1[(1, 0)].clone(),
        a1[(0, 1)].clone(),
        a1[(1, 1)].clone(),
    );
    let (w7, w1, w2) = (omega7::<S>(), omega1::<S>(), omega2::<S>());
    [
        w1.theta_g1(a) - w7.theta_g1(b) - w1.scale(&x) - w2.scale(&y),
        w2.theta_g1(a) - w7.theta_g1(c) - w1.scale(&z) - w2.scale(&w),
        w2.theta_g1(b) - w1.theta_g1(c),
    ]
}

/// Named instances.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin<S> {
    /// The shrinking family `G_s`.
    Gs(S),
    /// The family `S_a`.
    Sa(S),
    /// The steady example on `g_FR`.
    Fr,
}

impl<S: Scalar> Builtin<S> {
    pub const NAMES: [&'static str; 3] = ["gs", "sa", "fr"];

    pub fn from_name(name: &str, param: Option<S>) -> Result<Self, FamilyError> {
        match (name.to_ascii_lowercase().as_str(), param) {
            ("gs", Some(p)) => Ok(Builtin::Gs(p)),
            ("sa", Some(p)) => Ok(Builtin::Sa(p)),
            ("gs", None) => Err(FamilyError::MissingParameter("gs")),
            ("sa", None) => Err(FamilyError::MissingParameter("sa")),
            ("fr", None) => Ok(Builtin::Fr),
            ("fr", Some(_)) => Err(FamilyError::UnexpectedParameter),
            (other, _) => Err(FamilyError::UnknownBuiltin(other.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Gs(s) => format!("gs:{s}"),
            Builtin::Sa(a) => format!("sa:{a}"),
            Builtin::Fr => "fr".to_string(),
        }
    }

    pub fn matrices(&self) -> (Mat2<S>, Mat4<S>, Mat4<S>, Mat4<S>) {
        let q = |n, d| S::from_ratio(n, d);
        let zero = S::zero;
        let mut b = Mat4::from_element(zero());
        let mut c = Mat4::from_element(zero());
        match self {
            Builtin::Gs(s) => {
                let a1 = Mat2::from_diagonal(&nalgebra::Vector2::new(
                    q(3, 8) + s.clone(),
                    q(-1, 8) + s.clone(),
                ));
                let a = Mat4::from_diagonal(&nalgebra::Vector4::new(
                    q(3, 8) - s.clone(),
                    q(-1, 8) - s.clone(),
                    q(1, 4),
                    q(3, 4),
                ));
                // [e₁,e₃] = −e₆, [e₁,e₄] = −e₅, [e₂,e₃] = −e₅
                b[(3, 0)] = q(-1, 1);
                b[(2, 1)] = q(-1, 1);
                c[(2, 0)] = q(-1, 1);
                (a1, a, b, c)
            }
            Builtin::Sa(p) => {
                let four_a = S::from_i64(4) * p.clone();
                let hi = (S::one() + four_a.clone()) * q(1, 4);
                let lo = (S::one() - four_a) * q(1, 4);
                let a1 = Mat2::from_diagonal(&nalgebra::Vector2::new(hi.clone(), hi));
                let a = Mat4::from_diagonal(&nalgebra::Vector4::new(lo.clone(), lo, q(1, 2), q(1, 2)));
                // [e₁,e₃] = −e₆, [e₁,e₄] = −e₅, [e₂,e₃] = −e₅, [e₂,e₄] = e₆
                b[(3, 0)] = q(-1, 1);
                b[(2, 1)] = q(-1, 1);
                c[(2, 0)] = q(-1, 1);
                c[(3, 1)] = q(1, 1);
                (a1, a, b, c)
            }
            Builtin::Fr => {
                let a1 = Mat2::from_element(zero());
                // ad e₇|g₁ = Diag(−1, 1, 1, 1); with the opposite sign φ is
                // not closed for these brackets
                let a = Mat4::from_diagonal(&nalgebra::Vector4::new(q(-1, 1), q(1, 1), q(1, 1), q(1, 1)));
                // [e₁,e₄] = −2e₅, [e₂,e₄] = 2e₆
                b[(2, 1)] = q(-2, 1);
                c[(3, 1)] = q(2, 1);
                (a1, a, b, c)
            }
        }
    }

    pub fn spec(&self) -> FamilySpec<S> {
        let (a1, a, b, c) = self.matrices();
        FamilySpec::new(a1, a, b, c, 1e-12).expect("builtin instances are valid")
    }

    /// The known derivation of each soliton (`D_s`, `D_a`, `D_FR`).
    pub fn reference_derivation(&self) -> Mat7<S> {
        let q = |n: i64| S::from_i64(n);
        let diag: [S; 7] = match self {
            Builtin::Gs(s) => {
                let s2 = s.clone() * s.clone();
                let k = |c0: i64, c1: i64, c2: i64| {
                    (q(c0) + q(c1) * s.clone() + q(c2) * s2.clone()) * S::from_ratio(1, 32)
                };
                [
                    k(45, -32, -64),
                    k(5, -32, -64),
                    k(45, 32, -64),
                    k(5, 32, -64),
                    k(50, 0, -128),
                    k(90, 0, -128),
                    S::zero(),
                ]
            }
            Builtin::Sa(a) => {
                let a2 = a.clone() * a.clone();
                let k = |c0: i64, c1: i64, c2: i64| {
                    (q(c0) + q(c1) * a.clone() + q(c2) * a2.clone()) * S::from_ratio(1, 8)
                };
                [
                    k(15, -8, -16),
                    k(15, -8, -16),
                    k(15, 8, -16),
                    k(15, 8, -16),
                    k(30, 0, -32),
                    k(30, 0, -32),
                    S::zero(),
                ]
            }
            Builtin::Fr => [q(0), q(0), q(-4), q(4), q(4), q(4), q(0)],
        };
        Mat7::from_diagonal(&nalgebra::SVector::<S, 7>::from_iterator(diag))
    }

    /// The known soliton constant `c_s = −15/8 + 8s²`, `c_a = −9/2 + 8a²`,
    /// `c_FR = 0`.
    pub fn reference_soliton_constant(&self) -> S {
        match self {
            Builtin::Gs(s) => S::from_ratio(-15, 8) + S::from_i64(8) * s.clone() * s.clone(),
            Builtin::Sa(a) => S::from_ratio(-9, 2) + S::from_i64(8) * a.clone() * a.clone(),
            Builtin::Fr => S::zero(),
        }
    }
}

/// The map `h_s`: `e₁↔e₃`, `e₂↔e₄`, `e₅ ↦ −e₅`, `e₆ ↦ −e₆`, `e₇ ↦ e₇`
/// (columns are images).
pub fn h_map<S: Scalar>() -> Mat7<S> {
    let mut h = Mat7::zeros();
    let one = S::one;
    h[(2, 0)] = one();
    h[(3, 1)] = one();
    h[(0, 2)] = one();
    h[(1, 3)] = one();
    h[(4, 4)] = -one();
    h[(5, 5)] = -one();
    h[(6, 6)] = one();
    h
}
