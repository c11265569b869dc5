//! Generic G2 computations on a Lie algebra with a fixed 3-form.
//!
//! Nothing here knows about the `G_{A1,A,B,C}` family: torsion, the Hodge
//! Laplacian and the residuals are assembled from the Chevalley–Eilenberg
//! differential and the Hodge star only. The family module's closed-form
//! formulas are checked against this one.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::exterior::{standard_phi, Blade, KForm, Mat7, DIM};
use crate::liealg::LieAlgebra;
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum G2Error {
    #[error("3-form is not positive: {0}")]
    NotPositive(String),
    #[error("expected a 3-form, got degree {0}")]
    NotThreeForm(usize),
    #[error("phi is not closed (|dphi| = {0:e})")]
    NotClosed(f64),
    #[error("type decomposition is only defined in degree 2 or 3, got {0}")]
    UnsupportedDegree(usize),
}

/// How the metric is obtained from the 3-form.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame<S> {
    /// The basis `e₁,…,e₇` is declared orthonormal and oriented.
    StandardOrthonormal,
    /// Metric induced from `phi`; stored as coframe changes to an
    /// orthonormal coframe `θ` and back.
    General(MetricFrame<S>),
}

/// Coframe data for a non-standard metric: `eⁱ = Σ_a to_orthonormal[i,a] θ^a`
/// and `θ^a = Σᵢ from_orthonormal[a,i] eⁱ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFrame<S> {
    pub metric: Mat7<S>,
    pub to_orthonormal: Mat7<S>,
    pub from_orthonormal: Mat7<S>,
    /// `+1` if the induced orientation agrees with `e¹²³⁴⁵⁶⁷`, else `−1`.
    pub orientation: S,
}

/// A 3-form on a Lie algebra together with its metric frame.
#[derive(Debug, Clone)]
pub struct G2Structure<S: Scalar> {
    algebra: LieAlgebra<S>,
    phi: KForm<S>,
    frame: Frame<S>,
}

impl<S: Scalar> G2Structure<S> {
    /// The standard `φ` on `algebra` with `e₁,…,e₇` orthonormal.
    pub fn standard(algebra: LieAlgebra<S>) -> Self {
        G2Structure {
            algebra,
            phi: standard_phi(),
            frame: Frame::StandardOrthonormal,
        }
    }

    /// An arbitrary positive 3-form; the metric and orientation are the
    /// ones it induces. The coframe data is computed in `f64` and then
    /// stored in the backend `S`.
    pub fn with_induced_metric(algebra: LieAlgebra<S>, phi: KForm<S>) -> Result<Self, G2Error> {
        if phi.degree() != 3 {
            return Err(G2Error::NotThreeForm(phi.degree()));
        }
        let m = metric_from_positive_3form(&phi.to_f64())?;
        let chol = m
            .g
            .cholesky()
            .ok_or_else(|| G2Error::NotPositive("metric is not positive definite".into()))?;
        let l = chol.l();
        let lt = l.transpose();
        let q = lt
            .try_inverse()
            .ok_or_else(|| G2Error::NotPositive("singular metric".into()))?;
        let conv = |m: &Mat7<f64>| Mat7::from_fn(|i, j| S::from_f64(m[(i, j)]));
        Ok(G2Structure {
            algebra,
            phi,
            frame: Frame::General(MetricFrame {
                metric: conv(&m.g),
                to_orthonormal: conv(&q),
                from_orthonormal: conv(&lt),
                orientation: S::from_f64(m.orientation),
            }),
        })
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn phi(&self) -> &KForm<S> {
        &self.phi
    }

    pub fn frame(&self) -> &Frame<S> {
        &self.frame
    }

    pub fn d(&self, a: &KForm<S>) -> KForm<S> {
        self.algebra.ce_differential(a)
    }

    /// Hodge star of the metric and orientation in use.
    pub fn star(&self, a: &KForm<S>) -> KForm<S> {
        match &self.frame {
            Frame::StandardOrthonormal => a.hodge_star(),
            Frame::General(f) => {
                let ortho = a.substitute(&f.to_orthonormal);
                let starred = ortho.hodge_star().scale(&f.orientation);
                starred.substitute(&f.from_orthonormal)
            }
        }
    }

    /// Inner product of the metric in use.
    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> S {
        assert_eq!(a.degree(), b.degree(), "inner product of different degrees");
        match &self.frame {
            Frame::StandardOrthonormal => a.inner(b).expect("degrees checked"),
            Frame::General(f) => {
                let (x, y) = (a.substitute(&f.to_orthonormal), b.substitute(&f.to_orthonormal));
                x.inner(&y).expect("degrees checked")
            }
        }
    }

    pub fn norm_sq(&self, a: &KForm<S>) -> S {
        self.inner(a, a)
    }

    pub fn star_phi(&self) -> KForm<S> {
        self.star(&self.phi)
    }

    /// Torsion forms from
    /// `τ₀ = ⅐∗(dφ∧φ)`, `τ₁ = −1/12 ∗(∗dφ∧φ)`,
    /// `τ₂ = −∗d∗φ + 4∗(τ₁∧∗φ)`, `τ₃ = ∗dφ − τ₀φ − 3∗(τ₁∧φ)`.
    pub fn torsion(&self) -> TorsionForms<S> {
        let phi = &self.phi;
        let psi = self.star_phi();
        let dphi = self.d(phi);
        let dpsi = self.d(&psi);
        let vol_coeff = |f: &KForm<S>| self.star(f).get(Blade::EMPTY);
        let tau0 = vol_coeff(&dphi.wedge(phi)) * S::from_ratio(1, 7);
        let star_dphi = self.star(&dphi);
        let tau1 = self
            .star(&star_dphi.wedge(phi))
            .scale(&S::from_ratio(-1, 12));
        let tau2 = -self.star(&dpsi)
            + self.star(&tau1.wedge(&psi)).scale(&S::from_i64(4));
        let tau3 = star_dphi
            - phi.scale(&tau0)
            - self.star(&tau1.wedge(phi)).scale(&S::from_i64(3));
        TorsionForms {
            tau0,
            tau1,
            tau2,
            tau3,
        }
    }

    /// `Δα = (−1)^k (d∗d∗ − ∗d∗d) α`.
    pub fn laplacian(&self, a: &KForm<S>) -> KForm<S> {
        let k = a.degree();
        let first = self.d(&self.star(&self.d(&self.star(a))));
        let second = self.star(&self.d(&self.star(&self.d(a))));
        let out = first - second;
        if k % 2 == 0 {
            out
        } else {
            -out
        }
    }

    pub fn laplacian_phi(&self) -> KForm<S> {
        self.laplacian(&self.phi)
    }

    /// Projections onto the irreducible summands
    /// `Λ² = Λ²₇ ⊕ Λ²₁₄` and `Λ³ = Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇`.
    pub fn type_decompose(&self, a: &KForm<S>) -> Result<TypeComponents<S>, G2Error> {
        match a.degree() {
            2 => {
                // T(α) = ∗(φ∧α) has eigenvalue 2 on Λ²₇ and −1 on Λ²₁₄
                let t = self.star(&self.phi.wedge(a));
                let third = S::from_ratio(1, 3);
                let p7 = (a + &t).scale(&third);
                let p14 = (a.scale(&S::from_i64(2)) - t).scale(&third);
                Ok(TypeComponents::Two { p7, p14 })
            }
            3 => {
                let phi = &self.phi;
                let c1 = self.inner(a, phi) / self.norm_sq(phi);
                let p1 = phi.scale(&c1);
                let p7 = self.project_lambda3_7(a);
                let p27 = a - &p1 - p7.clone();
                Ok(TypeComponents::Three { p1, p7, p27 })
            }
            k => Err(G2Error::UnsupportedDegree(k)),
        }
    }

    /// Orthogonal projection onto `Λ³₇ = {∗(φ∧ξ) : ξ ∈ Λ¹}`.
    fn project_lambda3_7(&self, a: &KForm<S>) -> KForm<S> {
        let gens: Vec<KForm<S>> = (1..=7u8)
            .map(|i| self.star(&self.phi.wedge(&KForm::e(&[i]))))
            .collect();
        let gram = DMatrix::from_fn(DIM, DIM, |i, j| self.inner(&gens[i], &gens[j]));
        let rhs = DVector::from_fn(DIM, |i, _| self.inner(&gens[i], a));
        let Some(sol) = linalg::solve_affine(&gram, &rhs, 1e-9) else {
            return KForm::zero(3);
        };
        gens.iter()
            .zip(sol.particular.iter())
            .fold(KForm::zero(3), |acc, (g, c)| acc + g.scale(c))
    }

    fn require_closed(&self, tol: f64) -> Result<KForm<S>, G2Error> {
        let dphi = self.d(&self.phi);
        if dphi.is_negligible(tol) {
            Ok(dphi)
        } else {
            Err(G2Error::NotClosed(dphi.max_abs()))
        }
    }

    /// Both sides of `dτ = ⅙|τ|²φ + ⅙∗(τ∧τ)` for closed `φ`, with `τ = τ₂`.
    pub fn erp_residual(&self, tol: f64) -> Result<ErpReport<S>, G2Error> {
        self.require_closed(tol)?;
        let tau = self.torsion().tau2;
        let lhs = self.d(&tau);
        let sixth = S::from_ratio(1, 6);
        let rhs = (self.phi.scale(&self.norm_sq(&tau)) + self.star(&tau.wedge(&tau))).scale(&sixth);
        let residual = (&lhs - &rhs).norm();
        Ok(ErpReport { lhs, rhs, residual })
    }

    /// `λ = |τ₂|²/7` and `|Δφ − λφ|` for closed `φ`.
    pub fn eigenform_residual(&self, tol: f64) -> Result<EigenformReport<S>, G2Error> {
        self.require_closed(tol)?;
        let tau = self.torsion().tau2;
        let lambda = self.norm_sq(&tau) * S::from_ratio(1, 7);
        let lap = self.laplacian_phi();
        let residual = (lap - self.phi.scale(&lambda)).norm();
        Ok(EigenformReport {
            lambda,
            residual,
            tau_norm: tau.norm(),
        })
    }
}

/// `(τ₀, τ₁, τ₂, τ₃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionForms<S: Scalar> {
    pub tau0: S,
    pub tau1: KForm<S>,
    pub tau2: KForm<S>,
    pub tau3: KForm<S>,
}

impl<S: Scalar> TorsionForms<S> {
    /// `λ₁ = ⟨τ₁,e¹⟩`.
    pub fn lambda1(&self) -> S {
        self.tau1.get(Blade::from_mask(1))
    }
    /// `λ₂ = ⟨τ₁,e²⟩`.
    pub fn lambda2(&self) -> S {
        self.tau1.get(Blade::from_mask(1 << 1))
    }
    /// `λ₇ = ⟨τ₁,e⁷⟩`.
    pub fn lambda7(&self) -> S {
        self.tau1.get(Blade::from_mask(1 << 6))
    }

    /// Largest coefficient deviation between two torsion quadruples.
    pub fn max_difference(&self, other: &TorsionForms<S>) -> f64 {
        let d0 = (self.tau0.clone() - other.tau0.clone()).to_f64().abs();
        [
            d0,
            (&self.tau1 - &other.tau1).max_abs(),
            (&self.tau2 - &other.tau2).max_abs(),
            (&self.tau3 - &other.tau3).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_torsion_free(&self, tol: f64) -> bool {
        self.tau0.is_negligible(tol)
            && self.tau1.is_negligible(tol)
            && self.tau2.is_negligible(tol)
            && self.tau3.is_negligible(tol)
    }

    /// Residuals of `dφ = τ₀∗φ + 3τ₁∧φ + ∗τ₃` and `d∗φ = 4τ₁∧∗φ + τ₂∧φ`.
    pub fn reconstruction_residual(&self, s: &G2Structure<S>) -> (f64, f64) {
        let phi = s.phi();
        let psi = s.star_phi();
        let dphi = s.d(phi);
        let dpsi = s.d(&psi);
        let r1 = psi.scale(&self.tau0)
            + self.tau1.wedge(phi).scale(&S::from_i64(3))
            + s.star(&self.tau3);
        let r2 = self.tau1.wedge(&psi).scale(&S::from_i64(4)) + self.tau2.wedge(phi);
        ((dphi - r1).max_abs(), (dpsi - r2).max_abs())
    }

    /// Residuals of the type conditions `τ₂∧∗φ = 0`, `τ₃∧φ = 0`,
    /// `τ₃∧∗φ = 0`.
    pub fn type_residual(&self, s: &G2Structure<S>) -> f64 {
        let psi = s.star_phi();
        [
            self.tau2.wedge(&psi).max_abs(),
            self.tau3.wedge(s.phi()).max_abs(),
            self.tau3.wedge(&psi).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeComponents<S: Scalar> {
    Two { p7: KForm<S>, p14: KForm<S> },
    Three { p1: KForm<S>, p7: KForm<S>, p27: KForm<S> },
}

impl<S: Scalar> TypeComponents<S> {
    pub fn parts(&self) -> Vec<&KForm<S>> {
        match self {
            TypeComponents::Two { p7, p14 } => vec![p7, p14],
            TypeComponents::Three { p1, p7, p27 } => vec![p1, p7, p27],
        }
    }

    pub fn sum(&self) -> KForm<S> {
        let parts = self.parts();
        let mut acc = KForm::zero(parts[0].degree());
        for p in parts {
            acc = acc + p.clone();
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct ErpReport<S: Scalar> {
    pub lhs: KForm<S>,
    pub rhs: KForm<S>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct EigenformReport<S> {
    pub lambda: S,
    pub residual: f64,
    pub tau_norm: f64,
}

/// Metric and orientation induced by a positive 3-form.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    pub g: Mat7<f64>,
    /// `+1` when `e¹²³⁴⁵⁶⁷` is positively oriented, else `−1`.
    pub orientation: f64,
}

impl MetricTensor {
    /// Ratio of smallest to largest eigenvalue of `g`.
    pub fn positivity_margin(&self) -> f64 {
        let eig = self.g.symmetric_eigenvalues();
        let max = eig.max();
        if max <= 0.0 {
            return 0.0;
        }
        eig.min() / max
    }
}

/// `B(X,Y)·vol = ⅙ ι_Xφ ∧ ι_Yφ ∧ φ` and `g = B / det(B)^{1/9}`.
pub fn bilinear_form_of(phi: &KForm<f64>) -> Mat7<f64> {
    let contractions: Vec<KForm<f64>> = (1..=7u8).map(|i| phi.contract(i)).collect();
    let mut b = Mat7::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let v = contractions[i]
                .wedge(&contractions[j])
                .wedge(phi)
                .get(Blade::VOLUME)
                / 6.0;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// Induced metric of a positive 3-form; fails when the candidate form is
/// not definite.
pub fn metric_from_positive_3form(phi: &KForm<f64>) -> Result<MetricTensor, G2Error> {
    if phi.degree() != 3 {
        return Err(G2Error::NotThreeForm(phi.degree()));
    }
    metric_from_bilinear(&bilinear_form_of(phi))
}

pub(crate) fn metric_from_bilinear(b: &Mat7<f64>) -> Result<MetricTensor, G2Error> {
    let det = b.determinant();
    if !det.is_finite() || det == 0.0 {
        return Err(G2Error::NotPositive(format!("degenerate bilinear form (det = {det:e})")));
    }
    let orientation = det.signum();
    // real ninth root keeps the sign, so g is definite-positive when B is
    // definite of either sign
    let g = b / (orientation * det.abs().powf(1.0 / 9.0));
    let eig = g.symmetric_eigenvalues();
    if eig.min() <= 0.0 {
        return Err(G2Error::NotPositive(format!(
            "induced bilinear form is indefinite (eigenvalues {:.3e}..{:.3e})",
            eig.min(),
            eig.max()
        )));
    }
    Ok(MetricTensor { g, orientation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn flat_structure_is_torsion_free() {
        let s = G2Structure::<Q>::standard(LieAlgebra::abelian());
        let t = s.torsion();
        assert!(t.is_torsion_free(0.0));
        assert!(s.laplacian_phi().is_empty());
        let erp = s.erp_residual(0.0).unwrap();
        assert_eq!(erp.residual, 0.0);
        let ef = s.eigenform_residual(0.0).unwrap();
        assert!(ef.lambda.is_zero());
        assert_eq!(ef.residual, 0.0);
    }

    #[test]
    fn standard_phi_induces_identity() {
        let m = metric_from_positive_3form(&standard_phi()).unwrap();
        assert!((m.g - Mat7::identity()).amax() < 1e-14);
        assert_eq!(m.orientation, 1.0);
    }

    #[test]
    fn scaled_phi_induces_scaled_metric() {
        let t = 2.0;
        let phi = standard_phi::<f64>().substitute(&(Mat7::identity() * t));
        let m = metric_from_positive_3form(&phi).unwrap();
        assert!((m.g - Mat7::identity() * (t * t)).amax() < 1e-12);
    }

    #[test]
    fn negated_term_is_not_positive() {
        let mut phi = standard_phi::<f64>();
        phi.add_term(Blade::new(&[1, 2, 7]).unwrap(), -2.0);
        assert!(matches!(
            metric_from_positive_3form(&phi),
            Err(G2Error::NotPositive(_))
        ));
    }

    #[test]
    fn contraction_lies_in_lambda2_7() {
        let s = G2Structure::<Q>::standard(LieAlgebra::abelian());
        let a = s.phi().contract(1);
        match s.type_decompose(&a).unwrap() {
            TypeComponents::Two { p7, p14 } => {
                assert_eq!(p7, a);
                assert!(p14.is_empty());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn phi_lies_in_lambda3_1() {
        let s = G2Structure::<Q>::standard(LieAlgebra::abelian());
        match s.type_decompose(s.phi()).unwrap() {
            TypeComponents::Three { p1, p7, p27 } => {
                assert_eq!(&p1, s.phi());
                assert!(p7.is_empty() && p27.is_empty());
            }
            _ => unreachable!(),
        }
        assert!(matches!(
            s.type_decompose(&KForm::e(&[1])),
            Err(G2Error::UnsupportedDegree(1))
        ));
    }

    #[test]
    fn general_frame_agrees_with_standard_for_standard_phi() {
        let g = LieAlgebra::<f64>::from_brackets([(7, 1, 1, 1.0), (1, 3, 6, -1.0)]).unwrap();
        let std = G2Structure::standard(g.clone());
        let gen = G2Structure::with_induced_metric(g, standard_phi()).unwrap();
        for b in Blade::all() {
            let f = KForm::basis(b);
            assert!((std.star(&f) - gen.star(&f)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn erp_requires_closed() {
        // d e^7 ≠ 0 makes φ non-closed
        let g = LieAlgebra::<Q>::from_brackets([(1, 2, 7, Q::from_i64(1))]).unwrap();
        let s = G2Structure::standard(g);
        assert!(matches!(s.erp_residual(0.0), Err(G2Error::NotClosed(_))));
        assert!(matches!(s.eigenform_residual(0.0), Err(G2Error::NotClosed(_))));
    }
}
