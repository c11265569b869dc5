//! Exterior algebra of a 7-dimensional oriented inner-product space.
//!
//! Forms are sparse maps from [`Blade`]s (strictly increasing index sets in
//! `{1,…,7}`) to scalars. The coframe `e¹,…,e⁷` is orthonormal and oriented
//! by `e¹²³⁴⁵⁶⁷`; every blade has unit norm.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SMatrix};
use thiserror::Error;

use crate::scalar::Scalar;

pub const DIM: usize = 7;

pub type Mat7<S> = SMatrix<S, 7, 7>;
pub type Mat4<S> = SMatrix<S, 4, 4>;
pub type Mat2<S> = SMatrix<S, 2, 2>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("matrix is {rows}x{cols}; expected 4x4 or 7x7")]
    DimensionMismatch { rows: usize, cols: usize },
    #[error("form {form} is not supported on {subspace}")]
    OutsideSubspace { form: String, subspace: &'static str },
    #[error("invalid blade indices {0:?}")]
    InvalidBlade(Vec<u8>),
}

/// A basis monomial `e^{i₁…i_k}` stored as a bitmask (bit `i-1` for `eⁱ`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u8);

impl Blade {
    pub const EMPTY: Blade = Blade(0);
    pub const VOLUME: Blade = Blade(0x7f);

    /// Blade from 1-based indices; they must be strictly increasing.
    pub fn new(indices: &[u8]) -> Result<Self, ExteriorError> {
        let mut mask = 0u8;
        let mut prev = 0u8;
        for &i in indices {
            if !(1..=7).contains(&i) || i <= prev {
                return Err(ExteriorError::InvalidBlade(indices.to_vec()));
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(Blade(mask))
    }

    pub fn from_mask(mask: u8) -> Self {
        Blade(mask & 0x7f)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: u8) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    /// Indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = u8> {
        (1..=7u8).filter(move |&i| self.contains(i))
    }

    pub fn complement(self) -> Blade {
        Blade(!self.0 & 0x7f)
    }

    pub fn is_subset_of(self, other: Blade) -> bool {
        self.0 & !other.0 == 0
    }

    /// Sign of `e^a ∧ e^b` relative to the canonical blade, or `None` when
    /// the blades overlap.
    pub fn wedge_sign(a: Blade, b: Blade) -> Option<i8> {
        if a.0 & b.0 != 0 {
            return None;
        }
        // count pairs (i in a, j in b) with i > j
        let mut inversions = 0u32;
        for j in b.indices() {
            let above = a.0 & !((1u16 << j) as u8).wrapping_sub(1);
            inversions += above.count_ones();
        }
        Some(if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// Replace index `from` (present) by `to`, returning the new blade and
    /// the reordering sign, or `None` if `to` is already present.
    pub fn replace(self, from: u8, to: u8) -> Option<(Blade, i8)> {
        debug_assert!(self.contains(from));
        if from == to {
            return Some((self, 1));
        }
        if self.contains(to) {
            return None;
        }
        let rest = self.0 & !(1 << (from - 1));
        let (lo, hi) = if from < to { (from, to) } else { (to, from) };
        // indices strictly between lo and hi
        let between_mask = ((1u16 << (hi - 1)) as u8).wrapping_sub(1) & !((1u16 << lo) as u8).wrapping_sub(1);
        let crossed = (rest & between_mask).count_ones();
        let sign = if crossed % 2 == 0 { 1 } else { -1 };
        Some((Blade(rest | (1 << (to - 1))), sign))
    }

    /// All blades of degree `k` in lexicographic order.
    pub fn all_of_degree(k: usize) -> Vec<Blade> {
        static TABLE: OnceLock<Vec<Vec<Blade>>> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            (0..=DIM)
                .map(|k| {
                    let mut out: Vec<Blade> = (0u8..128).map(Blade).filter(|b| b.degree() == k).collect();
                    out.sort();
                    out
                })
                .collect()
        });
        table.get(k).cloned().unwrap_or_default()
    }

    /// All 128 blades, ordered by degree then lexicographically.
    pub fn all() -> Vec<Blade> {
        (0..=7).flat_map(Blade::all_of_degree).collect()
    }

    fn sort_key(self) -> (usize, [u8; 7]) {
        let mut key = [0u8; 7];
        for (slot, i) in key.iter_mut().zip(self.indices()) {
            *slot = i;
        }
        (self.degree(), key)
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        f.write_str("e")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Blade {
    type Err = ExteriorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "1" {
            return Ok(Blade::EMPTY);
        }
        let digits = s
            .strip_prefix('e')
            .ok_or_else(|| ExteriorError::InvalidBlade(vec![]))?;
        let idx: Option<Vec<u8>> = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect();
        let idx = idx.ok_or_else(|| ExteriorError::InvalidBlade(vec![]))?;
        Blade::new(&idx)
    }
}

/// A homogeneous form of fixed degree.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    degree: usize,
    coeffs: BTreeMap<Blade, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} exceeds dimension");
        KForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The 0-form with value `s`.
    pub fn constant(s: S) -> Self {
        let mut f = KForm::zero(0);
        f.add_term(Blade::EMPTY, s);
        f
    }

    pub fn basis(blade: Blade) -> Self {
        let mut f = KForm::zero(blade.degree());
        f.add_term(blade, S::one());
        f
    }

    /// `e^{indices}`; panics on invalid indices (intended for literals).
    pub fn e(indices: &[u8]) -> Self {
        KForm::basis(Blade::new(indices).expect("valid blade literal"))
    }

    /// Builds a degree-`degree` form from `(blade, coefficient)` pairs;
    /// repeated blades accumulate.
    pub fn from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (Blade, S)>,
    ) -> Result<Self, ExteriorError> {
        let mut f = KForm::zero(degree);
        for (b, c) in terms {
            if b.degree() != degree {
                return Err(ExteriorError::DegreeMismatch {
                    left: degree,
                    right: b.degree(),
                });
            }
            f.add_term(b, c);
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, blade: Blade) -> S {
        self.coeffs.get(&blade).cloned().unwrap_or_else(S::zero)
    }

    /// Non-zero terms in canonical blade order.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, blade: Blade, c: S) {
        debug_assert_eq!(blade.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&blade) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&blade);
                }
            }
            None => {
                self.coeffs.insert(blade, c);
            }
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return KForm::zero(self.degree);
        }
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|(b, c)| (*b, c.clone() * s.clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Coefficient-wise map into another backend.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        let mut out = KForm::zero(self.degree);
        for (b, c) in self.terms() {
            out.add_term(b, f(c));
        }
        out
    }

    pub fn to_f64(&self) -> KForm<f64> {
        self.map(|c| c.to_f64())
    }

    /// Support as a union of blade masks.
    pub fn support_mask(&self) -> u8 {
        self.coeffs.keys().fold(0, |m, b| m | b.mask())
    }

    /// Drops coefficients that are negligible at `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| !c.is_negligible(tol))
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    pub fn wedge(&self, other: &KForm<S>) -> KForm<S> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return KForm::zero(DIM);
        }
        let mut out = KForm::zero(degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some(sign) = Blade::wedge_sign(a, b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(Blade(a.0 | b.0), if sign > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// Hodge star for the standard metric and orientation `e¹²³⁴⁵⁶⁷`.
    pub fn hodge_star(&self) -> KForm<S> {
        star_within(self, Blade::VOLUME)
    }

    /// `⟨self, other⟩` with orthonormal blades.
    pub fn inner(&self, other: &KForm<S>) -> Result<S, ExteriorError> {
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut acc = S::zero();
        for (b, c) in self.terms() {
            if let Some(d) = other.coeffs.get(&b) {
                acc += c.clone() * d.clone();
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> S {
        self.coeffs
            .values()
            .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    /// Euclidean norm evaluated in `f64`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// `true` when every coefficient is negligible at `tol`.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.is_negligible(tol))
    }

    /// `θ(M)` for a 7×7 matrix: the derivation of Λ extending
    /// `θ(M)eⁱ = −Σⱼ M_ij eʲ`.
    pub fn theta(&self, m: &Mat7<S>) -> KForm<S> {
        let mut out = KForm::zero(self.degree);
        for (blade, c) in self.terms() {
            for i in blade.indices() {
                for j in 1..=7u8 {
                    let mij = &m[((i - 1) as usize, (j - 1) as usize)];
                    if mij.is_zero() {
                        continue;
                    }
                    if let Some((nb, sign)) = blade.replace(i, j) {
                        let v = c.clone() * mij.clone();
                        // leading minus from θ(M)eⁱ = −Σ M_ij eʲ
                        out.add_term(nb, if sign > 0 { -v } else { v });
                    }
                }
            }
        }
        out
    }

    /// `θ(M)` for a 4×4 matrix acting on `g₁ = span{e₃,…,e₆}`
    /// (row/column `r` ↔ basis index `r+2`), extended by zero.
    pub fn theta_g1(&self, m: &Mat4<S>) -> KForm<S> {
        self.theta(&embed_g1(m))
    }

    /// Dispatching form of θ for runtime-sized matrices.
    pub fn theta_action(&self, m: &DMatrix<S>) -> Result<KForm<S>, ExteriorError> {
        match m.shape() {
            (7, 7) => Ok(self.theta(&Mat7::from_fn(|i, j| m[(i, j)].clone()))),
            (4, 4) => Ok(self.theta_g1(&Mat4::from_fn(|i, j| m[(i, j)].clone()))),
            (rows, cols) => Err(ExteriorError::DimensionMismatch { rows, cols }),
        }
    }

    /// Linear change of coframe: given `eⁱ = Σⱼ T_ij fʲ`, returns the
    /// coefficients of `self` in the `f` coframe.
    pub fn substitute(&self, t: &Mat7<S>) -> KForm<S> {
        let images: Vec<KForm<S>> = (0..7)
            .map(|i| {
                let mut f = KForm::zero(1);
                for j in 0..7 {
                    f.add_term(Blade(1 << j), t[(i, j)].clone());
                }
                f
            })
            .collect();
        let mut out = KForm::zero(self.degree);
        for (blade, c) in self.terms() {
            let mut acc = KForm::constant(c.clone());
            for i in blade.indices() {
                acc = acc.wedge(&images[(i - 1) as usize]);
            }
            out = out + acc;
        }
        out
    }

    /// Pullback `h*α = α(h·,…,h·)` by a linear endomorphism `h` of the
    /// Lie algebra, with `h eⱼ = Σᵢ h_ij eᵢ`.
    pub fn pullback(&self, h: &Mat7<S>) -> KForm<S> {
        // h*eⁱ = Σⱼ h_ij eʲ
        self.substitute(h)
    }

    /// Interior product `ι_{e_i}` with a basis vector (1-based).
    pub fn contract(&self, i: u8) -> KForm<S> {
        if self.degree == 0 {
            return KForm::zero(0);
        }
        let mut out = KForm::zero(self.degree - 1);
        for (blade, c) in self.terms() {
            if !blade.contains(i) {
                continue;
            }
            let rest = Blade(blade.0 & !(1 << (i - 1)));
            // e^i moved to the front
            let pos = rest.indices().filter(|&j| j < i).count();
            out.add_term(rest, if pos % 2 == 0 { c.clone() } else { -c.clone() });
        }
        out
    }
}

/// Hodge star inside the coordinate subspace spanned by `volume`, oriented
/// by the increasing-index blade `volume`.
fn star_within<S: Scalar>(a: &KForm<S>, volume: Blade) -> KForm<S> {
    let sub_dim = volume.degree();
    let mut out = KForm::zero(sub_dim.saturating_sub(a.degree).min(DIM));
    for (blade, c) in a.terms() {
        let comp = Blade(volume.0 & !blade.0);
        let sign = Blade::wedge_sign(blade, comp).expect("disjoint by construction");
        out.add_term(comp, if sign > 0 { c.clone() } else { -c.clone() });
    }
    out
}

/// Embeds a 4×4 matrix on `g₁` into 7×7 with zeros elsewhere.
pub fn embed_g1<S: Scalar>(m: &Mat4<S>) -> Mat7<S> {
    let mut out = Mat7::zeros();
    for r in 0..4 {
        for c in 0..4 {
            out[(r + 2, c + 2)] = m[(r, c)].clone();
        }
    }
    out
}

/// Embeds a 2×2 matrix on `span{e₁,e₂}` into 7×7.
pub fn embed_12<S: Scalar>(m: &Mat2<S>) -> Mat7<S> {
    let mut out = Mat7::zeros();
    for r in 0..2 {
        for c in 0..2 {
            out[(r, c)] = m[(r, c)].clone();
        }
    }
    out
}

impl<S: Scalar> std::ops::Add for KForm<S> {
    type Output = KForm<S>;
    fn add(mut self, rhs: KForm<S>) -> KForm<S> {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        for (b, c) in rhs.coeffs {
            self.add_term(b, c);
        }
        self
    }
}

impl<S: Scalar> std::ops::Sub for KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: KForm<S>) -> KForm<S> {
        self + (-rhs)
    }
}

impl<S: Scalar> std::ops::Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.into_iter().map(|(b, c)| (b, -c)).collect(),
        }
    }
}

impl<S: Scalar> std::ops::Add for &KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: &KForm<S>) -> KForm<S> {
        self.clone() + rhs.clone()
    }
}

impl<S: Scalar> std::ops::Sub for &KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: &KForm<S>) -> KForm<S> {
        self.clone() - rhs.clone()
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (n, (b, c)) in self.terms().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})·{}", c, b)?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm<{}>[{}]", self.degree, self)
    }
}

/// The splitting `g = g₀ ⊕ g₁` with `g₀ = span{e₇,e₁,e₂}` (oriented by
/// `e¹²⁷`) and `g₁ = span{e₃,…,e₆}` (oriented by `e³⁴⁵⁶`).
#[derive(Debug, Clone, Copy)]
pub struct SplitContext;

impl SplitContext {
    pub const G0: Blade = Blade(0b100_0011);
    pub const G1: Blade = Blade(0b011_1100);

    /// `∗_{g₁}`; errors if `a` touches indices outside `{3,…,6}`.
    pub fn star_g1<S: Scalar>(a: &KForm<S>) -> Result<KForm<S>, ExteriorError> {
        Self::check(a, Self::G1, "g1")?;
        Ok(star_within(a, Self::G1))
    }

    /// `∗_{g₀}`; errors if `a` touches indices outside `{7,1,2}`.
    pub fn star_g0<S: Scalar>(a: &KForm<S>) -> Result<KForm<S>, ExteriorError> {
        Self::check(a, Self::G0, "g0")?;
        Ok(star_within(a, Self::G0))
    }

    fn check<S: Scalar>(
        a: &KForm<S>,
        sub: Blade,
        name: &'static str,
    ) -> Result<(), ExteriorError> {
        if Blade(a.support_mask()).is_subset_of(sub) {
            Ok(())
        } else {
            Err(ExteriorError::OutsideSubspace {
                form: a.to_string(),
                subspace: name,
            })
        }
    }
}

/// `∗(α∧β) = (−1)^{ij} ∗_{g₁}α ∧ ∗_{g₀}β` for `α ∈ Λⁱg₁*`, `β ∈ Λʲg₀*`.
pub fn split_hodge<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Result<KForm<S>, ExteriorError> {
    let sa = SplitContext::star_g1(a)?;
    let sb = SplitContext::star_g0(b)?;
    let w = sa.wedge(&sb);
    Ok(if (a.degree() * b.degree()) % 2 == 0 { w } else { -w })
}

/// Standard positive 3-form `e¹²⁷+e³⁴⁷+e⁵⁶⁷+e¹³⁵−e¹⁴⁶−e²³⁶−e²⁴⁵`.
pub fn standard_phi<S: Scalar>() -> KForm<S> {
    let terms: [(&[u8], i64); 7] = [
        (&[1, 2, 7], 1),
        (&[3, 4, 7], 1),
        (&[5, 6, 7], 1),
        (&[1, 3, 5], 1),
        (&[1, 4, 6], -1),
        (&[2, 3, 6], -1),
        (&[2, 4, 5], -1),
    ];
    let mut phi = KForm::zero(3);
    for (idx, c) in terms {
        phi.add_term(Blade::new(idx).unwrap(), S::from_i64(c));
    }
    phi
}

fn two_form<S: Scalar>(terms: &[(&[u8], i64)]) -> KForm<S> {
    let mut f = KForm::zero(2);
    for (idx, c) in terms {
        f.add_term(Blade::new(idx).unwrap(), S::from_i64(*c));
    }
    f
}

/// `ω₇ = e³⁴+e⁵⁶`.
pub fn omega7<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 4], 1), (&[5, 6], 1)])
}

/// `ω₁ = e³⁵−e⁴⁶`.
pub fn omega1<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 5], 1), (&[4, 6], -1)])
}

/// `ω₂ = −e³⁶−e⁴⁵`.
pub fn omega2<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 6], -1), (&[4, 5], -1)])
}

/// `ω̄₇ = e³⁴−e⁵⁶`.
pub fn omega7_bar<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 4], 1), (&[5, 6], -1)])
}

/// `ω̄₁ = e³⁵+e⁴⁶`.
pub fn omega1_bar<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 5], 1), (&[4, 6], 1)])
}

/// `ω̄₂ = −e³⁶+e⁴⁵`.
pub fn omega2_bar<S: Scalar>() -> KForm<S> {
    two_form(&[(&[3, 6], -1), (&[4, 5], 1)])
}

/// The ordered basis `Υ = (ω̄₇, ω̄₁, ω̄₂, ω₇, ω₁, ω₂)` of `Λ²g₁*`.
pub fn upsilon<S: Scalar>() -> [KForm<S>; 6] {
    [
        omega7_bar(),
        omega1_bar(),
        omega2_bar(),
        omega7(),
        omega1(),
        omega2(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn blade_parsing_and_display() {
        let b: Blade = "e127".parse().unwrap();
        assert_eq!(b, Blade::new(&[1, 2, 7]).unwrap());
        assert_eq!(b.to_string(), "e127");
        assert_eq!("1".parse::<Blade>().unwrap(), Blade::EMPTY);
        assert!(Blade::new(&[2, 1]).is_err());
        assert!(Blade::new(&[0]).is_err());
        assert!(Blade::new(&[8]).is_err());
        assert_eq!(Blade::all().len(), 128);
        assert_eq!(Blade::all_of_degree(3).len(), 35);
    }

    #[test]
    fn replace_signs_match_wedge() {
        // e^{135} with 3 -> 6 is e^{165} = -e^{156}
        let b = Blade::new(&[1, 3, 5]).unwrap();
        assert_eq!(b.replace(3, 6), Some((Blade::new(&[1, 5, 6]).unwrap(), -1)));
        assert_eq!(b.replace(3, 5), None);
        // e^{132} = -e^{123}
        assert_eq!(b.replace(5, 2), Some((Blade::new(&[1, 2, 3]).unwrap(), -1)));
    }

    #[test]
    fn adjacent_wedge() {
        let w = KForm::<Q>::e(&[1]).wedge(&KForm::e(&[2]));
        assert_eq!(w, KForm::e(&[1, 2]));
        let w = KForm::<Q>::e(&[2]).wedge(&KForm::e(&[1]));
        assert_eq!(w, -KForm::e(&[1, 2]));
    }

    #[test]
    fn omega_bar_squared() {
        let w = omega7_bar::<Q>().wedge(&omega7_bar());
        assert_eq!(w, KForm::e(&[3, 4, 5, 6]).scale(&Q::from_i64(-2)));
    }

    #[test]
    fn phi_wedge_star_phi_is_seven_vol() {
        let phi = standard_phi::<Q>();
        assert_eq!(
            phi.wedge(&phi.hodge_star()),
            KForm::basis(Blade::VOLUME).scale(&Q::from_i64(7))
        );
    }

    #[test]
    fn star_of_unit_and_e1() {
        assert_eq!(KForm::<Q>::constant(Q::from_i64(1)).hodge_star(), KForm::basis(Blade::VOLUME));
        assert_eq!(KForm::<Q>::e(&[1]).hodge_star(), KForm::e(&[2, 3, 4, 5, 6, 7]));
    }

    #[test]
    fn star_phi_closed_form() {
        let e12 = KForm::<Q>::e(&[1, 2]);
        let expected = KForm::e(&[3, 4, 5, 6])
            + omega7().wedge(&e12)
            + omega1().wedge(&KForm::e(&[2, 7]))
            - omega2().wedge(&KForm::e(&[1, 7]));
        assert_eq!(standard_phi::<Q>().hodge_star(), expected);
    }

    #[test]
    fn phi_in_omega_form() {
        let expected = KForm::<Q>::e(&[1, 2, 7])
            + omega7().wedge(&KForm::e(&[7]))
            + omega1().wedge(&KForm::e(&[1]))
            + omega2().wedge(&KForm::e(&[2]));
        assert_eq!(standard_phi::<Q>(), expected);
    }

    #[test]
    fn split_star_on_upsilon() {
        for w in [omega7::<Q>(), omega1(), omega2()] {
            assert_eq!(SplitContext::star_g1(&w).unwrap(), w);
        }
        for w in [omega7_bar::<Q>(), omega1_bar(), omega2_bar()] {
            assert_eq!(SplitContext::star_g1(&w).unwrap(), -w);
        }
    }

    #[test]
    fn split_hodge_matches_full_star() {
        let a = KForm::<Q>::e(&[3, 4]);
        let b = KForm::<Q>::e(&[7]);
        assert_eq!(split_hodge(&a, &b).unwrap(), KForm::e(&[3, 4, 7]).hodge_star());
    }

    #[test]
    fn split_hodge_rejects_wrong_support() {
        let a = KForm::<Q>::e(&[1, 4]);
        let b = KForm::<Q>::e(&[7]);
        assert!(matches!(
            split_hodge(&a, &b),
            Err(ExteriorError::OutsideSubspace { subspace: "g1", .. })
        ));
        assert!(split_hodge(&KForm::<Q>::e(&[3]), &KForm::e(&[5])).is_err());
    }

    #[test]
    fn theta_identity_is_minus_degree() {
        let id = Mat7::<Q>::identity();
        let a = standard_phi::<Q>();
        assert_eq!(a.theta(&id), a.scale(&Q::from_i64(-3)));
        let b = KForm::<Q>::e(&[1, 4]) + KForm::e(&[2, 6]);
        assert_eq!(b.theta(&id), b.scale(&Q::from_i64(-2)));
    }

    #[test]
    fn inner_products() {
        assert_eq!(KForm::<Q>::e(&[1, 2]).inner(&KForm::e(&[1, 2])).unwrap(), Q::from_i64(1));
        let phi = standard_phi::<Q>();
        assert_eq!(phi.inner(&phi).unwrap(), Q::from_i64(7));
        assert_eq!(omega7_bar::<Q>().inner(&omega7()).unwrap(), Q::from_i64(0));
        assert_eq!(omega7::<Q>().inner(&omega7()).unwrap(), Q::from_i64(2));
        assert!(matches!(
            phi.inner(&omega7()),
            Err(ExteriorError::DegreeMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn theta_action_rejects_bad_dims() {
        let m = DMatrix::<Q>::zeros(3, 3);
        assert!(matches!(
            omega7::<Q>().theta_action(&m),
            Err(ExteriorError::DimensionMismatch { rows: 3, cols: 3 })
        ));
    }

    #[test]
    fn contraction_of_phi() {
        let i1 = standard_phi::<Q>().contract(1);
        assert_eq!(i1, KForm::e(&[2, 7]) + KForm::e(&[3, 5]) - KForm::e(&[4, 6]));
    }

    #[test]
    fn overflowing_wedge_is_zero() {
        let w = KForm::<Q>::basis(Blade::VOLUME).wedge(&KForm::e(&[1]));
        assert!(w.is_empty());
    }
}
