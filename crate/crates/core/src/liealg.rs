//! Seven-dimensional Lie algebras given by structure constants.
//!
//! `[eᵢ, eⱼ] = Σₖ cᵏᵢⱼ eₖ` on a fixed basis `e₁,…,e₇`. The
//! Chevalley–Eilenberg differential acts on left-invariant forms with the
//! convention `dξ(X,Y) = −ξ([X,Y])` on 1-forms, extended as an
//! antiderivation.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{Blade, KForm, Mat7, DIM};
use crate::linalg::{self, Nullspace};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("basis index {0} outside 1..=7")]
    BadIndex(u8),
    #[error("[e{0}, e{0}] must vanish")]
    SelfBracket(u8),
    #[error("subspace {0:?} is not closed under the bracket")]
    NotSubalgebra(Vec<u8>),
}

/// Structure constants on the basis `e₁,…,e₇`, antisymmetric by
/// construction.
#[derive(Clone, PartialEq)]
pub struct LieAlgebra<S> {
    // c[(i*7 + j)*7 + k], 0-based
    c: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for LieAlgebra<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut list = f.debug_list();
        for i in 1..=7u8 {
            for j in (i + 1)..=7 {
                for k in 1..=7u8 {
                    let v = self.structure_constant(i, j, k);
                    if !v.is_zero() {
                        list.entry(&format_args!("[e{i},e{j}] ∋ ({v})e{k}"));
                    }
                }
            }
        }
        list.finish()
    }
}

fn idx(i: usize, j: usize, k: usize) -> usize {
    (i * DIM + j) * DIM + k
}

impl<S: Scalar> LieAlgebra<S> {
    /// The abelian algebra.
    pub fn abelian() -> Self {
        LieAlgebra {
            c: vec![S::zero(); DIM * DIM * DIM],
        }
    }

    /// Builds from `(i, j, k, v)` entries meaning `[eᵢ, eⱼ] ∋ v·eₖ`
    /// (1-based). Entries accumulate; `[eⱼ, eᵢ]` is filled antisymmetrically.
    pub fn from_brackets(
        entries: impl IntoIterator<Item = (u8, u8, u8, S)>,
    ) -> Result<Self, LieError> {
        let mut g = Self::abelian();
        for (i, j, k, v) in entries {
            for n in [i, j, k] {
                if !(1..=7).contains(&n) {
                    return Err(LieError::BadIndex(n));
                }
            }
            if v.is_zero() {
                continue;
            }
            if i == j {
                return Err(LieError::SelfBracket(i));
            }
            g.add_bracket(i, j, k, v);
        }
        Ok(g)
    }

    fn add_bracket(&mut self, i: u8, j: u8, k: u8, v: S) {
        let (i, j, k) = ((i - 1) as usize, (j - 1) as usize, (k - 1) as usize);
        let a = self.c[idx(i, j, k)].clone() + v.clone();
        let b = self.c[idx(j, i, k)].clone() - v;
        self.c[idx(i, j, k)] = a;
        self.c[idx(j, i, k)] = b;
    }

    /// `cᵏᵢⱼ`, 1-based.
    pub fn structure_constant(&self, i: u8, j: u8, k: u8) -> S {
        self.c[idx((i - 1) as usize, (j - 1) as usize, (k - 1) as usize)].clone()
    }

    fn c0(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[idx(i, j, k)]
    }

    /// Nonzero `(i, j, k, cᵏᵢⱼ)` with `i < j`, 1-based.
    pub fn entries(&self) -> Vec<(u8, u8, u8, S)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                for k in 0..DIM {
                    let v = self.c0(i, j, k);
                    if !v.is_zero() {
                        out.push((i as u8 + 1, j as u8 + 1, k as u8 + 1, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.map(|v| v.to_f64())
    }

    /// Matrix of `ad eᵢ` (1-based): column `j` holds `[eᵢ, eⱼ]`.
    pub fn ad(&self, i: u8) -> Mat7<S> {
        let i = (i - 1) as usize;
        Mat7::from_fn(|k, j| self.c0(i, j, k).clone())
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &[S; DIM], y: &[S; DIM]) -> [S; DIM] {
        let mut out: [S; DIM] = std::array::from_fn(|_| S::zero());
        for i in 0..DIM {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..DIM {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let w = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c0(i, j, k);
                    if !c.is_zero() {
                        *o += w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Max-norm of the Jacobiator over all basis triples `i<j<k`.
    pub fn jacobi_residual(&self) -> S {
        let mut worst = S::zero();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                for k in (j + 1)..DIM {
                    for out in 0..DIM {
                        // [[ei,ej],ek] + [[ej,ek],ei] + [[ek,ei],ej]
                        let mut acc = S::zero();
                        for m in 0..DIM {
                            for (a, b) in [((i, j), k), ((j, k), i), ((k, i), j)] {
                                let x = self.c0(a.0, a.1, m);
                                if x.is_zero() {
                                    continue;
                                }
                                let y = self.c0(m, b, out);
                                if !y.is_zero() {
                                    acc += x.clone() * y.clone();
                                }
                            }
                        }
                        let a = acc.abs();
                        if a > worst {
                            worst = a;
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn is_lie_algebra(&self, tol: f64) -> bool {
        self.jacobi_residual().is_negligible(tol)
    }

    /// `deᵏ = −Σ_{i<j} cᵏᵢⱼ eⁱʲ` (1-based `k`).
    pub fn d_coframe(&self, k: u8) -> KForm<S> {
        let k0 = (k - 1) as usize;
        let mut f = KForm::zero(2);
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                let c = self.c0(i, j, k0);
                if !c.is_zero() {
                    f.add_term(Blade::from_mask((1 << i) | (1 << j)), -c.clone());
                }
            }
        }
        f
    }

    /// Chevalley–Eilenberg differential on left-invariant forms.
    pub fn ce_differential(&self, a: &KForm<S>) -> KForm<S> {
        let k = a.degree();
        if k >= DIM {
            return KForm::zero(DIM);
        }
        let de: Vec<KForm<S>> = (1..=7).map(|i| self.d_coframe(i)).collect();
        let mut out = KForm::zero(k + 1);
        for (blade, c) in a.terms() {
            let idx: Vec<u8> = blade.indices().collect();
            for (m, &i) in idx.iter().enumerate() {
                let dei = &de[(i - 1) as usize];
                if dei.is_empty() {
                    continue;
                }
                let left = KForm::basis(Blade::new(&idx[..m]).unwrap());
                let right = KForm::basis(Blade::new(&idx[m + 1..]).unwrap());
                let mut term = left.wedge(dei).wedge(&right).scale(c);
                if m % 2 == 1 {
                    term = -term;
                }
                out = out + term;
            }
        }
        out
    }

    /// Residual `max |D[eᵢ,eⱼ] − [Deᵢ,eⱼ] − [eᵢ,Deⱼ]|`; `D eⱼ = Σᵢ D_ij eᵢ`.
    pub fn derivation_defect(&self, d: &Mat7<S>) -> S {
        let mut worst = S::zero();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                for k in 0..DIM {
                    let mut acc = S::zero();
                    for m in 0..DIM {
                        acc += self.c0(i, j, m).clone() * d[(k, m)].clone();
                        acc -= d[(m, i)].clone() * self.c0(m, j, k).clone();
                        acc -= d[(m, j)].clone() * self.c0(i, m, k).clone();
                    }
                    let a = acc.abs();
                    if a > worst {
                        worst = a;
                    }
                }
            }
        }
        worst
    }

    /// The 147×49 linear system whose kernel is `Der(g)`; unknown `p·7+q`
    /// is the entry `D_pq`.
    pub fn derivation_system(&self) -> DMatrix<S> {
        let mut m = DMatrix::from_element(21 * DIM, DIM * DIM, S::zero());
        let mut row = 0;
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                for k in 0..DIM {
                    for mm in 0..DIM {
                        // D[ei,ej]_k = Σ_m c^m_ij D_km
                        let c = self.c0(i, j, mm);
                        if !c.is_zero() {
                            m[(row, k * DIM + mm)] += c.clone();
                        }
                        // [D ei, ej]_k = Σ_p D_pi c^k_pj
                        let c = self.c0(mm, j, k);
                        if !c.is_zero() {
                            m[(row, mm * DIM + i)] -= c.clone();
                        }
                        // [ei, D ej]_k = Σ_p D_pj c^k_ip
                        let c = self.c0(i, mm, k);
                        if !c.is_zero() {
                            m[(row, mm * DIM + j)] -= c.clone();
                        }
                    }
                    row += 1;
                }
            }
        }
        m
    }

    /// Basis of `Der(g)`. Float backends use an SVD with relative cutoff
    /// `1e-9·σ_max`; rationals are solved exactly.
    pub fn derivation_space(&self) -> DerivationSpace<S> {
        let ns = linalg::nullspace(&self.derivation_system(), DERIVATION_CUTOFF);
        DerivationSpace::from_nullspace(ns)
    }

    /// `true` iff `tr(ad X|_V) = 0` for every basis vector of `V`.
    /// `subspace` lists 1-based basis indices and must be closed under the
    /// bracket.
    pub fn is_unimodular(&self, subspace: &[u8]) -> Result<bool, LieError> {
        for &i in subspace {
            if !(1..=7).contains(&i) {
                return Err(LieError::BadIndex(i));
            }
        }
        let inside = |k: usize| subspace.contains(&(k as u8 + 1));
        for &i in subspace {
            for &j in subspace {
                let (i0, j0) = ((i - 1) as usize, (j - 1) as usize);
                if (0..DIM).any(|k| !inside(k) && !self.c0(i0, j0, k).is_zero()) {
                    return Err(LieError::NotSubalgebra(subspace.to_vec()));
                }
            }
        }
        Ok(subspace.iter().all(|&i| {
            let i0 = (i - 1) as usize;
            subspace
                .iter()
                .fold(S::zero(), |acc, &j| acc + self.c0(i0, (j - 1) as usize, (j - 1) as usize).clone())
                .is_zero()
        }))
    }

    /// `max |h[eᵢ,eⱼ] − [heᵢ,heⱼ]'|` over `i<j`: zero iff `h` is a
    /// homomorphism from `self` to `target`. Columns of `h` are images.
    pub fn intertwining_residual(&self, h: &Mat7<S>, target: &LieAlgebra<S>) -> S {
        let col = |j: usize| -> [S; DIM] { std::array::from_fn(|r| h[(r, j)].clone()) };
        let mut worst = S::zero();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                let lhs_in: [S; DIM] = std::array::from_fn(|k| self.c0(i, j, k).clone());
                let lhs: Vec<S> = (0..DIM)
                    .map(|r| {
                        (0..DIM).fold(S::zero(), |acc, k| acc + h[(r, k)].clone() * lhs_in[k].clone())
                    })
                    .collect();
                let rhs = target.bracket(&col(i), &col(j));
                for (a, b) in lhs.into_iter().zip(rhs) {
                    let d = (a - b).abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    /// Ricci operator of the left-invariant metric making `e₁,…,e₇`
    /// orthonormal:
    /// `Ric = M − ½B − S(ad H)` with `⟨H,X⟩ = tr ad X`, `B` the Killing form and
    /// `⟨MX,Y⟩ = −½Σ⟨[X,eᵢ],eⱼ⟩⟨[Y,eᵢ],eⱼ⟩ + ¼Σ⟨[eᵢ,eⱼ],X⟩⟨[eᵢ,eⱼ],Y⟩`.
    pub fn ricci_operator(&self) -> Mat7<S> {
        let ads: Vec<Mat7<S>> = (1..=7).map(|i| self.ad(i)).collect();
        let half = S::from_ratio(1, 2);
        let quarter = S::from_ratio(1, 4);
        let h: Vec<S> = ads.iter().map(|a| a.trace()).collect();
        let mut ad_h = Mat7::zeros();
        for (hi, a) in h.iter().zip(&ads) {
            if !hi.is_zero() {
                ad_h += a * hi.clone();
            }
        }
        Mat7::from_fn(|a, b| {
            let mut v = S::zero();
            for i in 0..DIM {
                for j in 0..DIM {
                    v -= half.clone() * self.c0(a, i, j).clone() * self.c0(b, i, j).clone();
                    v += quarter.clone() * self.c0(i, j, a).clone() * self.c0(i, j, b).clone();
                }
            }
            let killing = (&ads[a] * &ads[b]).trace();
            v -= half.clone() * killing;
            v -= half.clone() * (ad_h[(b, a)].clone() + ad_h[(a, b)].clone());
            v
        })
    }
}

/// Relative singular-value cutoff for the float derivation solve.
pub const DERIVATION_CUTOFF: f64 = 1e-9;

/// A basis of `Der(g)` as 7×7 matrices (`D eⱼ = Σᵢ D_ij eᵢ`).
#[derive(Debug, Clone)]
pub struct DerivationSpace<S> {
    pub basis: Vec<Mat7<S>>,
    /// True when the float solve sat close to its cutoff.
    pub near_degenerate: bool,
}

impl<S: Scalar> DerivationSpace<S> {
    fn from_nullspace(ns: Nullspace<S>) -> Self {
        let near_degenerate = ns.near_degenerate();
        let basis = ns
            .basis
            .into_iter()
            .map(|v| Mat7::from_fn(|p, q| v[p * DIM + q].clone()))
            .collect();
        DerivationSpace {
            basis,
            near_degenerate,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}
