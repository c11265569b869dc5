//! Dense `f64` kernels for repeated evaluation of the Hodge Laplacian of
//! a varying 3-form on a fixed Lie algebra (the flow's inner loop).
//!
//! Forms are coefficient vectors over the blades of one degree in
//! [`Blade::all_of_degree`] order. A change of coframe acts on k-forms by
//! the k-th compound matrix, so the general-metric star is
//! `C_{7−k}(Lᵀ)ᵀ · ε · C_k(Q)ᵀ` with `ε` the orthonormal star.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::exterior::{Blade, KForm, Mat7, DIM};
use crate::g2::{metric_from_bilinear, G2Error, MetricTensor};
use crate::liealg::LieAlgebra;

struct Tables {
    blades: Vec<Vec<Blade>>,
    /// position of a blade inside its degree
    position: [usize; 128],
    /// orthonormal star: `∗e^I = sign · e^{Iᶜ}`
    star_sign: [f64; 128],
    /// `(i, j, a, b, c, coef)`: `B_ij += coef · φ_a φ_b φ_c` (3-form indices)
    bilinear: Vec<(usize, usize, usize, usize, usize, f64)>,
    /// Per degree k: first-row Laplace expansion terms of `C_k(T)[I,J]`.
    expansion: Vec<Vec<Minor>>,
    /// The terms that can be nonzero when `T` is upper triangular.
    expansion_upper: Vec<Vec<Minor>>,
}

/// `det T[I,J]` of an upper-triangular `T` vanishes unless `iₘ ≤ jₘ` for all `m`.
fn dominated(i: Blade, j: Blade) -> bool {
    i.indices().zip(j.indices()).all(|(a, b)| a <= b)
}

/// `C_k[out] += sign · T[row, col] · C_{k−1}[prev]` (flat column-major indices).
#[derive(Clone)]
struct Minor {
    out: u16,
    prev: u16,
    /// `row·7 + col` into the column-major `T`
    entry: u8,
    negative: bool,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let blades: Vec<Vec<Blade>> = (0..=DIM).map(Blade::all_of_degree).collect();
        let mut position = [0; 128];
        for list in &blades {
            for (p, b) in list.iter().enumerate() {
                position[b.mask() as usize] = p;
            }
        }
        let mut star_sign = [0.0; 128];
        for b in Blade::all() {
            let s: KForm<f64> = KForm::basis(b).hodge_star();
            star_sign[b.mask() as usize] = s.get(b.complement());
        }
        let three = &blades[3];
        let mut bilinear = Vec::new();
        for i in 1..=DIM as u8 {
            for j in i..=DIM as u8 {
                for (pa, &a) in three.iter().enumerate() {
                    let ia = KForm::<f64>::basis(a).contract(i);
                    if ia.is_empty() {
                        continue;
                    }
                    for (pb, &b) in three.iter().enumerate() {
                        let jb = KForm::<f64>::basis(b).contract(j);
                        let two = ia.wedge(&jb);
                        if two.is_empty() {
                            continue;
                        }
                        let (rest, _) = two.terms().next().expect("single blade");
                        let c = rest.complement();
                        let v = two.wedge(&KForm::basis(c)).get(Blade::VOLUME) / 6.0;
                        if v != 0.0 {
                            bilinear.push((
                                (i - 1) as usize,
                                (j - 1) as usize,
                                pa,
                                pb,
                                position[c.mask() as usize],
                                v,
                            ));
                        }
                    }
                }
            }
        }
        let mut expansion = vec![Vec::new()];
        let mut expansion_upper = vec![Vec::new()];
        for k in 1..=DIM {
            let (rows, prev_n) = (&blades[k], blades[k - 1].len());
            let mut terms = Vec::new();
            let mut upper = Vec::new();
            for (pj, bj) in rows.iter().enumerate() {
                for (pi, bi) in rows.iter().enumerate() {
                    let first = bi.indices().next().expect("non-empty");
                    let rest_i = position[(bi.mask() & !(1 << (first - 1))) as usize];
                    for (p, col) in bj.indices().enumerate() {
                        let sub_i = Blade::from_mask(bi.mask() & !(1 << (first - 1)));
                        let sub_j = Blade::from_mask(bj.mask() & !(1 << (col - 1)));
                        let rest_j = position[sub_j.mask() as usize];
                        let term = Minor {
                            out: (pi + pj * rows.len()) as u16,
                            prev: (rest_i + rest_j * prev_n) as u16,
                            entry: (first - 1 + (col - 1) * DIM as u8),
                            negative: p % 2 == 1,
                        };
                        if first <= col && dominated(*bi, *bj) && dominated(sub_i, sub_j) {
                            upper.push(term.clone());
                        }
                        terms.push(term);
                    }
                }
            }
            expansion.push(terms);
            expansion_upper.push(upper);
        }
        Tables {
            blades,
            position,
            star_sign,
            bilinear,
            expansion,
            expansion_upper,
        }
    })
}

pub fn to_dense(form: &KForm<f64>) -> DVector<f64> {
    let t = tables();
    let mut v = DVector::zeros(t.blades[form.degree()].len());
    for (b, c) in form.terms() {
        v[t.position[b.mask() as usize]] = *c;
    }
    v
}

pub fn from_dense(degree: usize, v: &DVector<f64>) -> KForm<f64> {
    let t = tables();
    KForm::from_terms(degree, t.blades[degree].iter().copied().zip(v.iter().copied()))
        .expect("blades of matching degree")
}

/// All compound matrices `C_k(T)[I,J] = det T[I,J]`, `k = 0..=7`, built by
/// expansion along the first row of `I`.
pub fn compounds(t: &Mat7<f64>) -> Vec<DMatrix<f64>> {
    build_compounds(t, &tables().expansion, DIM)
}

/// [`compounds`] for an upper-triangular `T`, up to degree `max_degree`.
pub fn compounds_upper(t: &Mat7<f64>, max_degree: usize) -> Vec<DMatrix<f64>> {
    debug_assert!((0..DIM).all(|i| (0..i).all(|j| t[(i, j)] == 0.0)));
    build_compounds(t, &tables().expansion_upper, max_degree)
}

fn build_compounds(t: &Mat7<f64>, expansion: &[Vec<Minor>], max_degree: usize) -> Vec<DMatrix<f64>> {
    let tab = tables();
    let t = t.as_slice();
    let mut out: Vec<DMatrix<f64>> = vec![DMatrix::from_element(1, 1, 1.0)];
    for k in 1..=max_degree {
        let n = tab.blades[k].len();
        let mut m = DMatrix::zeros(n, n);
        {
            let prev = out[k - 1].as_slice();
            let dst = m.as_mut_slice();
            for e in &expansion[k] {
                let v = t[e.entry as usize] * prev[e.prev as usize];
                dst[e.out as usize] += if e.negative { -v } else { v };
            }
        }
        out.push(m);
    }
    out
}

/// `B(X,Y)` of a 3-form given densely.
pub fn bilinear_form(phi: &DVector<f64>) -> Mat7<f64> {
    let mut b = Mat7::zeros();
    for &(i, j, pa, pb, pc, coef) in &tables().bilinear {
        b[(i, j)] += coef * phi[pa] * phi[pb] * phi[pc];
    }
    for i in 0..DIM {
        for j in 0..i {
            b[(i, j)] = b[(j, i)];
        }
    }
    b
}

/// Hodge star of an induced metric, ready to apply to any degree.
pub struct DenseStar {
    to_ortho: Vec<DMatrix<f64>>,
    from_ortho: Vec<DMatrix<f64>>,
    orientation: f64,
    pub metric: MetricTensor,
}

impl DenseStar {
    pub fn from_phi(phi: &DVector<f64>) -> Result<Self, G2Error> {
        let metric = metric_from_bilinear(&bilinear_form(phi))?;
        let chol = metric
            .g
            .cholesky()
            .ok_or_else(|| G2Error::NotPositive("metric is not positive definite".into()))?;
        let lt = chol.l().transpose();
        let q = lt
            .try_inverse()
            .ok_or_else(|| G2Error::NotPositive("singular metric".into()))?;
        Ok(DenseStar {
            to_ortho: compounds_upper(&q, DIM),
            from_ortho: compounds_upper(&lt, DIM),
            orientation: metric.orientation,
            metric,
        })
    }

    pub fn apply(&self, degree: usize, a: &DVector<f64>) -> DVector<f64> {
        let tab = tables();
        let ortho = self.to_ortho[degree].tr_mul(a);
        let target = DIM - degree;
        let mut starred = DVector::zeros(tab.blades[target].len());
        for (p, b) in tab.blades[degree].iter().enumerate() {
            let m = b.mask() as usize;
            starred[tab.position[b.complement().mask() as usize]] = self.orientation * tab.star_sign[m] * ortho[p];
        }
        self.from_ortho[target].tr_mul(&starred)
    }
}

/// Chevalley–Eilenberg differential as one matrix per degree.
pub struct DenseDifferential {
    d: Vec<DMatrix<f64>>,
}

impl DenseDifferential {
    pub fn new(algebra: &LieAlgebra<f64>) -> Self {
        let tab = tables();
        let d = (0..DIM)
            .map(|k| {
                let mut m = DMatrix::zeros(tab.blades[k + 1].len(), tab.blades[k].len());
                for (p, &b) in tab.blades[k].iter().enumerate() {
                    let image = algebra.ce_differential(&KForm::basis(b));
                    for (ib, c) in image.terms() {
                        m[(tab.position[ib.mask() as usize], p)] = *c;
                    }
                }
                m
            })
            .collect();
        DenseDifferential { d }
    }

    pub fn apply(&self, degree: usize, a: &DVector<f64>) -> DVector<f64> {
        &self.d[degree] * a
    }
}

/// `Δφ = ∗d∗dφ − d∗d∗φ` for the metric induced by `φ`, plus that metric.
pub fn laplacian_phi(
    d: &DenseDifferential,
    phi: &DVector<f64>,
) -> Result<(DVector<f64>, MetricTensor), G2Error> {
    let star = DenseStar::from_phi(phi)?;
    let dphi = d.apply(3, phi);
    let first = star.apply(4, &d.apply(3, &star.apply(4, &dphi)));
    let psi = star.apply(3, phi);
    let second = d.apply(2, &star.apply(5, &d.apply(4, &psi)));
    Ok((first - second, star.metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Builtin;
    use crate::g2::{bilinear_form_of, G2Structure};
    use crate::exterior::standard_phi;

    fn scrambled_phi() -> KForm<f64> {
        let t = Mat7::from_fn(|i, j| if i == j { 1.5 + i as f64 * 0.1 } else { 0.05 * (i as f64 - j as f64) });
        standard_phi::<f64>().substitute(&t)
    }

    #[test]
    fn compounds_match_substitution() {
        let t = Mat7::from_fn(|i, j| ((i * 3 + j * 5) % 7) as f64 - 2.5);
        let c = compounds(&t);
        for k in 0..=DIM {
            for b in Blade::all_of_degree(k) {
                let a = KForm::<f64>::basis(b);
                let sparse = to_dense(&a.substitute(&t));
                let dense = c[k].tr_mul(&to_dense(&a));
                assert!((sparse - dense).amax() < 1e-9, "degree {k}");
            }
        }
        assert!((c[7][(0, 0)] - t.determinant()).abs() < 1e-9);
        let upper = t.upper_triangle();
        for (a, b) in compounds(&upper).iter().zip(compounds_upper(&upper, DIM)) {
            assert!((a - b).amax() < 1e-9);
        }
    }

    #[test]
    fn bilinear_form_matches_sparse() {
        let phi = scrambled_phi();
        let b = bilinear_form(&to_dense(&phi));
        assert!((b - bilinear_form_of(&phi)).amax() < 1e-12);
    }

    #[test]
    fn star_and_laplacian_match_sparse_pipeline() {
        let alg = Builtin::Gs(0.25).spec().into_algebra();
        let phi = scrambled_phi();
        let g = G2Structure::with_induced_metric(alg.clone(), phi.clone()).unwrap();
        let dense = DenseStar::from_phi(&to_dense(&phi)).unwrap();
        for k in 0..=DIM {
            for b in Blade::all_of_degree(k) {
                let a = KForm::basis(b);
                let diff = dense.apply(k, &to_dense(&a)) - to_dense(&g.star(&a));
                assert!(diff.amax() < 1e-10);
            }
        }
        let d = DenseDifferential::new(&alg);
        let (lap, _) = laplacian_phi(&d, &to_dense(&phi)).unwrap();
        assert!((lap - to_dense(&g.laplacian_phi())).amax() < 1e-9);
    }
}
