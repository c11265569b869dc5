//! Dense linear algebra shared by the derivation solver, the soliton
//! solvers and the random-instance samplers.
//!
//! Exact backends use fraction-free-in-spirit Gauss–Jordan elimination;
//! float backends go through an SVD with a relative singular-value cutoff.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Basis of the kernel of a matrix plus conditioning diagnostics.
#[derive(Debug, Clone)]
pub struct Nullspace<S> {
    pub basis: Vec<DVector<S>>,
    /// Smallest singular value still counted as nonzero (float backend).
    pub smallest_retained: Option<f64>,
    /// Absolute cutoff that was applied (float backend).
    pub cutoff: Option<f64>,
}

impl<S> Nullspace<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True when the smallest retained singular value is within 10x of the
    /// cutoff, i.e. the dimension may be underestimated.
    pub fn near_degenerate(&self) -> bool {
        match (self.smallest_retained, self.cutoff) {
            (Some(s), Some(c)) => c > 0.0 && s < 10.0 * c,
            _ => false,
        }
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut DMatrix<S>, tol: f64) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // largest |entry| for floats, first nonzero for exact scalars
        let mut best: Option<usize> = None;
        let mut best_abs = 0.0;
        for i in r..rows {
            if m[(i, c)].is_negligible(tol) {
                continue;
            }
            let a = m[(i, c)].to_f64().abs();
            if best.is_none() || (!S::EXACT && a > best_abs) {
                best = Some(i);
                best_abs = a;
                if S::EXACT {
                    break;
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap_rows(p, r);
        let inv = S::one() / m[(r, c)].clone();
        // exact matrices here are sparse; only touch the pivot row's support
        let support: Vec<usize> = (c..cols).filter(|&j| !m[(r, j)].is_zero()).collect();
        for &j in &support {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for &j in &support {
                let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn nullspace_from_rref<S: Scalar>(m: &DMatrix<S>, pivots: &[usize]) -> Vec<DVector<S>> {
    let cols = m.ncols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = DVector::from_element(cols, S::zero());
            v[f] = S::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Kernel of `a`. Exact backends: Gauss–Jordan. Float: right singular
/// vectors whose singular value is below `rel_cutoff · σ_max`.
pub fn nullspace<S: Scalar>(a: &DMatrix<S>, rel_cutoff: f64) -> Nullspace<S> {
    if S::EXACT {
        let mut m = a.clone();
        let pivots = rref(&mut m, 0.0);
        return Nullspace {
            basis: nullspace_from_rref(&m, &pivots),
            smallest_retained: None,
            cutoff: None,
        };
    }
    let af = a.map(|x| x.to_f64());
    let ns = float_nullspace(&af, rel_cutoff);
    Nullspace {
        basis: ns
            .basis
            .into_iter()
            .map(|v| v.map(S::from_f64))
            .collect(),
        smallest_retained: ns.smallest_retained,
        cutoff: ns.cutoff,
    }
}

/// SVD kernel of a float matrix.
pub fn float_nullspace(a: &DMatrix<f64>, rel_cutoff: f64) -> Nullspace<f64> {
    let (rows, cols) = a.shape();
    // pad so the SVD returns a full set of right singular vectors
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_cutoff * smax;
    let mut basis = Vec::new();
    let mut smallest_retained: Option<f64> = None;
    for (i, &s) in sigma.iter().enumerate() {
        if s <= cutoff {
            basis.push(v_t.row(i).transpose());
        } else {
            smallest_retained = Some(smallest_retained.map_or(s, |m: f64| m.min(s)));
        }
    }
    Nullspace {
        basis,
        smallest_retained,
        cutoff: Some(cutoff),
    }
}

/// Minimum-norm least-squares solution of `a x ≈ b` via SVD, discarding
/// singular values below `rel_cutoff · σ_max`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return DVector::zeros(a.ncols());
    }
    svd.solve(b, rel_cutoff * smax)
        .expect("U and V^T were computed")
}

/// Solution set `{p + Σ tᵢ nᵢ}` of `a x = b`, or `None` if inconsistent.
#[derive(Debug, Clone)]
pub struct AffineSolution<S> {
    pub particular: DVector<S>,
    pub directions: Vec<DVector<S>>,
}

/// Affine solution space of `a x = b`. Exact backends solve exactly; the
/// float backend uses the pseudo-inverse and checks the residual against
/// `tol`.
pub fn solve_affine<S: Scalar>(
    a: &DMatrix<S>,
    b: &DVector<S>,
    tol: f64,
) -> Option<AffineSolution<S>> {
    let (rows, cols) = a.shape();
    if S::EXACT {
        let mut aug = DMatrix::from_element(rows, cols + 1, S::zero());
        aug.view_mut((0, 0), (rows, cols)).copy_from(a);
        for i in 0..rows {
            aug[(i, cols)] = b[i].clone();
        }
        let pivots = rref(&mut aug, 0.0);
        if pivots.contains(&cols) {
            return None;
        }
        let mut particular = DVector::from_element(cols, S::zero());
        for (row, &p) in pivots.iter().enumerate() {
            particular[p] = aug[(row, cols)].clone();
        }
        let coef = aug.columns(0, cols).into_owned();
        return Some(AffineSolution {
            particular,
            directions: nullspace_from_rref(&coef, &pivots),
        });
    }
    let af = a.map(|x| x.to_f64());
    let bf = b.map(|x| x.to_f64());
    let x = lstsq_min_norm(&af, &bf, 1e-12);
    let resid = (&af * &x - &bf).amax();
    if resid > tol * (1.0 + bf.amax()) {
        return None;
    }
    let ns = float_nullspace(&af, 1e-10);
    Some(AffineSolution {
        particular: x.map(S::from_f64),
        directions: ns.basis.into_iter().map(|v| v.map(S::from_f64)).collect(),
    })
}

/// Determinant by elimination (exact for rationals).
pub fn determinant<S: Scalar>(m: &DMatrix<S>) -> S {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant of non-square matrix");
    let mut a = m.clone();
    let mut det = S::one();
    for c in 0..n {
        let mut p = None;
        let mut best = 0.0;
        for i in c..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let v = a[(i, c)].to_f64().abs();
            if p.is_none() || (!S::EXACT && v > best) {
                p = Some(i);
                best = v;
                if S::EXACT {
                    break;
                }
            }
        }
        let Some(p) = p else { return S::zero() };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let pivot = a[(c, c)].clone();
        det = det * pivot.clone();
        for i in (c + 1)..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone() / pivot.clone();
            for j in c..n {
                let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                a[(i, j)] = v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn exact_nullspace_of_rank_one() {
        let a = DMatrix::from_row_slice(2, 3, &[q(1, 1), q(2, 1), q(3, 1), q(2, 1), q(4, 1), q(6, 1)]);
        let ns = nullspace(&a, 0.0);
        assert_eq!(ns.dim(), 2);
        for v in &ns.basis {
            assert!((&a * v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn float_nullspace_matches_rank() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let ns = nullspace(&a, 1e-9);
        assert_eq!(ns.dim(), 2);
        for v in &ns.basis {
            assert!((&a * v).amax() < 1e-12);
        }
        assert!(!ns.near_degenerate());
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let a = DMatrix::<f64>::zeros(5, 4);
        assert_eq!(nullspace(&a, 1e-9).dim(), 4);
    }

    #[test]
    fn affine_solutions() {
        let a = DMatrix::from_row_slice(1, 2, &[q(1, 1), q(1, 1)]);
        let b = DVector::from_vec(vec![q(3, 2)]);
        let sol = solve_affine(&a, &b, 0.0).unwrap();
        assert_eq!(&a * &sol.particular, b);
        assert_eq!(sol.directions.len(), 1);
        let inconsistent = DMatrix::from_row_slice(2, 1, &[q(1, 1), q(1, 1)]);
        let rhs = DVector::from_vec(vec![q(1, 1), q(2, 1)]);
        assert!(solve_affine(&inconsistent, &rhs, 0.0).is_none());
    }

    #[test]
    fn min_norm_least_squares() {
        // x + y = 2 has min-norm solution (1, 1)
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = lstsq_min_norm(&a, &DVector::from_vec(vec![2.0]), 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinants() {
        let a = DMatrix::from_row_slice(3, 3, &[q(0, 1), q(1, 1), q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(5, 2)]);
        assert_eq!(determinant(&a), q(-5, 2));
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(determinant(&b), 0.0);
    }
}
