//! Parameter sweeps along `Gs` and `Sa`.

use std::io::Write;

use g2forge_core::family::{Builtin, FamilySpec, Pinching};
use g2forge_core::g2::G2Structure;
use g2forge_core::solitons::{solve_laplacian_soliton, solve_ricci_soliton};
use g2forge_core::{Number, Rational, Scalar};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Mode;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanFamily {
    Gs,
    Sa,
}

impl ScanFamily {
    fn builtin<S: Scalar>(self, p: S) -> Builtin<S> {
        match self {
            ScanFamily::Gs => Builtin::Gs(p),
            ScanFamily::Sa => Builtin::Sa(p),
        }
    }

    /// The parameter where the metric is a Ricci soliton; always included
    /// in a grid that brackets it.
    fn ricci_point<S: Scalar>(self) -> S {
        match self {
            ScanFamily::Gs => S::from_ratio(5, 8),
            ScanFamily::Sa => S::from_ratio(3, 4),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScanRow {
    pub param: String,
    pub scal: f64,
    pub ric_norm: f64,
    #[serde(rename = "F")]
    pub f: String,
    pub c: f64,
    pub classification: String,
    pub laplacian_residual: f64,
    pub ricci_soliton_residual: f64,
}

/// `from, from+step, …` up to `to`, plus the Ricci soliton point if it
/// lies inside; sorted.
pub fn grid<S: Scalar>(family: ScanFamily, from: &S, to: &S, step: &S) -> Result<Vec<S>> {
    if step.to_f64() <= 0.0 || !step.to_f64().is_finite() {
        return Err(CliError::Config(format!("step must be positive, got {}", step.to_exact_string())));
    }
    let mut out = Vec::new();
    // float grids tolerate rounding at the right end
    let slack = if S::EXACT { 0.0 } else { 1e-9 * step.to_f64() };
    let mut k = 0i64;
    loop {
        let p = from.clone() + step.clone() * S::from_i64(k);
        if (p.clone() - to.clone()).to_f64() > slack {
            break;
        }
        out.push(p);
        k += 1;
    }
    let special: S = family.ricci_point();
    let inside = (special.clone() - from.clone()).to_f64() >= 0.0 && (to.clone() - special.clone()).to_f64() >= 0.0;
    if inside && !out.iter().any(|p| (p.clone() - special.clone()).to_f64().abs() <= slack) {
        out.push(special);
        out.sort_by(|a, b| a.to_f64().total_cmp(&b.to_f64()));
    }
    Ok(out)
}

fn row<S: Scalar>(family: ScanFamily, p: &S, tol: f64) -> Result<ScanRow> {
    let (a1, a, b, c) = family.builtin(p.clone()).matrices();
    let spec = FamilySpec::new(a1, a, b, c, tol)?;
    let ric = spec.ricci();
    let g = G2Structure::standard(spec.algebra().clone());
    let lap = solve_laplacian_soliton(&g, tol);
    let rs = solve_ricci_soliton(spec.algebra(), &ric.operator, tol);
    Ok(ScanRow {
        param: p.to_exact_string(),
        scal: ric.scalar_curvature.to_f64(),
        ric_norm: ric.norm(),
        f: match &ric.pinching {
            Pinching::Value(v) => v.to_f64().to_string(),
            Pinching::Undefined => "flat".into(),
        },
        c: lap.c.to_f64(),
        classification: lap.classification.to_string(),
        laplacian_residual: lap.residual,
        ricci_soliton_residual: rs.residual,
    })
}

fn rows_for<S: Scalar>(family: ScanFamily, from: &Number, to: &Number, step: &Number, tol: f64) -> Result<Vec<ScanRow>> {
    let params = grid(family, &from.to_scalar::<S>(), &to.to_scalar(), &step.to_scalar())?;
    params.par_iter().map(|p| row(family, p, tol)).collect()
}

/// Rows in parameter order; exact when every bound is exact (or `mode`
/// forces it).
pub fn scan(
    family: ScanFamily,
    from: &Number,
    to: &Number,
    step: &Number,
    mode: Option<Mode>,
    tol: f64,
) -> Result<Vec<ScanRow>> {
    let exact = [from, to, step].iter().all(|n| n.is_exact());
    match mode {
        Some(Mode::Rational) if !exact => Err(CliError::Config("rational mode needs exact bounds".into())),
        Some(Mode::Rational) => rows_for::<Rational>(family, from, to, step, tol),
        None if exact => rows_for::<Rational>(family, from, to, step, tol),
        _ => rows_for::<f64>(family, from, to, step, tol),
    }
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "param",
            "scal",
            "ric_norm",
            "F",
            "c",
            "classification",
            "laplacian_residual",
            "ricci_soliton_residual",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Number {
        Number::Exact(Rational::from_ratio(n, d))
    }

    #[test]
    fn grid_includes_ricci_point() {
        let r = |n| Rational::from_ratio(n, 10);
        let g = grid(ScanFamily::Gs, &r(0), &r(10), &r(1)).unwrap();
        assert_eq!(g.len(), 12);
        assert!(g.contains(&Rational::from_ratio(5, 8)));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_range_gives_no_rows() {
        let rows = scan(ScanFamily::Sa, &q(1, 1), &q(0, 1), &q(1, 10), None, 1e-9).unwrap();
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn non_positive_step_is_rejected() {
        assert!(scan(ScanFamily::Gs, &q(0, 1), &q(1, 1), &q(0, 1), None, 1e-9).is_err());
    }
}
