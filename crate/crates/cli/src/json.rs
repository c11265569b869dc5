//! JSON encodings: scalars as strings (`"-11/8"` or a float literal), forms
//! as `{blade: coefficient}` maps, matrices as arrays of rows.

use g2forge_core::{Blade, KForm, Mat7, Scalar};
use serde_json::{Map, Value};

use crate::config::parse_literal;
use crate::error::{CliError, Result};

pub fn scalar<S: Scalar>(s: &S) -> Value {
    Value::String(s.to_exact_string())
}

pub fn form<S: Scalar>(f: &KForm<S>) -> Value {
    let map: Map<String, Value> = f.terms().map(|(b, c)| (b.to_string(), scalar(c))).collect();
    Value::Object(map)
}

pub fn matrix<S: Scalar>(m: &Mat7<S>) -> Value {
    Value::Array(
        (0..7)
            .map(|i| Value::Array((0..7).map(|j| scalar(&m[(i, j)])).collect()))
            .collect(),
    )
}

fn parse_scalar<S: Scalar>(v: &Value) -> Result<S> {
    let n = match v {
        Value::String(s) => parse_literal(s),
        Value::Number(n) => n.as_f64().map(Into::into),
        _ => None,
    }
    .ok_or_else(|| CliError::Config(format!("not a number: {v}")))?;
    if S::EXACT && !n.is_exact() {
        return Err(CliError::Config(format!("inexact value {v} for the rational backend")));
    }
    Ok(n.to_scalar())
}

/// Inverse of [`form`]; the degree is needed for the zero form.
pub fn parse_form<S: Scalar>(degree: usize, v: &Value) -> Result<KForm<S>> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Config(format!("expected a form object, got {v}")))?;
    let mut out = KForm::zero(degree);
    for (key, coef) in obj {
        let blade: Blade = key
            .parse()
            .map_err(|_| CliError::Config(format!("bad blade '{key}'")))?;
        if blade.degree() != degree {
            return Err(CliError::Config(format!("blade {key} is not of degree {degree}")));
        }
        out.add_term(blade, parse_scalar(coef)?);
    }
    Ok(out)
}

pub fn parse_matrix<S: Scalar>(v: &Value) -> Result<Mat7<S>> {
    let bad = || CliError::Config(format!("expected a 7x7 matrix, got {v}"));
    let rows = v.as_array().filter(|r| r.len() == 7).ok_or_else(bad)?;
    let mut m = Mat7::zeros();
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == 7).ok_or_else(bad)?;
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_scalar(x)?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use g2forge_core::exterior::standard_phi;
    use g2forge_core::Rational;

    #[test]
    fn phi_round_trips() {
        let phi = standard_phi::<Rational>().scale(&Rational::new((-11).into(), 8.into()));
        let v = form(&phi);
        assert_eq!(v["e127"], Value::String("-11/8".into()));
        assert_eq!(parse_form::<Rational>(3, &v).unwrap(), phi);
    }

    #[test]
    fn zero_form_is_empty_object() {
        let v = form(&KForm::<f64>::zero(3));
        assert_eq!(v, Value::Object(Map::new()));
        assert!(parse_form::<f64>(3, &v).unwrap().is_empty());
    }
}
