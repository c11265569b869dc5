//! Instance configuration: JSON files and `--instance` shorthands.

use std::path::Path;

use g2forge_core::family::{Builtin, FamilySpec, RicciData};
use g2forge_core::g2::G2Structure;
use g2forge_core::scalar::parse_number;
use g2forge_core::{LieAlgebra, Mat2, Mat4, Number, Rational, Scalar};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, Result};

/// Arithmetic backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn backend(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

/// Parses a number literal: integers and `p/q` are exact, decimals are
/// floats, and `[-]sqrt(N)[/D]` is a float.
pub fn parse_literal(text: &str) -> Option<Number> {
    if let Some(n) = parse_number(text) {
        return Some(n);
    }
    let t = text.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, t),
    };
    let (arg, tail) = t.strip_prefix("sqrt(")?.split_once(')')?;
    let radicand = parse_number(arg)?.to_f64();
    if radicand < 0.0 {
        return None;
    }
    let mut v = radicand.sqrt();
    let tail = tail.trim();
    if !tail.is_empty() {
        let den = parse_number(tail.strip_prefix('/')?)?.to_f64();
        if den == 0.0 {
            return None;
        }
        v /= den;
    }
    Some(Number::Float(if neg { -v } else { v }))
}

/// A number as written in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Lit(pub Number);

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(de)? {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Lit(Number::from(i)))
                } else if let Some(f) = n.as_f64() {
                    Ok(Lit(Number::Float(f)))
                } else {
                    Err(D::Error::custom(format!("unrepresentable number {n}")))
                }
            }
            serde_json::Value::String(s) => parse_literal(&s)
                .map(Lit)
                .ok_or_else(|| D::Error::custom(format!("cannot parse number '{s}'"))),
            other => Err(D::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

/// Brackets `[eᵢ, eⱼ] = Σ c eₖ` listed as `[i, j, k, c]`.
#[derive(Debug, Clone, Deserialize)]
pub struct Bracket(pub u8, pub u8, pub u8, pub Lit);

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceConfig {
    Builtin {
        name: String,
        #[serde(default)]
        param: Option<Lit>,
    },
    Family {
        #[serde(rename = "A1")]
        a1: [[Lit; 2]; 2],
        #[serde(rename = "A")]
        a: [[Lit; 4]; 4],
        #[serde(rename = "B")]
        b: [[Lit; 4]; 4],
        #[serde(rename = "C")]
        c: [[Lit; 4]; 4],
    },
    StructureConstants {
        c: Vec<Bracket>,
    },
}

impl InstanceConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `gs:<s>`, `sa:<a>`, `fr`, or `abelian`.
    pub fn from_shorthand(text: &str) -> Result<Self> {
        let (name, param) = match text.split_once(':') {
            Some((n, p)) => {
                let p = parse_literal(p)
                    .ok_or_else(|| CliError::Config(format!("cannot parse parameter '{p}'")))?;
                (n, Some(Lit(p)))
            }
            None => (text, None),
        };
        if name.eq_ignore_ascii_case("abelian") {
            if param.is_some() {
                return Err(CliError::Config("'abelian' takes no parameter".into()));
            }
            return Ok(InstanceConfig::StructureConstants { c: Vec::new() });
        }
        Ok(InstanceConfig::Builtin {
            name: name.to_string(),
            param,
        })
    }

    fn literals(&self) -> Vec<&Number> {
        match self {
            InstanceConfig::Builtin { param, .. } => param.iter().map(|l| &l.0).collect(),
            InstanceConfig::Family { a1, a, b, c } => a1
                .iter()
                .flatten()
                .chain([a, b, c].into_iter().flatten().flatten())
                .map(|l| &l.0)
                .collect(),
            InstanceConfig::StructureConstants { c } => c.iter().map(|b| &b.3 .0).collect(),
        }
    }

    pub fn all_exact(&self) -> bool {
        self.literals().into_iter().all(Number::is_exact)
    }

    /// Picks the backend (exact iff every literal is exact unless `mode`
    /// says otherwise) and builds the instance.
    pub fn resolve(&self, mode: Option<Mode>, tol: f64) -> Result<AnyInstance> {
        let mode = match mode {
            Some(Mode::Rational) if !self.all_exact() => {
                return Err(CliError::Config(
                    "rational mode needs exact inputs (integers or \"p/q\" strings)".into(),
                ))
            }
            Some(m) => m,
            None if self.all_exact() => Mode::Rational,
            None => Mode::Float,
        };
        Ok(match mode {
            Mode::Rational => AnyInstance::Exact(self.build(tol)?),
            Mode::Float => AnyInstance::Float(self.build(tol)?),
        })
    }

    pub fn build<S: Scalar>(&self, tol: f64) -> Result<Instance<S>> {
        let conv = |l: &Lit| l.0.to_scalar::<S>();
        match self {
            InstanceConfig::Builtin { name, param } => {
                let builtin = Builtin::from_name(name, param.as_ref().map(conv))?;
                let (a1, a, b, c) = builtin.matrices();
                let spec = FamilySpec::new(a1, a, b, c, tol)?;
                Ok(Instance {
                    label: builtin.name(),
                    algebra: spec.algebra().clone(),
                    source: Source::Builtin(builtin, spec),
                })
            }
            InstanceConfig::Family { a1, a, b, c } => {
                let m4 = |m: &[[Lit; 4]; 4]| Mat4::<S>::from_fn(|i, j| conv(&m[i][j]));
                let spec = FamilySpec::new(Mat2::from_fn(|i, j| conv(&a1[i][j])), m4(a), m4(b), m4(c), tol)?;
                Ok(Instance {
                    label: "family".into(),
                    algebra: spec.algebra().clone(),
                    source: Source::Family(spec),
                })
            }
            InstanceConfig::StructureConstants { c } => {
                let algebra = LieAlgebra::from_brackets(c.iter().map(|b| (b.0, b.1, b.2, conv(&b.3))))?;
                if !algebra.is_lie_algebra(tol) {
                    return Err(CliError::NotLie(algebra.jacobi_residual().to_exact_string()));
                }
                Ok(Instance {
                    label: if c.is_empty() { "abelian".into() } else { "structure-constants".into() },
                    algebra,
                    source: Source::Constants,
                })
            }
        }
    }
}

/// Where an instance came from.
#[derive(Debug, Clone)]
pub enum Source<S: Scalar> {
    Builtin(Builtin<S>, FamilySpec<S>),
    Family(FamilySpec<S>),
    Constants,
}

#[derive(Debug, Clone)]
pub struct Instance<S: Scalar> {
    pub label: String,
    pub algebra: LieAlgebra<S>,
    pub source: Source<S>,
}

impl<S: Scalar> Instance<S> {
    pub fn family(&self) -> Option<&FamilySpec<S>> {
        match &self.source {
            Source::Builtin(_, spec) | Source::Family(spec) => Some(spec),
            Source::Constants => None,
        }
    }

    pub fn builtin(&self) -> Option<&Builtin<S>> {
        match &self.source {
            Source::Builtin(b, _) => Some(b),
            _ => None,
        }
    }

    pub fn structure(&self) -> G2Structure<S> {
        G2Structure::standard(self.algebra.clone())
    }

    /// Ricci data and which formula produced it.
    pub fn ricci(&self) -> (RicciData<S>, &'static str) {
        match self.family() {
            Some(spec) => (spec.ricci(), "family Ricci formula"),
            None => (
                RicciData::from_operator(self.algebra.ricci_operator()),
                "generic Ric = M - B/2 - S(ad H)",
            ),
        }
    }
}

/// An instance on either backend.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Exact(Instance<Rational>),
    Float(Instance<f64>),
}

impl AnyInstance {
    pub fn label(&self) -> &str {
        match self {
            AnyInstance::Exact(i) => &i.label,
            AnyInstance::Float(i) => &i.label,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyInstance::Exact(_) => Mode::Rational,
            AnyInstance::Float(_) => Mode::Float,
        }
    }

    /// The float version, converting exact instances.
    pub fn to_float(&self) -> Instance<f64> {
        match self {
            AnyInstance::Float(i) => i.clone(),
            AnyInstance::Exact(i) => Instance {
                label: i.label.clone(),
                algebra: i.algebra.to_f64(),
                source: match &i.source {
                    Source::Builtin(b, spec) => Source::Builtin(
                        match b {
                            Builtin::Gs(s) => Builtin::Gs(s.to_f64()),
                            Builtin::Sa(a) => Builtin::Sa(a.to_f64()),
                            Builtin::Fr => Builtin::Fr,
                        },
                        spec.to_f64(),
                    ),
                    Source::Family(spec) => Source::Family(spec.to_f64()),
                    Source::Constants => Source::Constants,
                },
            },
        }
    }
}
