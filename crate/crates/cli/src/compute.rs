//! `compute --what NAME`: single-instance computations behind a registry.

use g2forge_core::family::Pinching;
use g2forge_core::solitons::{solve_laplacian_soliton, solve_ricci_soliton, SolitonSolution};
use g2forge_core::Scalar;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{AnyInstance, Instance};
use crate::error::{CliError, Result};
use crate::json;

/// Output of one computation before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub provenance: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn put(&mut self, key: &str, v: Value) -> &mut Self {
        self.results.insert(key.to_string(), v);
        self
    }

    fn source(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.provenance.insert(key.to_string(), Value::String(v.into()));
        self
    }
}

pub trait Computation: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, inst: &AnyInstance, tol: f64) -> Result<Outcome>;
}

macro_rules! computation {
    ($ty:ident, $name:literal, $desc:literal, $f:ident) => {
        pub struct $ty;

        impl Computation for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn description(&self) -> &'static str {
                $desc
            }
            fn run(&self, inst: &AnyInstance, tol: f64) -> Result<Outcome> {
                match inst {
                    AnyInstance::Exact(i) => $f(i, tol),
                    AnyInstance::Float(i) => $f(i, tol),
                }
            }
        }
    };
}

computation!(Torsion, "torsion", "torsion forms tau0..tau3 of the standard phi", torsion);
computation!(Laplacian, "laplacian", "Hodge Laplacian of phi", laplacian);
computation!(Ricci, "ricci", "Ricci operator, scalar curvature and pinching F", ricci);
computation!(Erp, "erp", "extremally-Ricci-pinched residual (closed phi only)", erp);
computation!(Eigenform, "eigenform", "Laplacian eigenform residual (closed phi only)", eigenform);
computation!(Soliton, "soliton", "best-fit Laplacian soliton (c, D)", laplacian_soliton);
computation!(RicciSoliton, "ricci-soliton", "best-fit Ricci soliton (c, D)", ricci_soliton);

pub fn registry() -> Vec<Box<dyn Computation>> {
    vec![
        Box::new(Torsion),
        Box::new(Laplacian),
        Box::new(Ricci),
        Box::new(Erp),
        Box::new(Eigenform),
        Box::new(Soliton),
        Box::new(RicciSoliton),
    ]
}

pub fn find(name: &str) -> Result<Box<dyn Computation>> {
    registry().into_iter().find(|c| c.name() == name).ok_or_else(|| CliError::Unknown {
        kind: "computation",
        name: name.to_string(),
        known: registry().iter().map(|c| c.name()).collect::<Vec<_>>().join(", "),
    })
}

/// What `compute` writes.
#[derive(Debug, Serialize)]
pub struct Report {
    pub instance: String,
    pub backend: &'static str,
    pub what: String,
    pub tolerance: f64,
    pub results: Map<String, Value>,
    pub provenance: Map<String, Value>,
}

pub fn run(what: &str, inst: &AnyInstance, tol: f64) -> Result<(Report, Vec<String>)> {
    let c = find(what)?;
    let out = c.run(inst, tol)?;
    Ok((
        Report {
            instance: inst.label().to_string(),
            backend: inst.mode().backend(),
            what: c.name().to_string(),
            tolerance: tol,
            results: out.results,
            provenance: out.provenance,
        },
        out.warnings,
    ))
}

fn f64_json(v: f64) -> Value {
    json!(v)
}

fn torsion<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let g = inst.structure();
    let t = g.torsion();
    let (r_d, r_dstar) = t.reconstruction_residual(&g);
    let mut out = Outcome::default();
    out.put("tau0", json::scalar(&t.tau0))
        .put("tau1", json::form(&t.tau1))
        .put("lambda1", json::scalar(&t.lambda1()))
        .put("lambda2", json::scalar(&t.lambda2()))
        .put("lambda7", json::scalar(&t.lambda7()))
        .put("tau2", json::form(&t.tau2))
        .put("tau3", json::form(&t.tau3))
        .put("torsion_free", Value::Bool(t.is_torsion_free(tol)))
        .put("closed", Value::Bool(g.d(g.phi()).is_negligible(tol)))
        .put("reconstruction_residual", f64_json(r_d.max(r_dstar)))
        .put("type_residual", f64_json(t.type_residual(&g)));
    out.source("torsion", "generic: Chevalley-Eilenberg d and Hodge star");
    if let Some(spec) = inst.family() {
        let diff = spec.specialized_torsion().max_difference(&t);
        out.put("family_formula_difference", f64_json(diff));
        out.source("family_check", "coefficient formulas of the family");
    }
    Ok(out)
}

fn laplacian<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let g = inst.structure();
    let lap = g.laplacian_phi();
    let mut out = Outcome::default();
    out.put("laplacian", json::form(&lap))
        .put("norm", f64_json(g.norm_sq(&lap).to_f64().max(0.0).sqrt()))
        .put("closed", Value::Bool(g.d(g.phi()).is_negligible(tol)))
        .put("coclosed", Value::Bool(g.d(&g.star_phi()).is_negligible(tol)));
    out.source("laplacian", "generic: d*d + *d*d on phi");
    if let Some(spec) = inst.family() {
        let diff = (&spec.derivative_forms().laplacian() - &lap).max_abs();
        out.put("family_formula_difference", f64_json(diff));
        out.source("family_check", "closed-form d*dphi and *d*dphi of the family");
    }
    Ok(out)
}

fn ricci<S: Scalar>(inst: &Instance<S>, _tol: f64) -> Result<Outcome> {
    let (ric, how) = inst.ricci();
    let mut out = Outcome::default();
    out.put("ricci", json::matrix(&ric.operator))
        .put("scalar_curvature", json::scalar(&ric.scalar_curvature))
        .put("ricci_norm_sq", json::scalar(&ric.norm_sq))
        .put("ricci_norm", f64_json(ric.norm()))
        .put(
            "F",
            match &ric.pinching {
                Pinching::Value(v) => json::scalar(v),
                Pinching::Undefined => Value::String("flat".into()),
            },
        );
    out.source("ricci", how);
    if inst.family().is_some() {
        let generic = inst.algebra.ricci_operator();
        let diff = (&ric.operator - generic).iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        out.put("generic_formula_difference", f64_json(diff));
    }
    Ok(out)
}

fn erp<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let r = inst.structure().erp_residual(tol)?;
    let mut out = Outcome::default();
    out.put("lhs", json::form(&r.lhs))
        .put("rhs", json::form(&r.rhs))
        .put("residual", f64_json(r.residual))
        .put("is_erp", Value::Bool(r.residual <= tol));
    out.source("erp", "d tau = (|tau|^2 phi + *(tau^tau))/6 with tau = tau2");
    Ok(out)
}

fn eigenform<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let r = inst.structure().eigenform_residual(tol)?;
    let mut out = Outcome::default();
    out.put("lambda", json::scalar(&r.lambda))
        .put("residual", f64_json(r.residual))
        .put("tau_norm", f64_json(r.tau_norm))
        .put("is_eigenform", Value::Bool(r.residual <= tol));
    out.source("eigenform", "|Laplacian phi - lambda phi| with lambda = |tau2|^2/7");
    Ok(out)
}

fn soliton_json<S: Scalar>(sol: &SolitonSolution<S>, out: &mut Outcome) {
    out.put("c", json::scalar(&sol.c))
        .put("D", json::matrix(&sol.d))
        .put("residual", f64_json(sol.residual))
        .put("is_soliton", Value::Bool(sol.is_soliton))
        .put("classification", Value::String(sol.classification.to_string()))
        .put("singularity_time", sol.singularity_time.map_or(Value::Null, f64_json))
        .put("derivation_dim", json!(sol.derivation_dim))
        .put("exact_solve", Value::Bool(sol.exact));
    if sol.near_degenerate {
        out.warnings.push(format!(
            "derivation space (dim {}) is near-degenerate at this tolerance; D may be unreliable",
            sol.derivation_dim
        ));
    }
}

fn laplacian_soliton<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let sol = solve_laplacian_soliton(&inst.structure(), tol);
    let mut out = Outcome::default();
    soliton_json(&sol, &mut out);
    out.source("soliton", "min-norm fit of Laplacian phi = c phi + L_X phi over Der(g)");
    Ok(out)
}

fn ricci_soliton<S: Scalar>(inst: &Instance<S>, tol: f64) -> Result<Outcome> {
    let (ric, how) = inst.ricci();
    let sol = solve_ricci_soliton(&inst.algebra, &ric.operator, tol);
    let mut out = Outcome::default();
    soliton_json(&sol, &mut out);
    out.source("soliton", "min-norm fit of Ric = c I + D over Der(g)");
    out.source("ricci", how);
    Ok(out)
}
