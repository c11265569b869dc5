//! `flow`: Laplacian-flow runs written as CSV trajectories.

use std::io::Write;

use g2forge_core::solitons::{flow_integrate, solve_laplacian_soliton, stepper, FlowConfig, FlowHalt, Trajectory};

use crate::config::Instance;
use crate::error::{CliError, Result};

pub struct FlowRun {
    pub trajectory: Trajectory,
    /// `T = −3/(2c)` when the initial structure is a shrinking soliton.
    pub predicted_singularity: Option<f64>,
}

pub fn run(inst: &Instance<f64>, cfg: &FlowConfig, stepper_name: &str, tol: f64) -> Result<FlowRun> {
    let stepper = stepper(stepper_name)?;
    let g = inst.structure();
    let trajectory = flow_integrate(&inst.algebra, g.phi(), cfg, stepper.as_ref())?;
    let sol = solve_laplacian_soliton(&g, tol);
    let predicted_singularity = if sol.is_soliton { sol.singularity_time } else { None };
    Ok(FlowRun {
        trajectory,
        predicted_singularity,
    })
}

pub const HEADER: [&str; 10] = [
    "t", "e127", "e347", "e567", "e135", "e146", "e236", "e245", "laplacian_norm", "margin",
];

pub fn write_csv<W: Write>(tr: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for st in &tr.states {
        let mut rec = vec![st.t.to_string()];
        rec.extend(st.diagonal_coefficients().iter().map(|v| v.to_string()));
        rec.push(st.laplacian_norm.to_string());
        rec.push(st.margin.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

/// One line for stderr/stdout.
pub fn summary(run: &FlowRun) -> String {
    let tr = &run.trajectory;
    let last = tr.last();
    let predicted = run
        .predicted_singularity
        .map(|t| format!("; soliton prediction T = {t:.6}"))
        .unwrap_or_default();
    match &tr.halt {
        None => format!(
            "flow: reached t = {:.6} in {} steps; |Laplacian phi| = {:.6e}, margin = {:.6e}{predicted}",
            last.t, tr.steps, last.laplacian_norm, last.margin
        ),
        Some(FlowHalt::BlowUp { t, laplacian_norm }) => format!(
            "flow: singularity detected at t = {t:.6} after {} steps (|Laplacian phi| = {laplacian_norm:.3e}){predicted}",
            tr.steps
        ),
        Some(h) => format!("flow: halted after {} steps: {h}{predicted}", tr.steps),
    }
}

/// Blow-up is an expected way for a run to end; the other halts are domain
/// failures.
pub fn halt_error(run: &FlowRun) -> Option<CliError> {
    match &run.trajectory.halt {
        None | Some(FlowHalt::BlowUp { .. }) => None,
        Some(h) => Some(CliError::Halt(h.clone())),
    }
}
