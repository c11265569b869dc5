//! Acceptance suite: every check at its pinned tolerance in rational mode,
//! reported as one line per criterion. Exits non-zero if any check fails.

use std::collections::BTreeMap;
use std::process::ExitCode;

use g2forge::checks::{registry, run_checks, CheckContext, CheckRecord};

const TITLES: [&str; 10] = [
    "Hodge/exterior kernel",
    "Chevalley-Eilenberg differential",
    "theta identities",
    "torsion oracle equivalence",
    "reference values",
    "soliton solvers",
    "ERP non-membership",
    "eigenform falsification",
    "flow self-similarity and blow-up",
    "isomorphism witnesses",
];

fn main() -> ExitCode {
    let records = run_checks(&registry(), &CheckContext::default());
    let mut by_criterion: BTreeMap<u8, Vec<&CheckRecord>> = BTreeMap::new();
    for r in &records {
        by_criterion.entry(r.criterion).or_default().push(r);
    }
    let mut all = true;
    for k in 1..=10u8 {
        let group = by_criterion.get(&k).map(Vec::as_slice).unwrap_or(&[]);
        let passed = !group.is_empty() && group.iter().all(|r| r.outcome.passed);
        all &= passed;
        let parts: Vec<String> = group
            .iter()
            .map(|r| {
                format!(
                    "{} {}={:.3e} ({}, {})",
                    if r.outcome.passed { "ok" } else { "FAIL" },
                    r.name,
                    r.outcome.measured,
                    r.outcome.tolerance,
                    r.outcome.backend
                )
            })
            .collect();
        println!(
            "criterion {k:>2} {}: {} | {}",
            if passed { "PASS" } else { "FAIL" },
            TITLES[k as usize - 1],
            parts.join("; ")
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
