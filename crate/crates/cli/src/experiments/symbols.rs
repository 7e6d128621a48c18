use halfball_core::ResultTable;

use super::{deltas_or_default, symbol_table, variation};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

/// Upper bound on `|λ(ξ)| / |ξ|`.
pub const RATIO_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2 + 1e-8;
/// Allowed relative change of the lattice minimum of `|λ|` across δ.
pub const MIN_VARIATION: f64 = 0.2;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let deltas = deltas_or_default(config);
    let mut table = ResultTable::new([
        "kernel",
        "delta",
        "orientation",
        "bound",
        "order",
        "min_abs",
        "max_ratio",
        "argmin",
    ]);
    let mut report = Report::default();
    for kc in config.kernel_list() {
        let label = kc.label();
        let mut mins = Vec::new();
        let mut worst_ratio = 0.0f64;
        for &delta in &deltas {
            let k = kc.build(d, delta)?;
            let mut lattice_min = f64::INFINITY;
            for (n_label, n) in config.orientations(d) {
                let t = symbol_table(config, &k, &n, config.bound)?;
                let b = t.verify_bounds();
                lattice_min = lattice_min.min(b.min_abs);
                worst_ratio = worst_ratio.max(b.max_ratio);
                let argmin = b.argmin.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
                table.push(vec![
                    label.clone().into(),
                    delta.into(),
                    n_label.into(),
                    config.bound.into(),
                    t.order().into(),
                    b.min_abs.into(),
                    b.max_ratio.into(),
                    argmin.into(),
                ])?;
            }
            report.metric(format!("{label}.min_abs@{delta}"), lattice_min);
            mins.push(lattice_min);
        }
        let floor = mins.iter().copied().fold(f64::INFINITY, f64::min);
        report.check(format!("{label}.min_abs"), floor, Relation::Above, 0.0);
        report.check(format!("{label}.max_ratio"), worst_ratio, Relation::AtMost, RATIO_BOUND);
        if mins.len() > 1 {
            report.check(
                format!("{label}.min_variation"),
                variation(&mins),
                Relation::Below,
                MIN_VARIATION,
            );
        }
    }
    report.table("", table);
    Ok(report)
}
