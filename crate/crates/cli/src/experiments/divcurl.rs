use halfball_core::solvers::{compatible_data, divcurl3d};
use halfball_core::{ResultTable, SpectralField};

use super::{deltas_or_default, field, symbol_table, variation};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

/// Allowed relative spread of the Friedrichs ratio across δ.
pub const FRIEDRICHS_VARIATION: f64 = 0.25;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let kc = &config.kernel_list()[0];
    let n = config.orientation(3);
    let bound = config.bound;
    let mut table = ResultTable::new(["delta", "sample", "residual", "recovery", "friedrichs"]);
    let mut residual = 0.0f64;
    let mut recovery = 0.0f64;
    let mut ratios = Vec::new();
    let mut zero = 0.0f64;
    for delta in deltas_or_default(config) {
        let t = symbol_table(config, &kc.build(3, delta)?, &n, bound)?;
        let mut worst_ratio = 0.0f64;
        for s in 0..config.samples {
            let u = field(config, s as u64, 3, 3, bound)?;
            let (f, g) = compatible_data(&t, &u)?;
            let sol = divcurl3d(&t, &f, &g)?;
            let rec = sol.u.sub(&u)?.l2_norm() / u.l2_norm();
            let fr = sol.friedrichs.unwrap_or(f64::NAN);
            residual = residual.max(sol.residual);
            recovery = recovery.max(rec);
            worst_ratio = worst_ratio.max(fr);
            table.push(vec![delta.into(), s.into(), sol.residual.into(), rec.into(), fr.into()])?;
        }
        let lat = t.lattice();
        let z = divcurl3d(&t, &SpectralField::zeros_on(lat, 1), &SpectralField::zeros_on(lat, 3))?;
        zero = zero.max(z.u.l2_norm());
        ratios.push(worst_ratio);
    }
    let mut report = Report::default();
    report.check("consistency_residual", residual, Relation::AtMost, 1e-10);
    report.check("zero_data_zero_solution", zero, Relation::AtMost, 0.0);
    report.metric("recovery", recovery);
    for (d, r) in deltas_or_default(config).iter().zip(&ratios) {
        report.metric(format!("friedrichs@{d}"), *r);
    }
    if ratios.len() > 1 {
        report.check(
            "friedrichs_variation",
            variation(&ratios),
            Relation::Below,
            FRIEDRICHS_VARIATION,
        );
    }
    report.table("", table);
    Ok(report)
}
