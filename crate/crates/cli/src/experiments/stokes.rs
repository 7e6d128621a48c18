use halfball_core::operators::gradient;
use halfball_core::solvers::{leray_project, s_dual_norm, s_norm, stokes_evolve, stokes_residual, stokes_steady};
use halfball_core::{ResultTable, SymbolTable};

use super::{deltas_or_default, field, symbol_table};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let kc = &config.kernel_list()[0];
    let n = config.orientation(d);
    let mut table = ResultTable::new([
        "delta",
        "sample",
        "momentum",
        "divergence",
        "stability",
        "hermitian_defect",
    ]);
    let mut worst = [0.0f64; 4];
    let mut leray = 0.0f64;
    for delta in deltas_or_default(config) {
        let t = symbol_table(config, &kc.build(d, delta)?, &n, config.bound)?;
        for s in 0..config.samples {
            let f = field(config, s as u64, d, d, config.bound)?;
            let sol = stokes_steady(&t, &f)?;
            let r = stokes_residual(&t, &f, &sol)?;
            let stab = (s_norm(&t, &sol.velocity)? + sol.pressure.l2_norm()) / s_dual_norm(&t, &f)?;
            let herm = sol.velocity.hermitian_defect().max(sol.pressure.hermitian_defect()) / f.l2_norm();
            for (w, v) in worst.iter_mut().zip([r.momentum, r.divergence, stab, herm]) {
                *w = w.max(v);
            }
            table.push(vec![
                delta.into(),
                s.into(),
                r.momentum.into(),
                r.divergence.into(),
                stab.into(),
                herm.into(),
            ])?;
            let g = field(config, 1000 + s as u64, d, 1, config.bound)?;
            let gg = gradient(&t, &g)?;
            leray = leray.max(leray_project(&t, &gg)?.l2_norm() / gg.l2_norm());
            let p = leray_project(&t, &f)?;
            leray = leray.max(leray_project(&t, &p)?.sub(&p)?.l2_norm() / f.l2_norm());
        }
    }
    let mut report = Report::default();
    report.check("momentum_residual", worst[0], Relation::AtMost, 1e-12);
    report.check("divergence_residual", worst[1], Relation::AtMost, 1e-12);
    report.check("stability_constant", worst[2], Relation::AtMost, 2.0);
    report.check("realness", worst[3], Relation::AtMost, 1e-14);
    report.check("leray_projector", leray, Relation::AtMost, 1e-12);
    report.table("", table);
    Ok(report)
}

pub fn run_evolve(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let kc = &config.kernel_list()[0];
    let delta = deltas_or_default(config)[0];
    let t = symbol_table(config, &kc.build(d, delta)?, &config.orientation(d), config.bound)?;
    let local = SymbolTable::local(d, config.bound)?;
    let raw = field(config, 0, d, d, config.bound)?;
    let forcing = if config.forced {
        vec![field(config, 1, d, d, config.bound)?]
    } else {
        Vec::new()
    };
    let times = config.times();
    let tr = stokes_evolve(&t, &leray_project(&t, &raw)?, &forcing, &times)?;
    let reference = stokes_evolve(&local, &leray_project(&local, &raw)?, &forcing, &times)?;
    let norms = tr.l2_norms();
    let table = tr.to_table(|k| 0.5 * norms[k] * norms[k], Some(&reference))?;
    let mut report = Report::default();
    if forcing.is_empty() {
        let ratio = norms.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
        report.check("energy_decrease_ratio", ratio, Relation::Below, 1.0);
    }
    report.metric("l2t_error_vs_local", tr.l2_time_distance(&reference)?);
    report.table("", table);
    Ok(report)
}
