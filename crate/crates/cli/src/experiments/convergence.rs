use halfball_core::solvers::{
    navier_convergence, navier_evolution_convergence, stokes_convergence, stokes_evolution_convergence,
    ConvergenceStudy,
};

use super::{field, navier, need_deltas, stokes};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

/// Lowest accepted log-log slope of a steady study.
pub const MIN_SLOPE: f64 = 0.9;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    match config.problem.as_deref().unwrap_or("stokes") {
        "stokes" => steady_stokes(config),
        "navier" => steady_navier(config),
        "evolution" => evolution(config),
        other => Err(CliError::Config(format!(
            "unknown convergence problem `{other}` (expected stokes, navier or evolution)"
        ))),
    }
}

fn record(report: &mut Report, study: &ConvergenceStudy, assert_slopes: bool) {
    for (c, s) in &study.slopes {
        if assert_slopes {
            report.check(format!("slope[{c}]"), *s, Relation::AtLeast, MIN_SLOPE);
        } else {
            report.metric(format!("slope[{c}]"), *s);
        }
    }
}

fn steady_stokes(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let deltas = need_deltas(config, 3)?;
    let kernel = config.kernel_list()[0].build(d, deltas[0])?;
    let f = field(config, 0, d, d, config.bound)?;
    let study = stokes_convergence(&kernel, &config.orientation(d), &f, &deltas, config.settings())?;
    let mut report = Report::default();
    record(&mut report, &study, true);
    report.table("", study.table);
    Ok(report)
}

fn steady_navier(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let deltas = need_deltas(config, 3)?;
    let kernel = config.kernel_list()[0].build(d, deltas[0])?;
    let f = field(config, 0, d, d, config.bound)?;
    let n = config.orientation(d);
    let mut report = Report::default();
    for [mu, lame] in config.lame_pairs() {
        let study = navier_convergence(&kernel, &n, mu, lame, &f, &deltas, config.settings())?;
        let tag = format!("mu={mu},lame={lame}");
        report.check(
            format!("slope[err_v,{tag}]"),
            study.slopes["err_v"],
            Relation::AtLeast,
            MIN_SLOPE,
        );
        report.metric(format!("slope[err_l2,{tag}]"), study.slopes["err_l2"]);
        report.table(&format!("mu{mu}_lame{lame}"), study.table);
    }
    Ok(report)
}

fn evolution(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let deltas = need_deltas(config, 3)?;
    let kernel = config.kernel_list()[0].build(d, deltas[0])?;
    let n = config.orientation(d);
    let times = config.times();
    let forcing = if config.forced {
        vec![field(config, 2, d, d, config.bound)?]
    } else {
        Vec::new()
    };
    let mut single = config.clone();
    single.deltas = vec![deltas[deltas.len() - 1]];

    let mut report = Report::default();
    report.merge("stokes", stokes::run_evolve(&single)?);
    report.merge("navier", navier::run_evolve(&single)?);

    let u0 = field(config, 0, d, d, config.bound)?;
    let st = stokes_evolution_convergence(&kernel, &n, &u0, &forcing, &times, &deltas, config.settings())?;
    report.check(
        "stokes.monotone_l2t",
        st.monotone() as u8 as f64,
        Relation::AtLeast,
        1.0,
    );
    record(&mut report, &st, false);
    report.table("stokes_refinement", st.table);

    let [mu, lame] = config.lame_pairs()[0];
    let g = field(config, 0, d, d, config.bound)?;
    let h = field(config, 1, d, d, config.bound)?;
    let nv = navier_evolution_convergence(
        &kernel,
        &n,
        mu,
        lame,
        &g,
        &h,
        &forcing,
        &times,
        &deltas,
        config.settings(),
    )?;
    report.check(
        "navier.monotone_l2t",
        nv.monotone() as u8 as f64,
        Relation::AtLeast,
        1.0,
    );
    report.metric("navier.slope[err_l2t]", nv.slopes["err_l2t"]);
    report.table("navier_refinement", nv.table);
    Ok(report)
}
