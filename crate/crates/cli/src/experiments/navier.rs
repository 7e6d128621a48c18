use halfball_core::solvers::{
    korn_check, mode_hamiltonian, navier_decompose, navier_energy, navier_energy_from_fields, navier_evolve,
    navier_steady, s_norm, NavierModeDecomposition,
};
use halfball_core::{ResultTable, SymbolTable};
use num_complex::Complex64;

use super::{deltas_or_default, field, symbol_table};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let kc = &config.kernel_list()[0];
    let n = config.orientation(d);
    let mut table = ResultTable::new([
        "mu",
        "lame",
        "delta",
        "sample",
        "energy_symbol",
        "energy_fields",
        "energy_gap",
        "korn_ratio",
        "korn_constant",
    ]);
    let mut report = Report::default();
    let mut solve = 0.0f64;
    for [mu, lame] in config.lame_pairs() {
        let c = mu.min(lame + 2.0 * mu);
        let mut gap = 0.0f64;
        let mut korn = f64::INFINITY;
        for delta in deltas_or_default(config) {
            let t = symbol_table(config, &kc.build(d, delta)?, &n, config.bound)?;
            let dec = navier_decompose(&t, mu, lame)?;
            for s in 0..config.samples {
                let u = field(config, s as u64, d, d, config.bound)?;
                let a = navier_energy(&dec, &u)?;
                let b = navier_energy_from_fields(&dec, &u)?;
                let g = (a - b).abs() / a.abs().max(1.0);
                let k = korn_check(&dec, &u)?;
                let ratio = k.twice_energy / s_norm(&t, &u)?.powi(2);
                gap = gap.max(g);
                korn = korn.min(ratio - c);
                table.push(vec![
                    mu.into(),
                    lame.into(),
                    delta.into(),
                    s.into(),
                    a.into(),
                    b.into(),
                    g.into(),
                    ratio.into(),
                    c.into(),
                ])?;
                let f = field(config, 500 + s as u64, d, d, config.bound)?;
                let us = navier_steady(&dec, &f)?;
                solve = solve.max(dec.apply(&us)?.sub(&f)?.l2_norm() / f.l2_norm());
            }
        }
        let tag = format!("mu={mu},lame={lame}");
        report.check(format!("energy_identity[{tag}]"), gap, Relation::AtMost, 1e-10);
        report.check(format!("korn_margin[{tag}]"), korn, Relation::AtLeast, -1e-10);
        report.metric(format!("korn_constant[{tag}]"), c);
    }
    report.check("steady_residual", solve, Relation::AtMost, 1e-12);
    report.table("", table);
    Ok(report)
}

/// `max_ξ ‖[P̂_a, P̂_b]‖_F / (‖P̂_a‖_F ‖P̂_b‖_F)`.
pub fn commutator(a: &NavierModeDecomposition, b: &NavierModeDecomposition) -> f64 {
    let d = a.dimension();
    let lat = a.table().lattice();
    let matrix = |dec: &NavierModeDecomposition, idx: usize| {
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        let mut e = vec![Complex64::new(0.0, 0.0); d];
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..d {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            dec.apply_function(idx, &e, |x| x, &mut col);
            for i in 0..d {
                m[i * d + j] = col[i];
            }
        }
        m
    };
    let fro = |m: &[Complex64]| m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut worst = 0.0f64;
    for idx in 0..lat.len() {
        if idx == lat.zero_index() {
            continue;
        }
        let (p, q) = (matrix(a, idx), matrix(b, idx));
        let mut c = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                c[i * d + j] = (0..d)
                    .map(|k| p[i * d + k] * q[k * d + j] - q[i * d + k] * p[k * d + j])
                    .sum();
            }
        }
        worst = worst.max(fro(&c) / (fro(&p) * fro(&q)));
    }
    worst
}

pub fn run_evolve(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let kc = &config.kernel_list()[0];
    let delta = deltas_or_default(config)[0];
    let [mu, lame] = config.lame_pairs()[0];
    let t = symbol_table(config, &kc.build(d, delta)?, &config.orientation(d), config.bound)?;
    let dec = navier_decompose(&t, mu, lame)?;
    let local = navier_decompose(&SymbolTable::local(d, config.bound)?, mu, lame)?;
    let g = field(config, 0, d, d, config.bound)?;
    let h = field(config, 1, d, d, config.bound)?;
    let forcing = if config.forced {
        vec![field(config, 2, d, d, config.bound)?]
    } else {
        Vec::new()
    };
    let times = config.times();
    let tr = navier_evolve(&dec, &g, &h, &forcing, &times)?;
    let reference = navier_evolve(&local, &g, &h, &forcing, &times)?;
    let rates = tr.rates.as_ref().expect("wave trajectories carry rates");
    let lat = g.lattice();
    let hamiltonian = |k: usize| {
        (0..lat.len())
            .map(|i| mode_hamiltonian(&dec, tr.states[k].at(i), rates[k].at(i), i))
            .sum::<f64>()
            * 0.5
    };
    let table = tr.to_table(hamiltonian, Some(&reference))?;
    let mut report = Report::default();
    if forcing.is_empty() {
        let mut drift = 0.0f64;
        for i in 0..lat.len() {
            let h0 = mode_hamiltonian(&dec, g.at(i), h.at(i), i);
            if h0 == 0.0 {
                continue;
            }
            for (state, rate) in tr.states.iter().zip(rates).skip(1) {
                let hk = mode_hamiltonian(&dec, state.at(i), rate.at(i), i);
                drift = drift.max((hk - h0).abs() / h0);
            }
        }
        report.check("hamiltonian_drift", drift, Relation::AtMost, 1e-10);
    }
    report.check("noncommuting", commutator(&dec, &local), Relation::Above, 1e-8);
    report.metric("l2t_error_vs_local", tr.l2_time_distance(&reference)?);
    report.table("", table);
    Ok(report)
}
