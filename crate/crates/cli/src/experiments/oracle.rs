use halfball_core::operators::{curl, diffusion, divergence, gradient, oracle_gradient, Side};
use halfball_core::symbols::{cartesian_midpoint_symbol, SymbolEvaluator};
use halfball_core::ResultTable;
use num_complex::Complex64;

use super::helmholtz::per_mode_max;
use super::{deltas_or_default, field, symbol_table};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

/// Number of random `(u, v)` pairs in the adjoint check.
pub const ADJOINT_PAIRS: usize = 50;
/// Grid cells per axis of the independent midpoint-rule symbol.
pub const CARTESIAN_CELLS: usize = 1000;
/// Plane-wave frequencies `sin(ξ·x)` compared against direct quadrature.
pub const ORACLE_WAVES: [[f64; 2]; 2] = [[1.0, 0.0], [1.0, 2.0]];

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    if config.wants("adjoint", true) {
        report.merge("adjoint", adjoint(config)?);
    }
    if config.wants("quadrature", true) {
        report.merge("quadrature", quadrature(config)?);
    }
    if config.wants("vector-identity", true) {
        report.merge("vector_identity", vector_identity(config)?);
    }
    Ok(report)
}

fn adjoint(config: &ExperimentConfig) -> Result<Report, CliError> {
    let d = config.dimension;
    let delta = deltas_or_default(config)[0];
    let t = symbol_table(
        config,
        &config.kernel_list()[0].build(d, delta)?,
        &config.orientation(d),
        config.bound,
    )?;
    let mut table = ResultTable::new(["pair", "lhs_re", "lhs_im", "residual"]);
    let mut worst = 0.0f64;
    for s in 0..ADJOINT_PAIRS {
        let u = field(config, 2 * s as u64, d, 1, config.bound)?;
        let v = field(config, 2 * s as u64 + 1, d, d, config.bound)?;
        let gu = gradient(&t, &u)?;
        let dv = divergence(&t, &v)?;
        let lhs = gu.inner(&v)?;
        let rhs = -u.inner(&dv)?;
        let r = (lhs - rhs).norm() / (gu.l2_norm() * v.l2_norm()).max(f64::MIN_POSITIVE);
        worst = worst.max(r);
        table.push(vec![s.into(), lhs.re.into(), lhs.im.into(), r.into()])?;
    }
    let mut report = Report::default();
    report.check("residual", worst, Relation::AtMost, 1e-12);
    report.table("", table);
    Ok(report)
}

fn quadrature(config: &ExperimentConfig) -> Result<Report, CliError> {
    let delta = deltas_or_default(config)[0];
    let settings = config.settings();
    let mut table = ResultTable::new(["kernel", "orientation", "xi1", "xi2", "relative_gap", "cartesian_gap"]);
    let mut worst = 0.0f64;
    let mut cartesian = 0.0f64;
    let points: Vec<Vec<f64>> = (0..7)
        .flat_map(|i| (0..5).map(move |j| vec![-3.0 + 0.9 * i as f64, -2.5 + 1.1 * j as f64]))
        .collect();
    for kc in config.kernel_list() {
        let k = kc.build(2, delta)?;
        for (label, n) in config.orientations(2) {
            let ev = SymbolEvaluator::new(&k, &n, settings, 4.0)?;
            for xi in ORACLE_WAVES {
                let lam = ev.eval(&xi);
                let direct = oracle_gradient(
                    &k,
                    &n,
                    |x: &[f64], out: &mut [f64]| out[0] = (xi[0] * x[0] + xi[1] * x[1]).sin(),
                    1,
                    &points,
                    settings,
                )?;
                let (mut num, mut den) = (0.0, 0.0);
                for (x, g) in points.iter().zip(&direct) {
                    let phase = Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]);
                    for i in 0..2 {
                        let s = (lam[i] * phase).im;
                        num += (s - g[i]).powi(2);
                        den += s * s;
                    }
                }
                let gap = (num / den).sqrt();
                worst = worst.max(gap);
                let mid = cartesian_midpoint_symbol(&k, &n, &xi, CARTESIAN_CELLS)?;
                let cart = ((mid[0] - lam[0]).norm_sqr() + (mid[1] - lam[1]).norm_sqr()).sqrt()
                    / (lam[0].norm_sqr() + lam[1].norm_sqr()).sqrt();
                cartesian = cartesian.max(cart);
                table.push(vec![
                    kc.label().into(),
                    label.clone().into(),
                    xi[0].into(),
                    xi[1].into(),
                    gap.into(),
                    cart.into(),
                ])?;
            }
        }
    }
    let mut report = Report::default();
    report.check("relative_gap", worst, Relation::AtMost, 1e-4);
    report.metric("tolerance", settings.tol);
    report.metric("cartesian_gap", cartesian);
    report.table("", table);
    Ok(report)
}

fn vector_identity(config: &ExperimentConfig) -> Result<Report, CliError> {
    let delta = deltas_or_default(config)[0];
    let t = symbol_table(
        config,
        &config.kernel_list()[0].build(3, delta)?,
        &config.orientation(3),
        config.bound,
    )?;
    let mut table = ResultTable::new(["sample", "identity", "curl_grad", "div_curl"]);
    let mut worst = [0.0f64; 3];
    for s in 0..config.samples {
        let f = field(config, s as u64, 3, 3, config.bound)?;
        let cc = curl(&t, &curl(&t, &f, Side::Plus)?, Side::Minus)?;
        let rhs = gradient(&t, &divergence(&t, &f)?)?.sub(&diffusion(&t, &f)?)?;
        let identity = per_mode_max(&cc.sub(&rhs)?, &rhs);
        let p = field(config, 100 + s as u64, 3, 1, config.bound)?;
        let gp = gradient(&t, &p)?;
        let curl_grad = per_mode_max(&curl(&t, &gp, Side::Plus)?, &gp);
        let cf = curl(&t, &f, Side::Minus)?;
        let div_curl = per_mode_max(&divergence(&t, &cf)?, &cf);
        for (w, v) in worst.iter_mut().zip([identity, curl_grad, div_curl]) {
            *w = w.max(v);
        }
        table.push(vec![s.into(), identity.into(), curl_grad.into(), div_curl.into()])?;
    }
    let mut report = Report::default();
    report.check("identity", worst[0], Relation::AtMost, 1e-12);
    report.check("curl_of_gradient", worst[1], Relation::AtMost, 1e-12);
    report.check("divergence_of_curl", worst[2], Relation::AtMost, 1e-12);
    report.table("", table);
    Ok(report)
}
