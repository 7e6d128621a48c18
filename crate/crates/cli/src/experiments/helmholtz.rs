use halfball_core::operators::{divergence, gradient};
use halfball_core::solvers::{helmholtz2d, helmholtz3d};
use halfball_core::ResultTable;

use super::{deltas_or_default, field, symbol_table};
use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let kc = &config.kernel_list()[0];
    let mut table = ResultTable::new([
        "dimension",
        "bound",
        "delta",
        "sample",
        "reconstruction",
        "solenoidal",
        "realness",
        "stability",
    ]);
    let mut worst = [0.0f64; 3];
    let mut stability = 0.0f64;
    for case in config.cases() {
        let d = case.dimension;
        if d == 1 {
            return Err(CliError::Config(
                "Helmholtz decomposition needs dimension 2 or 3".into(),
            ));
        }
        let n = config.orientation(d);
        for delta in deltas_or_default(config) {
            let t = symbol_table(config, &kc.build(d, delta)?, &n, case.bound)?;
            let reflected = t.reflect();
            for s in 0..config.samples {
                let u = field(config, s as u64, d, d, case.bound)?;
                let scale = u.l2_norm();
                let (rec, sol, real, stab) = if d == 2 {
                    let h = helmholtz2d(&t, &u)?;
                    let gq = gradient(&reflected, &h.q)?;
                    let jgq = gq.map_modes(2, |_, v, out| {
                        out[0] = -v[1];
                        out[1] = v[0];
                    });
                    let sol = per_mode_max(&divergence(&t, &jgq)?, &u);
                    let real = h.p.hermitian_defect().max(h.q.hermitian_defect()) / scale;
                    (h.reconstruction, sol, real, h.stability)
                } else {
                    let h = helmholtz3d(&t, &u)?;
                    let real = h.p.hermitian_defect().max(h.v.hermitian_defect()) / scale;
                    (h.reconstruction, h.gauge, real, h.stability)
                };
                for (w, v) in worst.iter_mut().zip([rec, sol, real]) {
                    *w = w.max(v);
                }
                stability = stability.max(stab);
                table.push(vec![
                    d.into(),
                    case.bound.into(),
                    delta.into(),
                    s.into(),
                    rec.into(),
                    sol.into(),
                    real.into(),
                    stab.into(),
                ])?;
            }
        }
    }
    let mut report = Report::default();
    report.check("reconstruction", worst[0], Relation::AtMost, 1e-12);
    report.check("gauge_or_divergence_free", worst[1], Relation::AtMost, 1e-12);
    report.check("realness", worst[2], Relation::AtMost, 1e-12);
    report.metric("stability_constant", stability);
    report.table("", table);
    Ok(report)
}

/// `max_ξ |r̂(ξ)| / |û(ξ)|`.
pub(crate) fn per_mode_max(r: &halfball_core::SpectralField, u: &halfball_core::SpectralField) -> f64 {
    let mut worst = 0.0f64;
    for idx in 0..u.lattice().len() {
        let s: f64 = u.at(idx).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if s > 0.0 {
            let e: f64 = r.at(idx).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(e / s);
        }
    }
    worst
}
