use halfball_core::onedim::{
    bond_symbol_from_rho, double_symbol, energy_equivalence_check, h_identity, one_sided_symbol, rho_at,
    rho_from_kernel, rho_regularized, sine_rho_closed_form, RhoKernel, EPSILON_SEQUENCE, RHO_MESH_POINTS,
};
use halfball_core::{EvenKernel, KernelFamily, KernelSpec, Lattice, ResultTable, SpectralField};
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::report::{Relation, Report};
use crate::CliError;

/// `(δ, ε)` pairs of the doubly nonlocal factorization check.
pub const DOUBLE_PAIRS: [(f64, f64); 2] = [(0.2, 0.05), (0.1, 0.1)];
/// Largest frequency of the factorization check.
pub const DOUBLE_MAX_FREQ: usize = 64;
/// Reference value of the sine-kernel `ρ(0.1)`.
pub const SINE_RHO_AT_TENTH: f64 = -0.013838699657330061;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    if config.wants("rho", true) {
        report.merge("rho", rho_suite(config)?);
    }
    if config.wants("double", true) {
        report.merge("double", double_suite()?);
    }
    Ok(report)
}

fn horizon(config: &ExperimentConfig) -> f64 {
    config.deltas.first().copied().unwrap_or(1.0)
}

fn push_rho(
    table: &mut ResultTable,
    label: &str,
    rho: &RhoKernel,
    closed: Option<fn(f64) -> f64>,
) -> Result<(), CliError> {
    for (a, r) in rho.mesh.iter().zip(&rho.values) {
        let c = closed.map_or(f64::NAN, |f| f(*a));
        table.push(vec![label.into(), (*a).into(), (*r).into(), c.into()])?;
    }
    Ok(())
}

fn rho_suite(config: &ExperimentConfig) -> Result<Report, CliError> {
    let tol = config.quad.tol;
    let delta = horizon(config);
    let mut report = Report::default();
    let mut table = ResultTable::new(["kernel", "a", "rho", "closed_form"]);

    let constant = KernelSpec::normalize(KernelFamily::Constant, 1, delta)?;
    let rc = rho_from_kernel(&constant, RHO_MESH_POINTS, tol)?;
    report.check("constant.mass_error", (rc.mass - 1.0).abs(), Relation::AtMost, 1e-8);
    report.check("constant.min_rho", rc.min_value(), Relation::AtLeast, 0.0);
    push_rho(&mut table, "constant", &rc, None)?;

    // The closed form is stated for δ = 1.
    let sine = KernelSpec::normalize(KernelFamily::SineExample, 1, 1.0)?;
    let rs = rho_from_kernel(&sine, RHO_MESH_POINTS, tol)?;
    report.check("sine.mass_error", (rs.mass - 1.0).abs(), Relation::AtMost, 1e-8);
    let pointwise = rs
        .mesh
        .iter()
        .zip(&rs.values)
        .map(|(a, r)| (r - sine_rho_closed_form(*a)).abs())
        .fold(0.0f64, f64::max);
    report.check("sine.closed_form_max_error", pointwise, Relation::AtMost, 1e-8);
    let tenth = rho_at(&sine, 0.1, tol)?;
    report.check("sine.rho_at_0.1", tenth, Relation::Below, 0.0);
    report.check(
        "sine.rho_at_0.1_error",
        (tenth - SINE_RHO_AT_TENTH).abs(),
        Relation::AtMost,
        1e-8,
    );
    push_rho(&mut table, "sine", &rs, Some(sine_rho_closed_form))?;

    let frac = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 1, delta)?;
    let reg = rho_regularized(&frac, &EPSILON_SEQUENCE, RHO_MESH_POINTS, tol)?;
    report.check(
        "fractional1.limit_mass_error",
        (reg.limit.mass - 1.0).abs(),
        Relation::AtMost,
        1e-6,
    );
    report.check(
        "fractional1.monotonicity_defect",
        reg.monotonicity_defect,
        Relation::AtMost,
        0.0,
    );
    report.check(
        "fractional1.finite",
        reg.limit.values.iter().all(|v| v.is_finite()) as u8 as f64,
        Relation::AtLeast,
        1.0,
    );
    for (eps, it) in reg.epsilons.iter().zip(&reg.iterates) {
        report.metric(format!("fractional1.mass@eps={eps:e}"), it.mass);
    }
    push_rho(&mut table, "fractional1", &reg.limit, None)?;

    let direct = rho_from_kernel(&constant, RHO_MESH_POINTS, tol)?;
    let regularized = rho_regularized(&constant, &EPSILON_SEQUENCE, RHO_MESH_POINTS, tol)?;
    let same = regularized.iterates.iter().all(|r| r.values == direct.values);
    report.check(
        "constant.regularized_equals_direct",
        same as u8 as f64,
        Relation::AtLeast,
        1.0,
    );

    for (label, k) in [("constant", &constant), ("sine", &sine)] {
        let (h, expect) = h_identity(k, tol)?;
        report.check(
            format!("{label}.h_identity"),
            (h - expect).abs(),
            Relation::AtMost,
            1e-8,
        );
        report.metric(format!("{label}.h_integral"), h);
        let mut worst = 0.0f64;
        for xi in 1..=8 {
            let lp = one_sided_symbol(k, xi as f64, true, tol)?.norm_sqr();
            let b = bond_symbol_from_rho(k, xi as f64, tol * 0.1)?;
            worst = worst.max((b + lp).abs() / lp);
        }
        report.check(format!("{label}.bond_symbol_match"), worst, Relation::AtMost, 1e-6);
    }

    let lattice = Lattice::new(1, 2)?;
    let u = SpectralField::from_fn(lattice, 1, |m, out| {
        out[0] = match m[0] {
            1 => Complex64::new(0.0, -0.5),
            -1 => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        }
    });
    let e = energy_equivalence_check(&constant, &u, tol)?;
    report.check("energy_gap", e.gap, Relation::AtMost, 1e-6);
    report.check(
        "energy_plus_minus",
        (e.e_plus - e.e_minus).abs() / e.e_plus,
        Relation::AtMost,
        1e-10,
    );
    report.metric("energy_plus", e.e_plus);
    report.metric("energy_rho", e.e_rho);
    report.table("", table);
    Ok(report)
}

fn double_suite() -> Result<Report, CliError> {
    let mut report = Report::default();
    let mut table = ResultTable::new(["delta", "epsilon", "xi", "double", "product", "relative_error"]);
    let mut worst = 0.0f64;
    for (delta, eps) in DOUBLE_PAIRS {
        let gamma = EvenKernel::unit_second_moment(delta);
        let eta = EvenKernel::unit_mass(eps);
        eta.check_unit_mass()?;
        for xi in 1..=DOUBLE_MAX_FREQ {
            let x = xi as f64;
            let d = double_symbol(&gamma, &eta, x);
            let p = gamma.bond_symbol(x) * eta.averaging_symbol(x);
            let e = (d - p).abs() / p.abs().max(1.0);
            worst = worst.max(e);
            table.push(vec![delta.into(), eps.into(), xi.into(), d.into(), p.into(), e.into()])?;
        }
    }
    report.check("factorization", worst, Relation::AtMost, 1e-12);
    report.table("", table);
    Ok(report)
}
