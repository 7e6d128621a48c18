//! δ-refinement studies against the local (δ = 0) solutions.

use std::collections::BTreeMap;

use super::{leray_project, navier_decompose, navier_evolve, navier_steady, stokes_evolve, stokes_steady, v_norm};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::kernels::KernelSpec;
use crate::operators::divergence;
use crate::quadrature::{Orientation, QuadratureSettings};
use crate::results::{fit_slope, ResultTable};
use crate::symbols::SymbolTable;

/// Error table with one row per δ and fitted log-log slopes per error column.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub table: ResultTable,
    pub slopes: BTreeMap<String, f64>,
}

impl ConvergenceStudy {
    /// Errors strictly decrease as δ decreases, for every error column.
    pub fn monotone(&self) -> bool {
        self.table.columns().iter().skip(1).all(|c| {
            let e = self.table.column(c).unwrap_or_default();
            e.windows(2).all(|w| w[1] < w[0])
        })
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.values().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 3 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least 3 δ values".into(),
        ));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidArgument(
            "δ list must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn tables(
    kernel: &KernelSpec,
    orientation: &Orientation,
    bound: usize,
    deltas: &[f64],
    settings: QuadratureSettings,
) -> Result<Vec<SymbolTable>> {
    deltas
        .iter()
        .map(|&d| SymbolTable::build(&kernel.with_horizon(d)?, orientation, bound, settings))
        .collect()
}

fn finish(deltas: &[f64], columns: &[&str], rows: Vec<Vec<f64>>, slope_each: bool) -> Result<ConvergenceStudy> {
    let mut table = ResultTable::new(std::iter::once("delta").chain(columns.iter().copied()));
    for (d, r) in deltas.iter().zip(&rows) {
        table.push(std::iter::once(*d).chain(r.iter().copied()).map(Into::into).collect())?;
    }
    let mut slopes = BTreeMap::new();
    if slope_each {
        for (j, c) in columns.iter().enumerate() {
            let e: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            slopes.insert(c.to_string(), fit_slope(deltas, &e)?);
        }
    }
    Ok(ConvergenceStudy { table, slopes })
}

/// `err_u`, `err_p`, `err_div` of the steady Stokes solution against the
/// local one; `err_div` is the local divergence of `u_δ`.
pub fn stokes_convergence(
    kernel: &KernelSpec,
    orientation: &Orientation,
    f: &SpectralField,
    deltas: &[f64],
    settings: QuadratureSettings,
) -> Result<ConvergenceStudy> {
    check_deltas(deltas)?;
    let local = SymbolTable::local(f.dimension(), f.bound())?;
    let reference = stokes_steady(&local, f)?;
    let mut rows = Vec::new();
    for table in tables(kernel, orientation, f.bound(), deltas, settings)? {
        let s = stokes_steady(&table, f)?;
        rows.push(vec![
            s.velocity.sub(&reference.velocity)?.l2_norm(),
            s.pressure.sub(&reference.pressure)?.l2_norm(),
            divergence(&local, &s.velocity)?.l2_norm(),
        ]);
    }
    finish(deltas, &["err_u", "err_p", "err_div"], rows, true)
}

/// `err_v = ‖u_δ - u‖_{V_δ}` and `err_l2` of the steady Navier solution.
pub fn navier_convergence(
    kernel: &KernelSpec,
    orientation: &Orientation,
    mu: f64,
    lame: f64,
    f: &SpectralField,
    deltas: &[f64],
    settings: QuadratureSettings,
) -> Result<ConvergenceStudy> {
    check_deltas(deltas)?;
    let local = navier_decompose(&SymbolTable::local(f.dimension(), f.bound())?, mu, lame)?;
    let reference = navier_steady(&local, f)?;
    let mut rows = Vec::new();
    for table in tables(kernel, orientation, f.bound(), deltas, settings)? {
        let dec = navier_decompose(&table, mu, lame)?;
        let err = navier_steady(&dec, f)?.sub(&reference)?;
        rows.push(vec![v_norm(&dec, &err)?, err.l2_norm()]);
    }
    finish(deltas, &["err_v", "err_l2"], rows, true)
}

/// `L²(0,T;L²)` distance of unsteady Stokes trajectories started from the
/// δ-projected `u0`; the slope is measured, not asserted.
pub fn stokes_evolution_convergence(
    kernel: &KernelSpec,
    orientation: &Orientation,
    u0: &SpectralField,
    forcing: &[SpectralField],
    times: &[f64],
    deltas: &[f64],
    settings: QuadratureSettings,
) -> Result<ConvergenceStudy> {
    check_deltas(deltas)?;
    let local = SymbolTable::local(u0.dimension(), u0.bound())?;
    let reference = stokes_evolve(&local, &leray_project(&local, u0)?, forcing, times)?;
    let mut rows = Vec::new();
    for table in tables(kernel, orientation, u0.bound(), deltas, settings)? {
        let tr = stokes_evolve(&table, &leray_project(&table, u0)?, forcing, times)?;
        rows.push(vec![tr.l2_time_distance(&reference)?]);
    }
    finish(deltas, &["err_l2t"], rows, true)
}

/// `L²(0,T;L²)` distance of Navier wave trajectories with shared data.
#[allow(clippy::too_many_arguments)]
pub fn navier_evolution_convergence(
    kernel: &KernelSpec,
    orientation: &Orientation,
    mu: f64,
    lame: f64,
    g: &SpectralField,
    h: &SpectralField,
    forcing: &[SpectralField],
    times: &[f64],
    deltas: &[f64],
    settings: QuadratureSettings,
) -> Result<ConvergenceStudy> {
    check_deltas(deltas)?;
    let local = navier_decompose(&SymbolTable::local(g.dimension(), g.bound())?, mu, lame)?;
    let reference = navier_evolve(&local, g, h, forcing, times)?;
    let mut rows = Vec::new();
    for table in tables(kernel, orientation, g.bound(), deltas, settings)? {
        let dec = navier_decompose(&table, mu, lame)?;
        let tr = navier_evolve(&dec, g, h, forcing, times)?;
        rows.push(vec![tr.l2_time_distance(&reference)?]);
    }
    finish(deltas, &["err_l2t"], rows, true)
}
