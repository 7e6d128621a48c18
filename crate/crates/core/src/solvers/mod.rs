//! Closed-form per-mode solvers built on a [`SymbolTable`].
//!
//! The local (δ = 0) problems go through the same functions with
//! [`SymbolTable::local`].

mod convergence;
mod divcurl;
mod helmholtz;
mod navier;
mod stokes;

pub use convergence::{
    navier_convergence, navier_evolution_convergence, stokes_convergence, stokes_evolution_convergence,
    ConvergenceStudy,
};
pub use divcurl::{compatible_data, divcurl3d, friedrichs_ratio, DivCurlSolution};
pub use helmholtz::{helmholtz2d, helmholtz3d, Helmholtz2d, Helmholtz3d};
pub use navier::{
    korn_check, mode_hamiltonian, navier_decompose, navier_energy, navier_energy_from_fields, navier_evolve,
    navier_steady, v_norm, KornReport, NavierModeDecomposition,
};
pub use stokes::{
    leray_project, s_dual_norm, s_norm, stokes_evolve, stokes_residual, stokes_steady, StokesResidual, StokesSolution,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::results::ResultTable;

/// `λᴴ v = Σ conj(λ_k) v_k`.
pub(crate) fn dot_h(lambda: &[Complex64], v: &[Complex64]) -> Complex64 {
    lambda.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Time samples of a field-valued evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    /// `u_t` for second-order evolutions.
    pub rates: Option<Vec<SpectralField>>,
    /// Pressure for Stokes evolutions.
    pub pressures: Option<Vec<SpectralField>>,
}

impl Trajectory {
    pub fn l2_norms(&self) -> Vec<f64> {
        self.states.iter().map(SpectralField::l2_norm).collect()
    }

    /// `‖u - v‖_{L²(0,T;L²)}` by the trapezoid rule on the shared time grid.
    pub fn l2_time_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::Incompatible("trajectories use different time grids".into()));
        }
        let mut err = Vec::with_capacity(self.times.len());
        for (a, b) in self.states.iter().zip(&other.states) {
            err.push(a.sub(b)?.l2_norm().powi(2));
        }
        let total: f64 = self
            .times
            .windows(2)
            .zip(err.windows(2))
            .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
            .sum();
        Ok(total.sqrt())
    }

    /// Columns `t, l2, energy` and, with a reference, `error`.
    pub fn to_table(&self, energy: impl Fn(usize) -> f64, reference: Option<&Trajectory>) -> Result<ResultTable> {
        let mut cols = vec!["t", "l2", "energy"];
        if reference.is_some() {
            cols.push("error");
        }
        let mut table = ResultTable::new(cols);
        for (k, (t, u)) in self.times.iter().zip(&self.states).enumerate() {
            let mut row = vec![(*t).into(), u.l2_norm().into(), energy(k).into()];
            if let Some(r) = reference {
                row.push(u.sub(&r.states[k])?.l2_norm().into());
            }
            table.push(row)?;
        }
        Ok(table)
    }
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument("time grid needs at least two points".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Forcing for interval `[t_k, t_{k+1})`: empty means none, one field is
/// constant in time, otherwise one field per interval.
pub(crate) fn forcing_at(forcing: &[SpectralField], k: usize) -> Option<&SpectralField> {
    match forcing.len() {
        0 => None,
        1 => Some(&forcing[0]),
        _ => Some(&forcing[k.min(forcing.len() - 1)]),
    }
}

pub(crate) fn check_forcing(forcing: &[SpectralField], times: &[f64], like: &SpectralField) -> Result<()> {
    if forcing.len() > 1 && forcing.len() != times.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "piecewise forcing needs {} intervals, got {}",
            times.len() - 1,
            forcing.len()
        )));
    }
    forcing.iter().try_for_each(|f| like.check_compatible(f))
}
