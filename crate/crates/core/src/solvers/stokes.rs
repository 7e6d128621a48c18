use num_complex::Complex64;

use super::{check_forcing, check_time_grid, dot_h, forcing_at, norm_sq, Trajectory};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::symbols::SymbolTable;

/// Velocity and pressure of the steady problem `-L u + G p = f`, `D u = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesSolution {
    pub velocity: SpectralField,
    pub pressure: SpectralField,
}

/// Worst per-mode residuals, relative to `max(|f̂|, 1e-300)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesResidual {
    pub momentum: f64,
    pub divergence: f64,
}

fn check_vector(table: &SymbolTable, u: &SpectralField) -> Result<()> {
    table.check_lattice(u.lattice())?;
    if u.components() != table.dimension() {
        return Err(Error::Arity {
            expected: table.dimension(),
            got: u.components(),
        });
    }
    Ok(())
}

/// `(Σ |λ|² |û|²)^{1/2}`.
pub fn s_norm(table: &SymbolTable, u: &SpectralField) -> Result<f64> {
    table.check_lattice(u.lattice())?;
    Ok(u.weighted_norm(|i| table.abs_sq(i)))
}

/// `(Σ |f̂|² / |λ|²)^{1/2}`, the dual of [`s_norm`].
pub fn s_dual_norm(table: &SymbolTable, f: &SpectralField) -> Result<f64> {
    table.check_lattice(f.lattice())?;
    let zero = f.lattice().zero_index();
    Ok(f.weighted_norm(|i| if i == zero { 0.0 } else { 1.0 / table.abs_sq(i) }))
}

pub fn stokes_steady(table: &SymbolTable, f: &SpectralField) -> Result<StokesSolution> {
    check_vector(table, f)?;
    let d = table.dimension();
    let velocity = f.map_modes(d, |idx, fv, out| {
        let lam = table.lambda(idx);
        let k = table.abs_sq(idx);
        let p = dot_h(lam, fv) / k;
        for i in 0..d {
            out[i] = (fv[i] - lam[i] * p) / k;
        }
    });
    let pressure = f.map_modes(1, |idx, fv, out| {
        out[0] = dot_h(table.lambda(idx), fv) / table.abs_sq(idx);
    });
    Ok(StokesSolution { velocity, pressure })
}

/// Plugs a solution back into `|λ|² û + λ p̂ = f̂` and `conj(λ)ᵀ û = 0`.
pub fn stokes_residual(table: &SymbolTable, f: &SpectralField, sol: &StokesSolution) -> Result<StokesResidual> {
    check_vector(table, f)?;
    f.check_compatible(&sol.velocity)?;
    let d = table.dimension();
    let mut res = StokesResidual {
        momentum: 0.0,
        divergence: 0.0,
    };
    let zero = f.lattice().zero_index();
    for idx in 0..f.lattice().len() {
        if idx == zero {
            continue;
        }
        let lam = table.lambda(idx);
        let k = table.abs_sq(idx);
        let u = sol.velocity.at(idx);
        let p = sol.pressure.at(idx)[0];
        let fv = f.at(idx);
        let scale = norm_sq(fv).sqrt().max(1e-300);
        let m: f64 = (0..d)
            .map(|i| (k * u[i] + lam[i] * p - fv[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        res.momentum = res.momentum.max(m / scale);
        res.divergence = res.divergence.max(dot_h(lam, u).norm() * k.sqrt() / scale);
    }
    Ok(res)
}

/// `(I - λ λᴴ/|λ|²) û`.
pub fn leray_project(table: &SymbolTable, u: &SpectralField) -> Result<SpectralField> {
    check_vector(table, u)?;
    let d = table.dimension();
    Ok(u.map_modes(d, |idx, v, out| project(table, idx, v, &mut out[..d])))
}

fn project(table: &SymbolTable, idx: usize, v: &[Complex64], out: &mut [Complex64]) {
    let lam = table.lambda(idx);
    let c = dot_h(lam, v) / table.abs_sq(idx);
    for (i, o) in out.iter_mut().enumerate() {
        *o = v[i] - lam[i] * c;
    }
}

/// Exact per-mode propagation of `u_t - L u + G p = f`, `D u = 0` over the
/// time grid with `f` piecewise constant (see [`Trajectory`] conventions).
pub fn stokes_evolve(
    table: &SymbolTable,
    u0: &SpectralField,
    forcing: &[SpectralField],
    times: &[f64],
) -> Result<Trajectory> {
    check_vector(table, u0)?;
    check_time_grid(times)?;
    check_forcing(forcing, times, u0)?;
    let d = table.dimension();
    let scale = u0.l2_norm().max(1.0);
    let zero = u0.lattice().zero_index();
    let defect = (0..u0.lattice().len())
        .filter(|&i| i != zero)
        .map(|i| dot_h(table.lambda(i), u0.at(i)).norm() / table.abs_sq(i).sqrt())
        .fold(0.0f64, f64::max);
    if defect > 1e-10 * scale {
        return Err(Error::InvalidArgument(format!(
            "initial velocity is not divergence-free (defect {defect:.3e})"
        )));
    }

    let pressure_of = |f: Option<&SpectralField>| match f {
        None => SpectralField::zeros_on(u0.lattice(), 1),
        Some(f) => f.map_modes(1, |idx, fv, out| {
            out[0] = dot_h(table.lambda(idx), fv) / table.abs_sq(idx)
        }),
    };
    let projected: Vec<SpectralField> = forcing.iter().map(|f| leray_project(table, f)).collect::<Result<_>>()?;

    let mut states = vec![u0.clone()];
    let mut pressures = vec![pressure_of(forcing_at(forcing, 0))];
    for k in 0..times.len() - 1 {
        let tau = times[k + 1] - times[k];
        let pf = forcing_at(&projected, k);
        let next = states[k].map_modes(d, |idx, v, out| {
            let kk = table.abs_sq(idx);
            let decay = (-kk * tau).exp();
            let gain = -(-kk * tau).exp_m1() / kk;
            for i in 0..d {
                out[i] = v[i] * decay;
                if let Some(pf) = pf {
                    out[i] += pf.at(idx)[i] * gain;
                }
            }
        });
        states.push(next);
        pressures.push(pressure_of(forcing_at(forcing, k + 1)));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        rates: None,
        pressures: Some(pressures),
    })
}
