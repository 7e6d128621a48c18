use num_complex::Complex64;

use super::{check_forcing, check_time_grid, dot_h, forcing_at, norm_sq, Trajectory};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::operators::{divergence, strain};
use crate::symbols::SymbolTable;

/// `P̂(ξ) = a Π + b (I - Π)` with `Π = λ λᴴ/|λ|²`, `a = (λ_L + 2μ)|λ|²`,
/// `b = μ|λ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct NavierModeDecomposition {
    table: SymbolTable,
    mu: f64,
    lame: f64,
}

impl NavierModeDecomposition {
    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lame(&self) -> f64 {
        self.lame
    }

    pub fn dimension(&self) -> usize {
        self.table.dimension()
    }

    /// `(a, b)` at mode index `idx`.
    pub fn eigenvalues(&self, idx: usize) -> (f64, f64) {
        let k = self.table.abs_sq(idx);
        ((self.lame + 2.0 * self.mu) * k, self.mu * k)
    }

    /// `Π(ξ)` as a row-major `d × d` matrix.
    pub fn projector(&self, idx: usize) -> Vec<Complex64> {
        let lam = self.table.lambda(idx);
        let d = self.dimension();
        let k = self.table.abs_sq(idx);
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = lam[i] * lam[j].conj() / k;
            }
        }
        out
    }

    /// Applies `φ(a) Π + φ(b) (I - Π)` to `v` at mode `idx`.
    pub fn apply_function(&self, idx: usize, v: &[Complex64], phi: impl Fn(f64) -> f64, out: &mut [Complex64]) {
        let lam = self.table.lambda(idx);
        let (a, b) = self.eigenvalues(idx);
        let (fa, fb) = (phi(a), phi(b));
        let c = dot_h(lam, v) / self.table.abs_sq(idx);
        for i in 0..self.dimension() {
            let par = lam[i] * c;
            out[i] = par * fa + (v[i] - par) * fb;
        }
    }

    /// `P̂ û` as a field.
    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        self.check(u)?;
        Ok(u.map_modes(self.dimension(), |idx, v, out| self.apply_function(idx, v, |x| x, out)))
    }

    fn check(&self, u: &SpectralField) -> Result<()> {
        self.table.check_lattice(u.lattice())?;
        if u.components() != self.dimension() {
            return Err(Error::Arity {
                expected: self.dimension(),
                got: u.components(),
            });
        }
        Ok(())
    }
}

pub fn navier_decompose(table: &SymbolTable, mu: f64, lame: f64) -> Result<NavierModeDecomposition> {
    if !(mu > 0.0) || !(lame + 2.0 * mu > 0.0) || !lame.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Lamé constants need μ > 0 and λ + 2μ > 0, got μ = {mu}, λ = {lame}"
        )));
    }
    Ok(NavierModeDecomposition {
        table: table.clone(),
        mu,
        lame,
    })
}

/// Solves `P̂ û = f̂`.
pub fn navier_steady(dec: &NavierModeDecomposition, f: &SpectralField) -> Result<SpectralField> {
    dec.check(f)?;
    Ok(f.map_modes(dec.dimension(), |idx, v, out| {
        dec.apply_function(idx, v, |x| 1.0 / x, out)
    }))
}

/// `E(u) = ½ Σ ûᴴ P̂ û`.
pub fn navier_energy(dec: &NavierModeDecomposition, u: &SpectralField) -> Result<f64> {
    let pu = dec.apply(u)?;
    Ok(0.5 * pu.inner(u)?.re)
}

/// `E(u) = ½ (λ_L ‖D u‖² + 2μ ‖e(u)‖²)` from divergence and strain fields.
pub fn navier_energy_from_fields(dec: &NavierModeDecomposition, u: &SpectralField) -> Result<f64> {
    dec.check(u)?;
    let div = divergence(dec.table(), u)?.l2_norm();
    let e = strain(dec.table(), u)?.l2_norm();
    Ok(0.5 * (dec.lame() * div * div + 2.0 * dec.mu() * e * e))
}

/// `(‖u‖² + E(u))^{1/2}`.
pub fn v_norm(dec: &NavierModeDecomposition, u: &SpectralField) -> Result<f64> {
    let e = navier_energy(dec, u)?;
    Ok((u.l2_norm().powi(2) + e).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KornReport {
    /// `2E(u)`.
    pub twice_energy: f64,
    /// `min(μ, λ_L + 2μ) Σ |λ|² |û|²`.
    pub lower_bound: f64,
    /// `(2E - bound) / max(bound, 1)`, negative when the bound fails.
    pub margin: f64,
}

pub fn korn_check(dec: &NavierModeDecomposition, u: &SpectralField) -> Result<KornReport> {
    let twice_energy = 2.0 * navier_energy(dec, u)?;
    let c = dec.mu().min(dec.lame() + 2.0 * dec.mu());
    let lower_bound = c * u.weighted_norm(|i| dec.table().abs_sq(i)).powi(2);
    Ok(KornReport {
        twice_energy,
        lower_bound,
        margin: (twice_energy - lower_bound) / lower_bound.max(1.0),
    })
}

/// Exact per-mode propagation of `u_tt + P̂ u = f`, `u(0) = g`, `u_t(0) = h`
/// with `f` piecewise constant on the grid.
pub fn navier_evolve(
    dec: &NavierModeDecomposition,
    g: &SpectralField,
    h: &SpectralField,
    forcing: &[SpectralField],
    times: &[f64],
) -> Result<Trajectory> {
    dec.check(g)?;
    g.check_compatible(h)?;
    check_time_grid(times)?;
    check_forcing(forcing, times, g)?;
    let d = dec.dimension();
    let mut states = vec![g.clone()];
    let mut rates = vec![h.clone()];
    let mut tmp = vec![Complex64::new(0.0, 0.0); d];
    for k in 0..times.len() - 1 {
        let tau = times[k + 1] - times[k];
        let f = forcing_at(forcing, k);
        let (u, v) = (&states[k], &rates[k]);
        let cos = |x: f64| (x.sqrt() * tau).cos();
        let sinc = |x: f64| {
            let w = x.sqrt();
            (w * tau).sin() / w
        };
        let msin = |x: f64| -x.sqrt() * (x.sqrt() * tau).sin();
        let vers = |x: f64| 2.0 * (0.5 * x.sqrt() * tau).sin().powi(2) / x;
        let next_u = u.map_modes(d, |idx, uu, out| {
            dec.apply_function(idx, uu, cos, out);
            dec.apply_function(idx, v.at(idx), sinc, &mut tmp);
            for i in 0..d {
                out[i] += tmp[i];
            }
            if let Some(f) = f {
                dec.apply_function(idx, f.at(idx), vers, &mut tmp);
                for i in 0..d {
                    out[i] += tmp[i];
                }
            }
        });
        let next_v = v.map_modes(d, |idx, vv, out| {
            dec.apply_function(idx, vv, cos, out);
            dec.apply_function(idx, u.at(idx), msin, &mut tmp);
            for i in 0..d {
                out[i] += tmp[i];
            }
            if let Some(f) = f {
                dec.apply_function(idx, f.at(idx), sinc, &mut tmp);
                for i in 0..d {
                    out[i] += tmp[i];
                }
            }
        });
        states.push(next_u);
        rates.push(next_v);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        rates: Some(rates),
        pressures: None,
    })
}

/// Per-mode Hamiltonian `|v̂|² + ûᴴ P̂ û` at mode `idx`.
pub fn mode_hamiltonian(dec: &NavierModeDecomposition, u: &[Complex64], v: &[Complex64], idx: usize) -> f64 {
    if idx == dec.table().lattice().zero_index() {
        return norm_sq(v);
    }
    let mut pu = vec![Complex64::new(0.0, 0.0); u.len()];
    dec.apply_function(idx, u, |x| x, &mut pu);
    norm_sq(v) + pu.iter().zip(u).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random_field;
    use crate::kernels::{KernelFamily, KernelSpec};
    use crate::quadrature::{Orientation, QuadratureSettings};

    fn table(delta: f64) -> SymbolTable {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 2, delta).unwrap();
        SymbolTable::build(&k, &Orientation::from_angle(0.7), 4, QuadratureSettings::default()).unwrap()
    }

    #[test]
    fn projector_structure() {
        let dec = navier_decompose(&table(0.2), 1.0, 1.0).unwrap();
        let idx = dec.table().lattice().index(&[2, -1]).unwrap();
        let p = dec.projector(idx);
        for i in 0..2 {
            for j in 0..2 {
                let sq: Complex64 = (0..2).map(|k| p[i * 2 + k] * p[k * 2 + j]).sum();
                assert!((sq - p[i * 2 + j]).norm() < 1e-14);
                assert!((p[i * 2 + j] - p[j * 2 + i].conj()).norm() < 1e-14);
            }
        }
        assert!(navier_decompose(dec.table(), 0.0, 1.0).is_err());
        assert!(navier_decompose(dec.table(), 1.0, -2.0).is_err());
    }

    #[test]
    fn steady_solve_inverts_operator() {
        let dec = navier_decompose(&table(0.2), 1.0, 0.5).unwrap();
        let f = random_field(31, 2, 2, 4, 2.0).unwrap();
        let u = navier_steady(&dec, &f).unwrap();
        assert!(dec.apply(&u).unwrap().sub(&f).unwrap().l2_norm() < 1e-13 * f.l2_norm());
        assert!(u.is_real());
    }

    #[test]
    fn energy_two_ways_and_korn() {
        for (mu, lame) in [(1.0, 1.0), (1.0, -1.5), (2.0, 0.0)] {
            let dec = navier_decompose(&table(0.1), mu, lame).unwrap();
            let u = random_field(32, 2, 2, 4, 1.0).unwrap();
            let a = navier_energy(&dec, &u).unwrap();
            let b = navier_energy_from_fields(&dec, &u).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} {b}");
            let k = korn_check(&dec, &u).unwrap();
            assert!(k.margin >= -1e-10);
        }
    }

    #[test]
    fn korn_constant_is_mu_without_lame() {
        let dec = navier_decompose(&table(0.1), 1.5, 0.0).unwrap();
        let lat = dec.table().lattice();
        let idx = lat.index(&[1, 2]).unwrap();
        let lam = dec.table().lambda(idx);
        // Mode orthogonal to λ: 2E = μ|λ|²|û|² exactly.
        let v = [lam[1].conj(), -lam[0].conj()];
        let u = SpectralField::single_mode(lat, &[1, 2], &v).unwrap();
        let k = korn_check(&dec, &u).unwrap();
        assert!((k.twice_energy - k.lower_bound).abs() < 1e-12 * k.lower_bound);
    }

    #[test]
    fn hamiltonian_is_conserved() {
        let dec = navier_decompose(&table(0.2), 1.0, -1.5).unwrap();
        let g = random_field(33, 2, 2, 4, 2.0).unwrap();
        let h = random_field(34, 2, 2, 4, 2.0).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
        let tr = navier_evolve(&dec, &g, &h, &[], &times).unwrap();
        let rates = tr.rates.as_ref().unwrap();
        for idx in 0..g.lattice().len() {
            let h0 = mode_hamiltonian(&dec, g.at(idx), h.at(idx), idx);
            for (k, (state, rate)) in tr.states.iter().zip(rates).enumerate().skip(1) {
                let hk = mode_hamiltonian(&dec, state.at(idx), rate.at(idx), idx);
                assert!((hk - h0).abs() <= 1e-10 * h0.max(1e-300), "{idx} {k}");
            }
        }
    }

    #[test]
    fn constant_forcing_oscillates_about_steady_state() {
        let dec = navier_decompose(&table(0.2), 1.0, 1.0).unwrap();
        let f = random_field(35, 2, 2, 4, 2.0).unwrap();
        let us = navier_steady(&dec, &f).unwrap();
        let g = SpectralField::zeros_on(f.lattice(), 2);
        let fine: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
        let tr = navier_evolve(&dec, &us, &g, std::slice::from_ref(&f), &fine).unwrap();
        for s in &tr.states {
            assert!(s.sub(&us).unwrap().l2_norm() < 1e-13 * us.l2_norm());
        }
        let coarse = navier_evolve(&dec, &g, &g, std::slice::from_ref(&f), &[0.0, 2.0]).unwrap();
        let fine = navier_evolve(&dec, &g, &g, &[f], &fine).unwrap();
        assert!(coarse.states[1].sub(&fine.states[8]).unwrap().l2_norm() < 1e-12);
    }
}
