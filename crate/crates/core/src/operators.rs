//! Per-mode application of the half-ball operators, plus a physical-space
//! quadrature oracle for the defining integrals.
//!
//! Matrix-valued fields store entry `(i, j)` at component `i * d + j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::kernels::KernelSpec;
use crate::onedim::EvenKernel;
use crate::quadrature::{integrate_halfball, Orientation, QuadratureSettings};
use crate::symbols::{StarSymbol, SymbolTable};

/// Which of `λ^{n}` or `λ^{-n} = -conj(λ^n)` a curl uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

fn check_arity(u: &SpectralField, allowed: &[usize]) -> Result<()> {
    if allowed.contains(&u.components()) {
        Ok(())
    } else {
        Err(Error::Arity {
            expected: allowed[0],
            got: u.components(),
        })
    }
}

/// `λ^{-n}(ξ)` from a table built for `n`.
pub fn reflected(lambda: &[Complex64]) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (o, z) in out.iter_mut().zip(lambda) {
        *o = -z.conj();
    }
    out
}

/// Complex cross product without conjugation.
pub fn cross(a: &[Complex64], b: &[Complex64]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Nonlocal gradient: `λ û` for scalar `u`, `λ ûᵀ` for vector `u`.
pub fn gradient(table: &SymbolTable, u: &SpectralField) -> Result<SpectralField> {
    table.check_lattice(u.lattice())?;
    let d = table.dimension();
    check_arity(u, &[1, d])?;
    let c = u.components();
    Ok(u.map_modes(d * c, |idx, v, out| {
        let lam = table.lambda(idx);
        for i in 0..d {
            for j in 0..c {
                out[i * c + j] = lam[i] * v[j];
            }
        }
    }))
}

/// Adjoint divergence `(λ^{-n})ᵀ û = -conj(λ)ᵀ û` of a vector field.
pub fn divergence(table: &SymbolTable, u: &SpectralField) -> Result<SpectralField> {
    table.check_lattice(u.lattice())?;
    let d = table.dimension();
    check_arity(u, &[d])?;
    Ok(u.map_modes(1, |idx, v, out| {
        let lam = table.lambda(idx);
        out[0] = -(0..d).map(|k| lam[k].conj() * v[k]).sum::<Complex64>();
    }))
}

/// Diffusion `L = D ∘ G`, multiplication by `-|λ|²`.
pub fn diffusion(table: &SymbolTable, u: &SpectralField) -> Result<SpectralField> {
    table.check_lattice(u.lattice())?;
    let c = u.components();
    Ok(u.map_modes(c, |idx, v, out| {
        let s = -table.abs_sq(idx);
        for k in 0..c {
            out[k] = v[k] * s;
        }
    }))
}

/// Nonlocal curl `λ^{±n} × v̂` in three dimensions.
pub fn curl(table: &SymbolTable, v: &SpectralField, side: Side) -> Result<SpectralField> {
    table.check_lattice(v.lattice())?;
    if table.dimension() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: table.dimension(),
        });
    }
    check_arity(v, &[3])?;
    Ok(v.map_modes(3, |idx, x, out| {
        let lam = table.lambda(idx);
        let lam = match side {
            Side::Plus => [lam[0], lam[1], lam[2]],
            Side::Minus => reflected(lam),
        };
        out.copy_from_slice(&cross(&lam, x));
    }))
}

/// Strain `(G u + (G u)ᵀ)/2` of a vector field.
pub fn strain(table: &SymbolTable, u: &SpectralField) -> Result<SpectralField> {
    table.check_lattice(u.lattice())?;
    let d = table.dimension();
    check_arity(u, &[d])?;
    Ok(u.map_modes(d * d, |idx, v, out| {
        let lam = table.lambda(idx);
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = 0.5 * (lam[i] * v[j] + lam[j] * v[i]);
            }
        }
    }))
}

/// Trace of a matrix-valued field.
pub fn trace(m: &SpectralField) -> Result<SpectralField> {
    let d = m.dimension();
    check_arity(m, &[d * d])?;
    Ok(m.map_modes(1, |_, v, out| out[0] = (0..d).map(|k| v[k * d + k]).sum()))
}

/// Modified gradient of a scalar field, multiplication by `μ*(ξ)`.
pub fn star_gradient(star: &StarSymbol, u: &SpectralField) -> Result<SpectralField> {
    check_arity(u, &[1])?;
    let d = u.dimension();
    let lattice = u.lattice();
    Ok(u.map_modes(d, |idx, v, out| {
        let mode = lattice.mode(idx);
        let xi: Vec<f64> = mode[..d].iter().map(|k| *k as f64).collect();
        let mu = star.eval(&xi);
        for k in 0..d {
            out[k] = mu[k] * v[0];
        }
    }))
}

fn one_dimensional_multiplier(u: &SpectralField, m: impl Fn(f64) -> f64) -> Result<SpectralField> {
    if u.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: u.dimension(),
        });
    }
    let lattice = u.lattice();
    let c = u.components();
    Ok(u.map_modes(c, |idx, v, out| {
        let s = m(lattice.mode(idx)[0] as f64);
        for k in 0..c {
            out[k] = v[k] * s;
        }
    }))
}

/// Averaging `A_ε u = u/2 + (η_ε * u)/2` for a unit-mass `η_ε`.
pub fn averaging_1d(eta: &EvenKernel, u: &SpectralField) -> Result<SpectralField> {
    eta.check_unit_mass()?;
    one_dimensional_multiplier(u, |xi| eta.averaging_symbol(xi))
}

/// Bond-based diffusion `2∫ γ(|a|)(u(x+a) - u(x)) da`.
pub fn bond_diffusion_1d(gamma: &EvenKernel, u: &SpectralField) -> Result<SpectralField> {
    one_dimensional_multiplier(u, |xi| gamma.bond_symbol(xi))
}

/// Doubly nonlocal Laplacian with kernels `γ_δ` and unit-mass `η_ε`.
pub fn double_laplacian_1d(gamma: &EvenKernel, eta: &EvenKernel, u: &SpectralField) -> Result<SpectralField> {
    eta.check_unit_mass()?;
    one_dimensional_multiplier(u, |xi| crate::onedim::double_symbol(gamma, eta, xi))
}

/// Direct quadrature of
/// `G u(x) = 2∫_{H_n ∩ B_δ} w_δ(|s|) s/|s| ⊗ (u(x+s) - u(x)) ds`
/// for a pointwise-evaluable `u` with `c` components, at each point of `points`.
/// Returns `d × c` entries per point.
pub fn oracle_gradient<F>(
    kernel: &KernelSpec,
    orientation: &Orientation,
    u: F,
    components: usize,
    points: &[Vec<f64>],
    settings: QuadratureSettings,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    use rayon::prelude::*;
    let d = kernel.dimension();
    points
        .par_iter()
        .map(|x| {
            let mut ux = vec![0.0; components];
            u(x, &mut ux);
            integrate_halfball(kernel, orientation, settings, d * components, |r, e, out| {
                let y: Vec<f64> = (0..d).map(|k| x[k] + r * e[k]).collect();
                let mut uy = vec![0.0; components];
                u(&y, &mut uy);
                for i in 0..d {
                    for j in 0..components {
                        out[i * components + j] = 2.0 * e[i] * (uy[j] - ux[j]);
                    }
                }
            })
        })
        .collect()
}

/// Direct quadrature of `D u(x) = 2∫_{H_n ∩ B_δ} w_δ(|s|) s/|s| · (u(x) - u(x-s)) ds`.
pub fn oracle_divergence<F>(
    kernel: &KernelSpec,
    orientation: &Orientation,
    u: F,
    points: &[Vec<f64>],
    settings: QuadratureSettings,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    use rayon::prelude::*;
    let d = kernel.dimension();
    points
        .par_iter()
        .map(|x| {
            let mut ux = vec![0.0; d];
            u(x, &mut ux);
            let v = integrate_halfball(kernel, orientation, settings, 1, |r, e, out| {
                let y: Vec<f64> = (0..d).map(|k| x[k] - r * e[k]).collect();
                let mut uy = vec![0.0; d];
                u(&y, &mut uy);
                out[0] = 2.0 * (0..d).map(|k| e[k] * (ux[k] - uy[k])).sum::<f64>();
            })?;
            Ok(v[0])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random_field;
    use crate::kernels::KernelFamily;

    fn table(d: usize, bound: usize) -> SymbolTable {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, d, 0.3).unwrap();
        let n: Vec<f64> = (0..d).map(|i| 1.0 + i as f64).collect();
        SymbolTable::build(&k, &Orientation::new(&n).unwrap(), bound, QuadratureSettings::default()).unwrap()
    }

    #[test]
    fn adjoint_identity_is_exact() {
        for d in [2, 3] {
            let t = table(d, 3);
            for seed in 0..5 {
                let v = random_field(seed, d, 1, 3, 1.0).unwrap();
                let u = random_field(100 + seed, d, d, 3, 1.0).unwrap();
                let lhs = gradient(&t, &v).unwrap().inner(&u).unwrap();
                let rhs = -v.inner(&divergence(&t, &u).unwrap()).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn diffusion_is_divergence_of_gradient() {
        let t = table(2, 4);
        let u = random_field(3, 2, 1, 4, 0.5).unwrap();
        let a = diffusion(&t, &u).unwrap();
        let b = divergence(&t, &gradient(&t, &u).unwrap()).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() <= 1e-13 * a.l2_norm());
        let c = diffusion(&t.reflect(), &u).unwrap();
        assert!(a.sub(&c).unwrap().l2_norm() <= 1e-13 * a.l2_norm());
    }

    #[test]
    fn curl_identities() {
        let t = table(3, 2);
        let p = random_field(1, 3, 1, 2, 0.0).unwrap();
        let cg = curl(&t, &gradient(&t, &p).unwrap(), Side::Plus).unwrap();
        assert!(cg.l2_norm() < 1e-13 * p.l2_norm());
        let f = random_field(2, 3, 3, 2, 0.0).unwrap();
        let lhs = curl(&t, &curl(&t, &f, Side::Plus).unwrap(), Side::Minus).unwrap();
        let gd = gradient(&t, &divergence(&t, &f).unwrap()).unwrap();
        let rhs = gd.sub(&diffusion(&t, &f).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * rhs.l2_norm());
    }

    #[test]
    fn strain_is_symmetric_with_reflected_trace() {
        let t = table(2, 3);
        let u = random_field(9, 2, 2, 3, 0.0).unwrap();
        let e = strain(&t, &u).unwrap();
        for idx in 0..e.lattice().len() {
            let v = e.at(idx);
            assert_eq!(v[1], v[2]);
        }
        let tr = trace(&strain(&t.reflect(), &u).unwrap()).unwrap();
        let div = divergence(&t, &u).unwrap();
        assert!(tr.sub(&div).unwrap().l2_norm() <= 1e-13 * div.l2_norm());
    }

    #[test]
    fn arity_and_truncation_are_checked() {
        let t = table(2, 3);
        assert!(matches!(
            gradient(&t, &random_field(1, 2, 1, 4, 0.0).unwrap()),
            Err(Error::TruncationMismatch { .. })
        ));
        assert!(matches!(
            divergence(&t, &random_field(1, 2, 1, 3, 0.0).unwrap()),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn oracle_reproduces_affine_gradient() {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.2 }, 2, 0.4).unwrap();
        let n = Orientation::from_angle(0.9);
        let a = [[1.0, 2.0], [-3.0, 0.5]];
        let u = |x: &[f64], out: &mut [f64]| {
            out[0] = a[0][0] * x[0] + a[0][1] * x[1] + 4.0;
            out[1] = a[1][0] * x[0] + a[1][1] * x[1] - 1.0;
        };
        let g = oracle_gradient(&k, &n, u, 2, &[vec![0.3, -0.2]], QuadratureSettings::default()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[0][i * 2 + j] - a[j][i]).abs() < 1e-10);
            }
        }
    }
}
