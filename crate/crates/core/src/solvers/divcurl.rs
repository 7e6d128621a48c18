use nalgebra::{Matrix3, Matrix4x3, Vector3, Vector4};
use num_complex::Complex64;

use super::{dot_h, norm_sq};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::operators::{cross, reflected};
use crate::symbols::SymbolTable;

/// Solution of `D^n u = f`, `C^n u = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivCurlSolution {
    pub u: SpectralField,
    /// Worst per-mode `|M û - [f̂; ĝ]| / |[f̂; ĝ]|`.
    pub residual: f64,
    /// See [`friedrichs_ratio`]; `None` for the zero solution.
    pub friedrichs: Option<f64>,
}

/// Residual above which data are reported as incompatible.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-10;

/// Per-mode least squares on `[(λ^{-n})ᵀ; [λ]×] û = [f̂; ĝ]` via the normal
/// equations and a Hermitian Cholesky solve.
pub fn divcurl3d(table: &SymbolTable, f: &SpectralField, g: &SpectralField) -> Result<DivCurlSolution> {
    if table.dimension() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: table.dimension(),
        });
    }
    table.check_lattice(f.lattice())?;
    table.check_lattice(g.lattice())?;
    if f.components() != 1 || g.components() != 3 {
        return Err(Error::Arity {
            expected: if f.components() != 1 { 1 } else { 3 },
            got: if f.components() != 1 {
                f.components()
            } else {
                g.components()
            },
        });
    }
    let mut failed = None;
    let zero = Complex64::new(0.0, 0.0);
    let u = f.map_modes(3, |idx, fv, out| {
        let lam = table.lambda(idx);
        let m = reflected(lam);
        let rows = Matrix4x3::new(
            m[0], m[1], m[2], zero, -lam[2], lam[1], lam[2], zero, -lam[0], -lam[1], lam[0], zero,
        );
        let gv = g.at(idx);
        let b = Vector4::new(fv[0], gv[0], gv[1], gv[2]);
        let a: Matrix3<Complex64> = rows.adjoint() * rows;
        let rhs: Vector3<Complex64> = rows.adjoint() * b;
        match a.cholesky() {
            Some(ch) => {
                let x = ch.solve(&rhs);
                for i in 0..3 {
                    out[i] = x[i];
                }
            }
            None => failed = Some(idx),
        }
    });
    if let Some(idx) = failed {
        return Err(Error::DegenerateSymbol {
            mode: f.lattice().mode(idx).to_vec(),
            magnitude: table.abs_sq(idx).sqrt(),
        });
    }

    let mut residual = 0.0f64;
    for idx in 0..f.lattice().len() {
        let (fv, gv, x) = (f.at(idx), g.at(idx), u.at(idx));
        let scale = (norm_sq(fv) + norm_sq(gv)).sqrt();
        if scale == 0.0 {
            continue;
        }
        let lam = table.lambda(idx);
        let d = -dot_h(lam, x) - fv[0];
        let c = cross(lam, x);
        let r = d.norm_sqr() + (0..3).map(|i| (c[i] - gv[i]).norm_sqr()).sum::<f64>();
        residual = residual.max(r.sqrt() / scale);
    }
    if residual > CONSISTENCY_TOLERANCE {
        return Err(Error::Incompatible(format!(
            "div-curl data are incompatible (residual {residual:.3e})"
        )));
    }
    let friedrichs = friedrichs_ratio(table, &u).ok();
    Ok(DivCurlSolution {
        u,
        residual,
        friedrichs,
    })
}

/// `(‖u‖² + ‖G u‖²) / (‖D u‖² + ‖C u‖²)`.
pub fn friedrichs_ratio(table: &SymbolTable, u: &SpectralField) -> Result<f64> {
    table.check_lattice(u.lattice())?;
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..u.lattice().len() {
        let x = u.at(idx);
        let lam = table.lambda(idx);
        let n2 = norm_sq(x);
        num += n2 + table.abs_sq(idx) * n2;
        den += dot_h(lam, x).norm_sqr() + norm_sq(&cross(lam, x));
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument("Friedrichs ratio of the zero field".into()));
    }
    Ok(num / den)
}

/// Random compatible right-hand side `(f, g) = (D u, C u)` of a random field.
pub fn compatible_data(table: &SymbolTable, u: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let f = crate::operators::divergence(table, u)?;
    let g = crate::operators::curl(table, u, crate::operators::Side::Plus)?;
    Ok((f, g))
}
