use num_complex::Complex64;

use super::{dot_h, norm_sq};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::operators::{cross, reflected};
use crate::symbols::SymbolTable;

/// `u = G^n p + J G^{-n} q` with `J = [[0,-1],[1,0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Helmholtz2d {
    pub p: SpectralField,
    pub q: SpectralField,
    /// Worst per-mode `|λ p̂ + J λ^{-n} q̂ - û| / |û|`.
    pub reconstruction: f64,
    /// `(‖p‖_S + ‖q‖_S) / ‖u‖`.
    pub stability: f64,
}

/// `u = G^n p + C^{-n} v` with gauge `D^{-n} v = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Helmholtz3d {
    pub p: SpectralField,
    pub v: SpectralField,
    pub reconstruction: f64,
    /// Worst per-mode `|λᵀ v̂| / |û|`.
    pub gauge: f64,
    /// `(‖p‖_S + ‖v‖_S) / ‖u‖`.
    pub stability: f64,
}

fn check(table: &SymbolTable, u: &SpectralField, d: usize) -> Result<()> {
    if table.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: table.dimension(),
        });
    }
    table.check_lattice(u.lattice())?;
    if u.components() != d {
        return Err(Error::Arity {
            expected: d,
            got: u.components(),
        });
    }
    Ok(())
}

fn stability(table: &SymbolTable, u: &SpectralField, parts: [&SpectralField; 2]) -> f64 {
    let s: f64 = parts.iter().map(|f| f.weighted_norm(|i| table.abs_sq(i))).sum();
    s / u.l2_norm().max(f64::MIN_POSITIVE)
}

pub fn helmholtz2d(table: &SymbolTable, u: &SpectralField) -> Result<Helmholtz2d> {
    check(table, u, 2)?;
    let p = u.map_modes(1, |idx, v, out| {
        out[0] = dot_h(table.lambda(idx), v) / table.abs_sq(idx)
    });
    let q = u.map_modes(1, |idx, v, out| {
        let lam = table.lambda(idx);
        out[0] = (lam[1] * v[0] - lam[0] * v[1]) / table.abs_sq(idx);
    });
    let mut worst = 0.0f64;
    for idx in 0..u.lattice().len() {
        let v = u.at(idx);
        let scale = norm_sq(v).sqrt();
        if scale == 0.0 {
            continue;
        }
        let lam = table.lambda(idx);
        let m = reflected(lam);
        let (pp, qq) = (p.at(idx)[0], q.at(idx)[0]);
        let r0 = lam[0] * pp - m[1] * qq - v[0];
        let r1 = lam[1] * pp + m[0] * qq - v[1];
        worst = worst.max((r0.norm_sqr() + r1.norm_sqr()).sqrt() / scale);
    }
    let stability = stability(table, u, [&p, &q]);
    Ok(Helmholtz2d {
        p,
        q,
        reconstruction: worst,
        stability,
    })
}

pub fn helmholtz3d(table: &SymbolTable, u: &SpectralField) -> Result<Helmholtz3d> {
    check(table, u, 3)?;
    let p = u.map_modes(1, |idx, v, out| {
        out[0] = dot_h(table.lambda(idx), v) / table.abs_sq(idx)
    });
    let v = u.map_modes(3, |idx, x, out| {
        let k = table.abs_sq(idx);
        for (o, c) in out.iter_mut().zip(cross(table.lambda(idx), x)) {
            *o = c / k;
        }
    });
    let (mut rec, mut gauge) = (0.0f64, 0.0f64);
    for idx in 0..u.lattice().len() {
        let x = u.at(idx);
        let scale = norm_sq(x).sqrt();
        if scale == 0.0 {
            continue;
        }
        let lam = table.lambda(idx);
        let pp = p.at(idx)[0];
        let vv = v.at(idx);
        let c = cross(&reflected(lam), vv);
        let r: f64 = (0..3)
            .map(|i| (lam[i] * pp + c[i] - x[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        rec = rec.max(r / scale);
        let g: Complex64 = (0..3).map(|i| lam[i] * vv[i]).sum();
        gauge = gauge.max(g.norm() / scale);
    }
    let stability = stability(table, u, [&p, &v]);
    Ok(Helmholtz3d {
        p,
        v,
        reconstruction: rec,
        gauge,
        stability,
    })
}
