pub mod convergence;
pub mod divcurl;
pub mod energy1d;
pub mod helmholtz;
pub mod navier;
pub mod oracle;
pub mod stokes;
pub mod symbols;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use halfball_core::{random_field, KernelSpec, Orientation, SpectralField, SymbolTable};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Default horizon when a config gives no δ list.
pub const DEFAULT_DELTA: f64 = 0.1;

pub(crate) fn deltas_or_default(config: &ExperimentConfig) -> Vec<f64> {
    if config.deltas.is_empty() {
        vec![DEFAULT_DELTA]
    } else {
        config.deltas.clone()
    }
}

pub(crate) fn need_deltas(config: &ExperimentConfig, at_least: usize) -> Result<Vec<f64>, CliError> {
    if config.deltas.len() < at_least {
        return Err(CliError::Config(format!(
            "this experiment needs at least {at_least} δ values, got {}",
            config.deltas.len()
        )));
    }
    Ok(config.deltas.clone())
}

fn cache_path(config: &ExperimentConfig, kernel: &KernelSpec, n: &Orientation, bound: usize) -> Option<PathBuf> {
    let dir = config.output.cache_dir.as_ref()?;
    let key = format!(
        "{}|{:?}|{}|{:?}|{}|{:e}|{}",
        kernel.family().name(),
        kernel.family().beta(),
        kernel.dimension(),
        n.as_slice(),
        bound,
        kernel.horizon(),
        config.quad.tol
    );
    let digest = Sha256::digest(key.as_bytes());
    let short: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    Some(PathBuf::from(dir).join(format!(
        "{}-d{}-N{bound}-{short}.txt",
        kernel.family().name(),
        kernel.dimension()
    )))
}

/// Builds (or loads from the configured cache) the symbol table.
pub(crate) fn symbol_table(
    config: &ExperimentConfig,
    kernel: &KernelSpec,
    n: &Orientation,
    bound: usize,
) -> Result<SymbolTable, CliError> {
    let path = cache_path(config, kernel, n, bound);
    if let Some(p) = &path {
        if let Ok(f) = File::open(p) {
            if let Ok(t) = SymbolTable::read_cache(BufReader::new(f)) {
                if t.matches(kernel, n, bound, config.quad.tol) {
                    log::debug!("symbol cache hit {}", p.display());
                    return Ok(t);
                }
            }
        }
    }
    let table = SymbolTable::build(kernel, n, bound, config.settings())?;
    if let Some(p) = &path {
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        table.write_cache(BufWriter::new(File::create(p)?))?;
    }
    Ok(table)
}

/// Real random field with `components` entries, seeded from the config seed
/// and a per-use `salt`.
pub(crate) fn field(
    config: &ExperimentConfig,
    salt: u64,
    dimension: usize,
    components: usize,
    bound: usize,
) -> Result<SpectralField, CliError> {
    let seed = config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt);
    Ok(random_field(seed, dimension, components, bound, config.decay)?)
}

/// `(max - min) / max` of positive values.
pub(crate) fn variation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / max
}
