//! JSON experiment configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use halfball_core::{KernelFamily, KernelSpec, Orientation, QuadratureSettings};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

fn two() -> usize {
    2
}

fn eight() -> usize {
    8
}

fn three() -> f64 {
    3.0
}

fn five() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: "constant".into(),
            beta: None,
        }
    }
}

impl KernelConfig {
    pub fn family(&self) -> Result<KernelFamily, CliError> {
        match (self.family.as_str(), self.beta) {
            ("constant", None) => Ok(KernelFamily::Constant),
            ("sine", None) => Ok(KernelFamily::SineExample),
            ("fractional", Some(beta)) => Ok(KernelFamily::Fractional { beta }),
            ("fractional", None) => Err(CliError::Config("fractional kernel needs `beta`".into())),
            (f @ ("constant" | "sine"), Some(_)) => Err(CliError::Config(format!("`beta` is not a parameter of {f}"))),
            (other, _) => Err(CliError::Config(format!("unknown kernel family `{other}`"))),
        }
    }

    pub fn build(&self, dimension: usize, delta: f64) -> Result<KernelSpec, CliError> {
        KernelSpec::normalize(self.family()?, dimension, delta).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn label(&self) -> String {
        match self.beta {
            Some(b) => format!("{}({b})", self.family),
            None => self.family.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub tol: f64,
    pub panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let s = QuadratureSettings::default();
        QuadConfig {
            tol: s.tol,
            panels: s.panels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub end: f64,
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { end: 1.0, steps: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub dimension: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Symbol tables are read from / written to this directory when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub kernel: KernelConfig,
    /// Sweeps use this list instead of `kernel` when non-empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernels: Vec<KernelConfig>,
    #[serde(default = "two")]
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<f64>>,
    /// `k` equally spaced 2D orientations `2πj/k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default = "eight")]
    pub bound: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<CaseConfig>,
    /// `(μ, λ)` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lame: Vec<[f64; 2]>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub seed: u64,
    /// Spectral decay exponent `s` of random fields.
    #[serde(default = "three")]
    pub decay: f64,
    #[serde(default = "five")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
    #[serde(default)]
    pub forced: bool,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies `KEY=VAL` tolerance overrides.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let (key, val) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{spec}` is not KEY=VAL")))?;
        let bad = |e: String| CliError::Config(format!("override {key}: {e}"));
        match key.trim() {
            "quad.tol" => {
                self.quad.tol = val
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?
            }
            "quad.panels" => {
                self.quad.panels = val
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            other => return Err(CliError::Config(format!("unknown override key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self, subcommand: &str) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        if let Some(e) = &self.experiment {
            if e != subcommand {
                return err(format!("config is for `{e}`, not `{subcommand}`"));
            }
        }
        if !(1..=3).contains(&self.dimension) {
            return err(format!("dimension must be 1, 2 or 3, got {}", self.dimension));
        }
        if self.bound < 2 {
            return err(format!("lattice bound N must be at least 2, got {}", self.bound));
        }
        for c in &self.cases {
            if !(1..=3).contains(&c.dimension) || c.bound < 2 {
                return err(format!("invalid case {c:?}"));
            }
        }
        if self.deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return err("δ values must be positive".into());
        }
        if self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return err("δ list must be strictly decreasing".into());
        }
        for k in self.kernel_list() {
            k.family()?;
        }
        for [mu, lame] in &self.lame {
            if !(*mu > 0.0 && lame + 2.0 * mu > 0.0) {
                return err(format!("Lamé pair (μ={mu}, λ={lame}) needs μ > 0 and λ + 2μ > 0"));
            }
        }
        if !(self.quad.tol > 0.0 && self.quad.tol < 1.0) || self.quad.panels == 0 {
            return err(format!("invalid quadrature settings {:?}", self.quad));
        }
        if !(self.time.end > 0.0 && self.time.end.is_finite()) || self.time.steps == 0 {
            return err(format!("invalid time grid {:?}", self.time));
        }
        if !(self.decay.is_finite() && self.decay >= 0.0) {
            return err(format!("decay must be non-negative, got {}", self.decay));
        }
        if let Some(n) = &self.orientation {
            if n.len() != self.dimension {
                return err(format!(
                    "orientation has {} entries for dimension {}",
                    n.len(),
                    self.dimension
                ));
            }
            Orientation::new(n).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(k) = self.angles {
            if k == 0 || self.dimension != 2 {
                return err("`angles` needs dimension 2 and at least one angle".into());
            }
        }
        if let Some(dir) = &self.output.dir {
            let p = Path::new(dir);
            if p.exists() && !p.is_dir() {
                return err(format!("output path {dir} exists and is not a directory"));
            }
        }
        Ok(())
    }

    pub fn kernel_list(&self) -> Vec<KernelConfig> {
        if self.kernels.is_empty() {
            vec![self.kernel.clone()]
        } else {
            self.kernels.clone()
        }
    }

    pub fn settings(&self) -> QuadratureSettings {
        QuadratureSettings {
            tol: self.quad.tol,
            panels: self.quad.panels,
        }
    }

    /// Orientations for `dimension`, with their angle labels in 2D.
    pub fn orientations(&self, dimension: usize) -> Vec<(String, Orientation)> {
        if dimension == 2 {
            if let Some(k) = self.angles {
                return (0..k)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / k as f64;
                        (format!("{t:.6}"), Orientation::from_angle(t))
                    })
                    .collect();
            }
        }
        let v = match &self.orientation {
            Some(v) if v.len() == dimension => v.clone(),
            _ => match dimension {
                1 => vec![1.0],
                2 => vec![0.3f64.cos(), 0.3f64.sin()],
                _ => vec![0.3, 0.2, 1.0],
            },
        };
        let label = v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
        vec![(label, Orientation::new(&v).expect("validated orientation"))]
    }

    pub fn orientation(&self, dimension: usize) -> Orientation {
        self.orientations(dimension)[0].1
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.time.steps;
        (0..=n).map(|k| self.time.end * k as f64 / n as f64).collect()
    }

    pub fn cases(&self) -> Vec<CaseConfig> {
        if self.cases.is_empty() {
            vec![CaseConfig {
                dimension: self.dimension,
                bound: self.bound,
            }]
        } else {
            self.cases.clone()
        }
    }

    pub fn lame_pairs(&self) -> Vec<[f64; 2]> {
        if self.lame.is_empty() {
            vec![[1.0, 1.0]]
        } else {
            self.lame.clone()
        }
    }

    pub fn wants(&self, check: &str, default_all: bool) -> bool {
        if self.checks.is_empty() {
            default_all
        } else {
            self.checks.iter().any(|c| c == check)
        }
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = ExperimentConfig::from_json(r#"{"deltas": [0.2, 0.1]}"#).unwrap();
        assert_eq!(c.dimension, 2);
        assert_eq!(c.bound, 8);
        c.validate("stokes").unwrap();
        let bad = ExperimentConfig::from_json(r#"{"deltas": [0.1, 0.2]}"#).unwrap();
        assert!(bad.validate("stokes").is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let small = ExperimentConfig::from_json(r#"{"bound": 1}"#).unwrap();
        assert!(small.validate("stokes").is_err());
        let wrong = ExperimentConfig::from_json(r#"{"experiment": "navier"}"#).unwrap();
        assert!(wrong.validate("stokes").is_err());
    }

    #[test]
    fn overrides_and_hash() {
        let mut c = ExperimentConfig::from_json("{}").unwrap();
        let h0 = c.hash();
        c.apply_override("quad.tol=1e-8").unwrap();
        assert_eq!(c.quad.tol, 1e-8);
        assert_ne!(c.hash(), h0);
        assert!(c.apply_override("quad.nope=1").is_err());
        assert!(c.apply_override("quad.panels=x").is_err());
    }

    #[test]
    fn kernel_families() {
        let k = KernelConfig {
            family: "fractional".into(),
            beta: Some(1.5),
        };
        assert!(k.build(2, 0.1).is_ok());
        let k = KernelConfig {
            family: "fractional".into(),
            beta: None,
        };
        assert!(k.family().is_err());
        let angles = ExperimentConfig::from_json(r#"{"angles": 8}"#).unwrap();
        assert_eq!(angles.orientations(2).len(), 8);
    }
}
