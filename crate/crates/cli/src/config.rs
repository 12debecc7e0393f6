//! Run configuration: one JSON file per subcommand invocation, every field
//! defaulted, unknown fields rejected. The parsed form is re-serialized with
//! scheduling-only fields cleared and hashed, and that hash is embedded in
//! every output name and sidecar, so a result file always says what produced
//! it. Worker counts are scheduling, not mathematics: they are excluded from
//! the hash and must never change a single output byte.

use nilspec::analytic::{AnalyticFn, AnalyticTerm, MAX_POLY_EXP};
use nilspec::normharness::NormQuad;
use nilspec::poly::Poly;
use nilspec::projector::QuadratureParams;
use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Hex digits of the config hash carried in output file names.
pub const SHORT_HASH_LEN: usize = 12;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// The serde message already names the offending field or token and the
    /// line/column it sits at.
    #[error("config error: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Field { field: String, message: String },
}

pub fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.to_string(), message: message.into() }
}

/// Read and parse a config file; absent path means the embedded defaults.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, ConfigError> {
    let Some(p) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(p)
        .map_err(|e| ConfigError::Io { path: p.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// A per-subcommand configuration: hashable after clearing the fields that
/// only steer scheduling.
pub trait RunConfig: Serialize + Clone {
    /// Copy with scheduling-only fields cleared; this is what gets hashed.
    fn canonical(&self) -> Self;
    /// The worker count requested by the file (0 = library default).
    fn workers(&self) -> usize;
}

/// Full sha256 hex of the canonicalized config.
pub fn config_hash<T: RunConfig>(cfg: &T) -> String {
    let canon = cfg.canonical();
    let bytes = serde_json::to_vec(&canon).expect("config serializes");
    let mut h = Sha256::new();
    h.update(&bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn short_hash(full: &str) -> &str {
    &full[..SHORT_HASH_LEN]
}

// --- input functions -------------------------------------------------------------

/// One Gaussian-polynomial summand, the JSON face of the analytic family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermSpec {
    /// Complex coefficient as [re, im].
    pub coeff: [f64; 2],
    pub width_x: f64,
    pub width_z: f64,
    pub center_x: [f64; 3],
    pub center_z: [f64; 3],
    /// Monomials of the first-layer polynomial factor; empty means the
    /// constant 1.
    pub xpoly: Vec<PolyTermSpec>,
}

impl Default for TermSpec {
    fn default() -> Self {
        TermSpec {
            coeff: [1.0, 0.0],
            width_x: 1.0,
            width_z: 1.0,
            center_x: [0.0; 3],
            center_z: [0.0; 3],
            xpoly: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermSpec {
    /// Per-axis exponents of the monomial in x - center_x.
    pub exps: [u8; 3],
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Identity,
    Tensor,
}

/// Input function selector: a plain Gaussian, a seeded slice of a built-in
/// corpus (members merged into one function), or explicit terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Gaussian { width_x: f64, width_z: f64 },
    Corpus { kind: CorpusKind, seed: u64, count: usize },
    Terms(Vec<TermSpec>),
}

impl Default for FunctionSpec {
    fn default() -> Self {
        FunctionSpec::Gaussian { width_x: 1.0, width_z: 1.0 }
    }
}

impl FunctionSpec {
    pub fn resolve(&self) -> Result<AnalyticFn, ConfigError> {
        match self {
            FunctionSpec::Gaussian { width_x, width_z } => {
                check_width("function.width_x", *width_x)?;
                check_width("function.width_z", *width_z)?;
                Ok(AnalyticFn::single(AnalyticTerm::gaussian(
                    C64::new(1.0, 0.0),
                    *width_x,
                    *width_z,
                )))
            }
            FunctionSpec::Corpus { kind, seed, count } => {
                if *count == 0 || *count > 64 {
                    return Err(field_err("function.count", "must be in 1..=64"));
                }
                let members = match kind {
                    CorpusKind::Identity => nilspec::analytic::identity_corpus(*seed, *count),
                    CorpusKind::Tensor => nilspec::analytic::tensor_corpus(*seed, *count),
                };
                let terms = members.into_iter().flat_map(|f| f.terms).collect::<Vec<_>>();
                Ok(AnalyticFn { terms })
            }
            FunctionSpec::Terms(specs) => {
                if specs.is_empty() {
                    return Err(field_err("function.terms", "must not be empty"));
                }
                let mut terms = Vec::with_capacity(specs.len());
                for (i, t) in specs.iter().enumerate() {
                    check_width(&format!("function.terms[{i}].width_x"), t.width_x)?;
                    check_width(&format!("function.terms[{i}].width_z"), t.width_z)?;
                    if !t.coeff.iter().all(|c| c.is_finite()) {
                        return Err(field_err(
                            &format!("function.terms[{i}].coeff"),
                            "must be finite",
                        ));
                    }
                    let mut poly = if t.xpoly.is_empty() { Poly::one() } else { Poly::zero() };
                    for (j, m) in t.xpoly.iter().enumerate() {
                        if m.exps.iter().any(|&e| e > MAX_POLY_EXP) {
                            return Err(field_err(
                                &format!("function.terms[{i}].xpoly[{j}].exps"),
                                format!("exponents are capped at {MAX_POLY_EXP} per axis"),
                            ));
                        }
                        if !m.coeff.iter().all(|c| c.is_finite()) {
                            return Err(field_err(
                                &format!("function.terms[{i}].xpoly[{j}].coeff"),
                                "must be finite",
                            ));
                        }
                        poly.add_term(m.exps, C64::new(m.coeff[0], m.coeff[1]));
                    }
                    terms.push(AnalyticTerm {
                        coeff: C64::new(t.coeff[0], t.coeff[1]),
                        xpoly: poly,
                        width_x: t.width_x,
                        width_z: t.width_z,
                        center_x: t.center_x,
                        center_z: t.center_z,
                    });
                }
                Ok(AnalyticFn { terms })
            }
        }
    }
}

fn check_width(field: &str, w: f64) -> Result<(), ConfigError> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(field_err(field, "must be a positive finite width"))
    }
}

/// Evaluation point given as first-layer and central coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub x: [f64; 3],
    pub z: [f64; 3],
}

pub fn resolve_points(points: &Option<Vec<PointSpec>>) -> Vec<nilspec::nilgeom::GroupPoint> {
    match points {
        None => nilspec::projector::default_eval_points(),
        Some(list) => list
            .iter()
            .map(|p| nilspec::nilgeom::GroupPoint { x: p.x, z: p.z })
            .collect(),
    }
}

// --- per-subcommand configs --------------------------------------------------------

macro_rules! run_config {
    ($ty:ty) => {
        impl RunConfig for $ty {
            fn canonical(&self) -> Self {
                let mut c = self.clone();
                c.workers = 0;
                c
            }
            fn workers(&self) -> usize {
                self.workers
            }
        }
    };
}

/// The invariant suite. `only` restricts to the named checks, in registry
/// order; the seed feeds every random corpus the checks draw.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub seed: u64,
    pub workers: usize,
    pub only: Vec<String>,
    /// Members per analytic corpus draw.
    pub corpus_count: usize,
    /// Discrete oracle grid side; the eigensolve is O(n^6), keep it modest.
    pub oracle_n: usize,
    pub params: QuadratureParams,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            seed: 17,
            workers: 0,
            only: Vec::new(),
            corpus_count: 4,
            oracle_n: 32,
            params: QuadratureParams::default(),
        }
    }
}
run_config!(ValidateConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub function: FunctionSpec,
    pub mu: f64,
    /// In-plane frame angle; outputs must not depend on it.
    pub gauge: f64,
    pub params: QuadratureParams,
    /// Omitted means the built-in evaluation set; empty means a header-only
    /// slice.
    pub points: Option<Vec<PointSpec>>,
    pub workers: usize,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            function: FunctionSpec::default(),
            mu: 1.0,
            gauge: 0.0,
            params: QuadratureParams::default(),
            points: None,
            workers: 0,
        }
    }
}
run_config!(ProjectConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    pub function: FunctionSpec,
    pub params: QuadratureParams,
    pub points: Option<Vec<PointSpec>>,
    /// Also run with a doubled mu grid and report both errors.
    pub refine: bool,
    pub workers: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig {
            function: FunctionSpec::default(),
            params: QuadratureParams::default(),
            points: None,
            refine: false,
            workers: 0,
        }
    }
}
run_config!(ReconstructConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepMuConfig {
    pub function: FunctionSpec,
    /// At least four scales spanning a factor of sixteen.
    pub mus: Vec<f64>,
    pub s: f64,
    pub p: f64,
    pub params: QuadratureParams,
    pub quad: NormQuad,
    pub workers: usize,
}

impl Default for SweepMuConfig {
    fn default() -> Self {
        SweepMuConfig {
            function: FunctionSpec::default(),
            mus: vec![0.25, 1.0, 4.0, 16.0],
            s: 1.2,
            p: 2.0,
            params: QuadratureParams {
                n_theta: 10,
                n_phi: 20,
                n_xi: 17,
                k_max: None,
                n_mu: 8,
                mu_max: None,
            },
            quad: NormQuad { n_radial: 12, n_polar: 6, ..NormQuad::default() },
            workers: 0,
        }
    }
}
run_config!(SweepMuConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepKrConfig {
    pub lambda: f64,
    pub k_values: Vec<usize>,
    pub p_values: Vec<f64>,
    /// Plane grid side, a power of two >= 32.
    pub grid_n: usize,
    /// Omitted means the half width is derived from lambda and the largest k.
    pub half_width: Option<f64>,
    pub engine: String,
    pub seed: u64,
    pub family_count: usize,
    pub workers: usize,
}

impl Default for SweepKrConfig {
    fn default() -> Self {
        SweepKrConfig {
            lambda: 1.0,
            k_values: (0..=8).collect(),
            p_values: vec![1.0, 1.2, 2.0],
            grid_n: 64,
            half_width: None,
            engine: "factored".to_string(),
            seed: 23,
            family_count: 5,
            workers: 0,
        }
    }
}
run_config!(SweepKrConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepTsConfig {
    /// The function whose first-layer restriction is probed.
    pub function: FunctionSpec,
    pub s_values: Vec<f64>,
    pub r_values: Vec<f64>,
    /// Radius whose ratio serves as the fitted constant.
    pub reference_r: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub quad: NormQuad,
    pub workers: usize,
}

impl Default for SweepTsConfig {
    fn default() -> Self {
        SweepTsConfig {
            function: FunctionSpec::default(),
            s_values: vec![1.0, 1.2, 4.0 / 3.0],
            r_values: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            reference_r: 1.0,
            n_theta: 8,
            n_phi: 16,
            quad: NormQuad::default(),
            workers: 0,
        }
    }
}
run_config!(SweepTsConfig);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub lambda: f64,
    pub n: usize,
    pub scheme: String,
    /// Omitted means the derived box for this lambda.
    pub half_width: Option<f64>,
    pub k_upto: usize,
    /// Also compare dense eigenspace projections against the kernel path on
    /// a seeded corpus of this size.
    pub corpus_count: usize,
    pub seed: u64,
    /// Write the discretized operator in the binary dump format.
    pub dump_matrix: bool,
    pub workers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            lambda: 1.0,
            n: 32,
            scheme: "spectral".to_string(),
            half_width: None,
            k_upto: 4,
            corpus_count: 5,
            seed: 23,
            dump_matrix: false,
            workers: 0,
        }
    }
}
run_config!(OracleConfig);

/// Everything `defaults` prints: the embedded default config per subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct AllDefaults {
    pub validate: ValidateConfig,
    pub project: ProjectConfig,
    pub reconstruct: ReconstructConfig,
    #[serde(rename = "sweep-mu")]
    pub sweep_mu: SweepMuConfig,
    #[serde(rename = "sweep-kr")]
    pub sweep_kr: SweepKrConfig,
    #[serde(rename = "sweep-ts")]
    pub sweep_ts: SweepTsConfig,
    pub oracle: OracleConfig,
}

impl Default for AllDefaults {
    fn default() -> Self {
        AllDefaults {
            validate: ValidateConfig::default(),
            project: ProjectConfig::default(),
            reconstruct: ReconstructConfig::default(),
            sweep_mu: SweepMuConfig::default(),
            sweep_kr: SweepKrConfig::default(),
            sweep_ts: SweepTsConfig::default(),
            oracle: OracleConfig::default(),
        }
    }
}
