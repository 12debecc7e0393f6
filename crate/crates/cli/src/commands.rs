//! One function per subcommand. Each takes its resolved config and an output
//! directory, writes the report files named by the config hash, prints a
//! short summary to stdout, and returns an error only for the cases the exit
//! code contract distinguishes: config problems and refused computations exit
//! 2, failed checks exit 1.
//!
//! Reports are deterministic byte for byte: no timestamps, floats pinned to
//! one format, rows in a fixed order, and the worker count excluded from the
//! config hash.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nilspec::normharness::{
    mu_exponent_fit, tomas_stein_sweep, fit_log_log, MixedNormParams, NormQuad,
};
use nilspec::oracle::{
    cluster_medians, compare_lambda_projection, discretize_twisted, dump_matrix,
    eigenvalue_clusters, eigensystem, oracle_half_width, reliability, scheme, OracleError,
};
use nilspec::projector::{project_mu, project_mu_with_gauge, reconstruct, QuadratureSpec};
use nilspec::quadrature::sphere_rule;
use nilspec::twisted::{box_half_width, engines, gamma_exponent, kr_ratio_probe, Grid2};

use crate::checks::{self, CheckReport, CheckStatus};
use crate::config::{
    config_hash, field_err, resolve_points, short_hash, AllDefaults, ConfigError, OracleConfig,
    ProjectConfig, ReconstructConfig, SweepKrConfig, SweepMuConfig, SweepTsConfig, ValidateConfig,
};
use crate::report::{csv_writer, float_field, write_json, write_slice_csv};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(io::Error),
    /// A computation the library refused to attempt or finish; the config
    /// asked for something the numerics cannot honor.
    Compute(String),
    /// Checks ran to completion and some failed.
    ChecksFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Compute(m) => write!(f, "compute error: {m}"),
            CliError::ChecksFailed { failed } => write!(f, "{failed} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn compute<E: fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn out_file(out: &Path, stem: &str, hash: &str, ext: &str) -> PathBuf {
    out.join(format!("{stem}_{hash}.{ext}"))
}

// --- validate -------------------------------------------------------------------------

#[derive(Serialize)]
struct ValidateSummary<'a> {
    config_sha256: &'a str,
    passed: usize,
    failed: usize,
    skipped: usize,
    checks: &'a [CheckReport],
}

pub fn cmd_validate(cfg: &ValidateConfig, out: &Path) -> Result<(), CliError> {
    let selected = checks::select(&cfg.only)
        .map_err(|m| ConfigError::Field { field: "only".into(), message: m })?;
    let hash = config_hash(cfg);
    let short = short_hash(&hash);

    let reports: Vec<CheckReport> = selected.iter().map(|c| c.report(cfg)).collect();
    let mut passed = 0;
    let mut failed = 0;
    let mut skipped = 0;
    for r in &reports {
        match r.status {
            CheckStatus::Pass => {
                passed += 1;
                println!(
                    "PASS  {:<24}  {} <= {}",
                    r.id,
                    float_field(r.residual.unwrap_or(0.0)),
                    float_field(r.tolerance)
                );
            }
            CheckStatus::Fail => {
                failed += 1;
                match r.residual {
                    Some(res) => println!(
                        "FAIL  {:<24}  {} > {}  {}",
                        r.id,
                        float_field(res),
                        float_field(r.tolerance),
                        r.detail
                    ),
                    None => println!("FAIL  {:<24}  {}", r.id, r.detail),
                }
            }
            CheckStatus::Skipped => {
                skipped += 1;
                println!("SKIP  {:<24}  {}", r.id, r.detail);
            }
        }
    }
    println!(
        "{} of {} passed, {} failed, {} skipped  (config {})",
        passed,
        reports.len(),
        failed,
        skipped,
        short
    );

    let mut w = csv_writer(&out_file(out, "validate_report", &short, "csv"))?;
    w.write_record(["id", "status", "residual", "tolerance", "detail"])
        .map_err(compute)?;
    for r in &reports {
        let status = match r.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        };
        w.write_record([
            r.id.to_string(),
            status.to_string(),
            r.residual.map(float_field).unwrap_or_default(),
            float_field(r.tolerance),
            r.detail.clone(),
        ])
        .map_err(compute)?;
    }
    w.flush()?;

    write_json(
        &out_file(out, "validate_report", &short, "json"),
        &ValidateSummary { config_sha256: &hash, passed, failed, skipped, checks: &reports },
    )?;

    if failed > 0 {
        return Err(CliError::ChecksFailed { failed });
    }
    Ok(())
}

// --- project --------------------------------------------------------------------------

#[derive(Serialize)]
struct ProjectSummary<'a> {
    config_sha256: &'a str,
    mu: f64,
    gauge: f64,
    k_max: usize,
    point_count: usize,
    params: &'a nilspec::projector::QuadratureParams,
}

pub fn cmd_project(cfg: &ProjectConfig, out: &Path) -> Result<(), CliError> {
    let f = cfg.function.resolve()?;
    let points = resolve_points(&cfg.points);
    if !cfg.mu.is_finite() || cfg.mu <= 0.0 {
        return Err(field_err("mu", "must be finite and positive").into());
    }
    let spec = QuadratureSpec::for_fn(cfg.params.clone(), &f);
    let slice = if cfg.gauge == 0.0 {
        project_mu(&f, cfg.mu, &spec, &points).map_err(compute)?
    } else {
        project_mu_with_gauge(&f, cfg.mu, &spec, &points, cfg.gauge).map_err(compute)?
    };

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    write_slice_csv(&out_file(out, "slice", &short, "csv"), &slice)?;
    write_json(
        &out_file(out, "slice", &short, "json"),
        &ProjectSummary {
            config_sha256: &hash,
            mu: cfg.mu,
            gauge: cfg.gauge,
            k_max: spec.k_max,
            point_count: points.len(),
            params: &spec.params,
        },
    )?;
    println!(
        "projected mu {} at {} points, k through {}  (config {})",
        cfg.mu,
        points.len(),
        spec.k_max,
        short
    );
    Ok(())
}

// --- reconstruct ----------------------------------------------------------------------

#[derive(Serialize)]
struct ReconstructSummary<'a> {
    config_sha256: &'a str,
    point_count: usize,
    n_mu: usize,
    k_max: usize,
    rel_err: f64,
    refined_n_mu: Option<usize>,
    refined_rel_err: Option<f64>,
}

fn rel_l2(got: &[C64], want: &[C64]) -> f64 {
    let num: f64 = got.iter().zip(want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = want.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

pub fn cmd_reconstruct(cfg: &ReconstructConfig, out: &Path) -> Result<(), CliError> {
    let f = cfg.function.resolve()?;
    let points = resolve_points(&cfg.points);
    let spec = QuadratureSpec::for_fn(cfg.params.clone(), &f);
    let got = reconstruct(&f, &spec, &points).map_err(compute)?;
    let want: Vec<C64> = points.iter().map(|p| f.eval(p)).collect();
    let rel_err = rel_l2(&got, &want);

    let mut refined_n_mu = None;
    let mut refined_rel_err = None;
    if cfg.refine {
        let mut params = cfg.params.clone();
        params.n_mu *= 2;
        let fine_spec = QuadratureSpec::for_fn(params, &f);
        let fine = reconstruct(&f, &fine_spec, &points).map_err(compute)?;
        refined_n_mu = Some(fine_spec.params.n_mu);
        refined_rel_err = Some(rel_l2(&fine, &want));
    }

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    let mut w = csv_writer(&out_file(out, "reconstruct", &short, "csv"))?;
    w.write_record([
        "index", "x1", "x2", "x3", "z1", "z2", "z3", "re", "im", "target_re", "target_im",
    ])
    .map_err(compute)?;
    for (i, p) in points.iter().enumerate() {
        w.write_record([
            i.to_string(),
            float_field(p.x[0]),
            float_field(p.x[1]),
            float_field(p.x[2]),
            float_field(p.z[0]),
            float_field(p.z[1]),
            float_field(p.z[2]),
            float_field(got[i].re),
            float_field(got[i].im),
            float_field(want[i].re),
            float_field(want[i].im),
        ])
        .map_err(compute)?;
    }
    w.flush()?;

    write_json(
        &out_file(out, "reconstruct", &short, "json"),
        &ReconstructSummary {
            config_sha256: &hash,
            point_count: points.len(),
            n_mu: spec.params.n_mu,
            k_max: spec.k_max,
            rel_err,
            refined_n_mu,
            refined_rel_err,
        },
    )?;
    match refined_rel_err {
        Some(fine) => println!(
            "reconstruction error {} -> {} after refinement  (config {})",
            float_field(rel_err),
            float_field(fine),
            short
        ),
        None => println!("reconstruction error {}  (config {})", float_field(rel_err), short),
    }
    Ok(())
}

// --- sweep-mu -------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepMuSummary<'a> {
    config_sha256: &'a str,
    s: f64,
    p: f64,
    slope: f64,
    intercept: f64,
    fit_rms: f64,
    nominal_exponent: f64,
    dilation_exponent: f64,
    out_of_theorem_range: bool,
}

pub fn cmd_sweep_mu(cfg: &SweepMuConfig, out: &Path) -> Result<(), CliError> {
    let f = cfg.function.resolve()?;
    let mp = MixedNormParams::new(cfg.s, cfg.p).map_err(compute)?;
    let fit = mu_exponent_fit(&f, mp, &cfg.mus, &cfg.params, &cfg.quad).map_err(compute)?;

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    let mut w = csv_writer(&out_file(out, "sweep_mu", &short, "csv"))?;
    w.write_record(["mu", "ratio"]).map_err(compute)?;
    for &(mu, ratio) in &fit.rows {
        w.write_record([float_field(mu), float_field(ratio)]).map_err(compute)?;
    }
    w.flush()?;

    write_json(
        &out_file(out, "sweep_mu", &short, "json"),
        &SweepMuSummary {
            config_sha256: &hash,
            s: cfg.s,
            p: cfg.p,
            slope: fit.slope,
            intercept: fit.intercept,
            fit_rms: fit.fit_rms,
            nominal_exponent: fit.nominal_exponent,
            dilation_exponent: fit.dilation_exponent,
            out_of_theorem_range: fit.out_of_theorem_range,
        },
    )?;
    println!(
        "fitted mu exponent {} against dilation value {}  (config {})",
        float_field(fit.slope),
        float_field(fit.dilation_exponent),
        short
    );
    Ok(())
}

// --- sweep-kr -------------------------------------------------------------------------

#[derive(Serialize)]
struct KrFit {
    p: f64,
    gamma: f64,
    slope: f64,
    intercept: f64,
    fit_rms: f64,
    max_ratio: f64,
}

#[derive(Serialize)]
struct SweepKrSummary<'a> {
    config_sha256: &'a str,
    lambda: f64,
    grid_n: usize,
    half_width: f64,
    engine: &'a str,
    fits: Vec<KrFit>,
}

pub fn cmd_sweep_kr(cfg: &SweepKrConfig, out: &Path) -> Result<(), CliError> {
    if !cfg.lambda.is_finite() || cfg.lambda <= 0.0 {
        return Err(field_err("lambda", "must be finite and positive").into());
    }
    if cfg.k_values.is_empty() {
        return Err(field_err("k_values", "must not be empty").into());
    }
    {
        let mut ks = cfg.k_values.clone();
        ks.sort_unstable();
        ks.dedup();
        if ks.len() < 2 {
            return Err(field_err("k_values", "need at least two distinct levels to fit a slope")
                .into());
        }
    }
    for &p in &cfg.p_values {
        if !(1.0..=2.0).contains(&p) {
            return Err(field_err("p_values", format!("p = {p} outside [1, 2]")).into());
        }
    }
    if cfg.family_count == 0 {
        return Err(field_err("family_count", "must be positive").into());
    }
    let eng = engines()
        .into_iter()
        .find(|e| e.name() == cfg.engine)
        .ok_or_else(|| field_err("engine", format!("unknown engine `{}`", cfg.engine)))?;

    let k_top = cfg.k_values.iter().copied().max().unwrap();
    let half = cfg
        .half_width
        .unwrap_or_else(|| box_half_width(cfg.lambda, k_top.max(1), 1e-12).max(9.0));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let family: Vec<Grid2> = (0..cfg.family_count)
        .map(|_| Grid2::sample(cfg.grid_n, half, &checks::random_plane_fn(&mut rng)))
        .collect();
    for (i, g) in family.iter().enumerate() {
        if !g.is_admitted() {
            return Err(CliError::Compute(format!(
                "family member {i} leaks through the box edge at half width {half}"
            )));
        }
    }

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    let mut w = csv_writer(&out_file(out, "sweep_kr", &short, "csv"))?;
    w.write_record(["p", "k", "ratio"]).map_err(compute)?;
    let mut fits = Vec::new();
    for &p in &cfg.p_values {
        let mut rows = Vec::new();
        for &k in &cfg.k_values {
            let ratio = kr_ratio_probe(cfg.lambda, k, p, &family, eng);
            w.write_record([float_field(p), k.to_string(), float_field(ratio)])
                .map_err(compute)?;
            rows.push(((2 * k + 1) as f64, ratio));
        }
        let (slope, intercept, fit_rms) = fit_log_log(&rows);
        let max_ratio = rows.iter().map(|&(_, r)| r).fold(0.0f64, f64::max);
        fits.push(KrFit { p, gamma: gamma_exponent(p), slope, intercept, fit_rms, max_ratio });
    }
    w.flush()?;

    for fit in &fits {
        println!(
            "p {}: normalized level slope {} (gamma {})",
            fit.p,
            float_field(fit.slope),
            float_field(fit.gamma)
        );
    }
    println!("wrote kr sweep  (config {short})");
    write_json(
        &out_file(out, "sweep_kr", &short, "json"),
        &SweepKrSummary {
            config_sha256: &hash,
            lambda: cfg.lambda,
            grid_n: cfg.grid_n,
            half_width: half,
            engine: eng.name(),
            fits,
        },
    )?;
    Ok(())
}

// --- sweep-ts -------------------------------------------------------------------------

#[derive(Serialize)]
struct TsFit {
    s: f64,
    fitted_constant: f64,
    all_within: bool,
}

#[derive(Serialize)]
struct SweepTsSummary<'a> {
    config_sha256: &'a str,
    reference_r: f64,
    fits: Vec<TsFit>,
}

pub fn cmd_sweep_ts(cfg: &SweepTsConfig, out: &Path) -> Result<(), CliError> {
    if !cfg.r_values.contains(&cfg.reference_r) {
        return Err(field_err(
            "reference_r",
            "the reference radius must be one of r_values; the fitted constant is read there",
        )
        .into());
    }
    let f = cfg.function.resolve()?;
    let quad = NormQuad::for_fn(&f, &cfg.quad);
    let sphere = sphere_rule(cfg.n_theta, cfg.n_phi);

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    let mut w = csv_writer(&out_file(out, "sweep_ts", &short, "csv"))?;
    w.write_record(["s", "r", "ratio", "fitted_constant", "within_bound"])
        .map_err(compute)?;
    let mut fits = Vec::new();
    for &s in &cfg.s_values {
        let rows = tomas_stein_sweep(&f, &cfg.r_values, s, &sphere, &quad).map_err(compute)?;
        let fitted = rows
            .iter()
            .find(|&&(r, _)| r == cfg.reference_r)
            .map(|&(_, v)| v)
            .expect("reference radius checked above");
        let mut all_within = true;
        for &(r, v) in &rows {
            let within = v <= fitted * (1.0 + 1e-12);
            all_within &= within;
            w.write_record([
                float_field(s),
                float_field(r),
                float_field(v),
                float_field(fitted),
                within.to_string(),
            ])
            .map_err(compute)?;
        }
        fits.push(TsFit { s, fitted_constant: fitted, all_within });
    }
    w.flush()?;

    for fit in &fits {
        println!(
            "s {}: fitted constant {}, bound {} across radii",
            fit.s,
            float_field(fit.fitted_constant),
            if fit.all_within { "holds" } else { "FAILS" }
        );
    }
    println!("wrote restriction sweep  (config {short})");
    write_json(
        &out_file(out, "sweep_ts", &short, "json"),
        &SweepTsSummary { config_sha256: &hash, reference_r: cfg.reference_r, fits },
    )?;
    Ok(())
}

// --- oracle ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OracleSummary<'a> {
    config_sha256: &'a str,
    lambda: f64,
    n: usize,
    scheme: &'a str,
    half_width: f64,
    dim: usize,
    hermiticity_defect: f64,
    worst_cluster_rel_err: f64,
    projection_worst: Option<f64>,
    refused_levels: Vec<usize>,
    matrix_dump: Option<String>,
}

pub fn cmd_oracle(cfg: &OracleConfig, out: &Path) -> Result<(), CliError> {
    if !cfg.lambda.is_finite() || cfg.lambda <= 0.0 {
        return Err(field_err("lambda", "must be finite and positive").into());
    }
    if cfg.n < 4 {
        return Err(field_err("n", "grid must be at least 4 per side").into());
    }
    if scheme(&cfg.scheme).is_none() {
        return Err(field_err("scheme", format!("unknown scheme `{}`", cfg.scheme)).into());
    }
    let half = cfg.half_width.unwrap_or_else(|| oracle_half_width(cfg.lambda));
    if !half.is_finite() || half <= 0.0 {
        return Err(field_err("half_width", "must be finite and positive").into());
    }
    let m = discretize_twisted(cfg.lambda, cfg.n, half, &cfg.scheme).map_err(compute)?;
    let eig = eigensystem(&m).map_err(compute)?;
    let medians = cluster_medians(&eig, cfg.k_upto);
    let clusters = eigenvalue_clusters(&eig, cfg.k_upto);

    let hash = config_hash(cfg);
    let short = short_hash(&hash);
    let mut w = csv_writer(&out_file(out, "oracle", &short, "csv"))?;
    w.write_record(["k", "target", "median", "rel_err", "cluster_size", "reliability"])
        .map_err(compute)?;
    let mut worst = 0.0f64;
    for k in 0..=cfg.k_upto {
        let target = cfg.lambda * (2 * k + 1) as f64;
        let est = reliability(cfg.lambda, k, cfg.n, half);
        let (med_field, err_field) = match medians[k] {
            Some(med) => {
                let rel = (med - target).abs() / target;
                worst = worst.max(rel);
                (float_field(med), float_field(rel))
            }
            None => (String::new(), String::new()),
        };
        w.write_record([
            k.to_string(),
            float_field(target),
            med_field,
            err_field,
            clusters[k].len().to_string(),
            float_field(est),
        ])
        .map_err(compute)?;
    }
    w.flush()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut projection_worst: Option<f64> = None;
    let mut refused = Vec::new();
    for _ in 0..cfg.corpus_count {
        let g = checks::random_plane_fn(&mut rng);
        for k in 0..=cfg.k_upto {
            match compare_lambda_projection(&m, &eig, k, &g) {
                Ok(d) => {
                    projection_worst = Some(projection_worst.map_or(d, |w| w.max(d)));
                }
                Err(OracleError::UnreliableIndex { k, .. }) => {
                    if !refused.contains(&k) {
                        refused.push(k);
                    }
                }
                Err(e) => return Err(compute(e)),
            }
        }
    }
    refused.sort_unstable();

    let matrix_dump = if cfg.dump_matrix {
        let path = out_file(out, "twisted", &short, "nspecmat");
        dump_matrix(&m, &path).map_err(compute)?;
        Some(path.file_name().unwrap().to_string_lossy().into_owned())
    } else {
        None
    };

    println!(
        "oracle at lambda {}, n {}: worst cluster error {}  (config {})",
        cfg.lambda,
        cfg.n,
        float_field(worst),
        short
    );
    write_json(
        &out_file(out, "oracle", &short, "json"),
        &OracleSummary {
            config_sha256: &hash,
            lambda: cfg.lambda,
            n: cfg.n,
            scheme: &cfg.scheme,
            half_width: half,
            dim: m.dim(),
            hermiticity_defect: m.hermiticity_defect(),
            worst_cluster_rel_err: worst,
            projection_worst,
            refused_levels: refused,
            matrix_dump,
        },
    )?;
    Ok(())
}

// --- defaults -------------------------------------------------------------------------

pub fn cmd_defaults() -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&AllDefaults::default())
        .expect("default configs serialize");
    println!("{text}");
    Ok(())
}

// --- shared helpers ---------------------------------------------------------------------

/// Size the global worker pool once, before any parallel work. Zero keeps
/// rayon's own default.
pub fn init_workers(workers: usize) -> Result<(), CliError> {
    if workers == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Compute(format!("worker pool: {e}")))
}

/// Guard against silently writing nowhere.
pub fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    Ok(())
}

