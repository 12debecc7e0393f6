//! The invariant suite behind `validate`: a registry of named checks, each
//! binding one identity of the pipeline at desk scale. Checks are pure
//! functions of the config; they never warn-and-pass, and anything they
//! cannot decide is reported as skipped with the reason. Tolerances here are
//! the suite's own desk-scale contracts and are pinned next to each check.

use crate::config::ValidateConfig;
use nilspec::analytic::{identity_corpus, AnalyticFn, AnalyticTerm};
use nilspec::centralft::{central_transform, fiber_fourier, invert_spherical_many, rotate_slice};
use nilspec::fieldops::{
    apply_sublaplacian, conjugated_fiber_residual, fiber_sublaplacian,
    fiber_sublaplacian_expanded, intertwining_residual, intertwining_scale, sublaplacian,
    sublaplacian_expanded,
};
use nilspec::gauss::Gauss;
use nilspec::nilgeom::{
    adapted_frame, adapted_frame_gauged, bracket, dilate, dot, sphere_sample, Direction,
    GroupPoint, Vec3,
};
use nilspec::oracle::{
    cluster_medians, compare_lambda_projection, discretize_twisted, eigensystem,
    oracle_half_width, OracleError,
};
use nilspec::poly::Poly;
use nilspec::projector::{
    default_eval_points, dilation_covariance_residual, eigen_residual, reconstruct, EigenOutcome,
    QuadratureSpec,
};
use nilspec::quadrature::{gauss_legendre_on, sphere_rule};
use nilspec::twisted::{
    apply_twisted_laplacian, box_half_width, completeness_rank, default_engine, engines,
    lambda_project, lambda_project_sym, Grid2,
};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One row of the validation report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub description: &'static str,
    pub status: CheckStatus,
    /// Worst measured defect; absent when the check never got to measure.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

/// What a check body reports back.
pub enum Outcome {
    /// Worst defect measured; passes iff within tolerance.
    Measured(f64),
    /// Same, with a note for the report.
    MeasuredWith(f64, String),
    /// The inputs degenerate here; nothing to decide.
    Skip(String),
    /// The computation itself was refused (insufficient spec, solver error).
    /// Refusal is a failure, not a silent pass.
    Broken(String),
}

pub trait Check: Sync {
    fn id(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn tolerance(&self) -> f64;
    fn run(&self, cfg: &ValidateConfig) -> Outcome;

    fn report(&self, cfg: &ValidateConfig) -> CheckReport {
        let (status, residual, detail) = match self.run(cfg) {
            Outcome::Measured(r) => (status_of(r, self.tolerance()), Some(r), String::new()),
            Outcome::MeasuredWith(r, d) => (status_of(r, self.tolerance()), Some(r), d),
            Outcome::Skip(d) => (CheckStatus::Skipped, None, d),
            Outcome::Broken(d) => (CheckStatus::Fail, None, d),
        };
        CheckReport {
            id: self.id(),
            description: self.description(),
            status,
            residual,
            tolerance: self.tolerance(),
            detail,
        }
    }
}

fn status_of(residual: f64, tol: f64) -> CheckStatus {
    if residual.is_finite() && residual <= tol {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// A registry entry: the check's identity and its body as a plain function.
struct Probe {
    id: &'static str,
    description: &'static str,
    tolerance: f64,
    body: fn(&ValidateConfig) -> Outcome,
}

impl Check for Probe {
    fn id(&self) -> &'static str {
        self.id
    }
    fn description(&self) -> &'static str {
        self.description
    }
    fn tolerance(&self) -> f64 {
        self.tolerance
    }
    fn run(&self, cfg: &ValidateConfig) -> Outcome {
        (self.body)(cfg)
    }
}

static REGISTRY: [Probe; 19] = [
    Probe {
        id: "bracket-structure",
        description: "bracket matches the alternating structure constants on the basis and on random pairs",
        tolerance: 1e-12,
        body: bracket_structure,
    },
    Probe {
        id: "adapted-frames",
        description: "adapted frames are orthonormal, unimodular, pair to one, and act as automorphisms",
        tolerance: 1e-12,
        body: adapted_frames,
    },
    Probe {
        id: "operator-expansion",
        description: "the expanded sub-Laplacian and its fiber form agree with the composed fields",
        tolerance: 1e-8,
        body: operator_expansion,
    },
    Probe {
        id: "dilation-homogeneity",
        description: "the sub-Laplacian is homogeneous of degree two under anisotropic dilation",
        tolerance: 1e-8,
        body: dilation_homogeneity,
    },
    Probe {
        id: "fiber-intertwining",
        description: "the central character extension intertwines the fiber operator with the sub-Laplacian",
        tolerance: 1e-8,
        body: fiber_intertwining,
    },
    Probe {
        id: "fiber-conjugation",
        description: "the fiber operator conjugates to a twisted plane operator in adapted coordinates",
        tolerance: 1e-8,
        body: fiber_conjugation,
    },
    Probe {
        id: "twisted-eigenvalue",
        description: "plane projections are eigenfunctions of the twisted operator at odd multiples",
        tolerance: 1e-6,
        body: twisted_eigenvalue,
    },
    Probe {
        id: "twisted-idempotence",
        description: "plane projections are idempotent and mutually orthogonal",
        tolerance: 1e-8,
        body: twisted_idempotence,
    },
    Probe {
        id: "twisted-completeness",
        description: "partial projection sums recover the input within the rank rule's tail",
        tolerance: 1e-6,
        body: twisted_completeness,
    },
    Probe {
        id: "twisted-ground-state",
        description: "the ground Gaussian is fixed by the lowest projection and killed by the rest",
        tolerance: 1e-8,
        body: twisted_ground_state,
    },
    Probe {
        id: "engine-agreement",
        description: "both twisted convolution engines produce the same grids",
        tolerance: 1e-10,
        body: engine_agreement,
    },
    Probe {
        id: "central-closed-form",
        description: "central slices match direct quadrature of the defining integral",
        tolerance: 1e-10,
        body: central_closed_form,
    },
    Probe {
        id: "spherical-inversion",
        description: "the spherical inversion formula round-trips the analytic corpus",
        tolerance: 1e-6,
        body: spherical_inversion,
    },
    Probe {
        id: "fiber-plancherel",
        description: "the fiber transform preserves energy up to the plane factor",
        tolerance: 1e-8,
        body: fiber_plancherel,
    },
    Probe {
        id: "density-eigenrelation",
        description: "spectral density slices satisfy the eigenvalue relation of the sub-Laplacian",
        tolerance: 1e-3,
        body: density_eigenrelation,
    },
    Probe {
        id: "density-reconstruction",
        description: "integrating the density over mu reconstructs the input, improving under refinement",
        tolerance: 1e-2,
        body: density_reconstruction,
    },
    Probe {
        id: "density-dilation",
        description: "the density family is covariant under anisotropic dilation",
        tolerance: 1e-6,
        body: density_dilation,
    },
    Probe {
        id: "oracle-spectrum",
        description: "discrete twisted operator eigenvalues cluster at the odd multiples",
        tolerance: 1e-2,
        body: oracle_spectrum,
    },
    Probe {
        id: "oracle-projection",
        description: "dense eigenspace projections agree with the kernel projections",
        tolerance: 1e-2,
        body: oracle_projection,
    },
];

pub fn registry() -> Vec<&'static dyn Check> {
    REGISTRY.iter().map(|p| p as &dyn Check).collect()
}

pub fn check(id: &str) -> Option<&'static dyn Check> {
    REGISTRY.iter().find(|p| p.id == id).map(|p| p as &dyn Check)
}

/// The subset named by `only` (all when empty), kept in registry order.
pub fn select(only: &[String]) -> Result<Vec<&'static dyn Check>, String> {
    if only.is_empty() {
        return Ok(registry());
    }
    for id in only {
        if check(id).is_none() {
            return Err(format!("unknown check id `{id}`"));
        }
    }
    Ok(registry()
        .into_iter()
        .filter(|c| only.iter().any(|id| id == c.id()))
        .collect())
}

// --- shared corpora -------------------------------------------------------------------

fn group_points(seed: u64, count: usize) -> Vec<GroupPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x = [0.0; 3];
            let mut z = [0.0; 3];
            for a in 0..3 {
                x[a] = rng.gen_range(-1.2..1.2);
                z[a] = rng.gen_range(-1.2..1.2);
            }
            GroupPoint { x, z }
        })
        .collect()
}

fn plane_points(seed: u64, count: usize) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)])
        .collect()
}

/// A nonradial plane Gaussian-polynomial with components across several
/// projection indices.
fn plane_probe() -> Gauss<2> {
    let mut g = Gauss::<2>::gaussian(ONE, [C64::new(0.4, 0.0); 2], [0.3, -0.2]);
    g.poly = g.poly.mul(&Poly::one().add(&Poly::monomial([1, 1], C64::new(0.5, 0.2))));
    g
}

/// A reproducible mildly anisotropic Gaussian-polynomial on the plane; the
/// sweep commands and the oracle checks draw their corpora from this.
pub fn random_plane_fn(rng: &mut ChaCha8Rng) -> Gauss<2> {
    let gamma = rng.gen_range(0.3..0.8);
    let center = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let mut g = Gauss::<2>::gaussian(
        C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)),
        [C64::new(gamma, 0.0); 2],
        center,
    );
    let e = [rng.gen_range(0..=2u8), rng.gen_range(0..=2u8)];
    g.poly = g
        .poly
        .mul(&Poly::one().add(&Poly::monomial(e, C64::new(rng.gen_range(-0.6..0.6), 0.3))));
    g
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

// --- structure and frames ---------------------------------------------------------------

fn bracket_structure(cfg: &ValidateConfig) -> Outcome {
    // the alternating symbol, written out independently of the bracket
    let eps = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let expand = |x: Vec3, y: Vec3| -> Vec3 {
        let mut out = [0.0; 3];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += eps(i, j, k) * xi * yj;
                }
            }
        }
        out
    };
    let mut worst = 0.0f64;
    let mut basis = [[0.0; 3]; 3];
    for (i, b) in basis.iter_mut().enumerate() {
        b[i] = 1.0;
    }
    for x in basis {
        for y in basis {
            let b = bracket(x, y);
            let e = expand(x, y);
            let bf = bracket(y, x);
            for a in 0..3 {
                worst = worst.max((b[a] - e[a]).abs()).max((b[a] + bf[a]).abs());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..1000 {
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for a in 0..3 {
            x[a] = rng.gen_range(-2.0..2.0);
            y[a] = rng.gen_range(-2.0..2.0);
        }
        let b = bracket(x, y);
        let e = expand(x, y);
        for a in 0..3 {
            worst = worst.max((b[a] - e[a]).abs());
        }
    }
    Outcome::Measured(worst)
}

fn adapted_frames(cfg: &ValidateConfig) -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    for (i, d) in sphere_sample(100).into_iter().enumerate() {
        let angle = if i % 3 == 0 { 0.0 } else { rng.gen_range(0.0..6.28) };
        let f = if angle == 0.0 { adapted_frame(&d) } else { adapted_frame_gauged(&d, angle) };
        // orthonormality of both triples
        let triples = [[f.v, f.x, f.y], [f.zc, f.w1, f.w2]];
        for t in &triples {
            for (a, ta) in t.iter().enumerate() {
                for (b, tb) in t.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot(*ta, *tb) - want).abs());
                }
            }
        }
        // the skew pairing of the in-plane pair is one
        worst = worst.max((dot(d.omega(), bracket(f.x, f.y)) - 1.0).abs());
        // rows (x, y, omega) have unit determinant
        let det = dot(f.r[0], bracket(f.r[1], f.r[2]));
        worst = worst.max((det - 1.0).abs());
        // rotations act as automorphisms of the bracket
        let mut u = [0.0; 3];
        let mut w = [0.0; 3];
        for a in 0..3 {
            u[a] = rng.gen_range(-1.0..1.0);
            w[a] = rng.gen_range(-1.0..1.0);
        }
        let lhs = nilspec::nilgeom::mat_apply(&f.r, bracket(u, w));
        let rhs = bracket(
            nilspec::nilgeom::mat_apply(&f.r, u),
            nilspec::nilgeom::mat_apply(&f.r, w),
        );
        for a in 0..3 {
            worst = worst.max((lhs[a] - rhs[a]).abs());
        }
    }
    Outcome::Measured(worst)
}

// --- operator identities ----------------------------------------------------------------

fn operator_expansion(cfg: &ValidateConfig) -> Outcome {
    let corpus = identity_corpus(cfg.seed, cfg.corpus_count.max(2));
    let pts = group_points(cfg.seed.wrapping_add(2), 20);
    let mut worst = 0.0f64;
    for f in &corpus {
        for t in &f.terms {
            let g6 = t.to_gauss6();
            let a = sublaplacian(&g6);
            let b = sublaplacian_expanded(&g6);
            for p in &pts {
                let y = [p.x[0], p.x[1], p.x[2], p.z[0], p.z[1], p.z[2]];
                let va = a.eval_real(&y);
                worst = worst.max(rel((va - b.eval_real(&y)).norm(), va.norm()));
            }
            let g3 = t.x_profile();
            for d in sphere_sample(6) {
                for rho in [0.5, 1.0, 2.0] {
                    let fa = fiber_sublaplacian(rho, d.omega(), &g3);
                    let fb = fiber_sublaplacian_expanded(rho, d.omega(), &g3);
                    for p in &pts {
                        let va = fa.eval_real(&p.x);
                        worst = worst.max(rel((va - fb.eval_real(&p.x)).norm(), va.norm()));
                    }
                }
            }
        }
    }
    Outcome::Measured(worst)
}

fn dilation_homogeneity(cfg: &ValidateConfig) -> Outcome {
    let corpus = identity_corpus(cfg.seed.wrapping_add(3), cfg.corpus_count.max(2));
    let pts = group_points(cfg.seed.wrapping_add(4), 20);
    let mut worst = 0.0f64;
    for f in &corpus {
        for eps in [0.5, 2.0, 3.0] {
            let fe = f.dilate(eps);
            for p in &pts {
                let lhs = apply_sublaplacian(&fe, p);
                let rhs = eps * eps * apply_sublaplacian(f, &dilate(p, eps));
                worst = worst.max(rel((lhs - rhs).norm(), rhs.norm()));
            }
        }
    }
    Outcome::Measured(worst)
}

fn fiber_intertwining(cfg: &ValidateConfig) -> Outcome {
    let corpus = identity_corpus(cfg.seed.wrapping_add(5), cfg.corpus_count.max(2));
    let pts = group_points(cfg.seed.wrapping_add(6), 20);
    let mut worst = 0.0f64;
    for f in &corpus {
        let g = f.terms[0].x_profile();
        for d in sphere_sample(10) {
            for rho in [0.5, 1.0, 2.0] {
                for p in &pts {
                    let res = intertwining_residual(rho, &d, &g, p);
                    let scale = intertwining_scale(rho, &d, &g, p);
                    if scale > 0.0 {
                        worst = worst.max(res / scale);
                    }
                }
            }
        }
    }
    Outcome::Measured(worst)
}

fn fiber_conjugation(cfg: &ValidateConfig) -> Outcome {
    let mut g = Gauss::<3>::gaussian(C64::new(1.0, -0.3), [C64::new(0.5, 0.0); 3], [0.3, -0.1, 0.2]);
    g.poly = g.poly.mul(&Poly::one().add(&Poly::monomial([0, 2, 0], C64::new(0.4, 0.0))));
    let pts: Vec<Vec3> = group_points(cfg.seed.wrapping_add(7), 6).iter().map(|p| p.x).collect();
    let mut worst = 0.0f64;
    for d in sphere_sample(10) {
        for rho in [0.5, 1.0, 2.0] {
            worst = worst.max(conjugated_fiber_residual(rho, &adapted_frame(&d), &g, &pts));
        }
    }
    Outcome::Measured(worst)
}

// --- twisted spectral theory ------------------------------------------------------------

fn twisted_eigenvalue(_cfg: &ValidateConfig) -> Outcome {
    let n = 128;
    let eng = default_engine();
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for lambda in [0.5, 1.0, 2.0] {
        let half = box_half_width(lambda, 8, 1e-12).max(9.0);
        let g = Grid2::sample(n, half, &plane_probe());
        if !g.is_admitted() {
            return Outcome::Broken(format!("probe tails leak at lambda {lambda}"));
        }
        for k in 0..=8 {
            let pk = lambda_project(&g, lambda, k, eng);
            if pk.norm_l2() < 1e-6 * g.norm_l2() {
                continue;
            }
            checked += 1;
            let want = pk.scale(C64::new(lambda * (2 * k + 1) as f64, 0.0));
            let res = apply_twisted_laplacian(&pk, lambda).sub(&want).norm_l2() / want.norm_l2();
            worst = worst.max(res);
        }
    }
    if checked < 12 {
        return Outcome::Broken(format!("probe reached only {checked} components"));
    }
    Outcome::MeasuredWith(worst, format!("{checked} components across three twists"))
}

fn twisted_idempotence(_cfg: &ValidateConfig) -> Outcome {
    let lambda = 1.0;
    let g = plane_probe();
    let pts = plane_points(11, 8);
    let mut worst = 0.0f64;
    for k in 0..=2usize {
        let p1 = lambda_project_sym(&g, lambda, k, 1.0);
        let p2 = lambda_project_sym(&p1, lambda, k, 1.0);
        let q = lambda_project_sym(&p1, lambda, k + 1, 1.0);
        for w in &pts {
            let v1 = p1.eval_real(w);
            worst = worst.max(rel((p2.eval_real(w) - v1).norm(), v1.norm()));
            worst = worst.max(rel(q.eval_real(w).norm(), v1.norm()));
        }
    }
    Outcome::Measured(worst)
}

fn twisted_completeness(cfg: &ValidateConfig) -> Outcome {
    let lambda = 1.0;
    let beta = 0.45 * lambda;
    let n = 128;
    let kk = cfg
        .params
        .k_max
        .unwrap_or_else(|| completeness_rank(lambda, &[beta], 1e-6));
    let half = box_half_width(lambda, kk.max(1), 1e-12).max(9.0);
    let g = Grid2::from_fn(n, half, |s, t| {
        C64::new((1.0 + 0.3 * s) * (-beta * (s * s + t * t)).exp(), 0.0)
    });
    let eng = default_engine();
    let mut acc = Grid2::zeros(n, half);
    for k in 0..=kk {
        acc = acc.add(&lambda_project(&g, lambda, k, eng));
    }
    let res = acc.sub(&g).norm_l2() / g.norm_l2();
    Outcome::MeasuredWith(res, format!("partial sum through k = {kk}"))
}

fn twisted_ground_state(_cfg: &ValidateConfig) -> Outcome {
    let pts = plane_points(13, 8);
    let mut worst = 0.0f64;
    for lambda in [0.5, 1.0, 2.0] {
        let g0 = Gauss::<2>::gaussian(ONE, [C64::new(lambda / 4.0, 0.0); 2], [0.0, 0.0]);
        let p0 = lambda_project_sym(&g0, lambda, 0, 1.0);
        for w in &pts {
            let v = g0.eval_real(w);
            worst = worst.max(rel((p0.eval_real(w) - v).norm(), v.norm()));
        }
        for k in 1..=3usize {
            let pk = lambda_project_sym(&g0, lambda, k, 1.0);
            for w in &pts {
                worst = worst.max(rel(pk.eval_real(w).norm(), g0.eval_real(w).norm()));
            }
        }
    }
    Outcome::Measured(worst)
}

fn engine_agreement(cfg: &ValidateConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(8));
    let [direct, factored] = engines();
    let n = 32;
    let half = 8.0;
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let g = Grid2::sample(n, half, &random_plane_fn(&mut rng));
        let h = Grid2::sample(n, half, &random_plane_fn(&mut rng));
        for epsilon in [1.0, -1.0] {
            let a = direct.twisted_convolve(&g, &h, 1.0, epsilon);
            let b = factored.twisted_convolve(&g, &h, 1.0, epsilon);
            let scale = a.data.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let diff = a
                .data
                .iter()
                .zip(&b.data)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0f64, f64::max);
            worst = worst.max(diff / scale.max(1e-300));
        }
    }
    Outcome::Measured(worst)
}

// --- central transform -------------------------------------------------------------------

fn central_closed_form(_cfg: &ValidateConfig) -> Outcome {
    let mut terms = vec![
        AnalyticTerm::gaussian(ONE, 0.8, 0.7),
        AnalyticTerm::gaussian(C64::new(0.4, -0.2), 1.2, 1.3),
    ];
    terms[1].center_z = [0.2, -0.1, 0.3];
    let f = AnalyticFn { terms };
    let xs: [Vec3; 2] = [[0.3, -0.4, 0.1], [0.0, 0.7, -0.2]];
    let mus: [Vec3; 2] = [[0.3, 0.0, 0.0], [0.7, 0.4, -1.1]];
    let mut worst = 0.0f64;
    for mu in &mus {
        let slice = central_transform(&f, *mu);
        for x in &xs {
            let got = slice.eval(x);
            // quadrature of the defining z-integral, one axis at a time
            let mut want = C64::new(0.0, 0.0);
            for t in &f.terms {
                let ru2: f64 =
                    x.iter().zip(&t.center_x).map(|(a, b)| (a - b) * (a - b)).sum();
                let mut factor = t.coeff
                    * t.xpoly.eval_real(&[
                        x[0] - t.center_x[0],
                        x[1] - t.center_x[1],
                        x[2] - t.center_x[2],
                    ])
                    * (-t.width_x * ru2).exp();
                for a in 0..3 {
                    let l = (41.45 / t.width_z).sqrt();
                    let c0 = t.center_z[a];
                    let mut acc = C64::new(0.0, 0.0);
                    for (z, w) in gauss_legendre_on(96, c0 - l, c0 + l) {
                        let arg = -t.width_z * (z - c0) * (z - c0);
                        acc += w * arg.exp() * C64::new(0.0, -mu[a] * z).exp();
                    }
                    factor *= acc;
                }
                want += factor;
            }
            worst = worst.max(rel((got - want).norm(), want.norm()));
        }
    }
    Outcome::Measured(worst)
}

fn spherical_inversion(cfg: &ValidateConfig) -> Outcome {
    let corpus = identity_corpus(cfg.seed.wrapping_add(9), 2);
    let pts = group_points(cfg.seed.wrapping_add(10), 4);
    let sphere = sphere_rule(cfg.params.n_theta, cfg.params.n_phi);
    let mut worst = 0.0f64;
    for f in &corpus {
        let got = invert_spherical_many(f, &pts, &sphere, 48);
        for (v, p) in got.iter().zip(&pts) {
            let want = f.eval(p);
            worst = worst.max(rel((v - want).norm(), want.norm()));
        }
    }
    Outcome::Measured(worst)
}

fn fiber_plancherel(cfg: &ValidateConfig) -> Outcome {
    let corpus = identity_corpus(cfg.seed.wrapping_add(11), 2);
    let mus: [Vec3; 2] = [[0.7, 0.4, -1.1], [0.0, 0.0, 1.3]];
    let mut worst = 0.0f64;
    for f in &corpus {
        for mu in &mus {
            let slice = central_transform(f, *mu);
            let frame = adapted_frame(&Direction::new(*mu));
            for g in rotate_slice(&slice, &frame) {
                let gam = g.gamma[2];
                if gam.re <= 0.0 {
                    return Outcome::Broken("slice part has no fiber decay".to_string());
                }
                let center = g.lin[2].im;
                let width = (2.0 * gam.re * 60.0).sqrt();
                let lhs: f64 = gauss_legendre_on(96, center - width, center + width)
                    .iter()
                    .map(|&(xi, w)| w * fiber_fourier(&g, xi).norm_l2_sq())
                    .sum();
                let rhs = 2.0 * std::f64::consts::PI * g.norm_l2_sq_all();
                worst = worst.max((lhs - rhs).abs() / rhs);
            }
        }
    }
    Outcome::Measured(worst)
}

// --- the spectral density ------------------------------------------------------------------

fn density_eigenrelation(cfg: &ValidateConfig) -> Outcome {
    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.8, 1.1));
    let spec = QuadratureSpec::for_fn(cfg.params.clone(), &f);
    let pts = default_eval_points();
    let mut worst = 0.0f64;
    let mut skipped = Vec::new();
    for mu in [0.5, 1.0, 4.0] {
        match eigen_residual(&f, mu, &spec, &pts) {
            Ok(EigenOutcome::Residual(r)) => worst = worst.max(r),
            Ok(EigenOutcome::Indeterminate { projected_norm, .. }) => {
                skipped.push(format!("mu {mu}: slice norm {projected_norm:.3e}"));
            }
            Err(e) => return Outcome::Broken(format!("mu {mu}: {e}")),
        }
    }
    if !skipped.is_empty() && worst == 0.0 {
        return Outcome::Skip(skipped.join("; "));
    }
    if skipped.is_empty() {
        Outcome::Measured(worst)
    } else {
        Outcome::MeasuredWith(worst, skipped.join("; "))
    }
}

fn density_reconstruction(cfg: &ValidateConfig) -> Outcome {
    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.5, 1.0));
    let pts = default_eval_points();
    let want: Vec<C64> = pts.iter().map(|p| f.eval(p)).collect();
    let err_with = |n_mu: usize| -> Result<f64, nilspec::projector::SpecError> {
        let mut params = cfg.params.clone();
        params.n_mu = n_mu;
        let spec = QuadratureSpec::for_fn(params, &f);
        let got = reconstruct(&f, &spec, &pts)?;
        let num: f64 = got
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = want.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Ok(num / den)
    };
    let coarse = match err_with(10) {
        Ok(v) => v,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    let fine = match err_with(20) {
        Ok(v) => v,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    if fine > coarse / 2.0 + 1e-7 {
        return Outcome::MeasuredWith(
            f64::INFINITY,
            format!("no refinement order: {coarse:.3e} -> {fine:.3e}"),
        );
    }
    Outcome::MeasuredWith(fine, format!("coarse {coarse:.3e} -> fine {fine:.3e}"))
}

fn density_dilation(cfg: &ValidateConfig) -> Outcome {
    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.7, 0.9));
    let spec = QuadratureSpec::for_fn(cfg.params.clone(), &f);
    let pts = default_eval_points();
    let mut worst = 0.0f64;
    for eps in [0.5, 2.0] {
        for mu in [1.0, 4.0] {
            match dilation_covariance_residual(&f, mu, eps, &spec, &pts) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return Outcome::Broken(format!("eps {eps}, mu {mu}: {e}")),
            }
        }
    }
    Outcome::Measured(worst)
}

// --- the discrete oracle ---------------------------------------------------------------------

fn oracle_spectrum(cfg: &ValidateConfig) -> Outcome {
    let lambda = 1.0;
    let m = match discretize_twisted(lambda, cfg.oracle_n, oracle_half_width(lambda), "spectral")
    {
        Ok(m) => m,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    let eig = match eigensystem(&m) {
        Ok(e) => e,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    let mut worst = (eig.evals[0] - lambda).abs() / lambda;
    for (k, med) in cluster_medians(&eig, 2).iter().enumerate() {
        let target = lambda * (2 * k + 1) as f64;
        match med {
            Some(v) => worst = worst.max((v - target).abs() / target),
            None => return Outcome::Broken(format!("empty cluster at k = {k}")),
        }
    }
    Outcome::Measured(worst)
}

fn oracle_projection(cfg: &ValidateConfig) -> Outcome {
    let lambda = 1.0;
    let m = match discretize_twisted(lambda, cfg.oracle_n, oracle_half_width(lambda), "spectral")
    {
        Ok(m) => m,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    let eig = match eigensystem(&m) {
        Ok(e) => e,
        Err(e) => return Outcome::Broken(e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(12));
    let mut worst = 0.0f64;
    let mut refused = Vec::new();
    for i in 0..cfg.corpus_count.max(3) {
        let g = random_plane_fn(&mut rng);
        for k in [0usize, 1, 3] {
            match compare_lambda_projection(&m, &eig, k, &g) {
                Ok(d) => worst = worst.max(d),
                Err(OracleError::UnreliableIndex { k, .. }) => {
                    refused.push(format!("member {i} k {k}"));
                }
                Err(e) => return Outcome::Broken(e.to_string()),
            }
        }
    }
    if refused.is_empty() {
        Outcome::Measured(worst)
    } else {
        Outcome::MeasuredWith(worst, format!("refused levels: {}", refused.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_selectable() {
        let all = registry();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a.id(), b.id());
            }
            assert!(check(a.id()).is_some());
        }
        assert!(check("no-such-check").is_none());
        let picked = select(&["adapted-frames".into(), "bracket-structure".into()]).unwrap();
        // registry order, not request order
        assert_eq!(picked[0].id(), "bracket-structure");
        assert_eq!(picked[1].id(), "adapted-frames");
        assert!(select(&["bogus".into()]).is_err());
    }

    #[test]
    fn structure_checks_pass_at_their_tolerances() {
        let cfg = ValidateConfig::default();
        for id in ["bracket-structure", "adapted-frames"] {
            let rep = check(id).unwrap().report(&cfg);
            assert_eq!(rep.status, CheckStatus::Pass, "{id}: {:?} {}", rep.residual, rep.detail);
        }
    }

    #[test]
    fn forced_zero_rank_fails_completeness() {
        let mut cfg = ValidateConfig::default();
        cfg.params.k_max = Some(0);
        let rep = check("twisted-completeness").unwrap().report(&cfg);
        assert_eq!(rep.status, CheckStatus::Fail);
        assert!(rep.residual.unwrap() > 1e-3);
    }
}
