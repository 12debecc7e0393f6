//! The acceptance gate: thirteen criteria, one test each, tolerances pinned
//! here in code. Each test exercises the library (or the binary, for the
//! determinism contract) at the scale the criterion names, independent of
//! the `validate` registry's desk-scale defaults.

use num::rational::Ratio;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilspec::analytic::{identity_corpus, tensor_corpus, AnalyticFn, AnalyticTerm};
use nilspec::centralft::{central_transform, fiber_fourier, invert_spherical_many, rotate_slice};
use nilspec::fieldops::{
    apply_sublaplacian, conjugated_fiber_residual, fiber_sublaplacian,
    fiber_sublaplacian_expanded, intertwining_residual, intertwining_scale, sublaplacian,
    sublaplacian_expanded,
};
use nilspec::gauss::Gauss;
use nilspec::nilgeom::{
    adapted_frame, bracket, dilate, dot, mat_apply, sphere_sample, Direction, GroupPoint, Vec3,
};
use nilspec::normharness::{
    mu_exponent_fit, series_claim_ceiling, series_exponent, series_exponent_exact,
    tomas_stein_sweep, MixedNormParams, NormQuad,
};
use nilspec::oracle::{
    cluster_medians, compare_lambda_projection, discretize_twisted, eigensystem,
    oracle_half_width,
};
use nilspec::poly::Poly;
use nilspec::projector::{
    default_eval_points, dilation_covariance_residual, eigen_residual, reconstruct, EigenOutcome,
    QuadratureParams, QuadratureSpec,
};
use nilspec::quadrature::{gauss_legendre_on, sphere_rule};
use nilspec::twisted::{
    apply_twisted_laplacian, box_half_width, completeness_rank, default_engine, gamma_exponent,
    kr_ratio_probe, lambda_project, lambda_project_sym, Grid2,
};

const ONE: C64 = C64::new(1.0, 0.0);

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

fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

/// Nonradial plane probe with weight in many projection levels.
fn plane_probe() -> Gauss<2> {
    let mut g = Gauss::<2>::gaussian(ONE, [C64::new(0.4, 0.0); 2], [0.3, -0.2]);
    g.poly = g.poly.mul(&Poly::one().add(&Poly::monomial([1, 1], C64::new(0.5, 0.2))));
    g
}

// criterion 1: the bracket is the coordinate cross product
#[test]
fn c01_bracket_matches_cross_product_structure() {
    const TOL: f64 = 1e-12;
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
    let mut basis = [[0.0; 3]; 3];
    for (i, b) in basis.iter_mut().enumerate() {
        b[i] = 1.0;
    }
    for x in basis {
        for y in basis {
            // exactly the structure constants on the basis, no rounding
            assert_eq!(bracket(x, y), expand(x, y));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(41);
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
            assert!((b[a] - e[a]).abs() <= TOL, "pair residual {}", (b[a] - e[a]).abs());
        }
    }
}

// criterion 2: adapted frames across 100 directions
#[test]
fn c02_adapted_frames_are_orthonormal_automorphisms() {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in sphere_sample(100) {
        let f = adapted_frame(&d);
        let triples = [[f.v, f.x, f.y], [f.zc, f.w1, f.w2]];
        for t in &triples {
            for (a, ta) in t.iter().enumerate() {
                for (b, tb) in t.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot(*ta, *tb) - want).abs() <= TOL);
                }
            }
        }
        assert!((dot(d.omega(), bracket(f.x, f.y)) - 1.0).abs() <= TOL);
        let det = dot(f.r[0], bracket(f.r[1], f.r[2]));
        assert!((det - 1.0).abs() <= TOL);
        let mut u = [0.0; 3];
        let mut w = [0.0; 3];
        for a in 0..3 {
            u[a] = rng.gen_range(-1.0..1.0);
            w[a] = rng.gen_range(-1.0..1.0);
        }
        let lhs = mat_apply(&f.r, bracket(u, w));
        let rhs = bracket(mat_apply(&f.r, u), mat_apply(&f.r, w));
        for a in 0..3 {
            assert!((lhs[a] - rhs[a]).abs() <= TOL);
        }
    }
}

// criterion 3: operator expansion identities and quadratic homogeneity
#[test]
fn c03_expanded_operators_match_and_scale_quadratically() {
    const TOL: f64 = 1e-8;
    let corpus = identity_corpus(43, 4);
    let pts = group_points(44, 20);
    for f in &corpus {
        for t in &f.terms {
            let g6 = t.to_gauss6();
            let a = sublaplacian(&g6);
            let b = sublaplacian_expanded(&g6);
            for p in &pts {
                let y = [p.x[0], p.x[1], p.x[2], p.z[0], p.z[1], p.z[2]];
                let va = a.eval_real(&y);
                assert!(rel((va - b.eval_real(&y)).norm(), va.norm()) <= TOL);
            }
            let g3 = t.x_profile();
            for d in sphere_sample(6) {
                for rho in [0.5, 1.0, 2.0] {
                    let fa = fiber_sublaplacian(rho, d.omega(), &g3);
                    let fb = fiber_sublaplacian_expanded(rho, d.omega(), &g3);
                    for p in &pts {
                        let va = fa.eval_real(&p.x);
                        assert!(rel((va - fb.eval_real(&p.x)).norm(), va.norm()) <= TOL);
                    }
                }
            }
        }
        for eps in [0.5, 2.0, 3.0] {
            let fe = f.dilate(eps);
            for p in &pts {
                let lhs = apply_sublaplacian(&fe, p);
                let rhs = eps * eps * apply_sublaplacian(f, &dilate(p, eps));
                assert!(
                    rel((lhs - rhs).norm(), rhs.norm()) <= TOL,
                    "homogeneity at eps {eps}: {}",
                    rel((lhs - rhs).norm(), rhs.norm())
                );
            }
        }
    }
}

// criterion 4: intertwining and conjugation residuals
#[test]
fn c04_fiber_extension_intertwines_and_conjugates() {
    const TOL: f64 = 1e-8;
    let corpus = identity_corpus(45, 4);
    let pts = group_points(46, 20);
    for f in &corpus {
        let g = f.terms[0].x_profile();
        for d in sphere_sample(10) {
            for rho in [0.5, 1.0, 2.0] {
                for p in &pts {
                    let res = intertwining_residual(rho, &d, &g, p);
                    let scale = intertwining_scale(rho, &d, &g, p);
                    assert!(res <= TOL * scale, "intertwining {res} vs scale {scale}");
                }
            }
        }
    }
    let mut g = Gauss::<3>::gaussian(C64::new(1.0, -0.3), [C64::new(0.5, 0.0); 3], [0.3, -0.1, 0.2]);
    g.poly = g.poly.mul(&Poly::one().add(&Poly::monomial([0, 2, 0], C64::new(0.4, 0.0))));
    let pts3: Vec<Vec3> = pts.iter().take(6).map(|p| p.x).collect();
    for d in sphere_sample(10) {
        for rho in [0.5, 1.0, 2.0] {
            let res = conjugated_fiber_residual(rho, &adapted_frame(&d), &g, &pts3);
            assert!(res <= TOL, "conjugation at rho {rho}: {res}");
        }
    }
}

// criterion 5: eigenvalues, idempotence, completeness, ground exactness
#[test]
fn c05_twisted_projections_resolve_the_spectrum() {
    const EIG_TOL: f64 = 1e-6;
    const ALG_TOL: f64 = 1e-8;
    const TAIL_TOL: f64 = 1e-6;
    let n = 128;
    let eng = default_engine();

    for lambda in [0.5, 1.0, 2.0] {
        let half = box_half_width(lambda, 8, 1e-12).max(9.0);
        let g = Grid2::sample(n, half, &plane_probe());
        assert!(g.is_admitted());
        for k in 0..=8 {
            let pk = lambda_project(&g, lambda, k, eng);
            if pk.norm_l2() < 1e-6 * g.norm_l2() {
                continue;
            }
            let want = pk.scale(C64::new(lambda * (2 * k + 1) as f64, 0.0));
            let res = apply_twisted_laplacian(&pk, lambda).sub(&want).norm_l2() / want.norm_l2();
            assert!(res <= EIG_TOL, "lambda {lambda} k {k}: eigen residual {res}");
        }
    }

    let lambda = 1.0;
    let probe = plane_probe();
    let pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [0.7, -0.3], [-1.1, 0.4], [0.2, 1.3]];
    for k in 0..=2usize {
        let p1 = lambda_project_sym(&probe, lambda, k, 1.0);
        let p2 = lambda_project_sym(&p1, lambda, k, 1.0);
        let q = lambda_project_sym(&p1, lambda, k + 1, 1.0);
        for w in &pts {
            let v1 = p1.eval_real(w);
            assert!(rel((p2.eval_real(w) - v1).norm(), v1.norm()) <= ALG_TOL);
            assert!(rel(q.eval_real(w).norm(), v1.norm()) <= ALG_TOL);
        }
    }

    let beta = 0.45 * lambda;
    let kk = completeness_rank(lambda, &[beta], TAIL_TOL);
    let half = box_half_width(lambda, kk, 1e-12).max(9.0);
    let g = Grid2::from_fn(n, half, |s, t| {
        C64::new((1.0 + 0.3 * s) * (-beta * (s * s + t * t)).exp(), 0.0)
    });
    let mut acc = Grid2::zeros(n, half);
    for k in 0..=kk {
        acc = acc.add(&lambda_project(&g, lambda, k, eng));
    }
    let tail = acc.sub(&g).norm_l2() / g.norm_l2();
    assert!(tail <= TAIL_TOL, "completeness tail {tail} through k = {kk}");

    for lambda in [0.5, 1.0, 2.0] {
        let g0 = Gauss::<2>::gaussian(ONE, [C64::new(lambda / 4.0, 0.0); 2], [0.0, 0.0]);
        let p0 = lambda_project_sym(&g0, lambda, 0, 1.0);
        for w in &pts {
            let v = g0.eval_real(w);
            assert!(rel((p0.eval_real(w) - v).norm(), v.norm()) <= ALG_TOL);
        }
        for k in 1..=3usize {
            let pk = lambda_project_sym(&g0, lambda, k, 1.0);
            for w in &pts {
                assert!(rel(pk.eval_real(w).norm(), g0.eval_real(w).norm()) <= ALG_TOL);
            }
        }
    }
}

// criterion 6: dense oracle at n = 64, clusters and projections
#[test]
fn c06_dense_oracle_confirms_spectrum_and_projections() {
    const CLUSTER_TOL: f64 = 1e-3;
    const PROJ_TOL: f64 = 1e-4;
    let lambda = 1.0;
    let m = discretize_twisted(lambda, 64, oracle_half_width(lambda), "spectral").unwrap();
    let eig = eigensystem(&m).unwrap();
    assert!((eig.evals[0] - lambda).abs() / lambda <= CLUSTER_TOL);
    for (k, med) in cluster_medians(&eig, 8).iter().enumerate() {
        let target = lambda * (2 * k + 1) as f64;
        let med = med.unwrap_or_else(|| panic!("empty cluster at k = {k}"));
        let err = (med - target).abs() / target;
        assert!(err <= CLUSTER_TOL, "cluster {k}: relative error {err}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..20 {
        let g = nilspec_cli::checks::random_plane_fn(&mut rng);
        for k in 0..=8 {
            let d = compare_lambda_projection(&m, &eig, k, &g)
                .unwrap_or_else(|e| panic!("member {i} level {k} refused: {e}"));
            assert!(d <= PROJ_TOL, "member {i} level {k}: discrepancy {d}");
        }
    }
}

// criterion 7: closed forms, inversion round trip, fiber Plancherel
#[test]
fn c07_central_transform_closed_forms_invert_and_conserve() {
    const FORM_TOL: f64 = 1e-10;
    const INV_TOL: f64 = 1e-6;
    const PLANCH_TOL: f64 = 1e-8;

    let mut terms = vec![
        AnalyticTerm::gaussian(ONE, 0.8, 0.7),
        AnalyticTerm::gaussian(C64::new(0.4, -0.2), 1.2, 1.3),
    ];
    terms[1].center_z = [0.2, -0.1, 0.3];
    let f = AnalyticFn { terms };
    let xs: [Vec3; 2] = [[0.3, -0.4, 0.1], [0.0, 0.7, -0.2]];
    let mus: [Vec3; 2] = [[0.3, 0.0, 0.0], [0.7, 0.4, -1.1]];
    for mu in &mus {
        let slice = central_transform(&f, *mu);
        for x in &xs {
            let got = slice.eval(x);
            let mut want = C64::new(0.0, 0.0);
            for t in &f.terms {
                let ru2: f64 = x.iter().zip(&t.center_x).map(|(a, b)| (a - b) * (a - b)).sum();
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
            assert!(rel((got - want).norm(), want.norm()) <= FORM_TOL);
        }
    }

    let corpus = identity_corpus(47, 2);
    let pts = group_points(48, 4);
    let sphere = sphere_rule(16, 32);
    for f in &corpus {
        let got = invert_spherical_many(f, &pts, &sphere, 48);
        for (v, p) in got.iter().zip(&pts) {
            let want = f.eval(p);
            assert!(rel((v - want).norm(), want.norm()) <= INV_TOL);
        }
    }

    for f in &corpus {
        for mu in &[[0.7, 0.4, -1.1], [0.0, 0.0, 1.3]] {
            let slice = central_transform(f, *mu);
            let frame = adapted_frame(&Direction::new(*mu));
            for g in rotate_slice(&slice, &frame) {
                let gam = g.gamma[2];
                assert!(gam.re > 0.0);
                let center = g.lin[2].im;
                let width = (2.0 * gam.re * 60.0).sqrt();
                let lhs: f64 = gauss_legendre_on(96, center - width, center + width)
                    .iter()
                    .map(|&(xi, w)| w * fiber_fourier(&g, xi).norm_l2_sq())
                    .sum();
                let rhs = 2.0 * std::f64::consts::PI * g.norm_l2_sq_all();
                assert!((lhs - rhs).abs() / rhs <= PLANCH_TOL);
            }
        }
    }
}

// criterion 8: density slices are eigenfunctions; resummation converges
#[test]
fn c08_density_slices_are_eigenfunctions_and_resum() {
    const EIG_TOL: f64 = 1e-3;
    const REC_TOL: f64 = 1e-2;
    let pts = default_eval_points();
    for f in &tensor_corpus(31, 3) {
        let spec = QuadratureSpec::for_fn(QuadratureParams::default(), f);
        for mu in [0.5, 1.0, 4.0] {
            match eigen_residual(f, mu, &spec, &pts).unwrap() {
                EigenOutcome::Residual(r) => {
                    assert!(r <= EIG_TOL, "mu {mu}: eigen residual {r}");
                }
                EigenOutcome::Indeterminate { .. } => {
                    panic!("degenerate slice on a healthy corpus member at mu {mu}")
                }
            }
        }
    }

    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.5, 1.0));
    let want: Vec<C64> = pts.iter().map(|p| f.eval(p)).collect();
    let err_with = |n_mu: usize| -> f64 {
        let params = QuadratureParams { n_mu, ..Default::default() };
        let spec = QuadratureSpec::for_fn(params, &f);
        let got = reconstruct(&f, &spec, &pts).unwrap();
        let num: f64 =
            got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = want.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        num / den
    };
    let default_err = err_with(QuadratureParams::default().n_mu);
    assert!(default_err <= REC_TOL, "default-spec reconstruction error {default_err}");
    let coarse = err_with(10);
    let fine = err_with(20);
    assert!(
        fine <= coarse / 2.0 + 1e-7,
        "no refinement order: {coarse:.3e} -> {fine:.3e}"
    );
}

// criterion 9: covariance of the density family under dilation
#[test]
fn c09_density_family_is_dilation_covariant() {
    const TOL: f64 = 1e-6;
    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.7, 0.9));
    let spec = QuadratureSpec::for_fn(QuadratureParams::default(), &f);
    let pts = default_eval_points();
    for eps in [0.5, 2.0] {
        for mu in [1.0, 4.0] {
            let r = dilation_covariance_residual(&f, mu, eps, &spec, &pts).unwrap();
            assert!(r <= TOL, "eps {eps}, mu {mu}: covariance residual {r}");
        }
    }
}

// criterion 10: fitted scale exponent of the restriction ratio
#[test]
fn c10_restriction_ratio_scales_with_dilation_exponent() {
    const SLOPE_TOL: f64 = 0.05;
    let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 1.0, 1.0));
    let mp = MixedNormParams::new(1.2, 2.0).unwrap();
    let params = QuadratureParams {
        n_theta: 10,
        n_phi: 20,
        n_xi: 17,
        n_mu: 8,
        ..Default::default()
    };
    let quad = NormQuad { n_radial: 12, n_polar: 6, ..Default::default() };
    let fit = mu_exponent_fit(&f, mp, &[0.25, 1.0, 4.0, 16.0], &params, &quad).unwrap();
    // the bound is to the dilation-implied exponent; the nominal value is
    // carried alongside in the report and deliberately not asserted
    assert!(
        (fit.slope - fit.dilation_exponent).abs() <= SLOPE_TOL,
        "slope {} vs dilation exponent {} (nominal exponent {})",
        fit.slope,
        fit.dilation_exponent,
        fit.nominal_exponent
    );
    assert!(fit.fit_rms <= 1e-6, "ratio rows are not a power law: rms {}", fit.fit_rms);
}

// criterion 11: level-growth trend of normalized projection ratios
#[test]
fn c11_projection_growth_follows_gamma() {
    const SLOPE_TOL: f64 = 0.15;
    let lambda = 1.0;
    let eng = default_engine();
    let half = box_half_width(lambda, 8, 1e-12).max(9.0);
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let family: Vec<Grid2> = (0..5)
        .map(|_| Grid2::sample(64, half, &nilspec_cli::checks::random_plane_fn(&mut rng)))
        .collect();
    for g in &family {
        assert!(g.is_admitted());
    }
    for p in [1.0, 1.2, 2.0] {
        let rows: Vec<(f64, f64)> = (0..=8usize)
            .map(|k| {
                ((2 * k + 1) as f64, kr_ratio_probe(lambda, k, p, &family, eng))
            })
            .collect();
        let (slope, _, _) = nilspec::normharness::fit_log_log(&rows);
        assert!(slope.abs() <= SLOPE_TOL, "p {p}: normalized slope {slope}");
    }
    // the growth exponent at the three pinned p, exact in rationals
    use nilspec::normharness::twisted_projection_exponent_exact as gamma_exact;
    assert_eq!(gamma_exact(Ratio::new(1, 1)), Ratio::new(0, 1));
    assert_eq!(gamma_exact(Ratio::new(5, 6)), Ratio::new(-1, 6));
    assert_eq!(gamma_exact(Ratio::new(1, 2)), Ratio::new(0, 1));
    assert_eq!(gamma_exponent(1.0), 0.0);
    assert!((gamma_exponent(1.2) + 1.0 / 6.0).abs() <= 1e-15);
    assert_eq!(gamma_exponent(2.0), 0.0);
}

// criterion 12: series exponent plateau and the fitted-constant bound
#[test]
fn c12_series_exponent_is_flat_and_bounds_hold() {
    // exact rational: E(6/5, p) = -5/2 across the plateau
    let s = Ratio::new(6, 5);
    for j in 0..50 {
        // p from 1 to 6/5 in 49 rational steps
        let p = Ratio::new(245 + j, 245);
        assert_eq!(series_exponent_exact(s, p), Ratio::new(-5, 2), "p = {p}");
        let pf = *p.numer() as f64 / *p.denom() as f64;
        assert!((series_exponent(1.2, pf).unwrap() + 2.5).abs() <= 1e-12);
    }
    // the claimed ceilings hold across s <= 6/5 and the full p range
    for i in 0..50 {
        let s = 1.0 + 0.2 * i as f64 / 49.0;
        for j in 0..50 {
            let p = 1.0 + j as f64 / 49.0;
            let e = series_exponent(s, p).unwrap();
            assert!(
                e <= series_claim_ceiling(p) + 1e-12,
                "E({s}, {p}) = {e} above ceiling {}",
                series_claim_ceiling(p)
            );
        }
    }

    // fitted-constant bound on the pinned radius grids; r below one is
    // excluded at s = 1 where the ratio is exactly constant only from the
    // reference radius up
    let eta = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 1.0, 1.0));
    let quad = NormQuad::for_fn(&eta, &NormQuad::default());
    let sphere = sphere_rule(8, 16);
    let reference_r = 1.0;
    for s in [1.0, 1.2, 4.0 / 3.0] {
        let rs: &[f64] =
            if s == 1.0 { &[1.0, 2.0, 4.0, 8.0] } else { &[0.5, 1.0, 2.0, 4.0, 8.0] };
        let rows = tomas_stein_sweep(&eta, rs, s, &sphere, &quad).unwrap();
        let fitted = rows.iter().find(|&&(r, _)| r == reference_r).unwrap().1;
        for &(r, v) in &rows {
            assert!(
                v <= fitted * (1.0 + 1e-12),
                "s {s}, r {r}: ratio {v} above fitted constant {fitted}"
            );
        }
    }
}

// criterion 13: reports are byte-identical across reruns and worker counts
#[test]
fn c13_reports_are_byte_identical_across_workers() {
    use std::fs;
    use std::process::Command;

    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("validate.json");
    fs::write(&cfg_path, "{\n  \"oracle_n\": 24,\n  \"corpus_count\": 3\n}\n").unwrap();

    let run = |out: &str, workers: &str| {
        let out_dir = dir.path().join(out);
        let output = Command::new(env!("CARGO_BIN_EXE_nilspec"))
            .args(["validate", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out_dir)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "validate failed: {}{}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
        let mut files: Vec<_> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        (output.stdout, files)
    };

    let (stdout_a, files_a) = run("a", "1");
    let (stdout_b, files_b) = run("b", "3");
    assert_eq!(stdout_a, stdout_b, "stdout differs across worker counts");
    assert_eq!(files_a.len(), files_b.len());
    assert_eq!(files_a.len(), 2, "expected a csv and a json report");
    for (fa, fb) in files_a.iter().zip(&files_b) {
        assert_eq!(fa.file_name(), fb.file_name(), "report names differ");
        assert_eq!(
            fs::read(fa).unwrap(),
            fs::read(fb).unwrap(),
            "report bytes differ: {fa:?}"
        );
    }
}
