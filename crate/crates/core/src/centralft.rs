//! Partial Fourier transform in the central variables and its spherical
//! inversion.
//!
//! For the analytic family every step is closed form: the z-integral of a
//! shifted Gaussian is explicit, so a slice at frequency mu is a sum of
//! Gaussian-polynomial x-profiles with scalar prefactors. Transforms are
//! defined with kernel e^{-i mu . z}; the inversion carries the full
//! (2 pi)^{-3}, and the one-dimensional fiber transform carries 2 pi in its
//! Plancherel identity. Round trips are exact identities under this
//! convention and the tests treat them as such.
//!
//! A gridded fallback path (periodic box, discrete Fourier sum, trilinear
//! resampling) exists for inputs outside the family; the analytic path is
//! authoritative wherever both apply.

use crate::analytic::{AnalyticFn, AnalyticTerm};
use crate::gauss::Gauss;
use crate::nilgeom::{dot, scale, transpose, AdaptedFrame, GroupPoint, Vec3};
use crate::quadrature::{gauss_legendre_on, SphereRule};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);

/// f^mu(x) = int e^{-i mu . z} f(x, z) dz, stored as one Gaussian-polynomial
/// x-profile per term of the parent function.
#[derive(Debug, Clone)]
pub struct CentralSlice {
    pub mu: Vec3,
    pub parts: Vec<Gauss<3>>,
}

impl CentralSlice {
    pub fn eval(&self, x: &Vec3) -> C64 {
        self.parts.iter().map(|g| g.eval_real(x)).sum()
    }
}

/// The scalar a term's x-profile picks up in a central slice: the z-factor
/// integrates to
///     coeff . e^{-i mu . z0} (pi / b)^{3/2} e^{-|mu|^2 / (4 b)}.
pub fn term_weight(t: &AnalyticTerm, mu: Vec3) -> C64 {
    let b = t.width_z;
    let amp = (PI / b).powf(1.5) * (-dot(mu, mu) / (4.0 * b)).exp();
    let phase = C64::new(0.0, -dot(mu, t.center_z)).exp();
    t.coeff * amp * phase
}

/// Closed-form central transform: per term, the weight above times the
/// untouched x-profile.
pub fn central_transform(f: &AnalyticFn, mu: Vec3) -> CentralSlice {
    let parts = f
        .terms
        .iter()
        .map(|t| t.x_profile().scale(term_weight(t, mu)))
        .collect();
    CentralSlice { mu, parts }
}

/// Radius beyond which every term's transform satisfies
/// rho^2 |f^{rho omega}| <= tol relative to its own scale, from the
/// e^{-rho^2/(4b)} tail (fixed point in rho^2, a few iterations).
pub fn rho_cutoff(f: &AnalyticFn, tol: f64) -> f64 {
    assert!(tol > 0.0 && tol < 1.0);
    let mut r_max: f64 = 2.0;
    for t in &f.terms {
        let base = (1.0 / tol).ln();
        let mut r2 = 4.0 * t.width_z * base;
        for _ in 0..4 {
            r2 = 4.0 * t.width_z * (base + r2.max(1.0).ln());
        }
        r_max = r_max.max(r2.sqrt());
    }
    r_max
}

/// Spherical inversion
///     f(p) = (2 pi)^{-3} int_S int_0^inf e^{i rho omega . z} f^{rho omega}(x)
///            rho^2 drho domega,
/// with Gauss-Legendre in rho on [0, R] (R from the transform tail) and the
/// provided sphere rule. Slices are rebuilt per node from the parent f.
pub fn invert_spherical(
    f: &AnalyticFn,
    p: &GroupPoint,
    sphere: &SphereRule,
    n_rho: usize,
) -> C64 {
    invert_spherical_many(f, std::slice::from_ref(p), sphere, n_rho)[0]
}

/// Same inversion evaluated at several points, sharing the per-node slices.
pub fn invert_spherical_many(
    f: &AnalyticFn,
    points: &[GroupPoint],
    sphere: &SphereRule,
    n_rho: usize,
) -> Vec<C64> {
    let r = rho_cutoff(f, 1e-13);
    let rho_rule = gauss_legendre_on(n_rho, 0.0, r);
    let mut acc = vec![ZERO; points.len()];
    for (dir, w_omega) in &sphere.nodes {
        let om = dir.omega();
        for &(rho, w_rho) in &rho_rule {
            let slice = central_transform(f, scale(om, rho));
            let w = w_omega * w_rho * rho * rho;
            for (a, p) in acc.iter_mut().zip(points) {
                let osc = C64::new(0.0, rho * dot(om, p.z)).exp();
                *a += w * osc * slice.eval(&p.x);
            }
        }
    }
    let norm = (2.0 * PI).powi(3);
    acc.into_iter().map(|v| v / norm).collect()
}

/// Re-parameterize a slice in the adapted coordinates of a frame: returns
/// g with g(R x) = f^mu(x), i.e. g = f^mu composed with R^T. Axes 0, 1 span
/// the twist plane, axis 2 is the radical direction.
pub fn rotate_slice(slice: &CentralSlice, frame: &AdaptedFrame) -> Vec<Gauss<3>> {
    let rt = transpose(&frame.r);
    slice.parts.iter().map(|g| g.rotate(&rt)).collect()
}

/// One-dimensional Fourier transform along the radical axis at frequency xi,
/// returning the plane profile: (F g)(x, y; xi) = int e^{-i v xi} g(x, y, v) dv.
pub fn fiber_fourier(g: &Gauss<3>, xi: f64) -> Gauss<2> {
    g.fourier_axis(2, xi).project_plane([0, 1])
}

// --- gridded fallback --------------------------------------------------------

/// Samples of a function of three real variables on a uniform periodic box
/// [-half, half)^3; data[(i n + j) n + l] sits at (coord(i), coord(j), coord(l)).
#[derive(Debug, Clone)]
pub struct Grid3 {
    pub n: usize,
    pub half: f64,
    pub data: Vec<C64>,
}

impl Grid3 {
    pub fn from_fn(n: usize, half: f64, f: impl Fn(Vec3) -> C64) -> Self {
        assert!(n >= 8 && half > 0.0);
        let h = 2.0 * half / n as f64;
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let x = -half + i as f64 * h;
            for j in 0..n {
                let y = -half + j as f64 * h;
                for l in 0..n {
                    let z = -half + l as f64 * h;
                    data.push(f([x, y, z]));
                }
            }
        }
        Grid3 { n, half, data }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half / self.n as f64
    }

    /// Trilinear interpolation; zero outside the box (tails are assumed to
    /// have decayed). Second-order accurate in the spacing.
    pub fn trilinear(&self, p: Vec3) -> C64 {
        let h = self.spacing();
        let n = self.n;
        let mut idx = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let u = (p[a] + self.half) / h;
            if u < 0.0 || u >= (n - 1) as f64 {
                return ZERO;
            }
            let fl = u.floor();
            idx[a] = fl as usize;
            frac[a] = u - fl;
        }
        let at = |di: usize, dj: usize, dl: usize| {
            self.data[((idx[0] + di) * n + idx[1] + dj) * n + idx[2] + dl]
        };
        let mut out = ZERO;
        for di in 0..2 {
            let wi = if di == 0 { 1.0 - frac[0] } else { frac[0] };
            for dj in 0..2 {
                let wj = if dj == 0 { 1.0 - frac[1] } else { frac[1] };
                for dl in 0..2 {
                    let wl = if dl == 0 { 1.0 - frac[2] } else { frac[2] };
                    out += at(di, dj, dl) * (wi * wj * wl);
                }
            }
        }
        out
    }

    /// Resample under a linear map: out(y) = self(m y), interpolated.
    pub fn resample(&self, m: &[[f64; 3]; 3]) -> Grid3 {
        let n = self.n;
        let half = self.half;
        let h = self.spacing();
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let x = -half + i as f64 * h;
            for j in 0..n {
                let y = -half + j as f64 * h;
                for l in 0..n {
                    let z = -half + l as f64 * h;
                    data.push(self.trilinear(crate::nilgeom::mat_apply(m, [x, y, z])));
                }
            }
        }
        Grid3 { n, half, data }
    }

    /// Discrete Fourier sum h^3 sum e^{-i mu . z} f(z): the trapezoid rule
    /// for the transform, spectrally accurate once the box holds the tails.
    pub fn fourier_at(&self, mu: Vec3) -> C64 {
        let h = self.spacing();
        let n = self.n;
        let mut acc = ZERO;
        for i in 0..n {
            let x = -self.half + i as f64 * h;
            for j in 0..n {
                let y = -self.half + j as f64 * h;
                for l in 0..n {
                    let z = -self.half + l as f64 * h;
                    let ph = -(mu[0] * x + mu[1] * y + mu[2] * z);
                    acc += self.data[(i * n + j) * n + l] * C64::new(0.0, ph).exp();
                }
            }
        }
        acc * C64::new(h * h * h, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{identity_corpus, rotation_about, AnalyticFn, AnalyticTerm};
    use crate::nilgeom::{adapted_frame, mat_apply, Direction};
    use crate::poly::Poly;
    use crate::quadrature::sphere_rule;
    use crate::twisted::{lambda_project_sym, lambda_project_sym3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ONE: C64 = C64::new(1.0, 0.0);

    /// Independent oracle: trapezoid sum of e^{-i mu . z} f(x, z) over a
    /// z-box wide enough that tail and aliasing both sit below 1e-12.
    fn z_quadrature(f: &AnalyticFn, x: Vec3, mu: Vec3) -> C64 {
        let n = 64;
        let half = 7.5;
        let h = 2.0 * half / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let z1 = -half + i as f64 * h;
            for j in 0..n {
                let z2 = -half + j as f64 * h;
                for l in 0..n {
                    let z3 = -half + l as f64 * h;
                    let p = GroupPoint { x, z: [z1, z2, z3] };
                    let ph = -(mu[0] * z1 + mu[1] * z2 + mu[2] * z3);
                    acc += f.eval(&p) * C64::new(0.0, ph).exp();
                }
            }
        }
        acc * C64::new(h * h * h, 0.0)
    }

    #[test]
    fn gaussian_slice_closed_forms() {
        let f = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 1.0, 1.0));
        let amp = PI.powf(1.5);
        let xs: [Vec3; 3] = [[0.0, 0.0, 0.0], [0.7, -0.3, 0.4], [1.1, 0.2, -0.9]];

        let s0 = central_transform(&f, [0.0, 0.0, 0.0]);
        for x in &xs {
            let want = amp * (-dot(*x, *x)).exp();
            assert!((s0.eval(x) - want).norm() < 1e-12 * amp);
        }

        // |mu| = 2 along an axis and along an oblique direction
        for mu in [[0.0, 0.0, 2.0], scale([0.6, -0.48, 0.64], 2.0)] {
            assert!((dot(mu, mu) - 4.0).abs() < 1e-12);
            let s = central_transform(&f, mu);
            for x in &xs {
                let want = amp * (-1.0f64).exp() * (-dot(*x, *x)).exp();
                assert!((s.eval(x) - want).norm() < 1e-12 * amp);
            }
        }
    }

    #[test]
    fn slice_matches_z_quadrature() {
        // shifted centers and a polynomial factor, so the phase convention
        // and the profile bookkeeping are both exercised
        let mut t = AnalyticTerm::gaussian(C64::new(0.8, 0.3), 0.9, 0.7);
        t.center_z = [0.3, -0.2, 0.5];
        t.center_x = [0.2, 0.1, -0.3];
        let mut p = Poly::<3>::zero();
        p.add_term([1, 0, 0], ONE);
        p.add_term([0, 0, 2], C64::new(0.4, 0.0));
        t.xpoly = p;
        let f = AnalyticFn::single(t);

        let x: Vec3 = [0.4, -0.6, 0.2];
        for mu in [[0.0, 0.0, 0.0], [1.0, -0.5, 0.3], [0.0, 2.0, 0.0]] {
            let s = central_transform(&f, mu);
            let want = z_quadrature(&f, x, mu);
            assert!(
                (s.eval(&x) - want).norm() < 1e-10,
                "mu = {mu:?}: {} vs {}",
                s.eval(&x),
                want
            );
        }
    }

    #[test]
    fn odd_center_factor_vanishes_at_zero_frequency() {
        // difference of opposite z-shifts is odd in z1; mu = 0 integrates it away
        let mut plus = AnalyticTerm::gaussian(ONE, 1.0, 1.0);
        plus.center_z = [0.6, 0.0, 0.0];
        let mut minus = AnalyticTerm::gaussian(-ONE, 1.0, 1.0);
        minus.center_z = [-0.6, 0.0, 0.0];
        let f = AnalyticFn { terms: vec![plus, minus] };
        let s = central_transform(&f, [0.0, 0.0, 0.0]);
        for x in [[0.0, 0.0, 0.0], [0.5, 0.2, -0.1]] {
            assert!(s.eval(&x).norm() < 1e-14);
        }
    }

    #[test]
    fn spherical_inversion_round_trip() {
        let f = AnalyticFn {
            terms: identity_corpus(11, 2).into_iter().flat_map(|g| g.terms).collect(),
        };
        let sphere = sphere_rule(16, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut points = vec![GroupPoint { x: [0.0; 3], z: [0.0; 3] }];
        for _ in 0..10 {
            let mut x = [0.0; 3];
            let mut z = [0.0; 3];
            for a in 0..3 {
                x[a] = rng.gen_range(-1.0..1.0);
                z[a] = rng.gen_range(-1.0..1.0);
            }
            points.push(GroupPoint { x, z });
        }
        let got = invert_spherical_many(&f, &points, &sphere, 64);
        for (v, p) in got.iter().zip(&points) {
            let want = f.eval(p);
            assert!(
                (v - want).norm() < 1e-6,
                "at {:?}: {} vs {}",
                (p.x, p.z),
                v,
                want
            );
        }

        let zero = AnalyticFn::default();
        let v0 = invert_spherical(&zero, &points[0], &sphere, 16);
        assert!(v0.norm() == 0.0);
    }

    #[test]
    fn rotated_slice_reparameterizes_exactly() {
        let f = AnalyticFn {
            terms: identity_corpus(23, 3).into_iter().flat_map(|g| g.terms).collect(),
        };
        let slice = central_transform(&f, [0.9, -1.2, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);

        // north pole: the ledger gauge makes the frame the identity
        let north = adapted_frame(&Direction::new([0.0, 0.0, 1.0]));
        let g_north = rotate_slice(&slice, &north);
        for _ in 0..5 {
            let x: Vec3 = [
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            ];
            let lhs: C64 = g_north.iter().map(|g| g.eval_real(&x)).sum();
            assert!((lhs - slice.eval(&x)).norm() < 1e-12);
        }

        // random frames: g(R x) = slice(x) pointwise
        for _ in 0..4 {
            let om = Direction::new([
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
            let frame = adapted_frame(&om);
            let g = rotate_slice(&slice, &frame);
            for _ in 0..20 {
                let x: Vec3 = [
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                ];
                let y = mat_apply(&frame.r, x);
                let lhs: C64 = g.iter().map(|p| p.eval_real(&y)).sum();
                let rhs = slice.eval(&x);
                assert!(
                    (lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()),
                    "{lhs} vs {rhs}"
                );
            }
        }

        // an x-radial slice is the same function in every frame
        let radial = AnalyticFn::single(AnalyticTerm::gaussian(ONE, 0.8, 1.0));
        let rslice = central_transform(&radial, [0.0, 1.0, 0.0]);
        for _ in 0..3 {
            let om = Direction::new([
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
            let g = rotate_slice(&rslice, &adapted_frame(&om));
            for _ in 0..5 {
                let x: Vec3 = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let lhs: C64 = g.iter().map(|p| p.eval_real(&x)).sum();
                assert!((lhs - rslice.eval(&x)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fiber_transform_examples() {
        // g = e^{-(x^2 + y^2)} e^{-v^2}
        let g = Gauss::<3>::gaussian(ONE, [ONE; 3], [0.0; 3]);
        let s = PI.sqrt();

        let at0 = fiber_fourier(&g, 0.0);
        let at2 = fiber_fourier(&g, 2.0);
        for w in [[0.0f64, 0.0], [0.8, -0.5]] {
            let plane = (-(w[0] * w[0] + w[1] * w[1])).exp();
            assert!((at0.eval_real(&w) - s * plane).norm() < 1e-12);
            assert!((at2.eval_real(&w) - s * (-1.0f64).exp() * plane).norm() < 1e-12);
        }

        // odd in v: transform vanishes at xi = 0
        let odd = g.mul_var(2);
        let o0 = fiber_fourier(&odd, 0.0);
        for w in [[0.0, 0.0], [0.8, -0.5]] {
            assert!(o0.eval_real(&w).norm() < 1e-14);
        }
    }

    /// xi-quadrature of int ||F g (., xi)||^2 dxi against 2 pi ||g||^2, the
    /// fiber Plancherel identity under the stated convention.
    fn plancherel_defect(g: &Gauss<3>) -> f64 {
        let gam = g.gamma[2];
        assert!(gam.im.abs() < 1e-12);
        let center = g.lin[2].im;
        let width = (2.0 * gam.re * 60.0).sqrt();
        let rule = gauss_legendre_on(96, center - width, center + width);
        let lhs: f64 = rule
            .iter()
            .map(|&(xi, w)| w * fiber_fourier(g, xi).norm_l2_sq())
            .sum();
        let rhs = 2.0 * PI * g.norm_l2_sq_all();
        (lhs - rhs).abs() / rhs
    }

    #[test]
    fn fiber_transform_preserves_energy() {
        let plain = Gauss::<3>::gaussian(C64::new(0.7, 0.2), [C64::new(0.8, 0.0); 3], [
            0.3, -0.2, 0.5,
        ]);
        assert!(plancherel_defect(&plain) < 1e-8);

        let mut poly = Poly::<3>::zero();
        poly.add_term([0, 0, 0], ONE);
        poly.add_term([1, 0, 2], C64::new(0.5, -0.3));
        let mut fancy = plain.clone();
        fancy.poly = poly;
        assert!(plancherel_defect(&fancy) < 1e-8);

        // modulated along the fiber axis: the spectrum shifts, the energy stays
        let shifted = fancy.modulate(2, 1.7);
        assert!(plancherel_defect(&shifted) < 1e-8);

        // a slice off the production pipeline
        let f = identity_corpus(31, 1).remove(0);
        let slice = central_transform(&f, [0.7, 0.4, -1.1]);
        let frame = adapted_frame(&Direction::new([0.7, 0.4, -1.1]));
        let g = &rotate_slice(&slice, &frame)[0];
        assert!(plancherel_defect(g) < 1e-8);
    }

    #[test]
    fn projection_commutes_with_fiber_transform() {
        // Lambda_k acts in the plane, F along the fiber; the order must not
        // matter. Exercised on a rotated production slice.
        let f = identity_corpus(47, 1).remove(0);
        let rho = 1.3;
        let om = Direction::new([0.4, -0.7, 0.6]);
        let slice = central_transform(&f, scale(om.omega(), rho));
        let g = &rotate_slice(&slice, &adapted_frame(&om))[0];

        for &(lambda, k, xi) in &[(rho, 2usize, 0.6), (0.7, 1, -1.1), (2.0, 4, 0.0)] {
            let first_fiber = lambda_project_sym(&fiber_fourier(g, xi), lambda, k, 1.0);
            let first_plane = fiber_fourier(&lambda_project_sym3(g, lambda, k, 1.0), xi);
            let mut worst = 0.0f64;
            let mut scale_ref = 0.0f64;
            for w in [[0.0, 0.0], [0.5, 0.3], [-0.8, 0.2], [1.1, -0.6]] {
                let a = first_fiber.eval_real(&w);
                let b = first_plane.eval_real(&w);
                worst = worst.max((a - b).norm());
                scale_ref = scale_ref.max(a.norm());
            }
            assert!(
                worst <= 1e-6 * scale_ref.max(1e-3),
                "lambda {lambda} k {k} xi {xi}: defect {worst:.3e}"
            );
        }
    }

    #[test]
    fn grid_transform_matches_closed_form() {
        let mut t = AnalyticTerm::gaussian(C64::new(1.0, 0.5), 1.0, 0.8);
        t.center_z = [0.4, 0.0, -0.3];
        let f = AnalyticFn::single(t);
        let x: Vec3 = [0.5, -0.2, 0.3];
        let grid = Grid3::from_fn(48, 7.0, |z| f.eval(&GroupPoint { x, z }));
        for mu in [[0.0, 0.0, 0.0], [1.2, -0.4, 0.9]] {
            let got = grid.fourier_at(mu);
            let want = central_transform(&f, mu).eval(&x);
            assert!(
                (got - want).norm() < 1e-10,
                "mu {mu:?}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn trilinear_resampling_is_second_order() {
        let rot = rotation_about([0.3, -0.5, 0.8], 0.9);
        let func = |p: Vec3| {
            let r2 = dot(p, p);
            C64::new((1.0 + 0.3 * p[0]) * (-0.8 * r2).exp(), 0.0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec3> = (0..24)
            .map(|_| {
                [
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                ]
            })
            .collect();

        let err_at = |n: usize| {
            let grid = Grid3::from_fn(n, 6.0, func);
            let rotated = grid.resample(&rot);
            pts.iter()
                .map(|&p| (rotated.trilinear(p) - func(mat_apply(&rot, p))).norm())
                .fold(0.0f64, f64::max)
        };
        let coarse = err_at(48);
        let fine = err_at(96);
        let ratio = coarse / fine;
        assert!(
            ratio > 2.8 && ratio < 6.0,
            "halving the spacing scaled the error by {ratio:.2}, want about 4"
        );
    }
}
