//! The left-invariant vector fields, the sub-Laplacian, and the fiber
//! operators obtained by pushing the center to a character.
//!
//! Group functions live on six symbolic axes: 0..2 the first layer (x),
//! 3..5 the center (z). Fiber functions live on three axes. Every operator
//! here has polynomial coefficients, so it preserves the exponential part of
//! a Gaussian-polynomial and results accumulate with `add_like`.
//!
//! Two independent routes are kept for each second-order operator: composing
//! the first-order fields twice, and the expanded display with its multiplier
//! terms written out. Tests require the routes to agree; they share no code.

use crate::analytic::AnalyticFn;
use crate::gauss::Gauss;
use crate::nilgeom::{transpose, AdaptedFrame, Direction, GroupPoint, Vec3};
use crate::poly::{unit_exp, Poly};
use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);

fn eps(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

// --- symbolic backend, group level --------------------------------------------

/// X_a f for 0-based a: d/dx_a + (1/2) sum_c (x cross e_a)_c d/dz_c.
pub fn vector_field(a: usize, f: &Gauss<6>) -> Gauss<6> {
    let mut out = f.derivative(a);
    for c in 0..3 {
        for j in 0..3 {
            let s = eps(c, j, a);
            if s != 0.0 {
                let t = f.derivative(3 + c).mul_var(j).scale(C64::new(0.5 * s, 0.0));
                out = out.add_like(&t);
            }
        }
    }
    out
}

/// -sum_a X_a^2 f, by composing `vector_field` twice.
pub fn sublaplacian(f: &Gauss<6>) -> Gauss<6> {
    let mut out = Gauss::zero();
    for a in 0..3 {
        out = out.add_like(&vector_field(a, &vector_field(a, f)).scale(-C64::new(1.0, 0.0)));
    }
    out
}

/// The expanded second-order form,
///     -Delta_x - sum_a (x cross e_a) . grad_z d/dx_a
///     - (1/4)(|x|^2 Delta_z - (x . grad_z)^2),
/// assembled term by term without reusing `vector_field`.
pub fn sublaplacian_expanded(f: &Gauss<6>) -> Gauss<6> {
    let mut out = Gauss::zero();
    for a in 0..3 {
        out = out.add_like(&f.derivative(a).derivative(a).scale(-C64::new(1.0, 0.0)));
    }
    for a in 0..3 {
        for c in 0..3 {
            for j in 0..3 {
                let s = eps(c, j, a);
                if s != 0.0 {
                    let t = f
                        .derivative(a)
                        .derivative(3 + c)
                        .mul_var(j)
                        .scale(C64::new(-s, 0.0));
                    out = out.add_like(&t);
                }
            }
        }
    }
    for j in 0..3 {
        for c in 0..3 {
            let t = f
                .derivative(3 + c)
                .derivative(3 + c)
                .mul_var(j)
                .mul_var(j)
                .scale(C64::new(-0.25, 0.0));
            out = out.add_like(&t);
        }
    }
    for j in 0..3 {
        for k in 0..3 {
            let t = f
                .derivative(3 + j)
                .derivative(3 + k)
                .mul_var(j)
                .mul_var(k)
                .scale(C64::new(0.25, 0.0));
            out = out.add_like(&t);
        }
    }
    out
}

// --- symbolic backend, fiber level ---------------------------------------------

/// X_a^{rho omega} g for 0-based a: d/dx_a + (i rho / 2)(x cross omega)_a.
pub fn fiber_field(a: usize, rho: f64, omega: Vec3, g: &Gauss<3>) -> Gauss<3> {
    let mut out = g.derivative(a);
    for j in 0..3 {
        for k in 0..3 {
            let s = eps(a, j, k);
            if s != 0.0 {
                let t = g.mul_var(j).scale(C64::new(0.0, 0.5 * rho * s * omega[k]));
                out = out.add_like(&t);
            }
        }
    }
    out
}

/// -sum_a (X_a^{rho omega})^2 g, by composing `fiber_field` twice.
pub fn fiber_sublaplacian(rho: f64, omega: Vec3, g: &Gauss<3>) -> Gauss<3> {
    let mut out = Gauss::zero();
    for a in 0..3 {
        let t = fiber_field(a, rho, omega, &fiber_field(a, rho, omega, g));
        out = out.add_like(&t.scale(-C64::new(1.0, 0.0)));
    }
    out
}

/// The expanded fiber display,
///     -Delta - i rho (x cross omega) . grad + (rho^2/4)(|x|^2 - (omega . x)^2),
/// assembled directly.
pub fn fiber_sublaplacian_expanded(rho: f64, omega: Vec3, g: &Gauss<3>) -> Gauss<3> {
    let mut out = Gauss::zero();
    for a in 0..3 {
        out = out.add_like(&g.derivative(a).derivative(a).scale(-C64::new(1.0, 0.0)));
    }
    for c in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let s = eps(c, j, k);
                if s != 0.0 {
                    let t = g
                        .derivative(c)
                        .mul_var(j)
                        .scale(C64::new(0.0, -rho * s * omega[k]));
                    out = out.add_like(&t);
                }
            }
        }
    }
    let mut mult = Poly::<3>::zero();
    for j in 0..3 {
        mult.add_term(unit_exp::<3>(j).map(|e| e * 2), C64::new(1.0, 0.0));
        for k in 0..3 {
            let mut e = [0u8; 3];
            e[j] += 1;
            e[k] += 1;
            mult.add_term(e, C64::new(-omega[j] * omega[k], 0.0));
        }
    }
    let mut t = g.clone();
    t.poly = t.poly.mul(&mult);
    out.add_like(&t.scale(C64::new(rho * rho / 4.0, 0.0)))
}

/// The twisted plane operator
///     -(d/ds^2 + d/dt^2) - i lambda (t d/ds - s d/dt) + (lambda^2/4)(s^2 + t^2)
/// acting on the (s_axis, t_axis) variables of a Gaussian-polynomial.
pub fn twisted_laplacian_gauss<const N: usize>(
    lambda: f64,
    s_axis: usize,
    t_axis: usize,
    g: &Gauss<N>,
) -> Gauss<N> {
    let minus_one = -C64::new(1.0, 0.0);
    let mut out = g.derivative(s_axis).derivative(s_axis).scale(minus_one);
    out = out.add_like(&g.derivative(t_axis).derivative(t_axis).scale(minus_one));
    out = out.add_like(&g.derivative(s_axis).mul_var(t_axis).scale(C64::new(0.0, -lambda)));
    out = out.add_like(&g.derivative(t_axis).mul_var(s_axis).scale(C64::new(0.0, lambda)));
    let q = lambda * lambda / 4.0;
    out = out.add_like(&g.mul_var(s_axis).mul_var(s_axis).scale(C64::new(q, 0.0)));
    out.add_like(&g.mul_var(t_axis).mul_var(t_axis).scale(C64::new(q, 0.0)))
}

// --- identities ---------------------------------------------------------------

/// Extend a fiber profile to the group by the central character:
/// f(x, z) = e^{-i rho omega . z} g(x).
pub fn central_character_extension(rho: f64, omega: Vec3, g: &Gauss<3>) -> Gauss<6> {
    let mut gamma = [ZERO; 6];
    let mut lin = [ZERO; 6];
    for i in 0..3 {
        gamma[i] = g.gamma[i];
        lin[i] = g.lin[i];
        lin[3 + i] = C64::new(0.0, -rho * omega[i]);
    }
    let mut poly = Poly::<6>::zero();
    for (&e, &c) in &g.poly.terms {
        poly.add_term([e[0], e[1], e[2], 0, 0, 0], c);
    }
    Gauss { coeff: g.coeff, poly, gamma, lin }
}

/// |L(e^{-i rho omega.z} g)(p) - e^{-i rho omega.z}(L^{rho omega} g)(p)|,
/// both sides via independent symbolic routes.
pub fn intertwining_residual(rho: f64, omega: &Direction, g: &Gauss<3>, p: &GroupPoint) -> f64 {
    let w = omega.omega();
    let lhs = sublaplacian(&central_character_extension(rho, w, g));
    let rhs3 = fiber_sublaplacian_expanded(rho, w, g);
    let y = [p.x[0], p.x[1], p.x[2], p.z[0], p.z[1], p.z[2]];
    let phase = C64::new(0.0, -rho * (w[0] * p.z[0] + w[1] * p.z[1] + w[2] * p.z[2])).exp();
    let rhs = phase * rhs3.eval_real(&p.x);
    (lhs.eval_real(&y) - rhs).norm()
}

/// Scale for the intertwining contract: 1 + |L^{rho omega} g(p)|.
pub fn intertwining_scale(rho: f64, omega: &Direction, g: &Gauss<3>, p: &GroupPoint) -> f64 {
    let rhs3 = fiber_sublaplacian_expanded(rho, omega.omega(), g);
    1.0 + rhs3.eval_real(&p.x).norm()
}

/// Residual of the conjugated form: rotating to the adapted frame turns
/// L^{rho omega} into -d^2/dv^2 + (twisted operator in the transverse plane),
/// with v the coordinate along omega. Requires an isotropic Gaussian part.
pub fn conjugated_fiber_residual(
    rho: f64,
    frame: &AdaptedFrame,
    g: &Gauss<3>,
    pts: &[Vec3],
) -> f64 {
    let lhs_op = fiber_sublaplacian(rho, frame.v, g);
    let rt = transpose(&frame.r);
    let h = g.rotate(&rt);
    let minus_one = -C64::new(1.0, 0.0);
    let rhs_op = h
        .derivative(2)
        .derivative(2)
        .scale(minus_one)
        .add_like(&twisted_laplacian_gauss(rho, 0, 1, &h));
    let mut worst = 0.0f64;
    for &x in pts {
        let y = crate::nilgeom::mat_apply(&frame.r, x);
        let lhs = lhs_op.eval_real(&x);
        let rhs = rhs_op.eval_real(&y);
        let res = (lhs - rhs).norm() / (1.0 + lhs.norm());
        worst = worst.max(res);
    }
    worst
}


// --- pointwise API on the analytic family --------------------------------------

/// (X_a f)(p) for 1-based a, matching the displayed field formulas.
pub fn apply_vector_field(a: usize, f: &AnalyticFn, p: &GroupPoint) -> C64 {
    assert!((1..=3).contains(&a), "field index is 1-based");
    let y = [p.x[0], p.x[1], p.x[2], p.z[0], p.z[1], p.z[2]];
    f.terms
        .iter()
        .map(|t| vector_field(a - 1, &t.to_gauss6()).eval_real(&y))
        .sum()
}

/// (L f)(p) on the analytic family, via the composed route.
pub fn apply_sublaplacian(f: &AnalyticFn, p: &GroupPoint) -> C64 {
    let y = [p.x[0], p.x[1], p.x[2], p.z[0], p.z[1], p.z[2]];
    f.terms
        .iter()
        .map(|t| sublaplacian(&t.to_gauss6()).eval_real(&y))
        .sum()
}

// --- finite-difference backend --------------------------------------------------

/// 4th-order central first derivative of a callable along one group axis
/// (0..2 = x, 3..5 = z).
fn fd4_partial(f: &dyn Fn(&GroupPoint) -> C64, p: &GroupPoint, axis: usize, h: f64) -> C64 {
    let shift = |d: f64| {
        let mut q = *p;
        if axis < 3 {
            q.x[axis] += d;
        } else {
            q.z[axis - 3] += d;
        }
        q
    };
    (f(&shift(-2.0 * h)) - f(&shift(2.0 * h)) + 8.0 * (f(&shift(h)) - f(&shift(-h))))
        / (12.0 * h)
}

/// (X_a f)(p) for 1-based a via 4th-order stencils on an arbitrary callable.
/// Independent of the symbolic backend; used to cross-check it.
pub fn apply_vector_field_fd(
    a: usize,
    f: &dyn Fn(&GroupPoint) -> C64,
    p: &GroupPoint,
    h: f64,
) -> C64 {
    assert!((1..=3).contains(&a), "field index is 1-based");
    let a0 = a - 1;
    let mut out = fd4_partial(f, p, a0, h);
    for c in 0..3 {
        let mut m = 0.0;
        for j in 0..3 {
            m += eps(c, j, a0) * p.x[j];
        }
        if m != 0.0 {
            out += 0.5 * m * fd4_partial(f, p, 3 + c, h);
        }
    }
    out
}

/// (L f)(p) via nested stencils.
pub fn apply_sublaplacian_fd(f: &dyn Fn(&GroupPoint) -> C64, p: &GroupPoint, h: f64) -> C64 {
    let mut out = ZERO;
    for a in 1..=3 {
        let inner = |q: &GroupPoint| apply_vector_field_fd(a, f, q, h);
        out -= apply_vector_field_fd(a, &inner, p, h);
    }
    out
}

// --- periodic grid discretization of the fiber operator -------------------------

/// Dense matrix of L^{rho omega} on an n^3 periodic grid over
/// [-half, half)^3 with 4th-order stencils, row-major over flattened
/// (i0, i1, i2) sites. The first-order multiplier (x cross omega)_c never
/// involves x_c, so the assembled matrix is Hermitian up to rounding; the
/// eigensolver relies on that.
pub fn fiber_matrix_fd4(rho: f64, omega: Vec3, n: usize, half: f64) -> (Vec<C64>, usize) {
    let dim = n * n * n;
    let hstep = 2.0 * half / n as f64;
    let coord = |i: usize| -half + i as f64 * hstep;
    let idx = |i: [usize; 3]| (i[0] * n + i[1]) * n + i[2];
    let mut m = vec![ZERO; dim * dim];
    // stencil weights at offsets -2..2
    let d1 = [1.0, -8.0, 0.0, 8.0, -1.0].map(|w| w / (12.0 * hstep));
    let d2 = [-1.0, 16.0, -30.0, 16.0, -1.0].map(|w| w / (12.0 * hstep * hstep));
    for i0 in 0..n {
        for i1 in 0..n {
            for i2 in 0..n {
                let site = [i0, i1, i2];
                let row = idx(site);
                let x = [coord(i0), coord(i1), coord(i2)];
                let xw = crate::nilgeom::cross(x, omega);
                for c in 0..3 {
                    for (off, (w1, w2)) in d1.iter().zip(&d2).enumerate() {
                        let mut nb = site;
                        nb[c] = (nb[c] + n + off - 2) % n;
                        let col = idx(nb);
                        // -d^2/dx_c^2 - i rho (x cross omega)_c d/dx_c
                        m[row * dim + col] += C64::new(-w2, -rho * xw[c] * w1);
                    }
                }
                let r2 = x.iter().map(|t| t * t).sum::<f64>();
                let wx = omega[0] * x[0] + omega[1] * x[1] + omega[2] * x[2];
                m[row * dim + row] += C64::new(rho * rho / 4.0 * (r2 - wx * wx), 0.0);
            }
        }
    }
    (m, dim)
}
