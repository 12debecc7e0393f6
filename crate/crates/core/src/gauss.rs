//! Closed-form calculus on Gaussian-polynomial functions
//!     f(y) = coeff * p(y) * exp( sum_i -gamma_i y_i^2 + lin_i y_i )
//! with diagonal complex quadratic part. The class is closed under products,
//! derivatives, axis-wise Gaussian integrals, partial Fourier transforms and
//! (in two variables) twisted convolution, which is everything the fiber
//! pipeline needs. Axes with gamma = lin = 0 and no polynomial dependence are
//! "dead": integrated out or never used.

use crate::poly::{unit_exp, Poly};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct Gauss<const N: usize> {
    pub coeff: C64,
    pub poly: Poly<N>,
    pub gamma: [C64; N],
    pub lin: [C64; N],
}

impl<const N: usize> Gauss<N> {
    pub fn zero() -> Self {
        Gauss { coeff: ZERO, poly: Poly::zero(), gamma: [ZERO; N], lin: [ZERO; N] }
    }

    /// coeff * exp(-sum gamma_i (y_i - c_i)^2), expanded into the diagonal form.
    pub fn gaussian(coeff: C64, gamma: [C64; N], center: [f64; N]) -> Self {
        let mut lin = [ZERO; N];
        let mut cf = coeff;
        for i in 0..N {
            lin[i] = 2.0 * gamma[i] * center[i];
            cf *= (-gamma[i] * center[i] * center[i]).exp();
        }
        Gauss { coeff: cf, poly: Poly::one(), gamma, lin }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == ZERO || self.poly.is_zero()
    }

    pub fn eval(&self, y: &[C64; N]) -> C64 {
        let mut ex = ZERO;
        for i in 0..N {
            ex += -self.gamma[i] * y[i] * y[i] + self.lin[i] * y[i];
        }
        self.coeff * self.poly.eval(y) * ex.exp()
    }

    pub fn eval_real(&self, y: &[f64; N]) -> C64 {
        let mut cy = [ZERO; N];
        for i in 0..N {
            cy[i] = C64::new(y[i], 0.0);
        }
        self.eval(&cy)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.coeff *= c;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut gamma = [ZERO; N];
        let mut lin = [ZERO; N];
        for i in 0..N {
            gamma[i] = self.gamma[i] + other.gamma[i];
            lin[i] = self.lin[i] + other.lin[i];
        }
        Gauss {
            coeff: self.coeff * other.coeff,
            poly: self.poly.mul(&other.poly),
            gamma,
            lin,
        }
    }

    pub fn conj(&self) -> Self {
        let terms = self
            .poly
            .terms
            .iter()
            .map(|(&e, &c)| (e, c.conj()))
            .collect();
        let mut gamma = [ZERO; N];
        let mut lin = [ZERO; N];
        for i in 0..N {
            gamma[i] = self.gamma[i].conj();
            lin[i] = self.lin[i].conj();
        }
        Gauss { coeff: self.coeff.conj(), poly: Poly { terms }, gamma, lin }
    }

    /// d/dy_axis, staying in the class.
    pub fn derivative(&self, axis: usize) -> Self {
        // (p e^E)' = (p' + p E') e^E with E' = -2 gamma y + lin
        let mut expfac = Poly::monomial(unit_exp::<N>(axis), -2.0 * self.gamma[axis]);
        expfac.add_term([0u8; N], self.lin[axis]);
        let poly = self.poly.derivative(axis).add(&self.poly.mul(&expfac));
        Gauss { coeff: self.coeff, poly, gamma: self.gamma, lin: self.lin }
    }

    /// Sum of two functions sharing the same exponential part. Differential
    /// operators with polynomial coefficients preserve the exponent, so their
    /// results can be accumulated this way; the coefficients are folded into
    /// the polynomials to keep the representation canonical.
    pub fn add_like(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        for i in 0..N {
            let scale = 1.0 + self.gamma[i].norm() + self.lin[i].norm();
            assert!(
                (self.gamma[i] - other.gamma[i]).norm() <= 1e-12 * scale
                    && (self.lin[i] - other.lin[i]).norm() <= 1e-12 * scale,
                "add_like requires matching exponents on axis {i}"
            );
        }
        let poly = self
            .poly
            .scale(self.coeff)
            .add(&other.poly.scale(other.coeff));
        Gauss { coeff: ONE, poly, gamma: self.gamma, lin: self.lin }
    }

    /// Multiply by the coordinate y_axis.
    pub fn mul_var(&self, axis: usize) -> Self {
        let mut out = self.clone();
        out.poly = out.poly.mul(&Poly::monomial(unit_exp::<N>(axis), ONE));
        out
    }

    /// Multiply by exp(i phase * y_axis).
    pub fn modulate(&self, axis: usize, phase: f64) -> Self {
        let mut out = self.clone();
        out.lin[axis] += C64::new(0.0, phase);
        out
    }

    /// Integrate y_axis over the real line. Requires Re gamma_axis > 0.
    /// The result has a dead axis in that slot.
    pub fn integrate_axis(&self, axis: usize) -> Self {
        let g = self.gamma[axis];
        assert!(g.re > 0.0, "integrate_axis needs decay, got gamma = {g}");
        let l = self.lin[axis];
        let parts = self.poly.collect_axis(axis);
        let shift = Poly::constant(l / (2.0 * g));
        let poly = reduce_moments(&parts, g, &shift);
        let mut gamma = self.gamma;
        let mut lin = self.lin;
        gamma[axis] = ZERO;
        lin[axis] = ZERO;
        let cf = self.coeff
            * (std::f64::consts::PI.sqrt() / g.sqrt())
            * (l * l / (4.0 * g)).exp();
        Gauss { coeff: cf, poly, gamma, lin }
    }

    /// Partial Fourier transform: integral of f(y) e^{-i xi y_axis} dy_axis.
    pub fn fourier_axis(&self, axis: usize, xi: f64) -> Self {
        self.modulate(axis, -xi).integrate_axis(axis)
    }

    /// Squared L^2 norm over all N axes, by conjugate product and
    /// closed-form integration. Requires decay on every axis.
    pub fn norm_l2_sq_all(&self) -> f64 {
        let mut p = self.mul(&self.conj());
        for i in 0..N {
            p = p.integrate_axis(i);
        }
        p.scalar().re
    }

    /// Extract the value of a fully dead function (all axes integrated/unused).
    pub fn scalar(&self) -> C64 {
        for i in 0..N {
            assert!(self.gamma[i] == ZERO && self.lin[i] == ZERO, "axis {i} alive");
        }
        let mut acc = ZERO;
        for (&e, &c) in &self.poly.terms {
            assert!(e.iter().all(|&x| x == 0), "polynomial axis alive");
            acc += c;
        }
        self.coeff * acc
    }
}

impl Gauss<3> {
    /// Compose with a rotation: returns h(y) = f(R y). The Gaussian part must be
    /// isotropic across the three axes for the class to be preserved.
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> Self {
        let g0 = self.gamma[0];
        for i in 1..3 {
            assert!(
                (self.gamma[i] - g0).norm() <= 1e-12 * (1.0 + g0.norm()),
                "rotation needs an isotropic quadratic part"
            );
        }
        // lin . (R y) = (R^T lin) . y
        let mut lin = [ZERO; 3];
        for j in 0..3 {
            for i in 0..3 {
                lin[j] += C64::new(r[i][j], 0.0) * self.lin[i];
            }
        }
        Gauss {
            coeff: self.coeff,
            poly: self.poly.compose_linear(r),
            gamma: self.gamma,
            lin,
        }
    }

    /// Restrict to the (axis0, axis1) plane, requiring the third axis dead.
    pub fn project_plane(&self, keep: [usize; 2]) -> Gauss<2> {
        let dropped = 3 - keep[0] - keep[1];
        assert!(self.gamma[dropped] == ZERO && self.lin[dropped] == ZERO);
        let mut poly = Poly::<2>::zero();
        for (&e, &c) in &self.poly.terms {
            assert!(e[dropped] == 0, "dropped axis alive in polynomial");
            poly.add_term([e[keep[0]], e[keep[1]]], c);
        }
        Gauss {
            coeff: self.coeff,
            poly,
            gamma: [self.gamma[keep[0]], self.gamma[keep[1]]],
            lin: [self.lin[keep[0]], self.lin[keep[1]]],
        }
    }
}

impl Gauss<2> {
    /// Squared L^2 norm over the plane.
    pub fn norm_l2_sq(&self) -> f64 {
        self.norm_l2_sq_all()
    }

    /// L^1 norm for nonnegative real functions (Gaussian corpus members);
    /// callers guarantee positivity.
    pub fn integral(&self) -> C64 {
        self.integrate_axis(0).integrate_axis(1).scalar()
    }
}

/// Twisted convolution of two plane Gaussian-polynomial functions:
///     (g x_lambda h)(S,T) = int g(S-u, T-v) h(u,v) e^{i eps lambda (S v - T u)/2} du dv.
/// Both factors must have isotropic Gaussian parts (gamma equal across the two
/// axes); the symplectic structure then cancels the S T cross terms exactly and
/// the result is again of this class.
pub fn twisted_conv(g: &Gauss<2>, h: &Gauss<2>, lambda: f64, eps: f64) -> Gauss<2> {
    assert!((g.gamma[0] - g.gamma[1]).norm() <= 1e-12 * (1.0 + g.gamma[0].norm()));
    assert!((h.gamma[0] - h.gamma[1]).norm() <= 1e-12 * (1.0 + h.gamma[0].norm()));
    let (gg, gh) = (g.gamma[0], h.gamma[0]);
    let big = gg + gh;
    assert!(big.re > 0.0, "twisted convolution integrand must decay");
    let il2 = C64::new(0.0, 0.5 * eps * lambda);

    // Work in four variables: 0=S, 1=T, 2=u, 3=v.
    let s4 = Poly::<4>::var(0);
    let t4 = Poly::<4>::var(1);
    let u4 = Poly::<4>::var(2);
    let v4 = Poly::<4>::var(3);
    let pg = compose_images(&g.poly, &[s4.sub(&u4), t4.sub(&v4)]);
    let ph = compose_images(&h.poly, &[u4.clone(), v4.clone()]);
    let mut integrand = pg.mul(&ph);

    // Linear coefficients of the integration variables after expanding the
    // exponent; each is an affine function of (S, T).
    // A_u = 2 gg S - lg0 + lh0 - (i eps lambda / 2) T
    let mut a_u = Poly::<4>::monomial(unit_exp::<4>(0), 2.0 * gg);
    a_u.add_term(unit_exp::<4>(1), -il2);
    a_u.add_term([0; 4], -g.lin[0] + h.lin[0]);
    // A_v = 2 gg T - lg1 + lh1 + (i eps lambda / 2) S
    let mut a_v = Poly::<4>::monomial(unit_exp::<4>(1), 2.0 * gg);
    a_v.add_term(unit_exp::<4>(0), il2);
    a_v.add_term([0; 4], -g.lin[1] + h.lin[1]);

    // Gaussian reduction in u then v (independent after completing the square).
    for (axis, a) in [(2usize, &a_u), (3usize, &a_v)] {
        let parts = integrand.collect_axis(axis);
        let shift = a.scale(ONE / (2.0 * big));
        integrand = reduce_moments(&parts, big, &shift);
    }

    // Exponent: base (S,T) part of g, plus A_u^2/(4 big) + A_v^2/(4 big).
    let quad = a_u.mul(&a_u).add(&a_v.mul(&a_v)).scale(ONE / (4.0 * big));
    let mut gamma = [g.gamma[0], g.gamma[1]];
    let mut lin = [g.lin[0], g.lin[1]];
    let mut cconst = ZERO;
    for (&e, &c) in &quad.terms {
        match (e[0], e[1]) {
            (0, 0) => cconst += c,
            (1, 0) => lin[0] += c,
            (0, 1) => lin[1] += c,
            (2, 0) => gamma[0] -= c,
            (0, 2) => gamma[1] -= c,
            (1, 1) => assert!(
                c.norm() <= 1e-9 * (1.0 + quad.max_norm()),
                "S T cross term failed to cancel: {c}"
            ),
            _ => unreachable!("quadratic expansion produced degree > 2"),
        }
    }

    let mut poly = Poly::<2>::zero();
    for (&e, &c) in &integrand.terms {
        assert!(e[2] == 0 && e[3] == 0, "integration variable survived");
        poly.add_term([e[0], e[1]], c);
    }
    let coeff =
        g.coeff * h.coeff * (std::f64::consts::PI / big) * cconst.exp();
    Gauss { coeff, poly, gamma, lin }
}

/// Substitute images for the variables of p: returns p(images[0], ..., images[M-1]).
pub fn compose_images<const M: usize, const N: usize>(
    p: &Poly<M>,
    images: &[Poly<N>; M],
) -> Poly<N> {
    let mut out = Poly::<N>::zero();
    for (&e, &c) in &p.terms {
        let mut term = Poly::<N>::constant(c);
        for i in 0..M {
            for _ in 0..e[i] {
                term = term.mul(&images[i]);
            }
        }
        out = out.add(&term);
    }
    out
}

/// Sum over m of parts[m] * E[(u + shift)^m] for u Gaussian with weight
/// exp(-g u^2), normalized so E[1] = 1 (the sqrt(pi/g) factor is the caller's).
/// shift may involve the surviving variables.
fn reduce_moments<const N: usize>(
    parts: &BTreeMap<u8, Poly<N>>,
    g: C64,
    shift: &Poly<N>,
) -> Poly<N> {
    let mmax = parts.keys().copied().max().unwrap_or(0) as usize;
    // shift powers and raw moments up to mmax
    let mut shift_pows: Vec<Poly<N>> = Vec::with_capacity(mmax + 1);
    shift_pows.push(Poly::one());
    for j in 1..=mmax {
        shift_pows.push(shift_pows[j - 1].mul(shift));
    }
    let mut moments = vec![ZERO; mmax + 1];
    moments[0] = ONE;
    for j in 2..=mmax {
        if j % 2 == 0 {
            // E[u^j] = (j-1)!! / (2g)^{j/2}, even j
            moments[j] = moments[j - 2] * C64::new((j - 1) as f64, 0.0) / (2.0 * g);
        }
    }
    let mut out = Poly::<N>::zero();
    for (&m, coefpoly) in parts {
        let m = m as usize;
        let mut binom = 1.0f64;
        for j in 0..=m {
            if j > 0 {
                binom = binom * (m - j + 1) as f64 / j as f64;
            }
            // binom(m, j) * E[u^{m-j}] * shift^j; odd moments vanish
            if (m - j) % 2 == 1 {
                continue;
            }
            let w = moments[m - j] * binom;
            out = out.add(&coefpoly.mul(&shift_pows[j]).scale(w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // Trapezoid quadrature on a wide box: spectrally accurate for functions
    // with sub-1e-14 tails, and independent of every closed form under test.
    fn trap1d(f: impl Fn(f64) -> C64, half: f64, n: usize) -> C64 {
        let h = 2.0 * half / n as f64;
        let mut acc = ZERO;
        for i in 0..=n {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += f(-half + i as f64 * h) * w;
        }
        acc * h
    }

    fn trap2d(f: impl Fn(f64, f64) -> C64, half: f64, n: usize) -> C64 {
        let h = 2.0 * half / n as f64;
        let mut acc = ZERO;
        for i in 0..=n {
            let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
            let x = -half + i as f64 * h;
            for j in 0..=n {
                let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
                let y = -half + j as f64 * h;
                acc += f(x, y) * wi * wj;
            }
        }
        acc * h * h
    }

    fn sample_g2() -> Gauss<2> {
        // (1 + s^2 t) * exp(-0.7(s - 0.3)^2 - 0.7(t + 0.5)^2) scaled by 2 - i
        let mut g = Gauss::<2>::gaussian(
            c(2.0, -1.0),
            [c(0.7, 0.0), c(0.7, 0.0)],
            [0.3, -0.5],
        );
        g.poly = g.poly.mul(&Poly::one().add(&Poly::monomial([2, 1], c(1.0, 0.0))));
        g
    }

    #[test]
    fn integrate_axis_matches_quadrature() {
        let g = sample_g2();
        let reduced = g.integrate_axis(0);
        for t in [-0.8, 0.0, 1.3] {
            let direct = trap1d(|s| g.eval_real(&[s, t]), 14.0, 4000);
            let closed = reduced.eval_real(&[0.0, t]);
            assert!(
                (direct - closed).norm() < 1e-10,
                "axis integral mismatch at t={t}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn fourier_axis_matches_quadrature() {
        let g = sample_g2();
        for xi in [0.0, 1.1, -2.4] {
            let hat = g.fourier_axis(1, xi);
            for s in [-0.6, 0.9] {
                let direct = trap1d(
                    |t| g.eval_real(&[s, t]) * (c(0.0, -xi * t)).exp(),
                    14.0,
                    4000,
                );
                let closed = hat.eval_real(&[s, 0.0]);
                assert!(
                    (direct - closed).norm() < 1e-10,
                    "fourier mismatch xi={xi} s={s}: {direct} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn rotation_matches_direct_eval() {
        let mut g3 = Gauss::<3>::gaussian(
            c(1.0, 0.5),
            [c(0.4, 0.0); 3],
            [0.2, -0.1, 0.4],
        );
        g3.poly = g3.poly.mul(&Poly::monomial([1, 0, 2], c(1.0, 0.0)));
        // rotation about an oblique axis
        let (cth, sth) = (0.36f64.cos(), 0.36f64.sin());
        let r = [
            [cth, -sth, 0.0],
            [sth * 0.6, cth * 0.6, -0.8],
            [sth * 0.8, cth * 0.8, 0.6],
        ];
        // r must be orthogonal for the test to make sense: orthonormalize rows
        let r = orthonormalize(r);
        let h = g3.rotate(&r);
        for y in [[0.3, -0.7, 0.2], [1.1, 0.4, -0.9]] {
            let ry = [
                r[0][0] * y[0] + r[0][1] * y[1] + r[0][2] * y[2],
                r[1][0] * y[0] + r[1][1] * y[1] + r[1][2] * y[2],
                r[2][0] * y[0] + r[2][1] * y[1] + r[2][2] * y[2],
            ];
            assert!((h.eval_real(&y) - g3.eval_real(&ry)).norm() < 1e-12);
        }
    }

    fn orthonormalize(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut r = m;
        for i in 0..3 {
            for j in 0..i {
                let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                for k in 0..3 {
                    r[i][k] -= d * r[j][k];
                }
            }
            let n: f64 = (0..3).map(|k| r[i][k] * r[i][k]).sum::<f64>().sqrt();
            for k in 0..3 {
                r[i][k] /= n;
            }
        }
        r
    }

    #[test]
    fn twisted_conv_matches_quadrature() {
        let g = sample_g2();
        let mut h = Gauss::<2>::gaussian(
            c(0.8, 0.2),
            [c(0.5, 0.0), c(0.5, 0.0)],
            [-0.2, 0.1],
        );
        h.poly = h.poly.mul(&Poly::one().add(&Poly::monomial([0, 2], c(0.0, 0.5))));
        let lambda = 1.3;
        for eps in [1.0, -1.0] {
            let conv = twisted_conv(&g, &h, lambda, eps);
            for (s, t) in [(0.4, -0.3), (-1.0, 0.7)] {
                let direct = trap2d(
                    |u, v| {
                        g.eval_real(&[s - u, t - v])
                            * h.eval_real(&[u, v])
                            * (c(0.0, 0.5 * eps * lambda * (s * v - t * u))).exp()
                    },
                    16.0,
                    1600,
                );
                let closed = conv.eval_real(&[s, t]);
                assert!(
                    (direct - closed).norm() < 1e-8,
                    "twisted conv mismatch eps={eps} at ({s},{t}): {direct} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn l2_norm_matches_quadrature() {
        let g = sample_g2();
        let direct = trap2d(|s, t| {
            let v = g.eval_real(&[s, t]);
            c(v.norm_sqr(), 0.0)
        }, 14.0, 2000);
        let closed = g.norm_l2_sq();
        assert!((direct.re - closed).abs() < 1e-9 * (1.0 + closed.abs()));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = sample_g2();
        let d = g.derivative(0);
        let h = 1e-5;
        for (s, t) in [(0.2, -0.4), (1.0, 0.8)] {
            let fd = (g.eval_real(&[s + h, t]) - g.eval_real(&[s - h, t])) / (2.0 * h);
            let ex = d.eval_real(&[s, t]);
            assert!((fd - ex).norm() < 1e-8 * (1.0 + ex.norm()));
        }
    }
}
