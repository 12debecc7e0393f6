//! Sparse complex polynomials in N variables with exact coefficient arithmetic.
//!
//! Keys are exponent vectors; the map is ordered so that iteration (and thus
//! every reduction built on it) is deterministic. Exponents are u8: nothing in
//! the pipeline exceeds degree ~60 in any variable (Laguerre kernels of index
//! k contribute degree 2k).

use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

/// Polynomial in N variables: sum of c * y^alpha over exponent vectors alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<const N: usize> {
    pub terms: BTreeMap<[u8; N], C64>,
}

impl<const N: usize> Default for Poly<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert([0u8; N], c);
        }
        Poly { terms }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// The coordinate polynomial y_axis.
    pub fn var(axis: usize) -> Self {
        let mut e = [0u8; N];
        e[axis] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn monomial(exps: [u8; N], c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(exps, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: [u8; N], c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry(exps).or_insert(C64::new(0.0, 0.0));
        *slot += c;
        if *slot == C64::new(0.0, 0.0) {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(e, -c);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(&e, &v)| (e, v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&ea, &ca) in &self.terms {
            for (&eb, &cb) in &other.terms {
                let mut e = [0u8; N];
                for i in 0..N {
                    e[i] = ea[i]
                        .checked_add(eb[i])
                        .expect("polynomial degree overflow");
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// d/dy_axis.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (&e, &c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = e;
            d[axis] -= 1;
            out.add_term(d, c * C64::new(e[axis] as f64, 0.0));
        }
        out
    }

    pub fn eval(&self, y: &[C64; N]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (&e, &c) in &self.terms {
            let mut m = c;
            for i in 0..N {
                m *= y[i].powu(e[i] as u32);
            }
            acc += m;
        }
        acc
    }

    pub fn eval_real(&self, y: &[f64; N]) -> C64 {
        let mut cy = [C64::new(0.0, 0.0); N];
        for i in 0..N {
            cy[i] = C64::new(y[i], 0.0);
        }
        self.eval(&cy)
    }

    /// Substitute y_axis -> y_axis + c (shift of origin along one axis).
    pub fn shift_axis(&self, axis: usize, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return self.clone();
        }
        let mut out = Self::zero();
        for (&e, &coeff) in &self.terms {
            let m = e[axis] as u32;
            // (y + c)^m = sum_j binom(m, j) c^{m-j} y^j
            let mut binom = 1.0f64;
            for j in 0..=m {
                if j > 0 {
                    binom = binom * (m - j + 1) as f64 / j as f64;
                }
                let mut d = e;
                d[axis] = j as u8;
                out.add_term(d, coeff * C64::new(binom, 0.0) * c.powu(m - j));
            }
        }
        out
    }

    /// Compose with a linear map: returns p(M y), M given by rows.
    pub fn compose_linear(&self, m: &[[f64; N]; N]) -> Self {
        // images of the coordinates under the substitution
        let images: Vec<Poly<N>> = (0..N)
            .map(|i| {
                let mut p = Poly::zero();
                for j in 0..N {
                    if m[i][j] != 0.0 {
                        p.add_term(unit_exp::<N>(j), C64::new(m[i][j], 0.0));
                    }
                }
                p
            })
            .collect();
        let mut out = Self::zero();
        for (&e, &c) in &self.terms {
            let mut term = Self::constant(c);
            for i in 0..N {
                for _ in 0..e[i] {
                    term = term.mul(&images[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Split as a polynomial in y_axis with Poly coefficients: exponent -> coefficient
    /// polynomial (which no longer involves y_axis).
    pub fn collect_axis(&self, axis: usize) -> BTreeMap<u8, Poly<N>> {
        let mut out: BTreeMap<u8, Poly<N>> = BTreeMap::new();
        for (&e, &c) in &self.terms {
            let m = e[axis];
            let mut rest = e;
            rest[axis] = 0;
            out.entry(m).or_insert_with(Poly::zero).add_term(rest, c);
        }
        out
    }

    /// Drop coefficients with |c| <= eps (cleanup after float cancellation).
    pub fn prune(&self, eps: f64) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > eps)
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }
}

pub fn unit_exp<const N: usize>(axis: usize) -> [u8; N] {
    let mut e = [0u8; N];
    e[axis] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn arithmetic_matches_pointwise() {
        // p = 1 + 2xy, q = x - i y^2 in 2 vars
        let p = Poly::<2>::one().add(&Poly::monomial([1, 1], c(2.0, 0.0)));
        let q = Poly::<2>::var(0).add(&Poly::monomial([0, 2], c(0.0, -1.0)));
        let prod = p.mul(&q);
        let pts = [[c(0.3, 0.0), c(-1.2, 0.0)], [c(1.5, 0.5), c(0.7, -0.2)]];
        for y in pts {
            let lhs = prod.eval(&y);
            let rhs = p.eval(&y) * q.eval(&y);
            assert!((lhs - rhs).norm() < 1e-14, "product eval mismatch: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn derivative_of_monomial() {
        // d/dx (x^3 y) = 3 x^2 y
        let p = Poly::<2>::monomial([3, 1], c(1.0, 0.0));
        let d = p.derivative(0);
        assert_eq!(d, Poly::monomial([2, 1], c(3.0, 0.0)));
    }

    #[test]
    fn shift_matches_direct_eval() {
        let p = Poly::<2>::monomial([3, 2], c(1.0, -2.0)).add(&Poly::var(1));
        let s = p.shift_axis(0, c(0.8, 0.1));
        let y = [c(0.4, -0.3), c(1.1, 0.0)];
        let shifted = [y[0] + c(0.8, 0.1), y[1]];
        assert!((s.eval(&y) - p.eval(&shifted)).norm() < 1e-13);
    }

    #[test]
    fn compose_linear_matches_direct_eval() {
        let p = Poly::<3>::monomial([2, 1, 0], c(1.0, 0.0))
            .add(&Poly::monomial([0, 0, 3], c(0.5, 0.5)));
        let m = [[0.6, -0.8, 0.0], [0.8, 0.6, 0.0], [0.0, 0.0, 1.0]];
        let q = p.compose_linear(&m);
        let y = [0.3, -0.9, 1.7];
        let my = [
            m[0][0] * y[0] + m[0][1] * y[1] + m[0][2] * y[2],
            m[1][0] * y[0] + m[1][1] * y[1] + m[1][2] * y[2],
            m[2][0] * y[0] + m[2][1] * y[1] + m[2][2] * y[2],
        ];
        assert!((q.eval_real(&y) - p.eval_real(&my)).norm() < 1e-13);
    }

    #[test]
    fn collect_axis_reassembles() {
        let p = Poly::<2>::monomial([2, 1], c(1.0, 0.0))
            .add(&Poly::monomial([0, 3], c(2.0, 0.0)))
            .add(&Poly::monomial([2, 0], c(-1.0, 1.0)));
        let parts = p.collect_axis(0);
        let mut back = Poly::<2>::zero();
        for (m, coef) in parts {
            let xm = Poly::monomial(
                { let mut e = [0u8; 2]; e[0] = m; e },
                c(1.0, 0.0),
            );
            back = back.add(&xm.mul(&coef));
        }
        assert_eq!(back, p);
    }
}
