//! Closed-form test functions on the group:
//!     f(x, z) = sum_j c_j P_j(x - x0_j) exp(-a_j |x - x0_j|^2) exp(-b_j |z - z0_j|^2)
//! with complex coefficients and real polynomials of degree <= 4 per variable.
//! The family is closed under rotation of both layers, anisotropic dilation,
//! differentiation, and the partial Fourier transforms of the pipeline, so
//! every downstream identity can be checked in closed form.

use crate::gauss::Gauss;
use crate::nilgeom::{mat_apply, mat_apply_t, GroupPoint, Vec3};
use crate::poly::Poly;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MAX_POLY_EXP: u8 = 4;

#[derive(Debug, Clone)]
pub struct AnalyticTerm {
    pub coeff: C64,
    /// Polynomial in the centered variable u = x - x0.
    pub xpoly: Poly<3>,
    pub width_x: f64,
    pub width_z: f64,
    pub center_x: Vec3,
    pub center_z: Vec3,
}

#[derive(Debug, Clone, Default)]
pub struct AnalyticFn {
    pub terms: Vec<AnalyticTerm>,
}

impl AnalyticTerm {
    pub fn gaussian(coeff: C64, width_x: f64, width_z: f64) -> Self {
        AnalyticTerm {
            coeff,
            xpoly: Poly::one(),
            width_x,
            width_z,
            center_x: [0.0; 3],
            center_z: [0.0; 3],
        }
    }

    pub fn eval(&self, p: &GroupPoint) -> C64 {
        let u = [
            p.x[0] - self.center_x[0],
            p.x[1] - self.center_x[1],
            p.x[2] - self.center_x[2],
        ];
        let w = [
            p.z[0] - self.center_z[0],
            p.z[1] - self.center_z[1],
            p.z[2] - self.center_z[2],
        ];
        let ru2 = u.iter().map(|t| t * t).sum::<f64>();
        let rw2 = w.iter().map(|t| t * t).sum::<f64>();
        self.coeff
            * self.xpoly.eval_real(&u)
            * (-self.width_x * ru2 - self.width_z * rw2).exp()
    }

    /// Expand into a six-variable Gaussian-polynomial (axes 0..2 = x, 3..5 = z).
    pub fn to_gauss6(&self) -> Gauss<6> {
        let mut gamma = [C64::new(0.0, 0.0); 6];
        let mut center = [0.0f64; 6];
        for i in 0..3 {
            gamma[i] = C64::new(self.width_x, 0.0);
            gamma[i + 3] = C64::new(self.width_z, 0.0);
            center[i] = self.center_x[i];
            center[i + 3] = self.center_z[i];
        }
        let mut g = Gauss::<6>::gaussian(self.coeff, gamma, center);
        // P(x - x0) as a polynomial in x, widened to six variables
        let mut p6 = Poly::<6>::zero();
        let mut centered = self.xpoly.clone();
        for i in 0..3 {
            centered = centered.shift_axis(i, C64::new(-self.center_x[i], 0.0));
        }
        for (&e, &c) in &centered.terms {
            p6.add_term([e[0], e[1], e[2], 0, 0, 0], c);
        }
        g.poly = g.poly.mul(&p6);
        g
    }

    /// The x-profile as a three-variable Gaussian-polynomial, dropping the
    /// z-factor (used once the central transform has disposed of z).
    pub fn x_profile(&self) -> Gauss<3> {
        let gamma = [C64::new(self.width_x, 0.0); 3];
        let mut g = Gauss::<3>::gaussian(C64::new(1.0, 0.0), gamma, self.center_x);
        let mut centered = self.xpoly.clone();
        for i in 0..3 {
            centered = centered.shift_axis(i, C64::new(-self.center_x[i], 0.0));
        }
        g.poly = g.poly.mul(&centered);
        g
    }
}

impl AnalyticFn {
    pub fn single(term: AnalyticTerm) -> Self {
        AnalyticFn { terms: vec![term] }
    }

    pub fn eval(&self, p: &GroupPoint) -> C64 {
        self.terms.iter().map(|t| t.eval(p)).sum()
    }

    /// f compose delta_eps, exactly within the family.
    pub fn dilate(&self, eps: f64) -> Self {
        assert!(eps > 0.0);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let m = [
                    [eps, 0.0, 0.0],
                    [0.0, eps, 0.0],
                    [0.0, 0.0, eps],
                ];
                AnalyticTerm {
                    coeff: t.coeff,
                    xpoly: t.xpoly.compose_linear(&m),
                    width_x: t.width_x * eps * eps,
                    width_z: t.width_z * eps.powi(4),
                    center_x: [
                        t.center_x[0] / eps,
                        t.center_x[1] / eps,
                        t.center_x[2] / eps,
                    ],
                    center_z: [
                        t.center_z[0] / (eps * eps),
                        t.center_z[1] / (eps * eps),
                        t.center_z[2] / (eps * eps),
                    ],
                }
            })
            .collect();
        AnalyticFn { terms }
    }

    /// f compose the automorphism (x, z) -> (R x, R z), exactly within the family.
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| AnalyticTerm {
                coeff: t.coeff,
                xpoly: t.xpoly.compose_linear(r),
                width_x: t.width_x,
                width_z: t.width_z,
                center_x: mat_apply_t(r, t.center_x),
                center_z: mat_apply_t(r, t.center_z),
            })
            .collect();
        AnalyticFn { terms }
    }

    pub fn scale(&self, c: C64) -> Self {
        AnalyticFn {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.coeff *= c;
                    t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AnalyticFn { terms }
    }

    /// True when every term is centered and rotation invariant in x, so the
    /// fiber profile is independent of the sphere direction (a fast path in
    /// the spectral-density sweep).
    pub fn is_x_radial(&self) -> bool {
        let rots = [
            rotation_about([0.0, 0.0, 1.0], 1.1),
            rotation_about([1.0, 2.0, -1.0], 0.7),
        ];
        self.terms.iter().all(|t| {
            if t.center_x.iter().any(|&c| c != 0.0) {
                return false;
            }
            let pts = [
                [0.4, -0.3, 0.8],
                [1.2, 0.5, -0.2],
                [-0.7, 0.9, 0.35],
            ];
            rots.iter().all(|r| {
                pts.iter().all(|&p| {
                    let q = mat_apply(r, p);
                    (t.xpoly.eval_real(&p) - t.xpoly.eval_real(&q)).norm() <= 1e-12
                })
            })
        })
    }
}

/// Rotation matrix about an axis by an angle (Rodrigues), for corpus building
/// and invariance tests.
pub fn rotation_about(axis: Vec3, angle: f64) -> [[f64; 3]; 3] {
    let n = crate::nilgeom::norm(axis);
    let u = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (c, s) = (angle.cos(), angle.sin());
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let kron = if i == j { 1.0 } else { 0.0 };
            let eps_term: f64 = match (i, j) {
                (0, 1) => -u[2],
                (1, 0) => u[2],
                (0, 2) => u[1],
                (2, 0) => -u[1],
                (1, 2) => -u[0],
                (2, 1) => u[0],
                _ => 0.0,
            };
            r[i][j] = c * kron + s * eps_term + (1.0 - c) * u[i] * u[j];
        }
    }
    r
}

// --- serialization -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MonomialDe {
    exps: [u8; 3],
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TermDe {
    coeff_re: f64,
    coeff_im: f64,
    xpoly: Vec<MonomialDe>,
    width_x: f64,
    width_z: f64,
    center_x: [f64; 3],
    center_z: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct FnDe {
    terms: Vec<TermDe>,
}

impl AnalyticFn {
    pub fn to_json(&self) -> String {
        let de = FnDe {
            terms: self
                .terms
                .iter()
                .map(|t| TermDe {
                    coeff_re: t.coeff.re,
                    coeff_im: t.coeff.im,
                    xpoly: t
                        .xpoly
                        .terms
                        .iter()
                        .map(|(&e, &c)| MonomialDe { exps: e, re: c.re, im: c.im })
                        .collect(),
                    width_x: t.width_x,
                    width_z: t.width_z,
                    center_x: t.center_x,
                    center_z: t.center_z,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&de).expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        let de: FnDe = serde_json::from_str(s).map_err(|e| {
            format!("analytic function parse error at line {}, column {}: {}", e.line(), e.column(), e)
        })?;
        let mut terms = Vec::with_capacity(de.terms.len());
        for (i, t) in de.terms.iter().enumerate() {
            if !(t.width_x > 0.0) || !(t.width_z > 0.0) {
                return Err(format!(
                    "term {i}: field width_x/width_z must be positive, got {} / {}",
                    t.width_x, t.width_z
                ));
            }
            let mut xpoly = Poly::<3>::zero();
            for m in &t.xpoly {
                if m.exps.iter().any(|&e| e > MAX_POLY_EXP) {
                    return Err(format!(
                        "term {i}: field xpoly has exponent above {MAX_POLY_EXP}"
                    ));
                }
                xpoly.add_term(m.exps, C64::new(m.re, m.im));
            }
            terms.push(AnalyticTerm {
                coeff: C64::new(t.coeff_re, t.coeff_im),
                xpoly,
                width_x: t.width_x,
                width_z: t.width_z,
                center_x: t.center_x,
                center_z: t.center_z,
            });
        }
        Ok(AnalyticFn { terms })
    }
}

// --- corpora -----------------------------------------------------------------

/// Seeded corpus of generic polynomial-Gaussian functions for operator
/// identity checks (shifted centers, complex coefficients, degree <= 4).
pub fn identity_corpus(seed: u64, count: usize) -> Vec<AnalyticFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut xpoly = Poly::<3>::one();
            for _ in 0..rng.gen_range(1..=2) {
                let mut e = [0u8; 3];
                e[rng.gen_range(0..3)] = rng.gen_range(0..=2);
                e[rng.gen_range(0..3)] += rng.gen_range(0..=2);
                if e.iter().map(|&v| v as u32).sum::<u32>() > 4 {
                    e = [1, 0, 0];
                }
                xpoly.add_term(e, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let term = AnalyticTerm {
                coeff: C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)),
                xpoly,
                width_x: rng.gen_range(0.4..1.2),
                width_z: rng.gen_range(0.4..1.2),
                center_x: [
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                ],
                center_z: [
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                ],
            };
            AnalyticFn::single(term)
        })
        .collect()
}

/// Gaussian tensor corpus for the spectral-density sweeps: centered radial
/// x-profiles (optionally with a radial quadratic factor) so the fiber profile
/// is direction independent, with moderate width spread.
pub fn tensor_corpus(seed: u64, count: usize) -> Vec<AnalyticFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let width_x = rng.gen_range(0.35..0.8);
            let width_z = rng.gen_range(0.5..1.1);
            let mut xpoly = Poly::<3>::one();
            if i % 3 == 1 {
                // 1 + c r^2, radial
                let c = C64::new(rng.gen_range(0.1..0.4), 0.0);
                xpoly.add_term([2, 0, 0], c);
                xpoly.add_term([0, 2, 0], c);
                xpoly.add_term([0, 0, 2], c);
            }
            let term = AnalyticTerm {
                coeff: C64::new(rng.gen_range(0.7..1.3), 0.0),
                xpoly,
                width_x,
                width_z,
                center_x: [0.0; 3],
                center_z: [
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                ],
            };
            AnalyticFn::single(term)
        })
        .collect()
}
