//! Quadrature rules: Gauss-Legendre on intervals and a product rule on the
//! unit sphere (Gauss-Legendre in the polar cosine, uniform in azimuth) whose
//! weights sum to the full surface measure 4 pi.

use crate::nilgeom::Direction;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b], as (node, weight) pairs.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    xs.iter()
        .zip(&ws)
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect()
}

/// Product quadrature on the unit sphere: weights sum to 4 pi; exact for
/// spherical polynomials of degree up to min(2 n_theta - 1, n_phi - 1).
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<(Direction, f64)>,
}

pub fn sphere_rule(n_theta: usize, n_phi: usize) -> SphereRule {
    let (cts, ws) = gauss_legendre(n_theta);
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (&ct, &w) in cts.iter().zip(&ws) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            nodes.push((
                Direction::new([st * phi.cos(), st * phi.sin(), ct]),
                w * dphi,
            ));
        }
    }
    SphereRule { nodes }
}

impl SphereRule {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }
}
