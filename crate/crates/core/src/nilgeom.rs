//! Lie-algebra geometry of the free two-step nilpotent group on three
//! generators: coordinates (x, z) in R^3 x R^3, bracket equal to the vector
//! cross product on the first layer, anisotropic dilations, radicals of the
//! skew forms omega([X, Y]), and the adapted orthonormal frames with their
//! rotations acting as automorphisms on both layers.

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, c: f64) -> Vec3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn mat_apply(r: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    [dot(r[0], v), dot(r[1], v), dot(r[2], v)]
}

/// Transpose application, i.e. the inverse for rotations.
pub fn mat_apply_t(r: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    [
        r[0][0] * v[0] + r[1][0] * v[1] + r[2][0] * v[2],
        r[0][1] * v[0] + r[1][1] * v[1] + r[2][1] * v[2],
        r[0][2] * v[0] + r[1][2] * v[1] + r[2][2] * v[2],
    ]
}

pub fn transpose(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// A point of the group in exponential coordinates: first layer x, center z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPoint {
    pub x: Vec3,
    pub z: Vec3,
}

/// Unit covector on the center.
#[derive(Debug, Clone, Copy)]
pub struct Direction {
    omega: Vec3,
}

impl Direction {
    /// Normalizes the input; rejects vectors too short to orient.
    pub fn new(v: Vec3) -> Direction {
        let n = norm(v);
        assert!(n > 1e-12, "direction must be nonzero");
        Direction { omega: scale(v, 1.0 / n) }
    }

    pub fn omega(&self) -> Vec3 {
        self.omega
    }
}

/// Bracket of two first-layer vectors, landing in the center. The structure
/// constants make it the coordinate cross product.
pub fn bracket(x: Vec3, y: Vec3) -> Vec3 {
    cross(x, y)
}

/// The skew form (X, Y) -> omega([X, Y]).
pub fn omega_pairing(omega: &Direction, x: Vec3, y: Vec3) -> f64 {
    dot(omega.omega(), bracket(x, y))
}

/// Unit vector spanning the radical of the skew form; its null space is the
/// line through omega itself, and the sign is fixed to match omega.
pub fn radical_direction(omega: &Direction) -> Vec3 {
    omega.omega()
}

/// Orthonormal frame adapted to a direction: {V, X, Y} on the first layer with
/// omega([X, Y]) = 1, the rotation R with rows (X, Y, omega) so that
/// R u = (x_omega, y_omega, omega(u)), and an orthonormal basis {Zc, W1, W2}
/// of the center with Zc dual to omega.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub v: Vec3,
    pub x: Vec3,
    pub y: Vec3,
    pub r: [[f64; 3]; 3],
    pub zc: Vec3,
    pub w1: Vec3,
    pub w2: Vec3,
}

/// Gram-Schmidt of a reference axis against a unit vector; the reference
/// switches to e2 near the seam where e1 is nearly parallel to the axis.
fn in_plane_unit(axis: Vec3) -> Vec3 {
    let eref = if axis[0].abs() > 0.9 { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] };
    let proj = dot(eref, axis);
    let raw = sub(eref, scale(axis, proj));
    scale(raw, 1.0 / norm(raw))
}

pub fn adapted_frame(omega: &Direction) -> AdaptedFrame {
    let w = omega.omega();
    let v = w;
    let x = in_plane_unit(v);
    // Y = V x X makes omega([X, Y]) = omega . (X x (V x X)) = omega . V = 1.
    let y = cross(v, x);
    let r = [x, y, w];
    let zc = w;
    let w1 = in_plane_unit(zc);
    let w2 = cross(zc, w1);
    AdaptedFrame { v, x, y, r, zc, w1, w2 }
}

/// An adapted frame whose in-plane pair (X, Y) is rotated by a fixed angle.
/// Any such gauge is equally valid; physical outputs must not depend on it.
pub fn adapted_frame_gauged(omega: &Direction, angle: f64) -> AdaptedFrame {
    let mut f = adapted_frame(omega);
    let (c, s) = (angle.cos(), angle.sin());
    let x = add(scale(f.x, c), scale(f.y, s));
    let y = add(scale(f.x, -s), scale(f.y, c));
    f.x = x;
    f.y = y;
    f.r = [x, y, omega.omega()];
    f
}

/// Anisotropic dilation (x, z) -> (eps x, eps^2 z).
pub fn dilate(p: &GroupPoint, eps: f64) -> GroupPoint {
    assert!(eps > 0.0, "dilation parameter must be positive");
    GroupPoint { x: scale(p.x, eps), z: scale(p.z, eps * eps) }
}

/// Adapted coordinates (x_w, y_w, v_w, z_w, w_1, w_2) of a group point.
pub fn to_adapted(frame: &AdaptedFrame, p: &GroupPoint) -> [f64; 6] {
    [
        dot(frame.x, p.x),
        dot(frame.y, p.x),
        dot(frame.r[2], p.x),
        dot(frame.zc, p.z),
        dot(frame.w1, p.z),
        dot(frame.w2, p.z),
    ]
}

pub fn from_adapted(frame: &AdaptedFrame, c: &[f64; 6]) -> GroupPoint {
    let x = add(
        add(scale(frame.x, c[0]), scale(frame.y, c[1])),
        scale(frame.r[2], c[2]),
    );
    let z = add(
        add(scale(frame.zc, c[3]), scale(frame.w1, c[4])),
        scale(frame.w2, c[5]),
    );
    GroupPoint { x, z }
}

/// Quasi-uniform sample of the unit sphere (Fibonacci lattice), used for
/// frame sweeps and direction corpora.
pub fn sphere_sample(n: usize) -> Vec<Direction> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            let cos_theta = 1.0 - 2.0 * t;
            let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Direction::new([
                sin_theta * phi.cos(),
                sin_theta * phi.sin(),
                cos_theta,
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bracket_structure_constants_on_basis() {
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(bracket(e[0], e[1]), e[2]);
        assert_eq!(bracket(e[1], e[2]), e[0]);
        assert_eq!(bracket(e[2], e[0]), e[1]);
        for i in 0..3 {
            assert_eq!(bracket(e[i], e[i]), [0.0; 3]);
        }
    }

    #[test]
    fn bracket_equals_cross_product_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let x: Vec3 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let y: Vec3 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let b = bracket(x, y);
            let c = cross(x, y);
            let anti = add(bracket(y, x), b);
            for a in 0..3 {
                assert!((b[a] - c[a]).abs() <= 1e-12);
                assert!(anti[a].abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn radical_annihilates_by_nullspace_oracle() {
        // Independent oracle: assemble the skew matrix B_ab = omega([e_a, e_b])
        // and verify B V = 0 with V the claimed radical direction.
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for omega in sphere_sample(37) {
            let v = radical_direction(&omega);
            let mut bv = [0.0f64; 3];
            for a in 0..3 {
                for b in 0..3 {
                    bv[a] += omega_pairing(&omega, e[a], e[b]) * v[b];
                }
            }
            for a in 0..3 {
                assert!(bv[a].abs() <= 1e-12, "radical fails to annihilate: {bv:?}");
            }
            let diff = sub(v, omega.omega());
            assert!(norm(diff) <= 1e-12, "radical sign convention broken");
        }
    }

    #[test]
    fn radical_axis_examples() {
        for axis in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]] {
            let omega = Direction::new(axis);
            assert_eq!(radical_direction(&omega), axis);
        }
        let d = 1.0 / 3.0f64.sqrt();
        let omega = Direction::new([1.0, 1.0, 1.0]);
        let v = radical_direction(&omega);
        for a in 0..3 {
            assert!((v[a] - d).abs() <= 1e-12);
        }
    }

    fn assert_orthonormal(vs: [Vec3; 3], tol: f64) {
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(vs[i], vs[j]) - want).abs() <= tol);
            }
        }
    }

    #[test]
    fn frame_invariants_over_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for omega in sphere_sample(100) {
            let f = adapted_frame(&omega);
            assert_orthonormal([f.v, f.x, f.y], 1e-12);
            assert_orthonormal([f.zc, f.w1, f.w2], 1e-12);
            assert!((omega_pairing(&omega, f.x, f.y) - 1.0).abs() <= 1e-12);
            // third row of R is omega
            for a in 0..3 {
                assert!((f.r[2][a] - omega.omega()[a]).abs() <= 1e-12);
            }
            // det R = +1 via triple product of rows
            let det = dot(f.r[0], cross(f.r[1], f.r[2]));
            assert!((det - 1.0).abs() <= 1e-12);
            // automorphism property R[u, w] = [Ru, Rw]
            for _ in 0..5 {
                let u: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let w: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let lhs = mat_apply(&f.r, bracket(u, w));
                let rhs = bracket(mat_apply(&f.r, u), mat_apply(&f.r, w));
                assert!(norm(sub(lhs, rhs)) <= 1e-12);
            }
        }
    }

    #[test]
    fn frame_axis_example() {
        let omega = Direction::new([0.0, 0.0, 1.0]);
        let f = adapted_frame(&omega);
        assert_eq!(f.v, [0.0, 0.0, 1.0]);
        assert_eq!(f.x, [1.0, 0.0, 0.0]);
        assert_eq!(f.y, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn gauged_frame_also_satisfies_invariants() {
        for omega in sphere_sample(11) {
            let f = adapted_frame_gauged(&omega, 0.83);
            assert_orthonormal([f.v, f.x, f.y], 1e-12);
            assert!((omega_pairing(&omega, f.x, f.y) - 1.0).abs() <= 1e-12);
            let det = dot(f.r[0], cross(f.r[1], f.r[2]));
            assert!((det - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dilation_examples_and_roundtrip() {
        let p = GroupPoint { x: [1.0, 0.0, 0.0], z: [1.0, 0.0, 0.0] };
        let q = dilate(&p, 2.0);
        assert_eq!(q.x, [2.0, 0.0, 0.0]);
        assert_eq!(q.z, [4.0, 0.0, 0.0]);
        let back = dilate(&dilate(&p, 0.5), 2.0);
        assert!(norm(sub(back.x, p.x)) <= 1e-15 && norm(sub(back.z, p.z)) <= 1e-15);
        assert_eq!(dilate(&p, 1.0), p);
    }

    #[test]
    fn adapted_coordinates_roundtrip_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for omega in sphere_sample(20) {
            let f = adapted_frame(&omega);
            for _ in 0..5 {
                let p = GroupPoint {
                    x: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    z: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                };
                let c = to_adapted(&f, &p);
                let q = from_adapted(&f, &c);
                assert!(norm(sub(q.x, p.x)) <= 1e-12 && norm(sub(q.z, p.z)) <= 1e-12);
                let n_orig = (dot(p.x, p.x) + dot(p.z, p.z)).sqrt();
                let n_adap = c.iter().map(|t| t * t).sum::<f64>().sqrt();
                assert!((n_orig - n_adap).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn adapted_axis_example() {
        let omega = Direction::new([0.0, 0.0, 1.0]);
        let f = adapted_frame(&omega);
        let p = GroupPoint { x: [0.3, -0.8, 1.1], z: [0.0; 3] };
        let c = to_adapted(&f, &p);
        assert!((c[0] - 0.3).abs() <= 1e-15);
        assert!((c[1] + 0.8).abs() <= 1e-15);
        assert!((c[2] - 1.1).abs() <= 1e-15);
    }
}
