//! Brute-force verification of the plane theory: dense matrix
//! discretizations of the twisted Laplacian, full Hermitian
//! eigendecomposition, and eigenspace projections compared against the
//! Laguerre-kernel pipeline.
//!
//! Nothing here shares code with the symbolic route. Derivatives become
//! dense periodic differentiation matrices, multiplication operators become
//! diagonals, and the spectrum comes out of a general-purpose eigensolver,
//! so agreement with the analytic projections is evidence, not tautology.
//!
//! Grids are desk-scale on purpose: the dense dimension is capped at 4096
//! (n = 64 in the plane) where a full eigendecomposition takes tens of
//! seconds. Eigensolves are single-threaded per matrix; independent twists
//! run in parallel through [`eigensystems_par`].

use crate::gauss::Gauss;
use crate::twisted::lambda_project_sym;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Hard cap on the dense matrix dimension (grid points in the plane).
pub const MAX_DIM: usize = 4096;

/// Estimated Landau-function tail above which a level's discrete
/// representation is too distorted to compare against; requests beyond it
/// are refused rather than answered.
const REFUSAL_TAIL: f64 = 5e-3;

/// Half-width of the cluster window around lambda (2k + 1), well inside the
/// spectral gap 2 lambda.
pub const CLUSTER_WINDOW: f64 = 0.05;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid {n}x{n} gives dense dimension {dim}, over the eigensolve budget {MAX_DIM}")]
    Budget { n: usize, dim: usize },
    #[error("unknown discretization scheme '{id}'")]
    UnknownScheme { id: String },
    #[error("level {k} lies outside the reliable discrete spectrum at n = {n} (estimated tail {est:.2e})")]
    UnreliableIndex { k: usize, est: f64, n: usize },
    #[error("dense eigensolve did not converge")]
    Eigensolve,
    #[error("matrix i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("matrix dump corrupt: {0}")]
    BadDump(String),
}

// --- differentiation schemes --------------------------------------------------------

/// A periodic differentiation scheme on n points spanning [-L, L). Both
/// matrices are dense n x n, row-major; d1 must be exactly antisymmetric and
/// d2 exactly symmetric so the assembled operator is Hermitian to rounding.
pub trait Discretization: Sync {
    fn name(&self) -> &'static str;
    fn d1(&self, n: usize, half_width: f64) -> Vec<f64>;
    fn d2(&self, n: usize, half_width: f64) -> Vec<f64>;
}

/// Fourier differentiation: exact on every grid-representable mode. Built
/// from the mode sum rather than stencils; the Nyquist mode is dropped from
/// d1 (its first derivative has no consistent sign on an even grid), which
/// is also what keeps d1 exactly antisymmetric.
struct SpectralScheme;

impl Discretization for SpectralScheme {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn d1(&self, n: usize, half_width: f64) -> Vec<f64> {
        let h = 2.0 * half_width / n as f64;
        let mut a = vec![0.0; n * n];
        for d in 0..n {
            let mut s = 0.0;
            for m in 1..n.div_ceil(2) {
                let km = std::f64::consts::PI * m as f64 / half_width;
                s += -2.0 / n as f64 * km * (km * h * d as f64).sin();
            }
            for i in 0..n {
                let j = (i + n - d) % n;
                a[i * n + j] = s;
                a[j * n + i] = -s;
            }
        }
        a
    }

    fn d2(&self, n: usize, half_width: f64) -> Vec<f64> {
        let h = 2.0 * half_width / n as f64;
        let mut a = vec![0.0; n * n];
        for d in 0..n {
            let mut s = 0.0;
            for m in 1..=n / 2 {
                let km = std::f64::consts::PI * m as f64 / half_width;
                let w = if 2 * m == n { 1.0 } else { 2.0 };
                s += -w / n as f64 * km * km * (km * h * d as f64).cos();
            }
            for i in 0..n {
                let j = (i + n - d) % n;
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
        a
    }
}

/// 4th-order central differences with periodic wrap. Honest only for the
/// lowest few levels at these grids; the truncation error grows like the
/// sixth power of the level's momentum scale.
struct Fd4Scheme;

impl Fd4Scheme {
    fn banded(n: usize, offsets: &[(i64, f64)], scale: f64) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for &(off, c) in offsets {
                let j = (i as i64 + off).rem_euclid(n as i64) as usize;
                a[i * n + j] += c * scale;
            }
        }
        a
    }
}

impl Discretization for Fd4Scheme {
    fn name(&self) -> &'static str {
        "fd4"
    }

    fn d1(&self, n: usize, half_width: f64) -> Vec<f64> {
        let h = 2.0 * half_width / n as f64;
        let c = 1.0 / (12.0 * h);
        Self::banded(n, &[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], c)
    }

    fn d2(&self, n: usize, half_width: f64) -> Vec<f64> {
        let h = 2.0 * half_width / n as f64;
        let c = 1.0 / (12.0 * h * h);
        Self::banded(n, &[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)], c)
    }
}

static SPECTRAL: SpectralScheme = SpectralScheme;
static FD4: Fd4Scheme = Fd4Scheme;

pub fn schemes() -> [&'static dyn Discretization; 2] {
    [&SPECTRAL, &FD4]
}

pub fn scheme(name: &str) -> Option<&'static dyn Discretization> {
    schemes().into_iter().find(|s| s.name() == name)
}

// --- operator assembly --------------------------------------------------------------

/// Dense Hermitian discretization of the twisted Laplacian on an n x n
/// periodic grid over [-L, L)^2, with the metadata tying matrix indices to
/// grid points: index i*n + j sits at (s_i, t_j) = (-L + i h, -L + j h).
#[derive(Debug)]
pub struct OperatorMatrix {
    pub lambda: f64,
    pub n: usize,
    pub half_width: f64,
    pub scheme: &'static str,
    pub mat: Mat<C64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn coords(&self) -> Vec<f64> {
        let h = 2.0 * self.half_width / self.n as f64;
        (0..self.n).map(|i| -self.half_width + i as f64 * h).collect()
    }

    /// Sample a plane function on the grid in matrix index order.
    pub fn sample(&self, g: &Gauss<2>) -> Vec<C64> {
        let c = self.coords();
        let mut v = Vec::with_capacity(self.dim());
        for &s in &c {
            for &t in &c {
                v.push(g.eval_real(&[s, t]));
            }
        }
        v
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                worst = worst.max((self.mat.get(i, j) - self.mat.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Box half-width putting the edge at lambda L^2 / 2 = 184: level tails
/// through k = 8 fall below 1e-9 there, and by the self-duality of the
/// Landau functions the same bound holds at the n = 64 Nyquist momentum.
pub fn oracle_half_width(lambda: f64) -> f64 {
    (184.0 / lambda).sqrt()
}

pub fn discretize_twisted(
    lambda: f64,
    n: usize,
    half_width: f64,
    scheme_id: &str,
) -> Result<OperatorMatrix, OracleError> {
    assert!(lambda > 0.0 && half_width > 0.0 && n >= 4);
    let dim = n * n;
    if dim > MAX_DIM {
        return Err(OracleError::Budget { n, dim });
    }
    let sch = scheme(scheme_id).ok_or_else(|| OracleError::UnknownScheme {
        id: scheme_id.to_string(),
    })?;
    let d1 = sch.d1(n, half_width);
    let d2 = sch.d2(n, half_width);
    let h = 2.0 * half_width / n as f64;
    let coord = |i: usize| -half_width + i as f64 * h;

    let mat = Mat::from_fn(dim, dim, |r, c| {
        let (i1, j1) = (r / n, r % n);
        let (i2, j2) = (c / n, c % n);
        let mut v = ZERO;
        if j1 == j2 {
            // -dss - i lambda t ds
            v += C64::new(-d2[i1 * n + i2], -lambda * coord(j1) * d1[i1 * n + i2]);
        }
        if i1 == i2 {
            // -dtt + i lambda s dt
            v += C64::new(-d2[j1 * n + j2], lambda * coord(i1) * d1[j1 * n + j2]);
        }
        if r == c {
            let (s, t) = (coord(i1), coord(j1));
            v += C64::new(lambda * lambda / 4.0 * (s * s + t * t), 0.0);
        }
        v
    });
    Ok(OperatorMatrix { lambda, n, half_width, scheme: sch.name(), mat })
}

// --- eigendecomposition -------------------------------------------------------------

/// Full eigendecomposition of one operator matrix, eigenvalues ascending.
pub struct EigenSystem {
    pub lambda: f64,
    pub n: usize,
    pub half_width: f64,
    pub evals: Vec<f64>,
    vecs: Mat<C64>,
}

pub fn eigensystem(m: &OperatorMatrix) -> Result<EigenSystem, OracleError> {
    let evd = m
        .mat
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| OracleError::Eigensolve)?;
    let dim = m.dim();
    let s = evd.S().column_vector();
    let evals: Vec<f64> = (0..dim).map(|i| s.get(i).re).collect();
    debug_assert!(evals.windows(2).all(|w| w[0] <= w[1] + 1e-9));
    Ok(EigenSystem {
        lambda: m.lambda,
        n: m.n,
        half_width: m.half_width,
        evals,
        vecs: evd.U().to_owned(),
    })
}

/// Eigendecompose several operators at once; each solve is sequential, the
/// batch is parallel.
pub fn eigensystems_par(ms: &[OperatorMatrix]) -> Result<Vec<EigenSystem>, OracleError> {
    ms.par_iter().map(eigensystem).collect()
}

/// Orthogonal projection of v onto the span of eigenvectors with eigenvalue
/// within tol of target. The second return is the eigengroup size; zero
/// means an empty group and a zero vector.
pub fn eig_project(eig: &EigenSystem, target: f64, tol: f64, v: &[C64]) -> (Vec<C64>, usize) {
    let dim = eig.evals.len();
    assert_eq!(v.len(), dim);
    let sel: Vec<usize> = (0..dim)
        .filter(|&i| (eig.evals[i] - target).abs() <= tol)
        .collect();
    let mut out = vec![ZERO; dim];
    for &c in &sel {
        let mut amp = ZERO;
        for i in 0..dim {
            amp += eig.vecs.get(i, c).conj() * v[i];
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += amp * eig.vecs.get(i, c);
        }
    }
    (out, sel.len())
}

/// Discrete eigenvalues within the cluster window of lambda (2k + 1), per
/// level up to k_upto inclusive.
pub fn eigenvalue_clusters(eig: &EigenSystem, k_upto: usize) -> Vec<Vec<f64>> {
    (0..=k_upto)
        .map(|k| {
            let target = eig.lambda * (2 * k + 1) as f64;
            let tol = CLUSTER_WINDOW * eig.lambda;
            eig.evals
                .iter()
                .copied()
                .filter(|e| (e - target).abs() <= tol)
                .collect()
        })
        .collect()
}

fn median(sorted_ascending: &[f64]) -> f64 {
    assert!(!sorted_ascending.is_empty());
    let n = sorted_ascending.len();
    if n % 2 == 1 {
        sorted_ascending[n / 2]
    } else {
        0.5 * (sorted_ascending[n / 2 - 1] + sorted_ascending[n / 2])
    }
}

/// Representative eigenvalue of each cluster (median: interior Landau
/// states dominate, box-edge drifters do not move it).
pub fn cluster_medians(eig: &EigenSystem, k_upto: usize) -> Vec<Option<f64>> {
    eigenvalue_clusters(eig, k_upto)
        .iter()
        .map(|c| if c.is_empty() { None } else { Some(median(c)) })
        .collect()
}

// --- reliability and the pipeline comparison ----------------------------------------

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Size of L_k(y) e^{-y/2} estimated through its dominant term: the level-k
/// Landau tail at radial coordinate y = lambda r^2 / 2, and by self-duality
/// also the momentum tail at y = 2 p^2 / lambda.
pub fn landau_tail(k: usize, y: f64) -> f64 {
    (k as f64 * y.ln() - ln_factorial(k) - y / 2.0).exp()
}

/// Worst of the level's box tail and Nyquist tail; the discrete level is
/// trustworthy only when both are small.
pub fn reliability(lambda: f64, k: usize, n: usize, half_width: f64) -> f64 {
    let y_pos = lambda * half_width * half_width / 2.0;
    let p_nyq = std::f64::consts::PI * n as f64 / (2.0 * half_width);
    let y_mom = 2.0 * p_nyq * p_nyq / lambda;
    landau_tail(k, y_pos).max(landau_tail(k, y_mom))
}

/// Relative discrepancy between the dense eigenspace projection at
/// lambda (2k + 1) and the Laguerre-kernel projection of the same function:
/// || eig_project g - Lambda_k g ||_2 / || g ||_2 on the grid. Levels whose
/// discrete representation is unreliable are refused.
pub fn compare_lambda_projection(
    m: &OperatorMatrix,
    eig: &EigenSystem,
    k: usize,
    g: &Gauss<2>,
) -> Result<f64, OracleError> {
    let est = reliability(m.lambda, k, m.n, m.half_width);
    if est > REFUSAL_TAIL {
        return Err(OracleError::UnreliableIndex { k, est, n: m.n });
    }
    let v = m.sample(g);
    let target = m.lambda * (2 * k + 1) as f64;
    let (pe, _count) = eig_project(eig, target, CLUSTER_WINDOW * m.lambda, &v);
    let sym = m.sample(&lambda_project_sym(g, m.lambda, k, 1.0));
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..v.len() {
        num += (pe[i] - sym[i]).norm_sqr();
        den += v[i].norm_sqr();
    }
    Ok((num / den).sqrt())
}

// --- matrix dump ---------------------------------------------------------------------

const DUMP_MAGIC: &[u8; 8] = b"NSPECMAT";

/// Write the matrix in the documented binary layout: 8-byte magic
/// "NSPECMAT", then four little-endian u32 words (format version 1, rows,
/// cols, reserved 0), then rows x cols complex entries as little-endian f64
/// (re, im) pairs in row-major order.
pub fn dump_matrix(m: &OperatorMatrix, path: &Path) -> Result<(), OracleError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(DUMP_MAGIC)?;
    for word in [1u32, m.dim() as u32, m.dim() as u32, 0u32] {
        w.write_all(&word.to_le_bytes())?;
    }
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let e = m.mat.get(i, j);
            w.write_all(&e.re.to_le_bytes())?;
            w.write_all(&e.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a dump back: (rows, cols, row-major entries).
pub fn read_matrix_dump(path: &Path) -> Result<(usize, usize, Vec<C64>), OracleError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(OracleError::BadDump("bad magic".into()));
    }
    let mut word = [0u8; 4];
    let mut words = [0u32; 4];
    for w in &mut words {
        r.read_exact(&mut word)?;
        *w = u32::from_le_bytes(word);
    }
    if words[0] != 1 {
        return Err(OracleError::BadDump(format!("unsupported version {}", words[0])));
    }
    let (rows, cols) = (words[1] as usize, words[2] as usize);
    let mut buf = [0u8; 8];
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        let im = f64::from_le_bytes(buf);
        data.push(C64::new(re, im));
    }
    if r.read(&mut word)? != 0 {
        return Err(OracleError::BadDump("trailing bytes".into()));
    }
    Ok((rows, cols, data))
}
