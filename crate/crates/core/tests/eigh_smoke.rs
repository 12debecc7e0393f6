// Early sanity check that the dense Hermitian eigensolver behaves; the ignored
// test times larger problems to calibrate oracle grid budgets.

use faer::Mat;
use num_complex::Complex64 as C64;

fn hermitian(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| {
        let re = ((i * 31 + j * 17) % 13) as f64 / 13.0
            + ((j * 31 + i * 17) % 13) as f64 / 13.0
            + if i == j { n as f64 } else { 0.0 };
        let im = ((i * 7 + j * 3) % 11) as f64 / 11.0
            - ((j * 7 + i * 3) % 11) as f64 / 11.0;
        C64::new(re, im)
    })
}

#[test]
fn small_hermitian_eigensolve() {
    let n = 24;
    let m = hermitian(n);
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition failed");
    let vals = evd.S();
    let vecs = evd.U();
    for idx in [0, n / 2, n - 1] {
        let w = vals[idx];
        let mut res = 0.0f64;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += m[(i, j)] * vecs[(j, idx)];
            }
            res += (acc - w * vecs[(i, idx)]).norm_sqr();
        }
        assert!(res.sqrt() < 1e-10, "eigenpair residual {}", res.sqrt());
    }
}

#[test]
#[ignore]
fn time_large_eigensolves() {
    for n in [1024usize, 2048] {
        let m = hermitian(n);
        let t0 = std::time::Instant::now();
        let evd = m
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("eigendecomposition failed");
        println!(
            "n = {n}: eigendecomposition took {:.2?} (first eigenvalue {:.6})",
            t0.elapsed(),
            evd.S()[0]
        );
    }
}
