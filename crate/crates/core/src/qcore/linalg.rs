//! Matrix exponential and Hermitian eigenvalues for dimensions up to ~16.

use super::matrix::{ComplexMatrix, C64};

const TAYLOR_ORDER: usize = 12;
const SCALED_NORM_BOUND: f64 = 0.5;

/// `exp(A)` by scaling and squaring with a degree-12 Taylor polynomial.
///
/// `A` is scaled by `2^-k` so that `‖A‖₁ / 2^k ≤ 0.5`, the polynomial is
/// evaluated with Horner's scheme, and the result is squared `k` times.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.rows();
    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > SCALED_NORM_BOUND {
        squarings = (norm / SCALED_NORM_BOUND).log2().ceil() as u32;
    }
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    // I + X(1 + X/2(1 + X/3(...)))
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        let term = (&scaled * &acc).scale(C64::new(1.0 / k as f64, 0.0));
        acc = &id + &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The `n×n` Hermitian `H = A + iB` is embedded as the real symmetric
/// `2n×2n` block matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H`
/// with every eigenvalue doubled. Cyclic Jacobi sweeps diagonalize the
/// embedding; every other sorted eigenvalue is returned.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    assert!(h.is_square());
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            // symmetrize against tiny Hermiticity defects
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    let mut eig = symmetric_jacobi(a);
    eig.sort_by(|x, y| x.total_cmp(y));
    eig.into_iter().step_by(2).collect()
}

fn symmetric_jacobi(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; m];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (upper, lower) = a.split_at_mut(q);
                for (x, y) in upper[p].iter_mut().zip(lower[0].iter_mut()) {
                    let (apk, aqk) = (*x, *y);
                    *x = c * apk - s * aqk;
                    *y = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|k| a[k][k]).collect()
}
