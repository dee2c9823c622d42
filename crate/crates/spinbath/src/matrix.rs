//! Dense complex matrix helpers for the small (≤ 9×9) spin representations.
//!
//! The exponential uses scaling-and-squaring with the Padé(13) approximant of
//! Higham (2005); for matrices this small robustness matters more than speed.

use ndarray::Array2;
use num_complex::Complex64;

pub(crate) type CMat = Array2<Complex64>;

pub(crate) fn identity(n: usize) -> CMat {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

pub(crate) fn matmul(a: &CMat, b: &CMat) -> CMat {
    a.dot(b)
}

pub(crate) fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

fn one_norm(a: &CMat) -> f64 {
    let mut max = 0.0_f64;
    for j in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|i| a[[i, j]].norm()).sum();
        max = max.max(s);
    }
    max
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// exp(A) for a square complex matrix.
pub(crate) fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }

    // theta_13 from Higham's table; scale so the Padé approximant is accurate.
    let theta13 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;

    let c = |k: usize| Complex64::new(PADE13[k], 0.0);
    let eye = identity(n);
    let a2 = matmul(&a1, &a1);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a2, &a4);

    let u_inner = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let u = matmul(
        &a1,
        &(matmul(&a6, &u_inner) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &eye * c(1)),
    );
    let v_inner = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = matmul(&a6, &v_inner) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &eye * c(0);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = solve(den, num);
    for _ in 0..s {
        r = matmul(&r, &r);
    }
    r
}

/// Solves A X = B by Gaussian elimination with partial pivoting.
fn solve(mut a: CMat, mut b: CMat) -> CMat {
    let n = a.nrows();
    let m = b.ncols();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[[col, col]].norm();
        for r in col + 1..n {
            let v = a[[r, col]].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if piv != col {
            for j in 0..n {
                a.swap([col, j], [piv, j]);
            }
            for j in 0..m {
                b.swap([col, j], [piv, j]);
            }
        }
        let p = a[[col, col]];
        for r in col + 1..n {
            let f = a[[r, col]] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[[col, j]];
                a[[r, j]] -= f * v;
            }
            for j in 0..m {
                let v = b[[col, j]];
                b[[r, j]] -= f * v;
            }
        }
    }
    let mut x: CMat = Array2::zeros((n, m));
    for col in (0..n).rev() {
        for j in 0..m {
            let mut s = b[[col, j]];
            for k in col + 1..n {
                s -= a[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = s / a[[col, col]];
        }
    }
    x
}

#[cfg(test)]
pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
