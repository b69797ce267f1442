//! Small dense `D x D` matrices stored as `[[f64; D]; D]`, row `i` first.

use crate::error::{Error, Result};

pub type Matrix<const D: usize> = [[f64; D]; D];

pub fn identity<const D: usize>() -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

pub fn zeros<const D: usize>() -> Matrix<D> {
    [[0.0; D]; D]
}

pub fn transpose<const D: usize>(a: &Matrix<D>) -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn matmul<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..D).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn matvec<const D: usize>(a: &Matrix<D>, x: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| (0..D).map(|k| a[i][k] * x[k]).sum())
}

pub fn add<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn scale<const D: usize>(s: f64, a: &Matrix<D>) -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| s * a[i][j]))
}

/// `A : B = tr(A^T B)`.
pub fn contract<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> f64 {
    (0..D).flat_map(|i| (0..D).map(move |j| (i, j))).map(|(i, j)| a[i][j] * b[i][j]).sum()
}

/// Squared Frobenius norm.
pub fn norm2<const D: usize>(a: &Matrix<D>) -> f64 {
    contract(a, a)
}

pub fn trace<const D: usize>(a: &Matrix<D>) -> f64 {
    (0..D).map(|i| a[i][i]).sum()
}

/// The two indices of `0..3` other than `i`, in increasing order.
fn others3(i: usize) -> [usize; 2] {
    match i {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

fn sign(i: usize, j: usize) -> f64 {
    if (i + j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_dim(d: usize) {
    assert!(d == 2 || d == 3, "matrices are supported in dimensions 2 and 3, got {d}");
}

pub fn det<const D: usize>(a: &Matrix<D>) -> f64 {
    check_dim(D);
    if D == 2 {
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    } else {
        let c = cofactor(a);
        (0..3).map(|j| a[0][j] * c[0][j]).sum()
    }
}

/// Matrix of signed minors, `(cof A)^i_j = (-1)^{i+j} det(A without row i, column j)`.
pub fn cofactor<const D: usize>(a: &Matrix<D>) -> Matrix<D> {
    check_dim(D);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if D == 2 {
                sign(i, j) * a[1 - i][1 - j]
            } else {
                let [r0, r1] = others3(i);
                let [c0, c1] = others3(j);
                sign(i, j) * (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0])
            }
        })
    })
}

/// `grad_A (|cof A|^2 / 2)`, assembled entry by entry from the derivatives
/// of the minors.
pub fn half_cof_norm_gradient<const D: usize>(a: &Matrix<D>) -> Matrix<D> {
    check_dim(D);
    let q = cofactor(a);
    let mut g = zeros::<D>();
    for i in 0..D {
        for j in 0..D {
            let s = sign(i, j) * q[i][j];
            if D == 2 {
                g[1 - i][1 - j] += s;
            } else {
                let [r0, r1] = others3(i);
                let [c0, c1] = others3(j);
                g[r0][c0] += s * a[r1][c1];
                g[r1][c1] += s * a[r0][c0];
                g[r0][c1] -= s * a[r1][c0];
                g[r1][c0] -= s * a[r0][c1];
            }
        }
    }
    g
}

/// `A^{-1} = cof(A)^T / det A`.
pub fn inverse<const D: usize>(a: &Matrix<D>) -> Result<Matrix<D>> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InvalidArgument(format!("matrix is singular (det = {d:e})")));
    }
    Ok(scale(1.0 / d, &transpose(&cofactor(a))))
}
