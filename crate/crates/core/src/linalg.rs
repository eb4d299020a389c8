// SPDX-License-Identifier: Apache-2.0

//! Small dense integer matrices.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<i64>>;

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = aik
                    .checked_mul(bk[j])
                    .and_then(|v| v.checked_add(out[i][j]))
                    .ok_or(Error::Overflow("matrix product"))?;
            }
        }
    }
    Ok(out)
}

pub fn mat_vec(a: &Matrix, v: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).try_fold(0i64, |acc, (&x, &y)| {
                x.checked_mul(y)
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(Error::Overflow("matrix-vector product"))
            })
        })
        .collect()
}

pub fn mat_pow(a: &Matrix, mut k: u32) -> Result<Matrix> {
    let mut base = a.clone();
    let mut acc = identity(a.len());
    while k > 0 {
        if k & 1 == 1 {
            acc = mat_mul(&acc, &base)?;
        }
        k >>= 1;
        if k > 0 {
            base = mat_mul(&base, &base)?;
        }
    }
    Ok(acc)
}

pub fn transpose(a: &Matrix) -> Matrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn to_big(a: &Matrix) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m = to_big(a);
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Characteristic polynomial `det(X I - a)`, constant term first, by the
/// Faddeev–LeVerrier recursion (exact integer divisions).
pub fn char_poly(a: &Matrix) -> Vec<BigInt> {
    let n = a.len();
    let big = to_big(a);
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    // m_k = a * m_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(a m_k) / k
    let mut mk: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    for k in 1..=n {
        let am: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|l| &big[i][l] * &mk[l][j]).sum())
                    .collect()
            })
            .collect();
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -tr / BigInt::from(k);
        coeffs[n - k] = c.clone();
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    coeffs
}

/// Inverse of a matrix with determinant ±1.
#[allow(clippy::needless_range_loop)]
pub fn inverse_unimodular(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let d = det(a)
        .to_i64()
        .ok_or(Error::Overflow("determinant"))?;
    if d.abs() != 1 {
        return Err(Error::Precondition(format!(
            "matrix has determinant {d}, not ±1"
        )));
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Matrix = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let cof = det(&minor).to_i64().ok_or(Error::Overflow("cofactor"))?;
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = s * cof * d;
        }
    }
    Ok(inv)
}
