//! Small dense kernels: LU determinants, Cholesky factors, SPD inverses, spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Determinant by LU decomposition with partial pivoting. Consumes its scratch matrix.
pub fn lu_determinant(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    debug_assert!(a.is_square());
    let mut det = 1.0;
    for k in 0..n {
        let mut pivot = k;
        let mut best = a[(k, k)].abs();
        for i in k + 1..n {
            let v = a[(i, k)].abs();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap_rows(pivot, k);
            det = -det;
        }
        let d = a[(k, k)];
        det *= d;
        for i in k + 1..n {
            let f = a[(i, k)] / d;
            if f != 0.0 {
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
    }
    det
}

/// `det(m[rows, cols])` for index lists of equal length; 1 for the empty minor.
pub fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    debug_assert_eq!(rows.len(), cols.len());
    match rows.len() {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])],
        k => lu_determinant(DMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])])),
    }
}

fn check_symmetric(s: &DMatrix<f64>, tol: f64, what: &str) -> Result<()> {
    if !s.is_square() {
        return Err(Error::domain(format!(
            "{what} is {}x{}, expected square",
            s.nrows(),
            s.ncols()
        )));
    }
    let n = s.nrows();
    for i in 0..n {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > tol {
                return Err(Error::domain(format!(
                    "{what} is not symmetric at ({i},{j}): {} vs {}",
                    s[(i, j)],
                    s[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// Upper-triangular `X` with `XᵀX = s` (the transpose of the lower Cholesky factor).
///
/// Fails with a domain error naming the first non-positive pivot.
pub fn cholesky_upper(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(s, 1e-12 * s.amax().max(1.0), "matrix")?;
    let n = s.nrows();
    let mut x = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= x[(k, j)] * x[(k, j)];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::domain(format!(
                "matrix is not positive definite: pivot {j} is {d:.6e}"
            )));
        }
        let d = d.sqrt();
        x[(j, j)] = d;
        for i in j + 1..n {
            let mut v = s[(j, i)];
            for k in 0..j {
                v -= x[(k, j)] * x[(k, i)];
            }
            x[(j, i)] = v / d;
        }
    }
    Ok(x)
}

/// Inverse of an upper-triangular matrix by back substitution.
pub fn upper_triangular_inverse(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for col in 0..n {
        inv[(col, col)] = 1.0 / x[(col, col)];
        for i in (0..col).rev() {
            let mut v = 0.0;
            for k in i + 1..=col {
                v += x[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = -v / x[(i, i)];
        }
    }
    inv
}

/// Inverse of an SPD matrix through its Cholesky factor: `s⁻¹ = X⁻¹ X⁻ᵀ`.
pub fn spd_inverse(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let xi = upper_triangular_inverse(&cholesky_upper(s)?);
    let inv = &xi * xi.transpose();
    // exact symmetry
    Ok(DMatrix::from_fn(inv.nrows(), inv.ncols(), |i, j| {
        0.5 * (inv[(i, j)] + inv[(j, i)])
    }))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(s: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral summary of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub min: f64,
    pub max: f64,
}

impl Spectrum {
    pub fn of(s: &DMatrix<f64>) -> Self {
        let ev = symmetric_eigenvalues(s);
        Self {
            min: ev.first().copied().unwrap_or(f64::NAN),
            max: ev.last().copied().unwrap_or(f64::NAN),
        }
    }

    /// 2-norm condition number, infinite when the matrix is not positive definite.
    pub fn condition_number(&self) -> f64 {
        if self.min > 0.0 {
            self.max / self.min
        } else {
            f64::INFINITY
        }
    }
}

/// Ratio of extreme singular values.
pub fn condition_number_general(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}
