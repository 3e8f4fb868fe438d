//! Ordinary least squares via normal equations, sized for the small
//! regressions used by the ADF test and ARMA estimation.

use crate::error::{Error, Result};

/// Solve min ||y - X b||^2. `rows` holds the design matrix row-major.
/// Returns the coefficient vector; singular systems are an error.
pub fn ols(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = rows.len();
    assert_eq!(n, y.len());
    if n == 0 {
        return Err(Error::SingularDesign);
    }
    let k = rows[0].len();
    if n < k {
        return Err(Error::SingularDesign);
    }
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }
    solve(xtx, xty)
}

/// OLS plus the standard error of each coefficient (homoskedastic).
pub fn ols_with_se(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rows.len();
    let k = rows[0].len();
    let beta = ols(rows, y)?;
    let mut rss = 0.0;
    for (row, &yi) in rows.iter().zip(y) {
        let fitted: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
        rss += (yi - fitted) * (yi - fitted);
    }
    let dof = n.saturating_sub(k);
    if dof == 0 {
        return Err(Error::SingularDesign);
    }
    let s2 = rss / dof as f64;
    // Diagonal of (X'X)^-1 by solving k unit systems.
    let mut xtx = vec![vec![0.0; k]; k];
    for row in rows {
        for i in 0..k {
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }
    let mut se = vec![0.0; k];
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        let col = solve(xtx.clone(), e)?;
        if col[i] < 0.0 {
            return Err(Error::SingularDesign);
        }
        se[i] = (s2 * col[i]).sqrt();
    }
    Ok((beta, se))
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let k = b.len();
    for i in 0..k {
        let mut pivot = i;
        for r in i + 1..k {
            if a[r][i].abs() > a[pivot][i].abs() {
                pivot = r;
            }
        }
        if a[pivot][i].abs() < 1e-10 * (1.0 + a[i].iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            return Err(Error::SingularDesign);
        }
        a.swap(i, pivot);
        b.swap(i, pivot);
        let diag = a[i][i];
        for j in i..k {
            a[i][j] /= diag;
        }
        b[i] /= diag;
        for r in 0..k {
            if r == i {
                continue;
            }
            let f = a[r][i];
            if f == 0.0 {
                continue;
            }
            for j in i..k {
                a[r][j] -= f * a[i][j];
            }
            b[r] -= f * b[i];
        }
    }
    Ok(b)
}
