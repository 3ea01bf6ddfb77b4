//! Small dense least-squares helpers. Design matrices are passed as column
//! lists, which is how stepwise selection and MARS build them.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular;

/// Least squares via Householder QR. Fails when the columns are (nearly)
/// linearly dependent.
pub fn qr_least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>, Singular> {
    let m = cols.len();
    let n = y.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    if n < m {
        return Err(Singular);
    }
    // a is column-major copy; b is the transformed right-hand side
    let mut a: Vec<Vec<f64>> = cols.to_vec();
    let mut b = y.to_vec();
    let scale = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(Singular);
    }
    let tol = 1e-10 * scale;

    for k in 0..m {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= tol {
            return Err(Singular);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
                let f = 2.0 * dot / vnorm2;
                for (ci, vi) in col[k..].iter_mut().zip(&v) {
                    *ci -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&b[k..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (bi, vi) in b[k..].iter_mut().zip(&v) {
                *bi -= f * vi;
            }
        }
    }

    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|j| a[j][k] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Singular)
    }
}

/// Ridge-regularised normal equations `(A'A + lambda I) x = A'y` solved by
/// Cholesky. Used as the fallback when [`qr_least_squares`] fails.
pub fn ridge_least_squares(cols: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<Vec<f64>, Singular> {
    let m = cols.len();
    let mut g = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        rhs[i] = dot(&cols[i], y);
        for j in 0..=i {
            let v = dot(&cols[i], &cols[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
        g[i][i] += lambda;
    }
    cholesky_solve(&mut g, &mut rhs)?;
    Ok(rhs)
}

fn cholesky_solve(g: &mut [Vec<f64>], b: &mut [f64]) -> Result<(), Singular> {
    let m = b.len();
    for j in 0..m {
        let mut d = g[j][j];
        for k in 0..j {
            d -= g[j][k] * g[j][k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Singular);
        }
        let d = d.sqrt();
        g[j][j] = d;
        for i in j + 1..m {
            let mut s = g[i][j];
            for k in 0..j {
                s -= g[i][k] * g[j][k];
            }
            g[i][j] = s / d;
        }
    }
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= g[i][k] * b[k];
        }
        b[i] = s / g[i][i];
    }
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in i + 1..m {
            s -= g[k][i] * b[k];
        }
        b[i] = s / g[i][i];
    }
    Ok(())
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual sum of squares of `y - sum_j coef_j * col_j`.
pub fn rss(cols: &[Vec<f64>], coef: &[f64], y: &[f64]) -> f64 {
    (0..y.len())
        .map(|i| {
            let fit: f64 = cols.iter().zip(coef).map(|(c, b)| c[i] * b).sum();
            (y[i] - fit).powi(2)
        })
        .sum()
}
