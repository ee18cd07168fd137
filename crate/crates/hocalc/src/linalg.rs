//! Small dense linear algebra over exact fields and over f64.

use num_traits::Num;

/// Inverse of a square matrix by Gauss-Jordan elimination, `None` if singular.
pub fn inverse<T: Num + Clone>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
                inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
            }
        }
    }
    Some(inv)
}

/// Determinant by elimination.
pub fn det<T: Num + Clone>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut d = T::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(p) => p,
            None => return T::zero(),
        };
        if piv != col {
            a.swap(col, piv);
            d = T::zero() - d;
        }
        let p = a[col][col].clone();
        d = d * p.clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / p.clone();
            for j in col..n {
                a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
            }
        }
    }
    d
}

/// Rank of a list of row vectors.
pub fn rank<T: Num + Clone>(rows: &[Vec<T>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncol = rows[0].len();
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncol {
        let piv = match (r..a.len()).find(|&i| !a[i][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        a.swap(r, piv);
        let p = a[r][col].clone();
        for i in r + 1..a.len() {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone() / p.clone();
            for j in col..ncol {
                a[i][j] = a[i][j].clone() - f.clone() * a[r][j].clone();
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

pub fn mat_vec_f64(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Orthonormal basis (w.r.t. `gram`) of the span of `vecs`, by Gram-Schmidt.
pub fn orthonormal_basis(vecs: &[Vec<f64>], gram: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let gv = mat_vec_f64(gram, v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = ip(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = ip(&w, &w).sqrt();
        if n > 1e-9 * (1.0 + ip(v, v).sqrt()) {
            basis.push(w.iter().map(|x| x / n).collect());
        }
    }
    basis
}
