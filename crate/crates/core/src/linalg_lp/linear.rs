use super::DenseMatrix;
use crate::error::{Error, Result};

/// Result of a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    /// `‖A x − b‖₂`
    pub residual: f64,
    pub rank: usize,
    /// The system was rank deficient and inconsistent, so the normal
    /// equations were solved instead.
    pub used_normal_equations: bool,
}

/// Solves `A x = b` for square `A`.
///
/// Gaussian elimination with complete pivoting reveals the rank. Free
/// variables of a rank-deficient system are set to zero; if that basic
/// solution does not satisfy the system, the normal equations `AᵀA x = Aᵀb`
/// (always consistent) are solved the same way.
pub fn solve_linear_system(a: &DenseMatrix, b: &[f64]) -> Result<LinearSolution> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let (x, rank) = eliminate(a, b);
    let residual = residual_norm(a, &x, b);
    let scale = 1.0 + b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rank == a.rows() || residual <= 1e-10 * scale {
        return Ok(LinearSolution {
            x,
            residual,
            rank,
            used_normal_equations: false,
        });
    }

    let at = a.transpose();
    let ata = at.mul(a)?;
    let atb = at.mul_vec(b);
    let (x, _) = eliminate(&ata, &atb);
    let residual = residual_norm(a, &x, b);
    Ok(LinearSolution {
        x,
        residual,
        rank,
        used_normal_equations: true,
    })
}

fn residual_norm(a: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Complete-pivoting elimination; returns a basic solution and the numerical rank.
fn eliminate(a: &DenseMatrix, b: &[f64]) -> (Vec<f64>, usize) {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = a.to_rows();
    let mut rhs = b.to_vec();
    // perm[k] = original column stored at position k
    let mut perm: Vec<usize> = (0..n).collect();
    let tol = 1e-12 * a.max_abs().max(f64::MIN_POSITIVE);

    let mut rank = 0;
    for k in 0..n {
        let mut best = (k, k, 0.0_f64);
        for (r, row) in m.iter().enumerate().skip(k) {
            for (c, v) in row.iter().enumerate().skip(k) {
                if v.abs() > best.2 {
                    best = (r, c, v.abs());
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        let (pr, pc, _) = best;
        m.swap(k, pr);
        rhs.swap(k, pr);
        if pc != k {
            for row in m.iter_mut() {
                row.swap(k, pc);
            }
            perm.swap(k, pc);
        }
        let pivot = m[k][k];
        for r in (k + 1)..n {
            let f = m[r][k] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                m[r][c] -= f * m[k][c];
            }
            rhs[r] -= f * rhs[k];
        }
        rank += 1;
    }

    let mut y = vec![0.0; n];
    for k in (0..rank).rev() {
        let s: f64 = ((k + 1)..rank).map(|c| m[k][c] * y[c]).sum();
        y[k] = (rhs[k] - s) / m[k][k];
    }
    let mut x = vec![0.0; n];
    for (k, &col) in perm.iter().enumerate() {
        x[col] = y[k];
    }
    (x, rank)
}

/// Inverts a nonsingular square matrix by Gauss–Jordan elimination with
/// partial pivoting. Returns `None` when a pivot vanishes.
pub(crate) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for k in 0..n {
        let pr = (k..n).max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs()))?;
        if m[pr][k].abs() < 1e-14 {
            return None;
        }
        m.swap(k, pr);
        inv.swap(k, pr);
        let p = m[k][k];
        for c in 0..n {
            m[k][c] /= p;
            inv[k][c] /= p;
        }
        for r in 0..n {
            if r == k {
                continue;
            }
            let f = m[r][k];
            if f == 0.0 {
                continue;
            }
            for c in 0..n {
                m[r][c] -= f * m[k][c];
                inv[r][c] -= f * inv[k][c];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let s = solve_linear_system(&DenseMatrix::identity(2), &[1.0, 2.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0]);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = DenseMatrix::from_rows(&[vec![0.5, 0.2], vec![0.2, 0.4]]).unwrap();
        let s = solve_linear_system(&a, &[0.5, 0.4]).unwrap();
        assert!((s.x[0] - 0.75).abs() < 1e-12);
        assert!((s.x[1] - 0.625).abs() < 1e-12);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn rank_one_identical_events() {
        let q = 0.3;
        let n = 4;
        let a = DenseMatrix::new(n, n, vec![q; n * n]).unwrap();
        let s = solve_linear_system(&a, &vec![q; n]).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.residual <= 1e-9);
        assert!((s.x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_singular_falls_back_to_normal_equations() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let s = solve_linear_system(&a, &[1.0, 3.0]).unwrap();
        assert!(s.used_normal_equations);
        // least-squares optimum satisfies x₁ + x₂ = 2
        assert!((s.x[0] + s.x[1] - 2.0).abs() < 1e-9);
        assert!((s.residual - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            solve_linear_system(&a, &[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn invert_roundtrip() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
        let inv = invert(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
