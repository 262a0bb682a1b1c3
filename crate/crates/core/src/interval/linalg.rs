//! Interval linear algebra: Gauss echelon form with certified rank bounds,
//! kernel enclosures by back-substitution, determinants and adjugates by
//! division-free expansion, and approximate midpoint inverses.

use super::dyadic::{Dyadic, Round};
use super::{Interval, IntervalBox, IntervalError};

pub type IMatrix = Vec<Vec<Interval>>;

pub fn imat_dim(a: &IMatrix) -> (usize, usize) {
    (a.len(), a.first().map_or(0, |r| r.len()))
}

pub fn imat_transpose(a: &IMatrix) -> IMatrix {
    let (n, m) = imat_dim(a);
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn imat_mul(a: &IMatrix, b: &IMatrix, prec: u32) -> IMatrix {
    let (n, k) = imat_dim(a);
    let (_, m) = imat_dim(b);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Interval::zero();
                    for l in 0..k {
                        acc = acc.add(&a[i][l].mul(&b[l][j], prec + 16), prec + 16);
                    }
                    acc.round_out(prec)
                })
                .collect()
        })
        .collect()
}

pub fn imat_vec(a: &IMatrix, x: &[Interval], prec: u32) -> Vec<Interval> {
    a.iter()
        .map(|row| {
            let mut acc = Interval::zero();
            for (aij, xj) in row.iter().zip(x) {
                acc = acc.add(&aij.mul(xj, prec + 16), prec + 16);
            }
            acc.round_out(prec)
        })
        .collect()
}

/// Interval determinant by dynamic programming over column subsets
/// (division-free Laplace expansion).
pub fn imat_det(a: &IMatrix, prec: u32) -> Interval {
    let n = a.len();
    assert!(n <= 16, "subset-DP determinant limited to small matrices");
    let full = (1usize << n) - 1;
    let mut table: Vec<Option<Interval>> = vec![None; 1 << n];
    table[0] = Some(Interval::one());
    for mask in 1usize..=full {
        let row = (mask.count_ones() - 1) as usize;
        let mut acc = Interval::zero();
        // Laplace expansion along the last row of the submatrix: the sign of
        // the first column position is (−1)^row.
        let mut sign_pos = row % 2 == 0;
        let mut rest = mask;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let sub = table[mask & !(1 << j)].as_ref().unwrap();
            let term = a[row][j].mul(sub, prec + 16);
            acc = if sign_pos { acc.add(&term, prec + 16) } else { acc.sub(&term, prec + 16) };
            sign_pos = !sign_pos;
        }
        table[mask] = Some(acc);
    }
    table[full].take().unwrap().round_out(prec)
}

/// Adjugate matrix: adj(A)[j][i] = (−1)^{i+j} · minor_{ij}(A), so that
/// A · adj(A) = det(A) · I. Entries are polynomial in A's entries, hence
/// interval evaluation is sound near singular matrices.
pub fn imat_adjugate(a: &IMatrix, prec: u32) -> IMatrix {
    let n = a.len();
    let mut adj = vec![vec![Interval::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: IMatrix = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| a[r][c].clone())
                        .collect()
                })
                .collect();
            let d = if minor.is_empty() { Interval::one() } else { imat_det(&minor, prec) };
            adj[j][i] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    adj
}

/// Result of interval Gaussian elimination with partial pivoting on midpoint
/// magnitudes.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Row-echelon interval matrix.
    pub rows: IMatrix,
    /// Columns in which a certified nonzero pivot was found, in order.
    pub pivot_cols: Vec<usize>,
    /// Certified lower bound on the rank: every pivot interval excludes zero.
    pub rank_lower_bound: usize,
    /// True when elimination stopped early because a pivot candidate
    /// contained zero.
    pub pivot_ambiguous: bool,
}

/// Echelon form by interval Gauss elimination. Pivots are chosen by largest
/// midpoint magnitude (ties broken by lowest row index); a pivot interval
/// containing zero in every remaining candidate stops certification.
pub fn interval_gauss_echelon(a: &IMatrix, prec: u32) -> Echelon {
    let (n, m) = imat_dim(a);
    let mut rows = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    let mut ambiguous = false;
    for col in 0..m {
        if row >= n {
            break;
        }
        // best pivot by midpoint magnitude
        let mut best: Option<(usize, Dyadic)> = None;
        for r in row..n {
            let mag = rows[r][col].mid().abs();
            match &best {
                None => best = Some((r, mag)),
                Some((_, bm)) => {
                    if mag.cmp_dyadic(bm) == std::cmp::Ordering::Greater {
                        best = Some((r, mag));
                    }
                }
            }
        }
        let (piv_row, _) = best.unwrap();
        if rows[piv_row][col].contains_zero() {
            // cannot certify a pivot in this column; move on
            ambiguous = true;
            continue;
        }
        rows.swap(row, piv_row);
        for r in row + 1..n {
            if rows[r][col].lo.is_zero() && rows[r][col].hi.is_zero() {
                continue;
            }
            let factor = match rows[r][col].div(&rows[row][col], prec) {
                Ok(f) => f,
                Err(_) => {
                    ambiguous = true;
                    continue;
                }
            };
            for c in col..m {
                let sub = factor.mul(&rows[row][c], prec + 16);
                rows[r][c] = rows[r][c].sub(&sub, prec);
            }
            // the eliminated entry is exactly zero by construction
            rows[r][col] = Interval::zero();
        }
        pivot_cols.push(col);
        row += 1;
    }
    let rank = pivot_cols.len();
    Echelon { rows, pivot_cols, rank_lower_bound: rank, pivot_ambiguous: ambiguous }
}

/// Kernel enclosure from an echelon form with exactly one free column: the
/// free component is set to exactly 1 and the rest obtained by
/// back-substitution. Requires rank ≥ n−1 certified.
pub fn kernel_from_echelon(
    ech: &Echelon,
    n_cols: usize,
    prec: u32,
) -> Result<Vec<Interval>, IntervalError> {
    let free: Vec<usize> = (0..n_cols)
        .filter(|c| !ech.pivot_cols.contains(c))
        .collect();
    if free.len() != 1 {
        return Err(IntervalError::Parse(format!(
            "expected exactly one free column, found {}",
            free.len()
        )));
    }
    let fc = free[0];
    let mut v = vec![Interval::zero(); n_cols];
    v[fc] = Interval::one();
    for (k, &c) in ech.pivot_cols.iter().enumerate().rev() {
        let row = &ech.rows[k];
        let mut acc = Interval::zero();
        for j in c + 1..n_cols {
            acc = acc.add(&row[j].mul(&v[j], prec + 16), prec + 16);
        }
        v[c] = acc.neg().div(&row[c], prec)?;
    }
    Ok(v)
}

/// Kernel enclosures of A and Aᵀ for a matrix with certified nullity 1.
pub fn kernel_vectors(
    a: &IMatrix,
    prec: u32,
) -> Result<(Vec<Interval>, Vec<Interval>), IntervalError> {
    let n = a.len();
    let ech = interval_gauss_echelon(a, prec);
    if ech.rank_lower_bound < n - 1 {
        return Err(IntervalError::Parse(format!(
            "rank lower bound {} < n-1 = {}",
            ech.rank_lower_bound,
            n - 1
        )));
    }
    let v = kernel_from_echelon(&ech, n, prec)?;
    let et = interval_gauss_echelon(&imat_transpose(a), prec);
    if et.rank_lower_bound < n - 1 {
        return Err(IntervalError::Parse("transpose rank bound too low".into()));
    }
    let w = kernel_from_echelon(&et, n, prec)?;
    Ok((v, w))
}

/// Approximate inverse of the midpoint matrix, computed in dyadic arithmetic
/// by Gauss-Jordan elimination at working precision. The result is only used
/// as a Krawczyk preconditioner, so no rigor is required here.
pub fn midpoint_inverse(a: &IMatrix, prec: u32) -> Option<Vec<Vec<Dyadic>>> {
    let n = a.len();
    let mut m: Vec<Vec<Dyadic>> = (0..n)
        .map(|i| {
            let mut row: Vec<Dyadic> = a[i].iter().map(|iv| iv.mid().round(prec, Round::Down)).collect();
            for j in 0..n {
                row.push(if i == j { Dyadic::one() } else { Dyadic::zero() });
            }
            row
        })
        .collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs().cmp_dyadic(&m[piv][col].abs()) == std::cmp::Ordering::Greater {
                piv = r;
            }
        }
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(col, piv);
        let inv_p = Dyadic::one().div(&m[col][col], prec, Round::Down);
        for c in 0..2 * n {
            m[col][c] = m[col][c].mul(&inv_p, prec, Round::Down);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let t = f.mul(&m[col][c], prec, Round::Down);
                m[r][c] = m[r][c].sub(&t, prec, Round::Down);
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Point matrix (dyadic entries) viewed as an interval matrix.
pub fn point_matrix(a: &[Vec<Dyadic>]) -> IMatrix {
    a.iter()
        .map(|row| row.iter().map(|d| Interval::point(d.clone())).collect())
        .collect()
}

/// ‖A·v‖ membership check helper: every component of A·v must contain zero.
pub fn product_contains_zero(a: &IMatrix, v: &[Interval], prec: u32) -> bool {
    imat_vec(a, v, prec).iter().all(|iv| iv.contains_zero())
}

/// Identity interval matrix.
pub fn imat_identity(n: usize) -> IMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Interval::one() } else { Interval::zero() })
                .collect()
        })
        .collect()
}

pub fn _ibox_from_rows(rows: Vec<Interval>) -> IntervalBox {
    IntervalBox(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thin(x: f64) -> Interval {
        Interval::from_f64(x)
    }

    #[test]
    fn echelon_identity_full_rank() {
        let a = imat_identity(4);
        let e = interval_gauss_echelon(&a, 64);
        assert_eq!(e.rank_lower_bound, 4);
        assert!(!e.pivot_ambiguous);
    }

    #[test]
    fn kernel_of_diag_110() {
        let a = vec![
            vec![thin(1.0), thin(0.0), thin(0.0)],
            vec![thin(0.0), thin(1.0), thin(0.0)],
            vec![thin(0.0), thin(0.0), thin(0.0)],
        ];
        let (v, w) = kernel_vectors(&a, 64).unwrap();
        for k in 0..2 {
            assert!(v[k].contains_zero());
            assert!(w[k].contains_zero());
        }
        assert!((v[2].to_f64_mid() - 1.0).abs() < 1e-12);
        assert!((w[2].to_f64_mid() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn det_and_adjugate_consistency() {
        let a = vec![
            vec![thin(2.0), thin(1.0), thin(0.5)],
            vec![thin(-1.0), thin(3.0), thin(1.0)],
            vec![thin(0.0), thin(1.0), thin(4.0)],
        ];
        let d = imat_det(&a, 96);
        // det = 2(12-1) - 1(-4-0) + 0.5(-1-0) = 22 + 4 - 0.5 = 25.5
        assert!(d.contains_f64(25.5));
        assert!(d.width(96).to_f64() < 1e-20);
        let adj = imat_adjugate(&a, 96);
        let prod = imat_mul(&a, &adj, 96);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!(prod[i][j].contains_f64(25.5));
                } else {
                    assert!(prod[i][j].contains_zero());
                }
            }
        }
    }

    #[test]
    fn echelon_rank_monotone_in_precision() {
        // near-singular matrix: rank bound never decreases at doubled precision
        let eps = 1e-13;
        let a = vec![
            vec![thin(1.0), thin(1.0)],
            vec![thin(1.0), thin(1.0 + eps)],
        ];
        let r64 = interval_gauss_echelon(&a, 64).rank_lower_bound;
        let r128 = interval_gauss_echelon(&a, 128).rank_lower_bound;
        assert!(r128 >= r64);
        assert_eq!(r128, 2);
    }

    #[test]
    fn midpoint_inverse_accuracy() {
        let a = vec![
            vec![thin(4.0), thin(1.0)],
            vec![thin(2.0), thin(3.0)],
        ];
        let inv = midpoint_inverse(&a, 128).unwrap();
        // A⁻¹ = 1/10 [[3, -1], [-2, 4]]
        assert!((inv[0][0].to_f64() - 0.3).abs() < 1e-15);
        assert!((inv[0][1].to_f64() + 0.1).abs() < 1e-15);
        assert!((inv[1][0].to_f64() + 0.2).abs() < 1e-15);
        assert!((inv[1][1].to_f64() - 0.4).abs() < 1e-15);
    }
}
