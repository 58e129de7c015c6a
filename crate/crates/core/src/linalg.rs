//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::scalar::{Scalar, VecD};

/// Reduced row echelon form. Returns the reduced rows and the pivot column of each
/// nonzero row, in increasing column order.
pub fn rref(rows: &[Vec<Scalar>]) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..ncols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(vectors: &[VecD]) -> usize {
    let rows: Vec<Vec<Scalar>> = vectors.iter().map(|v| v.0.clone()).collect();
    rref(&rows).1.len()
}

/// Solves `A x = b` (A is k×d given by its rows). Pivot columns are taken in
/// lexicographic column order and all free coordinates are set to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve_canonical(a: &[VecD], b: &[Scalar]) -> Option<VecD> {
    let d = a.first().map_or(0, VecD::dim);
    let aug: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.0.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.last() == Some(&d) {
        return None;
    }
    let mut x = VecD::zeros(d);
    for (row, &c) in m.iter().zip(&pivots) {
        x.0[c] = row[d].clone();
    }
    Some(x)
}

/// Basis of `{x : A x = 0}`, one vector per free column (free coordinate = 1).
pub fn null_space(a: &[VecD], d: usize) -> Vec<VecD> {
    let rows: Vec<Vec<Scalar>> = a.iter().map(|v| v.0.clone()).collect();
    let (m, pivots) = if rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(&rows)
    };
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = VecD::zeros(d);
            v.0[free] = Scalar::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v.0[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn solves_square_system() {
        let a = vec![VecD::from_ints(&[1, 0]), VecD::from_ints(&[1, 1])];
        let x = solve_canonical(&a, &[int(1), int(0)]).unwrap();
        assert_eq!(x, VecD::from_ints(&[1, -1]));
    }

    #[test]
    fn underdetermined_sets_free_coordinates_to_zero() {
        let a = vec![VecD::from_ints(&[0, 2, 1])];
        let x = solve_canonical(&a, &[int(3)]).unwrap();
        assert_eq!(x, VecD::from_ratios(&[(0, 1), (3, 2), (0, 1)]));
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 2);
        for n in &ns {
            assert!(a[0].dot(n).is_zero());
        }
    }

    #[test]
    fn detects_inconsistency_and_rank() {
        let a = vec![VecD::from_ints(&[1, 1]), VecD::from_ints(&[2, 2])];
        assert!(solve_canonical(&a, &[int(1), int(3)]).is_none());
        assert_eq!(rank(&a), 1);
        assert_eq!(solve_canonical(&a, &[int(1), int(2)]).unwrap(), VecD::from_ints(&[1, 0]));
        assert_eq!(rank(&[VecD::from_ratios(&[(1, 2), (1, 3)]), VecD::from_ints(&[3, 2])]), 1);
        let _ = ratio(1, 1);
    }
}
