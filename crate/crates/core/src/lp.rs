//! Dense two-phase primal simplex over exact rationals with Bland's rule.
//!
//! Problems are tiny (a handful of rows and columns), so a dense tableau is fine.

use num_traits::{One, Signed, Zero};

use crate::scalar::{Scalar, VecD};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Scalar>, value: Scalar },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau {
    rows: Vec<Vec<Scalar>>,
    // Reduced costs; the last entry holds minus the objective value.
    cost: Vec<Scalar>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Scalar::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, c: &[Scalar]) {
        self.cost = c.to_vec();
        self.cost.resize(self.ncols + 1, Scalar::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if !self.cost[b].is_zero() {
                let f = self.cost[b].clone();
                for (x, p) in self.cost.iter_mut().zip(&self.rows[r]) {
                    *x -= &f * p;
                }
            }
        }
    }

    /// Runs simplex iterations restricted to columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[self.ncols] / &row[enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn minimize_standard(a: &[Vec<Scalar>], b: &[Scalar], c: &[Scalar]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<Scalar> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        r.resize(n, Scalar::zero());
        for k in 0..m {
            r.push(if k == i { Scalar::one() } else { Scalar::zero() });
        }
        r.push(if flip { -rhs } else { rhs.clone() });
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        cost: Vec::new(),
        basis: (n..n + m).collect(),
        ncols,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Scalar::zero(); n];
    phase1.extend(std::iter::repeat_n(Scalar::one(), m));
    t.set_objective(&phase1);
    t.optimize(ncols);
    if !t.cost[ncols].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, j);
                r += 1;
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
            }
        } else {
            r += 1;
        }
    }

    // Phase 2 on the original columns only.
    t.set_objective(c);
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Scalar::zero(); n];
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        if bv < n {
            x[bv] = row[ncols].clone();
        }
    }
    let value = c.iter().zip(&x).fold(Scalar::zero(), |acc, (ci, xi)| acc + ci * xi);
    LpOutcome::Optimal { x, value }
}

/// A polyhedron `{x ∈ Q^d : a_i·x ≥ b_i}` with free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub dim: usize,
    pub normals: Vec<VecD>,
    pub bounds: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolyMin {
    Optimal { point: VecD, value: Scalar },
    Infeasible,
    Unbounded,
}

impl Polyhedron {
    pub fn new(dim: usize, normals: Vec<VecD>, bounds: Vec<Scalar>) -> Self {
        Polyhedron {
            dim,
            normals,
            bounds,
        }
    }

    pub fn contains(&self, x: &VecD) -> bool {
        self.normals
            .iter()
            .zip(&self.bounds)
            .all(|(a, b)| a.dot(x) >= *b)
    }

    /// Minimizes `obj·x` over the polyhedron. Variables are split as x = x⁺ − x⁻ and each
    /// inequality gets a surplus column.
    pub fn minimize(&self, obj: &VecD) -> PolyMin {
        let d = self.dim;
        let m = self.normals.len();
        let nvars = 2 * d + m;
        let a: Vec<Vec<Scalar>> = self
            .normals
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = Vec::with_capacity(nvars);
                r.extend(row.0.iter().cloned());
                r.extend(row.0.iter().map(|x| -x));
                for k in 0..m {
                    r.push(if k == i { -Scalar::one() } else { Scalar::zero() });
                }
                r
            })
            .collect();
        let mut c: Vec<Scalar> = obj.0.clone();
        c.extend(obj.0.iter().map(|x| -x));
        c.resize(nvars, Scalar::zero());
        match minimize_standard(&a, &self.bounds, &c) {
            LpOutcome::Optimal { x, value } => {
                let point = VecD((0..d).map(|i| &x[i] - &x[d + i]).collect());
                PolyMin::Optimal { point, value }
            }
            LpOutcome::Infeasible => PolyMin::Infeasible,
            LpOutcome::Unbounded => PolyMin::Unbounded,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.minimize(&VecD::zeros(self.dim)), PolyMin::Infeasible)
    }

    /// All vertices, by brute force over d-subsets of the constraints.
    pub fn vertices(&self) -> Vec<VecD> {
        let d = self.dim;
        let m = self.normals.len();
        let mut out: Vec<VecD> = Vec::new();
        if m < d {
            return out;
        }
        let mut idx: Vec<usize> = (0..d).collect();
        loop {
            let rows: Vec<VecD> = idx.iter().map(|&i| self.normals[i].clone()).collect();
            if crate::linalg::rank(&rows) == d {
                let rhs: Vec<Scalar> = idx.iter().map(|&i| self.bounds[i].clone()).collect();
                if let Some(x) = crate::linalg::solve_canonical(&rows, &rhs) {
                    if self.contains(&x) && !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
            // next combination
            let mut k = d;
            loop {
                if k == 0 {
                    out.sort();
                    return out;
                }
                k -= 1;
                if idx[k] < m - d + k {
                    idx[k] += 1;
                    for j in k + 1..d {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}
