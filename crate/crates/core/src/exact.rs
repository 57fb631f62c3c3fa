//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Reduced row echelon form over `Q`; returns the reduced rows and the pivot
/// columns.
fn rref(rows: &[Vec<BigRational>], cols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    for r in m.iter_mut() {
        r.resize(cols, BigRational::zero());
    }
    let mut pivots = Vec::new();
    for c in 0..cols {
        let rank = pivots.len();
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for j in c..cols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[rank][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
    }
    m.truncate(pivots.len());
    (m, pivots)
}

/// Rank of a list of row vectors over `Q`.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    rref(rows, cols).1.len()
}

/// A basis of `{x ∈ Q^cols : r·x = 0 for every row r}`.
pub fn rational_nullspace(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let (m, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Outcome of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: BigRational, x: Vec<BigRational> },
    Infeasible,
    Unbounded,
}

/// Maximizes `c·x` subject to `A x ≤ b` with free variables `x`.
///
/// Free variables are split as `x = x⁺ − x⁻`; phase one minimizes the sum of
/// artificial variables on rows with negative right-hand side. Bland's rule
/// guarantees termination.
pub fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // Columns: x⁺ (n), x⁻ (n), slack (m), artificial (m).
    let width = 2 * n + 2 * m;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); width + 1]; m];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let sign = if b[i].is_negative() { -BigRational::one() } else { BigRational::one() };
        for j in 0..n {
            t[i][j] = &sign * &a[i][j];
            t[i][n + j] = -&sign * &a[i][j];
        }
        t[i][2 * n + i] = sign.clone();
        t[i][width] = &sign * &b[i];
        if b[i].is_negative() {
            t[i][2 * n + m + i] = BigRational::one();
            basis[i] = 2 * n + m + i;
        } else {
            basis[i] = 2 * n + i;
        }
    }
    let artificial = |j: usize| j >= 2 * n + m;
    // Phase one: maximize −Σ artificials.
    let mut obj1 = vec![BigRational::zero(); width];
    for j in 0..width {
        if artificial(j) {
            obj1[j] = -BigRational::one();
        }
    }
    if basis.iter().any(|&j| artificial(j)) {
        run_simplex(&mut t, &mut basis, &obj1, &|_| true);
        let value: BigRational = basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| artificial(j))
            .map(|(i, _)| t[i][width].clone())
            .sum();
        if value.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive degenerate artificials out of the basis.
        for i in 0..m {
            if artificial(basis[i]) {
                if let Some(j) = (0..2 * n + m).find(|&j| !t[i][j].is_zero()) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
    }
    let mut obj2 = vec![BigRational::zero(); width];
    for j in 0..n {
        obj2[j] = c[j].clone();
        obj2[n + j] = -c[j].clone();
    }
    if !run_simplex(&mut t, &mut basis, &obj2, &|j| !artificial(j)) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] += &t[i][width];
        } else if j < 2 * n {
            x[j - n] -= &t[i][width];
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { value, x }
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], row: usize, col: usize) {
    let width = t[row].len();
    let p = t[row][col].clone();
    for j in 0..width {
        t[row][j] = &t[row][j] / &p;
    }
    for i in 0..t.len() {
        if i != row && !t[i][col].is_zero() {
            let f = t[i][col].clone();
            for j in 0..width {
                let sub = &f * &t[row][j];
                t[i][j] -= sub;
            }
        }
    }
    basis[row] = col;
}

/// Primal simplex with Bland's rule on a tableau already in canonical form.
/// Returns `false` if the objective is unbounded.
fn run_simplex(
    t: &mut [Vec<BigRational>],
    basis: &mut [usize],
    obj: &[BigRational],
    allowed: &dyn Fn(usize) -> bool,
) -> bool {
    let width = obj.len();
    loop {
        // Reduced cost r_j = c_j − c_B·column_j.
        let entering = (0..width).filter(|&j| allowed(j) && !basis.contains(&j)).find(|&j| {
            let mut r = obj[j].clone();
            for (i, &bi) in basis.iter().enumerate() {
                r -= &obj[bi] * &t[i][j];
            }
            r.is_positive()
        });
        let Some(col) = entering else {
            return true;
        };
        let mut best: Option<(usize, BigRational)> = None;
        for i in 0..t.len() {
            if t[i][col].is_positive() {
                let ratio = &t[i][width] / &t[i][col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        match best {
            None => return false,
            Some((row, _)) => pivot(t, basis, row, col),
        }
    }
}
