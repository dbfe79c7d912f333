//! Exact sparse linear solving over the rationals.
//!
//! The systems here come from Markov chain reachability (`(I - P) v = b`) and
//! stationary distributions. Rows are kept sparse and elimination proceeds in
//! natural column order, which keeps fill-in local for the banded systems that
//! the counter-segment games produce.

use crate::rational::Rational;
use num_traits::Zero;
use std::collections::BTreeMap;

/// One linear equation `sum coeff_j * v_j = rhs`.
#[derive(Debug, Clone)]
pub struct SparseRow {
    /// Sorted by column.
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl SparseRow {
    pub fn new(mut coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        coeffs.sort_by_key(|(c, _)| *c);
        coeffs.retain(|(_, v)| !v.is_zero());
        SparseRow { coeffs, rhs }
    }

    fn leading(&self) -> Option<usize> {
        self.coeffs.first().map(|(c, _)| *c)
    }

    /// self -= factor * other
    fn axpy(&mut self, factor: &Rational, other: &SparseRow) {
        let mut merged: BTreeMap<usize, Rational> = self.coeffs.drain(..).collect();
        for (col, val) in &other.coeffs {
            let entry = merged.entry(*col).or_insert_with(Rational::zero);
            *entry -= factor * val;
            if entry.is_zero() {
                merged.remove(col);
            }
        }
        self.rhs -= factor * &other.rhs;
        self.coeffs = merged.into_iter().collect();
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("singular linear system (no pivot for column {0})")]
    Singular(usize),
    #[error("inconsistent linear system")]
    Inconsistent,
}

/// Solves a square system given as one row per equation. Columns are
/// eliminated in increasing order; the pivot is the first available row whose
/// leading column matches, so banded inputs stay banded.
pub fn solve_sparse(n: usize, rows: Vec<SparseRow>) -> Result<Vec<Rational>, LinalgError> {
    // Bucket rows by leading column.
    let mut buckets: Vec<Vec<SparseRow>> = vec![Vec::new(); n + 1];
    let mut degenerate: Vec<SparseRow> = Vec::new();
    for row in rows {
        match row.leading() {
            Some(c) => buckets[c].push(row),
            None => degenerate.push(row),
        }
    }
    let mut pivots: Vec<Option<SparseRow>> = vec![None; n];
    for col in 0..n {
        let mut bucket = std::mem::take(&mut buckets[col]);
        if bucket.is_empty() {
            return Err(LinalgError::Singular(col));
        }
        let pivot = bucket.remove(0);
        let pivot_val = pivot.coeffs[0].1.clone();
        for mut row in bucket {
            let factor = &row.coeffs[0].1 / &pivot_val;
            row.axpy(&factor, &pivot);
            match row.leading() {
                Some(c) => {
                    debug_assert!(c > col);
                    buckets[c].push(row);
                }
                None => degenerate.push(row),
            }
        }
        pivots[col] = Some(pivot);
    }
    for row in degenerate {
        if !row.rhs.is_zero() {
            return Err(LinalgError::Inconsistent);
        }
    }
    // Back substitution.
    let mut solution = vec![Rational::zero(); n];
    for col in (0..n).rev() {
        let row = pivots[col].take().unwrap();
        let mut acc = row.rhs.clone();
        let mut lead = Rational::zero();
        for (c, v) in &row.coeffs {
            if *c == col {
                lead = v.clone();
            } else {
                acc -= v * &solution[*c];
            }
        }
        solution[col] = acc / lead;
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn solves_two_by_two() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let rows = vec![
            SparseRow::new(vec![(0, rat_int(1)), (1, rat_int(1))], rat_int(3)),
            SparseRow::new(vec![(0, rat_int(1)), (1, rat_int(-1))], rat_int(1)),
        ];
        let sol = solve_sparse(2, rows).unwrap();
        assert_eq!(sol, vec![rat_int(2), rat_int(1)]);
    }

    #[test]
    fn gamblers_ruin_chain() {
        // v_i = 1/3 v_{i-1} + 2/3 v_{i+1}, v_0 = 1, v_3 = 0 (absorbed row).
        // Unknowns v_1, v_2.
        let rows = vec![
            SparseRow::new(vec![(0, rat_int(1)), (1, rat(-2, 3))], rat(1, 3)),
            SparseRow::new(vec![(0, rat(-1, 3)), (1, rat_int(1))], rat_int(0)),
        ];
        let sol = solve_sparse(2, rows).unwrap();
        // Exact hitting probabilities of 0 before 3 for the 2/3-up walk.
        assert_eq!(sol[0], rat(3, 7));
        assert_eq!(sol[1], rat(1, 7));
    }

    #[test]
    fn singular_detected() {
        let rows = vec![
            SparseRow::new(vec![(0, rat_int(1)), (1, rat_int(1))], rat_int(1)),
            SparseRow::new(vec![(0, rat_int(2)), (1, rat_int(2))], rat_int(3)),
        ];
        assert!(solve_sparse(2, rows).is_err());
    }
}
