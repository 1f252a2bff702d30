//! Minimum-cost assignment via shortest augmenting paths with potentials.

use crate::error::{Error, Result};

/// Rectangular cost matrix; `None` marks a forbidden pairing.
///
/// The matrix is padded internally to square form; forbidden entries are
/// carried as a sentinel so that an assignment forced through one is
/// reported as infeasible rather than silently absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Option<f64>>,
}

impl CostMatrix {
    /// All entries start forbidden.
    pub fn new(rows: usize, cols: usize) -> Self {
        CostMatrix { rows, cols, data: vec![None; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        let mut m = CostMatrix::new(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged cost matrix");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, Some(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, cost: Option<f64>) {
        self.data[r * self.cols + c] = cost;
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        self.data[r * self.cols + c]
    }

    fn validate(&self) -> Result<()> {
        for v in self.data.iter().flatten() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::Invalid(format!(
                    "assignment costs must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Injective assignment covering the smaller dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// (row, col) pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

const FORBIDDEN_COST: f64 = 1e15;

/// Minimum-total-cost assignment of rows to columns. Covers min(rows, cols);
/// errors when every completion would use a forbidden entry.
pub fn hungarian(m: &CostMatrix) -> Result<Assignment> {
    m.validate()?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Assignment { pairs: Vec::new(), total_cost: 0.0 });
    }
    // Orient so that the row count is the smaller dimension.
    let transposed = m.rows() > m.cols();
    let (n, w) = if transposed {
        (m.cols(), m.rows())
    } else {
        (m.rows(), m.cols())
    };
    let cost = |r: usize, c: usize| -> f64 {
        let v = if transposed { m.get(c, r) } else { m.get(r, c) };
        v.unwrap_or(FORBIDDEN_COST)
    };

    // Shortest augmenting path with potentials; 1-based scratch arrays.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; w + 1];
    let mut matched_row = vec![0usize; w + 1]; // col -> row (1-based, 0 = free)
    let mut way = vec![0usize; w + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; w + 1];
        let mut used = vec![false; w + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=w {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=w {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::with_capacity(n);
    let mut total = 0.0;
    for j in 1..=w {
        let i = matched_row[j];
        if i == 0 {
            continue;
        }
        let (row, col) = if transposed { (j - 1, i - 1) } else { (i - 1, j - 1) };
        match m.get(row, col) {
            Some(c) => total += c,
            None => return Err(Error::InfeasibleAssignment),
        }
        pairs.push((row, col));
    }
    pairs.sort_unstable();
    Ok(Assignment { pairs, total_cost: total })
}
