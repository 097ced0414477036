//! Gaussian elimination over F_q, enough for kernels and linear solves.

use crate::fq::{Fq, FqElem};
use crate::polycore::FieldCtx;

/// Row-reduce in place; returns the pivot column of each pivot row.
pub fn rref(fq: &Fq, rows: &mut [Vec<FqElem>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !fq.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = fq.inv(&rows[r][c]).unwrap();
        for j in c..ncols {
            rows[r][j] = fq.mul(&rows[r][j], &inv);
        }
        for i in 0..nrows {
            if i != r && !fq.is_zero(&rows[i][c]) {
                let f = rows[i][c];
                for j in c..ncols {
                    let t = fq.mul(&f, &rows[r][j]);
                    rows[i][j] = fq.sub(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

/// Kernel basis of the linear map whose matrix has the given columns
/// (each column a length-nrows coordinate vector). Returns vectors v with
/// sum_i v[i] * col_i = 0, in a deterministic order.
pub fn kernel_of_columns(fq: &Fq, cols: &[Vec<FqElem>], nrows: usize) -> Vec<Vec<FqElem>> {
    let ncols = cols.len();
    let mut rows: Vec<Vec<FqElem>> = (0..nrows)
        .map(|r| (0..ncols).map(|c| cols[c][r]).collect())
        .collect();
    let pivots = rref(fq, &mut rows);
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (prow, &pc) in pivots.iter().enumerate() {
            v[pc] = Some(prow);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = vec![fq.zero(); ncols];
        vec[free] = fq.one();
        for (c, slot) in pivot_set.iter().enumerate() {
            if let Some(prow) = slot {
                vec[c] = fq.neg(&rows[*prow][free]);
            }
        }
        basis.push(vec);
    }
    basis
}

/// Solve sum_i x[i] * col_i = rhs; None if inconsistent.
pub fn solve_columns(
    fq: &Fq,
    cols: &[Vec<FqElem>],
    rhs: &[FqElem],
    nrows: usize,
) -> Option<Vec<FqElem>> {
    let ncols = cols.len();
    let mut rows: Vec<Vec<FqElem>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<FqElem> = (0..ncols).map(|c| cols[c][r]).collect();
            row.push(rhs[r]);
            row
        })
        .collect();
    let pivots = rref(fq, &mut rows);
    if pivots.last() == Some(&ncols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![fq.zero(); ncols];
    for (prow, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[prow][ncols];
    }
    Some(x)
}

/// Rank of the matrix with the given columns.
pub fn rank_of_columns(fq: &Fq, cols: &[Vec<FqElem>], nrows: usize) -> usize {
    let ncols = cols.len();
    let mut rows: Vec<Vec<FqElem>> = (0..nrows)
        .map(|r| (0..ncols).map(|c| cols[c][r]).collect())
        .collect();
    rref(fq, &mut rows).len()
}
