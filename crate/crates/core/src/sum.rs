//! Order-fixed reductions.
//!
//! Every reduction that feeds a report goes through these helpers so that
//! results do not depend on how work was split across threads.

use num_complex::Complex64;

const LEAF: usize = 8;

/// Pairwise (cascade) summation in index order.
pub fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise(&values[..mid]) + pairwise(&values[mid..])
}

/// Pairwise summation of complex values in index order.
pub fn pairwise_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_complex(&values[..mid]) + pairwise_complex(&values[mid..])
}

/// Column-wise pairwise summation of equally sized vectors.
pub(crate) fn pairwise_rows(rows: &[Vec<Complex64>], dim: usize) -> Vec<Complex64> {
    if rows.is_empty() {
        return vec![Complex64::new(0.0, 0.0); dim];
    }
    if rows.len() == 1 {
        return rows[0].clone();
    }
    let mid = rows.len() / 2;
    let mut left = pairwise_rows(&rows[..mid], dim);
    let right = pairwise_rows(&rows[mid..], dim);
    for (l, r) in left.iter_mut().zip(&right) {
        *l += r;
    }
    left
}

/// Column-wise pairwise summation of real vectors.
pub(crate) fn pairwise_rows_real(rows: &[Vec<f64>], dim: usize) -> Vec<f64> {
    if rows.is_empty() {
        return vec![0.0; dim];
    }
    if rows.len() == 1 {
        return rows[0].clone();
    }
    let mid = rows.len() / 2;
    let mut left = pairwise_rows_real(&rows[..mid], dim);
    let right = pairwise_rows_real(&rows[mid..], dim);
    for (l, r) in left.iter_mut().zip(&right) {
        *l += r;
    }
    left
}
