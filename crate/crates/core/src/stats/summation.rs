/// Leaves of the summation tree hold at most this many terms.
const LEAF: usize = 8;

/// Pairwise (tree) summation. The tree shape depends only on the length, so
/// the result is reproducible bit for bit however the terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Mean via [`pairwise_sum`]. Returns NaN for an empty slice.
pub fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}
