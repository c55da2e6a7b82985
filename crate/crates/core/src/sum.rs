//! Pairwise (tree) summation.
//!
//! All sums over data points go through here so the result depends only on
//! the input order, never on how work was split across threads.

const BLOCK: usize = 8;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Arithmetic mean via [`pairwise_sum`]. Returns `None` on empty input.
pub fn pairwise_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(pairwise_sum(values) / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_empty() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.5]), 1.5);
        assert_eq!(pairwise_mean(&[]), None);
        assert_eq!(pairwise_mean(&[1.0, 3.0]), Some(2.0));
    }

    #[test]
    fn integers_are_exact() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn less_drift_than_naive() {
        let v = vec![0.1; 1_000_000];
        let naive: f64 = v.iter().sum();
        let tree = pairwise_sum(&v);
        assert!((tree - 100_000.0).abs() <= (naive - 100_000.0).abs());
        assert!((tree - 100_000.0).abs() < 1e-8);
    }
}
