//! Contrastive relationship gap between a public and a private subset.

use thiserror::Error;

use crate::domain::{GapSample, SimilaritySets};

#[derive(Debug, Error, PartialEq)]
pub enum GapError {
    #[error("similarity component {0} is not finite")]
    BadSimilarity(&'static str),
    #[error("gap weight a must be positive and finite, got {0}")]
    BadWeight(f64),
}

/// Sum of component differences, where differences that favour the public
/// subset (strictly positive) are multiplied by `a`.
fn weighted_sum(public: [f64; 3], private: [f64; 3], a: f64) -> f64 {
    public
        .iter()
        .zip(&private)
        .map(|(s, s_hat)| {
            let diff = s - s_hat;
            if s > s_hat {
                diff * a
            } else {
                diff
            }
        })
        .fold(0.0, |acc, x| acc + x)
}

/// The per-round gap `(unary_gap, binary_gap)` of one encoder.
///
/// `s_pub` and `s_pvt` must come from the same encoder and round.
pub fn gap(
    s_pub: &SimilaritySets,
    s_pvt: &SimilaritySets,
    a: f64,
    round: usize,
) -> Result<GapSample, GapError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(GapError::BadWeight(a));
    }
    const NAMES: [&str; 6] = ["s_u_gg", "s_u_ll", "s_u_gl", "s_b_gg", "s_b_ll", "s_b_gl"];
    for s in [s_pub, s_pvt] {
        let all = s.unary().into_iter().chain(s.binary());
        if let Some(i) = all.into_iter().position(|v| !v.is_finite()) {
            return Err(GapError::BadSimilarity(NAMES[i]));
        }
    }
    Ok(GapSample {
        round,
        unary_gap: weighted_sum(s_pub.unary(), s_pvt.unary(), a),
        binary_gap: weighted_sum(s_pub.binary(), s_pvt.binary(), a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(u: [f64; 3], b: [f64; 3]) -> SimilaritySets {
        SimilaritySets {
            s_u_gg: u[0],
            s_u_ll: u[1],
            s_u_gl: u[2],
            s_b_gg: b[0],
            s_b_ll: b[1],
            s_b_gl: b[2],
        }
    }

    #[test]
    fn equal_sets_give_zero() {
        let s = sets([0.9, 0.8, 0.7], [-0.1, -0.2, -0.3]);
        for a in [0.1, 1.0, 10000.0] {
            let g = gap(&s, &s, a, 1).unwrap();
            assert_eq!((g.unary_gap, g.binary_gap), (0.0, 0.0));
        }
    }

    #[test]
    fn uniform_positive_difference() {
        let pvt = sets([0.5, 0.4, 0.3], [-0.5, -0.4, -0.3]);
        let public = sets([0.6, 0.5, 0.4], [-0.4, -0.3, -0.2]);
        let g = gap(&public, &pvt, 1.0, 3).unwrap();
        assert!((g.unary_gap - 0.3).abs() < 1e-12);
        assert!((g.binary_gap - 0.3).abs() < 1e-12);
        assert_eq!(g.round, 3);
    }

    #[test]
    fn mixed_signs_weighted() {
        let pvt = sets([0.5, 0.5, 0.5], [-0.5; 3]);
        let public = sets([0.6, 0.4, 0.6], [-0.5; 3]);
        let g = gap(&public, &pvt, 10.0, 1).unwrap();
        assert!((g.unary_gap - 1.9).abs() < 1e-12, "{}", g.unary_gap);
        let g1 = gap(&public, &pvt, 1.0, 1).unwrap();
        assert!((g1.unary_gap - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = sets([0.5; 3], [-0.5; 3]);
        assert_eq!(gap(&s, &s, 0.0, 1), Err(GapError::BadWeight(0.0)));
        let bad = sets([0.5, f64::NAN, 0.5], [-0.5; 3]);
        assert_eq!(gap(&bad, &s, 1.0, 1), Err(GapError::BadSimilarity("s_u_ll")));
        let bad = sets([0.5; 3], [-0.5, -0.5, f64::INFINITY]);
        assert_eq!(gap(&s, &bad, 1.0, 1), Err(GapError::BadSimilarity("s_b_gl")));
    }
}
