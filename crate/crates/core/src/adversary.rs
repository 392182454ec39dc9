//! The adversary's best response.
//!
//! Overwriting node i's internal opinion with +1 raises the linear cost by
//! exactly `ell_i (1 - v_i)`, where `v` is the (possibly expected) modified
//! opinion vector the adversary is reacting to. The cost being affine, the
//! best k-subset is just the k largest such gains; against an estimated
//! selection distribution this is played on `v_i = -p_i + (1 - p_i) s_i`.

use crate::ftpl::top_k_by_score;
use crate::game::{Role, Strategy};
use crate::graph::OpinionVector;

/// Per-node gains `delta_i = ell_i (1 - v_i)` from overwriting node i.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaScores {
    pub delta: Vec<f64>,
}

/// Expected internal opinions after the min player selects node i with
/// probability `p_hat[i]`: `v_i = -p_hat_i + (1 - p_hat_i) s_i`.
pub fn expected_modified_opinions(s: &OpinionVector, p_hat: &[f64]) -> Vec<f64> {
    assert_eq!(s.len(), p_hat.len(), "probability vector length must match node count");
    s.values().iter().zip(p_hat).map(|(&si, &pi)| -pi + (1.0 - pi) * si).collect()
}

/// Overwrite gains against the expected modified opinions induced by
/// `p_hat`.
pub fn delta_scores(ell: &[f64], s: &OpinionVector, p_hat: &[f64]) -> DeltaScores {
    let v = expected_modified_opinions(s, p_hat);
    DeltaScores { delta: ell.iter().zip(&v).map(|(&l, &vi)| l * (1.0 - vi)).collect() }
}

/// The k nodes with the largest gains, ties to the lowest id.
pub fn best_response_topk(scores: &DeltaScores, k: usize) -> Strategy {
    assert!(k <= scores.delta.len(), "k must not exceed the node count");
    let mut working = scores.delta.clone();
    let mut chosen = Vec::with_capacity(k);
    top_k_by_score(&mut working, k, &mut chosen);
    Strategy::new(Role::Max, chosen)
}

/// Exact best response against a known real-valued opinion vector `v`
/// (entries <= 1): by linearity the top-k of `ell_i (1 - v_i)` maximizes
/// the overwritten cost over all k-subsets.
pub fn exact_best_response(ell: &[f64], v: &[f64], k: usize) -> Strategy {
    assert_eq!(ell.len(), v.len());
    let mut gains: Vec<f64> = ell.iter().zip(v).map(|(&l, &vi)| l * (1.0 - vi)).collect();
    let mut chosen = Vec::with_capacity(k);
    top_k_by_score(&mut gains, k, &mut chosen);
    Strategy::new(Role::Max, chosen)
}

/// Cost `ell . v` after overwriting the strategy's nodes with +1.
pub fn cost_after_overwrite(ell: &[f64], v: &[f64], y: &Strategy) -> f64 {
    let base: f64 = ell.iter().zip(v).map(|(&l, &vi)| l * vi).sum();
    let gain: f64 = y.subset().iter().map(|&i| ell[i] * (1.0 - v[i])).sum();
    base + gain
}
