//! Follow-the-perturbed-leader play for the min player.
//!
//! At round t the min player holds the adversary's past subsets
//! N^(1..t-1). Her cumulative loss is affine in the selection, so with
//! `c_i = #{tau : i not in N^(tau)}` and a fresh perturbation
//! `R ~ U[0, sqrt(T)]^n`, minimizing perturbed cumulative loss reduces to
//! taking the k largest `(ell_i c_i + R_i) (1 + s_i)`. One fresh
//! perturbation per round; the perturbation scale needs the horizon T up
//! front.
//!
//! The per-round selection distribution is never written down: it only
//! exists through the perturbation draw, and is estimated by resampling the
//! selection r times on independent substreams (indexed 1..=r), which is
//! what makes the estimation embarrassingly parallel yet byte-reproducible.

use std::collections::BTreeSet;

use rand::RngExt;
use rayon::prelude::*;

use crate::game::{GameInstance, Role, Strategy};
use crate::rng::{substream, StreamTag};

/// Mutable per-run state of the min player's learner.
#[derive(Debug, Clone)]
pub struct FtplState<'a> {
    inst: &'a GameInstance,
    horizon: u64,
    seed: u64,
    history: Vec<BTreeSet<usize>>,
    counts: Vec<u64>,
}

impl<'a> FtplState<'a> {
    pub fn new(inst: &'a GameInstance, horizon: u64, seed: u64) -> Self {
        assert!(horizon >= 1, "horizon must be at least 1");
        FtplState { inst, horizon, seed, history: Vec::new(), counts: vec![0; inst.n()] }
    }

    pub fn inst(&self) -> &GameInstance {
        self.inst
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Current round, 1-based: one more than the number of recorded rounds.
    pub fn round(&self) -> u64 {
        self.history.len() as u64 + 1
    }

    pub fn history(&self) -> &[BTreeSet<usize>] {
        &self.history
    }

    /// `counts[i] = #{tau : i not in N^(tau)}` over the recorded rounds.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Records the adversary's subset for the current round.
    pub fn push_round(&mut self, n_subset: BTreeSet<usize>) {
        assert!(
            n_subset.iter().all(|&i| i < self.inst.n()),
            "adversary subset references nodes outside the graph"
        );
        for i in 0..self.inst.n() {
            if !n_subset.contains(&i) {
                self.counts[i] += 1;
            }
        }
        self.history.push(n_subset);
    }

    /// Fresh perturbation `U[0, sqrt(T)]^n` for the current round.
    /// Deterministic in (seed, round, draw index).
    pub fn draw_perturbation(&self, draw_index: u64) -> Vec<f64> {
        let scale = (self.horizon as f64).sqrt();
        let mut rng = substream(self.seed, StreamTag::Perturbation, self.round(), draw_index);
        (0..self.inst.n()).map(|_| rng.random::<f64>() * scale).collect()
    }
}

// Perturbed-leader scores: selecting i removes (ell_i c_i + R_i)(1 + s_i)
// from the cumulative loss, so the argmin takes the k largest.
fn fill_scores(inst: &GameInstance, counts: &[u64], perturbation: &[f64], scores: &mut Vec<f64>) {
    let ell = inst.ell();
    let s = inst.s().values();
    scores.clear();
    scores.extend(
        (0..inst.n()).map(|i| (ell[i] * counts[i] as f64 + perturbation[i]) * (1.0 + s[i])),
    );
}

// k largest scores, ties to the lowest index. Destroys `scores`.
pub(crate) fn top_k_by_score(scores: &mut [f64], k: usize, out: &mut Vec<usize>) {
    debug_assert!(k <= scores.len());
    out.clear();
    for _ in 0..k {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, &sc) in scores.iter().enumerate() {
            if sc > best_score {
                best = i;
                best_score = sc;
            }
        }
        out.push(best);
        scores[best] = f64::NEG_INFINITY;
    }
    out.sort_unstable();
}

/// The perturbed-leader selection for the current round under the given
/// perturbation.
pub fn ftpl_select(state: &FtplState, perturbation: &[f64]) -> Strategy {
    assert_eq!(perturbation.len(), state.inst.n(), "perturbation length must match node count");
    let mut scores = Vec::with_capacity(state.inst.n());
    fill_scores(state.inst, &state.counts, perturbation, &mut scores);
    let mut chosen = Vec::with_capacity(state.inst.k());
    top_k_by_score(&mut scores, state.inst.k(), &mut chosen);
    Strategy::new(Role::Min, chosen)
}

/// Per-node selection frequencies over `r` resampled selections.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEstimate {
    /// `p_hat[i]`: fraction of samples that selected node i; a multiple of
    /// 1/r, and the entries sum to k.
    pub p_hat: Vec<f64>,
    pub samples: u64,
}

struct SampleScratch {
    counts: Vec<u64>,
    perturbation: Vec<f64>,
    scores: Vec<f64>,
    chosen: Vec<usize>,
}

impl SampleScratch {
    fn new(n: usize, k: usize) -> Self {
        SampleScratch {
            counts: vec![0; n],
            perturbation: vec![0.0; n],
            scores: Vec::with_capacity(n),
            chosen: Vec::with_capacity(k),
        }
    }
}

/// Estimates the current round's selection probabilities from `r`
/// independent perturbation draws (substream indices 1..=r). Samples may be
/// evaluated on any number of threads without changing the result.
pub fn estimate_selection_probs(state: &FtplState, r: u64) -> ProbabilityEstimate {
    assert!(r >= 1, "need at least one sample");
    let n = state.inst.n();
    let k = state.inst.k();
    let scale = (state.horizon as f64).sqrt();

    let counts = (1..=r)
        .into_par_iter()
        .fold(
            || SampleScratch::new(n, k),
            |mut sc, sample_idx| {
                let mut rng = substream(state.seed, StreamTag::Sample, state.round(), sample_idx);
                for slot in sc.perturbation.iter_mut() {
                    *slot = rng.random::<f64>() * scale;
                }
                fill_scores(state.inst, &state.counts, &sc.perturbation, &mut sc.scores);
                top_k_by_score(&mut sc.scores, k, &mut sc.chosen);
                for &i in &sc.chosen {
                    sc.counts[i] += 1;
                }
                sc
            },
        )
        .map(|sc| sc.counts)
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (ai, bi) in a.iter_mut().zip(b) {
                    *ai += bi;
                }
                a
            },
        );

    let p_hat = counts.iter().map(|&c| c as f64 / r as f64).collect();
    ProbabilityEstimate { p_hat, samples: r }
}
