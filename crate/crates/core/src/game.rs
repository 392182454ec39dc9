//! The zero-sum internal-opinion-design game.
//!
//! The min player moves first and resets the internal opinions of a k-subset
//! to -1; the adversary then resets a k-subset of her own to +1, overwriting
//! the min player where they collide. Expressed opinions settle by the usual
//! dynamics, so with influence weights `ell` the cost is simply
//! `g(x, y) = ell . (modified internal opinions)`, which both players fight
//! over in opposite directions.

use std::collections::BTreeSet;
use std::fmt;

use crate::absorbing::{build_transition, compute_qub, AbsorptionModel};
use crate::error::{GameError, RunError};
use crate::graph::{OpinionVector, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Min,
    Max,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Min => write!(f, "min"),
            Role::Max => write!(f, "max"),
        }
    }
}

/// A role-tagged subset of node indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    role: Role,
    subset: BTreeSet<usize>,
}

impl Strategy {
    pub fn new(role: Role, ids: impl IntoIterator<Item = usize>) -> Self {
        Strategy { role, subset: ids.into_iter().collect() }
    }

    pub fn min(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Role::Min, ids)
    }

    pub fn max(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::new(Role::Max, ids)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn subset(&self) -> &BTreeSet<usize> {
        &self.subset
    }

    pub fn len(&self) -> usize {
        self.subset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.subset.contains(&i)
    }

    /// Report form: sorted 1-based ids joined by semicolons, e.g. "3;7;9".
    pub fn id_string(&self) -> String {
        subset_id_string(&self.subset)
    }
}

/// Sorted 1-based ids joined by semicolons.
pub fn subset_id_string(subset: &BTreeSet<usize>) -> String {
    let parts: Vec<String> = subset.iter().map(|&i| (i + 1).to_string()).collect();
    parts.join(";")
}

fn expect_role(strategy: &Strategy, expected: Role) -> Result<(), GameError> {
    if strategy.role != expected {
        return Err(GameError::RoleMismatch { expected, got: strategy.role });
    }
    Ok(())
}

/// A playable instance: graph, internal opinions, solved absorption model
/// (with `ell`), and the common subset size k.
#[derive(Debug, Clone)]
pub struct GameInstance {
    graph: WeightedGraph,
    s: OpinionVector,
    model: AbsorptionModel,
    k: usize,
}

impl GameInstance {
    pub fn new(graph: WeightedGraph, s: OpinionVector, k: usize) -> Result<Self, RunError> {
        if s.len() != graph.n() {
            return Err(GameError::InvalidParam(format!(
                "opinion vector length {} does not match {} nodes",
                s.len(),
                graph.n()
            ))
            .into());
        }
        if k == 0 || k > graph.n() {
            return Err(GameError::InvalidParam(format!(
                "subset size k = {k} outside 1..={}",
                graph.n()
            ))
            .into());
        }
        let model = compute_qub(build_transition(&graph))?;
        Ok(GameInstance { graph, s, model, k })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn s(&self) -> &OpinionVector {
        &self.s
    }

    pub fn model(&self) -> &AbsorptionModel {
        &self.model
    }

    pub fn ell(&self) -> &[f64] {
        self.model.ell()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Modified internal opinions after both moves: +1 on the adversary's
/// subset, -1 on the min player's (where not overwritten), `s` elsewhere.
pub fn apply_strategies(
    s: &OpinionVector,
    x: &Strategy,
    y: Option<&Strategy>,
) -> Result<OpinionVector, GameError> {
    expect_role(x, Role::Min)?;
    if let Some(y) = y {
        expect_role(y, Role::Max)?;
    }
    let n = s.len();
    for &i in x.subset().iter().chain(y.iter().flat_map(|y| y.subset().iter())) {
        if i >= n {
            return Err(GameError::IndexOutOfRange { index: i, len: n });
        }
    }
    let mut out = s.values().to_vec();
    for &i in x.subset() {
        out[i] = -1.0;
    }
    if let Some(y) = y {
        for &i in y.subset() {
            out[i] = 1.0;
        }
    }
    Ok(OpinionVector::new(out).expect("overwrites stay in [-1, 1]"))
}

/// Game cost `g(x, y) = ell . (s' + y)`, the social cost at the equilibrium
/// induced by the final internal opinions.
pub fn cost_g(inst: &GameInstance, x: &Strategy, y: &Strategy) -> Result<f64, GameError> {
    let modified = apply_strategies(&inst.s, x, Some(y))?;
    Ok(inst.ell().iter().zip(modified.values()).map(|(l, v)| l * v).sum())
}

/// Per-round loss of the min player against the adversary subset `N`:
/// `sum_{i not in N} ell_i (x_i + s_i) + sum_{i in N} ell_i` with
/// `x_i = -1 - s_i` on the selected nodes. Identical to `cost_g` with the
/// adversary playing `N`.
pub fn loss_f(inst: &GameInstance, n_subset: &BTreeSet<usize>, x: &Strategy) -> Result<f64, GameError> {
    expect_role(x, Role::Min)?;
    let s = inst.s.values();
    let ell = inst.ell();
    let mut total = 0.0;
    for i in 0..inst.n() {
        if n_subset.contains(&i) {
            total += ell[i];
        } else if x.contains(i) {
            total -= ell[i]; // ell_i * (-1 - s_i + s_i)
        } else {
            total += ell[i] * s[i];
        }
    }
    Ok(total)
}

/// Quadratic individual cost of node `i` at expressed profile `z`.
pub fn individual_cost(
    g: &WeightedGraph,
    z: &OpinionVector,
    s: &OpinionVector,
    i: usize,
) -> Result<f64, GameError> {
    if i >= g.n() || z.len() != g.n() || s.len() != g.n() {
        return Err(GameError::IndexOutOfRange { index: i, len: g.n() });
    }
    let zv = z.values();
    let anchor_term = g.anchor(i) * (zv[i] - s.values()[i]).powi(2);
    let disagreement: f64 = g.out_edges(i).map(|(j, w)| w * (zv[i] - zv[j]).powi(2)).sum();
    Ok(anchor_term + disagreement)
}

/// The linear social objective `C(z) = sum_i z_i`.
pub fn social_cost(z: &OpinionVector) -> f64 {
    z.values().iter().sum()
}
