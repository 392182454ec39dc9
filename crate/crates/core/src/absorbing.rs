//! Absorbing-random-walk computation of equilibrium expressed opinions.
//!
//! Every node `i` of the influence graph becomes a transient state with an
//! absorbing copy `i'`. From `i` the walk moves to its copy with probability
//! `anchor_i / d_i` and to neighbour `j` with probability `w_ij / d_i`,
//! where `d_i = anchor_i + sum_j w_ij`. The absorption-probability matrix
//! `Q_UB` then reads out the equilibrium directly: `z = Q_UB * f_B`, with
//! `f_B` the values held at the absorbing states (the internal opinions in
//! the standard construction).
//!
//! Carrying the anchor weight on the absorbing edge (rather than weight 1)
//! makes `z` satisfy the per-node update rule
//! `z_i = (w_ii s_i + sum_j w_ij z_j) / d_i` exactly, for general `w_ii`.
//!
//! `Q_UB` solves `(I - P_UU) Q_UB = P_UB`; we use a dense LU solve with
//! partial pivoting and never materialize the fundamental matrix
//! `(I - P_UU)^{-1}` itself.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::SolverError;
use crate::graph::{OpinionVector, WeightedGraph};

/// An absorbing state: either the absorbing copy of a node, or a node whose
/// expressed opinion is held fixed (the expressed-control variant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbingNode {
    Copy(usize),
    Held(usize),
}

/// Transient/absorbing partition of the walk with its transition blocks.
///
/// `q_ub` and `ell` start unset; [`compute_qub`] fills them.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionModel {
    transient: Vec<usize>,
    absorbing: Vec<AbsorbingNode>,
    p_uu: DMatrix<f64>,
    p_ub: DMatrix<f64>,
    q_ub: Option<DMatrix<f64>>,
    ell: Option<Vec<f64>>,
}

impl AbsorptionModel {
    pub fn transient(&self) -> &[usize] {
        &self.transient
    }

    pub fn absorbing(&self) -> &[AbsorbingNode] {
        &self.absorbing
    }

    pub fn p_uu(&self) -> &DMatrix<f64> {
        &self.p_uu
    }

    pub fn p_ub(&self) -> &DMatrix<f64> {
        &self.p_ub
    }

    /// Absorption probabilities; set by [`compute_qub`].
    pub fn q_ub(&self) -> &DMatrix<f64> {
        self.q_ub.as_ref().expect("Q_UB not computed; call compute_qub first")
    }

    /// Influence weights `ell[j] = sum_i Q_UB[i, j]`; set by [`compute_qub`].
    pub fn ell(&self) -> &[f64] {
        self.ell.as_ref().expect("ell not computed; call compute_qub first").as_slice()
    }

    pub fn has_qub(&self) -> bool {
        self.q_ub.is_some()
    }
}

/// Builds the transition blocks for the standard walk: U = V, one absorbing
/// copy per node, anchor weight on the absorbing edge.
pub fn build_transition(g: &WeightedGraph) -> AbsorptionModel {
    build_transition_held(g, &BTreeSet::new())
}

/// Variant where the nodes in `held` keep a fixed expressed opinion: they
/// join the absorbing set (U = V \ held, B = V' followed by held in
/// ascending order).
pub fn build_transition_held(g: &WeightedGraph, held: &BTreeSet<usize>) -> AbsorptionModel {
    let n = g.n();
    let transient: Vec<usize> = (0..n).filter(|i| !held.contains(i)).collect();
    let mut absorbing: Vec<AbsorbingNode> = (0..n).map(AbsorbingNode::Copy).collect();
    absorbing.extend(held.iter().map(|&i| AbsorbingNode::Held(i)));

    // column index of a transient node in P_UU
    let mut transient_col = vec![usize::MAX; n];
    for (row, &i) in transient.iter().enumerate() {
        transient_col[i] = row;
    }
    // column index of a held node in P_UB (after the n copies)
    let mut held_col = vec![usize::MAX; n];
    for (col, &i) in held.iter().enumerate() {
        held_col[i] = n + col;
    }

    let u = transient.len();
    let b = absorbing.len();
    let mut p_uu = DMatrix::zeros(u, u);
    let mut p_ub = DMatrix::zeros(u, b);
    for (row, &i) in transient.iter().enumerate() {
        let d = g.degree(i);
        p_ub[(row, i)] = g.anchor(i) / d;
        for (j, w) in g.out_edges(i) {
            if held.contains(&j) {
                p_ub[(row, held_col[j])] += w / d;
            } else {
                p_uu[(row, transient_col[j])] += w / d;
            }
        }
    }

    AbsorptionModel { transient, absorbing, p_uu, p_ub, q_ub: None, ell: None }
}

/// Solves `(I - P_UU) Q_UB = P_UB` and fills `q_ub` and `ell`.
pub fn compute_qub(model: AbsorptionModel) -> Result<AbsorptionModel, SolverError> {
    let u = model.transient.len();
    let b = model.absorbing.len();
    let q_ub = if u == 0 {
        DMatrix::zeros(0, b)
    } else {
        let system = DMatrix::identity(u, u) - &model.p_uu;
        system.lu().solve(&model.p_ub).ok_or(SolverError::SingularSystem)?
    };
    let ell: Vec<f64> = (0..b).map(|j| q_ub.column(j).sum()).collect();
    Ok(AbsorptionModel { q_ub: Some(q_ub), ell: Some(ell), ..model })
}

/// Equilibrium read-out `z = Q_UB * f_B`, one entry per transient node,
/// clamped into `[min f_B, max f_B]` against rounding.
pub fn equilibrium_opinions(
    model: &AbsorptionModel,
    f_b: &OpinionVector,
) -> Result<OpinionVector, SolverError> {
    let q = model.q_ub();
    if f_b.len() != model.absorbing.len() {
        return Err(SolverError::DimensionMismatch {
            expected: model.absorbing.len(),
            got: f_b.len(),
        });
    }
    let vals = f_b.values();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: Vec<f64> = (0..model.transient.len())
        .map(|row| {
            let dot: f64 = q.row(row).iter().zip(vals).map(|(qij, fj)| qij * fj).sum();
            dot.clamp(lo, hi)
        })
        .collect();
    OpinionVector::new(z).map_err(|_| SolverError::InvalidParam("equilibrium left [-1, 1]".into()))
}

/// Conventional iteration budget for [`iterate_dynamics`].
pub const DEFAULT_MAX_ITER: u64 = 1_000_000;

/// Synchronous fixed-point iteration of the update rule from `z = s`,
/// stopping when the sup-norm step drops below `tol`.
pub fn iterate_dynamics(
    g: &WeightedGraph,
    s: &OpinionVector,
    tol: f64,
    max_iter: u64,
) -> Result<OpinionVector, SolverError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SolverError::InvalidParam(format!("tol must be positive, got {tol}")));
    }
    if s.len() != g.n() {
        return Err(SolverError::DimensionMismatch { expected: g.n(), got: s.len() });
    }
    let n = g.n();
    let sv = s.values();
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let mut z = sv.to_vec();
    let mut next = vec![0.0; n];
    let mut last_step = f64::INFINITY;
    for _iter in 0..max_iter {
        for i in 0..n {
            let neighbour_mass: f64 = g.out_edges(i).map(|(j, w)| w * z[j]).sum();
            next[i] = (g.anchor(i) * sv[i] + neighbour_mass) / degree[i];
        }
        last_step = z.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut z, &mut next);
        if last_step < tol {
            let clamped: Vec<f64> = z.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
            return OpinionVector::new(clamped)
                .map_err(|_| SolverError::InvalidParam("iteration left [-1, 1]".into()));
        }
    }
    Err(SolverError::NoConvergence { iterations: max_iter, last_step })
}

/// Expressed-opinion-control baseline: nodes in `held` display `fixed_value`
/// and never update; everyone else settles around them. Returns the full
/// length-n expressed vector.
pub fn expressed_control_equilibrium(
    g: &WeightedGraph,
    s: &OpinionVector,
    held: &BTreeSet<usize>,
    fixed_value: f64,
) -> Result<OpinionVector, SolverError> {
    if !(-1.0..=1.0).contains(&fixed_value) || !fixed_value.is_finite() {
        return Err(SolverError::InvalidParam(format!(
            "fixed value {fixed_value} outside [-1, 1]"
        )));
    }
    if s.len() != g.n() {
        return Err(SolverError::DimensionMismatch { expected: g.n(), got: s.len() });
    }
    if let Some(&bad) = held.iter().find(|&&i| i >= g.n()) {
        return Err(SolverError::InvalidParam(format!(
            "held node {} outside 1..={}",
            bad + 1,
            g.n()
        )));
    }

    let model = compute_qub(build_transition_held(g, held))?;
    let mut f_b = s.values().to_vec();
    f_b.extend(held.iter().map(|_| fixed_value));
    let transient_z = equilibrium_opinions(&model, &OpinionVector::new(f_b).unwrap())?;

    let mut z = vec![fixed_value; g.n()];
    for (row, &i) in model.transient().iter().enumerate() {
        z[i] = transient_z.values()[row];
    }
    OpinionVector::new(z).map_err(|_| SolverError::InvalidParam("equilibrium left [-1, 1]".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::g2;
    use crate::graph::{generate_graph, GraphKind, OpinionMode};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Series oracle from the fundamental-matrix definition:
    /// F = sum_l P_UU^l truncated once ||P_UU^l||_inf < 1e-12, Q = F P_UB.
    fn series_qub(model: &AbsorptionModel) -> DMatrix<f64> {
        let u = model.transient().len();
        let mut f = DMatrix::<f64>::identity(u, u);
        let mut power = DMatrix::<f64>::identity(u, u);
        loop {
            power = &power * model.p_uu();
            let norm = (0..u)
                .map(|i| power.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            if norm < 1e-12 {
                break;
            }
            f += &power;
        }
        f * model.p_ub()
    }

    #[test]
    fn g2_transition_blocks() {
        let (g, _) = g2();
        let m = build_transition(&g);
        assert_eq!(m.p_uu(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        assert_eq!(m.p_ub(), &DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]));
        assert_eq!(m.transient(), &[0, 1]);
        assert_eq!(m.absorbing(), &[AbsorbingNode::Copy(0), AbsorbingNode::Copy(1)]);
    }

    #[test]
    fn edgeless_transition_is_identity() {
        let g = WeightedGraph::new(vec![2.0, 0.5, 1.0], []).unwrap();
        let m = build_transition(&g);
        assert_eq!(m.p_uu(), &DMatrix::zeros(3, 3));
        assert_eq!(m.p_ub(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn path3_transition_row() {
        let (g, _) = generate_graph(GraphKind::Path, 3, 0, 1.0, OpinionMode::Constant(0.0)).unwrap();
        let m = build_transition(&g);
        // middle node: d = 3
        let third = 1.0 / 3.0;
        assert!(close(m.p_uu()[(1, 0)], third, 1e-15));
        assert_eq!(m.p_uu()[(1, 1)], 0.0);
        assert!(close(m.p_uu()[(1, 2)], third, 1e-15));
        assert!(close(m.p_ub()[(1, 1)], third, 1e-15));
    }

    #[test]
    fn transition_rows_are_stochastic() {
        for seed in 0..10 {
            let (g, _) = generate_graph(
                GraphKind::Random { p: 0.4 },
                12,
                seed,
                0.5 + seed as f64 * 0.3,
                OpinionMode::UniformRandom,
            )
            .unwrap();
            let m = build_transition(&g);
            for i in 0..12 {
                let row_sum = m.p_uu().row(i).sum() + m.p_ub().row(i).sum();
                assert!(close(row_sum, 1.0, 1e-12), "row {i} sums to {row_sum}");
                assert!(m.p_uu().row(i).iter().all(|&v| v >= 0.0));
                assert!(m.p_ub().row(i).iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn g2_qub_and_ell() {
        let (g, _) = g2();
        let m = compute_qub(build_transition(&g)).unwrap();
        let q = m.q_ub();
        let expect = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(q[(i, j)], expect[i][j], 1e-12));
            }
        }
        assert!(close(m.ell()[0], 1.0, 1e-12));
        assert!(close(m.ell()[1], 1.0, 1e-12));
    }

    #[test]
    fn edgeless_qub_is_identity() {
        let g = WeightedGraph::new(vec![1.0, 2.0, 3.0], []).unwrap();
        let m = compute_qub(build_transition(&g)).unwrap();
        assert_eq!(m.q_ub(), &DMatrix::identity(3, 3));
        assert_eq!(m.ell(), &[1.0, 1.0, 1.0]);
        let s = OpinionVector::new(vec![0.25, -1.0, 0.5]).unwrap();
        assert_eq!(equilibrium_opinions(&m, &s).unwrap().values(), s.values());
    }

    #[test]
    fn qub_matches_series_oracle() {
        for seed in 0..8 {
            let (g, _) = generate_graph(
                GraphKind::Random { p: 0.35 },
                10,
                seed,
                1.0,
                OpinionMode::UniformRandom,
            )
            .unwrap();
            let m = compute_qub(build_transition(&g)).unwrap();
            let oracle = series_qub(&m);
            let diff = (m.q_ub() - &oracle).abs().max();
            assert!(diff < 1e-9, "seed {seed}: series oracle differs by {diff}");
        }
    }

    #[test]
    fn singular_system_detected() {
        // Hand-built cyclic P_UU with no absorption; unreachable through the
        // validated graph API.
        let model = AbsorptionModel {
            transient: vec![0, 1],
            absorbing: vec![AbsorbingNode::Copy(0), AbsorbingNode::Copy(1)],
            p_uu: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            p_ub: DMatrix::zeros(2, 2),
            q_ub: None,
            ell: None,
        };
        assert_eq!(compute_qub(model).unwrap_err(), SolverError::SingularSystem);
    }

    #[test]
    fn g2_equilibrium() {
        let (g, s) = g2();
        let m = compute_qub(build_transition(&g)).unwrap();
        let z = equilibrium_opinions(&m, &s).unwrap();
        assert!(close(z.values()[0], 2.0 / 3.0, 1e-12));
        assert!(close(z.values()[1], 1.0 / 3.0, 1e-12));
    }

    #[test]
    fn all_ones_is_fixed() {
        let (g, _) = generate_graph(
            GraphKind::Random { p: 0.5 },
            9,
            3,
            2.0,
            OpinionMode::Constant(0.0),
        )
        .unwrap();
        let m = compute_qub(build_transition(&g)).unwrap();
        let ones = OpinionVector::new(vec![1.0; 9]).unwrap();
        let z = equilibrium_opinions(&m, &ones).unwrap();
        for &v in z.values() {
            assert!(close(v, 1.0, 1e-9));
        }
    }

    #[test]
    fn dimension_mismatch_reported() {
        let (g, _) = g2();
        let m = compute_qub(build_transition(&g)).unwrap();
        let bad = OpinionVector::new(vec![0.0; 3]).unwrap();
        assert!(matches!(
            equilibrium_opinions(&m, &bad),
            Err(SolverError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn dynamics_matches_solver_on_g2() {
        let (g, s) = g2();
        let m = compute_qub(build_transition(&g)).unwrap();
        let z_solve = equilibrium_opinions(&m, &s).unwrap();
        let z_iter = iterate_dynamics(&g, &s, 1e-10, 1_000_000).unwrap();
        for i in 0..2 {
            assert!(close(z_solve.values()[i], z_iter.values()[i], 1e-9));
        }
    }

    #[test]
    fn dynamics_on_edgeless_graph_returns_s() {
        let g = WeightedGraph::new(vec![1.0, 2.0], []).unwrap();
        let s = OpinionVector::new(vec![0.75, -0.5]).unwrap();
        let z = iterate_dynamics(&g, &s, 1e-10, 5).unwrap();
        assert_eq!(z.values(), s.values());
    }

    #[test]
    fn dynamics_reports_no_convergence() {
        let (g, s) = g2();
        let err = iterate_dynamics(&g, &s, 1e-12, 1).unwrap_err();
        assert!(matches!(err, SolverError::NoConvergence { iterations: 1, .. }));
    }

    #[test]
    fn expressed_control_g2() {
        let (g, s) = g2();
        let z = expressed_control_equilibrium(&g, &s, &BTreeSet::from([0]), 1.0).unwrap();
        assert!(close(z.values()[0], 1.0, 1e-12));
        assert!(close(z.values()[1], 0.5, 1e-12));
    }

    #[test]
    fn expressed_control_all_held() {
        let (g, s) = g2();
        let z = expressed_control_equilibrium(&g, &s, &BTreeSet::from([0, 1]), -0.25).unwrap();
        assert_eq!(z.values(), &[-0.25, -0.25]);
    }

    #[test]
    fn expressed_control_empty_set_matches_standard() {
        let (g, s) = generate_graph(
            GraphKind::Random { p: 0.4 },
            8,
            5,
            1.0,
            OpinionMode::UniformRandom,
        )
        .unwrap();
        let m = compute_qub(build_transition(&g)).unwrap();
        let standard = equilibrium_opinions(&m, &s).unwrap();
        let controlled = expressed_control_equilibrium(&g, &s, &BTreeSet::new(), 0.0).unwrap();
        for i in 0..8 {
            assert!(close(standard.values()[i], controlled.values()[i], 1e-12));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // Q_UB rows are absorption distributions; ell sums to |U|.
        #[test]
        fn qub_is_stochastic(n in 1usize..12, seed in 0u64..500, p in 0.0f64..0.8) {
            let (g, _) = generate_graph(
                GraphKind::Random { p }, n, seed, 1.0, OpinionMode::UniformRandom,
            ).unwrap();
            let m = compute_qub(build_transition(&g)).unwrap();
            let q = m.q_ub();
            for i in 0..n {
                prop_assert!(q.row(i).iter().all(|&v| v >= 0.0));
                let sum = q.row(i).sum();
                prop_assert!(close(sum, 1.0, 1e-9));
            }
            let total: f64 = m.ell().iter().sum();
            prop_assert!(close(total, n as f64, 1e-9));
        }

        // raising one absorbing value never lowers any equilibrium entry
        #[test]
        fn equilibrium_is_monotone(n in 2usize..10, seed in 0u64..500, which in 0usize..10) {
            let (g, s) = generate_graph(
                GraphKind::Random { p: 0.4 }, n, seed, 1.0, OpinionMode::UniformRandom,
            ).unwrap();
            let m = compute_qub(build_transition(&g)).unwrap();
            let base = equilibrium_opinions(&m, &s).unwrap();
            let idx = which % n;
            let mut bumped = s.values().to_vec();
            bumped[idx] = (bumped[idx] + 0.3).min(1.0);
            let bumped = OpinionVector::new(bumped).unwrap();
            let z = equilibrium_opinions(&m, &bumped).unwrap();
            for i in 0..n {
                prop_assert!(z.values()[i] >= base.values()[i] - 1e-12);
            }
        }

        // solver and synchronous dynamics land on the same fixed point
        #[test]
        fn solver_agrees_with_dynamics(n in 1usize..10, seed in 0u64..500) {
            let (g, s) = generate_graph(
                GraphKind::Random { p: 0.5 }, n, seed, 0.7, OpinionMode::UniformRandom,
            ).unwrap();
            let m = compute_qub(build_transition(&g)).unwrap();
            let z_solve = equilibrium_opinions(&m, &s).unwrap();
            let z_iter = iterate_dynamics(&g, &s, 1e-10, 1_000_000).unwrap();
            for i in 0..n {
                prop_assert!(close(z_solve.values()[i], z_iter.values()[i], 1e-6));
            }
        }
    }
}
