//! Competitive opinion optimization on social networks.
//!
//! A min player and an overwriting adversary each reset the internal
//! opinions of k nodes (to -1 and +1 respectively); expressed opinions then
//! settle by weighted-averaging dynamics, computed through an absorbing
//! random walk. The min player learns with follow-the-perturbed-leader and
//! the adversary best-responds to a sampled estimate of her selection
//! probabilities. Brute-force oracles certify the fast paths at desk scale,
//! and the harness turns full runs into deterministic CSV/JSON reports.

pub mod absorbing;
pub mod adversary;
pub mod error;
pub mod ftpl;
pub mod game;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod rng;

pub use absorbing::{
    build_transition, build_transition_held, compute_qub, equilibrium_opinions,
    expressed_control_equilibrium, iterate_dynamics, AbsorbingNode, AbsorptionModel,
};
pub use adversary::{
    best_response_topk, cost_after_overwrite, delta_scores, exact_best_response,
    expected_modified_opinions, DeltaScores,
};
pub use error::{GameError, GraphError, OracleError, RunError, SolverError};
pub use ftpl::{estimate_selection_probs, ftpl_select, FtplState, ProbabilityEstimate};
pub use game::{
    apply_strategies, cost_g, individual_cost, loss_f, social_cost, GameInstance, Role, Strategy,
};
pub use graph::{generate_graph, load_graph, GraphKind, OpinionMode, OpinionVector, WeightedGraph};
pub use harness::{
    compute_regret, emit_report, equilibrium_gap, run_stackelberg, run_stackelberg_on,
    verify_report_regret, ReportFormat, RoundRecord, RunConfig, RunReport,
};
pub use oracle::{brute_ftpl_argmin, brute_minmax, enumerate_subsets, MinmaxResult};
