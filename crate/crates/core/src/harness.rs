//! End-to-end runner for the repeated game, with file-based reports.
//!
//! One run plays all T rounds (estimate the min player's selection
//! probabilities, let the adversary respond to them, realize the min
//! player's perturbed-leader pick, record) and only then draws the output
//! round uniformly. Stopping at a uniformly drawn round and playing to the
//! horizon give the output strategy the same law; the full transcript buys
//! the regret curve and the equilibrium-gap diagnostics.
//!
//! Everything is a pure function of (config, seed): reports are
//! byte-identical across runs and across thread counts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    best_response_topk, cost_after_overwrite, delta_scores, exact_best_response,
    expected_modified_opinions,
};
use crate::error::{OracleError, RunError};
use crate::ftpl::{estimate_selection_probs, ftpl_select, top_k_by_score, FtplState, ProbabilityEstimate};
use crate::game::{loss_f, subset_id_string, GameInstance, Strategy};
use crate::graph::load_graph;
use crate::oracle::brute_minmax;
use crate::rng::{substream, StreamTag, RNG_VERSION};

/// Version string echoed into reports.
pub fn version_string() -> String {
    format!("opinion-games {} ({})", env!("CARGO_PKG_VERSION"), RNG_VERSION)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }
}

/// Everything a run depends on. The seed pins every random draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph_path: PathBuf,
    pub k: usize,
    /// Number of rounds T; also sets the perturbation scale sqrt(T).
    pub horizon: u64,
    /// Estimation samples per round; defaults to T.
    pub samples: Option<u64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<ReportFormat>,
    pub compute_gap: bool,
}

impl RunConfig {
    pub fn samples_per_round(&self) -> u64 {
        self.samples.unwrap_or(self.horizon)
    }

    fn validate(&self) -> Result<(), RunError> {
        if self.horizon < 1 {
            return Err(RunError::InvalidConfig("horizon T must be at least 1".into()));
        }
        if self.samples_per_round() < 1 {
            return Err(RunError::InvalidConfig("samples per round r must be at least 1".into()));
        }
        Ok(())
    }

    /// Total sampling work T * r; worth a warning past 1e8 selections.
    pub fn sampling_cost_warning(&self) -> Option<String> {
        let total = self.horizon as u128 * self.samples_per_round() as u128;
        (total > 100_000_000).then(|| {
            format!(
                "T * r = {total} sample selections; this run will take a while \
                 (consider --r below the default r = T)"
            )
        })
    }
}

/// Transcript of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: u64,
    pub x_subset: BTreeSet<usize>,
    pub y_subset: BTreeSet<usize>,
    pub p_hat: ProbabilityEstimate,
    /// loss of the played x against the played y
    pub realized_loss: f64,
    /// ell . v with v the expected modified opinions under p_hat
    pub expected_loss_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub minmax_value: f64,
    /// Best adversary response against the averaged strategy, minus minmax.
    /// Can be negative: a randomized strategy may beat the pure minmax.
    pub gap: f64,
    pub gap_plus: f64,
}

/// Full simulation transcript plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: RunConfig,
    pub version: String,
    pub records: Vec<RoundRecord>,
    /// Output round, uniform on 1..=T.
    pub t_min: u64,
    /// The strategy played at round t_min.
    pub output_strategy: Strategy,
    /// Per-node average of p_hat over all rounds.
    pub avg_p: Vec<f64>,
    /// Cumulative regret after each round.
    pub regret_curve: Vec<f64>,
    pub gap: Option<GapReport>,
}

/// Loads the configured graph and runs the full pipeline.
pub fn run_stackelberg(config: &RunConfig) -> Result<RunReport, RunError> {
    let text = fs::read_to_string(&config.graph_path)
        .map_err(|source| RunError::Io { path: config.graph_path.clone(), source })?;
    let (graph, s) = load_graph(&text)?;
    let inst = GameInstance::new(graph, s, config.k)?;
    run_stackelberg_on(&inst, config)
}

/// Runs the pipeline on an already-built instance. `config.k` must match.
pub fn run_stackelberg_on(inst: &GameInstance, config: &RunConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    if config.k != inst.k() {
        return Err(RunError::InvalidConfig(format!(
            "config k = {} does not match instance k = {}",
            config.k,
            inst.k()
        )));
    }
    if config.compute_gap {
        // the gap needs the brute-force oracle; refuse oversize instances
        // before burning through the rounds
        crate::oracle::enumerate_subsets(inst.n(), inst.k())?;
    }
    let horizon = config.horizon;
    let r = config.samples_per_round();
    let ell = inst.ell();

    let mut state = FtplState::new(inst, horizon, config.seed);
    let mut records = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let p_hat = estimate_selection_probs(&state, r);
        let y = best_response_topk(&delta_scores(ell, inst.s(), &p_hat.p_hat), inst.k());
        let v = expected_modified_opinions(inst.s(), &p_hat.p_hat);
        let expected_loss_estimate: f64 = ell.iter().zip(&v).map(|(l, vi)| l * vi).sum();

        let perturbation = state.draw_perturbation(0);
        let x = ftpl_select(&state, &perturbation);
        let realized_loss = loss_f(inst, y.subset(), &x).expect("roles are fixed here");

        records.push(RoundRecord {
            t,
            x_subset: x.subset().clone(),
            y_subset: y.subset().clone(),
            p_hat,
            realized_loss,
            expected_loss_estimate,
        });
        state.push_round(y.subset().clone());
    }

    let regret_curve = compute_regret(&records, inst);

    let t_min = substream(config.seed, StreamTag::OutputRound, 0, 0).random_range(1..=horizon);
    let output_strategy = Strategy::min(records[(t_min - 1) as usize].x_subset.iter().copied());

    let n = inst.n();
    let mut avg_p = vec![0.0; n];
    for rec in &records {
        for (acc, &p) in avg_p.iter_mut().zip(&rec.p_hat.p_hat) {
            *acc += p;
        }
    }
    for acc in avg_p.iter_mut() {
        *acc /= horizon as f64;
    }

    let mut report = RunReport {
        config: config.clone(),
        version: version_string(),
        records,
        t_min,
        output_strategy,
        avg_p,
        regret_curve,
        gap: None,
    };
    if config.compute_gap {
        report.gap = Some(equilibrium_gap(&report, inst)?);
    }
    Ok(report)
}

/// Cumulative regret after each round: played cumulative loss minus the best
/// fixed k-subset in hindsight. The offline optimum is exact: cumulative
/// loss is affine, so the best fixed subset is the top-k of
/// `ell_i c_i (1 + s_i)` with `c_i` the rounds node i went unselected by the
/// adversary.
pub fn compute_regret(records: &[RoundRecord], inst: &GameInstance) -> Vec<f64> {
    let n = inst.n();
    let ell = inst.ell();
    let s = inst.s().values();

    let mut counts = vec![0u64; n];
    let mut cum_played = 0.0;
    let mut const_sum = 0.0;
    let mut weights = vec![0.0; n];
    let mut picked = Vec::with_capacity(inst.k());
    let mut curve = Vec::with_capacity(records.len());

    for rec in records {
        let x = Strategy::min(rec.x_subset.iter().copied());
        cum_played += loss_f(inst, &rec.y_subset, &x).expect("role is fixed here");
        for i in 0..n {
            if rec.y_subset.contains(&i) {
                const_sum += ell[i];
            } else {
                const_sum += ell[i] * s[i];
                counts[i] += 1;
            }
        }
        for i in 0..n {
            weights[i] = ell[i] * counts[i] as f64 * (1.0 + s[i]);
        }
        top_k_by_score(&mut weights, inst.k(), &mut picked);
        // weights were consumed; recompute the picked gains
        let best_gain: f64 =
            picked.iter().map(|&i| ell[i] * counts[i] as f64 * (1.0 + s[i])).sum();
        curve.push(cum_played - (const_sum - best_gain));
    }
    curve
}

/// Equilibrium-gap diagnostic: adversary's exact best response against the
/// averaged strategy, compared to the brute-force minmax value.
pub fn equilibrium_gap(report: &RunReport, inst: &GameInstance) -> Result<GapReport, OracleError> {
    equilibrium_gap_from_avg_p(&report.avg_p, inst)
}

pub fn equilibrium_gap_from_avg_p(
    avg_p: &[f64],
    inst: &GameInstance,
) -> Result<GapReport, OracleError> {
    let ell = inst.ell();
    let v = expected_modified_opinions(inst.s(), avg_p);
    let y = exact_best_response(ell, &v, inst.k());
    let against_average = cost_after_overwrite(ell, &v, &y);
    let minmax = brute_minmax(inst)?;
    let gap = against_average - minmax.minmax_value;
    Ok(GapReport { minmax_value: minmax.minmax_value, gap, gap_plus: gap.max(0.0) })
}

/// Floats in CSV output carry 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

// ---------------------------------------------------------------------------
// report files
// ---------------------------------------------------------------------------

/// Stored form of report.json.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: JsonConfig,
    pub t_min: u64,
    pub output_strategy: String,
    pub avg_p: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minmax_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_plus: Option<f64>,
    pub rounds: Vec<JsonRound>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonConfig {
    pub graph_path: String,
    pub k: usize,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub r: u64,
    pub seed: u64,
    pub output_dir: String,
    pub formats: Vec<String>,
    pub compute_gap: bool,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonRound {
    pub t: u64,
    pub x_subset: String,
    pub y_subset: String,
    pub p_hat: Vec<f64>,
    pub realized_loss: f64,
    pub expected_loss_estimate: f64,
    pub cum_regret: f64,
}

impl RunReport {
    pub fn to_json_doc(&self) -> JsonReport {
        JsonReport {
            config: JsonConfig {
                graph_path: self.config.graph_path.display().to_string(),
                k: self.config.k,
                horizon: self.config.horizon,
                r: self.config.samples_per_round(),
                seed: self.config.seed,
                output_dir: self.config.output_dir.display().to_string(),
                formats: self.config.formats.iter().map(|f| f.name().to_string()).collect(),
                compute_gap: self.config.compute_gap,
                version: self.version.clone(),
            },
            t_min: self.t_min,
            output_strategy: self.output_strategy.id_string(),
            avg_p: self.avg_p.clone(),
            minmax_value: self.gap.map(|g| g.minmax_value),
            gap: self.gap.map(|g| g.gap),
            gap_plus: self.gap.map(|g| g.gap_plus),
            rounds: self
                .records
                .iter()
                .zip(&self.regret_curve)
                .map(|(rec, &cum_regret)| JsonRound {
                    t: rec.t,
                    x_subset: subset_id_string(&rec.x_subset),
                    y_subset: subset_id_string(&rec.y_subset),
                    p_hat: rec.p_hat.p_hat.clone(),
                    realized_loss: rec.realized_loss,
                    expected_loss_estimate: rec.expected_loss_estimate,
                    cum_regret,
                })
                .collect(),
        }
    }

    pub fn rounds_csv(&self) -> String {
        let mut out =
            String::from("t,x_subset,y_subset,realized_loss,expected_loss_estimate,cum_regret\n");
        for (rec, &cum_regret) in self.records.iter().zip(&self.regret_curve) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rec.t,
                subset_id_string(&rec.x_subset),
                subset_id_string(&rec.y_subset),
                format_sig12(rec.realized_loss),
                format_sig12(rec.expected_loss_estimate),
                format_sig12(cum_regret),
            ));
        }
        out
    }
}

/// Writes the requested report files into `output_dir`; returns their paths.
/// Identical reports produce bit-identical files.
pub fn emit_report(
    report: &RunReport,
    formats: &BTreeSet<ReportFormat>,
    output_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    if !formats.is_empty() {
        fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    }
    let mut written = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Csv => {
                let path = output_dir.join("rounds.csv");
                fs::write(&path, report.rounds_csv()).map_err(io_err(&path))?;
                written.push(path);
            }
            ReportFormat::Json => {
                let path = output_dir.join("report.json");
                let mut text = serde_json::to_string_pretty(&report.to_json_doc())
                    .map_err(|e| RunError::Report(e.to_string()))?;
                text.push('\n');
                fs::write(&path, text).map_err(io_err(&path))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// Outcome of re-checking a stored report's regret curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretVerification {
    pub rounds: usize,
    pub max_abs_diff: f64,
    pub first_mismatch: Option<u64>,
}

impl RegretVerification {
    pub fn ok(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

fn parse_subset_ids(text: &str) -> Result<BTreeSet<usize>, RunError> {
    if text.is_empty() {
        return Ok(BTreeSet::new());
    }
    text.split(';')
        .map(|part| {
            let id: usize = part
                .parse()
                .map_err(|_| RunError::Report(format!("bad node id {part:?} in subset")))?;
            if id == 0 {
                return Err(RunError::Report("node ids are 1-based".into()));
            }
            Ok(id - 1)
        })
        .collect()
}

/// Loads `report.json` from a report directory, reloads the graph it names,
/// recomputes the regret curve from the stored subsets, and compares against
/// the stored values (tolerance 1e-9).
pub fn verify_report_regret(report_dir: &Path) -> Result<RegretVerification, RunError> {
    let path = report_dir.join("report.json");
    let text =
        fs::read_to_string(&path).map_err(|source| RunError::Io { path: path.clone(), source })?;
    let doc: JsonReport =
        serde_json::from_str(&text).map_err(|e| RunError::Report(format!("{path:?}: {e}")))?;

    let graph_path = PathBuf::from(&doc.config.graph_path);
    let graph_text = fs::read_to_string(&graph_path)
        .map_err(|source| RunError::Io { path: graph_path.clone(), source })?;
    let (graph, s) = load_graph(&graph_text)?;
    let inst = GameInstance::new(graph, s, doc.config.k)?;

    let mut records = Vec::with_capacity(doc.rounds.len());
    for round in &doc.rounds {
        records.push(RoundRecord {
            t: round.t,
            x_subset: parse_subset_ids(&round.x_subset)?,
            y_subset: parse_subset_ids(&round.y_subset)?,
            p_hat: ProbabilityEstimate {
                p_hat: round.p_hat.clone(),
                samples: doc.config.r,
            },
            realized_loss: round.realized_loss,
            expected_loss_estimate: round.expected_loss_estimate,
        });
    }
    let recomputed = compute_regret(&records, &inst);

    let mut max_abs_diff: f64 = 0.0;
    let mut first_mismatch = None;
    for (round, fresh) in doc.rounds.iter().zip(&recomputed) {
        let diff = (round.cum_regret - fresh).abs();
        max_abs_diff = max_abs_diff.max(diff);
        if diff > 1e-9 && first_mismatch.is_none() {
            first_mismatch = Some(round.t);
        }
    }
    Ok(RegretVerification { rounds: recomputed.len(), max_abs_diff, first_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::g2_instance;

    fn g2_config(horizon: u64, seed: u64) -> RunConfig {
        RunConfig {
            graph_path: PathBuf::from("g2.graph"),
            k: 1,
            horizon,
            samples: Some(64),
            seed,
            output_dir: PathBuf::from("out"),
            formats: BTreeSet::new(),
            compute_gap: false,
        }
    }

    #[test]
    fn run_structure_holds() {
        let inst = g2_instance(1);
        let report = run_stackelberg_on(&inst, &g2_config(16, 7)).unwrap();
        assert_eq!(report.records.len(), 16);
        assert!((1..=16).contains(&report.t_min));
        assert_eq!(
            report.output_strategy.subset(),
            &report.records[(report.t_min - 1) as usize].x_subset
        );
        let sum: f64 = report.avg_p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        for rec in &report.records {
            assert_eq!(rec.x_subset.len(), 1);
            assert_eq!(rec.y_subset.len(), 1);
            assert!(rec.realized_loss.abs() <= 2.0 + 1e-9);
        }
        // regret is bounded by the loss range; it can dip below zero, since
        // adaptive play against an adaptive adversary may beat every fixed
        // subset in hindsight
        for (t, &r) in (1..).zip(&report.regret_curve) {
            assert!(r.abs() <= 4.0 * t as f64 + 1e-9);
        }
    }

    #[test]
    fn run_is_deterministic() {
        let inst = g2_instance(1);
        let a = run_stackelberg_on(&inst, &g2_config(8, 3)).unwrap();
        let b = run_stackelberg_on(&inst, &g2_config(8, 3)).unwrap();
        assert_eq!(a, b);
        let c = run_stackelberg_on(&inst, &g2_config(8, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        let inst = g2_instance(1);
        let mut config = g2_config(0, 1);
        assert!(matches!(
            run_stackelberg_on(&inst, &config),
            Err(RunError::InvalidConfig(_))
        ));
        config.horizon = 4;
        config.samples = Some(0);
        assert!(matches!(
            run_stackelberg_on(&inst, &config),
            Err(RunError::InvalidConfig(_))
        ));
        config.samples = None;
        config.k = 2;
        assert!(matches!(
            run_stackelberg_on(&inst, &config),
            Err(RunError::InvalidConfig(_))
        ));
    }

    // the time-averaged selection distribution should favour node 1, the
    // pure minmax argmin (the optimal mix for this instance is (2/3, 1/3))
    #[test]
    fn average_distribution_concentrates_on_minmax_argmin() {
        let inst = g2_instance(1);
        let mut firsts = Vec::new();
        for seed in 0..10 {
            let mut config = g2_config(1024, seed);
            config.samples = None; // r = T
            let report = run_stackelberg_on(&inst, &config).unwrap();
            firsts.push(report.avg_p[0]);
        }
        firsts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = (firsts[4] + firsts[5]) / 2.0;
        assert!(median > 0.55, "median avg_p[0] = {median}, expected concentration on node 1");
    }

    #[test]
    fn gap_guard_fails_fast() {
        let (g, s) = crate::graph::generate_graph(
            crate::graph::GraphKind::Random { p: 0.2 },
            25,
            1,
            1.0,
            crate::graph::OpinionMode::UniformRandom,
        )
        .unwrap();
        let inst = crate::game::GameInstance::new(g, s, 12).unwrap();
        let config = RunConfig {
            graph_path: PathBuf::from("big.graph"),
            k: 12,
            horizon: 1_000_000, // would take ages if the guard did not trip first
            samples: Some(1_000_000),
            seed: 0,
            output_dir: PathBuf::from("out"),
            formats: BTreeSet::new(),
            compute_gap: true,
        };
        let started = std::time::Instant::now();
        let err = run_stackelberg_on(&inst, &config).unwrap_err();
        assert!(matches!(err, RunError::Oracle(crate::error::OracleError::TooLarge { .. })));
        assert_eq!(err.exit_code(), 3);
        assert!(started.elapsed().as_secs_f64() < 1.0);
    }

    #[test]
    fn sampling_warning_threshold() {
        let mut config = g2_config(20_000, 1);
        config.samples = None; // r = T
        assert!(config.sampling_cost_warning().is_some());
        config.samples = Some(10);
        assert!(config.sampling_cost_warning().is_none());
    }

    #[test]
    fn regret_of_a_bad_round() {
        let inst = g2_instance(1);
        let records = vec![RoundRecord {
            t: 1,
            x_subset: BTreeSet::from([1]),
            y_subset: BTreeSet::from([1]),
            p_hat: ProbabilityEstimate { p_hat: vec![0.0, 1.0], samples: 1 },
            realized_loss: 2.0,
            expected_loss_estimate: 0.0,
        }];
        let curve = compute_regret(&records, &inst);
        assert_eq!(curve.len(), 1);
        assert!((curve[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn regret_zero_when_playing_offline_best() {
        let inst = g2_instance(1);
        let records = vec![RoundRecord {
            t: 1,
            x_subset: BTreeSet::from([0]),
            y_subset: BTreeSet::from([1]),
            p_hat: ProbabilityEstimate { p_hat: vec![1.0, 0.0], samples: 1 },
            realized_loss: 0.0,
            expected_loss_estimate: 0.0,
        }];
        let curve = compute_regret(&records, &inst);
        assert!(curve[0].abs() < 1e-12);
    }

    #[test]
    fn regret_curve_is_prefix_consistent() {
        let inst = g2_instance(1);
        let report = run_stackelberg_on(&inst, &g2_config(12, 5)).unwrap();
        for t in 1..=12usize {
            let prefix = compute_regret(&report.records[..t], &inst);
            assert!((prefix[t - 1] - report.regret_curve[t - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_from_pure_average() {
        let inst = g2_instance(1);
        // an indicator of the oracle argmin reproduces the minmax value
        // through the same code path, so the gap is exactly zero
        let g = equilibrium_gap_from_avg_p(&[1.0, 0.0], &inst).unwrap();
        assert!((g.minmax_value - 1.0).abs() < 1e-12);
        assert_eq!(g.gap, 0.0);
        assert_eq!(g.gap_plus, 0.0);

        let g = equilibrium_gap_from_avg_p(&[0.0, 1.0], &inst).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-12);
        assert!((g.gap_plus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emit_writes_requested_formats() {
        let inst = g2_instance(1);
        let report = run_stackelberg_on(&inst, &g2_config(4, 9)).unwrap();
        let dir = tempfile::tempdir().unwrap();

        let none = emit_report(&report, &BTreeSet::new(), dir.path()).unwrap();
        assert!(none.is_empty());

        let csv_only = emit_report(&report, &BTreeSet::from([ReportFormat::Csv]), dir.path())
            .unwrap();
        assert_eq!(csv_only, vec![dir.path().join("rounds.csv")]);
        let text = fs::read_to_string(&csv_only[0]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "t,x_subset,y_subset,realized_loss,expected_loss_estimate,cum_regret");

        let both = emit_report(
            &report,
            &BTreeSet::from([ReportFormat::Csv, ReportFormat::Json]),
            dir.path(),
        )
        .unwrap();
        assert_eq!(both.len(), 2);
        let doc: JsonReport =
            serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
                .unwrap();
        assert_eq!(doc.config.seed, 9);
        assert_eq!(doc.rounds.len(), 4);
        assert!(doc.minmax_value.is_none());
    }

    #[test]
    fn emit_is_bit_stable() {
        let inst = g2_instance(1);
        let report = run_stackelberg_on(&inst, &g2_config(6, 2)).unwrap();
        let formats = BTreeSet::from([ReportFormat::Csv, ReportFormat::Json]);
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        emit_report(&report, &formats, dir_a.path()).unwrap();
        emit_report(&report, &formats, dir_b.path()).unwrap();
        for file in ["rounds.csv", "report.json"] {
            let a = fs::read(dir_a.path().join(file)).unwrap();
            let b = fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs");
        }
    }

    #[test]
    fn format_sig12_has_twelve_significant_digits() {
        assert_eq!(format_sig12(2.0 / 3.0), "6.66666666667e-1");
        assert_eq!(format_sig12(-0.5), "-5.00000000000e-1");
        assert_eq!(format_sig12(0.0), "0.00000000000e0");
    }
}
