//! Weighted directed influence graphs and opinion vectors.
//!
//! A node's anchor weight `w_ii` says how strongly it sticks to its internal
//! opinion; an edge weight `w_ij` says how much node `i` is influenced by
//! node `j`. Anchors must be strictly positive so that the absorbing walk
//! built on top of the graph reaches absorption from every node.
//!
//! Node indices are 0-based in memory. The text format and all emitted
//! reports use ids `1..=n`; the translation happens only at those
//! boundaries.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::RngExt;

use crate::error::GraphError;
use crate::rng::{substream, StreamTag};

/// Directed influence graph with per-node anchor weights.
///
/// Invariants (enforced at construction): all weights finite and >= 0,
/// every anchor > 0, no self-loops in the edge map.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    anchor: Vec<f64>,
    edges: BTreeMap<(usize, usize), f64>,
}

impl WeightedGraph {
    /// Validates and builds a graph. Zero-weight edges are dropped.
    pub fn new(
        anchor: Vec<f64>,
        edges: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self, GraphError> {
        let n = anchor.len();
        for (i, &a) in anchor.iter().enumerate() {
            if !a.is_finite() {
                return Err(GraphError::NonFinite { what: format!("anchor of node {}", i + 1) });
            }
            if a < 0.0 {
                return Err(GraphError::NegativeWeight {
                    what: format!("anchor of node {}", i + 1),
                    weight: a,
                });
            }
            if a == 0.0 {
                return Err(GraphError::ZeroAnchor { node: i + 1 });
            }
        }
        let mut map = BTreeMap::new();
        for ((i, j), w) in edges {
            if i >= n || j >= n {
                return Err(GraphError::InvalidParam(format!(
                    "edge ({},{}) references a node outside 1..={n}",
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                return Err(GraphError::SelfLoop { node: i + 1 });
            }
            if !w.is_finite() {
                return Err(GraphError::NonFinite {
                    what: format!("weight of edge ({},{})", i + 1, j + 1),
                });
            }
            if w < 0.0 {
                return Err(GraphError::NegativeWeight {
                    what: format!("edge ({},{})", i + 1, j + 1),
                    weight: w,
                });
            }
            if w > 0.0 {
                map.insert((i, j), w);
            }
        }
        Ok(WeightedGraph { n, anchor, edges: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn anchor(&self, i: usize) -> f64 {
        self.anchor[i]
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchor
    }

    /// Outgoing influence edges of node `i` as `(j, w_ij)`.
    pub fn out_edges(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.edges.range((i, 0)..=(i, usize::MAX)).map(|(&(_, j), &w)| (j, w))
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edges.iter().map(|(&k, &w)| (k, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total outgoing weight of node `i` including the anchor.
    pub fn degree(&self, i: usize) -> f64 {
        self.anchor[i] + self.out_edges(i).map(|(_, w)| w).sum::<f64>()
    }

    /// Text form of the graph plus its internal opinions; inverse of
    /// [`load_graph`]. Weights round-trip bit-exactly.
    pub fn serialize(&self, s: &OpinionVector) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            writeln!(out, "node {} {} {}", i + 1, self.anchor[i], s.values()[i]).unwrap();
        }
        for (&(i, j), &w) in &self.edges {
            writeln!(out, "edge {} {} {}", i + 1, j + 1, w).unwrap();
        }
        out
    }
}

/// Length-n real vector with every entry in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GraphError::NonFinite { what: format!("opinion of node {}", i + 1) });
            }
            if !(-1.0..=1.0).contains(&v) {
                return Err(GraphError::InvalidParam(format!(
                    "opinion {v} of node {} outside [-1, 1]",
                    i + 1
                )));
            }
        }
        Ok(OpinionVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Graph topology for [`generate_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    /// Bidirectional chain 1-2-...-n, unit weights.
    Path,
    /// Every ordered pair, unit weights.
    Complete,
    /// Each ordered pair independently with probability `p`, unit weight.
    Random { p: f64 },
}

/// Internal-opinion assignment for [`generate_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpinionMode {
    /// i.i.d. uniform in [-1, 1].
    UniformRandom,
    /// Every node starts at `c`.
    Constant(f64),
}

/// Deterministic test-instance supply: output is a pure function of the
/// arguments, seed included.
pub fn generate_graph(
    kind: GraphKind,
    n: usize,
    seed: u64,
    anchor_value: f64,
    opinion_mode: OpinionMode,
) -> Result<(WeightedGraph, OpinionVector), GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParam("need at least one node".into()));
    }
    if !(anchor_value.is_finite() && anchor_value > 0.0) {
        return Err(GraphError::InvalidParam(format!(
            "anchor value must be positive and finite, got {anchor_value}"
        )));
    }
    if let GraphKind::Random { p } = kind {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidParam(format!(
                "edge probability must lie in [0, 1], got {p}"
            )));
        }
    }
    if let OpinionMode::Constant(c) = opinion_mode {
        if !(-1.0..=1.0).contains(&c) {
            return Err(GraphError::InvalidParam(format!(
                "constant opinion must lie in [-1, 1], got {c}"
            )));
        }
    }

    let mut edges = Vec::new();
    match kind {
        GraphKind::Path => {
            for i in 0..n.saturating_sub(1) {
                edges.push(((i, i + 1), 1.0));
                edges.push(((i + 1, i), 1.0));
            }
        }
        GraphKind::Complete => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        edges.push(((i, j), 1.0));
                    }
                }
            }
        }
        GraphKind::Random { p } => {
            let mut rng = substream(seed, StreamTag::GraphGen, 0, 0);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < p {
                        edges.push(((i, j), 1.0));
                    }
                }
            }
        }
    }

    let opinions = match opinion_mode {
        OpinionMode::Constant(c) => vec![c; n],
        OpinionMode::UniformRandom => {
            let mut rng = substream(seed, StreamTag::GraphGen, 0, 1);
            (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
        }
    };

    let graph = WeightedGraph::new(vec![anchor_value; n], edges)?;
    let s = OpinionVector::new(opinions)?;
    Ok((graph, s))
}

/// Parses the graph text format:
///
/// ```text
/// # comment
/// node <id> <anchor_weight> <internal_opinion>
/// edge <src> <dst> <weight>
/// ```
///
/// All node lines precede edge lines; ids are integers 1..=n in order.
pub fn load_graph(text: &str) -> Result<(WeightedGraph, OpinionVector), GraphError> {
    let mut anchors: Vec<f64> = Vec::new();
    let mut opinions: Vec<f64> = Vec::new();
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut edges_started = false;

    let parse_err = |line: usize, msg: String| GraphError::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        match fields[0] {
            "node" => {
                if edges_started {
                    return Err(parse_err(lineno, "node line after edge lines".into()));
                }
                if fields.len() != 4 {
                    return Err(parse_err(
                        lineno,
                        "expected: node <id> <anchor_weight> <internal_opinion>".into(),
                    ));
                }
                let id: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad node id {:?}", fields[1])))?;
                if id != anchors.len() + 1 {
                    return Err(parse_err(
                        lineno,
                        format!(
                            "node ids must be 1..=n in order; expected {}, got {id}",
                            anchors.len() + 1
                        ),
                    ));
                }
                let anchor: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad anchor weight {:?}", fields[2])))?;
                let opinion: f64 = fields[3]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad opinion {:?}", fields[3])))?;
                if !opinion.is_finite() || !(-1.0..=1.0).contains(&opinion) {
                    return Err(parse_err(lineno, format!("opinion {opinion} outside [-1, 1]")));
                }
                anchors.push(anchor);
                opinions.push(opinion);
            }
            "edge" => {
                edges_started = true;
                if fields.len() != 4 {
                    return Err(parse_err(lineno, "expected: edge <src> <dst> <weight>".into()));
                }
                let src: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad src id {:?}", fields[1])))?;
                let dst: usize = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad dst id {:?}", fields[2])))?;
                let w: f64 = fields[3]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad edge weight {:?}", fields[3])))?;
                let n = anchors.len();
                for id in [src, dst] {
                    if id == 0 || id > n {
                        return Err(parse_err(
                            lineno,
                            format!("edge references undeclared node {id}"),
                        ));
                    }
                }
                match edges.entry((src - 1, dst - 1)) {
                    Entry::Occupied(_) => {
                        return Err(parse_err(lineno, format!("duplicate edge {src} -> {dst}")));
                    }
                    Entry::Vacant(e) => {
                        e.insert(w);
                    }
                }
            }
            other => {
                return Err(parse_err(lineno, format!("unknown record {other:?}")));
            }
        }
    }

    if anchors.is_empty() {
        return Err(parse_err(0, "no node lines".into()));
    }
    let graph = WeightedGraph::new(anchors, edges)?;
    let s = OpinionVector::new(opinions)?;
    Ok((graph, s))
}
