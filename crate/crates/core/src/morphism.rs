//! Morphisms from satisfying graphs into the universal graph.
//!
//! Two constructions are offered. [`phi_paper`] follows the rank
//! construction literally: n-values, tight edges, the DAGs `T_{v,k}` and
//! their ranks. It never patches its output; [`verify_morphism`] reports
//! every edge whose image is not an edge of the universal graph, which
//! happens on tight edges leaving a vertex with `n = -1` towards one with
//! `n >= 0`. [`phi_fixpoint`] computes the least morphism into a bounded
//! window by lifting and always verifies what it returns.

use std::collections::HashMap;

use serde_json::{json, Map, Value};

use crate::cycles::{has_cycle, CycleBound, WideEdge};
use crate::graph::{EdgeId, LabeledGraph, VertexId};
use crate::lifting::{Level, Lifter, Role, StepLimit, DEFAULT_LIFT_LIMIT};
use crate::objective::{satisfies, wide_edges};
use crate::universal::{lex_gt, EdgeRule, FragmentBounds, OrdTuple};
use crate::weight::{add_wide, Overflow, Weight};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphismError {
    #[error("the graph has a cycle of weight <= 0 (edges {witness:?})")]
    NotSatisfying { witness: Vec<EdgeId> },
    #[error("a cycle of negative weight is reachable; n-values are unbounded")]
    NegativeCycleReachable,
    #[error("the tight edges contain a cycle")]
    TightCycle,
    #[error("no tuple assigned to vertex {0:?}")]
    MissingAssignment(String),
    #[error("assignment names unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("malformed assignment: {0}")]
    Malformed(String),
    #[error("no morphism into the window of length {} and coordinates below {}", .0.max_len, .0.max_coord)]
    BoundExceeded(FragmentBounds),
    #[error("the lifted assignment failed verification on {0} edges")]
    Unverified(usize),
    #[error(transparent)]
    StepLimit(#[from] StepLimit),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// `n(v) = -(least weight of a non-empty path from v)`; `None` for sinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NMap<W> {
    pub values: Vec<Option<W>>,
    /// Vertices with `n(v) < 0`, ascending.
    pub negative: Vec<VertexId>,
    /// First vertex of `negative`.
    pub v0: Option<VertexId>,
    /// Vertices reachable from `v0`.
    pub from_v0: Vec<bool>,
}

impl<W: Weight> NMap<W> {
    pub fn get(&self, v: VertexId) -> Option<W> {
        self.values[v]
    }

    fn wide(&self, v: VertexId) -> Option<i128> {
        self.values[v].map(Weight::wide)
    }

    pub fn to_json(&self, graph: &LabeledGraph<W>) -> Value {
        let mut values = Map::new();
        for (v, n) in self.values.iter().enumerate() {
            let shown = match n {
                Some(n) => json!(n),
                None => json!("BOTTOM"),
            };
            values.insert(graph.id(v).to_string(), shown);
        }
        let negative: Vec<&str> = self.negative.iter().map(|&v| graph.id(v)).collect();
        let from_v0: Vec<&str> = (0..graph.vertex_count()).filter(|&v| self.from_v0[v]).map(|v| graph.id(v)).collect();
        json!({
            "values": values,
            "negative": negative,
            "v0": self.v0.map(|v| graph.id(v)),
            "reachable_from_v0": from_v0,
        })
    }
}

/// Computes n-values by `|V|` rounds of relaxation over path length.
///
/// When every cycle has weight at least 1 a least-weight path never needs
/// more than `|V|` edges, so one further round changes nothing; if it does,
/// a negative cycle is reachable and the infimum is `-∞`.
pub fn compute_n<W: Weight>(graph: &LabeledGraph<W>) -> Result<NMap<W>, MorphismError> {
    let n = graph.vertex_count();
    let edges = wide_edges(graph);
    // m[v]: least weight of a non-empty path from v found so far
    let mut m: Vec<Option<i128>> = vec![None; n];
    for &(u, w, _) in &edges {
        m[u] = Some(m[u].map_or(w, |cur| cur.min(w)));
    }
    let round = |m: &mut Vec<Option<i128>>| -> Result<bool, Overflow> {
        let mut changed = false;
        for &(u, w, v) in &edges {
            let through = add_wide(w, m[v].map_or(0, |x| x.min(0)))?;
            if m[u].is_none_or(|cur| through < cur) {
                m[u] = Some(through);
                changed = true;
            }
        }
        Ok(changed)
    };
    for _ in 1..n {
        if !round(&mut m)? {
            break;
        }
    }
    if round(&mut m)? {
        return Err(MorphismError::NegativeCycleReachable);
    }
    let values = m
        .iter()
        .map(|x| x.map(|x| x.checked_neg().and_then(W::narrow).ok_or(Overflow)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    let negative: Vec<VertexId> = (0..n).filter(|&v| values[v].is_some_and(|x: W| x.is_negative())).collect();
    let v0 = negative.first().copied();
    let from_v0 = match v0 {
        Some(v0) => graph.reachable_from([v0], |_| true),
        None => vec![false; n],
    };
    Ok(NMap { values, negative, v0, from_v0 })
}

/// Tight edges `n(v) + w = n(v')` between non-sink vertices.
pub fn tight_edges<W: Weight>(graph: &LabeledGraph<W>, nmap: &NMap<W>) -> Result<Vec<EdgeId>, Overflow> {
    let mut tight = Vec::new();
    for (e, edge) in graph.edges().iter().enumerate() {
        if let (Some(a), Some(b)) = (nmap.wide(edge.from), nmap.wide(edge.to)) {
            if add_wide(a, edge.weight.wide())? == b {
                tight.push(e);
            }
        }
    }
    Ok(tight)
}

/// Tight successor lists, checked to be acyclic.
struct TightStructure {
    succ: Vec<Vec<(VertexId, i128)>>,
}

impl TightStructure {
    fn new<W: Weight>(graph: &LabeledGraph<W>, nmap: &NMap<W>) -> Result<Self, MorphismError> {
        let n = graph.vertex_count();
        let tight = tight_edges(graph, nmap)?;
        let wide: Vec<WideEdge> = tight
            .iter()
            .map(|&e| {
                let edge = graph.edge(e);
                (edge.from, 0, edge.to)
            })
            .collect();
        // any cycle has weight 0 here, so "<= 0" finds every cycle
        if has_cycle(n, &wide, CycleBound::NonPositive)? {
            return Err(MorphismError::TightCycle);
        }
        let mut succ = vec![Vec::new(); n];
        for &e in &tight {
            let edge = graph.edge(e);
            succ[edge.from].push((edge.to, edge.weight.wide()));
        }
        Ok(TightStructure { succ })
    }

    fn dag(&self, nvals: &[Option<i128>], root: VertexId, k: i128) -> TightDag {
        let n = self.succ.len();
        let level_ok = |x: VertexId| nvals[x].is_some_and(|nx| nx <= k);
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut vertices = Vec::new();
        while let Some(x) = stack.pop() {
            if level_ok(x) {
                vertices.push(x);
            }
            for &(y, _) in &self.succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        vertices.sort_unstable();

        let mut edges = Vec::new();
        for &x in &vertices {
            // tight paths out of x whose inner vertices stay above level k
            let mut stack: Vec<(VertexId, i128)> = self.succ[x].clone();
            let mut found: Vec<(VertexId, i128)> = Vec::new();
            while let Some((y, w)) = stack.pop() {
                if level_ok(y) {
                    if !found.contains(&(y, w)) {
                        found.push((y, w));
                    }
                    continue;
                }
                for &(z, wz) in &self.succ[y] {
                    stack.push((z, w + wz));
                }
            }
            found.sort_unstable();
            edges.extend(found.into_iter().map(|(y, w)| (x, w, y)));
        }

        let index: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for &(x, _, y) in &edges {
            children[index[&x]].push(index[&y]);
        }
        let mut rank: Vec<Option<u32>> = vec![None; vertices.len()];
        for start in 0..vertices.len() {
            if rank[start].is_some() {
                continue;
            }
            // iterative post-order; the DAG has no cycles
            let mut stack = vec![(start, false)];
            while let Some((i, expanded)) = stack.pop() {
                if rank[i].is_some() {
                    continue;
                }
                if expanded {
                    let r = children[i].iter().map(|&c| rank[c].expect("child ranked") + 1).max().unwrap_or(0);
                    rank[i] = Some(r);
                } else {
                    stack.push((i, true));
                    for &c in &children[i] {
                        if rank[c].is_none() {
                            stack.push((c, false));
                        }
                    }
                }
            }
        }
        TightDag { root, level: k, vertices, edges, rank: rank.into_iter().map(|r| r.expect("all ranked")).collect() }
    }
}

/// The DAG `T_{v,k}`: vertices with `n <= k` reachable from `v` by tight
/// paths, joined by tight paths whose inner vertices have `n > k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightDag {
    pub root: VertexId,
    pub level: i128,
    /// Ascending.
    pub vertices: Vec<VertexId>,
    /// `(from, weight of the tight path, to)`.
    pub edges: Vec<(VertexId, i128, VertexId)>,
    /// Aligned with `vertices`.
    pub rank: Vec<u32>,
}

impl TightDag {
    /// Largest vertex rank, 0 when empty.
    pub fn rank(&self) -> u32 {
        self.rank.iter().copied().max().unwrap_or(0)
    }

    pub fn rank_of(&self, v: VertexId) -> Option<u32> {
        self.vertices.binary_search(&v).ok().map(|i| self.rank[i])
    }
}

pub fn build_tvk<W: Weight>(
    graph: &LabeledGraph<W>,
    nmap: &NMap<W>,
    v: VertexId,
    k: i128,
) -> Result<TightDag, MorphismError> {
    let structure = TightStructure::new(graph, nmap)?;
    let nvals: Vec<Option<i128>> = (0..graph.vertex_count()).map(|x| nmap.wide(x)).collect();
    Ok(structure.dag(&nvals, v, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeReason {
    /// `|u| + w > |u'|`
    LengthSlack,
    /// `|u| + w = |u'|` and `u >lex u'`
    LexDecrease,
    /// `|u| + w = |u'|` but not `u >lex u'`
    LexNotDecreasing,
    /// `|u| + w < |u'|`
    TooShort,
}

impl EdgeReason {
    pub fn holds(self) -> bool {
        matches!(self, EdgeReason::LengthSlack | EdgeReason::LexDecrease)
    }

    pub fn describe(self) -> &'static str {
        match self {
            EdgeReason::LengthSlack => "length slack",
            EdgeReason::LexDecrease => "equal length budget, lex decrease",
            EdgeReason::LexNotDecreasing => "equal length budget, no lex decrease",
            EdgeReason::TooShort => "length budget exceeded",
        }
    }

    fn classify(u: &OrdTuple, w: i128, target: &OrdTuple) -> EdgeReason {
        let budget = u.len() as i128 + w;
        let need = target.len() as i128;
        if budget > need {
            EdgeReason::LengthSlack
        } else if budget < need {
            EdgeReason::TooShort
        } else if lex_gt(u, target) {
            EdgeReason::LexDecrease
        } else {
            EdgeReason::LexNotDecreasing
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCheck {
    pub edge: EdgeId,
    pub holds: bool,
    pub reason: EdgeReason,
}

/// A vertex assignment into the universal graph with its per-edge report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub assignment: Vec<OrdTuple>,
    pub report: Vec<EdgeCheck>,
}

impl Morphism {
    pub fn failures(&self) -> Vec<EdgeId> {
        self.report.iter().filter(|c| !c.holds).map(|c| c.edge).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.report.iter().all(|c| c.holds)
    }

    pub fn to_json<W: Weight>(&self, graph: &LabeledGraph<W>) -> Value {
        json!({
            "assignment": assignment_json(graph, &self.assignment),
            "failures": self.failures().into_iter().map(|e| graph.edge_json(e)).collect::<Vec<_>>(),
        })
    }

    /// Like [`Morphism::to_json`] with the per-edge report included.
    pub fn to_json_full<W: Weight>(&self, graph: &LabeledGraph<W>) -> Value {
        let mut doc = self.to_json(graph);
        let report: Vec<Value> = self
            .report
            .iter()
            .map(|c| {
                let mut entry = graph.edge_json(c.edge);
                entry["holds"] = json!(c.holds);
                entry["reason"] = json!(c.reason.describe());
                entry
            })
            .collect();
        doc["report"] = Value::Array(report);
        doc
    }
}

pub fn assignment_json<W: Weight>(graph: &LabeledGraph<W>, assignment: &[OrdTuple]) -> Value {
    let mut map = Map::new();
    for (v, t) in assignment.iter().enumerate() {
        map.insert(graph.id(v).to_string(), json!(t.to_string()));
    }
    Value::Object(map)
}

/// Reads `{"assignment": {"id": "(0,2)", ...}}` (or a bare id → tuple object).
pub fn parse_assignment<W: Weight>(graph: &LabeledGraph<W>, text: &str) -> Result<Vec<OrdTuple>, MorphismError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| MorphismError::Malformed(e.to_string()))?;
    let object = match doc.get("assignment") {
        Some(inner) => inner,
        None => &doc,
    };
    let object = object
        .as_object()
        .ok_or_else(|| MorphismError::Malformed("expected an object mapping vertices to tuples".into()))?;
    let mut slots: Vec<Option<OrdTuple>> = vec![None; graph.vertex_count()];
    for (id, value) in object {
        let v = graph.index_of(id).ok_or_else(|| MorphismError::UnknownVertex(id.clone()))?;
        let text =
            value.as_str().ok_or_else(|| MorphismError::Malformed(format!("tuple for {id:?} must be a string")))?;
        slots[v] = Some(
            text.parse().map_err(|e: crate::universal::TupleSyntaxError| MorphismError::Malformed(e.to_string()))?,
        );
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(v, t)| t.ok_or_else(|| MorphismError::MissingAssignment(graph.id(v).to_string())))
        .collect()
}

/// Checks every edge of `graph` against the universal graph under `assignment`.
pub fn verify_morphism<W: Weight>(graph: &LabeledGraph<W>, assignment: &[OrdTuple]) -> Result<Morphism, MorphismError> {
    if assignment.len() < graph.vertex_count() {
        return Err(MorphismError::MissingAssignment(graph.id(assignment.len()).to_string()));
    }
    let report = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let reason = EdgeReason::classify(&assignment[edge.from], edge.weight.wide(), &assignment[edge.to]);
            EdgeCheck { edge: e, holds: reason.holds(), reason }
        })
        .collect();
    Ok(Morphism { assignment: assignment[..graph.vertex_count()].to_vec(), report })
}

fn require_satisfying<W: Weight>(graph: &LabeledGraph<W>) -> Result<(), MorphismError> {
    let verdict = satisfies(graph)?;
    match verdict.witness {
        Some(witness) => Err(MorphismError::NotSatisfying { witness }),
        None => Ok(()),
    }
}

/// The rank construction: `φ(v) = (rk T_{v,0}, …, rk T_{v,n(v)})`, and `()`
/// for sinks and for `n(v) < 0`. The report may contain failing edges.
pub fn phi_paper<W: Weight>(graph: &LabeledGraph<W>) -> Result<Morphism, MorphismError> {
    require_satisfying(graph)?;
    let nmap = compute_n(graph)?;
    let structure = TightStructure::new(graph, &nmap)?;
    let nvals: Vec<Option<i128>> = (0..graph.vertex_count()).map(|x| nmap.wide(x)).collect();
    let assignment: Vec<OrdTuple> = (0..graph.vertex_count())
        .map(|v| match nvals[v] {
            Some(top) if top >= 0 => OrdTuple((0..=top).map(|k| structure.dag(&nvals, v, k).rank()).collect()),
            _ => OrdTuple::empty(),
        })
        .collect();
    verify_morphism(graph, &assignment)
}

/// Window used by [`phi_fixpoint`] and the tuple-valued solver when no bounds are given.
pub fn default_bounds(vertex_count: usize, max_abs_weight: i128) -> FragmentBounds {
    let spread = (vertex_count.saturating_sub(1) as i128).saturating_mul(max_abs_weight);
    let max_len = usize::try_from(spread.saturating_add(2)).unwrap_or(usize::MAX);
    let max_coord = u32::try_from(vertex_count.saturating_add(1)).unwrap_or(u32::MAX);
    FragmentBounds::new(max_len, max_coord)
}

/// Number of times the window is doubled before giving up.
pub const MAX_DOUBLINGS: u32 = 3;

/// Least morphism into a window of the universal graph, found by lifting
/// every vertex to the least tuple respecting all its out-edges.
///
/// Starts from `bounds` (or [`default_bounds`]) and doubles the window up to
/// [`MAX_DOUBLINGS`] times while some vertex is still `TOP`. The result has
/// passed [`verify_morphism`].
pub fn phi_fixpoint<W: Weight>(
    graph: &LabeledGraph<W>,
    bounds: Option<FragmentBounds>,
) -> Result<Morphism, MorphismError> {
    require_satisfying(graph)?;
    let n = graph.vertex_count();
    let edges = wide_edges(graph);
    let roles = vec![Role::Max; n];
    let mut bounds = bounds.unwrap_or_else(|| default_bounds(n, graph.max_abs_weight()));
    for attempt in 0..=MAX_DOUBLINGS {
        let lifter = Lifter::new(n, &edges, &roles, bounds, EdgeRule::Strict);
        let values = lifter.solve(None, DEFAULT_LIFT_LIMIT)?;
        let tuples: Option<Vec<OrdTuple>> = values.into_iter().map(|l| l.tuple().cloned()).collect();
        if let Some(assignment) = tuples {
            let morphism = verify_morphism(graph, &assignment)?;
            let failed = morphism.failures().len();
            if failed > 0 {
                return Err(MorphismError::Unverified(failed));
            }
            return Ok(morphism);
        }
        if attempt < MAX_DOUBLINGS {
            bounds = bounds.doubled();
        }
    }
    Err(MorphismError::BoundExceeded(bounds))
}

/// Which failing edges fall outside the known boundary pattern: a tight edge
/// leaving a vertex with `n = -1` for one with `n >= 0`.
pub fn unexplained_failures<W: Weight>(
    graph: &LabeledGraph<W>,
    nmap: &NMap<W>,
    morphism: &Morphism,
) -> Result<Vec<EdgeId>, Overflow> {
    let tight = tight_edges(graph, nmap)?;
    Ok(morphism
        .failures()
        .into_iter()
        .filter(|&e| {
            let edge = graph.edge(e);
            let boundary =
                tight.contains(&e) && nmap.wide(edge.from) == Some(-1) && nmap.wide(edge.to).is_some_and(|x| x >= 0);
            !boundary
        })
        .collect())
}

/// Shape of a failing edge of the rank construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Tight edge from `n = -1` to `n >= 0`: the source image is `()`.
    Boundary,
    /// Tight edge from `n >= 0` whose source image is a prefix of the target
    /// image. Happens when the source is a leaf of its own rank DAG and the
    /// target's DAG at that level is empty, both of rank 0.
    EqualPrefix,
    Other,
}

/// Classifies every failing edge of `morphism`, in edge order.
pub fn classify_failures<W: Weight>(
    graph: &LabeledGraph<W>,
    nmap: &NMap<W>,
    morphism: &Morphism,
) -> Result<Vec<(EdgeId, FailureKind)>, Overflow> {
    let tight = tight_edges(graph, nmap)?;
    let unexplained = unexplained_failures(graph, nmap, morphism)?;
    Ok(morphism
        .failures()
        .into_iter()
        .map(|e| {
            if !unexplained.contains(&e) {
                return (e, FailureKind::Boundary);
            }
            let edge = graph.edge(e);
            let (src, dst) = (&morphism.assignment[edge.from], &morphism.assignment[edge.to]);
            let prefix = !src.is_empty() && src.len() <= dst.len() && dst.restrict(src.len()) == src.coords();
            if tight.contains(&e) && prefix {
                (e, FailureKind::EqualPrefix)
            } else {
                (e, FailureKind::Other)
            }
        })
        .collect())
}

/// Levels of a lifting result, `TOP` included, for display.
pub fn levels_json<W: Weight>(graph: &LabeledGraph<W>, levels: &[Level]) -> Value {
    let mut map = Map::new();
    for (v, l) in levels.iter().enumerate() {
        map.insert(graph.id(v).to_string(), json!(l.to_string()));
    }
    Value::Object(map)
}
