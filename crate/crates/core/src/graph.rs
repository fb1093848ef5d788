//! Weighted graphs, game arenas, and their JSON / DOT encodings.
//!
//! Vertices are opaque string identifiers. Internally every vertex is the
//! index of its declaration, and every edge is the index of its first
//! occurrence in the input; nothing depends on identifier order.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::weight::{Overflow, Weight};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge<W> {
    pub from: VertexId,
    pub weight: W,
    pub to: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Player::Eve => "Eve",
            Player::Adam => "Adam",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Player> {
        match tag {
            "Eve" => Some(Player::Eve),
            "Adam" => Some(Player::Adam),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("vertex {0:?} declared twice")]
    DuplicateVertex(String),
    #[error("edge references undeclared vertex {0:?}")]
    UndeclaredVertex(String),
    #[error("vertex {vertex:?} has unknown owner {tag:?}")]
    UnknownOwner { vertex: String, tag: String },
    #[error("vertex {0:?} has no owner")]
    MissingOwner(String),
    #[error("vertex {0:?} has no outgoing edge")]
    DeadEnd(String),
    #[error("owner table has {got} entries for {expected} vertices")]
    OwnerCount { expected: usize, got: usize },
}

/// Finite directed graph with integer edge labels.
#[derive(Clone, Debug)]
pub struct LabeledGraph<W> {
    ids: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge<W>>,
    out: Vec<Vec<EdgeId>>,
}

impl<W: PartialEq> PartialEq for LabeledGraph<W> {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges == other.edges
    }
}

impl<W: Eq> Eq for LabeledGraph<W> {}

impl<W: Weight> LabeledGraph<W> {
    /// Builds a graph from declared identifiers and index-based edges.
    /// Identical `(from, weight, to)` triples are collapsed to their first occurrence.
    pub fn new(ids: Vec<String>, edges: impl IntoIterator<Item = Edge<W>>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(id.clone()));
            }
        }
        let n = ids.len();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut out = vec![Vec::new(); n];
        for edge in edges {
            for end in [edge.from, edge.to] {
                if end >= n {
                    return Err(GraphError::UndeclaredVertex(format!("#{end}")));
                }
            }
            if seen.insert(edge) {
                out[edge.from].push(kept.len());
                kept.push(edge);
            }
        }
        Ok(LabeledGraph { ids, index, edges: kept, out })
    }

    /// Builds a graph from string identifiers, mostly for fixtures and tests.
    pub fn from_named(vertices: &[&str], edges: &[(&str, W, &str)]) -> Result<Self, GraphError> {
        let ids: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let lookup: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut resolved = Vec::with_capacity(edges.len());
        for &(from, weight, to) in edges {
            let from = *lookup.get(from).ok_or_else(|| GraphError::UndeclaredVertex(from.to_string()))?;
            let to = *lookup.get(to).ok_or_else(|| GraphError::UndeclaredVertex(to.to_string()))?;
            resolved.push(Edge { from, weight, to });
        }
        Self::new(ids, resolved)
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: VertexId) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<VertexId> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge<W> {
        self.edges[e]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out[v].is_empty()
    }

    /// Largest absolute edge weight, 0 for edgeless graphs.
    pub fn max_abs_weight(&self) -> i128 {
        self.edges.iter().map(|e| e.weight.wide().abs()).max().unwrap_or(0)
    }

    /// Predecessor edge lists, indexed by head vertex.
    pub fn in_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut incoming = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            incoming[e.to].push(i);
        }
        incoming
    }

    /// Vertices reachable (by paths of length ≥ 0) from any vertex in `sources`,
    /// following only edges accepted by `keep`.
    pub fn reachable_from(
        &self,
        sources: impl IntoIterator<Item = VertexId>,
        keep: impl Fn(EdgeId) -> bool,
    ) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack: Vec<VertexId> = Vec::new();
        for s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for &e in &self.out[v] {
                if keep(e) {
                    let t = self.edges[e].to;
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    pub fn edge_json(&self, e: EdgeId) -> Value {
        let edge = self.edges[e];
        json!({ "from": self.ids[edge.from], "to": self.ids[edge.to], "weight": edge.weight })
    }

    fn document(&self, owners: Option<&[Player]>) -> Value {
        let vertices: Vec<Value> = self
            .ids
            .iter()
            .enumerate()
            .map(|(v, id)| match owners {
                Some(owners) => json!({ "id": id, "owner": owners[v].tag() }),
                None => json!({ "id": id }),
            })
            .collect();
        let edges: Vec<Value> = (0..self.edges.len()).map(|e| self.edge_json(e)).collect();
        json!({ "vertices": vertices, "edges": edges })
    }

    pub fn to_json(&self) -> Value {
        self.document(None)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph document serializes")
    }

    pub fn to_dot(&self) -> String {
        render_dot(self, None)
    }
}

/// Game arena: a graph whose vertices are split between Eve and Adam and
/// where every vertex has a successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena<W> {
    graph: LabeledGraph<W>,
    owner: Vec<Player>,
}

impl<W: Weight> Arena<W> {
    pub fn new(graph: LabeledGraph<W>, owner: Vec<Player>) -> Result<Self, GraphError> {
        if owner.len() != graph.vertex_count() {
            return Err(GraphError::OwnerCount { expected: graph.vertex_count(), got: owner.len() });
        }
        if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.is_sink(v)) {
            return Err(GraphError::DeadEnd(graph.id(v).to_string()));
        }
        Ok(Arena { graph, owner })
    }

    pub fn from_named(vertices: &[(&str, Player)], edges: &[(&str, W, &str)]) -> Result<Self, GraphError> {
        let names: Vec<&str> = vertices.iter().map(|(id, _)| *id).collect();
        let graph = LabeledGraph::from_named(&names, edges)?;
        Arena::new(graph, vertices.iter().map(|(_, p)| *p).collect())
    }

    pub fn graph(&self) -> &LabeledGraph<W> {
        &self.graph
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owner[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn to_json(&self) -> Value {
        self.graph.document(Some(&self.owner))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("arena document serializes")
    }

    pub fn to_dot(&self) -> String {
        render_dot(&self.graph, Some(&self.owner))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseMode {
    Graph,
    Arena,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document<W> {
    Graph(LabeledGraph<W>),
    Arena(Arena<W>),
}

#[derive(Deserialize)]
struct RawDocument<W> {
    vertices: Vec<RawVertex>,
    #[serde(default = "Vec::new")]
    edges: Vec<RawEdge<W>>,
}

#[derive(Deserialize)]
struct RawVertex {
    id: String,
    #[serde(default)]
    owner: Option<String>,
}

#[derive(Deserialize)]
struct RawEdge<W> {
    from: String,
    to: String,
    weight: W,
}

/// Parses the JSON graph/arena format. In graph mode owner fields are ignored;
/// in arena mode they are required and dead ends are rejected.
pub fn parse_labeled_graph<W: Weight>(text: &str, mode: ParseMode) -> Result<Document<W>, GraphError> {
    let raw: RawDocument<W> = serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    let ids: Vec<String> = raw.vertices.iter().map(|v| v.id.clone()).collect();
    let mut lookup = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if lookup.insert(id.as_str(), i).is_some() {
            return Err(GraphError::DuplicateVertex(id.clone()));
        }
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        let from = *lookup.get(e.from.as_str()).ok_or_else(|| GraphError::UndeclaredVertex(e.from.clone()))?;
        let to = *lookup.get(e.to.as_str()).ok_or_else(|| GraphError::UndeclaredVertex(e.to.clone()))?;
        edges.push(Edge { from, weight: e.weight, to });
    }
    let graph = LabeledGraph::new(ids, edges)?;
    match mode {
        ParseMode::Graph => Ok(Document::Graph(graph)),
        ParseMode::Arena => {
            let mut owners = Vec::with_capacity(raw.vertices.len());
            for v in &raw.vertices {
                let tag = v.owner.as_deref().ok_or_else(|| GraphError::MissingOwner(v.id.clone()))?;
                let player = Player::from_tag(tag)
                    .ok_or_else(|| GraphError::UnknownOwner { vertex: v.id.clone(), tag: tag.to_string() })?;
                owners.push(player);
            }
            Ok(Document::Arena(Arena::new(graph, owners)?))
        }
    }
}

pub fn parse_graph<W: Weight>(text: &str) -> Result<LabeledGraph<W>, GraphError> {
    match parse_labeled_graph(text, ParseMode::Graph)? {
        Document::Graph(g) => Ok(g),
        Document::Arena(a) => Ok(a.graph),
    }
}

pub fn parse_arena<W: Weight>(text: &str) -> Result<Arena<W>, GraphError> {
    match parse_labeled_graph(text, ParseMode::Arena)? {
        Document::Arena(a) => Ok(a),
        Document::Graph(_) => unreachable!("arena mode yields arenas"),
    }
}

pub(crate) fn dot_id(id: &str) -> String {
    let plain = !id.is_empty()
        && !id.starts_with(|c: char| c.is_ascii_digit())
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    let numeral = !id.is_empty() && id.chars().all(|c| c.is_ascii_digit());
    if plain || numeral {
        id.to_string()
    } else {
        format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn render_dot<W: Weight>(graph: &LabeledGraph<W>, owners: Option<&[Player]>) -> String {
    let mut out = String::from("digraph {\n");
    if let Some(owners) = owners {
        for (v, id) in graph.ids().iter().enumerate() {
            let shape = match owners[v] {
                Player::Eve => "circle",
                Player::Adam => "square",
            };
            let _ = writeln!(out, "  {} [shape={}];", dot_id(id), shape);
        }
    } else {
        for id in graph.ids() {
            let _ = writeln!(out, "  {};", dot_id(id));
        }
    }
    for e in graph.edges() {
        let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", dot_id(graph.id(e.from)), dot_id(graph.id(e.to)), e.weight);
    }
    out.push_str("}\n");
    out
}

/// Running sums `w_0`, `w_0 + w_1`, ... of a finite weight word.
pub fn prefix_sums<W: Weight>(word: &[W]) -> Result<Vec<W>, Overflow> {
    let mut acc = W::zero();
    word.iter()
        .map(|&w| {
            acc = acc.checked_add(&w).ok_or(Overflow)?;
            Ok(acc)
        })
        .collect()
}
