//! The sum-to-infinity objective on finite structures.
//!
//! A word belongs to the objective when its running sums diverge to `+∞`.
//! Finite graphs and ultimately periodic words are the only representations
//! used: on a finite graph every infinite path diverges exactly when every
//! cycle has weight at least 1, and `p·q^ω` diverges exactly when `q` sums
//! to at least 1.

use serde_json::{json, Value};

use crate::cycles::{find_cycle, CycleBound, WideEdge};
use crate::graph::{EdgeId, LabeledGraph};
use crate::weight::{add_wide, Overflow, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfactionVerdict {
    pub satisfies: bool,
    /// A cycle of total weight `<= 0`, present exactly when `satisfies` is false.
    pub witness: Option<Vec<EdgeId>>,
}

impl SatisfactionVerdict {
    pub fn to_json<W: Weight>(&self, graph: &LabeledGraph<W>) -> Value {
        let witness = self.witness.as_ref().map(|c| Value::Array(c.iter().map(|&e| graph.edge_json(e)).collect()));
        json!({ "satisfies": self.satisfies, "witness": witness })
    }
}

pub(crate) fn wide_edges<W: Weight>(graph: &LabeledGraph<W>) -> Vec<WideEdge> {
    graph.edges().iter().map(|e| (e.from, e.weight.wide(), e.to)).collect()
}

/// Decides whether every infinite path of `graph` has running sums tending to `+∞`.
pub fn satisfies<W: Weight>(graph: &LabeledGraph<W>) -> Result<SatisfactionVerdict, Overflow> {
    let edges = wide_edges(graph);
    let witness = find_cycle(graph.vertex_count(), &edges, CycleBound::NonPositive)?;
    Ok(SatisfactionVerdict { satisfies: witness.is_none(), witness })
}

pub fn cycle_weight<W: Weight>(graph: &LabeledGraph<W>, cycle: &[EdgeId]) -> Result<i128, Overflow> {
    cycle.iter().try_fold(0i128, |acc, &e| add_wide(acc, graph.edge(e).weight.wide()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("the repeated block of an ultimately periodic word must be nonempty")]
    EmptyCycle,
    #[error("the input sequence must be nonempty")]
    EmptyInput,
    #[error("entry {0} is negative; a sequence of naturals was expected")]
    NotNatural(usize),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// Membership of the ultimately periodic word `prefix · cycle^ω`.
///
/// The prefix is never inspected: the objective is prefix-independent.
pub fn membership_up<W: Weight>(_prefix: &[W], cycle: &[W]) -> Result<bool, WordError> {
    if cycle.is_empty() {
        return Err(WordError::EmptyCycle);
    }
    let total = cycle.iter().try_fold(0i128, |acc, w| add_wide(acc, w.wide()))?;
    Ok(total >= 1)
}

/// Maps `c_0 c_1 … c_k` to the difference word `w_i = c_{i+1} - c_i`.
pub fn reduce_finocc<W: Weight>(naturals: &[W]) -> Result<Vec<W>, WordError> {
    if naturals.is_empty() {
        return Err(WordError::EmptyInput);
    }
    if let Some(i) = naturals.iter().position(|c| c.is_negative()) {
        return Err(WordError::NotNatural(i));
    }
    naturals.windows(2).map(|pair| pair[1].checked_sub(&pair[0]).ok_or(WordError::Overflow(Overflow))).collect()
}
