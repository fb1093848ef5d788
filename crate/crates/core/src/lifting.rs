//! Least fixpoint lifting of tuple-valued measures.
//!
//! Each vertex carries a tuple of a fragment window or `Top`. An edge
//! `v -w-> t` is respected when `μ(v) -w-> μ(t)` is an edge of the universal
//! graph. `Min` vertices need one respected edge, `Max` vertices need all of
//! them. Starting from the empty tuple everywhere (or from given seeds), a
//! vertex is repeatedly raised to the least value that satisfies its own
//! constraint; the result is the least such labelling.

use std::collections::VecDeque;

use crate::cycles::WideEdge;
use crate::universal::{EdgeRule, FragmentBounds, OrdTuple};

/// A measure value: a tuple of the window, or the top element above all of them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Tuple(OrdTuple),
    Top,
}

impl Level {
    pub fn is_top(&self) -> bool {
        matches!(self, Level::Top)
    }

    pub fn tuple(&self) -> Option<&OrdTuple> {
        match self {
            Level::Tuple(t) => Some(t),
            Level::Top => None,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Tuple(t) => t.fmt(f),
            Level::Top => f.write_str("TOP"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// needs one respected edge
    Min,
    /// needs every edge respected
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lifting did not stabilise within {0} lifts")]
pub struct StepLimit(pub u64);

pub const DEFAULT_LIFT_LIMIT: u64 = 20_000_000;

/// Fixed lifting problem over vertices `0..n`.
pub struct Lifter<'a> {
    n: usize,
    edges: &'a [WideEdge],
    out: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    roles: &'a [Role],
    bounds: FragmentBounds,
    rule: EdgeRule,
}

impl<'a> Lifter<'a> {
    pub fn new(n: usize, edges: &'a [WideEdge], roles: &'a [Role], bounds: FragmentBounds, rule: EdgeRule) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut preds = vec![Vec::new(); n];
        for (i, &(u, _, v)) in edges.iter().enumerate() {
            out[u].push(i);
            if !preds[v].contains(&u) {
                preds[v].push(u);
            }
        }
        Lifter { n, edges, out, preds, roles, bounds, rule }
    }

    /// Least source for edge `e` given the current value of its target.
    pub fn candidate(&self, e: usize, values: &[Level]) -> Level {
        let (_, w, t) = self.edges[e];
        match &values[t] {
            Level::Top => Level::Top,
            Level::Tuple(target) => match self.bounds.least_source(self.rule, w, target) {
                Some(u) => Level::Tuple(u),
                None => Level::Top,
            },
        }
    }

    /// A self-loop whose least-source map is strictly increasing can never be respected.
    fn inflationary_loop(&self, e: usize) -> bool {
        let (u, w, v) = self.edges[e];
        u == v
            && match self.rule {
                EdgeRule::Strict => w <= 0,
                EdgeRule::LengthOnly => w < 0,
            }
    }

    fn requirement(&self, v: usize, values: &[Level]) -> Level {
        let edges = &self.out[v];
        if edges.is_empty() {
            return Level::Tuple(OrdTuple::empty());
        }
        match self.roles[v] {
            Role::Min => edges
                .iter()
                .filter(|&&e| !self.inflationary_loop(e))
                .map(|&e| self.candidate(e, values))
                .min()
                .unwrap_or(Level::Top),
            Role::Max => {
                if edges.iter().any(|&e| self.inflationary_loop(e)) {
                    return Level::Top;
                }
                edges.iter().map(|&e| self.candidate(e, values)).max().expect("nonempty")
            }
        }
    }

    /// Least fixpoint above the initial labelling: `Top` where `seed_top` is set, `()` elsewhere.
    pub fn solve(&self, seed_top: Option<&[bool]>, limit: u64) -> Result<Vec<Level>, StepLimit> {
        let mut values: Vec<Level> = (0..self.n)
            .map(|v| match seed_top {
                Some(seed) if seed[v] => Level::Top,
                _ => Level::Tuple(OrdTuple::empty()),
            })
            .collect();
        let mut queue: VecDeque<usize> = (0..self.n).collect();
        let mut queued = vec![true; self.n];
        let mut lifts = 0u64;
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            if values[v].is_top() {
                continue;
            }
            let need = self.requirement(v, &values);
            if need > values[v] {
                lifts += 1;
                if lifts > limit {
                    return Err(StepLimit(limit));
                }
                values[v] = need;
                for &p in &self.preds[v] {
                    if !queued[p] {
                        queued[p] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
        Ok(values)
    }

    /// For a `Min` vertex with a finite value: the respected edge with the least
    /// candidate, ties broken by edge position.
    pub fn best_edge(&self, v: usize, values: &[Level]) -> Option<usize> {
        self.out[v]
            .iter()
            .map(|&e| (self.candidate(e, values), e))
            .filter(|(c, _)| !c.is_top() && *c <= values[v])
            .min()
            .map(|(_, e)| e)
    }
}
