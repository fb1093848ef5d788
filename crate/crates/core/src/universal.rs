//! The universal graph over finite tuples of naturals.
//!
//! Vertices are tuples `u`; there is an edge `u -w-> u'` when
//! `|u| + w >= |u'|`, and in case of equality `u` must be strictly
//! lexicographically above `u'` (where a proper prefix is smaller). Tuples
//! are ordered first by length, then lexicographically. Only finite windows
//! of the graph are ever materialized: tuples of length at most `max_len`
//! whose coordinates are below `max_coord`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::graph::{Edge, GraphError, LabeledGraph};
use crate::weight::Weight;

/// A vertex of the universal graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OrdTuple(pub Vec<u32>);

impl OrdTuple {
    pub fn empty() -> Self {
        OrdTuple(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// `u_{<i}`: the first `i` coordinates.
    pub fn restrict(&self, i: usize) -> &[u32] {
        &self.0[..i.min(self.0.len())]
    }
}

impl From<Vec<u32>> for OrdTuple {
    fn from(v: Vec<u32>) -> Self {
        OrdTuple(v)
    }
}

impl<const N: usize> From<[u32; N]> for OrdTuple {
    fn from(v: [u32; N]) -> Self {
        OrdTuple(v.to_vec())
    }
}

impl fmt::Display for OrdTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse tuple {0:?}; expected forms like (), (0) or (0,2)")]
pub struct TupleSyntaxError(pub String);

impl FromStr for OrdTuple {
    type Err = TupleSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TupleSyntaxError(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(err)?;
        if inner.trim().is_empty() {
            return Ok(OrdTuple::empty());
        }
        inner
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()
            .map(OrdTuple)
    }
}

/// `u >_lex u'`: `u'` is a proper prefix of `u`, or at the first coordinate
/// where they differ `u` is larger.
pub fn lex_gt(u: &OrdTuple, other: &OrdTuple) -> bool {
    let (a, b) = (u.coords(), other.coords());
    if b.len() < a.len() && a[..b.len()] == *b {
        return true;
    }
    for i in 0..a.len().min(b.len()) {
        if a[..i] == b[..i] && a[i] > b[i] {
            return true;
        }
        if a[i] != b[i] {
            return false;
        }
    }
    false
}

/// Strict order of the universal graph: longer is larger, equal lengths compare lexicographically.
pub fn order_gt(u: &OrdTuple, other: &OrdTuple) -> bool {
    u.len() > other.len() || (u.len() == other.len() && lex_gt(u, other))
}

impl Ord for OrdTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for OrdTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Edge predicate used when labelling into tuples.
///
/// `LengthOnly` drops the lexicographic side condition. It admits zero-weight
/// cycles and exists only as a deliberately broken control for mutation tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EdgeRule {
    #[default]
    Strict,
    LengthOnly,
}

impl EdgeRule {
    pub fn holds(self, u: &OrdTuple, w: i128, target: &OrdTuple) -> bool {
        let lhs = u.len() as i128 + w;
        let rhs = target.len() as i128;
        match self {
            EdgeRule::Strict => lhs > rhs || (lhs == rhs && lex_gt(u, target)),
            EdgeRule::LengthOnly => lhs >= rhs,
        }
    }
}

/// Edge relation of the universal graph.
pub fn is_edge<W: Weight>(u: &OrdTuple, w: W, target: &OrdTuple) -> bool {
    EdgeRule::Strict.holds(u, w.wide(), target)
}

/// Window of the universal graph: lengths `0..=max_len`, coordinates `< max_coord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FragmentBounds {
    pub max_len: usize,
    pub max_coord: u32,
}

impl FragmentBounds {
    pub fn new(max_len: usize, max_coord: u32) -> Self {
        FragmentBounds { max_len, max_coord }
    }

    pub fn contains(&self, u: &OrdTuple) -> bool {
        u.len() <= self.max_len && u.coords().iter().all(|&c| c < self.max_coord)
    }

    /// Number of tuples in the window, `Σ_{i ≤ max_len} max_coord^i`, saturating.
    pub fn tuple_count(&self) -> u128 {
        let b = self.max_coord as u128;
        let mut total: u128 = 0;
        let mut power: u128 = 1;
        for i in 0..=self.max_len {
            if i > 0 {
                power = power.saturating_mul(b);
            }
            if power == 0 {
                break;
            }
            total = total.saturating_add(power);
        }
        total
    }

    pub fn doubled(&self) -> Self {
        FragmentBounds {
            max_len: self.max_len.saturating_mul(2).max(1),
            max_coord: self.max_coord.saturating_mul(2).max(1),
        }
    }

    /// Least tuple of length `len` in the window (all zeros), if the window allows it.
    fn zeros(&self, len: usize) -> Option<OrdTuple> {
        (len <= self.max_len && (len == 0 || self.max_coord > 0)).then(|| OrdTuple(vec![0; len]))
    }

    /// Least tuple of the same length strictly above `prefix` in lex order,
    /// falling back to the zero tuple one longer.
    fn successor(&self, prefix: &[u32]) -> Option<OrdTuple> {
        let mut next = prefix.to_vec();
        for i in (0..next.len()).rev() {
            if next[i] + 1 < self.max_coord {
                next[i] += 1;
                for c in &mut next[i + 1..] {
                    *c = 0;
                }
                return Some(OrdTuple(next));
            }
        }
        self.zeros(prefix.len() + 1)
    }

    /// Least tuple `u` of the window with `u -w-> target` under `rule`,
    /// `None` when the window has no such tuple.
    ///
    /// The set of valid sources is upward closed (the graph is monotone), so
    /// this minimum determines all of them.
    pub fn least_source(&self, rule: EdgeRule, w: i128, target: &OrdTuple) -> Option<OrdTuple> {
        let len = match (target.len() as i128).checked_sub(w) {
            Some(len) if len < 0 => return self.zeros(0),
            Some(len) if len <= self.max_len as i128 => len as usize,
            _ => return None,
        };
        if rule == EdgeRule::LengthOnly {
            return self.zeros(len);
        }
        match len.cmp(&target.len()) {
            // target is a proper prefix of the padded tuple
            Ordering::Greater => {
                let mut coords = target.coords().to_vec();
                coords.resize(len, 0);
                let padded = OrdTuple(coords);
                self.contains(&padded).then_some(padded)
            }
            Ordering::Equal | Ordering::Less => {
                let found = self.successor(target.restrict(len))?;
                self.contains(&found).then_some(found)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FragmentError {
    #[error("fragment would have {count} vertices, above the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A finite window of the universal graph with weights from a fixed set.
#[derive(Clone, Debug)]
pub struct Fragment<W> {
    pub bounds: FragmentBounds,
    pub weights: Vec<W>,
    /// Vertices in ascending order; vertex `i` of `graph` is `tuples[i]`.
    pub tuples: Vec<OrdTuple>,
    pub graph: LabeledGraph<W>,
}

fn enumerate_tuples(bounds: FragmentBounds) -> Vec<OrdTuple> {
    let mut out = vec![OrdTuple::empty()];
    if bounds.max_coord == 0 {
        return out;
    }
    for len in 1..=bounds.max_len {
        let mut current = vec![0u32; len];
        'odometer: loop {
            out.push(OrdTuple(current.clone()));
            for i in (0..len).rev() {
                if current[i] + 1 < bounds.max_coord {
                    current[i] += 1;
                    for c in &mut current[i + 1..] {
                        *c = 0;
                    }
                    continue 'odometer;
                }
            }
            break;
        }
    }
    out
}

pub fn build_fragment<W: Weight>(max_len: usize, max_coord: u32, weights: &[W]) -> Result<Fragment<W>, FragmentError> {
    build_fragment_capped(max_len, max_coord, weights, crate::fragment_cap())
}

pub fn build_fragment_capped<W: Weight>(
    max_len: usize,
    max_coord: u32,
    weights: &[W],
    cap: u128,
) -> Result<Fragment<W>, FragmentError> {
    let bounds = FragmentBounds::new(max_len, max_coord);
    let count = bounds.tuple_count();
    if count > cap {
        return Err(FragmentError::TooLarge { count, cap });
    }
    let mut weights = weights.to_vec();
    weights.sort();
    weights.dedup();
    let tuples = enumerate_tuples(bounds);
    let mut edges = Vec::new();
    for (i, u) in tuples.iter().enumerate() {
        for &w in &weights {
            for (j, target) in tuples.iter().enumerate() {
                if is_edge(u, w, target) {
                    edges.push(Edge { from: i, weight: w, to: j });
                }
            }
        }
    }
    let ids = tuples.iter().map(|t| t.to_string()).collect();
    let graph = LabeledGraph::new(ids, edges)?;
    Ok(Fragment { bounds, weights, tuples, graph })
}

impl<W: Weight> Fragment<W> {
    pub fn index_of(&self, u: &OrdTuple) -> Option<usize> {
        self.tuples.binary_search(u).ok()
    }

    /// Copy of the fragment with one edge removed (negative control for the monotonicity check).
    pub fn without_edge(&self, from: &OrdTuple, w: W, to: &OrdTuple) -> Fragment<W> {
        let (i, j) = (self.index_of(from), self.index_of(to));
        let edges =
            self.graph.edges().iter().copied().filter(|e| !(Some(e.from) == i && e.weight == w && Some(e.to) == j));
        let graph = LabeledGraph::new(self.graph.ids().to_vec(), edges).expect("subset of a valid graph");
        Fragment { graph, ..self.clone() }
    }
}

/// `u >= v -w-> v' >= u'` without `u -w-> u'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation<W> {
    pub u: OrdTuple,
    pub v: OrdTuple,
    pub weight: W,
    pub v_next: OrdTuple,
    pub u_next: OrdTuple,
}

/// Exhaustive monotonicity check against the fragment's own edge set.
pub fn check_monotonicity<W: Weight>(fragment: &Fragment<W>) -> Result<(), MonotonicityViolation<W>> {
    let present: HashSet<(usize, W, usize)> = fragment.graph.edges().iter().map(|e| (e.from, e.weight, e.to)).collect();
    let n = fragment.tuples.len();
    for e in fragment.graph.edges() {
        // vertices are sorted ascending, so u >= v means index >= e.from
        for u in e.from..n {
            for u_next in 0..=e.to {
                if !present.contains(&(u, e.weight, u_next)) {
                    return Err(MonotonicityViolation {
                        u: fragment.tuples[u].clone(),
                        v: fragment.tuples[e.from].clone(),
                        weight: e.weight,
                        v_next: fragment.tuples[e.to].clone(),
                        u_next: fragment.tuples[u_next].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}
