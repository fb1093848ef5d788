//! Three independent solvers for sum-to-infinity games, all returning
//! positional strategies that are re-checked by [`verify_certificate`].
//!
//! - `brute` enumerates positional strategies of both players.
//! - `energy` rescales weights to `|V|·w - 1` and solves an energy game by
//!   progress-measure lifting; Adam's side is the dual energy game on `-w`.
//! - `umeasure` lifts measures valued in a window of the universal graph.
//!   Adam's region and strategy come from the dual energy game, and may be
//!   used to seed the lifting (see [`Seeding`]).
//!
//! Each solver can be run with a weakened winning condition (cycles `>= 0`
//! instead of `>= 1`). The certificate checker is never weakened, so a
//! weakened solver is caught as soon as the two conditions differ.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::cycles::{find_cycle, vertices_reaching_cycle, CycleBound, WideEdge};
use crate::energy::EnergyLifter;
use crate::graph::{dot_id, Arena, EdgeId, Player, VertexId};
use crate::lifting::{Level, Lifter, Role, StepLimit, DEFAULT_LIFT_LIMIT};
use crate::morphism::{default_bounds, MAX_DOUBLINGS};
use crate::objective::wide_edges;
use crate::universal::{EdgeRule, FragmentBounds};
use crate::weight::{mul_wide, Overflow, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Brute,
    Energy,
    UMeasure,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Brute, Method::Energy, Method::UMeasure];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Energy => "energy",
            Method::UMeasure => "umeasure",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

/// Which cycles a solver treats as good for Eve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// weight `>= 1`: the actual objective
    #[default]
    Positive,
    /// weight `>= 0`: a deliberately wrong variant, for mutation testing
    NonNegative,
}

/// Whether `umeasure` starts Adam's certified vertices at `TOP`.
///
/// Seeding is exact (those vertices have no finite measure) and avoids the
/// long climb of losing vertices through the window. `Auto` lifts unseeded
/// when the default window is small and seeds otherwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Seeding {
    #[default]
    Auto,
    Never,
    Always,
}

/// Default windows up to this many tuples are lifted without seeding under `Auto`.
pub const UNSEEDED_WINDOW: u128 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub criterion: Criterion,
    /// `umeasure` window; defaults from the arena size and weights.
    pub bounds: Option<FragmentBounds>,
    pub seeding: Seeding,
}

pub const BRUTE_MAX_VERTICES: usize = 8;
pub const BRUTE_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("brute force needs at most {BRUTE_MAX_VERTICES} vertices per player with out-degree at most {BRUTE_MAX_DEGREE} ({player:?} has {vertices} vertices, max out-degree {degree})")]
    Guard { player: Player, vertices: usize, degree: usize },
    #[error("no single positional strategy of {0:?} wins on its whole winning region")]
    TheoremViolation(Player),
    #[error("vertex {0} is claimed by both or neither player")]
    NotPartition(VertexId),
    #[error("the tuple measure still has TOP on Eve's region at length {} and coordinates below {}", .0.max_len, .0.max_coord)]
    BoundExceeded(FragmentBounds),
    #[error("{player:?}'s certificate was rejected (cycle through edges {witness:?})")]
    CertificateRejected { player: Player, witness: Vec<EdgeId> },
    #[error(transparent)]
    Certificate(#[from] CertError),
    #[error(transparent)]
    StepLimit(#[from] StepLimit),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// One edge per vertex of `player`; `None` on the other player's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub player: Player,
    pub choice: Vec<Option<EdgeId>>,
}

impl PositionalStrategy {
    /// `choice` for the player's vertices falls back to their first out-edge.
    fn complete<W: Weight>(arena: &Arena<W>, player: Player, mut choice: Vec<Option<EdgeId>>) -> Self {
        for (v, slot) in choice.iter_mut().enumerate() {
            if arena.owner(v) != player {
                *slot = None;
            } else if slot.is_none() {
                *slot = Some(arena.graph().out_edges(v)[0]);
            }
        }
        PositionalStrategy { player, choice }
    }

    pub fn to_json<W: Weight>(&self, arena: &Arena<W>) -> Value {
        let mut map = Map::new();
        for (v, c) in self.choice.iter().enumerate() {
            if let Some(e) = c {
                map.insert(arena.graph().id(v).to_string(), json!(e));
            }
        }
        Value::Object(map)
    }

    /// Reads `{"vertex": edge index, ...}`.
    pub fn from_json<W: Weight>(arena: &Arena<W>, player: Player, value: &Value) -> Result<Self, CertError> {
        let object = value.as_object().ok_or_else(|| CertError::Malformed("expected an object".into()))?;
        let mut choice = vec![None; arena.vertex_count()];
        for (id, e) in object {
            let v = arena.graph().index_of(id).ok_or_else(|| CertError::Malformed(format!("unknown vertex {id:?}")))?;
            let e = e
                .as_u64()
                .and_then(|e| usize::try_from(e).ok())
                .ok_or_else(|| CertError::Malformed(format!("edge index for {id:?} must be a natural number")))?;
            choice[v] = Some(e);
        }
        Ok(PositionalStrategy { player, choice })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertVerdict {
    Valid,
    /// A reachable cycle breaking the player's condition.
    Invalid(Vec<EdgeId>),
}

impl CertVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CertVerdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("strategy has no choice at vertex {0}")]
    Incomplete(VertexId),
    #[error("edge {edge} chosen at vertex {vertex} does not leave it")]
    ForeignEdge { vertex: VertexId, edge: EdgeId },
    #[error("malformed strategy: {0}")]
    Malformed(String),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// Edges kept once `strategy` fixes its player's moves.
fn restricted_edges<W: Weight>(arena: &Arena<W>, strategy: &PositionalStrategy) -> Result<Vec<EdgeId>, CertError> {
    let graph = arena.graph();
    let mut kept = Vec::with_capacity(graph.edge_count());
    for v in 0..arena.vertex_count() {
        if arena.owner(v) == strategy.player {
            let e = strategy.choice.get(v).copied().flatten().ok_or(CertError::Incomplete(v))?;
            if e >= graph.edge_count() || graph.edge(e).from != v {
                return Err(CertError::ForeignEdge { vertex: v, edge: e });
            }
            kept.push(e);
        } else {
            kept.extend_from_slice(graph.out_edges(v));
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Independent check of a positional certificate.
///
/// Eve's strategy is valid on `region` when every cycle reachable from it in
/// the strategy subgraph has weight `>= 1`; Adam's when every such cycle has
/// weight `<= 0`. In either case every play from the region is won by the
/// strategy's owner, whatever the opponent does.
pub fn verify_certificate<W: Weight>(
    arena: &Arena<W>,
    strategy: &PositionalStrategy,
    region: &[bool],
) -> Result<CertVerdict, CertError> {
    let graph = arena.graph();
    let kept = restricted_edges(arena, strategy)?;
    let sources = (0..arena.vertex_count()).filter(|&v| region[v]);
    let reach = graph.reachable_from(sources, |e| kept.binary_search(&e).is_ok());
    let local: Vec<EdgeId> = kept.into_iter().filter(|&e| reach[graph.edge(e).from]).collect();
    let sign = match strategy.player {
        Player::Eve => 1,
        Player::Adam => -1,
    };
    let wide: Vec<WideEdge> = local
        .iter()
        .map(|&e| {
            let edge = graph.edge(e);
            (edge.from, sign * edge.weight.wide(), edge.to)
        })
        .collect();
    // Eve fails on a cycle <= 0; Adam fails on a cycle >= 1, i.e. negated <= -1
    let bound = match strategy.player {
        Player::Eve => CycleBound::NonPositive,
        Player::Adam => CycleBound::Negative,
    };
    Ok(match find_cycle(arena.vertex_count(), &wide, bound)? {
        None => CertVerdict::Valid,
        Some(cycle) => CertVerdict::Invalid(cycle.into_iter().map(|i| local[i]).collect()),
    })
}

/// Least tuple measure computed by `umeasure`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UMeasure {
    pub assignment: Vec<Level>,
    pub bounds: FragmentBounds,
    /// Whether Adam's certified vertices started at `TOP`.
    pub seeded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub method: Method,
    pub criterion: Criterion,
    pub eve_region: Vec<bool>,
    pub eve_strategy: PositionalStrategy,
    pub adam_strategy: PositionalStrategy,
    pub eve_certificate: CertVerdict,
    pub adam_certificate: CertVerdict,
    pub measure: Option<UMeasure>,
}

impl Solution {
    pub fn eve_vertices(&self) -> Vec<VertexId> {
        (0..self.eve_region.len()).filter(|&v| self.eve_region[v]).collect()
    }

    pub fn adam_vertices(&self) -> Vec<VertexId> {
        (0..self.eve_region.len()).filter(|&v| !self.eve_region[v]).collect()
    }

    pub fn adam_region(&self) -> Vec<bool> {
        self.eve_region.iter().map(|&b| !b).collect()
    }

    pub fn to_json<W: Weight>(&self, arena: &Arena<W>) -> Value {
        let graph = arena.graph();
        let ids = |vs: Vec<VertexId>| vs.into_iter().map(|v| graph.id(v).to_string()).collect::<Vec<_>>();
        let verdict = |c: &CertVerdict| match c {
            CertVerdict::Valid => json!("valid"),
            CertVerdict::Invalid(cycle) => json!({ "invalid": cycle }),
        };
        let mut doc = json!({
            "method": self.method.tag(),
            "eve_region": ids(self.eve_vertices()),
            "adam_region": ids(self.adam_vertices()),
            "eve_strategy": self.eve_strategy.to_json(arena),
            "adam_strategy": self.adam_strategy.to_json(arena),
            "certificates": { "eve": verdict(&self.eve_certificate), "adam": verdict(&self.adam_certificate) },
            "tie_break": "least (measure, edge index)",
        });
        if let Some(m) = &self.measure {
            let mut values = Map::new();
            for (v, l) in m.assignment.iter().enumerate() {
                values.insert(graph.id(v).to_string(), json!(l.to_string()));
            }
            doc["measure"] = json!({
                "assignment": values,
                "max_len": m.bounds.max_len,
                "max_coord": m.bounds.max_coord,
                "seeded": m.seeded,
            });
        }
        doc
    }

    /// Arena drawing with Eve's region filled and chosen edges in bold.
    pub fn to_dot<W: Weight>(&self, arena: &Arena<W>) -> String {
        let graph = arena.graph();
        let mut out = String::from("digraph {\n");
        for v in 0..arena.vertex_count() {
            let shape = match arena.owner(v) {
                Player::Eve => "circle",
                Player::Adam => "square",
            };
            let fill = if self.eve_region[v] { "lightblue" } else { "lightpink" };
            let _ = writeln!(out, "  {} [shape={shape}, style=filled, fillcolor={fill}];", dot_id(graph.id(v)));
        }
        for (e, edge) in graph.edges().iter().enumerate() {
            let chosen =
                self.eve_strategy.choice[edge.from] == Some(e) || self.adam_strategy.choice[edge.from] == Some(e);
            let style = if chosen { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"{style}];",
                dot_id(graph.id(edge.from)),
                dot_id(graph.id(edge.to)),
                edge.weight
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn solve<W: Weight>(arena: &Arena<W>, method: Method) -> Result<Solution, SolveError> {
    solve_with(arena, method, &SolveOptions::default())
}

pub fn solve_with<W: Weight>(arena: &Arena<W>, method: Method, options: &SolveOptions) -> Result<Solution, SolveError> {
    let raw = match method {
        Method::Brute => brute(arena, options.criterion)?,
        Method::Energy => energy(arena, options.criterion)?,
        Method::UMeasure => umeasure(arena, options)?,
    };
    let eve_region = raw.eve_region;
    let adam_region: Vec<bool> = eve_region.iter().map(|&b| !b).collect();
    let eve_certificate = verify_certificate(arena, &raw.eve_strategy, &eve_region)?;
    if let CertVerdict::Invalid(witness) = &eve_certificate {
        return Err(SolveError::CertificateRejected { player: Player::Eve, witness: witness.clone() });
    }
    let adam_certificate = verify_certificate(arena, &raw.adam_strategy, &adam_region)?;
    if let CertVerdict::Invalid(witness) = &adam_certificate {
        return Err(SolveError::CertificateRejected { player: Player::Adam, witness: witness.clone() });
    }
    Ok(Solution {
        method,
        criterion: options.criterion,
        eve_region,
        eve_strategy: raw.eve_strategy,
        adam_strategy: raw.adam_strategy,
        eve_certificate,
        adam_certificate,
        measure: raw.measure,
    })
}

struct Raw {
    eve_region: Vec<bool>,
    eve_strategy: PositionalStrategy,
    adam_strategy: PositionalStrategy,
    measure: Option<UMeasure>,
}

/// Regions must be complementary.
fn partition(eve: &[bool], adam: &[bool]) -> Result<(), SolveError> {
    match (0..eve.len()).find(|&v| eve[v] == adam[v]) {
        Some(v) => Err(SolveError::NotPartition(v)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------- brute

/// Cycles bad for `player` under `criterion`, after negating Adam's view.
fn losing_bound(player: Player, criterion: Criterion) -> (i128, CycleBound) {
    match (player, criterion) {
        // Eve loses on cycles <= 0 (resp. < 0)
        (Player::Eve, Criterion::Positive) => (1, CycleBound::NonPositive),
        (Player::Eve, Criterion::NonNegative) => (1, CycleBound::Negative),
        // Adam loses on cycles >= 1 (resp. >= 0): negated, <= -1 (resp. <= 0)
        (Player::Adam, Criterion::Positive) => (-1, CycleBound::Negative),
        (Player::Adam, Criterion::NonNegative) => (-1, CycleBound::NonPositive),
    }
}

/// For every positional strategy of `player`, the vertices it wins from.
/// Returns the union and the first strategy winning on all of it.
fn brute_player<W: Weight>(
    arena: &Arena<W>,
    player: Player,
    criterion: Criterion,
) -> Result<(Vec<bool>, PositionalStrategy), SolveError> {
    let graph = arena.graph();
    let n = arena.vertex_count();
    let mine: Vec<VertexId> = (0..n).filter(|&v| arena.owner(v) == player).collect();
    let degree = mine.iter().map(|&v| graph.out_edges(v).len()).max().unwrap_or(0);
    if mine.len() > BRUTE_MAX_VERTICES || degree > BRUTE_MAX_DEGREE {
        return Err(SolveError::Guard { player, vertices: mine.len(), degree });
    }
    let (sign, bound) = losing_bound(player, criterion);
    let fixed: Vec<WideEdge> = (0..n)
        .filter(|&v| arena.owner(v) != player)
        .flat_map(|v| graph.out_edges(v).iter().copied())
        .map(|e| {
            let edge = graph.edge(e);
            (edge.from, sign * edge.weight.wide(), edge.to)
        })
        .collect();

    let mut digits = vec![0usize; mine.len()];
    let mut wins: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    let mut union = vec![false; n];
    loop {
        let mut edges = fixed.clone();
        for (i, &v) in mine.iter().enumerate() {
            let edge = graph.edge(graph.out_edges(v)[digits[i]]);
            edges.push((edge.from, sign * edge.weight.wide(), edge.to));
        }
        let losing = vertices_reaching_cycle(n, &edges, bound)?;
        let won: Vec<bool> = losing.iter().map(|&b| !b).collect();
        for v in 0..n {
            union[v] |= won[v];
        }
        wins.push((digits.clone(), won));
        // odometer over the choices, first vertex fastest
        let mut i = 0;
        loop {
            if i == mine.len() {
                let uniform = wins
                    .iter()
                    .find(|(_, won)| (0..n).all(|v| !union[v] || won[v]))
                    .ok_or(SolveError::TheoremViolation(player))?;
                let mut choice = vec![None; n];
                for (i, &v) in mine.iter().enumerate() {
                    choice[v] = Some(graph.out_edges(v)[uniform.0[i]]);
                }
                return Ok((union, PositionalStrategy { player, choice }));
            }
            digits[i] += 1;
            if digits[i] < graph.out_edges(mine[i]).len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn brute<W: Weight>(arena: &Arena<W>, criterion: Criterion) -> Result<Raw, SolveError> {
    let (eve_region, eve_strategy) = brute_player(arena, Player::Eve, criterion)?;
    let (adam_region, adam_strategy) = brute_player(arena, Player::Adam, criterion)?;
    partition(&eve_region, &adam_region)?;
    Ok(Raw { eve_region, eve_strategy, adam_strategy, measure: None })
}

// ---------------------------------------------------------------- energy

/// Energy game in which `player` must keep every cycle `>= 0` after the
/// weights are transformed; returns the winning region and strategy.
fn energy_player<W: Weight>(
    arena: &Arena<W>,
    player: Player,
    criterion: Criterion,
) -> Result<(Vec<bool>, PositionalStrategy), SolveError> {
    let graph = arena.graph();
    let n = arena.vertex_count();
    let scale = n as i128;
    // a cycle of at most n edges has weight >= 1 iff its weight n·w - 1 rescaled is >= 0
    let strict = |w: i128| -> Result<i128, Overflow> { mul_wide(scale, w)?.checked_sub(1).ok_or(Overflow) };
    let transform = |w: i128| -> Result<i128, Overflow> {
        match (player, criterion) {
            (Player::Eve, Criterion::Positive) => strict(w),
            (Player::Eve, Criterion::NonNegative) => Ok(w),
            (Player::Adam, Criterion::Positive) => Ok(-w),
            (Player::Adam, Criterion::NonNegative) => strict(-w),
        }
    };
    let edges: Vec<WideEdge> =
        wide_edges(graph).into_iter().map(|(u, w, v)| Ok((u, transform(w)?, v))).collect::<Result<_, Overflow>>()?;
    let roles: Vec<Role> = (0..n).map(|v| if arena.owner(v) == player { Role::Min } else { Role::Max }).collect();
    let lifter = EnergyLifter::new(n, &edges, &roles)?;
    let values = lifter.solve()?;
    let region: Vec<bool> = values.iter().map(Option::is_some).collect();
    let mut choice = vec![None; n];
    for v in 0..n {
        if arena.owner(v) == player && region[v] {
            choice[v] = lifter.best_edge(v, &values)?;
        }
    }
    Ok((region, PositionalStrategy::complete(arena, player, choice)))
}

fn energy<W: Weight>(arena: &Arena<W>, criterion: Criterion) -> Result<Raw, SolveError> {
    let (eve_region, eve_strategy) = energy_player(arena, Player::Eve, criterion)?;
    let (adam_region, adam_strategy) = energy_player(arena, Player::Adam, criterion)?;
    partition(&eve_region, &adam_region)?;
    Ok(Raw { eve_region, eve_strategy, adam_strategy, measure: None })
}

// ---------------------------------------------------------------- umeasure

fn umeasure<W: Weight>(arena: &Arena<W>, options: &SolveOptions) -> Result<Raw, SolveError> {
    let graph = arena.graph();
    let n = arena.vertex_count();
    let (adam_region, adam_strategy) = energy_player(arena, Player::Adam, options.criterion)?;
    let rule = match options.criterion {
        Criterion::Positive => EdgeRule::Strict,
        Criterion::NonNegative => EdgeRule::LengthOnly,
    };
    let edges = wide_edges(graph);
    let roles: Vec<Role> = (0..n).map(|v| if arena.owner(v) == Player::Eve { Role::Min } else { Role::Max }).collect();
    let start = options.bounds.unwrap_or_else(|| default_bounds(n, graph.max_abs_weight()));
    let mut seeded = match options.seeding {
        Seeding::Always => true,
        Seeding::Never => false,
        Seeding::Auto => start.tuple_count() > UNSEEDED_WINDOW,
    };
    let mut bounds = start;
    let mut attempt = 0;
    loop {
        let lifter = Lifter::new(n, &edges, &roles, bounds, rule);
        let seed = seeded.then_some(adam_region.as_slice());
        let lifted = lifter.solve(seed, DEFAULT_LIFT_LIMIT);
        let values = match lifted {
            Ok(values) => values,
            // an unseeded climb that runs too long is retried seeded
            Err(_) if !seeded && options.seeding == Seeding::Auto => {
                seeded = true;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let eve_region: Vec<bool> = values.iter().map(|l| !l.is_top()).collect();
        // a finite measure certifies Eve, so it can never meet Adam's region
        if let Some(v) = (0..n).find(|&v| eve_region[v] && adam_region[v]) {
            return Err(SolveError::NotPartition(v));
        }
        if eve_region.iter().zip(&adam_region).all(|(&e, &a)| e != a) {
            let mut choice = vec![None; n];
            for v in 0..n {
                if arena.owner(v) == Player::Eve && eve_region[v] {
                    choice[v] = lifter.best_edge(v, &values);
                }
            }
            return Ok(Raw {
                eve_region,
                eve_strategy: PositionalStrategy::complete(arena, Player::Eve, choice),
                adam_strategy,
                measure: Some(UMeasure { assignment: values, bounds, seeded }),
            });
        }
        if !seeded && options.seeding == Seeding::Auto {
            seeded = true;
            continue;
        }
        if attempt == MAX_DOUBLINGS {
            return Err(SolveError::BoundExceeded(bounds));
        }
        attempt += 1;
        bounds = bounds.doubled();
    }
}
