//! Solvers, universal-graph constructions and certificates for the
//! sum-to-infinity objective on finite weighted game graphs.
//!
//! A play wins for Eve when the running sum of its edge weights tends to
//! `+∞`. The crate provides
//!
//! - [`graph`]: graphs, arenas and their JSON / DOT encodings,
//! - [`objective`]: the objective on finite graphs and ultimately periodic words,
//! - [`universal`]: the universal graph over tuples of naturals and its finite windows,
//! - [`morphism`]: n-values, tight edges, rank tuples and morphism checking,
//! - [`solver`]: three independent game solvers with positional certificates,
//! - [`harness`]: exhaustive and seeded campaigns certifying positional determinacy.
//!
//! Everything is generic over the integer weight type ([`Weight`]); the
//! aliases below fix it to `i64`, which is what the command-line tool uses.

pub mod cycles;
pub mod energy;
pub mod figure1;
pub mod graph;
pub mod harness;
pub mod lifting;
pub mod morphism;
pub mod objective;
pub mod solver;
pub mod universal;
pub mod weight;

pub use graph::{Arena, Edge, EdgeId, GraphError, LabeledGraph, ParseMode, Player, VertexId};
pub use universal::{is_edge, lex_gt, order_gt, FragmentBounds, OrdTuple};
pub use weight::{Overflow, Weight};

pub type Graph = LabeledGraph<i64>;
pub type GameArena = Arena<i64>;
pub type Fragment = universal::Fragment<i64>;
pub type NMap = morphism::NMap<i64>;

/// Environment variable overriding the fragment / enumeration size guards.
pub const SIZE_CAP_VAR: &str = "SUMGAMES_SIZE_CAP";

/// Default guard on the vertex count of materialized fragments.
pub const DEFAULT_FRAGMENT_CAP: u128 = 200_000;

/// Default guard on the number of arenas in an exhaustive campaign.
pub const DEFAULT_ARENA_CAP: u128 = 2_000_000;

fn cap_override() -> Option<u128> {
    std::env::var(SIZE_CAP_VAR).ok().and_then(|v| v.trim().parse().ok())
}

/// Fragment guard in effect: `SUMGAMES_SIZE_CAP` when set to a number, the default otherwise.
pub fn fragment_cap() -> u128 {
    cap_override().unwrap_or(DEFAULT_FRAGMENT_CAP)
}

/// Campaign guard in effect: `SUMGAMES_SIZE_CAP` when set to a number, the default otherwise.
pub fn arena_cap() -> u128 {
    cap_override().unwrap_or(DEFAULT_ARENA_CAP)
}
