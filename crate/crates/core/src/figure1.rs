//! Built-in worked example: a tree with a head chain `v0 -> r1 -> … -> r4`
//! and one descending row per head, each row ending in a vertex with a `+1`
//! self-loop.
//!
//! The head chain stops at `r4` and every row is closed by its loop. This
//! keeps every displayed n-value; the only effect of the truncation is on
//! the last coordinate of `r4`'s tuple, which is 4 here.

use crate::graph::LabeledGraph;

pub const VERTICES: [&str; 20] = [
    "v0", "r1", "r2", "r3", "r4", "x11", "x12", "x13", "x21", "x22", "x23", "x31", "x32", "x33", "x34", "x41", "x42",
    "x43", "x44", "x45",
];

pub const EDGES: [(&str, i64, &str); 23] = [
    ("v0", 2, "r1"),
    ("r1", 1, "r2"),
    ("r2", 1, "r3"),
    ("r3", 1, "r4"),
    ("r1", -1, "x11"),
    ("x11", 0, "x12"),
    ("x12", 1, "x13"),
    ("x13", 1, "x13"),
    ("r2", -1, "x21"),
    ("x21", -1, "x22"),
    ("x22", 0, "x23"),
    ("x23", 1, "x23"),
    ("r3", -1, "x31"),
    ("x31", -1, "x32"),
    ("x32", -1, "x33"),
    ("x33", 0, "x34"),
    ("x34", 1, "x34"),
    ("r4", -1, "x41"),
    ("x41", -1, "x42"),
    ("x42", -1, "x43"),
    ("x43", -1, "x44"),
    ("x44", 0, "x45"),
    ("x45", 1, "x45"),
];

pub fn fixture() -> LabeledGraph<i64> {
    LabeledGraph::from_named(&VERTICES, &EDGES).expect("fixture is well formed")
}

/// n-values, in [`VERTICES`] order.
pub const EXPECTED_N: [i64; 20] = [-1, 1, 2, 3, 4, 0, -1, -1, 1, 0, -1, 2, 1, 0, -1, 3, 2, 1, 0, -1];

/// Tuples of the rank construction, in [`VERTICES`] order.
pub const EXPECTED_TUPLES: [&str; 20] = [
    "()",
    "(0,2)",
    "(0,1,3)",
    "(0,1,2,4)",
    "(0,1,2,3,4)",
    "(0)",
    "()",
    "()",
    "(0,1)",
    "(0)",
    "()",
    "(0,1,2)",
    "(0,1)",
    "(0)",
    "()",
    "(0,1,2,3)",
    "(0,1,2)",
    "(0,1)",
    "(0)",
    "()",
];

/// The single edge whose image under the rank construction is not an edge.
pub const EXPECTED_FAILURE: (&str, i64, &str) = ("v0", 2, "r1");
