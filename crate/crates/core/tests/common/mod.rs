#![allow(dead_code)]

use proptest::prelude::*;
use sumgames::graph::{Arena, Edge, LabeledGraph, Player};

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Arbitrary graph on `1..=max_n` vertices, sinks allowed.
pub fn any_graph(max_n: usize, max_w: i64, max_edges: usize) -> impl Strategy<Value = LabeledGraph<i64>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, -max_w..=max_w, 0..n), 0..=max_edges).prop_map(move |edges| {
            let edges = edges.into_iter().map(|(from, weight, to)| Edge { from, weight, to });
            LabeledGraph::new(ids(n), edges).unwrap()
        })
    })
}

/// Graph whose cycles all have weight >= 1.
///
/// Weights are potential differences plus a slack; forward edges (by index)
/// may have slack 0, edges going back have slack >= 1, so every cycle
/// collects at least 1.
pub fn satisfying_graph(max_n: usize) -> impl Strategy<Value = LabeledGraph<i64>> {
    satisfying(max_n, false)
}

/// Like [`satisfying_graph`], with a `+1` or `+2` self-loop added on every
/// vertex that would otherwise be a sink.
pub fn satisfying_graph_without_sinks(max_n: usize) -> impl Strategy<Value = LabeledGraph<i64>> {
    satisfying(max_n, true)
}

fn satisfying(max_n: usize, close_sinks: bool) -> impl Strategy<Value = LabeledGraph<i64>> {
    (1..=max_n).prop_flat_map(move |n| {
        (prop::collection::vec(-3i64..=3, n), prop::collection::vec((0..n, 0..n, 0i64..=2), 0..=3 * n)).prop_map(
            move |(potential, raw)| {
                let mut edges: Vec<Edge<i64>> = raw
                    .into_iter()
                    .map(|(from, to, slack)| {
                        let slack = if from < to { slack } else { slack.max(1) };
                        Edge { from, weight: potential[to] - potential[from] + slack, to }
                    })
                    .collect();
                if close_sinks {
                    for v in 0..n {
                        if !edges.iter().any(|e| e.from == v) {
                            edges.push(Edge { from: v, weight: 1 + (v % 2) as i64, to: v });
                        }
                    }
                }
                LabeledGraph::new(ids(n), edges).unwrap()
            },
        )
    })
}

/// Arena on `1..=max_n` vertices, every vertex with 1..=max_deg out-edges.
pub fn any_arena(max_n: usize, max_w: i64, max_deg: usize) -> impl Strategy<Value = Arena<i64>> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(prop::collection::vec((0..n, -max_w..=max_w), 1..=max_deg), n),
        )
            .prop_map(move |(adam, out)| {
                let edges = out
                    .into_iter()
                    .enumerate()
                    .flat_map(|(from, es)| es.into_iter().map(move |(to, weight)| Edge { from, weight, to }));
                let graph = LabeledGraph::new(ids(n), edges).unwrap();
                let owners = adam.into_iter().map(|a| if a { Player::Adam } else { Player::Eve }).collect();
                Arena::new(graph, owners).unwrap()
            })
    })
}

/// Every simple cycle, as edge lists. Exponential; small graphs only.
pub fn simple_cycles(g: &LabeledGraph<i64>) -> Vec<Vec<usize>> {
    fn walk(
        g: &LabeledGraph<i64>,
        start: usize,
        v: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for &e in g.out_edges(v) {
            let to = g.edge(e).to;
            if to == start {
                path.push(e);
                out.push(path.clone());
                path.pop();
            } else if to > start && !on_path[to] {
                on_path[to] = true;
                path.push(e);
                walk(g, start, to, on_path, path, out);
                path.pop();
                on_path[to] = false;
            }
        }
    }
    let mut out = Vec::new();
    for start in 0..g.vertex_count() {
        let mut on_path = vec![false; g.vertex_count()];
        on_path[start] = true;
        walk(g, start, start, &mut on_path, &mut Vec::new(), &mut out);
    }
    out
}

pub fn weight_of(g: &LabeledGraph<i64>, cycle: &[usize]) -> i64 {
    cycle.iter().map(|&e| g.edge(e).weight).sum()
}
