//! Cycle-weight tests by Bellman-Ford relaxation.
//!
//! Edges carry the pair `(w, -1)` (non-positive mode) or `(w, 0)` (negative
//! mode), compared lexicographically. A cycle is negative for the pair order
//! exactly when its weight is `<= 0` (resp. `< 0`), so a single relaxation
//! routine covers both thresholds without rescaling.

use crate::weight::{add_wide, Overflow};

/// Which cycles count as bad.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleBound {
    /// total weight `<= 0`
    NonPositive,
    /// total weight `<= -1`
    Negative,
}

impl CycleBound {
    fn tie(self) -> i64 {
        match self {
            CycleBound::NonPositive => -1,
            CycleBound::Negative => 0,
        }
    }

    pub fn is_bad(self, total: i128) -> bool {
        match self {
            CycleBound::NonPositive => total <= 0,
            CycleBound::Negative => total < 0,
        }
    }
}

/// Edge list over vertices `0..n`, weights already widened.
pub type WideEdge = (usize, i128, usize);

type Dist = (i128, i64);

fn relax(dist: &[Dist], edge: &WideEdge, tie: i64) -> Result<Dist, Overflow> {
    let (u, w, _) = *edge;
    Ok((add_wide(dist[u].0, w)?, dist[u].1 + tie))
}

/// True iff some cycle of the edge set is bad for `bound`.
pub fn has_cycle(n: usize, edges: &[WideEdge], bound: CycleBound) -> Result<bool, Overflow> {
    let tie = bound.tie();
    let mut dist = vec![(0i128, 0i64); n];
    for _ in 0..=n {
        let mut changed = false;
        for edge in edges {
            let cand = relax(&dist, edge, tie)?;
            if cand < dist[edge.2] {
                dist[edge.2] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Returns the positions (in `edges`) of a bad cycle, in traversal order.
pub fn find_cycle(n: usize, edges: &[WideEdge], bound: CycleBound) -> Result<Option<Vec<usize>>, Overflow> {
    if !has_cycle(n, edges, bound)? {
        return Ok(None);
    }
    let tie = bound.tie();
    let mut dist = vec![(0i128, 0i64); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    // A cycle in the predecessor graph is always bad, and one must appear
    // because distances decrease without bound once a bad cycle exists.
    loop {
        for (i, edge) in edges.iter().enumerate() {
            let cand = relax(&dist, edge, tie)?;
            if cand < dist[edge.2] {
                dist[edge.2] = cand;
                pred[edge.2] = Some(i);
            }
        }
        if let Some(cycle) = predecessor_cycle(n, edges, &pred) {
            return Ok(Some(cycle));
        }
    }
}

fn predecessor_cycle(n: usize, edges: &[WideEdge], pred: &[Option<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match pred[v] {
                Some(e) => v = edges[e].0,
                None => break,
            }
        }
        if state[v] == 1 && pred[v].is_some() {
            // v was reached twice on this walk: recover the loop
            let mut cycle = Vec::new();
            let mut x = v;
            loop {
                let e = pred[x].expect("walk follows defined predecessors");
                cycle.push(e);
                x = edges[e].0;
                if x == v {
                    break;
                }
            }
            cycle.reverse();
            return Some(cycle);
        }
        for w in walk {
            state[w] = 2;
        }
    }
    None
}

/// Strongly connected components, each listed once; iterative Kosaraju.
pub fn strongly_connected(n: usize, edges: &[WideEdge]) -> Vec<usize> {
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for &(u, _, v) in edges {
        fwd[u].push(v);
        bwd[v].push(u);
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < fwd[v].len() {
                let t = fwd[v][*i];
                *i += 1;
                if !seen[t] {
                    seen[t] = true;
                    stack.push((t, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &bwd[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Marks every vertex from which a bad cycle is reachable.
pub fn vertices_reaching_cycle(n: usize, edges: &[WideEdge], bound: CycleBound) -> Result<Vec<bool>, Overflow> {
    let comp = strongly_connected(n, edges);
    let components = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut inner: Vec<Vec<WideEdge>> = vec![Vec::new(); components];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); components];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut local = vec![0usize; n];
    for m in &members {
        for (i, &v) in m.iter().enumerate() {
            local[v] = i;
        }
    }
    for &(u, w, v) in edges {
        if comp[u] == comp[v] {
            inner[comp[u]].push((local[u], w, local[v]));
        }
    }
    let mut bad = vec![false; n];
    let mut stack = Vec::new();
    for c in 0..components {
        if !inner[c].is_empty() && has_cycle(members[c].len(), &inner[c], bound)? {
            for &v in &members[c] {
                bad[v] = true;
                stack.push(v);
            }
        }
    }
    let mut preds = vec![Vec::new(); n];
    for &(u, _, v) in edges {
        preds[v].push(u);
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !bad[u] {
                bad[u] = true;
                stack.push(u);
            }
        }
    }
    Ok(bad)
}
