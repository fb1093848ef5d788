//! Progress-measure lifting for energy games.
//!
//! The energy player wants every cycle of the play to have non-negative
//! weight. Measures take values in `0..=M` or `Top`, where `M` is the sum of
//! the magnitudes of negative weights; the least measure is finite exactly
//! on the energy player's winning region.

use std::collections::VecDeque;

use crate::cycles::WideEdge;
use crate::lifting::Role;
use crate::weight::{add_wide, Overflow};

pub struct EnergyLifter<'a> {
    n: usize,
    edges: &'a [WideEdge],
    out: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    /// `Min` marks the energy player's vertices.
    roles: &'a [Role],
    ceiling: i128,
}

impl<'a> EnergyLifter<'a> {
    pub fn new(n: usize, edges: &'a [WideEdge], roles: &'a [Role]) -> Result<Self, Overflow> {
        let mut out = vec![Vec::new(); n];
        let mut preds = vec![Vec::new(); n];
        let mut ceiling = 0i128;
        for (i, &(u, w, v)) in edges.iter().enumerate() {
            out[u].push(i);
            if !preds[v].contains(&u) {
                preds[v].push(u);
            }
            if w < 0 {
                ceiling = add_wide(ceiling, w.checked_neg().ok_or(Overflow)?)?;
            }
        }
        Ok(EnergyLifter { n, edges, out, preds, roles, ceiling })
    }

    pub fn ceiling(&self) -> i128 {
        self.ceiling
    }

    fn candidate(&self, e: usize, values: &[Option<i128>]) -> Result<Option<i128>, Overflow> {
        let (_, w, t) = self.edges[e];
        Ok(match values[t] {
            None => None,
            Some(x) => {
                let need = x.checked_sub(w).ok_or(Overflow)?.max(0);
                (need <= self.ceiling).then_some(need)
            }
        })
    }

    // `None` is the top element, so compare with it mapped above every number.
    fn key(x: Option<i128>) -> (bool, i128) {
        match x {
            Some(v) => (false, v),
            None => (true, 0),
        }
    }

    fn requirement(&self, v: usize, values: &[Option<i128>]) -> Result<Option<i128>, Overflow> {
        let mut best: Option<Option<i128>> = None;
        for &e in &self.out[v] {
            let c = self.candidate(e, values)?;
            best = Some(match (best, self.roles[v]) {
                (None, _) => c,
                (Some(b), Role::Min) => std::cmp::min_by_key(b, c, |x| Self::key(*x)),
                (Some(b), Role::Max) => std::cmp::max_by_key(b, c, |x| Self::key(*x)),
            });
        }
        Ok(best.unwrap_or(Some(0)))
    }

    /// Least energy measure; `None` marks vertices the energy player loses.
    pub fn solve(&self) -> Result<Vec<Option<i128>>, Overflow> {
        let mut values = vec![Some(0i128); self.n];
        let mut queue: VecDeque<usize> = (0..self.n).collect();
        let mut queued = vec![true; self.n];
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            if values[v].is_none() {
                continue;
            }
            let need = self.requirement(v, &values)?;
            if Self::key(need) > Self::key(values[v]) {
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

    /// Energy player's choice at `v`: the least finite candidate, ties by edge position.
    pub fn best_edge(&self, v: usize, values: &[Option<i128>]) -> Result<Option<usize>, Overflow> {
        let mut best: Option<(i128, usize)> = None;
        for &e in &self.out[v] {
            if let Some(c) = self.candidate(e, values)? {
                if best.is_none_or(|(b, _)| c < b) {
                    best = Some((c, e));
                }
            }
        }
        Ok(best.map(|(_, e)| e))
    }
}
