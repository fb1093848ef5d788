//! Certification campaigns over small arenas.
//!
//! Every arena is solved by all three solvers. The campaign records a
//! finding whenever they disagree, a solver fails, or a region cannot be
//! certified by a single positional strategy that passes the independent
//! checker. Findings carry the arena so they can be replayed.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::graph::{parse_arena, Arena, Edge, GraphError, LabeledGraph, Player};
use crate::solver::{
    solve_with, verify_certificate, CertVerdict, Criterion, Method, PositionalStrategy, Seeding, Solution, SolveError,
    SolveOptions,
};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignConfig<W = i64> {
    pub max_vertices: usize,
    pub weights: Vec<W>,
    pub max_out_degree: usize,
    pub mode: Mode,
    /// Random mode: number of valid arenas to certify.
    pub sample_count: usize,
    pub seed: u64,
    /// Exhaustive mode: refuse families larger than this. Defaults to [`crate::arena_cap`].
    pub cap: Option<u128>,
    /// Run this solver with the weakened cycle criterion.
    pub weakened: Option<Method>,
    /// Stop after the batch in which this many findings have accumulated.
    pub max_findings: Option<usize>,
    pub seeding: Seeding,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl<W: Weight> CampaignConfig<W> {
    pub fn exhaustive(max_vertices: usize, weights: Vec<W>, max_out_degree: usize) -> Self {
        CampaignConfig {
            max_vertices,
            weights,
            max_out_degree,
            mode: Mode::Exhaustive,
            sample_count: 0,
            seed: 0,
            cap: None,
            weakened: None,
            max_findings: None,
            seeding: Seeding::Auto,
            workers: None,
        }
    }

    pub fn random(max_vertices: usize, weights: Vec<W>, max_out_degree: usize, sample_count: usize, seed: u64) -> Self {
        CampaignConfig {
            mode: Mode::Random,
            sample_count,
            seed,
            ..Self::exhaustive(max_vertices, weights, max_out_degree)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("the family has {count} arenas, above the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("invalid campaign: {0}")]
    InvalidConfig(String),
    #[error("arena {id}: {source}")]
    Solver { id: String, source: SolveError },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    EveCertified,
    AdamCertified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub brute_energy: bool,
    pub brute_umeasure: bool,
    pub energy_umeasure: bool,
}

impl Agreement {
    pub fn all(&self) -> bool {
        self.brute_energy && self.brute_umeasure && self.energy_umeasure
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub arena_id: String,
    pub kind: String,
    pub detail: String,
    /// The arena document, ready for replay.
    pub arena: Value,
}

impl Finding {
    pub fn to_json(&self) -> Value {
        json!({ "arena_id": self.arena_id, "kind": self.kind, "detail": self.detail, "arena": self.arena })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReport {
    pub arena_id: String,
    /// Empty when no solver produced a usable solution.
    pub verdicts: Vec<Verdict>,
    pub eve_strategy: Option<PositionalStrategy>,
    pub adam_strategy: Option<PositionalStrategy>,
    pub agreement: Agreement,
    pub findings: Vec<Finding>,
}

impl CertReport {
    pub fn certified(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn to_json<W: Weight>(&self, arena: &Arena<W>) -> Value {
        let graph = arena.graph();
        let verdicts: serde_json::Map<String, Value> = self
            .verdicts
            .iter()
            .enumerate()
            .map(|(v, verdict)| {
                let tag = match verdict {
                    Verdict::EveCertified => "EveCertified",
                    Verdict::AdamCertified => "AdamCertified",
                };
                (graph.id(v).to_string(), json!(tag))
            })
            .collect();
        json!({
            "arena_id": self.arena_id,
            "verdicts": verdicts,
            "eve_strategy": self.eve_strategy.as_ref().map(|s| s.to_json(arena)),
            "adam_strategy": self.adam_strategy.as_ref().map(|s| s.to_json(arena)),
            "agreement": {
                "brute_energy": self.agreement.brute_energy,
                "brute_umeasure": self.agreement.brute_umeasure,
                "energy_umeasure": self.agreement.energy_umeasure,
            },
            "findings": self.findings.iter().map(Finding::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Solves `arena` with every method and cross-checks the answers.
///
/// Only the brute-force guard is an error; everything else that goes
/// wrong becomes a finding.
pub fn certify_arena<W: Weight>(
    arena: &Arena<W>,
    id: &str,
    weakened: Option<Method>,
    seeding: Seeding,
) -> Result<CertReport, SolveError> {
    let mut findings = Vec::new();
    let finding = |kind: &str, detail: String| Finding {
        arena_id: id.to_string(),
        kind: kind.to_string(),
        detail,
        arena: arena.to_json(),
    };
    let mut solutions: Vec<Option<Solution>> = Vec::with_capacity(3);
    for method in Method::ALL {
        let criterion = if weakened == Some(method) { Criterion::NonNegative } else { Criterion::Positive };
        let options = SolveOptions { criterion, bounds: None, seeding };
        match solve_with(arena, method, &options) {
            Ok(s) => solutions.push(Some(s)),
            Err(e @ SolveError::Guard { .. }) => return Err(e),
            Err(e) => {
                findings.push(finding("solver-error", format!("{}: {e}", method.tag())));
                solutions.push(None);
            }
        }
    }
    let same = |a: usize, b: usize| match (&solutions[a], &solutions[b]) {
        (Some(x), Some(y)) => x.eve_region == y.eve_region,
        _ => false,
    };
    let agreement = Agreement { brute_energy: same(0, 1), brute_umeasure: same(0, 2), energy_umeasure: same(1, 2) };
    let present = solutions.iter().flatten().count();
    if present > 1 && !agreement.all() {
        let regions: Vec<String> = Method::ALL
            .iter()
            .zip(&solutions)
            .filter_map(|(m, s)| s.as_ref().map(|s| format!("{}={:?}", m.tag(), s.eve_vertices())))
            .collect();
        findings.push(finding("region-disagreement", regions.join(" ")));
    }

    let reference = solutions.into_iter().flatten().next();
    let (verdicts, eve_strategy, adam_strategy) = match reference {
        None => (Vec::new(), None, None),
        Some(s) => {
            // re-check the uniform strategies independently of the solver
            let adam_region = s.adam_region();
            for (strategy, region) in [(&s.eve_strategy, &s.eve_region), (&s.adam_strategy, &adam_region)] {
                match verify_certificate(arena, strategy, region) {
                    Ok(CertVerdict::Valid) => {}
                    Ok(CertVerdict::Invalid(cycle)) => findings.push(finding(
                        "certificate-rejected",
                        format!("{:?} strategy, cycle {cycle:?}", strategy.player),
                    )),
                    Err(e) => findings.push(finding("certificate-error", e.to_string())),
                }
            }
            let verdicts = s
                .eve_region
                .iter()
                .map(|&eve| if eve { Verdict::EveCertified } else { Verdict::AdamCertified })
                .collect();
            (verdicts, Some(s.eve_strategy), Some(s.adam_strategy))
        }
    };
    if verdicts.is_empty() && present == 0 {
        findings.push(finding("unsolved", "no solver produced a certified solution".into()));
    }
    Ok(CertReport { arena_id: id.to_string(), verdicts, eve_strategy, adam_strategy, agreement, findings })
}

/// Re-runs a finding from its serialized arena.
pub fn replay(finding: &Finding, weakened: Option<Method>, seeding: Seeding) -> Result<CertReport, HarnessError> {
    let arena: Arena<i64> = parse_arena(&finding.arena.to_string())?;
    certify_arena(&arena, &finding.arena_id, weakened, seeding)
        .map_err(|source| HarnessError::Solver { id: finding.arena_id.clone(), source })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub arenas_processed: u64,
    pub certified: u64,
    /// Random candidates dropped for having a dead end.
    pub discarded: u64,
    pub eve_vertices: u64,
    pub adam_vertices: u64,
    pub disagreements: u64,
    /// True when `max_findings` cut the campaign short.
    pub stopped_early: bool,
    pub findings: Vec<Finding>,
}

impl Summary {
    pub fn all_certified(&self) -> bool {
        self.findings.is_empty() && self.certified == self.arenas_processed
    }

    pub fn to_json(&self) -> Value {
        json!({
            "arenas_processed": self.arenas_processed,
            "certified": self.certified,
            "discarded": self.discarded,
            "eve_certified_vertices": self.eve_vertices,
            "adam_certified_vertices": self.adam_vertices,
            "region_disagreements": self.disagreements,
            "stopped_early": self.stopped_early,
            "findings": self.findings.iter().map(Finding::to_json).collect::<Vec<_>>(),
        })
    }

    fn absorb(&mut self, report: CertReport) {
        self.arenas_processed += 1;
        if report.certified() {
            self.certified += 1;
        }
        if !report.agreement.all() {
            self.disagreements += 1;
        }
        for v in &report.verdicts {
            match v {
                Verdict::EveCertified => self.eve_vertices += 1,
                Verdict::AdamCertified => self.adam_vertices += 1,
            }
        }
        self.findings.extend(report.findings);
    }

    /// Writes each finding's arena to `dir/<arena id>.json`.
    pub fn write_findings(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for f in &self.findings {
            let path = dir.join(format!("{}.json", f.arena_id));
            if !written.contains(&path) {
                std::fs::write(&path, serde_json::to_string_pretty(&f.arena).expect("arena serializes"))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

fn vertex_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// All `1..=k`-subsets of `items`, in lexicographic order of positions.
fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn grow<T: Copy>(items: &[T], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<T>>) {
        for i in start..items.len() {
            current.push(i);
            out.push(current.iter().map(|&j| items[j]).collect());
            if current.len() < k {
                grow(items, k, i + 1, current, out);
            }
            current.pop();
        }
    }
    grow(items, k, 0, &mut current, &mut out);
    out.sort_by_key(|s| s.len());
    out
}

/// The exhaustive family for one vertex count: owners times per-vertex out-edge sets.
struct Block<W> {
    n: usize,
    choices: Vec<Vec<(usize, W)>>,
    count: u128,
}

impl<W: Weight> Block<W> {
    fn new(n: usize, weights: &[W], max_out_degree: usize) -> Self {
        let pairs: Vec<(usize, W)> = (0..n).flat_map(|t| weights.iter().map(move |&w| (t, w))).collect();
        let choices = subsets(&pairs, max_out_degree);
        let count = (choices.len() as u128).saturating_pow(n as u32).saturating_mul(1u128 << n);
        Block { n, choices, count }
    }

    fn arena(&self, mut index: u128) -> Arena<W> {
        let owners_mask = (index % (1u128 << self.n)) as usize;
        index >>= self.n;
        let base = self.choices.len() as u128;
        let mut edges = Vec::new();
        for v in 0..self.n {
            let pick = (index % base) as usize;
            index /= base;
            edges.extend(self.choices[pick].iter().map(|&(to, weight)| Edge { from: v, weight, to }));
        }
        let owners = (0..self.n).map(|v| if owners_mask >> v & 1 == 1 { Player::Adam } else { Player::Eve }).collect();
        let graph = LabeledGraph::new(vertex_ids(self.n), edges).expect("generated edges are in range");
        Arena::new(graph, owners).expect("every vertex has an out-edge")
    }
}

/// Number of arenas in the exhaustive family of `config`.
pub fn exhaustive_count<W: Weight>(config: &CampaignConfig<W>) -> u128 {
    (1..=config.max_vertices)
        .map(|n| Block::new(n, &config.weights, config.max_out_degree).count)
        .fold(0u128, u128::saturating_add)
}

/// Random arena candidate; `None` when some vertex drew no out-edge.
fn random_candidate<W: Weight>(rng: &mut ChaCha8Rng, config: &CampaignConfig<W>) -> Option<Arena<W>> {
    let n = rng.gen_range(1..=config.max_vertices);
    let owners: Vec<Player> = (0..n).map(|_| if rng.gen_bool(0.5) { Player::Adam } else { Player::Eve }).collect();
    let mut edges = Vec::new();
    let mut dead_end = false;
    for v in 0..n {
        let degree = rng.gen_range(0..=config.max_out_degree);
        dead_end |= degree == 0;
        for _ in 0..degree {
            let to = rng.gen_range(0..n);
            let weight = config.weights[rng.gen_range(0..config.weights.len())];
            edges.push(Edge { from: v, weight, to });
        }
    }
    if dead_end {
        return None;
    }
    let graph = LabeledGraph::new(vertex_ids(n), edges).expect("generated edges are in range");
    Arena::new(graph, owners).ok()
}

const BATCH: usize = 4096;

pub fn run_campaign<W: Weight>(config: &CampaignConfig<W>) -> Result<Summary, HarnessError> {
    if config.max_vertices == 0 || config.max_out_degree == 0 || config.weights.is_empty() {
        return Err(HarnessError::InvalidConfig("need at least one vertex, one weight and out-degree >= 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = config.workers {
        builder = builder.num_threads(workers);
    }
    let pool = builder.build()?;
    pool.install(|| match config.mode {
        Mode::Exhaustive => run_exhaustive(config),
        Mode::Random => run_random(config),
    })
}

fn certify_batch<W: Weight>(
    config: &CampaignConfig<W>,
    batch: Vec<(String, Arena<W>)>,
    summary: &mut Summary,
) -> Result<(), HarnessError> {
    let reports: Vec<Result<CertReport, HarnessError>> = batch
        .into_par_iter()
        .map(|(id, arena)| {
            certify_arena(&arena, &id, config.weakened, config.seeding)
                .map_err(|source| HarnessError::Solver { id, source })
        })
        .collect();
    for report in reports {
        summary.absorb(report?);
    }
    Ok(())
}

fn limit_reached<W>(config: &CampaignConfig<W>, summary: &Summary) -> bool {
    config.max_findings.is_some_and(|m| summary.findings.len() >= m)
}

fn run_exhaustive<W: Weight>(config: &CampaignConfig<W>) -> Result<Summary, HarnessError> {
    let cap = config.cap.unwrap_or_else(crate::arena_cap);
    let count = exhaustive_count(config);
    if count > cap {
        return Err(HarnessError::CapExceeded { count, cap });
    }
    let mut summary = Summary::default();
    for n in 1..=config.max_vertices {
        let block = Block::new(n, &config.weights, config.max_out_degree);
        let mut start = 0u128;
        while start < block.count {
            let end = (start + BATCH as u128).min(block.count);
            let ids: Vec<u128> = (start..end).collect();
            let batch: Vec<(String, Arena<W>)> =
                ids.into_par_iter().map(|i| (format!("exh-n{n}-{i}"), block.arena(i))).collect();
            certify_batch(config, batch, &mut summary)?;
            if limit_reached(config, &summary) {
                summary.stopped_early = end < block.count || n < config.max_vertices;
                return Ok(summary);
            }
            start = end;
        }
    }
    Ok(summary)
}

fn run_random<W: Weight>(config: &CampaignConfig<W>) -> Result<Summary, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut summary = Summary::default();
    let mut produced = 0usize;
    while produced < config.sample_count {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH && produced < config.sample_count {
            match random_candidate(&mut rng, config) {
                Some(arena) => {
                    batch.push((format!("rnd-{}-{produced}", config.seed), arena));
                    produced += 1;
                }
                None => summary.discarded += 1,
            }
        }
        certify_batch(config, batch, &mut summary)?;
        if limit_reached(config, &summary) {
            summary.stopped_early = produced < config.sample_count;
            break;
        }
    }
    Ok(summary)
}
