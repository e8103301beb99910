//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! test fails if any check fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::Ratio;
use rand::Rng;

use flowcrit::connectivity::edge_connectivity;
use flowcrit::criticality::is_3_flow_critical;
use flowcrit::density::{check_rho_dichotomy, rho_min, rho_of_partition, DichotomyBranch};
use flowcrit::families::{complete, doubled, k3plus, plan_density_family, two_sum, wheel, TwoSumSpec};
use flowcrit::flow::{all_boundaries, brute_force_beta, find_beta_orientation, is_z3_connected, is_z3_connected_by_search};
use flowcrit::forests::{decompose_into_forests, spanning_tree_packing, ForestDecomposition, TreePacking};
use flowcrit::format::{parse_graph6, to_graph6};
use flowcrit::graph::SmallGraph;
use flowcrit::scan::{scan, RecordFormat, ScanOptions, ScanRecord};
use flowcrit::{MultiGraph, VertexPartition};

use common::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Check {
    let mut graphs = 0usize;
    let mut pairs = 0usize;
    for n in 1..=5 {
        for g in all_multigraphs(n, 8) {
            graphs += 1;
            for beta in all_boundaries(n) {
                pairs += 1;
                let fast = find_beta_orientation(&g, &beta).map_err(|e| e.to_string())?;
                let slow = brute_force_beta(&g, &beta).map_err(|e| e.to_string())?;
                ensure(fast.is_some() == slow.is_some(), || {
                    format!("disagree on {:?} with {:?}", g.pairs(), beta.values())
                })?;
                if let Some(o) = fast {
                    o.verify(&g, &beta).map_err(|e| format!("bad witness: {e}"))?;
                }
            }
        }
    }
    Ok(format!("{graphs} labeled multigraphs, {pairs} (graph, boundary) pairs"))
}

fn wheel_table() -> Check {
    for k in 3..=8 {
        let w = wheel(k).unwrap();
        let dp = is_z3_connected(&w).map_err(|e| e.to_string())?.connected;
        ensure(dp == (k % 2 == 0), || format!("W{k}: Z3-connected = {dp}"))?;
        if k <= 6 {
            let search = is_z3_connected_by_search(&w).map_err(|e| e.to_string())?.connected;
            ensure(search == dp, || format!("W{k}: search and DP disagree"))?;
        }
    }
    for k in (3..=9).step_by(2) {
        let w = wheel(k).unwrap();
        let cert = is_3_flow_critical(&w).map_err(|e| e.to_string())?;
        ensure(cert.is_critical(), || format!("W{k} not certified critical"))?;
        cert.verify(&w).map_err(|e| format!("W{k}: {e}"))?;
    }
    Ok("W3..W8 connectivity by parity, odd W3..W9 critical".into())
}

fn k3plus_family() -> Check {
    for n in 6..=9 {
        let g = k3plus(n).unwrap();
        ensure(g.m() == 3 * n - 8, || format!("n={n}: {} edges", g.m()))?;
        let cert = is_3_flow_critical(&g).map_err(|e| e.to_string())?;
        ensure(cert.is_critical(), || format!("K+(3,{}) not critical", n - 3))?;
        cert.verify(&g).map_err(|e| format!("n={n}: {e}"))?;
    }
    Ok("n = 6..9 critical with 3n-8 edges".into())
}

struct Census {
    records: Vec<ScanRecord>,
    critical: Vec<MultiGraph>,
}

fn run_census() -> Census {
    let mut stream = String::new();
    for n in 1..=7 {
        for g in connected_simple_graphs(n) {
            stream.push_str(&to_graph6(&g).unwrap());
            stream.push('\n');
        }
    }
    let opts = ScanOptions {
        three_edge_connected: true,
        ..Default::default()
    };
    let mut out = Vec::new();
    scan(stream.as_bytes(), &mut out, RecordFormat::JsonLines, &opts).unwrap();
    let lines: Vec<&str> = stream.lines().collect();
    let records: Vec<ScanRecord> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let critical = records
        .iter()
        .filter(|r| r.critical == Some(true))
        .map(|r| parse_graph6(lines[r.line - 1]).unwrap())
        .collect();
    Census { records, critical }
}

fn census_bounds(c: &Census) -> Check {
    ensure(c.records.len() == 1 + 1 + 2 + 6 + 21 + 112 + 853, || {
        format!("stream has {} graphs, expected 996 connected graphs", c.records.len())
    })?;
    let mut per_n = [0usize; 8];
    let mut saw_k4 = false;
    for g in &c.critical {
        let (n, m) = (g.n() as i64, g.m() as i64);
        per_n[g.n()] += 1;
        if g.recognize_small() == SmallGraph::K4 {
            saw_k4 = true;
            ensure(5 * m == 8 * n - 2 && m == 4 * n - 10, || "K4 misses equality".into())?;
        } else {
            ensure(5 * m >= 8 * n + 2 && m <= 4 * n - 11, || {
                format!("n={n} m={m} outside [(8n+2)/5, 4n-11]: {:?}", g.pairs())
            })?;
        }
    }
    ensure(saw_k4, || "K4 not found".into())?;
    let w5 = wheel(5).unwrap();
    let kp = k3plus(6).unwrap();
    for want in [&w5, &kp] {
        ensure(
            c.critical
                .iter()
                .any(|g| flowcrit::iso::is_isomorphic(g, want).unwrap()),
            || format!("missing known critical graph {:?}", want.pairs()),
        )?;
    }
    Ok(format!(
        "{} critical graphs (by n: {:?})",
        c.critical.len(),
        &per_n[1..]
    ))
}

fn census_structure(c: &Census) -> Check {
    let critical: Vec<&ScanRecord> = c.records.iter().filter(|r| r.critical == Some(true)).collect();
    ensure(!critical.is_empty(), || "no critical graphs".into())?;
    for (r, g) in critical.iter().zip(&c.critical) {
        let s = r.structure.as_ref().ok_or("missing structure report")?;
        ensure(
            s.deletion_flows
                && s.connectivity_ok
                && s.z3_reduced == Some(true)
                && s.v3_forest_or_odd_wheel,
            || format!("line {}: {s:?}", r.line),
        )?;
        ensure(edge_connectivity(g).unwrap() >= 3, || "not 3-edge-connected".into())?;
        let cert = r.certificate.as_ref().ok_or("missing certificate")?;
        cert.verify(g).map_err(|e| format!("line {}: {e}", r.line))?;
    }
    Ok(format!("{} critical graphs pass all four checks", critical.len()))
}

fn rho_fixtures() -> Check {
    let p3 = MultiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
    let cases = [("K2", complete(2), 6), ("K3", complete(3), 2), ("P3", p3, 0), ("K4", complete(4), 0)];
    for (name, g, want) in cases {
        let r = rho_min(&g).map_err(|e| e.to_string())?;
        ensure(r.value == want, || format!("{name}: rho = {}", r.value))?;
        ensure(r.partition.is_trivial(), || format!("{name}: minimizer not trivial"))?;
        let again = rho_of_partition(&g, &r.partition).unwrap();
        ensure(again == want, || format!("{name}: partition gives {again}"))?;
        let trivial = rho_of_partition(&g, &VertexPartition::trivial(g.n())).unwrap();
        ensure(trivial == want, || format!("{name}: trivial partition gives {trivial}"))?;
    }
    Ok("K2=6, K3=2, P3=0, K4=0".into())
}

fn rho_dichotomy() -> Check {
    let mut rng = rng(0x5eed_0007);
    let (mut found, mut tries) = (0, 0);
    let mut branches = [0usize; 2];
    while found < 100 {
        tries += 1;
        let n = rng.gen_range(2..=8);
        let p = rng.gen_range(0.5..1.0);
        let mult = rng.gen_range(1..=3);
        let g = random_multigraph(&mut rng, n, p, mult);
        if !g.is_connected() || rho_min(&g).unwrap().value < 0 {
            continue;
        }
        found += 1;
        let r = check_rho_dichotomy(&g).map_err(|e| e.to_string())?;
        ensure(r.hypothesis_met && r.holds(), || format!("{:?}: {r:?}", g.pairs()))?;
        match r.branch {
            DichotomyBranch::Z3Connected => branches[0] += 1,
            DichotomyBranch::ReducesTo { .. } => branches[1] += 1,
            DichotomyBranch::Neither { .. } => unreachable!(),
        }
    }
    Ok(format!(
        "100 graphs ({tries} sampled): {} Z3-connected, {} reduce to K2/K3/P3/K4",
        branches[0], branches[1]
    ))
}

fn two_sums() -> Check {
    let pool = [("K4", complete(4)), ("W5", wheel(5).unwrap()), ("K+(3,3)", k3plus(6).unwrap())];
    let mut count = 0;
    for (n1, g1) in &pool {
        for (n2, g2) in &pool {
            for e1 in g1.edge_ids() {
                for e2 in g2.edge_ids() {
                    for flip in [false, true] {
                        let spec = TwoSumSpec { g1, e1, g2, e2, flip };
                        let g = two_sum(&spec).map_err(|e| e.to_string())?;
                        ensure(
                            g.n() == g1.n() + g2.n() - 2 && g.m() == g1.m() + g2.m() - 1,
                            || format!("{n1}+{n2}: counts {} {}", g.n(), g.m()),
                        )?;
                        let a = g1.edge(e1).unwrap();
                        let b = g2.edge(e2).unwrap();
                        let (u2, v2) = if flip { (b.v, b.u) } else { (b.u, b.v) };
                        ensure(
                            g.degree(a.u) == g1.degree(a.u) + g2.degree(u2) - 1
                                && g.degree(a.v) == g1.degree(a.v) + g2.degree(v2) - 1,
                            || format!("{n1}+{n2}: merged degrees wrong"),
                        )?;
                        let cert = is_3_flow_critical(&g).map_err(|e| e.to_string())?;
                        ensure(cert.is_critical(), || {
                            format!("{n1} {e1} + {n2} {e2} (flip {flip}) not critical")
                        })?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} two-sums over every edge pair and both gluings"))
}

fn tree_packing_implies_z3() -> Check {
    // Z3-connectivity survives adding edges, so it is enough to look at
    // graphs with exactly 4(n-1) edges. For n <= 5 these are enumerated
    // exhaustively; a graph that is not Z3-connected must not pack.
    let mut exhaustive = 0usize;
    let mut failure: Option<String> = None;
    for n in 2..=5 {
        for_each_multigraph(n, 4 * (n - 1), 4 * (n - 1), &mut |g| {
            if failure.is_some() || !g.is_connected() {
                return;
            }
            exhaustive += 1;
            if !is_z3_connected(g).unwrap().connected {
                if let TreePacking::Trees { .. } = spanning_tree_packing(g, 4).unwrap() {
                    failure = Some(format!("{:?} packs 4 trees but is not Z3-connected", g.pairs()));
                }
            }
        });
    }
    if let Some(f) = failure {
        return Err(f);
    }
    let mut rng = rng(0x5eed_0009);
    let mut sampled = 0;
    for _ in 0..3000 {
        let n = rng.gen_range(5..=6);
        let mut g = union_of_trees(&mut rng, n, 4);
        for _ in 0..rng.gen_range(0..3) {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            g.add_edge(u, v).unwrap();
        }
        match spanning_tree_packing(&g, 4).unwrap() {
            TreePacking::Trees { trees } => {
                flowcrit::forests::verify_trees(&g, &trees)?;
            }
            TreePacking::TooSparse { .. } => return Err(format!("{:?}: union of 4 trees did not pack", g.pairs())),
        }
        ensure(is_z3_connected(&g).unwrap().connected, || {
            format!("{:?} packs 4 trees but is not Z3-connected", g.pairs())
        })?;
        sampled += 1;
    }
    for (name, g) in [("K7", complete(7)), ("2K4", doubled(&complete(4)))] {
        ensure(edge_connectivity(&g).unwrap() >= 6, || format!("{name} not 6-edge-connected"))?;
        ensure(is_z3_connected(&g).unwrap().connected, || format!("{name} not Z3-connected"))?;
    }
    Ok(format!(
        "{exhaustive} connected multigraphs with 4(n-1) edges (n<=5), {sampled} random 4-tree unions (n=5,6), K7 and 2K4"
    ))
}

fn forests_of_critical(c: &Census) -> Check {
    for g in &c.critical {
        match decompose_into_forests(g, 4).map_err(|e| e.to_string())? {
            ForestDecomposition::Forests { forests } => {
                ensure(forests.len() <= 4, || "more than 4 forests".into())?;
                independent_forest_check(g, &forests)?;
            }
            ForestDecomposition::TooDense { subgraph } => {
                return Err(format!("{:?}: dense subgraph {subgraph:?}", g.pairs()))
            }
        }
    }
    Ok(format!("{} critical graphs split into 4 forests", c.critical.len()))
}

/// Checks disjointness, cover and acyclicity without the library's verifier.
fn independent_forest_check(g: &MultiGraph, forests: &[Vec<flowcrit::EdgeId>]) -> Result<(), String> {
    let mut all: Vec<flowcrit::EdgeId> = forests.iter().flatten().copied().collect();
    all.sort();
    ensure(all == g.edge_ids().collect::<Vec<_>>(), || "forests do not partition E".into())?;
    for f in forests {
        // A forest on k edges has exactly n - k components.
        let mut h = MultiGraph::new(g.n()).unwrap();
        for id in f {
            let e = g.edge(*id).unwrap();
            h.add_edge(e.u, e.v).unwrap();
        }
        ensure(h.components().len() == g.n() - f.len(), || "a class has a cycle".into())?;
    }
    Ok(())
}

fn density_plans() -> Check {
    let plan = plan_density_family(1, 2, 1).map_err(|e| e.to_string())?;
    ensure(
        (plan.s, plan.t, plan.n, plan.edges) == (4, 15, 52, 104),
        || format!("plan(1,2,1) = {plan:?}"),
    )?;
    ensure(plan.a == Ratio::new(115, 8) && plan.b == Ratio::new(125, 8), || "a, b".into())?;
    let mut rng = rng(0x5eed_0011);
    let mut done = 0;
    while done < 20 {
        let p: i128 = rng.gen_range(1..=30);
        let q: i128 = rng.gen_range(1..=90);
        let floor: i128 = rng.gen_range(1..=100);
        if !(4 * q > 7 * p && q < 3 * p) {
            continue;
        }
        done += 1;
        let plan = plan_density_family(p as u64, q as u64, floor as u64).map_err(|e| e.to_string())?;
        let g = num_integer::gcd(p, q);
        let (p, q) = (p / g, q / g);
        let (s, t, n, e) = (plan.s as i128, plan.t as i128, plan.n as i128, plan.edges as i128);
        ensure(n == 8 * s + t + 5 && e == 14 * s + 3 * t + 3, || format!("{plan:?}"))?;
        ensure(n >= floor, || format!("n below floor: {plan:?}"))?;
        ensure(t >= 6, || format!("t too small: {plan:?}"))?;
        ensure(plan.a <= Ratio::from(t) && Ratio::from(t) <= plan.b, || format!("{plan:?}"))?;
        ensure(
            8 * q * n - 5 * p <= 8 * p * e && 8 * p * e <= 8 * q * n + 5 * p,
            || format!("inequalities fail for {plan:?}"),
        )?;
        let r = Ratio::new(q, p);
        let margin = Ratio::new(5, 8);
        let nn = Ratio::from(n);
        ensure(
            r * nn - margin <= Ratio::from(e) && Ratio::from(e) <= r * nn + margin,
            || format!("rational check fails for {plan:?}"),
        )?;
    }
    Ok("(1,2,1) -> s=4 t=15 n=52 |E|=104; 20 random admissible plans".into())
}

fn run(name: &str, results: &mut Vec<bool>, f: impl FnOnce() -> Check) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
        Err(detail) => println!("FAIL {name}: {detail} [{secs:.1}s]"),
    }
    results.push(outcome.is_ok());
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    run("oracle equivalence (n<=5, m<=8, all boundaries)", &mut results, oracle_equivalence);
    run("wheel table", &mut results, wheel_table);
    run("K+(3,n-3) critical with 3n-8 edges", &mut results, k3plus_family);
    let census = run_census();
    run("census edge bounds (3-edge-connected, n<=7)", &mut results, || census_bounds(&census));
    run("census structure checks", &mut results, || census_structure(&census));
    run("rho fixtures", &mut results, rho_fixtures);
    run("rho dichotomy on 100 random graphs", &mut results, rho_dichotomy);
    run("two-sums of critical graphs", &mut results, two_sums);
    run("4 spanning trees imply Z3-connected", &mut results, tree_packing_implies_z3);
    run("census graphs split into 4 forests", &mut results, || forests_of_critical(&census));
    run("density family arithmetic", &mut results, density_plans);
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} acceptance checks passed", results.len() - failed, results.len());
    assert_eq!(failed, 0);
}
