//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All comparisons are exact (integers or
//! rationals); no floating-point tolerance is involved anywhere.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use koszul_core::algebra::{build_quadratic, GeneratorSpace};
use koszul_core::cohomology::{cohomology_with, IntervalReading};
use koszul_core::enumerate::{canonical_key, count, enumerate, CanonicalKey};
use koszul_core::graph::samples::{chain, diamond};
use koszul_core::graph::{LayerProfile, LayeredGraph, StructuralMode, VertexId};
use koszul_core::koszul::{check_pinch_consistency, is_koszul, KoszulStatus};
use koszul_core::lattice::{closure_test, is_distributive, median_test, DEFAULT_LATTICE_CAP};
use koszul_core::linalg::Subspace;
use koszul_core::search::{admissible_profiles, run_search, SearchOptions};
use koszul_core::{hilbert_b, hilbert_b_dual, numerically_koszul};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

use StructuralMode::{TopMaximal, UniqueMax, UniqueMinOnly};

fn profile(s: &str) -> LayerProfile {
    s.parse().expect("profile literal")
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn counts() -> Outcome {
    let cases: &[(&str, StructuralMode, bool, usize)] = &[
        ("1,2,2,2,1", UniqueMax, false, 10),
        ("1,2,2,2,1", UniqueMax, true, 5),
        ("1,3,2,2,1", UniqueMax, true, 10),
        ("1,2,2,3,1", UniqueMax, true, 10),
        ("1,2,3,2,1", UniqueMax, true, 23),
        ("1,2,2,2,2", TopMaximal, false, 35),
        ("1,2,2,2,2", TopMaximal, true, 21),
        ("1,2,2,2,1", UniqueMinOnly, true, 33),
        ("1,3,2,2,1", UniqueMinOnly, true, 83),
        ("1,2,3,2,1", UniqueMinOnly, true, 170),
        ("1,2,2,3,1", UniqueMinOnly, true, 93),
        ("1,2,2,2,2", UniqueMinOnly, true, 65),
    ];
    for &(p, mode, uniform, want) in cases {
        let got = count(&profile(p), mode, uniform).map_err(e)?;
        expect(&format!("[{p}] {mode} uniform_only={uniform}"), got, want)?;
    }
    Ok(format!("{} counts exact, unique-min-only read as uniform-only", cases.len()))
}

fn koszulity() -> Outcome {
    for g in enumerate(&profile("1,2,2,2,1"), UniqueMax, true).map_err(e)? {
        if !is_koszul(&g).map_err(e)?.is_koszul() {
            return Err("a uniform [1,2,2,2,1] unique-max graph is not Koszul".into());
        }
    }

    let mut graphs = Vec::new();
    for p in ["1,3,2,2,1", "1,2,2,3,1", "1,2,3,2,1"] {
        graphs.extend(enumerate(&profile(p), UniqueMax, true).map_err(e)?);
    }
    expect("nine-vertex uniform unique-max graphs", graphs.len(), 43)?;
    let bad: Vec<&LayeredGraph> = graphs
        .iter()
        .filter(|g| is_koszul(g).map(|v| v.status == KoszulStatus::NonKoszul).unwrap_or(true))
        .collect();
    expect("non-Koszul among the 43", bad.len(), 1)?;
    expect("edges of H", bad[0].edge_count(), 13)?;
    let h_key = canonical_key(bad[0]);

    let found = |max: usize, mode: StructuralMode| -> Result<Vec<CanonicalKey>, String> {
        let report = run_search(&SearchOptions::new(max, mode)).map_err(e)?;
        Ok(report.results.non_koszul_graphs.into_iter().map(|f| f.key).collect())
    };
    expect("search(9, unique-max)", found(9, UniqueMax)?, vec![h_key.clone()])?;
    expect("search(9, unique-min-only)", found(9, UniqueMinOnly)?, vec![h_key.clone()])?;
    expect("search(8, unique-max)", found(8, UniqueMax)?, vec![])?;
    expect("search(8, unique-min-only)", found(8, UniqueMinOnly)?, vec![])?;
    Ok(format!("unique non-Koszul H = {}", h_key))
}

fn find_h() -> Result<LayeredGraph, String> {
    enumerate(&profile("1,2,3,2,1"), UniqueMax, true)
        .map_err(e)?
        .into_iter()
        .find(|g| is_koszul(g).map(|v| !v.is_koszul()).unwrap_or(false))
        .ok_or_else(|| "H not found".to_string())
}

fn cohomology() -> Outcome {
    let h = find_h()?;
    let top = VertexId::new(4, 0);
    let open = cohomology_with(&h, top, 4, IntervalReading::Open).map_err(e)?;
    let closed = cohomology_with(&h, top, 4, IntervalReading::ClosedBottom).map_err(e)?;
    if open.cochain != [1, 7, 13, 6] || open.euler != 1 {
        return Err(format!(
            "open reading gives {:?} (χ = {}), closed-bottom gives {:?} (χ = {})",
            open.cochain, open.euler, closed.cochain, closed.euler
        ));
    }
    Ok(format!("cochain {:?}, χ = {}, cohomology {:?}", open.cochain, open.euler, open.cohomology))
}

fn numeric_consistency() -> Outcome {
    let graphs: Vec<LayeredGraph> = admissible_profiles(9, UniqueMinOnly, false)
        .iter()
        .map(|p| enumerate(p, UniqueMinOnly, true))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?
        .into_iter()
        .flatten()
        .collect();
    let violations: Vec<String> = graphs
        .par_iter()
        .filter_map(|g| match is_koszul(g) {
            Ok(v) if !v.numeric.koszul && v.is_koszul() => Some(canonical_key(g).to_hex()),
            Ok(_) => None,
            Err(err) => Some(format!("{}: {err}", canonical_key(g))),
        })
        .collect();
    if let Some(first) = violations.first() {
        return Err(format!("{} graphs numerically non-Koszul but Koszul, e.g. {first}", violations.len()));
    }
    let h = find_h()?;
    let first = numerically_koszul(&h, None).map_err(e)?.first_failing_degree;
    expect("first failing degree of H", first, Some(4))?;
    Ok(format!("{} uniform graphs checked; H first fails in degree 4", graphs.len()))
}

/// `R_B` built from its definition: every non-edge monomial `u⊗w` plus
/// `u⊗ΣS(u)` for `|u| ≥ 2`.
fn relations_from_definition(g: &LayeredGraph) -> Subspace {
    let gens = GeneratorSpace::of(g);
    let t = gens.total();
    let vs: Vec<VertexId> = g.vertices().filter(|v| v.level >= 1).collect();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for &u in &vs {
        for &w in &vs {
            if !g.has_edge(u, w) {
                let mut r = vec![0; t * t];
                r[gens.position(u) * t + gens.position(w)] = 1;
                rows.push(r);
            }
        }
        if u.level >= 2 {
            let mut r = vec![0; t * t];
            for w in g.lower_covers(u).expect("vertex") {
                r[gens.position(u) * t + gens.position(w)] = 1;
            }
            rows.push(r);
        }
    }
    Subspace::span_int(t * t, &rows).expect("well-formed rows")
}

fn random_graph(rng: &mut ChaCha8Rng) -> LayeredGraph {
    loop {
        let height = rng.gen_range(1..=4);
        let sizes: Vec<usize> = std::iter::once(1).chain((0..height).map(|_| rng.gen_range(1..=3))).collect();
        if sizes.iter().sum::<usize>() > 9 {
            continue;
        }
        let mats: Vec<Vec<Vec<bool>>> = (0..height)
            .map(|l| {
                (0..sizes[l + 1])
                    .map(|_| {
                        let mut row: Vec<bool> = (0..sizes[l]).map(|_| rng.gen_bool(0.6)).collect();
                        let forced = rng.gen_range(0..sizes[l]);
                        row[forced] = true;
                        row
                    })
                    .collect()
            })
            .collect();
        return LayeredGraph::from_biadjacency(LayerProfile::new(sizes).expect("sizes"), &mats).expect("graph");
    }
}

fn algebra() -> Outcome {
    let d = diamond();
    expect("diamond h_B", hilbert_b(&d, 4).map_err(e)?.trimmed(), vec![1, 3, 1])?;
    expect("diamond h_B!", hilbert_b_dual(&d, 4).map_err(e)?.coefficients, vec![1, 3, 8, 21, 55])?;
    let n = numerically_koszul(&d, Some(8)).map_err(e)?;
    expect("diamond product to degree 8", n.product, [vec![1], vec![0; 8]].concat())?;

    let c = chain(3);
    expect("chain h_B", hilbert_b(&c, 4).map_err(e)?.trimmed(), vec![1, 2])?;
    expect("chain h_B!", hilbert_b_dual(&c, 4).map_err(e)?.coefficients, vec![1, 2, 4, 8, 16])?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..20 {
        let g = random_graph(&mut rng);
        let q = build_quadratic(&g).map_err(e)?;
        let oracle = relations_from_definition(&g).orthogonal_complement();
        let formula: usize = g.vertices().filter(|v| v.level >= 2).map(|v| g.lower_covers(v).map(|s| s.len() - 1).unwrap_or(0)).sum();
        expect(&format!("random graph {i}: R! against complement"), q.dual_relations(), oracle.clone())?;
        expect(&format!("random graph {i}: dim R!"), oracle.dim(), formula)?;
    }
    Ok("diamond, chain, 20 random graphs".into())
}

fn lattice() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let random_subspace = |rng: &mut ChaCha8Rng, n: usize| {
        let k = rng.gen_range(0..=n);
        let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        Subspace::span_int(n, &rows).expect("rows")
    };
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let pair = [random_subspace(&mut rng, n), random_subspace(&mut rng, n)];
        if !is_distributive(n, &pair).map_err(e)?.distributive {
            return Err("a pair of subspaces was reported non-distributive".into());
        }
    }
    let coords = [Subspace::coordinate(4, [0, 1]), Subspace::coordinate(4, [1, 2]), Subspace::coordinate(4, [0, 3])];
    if !is_distributive(4, &coords).map_err(e)?.distributive {
        return Err("coordinate subspaces reported non-distributive".into());
    }
    let lines = [
        Subspace::span_int(2, &[vec![1, 0]]).map_err(e)?,
        Subspace::span_int(2, &[vec![0, 1]]).map_err(e)?,
        Subspace::span_int(2, &[vec![1, 1]]).map_err(e)?,
    ];
    if is_distributive(2, &lines).map_err(e)?.distributive {
        return Err("three lines in the plane reported distributive".into());
    }
    let mut non_distributive = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=6);
        let xs = [random_subspace(&mut rng, n), random_subspace(&mut rng, n), random_subspace(&mut rng, n)];
        let (median, _, _) = median_test(&xs[0], &xs[1], &xs[2]).map_err(e)?;
        let closure = closure_test(n, &xs, DEFAULT_LATTICE_CAP).map_err(e)?.distributive;
        expect(&format!("instance {i}: median vs closure"), median, closure)?;
        non_distributive += usize::from(!median);
    }
    Ok(format!("200 random triples agree ({non_distributive} non-distributive)"))
}

fn pinch() -> Outcome {
    let graphs = enumerate(&profile("1,2,1,2,1"), UniqueMinOnly, true).map_err(e)?;
    for g in &graphs {
        if !check_pinch_consistency(g).map_err(e)? {
            return Err(format!("pinch implication fails on {}", canonical_key(g)));
        }
    }
    Ok(format!("{} uniform [1,2,1,2,1] graphs", graphs.len()))
}

fn determinism() -> Outcome {
    let mut outputs = BTreeSet::new();
    for jobs in [1, 4] {
        let mut opts = SearchOptions::new(9, UniqueMax);
        opts.jobs = Some(jobs);
        let r = run_search(&opts).map_err(e)?;
        outputs.insert((r.results_json(), r.summary_csv()));
    }
    expect("distinct reports across jobs 1 and 4", outputs.len(), 1)?;
    Ok("search(9) identical with 1 and 4 workers".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("enumeration counts", counts),
        ("koszulity and minimality", koszulity),
        ("cohomology of H", cohomology),
        ("numerical vs structural", numeric_consistency),
        ("algebra oracles", algebra),
        ("lattice engine", lattice),
        ("pinch decomposition", pinch),
        ("search determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{ms} ms]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
