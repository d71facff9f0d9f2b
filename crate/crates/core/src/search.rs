//! Exhaustive Koszulity search over all admissible layer profiles up to a
//! vertex budget.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{catalog_from_jsonl, catalog_to_jsonl, enumerate_entries, CanonicalKey, Enumerated};
use crate::error::{Error, Result};
use crate::graph::{LayerProfile, StructuralMode};
use crate::io::{to_json, GraphRecord};
use crate::koszul::{is_koszul_with, KoszulOptions};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_vertices: usize,
    pub mode: StructuralMode,
    /// Skip profiles of height ≤ 3.
    pub height_filter: bool,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Restrict to these profiles instead of all admissible ones.
    pub profiles: Option<Vec<LayerProfile>>,
    /// Read catalogs from here when present, write them otherwise.
    pub catalog_dir: Option<PathBuf>,
    pub koszul: KoszulOptions,
}

impl SearchOptions {
    pub fn new(max_vertices: usize, mode: StructuralMode) -> Self {
        SearchOptions {
            max_vertices,
            mode,
            height_filter: true,
            jobs: None,
            profiles: None,
            catalog_dir: None,
            koszul: KoszulOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchRow {
    pub profile: LayerProfile,
    pub mode: StructuralMode,
    pub total: usize,
    pub uniform: usize,
    pub koszul: usize,
    pub non_koszul: usize,
    pub non_koszul_keys: Vec<CanonicalKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoundGraph {
    pub key: CanonicalKey,
    pub profile: LayerProfile,
    pub vertices: usize,
    pub edges: usize,
    pub numeric_first_fail: Option<usize>,
    pub run: Vec<usize>,
    pub graph: GraphRecord,
}

/// Everything that may vary between otherwise identical runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvironmentStamp {
    pub version: String,
    pub field: String,
    pub numeric_bound: String,
    pub lattice_cap: usize,
    pub jobs: usize,
    pub wall_clock_ms: u128,
}

/// Results proper: deterministic for fixed inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResults {
    pub max_vertices: usize,
    pub mode: StructuralMode,
    pub height_filter: bool,
    pub rows: Vec<SearchRow>,
    pub non_koszul_graphs: Vec<FoundGraph>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub results: SearchResults,
    pub environment: EnvironmentStamp,
}

impl SearchReport {
    pub fn total_uniform(&self) -> usize {
        self.results.rows.iter().map(|r| r.uniform).sum()
    }

    pub fn total_non_koszul(&self) -> usize {
        self.results.rows.iter().map(|r| r.non_koszul).sum()
    }

    pub fn results_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("results serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV line per profile row.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("profile,mode,vertices,total,uniform,koszul,non_koszul,non_koszul_keys\n");
        for r in &self.results.rows {
            let keys: Vec<String> = r.non_koszul_keys.iter().map(CanonicalKey::to_hex).collect();
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{},{},{}\n",
                r.profile,
                r.mode,
                r.profile.vertex_count(),
                r.total,
                r.uniform,
                r.koszul,
                r.non_koszul,
                keys.join(";")
            ));
        }
        out
    }

    /// Writes `report.json`, `summary.csv` and one canonical JSON file per
    /// non-Koszul graph under `non-koszul/`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Internal(format!("writing {}: {e}", dir.display()));
        fs::create_dir_all(dir.join("non-koszul")).map_err(io)?;
        fs::write(dir.join("report.json"), self.to_json() + "\n").map_err(io)?;
        fs::write(dir.join("summary.csv"), self.summary_csv()).map_err(io)?;
        for f in &self.results.non_koszul_graphs {
            let g = f.graph.clone().into_graph()?;
            fs::write(dir.join("non-koszul").join(format!("{}.json", f.key)), to_json(&g) + "\n").map_err(io)?;
        }
        Ok(())
    }
}

/// All profiles `[1, z_1, …, z_N]` with `N ≥ 1` and at most `max_vertices`
/// vertices (and `N ≥ 4` with the height filter), admissible for `mode`,
/// sorted by vertex count and then lexicographically.
pub fn admissible_profiles(max_vertices: usize, mode: StructuralMode, height_filter: bool) -> Vec<LayerProfile> {
    fn compositions(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for z in 1..=rest {
            cur.push(z);
            compositions(rest - z, cur, out);
            cur.pop();
        }
    }
    let mut tails = Vec::new();
    compositions(max_vertices.saturating_sub(1), &mut Vec::new(), &mut tails);
    let mut out: Vec<LayerProfile> = tails
        .into_iter()
        .filter(|t| !height_filter || t.len() >= 4)
        .filter(|t| mode != StructuralMode::UniqueMax || t.last() == Some(&1))
        .map(|t| {
            let mut sizes = vec![1];
            sizes.extend(t);
            LayerProfile::new(sizes).expect("positive sizes")
        })
        .collect();
    out.sort_by(|a, b| (a.vertex_count(), a.sizes()).cmp(&(b.vertex_count(), b.sizes())));
    out
}

fn catalog_path(dir: &Path, p: &LayerProfile, mode: StructuralMode) -> PathBuf {
    let name: Vec<String> = p.sizes().iter().map(usize::to_string).collect();
    dir.join(mode.as_str()).join(format!("{}.jsonl", name.join("-")))
}

fn load_or_enumerate(p: &LayerProfile, mode: StructuralMode, dir: Option<&Path>) -> Result<Vec<Enumerated>> {
    let Some(dir) = dir else {
        return enumerate_entries(p, mode, false);
    };
    let path = catalog_path(dir, p, mode);
    if path.exists() {
        let text = fs::read_to_string(&path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        return catalog_from_jsonl(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())));
    }
    let entries = enumerate_entries(p, mode, false)?;
    let io = |e: std::io::Error| Error::Internal(format!("writing {}: {e}", path.display()));
    fs::create_dir_all(path.parent().expect("catalog file has a parent")).map_err(io)?;
    fs::write(&path, catalog_to_jsonl(&entries)).map_err(io)?;
    Ok(entries)
}

pub fn run_search(opts: &SearchOptions) -> Result<SearchReport> {
    if opts.max_vertices < 3 {
        return Err(Error::input("max_vertices must be at least 3"));
    }
    let started = Instant::now();
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = opts.jobs {
            b = b.num_threads(j.max(1));
        }
        b.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))?
    };
    let mut profiles = match &opts.profiles {
        Some(ps) => ps.clone(),
        None => admissible_profiles(opts.max_vertices, opts.mode, opts.height_filter),
    };
    profiles.sort_by(|a, b| (a.vertex_count(), a.sizes()).cmp(&(b.vertex_count(), b.sizes())));
    profiles.dedup();

    let catalogs = pool.install(|| {
        profiles
            .par_iter()
            .map(|p| load_or_enumerate(p, opts.mode, opts.catalog_dir.as_deref()))
            .collect::<Result<Vec<_>>>()
    })?;

    let jobs: Vec<(usize, &Enumerated)> = catalogs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().filter(|e| e.uniform).map(move |e| (i, e)))
        .collect();
    let verdicts = pool.install(|| {
        jobs.par_iter().map(|(_, e)| is_koszul_with(&e.graph, &opts.koszul)).collect::<Result<Vec<_>>>()
    })?;

    let mut rows: Vec<SearchRow> = profiles
        .iter()
        .zip(&catalogs)
        .map(|(p, c)| SearchRow {
            profile: p.clone(),
            mode: opts.mode,
            total: c.len(),
            uniform: c.iter().filter(|e| e.uniform).count(),
            koszul: 0,
            non_koszul: 0,
            non_koszul_keys: Vec::new(),
        })
        .collect();
    let mut found = Vec::new();
    for ((i, e), v) in jobs.iter().zip(&verdicts) {
        let row = &mut rows[*i];
        if v.is_koszul() {
            row.koszul += 1;
        } else {
            row.non_koszul += 1;
            row.non_koszul_keys.push(e.key.clone());
            found.push(FoundGraph {
                key: e.key.clone(),
                profile: e.graph.profile().clone(),
                vertices: e.graph.vertex_count(),
                edges: e.graph.edge_count(),
                numeric_first_fail: v.numeric.first_failing_degree,
                run: v.witness.as_ref().map(|w| w.run.clone()).unwrap_or_default(),
                graph: (&e.graph).into(),
            });
        }
    }
    for r in &mut rows {
        r.non_koszul_keys.sort();
    }
    found.sort_by(|a, b| (a.vertices, a.profile.sizes(), &a.key).cmp(&(b.vertices, b.profile.sizes(), &b.key)));

    let environment = EnvironmentStamp {
        version: env!("CARGO_PKG_VERSION").to_string(),
        field: "Q (arbitrary-precision rationals)".into(),
        numeric_bound: opts.koszul.numeric_bound.map_or_else(|| "2N".into(), |b| b.to_string()),
        lattice_cap: opts.koszul.lattice_cap,
        jobs: pool.current_num_threads(),
        wall_clock_ms: started.elapsed().as_millis(),
    };
    Ok(SearchReport {
        results: SearchResults {
            max_vertices: opts.max_vertices,
            mode: opts.mode,
            height_filter: opts.height_filter,
            rows,
            non_koszul_graphs: found,
        },
        environment,
    })
}
