use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use koszul_core::algebra::{build_quadratic, hilbert_b_dual_from, hilbert_b_from, numerically_koszul_from};
use koszul_core::cohomology::{cohomology_with, IntervalReading};
use koszul_core::enumerate::{canonical_key, catalog_to_jsonl, enumerate_entries};
use koszul_core::graph::{validate, LayerProfile, LayeredGraph, StructuralMode, VertexId};
use koszul_core::io::{from_json, to_dot};
use koszul_core::koszul::{is_koszul_with, KoszulOptions};
use koszul_core::search::{run_search, SearchOptions};
use koszul_core::Error;

#[derive(Parser)]
#[command(name = "koszul-lab", version, about = "Koszulity of layered-graph algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List one graph per isomorphism class for a layer profile.
    Enumerate {
        /// Layer sizes, e.g. 1,2,2,2,1
        #[arg(long)]
        profile: String,
        #[arg(long, default_value = "unique-max")]
        mode: String,
        #[arg(long)]
        uniform_only: bool,
        /// Write the JSON-lines catalog here.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Analyse a single graph file.
    Check {
        file: PathBuf,
        /// Degree bound for the Hilbert series and the numerical test (default 2N).
        #[arg(long)]
        bound: Option<usize>,
        /// Interval computation below vertex A (LEVEL or LEVEL,INDEX) within K levels.
        #[arg(long, num_args = 2, value_names = ["A", "K"])]
        cohomology: Option<Vec<String>>,
        #[arg(long, default_value = "open")]
        interval_reading: String,
        /// Decide Koszulity without the pinch-point shortcut.
        #[arg(long)]
        no_pinch: bool,
        /// Also write a Graphviz rendering of the graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check every uniform graph up to a vertex budget.
    Search {
        #[arg(long)]
        max_vertices: usize,
        #[arg(long, default_value = "unique-max")]
        mode: String,
        /// Also search profiles of height three or less.
        #[arg(long)]
        no_height_filter: bool,
        #[arg(long)]
        jobs: Option<usize>,
        /// Restrict to these profiles, separated by ';' (e.g. "1,2,2,2,1;1,3,2,2,1").
        #[arg(long)]
        profiles: Option<String>,
        /// Reuse (or create) per-profile catalogs in this directory.
        #[arg(long)]
        catalog_dir: Option<PathBuf>,
        /// Write report.json, summary.csv and non-koszul/*.json here.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Internal(format!("{}: {e}", path.display())))
}

fn parse_vertex(g: &LayeredGraph, s: &str) -> Result<VertexId, Error> {
    let parts: Vec<&str> = s.split([',', ':']).map(str::trim).collect();
    let num = |t: &str| t.parse::<usize>().map_err(|_| Error::Input(format!("bad vertex {s:?}")));
    let v = match parts.as_slice() {
        [level] => {
            let level = num(level)?;
            if level > g.height() || g.level_size(level) != 1 {
                return Err(Error::Input(format!(
                    "level {level} does not hold a single vertex; give the vertex as LEVEL,INDEX"
                )));
            }
            VertexId::new(level, 0)
        }
        [level, index] => VertexId::new(num(level)?, num(index)?),
        _ => return Err(Error::Input(format!("bad vertex {s:?}"))),
    };
    if !g.contains(v) {
        return Err(Error::Input(format!("vertex {v} is not in the graph")));
    }
    Ok(v)
}

fn cmd_enumerate(profile: &str, mode: &str, uniform_only: bool, out: Option<&Path>) -> Result<(), Error> {
    let profile: LayerProfile = profile.parse()?;
    let mode: StructuralMode = mode.parse()?;
    let entries = enumerate_entries(&profile, mode, uniform_only)?;
    if let Some(path) = out {
        write(path, &catalog_to_jsonl(&entries))?;
    }
    println!("{}", entries.len());
    Ok(())
}

struct CheckArgs<'a> {
    file: &'a Path,
    bound: Option<usize>,
    cohomology: Option<&'a [String]>,
    reading: &'a str,
    no_pinch: bool,
    dot: Option<&'a Path>,
}

fn cmd_check(args: CheckArgs<'_>) -> Result<(), Error> {
    let g = from_json(&read(args.file)?).map_err(|e| Error::Input(format!("{}: {e}", args.file.display())))?;
    let reading: IntervalReading = args.reading.parse()?;
    if let Some(path) = args.dot {
        let name = args.file.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
        write(path, &to_dot(&g, name))?;
    }

    let mut validation = serde_json::Map::new();
    for mode in StructuralMode::ALL {
        let v: Vec<String> = validate(&g, mode).iter().map(ToString::to_string).collect();
        validation.insert(mode.to_string(), json!(v));
    }
    let mut report = json!({
        "graph": {
            "profile": g.profile().sizes(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "key": canonical_key(&g).to_hex(),
        },
        "validation": validation,
    });
    if !validate(&g, StructuralMode::UniqueMinOnly).is_empty() {
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        return Err(Error::Input("graph lacks a unique minimal element".into()));
    }

    let min_bound = 2 * g.height();
    let bound = args.bound.unwrap_or(min_bound);
    if bound < min_bound {
        return Err(Error::Input(format!("--bound {bound} is below 2N = {min_bound}")));
    }
    let q = build_quadratic(&g)?;
    let uniform = g.uniformity_witness()?;
    report["uniform"] = json!(uniform.is_none());
    if let Some(v) = uniform {
        report["uniformity_witness"] = json!(v);
    }
    report["hilbert"] = json!({
        "h_B": hilbert_b_from(&q, bound)?.coefficients,
        "h_B_dual": hilbert_b_dual_from(&q, bound)?.coefficients,
    });
    report["numeric"] = serde_json::to_value(numerically_koszul_from(&q, bound)?).expect("json");
    report["koszul"] = if uniform.is_none() {
        let opts = KoszulOptions { use_pinch: !args.no_pinch, numeric_bound: Some(bound), ..KoszulOptions::default() };
        let verdict = is_koszul_with(&g, &opts)?;
        let mut summary = verdict.summary_json();
        summary["runs_checked"] = serde_json::to_value(&verdict.runs_checked).expect("json");
        if let Some(w) = &verdict.witness {
            summary["witness"] = serde_json::to_value(w).expect("json");
        }
        summary
    } else {
        json!({"status": "skipped: not quadratic-guaranteed"})
    };
    if let Some([a, k]) = args.cohomology {
        let a = parse_vertex(&g, a)?;
        let k: usize = k.parse().map_err(|_| Error::Input(format!("bad window size {k:?}")))?;
        report["cohomology"] = cohomology_with(&g, a, k, reading)?.to_json();
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

struct SearchArgs {
    max_vertices: usize,
    mode: String,
    no_height_filter: bool,
    jobs: Option<usize>,
    profiles: Option<String>,
    catalog_dir: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn cmd_search(args: SearchArgs) -> Result<(), Error> {
    let mut opts = SearchOptions::new(args.max_vertices, args.mode.parse()?);
    opts.height_filter = !args.no_height_filter;
    opts.jobs = args.jobs;
    opts.catalog_dir = args.catalog_dir;
    if let Some(list) = &args.profiles {
        let ps = list
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse::<LayerProfile>)
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(p) = ps.iter().find(|p| p.vertex_count() > args.max_vertices) {
            return Err(Error::Input(format!("profile {p} exceeds --max-vertices {}", args.max_vertices)));
        }
        opts.profiles = Some(ps);
    }
    let report = run_search(&opts)?;
    if let Some(dir) = &args.out {
        report.write_to(dir)?;
    }
    print!("{}", report.summary_csv());
    println!(
        "# uniform graphs checked: {}; non-koszul: {}",
        report.total_uniform(),
        report.total_non_koszul()
    );
    for f in &report.results.non_koszul_graphs {
        println!("# non-koszul {} profile {} vertices {} edges {}", f.key, f.profile, f.vertices, f.edges);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate { profile, mode, uniform_only, out } => {
            cmd_enumerate(&profile, &mode, uniform_only, out.as_deref())
        }
        Command::Check { file, bound, cohomology, interval_reading, no_pinch, dot } => cmd_check(CheckArgs {
            file: &file,
            bound,
            cohomology: cohomology.as_deref(),
            reading: &interval_reading,
            no_pinch,
            dot: dot.as_deref(),
        }),
        Command::Search { max_vertices, mode, no_height_filter, jobs, profiles, catalog_dir, out } => {
            cmd_search(SearchArgs { max_vertices, mode, no_height_filter, jobs, profiles, catalog_dir, out })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("koszul-lab: {e}");
            match e {
                Error::Input(_) => ExitCode::from(1),
                Error::Limit(_) | Error::Internal(_) => ExitCode::from(2),
            }
        }
    }
}
