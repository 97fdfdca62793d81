// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sti_core::bench::{erdos_renyi, run_bench, scale_free, timed_build, to_csv, BenchConfig};
use sti_core::{load_edge_list, Algo, CoreQuery, EdgeList, IdMap, Sti, StiError};

/// Exit status when a core query finds `k` above the vertex's coreness.
const NOT_IN_CORE: u8 = 2;

#[derive(Parser)]
#[command(name = "sti", version, about = "Shell tree index over the k-core hierarchy of a graph")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the index for an edge list and write it to a file.
    Build {
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Answer a query against a stored index.
    Query {
        index: PathBuf,
        #[command(subcommand)]
        what: QueryCmd,
    },
    /// Batch-size sweep over the update algorithms, written as CSV.
    Bench {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "fs,se,ba")]
        algos: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Half of each batch deletes other edges.
        #[arg(long)]
        mixed: bool,
        /// Skip the comparison against a from-scratch index.
        #[arg(long)]
        no_verify: bool,
    },
    /// Write a synthetic edge list.
    Generate {
        #[arg(value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        /// Average degree / 2 (edges per new vertex for scale-free).
        #[arg(long, default_value_t = 4)]
        avg: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QueryCmd {
    /// Coreness of a vertex.
    K {
        vertex: Option<u64>,
        /// Every vertex as `id kappa`, sorted by id.
        #[arg(long, conflicts_with = "vertex")]
        all: bool,
    },
    /// The connected k-core containing a vertex, one id per line.
    Core { vertex: u64, k: u32 },
    /// The whole hierarchy in index format.
    Hierarchy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    ScaleFree,
    ErdosRenyi,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        // a closed pipe (`sti query ... | head`) is not a failure
        Err(StiError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn read_graph(path: &Path) -> Result<EdgeList, StiError> {
    let list = load_edge_list(BufReader::new(File::open(path)?))?;
    if list.self_loops + list.duplicates > 0 {
        eprintln!("skipped {} self-loops and {} duplicate edges", list.self_loops, list.duplicates);
    }
    Ok(list)
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn lookup(ids: &IdMap, v: u64) -> Result<usize, StiError> {
    ids.dense(v).ok_or(StiError::UnknownVertex(v))
}

fn run(cli: Cli) -> Result<ExitCode, StiError> {
    match cli.cmd {
        Cmd::Build { graph, output } => {
            let list = read_graph(&graph)?;
            let (sti, t) = timed_build(&list.graph)?;
            std::fs::write(&output, sti.dump(&list.ids))?;
            println!("vertices {} edges {} tree nodes {}", list.graph.n(), list.graph.m(), sti.node_count());
            println!("peel_ms {:.3}", t.peel.as_secs_f64() * 1e3);
            println!("dag_ms {:.3}", t.dag.as_secs_f64() * 1e3);
            println!("tree_ms {:.3}", t.tree.as_secs_f64() * 1e3);
        }
        Cmd::Query { index, what } => {
            let (sti, ids) = Sti::load(&std::fs::read_to_string(&index)?)?;
            let mut out = sink(None)?;
            match what {
                QueryCmd::K { all: true, .. } => {
                    let mut rows: Vec<(u64, u32)> = (0..ids.len())
                        .map(|v| Ok((ids.original(v), sti.query_k(v)?)))
                        .collect::<Result<_, StiError>>()?;
                    rows.sort_unstable();
                    for (id, k) in rows {
                        writeln!(out, "{id} {k}")?;
                    }
                }
                QueryCmd::K { vertex: Some(v), .. } => writeln!(out, "{}", sti.query_k(lookup(&ids, v)?)?)?,
                QueryCmd::K { vertex: None, .. } => {
                    return Err(StiError::Config("give a vertex or --all".into()));
                }
                QueryCmd::Core { vertex, k } => match sti.query_core(lookup(&ids, vertex)?, k)? {
                    CoreQuery::Found(vs) => {
                        let mut orig: Vec<u64> = vs.into_iter().map(|v| ids.original(v)).collect();
                        orig.sort_unstable();
                        for v in orig {
                            writeln!(out, "{v}")?;
                        }
                    }
                    CoreQuery::NotInCore => {
                        eprintln!("vertex {vertex} is not in any {k}-core");
                        return Ok(ExitCode::from(NOT_IN_CORE));
                    }
                },
                QueryCmd::Hierarchy => out.write_all(sti.dump(&ids).as_bytes())?,
            }
            out.flush()?;
        }
        Cmd::Bench { graph, sizes, trials, algos, seed, output, mixed, no_verify } => {
            let list = read_graph(&graph)?;
            let algos = algos.iter().map(|a| a.parse::<Algo>()).collect::<Result<Vec<_>, _>>()?;
            let name = graph.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned());
            let cfg =
                BenchConfig { graph_name: name, batch_sizes: sizes, trials, algos, seed, mixed, verify: !no_verify };
            let rows = run_bench(&list.graph, &cfg)?;
            let mut out = sink(output.as_deref())?;
            out.write_all(to_csv(&rows).as_bytes())?;
            out.flush()?;
        }
        Cmd::Generate { model, n, avg, seed, output } => {
            if n < 2 || avg == 0 || (matches!(model, Model::ErdosRenyi) && n * avg > n * (n - 1) / 2) {
                return Err(StiError::Config(format!("cannot generate {n} vertices with average {avg}")));
            }
            let g = match model {
                Model::ScaleFree => scale_free(n, avg, seed),
                Model::ErdosRenyi => erdos_renyi(n, n * avg, seed),
            };
            let mut edges: Vec<(usize, usize)> = g.edges().collect();
            edges.sort_unstable();
            let mut out = sink(output.as_deref())?;
            writeln!(out, "# {} vertices, {} edges", g.n(), g.m())?;
            for (u, v) in edges {
                writeln!(out, "{u} {v}")?;
            }
            out.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
