//! Command-line benchmark harness for the packed memory array structures.
//!
//! Every command prints a TSV table (header row, then data rows) to stdout or
//! `--output`. Times are in seconds, throughputs in operations per second.
//! Output content (not timing) is deterministic for a fixed seed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::{Command as Process, Stdio};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpma::graph::{load_edge_list_binary, load_edge_list_text, required_vertices, rmat_generate, GraphStore};
use cpma::{sort_dedupe, Batch, CompressedLeaf, LeafStore, PmaSet, SetConfig, UncompressedLeaf};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "bench", about = "Microbenchmarks for batch-parallel packed memory arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a base set, then time batched inserts.
    BatchInsert(CommonArgs),
    /// Time parallel range-sum queries of a fixed expected width.
    RangeQuery(CommonArgs),
    /// Report bytes per element while building up to the target size.
    Space(CommonArgs),
    /// Sweep growing factors and report time/space/scan trade-offs.
    GrowingFactor {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated growing factors to sweep.
        #[arg(long, default_value = "1.1,1.2,1.5,2.0")]
        factors: String,
    },
    /// Strong scaling (threads on one set) or weak scaling (one set per process).
    Scaling {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = ScalingMode::Strong)]
        mode: ScalingMode,
    },
    /// Graph benchmarks over the compressed structure.
    Graph {
        #[command(flatten)]
        common: CommonArgs,
        #[command(subcommand)]
        algo: GraphCommand,
    },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// PageRank; prints one rank per vertex.
    Pr {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
    },
    /// Connected components; prints one label per vertex.
    Cc {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Edge-insert throughput as a function of batch size.
    Insert {
        #[command(flatten)]
        input: GraphInput,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Edge-list file: one "u v" pair per line (or little-endian u32 pairs
    /// with --binary). Lines starting with '#' or '%' are skipped.
    #[arg(long, conflicts_with = "rmat")]
    graph: Option<String>,
    /// Treat --graph as binary little-endian u32 pairs.
    #[arg(long, requires = "graph")]
    binary: bool,
    /// Generate an RMAT graph: nv,ne,a,b,c,d.
    #[arg(long)]
    rmat: Option<String>,
    /// Do not insert the reverse of each edge.
    #[arg(long)]
    directed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Pma,
    Cpma,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingMode {
    Strong,
    Weak,
}

#[derive(Args)]
struct CommonArgs {
    /// Data structure under test.
    #[arg(long, value_enum, default_value_t = Structure::Cpma)]
    structure: Structure,
    /// Elements in the structure before the timed phase.
    #[arg(long, default_value_t = 1_000_000)]
    initial: usize,
    /// Elements inserted during the timed phase.
    #[arg(long, default_value_t = 1_000_000)]
    inserts: usize,
    /// Keys per batch in the timed phase.
    #[arg(long, default_value_t = 10_000)]
    batch_size: usize,
    /// Keys are uniform in [1, 2^key_bits).
    #[arg(long, default_value_t = 40)]
    key_bits: u32,
    /// Range queries per trial.
    #[arg(long, default_value_t = 100_000)]
    num_queries: usize,
    /// Expected elements per range query.
    #[arg(long, default_value_t = 100)]
    expected_range_len: usize,
    /// Worker threads (default: all hardware threads).
    #[arg(long)]
    threads: Option<usize>,
    /// Capacity growth factor on resize.
    #[arg(long, default_value_t = 1.2)]
    growing_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measured trials; one extra warm-up trial always runs first.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Write the TSV here instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

impl CommonArgs {
    fn validate(&self) -> Result<(), String> {
        if self.key_bits == 0 || self.key_bits > 64 {
            return Err("key-bits must be in 1..=64".into());
        }
        if self.growing_factor <= 1.0 {
            return Err("growing-factor must exceed 1".into());
        }
        if self.batch_size == 0 || self.trials == 0 || self.num_queries == 0 {
            return Err("counts must be positive".into());
        }
        Ok(())
    }

    fn threads(&self) -> usize {
        self.threads.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        })
    }

    fn writer(&self) -> io::Result<Box<dyn Write + Send>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }

    fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads())
            .build()
            .expect("thread pool")
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = run(cli) {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::BatchInsert(c) => dispatch(&c, cmd_batch_insert::<UncompressedLeaf>, cmd_batch_insert::<CompressedLeaf>),
        Command::RangeQuery(c) => dispatch(&c, cmd_range_query::<UncompressedLeaf>, cmd_range_query::<CompressedLeaf>),
        Command::Space(c) => dispatch(&c, cmd_space::<UncompressedLeaf>, cmd_space::<CompressedLeaf>),
        Command::GrowingFactor { common, factors } => {
            common.validate()?;
            let factors: Vec<f64> = factors
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            match common.structure {
                Structure::Pma => cmd_growing_factor::<UncompressedLeaf>(&common, &factors),
                Structure::Cpma => cmd_growing_factor::<CompressedLeaf>(&common, &factors),
            }
        }
        Command::Scaling { common, mode } => {
            common.validate()?;
            match mode {
                ScalingMode::Strong => match common.structure {
                    Structure::Pma => cmd_scaling_strong::<UncompressedLeaf>(&common),
                    Structure::Cpma => cmd_scaling_strong::<CompressedLeaf>(&common),
                },
                ScalingMode::Weak => cmd_scaling_weak(&common),
            }
        }
        Command::Graph { common, algo } => {
            common.validate()?;
            cmd_graph(&common, algo)
        }
    }
}

fn dispatch(
    common: &CommonArgs,
    pma: fn(&CommonArgs) -> Result<(), String>,
    cpma: fn(&CommonArgs) -> Result<(), String>,
) -> Result<(), String> {
    common.validate()?;
    match common.structure {
        Structure::Pma => pma(common),
        Structure::Cpma => cpma(common),
    }
}

/// Uniform keys in [1, 2^key_bits).
fn gen_keys(rng: &mut ChaCha8Rng, count: usize, key_bits: u32) -> Vec<u64> {
    (0..count)
        .map(|_| {
            if key_bits == 64 {
                rng.gen_range(1..=u64::MAX)
            } else {
                rng.gen_range(1..(1u64 << key_bits))
            }
        })
        .collect()
}

fn new_set<L: LeafStore>(common: &CommonArgs) -> Result<PmaSet<L>, String> {
    let config = SetConfig::for_codec::<L>().with_growing_factor(common.growing_factor);
    PmaSet::with_config(config).map_err(|e| e.to_string())
}

/// Builds a set of roughly `n` uniform keys (exact up to random duplicates).
fn build_set<L: LeafStore>(
    common: &CommonArgs,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PmaSet<L>, String> {
    let mut set = new_set::<L>(common)?;
    let mut remaining = n;
    while remaining > 0 {
        let take = remaining.min(1 << 20);
        let batch = sort_dedupe(gen_keys(rng, take, common.key_bits)).map_err(|e| e.to_string())?;
        set.batch_insert(&batch);
        remaining -= take;
    }
    Ok(set)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn cmd_batch_insert<L: LeafStore>(common: &CommonArgs) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    let pool = common.pool();
    writeln!(out, "trial\tbatch_size\tseconds\tinserts_per_second").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut times = Vec::new();
    for trial in 0..=common.trials {
        let mut set = build_set::<L>(common, common.initial, &mut rng)?;
        let batches: Vec<Batch> = gen_keys(&mut rng, common.inserts, common.key_bits)
            .chunks(common.batch_size)
            .map(|c| sort_dedupe(c.to_vec()).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let start = Instant::now();
        pool.install(|| {
            for batch in &batches {
                set.batch_insert(batch);
            }
        });
        let secs = start.elapsed().as_secs_f64();
        let label = if trial == 0 { "warmup".to_string() } else { trial.to_string() };
        writeln!(
            out,
            "{label}\t{}\t{secs:.6}\t{:.1}",
            common.batch_size,
            common.inserts as f64 / secs
        )
        .map_err(|e| e.to_string())?;
        if trial > 0 {
            times.push(secs);
        }
    }
    let m = mean(&times);
    writeln!(out, "mean\t{}\t{m:.6}\t{:.1}", common.batch_size, common.inserts as f64 / m)
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_range_query<L: LeafStore>(common: &CommonArgs) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    let pool = common.pool();
    writeln!(out, "trial\texpected_range_len\tseconds\telements_per_second\tsum").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let set = build_set::<L>(common, common.initial, &mut rng)?;
    let key_space = if common.key_bits == 64 { u64::MAX } else { 1u64 << common.key_bits };
    // Width chosen so a uniform set of len() keys yields the expected count.
    let width = ((common.expected_range_len as u128 * key_space as u128)
        / set.len().max(1) as u128)
        .min(u64::MAX as u128) as u64;
    let mut times = Vec::new();
    let mut counts = Vec::new();
    for trial in 0..=common.trials {
        let starts = gen_keys(&mut rng, common.num_queries, common.key_bits);
        let start = Instant::now();
        let (sum, count) = pool.install(|| {
            starts
                .par_iter()
                .map(|&s| set.range_sum(s, s.saturating_add(width)))
                .reduce(|| (0u64, 0usize), |a, b| (a.0.wrapping_add(b.0), a.1 + b.1))
        });
        let secs = start.elapsed().as_secs_f64();
        let label = if trial == 0 { "warmup".to_string() } else { trial.to_string() };
        writeln!(
            out,
            "{label}\t{}\t{secs:.6}\t{:.1}\t{sum}",
            common.expected_range_len,
            count as f64 / secs
        )
        .map_err(|e| e.to_string())?;
        if trial > 0 {
            times.push(secs);
            counts.push(count as f64);
        }
    }
    writeln!(
        out,
        "mean\t{}\t{:.6}\t{:.1}\t-",
        common.expected_range_len,
        mean(&times),
        mean(&counts) / mean(&times)
    )
    .map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_space<L: LeafStore>(common: &CommonArgs) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    let pool = common.pool();
    writeln!(out, "n\ttotal_bytes\tbytes_per_element").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut set = new_set::<L>(common)?;
    // Report at each decade reached, then at the final size.
    let mut next_report = 1000usize;
    let mut remaining = common.initial;
    pool.install(|| -> Result<(), String> {
        while remaining > 0 {
            let take = remaining.min(common.batch_size);
            let batch = sort_dedupe(gen_keys(&mut rng, take, common.key_bits))
                .map_err(|e| e.to_string())?;
            set.batch_insert(&batch);
            remaining -= take;
            if set.len() >= next_report || remaining == 0 {
                let s = set.size_stats();
                writeln!(out, "{}\t{}\t{:.3}", s.element_count, s.total_bytes, s.bytes_per_element)
                    .map_err(|e| e.to_string())?;
                while next_report <= set.len() {
                    next_report *= 10;
                }
            }
        }
        Ok(())
    })
}

fn cmd_growing_factor<L: LeafStore>(common: &CommonArgs, factors: &[f64]) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    let pool = common.pool();
    writeln!(
        out,
        "factor\tinsert_seconds\tavg_bytes_per_element\tmax_bytes_per_element\tavg_scan_seconds"
    )
    .map_err(|e| e.to_string())?;
    for &factor in factors {
        if factor <= 1.0 {
            return Err(format!("growing factor {factor} must exceed 1"));
        }
        let sub = CommonArgs {
            growing_factor: factor,
            output: None,
            threads: common.threads,
            structure: common.structure,
            initial: common.initial,
            inserts: common.inserts,
            batch_size: common.batch_size,
            key_bits: common.key_bits,
            num_queries: common.num_queries,
            expected_range_len: common.expected_range_len,
            seed: common.seed,
            trials: common.trials,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        let mut set = build_set::<L>(&sub, common.initial, &mut rng)?;
        let batches: Vec<Batch> = gen_keys(&mut rng, common.inserts, common.key_bits)
            .chunks(common.batch_size)
            .map(|c| sort_dedupe(c.to_vec()).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let mut sizes = Vec::new();
        let start = Instant::now();
        pool.install(|| {
            for batch in &batches {
                set.batch_insert(batch);
                sizes.push(set.size_stats().bytes_per_element);
            }
        });
        let insert_secs = start.elapsed().as_secs_f64();
        let max_size = sizes.iter().cloned().fold(0.0f64, f64::max);
        let scan_start = Instant::now();
        let scans = 3;
        let mut total = 0u64;
        for _ in 0..scans {
            total = total.wrapping_add(set.range_sum(1, u64::MAX).0);
        }
        let avg_scan = scan_start.elapsed().as_secs_f64() / scans as f64;
        writeln!(
            out,
            "{factor}\t{insert_secs:.6}\t{:.3}\t{max_size:.3}\t{avg_scan:.6}",
            mean(&sizes)
        )
        .map_err(|e| e.to_string())?;
        // Keep the scan sum live so the loop is not optimized away.
        if total == 1 {
            eprintln!("scan sum {total}");
        }
    }
    Ok(())
}

fn cmd_scaling_strong<L: LeafStore>(common: &CommonArgs) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    writeln!(out, "threads\tseconds\tspeedup\tchecksum").map_err(|e| e.to_string())?;
    let max_threads = common.threads();
    let mut counts = vec![1usize];
    while *counts.last().unwrap() * 2 <= max_threads {
        counts.push(counts.last().unwrap() * 2);
    }
    if *counts.last().unwrap() != max_threads {
        counts.push(max_threads);
    }
    let mut base_time = None;
    for &t in &counts {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| e.to_string())?;
        let mut times = Vec::new();
        let mut checksum = 0u64;
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        for trial in 0..=common.trials {
            let mut set = build_set::<L>(common, common.initial, &mut rng)?;
            let batches: Vec<Batch> = gen_keys(&mut rng, common.inserts, common.key_bits)
                .chunks(common.batch_size)
                .map(|c| sort_dedupe(c.to_vec()).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            let start = Instant::now();
            pool.install(|| {
                for batch in &batches {
                    set.batch_insert(batch);
                }
            });
            if trial > 0 {
                times.push(start.elapsed().as_secs_f64());
            }
            checksum = set.checksum();
        }
        let m = mean(&times);
        let base = *base_time.get_or_insert(m);
        writeln!(out, "{t}\t{m:.6}\t{:.3}\t{checksum:016x}", base / m).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn cmd_scaling_weak(common: &CommonArgs) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    writeln!(out, "processes\tseconds\tslowdown").map_err(|e| e.to_string())?;
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let max_procs = common.threads();
    let mut counts = vec![1usize];
    while *counts.last().unwrap() * 2 <= max_procs {
        counts.push(counts.last().unwrap() * 2);
    }
    if *counts.last().unwrap() != max_procs {
        counts.push(max_procs);
    }
    let structure = match common.structure {
        Structure::Pma => "pma",
        Structure::Cpma => "cpma",
    };
    let mut base_time = None;
    for &p in &counts {
        let start = Instant::now();
        let mut children = Vec::new();
        for i in 0..p {
            let child = Process::new(&exe)
                .args([
                    "batch-insert",
                    "--structure",
                    structure,
                    "--initial",
                    &common.initial.to_string(),
                    "--inserts",
                    &common.inserts.to_string(),
                    "--batch-size",
                    &common.batch_size.to_string(),
                    "--key-bits",
                    &common.key_bits.to_string(),
                    "--growing-factor",
                    &common.growing_factor.to_string(),
                    "--threads",
                    "1",
                    "--trials",
                    &common.trials.to_string(),
                    "--seed",
                    &(common.seed + i as u64).to_string(),
                ])
                .stdout(Stdio::null())
                .spawn()
                .map_err(|e| e.to_string())?;
            children.push(child);
        }
        for mut child in children {
            let status = child.wait().map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("worker process exited with {status}"));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let base = *base_time.get_or_insert(secs);
        writeln!(out, "{p}\t{secs:.6}\t{:.3}", secs / base).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn load_graph(common: &CommonArgs, input: &GraphInput) -> Result<GraphStore, String> {
    let pairs = if let Some(path) = &input.graph {
        if input.binary {
            load_edge_list_binary(path).map_err(|e| e.to_string())?
        } else {
            load_edge_list_text(path).map_err(|e| e.to_string())?
        }
    } else if let Some(spec) = &input.rmat {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err("--rmat expects nv,ne,a,b,c,d".into());
        }
        let nv: usize = parts[0].parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
        let ne: usize = parts[1].parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
        let probs: Vec<f64> = parts[2..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        rmat_generate(nv, ne, probs[0], probs[1], probs[2], probs[3], common.seed)
            .map_err(|e| e.to_string())?
    } else {
        return Err("provide --graph FILE or --rmat nv,ne,a,b,c,d".into());
    };
    let nv = required_vertices(&pairs);
    let mut graph = GraphStore::new(nv.max(1)).map_err(|e| e.to_string())?;
    graph
        .insert_edges(&pairs, !input.directed)
        .map_err(|e| e.to_string())?;
    Ok(graph)
}

fn cmd_graph(common: &CommonArgs, algo: GraphCommand) -> Result<(), String> {
    let mut out = common.writer().map_err(|e| e.to_string())?;
    let pool = common.pool();
    match algo {
        GraphCommand::Pr { input, iterations, damping } => {
            let mut graph = load_graph(common, &input)?;
            graph.build_offsets();
            let start = Instant::now();
            let ranks = pool.install(|| graph.pagerank(iterations, damping));
            eprintln!("pagerank: {:.6}s", start.elapsed().as_secs_f64());
            writeln!(out, "vertex\trank").map_err(|e| e.to_string())?;
            for (v, r) in ranks.iter().enumerate() {
                writeln!(out, "{v}\t{r:.9}").map_err(|e| e.to_string())?;
            }
        }
        GraphCommand::Cc { input } => {
            let mut graph = load_graph(common, &input)?;
            graph.build_offsets();
            let start = Instant::now();
            let labels = pool.install(|| graph.connected_components());
            eprintln!("connected components: {:.6}s", start.elapsed().as_secs_f64());
            writeln!(out, "vertex\tcomponent").map_err(|e| e.to_string())?;
            for (v, c) in labels.iter().enumerate() {
                writeln!(out, "{v}\t{c}").map_err(|e| e.to_string())?;
            }
        }
        GraphCommand::Insert { input } => {
            // Re-load the raw pairs so each batch size starts from scratch.
            let full = load_graph(common, &input)?;
            let pairs: Vec<(u32, u32)> = full
                .edge_set()
                .to_vec()
                .into_iter()
                .map(cpma::graph::decode_edge)
                .collect();
            let nv = full.num_vertices();
            writeln!(out, "batch_size\tseconds\tinserts_per_second").map_err(|e| e.to_string())?;
            let mut size = 10usize;
            loop {
                let size_now = size.min(common.batch_size).max(1);
                let mut graph = GraphStore::new(nv).map_err(|e| e.to_string())?;
                let start = Instant::now();
                pool.install(|| -> Result<(), String> {
                    for chunk in pairs.chunks(size_now) {
                        graph.insert_edges(chunk, false).map_err(|e| e.to_string())?;
                    }
                    Ok(())
                })?;
                let secs = start.elapsed().as_secs_f64();
                writeln!(out, "{size_now}\t{secs:.6}\t{:.1}", pairs.len() as f64 / secs)
                    .map_err(|e| e.to_string())?;
                if size >= common.batch_size {
                    break;
                }
                size *= 10;
            }
        }
    }
    Ok(())
}
