//! Command-line surface. Exit codes are a stable contract: 0 for a
//! positive finding, 1 for a negative one, 2 for input errors, 3 when a
//! time budget cut a search short.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::digraph::{ColouredInstance, Pattern, VertexPartition};
use crate::format;
use crate::hwalk;
use crate::kernel;
use crate::recognizer::{self, fmt_set, Verdict};
use crate::reductions;
use crate::search::{self, FalsifyOutcome, RowOutcome, SearchBounds};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(
    name = "hkernel",
    about = "Kernels by H-walks in arc-coloured digraphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decide whether a pattern is panchromatic; print a certificate or
    /// refutations.
    Recognize {
        /// Pattern file.
        pattern: PathBuf,
    },
    /// Find an H-kernel of a coloured instance.
    Kernel {
        /// Instance file.
        instance: PathBuf,
        /// Pattern file.
        pattern: PathBuf,
    },
    /// Query the H-walk reachability relation.
    Reach {
        instance: PathBuf,
        pattern: PathBuf,
        /// Start vertex (requires --to).
        #[arg(long, conflicts_with = "matrix", requires = "to")]
        from: Option<usize>,
        /// Target vertex (requires --from).
        #[arg(long, conflicts_with = "matrix", requires = "from")]
        to: Option<usize>,
        /// Print the whole relation as an n x n 0/1 grid.
        #[arg(long)]
        matrix: bool,
    },
    /// Rewrite an instance coloured over H plus one extra arc (u, v) into
    /// an instance coloured over H alone.
    P2 {
        instance: PathBuf,
        pattern: PathBuf,
        /// Tail of the simulated arc.
        #[arg(long)]
        u: usize,
        /// Head of the simulated arc.
        #[arg(long)]
        v: usize,
        /// Midpoint colour; defaults to the smallest valid one.
        #[arg(long)]
        z: Option<usize>,
        /// Write the transformed instance here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Contract a pattern by a vertex partition, e.g. --parts "0,1|2".
    Contract {
        pattern: PathBuf,
        /// Parts as comma-separated vertices joined by '|'.
        #[arg(long)]
        parts: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expand a pattern, e.g. --sizes 2,1 replaces vertex 0 by a block of
    /// two and vertex 1 by a single vertex.
    Expand {
        pattern: PathBuf,
        /// Comma-separated block sizes, one per vertex.
        #[arg(long)]
        sizes: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search exhaustively for an instance with no H-kernel.
    Falsify {
        pattern: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the counterexample instance here instead of standard
        /// output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep all looped patterns of one order: recognizer verdicts
    /// cross-checked by the falsifier, with counterexample files and a
    /// report written to a directory.
    Classify {
        /// Pattern order to sweep.
        #[arg(long)]
        order: usize,
        /// Directory for report.tsv and counterexample files.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Largest instance vertex count to search.
    #[arg(long, default_value_t = 4)]
    max_vertices: usize,
    /// Cap on candidate arc counts.
    #[arg(long)]
    max_arcs: Option<usize>,
    /// Skip digraphs with more colourings than this.
    #[arg(long)]
    colouring_cap: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Also enumerate instance digraphs with loops.
    #[arg(long)]
    allow_loops: bool,
    /// Disable colour-symmetry pruning of the colouring stream.
    #[arg(long)]
    no_colour_pruning: bool,
}

impl BoundsArgs {
    fn to_bounds(&self) -> SearchBounds {
        let mut b = SearchBounds::new(self.max_vertices.max(1));
        b.allow_loops_in_d = self.allow_loops;
        b.max_arcs = self.max_arcs;
        b.colouring_cap = self.colouring_cap;
        b.time_budget = self.time_budget.map(Duration::from_secs_f64);
        b.prune_colour_symmetries = !self.no_colour_pruning;
        b
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Recognize { pattern } => cmd_recognize(&pattern),
        Command::Kernel { instance, pattern } => cmd_kernel(&instance, &pattern),
        Command::Reach { instance, pattern, from, to, matrix } => {
            cmd_reach(&instance, &pattern, from, to, matrix)
        }
        Command::P2 { instance, pattern, u, v, z, output } => {
            cmd_p2(&instance, &pattern, u, v, z, output.as_deref())
        }
        Command::Contract { pattern, parts, output } => {
            cmd_contract(&pattern, &parts, output.as_deref())
        }
        Command::Expand { pattern, sizes, output } => {
            cmd_expand(&pattern, &sizes, output.as_deref())
        }
        Command::Falsify { pattern, bounds, jobs, output } => {
            configure_jobs(jobs);
            cmd_falsify(&pattern, &bounds.to_bounds(), output.as_deref())
        }
        Command::Classify { order, out_dir, bounds, jobs } => {
            configure_jobs(jobs);
            cmd_classify(order, &out_dir, &bounds.to_bounds())
        }
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT_ERROR
        }
    }
}

fn configure_jobs(jobs: usize) {
    // 0 leaves the default pool (all cores); this can only succeed once
    // per process, which is all the CLI needs.
    if jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
}

fn read_pattern(path: &Path) -> Result<Pattern, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    format::parse_pattern(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_instance(path: &Path) -> Result<ColouredInstance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    format::parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_recognize(pattern: &Path) -> Result<i32, String> {
    let h = read_pattern(pattern)?;
    match recognizer::recognize(&h) {
        Verdict::Panchromatic(cert) => {
            println!("PANCHROMATIC {cert}");
            Ok(EXIT_POSITIVE)
        }
        Verdict::NotPanchromatic(hints) => {
            for hint in hints {
                println!("NOT-PANCHROMATIC {hint}");
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_kernel(instance: &Path, pattern: &Path) -> Result<i32, String> {
    let inst = read_instance(instance)?;
    let h = read_pattern(pattern)?;
    match kernel::find_h_kernel(&inst, &h).map_err(|e| e.to_string())? {
        Some(k) => {
            println!("KERNEL {}", fmt_set(&k));
            Ok(EXIT_POSITIVE)
        }
        None => {
            println!("NONE");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_reach(
    instance: &Path,
    pattern: &Path,
    from: Option<usize>,
    to: Option<usize>,
    matrix: bool,
) -> Result<i32, String> {
    let inst = read_instance(instance)?;
    let h = read_pattern(pattern)?;
    if matrix {
        let rel = hwalk::h_reach(&inst, &h).map_err(|e| e.to_string())?;
        let n = rel.n();
        let mut grid = String::new();
        for u in 0..n {
            for v in 0..n {
                grid.push(if rel.reaches(u, v) { '1' } else { '0' });
            }
            grid.push('\n');
        }
        print!("{grid}");
        return Ok(EXIT_POSITIVE);
    }
    let (Some(u), Some(v)) = (from, to) else {
        return Err("reach needs either --matrix or both --from and --to".to_string());
    };
    let n = inst.d().n();
    for w in [u, v] {
        if w >= n {
            return Err(format!("vertex {w} out of range for {n} vertices"));
        }
    }
    match hwalk::witness_walk(&inst, &h, u, v).map_err(|e| e.to_string())? {
        Some(walk) => {
            let vs: Vec<String> = walk.vertices.iter().map(|x| x.to_string()).collect();
            let cs: Vec<String> = walk.colours.iter().map(|x| x.to_string()).collect();
            println!("WALK {} COLOURS {}", vs.join(" "), cs.join(" "));
            Ok(EXIT_POSITIVE)
        }
        None => {
            println!("UNREACHABLE");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_p2(
    instance: &Path,
    pattern: &Path,
    u: usize,
    v: usize,
    z: Option<usize>,
    output: Option<&Path>,
) -> Result<i32, String> {
    let inst = read_instance(instance)?;
    let h = read_pattern(pattern)?;
    let z = match z {
        Some(z) => z,
        None => reductions::smallest_midpoint(&h, u, v)
            .ok_or_else(|| reductions::TransformError::NoMidpoint { u, v }.to_string())?,
    };
    let t = reductions::p2_transform(&inst, &h, u, v, z).map_err(|e| e.to_string())?;
    let text = t.to_file_string();
    match output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            println!("added {}", t.twins().len());
        }
        None => {
            print!("{text}");
            eprintln!("added {}", t.twins().len());
        }
    }
    Ok(EXIT_POSITIVE)
}

fn parse_parts(spec: &str, n: usize) -> Result<VertexPartition, String> {
    let mut parts = Vec::new();
    for chunk in spec.split('|') {
        let mut part = Vec::new();
        for tok in chunk.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            part.push(tok.parse::<usize>().map_err(|_| format!("bad vertex `{tok}` in --parts"))?);
        }
        parts.push(part);
    }
    VertexPartition::new(n, parts).map_err(|e| e.to_string())
}

fn cmd_contract(pattern: &Path, parts: &str, output: Option<&Path>) -> Result<i32, String> {
    let h = read_pattern(pattern)?;
    let partition = parse_parts(parts, h.n())?;
    let q = h.contract(&partition).map_err(|e| e.to_string())?;
    write_or_print(output, &format::pattern_to_string(&q))?;
    Ok(EXIT_POSITIVE)
}

fn cmd_expand(pattern: &Path, sizes: &str, output: Option<&Path>) -> Result<i32, String> {
    let h = read_pattern(pattern)?;
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|tok| tok.trim().parse::<usize>().map_err(|_| format!("bad size `{tok}` in --sizes")))
        .collect::<Result<_, _>>()?;
    let e = h.expand(&sizes).map_err(|e| e.to_string())?;
    write_or_print(output, &format::pattern_to_string(&e))?;
    Ok(EXIT_POSITIVE)
}

fn counterexample_text(cx: &search::Counterexample) -> String {
    let mut text = format!("# counterexample: no H-kernel against pattern {}\n", cx.pattern_id);
    text.push_str(&format::instance_to_string(&cx.instance));
    text
}

fn cmd_falsify(pattern: &Path, bounds: &SearchBounds, output: Option<&Path>) -> Result<i32, String> {
    let h = read_pattern(pattern)?;
    match search::falsify(&h, bounds).map_err(|e| e.to_string())? {
        FalsifyOutcome::Counterexample(cx) => {
            let text = counterexample_text(&cx);
            match output {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
                    println!("COUNTEREXAMPLE size={} file={}", cx.instance.d().n(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(EXIT_POSITIVE)
        }
        FalsifyOutcome::Exhausted(rep) if rep.complete => {
            println!(
                "EXHAUSTED max-vertices={} digraphs={} colourings={} skipped={}",
                rep.max_vertices, rep.digraphs_checked, rep.colourings_checked, rep.digraphs_skipped
            );
            Ok(EXIT_NEGATIVE)
        }
        FalsifyOutcome::Exhausted(rep) => {
            println!(
                "BUDGET-EXCEEDED reached-vertices={} digraphs={} colourings={} skipped={}",
                rep.max_vertices, rep.digraphs_checked, rep.colourings_checked, rep.digraphs_skipped
            );
            Ok(EXIT_BUDGET)
        }
    }
}

fn cmd_classify(order: usize, out_dir: &Path, bounds: &SearchBounds) -> Result<i32, String> {
    let mut bounds = bounds.clone();
    // The sweep escalates negatives up to the cap; default deep enough to
    // witness every order-3 negative.
    bounds.max_vertices = bounds.max_vertices.max(5);
    fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let rows = search::classify_order(order, &bounds).map_err(|e| e.to_string())?;
    let mut report = String::new();
    let mut fatal = 0usize;
    let mut budget = 0usize;
    for (idx, row) in rows.iter().enumerate() {
        let witness_file = match &row.outcome {
            RowOutcome::Witnessed { counterexample } | RowOutcome::Fatal { counterexample } => {
                let name = format!("cx_{idx:02}.cd");
                let path = out_dir.join(&name);
                fs::write(&path, counterexample_text(counterexample))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                Some(name)
            }
            _ => None,
        };
        if matches!(row.outcome, RowOutcome::Fatal { .. }) {
            fatal += 1;
        }
        if matches!(row.outcome, RowOutcome::BudgetExceeded { .. }) {
            budget += 1;
        }
        writeln!(report, "{}", row.to_tsv(witness_file.as_deref())).unwrap();
    }
    let report_path = out_dir.join("report.tsv");
    fs::write(&report_path, &report).map_err(|e| format!("{}: {e}", report_path.display()))?;
    print!("{report}");
    if fatal > 0 {
        Ok(EXIT_NEGATIVE)
    } else if budget > 0 {
        Ok(EXIT_BUDGET)
    } else {
        Ok(EXIT_POSITIVE)
    }
}
