//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors
//! (including unreadable input files).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{loglog_slope, scaling_run, write_scaling_csv};
use crate::error::Error;
use crate::evaluation::{
    brute_force_best_partition, f1_scores, perturb, planted_partition, run_stability_protocol,
    write_trace_csv, ProtocolConfig,
};
use crate::graph::{read_network, write_network, Network};
use crate::hierarchy::{cluster, write_hierarchy};
use crate::quality::Clustering;

#[derive(Debug, Parser)]
#[command(
    name = "daoc",
    version,
    about = "Deterministic overlapping hierarchical clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a network and write the hierarchy.
    Cluster {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Treat every line as a directed arc.
        #[arg(short, long)]
        directed: bool,
    },
    /// Score a clustering against a reference with F1a and F1h.
    Eval { candidate: PathBuf, truth: PathBuf },
    /// Remove a fraction of links, keeping every node linked.
    Perturb {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        fraction: f64,
        #[arg(short, long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long)]
        directed: bool,
    },
    /// Run the link-removal stability protocol and print a CSV trace.
    Protocol {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        shuffles: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long)]
        directed: bool,
    },
    /// Print the modularity-optimal partition of a small network.
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        directed: bool,
    },
    /// Time clustering on sparse synthetic networks, e.g. `--sizes 2000:10,6000:10`.
    Bench {
        #[arg(long, value_delimiter = ',', value_parser = parse_size)]
        sizes: Vec<(usize, f64)>,
        #[arg(short, long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a planted-partition network and its ground truth.
    Generate {
        #[arg(short, long)]
        nodes: usize,
        #[arg(short = 'k', long)]
        communities: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(short, long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Where to write the ground-truth clusters.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

fn parse_size(s: &str) -> Result<(usize, f64), String> {
    let (n, d) = s
        .split_once(':')
        .ok_or_else(|| format!("expected NODES:DEGREE, got {s:?}"))?;
    let n = n.parse().map_err(|_| format!("invalid node count {n:?}"))?;
    let d = d.parse().map_err(|_| format!("invalid degree {d:?}"))?;
    Ok((n, d))
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn load(path: &Path, directed: bool) -> Result<Network, Failure> {
    match read_network(path, directed) {
        Err(Error::Io { path, source }) => Err(Failure::Usage(format!(
            "cannot open {}: {source}",
            path.display()
        ))),
        other => Ok(other?),
    }
}

fn read_clusters(path: &Path) -> Result<Clustering, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
    let mut clusters = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let members = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                Failure::Runtime(format!("{}:{}: invalid node id", path.display(), idx + 1))
            })?;
        clusters.push(members);
    }
    let cl = Clustering::new(clusters);
    if cl.is_empty() {
        return Err(Failure::Runtime(format!("{}: no clusters", path.display())));
    }
    Ok(cl)
}

fn write_clusters(cl: &Clustering, path: &Path) -> Result<(), Failure> {
    let mut text = String::new();
    for c in cl.clusters() {
        let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes to `path` when given, to `out` otherwise.
fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            body(&mut buf)?;
            fs::write(p, buf).map_err(|e| Error::io(p, e))?;
        }
        None => body(out)?,
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Cluster {
            input,
            output,
            directed,
        } => {
            let net = load(&input, directed)?;
            let h = cluster(&net);
            write_hierarchy(&h, &output)?;
            writeln!(out, "levels: {}", h.level_count())?;
            writeln!(
                out,
                "level 0: nodes {} modularity {:.6}",
                net.node_count(),
                h.base_modularity()
            )?;
            for (k, level) in h.levels().iter().enumerate() {
                writeln!(
                    out,
                    "level {}: clusters {} modularity {:.6}",
                    k + 1,
                    h.level_nodes(k).len(),
                    level.modularity
                )?;
            }
        }
        Command::Eval { candidate, truth } => {
            let cand = read_clusters(&candidate)?;
            let truth = read_clusters(&truth)?;
            let r = f1_scores(&cand, &truth)?;
            writeln!(out, "F1a: {:.6}", r.f1a)?;
            writeln!(out, "F1h: {:.6}", r.f1h)?;
        }
        Command::Perturb {
            input,
            fraction,
            seed,
            output,
            directed,
        } => {
            let net = load(&input, directed)?;
            let p = perturb(&net, fraction, seed)?;
            emit(output.as_deref(), out, |w| write_network(&p, w))?;
        }
        Command::Protocol {
            input,
            seed,
            shuffles,
            output,
            directed,
        } => {
            let net = load(&input, directed)?;
            let cfg = ProtocolConfig {
                shuffles,
                seed,
                ..ProtocolConfig::default()
            };
            let trace = run_stability_protocol(&net, &cfg)?;
            emit(output.as_deref(), out, |w| write_trace_csv(&trace, w))?;
        }
        Command::Oracle { input, directed } => {
            let net = load(&input, directed)?;
            let (best, q) = brute_force_best_partition(&net)?;
            for c in best.clusters() {
                let labels: Vec<String> = c.iter().map(|&v| net.label(v).to_string()).collect();
                writeln!(out, "{}", labels.join(" "))?;
            }
            writeln!(out, "Q*: {q:.6}")?;
        }
        Command::Bench {
            sizes,
            seed,
            output,
        } => {
            if sizes.is_empty() {
                return Err(Failure::Usage(
                    "--sizes needs at least one NODES:DEGREE".into(),
                ));
            }
            let rows = scaling_run(&sizes, seed)?;
            emit(output.as_deref(), out, |w| write_scaling_csv(&rows, w))?;
            if rows.len() >= 2 {
                writeln!(out, "# log-log slope: {:.3}", loglog_slope(&rows))?;
            }
        }
        Command::Generate {
            nodes,
            communities,
            p_in,
            p_out,
            seed,
            output,
            truth,
        } => {
            let (net, gt) = planted_partition(nodes, communities, p_in, p_out, seed)?;
            let mut buf = Vec::new();
            write_network(&net, &mut buf)?;
            fs::write(&output, buf).map_err(|e| Error::io(&output, e))?;
            if let Some(path) = truth {
                write_clusters(&gt, &path)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI with explicit arguments and streams, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
