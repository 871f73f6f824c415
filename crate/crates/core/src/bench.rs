//! Scaling measurements of end-to-end clustering.

use std::io::Write;
use std::time::Instant;

use crate::error::Result;
use crate::evaluation::planted_sparse;
use crate::hierarchy::cluster;

/// Community size of the generated benchmark fixtures.
pub const BENCH_COMMUNITY_SIZE: usize = 50;
/// Fraction of every node's links that cross communities.
pub const BENCH_MIXING: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub nodes: usize,
    pub links: usize,
    pub time_ms: f64,
    /// Peak resident memory of the process so far, when the platform reports it.
    pub peak_mem_mb: Option<f64>,
    pub levels: usize,
}

/// Peak resident set size from `/proc/self/status`.
pub fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

/// Times `cluster()` on a sparse planted-partition fixture of every
/// `(nodes, average degree)` size. Runs on the calling thread only.
pub fn scaling_run(sizes: &[(usize, f64)], seed: u64) -> Result<Vec<ScalingRow>> {
    sizes
        .iter()
        .map(|&(n, degree)| {
            let (net, _) = planted_sparse(n, degree, BENCH_COMMUNITY_SIZE, BENCH_MIXING, seed)?;
            let start = Instant::now();
            let h = cluster(&net);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(ScalingRow {
                nodes: n,
                links: net.link_count(),
                time_ms,
                peak_mem_mb: peak_rss_mb(),
                levels: h.level_count(),
            })
        })
        .collect()
}

/// Least-squares slope of `ln(time)` against `ln(links)`.
pub fn loglog_slope(rows: &[ScalingRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.links as f64).ln(), r.time_ms.max(1e-6).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// CSV with columns `m,nodes,time_ms,peak_mem_mb`.
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "m,nodes,time_ms,peak_mem_mb")?;
    for r in rows {
        let mem = r
            .peak_mem_mb
            .map_or_else(String::new, |m| format!("{m:.1}"));
        writeln!(out, "{},{},{:.1},{}", r.links, r.nodes, r.time_ms, mem)?;
    }
    Ok(())
}
