use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{parse_network, serialize_shuffled, Network};
use crate::hierarchy::cluster;
use crate::quality::Clustering;

use super::f1::f1_scores;
use super::perturb::remove_links;

/// Link-removal stability protocol settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// Shuffled reorderings of every stage's input.
    pub shuffles: usize,
    /// Fraction of the original links removed by the first stage.
    pub first_fraction: f64,
    /// Fraction of the original links removed by every further stage.
    pub step_fraction: f64,
    /// Cumulative fraction at which the protocol stops.
    pub last_fraction: f64,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            shuffles: 4,
            first_fraction: 0.01,
            step_fraction: 0.02,
            last_fraction: 0.15,
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    /// Cumulative removal fractions of all stages.
    pub fn fractions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let f = self.first_fraction + k as f64 * self.step_fraction;
            if f > self.last_fraction + 1e-9 {
                return out;
            }
            out.push(f);
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    /// 1-based stage number.
    pub stage: usize,
    /// Cumulative fraction of original links removed.
    pub fraction: f64,
    pub links: usize,
    /// F1h of the middle level against the previous stage, per shuffle.
    pub f1h: Vec<f64>,
    pub f1h_mean: f64,
    pub f1h_std: f64,
    /// Mean clustering time per shuffle.
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationTrace {
    pub stages: Vec<StageResult>,
}

impl PerturbationTrace {
    pub fn f1h_means(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.f1h_mean).collect()
    }
}

/// Clusters a shuffled serialization of `net` and returns the middle level
/// as a clustering over external labels.
fn middle_level(net: &Network, seed: u64) -> Result<(Clustering, f64)> {
    let text = serialize_shuffled(net, seed);
    let reparsed = parse_network(text.as_bytes(), false, true)?;
    let start = Instant::now();
    let h = cluster(&reparsed);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mid = h
        .middle_level()
        .ok_or_else(|| Error::InvalidArgument("no cluster formed".into()))?;
    let labels = h
        .level_nodes(mid)
        .into_iter()
        .map(|c| c.into_iter().map(|v| h.labels()[v] as usize).collect());
    Ok((Clustering::new(labels), ms))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Removes links stage by stage (cumulative fractions of the original link
/// count), clusters every stage under several shuffles and scores each
/// stage's middle level against the previous stage's.
pub fn run_stability_protocol(net: &Network, config: &ProtocolConfig) -> Result<PerturbationTrace> {
    if config.shuffles == 0 {
        return Err(Error::InvalidArgument(
            "at least one shuffle is required".into(),
        ));
    }
    let original_links = net.link_count() as f64;
    let shuffle_seeds: Vec<u64> = (0..config.shuffles as u64)
        .map(|s| config.seed.wrapping_mul(31).wrapping_add(s + 1))
        .collect();

    let mut previous: Vec<Clustering> = shuffle_seeds
        .iter()
        .map(|&s| middle_level(net, s).map(|r| r.0))
        .collect::<Result<_>>()?;

    let mut current = net.clone();
    let mut removed_so_far = 0usize;
    let mut stages = Vec::new();
    for (idx, fraction) in config.fractions().into_iter().enumerate() {
        let target = (fraction * original_links + 1e-9).floor() as usize;
        let stage_seed = config.seed.wrapping_add(1000 + idx as u64);
        current = remove_links(&current, target - removed_so_far, stage_seed)?;
        removed_so_far = target;

        let mut scores = Vec::with_capacity(config.shuffles);
        let mut levels = Vec::with_capacity(config.shuffles);
        let mut total_ms = 0.0;
        for (k, &s) in shuffle_seeds.iter().enumerate() {
            let (level, ms) = middle_level(&current, s)?;
            total_ms += ms;
            scores.push(f1_scores(&level, &previous[k])?.f1h);
            levels.push(level);
        }
        let (mean, std) = mean_std(&scores);
        stages.push(StageResult {
            stage: idx + 1,
            fraction,
            links: current.link_count(),
            f1h: scores,
            f1h_mean: mean,
            f1h_std: std,
            runtime_ms: total_ms / config.shuffles as f64,
        });
        previous = levels;
    }
    Ok(PerturbationTrace { stages })
}

/// CSV with one row per stage: `stage,fraction,f1h_mean,f1h_std,runtime_ms`.
pub fn write_trace_csv<W: Write>(trace: &PerturbationTrace, mut out: W) -> std::io::Result<()> {
    writeln!(out, "stage,fraction,f1h_mean,f1h_std,runtime_ms")?;
    for s in &trace.stages {
        writeln!(
            out,
            "{},{:.2},{:.6},{:.6},{:.1}",
            s.stage, s.fraction, s.f1h_mean, s.f1h_std, s.runtime_ms
        )?;
    }
    Ok(())
}
