//! Monte Carlo estimate of network failure probability versus the number
//! of failed sensors.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::{random_geometric, CostModel};
use crate::pipeline::{design, DesignSolution};

/// Attempts per graph slot before giving up on a feasible instance.
pub const REDRAW_BUDGET: usize = 256;

const GENERATE_TAG: u64 = 0x6765_6e65_7261_7465;
const TRIAL_TAG: u64 = 0x7472_6961_6c73_0000;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds the parts through splitmix64: `h = splitmix64(h ^ part)` starting
/// from `h = 0`.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |h, &p| splitmix64(h ^ p))
}

/// Whether some surviving sensor has lost every path, along the designed
/// sensor links among survivors, to a used output of a surviving sensor.
pub fn network_fails(sol: &DesignSolution, failed: &[usize]) -> bool {
    let s = &sol.structure;
    let n = s.n_states();
    let mut dead = vec![false; n];
    for &u in failed {
        dead[u] = true;
    }
    let mut ok = vec![false; n];
    let mut stack: Vec<usize> = (0..s.n_outputs())
        .filter_map(|r| s.output_index()[r].filter(|_| s.output_used(r)).map(|src| src.sensor))
        .filter(|&j| !dead[j])
        .collect();
    for &j in &stack {
        ok[j] = true;
    }
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !dead[j] && !ok[j] && j != i && s.a().get(i, j) {
                ok[j] = true;
                stack.push(j);
            }
        }
    }
    (0..n).any(|j| !dead[j] && !ok[j])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub n_sensors: usize,
    pub n_backbone: usize,
    pub radius: f64,
    pub cost_model: CostModel,
    pub k: usize,
    pub n_graphs: usize,
    pub n_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub l: usize,
    pub ratio: f64,
    pub failures: u64,
    pub trials: usize,
    pub graphs: usize,
}

impl CurvePoint {
    pub fn probability(&self) -> f64 {
        let total = (self.trials * self.graphs) as f64;
        if total == 0.0 {
            0.0
        } else {
            self.failures as f64 / total
        }
    }

    /// Binomial standard error of the estimate.
    pub fn standard_error(&self) -> f64 {
        let p = self.probability();
        let total = (self.trials * self.graphs) as f64;
        if total == 0.0 {
            0.0
        } else {
            (p * (1.0 - p) / total).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessCurve {
    pub config: CurveConfig,
    pub points: Vec<CurvePoint>,
    /// Infeasible generations that were discarded and redrawn.
    pub redraws: usize,
}

impl RobustnessCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,ratio,prob,trials,graphs\n");
        for p in &self.points {
            out.push_str(&format!("{},{:.6},{:.6},{},{}\n", p.l, p.ratio, p.probability(), p.trials, p.graphs));
        }
        out
    }
}

/// A designed instance for graph slot `graph`, with the number of
/// discarded draws.
pub fn designed_instance(cfg: &CurveConfig, graph: usize) -> Result<(DesignSolution, usize)> {
    for attempt in 0..REDRAW_BUDGET {
        let seed = mix_seed(&[cfg.seed, GENERATE_TAG, graph as u64, attempt as u64]);
        let g = random_geometric(cfg.n_sensors, cfg.n_backbone, cfg.radius, cfg.cost_model, seed)?;
        match design(&g, cfg.k) {
            Ok(sol) => return Ok((sol, attempt)),
            Err(Error::Infeasible { .. } | Error::UnreachableBackbone(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RedrawBudget { attempts: REDRAW_BUDGET })
}

/// Failure counts per `l = 0..=ceil(n_sensors / 2)` for one designed graph.
fn count_failures(cfg: &CurveConfig, graph: usize, sol: &DesignSolution) -> Vec<u64> {
    let n = cfg.n_sensors;
    (0..=n.div_ceil(2))
        .map(|l| {
            (0..cfg.n_trials)
                .filter(|&t| {
                    let seed = mix_seed(&[cfg.seed, TRIAL_TAG, graph as u64, l as u64, t as u64]);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let failed = sample(&mut rng, n, l).into_vec();
                    network_fails(sol, &failed)
                })
                .count() as u64
        })
        .collect()
}

/// Designs `n_graphs` random instances (in parallel) and injects
/// `n_trials` uniformly random failure sets of each size into each.
pub fn failure_curve(cfg: &CurveConfig) -> Result<RobustnessCurve> {
    let per_graph: Vec<(Vec<u64>, usize)> = (0..cfg.n_graphs)
        .into_par_iter()
        .map(|g| {
            let (sol, redraws) = designed_instance(cfg, g)?;
            Ok((count_failures(cfg, g, &sol), redraws))
        })
        .collect::<Result<_>>()?;
    let n_points = cfg.n_sensors.div_ceil(2) + 1;
    let mut failures = vec![0u64; n_points];
    let mut redraws = 0;
    for (counts, r) in &per_graph {
        for (acc, c) in failures.iter_mut().zip(counts) {
            *acc += c;
        }
        redraws += r;
    }
    let points = failures
        .into_iter()
        .enumerate()
        .map(|(l, failures)| CurvePoint {
            l,
            ratio: l as f64 / cfg.n_sensors as f64,
            failures,
            trials: cfg.n_trials,
            graphs: cfg.n_graphs,
        })
        .collect();
    Ok(RobustnessCurve { config: cfg.clone(), points, redraws })
}
