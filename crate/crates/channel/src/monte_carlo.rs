//! Seeded Monte-Carlo harness for the channel model.
//!
//! Samples are split into fixed contiguous blocks. Block `b` draws from a
//! ChaCha8 stream keyed by `(seed, b)`, so the merged counts depend only on the
//! plan and never on the worker count or scheduling. All statistics are
//! integer counts at a sorted set of probe points (bin edges, atom locations,
//! outage thresholds), which makes the merge exact.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::OverlapModel;
use crate::special::QuadratureSpec;
use crate::statistics::{ChannelModel, Turbulence};

/// Samples per RNG block.
pub const BLOCK_SIZE: u64 = 65_536;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub n_samples: u64,
    pub seed: u64,
    pub n_workers: usize,
    pub histogram_bins: usize,
    /// Histogram support `(min, max)` for h > 0; `min ≥ 0`.
    pub h_range: (f64, f64),
    /// Overlap formula used when drawing h_p.
    pub overlap: OverlapModel,
    /// Gains at which P̂(h < h_th) is reported.
    pub thresholds: Vec<f64>,
}

impl SimulationPlan {
    pub fn new(n_samples: u64, seed: u64, n_workers: usize, histogram_bins: usize, h_range: (f64, f64)) -> Result<Self> {
        let plan = SimulationPlan {
            n_samples,
            seed,
            n_workers,
            histogram_bins,
            h_range,
            overlap: OverlapModel::Exact,
            thresholds: Vec::new(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_overlap(mut self, overlap: OverlapModel) -> Self {
        self.overlap = overlap;
        self
    }

    pub fn with_thresholds(mut self, thresholds: Vec<f64>) -> Result<Self> {
        self.thresholds = thresholds;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be ≥ 1"));
        }
        if self.n_workers == 0 {
            return Err(Error::invalid("n_workers", "must be ≥ 1"));
        }
        if self.histogram_bins < 2 {
            return Err(Error::invalid("histogram_bins", "must be ≥ 2"));
        }
        let (lo, hi) = self.h_range;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::invalid("h_range", format!("need 0 ≤ min < max, got ({lo}, {hi})")));
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::invalid("thresholds", format!("must be finite and ≥ 0, got {t}")));
        }
        Ok(())
    }

    fn edges(&self) -> Vec<f64> {
        let (lo, hi) = self.h_range;
        let n = self.histogram_bins;
        (0..=n)
            .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
            .collect()
    }
}

/// P̂(h < h_th) with its binomial standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub h_threshold: f64,
    pub probability: f64,
    pub std: f64,
}

/// Merged simulation statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalResult {
    pub n_samples: u64,
    pub seed: u64,
    /// Histogram edges, `histogram_bins + 1` values.
    pub edges: Vec<f64>,
    /// Counts of h > 0 in `[e_i, e_{i+1})`.
    pub histogram: Vec<u64>,
    /// Samples with h = 0.
    pub zero_count: u64,
    /// Samples with `0 < h < min`.
    pub underflow: u64,
    /// Samples with `h ≥ max`.
    pub overflow: u64,
    /// Samples whose pointing coefficient equals the full-capture value.
    pub full_capture_count: u64,
    /// Samples whose pointing coefficient is zero.
    pub zero_pointing_count: u64,
    /// `(x, F̂(x))` with `F̂(x) = #{h ≤ x} / n`, at every probe point.
    pub cdf_grid: Vec<(f64, f64)>,
    /// `(x, #{h < x} / n)`, the left limits at the same probe points.
    pub cdf_left: Vec<(f64, f64)>,
    pub outage: Vec<OutageEstimate>,
}

impl EmpiricalResult {
    /// Sum of every count bucket; equals `n_samples`.
    pub fn total_count(&self) -> u64 {
        self.zero_count + self.underflow + self.overflow + self.histogram.iter().sum::<u64>()
    }

    /// Estimated weights of the full-capture and zero pointing atoms.
    pub fn atom_fractions(&self) -> (f64, f64) {
        let n = self.n_samples as f64;
        (self.full_capture_count as f64 / n, self.zero_pointing_count as f64 / n)
    }

    /// Bin centres and density estimates `count / (n · width)`.
    pub fn density(&self) -> Vec<(f64, f64)> {
        let n = self.n_samples as f64;
        self.histogram
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (a, b) = (self.edges[i], self.edges[i + 1]);
                (0.5 * (a + b), c as f64 / (n * (b - a)))
            })
            .collect()
    }
}

/// Counts in the cells delimited by sorted probe points.
#[derive(Debug, Clone)]
struct Tally {
    /// `below[k]`: samples strictly between probe k-1 and probe k (last cell open above).
    below: Vec<u64>,
    /// `at[k]`: samples equal to probe k.
    at: Vec<u64>,
    full_capture: u64,
    zero_pointing: u64,
}

impl Tally {
    fn new(n_probes: usize) -> Self {
        Tally {
            below: vec![0; n_probes + 1],
            at: vec![0; n_probes],
            full_capture: 0,
            zero_pointing: 0,
        }
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in self.below.iter_mut().zip(&other.below) {
            *a += b;
        }
        for (a, b) in self.at.iter_mut().zip(&other.at) {
            *a += b;
        }
        self.full_capture += other.full_capture;
        self.zero_pointing += other.zero_pointing;
    }
}

fn run_block(model: &ChannelModel, plan: &SimulationPlan, probes: &[f64], block: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(block);
    let sampler = model.sampler(plan.overlap);
    let full = model.geometry().collected_power_fraction();
    let start = block * BLOCK_SIZE;
    let end = (start + BLOCK_SIZE).min(plan.n_samples);
    let mut tally = Tally::new(probes.len());
    for _ in start..end {
        let s = sampler.sample(&mut rng);
        if s.pointing == full {
            tally.full_capture += 1;
        } else if s.pointing == 0.0 {
            tally.zero_pointing += 1;
        }
        let k = probes.partition_point(|&p| p < s.gain);
        if k < probes.len() && probes[k] == s.gain {
            tally.at[k] += 1;
        } else {
            tally.below[k] += 1;
        }
    }
    tally
}

/// Probe points: histogram edges, h = 0, atom locations and thresholds.
fn probe_points(model: &ChannelModel, plan: &SimulationPlan, edges: &[f64]) -> Vec<f64> {
    let mut probes = edges.to_vec();
    probes.push(0.0);
    if matches!(model.turbulence(), Turbulence::None) {
        probes.push(model.full_capture_gain());
    }
    probes.extend_from_slice(&plan.thresholds);
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    probes
}

pub fn run_simulation(plan: &SimulationPlan, model: &ChannelModel) -> Result<EmpiricalResult> {
    plan.validate()?;
    let edges = plan.edges();
    let probes = probe_points(model, plan, &edges);
    let n_blocks = plan.n_samples.div_ceil(BLOCK_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.n_workers)
        .build()
        .map_err(|e| Error::invalid("n_workers", e.to_string()))?;
    let tallies: Vec<Tally> = pool.install(|| {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| run_block(model, plan, &probes, b))
            .collect()
    });
    let mut total = Tally::new(probes.len());
    for t in &tallies {
        total.merge(t);
    }

    // cumulative counts strictly below and up to each probe
    let mut lt = Vec::with_capacity(probes.len());
    let mut le = Vec::with_capacity(probes.len());
    let mut acc = 0u64;
    for k in 0..probes.len() {
        acc += total.below[k];
        lt.push(acc);
        acc += total.at[k];
        le.push(acc);
    }
    let index = |x: f64| probes.partition_point(|&p| p < x);
    let n = plan.n_samples;
    let zero_count = total.at[index(0.0)];
    let lt_at = |x: f64| lt[index(x)];

    let mut histogram = Vec::with_capacity(plan.histogram_bins);
    for w in edges.windows(2) {
        let mut c = lt_at(w[1]) - lt_at(w[0]);
        if w[0] == 0.0 {
            c -= zero_count;
        }
        histogram.push(c);
    }
    let (lo, hi) = plan.h_range;
    let underflow = lt_at(lo) - if lo > 0.0 { zero_count } else { 0 };
    let overflow = n - lt_at(hi);

    let nf = n as f64;
    let outage = plan
        .thresholds
        .iter()
        .map(|&t| {
            let p = lt_at(t) as f64 / nf;
            OutageEstimate {
                h_threshold: t,
                probability: p,
                std: (p * (1.0 - p) / nf).sqrt(),
            }
        })
        .collect();

    Ok(EmpiricalResult {
        n_samples: n,
        seed: plan.seed,
        edges,
        histogram,
        zero_count,
        underflow,
        overflow,
        full_capture_count: total.full_capture,
        zero_pointing_count: total.zero_pointing,
        cdf_grid: probes.iter().zip(&le).map(|(&p, &c)| (p, c as f64 / nf)).collect(),
        cdf_left: probes.iter().zip(&lt).map(|(&p, &c)| (p, c as f64 / nf)).collect(),
        outage,
    })
}

/// Sup over the probe grid of |F̂ - F|, checked on both sides of each probe.
/// `atoms` lists `(location, weight)` jumps of the analytic CDF; at those
/// locations the left limit is `F(x) - weight`.
pub fn ks_distance<F>(result: &EmpiricalResult, cdf: F, atoms: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut worst: f64 = 0.0;
    for (&(x, right), &(_, left)) in result.cdf_grid.iter().zip(&result.cdf_left) {
        let f = cdf(x)?;
        let jump: f64 = atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum();
        worst = worst.max((right - f).abs()).max((left - (f - jump)).abs());
    }
    Ok(worst)
}

/// [`ks_distance`] against the composite law of `model`.
pub fn ks_against_model(result: &EmpiricalResult, model: &ChannelModel, quad: &QuadratureSpec) -> Result<f64> {
    let mut atoms = vec![(0.0, model.outage_floor())];
    if matches!(model.turbulence(), Turbulence::None) {
        atoms.push((model.full_capture_gain(), model.mixture().full_weight));
    }
    ks_distance(result, |x| model.cdf(x, quad), &atoms)
}
