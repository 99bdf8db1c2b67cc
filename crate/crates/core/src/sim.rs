//! Monte Carlo simulation of stochastic integrals `int b dM` and their
//! quadratic variation `int b^2 d<M>` on a uniform grid, plus the empirical
//! checks built on them.
//!
//! Each path draws from its own ChaCha stream keyed by `(seed, path index)`
//! and batches are reduced in path order with compensated summation, so a
//! batch is bit-identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::BoundsResult;
use crate::error::{Error, Result};
use crate::hermite::{hermite_coeffs, MAX_ORDER};

/// Width of the statistical acceptance band, in standard errors.
pub const SIGMA_MARGIN: f64 = 4.0;

/// Relative slack of the empirical Hölder check.
pub const HOLDER_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrandKind {
    Constant { c: f64 },
    PowerOfTime { p: f64 },
    /// `1{M(s) > 0}`
    IndicatorPositiveDriver,
    /// `sign(M(s))`, with `sign(0) = 0`
    SignOfDriver,
}

/// Bounded integrand `b(s)`, evaluated from the driver value at `s` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrandSpec {
    #[serde(flatten)]
    pub kind: IntegrandKind,
    /// Sup-norm certificate; defaults to the exact supremum on `[0, t]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl From<IntegrandKind> for IntegrandSpec {
    fn from(kind: IntegrandKind) -> Self {
        IntegrandSpec { kind, bound: None }
    }
}

impl IntegrandSpec {
    pub fn constant(c: f64) -> Self {
        IntegrandKind::Constant { c }.into()
    }

    fn supremum(&self, t: f64) -> f64 {
        match self.kind {
            IntegrandKind::Constant { c } => c.abs(),
            IntegrandKind::PowerOfTime { p } => t.powf(p),
            IntegrandKind::IndicatorPositiveDriver | IntegrandKind::SignOfDriver => 1.0,
        }
    }

    pub fn bound(&self, t: f64) -> f64 {
        self.bound.unwrap_or_else(|| {
            let sup = self.supremum(t);
            if sup > 0.0 {
                sup
            } else {
                1.0
            }
        })
    }

    fn validate(&self, t: f64) -> Result<()> {
        match self.kind {
            IntegrandKind::Constant { c } if !c.is_finite() => {
                return Err(Error::Config(format!("constant integrand must be finite, got {c}")))
            }
            IntegrandKind::PowerOfTime { p } if !(p.is_finite() && p >= 0.0) => {
                return Err(Error::Config(format!(
                    "power_of_time exponent must be finite and nonnegative, got {p}"
                )))
            }
            _ => {}
        }
        let bound = self.bound(t);
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::Config(format!("integrand bound must be finite and positive, got {bound}")));
        }
        let sup = self.supremum(t);
        if !sup.is_finite() || sup > bound {
            return Err(Error::Config(format!("integrand supremum {sup} exceeds its bound {bound}")));
        }
        Ok(())
    }

    #[inline]
    fn value(&self, s: f64, driver: f64) -> f64 {
        match self.kind {
            IntegrandKind::Constant { c } => c,
            IntegrandKind::PowerOfTime { p } => s.powf(p),
            IntegrandKind::IndicatorPositiveDriver => {
                if driver > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            IntegrandKind::SignOfDriver => {
                if driver > 0.0 {
                    1.0
                } else if driver < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            IntegrandKind::Constant { c } => format!("constant({c})"),
            IntegrandKind::PowerOfTime { p } => format!("power_of_time({p})"),
            IntegrandKind::IndicatorPositiveDriver => "indicator_positive_driver".into(),
            IntegrandKind::SignOfDriver => "sign_of_driver".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriverSpec {
    Wiener,
    /// `W(a(s))` with `a(s) = s^q`, `q >= 1`; `<M>(s) = a(s)`.
    TimeChangedWiener { q: f64 },
    /// `N(s) - lambda s`; `<M>(s) = lambda s`. Experimental: the Hermite
    /// identity needs a continuous martingale.
    CompensatedPoisson { lambda: f64 },
}

impl DriverSpec {
    pub fn is_continuous(&self) -> bool {
        !matches!(self, DriverSpec::CompensatedPoisson { .. })
    }

    pub fn is_experimental(&self) -> bool {
        !self.is_continuous()
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DriverSpec::Wiener => Ok(()),
            DriverSpec::TimeChangedWiener { q } if q.is_finite() && q >= 1.0 => Ok(()),
            DriverSpec::TimeChangedWiener { q } => {
                Err(Error::Config(format!("time change exponent q must be finite and >= 1, got {q}")))
            }
            DriverSpec::CompensatedPoisson { lambda } if lambda.is_finite() && lambda > 0.0 => Ok(()),
            DriverSpec::CompensatedPoisson { lambda } => {
                Err(Error::Config(format!("Poisson rate must be finite and positive, got {lambda}")))
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DriverSpec::Wiener => "wiener".into(),
            DriverSpec::TimeChangedWiener { q } => format!("time_changed_wiener({q})"),
            DriverSpec::CompensatedPoisson { lambda } => format!("compensated_poisson({lambda})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    pub n: u32,
    pub integrand: IntegrandSpec,
    pub driver: DriverSpec,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Config(format!("horizon t must be finite and positive, got {}", self.t)));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if self.paths < 2 {
            return Err(Error::Config(format!("paths must be at least 2, got {}", self.paths)));
        }
        if self.n == 0 || self.n > MAX_ORDER {
            return Err(Error::Config(format!("n must lie in 1..=64, got {}", self.n)));
        }
        self.integrand.validate(self.t)?;
        self.driver.validate()
    }
}

/// One simulated path: `si = sum b(t_i) dM_i`, `qv = sum b(t_i)^2 d<M>_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathSample {
    pub si: f64,
    pub qv: f64,
}

enum Increments {
    /// Gaussian increments with a common standard deviation; `<M>` grows by
    /// `total_qv / steps` per step.
    Gaussian { sd: f64, total_qv: f64 },
    /// Gaussian increments with per-step `d<M>_i`.
    TimeChanged { dqv: Vec<f64>, sd: Vec<f64> },
    Poisson { jumps: Poisson<f64>, compensator: f64, total_qv: f64 },
}

struct Grid {
    times: Vec<f64>,
    increments: Increments,
}

impl Grid {
    fn new(config: &SimConfig) -> Result<Self> {
        let (t, steps) = (config.t, config.steps);
        let times: Vec<f64> = (0..=steps).map(|i| t * i as f64 / steps as f64).collect();
        let dt = t / steps as f64;
        let increments = match config.driver {
            DriverSpec::Wiener => Increments::Gaussian { sd: dt.sqrt(), total_qv: t },
            DriverSpec::TimeChangedWiener { q } => {
                let dqv: Vec<f64> = times.windows(2).map(|w| w[1].powf(q) - w[0].powf(q)).collect();
                let sd = dqv.iter().map(|v| v.sqrt()).collect();
                Increments::TimeChanged { dqv, sd }
            }
            DriverSpec::CompensatedPoisson { lambda } => {
                let mean = lambda * dt;
                let jumps = Poisson::new(mean)
                    .map_err(|e| Error::Config(format!("Poisson rate per step {mean}: {e}")))?;
                Increments::Poisson { jumps, compensator: mean, total_qv: lambda * t }
            }
        };
        Ok(Grid { times, increments })
    }
}

fn simulate_path(config: &SimConfig, grid: &Grid, path: u64) -> PathSample {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(path);
    let b = &config.integrand;
    let steps = config.steps;
    let (mut m, mut si, mut b2) = (0.0f64, 0.0f64, 0.0f64);
    match &grid.increments {
        Increments::Gaussian { sd, total_qv } => {
            for i in 0..steps {
                let v = b.value(grid.times[i], m);
                let z: f64 = StandardNormal.sample(&mut rng);
                let dm = sd * z;
                si += v * dm;
                b2 += v * v;
                m += dm;
            }
            PathSample { si, qv: b2 * total_qv / steps as f64 }
        }
        Increments::TimeChanged { dqv, sd } => {
            for i in 0..steps {
                let v = b.value(grid.times[i], m);
                let z: f64 = StandardNormal.sample(&mut rng);
                let dm = sd[i] * z;
                si += v * dm;
                b2 += v * v * dqv[i];
                m += dm;
            }
            PathSample { si, qv: b2 }
        }
        Increments::Poisson { jumps, compensator, total_qv } => {
            for i in 0..steps {
                let v = b.value(grid.times[i], m);
                let dm = jumps.sample(&mut rng) - compensator;
                si += v * dm;
                b2 += v * v;
                m += dm;
            }
            PathSample { si, qv: b2 * total_qv / steps as f64 }
        }
    }
}

/// Simulates `config.paths` independent paths on the global thread pool.
pub fn simulate_batch(config: &SimConfig) -> Result<Vec<PathSample>> {
    config.validate()?;
    let grid = Grid::new(config)?;
    Ok((0..config.paths as u64)
        .into_par_iter()
        .map(|p| simulate_path(config, &grid, p))
        .collect())
}

/// Same as [`simulate_batch`] on a dedicated pool of `threads` workers.
pub fn simulate_batch_with_threads(config: &SimConfig, threads: usize) -> Result<Vec<PathSample>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a pool of {threads} threads: {e}")))?;
    pool.install(|| simulate_batch(config))
}

/// Neumaier summation in iteration order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean_of(values: impl Iterator<Item = f64>, count: usize) -> f64 {
    compensated_sum(values) / count as f64
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub count: usize,
}

impl MomentEstimate {
    /// Two-pass estimate; `values` must be nonempty.
    pub fn from_samples(values: &[f64]) -> Self {
        let count = values.len();
        let value = mean_of(values.iter().copied(), count);
        let stderr = if count > 1 {
            let ss = compensated_sum(values.iter().map(|v| (v - value) * (v - value)));
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        MomentEstimate { value, stderr, count }
    }
}

/// Estimates of `E si^{2n}`, `E qv^n` and the cross moments
/// `E si^{2n-2k} qv^k` for `k = 1..n-1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub n: u32,
    pub m2n: MomentEstimate,
    pub qn: MomentEstimate,
    pub cross: Vec<MomentEstimate>,
}

fn require_batch(batch: &[PathSample], n: u32) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("moment order n must be positive".into()));
    }
    Ok(())
}

fn estimate(batch: &[PathSample], f: impl Fn(&PathSample) -> f64) -> MomentEstimate {
    let values: Vec<f64> = batch.iter().map(f).collect();
    MomentEstimate::from_samples(&values)
}

pub fn moment_estimates(batch: &[PathSample], n: u32) -> Result<MomentSummary> {
    require_batch(batch, n)?;
    let n_i = n as i32;
    let m2n = estimate(batch, |s| s.si.powi(2 * n_i));
    let qn = estimate(batch, |s| s.qv.powi(n_i));
    let cross = (1..n_i)
        .map(|k| estimate(batch, |s| s.si.powi(2 * n_i - 2 * k) * s.qv.powi(k)))
        .collect();
    Ok(MomentSummary { n, m2n, qn, cross })
}

/// Moment ratio `z = (E si^{2n})^{1/n} / (E qv^n)^{1/n}`.
pub fn z_ratio(m2n: &MomentEstimate, qn: &MomentEstimate, n: u32) -> Result<f64> {
    if !(qn.value > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let inv = 1.0 / n as f64;
    Ok(m2n.value.powf(inv) / qn.value.powf(inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalCheck {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

impl IntervalCheck {
    fn new(c1: f64, c2: f64, value: f64, margin: f64) -> Self {
        IntervalCheck { c1, c2, pass: c1 - margin <= value && value <= c2 + margin }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BdgVerdict {
    pub n: u32,
    /// `E si^{2n} / E qv^n`
    pub z_pow_n: f64,
    pub z_pow_n_stderr: f64,
    pub margin: f64,
    pub proved: IntervalCheck,
    pub sharp: IntervalCheck,
}

/// Checks `C1 <= z^n <= C2` for the proved and the sharp constants, allowing
/// `SIGMA_MARGIN` propagated standard errors.
pub fn check_bdg(m2n: &MomentEstimate, qn: &MomentEstimate, bounds: &BoundsResult, n: u32) -> Result<BdgVerdict> {
    if bounds.n != n {
        return Err(Error::OrderMismatch { bounds: bounds.n, requested: n });
    }
    if !(qn.value > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let z_pow_n = m2n.value / qn.value;
    // delta method for a ratio, covariance ignored
    let z_pow_n_stderr = (m2n.stderr / qn.value).hypot(m2n.value * qn.stderr / (qn.value * qn.value));
    let margin = SIGMA_MARGIN * z_pow_n_stderr;
    Ok(BdgVerdict {
        n,
        z_pow_n,
        z_pow_n_stderr,
        margin,
        proved: IntervalCheck::new(bounds.c1_proved, bounds.c2_proved, z_pow_n, margin),
        sharp: IntervalCheck::new(bounds.c1_sharp, bounds.c2_sharp, z_pow_n, margin),
    })
}

/// Sample mean and standard error of `rho_{2n} = H_{2n}(qv, si)`.
pub fn martingale_identity_check(batch: &[PathSample], n: u32) -> Result<MomentEstimate> {
    require_batch(batch, n)?;
    let h = hermite_coeffs(n)?;
    let rho = batch.iter().map(|s| h.rho_sample(s.qv, s.si)).collect::<Result<Vec<_>>>()?;
    Ok(MomentEstimate::from_samples(&rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderCheck {
    pub n: u32,
    pub k: u32,
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

/// Hölder's inequality on the empirical measure of the batch:
/// `mean |si|^{2n-2k} qv^k <= (mean |si|^{2n})^{(n-k)/n} (mean qv^n)^{k/n}`.
pub fn holder_check(batch: &[PathSample], n: u32, k: u32) -> Result<HolderCheck> {
    require_batch(batch, n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("Hölder index k = {k} must lie in 1..={n}")));
    }
    let count = batch.len();
    let (n_i, k_i) = (n as i32, k as i32);
    let left = mean_of(batch.iter().map(|s| s.si.abs().powi(2 * n_i - 2 * k_i) * s.qv.powi(k_i)), count);
    let a = mean_of(batch.iter().map(|s| s.si.abs().powi(2 * n_i)), count);
    let b = mean_of(batch.iter().map(|s| s.qv.powi(n_i)), count);
    let (nf, kf) = (n as f64, k as f64);
    let right = a.powf((nf - kf) / nf) * b.powf(kf / nf);
    Ok(HolderCheck { n, k, left, right, holds: left <= right * (1.0 + HOLDER_SLACK) })
}
