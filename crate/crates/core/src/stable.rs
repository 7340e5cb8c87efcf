//! Totally skewed standardized α-stable variates: sampling via the
//! Chambers–Mallows–Stuck transform, the tail-approximation constant, and
//! Monte-Carlo quantile estimation.
//!
//! The parameterization is the classic one-parameterization with skewness 1,
//! unit scale, and zero location, for which `P(S_α > σ) ~ (c_α σ)^{-α}` with
//! `c_α = (2 Γ(α) sin(πα/2) / π)^{-1/α}`.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::real::Real;

/// Tail-approximation constant `c_α = (2 Γ(α) sin(πα/2) / π)^{-1/α}` for
/// `α ∈ (0, 2)`.
pub fn c_alpha<T: Real>(alpha: T) -> Result<T> {
    let a = alpha.into_f64();
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::Domain(format!("c_alpha needs alpha in (0,2), got {}", alpha)));
    }
    let g = statrs::function::gamma::gamma(a);
    let v = (2.0 * g * (std::f64::consts::PI * a / 2.0).sin() / std::f64::consts::PI)
        .powf(-1.0 / a);
    Ok(T::of(v))
}

/// A totally skewed standardized stable law with `α ∈ (1, 2)` (finite mean,
/// infinite variance). Skewness, scale, and location are fixed at 1, 1, 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSpec {
    alpha: f64,
}

impl StableSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::Domain(format!(
                "stable tail index must lie strictly in (1,2), got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Draw `n` i.i.d. variates, deterministic in the seed.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// One Chambers–Mallows–Stuck draw (α ≠ 1 branch; α ∈ (1,2) here).
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        let u: f64 = clamp_open(rng.gen());
        let e: f64 = clamp_open(rng.gen());
        let v = std::f64::consts::PI * (u - 0.5);
        let w = -e.ln();
        let bt = (std::f64::consts::PI * a / 2.0).tan(); // skewness 1
        let b = bt.atan() / a;
        let s = (1.0 + bt * bt).powf(1.0 / (2.0 * a));
        let phi = a * (v + b);
        s * phi.sin() / v.cos().powf(1.0 / a) * ((v - phi).cos() / w).powf((1.0 - a) / a)
    }

    /// Monte-Carlo estimate of the upper quantile `z(ε)` with
    /// `P(S_α > z(ε)) = ε`, from `sample_count` draws.
    pub fn quantile(&self, epsilon: f64, sample_count: usize, seed: u64) -> Result<f64> {
        let table = self.quantile_table(&[epsilon], sample_count, seed)?;
        Ok(table.entries()[0].1)
    }

    /// Build a quantile cache for several ε levels from one sampling pass.
    pub fn quantile_table(
        &self,
        epsilons: &[f64],
        sample_count: usize,
        seed: u64,
    ) -> Result<QuantileTable> {
        if epsilons.is_empty() {
            return Err(Error::InvalidArgument("no quantile levels requested".into()));
        }
        for &eps in epsilons {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "quantile level must lie in (0,1), got {eps}"
                )));
            }
            if (sample_count as f64) < 10.0 / eps {
                return Err(Error::Precondition(format!(
                    "sample count {sample_count} cannot resolve the {eps} tail quantile \
                     (need at least {})",
                    (10.0 / eps).ceil()
                )));
            }
        }
        let mut samples = self.sample(seed, sample_count);
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut entries: Vec<(f64, f64)> = epsilons
            .iter()
            .map(|&eps| (eps, upper_quantile(&samples, eps)))
            .collect();
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(QuantileTable { alpha: self.alpha, sample_count, seed, entries })
    }
}

fn clamp_open(u: f64) -> f64 {
    u.clamp(1e-16, 1.0 - 1e-16)
}

/// Smallest sample `z` with empirical `P(S > z) <= eps`.
fn upper_quantile(sorted: &[f64], eps: f64) -> f64 {
    let n = sorted.len();
    // count of samples above sorted[i] is n-1-i
    let idx = ((n as f64) - 1.0 - eps * n as f64).ceil().max(0.0) as usize;
    sorted[idx.min(n - 1)]
}

/// Cached upper quantiles of one stable law, sorted by ε.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    alpha: f64,
    sample_count: usize,
    seed: u64,
    entries: Vec<(f64, f64)>,
}

impl QuantileTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `(ε, z(ε))` pairs sorted by ascending ε.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# stable quantile table: alpha={} sample_count={} seed={}",
            self.alpha, self.sample_count, self.seed
        )?;
        writeln!(out, "epsilon,z")?;
        for (eps, z) in &self.entries {
            writeln!(out, "{eps},{z}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut alpha = None;
        let mut sample_count = 0usize;
        let mut seed = 0u64;
        let mut entries = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("alpha=") {
                        alpha = v.parse::<f64>().ok();
                    } else if let Some(v) = field.strip_prefix("sample_count=") {
                        sample_count = v.parse().unwrap_or(0);
                    } else if let Some(v) = field.strip_prefix("seed=") {
                        seed = v.parse().unwrap_or(0);
                    }
                }
                continue;
            }
            if line.starts_with("epsilon") {
                continue;
            }
            let mut parts = line.split(',');
            let eps: f64 = parse_field(parts.next(), lineno)?;
            let z: f64 = parse_field(parts.next(), lineno)?;
            entries.push((eps, z));
        }
        let alpha = alpha
            .ok_or_else(|| Error::Parse("quantile table header missing alpha".into()))?;
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self { alpha, sample_count, seed, entries })
    }
}

fn parse_field(field: Option<&str>, lineno: usize) -> Result<f64> {
    field
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad csv field at line {}", lineno + 1)))
}
