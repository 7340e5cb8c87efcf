//! Statistical traffic envelopes for heavy-tailed self-similar arrivals.
//!
//! An [`HtssEnvelope`] bounds interval arrivals by
//! `P(A(s,t) > r(t-s) + σ(t-s)^H) <= K σ^{-α}`; a [`GaussEnvelope`] carries the
//! Gaussian-tail analogue `K e^{-(σ/b)²/2}`. Both convert into rate-burst
//! [`SamplePathEnvelope`]s that hold simultaneously over all interval starts,
//! which is what backlog, delay, and leftover-service bounds need.
//!
//! Internal units are bits and seconds throughout: rates in bits/s, and σ in
//! `bits·s^{-H}` for interval envelopes (plain bits once on sample-path form).

use crate::algebra::{PowerLaw, TailBound, Weibull};
use crate::error::{Error, Result};
use crate::numeric::scan_golden_min;
use crate::real::Real;
use crate::stable::{c_alpha, QuantileTable};

/// Heavy-tailed self-similar envelope `G(t;σ) = rt + σt^H` with power-law
/// violation bound `K σ^{-α}`.
///
/// `alpha = 2` is accepted only as a marker for Gaussian-tail inputs; such
/// envelopes should be expressed as [`GaussEnvelope`] for the analytic paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtssEnvelope<T> {
    pub rate: T,
    pub hurst: T,
    pub alpha: T,
    pub k: T,
}

/// Self-similar envelope with Gaussian violation bound `K e^{-(σ/b)²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussEnvelope<T> {
    pub rate: T,
    pub hurst: T,
    /// Dispersion scale `b`.
    pub scale: T,
    pub k: T,
}

/// Which sample-path construction produced the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplePathSource {
    /// Power-law violation bound, exponent `α(1-H)`.
    PowerLaw,
    /// Weibull violation bound, exponent `2(1-H)`.
    Weibull,
}

/// Rate-burst envelope `(r+μ)t + σ` holding over all interval starts with a
/// single violation budget.
#[derive(Debug, Clone)]
pub struct SamplePathEnvelope<T> {
    pub rate: T,
    pub tail: TailBound<T>,
    pub mu: T,
    pub source: SamplePathSource,
}

fn check_hurst<T: Real>(h: T) -> Result<()> {
    if h > T::zero() && h < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("hurst parameter must lie in (0,1), got {}", h)))
    }
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rate slack mu must be > 0, got {}", mu)))
    }
}

impl<T: Real> HtssEnvelope<T> {
    pub fn new(rate: T, hurst: T, alpha: T, k: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(Error::Domain(format!("rate must be > 0, got {}", rate)));
        }
        check_hurst(hurst)?;
        if !(alpha > T::one() && alpha <= T::of(2.0)) {
            return Err(Error::Domain(format!("tail index must lie in (1,2], got {}", alpha)));
        }
        if !(k > T::zero()) {
            return Err(Error::Domain(format!("prefactor must be > 0, got {}", k)));
        }
        Ok(Self { rate, hurst, alpha, k })
    }

    /// Violation bound `min(1, K σ^{-α})` of the interval envelope.
    pub fn violation(&self, sigma: T) -> Result<T> {
        PowerLaw::new(self.k, self.alpha)?.evaluate(sigma)
    }

    /// Envelope value `rt + σt^H`.
    pub fn at(&self, t: T, sigma: T) -> T {
        self.rate * t + sigma * t.powf(self.hurst)
    }

    /// Burst level σ(ε) = (K/ε)^{1/α} with violation probability ε.
    pub fn sigma_for(&self, eps: T) -> T {
        (self.k / eps).powf(self.alpha.recip())
    }

    /// Sample-path prefactor `K̃`: the infimum over the under-sampling factor
    /// γ ∈ (1, 1+μ/r) of
    /// `K ((r+μ)/γ - r)^{-αH} γ^{αH(1-H)} / (αH(1-H) ln γ)`.
    ///
    /// The objective diverges at both endpoints, so the minimizer is interior;
    /// a two-sided scan brackets it and golden-section refines.
    pub fn k_tilde(&self, mu: T) -> Result<T> {
        check_mu(mu)?;
        let (r, h, a) = (self.rate, self.hurst, self.alpha);
        let ah = a * h;
        let ah1 = a * h * (T::one() - h);
        let objective = |gamma: T| {
            let rate = (r + mu) / gamma - r;
            if rate <= T::zero() {
                return T::infinity();
            }
            rate.powf(-ah) * gamma.powf(ah1) / (ah1 * gamma.ln())
        };
        let hi = T::one() + mu / r;
        let (_, min) = scan_golden_min(&objective, T::one(), hi, 64, 1e-9);
        Ok(self.k * min)
    }

    /// Rate-burst sample-path envelope `(r+μ)t + σ` with violation bound
    /// `K̃ σ^{-α(1-H)}`, for any rate slack μ > 0.
    pub fn sample_path_envelope(&self, mu: T) -> Result<SamplePathEnvelope<T>> {
        let k_tilde = self.k_tilde(mu)?;
        let exponent = self.alpha * (T::one() - self.hurst);
        Ok(SamplePathEnvelope {
            rate: self.rate + mu,
            tail: TailBound::PowerLaw(PowerLaw::new(k_tilde, exponent)?),
            mu,
            source: SamplePathSource::PowerLaw,
        })
    }

    /// Envelope for the α-stable model `A(t) = rt + b t^H S_α` from the tail
    /// approximation: `K = (b/c_α)^α`. Valid asymptotically (large σ).
    pub fn from_stable(rate: T, alpha: T, hurst: T, dispersion: T) -> Result<Self> {
        if !(dispersion > T::zero()) {
            return Err(Error::Domain("dispersion must be > 0".into()));
        }
        if !(alpha < T::of(2.0)) {
            return Err(Error::Domain("stable construction needs alpha < 2".into()));
        }
        let c = c_alpha(alpha)?;
        Self::new(rate, hurst, alpha, (dispersion / c).powf(alpha))
    }

    /// Envelope for the same model from Monte-Carlo quantiles:
    /// `K = sup_ε ε (b z(ε))^α` over the table entries with `z(ε) > 0`.
    /// Unlike [`Self::from_stable`], valid at every σ.
    pub fn from_stable_quantiles(
        rate: T,
        alpha: T,
        hurst: T,
        dispersion: T,
        table: &QuantileTable,
    ) -> Result<Self> {
        if !(dispersion > T::zero()) {
            return Err(Error::Domain("dispersion must be > 0".into()));
        }
        let mut k = T::zero();
        for &(eps, z) in table.entries() {
            if z <= 0.0 {
                continue; // σ = b z(ε) must be positive to constrain the envelope
            }
            let cand = T::of(eps) * (dispersion * T::of(z)).powf(alpha);
            if cand > k {
                k = cand;
            }
        }
        if k == T::zero() {
            return Err(Error::InvalidArgument(
                "quantile table has no entries with positive quantile".into(),
            ));
        }
        Self::new(rate, hurst, alpha, k)
    }

    /// Envelope for evenly spaced packets with Pareto sizes (tail index α,
    /// minimum size b): `r = λ E[X]`, `H = 1/α`, and `K = λ b^α` in the data
    /// unit of `b`. With sizes measured in units of `b` this is exactly
    /// `K = λ`; the `b^α` factor is the conversion into absolute units.
    pub fn from_pareto(lambda_packets: T, min_packet: T, alpha: T) -> Result<Self> {
        if !(lambda_packets > T::zero()) {
            return Err(Error::Domain("packet rate must be > 0".into()));
        }
        if !(min_packet > T::zero()) {
            return Err(Error::Domain("minimum packet size must be > 0".into()));
        }
        if !(alpha > T::one() && alpha < T::of(2.0)) {
            return Err(Error::Domain("pareto tail index must lie in (1,2)".into()));
        }
        let mean = min_packet * alpha / (alpha - T::one());
        Self::new(lambda_packets * mean, alpha.recip(), alpha, lambda_packets * min_packet.powf(alpha))
    }
}

impl<T: Real> GaussEnvelope<T> {
    pub fn new(rate: T, hurst: T, scale: T, k: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(Error::Domain("rate must be > 0".into()));
        }
        check_hurst(hurst)?;
        if !(scale > T::zero() && k > T::zero()) {
            return Err(Error::Domain("scale and prefactor must be > 0".into()));
        }
        Ok(Self { rate, hurst, scale, k })
    }

    /// Fractional-Brownian-motion style envelope, `K = 1/2`.
    pub fn from_fbm(rate: T, hurst: T, scale: T) -> Result<Self> {
        Self::new(rate, hurst, scale, T::of(0.5))
    }

    /// Envelope from an effective-bandwidth bound, `K = 1`.
    pub fn from_effective_bandwidth(rate: T, hurst: T, scale: T) -> Result<Self> {
        Self::new(rate, hurst, scale, T::one())
    }

    /// Violation bound `min(1, K e^{-(σ/b)²/2})`.
    pub fn violation(&self, sigma: T) -> Result<T> {
        if !(sigma > T::zero()) {
            return Err(Error::Domain("sigma must be positive".into()));
        }
        let v = sigma / self.scale;
        Ok((self.k * (-(v * v) / T::of(2.0)).exp()).min(T::one()))
    }

    /// Weibull-tailed sample-path envelope `(r+μ)t + σ` with
    /// `β = 2(1-H)`, `c = (2b/μ^H)^{1/(1-H)}`, and
    /// `L = e·max{1, 4^H K (r/μ + 2 - H) / (H(1-H))}`.
    pub fn sample_path_envelope(&self, mu: T) -> Result<SamplePathEnvelope<T>> {
        check_mu(mu)?;
        let (r, h, b, k) = (self.rate, self.hurst, self.scale, self.k);
        let one = T::one();
        let beta = T::of(2.0) * (one - h);
        let c = (T::of(2.0) * b / mu.powf(h)).powf((one - h).recip());
        let l = T::of(std::f64::consts::E)
            * (T::of(4.0).powf(h) * k * (r / mu + T::of(2.0) - h) / (h * (one - h))).max(one);
        Ok(SamplePathEnvelope {
            rate: r + mu,
            tail: TailBound::Weibull(Weibull::new(l, c, beta)?),
            mu,
            source: SamplePathSource::Weibull,
        })
    }
}
