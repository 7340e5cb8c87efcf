//! Probabilistic backlog and delay bounds at a node (and, through composed
//! service curves, end to end), quantile inversion, and the queueing-theory
//! lower bound used for comparison in the Pareto tandem.

use crate::algebra::{minimize_sum, PowerLaw, TailBound};
use crate::envelope::{GaussEnvelope, HtssEnvelope};
use crate::error::{Error, Result};
use crate::numeric::{invert_nonincreasing, min_over_split};
use crate::real::Real;
use crate::service::{HtServiceCurve, TailExpr};

/// Backlog tail bound `P(B(t) > σ) <= K̃ σ^{-α(1-H)}` at a constant-rate link.
#[derive(Debug, Clone, Copy)]
pub struct BacklogBound<T> {
    pub tail: PowerLaw<T>,
}

impl<T: Real> BacklogBound<T> {
    pub fn evaluate(&self, sigma: T) -> Result<T> {
        self.tail.evaluate(sigma)
    }
}

/// Backlog bound at a link of rate `C`: the sample-path tail with slack
/// `μ = C - r`. Requires `C > r`.
pub fn backlog_bound<T: Real>(env: &HtssEnvelope<T>, capacity: T) -> Result<BacklogBound<T>> {
    if !(capacity > env.rate) {
        return Err(Error::Unstable {
            node: 0,
            utilization: (env.rate / capacity).into_f64(),
        });
    }
    let sp = env.sample_path_envelope(capacity - env.rate)?;
    let tail = sp.tail.as_power_law().expect("power-law sample path tail");
    Ok(BacklogBound { tail })
}

/// Power-law delay bound in closed form: `P(W > w) <= M (Rw)^{-β'}`.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormDelay<T> {
    pub m: T,
    pub rate: T,
    pub exponent: T,
}

impl<T: Real> ClosedFormDelay<T> {
    pub fn evaluate(&self, w: T) -> Result<T> {
        if !(w > T::zero()) {
            return Err(Error::Domain("delay must be positive".into()));
        }
        Ok((self.m * (self.rate * w).powf(-self.exponent)).min(T::one()))
    }

    /// Analytic inversion `w(ε) = (M/ε)^{1/β'} / R`.
    pub fn quantile(&self, eps: T) -> Result<T> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        Ok((self.m / eps).powf(self.exponent.recip()) / self.rate)
    }
}

/// Delay bound from an arrival envelope and a service curve.
///
/// Two evaluators are exposed: the numeric two-term form, which minimizes the
/// burst split `σ1 + σ2 = Rw` between the arrival sample-path tail and the
/// service tail per query, and (when the service tail is a pure power law)
/// the closed form `M (Rw)^{-β'}`. The numeric form is pointwise at least as
/// tight; the closed form shows what the algebraic relaxation costs.
#[derive(Debug, Clone)]
pub struct DelayBound<T> {
    rate: T,
    arrival_tail: TailBound<T>,
    service_tail: TailExpr<T>,
    closed: Option<ClosedFormDelay<T>>,
}

impl<T: Real> DelayBound<T> {
    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn arrival_tail(&self) -> &TailBound<T> {
        &self.arrival_tail
    }

    pub fn service_tail(&self) -> &TailExpr<T> {
        &self.service_tail
    }

    pub fn closed_form(&self) -> Option<&ClosedFormDelay<T>> {
        self.closed.as_ref()
    }

    /// Two-term bound with the split minimized numerically.
    pub fn evaluate(&self, w: T) -> Result<T> {
        if !(w > T::zero()) {
            return Err(Error::Domain("delay must be positive".into()));
        }
        let budget = self.rate * w;
        let v = min_over_split(
            budget,
            |s| self.arrival_tail.evaluate(s).unwrap_or_else(|_| T::one()),
            |s| self.service_tail.evaluate(s).unwrap_or_else(|_| T::one()),
        );
        Ok(v.min(T::one()))
    }

    /// Two-term bound at a fixed split: the arrival tail receives
    /// `fraction · Rw` of the burst budget.
    pub fn evaluate_at_split(&self, w: T, fraction: T) -> Result<T> {
        if !(w > T::zero()) {
            return Err(Error::Domain("delay must be positive".into()));
        }
        if !(fraction > T::zero() && fraction < T::one()) {
            return Err(Error::InvalidArgument("split fraction must lie in (0,1)".into()));
        }
        let budget = self.rate * w;
        let s1 = budget * fraction;
        let v = self.arrival_tail.evaluate(s1)? + self.service_tail.evaluate(budget - s1)?;
        Ok(v.min(T::one()))
    }

    /// Closed-form bound, when available.
    pub fn evaluate_closed(&self, w: T) -> Option<Result<T>> {
        self.closed.map(|c| c.evaluate(w))
    }

    /// Smallest `w` with `evaluate(w) <= ε`, by geometric bisection on
    /// `[1 ns, 1e9 s]` refined to 1e-4 relative. For ε >= 1 this returns the
    /// cap boundary: the first `w` where the capped bound drops below 1.
    pub fn quantile(&self, eps: T) -> Result<T> {
        self.quantile_in(eps, T::of(1e-9), T::of(1e9))
    }

    /// [`Self::quantile`] with an explicit search range. Multi-node scaling
    /// bounds grow far past any physical delay, so scaling studies search a
    /// much wider range than the single-node default.
    pub fn quantile_in(&self, eps: T, lo: T, hi: T) -> Result<T> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        let f = |w: T| self.evaluate(w).unwrap_or_else(|_| T::one());
        if eps >= T::one() {
            let below_one = |w: T| {
                if f(w) < T::one() {
                    T::zero()
                } else {
                    T::one()
                }
            };
            return invert_nonincreasing(below_one, T::of(0.5), lo, hi, 1e-4);
        }
        invert_nonincreasing(f, eps, lo, hi, 1e-4)
    }
}

fn closed_form<T: Real>(
    arrival: PowerLaw<T>,
    service: PowerLaw<T>,
    rate: T,
) -> Result<ClosedFormDelay<T>> {
    let exponent = arrival.alpha.min(service.alpha);
    let m = minimize_sum(&[
        arrival.lower_power_to(exponent)?,
        service.lower_power_to(exponent)?,
    ])?
    .bound
    .k;
    Ok(ClosedFormDelay { m, rate, exponent })
}

fn delay_bound_from_tail<T: Real>(
    rate_in: T,
    arrival_tail: TailBound<T>,
    sc: &HtServiceCurve<T>,
) -> Result<DelayBound<T>> {
    if !(rate_in < sc.rate) {
        return Err(Error::Unstable {
            node: 0,
            utilization: (rate_in / sc.rate).into_f64(),
        });
    }
    let closed = match (&arrival_tail, sc.tail.as_power_law()) {
        (TailBound::PowerLaw(a), Some(s)) if !s.is_zero() => {
            Some(closed_form(*a, s, sc.rate)?)
        }
        _ => None,
    };
    Ok(DelayBound { rate: sc.rate, arrival_tail, service_tail: sc.tail.clone(), closed })
}

/// Delay bound at a node offering service curve `sc` to arrivals with
/// envelope `env`. Requires `r < R`; the arrival sample path uses the full
/// slack `μ = R - r`.
pub fn delay_bound<T: Real>(
    env: &HtssEnvelope<T>,
    sc: &HtServiceCurve<T>,
) -> Result<DelayBound<T>> {
    if !(env.rate < sc.rate) {
        return Err(Error::Unstable {
            node: 0,
            utilization: (env.rate / sc.rate).into_f64(),
        });
    }
    let sp = env.sample_path_envelope(sc.rate - env.rate)?;
    delay_bound_from_tail(env.rate, sp.tail, sc)
}

/// Delay bound for Gaussian-tailed self-similar arrivals: the arrival side is
/// the Weibull sample-path tail.
pub fn delay_bound_gauss<T: Real>(
    env: &GaussEnvelope<T>,
    sc: &HtServiceCurve<T>,
) -> Result<DelayBound<T>> {
    if !(env.rate < sc.rate) {
        return Err(Error::Unstable {
            node: 0,
            utilization: (env.rate / sc.rate).into_f64(),
        });
    }
    let sp = env.sample_path_envelope(sc.rate - env.rate)?;
    delay_bound_from_tail(env.rate, sp.tail, sc)
}

/// Steady-state lower bound on the delay quantile of an `N`-node tandem fed
/// by evenly spaced packets with Pareto sizes and no cross traffic:
///
/// `w_N(ε) >= (N b)^{α/(α-1)} / ((α-1) λ^{-1} |ln(1-ε)|)^{1/(α-1)}`.
///
/// `min_packet_time` is the transmission time of the minimum-size packet
/// (packet size over link rate), which makes the result seconds.
pub fn lower_bound_quantile_pareto<T: Real>(
    n_nodes: usize,
    min_packet_time: T,
    alpha: T,
    lambda_packets: T,
    eps: T,
) -> Result<T> {
    if n_nodes < 1 {
        return Err(Error::InvalidArgument("node count must be >= 1".into()));
    }
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidArgument("epsilon must lie in (0,1)".into()));
    }
    if !(alpha > T::one()) {
        return Err(Error::Domain("tail index must exceed 1".into()));
    }
    let am1 = alpha - T::one();
    let numer = (T::of(n_nodes as f64) * min_packet_time).powf(alpha / am1);
    let denom = (am1 / lambda_packets * (T::one() - eps).ln().abs()).powf(am1.recip());
    Ok(numer / denom)
}

/// CCDF form of the same lower bound: the ε at which `w` is the quantile.
pub fn lower_bound_ccdf_pareto<T: Real>(
    n_nodes: usize,
    min_packet_time: T,
    alpha: T,
    lambda_packets: T,
    w: T,
) -> Result<T> {
    if !(w > T::zero()) {
        return Err(Error::Domain("delay must be positive".into()));
    }
    let am1 = alpha - T::one();
    let x = lambda_packets * (T::of(n_nodes as f64) * min_packet_time).powf(alpha)
        / (am1 * w.powf(am1));
    Ok(T::one() - (-x).exp())
}
