//! Heavy-tailed service curves: latency-rate guarantees `[Rt - σ]₊` whose
//! violation probability decays as a power law (or Weibull tail), the
//! packetizer curve at a constant-rate link, and the leftover service under
//! heavy-tailed cross traffic.

use crate::algebra::{minimize_sum, PowerLaw, TailBound};
use crate::envelope::{GaussEnvelope, HtssEnvelope};
use crate::error::{Error, Result};
use crate::numeric::min_over_split;
use crate::real::Real;

/// Violation-probability function of a service curve: either one of the
/// closed tail-bound kinds, or the exact burst-split convolution
/// `inf_{σ1+σ2=σ} {lhs(σ1) + rhs(σ2)}` produced by concatenation.
#[derive(Debug, Clone)]
pub enum TailExpr<T> {
    Bound(TailBound<T>),
    InfConv(Box<TailExpr<T>>, Box<TailExpr<T>>),
}

impl<T: Real> TailExpr<T> {
    pub fn power_law(k: T, alpha: T) -> Result<Self> {
        Ok(TailExpr::Bound(TailBound::power_law(k, alpha)?))
    }

    /// Capped violation probability at σ. Convolution nodes minimize the
    /// split numerically (scan plus golden-section, dense at both edges).
    pub fn evaluate(&self, sigma: T) -> Result<T> {
        if !(sigma > T::zero()) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", sigma)));
        }
        match self {
            TailExpr::Bound(b) => b.evaluate(sigma),
            TailExpr::InfConv(lhs, rhs) => {
                let v = min_over_split(
                    sigma,
                    |s| lhs.evaluate(s).unwrap_or_else(|_| T::one()),
                    |s| rhs.evaluate(s).unwrap_or_else(|_| T::one()),
                );
                Ok(v.min(T::one()))
            }
        }
    }

    pub fn as_power_law(&self) -> Option<PowerLaw<T>> {
        match self {
            TailExpr::Bound(TailBound::PowerLaw(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn as_bound(&self) -> Option<&TailBound<T>> {
        match self {
            TailExpr::Bound(b) => Some(b),
            _ => None,
        }
    }
}

/// Statistical service curve `[Rt - σ]₊` with violation bound `tail(σ)`.
#[derive(Debug, Clone)]
pub struct HtServiceCurve<T> {
    pub rate: T,
    pub tail: TailExpr<T>,
}

impl<T: Real> HtServiceCurve<T> {
    pub fn new(rate: T, tail: TailExpr<T>) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(Error::InvalidArgument(format!("service rate must be > 0, got {}", rate)));
        }
        Ok(Self { rate, tail })
    }

    /// Deterministic rate-`C` service (violation probability 0).
    pub fn deterministic(rate: T) -> Result<Self> {
        Self::new(rate, TailExpr::Bound(TailBound::PowerLaw(PowerLaw::zero())))
    }
}

/// Packetizer description: packet-size tail `P(X > σ) <= L σ^{-α}`, the mean
/// packet size, and the through flow's utilization share of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packetizer<T> {
    pub alpha: T,
    pub prefactor: T,
    pub mean_packet: T,
    pub utilization: T,
}

impl<T: Real> Packetizer<T> {
    pub fn new(alpha: T, prefactor: T, mean_packet: T, utilization: T) -> Result<Self> {
        if !(alpha > T::one()) {
            return Err(Error::InvalidArgument(
                "packet-size tail index must exceed 1 (mean lifetime diverges otherwise)".into(),
            ));
        }
        if !(prefactor > T::zero() && mean_packet > T::zero()) {
            return Err(Error::InvalidArgument("packetizer parameters must be > 0".into()));
        }
        if !(utilization > T::zero() && utilization <= T::one()) {
            return Err(Error::InvalidArgument("utilization must lie in (0,1]".into()));
        }
        Ok(Self { alpha, prefactor, mean_packet, utilization })
    }

    /// Pareto packet sizes with minimum `b`: `L = b^α`, `E[X] = bα/(α-1)`.
    pub fn pareto(alpha: T, min_packet: T, utilization: T) -> Result<Self> {
        if !(min_packet > T::zero()) {
            return Err(Error::InvalidArgument("minimum packet size must be > 0".into()));
        }
        if !(alpha > T::one()) {
            return Err(Error::InvalidArgument("pareto tail index must exceed 1".into()));
        }
        let mean = min_packet * alpha / (alpha - T::one());
        Self::new(alpha, min_packet.powf(alpha), mean, utilization)
    }
}

/// One constant-rate link: capacity, optional cross traffic, optional
/// packetizer for the through flow.
#[derive(Debug, Clone)]
pub struct LinkSpec<T> {
    pub capacity: T,
    pub cross: Option<CrossTraffic<T>>,
    pub packetizer: Option<Packetizer<T>>,
}

/// Cross-traffic envelope at a link. The Gaussian variant routes to the
/// Weibull-tailed leftover construction.
#[derive(Debug, Clone)]
pub enum CrossTraffic<T> {
    Htss(HtssEnvelope<T>),
    Gauss(GaussEnvelope<T>),
}

impl<T: Real> CrossTraffic<T> {
    pub fn rate(&self) -> T {
        match self {
            CrossTraffic::Htss(e) => e.rate,
            CrossTraffic::Gauss(e) => e.rate,
        }
    }
}

impl<T: Real> LinkSpec<T> {
    pub fn new(capacity: T) -> Result<Self> {
        if !(capacity > T::zero()) {
            return Err(Error::InvalidArgument("link capacity must be > 0".into()));
        }
        Ok(Self { capacity, cross: None, packetizer: None })
    }

    pub fn with_cross(mut self, cross: CrossTraffic<T>) -> Self {
        self.cross = Some(cross);
        self
    }

    pub fn with_packetizer(mut self, p: Packetizer<T>) -> Self {
        self.packetizer = Some(p);
        self
    }

    pub fn cross_rate(&self) -> T {
        self.cross.as_ref().map(|c| c.rate()).unwrap_or_else(T::zero)
    }
}

/// Service curve of a work-conserving constant-rate link seen through a
/// packetizer: rate `C` and violation bound
/// `ρ L / ((α-1) E[X]) · σ^{-(α-1)}` from the stationary lifetime of the
/// packet in transmission. Requires the first packet's arrival after an empty
/// start to be properly randomized for the stationary bound to apply at all
/// times.
pub fn packetizer_curve<T: Real>(capacity: T, p: &Packetizer<T>) -> Result<HtServiceCurve<T>> {
    let k = p.utilization * p.prefactor / ((p.alpha - T::one()) * p.mean_packet);
    HtServiceCurve::new(capacity, TailExpr::power_law(k, p.alpha - T::one())?)
}

/// Leftover service for the through flow at a link with cross traffic: rate
/// `C - r_c - μ` with the cross traffic's sample-path violation bound. The
/// slack μ > 0 trades guaranteed rate against the burst prefactor.
pub fn leftover_curve<T: Real>(link: &LinkSpec<T>, mu: T) -> Result<HtServiceCurve<T>> {
    let cross = link
        .cross
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("leftover service needs a cross envelope".into()))?;
    let rate = link.capacity - cross.rate() - mu;
    if !(rate > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "leftover rate C - r_c - mu must be > 0, got {}",
            rate
        )));
    }
    let tail = match cross {
        CrossTraffic::Htss(env) => env.sample_path_envelope(mu)?.tail,
        CrossTraffic::Gauss(env) => env.sample_path_envelope(mu)?.tail,
    };
    HtServiceCurve::new(rate, TailExpr::Bound(tail))
}

/// Leftover service combined with the packetizer curve into a single pure
/// power law: exponent `β = min{α_p - 1, α_c(1-H_c)}`, prefactor obtained by
/// lowering the larger exponent and then minimizing the two-term sum over the
/// burst split. Without a packetizer this reduces to [`leftover_curve`].
pub fn leftover_with_packetizer<T: Real>(link: &LinkSpec<T>, mu: T) -> Result<HtServiceCurve<T>> {
    let Some(pkt) = link.packetizer else {
        return leftover_curve(link, mu);
    };
    let leftover = leftover_curve(link, mu)?;
    let Some(cross_term) = leftover.tail.as_power_law() else {
        return Err(Error::Unsupported(
            "packetizer combination is defined for power-law cross traffic".into(),
        ));
    };
    let pkt_term = packetizer_curve(link.capacity, &pkt)?
        .tail
        .as_power_law()
        .expect("packetizer tail is a power law");
    let beta = cross_term.alpha.min(pkt_term.alpha);
    let combined = minimize_sum(&[
        cross_term.lower_power_to(beta)?,
        pkt_term.lower_power_to(beta)?,
    ])?;
    HtServiceCurve::new(leftover.rate, TailExpr::Bound(TailBound::PowerLaw(combined.bound)))
}
