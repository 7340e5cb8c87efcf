//! Multi-node composition: concatenating per-node service curves into one
//! end-to-end curve, the closed-form network service curve for homogeneous
//! chains (power-law and Weibull tails), end-to-end delay assembly for a
//! tandem path with cross traffic, and scaling studies over the path length.

use crate::algebra::{minimize_sum, PowerLaw, PowerLawLog, TailBound, Weibull};
use crate::bounds::{
    delay_bound, delay_bound_gauss, lower_bound_quantile_pareto, DelayBound,
};
use crate::envelope::{GaussEnvelope, HtssEnvelope};
use crate::error::{Error, Result};
use crate::numeric::slope;
use crate::real::Real;
use crate::service::{
    leftover_curve, leftover_with_packetizer, packetizer_curve, HtServiceCurve, LinkSpec, TailExpr,
};

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma > T::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rate-relaxation factor must exceed 1, got {}", gamma)))
    }
}

/// Log-corrected single-step tail of the first node in a concatenation:
/// `2^{[β-1]₊} ε̃(σ)(|ln ε̃(σ)| + 2)` with
/// `ε̃(σ) = min(1, 2^{max(1,β)} L / (β ln γ) σ^{-β})`.
fn concat_step_tail<T: Real>(first: PowerLaw<T>, gamma: T) -> Result<PowerLawLog<T>> {
    let beta = first.alpha;
    let level = T::of(2.0).powf(beta.max(T::one())) / (beta * gamma.ln()) * first.k;
    PowerLawLog::new(
        T::of(2.0).powf((beta - T::one()).max(T::zero())),
        level,
        beta,
        T::of(2.0),
    )
}

/// Concatenate two service curves into one curve for the pair, exact form:
/// rate `min(R1, R2/γ)` and the burst-split convolution of the first node's
/// log-corrected tail with the second node's tail. The first curve must have
/// a pure power-law tail; the second is arbitrary.
pub fn concat_two<T: Real>(
    first: &HtServiceCurve<T>,
    second: &HtServiceCurve<T>,
    gamma: T,
) -> Result<HtServiceCurve<T>> {
    check_gamma(gamma)?;
    let Some(p1) = first.tail.as_power_law() else {
        return Err(Error::Unsupported(
            "concatenation needs a pure power-law tail at the first node".into(),
        ));
    };
    let rate = first.rate.min(second.rate / gamma);
    if p1.is_zero() {
        // deterministic first node: only the second node's tail remains
        return HtServiceCurve::new(rate, second.tail.clone());
    }
    let step = TailExpr::Bound(TailBound::PowerLawLog(concat_step_tail(p1, gamma)?));
    HtServiceCurve::new(
        rate,
        TailExpr::InfConv(Box::new(step), Box::new(second.tail.clone())),
    )
}

/// Concatenate two power-law curves into a pure power law at a caller-chosen
/// exponent `beta` with `beta < β1` and `beta <= β2`: the logarithm is
/// eliminated, the exponents lowered, and the split minimized, yielding an
/// explicit constant.
pub fn concat_two_power_law<T: Real>(
    first: &HtServiceCurve<T>,
    second: &HtServiceCurve<T>,
    gamma: T,
    beta: T,
) -> Result<HtServiceCurve<T>> {
    check_gamma(gamma)?;
    let (Some(p1), Some(p2)) = (first.tail.as_power_law(), second.tail.as_power_law()) else {
        return Err(Error::Unsupported(
            "explicit-constant concatenation needs power-law tails at both nodes".into(),
        ));
    };
    if !(beta < p1.alpha && beta <= p2.alpha) {
        return Err(Error::InvalidArgument(
            "target exponent must be below the first node's and at most the second's".into(),
        ));
    }
    let rate = first.rate.min(second.rate / gamma);
    if p1.is_zero() {
        return HtServiceCurve::new(
            rate,
            TailExpr::Bound(TailBound::PowerLaw(p2.lower_power_to(beta)?)),
        );
    }
    let step = concat_step_tail(p1, gamma)?;
    // step(σ) <= scale·level·(β1 ln σ)σ^{-β1} + scale·level·(2 - ln level)₊ σ^{-β1}
    // in the uncapped regime; eliminate the log, lower both pieces to β, sum.
    let scale_level = step.scale * step.level;
    let log_piece = remove_logged(scale_level * step.beta, step.beta, beta)?;
    let const_mass = (T::of(2.0) - step.level.ln()).max(T::zero());
    let const_piece = if const_mass > T::zero() {
        PowerLaw::new(scale_level * const_mass, step.beta)?.lower_power(beta)?
    } else {
        PowerLaw::zero()
    };
    let first_combined = PowerLaw::new(log_piece.k + const_piece.k, beta)?;
    let combined = minimize_sum(&[first_combined, p2.lower_power_to(beta)?])?;
    HtServiceCurve::new(rate, TailExpr::Bound(TailBound::PowerLaw(combined.bound)))
}

/// `K σ^{-β1} ln σ <= K' σ^{-β}` via the log-elimination rule.
fn remove_logged<T: Real>(k: T, beta1: T, beta: T) -> Result<PowerLaw<T>> {
    let mult = crate::algebra::remove_log(beta1, beta)?;
    Ok(PowerLaw { k: k * mult.k, alpha: beta })
}

/// End-to-end service curve for `N` nodes in series.
#[derive(Debug, Clone)]
pub struct NetworkServiceCurve<T> {
    pub rate: T,
    pub tail: TailBound<T>,
    pub nodes: usize,
    pub gamma: T,
}

impl<T: Real> NetworkServiceCurve<T> {
    pub fn as_service_curve(&self) -> Result<HtServiceCurve<T>> {
        HtServiceCurve::new(self.rate, TailExpr::Bound(self.tail))
    }
}

/// Network service curve for `N` homogeneous nodes, each offering rate `R`
/// with power-law tail `L σ^{-β}`: rate `R/γ` and violation bound
/// `N^{2+β} 2^{[β-1]₊} ε̃(σ)(|ln ε̃(σ)| + (1+β) ln N + 2)` with
/// `ε̃(σ) = min(1, 2^{max(1,β)} L/(β ln γ) σ^{-β})`.
///
/// Heterogeneous chains are first homogenized (minimum rate and exponent,
/// maximum lowered prefactor); see [`homogenize_power_law`].
pub fn network_service_curve<T: Real>(
    per_node: &HtServiceCurve<T>,
    nodes: usize,
    gamma: T,
) -> Result<NetworkServiceCurve<T>> {
    check_gamma(gamma)?;
    if nodes < 1 {
        return Err(Error::InvalidArgument("node count must be >= 1".into()));
    }
    let Some(p) = per_node.tail.as_power_law() else {
        return Err(Error::Unsupported("network curve needs a power-law per-node tail".into()));
    };
    let n = T::of(nodes as f64);
    let rate = per_node.rate / gamma;
    if p.is_zero() {
        return Ok(NetworkServiceCurve {
            rate,
            tail: TailBound::PowerLaw(PowerLaw::zero()),
            nodes,
            gamma,
        });
    }
    let beta = p.alpha;
    let step = concat_step_tail(p, gamma)?;
    let tail = PowerLawLog::new(
        n.powf(T::of(2.0) + beta) * step.scale,
        step.level,
        beta,
        (T::one() + beta) * n.ln() + T::of(2.0),
    )?;
    Ok(NetworkServiceCurve { rate, tail: TailBound::PowerLawLog(tail), nodes, gamma })
}

/// Network service curve for `N` homogeneous Weibull-tailed nodes
/// (`L e^{-(σ/c)^β}`): rate `R/γ`, prefactor `N(1 + N/ln γ) L̃` with
/// `L̃ = max{e² ln γ / N, (2e)^{[β-1]₊} L / c}`, and scale `Nc`.
pub fn network_service_curve_weibull<T: Real>(
    per_node: &HtServiceCurve<T>,
    nodes: usize,
    gamma: T,
) -> Result<NetworkServiceCurve<T>> {
    check_gamma(gamma)?;
    if nodes < 1 {
        return Err(Error::InvalidArgument("node count must be >= 1".into()));
    }
    let Some(w) = per_node.tail.as_bound().and_then(|b| b.as_weibull()) else {
        return Err(Error::Unsupported("network curve needs a Weibull per-node tail".into()));
    };
    let n = T::of(nodes as f64);
    let e = T::of(std::f64::consts::E);
    let l_tilde = (e * e / n * gamma.ln())
        .max(T::of(2.0 * std::f64::consts::E).powf((w.beta - T::one()).max(T::zero())) / w.c * w.l);
    let tail = Weibull::new(n * (T::one() + n / gamma.ln()) * l_tilde, n * w.c, w.beta)?;
    Ok(NetworkServiceCurve {
        rate: per_node.rate / gamma,
        tail: TailBound::Weibull(tail),
        nodes,
        gamma,
    })
}

/// Concatenate a Weibull-tailed first node with an arbitrary second node:
/// rate `min(R1, R2/γ)` and the split convolution of
/// `L̃1 e^{-(σ/c1)^{β1}}` (with `L̃1 = max{e², γ/(γ-1) (2e)^{[β1-1]₊} L1/c1}`)
/// with the second tail.
pub fn concat_two_weibull<T: Real>(
    first: &HtServiceCurve<T>,
    second: &HtServiceCurve<T>,
    gamma: T,
) -> Result<HtServiceCurve<T>> {
    check_gamma(gamma)?;
    let Some(w1) = first.tail.as_bound().and_then(|b| b.as_weibull()) else {
        return Err(Error::Unsupported(
            "Weibull concatenation needs a Weibull tail at the first node".into(),
        ));
    };
    let e = T::of(std::f64::consts::E);
    let l_tilde = (e * e).max(
        gamma / (gamma - T::one())
            * T::of(2.0 * std::f64::consts::E).powf((w1.beta - T::one()).max(T::zero()))
            / w1.c
            * w1.l,
    );
    let step = TailExpr::Bound(TailBound::Weibull(Weibull::new(l_tilde, w1.c, w1.beta)?));
    HtServiceCurve::new(
        first.rate.min(second.rate / gamma),
        TailExpr::InfConv(Box::new(step), Box::new(second.tail.clone())),
    )
}

/// Reduce heterogeneous power-law curves to one homogeneous curve that every
/// node dominates: minimum rate, minimum exponent, maximum prefactor after
/// lowering each node to that exponent.
pub fn homogenize_power_law<T: Real>(curves: &[HtServiceCurve<T>]) -> Result<HtServiceCurve<T>> {
    if curves.is_empty() {
        return Err(Error::InvalidArgument("no per-node curves".into()));
    }
    let mut tails = Vec::with_capacity(curves.len());
    let mut rate = T::infinity();
    for c in curves {
        let Some(p) = c.tail.as_power_law() else {
            return Err(Error::Unsupported("homogenization needs power-law tails".into()));
        };
        rate = rate.min(c.rate);
        tails.push(p);
    }
    let beta = tails
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.alpha)
        .fold(T::infinity(), |a, b| a.min(b));
    if beta == T::infinity() {
        return HtServiceCurve::deterministic(rate);
    }
    let mut k = T::zero();
    for p in &tails {
        let lowered = if p.alpha == beta { *p } else { p.lower_power(beta)? };
        k = k.max(lowered.k);
    }
    HtServiceCurve::new(rate, TailExpr::Bound(TailBound::PowerLaw(PowerLaw::new(k, beta)?)))
}

/// Same reduction for Weibull tails: minimum rate and exponent, maximum scale
/// and prefactor (valid in the capped regime, like the power-law lowering).
pub fn homogenize_weibull<T: Real>(curves: &[HtServiceCurve<T>]) -> Result<HtServiceCurve<T>> {
    if curves.is_empty() {
        return Err(Error::InvalidArgument("no per-node curves".into()));
    }
    let mut rate = T::infinity();
    let mut l = T::zero();
    let mut c_scale = T::zero();
    let mut beta = T::infinity();
    for c in curves {
        let Some(w) = c.tail.as_bound().and_then(|b| b.as_weibull()) else {
            return Err(Error::Unsupported("homogenization needs Weibull tails".into()));
        };
        rate = rate.min(c.rate);
        l = l.max(w.l);
        c_scale = c_scale.max(w.c);
        beta = beta.min(w.beta);
    }
    HtServiceCurve::new(rate, TailExpr::Bound(TailBound::Weibull(Weibull::new(l, c_scale, beta)?)))
}

/// Policy for the per-node rate slack μ.
#[derive(Debug, Clone, PartialEq)]
pub enum MuPolicy<T> {
    /// μ = f · (C - r_c - r_0) of the residual capacity at each node.
    Fraction(T),
    /// Explicit per-node slack list.
    Explicit(Vec<T>),
}

impl<T: Real> MuPolicy<T> {
    /// The residual-capacity preset μ = (C - r_c - r_0)/2.
    pub fn half_residual() -> Self {
        MuPolicy::Fraction(T::of(0.5))
    }

    /// The residual-capacity preset μ = (C - r_c - r_0)/3 used by the
    /// multi-node scaling recipe.
    pub fn third_residual() -> Self {
        MuPolicy::Fraction(T::of(1.0 / 3.0))
    }
}

/// Through traffic entering a path.
#[derive(Debug, Clone)]
pub enum ThroughFlow<T> {
    /// Evenly spaced packets with Pareto sizes; carries enough structure for
    /// the packet-level lower bound.
    Pareto { lambda_packets: T, min_packet: T, alpha: T },
    Htss(HtssEnvelope<T>),
    Gauss(GaussEnvelope<T>),
}

impl<T: Real> ThroughFlow<T> {
    pub fn rate(&self) -> Result<T> {
        Ok(match self {
            ThroughFlow::Pareto { lambda_packets, min_packet, alpha } => {
                *lambda_packets * *min_packet * *alpha / (*alpha - T::one())
            }
            ThroughFlow::Htss(e) => e.rate,
            ThroughFlow::Gauss(e) => e.rate,
        })
    }

    fn htss_envelope(&self) -> Result<Option<HtssEnvelope<T>>> {
        Ok(match self {
            ThroughFlow::Pareto { lambda_packets, min_packet, alpha } => {
                Some(HtssEnvelope::from_pareto(*lambda_packets, *min_packet, *alpha)?)
            }
            ThroughFlow::Htss(e) => Some(*e),
            ThroughFlow::Gauss(_) => None,
        })
    }
}

/// A tandem path: ordered links, the through flow, the slack policy, and an
/// optional explicit rate-relaxation factor (defaulted from the slack when
/// absent).
#[derive(Debug, Clone)]
pub struct PathSpec<T> {
    pub nodes: Vec<LinkSpec<T>>,
    pub through: ThroughFlow<T>,
    pub mu_policy: MuPolicy<T>,
    pub gamma: Option<T>,
}

/// Assembled end-to-end delay bound with the composition metadata.
#[derive(Debug, Clone)]
pub struct EndToEndDelay<T> {
    pub bound: DelayBound<T>,
    /// Rate-relaxation factor used by the network curve (1 for a single node).
    pub gamma: T,
    /// End-to-end guaranteed rate.
    pub rate_net: T,
    pub nodes: usize,
    /// Burst-split fraction `N^{-1-2/β}` that reproduces the closed scaling
    /// recipe when passed to `DelayBound::evaluate_at_split`.
    pub recipe_split: Option<T>,
}

fn per_node_curve<T: Real>(link: &LinkSpec<T>, mu: T) -> Result<HtServiceCurve<T>> {
    match (&link.cross, &link.packetizer) {
        (Some(_), Some(_)) => leftover_with_packetizer(link, mu),
        (Some(_), None) => leftover_curve(link, mu),
        (None, Some(p)) => packetizer_curve(link.capacity, p),
        (None, None) => HtServiceCurve::deterministic(link.capacity),
    }
}

/// Check stability and compute per-node slacks.
fn node_slacks<T: Real>(path: &PathSpec<T>, r0: T) -> Result<Vec<T>> {
    let mut mus = Vec::with_capacity(path.nodes.len());
    for (i, link) in path.nodes.iter().enumerate() {
        let rc = link.cross_rate();
        let residual = link.capacity - rc - r0;
        if !(residual > T::zero()) {
            return Err(Error::Unstable {
                node: i,
                utilization: ((r0 + rc) / link.capacity).into_f64(),
            });
        }
        let mu = match &path.mu_policy {
            MuPolicy::Fraction(f) => {
                if !(*f > T::zero() && *f < T::one()) {
                    return Err(Error::InvalidArgument(
                        "slack fraction must lie in (0,1)".into(),
                    ));
                }
                residual * *f
            }
            MuPolicy::Explicit(list) => *list.get(i).ok_or_else(|| {
                Error::InvalidArgument(format!("explicit slack list is missing node {i}"))
            })?,
        };
        // packetizer-only nodes take no slack
        if link.cross.is_some() && !(mu > T::zero() && mu < residual) {
            return Err(Error::InvalidArgument(format!(
                "slack at node {i} must lie in (0, residual)"
            )));
        }
        mus.push(mu);
    }
    Ok(mus)
}

/// Assemble the end-to-end delay bound for a path: per-node leftover (and/or
/// packetizer) curves, homogenization, the network service curve, and the
/// two-term delay bound against the through flow's sample-path envelope.
/// A single node skips the network curve entirely and reduces to the
/// single-node bound.
pub fn end_to_end_delay<T: Real>(path: &PathSpec<T>) -> Result<EndToEndDelay<T>> {
    if path.nodes.is_empty() {
        return Err(Error::InvalidArgument("path has no nodes".into()));
    }
    let r0 = path.through.rate()?;
    let mus = node_slacks(path, r0)?;
    let curves: Vec<HtServiceCurve<T>> = path
        .nodes
        .iter()
        .zip(&mus)
        .map(|(link, &mu)| per_node_curve(link, mu))
        .collect::<Result<_>>()?;

    let n = curves.len();
    let (net_curve, gamma, recipe_split) = if n == 1 {
        (curves.into_iter().next().unwrap(), T::one(), None)
    } else {
        let all_weibull = curves
            .iter()
            .all(|c| c.tail.as_bound().map_or(false, |b| b.as_weibull().is_some()));
        let homogeneous = if all_weibull {
            homogenize_weibull(&curves)?
        } else {
            homogenize_power_law(&curves)?
        };
        let mu_min = mus.iter().fold(T::infinity(), |a, &b| a.min(b));
        let gamma = match path.gamma {
            Some(g) => {
                check_gamma(g)?;
                g
            }
            None => {
                // scaling-recipe default: relax the per-node rate down to r0 + μ
                let g = homogeneous.rate / (r0 + mu_min);
                if !(g > T::one()) {
                    return Err(Error::InvalidArgument(format!(
                        "default relaxation failed: per-node rate {} does not exceed r0 + mu {}",
                        homogeneous.rate,
                        r0 + mu_min
                    )));
                }
                g
            }
        };
        let net = if all_weibull {
            network_service_curve_weibull(&homogeneous, n, gamma)?
        } else {
            network_service_curve(&homogeneous, n, gamma)?
        };
        let split = net.tail.as_power_law().map(|p| p.alpha).or_else(|| match net.tail {
            TailBound::PowerLawLog(pl) => Some(pl.beta),
            _ => None,
        });
        let recipe = split.map(|beta| {
            T::of(n as f64).powf(-(T::one() + T::of(2.0) / beta))
        });
        (net.as_service_curve()?, gamma, recipe)
    };

    let bound = match &path.through {
        ThroughFlow::Gauss(env) => delay_bound_gauss(env, &net_curve)?,
        other => {
            let env = other.htss_envelope()?.expect("htss through flow");
            delay_bound(&env, &net_curve)?
        }
    };
    Ok(EndToEndDelay {
        rate_net: net_curve.rate,
        bound,
        gamma,
        nodes: n,
        recipe_split,
    })
}

/// One row of a scaling study.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow<T> {
    pub nodes: usize,
    pub w_upper: T,
    pub w_lower: Option<T>,
}

/// Delay quantiles against the path length, with fitted log-log slopes.
#[derive(Debug, Clone)]
pub struct ScalingStudy<T> {
    pub epsilon: T,
    pub rows: Vec<ScalingRow<T>>,
    pub upper_slope: Option<f64>,
    pub lower_slope: Option<f64>,
}

/// Replicate the template path's first node over each requested length and
/// tabulate the delay quantile `w(ε)`; the packet-level lower-bound column is
/// included when the through flow is Pareto and the template has no cross
/// traffic.
pub fn scaling_study<T: Real>(
    template: &PathSpec<T>,
    node_counts: &[usize],
    epsilon: T,
) -> Result<ScalingStudy<T>> {
    if node_counts.is_empty() {
        return Err(Error::InvalidArgument("no node counts requested".into()));
    }
    let Some(node) = template.nodes.first() else {
        return Err(Error::InvalidArgument("template path has no nodes".into()));
    };
    let lower_applies = matches!(template.through, ThroughFlow::Pareto { .. })
        && node.cross.is_none();
    let mut rows = Vec::with_capacity(node_counts.len());
    for &n in node_counts {
        let path = PathSpec {
            nodes: vec![node.clone(); n],
            through: template.through.clone(),
            mu_policy: template.mu_policy.clone(),
            gamma: template.gamma,
        };
        let e2e = end_to_end_delay(&path)?;
        let w_upper = e2e.bound.quantile_in(epsilon, T::of(1e-9), T::of(1e45))?;
        let w_lower = if let (true, ThroughFlow::Pareto { lambda_packets, min_packet, alpha }) =
            (lower_applies, &template.through)
        {
            Some(lower_bound_quantile_pareto(
                n,
                *min_packet / node.capacity,
                *alpha,
                *lambda_packets,
                epsilon,
            )?)
        } else {
            None
        };
        rows.push(ScalingRow { nodes: n, w_upper, w_lower });
    }
    let (upper_slope, lower_slope) = if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| (r.nodes as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.w_upper.into_f64().ln()).collect();
        let up = Some(slope(&xs, &ys));
        let low = if lower_applies {
            let yl: Vec<f64> = rows.iter().map(|r| r.w_lower.unwrap().into_f64().ln()).collect();
            Some(slope(&xs, &yl))
        } else {
            None
        };
        (up, low)
    } else {
        (None, None)
    };
    Ok(ScalingStudy { epsilon, rows, upper_slope, lower_slope })
}
