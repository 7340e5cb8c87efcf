//! Closed algebra over violation-probability bound functions.
//!
//! Three families are supported: pure power laws `K σ^{-α}`, power laws with a
//! logarithmic factor, and Weibull tails `L e^{-(σ/c)^β}`. Every bound is a
//! probability, so evaluation caps at 1; the parameters themselves are stored
//! uncapped so that algebraic composition stays exact.
//!
//! The manipulation rules (lowering a power, eliminating a logarithm, removing
//! a shift, minimizing sums under a burst split) each trade tightness for a
//! simpler closed form. They hold in the regime where the input bound is at
//! most 1; after capping, the outputs remain valid probability bounds
//! everywhere, so the regime is only enforced by the dominance tests.

use crate::error::{Error, Result};
use crate::real::Real;

/// Power-law violation bound `K σ^{-α}` (capped at 1 when evaluated).
///
/// `k == 0` is allowed and denotes a vacuous bound (probability 0), which
/// shows up naturally as cross traffic vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw<T> {
    pub k: T,
    pub alpha: T,
}

/// Log-corrected power law `scale · m(σ) · (|ln m(σ)| + offset)` with the
/// inner cap `m(σ) = min(1, level · σ^{-β})`. This is the shape produced by
/// service-curve concatenation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawLog<T> {
    pub scale: T,
    pub level: T,
    pub beta: T,
    pub offset: T,
}

/// Weibull violation bound `L e^{-(σ/c)^β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weibull<T> {
    pub l: T,
    pub c: T,
    pub beta: T,
}

/// A violation-probability bound function of the burst parameter σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound<T> {
    PowerLaw(PowerLaw<T>),
    PowerLawLog(PowerLawLog<T>),
    Weibull(Weibull<T>),
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg.to_string()))
    }
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if sigma > T::zero() && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("sigma must be positive, got {}", sigma)))
    }
}

impl<T: Real> PowerLaw<T> {
    pub fn new(k: T, alpha: T) -> Result<Self> {
        require(k >= T::zero() && k.is_finite(), "power-law prefactor must be >= 0")?;
        require(alpha > T::zero(), "power-law exponent must be > 0")?;
        Ok(Self { k, alpha })
    }

    /// Vacuous bound (probability 0 at every σ).
    pub fn zero() -> Self {
        Self { k: T::zero(), alpha: T::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.k == T::zero()
    }

    /// `min(1, K σ^{-α})`.
    pub fn evaluate(&self, sigma: T) -> Result<T> {
        check_sigma(sigma)?;
        Ok((self.k * sigma.powf(-self.alpha)).min(T::one()))
    }

    /// Lower the decay exponent to `alpha_prime < α`: the bound
    /// `K' σ^{-α'}` with `K' = K^{α'/α}` dominates wherever `K σ^{-α} <= 1`.
    pub fn lower_power(&self, alpha_prime: T) -> Result<PowerLaw<T>> {
        require(alpha_prime > T::zero(), "target exponent must be > 0")?;
        require(
            alpha_prime < self.alpha,
            "target exponent must be strictly below the current one",
        )?;
        Ok(PowerLaw { k: self.k.powf(alpha_prime / self.alpha), alpha: alpha_prime })
    }

    /// Like [`Self::lower_power`] but a no-op when the exponent already matches.
    pub fn lower_power_to(&self, alpha_prime: T) -> Result<PowerLaw<T>> {
        if alpha_prime == self.alpha {
            Ok(*self)
        } else {
            self.lower_power(alpha_prime)
        }
    }

    /// Absorb a negative argument shift: `K (σ-σ₀)^{-α} <= K' σ^{-α}` with
    /// `K' = 2^{[α-1]₊}(K + σ₀^α)`, valid where the left side is <= 1.
    pub fn remove_shift(&self, sigma0: T) -> Result<PowerLaw<T>> {
        require(sigma0 >= T::zero(), "shift must be nonnegative")?;
        let bump = T::of(2.0).powf((self.alpha - T::one()).max(T::zero()));
        Ok(PowerLaw { k: bump * (self.k + sigma0.powf(self.alpha)), alpha: self.alpha })
    }
}

/// Eliminate a logarithmic factor: `σ^{-β} ln σ <= K σ^{-β'}` for `β' < β`
/// with `K = 1/(e(β-β'))`, returned as a power law multiplier.
pub fn remove_log<T: Real>(beta: T, beta_prime: T) -> Result<PowerLaw<T>> {
    require(beta > T::zero() && beta_prime > T::zero(), "exponents must be > 0")?;
    require(beta_prime < beta, "target exponent must be strictly below the current one")?;
    let k = (T::of(std::f64::consts::E) * (beta - beta_prime)).recip();
    Ok(PowerLaw { k, alpha: beta_prime })
}

/// Result of minimizing a sum of common-exponent power laws over a burst
/// split: the combined bound and the optimal split proportions.
#[derive(Debug, Clone)]
pub struct MinimizedSum<T> {
    pub bound: PowerLaw<T>,
    /// σ_j* / σ, proportional to `K_j^{1/(1+α)}`.
    pub proportions: Vec<T>,
}

/// Exact minimum of `Σ_j K_j σ_j^{-α}` over splits `σ_1 + … + σ_n = σ`:
/// a power law with prefactor `(Σ_j K_j^{1/(1+α)})^{1+α}`.
pub fn minimize_sum<T: Real>(terms: &[PowerLaw<T>]) -> Result<MinimizedSum<T>> {
    require(!terms.is_empty(), "minimize_sum needs at least one term")?;
    let alpha = terms[0].alpha;
    for t in terms {
        let rel = (t.alpha - alpha).abs() / alpha;
        require(rel <= T::of(1e-12), "minimize_sum terms must share the exponent")?;
    }
    let e = (T::one() + alpha).recip();
    let roots: Vec<T> = terms.iter().map(|t| t.k.powf(e)).collect();
    let total: T = roots.iter().fold(T::zero(), |acc, &r| acc + r);
    if total == T::zero() {
        // all terms vacuous
        return Ok(MinimizedSum {
            bound: PowerLaw { k: T::zero(), alpha },
            proportions: vec![(T::of(terms.len() as f64)).recip(); terms.len()],
        });
    }
    Ok(MinimizedSum {
        bound: PowerLaw { k: total.powf(T::one() + alpha), alpha },
        proportions: roots.iter().map(|&r| r / total).collect(),
    })
}

impl<T: Real> PowerLawLog<T> {
    pub fn new(scale: T, level: T, beta: T, offset: T) -> Result<Self> {
        require(scale > T::zero() && scale.is_finite(), "scale must be > 0")?;
        require(level >= T::zero() && level.is_finite(), "level must be >= 0")?;
        require(beta > T::zero(), "exponent must be > 0")?;
        require(offset >= T::zero(), "log offset must be >= 0")?;
        Ok(Self { scale, level, beta, offset })
    }

    pub fn evaluate(&self, sigma: T) -> Result<T> {
        check_sigma(sigma)?;
        let m = (self.level * sigma.powf(-self.beta)).min(T::one());
        if m == T::zero() {
            return Ok(T::zero());
        }
        Ok((self.scale * m * (m.ln().abs() + self.offset)).min(T::one()))
    }
}

impl<T: Real> Weibull<T> {
    pub fn new(l: T, c: T, beta: T) -> Result<Self> {
        require(l >= T::zero() && l.is_finite(), "weibull prefactor must be >= 0")?;
        require(c > T::zero(), "weibull scale must be > 0")?;
        require(beta > T::zero(), "weibull exponent must be > 0")?;
        Ok(Self { l, c, beta })
    }

    pub fn evaluate(&self, sigma: T) -> Result<T> {
        check_sigma(sigma)?;
        Ok((self.l * (-(sigma / self.c).powf(self.beta)).exp()).min(T::one()))
    }
}

impl<T: Real> TailBound<T> {
    pub fn power_law(k: T, alpha: T) -> Result<Self> {
        Ok(TailBound::PowerLaw(PowerLaw::new(k, alpha)?))
    }

    pub fn weibull(l: T, c: T, beta: T) -> Result<Self> {
        Ok(TailBound::Weibull(Weibull::new(l, c, beta)?))
    }

    /// Capped violation probability at burst level σ.
    pub fn evaluate(&self, sigma: T) -> Result<T> {
        match self {
            TailBound::PowerLaw(p) => p.evaluate(sigma),
            TailBound::PowerLawLog(p) => p.evaluate(sigma),
            TailBound::Weibull(w) => w.evaluate(sigma),
        }
    }

    pub fn as_power_law(&self) -> Option<PowerLaw<T>> {
        match self {
            TailBound::PowerLaw(p) => Some(*p),
            _ => None,
        }
    }

    pub fn as_weibull(&self) -> Option<Weibull<T>> {
        match self {
            TailBound::Weibull(w) => Some(*w),
            _ => None,
        }
    }

    /// Tail integral `∫_z^∞ ε(x)/x dx` in closed form. Supported for power
    /// laws and for the Gaussian case (Weibull with β = 2, where the standard
    /// `∫_z^∞ e^{-u²} / u du <= e^{-z²} / (2 z²)` estimate applies).
    fn log_tail_integral(&self, z: T) -> Result<T> {
        match self {
            TailBound::PowerLaw(p) => Ok(p.k / p.alpha * z.powf(-p.alpha)),
            TailBound::Weibull(w) if w.beta == T::of(2.0) => {
                let v = z / w.c;
                Ok(w.l / T::of(2.0) * v.powi(-2) * (-(v * v)).exp())
            }
            _ => Err(Error::Unsupported(
                "closed-form tail integral needs a power law or a Gaussian (β = 2) tail".into(),
            )),
        }
    }
}

/// Bound on `Σ_{k=-∞}^{∞} ε((σ + c·x_k) / x_k^H)` over the geometric grid
/// `x_k = τ γ^k` (any τ > 0): the under-sampled union bound
/// `(H(1-H) ln γ)^{-1} ∫_z^∞ ε(x)/x dx` at `z = c^H σ^{1-H} / γ^{H(1-H)}`.
pub fn geometric_window_sum_bound<T: Real>(
    eps: &TailBound<T>,
    gamma: T,
    c: T,
    hurst: T,
    sigma: T,
) -> Result<T> {
    require(gamma > T::one(), "gamma must be > 1")?;
    require(hurst > T::zero() && hurst < T::one(), "hurst must lie in (0,1)")?;
    require(c > T::zero(), "c must be > 0")?;
    check_sigma(sigma)?;
    let z = c.powf(hurst) * sigma.powf(T::one() - hurst) / gamma.powf(hurst * (T::one() - hurst));
    let integral = eps.log_tail_integral(z)?;
    Ok(integral / (hurst * (T::one() - hurst) * gamma.ln()))
}

/// Bound on `Σ_{k>=1} ε(σ + c·y_k)` for the recursion `y_0 = 0`,
/// `y_k = τ + γ y_{k-1}`: `(ln γ)^{-1} (ε(z) ln((γ-1) z / (c τ)) + ∫_z^∞ ε(x)/x dx)`
/// at `z = σ + c τ`, valid for `σ >= c τ / (γ - 1)`.
pub fn geometric_recursion_sum_bound<T: Real>(
    eps: &TailBound<T>,
    gamma: T,
    tau: T,
    c: T,
    sigma: T,
) -> Result<T> {
    require(gamma > T::one(), "gamma must be > 1")?;
    require(tau > T::zero(), "tau must be > 0")?;
    require(c > T::zero(), "c must be > 0")?;
    check_sigma(sigma)?;
    if sigma < c * tau / (gamma - T::one()) {
        return Err(Error::Precondition(
            "sigma below cτ/(γ-1); the recursion bound is not guaranteed there".into(),
        ));
    }
    let z = sigma + c * tau;
    let integral = eps.log_tail_integral(z)?;
    let at_z = eps.evaluate(z)?;
    Ok((at_z * ((gamma - T::one()) * z / (c * tau)).ln() + integral) / gamma.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pl(k: f64, alpha: f64) -> PowerLaw<f64> {
        PowerLaw::new(k, alpha).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_relative_eq!(pl(1.0, 2.0).evaluate(10.0).unwrap(), 0.01);
        assert_eq!(pl(5.0, 1.0).evaluate(2.0).unwrap(), 1.0); // 2.5 capped
        let w = Weibull::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(w.evaluate(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn evaluate_rejects_nonpositive_sigma() {
        assert!(pl(1.0, 2.0).evaluate(0.0).is_err());
        assert!(pl(1.0, 2.0).evaluate(-3.0).is_err());
    }

    #[test]
    fn lower_power_examples() {
        let r = pl(4.0, 2.0).lower_power(1.0).unwrap();
        assert_relative_eq!(r.k, 2.0);
        assert_relative_eq!(r.alpha, 1.0);
        let r = pl(1.0, 1.6).lower_power(0.32).unwrap();
        assert_relative_eq!(r.k, 1.0);
        let r = pl(10.0, 2.0).lower_power(1.5).unwrap();
        assert_relative_eq!(r.k, 5.623413251903491, max_relative = 1e-12);
        assert!(pl(1.0, 1.0).lower_power(1.0).is_err());
    }

    #[test]
    fn lower_power_dominates_on_grid() {
        // valid from the point where the original bound drops below 1
        let p = pl(10.0, 2.0);
        let q = p.lower_power(1.5).unwrap();
        let start = p.k.powf(1.0 / p.alpha);
        let mut sigma = start;
        while sigma <= 1e6 {
            assert!(q.evaluate(sigma).unwrap() >= p.evaluate(sigma).unwrap() - 1e-15);
            sigma *= 1.15;
        }
    }

    #[test]
    fn remove_log_examples_and_dominance() {
        let r = remove_log(1.0, 0.5).unwrap();
        assert_relative_eq!(r.k, 0.7357588823428847, max_relative = 1e-12);
        let r2 = remove_log(0.6, 0.3).unwrap();
        assert_relative_eq!(r2.k, 1.2262648039048078, max_relative = 1e-12);
        assert!(remove_log(0.5, 0.5).is_err());

        let mut sigma = 1.0f64;
        while sigma <= 1e8 {
            let lhs = sigma.powf(-1.0) * sigma.ln();
            let rhs = r.k * sigma.powf(-0.5);
            assert!(lhs <= rhs + 1e-15, "violated at sigma={sigma}");
            sigma *= 1.3;
        }
    }

    #[test]
    fn remove_shift_examples_and_dominance() {
        let r = pl(1.0, 1.0).remove_shift(0.0).unwrap();
        assert_relative_eq!(r.k, 1.0);
        let r = pl(1.0, 2.0).remove_shift(1.0).unwrap();
        assert_relative_eq!(r.k, 4.0);

        // {K=3, α=1.5}, σ0=2: dominance wherever the shifted bound is <= 1
        let p = pl(3.0, 1.5);
        let s0 = 2.0;
        let q = p.remove_shift(s0).unwrap();
        let start = s0 + p.k.powf(1.0 / p.alpha);
        let mut sigma: f64 = start;
        while sigma <= 1e8 {
            let shifted = p.k * (sigma - s0).powf(-p.alpha);
            if shifted <= 1.0 {
                assert!(q.evaluate(sigma).unwrap() >= shifted.min(1.0) - 1e-15);
            }
            sigma *= 1.2;
        }
    }

    #[test]
    fn minimize_sum_examples() {
        let single = minimize_sum(&[pl(7.0, 1.3)]).unwrap();
        assert_relative_eq!(single.bound.k, 7.0);
        let pair = minimize_sum(&[pl(1.0, 1.0), pl(1.0, 1.0)]).unwrap();
        assert_relative_eq!(pair.bound.k, 4.0);
        let asym = minimize_sum(&[pl(1.0, 2.0), pl(8.0, 2.0)]).unwrap();
        assert_relative_eq!(asym.bound.k, 27.0, max_relative = 1e-12);
        assert_relative_eq!(asym.proportions[0], 1.0 / 3.0, max_relative = 1e-12);
        assert!(minimize_sum::<f64>(&[]).is_err());
        assert!(minimize_sum(&[pl(1.0, 1.0), pl(1.0, 2.0)]).is_err());
    }

    #[test]
    fn minimize_sum_matches_numeric_split() {
        // numeric minimization over σ1 at σ = 100
        let terms = [pl(1.0, 2.0), pl(8.0, 2.0)];
        let combined = minimize_sum(&terms).unwrap().bound;
        let sigma = 100.0;
        let mut best = f64::INFINITY;
        for i in 1..20_000 {
            let s1 = sigma * i as f64 / 20_000.0;
            let v = terms[0].k * s1.powf(-2.0) + terms[1].k * (sigma - s1).powf(-2.0);
            best = best.min(v);
        }
        assert_relative_eq!(combined.k * sigma.powf(-2.0), best, max_relative = 1e-6);
    }

    #[test]
    fn window_sum_bound_example() {
        let eps = TailBound::power_law(1.0, 1.0).unwrap();
        let b = geometric_window_sum_bound(&eps, 2.0, 1.0, 0.5, 4.0).unwrap();
        assert_relative_eq!(b, 3.431326415, max_relative = 1e-8);
        // vanishes for large sigma
        let far = geometric_window_sum_bound(&eps, 2.0, 1.0, 0.5, 1e12).unwrap();
        assert!(far < 1e-5);
        assert!(geometric_window_sum_bound(&eps, 1.0, 1.0, 0.5, 4.0).is_err());
        assert!(geometric_window_sum_bound(&eps, 2.0, 1.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn recursion_sum_bound_example() {
        let eps = TailBound::power_law(1.0, 1.0).unwrap();
        let b = geometric_recursion_sum_bound(&eps, 2.0, 1.0, 1.0, 10.0).unwrap();
        assert_relative_eq!(b, 0.4456478781, max_relative = 1e-8);
        let far = geometric_recursion_sum_bound(&eps, 2.0, 1.0, 1.0, 1e12).unwrap();
        assert!(far < 1e-9);
        // precondition σ >= cτ/(γ-1)
        assert!(geometric_recursion_sum_bound(&eps, 1.5, 1.0, 1.0, 1.0).is_err());
    }

    fn window_sum_direct(eps: &TailBound<f64>, gamma: f64, c: f64, h: f64, sigma: f64) -> f64 {
        let mut sum = 0.0;
        for k in -220..=220 {
            let x = gamma.powi(k); // τ = 1
            let arg = (sigma + c * x) / x.powf(h);
            sum += eps.evaluate(arg).unwrap();
        }
        sum
    }

    fn recursion_sum_direct(eps: &TailBound<f64>, gamma: f64, tau: f64, c: f64, sigma: f64) -> f64 {
        let mut sum = 0.0;
        let mut y = 0.0f64;
        for _ in 0..400 {
            y = tau + gamma * y;
            if !(sigma + c * y).is_finite() {
                break;
            }
            sum += eps.evaluate(sigma + c * y).unwrap();
        }
        sum
    }

    proptest! {
        #[test]
        fn window_bound_dominates_direct_sum(
            k in 0.1f64..10.0,
            alpha in 0.3f64..2.5,
            gamma in 1.05f64..4.0,
            h in 0.15f64..0.85,
            c in 0.1f64..10.0,
            sigma in 1.0f64..1e6,
        ) {
            let eps = TailBound::power_law(k, alpha).unwrap();
            let bound = geometric_window_sum_bound(&eps, gamma, c, h, sigma).unwrap();
            let direct = window_sum_direct(&eps, gamma, c, h, sigma);
            prop_assert!(bound >= direct - 1e-12 * direct.abs());
        }

        #[test]
        fn recursion_bound_dominates_direct_sum(
            k in 0.1f64..10.0,
            alpha in 0.3f64..2.5,
            gamma in 1.05f64..4.0,
            tau in 0.1f64..5.0,
            c in 0.1f64..5.0,
            extra in 0.0f64..1e4,
        ) {
            let sigma = c * tau / (gamma - 1.0) + extra + 1e-9;
            let eps = TailBound::power_law(k, alpha).unwrap();
            let bound = geometric_recursion_sum_bound(&eps, gamma, tau, c, sigma).unwrap();
            let direct = recursion_sum_direct(&eps, gamma, tau, c, sigma);
            prop_assert!(bound >= direct - 1e-12 * direct.abs());
        }

        #[test]
        fn minimize_sum_matches_numeric_three_terms(
            k1 in 0.05f64..20.0,
            k2 in 0.05f64..20.0,
            k3 in 0.05f64..20.0,
            alpha in 0.3f64..2.5,
        ) {
            let terms = [pl(k1, alpha), pl(k2, alpha), pl(k3, alpha)];
            let combined = minimize_sum(&terms).unwrap().bound;
            let sigma = 50.0;
            // nested numeric minimization over the 2-simplex
            let mut best = f64::INFINITY;
            let n = 220;
            for i in 1..n {
                for j in 1..(n - i) {
                    let s1 = sigma * i as f64 / n as f64;
                    let s2 = sigma * j as f64 / n as f64;
                    let s3 = sigma - s1 - s2;
                    let v = k1 * s1.powf(-alpha) + k2 * s2.powf(-alpha) + k3 * s3.powf(-alpha);
                    if v < best { best = v; }
                }
            }
            let closed = combined.k * sigma.powf(-alpha);
            // the coarse grid can only overestimate the true minimum
            prop_assert!(closed <= best * (1.0 + 1e-9));
            prop_assert!(closed >= best * (1.0 - 5e-2));
        }

        #[test]
        fn capped_evaluation_is_nonincreasing(
            k in 0.01f64..100.0,
            alpha in 0.1f64..3.0,
            lo in 0.01f64..1e5,
            step in 1.01f64..4.0,
        ) {
            let p = pl(k, alpha);
            let a = p.evaluate(lo).unwrap();
            let b = p.evaluate(lo * step).unwrap();
            prop_assert!(b <= a);
            prop_assert!(a <= 1.0 && b <= 1.0);
        }
    }
}
