//! Small numeric routines used by the bound computations: golden-section
//! minimization with a coarse-scan bracket, burst-split minimization, and
//! geometric bisection for inverting nonincreasing bound curves.

use crate::error::{Error, Result};
use crate::real::Real;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[a, b]`. Tracks the best point ever evaluated, so
/// the result never exceeds any probed value even if `f` is not unimodal on
/// the bracket. Returns `(argmin, min)`.
pub(crate) fn golden_min<T: Real, F: Fn(T) -> T>(
    f: &F,
    mut a: T,
    mut b: T,
    rel_tol: f64,
    max_iter: usize,
) -> (T, T) {
    let g = T::of(GOLDEN);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let tol = T::of(rel_tol);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol * (a.abs() + b.abs() + T::of(1e-300)) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Minimize `f` over the open interval `(lo, hi)` using a two-sided
/// logarithmic scan (dense near both endpoints, where the objectives used in
/// this crate diverge) followed by golden-section refinement around the best
/// scan point. Falls back to the scan minimum when the scan is not unimodal.
pub(crate) fn scan_golden_min<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    hi: T,
    scan_half: usize,
    rel_tol: f64,
) -> (T, T) {
    let width = hi - lo;
    let mut xs: Vec<T> = Vec::with_capacity(2 * scan_half + 1);
    // offsets from each endpoint, log-spaced in [1e-12, 1/2] of the width
    let lf = (0.5f64 / 1e-12).ln();
    for i in 0..scan_half {
        let t = 1e-12 * (lf * (i as f64) / (scan_half as f64 - 1.0)).exp();
        let off = width * T::of(t);
        xs.push(lo + off);
        xs.push(hi - off);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| a == b);

    let vals: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    // Golden-section refine inside the bracket around the best scan point.
    // The two-sided grid can place near-identical points at the middle, so
    // the bracket walks past anything within a ulp-scale gap; if the
    // objective is not unimodal there, the scan minimum still wins below.
    let gap = width * T::of(1e-11);
    let mut li = best;
    while li > 0 && xs[best] - xs[li] < gap {
        li -= 1;
    }
    let mut ri = best;
    while ri + 1 < xs.len() && xs[ri] - xs[best] < gap {
        ri += 1;
    }
    let (gx, gf) = golden_min(f, xs[li], xs[ri], rel_tol, 200);
    if gf < vals[best] {
        (gx, gf)
    } else {
        (xs[best], vals[best])
    }
}

/// Minimize `lhs(s) + rhs(total - s)` over the interior split `s in (0, total)`.
pub(crate) fn min_over_split<T: Real>(
    total: T,
    lhs: impl Fn(T) -> T,
    rhs: impl Fn(T) -> T,
) -> T {
    let f = |s: T| lhs(s) + rhs(total - s);
    let lo = total * T::of(1e-12);
    let hi = total * T::of(1.0 - 1e-12);
    scan_golden_min(&f, lo, hi, 48, 1e-9).1
}

/// Smallest `w` in `[lo, hi]` (searched geometrically) where the nonincreasing
/// predicate value `f(w)` is `<= target`, refined to `rel_tol`.
pub(crate) fn invert_nonincreasing<T: Real>(
    f: impl Fn(T) -> T,
    target: T,
    lo: T,
    hi: T,
    rel_tol: f64,
) -> Result<T> {
    if !(f(hi) <= target) {
        return Err(Error::RangeExhausted(format!(
            "bound stays above {} on the search range",
            target
        )));
    }
    if f(lo) <= target {
        return Ok(lo);
    }
    let mut a = lo; // f(a) > target
    let mut b = hi; // f(b) <= target
    let tol = T::of(rel_tol);
    while (b - a) > tol * b {
        let m = (a * b).sqrt();
        if f(m) <= target {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(b)
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
