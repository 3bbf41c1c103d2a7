use crate::error::{Error, Result};
use crate::online::RegretBound;

const LIMIT: u64 = 1 << 62;

/// Smallest `T >= 1` from which `bound(t) <= eps·t` holds for good.
///
/// Powers of two are tried until the inequality holds at both `T` and
/// `2T`; the crossing inside `(T/2, T]` is then located by bisection. This
/// is exact for bounds whose ratio `bound(t)/t` is nonincreasing beyond its
/// peak, which covers every bound in [`RegretBound`]: for `10 ln T` at
/// `eps = 0.1` the inequality also holds at `T = 1`, but the answer is 648.
pub fn stopping_threshold<F: Fn(u64) -> f64>(bound: F, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be > 0, got {eps}")));
    }
    let ok = |t: u64| bound(t) <= eps * t as f64;
    let mut hi = 1u64;
    loop {
        if hi >= LIMIT {
            return Err(Error::ThresholdOverflow);
        }
        if ok(hi) && ok(2 * hi) {
            break;
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // fails, or is zero
    if lo == 0 {
        return Ok(1);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn regret_threshold(bound: &RegretBound, eps: f64) -> Result<u64> {
    stopping_threshold(|t| bound.eval(t), eps)
}
