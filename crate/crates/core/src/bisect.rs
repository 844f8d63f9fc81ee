//! Infimum of the feasible set `{ρ > 0 : f(ρ) <= 1}` for a nonincreasing `f`.

use crate::error::{invalid, Error, Result};

/// Default cap on bisection steps after bracketing.
pub const MAX_ITERATIONS: usize = 200;

/// Doubling/halving steps allowed while looking for a bracket; enough to
/// walk across the whole exponent range of `f64`.
const MAX_BRACKET_STEPS: usize = 2100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infimum {
    /// Feasible upper end of the final bracket.
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Brackets from `ρ = 1` by doubling (while infeasible) or halving (while
/// feasible), then bisects until `hi - lo <= tol * hi`.
pub fn infimum_feasible<F>(f: F, tol: f64, max_iterations: usize) -> Result<Infimum>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    let feasible = |rho: f64| f(rho) <= 1.0;

    let (mut lo, mut hi);
    if feasible(1.0) {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while feasible(lo) {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo == 0.0 {
                return Err(Error::NoBracket("modular stays <= 1 as rho -> 0".into()));
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while !feasible(hi) {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || hi.is_infinite() {
                return Err(Error::NoBracket("modular stays > 1 as rho grows".into()));
            }
        }
    }

    let mut iterations = 0;
    while hi - lo > tol * hi && iterations < max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Infimum {
        value: hi,
        lo,
        hi,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal() {
        let r = infimum_feasible(|rho| 1.0 / (2.0 * rho), 1e-12, MAX_ITERATIONS).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-12 * 0.5);
        assert!(r.lo < 0.5 || r.lo == r.hi);
        assert!(1.0 / (2.0 * r.value) <= 1.0);
    }

    #[test]
    fn large_and_small_roots() {
        for root in [1e-9, 3.7, 12345.0, 1e12] {
            let r = infimum_feasible(|rho| root / rho, 1e-10, MAX_ITERATIONS).unwrap();
            assert!((r.value - root).abs() <= 1e-10 * root, "{root}: {}", r.value);
        }
    }

    #[test]
    fn degenerate_modulars() {
        assert!(matches!(
            infimum_feasible(|_| 0.0, 1e-10, MAX_ITERATIONS),
            Err(Error::NoBracket(_))
        ));
        assert!(matches!(
            infimum_feasible(|_| 2.0, 1e-10, MAX_ITERATIONS),
            Err(Error::NoBracket(_))
        ));
        assert!(infimum_feasible(|r| 1.0 / r, 0.0, MAX_ITERATIONS).is_err());
    }
}
