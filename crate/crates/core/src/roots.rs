//! Bracketing root finders.

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bisection {
    pub root: f64,
    pub iterations: usize,
    pub width: f64,
}

/// Bisection on `[lo, hi]` for a function with `f(lo)` and `f(hi)` of
/// opposite sign (zero counts as either). Stops once the bracket is no wider
/// than `width_tol` or `max_iter` halvings have been made.
pub(crate) fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, width_tol: f64, max_iter: usize) -> Bisection
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let lo_positive = f_lo > 0.0;
    let mut iterations = 0;
    while hi - lo > width_tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        iterations += 1;
        if fm == 0.0 {
            return Bisection {
                root: mid,
                iterations,
                width: 0.0,
            };
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bisection {
        root: 0.5 * (lo + hi),
        iterations,
        width: hi - lo,
    }
}
