//! One-dimensional maximization helpers shared by the pricing environments.

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
///
/// Runs a fixed iteration count; 90 iterations shrink the bracket by ~1e-18
/// relative, far below every tolerance used by callers. Returns (argmax, max).
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    debug_assert!(lo <= hi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section maximization with an adaptively widened upper edge: when
/// the argmax lands within 2% of `hi`, the bracket doubles in width, up to
/// `max_expansions` times.
pub fn golden_section_max_adaptive(
    f: impl Fn(f64) -> f64,
    lo: f64,
    mut hi: f64,
    iters: usize,
    max_expansions: usize,
) -> (f64, f64) {
    for _ in 0..=max_expansions {
        let (x, fx) = golden_section_max(&f, lo, hi, iters);
        if x < lo + 0.98 * (hi - lo) {
            return (x, fx);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    golden_section_max(&f, lo, hi, iters)
}

/// Population standard deviation (the reliability scores use 1 - stdev).
pub fn population_stdev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    var.sqrt()
}

/// Percentile by linear interpolation on the sorted sample (q in [0, 1]).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let idx = pos.floor() as usize;
    let frac = pos - idx as f64;
    if idx + 1 < sorted.len() {
        sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac
    } else {
        sorted[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), -2.0, 5.0, 90);
        assert!((x - 0.3).abs() < 1e-10);
        assert!(fx.abs() < 1e-18);
    }

    #[test]
    fn adaptive_bracket_reaches_far_peaks() {
        let (x, _) = golden_section_max_adaptive(|x| -(x - 40.0).powi(2), 0.0, 1.0, 90, 12);
        assert!((x - 40.0).abs() < 1e-8);
    }

    #[test]
    fn stdev_example() {
        assert!((population_stdev(&[0.2, 0.4]) - 0.1).abs() < 1e-15);
    }
}
