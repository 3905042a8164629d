//! One-dimensional golden-section maximization for unimodal objectives.

/// Inverse golden ratio, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a golden-section search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchResult {
    pub argmax: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximize a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// The interval shrinks until its width falls below
/// `rel_tol * max(|lo|, |hi|, 1)` or `max_iters` is reached. The bracket
/// endpoints are also evaluated, so a maximizer sitting on the boundary
/// (commonly 0) is recovered exactly.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_iters: usize) -> SearchResult
where
    F: FnMut(f64) -> f64,
{
    assert!(lo <= hi, "invalid bracket [{lo}, {hi}]");
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let tol = rel_tol * scale;

    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;

    while (b - a) > tol && iterations < max_iters {
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
        iterations += 1;
    }

    // Pick the best among interior probes and the original endpoints.
    let mid = 0.5 * (a + b);
    let candidates = [(mid, f(mid)), (x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))];
    let mut best = candidates[0];
    for &(x, v) in &candidates[1..] {
        if v > best.1 {
            best = (x, v);
        }
    }
    SearchResult {
        argmax: best.0,
        value: best.1,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_interior_maximum() {
        let r = golden_section_max(|x| -(x - 2.0) * (x - 2.0), 0.0, 4.0, 1e-6, 200);
        assert!((r.argmax - 2.0).abs() < 1e-5, "argmax = {}", r.argmax);
        assert!(r.value > -1e-10);
    }

    #[test]
    fn recovers_boundary_maximum() {
        let r = golden_section_max(|x| -x, 0.0, 10.0, 1e-6, 200);
        assert_eq!(r.argmax, 0.0);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn degenerate_bracket() {
        let r = golden_section_max(|x| x * x, 3.0, 3.0, 1e-6, 200);
        assert_eq!(r.argmax, 3.0);
        assert_eq!(r.value, 9.0);
    }

    #[test]
    fn respects_iteration_cap() {
        let r = golden_section_max(|x| -(x - 0.5).abs(), 0.0, 1.0, 0.0, 25);
        assert_eq!(r.iterations, 25);
        assert!((r.argmax - 0.5).abs() < 1e-4);
    }
}
