//! Golden-section search for unimodal maxima.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]`.
///
/// Shrinks the bracket until its width falls below `rel_tol` times the
/// initial width. Returns `(x_max, f(x_max))`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
) -> (f64, f64) {
    assert!(a < b, "empty bracket");
    let width0 = b - a;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > rel_tol * width0 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        // Location accuracy near a smooth maximum is limited to about
        // sqrt(eps) by the flatness of the objective.
        let (x, v) = golden_section_max(|x| 3.0 - (x - 1.7) * (x - 1.7), -10.0, 10.0, 1e-10);
        assert!((x - 1.7).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn respects_relative_tolerance() {
        let (x, _) = golden_section_max(|x| -(x * x), -1.0, 1.0, 1e-4);
        assert!(x.abs() < 2e-4);
    }
}
