//! Adaptive Simpson quadrature for the 1-D integrals used by the exact
//! hyper-strong energies and the effective strong-field kernels.

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fc, fb) = (f(a), f(c), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fc, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fc: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    simpson_rec(f, a, c, fa, fd, fc, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, c, b, fc, fe, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over [a, b] split into geometrically growing panels so that
/// integrands concentrated near `a` are not missed by the first subdivision.
pub fn panel_quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, first: f64, tol: f64) -> f64 {
    assert!(b > a && first > 0.0);
    let mut total = 0.0;
    let mut lo = a;
    let mut width = first;
    while lo < b {
        let hi = (lo + width).min(b);
        total += adaptive_simpson(f, lo, hi, tol);
        lo = hi;
        width *= 10.0;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn gaussian_tail() {
        let v = panel_quad(&|x| (-x * x).exp(), 0.0, 50.0, 1.0, 1e-12);
        assert!((v - 0.5 * PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn slow_power_decay() {
        // ∫_0^1000 dz/(2+z)^2 = 1/2 - 1/1002
        let v = panel_quad(&|z| (2.0 + z).powi(-2), 0.0, 1000.0, 1.0, 1e-12);
        assert!((v - (0.5 - 1.0 / 1002.0)).abs() < 1e-10);
    }
}
