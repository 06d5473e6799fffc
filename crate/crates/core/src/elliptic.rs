//! Complete elliptic integral of the first kind via the arithmetic-geometric
//! mean, in the form needed by the azimuthal Coulomb average.
//!
//! The AGM iteration converges quadratically; tolerance 1e-12 is reached in
//! a handful of steps for any modulus away from 1.

const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 40;

/// Arithmetic-geometric mean of `a0 >= b0 >= 0`.
pub fn agm(a0: f64, b0: f64) -> f64 {
    let (mut a, mut b) = (a0, b0);
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= AGM_TOL * an {
            return an;
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// K(m) with parameter m = k², for m in [0, 1).
///
/// K(m) = π / (2 AGM(1, √(1−m))).
pub fn ellip_k(m: f64) -> f64 {
    if m < 0.0 {
        return f64::NAN;
    }
    if m >= 1.0 {
        return f64::INFINITY;
    }
    std::f64::consts::FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())
}

/// K expressed through the complementary modulus kc = √(1−m).
///
/// Passing kc directly avoids the cancellation in 1−m when m is close to 1,
/// which is exactly the near-coincidence regime of the Coulomb kernel.
pub fn ellip_k_complement(kc: f64) -> f64 {
    if kc <= 0.0 {
        return f64::INFINITY;
    }
    std::f64::consts::FRAC_PI_2 / agm(1.0, kc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Power-series oracle for K(m), independent of the AGM route:
    /// K(m) = (π/2) Σ [( (2n)! / (2^{2n} (n!)²) )² m^n].
    fn ellip_k_series(m: f64) -> f64 {
        let mut sum = 0.0;
        let mut coeff: f64 = 1.0; // ((2n-1)!!/(2n)!!)^2, starts at n=0
        let mut mpow = 1.0;
        for n in 0..2000 {
            sum += coeff * mpow;
            let nf = n as f64;
            let c = (2.0 * nf + 1.0) / (2.0 * nf + 2.0);
            coeff *= c * c;
            mpow *= m;
            if coeff * mpow < 1e-17 * sum {
                break;
            }
        }
        0.5 * PI * sum
    }

    #[test]
    fn agm_matches_series_oracle() {
        for &m in &[0.0, 0.1, 0.25, 0.5, 0.64, 0.8, 0.9, 0.95] {
            let agm_val = ellip_k(m);
            let series_val = ellip_k_series(m);
            assert!(
                (agm_val - series_val).abs() < 1e-12 * series_val,
                "K({m}): agm {agm_val} vs series {series_val}"
            );
        }
    }

    #[test]
    fn known_values() {
        assert!((ellip_k(0.0) - PI / 2.0).abs() < 1e-15);
        // frozen from the series oracle above
        assert!((ellip_k(0.5) - 1.8540746773013719).abs() < 1e-13);
        assert!((ellip_k(0.8) - 2.2572053268208538).abs() < 1e-13);
        assert!(ellip_k(1.0).is_infinite());
    }

    #[test]
    fn complement_form_agrees() {
        for &m in &[0.1, 0.5, 0.9, 0.99, 0.999999] {
            let kc = (1.0f64 - m).sqrt();
            let a = ellip_k(m);
            let b = ellip_k_complement(kc);
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn log_divergence_near_one() {
        // K ~ ln(4/kc) as kc -> 0
        for &kc in &[1e-3, 1e-5, 1e-7] {
            let k = ellip_k_complement(kc);
            let asym = (4.0 / kc).ln();
            assert!((k - asym).abs() < 1e-4 * k, "kc={kc}: {k} vs {asym}");
        }
    }
}
