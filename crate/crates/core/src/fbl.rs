//! Finite-blocklength building blocks: Shannon capacity, channel dispersion,
//! the Gaussian Q-function, and the normal-approximation block error
//! probability.

pub(crate) const LOG2_E: f64 = std::f64::consts::LOG2_E;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// SNRs at or below this are treated as degenerate: both the capacity gap and
/// the dispersion vanish, and zero received power cannot convey the message,
/// so the error probability is pinned to exactly 1.
pub const GAMMA_DEGENERATE: f64 = 1e-12;

/// z-scores above this correspond to error probabilities below ~1e-350;
/// the result is exactly 0 so that tail sums stay free of denormal noise.
pub const Z_UNDERFLOW: f64 = 40.0;

/// One operating point of the normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblPoint {
    /// Linear SNR, >= 0.
    pub gamma: f64,
    /// Coding rate in bits per channel use, > 0.
    pub r: f64,
    /// Blocklength in channel uses, >= 1.
    pub n: u32,
}

/// Shannon capacity C(gamma) = log2(1 + gamma) in bits per channel use.
pub fn shannon_capacity(gamma: f64) -> f64 {
    gamma.ln_1p() * LOG2_E
}

/// Channel dispersion V(gamma) = (1 - 1/(1+gamma)^2) * (log2 e)^2.
///
/// Evaluated as gamma*(gamma+2)/(1+gamma)^2 * (log2 e)^2, which keeps full
/// relative precision for small gamma where the textbook form cancels.
pub fn channel_dispersion(gamma: f64) -> f64 {
    let p = 1.0 + gamma;
    gamma * (gamma + 2.0) / (p * p) * (LOG2_E * LOG2_E)
}

/// Gaussian tail probability Q(z), via the complementary error function.
pub fn qfunc(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// The z-score (C(gamma) - r) / sqrt(V(gamma)/n) of the normal approximation.
///
/// Returns -infinity at degenerate SNR (the limit of the ratio for r > 0).
pub fn z_score(gamma: f64, r: f64, n: f64) -> f64 {
    if gamma <= GAMMA_DEGENERATE {
        return f64::NEG_INFINITY;
    }
    (shannon_capacity(gamma) - r) * (n / channel_dispersion(gamma)).sqrt()
}

/// Block error probability of the normal approximation, clamped to [0, 1].
pub fn fbl_error(point: FblPoint) -> f64 {
    fbl_error_raw(point.gamma, point.r, point.n as f64)
}

pub(crate) fn fbl_error_raw(gamma: f64, r: f64, n: f64) -> f64 {
    if gamma <= GAMMA_DEGENERATE {
        return 1.0;
    }
    let z = z_score(gamma, r, n);
    if z > Z_UNDERFLOW {
        return 0.0;
    }
    qfunc(z).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values below were computed with an independent
    // high-precision oracle (arbitrary-precision erfc and logs).

    #[test]
    fn qfunc_reference_table() {
        let table = [
            (-8.0, 0.99999999999999938),
            (-3.0, 0.99865010196836991),
            (-1.0, 0.84134474606854295),
            (-0.5, 0.69146246127401310),
            (0.0, 0.5),
            (0.5, 0.30853753872598690),
            (1.0, 0.15865525393145705),
            (1.5132, 0.065114432123849980),
            (2.0, 0.022750131948179207),
            (3.0, 0.0013498980316300945),
            (5.0, 2.8665157187919391e-7),
            (8.0, 6.2209605742717841e-16),
        ];
        for (z, expected) in table {
            let got = qfunc(z);
            let rel = ((got - expected) / expected).abs();
            assert!(rel < 1e-13, "Q({z}): expected {expected:e}, got {got:e}");
        }
    }

    #[test]
    fn qfunc_symmetry_and_monotonicity() {
        let mut prev = f64::INFINITY;
        for i in 0..=160 {
            let z = -8.0 + 0.1 * i as f64;
            let q = qfunc(z);
            assert!((q + qfunc(-z) - 1.0).abs() < 1e-12, "symmetry at z={z}");
            assert!(q < prev, "Q must be strictly decreasing at z={z}");
            prev = q;
        }
    }

    #[test]
    fn capacity_values() {
        assert_eq!(shannon_capacity(0.0), 0.0);
        assert!((shannon_capacity(1.0) - 1.0).abs() < 1e-15);
        assert!((shannon_capacity(3.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(channel_dispersion(0.0), 0.0);
        let log2e_sq = 2.0813689810056078;
        assert!((channel_dispersion(1.0) - 1.5610267357542058).abs() < 1e-14);
        assert!((channel_dispersion(1e9) - log2e_sq).abs() / log2e_sq < 1e-8);
        // strictly increasing, bounded by (log2 e)^2
        let mut prev = 0.0;
        for i in 1..=60 {
            let g = 10f64.powf(-3.0 + 0.1 * i as f64);
            let v = channel_dispersion(g);
            assert!(v > prev && v < log2e_sq, "dispersion at gamma={g}");
            prev = v;
        }
    }

    #[test]
    fn dispersion_small_gamma_no_cancellation() {
        // leading order 2*gamma*(log2 e)^2
        let g = 1e-9;
        let v = channel_dispersion(g);
        let lead = 2.0 * g * 2.0813689810056078;
        assert!((v - lead).abs() / lead < 1e-8, "got {v:e}, lead {lead:e}");
    }

    #[test]
    fn fbl_error_at_capacity_is_half() {
        for n in [100u32, 500, 2000] {
            for r in [0.5, 1.0, 2.0] {
                let gamma = 2f64.powf(r) - 1.0;
                let eps = fbl_error(FblPoint { gamma, r, n });
                assert!((eps - 0.5).abs() < 1e-12, "C=r at n={n}, r={r}: eps={eps}");
            }
        }
    }

    #[test]
    fn fbl_error_reference_point() {
        let p = FblPoint {
            gamma: 1.2,
            r: 1.0,
            n: 200,
        };
        let z = z_score(1.2, 1.0, 200.0);
        assert!((z - 1.5132523440798113).abs() < 1e-12, "z={z}");
        let eps = fbl_error(p);
        let expected = 0.065107786400215165;
        assert!((eps - expected).abs() / expected < 1e-12, "eps={eps:e}");
    }

    #[test]
    fn fbl_error_degenerate_and_underflow() {
        assert_eq!(
            fbl_error(FblPoint {
                gamma: 0.0,
                r: 1.0,
                n: 100
            }),
            1.0
        );
        assert_eq!(
            fbl_error(FblPoint {
                gamma: 1e-13,
                r: 0.01,
                n: 100
            }),
            1.0
        );
        // far above capacity: exact zero, not a denormal
        assert_eq!(
            fbl_error(FblPoint {
                gamma: 1e6,
                r: 0.1,
                n: 1000
            }),
            0.0
        );
        // far below capacity: saturates to 1
        assert_eq!(
            fbl_error(FblPoint {
                gamma: 1e-6,
                r: 10.0,
                n: 1000
            }),
            1.0
        );
    }

    #[test]
    fn qfunc_complements_to_one() {
        for z in [-3.0, -0.7, 0.0, 1.3, 4.2] {
            assert!((qfunc(z) + qfunc(-z) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fbl_error_monotone_in_gamma_r_n() {
        // deterministic pseudo-grid; monotonicity per spec'd directions
        let gammas: Vec<f64> = (0..40).map(|i| 0.02 * 1.35f64.powi(i)).collect();
        for w in gammas.windows(2) {
            let lo = fbl_error(FblPoint {
                gamma: w[0],
                r: 1.0,
                n: 300,
            });
            let hi = fbl_error(FblPoint {
                gamma: w[1],
                r: 1.0,
                n: 300,
            });
            assert!(hi <= lo, "non-increasing in gamma: {} -> {}", w[0], w[1]);
        }
        let rates: Vec<f64> = (1..40).map(|i| 0.05 * i as f64).collect();
        for w in rates.windows(2) {
            let lo = fbl_error(FblPoint {
                gamma: 1.5,
                r: w[0],
                n: 300,
            });
            let hi = fbl_error(FblPoint {
                gamma: 1.5,
                r: w[1],
                n: 300,
            });
            assert!(hi >= lo, "non-decreasing in r: {} -> {}", w[0], w[1]);
        }
        // C > r: strictly decreasing in n; C < r: strictly increasing in n
        for (gamma, r, growing) in [(1.5, 1.0, false), (0.7, 1.0, true)] {
            let mut prev = fbl_error(FblPoint { gamma, r, n: 100 });
            for n in [200u32, 400, 800, 1600] {
                let cur = fbl_error(FblPoint { gamma, r, n });
                if growing {
                    assert!(cur > prev, "increasing in n at gamma={gamma}");
                } else {
                    assert!(cur < prev, "decreasing in n at gamma={gamma}");
                }
                prev = cur;
            }
        }
    }
}
