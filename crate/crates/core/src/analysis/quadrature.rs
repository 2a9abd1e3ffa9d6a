//! Gaussian quadrature rules built with the Golub-Welsch method.
//!
//! Nodes and weights come from the symmetric eigendecomposition of the
//! Jacobi matrix of the orthogonal-polynomial recurrence. Rules are cached
//! per (parameter, size) because optimizer sweeps request the same rules
//! thousands of times.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

/// A quadrature rule: paired nodes and weights of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], offdiag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    debug_assert_eq!(offdiag.len(), n.saturating_sub(1));
    let mut j = DMatrix::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        j[(i, i)] = d;
    }
    for (i, &e) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = e;
        j[(i + 1, i)] = e;
    }
    let eig = SymmetricEigen::new(j);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let nodes: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    // squared first components; their sum is the total measure (here 1)
    let weights: Vec<f64> = order
        .iter()
        .map(|&i| {
            let q0 = eig.eigenvectors[(0, i)];
            q0 * q0
        })
        .collect();
    (nodes, weights)
}

/// Gauss-Legendre rule on [-1, 1] with weights summing to 2.
pub fn gauss_legendre(n: usize) -> Arc<QuadRule> {
    assert!(n >= 1, "quadrature size must be >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, mut weights) = golub_welsch(&diag, &offdiag);
    for w in &mut weights {
        *w *= 2.0;
    }
    let rule = Arc::new(QuadRule { nodes, weights });
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::clone(&rule));
    rule
}

/// Generalized Gauss-Laguerre rule for the weight u^alpha e^{-u} on
/// [0, inf), normalized so the weights sum to 1. Against the gamma density
/// with shape alpha + 1 this integrates expectations directly.
pub fn gauss_laguerre_prob(alpha: f64, n: usize) -> Arc<QuadRule> {
    assert!(n >= 1, "quadrature size must be >= 1");
    assert!(alpha > -1.0, "laguerre alpha must exceed -1, got {alpha}");
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<QuadRule>>>> = OnceLock::new();
    let key = (alpha.to_bits(), n);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&key) {
        return Arc::clone(rule);
    }
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            (k * (k + alpha)).sqrt()
        })
        .collect();
    let (nodes, weights) = golub_welsch(&diag, &offdiag);
    let rule = Arc::new(QuadRule { nodes, weights });
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference nodes and weights recomputed with an independent
    // high-precision oracle.

    #[test]
    fn legendre_small_rules_match_known_values() {
        let r2 = gauss_legendre(2);
        let x = 1.0 / 3.0f64.sqrt();
        assert!((r2.nodes[0] + x).abs() < 1e-15);
        assert!((r2.nodes[1] - x).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-14);
        assert!((r2.weights[1] - 1.0).abs() < 1e-14);

        let r3 = gauss_legendre(3);
        let x3 = (3.0f64 / 5.0).sqrt();
        assert!((r3.nodes[0] + x3).abs() < 1e-15);
        assert!(r3.nodes[1].abs() < 1e-15);
        assert!((r3.nodes[2] - x3).abs() < 1e-15);
        assert!((r3.weights[0] - 5.0 / 9.0).abs() < 1e-14);
        assert!((r3.weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        // degree 2N-1 exactness: integral of x^6 over [-1,1] is 2/7
        let r = gauss_legendre(4);
        let s: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| w * x.powi(6))
            .sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-14);
        // and weights always sum to 2
        for n in [1, 5, 24, 96] {
            let r = gauss_legendre(n);
            let total: f64 = r.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-12, "N={n}: {total}");
        }
    }

    #[test]
    fn laguerre_alpha5_matches_reference() {
        let r = gauss_laguerre_prob(5.0, 2);
        let nodes = [4.354248688935409, 9.64575131106459];
        // raw weights for u^5 e^-u are prob weights times Gamma(6) = 120
        let raw = [82.67786838055363, 37.32213161944638];
        for i in 0..2 {
            assert!((r.nodes[i] - nodes[i]).abs() / nodes[i] < 1e-13);
            let w = r.weights[i] * 120.0;
            assert!((w - raw[i]).abs() / raw[i] < 1e-12);
        }
    }

    #[test]
    fn laguerre_alpha0_matches_reference() {
        let r = gauss_laguerre_prob(0.0, 3);
        let nodes = [0.41577455678347913, 2.294280360279042, 6.289945082937478];
        let weights = [
            0.7110930099291731,
            0.27851773356924076,
            0.010389256501586133,
        ];
        for i in 0..3 {
            assert!((r.nodes[i] - nodes[i]).abs() / nodes[i] < 1e-13);
            assert!((r.weights[i] - weights[i]).abs() / weights[i] < 1e-12);
        }
    }

    #[test]
    fn laguerre_fractional_alpha_matches_reference() {
        let r = gauss_laguerre_prob(1.5, 3);
        let nodes = [1.2204023175588838, 3.808880721467068, 8.470716960974048];
        let weights = [0.5496243857833935, 0.42596245906755686, 0.02441315514904972];
        for i in 0..3 {
            assert!((r.nodes[i] - nodes[i]).abs() / nodes[i] < 1e-13);
            assert!((r.weights[i] - weights[i]).abs() / weights[i] < 1e-12);
        }
        let r5 = gauss_laguerre_prob(0.5, 5);
        let n5 = [
            0.43139880714785145,
            1.7597536984236963,
            4.104465362828315,
            7.746703779542558,
            13.457678352057581,
        ];
        let w5 = [
            0.41800870563507353,
            0.4655516120305991,
            0.11033271191035722,
            0.006063249927129883,
            4.372049684017551e-05,
        ];
        for i in 0..5 {
            assert!((r5.nodes[i] - n5[i]).abs() / n5[i] < 1e-12);
            assert!((r5.weights[i] - w5[i]).abs() / w5[i] < 1e-11);
        }
    }

    #[test]
    fn laguerre_alpha1_matches_reference() {
        let r = gauss_laguerre_prob(1.0, 5);
        let nodes = [
            0.6170308532782705,
            2.112965958578524,
            4.610833151017533,
            8.399066971204842,
            14.260103065920829,
        ];
        let weights = [
            0.34801454002334914,
            0.5022806741324927,
            0.14091591949447263,
            0.008719893026099997,
            6.897332358564028e-05,
        ];
        for i in 0..5 {
            assert!((r.nodes[i] - nodes[i]).abs() / nodes[i] < 1e-12);
            assert!((r.weights[i] - weights[i]).abs() / weights[i] < 1e-11);
        }
    }

    #[test]
    fn laguerre_moments_of_gamma_density() {
        // with shape m the gamma(m, 1/m)-scaled mean is 1 and E[u^2] = (m+1)/m
        for m in [0.5f64, 1.0, 2.0, 3.5] {
            let r = gauss_laguerre_prob(m - 1.0, 24);
            let total: f64 = r.weights.iter().sum();
            let mean: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x / m).sum();
            let second: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * (x / m) * (x / m))
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "m={m}");
            assert!((mean - 1.0).abs() < 1e-12, "m={m}");
            assert!((second - (m + 1.0) / m).abs() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn cache_returns_shared_rule() {
        let a = gauss_legendre(17);
        let b = gauss_legendre(17);
        assert!(Arc::ptr_eq(&a, &b));
        let c = gauss_laguerre_prob(2.0, 9);
        let d = gauss_laguerre_prob(2.0, 9);
        assert!(Arc::ptr_eq(&c, &d));
    }

    #[test]
    fn cache_is_usable_from_many_threads() {
        let handles: Vec<_> = (0..8)
            .map(|t| {
                std::thread::spawn(move || {
                    for i in 1..30 {
                        let r = gauss_legendre(i + (t % 3));
                        let s: f64 = r.weights.iter().sum();
                        assert!((s - 2.0).abs() < 1e-11);
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
