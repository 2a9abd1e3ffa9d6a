//! Windowed composite quadrature for fading-averaged error probabilities.
//!
//! The integrands E[eps(A*u)] look like smoothed step functions of log u: the
//! error saturates at 1 below the SNR where the z-score reaches -40, falls
//! through the sigmoid, and underflows to exactly 0 past +40. A single global
//! rule wastes nearly all of its nodes on the flat regions and misses the
//! transition band entirely once the interesting mass sits in a 1e-5 tail.
//!
//! Instead the gain axis is partitioned at the points where the z-score
//! crosses fixed landmarks (-40, -12, -4, 0, 4, 12, 40). The fully saturated
//! head [0, b1] is integrated in closed form as a regularized
//! incomplete-gamma mass (the neglected 1 - eps there is below Q(40), far
//! under f64 resolution), the transition bands get composite Gauss-Legendre
//! panels with bounded geometric width, and everything past the +40 crossing
//! contributes exactly zero. The two-variable integrals reuse one shared set
//! of crossings for both hops and evaluate the inner expectation by the same
//! scheme at every outer node, producing E[eps_r], E[eps_d] and the joint
//! term in a single traversal.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use super::quadrature::gauss_legendre;
use crate::fbl::{self, Z_UNDERFLOW};
use crate::model::{BlockPlan, SystemParams};

/// z-score landmarks delimiting the saturated, transition and underflow
/// regions of the error sigmoid. Ascending; the extremes match the exact-1
/// and exact-0 conventions of `fbl_error`.
const Z_CUTS: [f64; 7] = [-Z_UNDERFLOW, -12.0, -4.0, 0.0, 4.0, 12.0, Z_UNDERFLOW];

/// Tail mass beyond which the Gamma gain density is truncated. The discarded
/// probability bounds the truncation error of every expectation here.
const TAIL_MASS: f64 = 1e-22;

/// Gamma(m, 1/m) density, evaluated in log space so large m and small u
/// cannot overflow the Gamma-function prefactor.
fn gain_pdf(u: f64, m: f64) -> f64 {
    (m * m.ln() - ln_gamma(m) + (m - 1.0) * u.ln() - m * u).exp()
}

/// SNR values where the z-score crosses each landmark, ascending. Bisection
/// in log-SNR over [-300, 300]; outside that bracket the error is constant
/// at f64 precision, so a missing crossing saturates to the bracket edge
/// (below) or infinity (above, meaning the error never leaves 1).
fn gamma_cuts(r: f64, n: f64) -> Arc<[f64; 7]> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<[f64; 7]>>>> = OnceLock::new();
    let key = (r.to_bits(), n.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(cuts) = cache.lock().unwrap().get(&key) {
        return Arc::clone(cuts);
    }
    let mut out = [0.0_f64; 7];
    for (slot, &cut) in out.iter_mut().zip(Z_CUTS.iter()) {
        let f = |t: f64| fbl::z_score(t.exp(), r, n) - cut;
        let (mut lo, mut hi) = (-300.0_f64, 300.0_f64);
        if f(lo) >= 0.0 {
            *slot = lo.exp();
            continue;
        }
        if f(hi) <= 0.0 {
            *slot = f64::INFINITY;
            continue;
        }
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *slot = (0.5 * (lo + hi)).exp();
    }
    let cuts = Arc::new(out);
    Arc::clone(
        cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&cuts)),
    )
}

/// Gain value beyond which the Gamma(m, 1/m) upper tail holds < TAIL_MASS.
fn gain_cap(m: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&cap) = cache.lock().unwrap().get(&m.to_bits()) {
        return cap;
    }
    // bracket: Q(m, m) ~ 0.5, then grow until the tail target is passed
    let mut lo = m;
    let mut hi = 2.0 * m.max(1.0) + 50.0;
    let mut guard = 0;
    while gamma_ur(m, hi) > TAIL_MASS {
        hi *= 2.0;
        guard += 1;
        assert!(guard < 60, "gain cap bracket failed for m = {m}");
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if gamma_ur(m, mid) > TAIL_MASS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cap = 0.5 * (lo + hi) / m;
    cache.lock().unwrap().insert(m.to_bits(), cap);
    cap
}

/// Insert geometric intermediates so no panel spans more than `max_ratio`
/// in relative width; keeps Gauss-Legendre accurate on log-scale integrands.
fn subdivide(breaks: &[f64], max_ratio: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for &b in &breaks[1..] {
        let a = *out.last().unwrap();
        if a > 0.0 && b / a > max_ratio {
            let parts = ((b / a).ln() / max_ratio.ln()).ceil() as usize;
            for i in 1..parts {
                out.push(a * (b / a).powf(i as f64 / parts as f64));
            }
        }
        out.push(b);
    }
    out
}

/// Panel layout in gain space: closed-form saturated mass below `b1`, then
/// panels over consecutive `breaks` pairs (empty when everything saturates).
struct GainPanels {
    b1: f64,
    breaks: Vec<f64>,
}

fn panels_1d(scale: f64, cuts: &[f64; 7], m: f64) -> GainPanels {
    let cap = gain_cap(m);
    let b1 = cuts[0] / scale;
    if b1 >= cap {
        return GainPanels {
            b1: cap,
            breaks: Vec::new(),
        };
    }
    let upper = (cuts[6] / scale).min(cap);
    let mut breaks = vec![b1];
    for &c in &cuts[1..6] {
        let c = c / scale;
        if c > b1 && c < upper {
            breaks.push(c);
        }
    }
    breaks.push(upper);
    GainPanels {
        b1,
        breaks: subdivide(&breaks, 4.0),
    }
}

/// Outer layout for the two-variable integrals: the union of both hops'
/// crossings, clipped to the tail cap and extended to it so the inner
/// expectation is sampled over the full gain support.
fn panels_outer(scale_r: f64, scale_d: f64, cuts: &[f64; 7], m: f64) -> GainPanels {
    let cap = gain_cap(m);
    let mut cs: Vec<f64> = cuts
        .iter()
        .map(|&c| c / scale_r)
        .chain(cuts.iter().map(|&c| c / scale_d))
        .filter(|&c| c < cap)
        .collect();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let b1 = cs.first().copied().unwrap_or(cap);
    cs.push(cap);
    GainPanels {
        b1,
        breaks: subdivide(&cs, 2.0),
    }
}

/// E[eps(scale * u; r, n)] for u ~ Gamma(m, 1/m).
pub(crate) fn expect_eps(scale: f64, r: f64, n: f64, m: f64, cuts: &[f64; 7], nodes: usize) -> f64 {
    if scale <= 0.0 {
        return 1.0;
    }
    let p = panels_1d(scale, cuts, m);
    let mut acc = gamma_lr(m, m * p.b1);
    let rule = gauss_legendre(nodes);
    for win in p.breaks.windows(2) {
        let (mid, half) = (0.5 * (win[0] + win[1]), 0.5 * (win[1] - win[0]));
        for (&x0, &w0) in rule.nodes.iter().zip(&rule.weights) {
            let x = mid + half * x0;
            acc += half * w0 * fbl::fbl_error_raw(scale * x, r, n) * gain_pdf(x, m);
        }
    }
    acc
}

/// All four fading-averaged error terms in one traversal:
/// (E[eps_r], E[eps_d], E[eps_r eps_d], E[eps_df]).
///
/// The first two outer sums run over [b1, cap] directly; the head [0, b1]
/// (where eps_r saturates) is taken as the closed-form Gamma mass minus a
/// panel correction in the small complements 1 - J and 1 - eps_r*J, so no
/// precision is lost to near-1 cancellation when the final answers are tiny.
pub(crate) fn breakdown(
    plan: &BlockPlan,
    params: &SystemParams,
    nodes: usize,
) -> (f64, f64, f64, f64) {
    let r = plan.coding_rate();
    let nf = plan.n as f64;
    let m = params.m;
    let d1w = params.d1.powf(params.omega);
    let d2w = params.d2.powf(params.omega);
    let scale_r = params.ps / (d1w * params.sigma2_r);
    let scale_d = if plan.v > 0 {
        params.eta * params.ps * plan.v as f64 / (d1w * d2w * params.sigma2_d * nf)
    } else {
        0.0
    };

    let cuts = gamma_cuts(r, nf);
    let e_r = expect_eps(scale_r, r, nf, m, &cuts, nodes);
    if scale_d <= 0.0 {
        // zero harvested power: the destination never decodes
        return (e_r, 1.0, e_r, 1.0);
    }

    let p = panels_outer(scale_r, scale_d, &cuts, m);
    let sat = gamma_lr(m, m * p.b1);
    let rule = gauss_legendre(nodes);

    let mut s_d = 0.0;
    let mut s_rd = 0.0;
    for win in p.breaks.windows(2) {
        let (mid, half) = (0.5 * (win[0] + win[1]), 0.5 * (win[1] - win[0]));
        for (&x0, &w0) in rule.nodes.iter().zip(&rule.weights) {
            let x = mid + half * x0;
            let w = half * w0 * gain_pdf(x, m);
            let er_x = fbl::fbl_error_raw(scale_r * x, r, nf);
            let j = expect_eps(scale_d * x, r, nf, m, &cuts, nodes);
            s_d += w * j;
            s_rd += w * er_x * j;
        }
    }

    let mut c_d = 0.0;
    let mut c_rd = 0.0;
    for (&x0, &w0) in rule.nodes.iter().zip(&rule.weights) {
        let x = 0.5 * p.b1 * (x0 + 1.0);
        let w = 0.5 * p.b1 * w0 * gain_pdf(x, m);
        let er_x = fbl::fbl_error_raw(scale_r * x, r, nf);
        let j = expect_eps(scale_d * x, r, nf, m, &cuts, nodes);
        c_d += w * (1.0 - j);
        c_rd += w * (1.0 - er_x * j);
    }

    let e_d = sat - c_d + s_d;
    let e_rd = sat - c_rd + s_rd;
    let e_df = e_r + e_d - e_rd;
    (e_r, e_d, e_rd, e_df)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BlockPlan, SystemParams};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Reference expectations below were recomputed with an independent
    // arbitrary-precision oracle (50-digit adaptive quadrature), not with
    // this integrator.

    #[test]
    fn relay_error_matches_reference() {
        let cases = [
            (500u32, 160u32, 1.2720097390560695e-5),
            (1000, 160, 2.8444675486572448e-6),
            (250, 64, 8.1874440895698591e-6),
            (100, 160, 8.3182094539601075e-4),
            (100, 479, 0.10175200957500425),
        ];
        for (n, k, want) in cases {
            let r = k as f64 / n as f64;
            let cuts = gamma_cuts(r, n as f64);
            let got = expect_eps(100.0, r, n as f64, 2.0, &cuts, 24);
            assert!(
                rel(got, want) < 1e-10,
                "n={n} k={k}: got {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn breakdown_matches_reference() {
        let params = SystemParams::default();
        let cases = [
            // (n, v, k, e_r, e_d, e_rd)
            (
                500u32,
                1000u32,
                160u32,
                1.2720097390560695e-5,
                2.0229624128415240e-4,
                9.8036643958130542e-6,
            ),
            (
                1000,
                6000,
                160,
                2.8444675486572448e-6,
                7.3179281430917356e-6,
                8.9155138378415243e-7,
            ),
            (
                250,
                1500,
                64,
                8.1874440895698591e-6,
                1.9082659653090546e-5,
                2.4737631938258590e-6,
            ),
        ];
        for (n, v, k, er, ed, erd) in cases {
            let plan = BlockPlan::new(n, v, k).unwrap();
            let (e_r, e_d, e_rd, e_df) = breakdown(&plan, &params, 24);
            assert!(rel(e_r, er) < 1e-10, "e_r at n={n}: {e_r:e} vs {er:e}");
            assert!(rel(e_d, ed) < 1e-9, "e_d at n={n}: {e_d:e} vs {ed:e}");
            assert!(rel(e_rd, erd) < 1e-9, "e_rd at n={n}: {e_rd:e} vs {erd:e}");
            let want_df = er + ed - erd;
            assert!(
                rel(e_df, want_df) < 1e-9,
                "e_df at n={n}: {e_df:e} vs {want_df:e}"
            );
        }
    }

    #[test]
    fn zero_power_transfer_degenerates() {
        let plan = BlockPlan::new(500, 0, 160).unwrap();
        let (e_r, e_d, e_rd, e_df) = breakdown(&plan, &SystemParams::default(), 24);
        assert_eq!(e_d, 1.0);
        assert_eq!(e_df, 1.0);
        assert_eq!(e_rd, e_r);
    }

    #[test]
    fn node_doubling_is_converged() {
        let plan = BlockPlan::new(500, 1000, 160).unwrap();
        let params = SystemParams::default();
        let a = breakdown(&plan, &params, 24);
        let b = breakdown(&plan, &params, 48);
        assert!(rel(a.0, b.0) < 1e-10);
        assert!(rel(a.1, b.1) < 1e-8);
        assert!(rel(a.2, b.2) < 1e-8);
        assert!(rel(a.3, b.3) < 1e-8);
    }

    #[test]
    fn saturated_rate_gives_certain_error() {
        // rate far above capacity for any plausible SNR
        let cuts = gamma_cuts(100.0, 100.0);
        let e = expect_eps(100.0, 100.0, 100.0, 2.0, &cuts, 24);
        assert!((e - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gain_cap_holds_the_tail() {
        for m in [0.5, 1.0, 2.0, 5.0, 37.5] {
            let cap = gain_cap(m);
            let tail = gamma_ur(m, m * cap);
            assert!(tail <= TAIL_MASS * 1.01, "m={m}: tail {tail:e}");
            assert!(
                gamma_ur(m, m * cap * 0.99) > TAIL_MASS,
                "m={m}: cap not tight"
            );
        }
    }

    #[test]
    fn cuts_are_ascending_and_bracket_the_sigmoid() {
        let cuts = gamma_cuts(0.32, 500.0);
        for w in cuts.windows(2) {
            assert!(w[0] < w[1]);
        }
        // at each crossing the z-score reproduces its landmark
        for (i, &c) in cuts.iter().enumerate() {
            let z = fbl::z_score(c, 0.32, 500.0);
            assert!((z - Z_CUTS[i]).abs() < 1e-9, "cut {i}: z = {z}");
        }
    }

    #[test]
    fn subdivide_bounds_panel_ratio() {
        let out = subdivide(&[1e-6, 1.0, 3.0], 4.0);
        for w in out.windows(2) {
            assert!(w[1] / w[0] <= 4.0 + 1e-12);
        }
        assert_eq!(out.first().copied(), Some(1e-6));
        assert_eq!(out.last().copied(), Some(3.0));
    }

    #[test]
    fn pdf_normalizes_over_panels() {
        // integrate the bare density with the outer layout: should give ~1
        for m in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let cuts = gamma_cuts(0.32, 500.0);
            let p = panels_outer(100.0, 300.0, &cuts, m);
            let rule = gauss_legendre(24);
            let mut acc = gamma_lr(m, m * p.b1);
            for win in p.breaks.windows(2) {
                let (mid, half) = (0.5 * (win[0] + win[1]), 0.5 * (win[1] - win[0]));
                for (&x0, &w0) in rule.nodes.iter().zip(&rule.weights) {
                    acc += half * w0 * gain_pdf(mid + half * x0, m);
                }
            }
            assert!((acc - 1.0).abs() < 1e-10, "m={m}: {acc}");
        }
    }
}
