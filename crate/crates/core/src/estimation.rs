//! Channel-state re-estimation from decoder soft outputs.
//!
//! After an unverified SCAN iteration the decoder knows, for every
//! transmitted symbol, a bias probability `p_i` that the symbol was a 1.
//! Combining it with the received value gives a squared-residual estimate
//!
//! ```text
//! ẑ²_i = p_i (y_i + 1)² + (1 − p_i)(y_i − 1)²
//! ```
//!
//! which decomposes into the slowly-varying noise variance plus
//! fast-varying zero-mean terms. Estimating the variance is therefore
//! low-pass filtering. The SWSCAN estimator averages a symmetric window
//! around each symbol with the center excluded, so that estimate and
//! sample stay conditionally independent, and picks the half-size `m`
//! minimizing the mean-squared error between the two — computable in
//! `O(N)` per `m` by sliding recursions, `O(N²)` for the full search.
//! The W²SCAN estimator generalizes to unequal symmetric tap weights
//! optimized by the constrained quadratic program of [`crate::qp`].

use crate::decoders::StateUpdater;
use crate::qp::{self, QpProblem};
use crate::VAR_FLOOR;

/// Squared residuals with symmetric padding on both sides.
///
/// Padding mirrors about the first and last element without repeating
/// them: `ẑ²_{1-j} = ẑ²_{1+j}` and `ẑ²_{N+j} = ẑ²_{N-j}`. The pad width is
/// `⌊N/2⌋`, wide enough for the largest window the full search visits, so
/// no window or correlation lag ever indexes out of bounds.
#[derive(Debug, Clone)]
pub struct ResidualSeries {
    padded: Vec<f64>,
    n: usize,
    pad: usize,
}

impl ResidualSeries {
    /// Pads a core series of squared residuals.
    pub fn from_core(z2: Vec<f64>) -> Self {
        let n = z2.len();
        assert!(n >= 2, "need at least two residuals");
        let pad = n / 2;
        let mut padded = vec![0.0; n + 2 * pad];
        padded[pad..pad + n].copy_from_slice(&z2);
        for j in 1..=pad {
            padded[pad - j] = z2[j];
            padded[pad + n - 1 + j] = z2[n - 1 - j];
        }
        ResidualSeries { padded, n, pad }
    }

    /// Core length `N`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest half-window the padding supports: `⌊N/2⌋`.
    pub fn max_half_window(&self) -> usize {
        self.pad.max(1)
    }

    /// The un-padded residuals.
    pub fn core(&self) -> &[f64] {
        &self.padded[self.pad..self.pad + self.n]
    }

    /// Value at signed offset `d` from core position `t` (may reach into
    /// the padding).
    #[cfg(test)]
    fn at(&self, t: usize, d: isize) -> f64 {
        let idx = self.pad as isize + t as isize + d;
        self.padded[idx as usize]
    }
}

/// Half-window tap weights: symmetric, non-negative, non-increasing, and
/// summing to one half (each tap is applied on both sides of the center).
#[derive(Debug, Clone, PartialEq)]
pub struct TapWeights {
    w: Vec<f64>,
}

impl TapWeights {
    pub fn new(w: Vec<f64>) -> Self {
        assert!(!w.is_empty());
        let sum: f64 = w.iter().sum();
        assert!((sum - 0.5).abs() <= 1e-8, "weights must sum to 1/2, got {sum}");
        for k in 0..w.len() {
            let next = if k + 1 < w.len() { w[k + 1] } else { 0.0 };
            assert!(w[k] >= next - 1e-12, "weights must be non-increasing");
        }
        assert!(w[w.len() - 1] >= -1e-12);
        TapWeights { w }
    }

    /// Equal taps `1/(2m)`, the SWSCAN window.
    pub fn equal(m: usize) -> Self {
        TapWeights {
            w: vec![0.5 / m as f64; m],
        }
    }

    pub fn half_window(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Squared residuals from the received vector and the bias probabilities,
/// padded and ready for windowing. Both inputs are in transmission order.
pub fn squared_residuals(y: &[f64], bias: &[f64]) -> ResidualSeries {
    assert_eq!(y.len(), bias.len());
    let z2: Vec<f64> = y
        .iter()
        .zip(bias)
        .map(|(&yi, &p)| {
            debug_assert!((0.0..=1.0).contains(&p));
            let a = yi + 1.0;
            let b = yi - 1.0;
            p * a * a + (1.0 - p) * b * b
        })
        .collect();
    ResidualSeries::from_core(z2)
}

/// Center-excluded window means
/// `σ̂²_t(m) = (1/2m) Σ_{k=1..m} (ẑ²_{t-k} + ẑ²_{t+k})`,
/// computed by sliding the full-window sum in `O(N)` total.
pub fn window_mean_estimates(series: &ResidualSeries, m: usize) -> Vec<f64> {
    let n = series.n;
    assert!(m >= 1 && m <= series.max_half_window());
    let p = &series.padded;
    let off = series.pad;
    let inv = 1.0 / (2 * m) as f64;
    let mut out = Vec::with_capacity(n);
    let mut wsum: f64 = p[off - m..=off + m].iter().sum();
    out.push((wsum - p[off]) * inv);
    for t in 1..n {
        wsum += p[off + t + m] - p[off + t - 1 - m];
        out.push((wsum - p[off + t]) * inv);
    }
    out
}

/// Mean-squared error `E(m)` between the window estimate and the residual
/// it excludes, via the error-term sliding recursion (`O(N)` per `m`).
pub fn window_mse(series: &ResidualSeries, m: usize) -> f64 {
    let n = series.n;
    assert!(m >= 1 && m <= series.max_half_window());
    let p = &series.padded;
    let off = series.pad;
    let inv = 1.0 / (2 * m) as f64;

    let direct: f64 = (1..=m)
        .map(|k| p[off - k] + p[off + k])
        .sum::<f64>()
        * inv;
    let mut e = direct - p[off];
    let mut total = e * e;
    for t in 0..n - 1 {
        e += inv * (p[off + t + 1 + m] - p[off + t - m])
            + (1.0 + inv) * (p[off + t] - p[off + t + 1]);
        total += e * e;
    }
    total / n as f64
}

/// Full search for the MSE-optimal half-window over `m ∈ {1, …, ⌊N/2⌋}`;
/// ties break toward the smaller window.
pub fn optimal_half_window(series: &ResidualSeries) -> usize {
    assert!(series.n >= 2);
    let mut best_m = 1;
    let mut best_e = f64::INFINITY;
    for m in 1..=series.max_half_window() {
        let e = window_mse(series, m);
        if e < best_e {
            best_e = e;
            best_m = m;
        }
    }
    best_m
}

/// The shifted-product matrix `φ_{k,l} = Σ_{i=1..N} ẑ²_{i+k} ẑ²_{i+l}` for
/// `-m ≤ k, l ≤ m`, with out-of-range indices served by the padding.
/// Close to, but not the same as, the autocorrelation: the summation
/// window stays fixed while both indices shift.
#[derive(Debug, Clone)]
pub struct Phi {
    m: usize,
    data: Vec<f64>,
}

impl Phi {
    pub fn half_window(&self) -> usize {
        self.m
    }

    /// `φ_{k,l}`, `-m ≤ k, l ≤ m`.
    pub fn at(&self, k: isize, l: isize) -> f64 {
        let m = self.m as isize;
        debug_assert!(k.abs() <= m && l.abs() <= m);
        let side = 2 * self.m + 1;
        self.data[(k + m) as usize * side + (l + m) as usize]
    }
}

/// Builds `Φ` by the direct `O(N·m²)` summation.
pub fn build_phi(series: &ResidualSeries, m: usize) -> Phi {
    assert!(m >= 1 && m <= series.pad);
    let n = series.n;
    let p = &series.padded;
    let off = series.pad;
    let side = 2 * m + 1;
    let mut data = vec![0.0f64; side * side];
    for k in -(m as isize)..=(m as isize) {
        for l in k..=(m as isize) {
            let mut acc = 0.0;
            let pk = &p[(off as isize + k) as usize..];
            let pl = &p[(off as isize + l) as usize..];
            for t in 0..n {
                acc += pk[t] * pl[t];
            }
            let (a, b) = ((k + m as isize) as usize, (l + m as isize) as usize);
            data[a * side + b] = acc;
            data[b * side + a] = acc;
        }
    }
    Phi { m, data }
}

/// Assembles the quadratic form from `Φ`:
/// `h_{k,l} = φ_{-k,-l} + φ_{-k,l} + φ_{k,-l} + φ_{k,l}` and
/// `f_k = φ_{k,0} + φ_{-k,0}`. `H` is the Gram matrix of the two-sided
/// window samples, hence symmetric positive semidefinite.
pub fn build_h_f(phi: &Phi) -> (Vec<f64>, Vec<f64>) {
    let m = phi.m;
    let mut h = vec![0.0f64; m * m];
    let mut f = vec![0.0f64; m];
    for k in 1..=m as isize {
        for l in 1..=m as isize {
            h[(k - 1) as usize * m + (l - 1) as usize] =
                phi.at(-k, -l) + phi.at(-k, l) + phi.at(k, -l) + phi.at(k, l);
        }
        f[(k - 1) as usize] = phi.at(k, 0) + phi.at(-k, 0);
    }
    (h, f)
}

/// Weighted symmetric-window estimates
/// `σ̂²_t(w) = Σ_{k=1..m} w_k (ẑ²_{t-k} + ẑ²_{t+k})`. With equal taps this
/// reduces to [`window_mean_estimates`].
pub fn weighted_estimates(series: &ResidualSeries, weights: &TapWeights) -> Vec<f64> {
    let m = weights.half_window();
    assert!(m <= series.pad);
    let n = series.n;
    let p = &series.padded;
    let off = series.pad;
    let w = weights.weights();
    (0..n)
        .map(|t| {
            let mut acc = 0.0;
            for (k, &wk) in w.iter().enumerate() {
                acc += wk * (p[off + t - (k + 1)] + p[off + t + k + 1]);
            }
            acc
        })
        .collect()
}

/// Estimator flavor: equal-weight sliding window or QP-weighted window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Swscan,
    W2scan,
}

/// Counters kept across the per-iteration updates of one decode (or one
/// batch of decodes, if the estimator is reused).
#[derive(Debug, Clone)]
pub struct EstimatorDiagnostics {
    /// Number of update calls.
    pub updates: u64,
    /// QP failures that fell back to equal weights.
    pub qp_fallbacks: u64,
    /// Half-window used by the most recent update.
    pub last_m: usize,
    /// Largest normalized amount by which a QP solution's objective
    /// exceeded the equal-weights objective; at most ~0 when the solver
    /// behaves (equal weights are feasible).
    pub max_objective_excess: f64,
}

impl Default for EstimatorDiagnostics {
    fn default() -> Self {
        EstimatorDiagnostics {
            updates: 0,
            qp_fallbacks: 0,
            last_m: 0,
            max_objective_excess: f64::NEG_INFINITY,
        }
    }
}

/// The per-iteration channel estimator attached to a SCAN decode.
#[derive(Debug, Clone)]
pub struct ChannelEstimator {
    kind: EstimatorKind,
    alpha: f64,
    diagnostics: EstimatorDiagnostics,
}

impl ChannelEstimator {
    /// `alpha` scales the QP half-window relative to the MSE-optimal one
    /// (`m = round(alpha·ṁ)`, clamped to the searchable range); it is
    /// ignored by the equal-weight estimator.
    pub fn new(kind: EstimatorKind, alpha: f64) -> Self {
        assert!(alpha > 0.0);
        ChannelEstimator {
            kind,
            alpha,
            diagnostics: EstimatorDiagnostics::default(),
        }
    }

    pub fn diagnostics(&self) -> &EstimatorDiagnostics {
        &self.diagnostics
    }

    /// One estimation pass; exposed separately from the trait so callers
    /// can drive it outside a decode.
    pub fn estimate(&mut self, y: &[f64], bias: &[f64]) -> Vec<f64> {
        let series = squared_residuals(y, bias);
        let m_opt = optimal_half_window(&series);
        let mut estimates = match self.kind {
            EstimatorKind::Swscan => {
                self.diagnostics.last_m = m_opt;
                window_mean_estimates(&series, m_opt)
            }
            EstimatorKind::W2scan => {
                let m = ((self.alpha * m_opt as f64).round() as usize)
                    .clamp(1, series.max_half_window());
                self.diagnostics.last_m = m;
                let phi = build_phi(&series, m);
                let (h, f) = build_h_f(&phi);
                let problem = QpProblem::new(h, f);
                match qp::solve(&problem) {
                    Ok(weights) => {
                        let obj = problem.objective(weights.weights());
                        let obj_eq = problem.objective(TapWeights::equal(m).weights());
                        let excess = (obj - obj_eq) / obj_eq.abs().max(1.0);
                        if excess > self.diagnostics.max_objective_excess {
                            self.diagnostics.max_objective_excess = excess;
                        }
                        weighted_estimates(&series, &weights)
                    }
                    Err(_) => {
                        self.diagnostics.qp_fallbacks += 1;
                        window_mean_estimates(&series, m)
                    }
                }
            }
        };
        for e in estimates.iter_mut() {
            *e = e.max(VAR_FLOOR);
        }
        self.diagnostics.updates += 1;
        estimates
    }
}

impl StateUpdater for ChannelEstimator {
    fn update(&mut self, y: &[f64], bias: &[f64]) -> Vec<f64> {
        self.estimate(y, bias)
    }
}
