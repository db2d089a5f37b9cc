//! SC and SCAN decoding with CRC-free verification.
//!
//! SCAN keeps two `(n+1) × N` matrices of log-likelihood ratios: `L` for
//! messages flowing from the channel side towards the message side, `R`
//! for the opposite direction. One iteration performs `N/2` rounds, each
//! processing one adjacent pair of message nodes depth-first and flushing
//! right-going messages on the way back; `R` rows persist across
//! iterations, which is what makes the schedule iterative. Working in the
//! log domain turns likelihood-ratio products into sums and the `a*b`
//! combination into [`box_plus`]. Frozen priors use [`crate::LLR_MAX`] as
//! a finite stand-in for infinity.
//!
//! A decode is declared correct when re-encoding the message decisions
//! reproduces the codeword decisions bit for bit; no CRC or hash is
//! attached to the data.

use crate::polar::{self, Bit, CodeSpec};
use crate::{LLR_MAX, VAR_FLOOR};

/// Magnitude restored to an underflowed box-plus result so its sign — the
/// part that decides bits — survives arbitrarily long degradation chains.
const LLR_TINY: f64 = 1e-300;

/// Exact box-plus: the log-domain image of the likelihood-ratio
/// combination `a*b = (ab+1)/(a+b)`, computed as
/// `2 atanh(tanh(a/2) tanh(b/2))` and clamped to `±LLR_MAX`.
///
/// The tanh product keeps the sign of arbitrarily small results, which
/// matters when code construction chains many degradation steps; an
/// additive (Jacobian) evaluation loses the sign below the rounding floor
/// of its correction terms and silently ranks the most-degraded
/// sub-channels as perfect. The product can still underflow to zero after
/// enough steps, so a zero result from non-zero inputs is restored to a
/// tiny value of the correct sign; a genuine zero input propagates as
/// zero.
#[inline]
pub fn box_plus(a: f64, b: f64) -> f64 {
    let v = 2.0 * ((0.5 * a).tanh() * (0.5 * b).tanh()).atanh();
    if v == 0.0 && a != 0.0 && b != 0.0 {
        return if (a < 0.0) != (b < 0.0) {
            -LLR_TINY
        } else {
            LLR_TINY
        };
    }
    // |a*b| never exceeds the weaker argument; imposing that exactly also
    // trims the overshoot the tanh evaluation picks up near saturation.
    let cap = a.abs().min(b.abs()).min(LLR_MAX);
    v.clamp(-cap, cap)
}

#[inline]
fn clamp_llr(v: f64) -> f64 {
    v.clamp(-LLR_MAX, LLR_MAX)
}

/// Channel LLRs in codeword order: `2 y_i / max(sigma2_i, VAR_FLOOR)`
/// computed in transmission order, clamped, then routed back through the
/// inverse transmission permutation.
pub fn channel_llrs(spec: &CodeSpec, y: &[f64], sigma2: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), spec.len());
    assert_eq!(sigma2.len(), spec.len());
    let tx: Vec<f64> = y
        .iter()
        .zip(sigma2)
        .map(|(&yi, &s2)| clamp_llr(2.0 * yi / s2.max(VAR_FLOOR)))
        .collect();
    polar::inverse_tx_permutation(spec, &tx)
}

/// The left/right message matrices of SCAN decoding.
#[derive(Debug, Clone)]
pub struct LlrState {
    levels: usize,
    len: usize,
    l: Vec<f64>,
    r: Vec<f64>,
}

impl LlrState {
    fn index(&self, row: usize, i: usize) -> usize {
        row * self.len + i
    }

    /// Left-going message at `(row, i)`; row 0 is the channel side,
    /// row `n` the message side.
    pub fn l(&self, row: usize, i: usize) -> f64 {
        self.l[self.index(row, i)]
    }

    /// Right-going message at `(row, i)`.
    pub fn r(&self, row: usize, i: usize) -> f64 {
        self.r[self.index(row, i)]
    }

    /// Rewrites the channel row from new per-symbol variance estimates,
    /// leaving every other message untouched.
    pub fn set_channel_row(&mut self, spec: &CodeSpec, y: &[f64], sigma2: &[f64]) {
        let row0 = channel_llrs(spec, y, sigma2);
        self.l[..self.len].copy_from_slice(&row0);
    }
}

/// Fresh decoder state: channel LLRs in `L` row 0, frozen priors pinned to
/// `+LLR_MAX` in `R` row `n`, everything else zero. `y` and `sigma2` are
/// in transmission order.
pub fn init_llrs(y: &[f64], sigma2: &[f64], spec: &CodeSpec) -> LlrState {
    let levels = spec.levels();
    let len = spec.len();
    let mut state = LlrState {
        levels,
        len,
        l: vec![0.0; (levels + 1) * len],
        r: vec![0.0; (levels + 1) * len],
    };
    state.set_channel_row(spec, y, sigma2);
    for (i, &frozen) in spec.frozen_graph().iter().enumerate() {
        if frozen {
            state.r[levels * len + i] = LLR_MAX;
        }
    }
    state
}

/// One full SCAN iteration: `N/2` rounds in depth-first order. Afterwards
/// row `n` of `L` and row 0 of `R` hold extrinsic values for all indices.
pub fn scan_iteration(state: &mut LlrState, spec: &CodeSpec) {
    debug_assert_eq!(state.len, spec.len());
    scan_node(state, 1, 0, spec.len());
}

/// Processes the block `[lo, lo+size)` between rows `level-1` and `level`.
/// Descends computing the left-going messages each child needs, ascends
/// flushing the right-going messages of row `level-1`.
fn scan_node(st: &mut LlrState, level: usize, lo: usize, size: usize) {
    let half = size / 2;
    let stride = st.len;
    let below = (level - 1) * stride;
    let here = level * stride;

    for j in lo..lo + half {
        let a = st.l[below + j];
        let b = st.l[below + j + half] + st.r[here + j + half];
        st.l[here + j] = box_plus(a, b);
    }
    if level < st.levels {
        scan_node(st, level + 1, lo, half);
    }
    for j in lo..lo + half {
        let prior = box_plus(st.l[below + j], st.r[here + j]);
        st.l[here + j + half] = clamp_llr(prior + st.l[below + j + half]);
    }
    if level < st.levels {
        scan_node(st, level + 1, lo + half, half);
    }
    for j in lo..lo + half {
        let li = st.l[below + j];
        let lh = st.l[below + j + half];
        let ri = st.r[here + j];
        let rh = st.r[here + j + half];
        st.r[below + j] = box_plus(ri, lh + rh);
        st.r[below + j + half] = clamp_llr(box_plus(li, ri) + rh);
    }
}

/// Hard decisions after an iteration.
///
/// Returns the message decisions (message order, zeros at frozen
/// positions), the codeword decisions (codeword order), and the bias
/// probabilities `p_i = sigmoid(-overall x-LLR)` in transmission order,
/// ready for the channel estimator. An overall LLR of exactly zero decides
/// bit 0.
pub fn hard_decisions(state: &LlrState, spec: &CodeSpec) -> (Vec<Bit>, Vec<Bit>, Vec<f64>) {
    let n = state.levels;
    let len = state.len;
    let mut u_graph = vec![0u8; len];
    for (i, bit) in u_graph.iter_mut().enumerate() {
        let llr = state.l[n * len + i] + state.r[n * len + i];
        *bit = (llr < 0.0) as u8;
    }
    let bitrev = spec.bitrev();
    let u_hat: Vec<Bit> = (0..len).map(|j| u_graph[bitrev[j]]).collect();

    let mut x_hat = vec![0u8; len];
    let mut p_cw = vec![0.0f64; len];
    for i in 0..len {
        let llr = state.l[i] + state.r[ i];
        x_hat[i] = (llr < 0.0) as u8;
        p_cw[i] = 1.0 / (1.0 + llr.exp());
    }
    let p = polar::apply_tx_permutation(spec, &p_cw);
    (u_hat, x_hat, p)
}

/// CRC-free verification: true iff re-encoding the message decisions
/// reproduces the codeword decisions exactly.
pub fn verify(spec: &CodeSpec, u_hat: &[Bit], x_hat: &[Bit]) -> bool {
    polar::encode_message(spec, u_hat) == x_hat
}

/// Full successive-cancellation decode; returns all `N` message-domain
/// decisions (frozen positions forced to 0). `llrs` are channel LLRs in
/// codeword order.
pub fn sc_decode_message(spec: &CodeSpec, llrs: &[f64]) -> Vec<Bit> {
    assert_eq!(llrs.len(), spec.len());
    let u_graph = sc_recurse(llrs, spec.frozen_graph());
    let bitrev = spec.bitrev();
    (0..spec.len()).map(|j| u_graph[bitrev[j]]).collect()
}

/// Successive-cancellation decode returning the `K` information bits.
pub fn sc_decode(spec: &CodeSpec, llrs: &[f64]) -> Vec<Bit> {
    let u = sc_decode_message(spec, llrs);
    spec.info_set().iter().map(|&i| u[i]).collect()
}

fn sc_recurse(llrs: &[f64], frozen: &[bool]) -> Vec<Bit> {
    let n = llrs.len();
    if n == 1 {
        return vec![if frozen[0] { 0 } else { (llrs[0] < 0.0) as u8 }];
    }
    let half = n / 2;
    let left_llrs: Vec<f64> = (0..half)
        .map(|i| box_plus(llrs[i], llrs[i + half]))
        .collect();
    let mut u = sc_recurse(&left_llrs, &frozen[..half]);

    let mut partial = u.clone();
    polar::polar_transform(&mut partial);
    let right_llrs: Vec<f64> = (0..half)
        .map(|i| {
            let sign = if partial[i] == 1 { -1.0 } else { 1.0 };
            llrs[i + half] + sign * llrs[i]
        })
        .collect();
    u.extend(sc_recurse(&right_llrs, &frozen[half..]));
    u
}

/// Per-iteration channel-state re-estimation hook for [`scan_decode`].
///
/// Called after each unverified iteration with the received vector and the
/// current bias probabilities (both in transmission order); returns new
/// per-symbol variance estimates in the same order.
pub trait StateUpdater {
    fn update(&mut self, y: &[f64], bias: &[f64]) -> Vec<f64>;
}

/// Adapter so a closure can serve as an updater.
pub struct FnUpdater<F>(pub F);

impl<F: FnMut(&[f64], &[f64]) -> Vec<f64>> StateUpdater for FnUpdater<F> {
    fn update(&mut self, y: &[f64], bias: &[f64]) -> Vec<f64> {
        (self.0)(y, bias)
    }
}

/// Result of an iterative SCAN decode.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// Message decisions, message order, length `N` (zeros at frozen
    /// positions).
    pub u_hat: Vec<Bit>,
    /// Codeword decisions, codeword order.
    pub x_hat: Vec<Bit>,
    /// Bias probabilities from the last iteration, transmission order.
    pub bias: Vec<f64>,
    /// Iterations actually run.
    pub iterations: usize,
    /// Whether verification succeeded; when true, re-encoding `u_hat`
    /// yields `x_hat` exactly.
    pub verified: bool,
}

impl DecodeOutcome {
    /// Information bits extracted from `u_hat`.
    pub fn info_bits(&self, spec: &CodeSpec) -> Vec<Bit> {
        spec.info_set().iter().map(|&i| self.u_hat[i]).collect()
    }
}

/// Iterative SCAN decode with verification-based early termination.
///
/// `y` and `sigma2_init` are in transmission order. After each iteration a
/// hard decision is taken and verified; on failure, an optional
/// `state_updater` refreshes the variance estimates, which rewrites only
/// the channel row of `L` — all other messages persist across iterations.
pub fn scan_decode(
    spec: &CodeSpec,
    y: &[f64],
    sigma2_init: &[f64],
    max_iters: usize,
    mut state_updater: Option<&mut dyn StateUpdater>,
) -> DecodeOutcome {
    assert!(max_iters >= 1);
    let mut state = init_llrs(y, sigma2_init, spec);
    let mut last = None;
    for it in 1..=max_iters {
        scan_iteration(&mut state, spec);
        let (u_hat, x_hat, bias) = hard_decisions(&state, spec);
        if verify(spec, &u_hat, &x_hat) {
            return DecodeOutcome {
                u_hat,
                x_hat,
                bias,
                iterations: it,
                verified: true,
            };
        }
        if it < max_iters {
            if let Some(updater) = state_updater.as_deref_mut() {
                let sigma2 = updater.update(y, &bias);
                state.set_channel_row(spec, y, &sigma2);
            }
        }
        last = Some((u_hat, x_hat, bias));
    }
    let (u_hat, x_hat, bias) = last.expect("at least one iteration ran");
    DecodeOutcome {
        u_hat,
        x_hat,
        bias,
        iterations: max_iters,
        verified: false,
    }
}
