//! Piecewise-stationary AWGN channel with BPSK signalling, plus the
//! capacity bounds used to assess the cost of not knowing the state.
//!
//! The channel holds a constant noise variance for a random-length piece
//! (lengths Poisson-distributed, states drawn i.i.d. from a finite set).
//! Two capacities bracket the achievable rate: the genie capacity `Ĉ`
//! averages per-state capacities as if the state were known at the
//! decoder, while the equivalent-stationary capacity `C̄` treats the
//! channel as stationary at the mean variance. Concavity of entropy gives
//! `C̄ ≤ Ĉ`, with equality only for a truly stationary channel.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;

use crate::polar::Bit;

/// Numerical failure while evaluating a capacity integral.
#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("quadrature did not converge (depth limit at panel [{0}, {1}])")]
    QuadratureFailed(f64, f64),
}

/// Parameters of the piecewise-stationary channel: Poisson mean piece
/// length and a finite set of noise-variance states with probabilities.
#[derive(Debug, Clone)]
pub struct ChannelParams {
    lambda: f64,
    states: Vec<(f64, f64)>,
    sigma_bar2: f64,
}

impl ChannelParams {
    /// States drawn uniformly from `variances`.
    pub fn uniform(lambda: f64, variances: &[f64]) -> Self {
        let p = 1.0 / variances.len() as f64;
        Self::general(lambda, variances.iter().map(|&v| (v, p)).collect())
    }

    /// States drawn from an explicit discrete distribution.
    pub fn general(lambda: f64, states: Vec<(f64, f64)>) -> Self {
        assert!(lambda > 0.0, "piece length mean must be positive");
        assert!(!states.is_empty(), "state space must be non-empty");
        let mut total_p = 0.0;
        let mut mean = 0.0;
        for &(v, p) in &states {
            assert!(v >= 0.0, "noise variances must be non-negative");
            assert!(p >= 0.0, "state probabilities must be non-negative");
            total_p += p;
            mean += p * v;
        }
        assert!(
            (total_p - 1.0).abs() < 1e-9,
            "state probabilities must sum to one"
        );
        ChannelParams {
            lambda,
            states,
            sigma_bar2: mean,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(variance, probability)` pairs of the state space.
    pub fn states(&self) -> &[(f64, f64)] {
        &self.states
    }

    /// Mean noise variance, the state of the equivalent stationary channel.
    pub fn sigma_bar2(&self) -> f64 {
        self.sigma_bar2
    }
}

/// One drawn state sequence: a per-symbol variance and the start index of
/// each piece.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub variances: Vec<f64>,
    pub piece_boundaries: Vec<usize>,
}

/// Draws a length-`n` state sequence: piece lengths are Poisson
/// (zero-length draws are rejected), piece states are i.i.d. from the
/// state space, and the final piece is truncated at `n`.
pub fn sample_state_sequence<R: Rng>(
    params: &ChannelParams,
    n: usize,
    rng: &mut R,
) -> ChannelRealization {
    assert!(n >= 1);
    let poisson = Poisson::new(params.lambda).expect("validated lambda");
    let mut variances = Vec::with_capacity(n);
    let mut piece_boundaries = Vec::new();
    while variances.len() < n {
        let mut len = 0usize;
        while len == 0 {
            len = poisson.sample(rng) as usize;
        }
        let variance = sample_state(params, rng);
        piece_boundaries.push(variances.len());
        let take = len.min(n - variances.len());
        variances.extend(std::iter::repeat_n(variance, take));
    }
    ChannelRealization {
        variances,
        piece_boundaries,
    }
}

fn sample_state<R: Rng>(params: &ChannelParams, rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    for &(v, p) in &params.states {
        acc += p;
        if u < acc {
            return v;
        }
    }
    params.states.last().unwrap().0
}

/// BPSK transmission over the realized channel:
/// `y_i = (1 - 2 x_i) + z_i` with `z_i ~ N(0, sigma2_i)`. Zero-variance
/// pieces transmit noiselessly.
pub fn transmit<R: Rng>(x: &[Bit], realization: &ChannelRealization, rng: &mut R) -> Vec<f64> {
    assert_eq!(x.len(), realization.variances.len());
    let noise: Vec<f64> = realization
        .variances
        .iter()
        .map(|&s2| {
            if s2 == 0.0 {
                0.0
            } else {
                let z: f64 = StandardNormal.sample(rng);
                s2.sqrt() * z
            }
        })
        .collect();
    transmit_with_noise(x, &noise)
}

/// The modulation-plus-noise map with the noise supplied explicitly.
pub fn transmit_with_noise(x: &[Bit], noise: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), noise.len());
    x.iter()
        .zip(noise)
        .map(|(&b, &z)| (1.0 - 2.0 * b as f64) + z)
        .collect()
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Capacity of a binary symmetric channel with crossover probability `eps`.
pub fn bsc_capacity(eps: f64) -> f64 {
    1.0 - binary_entropy(eps)
}

fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else if x < -35.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Binary entropy (bits) of `sigmoid(t)`, stable for large `|t|`.
fn binary_entropy_of_sigmoid(t: f64) -> f64 {
    let p = sigmoid(t);
    (p * softplus(-t) + (1.0 - p) * softplus(t)) / std::f64::consts::LN_2
}

/// Capacity of the BPSK-input AWGN channel with noise variance `sigma2`:
/// one minus the output-conditioned equivocation, integrated over the
/// channel output by adaptive quadrature to absolute tolerance `1e-6`.
pub fn awgn_bpsk_capacity(sigma2: f64) -> Result<f64, CapacityError> {
    assert!(sigma2 > 0.0, "use the zero-variance convention upstream");
    let sigma = sigma2.sqrt();
    let norm = 1.0 / (2.0 * (2.0 * std::f64::consts::PI * sigma2).sqrt());
    let integrand = |y: f64| {
        let d0 = y - 1.0;
        let d1 = y + 1.0;
        let density = norm
            * ((-d0 * d0 / (2.0 * sigma2)).exp() + (-d1 * d1 / (2.0 * sigma2)).exp());
        density * binary_entropy_of_sigmoid(2.0 * y / sigma2)
    };
    let hi = 1.0 + 10.0 * sigma;
    // Seed panels at the density modes so the first Simpson estimates are
    // already sensible.
    let knots = [-hi, -1.0, 0.0, 1.0, hi];
    let mut equivocation = 0.0;
    for pair in knots.windows(2) {
        equivocation += adaptive_simpson(&integrand, pair[0], pair[1], 2.5e-7)?;
    }
    Ok((1.0 - equivocation).clamp(0.0, 1.0))
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
) -> Result<f64, CapacityError> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: usize,
) -> Result<f64, CapacityError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(CapacityError::QuadratureFailed(a, b));
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
    Ok(l + r)
}

/// Capacity of one state, with the zero-variance state contributing a full
/// bit by convention.
fn state_capacity(sigma2: f64) -> Result<f64, CapacityError> {
    if sigma2 == 0.0 {
        Ok(1.0)
    } else {
        awgn_bpsk_capacity(sigma2)
    }
}

/// Returns `(Ĉ, C̄)`: the genie capacity (state known at the decoder) and
/// the capacity of the equivalent stationary channel at the mean variance.
pub fn capacities(params: &ChannelParams) -> Result<(f64, f64), CapacityError> {
    let mut c_hat = 0.0;
    for &(v, p) in params.states() {
        c_hat += p * state_capacity(v)?;
    }
    let c_bar = state_capacity(params.sigma_bar2())?;
    Ok((c_hat, c_bar))
}

/// `E_b/N_0` in dB as reported alongside the error-rate sweeps:
/// `-10 log10(2 sigma_bar2)`. The code rate is accepted for interface
/// symmetry but does not enter the formula.
pub fn eb_n0_db(sigma_bar2: f64, _rate: f64) -> f64 {
    assert!(sigma_bar2 > 0.0);
    -10.0 * (2.0 * sigma_bar2).log10()
}
