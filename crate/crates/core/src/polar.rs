//! Polar transform, code construction and the transmission permutation.
//!
//! A codeword is formed as `x = u · B_N · F^{⊗n}` over GF(2), where `B_N`
//! is the bit-reversal permutation and `F = [1 0; 1 1]`. Information bits
//! occupy the `K` most reliable virtual sub-channels; reliability is
//! measured by genie-aided SC error counts on a stationary AWGN channel.
//! Before transmission the codeword is shuffled by a fixed random
//! permutation shared between encoder and decoder, which decorrelates
//! adjacent physical sub-channels of a channel with memory.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::decoders::box_plus;
use crate::seeding::{self, tag};

/// Bits are plain `u8` values in `{0, 1}`; blocks are `Vec<u8>` of length `N`.
pub type Bit = u8;

/// Failure to read or validate a code-spec file.
#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("i/o error on code-spec file: {0}")]
    Io(#[from] std::io::Error),
    #[error("code-spec file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid code spec: {0}")]
    Invalid(String),
}

/// Static description of one polar code: length, frozen/information sets
/// and the transmission permutation (with its inverse).
///
/// Indices are 0-based internally; the file format and all printed output
/// use 1-based indices.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    levels: usize,
    len: usize,
    k: usize,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    frozen_graph: Vec<bool>,
    bitrev: Vec<usize>,
    reliability: Vec<usize>,
    tx_perm: Vec<usize>,
    tx_inv: Vec<usize>,
    perm_seed: u64,
}

impl CodeSpec {
    /// Builds a spec from a reliability order (best sub-channel first),
    /// generating the transmission permutation by Fisher–Yates from
    /// `perm_seed`.
    pub fn from_reliability(
        n: usize,
        k: usize,
        reliability: Vec<usize>,
        perm_seed: u64,
    ) -> Result<Self, SpecFileError> {
        let len = 1usize << n;
        let mut perm: Vec<usize> = (0..len).collect();
        let mut rng = seeding::derive_rng(perm_seed, tag::PERMUTATION, 0, 0);
        perm.shuffle(&mut rng);
        Self::with_permutation(n, k, reliability, perm, perm_seed)
    }

    /// Builds a spec with an explicit transmission permutation.
    /// `tx_perm[j]` is the transmitted position of codeword bit `j`.
    pub fn with_permutation(
        n: usize,
        k: usize,
        reliability: Vec<usize>,
        tx_perm: Vec<usize>,
        perm_seed: u64,
    ) -> Result<Self, SpecFileError> {
        if n == 0 || n > 24 {
            return Err(SpecFileError::Invalid(format!(
                "level count n = {n} out of supported range 1..=24"
            )));
        }
        let len = 1usize << n;
        if k > len {
            return Err(SpecFileError::Invalid(format!("K = {k} exceeds N = {len}")));
        }
        if !is_permutation(&reliability, len) {
            return Err(SpecFileError::Invalid(
                "reliability order is not a permutation of 0..N".into(),
            ));
        }
        if !is_permutation(&tx_perm, len) {
            return Err(SpecFileError::Invalid(
                "transmission permutation is not a permutation of 0..N".into(),
            ));
        }

        let mut info_set: Vec<usize> = reliability[..k].to_vec();
        info_set.sort_unstable();
        let mut frozen = vec![true; len];
        for &i in &info_set {
            frozen[i] = false;
        }
        let bitrev = bit_reversal_permutation(n);
        let frozen_graph: Vec<bool> = (0..len).map(|i| frozen[bitrev[i]]).collect();
        let mut tx_inv = vec![0usize; len];
        for (j, &p) in tx_perm.iter().enumerate() {
            tx_inv[p] = j;
        }
        Ok(CodeSpec {
            levels: n,
            len,
            k,
            info_set,
            frozen,
            frozen_graph,
            bitrev,
            reliability,
            tx_perm,
            tx_inv,
            perm_seed,
        })
    }

    /// Number of polarization levels `n`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Code length `N = 2^n`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of information bits `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Code rate `K/N`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len as f64
    }

    /// Information set (sorted, 0-based message-domain indices).
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// True if message position `i` is frozen.
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Frozen mask in graph order (message domain composed with
    /// bit reversal), as seen by the decoders.
    pub fn frozen_graph(&self) -> &[bool] {
        &self.frozen_graph
    }

    /// Bit-reversal table for the code length.
    pub fn bitrev(&self) -> &[usize] {
        &self.bitrev
    }

    /// Reliability order, best sub-channel first (0-based).
    pub fn reliability(&self) -> &[usize] {
        &self.reliability
    }

    /// Transmission permutation: codeword bit `j` is sent at `tx_perm()[j]`.
    pub fn tx_perm(&self) -> &[usize] {
        &self.tx_perm
    }

    /// Seed the transmission permutation was generated from.
    pub fn perm_seed(&self) -> u64 {
        self.perm_seed
    }
}

fn is_permutation(v: &[usize], len: usize) -> bool {
    if v.len() != len {
        return false;
    }
    let mut seen = vec![false; len];
    for &x in v {
        if x >= len || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Per-sub-channel genie-aided SC error counts from code construction,
/// plus the resulting ranking (best sub-channel first).
#[derive(Debug, Clone)]
pub struct ReliabilityOrder {
    /// Error count per message-domain sub-channel index.
    pub error_counts: Vec<u64>,
    /// Sub-channel indices sorted by ascending error count; ties keep the
    /// lower index first so construction is reproducible.
    pub order: Vec<usize>,
}

impl ReliabilityOrder {
    fn from_counts(error_counts: Vec<u64>) -> Self {
        let mut order: Vec<usize> = (0..error_counts.len()).collect();
        order.sort_by_key(|&i| error_counts[i]);
        ReliabilityOrder {
            error_counts,
            order,
        }
    }
}

/// Bit-reversal permutation for `n` levels: index `i` maps to the integer
/// whose `n`-bit binary representation is that of `i` reversed (0-based).
pub fn bit_reversal_permutation(n: usize) -> Vec<usize> {
    assert!(n >= 1, "need at least one polarization level");
    let len = 1usize << n;
    (0..len)
        .map(|i| {
            let mut r = 0usize;
            for b in 0..n {
                r |= ((i >> b) & 1) << (n - 1 - b);
            }
            r
        })
        .collect()
}

/// In-place polar transform `v ← v · F^{⊗n}` over GF(2), computed by the
/// butterfly (log N stages of pairwise XOR), not by a matrix product.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    assert!(n.is_power_of_two(), "block length must be a power of two");
    let mut step = 1;
    while step < n {
        let mut base = 0;
        while base < n {
            for j in base..base + step {
                bits[j] ^= bits[j + step];
            }
            base += 2 * step;
        }
        step *= 2;
    }
}

/// Transforms a full-length message through `B_N F^{⊗n}`: the encoder map
/// without frozen-bit scattering. Also used to re-encode decoder decisions
/// for verification.
pub fn encode_message(spec: &CodeSpec, u: &[Bit]) -> Vec<Bit> {
    assert_eq!(u.len(), spec.len(), "message length must equal N");
    let mut x: Vec<Bit> = spec.bitrev.iter().map(|&r| u[r]).collect();
    polar_transform(&mut x);
    x
}

/// Encodes `K` information bits into a codeword: scatter into the
/// information set, zeros elsewhere, then apply `B_N F^{⊗n}`.
/// The output is the codeword before the transmission permutation.
pub fn encode(spec: &CodeSpec, info_bits: &[Bit]) -> Vec<Bit> {
    assert_eq!(info_bits.len(), spec.k(), "expected {} info bits", spec.k());
    let mut u = vec![0u8; spec.len()];
    for (&pos, &b) in spec.info_set.iter().zip(info_bits) {
        u[pos] = b;
    }
    encode_message(spec, &u)
}

/// Applies the transmission permutation: element `j` of the input lands at
/// position `tx_perm[j]` of the output.
pub fn apply_tx_permutation<T: Copy + Default>(spec: &CodeSpec, v: &[T]) -> Vec<T> {
    assert_eq!(v.len(), spec.len());
    let mut out = vec![T::default(); v.len()];
    for (j, &x) in v.iter().enumerate() {
        out[spec.tx_perm[j]] = x;
    }
    out
}

/// Inverse of [`apply_tx_permutation`]: restores codeword order exactly.
pub fn inverse_tx_permutation<T: Copy + Default>(spec: &CodeSpec, v: &[T]) -> Vec<T> {
    assert_eq!(v.len(), spec.len());
    let mut out = vec![T::default(); v.len()];
    for (j, &x) in v.iter().enumerate() {
        out[spec.tx_inv[j]] = x;
    }
    out
}

/// Monte Carlo code construction over a stationary AWGN channel with noise
/// variance `sigma_bar2`.
///
/// Each trial transmits the all-zero codeword and runs a genie-aided SC
/// decode: sub-channel `i` scores an error when its decision is wrong given
/// all earlier decisions corrected to the truth. Sub-channels are ranked by
/// ascending error count and the best `k` become the information set. The
/// construction ignores the transmission permutation, which is
/// capacity-neutral on a stationary channel.
pub fn construct_code_monte_carlo(
    n: usize,
    k: usize,
    sigma_bar2: f64,
    trials: u64,
    seed: u64,
) -> Result<(CodeSpec, ReliabilityOrder), SpecFileError> {
    assert!(trials >= 1, "need at least one construction trial");
    assert!(sigma_bar2 > 0.0, "construction noise variance must be positive");
    let len = 1usize << n;

    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut acc, t| {
                let mut rng = seeding::derive_rng(seed, tag::CONSTRUCTION, t, 0);
                let sigma = sigma_bar2.sqrt();
                let llrs: Vec<f64> = (0..len)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        2.0 * (1.0 + sigma * z) / sigma_bar2
                    })
                    .collect();
                genie_sc_all_zero(&llrs, &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    // Counts are tallied in graph (decode) order; the reliability ranking is
    // reported in message order.
    let bitrev = bit_reversal_permutation(n);
    let mut counts_msg = vec![0u64; len];
    for (i, &c) in counts.iter().enumerate() {
        counts_msg[bitrev[i]] = c;
    }
    let order = ReliabilityOrder::from_counts(counts_msg);
    let perm_seed = seeding::derive_seed(seed, tag::PERMUTATION);
    let spec = CodeSpec::from_reliability(n, k, order.order.clone(), perm_seed)?;
    Ok((spec, order))
}

/// One genie-aided SC pass over the all-zero codeword: bumps the error
/// count of every sub-channel whose decision would have been 1, then
/// proceeds with the true (zero) bit. With all-zero partial sums the
/// g-node reduces to a plain sum.
fn genie_sc_all_zero(llrs: &[f64], counts: &mut [u64]) {
    let n = llrs.len();
    if n == 1 {
        if llrs[0] < 0.0 {
            counts[0] += 1;
        }
        return;
    }
    let half = n / 2;
    let left: Vec<f64> = (0..half)
        .map(|i| box_plus(llrs[i], llrs[i + half]))
        .collect();
    genie_sc_all_zero(&left, &mut counts[..half]);
    let right: Vec<f64> = (0..half).map(|i| llrs[i] + llrs[i + half]).collect();
    genie_sc_all_zero(&right, &mut counts[half..]);
}

/// Writes a code-spec file. Plain text, 1-based indices:
/// line 1 `n K seed_perm`, line 2 the reliability order (best first),
/// line 3 the transmission permutation.
pub fn write_spec_file(spec: &CodeSpec, path: &Path) -> Result<(), SpecFileError> {
    let mut out = String::new();
    writeln!(out, "{} {} {}", spec.levels, spec.k, spec.perm_seed).unwrap();
    let order: Vec<String> = spec.reliability.iter().map(|&i| (i + 1).to_string()).collect();
    writeln!(out, "{}", order.join(" ")).unwrap();
    let perm: Vec<String> = spec.tx_perm.iter().map(|&p| (p + 1).to_string()).collect();
    writeln!(out, "{}", perm.join(" ")).unwrap();
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a code-spec file written by [`write_spec_file`].
pub fn read_spec_file(path: &Path) -> Result<CodeSpec, SpecFileError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(SpecFileError::Parse {
        line: 1,
        msg: "missing header line".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(SpecFileError::Parse {
            line: 1,
            msg: "expected `n K seed_perm`".into(),
        });
    }
    let n: usize = parse_field(fields[0], 1)?;
    let k: usize = parse_field(fields[1], 1)?;
    let perm_seed: u64 = parse_field(fields[2], 1)?;

    let order = parse_index_line(lines.next(), 2)?;
    let perm = parse_index_line(lines.next(), 3)?;
    CodeSpec::with_permutation(n, k, order, perm, perm_seed)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, SpecFileError> {
    s.parse().map_err(|_| SpecFileError::Parse {
        line,
        msg: format!("cannot parse `{s}`"),
    })
}

fn parse_index_line(line: Option<&str>, lineno: usize) -> Result<Vec<usize>, SpecFileError> {
    let line = line.ok_or(SpecFileError::Parse {
        line: lineno,
        msg: "missing line".into(),
    })?;
    line.split_whitespace()
        .map(|s| {
            let v: usize = parse_field(s, lineno)?;
            if v == 0 {
                return Err(SpecFileError::Parse {
                    line: lineno,
                    msg: "indices are 1-based".into(),
                });
            }
            Ok(v - 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense GF(2) product with `B_N F^{⊗n}`, the definitional encoder map.
    fn dense_encode(n: usize, u: &[u8]) -> Vec<u8> {
        let len = 1usize << n;
        let g = dense_generator(n);
        (0..len)
            .map(|col| {
                let mut acc = 0u8;
                for (row, &ub) in u.iter().enumerate() {
                    acc ^= ub & g[row][col];
                }
                acc
            })
            .collect()
    }

    fn dense_generator(n: usize) -> Vec<Vec<u8>> {
        // F^{⊗n} by explicit Kronecker powers, rows permuted by bit reversal.
        let mut f = vec![vec![1u8]];
        for _ in 0..n {
            let m = f.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..2 * m {
                for c in 0..2 * m {
                    let block = [[1u8, 0u8], [1u8, 1u8]][r / m][c / m];
                    next[r][c] = block & f[r % m][c % m];
                }
            }
            f = next;
        }
        let br = bit_reversal_permutation(n);
        let len = 1usize << n;
        (0..len).map(|r| f[br[r]].clone()).collect()
    }

    fn identity_spec(n: usize, k: usize) -> CodeSpec {
        let len = 1usize << n;
        CodeSpec::with_permutation(n, k, (0..len).collect(), (0..len).collect(), 0).unwrap()
    }

    #[test]
    fn bit_reversal_examples() {
        // 1-based expectations from reversing 1-, 2- and 3-bit patterns.
        let one_based = |n: usize| -> Vec<usize> {
            bit_reversal_permutation(n).iter().map(|&i| i + 1).collect()
        };
        assert_eq!(one_based(1), vec![1, 2]);
        assert_eq!(one_based(2), vec![1, 3, 2, 4]);
        assert_eq!(one_based(3), vec![1, 5, 3, 7, 2, 6, 4, 8]);
    }

    #[test]
    fn bit_reversal_is_involution() {
        for n in 1..=10 {
            let p = bit_reversal_permutation(n);
            for (i, &r) in p.iter().enumerate() {
                assert_eq!(p[r], i);
            }
        }
    }

    #[test]
    fn transform_examples() {
        let mut v = vec![0, 0];
        polar_transform(&mut v);
        assert_eq!(v, vec![0, 0]);

        let mut v = vec![1, 1];
        polar_transform(&mut v);
        assert_eq!(v, vec![0, 1]);

        let mut v = vec![1, 0, 0, 0];
        polar_transform(&mut v);
        assert_eq!(v, vec![1, 0, 0, 0]);
    }

    #[test]
    fn transform_is_involution() {
        let mut rng = crate::seeding::derive_rng(11, 0, 0, 0);
        use rand::Rng;
        for n in 1..=6 {
            let len = 1usize << n;
            let v: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            let mut w = v.clone();
            polar_transform(&mut w);
            polar_transform(&mut w);
            assert_eq!(w, v);
        }
    }

    #[test]
    fn butterfly_matches_dense_generator_exhaustively() {
        for n in 1..=3 {
            let len = 1usize << n;
            let spec = identity_spec(n, len);
            for word in 0..(1usize << len) {
                let u: Vec<u8> = (0..len).map(|b| ((word >> b) & 1) as u8).collect();
                assert_eq!(encode_message(&spec, &u), dense_encode(n, &u));
            }
        }
    }

    #[test]
    fn encode_is_linear_and_involutive_at_full_rate() {
        use rand::Rng;
        let mut rng = crate::seeding::derive_rng(5, 0, 0, 0);
        let spec = identity_spec(4, 16);
        for _ in 0..100 {
            let a: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
            let b: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
            let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let ea = encode(&spec, &a);
            let eb = encode(&spec, &b);
            let exor = encode(&spec, &xor);
            let esum: Vec<u8> = ea.iter().zip(&eb).map(|(x, y)| x ^ y).collect();
            assert_eq!(exor, esum);
            assert_eq!(encode(&spec, &ea), a, "G_N is self-inverse over GF(2)");
        }
    }

    #[test]
    fn encode_zero_and_tiny_example() {
        let spec = identity_spec(3, 4);
        assert_eq!(encode(&spec, &[0, 0, 0, 0]), vec![0; 8]);

        // N=2, K=1, info set {2} (1-based): u = (0,1) -> x = (1,1).
        let spec = CodeSpec::with_permutation(1, 1, vec![1, 0], vec![0, 1], 0).unwrap();
        assert_eq!(spec.info_set(), &[1]);
        assert_eq!(encode(&spec, &[1]), vec![1, 1]);
    }

    #[test]
    fn permutation_examples_and_round_trip() {
        // pi = (3,1,4,2) 1-based: v_j lands at pi(j).
        let spec = CodeSpec::with_permutation(2, 4, (0..4).collect(), vec![2, 0, 3, 1], 0).unwrap();
        let v = [10.0, 20.0, 30.0, 40.0];
        let permuted = apply_tx_permutation(&spec, &v);
        assert_eq!(permuted, vec![20.0, 40.0, 10.0, 30.0]);
        assert_eq!(inverse_tx_permutation(&spec, &permuted), v.to_vec());

        let id = identity_spec(2, 4);
        assert_eq!(apply_tx_permutation(&id, &v), v.to_vec());
    }

    #[test]
    fn construction_on_noiseless_channel_picks_low_indices() {
        let (spec, order) = construct_code_monte_carlo(4, 8, 1e-6, 100, 42).unwrap();
        assert!(order.error_counts.iter().all(|&c| c == 0));
        // All counts tie, so the stable sort keeps index order.
        assert_eq!(spec.info_set(), (0..8).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn construction_is_deterministic() {
        let (_, a) = construct_code_monte_carlo(6, 32, 0.5, 500, 7).unwrap();
        let (_, b) = construct_code_monte_carlo(6, 32, 0.5, 500, 7).unwrap();
        assert_eq!(a.order, b.order);
        assert_eq!(a.error_counts, b.error_counts);
    }

    #[test]
    fn first_subchannel_is_most_degraded_at_scale() {
        // Sub-channel 1 is degraded relative to every other sub-channel,
        // but at this length hundreds of them share the 1/2-error plateau,
        // so the empirical maximum is a coin toss among them. Check that
        // sub-channel 1 sits on the plateau within binomial noise of the
        // maximum and ends up frozen.
        let trials = 10_000u64;
        let (spec, order) = construct_code_monte_carlo(10, 512, 0.5, trials, 3).unwrap();
        let max = *order.error_counts.iter().max().unwrap();
        let slack = (5.0 * 0.5 * (trials as f64).sqrt()) as u64;
        assert!(
            order.error_counts[0] + slack >= max,
            "count {} too far below max {max}",
            order.error_counts[0]
        );
        assert!(order.error_counts[0] > (0.47 * trials as f64) as u64);
        assert!(spec.is_frozen(0));
    }

    #[test]
    fn spec_file_round_trip() {
        let (spec, _) = construct_code_monte_carlo(5, 16, 0.5, 200, 9).unwrap();
        let dir = std::env::temp_dir().join("polarwin-spec-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("code.spec");
        write_spec_file(&spec, &path).unwrap();
        let back = read_spec_file(&path).unwrap();
        assert_eq!(back.levels(), spec.levels());
        assert_eq!(back.k(), spec.k());
        assert_eq!(back.info_set(), spec.info_set());
        assert_eq!(back.tx_perm(), spec.tx_perm());
        assert_eq!(back.perm_seed(), spec.perm_seed());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn malformed_spec_files_are_rejected() {
        let dir = std::env::temp_dir().join("polarwin-spec-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.spec");
        std::fs::write(&path, "3 4\n1 2 3 4 5 6 7 8\n1 2 3 4 5 6 7 8\n").unwrap();
        assert!(read_spec_file(&path).is_err());
        std::fs::write(&path, "3 4 0\n1 2 3 4 5 6 7 7\n1 2 3 4 5 6 7 8\n").unwrap();
        assert!(read_spec_file(&path).is_err());
        std::fs::remove_file(&path).ok();
    }
}
