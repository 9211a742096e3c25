//! BPSK/AWGN Monte-Carlo evaluation with a log-domain sum-product decoder:
//! flooding schedule, tanh-rule check update, messages clipped at ±38.
//!
//! Frames are independent work units keyed by `(seed, snr index, frame
//! index)`, so results do not depend on the worker count; each SNR point runs
//! until a target number of block errors has accumulated (in frame order) or
//! a frame cap is hit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::{LiftedCode, SparseBinaryMatrix};

/// Message clipping bound in LLR units.
pub const LLR_CLIP: f64 = 38.0;

/// Monte-Carlo run parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// E_b/N_0 points in dB.
    pub snr_db_points: Vec<f64>,
    pub max_iterations: u32,
    /// Per-point stopping rule: stop after this many frame errors.
    pub stop_block_errors: u64,
    /// Hard cap on frames per point.
    pub max_frames: u64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            snr_db_points: Vec::new(),
            max_iterations: 150,
            stop_block_errors: 50,
            max_frames: 10_000_000,
            seed: 1,
        }
    }
}

/// Counters for one SNR point. `ber`/`fer` are `None` when no frame ran.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnrPointReport {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
    pub ber: Option<f64>,
    pub fer: Option<f64>,
    pub avg_iterations: f64,
    /// Frames on which the decoder satisfied the syndrome before the
    /// iteration cap.
    pub converged_frames: u64,
}

/// Full simulation outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub code_len: usize,
    pub code_dim: usize,
    pub rate: f64,
    pub points: Vec<SnrPointReport>,
    pub elapsed_secs: f64,
}

/// Maps E_b/N_0 in dB and code rate to the AWGN noise variance for
/// unit-energy BPSK: `sigma^2 = 1 / (2 R 10^(snr/10))`.
pub fn noise_variance(snr_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))
}

/// BPSK-modulates `codeword` (bit b -> 1 - 2b), adds white Gaussian noise of
/// variance `sigma^2 = 1/(2 R 10^(snr/10))`, and returns channel LLRs
/// `2 y / sigma^2`.
pub fn awgn_channel<R: Rng>(codeword: &[u8], snr_db: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    let sigma2 = noise_variance(snr_db, rate);
    let sigma = sigma2.sqrt();
    codeword
        .iter()
        .map(|&b| {
            let x = 1.0 - 2.0 * f64::from(b);
            let y = x + sigma * standard_normal(rng);
            2.0 * y / sigma2
        })
        .collect()
}

/// Box-Muller; consumes two uniforms per call.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen::<f64>();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen::<f64>();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

// ---------------------------------------------------------------------------
// Sum-product decoder
// ---------------------------------------------------------------------------

/// Edge-structured decoder state reusable across frames.
pub struct SumProductDecoder {
    n: usize,
    check_offsets: Vec<u32>,
    /// variable index per edge, grouped by check
    edge_var: Vec<u32>,
    var_offsets: Vec<u32>,
    /// edge ids (into the check-grouped arrays) per variable
    var_edges: Vec<u32>,
}

/// Per-worker scratch for [`SumProductDecoder::decode`].
pub struct DecoderWorkspace {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    fwd: Vec<f64>,
    total: Vec<f64>,
    pub hard: Vec<u8>,
}

/// Result of one decoding attempt; `converged` means the hard decision
/// satisfies every parity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub converged: bool,
    pub iterations: u32,
}

impl SumProductDecoder {
    pub fn new(h: &SparseBinaryMatrix) -> Self {
        let mut check_offsets = Vec::with_capacity(h.rows() + 1);
        let mut edge_var = Vec::with_capacity(h.ones());
        check_offsets.push(0);
        for i in 0..h.rows() {
            edge_var.extend_from_slice(h.row(i));
            check_offsets.push(edge_var.len() as u32);
        }
        let mut var_offsets = vec![0u32; h.cols() + 1];
        for &v in &edge_var {
            var_offsets[v as usize + 1] += 1;
        }
        for i in 0..h.cols() {
            var_offsets[i + 1] += var_offsets[i];
        }
        let mut cursor = var_offsets.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[cursor[v as usize] as usize] = e as u32;
            cursor[v as usize] += 1;
        }
        Self {
            n: h.cols(),
            check_offsets,
            edge_var,
            var_offsets,
            var_edges,
        }
    }

    pub fn workspace(&self) -> DecoderWorkspace {
        DecoderWorkspace {
            v2c: vec![0.0; self.edge_var.len()],
            c2v: vec![0.0; self.edge_var.len()],
            fwd: Vec::new(),
            total: vec![0.0; self.n],
            hard: vec![0; self.n],
        }
    }

    fn syndrome_ok(&self, hard: &[u8]) -> bool {
        (0..self.check_offsets.len() - 1).all(|i| {
            let lo = self.check_offsets[i] as usize;
            let hi = self.check_offsets[i + 1] as usize;
            self.edge_var[lo..hi]
                .iter()
                .fold(0u8, |acc, &v| acc ^ hard[v as usize])
                == 0
        })
    }

    /// Flooding sum-product decoding of one LLR vector. Stops at the first
    /// iteration whose hard decision satisfies the syndrome; iteration 0
    /// means the channel hard decision was already a codeword.
    pub fn decode(&self, llr: &[f64], max_iter: u32, ws: &mut DecoderWorkspace) -> DecodeOutcome {
        assert_eq!(llr.len(), self.n, "LLR length must match the code length");
        for (h, &l) in ws.hard.iter_mut().zip(llr) {
            *h = u8::from(l < 0.0);
        }
        if self.syndrome_ok(&ws.hard) {
            return DecodeOutcome {
                converged: true,
                iterations: 0,
            };
        }
        for v in 0..self.n {
            let lo = self.var_offsets[v] as usize;
            let hi = self.var_offsets[v + 1] as usize;
            for &e in &self.var_edges[lo..hi] {
                ws.v2c[e as usize] = llr[v].clamp(-LLR_CLIP, LLR_CLIP);
            }
        }
        for iter in 1..=max_iter {
            // check update: tanh rule via forward/backward partial products
            for i in 0..self.check_offsets.len() - 1 {
                let lo = self.check_offsets[i] as usize;
                let hi = self.check_offsets[i + 1] as usize;
                let deg = hi - lo;
                ws.fwd.resize(deg + 1, 1.0);
                ws.fwd[0] = 1.0;
                for (k, e) in (lo..hi).enumerate() {
                    ws.fwd[k + 1] = ws.fwd[k] * (ws.v2c[e] / 2.0).tanh();
                }
                let mut back = 1.0;
                for (k, e) in (lo..hi).enumerate().rev() {
                    let excl = ws.fwd[k] * back;
                    back *= (ws.v2c[e] / 2.0).tanh();
                    ws.c2v[e] = (2.0 * excl.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                }
            }
            // variable update
            ws.total.copy_from_slice(llr);
            for (e, &v) in self.edge_var.iter().enumerate() {
                ws.total[v as usize] += ws.c2v[e];
            }
            for v in 0..self.n {
                let lo = self.var_offsets[v] as usize;
                let hi = self.var_offsets[v + 1] as usize;
                for &e in &self.var_edges[lo..hi] {
                    ws.v2c[e as usize] =
                        (ws.total[v] - ws.c2v[e as usize]).clamp(-LLR_CLIP, LLR_CLIP);
                }
                ws.hard[v] = u8::from(ws.total[v] < 0.0);
            }
            if self.syndrome_ok(&ws.hard) {
                return DecodeOutcome {
                    converged: true,
                    iterations: iter,
                };
            }
        }
        DecodeOutcome {
            converged: false,
            iterations: max_iter,
        }
    }
}

/// One-shot decoding convenience wrapper: returns the hard decision, the
/// convergence flag and the iterations used.
pub fn sp_decode(h: &SparseBinaryMatrix, llr: &[f64], max_iter: u32) -> (Vec<u8>, bool, u32) {
    let dec = SumProductDecoder::new(h);
    let mut ws = dec.workspace();
    let out = dec.decode(llr, max_iter, &mut ws);
    (ws.hard.clone(), out.converged, out.iterations)
}

// ---------------------------------------------------------------------------
// Monte-Carlo harness
// ---------------------------------------------------------------------------

fn mix3(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0xA24B_AED4_963E_E407)
        ^ b.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    z = (z ^ (z >> 32)).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z = (z ^ (z >> 32)).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z ^ (z >> 32)
}

struct FrameResult {
    bit_errors: u32,
    iterations: u32,
    converged: bool,
}

/// All-zero-codeword Monte-Carlo simulation of `code` under BPSK/AWGN and
/// sum-product decoding (the all-zero word is a codeword of every linear
/// code, and the channel is symmetric, so the estimate is unbiased).
///
/// Per SNR point, frames run in index order until `stop_block_errors` block
/// errors have occurred or `max_frames` frames were sent. Deterministic for
/// a given seed regardless of thread count.
pub fn run_monte_carlo(code: &LiftedCode, config: &SimConfig) -> Result<SimReport> {
    if config.snr_db_points.is_empty() {
        return Err(Error::Domain("no SNR points requested".into()));
    }
    if config.snr_db_points.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain("SNR points must be finite".into()));
    }
    if config.stop_block_errors == 0 {
        return Err(Error::Domain("stop_block_errors must be at least 1".into()));
    }
    let start = std::time::Instant::now();
    let n = code.len();
    let rate = code.rate();
    if !(rate > 0.0) {
        return Err(Error::Domain(
            "code has rate 0; nothing meaningful to simulate".into(),
        ));
    }
    let decoder = SumProductDecoder::new(code.matrix());
    let mut points = Vec::new();
    for (si, &snr_db) in config.snr_db_points.iter().enumerate() {
        let sigma2 = noise_variance(snr_db, rate);
        let sigma = sigma2.sqrt();
        let run_frame = |frame: u64, ws: &mut DecoderWorkspace, llr: &mut Vec<f64>| -> FrameResult {
            let mut rng = ChaCha8Rng::seed_from_u64(mix3(config.seed, si as u64, frame));
            llr.clear();
            llr.extend((0..n).map(|_| {
                let y = 1.0 + sigma * standard_normal(&mut rng);
                2.0 * y / sigma2
            }));
            let out = decoder.decode(llr, config.max_iterations, ws);
            FrameResult {
                bit_errors: ws.hard.iter().map(|&b| u32::from(b)).sum(),
                iterations: out.iterations,
                converged: out.converged,
            }
        };
        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        let mut block_errors = 0u64;
        let mut iter_sum = 0u64;
        let mut converged_frames = 0u64;
        let mut chunk: u64 = 1024;
        'point: while frames < config.max_frames && block_errors < config.stop_block_errors {
            let upto = (frames + chunk).min(config.max_frames);
            let results: Vec<FrameResult> = (frames..upto)
                .into_par_iter()
                .map_init(
                    || (decoder.workspace(), Vec::with_capacity(n)),
                    |(ws, llr), frame| run_frame(frame, ws, llr),
                )
                .collect();
            for r in results {
                frames += 1;
                bit_errors += u64::from(r.bit_errors);
                block_errors += u64::from(r.bit_errors > 0);
                iter_sum += u64::from(r.iterations);
                converged_frames += u64::from(r.converged);
                if block_errors >= config.stop_block_errors {
                    break 'point;
                }
            }
            chunk = (chunk * 2).min(1 << 16);
        }
        points.push(SnrPointReport {
            snr_db,
            frames,
            bit_errors,
            block_errors,
            ber: (frames > 0).then(|| bit_errors as f64 / (frames as f64 * n as f64)),
            fer: (frames > 0).then(|| block_errors as f64 / frames as f64),
            avg_iterations: if frames > 0 {
                iter_sum as f64 / frames as f64
            } else {
                0.0
            },
            converged_frames,
        });
    }
    Ok(SimReport {
        config: config.clone(),
        code_len: n,
        code_dim: code.dim(),
        rate,
        points,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Wilson score interval for an error proportion at confidence `z` (1.96 for
/// 95%). Returns `(low, high)`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exponent::ExponentMatrix;
    use crate::lifting::lift;

    fn code_3_6() -> LiftedCode {
        lift(
            &ExponentMatrix::construction1(&catalog::lookup(3, 6).unwrap().family),
            37,
        )
        .unwrap()
    }

    #[test]
    fn noise_variance_at_zero_db_rate_half() {
        assert!((noise_variance(0.0, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn llr_signs_match_bits_at_high_snr() {
        let bits: Vec<u8> = (0..64).map(|i| (i % 3 == 0) as u8).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let llr = awgn_channel(&bits, 25.0, 0.5, &mut rng);
        for (b, l) in bits.iter().zip(&llr) {
            assert_eq!(*b == 1, *l < 0.0);
        }
    }

    #[test]
    fn llr_moments_match_theory() {
        // Channel LLRs for bit 0 are Gaussian with mean 2/sigma^2 and
        // variance 4/sigma^2.
        let bits = vec![0u8; 1_000_000];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (snr, rate) = (1.5, 0.5);
        let llr = awgn_channel(&bits, snr, rate, &mut rng);
        let sigma2 = noise_variance(snr, rate);
        let mean: f64 = llr.iter().sum::<f64>() / llr.len() as f64;
        let var: f64 =
            llr.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (llr.len() - 1) as f64;
        assert!((mean - 2.0 / sigma2).abs() / (2.0 / sigma2) < 0.01, "mean {mean}");
        assert!((var - 4.0 / sigma2).abs() / (4.0 / sigma2) < 0.01, "var {var}");
    }

    #[test]
    fn decoder_accepts_noiseless_input() {
        let code = code_3_6();
        let llr = vec![LLR_CLIP; code.len()];
        let (bits, converged, iters) = sp_decode(code.matrix(), &llr, 150);
        assert!(converged);
        assert!(iters <= 1);
        assert!(bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn decoder_corrects_any_single_saturated_flip() {
        // d_min = 4 girth-6 code: one wrong bit among strong correct LLRs.
        let code = code_3_6();
        let dec = SumProductDecoder::new(code.matrix());
        let mut ws = dec.workspace();
        for flip in 0..code.len() {
            let mut llr = vec![12.0; code.len()];
            llr[flip] = -12.0;
            let out = dec.decode(&llr, 150, &mut ws);
            assert!(out.converged, "flip {flip} did not converge");
            assert!(ws.hard.iter().all(|&b| b == 0), "flip {flip} miscorrected");
        }
    }

    #[test]
    fn unsatisfiable_pattern_reports_failure() {
        // A single check of degree 2 with contradictory strong LLRs can
        // never satisfy the syndrome.
        let p = ExponentMatrix::from_rows(vec![vec![Some(vec![0]), Some(vec![0])]]).unwrap();
        let code = lift(&p, 1).unwrap();
        let (_, converged, iters) = sp_decode(code.matrix(), &[LLR_CLIP, -LLR_CLIP], 25);
        assert!(!converged);
        assert_eq!(iters, 25);
    }

    #[test]
    fn monte_carlo_zero_frames() {
        let code = code_3_6();
        let config = SimConfig {
            snr_db_points: vec![2.0],
            max_frames: 0,
            ..Default::default()
        };
        let report = run_monte_carlo(&code, &config).unwrap();
        assert_eq!(report.points[0].frames, 0);
        assert_eq!(report.points[0].ber, None);
        assert_eq!(report.points[0].fer, None);
    }

    #[test]
    fn monte_carlo_counters_are_consistent() {
        let code = code_3_6();
        let config = SimConfig {
            snr_db_points: vec![1.0, 3.0],
            max_iterations: 30,
            stop_block_errors: 20,
            max_frames: 2000,
            seed: 11,
        };
        let report = run_monte_carlo(&code, &config).unwrap();
        for p in &report.points {
            assert!(p.frames > 0);
            let ber = p.ber.unwrap();
            let fer = p.fer.unwrap();
            assert!(ber <= fer + 1e-12);
            assert!(fer <= code.len() as f64 * ber + 1e-12);
            assert!(p.bit_errors <= p.frames * code.len() as u64);
            assert!(p.block_errors <= p.frames);
        }
    }

    #[test]
    fn monte_carlo_deterministic_for_seed() {
        let code = code_3_6();
        let config = SimConfig {
            snr_db_points: vec![2.0],
            max_iterations: 20,
            stop_block_errors: 10,
            max_frames: 1000,
            seed: 99,
        };
        let a = run_monte_carlo(&code, &config).unwrap();
        let b = run_monte_carlo(&code, &config).unwrap();
        assert_eq!(a.points[0].frames, b.points[0].frames);
        assert_eq!(a.points[0].bit_errors, b.points[0].bit_errors);
        assert_eq!(a.points[0].block_errors, b.points[0].block_errors);
    }

    #[test]
    fn wilson_interval_sane() {
        let (lo, hi) = wilson_interval(50, 1000, 1.96);
        assert!(lo < 0.05 && 0.05 < hi);
        assert!(hi - lo < 0.03);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
    }
}
