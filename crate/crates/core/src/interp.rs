//! DFT zero-padding interpolation and its signal-to-noise-and-distortion ratio.
//!
//! Interpolating by `P` with a length-`N/P` DFT, zero insertion in frequency
//! and a length-`N` IDFT is the same as upsampling by `P` and running an
//! overlap-add engine with `L = M = N`. That engine violates `N >= L + M - 1`,
//! so tones between the bins `2 pi k / N` leak into images at multiples of
//! `2 pi / N` away.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::block_conv::{BlockConfig, BlockEngine, DftFilterCoeffs, Method};
use crate::error::{Error, Result};
use crate::mfb::{bank_filters, distortion_aliasing, SpectralGrid};
use crate::numerics::{check_finite, QuantTarget, QuantizationSpec};

/// Largest SNDR reported, used when the error is exactly zero.
pub const SNDR_CAP_DB: f64 = 300.0;

/// Scale of the nonzero DFT coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GainConvention {
    Unity,
    /// `P`, which preserves amplitude after zero insertion.
    #[default]
    Factor,
}

/// Where the low-rate Nyquist bin goes when `N/P` is even.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NyquistPolicy {
    /// Entirely to the positive-frequency bin `N/(2P)`.
    #[default]
    Positive,
    /// Half to bin `N/(2P)` and half to bin `N - N/(2P)`.
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterpConfig {
    factor: usize,
    block_len: usize,
    gain: GainConvention,
    nyquist: NyquistPolicy,
}

impl InterpConfig {
    /// Factor `P >= 2` dividing the output block length `N`.
    pub fn new(factor: usize, block_len: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::config(format!("interpolation factor {factor} must be at least 2")));
        }
        if block_len == 0 || !block_len.is_multiple_of(factor) {
            return Err(Error::config(format!(
                "block length {block_len} is not a positive multiple of P = {factor}"
            )));
        }
        Ok(Self {
            factor,
            block_len,
            gain: GainConvention::default(),
            nyquist: NyquistPolicy::default(),
        })
    }

    pub fn with_gain(mut self, gain: GainConvention) -> Self {
        self.gain = gain;
        self
    }

    pub fn with_nyquist(mut self, nyquist: NyquistPolicy) -> Self {
        self.nyquist = nyquist;
        self
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn input_block_len(&self) -> usize {
        self.block_len / self.factor
    }

    pub fn gain(&self) -> GainConvention {
        self.gain
    }

    pub fn nyquist(&self) -> NyquistPolicy {
        self.nyquist
    }

    pub fn gain_value(&self) -> f64 {
        match self.gain {
            GainConvention::Unity => 1.0,
            GainConvention::Factor => self.factor as f64,
        }
    }

    /// The `L = M = N` overlap-add configuration of the equivalent engine.
    pub fn block_config(&self) -> BlockConfig {
        BlockConfig::new(Method::OverlapAdd, self.block_len, self.block_len, self.block_len)
            .expect("N >= 1")
    }

    /// High-rate bin `k` that carries low-rate bin `j`, with its weight.
    fn allocation(&self) -> Vec<(usize, usize, f64)> {
        let (n, nl) = (self.block_len, self.input_block_len());
        let half = nl / 2;
        let mut out = Vec::with_capacity(nl + 1);
        for j in 0..nl {
            if nl % 2 == 0 && j == half {
                match self.nyquist {
                    NyquistPolicy::Positive => out.push((j, j, 1.0)),
                    NyquistPolicy::Split => {
                        out.push((j, j, 0.5));
                        out.push((j, n - j, 0.5));
                    }
                }
            } else if j <= half {
                out.push((j, j, 1.0));
            } else {
                out.push((j, n - (nl - j), 1.0));
            }
        }
        out
    }
}

/// Length-`N` coefficients: the gain on the bins holding the low-rate
/// spectrum, zero elsewhere.
pub fn interp_filter_coeffs(cfg: &InterpConfig) -> DftFilterCoeffs {
    let mut h = vec![Complex64::new(0.0, 0.0); cfg.block_len];
    for (_, k, w) in cfg.allocation() {
        h[k] += Complex64::new(w * cfg.gain_value(), 0.0);
    }
    DftFilterCoeffs::from_values(h).expect("N >= 1")
}

/// Zero insertion: `u(Pm) = x(m)`, zero elsewhere.
pub fn upsample(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    let mut u = vec![Complex64::new(0.0, 0.0); x.len() * factor];
    for (m, v) in x.iter().enumerate() {
        u[m * factor] = *v;
    }
    u
}

fn check_input(x: &[Complex64], cfg: &InterpConfig) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let nl = cfg.input_block_len();
    if !x.len().is_multiple_of(nl) {
        return Err(Error::Dimension {
            expected: x.len().div_ceil(nl) * nl,
            actual: x.len(),
        });
    }
    check_finite(x)
}

/// Interpolate by upsampling and running the `L = M = N` engine.
/// The output has `P * len(x)` samples.
pub fn zero_pad_interpolate(
    x: &[Complex64],
    cfg: &InterpConfig,
    spec: &QuantizationSpec,
) -> Result<Vec<Complex64>> {
    check_input(x, cfg)?;
    let coeffs = interp_filter_coeffs(cfg);
    let coeffs = DftFilterCoeffs::from_values(
        coeffs
            .as_slice()
            .iter()
            .map(|&v| spec.apply(QuantTarget::DftFilterCoeffs, v))
            .collect(),
    )?;
    let mut engine = BlockEngine::new(&coeffs, cfg.block_config(), spec)?;
    let mut y = engine.run(&upsample(x, cfg.factor));
    y.truncate(x.len() * cfg.factor);
    Ok(y)
}

/// Interpolate block by block: length-`N/P` DFT, reallocation of the bins
/// into a length-`N` spectrum, length-`N` IDFT. Unquantized.
pub fn blockwise_interpolate(x: &[Complex64], cfg: &InterpConfig) -> Result<Vec<Complex64>> {
    check_input(x, cfg)?;
    let (n, nl) = (cfg.block_len, cfg.input_block_len());
    let alloc = cfg.allocation();
    let gain = cfg.gain_value();
    let mut y = Vec::with_capacity(x.len() * cfg.factor);
    for block in x.chunks(nl) {
        let low = dft_exact(block, -1);
        let mut high = vec![Complex64::new(0.0, 0.0); n];
        for &(j, k, w) in &alloc {
            high[k] += low[j] * (w * gain);
        }
        y.extend(dft_exact(&high, 1).into_iter().map(|v| v / n as f64));
    }
    Ok(y)
}

fn dft_exact(x: &[Complex64], sign: i64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| v * crate::numerics::unit_root(sign * (k * t) as i64, n))
                .sum()
        })
        .collect()
}

/// Signal-to-noise-and-distortion ratio of `y` against `reference`, in dB.
///
/// For each delay `d in 0..=max_delay`, `y(t + d)` is compared with
/// `reference(t)` after a least-squares complex gain `g`:
/// `10 log10(|g|^2 sum |ref|^2 / sum |y - g ref|^2)`. The best delay wins.
/// An exact match reports [`SNDR_CAP_DB`].
pub fn sndr(y: &[Complex64], reference: &[Complex64], max_delay: usize) -> Result<f64> {
    if y.len() != reference.len() {
        return Err(Error::Dimension {
            expected: reference.len(),
            actual: y.len(),
        });
    }
    if reference.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::Undefined("SNDR against an all-zero reference"));
    }
    let mut best = f64::NEG_INFINITY;
    for d in 0..=max_delay.min(y.len().saturating_sub(1)) {
        let ys = &y[d..];
        let rs = &reference[..ys.len()];
        let rr: f64 = rs.iter().map(|v| v.norm_sqr()).sum();
        if rr == 0.0 {
            continue;
        }
        let g: Complex64 = rs.iter().zip(ys).map(|(r, v)| r.conj() * v).sum::<Complex64>() / rr;
        let err: f64 = rs.iter().zip(ys).map(|(r, v)| (v - g * r).norm_sqr()).sum();
        let sig = g.norm_sqr() * rr;
        let db = if err == 0.0 {
            SNDR_CAP_DB
        } else if sig == 0.0 {
            f64::NEG_INFINITY
        } else {
            (10.0 * (sig / err).log10()).min(SNDR_CAP_DB)
        };
        best = best.max(db);
    }
    Ok(best)
}

/// `e^{j omega t}` for `t = 0..len`.
pub fn tone(omega: f64, len: usize) -> Vec<Complex64> {
    (0..len).map(|t| Complex64::from_polar(1.0, omega * t as f64)).collect()
}

/// Complex circular Gaussian noise of the given total power per sample.
pub fn complex_noise(len: usize, power: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let sigma = (power / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * sigma
        })
        .collect()
}

/// A unit tone plus noise at `snr_db` below it.
pub fn noisy_tone(omega: f64, len: usize, snr_db: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let noise = complex_noise(len, 10f64.powf(-snr_db / 10.0), rng);
    tone(omega, len).into_iter().zip(noise).map(|(s, e)| s + e).collect()
}

/// One row of an SNDR sweep; `omega` is the high-rate frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub omega: f64,
    pub sndr_db: f64,
}

/// Settings shared by every frequency of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    /// Input length in low-rate blocks of `N/P` samples.
    pub blocks: usize,
    pub seed: u64,
    pub spec: QuantizationSpec,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            blocks: 64,
            seed: 0,
            spec: QuantizationSpec::none(),
        }
    }
}

/// SNDR of interpolating a noisy tone at each high-rate frequency in
/// `omegas` (expected in `(-pi/P, pi/P)`). The ideal output is the
/// noise-free tone at the high rate. Frequency `i` draws its noise from
/// stream `i` of a ChaCha8 generator seeded with `opts.seed`.
pub fn sndr_sweep(
    cfg: &InterpConfig,
    snr_db: f64,
    omegas: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepPoint>> {
    if opts.blocks == 0 {
        return Err(Error::config("a sweep needs at least one block"));
    }
    let low_len = opts.blocks * cfg.input_block_len();
    omegas
        .iter()
        .enumerate()
        .map(|(i, &omega)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let x = noisy_tone(omega * cfg.factor as f64, low_len, snr_db, &mut rng);
            let y = zero_pad_interpolate(&x, cfg, &opts.spec)?;
            let reference = tone(omega, y.len());
            Ok(SweepPoint {
                omega,
                sndr_db: sndr(&y, &reference, cfg.block_len)?,
            })
        })
        .collect()
}

/// `omega` at the centre between bins `k` and `k + 1` of an `N`-point DFT.
pub fn mid_bin(k: usize, block_len: usize) -> f64 {
    2.0 * PI * (k as f64 + 0.5) / block_len as f64
}

/// `c_s = mean_t y(t) e^{-j(omega0 + 2 pi s / N) t}` for `s = 0..N`.
///
/// `y` should span whole blocks of `N` samples so that the lines are
/// orthogonal.
pub fn tone_lines(y: &[Complex64], omega0: f64, block_len: usize) -> Vec<Complex64> {
    let inv = 1.0 / y.len() as f64;
    (0..block_len)
        .map(|s| {
            let w = omega0 + 2.0 * PI * s as f64 / block_len as f64;
            y.iter()
                .enumerate()
                .map(|(t, v)| v * Complex64::from_polar(1.0, -w * t as f64))
                .sum::<Complex64>()
                * inv
        })
        .collect()
}

/// Line amplitudes predicted from the distortion and aliasing functions for
/// a unit low-rate tone at high-rate frequency `omega0`.
///
/// The upsampled tone holds `P` components `(1/P) e^{j w_r t}`,
/// `w_r = omega0 + 2 pi r / P`. The engine equals the filter bank applied to
/// its input advanced by `N - 1` samples, so component `r` reaches line
/// `w_s = omega0 + 2 pi s / N` through `V_p` with `p = s - rN/P (mod N)`.
/// Every `w_s` must lie on `grid`.
pub fn predicted_tone_lines(
    cfg: &InterpConfig,
    omega0: f64,
    spec: &QuantizationSpec,
    grid: &SpectralGrid,
) -> Result<Vec<Complex64>> {
    let n = cfg.block_len;
    let p_fac = cfg.factor;
    let coeffs = DftFilterCoeffs::from_values(
        interp_filter_coeffs(cfg)
            .as_slice()
            .iter()
            .map(|&v| spec.apply(QuantTarget::DftFilterCoeffs, v))
            .collect(),
    )?;
    let bank = bank_filters(&cfg.block_config(), spec);
    let v = distortion_aliasing(&coeffs, &bank, grid)?;
    (0..n)
        .map(|s| {
            let ws = omega0 + 2.0 * PI * s as f64 / n as f64;
            let g = grid.index_of(ws).ok_or_else(|| {
                Error::config(format!("line frequency {ws} is not on the {}-point grid", grid.len()))
            })?;
            Ok((0..p_fac)
                .map(|r| {
                    let wr = omega0 + 2.0 * PI * r as f64 / p_fac as f64;
                    let p = (s + n - (r * n / p_fac) % n) % n;
                    v[p][g] * Complex64::from_polar(1.0 / p_fac as f64, wr * (n - 1) as f64)
                })
                .sum())
        })
        .collect()
}
