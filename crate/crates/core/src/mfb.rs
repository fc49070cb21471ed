//! Multirate filter-bank view of the block engines.
//!
//! Both methods are equivalent to an `N`-channel analysis/synthesis bank with
//! `M`-fold decimation and expansion, where channel `k` is scaled by `H(k)`.
//! The output spectrum is then
//! `Y(w) = sum_p V_p(w) X(w - 2 pi p / M)`, with `V_0` the distortion function
//! and `V_1 .. V_{M-1}` the aliasing functions.
//!
//! The analysis filters `g_k` and synthesis filters `f_k` stored in
//! [`BankFilters`] are the very exponentials the engine uses (quantized or
//! not), and their frequency responses are always evaluated as finite sums of
//! those stored sequences.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::block_conv::{BlockConfig, DftFilterCoeffs, Method};
use crate::error::{Error, Result};
use crate::numerics::{unit_root, QuantTarget, QuantizationSpec};

/// Floor used when reporting magnitudes in dB.
pub const DB_FLOOR: f64 = -200.0;

/// `20 log10 |v|`, clamped at [`DB_FLOOR`].
pub fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Analysis and synthesis filters of the equivalent filter bank.
#[derive(Clone, Debug, PartialEq)]
pub struct BankFilters {
    cfg: BlockConfig,
    analysis: Vec<Vec<Complex64>>,
    synthesis: Vec<Vec<Complex64>>,
}

impl BankFilters {
    pub fn config(&self) -> &BlockConfig {
        &self.cfg
    }

    pub fn method(&self) -> Method {
        self.cfg.method()
    }

    pub fn period(&self) -> usize {
        self.cfg.step()
    }

    pub fn channels(&self) -> usize {
        self.cfg.dft_len()
    }

    /// `g_k(n)`
    pub fn analysis(&self, k: usize) -> &[Complex64] {
        &self.analysis[k]
    }

    /// `f_k(n)`
    pub fn synthesis(&self, k: usize) -> &[Complex64] {
        &self.synthesis[k]
    }
}

/// Build `g_k` and `f_k` for `cfg`, quantizing the exponentials selected in `spec`.
///
/// Overlap-add: `g_k(n) = e^{j2pi(n-M+1)k/N}` (length `M`), `f_k(n) = e^{j2pi nk/N}/N`
/// (length `N`). Overlap-save: `g_k(n) = e^{j2pi(n+1)k/N}` (length `N`),
/// `f_k(n) = e^{j2pi(n-M)k/N}/N` (length `M`). The `1/N` is applied after
/// quantizing the exponential, as in the inverse DFT matrix.
pub fn bank_filters(cfg: &BlockConfig, spec: &QuantizationSpec) -> BankFilters {
    let (m, n) = (cfg.step() as i64, cfg.dft_len());
    let scale = 1.0 / n as f64;
    let (g_len, g_offset, f_len, f_offset) = match cfg.method() {
        Method::OverlapAdd => (m as usize, 1 - m, n, 0),
        Method::OverlapSave => (n, 1, m as usize, -m),
    };
    let mut analysis = Vec::with_capacity(n);
    let mut synthesis = Vec::with_capacity(n);
    for k in 0..n as i64 {
        analysis.push(
            (0..g_len as i64)
                .map(|i| spec.apply(QuantTarget::AnalysisExponentials, unit_root((i + g_offset) * k, n)))
                .collect(),
        );
        synthesis.push(
            (0..f_len as i64)
                .map(|i| {
                    spec.apply(QuantTarget::SynthesisExponentials, unit_root((i + f_offset) * k, n)) * scale
                })
                .collect(),
        );
    }
    BankFilters {
        cfg: *cfg,
        analysis,
        synthesis,
    }
}

/// Uniform frequency grid `w_g = 2 pi g / G`, `g = 0 .. G-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpectralGrid {
    points: usize,
}

impl SpectralGrid {
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::config("a spectral grid needs at least 2 points"));
        }
        Ok(Self { points })
    }

    /// At least `min_points` points, rounded up to a multiple of `period` so
    /// that shifts by `2 pi / period` are exact index rotations.
    pub fn with_period(min_points: usize, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::config("period must be at least 1"));
        }
        Self::new(min_points.max(2).div_ceil(period) * period)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn omega(&self, g: usize) -> f64 {
        2.0 * PI * g as f64 / self.points as f64
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.points).map(|g| self.omega(g)).collect()
    }

    /// Grid index of `omega` (mod 2 pi) when it falls on the grid.
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        let pos = omega.rem_euclid(2.0 * PI) * self.points as f64 / (2.0 * PI);
        let g = pos.round();
        ((pos - g).abs() < 1e-6).then_some(g as usize % self.points)
    }
}

/// `H(e^{jw}) = sum_n h(n) e^{-jwn}` on every grid point.
pub fn freq_response(h: &[Complex64], grid: &SpectralGrid) -> Vec<Complex64> {
    let g = grid.len();
    // e^{-j w_g n} only depends on n mod G
    let mut buf = vec![Complex64::new(0.0, 0.0); g];
    for (n, v) in h.iter().enumerate() {
        buf[n % g] += v;
    }
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    buf
}

/// `sum_n h(n) e^{-jwn}` at a single frequency.
pub fn freq_response_at(h: &[Complex64], omega: f64) -> Complex64 {
    h.iter()
        .enumerate()
        .map(|(n, v)| v * Complex64::from_polar(1.0, -omega * n as f64))
        .sum()
}

/// Distortion and aliasing functions `V_0 .. V_{M-1}` on `grid`:
/// `V_p(w) = (1/M) sum_k H(k) G_k(w - 2 pi p / M) F_k(w)`.
pub fn distortion_aliasing(
    coeffs: &DftFilterCoeffs,
    bank: &BankFilters,
    grid: &SpectralGrid,
) -> Result<Vec<Vec<Complex64>>> {
    let (m, n, g) = (bank.period(), bank.channels(), grid.len());
    if coeffs.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: coeffs.len(),
        });
    }
    if g < 2 * n {
        return Err(Error::config(format!(
            "grid of {g} points is too coarse for N = {n}; need at least {}",
            2 * n
        )));
    }
    let inv_m = 1.0 / m as f64;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); g]; m];
    for k in 0..n {
        let weight = coeffs.as_slice()[k] * inv_m;
        let f_resp = freq_response(bank.synthesis(k), grid);
        if g % m == 0 {
            let g_resp = freq_response(bank.analysis(k), grid);
            let shift = g / m;
            for (p, v) in out.iter_mut().enumerate() {
                for (idx, acc) in v.iter_mut().enumerate() {
                    let shifted = (idx + g - (p * shift) % g) % g;
                    *acc += weight * g_resp[shifted] * f_resp[idx];
                }
            }
        } else {
            for (p, v) in out.iter_mut().enumerate() {
                let offset = 2.0 * PI * p as f64 / m as f64;
                for (idx, acc) in v.iter_mut().enumerate() {
                    let gk = freq_response_at(bank.analysis(k), grid.omega(idx) - offset);
                    *acc += weight * gk * f_resp[idx];
                }
            }
        }
    }
    Ok(out)
}
