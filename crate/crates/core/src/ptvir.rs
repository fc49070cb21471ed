//! Periodically time-varying impulse-response (PTVIR) representation.
//!
//! A block engine with step `M` is an `M`-periodic linear system:
//! `y(t) = sum_q h_n(q) x(t - q)` with `n = t mod M`. Here `h_n` includes the
//! `M - 1` sample block-processing delay, so in the time-invariant case every
//! `h_n` is the designed filter delayed by `M - 1`.
//!
//! [`PtvirSet`] stores `d_n(q) = h_n(q + n)`, the response of `z^n H_n(z)`.
//! `h_n` has `n` structural leading zeros relative to `d_n`.
//!
//! Three independent routes produce the set:
//! * [`ptvir_from_bank`] multiplies each `G_k(z)` with the upsampled type-1
//!   polyphase component `F_kn(z^M)` and sums over channels;
//! * [`dn_closed_form`] evaluates each `d_n(q)` directly, using the fact that
//!   only one shifted copy of `g_k` overlaps any `q`;
//! * [`ptvir_probe`] feeds unit impulses through a real [`BlockEngine`].

use num_complex::Complex64;

use crate::block_conv::{BlockEngine, DftFilterCoeffs, Method};
use crate::error::{Error, Result};
use crate::mfb::{freq_response, BankFilters, SpectralGrid};

/// Relative threshold for effective-length trimming.
pub const DEFAULT_LENGTH_EPS: f64 = 1e-12;

/// Order `K_{F_n}` of the polyphase component `F_kn(z)`.
pub fn polyphase_order(method: Method, dft_len: usize, period: usize, n: usize) -> usize {
    match method {
        Method::OverlapAdd => (dft_len - 1 - n) / period,
        Method::OverlapSave => 0,
    }
}

/// Effective order `K_n` of `z^n H_n(z)`.
pub fn effective_order(method: Method, dft_len: usize, period: usize, n: usize) -> usize {
    match method {
        Method::OverlapAdd => period - 1 + polyphase_order(method, dft_len, period, n) * period,
        Method::OverlapSave => dft_len - 1,
    }
}

/// The `M` impulse responses of an `M`-periodic block system.
#[derive(Clone, Debug, PartialEq)]
pub struct PtvirSet {
    method: Method,
    period: usize,
    dft_len: usize,
    d: Vec<Vec<Complex64>>,
}

impl PtvirSet {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn dft_len(&self) -> usize {
        self.dft_len
    }

    /// `d_n(q)`, stored at full length with explicit zeros.
    pub fn d(&self, n: usize) -> &[Complex64] {
        &self.d[n]
    }

    pub fn d_all(&self) -> &[Vec<Complex64>] {
        &self.d
    }

    /// `h_n(q) = d_n(q - n)`.
    pub fn h(&self, n: usize) -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); n];
        h.extend_from_slice(&self.d[n]);
        h
    }

    /// All `h_n` zero-extended to a common length (at least `N + M - 1`).
    pub fn h_matrix(&self) -> Vec<Vec<Complex64>> {
        let len = (0..self.period)
            .map(|n| n + self.d[n].len())
            .max()
            .unwrap_or(0)
            .max(self.dft_len + self.period - 1);
        (0..self.period)
            .map(|n| {
                let mut h = self.h(n);
                h.resize(len, Complex64::new(0.0, 0.0));
                h
            })
            .collect()
    }

    /// Effective lengths of all `d_n` at relative threshold `eps`.
    pub fn effective_lengths(&self, eps: f64) -> Vec<EffectiveLength> {
        self.d.iter().map(|d| effective_length(d, eps)).collect()
    }

    /// `H_n(e^{jw})` on `grid` for every `n`.
    pub fn frequency_responses(&self, grid: &SpectralGrid) -> Vec<Vec<Complex64>> {
        (0..self.period).map(|n| freq_response(&self.h(n), grid)).collect()
    }

    /// Largest `|d_n(q) - other.d_n(q)|` over all `n` and `q`.
    pub fn max_deviation(&self, other: &PtvirSet) -> f64 {
        self.d
            .iter()
            .zip(&other.d)
            .map(|(a, b)| crate::numerics::max_abs_diff(a, b))
            .fold(if self.period == other.period { 0.0 } else { f64::INFINITY }, f64::max)
    }
}

fn check_coeffs(coeffs: &DftFilterCoeffs, bank: &BankFilters) -> Result<()> {
    if coeffs.len() != bank.channels() {
        return Err(Error::Dimension {
            expected: bank.channels(),
            actual: coeffs.len(),
        });
    }
    Ok(())
}

/// `H_n(z) = z^{-n} sum_k H(k) G_k(z) F_kn(z^M)` by polynomial multiplication.
pub fn ptvir_from_bank(coeffs: &DftFilterCoeffs, bank: &BankFilters) -> Result<PtvirSet> {
    check_coeffs(coeffs, bank)?;
    let cfg = bank.config();
    let (m, n_dft) = (cfg.step(), cfg.dft_len());
    let d = (0..m)
        .map(|n| {
            let len = effective_order(cfg.method(), n_dft, m, n) + 1;
            let mut d = vec![Complex64::new(0.0, 0.0); len];
            for (k, &hk) in coeffs.as_slice().iter().enumerate() {
                let g = bank.analysis(k);
                // type-1 polyphase component n: f_k(n), f_k(n + M), ...
                for (r, f) in bank.synthesis(k).iter().skip(n).step_by(m).enumerate() {
                    let scaled = hk * f;
                    for (i, gv) in g.iter().enumerate() {
                        d[i + r * m] += scaled * gv;
                    }
                }
            }
            d
        })
        .collect();
    Ok(PtvirSet {
        method: cfg.method(),
        period: m,
        dft_len: n_dft,
        d,
    })
}

/// `d_n(q)` evaluated sample by sample.
///
/// Overlap-add: `d_n(q) = sum_k H(k) g_k(q mod M) f_k(n + floor(q/M) M)`, the
/// only surviving term of `sum_r g_k(q - rM) f_k(n + rM)`.
/// Overlap-save: `d_n(q) = sum_k H(k) g_k(q) f_k(n)`.
pub fn dn_closed_form(coeffs: &DftFilterCoeffs, bank: &BankFilters, n: usize) -> Result<Vec<Complex64>> {
    check_coeffs(coeffs, bank)?;
    let cfg = bank.config();
    let (m, n_dft) = (cfg.step(), cfg.dft_len());
    if n >= m {
        return Err(Error::Domain(format!("phase n = {n} must be below M = {m}")));
    }
    let len = effective_order(cfg.method(), n_dft, m, n) + 1;
    let h = coeffs.as_slice();
    Ok((0..len)
        .map(|q| {
            (0..n_dft)
                .map(|k| match cfg.method() {
                    Method::OverlapAdd => {
                        h[k] * bank.analysis(k)[q % m] * bank.synthesis(k)[n + (q / m) * m]
                    }
                    Method::OverlapSave => h[k] * bank.analysis(k)[q] * bank.synthesis(k)[n],
                })
                .sum()
        })
        .collect())
}

/// All `d_n` via [`dn_closed_form`].
pub fn ptvir_closed_form(coeffs: &DftFilterCoeffs, bank: &BankFilters) -> Result<PtvirSet> {
    let cfg = bank.config();
    let d = (0..cfg.step())
        .map(|n| dn_closed_form(coeffs, bank, n))
        .collect::<Result<_>>()?;
    Ok(PtvirSet {
        method: cfg.method(),
        period: cfg.step(),
        dft_len: cfg.dft_len(),
        d,
    })
}

/// Measure the PTVIR of a running engine with unit impulses.
///
/// An impulse at `n0 in 0..M` yields `y(t) = h_t(t - n0 + M - 1)`; every
/// `(n, q)` pair is reached by exactly one `n0`. Outputs at negative `t`
/// would belong to an earlier block than the impulse and are zero.
/// `horizon` is the number of output samples recorded per impulse and must be
/// at least `N + M`.
pub fn ptvir_probe(engine: &BlockEngine, horizon: usize) -> Result<PtvirSet> {
    let cfg = *engine.config();
    let (m, n_dft) = (cfg.step(), cfg.dft_len());
    let required = n_dft + m;
    if horizon < required {
        return Err(Error::Truncation { horizon, required });
    }
    let responses: Vec<Vec<Complex64>> = (0..m)
        .map(|n0| {
            let mut probe = engine.clone();
            probe.reset();
            let mut x = vec![Complex64::new(0.0, 0.0); horizon];
            x[n0] = Complex64::new(1.0, 0.0);
            let mut y = probe.run(&x);
            y.truncate(horizon);
            y
        })
        .collect();
    let h_len = n_dft + m - 1;
    let d = (0..m)
        .map(|n| {
            (n..h_len)
                .map(|q| {
                    let n0 = (n + 2 * m - 1 - q % m) % m;
                    let t = (n0 + q) as isize - (m as isize - 1);
                    if t < 0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        responses[n0][t as usize]
                    }
                })
                .collect()
        })
        .collect();
    Ok(PtvirSet {
        method: cfg.method(),
        period: m,
        dft_len: n_dft,
        d,
    })
}

/// Support of a sequence above a relative threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EffectiveLength {
    pub first: Option<usize>,
    pub last: Option<usize>,
    pub length: usize,
}

/// First and last index with `|d(q)| > eps * max|d|`; length 0 for all-zero input.
pub fn effective_length(d: &[Complex64], eps: f64) -> EffectiveLength {
    let peak = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return EffectiveLength {
            first: None,
            last: None,
            length: 0,
        };
    }
    let threshold = eps * peak;
    let first = d.iter().position(|v| v.norm() > threshold);
    let last = d.iter().rposition(|v| v.norm() > threshold);
    let length = match (first, last) {
        (Some(a), Some(b)) => b - a + 1,
        _ => 0,
    };
    EffectiveLength { first, last, length }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftCheck {
    pub circular: bool,
    pub max_deviation: f64,
}

/// Are all `d_n` circular left-shifts of one another?
///
/// Checks `d_{n+m}(q) = d_n((q + m) mod N)` for every pair with `n + m < M`
/// and every `q < N`. Samples of any `d_n` at `q >= N` count as deviations.
pub fn circular_shift_check(set: &PtvirSet, eps: f64) -> ShiftCheck {
    let n_dft = set.dft_len;
    let len = set.d.iter().map(Vec::len).max().unwrap_or(0).max(n_dft);
    let at = |n: usize, q: usize| set.d[n].get(q).copied().unwrap_or_default();
    let mut worst: f64 = 0.0;
    for n in 0..set.period {
        for shift in 0..set.period - n {
            for q in 0..len {
                let expected = if q < n_dft { at(n, (q + shift) % n_dft) } else { Complex64::default() };
                worst = worst.max((at(n + shift, q) - expected).norm());
            }
        }
    }
    ShiftCheck {
        circular: worst <= eps,
        max_deviation: worst,
    }
}

/// `V_p(w) = (1/M) sum_n H_n(w - 2 pi p/M) e^{-j 2 pi p n / M}` on `grid`.
///
/// The grid size must be a multiple of `M` (see [`SpectralGrid::with_period`]).
pub fn vp_from_hn(set: &PtvirSet, grid: &SpectralGrid) -> Result<Vec<Vec<Complex64>>> {
    let (m, g) = (set.period, grid.len());
    if g % m != 0 {
        return Err(Error::config(format!(
            "grid size {g} is not a multiple of the period M = {m}"
        )));
    }
    let responses = set.frequency_responses(grid);
    let shift = g / m;
    let inv_m = 1.0 / m as f64;
    Ok((0..m)
        .map(|p| {
            let mut v = vec![Complex64::new(0.0, 0.0); g];
            for (n, resp) in responses.iter().enumerate() {
                let rot = crate::numerics::unit_root(-((p * n) as i64), m) * inv_m;
                for (idx, acc) in v.iter_mut().enumerate() {
                    *acc += resp[(idx + g - p * shift) % g] * rot;
                }
            }
            v
        })
        .collect())
}
