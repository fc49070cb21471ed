//! Overlap-add and overlap-save block convolution.
//!
//! [`BlockEngine`] is the streaming form: push blocks of `M` input samples,
//! get `M` output samples back. Output block `j` holds `y(jM) .. y(jM + M - 1)`,
//! so indices line up with [`direct_convolve`]; in real time this costs a
//! latency of `M - 1` samples because the whole input block must be present
//! before the first of its outputs can be produced.
//!
//! The batch helpers [`ola_process`] and [`ols_process`] return exactly
//! `len(x) + L - 1` samples aligned with direct convolution.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerics::{check_finite, unit_root, DftMatrix, QuantTarget, QuantizationSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    OverlapAdd,
    OverlapSave,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::OverlapAdd => "overlap-add",
            Method::OverlapSave => "overlap-save",
        })
    }
}

/// The `(L, M, N)` triple plus the segmentation method.
///
/// `M` is the input-segment length for overlap-add and the output-segment
/// length for overlap-save. The configuration is valid for any `N >= L` and
/// `N >= M`; linear convolution is only reproduced exactly when
/// `N >= L + M - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockConfig {
    method: Method,
    filter_len: usize,
    step: usize,
    dft_len: usize,
}

impl BlockConfig {
    pub fn new(method: Method, filter_len: usize, step: usize, dft_len: usize) -> Result<Self> {
        if filter_len == 0 || step == 0 {
            return Err(Error::config("L and M must be at least 1"));
        }
        if dft_len < filter_len {
            return Err(Error::config(format!(
                "DFT length N = {dft_len} is shorter than the filter length L = {filter_len}"
            )));
        }
        if dft_len < step {
            return Err(Error::config(format!(
                "DFT length N = {dft_len} is shorter than the block step M = {step}"
            )));
        }
        Ok(Self {
            method,
            filter_len,
            step,
            dft_len,
        })
    }

    /// `N = L + M - 1`, the smallest DFT that reproduces linear convolution.
    pub fn minimal(method: Method, filter_len: usize, step: usize) -> Result<Self> {
        Self::new(method, filter_len, step, filter_len + step - 1)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `L`
    pub fn filter_len(&self) -> usize {
        self.filter_len
    }

    /// `M`
    pub fn step(&self) -> usize {
        self.step
    }

    /// `N`
    pub fn dft_len(&self) -> usize {
        self.dft_len
    }

    pub fn is_exact(&self) -> bool {
        self.dft_len >= self.filter_len + self.step - 1
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// FIR impulse response `h(n)` of declared length `L >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpulseResponse(Vec<Complex64>);

impl ImpulseResponse {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        check_finite(&coeffs)?;
        Ok(Self(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

/// The `N` (possibly quantized) DFT filter coefficients `H(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DftFilterCoeffs(Vec<Complex64>);

impl DftFilterCoeffs {
    /// Wrap an explicit coefficient vector, e.g. a frequency-domain design.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

/// `y(n) = sum_p h(p) x(n - p)`, output length `len(x) + L - 1`.
pub fn direct_convolve(h: &ImpulseResponse, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let h = h.as_slice();
    let mut y = vec![Complex64::new(0.0, 0.0); x.len() + h.len() - 1];
    for (n, out) in y.iter_mut().enumerate() {
        let lo = n.saturating_sub(x.len() - 1);
        let hi = n.min(h.len() - 1);
        for p in lo..=hi {
            *out += h[p] * x[n - p];
        }
    }
    Ok(y)
}

/// Zero-pad `h` to `N`, take the exact `N`-point DFT, then quantize when
/// [`QuantTarget::DftFilterCoeffs`] is active.
pub fn dft_filter_coeffs(
    h: &ImpulseResponse,
    dft_len: usize,
    spec: &QuantizationSpec,
) -> Result<DftFilterCoeffs> {
    if dft_len < h.len() {
        return Err(Error::config(format!(
            "DFT length N = {dft_len} is shorter than the filter length L = {}",
            h.len()
        )));
    }
    let values = (0..dft_len)
        .map(|k| {
            let exact = h
                .as_slice()
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (n, v)| {
                    acc + v * unit_root(-((n * k) as i64), dft_len)
                });
            spec.apply(QuantTarget::DftFilterCoeffs, exact)
        })
        .collect();
    Ok(DftFilterCoeffs(values))
}

#[derive(Clone)]
enum Transform {
    // unquantized power-of-two lengths
    Fast {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Matrix(DftMatrix),
}

impl Transform {
    fn new(n: usize, spec: &QuantizationSpec) -> Result<Self> {
        let exact_exponentials = !spec.is_active(QuantTarget::AnalysisExponentials)
            && !spec.is_active(QuantTarget::SynthesisExponentials);
        if exact_exponentials && n.is_power_of_two() {
            let mut planner = FftPlanner::new();
            Ok(Transform::Fast {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        } else {
            Ok(Transform::Matrix(DftMatrix::from_spec(n, spec)?))
        }
    }

    /// IDFT(H .* DFT(segment))
    fn filter_segment(&self, coeffs: &[Complex64], segment: &mut Vec<Complex64>) {
        match self {
            Transform::Fast { forward, inverse } => {
                forward.process(segment);
                for (v, h) in segment.iter_mut().zip(coeffs) {
                    *v *= h;
                }
                inverse.process(segment);
                let scale = 1.0 / segment.len() as f64;
                segment.iter_mut().for_each(|v| *v *= scale);
            }
            Transform::Matrix(mat) => {
                let mut spectrum =
                    crate::numerics::dft(segment, mat).expect("segment length equals N");
                for (v, h) in spectrum.iter_mut().zip(coeffs) {
                    *v *= h;
                }
                *segment = crate::numerics::idft(&spectrum, mat).expect("segment length equals N");
            }
        }
    }
}

/// Stateful overlap-add / overlap-save engine.
///
/// Overlap-add keeps the `N - M` sample tail of the running output sum;
/// overlap-save keeps the last `N - M` input samples. Both start from zero
/// state, which is the same as `x(n) = 0` for `n < 0`.
#[derive(Clone)]
pub struct BlockEngine {
    cfg: BlockConfig,
    coeffs: Vec<Complex64>,
    transform: Transform,
    state: Vec<Complex64>,
}

impl fmt::Debug for BlockEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockEngine")
            .field("cfg", &self.cfg)
            .field("state", &self.state)
            .finish_non_exhaustive()
    }
}

impl BlockEngine {
    /// `coeffs` must already carry any `H(k)` quantization; `spec` controls
    /// the DFT/IDFT exponentials.
    pub fn new(coeffs: &DftFilterCoeffs, cfg: BlockConfig, spec: &QuantizationSpec) -> Result<Self> {
        if coeffs.len() != cfg.dft_len() {
            return Err(Error::Dimension {
                expected: cfg.dft_len(),
                actual: coeffs.len(),
            });
        }
        Ok(Self {
            cfg,
            coeffs: coeffs.as_slice().to_vec(),
            transform: Transform::new(cfg.dft_len(), spec)?,
            state: vec![Complex64::new(0.0, 0.0); cfg.dft_len() - cfg.step()],
        })
    }

    pub fn config(&self) -> &BlockConfig {
        &self.cfg
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    }

    /// Consume exactly `M` input samples and emit `M` output samples.
    pub fn push_block(&mut self, block: &[Complex64]) -> Result<Vec<Complex64>> {
        let (m, n) = (self.cfg.step(), self.cfg.dft_len());
        if block.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: block.len(),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        match self.cfg.method() {
            Method::OverlapAdd => {
                let mut segment = block.to_vec();
                segment.resize(n, zero);
                self.transform.filter_segment(&self.coeffs, &mut segment);
                for (acc, tail) in segment.iter_mut().zip(&self.state) {
                    *acc += tail;
                }
                let out = segment[..m].to_vec();
                self.state.copy_from_slice(&segment[m..]);
                Ok(out)
            }
            Method::OverlapSave => {
                let mut segment = Vec::with_capacity(n);
                segment.extend_from_slice(&self.state);
                segment.extend_from_slice(block);
                let keep = segment.len() - self.state.len();
                self.state.copy_from_slice(&segment[keep..]);
                self.transform.filter_segment(&self.coeffs, &mut segment);
                Ok(segment[n - m..].to_vec())
            }
        }
    }

    /// Samples still owed after the last pushed block: the `N - M` tail for
    /// overlap-add, and `N - 1` for overlap-save, whose last segment that
    /// still sees an input sample ends `N - 1` samples after it.
    pub fn tail_len(&self) -> usize {
        let (m, n) = (self.cfg.step(), self.cfg.dft_len());
        match self.cfg.method() {
            Method::OverlapAdd => n - m,
            Method::OverlapSave => n - 1,
        }
    }

    /// Emit the [`tail_len`](Self::tail_len) samples still owed and return
    /// to zero state.
    pub fn flush(&mut self) -> Vec<Complex64> {
        let m = self.cfg.step();
        let owed = self.tail_len();
        let out = match self.cfg.method() {
            Method::OverlapAdd => self.state.clone(),
            Method::OverlapSave => {
                let zeros = vec![Complex64::new(0.0, 0.0); m];
                let mut out = Vec::with_capacity(owed + m);
                while out.len() < owed {
                    out.extend(self.push_block(&zeros).expect("block has length M"));
                }
                out.truncate(owed);
                out
            }
        };
        self.reset();
        out
    }

    /// Push all of `x` (zero-padded to whole blocks) and flush.
    /// Returns `ceil(len/M) * M` samples plus the tail.
    pub fn run(&mut self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.cfg.step();
        let mut out = Vec::with_capacity(x.len() + self.cfg.dft_len());
        for chunk in x.chunks(m) {
            let y = if chunk.len() == m {
                self.push_block(chunk)
            } else {
                let mut padded = chunk.to_vec();
                padded.resize(m, Complex64::new(0.0, 0.0));
                self.push_block(&padded)
            };
            out.extend(y.expect("block has length M"));
        }
        out.extend(self.flush());
        out
    }
}

fn batch(
    coeffs: &DftFilterCoeffs,
    x: &[Complex64],
    cfg: &BlockConfig,
    spec: &QuantizationSpec,
) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    check_finite(x)?;
    let mut engine = BlockEngine::new(coeffs, *cfg, spec)?;
    let mut y = engine.run(x);
    y.resize(x.len() + cfg.filter_len() - 1, Complex64::new(0.0, 0.0));
    Ok(y)
}

/// Overlap-add filtering of a finite input, aligned with [`direct_convolve`].
pub fn ola_process(
    coeffs: &DftFilterCoeffs,
    x: &[Complex64],
    cfg: &BlockConfig,
    spec: &QuantizationSpec,
) -> Result<Vec<Complex64>> {
    if cfg.method() != Method::OverlapAdd {
        return Err(Error::config("ola_process needs an overlap-add configuration"));
    }
    batch(coeffs, x, cfg, spec)
}

/// Overlap-save filtering of a finite input, aligned with [`direct_convolve`].
pub fn ols_process(
    coeffs: &DftFilterCoeffs,
    x: &[Complex64],
    cfg: &BlockConfig,
    spec: &QuantizationSpec,
) -> Result<Vec<Complex64>> {
    if cfg.method() != Method::OverlapSave {
        return Err(Error::config("ols_process needs an overlap-save configuration"));
    }
    batch(coeffs, x, cfg, spec)
}

/// Dispatch on `cfg.method()`.
pub fn block_process(
    coeffs: &DftFilterCoeffs,
    x: &[Complex64],
    cfg: &BlockConfig,
    spec: &QuantizationSpec,
) -> Result<Vec<Complex64>> {
    batch(coeffs, x, cfg, spec)
}
