//! Fixed-point coefficient quantizer and the DFT/IDFT kernels.
//!
//! Quantized transforms are modelled as full `N x N` matrices whose entries
//! are individually quantized complex exponentials. This is the model the
//! filter-bank and impulse-response analyses are built on: an analysis
//! exponential `g_k(n)` or synthesis exponential `f_k(n)` is bit-identical
//! to the matrix entry the streaming engine multiplies with.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Rounding rule applied independently to the real and imaginary parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Nearest multiple of `2^-B`, ties away from zero.
    #[default]
    HalfAwayFromZero,
    /// Two's complement truncation, i.e. rounding toward negative infinity.
    Truncate,
}

/// The three places where coefficients can be quantized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantTarget {
    /// The DFT filter coefficients `H(k)`.
    DftFilterCoeffs,
    /// Exponentials of the forward DFT, i.e. the analysis filters `g_k(n)`.
    AnalysisExponentials,
    /// Exponentials of the inverse DFT, i.e. the synthesis filters `f_k(n)`.
    SynthesisExponentials,
}

impl QuantTarget {
    pub const ALL: [QuantTarget; 3] = [
        QuantTarget::DftFilterCoeffs,
        QuantTarget::AnalysisExponentials,
        QuantTarget::SynthesisExponentials,
    ];

    fn bit(self) -> u8 {
        match self {
            QuantTarget::DftFilterCoeffs => 1,
            QuantTarget::AnalysisExponentials => 2,
            QuantTarget::SynthesisExponentials => 4,
        }
    }
}

/// Uniform quantizer with `fractional_bits` bits after the binary point.
/// No saturation is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Quantizer {
    pub fractional_bits: u32,
    pub mode: RoundingMode,
}

impl Quantizer {
    pub fn new(fractional_bits: u32, mode: RoundingMode) -> Self {
        Self {
            fractional_bits,
            mode,
        }
    }

    /// Quantization step `2^-B`.
    pub fn step(&self) -> f64 {
        (-(self.fractional_bits as f64)).exp2()
    }

    pub fn quantize_real(&self, v: f64) -> f64 {
        let scale = (self.fractional_bits as f64).exp2();
        let scaled = v * scale;
        let level = match self.mode {
            RoundingMode::HalfAwayFromZero => scaled.round(),
            RoundingMode::Truncate => scaled.floor(),
        };
        level / scale
    }

    pub fn quantize(&self, v: Complex64) -> Complex64 {
        Complex64::new(self.quantize_real(v.re), self.quantize_real(v.im))
    }
}

/// Free-function form of [`Quantizer::quantize`].
pub fn quantize(v: Complex64, quantizer: &Quantizer) -> Complex64 {
    quantizer.quantize(v)
}

/// Which coefficient sets are quantized, and how.
///
/// An empty target set means infinite precision everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuantizationSpec {
    pub fractional_bits: u32,
    pub mode: RoundingMode,
    targets: u8,
}

impl Default for QuantizationSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl QuantizationSpec {
    /// Infinite precision.
    pub fn none() -> Self {
        Self {
            fractional_bits: 0,
            mode: RoundingMode::default(),
            targets: 0,
        }
    }

    /// Quantize the given targets to `fractional_bits` with the default rounding mode.
    pub fn new(fractional_bits: u32, targets: &[QuantTarget]) -> Self {
        let mut spec = Self {
            fractional_bits,
            mode: RoundingMode::default(),
            targets: 0,
        };
        for &t in targets {
            spec.targets |= t.bit();
        }
        spec
    }

    /// Quantize `H(k)` only; the DFT/IDFT exponentials stay exact.
    pub fn coefficients_only(fractional_bits: u32) -> Self {
        Self::new(fractional_bits, &[QuantTarget::DftFilterCoeffs])
    }

    /// Quantize `H(k)` and both sets of exponentials.
    pub fn all(fractional_bits: u32) -> Self {
        Self::new(fractional_bits, &QuantTarget::ALL)
    }

    pub fn with_mode(mut self, mode: RoundingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_target(mut self, target: QuantTarget) -> Self {
        self.targets |= target.bit();
        self
    }

    pub fn is_active(&self, target: QuantTarget) -> bool {
        self.targets & target.bit() != 0
    }

    pub fn is_empty(&self) -> bool {
        self.targets == 0
    }

    pub fn targets(&self) -> Vec<QuantTarget> {
        QuantTarget::ALL
            .into_iter()
            .filter(|t| self.is_active(*t))
            .collect()
    }

    /// The quantizer to use in `target`'s context, if any.
    pub fn quantizer_for(&self, target: QuantTarget) -> Option<Quantizer> {
        self.is_active(target)
            .then(|| Quantizer::new(self.fractional_bits, self.mode))
    }

    /// Quantize `v` if `target` is in the set, identity otherwise.
    pub fn apply(&self, target: QuantTarget, v: Complex64) -> Complex64 {
        match self.quantizer_for(target) {
            Some(q) => q.quantize(v),
            None => v,
        }
    }
}

/// `e^{j 2 pi r / n}` with `r` reduced modulo `n` first.
///
/// Every exponential in the crate is produced here, so two code paths that
/// refer to the same root of unity get the same bits. Quarter turns are exact.
pub fn unit_root(r: i64, n: usize) -> Complex64 {
    let n_i = n as i64;
    let r = r.rem_euclid(n_i);
    if (4 * r) % n_i == 0 {
        return match (4 * r) / n_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = 2.0 * PI * (r as f64) / (n as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// Error unless every sample is finite.
pub fn check_finite(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Forward and inverse DFT matrices, optionally with quantized exponentials.
///
/// `forward(k, n) = Q(e^{-j2pi kn/N})` and `inverse(n, k) = Q(e^{j2pi kn/N}) / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DftMatrix {
    size: usize,
    forward: Vec<Complex64>,
    inverse: Vec<Complex64>,
}

impl DftMatrix {
    pub fn new(
        size: usize,
        forward_quantizer: Option<Quantizer>,
        inverse_quantizer: Option<Quantizer>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::config("DFT size must be at least 1"));
        }
        let q = |v: Complex64, quant: &Option<Quantizer>| match quant {
            Some(q) => q.quantize(v),
            None => v,
        };
        let scale = 1.0 / size as f64;
        let mut forward = Vec::with_capacity(size * size);
        let mut inverse = Vec::with_capacity(size * size);
        for row in 0..size {
            for col in 0..size {
                let kn = (row * col) as i64;
                forward.push(q(unit_root(-kn, size), &forward_quantizer));
                inverse.push(q(unit_root(kn, size), &inverse_quantizer) * scale);
            }
        }
        Ok(Self {
            size,
            forward,
            inverse,
        })
    }

    pub fn exact(size: usize) -> Result<Self> {
        Self::new(size, None, None)
    }

    /// Analysis exponentials drive the forward matrix, synthesis exponentials the inverse.
    pub fn from_spec(size: usize, spec: &QuantizationSpec) -> Result<Self> {
        Self::new(
            size,
            spec.quantizer_for(QuantTarget::AnalysisExponentials),
            spec.quantizer_for(QuantTarget::SynthesisExponentials),
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn forward(&self, k: usize, n: usize) -> Complex64 {
        self.forward[k * self.size + n]
    }

    pub fn inverse(&self, n: usize, k: usize) -> Complex64 {
        self.inverse[n * self.size + k]
    }

    fn apply(&self, matrix: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.size {
            return Err(Error::Dimension {
                expected: self.size,
                actual: x.len(),
            });
        }
        Ok(matrix
            .chunks_exact(self.size)
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (w, v)| acc + w * v)
            })
            .collect())
    }
}

/// `X(k) = sum_n forward(k, n) x(n)`, summed in ascending `n`.
pub fn dft(x: &[Complex64], mat: &DftMatrix) -> Result<Vec<Complex64>> {
    mat.apply(&mat.forward, x)
}

/// `x(n) = sum_k inverse(n, k) X(k)`, summed in ascending `k`.
pub fn idft(x: &[Complex64], mat: &DftMatrix) -> Result<Vec<Complex64>> {
    mat.apply(&mat.inverse, x)
}

/// Unquantized DFT for power-of-two lengths.
pub fn fast_dft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.is_empty() || !x.len().is_power_of_two() {
        return Err(Error::UnsupportedLength(x.len()));
    }
    let mut buf = x.to_vec();
    FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
    Ok(buf)
}

/// Unquantized IDFT (scaled by `1/N`) for power-of-two lengths.
pub fn fast_idft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.is_empty() || !x.len().is_power_of_two() {
        return Err(Error::UnsupportedLength(x.len()));
    }
    let mut buf = x.to_vec();
    FftPlanner::new().plan_fft_inverse(x.len()).process(&mut buf);
    let scale = 1.0 / x.len() as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    Ok(buf)
}

/// Largest `|a(i) - b(i)|`, treating the shorter sequence as zero-extended.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
