//! Block convolution with overlap-add and overlap-save, analysed as
//! periodically time-varying systems and multirate filter banks.
//!
//! * [`numerics`]: fixed-point quantization and (quantized) DFTs
//! * [`block_conv`]: streaming and batch OLA/OLS engines
//! * [`mfb`]: equivalent filter banks, distortion and aliasing functions
//! * [`ptvir`]: the `M` time-varying impulse responses of an engine
//! * [`complexity`]: multiplication-rate models and optimal DFT lengths
//! * [`interp`]: DFT zero-padding interpolation and SNDR
//! * [`design`]: embedded example filters

pub mod block_conv;
pub mod complexity;
pub mod design;
pub mod error;
pub mod interp;
pub mod mfb;
pub mod numerics;
pub mod ptvir;

pub use block_conv::{
    block_process, dft_filter_coeffs, direct_convolve, ola_process, ols_process, BlockConfig,
    BlockEngine, DftFilterCoeffs, ImpulseResponse, Method,
};
pub use complexity::{ArithmeticCase, ComplexityReport};
pub use error::{Error, Result};
pub use interp::InterpConfig;
pub use mfb::{bank_filters, distortion_aliasing, BankFilters, SpectralGrid};
pub use num_complex::Complex64;
pub use numerics::{QuantTarget, QuantizationSpec, Quantizer, RoundingMode};
pub use ptvir::{ptvir_closed_form, ptvir_from_bank, ptvir_probe, PtvirSet};
