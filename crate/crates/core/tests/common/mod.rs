#![allow(dead_code)]

use blockconv::numerics::QuantTarget;
use blockconv::{
    bank_filters, dft_filter_coeffs, BankFilters, BlockConfig, BlockEngine, Complex64,
    DftFilterCoeffs, ImpulseResponse, Method, QuantizationSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference `h_n(q)` values, row `q`, column `n`, for the seven-tap fixture
/// with `L = 7`, `M = 4`, `N = 10` and 8 fractional bits.
pub const OLA_H_QUANTIZED: [[f64; 4]; 13] = [
    [0.000815299395028, 0.0, 0.0, 0.0],
    [0.000030422174521, 0.000030422174521, 0.0, 0.0],
    [0.000083095006610, 0.000083095006610, 0.000083095006610, 0.0],
    [-0.064843750000000, -0.064843750000000, -0.064843750000000, -0.064843750000000],
    [0.054418477371339, 0.054418477371339, 0.054418477371339, 0.054418477371339],
    [0.314709622812781, 0.314709622812781, 0.314709622812781, 0.314709622812781],
    [0.464214378227023, 0.464214378227023, 0.464214378227023, 0.464214378227023],
    [0.315733563910444, 0.315733563910444, 0.315733563910444, 0.315733563910444],
    [0.054687500000000, 0.054687500000000, 0.054687500000000, 0.054687500000000],
    [-0.065629858897746, -0.065629858897746, -0.065629858897746, -0.065629858897746],
    [0.000815299395028, 0.000815299395028, 0.0, 0.000815299395028],
    [0.000030422174521, 0.000030422174521, 0.0, 0.0],
    [0.0, 0.000083095006611, 0.0, 0.0],
];

pub const OLS_H_QUANTIZED: [[f64; 4]; 13] = [
    [0.000815299395028, 0.0, 0.0, 0.0],
    [0.000030422174521, 0.000030422174521, 0.0, 0.0],
    [0.000083095006610, 0.000083095006610, 0.000083095006610, 0.0],
    [-0.064843750000000, -0.064843750000000, -0.064843750000000, -0.064843750000000],
    [0.054418477371339, 0.054418477371339, 0.054418477371339, 0.054418477371339],
    [0.314709622812781, 0.314709622812781, 0.314709622812781, 0.314709622812781],
    [0.464214378227023, 0.464214378227023, 0.464214378227023, 0.464214378227023],
    [0.315733563910444, 0.315733563910444, 0.315733563910444, 0.315733563910444],
    [0.054687500000000, 0.054687500000000, 0.054687500000000, 0.054687500000000],
    [-0.065629858897746, -0.065629858897746, -0.065629858897746, -0.065629858897746],
    [0.0, 0.000815299395028, 0.000815299395028, 0.000815299395028],
    [0.0, 0.0, 0.000030422174521, 0.000030422174521],
    [0.0, 0.0, 0.0, 0.000083095006610],
];

pub const OLS_ALL_QUANTIZED: [[f64; 4]; 13] = [
    [0.001343357563019, 0.0, 0.0, 0.0],
    [0.000361371040344, 0.000361371040344, 0.0, 0.0],
    [0.000538158416748, 0.000160551071167, 0.000538158416748, 0.0],
    [-0.064286172389984, -0.064312195777893, -0.064312195777893, -0.064286172389984],
    [0.054309082031250, 0.054947161674500, 0.054378080368042, 0.054947161674499],
    [0.313703811168671, 0.314443969726562, 0.314058876037598, 0.314058876037598],
    [0.463059282302857, 0.463059282302857, 0.463626098632813, 0.463081991672516],
    [0.315321087837219, 0.314716339111328, 0.315321087837219, 0.315228271484375],
    [0.054968869686127, 0.054803586006165, 0.054803586006165, 0.054968869686127],
    [-0.065100097656250, -0.065209484100342, -0.065339374542236, -0.065209484100342],
    [0.0, 0.001248168945313, 0.000872826576233, 0.000872826576233],
    [0.0, 0.0, 0.000271606445313, 0.000208508968353],
    [0.0, 0.0, 0.0, 0.000347900390625],
];
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn random_real(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect()
}

pub fn max_rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    blockconv::numerics::max_abs_diff(a, b) / scale
}

/// Everything needed to analyse one engine configuration.
pub struct Setup {
    pub cfg: BlockConfig,
    pub spec: QuantizationSpec,
    pub coeffs: DftFilterCoeffs,
    pub bank: BankFilters,
    pub engine: BlockEngine,
}

pub fn setup(h: &[Complex64], method: Method, m: usize, n: usize, spec: QuantizationSpec) -> Setup {
    let h = ImpulseResponse::new(h.to_vec()).unwrap();
    let cfg = BlockConfig::new(method, h.len(), m, n).unwrap();
    let coeffs = dft_filter_coeffs(&h, n, &spec).unwrap();
    let bank = bank_filters(&cfg, &spec);
    let engine = BlockEngine::new(&coeffs, cfg, &spec).unwrap();
    Setup {
        cfg,
        spec,
        coeffs,
        bank,
        engine,
    }
}

pub fn fixture_h() -> Vec<Complex64> {
    blockconv::design::TABLE2_H.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

pub fn h_only(bits: u32) -> QuantizationSpec {
    QuantizationSpec::coefficients_only(bits)
}

pub fn bank_only(bits: u32) -> QuantizationSpec {
    QuantizationSpec::new(bits, &[QuantTarget::AnalysisExponentials, QuantTarget::SynthesisExponentials])
}
