//! Arithmetic cost of direct and FFT-based block convolution.
//!
//! Costs are real multiplications per output sample. The FFT-based rate uses
//! a split-radix count of `N log2 N - 1.5 N + 4` per transform pair and
//! block, spread over the `N - L + 1` fresh outputs.

use std::fmt;

use crate::error::{Error, Result};

/// Data and filter type of a convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithmeticCase {
    Complex,
    ComplexSymmetric,
    Real,
    RealSymmetric,
}

impl ArithmeticCase {
    pub const ALL: [ArithmeticCase; 4] = [
        ArithmeticCase::Complex,
        ArithmeticCase::ComplexSymmetric,
        ArithmeticCase::Real,
        ArithmeticCase::RealSymmetric,
    ];

    pub fn is_complex(self) -> bool {
        matches!(self, ArithmeticCase::Complex | ArithmeticCase::ComplexSymmetric)
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, ArithmeticCase::ComplexSymmetric | ArithmeticCase::RealSymmetric)
    }
}

impl fmt::Display for ArithmeticCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithmeticCase::Complex => "complex",
            ArithmeticCase::ComplexSymmetric => "complex_symmetric",
            ArithmeticCase::Real => "real",
            ArithmeticCase::RealSymmetric => "real_symmetric",
        })
    }
}

impl std::str::FromStr for ArithmeticCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::config(format!("unknown arithmetic case '{s}'")))
    }
}

fn check_len(filter_len: usize) -> Result<()> {
    if filter_len == 0 {
        return Err(Error::Domain("filter length must be at least 1".into()));
    }
    Ok(())
}

/// Direct-form multiplications per output sample.
pub fn rate_td(filter_len: usize, case: ArithmeticCase) -> Result<f64> {
    check_len(filter_len)?;
    let l = filter_len;
    let half = l.div_ceil(2);
    Ok(match case {
        ArithmeticCase::Complex => 3 * l,
        ArithmeticCase::ComplexSymmetric => 3 * half,
        ArithmeticCase::Real => l,
        ArithmeticCase::RealSymmetric => half,
    } as f64)
}

/// FFT-based multiplications per output sample with DFT length `N`.
///
/// Requires `N >= L` so that each block yields at least one output, and
/// `N >= 2`.
pub fn rate_fd(filter_len: usize, dft_len: usize, case: ArithmeticCase) -> Result<f64> {
    check_len(filter_len)?;
    if dft_len < 2 || dft_len < filter_len {
        return Err(Error::Domain(format!(
            "DFT length {dft_len} leaves no valid outputs for L = {filter_len}"
        )));
    }
    let n = dft_len as f64;
    let per_block = n * n.log2() - 1.5 * n + 4.0;
    let rate = per_block / (dft_len - filter_len + 1) as f64;
    Ok(if case.is_complex() { 2.0 * rate } else { rate })
}

/// The power of two `N = 2^p`, `p <= p_max`, that minimizes [`rate_fd`].
/// Ties go to the smaller `N`.
pub fn best_pow2_n(filter_len: usize, case: ArithmeticCase, p_max: u32) -> Result<(usize, f64)> {
    check_len(filter_len)?;
    let mut best: Option<(usize, f64)> = None;
    for p in 1..=p_max {
        let n = 1usize << p;
        if n < filter_len {
            continue;
        }
        let r = rate_fd(filter_len, n, case)?;
        if best.is_none_or(|(_, b)| r < b) {
            best = Some((n, r));
        }
    }
    best.ok_or_else(|| Error::Domain(format!("no N <= 2^{p_max} fits L = {filter_len}")))
}

/// Default exponent cap for [`best_pow2_n`].
pub const DEFAULT_P_MAX: u32 = 24;

/// Root of `N = (L-1) ln N + C`, `C = (1 - 1.5 ln 2)(L - 1) + 4 ln 2`, where
/// the derivative of the real-case rate vanishes, found by Newton iteration.
///
/// Defined for `L >= 2`. Returns the real root and the iteration count.
pub fn newton_optimal_n(filter_len: usize) -> Result<(f64, usize)> {
    const MAX_ITER: usize = 100;
    if filter_len < 2 {
        return Err(Error::Domain("the continuous optimum needs L >= 2".into()));
    }
    let l = filter_len as f64;
    let c = optimum_constant(filter_len);
    let mut n = estimate_n_opt(filter_len)?.max(l).max(2.0);
    for iter in 1..=MAX_ITER {
        let f = n - (l - 1.0) * n.ln() - c;
        let df = 1.0 - (l - 1.0) / n;
        let step = f / df;
        n -= step;
        if !n.is_finite() || n <= 0.0 {
            break;
        }
        if step.abs() < 1e-9 {
            return Ok((n, iter));
        }
    }
    Err(Error::NoConvergence {
        filter_len,
        iterations: MAX_ITER,
    })
}

/// Real-valued optimum of the arbitrary-integer-`N` model (caller rounds).
pub fn optimal_n_integer(filter_len: usize) -> Result<f64> {
    newton_optimal_n(filter_len).map(|(n, _)| n)
}

/// The better of `floor` and `ceil` of [`optimal_n_integer`], with its rate.
pub fn optimal_n_rounded(filter_len: usize, case: ArithmeticCase) -> Result<(usize, f64)> {
    let root = optimal_n_integer(filter_len)?;
    let lo = (root.floor() as usize).max(filter_len).max(2);
    let hi = (root.ceil() as usize).max(lo);
    let r_lo = rate_fd(filter_len, lo, case)?;
    let r_hi = rate_fd(filter_len, hi, case)?;
    Ok(if r_hi < r_lo { (hi, r_hi) } else { (lo, r_lo) })
}

/// `C = (1 - 1.5 ln 2)(L - 1) + 4 ln 2`.
pub fn optimum_constant(filter_len: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    (1.0 - 1.5 * ln2) * (filter_len as f64 - 1.0) + 4.0 * ln2
}

/// Closed-form approximation of the optimal real-case rate.
///
/// The full form is
/// `(l + log2 l - 1.5 + 40/(9 L l)) / (1 - 1/l + 10/(9 L l))` with
/// `l = log2 L`; the simplified form is `1.3 log2 L`.
pub fn estimate_rate(filter_len: usize, simplified: bool) -> Result<f64> {
    if filter_len < 2 {
        return Err(Error::Domain("the rate estimate needs L >= 2".into()));
    }
    let big_l = filter_len as f64;
    let l = big_l.log2();
    if simplified {
        return Ok(1.3 * l);
    }
    let corr = 9.0 * big_l * l;
    Ok((l + l.log2() - 1.5 + 40.0 / corr) / (1.0 - 1.0 / l + 10.0 / corr))
}

/// Closed-form approximation of the optimal DFT length, `0.9 L log2 L`.
///
/// Not clamped: for tiny `L` the value is below `L`.
pub fn estimate_n_opt(filter_len: usize) -> Result<f64> {
    if filter_len < 2 {
        return Err(Error::Domain("the length estimate needs L >= 2".into()));
    }
    let l = filter_len as f64;
    Ok(0.9 * l * l.log2())
}

/// `|C| / ((L - 1) ln N_opt)`, the weight of the neglected constant.
pub fn constant_ratio(filter_len: usize) -> Result<f64> {
    let root = optimal_n_integer(filter_len)?;
    Ok(optimum_constant(filter_len).abs() / ((filter_len as f64 - 1.0) * root.ln()))
}

/// Cost comparison for one filter length and arithmetic case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityReport {
    pub filter_len: usize,
    pub case: ArithmeticCase,
    pub rate_td: f64,
    pub best_n: usize,
    pub rate_fd: f64,
    /// Real root of the arbitrary-`N` optimum; `None` for `L = 1`.
    pub n_opt: Option<f64>,
}

impl ComplexityReport {
    pub fn savings(&self) -> f64 {
        self.rate_td - self.rate_fd
    }

    pub fn savings_percent(&self) -> f64 {
        100.0 * (1.0 - self.rate_fd / self.rate_td)
    }

    pub fn ratio(&self) -> f64 {
        self.rate_fd / self.rate_td
    }
}

pub fn complexity_report(filter_len: usize, case: ArithmeticCase, p_max: u32) -> Result<ComplexityReport> {
    let (best_n, rate_fd) = best_pow2_n(filter_len, case, p_max)?;
    Ok(ComplexityReport {
        filter_len,
        case,
        rate_td: rate_td(filter_len, case)?,
        best_n,
        rate_fd,
        n_opt: if filter_len >= 2 { Some(optimal_n_integer(filter_len)?) } else { None },
    })
}

/// [`complexity_report`] for every `L` in `lengths`.
pub fn savings_sweep(
    lengths: impl IntoIterator<Item = usize>,
    case: ArithmeticCase,
    p_max: u32,
) -> Result<Vec<ComplexityReport>> {
    lengths
        .into_iter()
        .map(|l| complexity_report(l, case, p_max))
        .collect()
}

/// Smallest `L` in the sweep from which the FFT route is strictly cheaper for
/// every remaining length, together with any isolated lengths below it that
/// are also strictly cheaper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossover {
    pub persistent_from: Option<usize>,
    pub isolated: Vec<usize>,
}

pub fn crossover(reports: &[ComplexityReport]) -> Crossover {
    let mut from = None;
    for r in reports.iter().rev() {
        if r.savings() > 0.0 {
            from = Some(r.filter_len);
        } else {
            break;
        }
    }
    let isolated = reports
        .iter()
        .filter(|r| r.savings() > 0.0 && from.is_some_and(|f| r.filter_len < f))
        .map(|r| r.filter_len)
        .collect();
    Crossover {
        persistent_from: from,
        isolated,
    }
}
