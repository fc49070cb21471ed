//! Python bindings. Sequences cross the boundary as lists of `complex`.

use blockconv::complexity::{self, ArithmeticCase, DEFAULT_P_MAX};
use blockconv::interp::{self, GainConvention, NyquistPolicy, SweepOptions};
use blockconv::ptvir::{self, DEFAULT_LENGTH_EPS};
use blockconv::{
    bank_filters, dft_filter_coeffs, BlockEngine, Complex64, DftFilterCoeffs, ImpulseResponse,
    Method, QuantTarget, RoundingMode, SpectralGrid,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(pyblockconv, BlockconvError, PyValueError);

fn err(e: blockconv::Error) -> PyErr {
    BlockconvError::new_err(e.to_string())
}

fn parse_method(method: &str) -> PyResult<Method> {
    match method {
        "ola" | "overlap-add" => Ok(Method::OverlapAdd),
        "ols" | "overlap-save" => Ok(Method::OverlapSave),
        _ => Err(PyValueError::new_err(format!("unknown method '{method}' (ola or ols)"))),
    }
}

fn parse_case(case: &str) -> PyResult<ArithmeticCase> {
    case.parse().map_err(err)
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::OverlapAdd => "ola",
        Method::OverlapSave => "ols",
    }
}

/// Which coefficients are quantized and how.
#[pyclass(name = "QuantizationSpec", frozen, from_py_object)]
#[derive(Clone, Debug)]
pub struct PyQuantizationSpec {
    inner: blockconv::QuantizationSpec,
}

#[pymethods]
impl PyQuantizationSpec {
    /// `targets` holds any of "h", "g", "f"; empty means no quantization.
    #[new]
    #[pyo3(signature = (bits = 8, targets = Vec::new(), rounding = "nearest"))]
    fn new(bits: u32, targets: Vec<String>, rounding: &str) -> PyResult<Self> {
        if targets.is_empty() {
            return Ok(Self {
                inner: blockconv::QuantizationSpec::none(),
            });
        }
        let targets = targets
            .iter()
            .map(|t| match t.as_str() {
                "h" => Ok(QuantTarget::DftFilterCoeffs),
                "g" => Ok(QuantTarget::AnalysisExponentials),
                "f" => Ok(QuantTarget::SynthesisExponentials),
                other => Err(PyValueError::new_err(format!("unknown target '{other}' (h, g or f)"))),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let mode = match rounding {
            "nearest" => RoundingMode::HalfAwayFromZero,
            "truncate" => RoundingMode::Truncate,
            _ => return Err(PyValueError::new_err("rounding must be 'nearest' or 'truncate'")),
        };
        Ok(Self {
            inner: blockconv::QuantizationSpec::new(bits, &targets).with_mode(mode),
        })
    }

    #[getter]
    fn targets(&self) -> Vec<&'static str> {
        self.inner
            .targets()
            .into_iter()
            .map(|t| match t {
                QuantTarget::DftFilterCoeffs => "h",
                QuantTarget::AnalysisExponentials => "g",
                QuantTarget::SynthesisExponentials => "f",
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("QuantizationSpec({:?})", self.inner)
    }
}

fn spec_of(spec: Option<&PyQuantizationSpec>) -> blockconv::QuantizationSpec {
    spec.map_or_else(blockconv::QuantizationSpec::none, |s| s.inner)
}

/// Filter, configuration and quantized coefficients shared by the analyses.
struct Prepared {
    cfg: blockconv::BlockConfig,
    spec: blockconv::QuantizationSpec,
    coeffs: DftFilterCoeffs,
}

fn prepare(
    h: Vec<Complex64>,
    method: &str,
    step: usize,
    dft_len: Option<usize>,
    spec: Option<&PyQuantizationSpec>,
) -> PyResult<Prepared> {
    let h = ImpulseResponse::new(h).map_err(err)?;
    let n = dft_len.unwrap_or((h.len() + step).saturating_sub(1));
    let cfg = blockconv::BlockConfig::new(parse_method(method)?, h.len(), step, n).map_err(err)?;
    let spec = spec_of(spec);
    let coeffs = dft_filter_coeffs(&h, n, &spec).map_err(err)?;
    Ok(Prepared {
        cfg,
        spec,
        coeffs,
    })
}

/// Streaming OLA/OLS engine.
#[pyclass(name = "Engine")]
pub struct PyEngine {
    inner: BlockEngine,
}

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (h, method, step, dft_len = None, spec = None))]
    fn new(
        h: Vec<Complex64>,
        method: &str,
        step: usize,
        dft_len: Option<usize>,
        spec: Option<PyRef<'_, PyQuantizationSpec>>,
    ) -> PyResult<Self> {
        let p = prepare(h, method, step, dft_len, spec.as_deref())?;
        Ok(Self {
            inner: BlockEngine::new(&p.coeffs, p.cfg, &p.spec).map_err(err)?,
        })
    }

    #[getter]
    fn method(&self) -> &'static str {
        method_name(self.inner.config().method())
    }

    #[getter]
    fn filter_len(&self) -> usize {
        self.inner.config().filter_len()
    }

    #[getter]
    fn step(&self) -> usize {
        self.inner.config().step()
    }

    #[getter]
    fn dft_len(&self) -> usize {
        self.inner.config().dft_len()
    }

    fn is_exact(&self) -> bool {
        self.inner.config().is_exact()
    }

    /// Exactly `step` samples in, `step` samples out.
    fn push_block(&mut self, block: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.inner.push_block(&block).map_err(err)
    }

    fn flush(&mut self) -> Vec<Complex64> {
        self.inner.flush()
    }

    fn run(&mut self, x: Vec<Complex64>) -> Vec<Complex64> {
        self.inner.run(&x)
    }

    fn reset(&mut self) {
        self.inner.reset();
    }
}

#[pyfunction]
fn direct_convolve(h: Vec<Complex64>, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let h = ImpulseResponse::new(h).map_err(err)?;
    blockconv::direct_convolve(&h, &x).map_err(err)
}

/// Filter `x` in one call; the output has `len(x) + len(h) - 1` samples.
#[pyfunction]
#[pyo3(signature = (h, x, method, step, dft_len = None, spec = None))]
fn block_process(
    h: Vec<Complex64>,
    x: Vec<Complex64>,
    method: &str,
    step: usize,
    dft_len: Option<usize>,
    spec: Option<PyRef<'_, PyQuantizationSpec>>,
) -> PyResult<Vec<Complex64>> {
    let p = prepare(h, method, step, dft_len, spec.as_deref())?;
    blockconv::block_process(&p.coeffs, &x, &p.cfg, &p.spec).map_err(err)
}

/// The `M` time-varying impulse responses of an engine.
#[pyclass(name = "Ptvir", frozen)]
pub struct PyPtvir {
    inner: blockconv::PtvirSet,
}

#[pymethods]
impl PyPtvir {
    #[getter]
    fn period(&self) -> usize {
        self.inner.period()
    }

    fn d(&self, n: usize) -> PyResult<Vec<Complex64>> {
        self.check(n)?;
        Ok(self.inner.d(n).to_vec())
    }

    /// `h_n(q) = d_n(q - n)`.
    fn h(&self, n: usize) -> PyResult<Vec<Complex64>> {
        self.check(n)?;
        Ok(self.inner.h(n))
    }

    #[pyo3(signature = (eps = DEFAULT_LENGTH_EPS))]
    fn effective_lengths(&self, eps: f64) -> Vec<usize> {
        self.inner.effective_lengths(eps).iter().map(|e| e.length).collect()
    }

    /// `(verdict, max deviation)` of the cyclic-rotation check.
    #[pyo3(signature = (eps = DEFAULT_LENGTH_EPS))]
    fn circular_shift(&self, eps: f64) -> (bool, f64) {
        let c = ptvir::circular_shift_check(&self.inner, eps);
        (c.circular, c.max_deviation)
    }

    fn max_deviation(&self, other: PyRef<'_, PyPtvir>) -> f64 {
        self.inner.max_deviation(&other.inner)
    }
}

impl PyPtvir {
    fn check(&self, n: usize) -> PyResult<()> {
        if n >= self.inner.period() {
            return Err(PyValueError::new_err(format!(
                "phase {n} is outside 0..{}",
                self.inner.period()
            )));
        }
        Ok(())
    }
}

/// `route` is "bank", "closed_form" or "probe".
#[pyfunction]
#[pyo3(signature = (h, method, step, dft_len = None, spec = None, route = "bank"))]
fn ptvir_set(
    h: Vec<Complex64>,
    method: &str,
    step: usize,
    dft_len: Option<usize>,
    spec: Option<PyRef<'_, PyQuantizationSpec>>,
    route: &str,
) -> PyResult<PyPtvir> {
    let p = prepare(h, method, step, dft_len, spec.as_deref())?;
    let bank = bank_filters(&p.cfg, &p.spec);
    let inner = match route {
        "bank" => blockconv::ptvir_from_bank(&p.coeffs, &bank),
        "closed_form" => blockconv::ptvir_closed_form(&p.coeffs, &bank),
        "probe" => BlockEngine::new(&p.coeffs, p.cfg, &p.spec)
            .and_then(|e| blockconv::ptvir_probe(&e, p.cfg.dft_len() + p.cfg.step())),
        _ => return Err(PyValueError::new_err("route must be 'bank', 'closed_form' or 'probe'")),
    }
    .map_err(err)?;
    Ok(PyPtvir { inner })
}

/// `V_0 .. V_{M-1}` on a grid of at least `grid` points (rounded up to a
/// multiple of `M`); returns `(omegas, V)`.
#[pyfunction]
#[pyo3(signature = (h, method, step, dft_len = None, spec = None, grid = SpectralGrid::DEFAULT_POINTS))]
fn distortion_aliasing(
    h: Vec<Complex64>,
    method: &str,
    step: usize,
    dft_len: Option<usize>,
    spec: Option<PyRef<'_, PyQuantizationSpec>>,
    grid: usize,
) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let p = prepare(h, method, step, dft_len, spec.as_deref())?;
    let grid = SpectralGrid::with_period(grid.max(2 * p.cfg.dft_len()), step).map_err(err)?;
    let bank = bank_filters(&p.cfg, &p.spec);
    let v = blockconv::distortion_aliasing(&p.coeffs, &bank, &grid).map_err(err)?;
    Ok((grid.omegas(), v))
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<Vec<Complex64>> {
    Ok(blockconv::design::fixture(name).map_err(err)?.as_slice().to_vec())
}

#[pyfunction]
fn rate_td(filter_len: usize, case: &str) -> PyResult<f64> {
    complexity::rate_td(filter_len, parse_case(case)?).map_err(err)
}

#[pyfunction]
fn rate_fd(filter_len: usize, dft_len: usize, case: &str) -> PyResult<f64> {
    complexity::rate_fd(filter_len, dft_len, parse_case(case)?).map_err(err)
}

/// `(N, rate)` of the cheapest power-of-two DFT length.
#[pyfunction]
#[pyo3(signature = (filter_len, case, p_max = DEFAULT_P_MAX))]
fn best_pow2_n(filter_len: usize, case: &str, p_max: u32) -> PyResult<(usize, f64)> {
    complexity::best_pow2_n(filter_len, parse_case(case)?, p_max).map_err(err)
}

/// `(root, iterations)`.
#[pyfunction]
fn newton_optimal_n(filter_len: usize) -> PyResult<(f64, usize)> {
    complexity::newton_optimal_n(filter_len).map_err(err)
}

#[pyfunction]
fn estimate_n_opt(filter_len: usize) -> PyResult<f64> {
    complexity::estimate_n_opt(filter_len).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (filter_len, simplified = false))]
fn estimate_rate(filter_len: usize, simplified: bool) -> PyResult<f64> {
    complexity::estimate_rate(filter_len, simplified).map_err(err)
}

#[pyclass(name = "ComplexityReport", frozen, get_all)]
pub struct PyComplexityReport {
    filter_len: usize,
    case: String,
    rate_td: f64,
    best_n: usize,
    rate_fd: f64,
    n_opt: Option<f64>,
    savings: f64,
    savings_percent: f64,
}

#[pymethods]
impl PyComplexityReport {
    fn __repr__(&self) -> String {
        format!(
            "ComplexityReport(L={}, case={}, rate_td={}, best_n={}, rate_fd={})",
            self.filter_len, self.case, self.rate_td, self.best_n, self.rate_fd
        )
    }
}

/// One report per `L` in `[l_min, l_max]`.
#[pyfunction]
#[pyo3(signature = (l_min, l_max, case, p_max = DEFAULT_P_MAX))]
fn savings_sweep(l_min: usize, l_max: usize, case: &str, p_max: u32) -> PyResult<Vec<PyComplexityReport>> {
    let reports = complexity::savings_sweep(l_min..=l_max, parse_case(case)?, p_max).map_err(err)?;
    Ok(reports
        .into_iter()
        .map(|r| PyComplexityReport {
            filter_len: r.filter_len,
            case: r.case.to_string(),
            rate_td: r.rate_td,
            best_n: r.best_n,
            rate_fd: r.rate_fd,
            n_opt: r.n_opt,
            savings: r.savings(),
            savings_percent: r.savings_percent(),
        })
        .collect())
}

/// Interpolation by `factor` with output blocks of `block_len` samples.
#[pyclass(name = "InterpConfig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyInterpConfig {
    inner: blockconv::InterpConfig,
}

#[pymethods]
impl PyInterpConfig {
    #[new]
    #[pyo3(signature = (factor, block_len, nyquist = "positive", gain = "factor"))]
    fn new(factor: usize, block_len: usize, nyquist: &str, gain: &str) -> PyResult<Self> {
        let nyquist = match nyquist {
            "positive" => NyquistPolicy::Positive,
            "split" => NyquistPolicy::Split,
            _ => return Err(PyValueError::new_err("nyquist must be 'positive' or 'split'")),
        };
        let gain = match gain {
            "factor" => GainConvention::Factor,
            "unity" => GainConvention::Unity,
            _ => return Err(PyValueError::new_err("gain must be 'factor' or 'unity'")),
        };
        let inner = blockconv::InterpConfig::new(factor, block_len)
            .map_err(err)?
            .with_nyquist(nyquist)
            .with_gain(gain);
        Ok(Self { inner })
    }

    #[getter]
    fn factor(&self) -> usize {
        self.inner.factor()
    }

    #[getter]
    fn block_len(&self) -> usize {
        self.inner.block_len()
    }

    /// The `N` DFT coefficients of the equivalent filter.
    fn coefficients(&self) -> Vec<Complex64> {
        interp::interp_filter_coeffs(&self.inner).as_slice().to_vec()
    }
}

#[pyfunction]
#[pyo3(signature = (x, cfg, spec = None))]
fn zero_pad_interpolate(
    x: Vec<Complex64>,
    cfg: PyRef<'_, PyInterpConfig>,
    spec: Option<PyRef<'_, PyQuantizationSpec>>,
) -> PyResult<Vec<Complex64>> {
    interp::zero_pad_interpolate(&x, &cfg.inner, &spec_of(spec.as_deref())).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (y, reference, max_delay = 0))]
fn sndr(y: Vec<Complex64>, reference: Vec<Complex64>, max_delay: usize) -> PyResult<f64> {
    interp::sndr(&y, &reference, max_delay).map_err(err)
}

/// SNDR in dB at each high-rate frequency of `omegas`.
#[pyfunction]
#[pyo3(signature = (cfg, snr_db, omegas, blocks = 64, seed = 0, spec = None))]
fn sndr_sweep(
    cfg: PyRef<'_, PyInterpConfig>,
    snr_db: f64,
    omegas: Vec<f64>,
    blocks: usize,
    seed: u64,
    spec: Option<PyRef<'_, PyQuantizationSpec>>,
) -> PyResult<Vec<f64>> {
    let opts = SweepOptions {
        blocks,
        seed,
        spec: spec_of(spec.as_deref()),
    };
    let points = interp::sndr_sweep(&cfg.inner, snr_db, &omegas, &opts).map_err(err)?;
    Ok(points.into_iter().map(|p| p.sndr_db).collect())
}

#[pymodule]
pub fn pyblockconv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BlockconvError", m.py().get_type::<BlockconvError>())?;
    m.add_class::<PyQuantizationSpec>()?;
    m.add_class::<PyEngine>()?;
    m.add_class::<PyPtvir>()?;
    m.add_class::<PyComplexityReport>()?;
    m.add_class::<PyInterpConfig>()?;
    m.add_function(wrap_pyfunction!(direct_convolve, m)?)?;
    m.add_function(wrap_pyfunction!(block_process, m)?)?;
    m.add_function(wrap_pyfunction!(ptvir_set, m)?)?;
    m.add_function(wrap_pyfunction!(distortion_aliasing, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(rate_td, m)?)?;
    m.add_function(wrap_pyfunction!(rate_fd, m)?)?;
    m.add_function(wrap_pyfunction!(best_pow2_n, m)?)?;
    m.add_function(wrap_pyfunction!(newton_optimal_n, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_n_opt, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_rate, m)?)?;
    m.add_function(wrap_pyfunction!(savings_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(zero_pad_interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(sndr, m)?)?;
    m.add_function(wrap_pyfunction!(sndr_sweep, m)?)?;
    Ok(())
}
