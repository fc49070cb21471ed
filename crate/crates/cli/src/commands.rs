use std::f64::consts::PI;

use blockconv::complexity::{
    crossover, estimate_n_opt, estimate_rate, optimal_n_rounded, savings_sweep,
};
use blockconv::interp::{
    noisy_tone, predicted_tone_lines, sndr_sweep, tone_lines, zero_pad_interpolate,
    GainConvention, InterpConfig, NyquistPolicy, SweepOptions,
};
use blockconv::mfb::to_db;
use blockconv::numerics::{max_abs, max_abs_diff};
use blockconv::ptvir::{circular_shift_check, vp_from_hn};
use blockconv::{
    bank_filters, block_process, dft_filter_coeffs, direct_convolve, distortion_aliasing,
    ptvir_closed_form, ptvir_from_bank, ptvir_probe, BlockConfig, BlockEngine, DftFilterCoeffs,
    ImpulseResponse, QuantizationSpec, SpectralGrid,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::CliError;
use crate::io::{load_filter, read_samples, Cell, Report};
use crate::{
    ComplexityArgs, ConvolveArgs, EngineArgs, GainArg, InterpArgs, MfbArgs, NyquistArg, PtvirArgs,
};

struct Setup {
    h: ImpulseResponse,
    cfg: BlockConfig,
    spec: QuantizationSpec,
    coeffs: DftFilterCoeffs,
}

fn setup(a: &EngineArgs) -> Result<Setup, CliError> {
    let h = load_filter(&a.filter)?;
    if let Some(l) = a.filter_len {
        if l != h.len() {
            return Err(CliError::Config(format!(
                "-L {l} does not match the {} coefficients of '{}'",
                h.len(),
                a.filter
            )));
        }
    }
    let n = a.dft_len.unwrap_or((h.len() + a.step).saturating_sub(1));
    let cfg = BlockConfig::new(a.method.into(), h.len(), a.step, n)?;
    let spec = a.quant.spec();
    let coeffs = dft_filter_coeffs(&h, n, &spec)?;
    Ok(Setup {
        h,
        cfg,
        spec,
        coeffs,
    })
}

fn describe(report: &mut Report, cfg: &BlockConfig) {
    report.note("method", cfg.method().to_string());
    report.note("L", cfg.filter_len());
    report.note("M", cfg.step());
    report.note("N", cfg.dft_len());
    report.note("exact", cfg.is_exact());
}

fn check(name: &str, deviation: f64, tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if deviation.is_nan() || deviation > t => Err(CliError::Contract(format!(
            "{name} {deviation:.3e} exceeds tolerance {t:.3e}"
        ))),
        _ => Ok(()),
    }
}

fn omega_over_pi(grid: &SpectralGrid, g: usize) -> Cell {
    Cell::Float(2.0 * g as f64 / grid.len() as f64)
}

pub fn convolve(a: &ConvolveArgs) -> Result<(), CliError> {
    let s = setup(&a.engine)?;
    let x = read_samples(&a.input)?;
    let y = block_process(&s.coeffs, &x, &s.cfg, &s.spec)?;
    let oracle = a.oracle || a.assert_tol.is_some();
    let direct = if oracle { Some(direct_convolve(&s.h, &x)?) } else { None };

    let mut columns = vec!["n", "re", "im"];
    if oracle {
        columns.extend(["direct_re", "direct_im"]);
    }
    let mut report = Report::new(columns.into_iter().map(String::from).collect());
    describe(&mut report, &s.cfg);
    for (i, v) in y.iter().enumerate() {
        let mut row = vec![Cell::from(i), v.re.into(), v.im.into()];
        if let Some(d) = &direct {
            row.extend([d[i].re.into(), d[i].im.into()]);
        }
        report.push(row);
    }
    let mut deviation = 0.0;
    if let Some(d) = &direct {
        let scale = max_abs(d);
        deviation = max_abs_diff(&y, d) / if scale > 0.0 { scale } else { 1.0 };
        report.note("max_deviation", deviation);
    }
    report.emit(a.output.format, a.output.out.as_ref())?;
    check("relative deviation from direct convolution", deviation, a.assert_tol)
}

pub fn mfb(a: &MfbArgs) -> Result<(), CliError> {
    let s = setup(&a.engine)?;
    let (m, n) = (s.cfg.step(), s.cfg.dft_len());
    let grid = SpectralGrid::with_period(a.grid.max(2 * n), m)?;
    let bank = bank_filters(&s.cfg, &s.spec);
    let v = distortion_aliasing(&s.coeffs, &bank, &grid)?;

    let mut columns = vec!["omega_over_pi".to_string()];
    columns.extend((0..m).map(|p| format!("v{p}_db")));
    let mut report = Report::new(columns);
    describe(&mut report, &s.cfg);
    report.note("grid", grid.len());
    for g in 0..grid.len() {
        let mut row = vec![omega_over_pi(&grid, g)];
        row.extend(v.iter().map(|vp| Cell::Float(to_db(vp[g].norm()))));
        report.push(row);
    }
    let aliasing = v.iter().skip(1).map(|vp| max_abs(vp)).fold(0.0, f64::max);
    report.note("max_aliasing_db", to_db(aliasing));

    let mut deviation = 0.0;
    if a.oracle || a.assert_tol.is_some() {
        let set = ptvir_from_bank(&s.coeffs, &bank)?;
        let w = vp_from_hn(&set, &grid)?;
        deviation = v.iter().zip(&w).map(|(x, y)| max_abs_diff(x, y)).fold(0.0, f64::max);
        report.note("oracle_deviation", deviation);
    }
    report.emit(a.output.format, a.output.out.as_ref())?;
    check("V_p route deviation", deviation, a.assert_tol)
}

pub fn ptvir(a: &PtvirArgs) -> Result<(), CliError> {
    let s = setup(&a.engine)?;
    let (m, n) = (s.cfg.step(), s.cfg.dft_len());
    let bank = bank_filters(&s.cfg, &s.spec);
    let set = ptvir_from_bank(&s.coeffs, &bank)?;

    let mut report = if a.spectra {
        let grid = SpectralGrid::new(a.grid)?;
        let resp = set.frequency_responses(&grid);
        let mut columns = vec!["omega_over_pi".to_string()];
        columns.extend((0..m).map(|p| format!("h{p}_db")));
        let mut report = Report::new(columns);
        for g in 0..grid.len() {
            let mut row = vec![omega_over_pi(&grid, g)];
            row.extend(resp.iter().map(|r| Cell::Float(to_db(r[g].norm()))));
            report.push(row);
        }
        report
    } else {
        let h = set.h_matrix();
        let rows = h.iter().map(Vec::len).max().unwrap_or(0);
        let mut columns = vec!["q".to_string()];
        for p in 0..m {
            columns.extend([format!("h{p}_re"), format!("h{p}_im")]);
        }
        let mut report = Report::new(columns);
        for q in 0..rows {
            let mut row = vec![Cell::from(q)];
            for hp in &h {
                let v = hp.get(q).copied().unwrap_or_default();
                row.extend([Cell::Float(v.re), Cell::Float(v.im)]);
            }
            report.push(row);
        }
        report
    };
    describe(&mut report, &s.cfg);
    let lengths: Vec<usize> = set.effective_lengths(a.eps).iter().map(|e| e.length).collect();
    let shift = circular_shift_check(&set, a.eps);
    report.note("effective_lengths", lengths);
    report.note("circular_shift", shift.circular);
    report.note("shift_max_deviation", shift.max_deviation);

    let mut deviation = 0.0;
    if a.oracle || a.assert_tol.is_some() {
        let closed = ptvir_closed_form(&s.coeffs, &bank)?;
        let engine = BlockEngine::new(&s.coeffs, s.cfg, &s.spec)?;
        let probe = ptvir_probe(&engine, n + m)?;
        deviation = set.max_deviation(&closed).max(set.max_deviation(&probe));
        report.note("oracle_deviation", deviation);
    }
    report.emit(a.output.format, a.output.out.as_ref())?;
    check("time-varying response route deviation", deviation, a.assert_tol)
}

pub fn complexity(a: &ComplexityArgs) -> Result<(), CliError> {
    let (lo, hi) = match a.filter_len {
        Some(l) => (l, l),
        None => (a.l_min, a.l_max),
    };
    if lo == 0 || lo > hi {
        return Err(CliError::Config(format!("empty filter-length range [{lo}, {hi}]")));
    }
    let reports = savings_sweep(lo..=hi, a.case, a.p_max)?;
    let columns = [
        "L",
        "rate_td",
        "best_n",
        "rate_fd",
        "savings",
        "savings_percent",
        "n_opt",
        "n_opt_int",
        "rate_at_n_opt_int",
        "n_hat",
        "rate_estimate",
    ];
    let mut report = Report::new(columns.iter().map(|c| c.to_string()).collect());
    let scale = if a.case.is_complex() { 2.0 } else { 1.0 };
    for r in &reports {
        let l = r.filter_len;
        let (n_int, r_int) = if l >= 2 {
            let (n, rate) = optimal_n_rounded(l, a.case)?;
            (Cell::from(n), Cell::Float(rate))
        } else {
            (Cell::Missing, Cell::Missing)
        };
        let (n_hat, est) = if l >= 2 {
            (Cell::Float(estimate_n_opt(l)?), Cell::Float(scale * estimate_rate(l, false)?))
        } else {
            (Cell::Missing, Cell::Missing)
        };
        report.push(vec![
            Cell::from(l),
            r.rate_td.into(),
            Cell::from(r.best_n),
            r.rate_fd.into(),
            r.savings().into(),
            r.savings_percent().into(),
            r.n_opt.into(),
            n_int,
            r_int,
            n_hat,
            est,
        ]);
    }
    let cross = crossover(&reports);
    report.note("case", a.case.to_string());
    report.note("p_max", a.p_max);
    report.note("crossover", cross.persistent_from.map_or(Value::Null, Value::from));
    report.note("isolated_savings", cross.isolated);
    report.emit(a.output.format, a.output.out.as_ref())
}

pub fn interp(a: &InterpArgs) -> Result<(), CliError> {
    let cfg = InterpConfig::new(a.factor, a.block_len)?
        .with_gain(match a.gain {
            GainArg::Unity => GainConvention::Unity,
            GainArg::Factor => GainConvention::Factor,
        })
        .with_nyquist(match a.nyquist {
            NyquistArg::Positive => NyquistPolicy::Positive,
            NyquistArg::Split => NyquistPolicy::Split,
        });
    let spec = a.quant.spec();
    if a.blocks == 0 {
        return Err(CliError::Config("--blocks must be at least 1".into()));
    }
    let mut report = match a.tone {
        None => {
            if a.grid == 0 {
                return Err(CliError::Config("--grid must be at least 1".into()));
            }
            let step = PI / (a.factor * a.grid) as f64;
            let omegas: Vec<f64> = (0..a.grid).map(|g| g as f64 * step).collect();
            let opts = SweepOptions {
                blocks: a.blocks,
                seed: a.seed,
                spec,
            };
            let points = sndr_sweep(&cfg, a.snr, &omegas, &opts)?;
            let mut report = Report::new(vec!["omega_over_pi".into(), "sndr_db".into()]);
            for p in points {
                report.push(vec![Cell::Float(p.omega / PI), Cell::Float(p.sndr_db)]);
            }
            report
        }
        Some(t) => tone_report(&cfg, t * PI, a, &spec)?,
    };
    report.note("P", a.factor);
    report.note("N", a.block_len);
    report.note("snr_db", a.snr);
    report.note("seed", a.seed);
    let worst = report.summary.get("max_line_error_db").and_then(Value::as_f64);
    report.emit(a.output.format, a.output.out.as_ref())?;
    match worst {
        Some(w) => check("image line error (dB)", w, a.assert_tol),
        None => Ok(()),
    }
}

/// Measured and predicted output lines `omega0 + 2 pi s / N`.
fn tone_report(
    cfg: &InterpConfig,
    omega0: f64,
    a: &InterpArgs,
    spec: &QuantizationSpec,
) -> Result<Report, CliError> {
    let n = cfg.block_len();
    let grid = (2..=4096)
        .filter_map(|k| SpectralGrid::new(n * k).ok())
        .find(|g| g.index_of(omega0).is_some())
        .ok_or_else(|| {
            CliError::Config(format!(
                "omega/pi = {} is not a rational multiple of 2/N fine enough for the prediction grid",
                omega0 / PI
            ))
        })?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let x = noisy_tone(omega0 * cfg.factor() as f64, a.blocks * cfg.input_block_len(), a.snr, &mut rng);
    let y = zero_pad_interpolate(&x, cfg, spec)?;
    let measured = tone_lines(&y, omega0, n);
    let predicted = predicted_tone_lines(cfg, omega0, spec, &grid)?;

    let columns = ["s", "omega_over_pi", "measured_db", "predicted_db"];
    let mut report = Report::new(columns.iter().map(|c| c.to_string()).collect());
    let mut worst: f64 = 0.0;
    for (s, (m, p)) in measured.iter().zip(&predicted).enumerate() {
        let (mdb, pdb) = (to_db(m.norm()), to_db(p.norm()));
        if pdb > -100.0 {
            worst = worst.max((mdb - pdb).abs());
        }
        let w = omega0 / PI + 2.0 * s as f64 / n as f64;
        report.push(vec![Cell::from(s), Cell::Float(w), Cell::Float(mdb), Cell::Float(pdb)]);
    }
    report.note("max_line_error_db", worst);
    Ok(report)
}
