//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use blockconv::complexity::{
    best_pow2_n, crossover, estimate_n_opt, estimate_rate, newton_optimal_n, rate_fd,
    savings_sweep, ArithmeticCase, DEFAULT_P_MAX,
};
use blockconv::interp::{
    mid_bin, predicted_tone_lines, sndr_sweep, tone_lines, zero_pad_interpolate, InterpConfig,
    SweepOptions,
};
use blockconv::mfb::{freq_response, to_db};
use blockconv::numerics::{max_abs, max_abs_diff, QuantTarget};
use blockconv::ptvir::{
    circular_shift_check, effective_length, vp_from_hn, DEFAULT_LENGTH_EPS,
};
use blockconv::{
    block_process, direct_convolve, distortion_aliasing, ptvir_closed_form, ptvir_from_bank,
    ptvir_probe, Complex64, ImpulseResponse, Method, PtvirSet, QuantizationSpec, SpectralGrid,
};
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Combine sub-checks; the criterion passes only if all of them do.
fn all_of(parts: Vec<(&str, bool, String)>) -> Outcome {
    let pass = parts.iter().all(|p| p.1);
    let detail = parts
        .iter()
        .map(|(name, ok, d)| format!("[{name} {}] {d}", if *ok { "ok" } else { "FAILED" }))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, detail)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    let trials = 60;
    for _ in 0..trials {
        let l = rng.random_range(1..=40);
        let m = rng.random_range(1..=40);
        let n = l + m - 1;
        let h = random_complex(&mut rng, l);
        let len = rng.random_range(1..=300);
        let x = random_complex(&mut rng, len);
        let want = direct_convolve(&ImpulseResponse::new(h.clone()).unwrap(), &x).unwrap();
        for method in [Method::OverlapAdd, Method::OverlapSave] {
            let s = setup(&h, method, m, n, QuantizationSpec::none());
            let got = block_process(&s.coeffs, &x, &s.cfg, &s.spec).unwrap();
            worst = worst.max(max_rel_err(&got, &want));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    all_of(vec![
        ("accuracy", worst <= 1e-10, format!("{trials} triples, max rel err {worst:.2e} (<= 1e-10)")),
        ("runtime", secs < 10.0, format!("{secs:.2} s (< 10 s)")),
    ])
}

fn reference_check(set: &PtvirSet, reference: &[[f64; 4]; 13]) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..4 {
        let h = set.h(n);
        for q in 0..h.len().max(reference.len()) {
            let want = reference.get(q).map_or(0.0, |r| r[n]);
            let got = h.get(q).copied().unwrap_or_default();
            worst = worst.max((got - Complex64::new(want, 0.0)).norm());
        }
    }
    worst
}

fn lengths(set: &PtvirSet) -> Vec<usize> {
    (0..set.period())
        .map(|n| effective_length(&set.h(n), DEFAULT_LENGTH_EPS).length)
        .collect()
}

fn table_criterion(
    method: Method,
    spec: QuantizationSpec,
    reference: Option<&[[f64; 4]; 13]>,
    want_lengths: &[usize],
    want_circular: bool,
) -> Outcome {
    let s = setup(&fixture_h(), method, 4, 10, spec);
    let set = ptvir_from_bank(&s.coeffs, &s.bank).unwrap();
    let mut parts = Vec::new();
    if let Some(reference) = reference {
        let dev = reference_check(&set, reference);
        parts.push(("values", dev <= 1e-12, format!("max deviation {dev:.2e} (<= 1e-12)")));
    }
    let got = lengths(&set);
    parts.push(("lengths", got == want_lengths, format!("{got:?} (want {want_lengths:?})")));
    let check = circular_shift_check(&set, 1e-12);
    parts.push((
        "circular",
        check.circular == want_circular,
        format!(
            "verdict {} (want {want_circular}), shift deviation {:.2e}",
            check.circular, check.max_deviation
        ),
    ));
    all_of(parts)
}

fn criterion_2() -> Outcome {
    table_criterion(Method::OverlapAdd, h_only(8), Some(&OLA_H_QUANTIZED), &[12, 12, 8, 8], false)
}

fn criterion_3() -> Outcome {
    table_criterion(Method::OverlapSave, h_only(8), Some(&OLS_H_QUANTIZED), &[10; 4], true)
}

fn criterion_4() -> Outcome {
    table_criterion(Method::OverlapSave, QuantizationSpec::all(8), None, &[10; 4], false)
}

#[derive(Clone, Copy, Debug)]
enum Row {
    OlaNotMultiple,
    OlaMultiple,
    Ols,
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    // H(k) is always quantized; the bank cells add g and/or f.
    let bank_variants: [&[QuantTarget]; 3] = [
        &[QuantTarget::DftFilterCoeffs, QuantTarget::AnalysisExponentials],
        &[QuantTarget::DftFilterCoeffs, QuantTarget::SynthesisExponentials],
        &QuantTarget::ALL,
    ];
    let per_cell = 12;
    let mut failures = Vec::new();
    let mut cells = 0;
    for row in [Row::OlaNotMultiple, Row::OlaMultiple, Row::Ols] {
        for bank_quantized in [false, true] {
            cells += 1;
            for i in 0..per_cell {
                let m = rng.random_range(2..=8);
                // N = 1, 2, 4 have exactly representable roots of unity, so
                // quantizing the bank would change nothing.
                let n = loop {
                    let n = match row {
                        Row::OlaMultiple => m * rng.random_range(2..=5),
                        _ => rng.random_range(m + 1..=40),
                    };
                    if n > 4 && (!matches!(row, Row::OlaNotMultiple) || n % m != 0) {
                        break n;
                    }
                };
                // A full-length filter has no structural zeros that a lattice
                // coincidence in the quantized DFT could cancel exactly.
                let l = n;
                let bits = rng.random_range(6..=12);
                let spec = if bank_quantized {
                    QuantizationSpec::new(bits, bank_variants[i % bank_variants.len()])
                } else {
                    h_only(bits)
                };
                let method = match row {
                    Row::Ols => Method::OverlapSave,
                    _ => Method::OverlapAdd,
                };
                let h = random_real(&mut rng, l);
                let s = setup(&h, method, m, n, spec);
                let set = ptvir_from_bank(&s.coeffs, &s.bank).unwrap();
                let want_len: Vec<usize> = (0..m)
                    .map(|p| match row {
                        Row::OlaNotMultiple => m * ((n - 1 - p) / m) + m,
                        _ => n,
                    })
                    .collect();
                let want_circular = !bank_quantized && !matches!(row, Row::OlaNotMultiple);
                let got_len = lengths(&set);
                let got_circular = circular_shift_check(&set, 1e-12).circular;
                if got_len != want_len || got_circular != want_circular {
                    failures.push(format!(
                        "{row:?}/bank={bank_quantized} M={m} N={n} L={l} B={bits}: lengths {got_len:?} want {want_len:?}, circular {got_circular} want {want_circular}"
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        outcome(true, format!("{cells} cells x {per_cell} random length-N filters reproduce every length and verdict"))
    } else {
        outcome(false, format!("{} mismatches: {}", failures.len(), failures.join(" | ")))
    }
}

/// Random configurations for the cross-representation checks, including
/// quantized and `N < L + M - 1` cases.
fn mixed_configs(seed: u64, count: usize) -> Vec<Setup> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let method = if i % 2 == 0 { Method::OverlapAdd } else { Method::OverlapSave };
            let m = rng.random_range(1..=8);
            let n = rng.random_range(m.max(2)..=24);
            let l = if i % 3 == 0 { n - m + 1 } else { rng.random_range(1..=n) };
            let spec = match i % 3 {
                0 => QuantizationSpec::none(),
                1 => h_only(rng.random_range(4..=10)),
                _ => QuantizationSpec::all(rng.random_range(4..=10)),
            };
            setup(&random_complex(&mut rng, l), method, m, n, spec)
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let configs = mixed_configs(6, 16);
    let mut worst: f64 = 0.0;
    let mut bound_slack = f64::INFINITY;
    let mut inexact = 0;
    for s in &configs {
        if !s.cfg.is_exact() {
            inexact += 1;
        }
        let grid = SpectralGrid::with_period(256, s.cfg.step()).unwrap();
        let via_bank = distortion_aliasing(&s.coeffs, &s.bank, &grid).unwrap();
        let set = ptvir_from_bank(&s.coeffs, &s.bank).unwrap();
        let via_hn = vp_from_hn(&set, &grid).unwrap();
        for (a, b) in via_bank.iter().zip(&via_hn) {
            worst = worst.max(max_abs_diff(a, b));
        }
        let vmax = via_bank.iter().map(|v| max_abs(v)).fold(0.0, f64::max);
        let hmax = set.frequency_responses(&grid).iter().map(|v| max_abs(v)).fold(0.0, f64::max);
        bound_slack = bound_slack.min(hmax + 1e-10 - vmax);
    }
    all_of(vec![
        (
            "routes",
            worst <= 1e-10,
            format!("{} configs ({inexact} with N < L+M-1), max |dV| {worst:.2e} (<= 1e-10)", configs.len()),
        ),
        ("bound", bound_slack >= 0.0, format!("min(max|H_n| + 1e-10 - max|V_p|) = {bound_slack:.2e}")),
    ])
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for method in [Method::OverlapAdd, Method::OverlapSave] {
        for multiple in [true, false] {
            for spec_kind in 0..3 {
                for exact in [true, false] {
                    let m = rng.random_range(2..=6);
                    let n = if multiple {
                        m * rng.random_range(2..=4)
                    } else {
                        m * rng.random_range(2..=4) + rng.random_range(1..m)
                    };
                    let l = if exact { n - m + 1 } else { rng.random_range(n - m + 2..=n) };
                    let bits = rng.random_range(5..=10);
                    let spec = match spec_kind {
                        0 => QuantizationSpec::none(),
                        1 => h_only(bits),
                        _ => QuantizationSpec::all(bits),
                    };
                    let s = setup(&random_complex(&mut rng, l), method, m, n, spec);
                    let bank = ptvir_from_bank(&s.coeffs, &s.bank).unwrap();
                    let closed = ptvir_closed_form(&s.coeffs, &s.bank).unwrap();
                    let probe = ptvir_probe(&s.engine, n + m + 5).unwrap();
                    worst = worst.max(bank.max_deviation(&closed)).max(bank.max_deviation(&probe));
                    cases += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("{cases} cases, max deviation {worst:.2e} (<= 1e-10)"))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let mut alias: f64 = 0.0;
    let mut mag: f64 = 0.0;
    let cases = 12;
    for i in 0..cases {
        let method = if i % 2 == 0 { Method::OverlapAdd } else { Method::OverlapSave };
        let l = rng.random_range(1..=16);
        let m = rng.random_range(1..=12);
        let n = l + m - 1;
        let h = random_complex(&mut rng, l);
        let s = setup(&h, method, m, n, QuantizationSpec::none());
        let grid = SpectralGrid::with_period(512.max(2 * n), m).unwrap();
        let v = distortion_aliasing(&s.coeffs, &s.bank, &grid).unwrap();
        for vp in &v[1..] {
            alias = alias.max(max_abs(vp));
        }
        let hr = freq_response(&h, &grid);
        for (a, b) in v[0].iter().zip(&hr) {
            mag = mag.max((a.norm() - b.norm()).abs());
        }
    }
    all_of(vec![
        ("aliasing", alias <= 1e-10, format!("{cases} exact configs, max |V_p>=1| {alias:.2e} (<= 1e-10)")),
        ("distortion", mag <= 1e-10, format!("max ||V_0| - |H|| {mag:.2e} (<= 1e-10)")),
    ])
}

fn criterion_9() -> Outcome {
    let sweep = |case| savings_sweep(2..=256, case, DEFAULT_P_MAX).unwrap();
    let complex = sweep(ArithmeticCase::Complex);
    let complex_all = complex.iter().all(|r| r.savings() > 0.0);

    let rs = sweep(ArithmeticCase::RealSymmetric);
    let rs_cross = crossover(&rs);
    let rs_ok = rs_cross.persistent_from == Some(11);

    let cs = sweep(ArithmeticCase::ComplexSymmetric);
    let positive: Vec<usize> = cs.iter().filter(|r| r.savings() > 0.0).map(|r| r.filter_len).collect();
    let expected: Vec<usize> = (2..=256).filter(|&l| (l % 2 == 1 && l >= 3) || l >= 6).collect();
    let cs_ok = positive == expected;

    let r = rate_fd(7, 16, ArithmeticCase::Real).unwrap();
    all_of(vec![
        ("complex", complex_all, "savings > 0 for every L in [2, 256]".to_string()),
        (
            "real_symmetric",
            rs_ok,
            format!(
                "savings > 0 for every L >= {:?}; isolated positive L below it: {:?}",
                rs_cross.persistent_from, rs_cross.isolated
            ),
        ),
        (
            "complex_symmetric",
            cs_ok,
            format!(
                "positive set = odd L >= 3 and even L >= 6: {cs_ok}; first positives {:?}",
                &positive[..positive.len().min(5)]
            ),
        ),
        ("rate_fd(7,16)", r == 4.4, format!("{r}")),
    ])
}

fn bisection_root(l: usize) -> f64 {
    let lf = l as f64;
    let c = blockconv::complexity::optimum_constant(l);
    let f = |n: f64| n - (lf - 1.0) * n.ln() - c;
    let (mut lo, mut hi) = (lf, 1e5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo).signum() == f(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (root, _) = newton_optimal_n(128).unwrap();
    let oracle = bisection_root(128);
    let root_ok = (root - oracle).abs() <= 1e-6;

    let argmin = (128..20_000)
        .map(|n| (n, rate_fd(128, n, ArithmeticCase::Real).unwrap()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
        .0;
    let bracket_ok = argmin == root.floor() as usize || argmin == root.ceil() as usize;

    let mut worst_ratio = (1.0, 0);
    let mut ratio_fail = Vec::new();
    for l in 16..=4096 {
        let ratio = estimate_n_opt(l).unwrap() / newton_optimal_n(l).unwrap().0;
        if (ratio - 1.0).abs() > (worst_ratio.0 - 1.0f64).abs() {
            worst_ratio = (ratio, l);
        }
        if !(0.9..=1.1).contains(&ratio) {
            ratio_fail.push(l);
        }
    }

    let rel_err = |l: usize, simplified: bool| {
        let actual = best_pow2_n(l, ArithmeticCase::Real, DEFAULT_P_MAX).unwrap().1;
        (estimate_rate(l, simplified).unwrap() - actual).abs() / actual
    };
    let full = (8..=4096).map(|l| rel_err(l, false)).fold(0.0, f64::max);
    let simple = (32..=4096).map(|l| rel_err(l, true)).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    all_of(vec![
        ("newton", root_ok, format!("L=128 root {root:.9} vs bisection {oracle:.9}")),
        ("bracket", bracket_ok, format!("integer argmin {argmin} vs root {root:.4}")),
        (
            "n_hat ratio",
            ratio_fail.is_empty(),
            format!(
                "worst ratio {:.4} at L={}, outside [0.9, 1.1] for {} lengths {:?}",
                worst_ratio.0,
                worst_ratio.1,
                ratio_fail.len(),
                ratio_fail
            ),
        ),
        ("full estimate", full <= 0.10, format!("max rel err {:.2}% (<= 10%)", 100.0 * full)),
        ("simplified", simple <= 0.20, format!("max rel err {:.2}% (<= 20%)", 100.0 * simple)),
        ("runtime", secs < 30.0, format!("{secs:.2} s (< 30 s)")),
    ])
}

fn criterion_11() -> Outcome {
    let cfg = InterpConfig::new(2, 32).unwrap();
    let opts = SweepOptions {
        blocks: 64,
        seed: 11,
        spec: QuantizationSpec::none(),
    };
    let on_bin: Vec<f64> = (1..8).map(|k| 2.0 * PI * k as f64 / 32.0).collect();
    let mid: Vec<f64> = (0..8).map(|k| mid_bin(k, 32)).collect();
    let on = sndr_sweep(&cfg, 80.0, &on_bin, &opts).unwrap();
    let off = sndr_sweep(&cfg, 80.0, &mid, &opts).unwrap();
    let on_range = on.iter().map(|p| p.sndr_db).fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(v), a.1.max(v)));
    let off_range = off.iter().map(|p| p.sndr_db).fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(v), a.1.max(v)));
    let on_ok = on.iter().all(|p| (p.sndr_db - 80.0).abs() <= 1.0);
    let off_ok = off.iter().all(|p| (5.0..=20.0).contains(&p.sndr_db));

    // Line spectrum of an off-bin tone against the aliasing-function prediction.
    let w0 = mid_bin(6, 32);
    let mut rng = rng(111);
    let x = blockconv::interp::noisy_tone(2.0 * w0, 16 * 64, 80.0, &mut rng);
    let y = zero_pad_interpolate(&x, &cfg, &QuantizationSpec::none()).unwrap();
    let measured = tone_lines(&y, w0, 32);
    let predicted = predicted_tone_lines(&cfg, w0, &QuantizationSpec::none(), &SpectralGrid::new(4096).unwrap()).unwrap();
    let mut images = 0;
    let mut worst_db: f64 = 0.0;
    for (s, (m, p)) in measured.iter().zip(&predicted).enumerate() {
        let pdb = to_db(p.norm());
        if pdb < -80.0 {
            continue;
        }
        if s != 0 {
            images += 1;
        }
        worst_db = worst_db.max((to_db(m.norm()) - pdb).abs());
    }
    all_of(vec![
        ("on-bin", on_ok, format!("SNDR {:.2}..{:.2} dB (80 +/- 1)", on_range.0, on_range.1)),
        ("mid-bin", off_ok, format!("SNDR {:.2}..{:.2} dB (within [5, 20])", off_range.0, off_range.1)),
        (
            "images",
            images >= 2 && worst_db <= 3.0,
            format!("{images} image lines above -80 dB, max |measured - predicted| {worst_db:.3} dB (<= 3 dB)"),
        ),
    ])
}

fn criterion_12() -> Outcome {
    let h = blockconv::design::ls_lowpass_35();
    let h: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let s = setup(&h, Method::OverlapAdd, 30, 64, QuantizationSpec::all(8));
    let grid = SpectralGrid::with_period(SpectralGrid::DEFAULT_POINTS, 30).unwrap();
    let set = ptvir_from_bank(&s.coeffs, &s.bank).unwrap();
    let stop = |g: usize| {
        let w = grid.omega(g);
        (0.5 * PI..=1.5 * PI).contains(&w)
    };
    let hn_peak = set
        .frequency_responses(&grid)
        .iter()
        .flat_map(|r| r.iter().enumerate().filter(|(g, _)| stop(*g)).map(|(_, v)| v.norm()))
        .fold(0.0, f64::max);
    let v = distortion_aliasing(&s.coeffs, &s.bank, &grid).unwrap();
    let alias_peak = v[1..].iter().map(|vp| max_abs(vp)).fold(0.0, f64::max);
    let margin = to_db(hn_peak) - to_db(alias_peak);
    outcome(
        margin > 3.0,
        format!(
            "H_n stopband peak {:.1} dB, aliasing peak {:.1} dB, margin {margin:.1} dB (> 3 dB)",
            to_db(hn_peak),
            to_db(alias_peak)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("convolution equivalence", criterion_1),
        ("overlap-add reference responses", criterion_2),
        ("overlap-save reference responses", criterion_3),
        ("overlap-save fully quantized", criterion_4),
        ("length and circular-shift truth table", criterion_5),
        ("representation consistency", criterion_6),
        ("three-route PTVIR agreement", criterion_7),
        ("unquantized exactness", criterion_8),
        ("complexity crossovers", criterion_9),
        ("optimal-N machinery", criterion_10),
        ("interpolation SNDR and images", criterion_11),
        ("stopband vs aliasing margin", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
