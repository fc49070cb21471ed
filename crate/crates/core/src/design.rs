//! Embedded example filters and a Kaiser-windowed sinc designer.

use std::f64::consts::PI;

use crate::block_conv::ImpulseResponse;
use crate::error::{Error, Result};

/// Seven-tap linear-phase lowpass used by the worked examples.
pub const TABLE2_H: [f64; 7] = [
    -0.065517977199101,
    0.054777425047761,
    0.314937451772624,
    0.464142316077418,
    0.314937451772624,
    0.054777425047761,
    -0.065517977199101,
];

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 3] = ["table2_h", "ls_lowpass_35", "identity"];

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser `beta` for a stopband attenuation of `atten_db`.
pub fn kaiser_beta(atten_db: f64) -> f64 {
    if atten_db > 50.0 {
        0.1102 * (atten_db - 8.7)
    } else if atten_db >= 21.0 {
        0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0)
    } else {
        0.0
    }
}

pub fn kaiser_window(len: usize, beta: f64) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = bessel_i0(beta);
    (0..len)
        .map(|n| {
            let r = 2.0 * n as f64 / (len - 1) as f64 - 1.0;
            bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / denom
        })
        .collect()
}

/// Linear-phase lowpass: ideal response with cutoff `cutoff` (rad/sample)
/// times a Kaiser window.
pub fn kaiser_lowpass(len: usize, cutoff: f64, beta: f64) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(Error::Empty);
    }
    if !(cutoff > 0.0 && cutoff < PI) {
        return Err(Error::config(format!("cutoff {cutoff} must lie in (0, pi)")));
    }
    let centre = (len - 1) as f64 / 2.0;
    let win = kaiser_window(len, beta);
    Ok((0..len)
        .map(|n| {
            let t = n as f64 - centre;
            let ideal = if t == 0.0 {
                cutoff / PI
            } else {
                (cutoff * t).sin() / (PI * t)
            };
            ideal * win[n]
        })
        .collect())
}

/// Length-35 lowpass with passband edge `0.3 pi`, stopband edge `0.5 pi`
/// and a 60 dB Kaiser window.
pub fn ls_lowpass_35() -> Vec<f64> {
    kaiser_lowpass(35, 0.4 * PI, kaiser_beta(60.0)).expect("valid design")
}

/// Resolve an embedded filter by name.
pub fn fixture(name: &str) -> Result<ImpulseResponse> {
    match name {
        "table2_h" => ImpulseResponse::from_real(&TABLE2_H),
        "ls_lowpass_35" => ImpulseResponse::from_real(&ls_lowpass_35()),
        "identity" => ImpulseResponse::from_real(&[1.0]),
        _ => Err(Error::config(format!(
            "unknown fixture '{name}' (expected one of {})",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}
