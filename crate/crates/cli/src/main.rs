//! `blockconv`: block convolution, filter-bank and time-varying impulse
//! response analysis, complexity planning and DFT interpolation from the
//! command line.
//!
//! Exit status: 0 success, 2 configuration error, 3 I/O or parse error,
//! 4 numerical contract violation (for example `--assert` exceeded).

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use blockconv::complexity::DEFAULT_P_MAX;
use blockconv::{ArithmeticCase, Method, QuantTarget, QuantizationSpec, RoundingMode, SpectralGrid};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::io::Format;

#[derive(Parser, Debug)]
#[command(name = "blockconv", version, about = "Overlap-add / overlap-save analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter an input sample file with an OLA or OLS engine.
    Convolve(ConvolveArgs),
    /// Distortion and aliasing functions |V_p| in dB, one column per p.
    Mfb(MfbArgs),
    /// The M time-varying impulse responses h_n and their properties.
    Ptvir(PtvirArgs),
    /// Multiplication rates, best power-of-two N and the optimal N.
    Complexity(ComplexityArgs),
    /// SNDR sweep or image lines of DFT zero-padding interpolation.
    Interp(InterpArgs),
    /// Print the manual page in roff format, or write one page per
    /// subcommand into a directory.
    Man {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Ola,
    Ols,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ola => Method::OverlapAdd,
            MethodArg::Ols => Method::OverlapSave,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    /// DFT filter coefficients H(k)
    H,
    /// forward DFT exponentials (analysis filters g_k)
    G,
    /// inverse DFT exponentials (synthesis filters f_k)
    F,
}

impl From<TargetArg> for QuantTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::H => QuantTarget::DftFilterCoeffs,
            TargetArg::G => QuantTarget::AnalysisExponentials,
            TargetArg::F => QuantTarget::SynthesisExponentials,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RoundingArg {
    /// nearest, ties away from zero
    Nearest,
    /// toward negative infinity
    Truncate,
}

#[derive(Args, Debug)]
struct QuantArgs {
    /// Fractional bits of the quantizer.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    /// What to quantize; repeat or comma-separate. Nothing is quantized by default.
    #[arg(long, value_enum, value_delimiter = ',', num_args = 1..)]
    quantize: Vec<TargetArg>,
    #[arg(long, value_enum, default_value_t = RoundingArg::Nearest)]
    rounding: RoundingArg,
}

impl QuantArgs {
    fn spec(&self) -> QuantizationSpec {
        if self.quantize.is_empty() {
            return QuantizationSpec::none();
        }
        let targets: Vec<QuantTarget> = self.quantize.iter().map(|&t| t.into()).collect();
        let mode = match self.rounding {
            RoundingArg::Nearest => RoundingMode::HalfAwayFromZero,
            RoundingArg::Truncate => RoundingMode::Truncate,
        };
        QuantizationSpec::new(self.bits, &targets).with_mode(mode)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Fixture name (table2_h, ls_lowpass_35, identity) or sample file.
    #[arg(long)]
    filter: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Ola)]
    method: MethodArg,
    /// Filter length; must match the filter when given.
    #[arg(short = 'L')]
    filter_len: Option<usize>,
    /// Block step.
    #[arg(short = 'M')]
    step: usize,
    /// DFT length; defaults to L + M - 1.
    #[arg(short = 'N')]
    dft_len: Option<usize>,
    #[command(flatten)]
    quant: QuantArgs,
}

#[derive(Args, Debug)]
struct ConvolveArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Input sample file.
    #[arg(long)]
    input: PathBuf,
    /// Also write the direct convolution and its maximum relative deviation.
    #[arg(long)]
    oracle: bool,
    /// Exit with status 4 when the oracle deviation exceeds this tolerance.
    #[arg(long = "assert", value_name = "TOL")]
    assert_tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MfbArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Minimum grid size; rounded up to a multiple of M and at least 2N.
    #[arg(long, default_value_t = SpectralGrid::DEFAULT_POINTS)]
    grid: usize,
    /// Cross-check against V_p computed from the time-varying responses.
    #[arg(long)]
    oracle: bool,
    /// Exit with status 4 when the cross-check deviation exceeds this tolerance.
    #[arg(long = "assert", value_name = "TOL")]
    assert_tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PtvirArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Emit |H_n| in dB on a grid instead of the coefficients.
    #[arg(long)]
    spectra: bool,
    #[arg(long, default_value_t = SpectralGrid::DEFAULT_POINTS)]
    grid: usize,
    /// Relative threshold for effective lengths and the shift check.
    #[arg(long, default_value_t = blockconv::ptvir::DEFAULT_LENGTH_EPS)]
    eps: f64,
    /// Cross-check the bank route against the closed form and an impulse probe.
    #[arg(long)]
    oracle: bool,
    /// Exit with status 4 when the cross-check deviation exceeds this tolerance.
    #[arg(long = "assert", value_name = "TOL")]
    assert_tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    /// complex, complex_symmetric, real or real_symmetric
    #[arg(long, default_value_t = ArithmeticCase::Real)]
    case: ArithmeticCase,
    /// A single filter length.
    #[arg(short = 'L', conflicts_with_all = ["l_min", "l_max"])]
    filter_len: Option<usize>,
    #[arg(long, default_value_t = 2)]
    l_min: usize,
    #[arg(long, default_value_t = 256)]
    l_max: usize,
    /// Largest power-of-two exponent searched for N.
    #[arg(long, default_value_t = DEFAULT_P_MAX)]
    p_max: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NyquistArg {
    Positive,
    Split,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GainArg {
    Unity,
    Factor,
}

#[derive(Args, Debug)]
struct InterpArgs {
    /// Interpolation factor.
    #[arg(short = 'P', default_value_t = 2)]
    factor: usize,
    /// Output block length.
    #[arg(short = 'N', default_value_t = 32)]
    block_len: usize,
    /// Input SNR in dB.
    #[arg(long, default_value_t = 80.0)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input length in blocks of N/P samples.
    #[arg(long, default_value_t = 64)]
    blocks: usize,
    /// Number of sweep frequencies over [0, pi/P).
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = NyquistArg::Positive)]
    nyquist: NyquistArg,
    #[arg(long, value_enum, default_value_t = GainArg::Factor)]
    gain: GainArg,
    /// Measure the N output lines of one tone at this high-rate omega/pi
    /// and compare with the prediction from V_p.
    #[arg(long, value_name = "OMEGA_OVER_PI")]
    tone: Option<f64>,
    /// With --tone: exit with status 4 when a line visible above -100 dB
    /// misses its prediction by more than this many dB.
    #[arg(long = "assert", value_name = "DB", requires = "tone")]
    assert_tol: Option<f64>,
    #[command(flatten)]
    quant: QuantArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Convolve(a) => commands::convolve(&a),
        Command::Mfb(a) => commands::mfb(&a),
        Command::Ptvir(a) => commands::ptvir(&a),
        Command::Complexity(a) => commands::complexity(&a),
        Command::Interp(a) => commands::interp(&a),
        Command::Man { dir: Some(dir) } => clap_mangen::generate_to(Cli::command(), &dir)
            .map_err(|e| CliError::Io(dir.display().to_string(), e)),
        Command::Man { dir: None } => clap_mangen::Man::new(Cli::command())
            .render(&mut std::io::stdout().lock())
            .map_err(|e| CliError::Io("<stdout>".into(), e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
