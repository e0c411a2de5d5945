//! `dsi` — curves, penalties, codecs, and simulations for source coding
//! with distortion side information. All outputs are CSV (header row, LF
//! line endings, 12 significant digits).
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure
//! (non-convergence, infeasible distortion, singular system).

// `!(hi > lo)` rejects NaN bounds along with empty ranges.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dsi_core::analytic::{
    fisher_bound, model_noisy_obs, model_weighted, rate_gap_hr, rate_gap_hr_quadrature,
    rd_gauss_both, rd_gauss_none, rd_hamming_both, rd_hamming_none, slb_group_hamming, DiscreteQ,
    FisherSpec, HammingSideModel,
};
use dsi_core::model::{
    load_model_json, ProbVec, QDistribution, RDCurve, RateUnits, LN_2, PROB_TOL,
};
use dsi_core::numeric::{
    ba_solve, ba_solve_conditional, ba_solve_enc, gauss_enc_upper_curve, wz_bruteforce_curve,
    BaProblem, BaResult, WzGrid,
};
use dsi_core::sim::{lattice2d_sim, mc_dft, mc_erasure, LatticeMode, McConfig};
use dsi_core::Error as CoreError;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "dsi",
    version,
    about = "Source coding with distortion side information: curves, penalties, codecs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-distortion curves (closed forms and numerical bounds)
    #[command(subcommand)]
    Curves(CurvesCommand),
    /// High-resolution rate penalty for an encoder without q
    Gap(GapArgs),
    /// Blahut-Arimoto on a JSON model at fixed slopes
    Ba(BaArgs),
    /// Exhaustive decoder-side-information oracle on a tiny JSON model
    WzOracle(WzArgs),
    /// Operational codecs driven by seeded Monte Carlo trials
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Quantizer demonstrations
    #[command(subcommand)]
    Sim(SimCommand),
    /// Conditional Shannon lower bound
    #[command(subcommand)]
    Slb(SlbCommand),
}

#[derive(Subcommand)]
enum CurvesCommand {
    /// Binary source, side-information-weighted Hamming distortion
    Hamming(HammingArgs),
    /// Unit-variance Gaussian source, scaled quadratic distortion
    Gaussian(GaussianArgs),
}

#[derive(Subcommand)]
enum CodecCommand {
    /// Polynomial-interpolation coding of relevant samples over GF(2^m)
    Erasure(ErasureArgs),
    /// Band-limited DFT interpolation with uniform coefficient quantization
    Dft(DftArgs),
}

#[derive(Subcommand)]
enum SimCommand {
    /// 2-D fixed-codebook/variable-partition quantizer
    Lattice2d(LatticeArgs),
}

#[derive(Subcommand)]
enum SlbCommand {
    /// Source uniform on Z_m with distortion q * 1[z != 0]
    GroupHamming(SlbArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Bits,
    Nats,
}

impl From<UnitsArg> for RateUnits {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Bits => RateUnits::Bits,
            UnitsArg::Nats => RateUnits::Nats,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output path (standard output when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HammingPreset {
    NoisyObs,
    Weighted,
}

#[derive(Args)]
struct HammingArgs {
    /// Model preset; omit to pass --alphas/--betas/--pq directly
    #[arg(long, value_enum)]
    preset: Option<HammingPreset>,
    /// Side-information alphabet size for the presets
    #[arg(long = "N", alias = "n", short = 'N', default_value_t = 2)]
    n: usize,
    /// Exponential weight growth for the weighted preset
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Comma-separated per-q distortion offsets
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    alphas: Vec<f64>,
    /// Comma-separated per-q Hamming weights
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    betas: Vec<f64>,
    /// Comma-separated q probabilities
    #[arg(long, value_delimiter = ',', conflicts_with = "preset")]
    pq: Vec<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Grid start (defaults to the minimum feasible distortion)
    #[arg(long)]
    d_min: Option<f64>,
    /// Grid end (defaults to the zero-rate distortion)
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long, value_enum, default_value = "bits")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GaussianArgs {
    /// Side-information values as value:prob pairs, e.g. "1:0.6,10:0.4"
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Grid start
    #[arg(long, default_value_t = 1e-3)]
    d_min: f64,
    /// Grid end (defaults to E[q], the zero-rate distortion)
    #[arg(long)]
    d_max: Option<f64>,
    /// Slope samples for the encoder-side upper bound
    #[arg(long, default_value_t = 200)]
    slopes: usize,
    /// Fisher information of the source for the bound column
    #[arg(long, default_value_t = 1.0)]
    fisher_j: f64,
    #[arg(long, value_enum, default_value = "bits")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GapFamily {
    Constant,
    Exponential,
    Uniform01,
    Lognormal,
    Pareto,
    Gamma,
    Pathological,
    PositiveCauchy,
    Discrete,
}

impl GapFamily {
    fn name(self) -> &'static str {
        match self {
            GapFamily::Constant => "constant",
            GapFamily::Exponential => "exponential",
            GapFamily::Uniform01 => "uniform01",
            GapFamily::Lognormal => "lognormal",
            GapFamily::Pareto => "pareto",
            GapFamily::Gamma => "gamma",
            GapFamily::Pathological => "pathological",
            GapFamily::PositiveCauchy => "positive-cauchy",
            GapFamily::Discrete => "discrete",
        }
    }
}

#[derive(Args)]
struct GapArgs {
    #[arg(long, value_enum)]
    family: GapFamily,
    /// Rate parameter for the exponential family
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Log-mean for the lognormal family
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    m: f64,
    /// Log-variance for the lognormal family
    #[arg(long, default_value_t = 1.0)]
    q_sq: f64,
    /// Shape for pareto/gamma
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Scale for pareto/gamma
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Mixing weight for the pathological family
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Value for the constant family
    #[arg(long, default_value_t = 1.0)]
    value: f64,
    /// value:prob pairs for the discrete family
    #[arg(long)]
    q: Option<String>,
    /// Source dimension
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Distortion exponent
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Penalties print in nats by default, matching the asymptotic formula
    #[arg(long, value_enum, default_value = "nats")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaMode {
    None,
    Both,
    Enc,
}

#[derive(Args)]
struct BaArgs {
    /// JSON model file (px, p_w_given_x, p_q_given_w, d)
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    mode: BaMode,
    /// Comma-separated slope multipliers (nats per unit distortion)
    #[arg(long, value_delimiter = ',', required = true)]
    slope: Vec<f64>,
    #[arg(long, value_enum, default_value = "bits")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WzArgs {
    #[arg(long)]
    model: PathBuf,
    /// Auxiliary alphabet size (defaults to |X| + 1)
    #[arg(long)]
    u: Option<usize>,
    /// Simplex grid resolution per dimension
    #[arg(long, default_value_t = 33)]
    grid: usize,
    /// Distortions to evaluate the envelope at
    #[arg(long, value_delimiter = ',', required = true)]
    distortion: Vec<f64>,
    #[arg(long, value_enum, default_value = "bits")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ErasureArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Field degree (3, 4, or 8)
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Seed (defaults to DSI_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DftArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Quantizer step
    #[arg(long)]
    step: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeModeArg {
    EncoderInformed,
    DecoderInformed,
    Blind,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, value_enum)]
    mode: LatticeModeArg,
    #[arg(long)]
    delta: f64,
    /// Probability that the horizontal axis is the relevant one
    #[arg(long, default_value_t = 0.5)]
    p_axis: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SlbArgs {
    /// Group order
    #[arg(long)]
    m: usize,
    /// Side-information values as value:prob pairs
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long)]
    d_min: Option<f64>,
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long, value_enum, default_value = "bits")]
    units: UnitsArg,
    #[command(flatten)]
    output: OutputArgs,
}

// ---------------------------------------------------------------------------
// Failure taxonomy
// ---------------------------------------------------------------------------

enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InfeasibleDistortion { .. }
            | CoreError::NonConvergence { .. }
            | CoreError::SingularSystem { .. }
            | CoreError::QuadratureFailure { .. }
            | CoreError::SearchBudgetExceeded(_) => Failure::Numerical(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// CSV plumbing
// ---------------------------------------------------------------------------

/// 12 significant digits, trailing zeros trimmed; infinities print as
/// inf/-inf so penalty columns stay machine-parsable.
fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        s
    } else {
        let s = format!("{x:.11e}");
        // normalize "1.50000000000e-13" -> "1.5e-13"
        match s.split_once('e') {
            Some((mant, e)) => {
                let mant = mant.trim_end_matches('0').trim_end_matches('.');
                format!("{mant}e{e}")
            }
            None => s,
        }
    };
    s
}

fn write_csv(out: &Option<PathBuf>, header: &str, rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut text = String::with_capacity(rows.len() * 48 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("DSI_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|e| Failure::Usage(format!("DSI_SEED {v:?} is not a valid seed: {e}"))),
        Err(_) => Ok(0),
    }
}

/// Curves are validated against the convexity/monotonicity invariants
/// before anything is written.
fn validated_curve(points: Vec<(f64, f64)>, units: RateUnits) -> Result<RDCurve, Failure> {
    RDCurve::new(points, units).map_err(|e| Failure::Numerical(format!("curve invariant: {e}")))
}

fn grid(lo: f64, hi: f64, points: usize, log_spaced: bool) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(Failure::Usage(format!(
            "need at least 2 points, got {points}"
        )));
    }
    if !(hi > lo) {
        return Err(Failure::Usage(format!("empty grid [{lo}, {hi}]")));
    }
    let n = points;
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log_spaced {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_hamming(args: &HammingArgs) -> Result<(), Failure> {
    let model: HammingSideModel = match args.preset {
        Some(HammingPreset::NoisyObs) => model_noisy_obs(args.n).map_err(Failure::from)?,
        Some(HammingPreset::Weighted) => {
            model_weighted(args.n, args.gamma).map_err(Failure::from)?
        }
        None => {
            if args.alphas.is_empty() || args.betas.is_empty() || args.pq.is_empty() {
                return Err(Failure::Usage(
                    "pass --preset or all of --alphas/--betas/--pq".into(),
                ));
            }
            let pq = ProbVec::new(args.pq.clone()).map_err(Failure::from)?;
            HammingSideModel::new(args.alphas.clone(), args.betas.clone(), pq)
                .map_err(Failure::from)?
        }
    };
    let lo = args.d_min.unwrap_or_else(|| model.d_min());
    let hi = args.d_max.unwrap_or_else(|| model.d_max());
    let ds = grid(lo, hi, args.points, false)?;
    let units: RateUnits = args.units.into();
    let mut none_pts = Vec::new();
    let mut both_pts = Vec::new();
    let mut lambdas = Vec::new();
    for &d in &ds {
        let rn = rd_hamming_none(&model, d).map_err(Failure::from)?;
        let rb = rd_hamming_both(&model, d).map_err(Failure::from)?;
        none_pts.push((d, units.from_nats(rn * LN_2)));
        both_pts.push((d, units.from_nats(rb.rate_bits * LN_2)));
        lambdas.push(rb.lambda);
    }
    validated_curve(none_pts.clone(), units)?;
    validated_curve(both_pts.clone(), units)?;
    let unit_name = if units == RateUnits::Bits {
        "bits"
    } else {
        "nats"
    };
    let header = format!("D,R_none_{unit_name},R_both_{unit_name},lambda");
    let rows: Vec<Vec<String>> = ds
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            vec![
                fmt12(d),
                fmt12(none_pts[i].1),
                fmt12(both_pts[i].1),
                fmt12(lambdas[i]),
            ]
        })
        .collect();
    write_csv(&args.output.out, &header, &rows)
}

fn run_gaussian(args: &GaussianArgs) -> Result<(), Failure> {
    let model = DiscreteQ::parse(&args.q).map_err(Failure::from)?;
    let hi = args.d_max.unwrap_or_else(|| model.e_q());
    let ds = grid(args.d_min, hi, args.points, true)?;
    let units: RateUnits = args.units.into();
    let enc_curve = gauss_enc_upper_curve(&model, &ds, args.slopes).map_err(Failure::from)?;
    let fisher = FisherSpec::new(args.fisher_j, model.q_min()).map_err(Failure::from)?;
    let mut none_pts = Vec::new();
    let mut both_pts = Vec::new();
    let mut fisher_col = Vec::new();
    for &d in &ds {
        none_pts.push((
            d,
            units.from_nats(rd_gauss_none(&model, d).map_err(Failure::from)?),
        ));
        both_pts.push((
            d,
            units.from_nats(rd_gauss_both(&model, d).map_err(Failure::from)?.rate_nats),
        ));
        fisher_col.push(units.from_nats(fisher_bound(&fisher, d)));
    }
    validated_curve(none_pts.clone(), units)?;
    validated_curve(both_pts.clone(), units)?;
    let enc_curve = enc_curve.to_units(units);
    enc_curve
        .validate()
        .map_err(|e| Failure::Numerical(format!("curve invariant: {e}")))?;
    // Rates in all four curve columns are in the selected unit (bits by
    // default).
    let header = "D,R_none,R_both,R_enc_upper,fisher_bound".to_string();
    let rows: Vec<Vec<String>> = ds
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            vec![
                fmt12(d),
                fmt12(none_pts[i].1),
                fmt12(both_pts[i].1),
                fmt12(enc_curve.points[i].1),
                fmt12(fisher_col[i]),
            ]
        })
        .collect();
    write_csv(&args.output.out, &header, &rows)
}

fn gap_distribution(args: &GapArgs) -> Result<(QDistribution, String), Failure> {
    let (dist, params) = match args.family {
        GapFamily::Constant => (
            QDistribution::Constant(args.value),
            format!("c={}", args.value),
        ),
        GapFamily::Exponential => (
            QDistribution::Exponential { tau: args.tau },
            format!("tau={}", args.tau),
        ),
        GapFamily::Uniform01 => (QDistribution::Uniform01, String::new()),
        GapFamily::Lognormal => (
            QDistribution::LogNormal {
                m: args.m,
                q_sq: args.q_sq,
            },
            format!("M={};Q2={}", args.m, args.q_sq),
        ),
        GapFamily::Pareto => (
            QDistribution::Pareto {
                a: args.a,
                b: args.b,
            },
            format!("a={};b={}", args.a, args.b),
        ),
        GapFamily::Gamma => (
            QDistribution::Gamma {
                a: args.a,
                b: args.b,
            },
            format!("a={};b={}", args.a, args.b),
        ),
        GapFamily::Pathological => (
            QDistribution::Pathological { eps: args.eps },
            format!("eps={}", args.eps),
        ),
        GapFamily::PositiveCauchy => (QDistribution::PositiveCauchy, String::new()),
        GapFamily::Discrete => {
            let spec = args
                .q
                .as_deref()
                .ok_or_else(|| Failure::Usage("discrete family needs --q value:prob,...".into()))?;
            let dq = DiscreteQ::parse(spec).map_err(Failure::from)?;
            (
                QDistribution::Discrete {
                    values: dq.values().to_vec(),
                    probs: dq.probs().clone(),
                },
                spec.replace(',', ";"),
            )
        }
    };
    Ok((dist, params))
}

fn run_gap(args: &GapArgs) -> Result<(), Failure> {
    let (dist, params) = gap_distribution(args)?;
    let closed = rate_gap_hr(&dist, args.k, args.r).map_err(Failure::from)?;
    let quad = rate_gap_hr_quadrature(&dist, args.k, args.r).map_err(Failure::from)?;
    let units: RateUnits = args.units.into();
    let u = if units == RateUnits::Bits {
        "bits"
    } else {
        "nats"
    };
    let family = args.family.name().to_string();
    let header = format!("family,params,k,r,gap_{u},gap_quadrature_{u}");
    let rows = vec![vec![
        family,
        params,
        args.k.to_string(),
        fmt12(args.r),
        fmt12(units.from_nats(closed)),
        fmt12(units.from_nats(quad)),
    ]];
    write_csv(&args.output.out, &header, &rows)
}

fn load_independent_model(
    path: &PathBuf,
) -> Result<(ProbVec, ProbVec, dsi_core::model::DistortionTensor), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let (model, d) = load_model_json(&text).map_err(Failure::from)?;
    if !model.q_x_independent(PROB_TOL.max(1e-9)) {
        return Err(Failure::Usage(
            "model has q statistically dependent on x; the solvers here need \
             marginal independence (use |W| = 1 or an independent chain)"
                .into(),
        ));
    }
    let pq = ProbVec::new(model.pq()).map_err(Failure::from)?;
    Ok((model.px().clone(), pq, d))
}

fn run_ba(args: &BaArgs) -> Result<(), Failure> {
    let (px, pq, d) = load_independent_model(&args.model)?;
    let units: RateUnits = args.units.into();
    let u = if units == RateUnits::Bits {
        "bits"
    } else {
        "nats"
    };
    let header = format!("slope,distortion,rate_{u},i_xhat_q_{u},iterations,converged");
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &slope in &args.slope {
        let result: BaResult = match args.mode {
            BaMode::None => ba_solve(&BaProblem {
                px: px.clone(),
                d: d.averaged(pq.as_slice()),
                slope,
            })
            .map_err(Failure::from)?,
            BaMode::Both => ba_solve_conditional(&px, &pq, &d, slope).map_err(Failure::from)?,
            BaMode::Enc => ba_solve_enc(&px, &pq, &d, slope).map_err(Failure::from)?,
        };
        if !result.converged {
            return Err(Failure::Numerical(format!(
                "Blahut-Arimoto did not converge at slope {slope} \
                 ({} iterations)",
                result.iterations
            )));
        }
        let i_xq = result
            .enc
            .as_ref()
            .map(|e| fmt12(units.from_nats(e.i_xhat_q_nats)))
            .unwrap_or_default();
        points.push((result.distortion, units.from_nats(result.rate_nats)));
        rows.push(vec![
            fmt12(slope),
            fmt12(result.distortion),
            fmt12(units.from_nats(result.rate_nats)),
            i_xq,
            result.iterations.to_string(),
            result.converged.to_string(),
        ]);
    }
    if points.len() >= 2 {
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        validated_curve(points, units)?;
    }
    write_csv(&args.output.out, &header, &rows)
}

fn run_wz(args: &WzArgs) -> Result<(), Failure> {
    let (px, pq, d) = load_independent_model(&args.model)?;
    let u_size = args.u.unwrap_or(px.len() + 1);
    let wz_grid = WzGrid::new(u_size, args.grid).map_err(Failure::from)?;
    let hull = wz_bruteforce_curve(&px, &pq, &d, wz_grid).map_err(Failure::from)?;
    let units: RateUnits = args.units.into();
    let u = if units == RateUnits::Bits {
        "bits"
    } else {
        "nats"
    };
    let mut ds = args.distortion.clone();
    ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut points = Vec::new();
    for &dtarget in &ds {
        if dtarget < hull[0].0 {
            return Err(Failure::Numerical(
                CoreError::InfeasibleDistortion {
                    d: dtarget,
                    lo: hull[0].0,
                    hi: hull[hull.len() - 1].0,
                }
                .to_string(),
            ));
        }
        let bits = dsi_core::numeric::envelope::eval_envelope(&hull, dtarget);
        points.push((dtarget, units.from_nats(bits * LN_2)));
    }
    if points.len() >= 2 {
        validated_curve(points.clone(), units)?;
    }
    let header = format!("distortion,rate_upper_{u}");
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|&(d, r)| vec![fmt12(d), fmt12(r)])
        .collect();
    write_csv(&args.output.out, &header, &rows)
}

fn run_erasure(args: &ErasureArgs) -> Result<(), Failure> {
    let seed = seed_or_env(args.seed)?;
    let cfg = McConfig::new(seed, args.trials).map_err(Failure::from)?;
    let report = mc_erasure(args.n, args.k, args.m, &cfg).map_err(Failure::from)?;
    let header = "n,k,m,trials,seed,relevant_errors,bits_per_relevant_symbol,\
                  uninformed_bits_per_relevant_symbol";
    let rows = vec![vec![
        args.n.to_string(),
        args.k.to_string(),
        args.m.to_string(),
        args.trials.to_string(),
        seed.to_string(),
        report.relevant_errors.to_string(),
        fmt12(report.bits_per_relevant_symbol.mean),
        fmt12(report.uninformed_bits_per_relevant_symbol),
    ]];
    write_csv(&args.output.out, header, &rows)
}

fn run_dft(args: &DftArgs) -> Result<(), Failure> {
    let seed = seed_or_env(args.seed)?;
    let cfg = McConfig::new(seed, args.trials).map_err(Failure::from)?;
    let report = mc_dft(args.n, args.k, args.step, &cfg).map_err(Failure::from)?;
    let header = "n,k,step,trials,seed,relevant_mse,relevant_mse_stderr,coeff_mse,\
                  coeff_mse_stderr,ratio,ratio_stderr,kappa_p50,kappa_p90,kappa_max,\
                  singular_excluded,identity_max_rel_err,index_entropy_bits";
    let rows = vec![vec![
        args.n.to_string(),
        args.k.to_string(),
        fmt12(args.step),
        args.trials.to_string(),
        seed.to_string(),
        fmt12(report.relevant_mse.mean),
        fmt12(report.relevant_mse.stderr),
        fmt12(report.coeff_mse.mean),
        fmt12(report.coeff_mse.stderr),
        fmt12(report.ratio.mean),
        fmt12(report.ratio.stderr),
        fmt12(report.kappa.p50),
        fmt12(report.kappa.p90),
        fmt12(report.kappa.max),
        report.singular_excluded.to_string(),
        fmt12(report.identity_max_rel_err),
        fmt12(report.index_entropy_bits.mean),
    ]];
    write_csv(&args.output.out, header, &rows)
}

fn run_lattice(args: &LatticeArgs) -> Result<(), Failure> {
    let seed = seed_or_env(args.seed)?;
    let cfg = McConfig::new(seed, args.trials).map_err(Failure::from)?;
    let mode = match args.mode {
        LatticeModeArg::EncoderInformed => LatticeMode::EncoderInformed,
        LatticeModeArg::DecoderInformed => LatticeMode::DecoderInformed,
        LatticeModeArg::Blind => LatticeMode::Blind,
    };
    let report = lattice2d_sim(mode, args.delta, args.p_axis, &cfg).map_err(Failure::from)?;
    let mode_name = match args.mode {
        LatticeModeArg::EncoderInformed => "encoder-informed",
        LatticeModeArg::DecoderInformed => "decoder-informed",
        LatticeModeArg::Blind => "blind",
    };
    let header = "mode,delta,p_axis,trials,seed,rate_bits,rate_stderr,relevant_mse,mse_stderr";
    let rows = vec![vec![
        mode_name.to_string(),
        fmt12(args.delta),
        fmt12(args.p_axis),
        args.trials.to_string(),
        seed.to_string(),
        fmt12(report.rate_bits.mean),
        fmt12(report.rate_bits.stderr),
        fmt12(report.relevant_mse.mean),
        fmt12(report.relevant_mse.stderr),
    ]];
    write_csv(&args.output.out, header, &rows)
}

fn run_slb(args: &SlbArgs) -> Result<(), Failure> {
    let q = DiscreteQ::parse(&args.q).map_err(Failure::from)?;
    let d_cap = q.e_q() * (args.m as f64 - 1.0) / args.m as f64;
    let lo = args.d_min.unwrap_or(d_cap * 1e-3);
    let hi = args.d_max.unwrap_or(d_cap * 0.999);
    let ds = grid(lo, hi, args.points, false)?;
    let units: RateUnits = args.units.into();
    let u = if units == RateUnits::Bits {
        "bits"
    } else {
        "nats"
    };
    let mut points = Vec::new();
    for &d in &ds {
        let r = slb_group_hamming(args.m, &q, d).map_err(Failure::from)?;
        points.push((d, units.from_nats(r * LN_2)));
    }
    validated_curve(points.clone(), units)?;
    let header = format!("distortion,r_lower_{u}");
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|&(d, r)| vec![fmt12(d), fmt12(r)])
        .collect();
    write_csv(&args.output.out, &header, &rows)
}

// ---------------------------------------------------------------------------

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Curves(CurvesCommand::Hamming(a)) => run_hamming(a),
        Command::Curves(CurvesCommand::Gaussian(a)) => run_gaussian(a),
        Command::Gap(a) => run_gap(a),
        Command::Ba(a) => run_ba(a),
        Command::WzOracle(a) => run_wz(a),
        Command::Codec(CodecCommand::Erasure(a)) => run_erasure(a),
        Command::Codec(CodecCommand::Dft(a)) => run_dft(a),
        Command::Sim(SimCommand::Lattice2d(a)) => run_lattice(a),
        Command::Slb(SlbCommand::GroupHamming(a)) => run_slb(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
