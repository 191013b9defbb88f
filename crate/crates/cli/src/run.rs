//! Argument schema and subcommand dispatch.

use crate::output::{complex_json, fmt, Csv, Sink};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_bvp::asymptotics::{sector_model, SectorModel};
use dirac_bvp::classify::{classify, ClassifyReport, CompletenessStatus, DissipativityVerdict, RieszVerdict};
use dirac_bvp::json::{parse_beam, parse_system, system_to_json};
use dirac_bvp::linalg::{c64, C64, CMat, ScaledC64, I};
use dirac_bvp::propagator::{char_determinant_scaled, gauge_normalize, StepControl};
use dirac_bvp::resolvent::{green_function, svalue_profile};
use dirac_bvp::rootfns::{root_chains, ChainOptions};
use dirac_bvp::sectors::compute_fan;
use dirac_bvp::spectrum::{group_blocks, locate_eigenvalues, Region};
use dirac_bvp::timoshenko::{beam_conditions, reduce_to_dirac};
use dirac_bvp::{DiracBVP, Error as CoreError};

use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or structurally invalid input (exit 2).
    Input(String),
    /// Numerical failure (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_) | CoreError::Invalid(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("io: {e}"))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn parse_complex(s: &str) -> std::result::Result<ComplexArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected re,im".into());
    }
    let re: f64 = parts[0].trim().parse().map_err(|e| format!("re: {e}"))?;
    let im: f64 = parts[1].trim().parse().map_err(|e| format!("im: {e}"))?;
    Ok(ComplexArg(c64(re, im)))
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexArg(pub C64);

fn parse_region(s: &str) -> std::result::Result<RegionArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected x0,x1,y0,y1".into());
    }
    let vals: std::result::Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse()).collect();
    let v = vals.map_err(|e| format!("{e}"))?;
    if v[0] >= v[1] || v[2] >= v[3] {
        return Err("region must satisfy x0 < x1 and y0 < y1".into());
    }
    Ok(RegionArg(Region::new(v[0], v[1], v[2], v[3])))
}

#[derive(Debug, Clone, Copy)]
pub struct RegionArg(pub Region);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Numerics {
    /// Root refinement tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Integrator steps per unit interval at lambda = 0 (scaled with |lambda|).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sample grid cells for function outputs.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Seed for stochastic probes (all current subcommands are deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Numerics {
    fn ctrl(&self) -> StepControl {
        let mut ctrl = StepControl::default();
        if let Some(s) = self.steps {
            ctrl.base_steps = s.max(16);
        }
        ctrl
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dirac-bvp",
    version,
    about = "Spectral analysis of -i B^{-1} y' + Q(x) y = lambda y with boundary conditions C y(0) + D y(1) = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separating lines, sectors, sign patterns and det T per sector.
    Fan {
        input: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// Full structural report: regularity, completeness, normality,
    /// dissipativity, Riesz shape, synthesis.
    Classify {
        input: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// Eigenvalues with multiplicities in a rectangle.
    Spectrum {
        input: PathBuf,
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        region: RegionArg,
        /// Chain eigenvalues into Riesz blocks with this epsilon.
        #[arg(long)]
        group_eps: Option<f64>,
        /// Ray angles (radians) for the block grouping.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        num: Numerics,
    },
    /// Sample the characteristic determinant on a rectangle or a ray.
    Detscan {
        input: PathBuf,
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        region: Option<RegionArg>,
        #[arg(long, default_value_t = 64)]
        nx: usize,
        #[arg(long, default_value_t = 64)]
        ny: usize,
        /// Ray angle in radians (alternative to --region).
        #[arg(long, allow_hyphen_values = true)]
        ray: Option<f64>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        rmin: f64,
        #[arg(long, default_value_t = 50.0)]
        rmax: f64,
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Emit the sector-scaled determinant where a point lies strictly
        /// inside a sector (raw elsewhere).
        #[arg(long)]
        scaled: bool,
        #[command(flatten)]
        num: Numerics,
    },
    /// Per-sector asymptotic data gamma, tau, omega_0, omega_1.
    Asymptotics {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Emit a ray-scan comparison CSV for this sector index instead.
        #[arg(long)]
        ray_scan: Option<usize>,
        #[arg(long, default_value_t = 80.0)]
        rmax: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[command(flatten)]
        num: Numerics,
    },
    /// Root-function chains at a refined eigenvalue.
    Rootfns {
        input: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: ComplexArg,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
        #[command(flatten)]
        num: Numerics,
    },
    /// Green kernel values at (x, t) pairs.
    Green {
        input: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: ComplexArg,
        /// Semicolon-separated pairs: "x,t;x,t;...".
        #[arg(long)]
        at: String,
        #[command(flatten)]
        num: Numerics,
    },
    /// Singular values of the discretized resolvent with the per-weight
    /// series decomposition.
    Svalues {
        input: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: ComplexArg,
        #[arg(long = "N", default_value_t = 1024)]
        n_points: usize,
        #[arg(long, default_value_t = 60)]
        count: usize,
        #[command(flatten)]
        num: Numerics,
    },
    /// Trace of the resolvent difference of two problems.
    TraceDiff {
        input_a: PathBuf,
        input_b: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: ComplexArg,
        #[command(flatten)]
        num: Numerics,
    },
    /// Remove the diagonal blocks of Q by the determinant-preserving gauge;
    /// emits the transformed system document.
    Gauge {
        input: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// Reduce a Timoshenko beam to its 4x4 system; optionally evaluate the
    /// explicit condition sets and localize eigenvalues.
    Timoshenko {
        input: PathBuf,
        /// Write the reduced system document to this path.
        #[arg(long)]
        emit_dirac: Option<PathBuf>,
        /// Evaluate the completeness/Riesz condition sets.
        #[arg(long)]
        conditions: bool,
        /// Localize eigenvalues of the reduced problem in this rectangle.
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        spectrum: Option<RegionArg>,
        #[command(flatten)]
        num: Numerics,
    },
}

fn load_system(path: &PathBuf) -> Result<DiracBVP> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_system(&text)?)
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fan { input, num } => cmd_fan(&load_system(&input)?, &num),
        Command::Classify { input, num } => cmd_classify(&load_system(&input)?, &num),
        Command::Spectrum { input, region, group_eps, angles, format, num } => {
            cmd_spectrum(&load_system(&input)?, region.0, group_eps, &angles, format, &num)
        }
        Command::Detscan { input, region, nx, ny, ray, rmin, rmax, samples, scaled, num } => {
            cmd_detscan(&load_system(&input)?, region.map(|r| r.0), nx, ny, ray, rmin, rmax, samples, scaled, &num)
        }
        Command::Asymptotics { input, format, ray_scan, rmax, samples, num } => {
            cmd_asymptotics(&load_system(&input)?, format, ray_scan, rmax, samples, &num)
        }
        Command::Rootfns { input, lambda, multiplicity, num } => {
            cmd_rootfns(&load_system(&input)?, lambda.0, multiplicity, &num)
        }
        Command::Green { input, lambda, at, num } => cmd_green(&load_system(&input)?, lambda.0, &at, &num),
        Command::Svalues { input, lambda, n_points, count, num } => {
            cmd_svalues(&load_system(&input)?, lambda.0, n_points, count, &num)
        }
        Command::TraceDiff { input_a, input_b, lambda, num } => {
            let a = load_system(&input_a)?;
            let b = load_system(&input_b)?;
            cmd_trace_diff(&a, &b, lambda.0, &num)
        }
        Command::Gauge { input, num } => cmd_gauge(&load_system(&input)?, &num),
        Command::Timoshenko { input, emit_dirac, conditions, spectrum, num } => {
            cmd_timoshenko(&input, emit_dirac, conditions, spectrum.map(|r| r.0), &num)
        }
    }
}

fn cmd_fan(bvp: &DiracBVP, num: &Numerics) -> Result<()> {
    let fan = compute_fan(&bvp.weight)?;
    let sectors: Vec<serde_json::Value> = fan
        .sectors
        .iter()
        .map(|s| {
            let t = dirac_bvp::sectors::build_t(s.representative, &bvp.boundary.c, &bvp.boundary.d, &bvp.weight)
                .map(|t| t.det());
            serde_json::json!({
                "index": s.index,
                "phi_start": s.phi_start,
                "phi_end": s.phi_end,
                "representative": complex_json(s.representative),
                "signs": s.signs,
                "det_T": t.map(complex_json).unwrap_or(serde_json::Value::Null),
            })
        })
        .collect();
    let doc = serde_json::json!({"lines": fan.lines, "sectors": sectors});
    Sink::new(num.out.clone()).write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(())
}

fn completeness_json(report: &ClassifyReport) -> serde_json::Value {
    let c = &report.completeness;
    serde_json::json!({
        "status": match c.status {
            CompletenessStatus::CertifiedComplete => "certified_complete",
            CompletenessStatus::CertifiedIncomplete => "certified_incomplete",
            CompletenessStatus::Inconclusive => "inconclusive",
        },
        "rule": c.rule.map(|r| r.label()),
        "witnesses": c.witnesses.iter().map(|w| serde_json::json!({
            "z": complex_json(w.z),
            "omega0": complex_json(w.omega0),
            "omega1": w.omega1.map(complex_json),
        })).collect::<Vec<_>>(),
        "incompleteness_witness": c.incompleteness.as_ref().map(|w| serde_json::json!({
            "A": matrix_json(&w.a),
            "symmetric_cells": w.symmetric_cells.min(1_000_000),
            "total_cells": w.total_cells.min(1_000_000),
        })),
        "vanishing_half_plane_angle": c.vanishing_half_plane,
    })
}

fn matrix_json(m: &CMat) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows)
            .map(|i| serde_json::Value::Array((0..m.cols).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

fn cmd_classify(bvp: &DiracBVP, num: &Numerics) -> Result<()> {
    let report = classify(bvp, &num.ctrl())?;
    let riesz = match &report.riesz {
        RieszVerdict::BasisWithParentheses { angles, .. } => serde_json::json!({
            "verdict": "basis_with_parentheses",
            "angles": angles,
        }),
        RieszVerdict::No => serde_json::json!({"verdict": "no"}),
        RieszVerdict::Unknown => serde_json::json!({"verdict": "unknown"}),
    };
    let doc = serde_json::json!({
        "dirac_type": report.dirac_type,
        "regularity": {
            "regular": report.regularity.regular,
            "weakly_regular": report.regularity.weakly_regular,
            "degenerate": report.regularity.degenerate,
            "sector_det_T": report.regularity.sector_dets.iter().map(|&d| complex_json(d)).collect::<Vec<_>>(),
            "witness_triple": report.regularity.witness_triple.map(|t| t.iter().map(|&z| complex_json(z)).collect::<Vec<_>>()),
        },
        "completeness": completeness_json(&report),
        "normal": report.normal,
        "dissipativity": match report.dissipativity {
            DissipativityVerdict::Dissipative => "dissipative",
            DissipativityVerdict::Accumulative => "accumulative",
            DissipativityVerdict::Selfadjoint => "selfadjoint",
            DissipativityVerdict::Neither => "neither",
            DissipativityVerdict::NotDiracType => "not_dirac_type",
        },
        "riesz": riesz,
        "synthesis": {
            "applicable": report.synthesis.applicable,
            "admits_synthesis": report.synthesis.admits_synthesis,
            "expected_ray_rate": report.synthesis.expected_rate,
            "empirical_ray_rate": report.synthesis.empirical_rate,
            "ray_samples": report.synthesis.ray_samples.iter().map(|(t, v)| serde_json::json!({"t": t, "ln_abs_delta": v})).collect::<Vec<_>>(),
        },
    });
    Sink::new(num.out.clone()).write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(())
}

fn cmd_spectrum(
    bvp: &DiracBVP,
    region: Region,
    group_eps: Option<f64>,
    angles: &[f64],
    format: Format,
    num: &Numerics,
) -> Result<()> {
    let slice = locate_eigenvalues(bvp, &region, num.tol, &num.ctrl())?;
    let sink = Sink::new(num.out.clone());
    match (format, group_eps) {
        (Format::Csv, None) => {
            let mut csv = Csv::new(&["re", "im", "multiplicity"]);
            for ev in &slice.eigenvalues {
                csv.row(&[fmt(ev.value.re), fmt(ev.value.im), ev.multiplicity.to_string()]);
            }
            sink.write(&csv.finish())?;
        }
        _ => {
            let eigs: Vec<C64> = slice.eigenvalues.iter().map(|e| e.value).collect();
            let blocks = group_eps.map(|eps| group_blocks(&eigs, angles, eps));
            let doc = serde_json::json!({
                "region": {"re0": region.re0, "re1": region.re1, "im0": region.im0, "im1": region.im1},
                "total_count": slice.total_count,
                "residual": slice.residual,
                "eigenvalues": slice.eigenvalues.iter().map(|e| serde_json::json!({
                    "value": complex_json(e.value),
                    "multiplicity": e.multiplicity,
                })).collect::<Vec<_>>(),
                "blocks": blocks.map(|b| serde_json::json!({
                    "epsilon": b.epsilon,
                    "angles": b.angles,
                    "blocks": b.blocks,
                })),
            });
            sink.write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_detscan(
    bvp: &DiracBVP,
    region: Option<Region>,
    nx: usize,
    ny: usize,
    ray: Option<f64>,
    rmin: f64,
    rmax: f64,
    samples: usize,
    scaled: bool,
    num: &Numerics,
) -> Result<()> {
    let ctrl = num.ctrl();
    let fan = compute_fan(&bvp.weight)?;
    let models: Vec<SectorModel> = fan
        .sectors
        .iter()
        .map(|s| sector_model(bvp, s))
        .collect::<std::result::Result<_, _>>()?;
    let points: Vec<C64> = if let Some(angle) = ray {
        (0..samples)
            .map(|i| {
                let r = rmin + (rmax - rmin) * i as f64 / (samples.max(2) - 1) as f64;
                C64::from_polar(r, angle)
            })
            .collect()
    } else {
        let region = region.ok_or_else(|| {
            CliError::Input("detscan needs either --region or --ray".into())
        })?;
        let mut pts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x = region.re0 + region.width() * i as f64 / (nx.max(2) - 1) as f64;
                let y = region.im0 + region.height() * j as f64 / (ny.max(2) - 1) as f64;
                pts.push(c64(x, y));
            }
        }
        pts
    };
    let mut csv = Csv::new(&["re(lambda)", "im(lambda)", "re(delta)", "im(delta)", "abs(delta)"]);
    for lam in points {
        let raw = char_determinant_scaled(bvp, lam, &ctrl)?;
        let value = if scaled {
            match fan.sector_of(lam) {
                Some(sector) => {
                    let m = &models[sector.index];
                    let gamma_inv = ScaledC64::from_c64(c64(1.0, 0.0)).div(ScaledC64::from_c64(m.gamma));
                    raw.mul_exp(-I * m.tau * lam).mul(gamma_inv).to_c64()
                }
                None => raw.to_c64(),
            }
        } else {
            raw.to_c64()
        };
        csv.row(&[fmt(lam.re), fmt(lam.im), fmt(value.re), fmt(value.im), fmt(value.norm())]);
    }
    Sink::new(num.out.clone()).write(&csv.finish())?;
    Ok(())
}

fn cmd_asymptotics(
    bvp: &DiracBVP,
    format: Format,
    ray_scan: Option<usize>,
    rmax: f64,
    samples: usize,
    num: &Numerics,
) -> Result<()> {
    let ctrl = num.ctrl();
    let fan = compute_fan(&bvp.weight)?;
    let sink = Sink::new(num.out.clone());
    if let Some(idx) = ray_scan {
        let sector = fan
            .sectors
            .get(idx)
            .ok_or_else(|| CliError::Input(format!("sector index {idx} out of range")))?;
        let model = sector_model(bvp, sector)?;
        let mut csv = Csv::new(&["r", "err_order0", "err_order1"]);
        for i in 0..samples {
            let r = rmax * (i + 1) as f64 / samples as f64;
            let lam = sector.bisector() * r;
            let delta = char_determinant_scaled(bvp, lam, &ctrl)?;
            let m0 = ScaledC64::from_c64(model.gamma * model.omega0).mul_exp(I * model.tau * lam);
            let e0 = if m0.is_zero() { f64::NAN } else { (delta.div(m0).to_c64() - c64(1.0, 0.0)).norm() };
            let e1 = match model.omega1 {
                Some(w1) if r >= 1.0 => {
                    let m1 = ScaledC64::from_c64(model.gamma * (model.omega0 + w1 / lam))
                        .mul_exp(I * model.tau * lam);
                    if m1.is_zero() { f64::NAN } else { (delta.div(m1).to_c64() - c64(1.0, 0.0)).norm() }
                }
                _ => f64::NAN,
            };
            csv.row(&[fmt(r), fmt(e0), fmt(e1)]);
        }
        sink.write(&csv.finish())?;
        return Ok(());
    }
    let mut rows = Vec::new();
    for s in &fan.sectors {
        let model = sector_model(bvp, s)?;
        rows.push((s, model));
    }
    match format {
        Format::Json => {
            let doc: Vec<serde_json::Value> = rows
                .iter()
                .map(|(s, m)| {
                    serde_json::json!({
                        "sector": s.index,
                        "phi_start": s.phi_start,
                        "phi_end": s.phi_end,
                        "gamma": complex_json(m.gamma),
                        "tau": complex_json(m.tau),
                        "omega0": complex_json(m.omega0),
                        "omega1": m.omega1.map(complex_json),
                    })
                })
                .collect();
            sink.write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Format::Csv => {
            let mut csv = Csv::new(&[
                "sector",
                "phi_start",
                "phi_end",
                "re(gamma)",
                "im(gamma)",
                "re(tau)",
                "im(tau)",
                "re(omega0)",
                "im(omega0)",
                "omega1_defined",
                "re(omega1)",
                "im(omega1)",
            ]);
            for (s, m) in &rows {
                let (w1d, w1) = match m.omega1 {
                    Some(w) => ("1".to_string(), w),
                    None => ("0".to_string(), c64(f64::NAN, f64::NAN)),
                };
                csv.row(&[
                    s.index.to_string(),
                    fmt(s.phi_start),
                    fmt(s.phi_end),
                    fmt(m.gamma.re),
                    fmt(m.gamma.im),
                    fmt(m.tau.re),
                    fmt(m.tau.im),
                    fmt(m.omega0.re),
                    fmt(m.omega0.im),
                    w1d,
                    fmt(w1.re),
                    fmt(w1.im),
                ]);
            }
            sink.write(&csv.finish())?;
        }
    }
    Ok(())
}

fn cmd_rootfns(bvp: &DiracBVP, lambda: C64, multiplicity: usize, num: &Numerics) -> Result<()> {
    let chains = root_chains(bvp, lambda, multiplicity, num.grid, &ChainOptions::default(), &num.ctrl())?;
    let n = bvp.n();
    let mut header: Vec<String> = vec!["x".into()];
    for (ci, chain) in chains.iter().enumerate() {
        for p in 0..chain.functions.len() {
            for comp in 0..n {
                header.push(format!("chain{ci}_depth{p}_c{comp}_re"));
                header.push(format!("chain{ci}_depth{p}_c{comp}_im"));
            }
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new(&header_refs);
    let xs = &chains[0].functions[0].xs;
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![fmt(x)];
        for chain in &chains {
            for f in &chain.functions {
                for comp in 0..n {
                    row.push(fmt(f.values[i][comp].re));
                    row.push(fmt(f.values[i][comp].im));
                }
            }
        }
        csv.row(&row);
    }
    Sink::new(num.out.clone()).write(&csv.finish())?;
    Ok(())
}

fn cmd_green(bvp: &DiracBVP, lambda: C64, at: &str, num: &Numerics) -> Result<()> {
    let mut pairs = Vec::new();
    for chunk in at.split(';') {
        let parts: Vec<&str> = chunk.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Input(format!("bad pair '{chunk}', expected x,t")));
        }
        let x: f64 = parts[0].trim().parse().map_err(|e| CliError::Input(format!("x: {e}")))?;
        let t: f64 = parts[1].trim().parse().map_err(|e| CliError::Input(format!("t: {e}")))?;
        pairs.push((x, t));
    }
    let ev = green_function(bvp, lambda, &pairs, &num.ctrl())?;
    let n = bvp.n();
    let mut header: Vec<String> = vec!["x".into(), "t".into()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("g{i}{j}_re"));
            header.push(format!("g{i}{j}_im"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new(&header_refs);
    for (k, &(x, t)) in ev.pairs.iter().enumerate() {
        let mut row = vec![fmt(x), fmt(t)];
        for i in 0..n {
            for j in 0..n {
                row.push(fmt(ev.kernels[k][(i, j)].re));
                row.push(fmt(ev.kernels[k][(i, j)].im));
            }
        }
        csv.row(&row);
    }
    Sink::new(num.out.clone()).write(&csv.finish())?;
    Ok(())
}

fn cmd_svalues(bvp: &DiracBVP, lambda: C64, n_points: usize, count: usize, num: &Numerics) -> Result<()> {
    let prof = svalue_profile(bvp, lambda, n_points, count, &num.ctrl())?;
    let mut csv = Csv::new(&["k", "s", "series", "k_in_series", "fit_ratio"]);
    for (k, (&s, &(j, k_in))) in prof.svalues.iter().zip(&prof.assignments).enumerate() {
        let fit = prof.fit_ratios[j].get(k_in - 1).copied().unwrap_or(f64::NAN);
        csv.row(&[(k + 1).to_string(), fmt(s), j.to_string(), k_in.to_string(), fmt(fit)]);
    }
    Sink::new(num.out.clone()).write(&csv.finish())?;
    Ok(())
}

fn cmd_trace_diff(a: &DiracBVP, b: &DiracBVP, lambda: C64, num: &Numerics) -> Result<()> {
    let v = dirac_bvp::resolvent::trace_formula_diff(a, b, lambda, &num.ctrl())?;
    let doc = serde_json::json!({"lambda": complex_json(lambda), "value": complex_json(v)});
    Sink::new(num.out.clone()).write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(())
}

fn cmd_gauge(bvp: &DiracBVP, num: &Numerics) -> Result<()> {
    let (blocked, _) = dirac_bvp::system::canonical_block_order(bvp);
    let (gauged, _record) = gauge_normalize(&blocked, &num.ctrl())?;
    Sink::new(num.out.clone()).write(&format!("{}\n", system_to_json(&gauged)))?;
    Ok(())
}

fn cmd_timoshenko(
    input: &PathBuf,
    emit_dirac: Option<PathBuf>,
    conditions: bool,
    spectrum: Option<Region>,
    num: &Numerics,
) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
    let beam = parse_beam(&text)?;
    let red = reduce_to_dirac(&beam)?;
    let mut doc = serde_json::json!({
        "b1": red.b1,
        "b2": red.b2,
        "h1_end": red.h1_end,
        "h2_end": red.h2_end,
        "h1_prime_end": red.h1_prime_end,
        "h2_prime_end": red.h2_prime_end,
    });
    if let Some(path) = emit_dirac {
        let json = system_to_json(&red.dirac);
        std::fs::write(&path, format!("{json}\n"))?;
        doc["emitted_dirac"] = serde_json::Value::String(path.display().to_string());
    }
    if conditions {
        let rep = beam_conditions(&beam)?;
        doc["conditions"] = serde_json::json!({
            "complete_minimal": rep.complete_minimal,
            "riesz_with_parentheses": rep.riesz_with_parentheses,
            "product_conditions": rep.product_conditions.iter().map(|c| serde_json::json!({
                "description": c.description,
                "satisfied": c.satisfied,
                "slack": c.slack,
            })).collect::<Vec<_>>(),
            "endpoint_applicable": rep.endpoint_applicable,
            "endpoint_satisfied": rep.endpoint_satisfied,
            "endpoint_conditions": rep.endpoint_conditions.iter().map(|c| serde_json::json!({
                "description": c.description,
                "satisfied": c.satisfied,
                "slack": c.slack,
            })).collect::<Vec<_>>(),
        });
    }
    if let Some(region) = spectrum {
        let slice = locate_eigenvalues(&red.dirac, &region, num.tol, &num.ctrl())?;
        doc["spectrum"] = serde_json::json!({
            "total_count": slice.total_count,
            "eigenvalues": slice.eigenvalues.iter().map(|e| serde_json::json!({
                "value": complex_json(e.value),
                "multiplicity": e.multiplicity,
            })).collect::<Vec<_>>(),
        });
    }
    Sink::new(num.out.clone()).write(&format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(())
}

