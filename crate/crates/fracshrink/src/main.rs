//! Command-line front end: curvature evaluation, shrinker solves, stability
//! reports, flow integration, and the s -> 1 limit study, with CSV/JSON
//! output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 iteration budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fracshrink::curvature::fractional_curvature;
use fracshrink::error::{Error, Result};
use fracshrink::flow::{integrate, FlowKind, FlowState, Termination};
use fracshrink::linalg::norm2;
use fracshrink::output::{fmt_f64, fmt_opt, json_document, render_csv, write_atomic};
use fracshrink::params::{KernelParams, QuadratureConfig, RadialSet};
use fracshrink::shrinker::{
    cylinder_shrinker, find_shrinker, limit_study, Family, ShrinkerSolution,
};
use fracshrink::stability::{analyze, corner_derivative_check, shell_monotonicity_check};

#[derive(Parser)]
#[command(
    name = "fracshrink",
    version,
    about = "Fractional mean curvature of radial sets: shrinking profiles, stability, flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fractional mean curvature of a radial set at its boundary spheres.
    Curvature(CurvatureArgs),
    /// Solve for homothetically shrinking radii (annuli, ball+annuli, cylinders).
    Shrink(ShrinkArgs),
    /// Jacobian spectrum, Morse index, and monotonicity checks at a shrinker.
    Stability(StabilityArgs),
    /// Integrate the original or rescaled radial flow.
    Flow(FlowArgs),
    /// Study the s -> 1 limits of the annulus ratio and scaled curvatures.
    Limits(LimitsArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Ambient dimension n >= 1.
    #[arg(long)]
    n: Option<u32>,
    /// Fractional order s, strictly in (0, 1).
    #[arg(long)]
    s: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Maximum adaptive-quadrature bisections.
    #[arg(long)]
    max_subdivisions: Option<u32>,
    /// Fraction of the singular shell handled by paired quadrature, in (0,1).
    #[arg(long)]
    pairing_cutoff: Option<f64>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when absent; `flow` writes PATH.csv and PATH.json).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for randomized perturbation directions.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated boundary radii, strictly increasing.
    #[arg(long)]
    radii: Option<String>,
    /// The set contains the origin (single radius = ball; odd radius count).
    #[arg(long)]
    ball: bool,
    /// Boundary index to evaluate, or "all".
    #[arg(long)]
    index: Option<String>,
}

#[derive(Args)]
struct ShrinkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of annuli N (0 with ball-plus-annuli gives the plain ball).
    #[arg(long = "N")]
    n_annuli: Option<u32>,
    /// Family: annuli-only or ball-plus-annuli.
    #[arg(long)]
    family: Option<String>,
    /// Solve the cylindrical shrinker with this cross-section dimension k < n.
    #[arg(long)]
    cylinder_k: Option<u32>,
    /// Residual tolerance ‖g‖∞.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "N")]
    n_annuli: Option<u32>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Grid size for the shell-monotonicity sampling.
    #[arg(long)]
    grid_size: Option<u32>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which flow: original or rescaled.
    #[arg(long)]
    which: Option<String>,
    /// Start from the solved shrinker with this many annuli.
    #[arg(long = "N")]
    n_annuli: Option<u32>,
    #[arg(long)]
    family: Option<String>,
    /// Start from explicit radii instead of a solved shrinker.
    #[arg(long)]
    radii: Option<String>,
    /// With --radii: the set contains the origin.
    #[arg(long)]
    ball: bool,
    /// Multiply the starting radii by this factor.
    #[arg(long)]
    scale: Option<f64>,
    /// Add this amplitude along the geometrically significant unstable direction.
    #[arg(long)]
    perturb_unstable: Option<f64>,
    /// Add this amplitude along the radial (pure rescaling) direction.
    #[arg(long)]
    perturb_radial: Option<f64>,
    /// Add this amplitude along a seeded random unit direction.
    #[arg(long)]
    perturb_random: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    horizon: Option<f64>,
    /// Local error tolerance of the embedded Runge-Kutta pair.
    #[arg(long)]
    ode_tol: Option<f64>,
    /// Shrinker residual tolerance when solving the starting profile.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct LimitsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated s values, strictly increasing, inside (0, 1).
    #[arg(long)]
    s_grid: Option<String>,
}

/// Values from the optional JSON config file; flags override.
struct FileConfig(Value);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self(Value::Null)),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidInput(format!("cannot read --config {}: {e}", p.display()))
                })?;
                let v: Value = serde_json::from_str(&text).map_err(|e| {
                    Error::InvalidInput(format!("--config {} is not valid JSON: {e}", p.display()))
                })?;
                if !v.is_object() {
                    return Err(Error::InvalidInput(
                        "--config must contain a JSON object".into(),
                    ));
                }
                Ok(Self(v))
            }
        }
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(Value::as_f64)
    }

    fn u32(&self, key: &str) -> Option<u32> {
        self.0.get(key).and_then(Value::as_u64).map(|v| v as u32)
    }

    fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(Value::as_u64)
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(Value::as_str).map(str::to_owned)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

struct Resolved {
    params: KernelParams,
    quad: QuadratureConfig,
    format: Format,
    output: Option<PathBuf>,
    seed: u64,
}

fn missing(flag: &str) -> Error {
    Error::InvalidInput(format!("missing required flag {flag}"))
}

fn resolve_common(args: &CommonArgs) -> Result<(Resolved, FileConfig)> {
    resolve_common_with(args, None)
}

/// `default_s` is for commands that take s from elsewhere (the limits grid).
fn resolve_common_with(args: &CommonArgs, default_s: Option<f64>) -> Result<(Resolved, FileConfig)> {
    let file = FileConfig::load(args.config.as_deref())?;
    let n = args.n.or_else(|| file.u32("n")).ok_or_else(|| missing("--n"))?;
    let s = args
        .s
        .or_else(|| file.f64("s"))
        .or(default_s)
        .ok_or_else(|| missing("--s"))?;
    let params = KernelParams::new(n, s)?;
    let defaults = QuadratureConfig::default();
    let quad = QuadratureConfig {
        rel_tol: args
            .rel_tol
            .or_else(|| file.f64("rel_tol"))
            .unwrap_or(defaults.rel_tol),
        abs_tol: args
            .abs_tol
            .or_else(|| file.f64("abs_tol"))
            .unwrap_or(defaults.abs_tol),
        max_subdivisions: args
            .max_subdivisions
            .or_else(|| file.u32("max_subdivisions"))
            .unwrap_or(defaults.max_subdivisions),
        pairing_cutoff: args
            .pairing_cutoff
            .or_else(|| file.f64("pairing_cutoff"))
            .unwrap_or(defaults.pairing_cutoff),
    };
    quad.validate()?;
    let format = match args
        .format
        .clone()
        .or_else(|| file.string("format"))
        .unwrap_or_else(|| "json".into())
        .as_str()
    {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown --format '{other}' (expected csv or json)"
            )))
        }
    };
    let output = args
        .output
        .clone()
        .or_else(|| file.string("output").map(PathBuf::from));
    let seed = args.seed.or_else(|| file.u64("seed")).unwrap_or(0);
    Ok((
        Resolved {
            params,
            quad,
            format,
            output,
            seed,
        },
        file,
    ))
}

fn common_config_json(r: &Resolved, command: &str) -> Value {
    json!({
        "command": command,
        "n": r.params.n,
        "s": r.params.s,
        "rel_tol": r.quad.rel_tol,
        "abs_tol": r.quad.abs_tol,
        "max_subdivisions": r.quad.max_subdivisions,
        "pairing_cutoff": r.quad.pairing_cutoff,
        "format": if r.format == Format::Csv { "csv" } else { "json" },
        "seed": r.seed,
    })
}

fn merge(base: Value, extra: Value) -> Value {
    let (Value::Object(mut b), Value::Object(e)) = (base, extra) else {
        unreachable!("config fragments are objects")
    };
    b.extend(e);
    Value::Object(b)
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("{flag}: cannot parse '{part}' as a number"))
            })
        })
        .collect()
}

/// Emit a document to stdout or the output path, per the selected format.
fn emit(
    r: &Resolved,
    config: &Value,
    json_result: Value,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<()> {
    let text = match r.format {
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&json_document(config, json_result))
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            t.push('\n');
            t
        }
        Format::Csv => render_csv(config, header, &rows)?,
    };
    match &r.output {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_curvature(args: &CurvatureArgs) -> Result<()> {
    let (r, file) = resolve_common(&args.common)?;
    let radii_text = args
        .radii
        .clone()
        .or_else(|| file.string("radii"))
        .ok_or_else(|| missing("--radii"))?;
    let radii = parse_f64_list(&radii_text, "--radii")?;
    let contains_origin = args.ball || radii.len() % 2 == 1;
    let set = RadialSet::new(radii, contains_origin)?;
    let index_text = args
        .index
        .clone()
        .or_else(|| file.string("index"))
        .unwrap_or_else(|| "all".into());
    let indices: Vec<usize> = if index_text == "all" {
        (0..set.len()).collect()
    } else {
        vec![index_text.parse::<usize>().map_err(|_| {
            Error::InvalidInput(format!(
                "--index must be 'all' or an integer, got '{index_text}'"
            ))
        })?]
    };

    let config = merge(
        common_config_json(&r, "curvature"),
        json!({"radii": set.radii(), "contains_origin": set.contains_origin(), "index": index_text}),
    );

    let mut results = Vec::new();
    let mut rows = Vec::new();
    for &i in &indices {
        let cv = fractional_curvature(&r.params, &set, i, &r.quad)?;
        for (label, contribution) in &cv.decomposition {
            rows.push(vec![
                i.to_string(),
                label.clone(),
                fmt_f64(*contribution),
                String::new(),
            ]);
        }
        rows.push(vec![
            i.to_string(),
            "total".into(),
            fmt_f64(cv.value),
            fmt_f64(cv.error_estimate),
        ]);
        results.push(json!({
            "index": i,
            "value": cv.value,
            "error_estimate": cv.error_estimate,
            "decomposition": cv.decomposition
                .iter()
                .map(|(label, v)| json!({"component": label, "contribution": v}))
                .collect::<Vec<_>>(),
        }));
    }
    emit(
        &r,
        &config,
        Value::Array(results),
        &["boundary_index", "component", "contribution", "error_estimate"],
        rows,
    )
}

fn shrink_rows(sol: &ShrinkerSolution) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (i, (radius, ratio)) in sol.set.radii().iter().zip(sol.ratios()).enumerate() {
        rows.push(vec!["radius".into(), i.to_string(), fmt_f64(*radius)]);
        rows.push(vec!["ratio".into(), i.to_string(), fmt_f64(ratio)]);
    }
    rows.push(vec![
        "residual_norm".into(),
        String::new(),
        fmt_f64(sol.residual_norm),
    ]);
    for (k, step) in sol.solver_path.iter().enumerate() {
        rows.push(vec!["solver_path".into(), k.to_string(), step.clone()]);
    }
    rows
}

fn shrinker_json(sol: &ShrinkerSolution) -> Value {
    json!({
        "family": sol.family.as_str(),
        "n_annuli": sol.n_annuli,
        "ambient_dim": sol.ambient_dim,
        "radii": sol.set.radii(),
        "ratios": sol.ratios(),
        "residual_norm": sol.residual_norm,
        "tol": sol.tol,
        "solver_path": sol.solver_path,
    })
}

fn cmd_shrink(args: &ShrinkArgs) -> Result<()> {
    let (r, file) = resolve_common(&args.common)?;
    let n_annuli = args.n_annuli.or_else(|| file.u32("N")).unwrap_or(1);
    let family = Family::parse(
        &args
            .family
            .clone()
            .or_else(|| file.string("family"))
            .unwrap_or_else(|| "annuli-only".into()),
    )?;
    let cylinder_k = args.cylinder_k.or_else(|| file.u32("cylinder_k"));
    let tol = args.tol.or_else(|| file.f64("tol")).unwrap_or(1e-9);
    let config = merge(
        common_config_json(&r, "shrink"),
        json!({"N": n_annuli, "family": family.as_str(), "cylinder_k": cylinder_k, "tol": tol}),
    );
    let sol = match cylinder_k {
        Some(k) => cylinder_shrinker(&r.params, k, n_annuli, family, &r.quad, tol)?,
        None => find_shrinker(&r.params, n_annuli, family, &r.quad, tol)?,
    };
    emit(
        &r,
        &config,
        shrinker_json(&sol),
        &["field", "index", "value"],
        shrink_rows(&sol),
    )
}

fn cmd_stability(args: &StabilityArgs) -> Result<()> {
    let (r, file) = resolve_common(&args.common)?;
    let n_annuli = args.n_annuli.or_else(|| file.u32("N")).unwrap_or(1);
    let family = Family::parse(
        &args
            .family
            .clone()
            .or_else(|| file.string("family"))
            .unwrap_or_else(|| "annuli-only".into()),
    )?;
    let tol = args.tol.or_else(|| file.f64("tol")).unwrap_or(1e-9);
    let grid_size = args
        .grid_size
        .or_else(|| file.u32("grid_size"))
        .unwrap_or(128);
    let config = merge(
        common_config_json(&r, "stability"),
        json!({"N": n_annuli, "family": family.as_str(), "tol": tol, "grid_size": grid_size}),
    );

    let sol = find_shrinker(&r.params, n_annuli, family, &r.quad, tol)?;
    let report = analyze(&r.params, &sol, &r.quad)?;
    let corner = if sol.set.len() >= 2 {
        Some(corner_derivative_check(&r.params, &sol, &r.quad)?)
    } else {
        None
    };
    let shell = shell_monotonicity_check(&r.params, &sol, grid_size, &r.quad)?;

    let mut rows = Vec::new();
    for (i, l) in report.eigenvalues.iter().enumerate() {
        rows.push(vec!["eigenvalue".into(), i.to_string(), fmt_f64(*l)]);
    }
    rows.push(vec![
        "morse_index".into(),
        String::new(),
        report.morse_index.to_string(),
    ]);
    rows.push(vec![
        "radial_eigen_defect".into(),
        String::new(),
        fmt_f64(report.radial_eigen_defect),
    ]);
    rows.push(vec![
        "symmetrization_defect".into(),
        String::new(),
        fmt_f64(report.symmetrization_defect),
    ]);
    if let Some((corner_diag, reference)) = corner {
        rows.push(vec![
            "corner_diagonal".into(),
            String::new(),
            fmt_f64(corner_diag),
        ]);
        rows.push(vec![
            "corner_reference".into(),
            String::new(),
            fmt_f64(reference),
        ]);
    }
    if let Some(u) = &report.unstable_direction {
        for (i, x) in u.iter().enumerate() {
            rows.push(vec![
                "unstable_direction".into(),
                i.to_string(),
                fmt_f64(*x),
            ]);
        }
    }
    for (i, row) in report.jacobian.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            rows.push(vec!["jacobian".into(), format!("{i}:{j}"), fmt_f64(*v)]);
        }
    }
    rows.push(vec![
        "shell_monotone".into(),
        String::new(),
        (shell.increasing as u8).to_string(),
    ]);
    rows.push(vec![
        "shell_worst_margin".into(),
        String::new(),
        fmt_f64(shell.worst_margin),
    ]);
    rows.push(vec![
        "weighted_ordering_ok".into(),
        String::new(),
        (shell.weighted_ordering_ok as u8).to_string(),
    ]);

    let result = json!({
        "solution": shrinker_json(&sol),
        "eigenvalues": report.eigenvalues,
        "eigenvectors": report.eigenvectors,
        "morse_index": report.morse_index,
        "radial_eigen_defect": report.radial_eigen_defect,
        "symmetrization_defect": report.symmetrization_defect,
        "unstable_direction": report.unstable_direction,
        "jacobian": report.jacobian,
        "corner_diagonal": corner.map(|c| c.0),
        "corner_reference": corner.map(|c| c.1),
        "shell_monotone": shell.increasing,
        "shell_worst_margin": shell.worst_margin,
        "weighted_ordering_ok": shell.weighted_ordering_ok,
    });
    emit(&r, &config, result, &["field", "index", "value"], rows)
}

/// Least-squares slope of ln‖deviation‖ against t over the window where the
/// deviation has detached from its initial size but is still small relative
/// to the profile.
fn measured_growth_rate(trace: &[FlowState], base: &[f64]) -> Option<f64> {
    let dev = |st: &FlowState| {
        norm2(
            &st.radii
                .iter()
                .zip(base)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        )
    };
    let d0 = dev(trace.first()?);
    if d0 == 0.0 {
        return None;
    }
    let cap = (norm2(base) * 1e-2).max(30.0 * d0);
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .filter_map(|st| {
            let d = dev(st);
            (d >= 3.0 * d0 && d <= cap).then(|| (st.time, d.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, sl) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, l)| (a + t, b + l));
    let (stt, stl) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, l)| (a + t * t, b + t * l));
    let denom = n * stt - st * st;
    (denom.abs() > 1e-30).then(|| (n * stl - st * sl) / denom)
}

fn cmd_flow(args: &FlowArgs) -> Result<()> {
    let (r, file) = resolve_common(&args.common)?;
    let which = FlowKind::parse(
        &args
            .which
            .clone()
            .or_else(|| file.string("which"))
            .ok_or_else(|| missing("--which"))?,
    )?;
    let scale = args.scale.or_else(|| file.f64("scale")).unwrap_or(1.0);
    let ode_tol = args.ode_tol.or_else(|| file.f64("ode_tol")).unwrap_or(1e-8);
    let tol = args.tol.or_else(|| file.f64("tol")).unwrap_or(1e-9);
    let perturb_unstable = args
        .perturb_unstable
        .or_else(|| file.f64("perturb_unstable"));
    let perturb_radial = args.perturb_radial.or_else(|| file.f64("perturb_radial"));
    let perturb_random = args.perturb_random.or_else(|| file.f64("perturb_random"));
    let radii_text = args.radii.clone().or_else(|| file.string("radii"));

    // Base profile: explicit radii or a solved shrinker.
    let (base_set, solved, n_annuli, family) = match &radii_text {
        Some(text) => {
            let radii = parse_f64_list(text, "--radii")?;
            let contains_origin = args.ball || radii.len() % 2 == 1;
            (RadialSet::new(radii, contains_origin)?, None, None, None)
        }
        None => {
            let n_annuli = args.n_annuli.or_else(|| file.u32("N")).unwrap_or(1);
            let family = Family::parse(
                &args
                    .family
                    .clone()
                    .or_else(|| file.string("family"))
                    .unwrap_or_else(|| "annuli-only".into()),
            )?;
            let sol = find_shrinker(&r.params, n_annuli, family, &r.quad, tol)?;
            (sol.set.clone(), Some(sol), Some(n_annuli), Some(family))
        }
    };

    // Assemble the starting radii.
    let mut start: Vec<f64> = base_set.radii().iter().map(|x| x * scale).collect();
    if let Some(amp) = perturb_unstable {
        let sol = solved.as_ref().ok_or_else(|| {
            Error::InvalidInput("--perturb-unstable needs a solved shrinker start (--N)".into())
        })?;
        let report = analyze(&r.params, sol, &r.quad)?;
        let u = report.unstable_direction.ok_or_else(|| {
            Error::InvalidInput(
                "the ball has no geometrically significant unstable direction".into(),
            )
        })?;
        for (x, ui) in start.iter_mut().zip(&u) {
            *x += amp * ui;
        }
    }
    if let Some(amp) = perturb_radial {
        let base_norm = norm2(base_set.radii());
        for (x, b) in start.iter_mut().zip(base_set.radii()) {
            *x += amp * b / base_norm;
        }
    }
    if let Some(amp) = perturb_random {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let dir: Vec<f64> = (0..start.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = norm2(&dir).max(1e-12);
        for (x, d) in start.iter_mut().zip(&dir) {
            *x += amp * d / nrm;
        }
    }
    let initial_set = RadialSet::new(start, base_set.contains_origin())?;
    let initial = FlowState::new(0.0, &initial_set);
    let horizon = args
        .horizon
        .or_else(|| file.f64("horizon"))
        .unwrap_or(match which {
            FlowKind::Original => 2.0,
            FlowKind::Rescaled => 5.0,
        });

    let config = merge(
        common_config_json(&r, "flow"),
        json!({
            "which": if which == FlowKind::Original { "original" } else { "rescaled" },
            "N": n_annuli,
            "family": family.map(|f| f.as_str()),
            "radii": radii_text,
            "contains_origin": initial_set.contains_origin(),
            "scale": scale,
            "perturb_unstable": perturb_unstable,
            "perturb_radial": perturb_radial,
            "perturb_random": perturb_random,
            "horizon": horizon,
            "ode_tol": ode_tol,
            "tol": tol,
        }),
    );

    let trace = integrate(&r.params, &initial, which, horizon, &r.quad, ode_tol)?;

    let growth = solved
        .as_ref()
        .and_then(|sol| measured_growth_rate(&trace.states, sol.set.radii()));
    let extinction_time = match trace.termination {
        Termination::Extinction => Some(trace.termination_time),
        _ => None,
    };
    let summary = json!({
        "termination": trace.termination,
        "termination_time": trace.termination_time,
        "extinction_time": extinction_time,
        "measured_growth_rate": growth,
        "states": trace.states.len(),
        "final_radii": trace.states.last().map(|st| st.radii.clone()),
    });

    let m = initial_set.len();
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=m).map(|i| format!("r_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = trace
        .states
        .iter()
        .map(|st| {
            let mut row = vec![fmt_f64(st.time)];
            row.extend(st.radii.iter().map(|x| fmt_f64(*x)));
            row
        })
        .collect();

    match &r.output {
        Some(path) => {
            let csv_path = path.with_extension("csv");
            let json_path = path.with_extension("json");
            write_atomic(&csv_path, &render_csv(&config, &header_refs, &rows)?)?;
            let mut doc = serde_json::to_string_pretty(&json_document(&config, summary))
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            doc.push('\n');
            write_atomic(&json_path, &doc)
        }
        None => match r.format {
            Format::Csv => {
                print!("{}", render_csv(&config, &header_refs, &rows)?);
                Ok(())
            }
            Format::Json => {
                let mut doc = serde_json::to_string_pretty(&json_document(&config, summary))
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
                doc.push('\n');
                print!("{doc}");
                Ok(())
            }
        },
    }
}

fn cmd_limits(args: &LimitsArgs) -> Result<()> {
    let (r, file) = resolve_common_with(&args.common, Some(0.5))?;
    let grid_text = args
        .s_grid
        .clone()
        .or_else(|| file.string("s_grid"))
        .ok_or_else(|| missing("--s-grid"))?;
    let grid = parse_f64_list(&grid_text, "--s-grid")?;
    // s comes from the grid here, not the common flag.
    let config = merge(
        common_config_json(&r, "limits"),
        json!({"s": Value::Null, "s_grid": grid}),
    );
    let rows = limit_study(r.params.n, &grid, &r.quad)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                fmt_f64(row.s),
                fmt_opt(row.annulus_ratio),
                fmt_opt(row.scaled_ball_constant),
                fmt_opt(row.scaled_defect_at_half),
                row.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    emit(
        &r,
        &config,
        serde_json::to_value(&rows).map_err(|e| Error::InvalidInput(e.to_string()))?,
        &[
            "s",
            "annulus_ratio",
            "scaled_ball_constant",
            "scaled_defect_at_half",
            "error",
        ],
        csv_rows,
    )
}

fn run() -> Result<()> {
    if let Ok(threads) = std::env::var("FRACSHRINK_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match &cli.command {
        Command::Curvature(args) => cmd_curvature(args),
        Command::Shrink(args) => cmd_shrink(args),
        Command::Stability(args) => cmd_stability(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Limits(args) => cmd_limits(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
