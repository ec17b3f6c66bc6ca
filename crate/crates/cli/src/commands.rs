use std::fmt::Write as _;
use std::path::Path;

use japar_core::data::parse_curve_str;
use japar_core::features::{extract_features, FeatureOptions, LoopFeatures};
use japar_core::hysteresis::{cycle_drift, integrate, loop_params_from_features};
use japar_core::japar::{self, FitWarning};
use japar_core::jiles92::{self, Jiles92Config};
use japar_core::synthetic::{grid_curve, steel, steel_grid, GRID_SAMPLES, STEEL_MS};
use japar_core::{
    AnhystereticCoupling, CurveKind, Error, FieldWaveform, HysteresisParams, MagnetizationCurve,
    MaterialSpec, SimOptions, BOLTZMANN, MU0,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Command, ExtractArgs, FitAnhystereticArgs, FitJiles92Args, LoopInputs, SimulateArgs,
    ValidateArgs,
};
use crate::report::{self, RunReport, Warning, EXIT_INPUT, EXIT_NUMERICAL};

/// A failed command: exit code, the stage that failed and why.
#[derive(Debug)]
pub struct Failed {
    pub code: i32,
    pub stage: &'static str,
    pub error: anyhow::Error,
}

type Outcome = Result<(), Failed>;

fn input(stage: &'static str, message: impl Into<String>) -> Failed {
    Failed {
        code: EXIT_INPUT,
        stage,
        error: anyhow::anyhow!(message.into()),
    }
}

fn core(stage: &'static str) -> impl FnOnce(Error) -> Failed {
    move |e| Failed {
        code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL },
        stage,
        error: e.into(),
    }
}

fn output(stage: &'static str) -> impl FnOnce(anyhow::Error) -> Failed {
    move |error| Failed {
        code: EXIT_INPUT,
        stage,
        error,
    }
}

fn require(value: Option<f64>, flag: &str, what: &str) -> Result<f64, Failed> {
    value.ok_or_else(|| input("arguments", format!("missing {flag} ({what}); see --help")))
}

pub fn run(command: &Command, report: &mut RunReport) -> Outcome {
    match command {
        Command::FitAnhysteretic(a) => fit_anhysteretic(a, report),
        Command::FitJiles92(a) => fit_jiles92(a, report),
        Command::SimulateLoop(a) => simulate_loop(a, report),
        Command::Extract(a) => extract(a, report),
        Command::Validate(a) => validate(a, report),
    }
}

fn read_curve(
    report: &mut RunReport,
    role: &'static str,
    path: &Path,
    inputs: &crate::args::ColumnArgs,
    unit: crate::args::UnitArg,
    kind: CurveKind,
) -> Result<MagnetizationCurve, Failed> {
    let text = report
        .read_input(role, path)
        .map_err(|e| input("reading input", format!("{}: {e}", path.display())))?;
    parse_curve_str(&text, &inputs.format(unit, kind)).map_err(|e| Failed {
        code: EXIT_INPUT,
        stage: "parsing input",
        error: anyhow::anyhow!("{}: {e}", path.display()),
    })
}

fn fit_warning(w: &FitWarning) -> Warning {
    let message = match w {
        FitWarning::NonPhysicalAlpha { alpha } => format!("fitted alpha = {alpha} is negative"),
        FitWarning::EtaAtSweepBoundary { eta } => {
            format!("eta* = {eta} is on the sweep boundary; the minimum may lie outside")
        }
        FitWarning::NonUnimodalProfile => "residual profile has more than one basin".into(),
        FitWarning::FailedEtaPoints { count } => {
            format!("{count} sweep points produced no parameters")
        }
    };
    Warning::new(w.code(), message)
}

#[derive(Serialize)]
struct FitSummary {
    eta_star: f64,
    chi_param: f64,
    moment: f64,
    a_j: f64,
    alpha: f64,
    residual_norm: f64,
    residual_rms: f64,
    chi_an_a: f64,
    m1: f64,
    a1: f64,
    m_an1: f64,
    chi_an1: f64,
    iterations: usize,
    profile_unimodal: Option<bool>,
}

fn fit_anhysteretic(a: &FitAnhystereticArgs, report: &mut RunReport) -> Outcome {
    let ms = require(a.common.ms, "--ms", "saturation magnetization, A/m")?;
    let temp = require(a.common.temp, "--temp", "temperature, K")?;
    let cfg = a.japar.config();
    report.config = json!({
        "ms": ms,
        "temperature": temp,
        "unit": a.common.unit,
        "columns": a.columns,
        "japar": cfg,
    });
    let material = MaterialSpec::new(ms, temp).map_err(core("arguments"))?;
    cfg.validate().map_err(core("arguments"))?;
    let data = read_curve(report, "data", &a.data, &a.columns, a.common.unit, CurveKind::Anhysteretic)?;
    data.validate(Some(ms)).map_err(core("validating data"))?;

    let fit = japar::fit(&data, &material, &cfg).map_err(core("fitting"))?;
    let fields = data.fields();
    let fitted = japar::reconstruct_curve(&fit.params(), ms, &fields).map_err(core("reconstructing"))?;

    report.warnings.extend(fit.warnings.iter().map(fit_warning));
    report.result = Some(report::to_value(&FitSummary {
        eta_star: fit.eta_star,
        chi_param: fit.chi_param,
        moment: fit.moment,
        a_j: fit.a_j,
        alpha: fit.alpha,
        residual_norm: fit.residual_norm,
        residual_rms: fit.residual_norm / (fields.len() as f64).sqrt(),
        chi_an_a: fit.chi_an_a,
        m1: fit.m1,
        a1: fit.a1,
        m_an1: fit.m_an1,
        chi_an1: fit.chi_an1,
        iterations: fit.iterations,
        profile_unimodal: fit.profile_unimodal,
    }));

    if let Some(path) = report::curve_path(a.curve.as_ref(), a.common.out.as_ref()) {
        let mut text = String::from("H,M_data,M_fit,r\n");
        for ((s, m_fit), r) in data.samples.iter().zip(&fitted).zip(&fit.residual) {
            let _ = writeln!(text, "{},{},{},{}", s.h, s.m, m_fit, r);
        }
        report::write_text(&path, &text).map_err(output("writing curve"))?;
    }
    Ok(())
}

fn loop_features(
    inputs: &LoopInputs,
    unit: crate::args::UnitArg,
    report: &mut RunReport,
) -> Result<(LoopFeatures, MagnetizationCurve), Failed> {
    let loop_path = inputs
        .loop_data
        .as_ref()
        .ok_or_else(|| input("arguments", "missing --loop (hysteresis loop data)"))?;
    let first_path = inputs
        .first
        .as_ref()
        .ok_or_else(|| input("arguments", "missing --first (first magnetization curve)"))?;
    let anh_path = inputs
        .anhysteretic
        .as_ref()
        .ok_or_else(|| input("arguments", "missing --anhysteretic (anhysteretic curve)"))?;
    let first = read_curve(report, "first_magnetization", first_path, &inputs.columns, unit, CurveKind::FirstMagnetization)?;
    let loop_curve = read_curve(report, "loop", loop_path, &inputs.columns, unit, CurveKind::FullLoop)?;
    let anh = read_curve(report, "anhysteretic", anh_path, &inputs.columns, unit, CurveKind::Anhysteretic)?;
    let opts = FeatureOptions {
        origin_window: inputs.origin_window,
        ..FeatureOptions::default()
    };
    let features = extract_features(&first, &loop_curve, &anh, &opts).map_err(core("extracting features"))?;
    Ok((features, loop_curve))
}

fn fit_jiles92(a: &FitJiles92Args, report: &mut RunReport) -> Outcome {
    let ms = require(a.common.ms, "--ms", "saturation magnetization, A/m")?;
    let loop_path = a
        .inputs
        .loop_data
        .clone()
        .ok_or_else(|| input("arguments", "missing --loop (hysteresis loop data)"))?;
    let (first_seed, restart) = a
        .seeds
        .split_first()
        .ok_or_else(|| input("arguments", "--seeds needs at least one value"))?;
    let cfg = Jiles92Config {
        alpha_seed: *first_seed,
        restart_seeds: restart.to_vec(),
        max_outer_iter: a.max_iter,
        fit_tol: a.fit_tol,
        substeps: a.substeps,
        sim: SimOptions {
            clamp: a.clamp,
            ..SimOptions::default()
        },
    };
    report.config = json!({
        "ms": ms,
        "unit": a.common.unit,
        "columns": a.inputs.columns,
        "origin_window": a.inputs.origin_window,
        "jiles92": cfg,
    });
    cfg.validate().map_err(core("arguments"))?;
    // temperature does not enter the loop estimator
    let material = MaterialSpec::new(ms, a.common.temp.unwrap_or(300.0)).map_err(core("arguments"))?;

    let (features, loop_curve) = match &a.features {
        Some(path) => {
            let text = report
                .read_input("features", path)
                .map_err(|e| input("reading input", format!("{}: {e}", path.display())))?;
            let f: LoopFeatures = serde_json::from_str::<Value>(&text)
                .ok()
                .and_then(|v| {
                    let inner = v.pointer("/result/features").cloned().unwrap_or(v);
                    serde_json::from_value(inner).ok()
                })
                .ok_or_else(|| input("parsing input", format!("{}: not a loop features document", path.display())))?;
            let l = read_curve(report, "loop", &loop_path, &a.inputs.columns, a.common.unit, CurveKind::FullLoop)?;
            (f, l)
        }
        None => loop_features(&a.inputs, a.common.unit, report)?,
    };
    features.validate().map_err(core("validating features"))?;
    loop_curve.validate(Some(ms)).map_err(core("validating data"))?;

    let est = jiles92::estimate(&features, &material, &loop_curve, &cfg).map_err(core("estimating"))?;
    for code in &est.warnings {
        let message = match code.as_str() {
            "fit_condition_not_met" => format!(
                "no seed reached loop MSE <= {} T^2; best MSE {} T^2 is reported",
                cfg.fit_tol, est.mse
            ),
            "c_outside_unit_interval" => format!("c = {} is outside (0, 1]", est.params.c),
            "multivalued_anhysteretic" => "alpha*Ms/(3aJ) >= 1: anhysteretic curve is multivalued".into(),
            other => other.to_string(),
        };
        report.warnings.push(Warning::new(code.clone(), message));
    }
    report.result = Some(json!({
        "features": features,
        "estimate": est,
    }));
    Ok(())
}

/// Parameter values found in a report produced by this tool.
fn params_from_report(v: &Value) -> [Option<f64>; 4] {
    let get = |paths: &[&str]| paths.iter().find_map(|p| v.pointer(p).and_then(Value::as_f64));
    [
        get(&["/result/a_j", "/result/estimate/params/a_j", "/a_j"]),
        get(&["/result/alpha", "/result/estimate/params/alpha", "/alpha"]),
        get(&["/result/estimate/params/c", "/result/loop_params/c", "/c"]),
        get(&["/result/estimate/params/k", "/result/loop_params/k", "/k"]),
    ]
}

fn simulate_loop(a: &SimulateArgs, report: &mut RunReport) -> Outcome {
    let ms = require(a.common.ms, "--ms", "saturation magnetization, A/m")?;
    let mut from_file = [None; 4];
    if let Some(path) = &a.params {
        let text = report
            .read_input("params", path)
            .map_err(|e| input("reading input", format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| input("parsing input", format!("{}: {e}", path.display())))?;
        from_file = params_from_report(&v);
    }
    let a_j = require(a.aj.or(from_file[0]), "--aj", "shape parameter, A/m")?;
    let alpha = require(a.alpha.or(from_file[1]), "--alpha", "coupling")?;
    let c = require(a.c.or(from_file[2]), "--c", "reversibility")?;
    let k = require(a.k.or(from_file[3]), "--k", "pinning, A/m")?;
    let opts = SimOptions {
        clamp: a.clamp,
        coupling: if a.self_consistent {
            AnhystereticCoupling::SelfConsistent
        } else {
            AnhystereticCoupling::EffectiveField
        },
    };
    report.config = json!({
        "params": { "a_j": a_j, "alpha": alpha, "c": c, "k": k, "ms": ms },
        "waveform": { "hmax": a.hmax, "cycles": a.cycles, "steps_per_segment": a.steps, "m0": a.m0 },
        "sim": opts,
    });
    let params = HysteresisParams::new(a_j, alpha, c, k, ms).map_err(core("arguments"))?;
    let waveform = FieldWaveform::symmetric_cycles(a.hmax, a.cycles, a.steps).map_err(core("arguments"))?;
    let curve = integrate(&params, &waveform, a.m0, &opts).map_err(core("integrating"))?;

    let drift = cycle_drift(&curve, &waveform);
    let max_abs_m = curve.samples.iter().map(|s| s.m.abs()).fold(0.0, f64::max);
    for code in params.warnings() {
        report.warnings.push(Warning::new(code, format!("parameters flagged: {code}")));
    }
    if let Some(d) = drift.filter(|d| *d > 1e-3 * ms) {
        report.warnings.push(Warning::new(
            "loop_not_closed",
            format!("last two cycles differ by {d} A/m (> 1e-3 Ms)"),
        ));
    }
    report.result = Some(json!({
        "samples": curve.len(),
        "final_m": curve.samples.last().map(|s| s.m),
        "max_abs_m": max_abs_m,
        "cycle_drift": drift,
    }));

    if let Some(path) = report::curve_path(a.curve.as_ref(), a.common.out.as_ref()) {
        let mut text = String::from("H,M,B\n");
        for s in &curve.samples {
            let _ = writeln!(text, "{},{},{}", s.h, s.m, MU0 * (s.h + s.m));
        }
        report::write_text(&path, &text).map_err(output("writing curve"))?;
    }
    Ok(())
}

fn extract(a: &ExtractArgs, report: &mut RunReport) -> Outcome {
    report.config = json!({
        "unit": a.common.unit,
        "columns": a.inputs.columns,
        "origin_window": a.inputs.origin_window,
    });
    let (features, _) = loop_features(&a.inputs, a.common.unit, report)?;
    let lp = loop_params_from_features(&features).map_err(core("deriving c and k"))?;
    for &code in &lp.warnings {
        let message = match code {
            "fully_reversible" => format!("c = {} >= 1", lp.c),
            "lossless_material" => format!("Hc = {} gives k <= 0", lp.k),
            other => other.to_string(),
        };
        report.warnings.push(Warning::new(code, message));
    }
    report.result = Some(json!({
        "features": features,
        "loop_params": { "c": lp.c, "k": lp.k },
    }));
    Ok(())
}

#[derive(Serialize)]
struct ValidationRow {
    row: usize,
    a_j: f64,
    alpha: f64,
    fitted_a_j: f64,
    fitted_alpha: f64,
    eta_star: f64,
    residual_rms: f64,
    /// Relative deviation of `aJ·m` from `kB·T/μ0`.
    identity_error: f64,
    pass: bool,
}

fn validate(a: &ValidateArgs, report: &mut RunReport) -> Outcome {
    let cfg = a.japar.config();
    let material = steel();
    let threshold = 0.01 * MU0 * STEEL_MS;
    report.config = json!({
        "ms": material.ms,
        "temperature": material.temperature,
        "samples_per_curve": GRID_SAMPLES,
        "rms_threshold": threshold,
        "japar": cfg,
    });
    cfg.validate().map_err(core("arguments"))?;

    let thermal = BOLTZMANN * material.temperature / MU0;
    let mut rows = Vec::new();
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<4} {:>6} {:>9} {:>10} {:>11} {:>10} {:>6}",
        "row", "aJ", "alpha", "fit aJ", "fit alpha", "rms [T]", ""
    );
    for row in steel_grid() {
        let data = grid_curve(&row).map_err(core("generating data"))?;
        let fit = japar::fit(&data, &material, &cfg).map_err(core("fitting"))?;
        let rms = fit.residual_norm / (data.len() as f64).sqrt();
        let identity_error = (fit.a_j * fit.moment - thermal).abs() / thermal;
        let pass = rms <= threshold && identity_error <= 1e-12;
        let _ = writeln!(
            table,
            "{:<4} {:>6} {:>9.2e} {:>10.2} {:>11.4e} {:>10.5} {:>6}",
            row.index,
            row.a_j,
            row.alpha,
            fit.a_j,
            fit.alpha,
            rms,
            if pass { "PASS" } else { "FAIL" }
        );
        for w in &fit.warnings {
            let mut w = fit_warning(w);
            w.message = format!("row {}: {}", row.index, w.message);
            report.warnings.push(w);
        }
        rows.push(ValidationRow {
            row: row.index,
            a_j: row.a_j,
            alpha: row.alpha,
            fitted_a_j: fit.a_j,
            fitted_alpha: fit.alpha,
            eta_star: fit.eta_star,
            residual_rms: rms,
            identity_error,
            pass,
        });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(table, "{passed}/{} PASS", rows.len());
    if a.common.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    let total = rows.len();
    report.result = Some(json!({ "rows": rows, "passed": passed, "total": total }));
    if passed != total {
        return Err(Failed {
            code: EXIT_NUMERICAL,
            stage: "validation",
            error: anyhow::anyhow!("{} of {total} rows failed", total - passed),
        });
    }
    Ok(())
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

