//! Dispatch of one experiment to the numerical modules.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use helmloc::bernstein::{
    as_symbol, bernstein_derivative, bernstein_eval, verify_derivative_bound, verify_nondegeneracy,
};
use helmloc::bessel::{verify_bessel_expansion, verify_fd_expansion, ExpansionCheck};
use helmloc::grid::decode;
use helmloc::kernel::{verify_kernel_bound_with, CutoffSpec, DEFAULT_POINTS_PER_DECADE, DEFAULT_R_MAX_FACTOR};
use helmloc::localization::{
    quotient_profile, run_contrapositive_check, run_forward_check, run_j0_check, spectral_support_profile,
    DEFAULT_DELTA, DEFAULT_WINDOW,
};
use helmloc::multiplier::{helmholtz_residual, polyharmonic_residual, ResidualReport};
use helmloc::quadrature::geomspace;
use helmloc::symbols::{finite_difference, full_condition_report, ConditionMode, Witness};
use helmloc::{Error, GridFunction, Symbol};
use serde_json::{json, Value};

use crate::config::{Command, ExpansionSource, ExperimentConfig, ModeSpec, WaveKind};

/// Default pass threshold on relative residuals.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-11;
/// Allowed distance between fitted and theoretical decay exponents.
pub const DECAY_TOLERANCE: f64 = 0.15;
pub const SCALING_TOLERANCE: f64 = 0.05;
pub const LIMIT_TOLERANCE: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-8;

/// Result of one experiment: the JSON report and an optional CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub report: Value,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    witnesses: Vec<Value>,
}

impl Check {
    fn new(name: &'static str, pass: bool) -> Self {
        Check { name, pass, witnesses: Vec::new() }
    }

    fn with(mut self, w: Value) -> Self {
        self.witnesses.push(w);
        self
    }

    fn json(&self) -> Value {
        json!({ "name": self.name, "pass": self.pass, "witnesses": self.witnesses })
    }
}

struct Body {
    checks: Vec<Check>,
    metrics: Value,
    csv: Option<String>,
}

fn witness(w: &Witness) -> Value {
    serde_json::to_value(w).unwrap_or(Value::Null)
}

/// Runs the configured command. Numerical failures (including module errors)
/// give a failing outcome with the error embedded; they never panic.
/// `base_dir` resolves relative input paths.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: Option<&Path>) -> Outcome {
    let result = cfg.symbol.build().map_err(|e| e.0).and_then(|sym| {
        match cfg.command {
            Command::CheckSymbol => check_symbol(cfg, &sym),
            Command::BesselTable => bessel_table(cfg),
            Command::KernelNorm => kernel_norm(cfg, &sym),
            Command::Residual => residual(cfg, &sym, base_dir),
            Command::Localize => localize(cfg, &sym, base_dir),
            Command::J0Check => j0_check(cfg, &sym),
            Command::BernsteinVerify => bernstein_verify(cfg),
        }
        .map_err(|e| e.to_string())
    });
    let mut report = json!({
        "tool": "helmloc",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.as_str(),
        "seed": cfg.seed,
        "threshold": cfg.threshold,
        "d": cfg.dimension,
        "config": toml_to_json(&toml::Value::Table(cfg.raw.clone())),
        "symbol": { "name": cfg.symbol.name, "params": cfg.symbol.params },
    });
    match result {
        Ok(body) => {
            let pass = body.checks.iter().all(|c| c.pass);
            report["pass"] = json!(pass);
            report["checks"] = Value::Array(body.checks.iter().map(Check::json).collect());
            report["metrics"] = body.metrics;
            Outcome { pass, report, csv: body.csv }
        }
        Err(msg) => {
            report["pass"] = json!(false);
            report["checks"] = json!([]);
            report["error"] = json!(msg);
            Outcome { pass: false, report, csv: None }
        }
    }
}

fn toml_to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => json!(s),
        toml::Value::Integer(i) => json!(i),
        toml::Value::Float(f) => json!(f),
        toml::Value::Boolean(b) => json!(b),
        toml::Value::Datetime(d) => json!(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => Value::Object(t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect()),
    }
}

type Run = Result<Body, Error>;

fn check_symbol(cfg: &ExperimentConfig, sym: &Symbol) -> Run {
    let mode = cfg.options.mode.unwrap_or(ConditionMode::StrictC);
    let r = full_condition_report(sym, cfg.dimension, mode)?;
    let tagged = |prefix: &str| -> Vec<Value> {
        r.failure_witnesses.iter().filter(|w| w.condition.starts_with(prefix)).map(witness).collect()
    };
    let mut checks = vec![
        Check { name: "growth", pass: r.growth_pass, witnesses: tagged("a:") },
        Check { name: "singularity", pass: r.singularity_pass, witnesses: tagged("b:") },
        Check { name: "univalence", pass: r.univalence_pass, witnesses: tagged("c:") },
    ];
    let nondeg = r.phi_at_one.abs() > 0.0 && r.j0.is_some();
    checks.push(Check::new("nondegenerate_at_one", nondeg).with(json!({ "phi_at_one": r.phi_at_one, "j0": r.j0 })));
    let rows = r.growth_exponents.len().max(r.singularity_terms.len());
    let mut csv = String::from("order,growth_exponent,singularity_term\n");
    for i in 0..rows {
        let g = r.growth_exponents.get(i).copied().flatten().map(fmt).unwrap_or_default();
        let s = r.singularity_terms.get(i).map(|x| fmt(*x)).unwrap_or_default();
        let _ = writeln!(csv, "{i},{g},{s}");
    }
    let metrics = serde_json::to_value(&r).unwrap_or(Value::Null);
    Ok(Body { checks, metrics, csv: Some(csv) })
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn bessel_lambdas(cfg: &ExperimentConfig) -> Vec<f64> {
    let o = &cfg.options;
    match &o.lambdas {
        Some(ls) => ls.clone(),
        None => geomspace(o.lambda_min.unwrap_or(10.0), o.lambda_max.unwrap_or(1000.0), o.lambda_count.unwrap_or(16)),
    }
}

fn decay_check(c: &ExpansionCheck) -> Check {
    let fit_ok = match c.fitted_decay {
        _ if c.exact => true,
        Some(f) => (f + c.rate).abs() <= DECAY_TOLERANCE,
        None => c.rows.len() < 2,
    };
    let bounded = c.max_scaled_error.is_finite();
    Check::new("expansion_decay", fit_ok && bounded).with(json!({
        "rate": c.rate,
        "fitted_decay": c.fitted_decay,
        "max_scaled_error": c.max_scaled_error,
        "exact": c.exact,
    }))
}

fn bessel_table(cfg: &ExperimentConfig) -> Run {
    let o = &cfg.options;
    let k = o.k.unwrap_or(2);
    let lambdas = bessel_lambdas(cfg);
    let source = o.source.unwrap_or_default();
    let (check, col) = match source {
        ExpansionSource::Bessel => (verify_bessel_expansion(o.nu.unwrap_or(0.0), k, &lambdas)?, "j_nu"),
        ExpansionSource::Surface => (verify_fd_expansion(cfg.dimension, k, &lambdas)?, "f_d"),
    };
    let mut csv = format!("lambda,{col},expansion,error,envelope,scaled_error\n");
    for r in &check.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt(r.lambda),
            fmt(r.reference),
            fmt(r.expansion),
            fmt(r.error),
            fmt(r.envelope),
            fmt(r.scaled_error)
        );
    }
    let metrics = json!({
        "source": source,
        "nu": o.nu.unwrap_or(0.0),
        "k": k,
        "rate": check.rate,
        "fitted_decay": check.fitted_decay,
        "max_scaled_error": check.max_scaled_error,
        "exact": check.exact,
    });
    Ok(Body { checks: vec![decay_check(&check)], metrics, csv: Some(csv) })
}

fn kernel_norm(cfg: &ExperimentConfig, sym: &Symbol) -> Run {
    let o = &cfg.options;
    let cutoff = CutoffSpec::new(o.eps0.unwrap_or(0.5))?;
    let r_max = o.r_max.unwrap_or(DEFAULT_R_MAX_FACTOR / cutoff.eps0);
    let ppd = o.points_per_decade.unwrap_or(DEFAULT_POINTS_PER_DECADE);
    let (chk, prof) = verify_kernel_bound_with(sym, cfg.dimension, &cutoff, r_max, ppd)?;
    let mut csv = String::from("r,beta1,shell_contribution,cumulative_l1\n");
    for i in 0..prof.r_grid.len() {
        let inc = if i == 0 { prof.cumulative_l1[0] } else { prof.cumulative_l1[i] - prof.cumulative_l1[i - 1] };
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt(prof.r_grid[i]),
            fmt(prof.values[i]),
            fmt(inc),
            fmt(prof.cumulative_l1[i])
        );
    }
    let checks = vec![
        Check::new("l1_converged", chk.converged).with(json!({ "tail_ratio": chk.tail_ratio })),
        Check::new("ratio_stable", chk.stable && chk.ratio.is_finite()).with(json!({
            "ratio": chk.ratio,
            "ratio_rmax_doubled": chk.ratio_rmax_doubled,
            "ratio_nodes_doubled": chk.ratio_nodes_doubled,
        })),
    ];
    let metrics = json!({
        "l1": chk.l1,
        "rhs": chk.rhs,
        "ratio": chk.ratio,
        "converged": chk.converged,
        "tail_ratio": chk.tail_ratio,
        "red_flag": chk.red_flag,
        "r_max": r_max,
        "eps0": cutoff.eps0,
        "shells": prof.shells,
    });
    Ok(Body { checks, metrics, csv: Some(csv) })
}

fn default_points(d: usize) -> usize {
    if d <= 2 {
        16
    } else {
        8
    }
}

/// Grid function from explicit plane waves or a binary container file.
fn build_grid(cfg: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Option<GridFunction>, Error> {
    let o = &cfg.options;
    let d = cfg.dimension;
    if let Some(path) = &o.input {
        let p = match base_dir {
            Some(b) => b.join(path),
            None => Path::new(path).to_path_buf(),
        };
        let bytes = std::fs::read(&p).map_err(|e| Error::Precondition(format!("reading {}: {e}", p.display())))?;
        let gf = decode(&bytes)?;
        if gf.dim() != d {
            return Err(Error::Shape(format!("input has dimension {}, config says {d}", gf.dim())));
        }
        return Ok(Some(gf));
    }
    let Some(modes) = &o.modes else { return Ok(None) };
    let shape = o.shape.clone().unwrap_or_else(|| vec![default_points(d); d]);
    let bx = o.box_len.clone().unwrap_or_else(|| vec![2.0 * PI; d]);
    let waves: Vec<(Vec<f64>, &ModeSpec)> =
        modes.iter().map(|m| (m.k.iter().zip(&bx).map(|(&k, l)| 2.0 * PI * k as f64 / l).collect(), m)).collect();
    let gf = GridFunction::from_real_fn(shape, bx, |x| {
        waves
            .iter()
            .map(|(xi, m)| {
                let ph: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                m.amplitude
                    * match m.kind {
                        WaveKind::Cos => ph.cos(),
                        WaveKind::Sin => ph.sin(),
                    }
            })
            .sum()
    })?;
    Ok(Some(gf))
}

fn residual_row(name: &str, r: &ResidualReport) -> String {
    format!("{name},{},{},{},{}\n", fmt(r.residual_l2), fmt(r.residual_linf), fmt(r.relative_l2), fmt(r.per_mode_bound))
}

fn residual(cfg: &ExperimentConfig, sym: &Symbol, base_dir: Option<&Path>) -> Run {
    let gf = build_grid(cfg, base_dir)?.ok_or_else(|| Error::Precondition("no grid function given".into()))?;
    let threshold = cfg.threshold.unwrap_or(DEFAULT_RESIDUAL_THRESHOLD);
    let r = helmholtz_residual(sym, &gf)?;
    let mut csv = String::from("operator,residual_l2,residual_linf,relative_l2,per_mode_bound\n");
    csv.push_str(&residual_row("helmholtz", &r));
    let mut checks = vec![Check::new("helmholtz_residual", r.relative_l2 <= threshold)
        .with(json!({ "observed": r.relative_l2, "threshold": threshold }))];
    let mut metrics = json!({ "helmholtz": r, "observed": r.relative_l2, "shape": gf.shape(), "box": gf.box_len() });
    if let Some(j0) = cfg.options.j0 {
        let p = polyharmonic_residual(&gf, j0)?;
        csv.push_str(&residual_row("polyharmonic", &p));
        checks.push(
            Check::new("polyharmonic_residual", p.relative_l2 <= threshold)
                .with(json!({ "observed": p.relative_l2, "j0": j0 })),
        );
        metrics["polyharmonic"] = json!(p);
    }
    Ok(Body { checks, metrics, csv: Some(csv) })
}

fn localize(cfg: &ExperimentConfig, sym: &Symbol, base_dir: Option<&Path>) -> Run {
    let o = &cfg.options;
    let threshold = cfg.threshold.unwrap_or(DEFAULT_RESIDUAL_THRESHOLD);
    let trials = o.trials.unwrap_or(16);
    let fwd = run_forward_check(sym, cfg.dimension, trials, cfg.seed)?;
    let mut checks = vec![Check::new("forward", fwd.max_relative_residual <= threshold)
        .with(json!({ "max_relative_residual": fwd.max_relative_residual, "threshold": threshold }))];
    let mut metrics = json!({ "forward": fwd });
    let mut csv = String::from("metric,value\n");
    let _ = writeln!(csv, "forward_max_relative_residual,{}", fmt(fwd.max_relative_residual));
    if let Some(gf) = build_grid(cfg, base_dir)? {
        let delta = o.delta.unwrap_or(DEFAULT_DELTA);
        let prof = spectral_support_profile(&gf, delta)?;
        let _ = writeln!(csv, "mass_at_zero,{}", fmt(prof.mass_at_zero));
        let _ = writeln!(csv, "mass_on_sphere,{}", fmt(prof.mass_on_sphere));
        let _ = writeln!(csv, "mass_elsewhere,{}", fmt(prof.mass_elsewhere));
        metrics["support"] = json!(prof);
        match run_contrapositive_check(sym, &gf, delta) {
            Ok(c) => {
                let _ = writeln!(csv, "contrapositive_lower_bound,{}", fmt(c.lower_bound));
                let _ = writeln!(csv, "contrapositive_observed,{}", fmt(c.observed));
                checks.push(
                    Check::new("contrapositive", c.pass)
                        .with(json!({ "lower_bound": c.lower_bound, "observed": c.observed })),
                );
                metrics["contrapositive"] = json!(c);
            }
            Err(Error::Precondition(msg)) => metrics["contrapositive_skipped"] = json!(msg),
            Err(e) => return Err(e),
        }
    }
    Ok(Body { checks, metrics, csv: Some(csv) })
}

fn j0_check(cfg: &ExperimentConfig, sym: &Symbol) -> Run {
    let o = &cfg.options;
    let c = run_j0_check(sym, cfg.dimension)?;
    let q = quotient_profile(sym, c.j0, o.window.unwrap_or(DEFAULT_WINDOW), o.n_points.unwrap_or(201))?;
    let rel = ((q.limit_at_one - q.expected_limit) / q.expected_limit).abs();
    let checks = vec![
        Check::new("scaling_exponent", (c.scaling_exponent - c.j0 as f64).abs() <= SCALING_TOLERANCE)
            .with(json!({ "j0": c.j0, "exponent": c.scaling_exponent })),
        Check::new("quotient_bounded", c.quotient_bounded).with(json!({ "max_abs": q.max_abs })),
        Check::new("quotient_limit", rel <= LIMIT_TOLERANCE)
            .with(json!({ "limit": q.limit_at_one, "expected": q.expected_limit, "relative_error": rel })),
    ];
    let mut csv = String::from("t,q\n");
    for (t, v) in q.t.iter().zip(&q.values) {
        let _ = writeln!(csv, "{},{}", fmt(*t), fmt(*v));
    }
    let metrics = json!({
        "j0": c.j0,
        "scaling_exponent": c.scaling_exponent,
        "quotient_bounded": c.quotient_bounded,
        "limit_at_one": q.limit_at_one,
        "expected_limit": q.expected_limit,
        "max_abs": q.max_abs,
    });
    Ok(Body { checks, metrics, csv: Some(csv) })
}

fn bernstein_verify(cfg: &ExperimentConfig) -> Run {
    let bs = cfg
        .symbol
        .bernstein
        .as_ref()
        .ok_or_else(|| Error::Precondition("bernstein-verify needs a bernstein symbol".into()))?;
    let lambdas = cfg.options.lambdas.clone().unwrap_or_else(|| geomspace(1e-3, 1e3, 61));
    let mut csv = String::from("lambda,phi,dphi,dphi_fd,ratio\n");
    let mut worst_fd: f64 = 0.0;
    for &l in &lambdas {
        let phi = bernstein_eval(bs, l)?;
        let d = bernstein_derivative(bs, l)?;
        let fd = finite_difference(|x| bs.eval(x), 1, l).value;
        worst_fd = worst_fd.max(((fd - d) / d).abs());
        let ratio = if phi > 0.0 { l * d / phi } else { f64::NAN };
        let _ = writeln!(csv, "{},{},{},{},{}", fmt(l), fmt(phi), fmt(d), fmt(fd), fmt(ratio));
    }
    let bound = verify_derivative_bound(bs, &lambdas)?;
    let nd = verify_nondegeneracy(bs)?;
    let mut checks = vec![
        Check::new("derivative_identity", worst_fd <= FD_TOLERANCE).with(json!({ "max_relative_error": worst_fd })),
        Check::new("derivative_bound", bound.pass)
            .with(json!({ "max_ratio": bound.max_ratio, "violations": bound.violations })),
        Check::new("nondegenerate", nd.phi1_nonzero && nd.dphi1_nonzero)
            .with(json!({ "phi_at_one": nd.phi_at_one, "derivative_at_one": nd.derivative_at_one })),
    ];
    let mut metrics = json!({ "derivative_bound": bound, "nondegeneracy": nd, "fd_max_relative_error": worst_fd });
    match as_symbol(bs) {
        Ok(sym) => {
            let r = full_condition_report(&sym, cfg.dimension, ConditionMode::StrictC)?;
            let ws: Vec<Value> = r.failure_witnesses.iter().map(witness).collect();
            checks.push(Check { name: "admissible_strict", pass: r.pass, witnesses: ws });
            metrics["conditions"] = json!(r);
        }
        Err(e) => checks.push(Check::new("admissible_strict", false).with(json!(e.to_string()))),
    }
    Ok(Body { checks, metrics, csv: Some(csv) })
}
