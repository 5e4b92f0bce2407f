use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::json;

use kinrel::endstate::{
    cone_directions, sample_manifold, write_manifold_csv, ConeDirection, EndStateContext, DEFAULT_SEED,
};
use kinrel::eos::{validate_hypotheses, EosSpec, Species, ThermoState, ValidationGrid, ViscosityMode};
use kinrel::profile::{entropy_production, shoot, OrbitStatus, ProfileProblem, DRIFT_LIMIT};
use kinrel::riemann::entropy::entropy_dissipation_all;
use kinrel::riemann::hugoniot::{hugoniot_tangency_check, kinetic_hugoniot, HugoniotOptions};
use kinrel::riemann::kinetic::{KineticFunction, Side, TravelingWaveKinetic, ZeroKinetic};
use kinrel::riemann::mp_euler::{sample, write_sample_csv, RiemannOptions, RiemannProblem, StateInput};
use kinrel::riemann::standing::{
    standing_wave_with, ConstantLoss, DynamicHeadLoss, FlowBranch, MomentumLoss, StandingModel, StandingWaveProblem,
};
use kinrel::riemann::system::{ConservationSystem, MultiPressureEuler};
use kinrel::riemann::RESONANCE_DELTA;

use crate::report::{load_config, CliError, Output, Report};
use crate::{Format, Overrides};

/// Default number of viscosity directions for `manifold`.
pub const DEFAULT_DIRECTIONS: usize = 64;
/// Default number of `ξ` samples for `riemann`.
pub const DEFAULT_RIEMANN_SAMPLES: usize = 401;

pub fn profile(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let mut prob: ProfileProblem = load_config(&ov.config)?;
    if let Some(x) = ov.tol_rel {
        prob.tolerances.rel = x;
    }
    if let Some(x) = ov.tol_abs {
        prob.tolerances.abs = x;
    }
    if let Some(x) = ov.t_max {
        prob.t_max = Some(x);
    }
    let orbit = shoot(&prob)?;
    match ov.format {
        Format::Csv => out.write_csv(report, "orbit.csv", |w| orbit.write_csv(w))?,
        Format::Json => out.write_json(report, "orbit.json", &orbit)?,
    }

    report.set("orbit_status", orbit.status);
    report.set("reason", &orbit.reason);
    report.set("lax_margins", json!({ "entry": orbit.lax_margin, "exit": orbit.exit_margin }));
    report.set("H_drift_max", orbit.h_drift_max);
    report.set("H_drift_bound", DRIFT_LIMIT);
    report.set("entropy_jumps", entropy_production(&orbit, &prob));
    report.set("entropy_jump_definition", "m * (s_R - s_L)");
    report.set("terminal", &orbit.terminal);
    report.set("worst_entropy_decrease", orbit.worst_entropy_decrease());
    report.set("kick", orbit.kick);
    report.set("steps", orbit.steps);
    report.set("samples", orbit.samples.len());

    // With temperature-proportional viscosity the end state is known in closed form.
    if prob.visc.mode() == ViscosityMode::Temperature {
        let a = ConeDirection::new(prob.visc.direction()).map_err(CliError::from)?;
        match prob.context().map_err(CliError::from)?.end_state(&a) {
            Ok(e) => {
                let ds_gap = orbit.terminal.s.iter().zip(&e.s_r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                report.set(
                    "endstate",
                    json!({
                        "lambda0": e.lambda0,
                        "tau_R": e.tau_r,
                        "s_R": e.s_r,
                        "tau_gap": (orbit.terminal.tau - e.tau_r).abs(),
                        "s_gap": ds_gap,
                    }),
                );
            }
            Err(err) => report.set("endstate", json!({ "error": err.to_string() })),
        }
    }

    if orbit.status != OrbitStatus::Converged {
        let code = serde_json::to_value(orbit.status).ok().and_then(|v| v.as_str().map(String::from));
        report.failure = Some(CliError::solver(
            code.as_deref().unwrap_or("not_converged"),
            orbit.reason.clone().unwrap_or_default(),
        ));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldConfig {
    eos: EosSpec,
    #[serde(rename = "omega_L")]
    omega_l: ThermoState,
    m: f64,
    #[serde(default)]
    directions: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

pub fn manifold(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let cfg: ManifoldConfig = load_config(&ov.config)?;
    let n = cfg.eos.len();
    let count = ov.directions.or(cfg.directions).unwrap_or(DEFAULT_DIRECTIONS);
    let seed = ov.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    if count == 0 {
        return Err(CliError::config("config_schema", "at least one direction is required"));
    }
    let ctx = EndStateContext::new(cfg.eos, cfg.omega_l, cfg.m)?;
    let dirs = cone_directions(n, count, seed);
    let results = sample_manifold(&ctx, &dirs);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, (a, r)) in dirs.iter().zip(results).enumerate() {
        match r {
            Ok(s) => rows.push(s),
            Err(e) => {
                log::warn!("direction {i} failed: {e}");
                failures.push(json!({ "index": i, "a": a, "code": e.code(), "message": e.to_string() }));
            }
        }
    }
    match ov.format {
        Format::Csv => out.write_csv(report, "manifold.csv", |w| write_manifold_csv(w, n, &rows))?,
        Format::Json => out.write_json(report, "manifold.json", &rows)?,
    }

    let fold = |f: fn(&kinrel::endstate::ManifoldSample) -> f64| {
        let lo = rows.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        json!({ "min": lo, "max": hi })
    };
    report.set("seed", seed);
    report.set("directions_requested", dirs.len());
    report.set("rows", rows.len());
    report.set("lambda0", fold(|s| s.lambda0));
    report.set("lambda_bar", fold(|s| s.lambda_bar));
    report.set("reduced_precision", rows.iter().filter(|s| s.reduced_precision).count());
    report.set("lax_margins", json!({ "entry": ctx.lax_margin() }));
    report.set("failures", &failures);
    if rows.is_empty() {
        report.failure = Some(CliError::solver("no_convergence", "every direction failed"));
    }
    Ok(())
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KineticChoice {
    #[default]
    TravelingWave,
    Zero,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HugoniotConfig {
    eos: EosSpec,
    state: StateInput,
    #[serde(default)]
    kinetic: KineticChoice,
    #[serde(default)]
    a: Option<ConeDirection>,
    #[serde(default = "first_side")]
    side: Side,
    /// Shock speeds.
    #[serde(default)]
    speeds: Option<Vec<f64>>,
    /// Distances from the characteristic speed, on the Lax side.
    #[serde(default)]
    offsets: Option<Vec<f64>>,
    #[serde(default)]
    tangency: bool,
}

fn first_side() -> Side {
    Side::First
}

#[derive(Debug, Serialize)]
struct HugoniotRow {
    lambda: f64,
    rho: f64,
    u: f64,
    s: Vec<f64>,
    residual: f64,
    lax_margin: f64,
    dissipation: Vec<f64>,
    endstate_gap: Option<f64>,
}

pub fn hugoniot(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let cfg: HugoniotConfig = load_config(&ov.config)?;
    let n = cfg.eos.len();
    let sys = MultiPressureEuler::new(cfg.eos.clone());
    let st = cfg.state.resolve(&cfg.eos)?;
    let u0 = sys.encode(st.rho, st.u, &st.s);

    let tw = match cfg.kinetic {
        KineticChoice::TravelingWave => {
            let a = cfg.a.clone().ok_or_else(|| {
                CliError::config("config_schema", "`a` is required for the traveling_wave kinetic function")
            })?;
            if a.len() != n {
                return Err(CliError::config("config_schema", format!("`a` must have {n} components")));
            }
            Some(TravelingWaveKinetic::new(cfg.eos.clone(), a, cfg.side))
        }
        KineticChoice::Zero => None,
    };
    let zero = match cfg.side {
        Side::First => ZeroKinetic::first(n + 2),
        Side::Last => ZeroKinetic::last(n + 2),
    };
    let kin: &dyn KineticFunction = match &tw {
        Some(k) => k,
        None => &zero,
    };
    let j = kin.family();
    let sign = kin.lax_sign();
    let base = sys.eigenvalues(&u0)[j];
    let speeds: Vec<f64> = match (&cfg.speeds, &cfg.offsets) {
        (Some(v), None) => v.clone(),
        (None, Some(d)) => d.iter().map(|d| base + sign * d).collect(),
        _ => return Err(CliError::config("config_schema", "give exactly one of `speeds` or `offsets`")),
    };
    let mut opts = HugoniotOptions::default();
    if let Some(x) = ov.tol_rel {
        opts.residual = x;
    }

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &lam in &speeds {
        match kinetic_hugoniot(&sys, kin, &u0, lam, &opts) {
            Ok(pt) => {
                let u1 = DVector::from_vec(pt.u1.clone());
                let (rho, u, w) = sys.decode(&u1);
                let endstate_gap = match &tw {
                    Some(k) => endstate_gap(k, &u0, lam, rho, u, &w.s)?,
                    None => None,
                };
                rows.push(HugoniotRow {
                    lambda: lam,
                    rho,
                    u,
                    s: w.s.clone(),
                    residual: pt.residual,
                    lax_margin: sign * (lam - base),
                    dissipation: entropy_dissipation_all(&sys, lam, &u0, &u1),
                    endstate_gap,
                });
            }
            Err(e) => {
                log::warn!("speed {lam}: {e}");
                failures.push(json!({ "lambda": lam, "code": e.code(), "message": e.to_string() }));
            }
        }
    }

    match ov.format {
        Format::Csv => out.write_csv(report, "hugoniot.csv", |w| write_hugoniot_csv(w, n, &rows))?,
        Format::Json => out.write_json(report, "hugoniot.json", &rows)?,
    }

    report.set("family", j + 1);
    report.set("characteristic_speed", base);
    report.set("points", rows.len());
    report.set("residual_max", rows.iter().map(|r| r.residual).fold(0.0, f64::max));
    report.set("lax_margins", rows.iter().map(|r| r.lax_margin).collect::<Vec<_>>());
    report.set("entropy_jumps", rows.iter().map(|r| r.dissipation.clone()).collect::<Vec<_>>());
    if tw.is_some() {
        report.set("endstate_gap_max", rows.iter().filter_map(|r| r.endstate_gap).fold(0.0, f64::max));
    }
    report.set("failures", &failures);
    if cfg.tangency {
        match hugoniot_tangency_check(&sys, kin, &u0, &opts) {
            Ok(t) => report.set("tangency", t),
            Err(e) => report.set("tangency", json!({ "code": e.code(), "message": e.to_string() })),
        }
    }
    if let Some(f) = failures.first() {
        report.failure = Some(CliError::solver(
            f["code"].as_str().unwrap_or("no_convergence"),
            f["message"].as_str().unwrap_or_default(),
        ));
    }
    Ok(())
}

/// Largest difference between a Hugoniot state and the end state of the
/// traveling wave carrying the same mass flux.
fn endstate_gap(
    kin: &TravelingWaveKinetic,
    u0: &DVector<f64>,
    lam: f64,
    rho: f64,
    u: f64,
    s: &[f64],
) -> Result<Option<f64>, CliError> {
    let Some((m, e)) = kin.end_state(u0, lam)? else {
        return Ok(None);
    };
    let gap = [(1.0 / rho - e.tau_r).abs(), (u - (lam + m * e.tau_r)).abs()]
        .into_iter()
        .chain(s.iter().zip(&e.s_r).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    Ok(Some(gap))
}

fn write_hugoniot_csv(w: &mut Vec<u8>, n: usize, rows: &[HugoniotRow]) -> std::io::Result<()> {
    use std::io::Write;
    let mut head = vec!["Lambda".to_string(), "rho".into(), "u".into()];
    head.extend((1..=n).map(|i| format!("s_{i}")));
    head.push("residual".into());
    head.extend((1..=n).map(|i| format!("E_{i}")));
    writeln!(w, "{}", head.join(","))?;
    for r in rows {
        let vals: Vec<String> = [r.lambda, r.rho, r.u]
            .iter()
            .chain(&r.s)
            .chain(std::iter::once(&r.residual))
            .chain(&r.dissipation)
            .map(|x| format!("{x:.16e}"))
            .collect();
        writeln!(w, "{}", vals.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleGrid {
    xi_min: f64,
    xi_max: f64,
    count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiemannConfig {
    eos: EosSpec,
    left: StateInput,
    right: StateInput,
    #[serde(rename = "a_L")]
    a_l: ConeDirection,
    #[serde(rename = "a_R")]
    a_r: ConeDirection,
    #[serde(default)]
    options: RiemannOptions,
    #[serde(default)]
    resonance_delta: Option<f64>,
    #[serde(default)]
    samples: Option<SampleGrid>,
}

#[derive(Debug, Serialize)]
struct SampleRow {
    xi: f64,
    rho: f64,
    u: f64,
    p_total: f64,
    s: Vec<f64>,
}

pub fn riemann(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let cfg: RiemannConfig = load_config(&ov.config)?;
    let mut problem = RiemannProblem {
        eos: cfg.eos,
        left: cfg.left,
        right: cfg.right,
        a_l: cfg.a_l,
        a_r: cfg.a_r,
        options: cfg.options,
    };
    if let Some(d) = cfg.resonance_delta {
        problem.options.resonance_delta = d;
    }
    if let Some(x) = ov.tol_rel {
        problem.options.tol_rel = x;
    }
    let eos = problem.eos.clone();
    let fan = problem.solve()?;
    out.write_json(report, "wavefan.json", &fan)?;

    let speeds = fan.speeds();
    let grid = cfg.samples.unwrap_or_else(|| {
        let lo = speeds.first().copied().unwrap_or(-1.0);
        let hi = speeds.last().copied().unwrap_or(1.0);
        let pad = 0.25 * (hi - lo).max(1.0);
        SampleGrid { xi_min: lo - pad, xi_max: hi + pad, count: DEFAULT_RIEMANN_SAMPLES }
    });
    if grid.count < 2 || !(grid.xi_max > grid.xi_min) {
        return Err(CliError::config("config_schema", "samples need count >= 2 and xi_max > xi_min"));
    }
    let xis: Vec<f64> = (0..grid.count)
        .map(|k| grid.xi_min + (grid.xi_max - grid.xi_min) * k as f64 / (grid.count - 1) as f64)
        .collect();
    match ov.format {
        Format::Csv => out.write_csv(report, "riemann.csv", |w| write_sample_csv(w, &eos, &fan, &xis))?,
        Format::Json => {
            let rows = xis
                .iter()
                .map(|&xi| {
                    let st = sample(&eos, &fan, xi)?;
                    Ok(SampleRow { xi, rho: st.rho, u: st.u, p_total: st.pressure(&eos), s: st.s })
                })
                .collect::<Result<Vec<_>, kinrel::riemann::RiemannError>>()?;
            out.write_json(report, "riemann.json", &rows)?
        }
    }

    let jumps = fan.jump_residuals(&eos);
    let waves: Vec<_> = fan
        .waves
        .iter()
        .map(|w| {
            json!({
                "kind": w.kind,
                "family": w.family,
                "speeds": [w.speed_tail, w.speed_head],
                "mass_flux": w.mass_flux,
                "lax_margins": w.lax_margins,
                "entropy_jumps": w.dissipation,
            })
        })
        .collect();
    report.set("p_star", fan.p_star);
    report.set("u_star", fan.u_star);
    report.set("wave_speeds", &speeds);
    report.set("speeds_nondecreasing", speeds.windows(2).all(|w| w[0] <= w[1]));
    report.set("waves", waves);
    report.set("lax_margins", fan.waves.iter().filter_map(|w| w.lax_margins).collect::<Vec<_>>());
    report.set("entropy_jumps", fan.waves.iter().map(|w| w.dissipation.clone()).collect::<Vec<_>>());
    let jump_max = jumps.iter().map(|r| r.mass.max(r.momentum).max(r.energy)).fold(0.0, f64::max);
    report.set(
        "residuals",
        json!({
            "velocity_mismatch": fan.velocity_mismatch,
            "pressure_mismatch": fan.pressure_mismatch,
            "quadrature_error": fan.quadrature_error,
            "jump_max": jump_max,
            "jumps": jumps,
        }),
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum LossSpec {
    Constant { kappa: f64 },
    DynamicHead { coefficient: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StandingConfig {
    model: StandingModel,
    rho_minus: f64,
    v_minus: f64,
    a_minus: f64,
    a_plus: f64,
    #[serde(default)]
    kappa: f64,
    branch: FlowBranch,
    #[serde(default)]
    resonance_delta: Option<f64>,
    #[serde(default)]
    loss: Option<LossSpec>,
}

pub fn standing(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let cfg: StandingConfig = load_config(&ov.config)?;
    let problem = StandingWaveProblem {
        model: cfg.model,
        rho_minus: cfg.rho_minus,
        v_minus: cfg.v_minus,
        a_minus: cfg.a_minus,
        a_plus: cfg.a_plus,
        kappa: cfg.kappa,
        branch: cfg.branch,
        resonance_delta: cfg.resonance_delta.unwrap_or(RESONANCE_DELTA),
    };
    let loss: Box<dyn MomentumLoss> = match cfg.loss {
        None => Box::new(ConstantLoss(problem.kappa)),
        Some(_) if problem.kappa != 0.0 => {
            return Err(CliError::config("config_schema", "give either `kappa` or `loss`, not both"))
        }
        Some(LossSpec::Constant { kappa }) => Box::new(ConstantLoss(kappa)),
        Some(LossSpec::DynamicHead { coefficient }) => Box::new(DynamicHeadLoss { coefficient }),
    };
    let sol = standing_wave_with(&problem, loss.as_ref())?;
    match ov.format {
        Format::Csv => out.write_csv(report, "standing.csv", |w| {
            use std::io::Write;
            writeln!(w, "rho_minus,v_minus,rho_plus,v_plus,mass_flux,kappa,dissipation,flux_jump")?;
            let p = &problem;
            let vals: Vec<String> = [
                p.rho_minus,
                p.v_minus,
                sol.rho_plus,
                sol.v_plus,
                sol.mass_flux,
                sol.kappa,
                sol.dissipation,
                sol.flux_jump,
            ]
            .iter()
            .map(|x| format!("{x:.16e}"))
            .collect();
            writeln!(w, "{}", vals.join(","))
        })?,
        Format::Json => out.write_json(report, "standing.json", &sol)?,
    }
    report.set("solution", &sol);
    report.set("entropy_jumps", [sol.dissipation]);
    report.set("residuals", json!({ "loss_balance": (sol.flux_jump - sol.dissipation).abs() }));
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaw {
    species: Vec<Species>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateConfig {
    eos: RawLaw,
    #[serde(default)]
    grid: ValidationGrid,
}

pub fn validate_eos(ov: &Overrides, out: &Output, report: &mut Report) -> Result<(), CliError> {
    let cfg: ValidateConfig = load_config(&ov.config)?;
    // Exponents at or below one are reported by the validator, not rejected here.
    let sane = !cfg.eos.species.is_empty()
        && cfg.eos.species.iter().all(|s| s.gamma > 0.0 && s.gamma.is_finite() && s.kappa > 0.0 && s.kappa.is_finite());
    if !sane {
        return Err(CliError::config("config_schema", "species need finite gamma > 0 and kappa > 0"));
    }
    let eos = EosSpec::new_unchecked(cfg.eos.species);
    let rep = validate_hypotheses(&eos, &cfg.grid);
    match ov.format {
        Format::Csv => out.write_csv(report, "eos_report.csv", |w| {
            use std::io::Write;
            writeln!(w, "check,passed,worst,detail")?;
            for c in &rep.checks {
                writeln!(w, "{},{},{:.16e},\"{}\"", c.name, c.passed, c.worst, c.detail.replace('"', "'"))?;
            }
            Ok(())
        })?,
        Format::Json => out.write_json(report, "eos_report.json", &rep)?,
    }
    report.set("all_passed", rep.all_passed());
    report.set("checks", &rep.checks);
    if !rep.all_passed() {
        let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        report.failure = Some(CliError::solver("hypothesis_failed", failed.join(", ")));
    }
    Ok(())
}
