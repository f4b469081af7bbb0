//! The four lab commands. Each `run_*` function returns data; each `cmd_*`
//! function also writes report files and maps errors to exit codes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{
    ConformalStructureConfig, HModeConfig, IdentitiesConfig, IntegrateConfig, LabConfig, StructureRef, SweepConfig,
    TrajectoryFileConfig, WarpedStructureConfig,
};
use super::examples::{Example, ExampleConfig, ExampleName, GridConfig};
use super::{check_tolerance, config_hash, write_json, write_text, Outcome, EXIT_FAIL, EXIT_OK};
use crate::error::{LabError, Result};
use crate::field::RadialScalarField;
use crate::format::g17;
use crate::identities::{default_tolerance, identity_report, IdentityId, IdentityResidualReport, Status};
use crate::metric::WarpedProductMetric;
use crate::ode::{
    classify, first_integrals, integrate, structure_from_states, synthesize_initial, Classification, FamilyKind,
    OdeEvent, OdeParams, OdeState, OdeTrajectory, SolutionFamily,
};
use crate::structure::{EinsteinTypeStructure, HMode};

/// Golden-value tolerance of `verify-example`.
pub const VERIFY_TOL: f64 = 1e-10;

/// Start of family trajectories when `t0` is not given.
pub const FAMILY_T0: f64 = 0.3;

fn finish(result: Result<Outcome>) -> Outcome {
    result.unwrap_or_else(|e| Outcome::from_error(&e))
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
pub struct GoldenCheck {
    pub t: f64,
    pub quantity: &'static str,
    pub value: f64,
    pub expected: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantitySummary {
    pub quantity: &'static str,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub example: &'static str,
    pub config_hash: String,
    pub tolerance: f64,
    pub parameters: Example,
    pub pass: bool,
    /// max |s| over the grid
    pub s_max_abs: f64,
    pub summary: Vec<QuantitySummary>,
    pub points: Vec<GoldenCheck>,
}

/// Golden-value check of a named example. Parameters come from the
/// `example` block when present; tolerance from the block, then `env_tol`,
/// then [`VERIFY_TOL`].
pub fn run_verify_example(name: &str, cfg: &LabConfig, env_tol: Option<f64>) -> Result<VerifyReport> {
    let name = ExampleName::parse(name)?;
    let block = cfg.example.clone().unwrap_or_default();
    if let Some(other) = block.name {
        if other != name {
            return Err(LabError::Config(format!(
                "config names example '{}' but '{}' was requested",
                other.name(),
                name.name()
            )));
        }
    }
    let tolerance = match block.tolerance.or(env_tol) {
        Some(t) => check_tolerance("example.tolerance", t)?,
        None => VERIFY_TOL,
    };
    let ex = Example::resolve(name, &block)?;
    let config_hash = config_hash(
        "verify-example",
        &serde_json::json!({ "example": ex, "tolerance": tolerance }),
    )?;
    let mut points = Vec::new();
    let mut summary: Vec<QuantitySummary> = Vec::new();
    let mut s_max_abs = 0.0f64;
    for t in ex.grid.points() {
        for (quantity, value, expected) in ex.golden(t)? {
            let deviation = (value - expected).abs();
            let pass = deviation <= tolerance;
            if quantity == "s" {
                s_max_abs = s_max_abs.max(value.abs());
            }
            match summary.iter_mut().find(|q| q.quantity == quantity) {
                Some(q) => {
                    q.max_deviation = q.max_deviation.max(deviation);
                    q.pass &= pass;
                }
                None => summary.push(QuantitySummary {
                    quantity,
                    max_deviation: deviation,
                    pass,
                }),
            }
            points.push(GoldenCheck {
                t,
                quantity,
                value,
                expected,
                deviation,
                pass,
            });
        }
    }
    let pass = points.iter().all(|p| p.pass);
    Ok(VerifyReport {
        command: "verify-example",
        example: name.name(),
        config_hash,
        tolerance,
        parameters: ex,
        pass,
        s_max_abs,
        summary,
        points,
    })
}

/// Writes `verify_<name>.json` into `out`; exit 0 iff every value passes.
pub fn cmd_verify_example(name: &str, cfg: &LabConfig, env_tol: Option<f64>, out: &Path) -> Outcome {
    finish((|| {
        let r = run_verify_example(name, cfg, env_tol)?;
        let mut files = Vec::new();
        write_json(out, &format!("verify_{}.json", r.example), &r, &mut files)?;
        let mut lines = Vec::new();
        for q in &r.summary {
            lines.push(format!(
                "{} {:<12} max_dev={:.3e}",
                if q.pass { "PASS" } else { "FAIL" },
                q.quantity,
                q.max_deviation
            ));
        }
        lines.push(format!(
            "{} {}: s_max_abs={:.3e} tolerance={:e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.example,
            r.s_max_abs,
            r.tolerance
        ));
        Ok(Outcome {
            code: if r.pass { EXIT_OK } else { EXIT_FAIL },
            lines,
            files,
        })
    })())
}

// ---------------------------------------------------------------- structures

fn h_mode_from(c: &HModeConfig, lo: f64, hi: f64) -> Result<HMode> {
    Ok(match c {
        HModeConfig::Constant(h) => {
            if !h.is_finite() {
                return Err(LabError::Config(format!("h = {h} is not finite")));
            }
            HMode::Constant(*h)
        }
        HModeConfig::Function { function } => HMode::Function(RadialScalarField::parse(function, lo, hi)?),
        HModeConfig::Preset(p) => HMode::Preset(*p),
    })
}

fn warped_structure(c: &WarpedStructureConfig) -> Result<EinsteinTypeStructure> {
    let b = RadialScalarField::parse(&c.b, c.lo, c.hi)?;
    let f = RadialScalarField::parse(&c.f, c.lo, c.hi)?;
    let metric = WarpedProductMetric::warped(c.n, b, c.kappa0)?;
    EinsteinTypeStructure::new(metric, f, h_mode_from(&c.h, c.lo, c.hi)?)
}

fn conformal_structure(c: &ConformalStructureConfig) -> Result<EinsteinTypeStructure> {
    let lapse = RadialScalarField::parse(&c.lapse, c.lo, c.hi)?;
    let f = match &c.f {
        Some(src) => RadialScalarField::parse(src, c.lo, c.hi)?,
        None => lapse.clone(),
    };
    let metric = WarpedProductMetric::conformal_radial(lapse);
    EinsteinTypeStructure::new(metric, f, h_mode_from(&c.h, c.lo, c.hi)?)
}

/// States from a CSV with at least the columns `t,b,bp,f,fp`, as written
/// by `integrate`.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<OdeState>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| LabError::Config("trajectory file is empty".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| LabError::Config(format!("trajectory file has no '{name}' column")))
    };
    let idx = [col("t")?, col("b")?, col("bp")?, col("f")?, col("fp")?];
    let mut states = Vec::new();
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let mut v = [0.0; 5];
        for (k, &i) in idx.iter().enumerate() {
            let cell = cells
                .get(i)
                .ok_or_else(|| LabError::Config(format!("trajectory row {} is short", row + 1)))?;
            v[k] = cell
                .parse()
                .map_err(|_| LabError::Config(format!("trajectory row {}: bad number '{cell}'", row + 1)))?;
        }
        states.push(OdeState::new(v[0], v[1], v[2], v[3], v[4]));
    }
    if states.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(LabError::Config("trajectory times must increase strictly".into()));
    }
    Ok(states)
}

fn trajectory_structure(c: &TrajectoryFileConfig) -> Result<(EinsteinTypeStructure, String)> {
    let bytes = std::fs::read(&c.path).map_err(|e| LabError::Config(format!("cannot read {}: {e}", c.path)))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| LabError::Config(format!("{} is not UTF-8", c.path)))?;
    let states = read_trajectory_csv(&text)?;
    let params = OdeParams::new(c.n, c.h, c.kappa0);
    Ok((structure_from_states(&states, &params)?, digest))
}

/// The structure named by `r`, plus the digest of any file it was read from.
pub fn resolve_structure(r: &StructureRef) -> Result<(EinsteinTypeStructure, Option<String>)> {
    Ok(match r {
        StructureRef::Example(e) => (Example::resolve(e.name, &e.to_config())?.structure()?, None),
        StructureRef::Warped(c) => (warped_structure(c)?, None),
        StructureRef::Conformal(c) => (conformal_structure(c)?, None),
        StructureRef::Trajectory(c) => {
            let (s, d) = trajectory_structure(c)?;
            (s, Some(d))
        }
        StructureRef::Integrate(c) => (run_integrate(c)?.trajectory.structure()?, None),
    })
}

// ---------------------------------------------------------------- identities

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummaryRow {
    pub identity_id: IdentityId,
    pub status: Status,
    pub max_abs: f64,
    pub tolerance: f64,
    pub excluded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitiesSummary {
    pub command: &'static str,
    pub config_hash: String,
    pub status: Status,
    pub grid: GridConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Vec<IdentitySummaryRow>,
}

#[derive(Debug, Clone)]
pub struct IdentitiesRun {
    pub summary: IdentitiesSummary,
    pub reports: Vec<IdentityResidualReport>,
}

#[derive(Serialize)]
struct IdentityFile<'a> {
    config_hash: &'a str,
    #[serde(flatten)]
    report: &'a IdentityResidualReport,
}

fn suite(c: &IdentitiesConfig) -> Result<Vec<IdentityId>> {
    match &c.suite {
        None => Ok(IdentityId::ALL.to_vec()),
        Some(names) => {
            let mut ids = Vec::new();
            for s in names {
                let id = IdentityId::parse(s).map_err(|e| LabError::Config(e.to_string()))?;
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            Ok(ids)
        }
    }
}

/// Runs the identity suite on the configured structure. Per-identity
/// tolerance: `tolerances[id]`, then `tolerance`, then `env_tol`, then the
/// structure default.
pub fn run_identities(c: &IdentitiesConfig, env_tol: Option<f64>) -> Result<IdentitiesRun> {
    let ids = suite(c)?;
    for key in c.tolerances.keys() {
        IdentityId::parse(key).map_err(|e| LabError::Config(format!("tolerances: {e}")))?;
    }
    let (mut ets, digest) = resolve_structure(&c.structure)?;
    let (lo, hi) = ets.domain();
    if let Some(h) = &c.h_mode {
        ets = ets.with_h_mode(h_mode_from(h, lo, hi)?)?;
    }
    let grid_cfg = match c.grid {
        Some(g) => {
            g.validate()?;
            for t in [g.lo, g.hi] {
                if t < lo || t > hi {
                    return Err(LabError::DomainError { t, lo, hi });
                }
            }
            g
        }
        None => {
            let pts = ets.default_grid();
            GridConfig {
                lo: pts[0],
                hi: pts[pts.len() - 1],
                count: pts.len(),
            }
        }
    };
    let grid = grid_cfg.points();
    let base = match c.tolerance.or(env_tol) {
        Some(t) => check_tolerance("identities.tolerance", t)?,
        None => default_tolerance(&ets),
    };
    let mut tolerances = BTreeMap::new();
    for id in &ids {
        let tol = match c.tolerances.get(id.name()) {
            Some(&t) => check_tolerance(id.name(), t)?,
            None => base,
        };
        tolerances.insert(id.name().to_string(), tol);
    }
    let effective = serde_json::json!({
        "identities": c,
        "grid": grid_cfg,
        "tolerances": tolerances,
        "trajectory_sha256": digest,
    });
    let config_hash = config_hash("identities", &effective)?;
    let mut reports = Vec::new();
    for id in &ids {
        reports.push(identity_report(*id, &ets, &grid, tolerances[id.name()])?);
    }
    let status = if reports.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    };
    let results = reports
        .iter()
        .map(|r| IdentitySummaryRow {
            identity_id: r.identity_id,
            status: r.status,
            max_abs: r.max_abs,
            tolerance: r.tolerance,
            excluded: r.excluded,
            reason: r.reason.clone(),
        })
        .collect();
    Ok(IdentitiesRun {
        summary: IdentitiesSummary {
            command: "identities",
            config_hash,
            status,
            grid: grid_cfg,
            tolerances,
            results,
        },
        reports,
    })
}

/// Writes `identity_<id>.json` per identity and `summary.json`; exit 1 iff
/// any identity FAILs.
pub fn cmd_identities(cfg: &LabConfig, env_tol: Option<f64>, out: &Path) -> Outcome {
    finish((|| {
        let c = cfg
            .identities
            .as_ref()
            .ok_or_else(|| LabError::Config("config has no 'identities' block".into()))?;
        let run = run_identities(c, env_tol)?;
        let mut files = Vec::new();
        for r in &run.reports {
            let file = IdentityFile {
                config_hash: &run.summary.config_hash,
                report: r,
            };
            write_json(
                out,
                &format!("identity_{}.json", r.identity_id.name()),
                &file,
                &mut files,
            )?;
        }
        write_json(out, "summary.json", &run.summary, &mut files)?;
        let mut lines: Vec<String> = run
            .summary
            .results
            .iter()
            .map(|r| {
                let mut l = format!(
                    "{:<4} {:<18} max_abs={:.3e} tol={:e}",
                    status_name(r.status),
                    r.identity_id.name(),
                    r.max_abs,
                    r.tolerance
                );
                if let Some(why) = &r.reason {
                    l.push_str(&format!(" ({why})"));
                }
                l
            })
            .collect();
        lines.push(format!("{} identities", status_name(run.summary.status)));
        let code = if run.summary.status == Status::Fail {
            EXIT_FAIL
        } else {
            EXIT_OK
        };
        Ok(Outcome { code, lines, files })
    })())
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    }
}

// ---------------------------------------------------------------- integrate

#[derive(Debug, Clone)]
pub struct IntegrateRun {
    pub params: OdeParams,
    pub initial: OdeState,
    pub trajectory: OdeTrajectory,
    pub classification: Classification,
}

fn setup(c: &IntegrateConfig) -> Result<(OdeParams, OdeState)> {
    if !(c.dt > 0.0 && c.dt.is_finite()) {
        return Err(LabError::Config(format!("dt = {} must be positive", c.dt)));
    }
    let (params, initial) = match c.family {
        Some(kind) => {
            if c.kappa0 != 1.0 {
                return Err(LabError::Config(
                    "closed-form families live over the round fiber (kappa0 = 1)".into(),
                ));
            }
            if c.a0.is_some() || c.kappa.is_some() || c.b0.is_some() {
                return Err(LabError::Config(
                    "a0, kappa and b0 do not apply to a family preset".into(),
                ));
            }
            let t0 = c.t0.unwrap_or(FAMILY_T0);
            let (lo, hi) = (t0, t0 + c.t_span.max(0.0));
            let fam = match kind {
                FamilyKind::Sphere { lambda } => SolutionFamily::sphere(c.n, lambda, c.h, lo, hi)?,
                FamilyKind::Hyperbolic { mu } => SolutionFamily::hyperbolic(c.n, mu, c.h, lo, hi)?,
                FamilyKind::Flat => {
                    if c.h != 0.0 {
                        return Err(LabError::Config("the flat family has h = 0".into()));
                    }
                    SolutionFamily::flat(c.n, c.f0.unwrap_or(1.0), lo, hi)?
                }
            };
            (fam.params(), fam.initial_state(t0)?)
        }
        None => {
            let a0 =
                c.a0.ok_or_else(|| LabError::Config("integrate needs 'a0' or a 'family'".into()))?;
            let b0 =
                c.b0.ok_or_else(|| LabError::Config("integrate needs 'b0' or a 'family'".into()))?;
            let kappa = c.kappa.unwrap_or(c.kappa0);
            let mut p = OdeParams::new(c.n, c.h, c.kappa0);
            p.kappa = Some(kappa);
            (
                p,
                synthesize_initial(c.n, c.h, a0, kappa, b0, c.bp_sign, c.t0.unwrap_or(0.0))?,
            )
        }
    };
    let mut params = params;
    if let Some(g) = c.guards {
        params.guards = g;
    }
    Ok((params, initial))
}

pub fn run_integrate(c: &IntegrateConfig) -> Result<IntegrateRun> {
    let (params, initial) = setup(c)?;
    let trajectory = integrate(initial, &params, c.t_span, c.dt)?;
    let classification = classify(&trajectory);
    Ok(IntegrateRun {
        params,
        initial,
        trajectory,
        classification,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftSummary {
    pub a0_drift: f64,
    pub kappa_drift: f64,
    pub f2s_drift: f64,
    pub warp_relation_max: f64,
    pub alpha_relation_max: f64,
}

impl DriftSummary {
    fn of(traj: &OdeTrajectory) -> Self {
        let r = first_integrals(traj);
        DriftSummary {
            a0_drift: r.a0_drift,
            kappa_drift: r.kappa_drift,
            f2s_drift: r.f2s_drift,
            warp_relation_max: r.warp_relation_max,
            alpha_relation_max: r.alpha_relation_max,
        }
    }
}

#[derive(Serialize)]
struct EventsFile<'a> {
    config_hash: &'a str,
    events: &'a [OdeEvent],
}

#[derive(Serialize)]
struct ClassificationFile<'a> {
    config_hash: &'a str,
    params: &'a OdeParams,
    initial: &'a OdeState,
    dt: f64,
    steps: usize,
    t_end: f64,
    classification: &'a Classification,
    first_integrals: DriftSummary,
}

fn integrate_hash(c: &IntegrateConfig, params: &OdeParams) -> Result<String> {
    config_hash("integrate", &serde_json::json!({ "integrate": c, "params": params }))
}

/// Writes `trajectory.csv`, `events.json` and `classification.json`.
pub fn cmd_integrate(cfg: &LabConfig, out: &Path) -> Outcome {
    finish((|| {
        let c = cfg
            .integrate
            .as_ref()
            .ok_or_else(|| LabError::Config("config has no 'integrate' block".into()))?;
        let run = run_integrate(c)?;
        let hash = integrate_hash(c, &run.params)?;
        let traj = &run.trajectory;
        let mut files = Vec::new();
        write_text(out, "trajectory.csv", &traj.to_csv(), &mut files)?;
        write_json(
            out,
            "events.json",
            &EventsFile {
                config_hash: &hash,
                events: &traj.events,
            },
            &mut files,
        )?;
        let t_end = traj.states.last().map_or(run.initial.t, |y| y.t);
        let file = ClassificationFile {
            config_hash: &hash,
            params: &run.params,
            initial: &run.initial,
            dt: traj.dt,
            steps: traj.len() - 1,
            t_end,
            classification: &run.classification,
            first_integrals: DriftSummary::of(traj),
        };
        write_json(out, "classification.json", &file, &mut files)?;
        let label = &run.classification.label;
        let mut line = format!("label: {}", label.name());
        if let Some(r) = label.reason() {
            line.push_str(&format!(" ({r})"));
        }
        let lines = vec![
            line,
            format!(
                "states: {} t_end: {} events: {}",
                traj.len(),
                g17(t_end),
                traj.events.len()
            ),
        ];
        Ok(Outcome {
            code: EXIT_OK,
            lines,
            files,
        })
    })())
}

// ---------------------------------------------------------------- sweep

const SWEEP_TOP_LEVEL: [&str; 10] = ["n", "h", "kappa0", "a0", "kappa", "b0", "bp_sign", "t0", "t_span", "dt"];
pub const SWEEP_CSV_HEADER: &str =
    "value,label,reason,a0_median,lambda_mean,a0_drift,kappa_drift,f2s_drift,t_end,exit,error";

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub label: Option<String>,
    pub reason: Option<String>,
    pub a0_median: Option<f64>,
    pub lambda_mean: Option<f64>,
    pub a0_drift: Option<f64>,
    pub kappa_drift: Option<f64>,
    pub f2s_drift: Option<f64>,
    pub t_end: Option<f64>,
    pub exit: Option<String>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(value: f64, e: &LabError) -> Self {
        SweepRow {
            value,
            label: None,
            reason: None,
            a0_median: None,
            lambda_mean: None,
            a0_drift: None,
            kappa_drift: None,
            f2s_drift: None,
            t_end: None,
            exit: None,
            error: Some(e.to_string()),
        }
    }

    fn csv(&self) -> String {
        let num = |v: Option<f64>| v.map(g17).unwrap_or_default();
        let text = |v: &Option<String>| v.as_deref().map(csv_quote).unwrap_or_default();
        [
            g17(self.value),
            text(&self.label),
            text(&self.reason),
            num(self.a0_median),
            num(self.lambda_mean),
            num(self.a0_drift),
            num(self.kappa_drift),
            num(self.f2s_drift),
            num(self.t_end),
            text(&self.exit),
            text(&self.error),
        ]
        .join(",")
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn check_sweep(c: &SweepConfig) -> Result<()> {
    let p = c.parameter.as_str();
    let family = c.inner.family;
    let ok = SWEEP_TOP_LEVEL.contains(&p)
        || (p == "f0" && family == Some(FamilyKind::Flat))
        || (p == "lambda" && matches!(family, Some(FamilyKind::Sphere { .. })))
        || (p == "mu" && matches!(family, Some(FamilyKind::Hyperbolic { .. })));
    if !ok {
        return Err(LabError::Config(format!(
            "'{p}' is not a sweepable parameter of this integrate block"
        )));
    }
    for &v in &c.values {
        if !v.is_finite() {
            return Err(LabError::Config(format!("sweep value {v} is not finite")));
        }
        if p == "n" && (v.fract() != 0.0 || v < 0.0) {
            return Err(LabError::Config(format!("sweep over n needs integers, got {v}")));
        }
    }
    Ok(())
}

/// The inner block with `parameter` set to `value`.
pub fn substitute(inner: &IntegrateConfig, parameter: &str, value: f64) -> Result<IntegrateConfig> {
    let mut v = serde_json::to_value(inner).map_err(|e| LabError::Config(e.to_string()))?;
    let number = if parameter == "n" {
        Value::from(value as u64)
    } else {
        Value::from(value)
    };
    let slot = match parameter {
        "lambda" | "mu" => &mut v["family"][parameter],
        _ => &mut v[parameter],
    };
    *slot = number;
    serde_json::from_value(v).map_err(|e| LabError::Config(e.to_string()))
}

fn sweep_row(c: &SweepConfig, value: f64) -> SweepRow {
    let run = substitute(&c.inner, &c.parameter, value).and_then(|inner| run_integrate(&inner));
    match run {
        Err(e) => SweepRow::failed(value, &e),
        Ok(run) => {
            let d = DriftSummary::of(&run.trajectory);
            let cl = &run.classification;
            SweepRow {
                value,
                label: Some(cl.label.name().to_string()),
                reason: cl.label.reason().map(str::to_string),
                a0_median: Some(cl.a0_median),
                lambda_mean: Some(cl.lambda_mean),
                a0_drift: Some(d.a0_drift),
                kappa_drift: Some(d.kappa_drift),
                f2s_drift: Some(d.f2s_drift),
                t_end: run.trajectory.states.last().map(|y| y.t),
                exit: cl.exit.map(|e| e.describe().to_string()),
                error: None,
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub command: &'static str,
    pub config_hash: String,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }
}

/// One row per value, computed in parallel and assembled in input order.
pub fn run_sweep(c: &SweepConfig) -> Result<SweepReport> {
    check_sweep(c)?;
    let config_hash = config_hash("sweep", c)?;
    let rows = c.values.par_iter().map(|&v| sweep_row(c, v)).collect();
    Ok(SweepReport {
        command: "sweep",
        config_hash,
        parameter: c.parameter.clone(),
        rows,
    })
}

/// Writes `sweep.csv` and `sweep.json`. Row failures are recorded in the
/// row and do not change the exit code.
pub fn cmd_sweep(cfg: &LabConfig, out: &Path) -> Outcome {
    finish((|| {
        let c = cfg
            .sweep
            .as_ref()
            .ok_or_else(|| LabError::Config("config has no 'sweep' block".into()))?;
        let report = run_sweep(c)?;
        let mut files: Vec<PathBuf> = Vec::new();
        write_text(out, "sweep.csv", &report.to_csv(), &mut files)?;
        write_json(out, "sweep.json", &report, &mut files)?;
        let lines = report
            .rows
            .iter()
            .map(|r| match (&r.label, &r.error) {
                (Some(l), _) => format!("{}={}: {l}", report.parameter, g17(r.value)),
                (None, Some(e)) => format!("{}={}: error: {e}", report.parameter, g17(r.value)),
                (None, None) => format!("{}={}", report.parameter, g17(r.value)),
            })
            .collect();
        Ok(Outcome {
            code: EXIT_OK,
            lines,
            files,
        })
    })())
}

/// Config block with only an `example` entry, as used by `verify-example`
/// when no config file is given.
pub fn example_only(c: ExampleConfig) -> LabConfig {
    LabConfig {
        example: Some(c),
        ..Default::default()
    }
}
