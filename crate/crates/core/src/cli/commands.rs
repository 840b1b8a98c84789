use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::args::*;
use super::{load_config, plot};
use crate::circuit::{parse_circuit, random_circuit, CircuitSpec};
use crate::clock::{
    analytic_ground_state, build_full_hb, build_full_hi, build_full_hp, project_to_subspace, subspace_residual,
    success_probability, ClockOperator, GammaBasis, PROJECTION_TOLERANCE,
};
use crate::evolution::{
    continuum_ground_state, fourth_derivative_bound, run_error_study, run_naive, run_three_stage, ErrorStudyConfig,
    DEFAULT_HALF_WIDTH, DEFAULT_SPACING,
};
use crate::reduced::{
    build_hb_reduced, build_hi_reduced, build_hp_reduced, FamilyKind, InterpolationFamily, Ramp,
    TridiagonalHamiltonian, DEFAULT_STAGE_TIME,
};
use crate::spectral::{
    crossing_point, gap_scaling_fit, gap_scan, gershgorin_bounds, lowest_eigenvalues, min_gap, stage1_gap_bound,
    uniform_grid, weyl_gap_bound, GapRoute,
};
use crate::{Error, Result};

/// What a subcommand produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// JSON summary for standard output.
    pub summary: Value,
    pub files: Vec<PathBuf>,
    /// Set when the command ran but a check it performs did not pass.
    pub failed: bool,
}

/// Execute a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let out = cli.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let gnuplot = cli.gnuplot || file.gnuplot.unwrap_or(false);
    std::fs::create_dir_all(&out)?;
    let mut ctx = Ctx { out, gnuplot, files: Vec::new() };
    let (summary, failed) = match cli.command {
        Command::GapScan(a) => (gap_scan_cmd(&mut ctx, a.merge(&file.gap_scan))?, false),
        Command::Scaling(a) => (scaling_cmd(&mut ctx, a.merge(&file.scaling))?, false),
        Command::Evolve(a) => (evolve_cmd(&mut ctx, a.merge(&file.evolve))?, false),
        Command::Verify(a) => {
            let summary = verify_cmd(&mut ctx, a.merge(&file.verify))?;
            let failed = !summary["all_passed"].as_bool().unwrap_or(false);
            (summary, failed)
        }
        Command::GroundState(a) => (ground_state_cmd(&mut ctx, a.merge(&file.ground_state))?, false),
    };
    Ok(Outcome { summary, files: ctx.files, failed })
}

struct Ctx {
    out: PathBuf,
    gnuplot: bool,
    files: Vec<PathBuf>,
}

impl Ctx {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let file = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn script(&mut self, name: &str, body: String) -> Result<()> {
        if self.gnuplot {
            let mut w = self.create(name)?;
            w.write_all(body.as_bytes())?;
            w.flush()?;
        }
        Ok(())
    }
}

fn family_name(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Naive => "naive",
        FamilyKind::Stage1 => "stage1",
        FamilyKind::Stage3 => "stage3",
    }
}

fn route_name(route: GapRoute) -> &'static str {
    match route {
        GapRoute::Eigensolver => "eigensolver",
        GapRoute::Secular => "secular",
    }
}

fn gap_scan_cmd(ctx: &mut Ctx, a: GapScanArgs) -> Result<Value> {
    let kind = a.family.unwrap_or(FamilyKind::Naive);
    let eta = a.eta.unwrap_or(4.0);
    let l = a.l.unwrap_or(16);
    let points = a.points.unwrap_or(401);
    if points < 2 {
        return Err(Error::InvalidParameter("need at least 2 grid points".into()));
    }
    let family = InterpolationFamily::new(kind, l, eta)?;
    let scan = gap_scan(&family, &uniform_grid(0.0, 1.0, points))?;
    let refined = min_gap(&family, 0.0, 1.0)?;
    let (grid_location, grid_gap) = scan.min_gap();

    let name = family_name(kind);
    let csv_name = format!("gap_scan_{name}.csv");
    let mut w = ctx.create(&csv_name)?;
    scan.write_csv(&mut w)?;
    w.flush()?;

    let mut summary = json!({
        "family": name,
        "eta": eta,
        "L": l,
        "points": points,
        "grid_min": { "location": grid_location, "gap": grid_gap },
        "min_gap": refined,
    });
    match kind {
        FamilyKind::Naive => summary["crossing_point"] = json!(crossing_point(eta)),
        FamilyKind::Stage1 => summary["gap_lower_bound"] = json!(stage1_gap_bound(eta)),
        FamilyKind::Stage3 => summary["gap_lower_bound"] = json!(weyl_gap_bound(eta)),
    }
    ctx.json(&format!("gap_scan_{name}.json"), &summary)?;
    ctx.script(&format!("gap_scan_{name}.gp"), plot::gap_scan(&csv_name, &format!("{name}, eta = {eta}, L = {l}")))?;
    Ok(summary)
}

fn scaling_cmd(ctx: &mut Ctx, a: ScalingArgs) -> Result<Value> {
    let eta = a.eta.unwrap_or(4.0);
    let ls = a.l.unwrap_or_else(|| (10..=24).step_by(2).collect());
    let route = a.mode.unwrap_or(GapRoute::Eigensolver);
    let fit = gap_scaling_fit(eta, &ls, route)?;
    let name = route_name(route);

    ctx.json(&format!("scaling_{name}.json"), &fit)?;
    let csv_name = format!("scaling_{name}.csv");
    let mut csv = csv::Writer::from_writer(ctx.create(&csv_name)?);
    csv.write_record(["L", "gap", "ln_gap"])?;
    for (&l, &g) in fit.l.iter().zip(&fit.gap) {
        csv.serialize((l, g, g.ln()))?;
    }
    csv.flush()?;
    ctx.script(&format!("scaling_{name}.gp"), plot::scaling(&csv_name, fit.slope, fit.intercept))?;

    let mut summary = serde_json::to_value(&fit)?;
    summary["mode"] = json!(name);
    summary["expected_slope"] = json!(-eta.ln());
    Ok(summary)
}

fn evolve_cmd(ctx: &mut Ctx, a: EvolveArgs) -> Result<Value> {
    let eta = a.eta.unwrap_or(4.0);
    let tau = a.tau.unwrap_or(40.0);
    let l = a.l.unwrap_or(20);
    let ramp = a.ramp.unwrap_or(Ramp::Linear);
    let started = Instant::now();
    let runtime = |timing: bool| timing.then(|| started.elapsed().as_secs_f64());

    if a.error_study {
        let half_width = a.half_width.unwrap_or(DEFAULT_HALF_WIDTH);
        let spacing = a.spacing.unwrap_or(DEFAULT_SPACING);
        let initial_overlap = a.initial_overlap.unwrap_or(1.0);
        let cgs = continuum_ground_state(eta, half_width, spacing)?;
        let config = ErrorStudyConfig { l, eta, tau, initial_overlap, dt: a.dt };
        let study = run_error_study(&config, &cgs)?;
        let mut w = ctx.create("error_study.csv")?;
        study.evolution.write_csv(&mut w, Some(&study.errors))?;
        w.flush()?;

        let mut summary = study.evolution.summary(None);
        summary["initial_overlap"] = json!(initial_overlap);
        summary["epsilon0"] = json!(cgs.epsilon0);
        summary["fourth_derivative_bound"] = json!(fourth_derivative_bound(&cgs, l, tau)?);
        summary["max_abs_err_sq"] = json!(study.errors.max_abs());
        summary["max_rel_err_sq"] = json!(study.errors.max_rel());
        summary["final_rel_err_sq"] = json!(study.errors.final_rel());
        summary["overlap_range"] = json!(study.evolution.overlap_range());
        if let Some(r) = runtime(a.timing) {
            summary["runtime_seconds"] = json!(r);
        }
        ctx.json("error_study.json", &summary)?;
        ctx.script("error_study.gp", plot::evolve("error_study.csv", true))?;
        return Ok(summary);
    }

    let mode = a.mode.unwrap_or_default();
    let (result, name) = match mode {
        EvolveMode::ThreeStage => {
            let t1 = a.t1.unwrap_or(DEFAULT_STAGE_TIME);
            let t3 = a.t3.unwrap_or(DEFAULT_STAGE_TIME);
            (run_three_stage(l, eta, tau, t1, t3, ramp, a.dt)?, "three_stage")
        }
        EvolveMode::Naive => (run_naive(l, eta, a.t.unwrap_or(1000.0), ramp, a.dt)?, "naive"),
    };
    let csv_name = format!("evolve_{name}.csv");
    let mut w = ctx.create(&csv_name)?;
    result.write_csv(&mut w, None)?;
    w.flush()?;
    let mut summary = result.summary(runtime(a.timing));
    summary["ideal_success_probability"] = json!(success_probability(l, eta)?);
    ctx.json(&format!("evolve_{name}.json"), &summary)?;
    ctx.script(&format!("evolve_{name}.gp"), plot::evolve(&csv_name, false))?;
    Ok(summary)
}

#[derive(Serialize)]
struct Check {
    name: String,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        // NaN never passes
        Check { name: name.into(), residual, tolerance, passed: residual <= tolerance }
    }
}

fn projection_check(
    name: &str,
    op: &ClockOperator,
    basis: &GammaBasis,
    expected: &TridiagonalHamiltonian,
) -> Result<(Check, Option<TridiagonalHamiltonian>)> {
    match project_to_subspace(op, basis) {
        Ok(h) => Ok((Check::new(name, h.max_abs_diff(expected), PROJECTION_TOLERANCE), Some(h))),
        Err(Error::NotTridiagonal { residual }) => Ok((Check::new(name, residual, PROJECTION_TOLERANCE), None)),
        Err(e) => Err(e),
    }
}

/// Distance by which the spectrum of `h` escapes the union of its discs.
fn gershgorin_escape(h: &TridiagonalHamiltonian) -> Result<f64> {
    let discs = gershgorin_bounds(h);
    let eigenvalues = lowest_eigenvalues(h, h.dim())?;
    Ok(eigenvalues
        .iter()
        .map(|&e| discs.iter().map(|&(c, r)| ((e - c).abs() - r).max(0.0)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

fn verify_circuit(label: &str, circuit: &CircuitSpec, eta: f64, tau: f64) -> Result<Value> {
    let l = circuit.num_gates();
    if l == 0 {
        return Err(Error::InvalidParameter(format!("{label}: circuit has no gates")));
    }
    let basis = GammaBasis::new(circuit)?;
    let hb = build_full_hb(circuit.n_qubits(), l)?;
    let hp = build_full_hp(circuit, eta)?;
    let hp_reduced = build_hp_reduced(l, eta)?;
    let mut checks = Vec::new();
    let mut ops = vec![("H_B", hb), ("H_P", hp)];

    let (c, _) = projection_check("projection_H_B", &ops[0].1, &basis, &build_hb_reduced(l)?)?;
    checks.push(c);
    let (c, projected_hp) = projection_check("projection_H_P", &ops[1].1, &basis, &hp_reduced)?;
    checks.push(c);
    let total = l as f64 * tau;
    for (tag, t) in [("t0", 0.0), ("mid", 0.5 * total), ("end", total)] {
        let hi = build_full_hi(circuit, eta, tau, t)?;
        let (c, _) =
            projection_check(&format!("projection_H_I_{tag}"), &hi, &basis, &build_hi_reduced(l, eta, tau, t)?)?;
        checks.push(c);
        ops.push((if tag == "mid" { "H_I_mid" } else { "" }, hi));
    }
    ops.retain(|(name, _)| !name.is_empty());

    let hermitian = ops.iter().all(|(_, op)| op.is_hermitian());
    checks.push(Check::new("hermitian", if hermitian { 0.0 } else { 1.0 }, 0.0));
    let mut invariance = 0.0f64;
    for (_, op) in &ops {
        invariance = invariance.max(subspace_residual(op, &basis)?);
    }
    checks.push(Check::new("subspace_invariance", invariance, 1e-10));

    let null = basis.embed(&analytic_ground_state(l, eta)?);
    let image = ops[1].1.apply(&null)?;
    checks.push(Check::new("null_vector", image.norm(), 1e-10));

    let escape = match &projected_hp {
        Some(h) => gershgorin_escape(h)?,
        None => f64::INFINITY,
    };
    checks.push(Check::new("gershgorin_containment", escape, 1e-12));

    let passed = checks.iter().all(|c| c.passed);
    Ok(json!({
        "circuit": label,
        "qubits": circuit.n_qubits(),
        "L": l,
        "full_dim": basis.full_dim(),
        "passed": passed,
        "checks": checks,
    }))
}

fn read_circuit(path: &Path) -> Result<CircuitSpec> {
    parse_circuit(&std::fs::read_to_string(path)?)
}

fn verify_cmd(ctx: &mut Ctx, a: VerifyArgs) -> Result<Value> {
    let eta = a.eta.unwrap_or(4.0);
    let tau = a.tau.unwrap_or(2.0);
    let seed = a.seed.unwrap_or(0);
    let mut circuits = Vec::new();
    if let Some(path) = &a.circuit {
        circuits.push((path.display().to_string(), read_circuit(path)?));
    }
    if let Some(count) = a.random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qubits = a.qubits.unwrap_or(2);
        let gates = a.gates.unwrap_or(4);
        for k in 0..count {
            circuits.push((format!("random-{k}"), random_circuit(qubits, gates, &mut rng)?));
        }
    }
    if circuits.is_empty() {
        return Err(Error::InvalidParameter("give a circuit file or --random N".into()));
    }
    let reports = circuits.iter().map(|(label, c)| verify_circuit(label, c, eta, tau)).collect::<Result<Vec<_>>>()?;
    let all_passed = reports.iter().all(|r| r["passed"].as_bool() == Some(true));
    let summary = json!({
        "eta": eta,
        "tau": tau,
        "seed": seed,
        "circuits": reports,
        "all_passed": all_passed,
    });
    ctx.json("verify.json", &summary)?;
    Ok(summary)
}

fn ground_state_cmd(ctx: &mut Ctx, a: GroundStateArgs) -> Result<Value> {
    let l = a.l.unwrap_or(20);
    let eta = a.eta.unwrap_or(4.0);
    let half_width = a.half_width.unwrap_or(DEFAULT_HALF_WIDTH);
    let spacing = a.spacing.unwrap_or(DEFAULT_SPACING);
    let lattice = analytic_ground_state(l, eta)?;
    let cgs = continuum_ground_state(eta, half_width, spacing)?;

    let mut csv = csv::Writer::from_writer(ctx.create("ground_state_lattice.csv")?);
    csv.write_record(["m", "amplitude"])?;
    for (m, c) in lattice.amplitudes.iter().enumerate() {
        csv.serialize((m, c.re))?;
    }
    csv.flush()?;

    let fourth = cgs.fourth_derivative();
    let mut csv = csv::Writer::from_writer(ctx.create("ground_state_continuum.csv")?);
    csv.write_record(["s", "phi", "phi4"])?;
    for k in 0..cgs.grid.len() {
        csv.serialize((cgs.grid[k], cgs.phi[k], fourth[k]))?;
    }
    csv.flush()?;

    let summary = json!({
        "L": l,
        "eta": eta,
        "success_probability": success_probability(l, eta)?,
        "success_probability_limit": 1.0 - 1.0 / (eta * eta),
        "epsilon0": cgs.epsilon0,
        "refinement_shift": cgs.refinement_shift,
        "fourth_derivative_norm_sq": cgs.fourth_derivative_norm_sq(),
        "half_width": half_width,
        "spacing": spacing,
    });
    ctx.json("ground_state.json", &summary)?;
    ctx.script("ground_state.gp", plot::ground_state("ground_state_lattice.csv", "ground_state_continuum.csv"))?;
    Ok(summary)
}
