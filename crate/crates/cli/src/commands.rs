use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use elastica::asymptotics::{
    counting, fit_spectrum, heat_trace, log_grid, remainder_series, FitModel, COUNTING_WINDOW_SAMPLES,
    HEAT_WINDOW_SAMPLES,
};
use elastica::compare::compare_spectra;
use elastica::disk::disk_spectrum_potential;
use elastica::elastic::{
    rayleigh_root, sum_test, to_heat_coeffs, weyl_a, weyl_two_term, BoundaryCondition, Domain, LameParams,
    Theory, SUM_TEST_REL_TOL,
};
use elastica::fem::{analytic_decoupled_spectrum, assemble, solve_eigs, trust_threshold, EigTarget, EigenOptions, Mesh};
use elastica::spectrum::Spectrum;
use elastica::symbol::{
    boundary_layer, interior_coefficient, prop71_analytic, residue_heat, DEFAULT_EPSILON, STANDARD_T,
    STANDARD_XI2,
};
use serde_json::{json, Value};

use crate::report::{envelope, to_value, write_json, write_text};
use crate::{BcArg, DomainArg, Failure, MethodArg, ModelArg, SuiteArg, TheoryArg, EXIT_VERIFY};

/// Relative accuracy of the quadrature-based boundary coefficients.
const CFLV_TOLERANCE: f64 = 1e-12;
/// Relative accuracy of closed-form coefficients (rounding only).
const CLOSED_FORM_TOLERANCE: f64 = 1e-15;
const COMPARISON_SAMPLES: usize = 400;

fn params(mu: f64, lambda: f64) -> Result<LameParams, Failure> {
    Ok(LameParams::new(mu, lambda)?)
}

fn domain_of(d: DomainArg) -> Domain {
    match d {
        DomainArg::Disk => Domain::UnitDisk,
        DomainArg::Square => Domain::UnitSquare,
    }
}

fn bc_of(b: BcArg) -> BoundaryCondition {
    match b {
        BcArg::Dirichlet => BoundaryCondition::Dirichlet,
        BcArg::Free => BoundaryCondition::Free,
    }
}

pub fn coeffs(mu: f64, lambda: f64, dim: u32, theory: TheoryArg, json_out: Option<PathBuf>) -> Result<u8, Failure> {
    let p = params(mu, lambda)?;
    weyl_a(&p, dim)?;
    let theories: &[Theory] = match theory {
        TheoryArg::Cflv => &[Theory::Cflv],
        TheoryArg::Liu => &[Theory::Liu],
        TheoryArg::Both => &[Theory::Liu, Theory::Cflv],
    };
    let root = rayleigh_root(p.alpha())?;
    println!("alpha = {:.15}", p.alpha());
    println!("gamma_R = {:.15}  (residual {:.1e})", root.gamma_r, root.residual);
    let mut sets = Vec::new();
    for &th in theories {
        let w = weyl_two_term(&p, dim, th)?;
        let h = to_heat_coeffs(&w);
        let s = sum_test(&p, dim, th)?;
        let tol = if th == Theory::Cflv { CFLV_TOLERANCE } else { CLOSED_FORM_TOLERANCE };
        println!("[{}]", th.as_str());
        println!("  a        = {:.15e}", w.a);
        println!("  b-       = {:.15e}", w.b_minus);
        println!("  b+       = {:.15e}", w.b_plus);
        println!("  a~       = {:.15e}", h.a_tilde);
        println!("  b~-      = {:.15e}", h.b_tilde_minus);
        println!("  b~+      = {:.15e}", h.b_tilde_plus);
        println!("  b- + b+  = {:.3e}  sum test {}", s.sum, s.verdict);
        sets.push(json!({
            "theory": th,
            "counting": w,
            "heat": h,
            "relative_tolerance": tol,
            "sum_test": {
                "result": s,
                "relative_tolerance": SUM_TEST_REL_TOL,
            },
        }));
    }
    if let Some(path) = json_out {
        let inputs = json!({ "mu": mu, "lambda": lambda, "dim": dim, "theory": format!("{theory:?}").to_lowercase() });
        let outputs = json!({
            "alpha": p.alpha(),
            "rayleigh": root,
            "theories": sets,
        });
        write_json(&path, &envelope("coeffs", inputs, outputs))?;
    }
    Ok(0)
}

pub struct SpectrumArgs {
    pub domain: DomainArg,
    pub mu: f64,
    pub lambda: f64,
    pub bc: BcArg,
    pub method: MethodArg,
    pub lambda_max: f64,
    pub out: PathBuf,
    pub kmax: Option<u32>,
    pub h: Option<f64>,
    pub pair_tol: f64,
}

fn potential(a: &SpectrumArgs, p: &LameParams) -> Result<Spectrum, Failure> {
    if a.domain != DomainArg::Disk {
        return Err(Failure::incompatible("the potential method is only available on the disk"));
    }
    let d = disk_spectrum_potential(p, bc_of(a.bc), a.kmax, a.lambda_max)?;
    if a.kmax.is_some() && d.modes_at_k_max > 0 {
        eprintln!(
            "warning: {} modes found at k = {}; larger angular indices may contribute below lambda_max",
            d.modes_at_k_max, d.k_max
        );
    }
    let worst = d.modes.iter().map(|m| m.determinant_residual).fold(0.0, f64::max);
    Ok(d.spectrum.with_meta("max_determinant_residual", format!("{worst:e}")))
}

fn fem(a: &SpectrumArgs, p: &LameParams) -> Result<Spectrum, Failure> {
    let h = a.h.unwrap_or_else(|| (0.25 / a.lambda_max.sqrt()).clamp(1.0 / 256.0, 0.125));
    let mesh = Mesh::for_domain(domain_of(a.domain), h)?;
    let trust = trust_threshold(mesh.h);
    if trust < a.lambda_max {
        eprintln!(
            "warning: mesh size {:.4} resolves eigenvalues up to {trust:.1} only; the spectrum is cut there",
            mesh.h
        );
    }
    let ops = assemble(&mesh, p, bc_of(a.bc))?;
    let sol = solve_eigs(&ops, EigTarget::Below(a.lambda_max.min(trust)), &EigenOptions::default())?;
    Ok(sol
        .spectrum
        .with_meta("resolution", mesh.resolution)
        .with_meta("max_residual", format!("{:e}", sol.max_residual)))
}

fn analytic(a: &SpectrumArgs, p: &LameParams) -> Result<Spectrum, Failure> {
    if !p.is_decoupled() {
        return Err(Failure::incompatible(format!(
            "the analytic spectrum needs lambda = -mu, got mu = {}, lambda = {}",
            a.mu, a.lambda
        )));
    }
    if a.domain == DomainArg::Disk && a.bc == BcArg::Free {
        return Err(Failure::incompatible("no analytic spectrum for the free disk"));
    }
    Ok(analytic_decoupled_spectrum(domain_of(a.domain), bc_of(a.bc), a.mu, a.lambda_max)?)
}

fn save(s: &Spectrum, path: &Path) -> Result<(), Failure> {
    s.save(path)?;
    println!(
        "{}: {} eigenvalues (with multiplicity) up to {} -> {}",
        s.method,
        s.total_count(),
        s.lambda_max,
        path.display()
    );
    Ok(())
}

fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spectrum".into());
    base.with_file_name(format!("{stem}.{suffix}"))
}

pub fn spectrum(a: SpectrumArgs) -> Result<u8, Failure> {
    let p = params(a.mu, a.lambda)?;
    if !(a.lambda_max > 0.0) || !a.lambda_max.is_finite() {
        return Err(Failure::usage(format!("--lambda-max must be positive, got {}", a.lambda_max)));
    }
    match a.method {
        MethodArg::Potential => save(&potential(&a, &p)?, &a.out)?,
        MethodArg::Fem => save(&fem(&a, &p)?, &a.out)?,
        MethodArg::Analytic => save(&analytic(&a, &p)?, &a.out)?,
        MethodArg::Both => {
            let pot = potential(&a, &p)?;
            let fe = fem(&a, &p)?;
            save(&pot, &sibling(&a.out, "potential.csv"))?;
            save(&fe, &sibling(&a.out, "fem.csv"))?;
            let c = compare_spectra(&pot, &fe, a.pair_tol, COMPARISON_SAMPLES)?;
            println!(
                "paired {} eigenvalues below {}, max relative difference {:.3e} (tolerance {:.1e})",
                c.pairs.len(),
                c.lambda_cap,
                c.max_relative_diff,
                c.tolerance
            );
            if c.counts_agree {
                println!("counting functions agree at all {} sample points", c.counts.len());
            } else {
                println!(
                    "counting functions differ at {} of {} sample points (see report)",
                    c.divergent_at.len(),
                    c.counts.len()
                );
            }
            let inputs = json!({
                "domain": domain_of(a.domain), "mu": a.mu, "lambda": a.lambda, "bc": bc_of(a.bc),
                "lambda_max": a.lambda_max, "kmax": a.kmax, "h": a.h, "pair_tol": a.pair_tol,
            });
            let outputs = json!({
                "files": {
                    "potential": sibling(&a.out, "potential.csv"),
                    "fem": sibling(&a.out, "fem.csv"),
                },
                "comparison": to_value(&c),
            });
            let path = sibling(&a.out, "comparison.json");
            write_json(&path, &envelope("spectrum", inputs, outputs))?;
            println!("comparison -> {}", path.display());
        }
    }
    Ok(0)
}

fn series_csv(s: &Spectrum, model: FitModel, window: (f64, f64)) -> Result<String, Failure> {
    let mut out = String::new();
    match model {
        FitModel::Heat => {
            let h = heat_trace(s, &log_grid(window.0, window.1, HEAT_WINDOW_SAMPLES))?;
            out.push_str("t,Z,tail_bound\n");
            for i in 0..h.t.len() {
                let _ = writeln!(out, "{:e},{:e},{:e}", h.t[i], h.z[i], h.tail_bound[i]);
            }
        }
        FitModel::Counting => {
            let c = counting(s, &log_grid(window.0, window.1, COUNTING_WINDOW_SAMPLES))?;
            let r = remainder_series(&c, weyl_a(&s.params, 2)?, s.domain);
            out.push_str("lambda,N,R,R_bar\n");
            for i in 0..r.grid.len() {
                let _ = writeln!(out, "{:e},{},{:e},{:e}", r.grid[i], c.values[i], r.r[i], r.r_bar[i]);
            }
        }
    }
    Ok(out)
}

pub fn fit(
    path: &Path,
    model: ModelArg,
    window: Option<(f64, f64)>,
    out: &Path,
    series: Option<&Path>,
) -> Result<u8, Failure> {
    let s = Spectrum::load(path)?;
    let model = match model {
        ModelArg::Counting => FitModel::Counting,
        ModelArg::Heat => FitModel::Heat,
    };
    let r = fit_spectrum(&s, model, window)?;
    println!("model = {}, window = [{:e}, {:e}], {} samples", model.as_str(), r.window.0, r.window.1, r.samples);
    println!(
        "b estimate = {:.9} (residual {:.2e}, threshold {:.0e}, condition {:.2e})",
        r.b_estimate, r.residual_norm, r.residual_threshold, r.condition
    );
    println!(
        "shifted window [{:e}, {:e}] gives {:.9} (relative change {:.2e})",
        r.shifted_window.0, r.shifted_window.1, r.shifted_b_estimate, r.window_stability
    );
    for d in &r.discriminator {
        match (d.target, d.relative_distance) {
            (Some(t), Some(x)) => println!("  {:<5} target {:.9}  relative distance {:.3e}", d.theory.as_str(), t, x),
            _ => println!("  {:<5} {}", d.theory.as_str(), d.note.as_deref().unwrap_or("unavailable")),
        }
    }
    match r.closest {
        Some(th) => println!("closest theory: {}", th.as_str()),
        None if r.residual_norm > r.residual_threshold => {
            println!("closest theory: undecided (fit residual above threshold)")
        }
        None => println!("closest theory: undecided (targets coincide)"),
    }
    if let Some(sp) = series {
        write_text(sp, &series_csv(&s, model, r.window)?)?;
    }
    let inputs = json!({
        "spectrum": path,
        "model": model,
        "window": window,
        "series": series,
    });
    write_json(out, &envelope("fit", inputs, json!({ "fit": to_value(&r) })))?;
    Ok(0)
}

pub fn verify(suite: SuiteArg, mu: f64, lambda: f64, dim: u32, json_out: Option<PathBuf>) -> Result<u8, Failure> {
    let p = params(mu, lambda)?;
    weyl_a(&p, dim)?;
    let want = |s: SuiteArg| suite == SuiteArg::All || suite == s;
    let mut outputs = serde_json::Map::new();
    let mut failures: Vec<String> = Vec::new();

    if want(SuiteArg::Residue) {
        let mut checks = Vec::new();
        for &t in &STANDARD_T {
            for &x in &STANDARD_XI2 {
                let c = residue_heat(t, x, &p, dim)?;
                if !c.gap.verdict.is_pass() {
                    failures.push(format!("residue t={t} |xi|^2={x}: gap {:.3e} > {:.0e}", c.gap.relative_gap, c.gap.tolerance));
                }
                checks.push(c);
            }
        }
        report_suite("residue", checks.iter().map(|c| c.gap.relative_gap), checks.len());
        outputs.insert("residue".into(), to_value(&checks));
    }
    if want(SuiteArg::Interior) {
        let checks = STANDARD_T
            .iter()
            .map(|&t| interior_coefficient(t, &p, dim))
            .collect::<elastica::Result<Vec<_>>>()?;
        for c in checks.iter().filter(|c| !c.gap.verdict.is_pass()) {
            failures.push(format!("interior t={}: gap {:.3e} > {:.0e}", c.t, c.gap.relative_gap, c.gap.tolerance));
        }
        report_suite("interior", checks.iter().map(|c| c.gap.relative_gap), checks.len());
        outputs.insert("interior".into(), to_value(&checks));
    }
    if want(SuiteArg::Boundary) {
        let checks = STANDARD_T
            .iter()
            .map(|&t| boundary_layer(t, &p, dim, DEFAULT_EPSILON))
            .collect::<elastica::Result<Vec<_>>>()?;
        for c in &checks {
            if !c.gap.verdict.is_pass() {
                failures.push(format!("boundary t={}: gap {:.3e} > {:.0e}", c.t, c.gap.relative_gap, c.gap.tolerance));
            }
            if !c.tail_within_bound {
                failures.push(format!("boundary t={}: tail {:.3e} exceeds bound {:.3e}", c.t, c.tail, c.tail_bound));
            }
        }
        report_suite("boundary", checks.iter().map(|c| c.gap.relative_gap), checks.len());
        outputs.insert("boundary".into(), to_value(&checks));
    }
    if want(SuiteArg::Prop71) {
        let r = prop71_analytic(&p, dim)?;
        println!("cancellation: {}  (liu sum {:.1e})", r.verdict, r.liu_sum.sum);
        if let Some(c) = &r.cflv_sum {
            println!("  competing coefficients sum to {:.3e} (recorded, not part of the verdict)", c.sum);
        }
        if !r.verdict.is_pass() {
            failures.push(format!(
                "cancellation: power spread {:.3e}, superpolynomial tail {}, liu sum {:.3e}",
                r.interior_power_spread, r.tail_superpolynomial, r.liu_sum.sum
            ));
        }
        outputs.insert("prop71".into(), to_value(&r));
    }

    let pass = failures.is_empty();
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    println!("overall: {}", if pass { "PASS" } else { "FAIL" });
    outputs.insert("verdict".into(), Value::from(if pass { "PASS" } else { "FAIL" }));
    outputs.insert("failures".into(), to_value(&failures));
    if let Some(path) = json_out {
        let inputs = json!({ "suite": format!("{suite:?}").to_lowercase(), "mu": mu, "lambda": lambda, "dim": dim });
        write_json(&path, &envelope("verify", inputs, Value::Object(outputs)))?;
    }
    Ok(if pass { 0 } else { EXIT_VERIFY })
}

fn report_suite(name: &str, gaps: impl Iterator<Item = f64>, count: usize) {
    let worst = gaps.fold(0.0, f64::max);
    println!("{name}: {count} checks, max relative gap {worst:.2e}");
}
