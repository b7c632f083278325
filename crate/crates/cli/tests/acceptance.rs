//! Acceptance suite: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use plectic::charts::{Chart, Coordinate, FormField};
use plectic::exterior::{classify_conjugacy, AlternatingForm, ConjugacyVerdict, MultiVector};
use plectic::hamiltonian::{hamiltonian_field, PlecticManifold};
use plectic::Error;
use plectic_cli::config::ScenarioConfig;
use plectic_cli::report::{CheckReport, RunReport, Status};
use plectic_cli::{run, RunOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Verdict = Result<String, String>;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_text(text: &str) -> RunReport {
    let cfg = ScenarioConfig::parse(text, "inline").expect("acceptance configs are valid");
    run(&cfg, RunOptions::default()).expect("scenario builds")
}

fn check<'a>(r: &'a RunReport, name: &str) -> &'a CheckReport {
    r.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn gap(c: &CheckReport, name: &str) -> f64 {
    c.gaps.iter().find(|g| g.name == name).map(|g| g.value).unwrap_or_else(|| panic!("{}: no gap {name}", c.name))
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn passed(c: &CheckReport) -> Result<(), String> {
    ensure(c.status == Status::Pass, format!("{} is {:?}: {}", c.name, c.status, c.reason.clone().unwrap_or_default()))
}

fn kernel_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac1e);
    let r = oracle::run_suite(&mut rng, 200);
    ensure(r.exact_mismatches == 0, format!("{} exact mismatches", r.exact_mismatches))?;
    ensure(r.max_float_rel <= 1e-12, format!("float relative gap {:e}", r.max_float_rel))?;
    Ok(format!("{} cases, exact, float rel {:.1e}", r.cases, r.max_float_rel))
}

fn bracket_laws() -> Verdict {
    let mut worst: f64 = 0.0;
    for params in [r#"{"ell": 2}"#, r#"{"circle": true}"#] {
        let name = if params.contains("ell") { "power_sigma_ell" } else { "s2_x_torus" };
        let r = run_text(&format!(
            r#"{{"scenario": {{"name": "{name}", "params": {params}}},
                "checks": [{{"name": "bracket_laws", "samples": 100, "triples": 20, "tol": 1e-8}}]}}"#
        ));
        let c = check(&r, "bracket_laws");
        passed(c)?;
        worst = c.gaps.iter().map(|g| g.value).fold(worst, f64::max);
    }
    Ok(format!("R^4 σ² and S²×S¹: worst defect {worst:.1e}"))
}

fn moment_maps() -> Verdict {
    let mut notes = Vec::new();
    for (name, params, tol) in [
        ("power_sigma_ell", "{}", 1e-8),
        ("s2_x_torus", "{}", 1e-8),
        ("su2_cartan", r#"{"moment": "left"}"#, 1e-6),
        ("su2_cartan", r#"{"moment": "right"}"#, 1e-6),
        ("su2_cartan", r#"{"moment": "adjoint"}"#, 1e-6),
    ] {
        let r = run_text(&format!(
            r#"{{"scenario": {{"name": "{name}", "params": {params}}}, "checks": [{{"name": "moment_check", "tol": {tol:e}}}]}}"#
        ));
        let c = check(&r, "moment_check");
        for g in ["a_differential", "b_comoment", "c_sign"] {
            ensure(gap(c, g) < tol, format!("{name} {params}: {g} = {:e}", gap(c, g)))?;
        }
        notes.push(format!("{name}{}", if params == "{}" { String::new() } else { format!(" {params}") }));
    }
    Ok(format!("(a)-(c) within bound on {}", notes.len()))
}

fn reduction() -> Verdict {
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 1.0, 1.5] {
        let r = run_text(&format!(
            r#"{{"scenario": {{"name": "hopf_c2", "params": {{"lambda": {lambda}}}}},
                "checks": [{{"name": "check_basic"}}, {{"name": "reduced_form", "tolerances": {{"integral": 1e-3}}}}]}}"#
        ));
        passed(check(&r, "check_basic"))?;
        let c = check(&r, "reduced_form");
        passed(c)?;
        ensure(gap(c, "descent") < 1e-8, "descent residual")?;
        let value = c.details["integral"]["value"].as_f64().ok_or("no integral")?;
        // independent closed form for the base volume
        let want = 4.0 * PI * PI * lambda;
        let rel = (value - want).abs() / want;
        ensure(rel < 1e-3, format!("λ = {lambda}: ∫ω_λ = {value} vs {want}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("λ ∈ {{0.5, 1, 1.5}}: ∫ω_λ = 4π²λ within {worst:.1e}"))
}

fn variation() -> Verdict {
    let r = run_text(
        r#"{"scenario": {"name": "hopf_c2", "params": {"lambda": 1.0}},
            "checks": [{"name": "connection_curvature"}, {"name": "variation_slope"}]}"#,
    );
    let conn = check(&r, "connection_curvature");
    passed(conn)?;
    let chern = conn.details["chern_pairings"][0]["value"].as_f64().ok_or("no Chern pairing")?;
    ensure((chern.abs() - 1.0).abs() < 1e-6, format!("Chern pairing {chern}"))?;
    let v = check(&r, "variation_slope");
    passed(v)?;
    let slope = v.details["report"]["slope_richardson"].as_f64().ok_or("no slope")?;
    let rel = (slope - 4.0 * PI * PI).abs() / (4.0 * PI * PI);
    ensure(rel < 1e-2, format!("slope {slope} vs 4π²"))?;
    let lemma = gap(v, "lemma_identity");
    ensure(lemma < 1e-6, format!("lemma defect {lemma:e}"))?;
    Ok(format!("slope/4π² - 1 = {rel:.1e}, Chern {chern:+.6}, lemma {lemma:.1e}"))
}

fn stationary_phase() -> Verdict {
    let mut worst: f64 = 0.0;
    for (circle, scale) in [(false, 1.0), (true, 2.0 * PI)] {
        let r = run_text(&format!(
            r#"{{"scenario": {{"name": "s2_x_torus", "params": {{"circle": {circle}}}}},
                "checks": [{{"name": "stationary_phase_compare", "t_values": [0.5, 1.0, 2.0]}}]}}"#
        ));
        let c = check(&r, "stationary_phase_compare");
        passed(c)?;
        for p in c.details["report"]["points"].as_array().ok_or("no points")? {
            let t = p["t"].as_f64().unwrap();
            let want = scale * 4.0 * PI * t.sin() / t;
            for side in ["lhs", "rhs"] {
                let got = p[side][0].as_f64().unwrap();
                let rel = (got - want).abs() / want.abs();
                ensure(rel < 1e-8 && p[side][1].as_f64().unwrap().abs() < 1e-8, format!("{side} at t = {t}: {got} vs {want}"))?;
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("S² and S²×S¹ against 4π sin t/t and 8π² sin t/t: {worst:.1e}"))
}

fn gaussian() -> Verdict {
    let r = run_text(
        r#"{"scenario": {"name": "torus_t3"},
            "checks": [{"name": "gaussian_check", "ell_values": [1, 2, 3], "t_values": [0.3, 1.0, 3.0]}]}"#,
    );
    let c = check(&r, "gaussian_check");
    passed(c)?;
    let cases = c.details["cases"].as_array().map_or(0, |a| a.len());
    ensure(cases == 9, format!("{cases} cases"))?;
    Ok(format!("9 (ℓ, t) cases, worst {:.1e}", gap(c, "relative_gap")))
}

fn localization() -> Verdict {
    let r = run_text(
        r#"{"scenario": {"name": "product_spheres_torus"},
            "checks": [{"name": "localization_compare", "t_values": [0.02, 0.03, 0.04, 0.05, 0.06]}]}"#,
    );
    let c = check(&r, "localization_compare");
    passed(c)?;
    let first = &c.details["points"][0];
    ensure(first["t"].as_f64() == Some(0.02), "first t is not 0.02")?;
    let plateau = 8.0 * PI * PI;
    let rel = (first["i_t"].as_f64().unwrap() - plateau).abs() / plateau;
    ensure(rel < 1e-3, format!("I(0.02) off the 8π² plateau by {rel:e}"))?;
    let slope = c.details["slope"].as_f64().unwrap();
    ensure(slope <= -0.25 * 0.95, format!("slope {slope}"))?;
    Ok(format!("I(0.02)/8π² - 1 = {rel:.1e}, slope {slope:.3}"))
}

fn negative_controls() -> Verdict {
    let text = std::fs::read_to_string(scenarios_dir().join("hopf_corrupted_phi.json")).map_err(|e| e.to_string())?;
    let r = run_text(&text);
    let c = check(&r, "check_basic");
    ensure(c.status == Status::Fail, "corrupted φ passed check_basic")?;
    ensure(c.reason.as_deref().is_some_and(|s| s.contains("phi_closed")), "closedness hypothesis not named")?;

    // (R^5, σ∧dφ): dα = dx1∧dx2 has no σ∧dφ-partner
    let chart = Chart::new("r5", (0..5).map(|i| Coordinate::linear(&format!("x{i}"), -1.0, 1.0)).collect());
    let sigma = FormField::dx(5, 0).wedge(&FormField::dx(5, 1)).unwrap().add(&FormField::dx(5, 2).wedge(&FormField::dx(5, 3)).unwrap()).unwrap();
    let omega = sigma.wedge(&FormField::dx(5, 4)).unwrap();
    let m = PlecticManifold::new(chart, omega, 1e-12).map_err(|e| e.to_string())?;
    let alpha = FormField::dx(5, 2).scale(&plectic::expr::ScalarExpr::var(0));
    let residual = match hamiltonian_field(&m, &alpha, 1, 1e-9) {
        Err(Error::NotHamiltonian { residual, .. }) => residual,
        other => return Err(format!("expected not-hamiltonian, got {:?}", other.map(|h| h.residual_report))),
    };
    ensure(residual > 0.0, "zero residual")?;

    // rank-2 pairing: U = <e0, e1>, V = <e2, e3> against dx0∧dx2∧dx4 + dx1∧dx3∧dx5
    let w = AlternatingForm::from_terms(6, 3, &[(&[0, 2, 4], 1.0), (&[1, 3, 5], 1.0)]).unwrap();
    let e = |i: usize| MultiVector::vector(&(0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    let report = classify_conjugacy(&w, &[e(0), e(1)], &[e(2), e(3)], 1e-9).map_err(|e| e.to_string())?;
    ensure(report.verdict == ConjugacyVerdict::NotConjugate, format!("{:?}", report.verdict))?;
    Ok(format!("phi_closed named; not-hamiltonian residual {residual:.2}; rank-2 pairing not_conjugate"))
}

/// Validates each report with the Python `jsonschema` package.
fn validate_against_schema(reports: &[String]) -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("plectic-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut paths = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let p = dir.join(format!("report{i}.json"));
        std::fs::write(&p, r).map_err(|e| e.to_string())?;
        paths.push(p);
    }
    let script = "import json, sys, jsonschema\n\
        schema = json.load(open(sys.argv[1]))\n\
        jsonschema.Draft202012Validator.check_schema(schema)\n\
        v = jsonschema.Draft202012Validator(schema)\n\
        for p in sys.argv[2:]:\n    v.validate(json.load(open(p)))\n";
    let schema = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    let out = std::process::Command::new("python3")
        .arg("-c")
        .arg(script)
        .arg(&schema)
        .args(&paths)
        .output()
        .map_err(|e| format!("python3 unavailable: {e}"))?;
    let _ = std::fs::remove_dir_all(&dir);
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.success(), format!("schema validation: {}", stderr.lines().last().unwrap_or("")))
}

fn determinism(started: Instant) -> Verdict {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut reports = Vec::new();
    for f in &files {
        let cfg = ScenarioConfig::load(f).map_err(|e| e.to_string())?;
        let a = run(&cfg, RunOptions::default()).map_err(|e| e.to_string())?;
        let again = run(&cfg, RunOptions::default()).map_err(|e| e.to_string())?;
        let threaded = run(&cfg, RunOptions { parallel: true, ..RunOptions::default() }).map_err(|e| e.to_string())?;
        let bytes = a.without_timing().to_json();
        for b in [again, threaded] {
            ensure(bytes == b.without_timing().to_json(), format!("{} differs between runs", f.display()))?;
        }
        let v: Value = serde_json::from_str(&a.to_json()).map_err(|e| e.to_string())?;
        ensure(v["schema_version"] == 1, "schema_version")?;
        reports.push(a.to_json());
    }
    validate_against_schema(&reports)?;
    let total = started.elapsed();
    ensure(total < Duration::from_secs(600), format!("suite took {total:?}"))?;
    Ok(format!("{} configs byte-identical across runs and schema-valid; suite {:.1}s", files.len(), total.as_secs_f64()))
}

fn main() {
    let started = Instant::now();
    let criteria: Vec<(&str, f64, Box<dyn Fn() -> Verdict>)> = vec![
        ("kernel oracles", 10.0, Box::new(kernel_oracles)),
        ("bracket laws", 30.0, Box::new(bracket_laws)),
        ("moment maps", 60.0, Box::new(moment_maps)),
        ("reduction", 60.0, Box::new(reduction)),
        ("variation", 120.0, Box::new(variation)),
        ("stationary phase", 30.0, Box::new(stationary_phase)),
        ("gaussian identities", 30.0, Box::new(gaussian)),
        ("localization decay", 120.0, Box::new(localization)),
        ("negative controls", 600.0, Box::new(negative_controls)),
        ("determinism", 600.0, Box::new(move || determinism(started))),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t0.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|msg| if secs <= *budget { Ok(msg) } else { Err(format!("{secs:.1}s over the {budget}s budget")) });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name:<20} {secs:>6.2}s  {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name:<20} {secs:>6.2}s  {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
