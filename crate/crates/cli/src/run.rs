//! `tflocal run`: scenario analyses, CSV reports and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use tflocal::diagnostics::{eigen_decay_study_with, weighted_decay_study, DecayReport, StudyConfig, STUDY_EXPONENTS};
use tflocal::gabor::{frame_bounds, frame_operator};
use tflocal::quantize::{localization_weyl_symbol, weyl_build};
use tflocal::scenario::{build_scenario, load, Analysis, ScenarioSpec};
use tflocal::spectral::{eig, eig_tolerance};
use tflocal::Error;

use crate::{exit_code, EXIT_INVARIANT};

#[derive(Serialize)]
struct RunManifest {
    scenario: Option<ScenarioSpec>,
    tool_version: &'static str,
    started_unix: f64,
    finished_unix: f64,
    outputs: Vec<String>,
    exit_status: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<Value>,
}

enum Failure {
    Lib(Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

struct Outcome {
    files: Vec<(String, String)>,
    summary: Value,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn decay_csv(rep: &DecayReport) -> String {
    let mut s = String::from("N,sigma,log_N,log_sigma\n");
    for (n, &sigma) in rep.sigma_profile.iter().enumerate() {
        let nf = n as f64;
        let _ = writeln!(s, "{n},{},{},{}", num(sigma), num(nf.ln()), num(sigma.ln()));
    }
    s
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(what()))
    }
}

fn analyze(spec: &ScenarioSpec, base: Option<&Path>) -> Result<Outcome, Failure> {
    let b = build_scenario(spec, base)?;
    let op = &b.operator;
    let (lo, hi) = frame_bounds(&frame_operator(&b.phi1, &b.lattice)?)?;
    let mut files = Vec::new();
    let mut summary = json!({
        "provenance": op.provenance().as_str(),
        "hermitian": op.is_hermitian(),
        "frame_bounds": [lo, hi],
    });

    let needs_eig = [Analysis::Spectrum, Analysis::Decay, Analysis::Norms, Analysis::Weighted]
        .iter()
        .any(|a| spec.wants(*a));
    if needs_eig {
        let e = eig(op)?;
        let tol = eig_tolerance(op);
        invariant(e.max_residual() <= tol, || {
            format!("eigen residual {:e} exceeds tolerance {tol:e}", e.max_residual())
        })?;
        if op.is_hermitian() {
            let im = e.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            invariant(im <= 1e-10, || format!("Hermitian operator has |Im lambda| = {im:e}"))?;
        }
        summary["eigen"] = json!({
            "count": e.len(),
            "solver": if e.hermitian { "hermitian" } else { "schur" },
            "max_residual": e.max_residual(),
            "tolerance": tol,
        });
        if spec.wants(Analysis::Spectrum) {
            let mut s = String::from("index,re,im,modulus,residual\n");
            for (i, (z, r)) in e.eigenvalues.iter().zip(&e.residuals).enumerate() {
                let _ = writeln!(s, "{i},{},{},{},{}", num(z.re), num(z.im), num(z.norm()), num(*r));
            }
            files.push(("spectrum.csv".to_string(), s));
        }

        let o = &spec.options;
        let cfg = StudyConfig {
            fit_range: o.fit_range,
            floor: o.floor,
            top_k: o.top_k,
            seed: spec.seed,
        };
        let mut norms = String::from("p,q,s,value\n");
        if spec.wants(Analysis::Decay) || spec.wants(Analysis::Norms) {
            let st = eigen_decay_study_with(&e, &b.phi1, &b.lattice, &cfg)?;
            for r in st.reports.iter().map(|r| &r.decay).chain([&st.baseline.decay]) {
                invariant(r.sigma_profile.windows(2).all(|w| w[0] >= w[1]), || {
                    "tail profile is not nonincreasing".to_string()
                })?;
            }
            if st.retained.hermitian {
                let kept: f64 = st.retained.eigenvalues.iter().map(|z| z.norm_sqr()).sum();
                let fro = op.frobenius().powi(2);
                invariant(kept <= fro + 1e-8, || {
                    format!("retained eigenvalue energy {kept:e} exceeds Frobenius^2 {fro:e}")
                })?;
            }
            if spec.wants(Analysis::Decay) {
                for r in &st.reports {
                    files.push((format!("decay_{}.csv", r.index), decay_csv(&r.decay)));
                }
                files.push(("baseline.csv".to_string(), decay_csv(&st.baseline.decay)));
            }
            if spec.wants(Analysis::Norms) {
                if let Some(top) = st.reports.first() {
                    for n in &top.norms {
                        let _ = writeln!(norms, "{},{},{},{}", num(n.p), num(n.q), num(0.0), num(n.value));
                    }
                }
            }
            summary["study"] = json!({
                "retained": st.retained.len(),
                "reported": st.reports.len(),
                "non_compact_like": st.non_compact_like,
                "fit_range": o.fit_range,
                "floor": o.floor,
                "exponents": st.reports.iter().map(|r| r.decay.fitted_exponent).collect::<Vec<_>>(),
                "baseline_seed": st.baseline.seed,
                "baseline_exponent": st.baseline.decay.fitted_exponent,
                "norm_exponents": STUDY_EXPONENTS,
            });
        }
        if spec.wants(Analysis::Weighted) {
            let ws = weighted_decay_study(&e, &b.phi1, &b.lattice, &o.s_list, o.p, &cfg)?;
            let mut s = String::from("index,s,p,weighted,unweighted,ratio,relative_to_baseline\n");
            for r in &ws.rows {
                let idx = r.index.map_or("baseline".to_string(), |i| i.to_string());
                let _ = writeln!(
                    s,
                    "{idx},{},{},{},{},{},{}",
                    num(r.s),
                    num(r.p),
                    num(r.weighted),
                    num(r.unweighted),
                    num(r.ratio),
                    num(r.relative_to_baseline)
                );
            }
            if spec.wants(Analysis::Norms) {
                for r in ws.rows_for(Some(0)) {
                    let _ = writeln!(norms, "{},{},{},{}", num(r.p), num(r.p), num(r.s), num(r.weighted));
                }
            }
            files.push(("weighted.csv".to_string(), s));
        }
        if spec.wants(Analysis::Norms) {
            files.push(("norms.csv".to_string(), norms));
        }
    }

    if spec.wants(Analysis::Weyl) {
        let sigma = localization_weyl_symbol(&b.symbol, &b.phi1, &b.phi2)?;
        let err = op.max_abs_diff(&weyl_build(&sigma)?);
        invariant(err <= 1e-9, || format!("Weyl correspondence error {err:e} exceeds 1e-9"))?;
        summary["weyl_max_error"] = json!(err);
    }
    Ok(Outcome { files, summary })
}

/// Writes via a temporary file in the same directory and renames into place.
fn write_atomic(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    let tmp = dir.join(format!(".{name}.tmp"));
    let dst = dir.join(name);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, &dst)?;
    Ok(dst)
}

pub fn cmd_run(arg: &str, out: &Path, seed: Option<u64>) -> ExitCode {
    let mut manifest = RunManifest {
        scenario: None,
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix: now(),
        finished_unix: 0.0,
        outputs: Vec::new(),
        exit_status: 0,
        failure: None,
        summary: None,
    };
    let result = (|| {
        let (mut spec, base) = load(arg)?;
        if let Some(s) = seed {
            spec.seed = s;
        }
        spec.validate()?;
        manifest.scenario = Some(spec.clone());
        analyze(&spec, base.as_deref())
    })();

    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return ExitCode::from(crate::EXIT_SCHEMA);
    }
    let status = match result {
        Ok(outcome) => {
            manifest.summary = Some(outcome.summary);
            let mut status = 0;
            for (name, content) in &outcome.files {
                match write_atomic(out, name, content) {
                    Ok(_) => manifest.outputs.push(name.clone()),
                    Err(e) => {
                        manifest.failure = Some(format!("writing {name}: {e}"));
                        status = crate::EXIT_SCHEMA;
                        break;
                    }
                }
            }
            status
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            manifest.failure = Some(e.to_string());
            exit_code(&e)
        }
        Err(Failure::Invariant(what)) => {
            eprintln!("invariant violated: {what}");
            manifest.failure = Some(format!("invariant violated: {what}"));
            EXIT_INVARIANT
        }
    };
    manifest.exit_status = status;
    manifest.finished_unix = now();
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = write_atomic(out, "manifest.json", &text) {
        eprintln!("error: writing manifest: {e}");
        return ExitCode::from(if status == 0 { crate::EXIT_SCHEMA } else { status });
    }
    if status == 0 {
        println!("wrote {} files to {}", manifest.outputs.len() + 1, out.display());
    }
    ExitCode::from(status)
}
