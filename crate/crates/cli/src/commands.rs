//! Per-command payloads. Each command returns its results and diagnostics
//! plus whether the analysis itself succeeded.

use std::time::Instant;

use hermitia::decomposition::{eigen_matrix_decompose, hermitian_decompose, verify_decomposition};
use hermitia::heig::{extreme_hermitian_eigenvalues, HeigOptions, HermitianEigenpair};
use hermitia::json::{complex_to_value, hermitian_to_value, Document, TensorKind};
use hermitia::linalg::{eigh, flatten};
use hermitia::ptrace::partial_trace;
use hermitia::quantum::{density_tensor, separability_analyze, SeparabilityConfig, Verdict};
use hermitia::tensor::{hermiticity_defect, unravel};
use hermitia::{ComplexTensor, HermitianTensor};
use serde_json::{json, Map, Value};

use crate::input::{hermitian, Loaded, Origin};

/// Settings shared by the analysis commands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
}

impl Settings {
    fn heig(&self) -> HeigOptions {
        HeigOptions {
            starts: self.starts,
            seed: self.seed,
            residual_tol: self.tol,
            ..HeigOptions::default()
        }
    }
}

pub struct Outcome {
    pub results: Value,
    pub diagnostics: Map<String, Value>,
    pub compute_ms: f64,
    /// False when the module ran but its result failed acceptance.
    pub ok: bool,
    pub failure: Option<String>,
}

/// Errors before any analysis ran map to exit status 2, the rest to 1.
pub enum Failure {
    Input(String),
    Analysis(String),
}

type Run = Result<Outcome, Failure>;

fn analysis(e: hermitia::Error) -> Failure {
    Failure::Analysis(e.to_string())
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("payloads are objects"),
    }
}

fn timed(f: impl FnOnce() -> Run) -> Run {
    let start = Instant::now();
    let mut out = f()?;
    out.compute_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn done(results: Value, diagnostics: Value) -> Outcome {
    Outcome { results, diagnostics: obj(diagnostics), compute_ms: 0.0, ok: true, failure: None }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn scale_of(h: &HermitianTensor) -> f64 {
    h.frobenius_norm().max(1.0)
}

fn hermitian_input(loaded: &Loaded) -> Result<(HermitianTensor, Origin), Failure> {
    hermitian(&loaded.document).map_err(Failure::Input)
}

pub fn check(loaded: &Loaded, s: &Settings) -> Run {
    timed(|| {
        let (array, kind): (ComplexTensor, &str) = match &loaded.document {
            Document::Tensor(t) if t.kind == TensorKind::Complex => {
                return Ok(done(
                    json!({
                        "kind": "complex",
                        "mode_dims": t.mode_dims,
                        "hermitian": Value::Null,
                        "frobenius_norm": t.array.frobenius_norm(),
                        "note": "complex tensor input; pass it to an analysis command to use its hermitianized form",
                    }),
                    json!({}),
                ))
            }
            Document::Tensor(t) => (t.array.clone(), "hermitian"),
            Document::Ensemble(e) => (density_tensor(e).as_array(), "ensemble (density tensor)"),
        };
        let dims = array.mode_dims()[..array.order() / 2].to_vec();
        let (defect, row, col) = hermiticity_defect(&array).map_err(|e| Failure::Input(e.to_string()))?;
        let is_herm = defect <= s.tol;
        let mut results = json!({
            "kind": kind,
            "mode_dims": dims,
            "hermitian": is_herm,
            "max_defect": defect,
            "max_defect_at": {
                "row": one_based(&unravel(row, &dims)),
                "col": one_based(&unravel(col, &dims)),
            },
            "frobenius_norm": array.frobenius_norm(),
        });
        if is_herm {
            let h = HermitianTensor::from_array(&array, s.tol).map_err(analysis)?;
            let symmetric = h.is_symmetric_hermitian(s.tol).ok();
            let fields = results.as_object_mut().expect("object");
            fields.insert("trace".into(), json!(h.matrix_trace().map_err(analysis)?));
            fields.insert("symmetric_hermitian".into(), json!(symmetric));
        }
        Ok(done(results, json!({ "tolerance": s.tol })))
    })
}

pub fn ptrace(loaded: &Loaded, keep: &[usize]) -> Run {
    let (h, origin) = hermitian_input(loaded)?;
    let m = h.order();
    if let Some(&bad) = keep.iter().find(|&&k| k == 0 || k > m) {
        return Err(Failure::Input(format!(
            "--keep index {bad} out of range 1..={m}"
        )));
    }
    let mut kept: Vec<usize> = keep.iter().map(|k| k - 1).collect();
    kept.sort_unstable();
    kept.dedup();
    timed(|| {
        let r = partial_trace(&h, &kept).map_err(analysis)?;
        let mut results = json!({
            "input": origin.label(),
            "kept_modes": one_based(&r.kept_modes),
            "matrix_trace": r.tensor.matrix_trace().map_err(analysis)?,
            "tensor": hermitian_to_value(&r.tensor),
        });
        let mut diagnostics = json!({});
        if kept.len() == 1 {
            let spec = eigh(&r.matrix()).map_err(analysis)?;
            results["eigenvalues"] = json!(spec.eigenvalues);
            diagnostics = json!({ "eigensolver_residual": spec.residual, "sweeps": spec.sweeps });
        }
        Ok(done(results, diagnostics))
    })
}

pub fn meig(loaded: &Loaded, s: &Settings) -> Run {
    let (h, origin) = hermitian_input(loaded)?;
    timed(|| {
        let spec = eigh(&flatten(&h)).map_err(analysis)?;
        let d = eigen_matrix_decompose(&h).map_err(analysis)?;
        let v = verify_decomposition(&h, &d).map_err(analysis)?;
        let terms: Vec<Value> = d
            .lambdas
            .iter()
            .zip(&d.factors)
            .map(|(l, f)| json!({ "lambda": l, "factor": complex_to_value(f) }))
            .collect();
        let mut out = done(
            json!({
                "input": origin.label(),
                "mode_dims": h.mode_dims(),
                "eigenvalues": spec.eigenvalues,
                "rank": d.s,
                "terms": terms,
            }),
            json!({
                "eigensolver_residual": spec.residual,
                "sweeps": spec.sweeps,
                "reconstruction_error": v.reconstruction_error,
                "orthonormality_defect": v.side_condition_defect,
            }),
        );
        if v.reconstruction_error > s.tol * scale_of(&h) {
            out.ok = false;
            out.failure = Some(format!("reconstruction error {:e} exceeds tolerance", v.reconstruction_error));
        }
        Ok(out)
    })
}

fn pair_results(p: &HermitianEigenpair) -> Value {
    json!({ "lambda": p.lambda, "x": p.x.vectors, "converged": p.converged })
}

fn pair_diagnostics(p: &HermitianEigenpair) -> Value {
    json!({
        "residual": p.residual,
        "residual_conj": p.residual_conj,
        "iterations": p.iterations,
        "start": p.start_seed,
    })
}

pub fn heig(loaded: &Loaded, s: &Settings) -> Run {
    let (h, origin) = hermitian_input(loaded)?;
    timed(|| {
        let opts = s.heig();
        let e = extreme_hermitian_eigenvalues(&h, &opts).map_err(analysis)?;
        let mut out = done(
            json!({
                "input": origin.label(),
                "mode_dims": h.mode_dims(),
                "max": pair_results(&e.max),
                "min": pair_results(&e.min),
            }),
            json!({
                "max": pair_diagnostics(&e.max),
                "min": pair_diagnostics(&e.min),
                "starts": opts.starts,
                "seed": opts.seed,
                "rule": format!("{:?}", opts.rule),
            }),
        );
        if !(e.max.converged && e.min.converged) {
            out.ok = false;
            out.failure = Some("no converged eigenpair within the sweep budget".into());
        }
        Ok(out)
    })
}

pub fn decompose(loaded: &Loaded, s: &Settings) -> Run {
    let (h, origin) = hermitian_input(loaded)?;
    timed(|| {
        let d = hermitian_decompose(&h).map_err(analysis)?;
        let v = verify_decomposition(&h, &d).map_err(analysis)?;
        let terms: Vec<Value> = d
            .terms
            .iter()
            .map(|t| json!({ "weight": t.weight, "factors": t.factors.vectors }))
            .collect();
        let mut out = done(
            json!({
                "input": origin.label(),
                "mode_dims": h.mode_dims(),
                "r": d.r,
                "positive": d.positive,
                "terms": terms,
            }),
            json!({
                "reconstruction_error": v.reconstruction_error,
                "unit_factor_defect": v.side_condition_defect,
            }),
        );
        if v.reconstruction_error > s.tol * scale_of(&h) {
            out.ok = false;
            out.failure = Some(format!("reconstruction error {:e} exceeds tolerance", v.reconstruction_error));
        }
        Ok(out)
    })
}

pub fn separability(loaded: &Loaded, s: &Settings, normalize_trace: bool) -> Run {
    let (h, origin) = hermitian_input(loaded)?;
    timed(|| {
        let config = SeparabilityConfig {
            heig: s.heig(),
            normalize_trace,
            separable_tol: s.tol,
            ..SeparabilityConfig::default()
        };
        let v = separability_analyze(&h, &config);
        let re = v.reverify(&h, &config).map_err(analysis)?;
        let mut out = done(
            json!({
                "input": origin.label(),
                "verdict": v.verdict,
                "certificate": v.certificate,
                "reverified": re.holds,
            }),
            json!({
                "eigen_rank": v.eigen_rank,
                "trace_normalized": v.trace_normalized,
                "reverification": re.detail,
                "separable_tol": config.separable_tol,
                "obstruction_floor": config.obstruction_floor,
            }),
        );
        if !re.holds && v.verdict != Verdict::Inconclusive {
            out.ok = false;
            out.failure = Some(format!("certificate failed re-verification: {}", re.detail));
        }
        Ok(out)
    })
}
