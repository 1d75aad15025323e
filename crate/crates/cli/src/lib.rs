//! The `hsgeom` command line: subcommands build a JSON run report and an
//! exit code (0 pass/found, 1 fail/not_found, 2 input or usage error).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use hsgeom::catalog::{catalog, catalog_entry, form_to_document, LoadedModel, ModelDocument};
use hsgeom::cohomology::{cohomology_report, ddc_lemma_check, frolicher_from_report, gauduchon_equality};
use hsgeom::complex::ComplexModel;
use hsgeom::exterior::{binomial, graded_commutator, graded_jacobi_defect, Form, GradedOperator};
use hsgeom::hermitian::{primitive_basis, skt_check, weil_identity_check, Flavor, HermitianSymplecticData};
use hsgeom::linalg::Matrix;
use hsgeom::scalar::Scalar;
use hsgeom::search::{feasibility_search, FeasibilityProblem, SearchParams, SearchStatus};
use hsgeom::spectral::{ddc11_pipeline, fitting_decompose, nonzero_closed_is_exact};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable naming a directory of `<name>.json` model documents
/// that take precedence over the built-in catalog.
pub const CATALOG_DIR_ENV: &str = "HSGEOM_CATALOG_DIR";

#[derive(Parser, Debug)]
#[command(name = "hsgeom", version, about = "Exact Hermitian symplectic operator calculus on Lie-algebra models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the model and run the operator identity suite
    Check { model: String },
    /// Betti, Dolbeault, Bott-Chern and Aeppli numbers and the Frölicher pages
    Cohomology { model: String },
    /// dd^c-lemma check in one bidegree
    Ddc {
        model: String,
        #[arg(long, value_parser = parse_bidegree)]
        bidegree: (usize, usize),
    },
    /// b¹ = 2h^{0,1} against the (1,1) dd^c verdict
    Gauduchon { model: String },
    /// Fitting decomposition of Δ and exactness of a named form
    Spectral {
        model: String,
        #[arg(long)]
        form: String,
    },
    /// Search for a Hermitian symplectic form
    SearchHs {
        model: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 300)]
        max_iters: usize,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Built-in model documents
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show { name: String },
}

fn parse_bidegree(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or_else(|| format!("expected p,q, got {s:?}"))?;
    let p = p.trim().parse().map_err(|_| format!("bad p in {s:?}"))?;
    let q = q.trim().parse().map_err(|_| format!("bad q in {s:?}"))?;
    Ok((p, q))
}

/// What a run prints and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: EXIT_INPUT }
    }

    /// The parsed JSON report on stdout.
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is a JSON report")
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code: EXIT_INPUT }
            };
        }
    };
    let started = Instant::now();
    match execute(cli.command, started) {
        Ok(out) => out,
        Err(msg) => Outcome::input_error(msg),
    }
}

fn read_document(path: &Path) -> Result<LoadedModel, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    hsgeom::catalog::load_model(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Looks up `name` in the override directory, then the built-in catalog,
/// then as a path to a JSON document.
pub fn resolve_model(name: &str) -> Result<LoadedModel, String> {
    if let Ok(dir) = std::env::var(CATALOG_DIR_ENV) {
        let path = Path::new(&dir).join(format!("{name}.json"));
        if path.is_file() {
            return read_document(&path);
        }
    }
    if let Ok(doc) = catalog_entry(name) {
        return doc.load().map_err(|e| e.to_string());
    }
    let path = Path::new(name);
    if path.is_file() {
        return read_document(path);
    }
    Err(format!("unknown model {name:?} (not in the catalog and not a file)"))
}

fn catalog_documents() -> Result<Vec<ModelDocument>, String> {
    let mut docs: BTreeMap<String, ModelDocument> = catalog().into_iter().map(|d| (d.name.clone(), d)).collect();
    if let Ok(dir) = std::env::var(CATALOG_DIR_ENV) {
        let entries = std::fs::read_dir(&dir).map_err(|e| format!("{dir}: {e}"))?;
        let mut paths: Vec<_> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.sort();
        for path in paths.into_iter().filter(|p| p.extension().is_some_and(|x| x == "json")) {
            let doc = read_document(&path)?.document;
            docs.insert(doc.name.clone(), doc);
        }
    }
    Ok(docs.into_values().collect())
}

pub fn form_json(f: &Form) -> Value {
    serde_json::to_value(form_to_document(f)).expect("serializable")
}

fn scalars_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.to_string())).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| scalars_json(m.row(r))).collect())
}

/// SHA-256 over the canonical serialization of the results and witnesses.
pub fn result_digest(results: &Value, witnesses: &Value) -> String {
    let canonical = serde_json::to_string(&json!({ "results": results, "witnesses": witnesses })).expect("json");
    format!("{:x}", Sha256::digest(canonical.as_bytes()))
}

struct Report {
    command: &'static str,
    model: Option<ModelDocument>,
    parameters: Value,
    results: Value,
    witnesses: Map<String, Value>,
    diagnostics: Option<Value>,
    passed: bool,
}

impl Report {
    fn finish(self, started: Instant) -> Outcome {
        let witnesses = Value::Object(self.witnesses);
        let digest = result_digest(&self.results, &witnesses);
        let mut out = json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "witnesses": witnesses,
            "result_digest": digest,
        });
        let obj = out.as_object_mut().expect("object");
        if let Some(doc) = self.model {
            obj.insert("model".into(), Value::String(doc.name.clone()));
            obj.insert("model_document".into(), serde_json::to_value(&doc).expect("serializable"));
        }
        if let Some(d) = self.diagnostics {
            obj.insert("diagnostics".into(), d);
        }
        obj.insert("timing_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
        let mut stdout = serde_json::to_string_pretty(&out).expect("json");
        stdout.push('\n');
        Outcome { stdout, stderr: String::new(), code: if self.passed { EXIT_PASS } else { EXIT_FAIL } }
    }
}

fn execute(command: Command, started: Instant) -> Result<Outcome, String> {
    let report = match command {
        Command::Check { model } => check(&resolve_model(&model)?)?,
        Command::Cohomology { model } => cohomology(&resolve_model(&model)?)?,
        Command::Ddc { model, bidegree } => ddc(&resolve_model(&model)?, bidegree)?,
        Command::Gauduchon { model } => gauduchon(&resolve_model(&model)?)?,
        Command::Spectral { model, form } => spectral(&resolve_model(&model)?, &form)?,
        Command::SearchHs { model, restarts, seed, tol, max_iters, step } => {
            let params = SearchParams { restarts, seed, tol, max_iters, step, ..SearchParams::default() };
            search(&resolve_model(&model)?, &params)?
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            let doc = resolve_model(&name)?.document;
            return Ok(Outcome { stdout: doc.to_json(), stderr: String::new(), code: EXIT_PASS });
        }
        Command::Catalog { action: CatalogAction::List } => {
            let models: Vec<Value> = catalog_documents()?
                .iter()
                .map(|d| {
                    json!({
                        "name": d.name,
                        "description": d.description,
                        "dim": d.dim,
                        "forms": d.forms.keys().collect::<Vec<_>>(),
                    })
                })
                .collect();
            Report {
                command: "catalog list",
                model: None,
                parameters: json!({}),
                results: json!({ "models": models }),
                witnesses: Map::new(),
                diagnostics: None,
                passed: true,
            }
        }
    };
    Ok(report.finish(started))
}

fn complex_model(loaded: &LoadedModel) -> Result<ComplexModel, String> {
    ComplexModel::new(loaded.model.clone(), loaded.complex_structure.clone()).map_err(|e| e.to_string())
}

fn hs_data(loaded: &LoadedModel) -> Result<HermitianSymplecticData, String> {
    let omega = loaded.form("omega").map_err(|e| e.to_string())?;
    hsgeom::hermitian::validate_hs(&loaded.model, &loaded.complex_structure, omega).map_err(|e| e.to_string())
}

fn zero(op: Result<GradedOperator, hsgeom::exterior::ExteriorError>) -> bool {
    op.map(|o| o.is_zero()).unwrap_or(false)
}

fn compose(a: &GradedOperator, b: &GradedOperator) -> GradedOperator {
    a.compose(b).expect("same model")
}

/// `**` equals `(−1)^{k(2n−k)}` on `k`-forms.
pub fn star_squared_sign_holds(data: &HermitianSymplecticData) -> bool {
    let dim = data.dim();
    let star = data.hodge_star();
    (0..=dim).all(|k| {
        let s = star.block(k, dim - k).expect("star block");
        let back = star.block(dim - k, k).expect("star block");
        let sign = if (k * (dim - k)) % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
        back.mul(s) == Matrix::identity(binomial(dim, k)).scale(&sign)
    })
}

/// Weil residuals over the canonical primitive bases of every (p,q), `p+q ≤ n`.
pub fn weil_sweep(data: &HermitianSymplecticData) -> (usize, Vec<(usize, usize, Form)>) {
    let n = data.n();
    let mut checked = 0;
    let mut failures = Vec::new();
    for p in 0..=n {
        for q in 0..=n - p {
            let basis = primitive_basis(data, p, q, Flavor::Omega11);
            for c in basis.columns() {
                let b = Form::from_vector(data.dim(), p + q, &c);
                checked += 1;
                match weil_identity_check(data, &b, p, q) {
                    Ok(r) if r.is_zero() => {}
                    Ok(r) => failures.push((p, q, r)),
                    Err(_) => failures.push((p, q, b)),
                }
            }
        }
    }
    (checked, failures)
}

/// Exact identity checks on a model with a complex structure.
pub fn identity_suite(cm: &ComplexModel) -> BTreeMap<&'static str, bool> {
    let (d, dc) = (cm.d(), cm.d_c());
    let (del, delbar) = cm.del_delbar();
    let i = Scalar::i();
    let i_del_minus_delbar = del.sub(delbar).expect("same parity").scale(&i);
    BTreeMap::from([
        ("d_squared_zero", compose(d, d).is_zero()),
        ("del_squared_zero", compose(del, del).is_zero()),
        ("delbar_squared_zero", compose(delbar, delbar).is_zero()),
        ("del_delbar_anticommute", zero(graded_commutator(del, delbar))),
        ("dc_squared_zero", compose(dc, dc).is_zero()),
        ("d_dc_anticommute", zero(graded_commutator(d, dc))),
        ("d_equals_del_plus_delbar", zero(del.add(delbar).and_then(|s| d.sub(&s)))),
        ("dc_equals_i_del_minus_delbar", zero(dc.sub(&i_del_minus_delbar))),
        ("dc_real", dc.is_real()),
    ])
}

fn check(loaded: &LoadedModel) -> Result<Report, String> {
    let cm = complex_model(loaded)?;
    let identities = identity_suite(&cm);
    let mut passed = identities.values().all(|&b| b);
    let (del, delbar) = cm.del_delbar();
    let informational = json!({
        "dc_equals_i_delbar_minus_del": zero(delbar.sub(del).map(|x| x.scale(&Scalar::i())).and_then(|x| cm.d_c().sub(&x))),
    });
    let mut witnesses = Map::new();
    let hs = if loaded.forms.contains_key("omega") {
        match hs_data(loaded) {
            Ok(data) => {
                let lap = data.laplacian();
                let swapped = data.laplacian_swapped();
                let lef = data.lefschetz();
                let (weil_checked, weil_failures) = weil_sweep(&data);
                for (idx, (p, q, r)) in weil_failures.iter().enumerate() {
                    witnesses.insert(format!("weil_residual_{idx}_{p}{q}"), form_json(r));
                }
                let checks = BTreeMap::from([
                    ("skt_residual_zero", skt_check(&data).is_ok()),
                    ("weil_residuals_zero", weil_failures.is_empty()),
                    ("laplacian_equals_minus_swapped", zero(lap.add(&swapped))),
                    ("laplacian_commutes_with_d", zero(graded_commutator(lap, cm.d()))),
                    ("laplacian_commutes_with_dc", zero(graded_commutator(lap, cm.d_c()))),
                    ("jacobi_d_dc_lambda11", zero(graded_jacobi_defect(cm.d(), cm.d_c(), &lef.lambda11))),
                    ("star_squared_sign", star_squared_sign_holds(&data)),
                    ("laplacian_real", lap.is_real()),
                ]);
                passed &= checks.values().all(|&b| b);
                witnesses.insert("vol".into(), form_json(data.vol()));
                json!({
                    "valid": true,
                    "checks": checks,
                    "weil_forms_checked": weil_checked,
                    "informational": {
                        "laplacian_minus_swapped_zero": zero(lap.sub(&swapped)),
                        "laplacian_zero": lap.is_zero(),
                    },
                    "metric": matrix_json(data.h()),
                    "omega11": form_json(data.omega11()),
                    "alpha": form_json(data.alpha()),
                })
            }
            Err(e) => {
                passed = false;
                json!({ "valid": false, "error": e })
            }
        }
    } else {
        Value::Null
    };
    Ok(Report {
        command: "check",
        model: Some(loaded.document.clone()),
        parameters: json!({}),
        results: json!({
            "complex_structure_valid": true,
            "identities": identities,
            "informational": informational,
            "hermitian_symplectic": hs,
            "verdict": if passed { "pass" } else { "fail" },
        }),
        witnesses,
        diagnostics: None,
        passed,
    })
}

fn cohomology(loaded: &LoadedModel) -> Result<Report, String> {
    let cm = complex_model(loaded)?;
    let r = cohomology_report(&cm);
    let f = frolicher_from_report(&r);
    let inequality = r.betti.iter().zip(&f.e1_sums).all(|(b, e)| b <= e);
    Ok(Report {
        command: "cohomology",
        model: Some(loaded.document.clone()),
        parameters: json!({}),
        results: json!({
            "betti": r.betti,
            "hodge": r.hodge,
            "bott_chern": r.bott_chern,
            "aeppli": r.aeppli,
            "frolicher_pages": r.frolicher_pages,
            "frolicher": {
                "e1_sums": f.e1_sums,
                "degenerates_at_e1": f.degenerates_at_e1,
                "degeneration_page": f.degeneration_page,
                "inequality_holds": inequality,
            },
        }),
        witnesses: Map::new(),
        diagnostics: None,
        passed: inequality,
    })
}

fn ddc(loaded: &LoadedModel, (p, q): (usize, usize)) -> Result<Report, String> {
    let cm = complex_model(loaded)?;
    if p > cm.n() || q > cm.n() {
        return Err(format!("bidegree ({p},{q}) out of range for n = {}", cm.n()));
    }
    let v = ddc_lemma_check(&cm, p, q);
    let mut witnesses = Map::new();
    if let Some(w) = &v.witness {
        witnesses.insert("witness".into(), form_json(w));
    }
    if let Some(w) = &v.witness_preimage {
        witnesses.insert("witness_dc_preimage".into(), form_json(w));
    }
    if let Some(w) = &v.swapped_witness {
        witnesses.insert("swapped_witness".into(), form_json(w));
    }
    Ok(Report {
        command: "ddc",
        model: Some(loaded.document.clone()),
        parameters: json!({ "bidegree": [p, q] }),
        results: json!({
            "verdict": v.holds,
            "closed_dc_exact_dim": v.s_dim,
            "ddc_exact_dim": v.t_dim,
            "swapped_verdict": v.swapped_holds,
        }),
        witnesses,
        diagnostics: None,
        passed: v.holds,
    })
}

fn gauduchon(loaded: &LoadedModel) -> Result<Report, String> {
    let cm = complex_model(loaded)?;
    let g = gauduchon_equality(&cm);
    Ok(Report {
        command: "gauduchon",
        model: Some(loaded.document.clone()),
        parameters: json!({}),
        results: json!({
            "b1": g.b1,
            "h10": g.h10,
            "h01": g.h01,
            "b1_eq_2h01": g.b1_eq_2h01,
            "b1_eq_2h10": g.b1_eq_2h10,
            "ddc11": g.ddc11,
            "consistent": g.consistent,
        }),
        witnesses: Map::new(),
        diagnostics: None,
        passed: g.consistent,
    })
}

fn spectral(loaded: &LoadedModel, form_name: &str) -> Result<Report, String> {
    let data = hs_data(loaded)?;
    let a = loaded.form(form_name).map_err(|e| e.to_string())?;
    let dec = fitting_decompose(&data);
    let checks = dec.verify(&data);
    let parts: Vec<Value> = dec
        .parts
        .iter()
        .map(|p| {
            json!({
                "degree": p.degree,
                "stabilization_index": p.stabilization_index,
                "zero_dim": p.zero_part.cols(),
                "nonzero_dim": p.nonzero_part.cols(),
            })
        })
        .collect();
    let mut witnesses = Map::new();
    let exactness = match nonzero_closed_is_exact(&data, &dec, a) {
        Ok(cert) => {
            witnesses.insert("beta".into(), form_json(&cert.beta));
            witnesses.insert("beta_direct".into(), form_json(&cert.beta_direct));
            json!({ "holds": true })
        }
        Err(e) => json!({ "holds": false, "reason": e.to_string() }),
    };
    let exact_ok = exactness["holds"] == json!(true);
    let (ddc11, ddc_ok) = match ddc11_pipeline(&data) {
        Ok(r) => {
            if let Some((step, w)) = r.failure() {
                witnesses.insert(format!("ddc11_failure_{step}"), form_json(&w));
            }
            let ok = r.passes && r.agrees_with_rank_check();
            (
                json!({
                    "closed_dc_exact_11_dim": r.s_dim,
                    "nonzero_identity_checked": r.nonzero_identity_checked,
                    "nonzero_identity_holds": r.nonzero_identity_holds,
                    "passes": r.passes,
                    "rank_check": r.rank_check,
                    "agrees": r.agrees_with_rank_check(),
                }),
                ok,
            )
        }
        Err(e) => (json!({ "applicable": false, "reason": e.to_string() }), true),
    };
    Ok(Report {
        command: "spectral",
        model: Some(loaded.document.clone()),
        parameters: json!({ "form": form_name }),
        results: json!({
            "parts": parts,
            "checks": {
                "spans_whole": checks.spans_whole,
                "trivial_intersection": checks.trivial_intersection,
                "rank_stable": checks.rank_stable,
                "restricted_invertible": checks.restricted_invertible,
                "d_equivariant": checks.d_equivariant,
                "dc_equivariant": checks.dc_equivariant,
            },
            "exactness": exactness,
            "ddc11": ddc11,
        }),
        witnesses,
        diagnostics: None,
        passed: checks.all() && exact_ok && ddc_ok,
    })
}

fn search(loaded: &LoadedModel, params: &SearchParams) -> Result<Report, String> {
    let problem = FeasibilityProblem::new(&loaded.model, &loaded.complex_structure).map_err(|e| e.to_string())?;
    let r = feasibility_search(&problem, params);
    let mut witnesses = Map::new();
    if let Some(x) = &r.candidate {
        witnesses.insert("omega".into(), form_json(&problem.form_of(x)));
    }
    Ok(Report {
        command: "search-hs",
        model: Some(loaded.document.clone()),
        parameters: json!({
            "restarts": params.restarts,
            "seed": params.seed,
            "tol": params.tol,
            "max_iters": params.max_iters,
            "step": params.step,
            "max_denominator": params.max_denominator,
        }),
        results: json!({
            "status": r.status.as_str(),
            "candidate": r.candidate.as_deref().map(scalars_json),
            "certified": r.certified,
            "restarts_used": r.restarts_used,
            "seed": r.seed,
            "closed_two_form_dim": problem.closed_basis().len(),
            "common_isotropic_direction": problem.common_isotropic_direction(),
            "dual_certificate": r.dual_certificate,
        }),
        witnesses,
        diagnostics: Some(json!({ "best_min_eigenvalue": r.best_min_eigenvalue })),
        passed: r.status == SearchStatus::Found,
    })
}
