use std::path::Path;
use std::time::Duration;

use gricci::algebra::{
    canonical_metric, metric_from_involution, metric_report, preset_algebra, random_metric, split_inverse, Preset,
};
use gricci::diagrams::{automorphism_count, contract, preset_graph, SignedGraph};
use gricci::flow::{
    beta_antisymmetry, courant_t_dprime, integrate_flow, master_equation_residual, off_block_residual,
    Scheme, StepOptions,
};
use gricci::geometry::{CutoffSpec, Model};
use gricci::io::{rows, AlgebraDocument};
use gricci::poly::{Monomial, Poly};
use gricci::verify::{
    convergence_scan, courant_lhs, courant_rhs, lemma_lhs, lemma_rhs, McOptions, MCEstimate, Propagator,
    TestForm, DEFAULT_EPSILON,
};
use gricci::{Algebra, Courant, Metric};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{count, parse_span};
use crate::error::CliError;
use crate::output::{print_table, Record, Run};
use crate::{AlgebraArgs, CourantArgs, DiagramArgs, FlowArgs, Globals, LemmaArgs, ScanArgs, TensorArgs};

const DEFAULT_TOL: f64 = 1e-10;

/// What a command produced; a `failure` still gets its records written.
struct Outcome {
    records: Vec<Record>,
    failure: Option<CliError>,
}

impl From<Vec<Record>> for Outcome {
    fn from(records: Vec<Record>) -> Self {
        Self { records, failure: None }
    }
}

fn execute(mut run: Run, body: impl FnOnce(&mut Run) -> Result<Outcome, CliError>) -> Result<(), CliError> {
    match body(&mut run) {
        Ok(out) => {
            run.write_records(&out.records)?;
            print_table(&out.records);
            run.finish(out.failure.as_ref().map_or("ok", CliError::kind))?;
            out.failure.map_or(Ok(()), Err)
        }
        Err(e) => {
            run.finish(e.kind())?;
            Err(e)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn matrix(m: &DMatrix<f64>) -> Value {
    // adding +0.0 turns negative zeros into zeros
    json!(rows(&m.map(|x| x + 0.0)))
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// The algebra and, if the document carries one, its `τ`.
fn load_algebra(a: &AlgebraArgs) -> Result<(Algebra, Option<Vec<Vec<f64>>>), CliError> {
    let (alg, tau) = match (&a.preset, &a.algebra) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either preset or algebra, not both".into())),
        (None, None) => return Err(CliError::Config("an algebra is required (preset or algebra)".into())),
        (Some(p), None) => (preset_algebra(&Preset::parse(p)?, 1.0)?, None),
        (None, Some(path)) => {
            let doc = AlgebraDocument::from_json(&read(path)?)?;
            (doc.algebra()?, doc.tau)
        }
    };
    let alg = match a.level {
        Some(l) if l != 1.0 => alg.with_level(l)?,
        _ => alg,
    };
    Ok((alg, tau))
}

/// `τ` from its spec, unvalidated; returns the seed when it was drawn at random.
fn metric_tau(
    alg: &Algebra,
    spec: Option<&str>,
    doc_tau: Option<&Vec<Vec<f64>>>,
) -> Result<(DMatrix<f64>, Option<u64>), CliError> {
    let spec = spec.unwrap_or(if doc_tau.is_some() { "document" } else { "canonical" });
    match spec {
        "canonical" | "subalgebra" => Ok((canonical_metric(alg).tau().clone(), None)),
        "document" => {
            let tau = doc_tau.ok_or_else(|| CliError::Config("metric `document` needs a tau in the document".into()))?;
            Ok((gricci::io::from_rows(tau)?, None))
        }
        s if s.starts_with("random") => {
            let rest = s.trim_start_matches("random").trim_start_matches(':');
            let rest = rest.strip_prefix("seed=").unwrap_or(rest);
            let seed = if rest.is_empty() {
                0
            } else {
                rest.parse().map_err(|_| CliError::Config(format!("bad metric seed in `{s}`")))?
            };
            Ok((random_metric(alg, seed)?.tau().clone(), Some(seed)))
        }
        other => Err(CliError::Config(format!("unknown metric `{other}`"))),
    }
}

fn load_metric(
    alg: &Algebra,
    spec: Option<&str>,
    doc_tau: Option<&Vec<Vec<f64>>>,
    tol: f64,
) -> Result<(Metric, Option<u64>), CliError> {
    let (tau, seed) = metric_tau(alg, spec, doc_tau)?;
    Ok((metric_from_involution(alg, tau, tol)?, seed))
}

fn algebra_and_metric(a: &AlgebraArgs) -> Result<(Algebra, Metric, Option<u64>), CliError> {
    let (alg, tau) = load_algebra(a)?;
    let (m, seed) = load_metric(&alg, a.metric.as_deref(), tau.as_ref(), a.tol.unwrap_or(DEFAULT_TOL))?;
    Ok((alg, m, seed))
}

pub fn ricci(a: &TensorArgs, g: &Globals) -> Result<(), CliError> {
    let (alg, metric, seed) = algebra_and_metric(&a.alg)?;
    execute(Run::new(&g.out, "ricci", a, seed, g.threads)?, |run| {
        let ric = gricci::flow::generalized_ricci(&alg, &metric)?;
        let mut r = run.record("generalized_ricci", matrix(&ric));
        r.extra.insert("norm".into(), json!(ric.norm()));
        r.extra.insert("off_block_residual".into(), json!(off_block_residual(&metric, &ric)));
        Ok(vec![r].into())
    })
}

pub fn beta(a: &TensorArgs, g: &Globals) -> Result<(), CliError> {
    let (alg, metric, seed) = algebra_and_metric(&a.alg)?;
    execute(Run::new(&g.out, "beta", a, seed, g.threads)?, |run| {
        let b = gricci::flow::beta(&alg, &metric)?;
        let mut r = run.record("beta", matrix(&b));
        r.extra.insert("norm".into(), json!(b.norm()));
        r.extra.insert("antisymmetry".into(), json!(beta_antisymmetry(&alg, &b)));
        Ok(vec![r].into())
    })
}

pub fn flow(a: &FlowArgs, g: &Globals) -> Result<(), CliError> {
    let (alg, metric, seed) = algebra_and_metric(&a.alg)?;
    let span = parse_span(a.s.as_deref().unwrap_or("0:1")).map_err(CliError::Config)?;
    let scheme = match a.scheme.as_deref().unwrap_or("rkmk4") {
        "rkmk4" => Scheme::Rkmk4,
        "lie_euler" => Scheme::LieEuler,
        s => return Err(CliError::Config(format!("unknown scheme `{s}`"))),
    };
    let opts = StepOptions { scheme, tol: a.alg.tol.unwrap_or(DEFAULT_TOL), ..Default::default() };
    let (ds, hbar) = (a.ds.unwrap_or(0.01), a.hbar.unwrap_or(1.0));
    let mut run = Run::new(&g.out, "flow", a, seed, g.threads)?;
    let algebra_hash = gricci::io::sha256_hex(AlgebraDocument::from_algebra(&alg, None).to_json());
    run.parameters = json!({
        "algebra_hash": algebra_hash,
        "s": [span.0, span.1],
        "ds": ds,
        "ds_policy": "fixed, halved on invariant failure",
        "min_ds": opts.min_ds,
        "hbar": hbar,
        "scheme": a.scheme.as_deref().unwrap_or("rkmk4"),
        "tol": opts.tol,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    execute(run, |run| {
        let traj = integrate_flow(&alg, &metric, span, ds, hbar, &opts)?;
        let mut csv = Vec::new();
        gricci::io::write_trajectory_csv(&mut csv, &traj.states)?;
        run.write("flow.csv", &String::from_utf8_lossy(&csv))?;
        let (mut inv, mut sym, mut margin) = (0.0f64, 0.0f64, f64::INFINITY);
        for st in &traj.states {
            let rep = metric_report(&alg, st.metric.tau());
            inv = inv.max(rep.involution);
            sym = sym.max(rep.pairing_symmetry);
            margin = margin.min(rep.positivity_margin);
        }
        let last = traj.states.last().expect("trajectory starts with the initial state");
        let mut r = run.record("flow", matrix(last.metric.tau()));
        r.extra.insert("s_final".into(), json!(last.s));
        r.extra.insert("steps".into(), json!(traj.states.len() - 1));
        r.extra.insert("final_residual".into(), json!(last.residual));
        r.extra.insert("max_involution_residual".into(), json!(inv));
        r.extra.insert("max_pairing_symmetry_residual".into(), json!(sym));
        r.extra.insert("min_positivity_margin".into(), json!(margin));
        let failure = traj.diagnostic.map(|reason| {
            r.extra.insert("diagnostic".into(), json!(reason));
            CliError::Core(gricci::Error::StepUnderflow { s: last.s, reason })
        });
        Ok(Outcome { records: vec![r], failure })
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CourantDoc {
    pairing: Vec<Vec<f64>>,
    base_dim: usize,
    #[serde(default)]
    c: Vec<CourantEntry<3>>,
    #[serde(default)]
    rho: Vec<CourantEntry<2>>,
    #[serde(default)]
    tau: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CourantEntry<const K: usize> {
    #[serde(with = "serde_arrays")]
    index: [usize; K],
    terms: Vec<Monomial<f64>>,
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>, const K: usize>(d: D) -> Result<[usize; K], D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.try_into().map_err(|v: Vec<usize>| serde::de::Error::invalid_length(v.len(), &"index tuple"))
    }
}

fn poly(nvars: usize, terms: &[Monomial<f64>]) -> Poly<f64> {
    let mut p = Poly::zero(nvars);
    for t in terms {
        p.add_term(t.coef, t.exps.clone());
    }
    p
}

fn load_courant(a: &CourantArgs) -> Result<(Courant, Option<Vec<Vec<f64>>>), CliError> {
    if let Some(path) = &a.courant {
        if a.alg.preset.is_some() || a.alg.algebra.is_some() {
            return Err(CliError::Config("give either courant or an algebra, not both".into()));
        }
        let doc: CourantDoc = parse_json(path)?;
        let m = doc.base_dim;
        let mut data = Courant::zero(gricci::io::from_rows(&doc.pairing)?, m)?;
        for e in &doc.c {
            if e.terms.iter().any(|t| t.exps.len() != m) {
                return Err(CliError::Config("monomial exponent count must equal base_dim".into()));
            }
            let [x, y, z] = e.index;
            data = data.with_c(x, y, z, poly(m, &e.terms))?;
        }
        for e in &doc.rho {
            if e.terms.iter().any(|t| t.exps.len() != m) {
                return Err(CliError::Config("monomial exponent count must equal base_dim".into()));
            }
            data = data.with_rho(e.index[0], e.index[1], poly(m, &e.terms))?;
        }
        Ok((data, doc.tau))
    } else {
        let (alg, tau) = load_algebra(&a.alg)?;
        Ok((Courant::from_lie_algebra(&alg, a.base_dim.unwrap_or(1))?, tau))
    }
}

fn parse_point(s: Option<&str>, m: usize) -> Result<Vec<f64>, CliError> {
    let Some(s) = s else { return Ok(vec![0.0; m]) };
    let x: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Config(format!("bad coordinate `{t}`"))))
        .collect::<Result<_, _>>()?;
    if x.len() != m {
        return Err(CliError::Config(format!("x has {} coordinates, base has dimension {m}", x.len())));
    }
    Ok(x)
}

pub fn courant_ricci(a: &CourantArgs, g: &Globals) -> Result<(), CliError> {
    let (data, tau) = load_courant(a)?;
    let x = parse_point(a.x.as_deref(), data.base_dim())?;
    let fiber = data.fiber_at(&x)?;
    let (metric, seed) = load_metric(&fiber, a.alg.metric.as_deref(), tau.as_ref(), a.alg.tol.unwrap_or(DEFAULT_TOL))?;
    execute(Run::new(&g.out, "courant-ricci", a, seed, g.threads)?, |run| {
        let ric = -courant_t_dprime(&data, &x, &metric)?;
        let mut r = run.record("courant_generalized_ricci", matrix(&ric));
        r.extra.insert("x".into(), json!(x));
        r.extra.insert("norm".into(), json!(ric.norm()));
        Ok(vec![r].into())
    })
}

pub fn master_check(a: &CourantArgs, g: &Globals) -> Result<(), CliError> {
    let (data, _) = load_courant(a)?;
    let samples = count(a.samples.unwrap_or(8.0))?;
    let seed = a.seed.unwrap_or(0);
    let tol = a.alg.tol.unwrap_or(1e-12);
    execute(Run::new(&g.out, "master-check", a, Some(seed), g.threads)?, |run| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = data.base_dim();
        let mut points = vec![parse_point(a.x.as_deref(), m)?];
        points.extend((1..samples).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>()));
        let res = master_equation_residual(&data, &points);
        let mut r = run.record("master_equation_residual", json!(res));
        r.n = Some(points.len() as u64);
        r.extra.insert("tolerance".into(), json!(tol));
        r.extra.insert("passed".into(), json!(res <= tol));
        let failure = (res > tol).then(|| CliError::CheckFailed(format!("{{C,C}} residual {res:e} > {tol:e}")));
        Ok(Outcome { records: vec![r], failure })
    })
}

fn default_one_form() -> TestForm {
    TestForm::constant(1, [0.1, 0.0, 0.0], 1.0, &[1.0, 0.5, 0.3]).expect("valid default form")
}

fn default_two_form() -> TestForm {
    TestForm::constant(2, [0.0, 0.1, 0.0], 1.0, &[1.0, 0.3, -0.2]).expect("valid default form")
}

fn load_form(path: &Path) -> Result<TestForm, CliError> {
    let f: TestForm = parse_json(path)?;
    f.validate()?;
    Ok(f)
}

fn mc_options(a: &crate::McArgs, g: &Globals) -> Result<McOptions, CliError> {
    let mut opts = McOptions::new(count(a.n.unwrap_or(1e6))?, a.seed.unwrap_or(0));
    opts.threads = Some(g.threads);
    if let Some(b) = a.budget {
        if !(b > 0.0 && b.is_finite()) {
            return Err(CliError::Config("budget must be a positive number of seconds".into()));
        }
        opts.budget = Some(Duration::from_secs_f64(b));
    }
    Ok(opts)
}

fn cutoffs(a: &LemmaArgs, epsilon: f64) -> Result<(CutoffSpec, CutoffSpec), CliError> {
    let l1 = CutoffSpec::new(a.l1.as_deref().unwrap_or("1"), epsilon, Model::Halfspace)?;
    let l2 = CutoffSpec::new(a.l2.as_deref().unwrap_or("2"), epsilon, Model::Halfspace)?;
    Ok((l1, l2))
}

fn mc_record(run: &Run, op: &str, e: &MCEstimate, epsilon: f64) -> Record {
    let mut r = run.record(op, complex(e.value));
    r.stderr = Some(e.stderr);
    r.n = Some(e.n_samples);
    r.seed = Some(e.seed);
    r.epsilon = Some(epsilon);
    r
}

fn budget_check(e: &MCEstimate, opts: &McOptions) -> Option<CliError> {
    (e.n_samples < opts.n).then_some(CliError::Budget {
        achieved: e.n_samples,
        requested: opts.n,
        stderr: e.stderr,
    })
}

fn sigmas(e: &MCEstimate, target: Complex64) -> f64 {
    (e.value - target).norm() / e.stderr
}

pub fn verify_lemma(a: &LemmaArgs, g: &Globals) -> Result<(), CliError> {
    let opts = mc_options(&a.mc, g)?;
    let epsilon = a.mc.epsilon.unwrap_or(DEFAULT_EPSILON);
    let (l1, l2) = cutoffs(a, epsilon)?;
    let alpha = a.alpha.as_deref().map_or_else(|| Ok(default_one_form()), load_form)?;
    let beta = a.beta.as_deref().map_or_else(|| Ok(alpha.clone()), load_form)?;
    execute(Run::new(&g.out, "verify-lemma", a, Some(opts.seed), g.threads)?, |run| {
        let e = lemma_lhs(&alpha, &beta, &l1, &l2, epsilon, &opts)?;
        let reference = lemma_rhs(&alpha, &beta, &l1, &l2)?;
        let mut r = mc_record(run, "lemma_lhs", &e, epsilon);
        r.extra.insert("reference".into(), json!(reference));
        r.extra.insert("deviation_sigmas".into(), json!(sigmas(&e, Complex64::new(reference, 0.0))));
        if reference != 0.0 {
            r.extra.insert("relative_error".into(), json!((e.value.re - reference).abs() / reference.abs()));
        }
        Ok(Outcome { failure: budget_check(&e, &opts), records: vec![r] })
    })
}

pub fn verify_courant(a: &LemmaArgs, g: &Globals) -> Result<(), CliError> {
    if a.beta.is_some() {
        return Err(CliError::Config("verify-courant takes a single form `alpha`".into()));
    }
    let opts = mc_options(&a.mc, g)?;
    let epsilon = a.mc.epsilon.unwrap_or(DEFAULT_EPSILON);
    let (l1, l2) = cutoffs(a, epsilon)?;
    let alpha = a.alpha.as_deref().map_or_else(|| Ok(default_two_form()), load_form)?;
    execute(Run::new(&g.out, "verify-courant", a, Some(opts.seed), g.threads)?, |run| {
        let e = courant_lhs(&alpha, &l1, &l2, epsilon, &opts)?;
        let reference = courant_rhs(&alpha, &l1, &l2)?;
        let mut r = mc_record(run, "courant_lhs", &e, epsilon);
        r.extra.insert("reference".into(), complex(reference));
        r.extra.insert("deviation_sigmas".into(), json!(sigmas(&e, reference)));
        if reference.norm() > 0.0 {
            // the reference carries 1/4π where the lemma carries 1/2π
            let coef = e.value / reference;
            r.extra.insert("coefficient_ratio".into(), complex(coef));
        }
        Ok(Outcome { failure: budget_check(&e, &opts), records: vec![r] })
    })
}

fn default_scan_forms(n: usize) -> Vec<TestForm> {
    const SPECS: [([f64; 3], [f64; 3]); 5] = [
        ([0.1, 0.0, 0.0], [1.0, 0.5, 0.3]),
        ([-0.1, 0.1, 0.0], [0.4, -1.0, 0.7]),
        ([0.0, -0.1, 0.0], [-0.6, 0.2, 1.0]),
        ([0.05, 0.05, 0.0], [0.8, 0.3, -0.5]),
        ([-0.05, -0.05, 0.0], [0.2, 0.9, 0.4]),
    ];
    SPECS[..n]
        .iter()
        .map(|(c, a)| TestForm::constant(1, *c, 1.0, a).expect("valid default form"))
        .collect()
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    s.split(',').map(|t| item(t.trim())).collect()
}

pub fn scan(a: &ScanArgs, g: &Globals) -> Result<(), CliError> {
    let forms = match &a.forms {
        Some(p) => {
            let forms: Vec<TestForm> = parse_json(p)?;
            for f in &forms {
                f.validate()?;
            }
            if a.vertices.is_some_and(|v| v != forms.len()) {
                return Err(CliError::Config("vertices does not match the number of forms".into()));
            }
            forms
        }
        None => {
            let n = a.vertices.unwrap_or(3);
            if !(2..=5).contains(&n) {
                return Err(CliError::Config(format!("vertices must be in 2..=5, got {n}")));
            }
            default_scan_forms(n)
        }
    };
    let default_grid = if forms.len() == 2 { "0.04,0.02,0.01,0.005" } else { "0.16,0.08,0.04,0.02,0.01" };
    let epsilons = parse_list(a.epsilons.as_deref().unwrap_or(default_grid), |t| {
        t.parse::<f64>().map_err(|_| CliError::Config(format!("bad epsilon `{t}`")))
    })?;
    let edges = a
        .edges
        .as_deref()
        .map(|s| {
            parse_list(s, |t| {
                serde_json::from_value::<Propagator>(json!(t))
                    .map_err(|_| CliError::Config(format!("unknown propagator `{t}`")))
            })
        })
        .transpose()?;
    let mut opts = McOptions::new(count(a.n.unwrap_or(1e6))?, a.seed.unwrap_or(0));
    opts.threads = Some(g.threads);
    execute(Run::new(&g.out, "scan-convergence", a, Some(opts.seed), g.threads)?, |run| {
        let res = convergence_scan(&forms, edges.as_deref(), &epsilons, &opts)?;
        let mut r = run.record("convergence_slope", json!(res.slope));
        r.stderr = Some(res.slope_stderr);
        r.n = Some(opts.n);
        r.extra.insert("vertices".into(), json!(res.n_vertices));
        r.extra.insert("slope_ci95".into(), json!(res.slope_ci));
        r.extra.insert("points".into(), serde_json::to_value(&res.points)?);
        Ok(vec![r].into())
    })
}

pub fn diagram(a: &DiagramArgs, g: &Globals) -> Result<(), CliError> {
    let graph = match (&a.graph_preset, &a.graph) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either graph_preset or graph, not both".into())),
        (None, None) => return Err(CliError::Config("a graph is required (graph_preset or graph)".into())),
        (Some(name), None) => preset_graph(name)?,
        (None, Some(path)) => SignedGraph::from_json(&read(path)?)?,
    };
    let contracted = if a.contract.unwrap_or(false) {
        let (alg, metric, _) = algebra_and_metric(&a.alg)?;
        Some(contract(&graph, &alg, &metric)?)
    } else {
        None
    };
    execute(Run::new(&g.out, "diagram", a, None, g.threads)?, |run| {
        let aut = automorphism_count(&graph, false)?;
        let aut0 = automorphism_count(&graph, true)?;
        let mut r = run.record("automorphisms", json!({ "aut": aut, "aut0": aut0 }));
        r.extra.insert("half_edges".into(), json!(graph.half_edge_count()));
        let mut records = vec![r];
        if let Some(t) = contracted {
            let value = if t.order() == 2 { matrix(&t.matrix()?) } else { json!(t.data) };
            let mut c = run.record("tensor_factor", value);
            c.extra.insert("dims".into(), json!(t.dims));
            records.push(c);
        }
        Ok(records.into())
    })
}

pub fn validate(a: &TensorArgs, g: &Globals) -> Result<(), CliError> {
    let tol = a.alg.tol.unwrap_or(DEFAULT_TOL);
    let (alg, tau) = load_algebra(&a.alg)?;
    execute(Run::new(&g.out, "validate", a, None, g.threads)?, |run| {
        let report = alg.validate(tol);
        let mut problems = Vec::new();
        if !report.passed {
            problems.push("algebra axioms".to_string());
        }
        let mut records = vec![run.record("algebra", serde_json::to_value(&report)?)];
        if a.alg.metric.is_some() || tau.is_some() {
            let (tau, _) = metric_tau(&alg, a.alg.metric.as_deref(), tau.as_ref())?;
            let rep = metric_report(&alg, &tau);
            let violations = rep.violations(tol);
            problems.extend(violations.iter().cloned());
            let mut m = run.record("metric", serde_json::to_value(&rep)?);
            m.extra.insert("violations".into(), json!(violations));
            if violations.is_empty() {
                let metric = metric_from_involution(&alg, tau, tol)?;
                let split = split_inverse(&alg, &metric);
                let n = alg.dim();
                let roundtrip = ((&split.tplus + &split.tminus) * alg.pairing() - DMatrix::identity(n, n)).amax();
                m.extra.insert("split_roundtrip_residual".into(), json!(roundtrip));
            }
            records.push(m);
        }
        let failure = (!problems.is_empty()).then(|| CliError::CheckFailed(problems.join("; ")));
        Ok(Outcome { records, failure })
    })
}
