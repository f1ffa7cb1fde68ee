//! The `plk` command line: argument parsing, command dispatch and reports.
//!
//! Every command produces a [`Report`]: a JSON value carrying `schema: 1`
//! and a text rendering. Output depends only on the configuration, so equal
//! configurations give byte-identical reports.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use crate::monoid::{mon_equal, monoid_of_graph, MonoidElement, MonoidVerdict, SearchBound};
use crate::parse::{parse_expr, Evaluator, Expr, ExprError, Value};
use crate::pathalg::{AlgMatrix, PathAlgebra};
use crate::qalg::{QAlgebra, QElement, SigmaPrimeDecomposition, DEFAULT_DEGREE};
use crate::quiver::{validate_abp_shape, GraphFile, Quiver, QuiverError};
use crate::ratseries::{invert_element, prat_membership_certificate, LinRep, PratCertificate};
use crate::verify::{self, Budget, SuiteOutcome};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "plk", version, about = "Leavitt path algebras over trees of fields")]
pub struct Cli {
    /// Truncation degree for series comparisons and printing.
    #[arg(long, global = true, default_value_t = DEFAULT_DEGREE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub degree: u64,
    /// Layer bound for the monoid search.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Condense the graph, check the tree condition and any shape annotations.
    Validate { file: PathBuf },
    /// Evaluate an expression to normal form.
    Eval { file: PathBuf, expr: String },
    /// Invert a path-algebra element or a matrix `[[a, b], [c, d]]`.
    Invert { file: PathBuf, expr: String },
    /// Decide `a = b` in the graph monoid, e.g. `u` and `u+v`.
    MonoidEq { file: PathBuf, a: String, b: String },
    /// Σ′ decomposition of a matrix, or the component certificate of a series.
    Decompose { file: PathBuf, expr: String },
    /// Run the property suites; `--suite` picks one.
    Verify {
        file: PathBuf,
        #[arg(long)]
        suite: Option<String>,
    },
}

/// Everything a run depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub degree: usize,
    pub bound: SearchBound,
    pub json: bool,
    pub seed: u64,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        let mut bound = SearchBound::default();
        if let Some(layers) = c.bound {
            bound.layers = layers;
        }
        RunConfig {
            command: c.command,
            degree: c.degree as usize,
            bound,
            json: c.json,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Json,
    pub text: String,
    pub code: i32,
}

impl Report {
    fn new(command: &str, body: Json, text: String, code: i32) -> Self {
        let mut json = json!({ "schema": SCHEMA, "command": command, "ok": code == EXIT_OK });
        if let (Json::Object(out), Json::Object(extra)) = (&mut json, body) {
            out.extend(extra);
        }
        Report { json, text, code }
    }

    fn error(command: &str, code: i32, msg: String) -> Self {
        let text = format!("error: {msg}");
        Report::new(command, json!({ "error": msg }), text, code)
    }

    /// The report as printed, with a trailing newline.
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.json).expect("plain JSON");
            s.push('\n');
            s
        } else if self.text.ends_with('\n') {
            self.text.clone()
        } else {
            format!("{}\n", self.text)
        }
    }
}

struct Failure(i32, String);

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse(_) => Failure(EXIT_PARSE, e.to_string()),
            ExprError::Eval(_) => Failure(EXIT_FAILURE, e.to_string()),
        }
    }
}

fn load(file: &PathBuf) -> Result<GraphFile, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure(EXIT_FAILURE, format!("{}: {e}", file.display())))?;
    GraphFile::parse(&text).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", file.display())))
}

fn algebra(g: &GraphFile) -> Result<QAlgebra, Failure> {
    PathAlgebra::from_graph(g)
        .map(QAlgebra::new)
        .map_err(|e| Failure(EXIT_FAILURE, e.to_string()))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Eval { .. } => "eval",
        Command::Invert { .. } => "invert",
        Command::MonoidEq { .. } => "monoid-eq",
        Command::Decompose { .. } => "decompose",
        Command::Verify { .. } => "verify",
    }
}

pub fn run(cfg: &RunConfig) -> Report {
    let name = command_name(&cfg.command);
    let result = match &cfg.command {
        Command::Validate { file } => validate(file),
        Command::Eval { file, expr } => eval(file, expr, cfg.degree),
        Command::Invert { file, expr } => invert(file, expr, cfg.degree),
        Command::MonoidEq { file, a, b } => monoid_eq(file, a, b, cfg.bound),
        Command::Decompose { file, expr } => decompose(file, expr, cfg.degree),
        Command::Verify { file, suite } => verify_cmd(file, suite.as_deref(), cfg),
    };
    match result {
        Ok((body, text, code)) => Report::new(name, body, text, code),
        Err(Failure(code, msg)) => Report::error(name, code, msg),
    }
}

/// Parses `args` (including the program name), runs, prints, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = RunConfig::from(cli);
    let report = run(&cfg);
    let out = report.render(cfg.json);
    if report.json.get("error").is_some() && !cfg.json {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    report.code
}

type CmdResult = Result<(Json, String, i32), Failure>;

fn validate(file: &PathBuf) -> CmdResult {
    let g = load(file)?;
    let q = &g.quiver;
    let mut text = format!("{} vertices, {} edges\n", q.num_vertices(), q.num_edges());
    let poset = match g.condense() {
        Ok(p) => p,
        Err(e) => {
            text.push_str(&format!("condensation failed: {e}\n"));
            return Ok((json!({ "condensation": e.to_string() }), text, EXIT_FAILURE));
        }
    };
    let classes: Vec<Json> = poset
        .classes()
        .map(|c| {
            let members: Vec<&str> = poset.members(c).iter().map(|&v| q.vertex_name(v)).collect();
            let covers: Vec<&str> = poset.lower_covers(c).into_iter().map(|k| poset.name(k)).collect();
            text.push_str(&format!("class {}: {{{}}}", poset.name(c), members.join(", ")));
            if !covers.is_empty() {
                text.push_str(&format!(" > {}", covers.join(", ")));
            }
            text.push('\n');
            json!({ "name": poset.name(c), "members": members, "covers": covers })
        })
        .collect();
    let mut code = EXIT_OK;
    let tree = match poset.assert_tree() {
        Ok(root) => {
            text.push_str(&format!("tree: ok, root {}\n", poset.name(root)));
            json!({ "ok": true, "root": poset.name(root) })
        }
        Err(e) => {
            code = EXIT_FAILURE;
            text.push_str(&format!("tree: {e}\n"));
            json!({ "ok": false, "error": e.to_string() })
        }
    };
    let mut body = json!({ "vertices": q.num_vertices(), "edges": q.num_edges(), "classes": classes, "tree": tree });
    if g.has_shape_annotations() {
        let shape = g
            .shape_sets(&poset)
            .and_then(|(free, regular)| validate_abp_shape(q, &poset, &free, &regular));
        body["shape"] = match shape {
            Ok(s) => {
                let loops: Vec<String> = s.free_loops.values().map(|&(_, e)| q.edge_name(e).to_string()).collect();
                text.push_str(&format!("shape: ok, free loops {{{}}}\n", loops.join(", ")));
                json!({ "ok": true, "free_loops": loops })
            }
            Err(QuiverError::ShapeViolation(vs)) => {
                code = EXIT_FAILURE;
                for v in &vs {
                    text.push_str(&format!("shape: {v}\n"));
                }
                json!({ "ok": false, "violations": vs })
            }
            Err(e) => {
                code = EXIT_FAILURE;
                text.push_str(&format!("shape: {e}\n"));
                json!({ "ok": false, "error": e.to_string() })
            }
        };
    }
    Ok((body, text, code))
}

/// `{dim, lambda, trans, rho}` with entries as element literals.
pub fn rep_to_json(alg: &PathAlgebra, r: &LinRep) -> Json {
    let show = |m: &AlgMatrix| -> Vec<Vec<String>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| alg.display(m.get(i, j))).collect()).collect()
    };
    let lambda: Vec<String> = show(r.lambda()).into_iter().flatten().collect();
    let rho: Vec<String> = show(r.rho()).into_iter().flatten().collect();
    json!({ "dim": r.dim(), "lambda": lambda, "trans": show(r.trans()), "rho": rho })
}

/// Inverse of [`rep_to_json`].
pub fn rep_from_json(q: &QAlgebra, v: &Json) -> Result<LinRep, String> {
    let ev = Evaluator::new(q);
    let entry = |x: &Json| -> Result<_, String> {
        let s = x.as_str().ok_or("entries must be strings")?;
        let e = parse_expr(s).map_err(|e| e.to_string())?;
        ev.path_element(&e).map_err(|e| e.to_string())
    };
    let list = |key: &str| -> Result<Vec<_>, String> {
        v[key].as_array().ok_or(format!("missing `{key}`"))?.iter().map(entry).collect()
    };
    let dim = v["dim"].as_u64().ok_or("missing `dim`")? as usize;
    let lambda = list("lambda")?;
    let rho = list("rho")?;
    let mut trans = Vec::new();
    for row in v["trans"].as_array().ok_or("missing `trans`")? {
        trans.push(row.as_array().ok_or("`trans` rows must be arrays")?.iter().map(entry).collect::<Result<Vec<_>, _>>()?);
    }
    let mk = |r, c, e| AlgMatrix::from_entries(r, c, e).map_err(|e| e.to_string());
    let trans = if dim == 0 { AlgMatrix::zero(0, 0) } else { AlgMatrix::from_rows(trans).map_err(|e| e.to_string())? };
    LinRep::new(mk(1, dim, lambda)?, trans, mk(dim, 1, rho)?).map_err(|e| e.to_string())
}

/// `{terms: [{ghost, coefficient}]}`, ghosts in path order.
pub fn qelement_to_json(q: &QAlgebra, x: &QElement) -> Json {
    let quiver = q.base().quiver();
    let terms: Vec<Json> = x
        .terms()
        .map(|(g, a)| json!({ "ghost": g.display(quiver), "coefficient": rep_to_json(q.base(), a) }))
        .collect();
    json!({ "terms": terms })
}

fn value_json(q: &QAlgebra, v: &Value) -> Json {
    match v {
        Value::Rational(r) => rep_to_json(q.base(), r),
        Value::Q(x) => qelement_to_json(q, x),
        _ => Json::Null,
    }
}

fn eval(file: &PathBuf, src: &str, degree: usize) -> CmdResult {
    let g = load(file)?;
    let q = algebra(&g)?;
    let expr = parse_expr(src).map_err(ExprError::from)?;
    let n = Evaluator::requested_degree(&expr).unwrap_or(degree);
    let ev = Evaluator::new(&q);
    let v = ev.eval(&expr)?;
    let nf = ev.display(&v, n);
    let mut body = json!({ "kind": v.kind(), "degree": n, "normal_form": nf });
    let data = value_json(&q, &v);
    if !data.is_null() {
        body["value"] = data;
    }
    Ok((body, nf, EXIT_OK))
}

fn matrix_rows(alg: &PathAlgebra, m: &AlgMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| alg.display(m.get(i, j))).collect()).collect()
}

fn invert(file: &PathBuf, src: &str, degree: usize) -> CmdResult {
    let g = load(file)?;
    let q = algebra(&g)?;
    let alg = q.base();
    let expr = parse_expr(src).map_err(ExprError::from)?;
    let n = Evaluator::requested_degree(&expr).unwrap_or(degree);
    let ev = Evaluator::new(&q);
    if let Expr::Matrix(..) = expr {
        let m = ev.eval_matrix(&expr)?;
        let invertible = m.is_invertible(alg).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
        if !invertible {
            let text = format!("{} is not invertible: its augmentation is singular", m.display(alg));
            return Ok((json!({ "invertible": false }), text, EXIT_FAILURE));
        }
        let inv = m.invert_eps_unit(alg, n).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
        let id = AlgMatrix::identity(alg, m.rows());
        let check = |a: &AlgMatrix, b: &AlgMatrix| a.mul_bounded(b, Some(n)).map(|p| p.agrees_mod(&id, n)).unwrap_or(false);
        let verified = check(&m, &inv) && check(&inv, &m);
        let text = format!("inverse mod degree {n}: {}\nverified: {verified}", inv.display(alg));
        let code = if verified { EXIT_OK } else { EXIT_FAILURE };
        return Ok((
            json!({ "invertible": true, "degree": n, "inverse": matrix_rows(alg, &inv), "verified": verified }),
            text,
            code,
        ));
    }
    let p = ev.path_element(&expr)?;
    let inv = invert_element(alg, &p).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
    let s = inv.expand(n);
    // the inverse lives in the corner cut out by the support of ε(p)
    let one = alg.idempotent(alg.augment(&p).components.keys().copied());
    let verified = p.mul(s.element()).truncated(n) == one && s.element().mul(&p).truncated(n) == one;
    let shown = q.display(&q.from_series(&inv), n);
    let text = format!("{shown}\nverified mod degree {n}: {verified}");
    let code = if verified { EXIT_OK } else { EXIT_FAILURE };
    Ok((
        json!({ "degree": n, "representation": rep_to_json(alg, &inv), "normal_form": shown, "verified": verified }),
        text,
        code,
    ))
}

fn names(q: &Quiver, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| q.vertex_name(v).to_string()).collect()
}

fn monoid_eq(file: &PathBuf, a: &str, b: &str, bound: SearchBound) -> CmdResult {
    let g = load(file)?;
    let q = &g.quiver;
    let parse = |s: &str| MonoidElement::parse(q, s).map_err(|e| Failure(EXIT_PARSE, e.to_string()));
    let (x, y) = (parse(a)?, parse(b)?);
    let presentation = monoid_of_graph(q);
    let verdict = mon_equal(q, &x, &y, bound);
    let (body, text, code) = match &verdict {
        MonoidVerdict::Equal { witness, steps_from_left, steps_from_right } => (
            json!({
                "verdict": "equal",
                "witness": witness.display(q),
                "steps_from_left": names(q, steps_from_left),
                "steps_from_right": names(q, steps_from_right),
            }),
            format!(
                "equal: both reach {} (left rewrites [{}], right rewrites [{}])",
                witness.display(q),
                names(q, steps_from_left).join(", "),
                names(q, steps_from_right).join(", ")
            ),
            EXIT_OK,
        ),
        MonoidVerdict::NotEqual => (json!({ "verdict": "not_equal" }), "not equal".to_string(), EXIT_FAILURE),
        MonoidVerdict::Unknown { visited } => (
            json!({ "verdict": "unknown", "visited": visited }),
            format!("unknown: bound reached after {visited} elements"),
            EXIT_FAILURE,
        ),
    };
    let mut body = body;
    body["a"] = json!(x.display(q));
    body["b"] = json!(y.display(q));
    body["bound"] = json!(bound);
    body["relations"] = json!(presentation.relations);
    Ok((body, text, code))
}

fn sigma_json(q: &QAlgebra, d: &SigmaPrimeDecomposition, text: &mut String, indent: usize) -> Json {
    let alg = q.base();
    let name = alg.poset().name(d.class);
    let pad = "  ".repeat(indent);
    text.push_str(&format!(
        "{pad}class {name}: A0 = {}, B = {}\n",
        d.top.display(alg),
        d.descending.display(alg)
    ));
    let lower: Vec<Json> = d.lower.iter().map(|k| sigma_json(q, k, text, indent + 1)).collect();
    json!({
        "class": name,
        "top": matrix_rows(alg, &d.top),
        "descending": matrix_rows(alg, &d.descending),
        "lower": lower,
    })
}

fn certificate_json(q: &QAlgebra, c: &PratCertificate, n: usize, text: &mut String, indent: usize) -> Json {
    let alg = q.base();
    let name = alg.poset().name(c.class);
    let pad = "  ".repeat(indent);
    let upper = alg.display_series(&c.upper.expand(n));
    let mixed = alg.display_series(&c.mixed.expand(n));
    text.push_str(&format!("{pad}class {name} ({:?}, depth {}): upper {upper}; mixed {mixed}\n", c.kind, c.depth));
    let children: Vec<Json> = c.children.iter().map(|k| certificate_json(q, k, n, text, indent + 1)).collect();
    json!({
        "class": name,
        "kind": c.kind,
        "depth": c.depth,
        "upper": upper,
        "mixed": mixed,
        "children": children,
    })
}

fn decompose(file: &PathBuf, src: &str, degree: usize) -> CmdResult {
    let g = load(file)?;
    let q = algebra(&g)?;
    let expr = parse_expr(src).map_err(ExprError::from)?;
    let n = Evaluator::requested_degree(&expr).unwrap_or(degree);
    let ev = Evaluator::new(&q);
    let mut text = String::new();
    if let Expr::Matrix(..) = expr {
        let m = ev.eval_matrix(&expr)?;
        let d = q.sigma_prime_decompose(&m).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
        let tree = sigma_json(&q, &d, &mut text, 0);
        let identities = d.identities_hold();
        let chain = q.check_sigma_prime_factorization(&d, n).unwrap_or(false);
        text.push_str(&format!("identities: {identities}\nfactorization mod degree {n}: {chain}\n"));
        let code = if identities && chain { EXIT_OK } else { EXIT_FAILURE };
        return Ok((
            json!({ "decomposition": tree, "identities": identities, "factorization": chain, "degree": n }),
            text,
            code,
        ));
    }
    let rep = match ev.eval(&expr)? {
        Value::Scalar(c) => LinRep::constant(q.base(), q.base().one().scale_raw(&c)),
        Value::Path(p) => LinRep::constant(q.base(), p),
        Value::Rational(r) => r,
        v => return Err(Failure(EXIT_FAILURE, format!("decompose expects a series or a matrix, got a {} value", v.kind()))),
    };
    let cert = prat_membership_certificate(q.base(), &rep, n).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
    let tree = certificate_json(&q, &cert, n, &mut text, 0);
    Ok((json!({ "certificate": tree, "degree": n }), text, EXIT_OK))
}

fn verify_cmd(file: &PathBuf, suite: Option<&str>, cfg: &RunConfig) -> CmdResult {
    if let Some(s) = suite {
        if !verify::SUITES.contains(&s) {
            return Err(Failure(EXIT_PARSE, format!("unknown suite `{s}`; expected one of {}", verify::SUITES.join(", "))));
        }
    }
    let g = load(file)?;
    let q = algebra(&g)?;
    let outcomes: Vec<SuiteOutcome> = match suite {
        Some(s) => verify::run_suite(&q, s, cfg.seed, cfg.degree, cfg.bound, Budget::default())
            .into_iter()
            .collect(),
        None => verify::run_all(&q, cfg.seed, cfg.degree, cfg.bound, Budget::default()),
    };
    let mut text = String::new();
    for o in &outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{mark} {} ({} cases)", o.suite, o.cases));
        if let Some(c) = &o.counterexample {
            text.push_str(&format!(": {c}"));
        }
        text.push('\n');
    }
    let all = outcomes.iter().all(|o| o.passed);
    let code = if all { EXIT_OK } else { EXIT_FAILURE };
    Ok((json!({ "seed": cfg.seed, "degree": cfg.degree, "suites": outcomes }), text, code))
}
