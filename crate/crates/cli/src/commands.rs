use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use splice_core::convert::{maximal, maximal_lenient, to_resolution_traced, to_splice};
use splice_core::equation::{
    chain_conductors, cover_diagram, monomial_curve_system, plane_curve, splice_system, CharPairs, PolynomialSystem,
};
use splice_core::format::{emit_maximal_sdf, emit_rgf, emit_sdf, parse_rgf, parse_sdf};
use splice_core::invariant::{check_cic, check_splice_additivity, invariants};
use splice_core::semigroup::{ci_presentation, rooted_generators, semigroup_condition, SemigroupPresentation};
use splice_core::{Error, NumericSemigroup, ResolutionGraph, SpliceDiagram};

use crate::config::Settings;
use crate::Verb;

/// A failure destined for stderr and the exit status.
#[derive(Debug)]
pub struct Failure {
    code: &'static str,
    message: String,
    location: String,
    exit: u8,
}

impl Failure {
    fn new(code: &'static str, exit: u8, message: impl Into<String>, location: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            location: location.into(),
            exit,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", 3, message, "command line")
    }

    pub fn parse(message: impl Into<String>, location: String) -> Self {
        Self::new("parse", 3, message, location)
    }

    pub fn io(message: String, location: String) -> Self {
        Self::new("io", 3, message, location)
    }

    fn from_core(e: Error, source: &str) -> Self {
        match e {
            Error::Parse { line, column, message } => Self::new("parse", 3, message, format!("{source}:{line}:{column}")),
            Error::Invalid(m) => Self::new("invalid", 1, m, source),
            Error::SemigroupCondition { location, detail } => {
                Self::new("semigroup", 2, detail, format!("{source}:{location}"))
            }
            Error::Bound(m) => Self::new("bound", 4, m, source),
            Error::UnsupportedTopology(m) => Self::new("unsupported", 1, m, source),
            Error::Internal(m) => Self::new("internal", 5, m, source),
        }
    }

    pub fn line(&self) -> String {
        let flat = |s: &str| s.replace('\n', " ");
        format!("{}: {}: {}", self.code, flat(&self.message), flat(&self.location))
    }

    pub fn exit_code(&self) -> u8 {
        self.exit
    }
}

/// What a command produced: both renderings, plus a failure to report
/// after the output has been written.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub failure: Option<Failure>,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            failure: None,
        }
    }
}

type Res<T> = Result<T, Failure>;

fn core<T>(r: splice_core::Result<T>, source: &str) -> Res<T> {
    r.map_err(|e| Failure::from_core(e, source))
}

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => json!(x.to_string()),
    }
}

fn bigs(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big).collect())
}

fn opt_big(x: &Option<BigInt>) -> Value {
    x.as_ref().map(big).unwrap_or(Value::Null)
}

fn rational(x: &BigRational) -> Value {
    json!([big(x.numer()), big(x.denom())])
}

fn opt_text(x: &Option<BigInt>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "n/a".into())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Relative paths fall back to the configured fixture directory.
fn locate(path: &Path, settings: &Settings) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match &settings.fixtures {
        Some(dir) if dir.join(path).exists() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn read(path: &Path, settings: &Settings) -> Res<(String, String)> {
    let p = locate(path, settings);
    let name = path.display().to_string();
    let text = std::fs::read_to_string(&p).map_err(|e| Failure::io(e.to_string(), name.clone()))?;
    Ok((text, name))
}

fn is_rgf(path: &Path) -> bool {
    path.extension().is_some_and(|x| x.eq_ignore_ascii_case("rgf"))
}

fn load_sdf(path: &Path, settings: &Settings) -> Res<(SpliceDiagram, String)> {
    let (text, name) = read(path, settings)?;
    Ok((core(parse_sdf(&text), &name)?, name))
}

fn load_rgf(path: &Path, settings: &Settings) -> Res<(ResolutionGraph, String)> {
    let (text, name) = read(path, settings)?;
    Ok((core(parse_rgf(&text), &name)?, name))
}

/// Parses and validates a splice diagram, failing with exit 1 when
/// invalid.
fn load_valid(path: &Path, settings: &Settings) -> Res<(SpliceDiagram, String)> {
    let (d, name) = load_sdf(path, settings)?;
    let report = d.validate(settings.strict);
    if !report.is_valid() {
        return Err(Failure::new("invalid", 1, report.to_string(), name));
    }
    Ok((d, name))
}

fn leaf(d: &SpliceDiagram, selector: &str, source: &str) -> Res<usize> {
    d.find_leaf(selector)
        .ok_or_else(|| Failure::new("usage", 3, format!("no leaf '{selector}'"), source.to_string()))
}

fn edge(d: &SpliceDiagram, selector: &str, source: &str) -> Res<usize> {
    let digits = selector.strip_prefix('e').unwrap_or(selector);
    match digits.parse::<usize>() {
        Ok(e) if e < d.edges().len() => Ok(e),
        _ => Err(Failure::new("usage", 3, format!("no edge '{selector}'"), source.to_string())),
    }
}

fn leaf_label(d: &SpliceDiagram, v: usize) -> String {
    d.vertex(v).label.clone().unwrap_or_else(|| format!("v{v}"))
}

pub fn dispatch(verb: &Verb, s: &Settings) -> Res<Output> {
    match verb {
        Verb::Validate { input } => validate(input, s),
        Verb::ToResolution { input } => to_resolution_cmd(input, s),
        Verb::ToSplice { input } => to_splice_cmd(input, s),
        Verb::Maximal { input } => maximal_cmd(input, s),
        Verb::Invariants { input } => invariants_cmd(input, s),
        Verb::Semigroup { input, root, generators } => semigroup_cmd(input.as_deref(), root.as_deref(), generators, s),
        Verb::Equations { input } => equations_cmd(input, s),
        Verb::Curve { input, root } => curve_cmd(input, root, s),
        Verb::PlaneCurve { pairs, n } => plane_curve_cmd(pairs, *n),
        Verb::Splice { first, second, leaves } => splice_cmd(first, second, leaves, s),
        Verb::Cut { input, edge } => cut_cmd(input, edge, s),
        Verb::CheckCic { input } => check_cic_cmd(input, s),
        Verb::CheckSpliceAdditivity { input, edge } => additivity_cmd(input, edge.as_deref(), s),
    }
}

fn validate(input: &Path, s: &Settings) -> Res<Output> {
    let (valid, detail, name) = if is_rgf(input) {
        let (g, name) = load_rgf(input, s)?;
        match g.validate() {
            Ok(()) => (true, "valid".to_string(), name),
            Err(e) => (false, e.to_string(), name),
        }
    } else {
        let (d, name) = load_sdf(input, s)?;
        let report = d.validate(s.strict);
        (report.is_valid(), report.to_string(), name)
    };
    let mut out = Output::ok(with_newline(detail.clone()), json!({ "valid": valid, "detail": detail }));
    if !valid {
        out.failure = Some(Failure::new("invalid", 1, detail, name));
    }
    Ok(out)
}

fn graph_json(g: &ResolutionGraph) -> Value {
    let vertices: Vec<Value> = (0..g.len())
        .map(|v| json!({ "id": g.ids()[v], "euler": big(g.euler(v)) }))
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|[a, b]| json!([g.ids()[*a], g.ids()[*b]]))
        .collect();
    json!({ "vertices": vertices, "edges": edges, "det_negA": big(&g.det_neg_a()) })
}

fn to_resolution_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let (g, _) = core(to_resolution_traced(&d, s.strict), &name)?;
    Ok(Output::ok(with_newline(emit_rgf(&g)), graph_json(&g)))
}

fn to_splice_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let (g, name) = load_rgf(input, s)?;
    let d = core(to_splice(&g), &name)?;
    let text = emit_sdf(&d);
    Ok(Output::ok(with_newline(text.clone()), json!({ "sdf": text })))
}

fn maximal_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let m = if is_rgf(input) {
        let (g, name) = load_rgf(input, s)?;
        core(g.validate(), &name)?;
        g.maximal_diagram()
    } else {
        let (d, name) = load_valid(input, s)?;
        core(if s.strict { maximal(&d) } else { maximal_lenient(&d) }, &name)?
    };
    let edges: Vec<Value> = m
        .edges()
        .iter()
        .map(|e| json!({ "ends": e.ends, "weights": bigs(&e.weights) }))
        .collect();
    let text = emit_maximal_sdf(&m);
    Ok(Output::ok(with_newline(text.clone()), json!({ "sdf": text, "edges": edges })))
}

fn invariants_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let r = core(invariants(&d, s.strict, s.bound), &name)?;
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|n| json!({ "id": format!("v{}", n.node), "k_v": big(&n.k_v) }))
        .collect();
    let leaves: Vec<Value> = r
        .leaves
        .iter()
        .map(|l| {
            json!({
                "label": l.label,
                "milnor_mu": big(&l.milnor_mu),
                "generators": bigs(&l.generators),
                "conductor": l.conductor,
            })
        })
        .collect();
    let value = json!({
        "valid": r.valid,
        "semigroup_condition": r.semigroup_condition,
        "C": big(&r.c),
        "c1sq": big(&r.c1sq),
        "c2": big(&r.c2),
        "det_negA": big(&r.det_neg_a),
        "pg": opt_big(&r.pg),
        "mu": opt_big(&r.mu),
        "signature": opt_big(&r.signature),
        "casson": opt_big(&r.casson),
        "nodes": nodes,
        "leaves": leaves,
        "notes": r.notes,
    });

    let mut t = String::new();
    let _ = writeln!(t, "valid: {}", r.valid);
    let _ = writeln!(t, "semigroup condition: {}", r.semigroup_condition);
    let _ = writeln!(t, "C: {}", r.c);
    let _ = writeln!(t, "c1^2: {}", r.c1sq);
    let _ = writeln!(t, "c2: {}", r.c2);
    let _ = writeln!(t, "det(-A): {}", r.det_neg_a);
    let _ = writeln!(t, "pg: {}", opt_text(&r.pg));
    let _ = writeln!(t, "mu: {}", opt_text(&r.mu));
    let _ = writeln!(t, "signature: {}", opt_text(&r.signature));
    let _ = writeln!(t, "casson: {}", opt_text(&r.casson));
    for n in &r.nodes {
        let _ = writeln!(t, "node v{}: k_v = {}", n.node, n.k_v);
    }
    for l in &r.leaves {
        let gens: Vec<String> = l.generators.iter().map(|g| g.to_string()).collect();
        let cond = l.conductor.map(|c| c.to_string()).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(t, "leaf {}: mu = {}, generators <{}>, conductor {}", l.label, l.milnor_mu, gens.join(","), cond);
    }
    for note in &r.notes {
        let _ = writeln!(t, "note: {note}");
    }
    Ok(Output::ok(t, value))
}

fn presentation_json(p: &SemigroupPresentation) -> Value {
    let rels: Vec<Value> = p.relations.iter().map(|(l, r)| json!([l, r])).collect();
    json!({ "generators": p.generators, "relations": rels, "text": p.to_string() })
}

fn semigroup_cmd(input: Option<&Path>, root: Option<&str>, generators: &[u64], s: &Settings) -> Res<Output> {
    let (sg, presentation) = match (input, generators.is_empty()) {
        (Some(path), true) => {
            let (d, name) = load_valid(path, s)?;
            let sel = root.ok_or_else(|| Failure::usage("semigroup of a diagram needs --root"))?;
            let l = leaf(&d, sel, &name)?;
            let t = core(d.root_at_leaf(l), &name)?;
            let sg = core(NumericSemigroup::from_bigints(&rooted_generators(&t)), &name)?;
            (sg, ci_presentation(&t).ok())
        }
        (None, false) => {
            let sg = core(NumericSemigroup::new(generators), "--generators")?;
            (sg, None)
        }
        _ => return Err(Failure::usage("give either a diagram with --root or --generators")),
    };
    let gens = sg.minimal_generators();
    let gaps = sg.gaps();
    let value = json!({
        "generators": gens,
        "conductor": sg.conductor(),
        "delta": sg.delta(),
        "gaps": gaps,
        "symmetric": sg.is_symmetric(),
        "presentation": presentation.as_ref().map(presentation_json).unwrap_or(Value::Null),
    });
    let list = |xs: &[u64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let mut t = String::new();
    let _ = writeln!(t, "generators: <{}>", list(&gens));
    let _ = writeln!(t, "conductor: {}", sg.conductor());
    let _ = writeln!(t, "delta: {}", sg.delta());
    let _ = writeln!(t, "gaps: {{{}}}", list(&gaps));
    let _ = writeln!(t, "symmetric: {}", sg.is_symmetric());
    if let Some(p) = &presentation {
        let _ = writeln!(t, "presentation: {p}");
    }
    Ok(Output::ok(t, value))
}

fn system_json(sys: &PolynomialSystem) -> Value {
    let equations: Vec<Value> = sys
        .equations
        .iter()
        .map(|eq| {
            let terms: Vec<Value> = eq
                .terms
                .iter()
                .map(|t| json!({ "coeff": rational(&t.coeff), "exps": t.exps }))
                .collect();
            json!({ "node": eq.node.map(|v| format!("v{v}")), "terms": terms })
        })
        .collect();
    json!({ "variables": sys.variables, "equations": equations })
}

fn equations_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let report = core(semigroup_condition(&d), &name)?;
    if let Some(bad) = report.first_failure() {
        let gens: Vec<String> = bad.generators.iter().map(|g| g.to_string()).collect();
        return Err(Failure::new(
            "semigroup",
            2,
            format!("{} is not in the semigroup generated by {}", bad.weight, gens.join(", ")),
            format!("{name}:v{}:e{}", bad.node, bad.edge),
        ));
    }
    let sys = core(splice_system(&d), &name)?;
    let mut value = system_json(&sys);
    let leaves: Vec<Value> = sys.leaves.iter().map(|&w| json!(leaf_label(&d, w))).collect();
    value["leaves"] = Value::Array(leaves);
    Ok(Output::ok(with_newline(sys.to_string()), value))
}

fn curve_cmd(input: &Path, root: &str, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let l = leaf(&d, root, &name)?;
    let t = core(d.root_at_leaf(l), &name)?;
    let sys = core(monomial_curve_system(&t), &name)?;
    let gens = rooted_generators(&t);
    let mut text = String::new();
    for (v, g) in sys.variables.iter().zip(&gens) {
        let _ = writeln!(text, "{v} = t^{g}");
    }
    text.push_str(&with_newline(sys.to_string()));
    let mut value = system_json(&sys);
    value["parametrization"] = bigs(&gens);
    Ok(Output::ok(text, value))
}

fn parse_pairs(text: &str) -> Res<Vec<(u64, u64)>> {
    let bad = || Failure::parse(format!("expected pairs like (3,2),(13,2), found '{text}'"), "PAIRS".into());
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact.strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
    inner
        .split("),(")
        .map(|pair| {
            let (p, q) = pair.split_once(',').ok_or_else(bad)?;
            Ok((p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn plane_curve_cmd(pairs: &str, n: Option<u64>) -> Res<Output> {
    let cp = core(CharPairs::new(parse_pairs(pairs)?, n), "PAIRS")?;
    let f = core(plane_curve(&cp, None), "PAIRS")?;
    let conductors = chain_conductors(&cp);
    let cover = match n {
        Some(_) => Some(emit_sdf(&core(cover_diagram(&cp), "PAIRS")?)),
        None => None,
    };
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|(c, a, b)| json!({ "coeff": rational(c), "exps": [a, b] }))
        .collect();
    let value = json!({
        "f": f.to_string(),
        "terms": terms,
        "conductors": bigs(&conductors),
        "cover": cover,
    });
    let mut t = String::new();
    let _ = writeln!(t, "f = {f}");
    let cs: Vec<String> = conductors.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(t, "conductors: {}", cs.join(", "));
    if let Some(c) = &cover {
        let _ = writeln!(t, "cover: {c}");
    }
    Ok(Output::ok(t, value))
}

fn splice_cmd(first: &Path, second: &Path, leaves: &[String], s: &Settings) -> Res<Output> {
    let [l1, l2] = leaves else {
        return Err(Failure::usage("splice needs exactly two --leaf selectors"));
    };
    let (d1, n1) = load_valid(first, s)?;
    let (d2, n2) = load_valid(second, s)?;
    let v1 = leaf(&d1, l1, &n1)?;
    let v2 = leaf(&d2, l2, &n2)?;
    let d = core(SpliceDiagram::splice(&d1, v1, &d2, v2), &n1)?;
    let text = emit_sdf(&d);
    Ok(Output::ok(with_newline(text.clone()), json!({ "sdf": text })))
}

fn cut_cmd(input: &Path, selector: &str, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let e = edge(&d, selector, &name)?;
    let cut = core(d.cut(e), &name)?;
    let (left, right) = (emit_sdf(&cut.left), emit_sdf(&cut.right));
    Ok(Output::ok(
        format!("{left}\n{right}\n"),
        json!({ "edge": format!("e{e}"), "left": left, "right": right }),
    ))
}

fn check_cic_cmd(input: &Path, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let v = core(check_cic(&d, s.bound), &name)?;
    let identities: Vec<Value> = v
        .identities
        .iter()
        .map(|i| json!({ "name": i.name, "lhs": rational(&i.lhs), "rhs": rational(&i.rhs), "holds": i.holds() }))
        .collect();
    let value = json!({
        "pg": big(&v.pg),
        "C": big(&v.c),
        "mu": big(&v.mu),
        "signature": big(&v.signature),
        "casson": big(&v.casson),
        "identities": identities,
        "holds": v.holds(),
        "flags": v.flags,
    });
    let mut t = String::new();
    let _ = writeln!(t, "pg: {}\nC: {}\nmu: {}\nsignature: {}\ncasson: {}", v.pg, v.c, v.mu, v.signature, v.casson);
    for i in &v.identities {
        let _ = writeln!(t, "{} {}: {} = {}", if i.holds() { "ok" } else { "FAIL" }, i.name, i.lhs, i.rhs);
    }
    for f in &v.flags {
        let _ = writeln!(t, "note: {f}");
    }
    let mut out = Output::ok(t, value);
    if let Some(bad) = v.identities.iter().find(|i| !i.holds()) {
        out.failure = Some(Failure::new("internal", 5, format!("identity fails: {}", bad.name), name));
    }
    Ok(out)
}

fn additivity_cmd(input: &Path, selector: Option<&str>, s: &Settings) -> Res<Output> {
    let (d, name) = load_valid(input, s)?;
    let edges = match selector {
        Some(sel) => vec![edge(&d, sel, &name)?],
        None => d.node_node_edges(),
    };
    let mut t = String::new();
    let mut rows = Vec::new();
    let mut failed = None;
    for e in edges {
        let v = core(check_splice_additivity(&d, e), &name)?;
        let _ = writeln!(
            t,
            "{} e{}: C - C1 - C2 = {} - {} - {} = {}, -2 b1 b2 = -2*{}*{} = {}",
            if v.holds() { "ok" } else { "FAIL" },
            e,
            v.c,
            v.c_left,
            v.c_right,
            v.lhs(),
            v.b1_left,
            v.b1_right,
            v.rhs()
        );
        for f in &v.flags {
            let _ = writeln!(t, "note: {f}");
        }
        if !v.holds() && failed.is_none() {
            failed = Some(e);
        }
        rows.push(json!({
            "edge": format!("e{e}"),
            "C": big(&v.c),
            "C_left": big(&v.c_left),
            "C_right": big(&v.c_right),
            "b1_left": big(&v.b1_left),
            "b1_right": big(&v.b1_right),
            "lhs": big(&v.lhs()),
            "rhs": big(&v.rhs()),
            "holds": v.holds(),
            "flags": v.flags,
        }));
    }
    if rows.is_empty() {
        t.push_str("no node-node edges\n");
    }
    let mut out = Output::ok(t, json!({ "edges": rows }));
    out.failure = failed.map(|e| Failure::new("internal", 5, format!("additivity fails at e{e}"), name));
    Ok(out)
}
