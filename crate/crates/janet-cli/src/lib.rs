//! Command-line driver: load an operator (file or registry), bind parameters
//! at the boundary, run one analysis, and print a text or JSON report.
//!
//! Exit codes: 0 on success, 1 on errors (parse, unknown entries, engine
//! rejections), 2 when an iteration cap or order bound ran out before the
//! analysis could conclude.

pub mod dsl;

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use janet::catalog;
use janet::diffop::DiffOperator;
use janet::field::{GenericityCondition, ParamScalar};
use janet::jets::delta::SymbolFamily;
use janet::jets::{pp, regularize, tabular, JetSystem};
use janet::sequences::{
    cc_chain, compatibility_operator, fundamental_diagram, hybrid_dims, janet_sequence,
    resolution_report, spencer_dims, CCResult, SequenceReport,
};
use janet::duality::{double_duality, minimum_parametrization};
use janet::JanetError;

/// Regularization retries used by every subcommand; matches the defaults
/// the library test suites pin their oracles to.
const ATTEMPTS: usize = 40;

#[derive(Parser)]
#[command(
    name = "janet",
    version,
    about = "symbolic workbench for linear systems of PDEs with parameters",
    color = clap::ColorChoice::Never
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Completion to involution: verdicts, characters, and the round log
    Analyze(TargetArgs),
    /// Generating compatibility conditions, optionally a whole chain
    Cc(CcArgs),
    /// Janet / Spencer / full-jet dimension rows and the diagram checks
    Sequences(TargetArgs),
    /// Formal adjoint of the operator
    Adjoint(TargetArgs),
    /// Double-duality test: parametrization candidate and torsion
    Duality(DualityArgs),
    /// Smallest potential subset that still parametrizes the system
    Minparam(MinparamArgs),
    /// Registry-wide consistency checks
    Crosschecks(CrosschecksArgs),
}

#[derive(Args)]
struct Common {
    /// Emit the stable JSON schema instead of text
    #[arg(long)]
    json: bool,
    /// Seed for the pseudo-random candidate coordinate changes
    #[arg(long)]
    seed: Option<u64>,
    /// Bind a parameter before any analysis: `a=0`, `l1=l2`, `g=981/100`
    #[arg(long, value_delimiter = ',')]
    specialize: Vec<String>,
    /// Integer change of independent variables, e.g. `x2=x1+x2,x3=x2+x3`
    #[arg(long)]
    change: Option<String>,
    /// Bound on prolongation/projection rounds before giving up
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct TargetArgs {
    /// Operator file (first block is used) or `catalog:NAME`
    target: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CcArgs {
    /// Operator file (first block is used) or `catalog:NAME`
    target: String,
    /// Highest generator order the sweep may reach
    #[arg(long, default_value_t = 8)]
    max_order: u32,
    /// Iterate: compatibility conditions of the compatibility conditions, L steps
    #[arg(long)]
    chain: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DualityArgs {
    /// Operator file (first block is used) or `catalog:NAME`
    target: String,
    /// Highest generator order for both compatibility sweeps
    #[arg(long, default_value_t = 8)]
    max_order: u32,
    /// Highest order tried when certifying a torsion generator
    #[arg(long, default_value_t = 8)]
    certificate_cap: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct MinparamArgs {
    /// Operator file (first block is used) or `catalog:NAME`
    target: String,
    /// Highest generator order for the parametrization checks
    #[arg(long, default_value_t = 8)]
    max_order: u32,
    /// Try exactly these potential columns (0-based, ascending CSV)
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CrosschecksArgs {
    /// Emit the stable JSON schema instead of text
    #[arg(long)]
    json: bool,
}

struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn new(code: i32, msg: impl Into<String>) -> CliError {
        CliError { code, msg: msg.into() }
    }
}

fn engine_err(e: JanetError) -> CliError {
    let code = match &e {
        JanetError::CapExceeded { .. } => 2,
        _ => 1,
    };
    CliError { code, msg: e.to_string() }
}

/// Everything a subcommand produces; `emit` renders one of the two forms.
struct Report {
    code: i32,
    text: String,
    cc: Value,
    dims: Value,
    tabular: Value,
    torsion: Value,
    conditions: Vec<GenericityCondition>,
    names: Vec<String>,
}

impl Report {
    fn new(names: Vec<String>) -> Report {
        Report {
            code: 0,
            text: String::new(),
            cc: Value::Null,
            dims: Value::Null,
            tabular: Value::Null,
            torsion: Value::Null,
            conditions: Vec::new(),
            names,
        }
    }

    fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(|s| s.as_str()).collect()
    }

    fn assume(&mut self, more: &[GenericityCondition]) {
        for c in more {
            if !self.conditions.contains(c) {
                self.conditions.push(c.clone());
            }
        }
    }
}

/// Run the CLI on `args` (including argv[0]), writing every report and
/// error to `out`; returns the process exit code.
pub fn run<W: Write>(args: impl IntoIterator<Item = String>, out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (res, json) = match &cli.cmd {
        Cmd::Analyze(a) => (analyze(a), a.common.json),
        Cmd::Cc(a) => (cc(a), a.common.json),
        Cmd::Sequences(a) => (sequences(a), a.common.json),
        Cmd::Adjoint(a) => (adjoint(a), a.common.json),
        Cmd::Duality(a) => (duality(a), a.common.json),
        Cmd::Minparam(a) => (minparam(a), a.common.json),
        Cmd::Crosschecks(a) => (crosschecks(a), a.json),
    };
    match res {
        Ok(rep) => emit(out, &rep, json),
        Err(e) => {
            let _ = writeln!(out, "error: {}", e.msg);
            e.code
        }
    }
}

fn emit<W: Write>(out: &mut W, rep: &Report, json: bool) -> i32 {
    if json {
        let names = rep.name_refs();
        let conds: Vec<String> = rep.conditions.iter().map(|c| c.display(&names)).collect();
        let v = json!({
            "cc": rep.cc,
            "conditions": conds,
            "dims": rep.dims,
            "tabular": rep.tabular,
            "torsion": rep.torsion,
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        let _ = write!(out, "{}", rep.text);
        let names = rep.name_refs();
        if rep.conditions.is_empty() {
            let _ = writeln!(out, "conditions: none");
        } else {
            let list: Vec<String> =
                rep.conditions.iter().map(|c| format!("{} != 0", c.display(&names))).collect();
            let _ = writeln!(out, "conditions: {}", list.join(", "));
        }
    }
    rep.code
}

// ---------------------------------------------------------------- loading

struct Loaded {
    name: String,
    params: Vec<String>,
    op: DiffOperator,
}

fn load(spec: &str) -> Result<Loaded, CliError> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        let op = catalog::make(name).map_err(engine_err)?;
        let params = catalog::param_names(name).iter().map(|s| s.to_string()).collect();
        Ok(Loaded { name: name.to_string(), params, op })
    } else {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::new(1, format!("cannot read `{spec}`: {e}")))?;
        let blocks = dsl::parse(&text).map_err(|e| CliError::new(1, format!("{spec}: {e}")))?;
        let b = blocks.into_iter().next().expect("parse yields at least one block");
        Ok(Loaded { name: b.name, params: b.params, op: b.op })
    }
}

/// Load the target and apply every `Common` binding — specializations and
/// coordinate changes happen here, before any rank is computed.
fn prepare(target: &str, common: &Common) -> Result<Loaded, CliError> {
    if let Some(seed) = common.seed {
        regularize::set_seed(seed);
    }
    let mut loaded = load(target)?;
    for s in &common.specialize {
        apply_specialization(&mut loaded, s)?;
    }
    if let Some(change) = &common.change {
        let mat = parse_change(change, loaded.op.n())?;
        let np = loaded.op.nparams();
        let rows: Vec<Vec<ParamScalar>> = mat
            .iter()
            .map(|r| r.iter().map(|&v| ParamScalar::from_int(np, v)).collect())
            .collect();
        loaded.op = loaded.op.change_variables(&rows).map_err(engine_err)?;
    }
    Ok(loaded)
}

fn apply_specialization(loaded: &mut Loaded, s: &str) -> Result<(), CliError> {
    let (lhs, rhs) = s
        .split_once('=')
        .ok_or_else(|| CliError::new(1, format!("--specialize: expected `name=value`, got `{s}`")))?;
    let (lhs, rhs) = (lhs.trim(), rhs.trim());
    let i = loaded
        .params
        .iter()
        .position(|p| p == lhs)
        .ok_or_else(|| CliError::new(1, format!("--specialize: unknown parameter `{lhs}`")))?;
    if let Some(j) = loaded.params.iter().position(|p| p == rhs) {
        loaded.op = loaded.op.identify_params(i, j).map_err(engine_err)?;
        return Ok(());
    }
    let (num, den) = parse_rational(rhs)
        .ok_or_else(|| CliError::new(1, format!("--specialize: `{rhs}` is neither a parameter nor a rational")))?;
    let mut binding: Vec<Option<(BigInt, BigInt)>> = vec![None; loaded.op.nparams()];
    binding[i] = Some((num, den));
    loaded.op = loaded.op.specialize(&binding).map_err(engine_err)?;
    Ok(())
}

fn parse_rational(s: &str) -> Option<(BigInt, BigInt)> {
    match s.split_once('/') {
        Some((n, d)) => {
            let num: BigInt = n.trim().parse().ok()?;
            let den: BigInt = d.trim().parse().ok()?;
            if den == BigInt::from(0) {
                return None;
            }
            Some((num, den))
        }
        None => Some((s.parse().ok()?, BigInt::from(1))),
    }
}

/// `x2=x1+x2,x3=2*x2-x3` → integer matrix rows over the given variables,
/// starting from the identity.  Row `i` lists the old-variable coefficients
/// of the new variable `x(i+1)`.
fn parse_change(s: &str, n: usize) -> Result<Vec<Vec<i64>>, CliError> {
    let bad = |assign: &str, why: &str| CliError::new(1, format!("--change: {why} in `{assign}`"));
    let mut mat: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for assign in s.split(',') {
        let (lhs, rhs) = assign
            .split_once('=')
            .ok_or_else(|| bad(assign, "expected `xI=...`"))?;
        let i = axis(lhs.trim(), n).ok_or_else(|| bad(assign, "bad variable on the left"))?;
        let chars: Vec<char> = rhs.chars().filter(|c| !c.is_whitespace()).collect();
        let mut row = vec![0i64; n];
        let mut pos = 0;
        let mut first = true;
        while pos < chars.len() {
            let sign = match chars[pos] {
                '+' => {
                    pos += 1;
                    1
                }
                '-' => {
                    pos += 1;
                    -1
                }
                _ if first => 1,
                _ => return Err(bad(assign, "expected `+` or `-`")),
            };
            first = false;
            let dstart = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let coef: i64 = if pos > dstart {
                let v = chars[dstart..pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad(assign, "coefficient out of range"))?;
                if pos < chars.len() && chars[pos] == '*' {
                    pos += 1;
                }
                v
            } else {
                1
            };
            if pos >= chars.len() || chars[pos] != 'x' {
                return Err(bad(assign, "expected a variable like `x2`"));
            }
            pos += 1;
            let vstart = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let name: String = chars[vstart..pos].iter().collect();
            let k: usize = name.parse().map_err(|_| bad(assign, "bad variable index"))?;
            if k == 0 || k > n {
                return Err(bad(assign, "variable index out of range"));
            }
            row[k - 1] += sign * coef;
        }
        mat[i] = row;
    }
    Ok(mat)
}

fn axis(tok: &str, n: usize) -> Option<usize> {
    let k: usize = tok.strip_prefix('x')?.parse().ok()?;
    if k == 0 || k > n {
        return None;
    }
    Some(k - 1)
}

// ---------------------------------------------------------------- encoding

/// Operator rows as nested arrays: `rows[i][j]` lists the terms of the
/// `(target i, source j)` entry, each term `[coefficient, mu_1, …, mu_n]`
/// with the coefficient as an exact display string.
fn rows_json(op: &DiffOperator, names: &[&str]) -> Value {
    let mut rows = Vec::new();
    for i in 0..op.num_targets() {
        let mut row = Vec::new();
        for j in 0..op.num_sources() {
            row.push(poly_json(op.entry(i, j), names));
        }
        rows.push(Value::Array(row));
    }
    Value::Array(rows)
}

fn poly_json(p: &janet::diffop::DiffPolynomial, names: &[&str]) -> Value {
    let terms: Vec<_> = p.terms().collect();
    let mut out = Vec::new();
    for (m, c) in terms.into_iter().rev() {
        let mut t = vec![Value::String(c.display(names))];
        t.extend(m.0.iter().map(|&e| Value::from(e)));
        out.push(Value::Array(t));
    }
    Value::Array(out)
}

fn cc_json(r: &CCResult, names: &[&str]) -> Value {
    let per_order: serde_json::Map<String, Value> = r
        .per_order_counts
        .iter()
        .map(|(k, v)| (k.to_string(), Value::from(*v)))
        .collect();
    json!({
        "orders": r.generator_orders,
        "rows": rows_json(&r.operator, names),
        "saturated": r.saturated,
        "saturation_order": r.saturation_order,
        "per_order": per_order,
    })
}

fn seq_json(r: &SequenceReport) -> Value {
    json!({ "dims": r.dims, "orders": r.orders, "euler_poincare": r.euler_poincare })
}

fn op_lines(op: &DiffOperator, names: &[&str], indent: &str) -> String {
    let mut s = String::new();
    for line in op.display(names) {
        s.push_str(indent);
        s.push_str(&line);
        s.push('\n');
    }
    s
}

fn dims_list(v: &[usize]) -> String {
    let strs: Vec<String> = v.iter().map(|d| d.to_string()).collect();
    format!("({})", strs.join(", "))
}

fn cc_text(r: &CCResult, names: &[&str], heading: &str) -> String {
    let mut s = String::new();
    let orders: Vec<String> = r.generator_orders.iter().map(|o| o.to_string()).collect();
    s.push_str(&format!(
        "{heading}: {} generator{} (orders: [{}])\n",
        r.generator_orders.len(),
        if r.generator_orders.len() == 1 { "" } else { "s" },
        orders.join(", ")
    ));
    s.push_str(&format!(
        "saturated: {} (first quiet round at order {})\n",
        if r.saturated { "yes" } else { "no — raise --max-order" },
        r.saturation_order
    ));
    s.push_str(&op_lines(&r.operator, names, "  "));
    s
}

// ------------------------------------------------------------ subcommands

fn analyze(a: &TargetArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let names = loaded.params.iter().map(|s| s.as_str()).collect::<Vec<_>>();
    let op = &loaded.op;
    let sys = JetSystem::from_operator(op);
    rep.assume(sys.conditions());

    let fam = SymbolFamily::of(&sys);
    let given_ok = tabular::cartan_test(&fam, sys.order());

    let completion = match a.common.cap {
        Some(cap) => pp::complete_capped(&sys, ATTEMPTS, cap),
        None => pp::complete(&sys, ATTEMPTS),
    }
    .map_err(engine_err)?;
    rep.assume(&completion.conditions);
    let endpoint = &completion.endpoint;
    let q = endpoint.order();

    let efam = SymbolFamily::of(endpoint);
    let reg = regularize::regularize_family(&efam, q, ATTEMPTS).map_err(engine_err)?;
    let beta_asc = tabular::symbol_beta(&reg, q);
    let alpha = tabular::alpha_from_beta(op.n(), op.num_sources(), q, &beta_asc);
    let beta_desc: Vec<usize> = beta_asc.iter().rev().cloned().collect();

    let mut t = String::new();
    t.push_str(&format!(
        "operator {} (n = {}, {} unknowns -> {} equations, order {})\n",
        loaded.name,
        op.n(),
        op.num_sources(),
        op.num_targets(),
        op.order()
    ));
    t.push_str(&format!(
        "symbol passes the Cartan test in the given coordinates: {}\n",
        if given_ok { "yes" } else { "no" }
    ));
    t.push_str(&format!(
        "completion: {} prolongation{}, {} projection{}; involutive at order {}\n",
        completion.prolongations,
        if completion.prolongations == 1 { "" } else { "s" },
        completion.projections,
        if completion.projections == 1 { "" } else { "s" },
        q
    ));
    for line in &completion.log {
        t.push_str(&format!("  {line}\n"));
    }
    t.push_str(&format!("dim R_{q} = {}\n", endpoint.dim()));
    t.push_str(&format!("characters beta = {} (classes n..1)\n", dims_list(&beta_desc)));
    t.push_str(&format!("multiplicities alpha = {} (classes 1..n)\n", dims_list(&alpha)));
    rep.text = t;

    rep.tabular = json!({
        "n": op.n(),
        "unknowns": op.num_sources(),
        "order": q,
        "dim": endpoint.dim(),
        "beta": beta_desc,
        "alpha": alpha,
        "cartan_test_as_given": given_ok,
        "completion": {
            "prolongations": completion.prolongations,
            "projections": completion.projections,
            "log": completion.log,
        },
    });
    rep.dims = json!({ "jet": endpoint.dim(), "order": q });
    Ok(rep)
}

fn cc(a: &CcArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let names = loaded.params.iter().map(|s| s.as_str()).collect::<Vec<_>>();

    match a.chain {
        None => {
            let r = compatibility_operator(&loaded.op, a.max_order, ATTEMPTS).map_err(engine_err)?;
            rep.assume(&r.conditions);
            rep.text = cc_text(&r, &names, &format!("compatibility conditions of {}", loaded.name));
            rep.cc = cc_json(&r, &names);
            if !r.saturated {
                rep.code = 2;
            }
        }
        Some(len) => {
            let chain = cc_chain(&loaded.op, len, a.max_order, ATTEMPTS).map_err(engine_err)?;
            let resolution = resolution_report(&loaded.op, &chain);
            let mut t = String::new();
            let mut members = Vec::new();
            for (k, r) in chain.iter().enumerate() {
                rep.assume(&r.conditions);
                t.push_str(&cc_text(&r.clone(), &names, &format!("step {} of the chain", k + 1)));
                members.push(cc_json(r, &names));
                if !r.saturated {
                    rep.code = 2;
                }
            }
            t.push_str(&format!(
                "resolution dims {} with connecting orders {:?}; euler characteristic {}\n",
                dims_list(&resolution.dims),
                resolution.orders,
                resolution.euler_poincare
            ));
            rep.text = t;
            rep.cc = json!({ "chain": members, "resolution": seq_json(&resolution) });
            rep.dims = seq_json(&resolution);
        }
    }
    Ok(rep)
}

fn sequences(a: &TargetArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let op = &loaded.op;
    let sys = JetSystem::from_operator(op);
    rep.assume(sys.conditions());
    let completion = match a.common.cap {
        Some(cap) => pp::complete_capped(&sys, ATTEMPTS, cap),
        None => pp::complete(&sys, ATTEMPTS),
    }
    .map_err(engine_err)?;
    rep.assume(&completion.conditions);
    let endpoint = &completion.endpoint;
    let q = endpoint.order();
    let janet = janet_sequence(endpoint, ATTEMPTS).map_err(engine_err)?;
    let spencer = spencer_dims(endpoint, ATTEMPTS).map_err(engine_err)?;
    let hybrid = hybrid_dims(op.n(), op.num_sources(), q);
    let diagram = fundamental_diagram(endpoint, ATTEMPTS).map_err(engine_err)?;

    let mut t = String::new();
    t.push_str(&format!("operator {} is involutive at order {q}\n", loaded.name));
    t.push_str(&format!(
        "janet row:    {} orders {:?}, euler characteristic {}\n",
        dims_list(&janet.dims),
        janet.orders,
        janet.euler_poincare
    ));
    t.push_str(&format!(
        "spencer row:  {} orders {:?}, euler characteristic {}\n",
        dims_list(&spencer.dims),
        spencer.orders,
        spencer.euler_poincare
    ));
    t.push_str(&format!(
        "full-jet row: {} orders {:?}, euler characteristic {}\n",
        dims_list(&hybrid.dims),
        hybrid.orders,
        hybrid.euler_poincare
    ));
    t.push_str(&format!(
        "diagram rows: spencer {} / full-jet {} / janet {}\n",
        dims_list(&diagram.spencer),
        dims_list(&diagram.hybrid),
        dims_list(&diagram.janet)
    ));
    t.push_str(&format!(
        "additivity (full-jet = spencer + janet): {}\n",
        if diagram.additive { "yes" } else { "NO" }
    ));
    t.push_str(&format!("jet-level exactness defects: {:?}\n", diagram.jet_defects));
    t.push_str(&format!("connecting-sequence defects: {:?}\n", diagram.connecting_defects));
    rep.text = t;

    rep.dims = json!({
        "janet": seq_json(&janet),
        "spencer": seq_json(&spencer),
        "full_jet": seq_json(&hybrid),
        "diagram": {
            "spencer": diagram.spencer,
            "full_jet": diagram.hybrid,
            "janet": diagram.janet,
            "janet_quotient": diagram.janet_quotient,
            "additive": diagram.additive,
            "jet_defects": diagram.jet_defects,
            "symbol_cokernel": diagram.symbol_cokernel_dims,
            "jet_cokernel": diagram.jet_cokernel_dims,
            "connecting_defects": diagram.connecting_defects,
        },
    });
    Ok(rep)
}

fn adjoint(a: &TargetArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let names = loaded.params.iter().map(|s| s.as_str()).collect::<Vec<_>>();
    let ad = loaded.op.adjoint();
    let mut t = String::new();
    t.push_str(&format!(
        "formal adjoint of {} ({} components -> {} rows, order {})\n",
        loaded.name,
        ad.num_sources(),
        ad.num_targets(),
        ad.order()
    ));
    t.push_str(&op_lines(&ad, &names, "  "));
    rep.text = t;
    rep.dims = json!({
        "rows": rows_json(&ad, &names),
        "order": ad.order(),
        "source": ad.source_labels(),
        "target": ad.target_labels(),
    });
    Ok(rep)
}

fn duality(a: &DualityArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let names = loaded.params.iter().map(|s| s.as_str()).collect::<Vec<_>>();
    let r = double_duality(&loaded.op, a.max_order, a.certificate_cap, ATTEMPTS).map_err(engine_err)?;
    rep.assume(&r.conditions);

    let mut t = String::new();
    t.push_str(&format!("double duality of {}\n", loaded.name));
    t.push_str(&cc_text(&r.adjoint_cc, &names, "adjoint compatibility conditions"));
    t.push_str(&format!(
        "parametrization candidate: {} potential{}, order {}\n",
        r.parametrization.num_sources(),
        if r.parametrization.num_sources() == 1 { "" } else { "s" },
        r.parametrization.order()
    ));
    t.push_str(&op_lines(&r.parametrization, &names, "  "));
    t.push_str(&cc_text(&r.recovered, &names, "recovered presentation"));
    t.push_str(&format!(
        "torsion-free: {}{}\n",
        if r.torsion_free { "yes" } else { "no" },
        if r.partial { " (inconclusive: a sweep hit --max-order)" } else { "" }
    ));
    let mut gens = Vec::new();
    for (k, g) in r.torsion.iter().enumerate() {
        let row: Vec<String> = g.class_row.iter().map(|p| p.display(&names)).collect();
        let cert = match (&g.certificate, g.certificate_order) {
            (Some(c), Some(o)) => format!("{} (order {o})", c.display(&names)),
            _ => "none found under --certificate-cap".to_string(),
        };
        t.push_str(&format!("  torsion generator {}: [{}]; certificate: {}\n", k + 1, row.join(", "), cert));
        gens.push(json!({
            "row": g.class_row.iter().map(|p| poly_json(p, &names)).collect::<Vec<_>>(),
            "certificate": g.certificate.as_ref().map(|c| poly_json(c, &names)).unwrap_or(Value::Null),
            "certificate_order": g.certificate_order,
        }));
    }
    if r.torsion_free {
        t.push_str(&format!(
            "the system is parametrized by the candidate above ({} potentials)\n",
            r.parametrization.num_sources()
        ));
    }
    rep.text = t;
    rep.cc = cc_json(&r.adjoint_cc, &names);
    rep.torsion = json!({
        "torsionFree": r.torsion_free,
        "partial": r.partial,
        "generators": gens,
    });
    rep.dims = json!({
        "parametrization": { "potentials": r.parametrization.num_sources(), "order": r.parametrization.order() },
        "recovered_orders": r.recovered.generator_orders,
    });
    if r.partial {
        rep.code = 2;
    }
    Ok(rep)
}

fn minparam(a: &MinparamArgs) -> Result<Report, CliError> {
    let loaded = prepare(&a.target, &a.common)?;
    let mut rep = Report::new(loaded.params.clone());
    let names = loaded.params.iter().map(|s| s.as_str()).collect::<Vec<_>>();
    let dd = double_duality(&loaded.op, a.max_order, a.max_order, ATTEMPTS).map_err(engine_err)?;
    rep.assume(&dd.conditions);
    if !dd.torsion_free {
        return Err(CliError::new(
            1,
            format!(
                "{} has torsion ({} generator{}); no parametrization exists, so no minimum one",
                loaded.name,
                dd.torsion.len(),
                if dd.torsion.len() == 1 { "" } else { "s" }
            ),
        ));
    }
    let subset = if a.subset.is_empty() { None } else { Some(a.subset.as_slice()) };
    let mp = minimum_parametrization(&loaded.op, &dd.parametrization, subset, a.max_order, ATTEMPTS)
        .map_err(engine_err)?;
    rep.assume(&mp.conditions);

    let mut t = String::new();
    t.push_str(&format!(
        "minimum parametrization of {}: {} of {} potentials kept, columns {:?}\n",
        loaded.name,
        mp.columns.len(),
        dd.parametrization.num_sources(),
        mp.columns
    ));
    t.push_str(&op_lines(&mp.operator, &names, "  "));
    rep.text = t;
    rep.dims = json!({
        "columns": mp.columns,
        "potentials_total": dd.parametrization.num_sources(),
        "order": mp.operator.order(),
        "rows": rows_json(&mp.operator, &names),
    });
    Ok(rep)
}

fn crosschecks(a: &CrosschecksArgs) -> Result<Report, CliError> {
    let _ = a;
    let checks = catalog::crosschecks().map_err(engine_err)?;
    let mut rep = Report::new(Vec::new());
    let mut t = String::new();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for c in &checks {
        all_ok &= c.pass;
        t.push_str(&format!("{} {} — {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        rows.push(json!({ "name": c.name, "pass": c.pass, "detail": c.detail }));
    }
    t.push_str(&format!(
        "{} of {} checks passed\n",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    ));
    rep.text = t;
    rep.dims = json!({ "checks": rows });
    rep.code = if all_ok { 0 } else { 1 };
    Ok(rep)
}
