//! One text format for operators and systems: named blocks declaring the
//! geometry, then one linear equation per target component.
//!
//! ```text
//! operator pendulum {
//!     n = 1;
//!     params = [l1, l2, g];
//!     source = [x, th1, th2];
//!     target = [eq1, eq2];
//!     eq1 = d[1,1] x + (l1) d[1,1] th1 + (g) th1;
//!     eq2 = d[1,1] x + (l2) d[1,1] th2 + (g) th2;
//! }
//! ```
//!
//! `d[1,2]` is ∂₁∂₂ with 1-based, repeated indices; `d[] u` and bare `u` are
//! both the order-0 term.  Coefficients are rational literals or
//! parenthesized polynomials in the declared parameters, optionally joined
//! by `*`.  Parsing and printing are inverse on normalized blocks, so every
//! report the tool emits can be fed back in.

use std::fmt;
use std::ops::Range;

use janet::diffop::{DiffOperator, DiffPolynomial};
use janet::field::{Monomial, ParamScalar, Poly};
use num_bigint::BigInt;

/// A parsed block: the operator plus the parameter names its scalars refer
/// to (positional — parameter `i` of the operator is `params[i]`).
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSpec {
    pub name: String,
    pub params: Vec<String>,
    pub op: DiffOperator,
}

/// Syntax or semantic rejection, anchored to a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// A block whose coefficients fall outside the literal grammar (e.g. a
/// polynomial denominator) cannot be rendered back to text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot print block: {0}")]
pub struct PrintError(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if ch.is_whitespace() {
            chars.next();
            col += 1;
        } else if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let (tline, tcol) = (line, col);
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
        } else if ch.is_ascii_digit() {
            let (tline, tcol) = (line, col);
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            toks.push(Spanned { tok: Tok::Int(s), line: tline, col: tcol });
        } else if "{}[]()=;,+-*/^".contains(ch) {
            toks.push(Spanned { tok: Tok::Sym(ch), line, col });
            chars.next();
            col += 1;
        } else {
            return Err(ParseError { line, col, msg: format!("unexpected character {ch:?}") });
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    // Position reported for "unexpected end of input".
    eof_line: usize,
    eof_col: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Spanned]) -> Self {
        let (eof_line, eof_col) = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
        Parser { toks, pos: 0, eof_line, eof_col }
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Spanned> {
        self.toks.get(self.pos + 1)
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(t) => self.err_at(t.line, t.col, msg),
            None => self.err_at(self.eof_line, self.eof_col, msg),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.at_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(match self.peek() {
                Some(t) => self.err_here(format!("expected `{c}`, found {}", t.tok)),
                None => self.err_here(format!("expected `{c}`, found end of input")),
            })
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Ident(s), line, col }) => {
                let out = (s.clone(), *line, *col);
                self.bump();
                Ok(out)
            }
            Some(t) => Err(self.err_here(format!("expected {what}, found {}", t.tok))),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Int(s), line, col }) => {
                let out = (s.clone(), *line, *col);
                self.bump();
                Ok(out)
            }
            Some(t) => Err(self.err_here(format!("expected {what}, found {}", t.tok))),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    /// `[ ident, ident, ... ]` — possibly empty.
    fn ident_list(&mut self) -> Result<Vec<(String, usize, usize)>, ParseError> {
        self.expect_sym('[')?;
        let mut out = Vec::new();
        if !self.at_sym(']') {
            loop {
                out.push(self.expect_ident("an identifier")?);
                if self.at_sym(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(']')?;
        Ok(out)
    }

    /// `[ int, -int, ... ]` with optional signs — possibly empty.
    fn int_list(&mut self) -> Result<Vec<BigInt>, ParseError> {
        self.expect_sym('[')?;
        let mut out = Vec::new();
        if !self.at_sym(']') {
            loop {
                let neg = if self.at_sym('-') {
                    self.bump();
                    true
                } else {
                    false
                };
                let (digits, line, col) = self.expect_int("an integer")?;
                let v: BigInt = digits
                    .parse()
                    .map_err(|_| self.err_at(line, col, "invalid integer literal"))?;
                out.push(if neg { -v } else { v });
                if self.at_sym(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(']')?;
        Ok(out)
    }
}

/// Everything declared in a block before the equations are resolved.
struct BlockHeader {
    name: String,
    name_line: usize,
    name_col: usize,
    n: Option<usize>,
    params: Vec<String>,
    source: Option<Vec<String>>,
    target: Option<Vec<String>>,
    wsource: Option<Vec<BigInt>>,
    wtarget: Option<Vec<BigInt>>,
    // target label, its position, token range of the right-hand side.
    equations: Vec<(String, usize, usize, Range<usize>)>,
}

/// Parse a whole file into its blocks.  At least one block is required.
pub fn parse(text: &str) -> Result<Vec<SourceSpec>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let mut specs = Vec::new();
    while p.peek().is_some() {
        specs.push(block(&mut p)?);
    }
    if specs.is_empty() {
        return Err(ParseError { line: 1, col: 1, msg: "expected at least one `operator` block".into() });
    }
    Ok(specs)
}

fn block(p: &mut Parser) -> Result<SourceSpec, ParseError> {
    let (kw, line, col) = p.expect_ident("`operator`")?;
    if kw != "operator" {
        return Err(p.err_at(line, col, format!("expected `operator`, found `{kw}`")));
    }
    let (name, name_line, name_col) = p.expect_ident("an operator name")?;
    p.expect_sym('{')?;
    let mut h = BlockHeader {
        name,
        name_line,
        name_col,
        n: None,
        params: Vec::new(),
        source: None,
        target: None,
        wsource: None,
        wtarget: None,
        equations: Vec::new(),
    };
    while !p.at_sym('}') {
        stmt(p, &mut h)?;
    }
    p.expect_sym('}')?;
    resolve(p, h)
}

fn stmt(p: &mut Parser, h: &mut BlockHeader) -> Result<(), ParseError> {
    let (head, line, col) = p.expect_ident("a declaration or an equation")?;
    match head.as_str() {
        "n" => {
            if h.n.is_some() {
                return Err(p.err_at(line, col, "duplicate `n` declaration"));
            }
            p.expect_sym('=')?;
            let (digits, dline, dcol) = p.expect_int("a positive integer")?;
            let v: usize = digits
                .parse()
                .map_err(|_| p.err_at(dline, dcol, "`n` out of range"))?;
            if v == 0 {
                return Err(p.err_at(dline, dcol, "`n` must be positive"));
            }
            p.expect_sym(';')?;
            h.n = Some(v);
        }
        "params" => {
            if !h.params.is_empty() {
                return Err(p.err_at(line, col, "duplicate `params` declaration"));
            }
            p.expect_sym('=')?;
            let list = p.ident_list()?;
            p.expect_sym(';')?;
            for (s, l, c) in &list {
                if h.params.iter().any(|q| q == s) {
                    return Err(p.err_at(*l, *c, format!("duplicate parameter `{s}`")));
                }
                h.params.push(s.clone());
            }
        }
        "source" | "target" => {
            let slot = if head == "source" { &mut h.source } else { &mut h.target };
            if slot.is_some() {
                return Err(p.err_at(line, col, format!("duplicate `{head}` declaration")));
            }
            p.expect_sym('=')?;
            let list = p.ident_list()?;
            p.expect_sym(';')?;
            if list.is_empty() {
                return Err(p.err_at(line, col, format!("`{head}` list must be nonempty")));
            }
            let mut labels = Vec::new();
            for (s, l, c) in &list {
                if labels.iter().any(|q| q == s) {
                    return Err(p.err_at(*l, *c, format!("duplicate label `{s}`")));
                }
                labels.push(s.clone());
            }
            *slot = Some(labels);
        }
        "weights" => {
            let (side, sline, scol) = p.expect_ident("`source` or `target`")?;
            let slot = match side.as_str() {
                "source" => &mut h.wsource,
                "target" => &mut h.wtarget,
                _ => {
                    return Err(p.err_at(sline, scol, format!("expected `source` or `target` after `weights`, found `{side}`")));
                }
            };
            if slot.is_some() {
                return Err(p.err_at(line, col, format!("duplicate `weights {side}` declaration")));
            }
            p.expect_sym('=')?;
            let list = p.int_list()?;
            p.expect_sym(';')?;
            *slot = Some(list);
        }
        _ => {
            // An equation: IDENT = expr ;  The right-hand side is captured as
            // a token range and resolved once all declarations are known, so
            // declaration order inside the block does not matter.
            if h.equations.iter().any(|(t, ..)| *t == head) {
                return Err(p.err_at(line, col, format!("duplicate equation for `{head}`")));
            }
            p.expect_sym('=')?;
            let start = p.pos;
            while !p.at_sym(';') {
                if p.bump().is_none() {
                    return Err(p.err_here("unterminated equation (missing `;`)"));
                }
            }
            let range = start..p.pos;
            p.expect_sym(';')?;
            if range.is_empty() {
                return Err(p.err_at(line, col, format!("empty right-hand side for `{head}`")));
            }
            h.equations.push((head, line, col, range));
        }
    }
    Ok(())
}

fn resolve(p: &Parser, h: BlockHeader) -> Result<SourceSpec, ParseError> {
    let missing = |what: &str| ParseError {
        line: h.name_line,
        col: h.name_col,
        msg: format!("block `{}` is missing its `{what}` declaration", h.name),
    };
    let n = h.n.ok_or_else(|| missing("n"))?;
    let source = h.source.clone().ok_or_else(|| missing("source"))?;
    let target = h.target.clone().ok_or_else(|| missing("target"))?;
    let np = h.params.len();

    let weights = |raw: Option<Vec<BigInt>>, side: &str, len: usize| -> Result<Vec<ParamScalar>, ParseError> {
        match raw {
            None => Ok(janet::diffop::unit_weights(np, len)),
            Some(list) => {
                if list.len() != len {
                    return Err(ParseError {
                        line: h.name_line,
                        col: h.name_col,
                        msg: format!(
                            "`weights {side}` has {} entries but `{side}` declares {len} components",
                            list.len()
                        ),
                    });
                }
                let mut out = Vec::new();
                for w in list {
                    if w == BigInt::from(0) {
                        return Err(ParseError {
                            line: h.name_line,
                            col: h.name_col,
                            msg: format!("`weights {side}` entries must be nonzero"),
                        });
                    }
                    out.push(ParamScalar::from_int(np, w));
                }
                Ok(out)
            }
        }
    };
    let sw = weights(h.wsource, "source", source.len())?;
    let tw = weights(h.wtarget, "target", target.len())?;

    let zero_row = || vec![DiffPolynomial::from_term(n, vec![0; n], ParamScalar::zero(np)); source.len()];
    let mut rows: Vec<Vec<DiffPolynomial>> = (0..target.len()).map(|_| zero_row()).collect();
    for (tname, tline, tcol, range) in &h.equations {
        let i = target
            .iter()
            .position(|t| t == tname)
            .ok_or_else(|| p.err_at(*tline, *tcol, format!("undeclared target label `{tname}`")))?;
        let mut sub = Parser::new(&p.toks[range.clone()]);
        rows[i] = expr(&mut sub, n, &h.params, &source)?;
        if let Some(t) = sub.peek() {
            return Err(sub.err_at(t.line, t.col, format!("expected `+`, `-`, or `;`, found {}", t.tok)));
        }
    }

    let op = DiffOperator::with_weights(n, np, rows, source, target, sw, tw);
    Ok(SourceSpec { name: h.name, params: h.params, op })
}

/// `expr := [sign] term (("+"|"-") term)*` accumulated into one row.
fn expr(
    p: &mut Parser,
    n: usize,
    params: &[String],
    source: &[String],
) -> Result<Vec<DiffPolynomial>, ParseError> {
    let np = params.len();
    let mut row: Vec<DiffPolynomial> =
        (0..source.len()).map(|_| DiffPolynomial::from_term(n, vec![0; n], ParamScalar::zero(np))).collect();
    let mut first = true;
    loop {
        let neg = if p.at_sym('-') {
            p.bump();
            true
        } else {
            if p.at_sym('+') {
                if first {
                    return Err(p.err_here("expected a term, found `+`"));
                }
                p.bump();
            }
            false
        };
        let (j, poly) = term(p, n, params, source)?;
        let poly = if neg { poly.neg() } else { poly };
        row[j] = row[j].add(&poly);
        first = false;
        if !(p.at_sym('+') || p.at_sym('-')) {
            break;
        }
    }
    Ok(row)
}

/// `term := coef? deriv? IDENT` → (source index, contribution).
fn term(
    p: &mut Parser,
    n: usize,
    params: &[String],
    source: &[String],
) -> Result<(usize, DiffPolynomial), ParseError> {
    let np = params.len();
    let is_coef_start = |p: &Parser| {
        matches!(p.peek(), Some(Spanned { tok: Tok::Int(_), .. }) | Some(Spanned { tok: Tok::Sym('('), .. }))
    };
    let mut coef: Option<ParamScalar> = None;
    while is_coef_start(p) {
        let atom = match p.peek() {
            Some(Spanned { tok: Tok::Int(_), .. }) => rat_literal(p, np)?,
            _ => paren_poly(p, params)?,
        };
        coef = Some(match coef {
            None => atom,
            Some(c) => c.mul(&atom),
        });
        if p.at_sym('*') {
            // Either another factor of a `coef * coef` product or the `*`
            // of the printed `c*d[...]` form; the lookahead decides.
            p.bump();
            if !is_coef_start(p) {
                break;
            }
        } else {
            break;
        }
    }

    let mut mu = vec![0u32; n];
    if matches!(p.peek(), Some(Spanned { tok: Tok::Ident(s), .. }) if s == "d")
        && matches!(p.peek2(), Some(Spanned { tok: Tok::Sym('['), .. }))
    {
        p.bump();
        p.expect_sym('[')?;
        if !p.at_sym(']') {
            loop {
                let (digits, line, col) = p.expect_int("a derivative index")?;
                let idx: usize = digits
                    .parse()
                    .map_err(|_| p.err_at(line, col, "invalid derivative index"))?;
                if idx == 0 || idx > n {
                    return Err(p.err_at(line, col, format!("derivative index {idx} out of range 1..={n}")));
                }
                mu[idx - 1] += 1;
                if p.at_sym(',') {
                    p.bump();
                } else {
                    break;
                }
            }
        }
        p.expect_sym(']')?;
    }

    let (label, line, col) = p.expect_ident("a source label")?;
    let j = source
        .iter()
        .position(|s| *s == label)
        .ok_or_else(|| p.err_at(line, col, format!("undeclared source label `{label}`")))?;
    let c = coef.unwrap_or_else(|| ParamScalar::one(np));
    Ok((j, DiffPolynomial::from_term(n, mu, c)))
}

/// `INT ("/" INT)?` as an exact rational over `np` parameters.
fn rat_literal(p: &mut Parser, np: usize) -> Result<ParamScalar, ParseError> {
    let (digits, line, col) = p.expect_int("an integer")?;
    let num: BigInt = digits
        .parse()
        .map_err(|_| p.err_at(line, col, "invalid integer literal"))?;
    if p.at_sym('/') {
        p.bump();
        let (ddigits, dline, dcol) = p.expect_int("a denominator")?;
        let den: BigInt = ddigits
            .parse()
            .map_err(|_| p.err_at(dline, dcol, "invalid integer literal"))?;
        if den == BigInt::from(0) {
            return Err(p.err_at(dline, dcol, "zero denominator"));
        }
        Ok(ParamScalar::from_rat(np, num, den))
    } else {
        Ok(ParamScalar::from_rat(np, num, 1))
    }
}

/// `"(" [sign] pterm (("+"|"-") pterm)* ")"` over the declared parameters.
fn paren_poly(p: &mut Parser, params: &[String]) -> Result<ParamScalar, ParseError> {
    let np = params.len();
    p.expect_sym('(')?;
    let mut acc = ParamScalar::zero(np);
    let mut first = true;
    loop {
        let neg = if p.at_sym('-') {
            p.bump();
            true
        } else {
            if p.at_sym('+') {
                if first {
                    return Err(p.err_here("expected a term, found `+`"));
                }
                p.bump();
            } else if !first {
                break;
            }
            false
        };
        let mut prod = pfactor(p, params)?;
        while p.at_sym('*') {
            p.bump();
            prod = prod.mul(&pfactor(p, params)?);
        }
        acc = acc.add(&if neg { prod.neg() } else { prod });
        first = false;
    }
    p.expect_sym(')')?;
    Ok(acc)
}

/// `INT ("/" INT)? | IDENT ("^" INT)?` inside a coefficient polynomial.
fn pfactor(p: &mut Parser, params: &[String]) -> Result<ParamScalar, ParseError> {
    let np = params.len();
    match p.peek() {
        Some(Spanned { tok: Tok::Int(_), .. }) => rat_literal(p, np),
        Some(Spanned { tok: Tok::Ident(_), .. }) => {
            let (name, line, col) = p.expect_ident("a parameter")?;
            let i = params
                .iter()
                .position(|q| *q == name)
                .ok_or_else(|| p.err_at(line, col, format!("undeclared parameter `{name}`")))?;
            let base = ParamScalar::from_poly(Poly::var(np, i));
            if p.at_sym('^') {
                p.bump();
                let (digits, eline, ecol) = p.expect_int("an exponent")?;
                let e: u32 = digits
                    .parse()
                    .map_err(|_| p.err_at(eline, ecol, "exponent out of range"))?;
                let mut acc = ParamScalar::one(np);
                for _ in 0..e {
                    acc = acc.mul(&base);
                }
                Ok(acc)
            } else {
                Ok(base)
            }
        }
        Some(t) => Err(p.err_here(format!("expected an integer or parameter, found {}", t.tok))),
        None => Err(p.err_here("expected an integer or parameter, found end of input")),
    }
}

/// Render a block back to text.  Inverse to [`parse`] on normalized specs —
/// guaranteed for every operator whose coefficients are rationals or
/// denominator-free polynomials and whose weights are integers.
pub fn print(spec: &SourceSpec) -> Result<String, PrintError> {
    let op = &spec.op;
    let names: Vec<&str> = spec.params.iter().map(|s| s.as_str()).collect();
    let mut out = String::new();
    out.push_str(&format!("operator {} {{\n", spec.name));
    out.push_str(&format!("    n = {};\n", op.n()));
    if !spec.params.is_empty() {
        out.push_str(&format!("    params = [{}];\n", spec.params.join(", ")));
    }
    out.push_str(&format!("    source = [{}];\n", op.source_labels().join(", ")));
    out.push_str(&format!("    target = [{}];\n", op.target_labels().join(", ")));
    if let Some(ws) = weight_line(op.source_weights())? {
        out.push_str(&format!("    weights source = [{ws}];\n"));
    }
    if let Some(wt) = weight_line(op.target_weights())? {
        out.push_str(&format!("    weights target = [{wt}];\n"));
    }
    for (i, tlabel) in op.target_labels().iter().enumerate() {
        if op.row(i).iter().all(|e| e.is_zero()) {
            continue;
        }
        out.push_str(&format!("    {} = {};\n", tlabel, expr_string(op, i, &names)?));
    }
    out.push_str("}\n");
    Ok(out)
}

/// Integer weight list, or None when every weight is 1 (stmt omitted).
fn weight_line(weights: &[ParamScalar]) -> Result<Option<String>, PrintError> {
    let mut vals = Vec::new();
    for w in weights {
        match w.as_rational() {
            Some((p, q)) if q == BigInt::from(1) => vals.push(p),
            _ => return Err(PrintError("weights must be integer literals".into())),
        }
    }
    if vals.iter().all(|v| *v == BigInt::from(1)) {
        return Ok(None);
    }
    Ok(Some(vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
}

fn expr_string(op: &DiffOperator, i: usize, names: &[&str]) -> Result<String, PrintError> {
    let mut pieces: Vec<(bool, String)> = Vec::new();
    for (j, label) in op.source_labels().iter().enumerate() {
        let terms: Vec<_> = op.entry(i, j).terms().collect();
        for (m, c) in terms.into_iter().rev() {
            let (neg, coef) = coef_string(c, names)?;
            let mut s = String::new();
            if let Some(cs) = coef {
                s.push_str(&cs);
                s.push(' ');
            }
            if let Some(ds) = deriv_string(m) {
                s.push_str(&ds);
                s.push(' ');
            }
            s.push_str(label);
            pieces.push((neg, s));
        }
    }
    let mut out = String::new();
    for (k, (neg, s)) in pieces.iter().enumerate() {
        if k == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(s);
    }
    Ok(out)
}

/// Sign and magnitude of a coefficient in literal form; None magnitude for
/// unit coefficients (the bare derivative or label carries the term).
fn coef_string(c: &ParamScalar, names: &[&str]) -> Result<(bool, Option<String>), PrintError> {
    if let Some((p, q)) = c.as_rational() {
        let neg = p < BigInt::from(0);
        let ap = if neg { -p } else { p };
        if q == BigInt::from(1) {
            if ap == BigInt::from(1) {
                return Ok((neg, None));
            }
            return Ok((neg, Some(ap.to_string())));
        }
        return Ok((neg, Some(format!("{ap}/{q}"))));
    }
    if c.den().is_one() {
        return Ok((false, Some(format!("({})", c.num().display(names)))));
    }
    Err(PrintError(format!("coefficient {} is outside the literal grammar", c.display(names))))
}

fn deriv_string(m: &Monomial) -> Option<String> {
    if m.0.iter().all(|&e| e == 0) {
        return None;
    }
    let mut idx = Vec::new();
    for (axis, &e) in m.0.iter().enumerate() {
        for _ in 0..e {
            idx.push((axis + 1).to_string());
        }
    }
    Some(format!("d[{}]", idx.join(",")))
}
