//! Line-oriented input language: patch/metric/form/section declarations
//! followed by commands. Every error carries a line and column.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use fncalc::forms::ConstMetric;
use fncalc::linalg::Mat;
use fncalc::poly::{JetPoly, PatchSplit, Point, Rational};
use fncalc::vdata::NormalValuedForm;
use fncalc::{MultiIndex, ScalarForm, VectorForm};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(char),
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Arrow => "`->`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex_line(text: &str, line: usize) -> PResult<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = BigInt::from_str(&digits).expect("digit run");
            out.push(Spanned {
                tok: Tok::Int(n),
                line,
                col,
            });
            continue;
        }
        if c == '-' && i + 1 < chars.len() && chars[i + 1] == '>' {
            out.push(Spanned {
                tok: Tok::Arrow,
                line,
                col,
            });
            i += 2;
            continue;
        }
        if "()[]|;=^*+-/:".contains(c) {
            out.push(Spanned {
                tok: Tok::Punct(c),
                line,
                col,
            });
            i += 1;
            continue;
        }
        return Err(ParseError {
            line,
            col,
            msg: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

/// Cursor over one line's tokens.
struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn new(toks: Vec<Spanned>, line: usize, end_col: usize) -> Cursor {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.line, self.end_col),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn next(&mut self, what: &str) -> PResult<Tok> {
        match self.toks.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s.tok.clone())
            }
            None => self.err(format!("expected {what}, found end of line")),
        }
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        match self.next(&format!("`{c}`"))? {
            Tok::Punct(p) if p == c => Ok(()),
            other => {
                self.pos -= 1;
                self.err(format!("expected `{c}`, found {}", other.describe()))
            }
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        match self.next(&format!("`{kw}`"))? {
            Tok::Ident(s) if s == kw => Ok(()),
            other => {
                self.pos -= 1;
                self.err(format!("expected `{kw}`, found {}", other.describe()))
            }
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.next(what)? {
            Tok::Ident(s) => Ok(s),
            other => {
                self.pos -= 1;
                self.err(format!("expected {what}, found {}", other.describe()))
            }
        }
    }

    fn uint(&mut self, what: &str) -> PResult<usize> {
        match self.next(what)? {
            Tok::Int(n) => match usize::try_from(&n) {
                Ok(v) => Ok(v),
                Err(_) => {
                    self.pos -= 1;
                    self.err(format!("{what} out of range"))
                }
            },
            other => {
                self.pos -= 1;
                self.err(format!("expected {what}, found {}", other.describe()))
            }
        }
    }

    /// Rational literal: `-? INT (/ INT)?`.
    fn rational(&mut self) -> PResult<Rational> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Punct('-')) {
            self.pos += 1;
            neg = true;
        }
        let numer = match self.next("rational literal")? {
            Tok::Int(n) => n,
            other => {
                self.pos -= 1;
                return self.err(format!(
                    "expected rational literal, found {}",
                    other.describe()
                ));
            }
        };
        let denom = if self.peek() == Some(&Tok::Punct('/')) {
            self.pos += 1;
            match self.next("denominator")? {
                Tok::Int(n) => {
                    if n == BigInt::from(0) {
                        self.pos -= 1;
                        return self.err("zero denominator");
                    }
                    n
                }
                other => {
                    self.pos -= 1;
                    return self.err(format!("expected denominator, found {}", other.describe()));
                }
            }
        } else {
            BigInt::from(1)
        };
        let r = Rational::new(numer, denom);
        Ok(if neg { -r } else { r })
    }

    /// Vector literal: `( r r ... )`.
    fn vector(&mut self) -> PResult<Vec<Rational>> {
        self.expect_punct('(')?;
        let mut out = Vec::new();
        while self.peek() != Some(&Tok::Punct(')')) {
            if self.peek().is_none() {
                return self.err("unterminated vector literal");
            }
            out.push(self.rational()?);
        }
        self.expect_punct(')')?;
        Ok(out)
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!(
                "trailing input: {}",
                self.toks[self.pos].tok.describe()
            ))
        }
    }
}

/// Recursive-descent polynomial parser over the current patch variables.
fn parse_poly(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<JetPoly> {
    parse_poly_sum(cur, split)
}

fn parse_poly_sum(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<JetPoly> {
    let mut acc = parse_poly_product(cur, split)?;
    loop {
        match cur.peek() {
            Some(Tok::Punct('+')) => {
                cur.pos += 1;
                let rhs = parse_poly_product(cur, split)?;
                acc = acc.add(&rhs).expect("same split");
            }
            Some(Tok::Punct('-')) => {
                cur.pos += 1;
                let rhs = parse_poly_product(cur, split)?;
                acc = acc.sub(&rhs).expect("same split");
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_poly_product(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<JetPoly> {
    let mut acc = parse_poly_power(cur, split)?;
    while cur.peek() == Some(&Tok::Punct('*')) {
        cur.pos += 1;
        let rhs = parse_poly_power(cur, split)?;
        acc = acc.mul(&rhs).expect("same split");
    }
    Ok(acc)
}

fn parse_poly_power(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<JetPoly> {
    // unary minus binds looser than `^`: -x^2 means -(x^2)
    if cur.peek() == Some(&Tok::Punct('-')) {
        cur.pos += 1;
        return Ok(parse_poly_power(cur, split)?.neg());
    }
    let base = parse_poly_atom(cur, split)?;
    if cur.peek() == Some(&Tok::Punct('^')) {
        cur.pos += 1;
        let e = cur.uint("exponent")?;
        return Ok(base.pow(e as u32));
    }
    Ok(base)
}

fn parse_poly_atom(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<JetPoly> {
    match cur.peek() {
        Some(Tok::Punct('(')) => {
            cur.pos += 1;
            let inner = parse_poly_sum(cur, split)?;
            cur.expect_punct(')')?;
            Ok(inner)
        }
        Some(Tok::Int(_)) => {
            let r = cur.rational()?;
            Ok(JetPoly::constant(split, r))
        }
        Some(Tok::Ident(name)) => {
            let name = name.clone();
            match split.var_index(&name) {
                Ok(idx) => {
                    cur.pos += 1;
                    Ok(JetPoly::var(split, idx))
                }
                Err(_) => cur.err(format!("unknown variable `{name}`")),
            }
        }
        _ => cur.err("expected polynomial"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Metric(ConstMetric),
    SForm(ScalarForm),
    VForm(VectorForm),
    Section(NormalValuedForm),
    Frame(Vec<Vec<Rational>>),
    Point(Point),
    Vector(Vec<Rational>),
    FSeries(Vec<String>),
}

impl Decl {
    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Metric(_) => "metric",
            Decl::SForm(_) => "sform",
            Decl::VForm(_) => "vform",
            Decl::Section(_) => "section",
            Decl::Frame(_) => "frame",
            Decl::Point(_) => "point",
            Decl::Vector(_) => "vector",
            Decl::FSeries(_) => "fseries",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    FnBracket { k: String, l: String },
    Hat { phi: String, metric: String },
    SquareZero { k: String },
    VdataValidate { delta: String, samples: usize },
    Ell { delta: String, args: Vec<String> },
    Ell1Matrix { delta: String, d_bound: usize },
    Symbol { delta: String, point: String, xi: String },
    FPsi { delta: String, series: String, order: usize },
    McResidual { delta: String, series: String, order: usize },
    McSolve { delta: String, s1: String, order: usize, d_bound: usize },
    PlaneCheck { psi: String, point: String, frame: String },
    Cousin { phi: String, metric: String, point: String, frame: String, normal: String },
    Hl { phi: String, psi_e: String, frame: String, c: Rational },
    Plie { delta: String, xi: String, kmax: usize },
    Fixture { name: String },
}

/// A verifiable identity pinned inside a fixture file.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `[K, K]^FN = 0` for a declared tangent-valued form.
    SquareZero { k: String },
    /// `[hat phi, hat phi]^FN = 0`.
    SquareZeroHat { phi: String, metric: String },
    /// `phi(v_1, ..., v_k) = value` at the origin.
    Value { phi: String, value: Rational, vectors: Vec<Vec<Rational>> },
    /// The frame spans a Psi-invariant plane at the origin.
    Plane { psi: String, vectors: Vec<Vec<Rational>> },
    /// Structural V-data axioms for delta: square-zero and P(delta) = 0.
    Vdata { delta: String },
    /// First-cousin values all vanish on the given frame and normal.
    Cousin { phi: String, metric: String, normal: Vec<Rational>, vectors: Vec<Vec<Rational>> },
    /// Harvey-Lawson residual with the given constant vanishes on the frame.
    Hl { phi: String, psi_e: String, c: Rational, vectors: Vec<Vec<Rational>> },
}

impl Check {
    /// The identity named when the check fails (fail-closed loading).
    pub fn identity(&self) -> String {
        match self {
            Check::SquareZero { k } => format!("square-zero {k}"),
            Check::SquareZeroHat { phi, .. } => format!("square-zero-hat {phi}"),
            Check::Value { phi, value, .. } => format!("value {phi} = {value}"),
            Check::Plane { psi, .. } => format!("plane {psi}"),
            Check::Vdata { delta } => format!("vdata {delta}"),
            Check::Cousin { phi, .. } => format!("cousin {phi}"),
            Check::Hl { phi, .. } => format!("hl {phi}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    /// Absent only for documents consisting purely of `fixture` commands.
    pub split: Option<Arc<PatchSplit>>,
    pub decls: Vec<(String, Decl)>,
    pub commands: Vec<Command>,
    pub checks: Vec<Check>,
}

impl Document {
    pub fn lookup(&self, name: &str) -> Option<&Decl> {
        self.decls
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
    }
}

pub fn parse_document(text: &str) -> PResult<Document> {
    let mut split: Option<Arc<PatchSplit>> = None;
    let mut decls: Vec<(String, Decl)> = Vec::new();
    let mut commands = Vec::new();
    let mut checks = Vec::new();
    let mut names: BTreeMap<String, ()> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = lex_line(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;
        let mut cur = Cursor::new(toks, line_no, end_col);
        let head = cur.ident("directive")?;
        if head == "patch" {
            if split.is_some() {
                return cur.err("duplicate patch declaration");
            }
            split = Some(parse_patch(&mut cur)?);
            continue;
        }
        match head.as_str() {
            "metric" | "sform" | "vform" | "section" | "frame" | "point" | "vector"
            | "fseries" => {
                let sp = match &split {
                    Some(s) => s.clone(),
                    None => return cur.err("a `patch` declaration must come first"),
                };
                let name = cur.ident("name")?;
                if names.contains_key(&name) {
                    return cur.err(format!("duplicate name `{name}`"));
                }
                let sform_deg = if head == "sform" {
                    cur.expect_keyword("deg")?;
                    Some(cur.uint("degree")?)
                } else {
                    None
                };
                cur.expect_punct('=')?;
                let decl = match head.as_str() {
                    "metric" => parse_metric(&mut cur, &sp)?,
                    "sform" => parse_sform(&mut cur, &sp, sform_deg.expect("parsed above"))?,
                    "vform" => parse_vform(&mut cur, &sp)?,
                    "section" => parse_section(&mut cur, &sp)?,
                    "frame" => {
                        let mut vs = Vec::new();
                        while !cur.at_end() {
                            vs.push(cur.vector()?);
                        }
                        if vs.is_empty() {
                            return cur.err("frame needs at least one vector");
                        }
                        Decl::Frame(vs)
                    }
                    "point" => {
                        let coords = cur.vector()?;
                        match Point::new(&sp, coords) {
                            Ok(p) => Decl::Point(p),
                            Err(e) => return cur.err(e.to_string()),
                        }
                    }
                    "vector" => Decl::Vector(cur.vector()?),
                    "fseries" => {
                        let mut parts = Vec::new();
                        while !cur.at_end() {
                            parts.push(cur.ident("section name")?);
                        }
                        if parts.is_empty() {
                            return cur.err("fseries needs at least one section name");
                        }
                        Decl::FSeries(parts)
                    }
                    _ => unreachable!(),
                };
                cur.finish()?;
                names.insert(name.clone(), ());
                decls.push((name, decl));
            }
            "check" => {
                checks.push(parse_check(&mut cur)?);
                cur.finish()?;
            }
            _ => {
                let cmd = parse_command(&mut cur, &head)?;
                cur.finish()?;
                commands.push(cmd);
            }
        }
    }

    Ok(Document {
        split,
        decls,
        commands,
        checks,
    })
}

fn parse_patch(cur: &mut Cursor) -> PResult<Arc<PatchSplit>> {
    cur.expect_punct('(')?;
    let mut base = Vec::new();
    while let Some(Tok::Ident(_)) = cur.peek() {
        base.push(cur.ident("variable")?);
    }
    cur.expect_punct('|')?;
    let mut fiber = Vec::new();
    while let Some(Tok::Ident(_)) = cur.peek() {
        fiber.push(cur.ident("variable")?);
    }
    cur.expect_punct(')')?;
    cur.expect_keyword("jet")?;
    let jet = cur.uint("jet order")?;
    cur.finish()?;
    match PatchSplit::new(base, fiber, jet as u32) {
        Ok(s) => Ok(s),
        Err(e) => cur.err(e.to_string()),
    }
}

fn parse_metric(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<Decl> {
    let kind = cur.ident("`diag` or `rows`")?;
    match kind.as_str() {
        "diag" => {
            let entries = cur.vector()?;
            if entries.len() != split.n_vars() {
                return cur.err(format!(
                    "metric needs {} diagonal entries, found {}",
                    split.n_vars(),
                    entries.len()
                ));
            }
            match ConstMetric::diagonal(entries) {
                Ok(g) => Ok(Decl::Metric(g)),
                Err(e) => cur.err(e.to_string()),
            }
        }
        "rows" => {
            cur.expect_punct('(')?;
            let n = split.n_vars();
            let mut rows = Vec::new();
            loop {
                let mut row = Vec::new();
                for _ in 0..n {
                    row.push(cur.rational()?);
                }
                rows.push(row);
                match cur.peek() {
                    Some(Tok::Punct(';')) => {
                        cur.pos += 1;
                    }
                    Some(Tok::Punct(')')) => {
                        cur.pos += 1;
                        break;
                    }
                    _ => return cur.err("expected `;` or `)` in metric rows"),
                }
            }
            if rows.len() != n {
                return cur.err(format!("metric needs {n} rows, found {}", rows.len()));
            }
            match ConstMetric::new(Mat::from_rows(rows)) {
                Ok(g) => Ok(Decl::Metric(g)),
                Err(e) => cur.err(e.to_string()),
            }
        }
        other => cur.err(format!("expected `diag` or `rows`, found `{other}`")),
    }
}

fn parse_index_list(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<Vec<usize>> {
    cur.expect_punct('[')?;
    let mut idx = Vec::new();
    while cur.peek() != Some(&Tok::Punct(']')) {
        let name = cur.ident("index variable")?;
        match split.var_index(&name) {
            Ok(i) => idx.push(i),
            Err(_) => {
                cur.pos -= 1;
                return cur.err(format!("unknown variable `{name}`"));
            }
        }
    }
    cur.expect_punct(']')?;
    Ok(idx)
}

fn parse_sform(cur: &mut Cursor, split: &Arc<PatchSplit>, degree: usize) -> PResult<Decl> {
    if let Some(Tok::Int(n)) = cur.peek() {
        if *n == BigInt::from(0) {
            cur.pos += 1;
            return Ok(Decl::SForm(ScalarForm::zero(split, degree)));
        }
    }
    let mut terms = Vec::new();
    loop {
        let idx = parse_index_list(cur, split)?;
        if idx.len() != degree {
            return cur.err(format!(
                "index length {} disagrees with declared degree {degree}",
                idx.len()
            ));
        }
        cur.expect_punct('(')?;
        let p = parse_poly(cur, split)?;
        cur.expect_punct(')')?;
        terms.push((MultiIndex(idx), p));
        if cur.peek() == Some(&Tok::Punct(';')) {
            cur.pos += 1;
            continue;
        }
        break;
    }
    Ok(Decl::SForm(ScalarForm::from_terms(split, degree, terms)))
}

fn parse_vform(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<Decl> {
    if let Some(Tok::Ident(kw)) = cur.peek() {
        if kw == "deg" {
            cur.pos += 1;
            let deg = cur.uint("degree")?;
            match cur.next("`0`")? {
                Tok::Int(n) if n == BigInt::from(0) => {
                    return Ok(Decl::VForm(VectorForm::zero(split, deg)))
                }
                other => {
                    cur.pos -= 1;
                    return cur.err(format!(
                        "expected `0` after explicit degree, found {}",
                        other.describe()
                    ));
                }
            }
        }
    }
    let mut terms = Vec::new();
    let mut degree: Option<usize> = None;
    loop {
        let idx = parse_index_list(cur, split)?;
        match degree {
            None => degree = Some(idx.len()),
            Some(d) if d != idx.len() => {
                return cur.err(format!(
                    "index length {} disagrees with form degree {d}",
                    idx.len()
                ))
            }
            _ => {}
        }
        match cur.next("`->`")? {
            Tok::Arrow => {}
            other => {
                cur.pos -= 1;
                return cur.err(format!("expected `->`, found {}", other.describe()));
            }
        }
        let dir_name = cur.ident("direction variable")?;
        let dir = match split.var_index(&dir_name) {
            Ok(i) => i,
            Err(_) => {
                cur.pos -= 1;
                return cur.err(format!("unknown variable `{dir_name}`"));
            }
        };
        cur.expect_punct('(')?;
        let p = parse_poly(cur, split)?;
        cur.expect_punct(')')?;
        terms.push((MultiIndex(idx), dir, p));
        if cur.peek() == Some(&Tok::Punct(';')) {
            cur.pos += 1;
            continue;
        }
        break;
    }
    let degree = degree.expect("at least one term");
    Ok(Decl::VForm(VectorForm::from_terms(split, degree, terms)))
}

fn parse_section(cur: &mut Cursor, split: &Arc<PatchSplit>) -> PResult<Decl> {
    if let Some(Tok::Int(n)) = cur.peek() {
        if *n == BigInt::from(0) {
            cur.pos += 1;
            return Ok(Decl::Section(NormalValuedForm::zero(split, 0)));
        }
    }
    let mut terms = Vec::new();
    loop {
        let dir_name = cur.ident("fiber direction")?;
        let dir = match split.var_index(&dir_name) {
            Ok(i) if split.is_fiber(i) => i,
            Ok(_) => {
                cur.pos -= 1;
                return cur.err(format!("`{dir_name}` is not a fiber variable"));
            }
            Err(_) => {
                cur.pos -= 1;
                return cur.err(format!("unknown variable `{dir_name}`"));
            }
        };
        cur.expect_punct('(')?;
        let p = parse_poly(cur, split)?;
        cur.expect_punct(')')?;
        terms.push((MultiIndex::empty(), dir, p));
        if cur.peek() == Some(&Tok::Punct(';')) {
            cur.pos += 1;
            continue;
        }
        break;
    }
    match NormalValuedForm::from_terms(split, 0, terms) {
        Ok(s) => Ok(Decl::Section(s)),
        Err(e) => cur.err(e.to_string()),
    }
}

fn parse_command(cur: &mut Cursor, head: &str) -> PResult<Command> {
    // Multi-word command names use `-`, which lexes as punctuation.
    let mut name = head.to_string();
    while cur.peek() == Some(&Tok::Punct('-')) {
        cur.pos += 1;
        let part = cur.ident("command word")?;
        name.push('-');
        name.push_str(&part);
    }
    match name.as_str() {
        "fn-bracket" => Ok(Command::FnBracket {
            k: cur.ident("form name")?,
            l: cur.ident("form name")?,
        }),
        "hat" => Ok(Command::Hat {
            phi: cur.ident("form name")?,
            metric: cur.ident("metric name")?,
        }),
        "square-zero" => Ok(Command::SquareZero {
            k: cur.ident("form name")?,
        }),
        "vdata-validate" => {
            let delta = cur.ident("form name")?;
            let samples = if cur.at_end() {
                8
            } else {
                cur.uint("sample count")?
            };
            Ok(Command::VdataValidate { delta, samples })
        }
        "ell" => {
            let n = cur.uint("arity")?;
            let delta = cur.ident("form name")?;
            let mut args = Vec::new();
            for _ in 0..n {
                args.push(cur.ident("argument name")?);
            }
            Ok(Command::Ell { delta, args })
        }
        "ell1-matrix" => Ok(Command::Ell1Matrix {
            delta: cur.ident("form name")?,
            d_bound: cur.uint("degree bound")?,
        }),
        "symbol" => Ok(Command::Symbol {
            delta: cur.ident("form name")?,
            point: cur.ident("point name")?,
            xi: cur.ident("covector name")?,
        }),
        "fpsi" => Ok(Command::FPsi {
            delta: cur.ident("form name")?,
            series: cur.ident("series name")?,
            order: cur.uint("order")?,
        }),
        "mc-residual" => Ok(Command::McResidual {
            delta: cur.ident("form name")?,
            series: cur.ident("series name")?,
            order: cur.uint("order")?,
        }),
        "mc-solve" => Ok(Command::McSolve {
            delta: cur.ident("form name")?,
            s1: cur.ident("section name")?,
            order: cur.uint("order")?,
            d_bound: cur.uint("degree bound")?,
        }),
        "plane-check" => Ok(Command::PlaneCheck {
            psi: cur.ident("form name")?,
            point: cur.ident("point name")?,
            frame: cur.ident("frame name")?,
        }),
        "cousin" => Ok(Command::Cousin {
            phi: cur.ident("form name")?,
            metric: cur.ident("metric name")?,
            point: cur.ident("point name")?,
            frame: cur.ident("frame name")?,
            normal: cur.ident("vector name")?,
        }),
        "hl" => Ok(Command::Hl {
            phi: cur.ident("form name")?,
            psi_e: cur.ident("form name")?,
            frame: cur.ident("frame name")?,
            c: cur.rational()?,
        }),
        "plie" => Ok(Command::Plie {
            delta: cur.ident("form name")?,
            xi: cur.ident("section name")?,
            kmax: cur.uint("max arity")?,
        }),
        "fixture" => {
            let mut fname = cur.ident("fixture name")?;
            while cur.peek() == Some(&Tok::Punct('-')) {
                cur.pos += 1;
                fname.push('-');
                fname.push_str(&cur.ident("fixture name")?);
            }
            Ok(Command::Fixture { name: fname })
        }
        other => cur.err(format!("unknown command `{other}`")),
    }
}

fn parse_check(cur: &mut Cursor) -> PResult<Check> {
    let mut kind = cur.ident("check kind")?;
    while cur.peek() == Some(&Tok::Punct('-')) {
        cur.pos += 1;
        kind.push('-');
        kind.push_str(&cur.ident("check kind")?);
    }
    match kind.as_str() {
        "square-zero" => Ok(Check::SquareZero {
            k: cur.ident("form name")?,
        }),
        "square-zero-hat" => Ok(Check::SquareZeroHat {
            phi: cur.ident("form name")?,
            metric: cur.ident("metric name")?,
        }),
        "value" => {
            let phi = cur.ident("form name")?;
            cur.expect_punct('=')?;
            let value = cur.rational()?;
            let mut vectors = Vec::new();
            while !cur.at_end() {
                vectors.push(cur.vector()?);
            }
            Ok(Check::Value { phi, value, vectors })
        }
        "plane" => {
            let psi = cur.ident("form name")?;
            let mut vectors = Vec::new();
            while !cur.at_end() {
                vectors.push(cur.vector()?);
            }
            Ok(Check::Plane { psi, vectors })
        }
        "vdata" => Ok(Check::Vdata {
            delta: cur.ident("form name")?,
        }),
        "cousin" => {
            let phi = cur.ident("form name")?;
            let metric = cur.ident("metric name")?;
            let normal = cur.vector()?;
            let mut vectors = Vec::new();
            while !cur.at_end() {
                vectors.push(cur.vector()?);
            }
            Ok(Check::Cousin { phi, metric, normal, vectors })
        }
        "hl" => {
            let phi = cur.ident("form name")?;
            let psi_e = cur.ident("form name")?;
            let c = cur.rational()?;
            let mut vectors = Vec::new();
            while !cur.at_end() {
                vectors.push(cur.vector()?);
            }
            Ok(Check::Hl { phi, psi_e, c, vectors })
        }
        other => cur.err(format!("unknown check kind `{other}`")),
    }
}
