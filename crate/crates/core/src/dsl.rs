//! Workspace files: a small declarative language for quivers, groups,
//! weightings, subcoalgebras and comodules.
//!
//! ```text
//! quiver KRON { vertices x, y; arrows a: x -> y, b: x -> y; }
//! group Z = Z;
//! weighting d on KRON into Z { a = 0; b = 1; }
//! subcoalgebra B of KRON { truncate 1; }
//! comodule BAND over B { basis mx, my; coaction { mx: mx [x] + my [a + b]; my: my [y]; } }
//! ```
//!
//! Paths are written right to left: `a.c` is `c` followed by `a`.
//! Declarations must precede their uses. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coalgebra::{CoalgebraError, SubcoalgebraBasis};
use crate::comodule::Comodule;
use crate::exactlin::{format_rational, Rational, SparseVector};
use crate::groups::{free_generator_names, GroupDescriptor, GroupElement, Letter, Word};
use crate::quiver::{Arrow, Quiver};
use crate::voltage::ArrowWeighting;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {message}{}", fmt_expected(.expected))]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

fn fmt_expected(e: &[String]) -> String {
    if e.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", e.join(" | "))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WorkspaceError {
    #[error("no {kind} named {name}")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error("comodule {0}: coefficient outside the subcoalgebra")]
    Coefficient(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Integers,
    Cyclic(u64),
    Free(usize),
    Lattice(usize),
}

impl GroupSpec {
    pub fn descriptor(&self) -> GroupDescriptor {
        match self {
            GroupSpec::Integers => GroupDescriptor::integers(),
            GroupSpec::Cyclic(n) => GroupDescriptor::FgAbelian { free_rank: 0, torsion: vec![*n as i64] },
            GroupSpec::Free(r) => GroupDescriptor::Free { rank: *r },
            GroupSpec::Lattice(k) => GroupDescriptor::FgAbelian { free_rank: *k, torsion: vec![] },
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Integers => write!(f, "Z"),
            GroupSpec::Cyclic(n) => write!(f, "Z/{n}"),
            GroupSpec::Free(r) => write!(f, "free({r})"),
            GroupSpec::Lattice(k) => write!(f, "Z^{k}"),
        }
    }
}

/// Names in source order; the first name is the last arrow traversed.
pub type PathExpr = Vec<String>;
pub type Sum = Vec<(Rational, PathExpr)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverDecl {
    pub name: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDecl {
    pub name: String,
    pub spec: GroupSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightingDecl {
    pub name: String,
    pub quiver: String,
    pub group: String,
    /// One value per arrow, in the quiver's arrow order.
    pub values: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcoalgebraDecl {
    pub name: String,
    pub quiver: String,
    pub truncation: usize,
    pub generators: Vec<Sum>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComoduleDecl {
    pub name: String,
    pub over: String,
    pub basis: Vec<String>,
    /// For each basis element with a listed coaction: terms `coef * m_i [c]`.
    pub coaction: Vec<(String, Vec<(Rational, String, Sum)>)>,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub quivers: Vec<QuiverDecl>,
    pub groups: Vec<GroupDecl>,
    pub weightings: Vec<WeightingDecl>,
    pub subcoalgebras: Vec<SubcoalgebraDecl>,
    pub comodules: Vec<ComoduleDecl>,
    /// Where each declaration started, keyed by kind and name.
    pub provenance: BTreeMap<(String, String), Span>,
}

/// Equality of declarations; provenance is ignored.
impl PartialEq for Workspace {
    fn eq(&self, o: &Self) -> bool {
        self.quivers == o.quivers
            && self.groups == o.groups
            && self.weightings == o.weightings
            && self.subcoalgebras == o.subcoalgebras
            && self.comodules == o.comodules
    }
}

impl Eq for Workspace {}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::End => "end of input".into(),
        }
    }
}

const PUNCT: [&str; 18] = ["->", "{", "}", ";", ",", ":", "=", "/", "^", "(", ")", "*", "+", "-", ".", "[", "]", "|"];

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let span = Span { line: ln + 1, column: i + 1 };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| ParseError { span, message: "integer too large".into(), expected: vec![] })?;
                out.push((Tok::Int(n), span));
            } else if let Some(p) = PUNCT.iter().find(|p| line[char_offset(line, i)..].starts_with(**p)) {
                out.push((Tok::Punct(p), span));
                i += p.chars().count();
            } else {
                return Err(ParseError { span, message: format!("unexpected character `{c}`"), expected: vec![] });
            }
        }
    }
    let end = Span { line: text.lines().count().max(1), column: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    out.push((Tok::End, end));
    Ok(out)
}

fn char_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(b, _)| b)
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    ws: Workspace,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: format!("unexpected {}", self.peek().describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn fail<T>(&self, span: Span, message: String) -> PResult<T> {
        Err(ParseError { span, message, expected: vec![] })
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(&[&format!("`{p}`")])
        }
    }

    fn keyword(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&[&format!("`{k}`")])
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.span();
                self.pos += 1;
                Ok((s, sp))
            }
            _ => self.err(&["identifier"]),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(&["integer"]),
        }
    }

    fn signed(&mut self) -> PResult<i64> {
        let neg = self.eat("-");
        let sp = self.span();
        let n = self.int()?;
        let v = i64::try_from(n).or_else(|_| self.fail(sp, "integer too large".into()))?;
        Ok(if neg { -v } else { v })
    }

    fn declare(&mut self, kind: &str, name: &str, span: Span) -> PResult<()> {
        if self.ws.provenance.insert((kind.to_string(), name.to_string()), span).is_some() {
            return self.fail(span, format!("duplicate {kind} `{name}`"));
        }
        Ok(())
    }

    fn workspace(mut self) -> PResult<Workspace> {
        loop {
            match self.peek().clone() {
                Tok::End => return Ok(self.ws),
                Tok::Ident(k) if k == "quiver" => self.quiver()?,
                Tok::Ident(k) if k == "group" => self.group()?,
                Tok::Ident(k) if k == "weighting" => self.weighting()?,
                Tok::Ident(k) if k == "subcoalgebra" => self.subcoalgebra()?,
                Tok::Ident(k) if k == "comodule" => self.comodule()?,
                _ => return self.err(&["`quiver`", "`group`", "`weighting`", "`subcoalgebra`", "`comodule`", "end of input"]),
            }
        }
    }

    fn name_list(&mut self) -> PResult<Vec<(String, Span)>> {
        let mut out = vec![self.ident()?];
        while self.eat(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn quiver(&mut self) -> PResult<()> {
        self.keyword("quiver")?;
        let (name, span) = self.ident()?;
        self.expect("{")?;
        self.keyword("vertices")?;
        let vs = self.name_list()?;
        self.expect(";")?;
        let mut vertices: Vec<String> = Vec::new();
        for (v, sp) in vs {
            if vertices.contains(&v) {
                return self.fail(sp, format!("duplicate vertex `{v}`"));
            }
            vertices.push(v);
        }
        self.keyword("arrows")?;
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        if !self.is(";") {
            loop {
                let (a, sp) = self.ident()?;
                if vertices.contains(&a) || arrows.iter().any(|x| x.0 == a) {
                    return self.fail(sp, format!("duplicate name `{a}`"));
                }
                self.expect(":")?;
                let (s, ssp) = self.ident()?;
                self.expect("->")?;
                let (t, tsp) = self.ident()?;
                for (v, vsp) in [(&s, ssp), (&t, tsp)] {
                    if !vertices.contains(v) {
                        return self.fail(vsp, format!("unknown vertex `{v}`"));
                    }
                }
                arrows.push((a, s, t));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(";")?;
        self.expect("}")?;
        self.declare("quiver", &name, span)?;
        self.ws.quivers.push(QuiverDecl { name, vertices, arrows });
        Ok(())
    }

    fn group(&mut self) -> PResult<()> {
        self.keyword("group")?;
        let (name, span) = self.ident()?;
        self.expect("=")?;
        let spec = if self.is_kw("free") {
            self.pos += 1;
            self.expect("(")?;
            let r = self.int()? as usize;
            self.expect(")")?;
            GroupSpec::Free(r)
        } else if self.is_kw("Z") {
            self.pos += 1;
            if self.eat("/") {
                let sp = self.span();
                let n = self.int()?;
                if n == 0 {
                    return self.fail(sp, "modulus must be positive".into());
                }
                GroupSpec::Cyclic(n)
            } else if self.eat("^") {
                GroupSpec::Lattice(self.int()? as usize)
            } else {
                GroupSpec::Integers
            }
        } else {
            return self.err(&["`Z`", "`free`"]);
        };
        self.expect(";")?;
        self.declare("group", &name, span)?;
        self.ws.groups.push(GroupDecl { name, spec });
        Ok(())
    }

    fn lookup_quiver(&self, name: &str, sp: Span) -> PResult<QuiverDecl> {
        match self.ws.quivers.iter().find(|q| q.name == name) {
            Some(q) => Ok(q.clone()),
            None => self.fail(sp, format!("unknown quiver `{name}`")),
        }
    }

    fn element(&mut self, spec: &GroupSpec) -> PResult<GroupElement> {
        match spec {
            GroupSpec::Integers => Ok(GroupElement::Abelian(vec![self.signed()?])),
            GroupSpec::Cyclic(n) => Ok(GroupElement::Abelian(vec![self.signed()?.rem_euclid(*n as i64)])),
            GroupSpec::Lattice(k) => {
                if *k == 1 && !self.is("(") {
                    return Ok(GroupElement::Abelian(vec![self.signed()?]));
                }
                let sp = self.span();
                self.expect("(")?;
                let mut v = Vec::new();
                if !self.is(")") {
                    v.push(self.signed()?);
                    while self.eat(",") {
                        v.push(self.signed()?);
                    }
                }
                self.expect(")")?;
                if v.len() != *k {
                    return self.fail(sp, format!("expected {k} coordinates"));
                }
                Ok(GroupElement::Abelian(v))
            }
            GroupSpec::Free(r) => {
                if matches!(self.peek(), Tok::Int(1)) {
                    self.pos += 1;
                    return Ok(GroupElement::Free(Word::identity()));
                }
                let names = free_generator_names(*r);
                let mut letters = Vec::new();
                loop {
                    let (g, sp) = self.ident()?;
                    let Some(gi) = names.iter().position(|n| *n == g) else {
                        return self.fail(sp, format!("`{g}` is not a generator of free({r})"));
                    };
                    let e = if self.eat("^") { self.signed()? } else { 1 };
                    for _ in 0..e.unsigned_abs() {
                        letters.push(Letter::new(gi, e < 0));
                    }
                    if !self.eat("*") {
                        break;
                    }
                }
                Ok(GroupElement::Free(Word::from_letters(letters)))
            }
        }
    }

    fn weighting(&mut self) -> PResult<()> {
        self.keyword("weighting")?;
        let (name, span) = self.ident()?;
        self.keyword("on")?;
        let (qn, qsp) = self.ident()?;
        let q = self.lookup_quiver(&qn, qsp)?;
        self.keyword("into")?;
        let (gn, gsp) = self.ident()?;
        let Some(g) = self.ws.groups.iter().find(|g| g.name == gn).cloned() else {
            return self.fail(gsp, format!("unknown group `{gn}`"));
        };
        self.expect("{")?;
        let mut values: Vec<Option<GroupElement>> = vec![None; q.arrows.len()];
        while !self.is("}") {
            let (a, asp) = self.ident()?;
            let Some(ai) = q.arrows.iter().position(|x| x.0 == a) else {
                return self.fail(asp, format!("unknown arrow `{a}`"));
            };
            if values[ai].is_some() {
                return self.fail(asp, format!("arrow `{a}` weighted twice"));
            }
            self.expect("=")?;
            values[ai] = Some(self.element(&g.spec)?);
            self.expect(";")?;
        }
        let close = self.span();
        self.expect("}")?;
        let values = match values.iter().position(|v| v.is_none()) {
            Some(i) => return self.fail(close, format!("arrow `{}` has no weight", q.arrows[i].0)),
            None => values.into_iter().flatten().collect(),
        };
        self.declare("weighting", &name, span)?;
        self.ws.weightings.push(WeightingDecl { name, quiver: qn, group: gn, values });
        Ok(())
    }

    fn rational(&mut self) -> PResult<Rational> {
        let n = self.int()?;
        if self.eat("/") {
            let sp = self.span();
            let d = self.int()?;
            if d == 0 {
                return self.fail(sp, "zero denominator".into());
            }
            Ok(Rational::new(n.into(), d.into()))
        } else {
            Ok(Rational::from_integer(n.into()))
        }
    }

    /// Optional `coef *` prefix.
    fn coefficient(&mut self) -> PResult<Rational> {
        if matches!(self.peek(), Tok::Int(_)) {
            let c = self.rational()?;
            self.expect("*")?;
            Ok(c)
        } else {
            Ok(Rational::one())
        }
    }

    /// Checks endpoints while reading; a mismatch is reported at the dot.
    fn path(&mut self, q: &QuiverDecl) -> PResult<PathExpr> {
        let (first, sp) = self.ident()?;
        let arrow_of = |n: &str| q.arrows.iter().find(|a| a.0 == n).cloned();
        if q.vertices.contains(&first) {
            if self.is(".") {
                return self.fail(self.span(), "a vertex cannot be composed".into());
            }
            return Ok(vec![first]);
        }
        let Some(mut left) = arrow_of(&first) else {
            return self.fail(sp, format!("`{first}` is neither a vertex nor an arrow of {}", q.name));
        };
        let mut names = vec![first];
        while self.is(".") {
            let dot = self.span();
            self.pos += 1;
            let (n, nsp) = self.ident()?;
            let Some(right) = arrow_of(&n) else {
                return self.fail(nsp, format!("`{n}` is not an arrow of {}", q.name));
            };
            if right.2 != left.1 {
                return self.fail(dot, format!("`{}` ends at {} but `{}` starts at {}", right.0, right.2, left.0, left.1));
            }
            names.push(n);
            left = right;
        }
        Ok(names)
    }

    fn sum(&mut self, q: &QuiverDecl) -> PResult<Sum> {
        let mut out = Vec::new();
        let mut neg = self.eat("-");
        loop {
            let c = self.coefficient()?;
            let p = self.path(q)?;
            out.push((if neg { -c } else { c }, p));
            if self.eat("+") {
                neg = false;
            } else if self.eat("-") {
                neg = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn subcoalgebra(&mut self) -> PResult<()> {
        self.keyword("subcoalgebra")?;
        let (name, span) = self.ident()?;
        self.keyword("of")?;
        let (qn, qsp) = self.ident()?;
        let q = self.lookup_quiver(&qn, qsp)?;
        self.expect("{")?;
        self.keyword("truncate")?;
        let truncation = self.int()? as usize;
        self.expect(";")?;
        let mut generators = Vec::new();
        if self.is_kw("generators") {
            self.pos += 1;
            self.expect(":")?;
            generators.push(self.sum(&q)?);
            while self.eat(",") {
                generators.push(self.sum(&q)?);
            }
            self.expect(";")?;
        }
        self.expect("}")?;
        self.declare("subcoalgebra", &name, span)?;
        self.ws.subcoalgebras.push(SubcoalgebraDecl { name, quiver: qn, truncation, generators });
        Ok(())
    }

    fn comodule(&mut self) -> PResult<()> {
        self.keyword("comodule")?;
        let (name, span) = self.ident()?;
        self.keyword("over")?;
        let (bn, bsp) = self.ident()?;
        let Some(b) = self.ws.subcoalgebras.iter().find(|b| b.name == bn).cloned() else {
            return self.fail(bsp, format!("unknown subcoalgebra `{bn}`"));
        };
        let q = self.lookup_quiver(&b.quiver, bsp)?;
        self.expect("{")?;
        self.keyword("basis")?;
        let mut basis: Vec<String> = Vec::new();
        for (m, sp) in self.name_list()? {
            if basis.contains(&m) {
                return self.fail(sp, format!("duplicate basis element `{m}`"));
            }
            basis.push(m);
        }
        self.expect(";")?;
        self.keyword("coaction")?;
        self.expect("{")?;
        let mut coaction: Vec<(String, Vec<(Rational, String, Sum)>)> = Vec::new();
        while !self.is("}") {
            let (m, sp) = self.ident()?;
            if !basis.contains(&m) {
                return self.fail(sp, format!("unknown basis element `{m}`"));
            }
            if coaction.iter().any(|(n, _)| *n == m) {
                return self.fail(sp, format!("coaction of `{m}` given twice"));
            }
            self.expect(":")?;
            let mut terms = Vec::new();
            let mut neg = self.eat("-");
            loop {
                let c = self.coefficient()?;
                let (mi, msp) = self.ident()?;
                if !basis.contains(&mi) {
                    return self.fail(msp, format!("unknown basis element `{mi}`"));
                }
                self.expect("[")?;
                let s = self.sum(&q)?;
                self.expect("]")?;
                terms.push((if neg { -c } else { c }, mi, s));
                if self.eat("+") {
                    neg = false;
                } else if self.eat("-") {
                    neg = true;
                } else {
                    break;
                }
            }
            self.expect(";")?;
            coaction.push((m, terms));
        }
        self.expect("}")?;
        self.expect("}")?;
        self.declare("comodule", &name, span)?;
        self.ws.comodules.push(ComoduleDecl { name, over: bn, basis, coaction });
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<Workspace, ParseError> {
    Parser { toks: lex(text)?, pos: 0, ws: Workspace::default() }.workspace()
}

/// A single group element in the syntax used by weightings.
pub fn parse_element(spec: &GroupSpec, text: &str) -> Result<GroupElement, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, ws: Workspace::default() };
    let g = p.element(spec)?;
    match p.peek() {
        Tok::End => Ok(g),
        _ => p.err(&["end of input"]),
    }
}

// ---------------------------------------------------------------- emitter

fn emit_sum(s: &Sum) -> String {
    let mut out = String::new();
    for (k, (c, p)) in s.iter().enumerate() {
        let mag = c.abs();
        if k == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format_rational(&mag));
            out.push('*');
        }
        out.push_str(&p.join("."));
    }
    out
}

pub fn emit_element(spec: &GroupSpec, g: &GroupElement) -> String {
    match (spec, g) {
        (GroupSpec::Lattice(k), GroupElement::Abelian(v)) if *k != 1 => {
            format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
        }
        (GroupSpec::Free(r), GroupElement::Free(w)) => w.format_with(&free_generator_names(*r)),
        (_, GroupElement::Abelian(v)) => v[0].to_string(),
        _ => unreachable!("validated element"),
    }
}

/// Canonical text; `parse(emit(w)) == w`.
pub fn emit(ws: &Workspace) -> String {
    let mut out = String::new();
    for q in &ws.quivers {
        out.push_str(&format!("quiver {} {{\n  vertices {};\n  arrows", q.name, q.vertices.join(", ")));
        let arrows: Vec<String> = q.arrows.iter().map(|(a, s, t)| format!("{a}: {s} -> {t}")).collect();
        if !arrows.is_empty() {
            out.push(' ');
            out.push_str(&arrows.join(", "));
        }
        out.push_str(";\n}\n");
    }
    for g in &ws.groups {
        out.push_str(&format!("group {} = {};\n", g.name, g.spec));
    }
    for w in &ws.weightings {
        let q = ws.quivers.iter().find(|q| q.name == w.quiver).expect("resolved");
        let spec = &ws.groups.iter().find(|g| g.name == w.group).expect("resolved").spec;
        out.push_str(&format!("weighting {} on {} into {} {{\n", w.name, w.quiver, w.group));
        for ((a, _, _), v) in q.arrows.iter().zip(&w.values) {
            out.push_str(&format!("  {a} = {};\n", emit_element(spec, v)));
        }
        out.push_str("}\n");
    }
    for b in &ws.subcoalgebras {
        out.push_str(&format!("subcoalgebra {} of {} {{\n  truncate {};\n", b.name, b.quiver, b.truncation));
        if !b.generators.is_empty() {
            let gens: Vec<String> = b.generators.iter().map(emit_sum).collect();
            out.push_str(&format!("  generators: {};\n", gens.join(", ")));
        }
        out.push_str("}\n");
    }
    for m in &ws.comodules {
        out.push_str(&format!("comodule {} over {} {{\n  basis {};\n  coaction {{\n", m.name, m.over, m.basis.join(", ")));
        for (j, terms) in &m.coaction {
            let mut line = String::new();
            for (k, (c, mi, s)) in terms.iter().enumerate() {
                if k == 0 {
                    if c.is_negative() {
                        line.push('-');
                    }
                } else {
                    line.push_str(if c.is_negative() { " - " } else { " + " });
                }
                if !c.abs().is_one() {
                    line.push_str(&format!("{}*", format_rational(&c.abs())));
                }
                line.push_str(&format!("{mi} [{}]", emit_sum(s)));
            }
            out.push_str(&format!("    {j}: {line};\n"));
        }
        out.push_str("  }\n}\n");
    }
    out
}

// ---------------------------------------------------------------- models

impl Workspace {
    pub fn quiver(&self, name: &str) -> Result<Quiver, WorkspaceError> {
        let d = self.quivers.iter().find(|q| q.name == name).ok_or(WorkspaceError::Unknown { kind: "quiver", name: name.into() })?;
        let idx = |v: &str| d.vertices.iter().position(|x| x == v).expect("resolved");
        let arrows = d.arrows.iter().map(|(a, s, t)| Arrow { name: a.clone(), source: idx(s), target: idx(t) }).collect();
        Ok(Quiver::new(d.vertices.clone(), arrows).expect("validated while parsing"))
    }

    pub fn group(&self, name: &str) -> Result<GroupDescriptor, WorkspaceError> {
        let d = self.groups.iter().find(|g| g.name == name).ok_or(WorkspaceError::Unknown { kind: "group", name: name.into() })?;
        Ok(d.spec.descriptor())
    }

    pub fn weighting(&self, name: &str) -> Result<(Quiver, ArrowWeighting), WorkspaceError> {
        let d = self.weightings.iter().find(|w| w.name == name).ok_or(WorkspaceError::Unknown { kind: "weighting", name: name.into() })?;
        let w = ArrowWeighting { group: self.group(&d.group)?, values: d.values.clone() };
        Ok((self.quiver(&d.quiver)?, w))
    }

    pub fn group_spec_of_weighting(&self, name: &str) -> Option<&GroupSpec> {
        let d = self.weightings.iter().find(|w| w.name == name)?;
        self.groups.iter().find(|g| g.name == d.group).map(|g| &g.spec)
    }

    pub fn subcoalgebra(&self, name: &str) -> Result<SubcoalgebraBasis, WorkspaceError> {
        let d = self
            .subcoalgebras
            .iter()
            .find(|b| b.name == name)
            .ok_or(WorkspaceError::Unknown { kind: "subcoalgebra", name: name.into() })?;
        let q = self.quiver(&d.quiver)?;
        let index = crate::coalgebra::PathIndex::new(&q, d.truncation);
        let gens = d
            .generators
            .iter()
            .map(|s| sum_vector(&q, &index, s).ok_or_else(|| CoalgebraError::BeyondTruncation(emit_sum(s))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubcoalgebraBasis::closure(&q, d.truncation, &gens)?)
    }

    pub fn comodule(&self, name: &str) -> Result<(SubcoalgebraBasis, Comodule), WorkspaceError> {
        let d = self.comodules.iter().find(|m| m.name == name).ok_or(WorkspaceError::Unknown { kind: "comodule", name: name.into() })?;
        let b = self.subcoalgebra(&d.over)?;
        let pos = |n: &str| d.basis.iter().position(|x| x == n).expect("resolved");
        let mut paths: BTreeMap<(usize, usize), SparseVector> = BTreeMap::new();
        for (mj, terms) in &d.coaction {
            for (c, mi, s) in terms {
                let v = sum_vector(&b.quiver, &b.index, s).ok_or_else(|| WorkspaceError::Coefficient(d.name.clone()))?;
                paths.entry((pos(mi), pos(mj))).or_default().add_scaled(c, &v);
            }
        }
        let mut entries = BTreeMap::new();
        for (k, v) in paths {
            if v.is_zero() {
                continue;
            }
            entries.insert(k, b.coordinates(&v).ok_or_else(|| WorkspaceError::Coefficient(d.name.clone()))?);
        }
        Ok((b, Comodule { labels: d.basis.clone(), entries }))
    }
}

/// Source-order names to a vector in path coordinates.
pub fn sum_vector(q: &Quiver, index: &crate::coalgebra::PathIndex, s: &Sum) -> Option<SparseVector> {
    let mut v = SparseVector::new();
    for (c, names) in s {
        let k = match q.vertex_index(&names[0]) {
            Some(x) if names.len() == 1 => index.vertex(x),
            _ => {
                let arrows: Vec<usize> = names.iter().rev().map(|n| q.arrow_index(n)).collect::<Option<_>>()?;
                index.find_arrows(q, &arrows)?
            }
        };
        if c.is_zero() {
            continue;
        }
        v.add_at(k, c);
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KRON: &str = "quiver KRON { vertices x, y; arrows a: x -> y, b: x -> y; }\n\
        group Z = Z;\n\
        weighting d on KRON into Z { a = 0; b = 1; }\n\
        subcoalgebra B of KRON { truncate 1; }\n\
        comodule BAND over B { basis mx, my; coaction { mx: mx [x] + my [a + b]; my: my [y]; } }\n";

    #[test]
    fn kron_round_trip() {
        let ws = parse(KRON).unwrap();
        assert_eq!((ws.quivers.len(), ws.groups.len(), ws.weightings.len()), (1, 1, 1));
        let text = emit(&ws);
        let again = parse(&text).unwrap();
        assert_eq!(again, ws);
        assert_eq!(emit(&again), text);
        let (b, m) = ws.comodule("BAND").unwrap();
        assert!(m.verify(&b).ok());
    }

    #[test]
    fn errors_carry_positions() {
        let tri = "quiver TRI { vertices x, y, z; arrows c: x -> y, a: y -> z, b: y -> z; }\n\
                   subcoalgebra B of TRI { truncate 2; generators: c.a; }";
        let e = parse(tri).unwrap_err();
        assert_eq!(e.span, Span { line: 2, column: 50 });
        let e = parse("group G = Q;").unwrap_err();
        assert_eq!(e.span, Span { line: 1, column: 11 });
        assert_eq!(e.expected, vec!["`Z`", "`free`"]);
        let e = parse("quiver Q { vertices x; arrows a: x -> y; }").unwrap_err();
        assert!(e.message.contains("unknown vertex"));
    }

    #[test]
    fn groups_and_words() {
        let src = "quiver D { vertices x; arrows a: x -> x, b: x -> x; }\n\
                   group F = free(2);\ngroup L = Z^2;\ngroup C = Z/3;\n\
                   weighting w on D into F { a = x*y^-1; b = 1; }\n\
                   weighting l on D into L { a = (1, -2); b = (0, 0); }\n\
                   weighting c on D into C { a = 4; b = -1; }\n\
                   subcoalgebra B of D { truncate 2; generators: 1/2*a.b - a.a, -b; }\n";
        let ws = parse(src).unwrap();
        assert_eq!(ws.weightings[2].values, vec![GroupElement::Abelian(vec![1]), GroupElement::Abelian(vec![2])]);
        let text = emit(&ws);
        assert!(text.contains("a = x*y^-1;"));
        assert!(text.contains("generators: 1/2*a.b - a.a, -b;"));
        assert_eq!(parse(&text).unwrap(), ws);
    }
}
