//! Text frontend: group files, word expressions, and the `gpcalc` command
//! line tool.
//!
//! A group file declares one presentation, one directive per line:
//!
//! ```text
//! # mixed path: a of order three, b and c infinite
//! vertex a Z/3
//! vertex c Z
//! vertex b Z
//! edge a c
//! edge c b
//! ```
//!
//! Labels start with a letter or `_` and continue with letters, digits and
//! `_`. The character `@` is reserved for generators of derived kernel
//! presentations and cannot appear in declared labels.
//!
//! Word expressions use `*` for products, `^` for integer powers, `1` for
//! the identity and `[x, y]` for the commutator `x^-1*y^-1*x*y`:
//!
//! ```text
//! (a*c)^3 * [a, b]^-1
//! ```
//!
//! Vertex sets are comma-separated labels, optionally in braces: `a,b` or
//! `{a, b}`; the empty string is the empty set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser as ClapParser, Subcommand};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::bassserre::{FixedPoint, TreeAction};
use crate::classify::{classify, Verdict};
use crate::graph::{VertexId, VertexSet};
use crate::kernel::{compress, CompressStep, KernelPresentation};
use crate::oracle::{self, OracleError};
use crate::parabolic::ClosureFlag;
use crate::words::{CyclicGroup, GroupError, NormalForm, Presentation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{origin}:{line}: {msg}")]
    Spec {
        origin: String,
        line: usize,
        msg: String,
    },
    #[error("column {col} of `{src}`: {msg}")]
    Word { src: String, col: usize, msg: String },
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the group file format. `origin` names the source in errors,
/// usually a file path.
pub fn parse_spec(text: &str, origin: &str) -> Result<Presentation, ParseError> {
    let err = |line: usize, msg: String| ParseError::Spec {
        origin: origin.to_string(),
        line,
        msg,
    };
    let mut vertices: Vec<(String, CyclicGroup)> = Vec::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next().expect("line is nonempty") {
            "vertex" => {
                let label = parts
                    .next()
                    .ok_or_else(|| err(line_no, "expected `vertex <label> <group>`".into()))?;
                let group = parts
                    .next()
                    .ok_or_else(|| err(line_no, format!("missing group for vertex `{label}`")))?;
                if parts.next().is_some() {
                    return Err(err(line_no, "trailing tokens after vertex declaration".into()));
                }
                if !is_label(label) {
                    return Err(err(
                        line_no,
                        format!(
                            "bad label `{label}`: labels start with a letter or `_` and \
                             contain only letters, digits and `_`"
                        ),
                    ));
                }
                if vertices.iter().any(|(l, _)| l == label) {
                    return Err(err(line_no, format!("duplicate vertex `{label}`")));
                }
                let g = if group == "Z" {
                    CyclicGroup::Infinite
                } else if let Some(n) = group.strip_prefix("Z/") {
                    let n: u64 = n
                        .parse()
                        .map_err(|_| err(line_no, format!("bad group `{group}`")))?;
                    if n < 2 {
                        return Err(err(line_no, "cyclic orders start at 2; use Z for the infinite group".into()));
                    }
                    CyclicGroup::Finite(n)
                } else {
                    return Err(err(line_no, format!("bad group `{group}`: expected Z or Z/<n>")));
                };
                vertices.push((label.to_string(), g));
            }
            "edge" => {
                let a = parts
                    .next()
                    .ok_or_else(|| err(line_no, "expected `edge <label> <label>`".into()))?;
                let b = parts
                    .next()
                    .ok_or_else(|| err(line_no, "expected `edge <label> <label>`".into()))?;
                if parts.next().is_some() {
                    return Err(err(line_no, "trailing tokens after edge declaration".into()));
                }
                if a == b {
                    return Err(err(line_no, format!("edge from `{a}` to itself")));
                }
                for l in [a, b] {
                    if !vertices.iter().any(|(v, _)| v == l) {
                        return Err(err(line_no, format!("edge uses undeclared vertex `{l}`")));
                    }
                }
                edges.push((line_no, a.to_string(), b.to_string()));
            }
            other => return Err(err(line_no, format!("unknown directive `{other}`"))),
        }
    }
    if vertices.len() > 64 {
        return Err(err(0, format!("{} vertices; at most 64 are supported", vertices.len())));
    }
    let mut graph = crate::graph::SimplicialGraph::new(vertices.len())
        .expect("vertex count already bounded");
    let index = |l: &str| VertexId(vertices.iter().position(|(v, _)| v == l).expect("declared"));
    for (line_no, a, b) in &edges {
        graph
            .add_edge(index(a), index(b))
            .map_err(|e| err(*line_no, e.to_string()))?;
    }
    Presentation::new(graph, vertices).map_err(|e| err(0, e.to_string()))
}

// --- word expressions ------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Star,
    Caret,
    Minus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn lex_word(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let err = |col: usize, msg: String| ParseError::Word {
        src: src.to_string(),
        col,
        msg,
    };
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse::<BigInt>()
                .expect("digit runs parse as integers");
            toks.push((Tok::Int(n), col));
            continue;
        }
        let t = match c {
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '-' => Tok::Minus,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        };
        toks.push((t, col));
        i += 1;
    }
    Ok(toks)
}

struct WordParser<'a> {
    p: &'a Presentation,
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> WordParser<'a> {
    fn err(&self, msg: String) -> ParseError {
        let col = self
            .toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.src.chars().count() + 1);
        ParseError::Word {
            src: self.src.to_string(),
            col,
            msg,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t:?}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<NormalForm, ParseError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.p.multiply(&acc, &rhs).expect("same presentation");
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NormalForm, ParseError> {
        let base = self.factor()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = match self.bump() {
                Some(Tok::Int(n)) => {
                    if negative {
                        -n
                    } else {
                        n
                    }
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected an integer exponent after `^`".into()));
                }
            };
            return Ok(self.p.power(&base, &k).expect("same presentation"));
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<NormalForm, ParseError> {
        match self.bump() {
            Some(Tok::Ident(name)) => match self.p.vertex_by_label(&name) {
                Some(v) => Ok(self.p.generator(v)),
                None => {
                    self.pos -= 1;
                    Err(self.err(format!("unknown generator `{name}`")))
                }
            },
            Some(Tok::Int(n)) if n.is_one() => Ok(NormalForm::identity()),
            Some(Tok::Int(n)) => {
                self.pos -= 1;
                Err(self.err(format!("bare integer `{n}`; only `1` denotes the identity")))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::LBracket) => {
                let x = self.expr()?;
                self.expect(Tok::Comma, "`,` between commutator entries")?;
                let y = self.expr()?;
                self.expect(Tok::RBracket, "`]`")?;
                let xi = self.p.invert(&x).expect("same presentation");
                let yi = self.p.invert(&y).expect("same presentation");
                let mut out = self.p.multiply(&xi, &yi).expect("same presentation");
                out = self.p.multiply(&out, &x).expect("same presentation");
                Ok(self.p.multiply(&out, &y).expect("same presentation"))
            }
            Some(t) => {
                self.pos -= 1;
                Err(self.err(format!("expected a generator, `1`, `(` or `[`, found {t:?}")))
            }
            None => Err(self.err("expected a word, found end of input".into())),
        }
    }
}

/// Parses and evaluates a word expression over the given presentation.
pub fn parse_word(p: &Presentation, src: &str) -> Result<NormalForm, ParseError> {
    let toks = lex_word(src)?;
    if toks.is_empty() {
        return Err(ParseError::Word {
            src: src.to_string(),
            col: 1,
            msg: "empty word expression; write `1` for the identity".into(),
        });
    }
    let mut parser = WordParser {
        p,
        src,
        toks,
        pos: 0,
    };
    let out = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input after the word".into()));
    }
    Ok(out)
}

/// Parses a vertex set: comma-separated labels, optional surrounding
/// braces, empty for the empty set.
pub fn parse_vertex_set(p: &Presentation, src: &str) -> Result<VertexSet, ParseError> {
    let err = |msg: String| ParseError::Word {
        src: src.to_string(),
        col: 1,
        msg,
    };
    let mut inner = src.trim();
    if let Some(stripped) = inner.strip_prefix('{') {
        inner = stripped
            .strip_suffix('}')
            .ok_or_else(|| err("unterminated `{` in vertex set".into()))?
            .trim();
    }
    let mut out = VertexSet::empty();
    if inner.is_empty() {
        return Ok(out);
    }
    for part in inner.split(',') {
        let label = part.trim();
        let v = p
            .vertex_by_label(label)
            .ok_or_else(|| err(format!("unknown vertex `{label}` in set")))?;
        out.insert(v);
    }
    Ok(out)
}

// --- command line tool -----------------------------------------------------

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Group(#[from] GroupError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

#[derive(ClapParser)]
#[command(
    name = "gpcalc",
    version,
    about = "Exact computation in graph products of cyclic groups",
    after_help = "Group files declare `vertex <label> Z`, `vertex <label> Z/<n>` and\n\
                  `edge <a> <b>` lines; `#` starts a comment. Words look like\n\
                  `(a*c)^3*[a,b]^-1`; vertex sets like `{a,b}`.\n\
                  Exit codes: 0 success or yes, 1 no, 2 error."
)]
struct Cli {
    /// Group file describing the presentation.
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized check suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical form of a word.
    Nf { word: String },
    /// Product of two words.
    Mul { lhs: String, rhs: String },
    /// Inverse of a word.
    Inv { word: String },
    /// Whether two words denote the same element.
    Eq { lhs: String, rhs: String },
    /// Order of the element: a number or "infinite".
    Order { word: String },
    /// Vertices appearing in the canonical form.
    Supp { word: String },
    /// Vertices that can start a reduced spelling.
    Fv { word: String },
    /// Vertices that can end a reduced spelling.
    Lv { word: String },
    /// Image under the retraction onto a vertex subset.
    Retract { word: String, set: String },
    /// Smallest parabolic subgroup containing the family.
    Pc { words: Vec<String> },
    /// Essential support: the base of the parabolic closure.
    Esupp { words: Vec<String> },
    /// Intersection of two parabolic subgroups g G_S g^-1.
    Pint {
        g1: String,
        s1: String,
        g2: String,
        s2: String,
    },
    /// Normalizer of a parabolic subgroup.
    Pnorm { g: String, s: String },
    /// Whether a word lies in a parabolic subgroup.
    Pmember {
        g: String,
        s: String,
        word: String,
    },
    /// Kernel of the retraction onto one vertex group: census and
    /// projections of the given kernel elements.
    Kernel { axis: String, words: Vec<String> },
    /// Rewrite a family until it fills its presentation.
    Compress { words: Vec<String> },
    /// Split over the link of a vertex and classify tree actions.
    Tree { apex: String, words: Vec<String> },
    /// Structure of the subgroup generated by a family.
    Classify { words: Vec<String> },
    /// Run the randomized check suites.
    Selftest {
        /// Suite name; all suites when omitted.
        suite: Option<String>,
        /// Cases per suite instead of the default sizes.
        #[arg(long)]
        cases: Option<usize>,
    },
}

// JSON output shapes. Field order is declaration order, so reports are
// byte-stable for a fixed input.

#[derive(Serialize)]
struct WordOut {
    word: String,
}

#[derive(Serialize)]
struct EqOut {
    equal: bool,
}

#[derive(Serialize)]
struct OrderOut {
    order: String,
}

#[derive(Serialize)]
struct VerticesOut {
    vertices: Vec<String>,
}

#[derive(Serialize)]
struct ParabolicOut {
    conjugator: String,
    base: Vec<String>,
}

#[derive(Serialize)]
struct ClosureOut {
    conjugator: String,
    base: Vec<String>,
    exact: bool,
}

#[derive(Serialize)]
struct EsuppOut {
    vertices: Vec<String>,
    exact: bool,
}

#[derive(Serialize)]
struct MemberOut {
    member: bool,
}

#[derive(Serialize)]
struct VertexOut {
    label: String,
    group: String,
}

#[derive(Serialize)]
struct PresentationOut {
    vertices: Vec<VertexOut>,
    edges: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct KernelOut {
    axis: String,
    kernel_vertices: String,
    kernel_edges: String,
    complete: bool,
    realized: PresentationOut,
    projections: Vec<String>,
}

#[derive(Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
enum StepOut {
    Project {
        conjugator: String,
        kept: Vec<String>,
    },
    Rewrite {
        axis: String,
    },
}

#[derive(Serialize)]
struct CompressOut {
    steps: Vec<StepOut>,
    presentation: PresentationOut,
    family: Vec<String>,
    exact: bool,
}

#[derive(Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
enum ActionOut {
    Elliptic {
        conjugator: String,
        fixed: String,
    },
    Hyperbolic {
        translation_length: usize,
    },
}

#[derive(Serialize)]
struct WordActionOut {
    word: String,
    #[serde(flatten)]
    action: ActionOut,
}

#[derive(Serialize)]
struct TreeOut {
    apex: String,
    side_a: Vec<String>,
    side_b: Vec<String>,
    edge: Vec<String>,
    actions: Vec<WordActionOut>,
}

#[derive(Serialize)]
struct ClassifyOut {
    verdict: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    budget_limited: bool,
}

#[derive(Serialize)]
struct SuiteOut {
    name: String,
    cases: usize,
    checks: usize,
    skipped: usize,
    failures: usize,
    counterexamples: Vec<String>,
}

#[derive(Serialize)]
struct SelftestOut {
    seed: u64,
    passed: bool,
    suites: Vec<SuiteOut>,
}

fn emit<T: Serialize>(json: bool, value: &T, human: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
    } else {
        println!("{human}");
    }
}

fn labels(p: &Presentation, s: VertexSet) -> Vec<String> {
    p.set_to_labels(s)
}

fn braced(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn presentation_out(p: &Presentation) -> PresentationOut {
    let vertices = (0..p.vertex_count())
        .map(|i| {
            let v = VertexId(i);
            VertexOut {
                label: p.label(v).to_string(),
                group: match p.group(v) {
                    CyclicGroup::Infinite => "Z".to_string(),
                    CyclicGroup::Finite(n) => format!("Z/{n}"),
                },
            }
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..p.vertex_count() {
        for v in (u + 1)..p.vertex_count() {
            if p.graph().adjacent(VertexId(u), VertexId(v)) {
                edges.push([p.label(VertexId(u)).to_string(), p.label(VertexId(v)).to_string()]);
            }
        }
    }
    PresentationOut { vertices, edges }
}

fn render_presentation(out: &PresentationOut, indent: &str) -> String {
    let mut s = String::new();
    for v in &out.vertices {
        let _ = writeln!(s, "{indent}vertex {} {}", v.label, v.group);
    }
    for e in &out.edges {
        let _ = writeln!(s, "{indent}edge {} {}", e[0], e[1]);
    }
    s.pop();
    s
}

fn parse_family(p: &Presentation, words: &[String]) -> Result<Vec<NormalForm>, ParseError> {
    words.iter().map(|w| parse_word(p, w)).collect()
}

fn count_or_infinite(n: Option<BigInt>) -> String {
    match n {
        Some(n) => n.to_string(),
        None => "infinite".to_string(),
    }
}

fn load_presentation(spec: Option<&Path>) -> Result<Presentation, CliError> {
    let Some(path) = spec else {
        return Err(CliError::Usage(
            "this command needs a group file; pass --spec <FILE>".into(),
        ));
    };
    let text = std::fs::read_to_string(path).map_err(|err| CliError::Io {
        path: path.display().to_string(),
        err,
    })?;
    Ok(parse_spec(&text, &path.display().to_string())?)
}

fn lookup_vertex(p: &Presentation, label: &str) -> Result<VertexId, CliError> {
    p.vertex_by_label(label).ok_or_else(|| {
        CliError::Usage(format!("unknown vertex `{label}`"))
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let Cli {
        spec,
        json,
        seed,
        cmd,
    } = cli;
    if let Cmd::Selftest { suite, cases } = cmd {
        return run_selftest(seed, suite.as_deref(), cases, json);
    }
    let p = load_presentation(spec.as_deref())?;
    match cmd {
        Cmd::Nf { word } => {
            let x = parse_word(&p, &word)?;
            emit(json, &WordOut { word: p.format_word(&x) }, p.format_word(&x));
            Ok(0)
        }
        Cmd::Mul { lhs, rhs } => {
            let x = parse_word(&p, &lhs)?;
            let y = parse_word(&p, &rhs)?;
            let z = p.multiply(&x, &y)?;
            emit(json, &WordOut { word: p.format_word(&z) }, p.format_word(&z));
            Ok(0)
        }
        Cmd::Inv { word } => {
            let x = parse_word(&p, &word)?;
            let z = p.invert(&x)?;
            emit(json, &WordOut { word: p.format_word(&z) }, p.format_word(&z));
            Ok(0)
        }
        Cmd::Eq { lhs, rhs } => {
            let x = parse_word(&p, &lhs)?;
            let y = parse_word(&p, &rhs)?;
            let equal = x == y;
            emit(json, &EqOut { equal }, equal.to_string());
            Ok(if equal { 0 } else { 1 })
        }
        Cmd::Order { word } => {
            let x = parse_word(&p, &word)?;
            let order = count_or_infinite(p.order(&x)?);
            emit(json, &OrderOut { order: order.clone() }, order);
            Ok(0)
        }
        Cmd::Supp { word } => {
            let x = parse_word(&p, &word)?;
            let vs = labels(&p, x.support());
            emit(json, &VerticesOut { vertices: vs.clone() }, braced(&vs));
            Ok(0)
        }
        Cmd::Fv { word } => {
            let x = parse_word(&p, &word)?;
            let vs = labels(&p, p.first_vertices(&x));
            emit(json, &VerticesOut { vertices: vs.clone() }, braced(&vs));
            Ok(0)
        }
        Cmd::Lv { word } => {
            let x = parse_word(&p, &word)?;
            let vs = labels(&p, p.last_vertices(&x));
            emit(json, &VerticesOut { vertices: vs.clone() }, braced(&vs));
            Ok(0)
        }
        Cmd::Retract { word, set } => {
            let x = parse_word(&p, &word)?;
            let s = parse_vertex_set(&p, &set)?;
            let z = p.retraction(&x, s)?;
            emit(json, &WordOut { word: p.format_word(&z) }, p.format_word(&z));
            Ok(0)
        }
        Cmd::Pc { words } => {
            let xs = parse_family(&p, &words)?;
            let (parab, flag) = p.parabolic_closure(&xs)?;
            let base = labels(&p, parab.base());
            let exact = flag == ClosureFlag::Exact;
            let human = format!(
                "conjugator: {}\nbase: {}\nexact: {}",
                p.format_word(parab.conjugator()),
                braced(&base),
                exact
            );
            emit(
                json,
                &ClosureOut {
                    conjugator: p.format_word(parab.conjugator()),
                    base,
                    exact,
                },
                human,
            );
            Ok(0)
        }
        Cmd::Esupp { words } => {
            let xs = parse_family(&p, &words)?;
            let (parab, flag) = p.parabolic_closure(&xs)?;
            let vs = labels(&p, parab.base());
            let exact = flag == ClosureFlag::Exact;
            let human = format!("{}\nexact: {}", braced(&vs), exact);
            emit(json, &EsuppOut { vertices: vs, exact }, human);
            Ok(0)
        }
        Cmd::Pint { g1, s1, g2, s2 } => {
            let p1 = p.parabolic(&parse_word(&p, &g1)?, parse_vertex_set(&p, &s1)?)?;
            let p2 = p.parabolic(&parse_word(&p, &g2)?, parse_vertex_set(&p, &s2)?)?;
            let q = p.parabolic_intersect(&p1, &p2);
            let base = labels(&p, q.base());
            let human = format!(
                "conjugator: {}\nbase: {}",
                p.format_word(q.conjugator()),
                braced(&base)
            );
            emit(
                json,
                &ParabolicOut {
                    conjugator: p.format_word(q.conjugator()),
                    base,
                },
                human,
            );
            Ok(0)
        }
        Cmd::Pnorm { g, s } => {
            let parab = p.parabolic(&parse_word(&p, &g)?, parse_vertex_set(&p, &s)?)?;
            let n = p.parabolic_normalizer(&parab);
            let base = labels(&p, n.base());
            let human = format!(
                "conjugator: {}\nbase: {}",
                p.format_word(n.conjugator()),
                braced(&base)
            );
            emit(
                json,
                &ParabolicOut {
                    conjugator: p.format_word(n.conjugator()),
                    base,
                },
                human,
            );
            Ok(0)
        }
        Cmd::Pmember { g, s, word } => {
            let parab = p.parabolic(&parse_word(&p, &g)?, parse_vertex_set(&p, &s)?)?;
            let x = parse_word(&p, &word)?;
            let member = p.parabolic_member(&parab, &x)?;
            emit(json, &MemberOut { member }, member.to_string());
            Ok(if member { 0 } else { 1 })
        }
        Cmd::Kernel { axis, words } => {
            let a = lookup_vertex(&p, &axis)?;
            let mut kp = KernelPresentation::new(&p, a)?;
            let mut projections = Vec::new();
            for w in &words {
                let x = parse_word(&p, w)?;
                let y = kp.project(&x)?;
                projections.push(kp.delta().format_word(&y));
            }
            let out = KernelOut {
                axis: axis.clone(),
                kernel_vertices: count_or_infinite(kp.expected_vertex_count()),
                kernel_edges: count_or_infinite(kp.expected_edge_count()),
                complete: kp.fully_realized(),
                realized: presentation_out(kp.delta()),
                projections,
            };
            let mut human = format!(
                "axis: {}\nkernel vertices: {}\nkernel edges: {}\nrealized: {}",
                out.axis,
                out.kernel_vertices,
                out.kernel_edges,
                if out.complete { "complete" } else { "partial" }
            );
            if !out.realized.vertices.is_empty() {
                let _ = write!(human, "\n{}", render_presentation(&out.realized, "  "));
            }
            for w in &out.projections {
                let _ = write!(human, "\nprojection: {w}");
            }
            emit(json, &out, human);
            Ok(0)
        }
        Cmd::Compress { words } => {
            let xs = parse_family(&p, &words)?;
            let comp = compress(&p, &xs)?;
            let steps: Vec<StepOut> = comp
                .steps
                .iter()
                .map(|s| match s {
                    CompressStep::Project { conjugator, kept } => StepOut::Project {
                        conjugator: conjugator.clone(),
                        kept: kept.clone(),
                    },
                    CompressStep::Rewrite { axis } => StepOut::Rewrite { axis: axis.clone() },
                })
                .collect();
            let family: Vec<String> = comp
                .elements
                .iter()
                .map(|y| comp.presentation.format_word(y))
                .collect();
            let exact = comp.flag == ClosureFlag::Exact;
            let out = CompressOut {
                steps,
                presentation: presentation_out(&comp.presentation),
                family,
                exact,
            };
            let mut human = String::new();
            let _ = writeln!(human, "steps: {}", out.steps.len());
            for s in &out.steps {
                match s {
                    StepOut::Project { conjugator, kept } => {
                        let _ = writeln!(human, "  project conjugator: {} kept: {}", conjugator, braced(kept));
                    }
                    StepOut::Rewrite { axis } => {
                        let _ = writeln!(human, "  rewrite axis: {axis}");
                    }
                }
            }
            let _ = writeln!(human, "presentation:");
            if !out.presentation.vertices.is_empty() {
                let _ = writeln!(human, "{}", render_presentation(&out.presentation, "  "));
            }
            let _ = writeln!(human, "family:");
            for w in &out.family {
                let _ = writeln!(human, "  {w}");
            }
            let _ = write!(human, "exact: {}", out.exact);
            emit(json, &out, human);
            Ok(0)
        }
        Cmd::Tree { apex, words } => {
            let a = lookup_vertex(&p, &apex)?;
            let split = p.split_at(a)?;
            let mut actions = Vec::new();
            for w in &words {
                let x = parse_word(&p, w)?;
                let action = match split.classify(&x)? {
                    TreeAction::Elliptic { conjugator, fixed } => ActionOut::Elliptic {
                        conjugator: p.format_word(&conjugator),
                        fixed: match fixed {
                            FixedPoint::SideA => "side-a",
                            FixedPoint::SideB => "side-b",
                            FixedPoint::Edge => "edge",
                        }
                        .to_string(),
                    },
                    TreeAction::Hyperbolic { translation_length } => {
                        ActionOut::Hyperbolic { translation_length }
                    }
                };
                actions.push(WordActionOut {
                    word: w.clone(),
                    action,
                });
            }
            let out = TreeOut {
                apex: apex.clone(),
                side_a: labels(&p, split.a_side()),
                side_b: labels(&p, split.b_side()),
                edge: labels(&p, split.edge_set()),
                actions,
            };
            let mut human = format!(
                "apex: {}\nside A: {}\nside B: {}\nedge: {}",
                out.apex,
                braced(&out.side_a),
                braced(&out.side_b),
                braced(&out.edge)
            );
            for wa in &out.actions {
                match &wa.action {
                    ActionOut::Elliptic { conjugator, fixed } => {
                        let pretty = match fixed.as_str() {
                            "side-a" => "side A",
                            "side-b" => "side B",
                            other => other,
                        };
                        let _ = write!(
                            human,
                            "\n{}: elliptic ({}), conjugator {}",
                            wa.word, pretty, conjugator
                        );
                    }
                    ActionOut::Hyperbolic { translation_length } => {
                        let _ = write!(
                            human,
                            "\n{}: hyperbolic, translation length {}",
                            wa.word, translation_length
                        );
                    }
                }
            }
            emit(json, &out, human);
            Ok(0)
        }
        Cmd::Classify { words } => {
            let xs = parse_family(&p, &words)?;
            let c = classify(&p, &xs)?;
            let verdict = c.verdict.to_string();
            let mut out = ClassifyOut {
                verdict: verdict.clone(),
                kind: String::new(),
                order: None,
                rank: None,
                witness: None,
                certified: None,
                reason: None,
                budget_limited: c.budget_limited,
            };
            match &c.verdict {
                Verdict::Trivial => out.kind = "trivial".into(),
                Verdict::FiniteCyclic(n) => {
                    out.kind = "finite-cyclic".into();
                    out.order = Some(n.to_string());
                }
                Verdict::InfiniteCyclic => out.kind = "infinite-cyclic".into(),
                Verdict::FreeAbelian(r) => {
                    out.kind = "free-abelian".into();
                    out.rank = Some(*r);
                }
                Verdict::InfiniteDihedral => out.kind = "infinite-dihedral".into(),
                Verdict::ContainsNonabelianFree {
                    witness,
                    free_certified,
                } => {
                    out.kind = "contains-free".into();
                    out.witness = Some([
                        p.format_word(&witness.0),
                        p.format_word(&witness.1),
                    ]);
                    out.certified = Some(*free_certified);
                }
                Verdict::Unknown(reason) => {
                    out.kind = "unknown".into();
                    out.reason = Some(reason.clone());
                }
            }
            let mut human = format!("verdict: {verdict}");
            if let Some(w) = &out.witness {
                let _ = write!(human, "\nwitness: {}, {}", w[0], w[1]);
            }
            let _ = write!(human, "\nbudget-limited: {}", c.budget_limited);
            emit(json, &out, human);
            Ok(0)
        }
        Cmd::Selftest { .. } => unreachable!("handled before loading the group file"),
    }
}

fn run_selftest(
    seed: u64,
    suite: Option<&str>,
    cases: Option<usize>,
    json: bool,
) -> Result<i32, CliError> {
    let outcomes = match suite {
        Some(name) => vec![match cases {
            Some(c) => oracle::run_suite_scaled(name, seed, c)?,
            None => oracle::run_suite(name, seed)?,
        }],
        None => match cases {
            Some(c) => oracle::suite_names()
                .into_iter()
                .map(|n| oracle::run_suite_scaled(n, seed, c))
                .collect::<Result<Vec<_>, _>>()?,
            None => oracle::run_all(seed).outcomes,
        },
    };
    let report = oracle::SuiteReport {
        seed,
        outcomes,
    };
    let out = SelftestOut {
        seed,
        passed: report.passed(),
        suites: report
            .outcomes
            .iter()
            .map(|o| SuiteOut {
                name: o.name.to_string(),
                cases: o.cases,
                checks: o.checks,
                skipped: o.skipped,
                failures: o.failure_count,
                counterexamples: o.failures.clone(),
            })
            .collect(),
    };
    emit(json, &out, report.render());
    Ok(if report.passed() { 0 } else { 1 })
}

/// Entry point for the `gpcalc` binary. Returns the process exit code.
pub fn cli_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gpcalc: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIXED_PATH: &str = "\
# a of order three, c and b infinite
vertex a Z/3
vertex c Z
vertex b Z
edge a c
edge c b
";

    fn mixed() -> Presentation {
        parse_spec(MIXED_PATH, "<test>").unwrap()
    }

    #[test]
    fn spec_round_trips_structure() {
        let p = mixed();
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.group(VertexId(0)), CyclicGroup::Finite(3));
        assert_eq!(p.group(VertexId(1)), CyclicGroup::Infinite);
        assert!(p.graph().adjacent(VertexId(0), VertexId(1)));
        assert!(p.graph().adjacent(VertexId(1), VertexId(2)));
        assert!(!p.graph().adjacent(VertexId(0), VertexId(2)));
    }

    #[test]
    fn spec_errors_carry_line_numbers() {
        let cases: &[(&str, usize, &str)] = &[
            ("vertex a Z\nvertex a Z", 2, "duplicate"),
            ("vertex a Z/1", 1, "orders start at 2"),
            ("vertex a Z/x", 1, "bad group"),
            ("vertex 1a Z", 1, "bad label"),
            ("vertex a@1 Z", 1, "bad label"),
            ("edge a b", 1, "undeclared"),
            ("vertex a Z\nedge a a", 2, "itself"),
            ("frobnicate", 1, "unknown directive"),
            ("vertex a Z extra", 1, "trailing"),
        ];
        for (src, line, needle) in cases {
            match parse_spec(src, "<test>") {
                Err(ParseError::Spec { line: l, msg, .. }) => {
                    assert_eq!(l, *line, "wrong line for {src:?}");
                    assert!(msg.contains(needle), "message {msg:?} misses {needle:?}");
                }
                other => panic!("expected an error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn empty_spec_is_the_trivial_group() {
        let p = parse_spec("# nothing here\n", "<test>").unwrap();
        assert_eq!(p.vertex_count(), 0);
        assert!(parse_word(&p, "1").unwrap().is_identity());
    }

    #[test]
    fn words_parse_and_reduce() {
        let p = mixed();
        let cases: &[(&str, &str)] = &[
            ("a", "a^1"),
            ("a^-1", "a^2"),
            ("a * c * a^2 * c^-1", "1"),
            ("(a*c)^3", "c^3"),
            ("[a, b]", "a^2*b^-1*a^1*b^1"),
            ("[a, c]", "1"),
            ("c^1000000000000", "c^1000000000000"),
            ("1 * a * 1", "a^1"),
            ("b^2 * (c * b^-1)^0", "b^2"),
        ];
        for (src, expected) in cases {
            let x = parse_word(&p, src).unwrap();
            assert_eq!(p.format_word(&x), *expected, "for {src}");
        }
    }

    #[test]
    fn word_errors_point_at_columns() {
        let p = mixed();
        let cases: &[(&str, usize, &str)] = &[
            ("a * d", 5, "unknown generator"),
            ("a *", 4, "end of input"),
            ("2 * a", 1, "only `1`"),
            ("a ^ b", 5, "integer exponent"),
            ("(a * c", 7, "expected `)`"),
            ("[a c]", 4, "expected `,`"),
            ("a $ b", 3, "unexpected character"),
            ("a b", 3, "trailing input"),
            ("", 1, "empty word"),
        ];
        for (src, col, needle) in cases {
            match parse_word(&p, src) {
                Err(ParseError::Word { col: c, msg, .. }) => {
                    assert_eq!(c, *col, "wrong column for {src:?} ({msg})");
                    assert!(msg.contains(needle), "message {msg:?} misses {needle:?}");
                }
                other => panic!("expected an error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn vertex_sets_parse() {
        let p = mixed();
        assert_eq!(parse_vertex_set(&p, "").unwrap(), VertexSet::empty());
        assert_eq!(parse_vertex_set(&p, "{}").unwrap(), VertexSet::empty());
        let ab = parse_vertex_set(&p, "a, b").unwrap();
        assert_eq!(ab, parse_vertex_set(&p, "{b,a}").unwrap());
        assert_eq!(ab.len(), 2);
        assert!(parse_vertex_set(&p, "a, d").is_err());
        assert!(parse_vertex_set(&p, "{a").is_err());
    }

    #[test]
    fn commutator_matches_its_expansion() {
        let p = mixed();
        let direct = parse_word(&p, "[b, c]").unwrap();
        let spelled = parse_word(&p, "b^-1 * c^-1 * b * c").unwrap();
        assert_eq!(direct, spelled);
    }
}
