//! Line-oriented model and package language.
//!
//! ```text
//! model s1
//! basis one deg 0
//! basis dtheta deg 1
//! unit one
//! generator t
//! xi t -> 1 dtheta
//! ```
//!
//! Wedge entries are listed for pairs in declaration order and completed by graded commutativity;
//! unlisted products are zero except those with the unit. `wedge a b -> cap` marks a product that
//! leaves the model.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::equivariant::EquivariantElement;
use crate::error::{Error, Result};
use crate::model::{BasisElement, CdgaModel, LieActionData, ModelData, Product, TwistData};
use crate::morphisms::{ExtendedMorphism, ThomData};
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::sparse::SparseVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSource {
    pub text: String,
    pub origin: String,
}

impl ModelSource {
    pub fn inline(text: &str) -> Self {
        Self { text: text.into(), origin: "<inline>".into() }
    }

    pub fn from_file(path: &std::path::Path) -> std::io::Result<Self> {
        Ok(Self { text: std::fs::read_to_string(path)?, origin: path.display().to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    UnknownName,
    DuplicateName,
    DuplicateEntry,
    MalformedRational,
    WrongDegreeInTable,
    Structural,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Syntax => "syntax",
            Self::UnknownName => "unknown-name",
            Self::DuplicateName => "duplicate-name",
            Self::DuplicateEntry => "duplicate-entry",
            Self::MalformedRational => "malformed-rational",
            Self::WrongDegreeInTable => "wrong-degree",
            Self::Structural => "structural",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
    pub origin: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}:{}: {sev}[{}]: {}", self.origin, self.line, self.column, self.kind, self.message)
    }
}

#[derive(Clone, Debug)]
struct Token {
    text: String,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Vec<Token>> {
    let mut lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = Vec::new();
        let mut current = String::new();
        let mut start = 0;
        for (col, ch) in content.chars().enumerate() {
            if ch.is_whitespace() {
                if !current.is_empty() {
                    toks.push(Token { text: std::mem::take(&mut current), line: ln + 1, column: start + 1 });
                }
            } else {
                if current.is_empty() {
                    start = col;
                }
                current.push(ch);
            }
        }
        if !current.is_empty() {
            toks.push(Token { text: current, line: ln + 1, column: start + 1 });
        }
        if !toks.is_empty() {
            lines.push(toks);
        }
    }
    lines
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '^' | '\''))
}

struct Diags {
    origin: String,
    list: Vec<ParseDiagnostic>,
}

impl Diags {
    fn error(&mut self, kind: DiagnosticKind, at: (usize, usize), message: impl Into<String>) {
        self.list.push(ParseDiagnostic {
            severity: Severity::Error,
            kind,
            message: message.into(),
            origin: self.origin.clone(),
            line: at.0,
            column: at.1,
        });
    }

    fn has_errors(&self) -> bool {
        self.list.iter().any(|d| d.severity == Severity::Error)
    }
}

fn pos(t: &Token) -> (usize, usize) {
    (t.line, t.column)
}

fn end_pos(line: &[Token]) -> (usize, usize) {
    let last = &line[line.len() - 1];
    (last.line, last.column + last.text.chars().count())
}

/// Parses `0 | q name ((+|-) q name)*`, resolving names with `lookup`.
fn parse_combo(
    toks: &[Token],
    after: (usize, usize),
    lookup: &dyn Fn(&str) -> Option<usize>,
    diags: &mut Diags,
) -> Option<SparseVec> {
    if toks.is_empty() {
        diags.error(DiagnosticKind::Syntax, after, "expected a combination after `->`");
        return None;
    }
    if toks.len() == 1 && toks[0].text == "0" {
        return Some(SparseVec::new());
    }
    let mut out = SparseVec::new();
    let mut i = 0;
    let mut negate = false;
    loop {
        let Some(coef) = toks.get(i) else {
            diags.error(DiagnosticKind::Syntax, after, "expected a coefficient");
            return None;
        };
        let Some(mut q) = parse_rational(&coef.text) else {
            diags.error(DiagnosticKind::MalformedRational, pos(coef), format!("`{}` is not a rational", coef.text));
            return None;
        };
        if negate {
            q = -q;
        }
        let Some(name) = toks.get(i + 1) else {
            diags.error(DiagnosticKind::Syntax, pos(coef), "coefficient without a name");
            return None;
        };
        match lookup(&name.text) {
            Some(idx) => out.add_at(idx, &q),
            None => {
                diags.error(DiagnosticKind::UnknownName, pos(name), format!("unknown name `{}`", name.text));
                return None;
            }
        }
        i += 2;
        match toks.get(i) {
            None => return Some(out),
            Some(t) if t.text == "+" => negate = false,
            Some(t) if t.text == "-" => negate = true,
            Some(t) => {
                diags.error(DiagnosticKind::Syntax, pos(t), format!("expected `+` or `-`, found `{}`", t.text));
                return None;
            }
        }
        i += 1;
    }
}

fn expect_arrow(line: &[Token], at: usize, diags: &mut Diags) -> bool {
    match line.get(at) {
        Some(t) if t.text == "->" => true,
        Some(t) => {
            diags.error(DiagnosticKind::Syntax, pos(t), format!("expected `->`, found `{}`", t.text));
            false
        }
        None => {
            diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `->`");
            false
        }
    }
}

fn expect_len(line: &[Token], n: usize, diags: &mut Diags, usage: &str) -> bool {
    if line.len() == n {
        true
    } else {
        let at = if line.len() > n { pos(&line[n]) } else { end_pos(line) };
        diags.error(DiagnosticKind::Syntax, at, format!("expected `{usage}`"));
        false
    }
}

struct ModelBuilder {
    name: Option<String>,
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
    unit: Option<usize>,
    wedge: BTreeMap<(usize, usize), (Product, (usize, usize))>,
    d: BTreeMap<usize, SparseVec>,
    generators: Vec<String>,
    gindex: HashMap<String, usize>,
    iota: BTreeMap<(usize, usize), SparseVec>,
    brackets: BTreeMap<(usize, usize), SparseVec>,
    h: Option<SparseVec>,
    xi: BTreeMap<usize, SparseVec>,
}

fn degree_of(basis: &[BasisElement], v: &SparseVec) -> Option<Option<usize>> {
    // None: inhomogeneous; Some(None): zero
    let mut it = v.indices().map(|i| basis[i].degree);
    let Some(first) = it.next() else { return Some(None) };
    it.all(|d| d == first).then_some(Some(first))
}

fn check_degree(basis: &[BasisElement], v: &SparseVec, want: Option<usize>, at: (usize, usize), diags: &mut Diags) {
    match degree_of(basis, v) {
        Some(None) => {}
        Some(Some(d)) if Some(d) == want => {}
        _ => {
            let want = want.map_or("none (degree-0 source)".to_string(), |w| w.to_string());
            diags.error(DiagnosticKind::WrongDegreeInTable, at, format!("expected degree {want}"));
        }
    }
}

fn parse_model_lines(lines: &[Vec<Token>], diags: &mut Diags) -> Option<CdgaModel> {
    let mut b = ModelBuilder {
        name: None,
        basis: Vec::new(),
        index: HashMap::new(),
        unit: None,
        wedge: BTreeMap::new(),
        d: BTreeMap::new(),
        generators: Vec::new(),
        gindex: HashMap::new(),
        iota: BTreeMap::new(),
        brackets: BTreeMap::new(),
        h: None,
        xi: BTreeMap::new(),
    };
    let Some(first) = lines.first() else {
        diags.error(DiagnosticKind::Syntax, (1, 1), "empty source: expected `model NAME`");
        return None;
    };
    if first[0].text != "model" {
        diags.error(DiagnosticKind::Syntax, pos(&first[0]), "expected `model NAME` header");
        return None;
    }
    if expect_len(first, 2, diags, "model NAME") {
        if is_ident(&first[1].text) {
            b.name = Some(first[1].text.clone());
        } else {
            diags.error(DiagnosticKind::Syntax, pos(&first[1]), "invalid model name");
        }
    }
    let header_pos = pos(&first[0]);

    for line in &lines[1..] {
        let kw = &line[0];
        match kw.text.as_str() {
            "basis" => {
                if !expect_len(line, 4, diags, "basis NAME deg INT") {
                    continue;
                }
                let name = &line[1];
                if line[2].text != "deg" {
                    diags.error(DiagnosticKind::Syntax, pos(&line[2]), "expected `deg`");
                    continue;
                }
                if !is_ident(&name.text) {
                    diags.error(DiagnosticKind::Syntax, pos(name), format!("invalid name `{}`", name.text));
                    continue;
                }
                let Ok(deg) = line[3].text.parse::<usize>() else {
                    diags.error(DiagnosticKind::Syntax, pos(&line[3]), "degree must be a nonnegative integer");
                    continue;
                };
                if deg > 64 {
                    diags.error(DiagnosticKind::Syntax, pos(&line[3]), "degree too large");
                    continue;
                }
                if b.index.contains_key(&name.text) {
                    diags.error(DiagnosticKind::DuplicateName, pos(name), format!("`{}` already declared", name.text));
                    continue;
                }
                b.index.insert(name.text.clone(), b.basis.len());
                b.basis.push(BasisElement { name: name.text.clone(), degree: deg });
            }
            "unit" => {
                if !expect_len(line, 2, diags, "unit NAME") {
                    continue;
                }
                match b.index.get(&line[1].text) {
                    None => diags.error(DiagnosticKind::UnknownName, pos(&line[1]), format!("unknown name `{}`", line[1].text)),
                    Some(_) if b.unit.is_some() => diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "unit declared twice"),
                    Some(&i) if b.basis[i].degree != 0 => {
                        diags.error(DiagnosticKind::WrongDegreeInTable, pos(&line[1]), "unit must have degree 0")
                    }
                    Some(&i) => b.unit = Some(i),
                }
            }
            "generator" => {
                if !expect_len(line, 2, diags, "generator NAME") {
                    continue;
                }
                let name = &line[1];
                if !is_ident(&name.text) {
                    diags.error(DiagnosticKind::Syntax, pos(name), format!("invalid name `{}`", name.text));
                } else if b.gindex.contains_key(&name.text) {
                    diags.error(DiagnosticKind::DuplicateName, pos(name), format!("generator `{}` already declared", name.text));
                } else {
                    b.gindex.insert(name.text.clone(), b.generators.len());
                    b.generators.push(name.text.clone());
                }
            }
            "wedge" => {
                if line.len() < 4 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `wedge A B -> combo`");
                    continue;
                }
                let (Some(&x), Some(&y)) = (b.index.get(&line[1].text), b.index.get(&line[2].text)) else {
                    let bad = if b.index.contains_key(&line[1].text) { &line[2] } else { &line[1] };
                    diags.error(DiagnosticKind::UnknownName, pos(bad), format!("unknown name `{}`", bad.text));
                    continue;
                };
                if !expect_arrow(line, 3, diags) {
                    continue;
                }
                let product = if line.len() == 5 && line[4].text == "cap" {
                    Product::Absent
                } else {
                    let index = &b.index;
                    let Some(v) = parse_combo(&line[4..], end_pos(line), &|n| index.get(n).copied(), diags) else {
                        continue;
                    };
                    check_degree(&b.basis, &v, Some(b.basis[x].degree + b.basis[y].degree), pos(&line[4]), diags);
                    Product::Span(v)
                };
                let key = if x <= y { (x, y) } else { (y, x) };
                if b.wedge.contains_key(&key) {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "wedge entry given twice");
                    continue;
                }
                // store in declaration order, flipping the sign for reversed pairs
                let product = match product {
                    Product::Span(v) if x > y && (b.basis[x].degree * b.basis[y].degree) % 2 == 1 => {
                        Product::Span(v.negated())
                    }
                    other => other,
                };
                b.wedge.insert(key, (product, pos(kw)));
            }
            "d" => {
                if line.len() < 3 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `d A -> combo`");
                    continue;
                }
                let Some(&x) = b.index.get(&line[1].text) else {
                    diags.error(DiagnosticKind::UnknownName, pos(&line[1]), format!("unknown name `{}`", line[1].text));
                    continue;
                };
                if !expect_arrow(line, 2, diags) {
                    continue;
                }
                let index = &b.index;
                let Some(v) = parse_combo(&line[3..], end_pos(line), &|n| index.get(n).copied(), diags) else {
                    continue;
                };
                check_degree(&b.basis, &v, Some(b.basis[x].degree + 1), pos(&line[2]), diags);
                if b.d.insert(x, v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "differential given twice");
                }
            }
            "iota" => {
                if line.len() < 4 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `iota G A -> combo`");
                    continue;
                }
                let Some(&j) = b.gindex.get(&line[1].text) else {
                    diags.error(DiagnosticKind::UnknownName, pos(&line[1]), format!("unknown generator `{}`", line[1].text));
                    continue;
                };
                let Some(&x) = b.index.get(&line[2].text) else {
                    diags.error(DiagnosticKind::UnknownName, pos(&line[2]), format!("unknown name `{}`", line[2].text));
                    continue;
                };
                if !expect_arrow(line, 3, diags) {
                    continue;
                }
                let index = &b.index;
                let Some(v) = parse_combo(&line[4..], end_pos(line), &|n| index.get(n).copied(), diags) else {
                    continue;
                };
                check_degree(&b.basis, &v, b.basis[x].degree.checked_sub(1), pos(&line[3]), diags);
                if b.iota.insert((j, x), v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "contraction given twice");
                }
            }
            "lie_bracket" => {
                if line.len() < 4 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `lie_bracket G1 G2 -> combo`");
                    continue;
                }
                let (Some(&i), Some(&j)) = (b.gindex.get(&line[1].text), b.gindex.get(&line[2].text)) else {
                    let bad = if b.gindex.contains_key(&line[1].text) { &line[2] } else { &line[1] };
                    diags.error(DiagnosticKind::UnknownName, pos(bad), format!("unknown generator `{}`", bad.text));
                    continue;
                };
                if !expect_arrow(line, 3, diags) {
                    continue;
                }
                let gindex = &b.gindex;
                let Some(v) = parse_combo(&line[4..], end_pos(line), &|n| gindex.get(n).copied(), diags) else {
                    continue;
                };
                let (key, v) = if i <= j { ((i, j), v) } else { ((j, i), v.negated()) };
                if b.brackets.insert(key, v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "bracket given twice");
                }
            }
            "H" => {
                if !expect_arrow(line, 1, diags) {
                    continue;
                }
                let index = &b.index;
                let Some(v) = parse_combo(&line[2..], end_pos(line), &|n| index.get(n).copied(), diags) else {
                    continue;
                };
                check_degree(&b.basis, &v, Some(3), pos(&line[1]), diags);
                if b.h.replace(v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "H given twice");
                }
            }
            "xi" => {
                if line.len() < 3 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `xi G -> combo`");
                    continue;
                }
                let Some(&j) = b.gindex.get(&line[1].text) else {
                    diags.error(DiagnosticKind::UnknownName, pos(&line[1]), format!("unknown generator `{}`", line[1].text));
                    continue;
                };
                if !expect_arrow(line, 2, diags) {
                    continue;
                }
                let index = &b.index;
                let Some(v) = parse_combo(&line[3..], end_pos(line), &|n| index.get(n).copied(), diags) else {
                    continue;
                };
                check_degree(&b.basis, &v, Some(1), pos(&line[2]), diags);
                if b.xi.insert(j, v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "xi given twice");
                }
            }
            "model" => diags.error(DiagnosticKind::Syntax, pos(kw), "only one `model` header per file"),
            other => diags.error(DiagnosticKind::Syntax, pos(kw), format!("unknown declaration `{other}`")),
        }
    }

    let Some(unit) = b.unit else {
        diags.error(DiagnosticKind::Structural, header_pos, "no `unit` declared");
        return None;
    };
    if diags.has_errors() {
        return None;
    }
    let n = b.basis.len();
    let mut wedge = vec![vec![Product::Span(SparseVec::new()); n]; n];
    for a in 0..n {
        wedge[unit][a] = Product::Span(SparseVec::unit(a));
        wedge[a][unit] = Product::Span(SparseVec::unit(a));
    }
    for ((x, y), (p, _)) in &b.wedge {
        let (x, y) = (*x, *y);
        let sign_odd = (b.basis[x].degree * b.basis[y].degree) % 2 == 1;
        let mirrored = match p {
            Product::Span(v) if sign_odd => Product::Span(v.negated()),
            other => other.clone(),
        };
        wedge[x][y] = p.clone();
        wedge[y][x] = mirrored;
    }
    let g = b.generators.len();
    let mut iota = vec![vec![SparseVec::new(); n]; g];
    for ((j, x), v) in b.iota {
        iota[j][x] = v;
    }
    let mut c = vec![vec![vec![Scalar::zero(); g]; g]; g];
    for ((i, j), v) in &b.brackets {
        for (k, q) in v.iter() {
            c[*i][*j][k] = q.clone();
            if i != j {
                c[*j][*i][k] = -q.clone();
            }
        }
    }
    let mut d = vec![SparseVec::new(); n];
    for (x, v) in b.d {
        d[x] = v;
    }
    let xi = (0..g).map(|j| b.xi.get(&j).cloned().unwrap_or_default()).collect();
    let data = ModelData {
        name: b.name.unwrap_or_default(),
        basis: b.basis,
        unit,
        wedge,
        d,
        lie: LieActionData { generators: b.generators, iota, structure_constants: c },
        twist: TwistData { h: b.h.unwrap_or_default(), xi },
    };
    match CdgaModel::new(data) {
        Ok(m) => Some(m),
        Err(e) => {
            diags.error(DiagnosticKind::Structural, header_pos, e.to_string());
            None
        }
    }
}

pub fn parse_model(src: &ModelSource) -> Result<CdgaModel, Vec<ParseDiagnostic>> {
    let lines = tokenize(&src.text);
    let mut diags = Diags { origin: src.origin.clone(), list: Vec::new() };
    match parse_model_lines(&lines, &mut diags) {
        Some(m) if !diags.has_errors() => Ok(m),
        _ => {
            if diags.list.is_empty() {
                diags.error(DiagnosticKind::Syntax, (1, 1), "could not parse model");
            }
            Err(diags.list)
        }
    }
}

/// Parses inline text, wrapping diagnostics into [`Error::Parse`].
pub fn parse_model_str(text: &str) -> Result<CdgaModel> {
    parse_model(&ModelSource::inline(text)).map_err(Error::Parse)
}

/// Canonical text form; `parse_model(emit_model(m)) == m` for structurally valid models.
pub fn emit_model(m: &CdgaModel) -> ModelSource {
    use std::fmt::Write;
    let name = |i: usize| m.basis_name(i).to_string();
    let gname = |j: usize| m.generators()[j].clone();
    let mut s = String::new();
    let _ = writeln!(s, "model {}", m.name());
    for b in m.basis() {
        let _ = writeln!(s, "basis {} deg {}", b.name, b.degree);
    }
    let _ = writeln!(s, "unit {}", name(m.unit_index()));
    for g in m.generators() {
        let _ = writeln!(s, "generator {g}");
    }
    for a in 0..m.dim() {
        let img = m.d_image(a);
        if !img.is_zero() {
            let _ = writeln!(s, "d {} -> {}", name(a), combo_text(img, name));
        }
    }
    for a in 0..m.dim() {
        for c in a..m.dim() {
            let entry = m.wedge_entry(a, c);
            let default = if a == m.unit_index() || c == m.unit_index() {
                let other = if a == m.unit_index() { c } else { a };
                Product::Span(SparseVec::unit(other))
            } else {
                Product::Span(SparseVec::new())
            };
            if *entry != default {
                let rhs = match entry {
                    Product::Span(v) => combo_text(v, name),
                    Product::Absent => "cap".into(),
                };
                let _ = writeln!(s, "wedge {} {} -> {}", name(a), name(c), rhs);
            }
        }
    }
    for j in 0..m.generator_count() {
        for a in 0..m.dim() {
            let img = &m.lie().iota[j][a];
            if !img.is_zero() {
                let _ = writeln!(s, "iota {} {} -> {}", gname(j), name(a), combo_text(img, name));
            }
        }
    }
    for i in 0..m.generator_count() {
        for j in i..m.generator_count() {
            let v = SparseVec::from_pairs((0..m.generator_count()).map(|k| (k, m.structure_constant(i, j, k).clone())));
            if !v.is_zero() {
                let _ = writeln!(s, "lie_bracket {} {} -> {}", gname(i), gname(j), combo_text(&v, gname));
            }
        }
    }
    if !m.h().is_zero() {
        let _ = writeln!(s, "H -> {}", combo_text(m.h(), name));
    }
    for j in 0..m.generator_count() {
        if !m.xi(j).is_zero() {
            let _ = writeln!(s, "xi {} -> {}", gname(j), combo_text(m.xi(j), name));
        }
    }
    ModelSource { text: s, origin: format!("<emitted {}>", m.name()) }
}

/// Combo text with `+`/`-` separators.
pub fn combo_text(v: &SparseVec, name: impl Fn(usize) -> String) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        if k == 0 {
            s.push_str(&format!("{} {}", format_rational(c), name(i)));
        } else if c < &Scalar::zero() {
            s.push_str(&format!(" - {} {}", format_rational(&-c.clone()), name(i)));
        } else {
            s.push_str(&format!(" + {} {}", format_rational(c), name(i)));
        }
    }
    s
}

/// Morphisms and Thom data declared against already-parsed models.
#[derive(Clone, Debug)]
pub struct Package {
    pub name: String,
    pub morphisms: Vec<ExtendedMorphism>,
    pub thom: Vec<ThomData>,
}

impl Package {
    pub fn morphism(&self, name: &str) -> Option<&ExtendedMorphism> {
        self.morphisms.iter().find(|m| m.name() == name)
    }

    pub fn thom(&self, name: &str) -> Option<&ThomData> {
        self.thom.iter().find(|t| t.name == name)
    }
}

struct MorphismDraft<'a> {
    name: String,
    at: (usize, usize),
    source: &'a CdgaModel,
    target: &'a CdgaModel,
    columns: Vec<SparseVec>,
    mapped: Vec<bool>,
    b: Option<SparseVec>,
}

type RawTerm = (Vec<usize>, Vec<Token>, (usize, usize));

#[derive(Default)]
struct ThomDraft {
    name: String,
    at: (usize, usize),
    restriction: Option<Token>,
    projection: Option<Token>,
    thom_class: Vec<RawTerm>,
    euler: Vec<RawTerm>,
    integral: Option<Scalar>,
}

enum Block<'a> {
    None,
    Morphism(MorphismDraft<'a>),
    Thom(ThomDraft),
}

fn parse_exponent(t: &Token, diags: &mut Diags) -> Option<Vec<usize>> {
    let parts: Option<Vec<usize>> = t.text.split(',').map(|p| p.parse::<usize>().ok().filter(|e| *e <= 64)).collect();
    if parts.is_none() {
        diags.error(DiagnosticKind::Syntax, pos(t), "u-exponent must be an integer or a comma-separated list");
    }
    parts
}

fn resolve_terms(terms: &[RawTerm], model: &CdgaModel, diags: &mut Diags) -> Option<EquivariantElement> {
    let vars = model.generator_count();
    let mut e = EquivariantElement::zero(vars);
    let mut ok = true;
    for (exp, toks, at) in terms {
        if exp.len() != vars {
            diags.error(DiagnosticKind::Syntax, *at, format!("u-exponent needs {vars} entries"));
            ok = false;
            continue;
        }
        match parse_combo(toks, *at, &|n| model.index_of(n), diags) {
            Some(v) => e.add_term(exp.clone(), &v),
            None => ok = false,
        }
    }
    ok.then_some(e)
}

/// Parses a package. Models referenced by `from`/`to` are looked up by model name in `models`.
pub fn parse_package(src: &ModelSource, models: &[CdgaModel]) -> Result<Package, Vec<ParseDiagnostic>> {
    let lines = tokenize(&src.text);
    let mut diags = Diags { origin: src.origin.clone(), list: Vec::new() };
    let fail = |mut diags: Diags| {
        if diags.list.is_empty() {
            diags.error(DiagnosticKind::Syntax, (1, 1), "could not parse package");
        }
        Err(diags.list)
    };
    let Some(first) = lines.first() else {
        diags.error(DiagnosticKind::Syntax, (1, 1), "empty source: expected `package NAME`");
        return fail(diags);
    };
    if first[0].text != "package" || first.len() != 2 {
        diags.error(DiagnosticKind::Syntax, pos(&first[0]), "expected `package NAME` header");
        return fail(diags);
    }
    let name = first[1].text.clone();
    let model = |n: &str| models.iter().find(|m| m.name() == n);

    let mut morphism_drafts: Vec<MorphismDraft> = Vec::new();
    let mut thom_drafts: Vec<ThomDraft> = Vec::new();
    let mut block = Block::None;

    for line in &lines[1..] {
        let kw = &line[0];
        match kw.text.as_str() {
            "morphism" | "thom" => {
                match std::mem::replace(&mut block, Block::None) {
                    Block::Morphism(m) => morphism_drafts.push(m),
                    Block::Thom(t) => thom_drafts.push(t),
                    Block::None => {}
                }
                if kw.text == "thom" {
                    if expect_len(line, 2, &mut diags, "thom NAME") {
                        block = Block::Thom(ThomDraft { name: line[1].text.clone(), at: pos(kw), ..Default::default() });
                    }
                    continue;
                }
                if line.len() != 6 || line[2].text != "from" || line[4].text != "to" {
                    diags.error(DiagnosticKind::Syntax, pos(kw), "expected `morphism NAME from SOURCE to TARGET`");
                    continue;
                }
                let (Some(source), Some(target)) = (model(&line[3].text), model(&line[5].text)) else {
                    let bad = if model(&line[3].text).is_some() { &line[5] } else { &line[3] };
                    diags.error(DiagnosticKind::UnknownName, pos(bad), format!("unknown model `{}`", bad.text));
                    continue;
                };
                if morphism_drafts.iter().any(|m| m.name == line[1].text) {
                    diags.error(DiagnosticKind::DuplicateName, pos(&line[1]), format!("morphism `{}` already declared", line[1].text));
                    continue;
                }
                block = Block::Morphism(MorphismDraft {
                    name: line[1].text.clone(),
                    at: pos(kw),
                    source,
                    target,
                    columns: vec![SparseVec::new(); target.dim()],
                    mapped: vec![false; target.dim()],
                    b: None,
                });
            }
            "map" => {
                let Block::Morphism(m) = &mut block else {
                    diags.error(DiagnosticKind::Syntax, pos(kw), "`map` outside a morphism block");
                    continue;
                };
                if line.len() < 3 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), "expected `map TARGET -> combo`");
                    continue;
                }
                let Some(t) = m.target.index_of(&line[1].text) else {
                    diags.error(DiagnosticKind::UnknownName, pos(&line[1]), format!("unknown target basis `{}`", line[1].text));
                    continue;
                };
                if !expect_arrow(line, 2, &mut diags) {
                    continue;
                }
                let src = m.source;
                let Some(v) = parse_combo(&line[3..], end_pos(line), &|n| src.index_of(n), &mut diags) else {
                    continue;
                };
                check_degree(src.basis(), &v, Some(m.target.degree(t)), pos(&line[2]), &mut diags);
                if m.mapped[t] {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "image given twice");
                }
                m.mapped[t] = true;
                m.columns[t] = v;
            }
            "bform" => {
                let Block::Morphism(m) = &mut block else {
                    diags.error(DiagnosticKind::Syntax, pos(kw), "`bform` outside a morphism block");
                    continue;
                };
                if !expect_arrow(line, 1, &mut diags) {
                    continue;
                }
                let src = m.source;
                let Some(v) = parse_combo(&line[2..], end_pos(line), &|n| src.index_of(n), &mut diags) else {
                    continue;
                };
                check_degree(src.basis(), &v, Some(2), pos(&line[1]), &mut diags);
                if m.b.replace(v).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), "bform given twice");
                }
            }
            "restriction" | "projection" => {
                let Block::Thom(t) = &mut block else {
                    diags.error(DiagnosticKind::Syntax, pos(kw), format!("`{}` outside a thom block", kw.text));
                    continue;
                };
                if !expect_len(line, 2, &mut diags, &format!("{} MORPHISM", kw.text)) {
                    continue;
                }
                let slot = if kw.text == "restriction" { &mut t.restriction } else { &mut t.projection };
                if slot.replace(line[1].clone()).is_some() {
                    diags.error(DiagnosticKind::DuplicateEntry, pos(kw), format!("{} given twice", kw.text));
                }
            }
            "thom_class" | "euler" => {
                let Block::Thom(t) = &mut block else {
                    diags.error(DiagnosticKind::Syntax, pos(kw), format!("`{}` outside a thom block", kw.text));
                    continue;
                };
                if line.len() < 4 {
                    diags.error(DiagnosticKind::Syntax, end_pos(line), format!("expected `{} K -> combo`", kw.text));
                    continue;
                }
                let Some(exp) = parse_exponent(&line[1], &mut diags) else { continue };
                if !expect_arrow(line, 2, &mut diags) {
                    continue;
                }
                let list = if kw.text == "thom_class" { &mut t.thom_class } else { &mut t.euler };
                list.push((exp, line[3..].to_vec(), pos(&line[3])));
            }
            "integral" => {
                let Block::Thom(t) = &mut block else {
                    diags.error(DiagnosticKind::Syntax, pos(kw), "`integral` outside a thom block");
                    continue;
                };
                if !expect_len(line, 2, &mut diags, "integral RATIONAL") {
                    continue;
                }
                match parse_rational(&line[1].text) {
                    Some(q) => t.integral = Some(q),
                    None => diags.error(DiagnosticKind::MalformedRational, pos(&line[1]), "integral must be a rational"),
                }
            }
            other => diags.error(DiagnosticKind::Syntax, pos(kw), format!("unknown declaration `{other}`")),
        }
    }
    match block {
        Block::Morphism(m) => morphism_drafts.push(m),
        Block::Thom(t) => thom_drafts.push(t),
        Block::None => {}
    }
    if diags.has_errors() {
        return fail(diags);
    }

    let mut morphisms = Vec::new();
    for m in morphism_drafts {
        let b = m.b.unwrap_or_default();
        match ExtendedMorphism::new(&m.name, m.source.clone(), m.target.clone(), m.columns, b) {
            Ok(x) => morphisms.push(x),
            Err(e) => diags.error(DiagnosticKind::Structural, m.at, format!("morphism `{}`: {e}", m.name)),
        }
    }
    let mut thom = Vec::new();
    for t in thom_drafts {
        let find = |tok: &Option<Token>, what: &str, diags: &mut Diags| -> Option<ExtendedMorphism> {
            let Some(tok) = tok else {
                diags.error(DiagnosticKind::Structural, t.at, format!("thom `{}` has no {what}", t.name));
                return None;
            };
            let found = morphisms.iter().find(|m: &&ExtendedMorphism| m.name() == tok.text).cloned();
            if found.is_none() {
                diags.error(DiagnosticKind::UnknownName, pos(tok), format!("unknown morphism `{}`", tok.text));
            }
            found
        };
        let restriction = find(&t.restriction, "restriction", &mut diags);
        let projection = find(&t.projection, "projection", &mut diags);
        let (Some(restriction), Some(projection)) = (restriction, projection) else { continue };
        let Some(theta) = resolve_terms(&t.thom_class, restriction.target(), &mut diags) else { continue };
        let Some(euler) = resolve_terms(&t.euler, restriction.source(), &mut diags) else { continue };
        let integral = t.integral.clone().unwrap_or_else(crate::scalar::one);
        match ThomData::new(&t.name, restriction, projection, theta, euler, integral) {
            Ok(x) => thom.push(x),
            Err(e) => diags.error(DiagnosticKind::Structural, t.at, format!("thom `{}`: {e}", t.name)),
        }
    }
    if diags.has_errors() {
        return fail(diags);
    }
    Ok(Package { name, morphisms, thom })
}

pub fn parse_package_str(text: &str, models: &[CdgaModel]) -> Result<Package> {
    parse_package(&ModelSource::inline(text), models).map_err(Error::Parse)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S1: &str = "model s1\nbasis one deg 0\nbasis dtheta deg 1\nunit one\ngenerator t\nxi t -> 1 dtheta\n";

    #[test]
    fn parses_circle() {
        let m = parse_model_str(S1).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.wedge(&m.element("dtheta"), &m.element("dtheta")).unwrap().is_zero());
        assert_eq!(m.xi(0), &m.element("dtheta"));
    }

    #[test]
    fn unknown_name_has_position() {
        let err = parse_model(&ModelSource::inline(&format!("{S1}d one -> 1 e9\n"))).unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::UnknownName);
        assert_eq!((err[0].line, err[0].column), (7, 12));
    }

    #[test]
    fn rejects_floats_and_bad_degrees() {
        let err = parse_model(&ModelSource::inline(&format!("{S1}d one -> 0.5 dtheta\n"))).unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::MalformedRational);
        let err = parse_model(&ModelSource::inline(&format!("{S1}d dtheta -> 1 dtheta\n"))).unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::WrongDegreeInTable);
        let err = parse_model(&ModelSource::inline(&format!("{S1}basis one deg 0\n"))).unwrap_err();
        assert_eq!(err[0].kind, DiagnosticKind::DuplicateName);
    }

    #[test]
    fn round_trip() {
        let m = parse_model_str(S1).unwrap();
        let again = parse_model(&emit_model(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn garbage_never_panics() {
        for src in ["", "model", "model x\nwedge", "model x\nbasis a deg -1", "model x\nH ->", "\u{0}\u{1}->+-"] {
            assert!(parse_model(&ModelSource::inline(src)).is_err());
        }
    }
}
