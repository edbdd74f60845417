//! The line-oriented workbench file format.
//!
//! ```text
//! # comment
//! [group:Z2]
//! kind = free_abelian
//! rank = 2
//!
//! [weights:w1]
//! group = Z2
//! entries = (1,0):1, (0,1):1
//! ```
//!
//! Section kinds are `group`, `weights`, `cover`, `series` and `hom`. Names
//! are unique across the file and may be referenced before they are
//! defined. [`Workbench::to_text`] prints a canonical file that parses back
//! to an equal workbench.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::abelian::{IntegerMatrix, PresentedAbelian};
use crate::cover::{
    make_interval_cover, product_cover, CoverCertificate, ExplicitFamily, Family, IntervalFamily, ProductFamily,
};
use crate::group::{presented_element, GroupElement, GroupSpec, Homomorphism};
use crate::metric::{MetricContext, TruncationPolicy, WeightFunction};
use crate::rational::{format_rational, parse_rational};
use crate::solvable::{Bound, QuotientSpec, SeriesSpec, Witness};

/// A parse failure with a 1-based position and a one-line reason.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionKind {
    Group,
    Weights,
    Cover,
    Series,
    Hom,
}

impl SectionKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "group" => SectionKind::Group,
            "weights" => SectionKind::Weights,
            "cover" => SectionKind::Cover,
            "series" => SectionKind::Series,
            "hom" => SectionKind::Hom,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SectionKind::Group => "group",
            SectionKind::Weights => "weights",
            SectionKind::Cover => "cover",
            SectionKind::Series => "series",
            SectionKind::Hom => "hom",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            SectionKind::Group => &["kind", "rank", "order", "generators", "relations", "factors", "depth"],
            SectionKind::Weights => &["group", "entries", "weight", "truncation"],
            SectionKind::Cover => &["kind", "d", "r", "factors", "family", "weights"],
            SectionKind::Series => &["quotient", "polycyclic", "witness"],
            SectionKind::Hom => &["source", "target", "images"],
        }
    }

    fn repeatable(self, key: &str) -> bool {
        matches!(
            (self, key),
            (SectionKind::Cover, "family") | (SectionKind::Series, "quotient")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDef {
    pub spec: GroupSpec,
    /// Names of the factors of a direct product.
    pub factors: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightsDef {
    pub group: String,
    /// Entries as written, before symmetrization; `None` selects the
    /// default generating set.
    pub entries: Option<Vec<(GroupElement, BigRational)>>,
    /// Uniform factor applied to the default weights.
    pub weight: Option<BigRational>,
    pub truncation: TruncationPolicy,
    pub function: WeightFunction,
}

impl WeightsDef {
    pub fn context(&self) -> MetricContext {
        MetricContext::with_policy(self.function.clone(), self.truncation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverSpec {
    Interval { d: u64 },
    Product { factors: Vec<String> },
    Symbolic,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDef {
    pub spec: CoverSpec,
    /// Weights whose metric the cover is verified in.
    pub weights: Option<String>,
    pub certificate: CoverCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomDef {
    pub source: String,
    pub target: String,
    pub hom: Homomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Group(GroupDef),
    Weights(WeightsDef),
    Cover(CoverDef),
    Series(SeriesSpec),
    Hom(HomDef),
}

impl Item {
    pub fn kind(&self) -> SectionKind {
        match self {
            Item::Group(_) => SectionKind::Group,
            Item::Weights(_) => SectionKind::Weights,
            Item::Cover(_) => SectionKind::Cover,
            Item::Series(_) => SectionKind::Series,
            Item::Hom(_) => SectionKind::Hom,
        }
    }
}

/// All named definitions of a workbench file, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workbench {
    items: IndexMap<String, Item>,
}

impl Workbench {
    pub fn items(&self) -> impl Iterator<Item = (&str, &Item)> {
        self.items.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.get(name)
    }

    pub fn group(&self, name: &str) -> Option<&GroupSpec> {
        match self.items.get(name)? {
            Item::Group(g) => Some(&g.spec),
            _ => None,
        }
    }

    pub fn weights(&self, name: &str) -> Option<&WeightsDef> {
        match self.items.get(name)? {
            Item::Weights(w) => Some(w),
            _ => None,
        }
    }

    pub fn cover(&self, name: &str) -> Option<&CoverDef> {
        match self.items.get(name)? {
            Item::Cover(c) => Some(c),
            _ => None,
        }
    }

    pub fn series(&self, name: &str) -> Option<&SeriesSpec> {
        match self.items.get(name)? {
            Item::Series(s) => Some(s),
            _ => None,
        }
    }

    pub fn hom(&self, name: &str) -> Option<&HomDef> {
        match self.items.get(name)? {
            Item::Hom(h) => Some(h),
            _ => None,
        }
    }

    /// Names of all sections of one kind, in file order.
    pub fn names(&self, kind: SectionKind) -> Vec<&str> {
        self.items
            .iter()
            .filter(|(_, v)| v.kind() == kind)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Canonical text of the workbench.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, (name, item)) in self.items.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}:{}]", item.kind().name(), name);
            match item {
                Item::Group(g) => print_group(&mut out, g),
                Item::Weights(w) => print_weights(&mut out, w, self),
                Item::Cover(c) => print_cover(&mut out, c, self),
                Item::Series(s) => print_series(&mut out, s),
                Item::Hom(h) => {
                    let _ = writeln!(out, "source = {}", h.source);
                    let _ = writeln!(out, "target = {}", h.target);
                    if !h.hom.images().is_empty() {
                        let images: Vec<String> = h
                            .hom
                            .images()
                            .iter()
                            .map(|x| format_element(h.hom.target(), x))
                            .collect();
                        let _ = writeln!(out, "images = {}", images.join(", "));
                    }
                }
            }
        }
        out
    }
}

fn print_group(out: &mut String, g: &GroupDef) {
    let _ = match &g.spec {
        GroupSpec::FreeAbelian { rank } => writeln!(out, "kind = free_abelian\nrank = {rank}"),
        GroupSpec::Free { rank } => writeln!(out, "kind = free\nrank = {rank}"),
        GroupSpec::FiniteCyclic { order } => writeln!(out, "kind = finite_cyclic\norder = {order}"),
        GroupSpec::PresentedAbelian(p) => {
            let _ = writeln!(out, "kind = presented_abelian\ngenerators = {}", p.generators());
            if p.relations().rows() > 0 {
                let _ = writeln!(out, "relations = {}", format_matrix(p.relations()));
            }
            Ok(())
        }
        GroupSpec::Heisenberg => writeln!(out, "kind = heisenberg"),
        GroupSpec::DirectProduct(_) => writeln!(
            out,
            "kind = direct_product\nfactors = {}",
            g.factors.as_deref().unwrap_or_default().join(", ")
        ),
        GroupSpec::RationalsTruncated { depth } => writeln!(out, "kind = rationals_truncated\ndepth = {depth}"),
    };
}

fn print_weights(out: &mut String, w: &WeightsDef, wb: &Workbench) {
    let _ = writeln!(out, "group = {}", w.group);
    let group = wb.group(&w.group).expect("resolved");
    if let Some(entries) = &w.entries {
        let list: Vec<String> = entries
            .iter()
            .map(|(g, q)| format!("{}:{}", format_element(group, g), format_rational(q)))
            .collect();
        let _ = writeln!(out, "entries = {}", list.join(", "));
    }
    if let Some(q) = &w.weight {
        let _ = writeln!(out, "weight = {}", format_rational(q));
    }
    if w.truncation == TruncationPolicy::Intrinsic {
        let _ = writeln!(out, "truncation = intrinsic");
    }
}

fn format_interval(f: &IntervalFamily) -> String {
    format!("interval({},{},{})", f.length(), f.period(), f.offset())
}

fn print_cover(out: &mut String, c: &CoverDef, wb: &Workbench) {
    let cert = &c.certificate;
    match &c.spec {
        CoverSpec::Interval { d } => {
            let _ = writeln!(out, "kind = interval\nd = {d}");
        }
        CoverSpec::Product { factors } => {
            let _ = writeln!(out, "kind = product\nfactors = {}", factors.join(", "));
        }
        CoverSpec::Symbolic | CoverSpec::Explicit => {
            let kind = if c.spec == CoverSpec::Symbolic {
                "symbolic"
            } else {
                "explicit"
            };
            let _ = writeln!(out, "kind = {kind}");
            let _ = writeln!(out, "d = {}", format_rational(cert.scale()));
            let _ = writeln!(out, "r = {}", format_rational(cert.bound()));
        }
    }
    if let Some(w) = &c.weights {
        let _ = writeln!(out, "weights = {w}");
    }
    if matches!(c.spec, CoverSpec::Symbolic | CoverSpec::Explicit) {
        let group = c
            .weights
            .as_deref()
            .and_then(|w| wb.weights(w))
            .map(|w| w.function.group());
        for f in cert.families() {
            let text = match f {
                Family::Interval(i) => format_interval(i),
                Family::Product(p) => {
                    let parts: Vec<String> = p.factors().iter().map(format_interval).collect();
                    format!("product({})", parts.join(", "))
                }
                Family::Explicit(e) => {
                    let group = group.expect("explicit covers name their weights");
                    let sets: Vec<String> = e
                        .sets()
                        .iter()
                        .map(|s| {
                            let xs: Vec<String> = s.iter().map(|x| format_element(group, x)).collect();
                            format!("{{{}}}", xs.join(", "))
                        })
                        .collect();
                    sets.join(", ")
                }
            };
            if !text.is_empty() {
                let _ = writeln!(out, "family = {text}");
            }
        }
    }
}

fn print_series(out: &mut String, s: &SeriesSpec) {
    for q in s.quotients() {
        let text = match q {
            QuotientSpec::Presented(p) if p.relations().rows() == 0 => format!("free {}", p.generators()),
            QuotientSpec::Presented(p) => format!("presented {} [{}]", p.generators(), format_matrix(p.relations())),
            QuotientSpec::DeclaredRank {
                torsion_only: true,
                justification,
                ..
            } => format!("torsion : {justification}"),
            QuotientSpec::DeclaredRank {
                rank, justification, ..
            } => format!("rank {rank} : {justification}"),
        };
        let _ = writeln!(out, "quotient = {}", text.trim_end());
    }
    if s.polycyclic_flag() {
        let _ = writeln!(out, "polycyclic = true");
    }
    if let Some(w) = s.witness() {
        let _ = writeln!(out, "witness = {} : {}", w.rank, w.justification);
    }
}

fn format_matrix(m: &IntegerMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Text of an element in the workbench syntax; presented abelian elements
/// are written as generator exponents.
pub fn format_element(group: &GroupSpec, x: &GroupElement) -> String {
    match (group, x) {
        (GroupSpec::PresentedAbelian(p), GroupElement::Vector(y)) => {
            let y: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
            let e: Vec<String> = p.exponents(&y).iter().map(ToString::to_string).collect();
            if e.len() == 1 {
                e[0].clone()
            } else {
                format!("({})", e.join(","))
            }
        }
        (GroupSpec::DirectProduct(fs), GroupElement::Tuple(xs)) if fs.len() == xs.len() => {
            let parts: Vec<String> = fs.iter().zip(xs).map(|(f, x)| format_element(f, x)).collect();
            format!("<{}>", parts.join(", "))
        }
        _ => x.to_string(),
    }
}

/// Splits on `sep` outside brackets of every kind.
pub fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '[' | '{' | '<' => depth += 1,
            ')' | ']' | '}' | '>' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts
}

fn strip_delims(text: &str, open: char, close: char) -> Option<&str> {
    let t = text.trim();
    t.strip_prefix(open)?.strip_suffix(close).map(str::trim)
}

fn parse_int_list(text: &str) -> std::result::Result<Vec<i64>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| format!("expected an integer, got '{}'", s.trim()))
        })
        .collect()
}

/// Parses an element of `group` from the workbench syntax.
pub fn parse_element(group: &GroupSpec, text: &str) -> std::result::Result<GroupElement, String> {
    let t = text.trim();
    let x = match group {
        GroupSpec::FreeAbelian { rank } => {
            let v = match strip_delims(t, '(', ')') {
                Some(inner) => parse_int_list(inner)?,
                None if *rank == 1 => parse_int_list(t)?,
                None => return Err(format!("expected ({} comma-separated integers), got '{t}'", rank)),
            };
            if v.len() != *rank {
                return Err(format!("expected {rank} coordinates, got {}", v.len()));
            }
            GroupElement::Vector(v)
        }
        GroupSpec::Free { rank } => {
            let inner = strip_delims(t, '[', ']').ok_or_else(|| format!("expected a word like [1,-2], got '{t}'"))?;
            let mut x = group.identity();
            for letter in parse_int_list(inner)? {
                if letter == 0 || letter.unsigned_abs() as usize > *rank {
                    return Err(format!("letter {letter} is not ±1..±{rank}"));
                }
                x = group
                    .multiply(&x, &GroupElement::Word(vec![letter as i32]))
                    .map_err(|e| e.to_string())?;
            }
            x
        }
        GroupSpec::FiniteCyclic { order } => {
            let n: i128 = t.parse().map_err(|_| format!("expected an integer, got '{t}'"))?;
            GroupElement::Residue(n.rem_euclid(*order as i128) as u64)
        }
        GroupSpec::PresentedAbelian(p) => {
            let v = match strip_delims(t, '(', ')') {
                Some(inner) => parse_int_list(inner)?,
                None => parse_int_list(t)?,
            };
            let e: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
            presented_element(p, &e).map_err(|e| e.to_string())?
        }
        GroupSpec::Heisenberg => {
            let inner = strip_delims(t, '(', ')').ok_or_else(|| format!("expected (a,b,c), got '{t}'"))?;
            match parse_int_list(inner)?.as_slice() {
                &[a, b, c] => GroupElement::Triple(a, b, c),
                _ => return Err(format!("expected three integers, got '{t}'")),
            }
        }
        GroupSpec::DirectProduct(fs) => {
            let inner = strip_delims(t, '<', '>').ok_or_else(|| format!("expected <x, y, ...>, got '{t}'"))?;
            let parts = if fs.is_empty() && inner.is_empty() {
                Vec::new()
            } else {
                split_top(inner, ',')
            };
            if parts.len() != fs.len() {
                return Err(format!("expected {} components, got {}", fs.len(), parts.len()));
            }
            GroupElement::Tuple(
                fs.iter()
                    .zip(parts)
                    .map(|(f, p)| parse_element(f, p))
                    .collect::<std::result::Result<_, _>>()?,
            )
        }
        GroupSpec::RationalsTruncated { .. } => {
            GroupElement::Rational(parse_rational(t).ok_or_else(|| format!("expected a rational p/q, got '{t}'"))?)
        }
    };
    group.check(&x).map_err(|e| e.to_string())?;
    Ok(x)
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    column: usize,
}

struct RawSection {
    kind: SectionKind,
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl RawSection {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: self.line,
            column: 1,
            message: message.into(),
        })
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn all<'k>(&'k self, key: &'k str) -> impl Iterator<Item = &'k Entry> + 'k {
        self.entries.iter().filter(move |e| e.key == key)
    }

    fn require(&self, key: &str) -> PResult<&Entry> {
        self.get(key).map_or_else(
            || self.err(format!("{} section '{}' needs '{key}'", self.kind.name(), self.name)),
            Ok,
        )
    }

    fn forbid_others(&self, allowed: &[&str]) -> PResult<()> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return e.err(format!("'{}' does not apply here", e.key));
            }
        }
        Ok(())
    }
}

impl Entry {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    fn wrap<T, E: ToString>(&self, r: std::result::Result<T, E>) -> PResult<T> {
        r.or_else(|e| self.err(e.to_string()))
    }

    fn u64(&self) -> PResult<u64> {
        self.value
            .parse()
            .or_else(|_| self.err(format!("expected a nonnegative integer, got '{}'", self.value)))
    }

    fn rational(&self) -> PResult<BigRational> {
        parse_rational(&self.value).map_or_else(
            || self.err(format!("expected a rational p/q, got '{}'", self.value)),
            Ok,
        )
    }

    fn names(&self) -> Vec<String> {
        split_top(&self.value, ',').into_iter().map(str::to_string).collect()
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn lex(text: &str) -> PResult<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let fail = |column: usize, message: String| ParseError { line, column, message };
        if trimmed.starts_with('[') {
            let inner = trimmed
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| fail(indent + 1, "section header must end with ']'".into()))?;
            let (kind, name) = inner
                .split_once(':')
                .ok_or_else(|| fail(indent + 2, "section header must be [kind:name]".into()))?;
            let kind = SectionKind::parse(kind.trim()).ok_or_else(|| {
                fail(
                    indent + 2,
                    format!(
                        "unknown section kind '{}' (expected group, weights, cover, series or hom)",
                        kind.trim()
                    ),
                )
            })?;
            let name = name.trim();
            if !is_name(name) {
                return Err(fail(indent + 2, format!("invalid section name '{name}'")));
            }
            if let Some(prev) = seen.insert(name.to_string(), line) {
                return Err(fail(
                    indent + 2,
                    format!("name '{name}' already defined on line {prev}"),
                ));
            }
            sections.push(RawSection {
                kind,
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| fail(indent + 1, "expected 'key = value' or a [kind:name] header".into()))?;
        let key = key.trim();
        let value_start = body.find('=').expect("split succeeded") + 1;
        let column = value_start + (body[value_start..].len() - body[value_start..].trim_start().len()) + 1;
        let section = sections
            .last_mut()
            .ok_or_else(|| fail(indent + 1, "key outside of any section".into()))?;
        if !section.kind.keys().contains(&key) {
            return Err(fail(
                indent + 1,
                format!("unknown key '{key}' in a {} section", section.kind.name()),
            ));
        }
        if !section.kind.repeatable(key) && section.entries.iter().any(|e| e.key == key) {
            return Err(fail(indent + 1, format!("duplicate key '{key}'")));
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(fail(column, format!("missing value for '{key}'")));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
            column,
        });
    }
    Ok(sections)
}

struct Resolver<'a> {
    raw: IndexMap<String, &'a RawSection>,
    done: HashMap<String, Item>,
    visiting: Vec<String>,
}

impl<'a> Resolver<'a> {
    fn lookup(&self, entry: &Entry, name: &str, kind: SectionKind) -> PResult<&'a RawSection> {
        match self.raw.get(name) {
            Some(s) if s.kind == kind => Ok(s),
            Some(s) => entry.err(format!(
                "'{name}' is a {} section, expected {}",
                s.kind.name(),
                kind.name()
            )),
            None => entry.err(format!("unresolved reference to {} '{name}'", kind.name())),
        }
    }

    fn resolve(&mut self, section: &'a RawSection) -> PResult<Item> {
        if let Some(item) = self.done.get(&section.name) {
            return Ok(item.clone());
        }
        if self.visiting.contains(&section.name) {
            return section.err(format!(
                "reference cycle: {} -> {}",
                self.visiting.join(" -> "),
                section.name
            ));
        }
        self.visiting.push(section.name.clone());
        let item = match section.kind {
            SectionKind::Group => Item::Group(self.group(section)?),
            SectionKind::Weights => Item::Weights(self.weights(section)?),
            SectionKind::Cover => Item::Cover(self.cover(section)?),
            SectionKind::Series => Item::Series(series(section)?),
            SectionKind::Hom => Item::Hom(self.hom(section)?),
        };
        self.visiting.pop();
        self.done.insert(section.name.clone(), item.clone());
        Ok(item)
    }

    fn group_ref(&mut self, entry: &Entry, name: &str) -> PResult<GroupSpec> {
        let s = self.lookup(entry, name, SectionKind::Group)?;
        match self.resolve(s)? {
            Item::Group(g) => Ok(g.spec),
            _ => unreachable!(),
        }
    }

    fn weights_ref(&mut self, entry: &Entry, name: &str) -> PResult<WeightsDef> {
        let s = self.lookup(entry, name, SectionKind::Weights)?;
        match self.resolve(s)? {
            Item::Weights(w) => Ok(w),
            _ => unreachable!(),
        }
    }

    fn group(&mut self, s: &RawSection) -> PResult<GroupDef> {
        let kind = s.require("kind")?;
        let mut factors = None;
        let spec = match kind.value.as_str() {
            "free_abelian" | "free" => {
                s.forbid_others(&["kind", "rank"])?;
                let rank = s.require("rank")?.u64()? as usize;
                if kind.value == "free" {
                    GroupSpec::Free { rank }
                } else {
                    GroupSpec::FreeAbelian { rank }
                }
            }
            "finite_cyclic" => {
                s.forbid_others(&["kind", "order"])?;
                GroupSpec::FiniteCyclic {
                    order: s.require("order")?.u64()?,
                }
            }
            "presented_abelian" => {
                s.forbid_others(&["kind", "generators", "relations"])?;
                let gens_entry = s.require("generators")?;
                let n = gens_entry.u64()? as usize;
                let rows = match s.get("relations") {
                    Some(e) => e.wrap(parse_matrix(&e.value, n))?,
                    None => IntegerMatrix::zeros(0, n),
                };
                GroupSpec::PresentedAbelian(gens_entry.wrap(PresentedAbelian::new(n, rows))?)
            }
            "heisenberg" => {
                s.forbid_others(&["kind"])?;
                GroupSpec::Heisenberg
            }
            "direct_product" => {
                s.forbid_others(&["kind", "factors"])?;
                let e = s.require("factors")?;
                let names = e.names();
                let mut specs = Vec::with_capacity(names.len());
                for n in &names {
                    specs.push(self.group_ref(e, n)?);
                }
                factors = Some(names);
                GroupSpec::DirectProduct(specs)
            }
            "rationals_truncated" => {
                s.forbid_others(&["kind", "depth"])?;
                let e = s.require("depth")?;
                GroupSpec::RationalsTruncated {
                    depth: e.wrap(u32::try_from(e.u64()?))?,
                }
            }
            other => return kind.err(format!("unknown group kind '{other}'")),
        };
        kind.wrap(spec.validate())?;
        Ok(GroupDef { spec, factors })
    }

    fn weights(&mut self, s: &RawSection) -> PResult<WeightsDef> {
        let g = s.require("group")?;
        let group_name = g.value.clone();
        let group = self.group_ref(g, &group_name)?;
        let truncation = match s.get("truncation") {
            None => TruncationPolicy::Checked,
            Some(e) => match e.value.as_str() {
                "checked" => TruncationPolicy::Checked,
                "intrinsic" => TruncationPolicy::Intrinsic,
                other => return e.err(format!("truncation must be checked or intrinsic, got '{other}'")),
            },
        };
        let weight = match s.get("weight") {
            Some(e) => {
                let q = e.rational()?;
                if !q.is_positive() {
                    return e.err("weights must be positive");
                }
                Some(q)
            }
            None => None,
        };
        let (entries, function) = match s.get("entries") {
            Some(e) => {
                if let Some(w) = s.get("weight") {
                    return w.err("'weight' scales the default generators and cannot be combined with 'entries'");
                }
                let mut list = Vec::new();
                for item in split_top(&e.value, ',') {
                    let (elem, w) = item
                        .rsplit_once(':')
                        .map_or_else(|| e.err(format!("entry '{item}' must be element:weight")), Ok)?;
                    let x = e.wrap(parse_element(&group, elem))?;
                    let q = parse_rational(w.trim())
                        .map_or_else(|| e.err(format!("expected a rational weight, got '{}'", w.trim())), Ok)?;
                    list.push((x, q));
                }
                let f = e.wrap(WeightFunction::new(group, list.clone()))?;
                (Some(list), f)
            }
            None => {
                let factor = weight
                    .clone()
                    .unwrap_or_else(|| BigRational::from_integer(BigInt::from(1)));
                (None, g.wrap(WeightFunction::standard_scaled(group, factor))?)
            }
        };
        Ok(WeightsDef {
            group: group_name,
            entries,
            weight,
            truncation,
            function,
        })
    }

    fn cover(&mut self, s: &RawSection) -> PResult<CoverDef> {
        let kind = s.require("kind")?;
        let weights = s.get("weights").map(|e| e.value.clone());
        let wdef = match s.get("weights") {
            Some(e) => Some(self.weights_ref(e, &e.value)?),
            None => None,
        };
        let scale_bound = |s: &RawSection| -> PResult<(BigRational, BigRational)> {
            Ok((s.require("d")?.rational()?, s.require("r")?.rational()?))
        };
        let (spec, certificate) = match kind.value.as_str() {
            "interval" => {
                s.forbid_others(&["kind", "d", "weights"])?;
                let e = s.require("d")?;
                let d = e.u64()?;
                (CoverSpec::Interval { d }, e.wrap(make_interval_cover(d))?)
            }
            "product" => {
                s.forbid_others(&["kind", "factors", "weights"])?;
                let e = s.require("factors")?;
                let names = e.names();
                let mut acc: Option<CoverCertificate> = None;
                for n in &names {
                    let sec = self.lookup(e, n, SectionKind::Cover)?;
                    let Item::Cover(c) = self.resolve(sec)? else {
                        unreachable!()
                    };
                    acc = Some(match acc {
                        None => c.certificate,
                        Some(a) => e.wrap(product_cover(&a, &c.certificate))?,
                    });
                }
                (
                    CoverSpec::Product { factors: names },
                    acc.map_or_else(|| e.err("no factors"), Ok)?,
                )
            }
            "symbolic" => {
                s.forbid_others(&["kind", "d", "r", "family", "weights"])?;
                let (d, r) = scale_bound(s)?;
                let mut families = Vec::new();
                for e in s.all("family") {
                    families.push(e.wrap(parse_symbolic_family(&e.value))?);
                }
                (
                    CoverSpec::Symbolic,
                    s.require("kind")?.wrap(CoverCertificate::new(d, r, families))?,
                )
            }
            "explicit" => {
                s.forbid_others(&["kind", "d", "r", "family", "weights"])?;
                let Some(w) = &wdef else {
                    return s.err("explicit covers need 'weights' to interpret their elements");
                };
                let group = w.function.group().clone();
                let (d, r) = scale_bound(s)?;
                let mut families = Vec::new();
                for e in s.all("family") {
                    let mut sets = Vec::new();
                    for part in split_top(&e.value, ',') {
                        let inner = strip_delims(part, '{', '}')
                            .map_or_else(|| e.err(format!("expected a set {{x, y, ...}}, got '{part}'")), Ok)?;
                        let mut set = std::collections::BTreeSet::new();
                        if !inner.is_empty() {
                            for x in split_top(inner, ',') {
                                set.insert(e.wrap(parse_element(&group, x))?);
                            }
                        }
                        sets.push(set);
                    }
                    families.push(Family::Explicit(e.wrap(ExplicitFamily::new(sets))?));
                }
                (CoverSpec::Explicit, kind.wrap(CoverCertificate::new(d, r, families))?)
            }
            other => return kind.err(format!("unknown cover kind '{other}'")),
        };
        Ok(CoverDef {
            spec,
            weights,
            certificate,
        })
    }

    fn hom(&mut self, s: &RawSection) -> PResult<HomDef> {
        let se = s.require("source")?;
        let te = s.require("target")?;
        let source = self.group_ref(se, &se.value)?;
        let target = self.group_ref(te, &te.value)?;
        let images = match s.get("images") {
            Some(e) => split_top(&e.value, ',')
                .into_iter()
                .map(|x| e.wrap(parse_element(&target, x)))
                .collect::<PResult<Vec<_>>>()?,
            None => Vec::new(),
        };
        let at = s.get("images").unwrap_or(se);
        let hom = at.wrap(Homomorphism::new(source, target, images))?;
        Ok(HomDef {
            source: se.value.clone(),
            target: te.value.clone(),
            hom,
        })
    }
}

fn series(s: &RawSection) -> PResult<SeriesSpec> {
    let mut quotients = Vec::new();
    for e in s.all("quotient") {
        quotients.push(e.wrap(parse_quotient(&e.value))?);
    }
    let polycyclic = match s.get("polycyclic") {
        None => false,
        Some(e) => match e.value.as_str() {
            "true" => true,
            "false" => false,
            other => return e.err(format!("polycyclic must be true or false, got '{other}'")),
        },
    };
    let witness = match s.get("witness") {
        None => None,
        Some(e) => {
            let (rank, just) = e.value.split_once(':').unwrap_or((&e.value, ""));
            let rank = rank
                .trim()
                .parse()
                .or_else(|_| e.err(format!("witness rank must be an integer, got '{}'", rank.trim())))?;
            Some(Witness {
                rank,
                justification: just.trim().to_string(),
            })
        }
    };
    let at = s.get("polycyclic").or_else(|| s.get("quotient"));
    match at {
        Some(e) => e.wrap(SeriesSpec::new(s.name.clone(), quotients, polycyclic, witness)),
        None => SeriesSpec::new(s.name.clone(), quotients, polycyclic, witness).or_else(|e| s.err(e.to_string())),
    }
}

fn parse_matrix(text: &str, cols: usize) -> std::result::Result<IntegerMatrix, String> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(IntegerMatrix::zeros(0, cols));
    }
    let rows = t
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<BigInt>()
                        .map_err(|_| format!("expected an integer, got '{}'", x.trim()))
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    IntegerMatrix::from_rows(cols, &rows).map_err(|e| e.to_string())
}

fn parse_interval(text: &str) -> std::result::Result<IntervalFamily, String> {
    let inner = text
        .trim()
        .strip_prefix("interval")
        .and_then(|s| strip_delims(s, '(', ')'))
        .ok_or_else(|| format!("expected interval(L,P,o), got '{}'", text.trim()))?;
    let v: Vec<&str> = inner.split(',').map(str::trim).collect();
    let [l, p, o] = v.as_slice() else {
        return Err(format!("interval needs three integers, got '{inner}'"));
    };
    let num = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| format!("expected a positive integer, got '{s}'"))
    };
    IntervalFamily::new(
        num(l)?,
        num(p)?,
        o.parse::<i64>()
            .map_err(|_| format!("expected an integer offset, got '{o}'"))?,
    )
    .map_err(|e| e.to_string())
}

fn parse_symbolic_family(text: &str) -> std::result::Result<Family, String> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("product") {
        let inner = strip_delims(rest, '(', ')').ok_or_else(|| format!("expected product(...), got '{t}'"))?;
        let factors = if inner.is_empty() {
            Vec::new()
        } else {
            split_top(inner, ',')
                .into_iter()
                .map(parse_interval)
                .collect::<std::result::Result<_, _>>()?
        };
        Ok(Family::Product(ProductFamily::new(factors)))
    } else {
        parse_interval(t).map(Family::Interval)
    }
}

fn parse_quotient(text: &str) -> std::result::Result<QuotientSpec, String> {
    let t = text.trim();
    let (head, justification) = match t.split_once(':') {
        Some((h, j)) => (h.trim(), j.trim().to_string()),
        None => (t, String::new()),
    };
    let mut words = head.splitn(2, char::is_whitespace);
    let word = words.next().unwrap_or("");
    let rest = words.next().unwrap_or("").trim();
    match word {
        "free" => {
            let n = rest
                .parse::<usize>()
                .map_err(|_| format!("expected 'free N', got '{t}'"))?;
            QuotientSpec::free(n).map_err(|e| e.to_string())
        }
        "presented" => {
            let (n, m) = rest
                .split_once('[')
                .ok_or_else(|| format!("expected 'presented N [rows]', got '{t}'"))?;
            let n = n
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("expected a generator count, got '{}'", n.trim()))?;
            let m = m
                .trim()
                .strip_suffix(']')
                .ok_or_else(|| "relations must end with ']'".to_string())?;
            let p = PresentedAbelian::new(n, parse_matrix(m, n)?).map_err(|e| e.to_string())?;
            Ok(QuotientSpec::Presented(p))
        }
        "rank" => {
            let rank = match rest {
                "inf" => Bound::Infinite,
                r => Bound::Finite(r.parse().map_err(|_| format!("expected a rank or 'inf', got '{r}'"))?),
            };
            Ok(QuotientSpec::declared(rank, justification))
        }
        "torsion" if rest.is_empty() => Ok(QuotientSpec::torsion(justification)),
        _ => Err(format!(
            "quotient must be 'free N', 'presented N [rows]', 'rank R : why' or 'torsion : why', got '{t}'"
        )),
    }
}

/// Parses a workbench file.
pub fn parse(text: &str) -> PResult<Workbench> {
    let sections = lex(text)?;
    let mut resolver = Resolver {
        raw: sections.iter().map(|s| (s.name.clone(), s)).collect(),
        done: HashMap::new(),
        visiting: Vec::new(),
    };
    let mut items = IndexMap::new();
    for s in &sections {
        let item = resolver.resolve(s)?;
        items.insert(s.name.clone(), item);
    }
    Ok(Workbench { items })
}
