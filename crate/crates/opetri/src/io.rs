//! A small text format for documents of named open nets, dot export, and
//! the marking syntax used by command-line flags.
//!
//! A document looks like this:
//!
//! ```text
//! opennet 1
//!
//! net relay {
//!   places A B C
//!   transition step : A + B -> 2*C
//!   inputs 1 -> A, 2 -> B
//!   outputs 3 -> C
//!   marking start = A + 2*B
//! }
//! ```
//!
//! `//` starts a comment. Multiset expressions are sums of places with
//! optional counts (`A + 2*B`), and `0` alone is the empty multiset — so
//! `0` is reserved and cannot name anything. Names may contain letters,
//! digits, `_`, `#`, `'`, and `.`; the `#` admits the suffixed names that
//! gluing invents. [`serialize`] emits a canonical form (sorted names, one
//! statement per line) and [`parse`] inverts it exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::multiset::{Carrier, Multiset, MultisetError};
use crate::open::OpenPetriNet;
use crate::petri::PetriNet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: `{name}` is not declared")]
    Dangling { line: usize, name: String },
    #[error("line {line}: `{name}` is declared twice")]
    Duplicate { line: usize, name: String },
    #[error("`{name}` cannot be used as a name in this format")]
    BadName { name: String },
    #[error("the document already has a net named `{name}`")]
    NetTaken { name: String },
    #[error("net `{net}` already has a marking named `{name}`")]
    MarkingTaken { net: String, name: String },
    #[error("no net named `{name}` in the document")]
    NoSuchNet { name: String },
    #[error("marking `{name}` is not over the places of net `{net}`")]
    MarkingCarrierMismatch { net: String, name: String },
    #[error("marking flag: {message}")]
    Flag { message: String },
}

/// A versioned collection of named open nets, each with optional named
/// markings over its places.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetDocument {
    nets: BTreeMap<String, OpenPetriNet>,
    markings: BTreeMap<String, BTreeMap<String, Multiset>>,
}

/// The only format version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '#' | '\'' | '.')
}

fn is_writable_name(name: &str) -> bool {
    !name.is_empty() && name != "0" && name.chars().all(is_name_char)
}

impl NetDocument {
    pub fn new() -> NetDocument {
        NetDocument::default()
    }

    pub fn version(&self) -> u32 {
        FORMAT_VERSION
    }

    /// Adds a net under a fresh name. Every name the net mentions must be
    /// expressible in the format.
    pub fn add_net(&mut self, name: impl Into<String>, open: OpenPetriNet) -> Result<(), IoError> {
        let name = name.into();
        let mut names: Vec<&str> = vec![&name];
        names.extend(open.net().places().atoms().iter().map(String::as_str));
        names.extend(open.net().transitions().map(|(t, _, _)| t));
        names.extend(open.inputs());
        names.extend(open.outputs());
        if let Some(bad) = names.into_iter().find(|n| !is_writable_name(n)) {
            return Err(IoError::BadName {
                name: bad.to_owned(),
            });
        }
        if self.nets.contains_key(&name) {
            return Err(IoError::NetTaken { name });
        }
        self.markings.insert(name.clone(), BTreeMap::new());
        self.nets.insert(name, open);
        Ok(())
    }

    /// Adds a named marking to one of the document's nets.
    pub fn add_marking(
        &mut self,
        net: &str,
        name: impl Into<String>,
        marking: Multiset,
    ) -> Result<(), IoError> {
        let name = name.into();
        if !is_writable_name(&name) {
            return Err(IoError::BadName { name });
        }
        let open = self.nets.get(net).ok_or_else(|| IoError::NoSuchNet {
            name: net.to_owned(),
        })?;
        if marking.carrier() != open.net().places() {
            return Err(IoError::MarkingCarrierMismatch {
                net: net.to_owned(),
                name,
            });
        }
        let slot = self
            .markings
            .get_mut(net)
            .expect("nets and markings share keys");
        if slot.contains_key(&name) {
            return Err(IoError::MarkingTaken {
                net: net.to_owned(),
                name,
            });
        }
        slot.insert(name, marking);
        Ok(())
    }

    pub fn nets(&self) -> impl Iterator<Item = (&str, &OpenPetriNet)> {
        self.nets.iter().map(|(n, o)| (n.as_str(), o))
    }

    pub fn net(&self, name: &str) -> Option<&OpenPetriNet> {
        self.nets.get(name)
    }

    pub fn markings_of(&self, net: &str) -> impl Iterator<Item = (&str, &Multiset)> {
        self.markings
            .get(net)
            .into_iter()
            .flatten()
            .map(|(n, m)| (n.as_str(), m))
    }

    pub fn marking(&self, net: &str, name: &str) -> Option<&Multiset> {
        self.markings.get(net)?.get(name)
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    /// the reserved empty-multiset token `0`
    Zero,
    Colon,
    Equals,
    Comma,
    Plus,
    Star,
    Arrow,
    OpenBrace,
    CloseBrace,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Zero => "`0`".to_owned(),
            Tok::Colon => "`:`".to_owned(),
            Tok::Equals => "`=`".to_owned(),
            Tok::Comma => "`,`".to_owned(),
            Tok::Plus => "`+`".to_owned(),
            Tok::Star => "`*`".to_owned(),
            Tok::Arrow => "`->`".to_owned(),
            Tok::OpenBrace => "`{`".to_owned(),
            Tok::CloseBrace => "`}`".to_owned(),
        }
    }
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// Splits one line into `(column, token)` pairs; `//` ends the line.
fn tokenize(line_no: usize, text: &str) -> Result<Vec<(usize, Tok)>, IoError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().enumerate().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = i + 1;
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let simple = match c {
            '/' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '/')) => break,
                    _ => return Err(syntax(line_no, col, "stray `/` (comments start with `//`)")),
                }
            }
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '{' => Some(Tok::OpenBrace),
            '}' => Some(Tok::CloseBrace),
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => Some(Tok::Arrow),
                    _ => return Err(syntax(line_no, col, "expected `->`")),
                }
            }
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            toks.push((col, tok));
            continue;
        }
        if !is_name_char(c) {
            return Err(syntax(line_no, col, format!("unexpected character `{c}`")));
        }
        let mut name = String::new();
        while let Some(&(_, c)) = chars.peek() {
            if !is_name_char(c) {
                break;
            }
            name.push(c);
            chars.next();
        }
        let tok = if name == "0" {
            Tok::Zero
        } else {
            Tok::Name(name)
        };
        toks.push((col, tok));
    }
    Ok(toks)
}

/// A token stream for one statement, with positioned errors.
struct Cursor<'a> {
    line: usize,
    eol_col: usize,
    toks: &'a [(usize, Tok)],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, eol_col: usize, toks: &'a [(usize, Tok)]) -> Cursor<'a> {
        Cursor {
            line,
            eol_col,
            toks,
            pos: 0,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol_col, |(c, _)| *c)
    }

    fn advance(&mut self) -> Option<&Tok> {
        let tok = self.toks.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        tok
    }

    fn expect_name(&mut self, what: &str) -> Result<String, IoError> {
        let (line, col) = (self.line, self.col());
        match self.advance() {
            Some(Tok::Name(n)) => Ok(n.clone()),
            Some(Tok::Zero) => Err(syntax(
                line,
                col,
                format!("`0` is reserved for the empty multiset and cannot name {what}"),
            )),
            Some(other) => Err(syntax(
                line,
                col,
                format!("expected {what}, found {}", other.describe()),
            )),
            None => Err(syntax(line, col, format!("expected {what}"))),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), IoError> {
        let (line, col) = (self.line, self.col());
        match self.advance() {
            Some(tok) if *tok == want => Ok(()),
            Some(other) => Err(syntax(
                line,
                col,
                format!("expected {}, found {}", want.describe(), other.describe()),
            )),
            None => Err(syntax(line, col, format!("expected {}", want.describe()))),
        }
    }

    fn expect_end(&mut self) -> Result<(), IoError> {
        match self.peek() {
            None => Ok(()),
            Some(other) => Err(syntax(
                self.line,
                self.col(),
                format!("expected end of line, found {}", other.describe()),
            )),
        }
    }
}

/// `0`, or terms `place` / `count*place` joined by `+`.
fn parse_expr(cur: &mut Cursor<'_>) -> Result<Vec<(String, u64)>, IoError> {
    if let Some(Tok::Zero) = cur.peek() {
        cur.advance();
        if matches!(cur.peek(), Some(Tok::Plus | Tok::Star)) {
            return Err(syntax(
                cur.line,
                cur.col(),
                "`0` stands alone as the empty multiset",
            ));
        }
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    loop {
        let (line, col) = (cur.line, cur.col());
        let head = cur.expect_name("a place or a count")?;
        if let Some(Tok::Star) = cur.peek() {
            let count: u64 = head
                .parse()
                .map_err(|_| syntax(line, col, format!("`{head}` is not a valid count")))?;
            cur.advance();
            let place = cur.expect_name("a place")?;
            terms.push((place, count));
        } else {
            terms.push((head, 1));
        }
        match cur.peek() {
            Some(Tok::Plus) => {
                cur.advance();
            }
            _ => break,
        }
    }
    Ok(terms)
}

/// A multiset expression before the carrier exists: `(place, count)` terms.
type RawExpr = Vec<(String, u64)>;

/// One net block mid-parse: statements are collected raw and resolved
/// against the place list when the block closes, so declaration order
/// inside a block does not matter. Each statement keeps its line number for
/// error reports.
struct PendingNet {
    name: String,
    places: Vec<String>,
    transitions: Vec<(usize, String, RawExpr, RawExpr)>,
    inputs: Vec<(usize, String, String)>,
    outputs: Vec<(usize, String, String)>,
    markings: Vec<(usize, String, RawExpr)>,
    seen_places: BTreeSet<String>,
    seen_transitions: BTreeSet<String>,
    seen_input_points: BTreeSet<String>,
    seen_output_points: BTreeSet<String>,
    seen_markings: BTreeSet<String>,
}

impl PendingNet {
    fn new(name: String) -> PendingNet {
        PendingNet {
            name,
            places: Vec::new(),
            transitions: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            markings: Vec::new(),
            seen_places: BTreeSet::new(),
            seen_transitions: BTreeSet::new(),
            seen_input_points: BTreeSet::new(),
            seen_output_points: BTreeSet::new(),
            seen_markings: BTreeSet::new(),
        }
    }

    fn close(self, close_line: usize, doc: &mut NetDocument) -> Result<(), IoError> {
        let carrier = Carrier::new(self.places);
        let resolve = |line: usize, terms: &[(String, u64)]| -> Result<Multiset, IoError> {
            Multiset::from_pairs(&carrier, terms.iter().map(|(a, c)| (a.as_str(), *c))).map_err(
                |MultisetError::UnknownAtom { atom }| IoError::Dangling { line, name: atom },
            )
        };
        let mut transitions = BTreeMap::new();
        for (line, name, source, target) in &self.transitions {
            transitions.insert(
                name.clone(),
                (resolve(*line, source)?, resolve(*line, target)?),
            );
        }
        let build_side =
            |pairs: &[(usize, String, String)]| -> Result<BTreeMap<String, String>, IoError> {
                let mut map = BTreeMap::new();
                for (line, point, place) in pairs {
                    if !carrier.contains(place) {
                        return Err(IoError::Dangling {
                            line: *line,
                            name: place.clone(),
                        });
                    }
                    map.insert(point.clone(), place.clone());
                }
                Ok(map)
            };
        let inputs = build_side(&self.inputs)?;
        let outputs = build_side(&self.outputs)?;
        let at_close = |message: String| syntax(close_line, 1, message);
        let net = PetriNet::from_parts(Arc::clone(&carrier), transitions)
            .map_err(|e| at_close(e.to_string()))?;
        let open = OpenPetriNet::new(net, inputs, outputs).map_err(|e| at_close(e.to_string()))?;
        let name = self.name.clone();
        doc.add_net(&name, open)
            .map_err(|e| at_close(e.to_string()))?;
        for (line, marking_name, terms) in &self.markings {
            let marking = resolve(*line, terms)?;
            doc.add_marking(&name, marking_name, marking)
                .map_err(|e| at_close(e.to_string()))?;
        }
        Ok(())
    }
}

/// Parses a document, reporting the first problem with its line and column.
pub fn parse(text: &str) -> Result<NetDocument, IoError> {
    let mut doc = NetDocument::new();
    let mut saw_header = false;
    let mut current: Option<PendingNet> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokenize(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let eol_col = raw.chars().count() + 1;
        let mut cur = Cursor::new(line, eol_col, &toks);
        if !saw_header {
            match cur.advance() {
                Some(Tok::Name(w)) if w == "opennet" => {}
                _ => return Err(syntax(line, 1, "expected the `opennet <version>` header")),
            }
            let version = match cur.advance() {
                Some(Tok::Name(v)) => v.parse::<u32>().ok(),
                Some(Tok::Zero) => Some(0),
                _ => None,
            };
            match version {
                Some(FORMAT_VERSION) => {}
                Some(v) => {
                    return Err(syntax(line, 1, format!("unsupported format version `{v}`")))
                }
                None => return Err(syntax(line, 1, "expected a version number")),
            }
            cur.expect_end()?;
            saw_header = true;
            continue;
        }
        let head_col = cur.col();
        let head = cur.advance().cloned();
        match head {
            Some(Tok::Name(word)) if word == "net" && current.is_none() => {
                let name = cur.expect_name("a net name")?;
                cur.expect(Tok::OpenBrace)?;
                cur.expect_end()?;
                if doc.net(&name).is_some() {
                    return Err(IoError::Duplicate { line, name });
                }
                current = Some(PendingNet::new(name));
            }
            Some(Tok::CloseBrace) => {
                cur.expect_end()?;
                let pending = current
                    .take()
                    .ok_or_else(|| syntax(line, head_col, "`}` without an open net block"))?;
                pending.close(line, &mut doc)?;
            }
            Some(Tok::Name(word)) => {
                let pending = current.as_mut().ok_or_else(|| {
                    syntax(
                        line,
                        head_col,
                        format!("`{word}` is only valid inside a `net` block"),
                    )
                })?;
                match word.as_str() {
                    "places" => {
                        if cur.peek().is_none() {
                            return Err(syntax(line, cur.col(), "expected at least one place"));
                        }
                        while cur.peek().is_some() {
                            let place = cur.expect_name("a place")?;
                            if !pending.seen_places.insert(place.clone()) {
                                return Err(IoError::Duplicate { line, name: place });
                            }
                            pending.places.push(place);
                        }
                    }
                    "transition" => {
                        let name = cur.expect_name("a transition name")?;
                        cur.expect(Tok::Colon)?;
                        let source = parse_expr(&mut cur)?;
                        cur.expect(Tok::Arrow)?;
                        let target = parse_expr(&mut cur)?;
                        cur.expect_end()?;
                        if !pending.seen_transitions.insert(name.clone()) {
                            return Err(IoError::Duplicate { line, name });
                        }
                        pending.transitions.push((line, name, source, target));
                    }
                    "inputs" | "outputs" => {
                        while cur.peek().is_some() {
                            let point = cur.expect_name("a boundary point")?;
                            cur.expect(Tok::Arrow)?;
                            let place = cur.expect_name("a place")?;
                            let (seen, side) = if word == "inputs" {
                                (&mut pending.seen_input_points, &mut pending.inputs)
                            } else {
                                (&mut pending.seen_output_points, &mut pending.outputs)
                            };
                            if !seen.insert(point.clone()) {
                                return Err(IoError::Duplicate { line, name: point });
                            }
                            side.push((line, point, place));
                            match cur.peek() {
                                Some(Tok::Comma) => {
                                    cur.advance();
                                }
                                None => break,
                                Some(other) => {
                                    return Err(syntax(
                                        line,
                                        cur.col(),
                                        format!("expected `,`, found {}", other.describe()),
                                    ))
                                }
                            }
                        }
                    }
                    "marking" => {
                        let name = cur.expect_name("a marking name")?;
                        cur.expect(Tok::Equals)?;
                        let terms = parse_expr(&mut cur)?;
                        cur.expect_end()?;
                        if !pending.seen_markings.insert(name.clone()) {
                            return Err(IoError::Duplicate { line, name });
                        }
                        pending.markings.push((line, name, terms));
                    }
                    _ => {
                        return Err(syntax(
                            line,
                            head_col,
                            format!(
                                "expected `places`, `transition`, `inputs`, `outputs`, \
                                 `marking`, or `}}`, found `{word}`"
                            ),
                        ))
                    }
                }
            }
            Some(other) => {
                return Err(syntax(
                    line,
                    head_col,
                    format!("unexpected {} at start of statement", other.describe()),
                ))
            }
            None => unreachable!("blank lines are skipped"),
        }
    }
    if let Some(pending) = current {
        return Err(syntax(
            last_line,
            1,
            format!("net `{}` is missing its closing `}}`", pending.name),
        ));
    }
    if !saw_header {
        return Err(syntax(1, 1, "expected the `opennet <version>` header"));
    }
    Ok(doc)
}

// ---------------------------------------------------------------------------
// serialization

/// Renders the canonical form: nets sorted by name, sorted statements, one
/// statement per line. [`parse`] inverts it exactly.
pub fn serialize(doc: &NetDocument) -> String {
    let mut out = String::new();
    writeln!(out, "opennet {}", doc.version()).unwrap();
    for (name, open) in doc.nets() {
        writeln!(out).unwrap();
        writeln!(out, "net {name} {{").unwrap();
        let places = open.net().places().atoms();
        if !places.is_empty() {
            writeln!(out, "  places {}", places.join(" ")).unwrap();
        }
        let mut transitions: Vec<_> = open.net().transitions().collect();
        transitions.sort_by_key(|(t, _, _)| *t);
        for (t, source, target) in transitions {
            writeln!(out, "  transition {t} : {source} -> {target}").unwrap();
        }
        for (label, map) in [("inputs", open.input_map()), ("outputs", open.output_map())] {
            if map.is_empty() {
                continue;
            }
            let pairs: Vec<String> = map.iter().map(|(pt, pl)| format!("{pt} -> {pl}")).collect();
            writeln!(out, "  {label} {}", pairs.join(", ")).unwrap();
        }
        for (marking_name, marking) in doc.markings_of(name) {
            writeln!(out, "  marking {marking_name} = {marking}").unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// dot export

fn dot_quote(text: &str) -> String {
    let mut quoted = String::with_capacity(text.len() + 2);
    quoted.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            quoted.push('\\');
        }
        quoted.push(c);
    }
    quoted.push('"');
    quoted
}

/// Renders an open net as a dot graph: ellipses for places, boxes for
/// transitions, solid arcs labeled with counts above one, and boundary
/// points as plaintext ports on dashed arcs.
pub fn export_dot(open: &OpenPetriNet) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    let place_id = |p: &str| dot_quote(&format!("place {p}"));
    for place in open.net().places().atoms() {
        writeln!(
            out,
            "  {} [label={}, shape=ellipse];",
            place_id(place),
            dot_quote(place)
        )
        .unwrap();
    }
    let mut transitions: Vec<_> = open.net().transitions().collect();
    transitions.sort_by_key(|(t, _, _)| *t);
    for (t, _, _) in &transitions {
        writeln!(
            out,
            "  {} [label={}, shape=box];",
            dot_quote(&format!("transition {t}")),
            dot_quote(t)
        )
        .unwrap();
    }
    let weight = |count: u64| {
        if count > 1 {
            format!(" [label={}]", dot_quote(&count.to_string()))
        } else {
            String::new()
        }
    };
    for (t, source, target) in &transitions {
        let trans = dot_quote(&format!("transition {t}"));
        for (place, count) in source.support() {
            writeln!(out, "  {} -> {}{};", place_id(place), trans, weight(count)).unwrap();
        }
        for (place, count) in target.support() {
            writeln!(out, "  {} -> {}{};", trans, place_id(place), weight(count)).unwrap();
        }
    }
    for (label, map, into_net) in [
        ("input", open.input_map(), true),
        ("output", open.output_map(), false),
    ] {
        for (point, place) in map {
            let port = dot_quote(&format!("{label} {point}"));
            writeln!(
                out,
                "  {port} [label={}, shape=plaintext];",
                dot_quote(point)
            )
            .unwrap();
            let (from, to) = if into_net {
                (port, place_id(place))
            } else {
                (place_id(place), port)
            };
            writeln!(out, "  {from} -> {to} [style=dashed, arrowhead=none];").unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

// ---------------------------------------------------------------------------
// marking flags

/// Parses the flag syntax `A:2,B:1`; a bare name counts once, omitted
/// places are zero, and an empty string is the empty marking.
pub fn marking_from_flag(text: &str, carrier: &Arc<Carrier>) -> Result<Multiset, IoError> {
    let flag = |message: String| IoError::Flag { message };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Multiset::empty(carrier));
    }
    let mut pairs = Vec::new();
    for part in trimmed.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(flag("empty entry between commas".to_owned()));
        }
        match part.split_once(':') {
            Some((name, count)) => {
                let count: u64 = count.trim().parse().map_err(|_| {
                    flag(format!(
                        "`{}` in `{part}` is not a valid count",
                        count.trim()
                    ))
                })?;
                pairs.push((name.trim().to_owned(), count));
            }
            None => pairs.push((part.to_owned(), 1)),
        }
    }
    Multiset::from_pairs(carrier, pairs).map_err(|MultisetError::UnknownAtom { atom }| {
        flag(format!("`{atom}` is not a place of this net"))
    })
}
