//! Line-numbered text format for strategy trees, plus a JSON interchange form.
//!
//! Text grammar, one node per line:
//!
//! ```text
//! L. a1 a2 .. ak v b1 b2 .. bk : act, act, act. [sym]
//! ```
//!
//! Actions are listed in outcome order (balanced, left pan lighter, right pan
//! lighter) and are one of `⇒ n` (also `=> n` / `-> n`), `(a)`, `(a, b)`,
//! `{a, b, ..}`, `()` or `sym`. Children of line `L` live on lines `3L+1`,
//! `3L+2`, `3L+3`. A `sym` third action, or a trailing `sym` after the period
//! when line `3L+3` is absent, stands for the mirror image of the second child
//! under the positional pan swap of line `L` (i-th left coin with i-th right
//! coin). Lines that do not start with a number are headers and are skipped;
//! `#` starts a comment line. A tree that is a single leaf is written `0. (1, 2).`

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Coin, Leaf, ModelError, Node, StrategyTree, Weighing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: go-to target {target} is not defined")]
    DanglingGoto { line: u64, target: u64 },
    #[error("line {line}: go-to target {target} is not one of 3L+1..3L+3")]
    BadGotoTarget { line: u64, target: u64 },
    #[error("line {line}: pans have different sizes")]
    PanSizeMismatch { line: u64 },
    #[error("line {line}: a coin is repeated in the weighing")]
    RepeatedCoin { line: u64 },
    #[error("line {line} defined more than once")]
    DuplicateLine { line: u64 },
    #[error("line {line}: coin {coin} out of range 1..={n_coins}")]
    CoinOutOfRange { line: u64, coin: u16, n_coins: usize },
    #[error("line {line}: invalid leaf: {source}")]
    InvalidLeaf {
        line: u64,
        #[source]
        source: ModelError,
    },
    #[error("no line 0 in input")]
    MissingRoot,
}

/// One action of a line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Action {
    Goto(u64),
    Leaf(Leaf),
    Sym,
}

/// A parsed, not yet expanded line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PseudoCodeLine {
    pub line_no: u64,
    /// `None` for a single-leaf tree written as `0. (a, b).`
    pub weighing: Option<Weighing>,
    pub actions: Vec<Action>,
    pub trailing_sym: bool,
    /// 1-based line in the source text.
    pub source_line: usize,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::SyntaxError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let want: Vec<char> = s.chars().collect();
        if self.chars[self.pos..].starts_with(&want) {
            self.pos += want.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn coin(&mut self) -> Result<u16, ParseError> {
        let at = self.pos;
        let v = self.number()?;
        u16::try_from(v).map_err(|_| {
            self.pos = at;
            self.err("coin id too large")
        })
    }

    fn coin_list(&mut self, close: char) -> Result<Vec<u16>, ParseError> {
        let mut v = Vec::new();
        if self.eat(close) {
            return Ok(v);
        }
        loop {
            v.push(self.coin()?);
            if self.eat(close) {
                return Ok(v);
            }
            self.expect(',')?;
        }
    }
}

fn is_ident_char(c: Option<char>) -> bool {
    c.is_some_and(|c| c.is_alphanumeric())
}

fn parse_action(cur: &mut Cursor) -> Result<(Action, usize), ParseError> {
    let col = {
        cur.skip_ws();
        cur.pos + 1
    };
    if cur.eat_str("⇒") || cur.eat_str("=>") || cur.eat_str("->") {
        return Ok((Action::Goto(cur.number()?), col));
    }
    if cur.eat('(') {
        let coins = cur.coin_list(')')?;
        let leaf = match coins.as_slice() {
            [] => Leaf::Impossible,
            [a] => Leaf::Output1(Coin(*a)),
            [a, b] => Leaf::output2(Coin(*a), Coin(*b)),
            _ => return Err(cur.err("output lists hold at most two coins; use {..} for sets")),
        };
        return Ok((Action::Leaf(leaf), col));
    }
    if cur.eat('{') {
        let coins = cur.coin_list('}')?;
        return Ok((Action::Leaf(Leaf::FakeSet(sorted(coins))), col));
    }
    if cur.eat_str("sym") && !is_ident_char(cur.chars.get(cur.pos).copied()) {
        return Ok((Action::Sym, col));
    }
    Err(cur.err("expected an action: ⇒ n, (..), {..} or sym"))
}

fn sorted(v: Vec<u16>) -> Vec<Coin> {
    let mut c: Vec<Coin> = v.into_iter().map(Coin).collect();
    c.sort_unstable();
    c
}

fn parse_line(text: &str, source_line: usize) -> Result<PseudoCodeLine, ParseError> {
    let mut cur = Cursor::new(text, source_line);
    let line_no = cur.number()?;
    cur.expect('.')?;

    // weighing, unless this is a bare single-leaf line
    let weighing = match cur.peek() {
        Some(c) if c.is_ascii_digit() => {
            let mut left = Vec::new();
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                left.push(cur.coin()?);
            }
            if !cur.eat('v') {
                return Err(cur.err("expected 'v' between pans"));
            }
            let mut right = Vec::new();
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                right.push(cur.coin()?);
            }
            if left.len() != right.len() || left.is_empty() {
                return Err(ParseError::PanSizeMismatch { line: line_no });
            }
            cur.expect(':')?;
            let w = Weighing::from_ids(&left, &right)
                .map_err(|_| ParseError::RepeatedCoin { line: line_no })?;
            Some(w)
        }
        _ => {
            cur.eat(':');
            None
        }
    };

    let mut actions = Vec::new();
    loop {
        let (a, col) = parse_action(&mut cur)?;
        if a == Action::Sym && actions.len() != 2 {
            return Err(ParseError::SyntaxError {
                line: source_line,
                column: col,
                message: "sym may only be the third action".into(),
            });
        }
        actions.push(a);
        if cur.eat('.') {
            break;
        }
        if !cur.eat(',') {
            return Err(cur.err("expected ',' or '.' after action"));
        }
    }
    let expected = if weighing.is_some() { 3 } else { 1 };
    if actions.len() != expected {
        return Err(ParseError::SyntaxError {
            line: source_line,
            column: cur.pos + 1,
            message: format!("expected {expected} action(s), found {}", actions.len()),
        });
    }
    let trailing_sym = cur.eat_str("sym");
    cur.eat('.');
    if !cur.at_end() {
        return Err(cur.err("unexpected text after line"));
    }
    Ok(PseudoCodeLine {
        line_no,
        weighing,
        actions,
        trailing_sym,
        source_line,
    })
}

/// Tokenizes every numbered line of `text`.
pub fn parse_lines(text: &str) -> Result<Vec<PseudoCodeLine>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !t.starts_with(|c: char| c.is_ascii_digit()) {
            // section header such as "First weighing:"
            if t.ends_with(':') {
                continue;
            }
            return Err(ParseError::SyntaxError {
                line: i + 1,
                column: 1,
                message: "expected a numbered line or a header ending in ':'".into(),
            });
        }
        out.push(parse_line(raw, i + 1)?);
    }
    Ok(out)
}

/// Largest coin id mentioned anywhere in `text`.
pub fn max_coin_in(text: &str) -> Result<usize, ParseError> {
    let lines = parse_lines(text)?;
    let mut m = 0u16;
    for l in &lines {
        if let Some(w) = &l.weighing {
            m = m.max(w.max_coin().0);
        }
        for a in &l.actions {
            if let Action::Leaf(leaf) = a {
                for c in leaf.coins() {
                    m = m.max(c.0);
                }
            }
        }
    }
    Ok(m as usize)
}

/// Parses `text` into a fully expanded tree over `n_coins` coins.
pub fn parse(text: &str, n_coins: usize) -> Result<StrategyTree, ParseError> {
    let lines = parse_lines(text)?;
    let mut by_no: HashMap<u64, PseudoCodeLine> = HashMap::new();
    for l in lines {
        if by_no.contains_key(&l.line_no) {
            return Err(ParseError::DuplicateLine { line: l.line_no });
        }
        by_no.insert(l.line_no, l);
    }
    let root = build(0, &by_no, n_coins)?;
    let tree = StrategyTree { n_coins, root };
    Ok(tree)
}

fn check_coins(line: u64, coins: impl Iterator<Item = Coin>, n_coins: usize) -> Result<(), ParseError> {
    for c in coins {
        if c.0 == 0 || c.0 as usize > n_coins {
            return Err(ParseError::CoinOutOfRange {
                line,
                coin: c.0,
                n_coins,
            });
        }
    }
    Ok(())
}

fn leaf_node(line: u64, leaf: &Leaf, n_coins: usize) -> Result<Node, ParseError> {
    check_coins(line, leaf.coins().into_iter(), n_coins)?;
    let t = StrategyTree {
        n_coins,
        root: Node::leaf(leaf.clone()),
    };
    t.validate().map_err(|e| ParseError::InvalidLeaf {
        line,
        source: match e {
            ModelError::MalformedTree { source, .. } => *source,
            other => other,
        },
    })?;
    Ok(t.root)
}

fn build(no: u64, lines: &HashMap<u64, PseudoCodeLine>, n_coins: usize) -> Result<Node, ParseError> {
    let line = lines.get(&no).ok_or(if no == 0 {
        ParseError::MissingRoot
    } else {
        ParseError::DanglingGoto {
            line: (no - 1) / 3,
            target: no,
        }
    })?;
    let Some(weighing) = &line.weighing else {
        return match &line.actions[0] {
            Action::Leaf(l) => leaf_node(no, l, n_coins),
            _ => Err(ParseError::SyntaxError {
                line: line.source_line,
                column: 1,
                message: "a line without a weighing must hold a single leaf".into(),
            }),
        };
    };
    check_coins(no, weighing.coins(), n_coins)?;

    let mut kids: Vec<Node> = Vec::with_capacity(3);
    for (i, act) in line.actions.iter().enumerate() {
        let node = match act {
            Action::Leaf(l) => leaf_node(no, l, n_coins)?,
            Action::Sym => mirror(&kids[1], weighing),
            Action::Goto(t) => {
                if !(3 * no + 1..=3 * no + 3).contains(t) {
                    return Err(ParseError::BadGotoTarget { line: no, target: *t });
                }
                if lines.contains_key(t) {
                    build(*t, lines, n_coins)?
                } else if i == 2 && line.trailing_sym {
                    mirror(&kids[1], weighing)
                } else {
                    return Err(ParseError::DanglingGoto { line: no, target: *t });
                }
            }
        };
        kids.push(node);
    }
    let [a, b, c]: [Node; 3] = kids.try_into().expect("three actions");
    Ok(Node::decision(weighing.clone(), [a, b, c]))
}

/// Positional pan-swap permutation of a weighing: i-th left coin <-> i-th right coin.
pub fn pan_swap_map(w: &Weighing) -> HashMap<Coin, Coin> {
    let mut m = HashMap::new();
    for (&a, &b) in w.left().iter().zip(w.right()) {
        m.insert(a, b);
        m.insert(b, a);
    }
    m
}

/// Mirror image of `node` under the positional pan swap of `parent`.
///
/// Relabeling alone suffices: the relabeled subtree sees the relabeled state,
/// so outcome order inside it is unchanged.
pub fn mirror(node: &Node, parent: &Weighing) -> Node {
    let m = pan_swap_map(parent);
    node.relabeled(&|c| *m.get(&c).unwrap_or(&c))
}

/// Options for [`serialize_text_with`].
#[derive(Copy, Clone, Debug)]
pub struct TextOptions {
    /// Write `sym` instead of a third child that is the mirror of the second.
    pub compress_sym: bool,
    /// Use `⇒` rather than `=>`.
    pub unicode_arrow: bool,
}

impl Default for TextOptions {
    fn default() -> Self {
        TextOptions {
            compress_sym: true,
            unicode_arrow: false,
        }
    }
}

/// Writes `tree` in the line format with canonical numbering.
pub fn serialize_text(tree: &StrategyTree) -> String {
    serialize_text_with(tree, TextOptions::default())
}

pub fn serialize_text_with(tree: &StrategyTree, opts: TextOptions) -> String {
    let mut lines: BTreeMap<u64, String> = BTreeMap::new();
    emit(&tree.root, 0, &mut lines, opts);
    let mut out = String::new();
    for l in lines.values() {
        out.push_str(l);
        out.push('\n');
    }
    out
}

fn emit(node: &Node, no: u64, out: &mut BTreeMap<u64, String>, opts: TextOptions) {
    let arrow = if opts.unicode_arrow { "⇒" } else { "=>" };
    match node {
        Node::Terminal(l) => {
            out.insert(no, format!("{no}. {l}."));
        }
        Node::Decision { weighing, children } => {
            let mut s = format!("{no}. {weighing} : ");
            let sym = opts.compress_sym
                && matches!(children[1], Node::Decision { .. })
                && mirror(&children[1], weighing) == children[2];
            let n_written = if sym { 2 } else { 3 };
            for (i, child) in children.iter().take(n_written).enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let target = 3 * no + 1 + i as u64;
                match child {
                    Node::Terminal(l) => {
                        let _ = write!(s, "{l}");
                    }
                    Node::Decision { .. } => {
                        let _ = write!(s, "{arrow} {target}");
                        emit(child, target, out, opts);
                    }
                }
            }
            if sym {
                s.push_str(", sym");
            }
            s.push('.');
            out.insert(no, s);
        }
    }
}

/// Schema tag of the interchange document.
pub const INTERCHANGE_SCHEMA: &str = "cwlab-tree/1";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {0:?}, expected {INTERCHANGE_SCHEMA:?}")]
    Version(String),
    #[error("at {path}: {message}")]
    Shape { path: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocTree {
    schema: String,
    n_coins: usize,
    root: DocNode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocNode {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    weighing: Option<DocWeighing>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    children: Option<Vec<DocNode>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    leaf: Option<DocLeaf>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocWeighing {
    left: Vec<u16>,
    right: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocLeaf {
    kind: String,
    coins: Vec<u16>,
}

fn to_doc(node: &Node) -> DocNode {
    match node {
        Node::Terminal(l) => {
            let kind = match l {
                Leaf::Output1(_) => "output1",
                Leaf::Output2(..) => "output2",
                Leaf::FakeSet(_) => "fake_set",
                Leaf::Impossible => "impossible",
            };
            DocNode {
                weighing: None,
                children: None,
                leaf: Some(DocLeaf {
                    kind: kind.into(),
                    coins: l.coins().iter().map(|c| c.0).collect(),
                }),
            }
        }
        Node::Decision { weighing, children } => DocNode {
            weighing: Some(DocWeighing {
                left: weighing.left().iter().map(|c| c.0).collect(),
                right: weighing.right().iter().map(|c| c.0).collect(),
            }),
            children: Some(children.iter().map(to_doc).collect()),
            leaf: None,
        },
    }
}

fn from_doc(d: DocNode, path: &mut String) -> Result<Node, SchemaError> {
    let shape = |path: &str, m: &str| SchemaError::Shape {
        path: if path.is_empty() { "root".into() } else { path.to_string() },
        message: m.to_string(),
    };
    match (d.weighing, d.children, d.leaf) {
        (None, None, Some(l)) => {
            let coins: Vec<Coin> = l.coins.iter().copied().map(Coin).collect();
            let leaf = match (l.kind.as_str(), coins.as_slice()) {
                ("output1", [a]) => Leaf::Output1(*a),
                ("output2", [a, b]) => Leaf::output2(*a, *b),
                ("fake_set", _) => Leaf::fake_set(coins.clone()),
                ("impossible", []) => Leaf::Impossible,
                _ => return Err(shape(path, &format!("bad leaf kind {:?} with {} coins", l.kind, coins.len()))),
            };
            Ok(Node::leaf(leaf))
        }
        (Some(w), Some(ch), None) => {
            let weighing = Weighing::from_ids(&w.left, &w.right)?;
            if ch.len() != 3 {
                return Err(shape(path, &format!("expected 3 children, found {}", ch.len())));
            }
            let mut kids = Vec::with_capacity(3);
            for (i, c) in ch.into_iter().enumerate() {
                let len = path.len();
                path.push(['=', '<', '>'][i]);
                kids.push(from_doc(c, path)?);
                path.truncate(len);
            }
            let [a, b, c]: [Node; 3] = kids.try_into().map_err(|_| shape(path, "children"))?;
            Ok(Node::decision(weighing, [a, b, c]))
        }
        _ => Err(shape(path, "node needs either weighing+children or leaf")),
    }
}

/// Structured (JSON) encoding of a tree.
pub fn serialize_interchange(tree: &StrategyTree) -> serde_json::Value {
    serde_json::to_value(DocTree {
        schema: INTERCHANGE_SCHEMA.into(),
        n_coins: tree.n_coins,
        root: to_doc(&tree.root),
    })
    .expect("tree documents always serialize")
}

pub fn parse_interchange(doc: &serde_json::Value) -> Result<StrategyTree, SchemaError> {
    let d: DocTree = serde_json::from_value(doc.clone())?;
    if d.schema != INTERCHANGE_SCHEMA {
        return Err(SchemaError::Version(d.schema));
    }
    let root = from_doc(d.root, &mut String::new())?;
    Ok(StrategyTree::new(d.n_coins, root)?)
}

pub fn parse_interchange_str(s: &str) -> Result<StrategyTree, SchemaError> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    parse_interchange(&v)
}
