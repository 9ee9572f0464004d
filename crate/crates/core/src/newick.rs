//! Newick and extended Newick for trees and rooted networks, an edge-list
//! format for unrooted networks, and Graphviz DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    canonical_rooted, canonical_unrooted, check_taxon_name, EdgeId, Image, NodeId, RootedNetwork,
    RootedTree, UnrootedNetwork, UnrootedTree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rooted,
    Unrooted,
}

/// Header line of the unrooted edge-list format.
pub const EDGE_LIST_HEADER: &str = "unrooted-network";

/// One record of a multi-record file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub name: Option<String>,
    pub text: String,
}

/// An ordered list of records, each holding one tree or network.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NewickDocument {
    pub entries: Vec<Record>,
}

impl NewickDocument {
    /// Splits a file into records. Newick records end at `;` and may be
    /// prefixed with `name =`. Edge-list records start with the header line
    /// and end at the next header or a line holding only `;`.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = if text.trim_start().starts_with(EDGE_LIST_HEADER) {
            split_edge_lists(text)
        } else {
            split_newick(text)?
        };
        Ok(NewickDocument { entries })
    }

    pub fn trees(&self, mode: Mode) -> Result<Vec<(Option<String>, ParsedTree)>> {
        self.entries
            .iter()
            .map(|r| Ok((r.name.clone(), parse_tree(&r.text, mode)?)))
            .collect()
    }
}

fn split_newick(text: &str) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth_comment = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth_comment += 1,
            ']' if depth_comment > 0 => depth_comment -= 1,
            ';' if depth_comment == 0 => {
                let stripped = strip_comments(&text[start..=i]);
                let raw = stripped.as_str();
                let (name, body) = match raw.find('=') {
                    Some(eq) if !raw[..eq].contains('(') => {
                        let name = raw[..eq].trim().to_string();
                        check_taxon_name(&name)
                            .map_err(|_| Error::Parse { pos: start, msg: "bad record name".into() })?;
                        (Some(name), raw[eq + 1..].trim().to_string())
                    }
                    _ => (None, raw.trim().to_string()),
                };
                out.push(Record { name, text: body });
                start = i + 1;
            }
            _ => {}
        }
    }
    if !strip_comments(&text[start..]).trim().is_empty() {
        return Err(Error::Parse { pos: start, msg: "record not terminated by ';'".into() });
    }
    Ok(out)
}

fn strip_comments(s: &str) -> String {
    let mut out = String::new();
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' if depth > 0 => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn split_edge_lists(text: &str) -> Vec<Record> {
    let mut out: Vec<Record> = Vec::new();
    let mut cur: Option<String> = None;
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with(EDGE_LIST_HEADER) || t == ";" {
            if let Some(body) = cur.take() {
                out.push(Record { name: None, text: body });
            }
            if t != ";" {
                cur = Some(format!("{line}\n"));
            }
        } else if let Some(body) = cur.as_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    if let Some(body) = cur {
        out.push(Record { name: None, text: body });
    }
    for r in &mut out {
        let first = r.text.lines().next().unwrap_or("");
        let name = first.trim()[EDGE_LIST_HEADER.len()..].trim();
        if !name.is_empty() {
            r.name = Some(name.to_string());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Newick syntax tree

#[derive(Debug)]
struct PNode {
    label: Option<String>,
    hybrid: Option<String>,
    children: Vec<PNode>,
    pos: usize,
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.i, msg: msg.into() })
    }

    fn skip(&mut self) -> Result<()> {
        loop {
            while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
                self.i += 1;
            }
            if self.i < self.s.len() && self.s[self.i] == b'[' {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i] != b']' {
                    self.i += 1;
                }
                if self.i == self.s.len() {
                    self.i = start;
                    return self.err("unterminated comment");
                }
                self.i += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip()?;
        Ok(self.s.get(self.i).copied())
    }

    fn word(&mut self) -> Option<String> {
        let start = self.i;
        while self.i < self.s.len() {
            let b = self.s[self.i];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-' {
                self.i += 1;
            } else {
                break;
            }
        }
        (self.i > start).then(|| String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn subtree(&mut self, depth: usize) -> Result<PNode> {
        if depth > 10_000 {
            return self.err("nesting too deep");
        }
        let pos = self.i;
        let mut children = Vec::new();
        if self.peek()? == Some(b'(') {
            self.i += 1;
            loop {
                children.push(self.subtree(depth + 1)?);
                match self.peek()? {
                    Some(b',') => self.i += 1,
                    Some(b')') => {
                        self.i += 1;
                        break;
                    }
                    Some(_) => return self.err("expected ',' or ')'"),
                    None => return self.err("unbalanced parentheses"),
                }
            }
        }
        self.skip()?;
        let label = self.word();
        let mut hybrid = None;
        if self.s.get(self.i) == Some(&b'#') {
            self.i += 1;
            match self.word() {
                Some(tag) => hybrid = Some(tag),
                None => return self.err("bad hybrid tag"),
            }
        }
        match self.peek()? {
            Some(b':') => return self.err("branch lengths are not supported"),
            Some(b'(') => return self.err("unexpected '('"),
            _ => {}
        }
        if children.is_empty() && label.is_none() && hybrid.is_none() {
            return self.err("expected a taxon or '('");
        }
        Ok(PNode { label, hybrid, children, pos })
    }
}

fn parse_syntax(text: &str) -> Result<PNode> {
    let mut lx = Lexer { s: text.as_bytes(), i: 0 };
    let root = lx.subtree(0)?;
    match lx.peek()? {
        Some(b';') => lx.i += 1,
        Some(b')') => return lx.err("unbalanced parentheses"),
        Some(_) => return lx.err("expected ';'"),
        None => return lx.err("missing ';'"),
    }
    if lx.peek()?.is_some() {
        return lx.err("trailing text after ';'");
    }
    Ok(root)
}

/// A parsed tree in the requested mode.
#[derive(Clone, Debug)]
pub enum ParsedTree {
    Unrooted(UnrootedTree),
    Rooted(RootedTree),
}

impl ParsedTree {
    pub fn unrooted(self) -> Option<UnrootedTree> {
        match self {
            ParsedTree::Unrooted(t) => Some(t),
            ParsedTree::Rooted(_) => None,
        }
    }

    pub fn rooted(self) -> Option<RootedTree> {
        match self {
            ParsedTree::Rooted(t) => Some(t),
            ParsedTree::Unrooted(_) => None,
        }
    }
}

fn check_tree_syntax(p: &PNode, is_top: bool, mode: Mode, seen: &mut BTreeSet<String>) -> Result<()> {
    if p.hybrid.is_some() {
        return Err(Error::Parse { pos: p.pos, msg: "hybrid tag in a tree".into() });
    }
    if p.children.is_empty() {
        let l = p.label.as_ref().unwrap();
        if !seen.insert(l.clone()) {
            return Err(Error::Parse { pos: p.pos, msg: format!("duplicate taxon {l}") });
        }
        return Ok(());
    }
    if p.label.is_some() {
        return Err(Error::Parse { pos: p.pos, msg: "internal node labels are not supported".into() });
    }
    let k = p.children.len();
    let ok = match (mode, is_top) {
        (Mode::Unrooted, true) => k == 3 || (k == 2 && p.children.iter().all(|c| c.children.is_empty())),
        _ => k == 2,
    };
    if !ok {
        return Err(Error::Parse {
            pos: p.pos,
            msg: format!("node has {k} children; the tree must be binary"),
        });
    }
    for c in &p.children {
        check_tree_syntax(c, false, mode, seen)?;
    }
    Ok(())
}

/// Parses a binary tree. Unrooted input uses a top-level trifurcation
/// (`(A,B,C);`) or `(a,b);` for two taxa; rooted input a bifurcation.
pub fn parse_tree(text: &str, mode: Mode) -> Result<ParsedTree> {
    let p = parse_syntax(text)?;
    check_tree_syntax(&p, true, mode, &mut BTreeSet::new())?;
    Ok(match mode {
        Mode::Rooted => {
            let mut t = RootedNetwork::new();
            build_rooted_tree(&p, &mut t);
            ParsedTree::Rooted(t)
        }
        Mode::Unrooted => {
            let mut t = UnrootedNetwork::new();
            if p.children.len() == 2 {
                let a = t.add_leaf(p.children[0].label.as_ref().unwrap());
                let b = t.add_leaf(p.children[1].label.as_ref().unwrap());
                t.add_edge(a, b);
            } else {
                build_unrooted(&p, &mut t);
            }
            ParsedTree::Unrooted(t)
        }
    })
}

pub fn parse_unrooted_tree(text: &str) -> Result<UnrootedTree> {
    Ok(parse_tree(text, Mode::Unrooted)?.unrooted().unwrap())
}

pub fn parse_rooted_tree(text: &str) -> Result<RootedTree> {
    Ok(parse_tree(text, Mode::Rooted)?.rooted().unwrap())
}

fn build_rooted_tree(p: &PNode, t: &mut RootedNetwork) -> NodeId {
    if p.children.is_empty() {
        return t.add_leaf(p.label.as_ref().unwrap());
    }
    let v = t.add_node();
    for c in &p.children {
        let w = build_rooted_tree(c, t);
        t.add_edge(v, w);
    }
    v
}

fn build_unrooted(p: &PNode, t: &mut UnrootedNetwork) -> NodeId {
    if p.children.is_empty() {
        return t.add_leaf(p.label.as_ref().unwrap());
    }
    let v = t.add_node();
    for c in &p.children {
        let w = build_unrooted(c, t);
        t.add_edge(v, w);
    }
    v
}

/// Canonical Newick of an unrooted tree.
pub fn write_tree(t: &UnrootedTree) -> String {
    canonical_unrooted(t)
}

/// Canonical Newick of a rooted tree.
pub fn write_rooted_tree(t: &RootedTree) -> String {
    canonical_rooted(t)
}

// ---------------------------------------------------------------------------
// Networks

/// A parsed network in the requested mode.
#[derive(Clone, Debug)]
pub enum ParsedNetwork {
    Unrooted(UnrootedNetwork),
    Rooted(RootedNetwork),
}

/// Parses a network: extended Newick (`#H1` tags) when rooted, the edge-list
/// format when unrooted. The result is validated.
pub fn parse_network(text: &str, mode: Mode) -> Result<ParsedNetwork> {
    match mode {
        Mode::Rooted => parse_rooted_network(text).map(ParsedNetwork::Rooted),
        Mode::Unrooted => parse_unrooted_network(text).map(ParsedNetwork::Unrooted),
    }
}

pub fn parse_rooted_network(text: &str) -> Result<RootedNetwork> {
    let p = parse_syntax(text)?;
    let mut n = RootedNetwork::new();
    let mut tags: BTreeMap<String, (NodeId, usize, bool)> = BTreeMap::new();
    build_enewick(&p, &mut n, &mut tags)?;
    for (tag, (_, count, defined)) in &tags {
        if *count < 2 || !defined {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("hybrid tag #{tag} must occur at least twice with one definition"),
            });
        }
    }
    n.validate()?;
    Ok(n)
}

fn build_enewick(
    p: &PNode,
    n: &mut RootedNetwork,
    tags: &mut BTreeMap<String, (NodeId, usize, bool)>,
) -> Result<NodeId> {
    let v = match &p.hybrid {
        Some(tag) => {
            let entry = tags.entry(tag.clone()).or_insert_with(|| (n.add_node(), 0, false));
            entry.1 += 1;
            let defining = !p.children.is_empty() || p.label.is_some();
            if defining {
                if entry.2 {
                    return Err(Error::Parse { pos: p.pos, msg: format!("hybrid #{tag} defined twice") });
                }
                entry.2 = true;
            }
            let v = entry.0;
            if !defining {
                return Ok(v);
            }
            v
        }
        None => n.add_node(),
    };
    if let Some(l) = &p.label {
        check_taxon_name(l)?;
        if n.leaf(l).is_some() {
            return Err(Error::Parse { pos: p.pos, msg: format!("duplicate taxon {l}") });
        }
        if !p.children.is_empty() {
            return Err(Error::Parse { pos: p.pos, msg: "internal node labels are not supported".into() });
        }
        n.set_label(v, Some(l.clone()));
    }
    for c in &p.children {
        let w = build_enewick(c, n, tags)?;
        n.add_edge(v, w);
    }
    Ok(v)
}

/// Parses the edge-list format:
///
/// ```text
/// unrooted-network
/// u v
/// leaf u taxon
/// ```
pub fn parse_unrooted_network(text: &str) -> Result<UnrootedNetwork> {
    let n = parse_edge_list_raw(text)?;
    n.validate()?;
    Ok(n)
}

/// Edge-list parsing without the final validity check.
pub fn parse_edge_list_raw(text: &str) -> Result<UnrootedNetwork> {
    let mut n = UnrootedNetwork::new();
    let mut ids: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut offset = 0;
    let mut header = false;
    for line in text.lines() {
        let pos = offset;
        offset += line.len() + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !header {
            if !t.starts_with(EDGE_LIST_HEADER) {
                return Err(Error::Parse { pos, msg: format!("expected '{EDGE_LIST_HEADER}' header") });
            }
            header = true;
            continue;
        }
        let words: Vec<&str> = t.split_whitespace().collect();
        let mut node = |name: &str, n: &mut UnrootedNetwork| -> Result<NodeId> {
            check_taxon_name(name).map_err(|_| Error::Parse { pos, msg: format!("bad node name {name:?}") })?;
            Ok(*ids.entry(name.to_string()).or_insert_with(|| n.add_node()))
        };
        match words.as_slice() {
            ["leaf", v, taxon] => {
                check_taxon_name(taxon).map_err(|_| Error::Parse { pos, msg: format!("bad taxon {taxon:?}") })?;
                let v = node(v, &mut n)?;
                if n.leaf(taxon).is_some() {
                    return Err(Error::Parse { pos, msg: format!("duplicate taxon {taxon}") });
                }
                if n.label(v).is_some() {
                    return Err(Error::Parse { pos, msg: "node labelled twice".into() });
                }
                n.set_label(v, Some(taxon.to_string()));
            }
            [a, b] => {
                let a = node(a, &mut n)?;
                let b = node(b, &mut n)?;
                n.add_edge(a, b);
            }
            _ => return Err(Error::Parse { pos, msg: format!("cannot read line {t:?}") }),
        }
    }
    if !header {
        return Err(Error::Parse { pos: 0, msg: format!("expected '{EDGE_LIST_HEADER}' header") });
    }
    Ok(n)
}

/// Edge-list text of an unrooted network. Nodes are numbered densely.
pub fn write_network(n: &UnrootedNetwork) -> String {
    let mut num: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut lines = Vec::new();
    let id = |v: NodeId, num: &mut BTreeMap<NodeId, usize>| {
        let k = num.len();
        *num.entry(v).or_insert(k)
    };
    for (_, u, v) in n.edges() {
        let (a, b) = (id(u, &mut num), id(v, &mut num));
        lines.push(format!("n{a} n{b}"));
    }
    for v in n.nodes() {
        id(v, &mut num);
    }
    let mut s = format!("{EDGE_LIST_HEADER}\n");
    for l in lines {
        s.push_str(&l);
        s.push('\n');
    }
    for (x, v) in n.taxon_index() {
        let _ = writeln!(s, "leaf n{} {x}", num[v]);
    }
    s
}

/// Extended Newick of a rooted network. Children are ordered by smallest
/// taxon below, ties broken by expanded subtree text; hybrid tags are
/// numbered in order of first appearance.
pub fn write_rooted_network(n: &RootedNetwork) -> String {
    let Some(root) = n.root() else { return ";".into() };
    // ordering key: smallest taxon below, then the fully expanded subtree text
    let mut key: BTreeMap<NodeId, (String, String)> = BTreeMap::new();
    let order = n.topological_order().expect("acyclic");
    for &v in order.iter().rev() {
        let mut kids: Vec<&(String, String)> = n.children(v).map(|c| &key[&c]).collect();
        kids.sort();
        let k = match n.label(v) {
            Some(l) => (l.to_string(), l.to_string()),
            None => {
                let min = kids.first().map(|k| k.0.clone()).unwrap_or_default();
                let body: Vec<&str> = kids.iter().map(|k| k.1.as_str()).collect();
                (min, format!("({})", body.join(",")))
            }
        };
        key.insert(v, k);
    }
    let mut tags: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut out = String::new();
    write_enewick(n, root, &key, &mut tags, &mut out);
    out.push(';');
    out
}

fn write_enewick(
    n: &RootedNetwork,
    v: NodeId,
    key: &BTreeMap<NodeId, (String, String)>,
    tags: &mut BTreeMap<NodeId, usize>,
    out: &mut String,
) {
    let hybrid = n.indegree(v) >= 2;
    if hybrid {
        if let Some(k) = tags.get(&v) {
            let _ = write!(out, "#H{k}");
            return;
        }
        let k = tags.len() + 1;
        tags.insert(v, k);
    }
    let mut kids: Vec<NodeId> = n.children(v).collect();
    kids.sort_by(|a, b| key[a].cmp(&key[b]));
    if !kids.is_empty() {
        out.push('(');
        for (i, c) in kids.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_enewick(n, *c, key, tags, out);
        }
        out.push(')');
    }
    if let Some(l) = n.label(v) {
        out.push_str(l);
    }
    if hybrid {
        let _ = write!(out, "#H{}", tags[&v]);
    }
}

// ---------------------------------------------------------------------------
// DOT

fn dot_label(n: Option<&str>) -> String {
    match n {
        Some(l) => format!("label=\"{l}\", shape=plaintext"),
        None => "label=\"\", shape=point".into(),
    }
}

/// Graphviz text for an unrooted network; edges of `image` are highlighted.
pub fn export_dot(n: &UnrootedNetwork, image: Option<&Image>) -> String {
    let hl: BTreeSet<EdgeId> = image.map(|i| i.host_edges.clone()).unwrap_or_default();
    let mut s = String::from("graph network {\n");
    for v in n.nodes() {
        let _ = writeln!(s, "  n{v} [{}];", dot_label(n.label(v)));
    }
    for (e, u, v) in n.edges() {
        let style = if hl.contains(&e) { " [color=red, penwidth=2.5]" } else { "" };
        let _ = writeln!(s, "  n{u} -- n{v}{style};");
    }
    s.push_str("}\n");
    s
}

/// Graphviz text for a rooted network; edges of `image` are highlighted.
pub fn export_dot_rooted(n: &RootedNetwork, image: Option<&Image>) -> String {
    let hl: BTreeSet<EdgeId> = image.map(|i| i.host_edges.clone()).unwrap_or_default();
    let mut s = String::from("digraph network {\n");
    for v in n.nodes() {
        let _ = writeln!(s, "  n{v} [{}];", dot_label(n.label(v)));
    }
    for (e, u, v) in n.edges() {
        let style = if hl.contains(&e) { " [color=red, penwidth=2.5]" } else { "" };
        let _ = writeln!(s, "  n{u} -> n{v}{style};");
    }
    s.push_str("}\n");
    s
}
