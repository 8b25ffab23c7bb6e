//! Parser for `.tdg` documents and partition files.
//!
//! Every statement starts with a keyword; ids share one namespace and must
//! be declared before use. Template nodes and arcs, and the patterns of an
//! arrow template, are scoped to their template.

use std::collections::{BTreeMap, HashSet};

use super::lexer::{lex, Tok, Token};
use crate::elevate::{PartitionCell, PartitionSpec};
use crate::model::{Arc, Digraph, Direction, FiniteWalk, Id, Index, Item, Member, Vertex, VertexFamily};
use crate::omega::{ArrowJoin, ArrowWalk, RankTemplate, Terminal, WalkPattern, DEFAULT_TIP_FORMAT};
use crate::present::{CellTemplate, Mode, TemplateArc, WalkPresentation};
use crate::rank::RankTag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
    SyntaxError { line: usize, col: usize, expected: Vec<String>, found: String },
    #[error("{line}:{col}: duplicate id `{id}`")]
    DuplicateId { id: Id, line: usize, col: usize },
    #[error("{line}:{col}: `{id}` is used before it is declared")]
    ForwardReference { id: Id, line: usize, col: usize },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::SyntaxError { .. } => "E_SYNTAX",
            ParseError::DuplicateId { .. } => "E_DUPLICATE_ID",
            ParseError::ForwardReference { .. } => "E_FORWARD_REFERENCE",
        }
    }
}

/// A parsed file: the digraph and any partitions it carries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub digraph: Digraph,
    pub partitions: Vec<PartitionSpec>,
}

type Res<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    declared: HashSet<Id>,
    doc: Document,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |t| (t.line, t.col))
    }

    fn fail<T>(&self, expected: &[&str]) -> Res<T> {
        let (line, col) = self.here();
        let found = self.peek().map_or("end of input".to_string(), |t| t.to_string());
        Err(ParseError::SyntaxError { line, col, expected: expected.iter().map(|s| s.to_string()).collect(), found })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn kw(&mut self, kw: &str) -> Res<()> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&[&format!("`{kw}`")])
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.is_kw(kw);
        self.pos += hit as usize;
        hit
    }

    fn sym(&mut self, c: char) -> Res<()> {
        if self.is_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        let hit = self.is_sym(c);
        self.pos += hit as usize;
        hit
    }

    fn ident(&mut self) -> Res<(String, usize, usize)> {
        let (line, col) = self.here();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, line, col))
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn int(&mut self) -> Res<i64> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn string(&mut self) -> Res<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(&["string"]),
        }
    }

    fn rank(&mut self) -> Res<RankTag> {
        if self.eat_kw("arrow") {
            return Ok(RankTag::ArrowOmega);
        }
        if self.eat_kw("omega") {
            return Ok(RankTag::Omega);
        }
        if matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Sym('-'))) {
            return Ok(RankTag::Finite(self.int()?));
        }
        self.fail(&["rank (integer, `arrow` or `omega`)"])
    }

    fn finite_rank(&mut self) -> Res<RankTag> {
        if matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Sym('-'))) {
            return Ok(RankTag::Finite(self.int()?));
        }
        self.fail(&["integer rank"])
    }

    fn declare(&mut self, id: &str, line: usize, col: usize) -> Res<()> {
        if !self.declared.insert(id.to_string()) {
            return Err(ParseError::DuplicateId { id: id.into(), line, col });
        }
        Ok(())
    }

    fn require(&self, id: &str, line: usize, col: usize) -> Res<()> {
        if self.declared.contains(id) {
            Ok(())
        } else {
            Err(ParseError::ForwardReference { id: id.into(), line, col })
        }
    }

    /// `@N`, `@k`, `@k+N`, `@k-N` or nothing.
    fn index(&mut self) -> Res<Index> {
        if !self.eat_sym('@') {
            return Ok(Index::None);
        }
        if self.eat_kw("k") {
            if self.eat_sym('+') {
                return Ok(Index::Rel(self.int()?));
            }
            if self.is_sym('-') {
                return Ok(Index::Rel(self.int()?));
            }
            return Ok(Index::Rel(0));
        }
        match self.peek() {
            Some(Tok::Int(_)) => Ok(Index::At(self.int()?)),
            _ => self.fail(&["index (integer or `k`)"]),
        }
    }

    /// An item whose id must already be declared, or belong to `scope`.
    fn item(&mut self, scope: Option<&CellTemplate>) -> Res<Item> {
        let (id, line, col) = self.ident()?;
        let local = scope.is_some_and(|t| t.has_node(&id) || t.arc(&id).is_some());
        if !local {
            self.require(&id, line, col)?;
        }
        Ok(Item { id, index: self.index()? })
    }

    fn list(&mut self, scope: Option<&CellTemplate>) -> Res<Vec<Item>> {
        self.sym('[')?;
        let mut out = Vec::new();
        if self.eat_sym(']') {
            return Ok(out);
        }
        loop {
            out.push(self.item(scope)?);
            if self.eat_sym(']') {
                return Ok(out);
            }
            if !self.eat_sym(',') {
                return self.fail(&["`,`", "`]`"]);
            }
        }
    }

    fn members(&mut self) -> Res<Vec<Member>> {
        let mut out = Vec::new();
        if !self.eat_sym('{') {
            return Ok(out);
        }
        while !self.eat_sym('}') {
            let direction = if self.eat_kw("intip") {
                Direction::In
            } else if self.eat_kw("outtip") {
                Direction::Out
            } else {
                return self.fail(&["`intip`", "`outtip`", "`}`"]);
            };
            loop {
                let tip = self.item(None)?;
                out.push(Member { direction, tip });
                if self.eat_sym(';') {
                    break;
                }
                self.eat_sym(',');
            }
        }
        out.sort();
        Ok(out)
    }

    fn template_end(&mut self, t: &CellTemplate) -> Res<(Id, i64)> {
        let (node, line, col) = self.ident()?;
        if !t.has_node(&node) {
            return Err(ParseError::ForwardReference { id: node, line, col });
        }
        let delta = match self.index()? {
            Index::None => 0,
            Index::Rel(d) => d,
            Index::At(_) => return self.fail(&["`@k` offset"]),
        };
        Ok((node, delta))
    }

    fn template(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        let copies = self.eat_kw("copies");
        let mut t = CellTemplate { id: id.clone(), copies, nodes: vec![], arcs: vec![] };
        self.sym('{')?;
        let mut local = HashSet::new();
        while !self.eat_sym('}') {
            if self.eat_kw("node") {
                let (n, l, c) = self.ident()?;
                if !local.insert(n.clone()) {
                    return Err(ParseError::DuplicateId { id: n, line: l, col: c });
                }
                t.nodes.push(n);
            } else if self.eat_kw("arc") {
                let (a, l, c) = self.ident()?;
                if !local.insert(a.clone()) {
                    return Err(ParseError::DuplicateId { id: a, line: l, col: c });
                }
                self.kw("from")?;
                let tail = self.template_end(&t)?;
                self.kw("to")?;
                let head = self.template_end(&t)?;
                t.arcs.push(TemplateArc { id: a, tail, head });
            } else {
                return self.fail(&["`node`", "`arc`", "`}`"]);
            }
            self.sym(';')?;
        }
        self.doc.digraph.templates.insert(id, t);
        Ok(())
    }

    fn vertex(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        self.kw("rank")?;
        let rank = self.rank()?;
        let members = self.members()?;
        self.doc.digraph.vertices.insert(id.clone(), Vertex { id, rank, members });
        Ok(())
    }

    fn family(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        self.kw("rank")?;
        let rank = self.finite_rank()?;
        self.kw("index")?;
        self.kw("k")?;
        let members = self.members()?;
        self.doc.digraph.families.insert(id.clone(), VertexFamily { id, rank, members });
        Ok(())
    }

    fn arc(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        self.kw("from")?;
        let (tail, l, c) = self.ident()?;
        self.require(&tail, l, c)?;
        self.kw("to")?;
        let (head, l, c) = self.ident()?;
        self.require(&head, l, c)?;
        self.doc.digraph.arcs.insert(id.clone(), Arc { id, tail, head });
        Ok(())
    }

    fn walk(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.kw("rank")?;
        let rank = self.finite_rank()?;
        self.sym('=')?;
        let elements = self.list(None)?;
        self.declare(&id, line, col)?;
        self.doc.digraph.walks.insert(id.clone(), FiniteWalk { id, rank, elements });
        Ok(())
    }

    fn presentation(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.kw("rank")?;
        let rank = self.finite_rank()?;
        let mut template = None;
        if self.eat_kw("over") {
            let (t, l, c) = self.ident()?;
            if !self.doc.digraph.templates.contains_key(&t) {
                return Err(ParseError::ForwardReference { id: t, line: l, col: c });
            }
            template = Some(t);
        }
        let scope = template.as_ref().map(|t| self.doc.digraph.templates[t].clone());
        self.kw("mode")?;
        let mode = match self.ident()?.0.as_str() {
            "in" => Mode::In,
            "out" => Mode::Out,
            "endless" => Mode::Endless,
            "finite" => Mode::Finite,
            _ => {
                self.pos -= 1;
                return self.fail(&["`in`", "`out`", "`endless`", "`finite`"]);
            }
        };
        let (mut left, mut left_anchor) = (vec![], 0);
        if mode == Mode::Endless {
            self.kw("left")?;
            left = self.list(scope.as_ref())?;
            self.kw("anchor")?;
            left_anchor = self.int()?;
        }
        self.kw("prefix")?;
        let prefix = self.list(scope.as_ref())?;
        let (mut repetend, mut anchor) = (vec![], 0);
        if mode != Mode::Finite {
            self.kw("repetend")?;
            repetend = self.list(scope.as_ref())?;
            self.kw("anchor")?;
            anchor = self.int()?;
        }
        self.declare(&id, line, col)?;
        let p = WalkPresentation { id: id.clone(), rank, template, mode, left, left_anchor, prefix, repetend, anchor };
        self.doc.digraph.presentations.insert(id, p);
        Ok(())
    }

    fn arrow_template(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        let mut t = RankTemplate { id: id.clone(), vertices: vec![], walks: vec![] };
        let mut local = HashSet::new();
        self.sym('{')?;
        while !self.eat_sym('}') {
            if self.eat_kw("vertex") {
                let (v, l, c) = self.ident()?;
                if !local.insert(v.clone()) {
                    return Err(ParseError::DuplicateId { id: v, line: l, col: c });
                }
                t.vertices.push(v);
            } else if self.eat_kw("walk") {
                let (name, l, c) = self.ident()?;
                if !local.insert(name.clone()) {
                    return Err(ParseError::DuplicateId { id: name, line: l, col: c });
                }
                let direction = if self.eat_kw("out") {
                    Direction::Out
                } else if self.eat_kw("in") {
                    Direction::In
                } else {
                    return self.fail(&["`out`", "`in`"]);
                };
                self.kw("at")?;
                let (at, l, c) = self.ident()?;
                let terminal = if t.has_vertex(&at) {
                    Terminal::Pattern(at)
                } else {
                    self.require(&at, l, c)?;
                    Terminal::Fixed(at)
                };
                self.kw("reach")?;
                let (reach, l, c) = self.ident()?;
                if !t.has_vertex(&reach) {
                    return Err(ParseError::ForwardReference { id: reach, line: l, col: c });
                }
                let tip_format = if self.eat_kw("tip") { self.string()? } else { DEFAULT_TIP_FORMAT.to_string() };
                t.walks.push(WalkPattern { name, direction, terminal, reach, tip_format });
            } else {
                return self.fail(&["`vertex`", "`walk`", "`}`"]);
            }
            self.sym(';')?;
        }
        self.doc.digraph.arrow_templates.insert(id, t);
        Ok(())
    }

    fn arrow_walk(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        self.kw("template")?;
        let (template, l, c) = self.ident()?;
        let Some(t) = self.doc.digraph.arrow_templates.get(&template).cloned() else {
            return Err(ParseError::ForwardReference { id: template, line: l, col: c });
        };
        self.kw("kind")?;
        let kind = if self.eat_kw("out") {
            Direction::Out
        } else if self.eat_kw("in") {
            Direction::In
        } else {
            return self.fail(&["`out`", "`in`"]);
        };
        self.kw("base")?;
        let base = self.int()?;
        self.kw("vertex")?;
        let (vertex, l, c) = self.ident()?;
        if !t.has_vertex(&vertex) {
            return Err(ParseError::ForwardReference { id: vertex, line: l, col: c });
        }
        self.kw("step")?;
        let (step, l, c) = self.ident()?;
        if t.walk(&step).is_none() {
            return Err(ParseError::ForwardReference { id: step, line: l, col: c });
        }
        let mut overrides = BTreeMap::new();
        if self.eat_kw("override") {
            loop {
                let p = self.int()?;
                if p < 0 {
                    return self.fail(&["term position"]);
                }
                self.sym('=')?;
                overrides.insert(p as usize, self.ident()?.0);
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.doc.digraph.arrow_walks.insert(id.clone(), ArrowWalk { id, template, kind, base, vertex, step, overrides });
        Ok(())
    }

    fn arrow_join(&mut self) -> Res<()> {
        let (id, line, col) = self.ident()?;
        self.declare(&id, line, col)?;
        self.kw("in")?;
        let (inward, l, c) = self.ident()?;
        self.require(&inward, l, c)?;
        self.kw("out")?;
        let (outward, l, c) = self.ident()?;
        self.require(&outward, l, c)?;
        self.doc.digraph.arrow_joins.insert(id.clone(), ArrowJoin { id, inward, outward });
        Ok(())
    }

    fn partition(&mut self) -> Res<()> {
        self.kw("rank")?;
        let rank = self.rank()?;
        self.sym('{')?;
        let mut cells = Vec::new();
        let mut local = HashSet::new();
        while !self.eat_sym('}') {
            let (id, l, c) = self.ident()?;
            if !local.insert(id.clone()) {
                return Err(ParseError::DuplicateId { id, line: l, col: c });
            }
            let family = match self.index()? {
                Index::None => false,
                Index::Rel(0) => true,
                _ => return self.fail(&["`@k`", "`:`"]),
            };
            self.sym(':')?;
            let mut members = Vec::new();
            loop {
                let (m, _, _) = self.ident()?;
                members.push(Item { id: m, index: self.index()? });
                if !self.eat_sym(',') {
                    break;
                }
            }
            self.sym(';')?;
            cells.push(PartitionCell { id, family, members });
        }
        self.doc.partitions.push(PartitionSpec { rank, cells });
        Ok(())
    }

    fn statement(&mut self) -> Res<()> {
        let (kw, _, _) = self.ident().or_else(|_| self.fail(&["statement"]))?;
        match kw.as_str() {
            "template" => self.template(),
            "vertex" => self.vertex(),
            "vertex-family" => self.family(),
            "arc" => self.arc(),
            "walk" => self.walk(),
            "walk-presentation" => self.presentation(),
            "arrow-template" => self.arrow_template(),
            "arrow-walk" => self.arrow_walk(),
            "arrow-join" => self.arrow_join(),
            "partition" => self.partition(),
            _ => {
                self.pos -= 1;
                self.fail(&[
                    "`template`",
                    "`vertex`",
                    "`vertex-family`",
                    "`arc`",
                    "`walk`",
                    "`walk-presentation`",
                    "`arrow-template`",
                    "`arrow-walk`",
                    "`arrow-join`",
                    "`partition`",
                ])
            }
        }
    }
}

fn parser(text: &str) -> Res<Parser> {
    let toks = lex(text).map_err(|e| ParseError::SyntaxError {
        line: e.line,
        col: e.col,
        expected: vec!["token".into()],
        found: e.message,
    })?;
    let lines = text.lines().count().max(1);
    let eof = (lines, text.lines().last().map_or(1, |l| l.chars().count() + 1));
    Ok(Parser { toks, pos: 0, declared: HashSet::new(), doc: Document::default(), eof })
}

/// Parse a full document: a `digraph` header followed by statements.
pub fn parse_spec(text: &str) -> Res<Document> {
    let mut p = parser(text)?;
    p.kw("digraph")?;
    let (name, _, _) = p.ident()?;
    p.kw("rank")?;
    let rank = p.rank()?;
    p.doc.digraph.name = name;
    p.doc.digraph.rank = rank;
    while p.pos < p.toks.len() {
        p.statement()?;
    }
    Ok(p.doc)
}

/// Parse a file holding only `partition` statements.
pub fn parse_partitions(text: &str) -> Res<Vec<PartitionSpec>> {
    let mut p = parser(text)?;
    while p.pos < p.toks.len() {
        p.kw("partition")?;
        p.partition()?;
    }
    Ok(p.doc.partitions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let d = parse_spec("digraph d rank 0\nvertex u rank 0\nvertex v rank 0\narc a from u to v\n").unwrap();
        assert_eq!(d.digraph.vertices.len(), 2);
        assert_eq!(d.digraph.arcs.len(), 1);
    }

    #[test]
    fn errors() {
        let e = parse_spec("digraph d rank 0\narc a from u to v").unwrap_err();
        assert!(matches!(e, ParseError::ForwardReference { ref id, line: 2, .. } if id == "u"));
        let e = parse_spec("digraph d rank 0\nvertex u rank 0\nvertex u rank 0").unwrap_err();
        assert_eq!(e.code(), "E_DUPLICATE_ID");
        let e = parse_spec("digraph d rank 0\nvertx u rank 0").unwrap_err();
        assert!(matches!(e, ParseError::SyntaxError { line: 2, col: 1, .. }));
        let e = parse_spec("digraph d rank 0\ntemplate t { node a; arc x from a@k to b@k+1; }").unwrap_err();
        assert!(matches!(e, ParseError::ForwardReference { ref id, .. } if id == "b"));
    }

    #[test]
    fn presentation_and_partition() {
        let text = "digraph d rank 0
            template t { node n; arc a from n to n@k+1; }
            walk-presentation p rank 0 over t mode out prefix [] repetend [n@k, a@k] anchor 0
            partition rank 0 { v: p; }";
        let doc = parse_spec(text).unwrap();
        let p = &doc.digraph.presentations["p"];
        assert_eq!(p.repetend, vec![Item::rel("n", 0), Item::rel("a", 0)]);
        assert_eq!(doc.partitions[0].cells[0].members, vec![Item::new("p")]);
        let parts = parse_partitions("partition rank 0 { w@k: p@k+1, q@0; }").unwrap();
        assert!(parts[0].cells[0].family);
        assert_eq!(parts[0].cells[0].members[0], Item::rel("p", 1));
    }
}
