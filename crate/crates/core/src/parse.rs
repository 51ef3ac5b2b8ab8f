use std::collections::HashSet;
use std::fmt;

use crate::alphabet::{is_identifier, MonomerAlphabet};
use crate::dataset::Dataset;
use crate::error::ModelError;
use crate::rule::{Rule, Speed};
use crate::tree::{Molecule, NodeId, Tree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown monomer `{0}`")]
    UnknownMonomer(String),
    #[error("monomer `{name}` has arity {expected} but {found} slots were given")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("monomer `{name}` redeclared with arity {found} (was {expected})")]
    Redeclared {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate molecule")]
    DuplicateMolecule,
    #[error("a rule needs exactly one `*` node, found {0}")]
    ExpandMarkers(usize),
    #[error("`{0}` is not allowed here")]
    Misplaced(String),
    #[error("dataset declares no molecules")]
    NoMolecules,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            kind,
        }
    }
}

/// Everything a text file may declare; [`parse_dataset`] and [`parse_rules`] restrict it.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub alphabet: MonomerAlphabet,
    pub molecules: Vec<Molecule>,
    pub rules: Vec<Rule>,
}

/// Rules together with the alphabet they are written over.
#[derive(Clone, Debug)]
pub struct RuleFile {
    pub alphabet: MonomerAlphabet,
    pub rules: Vec<Rule>,
}

pub fn parse_dataset(text: &str) -> Result<Dataset, ParseError> {
    let doc = Parser::new(text, MonomerAlphabet::new(), Allow::Molecules).document()?;
    Dataset::new(doc.alphabet, doc.molecules).map_err(|_| {
        Pos {
            line: 1,
            column: 1,
        }
        .error(ParseErrorKind::NoMolecules)
    })
}

pub fn parse_rules(text: &str) -> Result<RuleFile, ParseError> {
    parse_rules_with(text, &MonomerAlphabet::new())
}

/// Parses a rule file on top of `base`; `sugar` lines must agree with `base` or add new monomers.
pub fn parse_rules_with(text: &str, base: &MonomerAlphabet) -> Result<RuleFile, ParseError> {
    let doc = Parser::new(text, base.clone(), Allow::Rules).document()?;
    Ok(RuleFile {
        alphabet: doc.alphabet,
        rules: doc.rules,
    })
}

/// Parses any mix of `sugar`, `mol` and `rule` statements.
pub fn parse_document(text: &str, base: &MonomerAlphabet) -> Result<Document, ParseError> {
    Parser::new(text, base.clone(), Allow::Both).document()
}

pub fn parse_molecule(alphabet: &MonomerAlphabet, text: &str) -> Result<Molecule, ParseError> {
    let mut p = Parser::new(text, alphabet.clone(), Allow::Molecules);
    let raw = p.tree(false)?;
    p.expect_end()?;
    p.build_molecule(&raw)
}

pub fn parse_rule(alphabet: &MonomerAlphabet, text: &str) -> Result<Rule, ParseError> {
    let mut p = Parser::new(text, alphabet.clone(), Allow::Rules);
    let r = p.rule_body()?;
    p.expect_end()?;
    Ok(r)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Allow {
    Molecules,
    Rules,
    Both,
}

struct RawNode {
    name: String,
    pos: Pos,
    star: bool,
    slots: Option<Vec<RawSlot>>,
}

enum RawSlot {
    Node(RawNode),
    Empty,
    HardEnd,
}

struct Parser {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
    alphabet: MonomerAlphabet,
    allow: Allow,
}

impl Parser {
    fn new(text: &str, alphabet: MonomerAlphabet, allow: Allow) -> Self {
        Parser {
            chars: text.chars().collect(),
            at: 0,
            line: 1,
            column: 1,
            alphabet,
            allow,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.pos().error(ParseErrorKind::Syntax(msg.into()))
    }

    /// Skips spaces and tabs, and comments running to the end of the line.
    fn skip_inline(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// Skips all whitespace including newlines and comments.
    fn skip_all(&mut self) {
        loop {
            self.skip_inline();
            if self.peek() == Some('\n') {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        self.skip_all();
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.syntax(format!("unexpected `{c}`"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if is_identifier(&s) {
            Ok(s)
        } else if s.is_empty() {
            Err(self.syntax("expected a name"))
        } else {
            Err(self.syntax(format!("invalid name `{s}`")))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s.parse()
            .map_err(|_| start.error(ParseErrorKind::Syntax("expected a number".into())))
    }

    fn document(mut self) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        let mut seen = HashSet::new();
        loop {
            self.skip_all();
            while self.peek() == Some(';') {
                self.bump();
                self.skip_all();
            }
            if self.peek().is_none() {
                break;
            }
            let start = self.pos();
            let keyword = self.ident()?;
            self.skip_inline();
            match keyword.as_str() {
                "sugar" => self.sugar()?,
                "mol" if self.allow != Allow::Rules => {
                    let raw = self.tree(false)?;
                    let m = self.build_molecule(&raw)?;
                    if !seen.insert(m.clone()) {
                        return Err(start.error(ParseErrorKind::DuplicateMolecule));
                    }
                    doc.molecules.push(m);
                }
                "rule" if self.allow != Allow::Molecules => {
                    let r = self.rule_body()?;
                    doc.rules.push(r);
                }
                other => return Err(start.error(ParseErrorKind::Misplaced(other.to_string()))),
            }
            self.skip_inline();
            match self.peek() {
                None | Some(';') | Some('\n') => {}
                Some(c) => return Err(self.syntax(format!("unexpected `{c}`"))),
            }
        }
        if self.allow == Allow::Molecules && doc.molecules.is_empty() {
            return Err(self.pos().error(ParseErrorKind::NoMolecules));
        }
        doc.alphabet = self.alphabet;
        Ok(doc)
    }

    fn sugar(&mut self) -> Result<(), ParseError> {
        let pos = self.pos();
        let name = self.ident()?;
        self.skip_inline();
        let arity = self.number()?;
        match self.alphabet.lookup(&name) {
            Some(id) if self.alphabet.arity(id) == arity => Ok(()),
            Some(id) if self.allow == Allow::Rules => Err(pos.error(ParseErrorKind::Redeclared {
                expected: self.alphabet.arity(id),
                name,
                found: arity,
            })),
            _ => self
                .alphabet
                .declare(&name, arity)
                .map(|_| ())
                .map_err(|e| pos.error(e.into())),
        }
    }

    fn tree(&mut self, rule: bool) -> Result<RawNode, ParseError> {
        let mut star = false;
        if rule && self.peek() == Some('*') {
            self.bump();
            star = true;
        }
        let pos = self.pos();
        let name = self.ident()?;
        self.skip_inline();
        let slots = if self.peek() == Some('(') {
            self.bump();
            let mut slots = Vec::new();
            loop {
                self.skip_all();
                let slot = match self.peek() {
                    Some('_') if !self.next_is_name_char() => {
                        self.bump();
                        RawSlot::Empty
                    }
                    Some('!') if rule => {
                        self.bump();
                        RawSlot::HardEnd
                    }
                    _ => RawSlot::Node(self.tree(rule)?),
                };
                slots.push(slot);
                self.skip_all();
                match self.peek() {
                    Some(',') => {
                        self.bump();
                    }
                    Some(')') => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.syntax("expected `,` or `)`")),
                }
            }
            Some(slots)
        } else {
            None
        };
        Ok(RawNode {
            name,
            pos,
            star,
            slots,
        })
    }

    fn next_is_name_char(&self) -> bool {
        self.chars
            .get(self.at + 1)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '-')
    }

    fn rule_body(&mut self) -> Result<Rule, ParseError> {
        let start = self.pos();
        let raw = self.tree(true)?;
        let mut compartment = 1u32;
        let mut speed = Speed::Slow;
        loop {
            self.skip_inline();
            if self.peek() != Some('@') {
                break;
            }
            self.bump();
            let attr_pos = self.pos();
            let attr = self.ident()?;
            match attr.as_str() {
                "comp" => {
                    self.expect('=')?;
                    compartment = u32::try_from(self.number()?)
                        .map_err(|_| attr_pos.error(ParseErrorKind::Syntax("compartment too large".into())))?;
                }
                "fast" => speed = Speed::Fast,
                "slow" => speed = Speed::Slow,
                _ => {
                    return Err(attr_pos.error(ParseErrorKind::Syntax(format!(
                        "unknown attribute `@{attr}`"
                    ))))
                }
            }
        }
        let mut tree: Option<Tree> = None;
        let mut stars = Vec::new();
        let mut ends = Vec::new();
        self.build(&raw, &mut tree, None, &mut stars, &mut ends)?;
        let tree = tree.expect("root was built");
        if stars.len() != 1 {
            return Err(start.error(ParseErrorKind::ExpandMarkers(stars.len())));
        }
        Rule::new(tree, stars[0], ends, compartment, speed).map_err(|e| start.error(e.into()))
    }

    fn build_molecule(&self, raw: &RawNode) -> Result<Molecule, ParseError> {
        let mut tree = None;
        let mut stars = Vec::new();
        let mut ends = Vec::new();
        self.build(raw, &mut tree, None, &mut stars, &mut ends)?;
        Ok(Molecule::new(tree.expect("root was built")))
    }

    fn build(
        &self,
        raw: &RawNode,
        tree: &mut Option<Tree>,
        at: Option<(NodeId, usize)>,
        stars: &mut Vec<NodeId>,
        ends: &mut Vec<(NodeId, usize)>,
    ) -> Result<(), ParseError> {
        let label = self
            .alphabet
            .lookup(&raw.name)
            .ok_or_else(|| raw.pos.error(ParseErrorKind::UnknownMonomer(raw.name.clone())))?;
        let arity = self.alphabet.arity(label);
        if let Some(slots) = &raw.slots {
            if slots.len() != arity {
                return Err(raw.pos.error(ParseErrorKind::Arity {
                    name: raw.name.clone(),
                    expected: arity,
                    found: slots.len(),
                }));
            }
        }
        let id = match (tree.as_mut(), at) {
            (None, _) => {
                *tree = Some(Tree::leaf(&self.alphabet, label));
                NodeId(0)
            }
            (Some(t), Some((parent, slot))) => t
                .add_child(&self.alphabet, parent, slot, label)
                .map_err(|e| raw.pos.error(e.into()))?,
            (Some(_), None) => unreachable!("only the root has no parent"),
        };
        if raw.star {
            stars.push(id);
        }
        for (i, slot) in raw.slots.iter().flatten().enumerate() {
            match slot {
                RawSlot::Node(child) => self.build(child, tree, Some((id, i + 1)), stars, ends)?,
                RawSlot::Empty => {}
                RawSlot::HardEnd => ends.push((id, i + 1)),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{molecule_to_string, rule_to_string};

    #[test]
    fn reads_the_grammar_example() {
        let d = parse_dataset("sugar A 2; sugar D 0; mol A(D,_)").unwrap();
        assert_eq!(d.alphabet().len(), 2);
        let m = &d.molecules()[0];
        assert_eq!(m.len(), 2);
        assert!(m.child(m.root(), 1).is_some());
        assert!(m.child(m.root(), 2).is_none());
        assert_eq!(molecule_to_string(d.alphabet(), m), "A(D, _)");
    }

    #[test]
    fn reports_unknown_monomer_with_position() {
        let e = parse_dataset("sugar A 1; mol A(A(B))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownMonomer("B".into()));
        assert_eq!((e.line, e.column), (1, 20));
    }

    #[test]
    fn reports_arity_and_duplicates() {
        let e = parse_dataset("sugar A 2\nsugar D 0\nmol A(D)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
        assert_eq!(e.line, 3);
        let e = parse_dataset("sugar A 2\nsugar D 0\nmol A(D,_)\nmol A( D , _ )").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateMolecule);
        assert_eq!(e.line, 4);
        let e = parse_dataset("sugar A 2\nsugar A 1\nmol A").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::DuplicateMonomer(_))));
        let e = parse_dataset("sugar A 2 mol A").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn multiline_trees_and_comments() {
        let d = parse_dataset("# header\nsugar A 2 # binary\nsugar D 0\nmol A(\n  D,\n  A(D, D)\n)\n").unwrap();
        assert_eq!(molecule_to_string(d.alphabet(), &d.molecules()[0]), "A(D, A(D, D))");
    }

    #[test]
    fn rule_markers_round_trip() {
        let f = parse_rules("sugar A 2; sugar B 0\nrule A(*A, B)\nrule A(*A, !) @comp=2 @fast").unwrap();
        assert_eq!(rule_to_string(&f.alphabet, &f.rules[0]), "A(*A, B)");
        assert_eq!(rule_to_string(&f.alphabet, &f.rules[1]), "A(*A, !) @comp=2 @fast");
        assert_eq!(f.rules[1].hard_ends().len(), 1);
        let e = parse_rules("sugar A 2\nrule A(A, _)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExpandMarkers(0));
        let e = parse_rules("sugar A 2\nrule *A(A, _)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::ExpandAtRoot)));
        assert!(parse_rules("sugar A 2\nmol A").is_err());
    }
}
