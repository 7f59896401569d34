use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostic, DslError, Span};

const STATEMENT_KEYWORDS: &[&str] =
    &["kind", "newcelltype", "neuron", "updateweights", "subgraph", "new-copy", "silent", "active"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: Span,
    warnings: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.span)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".to_string(), Tok::describe)
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(Diagnostic::error(self.span(), format!("expected {wanted}, found {}", self.found())))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Keyword(k)) if k == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`#{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn number(&mut self, what: &str) -> PResult<f64> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.unexpected(what),
        }
    }

    fn path(&mut self, what: &str) -> PResult<Path> {
        let mut parts = vec![self.ident(what)?];
        while self.eat(&Tok::Dot) {
            parts.push(self.ident("a name after `.`")?);
        }
        Ok(Path(parts))
    }

    /// A statement ends at `;`. A missing `;` is tolerated, with a warning,
    /// when the next statement or the end of input follows directly.
    fn terminate(&mut self, keyword: &str, start: Span) -> PResult<()> {
        if self.eat(&Tok::Semi) {
            return Ok(());
        }
        match self.peek() {
            None => {}
            Some(Tok::Keyword(k)) if STATEMENT_KEYWORDS.contains(&k.as_str()) => {}
            _ => return self.unexpected("`;`"),
        }
        self.warnings.push(Diagnostic::warning(
            start,
            format!("`#{keyword}` statement is not terminated by `;`"),
        ));
        Ok(())
    }

    fn statement(&mut self) -> PResult<Statement> {
        let span = self.span();
        let kw = match self.bump() {
            Some(Tok::Keyword(k)) => k,
            Some(t) => {
                return Err(Diagnostic::error(span, format!("expected a statement keyword, found {}", t.describe())))
            }
            None => unreachable!("statement() called at end of input"),
        };
        let stmt = match kw.as_str() {
            "kind" => Stmt::Kind { name: self.ident("a kind name")? },
            "newcelltype" => self.cell_type()?,
            "neuron" => self.neuron()?,
            "updateweights" => self.update()?,
            "subgraph" => self.subgraph()?,
            "new-copy" => self.new_copy()?,
            "silent" | "active" => Stmt::Silent {
                target: self.path("a subgraph or neuron name")?,
                silent: kw == "silent",
            },
            other => return Err(Diagnostic::error(span, format!("unknown keyword `#{other}`"))),
        };
        self.terminate(&kw, span)?;
        Ok(Statement { stmt, span })
    }

    fn cell_type(&mut self) -> PResult<Stmt> {
        let name = self.ident("a neuron type name")?;
        let mut ports = Vec::new();
        let (mut builtin, mut alpha) = (None, None);
        loop {
            let dir = if self.eat_keyword("input") {
                PortDir::Input
            } else if self.eat_keyword("output") {
                PortDir::Output
            } else if self.eat_keyword("builtin") {
                builtin = Some(self.ident("a transform name")?);
                continue;
            } else if self.eat_keyword("alpha") {
                alpha = Some(self.number("a number")?);
                continue;
            } else {
                break;
            };
            let kind = self.ident("a kind name")?;
            self.expect(&Tok::Colon)?;
            let port = self.ident("a port name")?;
            ports.push(PortSpec { dir, kind, name: port });
        }
        Ok(Stmt::CellType { name, ports, builtin, alpha })
    }

    fn bindings(&mut self) -> PResult<Vec<Binding>> {
        if self.eat_keyword("dummy") {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        while matches!(self.peek(), Some(Tok::Ident(_))) {
            let port = self.ident("a port name")?;
            self.expect(&Tok::Colon)?;
            let alias = self.ident("an alias")?;
            out.push(Binding { port, alias });
        }
        Ok(out)
    }

    fn neuron(&mut self) -> PResult<Stmt> {
        let cell_type = self.ident("a neuron type name")?;
        self.expect(&Tok::Colon)?;
        let name = self.ident("a neuron name")?;
        let outputs = self.bindings()?;
        self.expect(&Tok::Eq)?;
        self.expect_keyword("transformof")?;
        let inputs = self.bindings()?;
        let constant = if self.eat_keyword("const") {
            Some(match self.peek() {
                Some(Tok::LBrace) => ConstLit::Mask(self.mask()?),
                _ => ConstLit::Number(self.number("a number or a `{...}` mask")?),
            })
        } else {
            None
        };
        Ok(Stmt::Neuron { cell_type, name, outputs, inputs, constant })
    }

    fn mask(&mut self) -> PResult<MaskLit> {
        self.expect(&Tok::LBrace)?;
        let mut entries = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(MaskLit(entries));
        }
        loop {
            let path = self.path("an alias")?;
            let coef = if self.eat(&Tok::Colon) { self.number("a coefficient")? } else { 1.0 };
            entries.push(MaskEntry { path, coef });
            if self.eat(&Tok::RBrace) {
                return Ok(MaskLit(entries));
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn operand(&mut self) -> PResult<Operand> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Operand::Path(self.path("an alias")?)),
            Some(Tok::LBrace) => Ok(Operand::Mask(self.mask()?)),
            Some(Tok::Placeholder(p)) => {
                let p = p.clone();
                self.pos += 1;
                Ok(Operand::Placeholder(p))
            }
            _ => self.unexpected("an alias, a `{...}` mask or a `<...>` placeholder"),
        }
    }

    fn update(&mut self) -> PResult<Stmt> {
        let target = self.operand()?;
        self.expect(&Tok::PlusEq)?;
        let coef = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Number(n)), Some(Tok::Star)) => {
                let n = *n;
                self.pos += 2;
                Some(n)
            }
            _ => None,
        };
        let source = self.operand()?;
        if coef.is_none() && self.eat(&Tok::Star) {
            let beta = self.operand()?;
            return Ok(Stmt::GenericUpdate { gamma: target, alpha: source, beta });
        }
        Ok(Stmt::Update { target, coef: coef.unwrap_or(1.0), source })
    }

    fn subgraph(&mut self) -> PResult<Stmt> {
        let name = self.ident("a subgraph name")?;
        self.expect(&Tok::Eq)?;
        self.expect_keyword("cells")?;
        let mut members = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) => members.push(Member::Neuron(self.path("a neuron name")?)),
                Some(Tok::Ellipsis) => {
                    self.pos += 1;
                    members.push(Member::Ellipsis);
                }
                _ => break,
            }
        }
        Ok(Stmt::Subgraph { name, members })
    }

    fn new_copy(&mut self) -> PResult<Stmt> {
        let name = self.ident("a name for the copy")?;
        self.expect(&Tok::Eq)?;
        self.expect_keyword("deepcopyof")?;
        let source = self.path("a subgraph name")?;
        let (mut variant, mut alpha) = (None, None);
        loop {
            if self.at_keyword("variant") {
                self.pos += 1;
                let span = self.span();
                let n = self.number("a variant number")?;
                if n.fract() != 0.0 || !(0.0..=255.0).contains(&n) {
                    return Err(Diagnostic::error(span, format!("variant must be a small integer, found {n}")));
                }
                variant = Some(n as u8);
            } else if self.eat_keyword("alpha") {
                alpha = Some(self.number("a number")?);
            } else {
                break;
            }
        }
        Ok(Stmt::NewCopy { name, source, variant, alpha })
    }
}

fn check_duplicates(statements: &[Statement]) -> Vec<Diagnostic> {
    let mut seen: BTreeMap<(&str, &str), Span> = BTreeMap::new();
    let mut errors = Vec::new();
    for s in statements {
        let (space, what, name) = match &s.stmt {
            Stmt::Kind { name } => ("kind", "kind", name),
            Stmt::CellType { name, .. } => ("type", "neuron type", name),
            Stmt::Neuron { name, .. } => ("neuron", "neuron", name),
            // Subgraphs and copies share one namespace.
            Stmt::Subgraph { name, .. } => ("subgraph", "subgraph", name),
            Stmt::NewCopy { name, .. } => ("subgraph", "subgraph", name),
            _ => continue,
        };
        if let Some(first) = seen.get(&(space, name.as_str())) {
            errors.push(Diagnostic::error(
                s.span,
                format!("duplicate {what} `{name}` (first declared at {}:{})", first.line, first.column),
            ));
        } else {
            seen.insert((space, name), s.span);
        }
    }
    errors
}

pub fn parse(src: &str) -> Result<Program, DslError> {
    let toks = tokenize(src)?;
    let lines = src.split('\n').count();
    let end = Span { line: lines, column: src.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1 };
    let mut p = Parser { toks, pos: 0, end, warnings: Vec::new() };
    let mut statements = Vec::new();
    while p.peek().is_some() {
        statements.push(p.statement()?);
    }
    let dups = check_duplicates(&statements);
    if !dups.is_empty() {
        return Err(DslError { diagnostics: dups });
    }
    Ok(Program { statements, warnings: p.warnings })
}
