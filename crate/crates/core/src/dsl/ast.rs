use std::fmt;

use super::{Diagnostic, Span};

/// Dotted name: `alias`, `neuron.port`, `copy.alias`, `outer.inner.alias`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<String>);

impl Path {
    pub fn single(name: impl Into<String>) -> Self {
        Path(vec![name.into()])
    }

    pub fn parse(text: &str) -> Option<Self> {
        let parts: Vec<String> = text.split('.').map(str::to_string).collect();
        let ok = parts.iter().all(|p| {
            let mut cs = p.chars();
            cs.next().is_some_and(|c| c.is_ascii_alphabetic())
                && cs.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        });
        ok.then_some(Path(parts))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskEntry {
    pub path: Path,
    pub coef: f64,
}

/// `{alias:coef, ...}`; a bare `alias` entry has coefficient 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaskLit(pub Vec<MaskEntry>);

/// Argument of `#updateweights`.
#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Path(Path),
    Mask(MaskLit),
    /// Schematic `<...>` hole; parses but never loads.
    Placeholder(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortDir {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortSpec {
    pub dir: PortDir,
    pub kind: String,
    pub name: String,
}

/// `port:alias` inside a `#neuron` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub port: String,
    pub alias: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstLit {
    Number(f64),
    Mask(MaskLit),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Neuron(Path),
    Ellipsis,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Kind {
        name: String,
    },
    CellType {
        name: String,
        ports: Vec<PortSpec>,
        builtin: Option<String>,
        alpha: Option<f64>,
    },
    Neuron {
        cell_type: String,
        name: String,
        outputs: Vec<Binding>,
        inputs: Vec<Binding>,
        constant: Option<ConstLit>,
    },
    /// `#updateweights in += [coef *] out;`
    Update {
        target: Operand,
        coef: f64,
        source: Operand,
    },
    /// `#updateweights {rows} += {columns} * {rows};`
    GenericUpdate {
        gamma: Operand,
        alpha: Operand,
        beta: Operand,
    },
    Subgraph {
        name: String,
        members: Vec<Member>,
    },
    NewCopy {
        name: String,
        source: Path,
        variant: Option<u8>,
        alpha: Option<f64>,
    },
    Silent {
        target: Path,
        silent: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Statement {
    pub stmt: Stmt,
    pub span: Span,
}

impl PartialEq for Statement {
    /// Positions are ignored so a reprinted program compares equal.
    fn eq(&self, other: &Self) -> bool {
        self.stmt == other.stmt
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
    /// Non-fatal findings from parsing, such as a missing `;`.
    pub warnings: Vec<Diagnostic>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

fn fmt_num(n: f64) -> String {
    format!("{n}")
}

impl fmt::Display for MaskLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", e.path, fmt_num(e.coef))?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Path(p) => write!(f, "{p}"),
            Operand::Mask(m) => write!(f, "{m}"),
            Operand::Placeholder(p) => write!(f, "<{p}>"),
        }
    }
}

fn write_bindings(f: &mut fmt::Formatter<'_>, bindings: &[Binding]) -> fmt::Result {
    if bindings.is_empty() {
        return f.write_str(" #dummy");
    }
    for b in bindings {
        write!(f, " {}:{}", b.port, b.alias)?;
    }
    Ok(())
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Kind { name } => write!(f, "#kind {name};"),
            Stmt::CellType { name, ports, builtin, alpha } => {
                write!(f, "#newcelltype {name}")?;
                for p in ports {
                    let dir = match p.dir {
                        PortDir::Input => "#input",
                        PortDir::Output => "#output",
                    };
                    write!(f, " {dir} {}:{}", p.kind, p.name)?;
                }
                if let Some(b) = builtin {
                    write!(f, " #builtin {b}")?;
                }
                if let Some(a) = alpha {
                    write!(f, " #alpha {}", fmt_num(*a))?;
                }
                f.write_str(";")
            }
            Stmt::Neuron { cell_type, name, outputs, inputs, constant } => {
                write!(f, "#neuron {cell_type}:{name}")?;
                write_bindings(f, outputs)?;
                f.write_str(" = #transformof")?;
                write_bindings(f, inputs)?;
                match constant {
                    Some(ConstLit::Number(n)) => write!(f, " #const {}", fmt_num(*n))?,
                    Some(ConstLit::Mask(m)) => write!(f, " #const {m}")?,
                    None => {}
                }
                f.write_str(";")
            }
            Stmt::Update { target, coef, source } => {
                if *coef == 1.0 {
                    write!(f, "#updateweights {target} += {source};")
                } else {
                    write!(f, "#updateweights {target} += {} * {source};", fmt_num(*coef))
                }
            }
            Stmt::GenericUpdate { gamma, alpha, beta } => {
                write!(f, "#updateweights {gamma} += {alpha} * {beta};")
            }
            Stmt::Subgraph { name, members } => {
                write!(f, "#subgraph {name} = #cells")?;
                for m in members {
                    match m {
                        Member::Neuron(p) => write!(f, " {p}")?,
                        Member::Ellipsis => f.write_str(" ...")?,
                    }
                }
                f.write_str(";")
            }
            Stmt::NewCopy { name, source, variant, alpha } => {
                write!(f, "#new-copy {name} = #deepcopyof {source}")?;
                if let Some(v) = variant {
                    write!(f, " #variant {v}")?;
                }
                if let Some(a) = alpha {
                    write!(f, " #alpha {}", fmt_num(*a))?;
                }
                f.write_str(";")
            }
            Stmt::Silent { target, silent } => {
                let kw = if *silent { "#silent" } else { "#active" };
                write!(f, "{kw} {target};")
            }
        }
    }
}

impl fmt::Display for Program {
    /// One statement per line; comments and layout are not preserved.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.stmt)?;
        }
        Ok(())
    }
}
