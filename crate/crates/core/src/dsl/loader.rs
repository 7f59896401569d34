use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ast::{self, ConstLit, MaskLit, Member, Operand, Path, PortDir, Program, Stmt};
use super::{Diagnostic, DslError, Span};
use crate::engine::{Engine, EngineError};
use crate::matrix::{ColumnMask, MatrixError, NetworkMatrix, RowMask};
use crate::reflection::{deep_copy, update_weights_generic, CopyVariant, SubgraphSpec};
use crate::signature::{Direction, InPort, NeuronId, NeuronType, OutPort, PortDecl, PortRef, Signature};
use crate::streams::Family;
use crate::transforms::{Binding, Registry};

const SELF_NAME: &str = "Self";

/// A named group of neurons. Copies also record the original -> image map
/// and the group they were copied from, which makes them namespaces.
#[derive(Debug, Clone)]
struct Group {
    members: BTreeSet<NeuronId>,
    copy: Option<CopyInfo>,
}

#[derive(Debug, Clone)]
struct CopyInfo {
    source: String,
    images: BTreeMap<NeuronId, NeuronId>,
}

/// A loaded program: the signature, the initial matrix and everything needed
/// to resolve names and start an engine.
#[derive(Debug, Clone)]
pub struct Network {
    sig: Arc<Signature>,
    matrix: NetworkMatrix,
    silent: BTreeSet<NeuronId>,
    /// Top-level neuron names.
    names: BTreeMap<String, NeuronId>,
    /// Declared neurons and copy images, in creation order.
    user_neurons: Vec<NeuronId>,
    /// Display names, qualified by namespace for images.
    labels: BTreeMap<NeuronId, String>,
    constants: BTreeMap<NeuronId, Binding>,
    aliases: BTreeMap<String, Vec<PortRef>>,
    groups: BTreeMap<String, Group>,
    warnings: Vec<Diagnostic>,
}

impl Network {
    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    /// Initial matrix, including the `Self` loop.
    pub fn matrix(&self) -> &NetworkMatrix {
        &self.matrix
    }

    pub fn silent(&self) -> &BTreeSet<NeuronId> {
        &self.silent
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn user_neurons(&self) -> &[NeuronId] {
        &self.user_neurons
    }

    /// Nonzero weights other than the `Self` loop.
    pub fn user_weight_count(&self) -> usize {
        let (si, so) = (self.sig.self_input(), self.sig.self_output());
        self.matrix.iter().filter(|&(i, o, _)| (i, o) != (si, so)).count()
    }

    pub fn label(&self, neuron: NeuronId) -> String {
        self.labels.get(&neuron).cloned().unwrap_or_else(|| self.sig.neuron_label(neuron))
    }

    /// Neuron by (possibly namespaced) name, e.g. `accumulator` or `d2.accumulator`.
    pub fn neuron(&self, name: &str) -> Option<NeuronId> {
        let path = Path::parse(name)?;
        self.resolve_neuron(&path).ok()
    }

    /// Port by alias, `neuron.port`, or a namespaced form of either.
    pub fn port(&self, name: &str, dir: Direction) -> Result<PortRef, String> {
        let path = Path::parse(name).ok_or_else(|| format!("`{name}` is not a valid name"))?;
        self.resolve_port(&path, dir)
    }

    /// Members of a subgraph or copy.
    pub fn subgraph(&self, name: &str) -> Option<&BTreeSet<NeuronId>> {
        self.groups.get(name).map(|g| &g.members)
    }

    /// Original -> image map of a copy.
    pub fn copy_images(&self, name: &str) -> Option<&BTreeMap<NeuronId, NeuronId>> {
        self.groups.get(name)?.copy.as_ref().map(|c| &c.images)
    }

    /// Interprets `text` as data for the emitter neuron `name`: characters
    /// for string emitters, a number for real emitters, a `{alias:coef}`
    /// mask for row and column emitters.
    pub fn feed(&self, name: &str, text: &str, rate: u32) -> Result<(NeuronId, Binding), String> {
        let n = self.neuron(name).ok_or_else(|| format!("unknown neuron `{name}`"))?;
        let transform = self.sig.neuron_type(n.ty).transform.as_str();
        let binding = match transform {
            "input-string" => Binding::text(text, rate),
            "input-real" => {
                let x: f64 = text
                    .trim()
                    .parse()
                    .map_err(|_| format!("`{text}` is not a number (feeding `{name}`)"))?;
                if !x.is_finite() {
                    return Err(format!("`{text}` is not finite (feeding `{name}`)"));
                }
                Binding::Real(x)
            }
            "input-row" | "input-column" => {
                let program = super::parse(&format!("#updateweights {text} += x;"))
                    .map_err(|e| format!("malformed mask `{text}`: {e}"))?;
                let mask = match &program.statements[0].stmt {
                    Stmt::Update { target: Operand::Mask(m), .. } => m.clone(),
                    _ => return Err(format!("`{text}` is not a `{{alias:coef}}` mask")),
                };
                self.mask_binding(transform, &mask)?
            }
            other => return Err(format!("`{name}` runs `{other}`, which takes no input data")),
        };
        Ok((n, binding))
    }

    /// Engine positioned before tick 1 with names, reserved neurons,
    /// `#const` bindings and silent sets applied.
    pub fn engine(&self, registry: Arc<Registry>) -> Result<Engine, EngineError> {
        let mut engine = Engine::new(self.sig.clone(), registry, self.matrix.clone())?;
        for (&n, label) in &self.labels {
            engine.name_neuron(n, label.clone());
        }
        engine.reserve(self.user_neurons.iter().copied());
        for (&n, b) in &self.constants {
            engine.bind(n, b.clone());
        }
        engine.set_silent(&self.silent, true)?;
        Ok(engine)
    }

    fn copy_group(&self, name: &str) -> Option<&CopyInfo> {
        self.groups.get(name)?.copy.as_ref()
    }

    /// Image of `n` in copy `ns`, looking through the copies `ns` was made
    /// from when `n` belongs to an earlier generation.
    fn image(&self, ns: &str, n: NeuronId) -> Option<NeuronId> {
        let info = self.copy_group(ns)?;
        if let Some(&img) = info.images.get(&n) {
            return Some(img);
        }
        if self.copy_group(&info.source).is_some() {
            let inner = self.image(&info.source, n)?;
            return info.images.get(&inner).copied();
        }
        None
    }

    fn resolve_neuron(&self, path: &Path) -> Result<NeuronId, String> {
        let parts = &path.0;
        if parts.len() == 1 {
            if parts[0] == SELF_NAME {
                return Ok(self.sig.self_neuron());
            }
            return self
                .names
                .get(&parts[0])
                .copied()
                .ok_or_else(|| format!("unknown neuron `{}`", parts[0]));
        }
        let ns = &parts[0];
        if self.copy_group(ns).is_none() {
            return Err(format!("`{ns}` is not a copy, so `{path}` does not name a neuron"));
        }
        let inner = self.resolve_neuron(&Path(parts[1..].to_vec()))?;
        self.image(ns, inner)
            .ok_or_else(|| format!("`{}` is not part of what `{ns}` copied", Path(parts[1..].to_vec())))
    }

    fn resolve_port(&self, path: &Path, dir: Direction) -> Result<PortRef, String> {
        let parts = &path.0;
        if parts.len() == 1 {
            return self.resolve_alias(&parts[0], dir);
        }
        let head = &parts[0];
        if self.copy_group(head).is_some() {
            let rest = Path(parts[1..].to_vec());
            let inner = self.resolve_port(&rest, dir)?;
            let img = self
                .image(head, inner.neuron())
                .ok_or_else(|| format!("`{rest}` is not part of what `{head}` copied"))?;
            return Ok(match inner {
                PortRef::In(p) => PortRef::In(InPort { neuron: img, ..p }),
                PortRef::Out(p) => PortRef::Out(OutPort { neuron: img, ..p }),
            });
        }
        if parts.len() == 2 {
            let n = self.resolve_neuron(&Path(vec![head.clone()]))?;
            let port = &parts[1];
            let found = match dir {
                Direction::Input => self.sig.input_named(n, port).map(PortRef::In),
                Direction::Output => self.sig.output_named(n, port).map(PortRef::Out),
            };
            return found.ok_or_else(|| format!("neuron `{head}` has no {dir} port `{port}`"));
        }
        Err(format!("`{head}` is not a copy, so `{path}` does not name a port"))
    }

    fn resolve_alias(&self, alias: &str, dir: Direction) -> Result<PortRef, String> {
        let all = self.aliases.get(alias).map(Vec::as_slice).unwrap_or(&[]);
        let candidates: Vec<PortRef> = all.iter().copied().filter(|p| p.direction() == dir).collect();
        match candidates.as_slice() {
            [p] => Ok(*p),
            [] if all.is_empty() => Err(format!("alias `{alias}` is never declared")),
            [] => Err(format!("alias `{alias}` does not name an {dir} port")),
            _ => Err(format!("alias `{alias}` is ambiguous: it names {} {dir} ports", candidates.len())),
        }
    }

    fn row_mask(&self, mask: &MaskLit) -> Result<RowMask, String> {
        let mut entries = Vec::new();
        for e in &mask.0 {
            match self.resolve_port(&e.path, Direction::Input)? {
                PortRef::In(p) => entries.push((p, e.coef)),
                PortRef::Out(_) => unreachable!("input lookup returned an output port"),
            }
        }
        RowMask::from_entries(entries).map_err(|e| e.to_string())
    }

    fn column_mask(&self, mask: &MaskLit) -> Result<ColumnMask, String> {
        let mut entries = Vec::new();
        for e in &mask.0 {
            match self.resolve_port(&e.path, Direction::Output)? {
                PortRef::Out(p) => entries.push((p, e.coef)),
                PortRef::In(_) => unreachable!("output lookup returned an input port"),
            }
        }
        ColumnMask::from_entries(entries).map_err(|e| e.to_string())
    }

    fn mask_binding(&self, transform: &str, mask: &MaskLit) -> Result<Binding, String> {
        match transform {
            "input-row" => Ok(Binding::Row(self.row_mask(mask)?)),
            "input-column" => Ok(Binding::Column(self.column_mask(mask)?)),
            other => Err(format!("a mask cannot be bound to a `{other}` neuron")),
        }
    }

    fn operand_mask(&self, op: &Operand) -> Result<MaskLit, String> {
        match op {
            Operand::Path(p) => Ok(MaskLit(vec![ast::MaskEntry { path: p.clone(), coef: 1.0 }])),
            Operand::Mask(m) => Ok(m.clone()),
            Operand::Placeholder(p) => Err(placeholder(p)),
        }
    }
}

fn placeholder(p: &str) -> String {
    format!("placeholder `<{p}>` must be replaced by a name before the program can load")
}

fn matrix_error(sig: &Signature, e: MatrixError) -> String {
    match e {
        MatrixError::KindMismatch { input, output } => format!(
            "kind mismatch: input `{}` has kind `{}` but output `{}` has kind `{}`",
            sig.in_label(input),
            sig.kind(input.kind).name,
            sig.out_label(output),
            sig.kind(output.kind).name
        ),
        other => other.to_string(),
    }
}

struct Loader<'r> {
    registry: &'r Registry,
    sig: Signature,
    net: Network,
    reserved: BTreeSet<NeuronId>,
    diagnostics: Vec<Diagnostic>,
    /// Neurons that came from a copy rather than a `#neuron` statement.
    images: BTreeSet<NeuronId>,
}

impl<'r> Loader<'r> {
    fn new(registry: &'r Registry) -> Self {
        let sig = Signature::new();
        let mut matrix = NetworkMatrix::new();
        matrix
            .add_weight(sig.self_input(), sig.self_output(), 1.0)
            .expect("the Self loop is kind-correct");
        let net = Network {
            sig: Arc::new(sig.clone()),
            matrix,
            silent: BTreeSet::new(),
            names: BTreeMap::new(),
            user_neurons: Vec::new(),
            labels: BTreeMap::new(),
            constants: BTreeMap::new(),
            aliases: BTreeMap::new(),
            groups: BTreeMap::new(),
            warnings: Vec::new(),
        };
        let mut reserved = BTreeSet::new();
        reserved.insert(sig.self_neuron());
        Loader { registry, sig, net, reserved, diagnostics: Vec::new(), images: BTreeSet::new() }
    }

    fn error(&mut self, span: Span, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::error(span, message));
    }

    fn warn(&mut self, span: Span, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::warning(span, message));
    }

    fn statement(&mut self, stmt: &Stmt, span: Span) -> Result<(), String> {
        match stmt {
            Stmt::Kind { name } => self.kind(name),
            Stmt::CellType { name, ports, builtin, alpha } => {
                self.cell_type(name, ports, builtin.as_deref(), *alpha, span)
            }
            Stmt::Neuron { cell_type, name, outputs, inputs, constant } => {
                self.neuron(cell_type, name, outputs, inputs, constant.as_ref(), span)
            }
            Stmt::Update { target, coef, source } => self.update(target, *coef, source),
            Stmt::GenericUpdate { gamma, alpha, beta } => {
                let gamma = self.net.row_mask(&self.net.operand_mask(gamma)?)?;
                let alpha = self.net.column_mask(&self.net.operand_mask(alpha)?)?;
                let beta = self.net.row_mask(&self.net.operand_mask(beta)?)?;
                self.net.matrix = update_weights_generic(&self.net.matrix, &gamma, &alpha, &beta)
                    .map_err(|e| matrix_error(&self.sig, e))?;
                Ok(())
            }
            Stmt::Subgraph { name, members } => self.subgraph(name, members, span),
            Stmt::NewCopy { name, source, variant, alpha } => self.new_copy(name, source, *variant, *alpha),
            Stmt::Silent { target, silent } => {
                let neurons = self.target_neurons(target)?;
                if neurons.contains(&self.sig.self_neuron()) {
                    return Err("`Self` cannot be silenced".into());
                }
                for n in neurons {
                    if *silent {
                        self.net.silent.insert(n);
                    } else {
                        self.net.silent.remove(&n);
                    }
                }
                Ok(())
            }
        }
    }

    fn kind(&mut self, name: &str) -> Result<(), String> {
        if self.sig.kind_by_name(name).is_some() {
            // Only the built-in `matrix` kind can already exist here.
            return Ok(());
        }
        let family = Family::for_kind_name(name).ok_or_else(|| format!("no stream implementation for kind `{name}`"))?;
        self.sig.declare_kind(name, family).map_err(|e| e.to_string())?;
        Ok(())
    }

    fn cell_type(
        &mut self,
        name: &str,
        ports: &[ast::PortSpec],
        builtin: Option<&str>,
        alpha: Option<f64>,
        span: Span,
    ) -> Result<(), String> {
        let transform = match builtin {
            Some(id) if self.registry.contains(id) => id.to_string(),
            Some(id) => return Err(format!("unknown built-in transform `{id}`")),
            None => self
                .registry
                .default_transform_for(name)
                .ok_or_else(|| format!("neuron type `{name}` has no built-in transform; name one with `#builtin`"))?
                .to_string(),
        };
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for p in ports {
            let kind = self
                .sig
                .kind_by_name(&p.kind)
                .ok_or_else(|| format!("kind `{}` is not declared", p.kind))?;
            let decl = PortDecl { name: p.name.clone(), kind };
            match p.dir {
                PortDir::Input => inputs.push(decl),
                PortDir::Output => outputs.push(decl),
            }
        }
        if let Some(a) = alpha {
            if transform != "deep-copy-v4" {
                self.warn(span, format!("`#alpha` has no effect on `{transform}` neurons"));
            } else if !(0.0..=1.0).contains(&a) {
                return Err(format!("alpha {a} is outside [0, 1]"));
            }
        }
        let ty = NeuronType { name: name.to_string(), inputs, outputs, transform: transform.clone(), alpha };
        let t = self.registry.get(&transform).expect("transform id checked above");
        t.check(&self.sig, &ty).map_err(|m| format!("neuron type `{name}` does not fit `{transform}`: {m}"))?;
        self.sig.declare_type(ty).map_err(|e| e.to_string())?;
        Ok(())
    }

    fn next_index(&self, ty: crate::signature::TypeId) -> NeuronId {
        (0..)
            .map(|i| NeuronId::new(ty, i))
            .find(|n| !self.reserved.contains(n))
            .expect("countable supply")
    }

    fn neuron(
        &mut self,
        cell_type: &str,
        name: &str,
        outputs: &[ast::Binding],
        inputs: &[ast::Binding],
        constant: Option<&ConstLit>,
        span: Span,
    ) -> Result<(), String> {
        let ty = self.sig.type_by_name(cell_type).ok_or_else(|| format!("unknown neuron type `{cell_type}`"))?;
        if ty == self.sig.self_type() || name == SELF_NAME {
            return Err("`Self` is built in and cannot be declared".into());
        }
        let n = self.next_index(ty);
        let decl = self.sig.neuron_type(ty).clone();
        let outs = self.bind_ports(&decl, n, outputs, Direction::Output, span)?;
        let ins = self.bind_ports(&decl, n, inputs, Direction::Input, span)?;

        let binding = match constant {
            None => None,
            Some(ConstLit::Number(x)) if decl.transform == "input-real" => Some(Binding::Real(*x)),
            Some(ConstLit::Mask(m)) if matches!(decl.transform.as_str(), "input-row" | "input-column") => {
                Some(self.net.mask_binding(&decl.transform, m)?)
            }
            Some(_) => {
                return Err(format!("`#const` does not fit a `{}` neuron", decl.transform));
            }
        };

        self.reserved.insert(n);
        self.net.user_neurons.push(n);
        self.net.names.insert(name.to_string(), n);
        self.net.labels.insert(n, name.to_string());
        if let Some(b) = binding {
            self.net.constants.insert(n, b);
        }
        for (alias, port) in outs.into_iter().chain(ins) {
            let entry = self.net.aliases.entry(alias.clone()).or_default();
            if !entry.is_empty() {
                self.diagnostics.push(Diagnostic::warning(
                    span,
                    format!("alias `{alias}` is bound more than once; referring to it is ambiguous"),
                ));
            }
            entry.push(port);
        }
        Ok(())
    }

    /// Matches `port:alias` bindings to the type's ports. A port name the
    /// type lacks falls back to the port in the same position, if that port
    /// is not bound by name elsewhere in the statement.
    fn bind_ports(
        &mut self,
        decl: &NeuronType,
        n: NeuronId,
        bindings: &[ast::Binding],
        dir: Direction,
        span: Span,
    ) -> Result<Vec<(String, PortRef)>, String> {
        let ports = match dir {
            Direction::Input => &decl.inputs,
            Direction::Output => &decl.outputs,
        };
        let slot_of = |name: &str| ports.iter().position(|p| p.name == name);
        let named: BTreeSet<usize> = bindings.iter().filter_map(|b| slot_of(&b.port)).collect();
        let mut used = BTreeSet::new();
        let mut out = Vec::new();
        for (pos, b) in bindings.iter().enumerate() {
            let slot = match slot_of(&b.port) {
                Some(s) => s,
                None if pos < ports.len() && !named.contains(&pos) => {
                    self.warn(
                        span,
                        format!(
                            "neuron type `{}` has no {dir} port `{}`; binding `{}` to `{}` by position",
                            decl.name, b.port, b.alias, ports[pos].name
                        ),
                    );
                    pos
                }
                None => return Err(format!("neuron type `{}` has no {dir} port `{}`", decl.name, b.port)),
            };
            if !used.insert(slot) {
                return Err(format!("{dir} port `{}` is bound twice", ports[slot].name));
            }
            let port = match dir {
                Direction::Input => PortRef::In(self.sig.in_port(n, slot)),
                Direction::Output => PortRef::Out(self.sig.out_port(n, slot)),
            };
            out.push((b.alias.clone(), port));
        }
        Ok(out)
    }

    fn update(&mut self, target: &Operand, coef: f64, source: &Operand) -> Result<(), String> {
        let path = |op: &Operand| match op {
            Operand::Path(p) => Ok(p.clone()),
            Operand::Placeholder(p) => Err(placeholder(p)),
            Operand::Mask(_) => Err("a mask needs the `{rows} += {columns} * {rows}` form".to_string()),
        };
        let (tp, sp) = (path(target)?, path(source)?);
        let input = match self.net.resolve_port(&tp, Direction::Input)? {
            PortRef::In(p) => p,
            PortRef::Out(_) => unreachable!(),
        };
        let output = match self.net.resolve_port(&sp, Direction::Output)? {
            PortRef::Out(p) => p,
            PortRef::In(_) => unreachable!(),
        };
        self.net.matrix.add_weight(input, output, coef).map_err(|e| matrix_error(&self.sig, e))
    }

    fn target_neurons(&self, path: &Path) -> Result<BTreeSet<NeuronId>, String> {
        if path.0.len() == 1 {
            if let Some(g) = self.net.groups.get(&path.0[0]) {
                return Ok(g.members.clone());
            }
        }
        Ok(BTreeSet::from([self.net.resolve_neuron(path)?]))
    }

    fn subgraph(&mut self, name: &str, members: &[Member], span: Span) -> Result<(), String> {
        let mut set = BTreeSet::new();
        for m in members {
            match m {
                Member::Neuron(p) => {
                    let n = self.net.resolve_neuron(p).map_err(|e| format!("subgraph `{name}`: {e}"))?;
                    if n == self.sig.self_neuron() {
                        return Err(format!("subgraph `{name}` cannot contain `Self`"));
                    }
                    set.insert(n);
                }
                Member::Ellipsis => {
                    return Err(format!("subgraph `{name}`: `...` must be replaced by neuron names"));
                }
            }
        }
        if set.is_empty() {
            return Err(format!("subgraph `{name}` has no members"));
        }
        let from_copies = set.iter().filter(|n| self.images.contains(n)).count();
        if from_copies > 0 && from_copies < set.len() {
            self.warn(span, format!("subgraph `{name}` mixes declared neurons with neurons created by copies"));
        }
        self.net.groups.insert(name.to_string(), Group { members: set, copy: None });
        Ok(())
    }

    fn new_copy(&mut self, name: &str, source: &Path, variant: Option<u8>, alpha: Option<f64>) -> Result<(), String> {
        let variant = CopyVariant::from_number(variant.unwrap_or(2), alpha).map_err(|e| e.to_string())?;
        if alpha.is_some() && variant.number() != 4 {
            return Err("`#alpha` only applies to `#variant 4`".into());
        }
        let [src] = source.0.as_slice() else {
            return Err(format!("`{source}` is not a subgraph name"));
        };
        let members = self
            .net
            .groups
            .get(src)
            .ok_or_else(|| format!("unknown subgraph `{src}`"))?
            .members
            .clone();
        let spec = SubgraphSpec::new(src.clone(), members.clone()).map_err(|e| e.to_string())?;
        let fresh = self.net.matrix.allocate_fresh_block(&self.net.silent, &self.reserved, &members);
        self.net.matrix =
            deep_copy(&self.net.matrix, &self.sig, &spec, &fresh, variant).map_err(|e| e.to_string())?;

        let mut relabel = Vec::new();
        for (&orig, &img) in &fresh {
            self.reserved.insert(img);
            self.images.insert(img);
            self.net.user_neurons.push(img);
            if let Some(b) = self.net.constants.get(&orig).cloned() {
                self.net.constants.insert(img, b);
            }
            relabel.push((img, format!("{name}.{}", self.net.label(orig))));
        }
        self.net.labels.extend(relabel);
        let images: BTreeSet<NeuronId> = fresh.values().copied().collect();
        self.net.groups.insert(
            name.to_string(),
            Group { members: images, copy: Some(CopyInfo { source: src.clone(), images: fresh }) },
        );
        Ok(())
    }

    fn finish(mut self) -> (Network, Vec<Diagnostic>) {
        let (si, so) = (self.sig.self_input(), self.sig.self_output());
        let w = self.net.matrix.get(si, so);
        if w != 1.0 {
            self.error(Span::default(), format!("the `Self` loop must keep weight 1, found {w}"));
        }
        self.net.sig = Arc::new(self.sig);
        (self.net, self.diagnostics)
    }
}

fn analyze(program: &Program, registry: &Registry) -> (Network, Vec<Diagnostic>) {
    let mut loader = Loader::new(registry);
    loader.diagnostics.extend(program.warnings.iter().cloned());
    for s in &program.statements {
        // Later statements see the signature built so far.
        loader.net.sig = Arc::new(loader.sig.clone());
        if let Err(message) = loader.statement(&s.stmt, s.span) {
            loader.error(s.span, message);
        }
    }
    loader.finish()
}

/// Builds the initial network described by `program`. Warnings are kept on
/// the result; any error fails the load and is returned with the warnings.
pub fn load(program: &Program, registry: &Registry) -> Result<Network, DslError> {
    let (mut net, diagnostics) = analyze(program, registry);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(DslError { diagnostics });
    }
    net.warnings = diagnostics;
    Ok(net)
}

/// Every finding of [`load`] as data, plus warnings for neurons left
/// without connections.
pub fn validate(program: &Program, registry: &Registry) -> Vec<Diagnostic> {
    let (net, mut diagnostics) = analyze(program, registry);
    let connected = net.matrix.support_neurons();
    let spans: BTreeMap<&str, Span> = program
        .statements
        .iter()
        .filter_map(|s| match &s.stmt {
            Stmt::Neuron { name, .. } => Some((name.as_str(), s.span)),
            _ => None,
        })
        .collect();
    for (name, n) in &net.names {
        if !connected.contains(n) {
            let span = spans.get(name.as_str()).copied().unwrap_or_default();
            diagnostics.push(Diagnostic::warning(span, format!("neuron `{name}` has no connections")));
        }
    }
    diagnostics.sort_by_key(|d| d.span);
    diagnostics
}
