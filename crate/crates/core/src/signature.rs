//! Kinds, neuron types, neuron instances and ports.
//!
//! A [`Signature`] fixes which stream kinds and neuron types exist. Every type
//! conceptually has countably many instances, addressed by a natural-number
//! index; ports are addressed by (instance, slot). Ports carry their kind so
//! matrix operations can check kind compatibility without a signature.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::streams::{Family, StreamKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KindId(pub(crate) u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub(crate) u32);

/// A neuron instance: a type together with an index into its countable supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeuronId {
    pub ty: TypeId,
    pub index: u64,
}

impl NeuronId {
    pub fn new(ty: TypeId, index: u64) -> NeuronId {
        NeuronId { ty, index }
    }
}

/// An input port. Rows of the network matrix are indexed by input ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InPort {
    pub neuron: NeuronId,
    pub slot: u16,
    pub kind: KindId,
}

/// An output port. Columns of the network matrix are indexed by output ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutPort {
    pub neuron: NeuronId,
    pub slot: u16,
    pub kind: KindId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Input,
    Output,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Input => "input",
            Direction::Output => "output",
        })
    }
}

/// Either kind of port, for diagnostics and traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortRef {
    In(InPort),
    Out(OutPort),
}

impl PortRef {
    pub fn neuron(self) -> NeuronId {
        match self {
            PortRef::In(p) => p.neuron,
            PortRef::Out(p) => p.neuron,
        }
    }

    pub fn kind(self) -> KindId {
        match self {
            PortRef::In(p) => p.kind,
            PortRef::Out(p) => p.kind,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            PortRef::In(_) => Direction::Input,
            PortRef::Out(_) => Direction::Output,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortDecl {
    pub name: String,
    pub kind: KindId,
}

/// A named transform signature with typed, named ports.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronType {
    pub name: String,
    pub inputs: Vec<PortDecl>,
    pub outputs: Vec<PortDecl>,
    /// Identifier of the built-in transform in the registry.
    pub transform: String,
    /// Blend factor for the `deep-copy-v4` transform.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignatureError {
    #[error("kind `{0}` is already declared")]
    DuplicateKind(String),
    #[error("neuron type `{0}` is already declared")]
    DuplicateType(String),
    #[error("port `{port}` appears twice on neuron type `{ty}`")]
    DuplicatePort { ty: String, port: String },
    #[error("unknown kind id")]
    UnknownKind,
}

pub const SELF_TYPE_NAME: &str = "self-matrix";
pub const MATRIX_KIND_NAME: &str = "matrix";

/// The set of stream kinds and neuron types a network is built over.
///
/// Every signature starts with the `matrix` kind and the `self-matrix` type,
/// whose instance 0 is the distinguished `Self` neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    kinds: Vec<StreamKind>,
    types: Vec<NeuronType>,
    kind_names: HashMap<String, KindId>,
    type_names: HashMap<String, TypeId>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    pub fn new() -> Signature {
        let mut sig = Signature {
            kinds: Vec::new(),
            types: Vec::new(),
            kind_names: HashMap::new(),
            type_names: HashMap::new(),
        };
        let m = sig
            .declare_kind(MATRIX_KIND_NAME, Family::Matrix)
            .expect("fresh signature");
        sig.declare_type(NeuronType {
            name: SELF_TYPE_NAME.to_string(),
            inputs: vec![PortDecl {
                name: "delta-sum".into(),
                kind: m,
            }],
            outputs: vec![PortDecl {
                name: "current-matrix".into(),
                kind: m,
            }],
            transform: "identity".into(),
            alpha: None,
        })
        .expect("fresh signature");
        sig
    }

    pub fn declare_kind(&mut self, name: &str, family: Family) -> Result<KindId, SignatureError> {
        if self.kind_names.contains_key(name) {
            return Err(SignatureError::DuplicateKind(name.to_string()));
        }
        let id = KindId(self.kinds.len() as u16);
        self.kinds.push(StreamKind {
            name: name.to_string(),
            family,
        });
        self.kind_names.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn declare_type(&mut self, ty: NeuronType) -> Result<TypeId, SignatureError> {
        if self.type_names.contains_key(&ty.name) {
            return Err(SignatureError::DuplicateType(ty.name));
        }
        let mut seen = std::collections::HashSet::new();
        for p in ty.inputs.iter().chain(&ty.outputs) {
            if !seen.insert(p.name.as_str()) {
                return Err(SignatureError::DuplicatePort {
                    ty: ty.name.clone(),
                    port: p.name.clone(),
                });
            }
            if p.kind.0 as usize >= self.kinds.len() {
                return Err(SignatureError::UnknownKind);
            }
        }
        let id = TypeId(self.types.len() as u32);
        self.type_names.insert(ty.name.clone(), id);
        self.types.push(ty);
        Ok(id)
    }

    pub fn kind(&self, id: KindId) -> &StreamKind {
        &self.kinds[id.0 as usize]
    }

    pub fn family(&self, id: KindId) -> Family {
        self.kind(id).family
    }

    pub fn kind_by_name(&self, name: &str) -> Option<KindId> {
        self.kind_names.get(name).copied()
    }

    pub fn kinds(&self) -> impl Iterator<Item = (KindId, &StreamKind)> {
        self.kinds
            .iter()
            .enumerate()
            .map(|(i, k)| (KindId(i as u16), k))
    }

    pub fn neuron_type(&self, id: TypeId) -> &NeuronType {
        &self.types[id.0 as usize]
    }

    pub fn type_by_name(&self, name: &str) -> Option<TypeId> {
        self.type_names.get(name).copied()
    }

    pub fn types(&self) -> impl Iterator<Item = (TypeId, &NeuronType)> {
        self.types
            .iter()
            .enumerate()
            .map(|(i, t)| (TypeId(i as u32), t))
    }

    pub fn self_type(&self) -> TypeId {
        TypeId(0)
    }

    /// The `Self` neuron.
    pub fn self_neuron(&self) -> NeuronId {
        NeuronId::new(self.self_type(), 0)
    }

    pub fn self_input(&self) -> InPort {
        self.in_port(self.self_neuron(), 0)
    }

    pub fn self_output(&self) -> OutPort {
        self.out_port(self.self_neuron(), 0)
    }

    pub fn matrix_kind(&self) -> KindId {
        KindId(0)
    }

    /// Input port `slot` of `neuron`. Panics if the slot does not exist.
    pub fn in_port(&self, neuron: NeuronId, slot: usize) -> InPort {
        let decl = &self.neuron_type(neuron.ty).inputs[slot];
        InPort {
            neuron,
            slot: slot as u16,
            kind: decl.kind,
        }
    }

    /// Output port `slot` of `neuron`. Panics if the slot does not exist.
    pub fn out_port(&self, neuron: NeuronId, slot: usize) -> OutPort {
        let decl = &self.neuron_type(neuron.ty).outputs[slot];
        OutPort {
            neuron,
            slot: slot as u16,
            kind: decl.kind,
        }
    }

    pub fn input_named(&self, neuron: NeuronId, name: &str) -> Option<InPort> {
        let ty = self.neuron_type(neuron.ty);
        let slot = ty.inputs.iter().position(|p| p.name == name)?;
        Some(self.in_port(neuron, slot))
    }

    pub fn output_named(&self, neuron: NeuronId, name: &str) -> Option<OutPort> {
        let ty = self.neuron_type(neuron.ty);
        let slot = ty.outputs.iter().position(|p| p.name == name)?;
        Some(self.out_port(neuron, slot))
    }

    pub fn inputs_of(&self, neuron: NeuronId) -> impl Iterator<Item = InPort> + '_ {
        (0..self.neuron_type(neuron.ty).inputs.len()).map(move |s| self.in_port(neuron, s))
    }

    pub fn outputs_of(&self, neuron: NeuronId) -> impl Iterator<Item = OutPort> + '_ {
        (0..self.neuron_type(neuron.ty).outputs.len()).map(move |s| self.out_port(neuron, s))
    }

    pub fn in_port_name(&self, port: InPort) -> &str {
        &self.neuron_type(port.neuron.ty).inputs[port.slot as usize].name
    }

    pub fn out_port_name(&self, port: OutPort) -> &str {
        &self.neuron_type(port.neuron.ty).outputs[port.slot as usize].name
    }

    /// `type#index`
    pub fn neuron_label(&self, neuron: NeuronId) -> String {
        format!("{}#{}", self.neuron_type(neuron.ty).name, neuron.index)
    }

    /// `type#index.port`
    pub fn in_label(&self, port: InPort) -> String {
        format!("{}.{}", self.neuron_label(port.neuron), self.in_port_name(port))
    }

    pub fn out_label(&self, port: OutPort) -> String {
        format!("{}.{}", self.neuron_label(port.neuron), self.out_port_name(port))
    }

    pub fn port_label(&self, port: PortRef) -> String {
        match port {
            PortRef::In(p) => self.in_label(p),
            PortRef::Out(p) => self.out_label(p),
        }
    }

    /// Parses `type#index`.
    pub fn parse_neuron_label(&self, text: &str) -> Option<NeuronId> {
        let (ty, index) = text.rsplit_once('#')?;
        let ty = self.type_by_name(ty)?;
        let index = index.parse().ok()?;
        Some(NeuronId::new(ty, index))
    }

    /// Parses `type#index.port` as a port of the given direction.
    pub fn parse_port_label(&self, text: &str, dir: Direction) -> Option<PortRef> {
        let hash = text.rfind('#')?;
        let dot = hash + text[hash..].find('.')?;
        let neuron = self.parse_neuron_label(&text[..dot])?;
        let port = &text[dot + 1..];
        match dir {
            Direction::Input => self.input_named(neuron, port).map(PortRef::In),
            Direction::Output => self.output_named(neuron, port).map(PortRef::Out),
        }
    }
}
