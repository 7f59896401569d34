//! The clocked interpreter.
//!
//! Each tick runs three phases:
//!
//! 1. up movement: every active neuron computes its outputs from the inputs
//!    left by the previous tick;
//! 2. matrix refresh: the network matrix becomes the new output of `Self`;
//! 3. down movement: every input is recomputed from the new outputs through
//!    the refreshed matrix.
//!
//! A value produced by a neuron on tick `t` is consumed by its successors on
//! tick `t + 1`, so every hop through the matrix costs exactly one tick. An
//! additive contribution to `Self`'s input on tick `t` becomes part of the
//! matrix on tick `t + 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::matrix::NetworkMatrix;
use crate::signature::{InPort, NeuronId, OutPort, PortRef, Signature};
use crate::streams::{StreamError, StreamValue};
use crate::transforms::{Binding, HaltRequest, Memory, Registry, TransformCtx};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("neuron `{neuron}`: {message}")]
    Fault { neuron: String, message: String },
    #[error("neuron type `{ty}` uses unknown transform `{transform}`")]
    UnknownTransform { ty: String, transform: String },
    #[error("neuron type `{ty}` does not fit transform `{transform}`: {message}")]
    TransformSignature {
        ty: String,
        transform: String,
        message: String,
    },
    #[error("the Self neuron cannot be silenced")]
    SilenceSelf,
    #[error("the Self loop must have weight exactly 1, found {0}")]
    SelfLoop(f64),
    #[error("the network has already halted")]
    Halted,
    #[error(transparent)]
    Stream(#[from] StreamError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halt {
    pub answer: bool,
    pub tick: u64,
    /// Both answer channels fired on the halting tick.
    pub conflict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Halted(Halt),
    Timeout { tick: u64 },
}

/// One line of a trace.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Value {
        tick: u64,
        neuron: String,
        port: String,
        value: Value,
    },
    Halt { tick: u64, answer: bool },
}

impl TraceEvent {
    pub fn to_json(&self) -> Value {
        match self {
            TraceEvent::Value {
                tick,
                neuron,
                port,
                value,
            } => json!({"tick": tick, "neuron": neuron, "port": port, "value": value}),
            TraceEvent::Halt { tick, answer } => json!({"tick": tick, "answer": answer}),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceEvent>,
}

/// JSON form of a stream value as it appears in traces.
pub fn value_to_json(sig: &Signature, value: &StreamValue) -> Value {
    match value {
        StreamValue::Scalar(s) => Value::from(s.get()),
        StreamValue::CVector(v) => v.to_json(),
        StreamValue::Matrix(m) => serde_json::to_value(m.records(sig)).unwrap_or(Value::Null),
        StreamValue::Row(r) => {
            let mut map = Map::new();
            for (p, w) in r.iter() {
                map.insert(sig.in_label(*p), Value::from(w));
            }
            Value::Object(map)
        }
        StreamValue::Column(c) => {
            let mut map = Map::new();
            for (p, w) in c.iter() {
                map.insert(sig.out_label(*p), Value::from(w));
            }
            Value::Object(map)
        }
    }
}

/// State of a running network. The network matrix is not stored separately:
/// it is the current value of `Self`'s output port.
#[derive(Clone)]
pub struct Engine {
    sig: Arc<Signature>,
    registry: Arc<Registry>,
    outputs: BTreeMap<OutPort, StreamValue>,
    inputs: BTreeMap<InPort, StreamValue>,
    silent: BTreeSet<NeuronId>,
    reserved: BTreeSet<NeuronId>,
    memory: BTreeMap<NeuronId, Memory>,
    bindings: BTreeMap<NeuronId, Binding>,
    names: BTreeMap<NeuronId, String>,
    watches: Vec<PortRef>,
    executions: BTreeMap<NeuronId, u64>,
    tick: u64,
    halt: Option<Halt>,
}

impl Engine {
    /// Builds the state before tick 1 from an initial matrix. The `Self` loop
    /// is added if absent.
    pub fn new(sig: Arc<Signature>, registry: Arc<Registry>, matrix: NetworkMatrix) -> Result<Engine, EngineError> {
        for (_, ty) in sig.types() {
            let t = registry.get(&ty.transform).ok_or_else(|| EngineError::UnknownTransform {
                ty: ty.name.clone(),
                transform: ty.transform.clone(),
            })?;
            t.check(&sig, ty).map_err(|message| EngineError::TransformSignature {
                ty: ty.name.clone(),
                transform: ty.transform.clone(),
                message,
            })?;
        }
        let mut matrix = matrix;
        let (si, so) = (sig.self_input(), sig.self_output());
        match matrix.get(si, so) {
            0.0 => matrix
                .add_weight(si, so, 1.0)
                .map_err(|e| EngineError::Fault {
                    neuron: "Self".into(),
                    message: e.to_string(),
                })?,
            1.0 => {}
            w => return Err(EngineError::SelfLoop(w)),
        }
        let mut outputs = BTreeMap::new();
        outputs.insert(so, StreamValue::Matrix(matrix));
        let mut engine = Engine {
            sig,
            registry,
            outputs,
            inputs: BTreeMap::new(),
            silent: BTreeSet::new(),
            reserved: BTreeSet::new(),
            memory: BTreeMap::new(),
            bindings: BTreeMap::new(),
            names: BTreeMap::new(),
            watches: Vec::new(),
            executions: BTreeMap::new(),
            tick: 0,
            halt: None,
        };
        engine.recompute_inputs()?;
        Ok(engine)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn matrix(&self) -> &NetworkMatrix {
        self.outputs
            .get(&self.sig.self_output())
            .and_then(StreamValue::as_matrix)
            .expect("Self always holds a matrix")
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn halt(&self) -> Option<Halt> {
        self.halt
    }

    pub fn silent(&self) -> &BTreeSet<NeuronId> {
        &self.silent
    }

    pub fn active_neurons(&self) -> BTreeSet<NeuronId> {
        self.matrix().active_neurons(&self.sig, &self.silent)
    }

    /// Value most recently produced on an output port; zero if none.
    pub fn output(&self, port: OutPort) -> StreamValue {
        self.outputs
            .get(&port)
            .cloned()
            .unwrap_or_else(|| self.sig.family(port.kind).zero())
    }

    /// Value an input port will present on the next tick; zero if none.
    pub fn input(&self, port: InPort) -> StreamValue {
        self.inputs
            .get(&port)
            .cloned()
            .unwrap_or_else(|| self.sig.family(port.kind).zero())
    }

    pub fn value(&self, port: PortRef) -> StreamValue {
        match port {
            PortRef::In(p) => self.input(p),
            PortRef::Out(p) => self.output(p),
        }
    }

    /// Number of transform executions of a neuron so far.
    pub fn executions(&self, neuron: NeuronId) -> u64 {
        self.executions.get(&neuron).copied().unwrap_or(0)
    }

    pub fn total_executions(&self) -> u64 {
        self.executions.values().sum()
    }

    pub fn memory(&self, neuron: NeuronId) -> Option<&Memory> {
        self.memory.get(&neuron)
    }

    pub fn bind(&mut self, neuron: NeuronId, binding: Binding) {
        self.bindings.insert(neuron, binding);
    }

    pub fn name_neuron(&mut self, neuron: NeuronId, name: impl Into<String>) {
        self.names.insert(neuron, name.into());
    }

    /// Program-level name of a neuron, or `type#index` for unnamed ones.
    pub fn neuron_name(&self, neuron: NeuronId) -> String {
        if neuron == self.sig.self_neuron() {
            return "Self".into();
        }
        self.names
            .get(&neuron)
            .cloned()
            .unwrap_or_else(|| self.sig.neuron_label(neuron))
    }

    /// Neurons never handed out by runtime allocation.
    pub fn reserve(&mut self, neurons: impl IntoIterator<Item = NeuronId>) {
        self.reserved.extend(neurons);
    }

    pub fn reserved(&self) -> &BTreeSet<NeuronId> {
        &self.reserved
    }

    pub fn watch(&mut self, port: PortRef) {
        self.watches.push(port);
    }

    /// Silences (`flag = true`) or reactivates neurons. Silenced neurons
    /// stop running and their outputs read as zero from the next tick;
    /// reactivated neurons start from freshly initialized memory.
    pub fn set_silent(&mut self, neurons: &BTreeSet<NeuronId>, flag: bool) -> Result<(), EngineError> {
        if neurons.contains(&self.sig.self_neuron()) {
            return Err(EngineError::SilenceSelf);
        }
        let changed: Vec<NeuronId> = neurons
            .iter()
            .copied()
            .filter(|n| self.silent.contains(n) != flag)
            .collect();
        if changed.is_empty() {
            return Ok(());
        }
        for n in &changed {
            if flag {
                self.silent.insert(*n);
                self.outputs.retain(|p, _| p.neuron != *n);
            } else {
                self.silent.remove(n);
            }
            self.memory.remove(n);
        }
        self.recompute_inputs()
    }

    fn recompute_inputs(&mut self) -> Result<(), EngineError> {
        let matrix = self.matrix();
        let active = matrix.active_neurons(&self.sig, &self.silent);
        let mut inputs = matrix.down_movement(&self.sig, &self.outputs)?;
        inputs.retain(|p, _| active.contains(&p.neuron));
        self.inputs = inputs;
        Ok(())
    }

    fn fault(&self, neuron: NeuronId, message: impl Into<String>) -> EngineError {
        EngineError::Fault {
            neuron: self.neuron_name(neuron),
            message: message.into(),
        }
    }

    /// Advances one clock tick.
    pub fn tick(&mut self) -> Result<(), EngineError> {
        self.tick_with(&mut |_| {})
    }

    /// Advances one tick, reporting watched values and the halt to `sink`.
    /// On a fault the state is left as it was before the tick.
    pub fn tick_with(&mut self, sink: &mut dyn FnMut(&TraceEvent)) -> Result<(), EngineError> {
        if self.halt.is_some() {
            return Err(EngineError::Halted);
        }
        let sig = Arc::clone(&self.sig);
        let registry = Arc::clone(&self.registry);
        let active = self.active_neurons();

        let mut memory = std::mem::take(&mut self.memory);
        memory.retain(|n, _| active.contains(n));
        let mut reserved = self.reserved.clone();
        let mut halt_request: Option<HaltRequest> = None;
        let mut outputs = BTreeMap::new();

        // up movement
        for &n in &active {
            let ty = sig.neuron_type(n.ty);
            let transform = registry.get(&ty.transform).expect("checked at construction");
            let ins: Vec<StreamValue> = sig.inputs_of(n).map(|p| self.input(p)).collect();
            let mem = memory.entry(n).or_insert_with(|| transform.init_memory());
            let mut ctx = TransformCtx {
                sig: &sig,
                neuron: n,
                memory: mem,
                binding: self.bindings.get(&n),
                silent: &self.silent,
                reserved: &mut reserved,
                halt: &mut halt_request,
            };
            let outs = match transform.apply(&mut ctx, &ins) {
                Ok(o) => o,
                Err(message) => {
                    self.memory = memory;
                    return Err(self.fault(n, message));
                }
            };
            if outs.len() != ty.outputs.len() {
                self.memory = memory;
                return Err(self.fault(n, format!("produced {} outputs, expected {}", outs.len(), ty.outputs.len())));
            }
            for (slot, value) in outs.into_iter().enumerate() {
                let port = sig.out_port(n, slot);
                if value.family() != sig.family(port.kind) {
                    self.memory = memory;
                    return Err(self.fault(
                        n,
                        format!("output `{}` produced a {} value", sig.out_port_name(port), value.family()),
                    ));
                }
                outputs.insert(port, value);
            }
        }

        // matrix refresh: the new matrix is whatever Self just emitted
        let matrix = match outputs.get(&sig.self_output()).and_then(StreamValue::as_matrix) {
            Some(m) => m,
            None => {
                self.memory = memory;
                return Err(self.fault(sig.self_neuron(), "no matrix on current-matrix"));
            }
        };
        let self_loop = matrix.get(sig.self_input(), sig.self_output());
        if self_loop != 1.0 {
            self.memory = memory;
            return Err(EngineError::SelfLoop(self_loop));
        }

        // down movement
        let next_active = matrix.active_neurons(&sig, &self.silent);
        let mut inputs = match matrix.down_movement(&sig, &outputs) {
            Ok(i) => i,
            Err(e) => {
                self.memory = memory;
                return Err(e.into());
            }
        };
        inputs.retain(|p, _| next_active.contains(&p.neuron));

        for &n in &active {
            *self.executions.entry(n).or_insert(0) += 1;
        }
        self.memory = memory;
        self.reserved = reserved;
        self.outputs = outputs;
        self.inputs = inputs;
        self.tick += 1;

        for &port in &self.watches {
            let (neuron, name) = match port {
                PortRef::In(p) => (p.neuron, sig.in_port_name(p)),
                PortRef::Out(p) => (p.neuron, sig.out_port_name(p)),
            };
            sink(&TraceEvent::Value {
                tick: self.tick,
                neuron: self.neuron_name(neuron),
                port: name.to_string(),
                value: value_to_json(&sig, &self.value(port)),
            });
        }
        if let Some(req) = halt_request {
            let halt = Halt {
                answer: req.answer,
                tick: self.tick,
                conflict: req.conflict,
            };
            self.halt = Some(halt);
            sink(&TraceEvent::Halt {
                tick: halt.tick,
                answer: halt.answer,
            });
        }
        Ok(())
    }

    /// Ticks until the network halts or `max_ticks` more ticks have run.
    pub fn run_with(&mut self, max_ticks: u64, sink: &mut dyn FnMut(&TraceEvent)) -> Result<Outcome, EngineError> {
        let limit = self.tick.saturating_add(max_ticks);
        while self.halt.is_none() && self.tick < limit {
            self.tick_with(sink)?;
        }
        Ok(match self.halt {
            Some(h) => Outcome::Halted(h),
            None => Outcome::Timeout { tick: self.tick },
        })
    }

    pub fn run(&mut self, max_ticks: u64) -> Result<RunResult, EngineError> {
        let mut trace = Vec::new();
        let outcome = self.run_with(max_ticks, &mut |e| trace.push(e.clone()))?;
        Ok(RunResult { outcome, trace })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{NeuronType, PortDecl, TypeId};
    use crate::streams::{CVector, Family, Symbol};

    struct Net {
        sig: Arc<Signature>,
        id_real: TypeId,
        id_cv: TypeId,
        const_real: TypeId,
        emitter: TypeId,
    }

    fn net() -> Net {
        let mut sig = Signature::new();
        let real = sig.declare_kind("real", Family::Scalar).unwrap();
        let cv = sig.declare_kind("c-vector", Family::CVector).unwrap();
        let ident = |name: &str, kind| NeuronType {
            name: name.into(),
            inputs: vec![PortDecl { name: "in".into(), kind }],
            outputs: vec![PortDecl { name: "out".into(), kind }],
            transform: "identity".into(),
            alpha: None,
        };
        let source = |name: &str, kind, transform: &str| NeuronType {
            name: name.into(),
            inputs: vec![],
            outputs: vec![PortDecl { name: "emit".into(), kind }],
            transform: transform.into(),
            alpha: None,
        };
        let id_real = sig.declare_type(ident("id-real", real)).unwrap();
        let id_cv = sig.declare_type(ident("id-c-vector", cv)).unwrap();
        let const_real = sig.declare_type(source("input-real", real, "input-real")).unwrap();
        let emitter = sig.declare_type(source("input-string", cv, "input-string")).unwrap();
        Net {
            sig: Arc::new(sig),
            id_real,
            id_cv,
            const_real,
            emitter,
        }
    }

    fn engine(n: &Net, m: NetworkMatrix) -> Engine {
        Engine::new(Arc::clone(&n.sig), Arc::new(Registry::standard()), m).unwrap()
    }

    /// accumulator-style neuron with self-loop `alpha`, driven by constant 1
    fn looped(n: &Net, alpha: f64) -> (Engine, OutPort) {
        let acc = NeuronId::new(n.id_real, 0);
        let one = NeuronId::new(n.const_real, 0);
        let (x, y) = (n.sig.in_port(acc, 0), n.sig.out_port(acc, 0));
        let m = NetworkMatrix::from_entries([(x, y, alpha), (x, n.sig.out_port(one, 0), 1.0)]).unwrap();
        (engine(n, m), y)
    }

    fn series(e: &mut Engine, port: OutPort, ticks: usize) -> Vec<f64> {
        (0..ticks)
            .map(|_| {
                e.tick().unwrap();
                e.output(port).as_scalar().unwrap()
            })
            .collect()
    }

    #[test]
    fn accumulator_of_c_vectors() {
        let n = net();
        let acc = NeuronId::new(n.id_cv, 0);
        let src = NeuronId::new(n.emitter, 0);
        let (x, y) = (n.sig.in_port(acc, 0), n.sig.out_port(acc, 0));
        let m = NetworkMatrix::from_entries([(x, y, 1.0), (x, n.sig.out_port(src, 0), 1.0)]).unwrap();
        let mut e = engine(&n, m);
        e.bind(src, Binding::text("aaaa", 1));
        let a = Symbol::Char('a');
        let mut seen = Vec::new();
        for _ in 0..4 {
            e.tick().unwrap();
            seen.push(e.output(y));
        }
        let count = |k: f64| StreamValue::CVector(CVector::from_entries([(a, k)]).unwrap());
        // the first emission reaches the accumulator output one tick later
        assert_eq!(seen, vec![count(0.0), count(1.0), count(2.0), count(3.0)]);
    }

    #[test]
    fn leaky_and_oscillating_loops() {
        let n = net();
        // constant 1 arrives at the loop input after the first tick
        let (mut e, y) = looped(&n, 0.5);
        assert_eq!(series(&mut e, y, 4), vec![0.0, 1.0, 1.5, 1.75]);
        let (mut e, y) = looped(&n, -1.0);
        assert_eq!(series(&mut e, y, 5), vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        let (mut e, y) = looped(&n, 1.0);
        assert_eq!(series(&mut e, y, 4), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn empty_network_times_out() {
        let n = net();
        let mut e = engine(&n, NetworkMatrix::new());
        let r = e.run(5).unwrap();
        assert_eq!(r.outcome, Outcome::Timeout { tick: 5 });
        assert_eq!(e.matrix().len(), 1);
        assert_eq!(e.executions(n.sig.self_neuron()), 5);
    }

    #[test]
    fn silencing_stops_execution_and_zeroes_outputs() {
        let n = net();
        let (mut e, y) = looped(&n, 1.0);
        let acc = y.neuron;
        e.tick().unwrap();
        e.tick().unwrap();
        assert_eq!(e.output(y).as_scalar(), Some(1.0));
        let set = BTreeSet::from([acc]);
        e.set_silent(&set, true).unwrap();
        assert_eq!(e.output(y).as_scalar(), Some(0.0));
        let before = e.executions(acc);
        for _ in 0..3 {
            e.tick().unwrap();
        }
        assert_eq!(e.executions(acc), before);
        assert_eq!(e.output(y).as_scalar(), Some(0.0));
        // no-op on an already silent neuron
        e.set_silent(&set, true).unwrap();
        e.set_silent(&set, false).unwrap();
        e.tick().unwrap();
        assert_eq!(e.executions(acc), before + 1);
        assert!(matches!(
            e.set_silent(&BTreeSet::from([n.sig.self_neuron()]), true),
            Err(EngineError::SilenceSelf)
        ));
    }

    #[test]
    fn self_loop_must_be_one() {
        let n = net();
        let m = NetworkMatrix::from_entries([(n.sig.self_input(), n.sig.self_output(), 0.5)]).unwrap();
        assert!(matches!(
            Engine::new(Arc::clone(&n.sig), Arc::new(Registry::standard()), m),
            Err(EngineError::SelfLoop(w)) if w == 0.5
        ));
    }

    #[test]
    fn trace_reports_watched_ports() {
        let n = net();
        let (mut e, y) = looped(&n, 1.0);
        e.name_neuron(y.neuron, "acc");
        e.watch(PortRef::Out(y));
        let r = e.run(3).unwrap();
        let lines: Vec<String> = r.trace.iter().map(|t| t.to_json().to_string()).collect();
        assert_eq!(
            lines,
            vec![
                r#"{"tick":1,"neuron":"acc","port":"out","value":0.0}"#,
                r#"{"tick":2,"neuron":"acc","port":"out","value":1.0}"#,
                r#"{"tick":3,"neuron":"acc","port":"out","value":2.0}"#,
            ]
        );
    }
}
