#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;

use dmm_core::dsl::{load, parse, Network};
use dmm_core::engine::{Engine, Halt, Outcome};
use dmm_core::transforms::Registry;

pub fn program_text(name: &str) -> String {
    let path = format!("{}/programs/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn load_text(src: &str) -> Network {
    let program = parse(src).unwrap_or_else(|e| panic!("parse failed:\n{e}"));
    load(&program, &Registry::standard()).unwrap_or_else(|e| panic!("load failed:\n{e}"))
}

pub fn load_program(name: &str) -> Network {
    load_text(&program_text(name))
}

pub fn engine(net: &Network) -> Engine {
    net.engine(Arc::new(Registry::standard())).expect("engine")
}

pub fn engine_fed(net: &Network, feeds: &[(&str, &str)]) -> Engine {
    let mut e = engine(net);
    for (name, text) in feeds {
        let (n, b) = net.feed(name, text, 1).expect("feed");
        e.bind(n, b);
    }
    e
}

/// Runs the detector on `text` and returns its halt record.
pub fn run_detector(net: &Network, text: &str) -> Halt {
    let mut e = engine_fed(net, &[("input-data", text)]);
    match e.run(10 * (text.chars().count() as u64 + 10)).expect("run").outcome {
        Outcome::Halted(h) => h,
        Outcome::Timeout { tick } => panic!("detector timed out at tick {tick} on {text:?}"),
    }
}

pub fn has_duplicate(text: &str) -> bool {
    let mut seen = std::collections::HashSet::new();
    text.chars().any(|c| !seen.insert(c))
}

/// Code fragments of the language as they appear in its original
/// description, one per entry.
pub fn corpus() -> Vec<String> {
    let text = std::fs::read_to_string(format!("{}/tests/fixtures/corpus.txt", env!("CARGO_MANIFEST_DIR")))
        .expect("corpus fixture");
    text.split("\n----\n").map(str::to_string).collect()
}

use dmm_core::matrix::NetworkMatrix;
use dmm_core::signature::{InPort, NeuronId, NeuronType, OutPort, PortDecl, Signature, TypeId};
use dmm_core::streams::Family;

/// A signature with two plain neuron types and a supply of instances, for
/// matrix-level tests. `pair` has two real inputs and two real outputs;
/// `mixed` has a real and a c-vector input and a c-vector and a real output.
pub struct Pool {
    pub sig: Signature,
    pub types: Vec<TypeId>,
    pub neurons: Vec<NeuronId>,
    pub ins: Vec<InPort>,
    pub outs: Vec<OutPort>,
}

pub fn pool(per_type: u64) -> Pool {
    let mut sig = Signature::new();
    let real = sig.declare_kind("real", Family::Scalar).unwrap();
    let cvec = sig.declare_kind("c-vector", Family::CVector).unwrap();
    let port = |name: &str, kind| PortDecl { name: name.into(), kind };
    let pair = sig
        .declare_type(NeuronType {
            name: "pair".into(),
            inputs: vec![port("x", real), port("y", real)],
            outputs: vec![port("u", real), port("v", real)],
            transform: "identity".into(),
            alpha: None,
        })
        .unwrap();
    let mixed = sig
        .declare_type(NeuronType {
            name: "mixed".into(),
            inputs: vec![port("p", real), port("q", cvec)],
            outputs: vec![port("r", cvec), port("s", real)],
            transform: "identity".into(),
            alpha: None,
        })
        .unwrap();
    let types = vec![pair, mixed];
    let mut neurons = Vec::new();
    let (mut ins, mut outs) = (Vec::new(), Vec::new());
    for &ty in &types {
        for index in 0..per_type {
            let n = NeuronId::new(ty, index);
            neurons.push(n);
            ins.extend(sig.inputs_of(n));
            outs.extend(sig.outputs_of(n));
        }
    }
    Pool { sig, types, neurons, ins, outs }
}

impl Pool {
    /// Matrix from `(input index, output index, weight)` triples; pairs with
    /// different kinds are skipped.
    pub fn matrix(&self, entries: &[(usize, usize, f64)]) -> NetworkMatrix {
        let mut m = NetworkMatrix::new();
        for &(i, o, w) in entries {
            let (i, o) = (self.ins[i % self.ins.len()], self.outs[o % self.outs.len()]);
            if i.kind == o.kind {
                m.add_weight(i, o, w).unwrap();
            }
        }
        m
    }

    /// Same, restricted to neurons with index below `limit`.
    pub fn matrix_within(&self, entries: &[(usize, usize, f64)], limit: u64) -> NetworkMatrix {
        let ins: Vec<InPort> = self.ins.iter().copied().filter(|p| p.neuron.index < limit).collect();
        let outs: Vec<OutPort> = self.outs.iter().copied().filter(|p| p.neuron.index < limit).collect();
        let mut m = NetworkMatrix::new();
        for &(i, o, w) in entries {
            let (i, o) = (ins[i % ins.len()], outs[o % outs.len()]);
            if i.kind == o.kind {
                m.add_weight(i, o, w).unwrap();
            }
        }
        m
    }
}
