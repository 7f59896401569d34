//! Built-in neuron transforms.
//!
//! A transform maps the current input values of a neuron (in port order) to
//! its output values (in port order). It may keep private per-instance
//! memory, consult an external data binding, claim fresh neurons, and ask
//! the engine to halt.

use std::collections::{BTreeMap, BTreeSet};

use crate::matrix::{ColumnMask, NetworkMatrix, RowMask};
use crate::reflection::{deep_copy_delta, update_weights_delta, CopyVariant, SubgraphSpec};
use crate::signature::{NeuronId, NeuronType, PortDecl, Signature};
use crate::streams::{cvector_dot, cvector_max_norm, CVector, Family, Scalar, StreamValue, Symbol};

/// External data attached to an emitter neuron.
#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    /// Characters emitted one per `rate` ticks, then the end-of-string marker.
    Text { symbols: Vec<Symbol>, rate: u32 },
    Real(f64),
    Row(RowMask),
    Column(ColumnMask),
}

impl Binding {
    pub fn text(text: &str, rate: u32) -> Binding {
        Binding::Text {
            symbols: text.chars().map(Symbol::Char).collect(),
            rate: rate.max(1),
        }
    }
}

/// Private per-instance state of a transform. Created when a neuron becomes
/// active and dropped when it stops being active.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Memory {
    #[default]
    Stateless,
    /// Ticks elapsed since activation.
    Emitter { step: u64 },
    Copier(CopierMemory),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CopierMemory {
    pub previous_mask: f64,
    /// Fraction of the copy already emitted, in [0, 1].
    pub applied: f64,
    /// Full additive change that realizes the current copy.
    pub target: Option<NetworkMatrix>,
}

/// Outcome a transform can report to stop the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaltRequest {
    pub answer: bool,
    /// Both answer channels fired on the same tick.
    pub conflict: bool,
}

pub struct TransformCtx<'a> {
    pub sig: &'a Signature,
    pub neuron: NeuronId,
    pub memory: &'a mut Memory,
    pub binding: Option<&'a Binding>,
    pub silent: &'a BTreeSet<NeuronId>,
    /// Neurons that must not be handed out as fresh; copiers add their images.
    pub reserved: &'a mut BTreeSet<NeuronId>,
    pub halt: &'a mut Option<HaltRequest>,
}

pub trait Transform: Send + Sync {
    /// Checks that a neuron type's ports fit this transform.
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String>;

    fn init_memory(&self) -> Memory {
        Memory::Stateless
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String>;
}

fn families(sig: &Signature, ports: &[PortDecl]) -> Vec<Family> {
    ports.iter().map(|p| sig.family(p.kind)).collect()
}

fn expect_shape(sig: &Signature, ty: &NeuronType, inputs: &[Family], outputs: &[Family]) -> Result<(), String> {
    let got_in = families(sig, &ty.inputs);
    let got_out = families(sig, &ty.outputs);
    if got_in != inputs || got_out != outputs {
        return Err(format!(
            "expects inputs {} and outputs {}, found inputs {} and outputs {}",
            list(inputs),
            list(outputs),
            list(&got_in),
            list(&got_out)
        ));
    }
    Ok(())
}

fn list(fs: &[Family]) -> String {
    if fs.is_empty() {
        return "(none)".into();
    }
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

fn scalar(v: &StreamValue) -> Result<f64, String> {
    v.as_scalar().ok_or_else(|| format!("expected a scalar, got {}", v.family()))
}

fn cvector(v: &StreamValue) -> Result<&CVector, String> {
    v.as_cvector().ok_or_else(|| format!("expected a c-vector, got {}", v.family()))
}

fn matrix(v: &StreamValue) -> Result<&NetworkMatrix, String> {
    v.as_matrix().ok_or_else(|| format!("expected a matrix, got {}", v.family()))
}

fn row(v: &StreamValue) -> Result<&RowMask, String> {
    v.as_row().ok_or_else(|| format!("expected a matrix row, got {}", v.family()))
}

fn column(v: &StreamValue) -> Result<&ColumnMask, String> {
    v.as_column().ok_or_else(|| format!("expected a matrix column, got {}", v.family()))
}

fn new_scalar(x: f64) -> Result<StreamValue, String> {
    StreamValue::scalar(x).map_err(|e| e.to_string())
}

pub struct Identity;

impl Transform for Identity {
    fn check(&self, _sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        match (ty.inputs.as_slice(), ty.outputs.as_slice()) {
            ([i], [o]) if i.kind == o.kind => Ok(()),
            _ => Err("expects one input and one output of the same kind".into()),
        }
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        Ok(vec![inputs[0].clone()])
    }
}

/// `y = a * x`, with `a` a scalar mask.
pub struct MaskedIdentity;

impl Transform for MaskedIdentity {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        match (ty.inputs.as_slice(), ty.outputs.as_slice()) {
            ([x, a], [y]) if x.kind == y.kind && sig.family(a.kind) == Family::Scalar => Ok(()),
            _ => Err("expects inputs (x, scalar mask) and one output of the same kind as x".into()),
        }
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let a = scalar(&inputs[1])?;
        Ok(vec![inputs[0].scale(a).map_err(|e| e.to_string())?])
    }
}

pub fn bilinear_relu(x: f64, y: f64) -> f64 {
    x.max(0.0) * y.max(0.0)
}

pub struct BilinearRelu;

impl Transform for BilinearRelu {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[Family::Scalar, Family::Scalar], &[Family::Scalar])
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        Ok(vec![new_scalar(bilinear_relu(scalar(&inputs[0])?, scalar(&inputs[1])?))?])
    }
}

/// `(1, 0)` when `a > b`, `(0, 1)` otherwise.
pub fn greater_than(a: f64, b: f64) -> (f64, f64) {
    if a > b {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    }
}

pub struct GreaterThan;

impl Transform for GreaterThan {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[Family::Scalar; 2], &[Family::Scalar; 2])
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let (t, f) = greater_than(scalar(&inputs[0])?, scalar(&inputs[1])?);
        Ok(vec![new_scalar(t)?, new_scalar(f)?])
    }
}

pub struct MaxNorm;

impl Transform for MaxNorm {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[Family::CVector], &[Family::Scalar])
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        Ok(vec![StreamValue::Scalar(cvector_max_norm(cvector(&inputs[0])?))])
    }
}

pub struct DotProduct;

impl Transform for DotProduct {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[Family::CVector; 2], &[Family::Scalar])
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let d = cvector_dot(cvector(&inputs[0])?, cvector(&inputs[1])?);
        Ok(vec![new_scalar(d.get())?])
    }
}

/// Emits the bound text one character per `rate` ticks, starting on the
/// first tick the neuron is active, then the end-of-string marker, then
/// empty c-vectors forever.
pub struct InputString;

impl Transform for InputString {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[], &[Family::CVector])
    }

    fn init_memory(&self) -> Memory {
        Memory::Emitter { step: 0 }
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, _inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let step = match ctx.memory {
            Memory::Emitter { step } => {
                let s = *step;
                *step += 1;
                s
            }
            _ => return Err("emitter memory missing".into()),
        };
        let out = match ctx.binding {
            Some(Binding::Text { symbols, rate }) => {
                let rate = u64::from((*rate).max(1));
                if step % rate != 0 {
                    CVector::new()
                } else {
                    let idx = step / rate;
                    match idx.cmp(&(symbols.len() as u64)) {
                        std::cmp::Ordering::Less => CVector::unit(symbols[idx as usize]),
                        std::cmp::Ordering::Equal => CVector::unit(Symbol::Eos),
                        std::cmp::Ordering::Greater => CVector::new(),
                    }
                }
            }
            None => CVector::new(),
            Some(other) => return Err(format!("string emitter bound to non-text data {other:?}")),
        };
        Ok(vec![StreamValue::CVector(out)])
    }
}

/// Emits its bound constant every tick; 1 when unbound.
pub struct InputReal;

impl Transform for InputReal {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[], &[Family::Scalar])
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, _inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        match ctx.binding {
            Some(Binding::Real(x)) => Ok(vec![new_scalar(*x)?]),
            None => Ok(vec![StreamValue::Scalar(Scalar::ONE)]),
            Some(other) => Err(format!("real emitter bound to non-numeric data {other:?}")),
        }
    }
}

/// Emits a bound row mask every tick; empty when unbound.
pub struct InputRow;

impl Transform for InputRow {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[], &[Family::Row])
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, _inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        match ctx.binding {
            Some(Binding::Row(r)) => Ok(vec![StreamValue::Row(r.clone())]),
            None => Ok(vec![StreamValue::Row(RowMask::new())]),
            Some(other) => Err(format!("row emitter bound to {other:?}")),
        }
    }
}

/// Emits a bound column mask every tick; empty when unbound.
pub struct InputColumn;

impl Transform for InputColumn {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[], &[Family::Column])
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, _inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        match ctx.binding {
            Some(Binding::Column(c)) => Ok(vec![StreamValue::Column(c.clone())]),
            None => Ok(vec![StreamValue::Column(ColumnMask::new())]),
            Some(other) => Err(format!("column emitter bound to {other:?}")),
        }
    }
}

pub struct EosConst;

impl Transform for EosConst {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[], &[Family::CVector])
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, _inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        Ok(vec![StreamValue::CVector(CVector::unit(Symbol::Eos))])
    }
}

/// Threshold above which an answer channel counts as fired.
pub const ANSWER_THRESHOLD: f64 = 0.5;

/// Halts on the first tick either channel exceeds the threshold; the
/// positive channel wins a tie, which is flagged as a conflict.
pub fn record_answer(positive: f64, negative: f64) -> Option<HaltRequest> {
    let pos = positive > ANSWER_THRESHOLD;
    let neg = negative > ANSWER_THRESHOLD;
    match (pos, neg) {
        (true, conflict) => Some(HaltRequest { answer: true, conflict }),
        (false, true) => Some(HaltRequest {
            answer: false,
            conflict: false,
        }),
        (false, false) => None,
    }
}

pub struct RecordAnswerStop;

impl Transform for RecordAnswerStop {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(sig, ty, &[Family::Scalar; 2], &[])
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        if let Some(req) = record_answer(scalar(&inputs[0])?, scalar(&inputs[1])?) {
            if ctx.halt.is_none() {
                *ctx.halt = Some(req);
            }
        }
        Ok(Vec::new())
    }
}

/// Inputs `(matrix, gamma, alpha, beta, c)`; emits the additive matrix change
/// `c * γ_i * α_j * Σ_k β_k m_kj`. Wiring the output into `Self` with weight
/// 1 applies the update on the next tick.
pub struct UpdateWeights;

impl Transform for UpdateWeights {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        expect_shape(
            sig,
            ty,
            &[Family::Matrix, Family::Row, Family::Column, Family::Row, Family::Scalar],
            &[Family::Matrix],
        )
    }

    fn apply(&self, _ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let delta = update_weights_delta(
            matrix(&inputs[0])?,
            row(&inputs[1])?,
            column(&inputs[2])?,
            row(&inputs[3])?,
            scalar(&inputs[4])?,
        )
        .map_err(|e| e.to_string())?;
        Ok(vec![StreamValue::Matrix(delta)])
    }
}

/// Higher-order deep-copy neuron.
///
/// Inputs `(matrix, rows, cols, c, row-memory, col-memory)`, outputs
/// `(delta, new-rows, new-cols)`. On a tick where `c` becomes nonzero after
/// being zero, a fresh block is allocated for the subgraph described by the
/// masks and its row/column masks are emitted; wiring `new-rows` to
/// `row-memory` (and `new-cols` to `col-memory`) with weight 1 keeps them.
/// While `c` stays nonzero, each tick emits `c` times the copy, clamped so the
/// cumulative fraction stays within [0, 1].
pub struct DeepCopy {
    pub variant: u8,
}

impl DeepCopy {
    fn variant(&self, ty: &NeuronType) -> Result<CopyVariant, String> {
        CopyVariant::from_number(self.variant, ty.alpha).map_err(|e| e.to_string())
    }
}

impl Transform for DeepCopy {
    fn check(&self, sig: &Signature, ty: &NeuronType) -> Result<(), String> {
        self.variant(ty)?;
        expect_shape(
            sig,
            ty,
            &[
                Family::Matrix,
                Family::Row,
                Family::Column,
                Family::Scalar,
                Family::Row,
                Family::Column,
            ],
            &[Family::Matrix, Family::Row, Family::Column],
        )
    }

    fn init_memory(&self) -> Memory {
        Memory::Copier(CopierMemory::default())
    }

    fn apply(&self, ctx: &mut TransformCtx<'_>, inputs: &[StreamValue]) -> Result<Vec<StreamValue>, String> {
        let variant = self.variant(ctx.sig.neuron_type(ctx.neuron.ty))?;
        let m = matrix(&inputs[0])?;
        let rows = row(&inputs[1])?;
        let cols = column(&inputs[2])?;
        let c = scalar(&inputs[3])?;
        let mut new_rows = row(&inputs[4])?.clone();
        let mut new_cols = column(&inputs[5])?.clone();
        let Memory::Copier(mem) = ctx.memory else {
            return Err("copier memory missing".into());
        };

        let starting = mem.previous_mask == 0.0 && c != 0.0;
        if starting && !(rows.is_empty() && cols.is_empty()) {
            let spec = SubgraphSpec::from_masks(ctx.sig, "copy", rows, cols).map_err(|e| e.to_string())?;
            let fresh = m.allocate_fresh_block(ctx.silent, ctx.reserved, spec.neurons());
            ctx.reserved.extend(fresh.values().copied());
            let target = deep_copy_delta(m, ctx.sig, &spec, &fresh, variant).map_err(|e| e.to_string())?;
            let images = SubgraphSpec::new("image", fresh.values().copied().collect())
                .map_err(|e| e.to_string())?;
            new_rows = images.row_mask(ctx.sig);
            new_cols = images.column_mask(ctx.sig);
            mem.target = Some(target);
            mem.applied = 0.0;
            mem.previous_mask = c;
        } else if !starting {
            mem.previous_mask = c;
        }

        let mut delta = NetworkMatrix::new();
        if let Some(target) = &mem.target {
            let next = (mem.applied + c).clamp(0.0, 1.0);
            let step = next - mem.applied;
            if step != 0.0 {
                delta = target.scale(step).map_err(|e| e.to_string())?;
                mem.applied = next;
            }
        }
        Ok(vec![
            StreamValue::Matrix(delta),
            StreamValue::Row(new_rows),
            StreamValue::Column(new_cols),
        ])
    }
}

/// Transform identifiers known to the runtime.
pub const TRANSFORM_IDS: &[&str] = &[
    "identity",
    "masked-identity",
    "bilinear-relu",
    "greater-than",
    "max-norm",
    "dot-product",
    "input-string",
    "input-real",
    "input-row",
    "input-column",
    "eos-const",
    "record-answer-stop",
    "update-weights",
    "deep-copy-v1",
    "deep-copy-v2",
    "deep-copy-v3",
    "deep-copy-v4",
];

/// Transform ids whose neurons take external data bindings.
pub const EMITTER_IDS: &[&str] = &["input-string", "input-real", "input-row", "input-column"];

pub struct Registry {
    transforms: BTreeMap<&'static str, Box<dyn Transform>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::standard()
    }
}

impl Registry {
    pub fn standard() -> Registry {
        let mut transforms: BTreeMap<&'static str, Box<dyn Transform>> = BTreeMap::new();
        transforms.insert("identity", Box::new(Identity));
        transforms.insert("masked-identity", Box::new(MaskedIdentity));
        transforms.insert("bilinear-relu", Box::new(BilinearRelu));
        transforms.insert("greater-than", Box::new(GreaterThan));
        transforms.insert("max-norm", Box::new(MaxNorm));
        transforms.insert("dot-product", Box::new(DotProduct));
        transforms.insert("input-string", Box::new(InputString));
        transforms.insert("input-real", Box::new(InputReal));
        transforms.insert("input-row", Box::new(InputRow));
        transforms.insert("input-column", Box::new(InputColumn));
        transforms.insert("eos-const", Box::new(EosConst));
        transforms.insert("record-answer-stop", Box::new(RecordAnswerStop));
        transforms.insert("update-weights", Box::new(UpdateWeights));
        transforms.insert("deep-copy-v1", Box::new(DeepCopy { variant: 1 }));
        transforms.insert("deep-copy-v2", Box::new(DeepCopy { variant: 2 }));
        transforms.insert("deep-copy-v3", Box::new(DeepCopy { variant: 3 }));
        transforms.insert("deep-copy-v4", Box::new(DeepCopy { variant: 4 }));
        Registry { transforms }
    }

    pub fn get(&self, id: &str) -> Option<&dyn Transform> {
        self.transforms.get(id).map(|t| t.as_ref())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.transforms.contains_key(id)
    }

    /// Transform for a neuron type declared without an explicit `#builtin`:
    /// the type name itself if it is a transform id, a conventional long
    /// name, or an `id-` prefix for identity neurons.
    pub fn default_transform_for(&self, type_name: &str) -> Option<&'static str> {
        if let Some((&id, _)) = self.transforms.get_key_value(type_name) {
            return Some(id);
        }
        let id = match type_name {
            "max-norm-of-c-vector" => "max-norm",
            "dot-product-of-c-vectors" => "dot-product",
            "end-of-string-const" => "eos-const",
            "record-answer-and-stop-the-network" => "record-answer-stop",
            "accumulator" => "identity",
            _ if type_name.starts_with("id-") => "identity",
            _ => return None,
        };
        Some(id)
    }

    pub fn is_emitter(id: &str) -> bool {
        EMITTER_IDS.contains(&id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::NeuronId;

    fn ctx_run(t: &dyn Transform, memory: &mut Memory, binding: Option<&Binding>, inputs: &[StreamValue]) -> (Vec<StreamValue>, Option<HaltRequest>) {
        let sig = Signature::new();
        let silent = BTreeSet::new();
        let mut reserved = BTreeSet::new();
        let mut halt = None;
        let mut ctx = TransformCtx {
            sig: &sig,
            neuron: NeuronId::new(sig.self_type(), 0),
            memory,
            binding,
            silent: &silent,
            reserved: &mut reserved,
            halt: &mut halt,
        };
        let out = t.apply(&mut ctx, inputs).unwrap();
        (out, halt)
    }

    fn cv(entries: &[(Symbol, f64)]) -> StreamValue {
        StreamValue::CVector(CVector::from_entries(entries.iter().copied()).unwrap())
    }

    fn s(x: f64) -> StreamValue {
        StreamValue::scalar(x).unwrap()
    }

    const A: Symbol = Symbol::Char('a');
    const B: Symbol = Symbol::Char('b');

    #[test]
    fn identity_is_bit_exact() {
        let mut mem = Memory::Stateless;
        let x = cv(&[(A, 2.0)]);
        assert_eq!(ctx_run(&Identity, &mut mem, None, std::slice::from_ref(&x)).0, vec![x]);
        assert_eq!(ctx_run(&Identity, &mut mem, None, &[s(0.0)]).0, vec![s(0.0)]);
        let m = StreamValue::Matrix(NetworkMatrix::new());
        assert_eq!(ctx_run(&Identity, &mut mem, None, std::slice::from_ref(&m)).0, vec![m]);
    }

    #[test]
    fn masked_identity_examples() {
        let mut mem = Memory::Stateless;
        let x = cv(&[(A, 2.0)]);
        let run = |a: f64, mem: &mut Memory| ctx_run(&MaskedIdentity, mem, None, &[x.clone(), s(a)]).0;
        assert_eq!(run(1.0, &mut mem), vec![x.clone()]);
        assert_eq!(run(0.0, &mut mem), vec![cv(&[])]);
        assert_eq!(run(0.5, &mut mem), vec![cv(&[(A, 1.0)])]);
    }

    #[test]
    fn bilinear_relu_examples() {
        assert_eq!(bilinear_relu(2.0, 3.0), 6.0);
        assert_eq!(bilinear_relu(-1.0, 5.0), 0.0);
        assert_eq!(bilinear_relu(0.5, 0.5), 0.25);
    }

    #[test]
    fn greater_than_examples() {
        assert_eq!(greater_than(2.0, 1.0), (1.0, 0.0));
        assert_eq!(greater_than(1.0, 1.0), (0.0, 1.0));
        assert_eq!(greater_than(0.0, 0.0), (0.0, 1.0));
    }

    #[test]
    fn string_emitter_schedules() {
        let emit = |text: &str, rate: u32, ticks: usize| {
            let mut mem = InputString.init_memory();
            let b = Binding::text(text, rate);
            (0..ticks)
                .map(|_| ctx_run(&InputString, &mut mem, Some(&b), &[]).0.remove(0))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            emit("ab", 1, 4),
            vec![cv(&[(A, 1.0)]), cv(&[(B, 1.0)]), cv(&[(Symbol::Eos, 1.0)]), cv(&[])]
        );
        assert_eq!(emit("", 1, 1), vec![cv(&[(Symbol::Eos, 1.0)])]);
        assert_eq!(
            emit("a", 2, 4),
            vec![cv(&[(A, 1.0)]), cv(&[]), cv(&[(Symbol::Eos, 1.0)]), cv(&[])]
        );
    }

    #[test]
    fn record_answer_examples() {
        assert_eq!(
            record_answer(1.0, 0.0),
            Some(HaltRequest { answer: true, conflict: false })
        );
        assert_eq!(
            record_answer(0.0, 1.0),
            Some(HaltRequest { answer: false, conflict: false })
        );
        assert_eq!(record_answer(0.0, 0.0), None);
        assert_eq!(
            record_answer(1.0, 1.0),
            Some(HaltRequest { answer: true, conflict: true })
        );
        let mut mem = Memory::Stateless;
        let (out, halt) = ctx_run(&RecordAnswerStop, &mut mem, None, &[s(1.0), s(0.0)]);
        assert!(out.is_empty());
        assert_eq!(halt.map(|h| h.answer), Some(true));
    }

    #[test]
    fn constant_emitters() {
        let mut mem = Memory::Stateless;
        assert_eq!(ctx_run(&InputReal, &mut mem, None, &[]).0, vec![s(1.0)]);
        assert_eq!(ctx_run(&InputReal, &mut mem, Some(&Binding::Real(0.0)), &[]).0, vec![s(0.0)]);
        assert_eq!(
            ctx_run(&EosConst, &mut mem, None, &[]).0,
            vec![cv(&[(Symbol::Eos, 1.0)])]
        );
    }

    #[test]
    fn default_transform_names() {
        let r = Registry::standard();
        assert_eq!(r.default_transform_for("id-c-vector"), Some("identity"));
        assert_eq!(r.default_transform_for("input-string"), Some("input-string"));
        assert_eq!(
            r.default_transform_for("record-answer-and-stop-the-network"),
            Some("record-answer-stop")
        );
        assert_eq!(r.default_transform_for("greater-than"), Some("greater-than"));
        assert_eq!(r.default_transform_for("mystery"), None);
        for id in TRANSFORM_IDS {
            assert!(r.contains(id), "{id}");
        }
    }
}
