//! Brute-force reference implementations shared by the property and
//! acceptance tests.

use std::collections::{BTreeMap, BTreeSet};

use dmm_core::matrix::{ColumnMask, NetworkMatrix, RowMask};
use dmm_core::reflection::CopyVariant;
use dmm_core::signature::{InPort, NeuronId, OutPort};
use dmm_core::streams::StreamValue;

use super::Pool;

/// Dense shadow of a matrix over the pool's ports.
pub fn dense(p: &Pool, m: &NetworkMatrix) -> Vec<Vec<f64>> {
    p.ins.iter().map(|&i| p.outs.iter().map(|&o| m.get(i, o)).collect()).collect()
}

pub fn from_dense(p: &Pool, d: &[Vec<f64>]) -> BTreeMap<(InPort, OutPort), f64> {
    let mut out = BTreeMap::new();
    for (a, row) in d.iter().enumerate() {
        for (b, &w) in row.iter().enumerate() {
            if w != 0.0 {
                out.insert((p.ins[a], p.outs[b]), w);
            }
        }
    }
    out
}

pub fn as_map(m: &NetworkMatrix) -> BTreeMap<(InPort, OutPort), f64> {
    m.iter().map(|(i, o, w)| ((i, o), w)).collect()
}

pub fn close(a: &BTreeMap<(InPort, OutPort), f64>, b: &BTreeMap<(InPort, OutPort), f64>, tol: f64) -> bool {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| {
        let (x, y) = (a.get(k).copied().unwrap_or(0.0), b.get(k).copied().unwrap_or(0.0));
        (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
    })
}

/// The generic update evaluated entry by entry on a dense shadow:
/// `a[i][j] += gamma[i] * alpha[j] * sum_k beta[k] * a[k][j]`.
pub fn dense_generic_update(p: &Pool, d: &[Vec<f64>], g: &RowMask, al: &ColumnMask, be: &RowMask) -> Vec<Vec<f64>> {
    let mut want = d.to_vec();
    for (row, &i) in want.iter_mut().zip(&p.ins) {
        for (j, (w, &o)) in row.iter_mut().zip(&p.outs).enumerate() {
            let s: f64 = p.ins.iter().zip(d).map(|(k, dk)| be.get(k) * dk[j]).sum();
            *w += g.get(&i) * al.get(&o) * s;
        }
    }
    want
}

/// Dense reading of the figure's block rules: I = subgraph, O = rest,
/// primes are images.
pub fn block_rule_oracle(
    m: &NetworkMatrix,
    set: &BTreeSet<NeuronId>,
    fresh: &BTreeMap<NeuronId, NeuronId>,
    v: CopyVariant,
) -> BTreeMap<(InPort, OutPort), f64> {
    let mut out = as_map(m);
    let img_in = |i: InPort| InPort { neuron: fresh[&i.neuron], ..i };
    let img_out = |o: OutPort| OutPort { neuron: fresh[&o.neuron], ..o };
    for (i, o, w) in m.iter() {
        match (set.contains(&i.neuron), set.contains(&o.neuron), v) {
            (true, true, _) => {
                out.insert((img_in(i), img_out(o)), w);
            }
            (true, false, CopyVariant::V2 | CopyVariant::V3 | CopyVariant::V4 { .. }) => {
                out.insert((img_in(i), o), w);
            }
            (false, true, CopyVariant::V3) => {
                out.insert((i, img_out(o)), w);
            }
            (false, true, CopyVariant::V4 { alpha }) => {
                out.insert((i, img_out(o)), alpha * w);
                out.insert((i, o), (1.0 - alpha) * w);
            }
            _ => {}
        }
    }
    out.retain(|_, w| *w != 0.0);
    out
}

/// Every coordinate of a value with its bit pattern, for bit-exact equality.
pub fn bits(v: &StreamValue) -> Vec<(String, u64)> {
    match v {
        StreamValue::Scalar(s) => vec![(String::new(), s.get().to_bits())],
        StreamValue::CVector(c) => c.iter().map(|(k, x)| (k.key(), x.to_bits())).collect(),
        StreamValue::Matrix(m) => m.iter().map(|(i, o, x)| (format!("{i:?}{o:?}"), x.to_bits())).collect(),
        StreamValue::Row(r) => r.iter().map(|(k, x)| (format!("{k:?}"), x.to_bits())).collect(),
        StreamValue::Column(c) => c.iter().map(|(k, x)| (format!("{k:?}"), x.to_bits())).collect(),
    }
}
