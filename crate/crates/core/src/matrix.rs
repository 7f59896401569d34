//! The network matrix: a finitely supported weight assignment from
//! (input port, output port) pairs. Rows are input ports, columns are output
//! ports. The matrix is the program; it is also an ordinary stream value, the
//! output of the `Self` neuron.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signature::{Direction, InPort, NeuronId, OutPort, PortRef, Signature};
use crate::streams::{check_finite, lin_comb, Sparse, StreamError, StreamValue};

/// Row mask: weights over input ports.
pub type RowMask = Sparse<InPort>;
/// Column mask: weights over output ports.
pub type ColumnMask = Sparse<OutPort>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("cannot connect output {output:?} to input {input:?}: stream kinds differ")]
    KindMismatch { input: InPort, output: OutPort },
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("line {line}: {message}")]
    Dump { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkMatrix {
    weights: Sparse<(InPort, OutPort)>,
}

/// Machine-readable form of one nonzero weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    #[serde(rename = "in")]
    pub input: String,
    #[serde(rename = "out")]
    pub output: String,
    pub w: f64,
}

impl NetworkMatrix {
    pub fn new() -> NetworkMatrix {
        NetworkMatrix::default()
    }

    pub fn from_entries<I>(entries: I) -> Result<NetworkMatrix, MatrixError>
    where
        I: IntoIterator<Item = (InPort, OutPort, f64)>,
    {
        let mut m = NetworkMatrix::new();
        for (i, o, w) in entries {
            m.add_weight(i, o, w)?;
        }
        Ok(m)
    }

    pub fn get(&self, input: InPort, output: OutPort) -> f64 {
        self.weights.get(&(input, output))
    }

    /// Number of nonzero weights.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Nonzero weights in (row, column) order.
    pub fn iter(&self) -> impl Iterator<Item = (InPort, OutPort, f64)> + '_ {
        self.weights.iter().map(|(&(i, o), w)| (i, o, w))
    }

    /// In-place form of [`NetworkMatrix::add_to_weight`].
    pub fn add_weight(&mut self, input: InPort, output: OutPort, delta: f64) -> Result<(), MatrixError> {
        if input.kind != output.kind {
            return Err(MatrixError::KindMismatch { input, output });
        }
        self.weights.add((input, output), delta)?;
        Ok(())
    }

    /// Returns a copy with `delta` added to the weight from `output` to
    /// `input`. A weight that becomes exactly zero leaves the support.
    pub fn add_to_weight(&self, input: InPort, output: OutPort, delta: f64) -> Result<NetworkMatrix, MatrixError> {
        let mut m = self.clone();
        m.add_weight(input, output, delta)?;
        Ok(m)
    }

    /// Adds every entry of `other` into `self`.
    pub fn accumulate(&mut self, other: &NetworkMatrix) -> Result<(), MatrixError> {
        for (i, o, w) in other.iter() {
            self.add_weight(i, o, w)?;
        }
        Ok(())
    }

    /// Multiplies one entry by `factor`.
    pub(crate) fn scale_entry(&mut self, input: InPort, output: OutPort, factor: f64) -> Result<(), MatrixError> {
        let w = self.get(input, output);
        if w == 0.0 {
            return Ok(());
        }
        let nw = check_finite(w * factor)?;
        self.weights.remove(&(input, output));
        if nw != 0.0 {
            self.weights.insert_raw((input, output), nw);
        }
        Ok(())
    }

    /// Weighted sum of matrices. Kind compatibility is preserved because every
    /// term already satisfies it.
    pub fn lin_comb<'a, I>(terms: I) -> Result<NetworkMatrix, StreamError>
    where
        I: IntoIterator<Item = (f64, &'a NetworkMatrix)>,
    {
        let weights = Sparse::lin_comb(terms.into_iter().map(|(w, m)| (w, &m.weights)))?;
        Ok(NetworkMatrix { weights })
    }

    pub fn scale(&self, factor: f64) -> Result<NetworkMatrix, StreamError> {
        Ok(NetworkMatrix {
            weights: self.weights.scale(factor)?,
        })
    }

    /// Recomputes inputs from outputs: every input port with a nonzero row
    /// gets the linear combination of the outputs it depends on. Missing
    /// outputs count as zero; only rows in the support appear in the result.
    /// Work is proportional to the number of nonzero weights.
    pub fn down_movement(
        &self,
        sig: &Signature,
        outputs: &BTreeMap<OutPort, StreamValue>,
    ) -> Result<BTreeMap<InPort, StreamValue>, StreamError> {
        let mut result = BTreeMap::new();
        let mut entries = self.iter().peekable();
        let mut terms: Vec<(f64, &StreamValue)> = Vec::new();
        while let Some((row, col, w)) = entries.next() {
            if let Some(v) = outputs.get(&col) {
                terms.push((w, v));
            }
            if entries.peek().map(|(next, _, _)| *next != row).unwrap_or(true) {
                let family = sig.family(row.kind);
                result.insert(row, lin_comb(family, terms.drain(..))?);
            }
        }
        Ok(result)
    }

    /// Neurons owning at least one port in the support.
    pub fn support_neurons(&self) -> BTreeSet<NeuronId> {
        let mut out = BTreeSet::new();
        for (i, o, _) in self.iter() {
            out.insert(i.neuron);
            out.insert(o.neuron);
        }
        out
    }

    /// Neurons that run their transforms: those with nonzero connectivity,
    /// minus the silent ones, plus `Self` unconditionally.
    pub fn active_neurons(&self, sig: &Signature, silent: &BTreeSet<NeuronId>) -> BTreeSet<NeuronId> {
        let mut out: BTreeSet<NeuronId> = self
            .support_neurons()
            .into_iter()
            .filter(|n| !silent.contains(n))
            .collect();
        out.insert(sig.self_neuron());
        out
    }

    /// For every neuron of `neurons`, picks the lowest-indexed instance of the
    /// same type that has no connectivity in this matrix, is neither silent
    /// nor reserved, is not one of `neurons`, and was not already picked.
    pub fn allocate_fresh_block(
        &self,
        silent: &BTreeSet<NeuronId>,
        reserved: &BTreeSet<NeuronId>,
        neurons: &BTreeSet<NeuronId>,
    ) -> BTreeMap<NeuronId, NeuronId> {
        let used = self.support_neurons();
        let mut taken: BTreeSet<NeuronId> = BTreeSet::new();
        let mut next_index: BTreeMap<_, u64> = BTreeMap::new();
        let mut mapping = BTreeMap::new();
        for &n in neurons {
            let cursor = next_index.entry(n.ty).or_insert(0);
            loop {
                let candidate = NeuronId::new(n.ty, *cursor);
                *cursor += 1;
                if !used.contains(&candidate)
                    && !silent.contains(&candidate)
                    && !reserved.contains(&candidate)
                    && !neurons.contains(&candidate)
                    && taken.insert(candidate)
                {
                    mapping.insert(n, candidate);
                    break;
                }
            }
        }
        mapping
    }

    /// Sorted textual listing, one `type#index.port <- type#index.port : w`
    /// line per nonzero weight.
    pub fn dump(&self, sig: &Signature) -> String {
        let mut lines: Vec<String> = self
            .iter()
            .map(|(i, o, w)| format!("{} <- {} : {}", sig.in_label(i), sig.out_label(o), w))
            .collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Records sorted the same way as [`NetworkMatrix::dump`].
    pub fn records(&self, sig: &Signature) -> Vec<WeightRecord> {
        let mut recs: Vec<WeightRecord> = self
            .iter()
            .map(|(i, o, w)| WeightRecord {
                input: sig.in_label(i),
                output: sig.out_label(o),
                w,
            })
            .collect();
        recs.sort_by(|a, b| (&a.input, &a.output).cmp(&(&b.input, &b.output)));
        recs
    }

    /// Parses the output of [`NetworkMatrix::dump`]. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_dump(sig: &Signature, text: &str) -> Result<NetworkMatrix, MatrixError> {
        let mut m = NetworkMatrix::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| MatrixError::Dump {
                line: line_no,
                message: message.to_string(),
            };
            let (lhs, w) = line.rsplit_once(" : ").ok_or_else(|| err("missing ` : weight`"))?;
            let (input, output) = lhs.split_once(" <- ").ok_or_else(|| err("missing ` <- `"))?;
            let input = match sig.parse_port_label(input.trim(), Direction::Input) {
                Some(PortRef::In(p)) => p,
                _ => return Err(err(&format!("unknown input port `{}`", input.trim()))),
            };
            let output = match sig.parse_port_label(output.trim(), Direction::Output) {
                Some(PortRef::Out(p)) => p,
                _ => return Err(err(&format!("unknown output port `{}`", output.trim()))),
            };
            let w: f64 = w.trim().parse().map_err(|_| err("bad weight"))?;
            m.add_weight(input, output, w)?;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{NeuronType, PortDecl, TypeId};
    use crate::streams::{CVector, Family, Symbol};

    struct Fixture {
        sig: Signature,
        id_cv: TypeId,
        id_real: TypeId,
    }

    fn fixture() -> Fixture {
        let mut sig = Signature::new();
        let cv = sig.declare_kind("c-vector", Family::CVector).unwrap();
        let real = sig.declare_kind("real", Family::Scalar).unwrap();
        let mk = |name: &str, kind| NeuronType {
            name: name.into(),
            inputs: vec![PortDecl { name: "in".into(), kind }],
            outputs: vec![PortDecl { name: "out".into(), kind }],
            transform: "identity".into(),
            alpha: None,
        };
        let id_cv = sig.declare_type(mk("id-c-vector", cv)).unwrap();
        let id_real = sig.declare_type(mk("id-real", real)).unwrap();
        Fixture { sig, id_cv, id_real }
    }

    fn ports(f: &Fixture, ty: TypeId, index: u64) -> (InPort, OutPort) {
        let n = NeuronId::new(ty, index);
        (f.sig.in_port(n, 0), f.sig.out_port(n, 0))
    }

    #[test]
    fn add_to_weight_examples() {
        let f = fixture();
        let (x, y) = ports(&f, f.id_cv, 0);
        let m = NetworkMatrix::new().add_to_weight(x, y, 1.0).unwrap();
        assert_eq!(m.get(x, y), 1.0);
        assert_eq!(m.len(), 1);
        assert!(m.add_to_weight(x, y, -1.0).unwrap().is_empty());
        let half = NetworkMatrix::new().add_to_weight(x, y, 0.5).unwrap();
        assert_eq!(half.add_to_weight(x, y, 0.25).unwrap().get(x, y), 0.75);
    }

    #[test]
    fn add_to_weight_rejects_kind_mismatch() {
        let f = fixture();
        let (x, _) = ports(&f, f.id_cv, 0);
        let (_, r) = ports(&f, f.id_real, 0);
        assert!(matches!(
            NetworkMatrix::new().add_to_weight(x, r, 1.0),
            Err(MatrixError::KindMismatch { .. })
        ));
    }

    #[test]
    fn down_movement_sums_row() {
        let f = fixture();
        let (acc_in, acc_out) = ports(&f, f.id_cv, 0);
        let (_, emit) = ports(&f, f.id_cv, 1);
        let m = NetworkMatrix::from_entries([(acc_in, emit, 1.0), (acc_in, acc_out, 1.0)]).unwrap();
        let mut outputs = BTreeMap::new();
        outputs.insert(emit, StreamValue::CVector(CVector::unit(Symbol::Char('a'))));
        outputs.insert(acc_out, StreamValue::CVector(CVector::unit(Symbol::Char('b'))));
        let inputs = m.down_movement(&f.sig, &outputs).unwrap();
        let expect = CVector::from_entries([(Symbol::Char('a'), 1.0), (Symbol::Char('b'), 1.0)]).unwrap();
        assert_eq!(inputs[&acc_in], StreamValue::CVector(expect));
        assert_eq!(inputs.len(), 1);
    }

    #[test]
    fn down_movement_negative_weight_and_empty() {
        let f = fixture();
        let (x, _) = ports(&f, f.id_real, 0);
        let (_, y) = ports(&f, f.id_real, 1);
        let m = NetworkMatrix::from_entries([(x, y, -1.0)]).unwrap();
        let mut outputs = BTreeMap::new();
        outputs.insert(y, StreamValue::scalar(2.0).unwrap());
        assert_eq!(
            m.down_movement(&f.sig, &outputs).unwrap()[&x],
            StreamValue::scalar(-2.0).unwrap()
        );
        assert!(NetworkMatrix::new().down_movement(&f.sig, &outputs).unwrap().is_empty());
        // a nonzero row whose outputs are all missing reads as zero
        assert_eq!(
            m.down_movement(&f.sig, &BTreeMap::new()).unwrap()[&x],
            StreamValue::scalar(0.0).unwrap()
        );
    }

    #[test]
    fn active_neurons_examples() {
        let f = fixture();
        let (x, y) = ports(&f, f.id_cv, 0);
        let acc = x.neuron;
        let m = NetworkMatrix::from_entries([(x, y, 1.0)]).unwrap();
        let none = BTreeSet::new();
        let active = m.active_neurons(&f.sig, &none);
        assert_eq!(active, BTreeSet::from([acc, f.sig.self_neuron()]));
        let silent = BTreeSet::from([acc]);
        assert_eq!(m.active_neurons(&f.sig, &silent), BTreeSet::from([f.sig.self_neuron()]));
        assert_eq!(
            NetworkMatrix::new().active_neurons(&f.sig, &none),
            BTreeSet::from([f.sig.self_neuron()])
        );
    }

    #[test]
    fn allocate_skips_used_indices() {
        let f = fixture();
        let mut m = NetworkMatrix::new();
        for i in 0..3 {
            let (x, y) = ports(&f, f.id_cv, i);
            m.add_weight(x, y, 1.0).unwrap();
        }
        let orig = NeuronId::new(f.id_cv, 0);
        let none = BTreeSet::new();
        let map = m.allocate_fresh_block(&none, &none, &BTreeSet::from([orig]));
        assert_eq!(map[&orig], NeuronId::new(f.id_cv, 3));
    }

    #[test]
    fn allocate_two_types_and_disjoint_repeats() {
        let f = fixture();
        let a = NeuronId::new(f.id_cv, 0);
        let b = NeuronId::new(f.id_real, 0);
        let none = BTreeSet::new();
        let set = BTreeSet::from([a, b]);
        let map = NetworkMatrix::new().allocate_fresh_block(&none, &none, &set);
        assert_eq!(map[&a], NeuronId::new(f.id_cv, 1));
        assert_eq!(map[&b], NeuronId::new(f.id_real, 1));

        let reserved: BTreeSet<_> = map.values().copied().collect();
        let again = NetworkMatrix::new().allocate_fresh_block(&none, &reserved, &set);
        assert!(again.values().all(|n| !reserved.contains(n)));
        assert_eq!(again[&a], NeuronId::new(f.id_cv, 2));
    }

    #[test]
    fn dump_is_sorted_and_parses_back() {
        let f = fixture();
        let (x0, y0) = ports(&f, f.id_cv, 0);
        let (x1, y1) = ports(&f, f.id_cv, 1);
        let m = NetworkMatrix::from_entries([(x1, y0, 0.5), (x0, y1, -2.0), (x0, y0, 1.0)]).unwrap();
        let text = m.dump(&f.sig);
        assert_eq!(
            text,
            "id-c-vector#0.in <- id-c-vector#0.out : 1\n\
             id-c-vector#0.in <- id-c-vector#1.out : -2\n\
             id-c-vector#1.in <- id-c-vector#0.out : 0.5\n"
        );
        assert_eq!(NetworkMatrix::parse_dump(&f.sig, &text).unwrap(), m);
        let recs = m.records(&f.sig);
        assert_eq!(recs[2].input, "id-c-vector#1.in");
        assert!(NetworkMatrix::parse_dump(&f.sig, "nonsense").is_err());
    }
}
