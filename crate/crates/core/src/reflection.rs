//! Matrix-level program transformations: the generic additive weight update
//! and deep copy of a subgraph. These are pure functions from matrix to
//! matrix, shared by the loader and by the higher-order neurons.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::matrix::{ColumnMask, MatrixError, NetworkMatrix, RowMask};
use crate::signature::{InPort, NeuronId, OutPort, Signature};
use crate::streams::StreamError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReflectionError {
    #[error("subgraph `{0}` has no neurons")]
    EmptySubgraph(String),
    #[error("the Self neuron cannot be part of a copied subgraph")]
    ContainsSelf,
    #[error("blend factor {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("copy variant {0} does not exist (expected 1 to 4)")]
    UnknownVariant(u8),
    #[error("copy target {0:?} already has connectivity")]
    NotFresh(NeuronId),
    #[error("no fresh image given for {0:?}")]
    MissingImage(NeuronId),
    #[error("masks cover only part of the ports of {0:?}")]
    PartialNeuron(NeuronId),
    #[error("copy step {step} refers to images of a later step")]
    ForwardReference { step: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl From<StreamError> for ReflectionError {
    fn from(e: StreamError) -> Self {
        ReflectionError::Matrix(MatrixError::Stream(e))
    }
}

/// A named set of whole neurons. Its rows are all their input ports and its
/// columns all their output ports.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphSpec {
    name: String,
    neurons: BTreeSet<NeuronId>,
}

impl SubgraphSpec {
    pub fn new(name: impl Into<String>, neurons: BTreeSet<NeuronId>) -> Result<SubgraphSpec, ReflectionError> {
        let name = name.into();
        if neurons.is_empty() {
            return Err(ReflectionError::EmptySubgraph(name));
        }
        Ok(SubgraphSpec { name, neurons })
    }

    /// Recovers the subgraph described by a row mask and a column mask. The
    /// masks must cover every port of every neuron they touch.
    pub fn from_masks(
        sig: &Signature,
        name: impl Into<String>,
        rows: &RowMask,
        cols: &ColumnMask,
    ) -> Result<SubgraphSpec, ReflectionError> {
        let neurons: BTreeSet<NeuronId> = rows
            .keys()
            .map(|p| p.neuron)
            .chain(cols.keys().map(|p| p.neuron))
            .collect();
        for &n in &neurons {
            let whole = sig.inputs_of(n).all(|p| rows.contains(&p))
                && sig.outputs_of(n).all(|p| cols.contains(&p));
            if !whole {
                return Err(ReflectionError::PartialNeuron(n));
            }
        }
        SubgraphSpec::new(name, neurons)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn neurons(&self) -> &BTreeSet<NeuronId> {
        &self.neurons
    }

    pub fn contains(&self, n: NeuronId) -> bool {
        self.neurons.contains(&n)
    }

    pub fn rows(&self, sig: &Signature) -> BTreeSet<InPort> {
        self.neurons.iter().flat_map(|&n| sig.inputs_of(n)).collect()
    }

    pub fn columns(&self, sig: &Signature) -> BTreeSet<OutPort> {
        self.neurons.iter().flat_map(|&n| sig.outputs_of(n)).collect()
    }

    /// Row mask with weight 1 on every row of the subgraph.
    pub fn row_mask(&self, sig: &Signature) -> RowMask {
        let mut m = RowMask::new();
        for p in self.rows(sig) {
            m.insert_raw(p, 1.0);
        }
        m
    }

    pub fn column_mask(&self, sig: &Signature) -> ColumnMask {
        let mut m = ColumnMask::new();
        for p in self.columns(sig) {
            m.insert_raw(p, 1.0);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopyVariant {
    /// Internal block only.
    V1,
    /// Internal block and incoming connections.
    V2,
    /// Internal block, incoming and outgoing connections.
    V3,
    /// Like `V3`, with outgoing weight split: `alpha` to the copy, `1 - alpha`
    /// left on the original.
    V4 { alpha: f64 },
}

impl CopyVariant {
    pub fn v4(alpha: f64) -> Result<CopyVariant, ReflectionError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(CopyVariant::V4 { alpha })
        } else {
            Err(ReflectionError::AlphaOutOfRange(alpha))
        }
    }

    /// Variant by number; `alpha` is only consulted for variant 4.
    pub fn from_number(n: u8, alpha: Option<f64>) -> Result<CopyVariant, ReflectionError> {
        match n {
            1 => Ok(CopyVariant::V1),
            2 => Ok(CopyVariant::V2),
            3 => Ok(CopyVariant::V3),
            4 => CopyVariant::v4(alpha.unwrap_or(0.5)),
            n => Err(ReflectionError::UnknownVariant(n)),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            CopyVariant::V1 => 1,
            CopyVariant::V2 => 2,
            CopyVariant::V3 => 3,
            CopyVariant::V4 { .. } => 4,
        }
    }

    fn copies_incoming(self) -> bool {
        !matches!(self, CopyVariant::V1)
    }

    fn copies_outgoing(self) -> bool {
        matches!(self, CopyVariant::V3 | CopyVariant::V4 { .. })
    }
}

/// The additive change `c * γ_i * α_j * Σ_k β_k a_kj` for every row `i` in
/// the support of `gamma` and column `j` in the support of `alpha`.
pub fn update_weights_delta(
    m: &NetworkMatrix,
    gamma: &RowMask,
    alpha: &ColumnMask,
    beta: &RowMask,
    c: f64,
) -> Result<NetworkMatrix, MatrixError> {
    let mut delta = NetworkMatrix::new();
    if c == 0.0 || gamma.is_empty() || alpha.is_empty() || beta.is_empty() {
        return Ok(delta);
    }
    let mut column_sums: BTreeMap<OutPort, f64> = BTreeMap::new();
    for (k, j, w) in m.iter() {
        let b = beta.get(&k);
        if b != 0.0 && alpha.contains(&j) {
            *column_sums.entry(j).or_insert(0.0) += b * w;
        }
    }
    for (&i, g) in gamma.iter() {
        for (&j, s) in &column_sums {
            let v = c * g * alpha.get(&j) * s;
            if v != 0.0 {
                delta.add_weight(i, j, v)?;
            }
        }
    }
    Ok(delta)
}

/// `a_ij := a_ij + γ_i * α_j * Σ_k β_k a_kj`, all entries updated from the
/// same old matrix.
pub fn update_weights_generic(
    m: &NetworkMatrix,
    gamma: &RowMask,
    alpha: &ColumnMask,
    beta: &RowMask,
) -> Result<NetworkMatrix, MatrixError> {
    let delta = update_weights_delta(m, gamma, alpha, beta, 1.0)?;
    let mut out = m.clone();
    out.accumulate(&delta)?;
    Ok(out)
}

/// Copies the subgraph `spec` onto the fresh neurons given by `fresh`
/// (original -> image), following `variant`. Cross blocks between original
/// and copy stay zero in every variant.
pub fn deep_copy(
    m: &NetworkMatrix,
    sig: &Signature,
    spec: &SubgraphSpec,
    fresh: &BTreeMap<NeuronId, NeuronId>,
    variant: CopyVariant,
) -> Result<NetworkMatrix, ReflectionError> {
    if spec.contains(sig.self_neuron()) {
        return Err(ReflectionError::ContainsSelf);
    }
    if let CopyVariant::V4 { alpha } = variant {
        CopyVariant::v4(alpha)?;
    }
    for &n in spec.neurons() {
        let image = *fresh.get(&n).ok_or(ReflectionError::MissingImage(n))?;
        if image.ty != n.ty || spec.contains(image) {
            return Err(ReflectionError::NotFresh(image));
        }
    }
    let images: BTreeSet<NeuronId> = fresh.values().copied().collect();
    if let Some(n) = m.support_neurons().intersection(&images).next() {
        return Err(ReflectionError::NotFresh(*n));
    }

    let map_in = |p: InPort| InPort {
        neuron: fresh[&p.neuron],
        ..p
    };
    let map_out = |p: OutPort| OutPort {
        neuron: fresh[&p.neuron],
        ..p
    };

    let mut out = m.clone();
    let mut rescale = Vec::new();
    for (i, o, w) in m.iter() {
        match (spec.contains(i.neuron), spec.contains(o.neuron)) {
            (true, true) => out.add_weight(map_in(i), map_out(o), w)?,
            (true, false) if variant.copies_incoming() => out.add_weight(map_in(i), o, w)?,
            (false, true) if variant.copies_outgoing() => match variant {
                CopyVariant::V4 { alpha } => {
                    out.add_weight(i, map_out(o), alpha * w)?;
                    rescale.push((i, o, 1.0 - alpha));
                }
                _ => out.add_weight(i, map_out(o), w)?,
            },
            _ => {}
        }
    }
    for (i, o, factor) in rescale {
        out.scale_entry(i, o, factor)?;
    }
    Ok(out)
}

/// `deep_copy(m, ..) - m`: the additive contribution that realizes the copy
/// when fed into `Self`.
pub fn deep_copy_delta(
    m: &NetworkMatrix,
    sig: &Signature,
    spec: &SubgraphSpec,
    fresh: &BTreeMap<NeuronId, NeuronId>,
    variant: CopyVariant,
) -> Result<NetworkMatrix, ReflectionError> {
    let copied = deep_copy(m, sig, spec, fresh, variant)?;
    Ok(NetworkMatrix::lin_comb([(1.0, &copied), (-1.0, m)])?)
}

/// A subgraph member for [`nested_copy_compose`]: either a concrete neuron or
/// the image some earlier step produced for a member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Member {
    Neuron(NeuronId),
    ImageOf { step: usize, of: Box<Member> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopyStep {
    pub name: String,
    pub members: Vec<Member>,
    pub variant: CopyVariant,
}

/// Applies copy steps in order; each allocates its own fresh block (avoiding
/// everything earlier steps allocated) and copies. Returns the final matrix
/// and the original -> image mapping of every step.
pub fn nested_copy_compose(
    m: &NetworkMatrix,
    sig: &Signature,
    steps: &[CopyStep],
    silent: &BTreeSet<NeuronId>,
    reserved: &BTreeSet<NeuronId>,
) -> Result<(NetworkMatrix, Vec<BTreeMap<NeuronId, NeuronId>>), ReflectionError> {
    fn resolve(
        member: &Member,
        maps: &[BTreeMap<NeuronId, NeuronId>],
        step: usize,
    ) -> Result<NeuronId, ReflectionError> {
        match member {
            Member::Neuron(n) => Ok(*n),
            Member::ImageOf { step: s, of } => {
                let inner = resolve(of, maps, step)?;
                let map = maps.get(*s).ok_or(ReflectionError::ForwardReference { step })?;
                map.get(&inner).copied().ok_or(ReflectionError::MissingImage(inner))
            }
        }
    }

    let mut current = m.clone();
    let mut reserved = reserved.clone();
    let mut maps = Vec::with_capacity(steps.len());
    for (idx, step) in steps.iter().enumerate() {
        let neurons = step
            .members
            .iter()
            .map(|mem| resolve(mem, &maps, idx))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let spec = SubgraphSpec::new(step.name.clone(), neurons)?;
        let fresh = current.allocate_fresh_block(silent, &reserved, spec.neurons());
        current = deep_copy(&current, sig, &spec, &fresh, step.variant)?;
        reserved.extend(fresh.values().copied());
        maps.push(fresh);
    }
    Ok((current, maps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{NeuronType, PortDecl, TypeId};
    use crate::streams::Family;

    fn sig_with_ids() -> (Signature, TypeId) {
        let mut sig = Signature::new();
        let real = sig.declare_kind("real", Family::Scalar).unwrap();
        let ty = sig
            .declare_type(NeuronType {
                name: "id-real".into(),
                inputs: vec![PortDecl { name: "in".into(), kind: real }],
                outputs: vec![PortDecl { name: "out".into(), kind: real }],
                transform: "identity".into(),
                alpha: None,
            })
            .unwrap();
        (sig, ty)
    }

    fn io(sig: &Signature, n: NeuronId) -> (InPort, OutPort) {
        (sig.in_port(n, 0), sig.out_port(n, 0))
    }

    #[test]
    fn generic_update_examples() {
        let (sig, ty) = sig_with_ids();
        let (r1, q1) = io(&sig, NeuronId::new(ty, 1));
        let (r2, _) = io(&sig, NeuronId::new(ty, 2));
        let w = NetworkMatrix::from_entries([(r1, q1, 2.0)]).unwrap();
        let one_r1 = RowMask::from_entries([(r1, 1.0)]).unwrap();
        let one_q1 = ColumnMask::from_entries([(q1, 1.0)]).unwrap();
        let out = update_weights_generic(&w, &one_r1, &one_q1, &one_r1).unwrap();
        assert_eq!(out.get(r1, q1), 4.0);
        assert_eq!(out.len(), 1);

        assert_eq!(update_weights_generic(&w, &one_r1, &one_q1, &RowMask::new()).unwrap(), w);

        let w2 = NetworkMatrix::from_entries([(r1, q1, 2.0), (r2, q1, 1.0)]).unwrap();
        let g = RowMask::from_entries([(r2, 1.0)]).unwrap();
        let b = RowMask::from_entries([(r1, 1.0), (r2, 1.0)]).unwrap();
        let out = update_weights_generic(&w2, &g, &one_q1, &b).unwrap();
        assert_eq!(out.get(r2, q1), 4.0);
        assert_eq!(out.get(r1, q1), 2.0);
    }

    #[test]
    fn update_delta_examples() {
        let (sig, ty) = sig_with_ids();
        let (r1, q1) = io(&sig, NeuronId::new(ty, 1));
        let (r2, _) = io(&sig, NeuronId::new(ty, 2));
        let m = NetworkMatrix::from_entries([(r1, q1, 2.0)]).unwrap();
        let one_r1 = RowMask::from_entries([(r1, 1.0)]).unwrap();
        let one_q1 = ColumnMask::from_entries([(q1, 1.0)]).unwrap();
        let d = update_weights_delta(&m, &one_r1, &one_q1, &one_r1, 1.0).unwrap();
        assert_eq!(d, NetworkMatrix::from_entries([(r1, q1, 2.0)]).unwrap());
        assert!(update_weights_delta(&m, &RowMask::new(), &one_q1, &one_r1, 1.0)
            .unwrap()
            .is_empty());
        let half = ColumnMask::from_entries([(q1, 0.5)]).unwrap();
        let g = RowMask::from_entries([(r2, 1.0)]).unwrap();
        let d = update_weights_delta(&m, &g, &half, &one_r1, 1.0).unwrap();
        assert_eq!(d, NetworkMatrix::from_entries([(r2, q1, 1.0)]).unwrap());
        assert!(update_weights_delta(&m, &one_r1, &one_q1, &one_r1, 0.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn generic_update_rejects_cross_kind_entry() {
        let mut sig = Signature::new();
        let real = sig.declare_kind("real", Family::Scalar).unwrap();
        let cv = sig.declare_kind("c-vector", Family::CVector).unwrap();
        let mk = |name: &str, kind| NeuronType {
            name: name.into(),
            inputs: vec![PortDecl { name: "in".into(), kind }],
            outputs: vec![PortDecl { name: "out".into(), kind }],
            transform: "identity".into(),
            alpha: None,
        };
        let tr = sig.declare_type(mk("id-real", real)).unwrap();
        let tc = sig.declare_type(mk("id-c-vector", cv)).unwrap();
        let (r, q) = io(&sig, NeuronId::new(tr, 0));
        let (rc, _) = io(&sig, NeuronId::new(tc, 0));
        let m = NetworkMatrix::from_entries([(r, q, 1.0)]).unwrap();
        let err = update_weights_generic(
            &m,
            &RowMask::from_entries([(rc, 1.0)]).unwrap(),
            &ColumnMask::from_entries([(q, 1.0)]).unwrap(),
            &RowMask::from_entries([(r, 1.0)]).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, MatrixError::KindMismatch { input, .. } if input == rc));
    }

    /// neuron n: self-loop 0.5, incoming 1 from e, outgoing 2 to f.
    fn base_case() -> (Signature, NetworkMatrix, [NeuronId; 4]) {
        let (sig, ty) = sig_with_ids();
        let n = NeuronId::new(ty, 0);
        let e = NeuronId::new(ty, 1);
        let f = NeuronId::new(ty, 2);
        let (n_in, n_out) = io(&sig, n);
        let (_, e_out) = io(&sig, e);
        let (f_in, _) = io(&sig, f);
        let m = NetworkMatrix::from_entries([(n_in, n_out, 0.5), (n_in, e_out, 1.0), (f_in, n_out, 2.0)]).unwrap();
        (sig, m, [n, e, f, NeuronId::new(ty, 3)])
    }

    #[test]
    fn deep_copy_variant_examples() {
        let (sig, m, [n, e, f, n2]) = base_case();
        let spec = SubgraphSpec::new("cell", BTreeSet::from([n])).unwrap();
        let fresh = m.allocate_fresh_block(&BTreeSet::new(), &BTreeSet::new(), spec.neurons());
        assert_eq!(fresh[&n], n2);
        let (n_in, n_out) = io(&sig, n);
        let (n2_in, n2_out) = io(&sig, n2);
        let (_, e_out) = io(&sig, e);
        let (f_in, _) = io(&sig, f);

        let v1 = deep_copy(&m, &sig, &spec, &fresh, CopyVariant::V1).unwrap();
        let added = deep_copy_delta(&m, &sig, &spec, &fresh, CopyVariant::V1).unwrap();
        assert_eq!(added, NetworkMatrix::from_entries([(n2_in, n2_out, 0.5)]).unwrap());
        assert_eq!(v1.len(), 4);

        let v2 = deep_copy(&m, &sig, &spec, &fresh, CopyVariant::V2).unwrap();
        assert_eq!(v2.get(n2_in, n2_out), 0.5);
        assert_eq!(v2.get(n2_in, e_out), 1.0);
        assert_eq!(v2.get(f_in, n2_out), 0.0);
        assert_eq!(v2.get(n2_in, n_out), 0.0);
        assert_eq!(v2.get(n_in, n2_out), 0.0);

        let v3 = deep_copy(&m, &sig, &spec, &fresh, CopyVariant::V3).unwrap();
        assert_eq!(v3.get(f_in, n2_out), 2.0);
        assert_eq!(v3.get(f_in, n_out), 2.0);

        let v4 = deep_copy(&m, &sig, &spec, &fresh, CopyVariant::v4(0.25).unwrap()).unwrap();
        assert_eq!(v4.get(f_in, n2_out), 0.5);
        assert_eq!(v4.get(f_in, n_out), 1.5);
        assert_eq!(v4.get(n_in, n_out), 0.5);
        assert_eq!(v4.get(n2_in, e_out), 1.0);
    }

    #[test]
    fn deep_copy_rejects_used_target() {
        let (sig, m, [n, e, _, _]) = base_case();
        let spec = SubgraphSpec::new("cell", BTreeSet::from([n])).unwrap();
        let fresh = BTreeMap::from([(n, e)]);
        assert_eq!(
            deep_copy(&m, &sig, &spec, &fresh, CopyVariant::V1),
            Err(ReflectionError::NotFresh(e))
        );
        assert!(SubgraphSpec::new("x", BTreeSet::new()).is_err());
        assert!(CopyVariant::v4(1.5).is_err());
        assert!(CopyVariant::from_number(7, None).is_err());
    }

    #[test]
    fn from_masks_requires_whole_neurons() {
        let (sig, ty) = sig_with_ids();
        let n = NeuronId::new(ty, 0);
        let (n_in, n_out) = io(&sig, n);
        let rows = RowMask::from_entries([(n_in, 1.0)]).unwrap();
        let cols = ColumnMask::from_entries([(n_out, 1.0)]).unwrap();
        let spec = SubgraphSpec::from_masks(&sig, "s", &rows, &cols).unwrap();
        assert_eq!(spec.neurons(), &BTreeSet::from([n]));
        assert_eq!(
            SubgraphSpec::from_masks(&sig, "s", &rows, &ColumnMask::new()),
            Err(ReflectionError::PartialNeuron(n))
        );
    }

    #[test]
    fn nested_compose_examples() {
        let (sig, m, [n, ..]) = base_case();
        let none = BTreeSet::new();
        let (same, maps) = nested_copy_compose(&m, &sig, &[], &none, &none).unwrap();
        assert_eq!(same, m);
        assert!(maps.is_empty());

        let step = CopyStep {
            name: "c".into(),
            members: vec![Member::Neuron(n)],
            variant: CopyVariant::V1,
        };
        let (twice, maps) = nested_copy_compose(&m, &sig, &[step.clone(), step], &none, &none).unwrap();
        let (a, b) = (maps[0][&n], maps[1][&n]);
        assert_ne!(a, b);
        let (a_in, a_out) = io(&sig, a);
        let (b_in, b_out) = io(&sig, b);
        assert_eq!(twice.get(a_in, a_out), 0.5);
        assert_eq!(twice.get(b_in, b_out), 0.5);
        assert_eq!(twice.len(), m.len() + 2);
    }
}
