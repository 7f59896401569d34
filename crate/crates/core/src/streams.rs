//! Linear streams: the value kinds that flow along connections and the
//! linear-combination algebra each of them supports.
//!
//! Every stream value is a finitely supported vector. Scalars are the
//! one-dimensional case; c-vectors are indexed by [`Symbol`]; matrices, rows
//! and columns of the network matrix are indexed by ports. All sparse kinds
//! share [`Sparse`], which never stores an exact zero, so equality is
//! structural and the support size is meaningful.
//!
//! Arithmetic is `f64` with two extra rules: non-finite values are rejected,
//! and negative zero is folded into positive zero. With those rules IEEE
//! arithmetic gives `0*x == 0`, `1*x == x` and `x + 0 == x` bit-exactly.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::matrix::{ColumnMask, NetworkMatrix, RowMask};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StreamError {
    #[error("non-finite number {0}")]
    NonFinite(f64),
    #[error("expected a {expected} value, found {found}")]
    KindMismatch { expected: Family, found: Family },
}

/// A finite real number with negative zero folded into positive zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Scalar(f64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0.0);
    pub const ONE: Scalar = Scalar(1.0);

    pub fn new(value: f64) -> Result<Scalar, StreamError> {
        if value.is_finite() {
            Ok(Scalar(canonical(value)))
        } else {
            Err(StreamError::NonFinite(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub(crate) fn canonical(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub(crate) fn check_finite(x: f64) -> Result<f64, StreamError> {
    if x.is_finite() {
        Ok(canonical(x))
    } else {
        Err(StreamError::NonFinite(x))
    }
}

/// One coordinate of a c-vector: a character, or the end-of-string marker.
///
/// `Eos` sorts after every character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Char(char),
    Eos,
}

impl Symbol {
    /// Key used for this symbol in the JSON form of a c-vector.
    pub fn key(self) -> String {
        match self {
            Symbol::Char(c) => c.to_string(),
            Symbol::Eos => "<EOS>".to_string(),
        }
    }

    pub fn from_key(key: &str) -> Option<Symbol> {
        if key == "<EOS>" {
            return Some(Symbol::Eos);
        }
        let mut chars = key.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Some(Symbol::Char(c)),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Finitely supported vector over an ordered index set. No entry is ever
/// exactly zero and no entry is non-finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Sparse<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord> Default for Sparse<K> {
    fn default() -> Self {
        Sparse {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Sparse<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs; repeated indices are summed.
    pub fn from_entries<I>(entries: I) -> Result<Self, StreamError>
    where
        I: IntoIterator<Item = (K, f64)>,
    {
        let mut out = Sparse::new();
        for (k, v) in entries {
            out.add(k, v)?;
        }
        Ok(out)
    }

    pub fn get(&self, key: &K) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, key: &K) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.keys()
    }

    /// Adds `delta` to one coordinate, dropping it if the sum is exactly zero.
    pub fn add(&mut self, key: K, delta: f64) -> Result<(), StreamError> {
        check_finite(delta)?;
        if delta == 0.0 {
            return Ok(());
        }
        match self.entries.get_mut(&key) {
            Some(v) => {
                let sum = check_finite(*v + delta)?;
                if sum == 0.0 {
                    self.entries.remove(&key);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.entries.insert(key, delta);
            }
        }
        Ok(())
    }

    pub fn remove(&mut self, key: &K) -> Option<f64> {
        self.entries.remove(key)
    }

    /// Replaces every value with `f(key, value)`, dropping results that are zero.
    pub fn map_values<F>(&self, mut f: F) -> Result<Self, StreamError>
    where
        F: FnMut(&K, f64) -> f64,
    {
        let mut out = Sparse::new();
        for (k, v) in self.iter() {
            let nv = check_finite(f(k, v))?;
            if nv != 0.0 {
                out.entries.insert(k.clone(), nv);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, weight: f64) -> Result<Self, StreamError> {
        check_finite(weight)?;
        if weight == 0.0 {
            return Ok(Sparse::new());
        }
        self.map_values(|_, v| weight * v)
    }

    /// Weighted sum of several vectors. Exact-zero weights are skipped
    /// without touching their vectors.
    pub fn lin_comb<'a, I>(terms: I) -> Result<Self, StreamError>
    where
        I: IntoIterator<Item = (f64, &'a Self)>,
        K: 'a,
    {
        let mut out: BTreeMap<K, f64> = BTreeMap::new();
        for (w, v) in terms {
            check_finite(w)?;
            if w == 0.0 {
                continue;
            }
            for (k, x) in v.iter() {
                let c = w * x;
                out.entry(k.clone()).and_modify(|s| *s += c).or_insert(c);
            }
        }
        let mut entries = BTreeMap::new();
        for (k, v) in out {
            let v = check_finite(v)?;
            if v != 0.0 {
                entries.insert(k, v);
            }
        }
        Ok(Sparse { entries })
    }

    /// Largest absolute coordinate; zero for the empty vector.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Inner product, iterating over the smaller support.
    pub fn dot(&self, other: &Self) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = 0.0;
        for (k, v) in small.iter() {
            if let Some(w) = large.entries.get(k) {
                acc += v * w;
            }
        }
        canonical(acc)
    }

    pub(crate) fn insert_raw(&mut self, key: K, value: f64) {
        debug_assert!(value != 0.0 && value.is_finite());
        self.entries.insert(key, value);
    }
}

pub type CVector = Sparse<Symbol>;

impl CVector {
    /// 1-of-N encoding of a single symbol.
    pub fn unit(symbol: Symbol) -> CVector {
        let mut v = CVector::new();
        v.insert_raw(symbol, 1.0);
        v
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (s, v) in self.iter() {
            map.insert(s.key(), Value::from(v));
        }
        Value::Object(map)
    }
}

pub fn cvector_max_norm(v: &CVector) -> Scalar {
    Scalar(v.max_abs())
}

pub fn cvector_dot(u: &CVector, v: &CVector) -> Scalar {
    Scalar(u.dot(v))
}

/// The five families of linear streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Scalar,
    CVector,
    Matrix,
    Row,
    Column,
}

impl Family {
    pub fn zero(self) -> StreamValue {
        match self {
            Family::Scalar => StreamValue::Scalar(Scalar::ZERO),
            Family::CVector => StreamValue::CVector(CVector::new()),
            Family::Matrix => StreamValue::Matrix(NetworkMatrix::new()),
            Family::Row => StreamValue::Row(RowMask::new()),
            Family::Column => StreamValue::Column(ColumnMask::new()),
        }
    }

    /// Family implementing a `#kind` name, if the name is one the runtime knows.
    pub fn for_kind_name(name: &str) -> Option<Family> {
        Some(match name {
            "real" | "scalar" | "number" => Family::Scalar,
            "c-vector" => Family::CVector,
            "matrix" | "network-matrix" => Family::Matrix,
            "matrix-row" | "row" | "row-mask" => Family::Row,
            "matrix-column" | "column" | "column-mask" => Family::Column,
            _ => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Scalar => "scalar",
            Family::CVector => "c-vector",
            Family::Matrix => "network-matrix",
            Family::Row => "matrix-row",
            Family::Column => "matrix-column",
        })
    }
}

/// A named kind of linear stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamKind {
    pub name: String,
    pub family: Family,
}

/// One value of a linear stream.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamValue {
    Scalar(Scalar),
    CVector(CVector),
    Matrix(NetworkMatrix),
    Row(RowMask),
    Column(ColumnMask),
}

impl StreamValue {
    pub fn family(&self) -> Family {
        match self {
            StreamValue::Scalar(_) => Family::Scalar,
            StreamValue::CVector(_) => Family::CVector,
            StreamValue::Matrix(_) => Family::Matrix,
            StreamValue::Row(_) => Family::Row,
            StreamValue::Column(_) => Family::Column,
        }
    }

    pub fn scalar(x: f64) -> Result<StreamValue, StreamError> {
        Ok(StreamValue::Scalar(Scalar::new(x)?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            StreamValue::Scalar(s) => s.get() == 0.0,
            StreamValue::CVector(v) => v.is_empty(),
            StreamValue::Matrix(m) => m.is_empty(),
            StreamValue::Row(r) => r.is_empty(),
            StreamValue::Column(c) => c.is_empty(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            StreamValue::Scalar(s) => Some(s.get()),
            _ => None,
        }
    }

    pub fn as_cvector(&self) -> Option<&CVector> {
        match self {
            StreamValue::CVector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&NetworkMatrix> {
        match self {
            StreamValue::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_row(&self) -> Option<&RowMask> {
        match self {
            StreamValue::Row(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_column(&self) -> Option<&ColumnMask> {
        match self {
            StreamValue::Column(c) => Some(c),
            _ => None,
        }
    }

    pub fn scale(&self, weight: f64) -> Result<StreamValue, StreamError> {
        lin_comb(self.family(), [(weight, self)])
    }
}

/// `Σ weight_i · value_i` under the algebra of `family`. The empty sum is the
/// family's zero.
pub fn lin_comb<'a, I>(family: Family, terms: I) -> Result<StreamValue, StreamError>
where
    I: IntoIterator<Item = (f64, &'a StreamValue)>,
{
    fn pick<'a, T>(
        family: Family,
        terms: Vec<(f64, &'a StreamValue)>,
        get: impl Fn(&'a StreamValue) -> Option<&'a T>,
    ) -> Result<Vec<(f64, &'a T)>, StreamError> {
        terms
            .into_iter()
            .map(|(w, v)| {
                get(v).map(|x| (w, x)).ok_or(StreamError::KindMismatch {
                    expected: family,
                    found: v.family(),
                })
            })
            .collect()
    }

    let terms: Vec<(f64, &StreamValue)> = terms.into_iter().collect();
    Ok(match family {
        Family::Scalar => {
            let mut acc: Option<f64> = None;
            for (w, v) in terms {
                let x = v.as_scalar().ok_or(StreamError::KindMismatch {
                    expected: family,
                    found: v.family(),
                })?;
                check_finite(w)?;
                if w == 0.0 {
                    continue;
                }
                let c = w * x;
                acc = Some(match acc {
                    Some(a) => a + c,
                    None => c,
                });
            }
            StreamValue::Scalar(Scalar::new(acc.unwrap_or(0.0))?)
        }
        Family::CVector => {
            StreamValue::CVector(Sparse::lin_comb(pick(family, terms, StreamValue::as_cvector)?)?)
        }
        Family::Row => StreamValue::Row(Sparse::lin_comb(pick(family, terms, StreamValue::as_row)?)?),
        Family::Column => {
            StreamValue::Column(Sparse::lin_comb(pick(family, terms, StreamValue::as_column)?)?)
        }
        Family::Matrix => StreamValue::Matrix(NetworkMatrix::lin_comb(pick(
            family,
            terms,
            StreamValue::as_matrix,
        )?)?),
    })
}
