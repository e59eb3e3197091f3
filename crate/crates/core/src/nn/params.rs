use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use super::NnError;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    /// Uniform in ±sqrt(6 / (rows + cols)).
    Glorot,
    Constant(f64),
}

/// A named row-major array and its Adam moment accumulators.
#[derive(Clone, Debug, PartialEq)]
pub struct Param<T> {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub value: Vec<T>,
    /// Only rows that received gradient are updated (embedding tables).
    pub sparse: bool,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> Param<T> {
    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.value[r * self.cols..(r + 1) * self.cols]
    }
}

/// All learned arrays of a model, addressed by name or id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore<T> {
    params: Vec<Param<T>>,
    by_name: HashMap<String, ParamId>,
    step: u64,
}

impl<T: Scalar> ParamStore<T> {
    pub fn new() -> Self {
        ParamStore { params: Vec::new(), by_name: HashMap::new(), step: 0 }
    }

    fn push(&mut self, name: &str, rows: usize, cols: usize, value: Vec<T>, sparse: bool) -> Result<ParamId, NnError> {
        if rows == 0 || cols == 0 {
            return Err(NnError::Shape(format!("parameter `{name}` has zero-sized shape {rows}x{cols}")));
        }
        if self.by_name.contains_key(name) {
            return Err(NnError::DuplicateParam(name.to_string()));
        }
        let id = ParamId(self.params.len());
        let n = rows * cols;
        self.params.push(Param {
            name: name.to_string(),
            rows,
            cols,
            value,
            sparse,
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Adds a dense parameter.
    pub fn add<R: Rng>(&mut self, name: &str, rows: usize, cols: usize, init: Init, rng: &mut R) -> Result<ParamId, NnError> {
        let value = match init {
            Init::Glorot => {
                let a = (6.0 / (rows + cols) as f64).sqrt();
                (0..rows * cols).map(|_| T::lit(rng.gen_range(-a..a))).collect()
            }
            Init::Constant(c) => vec![T::lit(c); rows * cols],
        };
        self.push(name, rows, cols, value, false)
    }

    /// Adds an embedding table updated row-sparsely.
    pub fn add_lookup<R: Rng>(&mut self, name: &str, rows: usize, cols: usize, rng: &mut R) -> Result<ParamId, NnError> {
        let id = self.add(name, rows, cols, Init::Glorot, rng)?;
        self.params[id.0].sparse = true;
        Ok(id)
    }

    /// Adds a parameter with explicit values.
    pub fn add_values(&mut self, name: &str, rows: usize, cols: usize, value: Vec<T>) -> Result<ParamId, NnError> {
        if value.len() != rows * cols {
            return Err(NnError::Shape(format!(
                "parameter `{name}`: {} values for shape {rows}x{cols}",
                value.len()
            )));
        }
        self.push(name, rows, cols, value, false)
    }

    pub(crate) fn set_sparse(&mut self, id: ParamId, sparse: bool) {
        self.params[id.0].sparse = sparse;
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: ParamId) -> &Param<T> {
        &self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &[T] {
        &self.params[id.0].value
    }

    /// Mutable values; the shape stays fixed.
    pub fn value_mut(&mut self, id: ParamId) -> &mut [T] {
        &mut self.params[id.0].value
    }

    /// Replaces values by name, checking the shape.
    pub fn set_values(&mut self, name: &str, rows: usize, cols: usize, value: Vec<T>) -> Result<(), NnError> {
        let id = self.id(name).ok_or_else(|| NnError::UnknownParam(name.to_string()))?;
        let p = &mut self.params[id.0];
        if p.rows != rows || p.cols != cols || value.len() != rows * cols {
            return Err(NnError::Shape(format!(
                "parameter `{name}` is {}x{}, got {rows}x{cols}",
                p.rows, p.cols
            )));
        }
        p.value = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Param<T>)> {
        self.params.iter().enumerate().map(|(i, p)| (ParamId(i), p))
    }

    /// Number of arrays.
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar entries.
    pub fn num_values(&self) -> usize {
        self.params.iter().map(Param::len).sum()
    }

    /// Number of optimizer steps taken.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn all_finite(&self) -> Result<(), NnError> {
        for p in &self.params {
            if let Some(i) = p.value.iter().position(|x| !x.is_finite()) {
                return Err(NnError::NonFinite { param: p.name.clone(), index: i });
            }
        }
        Ok(())
    }

    pub(crate) fn params_mut(&mut self) -> &mut [Param<T>] {
        &mut self.params
    }

    pub(crate) fn bump_step(&mut self) -> u64 {
        self.step += 1;
        self.step
    }
}

impl<T: Scalar> Param<T> {
    pub(crate) fn moments_mut(&mut self) -> (&mut [T], &mut [T], &mut [T]) {
        (&mut self.value, &mut self.m, &mut self.v)
    }
}

/// Accumulated gradients, one slot per parameter of a store.
#[derive(Clone, Debug)]
pub struct Gradients<T> {
    slots: Vec<Option<Vec<T>>>,
    rows: Vec<Option<BTreeSet<usize>>>,
    shapes: Vec<(usize, usize)>,
}

impl<T: Scalar> Gradients<T> {
    pub fn new(store: &ParamStore<T>) -> Self {
        Gradients {
            slots: vec![None; store.len()],
            rows: vec![None; store.len()],
            shapes: store.iter().map(|(_, p)| (p.rows, p.cols)).collect(),
        }
    }

    /// Number of parameter slots.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn shape(&self, id: ParamId) -> (usize, usize) {
        self.shapes[id.0]
    }

    pub fn get(&self, id: ParamId) -> Option<&[T]> {
        self.slots[id.0].as_deref()
    }

    /// Rows touched so far, if any gradient reached this parameter.
    pub fn touched_rows(&self, id: ParamId) -> Option<&BTreeSet<usize>> {
        self.rows[id.0].as_ref()
    }

    pub(crate) fn slot(&mut self, id: ParamId) -> &mut Vec<T> {
        let (r, c) = self.shapes[id.0];
        self.slots[id.0].get_or_insert_with(|| vec![T::zero(); r * c])
    }

    pub(crate) fn mark_rows(&mut self, id: ParamId, rows: impl IntoIterator<Item = usize>) {
        self.rows[id.0].get_or_insert_with(BTreeSet::new).extend(rows);
    }

    /// Sets a full gradient for a parameter.
    pub fn set(&mut self, id: ParamId, grad: Vec<T>) -> Result<(), NnError> {
        let (r, c) = self.shapes[id.0];
        if grad.len() != r * c {
            return Err(NnError::Shape(format!("gradient has {} entries, parameter has {}", grad.len(), r * c)));
        }
        self.slots[id.0] = Some(grad);
        self.mark_rows(id, 0..r);
        Ok(())
    }
}
