//! A tape of vector operations with reverse-mode differentiation.
//!
//! Values are dense vectors; matrices only exist as parameters and enter
//! through [`Graph::linear`] and [`Graph::row`]. Every operation checks its
//! operand shapes and fails instead of broadcasting.

use super::{Gradients, NnError, ParamId, ParamStore};
use crate::Scalar;

/// Handle to a node on the tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Clone, Debug)]
enum Op<T> {
    Input,
    Param(ParamId),
    Row(ParamId, usize),
    Linear { w: ParamId, col: usize, x: Var },
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Offset(Var),
    Sum(Vec<Var>),
    Concat(Vec<Var>),
    Slice(Var, usize),
    Tanh(Var),
    Sigmoid(Var),
    /// Scalar `logsumexp(x) - x[gold]`; `aux` holds softmax(x).
    CrossEntropy(Var, usize),
    Scale(Var, T),
}

struct Node<T> {
    op: Op<T>,
    value: Vec<T>,
    aux: Vec<T>,
}

pub struct Graph<'s, T> {
    store: &'s ParamStore<T>,
    nodes: Vec<Node<T>>,
}

impl<'s, T: Scalar> Graph<'s, T> {
    pub fn new(store: &'s ParamStore<T>) -> Self {
        Graph { store, nodes: Vec::new() }
    }

    pub fn store(&self) -> &'s ParamStore<T> {
        self.store
    }

    pub fn value(&self, v: Var) -> &[T] {
        &self.nodes[v.0].value
    }

    /// The single entry of a length-1 node.
    pub fn scalar(&self, v: Var) -> Result<T, NnError> {
        match self.value(v) {
            [x] => Ok(*x),
            other => Err(NnError::Shape(format!("expected a scalar, found length {}", other.len()))),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op<T>, value: Vec<T>) -> Var {
        self.nodes.push(Node { op, value, aux: Vec::new() });
        Var(self.nodes.len() - 1)
    }

    fn same_len(&self, a: Var, b: Var, what: &str) -> Result<usize, NnError> {
        let (la, lb) = (self.value(a).len(), self.value(b).len());
        if la != lb {
            return Err(NnError::Shape(format!("{what}: operand lengths {la} and {lb} differ")));
        }
        Ok(la)
    }

    /// A constant vector.
    pub fn input(&mut self, value: Vec<T>) -> Var {
        self.push(Op::Input, value)
    }

    pub fn zeros(&mut self, n: usize) -> Var {
        self.input(vec![T::zero(); n])
    }

    /// A whole parameter flattened to a vector (used for biases and single vectors).
    pub fn param(&mut self, id: ParamId) -> Var {
        let value = self.store.value(id).to_vec();
        self.push(Op::Param(id), value)
    }

    /// One row of a parameter matrix, e.g. an embedding lookup.
    pub fn row(&mut self, id: ParamId, r: usize) -> Result<Var, NnError> {
        let p = self.store.get(id);
        if r >= p.rows {
            return Err(NnError::Shape(format!("row {r} out of range for `{}` with {} rows", p.name, p.rows)));
        }
        let value = p.row(r).to_vec();
        Ok(self.push(Op::Row(id, r), value))
    }

    /// `W[:, col .. col + len(x)] · x`.
    pub fn linear(&mut self, w: ParamId, col: usize, x: Var) -> Result<Var, NnError> {
        let p = self.store.get(w);
        let xv = &self.nodes[x.0].value;
        let n = xv.len();
        if col + n > p.cols {
            return Err(NnError::Shape(format!(
                "`{}` has {} columns, cannot multiply block [{col}, {}) ",
                p.name,
                p.cols,
                col + n
            )));
        }
        let mut out = Vec::with_capacity(p.rows);
        for r in 0..p.rows {
            let row = &p.value[r * p.cols + col..r * p.cols + col + n];
            out.push(row.iter().zip(xv).fold(T::zero(), |acc, (&a, &b)| acc + a * b));
        }
        Ok(self.push(Op::Linear { w, col, x }, out))
    }

    /// `W · x + b`.
    pub fn affine(&mut self, w: ParamId, b: ParamId, x: Var) -> Result<Var, NnError> {
        if self.store.get(w).cols != self.value(x).len() {
            return Err(NnError::Shape(format!(
                "`{}` expects input length {}, got {}",
                self.store.get(w).name,
                self.store.get(w).cols,
                self.value(x).len()
            )));
        }
        let wx = self.linear(w, 0, x)?;
        let b = self.param(b);
        self.add(wx, b)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.same_len(a, b, "add")?;
        let v = self.value(a).iter().zip(self.value(b)).map(|(&x, &y)| x + y).collect();
        Ok(self.push(Op::Add(a, b), v))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.same_len(a, b, "sub")?;
        let v = self.value(a).iter().zip(self.value(b)).map(|(&x, &y)| x - y).collect();
        Ok(self.push(Op::Sub(a, b), v))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.same_len(a, b, "mul")?;
        let v = self.value(a).iter().zip(self.value(b)).map(|(&x, &y)| x * y).collect();
        Ok(self.push(Op::Mul(a, b), v))
    }

    /// Adds a constant to every entry.
    pub fn offset(&mut self, a: Var, c: T) -> Var {
        let v = self.value(a).iter().map(|&x| x + c).collect();
        self.push(Op::Offset(a), v)
    }

    pub fn scale(&mut self, a: Var, c: T) -> Var {
        let v = self.value(a).iter().map(|&x| x * c).collect();
        self.push(Op::Scale(a, c), v)
    }

    /// Elementwise sum of equally long vectors.
    pub fn sum(&mut self, xs: &[Var]) -> Result<Var, NnError> {
        let first = *xs.first().ok_or_else(|| NnError::Shape("sum of no operands".into()))?;
        let mut acc = self.value(first).to_vec();
        for &x in &xs[1..] {
            self.same_len(first, x, "sum")?;
            for (a, &b) in acc.iter_mut().zip(&self.nodes[x.0].value) {
                *a += b;
            }
        }
        Ok(self.push(Op::Sum(xs.to_vec()), acc))
    }

    pub fn concat(&mut self, xs: &[Var]) -> Var {
        let mut v = Vec::with_capacity(xs.iter().map(|x| self.value(*x).len()).sum());
        for x in xs {
            v.extend_from_slice(self.value(*x));
        }
        self.push(Op::Concat(xs.to_vec()), v)
    }

    pub fn slice(&mut self, a: Var, start: usize, len: usize) -> Result<Var, NnError> {
        let src = self.value(a);
        if start + len > src.len() {
            return Err(NnError::Shape(format!("slice [{start}, {}) of length {}", start + len, src.len())));
        }
        let v = src[start..start + len].to_vec();
        Ok(self.push(Op::Slice(a, start), v))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let v = self.value(a).iter().map(|x| x.tanh_s()).collect();
        self.push(Op::Tanh(a), v)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let v = self.value(a).iter().map(|&x| x.sigmoid_s()).collect();
        self.push(Op::Sigmoid(a), v)
    }

    /// Softmax cross-entropy of `scores` against class `gold`, as a scalar.
    pub fn cross_entropy(&mut self, scores: Var, gold: usize) -> Result<Var, NnError> {
        let s = self.value(scores);
        if gold >= s.len() {
            return Err(NnError::Shape(format!("gold class {gold} outside {} scores", s.len())));
        }
        let max = s.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = s.iter().map(|&x| (x - max).exp_s()).collect();
        let z = exps.iter().fold(T::zero(), |a, &e| a + e);
        let loss = max + z.ln_s() - s[gold];
        let probs = exps.into_iter().map(|e| e / z).collect();
        let v = self.push(Op::CrossEntropy(scores, gold), vec![loss]);
        self.nodes[v.0].aux = probs;
        Ok(v)
    }

    /// Gradients of the scalar `root` with respect to every parameter.
    pub fn backward(&self, root: Var) -> Result<Gradients<T>, NnError> {
        if self.value(root).len() != 1 {
            return Err(NnError::Shape("backward needs a scalar root".into()));
        }
        let mut grads = Gradients::new(self.store);
        let mut adj: Vec<Option<Vec<T>>> = vec![None; root.0 + 1];
        adj[root.0] = Some(vec![T::one()]);

        fn acc<T: Scalar>(adj: &mut [Option<Vec<T>>], v: Var, len: usize) -> &mut Vec<T> {
            adj[v.0].get_or_insert_with(|| vec![T::zero(); len])
        }

        for i in (0..=root.0).rev() {
            let Some(g) = adj[i].take() else { continue };
            let node = &self.nodes[i];
            let len_of = |v: Var| self.nodes[v.0].value.len();
            match &node.op {
                Op::Input => {}
                Op::Param(id) => {
                    let slot = grads.slot(*id);
                    for (s, &d) in slot.iter_mut().zip(&g) {
                        *s += d;
                    }
                    let rows = self.store.get(*id).rows;
                    grads.mark_rows(*id, 0..rows);
                }
                Op::Row(id, r) => {
                    let cols = self.store.get(*id).cols;
                    let slot = grads.slot(*id);
                    for (s, &d) in slot[r * cols..(r + 1) * cols].iter_mut().zip(&g) {
                        *s += d;
                    }
                    grads.mark_rows(*id, [*r]);
                }
                Op::Linear { w, col, x } => {
                    let p = self.store.get(*w);
                    let xv = &self.nodes[x.0].value;
                    let n = xv.len();
                    {
                        let gx = acc(&mut adj, *x, n);
                        for (r, &gr) in g.iter().enumerate() {
                            if gr == T::zero() {
                                continue;
                            }
                            let row = &p.value[r * p.cols + col..r * p.cols + col + n];
                            for (a, &wv) in gx.iter_mut().zip(row) {
                                *a += gr * wv;
                            }
                        }
                    }
                    let cols = p.cols;
                    let rows = p.rows;
                    let slot = grads.slot(*w);
                    for (r, &gr) in g.iter().enumerate() {
                        if gr == T::zero() {
                            continue;
                        }
                        let dst = &mut slot[r * cols + col..r * cols + col + n];
                        for (d, &xv) in dst.iter_mut().zip(xv) {
                            *d += gr * xv;
                        }
                    }
                    grads.mark_rows(*w, 0..rows);
                }
                Op::Add(a, b) => {
                    for v in [*a, *b] {
                        for (s, &d) in acc(&mut adj, v, g.len()).iter_mut().zip(&g) {
                            *s += d;
                        }
                    }
                }
                Op::Sub(a, b) => {
                    for (s, &d) in acc(&mut adj, *a, g.len()).iter_mut().zip(&g) {
                        *s += d;
                    }
                    for (s, &d) in acc(&mut adj, *b, g.len()).iter_mut().zip(&g) {
                        *s -= d;
                    }
                }
                Op::Mul(a, b) => {
                    let (av, bv) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
                    let ga: Vec<T> = g.iter().zip(bv).map(|(&d, &y)| d * y).collect();
                    let gb: Vec<T> = g.iter().zip(av).map(|(&d, &x)| d * x).collect();
                    for (s, d) in acc(&mut adj, *a, g.len()).iter_mut().zip(ga) {
                        *s += d;
                    }
                    for (s, d) in acc(&mut adj, *b, g.len()).iter_mut().zip(gb) {
                        *s += d;
                    }
                }
                Op::Offset(a) => {
                    for (s, &d) in acc(&mut adj, *a, g.len()).iter_mut().zip(&g) {
                        *s += d;
                    }
                }
                Op::Scale(a, c) => {
                    for (s, &d) in acc(&mut adj, *a, g.len()).iter_mut().zip(&g) {
                        *s += d * *c;
                    }
                }
                Op::Sum(xs) => {
                    for x in xs {
                        for (s, &d) in acc(&mut adj, *x, g.len()).iter_mut().zip(&g) {
                            *s += d;
                        }
                    }
                }
                Op::Concat(xs) => {
                    let mut off = 0;
                    for x in xs {
                        let n = len_of(*x);
                        for (s, &d) in acc(&mut adj, *x, n).iter_mut().zip(&g[off..off + n]) {
                            *s += d;
                        }
                        off += n;
                    }
                }
                Op::Slice(a, start) => {
                    let n = len_of(*a);
                    let dst = acc(&mut adj, *a, n);
                    for (s, &d) in dst[*start..*start + g.len()].iter_mut().zip(&g) {
                        *s += d;
                    }
                }
                Op::Tanh(a) => {
                    let y = &node.value;
                    for ((s, &d), &yv) in acc(&mut adj, *a, g.len()).iter_mut().zip(&g).zip(y) {
                        *s += d * (T::one() - yv * yv);
                    }
                }
                Op::Sigmoid(a) => {
                    let y = &node.value;
                    for ((s, &d), &yv) in acc(&mut adj, *a, g.len()).iter_mut().zip(&g).zip(y) {
                        *s += d * yv * (T::one() - yv);
                    }
                }
                Op::CrossEntropy(a, gold) => {
                    let d = g[0];
                    let n = node.aux.len();
                    let dst = acc(&mut adj, *a, n);
                    for (k, (s, &p)) in dst.iter_mut().zip(&node.aux).enumerate() {
                        let ind = if k == *gold { T::one() } else { T::zero() };
                        *s += d * (p - ind);
                    }
                }
            }
        }
        Ok(grads)
    }
}
