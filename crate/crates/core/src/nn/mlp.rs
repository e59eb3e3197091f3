use rand::Rng;

use super::{Graph, Init, NnError, ParamId, ParamStore, Var};
use crate::Scalar;

/// One-hidden-layer perceptron with a tanh hidden layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlpParams {
    pub d_in: usize,
    pub d_hidden: usize,
    pub d_out: usize,
    pub w1: ParamId,
    pub b1: ParamId,
    pub w2: ParamId,
    pub b2: ParamId,
}

impl MlpParams {
    pub fn new<T: Scalar, R: Rng>(
        store: &mut ParamStore<T>,
        prefix: &str,
        d_in: usize,
        d_hidden: usize,
        d_out: usize,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        Ok(MlpParams {
            d_in,
            d_hidden,
            d_out,
            w1: store.add(&format!("{prefix}.w1"), d_hidden, d_in, Init::Glorot, rng)?,
            b1: store.add(&format!("{prefix}.b1"), d_hidden, 1, Init::Constant(0.0), rng)?,
            w2: store.add(&format!("{prefix}.w2"), d_out, d_hidden, Init::Glorot, rng)?,
            b2: store.add(&format!("{prefix}.b2"), d_out, 1, Init::Constant(0.0), rng)?,
        })
    }

    pub fn from_store<T: Scalar>(store: &ParamStore<T>, prefix: &str) -> Result<Self, NnError> {
        let find = |s: &str| {
            let name = format!("{prefix}.{s}");
            store.id(&name).ok_or(NnError::UnknownParam(name))
        };
        let (w1, b1, w2, b2) = (find("w1")?, find("b1")?, find("w2")?, find("b2")?);
        let (p1, p2) = (store.get(w1), store.get(w2));
        let m = MlpParams { d_in: p1.cols, d_hidden: p1.rows, d_out: p2.rows, w1, b1, w2, b2 };
        let ok = p2.cols == m.d_hidden
            && (store.get(b1).rows, store.get(b1).cols) == (m.d_hidden, 1)
            && (store.get(b2).rows, store.get(b2).cols) == (m.d_out, 1);
        if !ok {
            return Err(NnError::Shape(format!("inconsistent MLP `{prefix}`")));
        }
        Ok(m)
    }

    /// `W2 · tanh(W1 · x + b1) + b2`.
    pub fn forward<T: Scalar>(&self, g: &mut Graph<'_, T>, x: Var) -> Result<Var, NnError> {
        let pre = g.affine(self.w1, self.b1, x)?;
        let h = g.tanh(pre);
        self.output(g, h)
    }

    /// Output layer applied to an already activated hidden vector.
    pub fn output<T: Scalar>(&self, g: &mut Graph<'_, T>, hidden: Var) -> Result<Var, NnError> {
        g.affine(self.w2, self.b2, hidden)
    }

    /// First-layer contribution of an input block starting at column `col`,
    /// without bias. For an input `[a; b]`, `W1·[a; b] = block(a, 0) + block(b, len(a))`.
    pub fn block<T: Scalar>(&self, g: &mut Graph<'_, T>, x: Var, col: usize) -> Result<Var, NnError> {
        g.linear(self.w1, col, x)
    }

    pub fn num_values(&self) -> usize {
        self.d_hidden * (self.d_in + 1) + self.d_out * (self.d_hidden + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn block_decomposition_matches_full_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s = ParamStore::<f64>::new();
        let m = MlpParams::new(&mut s, "m", 6, 5, 1, &mut rng).unwrap();
        let mut g = Graph::new(&s);
        let a = g.input(vec![0.1, 0.2, -0.3]);
        let b = g.input(vec![1.0, -1.0, 0.5]);
        let ab = g.concat(&[a, b]);
        let full = m.forward(&mut g, ab).unwrap();

        let pa = m.block(&mut g, a, 0).unwrap();
        let pb = m.block(&mut g, b, 3).unwrap();
        let bias = g.param(m.b1);
        let pre = g.sum(&[pa, pb, bias]).unwrap();
        let h = g.tanh(pre);
        let split = m.output(&mut g, h).unwrap();
        assert!((g.value(full)[0] - g.value(split)[0]).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_input() {
        let mut s = ParamStore::<f32>::new();
        let m = MlpParams::new(&mut s, "m", 4, 3, 2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut g = Graph::new(&s);
        let x = g.input(vec![0.0; 5]);
        assert!(m.forward(&mut g, x).is_err());
        assert_eq!(MlpParams::from_store(&s, "m").unwrap(), m);
    }
}
