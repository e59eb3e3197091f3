use rand::Rng;

use super::{Graph, Init, NnError, ParamId, ParamStore, Var};
use crate::Scalar;

/// Gate order in [`LstmParams::weights`] and [`LstmParams::biases`].
pub const GATES: [&str; 4] = ["input", "forget", "output", "cell"];

/// One LSTM direction: per gate a `d_h × (d_in + d_h)` weight and a `d_h` bias.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LstmParams {
    pub d_in: usize,
    pub d_h: usize,
    pub weights: [ParamId; 4],
    pub biases: [ParamId; 4],
}

impl LstmParams {
    /// Registers the parameters as `{prefix}.w_{gate}` / `{prefix}.b_{gate}`.
    /// Weights are Glorot-initialized; biases are zero except the forget gate at 1.
    pub fn new<T: Scalar, R: Rng>(
        store: &mut ParamStore<T>,
        prefix: &str,
        d_in: usize,
        d_h: usize,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        let mut weights = Vec::with_capacity(4);
        let mut biases = Vec::with_capacity(4);
        for gate in GATES {
            weights.push(store.add(&format!("{prefix}.w_{gate}"), d_h, d_in + d_h, Init::Glorot, rng)?);
            let b = if gate == "forget" { 1.0 } else { 0.0 };
            biases.push(store.add(&format!("{prefix}.b_{gate}"), d_h, 1, Init::Constant(b), rng)?);
        }
        Ok(LstmParams {
            d_in,
            d_h,
            weights: weights.try_into().expect("four gates"),
            biases: biases.try_into().expect("four gates"),
        })
    }

    /// Looks up existing parameters by prefix and checks their shapes.
    pub fn from_store<T: Scalar>(store: &ParamStore<T>, prefix: &str) -> Result<Self, NnError> {
        let find = |name: String| store.id(&name).ok_or(NnError::UnknownParam(name));
        let mut weights = [ParamId(0); 4];
        let mut biases = [ParamId(0); 4];
        for (k, gate) in GATES.iter().enumerate() {
            weights[k] = find(format!("{prefix}.w_{gate}"))?;
            biases[k] = find(format!("{prefix}.b_{gate}"))?;
        }
        let w = store.get(weights[0]);
        let d_h = w.rows;
        let d_in = w.cols.checked_sub(d_h).filter(|&d| d > 0).ok_or_else(|| {
            NnError::Shape(format!("`{}` is {}x{}, too narrow for an LSTM", w.name, w.rows, w.cols))
        })?;
        let p = LstmParams { d_in, d_h, weights, biases };
        p.check(store)?;
        Ok(p)
    }

    fn check<T: Scalar>(&self, store: &ParamStore<T>) -> Result<(), NnError> {
        for (&w, &b) in self.weights.iter().zip(&self.biases) {
            let (w, b) = (store.get(w), store.get(b));
            if (w.rows, w.cols) != (self.d_h, self.d_in + self.d_h) || (b.rows, b.cols) != (self.d_h, 1) {
                return Err(NnError::Shape(format!("inconsistent LSTM gate `{}`", w.name)));
            }
        }
        Ok(())
    }
}

/// One LSTM cell update; returns `(h', c')`.
pub fn lstm_step<T: Scalar>(
    g: &mut Graph<'_, T>,
    p: &LstmParams,
    x: Var,
    (h, c): (Var, Var),
) -> Result<(Var, Var), NnError> {
    if g.value(x).len() != p.d_in {
        return Err(NnError::Shape(format!("LSTM input has length {}, expected {}", g.value(x).len(), p.d_in)));
    }
    if g.value(h).len() != p.d_h || g.value(c).len() != p.d_h {
        return Err(NnError::Shape(format!("LSTM state must have length {}", p.d_h)));
    }
    let xh = g.concat(&[x, h]);
    let mut pre = [xh; 4];
    for (k, slot) in pre.iter_mut().enumerate() {
        *slot = g.affine(p.weights[k], p.biases[k], xh)?;
    }
    let i = g.sigmoid(pre[0]);
    let f = g.sigmoid(pre[1]);
    let o = g.sigmoid(pre[2]);
    let cand = g.tanh(pre[3]);
    let keep = g.mul(f, c)?;
    let write = g.mul(i, cand)?;
    let c2 = g.add(keep, write)?;
    let tc = g.tanh(c2);
    let h2 = g.mul(o, tc)?;
    Ok((h2, c2))
}

/// Hidden states of a left-to-right run from a zero state.
pub fn lstm_run<T: Scalar>(g: &mut Graph<'_, T>, p: &LstmParams, seq: &[Var]) -> Result<Vec<Var>, NnError> {
    let mut state = (g.zeros(p.d_h), g.zeros(p.d_h));
    let mut out = Vec::with_capacity(seq.len());
    for &x in seq {
        state = lstm_step(g, p, x, state)?;
        out.push(state.0);
    }
    Ok(out)
}

/// Bidirectional run: output `i` is `[forward_i ; backward_i]`, length `2·d_h`.
pub fn bilstm_run<T: Scalar>(
    g: &mut Graph<'_, T>,
    fwd: &LstmParams,
    bwd: &LstmParams,
    seq: &[Var],
) -> Result<Vec<Var>, NnError> {
    if seq.is_empty() {
        return Err(NnError::EmptySequence);
    }
    let f = lstm_run(g, fwd, seq)?;
    let rev: Vec<Var> = seq.iter().rev().copied().collect();
    let mut b = lstm_run(g, bwd, &rev)?;
    b.reverse();
    Ok(f.into_iter().zip(b).map(|(x, y)| g.concat(&[x, y])).collect())
}

/// Final forward and first backward states concatenated: a fixed-size summary
/// of the whole sequence.
pub fn bilstm_summary<T: Scalar>(
    g: &mut Graph<'_, T>,
    fwd: &LstmParams,
    bwd: &LstmParams,
    seq: &[Var],
) -> Result<Var, NnError> {
    if seq.is_empty() {
        return Err(NnError::EmptySequence);
    }
    let f = lstm_run(g, fwd, seq)?;
    let rev: Vec<Var> = seq.iter().rev().copied().collect();
    let b = lstm_run(g, bwd, &rev)?;
    Ok(g.concat(&[*f.last().unwrap(), *b.last().unwrap()]))
}
