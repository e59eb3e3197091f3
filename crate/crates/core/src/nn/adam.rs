use super::{Gradients, NnError, ParamStore};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// One bias-corrected Adam step over every parameter.
///
/// Dense parameters without a gradient are updated with a zero gradient.
/// Row-sparse parameters (embedding tables) only update rows that received
/// gradient. The step count is incremented once per call.
pub fn adam_update<T: Scalar>(store: &mut ParamStore<T>, grads: &Gradients<T>, cfg: &AdamConfig) -> Result<(), NnError> {
    if grads.len() != store.len() {
        return Err(NnError::Shape(format!(
            "gradients cover {} parameters, store has {}",
            grads.len(),
            store.len()
        )));
    }
    for (id, p) in store.iter() {
        if grads.shape(id) != (p.rows, p.cols) || grads.get(id).is_some_and(|g| g.len() != p.len()) {
            return Err(NnError::Shape(format!("gradient shape mismatch for `{}`", p.name)));
        }
    }
    let t = store.bump_step() as i32;
    let (b1, b2) = (T::lit(cfg.beta1), T::lit(cfg.beta2));
    let (one_b1, one_b2) = (T::one() - b1, T::one() - b2);
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    let lr = T::lit(cfg.lr);
    let eps = T::lit(cfg.eps);

    let ids: Vec<_> = store.iter().map(|(id, _)| id).collect();
    for (id, p) in ids.into_iter().zip(store.params_mut()) {
        let g = grads.get(id);
        let cols = p.cols;
        let sparse = p.sparse;
        let n = p.len();
        let (value, m, v) = p.moments_mut();
        let mut update = |k: usize| {
            let gk = g.map_or(T::zero(), |g| g[k]);
            m[k] = b1 * m[k] + one_b1 * gk;
            v[k] = b2 * v[k] + one_b2 * gk * gk;
            let mhat = m[k] / c1;
            let vhat = v[k] / c2;
            value[k] -= lr * mhat / (vhat.sqrt() + eps);
        };
        if sparse {
            if let Some(rows) = grads.touched_rows(id) {
                for &r in rows {
                    (r * cols..(r + 1) * cols).for_each(&mut update);
                }
            }
        } else {
            (0..n).for_each(&mut update);
        }
    }
    store.all_finite()
}
