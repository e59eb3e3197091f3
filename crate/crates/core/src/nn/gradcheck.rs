use super::{Graph, NnError, ParamStore, Var};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    /// `max |g - ĝ| / max(1e-8, |g| + |ĝ|)` over all entries.
    pub max_rel_error: f64,
    /// Parameter name and entry index of the worst entry.
    pub worst: Option<(String, usize)>,
    pub entries: usize,
}

/// Compares reverse-mode gradients of the scalar built by `f` against
/// central differences `(f(θ+ε) − f(θ−ε)) / 2ε` for every parameter entry.
///
/// `f` must be deterministic given the store.
pub fn grad_check<T, F>(store: &mut ParamStore<T>, f: F, eps: f64) -> Result<GradCheckReport, NnError>
where
    T: Scalar,
    F: Fn(&mut Graph<'_, T>) -> Result<Var, NnError>,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(NnError::InvalidArgument(format!("finite-difference step must be positive, got {eps}")));
    }
    let eval = |store: &ParamStore<T>| -> Result<T, NnError> {
        let mut g = Graph::new(store);
        let root = f(&mut g)?;
        g.scalar(root)
    };

    let analytic = {
        let mut g = Graph::new(store);
        let root = f(&mut g)?;
        let v = g.scalar(root)?;
        if !v.is_finite() {
            return Err(NnError::InvalidArgument("function value is not finite".into()));
        }
        g.backward(root)?
    };

    let ids: Vec<_> = store.iter().map(|(id, _)| id).collect();
    let h = T::lit(eps);
    let mut report = GradCheckReport { max_rel_error: 0.0, worst: None, entries: 0 };
    for id in ids {
        let name = store.get(id).name.clone();
        for k in 0..store.get(id).len() {
            let orig = store.value(id)[k];
            store.value_mut(id)[k] = orig + h;
            let plus = eval(store);
            store.value_mut(id)[k] = orig - h;
            let minus = eval(store);
            store.value_mut(id)[k] = orig;
            let (plus, minus) = (plus?, minus?);
            if !plus.is_finite() || !minus.is_finite() {
                return Err(NnError::NonFinite { param: name, index: k });
            }
            let numeric = (plus - minus).as_f64() / (2.0 * eps);
            let exact = analytic.get(id).map_or(0.0, |g| g[k].as_f64());
            if !exact.is_finite() {
                return Err(NnError::NonFinite { param: name, index: k });
            }
            let rel = (exact - numeric).abs() / (exact.abs() + numeric.abs()).max(1e-8);
            report.entries += 1;
            if rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst = Some((name.clone(), k));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_step_rejected() {
        let mut s = ParamStore::<f64>::new();
        s.add("x", 1, 1, Init::Constant(1.0), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let r = grad_check(&mut s, |g| Ok(g.zeros(1)), 0.0);
        assert!(matches!(r, Err(NnError::InvalidArgument(_))));
    }

    #[test]
    fn overflow_names_parameter() {
        let mut s = ParamStore::<f64>::new();
        let id = s.add("huge", 1, 1, Init::Constant(700.0), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let r = grad_check(
            &mut s,
            |g| {
                let x = g.param(id);
                let y = g.scale(x, 2.5e305);
                g.mul(y, x)
            },
            1e-5,
        );
        assert!(r.is_err());
    }

    #[test]
    fn smooth_product_agrees() {
        let mut s = ParamStore::<f64>::new();
        let id = s.add("x", 1, 1, Init::Constant(0.3), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let r = grad_check(
            &mut s,
            |g| {
                let x = g.param(id);
                let t = g.tanh(x);
                g.mul(t, x)
            },
            1e-5,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-8);
        assert_eq!(r.entries, 1);
        assert_eq!(s.value(id), &[0.3]);
    }
}
