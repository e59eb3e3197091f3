//! Maximum spanning arborescence decoding (Chu-Liu/Edmonds) with a
//! single-root constraint.

use super::ModelError;
use crate::Scalar;

/// Arc scores for an `n`-token sentence: entry `(h, d)` scores head `h`
/// (0 is the root) for dependent `d` in `1..=n`. Column 0 and the diagonal
/// are never read. `-inf` marks an arc as unavailable.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> ScoreMatrix<T> {
    pub fn new(n: usize) -> Self {
        ScoreMatrix { n, data: vec![T::zero(); (n + 1) * (n + 1)] }
    }

    /// Builds from a row-major `(n+1) × (n+1)` closure.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::new(n);
        for h in 0..=n {
            for d in 0..=n {
                m.data[h * (n + 1) + d] = f(h, d);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, h: usize, d: usize) -> T {
        self.data[h * (self.n + 1) + d]
    }

    pub fn set(&mut self, h: usize, d: usize, v: T) {
        self.data[h * (self.n + 1) + d] = v;
    }

    /// Sum of the arcs of a head assignment, added in dependent order.
    pub fn tree_score(&self, heads: &[usize]) -> T {
        heads.iter().enumerate().fold(T::zero(), |acc, (i, &h)| acc + self.get(h, i + 1))
    }
}

#[derive(Clone, Copy, Debug)]
struct Edge<T> {
    from: usize,
    to: usize,
    w: T,
}

/// Maximum spanning arborescence over `n_nodes` rooted at node 0. Returns,
/// for each node except the root, the index into `edges` of its chosen
/// incoming edge, or `None` if some node cannot be reached.
fn arborescence<T: Scalar>(n_nodes: usize, edges: &[Edge<T>]) -> Option<Vec<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; n_nodes];
    for (i, e) in edges.iter().enumerate() {
        if e.to == 0 || e.from == e.to {
            continue;
        }
        let better = match best[e.to] {
            None => true,
            Some(j) => e.w > edges[j].w || (e.w == edges[j].w && e.from < edges[j].from),
        };
        if better {
            best[e.to] = Some(i);
        }
    }
    if best.iter().skip(1).any(Option::is_none) {
        return None;
    }
    let parent = |v: usize| edges[best[v].unwrap()].from;

    // find a cycle among the greedy choices
    let mut mark = vec![usize::MAX; n_nodes];
    let mut cycle = None;
    for start in 1..n_nodes {
        let mut v = start;
        while v != 0 && mark[v] == usize::MAX {
            mark[v] = start;
            v = parent(v);
        }
        if v != 0 && mark[v] == start {
            let mut members = vec![v];
            let mut u = parent(v);
            while u != v {
                members.push(u);
                u = parent(u);
            }
            cycle = Some(members);
            break;
        }
    }
    let Some(cycle) = cycle else {
        return Some(best.into_iter().skip(1).map(Option::unwrap).collect());
    };

    // contract the cycle into a single node `c`
    let mut in_cycle = vec![false; n_nodes];
    for &v in &cycle {
        in_cycle[v] = true;
    }
    let mut map = vec![0; n_nodes];
    let mut next = 0;
    for v in 0..n_nodes {
        if !in_cycle[v] {
            map[v] = next;
            next += 1;
        }
    }
    let c = next;
    for &v in &cycle {
        map[v] = c;
    }
    let mut sub = Vec::new();
    let mut origin = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        let (u, v) = (map[e.from], map[e.to]);
        if u == v {
            continue;
        }
        let w = if in_cycle[e.to] { e.w - edges[best[e.to].unwrap()].w } else { e.w };
        sub.push(Edge { from: u, to: v, w });
        origin.push(i);
    }
    let chosen = arborescence(c + 1, &sub)?;

    // expand: the edge entering `c` breaks the cycle at its target
    let mut result: Vec<Option<usize>> = vec![None; n_nodes];
    for k in chosen {
        let e = origin[k];
        result[edges[e].to] = Some(e);
    }
    for &v in &cycle {
        if result[v].is_none() {
            result[v] = best[v];
        }
    }
    Some(result.into_iter().skip(1).map(Option::unwrap).collect())
}

fn decode_edges<T: Scalar>(scores: &ScoreMatrix<T>, root_child: Option<usize>) -> Option<Vec<usize>> {
    let n = scores.n();
    let mut edges = Vec::with_capacity(n * n);
    for d in 1..=n {
        for h in 0..=n {
            if h == d || (h == 0 && root_child.is_some_and(|r| r != d)) {
                continue;
            }
            let w = scores.get(h, d);
            if w.is_finite() {
                edges.push(Edge { from: h, to: d, w });
            }
        }
    }
    let chosen = arborescence(n + 1, &edges)?;
    let mut heads = vec![0; n];
    for e in chosen {
        heads[edges[e].to - 1] = edges[e].from;
    }
    Some(heads)
}

/// Highest-scoring dependency tree with exactly one token attached to the
/// root. Returns `heads[d-1]` for every dependent `d`.
///
/// When the unconstrained optimum has several root children, every token is
/// tried as the sole root child and the best resulting tree kept; ties go to
/// the lowest root child. Greedy ties inside the algorithm go to the lowest
/// head.
pub fn decode_tree<T: Scalar>(scores: &ScoreMatrix<T>) -> Result<Vec<usize>, ModelError> {
    let n = scores.n();
    if n == 0 {
        return Err(ModelError::Decode("cannot decode an empty sentence".into()));
    }
    for h in 0..=n {
        for d in 1..=n {
            let w = scores.get(h, d);
            if h != d && (w.is_nan() || w == T::infinity()) {
                return Err(ModelError::Decode(format!("arc {h} -> {d} has score {w}")));
            }
        }
    }
    let no_tree = || ModelError::Decode("no spanning tree over the available arcs".into());
    let free = decode_edges(scores, None).ok_or_else(no_tree)?;
    if free.iter().filter(|&&h| h == 0).count() == 1 {
        return Ok(free);
    }
    let mut best: Option<(T, Vec<usize>)> = None;
    for r in 1..=n {
        if !scores.get(0, r).is_finite() {
            continue;
        }
        if let Some(heads) = decode_edges(scores, Some(r)) {
            let s = scores.tree_score(&heads);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, heads));
            }
        }
    }
    best.map(|(_, h)| h).ok_or_else(no_tree)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// True if `heads` is a tree rooted at 0 with a single root child.
    pub(crate) fn is_single_root_tree(heads: &[usize]) -> bool {
        let n = heads.len();
        if heads.iter().filter(|&&h| h == 0).count() != 1 {
            return false;
        }
        (1..=n).all(|start| {
            let mut v = start;
            for _ in 0..=n {
                if v == 0 {
                    return true;
                }
                v = heads[v - 1];
            }
            false
        })
    }

    /// Exhaustive search over all single-root trees; best total score.
    pub(crate) fn brute_force<T: Scalar>(s: &ScoreMatrix<T>) -> Option<T> {
        let n = s.n();
        let mut heads = vec![0; n];
        let mut best: Option<T> = None;
        loop {
            let valid = heads.iter().enumerate().all(|(i, &h)| h != i + 1 && s.get(h, i + 1).is_finite());
            if valid && is_single_root_tree(&heads) {
                let t = s.tree_score(&heads);
                if best.is_none_or(|b| t > b) {
                    best = Some(t);
                }
            }
            // odometer over {0..n}^n
            let mut k = 0;
            loop {
                if k == n {
                    return best;
                }
                heads[k] += 1;
                if heads[k] <= n {
                    break;
                }
                heads[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn single_token() {
        assert_eq!(decode_tree(&ScoreMatrix::<f64>::new(1)).unwrap(), vec![0]);
        assert!(decode_tree(&ScoreMatrix::<f64>::new(0)).is_err());
    }

    #[test]
    fn three_token_tie_goes_to_lower_root_child() {
        let ninf = f64::NEG_INFINITY;
        let mut s = ScoreMatrix::from_fn(3, |_, _| ninf);
        for (h, d, w) in [(0, 1, 10.0), (0, 2, 10.0), (0, 3, 0.0), (1, 2, 9.0), (1, 3, 8.0), (2, 1, 9.0), (2, 3, 8.0)] {
            s.set(h, d, w);
        }
        let heads = decode_tree(&s).unwrap();
        assert_eq!(heads, vec![0, 1, 1]);
        assert_eq!(s.tree_score(&heads), 27.0);
        assert_eq!(brute_force(&s), Some(27.0));
    }

    #[test]
    fn constant_matrix_gives_canonical_tree() {
        let heads = decode_tree(&ScoreMatrix::from_fn(4, |_, _| 0.5f64)).unwrap();
        assert_eq!(heads, vec![0, 1, 1, 1]);
    }

    #[test]
    fn cycle_is_broken() {
        // 1 and 2 prefer each other; root reaches them weakly
        let mut s = ScoreMatrix::from_fn(2, |_, _| f64::NEG_INFINITY);
        s.set(0, 1, 1.0);
        s.set(0, 2, 2.0);
        s.set(1, 2, 10.0);
        s.set(2, 1, 10.0);
        assert_eq!(decode_tree(&s).unwrap(), vec![2, 0]);
    }

    #[test]
    fn unreachable_or_nan_errors() {
        let mut s = ScoreMatrix::from_fn(2, |_, _| f64::NEG_INFINITY);
        s.set(1, 2, 1.0);
        assert!(decode_tree(&s).is_err());
        let mut s = ScoreMatrix::<f32>::new(2);
        s.set(0, 1, f32::NAN);
        assert!(decode_tree(&s).is_err());
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..400 {
            let n = rng.gen_range(1..=6);
            // integer scores exercise ties, continuous ones the general case
            let s = if trial % 2 == 0 {
                ScoreMatrix::from_fn(n, |_, _| rng.gen_range(-3..=3) as f64)
            } else {
                ScoreMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
            };
            let heads = decode_tree(&s).unwrap();
            assert!(is_single_root_tree(&heads), "{heads:?}");
            assert_eq!(Some(s.tree_score(&heads)), brute_force(&s), "trial {trial}: {s:?}");
        }
    }

    #[test]
    fn column_shift_keeps_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(1..=7);
            let s = ScoreMatrix::from_fn(n, |_, _| rng.gen_range(-4..=4) as f64);
            let d = rng.gen_range(1..=n);
            let c = rng.gen_range(-5..=5) as f64;
            let mut t = s.clone();
            for h in 0..=n {
                t.set(h, d, s.get(h, d) + c);
            }
            assert_eq!(decode_tree(&s).unwrap(), decode_tree(&t).unwrap());
        }
    }
}
