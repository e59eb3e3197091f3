use std::fmt;

use super::Sentence;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A structural problem found in a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Token at `position` (0-based) carries `found` instead of `position + 1`.
    NonContiguousId { position: usize, found: usize },
    EmptyForm { token: usize },
    HeadOutOfRange { token: usize, head: usize },
    SelfLoop { token: usize },
    /// Tokens on a head cycle, ascending.
    Cycle { tokens: Vec<usize> },
    NoRoot,
    /// Several tokens attach to 0. Allowed in gold data, hence a warning.
    MultipleRoots { tokens: Vec<usize> },
    BadRange { start: usize, end: usize },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::MultipleRoots { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonContiguousId { position, found } => write!(
                f,
                "token ids not contiguous: expected {} but found {found}",
                position + 1
            ),
            Violation::EmptyForm { token } => write!(f, "token {token} has an empty form"),
            Violation::HeadOutOfRange { token, head } => {
                write!(f, "token {token} has head {head} outside the sentence")
            }
            Violation::SelfLoop { token } => write!(f, "token {token} is its own head"),
            Violation::Cycle { tokens } => write!(f, "head cycle through tokens {tokens:?}"),
            Violation::NoRoot => write!(f, "no token attaches to the root"),
            Violation::MultipleRoots { tokens } => {
                write!(f, "multiple tokens attach to the root: {tokens:?}")
            }
            Violation::BadRange { start, end } => {
                write!(f, "multiword range {start}-{end} is empty or out of bounds")
            }
        }
    }
}

/// Reports every violation of the sentence's tree invariants.
///
/// A missing root is only reported when no cycle was found, since a
/// rootless functional graph always contains one.
pub fn validate_sentence(s: &Sentence) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.tokens.len();

    for (pos, tok) in s.tokens.iter().enumerate() {
        if tok.id != pos + 1 {
            out.push(Violation::NonContiguousId { position: pos, found: tok.id });
        }
        if tok.form.is_empty() {
            out.push(Violation::EmptyForm { token: pos + 1 });
        }
    }
    for r in &s.ranges {
        if r.start >= r.end || r.start == 0 || r.end > n {
            out.push(Violation::BadRange { start: r.start, end: r.end });
        }
    }

    // Heads indexed by position; ids may be broken, so positions are the
    // identity used below.
    let heads: Vec<usize> = s.tokens.iter().map(|t| t.head).collect();
    let mut in_range = vec![true; n];
    for (pos, &h) in heads.iter().enumerate() {
        let id = pos + 1;
        if h > n {
            out.push(Violation::HeadOutOfRange { token: id, head: h });
            in_range[pos] = false;
        } else if h == id {
            out.push(Violation::SelfLoop { token: id });
            in_range[pos] = false;
        }
    }

    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if state[cur] == 1 {
                let from = path.iter().position(|&p| p == cur).unwrap();
                let mut cyc: Vec<usize> = path[from..].iter().map(|&p| p + 1).collect();
                cyc.sort_unstable();
                cycles.push(cyc);
                break;
            }
            if state[cur] == 2 {
                break;
            }
            state[cur] = 1;
            path.push(cur);
            let h = heads[cur];
            if h == 0 || !in_range[cur] {
                break;
            }
            cur = h - 1;
        }
        for p in path {
            state[p] = 2;
        }
    }
    let found_cycle = !cycles.is_empty();
    out.extend(cycles.into_iter().map(|tokens| Violation::Cycle { tokens }));

    let roots: Vec<usize> = heads
        .iter()
        .enumerate()
        .filter(|(_, &h)| h == 0)
        .map(|(p, _)| p + 1)
        .collect();
    if n > 0 && roots.is_empty() && !found_cycle {
        out.push(Violation::NoRoot);
    }
    if roots.len() > 1 {
        out.push(Violation::MultipleRoots { tokens: roots });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Token;

    fn sentence(heads: &[usize]) -> Sentence {
        Sentence {
            tokens: heads
                .iter()
                .enumerate()
                .map(|(i, &h)| Token::new(i + 1, format!("w{i}"), "X", h, "dep"))
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn chain_is_valid() {
        assert!(validate_sentence(&sentence(&[0, 1, 2])).is_empty());
    }

    #[test]
    fn two_cycle_reported_once() {
        let v = validate_sentence(&sentence(&[2, 1]));
        assert_eq!(v, vec![Violation::Cycle { tokens: vec![1, 2] }]);
    }

    #[test]
    fn head_past_end() {
        let v = validate_sentence(&sentence(&[0, 3]));
        assert_eq!(v, vec![Violation::HeadOutOfRange { token: 2, head: 3 }]);
    }

    #[test]
    fn self_loop() {
        let v = validate_sentence(&sentence(&[0, 2]));
        assert_eq!(v, vec![Violation::SelfLoop { token: 2 }]);
    }

    #[test]
    fn multiple_roots_is_a_warning() {
        let v = validate_sentence(&sentence(&[0, 0, 1]));
        assert_eq!(v, vec![Violation::MultipleRoots { tokens: vec![1, 2] }]);
        assert!(!v[0].is_error());
    }

    #[test]
    fn cycle_hanging_off_a_rooted_part() {
        let v = validate_sentence(&sentence(&[0, 3, 4, 2]));
        assert_eq!(v, vec![Violation::Cycle { tokens: vec![2, 3, 4] }]);
    }

    #[test]
    fn rootless_out_of_range() {
        let v = validate_sentence(&sentence(&[5]));
        assert!(v.contains(&Violation::NoRoot));
        assert!(v.contains(&Violation::HeadOutOfRange { token: 1, head: 5 }));
    }

    #[test]
    fn broken_ids() {
        let mut s = sentence(&[0, 1]);
        s.tokens[1].id = 3;
        let v = validate_sentence(&s);
        assert_eq!(v, vec![Violation::NonContiguousId { position: 1, found: 3 }]);
    }
}
