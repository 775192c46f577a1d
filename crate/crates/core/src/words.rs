//! Reduced words in the universal Coxeter group, the free product of `n`
//! copies of `Z/2Z`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gim::Gim;
use crate::matrix::IntMatrix;

/// Default node cap for [`search_pi_equivalent`].
pub const DEFAULT_SEARCH_NODES: usize = 1_000_000;

/// A reduced word: no two adjacent letters are equal. Letters are zero-based.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Self(vec![i])
    }

    /// Cancels adjacent equal pairs. A stack gives the unique normal form.
    pub fn new(letters: impl IntoIterator<Item = usize>) -> Self {
        let mut out: Vec<usize> = Vec::new();
        for x in letters {
            if out.last() == Some(&x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Self(out)
    }

    /// Like [`Word::new`] but rejects letters outside `0..n`.
    pub fn reduce(letters: &[usize], n: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                rank: n,
            });
        }
        Ok(Self::new(letters.iter().copied()))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(&other.0).copied())
    }

    /// `g s_i g⁻¹`.
    pub fn conjugate(g: &Self, i: usize) -> Self {
        Self::new(
            g.0.iter()
                .copied()
                .chain([i])
                .chain(g.0.iter().rev().copied()),
        )
    }

    /// Odd-length palindrome.
    pub fn is_reflection(&self) -> bool {
        self.0.len() % 2 == 1 && self.0.iter().eq(self.0.iter().rev())
    }

    /// `π(u)` for the word `u = s_{u_1} ⋯ s_{u_m}`, as the matrix `M` with
    /// `u(v) = v·M`. Since the rightmost letter acts first,
    /// `M = π(s_{u_m}) ⋯ π(s_{u_1})`.
    pub fn pi(&self, gim: &Gim) -> IntMatrix {
        let mut m = IntMatrix::identity(gim.rank());
        for &x in &self.0 {
            m = &gim.s_matrix(x) * &m;
        }
        m
    }

    /// Letters as a compact one-based digit string, e.g. `34132423143`.
    /// Only meaningful for rank at most 9.
    pub fn to_digits(&self) -> String {
        self.0.iter().map(|x| (x + 1).to_string()).collect()
    }
}

impl fmt::Display for Word {
    /// One-based comma-separated letters; the empty word prints as `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `3,4,1`, `3 4 1` or the digit string `341`. The result is
    /// reduced.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Self::empty());
        }
        let labels: Vec<usize> = if s.contains([',', ' ']) {
            s.split([',', ' '])
                .filter(|p| !p.is_empty())
                .map(|p| p.trim().parse().map_err(|_| bad_word(s)))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| bad_word(s))
                })
                .collect::<Result<_>>()?
        };
        if labels.contains(&0) {
            return Err(Error::InvalidInput("word letters are one-based".into()));
        }
        Ok(Self::new(labels.into_iter().map(|x| x - 1)))
    }
}

fn bad_word(s: &str) -> Error {
    Error::InvalidInput(format!("cannot parse word {s:?}"))
}

/// All reduced words of length at most `max_len` with `π(u) = π(target)`,
/// sorted by length and then lexicographically.
///
/// Depth-first over the tree of reduced words; every visited word counts
/// against `node_cap`.
pub fn search_pi_equivalent(
    target: &Word,
    gim: &Gim,
    max_len: usize,
    node_cap: usize,
) -> Result<Vec<Word>> {
    let n = gim.rank();
    if let Some(bad) = target.letters().iter().find(|&&x| x >= n) {
        return Err(Error::IndexOutOfRange {
            index: *bad,
            rank: n,
        });
    }
    let goal = target.pi(gim);
    let gens: Vec<IntMatrix> = (0..n).map(|i| gim.s_matrix(i)).collect();
    let mut found = Vec::new();
    let mut nodes = 0usize;
    // Stack of (word, π(word)).
    let mut stack = vec![(Vec::<usize>::new(), IntMatrix::identity(n))];
    while let Some((word, m)) = stack.pop() {
        nodes += 1;
        if nodes > node_cap {
            return Err(Error::SearchBudgetExceeded(node_cap));
        }
        if m == goal {
            found.push(Word(word.clone()));
        }
        if word.len() == max_len {
            continue;
        }
        for (x, g) in gens.iter().enumerate() {
            if word.last() == Some(&x) {
                continue;
            }
            let mut next = word.clone();
            next.push(x);
            stack.push((next, g * &m));
        }
    }
    found.sort_by(|a, b| (a.len(), &a.0).cmp(&(b.len(), &b.0)));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gim::{all_orderings, Ordering};
    use crate::matrix::SkewMatrix;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(Word::reduce(&[1, 1], 3).unwrap().is_empty());
        assert_eq!(Word::reduce(&[2, 3, 3, 2, 0], 4).unwrap(), Word::letter(0));
        assert_eq!(w("2,3,2").letters(), &[1, 2, 1]);
        assert!(Word::reduce(&[0, 5], 3).is_err());
    }

    #[test]
    fn reflections() {
        assert!(w("232").is_reflection());
        assert!(!Word::empty().is_reflection());
        assert!(!w("12").is_reflection());
    }

    #[test]
    fn conjugation() {
        assert_eq!(Word::conjugate(&Word::empty(), 2), w("3"));
        assert_eq!(Word::conjugate(&w("2"), 2), w("232"));
        assert_eq!(Word::conjugate(&w("32123"), 1), w("32123232123"));
        // Cancellation against the middle letter.
        assert_eq!(Word::conjugate(&w("12"), 1), w("121"));
    }

    #[test]
    fn concatenation() {
        assert!(w("1").concat(&w("1")).is_empty());
        assert!(w("23").concat(&w("32")).is_empty());
        assert_eq!(w("13").concat(&w("2")), w("132"));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("3,4,1").to_string(), "3,4,1");
        assert_eq!(w("3 4 1"), w("341"));
        assert_eq!(w("341").to_digits(), "341");
        assert_eq!(Word::empty().to_string(), "e");
        assert!("0,1".parse::<Word>().is_err());
        assert!("1,x".parse::<Word>().is_err());
    }

    fn ex26() -> SkewMatrix {
        SkewMatrix::from_rows(&[
            vec![0, -2, -2, 3],
            vec![2, 0, 4, 2],
            vec![2, -4, 0, -1],
            vec![-3, -2, 1, 0],
        ])
        .unwrap()
    }

    #[test]
    fn braid_of_length_six_is_trivial_under_every_gim() {
        let b = ex26();
        let u = w("343434");
        for o in all_orderings(4) {
            let g = Gim::from_ordering(&b, &o).unwrap();
            assert!(u.pi(&g).is_identity(), "{o}");
        }
    }

    #[test]
    fn pi_of_word_matches_sequential_action() {
        let b = ex26();
        let g = Gim::from_ordering(&b, &Ordering::natural(4)).unwrap();
        let u = w("1243");
        let mut expected = IntMatrix::identity(4);
        // v·M_u = s1(s2(s4(s3(v)))): apply s3 first.
        for &x in u.letters().iter().rev() {
            expected = &expected * &g.s_matrix(x);
        }
        assert_eq!(u.pi(&g), expected);
    }

    #[test]
    fn search_finds_trivial_representatives() {
        let g = Gim::from_ordering(&ex26(), &Ordering::natural(4)).unwrap();
        let found = search_pi_equivalent(&w("1"), &g, 3, DEFAULT_SEARCH_NODES).unwrap();
        assert_eq!(found[0], w("1"));
        let found = search_pi_equivalent(&w("343434"), &g, 2, DEFAULT_SEARCH_NODES).unwrap();
        assert_eq!(found[0], Word::empty());
        assert!(matches!(
            search_pi_equivalent(&w("1"), &g, 6, 10),
            Err(Error::SearchBudgetExceeded(10))
        ));
    }
}
