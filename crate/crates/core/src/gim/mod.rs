//! Linear orderings, the generalized intersection matrices they induce, and
//! the Lösung quadratic form.

mod cycles;
mod search;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, SkewMatrix};

pub use cycles::{chordless_cycles, ordering_satisfies_parity, ChordlessCycle};
pub use search::{
    admissible_ordering_from_tree, brute_force_ordering_search, construct_admissible_ordering,
    find_admissible_ordering, spanning_trees, BRUTE_FORCE_MAX_RANK,
};

/// A linear order `≺` on `0..n`, stored as the position of each index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering {
    rank: Vec<usize>,
}

impl Ordering {
    /// `0 ≺ 1 ≺ … ≺ n-1`.
    pub fn natural(n: usize) -> Self {
        Self {
            rank: (0..n).collect(),
        }
    }

    /// Builds the ordering whose smallest element is `chain[0]`.
    pub fn from_chain(chain: &[usize]) -> Result<Self> {
        let n = chain.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, &i) in chain.iter().enumerate() {
            if i >= n || rank[i] != usize::MAX {
                return Err(Error::InvalidOrdering(format!(
                    "chain {chain:?} is not a permutation of 0..{n}"
                )));
            }
            rank[i] = pos;
        }
        Ok(Self { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Position of `i` along `≺`.
    pub fn position(&self, i: usize) -> usize {
        self.rank[i]
    }

    /// `i ≺ j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.rank[i] < self.rank[j]
    }

    /// Indices listed from smallest to largest.
    pub fn chain(&self) -> Vec<usize> {
        let mut chain = vec![0; self.rank.len()];
        for (i, &p) in self.rank.iter().enumerate() {
            chain[p] = i;
        }
        chain
    }
}

impl fmt::Display for Ordering {
    /// One-based chain notation, e.g. `4<3<1<5<2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chain().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", parts.join("<"))
    }
}

impl fmt::Debug for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordering({self})")
    }
}

impl FromStr for Ordering {
    type Err = Error;

    /// Parses one-based chains written with `<` (ascending) or `>`
    /// (descending), e.g. `"1<2<3"` or `"1>2>3"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sep, descending) = match (s.contains('<'), s.contains('>')) {
            (true, true) => {
                return Err(Error::InvalidOrdering(format!(
                    "mixed '<' and '>' in {s:?}"
                )))
            }
            (_, true) => ('>', true),
            _ => ('<', false),
        };
        let mut chain = Vec::new();
        for part in s.split(sep) {
            let label: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidOrdering(format!("bad index {part:?} in {s:?}")))?;
            if label == 0 {
                return Err(Error::InvalidOrdering("indices are one-based".into()));
            }
            chain.push(label - 1);
        }
        if descending {
            chain.reverse();
        }
        Self::from_chain(&chain)
    }
}

/// A symmetrizable generalized intersection matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gim {
    a: IntMatrix,
    d: Vec<BigInt>,
    ordering: Option<Ordering>,
}

impl Gim {
    /// The GIM induced by `o`: `a_ij = b_ij` if `i ≺ j`, `2` on the diagonal,
    /// `-b_ij` if `i ≻ j`.
    pub fn from_ordering(b: &SkewMatrix, o: &Ordering) -> Result<Self> {
        let n = b.rank();
        if o.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: o.len(),
            });
        }
        let mut a = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = if i == j {
                    BigInt::from(2)
                } else if o.precedes(i, j) {
                    b.entry(i, j).clone()
                } else {
                    -b.entry(i, j)
                };
            }
        }
        Ok(Self {
            a,
            d: b.d().to_vec(),
            ordering: Some(o.clone()),
        })
    }

    /// Wraps an arbitrary matrix after checking the GIM axioms and that `AD`
    /// is symmetric.
    pub fn from_matrix(a: IntMatrix, d: Vec<BigInt>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || d.len() != n {
            return Err(Error::InvalidInput(
                "GIM must be square and match its symmetrizer".into(),
            ));
        }
        for i in 0..n {
            if a[(i, i)] != BigInt::from(2) {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry {} is not 2",
                    i + 1
                )));
            }
            for j in 0..n {
                if a[(i, j)].signum() != a[(j, i)].signum() {
                    return Err(Error::InvalidInput(format!(
                        "entries ({},{}) and ({},{}) differ in sign",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
                if &a[(i, j)] * &d[j] != &a[(j, i)] * &d[i] {
                    return Err(Error::InvalidInput("AD is not symmetric".into()));
                }
            }
        }
        Ok(Self {
            a,
            d,
            ordering: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.a[(i, j)]
    }

    pub fn d(&self) -> &[BigInt] {
        &self.d
    }

    pub fn ordering(&self) -> Option<&Ordering> {
        self.ordering.as_ref()
    }

    /// `Σ d_j a_ij m_i m_j`.
    pub fn quadratic_form(&self, m: &[BigInt]) -> Result<BigInt> {
        let n = self.rank();
        if m.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: m.len(),
            });
        }
        let mut q = BigInt::zero();
        for i in 0..n {
            if m[i].is_zero() {
                continue;
            }
            for j in 0..n {
                q += &self.d[j] * &self.a[(i, j)] * &m[i] * &m[j];
            }
        }
        Ok(q)
    }

    /// Checks the Lösung condition `q(m) = 2 d_k`.
    pub fn is_loesung(&self, m: &[BigInt]) -> Result<LoesungVerdict> {
        let q = self.quadratic_form(m)?;
        let k = (0..self.rank()).find(|&k| q == &self.d[k] * 2);
        Ok(LoesungVerdict {
            k,
            positive: m.iter().all(|x| !x.is_negative()),
        })
    }

    /// `π(s_i)`: row `j` is `λ_j - a_ji λ_i`, so only column `i` differs
    /// from the identity.
    pub fn s_matrix(&self, i: usize) -> IntMatrix {
        let n = self.rank();
        let mut m = IntMatrix::identity(n);
        for j in 0..n {
            m[(j, i)] -= &self.a[(j, i)];
        }
        m
    }

    /// `π(e_i)`: the projection onto `λ_i`.
    pub fn e_matrix(&self, i: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank(), self.rank());
        m[(i, i)] = BigInt::from(1);
        m
    }

    /// Every `k` with `q(m) = 2 d_k`.
    pub fn loesung_indices(&self, m: &[BigInt]) -> Result<Vec<usize>> {
        let q = self.quadratic_form(m)?;
        Ok((0..self.rank()).filter(|&k| q == &self.d[k] * 2).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoesungVerdict {
    /// Smallest `k` with `q(m) = 2 d_k`.
    pub k: Option<usize>,
    pub positive: bool,
}

impl LoesungVerdict {
    pub fn is_loesung(&self) -> bool {
        self.k.is_some()
    }
}

/// All `n!` orderings of `0..n`, in lexicographic order of their chains.
pub fn all_orderings(n: usize) -> impl Iterator<Item = Ordering> {
    use itertools::Itertools;
    (0..n)
        .permutations(n)
        .map(|chain| Ordering::from_chain(&chain).expect("permutation"))
}
