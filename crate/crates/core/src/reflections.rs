//! Reflection words `r_i^w = g_i^w s_i (g_i^w)⁻¹` attached to a mutation
//! sequence, and the l-vectors `l_i^w = g_i^w(α_i)`.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gim::Gim;
use crate::matrix::{IntMatrix, Seed, SkewMatrix};
use crate::words::Word;

/// Default cap on reflection word length.
pub const DEFAULT_WORD_CAP: usize = 10_000;

/// Reflection words carried along a mutation sequence, in lockstep with the
/// seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionState {
    pub seed: Seed,
    pub r: Vec<Word>,
    pub g: Vec<Word>,
    word_cap: usize,
}

impl ReflectionState {
    pub fn initial(base: &SkewMatrix) -> Self {
        let n = base.rank();
        Self {
            seed: Seed::initial(base),
            r: (0..n).map(Word::letter).collect(),
            g: vec![Word::empty(); n],
            word_cap: DEFAULT_WORD_CAP,
        }
    }

    pub fn with_word_cap(mut self, cap: usize) -> Self {
        self.word_cap = cap;
        self
    }

    pub fn rank(&self) -> usize {
        self.r.len()
    }

    /// Mutation at `k`: whenever `b_ik c_k > 0`, `r_i ← r_k r_i r_k` with
    /// `g_i ← r_k g_i`, normalised so that `r_i = g_i s_i g_i⁻¹` is reduced as
    /// written.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.rank();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, rank: n });
        }
        let mut next = self.clone();
        for i in 0..n {
            if i != k && self.seed.bc_positive(i, k)? {
                let mut g = self.r[k].concat(&self.g[i]);
                // Keep g_i as the left half of r_i: `g' s_i` and `g'` conjugate
                // s_i to the same reflection.
                if g.last() == Some(i) {
                    g = g.concat(&Word::letter(i));
                }
                let r = Word::conjugate(&g, i);
                if r.len() > self.word_cap {
                    return Err(Error::WordBudgetExceeded {
                        len: r.len(),
                        cap: self.word_cap,
                    });
                }
                next.g[i] = g;
                next.r[i] = r;
            }
        }
        next.seed = self.seed.mutate(k)?;
        Ok(next)
    }

    /// `l_i = g_i(α_i)` under the representation of `gim`.
    pub fn l_matrix(&self, gim: &Gim) -> IntMatrix {
        let n = self.rank();
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            let m = self.g[i].pi(gim);
            out.set_row(i, m.row(i));
        }
        out
    }
}

/// Reflection words after applying `w` to `[B | I]`.
pub fn reflection_state(base: &SkewMatrix, w: &[usize]) -> Result<ReflectionState> {
    reflection_state_capped(base, w, DEFAULT_WORD_CAP)
}

pub fn reflection_state_capped(
    base: &SkewMatrix,
    w: &[usize],
    word_cap: usize,
) -> Result<ReflectionState> {
    let mut state = ReflectionState::initial(base).with_word_cap(word_cap);
    for &k in w {
        state = state.mutate(k)?;
    }
    Ok(state)
}

/// Row-by-row comparison of two L-matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowSign {
    Plus,
    Minus,
    Mismatch,
}

pub fn compare_l_up_to_row_sign(x: &IntMatrix, y: &IntMatrix) -> Vec<RowSign> {
    (0..x.nrows())
        .map(|i| {
            let (a, b) = (x.row(i), y.row(i));
            if a == b {
                RowSign::Plus
            } else if a.iter().zip(b).all(|(p, q)| p == &-q) {
                RowSign::Minus
            } else {
                RowSign::Mismatch
            }
        })
        .collect()
}

/// Largest rank accepted by [`product_factorization_scan`].
pub const FACTORIZATION_MAX_RANK: usize = 6;

/// Pairs `(σ, σ̃)` with `r_σ(1) ⋯ r_σ(n)` equal to `s_σ̃(1) ⋯ s_σ̃(n)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub word_equal: Vec<(Vec<usize>, Vec<usize>)>,
    pub pi_equal: Vec<(Vec<usize>, Vec<usize>)>,
}

impl FactorizationReport {
    pub fn is_empty(&self) -> bool {
        self.word_equal.is_empty() && self.pi_equal.is_empty()
    }
}

/// Compares every ordered product of the `r_i` with every ordered product of
/// the `s_i`, as reduced words and under `π` for `gim`.
pub fn product_factorization_scan(
    state: &ReflectionState,
    gim: &Gim,
) -> Result<FactorizationReport> {
    let n = state.rank();
    if n > FACTORIZATION_MAX_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            limit: FACTORIZATION_MAX_RANK,
        });
    }
    let coxeter: Vec<(Vec<usize>, Word, IntMatrix)> = (0..n)
        .permutations(n)
        .map(|p| {
            let w = Word::new(p.iter().copied());
            let m = w.pi(gim);
            (p, w, m)
        })
        .collect();
    let mut report = FactorizationReport::default();
    for sigma in (0..n).permutations(n) {
        let prod = sigma
            .iter()
            .fold(Word::empty(), |acc, &i| acc.concat(&state.r[i]));
        let m = prod.pi(gim);
        for (tilde, w, mw) in &coxeter {
            if &prod == w {
                report.word_equal.push((sigma.clone(), tilde.clone()));
            }
            if &m == mw {
                report.pi_equal.push((sigma.clone(), tilde.clone()));
            }
        }
    }
    Ok(report)
}

/// `π(r_i)` for every `i`.
pub fn pi_reflections(state: &ReflectionState, gim: &Gim) -> Vec<IntMatrix> {
    state.r.iter().map(|r| r.pi(gim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gim::Ordering;
    use crate::matrix::int_vec;

    fn cyclic3() -> SkewMatrix {
        SkewMatrix::from_rows(&[vec![0, 3, -3], vec![-2, 0, 2], vec![2, -2, 0]]).unwrap()
    }

    fn seq(s: &str) -> Vec<usize> {
        s.chars()
            .map(|c| c.to_digit(10).unwrap() as usize - 1)
            .collect()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn empty_sequence() {
        let st = reflection_state(&cyclic3(), &[]).unwrap();
        assert_eq!(st.r, vec![w("1"), w("2"), w("3")]);
        assert!(st.g.iter().all(Word::is_empty));
    }

    #[test]
    fn example_one_six_words_and_l_vectors() {
        let st = reflection_state(&cyclic3(), &seq("23212")).unwrap();
        assert_eq!(st.r[0], w("32123232123232123"));
        assert_eq!(st.r[1], w("32123232123"));
        assert_eq!(st.r[2], w("232"));
        let g = Gim::from_ordering(&cyclic3(), &"1>2>3".parse::<Ordering>().unwrap()).unwrap();
        let l = st.l_matrix(&g);
        assert_eq!(
            l.to_row_vecs(),
            vec![
                int_vec(&[5, 18, 15]),
                int_vec(&[2, 7, 6]),
                int_vec(&[0, 2, 1])
            ]
        );
        for i in 0..3 {
            assert_eq!(g.quadratic_form(l.row(i)).unwrap(), &g.d()[i] * 2);
        }
    }

    fn torus() -> SkewMatrix {
        SkewMatrix::from_rows(&[
            vec![0, -1, -1, 2],
            vec![1, 0, 1, -1],
            vec![1, -1, 0, -1],
            vec![-2, 1, 1, 0],
        ])
        .unwrap()
    }

    #[test]
    fn dreaded_torus_words() {
        let st = reflection_state(&torus(), &seq("234213")).unwrap();
        assert_eq!(
            st.r[0],
            w(&["13", "24232423", "1", "32423242", "31"].concat())
        );
        assert_eq!(
            st.r[1],
            w(&["13", "24232423", "2", "32423242", "31"].concat())
        );
        assert_eq!(st.r[2], w("13242324231"));
        assert_eq!(st.r[3], w("2324232"));
    }

    #[test]
    fn torus_l_matrices_agree_up_to_sign() {
        let g = Gim::from_ordering(&torus(), &Ordering::natural(4)).unwrap();
        let sw = reflection_state(&torus(), &seq("341343")).unwrap();
        let sv = reflection_state(&torus(), &seq("413413")).unwrap();
        assert_eq!(sw.seed.cw, sv.seed.cw);
        let lw = sw.l_matrix(&g);
        let expected =
            IntMatrix::from_rows(&[[1, 0, -1, -1], [-1, 1, 0, 1], [2, 0, 0, -3], [-3, 0, 0, 4]])
                .unwrap();
        assert_eq!(lw, expected);
        use RowSign::*;
        assert_eq!(
            compare_l_up_to_row_sign(&lw, &sv.l_matrix(&g)),
            vec![Minus, Plus, Minus, Plus]
        );
        for i in 0..4 {
            assert_eq!(sw.r[i].pi(&g), sv.r[i].pi(&g));
        }
    }

    #[test]
    fn row_sign_comparison() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        let b = IntMatrix::from_rows(&[vec![-1, 0], vec![0, 1]]).unwrap();
        let c = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(compare_l_up_to_row_sign(&a, &a), vec![RowSign::Plus; 2]);
        assert_eq!(
            compare_l_up_to_row_sign(&a, &b),
            vec![RowSign::Minus, RowSign::Plus]
        );
        assert_eq!(compare_l_up_to_row_sign(&a, &c), vec![RowSign::Mismatch; 2]);
    }

    #[test]
    fn mutation_twice_restores_words() {
        let b = cyclic3();
        let st = reflection_state(&b, &seq("231")).unwrap();
        for k in 0..3 {
            let back = st.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!(back.r, st.r);
        }
    }

    #[test]
    fn factorization_trivial_cases() {
        let b = SkewMatrix::from_rows(&[vec![0]]).unwrap();
        let st = reflection_state(&b, &[]).unwrap();
        let g = Gim::from_ordering(&b, &Ordering::natural(1)).unwrap();
        assert_eq!(
            product_factorization_scan(&st, &g)
                .unwrap()
                .word_equal
                .len(),
            1
        );
        let b = SkewMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let st = reflection_state(&b, &[]).unwrap();
        let g = Gim::from_ordering(&b, &Ordering::natural(2)).unwrap();
        let rep = product_factorization_scan(&st, &g).unwrap();
        assert!(rep.word_equal.contains(&(vec![0, 1], vec![0, 1])));
        assert!(rep.word_equal.contains(&(vec![1, 0], vec![1, 0])));
    }

    #[test]
    fn factorization_rank_guard() {
        let rows: Vec<Vec<i64>> = vec![vec![0; 7]; 7];
        let b = SkewMatrix::from_rows(&rows).unwrap();
        let st = reflection_state(&b, &[]).unwrap();
        let g = Gim::from_ordering(&b, &Ordering::natural(7)).unwrap();
        assert!(matches!(
            product_factorization_scan(&st, &g),
            Err(Error::RankTooLarge { .. })
        ));
    }
}
