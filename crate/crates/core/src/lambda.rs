//! The recursion producing `λ_i^w`, `s_i^w`, `e_i^w` and `τ_i^w` along a
//! mutation sequence, together with the checks
//!
//! * (C1) `λ_i^w = c_i^w`,
//! * (C2) `s_i^w(λ_j^w)` and `e_i^w(λ_j^w)` are given by `B^w` and `≺`,
//! * (C3) `s_i^w ≡ r_i^w` modulo `2𝒜`,
//!
//! and the relations `Σ e_i = 1`, `e_i e_j = δ_ij e_i`, `e_i s_j`, `e_i τ_j`,
//! `s_i² = τ_i² = 1`, `s_i e_i = τ_i e_i = -e_i` at every step.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::gim::{Gim, Ordering};
use crate::matrix::{fmt_vec, row_sign, unit_vec, vec_cmp, IntMatrix, Seed, SkewMatrix, VecOrder};
use crate::reflections::ReflectionState;
use crate::words::Word;

/// Default cap on the number of terms of any algebra element.
pub const DEFAULT_TERM_CAP: usize = 100_000;

/// Factor by which intermediate products may exceed the term cap.
const PRODUCT_SLACK: usize = 10;

/// Ordered index pairs.
pub type PairSet = BTreeSet<(usize, usize)>;

/// What happened in the most recent step.
#[derive(Clone, Debug)]
pub struct Step {
    pub k: usize,
    pub p_s: PairSet,
    pub p_tau: PairSet,
    /// `τ_i` formed from the state before the step.
    pub tau: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct LambdaState {
    base: SkewMatrix,
    gim: Gim,
    pub seed: Seed,
    pub lambda: Vec<Vec<BigInt>>,
    /// `X_i e_i` with `λ_i^w = X_i(λ_i)`: the symbolic form of `λ_i^w`.
    pub expr: Vec<Element>,
    pub s: Vec<Element>,
    pub e: Vec<Element>,
    pub last: Option<Step>,
    term_cap: usize,
    check_relations: bool,
}

/// `s_k(λ_j)` compared with `λ_j` for every `j`.
fn comparisons(lambda: &[Vec<BigInt>], s_k: &IntMatrix) -> Result<Vec<VecOrder>> {
    lambda
        .iter()
        .map(|l| {
            let image = row_times(l, s_k);
            vec_cmp(l, &image)
        })
        .collect()
}

fn row_times(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    (0..m.ncols())
        .map(|j| v.iter().enumerate().map(|(i, x)| x * &m[(i, j)]).sum())
        .collect()
}

fn violation(what: impl Into<String>) -> Error {
    Error::InvariantViolation(what.into())
}

impl LambdaState {
    /// `λ_i` = unit vectors, `s_i`, `e_i` the generators, seed `[B | I]`.
    pub fn new(base: &SkewMatrix, ordering: &Ordering) -> Result<Self> {
        let gim = Gim::from_ordering(base, ordering)?;
        let n = base.rank();
        Ok(Self {
            base: base.clone(),
            gim,
            seed: Seed::initial(base),
            lambda: (0..n).map(|i| unit_vec(n, i)).collect(),
            expr: (0..n).map(|i| Element::gen_e(n, i)).collect(),
            s: (0..n).map(|i| Element::gen_s(n, i)).collect(),
            e: (0..n).map(|i| Element::gen_e(n, i)).collect(),
            last: None,
            term_cap: DEFAULT_TERM_CAP,
            check_relations: true,
        })
    }

    pub fn with_term_cap(mut self, cap: usize) -> Self {
        self.term_cap = cap;
        self
    }

    /// Turns the per-step relation checks on or off. (C1) is always checked.
    pub fn with_relation_checks(mut self, on: bool) -> Self {
        self.check_relations = on;
        self
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn gim(&self) -> &Gim {
        &self.gim
    }

    pub fn base(&self) -> &SkewMatrix {
        &self.base
    }

    fn ordering(&self) -> &Ordering {
        self.gim.ordering().expect("ordering-induced GIM")
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            return Err(Error::IndexOutOfRange {
                index: k,
                rank: self.rank(),
            });
        }
        Ok(())
    }

    /// `(P_s, P_τ)` for a step at `l` from the current state.
    pub fn pair_sets(&self, l: usize) -> Result<(PairSet, PairSet)> {
        self.check_index(l)?;
        let cmp = comparisons(&self.lambda, &self.s[l].evaluate_pi(&self.gim))?;
        self.pair_sets_from(l, &cmp)
    }

    fn pair_sets_from(&self, l: usize, cmp: &[VecOrder]) -> Result<(PairSet, PairSet)> {
        let n = self.rank();
        let o = self.ordering();
        let sign_l = row_sign(&self.lambda[l])?;
        let mut p_s = PairSet::new();
        let mut p_tau = PairSet::new();
        for i in 0..n {
            for j in 0..n {
                let between = (o.precedes(l, i) && o.precedes(i, j))
                    || (o.precedes(i, j) && o.precedes(j, l));
                if between && cmp[i] == VecOrder::Greater && cmp[j] == VecOrder::Less {
                    p_s.insert((i, j));
                    p_tau.insert((i, j));
                }
            }
        }
        for j in 0..n {
            if j == l {
                continue;
            }
            if o.precedes(j, l) && cmp[j] == VecOrder::Greater {
                if sign_l < 0 {
                    p_s.insert((l, j));
                } else {
                    p_tau.insert((l, j));
                }
            }
            if o.precedes(l, j) && cmp[j] == VecOrder::Less {
                if sign_l > 0 {
                    p_s.insert((l, j));
                } else {
                    p_tau.insert((l, j));
                }
            }
        }
        Ok((p_s, p_tau))
    }

    /// `Σ e_j` over the partners `j` of `i` in `pairs`.
    fn partner_sum(&self, pairs: &PairSet, i: usize) -> Element {
        let partners: BTreeSet<usize> = pairs
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        partners
            .iter()
            .fold(Element::zero(self.rank()), |acc, &j| &acc + &self.e[j])
    }

    /// Products may pass through partial sums far larger than the result,
    /// so they get a wider bound than the stored elements.
    fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        x.mul_capped(y, self.term_cap.saturating_mul(PRODUCT_SLACK))
    }

    /// `τ_i = s_i + 2(1 - s_i) e_{τ,i}` from the current `s` and `e`.
    pub fn make_tau(&self, p_tau: &PairSet) -> Vec<Element> {
        self.try_make_tau(p_tau).expect("term budget")
    }

    fn try_make_tau(&self, p_tau: &PairSet) -> Result<Vec<Element>> {
        let n = self.rank();
        let one = Element::one(n);
        let two = BigInt::from(2);
        (0..n)
            .map(|i| {
                let et = self.partner_sum(p_tau, i);
                Ok(&self.s[i] + &self.mul(&(&one - &self.s[i]), &et)?.scale(&two))
            })
            .collect()
    }

    /// One step of the recursion at `k`, with the seed mutated alongside.
    pub fn advance(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let n = self.rank();
        let o = self.ordering().clone();
        let one = Element::one(n);
        let two = BigInt::from(2);

        let cmp = comparisons(&self.lambda, &self.s[k].evaluate_pi(&self.gim))?;
        let (p_s, p_tau) = self.pair_sets_from(k, &cmp)?;
        let tau = self.try_make_tau(&p_tau)?;
        if self.check_relations {
            self.check_tau_relations(&tau)?;
        }
        let tk = &tau[k];
        let tk_pi = tk.evaluate_pi(&self.gim);

        let moves: Vec<bool> = (0..n)
            .map(|i| {
                i != k
                    && ((cmp[i] == VecOrder::Less && o.precedes(k, i))
                        || (cmp[i] == VecOrder::Greater && o.precedes(i, k)))
            })
            .collect();

        let mut next = self.clone();
        next.last = None;
        for i in 0..n {
            if moves[i] || i == k {
                next.lambda[i] = row_times(&self.lambda[i], &tk_pi);
                next.expr[i] = self.mul(tk, &self.expr[i])?;
            }
        }

        for i in 0..n {
            if moves[i] {
                next.e[i] = self.mul(&self.mul(tk, &self.e[i])?, tk)?;
            }
        }
        let e_plus = (0..n)
            .filter(|&j| j != k && next.lambda[j] != self.lambda[j])
            .fold(Element::zero(n), |acc, j| &acc + &next.e[j]);
        next.e[k] = &self.e[k] - &self.mul(&self.e[k], &e_plus)?;

        for i in 0..n {
            let es = next.partner_sum(&p_s, i);
            let t = if moves[i] {
                self.mul(&self.mul(tk, &tau[i])?, tk)?
            } else {
                tau[i].clone()
            };
            next.s[i] = &t + &self.mul(&(&one - &t), &es)?.scale(&two);
        }

        next.seed = self.seed.mutate(k)?;
        for x in next.s.iter().chain(&next.e).chain(&next.expr) {
            x.check_terms(self.term_cap)?;
        }
        next.last = Some(Step { k, p_s, p_tau, tau });

        next.check_c1()?;
        if next.check_relations {
            next.check_relations()?;
        }
        Ok(next)
    }

    /// Runs `w` from the current state.
    pub fn run(&self, w: &[usize]) -> Result<Self> {
        let mut st = self.clone();
        for &k in w {
            st = st.advance(k)?;
        }
        Ok(st)
    }

    /// `Λ^w` as a matrix.
    pub fn lambda_matrix(&self) -> IntMatrix {
        IntMatrix::from_row_vecs(self.lambda.clone()).expect("square")
    }

    /// (C1): `Λ^w = C^w`.
    pub fn check_c1(&self) -> Result<()> {
        for i in 0..self.rank() {
            if self.lambda[i] != self.seed.c(i) {
                return Err(violation(format!(
                    "C1 fails at w={:?}, i={}: λ={} but c={}",
                    one_based(&self.seed.w),
                    i + 1,
                    fmt_vec(&self.lambda[i]),
                    fmt_vec(self.seed.c(i))
                )));
            }
        }
        Ok(())
    }

    /// (C2): the action of `s_i^w` and `e_i^w` on every `λ_j^w`.
    pub fn check_c2(&self) -> Result<()> {
        let n = self.rank();
        let o = self.ordering();
        for i in 0..n {
            let s_pi = self.s[i].evaluate_pi(&self.gim);
            let e_pi = self.e[i].evaluate_pi(&self.gim);
            for j in 0..n {
                let lj = &self.lambda[j];
                let li = &self.lambda[i];
                let b = &self.seed.bw[(j, i)];
                let expected: Vec<BigInt> = if i == j {
                    lj.iter().map(|x| -x).collect()
                } else if o.precedes(i, j) {
                    lj.iter().zip(li).map(|(x, y)| x + b * y).collect()
                } else {
                    lj.iter().zip(li).map(|(x, y)| x - b * y).collect()
                };
                if row_times(lj, &s_pi) != expected {
                    return Err(violation(format!(
                        "C2 fails at w={:?}: s_{}(λ_{})",
                        one_based(&self.seed.w),
                        i + 1,
                        j + 1
                    )));
                }
                let e_expected = if i == j {
                    lj.clone()
                } else {
                    vec![BigInt::zero(); n]
                };
                if row_times(lj, &e_pi) != e_expected {
                    return Err(violation(format!(
                        "C2 fails at w={:?}: e_{}(λ_{})",
                        one_based(&self.seed.w),
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// (C3): `s_i^w ≡ r_i^w (mod 2𝒜)`.
    pub fn check_c3(&self, refl: &ReflectionState) -> Result<()> {
        let n = self.rank();
        for i in 0..n {
            if !self.s[i].mod2_equal(&Element::word(n, &refl.r[i])) {
                return Err(violation(format!(
                    "C3 fails at w={:?}, i={}",
                    one_based(&self.seed.w),
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// `Σ e_i = 1`, `e_i e_j = δ_ij e_i`, the `e_i s_j` rule, `s_i² = 1` and
    /// `s_i e_i = -e_i` for the current `s` and `e`.
    pub fn check_relations(&self) -> Result<()> {
        let n = self.rank();
        let one = Element::one(n);
        let w = one_based(&self.seed.w);
        let total = self.e.iter().fold(Element::zero(n), |acc, x| &acc + x);
        if total != one {
            return Err(violation(format!("Σ e_i ≠ 1 at w={w:?}")));
        }
        for i in 0..n {
            if self.mul(&self.s[i], &self.s[i])? != one {
                return Err(violation(format!("s_{}² ≠ 1 at w={w:?}", i + 1)));
            }
            if self.mul(&self.s[i], &self.e[i])? != -&self.e[i] {
                return Err(violation(format!("s_{0} e_{0} ≠ -e_{0} at w={w:?}", i + 1)));
            }
            for j in 0..n {
                let ee = self.mul(&self.e[i], &self.e[j])?;
                let ok = if i == j {
                    ee == self.e[i]
                } else {
                    ee.is_zero()
                };
                if !ok {
                    return Err(violation(format!("e_{} e_{} at w={w:?}", i + 1, j + 1)));
                }
                let es = self.mul(&self.e[i], &self.s[j])?;
                let expected = if i == j {
                    &(&self.s[i] + &self.e[i]) - &one
                } else {
                    self.e[i].clone()
                };
                if es != expected {
                    return Err(violation(format!("e_{} s_{} at w={w:?}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    /// `e_i τ_j`, `τ_i² = 1` and `τ_i e_i = -e_i` for a freshly formed `τ`.
    pub fn check_tau_relations(&self, tau: &[Element]) -> Result<()> {
        let n = self.rank();
        let one = Element::one(n);
        let w = one_based(&self.seed.w);
        for i in 0..n {
            if self.mul(&tau[i], &tau[i])? != one {
                return Err(violation(format!("τ_{}² ≠ 1 at w={w:?}", i + 1)));
            }
            if self.mul(&tau[i], &self.e[i])? != -&self.e[i] {
                return Err(violation(format!("τ_{0} e_{0} ≠ -e_{0} at w={w:?}", i + 1)));
            }
            for j in 0..n {
                let et = self.mul(&self.e[i], &tau[j])?;
                let expected = if i == j {
                    &(&tau[i] + &self.e[i]) - &one
                } else {
                    self.e[i].clone()
                };
                if et != expected {
                    return Err(violation(format!("e_{} τ_{} at w={w:?}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    /// Symbolic `λ_i^w` as `Σ c_u u(λ_i)`, one-based.
    pub fn lambda_expression(&self, i: usize) -> String {
        let mut parts = Vec::new();
        for (m, c) in self.expr[i].terms() {
            let body = if m.word.is_empty() {
                format!("λ{}", i + 1)
            } else {
                let w: Vec<String> = m
                    .word
                    .letters()
                    .iter()
                    .map(|x| format!("s{}", x + 1))
                    .collect();
                format!("{}λ{}", w.join(""), i + 1)
            };
            parts.push(if c.is_one() {
                format!("+{body}")
            } else if *c == -BigInt::one() {
                format!("-{body}")
            } else if c.sign() == num_bigint::Sign::Minus {
                format!("{c}{body}")
            } else {
                format!("+{c}{body}")
            });
        }
        let s = parts.concat();
        s.strip_prefix('+').map(str::to_string).unwrap_or(s)
    }

    /// Words appearing in the symbolic form of `λ_i^w`.
    pub fn lambda_words(&self, i: usize) -> Vec<(Word, BigInt)> {
        self.expr[i]
            .terms()
            .map(|(m, c)| (m.word.clone(), c.clone()))
            .collect()
    }
}

fn one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|k| k + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;
    use crate::matrix::int_vec;
    use crate::reflections::reflection_state;

    fn acyclic3() -> LambdaState {
        let b = SkewMatrix::from_rows(&[vec![0, 1, -3], vec![-2, 0, -2], vec![3, 1, 0]]).unwrap();
        LambdaState::new(&b, &Ordering::natural(3)).unwrap()
    }

    fn p(s: &str) -> Element {
        parse_element(s, 3).unwrap()
    }

    fn pairs(v: &[(usize, usize)]) -> PairSet {
        v.iter().map(|&(a, b)| (a - 1, b - 1)).collect()
    }

    #[test]
    fn first_step_of_running_example() {
        let st = acyclic3();
        let (ps, pt) = st.pair_sets(1).unwrap();
        assert_eq!(ps, pairs(&[(2, 3)]));
        assert_eq!(pt, pairs(&[(2, 1)]));
        let tau = st.make_tau(&pt);
        assert_eq!(tau[0], p("s1 + 2(1 - s1)e2"));
        assert_eq!(tau[1], p("s2 + 2(1 - s2)e1"));
        assert_eq!(tau[2], p("s3"));

        let st = st.advance(1).unwrap();
        assert_eq!(
            st.lambda,
            vec![
                int_vec(&[1, 1, 0]),
                int_vec(&[0, -1, 0]),
                int_vec(&[0, 1, 1])
            ]
        );
        assert_eq!(st.e[0], p("(2 - s2)e1"));
        assert_eq!(st.e[2], p("s2 e3"));
        assert_eq!(st.e[1], p("s2(e1 - e3) - e1 + e2 + e3"));
        // s_1 = τ_2 τ_1 τ_2 since e_{s,1} = 0.
        assert_eq!(st.s[0], &(&tau[1] * &tau[0]) * &tau[1]);
        assert_eq!(
            st.s[0],
            p("(2 - 2s1 + s2s1)s2 + 2(1 - 2s2 + 2s1s2 - s2s1s2)e1 + 2(-2 + 2s1 + s2 - s2s1)e3")
        );
        assert_eq!(st.s[1], p("s2 + 2(1 - s2)(e1 - e3)"));
        assert_eq!(st.s[2], p("s2s3s2 + 2(1 + s2s3)e2 + 2(1 - 2s2 - s2s3s2)e3"));
        st.check_c2().unwrap();
    }

    #[test]
    fn second_step_of_running_example() {
        let st = acyclic3().advance(1).unwrap();
        let s3 = st.s[2].evaluate_pi(st.gim());
        let images: Vec<Vec<BigInt>> = st.lambda.iter().map(|l| row_times(l, &s3)).collect();
        assert_eq!(
            images,
            vec![
                int_vec(&[1, 4, 3]),
                int_vec(&[0, -3, -2]),
                int_vec(&[0, -1, -1])
            ]
        );
        let (ps, pt) = st.pair_sets(2).unwrap();
        assert!(ps.is_empty());
        assert_eq!(pt, pairs(&[(3, 2)]));
        let tau = st.make_tau(&pt);
        assert_eq!(tau[0], st.s[0]);
        assert_eq!(tau[1], p("s2 + 2(1 - s2)e1"));
        assert_eq!(tau[2], p("s2s3s2 + 2(1 - s2s3s2 + s2s3 - s2)e1"));

        let st = st.advance(2).unwrap();
        assert_eq!(
            st.lambda,
            vec![
                int_vec(&[1, 1, 0]),
                int_vec(&[0, 1, 2]),
                int_vec(&[0, -1, -1])
            ]
        );
        assert_eq!(st.expr[1], p("s2s3e2"));
        assert_eq!(st.expr[2], p("-s2e3"));
    }

    #[test]
    fn example_one_six_lambdas() {
        let b = SkewMatrix::from_rows(&[vec![0, 3, -3], vec![-2, 0, 2], vec![2, -2, 0]]).unwrap();
        let o: Ordering = "1>2>3".parse().unwrap();
        let w = [1, 2, 1, 0, 1];
        let st = LambdaState::new(&b, &o).unwrap().run(&w).unwrap();
        assert_eq!(
            st.lambda,
            vec![
                int_vec(&[5, 18, 15]),
                int_vec(&[-2, -7, -6]),
                int_vec(&[0, -2, -1])
            ]
        );
        st.check_c2().unwrap();
        st.check_c3(&reflection_state(&b, &w).unwrap()).unwrap();
    }

    #[test]
    fn four_term_real_loesung() {
        let b = SkewMatrix::from_rows(&[
            vec![0, 1, 0, 0],
            vec![-1, 0, -1, 0],
            vec![0, 1, 0, 1],
            vec![0, 0, -1, 0],
        ])
        .unwrap();
        let o: Ordering = "4<2<3<1".parse().unwrap();
        let st = LambdaState::new(&b, &o).unwrap().run(&[1, 3, 1]).unwrap();
        assert_eq!(st.lambda[2], int_vec(&[0, 0, 1, 1]));
        let expected = parse_element("(-s2s4s2 - 2s2 + 2 + 2s4s2)e3", 4).unwrap();
        assert_eq!(st.expr[2], expected);
        assert_eq!(st.expr[2].num_terms(), 4);
        assert_eq!(st.lambda_expression(2), "2λ3-2s2λ3+2s4s2λ3-s2s4s2λ3");
    }

    #[test]
    fn zero_column_gives_empty_pair_sets() {
        let b = SkewMatrix::from_rows(&[vec![0, 0, 1], vec![0, 0, 0], vec![-1, 0, 0]]).unwrap();
        let st = LambdaState::new(&b, &Ordering::natural(3)).unwrap();
        let (ps, pt) = st.pair_sets(1).unwrap();
        assert!(ps.is_empty() && pt.is_empty());
    }

    #[test]
    fn rejects_bad_index() {
        assert!(matches!(
            acyclic3().advance(3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn term_cap_is_enforced() {
        let st = acyclic3().with_term_cap(3);
        assert!(matches!(
            st.run(&[1, 2, 0, 1]),
            Err(Error::TermBudgetExceeded { .. })
        ));
    }
}
