//! The algebra `𝒜` on generators `s_i`, `e_i` with relations
//!
//! ```text
//! s_i² = 1,  Σ e_i = 1,  s_i e_i = -e_i,
//! e_i s_i = s_i + e_i - 1,  e_i s_j = e_i (i ≠ j),  e_i e_j = δ_ij e_i.
//! ```
//!
//! Since `1 = Σ e_i`, every element is a unique integer combination of the
//! capped monomials `u·e_i` with `u` a reduced word not ending in `i`. This
//! basis is used internally; [`fmt::Display`] rewrites into a mixed form
//! with bare words so that `s_2 + 2(1 - s_2)e_1` prints recognisably.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gim::Gim;
use crate::matrix::IntMatrix;
use crate::words::Word;

/// Basis element `u·e_cap`, with `u` reduced and not ending in `cap`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub word: Word,
    pub cap: usize,
}

impl Monomial {
    /// `u·e_i`, rewriting `u' s_i e_i = -u' e_i` when `u` ends in `i`.
    fn signed(word: Word, cap: usize) -> (bool, Self) {
        if word.last() == Some(cap) {
            let mut letters = word.letters().to_vec();
            letters.pop();
            (
                true,
                Self {
                    word: Word::new(letters),
                    cap,
                },
            )
        } else {
            (false, Self { word, cap })
        }
    }
}

impl Ord for Monomial {
    /// Length, then letters, then cap.
    fn cmp(&self, other: &Self) -> CmpOrdering {
        (self.word.len(), self.word.letters(), self.cap).cmp(&(
            other.word.len(),
            other.word.letters(),
            other.cap,
        ))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

/// An element of `𝒜` over `n` generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    n: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Element {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// `1 = Σ e_i`.
    pub fn one(n: usize) -> Self {
        let mut x = Self::zero(n);
        for i in 0..n {
            x.add_term(
                Monomial {
                    word: Word::empty(),
                    cap: i,
                },
                BigInt::one(),
            );
        }
        x
    }

    pub fn gen_s(n: usize, i: usize) -> Self {
        Self::word(n, &Word::letter(i))
    }

    pub fn gen_e(n: usize, i: usize) -> Self {
        let mut x = Self::zero(n);
        x.add_term(
            Monomial {
                word: Word::empty(),
                cap: i,
            },
            BigInt::one(),
        );
        x
    }

    /// The group element `u` written in the capped basis:
    /// `u = Σ_{i ≠ l} u e_i - u' e_l` where `u = u' s_l`.
    pub fn word(n: usize, u: &Word) -> Self {
        let mut x = Self::zero(n);
        for i in 0..n {
            let (neg, m) = Monomial::signed(u.clone(), i);
            x.add_term(m, if neg { -BigInt::one() } else { BigInt::one() });
        }
        x
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of basis monomials with nonzero coefficient.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Errors when the element has more than `cap` terms.
    pub fn check_terms(&self, cap: usize) -> Result<()> {
        if self.terms.len() > cap {
            return Err(Error::TermBudgetExceeded {
                terms: self.terms.len(),
                cap,
            });
        }
        Ok(())
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// `e_j · (u e_i)`. Walking `u` from the left, `e_j s_j = s_j + e_j - 1`
    /// peels off one letter at a time and `e_j s_x = e_j` for `x ≠ j`.
    fn left_e(j: usize, out: &mut Self, coeff: &BigInt, m: &Monomial) {
        let letters = m.word.letters();
        for (p, &x) in letters.iter().enumerate() {
            if x == j {
                out.add_term(
                    Monomial {
                        word: Word::new(letters[p..].iter().copied()),
                        cap: m.cap,
                    },
                    coeff.clone(),
                );
                out.add_term(
                    Monomial {
                        word: Word::new(letters[p + 1..].iter().copied()),
                        cap: m.cap,
                    },
                    -coeff.clone(),
                );
            }
        }
        if j == m.cap {
            out.add_term(
                Monomial {
                    word: Word::empty(),
                    cap: m.cap,
                },
                coeff.clone(),
            );
        }
    }

    /// `u · self` for a reduced word `u`.
    pub fn left_word(&self, u: &Word) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let (neg, m) = Monomial::signed(u.concat(&m.word), m.cap);
            out.add_term(m, if neg { -c.clone() } else { c.clone() });
        }
        out
    }

    /// `e_j · self`.
    pub fn left_idempotent(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            Self::left_e(j, &mut out, c, m);
        }
        out
    }

    /// `self · other`: each term `u e_i` of `self` acts as `e_i` then `u`.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_capped(other, usize::MAX).expect("no cap")
    }

    /// [`Element::mul`] that gives up once the partial product has more than
    /// `cap` terms, so runaway products fail before exhausting memory.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        assert_eq!(self.n, other.n, "algebra rank mismatch");
        let mut by_cap: Vec<Option<Self>> = vec![None; self.n];
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let projected = by_cap[m.cap].get_or_insert_with(|| other.left_idempotent(m.cap));
            for (m2, c2) in &projected.terms {
                let (neg, prod) = Monomial::signed(m.word.concat(&m2.word), m2.cap);
                let coeff = c * c2;
                out.add_term(prod, if neg { -coeff } else { coeff });
            }
            out.check_terms(cap)?;
        }
        Ok(out)
    }

    /// Every coefficient of `self - other` is even.
    pub fn mod2_equal(&self, other: &Self) -> bool {
        (self - other).terms.values().all(|c| c.is_even())
    }

    /// `π(self)` as the matrix `M` with `self(v) = v·M`.
    ///
    /// `π(u e_i)` keeps only row `i` of `π(u)`. Note `π(xy) = π(y)π(x)` in
    /// this row-vector convention.
    pub fn evaluate_pi(&self, gim: &Gim) -> IntMatrix {
        let n = self.n;
        let mut out = IntMatrix::zeros(n, n);
        let mut cache: Option<(Word, IntMatrix)> = None;
        for (m, c) in &self.terms {
            // Terms with equal words are adjacent in the map order.
            if cache.as_ref().is_none_or(|(w, _)| w != &m.word) {
                cache = Some((m.word.clone(), m.word.pi(gim)));
            }
            let pu = &cache.as_ref().unwrap().1;
            for j in 0..n {
                out[(m.cap, j)] += c * &pu[(m.cap, j)];
            }
        }
        out
    }

    /// `self(v)`.
    pub fn act(&self, v: &[BigInt], gim: &Gim) -> Result<Vec<BigInt>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let m = self.evaluate_pi(gim);
        Ok((0..self.n)
            .map(|j| (0..self.n).map(|i| &v[i] * &m[(i, j)]).sum())
            .collect())
    }

    /// Mixed-basis form: a list of `(coefficient, word, cap)` where `cap =
    /// None` means the bare word. For each word, longest first, a multiple
    /// of the bare word is split off when that lowers the number of terms.
    pub fn display_terms(&self) -> Vec<(BigInt, Word, Option<usize>)> {
        let n = self.n;
        let mut capped = self.terms.clone();
        let mut bare: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        let mut words: Vec<Word> = capped.keys().map(|m| m.word.clone()).collect();
        words.sort_by(|a, b| (b.len(), b.letters()).cmp(&(a.len(), a.letters())));
        words.dedup();
        while let Some(u) = words.first().cloned() {
            words.remove(0);
            let last = u.last();
            let coeff = |cap: &BTreeMap<Monomial, BigInt>, i: usize| {
                cap.get(&Monomial {
                    word: u.clone(),
                    cap: i,
                })
                .cloned()
                .unwrap_or_default()
            };
            let cs: Vec<(usize, BigInt)> = (0..n)
                .filter(|&i| Some(i) != last)
                .map(|i| (i, coeff(&capped, i)))
                .collect();
            // The shorter monomial the bare word also touches.
            let shadow = last.map(|l| {
                let mut letters = u.letters().to_vec();
                letters.pop();
                Monomial {
                    word: Word::new(letters),
                    cap: l,
                }
            });
            let shadow_c = shadow
                .as_ref()
                .map(|m| capped.get(m).cloned().unwrap_or_default());
            let cost = |t: &BigInt| {
                let own = cs.iter().filter(|(_, c)| c != t).count();
                let sh = shadow_c
                    .as_ref()
                    .map_or(0, |s| usize::from(!(s + t).is_zero()));
                own + sh + usize::from(!t.is_zero())
            };
            let mut best = BigInt::zero();
            let mut best_cost = cost(&best);
            for (_, c) in &cs {
                let k = cost(c);
                let better = k < best_cost
                    || (k == best_cost
                        && !best.is_zero()
                        && (c.abs(), c.is_negative()) < (best.abs(), best.is_negative()));
                if better {
                    best = c.clone();
                    best_cost = k;
                }
            }
            if best.is_zero() {
                continue;
            }
            for (i, c) in &cs {
                let m = Monomial {
                    word: u.clone(),
                    cap: *i,
                };
                let rest = c - &best;
                if rest.is_zero() {
                    capped.remove(&m);
                } else {
                    capped.insert(m, rest);
                }
            }
            if let Some(sh) = shadow {
                let v = capped.get(&sh).cloned().unwrap_or_default() + &best;
                if v.is_zero() {
                    capped.remove(&sh);
                } else {
                    if !words.contains(&sh.word) {
                        words.push(sh.word.clone());
                        words.sort_by(|a, b| (b.len(), b.letters()).cmp(&(a.len(), a.letters())));
                    }
                    capped.insert(sh, v);
                }
            }
            bare.insert(
                Monomial {
                    word: u,
                    cap: usize::MAX,
                },
                best,
            );
        }
        let mut out: Vec<(BigInt, Word, Option<usize>)> = Vec::new();
        let mut keys: Vec<(Monomial, Option<usize>, BigInt)> = capped
            .into_iter()
            .map(|(m, c)| {
                let cap = Some(m.cap);
                (m, cap, c)
            })
            .chain(bare.into_iter().map(|(m, c)| (m, None, c)))
            .collect();
        keys.sort_by(|a, b| {
            (a.0.word.len(), a.0.word.letters(), a.1).cmp(&(
                b.0.word.len(),
                b.0.word.letters(),
                b.1,
            ))
        });
        for (m, cap, c) in keys {
            out.push((c, m.word, cap));
        }
        out
    }
}

impl fmt::Display for Element {
    /// E.g. `2*e1 + s2 - 2*s2*e1`, one-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.display_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, word, cap)) in terms.iter().enumerate() {
            let mut factors: Vec<String> = word
                .letters()
                .iter()
                .map(|x| format!("s{}", x + 1))
                .collect();
            if let Some(i) = cap {
                factors.push(format!("e{}", i + 1));
            }
            let body = if factors.is_empty() {
                "1".to_string()
            } else {
                factors.join("*")
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}*{body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl Add for &Element {
    type Output = Element;

    fn add(self, rhs: &Element) -> Element {
        assert_eq!(self.n, rhs.n, "algebra rank mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        assert_eq!(self.n, rhs.n, "algebra rank mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &Element {
    type Output = Element;

    fn mul(self, rhs: &Element) -> Element {
        Element::mul(self, rhs)
    }
}

/// Parses expressions such as `s2s3s2 + 2*(1 - s2)*e1` over `n` generators.
/// Indices are one-based; juxtaposition multiplies.
pub fn parse_element(s: &str, n: usize) -> Result<Element> {
    let mut p = Parser {
        s: s.as_bytes(),
        pos: 0,
        n,
    };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.error());
    }
    Ok(x)
}

impl FromStr for Element {
    type Err = Error;

    /// Parses with the rank taken to be the largest index mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let mut max = 0usize;
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b's' || bytes[i] == b'e' {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(k) = s[start..j].parse::<usize>() {
                    max = max.max(k);
                }
                i = j;
            } else {
                i += 1;
            }
        }
        parse_element(s, max.max(1))
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self) -> Error {
        Error::InvalidInput(format!(
            "cannot parse algebra element at byte {}: {:?}",
            self.pos,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Element> {
        let mut acc = Element::zero(self.n);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Element> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(b's' | b'e' | b'(') => {}
                Some(c) if c.is_ascii_digit() => {}
                _ => return Ok(acc),
            }
            let f = self.factor()?;
            acc = &acc * &f;
        }
    }

    fn digits(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }

    fn factor(&mut self) -> Result<Element> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error());
                }
                self.pos += 1;
                Ok(x)
            }
            Some(c @ (b's' | b'e')) => {
                self.pos += 1;
                let i = self.digits().ok_or_else(|| self.error())?;
                if i == 0 || i > self.n {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        rank: self.n,
                    });
                }
                Ok(if c == b's' {
                    Element::gen_s(self.n, i - 1)
                } else {
                    Element::gen_e(self.n, i - 1)
                })
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.digits().ok_or_else(|| self.error())?;
                Ok(Element::one(self.n).scale(&BigInt::from(k)))
            }
            _ => Err(self.error()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gim::Ordering;
    use crate::matrix::{int_vec, SkewMatrix};

    fn p(s: &str) -> Element {
        parse_element(s, 3).unwrap()
    }

    #[test]
    fn defining_relations() {
        let n = 3;
        for i in 0..n {
            let s = Element::gen_s(n, i);
            let e = Element::gen_e(n, i);
            assert_eq!(&s * &s, Element::one(n));
            assert_eq!(&s * &e, -&e);
            assert_eq!(&e * &e, e);
            assert_eq!(&e * &s, &(&s + &e) - &Element::one(n));
            for j in 0..n {
                if i != j {
                    let sj = Element::gen_s(n, j);
                    let ej = Element::gen_e(n, j);
                    assert_eq!(&e * &sj, e);
                    assert!((&e * &ej).is_zero());
                }
            }
        }
        let total = (0..n).fold(Element::zero(n), |acc, i| &acc + &Element::gen_e(n, i));
        assert_eq!(total, Element::one(n));
    }

    #[test]
    fn one_is_a_two_sided_unit() {
        let x = p("s1s2e3 - 2*s3 + e1s2");
        let one = Element::one(3);
        assert_eq!(&one * &x, x);
        assert_eq!(&x * &one, x);
    }

    #[test]
    fn conjugating_an_idempotent() {
        // τ_2 e_1 τ_2 = (2 - s_2) e_1 with τ_2 = s_2 + 2(1 - s_2) e_1.
        let tau = p("s2 + 2(1 - s2)e1");
        let e1 = p("e1");
        assert_eq!(&(&tau * &e1) * &tau, p("(2 - s2)e1"));
        assert_eq!(&(&tau * &p("e3")) * &tau, p("s2 e3"));
        assert_eq!(&tau * &tau, Element::one(3));
    }

    #[test]
    fn mod_two() {
        let tau = p("s2 + 2(1 - s2)e1");
        assert!(tau.mod2_equal(&p("s2")));
        assert!(p("s2 + 2(1 - s2)(e1 - e3)").mod2_equal(&p("s2")));
        assert!(!Element::one(3).mod2_equal(&Element::zero(3)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(p("s2 + 2(1 - s2)e1").to_string(), "2*e1 + s2 - 2*s2*e1");
        assert_eq!(p("s2 e3").to_string(), "s2*e3");
        assert_eq!(Element::one(3).to_string(), "1");
        assert_eq!(Element::zero(3).to_string(), "0");
        assert_eq!(p("-s1s2").to_string(), "-s1*s2");
        assert_eq!(p("1 - e3").to_string(), "e1 + e2");
        assert_eq!(p("2 - e3").to_string(), "2 - e3");
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "s2 + 2(1 - s2)e1",
            "s2(e1 - e3) - e1 + e2 + e3",
            "3 s1s2s3 e2 - s3s1",
            "0",
        ] {
            let x = p(s);
            assert_eq!(parse_element(&x.to_string(), 3).unwrap(), x, "{s}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_element("s4", 3).is_err());
        assert!(parse_element("(s1", 3).is_err());
        assert!(parse_element("s1 +", 3).is_err());
        assert!(parse_element("x", 3).is_err());
        assert_eq!("s1 e2".parse::<Element>().unwrap().rank(), 2);
    }

    fn acyclic3() -> Gim {
        let b = SkewMatrix::from_rows(&[vec![0, 1, -3], vec![-2, 0, -2], vec![3, 1, 0]]).unwrap();
        Gim::from_ordering(&b, &Ordering::natural(3)).unwrap()
    }

    #[test]
    fn representation_on_generators() {
        let g = acyclic3();
        for i in 0..3 {
            assert_eq!(Element::gen_s(3, i).evaluate_pi(&g), g.s_matrix(i));
            assert_eq!(Element::gen_e(3, i).evaluate_pi(&g), g.e_matrix(i));
        }
        assert!(Element::one(3).evaluate_pi(&g).is_identity());
        let lam1 = int_vec(&[1, 0, 0]);
        assert_eq!(p("2 - s2").act(&lam1, &g).unwrap(), int_vec(&[1, 1, 0]));
    }

    #[test]
    fn representation_reverses_products() {
        let g = acyclic3();
        let x = p("s1 + 2 e2 s3");
        let y = p("s2 s3 - e1");
        assert_eq!(
            (&x * &y).evaluate_pi(&g),
            &y.evaluate_pi(&g) * &x.evaluate_pi(&g)
        );
    }

    #[test]
    fn term_cap() {
        let x = p("s1 + s2 + s3");
        assert!(x.check_terms(100).is_ok());
        assert!(matches!(
            x.check_terms(2),
            Err(Error::TermBudgetExceeded { .. })
        ));
    }
}
