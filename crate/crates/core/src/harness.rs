//! Enumeration of mutation sequences and the drivers that check the theorem
//! and probe the conjectures over all of them.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gim::{all_orderings, ordering_satisfies_parity, Gim, Ordering};
use crate::io::{matrix_json, one_based, vec_json};
use crate::lambda::{LambdaState, DEFAULT_TERM_CAP};
use crate::matrix::{apply_sequence, IntMatrix, SkewMatrix};
use crate::reflections::{ReflectionState, DEFAULT_WORD_CAP};

/// Limits shared by the drivers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Budget {
    pub max_rank: usize,
    pub max_len: usize,
    pub word_cap: usize,
    pub term_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_rank: 5,
            max_len: 7,
            word_cap: DEFAULT_WORD_CAP,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl Budget {
    fn check(&self, n: usize, max_len: usize) -> Result<()> {
        if n > self.max_rank {
            return Err(Error::RankTooLarge {
                rank: n,
                limit: self.max_rank,
            });
        }
        if max_len > self.max_len {
            return Err(Error::InvalidInput(format!(
                "max length {max_len} exceeds the budget {}",
                self.max_len
            )));
        }
        Ok(())
    }
}

/// All sequences over `0..n` of length at most `max_len` without two equal
/// neighbours, shortest first and lexicographic within a length.
pub fn enumerate_sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for k in 0..n {
                if w.last() != Some(&k) {
                    let mut v: Vec<usize> = w.clone();
                    v.push(k);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A pair of sequences with equal C-matrices but different `π(r_i)`.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub kind: &'static str,
    pub w: Vec<usize>,
    pub v: Vec<usize>,
    pub index: usize,
    pub pi_w: Value,
    pub pi_v: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub matrix: Value,
    pub ordering: String,
    pub parity_ok: bool,
    pub max_len: usize,
    pub runs: usize,
    pub classes: usize,
    pub largest_class: usize,
    pub nontrivial_classes: usize,
    /// Counterexample candidates. A bug in any layer would also land here,
    /// so entries need manual review.
    pub violations: Vec<Candidate>,
    pub errors: Vec<Failure>,
    pub skipped: Vec<Failure>,
    pub note: &'static str,
    pub timing_ms: u128,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub w: Vec<usize>,
    pub message: String,
}

fn failure(w: &[usize], e: &Error) -> Failure {
    Failure {
        w: one_based(w),
        message: e.to_string(),
    }
}

/// `C^w` and the matrices `π(r_i^w)`.
type Probe = (IntMatrix, Vec<IntMatrix>);
/// A sequence with its `π(r_i^w)`.
type Member = (Vec<usize>, Vec<IntMatrix>);

/// Groups all sequences by `C^w` and compares `π(r_i^w)` inside each group.
pub fn probe_conjecture(
    b: &SkewMatrix,
    ordering: &Ordering,
    max_len: usize,
    budget: &Budget,
) -> Result<ConjectureReport> {
    let start = Instant::now();
    let n = b.rank();
    budget.check(n, max_len)?;
    let gim = Gim::from_ordering(b, ordering)?;
    let seqs = enumerate_sequences(n, max_len);
    let results: Vec<(Vec<usize>, Result<Probe>)> = seqs
        .into_par_iter()
        .map(|w| {
            let r = (|| {
                let mut st = ReflectionState::initial(b).with_word_cap(budget.word_cap);
                for &k in &w {
                    st = st.mutate(k)?;
                }
                st.seed.check_sign_coherence()?;
                let pis = st.r.iter().map(|r| r.pi(&gim)).collect();
                Ok((st.seed.cw.clone(), pis))
            })();
            (w, r)
        })
        .collect();

    let mut errors = Vec::new();
    let mut skipped = Vec::new();
    let mut classes: BTreeMap<IntMatrix, Vec<Member>> = BTreeMap::new();
    let runs = results.len();
    for (w, r) in results {
        match r {
            Ok((c, pis)) => classes.entry(c).or_default().push((w, pis)),
            Err(e) if is_budget(&e) => skipped.push(failure(&w, &e)),
            Err(e) => errors.push(failure(&w, &e)),
        }
    }
    let mut violations = Vec::new();
    for members in classes.values() {
        let (w0, p0) = &members[0];
        for (v, pv) in &members[1..] {
            for i in 0..n {
                if p0[i] != pv[i] {
                    violations.push(Candidate {
                        kind: "conjecture",
                        w: one_based(w0),
                        v: one_based(v),
                        index: i + 1,
                        pi_w: matrix_json(&p0[i]),
                        pi_v: matrix_json(&pv[i]),
                    });
                }
            }
        }
    }
    Ok(ConjectureReport {
        matrix: matrix_json(b.b()),
        ordering: ordering.to_string(),
        parity_ok: ordering_satisfies_parity(b, ordering),
        max_len,
        runs,
        classes: classes.len(),
        largest_class: classes.values().map(Vec::len).max().unwrap_or(0),
        nontrivial_classes: classes.values().filter(|m| m.len() > 1).count(),
        violations,
        errors,
        skipped,
        note: "violations are conjecture counterexample candidates pending manual review",
        timing_ms: start.elapsed().as_millis(),
    })
}

/// Largest rank accepted by [`loesung_scan`].
pub const LOESUNG_SCAN_MAX_RANK: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct CVectorVerdict {
    pub c: Value,
    /// First sequence producing this c-vector.
    pub w: Vec<usize>,
    pub orderings_passing: usize,
    /// Up to five orderings under which `c` is a Lösung.
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoesungReport {
    pub matrix: Value,
    pub orderings: usize,
    pub runs: usize,
    pub c_vectors: Vec<CVectorVerdict>,
    /// c-vectors that are not a Lösung for any ordering-induced GIM.
    pub fails_for_all: Vec<CVectorVerdict>,
    pub timing_ms: u128,
}

/// Tests every c-vector reached by `sequences` against every ordering-GIM.
pub fn loesung_scan(b: &SkewMatrix, sequences: &[Vec<usize>]) -> Result<LoesungReport> {
    let start = Instant::now();
    let n = b.rank();
    if n > LOESUNG_SCAN_MAX_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            limit: LOESUNG_SCAN_MAX_RANK,
        });
    }
    let gims: Vec<Gim> = all_orderings(n)
        .map(|o| Gim::from_ordering(b, &o))
        .collect::<Result<_>>()?;
    let mut seen: BTreeMap<Vec<num_bigint::BigInt>, Vec<usize>> = BTreeMap::new();
    for w in sequences {
        let seed = apply_sequence(b, w)?;
        for i in 0..n {
            seen.entry(seed.c(i).to_vec()).or_insert_with(|| w.clone());
        }
    }
    let verdicts: Vec<CVectorVerdict> = seen
        .into_par_iter()
        .map(|(c, w)| {
            let passing: Vec<&Gim> = gims
                .iter()
                .filter(|g| g.is_loesung(&c).is_ok_and(|v| v.is_loesung()))
                .collect();
            CVectorVerdict {
                c: vec_json(&c),
                w: one_based(&w),
                orderings_passing: passing.len(),
                witnesses: passing
                    .iter()
                    .take(5)
                    .map(|g| g.ordering().map(ToString::to_string).unwrap_or_default())
                    .collect(),
            }
        })
        .collect();
    let fails_for_all = verdicts
        .iter()
        .filter(|v| v.orderings_passing == 0)
        .cloned()
        .collect();
    Ok(LoesungReport {
        matrix: matrix_json(b.b()),
        orderings: gims.len(),
        runs: sequences.len(),
        c_vectors: verdicts,
        fails_for_all,
        timing_ms: start.elapsed().as_millis(),
    })
}

/// Outcome of every check for one sequence.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SequenceRecord {
    pub w: Vec<usize>,
    #[serde(rename = "C1")]
    pub c1: bool,
    #[serde(rename = "C2")]
    pub c2: bool,
    #[serde(rename = "C3")]
    pub c3: bool,
    #[serde(rename = "perStepRelations")]
    pub relations: bool,
    /// `q(l_i^w) = 2 d_i` and `π(r_i^w)² = 1`.
    pub reflections: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub matrix: Value,
    pub ordering: String,
    pub max_len: usize,
    pub budget: Budget,
    pub runs: usize,
    pub sequences: Vec<SequenceRecord>,
    /// Always empty: theorem-backed checks report to `errors`.
    pub violations: Vec<Failure>,
    /// Invariant violations. Any entry here is a bug.
    pub errors: Vec<Failure>,
    /// Sequences abandoned because a word or term budget was hit.
    pub skipped: Vec<Failure>,
    pub timing_ms: u128,
}

struct Node {
    lambda: LambdaState,
    refl: ReflectionState,
}

fn is_budget(e: &Error) -> bool {
    matches!(
        e,
        Error::WordBudgetExceeded { .. } | Error::TermBudgetExceeded { .. }
    )
}

/// Checks every clause of the theorem, the relations and the reflection
/// invariants on the state reached by `w`.
fn check_node(node: &Node, gim: &Gim, b: &SkewMatrix) -> (SequenceRecord, Vec<Error>) {
    let mut errs = Vec::new();
    let w = node.lambda.seed.w.clone();
    let c1 = node.lambda.check_c1().map_err(|e| errs.push(e)).is_ok();
    let c2 = node.lambda.check_c2().map_err(|e| errs.push(e)).is_ok();
    let c3 = node
        .lambda
        .check_c3(&node.refl)
        .map_err(|e| errs.push(e))
        .is_ok();
    let mut refl_ok = true;
    let l = node.refl.l_matrix(gim);
    for i in 0..b.rank() {
        let q = gim.quadratic_form(l.row(i)).expect("length");
        if q != &b.d()[i] * 2 {
            refl_ok = false;
            errs.push(Error::InvariantViolation(format!(
                "q(l_{}) = {q} ≠ 2d at w={:?}",
                i + 1,
                one_based(&w)
            )));
        }
        let p = node.refl.r[i].pi(gim);
        if !(&p * &p).is_identity() {
            refl_ok = false;
            errs.push(Error::InvariantViolation(format!(
                "π(r_{})² ≠ 1 at w={:?}",
                i + 1,
                one_based(&w)
            )));
        }
    }
    if node.refl.seed != node.lambda.seed {
        errs.push(Error::InvariantViolation(format!(
            "seed mismatch at w={:?}",
            one_based(&w)
        )));
    }
    let record = SequenceRecord {
        w: one_based(&w),
        c1,
        c2,
        c3,
        relations: true,
        reflections: refl_ok,
    };
    (record, errs)
}

#[derive(Default)]
struct Collected {
    records: Vec<SequenceRecord>,
    errors: Vec<Failure>,
    skipped: Vec<Failure>,
}

fn explore(node: Node, gim: &Gim, b: &SkewMatrix, max_len: usize, out: &mut Collected) {
    let (record, errs) = check_node(&node, gim, b);
    let w = node.lambda.seed.w.clone();
    out.records.push(record);
    out.errors.extend(errs.iter().map(|e| failure(&w, e)));
    if w.len() == max_len {
        return;
    }
    for k in 0..b.rank() {
        if w.last() == Some(&k) {
            continue;
        }
        let mut next_w = w.clone();
        next_w.push(k);
        let step = node
            .lambda
            .advance(k)
            .and_then(|l| Ok((l, node.refl.mutate(k)?)));
        match step {
            Ok((lambda, refl)) => explore(Node { lambda, refl }, gim, b, max_len, out),
            Err(e) if is_budget(&e) => out.skipped.push(failure(&next_w, &e)),
            Err(e) => {
                let relations = !matches!(&e, Error::InvariantViolation(m) if !m.starts_with("C1"));
                out.records.push(SequenceRecord {
                    w: one_based(&next_w),
                    c1: !matches!(&e, Error::InvariantViolation(m) if m.starts_with("C1")),
                    c2: false,
                    c3: false,
                    relations,
                    reflections: false,
                });
                out.errors.push(failure(&next_w, &e));
            }
        }
    }
}

/// Runs the λ-recursion and the reflection recursion over all sequences of
/// length at most `max_len`, checking everything after every step.
pub fn run_full_verification(
    b: &SkewMatrix,
    ordering: &Ordering,
    max_len: usize,
    budget: &Budget,
) -> Result<VerificationReport> {
    let n = b.rank();
    budget.check(n, max_len)?;
    verify_from_root(b, ordering, max_len, budget, None)
}

/// Verification along a single sequence: one record per prefix.
pub fn verify_sequence(
    b: &SkewMatrix,
    ordering: &Ordering,
    w: &[usize],
    budget: &Budget,
) -> Result<VerificationReport> {
    verify_from_root(b, ordering, w.len(), budget, Some(w))
}

fn verify_from_root(
    b: &SkewMatrix,
    ordering: &Ordering,
    max_len: usize,
    budget: &Budget,
    only: Option<&[usize]>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = b.rank();
    if n > budget.max_rank {
        return Err(Error::RankTooLarge {
            rank: n,
            limit: budget.max_rank,
        });
    }
    let gim = Gim::from_ordering(b, ordering)?;
    let root = Node {
        lambda: LambdaState::new(b, ordering)?.with_term_cap(budget.term_cap),
        refl: ReflectionState::initial(b).with_word_cap(budget.word_cap),
    };
    let mut all = Collected::default();
    match only {
        Some(w) => {
            let mut node = root;
            for (m, &k) in w.iter().enumerate() {
                let (record, errs) = check_node(&node, &gim, b);
                all.records.push(record);
                all.errors.extend(errs.iter().map(|e| failure(&w[..m], e)));
                let step = node
                    .lambda
                    .advance(k)
                    .and_then(|l| Ok((l, node.refl.mutate(k)?)));
                match step {
                    Ok((lambda, refl)) => node = Node { lambda, refl },
                    Err(e) => {
                        if is_budget(&e) {
                            all.skipped.push(failure(&w[..=m], &e));
                        } else {
                            all.errors.push(failure(&w[..=m], &e));
                        }
                        return Ok(report(b, ordering, w.len(), budget, all, start));
                    }
                }
            }
            let (record, errs) = check_node(&node, &gim, b);
            all.records.push(record);
            all.errors.extend(errs.iter().map(|e| failure(w, e)));
        }
        None => {
            let (record, errs) = check_node(&root, &gim, b);
            all.records.push(record);
            all.errors.extend(errs.iter().map(|e| failure(&[], e)));
            if max_len > 0 {
                let branches: Vec<Collected> = (0..n)
                    .into_par_iter()
                    .map(|k| {
                        let mut out = Collected::default();
                        let step = root
                            .lambda
                            .advance(k)
                            .and_then(|l| Ok((l, root.refl.mutate(k)?)));
                        match step {
                            Ok((lambda, refl)) => {
                                explore(Node { lambda, refl }, &gim, b, max_len, &mut out)
                            }
                            Err(e) if is_budget(&e) => out.skipped.push(failure(&[k], &e)),
                            Err(e) => out.errors.push(failure(&[k], &e)),
                        }
                        out
                    })
                    .collect();
                for c in branches {
                    all.records.extend(c.records);
                    all.errors.extend(c.errors);
                    all.skipped.extend(c.skipped);
                }
            }
        }
    }
    Ok(report(b, ordering, max_len, budget, all, start))
}

fn report(
    b: &SkewMatrix,
    ordering: &Ordering,
    max_len: usize,
    budget: &Budget,
    mut all: Collected,
    start: Instant,
) -> VerificationReport {
    let key = |w: &Vec<usize>| (w.len(), w.clone());
    all.records.sort_by_key(|r| key(&r.w));
    all.errors
        .sort_by(|x, y| key(&x.w).cmp(&key(&y.w)).then(x.message.cmp(&y.message)));
    all.skipped.sort_by_key(|f| key(&f.w));
    VerificationReport {
        matrix: matrix_json(b.b()),
        ordering: ordering.to_string(),
        max_len,
        budget: *budget,
        runs: all.records.len(),
        sequences: all.records,
        violations: Vec::new(),
        errors: all.errors,
        skipped: all.skipped,
        timing_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_sequences(2, 2),
            vec![vec![], vec![0], vec![1], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(enumerate_sequences(3, 1).len(), 4);
        assert_eq!(enumerate_sequences(3, 5).len(), 94);
        assert_eq!(enumerate_sequences(4, 0), vec![Vec::<usize>::new()]);
    }

    fn running() -> SkewMatrix {
        SkewMatrix::from_rows(&[vec![0, 1, -3], vec![-2, 0, -2], vec![3, 1, 0]]).unwrap()
    }

    #[test]
    fn running_example_verifies() {
        let r = run_full_verification(&running(), &Ordering::natural(3), 4, &Budget::default())
            .unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert_eq!(r.runs, enumerate_sequences(3, 4).len());
        assert!(r
            .sequences
            .iter()
            .all(|s| s.c1 && s.c2 && s.c3 && s.relations && s.reflections));
    }

    #[test]
    fn empty_length_is_vacuous() {
        let r = run_full_verification(&running(), &Ordering::natural(3), 0, &Budget::default())
            .unwrap();
        assert_eq!(r.runs, 1);
        assert!(r.errors.is_empty());
        let c = probe_conjecture(&running(), &Ordering::natural(3), 0, &Budget::default()).unwrap();
        assert_eq!(c.classes, 1);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn single_sequence_records_each_prefix() {
        let r = verify_sequence(
            &running(),
            &Ordering::natural(3),
            &[1, 2],
            &Budget::default(),
        )
        .unwrap();
        let ws: Vec<Vec<usize>> = r.sequences.iter().map(|s| s.w.clone()).collect();
        assert_eq!(ws, vec![vec![], vec![2], vec![2, 3]]);
    }

    #[test]
    fn budgets_are_enforced() {
        let budget = Budget {
            max_len: 2,
            ..Budget::default()
        };
        assert!(run_full_verification(&running(), &Ordering::natural(3), 3, &budget).is_err());
        let budget = Budget {
            max_rank: 2,
            ..Budget::default()
        };
        assert!(matches!(
            probe_conjecture(&running(), &Ordering::natural(3), 1, &budget),
            Err(Error::RankTooLarge { .. })
        ));
        let budget = Budget {
            word_cap: 3,
            ..Budget::default()
        };
        let r = run_full_verification(&running(), &Ordering::natural(3), 3, &budget).unwrap();
        assert!(!r.skipped.is_empty());
        assert!(r.errors.is_empty());
    }

    #[test]
    fn rank_three_classes_are_consistent() {
        let c = probe_conjecture(&running(), &Ordering::natural(3), 5, &Budget::default()).unwrap();
        assert!(c.violations.is_empty());
        assert!(c.errors.is_empty());
    }

    #[test]
    fn loesung_scan_initial_seed() {
        let r = loesung_scan(&running(), &[vec![]]).unwrap();
        assert_eq!(r.c_vectors.len(), 3);
        assert!(r.c_vectors.iter().all(|v| v.orderings_passing == 6));
        assert!(r.fails_for_all.is_empty());
    }
}
