//! Integer matrices, skew-symmetrizable exchange matrices and mutation of
//! extended matrices `[B | C]`.
//!
//! Vectors are rows and matrices act by right multiplication. All indices are
//! zero-based; the command line converts to and from one-based labels.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R, T>(rows: &[R]) -> Result<Self>
    where
        R: AsRef<[T]>,
        T: Clone + Into<BigInt>,
    {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::LengthMismatch {
                    expected: ncols,
                    got: r.len(),
                });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_row_vecs(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::from_rows(&rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, v: &[BigInt]) {
        self.row_mut(i).clone_from_slice(v);
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Columns `start..start + width` as a new matrix.
    pub fn column_block(&self, start: usize, width: usize) -> Self {
        let mut out = Self::zeros(self.rows, width);
        for i in 0..self.rows {
            for j in 0..width {
                out[(i, j)] = self[(i, start + j)].clone();
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_vec(self.row(i)))?;
        }
        write!(f, "]")
    }
}

pub fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn unit_vec(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

/// Componentwise partial order on integer vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum VecOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// Compares `v` and `w` componentwise: `Less` when `w - v` is nonzero and
/// nonnegative.
pub fn vec_cmp(v: &[BigInt], w: &[BigInt]) -> Result<VecOrder> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    let mut le = true;
    let mut ge = true;
    for (a, b) in v.iter().zip(w) {
        match a.cmp(b) {
            std::cmp::Ordering::Less => ge = false,
            std::cmp::Ordering::Greater => le = false,
            std::cmp::Ordering::Equal => {}
        }
    }
    Ok(match (le, ge) {
        (true, true) => VecOrder::Equal,
        (true, false) => VecOrder::Less,
        (false, true) => VecOrder::Greater,
        (false, false) => VecOrder::Incomparable,
    })
}

/// Sign of a sign-coherent nonzero vector.
pub fn row_sign(c: &[BigInt]) -> Result<i8> {
    let pos = c.iter().any(|x| x.is_positive());
    let neg = c.iter().any(|x| x.is_negative());
    match (pos, neg) {
        (true, false) => Ok(1),
        (false, true) => Ok(-1),
        _ => Err(Error::NotSignCoherent(fmt_vec(c))),
    }
}

fn sgn(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Mutation of an `n × m` matrix (`m ≥ n`) at row/column `k`.
pub fn mutate_extended(m: &IntMatrix, k: usize) -> Result<IntMatrix> {
    let n = m.nrows();
    if k >= n || k >= m.ncols() {
        return Err(Error::IndexOutOfRange { index: k, rank: n });
    }
    let mut out = m.clone();
    for i in 0..n {
        let mik = &m[(i, k)];
        for j in 0..m.ncols() {
            if i == k || j == k {
                out[(i, j)] = -&m[(i, j)];
                continue;
            }
            let prod = mik * &m[(k, j)];
            if prod.is_positive() {
                if mik.is_positive() {
                    out[(i, j)] += prod;
                } else {
                    out[(i, j)] -= prod;
                }
            }
        }
    }
    Ok(out)
}

/// Smallest positive symmetrizer: `b[i][j] * d[j] == -b[j][i] * d[i]`.
///
/// Each connected component of the nonzero pattern gets its minimal positive
/// integral solution, which makes the overall gcd 1.
pub fn compute_symmetrizer(b: &IntMatrix) -> Result<Vec<BigInt>> {
    if !b.is_square() {
        return Err(Error::NotSymmetrizable(format!(
            "matrix is {}x{}, not square",
            b.nrows(),
            b.ncols()
        )));
    }
    let n = b.nrows();
    check_sign_pattern(b)?;

    let mut d: Vec<Option<BigRational>> = vec![None; n];
    let mut out = vec![BigInt::zero(); n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(BigRational::one());
        let mut component = vec![root];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let di = d[i].clone().expect("visited");
            for j in 0..n {
                if b[(i, j)].is_zero() {
                    continue;
                }
                // b_ij d_j = -b_ji d_i
                let dj = -BigRational::from(b[(j, i)].clone()) * &di
                    / BigRational::from(b[(i, j)].clone());
                match &d[j] {
                    Some(existing) if *existing != dj => {
                        return Err(Error::NotSymmetrizable(format!(
                            "inconsistent ratios around index {} (cycle condition fails)",
                            j + 1
                        )));
                    }
                    Some(_) => {}
                    None => {
                        d[j] = Some(dj);
                        component.push(j);
                        stack.push(j);
                    }
                }
            }
        }
        let lcm = component
            .iter()
            .map(|&i| d[i].as_ref().unwrap().denom().clone())
            .fold(BigInt::one(), |acc, x| acc.lcm(&x));
        let scaled: Vec<BigInt> = component
            .iter()
            .map(|&i| (d[i].as_ref().unwrap() * BigRational::from(lcm.clone())).to_integer())
            .collect();
        let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for (&i, x) in component.iter().zip(scaled) {
            out[i] = x / &g;
        }
    }
    Ok(out)
}

fn check_sign_pattern(b: &IntMatrix) -> Result<()> {
    let n = b.nrows();
    for i in 0..n {
        if !b[(i, i)].is_zero() {
            return Err(Error::NotSymmetrizable(format!(
                "nonzero diagonal entry at {}",
                i + 1
            )));
        }
        for j in (i + 1)..n {
            let (x, y) = (sgn(&b[(i, j)]), sgn(&b[(j, i)]));
            if x != -y {
                return Err(Error::NotSymmetrizable(format!(
                    "entries ({},{}) and ({},{}) do not have opposite signs",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// A skew-symmetrizable matrix together with its symmetrizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatrix {
    b: IntMatrix,
    d: Vec<BigInt>,
}

impl SkewMatrix {
    /// Validates `b` and computes its symmetrizer.
    pub fn new(b: IntMatrix) -> Result<Self> {
        let d = compute_symmetrizer(&b)?;
        Ok(Self { b, d })
    }

    /// Uses a caller-supplied symmetrizer after checking it.
    pub fn with_symmetrizer(b: IntMatrix, d: Vec<BigInt>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::NotSymmetrizable("matrix is not square".into()));
        }
        let n = b.nrows();
        if d.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: d.len(),
            });
        }
        check_sign_pattern(&b)?;
        if d.iter().any(|x| !x.is_positive()) {
            return Err(Error::NotSymmetrizable(
                "symmetrizer entries must be positive".into(),
            ));
        }
        if !d.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).is_one() {
            return Err(Error::NotSymmetrizable(
                "symmetrizer entries must have gcd 1".into(),
            ));
        }
        let s = Self { b, d };
        if !s.is_symmetrized_by(&s.d) {
            return Err(Error::NotSymmetrizable("BD is not skew-symmetric".into()));
        }
        Ok(s)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn rank(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn d(&self) -> &[BigInt] {
        &self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.b[(i, j)]
    }

    fn is_symmetrized_by(&self, d: &[BigInt]) -> bool {
        skew_symmetrized(&self.b, d)
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            Err(Error::IndexOutOfRange {
                index: k,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }
}

/// `b[i][j] * d[j] == -b[j][i] * d[i]` for all `i, j`.
pub fn skew_symmetrized(b: &IntMatrix, d: &[BigInt]) -> bool {
    let n = b.nrows();
    (0..n).all(|i| (0..n).all(|j| &b[(i, j)] * &d[j] == -(&b[(j, i)] * &d[i])))
}

/// Exchange matrix and C-matrix reached from `[B | I]` by a mutation sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub w: Vec<usize>,
    pub bw: IntMatrix,
    pub cw: IntMatrix,
}

impl Seed {
    pub fn initial(base: &SkewMatrix) -> Self {
        Self {
            w: Vec::new(),
            bw: base.b().clone(),
            cw: IntMatrix::identity(base.rank()),
        }
    }

    pub fn rank(&self) -> usize {
        self.bw.nrows()
    }

    pub fn extended(&self) -> IntMatrix {
        self.bw.hstack(&self.cw).expect("same row count")
    }

    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let n = self.rank();
        let m = mutate_extended(&self.extended(), k)?;
        let mut w = self.w.clone();
        w.push(k);
        Ok(Seed {
            w,
            bw: m.column_block(0, n),
            cw: m.column_block(n, n),
        })
    }

    /// The c-vector `c_i`.
    pub fn c(&self, i: usize) -> &[BigInt] {
        self.cw.row(i)
    }

    /// Whether `b_ik · c_k > 0`, i.e. `b_ik ≠ 0` and `sgn(b_ik)` agrees with
    /// the sign of the c-vector `c_k`.
    pub fn bc_positive(&self, i: usize, k: usize) -> Result<bool> {
        let b = &self.bw[(i, k)];
        if b.is_zero() {
            return Ok(false);
        }
        let s = row_sign(self.c(k))?;
        Ok(sgn(b) == s)
    }

    pub fn check_sign_coherence(&self) -> Result<()> {
        for i in 0..self.rank() {
            row_sign(self.c(i))?;
        }
        Ok(())
    }
}

/// Folds mutation over `w` starting from `[B | I]`.
pub fn apply_sequence(base: &SkewMatrix, w: &[usize]) -> Result<Seed> {
    let mut seed = Seed::initial(base);
    for &k in w {
        base.check_index(k)?;
        seed = seed.mutate(k)?;
    }
    Ok(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(&rows).unwrap()
    }

    fn cyclic3() -> SkewMatrix {
        SkewMatrix::new(m(&[&[0, 3, -3], &[-2, 0, 2], &[2, -2, 0]])).unwrap()
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(cyclic3().d(), &int_vec(&[3, 2, 2])[..]);
        let acyclic = SkewMatrix::new(m(&[&[0, 1, -3], &[-2, 0, -2], &[3, 1, 0]])).unwrap();
        assert_eq!(acyclic.d(), &int_vec(&[1, 2, 1])[..]);
        let skew = SkewMatrix::new(m(&[&[0, 1, -1], &[-1, 0, 2], &[1, -2, 0]])).unwrap();
        assert_eq!(skew.d(), &int_vec(&[1, 1, 1])[..]);
    }

    #[test]
    fn symmetrizer_per_component() {
        // Two blocks: {0,1} with ratio 2:1 and {2,3} skew-symmetric.
        let b = m(&[&[0, 2, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, -1, 0]]);
        assert_eq!(compute_symmetrizer(&b).unwrap(), int_vec(&[2, 1, 1, 1]));
        let b = m(&[&[0, 0], &[0, 0]]);
        assert_eq!(compute_symmetrizer(&b).unwrap(), int_vec(&[1, 1]));
    }

    #[test]
    fn symmetrizer_rejects_bad_cycles_and_signs() {
        let b = m(&[&[0, 1, -1], &[-1, 0, 1], &[2, -1, 0]]);
        assert!(matches!(
            compute_symmetrizer(&b),
            Err(Error::NotSymmetrizable(_))
        ));
        let b = m(&[&[0, 1], &[1, 0]]);
        assert!(matches!(
            compute_symmetrizer(&b),
            Err(Error::NotSymmetrizable(_))
        ));
        let b = m(&[&[1, 0], &[0, 0]]);
        assert!(compute_symmetrizer(&b).is_err());
    }

    #[test]
    fn explicit_symmetrizer_is_validated() {
        let b = m(&[&[0, 3, -3], &[-2, 0, 2], &[2, -2, 0]]);
        assert!(SkewMatrix::with_symmetrizer(b.clone(), int_vec(&[3, 2, 2])).is_ok());
        assert!(SkewMatrix::with_symmetrizer(b.clone(), int_vec(&[6, 4, 4])).is_err());
        assert!(SkewMatrix::with_symmetrizer(b, int_vec(&[1, 1, 1])).is_err());
    }

    #[test]
    fn example_one_six_sequence() {
        let seed = apply_sequence(&cyclic3(), &[1, 2, 1, 0, 1]).unwrap();
        assert_eq!(seed.bw, m(&[&[0, -3, 9], &[2, 0, -4], &[-6, 4, 0]]));
        assert_eq!(seed.cw, m(&[&[5, 18, 15], &[-2, -7, -6], &[0, -2, -1]]));
    }

    #[test]
    fn running_example_first_mutation() {
        let b = SkewMatrix::new(m(&[&[0, 1, -3], &[-2, 0, -2], &[3, 1, 0]])).unwrap();
        let seed = apply_sequence(&b, &[1]).unwrap();
        assert_eq!(seed.cw, m(&[&[1, 1, 0], &[0, -1, 0], &[0, 1, 1]]));
    }

    #[test]
    fn empty_sequence_is_initial() {
        let seed = apply_sequence(&cyclic3(), &[]).unwrap();
        assert_eq!(&seed.bw, cyclic3().b());
        assert!(seed.cw.is_identity());
    }

    #[test]
    fn mutation_index_out_of_range() {
        assert_eq!(
            apply_sequence(&cyclic3(), &[3]).unwrap_err(),
            Error::IndexOutOfRange { index: 3, rank: 3 }
        );
        let mm = Seed::initial(&cyclic3()).extended();
        assert!(mutate_extended(&mm, 7).is_err());
    }

    #[test]
    fn row_sign_cases() {
        assert_eq!(row_sign(&int_vec(&[5, 18, 15])).unwrap(), 1);
        assert_eq!(row_sign(&int_vec(&[0, -2, -1])).unwrap(), -1);
        assert!(matches!(
            row_sign(&int_vec(&[1, -1, 0])),
            Err(Error::NotSignCoherent(_))
        ));
        assert!(row_sign(&int_vec(&[0, 0])).is_err());
    }

    #[test]
    fn vec_cmp_cases() {
        assert_eq!(
            vec_cmp(&int_vec(&[0, 0, 0]), &int_vec(&[1, 0, 2])).unwrap(),
            VecOrder::Less
        );
        assert_eq!(
            vec_cmp(&int_vec(&[1, 0, 2]), &int_vec(&[0, 0, 0])).unwrap(),
            VecOrder::Greater
        );
        assert_eq!(
            vec_cmp(&int_vec(&[1, -1]), &int_vec(&[0, 0])).unwrap(),
            VecOrder::Incomparable
        );
        assert_eq!(
            vec_cmp(&int_vec(&[1, -1]), &int_vec(&[1, -1])).unwrap(),
            VecOrder::Equal
        );
        assert_eq!(
            vec_cmp(&int_vec(&[1, 0, 0]), &int_vec(&[1, 1, 0])).unwrap(),
            VecOrder::Less
        );
        assert!(vec_cmp(&int_vec(&[1]), &int_vec(&[1, 2])).is_err());
    }
}
