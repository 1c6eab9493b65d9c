//! Exact integer linear algebra.
//!
//! Everything here works over `i64` with checked arithmetic; an overflow is
//! reported as [`AlgebraError::Overflow`] instead of wrapping. Rational
//! arithmetic (for signatures) uses `Ratio<i128>`, also checked.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rows have unequal lengths")]
    Ragged,
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

fn ck_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(AlgebraError::Overflow)
}

fn ck_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(AlgebraError::Overflow)
}

/// `a - q * b`, checked.
fn ck_sub_mul(a: i64, q: i64, b: i64) -> Result<i64> {
    ck_mul(q, b).and_then(|qb| a.checked_sub(qb).ok_or(AlgebraError::Overflow))
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(AlgebraError::Ragged);
            }
            data.extend_from_slice(r.as_ref());
        }
        Ok(IntegerMatrix { rows: rows.len(), cols, data })
    }

    /// Build from row-major data; panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        IntegerMatrix { rows, cols, data }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = ck_mul(a, other[(k, j)])?;
                    out[(i, j)] = ck_add(out[(i, j)], v)?;
                }
            }
        }
        Ok(out)
    }

    /// `Tᵀ · self · T`.
    pub fn congruence(&self, t: &IntegerMatrix) -> Result<IntegerMatrix> {
        t.transpose().mul(self)?.mul(t)
    }

    /// Matrix with the given rows and columns kept, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.rows != other.rows {
            return Err(AlgebraError::Dimension("hstack row mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        Ok(out)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &IntegerMatrix) -> IntegerMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                        .ok_or(AlgebraError::Overflow)?;
                    a[i][j] = num / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| AlgebraError::Overflow)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        for j in 0..self.cols {
            self[(dst, j)] = ck_sub_mul(self[(dst, j)], q, self[(src, j)])?;
        }
        Ok(())
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        for i in 0..self.rows {
            self[(i, dst)] = ck_sub_mul(self[(i, dst)], q, self[(i, src)])?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Result of [`smith_normal_form`]: `u · m · v = d`.
///
/// The inverses of the change-of-basis matrices are tracked alongside them so
/// callers can map cokernel generators back without a separate inversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.d[(i, i)]).collect()
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntegerMatrix) -> Result<SmithForm> {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut u_inv = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let mut v_inv = IntegerMatrix::identity(cols);

    let mut rank = 0;
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| d[(i, j)] != 0)
                .min_by_key(|&(i, j)| d[(i, j)].unsigned_abs());
            let Some((pi, pj)) = pivot else {
                return Ok(SmithForm { u, u_inv, d, v, v_inv, rank });
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = d[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let q = d[(i, t)] / p;
                if q != 0 {
                    d.row_sub(i, t, q)?;
                    u.row_sub(i, t, q)?;
                    u_inv.col_sub(t, i, -q)?;
                }
                clean &= d[(i, t)] == 0;
            }
            for j in t + 1..cols {
                let q = d[(t, j)] / p;
                if q != 0 {
                    d.col_sub(j, t, q)?;
                    v.col_sub(j, t, q)?;
                    v_inv.row_sub(t, j, -q)?;
                }
                clean &= d[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| d[(i, j)] % p != 0));
            match offender {
                Some(i) => {
                    d.row_sub(t, i, -1)?;
                    u.row_sub(t, i, -1)?;
                    u_inv.col_sub(i, t, 1)?;
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        rank += 1;
    }
    Ok(SmithForm { u, u_inv, d, v, v_inv, rank })
}

/// Rank over the rationals.
pub fn rank(m: &IntegerMatrix) -> Result<usize> {
    Ok(smith_normal_form(m)?.rank)
}

/// Finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, invariant_factors: Vec::new() }
    }

    /// `Z/mZ`, with `Z/0 = Z` and `Z/±1 = 0`.
    pub fn cyclic(m: i64) -> Self {
        match m.unsigned_abs() {
            0 => Self::free(1),
            1 => Self::trivial(),
            k => AbelianGroup { free_rank: 0, invariant_factors: vec![k as i64] },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    fn is_canonical(&self) -> bool {
        self.invariant_factors.iter().all(|&d| d >= 2)
            && self.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `coker(m: Z^cols -> Z^rows)` in canonical form.
pub fn cokernel(m: &IntegerMatrix) -> Result<AbelianGroup> {
    let snf = smith_normal_form(m)?;
    let group = AbelianGroup {
        free_rank: m.rows - snf.rank,
        invariant_factors: snf.invariant_factors().into_iter().filter(|&d| d >= 2).collect(),
    };
    debug_assert!(group.is_canonical());
    Ok(group)
}

/// Columns form a Z-basis of `ker(m)` that spans a direct summand of `Z^cols`.
///
/// Each column is sign-normalized so its first nonzero entry is positive.
pub fn kernel_basis(m: &IntegerMatrix) -> Result<IntegerMatrix> {
    let snf = smith_normal_form(m)?;
    let keep: Vec<usize> = (snf.rank..m.cols).collect();
    let all: Vec<usize> = (0..m.cols).collect();
    let mut basis = snf.v.select(&all, &keep);
    for j in 0..basis.cols {
        let first = (0..basis.rows).map(|i| basis[(i, j)]).find(|&x| x != 0);
        if first.is_some_and(|x| x < 0) {
            basis.negate_col(j);
        }
    }
    Ok(basis)
}

/// Integer symmetric bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetricForm {
    matrix: IntegerMatrix,
}

impl SymmetricForm {
    pub fn new(matrix: IntegerMatrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(AlgebraError::NotSymmetric);
        }
        Ok(SymmetricForm { matrix })
    }

    pub fn empty() -> Self {
        SymmetricForm { matrix: IntegerMatrix::zeros(0, 0) }
    }

    /// Diagonal form `<a_1> + … + <a_k>`.
    pub fn diagonal(entries: &[i64]) -> Self {
        SymmetricForm { matrix: IntegerMatrix::diagonal(entries) }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn direct_sum(&self, other: &SymmetricForm) -> SymmetricForm {
        SymmetricForm { matrix: self.matrix.direct_sum(&other.matrix) }
    }

    /// `x · Q · y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(AlgebraError::Dimension("vector length".into()));
        }
        let mut acc = 0i64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc = ck_add(acc, ck_mul(ck_mul(x[i], self.matrix[(i, j)])?, y[j])?)?;
            }
        }
        Ok(acc)
    }

    pub fn square(&self, x: &[i64]) -> Result<i64> {
        self.pair(x, x)
    }

    /// `Tᵀ Q T`.
    pub fn transform(&self, t: &IntegerMatrix) -> Result<SymmetricForm> {
        Ok(SymmetricForm { matrix: self.matrix.congruence(t)? })
    }
}

impl fmt::Display for SymmetricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormInvariants {
    pub rank: usize,
    pub signature: i64,
    pub parity: Parity,
    pub det_abs: u64,
}

type Q128 = Ratio<i128>;

fn q_sub_mul(a: &Q128, f: &Q128, b: &Q128) -> Result<Q128> {
    f.checked_mul(b).and_then(|fb| a.checked_sub(&fb)).ok_or(AlgebraError::Overflow)
}

/// Congruence-diagonalize over Q and return the diagonal (pivots only).
///
/// Zero pivots are handled by swapping in a nonzero diagonal entry, or, when
/// the remaining diagonal is zero but some off-diagonal `a_ij` is not, by the
/// congruence `e_i <- e_i + e_j` which puts `2 a_ij` on the diagonal. An
/// identically zero remaining block contributes nothing.
fn rational_pivots(q: &IntegerMatrix) -> Result<Vec<Q128>> {
    let n = q.rows;
    let mut a: Vec<Vec<Q128>> =
        (0..n).map(|i| (0..n).map(|j| Q128::from_integer(q[(i, j)] as i128)).collect()).collect();
    let mut pivots = Vec::new();

    fn swap_sym(a: &mut [Vec<Q128>], i: usize, j: usize) {
        if i != j {
            a.swap(i, j);
            for row in a.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap_sym(&mut a, k, j);
            } else {
                let off = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else { break };
                // e_i <- e_i + e_j
                for c in 0..n {
                    a[i][c] = a[i][c].checked_add(&a[j][c]).ok_or(AlgebraError::Overflow)?;
                }
                for r in 0..n {
                    a[r][i] = a[r][i].checked_add(&a[r][j]).ok_or(AlgebraError::Overflow)?;
                }
                swap_sym(&mut a, k, i);
            }
        }
        let p = a[k][k];
        debug_assert!(!p.is_zero());
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].checked_div(&p).ok_or(AlgebraError::Overflow)?;
            for c in k..n {
                a[i][c] = q_sub_mul(&a[i][c], &f, &a[k][c])?;
            }
            for r in k..n {
                a[r][i] = q_sub_mul(&a[r][i], &f, &a[r][k])?;
            }
        }
        pivots.push(p);
    }
    Ok(pivots)
}

pub fn form_invariants(q: &SymmetricForm) -> Result<FormInvariants> {
    let m = &q.matrix;
    let pivots = rational_pivots(m)?;
    let rank = pivots.len();
    let signature = pivots.iter().map(|p| if p.is_positive() { 1 } else { -1 }).sum();
    let det_abs = if rank == m.rows {
        let mut det = Q128::one();
        for p in &pivots {
            det = det.checked_mul(p).ok_or(AlgebraError::Overflow)?;
        }
        debug_assert!(det.is_integer());
        u64::try_from(det.to_integer().abs()).map_err(|_| AlgebraError::Overflow)?
    } else {
        0
    };
    let parity =
        if (0..m.rows).all(|i| m[(i, i)].is_even()) { Parity::Even } else { Parity::Odd };
    Ok(FormInvariants { rank, signature, parity, det_abs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "verdict")]
pub enum Equivalence {
    /// A unimodular `t` with `tᵀ Q1 t = Q2` was found.
    Equivalent { witness: IntegerMatrix },
    /// Some invariant differs; the reason names it.
    Distinct { reason: String },
    /// Invariants agree and the bounded search found nothing.
    Unknown { searched: SearchOutcome },
}

impl Equivalence {
    pub fn label(&self) -> &'static str {
        match self {
            Equivalence::Equivalent { .. } => "equivalent",
            Equivalence::Distinct { .. } => "distinct",
            Equivalence::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    /// Every matrix with entries in `[-bound, bound]` was ruled out.
    Exhausted,
    /// The candidate space or the node budget was too large.
    BudgetExceeded,
}

/// Candidate columns per target diagonal entry are enumerated from this box
/// only if it has at most this many points.
const MAX_BOX_POINTS: u64 = 4_000_000;
/// Backtracking nodes visited per first-column candidate.
const MAX_NODES_PER_ROOT: u64 = 2_000_000;

/// Sound three-valued equivalence test.
pub fn forms_equivalent(
    q1: &SymmetricForm,
    q2: &SymmetricForm,
    search_bound: u32,
) -> Result<Equivalence> {
    forms_equivalent_with(q1, q2, search_bound, Execution::default())
}

pub fn forms_equivalent_with(
    q1: &SymmetricForm,
    q2: &SymmetricForm,
    search_bound: u32,
    exec: Execution,
) -> Result<Equivalence> {
    if q1.dim() != q2.dim() {
        return Ok(Equivalence::Distinct {
            reason: format!("lattice dimension {} vs {}", q1.dim(), q2.dim()),
        });
    }
    let (i1, i2) = (form_invariants(q1)?, form_invariants(q2)?);
    let checks: [(&str, bool); 4] = [
        ("rank", i1.rank != i2.rank),
        ("signature", i1.signature != i2.signature),
        ("parity", i1.parity != i2.parity),
        ("|det|", i1.det_abs != i2.det_abs),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, differs)| *differs) {
        return Ok(Equivalence::Distinct { reason: format!("{name} differs") });
    }
    if cokernel(q1.matrix())? != cokernel(q2.matrix())? {
        return Ok(Equivalence::Distinct { reason: "discriminant group differs".into() });
    }
    search_congruence(q1, q2, search_bound, exec)
}

fn search_congruence(
    q1: &SymmetricForm,
    q2: &SymmetricForm,
    bound: u32,
    exec: Execution,
) -> Result<Equivalence> {
    let n = q1.dim();
    if n == 0 {
        return Ok(Equivalence::Equivalent { witness: IntegerMatrix::identity(0) });
    }
    let b = i64::from(bound);
    let side = 2 * u64::from(bound) + 1;
    if side.checked_pow(n as u32).map_or(true, |p| p > MAX_BOX_POINTS) {
        return Ok(Equivalence::Unknown { searched: SearchOutcome::BudgetExceeded });
    }

    // All primitive vectors in the box, grouped by their square.
    let mut boxed: Vec<Vec<i64>> = vec![vec![-b; n]];
    let mut cur = vec![-b; n];
    loop {
        let mut i = 0;
        while i < n && cur[i] == b {
            cur[i] = -b;
            i += 1;
        }
        if i == n {
            break;
        }
        cur[i] += 1;
        boxed.push(cur.clone());
    }
    let primitive = |v: &[i64]| v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1;
    let mut candidates: Vec<Vec<Vec<i64>>> = vec![Vec::new(); n];
    for v in boxed.iter().filter(|v| primitive(v)) {
        let sq = q1.square(v)?;
        for (i, slot) in candidates.iter_mut().enumerate() {
            if q2.matrix[(i, i)] == sq {
                slot.push(v.clone());
            }
        }
    }
    if candidates.iter().any(Vec::is_empty) {
        return Ok(Equivalence::Unknown { searched: SearchOutcome::Exhausted });
    }

    let results: Vec<std::result::Result<Option<IntegerMatrix>, bool>> =
        exec.map(&candidates[0], |first| {
            let mut cols = vec![first.clone()];
            let mut nodes = 0u64;
            match extend(q1, q2, &candidates, &mut cols, &mut nodes) {
                Ok(Some(t)) => Ok(Some(t)),
                Ok(None) => Ok(None),
                Err(()) => Err(true),
            }
        });
    let mut over_budget = false;
    for r in results {
        match r {
            Ok(Some(t)) => return Ok(Equivalence::Equivalent { witness: t }),
            Ok(None) => {}
            Err(_) => over_budget = true,
        }
    }
    Ok(Equivalence::Unknown {
        searched: if over_budget { SearchOutcome::BudgetExceeded } else { SearchOutcome::Exhausted },
    })
}

/// Depth-first completion of the partial column list. `Err` = budget hit.
fn extend(
    q1: &SymmetricForm,
    q2: &SymmetricForm,
    candidates: &[Vec<Vec<i64>>],
    cols: &mut Vec<Vec<i64>>,
    nodes: &mut u64,
) -> std::result::Result<Option<IntegerMatrix>, ()> {
    let n = q1.dim();
    let k = cols.len();
    if k == n {
        let mut t = IntegerMatrix::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                t[(i, j)] = c[i];
            }
        }
        return Ok(match t.determinant() {
            Ok(d) if d.abs() == 1 => Some(t),
            _ => None,
        });
    }
    for cand in &candidates[k] {
        *nodes += 1;
        if *nodes > MAX_NODES_PER_ROOT {
            return Err(());
        }
        let fits = cols
            .iter()
            .enumerate()
            .all(|(j, c)| q1.pair(c, cand).map_or(false, |v| v == q2.matrix[(j, k)]));
        if !fits {
            continue;
        }
        cols.push(cand.clone());
        let found = extend(q1, q2, candidates, cols, nodes)?;
        cols.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows).unwrap()
    }

    fn check_snf(m: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntegerMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntegerMatrix::identity(m.cols()));
        assert_eq!(s.u.determinant().unwrap().abs(), 1);
        assert_eq!(s.v.determinant().unwrap().abs(), 1);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        let f = s.invariant_factors();
        assert!(f.iter().all(|&x| x > 0));
        assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
        s
    }

    #[test]
    fn snf_small_cases() {
        assert_eq!(check_snf(&mat(&[&[0]])).d, mat(&[&[0]]));
        assert_eq!(check_snf(&mat(&[&[7]])).d, mat(&[&[7]]));
        assert_eq!(check_snf(&mat(&[&[-7]])).d, mat(&[&[7]]));
        // gcd(2,4,6,8) = 2 and |det| = 8, so the factors are 2 and 4.
        assert_eq!(check_snf(&mat(&[&[2, 4], &[6, 8]])).d, IntegerMatrix::diagonal(&[2, 4]));
        check_snf(&IntegerMatrix::zeros(0, 3));
        check_snf(&IntegerMatrix::zeros(3, 0));
        check_snf(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(check_snf(&mat(&[&[2, 0], &[0, 3]])).invariant_factors(), vec![1, 6]);
        check_snf(&mat(&[&[0, 4, 6], &[10, 0, 15]]));
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&mat(&[&[5]])).unwrap(), AbelianGroup::cyclic(5));
        assert!(cokernel(&mat(&[&[1]])).unwrap().is_trivial());
        assert_eq!(cokernel(&mat(&[&[0]])).unwrap(), AbelianGroup::free(1));
        assert_eq!(cokernel(&IntegerMatrix::zeros(2, 2)).unwrap(), AbelianGroup::free(2));
        assert!(cokernel(&mat(&[&[0, 1], &[1, 0]])).unwrap().is_trivial());
        let g = cokernel(&mat(&[&[2, 4], &[6, 8]])).unwrap();
        assert_eq!(g.invariant_factors, vec![2, 4]);
        assert_eq!(g.to_string(), "Z/2 + Z/4");
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&IntegerMatrix::zeros(1, 3)).unwrap(), IntegerMatrix::identity(3));
        assert_eq!(kernel_basis(&mat(&[&[1, 0]])).unwrap(), mat(&[&[0], &[1]]));
        // Small-vector enumeration: the primitive solutions of 2x - y = 0 are ±(1,2).
        assert_eq!(kernel_basis(&mat(&[&[2, -1]])).unwrap(), mat(&[&[1], &[2]]));
        assert_eq!(kernel_basis(&mat(&[&[1, 2], &[3, 4]])).unwrap().cols(), 0);
    }

    #[test]
    fn form_invariant_examples() {
        for m in 1..6 {
            let inv = form_invariants(&SymmetricForm::diagonal(&[m])).unwrap();
            assert_eq!(inv.rank, 1);
            assert_eq!(inv.signature, 1);
            assert_eq!(inv.det_abs, m as u64);
            assert_eq!(inv.parity, if m % 2 == 1 { Parity::Odd } else { Parity::Even });
        }
        let pm = form_invariants(&SymmetricForm::diagonal(&[1, -1])).unwrap();
        assert_eq!(pm, FormInvariants { rank: 2, signature: 0, parity: Parity::Odd, det_abs: 1 });
        let h = SymmetricForm::new(mat(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(
            form_invariants(&h).unwrap(),
            FormInvariants { rank: 2, signature: 0, parity: Parity::Even, det_abs: 1 }
        );
        let zero = SymmetricForm::new(IntegerMatrix::zeros(3, 3)).unwrap();
        assert_eq!(form_invariants(&zero).unwrap().rank, 0);
        let e = form_invariants(&SymmetricForm::empty()).unwrap();
        assert_eq!((e.rank, e.signature, e.det_abs), (0, 0, 1));
        // degenerate with off-diagonal only in a later block
        let q = SymmetricForm::new(mat(&[&[0, 0, 0], &[0, 0, 3], &[0, 3, 0]])).unwrap();
        let inv = form_invariants(&q).unwrap();
        assert_eq!((inv.rank, inv.signature, inv.det_abs), (2, 0, 0));
    }

    #[test]
    fn not_symmetric_rejected() {
        assert_eq!(SymmetricForm::new(mat(&[&[0, 1], &[0, 0]])), Err(AlgebraError::NotSymmetric));
    }

    #[test]
    fn equivalence_examples() {
        let pm = SymmetricForm::diagonal(&[1, -1]);
        match forms_equivalent(&pm, &pm, 2).unwrap() {
            Equivalence::Equivalent { witness } => {
                assert_eq!(pm.transform(&witness).unwrap(), pm);
            }
            other => panic!("expected equivalent, got {other:?}"),
        }
        let h = SymmetricForm::new(mat(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(forms_equivalent(&pm, &h, 3).unwrap().label(), "distinct");

        // [[2,1],[1,2]] is even, diag(1,3) is odd: parity separates them even
        // though rank, signature, |det| and the discriminant group Z/3 agree.
        let a2 = SymmetricForm::new(mat(&[&[2, 1], &[1, 2]])).unwrap();
        let d13 = SymmetricForm::diagonal(&[1, 3]);
        assert_eq!(
            forms_equivalent(&a2, &d13, 3).unwrap(),
            Equivalence::Distinct { reason: "parity differs".into() }
        );

        // <1>+<-1> is congruent to [[1,0],[0,-1]] after a nontrivial base change
        let t = mat(&[&[2, 1], &[1, 1]]);
        let moved = pm.transform(&t).unwrap();
        assert_eq!(forms_equivalent(&pm, &moved, 3).unwrap().label(), "equivalent");
    }

    #[test]
    fn equivalence_search_exhausts_without_witness() {
        // <1>+<1>+<-1> vs <1>+<-1>+<-1>... differ by signature; build a pair
        // with equal invariants that the box cannot connect: <3>+<-3> vs
        // [[3,0],[0,-3]] transformed by a matrix with large entries.
        let q = SymmetricForm::diagonal(&[3, -3]);
        let t = mat(&[&[5, 4], &[6, 5]]);
        let far = q.transform(&t).unwrap();
        assert_eq!(forms_equivalent(&q, &far, 1).unwrap().label(), "unknown");
        assert_eq!(forms_equivalent(&q, &far, 6).unwrap().label(), "equivalent");
    }

    #[test]
    fn overflow_is_reported() {
        let big = mat(&[&[i64::MAX, 1], &[1, i64::MAX]]);
        assert_eq!(big.mul(&big), Err(AlgebraError::Overflow));
    }
}
