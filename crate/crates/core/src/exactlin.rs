//! Exact linear algebra over the rationals and the integers.
//!
//! Everything here is immutable once built. Subspaces are kept in reduced
//! row echelon form, which is the canonical form of a row space, so two
//! subspaces are equal iff their `Subspace` values are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// A vector with finitely many nonzero rational coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector {
    entries: BTreeMap<usize, Rational>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(i, Rational::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, c) in pairs {
            v.add_at(i, &c);
        }
        v
    }

    /// Dense constructor; coordinate `i` is `values[i]`.
    pub fn from_dense(values: &[i64]) -> Self {
        Self::from_pairs(values.iter().enumerate().map(|(i, &c)| (i, rat(c))))
    }

    pub fn get(&self, i: usize) -> Rational {
        self.entries.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.iter().next().map(|(&i, c)| (i, c))
    }

    pub fn add_at(&mut self, i: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(i).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&i);
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: &Rational, other: &SparseVector) {
        if factor.is_zero() {
            return;
        }
        for (&i, c) in &other.entries {
            self.add_at(i, &(factor * c));
        }
    }

    pub fn scaled(&self, factor: &Rational) -> SparseVector {
        if factor.is_zero() {
            return SparseVector::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(&i, c)| (i, c * factor)).collect(),
        }
    }

    pub fn plus(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    /// Keeps only the coordinates in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> SparseVector {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep.contains(i))
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        }
    }

    /// Relabels coordinates; colliding images are summed.
    pub fn map_coordinates(&self, f: impl Fn(usize) -> usize) -> SparseVector {
        SparseVector::from_pairs(self.entries.iter().map(|(&i, c)| (f(i), c.clone())))
    }
}

impl fmt::Display for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(i, c)| format!("{}:{}", i, format_rational(c)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A subspace of a coordinate space, stored by its reduced row echelon basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subspace {
    rows: Vec<SparseVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is a member.
    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r.get(p);
            if !c.is_zero() {
                r.add_scaled(&-c, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of a member in the RREF basis (the pivot entries).
    pub fn coordinates(&self, v: &SparseVector) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v.get(p)).collect())
    }

    /// Union of the row supports.
    pub fn support(&self) -> BTreeSet<usize> {
        self.rows.iter().flat_map(|r| r.support()).collect()
    }

    /// Dimension of the intersection with the span of the coordinates in `coords`.
    ///
    /// That intersection is the kernel of the projection onto the complementary
    /// coordinates, so its dimension is `dim - rank(projection)`.
    pub fn dim_within(&self, coords: &BTreeSet<usize>) -> usize {
        let outside: Vec<SparseVector> = self
            .rows
            .iter()
            .map(|r| SparseVector {
                entries: r
                    .entries
                    .iter()
                    .filter(|(i, _)| !coords.contains(i))
                    .map(|(&i, c)| (i, c.clone()))
                    .collect(),
            })
            .collect();
        self.dim() - rref(outside).dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        rref(self.rows.iter().chain(other.rows.iter()).cloned())
    }
}

/// Canonical reduced row echelon basis of the span of `rows`.
pub fn rref<I: IntoIterator<Item = SparseVector>>(rows: I) -> Subspace {
    let mut basis: Vec<SparseVector> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in rows {
        let mut r = v;
        for (row, &p) in basis.iter().zip(&pivots) {
            let c = r.get(p);
            if !c.is_zero() {
                r.add_scaled(&-c, row);
            }
        }
        let Some((p, lead)) = r.leading() else { continue };
        let inv = lead.recip();
        let r = r.scaled(&inv);
        for row in basis.iter_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                row.add_scaled(&-c, &r);
            }
        }
        basis.push(r);
        pivots.push(p);
    }
    // Pivot order of insertion is arbitrary; the canonical form sorts by pivot.
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    Subspace {
        rows: order.iter().map(|&i| basis[i].clone()).collect(),
        pivots: order.iter().map(|&i| pivots[i]).collect(),
    }
}

/// Finest partition of the supported coordinates such that the subspace is
/// the direct sum of its intersections with the per-block coordinate spans.
///
/// Computed as connected components of the graph joining coordinates that
/// co-occur in some RREF row. Blocks are sorted, and listed by smallest member.
pub fn finest_block_partition(space: &Subspace) -> Vec<Vec<usize>> {
    let coords: Vec<usize> = space.support().into_iter().collect();
    let position: BTreeMap<usize, usize> =
        coords.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut parent: Vec<usize> = (0..coords.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for row in space.rows() {
        let mut it = row.support();
        if let Some(first) = it.next() {
            let a = position[&first];
            for other in it {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, position[&other]));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &c) in coords.iter().enumerate() {
        let root = find(&mut parent, k);
        blocks.entry(root).or_default().push(c);
    }
    blocks.into_values().collect()
}

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn int_det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `left * original * right == diagonal matrix` with `diagonal` on its diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    /// Length `min(rows, cols)`; nonnegative, each entry divides the next.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
    /// Inverse of `right`, kept for change-of-basis bookkeeping.
    pub right_inverse: IntMatrix,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = vec![vec![BigInt::zero(); cols]; rows];
        for (i, v) in self.diagonal.iter().enumerate() {
            d[i][i] = v.clone();
        }
        d
    }
}

struct SnfState {
    a: IntMatrix,
    left: IntMatrix,
    right: IntMatrix,
    right_inv: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            row.swap(i, j);
        }
        self.right_inv.swap(i, j);
    }

    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.left] {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(src) {
                *x += k * y;
            }
        }
    }

    /// col_i += k * col_j; the inverse gets row_j -= k * row_i.
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.right] {
            for row in m.iter_mut() {
                let v = &row[j] * k;
                row[i] += v;
            }
        }
        let src = self.right_inv[i].clone();
        for (x, y) in self.right_inv[j].iter_mut().zip(src) {
            *x -= k * y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.left] {
            for x in m[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Smith normal form by elementary row and column operations, pivoting on
/// the smallest nonzero entry of the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut st = SnfState {
        a: m.clone(),
        left: int_identity(rows),
        right: int_identity(cols),
        right_inv: int_identity(cols),
    };
    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // Smallest nonzero entry of the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if st.a[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| st.a[i][j].abs() < st.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            st.swap_rows(t, bi);
            st.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                if st.a[i][t].is_zero() {
                    continue;
                }
                let q = st.a[i][t].div_floor(&st.a[t][t]);
                st.add_row(i, t, &-q);
                if !st.a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if st.a[t][j].is_zero() {
                    continue;
                }
                let q = st.a[t][j].div_floor(&st.a[t][t]);
                st.add_col(j, t, &-q);
                if !st.a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Pivot row and column are clear; enforce divisibility.
            let pivot = st.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !st.a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
    }
    SmithDecomposition {
        diagonal: (0..n).map(|i| st.a[i][i].clone()).collect(),
        left: st.left,
        right: st.right,
        right_inverse: st.right_inv,
    }
}

/// Small dense rational matrices, used for basis changes of comodules and
/// for degree-operator systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scalar(n: usize, c: &Rational) -> DenseMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn row_vector(&self, i: usize) -> SparseVector {
        SparseVector::from_pairs((0..self.cols).map(|j| (j, self.get(i, j).clone())))
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Basis of the null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<SparseVector> {
        let space = rref((0..self.rows).map(|i| self.row_vector(i)));
        let pivots: BTreeSet<usize> = space.pivots().iter().copied().collect();
        (0..self.cols)
            .filter(|j| !pivots.contains(j))
            .map(|free| {
                let mut v = SparseVector::unit(free);
                for (row, &p) in space.rows().iter().zip(space.pivots()) {
                    v.add_at(p, &-row.get(free));
                }
                v
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rref((0..self.rows).map(|i| self.row_vector(i))).dim()
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = (0..n).map(|i| {
            let mut v = self.row_vector(i);
            v.add_at(n + i, &Rational::one());
            v
        });
        let space = rref(aug);
        if space.dim() != n || space.pivots().iter().any(|&p| p >= n) {
            return None;
        }
        let mut inv = DenseMatrix::zeros(n, n);
        for (i, row) in space.rows().iter().enumerate() {
            for j in 0..n {
                inv.set(i, j, row.get(n + j));
            }
        }
        Some(inv)
    }
}

/// Solves `a * x = b`. Returns a particular solution (free variables zero)
/// and a kernel basis, or `None` when inconsistent.
pub fn solve_affine(a: &DenseMatrix, b: &[Rational]) -> Option<(Vec<Rational>, Vec<SparseVector>)> {
    let n = a.cols;
    let aug = (0..a.rows).map(|i| {
        let mut v = a.row_vector(i);
        v.add_at(n, &b[i]);
        v
    });
    let space = rref(aug);
    if space.pivots().contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &p) in space.rows().iter().zip(space.pivots()) {
        x[p] = row.get(n);
    }
    Some((x, a.kernel()))
}

/// Rational roots of a polynomial with rational coefficients (lowest degree
/// first), with multiplicity.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut poly: Vec<Rational> = coeffs.to_vec();
    while poly.last().map_or(false, |c| c.is_zero()) {
        poly.pop();
    }
    let mut roots = Vec::new();
    while poly.len() > 1 && poly[0].is_zero() {
        roots.push(Rational::zero());
        poly.remove(0);
    }
    if poly.len() <= 1 {
        return roots;
    }
    // Clear denominators to get integer coefficients.
    let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let mut out = Vec::new();
        let mut d = BigInt::one();
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                out.push(d.clone());
                out.push(&n / &d);
            }
            d += 1;
        }
        out
    };
    let candidates: BTreeSet<Rational> = divisors(&ints[0])
        .iter()
        .flat_map(|p| {
            divisors(ints.last().unwrap())
                .into_iter()
                .flat_map(move |q| {
                    let r = Rational::new(p.clone(), q);
                    [r.clone(), -r]
                })
        })
        .collect();
    let eval = |p: &[Rational], x: &Rational| p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c);
    for r in candidates {
        while poly.len() > 1 && eval(&poly, &r).is_zero() {
            roots.push(r.clone());
            // Synthetic division by (x - r).
            let deg = poly.len() - 1;
            let mut q = vec![Rational::zero(); deg];
            let mut carry = Rational::zero();
            for k in (0..=deg).rev() {
                let c = &poly[k] + &carry;
                if k > 0 {
                    q[k - 1] = c.clone();
                }
                carry = c * &r;
            }
            poly = q;
        }
    }
    roots.sort();
    roots
}

/// Characteristic polynomial `det(t I - m)` by Faddeev–LeVerrier, lowest
/// degree first.
pub fn characteristic_polynomial(m: &DenseMatrix) -> Vec<Rational> {
    let n = m.rows;
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let prev_c = coeffs[n - k + 1].clone();
        mk = m.mul(&mk);
        for i in 0..n {
            let v = mk.get(i, i) + &prev_c;
            mk.set(i, i, v);
        }
        let am = m.mul(&mk);
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + am.get(i, i));
        coeffs[n - k] = -trace / rat(k as i64);
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i64]) -> SparseVector {
        SparseVector::from_dense(v)
    }

    #[test]
    fn rref_hand_elimination() {
        let s = rref(vec![sv(&[1, 1, 0]), sv(&[0, 1, 1])]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.rows(), &[sv(&[1, 0, -1]), sv(&[0, 1, 1])]);
        assert_eq!(s.pivots(), &[0, 1]);
    }

    #[test]
    fn rref_empty_and_scaling() {
        assert_eq!(rref(Vec::new()).dim(), 0);
        let s = rref(vec![sv(&[2, 4])]);
        assert_eq!(s.rows(), &[sv(&[1, 2])]);
    }

    #[test]
    fn rref_drops_dependent_rows() {
        let s = rref(vec![sv(&[1, 2, 3]), sv(&[2, 4, 6]), sv(&[0, 0, 0])]);
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn membership() {
        let s = rref(vec![sv(&[1, 0, -1]), sv(&[0, 1, 1])]);
        assert!(s.contains(&sv(&[1, 1, 0])));
        assert!(s.contains(&SparseVector::new()));
        assert!(!rref(vec![sv(&[1, 2])]).contains(&sv(&[1, 3])));
    }

    #[test]
    fn smith_examples() {
        let d = smith_normal_form(&int_matrix(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let d = smith_normal_form(&int_identity(3));
        assert!(d.diagonal.iter().all(|x| x.is_one()));
        let d = smith_normal_form(&int_matrix(&[vec![1, -1]]));
        assert_eq!(d.diagonal, vec![BigInt::from(1)]);
    }

    #[test]
    fn smith_zero_and_empty() {
        let d = smith_normal_form(&int_matrix(&[vec![0, 0], vec![0, 0]]));
        assert!(d.diagonal.iter().all(|x| x.is_zero()));
        let d = smith_normal_form(&Vec::new());
        assert!(d.diagonal.is_empty());
    }

    #[test]
    fn smith_right_inverse_tracks() {
        let m = int_matrix(&[vec![4, 6, 2], vec![2, 8, 10]]);
        let d = smith_normal_form(&m);
        assert_eq!(int_mul(&d.right, &d.right_inverse), int_identity(3));
    }

    #[test]
    fn partition_examples() {
        let s = rref(vec![sv(&[1, 1, 0]), sv(&[0, 0, 1])]);
        assert_eq!(finest_block_partition(&s), vec![vec![0, 1], vec![2]]);
        let s = rref(vec![sv(&[1, 1, 0]), sv(&[0, 1, 1])]);
        assert_eq!(finest_block_partition(&s), vec![vec![0, 1, 2]]);
        assert!(finest_block_partition(&Subspace::zero()).is_empty());
    }

    #[test]
    fn dim_within_coordinates() {
        let s = rref(vec![sv(&[1, 1, 0]), sv(&[0, 0, 1])]);
        assert_eq!(s.dim_within(&[0].into_iter().collect()), 0);
        assert_eq!(s.dim_within(&[0, 1].into_iter().collect()), 1);
        assert_eq!(s.dim_within(&[2].into_iter().collect()), 1);
    }

    #[test]
    fn dense_inverse_and_kernel() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, rat(2));
        m.set(0, 1, rat(1));
        m.set(1, 0, rat(1));
        m.set(1, 1, rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMatrix::identity(2));
        let mut k = DenseMatrix::zeros(1, 3);
        k.set(0, 0, rat(1));
        k.set(0, 1, rat(1));
        let ker = k.kernel();
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!((v.get(0) + v.get(1)).is_zero());
        }
    }

    #[test]
    fn charpoly_and_roots() {
        // diag(1, -2, 1/2)
        let mut m = DenseMatrix::zeros(3, 3);
        m.set(0, 0, rat(1));
        m.set(1, 1, rat(-2));
        m.set(2, 2, ratio(1, 2));
        let p = characteristic_polynomial(&m);
        assert_eq!(rational_roots(&p), vec![rat(-2), ratio(1, 2), rat(1)]);
        // x^2 - 2 has no rational roots
        assert!(rational_roots(&[rat(-2), rat(0), rat(1)]).is_empty());
        // (x-3)^2
        assert_eq!(rational_roots(&[rat(9), rat(-6), rat(1)]), vec![rat(3), rat(3)]);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
        assert_eq!(format_rational(&rat(3)), "3/1");
        assert_eq!(parse_rational("3"), Some(rat(3)));
        assert_eq!(parse_rational("-6/4"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
