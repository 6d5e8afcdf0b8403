//! Exact integer matrices, Smith normal form, and subgroup-of-Z^n
//! arithmetic.
//!
//! Everything is computed over arbitrary-precision integers; ranks and
//! indices are exact. This module also carries the relation-system rank
//! computations that serve as an independent route to the twist-subgroup
//! ranks produced elsewhere in the crate.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::partition::{CircleRef, PartitionedSurface, Selection};
use crate::surface::{classify_piece, PieceClass};
use crate::Error;

/// Dense integer matrix in row-major order. Zero rows or columns are legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    /// Matrix from integer rows; every row must have the same length.
    pub fn from_i64(rows_data: &[Vec<i64>]) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zero(rows, cols);
        for (i, row) in rows_data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                *m.at_mut(i, j) = BigInt::from(*x);
            }
        }
        m
    }

    /// Matrix from big-integer rows with an explicit column count, so an
    /// empty generator list still knows its ambient dimension.
    pub fn from_rows(cols: usize, rows_data: Vec<Vec<BigInt>>) -> Self {
        let rows = rows_data.len();
        let mut m = IntMatrix::zero(rows, cols);
        for (i, row) in rows_data.into_iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, x) in row.into_iter().enumerate() {
                *m.at_mut(i, j) = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    /// Vertical concatenation; both operands must have the same width.
    pub fn stack(&self, below: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, below.cols, "dimension mismatch");
        let mut m = IntMatrix::zero(self.rows + below.rows, self.cols);
        m.data[..self.data.len()].clone_from_slice(&self.data);
        m.data[self.data.len()..].clone_from_slice(&below.data);
        m
    }

    pub fn neg(&self) -> IntMatrix {
        let mut m = self.clone();
        for x in &mut m.data {
            *x = -&*x;
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m.at(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.row_swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                    *m.at_mut(i, j) = num / &prev;
                }
                *m.at_mut(i, k) = BigInt::zero();
            }
            prev = m.at(k, k).clone();
        }
        m.at(n - 1, n - 1) * sign
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            let (a, b) = (i * self.cols + c, j * self.cols + c);
            self.data.swap(a, b);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            let (a, b) = (r * self.cols + i, r * self.cols + j);
            self.data.swap(a, b);
        }
    }

    fn row_neg(&mut self, i: usize) {
        for c in 0..self.cols {
            let x = &mut self.data[i * self.cols + c];
            *x = -&*x;
        }
    }

    /// row_i -= q * row_t
    fn row_sub_mul(&mut self, i: usize, t: usize, q: &BigInt) {
        for c in 0..self.cols {
            let sub = q * self.at(t, c);
            *self.at_mut(i, c) -= sub;
        }
    }

    /// row_i += q * row_t
    fn row_add_mul(&mut self, i: usize, t: usize, q: &BigInt) {
        for c in 0..self.cols {
            let add = q * self.at(t, c);
            *self.at_mut(i, c) += add;
        }
    }

    /// col_j -= q * col_t
    fn col_sub_mul(&mut self, j: usize, t: usize, q: &BigInt) {
        for r in 0..self.rows {
            let sub = q * self.at(r, t);
            *self.at_mut(r, j) -= sub;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of a Smith normal form computation: `u * m * v == d` with `u`, `v`
/// unimodular, `d` diagonal with nonnegative entries in a divisibility chain.
/// `v_inv` is the exact inverse of `v`, tracked during elimination.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.at(i, i).clone()).collect()
    }
}

/// Quotient of `a / p` rounded to the nearest integer, so the remainder
/// satisfies `2|r| <= |p|`. Keeps elimination chains short and entry growth
/// tame where truncated quotients would let coefficients explode.
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let mut q = a / p;
    let r = a - &q * p;
    if (&r + &r).abs() > p.abs() {
        if r.is_negative() == p.is_negative() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.at(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if x.abs() < a.at(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Smith normal form with full transform tracking.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&a, t) else { break };
        a.row_swap(pi, t);
        u.row_swap(pi, t);
        a.col_swap(pj, t);
        v.col_swap(pj, t);
        v_inv.row_swap(pj, t);
        loop {
            // Clear the pivot column completely before touching the pivot
            // row: interleaving single remainder steps between row and
            // column phases compounds the quotients and blows entry sizes
            // up double-exponentially.
            let mut col_clean = false;
            while !col_clean {
                col_clean = true;
                for i in t + 1..rows {
                    if a.at(i, t).is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(a.at(i, t), a.at(t, t));
                    if !q.is_zero() {
                        a.row_sub_mul(i, t, &q);
                        u.row_sub_mul(i, t, &q);
                    }
                    if !a.at(i, t).is_zero() {
                        a.row_swap(i, t);
                        u.row_swap(i, t);
                        col_clean = false;
                    }
                }
            }
            let mut row_clean = false;
            while !row_clean {
                row_clean = true;
                for j in t + 1..cols {
                    if a.at(t, j).is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(a.at(t, j), a.at(t, t));
                    if !q.is_zero() {
                        a.col_sub_mul(j, t, &q);
                        v.col_sub_mul(j, t, &q);
                        // (V E)^-1 = E^-1 V^-1: undoing col_j -= q col_t is
                        // the row operation row_t += q row_j on the inverse.
                        v_inv.row_add_mul(t, j, &q);
                    }
                    if !a.at(t, j).is_zero() {
                        a.col_swap(j, t);
                        v.col_swap(j, t);
                        v_inv.row_swap(j, t);
                        row_clean = false;
                    }
                }
            }
            // Column swaps can reintroduce entries below the pivot.
            if (t + 1..rows).any(|i| !a.at(i, t).is_zero()) {
                continue;
            }
            let one = BigInt::one();
            let mut divisible = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(a.at(i, j) % a.at(t, t)).is_zero() {
                        a.row_add_mul(t, i, &one);
                        u.row_add_mul(t, i, &one);
                        divisible = false;
                        break 'scan;
                    }
                }
            }
            if divisible {
                break;
            }
        }
        if a.at(t, t).is_negative() {
            a.row_neg(t);
            u.row_neg(t);
        }
        t += 1;
    }
    SmithDecomposition { d: a, u, v, v_inv, rank: t }
}

/// Index of a subgroup of Z^n: a positive integer or infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

impl Index {
    pub fn mul(&self, other: &Index) -> Index {
        match (self, other) {
            (Index::Finite(a), Index::Finite(b)) => Index::Finite(a * b),
            _ => Index::Infinite,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => f.write_str("infinite"),
        }
    }
}

/// Subgroup of Z^n presented by generator rows.
#[derive(Debug, Clone)]
pub struct Lattice {
    ambient_rank: usize,
    gens: IntMatrix,
}

impl Lattice {
    pub fn new(ambient_rank: usize, gens: IntMatrix) -> Self {
        assert_eq!(gens.cols(), ambient_rank, "generator width must match ambient rank");
        Lattice { ambient_rank, gens }
    }

    pub fn from_rows(ambient_rank: usize, rows: &[Vec<i64>]) -> Self {
        let rows_big: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect();
        Lattice::new(ambient_rank, IntMatrix::from_rows(ambient_rank, rows_big))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(&self.gens).rank
    }

    /// A basis as rows: `d_i` times the i-th row of `v_inv`, one per nonzero
    /// diagonal entry.
    pub fn basis(&self) -> IntMatrix {
        let snf = smith_normal_form(&self.gens);
        let rows = (0..snf.rank)
            .map(|i| {
                (0..self.ambient_rank)
                    .map(|j| snf.d.at(i, i) * snf.v_inv.at(i, j))
                    .collect::<Vec<BigInt>>()
            })
            .collect();
        IntMatrix::from_rows(self.ambient_rank, rows)
    }

    /// Coordinates of `h` in the `basis()` rows, or `None` when `h` is not a
    /// member.
    pub fn coordinates(&self, h: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(h.len(), self.ambient_rank, "vector length must match ambient rank");
        let snf = smith_normal_form(&self.gens);
        let mut w = vec![BigInt::zero(); self.ambient_rank];
        for (j, wj) in w.iter_mut().enumerate() {
            for (i, hi) in h.iter().enumerate() {
                *wj += hi * snf.v.at(i, j);
            }
        }
        let mut coords = Vec::with_capacity(snf.rank);
        for (i, wi) in w.iter().enumerate() {
            if i < snf.rank {
                let d = snf.d.at(i, i);
                if !(wi % d).is_zero() {
                    return None;
                }
                coords.push(wi / d);
            } else if !wi.is_zero() {
                return None;
            }
        }
        Some(coords)
    }

    pub fn contains(&self, h: &[BigInt]) -> bool {
        self.coordinates(h).is_some()
    }

    /// Smallest subgroup containing both operands.
    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient_rank, other.ambient_rank, "ambient rank mismatch");
        Lattice::new(self.ambient_rank, self.gens.stack(&other.gens))
    }

    /// Exact intersection, via the integral left kernel of the stacked
    /// matrix [A; -B]: a relation x·A - y·B = 0 exhibits the common element
    /// x·A.
    pub fn intersection(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient_rank, other.ambient_rank, "ambient rank mismatch");
        let stacked = self.gens.stack(&other.gens.neg());
        let snf = smith_normal_form(&stacked);
        let k0 = self.gens.rows();
        let mut rows = Vec::new();
        for i in snf.rank..stacked.rows() {
            let mut g = vec![BigInt::zero(); self.ambient_rank];
            for x in 0..k0 {
                let c = snf.u.at(i, x);
                if c.is_zero() {
                    continue;
                }
                for (j, gj) in g.iter_mut().enumerate() {
                    *gj += c * self.gens.at(x, j);
                }
            }
            rows.push(g);
        }
        Lattice::new(self.ambient_rank, IntMatrix::from_rows(self.ambient_rank, rows))
    }

    /// Block-diagonal embedding into Z^(n0 + n1).
    /// Image of the subgroup under the homomorphism that sends an ambient
    /// row vector `v` to `v * map`. The map matrix has `ambient_rank` rows;
    /// its column count is the ambient rank of the image.
    pub fn image(&self, map: &IntMatrix) -> Lattice {
        assert_eq!(map.rows(), self.ambient_rank, "map must consume the ambient rank");
        Lattice::new(map.cols(), self.gens.mul(map))
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.ambient_rank + other.ambient_rank;
        let mut rows = Vec::new();
        for i in 0..self.gens.rows() {
            let mut r = self.gens.row(i).to_vec();
            r.extend(vec![BigInt::zero(); other.ambient_rank]);
            rows.push(r);
        }
        for i in 0..other.gens.rows() {
            let mut r = vec![BigInt::zero(); self.ambient_rank];
            r.extend(other.gens.row(i).to_vec());
            rows.push(r);
        }
        Lattice::new(n, IntMatrix::from_rows(n, rows))
    }
}

/// Index of the subgroup in the full ambient Z^n: the product of the
/// diagonal entries when the rank is full, infinite otherwise.
pub fn subgroup_index(l: &Lattice) -> Index {
    let snf = smith_normal_form(l.generators());
    if snf.rank < l.ambient_rank() {
        return Index::Infinite;
    }
    let mut prod = BigInt::one();
    for i in 0..l.ambient_rank() {
        prod *= snf.d.at(i, i);
    }
    Index::Finite(prod)
}

/// Index of `h` inside `g`. Fails when some generator of `h` lies outside
/// `g`; returns `Infinite` when the ranks differ.
pub fn relative_index(g: &Lattice, h: &Lattice) -> Result<Index, Error> {
    assert_eq!(g.ambient_rank(), h.ambient_rank(), "ambient rank mismatch");
    let rank_g = g.rank();
    let mut rows = Vec::new();
    for i in 0..h.generators().rows() {
        let coords = g.coordinates(h.generators().row(i)).ok_or(Error::NotASubgroup)?;
        rows.push(coords);
    }
    let c = IntMatrix::from_rows(rank_g, rows);
    Ok(subgroup_index(&Lattice::new(rank_g, c)))
}

/// Brute-force order of `Z^n / h` for a square full-rank generator matrix.
///
/// Cosets are enumerated by breadth-first search from the origin, with
/// membership decided by Cramer's rule on the generator matrix. No normal
/// form is computed anywhere, so the result is an independent check on
/// [`subgroup_index`]. Returns `None` when the generators are not square,
/// their determinant vanishes, or the enumeration exceeds `cap` cosets.
pub fn coset_count(h: &Lattice, cap: usize) -> Option<u64> {
    let n = h.ambient_rank();
    if n == 0 {
        return Some(1);
    }
    let gens = h.generators();
    if gens.rows() != n {
        return None;
    }
    let det = gens.determinant();
    if det.is_zero() {
        return None;
    }
    let member = |v: &[BigInt]| -> bool {
        (0..n).all(|i| {
            let mut m = IntMatrix::zero(n, n);
            for r in 0..n {
                for c in 0..n {
                    *m.at_mut(r, c) = if c == i { v[r].clone() } else { gens.at(c, r).clone() };
                }
            }
            (m.determinant() % &det).is_zero()
        })
    };
    let origin = vec![BigInt::zero(); n];
    let mut reps = vec![origin.clone()];
    let mut queue = std::collections::VecDeque::from([origin]);
    while let Some(x) = queue.pop_front() {
        for i in 0..n {
            for step in [1, -1] {
                let mut y = x.clone();
                y[i] += step;
                let diff = |r: &Vec<BigInt>| -> Vec<BigInt> {
                    y.iter().zip(r).map(|(a, b)| a - b).collect()
                };
                if !reps.iter().any(|r| member(&diff(r))) {
                    if reps.len() >= cap {
                        return None;
                    }
                    reps.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
    }
    Some(reps.len() as u64)
}

/// Two subgroups of Z^n share a finite-index common subgroup exactly when
/// they have the same rank as each other and as their sum.
pub fn lattice_commensurable(a: &Lattice, b: &Lattice) -> bool {
    let (ra, rb) = (a.rank(), b.rank());
    ra == rb && a.sum(b).rank() == ra
}

/// Multiplicativity of the relative index under direct sums:
/// [g0 (+) g1 : h0 (+) h1] == [g0 : h0] * [g1 : h1].
pub fn verify_index_product(
    g0: &Lattice,
    h0: &Lattice,
    g1: &Lattice,
    h1: &Lattice,
) -> Result<bool, Error> {
    let lhs = relative_index(&g0.direct_sum(g1), &h0.direct_sum(h1))?;
    let rhs = relative_index(g0, h0)?.mul(&relative_index(g1, h1)?);
    Ok(lhs == rhs)
}

/// Rank of the subgroup generated by the boundary, meridian and core twists
/// of the selected subsurface, computed as generators minus the Smith rank
/// of the exterior-cylinder relation system.
///
/// Generator count per component follows its type: one meridian twist for an
/// annulus component, core plus boundary twists for a Klein bottle with one
/// hole, one twist per boundary circle otherwise. Each exterior cylinder of
/// the complement identifies the twists at its two edges.
pub fn twist_lattice_rank(p: &PartitionedSurface, sel: &Selection) -> Result<usize, Error> {
    let cands = crate::subsurface::twist_candidates(p, sel)?;
    if !crate::subsurface::is_generic_subsurface(p, sel)? {
        return Err(Error::NotGeneric);
    }
    if !crate::subsurface::is_virtually_abelian(p, sel)? {
        return Err(Error::NotVirtuallyAbelian);
    }
    debug_assert!(
        cands.nongeneric_boundary.is_empty() && cands.nongeneric_meridians.is_empty(),
        "generic subsurfaces have no nongeneric twist candidates"
    );
    // Coordinates: one per generator. Boundary circles of annulus-typed
    // components share their component's meridian coordinate.
    let mut coord_of_boundary: std::collections::BTreeMap<CircleRef, usize> =
        std::collections::BTreeMap::new();
    let mut total = 0usize;
    for (idx, (_, ty)) in cands.components.iter().enumerate() {
        let class = classify_piece(*ty);
        if class == PieceClass::Annulus {
            let meridian = total;
            total += 1;
            for b in &cands.boundary[idx] {
                coord_of_boundary.insert(b.clone(), meridian);
            }
        } else {
            if class == PieceClass::KleinBottleOneHole {
                // The core twist occupies a coordinate of its own; no
                // exterior-cylinder relation ever touches it.
                total += 1;
            }
            for b in &cands.boundary[idx] {
                coord_of_boundary.insert(b.clone(), total);
                total += 1;
            }
        }
    }
    let mut rows = Vec::new();
    for (_, (b, b2)) in &cands.cylinders {
        let mut row = vec![BigInt::zero(); total];
        row[coord_of_boundary[b]] += 1;
        row[coord_of_boundary[b2]] -= 1;
        rows.push(row);
    }
    let relations = IntMatrix::from_rows(total, rows);
    Ok(total - smith_normal_form(&relations).rank)
}

/// Rank of the kernel generator system as a relation matrix over the free
/// abelian group on the candidate circles, computed by Smith normal form.
/// This is the matrix-route counterpart of the direct generator count.
pub fn kernel_relation_rank(p: &PartitionedSurface, sel: &Selection) -> Result<usize, Error> {
    let cands = crate::subsurface::twist_candidates(p, sel)?;
    // Coordinates: every boundary circle of every component, plus one
    // meridian coordinate per annulus-typed component.
    let mut coord: std::collections::BTreeMap<CircleRef, usize> = std::collections::BTreeMap::new();
    for per_comp in &cands.boundary {
        for b in per_comp {
            let next = coord.len();
            coord.entry(b.clone()).or_insert(next);
        }
    }
    let mut meridian_coord: std::collections::BTreeMap<usize, usize> =
        std::collections::BTreeMap::new();
    let mut total = coord.len();
    for (idx, (_, ty)) in cands.components.iter().enumerate() {
        if classify_piece(*ty) == PieceClass::Annulus {
            meridian_coord.insert(idx, total);
            total += 1;
        }
    }
    let mut rows = Vec::new();
    for a in &cands.nongeneric_boundary {
        let mut row = vec![BigInt::zero(); total];
        row[coord[a]] = BigInt::one();
        rows.push(row);
    }
    for idx in &cands.nongeneric_meridians {
        let mut row = vec![BigInt::zero(); total];
        row[meridian_coord[idx]] = BigInt::one();
        rows.push(row);
    }
    for (_, (b, b2)) in &cands.cylinders {
        let mut row = vec![BigInt::zero(); total];
        row[coord[b]] += 1;
        row[coord[b2]] -= 1;
        rows.push(row);
    }
    let m = IntMatrix::from_rows(total, rows);
    Ok(smith_normal_form(&m).rank)
}
