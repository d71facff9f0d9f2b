//! Exact subspace arithmetic over the rationals.
//!
//! A [`Subspace`] is stored as its reduced row-echelon basis, so two
//! subspaces are equal exactly when their representations are identical.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Vector = Vec<Rational>;

/// Reduce `rows` (each of length `ncols`) to reduced row-echelon form.
/// Zero rows are dropped; the returned pivot columns are strictly increasing.
pub fn rref(ncols: usize, mut rows: Vec<Vector>) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        if !inv.is_one() {
            for x in rows[rank][col..].iter_mut() {
                *x *= &inv;
            }
        }
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot_row, tail) = tail.split_first_mut().expect("pivot row exists");
        for other in head.iter_mut().chain(tail.iter_mut()) {
            if other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Rank of an arbitrary rational matrix with `ncols` columns.
pub fn rank(ncols: usize, rows: Vec<Vector>) -> usize {
    rref(ncols, rows).1.len()
}

pub fn int_vector(entries: &[i64]) -> Vector {
    entries.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
}

/// Standard basis vector `e_i` of dimension `n`.
pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// A subspace of `Q^n`, held as a canonical reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{}) [", self.dim(), self.ambient_dim)?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit_vector(ambient_dim, i)).collect();
        Subspace { ambient_dim, basis, pivots: (0..ambient_dim).collect() }
    }

    /// Span of arbitrary vectors in `Q^ambient_dim`.
    pub fn span(ambient_dim: usize, vectors: Vec<Vector>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::input(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                ambient_dim
            )));
        }
        let (basis, pivots) = rref(ambient_dim, vectors);
        Ok(Subspace { ambient_dim, basis, pivots })
    }

    /// Span of integer vectors; convenient for tests and graph-built relations.
    pub fn span_int(ambient_dim: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        Self::span(ambient_dim, vectors.iter().map(|v| int_vector(v)).collect())
    }

    /// Span of standard basis vectors with the given coordinates.
    pub fn coordinate(ambient_dim: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        let mut coords: Vec<usize> = coords.into_iter().filter(|&c| c < ambient_dim).collect();
        coords.sort_unstable();
        coords.dedup();
        let basis = coords.iter().map(|&c| unit_vector(ambient_dim, c)).collect();
        Subspace { ambient_dim, basis, pivots: coords }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::input(format!(
                "ambient dimension mismatch: {} vs {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        let rows = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        let (basis, pivots) = rref(self.ambient_dim, rows);
        Ok(Subspace { ambient_dim: self.ambient_dim, basis, pivots })
    }

    /// Sum of many subspaces of a common ambient space.
    pub fn sum_all<'a>(ambient_dim: usize, parts: impl IntoIterator<Item = &'a Subspace>) -> Result<Subspace> {
        let mut rows = Vec::new();
        for p in parts {
            if p.ambient_dim != ambient_dim {
                return Err(Error::input(format!(
                    "ambient dimension mismatch: {} vs {}",
                    p.ambient_dim, ambient_dim
                )));
            }
            rows.extend(p.basis.iter().cloned());
        }
        let (basis, pivots) = rref(ambient_dim, rows);
        Ok(Subspace { ambient_dim, basis, pivots })
    }

    /// Intersection, computed through the duality `A ∩ B = (A^⊥ + B^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_full() {
            return Ok(self.clone());
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone());
        }
        self.orthogonal_complement()
            .sum(&other.orthogonal_complement())
            .map(|s| s.orthogonal_complement())
    }

    /// Orthogonal complement under the standard (coordinate) pairing.
    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim;
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        // Kernel of the RREF matrix: one vector per free column. Placing the
        // free coordinate last keeps the rows ordered by their leading entry.
        let mut rows = Vec::with_capacity(n - self.dim());
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if !row[free].is_zero() {
                    v[p] = -row[free].clone();
                }
            }
            rows.push(v);
        }
        let (basis, pivots) = rref(n, rows);
        Subspace { ambient_dim: n, basis, pivots }
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut residual = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if residual[p].is_zero() {
                continue;
            }
            let factor = residual[p].clone();
            for (x, r) in residual.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        residual.iter().all(Zero::is_zero)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && other.dim() <= self.dim()
            && other.basis.iter().all(|v| self.contains_vector(v))
    }

    /// Some complement of `self` inside `outer` (`self ⊆ outer` required):
    /// a subspace `C ⊆ outer` with `self ⊕ C = outer`.
    pub fn complement_in(&self, outer: &Subspace) -> Result<Subspace> {
        self.check_ambient(outer)?;
        if !outer.contains(self) {
            return Err(Error::input("complement_in: subspace is not contained in the outer space"));
        }
        let mut acc = self.clone();
        let mut chosen = Vec::new();
        for v in &outer.basis {
            if acc.dim() == outer.dim() {
                break;
            }
            if !acc.contains_vector(v) {
                chosen.push(v.clone());
                acc = acc.sum(&Subspace::span(self.ambient_dim, vec![v.clone()])?)?;
            }
        }
        Subspace::span(self.ambient_dim, chosen)
    }

    /// The subspace `C^left ⊗ self ⊗ C^right` of `C^(left·n·right)`, using the
    /// lexicographic tensor index `(i_left, i_mid, i_right)`.
    pub fn tensor_embed(&self, left: usize, right: usize) -> Subspace {
        let n = self.ambient_dim;
        let ambient = left * n * right;
        let mut basis = Vec::with_capacity(left * self.dim() * right);
        let mut pivots = Vec::with_capacity(basis.capacity());
        // Ordering rows by (l, basis row, r) keeps pivots strictly increasing
        // and leaves every pivot column clear in the other rows.
        for l in 0..left {
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                for r in 0..right {
                    let mut v = vec![Rational::zero(); ambient];
                    for (c, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            v[(l * n + c) * right + r] = x.clone();
                        }
                    }
                    basis.push(v);
                    pivots.push((l * n + p) * right + r);
                }
            }
        }
        Subspace { ambient_dim: ambient, basis, pivots }
    }

    /// Basis rendered as integer-or-fraction strings, for reports.
    pub fn basis_strings(&self) -> Vec<Vec<String>> {
        self.basis
            .iter()
            .map(|row| row.iter().map(|x| if x.is_integer() { x.numer().to_string() } else { x.to_string() }).collect())
            .collect()
    }

    /// Largest absolute numerator/denominator in the basis; used by tests to
    /// watch coefficient growth.
    pub fn max_height(&self) -> BigInt {
        self.basis
            .iter()
            .flatten()
            .map(|x| std::cmp::max(x.numer().abs(), x.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// `W_dim − dim(S)`: dimension of the quotient of the ambient space by `S`.
pub fn quotient_dim(w_dim: usize, s: &Subspace) -> Result<usize> {
    if s.ambient_dim() != w_dim {
        return Err(Error::input(format!(
            "quotient_dim: subspace lives in dimension {}, not {}",
            s.ambient_dim(),
            w_dim
        )));
    }
    Ok(w_dim - s.dim())
}
