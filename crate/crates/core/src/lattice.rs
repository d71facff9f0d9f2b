//! Distributivity of finite collections of subspaces.
//!
//! A collection is distributive when the lattice it generates under `+` and
//! `∩` is distributive, equivalently when some direct-sum decomposition of
//! the ambient space expresses every member as a partial sum. Three
//! subspaces are decided by the median identity; larger collections by
//! growing the generated lattice one subspace at a time.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Subspace;

pub const DEFAULT_LATTICE_CAP: usize = 10_000;

/// A failed lattice identity: the two sides that should have been equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeFailure {
    pub identity: String,
    pub lhs: Subspace,
    pub rhs: Subspace,
}

/// A common direct-sum decomposition of the ambient space: each input
/// subspace equals the sum of the summands listed for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub summands: Vec<Subspace>,
    pub membership: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    pub summand_dims: Vec<usize>,
    pub membership: Vec<Vec<usize>>,
}

impl DecompositionWitness {
    pub fn summary(&self) -> WitnessSummary {
        WitnessSummary {
            summand_dims: self.summands.iter().map(Subspace::dim).collect(),
            membership: self.membership.clone(),
        }
    }

    /// Re-derive every claimed property from scratch.
    pub fn verify(&self, ambient_dim: usize, inputs: &[Subspace]) -> Result<bool> {
        let total: usize = self.summands.iter().map(Subspace::dim).sum();
        if total != ambient_dim || !Subspace::sum_all(ambient_dim, &self.summands)?.is_full() {
            return Ok(false);
        }
        for (x, members) in inputs.iter().zip(&self.membership) {
            let s = Subspace::sum_all(ambient_dim, members.iter().map(|&i| &self.summands[i]))?;
            if &s != x {
                return Ok(false);
            }
        }
        Ok(inputs.len() == self.membership.len())
    }
}

#[derive(Clone, Debug)]
pub struct Distributivity {
    pub distributive: bool,
    pub failure: Option<LatticeFailure>,
    pub decomposition: Option<DecompositionWitness>,
}

impl Distributivity {
    fn pass(decomposition: Option<DecompositionWitness>) -> Self {
        Distributivity { distributive: true, failure: None, decomposition }
    }

    fn fail(failure: LatticeFailure) -> Self {
        Distributivity { distributive: false, failure: Some(failure), decomposition: None }
    }
}

/// Median test for three elements of a modular lattice: they generate a
/// distributive sublattice iff
/// `(X₁∩X₂) + (X₂∩X₃) + (X₁∩X₃) = (X₁+X₂) ∩ (X₂+X₃) ∩ (X₁+X₃)`.
/// Returns `(holds, join-of-meets, meet-of-joins)`.
pub fn median_test(x1: &Subspace, x2: &Subspace, x3: &Subspace) -> Result<(bool, Subspace, Subspace)> {
    let lhs = x1.intersect(x2)?.sum(&x2.intersect(x3)?)?.sum(&x1.intersect(x3)?)?;
    let rhs = x1.sum(x2)?.intersect(&x2.sum(x3)?)?.intersect(&x1.sum(x3)?)?;
    Ok((lhs == rhs, lhs, rhs))
}

/// A finite set of subspaces closed under `+` and `∩`.
struct Closure {
    elements: Vec<Subspace>,
    seen: HashSet<Subspace>,
    cap: usize,
}

impl Closure {
    fn new(ambient_dim: usize, cap: usize) -> Self {
        let mut c = Closure { elements: Vec::new(), seen: HashSet::new(), cap };
        c.elements.push(Subspace::zero(ambient_dim));
        c.elements.push(Subspace::full(ambient_dim));
        c.seen.extend(c.elements.iter().cloned());
        c
    }

    fn insert(&mut self, s: Subspace) -> Result<bool> {
        if self.seen.contains(&s) {
            return Ok(false);
        }
        if self.elements.len() >= self.cap {
            return Err(Error::limit(format!("lattice closure exceeded {} elements", self.cap)));
        }
        self.seen.insert(s.clone());
        self.elements.push(s);
        Ok(true)
    }

    /// Add `x` and close again under pairwise `+` and `∩`.
    fn add_and_close(&mut self, x: Subspace) -> Result<()> {
        let mut frontier = self.elements.len();
        if !self.insert(x)? {
            return Ok(());
        }
        while frontier < self.elements.len() {
            let end = self.elements.len();
            for i in frontier..end {
                for j in 0..end {
                    let (a, b) = (self.elements[i].clone(), self.elements[j].clone());
                    self.insert(a.sum(&b)?)?;
                    self.insert(a.intersect(&b)?)?;
                }
            }
            frontier = end;
        }
        Ok(())
    }
}

/// Check `x` against both distributive laws over all pairs of `lattice`.
fn check_laws(x: &Subspace, lattice: &[Subspace]) -> Result<Option<LatticeFailure>> {
    for a in lattice {
        for b in lattice {
            let lhs = x.intersect(&a.sum(b)?)?;
            let rhs = x.intersect(a)?.sum(&x.intersect(b)?)?;
            if lhs != rhs {
                return Ok(Some(LatticeFailure { identity: "X ∩ (a + b) = (X ∩ a) + (X ∩ b)".into(), lhs, rhs }));
            }
            let lhs = x.sum(&a.intersect(b)?)?;
            let rhs = x.sum(a)?.intersect(&x.sum(b)?)?;
            if lhs != rhs {
                return Ok(Some(LatticeFailure { identity: "X + (a ∩ b) = (X + a) ∩ (X + b)".into(), lhs, rhs }));
            }
        }
    }
    Ok(None)
}

/// Incremental-closure distributivity test, for any number of subspaces.
pub fn closure_test(ambient_dim: usize, subspaces: &[Subspace], cap: usize) -> Result<Distributivity> {
    check_ambients(ambient_dim, subspaces)?;
    let mut lattice = Closure::new(ambient_dim, cap);
    for x in subspaces {
        if let Some(f) = check_laws(x, &lattice.elements)? {
            return Ok(Distributivity::fail(f));
        }
        lattice.add_and_close(x.clone())?;
    }
    // The per-step laws only involve the new generator; confirm the law on
    // every triple of the final lattice.
    let els = &lattice.elements;
    for a in els {
        for b in els {
            for c in els {
                let lhs = a.intersect(&b.sum(c)?)?;
                let rhs = a.intersect(b)?.sum(&a.intersect(c)?)?;
                if lhs != rhs {
                    return Ok(Distributivity::fail(LatticeFailure {
                        identity: "a ∩ (b + c) = (a ∩ b) + (a ∩ c)".into(),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    let witness = decompose(ambient_dim, els, subspaces)?;
    Ok(Distributivity::pass(Some(witness)))
}

/// Decomposition from a distributive lattice containing `0` and the whole
/// space: one summand per join-irreducible `j`, a complement in `j` of the
/// sum of everything strictly below `j`.
fn decompose(ambient_dim: usize, lattice: &[Subspace], inputs: &[Subspace]) -> Result<DecompositionWitness> {
    let mut order: Vec<&Subspace> = lattice.iter().collect();
    order.sort_by_key(|s| s.dim());
    let mut irreducibles: Vec<(&Subspace, Subspace)> = Vec::new();
    for &x in &order {
        if x.is_zero() {
            continue;
        }
        let below = Subspace::sum_all(
            ambient_dim,
            lattice.iter().filter(|y| y.dim() < x.dim() && x.contains(y)),
        )?;
        if below != *x {
            irreducibles.push((x, below.complement_in(x)?));
        }
    }
    let summands: Vec<Subspace> = irreducibles.iter().map(|(_, c)| c.clone()).collect();
    let membership = inputs
        .iter()
        .map(|x| irreducibles.iter().enumerate().filter(|(_, (j, _))| x.contains(j)).map(|(i, _)| i).collect())
        .collect();
    let witness = DecompositionWitness { summands, membership };
    if !witness.verify(ambient_dim, inputs)? {
        return Err(Error::Internal("distributive lattice did not yield a direct-sum decomposition".into()));
    }
    Ok(witness)
}

fn check_ambients(ambient_dim: usize, subspaces: &[Subspace]) -> Result<()> {
    match subspaces.iter().find(|s| s.ambient_dim() != ambient_dim) {
        Some(s) => Err(Error::input(format!(
            "subspace of ambient dimension {} in a collection over dimension {ambient_dim}",
            s.ambient_dim()
        ))),
        None => Ok(()),
    }
}

/// Decide distributivity. Up to two subspaces always pass; three use the
/// median identity; more use [`closure_test`]. With `want_witness`, passing
/// collections also carry a decomposition.
pub fn is_distributive_with(
    ambient_dim: usize,
    subspaces: &[Subspace],
    cap: usize,
    want_witness: bool,
) -> Result<Distributivity> {
    check_ambients(ambient_dim, subspaces)?;
    match subspaces {
        [] | [_] | [_, _] => {
            if want_witness {
                closure_test(ambient_dim, subspaces, cap)
            } else {
                Ok(Distributivity::pass(None))
            }
        }
        [x1, x2, x3] => {
            let (holds, lhs, rhs) = median_test(x1, x2, x3)?;
            if !holds {
                return Ok(Distributivity::fail(LatticeFailure {
                    identity: "(X1∩X2)+(X2∩X3)+(X1∩X3) = (X1+X2)∩(X2+X3)∩(X1+X3)".into(),
                    lhs,
                    rhs,
                }));
            }
            if want_witness {
                closure_test(ambient_dim, subspaces, cap)
            } else {
                Ok(Distributivity::pass(None))
            }
        }
        _ => closure_test(ambient_dim, subspaces, cap),
    }
}

pub fn is_distributive(ambient_dim: usize, subspaces: &[Subspace]) -> Result<Distributivity> {
    is_distributive_with(ambient_dim, subspaces, DEFAULT_LATTICE_CAP, true)
}
