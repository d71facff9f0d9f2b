//! Order-complex cochains of the window `Γ_{a,k}` below a vertex.
//!
//! `C^j` has one basis element per chain `v₀ > v₁ > ⋯ > v_j` of `j + 1`
//! vertices from the pool; `C^{−1}` is spanned by the empty chain, so the
//! complex is the reduced one.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{LayeredGraph, VertexId};
use crate::linalg::{rank, Rational};

/// Which vertices of the window enter the complex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalReading {
    /// Vertices strictly between `a` and the bottom level `|a| − k` of the
    /// window.
    #[default]
    Open,
    /// Also the bottom level of the window, except the global minimum.
    ClosedBottom,
}

impl FromStr for IntervalReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(IntervalReading::Open),
            "closed-bottom" => Ok(IntervalReading::ClosedBottom),
            other => Err(Error::input(format!("unknown interval reading {other:?} (expected open or closed-bottom)"))),
        }
    }
}

impl fmt::Display for IntervalReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalReading::Open => "open",
            IntervalReading::ClosedBottom => "closed-bottom",
        })
    }
}

/// Unsigned cochain dimensions `[dim C^{−1}, dim C^0, …]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CochainDims {
    pub dims: Vec<usize>,
}

impl CochainDims {
    /// `dim C^{−1} − dim C^0 + dim C^1 − ⋯`.
    pub fn euler(&self) -> i64 {
        alternating(&self.dims)
    }
}

fn alternating(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// The vertex pool of the complex for `Γ_{a,k}`.
pub fn pool(g: &LayeredGraph, a: VertexId, k: usize, reading: IntervalReading) -> Result<Vec<VertexId>> {
    if !g.contains(a) {
        return Err(Error::input(format!("vertex {a} is not in the graph")));
    }
    if a.level < k {
        return Err(Error::input(format!("level of {a} is {} which is less than k = {k}", a.level)));
    }
    let bottom = a.level - k;
    Ok(g.below(a)?
        .into_iter()
        .filter(|v| match reading {
            IntervalReading::Open => v.level > bottom,
            IntervalReading::ClosedBottom => v.level >= bottom && v.level > 0,
        })
        .collect())
}

/// All strictly decreasing chains in the pool, grouped by length.
fn chains(g: &LayeredGraph, pool: &[VertexId]) -> Vec<Vec<Vec<VertexId>>> {
    let members: BTreeSet<VertexId> = pool.iter().copied().collect();
    let below: Vec<Vec<VertexId>> = pool
        .iter()
        .map(|&v| g.below(v).expect("pool vertex").into_iter().filter(|w| members.contains(w)).rev().collect())
        .collect();
    let idx = |v: VertexId| pool.binary_search(&v).expect("pool vertex");
    let mut by_len: Vec<Vec<Vec<VertexId>>> = vec![vec![Vec::new()]];
    // Pools are sorted ascending, so list chains by descending top vertex.
    let mut current: Vec<Vec<VertexId>> = pool.iter().rev().map(|&v| vec![v]).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for c in &current {
            let last = *c.last().expect("nonempty chain");
            for &w in &below[idx(last)] {
                let mut d = c.clone();
                d.push(w);
                next.push(d);
            }
        }
        by_len.push(std::mem::replace(&mut current, next));
    }
    by_len
}

pub fn cochain_dims_with(g: &LayeredGraph, a: VertexId, k: usize, reading: IntervalReading) -> Result<CochainDims> {
    let p = pool(g, a, k, reading)?;
    Ok(CochainDims { dims: chains(g, &p).iter().map(Vec::len).collect() })
}

pub fn cochain_dims(g: &LayeredGraph, a: VertexId, k: usize) -> Result<CochainDims> {
    cochain_dims_with(g, a, k, IntervalReading::Open)
}

/// Coboundary `C^j → C^{j+1}` as a matrix with one row per source chain:
/// `δσ = Σ_τ (−1)^i τ` over chains `τ` that give `σ` when entry `i` is removed.
fn coboundary(source: &[Vec<VertexId>], target: &[Vec<VertexId>]) -> Vec<Vec<Rational>> {
    let mut rows = vec![vec![Rational::zero(); target.len()]; source.len()];
    for (t, tau) in target.iter().enumerate() {
        for i in 0..tau.len() {
            let mut sigma = tau.clone();
            sigma.remove(i);
            if let Some(s) = source.iter().position(|c| *c == sigma) {
                rows[s][t] = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub a: VertexId,
    pub k: usize,
    pub reading: IntervalReading,
    pub cochain: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub euler: i64,
}

impl CohomologyReport {
    /// `{"interval":{"a":[4,0],"k":4},"cochain":[…],"euler":…}` plus the
    /// cohomology dimensions and the reading used.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "interval": {"a": self.a, "k": self.k},
            "reading": self.reading,
            "cochain": self.cochain,
            "cohomology": self.cohomology,
            "euler": self.euler,
        })
    }
}

/// Cochain and reduced cohomology dimensions; fails with an internal error
/// if the Euler–Poincaré identity does not hold.
pub fn cohomology_with(g: &LayeredGraph, a: VertexId, k: usize, reading: IntervalReading) -> Result<CohomologyReport> {
    let p = pool(g, a, k, reading)?;
    let by_len = chains(g, &p);
    let dims: Vec<usize> = by_len.iter().map(Vec::len).collect();
    // ranks[j]: rank of δ from C^{j−1} to C^j (index 0 is C^{−1} → C^0).
    let ranks: Vec<usize> = (0..by_len.len())
        .map(|j| match by_len.get(j + 1) {
            Some(target) if !target.is_empty() && !by_len[j].is_empty() => {
                rank(target.len(), coboundary(&by_len[j], target))
            }
            _ => 0,
        })
        .collect();
    let cohomology: Vec<usize> = (0..dims.len())
        .map(|j| dims[j] - ranks[j] - if j > 0 { ranks[j - 1] } else { 0 })
        .collect();
    let euler = alternating(&dims);
    if alternating(&cohomology) != euler {
        return Err(Error::Internal(format!(
            "Euler–Poincaré mismatch: cochains {dims:?}, cohomology {cohomology:?}"
        )));
    }
    Ok(CohomologyReport { a, k, reading, cochain: dims, cohomology, euler })
}

pub fn cohomology_dims(g: &LayeredGraph, a: VertexId, k: usize) -> Result<Vec<usize>> {
    Ok(cohomology_with(g, a, k, IntervalReading::Open)?.cohomology)
}
