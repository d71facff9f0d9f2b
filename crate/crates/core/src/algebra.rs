//! The quadratic algebra `B(Γ)` on the non-minimal vertices and its
//! quadratic dual `B(Γ)^!`, with exact Hilbert series.
//!
//! Both relation spaces are homogeneous for the grading of `V⁺ ⊗ V⁺` by
//! level pairs, and every relation of `B(Γ)^!` lives in some
//! `V_{j+1} ⊗ V_j`. A degree-`n` word of levels therefore splits into
//! maximal runs `b, b−1, …, a`, and the quotient in that multidegree is the
//! tensor product of the per-run quotients. Series are assembled from those
//! per-run dimensions; the test module checks them against full
//! `(V⁺)^{⊗n}` computations.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{require_valid, LayeredGraph, StructuralMode, VertexId};
use crate::linalg::{unit_vector, Subspace, Vector};

/// Generators `V⁺ = V_1 ⊕ ⋯ ⊕ V_N`, ordered by `(level, index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpace {
    /// `dims[l]` = `z_l`; entry 0 is kept as 0 (the minimum is not a generator).
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl GeneratorSpace {
    pub fn of(g: &LayeredGraph) -> Self {
        let mut dims = g.profile().sizes().to_vec();
        dims[0] = 0;
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        GeneratorSpace { dims, offsets }
    }

    pub fn height(&self) -> usize {
        self.dims.len() - 1
    }

    /// `dim V_l` for `1 ≤ l ≤ N`.
    pub fn level_dim(&self, level: usize) -> usize {
        self.dims[level]
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Position of a generator in `V⁺`.
    pub fn position(&self, v: VertexId) -> usize {
        debug_assert!(v.level >= 1);
        self.offsets[v.level] + v.index
    }
}

/// Relation data for `B(Γ)` and `B(Γ)^!`.
#[derive(Clone, Debug)]
pub struct QuadraticData {
    pub generators: GeneratorSpace,
    /// `R_B ⊆ V⁺ ⊗ V⁺`.
    pub relations: Subspace,
    /// `R_B ∩ (V_u ⊗ V_{u−1})`, keyed by the upper level `u ∈ 2..=N`.
    pub relation_components: BTreeMap<usize, Subspace>,
    /// `R!_{u,u−1} ⊆ V_u ⊗ V_{u−1}`, keyed by the upper level `u ∈ 2..=N`.
    pub dual_components: BTreeMap<usize, Subspace>,
}

impl QuadraticData {
    pub fn dual_component(&self, upper: usize) -> Option<&Subspace> {
        self.dual_components.get(&upper)
    }

    /// `⊕_u R!_{u,u−1}`, embedded in `V⁺ ⊗ V⁺`.
    pub fn dual_relations(&self) -> Subspace {
        let t = self.generators.total();
        let mut rows: Vec<Vector> = Vec::new();
        for (&u, comp) in &self.dual_components {
            let lower = self.generators.level_dim(u - 1);
            for row in comp.basis() {
                let mut v = vec![BigRational::zero(); t * t];
                for (c, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        let hi = self.generators.position(VertexId::new(u, c / lower));
                        let lo = self.generators.position(VertexId::new(u - 1, c % lower));
                        v[hi * t + lo] = x.clone();
                    }
                }
                rows.push(v);
            }
        }
        Subspace::span(t * t, rows).expect("consistent dimensions")
    }
}

/// Build `R_B` (non-edge monomials and `u ⊗ Σ S(u)` for `|u| ≥ 2`) and the
/// adjacent-level components of its orthogonal complement.
pub fn build_quadratic(g: &LayeredGraph) -> Result<QuadraticData> {
    require_valid(g, StructuralMode::UniqueMinOnly)?;
    let gens = GeneratorSpace::of(g);
    let t = gens.total();
    let n = g.height();
    let plus: Vec<VertexId> = g.vertices().filter(|v| v.level >= 1).collect();

    let mut rows: Vec<Vector> = Vec::new();
    for &u in &plus {
        for &w in &plus {
            if !g.has_edge(u, w) {
                rows.push(unit_vector(t * t, gens.position(u) * t + gens.position(w)));
            }
        }
        if u.level >= 2 {
            let mut v = vec![BigRational::zero(); t * t];
            for &j in g.down_indices(u.level, u.index) {
                v[gens.position(u) * t + gens.position(VertexId::new(u.level - 1, j))] = BigRational::one();
            }
            rows.push(v);
        }
    }
    let relations = Subspace::span(t * t, rows)?;

    let mut relation_components = BTreeMap::new();
    let mut dual_components = BTreeMap::new();
    for u in 2..=n {
        let (hi, lo) = (g.level_size(u), g.level_size(u - 1));
        let dim = hi * lo;
        let mut rel_rows = Vec::new();
        let mut dual_rows = Vec::new();
        for i in 0..hi {
            let covers = g.down_indices(u, i);
            for j in 0..lo {
                if covers.binary_search(&j).is_err() {
                    rel_rows.push(unit_vector(dim, i * lo + j));
                }
            }
            let mut sum = vec![BigRational::zero(); dim];
            for &j in covers {
                sum[i * lo + j] = BigRational::one();
            }
            rel_rows.push(sum);
            // Mean-zero combinations of the edges leaving `i`.
            if let Some((&first, rest)) = covers.split_first() {
                for &j in rest {
                    let mut v = vec![BigRational::zero(); dim];
                    v[i * lo + first] = BigRational::one();
                    v[i * lo + j] = -BigRational::one();
                    dual_rows.push(v);
                }
            }
        }
        relation_components.insert(u, Subspace::span(dim, rel_rows)?);
        dual_components.insert(u, Subspace::span(dim, dual_rows)?);
    }
    Ok(QuadraticData { generators: gens, relations, relation_components, dual_components })
}

/// The slot subspaces of a decreasing run `b, b−1, …, a` inside
/// `V_b ⊗ ⋯ ⊗ V_a`: one subspace per adjacent pair `(j, j−1)`, ordered by
/// `j` from `a+1` up to `b`, equal to `V_b ⋯ V_{j+1} ⊗ C_j ⊗ V_{j−2} ⋯ V_a`
/// where `C_j` is the given component in `V_j ⊗ V_{j−1}`.
pub fn run_slot_subspaces(
    gens: &GeneratorSpace,
    components: &BTreeMap<usize, Subspace>,
    b: usize,
    a: usize,
) -> (usize, Vec<Subspace>) {
    let dims = |lo: usize, hi: usize| -> usize { (lo..=hi).map(|l| gens.level_dim(l)).product() };
    let ambient = dims(a, b);
    let mut slots = Vec::with_capacity(b - a);
    for j in (a + 1)..=b {
        let left = if j < b { dims(j + 1, b) } else { 1 };
        let right = if j >= a + 2 { dims(a, j - 2) } else { 1 };
        slots.push(components[&j].tensor_embed(left, right));
    }
    (ambient, slots)
}

/// Quotient dimension of `V_b ⊗ ⋯ ⊗ V_a` by the sum of its slot subspaces.
fn run_quotient(gens: &GeneratorSpace, components: &BTreeMap<usize, Subspace>, b: usize, a: usize) -> Result<usize> {
    if a == b {
        return Ok(gens.level_dim(a));
    }
    let (ambient, slots) = run_slot_subspaces(gens, components, b, a);
    Ok(ambient - Subspace::sum_all(ambient, &slots)?.dim())
}

/// Graded dimensions `[h_0, h_1, …, h_bound]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HilbertSeries {
    pub coefficients: Vec<u64>,
}

impl HilbertSeries {
    pub fn coefficient(&self, n: usize) -> u64 {
        self.coefficients.get(n).copied().unwrap_or(0)
    }

    pub fn bound(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Drop trailing zero coefficients (keeping degree 0).
    pub fn trimmed(&self) -> Vec<u64> {
        let mut c = self.coefficients.clone();
        while c.len() > 1 && c.last() == Some(&0) {
            c.pop();
        }
        c
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn overflow(what: &str, n: usize) -> Error {
    Error::limit(format!("{what} coefficient at degree {n} overflows 64 bits"))
}

/// Hilbert series of `B(Γ)` up to `bound`. Only strictly descending level
/// words survive, so coefficients vanish past `N`.
pub fn hilbert_b_from(q: &QuadraticData, bound: usize) -> Result<HilbertSeries> {
    let n_top = q.generators.height();
    let mut coefficients = vec![0u64; bound + 1];
    coefficients[0] = 1;
    for b in 1..=n_top {
        for a in 1..=b {
            let len = b - a + 1;
            if len > bound {
                continue;
            }
            let d = run_quotient(&q.generators, &q.relation_components, b, a)? as u64;
            coefficients[len] = coefficients[len].checked_add(d).ok_or_else(|| overflow("h_B", len))?;
        }
    }
    Ok(HilbertSeries { coefficients })
}

/// Hilbert series of `B(Γ)^!` up to `bound`.
pub fn hilbert_b_dual_from(q: &QuadraticData, bound: usize) -> Result<HilbertSeries> {
    let n_top = q.generators.height();
    // Per-run quotient dimensions, keyed (b, a).
    let mut run_dims = BTreeMap::new();
    for b in 1..=n_top {
        for a in 1..=b {
            run_dims.insert((b, a), run_quotient(&q.generators, &q.dual_components, b, a)? as u64);
        }
    }
    // ways[n][e]: total dimension of words of length n whose last maximal
    // run ends at level e (e = 0: the empty word).
    let mut ways = vec![vec![0u64; n_top + 1]; bound + 1];
    ways[0][0] = 1;
    for len in 0..bound {
        for end in 0..=n_top {
            let here = ways[len][end];
            if here == 0 {
                continue;
            }
            for (&(b, a), &d) in &run_dims {
                let run_len = b - a + 1;
                // A run starting at end − 1 would have extended the previous one.
                if len + run_len > bound || d == 0 || (end >= 2 && b == end - 1) {
                    continue;
                }
                let add = here.checked_mul(d).ok_or_else(|| overflow("h_B!", len + run_len))?;
                let slot = &mut ways[len + run_len][a];
                *slot = slot.checked_add(add).ok_or_else(|| overflow("h_B!", len + run_len))?;
            }
        }
    }
    let coefficients = ways
        .iter()
        .enumerate()
        .map(|(n, row)| row.iter().try_fold(0u64, |acc, &x| acc.checked_add(x)).ok_or_else(|| overflow("h_B!", n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HilbertSeries { coefficients })
}

pub fn hilbert_b(g: &LayeredGraph, bound: usize) -> Result<HilbertSeries> {
    hilbert_b_from(&build_quadratic(g)?, bound)
}

pub fn hilbert_b_dual(g: &LayeredGraph, bound: usize) -> Result<HilbertSeries> {
    hilbert_b_dual_from(&build_quadratic(g)?, bound)
}

/// Outcome of the Hilbert-series test `h_{B^!}(t) · h_B(−t) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericVerdict {
    pub koszul: bool,
    pub first_failing_degree: Option<usize>,
    pub bound: usize,
    /// Coefficients `0..=bound` of the truncated product.
    pub product: Vec<i128>,
}

pub fn default_numeric_bound(g: &LayeredGraph) -> usize {
    2 * g.height()
}

/// Truncated product `h_dual(t) · h_b(−t)`.
pub fn series_product(h_dual: &HilbertSeries, h_b: &HilbertSeries, bound: usize) -> Result<Vec<i128>> {
    (0..=bound)
        .map(|n| {
            (0..=n).try_fold(0i128, |acc, i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let term = (h_b.coefficient(i) as i128)
                    .checked_mul(h_dual.coefficient(n - i) as i128)
                    .ok_or_else(|| overflow("series product", n))?;
                acc.checked_add(sign * term).ok_or_else(|| overflow("series product", n))
            })
        })
        .collect()
}

pub fn numerically_koszul_from(q: &QuadraticData, bound: usize) -> Result<NumericVerdict> {
    let h_b = hilbert_b_from(q, bound)?;
    let h_dual = hilbert_b_dual_from(q, bound)?;
    let product = series_product(&h_dual, &h_b, bound)?;
    let first_failing_degree = (1..=bound).find(|&n| product[n] != 0);
    Ok(NumericVerdict { koszul: first_failing_degree.is_none(), first_failing_degree, bound, product })
}

/// Numerical Koszulity up to `bound` (default `2N`; smaller bounds are rejected).
pub fn numerically_koszul(g: &LayeredGraph, bound: Option<usize>) -> Result<NumericVerdict> {
    let min = default_numeric_bound(g);
    let bound = bound.unwrap_or(min);
    if bound < min {
        return Err(Error::input(format!("numerical bound {bound} is below 2N = {min}")));
    }
    numerically_koszul_from(&build_quadratic(g)?, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use crate::graph::LayerProfile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Degree-`n` quotient of the free algebra on `t` generators by the
    /// two-sided ideal of `rel ⊆ V ⊗ V`, computed in all of `V^{⊗n}`.
    fn brute_quotient_dims(t: usize, rel: &Subspace, bound: usize) -> Vec<u64> {
        let mut out = vec![1u64];
        for n in 1..=bound {
            let ambient = t.pow(n as u32);
            if n < 2 {
                out.push(ambient as u64);
                continue;
            }
            let parts: Vec<Subspace> =
                (0..=n - 2).map(|i| rel.tensor_embed(t.pow(i as u32), t.pow((n - 2 - i) as u32))).collect();
            out.push((ambient - Subspace::sum_all(ambient, &parts).unwrap().dim()) as u64);
        }
        out
    }

    fn check_against_brute_force(g: &LayeredGraph, bound_b: usize, bound_dual: usize) {
        let q = build_quadratic(g).unwrap();
        let t = q.generators.total();
        let dual_oracle = q.relations.orthogonal_complement();
        assert_eq!(hilbert_b_from(&q, bound_b).unwrap().coefficients, brute_quotient_dims(t, &q.relations, bound_b));
        assert_eq!(
            hilbert_b_dual_from(&q, bound_dual).unwrap().coefficients,
            brute_quotient_dims(t, &dual_oracle, bound_dual)
        );
    }

    fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> LayeredGraph {
        loop {
            let height = rng.gen_range(1..=4);
            let mut sizes = vec![1];
            for _ in 0..height {
                sizes.push(rng.gen_range(1..=3));
            }
            if sizes.iter().sum::<usize>() > max_vertices {
                continue;
            }
            let profile = LayerProfile::new(sizes.clone()).unwrap();
            let mats: Vec<Vec<Vec<bool>>> = (0..height)
                .map(|l| {
                    (0..sizes[l + 1])
                        .map(|_| loop {
                            let row: Vec<bool> = (0..sizes[l]).map(|_| rng.gen_bool(0.6)).collect();
                            if row.iter().any(|&b| b) {
                                break row;
                            }
                        })
                        .collect()
                })
                .collect();
            return LayeredGraph::from_biadjacency(profile, &mats).unwrap();
        }
    }

    #[test]
    fn chain_relations_fill_everything() {
        let q = build_quadratic(&chain(3)).unwrap();
        assert_eq!(q.relations, Subspace::full(4));
        assert!(q.dual_components.values().all(Subspace::is_zero));
        assert_eq!(hilbert_b_from(&q, 4).unwrap().trimmed(), vec![1, 2]);
        assert_eq!(hilbert_b_dual_from(&q, 4).unwrap().coefficients, vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn diamond_relations() {
        let q = build_quadratic(&diamond()).unwrap();
        assert_eq!(q.relations.dim(), 8);
        // Generators in order a, b, c; the dual relation is c⊗a − c⊗b.
        let mut v = vec![0i64; 9];
        v[2 * 3] = 1;
        v[2 * 3 + 1] = -1;
        assert_eq!(q.dual_relations(), Subspace::span_int(9, &[v]).unwrap());
        assert_eq!(q.relations.orthogonal_complement(), q.dual_relations());
    }

    #[test]
    fn diamond_series() {
        assert_eq!(hilbert_b(&diamond(), 4).unwrap().trimmed(), vec![1, 3, 1]);
        assert_eq!(hilbert_b_dual(&diamond(), 4).unwrap().coefficients, vec![1, 3, 8, 21, 55]);
        let v = numerically_koszul(&diamond(), Some(8)).unwrap();
        assert!(v.koszul);
        assert_eq!(v.product, vec![1, 0, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn diamond_dual_matches_closed_form() {
        // 1/(1 − 3t + t²): c_n = 3 c_{n−1} − c_{n−2}.
        let mut expect = vec![1u64, 3];
        for n in 2..=8 {
            expect.push(3 * expect[n - 1] - expect[n - 2]);
        }
        assert_eq!(hilbert_b_dual(&diamond(), 8).unwrap().coefficients, expect);
    }

    #[test]
    fn star_dual_degree_two() {
        let q = build_quadratic(&star(3)).unwrap();
        assert_eq!(q.dual_components[&2].dim(), 2);
        assert_eq!(hilbert_b_dual_from(&q, 2).unwrap().coefficient(2), 14);
    }

    #[test]
    fn chain_is_numerically_koszul() {
        let v = numerically_koszul(&chain(3), None).unwrap();
        assert!(v.koszul && v.first_failing_degree.is_none());
        assert_eq!(v.bound, 4);
    }

    #[test]
    fn small_bound_is_rejected() {
        assert!(matches!(numerically_koszul(&diamond(), Some(3)), Err(Error::Input(_))));
    }

    #[test]
    fn b_series_vanishes_past_height() {
        for g in [diamond(), chain(4), split_x(), double_diamond()] {
            let h = hilbert_b(&g, g.height() + 2).unwrap();
            assert_eq!(h.coefficient(g.height() + 1), 0);
            assert_eq!(h.coefficient(1), (g.vertex_count() - 1) as u64);
        }
    }

    #[test]
    fn series_match_brute_force_on_small_graphs() {
        check_against_brute_force(&diamond(), 4, 4);
        check_against_brute_force(&chain(4), 4, 4);
        check_against_brute_force(&star(3), 3, 3);
        check_against_brute_force(&split_x(), 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let g = random_graph(&mut rng, 6);
            check_against_brute_force(&g, 3, 3);
        }
    }

    #[test]
    fn orthogonal_complementarity_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 9);
            let q = build_quadratic(&g).unwrap();
            let t = q.generators.total();
            let expected: usize = g
                .vertices()
                .filter(|v| v.level >= 2)
                .map(|v| g.lower_covers(v).unwrap().len() - 1)
                .sum();
            let dual = q.dual_relations();
            assert_eq!(dual.dim(), expected);
            assert_eq!(q.relations.dim() + dual.dim(), t * t);
            assert_eq!(q.relations.orthogonal_complement(), dual);
            assert_eq!(hilbert_b_from(&q, 2).unwrap().coefficient(2), expected as u64);
        }
    }
}
