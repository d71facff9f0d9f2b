//! Layered graphs: positional vertices, downward cover edges, structural
//! validation, uniformity, pinch decomposition and interval windows.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex named by its level and its position inside that level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct VertexId {
    pub level: usize,
    pub index: usize,
}

impl VertexId {
    pub const fn new(level: usize, index: usize) -> Self {
        VertexId { level, index }
    }
}

impl From<[usize; 2]> for VertexId {
    fn from([level, index]: [usize; 2]) -> Self {
        VertexId { level, index }
    }
}

impl From<VertexId> for [usize; 2] {
    fn from(v: VertexId) -> Self {
        [v.level, v.index]
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}_{}", self.level, self.index)
    }
}

/// Directed edge from `tail` down to `head`.
pub type Edge = (VertexId, VertexId);

/// Layer sizes `[z_0, …, z_N]`, all positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LayerProfile(Vec<usize>);

impl LayerProfile {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::input("layer profile is empty"));
        }
        if let Some(pos) = sizes.iter().position(|&z| z == 0) {
            return Err(Error::input(format!("layer {pos} is empty")));
        }
        Ok(LayerProfile(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    /// `N`, the index of the top level.
    pub fn height(&self) -> usize {
        self.0.len() - 1
    }

    pub fn size(&self, level: usize) -> usize {
        self.0[level]
    }

    pub fn vertex_count(&self) -> usize {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for LayerProfile {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        LayerProfile::new(v)
    }
}

impl From<LayerProfile> for Vec<usize> {
    fn from(p: LayerProfile) -> Self {
        p.0
    }
}

impl FromStr for LayerProfile {
    type Err = Error;

    /// Parses `"1,2,2,2,1"` (brackets and spaces tolerated).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let sizes = trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::input(format!("bad layer size {:?} in profile {:?}", t.trim(), s)))
            })
            .collect::<Result<Vec<_>>>()?;
        LayerProfile::new(sizes)
    }
}

impl fmt::Display for LayerProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| z.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Which cover conditions a graph must meet beyond the unique minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuralMode {
    /// Top-maximal, and the top level is a single vertex.
    UniqueMax,
    /// Every vertex below the top level has something above it.
    TopMaximal,
    /// Only the unique minimal element is required.
    UniqueMinOnly,
}

impl StructuralMode {
    pub const ALL: [StructuralMode; 3] =
        [StructuralMode::UniqueMax, StructuralMode::TopMaximal, StructuralMode::UniqueMinOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            StructuralMode::UniqueMax => "unique-max",
            StructuralMode::TopMaximal => "top-maximal",
            StructuralMode::UniqueMinOnly => "unique-min-only",
        }
    }

    pub(crate) fn needs_upper_covers(self) -> bool {
        !matches!(self, StructuralMode::UniqueMinOnly)
    }
}

impl fmt::Display for StructuralMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructuralMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unique-max" => Ok(StructuralMode::UniqueMax),
            "top-maximal" => Ok(StructuralMode::TopMaximal),
            "unique-min-only" => Ok(StructuralMode::UniqueMinOnly),
            other => Err(Error::input(format!(
                "unknown mode {other:?} (expected unique-max, top-maximal or unique-min-only)"
            ))),
        }
    }
}

/// A structural defect found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Violation {
    /// Level 0 must hold exactly one vertex.
    BottomNotSingleton { size: usize },
    /// A vertex above level 0 with no downward edge.
    NoLowerCover(VertexId),
    /// A vertex below the top with no incoming edge (top-maximal modes).
    NoUpperCover(VertexId),
    /// Unique-max mode requires a single top vertex.
    TopNotSingleton { size: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BottomNotSingleton { size } => {
                write!(f, "level 0 has {size} vertices; a unique minimal vertex is required")
            }
            Violation::NoLowerCover(v) => {
                write!(f, "level-{} vertex {v} with no downward edge", v.level)
            }
            Violation::NoUpperCover(v) => {
                write!(f, "level-{} vertex {v} below the top level with no incoming edge", v.level)
            }
            Violation::TopNotSingleton { size } => {
                write!(f, "top level has {size} vertices; a unique maximal vertex is required")
            }
        }
    }
}

/// A finite layered graph with positional vertices and downward edges.
///
/// Construction enforces the type invariants (vertices in range, each edge
/// dropping exactly one level, no repeated edge); the structural modes are
/// checked separately by [`validate`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LayeredGraph {
    profile: LayerProfile,
    edges: BTreeSet<Edge>,
    /// `down[l][i]`: sorted indices at level `l-1` below vertex `(l, i)`.
    down: Vec<Vec<Vec<usize>>>,
    /// `up[l][i]`: sorted indices at level `l+1` above vertex `(l, i)`.
    up: Vec<Vec<Vec<usize>>>,
}

impl fmt::Debug for LayeredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LayeredGraph {} {{", self.profile)?;
        for (i, (t, h)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {t}->{h}")?;
        }
        write!(f, " }}")
    }
}

impl LayeredGraph {
    pub fn new(profile: LayerProfile, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (pos, (t, h)) in edges.into_iter().enumerate() {
            for v in [t, h] {
                if v.level > profile.height() || v.index >= profile.size(v.level) {
                    return Err(Error::input(format!("edge {pos}: vertex {v} is not in profile {profile}")));
                }
            }
            if t.level != h.level + 1 {
                return Err(Error::input(format!(
                    "edge {pos}: tail {t} and head {h} are not on adjacent levels (tail must be one level above head)"
                )));
            }
            if !set.insert((t, h)) {
                return Err(Error::input(format!("edge {pos}: duplicate edge {t}->{h}")));
            }
        }
        Ok(Self::from_edge_set(profile, set))
    }

    fn from_edge_set(profile: LayerProfile, edges: BTreeSet<Edge>) -> Self {
        let mut down: Vec<Vec<Vec<usize>>> = profile.sizes().iter().map(|&z| vec![Vec::new(); z]).collect();
        let mut up = down.clone();
        for &(t, h) in &edges {
            down[t.level][t.index].push(h.index);
            up[h.level][h.index].push(t.index);
        }
        // BTreeSet iteration already sorts `down`; `up` needs it explicitly.
        for lvl in up.iter_mut() {
            for list in lvl.iter_mut() {
                list.sort_unstable();
            }
        }
        LayeredGraph { profile, edges, down, up }
    }

    /// Build from per-level biadjacency matrices: `mats[l]` has `z_{l+1}`
    /// rows (upper vertices) and `z_l` columns (lower vertices).
    pub fn from_biadjacency(profile: LayerProfile, mats: &[Vec<Vec<bool>>]) -> Result<Self> {
        if mats.len() != profile.height() {
            return Err(Error::input(format!(
                "expected {} biadjacency matrices, got {}",
                profile.height(),
                mats.len()
            )));
        }
        let mut edges = Vec::new();
        for (l, m) in mats.iter().enumerate() {
            if m.len() != profile.size(l + 1) || m.iter().any(|row| row.len() != profile.size(l)) {
                return Err(Error::input(format!("biadjacency matrix {l} has the wrong shape")));
            }
            for (i, row) in m.iter().enumerate() {
                for (j, &bit) in row.iter().enumerate() {
                    if bit {
                        edges.push((VertexId::new(l + 1, i), VertexId::new(l, j)));
                    }
                }
            }
        }
        Self::new(profile, edges)
    }

    pub fn profile(&self) -> &LayerProfile {
        &self.profile
    }

    pub fn height(&self) -> usize {
        self.profile.height()
    }

    pub fn level_size(&self, level: usize) -> usize {
        self.profile.size(level)
    }

    pub fn vertex_count(&self) -> usize {
        self.profile.vertex_count()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, tail: VertexId, head: VertexId) -> bool {
        self.edges.contains(&(tail, head))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.level <= self.height() && v.index < self.level_size(v.level)
    }

    /// All vertices in `(level, index)` order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.profile
            .sizes()
            .iter()
            .enumerate()
            .flat_map(|(l, &z)| (0..z).map(move |i| VertexId::new(l, i)))
    }

    /// Biadjacency matrix between levels `l+1` (rows) and `l` (columns).
    pub fn biadjacency(&self, l: usize) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.level_size(l)]; self.level_size(l + 1)];
        for (i, heads) in self.down[l + 1].iter().enumerate() {
            for &j in heads {
                m[i][j] = true;
            }
        }
        m
    }

    /// Indices of the lower covers of `(level, index)`, without range checks.
    pub(crate) fn down_indices(&self, level: usize, index: usize) -> &[usize] {
        &self.down[level][index]
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::input(format!("vertex {v} is not in graph with profile {}", self.profile)))
        }
    }

    /// `S(u)`: the heads of the edges leaving `u`.
    pub fn lower_covers(&self, u: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(u)?;
        if u.level == 0 {
            return Ok(Vec::new());
        }
        Ok(self.down[u.level][u.index].iter().map(|&j| VertexId::new(u.level - 1, j)).collect())
    }

    pub fn upper_covers(&self, u: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(u)?;
        Ok(self.up[u.level][u.index].iter().map(|&j| VertexId::new(u.level + 1, j)).collect())
    }

    /// Relabel within layers: `perms[l][old] = new`.
    pub fn relabel(&self, perms: &[Vec<usize>]) -> Result<LayeredGraph> {
        if perms.len() != self.profile.sizes().len() {
            return Err(Error::input("relabel: one permutation per level is required"));
        }
        for (l, p) in perms.iter().enumerate() {
            let mut seen = vec![false; self.level_size(l)];
            if p.len() != seen.len() || p.iter().any(|&x| x >= seen.len() || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::input(format!("relabel: level {l} mapping is not a permutation")));
            }
        }
        let map = |v: VertexId| VertexId::new(v.level, perms[v.level][v.index]);
        let edges = self.edges.iter().map(|&(t, h)| (map(t), map(h))).collect();
        Ok(Self::from_edge_set(self.profile.clone(), edges))
    }

    /// A copy without the given edge (no-op if absent).
    pub fn without_edge(&self, tail: VertexId, head: VertexId) -> LayeredGraph {
        let mut edges = self.edges.clone();
        edges.remove(&(tail, head));
        Self::from_edge_set(self.profile.clone(), edges)
    }

    /// The induced subgraph on the given levels `lo..=hi`, renumbered from 0.
    fn level_slice(&self, lo: usize, hi: usize) -> LayeredGraph {
        let profile = LayerProfile(self.profile.sizes()[lo..=hi].to_vec());
        let edges = self
            .edges
            .iter()
            .filter(|(t, h)| h.level >= lo && t.level <= hi)
            .map(|&(t, h)| (VertexId::new(t.level - lo, t.index), VertexId::new(h.level - lo, h.index)))
            .collect();
        Self::from_edge_set(profile, edges)
    }

    /// Levels `0 < k < N` that hold a single vertex, ascending.
    pub fn pinch_points(&self) -> Vec<usize> {
        let n = self.height();
        (1..n).filter(|&k| self.level_size(k) == 1).collect()
    }

    /// Split at a pinch level `k` into the induced graphs on levels `0..=k`
    /// and `k..=N` (the latter renumbered to start at 0).
    pub fn split_at(&self, k: usize) -> Result<(LayeredGraph, LayeredGraph)> {
        if !self.pinch_points().contains(&k) {
            return Err(Error::input(format!("level {k} is not a pinch point of profile {}", self.profile)));
        }
        Ok((self.level_slice(0, k), self.level_slice(k, self.height())))
    }

    /// Inverse of [`split_at`](Self::split_at): identify the top of `lower`
    /// with the bottom of `upper`.
    pub fn glue(lower: &LayeredGraph, upper: &LayeredGraph) -> Result<LayeredGraph> {
        let k = lower.height();
        if lower.level_size(k) != 1 || upper.level_size(0) != 1 {
            return Err(Error::input("glue: the shared level must be a single vertex on both sides"));
        }
        let mut sizes = lower.profile.sizes().to_vec();
        sizes.extend_from_slice(&upper.profile.sizes()[1..]);
        let shift = |v: VertexId| VertexId::new(v.level + k, v.index);
        let edges = lower
            .edges
            .iter()
            .copied()
            .chain(upper.edges.iter().map(|&(t, h)| (shift(t), shift(h))))
            .collect();
        Ok(Self::from_edge_set(LayerProfile(sizes), edges))
    }

    /// Every vertex strictly below `a` in the transitive order, by level.
    pub fn below(&self, a: VertexId) -> Result<BTreeSet<VertexId>> {
        self.check_vertex(a)?;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v.level == 0 {
                continue;
            }
            for &j in &self.down[v.level][v.index] {
                let w = VertexId::new(v.level - 1, j);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(seen)
    }

    pub fn is_below(&self, lower: VertexId, upper: VertexId) -> bool {
        self.below(upper).map(|s| s.contains(&lower)).unwrap_or(false)
    }

    /// `Γ_{a,k}`: the induced subgraph on `a` and everything below it within
    /// `k` levels. Levels are renumbered so the window bottom `|a| − k` is 0;
    /// indices keep their relative order. Also returns the new-to-old map.
    pub fn interval_with_map(&self, a: VertexId, k: usize) -> Result<(LayeredGraph, Vec<Vec<VertexId>>)> {
        self.check_vertex(a)?;
        if a.level < k {
            return Err(Error::input(format!("interval: level of {a} is {} which is less than k = {k}", a.level)));
        }
        let bottom = a.level - k;
        let mut keep: BTreeSet<VertexId> =
            self.below(a)?.into_iter().filter(|v| v.level >= bottom).collect();
        keep.insert(a);
        let mut old_of_new: Vec<Vec<VertexId>> = vec![Vec::new(); k + 1];
        for &v in &keep {
            old_of_new[v.level - bottom].push(v);
        }
        let new_of = |v: VertexId| -> VertexId {
            let l = v.level - bottom;
            VertexId::new(l, old_of_new[l].binary_search(&v).expect("kept vertex"))
        };
        let profile = LayerProfile(old_of_new.iter().map(Vec::len).collect());
        let edges = self
            .edges
            .iter()
            .filter(|(t, h)| keep.contains(t) && keep.contains(h))
            .map(|&(t, h)| (new_of(t), new_of(h)))
            .collect();
        Ok((Self::from_edge_set(profile, edges), old_of_new))
    }

    pub fn interval(&self, a: VertexId, k: usize) -> Result<LayeredGraph> {
        self.interval_with_map(a, k).map(|(g, _)| g)
    }

    /// All `(u, w)` with `u > w` in the transitive closure of the edges.
    pub fn comparable_pairs(&self) -> BTreeSet<(VertexId, VertexId)> {
        let mut pairs = BTreeSet::new();
        for u in self.vertices() {
            for w in self.below(u).expect("own vertex") {
                pairs.insert((u, w));
            }
        }
        pairs
    }

    /// The first vertex (in `(level, index)` order) whose lower covers are
    /// not linked by shared lower covers, if any.
    pub fn uniformity_witness(&self) -> Result<Option<VertexId>> {
        let violations = validate(self, StructuralMode::UniqueMinOnly);
        if !violations.is_empty() {
            return Err(Error::input(format!(
                "uniformity needs a valid graph: {}",
                violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
            )));
        }
        for v in self.vertices().filter(|v| v.level >= 2) {
            let covers = &self.down[v.level][v.index];
            if covers.len() <= 1 {
                continue;
            }
            let below = v.level - 1;
            let mut reached = vec![false; covers.len()];
            reached[0] = true;
            let mut stack = vec![0usize];
            while let Some(i) = stack.pop() {
                let si = &self.down[below][covers[i]];
                for (j, r) in reached.iter_mut().enumerate() {
                    if !*r && shares_element(si, &self.down[below][covers[j]]) {
                        *r = true;
                        stack.push(j);
                    }
                }
            }
            if reached.iter().any(|r| !r) {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    /// Uniformity: for every vertex `v`, the lower covers of `v` are
    /// connected under "have a common lower cover".
    pub fn is_uniform(&self) -> Result<bool> {
        Ok(self.uniformity_witness()?.is_none())
    }
}

fn shares_element(a: &[usize], b: &[usize]) -> bool {
    // Both sorted.
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Every structural violation of `g` under `mode`; empty means valid.
///
/// Level adjacency of edges is a construction invariant of [`LayeredGraph`]
/// and is therefore never reported here.
pub fn validate(g: &LayeredGraph, mode: StructuralMode) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.height();
    if g.level_size(0) != 1 {
        out.push(Violation::BottomNotSingleton { size: g.level_size(0) });
    }
    for v in g.vertices() {
        if v.level >= 1 && g.down[v.level][v.index].is_empty() {
            out.push(Violation::NoLowerCover(v));
        }
        if mode.needs_upper_covers() && v.level < n && g.up[v.level][v.index].is_empty() {
            out.push(Violation::NoUpperCover(v));
        }
    }
    if mode == StructuralMode::UniqueMax && g.level_size(n) != 1 {
        out.push(Violation::TopNotSingleton { size: g.level_size(n) });
    }
    out.sort();
    out
}

/// `validate` as a `Result`, joining violations into one message.
pub fn require_valid(g: &LayeredGraph, mode: StructuralMode) -> Result<()> {
    let v = validate(g, mode);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::input(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
    }
}

/// Small named graphs used throughout the tests and the CLI examples.
pub mod samples {
    use super::*;

    fn v(level: usize, index: usize) -> VertexId {
        VertexId::new(level, index)
    }

    type Pair = (usize, usize);

    fn build(sizes: &[usize], edges: &[(Pair, Pair)]) -> LayeredGraph {
        let profile = LayerProfile::new(sizes.to_vec()).expect("sample profile");
        LayeredGraph::new(profile, edges.iter().map(|&((a, b), (c, d))| (v(a, b), v(c, d)))).expect("sample graph")
    }

    /// `[1,2,1]`: top over both middle vertices, both over the minimum.
    pub fn diamond() -> LayeredGraph {
        build(&[1, 2, 1], &[((1, 0), (0, 0)), ((1, 1), (0, 0)), ((2, 0), (1, 0)), ((2, 0), (1, 1))])
    }

    /// Chain with `len` vertices, one per level.
    pub fn chain(len: usize) -> LayeredGraph {
        let edges: Vec<_> = (1..len).map(|l| ((l, 0), (l - 1, 0))).collect();
        build(&vec![1; len], &edges)
    }

    /// `[1,n,1]`: one top vertex over `n` children.
    pub fn star(n: usize) -> LayeredGraph {
        let mut edges: Vec<_> = (0..n).map(|i| ((1, i), (0, 0))).collect();
        edges.extend((0..n).map(|i| ((2, 0), (1, i))));
        build(&[1, n, 1], &edges)
    }

    /// `[1,2,2,1]` with disjoint grandchildren: not uniform.
    pub fn split_x() -> LayeredGraph {
        build(
            &[1, 2, 2, 1],
            &[
                ((1, 0), (0, 0)),
                ((1, 1), (0, 0)),
                ((2, 0), (1, 0)),
                ((2, 1), (1, 1)),
                ((3, 0), (2, 0)),
                ((3, 0), (2, 1)),
            ],
        )
    }

    /// `[1,2,1,2,1]` with complete bipartite levels: two diamonds stacked.
    pub fn double_diamond() -> LayeredGraph {
        build(
            &[1, 2, 1, 2, 1],
            &[
                ((1, 0), (0, 0)),
                ((1, 1), (0, 0)),
                ((2, 0), (1, 0)),
                ((2, 0), (1, 1)),
                ((3, 0), (2, 0)),
                ((3, 1), (2, 0)),
                ((4, 0), (3, 0)),
                ((4, 0), (3, 1)),
            ],
        )
    }
}
