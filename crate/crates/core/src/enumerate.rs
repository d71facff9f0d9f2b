//! Isomorphism-free enumeration of layered graphs.
//!
//! Graphs are compared up to relabelings that preserve every level. The
//! canonical key is the lexicographically least encoding of the per-level
//! biadjacency matrices over all such relabelings; layers in scope hold at
//! most a handful of vertices, so the search over the product of symmetric
//! groups is done directly, with prefix pruning.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate, LayerProfile, LayeredGraph, StructuralMode};
use crate::io::GraphRecord;

/// Lexicographically minimal encoding of a graph's biadjacency matrices.
///
/// Layout: number of levels, the layer sizes, then one byte per matrix
/// entry, levels `1→0`, `2→1`, … in turn, each matrix row-major with rows
/// indexed by the upper level.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s).map(CanonicalKey).map_err(|e| Error::input(format!("bad canonical key {s:?}: {e}")))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

struct KeySearch<'a> {
    mats: Vec<Vec<Vec<bool>>>,
    perm_lists: Vec<&'a [Vec<usize>]>,
    /// `inverse[l][new] = old` for the current choice at level `l`.
    chosen: Vec<Vec<usize>>,
    buf: Vec<u8>,
    block_start: Vec<usize>,
    best: Option<(Vec<u8>, Vec<Vec<usize>>)>,
}

impl KeySearch<'_> {
    /// Prunes any branch whose encoding so far exceeds the best complete key.
    fn descend(&mut self, level: usize) {
        if level == self.perm_lists.len() {
            if self.best.as_ref().is_none_or(|(b, _)| self.buf < *b) {
                self.best = Some((self.buf.clone(), self.chosen.clone()));
            }
            return;
        }
        for p in 0..self.perm_lists[level].len() {
            let inv = self.perm_lists[level][p].clone();
            if level > 0 {
                self.buf.truncate(self.block_start[level - 1]);
                let m = &self.mats[level - 1];
                let below = &self.chosen[level - 1];
                for &old_i in &inv {
                    for &old_j in below {
                        self.buf.push(u8::from(m[old_i][old_j]));
                    }
                }
                if let Some((b, _)) = &self.best {
                    if self.buf[..] > b[..self.buf.len()] {
                        continue;
                    }
                }
            }
            self.chosen[level] = inv;
            self.descend(level + 1);
        }
    }
}

/// Canonical key plus the relabeling (`perms[l][old] = new`) that realizes it.
pub fn canonical_form(g: &LayeredGraph) -> (CanonicalKey, Vec<Vec<usize>>) {
    let sizes = g.profile().sizes();
    let mut header = vec![sizes.len() as u8];
    header.extend(sizes.iter().map(|&z| z as u8));
    let perm_sets: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&z| permutations(z)).collect();
    let mut search = KeySearch {
        mats: (0..g.height()).map(|l| g.biadjacency(l)).collect(),
        perm_lists: perm_sets.iter().map(Vec::as_slice).collect(),
        chosen: sizes.iter().map(|&z| (0..z).collect()).collect(),
        buf: header.clone(),
        block_start: {
            let mut starts = Vec::new();
            let mut pos = header.len();
            for l in 0..g.height() {
                starts.push(pos);
                pos += sizes[l] * sizes[l + 1];
            }
            starts
        },
        best: None,
    };
    search.descend(0);
    let (bytes, inverses) = search.best.expect("at least one relabeling");
    let perms = inverses
        .iter()
        .map(|inv| {
            let mut p = vec![0; inv.len()];
            for (new, &old) in inv.iter().enumerate() {
                p[old] = new;
            }
            p
        })
        .collect();
    (CanonicalKey(bytes), perms)
}

pub fn canonical_key(g: &LayeredGraph) -> CanonicalKey {
    canonical_form(g).0
}

/// The relabeled copy of `g` whose plain encoding equals its canonical key.
pub fn canonical_graph(g: &LayeredGraph) -> LayeredGraph {
    let (_, perms) = canonical_form(g);
    g.relabel(&perms).expect("canonical relabeling is a permutation")
}

/// One enumerated isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumerated {
    pub key: CanonicalKey,
    pub graph: LayeredGraph,
    pub uniform: bool,
}

/// A catalog line: `{"key":…,"edges":…,"uniform":…,"graph":{…}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub key: CanonicalKey,
    pub edges: usize,
    pub uniform: bool,
    pub graph: GraphRecord,
}

impl From<&Enumerated> for CatalogRecord {
    fn from(e: &Enumerated) -> Self {
        CatalogRecord { key: e.key.clone(), edges: e.graph.edge_count(), uniform: e.uniform, graph: (&e.graph).into() }
    }
}

impl CatalogRecord {
    pub fn into_enumerated(self) -> Result<Enumerated> {
        let graph = self.graph.into_graph()?;
        let key = canonical_key(&graph);
        if key != self.key {
            return Err(Error::input(format!("catalog key {} does not match its graph", self.key)));
        }
        let uniform = graph.is_uniform()?;
        if uniform != self.uniform {
            return Err(Error::input(format!("catalog uniformity flag for {} is wrong", self.key)));
        }
        Ok(Enumerated { key, graph, uniform })
    }
}

/// Serialize a catalog as JSON lines.
pub fn catalog_to_jsonl(entries: &[Enumerated]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(&CatalogRecord::from(e)).expect("catalog record serializes"));
        out.push('\n');
    }
    out
}

pub fn catalog_from_jsonl(text: &str) -> Result<Vec<Enumerated>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<CatalogRecord>(l)
                .map_err(|e| Error::input(format!("line {}: {e}", i + 1)))
                .and_then(|r| r.into_enumerated().map_err(|e| Error::input(format!("line {}: {e}", i + 1))))
        })
        .collect()
}

/// Non-decreasing sequences of `rows` nonzero `cols`-bit masks.
fn sorted_row_choices(rows: usize, cols: usize) -> Vec<Vec<u32>> {
    let top = (1u32 << cols) - 1;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rows);
    fn go(rows: usize, min: u32, top: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == rows {
            out.push(cur.clone());
            return;
        }
        for m in min..=top {
            cur.push(m);
            go(rows, m, top, cur, out);
            cur.pop();
        }
    }
    go(rows, 1, top, &mut cur, &mut out);
    out
}

/// Every isomorphism class of graphs valid under `mode` with profile `p`,
/// in ascending canonical-key order, each as its canonical representative.
pub fn enumerate_entries(p: &LayerProfile, mode: StructuralMode, uniform_only: bool) -> Result<Vec<Enumerated>> {
    if p.size(0) != 1 {
        return Err(Error::input(format!(
            "profile {p} has {} vertices at level 0; a unique minimal vertex is required",
            p.size(0)
        )));
    }
    let sizes = p.sizes();
    let n = p.height();
    if mode == StructuralMode::UniqueMax && sizes[n] != 1 {
        return Ok(Vec::new());
    }
    // Representatives of partial graphs on levels 0..=l, keyed canonically.
    let mut reps: Vec<LayeredGraph> = vec![LayeredGraph::new(LayerProfile::new(vec![1])?, [])?];
    for l in 1..=n {
        let partial = LayerProfile::new(sizes[..=l].to_vec())?;
        let choices = sorted_row_choices(sizes[l], sizes[l - 1]);
        let cover_all = (1u32 << sizes[l - 1]) - 1;
        let mut next: BTreeMap<CanonicalKey, LayeredGraph> = BTreeMap::new();
        for rep in &reps {
            let mut mats: Vec<Vec<Vec<bool>>> = (0..l - 1).map(|k| rep.biadjacency(k)).collect();
            for rows in &choices {
                if mode.needs_upper_covers() && rows.iter().fold(0, |acc, r| acc | r) != cover_all {
                    continue;
                }
                let m: Vec<Vec<bool>> =
                    rows.iter().map(|&r| (0..sizes[l - 1]).map(|j| r >> j & 1 == 1).collect()).collect();
                mats.push(m);
                let g = LayeredGraph::from_biadjacency(partial.clone(), &mats)?;
                mats.pop();
                let (key, perms) = canonical_form(&g);
                next.entry(key).or_insert_with(|| g.relabel(&perms).expect("permutation"));
            }
        }
        reps = next.into_values().collect();
    }
    let mut out = Vec::with_capacity(reps.len());
    for g in reps {
        debug_assert!(validate(&g, mode).is_empty());
        let uniform = g.is_uniform()?;
        if uniform_only && !uniform {
            continue;
        }
        out.push(Enumerated { key: canonical_key(&g), graph: g, uniform });
    }
    out.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(out)
}

pub fn enumerate(p: &LayerProfile, mode: StructuralMode, uniform_only: bool) -> Result<Vec<LayeredGraph>> {
    Ok(enumerate_entries(p, mode, uniform_only)?.into_iter().map(|e| e.graph).collect())
}

pub fn count(p: &LayerProfile, mode: StructuralMode, uniform_only: bool) -> Result<usize> {
    Ok(enumerate_entries(p, mode, uniform_only)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use crate::graph::VertexId;

    fn profile(s: &[usize]) -> LayerProfile {
        LayerProfile::new(s.to_vec()).unwrap()
    }

    #[test]
    fn swapped_diamond_has_the_same_key() {
        let d = diamond();
        let swapped = d.relabel(&[vec![0], vec![1, 0], vec![0]]).unwrap();
        assert_eq!(canonical_key(&d), canonical_key(&swapped));
    }

    #[test]
    fn chain_key_is_its_plain_encoding() {
        assert_eq!(canonical_key(&chain(3)).as_bytes(), &[3, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn three_and_four_edge_diamonds_differ() {
        let partial = LayeredGraph::new(
            profile(&[1, 2, 1]),
            [
                (VertexId::new(1, 0), VertexId::new(0, 0)),
                (VertexId::new(1, 1), VertexId::new(0, 0)),
                (VertexId::new(2, 0), VertexId::new(1, 0)),
            ],
        )
        .unwrap();
        assert_ne!(canonical_key(&partial), canonical_key(&diamond()));
    }

    #[test]
    fn canonical_graph_encodes_to_its_key() {
        let g = split_x();
        let c = canonical_graph(&g);
        assert_eq!(canonical_key(&c), canonical_key(&g));
        let mut plain = vec![4u8, 1, 2, 2, 1];
        for l in 0..3 {
            for row in c.biadjacency(l) {
                plain.extend(row.into_iter().map(u8::from));
            }
        }
        assert_eq!(plain, canonical_key(&g).as_bytes());
    }

    #[test]
    fn nonunit_bottom_is_rejected() {
        assert!(matches!(enumerate(&profile(&[2, 1]), StructuralMode::UniqueMinOnly, false), Err(Error::Input(_))));
    }

    #[test]
    fn unique_max_with_wide_top_is_empty() {
        assert_eq!(count(&profile(&[1, 2]), StructuralMode::UniqueMax, false).unwrap(), 0);
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&profile(&[1, 1, 1]), StructuralMode::UniqueMax, false).unwrap(), 1);
        // [1,2,1]: top over one child (not top-maximal) or over both.
        assert_eq!(count(&profile(&[1, 2, 1]), StructuralMode::UniqueMinOnly, false).unwrap(), 2);
        assert_eq!(count(&profile(&[1, 2, 1]), StructuralMode::UniqueMax, false).unwrap(), 1);
    }

    #[test]
    fn catalog_round_trip_and_tamper_detection() {
        let entries = enumerate_entries(&profile(&[1, 2, 2, 1]), StructuralMode::UniqueMax, false).unwrap();
        let text = catalog_to_jsonl(&entries);
        assert_eq!(catalog_from_jsonl(&text).unwrap(), entries);
        let tampered = text.replacen("\"uniform\":true", "\"uniform\":false", 1);
        if tampered != text {
            assert!(catalog_from_jsonl(&tampered).is_err());
        }
    }
}
