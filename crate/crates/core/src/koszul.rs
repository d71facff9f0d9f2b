//! Koszulity of `B(Γ)^!` (equivalently of `A(Γ)`) for uniform graphs.
//!
//! The relation collections `{V^i R V^{n−i−2}}` split along the level
//! multigrading, and a multidegree component is a tensor product of its
//! maximal decreasing runs. Koszulity therefore reduces to distributivity
//! of the slot subspaces inside `V_b ⊗ ⋯ ⊗ V_a` for every decreasing run
//! `b > ⋯ > a` in `1..=N`.

use serde::Serialize;
use serde_json::json;

use crate::algebra::{build_quadratic, numerically_koszul_from, run_slot_subspaces, NumericVerdict, QuadraticData};
use crate::error::{Error, Result};
use crate::graph::{require_valid, LayeredGraph, StructuralMode};
use crate::lattice::{is_distributive_with, DEFAULT_LATTICE_CAP};
use crate::linalg::Subspace;

/// The slot subspaces of one decreasing run `b, b−1, …, a`.
#[derive(Clone, Debug)]
pub struct RunComponent {
    /// Levels from `b` down to `a`.
    pub run: Vec<usize>,
    pub ambient_dim: usize,
    /// `X_j = V_b ⋯ V_{j+1} ⊗ R!_{j,j−1} ⊗ V_{j−2} ⋯ V_a` for `j = a+1..=b`.
    pub subspaces: Vec<Subspace>,
}

impl RunComponent {
    pub fn top(&self) -> usize {
        self.run[0]
    }

    pub fn bottom(&self) -> usize {
        *self.run.last().expect("runs are nonempty")
    }
}

/// Every decreasing run of length ≥ 2 in `1..=N`, ordered by `(b, a)`.
/// Runs of length 2 have a single slot and pass trivially.
pub fn run_components(q: &QuadraticData) -> Vec<RunComponent> {
    let n = q.generators.height();
    let mut out = Vec::new();
    for b in 2..=n {
        for a in 1..b {
            let (ambient_dim, subspaces) = run_slot_subspaces(&q.generators, &q.dual_components, b, a);
            out.push(RunComponent { run: (a..=b).rev().collect(), ambient_dim, subspaces });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KoszulStatus {
    Koszul,
    NonKoszul,
}

/// The failed identity in a non-distributive run.
#[derive(Clone, Debug, Serialize)]
pub struct NonKoszulWitness {
    pub run: Vec<usize>,
    pub identity: String,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub lhs_basis: Vec<Vec<String>>,
    pub rhs_basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunCheck {
    pub run: Vec<usize>,
    pub ambient_dim: usize,
    pub slot_dims: Vec<usize>,
    pub distributive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulVerdict {
    pub status: KoszulStatus,
    pub witness: Option<NonKoszulWitness>,
    pub runs_checked: Vec<RunCheck>,
    pub numeric: NumericVerdict,
    /// Pinch level used to certify Koszulity from the two halves, if any.
    pub pinch_shortcut: Option<usize>,
}

impl KoszulVerdict {
    pub fn is_koszul(&self) -> bool {
        self.status == KoszulStatus::Koszul
    }

    /// Compact rendering:
    /// `{"status":"non-koszul","run":[4,3,2,1],"lhs_dim":…,"rhs_dim":…,"numeric_first_fail":4}`.
    pub fn summary_json(&self) -> serde_json::Value {
        match &self.witness {
            Some(w) => json!({
                "status": "non-koszul",
                "run": w.run,
                "lhs_dim": w.lhs_dim,
                "rhs_dim": w.rhs_dim,
                "numeric_first_fail": self.numeric.first_failing_degree,
            }),
            None => json!({
                "status": "koszul",
                "numeric_first_fail": self.numeric.first_failing_degree,
                "pinch_shortcut": self.pinch_shortcut,
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KoszulOptions {
    pub use_pinch: bool,
    pub lattice_cap: usize,
    /// Defaults to `2N`.
    pub numeric_bound: Option<usize>,
}

impl Default for KoszulOptions {
    fn default() -> Self {
        KoszulOptions { use_pinch: true, lattice_cap: DEFAULT_LATTICE_CAP, numeric_bound: None }
    }
}

fn require_uniform(g: &LayeredGraph) -> Result<()> {
    require_valid(g, StructuralMode::UniqueMinOnly)?;
    if let Some(v) = g.uniformity_witness()? {
        return Err(Error::input(format!(
            "graph is not uniform (lower covers of {v} are not linked), so B(Γ) need not be quadratic"
        )));
    }
    Ok(())
}

/// Check every run directly; stop at the first failure in `(b, a)` order.
fn direct_check(q: &QuadraticData, cap: usize) -> Result<(Vec<RunCheck>, Option<NonKoszulWitness>)> {
    let mut checks = Vec::new();
    let mut runs = run_components(q);
    runs.sort_by_key(|r| (r.top(), r.bottom()));
    for rc in runs {
        let d = is_distributive_with(rc.ambient_dim, &rc.subspaces, cap, false)?;
        checks.push(RunCheck {
            run: rc.run.clone(),
            ambient_dim: rc.ambient_dim,
            slot_dims: rc.subspaces.iter().map(Subspace::dim).collect(),
            distributive: d.distributive,
        });
        if let Some(f) = d.failure {
            let witness = NonKoszulWitness {
                run: rc.run,
                identity: f.identity,
                lhs_dim: f.lhs.dim(),
                rhs_dim: f.rhs.dim(),
                lhs_basis: f.lhs.basis_strings(),
                rhs_basis: f.rhs.basis_strings(),
            };
            return Ok((checks, Some(witness)));
        }
    }
    Ok((checks, None))
}

fn shifted(checks: Vec<RunCheck>, by: usize) -> impl Iterator<Item = RunCheck> {
    checks.into_iter().map(move |mut c| {
        c.run.iter_mut().for_each(|l| *l += by);
        c
    })
}

pub fn is_koszul_with(g: &LayeredGraph, opts: &KoszulOptions) -> Result<KoszulVerdict> {
    require_uniform(g)?;
    let q = build_quadratic(g)?;
    let bound = opts.numeric_bound.unwrap_or(2 * g.height());
    let numeric = numerically_koszul_from(&q, bound)?;

    if opts.use_pinch {
        if let Some(&k) = g.pinch_points().first() {
            let (lower, upper) = g.split_at(k)?;
            let lo = is_koszul_with(&lower, opts)?;
            if lo.is_koszul() {
                let hi = is_koszul_with(&upper, opts)?;
                if hi.is_koszul() {
                    let runs_checked = lo.runs_checked.into_iter().chain(shifted(hi.runs_checked, k)).collect();
                    return Ok(KoszulVerdict {
                        status: KoszulStatus::Koszul,
                        witness: None,
                        runs_checked,
                        numeric,
                        pinch_shortcut: Some(k),
                    });
                }
            }
            // A non-Koszul half proves nothing about the whole; fall through.
        }
    }

    let (runs_checked, witness) = direct_check(&q, opts.lattice_cap)?;
    let status = if witness.is_some() { KoszulStatus::NonKoszul } else { KoszulStatus::Koszul };
    Ok(KoszulVerdict { status, witness, runs_checked, numeric, pinch_shortcut: None })
}

pub fn is_koszul(g: &LayeredGraph) -> Result<KoszulVerdict> {
    is_koszul_with(g, &KoszulOptions::default())
}

/// For a graph with a pinch point whose halves are uniform: does
/// "both halves Koszul" imply "the whole is Koszul" by the direct check?
pub fn check_pinch_consistency(g: &LayeredGraph) -> Result<bool> {
    require_uniform(g)?;
    let Some(&k) = g.pinch_points().first() else {
        return Err(Error::input("graph has no pinch point"));
    };
    let direct = KoszulOptions { use_pinch: false, ..KoszulOptions::default() };
    let (lower, upper) = g.split_at(k)?;
    let parts_koszul = is_koszul_with(&lower, &direct)?.is_koszul() && is_koszul_with(&upper, &direct)?.is_koszul();
    let whole = is_koszul_with(g, &direct)?.is_koszul();
    Ok(!parts_koszul || whole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use crate::graph::LayerProfile;

    #[test]
    fn run_arithmetic_for_height_four() {
        let p = LayerProfile::new(vec![1, 2, 2, 2, 1]).unwrap();
        let g = crate::enumerate::enumerate(&p, StructuralMode::UniqueMax, true).unwrap().remove(0);
        let q = build_quadratic(&g).unwrap();
        let runs = run_components(&q);
        let multi: Vec<(Vec<usize>, usize)> =
            runs.iter().filter(|r| r.subspaces.len() >= 2).map(|r| (r.run.clone(), r.subspaces.len())).collect();
        assert_eq!(multi, vec![(vec![3, 2, 1], 2), (vec![4, 3, 2, 1], 3), (vec![4, 3, 2], 2)]);
        assert_eq!(runs.iter().filter(|r| r.subspaces.len() == 1).count(), 3);
    }

    #[test]
    fn diamond_has_one_single_slot_run() {
        let q = build_quadratic(&diamond()).unwrap();
        let runs = run_components(&q);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].run, vec![2, 1]);
        assert_eq!(runs[0].subspaces.len(), 1);
    }

    #[test]
    fn run_ambient_is_product_of_layer_sizes() {
        let p = LayerProfile::new(vec![1, 2, 3, 2, 1]).unwrap();
        let g = crate::enumerate::enumerate(&p, StructuralMode::UniqueMax, true).unwrap().remove(0);
        let q = build_quadratic(&g).unwrap();
        let full = run_components(&q).into_iter().find(|r| r.run == vec![4, 3, 2, 1]).unwrap();
        assert_eq!(full.ambient_dim, 12);
    }

    #[test]
    fn diamond_and_chains_are_koszul() {
        assert!(is_koszul(&diamond()).unwrap().is_koszul());
        assert!(is_koszul(&chain(4)).unwrap().is_koszul());
        assert!(is_koszul(&chain(2)).unwrap().is_koszul());
    }

    #[test]
    fn non_uniform_input_is_rejected() {
        assert!(matches!(is_koszul(&split_x()), Err(Error::Input(_))));
    }

    #[test]
    fn pinch_shortcut_on_double_diamond() {
        let v = is_koszul(&double_diamond()).unwrap();
        assert!(v.is_koszul());
        assert_eq!(v.pinch_shortcut, Some(2));
        let direct = is_koszul_with(&double_diamond(), &KoszulOptions { use_pinch: false, ..Default::default() }).unwrap();
        assert!(direct.is_koszul());
        assert!(check_pinch_consistency(&double_diamond()).unwrap());
        assert!(check_pinch_consistency(&chain(4)).unwrap());
        assert!(check_pinch_consistency(&diamond()).is_err());
    }

    #[test]
    fn summary_json_shape() {
        let v = is_koszul(&diamond()).unwrap();
        assert_eq!(v.summary_json()["status"], "koszul");
    }
}
