//! Gluing patch metrics on a finite atlas into one metric via chains of
//! admissible pairs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{parse_rational, Rational};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AtlasError {
    #[error("patch {patch}: {msg}")]
    BadPatch { patch: usize, msg: String },
    #[error("point {0} lies in no shrunk patch")]
    Uncovered(usize),
    #[error("patches {a} and {b} disagree on ({x}, {y})")]
    OverlapDisagreement { a: usize, b: usize, x: usize, y: usize },
    #[error("bad distance entry: {0}")]
    BadEntry(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlueMode {
    Local,
    Quasilocal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub name: String,
    /// Universe indices of `U_a`, in table order.
    pub members: Vec<usize>,
    /// Universe indices of the shrinking `U′_a`.
    pub shrink: Vec<usize>,
    pub dist: Vec<Vec<Rational>>,
}

impl Patch {
    fn pos(&self, z: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == z)
    }

    pub fn contains(&self, z: usize) -> bool {
        self.members.contains(&z)
    }

    pub fn shrink_contains(&self, z: usize) -> bool {
        self.shrink.contains(&z)
    }

    /// `D_a(x, y)` for universe indices, if both are members.
    pub fn d(&self, x: usize, y: usize) -> Option<&Rational> {
        Some(&self.dist[self.pos(x)?][self.pos(y)?])
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().flatten().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// `D_a(x, U_a ∖ U′_a)`; `None` when the shrinking is the whole patch.
    pub fn escape(&self, x: usize) -> Option<Rational> {
        self.members.iter().filter(|m| !self.shrink_contains(**m)).map(|&m| self.d(x, m).expect("member").clone()).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub points: Vec<String>,
    pub patches: Vec<Patch>,
}

#[derive(Serialize, Deserialize)]
struct PatchFile {
    #[serde(default)]
    name: String,
    members: Vec<usize>,
    shrink: Vec<usize>,
    dist: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct AtlasFile {
    schema: u32,
    points: Vec<String>,
    patches: Vec<PatchFile>,
}

impl Atlas {
    pub fn new(points: Vec<String>, patches: Vec<Patch>) -> Result<Self, AtlasError> {
        let atlas = Self { points, patches };
        atlas.validate()?;
        Ok(atlas)
    }

    pub fn from_json(text: &str) -> Result<Self, AtlasError> {
        let file: AtlasFile = serde_json::from_str(text).map_err(|e| AtlasError::BadEntry(e.to_string()))?;
        if file.schema != 1 {
            return Err(AtlasError::BadEntry(format!("unsupported schema {}", file.schema)));
        }
        let mut patches = Vec::new();
        for (k, p) in file.patches.into_iter().enumerate() {
            let dist = p
                .dist
                .iter()
                .map(|row| row.iter().map(|s| parse_rational(s).map_err(|e| AtlasError::BadEntry(format!("patch {k}: {e}")))).collect())
                .collect::<Result<Vec<Vec<Rational>>, _>>()?;
            let name = if p.name.is_empty() { format!("P{k}") } else { p.name };
            patches.push(Patch { name, members: p.members, shrink: p.shrink, dist });
        }
        Self::new(file.points, patches)
    }

    pub fn to_json(&self) -> String {
        let file = AtlasFile {
            schema: 1,
            points: self.points.clone(),
            patches: self
                .patches
                .iter()
                .map(|p| PatchFile {
                    name: p.name.clone(),
                    members: p.members.clone(),
                    shrink: p.shrink.clone(),
                    dist: p.dist.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("atlas serializes")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<(), AtlasError> {
        let n = self.points.len();
        for (k, p) in self.patches.iter().enumerate() {
            let bad = |msg: &str| Err(AtlasError::BadPatch { patch: k, msg: msg.to_string() });
            let m = p.members.len();
            if m == 0 {
                return bad("empty patch");
            }
            if p.members.iter().any(|&z| z >= n) {
                return bad("member index out of range");
            }
            let mut sorted = p.members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != m {
                return bad("repeated member");
            }
            if !p.shrink.iter().all(|z| p.contains(*z)) {
                return bad("shrinking is not inside the patch");
            }
            if p.dist.len() != m || p.dist.iter().any(|r| r.len() != m) {
                return bad("distance table has the wrong shape");
            }
            for i in 0..m {
                if !p.dist[i][i].is_zero() {
                    return bad("non-zero diagonal");
                }
                for j in 0..m {
                    if p.dist[i][j] != p.dist[j][i] {
                        return bad("asymmetric table");
                    }
                    if i != j && p.dist[i][j] <= Rational::zero() {
                        return bad("non-positive off-diagonal entry");
                    }
                    for l in 0..m {
                        if p.dist[i][l] > &p.dist[i][j] + &p.dist[j][l] {
                            return bad("triangle inequality fails");
                        }
                    }
                }
            }
        }
        if let Some(z) = (0..n).find(|&z| !self.patches.iter().any(|p| p.shrink_contains(z))) {
            return Err(AtlasError::Uncovered(z));
        }
        Ok(())
    }

    /// Checks that every two patches agree on their common points.
    pub fn check_overlaps(&self) -> Result<(), AtlasError> {
        for (a, pa) in self.patches.iter().enumerate() {
            for (b, pb) in self.patches.iter().enumerate().skip(a + 1) {
                let common: Vec<usize> = pa.members.iter().copied().filter(|z| pb.contains(*z)).collect();
                for &x in &common {
                    for &y in &common {
                        if pa.d(x, y) != pb.d(x, y) {
                            return Err(AtlasError::OverlapDisagreement { a, b, x, y });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Scales every table so that all patch diameters are below 1. Returns
    /// the factor used (1 when nothing changed).
    pub fn normalized(&self) -> (Atlas, Rational) {
        let max = self.patches.iter().map(Patch::diameter).max().unwrap_or_else(Rational::zero);
        if max < Rational::one() {
            return (self.clone(), Rational::one());
        }
        let s = Rational::one() / (max * Rational::from_integer(2.into()));
        let mut out = self.clone();
        for p in &mut out.patches {
            for v in p.dist.iter_mut().flatten() {
                *v = &*v * &s;
            }
        }
        (out, s)
    }

    /// `D̄(x, y) = max_a D_a(x, y)` over patches containing both.
    pub fn sup_metric(&self, x: usize, y: usize) -> Option<Rational> {
        self.patches.iter().filter_map(|p| p.d(x, y)).max().cloned()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissiblePair {
    pub z1: usize,
    pub z2: usize,
    pub witness: usize,
}

/// All admissible pairs `z1 < z2`, each with the first witnessing patch.
pub fn admissible_pairs(atlas: &Atlas) -> Vec<AdmissiblePair> {
    let n = atlas.len();
    let mut out = Vec::new();
    for z1 in 0..n {
        for z2 in z1 + 1..n {
            let ok = atlas
                .patches
                .iter()
                .all(|b| !(b.shrink_contains(z1) || b.shrink_contains(z2)) || (b.contains(z1) && b.contains(z2)));
            if !ok {
                continue;
            }
            if let Some(w) = atlas.patches.iter().position(|a| a.shrink_contains(z1) && a.shrink_contains(z2)) {
                out.push(AdmissiblePair { z1, z2, witness: w });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedMetric {
    pub mode: GlueMode,
    /// Factor applied to the input tables before gluing.
    pub scale: Rational,
    pub table: Vec<Vec<Rational>>,
    /// Whether a chain of admissible pairs joins the two points.
    pub chained: Vec<Vec<bool>>,
}

/// The chain metric, capped at 1, with `D = 1` for pairs joined by no chain.
pub fn glue_metric(atlas: &Atlas, mode: GlueMode) -> Result<GluedMetric, AtlasError> {
    atlas.validate()?;
    if mode == GlueMode::Local {
        atlas.check_overlaps()?;
    }
    let (atlas, scale) = atlas.normalized();
    let n = atlas.len();
    let mut adj: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for p in admissible_pairs(&atlas) {
        let w = match mode {
            GlueMode::Local => atlas.patches[p.witness].d(p.z1, p.z2).expect("witness").clone(),
            GlueMode::Quasilocal => atlas.sup_metric(p.z1, p.z2).expect("witness"),
        };
        adj[p.z1].push((p.z2, w.clone()));
        adj[p.z2].push((p.z1, w));
    }
    let rows: Vec<Vec<Option<Rational>>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
    let one = Rational::one();
    let table = rows.iter().map(|r| r.iter().map(|d| d.clone().map_or(one.clone(), |v| v.min(one.clone()))).collect()).collect();
    let chained = rows.iter().map(|r| r.iter().map(Option::is_some).collect()).collect();
    Ok(GluedMetric { mode, scale, table, chained })
}

fn dijkstra(adj: &[Vec<(usize, Rational)>], s: usize) -> Vec<Option<Rational>> {
    let mut dist: Vec<Option<Rational>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].as_ref().is_some_and(|c| *c < d) {
            continue;
        }
        for (v, w) in &adj[u] {
            let nd = &d + w;
            if dist[*v].as_ref().is_none_or(|c| nd < *c) {
                dist[*v] = Some(nd.clone());
                heap.push(Reverse((nd, *v)));
            }
        }
    }
    dist
}

/// Violated metric axioms, as messages; empty for a metric.
pub fn metric_violations(t: &[Vec<Rational>]) -> Vec<String> {
    let n = t.len();
    let mut out = Vec::new();
    for i in 0..n {
        if !t[i][i].is_zero() {
            out.push(format!("D({i},{i}) = {}", t[i][i]));
        }
        for j in 0..n {
            if t[i][j] != t[j][i] {
                out.push(format!("D({i},{j}) != D({j},{i})"));
            }
            if i != j && t[i][j] <= Rational::zero() {
                out.push(format!("D({i},{j}) = {} for distinct points", t[i][j]));
            }
            for k in 0..n {
                if t[i][k] > &t[i][j] + &t[j][k] {
                    out.push(format!("D({i},{k}) > D({i},{j}) + D({j},{k})"));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub patch: usize,
    pub x: usize,
    pub y: usize,
    pub d: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundReport {
    pub checked: usize,
    pub violations: Vec<BoundViolation>,
}

/// Checks `D(x,y) ≥ min{D_a(x,y), D_a(x, U_a∖U′_a)}` for `y ∈ U′_a` and
/// `D(x,y) ≥ D_a(x, U_a∖U′_a)` otherwise, for every chained pair with
/// `x ∈ U′_a`. An empty escape set counts as `+∞`.
pub fn lower_bound_check(atlas: &Atlas, glued: &GluedMetric) -> LowerBoundReport {
    let mut rep = LowerBoundReport { checked: 0, violations: Vec::new() };
    for (a, p) in atlas.patches.iter().enumerate() {
        for &x in &p.shrink {
            let escape = p.escape(x).map(|e| e * &glued.scale);
            for y in 0..atlas.len() {
                if !glued.chained[x][y] {
                    continue;
                }
                let bound = if p.shrink_contains(y) {
                    let day = p.d(x, y).expect("member") * &glued.scale;
                    Some(escape.clone().map_or(day.clone(), |e| e.min(day)))
                } else {
                    escape.clone()
                };
                rep.checked += 1;
                let d = &glued.table[x][y];
                // an empty escape set with y outside U′_a means no chain can exist
                let ok = bound.as_ref().is_some_and(|b| d >= b);
                if !ok {
                    rep.violations.push(BoundViolation { patch: a, x, y, d: d.clone(), bound: bound.unwrap_or_else(Rational::one) });
                }
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementRow {
    pub point: usize,
    pub patch: usize,
    /// Supremum of the sampled radii `r` such that `D = D_a` on every pair in
    /// `{y ∈ U_a : D_a(z, y) < r}`; `None` when the whole patch agrees.
    pub radius: Option<Rational>,
    /// `½ D_a(z, U_a ∖ U′_a)`; `None` when the escape set is empty.
    pub half_escape: Option<Rational>,
}

impl AgreementRow {
    pub fn meets_half_escape(&self) -> bool {
        match (&self.radius, &self.half_escape) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(r), Some(h)) => r >= h,
        }
    }
}

/// For each point and each patch whose shrinking contains it, the largest
/// ball around the point on which `D` and the patch metric coincide.
pub fn local_agreement(atlas: &Atlas, glued: &GluedMetric) -> Vec<AgreementRow> {
    let half = Rational::new(1.into(), 2.into());
    let mut rows = Vec::new();
    for z in 0..atlas.len() {
        for (a, p) in atlas.patches.iter().enumerate() {
            if !p.shrink_contains(z) {
                continue;
            }
            let da = |x: usize, y: usize| p.d(x, y).expect("member") * &glued.scale;
            let mut order: Vec<usize> = p.members.clone();
            order.sort_by_key(|&y| da(z, y));
            let mut inside: Vec<usize> = Vec::new();
            let mut radius = None;
            let mut k = 0;
            while k < order.len() {
                let level = da(z, order[k]);
                let mut next = inside.clone();
                while k < order.len() && da(z, order[k]) == level {
                    next.push(order[k]);
                    k += 1;
                }
                let agrees = next.iter().all(|&x| next.iter().all(|&y| glued.table[x][y] == da(x, y)));
                if !agrees {
                    radius = Some(level);
                    break;
                }
                inside = next;
            }
            let half_escape = p.escape(z).map(|e| e * &glued.scale * &half);
            rows.push(AgreementRow { point: z, patch: a, radius, half_escape });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasilocalReport {
    pub checked: usize,
    /// `(patch, x, y)` with `D̄(x,y) < D_a(x,y)`.
    pub sup_violations: Vec<(usize, usize, usize)>,
    /// `(patch, x, y, ε)` with `D_a(x,y) < δ(ε)` but `D̄(x,y) ≥ ε`.
    pub modulus_violations: Vec<(usize, usize, usize, Rational)>,
}

/// Checks `D̄ ≥ D_a` and `D_a(x,y) < δ(ε) ⟹ D̄(x,y) < ε` for the supplied
/// `(ε, δ(ε))` table, on the unscaled atlas.
pub fn quasilocal_check(atlas: &Atlas, modulus: &[(Rational, Rational)]) -> QuasilocalReport {
    let mut rep = QuasilocalReport { checked: 0, sup_violations: Vec::new(), modulus_violations: Vec::new() };
    for (a, p) in atlas.patches.iter().enumerate() {
        for &x in &p.members {
            for &y in &p.members {
                rep.checked += 1;
                let da = p.d(x, y).expect("member");
                let sup = atlas.sup_metric(x, y).expect("common patch");
                if sup < *da {
                    rep.sup_violations.push((a, x, y));
                }
                for (e, d) in modulus {
                    if da < d && sup >= *e {
                        rep.modulus_violations.push((a, x, y, e.clone()));
                    }
                }
            }
        }
    }
    rep
}

/// A random atlas on `n` points of the integer grid with the `ℓ¹` metric
/// divided by 20. Patches are random subsets; in quasilocal mode each patch
/// metric is scaled by a factor in `{1, 3/2, 2}`, so `δ(ε) = ε/2` works.
pub fn random_atlas(seed: u64, n: usize, n_patches: usize, mode: GlueMode) -> Atlas {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid: Vec<(i64, i64)> = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).collect();
    grid.shuffle(&mut rng);
    let pos: Vec<(i64, i64)> = grid.into_iter().take(n).collect();
    let base = |x: usize, y: usize| {
        let (a, b) = (pos[x], pos[y]);
        Rational::new(((a.0 - b.0).abs() + (a.1 - b.1).abs()).into(), 20.into())
    };
    let mut sets: Vec<(Vec<usize>, Vec<usize>)> = (0..n_patches.max(1))
        .map(|_| {
            let mut members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            while members.len() < 2.min(n) {
                let z = rng.gen_range(0..n);
                if !members.contains(&z) {
                    members.push(z);
                }
            }
            members.sort_unstable();
            let shrink = members.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            (members, shrink)
        })
        .collect();
    for z in 0..n {
        if sets.iter().any(|(_, s)| s.contains(&z)) {
            continue;
        }
        let holders: Vec<usize> = (0..sets.len()).filter(|&k| sets[k].0.contains(&z)).collect();
        let k = if holders.is_empty() {
            let k = rng.gen_range(0..sets.len());
            sets[k].0.push(z);
            sets[k].0.sort_unstable();
            k
        } else {
            holders[rng.gen_range(0..holders.len())]
        };
        sets[k].1.push(z);
        sets[k].1.sort_unstable();
    }
    let scales = [Rational::one(), Rational::new(3.into(), 2.into()), Rational::from_integer(2.into())];
    let patches = sets
        .into_iter()
        .enumerate()
        .map(|(k, (members, shrink))| {
            let c = match mode {
                GlueMode::Local => Rational::one(),
                GlueMode::Quasilocal => scales[rng.gen_range(0..scales.len())].clone(),
            };
            let dist = members.iter().map(|&x| members.iter().map(|&y| base(x, y) * &c).collect()).collect();
            Patch { name: format!("P{k}"), members, shrink, dist }
        })
        .collect();
    Atlas::new((0..n).map(|k| format!("z{k}")).collect(), patches).expect("random atlas is valid")
}
