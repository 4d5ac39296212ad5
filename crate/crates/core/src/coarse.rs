//! Coarse geometry: Hausdorff distance, nets, and the orbit correspondence
//! `φ_{x,y}(h(x)) = h̃(y)` built from bar-extended words, with its
//! distortion audit.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::exactnum::{Rational, Scalar};
use crate::folner::{NodeSet, OrbitGraph};
use crate::localmaps::{Interval, PartialMap};
use crate::pseudogroup::{germ_group_sample, orbit_ball, EngineError, Generator, GeneratorSystem, Word};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CoarseError {
    #[error("empty point set")]
    EmptySet,
    #[error("the system has no bar extensions")]
    NoBars,
    #[error("{0} is not in the window")]
    NotInWindow(Scalar),
    #[error("non-trivial germ at the base point: word `{0}` fixes it")]
    NontrivialGerm(String),
    #[error("extension of `{word}` is undefined on the window (prefix of length {prefix})")]
    ExtensionDomain { word: String, prefix: usize },
    #[error("correspondence not well defined at {z}: `{w1}` gives {t1}, `{w2}` gives {t2}")]
    WellDefinedness { z: Scalar, w1: String, t1: Scalar, w2: String, t2: Scalar },
    #[error("radius {0} is too small for the requested statistics")]
    RadiusInsufficient(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `max(sup_a d(a, B), sup_b d(b, A))` for finite sets.
pub fn hausdorff_distance<T, F>(a: &[T], b: &[T], d: F) -> Result<Scalar, CoarseError>
where
    F: Fn(&T, &T) -> Scalar,
{
    if a.is_empty() || b.is_empty() {
        return Err(CoarseError::EmptySet);
    }
    let one_sided = |p: &[T], q: &[T]| {
        p.iter()
            .map(|x| q.iter().map(|y| d(x, y)).min().expect("non-empty"))
            .max()
            .expect("non-empty")
    };
    Ok(std::cmp::max(one_sided(a, b), one_sided(b, a)))
}

/// `sup_{x ∈ A} d(x, B)`.
pub fn one_sided_distance<T, F>(a: &[T], b: &[T], d: F) -> Result<Scalar, CoarseError>
where
    F: Fn(&T, &T) -> Scalar,
{
    if a.is_empty() || b.is_empty() {
        return Err(CoarseError::EmptySet);
    }
    Ok(a.iter().map(|x| b.iter().map(|y| d(x, y)).min().expect("non-empty")).max().expect("non-empty"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetReport {
    pub is_net: bool,
    /// A node farthest from `A`, with its distance (`None` if unreachable).
    pub worst: Option<(Scalar, Option<usize>)>,
}

/// Whether every node of the graph lies at distance `< c` from `A`.
pub fn net_check(a: &NodeSet, g: &OrbitGraph, c: usize) -> NetReport {
    if g.is_empty() {
        return NetReport { is_net: true, worst: None };
    }
    let dist = g.distances_from(a, g.len());
    let (k, worst) = dist
        .iter()
        .enumerate()
        .max_by_key(|(_, d)| d.map_or(usize::MAX, |v| v))
        .expect("non-empty graph");
    let is_net = worst.is_some_and(|w| w < c);
    NetReport { is_net, worst: Some((g.point(k).clone(), *worst)) }
}

#[derive(Clone, Debug)]
pub struct CorrPair {
    pub z: Scalar,
    pub phi_z: Scalar,
    pub word: Word,
    pub dist: usize,
}

#[derive(Clone, Debug)]
pub struct Correspondence {
    pub x: Scalar,
    pub y: Scalar,
    pub radius: usize,
    pub pairs: Vec<CorrPair>,
    index: HashMap<Scalar, usize>,
}

impl Correspondence {
    pub fn target(&self, z: &Scalar) -> Option<&Scalar> {
        self.index.get(z).map(|&k| &self.pairs[k].phi_z)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.pairs.iter().all(|p| seen.insert(p.phi_z.clone()))
    }
}

/// The system generated by the bar extensions, same names and order.
pub fn bar_system(sys: &GeneratorSystem) -> Result<GeneratorSystem, CoarseError> {
    if !sys.has_bars() {
        return Err(CoarseError::NoBars);
    }
    let mut gens = Vec::new();
    for (k, m) in sys.members().iter().enumerate() {
        let inv = sys.inverse(k);
        if inv < k {
            continue;
        }
        let mut g = Generator::new(m.name.clone(), m.bar.clone().expect("bars checked"));
        if inv != k {
            gens.push(g);
            let mi = &sys.members()[inv];
            g = Generator::new(mi.name.clone(), mi.bar.clone().expect("bars checked")).with_inverse(m.name.clone());
        }
        gens.push(g);
    }
    let window = sys.window().clone();
    Ok(GeneratorSystem::new(sys.space(), window, gens)?.with_node_cap(sys.node_cap()))
}

/// `φ_{x,y}` on the radius-`radius` ball around `x`.
///
/// Checks that the germ group at `x` is trivial for words up to
/// `germ_budget`, that every tree word's bar extension is defined on `v`,
/// and that the transport is consistent along every edge of the ball.
pub fn orbit_correspondence(
    sys: &GeneratorSystem,
    x: &Scalar,
    y: &Scalar,
    radius: usize,
    v: &Interval,
    germ_budget: usize,
) -> Result<Correspondence, CoarseError> {
    if !sys.has_bars() {
        return Err(CoarseError::NoBars);
    }
    let space = sys.space();
    let (x, y) = (space.reduce(x), space.reduce(y));
    for p in [&x, &y] {
        if !v.contains(p) {
            return Err(CoarseError::NotInWindow(p.clone()));
        }
    }
    let germs = germ_group_sample(sys, &x, germ_budget)?;
    if let Some(bad) = germs.fixing.iter().find(|s| !s.trivial_germ) {
        return Err(CoarseError::NontrivialGerm(sys.word_name(&bad.word)));
    }
    let ball = orbit_ball(sys, &x, radius)?;
    let n = ball.len();
    // bar composites along the BFS tree; parents precede children
    let mut maps: Vec<Option<PartialMap>> = vec![None; n];
    let mut pairs = Vec::with_capacity(n);
    let full = crate::pseudogroup::full_domain(space);
    for (k, node) in ball.nodes().iter().enumerate() {
        let map = match node.parent {
            None => PartialMap::identity(space, &full),
            Some((p, m)) => {
                let bar = sys.members()[m].bar.as_ref().expect("bars checked");
                bar.compose(maps[p].as_ref().expect("parent computed"))
            }
        };
        if !map.domain().contains_interval(v) {
            let word = ball.word_to(k);
            let prefix = first_bad_prefix(sys, &word, v);
            return Err(CoarseError::ExtensionDomain { word: sys.word_name(&word), prefix });
        }
        let phi_z = map.apply(&y).map_err(|e| CoarseError::Engine(e.into()))?;
        pairs.push(CorrPair { z: node.point.clone(), phi_z, word: ball.word_to(k), dist: node.dist });
        maps[k] = Some(map);
    }
    let index: HashMap<Scalar, usize> = pairs.iter().enumerate().map(|(k, p)| (p.z.clone(), k)).collect();
    // consistency along every edge of the ball
    for (k, p) in pairs.iter().enumerate() {
        for (m, z2) in sys.neighbours(&p.z) {
            let Some(&j) = index.get(&z2) else { continue };
            let bar = sys.members()[m].bar.as_ref().expect("bars checked");
            let via = bar.try_apply(&p.phi_z);
            if via.as_ref() != Some(&pairs[j].phi_z) {
                let mut w1 = pairs[k].word.clone();
                w1.push(m);
                return Err(CoarseError::WellDefinedness {
                    z: z2,
                    w1: sys.word_name(&w1),
                    t1: via.unwrap_or_else(Scalar::zero),
                    w2: sys.word_name(&pairs[j].word),
                    t2: pairs[j].phi_z.clone(),
                });
            }
        }
    }
    Ok(Correspondence { x, y, radius, pairs, index })
}

fn first_bad_prefix(sys: &GeneratorSystem, w: &[usize], v: &Interval) -> usize {
    for k in 1..=w.len() {
        match sys.bar_word_map(&w[..k]) {
            Some(m) if m.domain().contains_interval(v) => continue,
            _ => return k,
        }
    }
    w.len()
}

#[derive(Clone, Debug)]
pub struct DistortionStats {
    pub forward_ok: bool,
    pub forward_violations: Vec<(Scalar, Scalar, usize, Option<usize>)>,
    pub pairs_checked: usize,
    pub reverse_c: Rational,
    pub reverse_witness: Option<(Scalar, Scalar, usize, usize)>,
    /// Smallest `C` such that the image of `orbit ∩ A` is a `C`-net of the
    /// target nodes within `radius/2` of `y`.
    pub net_constant: Option<usize>,
    pub injective: bool,
}

/// Audits `d_Ē(φz₁, φz₂) ≤ d_E(z₁, z₂)` on all pairs of the correspondence,
/// the reverse constant on pairs inside `window`, and the net constant.
pub fn distortion_stats(
    corr: &Correspondence,
    sys_e: &GeneratorSystem,
    sys_ebar: &GeneratorSystem,
    window: &Interval,
) -> Result<DistortionStats, CoarseError> {
    let r = corr.radius;
    if r < 2 {
        return Err(CoarseError::RadiusInsufficient(r));
    }
    let budget = 2 * r;
    let rows = corr
        .pairs
        .par_iter()
        .map(|p| {
            let src = orbit_ball(sys_e, &p.z, budget)?;
            let tgt = orbit_ball(sys_ebar, &p.phi_z, budget)?;
            let mut viol = Vec::new();
            let mut checked = 0usize;
            let mut rev: Option<(Rational, (Scalar, Scalar, usize, usize))> = None;
            for q in &corr.pairs {
                if q.z == p.z {
                    continue;
                }
                let Some(de) = src.dist(&q.z) else { continue };
                checked += 1;
                let dbar = tgt.dist(&q.phi_z);
                if dbar.is_none_or(|d| d > de) {
                    viol.push((p.z.clone(), q.z.clone(), de, dbar));
                }
                if window.contains(&p.z) && window.contains(&q.z) {
                    if let Some(db) = dbar {
                        let ratio = BigRational::new(BigInt::from(de), BigInt::from(db.max(1)));
                        if rev.as_ref().is_none_or(|(c, _)| ratio > *c) {
                            rev = Some((ratio, (p.z.clone(), q.z.clone(), de, db)));
                        }
                    }
                }
            }
            Ok((viol, checked, rev))
        })
        .collect::<Result<Vec<_>, CoarseError>>()?;
    let mut stats = DistortionStats {
        forward_ok: true,
        forward_violations: Vec::new(),
        pairs_checked: 0,
        reverse_c: Rational::one(),
        reverse_witness: None,
        net_constant: None,
        injective: corr.is_injective(),
    };
    for (viol, checked, rev) in rows {
        stats.pairs_checked += checked;
        stats.forward_violations.extend(viol);
        if let Some((c, w)) = rev {
            if c > stats.reverse_c {
                stats.reverse_c = c;
                stats.reverse_witness = Some(w);
            }
        }
    }
    stats.forward_ok = stats.forward_violations.is_empty();

    let target = OrbitGraph::build(sys_ebar, std::slice::from_ref(&corr.y), r)?;
    let a_img: NodeSet = corr
        .pairs
        .iter()
        .filter(|p| window.contains(&p.z))
        .filter_map(|p| target.id(&p.phi_z))
        .collect();
    if !a_img.is_empty() {
        let dist = target.distances_from(&a_img, target.len());
        stats.net_constant = (0..target.len())
            .filter(|&k| target.depth(k) <= r / 2)
            .map(|k| dist[k].map(|d| d + 1))
            .try_fold(0usize, |acc, d| d.map(|d| acc.max(d)));
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmaps::{DomainSet, Space};
    use crate::pseudogroup::full_domain;

    fn rotation_system() -> GeneratorSystem {
        let alpha = Scalar::sqrt(2).unwrap() - Scalar::one();
        let r = PartialMap::rotation(&alpha);
        GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r.clone()).with_bar(r)]).unwrap()
    }

    fn line_d(a: &Scalar, b: &Scalar) -> Scalar {
        Space::Line.distance(a, b)
    }

    #[test]
    fn hausdorff_examples() {
        let z = |v: &[i64]| v.iter().map(|&k| Scalar::from_int(k)).collect::<Vec<_>>();
        let a = z(&[0, 3, 7]);
        assert_eq!(hausdorff_distance(&a, &a, line_d).unwrap(), Scalar::zero());
        assert_eq!(hausdorff_distance(&z(&[0]), &z(&[0, 1]), line_d).unwrap(), Scalar::one());
        assert_eq!(hausdorff_distance(&z(&[0, 2]), &z(&[1]), line_d).unwrap(), Scalar::one());
        assert!(hausdorff_distance(&z(&[]), &z(&[1]), line_d).is_err());
    }

    #[test]
    fn net_examples() {
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::open(Scalar::from_int(-1), Scalar::from_int(10))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap();
        let g = OrbitGraph::build(&sys, &[Scalar::zero()], 20).unwrap();
        assert_eq!(g.len(), 11);
        assert!(net_check(&g.all(), &g, 1).is_net);
        let evens: Vec<Scalar> = (0..=10).step_by(2).map(Scalar::from_int).collect();
        let a = g.ids(&evens).unwrap();
        assert!(net_check(&a, &g, 2).is_net);
        assert!(!net_check(&a, &g, 1).is_net);
        // net_check ⟹ one-sided Hausdorff bound < C
        let all: Vec<Scalar> = g.points().to_vec();
        let h = one_sided_distance(&all, &evens, line_d).unwrap();
        assert!(h < Scalar::from_int(2));
    }

    #[test]
    fn identity_and_translation_correspondence() {
        let sys = rotation_system();
        let v = Interval::open(Scalar::frac(1, 10), Scalar::frac(9, 10));
        let x = Scalar::frac(1, 3);
        let same = orbit_correspondence(&sys, &x, &x, 6, &v, 4).unwrap();
        assert!(same.pairs.iter().all(|p| p.z == p.phi_z));
        let y = Scalar::frac(2, 5);
        let c = orbit_correspondence(&sys, &x, &y, 8, &v, 4).unwrap();
        let shift = &y - &x;
        for p in &c.pairs {
            assert_eq!(p.phi_z, Space::Circle.reduce(&(&p.z + &shift)));
        }
        assert!(c.is_injective());
        let back = orbit_correspondence(&sys, &y, &x, 8, &v, 4).unwrap();
        for p in &c.pairs {
            assert_eq!(back.target(&p.phi_z), Some(&p.z));
        }
    }

    #[test]
    fn rotation_distortion() {
        let sys = rotation_system();
        let bars = bar_system(&sys).unwrap();
        let v = Interval::open(Scalar::frac(1, 10), Scalar::frac(9, 10));
        let c = orbit_correspondence(&sys, &Scalar::frac(1, 3), &Scalar::frac(3, 10), 6, &v, 4).unwrap();
        let st = distortion_stats(&c, &sys, &bars, &Interval::unit()).unwrap();
        assert!(st.forward_ok);
        assert_eq!(st.reverse_c, Rational::one());
        assert!(st.injective);
        assert!(st.net_constant.is_some());
    }

    #[test]
    fn reverse_constant_stable() {
        let sys = rotation_system();
        let bars = bar_system(&sys).unwrap();
        let v = Interval::open(Scalar::frac(1, 10), Scalar::frac(9, 10));
        let w = Interval::open(Scalar::frac(1, 5), Scalar::frac(4, 5));
        let at = |r| {
            let c = orbit_correspondence(&sys, &Scalar::frac(1, 3), &Scalar::frac(1, 2), r, &v, 4).unwrap();
            distortion_stats(&c, &sys, &bars, &w).unwrap().reverse_c
        };
        let c15 = at(15);
        assert_eq!(at(30), c15);
    }

    #[test]
    fn broken_bar_fails_at_first_prefix() {
        let t = PartialMap::translation(Space::Line, Scalar::frac(1, 4), Interval::open(Scalar::zero(), Scalar::one())).unwrap();
        let wide = PartialMap::translation(Space::Line, Scalar::frac(1, 4), Interval::open(Scalar::frac(-1, 10), Scalar::frac(11, 10))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t).with_bar(wide)]).unwrap();
        let v = Interval::open(Scalar::frac(-1, 2), Scalar::frac(1, 2));
        let err = orbit_correspondence(&sys, &Scalar::frac(1, 10), &Scalar::frac(1, 5), 2, &v, 2).unwrap_err();
        assert!(matches!(err, CoarseError::ExtensionDomain { prefix: 1, .. }), "{err}");
    }

    #[test]
    fn nontrivial_germ_is_refused() {
        let m = crate::localmaps::MoebiusMap::affine(Scalar::from_int(2), Scalar::zero()).unwrap();
        let f = PartialMap::moebius(Space::Line, Interval::open(Scalar::from_int(-2), Scalar::from_int(2)), m.clone()).unwrap();
        let bar = PartialMap::moebius(Space::Line, Interval::real_line(), m).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("f", f).with_bar(bar)]).unwrap();
        let v = Interval::open(-Scalar::one(), Scalar::one());
        let err = orbit_correspondence(&sys, &Scalar::zero(), &Scalar::frac(1, 2), 2, &v, 2).unwrap_err();
        assert!(matches!(err, CoarseError::NontrivialGerm(_)));
    }
}
