//! Generator systems and the orbit-graph engine.
//!
//! A [`GeneratorSystem`] is a symmetric family of partial maps. Words are
//! sequences of member indices applied left to right: `[g, h]` means
//! "first `g`, then `h`". Orbit points are identified by exact equality.

use std::collections::HashMap;

use crate::exactnum::Scalar;
use crate::localmaps::{DomainSet, Interval, MapError, PartialMap, Space};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;
pub const NODE_CAP_ENV: &str = "PSEUDODYN_NODE_CAP";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("node cap {cap} exceeded while expanding to radius {radius}")]
    NodeCap { cap: usize, radius: usize },
    #[error("word undefined: prefix of length {prefix} fails at {at}")]
    Undefined { prefix: usize, at: Scalar },
    #[error("invalid generator system: {0}")]
    System(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A generator as declared by the user, before symmetric completion.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub map: PartialMap,
    pub bar: Option<PartialMap>,
    /// Name of an already declared generator that is this one's inverse.
    pub inverse: Option<String>,
}

impl Generator {
    pub fn new(name: impl Into<String>, map: PartialMap) -> Self {
        Generator { name: name.into(), map, bar: None, inverse: None }
    }

    pub fn with_bar(mut self, bar: PartialMap) -> Self {
        self.bar = Some(bar);
        self
    }

    pub fn with_inverse(mut self, name: impl Into<String>) -> Self {
        self.inverse = Some(name.into());
        self
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub name: String,
    pub map: PartialMap,
    pub bar: Option<PartialMap>,
    pub inverse_of: usize,
}

#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    space: Space,
    window: DomainSet,
    members: Vec<Member>,
    node_cap: usize,
    notes: Vec<String>,
}

pub type Word = Vec<usize>;

impl GeneratorSystem {
    /// Builds a symmetric system. Missing inverses are appended after the
    /// declared generators, in declaration order.
    pub fn new(space: Space, window: DomainSet, gens: Vec<Generator>) -> Result<Self, EngineError> {
        let mut notes = Vec::new();
        let mut members: Vec<Member> = Vec::new();
        let mut by_name: HashMap<String, usize> = HashMap::new();
        for g in &gens {
            if g.map.space() != space {
                return Err(EngineError::System(format!("generator {} lives on the wrong space", g.name)));
            }
            if by_name.insert(g.name.clone(), members.len()).is_some() {
                return Err(EngineError::System(format!("duplicate generator name {}", g.name)));
            }
            members.push(Member {
                name: g.name.clone(),
                map: g.map.clone(),
                bar: g.bar.clone(),
                inverse_of: usize::MAX,
            });
        }
        for (k, g) in gens.iter().enumerate() {
            if let Some(inv) = &g.inverse {
                let j = *by_name
                    .get(inv)
                    .ok_or_else(|| EngineError::System(format!("{}: unknown inverse {inv}", g.name)))?;
                if members[j].map != members[k].map.invert() {
                    return Err(EngineError::System(format!("{inv} is not the inverse of {}", g.name)));
                }
                members[k].inverse_of = j;
                members[j].inverse_of = k;
            }
        }
        for k in 0..gens.len() {
            if members[k].inverse_of != usize::MAX {
                continue;
            }
            let inv = members[k].map.invert();
            if inv == members[k].map {
                members[k].inverse_of = k;
                continue;
            }
            // an undeclared inverse may still be present under another name
            if let Some(j) = (0..gens.len()).find(|&j| members[j].inverse_of == usize::MAX && members[j].map == inv) {
                members[k].inverse_of = j;
                members[j].inverse_of = k;
                continue;
            }
            let name = format!("{}^-1", members[k].name);
            notes.push(format!("added inverse {name}"));
            let bar = members[k].bar.as_ref().map(|b| b.invert());
            let idx = members.len();
            members.push(Member { name, map: inv, bar, inverse_of: k });
            members[k].inverse_of = idx;
        }
        for m in &members {
            if let Some(bar) = &m.bar {
                if !m.map.is_restriction_of(bar) {
                    return Err(EngineError::System(format!("{} does not agree with its extension", m.name)));
                }
                if !closure_within(&m.map.domain(), &bar.domain(), space) {
                    return Err(EngineError::System(format!(
                        "closure of dom {} is not inside the extension's domain",
                        m.name
                    )));
                }
            }
        }
        let node_cap = std::env::var(NODE_CAP_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_NODE_CAP);
        Ok(GeneratorSystem { space, window, members, node_cap, notes })
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn node_cap(&self) -> usize {
        self.node_cap
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn window(&self) -> &DomainSet {
        &self.window
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn has_bars(&self) -> bool {
        self.members.iter().all(|m| m.bar.is_some())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|m| m.name == name)
    }

    pub fn inverse(&self, m: usize) -> usize {
        self.members[m].inverse_of
    }

    /// Parses a word written as space- or comma-separated member names.
    pub fn parse_word(&self, s: &str) -> Result<Word, EngineError> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| self.index_of(t).ok_or_else(|| EngineError::System(format!("unknown generator {t}"))))
            .collect()
    }

    pub fn word_name(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "id".to_string();
        }
        w.iter().map(|&m| self.members[m].name.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn invert_word(&self, w: &[usize]) -> Word {
        w.iter().rev().map(|&m| self.inverse(m)).collect()
    }

    /// One generator step.
    pub fn step(&self, m: usize, x: &Scalar) -> Option<Scalar> {
        self.members[m].map.try_apply(x)
    }

    pub fn evaluate_word(&self, w: &[usize], x: &Scalar) -> Result<Scalar, EngineError> {
        let mut y = self.space.reduce(x);
        for (k, &m) in w.iter().enumerate() {
            y = self.step(m, &y).ok_or(EngineError::Undefined { prefix: k + 1, at: y.clone() })?;
        }
        Ok(y)
    }

    /// The composite partial map `w_k ∘ … ∘ w_1`.
    pub fn word_map(&self, w: &[usize]) -> PartialMap {
        let mut acc = PartialMap::identity(self.space, &full_domain(self.space));
        for &m in w {
            acc = self.members[m].map.compose(&acc);
        }
        acc
    }

    /// Composite of the bar extensions; `None` if some member has no bar.
    pub fn bar_word_map(&self, w: &[usize]) -> Option<PartialMap> {
        let mut acc = PartialMap::identity(self.space, &full_domain(self.space));
        for &m in w {
            acc = self.members[m].bar.as_ref()?.compose(&acc);
        }
        Some(acc)
    }

    /// Members defined at `x` together with their images, in declaration
    /// order.
    pub fn neighbours(&self, x: &Scalar) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        let x = x.clone();
        (0..self.members.len()).filter_map(move |m| self.step(m, &x).map(|y| (m, y)))
    }
}

/// The whole line or the whole circle.
pub fn full_domain(space: Space) -> DomainSet {
    match space {
        Space::Line => DomainSet::from_interval(Interval::real_line()),
        Space::Circle => DomainSet::from_interval(Interval::unit()),
    }
}

/// Whether the closure of `dom` (in `space`) lies in `target`.
pub fn closure_within(dom: &DomainSet, target: &DomainSet, space: Space) -> bool {
    let one = crate::exactnum::ExtScalar::Finite(Scalar::one());
    dom.intervals().iter().all(|iv| {
        let (Some(lo), Some(hi)) = (iv.lo.finite(), iv.hi.finite()) else {
            return false;
        };
        if space == Space::Circle && iv.hi == one {
            if iv.lo.finite().is_some_and(|l| l.is_zero()) {
                return target.contains_interval(&Interval::unit());
            }
            return target.contains_interval(&Interval::closed_open(lo.clone(), Scalar::one()))
                && target.contains(&Scalar::zero());
        }
        target.contains_interval(&Interval::closed(lo.clone(), hi.clone()))
    })
}

#[derive(Clone, Debug)]
pub struct BallNode {
    pub point: Scalar,
    pub dist: usize,
    /// Parent node index and the member carrying parent to this node.
    pub parent: Option<(usize, usize)>,
}

/// BFS tree of an orbit out to a word radius.
#[derive(Clone, Debug)]
pub struct OrbitBall {
    pub base: Scalar,
    pub radius: usize,
    nodes: Vec<BallNode>,
    index: HashMap<Scalar, usize>,
}

impl OrbitBall {
    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, x: &Scalar) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn dist(&self, x: &Scalar) -> Option<usize> {
        self.index_of(x).map(|k| self.nodes[k].dist)
    }

    pub fn points(&self) -> impl Iterator<Item = &Scalar> {
        self.nodes.iter().map(|n| &n.point)
    }

    /// The BFS-tree word carrying the base to node `k`.
    pub fn word_to(&self, mut k: usize) -> Word {
        let mut w = Vec::new();
        while let Some((p, m)) = self.nodes[k].parent {
            w.push(m);
            k = p;
        }
        w.reverse();
        w
    }
}

/// Points at word distance at most `radius` from `x`, with BFS parents.
pub fn orbit_ball(sys: &GeneratorSystem, x: &Scalar, radius: usize) -> Result<OrbitBall, EngineError> {
    let base = sys.space().reduce(x);
    let mut nodes = vec![BallNode { point: base.clone(), dist: 0, parent: None }];
    let mut index = HashMap::from([(base.clone(), 0usize)]);
    let mut frontier = vec![0usize];
    for d in 1..=radius {
        let mut next = Vec::new();
        for &k in &frontier {
            let p = nodes[k].point.clone();
            for (m, y) in sys.neighbours(&p) {
                if index.contains_key(&y) {
                    continue;
                }
                if nodes.len() >= sys.node_cap() {
                    return Err(EngineError::NodeCap { cap: sys.node_cap(), radius });
                }
                index.insert(y.clone(), nodes.len());
                next.push(nodes.len());
                nodes.push(BallNode { point: y, dist: d, parent: Some((k, m)) });
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(OrbitBall { base, radius, nodes, index })
}

/// Independent balls around several seeds, computed in parallel.
pub fn orbit_balls(sys: &GeneratorSystem, seeds: &[Scalar], radius: usize) -> Result<Vec<OrbitBall>, EngineError> {
    use rayon::prelude::*;
    seeds.par_iter().map(|x| orbit_ball(sys, x, radius)).collect()
}

/// `d_E(x, y)` if at most `rmax`, by bidirectional BFS.
pub fn word_metric(sys: &GeneratorSystem, x: &Scalar, y: &Scalar, rmax: usize) -> Result<Option<usize>, EngineError> {
    let x = sys.space().reduce(x);
    let y = sys.space().reduce(y);
    if x == y {
        return Ok(Some(0));
    }
    let mut seen = [HashMap::from([(x.clone(), 0usize)]), HashMap::from([(y.clone(), 0usize)])];
    let mut frontier = [vec![x], vec![y]];
    let mut depth = [0usize, 0usize];
    while depth[0] + depth[1] < rmax {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            return Ok(None);
        }
        let other = 1 - side;
        let mut next = Vec::new();
        let mut best: Option<usize> = None;
        for p in &frontier[side] {
            for (_, q) in sys.neighbours(p) {
                if seen[side].contains_key(&q) {
                    continue;
                }
                if let Some(&e) = seen[other].get(&q) {
                    let total = depth[side] + 1 + e;
                    best = Some(best.map_or(total, |b: usize| b.min(total)));
                }
                seen[side].insert(q.clone(), depth[side] + 1);
                next.push(q);
            }
        }
        if seen[0].len() + seen[1].len() > sys.node_cap() {
            return Err(EngineError::NodeCap { cap: sys.node_cap(), radius: rmax });
        }
        depth[side] += 1;
        if let Some(b) = best {
            return Ok((b <= rmax).then_some(b));
        }
        frontier[side] = next;
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct StabilizerWord {
    pub word: Word,
    pub trivial_germ: bool,
}

#[derive(Clone, Debug)]
pub struct GermReport {
    pub point: Scalar,
    pub max_len: usize,
    pub words_enumerated: usize,
    pub fixing: Vec<StabilizerWord>,
}

impl GermReport {
    /// No word of length at most `max_len` has a non-trivial germ at the point.
    pub fn trivial_up_to_len(&self) -> bool {
        self.fixing.iter().all(|s| s.trivial_germ)
    }
}

/// Enumerates freely reduced words of length ≤ `max_len` defined at `x`
/// and classifies the germs of those fixing `x`.
pub fn germ_group_sample(sys: &GeneratorSystem, x: &Scalar, max_len: usize) -> Result<GermReport, EngineError> {
    let x = sys.space().reduce(x);
    let mut report = GermReport { point: x.clone(), max_len, words_enumerated: 0, fixing: Vec::new() };
    let mut word = Vec::new();
    germ_dfs(sys, &x, &x, max_len, &mut word, &mut report)?;
    Ok(report)
}

fn germ_dfs(
    sys: &GeneratorSystem,
    base: &Scalar,
    at: &Scalar,
    left: usize,
    word: &mut Word,
    report: &mut GermReport,
) -> Result<(), EngineError> {
    if left == 0 {
        return Ok(());
    }
    for (m, y) in sys.neighbours(at) {
        if word.last().is_some_and(|&l| sys.inverse(l) == m) {
            continue;
        }
        report.words_enumerated += 1;
        if report.words_enumerated > sys.node_cap() {
            return Err(EngineError::NodeCap { cap: sys.node_cap(), radius: report.max_len });
        }
        word.push(m);
        if &y == base {
            let map = sys.word_map(word);
            let trivial_germ = map.germ_is_identity(base)?;
            report.fixing.push(StabilizerWord { word: word.clone(), trivial_germ });
        }
        germ_dfs(sys, base, &y, left - 1, word, report)?;
        word.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmaps::MoebiusMap;
    use std::collections::BTreeMap;

    fn rotation_system(alpha: Scalar) -> GeneratorSystem {
        let window = full_domain(Space::Circle);
        GeneratorSystem::new(Space::Circle, window, vec![Generator::new("r", PartialMap::rotation(&alpha))]).unwrap()
    }

    #[test]
    fn inverse_completion() {
        let sys = rotation_system(Scalar::frac(2, 5));
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.members()[1].name, "r^-1");
        assert_eq!(sys.inverse(0), 1);
        assert_eq!(sys.notes(), ["added inverse r^-1"]);
        let half = rotation_system(Scalar::frac(1, 2));
        assert_eq!(half.len(), 1);
        assert_eq!(half.inverse(0), 0);
    }

    #[test]
    fn declared_inverse_is_checked() {
        let r = PartialMap::rotation(&Scalar::frac(1, 5));
        let bad = Generator::new("s", PartialMap::rotation(&Scalar::frac(1, 5))).with_inverse("r");
        let err = GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r.clone()), bad]);
        assert!(err.is_err());
        let good = Generator::new("s", r.invert()).with_inverse("r");
        let sys = GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r), good]).unwrap();
        assert_eq!(sys.len(), 2);
    }

    #[test]
    fn bar_validation() {
        let iv = Interval::open(Scalar::zero(), Scalar::one());
        let g = PartialMap::translation(Space::Line, Scalar::frac(1, 4), iv.clone()).unwrap();
        let wide = PartialMap::translation(Space::Line, Scalar::frac(1, 4), Interval::open(-Scalar::one(), Scalar::from_int(2))).unwrap();
        let w = DomainSet::from_interval(Interval::open(Scalar::zero(), Scalar::from_int(2)));
        assert!(GeneratorSystem::new(Space::Line, w.clone(), vec![Generator::new("g", g.clone()).with_bar(wide)]).is_ok());
        // a bar equal to the base map fails the closure condition
        assert!(GeneratorSystem::new(Space::Line, w.clone(), vec![Generator::new("g", g.clone()).with_bar(g.clone())]).is_err());
        let other = PartialMap::translation(Space::Line, Scalar::frac(1, 3), Interval::real_line()).unwrap();
        assert!(GeneratorSystem::new(Space::Line, w, vec![Generator::new("g", g).with_bar(other)]).is_err());
    }

    #[test]
    fn ball_examples() {
        let sys = rotation_system(Scalar::frac(2, 5));
        let b0 = orbit_ball(&sys, &Scalar::zero(), 0).unwrap();
        assert_eq!(b0.len(), 1);
        let b = orbit_ball(&sys, &Scalar::zero(), 2).unwrap();
        // oracle: ±k·2/5 mod 1 for k ≤ 2
        let mut oracle = BTreeMap::new();
        for k in -2i64..=2 {
            let p = Scalar::frac((2 * k).rem_euclid(5), 5);
            let e = oracle.entry(p.to_string()).or_insert(k.unsigned_abs() as usize);
            *e = (*e).min(k.unsigned_abs() as usize);
        }
        let got: BTreeMap<String, usize> = b.nodes().iter().map(|n| (n.point.to_string(), n.dist)).collect();
        assert_eq!(got, oracle);
        for (k, n) in b.nodes().iter().enumerate() {
            assert_eq!(sys.evaluate_word(&b.word_to(k), &Scalar::zero()).unwrap(), n.point);
        }
    }

    #[test]
    fn metric_examples() {
        let sys = rotation_system(Scalar::frac(2, 5));
        let x = Scalar::frac(1, 7);
        assert_eq!(word_metric(&sys, &x, &x, 0).unwrap(), Some(0));
        assert_eq!(word_metric(&sys, &Scalar::zero(), &Scalar::frac(4, 5), 5).unwrap(), Some(2));
        assert_eq!(word_metric(&sys, &Scalar::zero(), &Scalar::frac(4, 5), 1).unwrap(), None);
        assert_eq!(word_metric(&sys, &Scalar::zero(), &Scalar::frac(1, 7), 10).unwrap(), None);
    }

    #[test]
    fn word_evaluation() {
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::open(Scalar::zero(), Scalar::from_int(2))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap();
        let x = Scalar::frac(1, 2);
        assert_eq!(sys.evaluate_word(&[], &x).unwrap(), x);
        assert_eq!(sys.evaluate_word(&[0, 1], &x).unwrap(), x);
        assert_eq!(sys.evaluate_word(&[0, 0], &x).unwrap(), Scalar::frac(5, 2));
        assert_eq!(
            sys.evaluate_word(&[0, 0, 0], &x),
            Err(EngineError::Undefined { prefix: 3, at: Scalar::frac(5, 2) })
        );
        assert_eq!(sys.parse_word("t t^-1").unwrap(), vec![0, 1]);
        assert_eq!(sys.word_name(&[0, 1]), "t t^-1");
        let m = sys.word_map(&[0, 0]);
        assert_eq!(m.domain(), DomainSet::from_interval(Interval::open(Scalar::zero(), Scalar::one())));
    }

    #[test]
    fn node_cap_is_enforced() {
        let sys = rotation_system(Scalar::sqrt(2).unwrap() - Scalar::one()).with_node_cap(10);
        assert!(matches!(orbit_ball(&sys, &Scalar::zero(), 20), Err(EngineError::NodeCap { .. })));
    }

    #[test]
    fn germ_samples() {
        let sys = rotation_system(Scalar::sqrt(2).unwrap() - Scalar::one());
        let rep = germ_group_sample(&sys, &Scalar::frac(1, 3), 6).unwrap();
        assert!(rep.fixing.is_empty());
        let third = rotation_system(Scalar::frac(1, 3));
        let rep = germ_group_sample(&third, &Scalar::zero(), 3).unwrap();
        assert!(rep.fixing.iter().any(|s| s.word == vec![0, 0, 0] && s.trivial_germ));
        assert!(rep.trivial_up_to_len());
    }

    #[test]
    fn nontrivial_germ_detected() {
        // x ↦ 2x fixes 0 with a non-trivial germ
        let m = MoebiusMap::affine(Scalar::from_int(2), Scalar::zero()).unwrap();
        let f = PartialMap::moebius(Space::Line, Interval::real_line(), m).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("f", f)]).unwrap();
        let rep = germ_group_sample(&sys, &Scalar::zero(), 2).unwrap();
        assert!(!rep.trivial_up_to_len());
        assert_eq!(rep.fixing.len(), 4);
    }
}
