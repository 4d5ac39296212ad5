//! Boundaries, quasi-lattice constants, Følner ratios and averaging
//! measures on finite pieces of orbit graphs.
//!
//! `∂_r S` is taken over the whole orbit: it holds the points of `S` within
//! `r` of the complement and the points outside `S` within `r` of `S`. The
//! graph boundary is `∂S = S ∩ ∂₂S`, the points of `S` with an edge leaving `S`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::exactnum::{Rational, Scalar};
use crate::localmaps::Interval;
use crate::pseudogroup::{EngineError, GeneratorSystem};

pub type NodeSet = BTreeSet<usize>;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FolnerError {
    #[error("insufficient margin: node {point} has depth {depth} but radius {radius} leaves room for only {room} more steps, {needed} needed")]
    InsufficientMargin { point: Scalar, depth: usize, radius: usize, room: usize, needed: usize },
    #[error("{0} is not a node of the graph")]
    NotANode(Scalar),
    #[error("support violation: f({0}) is non-zero outside the image of the generator")]
    SupportViolation(Scalar),
    #[error("the set A is not a {0}-net of the graph")]
    NotANet(usize),
    #[error("empty set")]
    EmptySet,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A finite piece of the orbit graph: all points within `radius` of the seeds.
#[derive(Clone, Debug)]
pub struct OrbitGraph {
    points: Vec<Scalar>,
    index: HashMap<Scalar, usize>,
    adj: Vec<Vec<usize>>,
    depth: Vec<usize>,
    radius: usize,
    max_degree: usize,
}

impl OrbitGraph {
    /// Multi-seed BFS out to `radius`; edges join `x` and `g(x)` for `g ∈ E`.
    pub fn build(sys: &GeneratorSystem, seeds: &[Scalar], radius: usize) -> Result<Self, EngineError> {
        let mut points = Vec::new();
        let mut index = HashMap::new();
        let mut depth = Vec::new();
        let mut queue = VecDeque::new();
        for s in seeds {
            let s = sys.space().reduce(s);
            if !index.contains_key(&s) {
                index.insert(s.clone(), points.len());
                queue.push_back(points.len());
                points.push(s);
                depth.push(0);
            }
        }
        let mut adj: Vec<Vec<usize>> = Vec::new();
        while let Some(k) = queue.pop_front() {
            if depth[k] == radius {
                continue;
            }
            let p = points[k].clone();
            for (_, q) in sys.neighbours(&p) {
                if index.contains_key(&q) {
                    continue;
                }
                if points.len() >= sys.node_cap() {
                    return Err(EngineError::NodeCap { cap: sys.node_cap(), radius });
                }
                index.insert(q.clone(), points.len());
                queue.push_back(points.len());
                depth.push(depth[k] + 1);
                points.push(q);
            }
        }
        adj.resize(points.len(), Vec::new());
        for k in 0..points.len() {
            let mut nb: Vec<usize> = sys
                .neighbours(&points[k])
                .filter_map(|(_, q)| index.get(&q).copied())
                .filter(|&j| j != k)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            adj[k] = nb;
        }
        Ok(OrbitGraph { points, index, adj, depth, radius, max_degree: sys.len() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `#E`, the bound on vertex degrees.
    pub fn degree_bound(&self) -> usize {
        self.max_degree
    }

    pub fn point(&self, k: usize) -> &Scalar {
        &self.points[k]
    }

    pub fn points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn depth(&self, k: usize) -> usize {
        self.depth[k]
    }

    pub fn neighbours(&self, k: usize) -> &[usize] {
        &self.adj[k]
    }

    pub fn id(&self, x: &Scalar) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn ids(&self, xs: &[Scalar]) -> Result<NodeSet, FolnerError> {
        xs.iter().map(|x| self.id(x).ok_or_else(|| FolnerError::NotANode(x.clone()))).collect()
    }

    pub fn all(&self) -> NodeSet {
        (0..self.len()).collect()
    }

    /// Graph distances from a set of sources, up to `limit`.
    pub fn distances_from(&self, sources: &NodeSet, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(k) = queue.pop_front() {
            let d = dist[k].expect("queued nodes have distances");
            if d == limit {
                continue;
            }
            for &j in &self.adj[k] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// Closed ball `{y : d(x, y) ≤ r}` in the finite graph.
    pub fn ball(&self, x: usize, r: usize) -> NodeSet {
        self.distances_from(&NodeSet::from([x]), r)
            .into_iter()
            .enumerate()
            .filter_map(|(k, d)| d.map(|_| k))
            .collect()
    }

    /// Every node of `s` must sit at least `needed` steps inside the graph.
    pub fn check_margin(&self, s: &NodeSet, needed: usize) -> Result<(), FolnerError> {
        for &k in s {
            if self.depth[k] + needed > self.radius {
                return Err(FolnerError::InsufficientMargin {
                    point: self.points[k].clone(),
                    depth: self.depth[k],
                    radius: self.radius,
                    room: self.radius - self.depth[k],
                    needed,
                });
            }
        }
        Ok(())
    }
}

/// `∂_r S` computed in the finite graph metric.
pub fn r_boundary_in_graph(g: &OrbitGraph, s: &NodeSet, r: usize) -> NodeSet {
    if s.is_empty() || r == 0 {
        return NodeSet::new();
    }
    let from_s = g.distances_from(s, r - 1);
    let comp: NodeSet = (0..g.len()).filter(|k| !s.contains(k)).collect();
    let from_c = g.distances_from(&comp, r - 1);
    (0..g.len())
        .filter(|k| if s.contains(k) { from_c[*k].is_some() } else { from_s[*k].is_some() })
        .collect()
}

/// `∂_r S` in the orbit metric; requires `S` to sit `r` steps inside the graph.
pub fn r_boundary(g: &OrbitGraph, s: &NodeSet, r: usize) -> Result<NodeSet, FolnerError> {
    g.check_margin(s, r)?;
    Ok(r_boundary_in_graph(g, s, r))
}

/// Points of `S` with an edge leaving `S`.
pub fn graph_boundary(g: &OrbitGraph, s: &NodeSet) -> Result<NodeSet, FolnerError> {
    g.check_margin(s, 1)?;
    Ok(s.iter().copied().filter(|&k| g.neighbours(k).iter().any(|j| !s.contains(j))).collect())
}

fn frac(n: usize, d: usize) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d.max(1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolnerRow {
    pub n: usize,
    pub r: usize,
    pub set_size: usize,
    pub boundary_size: usize,
    /// `#(S ∩ ∂_r S)`.
    pub inner_size: usize,
    pub ratio: Rational,
    pub inner_ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphRow {
    pub n: usize,
    pub set_size: usize,
    pub boundary_size: usize,
    pub ratio: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct FolnerReport {
    pub rows: Vec<FolnerRow>,
    pub graph_rows: Vec<GraphRow>,
}

/// Ratios `#∂_r S_n / #S_n`, their inner form, and `#∂S_n / #S_n`.
pub fn folner_ratios(g: &OrbitGraph, sets: &[NodeSet], rs: &[usize]) -> Result<FolnerReport, FolnerError> {
    let mut report = FolnerReport::default();
    let grid: Vec<(usize, usize)> = (0..sets.len()).flat_map(|n| rs.iter().map(move |&r| (n, r))).collect();
    let rows = grid
        .par_iter()
        .map(|&(n, r)| {
            let s = &sets[n];
            let b = r_boundary(g, s, r)?;
            let inner = b.iter().filter(|k| s.contains(k)).count();
            Ok(FolnerRow {
                n,
                r,
                set_size: s.len(),
                boundary_size: b.len(),
                inner_size: inner,
                ratio: frac(b.len(), s.len()),
                inner_ratio: frac(inner, s.len()),
            })
        })
        .collect::<Result<Vec<_>, FolnerError>>()?;
    report.rows = rows;
    for (n, s) in sets.iter().enumerate() {
        let b = graph_boundary(g, s)?;
        report.graph_rows.push(GraphRow { n, set_size: s.len(), boundary_size: b.len(), ratio: frac(b.len(), s.len()) });
    }
    Ok(report)
}

/// Exact test functions.
#[derive(Clone, Debug)]
pub enum TestFn {
    Constant(Scalar),
    /// Values on listed points, zero elsewhere.
    Table(HashMap<Scalar, Scalar>),
    /// Linear interpolation between breakpoints, zero outside them.
    PiecewiseLinear(Vec<(Scalar, Scalar)>),
}

impl TestFn {
    /// Tent on `[lo, hi]` peaking at the midpoint.
    pub fn tent(lo: Scalar, hi: Scalar, height: Scalar) -> Self {
        let mid = (&lo + &hi) * Scalar::frac(1, 2);
        TestFn::PiecewiseLinear(vec![(lo, Scalar::zero()), (mid, height), (hi, Scalar::zero())])
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            TestFn::Constant(c) => c.clone(),
            TestFn::Table(t) => t.get(x).cloned().unwrap_or_else(Scalar::zero),
            TestFn::PiecewiseLinear(bp) => {
                for w in bp.windows(2) {
                    let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
                    if x0 <= x && x <= x1 {
                        let t = (x - x0) / (x1 - x0);
                        return y0 + &(&t * &(y1 - y0));
                    }
                }
                Scalar::zero()
            }
        }
    }

    pub fn sup_abs(&self) -> Scalar {
        let vals: Vec<Scalar> = match self {
            TestFn::Constant(c) => vec![c.clone()],
            TestFn::Table(t) => t.values().cloned().collect(),
            TestFn::PiecewiseLinear(bp) => bp.iter().map(|(_, y)| y.clone()).collect(),
        };
        vals.into_iter().map(|v| v.abs()).max().unwrap_or_else(Scalar::zero)
    }

    /// An open interval outside which the function vanishes, if bounded.
    pub fn support_hull(&self) -> Option<Interval> {
        match self {
            TestFn::Constant(c) if c.is_zero() => None,
            TestFn::Constant(_) => Some(Interval::real_line()),
            TestFn::Table(_) => None,
            TestFn::PiecewiseLinear(bp) => {
                let lo = bp.first()?.0.clone();
                let hi = bp.last()?.0.clone();
                (lo < hi).then(|| Interval::open(lo, hi))
            }
        }
    }
}

/// `μ(f) = (1/#S) Σ_{x ∈ S} f(x)`.
pub fn averaging_measure(points: &[Scalar], f: &TestFn) -> Result<Scalar, FolnerError> {
    if points.is_empty() {
        return Err(FolnerError::EmptySet);
    }
    let sum = points.iter().fold(Scalar::zero(), |acc, x| acc + f.eval(x));
    Ok(sum / Scalar::from_int(points.len() as i64))
}

#[derive(Clone, Debug)]
pub struct DefectReport {
    pub defect: Scalar,
    pub bound: Scalar,
    pub boundary_ratio: Rational,
    pub passed: bool,
}

/// `|μ(f∘g) − μ(f)|` against `2·sup|f|·#∂S/#S`, with `f∘g = 0` off `dom g`.
pub fn invariance_defect(
    g: &OrbitGraph,
    s: &NodeSet,
    sys: &GeneratorSystem,
    member: usize,
    f: &TestFn,
) -> Result<DefectReport, FolnerError> {
    if s.is_empty() {
        return Err(FolnerError::EmptySet);
    }
    let gen = &sys.members()[member].map;
    let image = gen.image();
    if let Some(hull) = f.support_hull() {
        if !image.contains_interval(&hull) {
            let witness = hull.midpoint().unwrap_or_else(Scalar::zero);
            return Err(FolnerError::SupportViolation(witness));
        }
    }
    let pts: Vec<Scalar> = s.iter().map(|&k| g.point(k).clone()).collect();
    for x in &pts {
        if !f.eval(x).is_zero() && !image.contains(x) {
            return Err(FolnerError::SupportViolation(x.clone()));
        }
    }
    let fg = pts.iter().fold(Scalar::zero(), |acc, x| match gen.try_apply(x) {
        Some(y) => acc + f.eval(&y),
        None => acc,
    });
    let plain = pts.iter().fold(Scalar::zero(), |acc, x| acc + f.eval(x));
    let n = Scalar::from_int(pts.len() as i64);
    let defect = ((fg - plain) / n).abs();
    let b = graph_boundary(g, s)?;
    let boundary_ratio = frac(b.len(), s.len());
    let bound = Scalar::from_int(2) * f.sup_abs() * Scalar::rational(boundary_ratio.clone());
    let passed = defect <= bound;
    Ok(DefectReport { defect, bound, boundary_ratio, passed })
}

/// `K_r`: the largest closed `r`-ball among nodes lying `r` steps inside.
pub fn quasi_lattice_k(g: &OrbitGraph, r: usize) -> Result<usize, FolnerError> {
    let inner: Vec<usize> = (0..g.len()).filter(|&k| g.depth(k) + r <= g.radius()).collect();
    if inner.is_empty() {
        let s: NodeSet = (0..g.len()).collect();
        g.check_margin(&s, r)?;
    }
    Ok(inner.par_iter().map(|&k| g.ball(k, r).len()).max().unwrap_or(0))
}

/// Largest closed `r`-ball over the whole finite graph.
pub fn ball_bound_in_graph(g: &OrbitGraph, r: usize) -> usize {
    (0..g.len()).into_par_iter().map(|k| g.ball(k, r).len()).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ACapSReport {
    pub set_size: usize,
    pub boundary_part: usize,
    pub k: usize,
    pub a_cap_s: usize,
    pub holds: bool,
}

/// `#S ≤ #(S ∩ ∂_C S) + K·#(A ∩ S)` in the finite graph, for a `C`-net `A`.
pub fn a_cap_s_check(g: &OrbitGraph, s: &NodeSet, a: &NodeSet, c: usize) -> Result<ACapSReport, FolnerError> {
    let from_a = g.distances_from(a, c.saturating_sub(1));
    if c == 0 || from_a.iter().any(|d| d.is_none()) {
        return Err(FolnerError::NotANet(c));
    }
    let k = ball_bound_in_graph(g, c);
    let b = r_boundary_in_graph(g, s, c);
    let boundary_part = s.iter().filter(|x| b.contains(x)).count();
    let a_cap_s = s.iter().filter(|x| a.contains(x)).count();
    let holds = s.len() <= boundary_part + k * a_cap_s;
    Ok(ACapSReport { set_size: s.len(), boundary_part, k, a_cap_s, holds })
}

/// `#(∂_r S ∖ S) ≤ K_r·#(S ∩ ∂_r S)`; returns both sides and `K_r`.
pub fn outer_inner_check(g: &OrbitGraph, s: &NodeSet, r: usize) -> Result<(usize, usize, usize), FolnerError> {
    let b = r_boundary(g, s, r)?;
    let outer = b.iter().filter(|x| !s.contains(x)).count();
    let inner = b.len() - outer;
    let k = quasi_lattice_k(g, r)?;
    Ok((outer, inner, k))
}

/// `S_n = B(x, n)` as node sets.
pub fn ball_sets(g: &OrbitGraph, center: usize, ns: &[usize]) -> Vec<NodeSet> {
    ns.iter().map(|&n| g.ball(center, n)).collect()
}

/// Points `h^m(x₀)` for `0 ≤ m ≤ n`, following one member.
pub fn segment_points(sys: &GeneratorSystem, member: usize, x0: &Scalar, n: usize) -> Result<Vec<Scalar>, EngineError> {
    let mut out = vec![sys.space().reduce(x0)];
    for m in 0..n {
        let y = sys.step(member, &out[m]).ok_or(EngineError::Undefined { prefix: m + 1, at: out[m].clone() })?;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmaps::{DomainSet, PartialMap, Space};
    use crate::pseudogroup::Generator;
    use crate::recurrence::{build_nonrecurrent_example, NonRecurrentParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z_system() -> GeneratorSystem {
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::real_line()).unwrap();
        GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap()
    }

    fn ints(g: &OrbitGraph, lo: i64, hi: i64) -> NodeSet {
        let pts: Vec<Scalar> = (lo..=hi).map(Scalar::from_int).collect();
        g.ids(&pts).unwrap()
    }

    fn as_ints(g: &OrbitGraph, s: &NodeSet) -> Vec<i64> {
        let mut v: Vec<i64> = s.iter().map(|&k| g.point(k).as_rational().unwrap().to_integer().try_into().unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn path_graph_boundaries() {
        let g = OrbitGraph::build(&z_system(), &[Scalar::zero()], 20).unwrap();
        let s = ints(&g, 0, 6);
        // strict inequality d < r: at r = 2 only the endpoints and their outer neighbours
        assert_eq!(as_ints(&g, &r_boundary(&g, &s, 2).unwrap()), vec![-1, 0, 6, 7]);
        assert_eq!(as_ints(&g, &r_boundary(&g, &s, 3).unwrap()), vec![-2, -1, 0, 1, 5, 6, 7, 8]);
        assert_eq!(as_ints(&g, &graph_boundary(&g, &s).unwrap()), vec![0, 6]);
        assert!(r_boundary(&g, &NodeSet::new(), 2).unwrap().is_empty());
        // a shell: interior ball inside a larger ball, r = 1 gives S's rim and the ring outside
        let inner = ints(&g, -3, 3);
        assert_eq!(as_ints(&g, &r_boundary(&g, &inner, 1).unwrap()), Vec::<i64>::new());
        assert_eq!(as_ints(&g, &r_boundary(&g, &inner, 2).unwrap()), vec![-4, -3, 3, 4]);
        let far = ints(&g, 15, 19);
        assert!(matches!(r_boundary(&g, &far, 3), Err(FolnerError::InsufficientMargin { .. })));
    }

    #[test]
    fn whole_component_has_empty_boundary() {
        let r = PartialMap::rotation(&Scalar::frac(1, 5));
        let sys = GeneratorSystem::new(Space::Circle, DomainSet::empty(), vec![Generator::new("r", r)]).unwrap();
        let g = OrbitGraph::build(&sys, &[Scalar::zero()], 10).unwrap();
        assert_eq!(g.len(), 5);
        assert!(graph_boundary(&g, &g.all()).unwrap().is_empty());
    }

    #[test]
    fn quasi_lattice_constants() {
        let g = OrbitGraph::build(&z_system(), &[Scalar::zero()], 10).unwrap();
        assert_eq!(quasi_lattice_k(&g, 1).unwrap(), 3);
        assert!(quasi_lattice_k(&g, 1).unwrap() <= g.degree_bound() + 1);
        assert_eq!(quasi_lattice_k(&g, 3).unwrap(), 7);
    }

    #[test]
    fn ball_sequence_ratios() {
        let g = OrbitGraph::build(&z_system(), &[Scalar::zero()], 30).unwrap();
        let c = g.id(&Scalar::zero()).unwrap();
        let sets = ball_sets(&g, c, &[2, 5, 10]);
        let rep = folner_ratios(&g, &sets, &[1, 2, 3]).unwrap();
        for row in &rep.rows {
            let n = [2, 5, 10][row.n];
            // r − 1 points of ∂_r B(0, n) on each side, inside and outside
            assert_eq!(row.inner_ratio, frac(2 * (row.r - 1), 2 * n + 1));
            assert_eq!(row.ratio, frac(4 * (row.r - 1), 2 * n + 1));
        }
        for row in &rep.graph_rows {
            assert_eq!(row.boundary_size, 2);
        }
    }

    #[test]
    fn constant_sets_constant_ratios() {
        let g = OrbitGraph::build(&z_system(), &[Scalar::zero()], 10).unwrap();
        let s = ints(&g, 0, 3);
        let rep = folner_ratios(&g, &[s.clone(), s], &[2]).unwrap();
        assert_eq!(rep.rows[0].ratio, rep.rows[1].ratio);
    }

    #[test]
    fn averaging_examples() {
        let pts: Vec<Scalar> = (0..5).map(Scalar::from_int).collect();
        assert_eq!(averaging_measure(&pts, &TestFn::Constant(Scalar::one())).unwrap(), Scalar::one());
        assert_eq!(averaging_measure(&pts, &TestFn::Constant(Scalar::zero())).unwrap(), Scalar::zero());
        let tent = TestFn::tent(Scalar::zero(), Scalar::one(), Scalar::one());
        assert_eq!(tent.eval(&Scalar::frac(1, 4)), Scalar::frac(1, 2));
        assert_eq!(tent.eval(&Scalar::from_int(3)), Scalar::zero());
        for n in 1..6i64 {
            let s: Vec<Scalar> = (n..=2 * n).map(|k| Scalar::from_int(k) + Scalar::frac(1, 2)).collect();
            assert_eq!(averaging_measure(&s, &tent).unwrap(), Scalar::zero());
        }
        assert!(averaging_measure(&[], &tent).is_err());
    }

    #[test]
    fn measure_is_linear_positive_unital() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Scalar> = (0..9).map(|k| Scalar::frac(k, 3)).collect();
        for _ in 0..20 {
            let f: HashMap<Scalar, Scalar> = pts.iter().map(|p| (p.clone(), Scalar::from_int(rng.gen_range(0..9)))).collect();
            let g: HashMap<Scalar, Scalar> = pts.iter().map(|p| (p.clone(), Scalar::from_int(rng.gen_range(-4..5)))).collect();
            let sum: HashMap<Scalar, Scalar> = pts.iter().map(|p| (p.clone(), &f[p] + &g[p])).collect();
            let mf = averaging_measure(&pts, &TestFn::Table(f.clone())).unwrap();
            let mg = averaging_measure(&pts, &TestFn::Table(g)).unwrap();
            let ms = averaging_measure(&pts, &TestFn::Table(sum)).unwrap();
            assert_eq!(ms, &mf + &mg);
            assert!(!mf.is_negative());
            let tf = TestFn::Table(f);
            assert!(mf <= tf.sup_abs());
        }
    }

    #[test]
    fn nonrecurrent_segment_boundary() {
        let ex = build_nonrecurrent_example(&NonRecurrentParams::standard()).unwrap();
        let g1i = ex.system.inverse(ex.member("g1"));
        let x0 = Scalar::frac(9, 10);
        for n in [5usize, 10] {
            let pts = segment_points(&ex.system, g1i, &x0, n).unwrap();
            let g = OrbitGraph::build(&ex.system, &pts, 2).unwrap();
            let s = g.ids(&pts).unwrap();
            let b = graph_boundary(&g, &s).unwrap();
            let expect = g.ids(&[x0.clone(), pts[n].clone()]).unwrap();
            assert_eq!(b, expect);
            let tent = TestFn::tent(Scalar::one(), Scalar::from_int(5), Scalar::one());
            let rep = invariance_defect(&g, &s, &ex.system, ex.member("g1"), &tent).unwrap();
            // direct oracle: only g1(x0) = 135/109 lands in the support
            let expect_defect = tent.eval(&Scalar::frac(135, 109)) / Scalar::from_int(n as i64 + 1);
            assert_eq!(rep.defect, expect_defect);
            assert!(rep.passed);
            assert_eq!(rep.bound, Scalar::frac(4, n as i64 + 1));
        }
    }

    #[test]
    fn support_violation_detected() {
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::open(Scalar::zero(), Scalar::from_int(5))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap();
        let g = OrbitGraph::build(&sys, &[Scalar::frac(1, 2)], 6).unwrap();
        let s = g.ids(&[Scalar::frac(3, 2), Scalar::frac(5, 2)]).unwrap();
        let f = TestFn::tent(Scalar::zero(), Scalar::from_int(2), Scalar::one());
        assert!(matches!(invariance_defect(&g, &s, &sys, 0, &f), Err(FolnerError::SupportViolation(_))));
        let zero = TestFn::Constant(Scalar::zero());
        let rep = invariance_defect(&g, &s, &sys, 0, &zero).unwrap();
        assert!(rep.defect.is_zero() && rep.passed);
    }

    #[test]
    fn invariant_set_has_zero_defect() {
        let r = PartialMap::rotation(&Scalar::frac(1, 4));
        let sys = GeneratorSystem::new(Space::Circle, DomainSet::empty(), vec![Generator::new("r", r)]).unwrap();
        let g = OrbitGraph::build(&sys, &[Scalar::frac(1, 8)], 4).unwrap();
        let s = g.all();
        let mut t = HashMap::new();
        for (k, p) in g.points().iter().enumerate() {
            t.insert(p.clone(), Scalar::from_int(k as i64 + 1));
        }
        let rep = invariance_defect(&g, &s, &sys, 0, &TestFn::Table(t)).unwrap();
        assert!(rep.defect.is_zero());
    }

    #[test]
    fn random_boundary_identities() {
        let sys = {
            let alpha = Scalar::sqrt(2).unwrap() - Scalar::one();
            let r = PartialMap::rotation(&alpha);
            let s = PartialMap::rotation(&Scalar::frac(1, 7));
            GeneratorSystem::new(Space::Circle, DomainSet::empty(), vec![Generator::new("r", r), Generator::new("s", s)]).unwrap()
        };
        let g = OrbitGraph::build(&sys, &[Scalar::zero()], 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inner: Vec<usize> = (0..g.len()).filter(|&k| g.depth(k) <= 3).collect();
        for _ in 0..40 {
            let s: NodeSet = inner.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if s.is_empty() {
                continue;
            }
            let d2 = r_boundary(&g, &s, 2).unwrap();
            let chained: NodeSet = s.intersection(&d2).copied().collect();
            assert_eq!(graph_boundary(&g, &s).unwrap(), chained);
            let (outer, inner_n, k) = outer_inner_check(&g, &s, 2).unwrap();
            assert!(outer <= k * inner_n);
        }
    }
}
