//! The reproduction suite: ten checks of the constructive examples and
//! invariants, each against an oracle that avoids the engine's code paths.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coarse::{bar_system, distortion_stats, orbit_correspondence};
use crate::equicont::{orbit_density, EquicontError};
use crate::exactnum::{Rational, Scalar};
use crate::folner::{a_cap_s_check, averaging_measure, graph_boundary, invariance_defect, r_boundary, NodeSet, OrbitGraph, TestFn};
use crate::localmaps::{DomainSet, Interval, PartialMap, Space};
use crate::metrization::{glue_metric, lower_bound_check, metric_violations, random_atlas, Atlas, GlueMode};
use crate::pseudogroup::{full_domain, orbit_ball, Generator, GeneratorSystem};
use crate::recurrence::{bilipschitz_audit, build_nonrecurrent_example, recurrence_profile, seeds_toward_a, NonRecurrentExample, NonRecurrentParams};
use crate::scenario;

/// Time limits per criterion.
pub const LIMIT_NONRECURRENCE: Duration = Duration::from_secs(30);
pub const LIMIT_FOLNER: Duration = Duration::from_secs(10);
pub const LIMIT_CORRESPONDENCE: Duration = Duration::from_secs(60);
pub const LIMIT_GLUING: Duration = Duration::from_secs(30);

/// `ε` for the density check.
pub const DENSITY_EPS: (i64, i64) = (1, 100);
/// Frozen radius for the `√2 − 1` rotation at `DENSITY_EPS`.
pub const DENSITY_RADIUS: usize = 35;

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<(String, bool)>,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, checks: Vec::new(), detail: String::new(), elapsed: Duration::ZERO }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn clause(&self, label: &str) -> Option<bool> {
        self.checks.iter().find(|(l, _)| l == label).map(|(_, ok)| *ok)
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.as_str()).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2} {} ({:.2}s): {}", self.id, self.name, self.elapsed.as_secs_f64(), self.detail);
        if !failed.is_empty() {
            s.push_str(&format!(" | failed: {}", failed.join("; ")));
        }
        s
    }
}

fn timed(id: u32, name: &'static str, limit: Option<Duration>, body: impl FnOnce(&mut CriterionReport) -> Result<(), String>) -> CriterionReport {
    let mut rep = CriterionReport::new(id, name);
    let start = Instant::now();
    if let Err(e) = body(&mut rep) {
        rep.check(format!("error: {e}"), false);
    }
    rep.elapsed = start.elapsed();
    if let Some(l) = limit {
        rep.check(format!("runtime under {}s", l.as_secs()), rep.elapsed < l);
    }
    rep
}

/// Clauses that fail by construction: the example puts `x_k` at
/// `ν(x_k) = k − 1`, so the literal `ν(x_k) = k` cannot hold.
pub const KNOWN_FAILURES: &[(u32, &str)] = &[(1, "nu(x_k) = k")];

impl CriterionReport {
    /// Failed clauses not listed in `KNOWN_FAILURES`.
    pub fn unexpected_failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(l, ok)| !ok && !KNOWN_FAILURES.contains(&(self.id, l.as_str())))
            .map(|(l, _)| l.as_str())
            .collect()
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=10).map(|k| run(k).expect("criterion exists")).collect()
}

pub fn run(id: u32) -> Option<CriterionReport> {
    Some(match id {
        1 => nonrecurrence(),
        2 => folner_boundary(),
        3 => averaging_escape(),
        4 => invariance_defect_bound(),
        5 => correspondence_forward(),
        6 => bilipschitz_stability(),
        7 => density(),
        8 => metric_gluing(),
        9 => boundary_identities(),
        10 => engine_oracle(),
        _ => return None,
    })
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn q(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

fn standard() -> Result<NonRecurrentExample, String> {
    build_nonrecurrent_example(&NonRecurrentParams::standard()).map_err(err)
}

// The non-recurrent instance in the coordinate u = x/(5 − x), where
// g₁ is u ↦ 3u/2 and V = (1, 5) is u > 1/4.
fn to_u(x: &Rational) -> Rational {
    x / (q(5, 1) - x)
}

fn from_u(u: &Rational) -> Rational {
    u * q(5, 1) / (q(1, 1) + u)
}

fn g1_pow_oracle(x: &Rational, k: i32) -> Rational {
    from_u(&(to_u(x) * q(3, 2).pow(k)))
}

fn nu_oracle(x: &Rational) -> usize {
    let mut u = to_u(x);
    let mut n = 0;
    while u <= q(1, 4) {
        u *= q(3, 2);
        n += 1;
    }
    n
}

fn rational_of(s: &Scalar) -> Result<Rational, String> {
    s.as_rational().cloned().ok_or_else(|| format!("{s} is not rational"))
}

fn nonrecurrence() -> CriterionReport {
    timed(1, "non-recurrence: hitting distance vs nu", Some(LIMIT_NONRECURRENCE), |rep| {
        let ex = standard()?;
        let start = Scalar::frac(3, 2);
        let seeds = seeds_toward_a(&ex, &start, 12);
        let mut seeds_ok = true;
        for (k, s) in seeds.iter().enumerate() {
            seeds_ok &= rational_of(s)? == g1_pow_oracle(&q(3, 2), -(k as i32 + 1));
        }
        rep.check("seeds x_k = g1^-k(3/2)", seeds_ok);
        let window = DomainSet::from_interval(ex.v.clone());
        let prof = recurrence_profile(&ex.system, &window, &seeds, 40).map_err(err)?;
        let mut hits = Vec::new();
        let mut nus = Vec::new();
        let (mut ineq, mut eq_k, mut lib_nu) = (true, true, true);
        for (k, e) in prof.entries.iter().enumerate() {
            let nu = nu_oracle(&rational_of(&e.seed)?);
            let hit = e.hit.ok_or("seed never reaches V")?;
            ineq &= hit >= nu;
            eq_k &= nu == k + 1;
            lib_nu &= ex.nu(&e.seed) == Some(nu);
            hits.push(hit);
            nus.push(nu);
        }
        rep.check("library nu matches oracle", lib_nu);
        rep.check("hit >= nu", ineq);
        rep.check("nu(x_k) = k", eq_k);
        rep.detail = format!("k=1..12 hit={hits:?} nu={nus:?}");
        Ok(())
    })
}

fn nonrecurrent_segment(ex: &NonRecurrentExample, x0: &Scalar, n: usize) -> Result<Vec<Scalar>, String> {
    let gi = ex.member("g1^-1");
    crate::folner::segment_points(&ex.system, gi, x0, n).map_err(err)
}

/// Graph boundary of `{g₁⁻ᵐ(x₀) : m ≤ n}` computed in the u-coordinate,
/// where `g₂` fixes every point of `(0, 1]`.
fn segment_boundary_oracle(x0: &Rational, n: usize) -> BTreeSet<Rational> {
    let pts: Vec<Rational> = (0..=n as i32).map(|m| g1_pow_oracle(x0, -m)).collect();
    let set: BTreeSet<Rational> = pts.iter().cloned().collect();
    pts.iter()
        .filter(|p| {
            let up = g1_pow_oracle(p, 1);
            let down = g1_pow_oracle(p, -1);
            !set.contains(&up) || !set.contains(&down)
        })
        .cloned()
        .collect()
}

fn folner_boundary() -> CriterionReport {
    timed(2, "Folner segment boundary", Some(LIMIT_FOLNER), |rep| {
        let ex = standard()?;
        let x0 = Scalar::frac(9, 10);
        let x0r = q(9, 10);
        let mut all_ok = true;
        let mut ratio100 = None;
        for n in [1usize, 2, 5, 10, 50, 100] {
            let pts = nonrecurrent_segment(&ex, &x0, n)?;
            let g = OrbitGraph::build(&ex.system, &pts, 1).map_err(err)?;
            let s = g.ids(&pts).map_err(err)?;
            let b = graph_boundary(&g, &s).map_err(err)?;
            let got: BTreeSet<Rational> = b.iter().map(|&k| rational_of(g.point(k))).collect::<Result<_, _>>()?;
            let want = segment_boundary_oracle(&x0r, n);
            let inner = g1_pow_oracle(&x0r, -(n as i32));
            let shape = got.contains(&x0r) && got.iter().all(|p| *p == x0r || *p == inner);
            all_ok &= got == want && shape;
            if n == 100 {
                ratio100 = Some(BigRational::new(BigInt::from(b.len()), BigInt::from(s.len())));
            }
        }
        rep.check("boundary = {x0} plus at most the inner endpoint", all_ok);
        let r = ratio100.ok_or("no n = 100 row")?;
        rep.check("ratio at n=100 <= 2/101", r <= q(2, 101));
        rep.detail = format!("x0=9/10, ratio(100)={r}");
        Ok(())
    })
}

fn averaging_escape() -> CriterionReport {
    timed(3, "averaging measures escape", None, |rep| {
        let sc = scenario::bundled("translation").ok_or("missing scenario")?;
        let sys = &sc.system;
        let t = sys.index_of("t").ok_or("no generator t")?;
        let f = TestFn::tent(Scalar::zero(), Scalar::one(), Scalar::one());
        let seed = Scalar::frac(1, 2);
        // the oracle tent
        let tent = |x: &Rational| {
            let d = (x - q(1, 2)).abs();
            if d < q(1, 2) {
                q(1, 1) - d * q(2, 1)
            } else {
                Rational::zero()
            }
        };
        rep.check("f(seed) = 1", f.eval(&seed) == Scalar::one() && tent(&q(1, 2)) == q(1, 1));
        let mut zero = true;
        for n in 1..=40usize {
            let start = sys.evaluate_word(&vec![t; n], &seed).map_err(err)?;
            let pts = crate::folner::segment_points(sys, t, &start, n).map_err(err)?;
            let mu = averaging_measure(&pts, &f).map_err(err)?;
            let oracle: Rational = (n..=2 * n).map(|m| tent(&(q(1, 2) + q(m as i64, 1)))).sum();
            zero &= mu.is_zero() && oracle.is_zero();
        }
        rep.check("mu_n(f) = 0 for n = 1..40", zero);
        rep.detail = "S_n = {n+1/2, ..., 2n+1/2}, f = tent on (0,1)".into();
        Ok(())
    })
}

fn invariance_defect_bound() -> CriterionReport {
    timed(4, "invariance defect bound", None, |rep| {
        let ex = standard()?;
        let g1 = ex.member("g1");
        let x0 = Scalar::frac(9, 10);
        let x0r = q(9, 10);
        let f = TestFn::tent(Scalar::zero(), Scalar::one(), Scalar::one());
        let tent = |x: &Rational| {
            let d = (x - q(1, 2)).abs();
            if d < q(1, 2) {
                q(1, 1) - d * q(2, 1)
            } else {
                Rational::zero()
            }
        };
        let mut rows = Vec::new();
        let (mut bound_ok, mut oracle_ok) = (true, true);
        for n in [5usize, 10, 20] {
            let pts = nonrecurrent_segment(&ex, &x0, n)?;
            let g = OrbitGraph::build(&ex.system, &pts, 1).map_err(err)?;
            let s = g.ids(&pts).map_err(err)?;
            let d = invariance_defect(&g, &s, &ex.system, g1, &f).map_err(err)?;
            // telescoping: g₁ moves the segment one step toward x₀
            let top = tent(&g1_pow_oracle(&x0r, 1));
            let bottom = tent(&g1_pow_oracle(&x0r, -(n as i32)));
            let want = (top - bottom).abs() / q(n as i64 + 1, 1);
            let bound = q(4, n as i64 + 1);
            oracle_ok &= rational_of(&d.defect)? == want && rational_of(&d.bound)? == bound;
            bound_ok &= d.passed && d.defect <= d.bound;
            rows.push(format!("n={n}: {} <= {}", d.defect, d.bound));
        }
        rep.check("defect matches telescoping oracle", oracle_ok);
        rep.check("defect <= 2 sup|f| ratio", bound_ok);
        rep.detail = rows.join(", ");
        Ok(())
    })
}

fn sqrt2_rotation() -> Result<GeneratorSystem, String> {
    let sc = scenario::bundled("rotation_sqrt2").ok_or("missing scenario")?;
    Ok(sc.system)
}

fn correspondence_forward() -> CriterionReport {
    timed(5, "correspondence forward Lipschitz", Some(LIMIT_CORRESPONDENCE), |rep| {
        let sys = sqrt2_rotation()?;
        let bars = bar_system(&sys).map_err(err)?;
        let s2 = Scalar::sqrt(2).map_err(err)?;
        let v = Interval::open(Scalar::frac(1, 10), Scalar::frac(9, 10));
        let a = Interval::open(Scalar::frac(1, 5), Scalar::frac(4, 5));
        let pairs = [
            (Scalar::frac(1, 3), Scalar::frac(1, 2)),
            (Scalar::frac(1, 5), Scalar::frac(1, 4)),
            (Scalar::frac(2, 5), Scalar::frac(3, 5)),
            (Scalar::frac(1, 4), &s2 * &Scalar::frac(1, 4)),
            (Scalar::frac(7, 10), Scalar::frac(3, 5)),
        ];
        let (mut viol, mut checked, mut inj, mut equiv, mut equal) = (0usize, 0usize, true, true, true);
        for (x, y) in &pairs {
            let c = orbit_correspondence(&sys, x, y, 20, &v, 4).map_err(err)?;
            let shift = y - x;
            equiv &= c.pairs.iter().all(|p| p.phi_z == Space::Circle.reduce(&(&p.z + &shift)));
            let st = distortion_stats(&c, &sys, &bars, &a).map_err(err)?;
            viol += st.forward_violations.len();
            checked += st.pairs_checked;
            inj &= st.injective;
            equal &= st.reverse_c == Rational::one();
        }
        rep.check("zero forward violations", viol == 0);
        rep.check("injective", inj);
        rep.check("phi(z) = z + (y - x) mod 1", equiv);
        rep.check("distances preserved (C = 1)", equal);
        rep.detail = format!("5 pairs, R=20, {checked} node pairs, {viol} violations");
        Ok(())
    })
}

/// `min |a| + |b|` over `2a + 3b = n`.
fn two_three_length(n: i64) -> i64 {
    (-60i64..=60).filter(|b| (n - 3 * b) % 2 == 0).map(|b| ((n - 3 * b) / 2).abs() + b.abs()).min().expect("solvable")
}

/// Largest ratio between `|n|` and the `{±2, ±3}` length over both balls.
fn two_three_constant(r: i64) -> Rational {
    let mut best = Rational::one();
    let mut ns: BTreeSet<i64> = (-r..=r).collect();
    for a in -r..=r {
        for b in -r..=r {
            if a.abs() + b.abs() <= r {
                ns.insert(2 * a + 3 * b);
            }
        }
    }
    for n in ns.into_iter().filter(|&n| n != 0) {
        let (de, df) = (n.abs(), two_three_length(n));
        best = best.max(q(de.max(df), de.min(df)));
    }
    best
}

fn bilipschitz_stability() -> CriterionReport {
    timed(6, "bi-Lipschitz constant stability", None, |rep| {
        let alpha = Scalar::sqrt(2).map_err(err)? - Scalar::one();
        let r = PartialMap::rotation(&alpha);
        let r2 = r.compose(&r);
        let r3 = r2.compose(&r);
        let full = full_domain(Space::Circle);
        let e = GeneratorSystem::new(Space::Circle, full.clone(), vec![Generator::new("r", r)]).map_err(err)?;
        let f = GeneratorSystem::new(Space::Circle, full, vec![Generator::new("s", r2), Generator::new("t", r3)]).map_err(err)?;
        let seeds = [Scalar::zero(), Scalar::frac(1, 3), Scalar::frac(5, 7)];
        let c15 = bilipschitz_audit(&e, &f, &seeds, 15, 50).map_err(err)?.c;
        let c30 = bilipschitz_audit(&e, &f, &seeds, 30, 95).map_err(err)?.c;
        let oracle = two_three_constant(15);
        rep.check("C(15) equals oracle", c15 == oracle);
        rep.check("C(30) <= C(15)", c30 <= c15);
        rep.detail = format!("E={{r}}, F={{r^2, r^3}}: C(15)={c15}, C(30)={c30}, oracle={oracle}");
        Ok(())
    })
}

/// `{n(√2 − 1)}` for `|n| ≤ r` from a 60-digit rational approximation of `√2`.
fn density_radius_oracle(eps: &Rational, rmax: i64) -> Option<i64> {
    let scale = BigInt::from(10).pow(60);
    let root = (BigInt::from(2) * &scale * &scale).sqrt();
    let alpha = BigRational::new(root, scale) - q(1, 1);
    let two_eps = eps * q(2, 1);
    let mut pts: Vec<Rational> = vec![Rational::zero()];
    for r in 0..=rmax {
        if r > 0 {
            for n in [r, -r] {
                let v = &alpha * q(n, 1);
                pts.push(&v - v.floor());
            }
        }
        let mut s = pts.clone();
        s.sort();
        let wrap = &s[0] + q(1, 1) - s.last().expect("non-empty");
        let gap = s.windows(2).map(|w| &w[1] - &w[0]).fold(wrap, |a, b| a.max(b));
        if gap < two_eps {
            return Some(r);
        }
    }
    None
}

fn density() -> CriterionReport {
    timed(7, "orbit density", None, |rep| {
        let sys = sqrt2_rotation()?;
        let eps = Scalar::frac(DENSITY_EPS.0, DENSITY_EPS.1);
        let got = orbit_density(&sys, &Scalar::zero(), &Interval::unit(), &eps, 500).map_err(err)?;
        let want = density_radius_oracle(&q(DENSITY_EPS.0, DENSITY_EPS.1), 500).ok_or("oracle found no radius")?;
        rep.check("sqrt2 rotation radius matches oracle", got.radius as i64 == want);
        rep.check(format!("radius = {DENSITY_RADIUS}"), got.radius == DENSITY_RADIUS);
        let third = scenario::bundled("rotation_third").ok_or("missing scenario")?;
        let fails = matches!(orbit_density(&third.system, &Scalar::zero(), &Interval::unit(), &eps, 500), Err(EquicontError::NotDense { .. }));
        rep.check("rotation by 1/3 is not dense", fails);
        rep.detail = format!("eps=1/100: R={} (oracle {want}), max gap {}", got.radius, got.max_gap.approx(24));
        Ok(())
    })
}

/// Chain metric by enumerating every simple chain of admissible pairs.
fn chain_oracle(atlas: &Atlas, mode: GlueMode) -> Vec<Vec<Rational>> {
    let n = atlas.len();
    let ps = &atlas.patches;
    let max_diam = ps.iter().flat_map(|p| p.dist.iter().flatten()).max().cloned().unwrap_or_else(Rational::zero);
    let scale = if max_diam >= q(1, 1) { q(1, 1) / (max_diam * q(2, 1)) } else { q(1, 1) };
    let d_in = |p: usize, x: usize, y: usize| -> Option<Rational> {
        let i = ps[p].members.iter().position(|&m| m == x)?;
        let j = ps[p].members.iter().position(|&m| m == y)?;
        Some(ps[p].dist[i][j].clone() * &scale)
    };
    let mut cost: HashMap<(usize, usize), Rational> = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let mut witness = None;
            let mut ok = true;
            for (b, p) in ps.iter().enumerate() {
                let in_shrink = |z: usize| p.shrink.contains(&z);
                let in_patch = |z: usize| p.members.contains(&z);
                if (in_shrink(x) || in_shrink(y)) && !(in_patch(x) && in_patch(y)) {
                    ok = false;
                }
                if in_shrink(x) && in_shrink(y) {
                    witness = Some(b);
                }
            }
            if let (true, Some(w)) = (ok, witness) {
                let c = match mode {
                    GlueMode::Local => d_in(w, x, y).expect("witness"),
                    GlueMode::Quasilocal => (0..ps.len()).filter_map(|b| d_in(b, x, y)).max().expect("witness"),
                };
                cost.insert((x, y), c);
            }
        }
    }
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    fn walk(
        at: usize,
        acc: Rational,
        seen: &mut Vec<bool>,
        cost: &HashMap<(usize, usize), Rational>,
        row: &mut Vec<Option<Rational>>,
    ) {
        if row[at].as_ref().is_none_or(|b| acc < *b) {
            row[at] = Some(acc.clone());
        }
        for next in 0..seen.len() {
            if seen[next] {
                continue;
            }
            if let Some(c) = cost.get(&(at, next)) {
                seen[next] = true;
                walk(next, &acc + c, seen, cost, row);
                seen[next] = false;
            }
        }
    }
    for (x, row) in best.iter_mut().enumerate() {
        let mut seen = vec![false; n];
        seen[x] = true;
        walk(x, Rational::zero(), &mut seen, &cost, row);
    }
    best.into_iter().map(|r| r.into_iter().map(|v| v.map_or(q(1, 1), |v| v.min(q(1, 1)))).collect()).collect()
}

fn metric_gluing() -> CriterionReport {
    timed(8, "metric gluing", Some(LIMIT_GLUING), |rep| {
        let (mut eq, mut axioms, mut bounds) = (true, true, true);
        let mut chained_pairs = 0usize;
        for seed in 0..100u64 {
            for mode in [GlueMode::Local, GlueMode::Quasilocal] {
                let atlas = random_atlas(seed, 8, 3, mode);
                let g = glue_metric(&atlas, mode).map_err(err)?;
                eq &= g.table == chain_oracle(&atlas, mode);
                axioms &= metric_violations(&g.table).is_empty();
                bounds &= lower_bound_check(&atlas, &g).violations.is_empty();
                chained_pairs += g.chained.iter().flatten().filter(|c| **c).count();
            }
        }
        rep.check("D equals chain enumeration", eq);
        rep.check("metric axioms", axioms);
        rep.check("lower bound, zero violations", bounds);
        rep.detail = format!("100 atlases x 2 modes, 8 points, {chained_pairs} chained ordered pairs");
        Ok(())
    })
}

/// BFS distances inside the finite graph, by the oracle's own queue.
fn bfs(g: &OrbitGraph, sources: &NodeSet) -> Vec<Option<usize>> {
    let mut d = vec![None; g.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        d[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbours(u) {
            if d[v].is_none() {
                d[v] = Some(d[u].expect("visited") + 1);
                queue.push_back(v);
            }
        }
    }
    d
}

fn boundary_oracle(g: &OrbitGraph, s: &NodeSet, r: usize) -> NodeSet {
    let comp: NodeSet = (0..g.len()).filter(|k| !s.contains(k)).collect();
    let (ds, dc) = (bfs(g, s), bfs(g, &comp));
    (0..g.len())
        .filter(|k| {
            let other = if s.contains(k) { dc[*k] } else { ds[*k] };
            other.is_some_and(|d| d < r)
        })
        .collect()
}

fn boundary_identities() -> CriterionReport {
    timed(9, "boundary identities", None, |rep| {
        let ex = standard()?;
        let alpha = Scalar::sqrt(2).map_err(err)? - Scalar::one();
        let r = PartialMap::rotation(&alpha);
        let two = GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r.clone()), Generator::new("s", r.compose(&r))])
            .map_err(err)?;
        let systems: Vec<(GeneratorSystem, Scalar, usize)> = vec![
            (sqrt2_rotation()?, Scalar::zero(), 14),
            (two, Scalar::zero(), 10),
            (ex.system.clone(), Scalar::frac(3, 2), 7),
        ];
        let graphs: Vec<(OrbitGraph, usize)> = systems
            .iter()
            .map(|(sys, x, rad)| Ok((OrbitGraph::build(sys, std::slice::from_ref(x), *rad).map_err(err)?, sys.len())))
            .collect::<Result<_, String>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut id_ok, mut rb_ok, mut acs_ok, mut oracle_ok) = (true, true, true, true);
        for trial in 0..100 {
            let (g, k) = &graphs[trial % graphs.len()];
            let rr = rng.gen_range(1..=3usize);
            let c = rng.gen_range(1..=3usize);
            let inner: Vec<usize> = (0..g.len()).filter(|&v| g.depth(v) + rr.max(2) <= g.radius()).collect();
            let mut s: NodeSet = inner.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if s.is_empty() {
                s.insert(inner[rng.gen_range(0..inner.len())]);
            }
            let mut a: NodeSet = (0..g.len()).filter(|_| rng.gen_bool(0.3)).collect();
            let mut order: Vec<usize> = (0..g.len()).collect();
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
            for v in order {
                let d = bfs(g, &a);
                if d[v].is_none_or(|dv| dv >= c) {
                    a.insert(v);
                }
            }
            let gb = graph_boundary(g, &s).map_err(err)?;
            let b2 = r_boundary(g, &s, 2).map_err(err)?;
            let s_b2: NodeSet = s.intersection(&b2).copied().collect();
            id_ok &= gb == s_b2;
            let br = r_boundary(g, &s, rr).map_err(err)?;
            oracle_ok &= br == boundary_oracle(g, &s, rr) && b2 == boundary_oracle(g, &s, 2);
            rb_ok &= br.len() <= k.pow(rr as u32) * gb.len();
            acs_ok &= a_cap_s_check(g, &s, &a, c).map_err(err)?.holds;
        }
        rep.check("dS = S n d_2 S", id_ok);
        rep.check("#d_r S <= K^r #dS", rb_ok);
        rep.check("A cap S inequality", acs_ok);
        rep.check("boundaries match oracle BFS", oracle_ok);
        rep.detail = format!("100 random (S, A, C) on {} orbit graphs", graphs.len());
        Ok(())
    })
}

/// Shortest word length to every point reachable by words of length `≤ len`,
/// by trying every word.
fn brute_force_lengths(sys: &GeneratorSystem, x: &Scalar, len: usize) -> BTreeMap<Scalar, usize> {
    let mut out = BTreeMap::new();
    let mut layer: Vec<Scalar> = vec![sys.space().reduce(x)];
    out.insert(layer[0].clone(), 0);
    for l in 1..=len {
        let mut next = Vec::new();
        for p in &layer {
            for m in 0..sys.len() {
                if let Some(y) = sys.members()[m].map.try_apply(p) {
                    out.entry(y.clone()).or_insert(l);
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    out
}

fn engine_oracle() -> CriterionReport {
    timed(10, "BFS word metric vs brute force", None, |rep| {
        let ex = standard()?;
        let trans = scenario::bundled("translation").ok_or("missing scenario")?;
        let cases: Vec<(&str, GeneratorSystem, Vec<Scalar>)> = vec![
            ("rotation sqrt2", sqrt2_rotation()?, vec![Scalar::frac(1, 3)]),
            ("rotation third", scenario::bundled("rotation_third").ok_or("missing scenario")?.system, vec![Scalar::zero()]),
            ("nonrecurrent", ex.system.clone(), vec![Scalar::frac(3, 2), Scalar::frac(9, 10)]),
            ("translation", trans.system.clone(), vec![Scalar::frac(11, 2)]),
        ];
        let mut rows = Vec::new();
        for (name, sys, seeds) in &cases {
            let mut ok = true;
            let mut nodes = 0;
            for x in seeds {
                let ball = orbit_ball(sys, x, 6).map_err(err)?;
                let bfs: BTreeMap<Scalar, usize> = ball.nodes().iter().map(|n| (n.point.clone(), n.dist)).collect();
                ok &= bfs == brute_force_lengths(sys, x, 6);
                nodes += bfs.len();
            }
            rep.check(format!("{name}: exact match"), ok);
            rows.push(format!("{name} {nodes} nodes"));
        }
        rep.detail = rows.join(", ");
        Ok(())
    })
}
