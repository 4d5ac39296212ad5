//! Recurrence audits and the non-recurrent two-bump example.
//!
//! The example acts on the line. `g̃₁` is the hyperbolic Möbius map with
//! fixed points `a`, `b` (multiplier `λ` in the coordinate
//! `(x − a)/(b − x)`), extended by the identity. `φ: ℝ → (a, b)` is the
//! identity on `[a″, b″]` with Möbius end pieces, and `g̃₂ = φ∘g̃₁∘φ⁻¹` on
//! `(a, b)`. The restrictions of `g̃₁, g̃₂` to `U = (a, b)` generate a
//! system whose hitting distance to `V = (a′, b)` is unbounded near `a`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::exactnum::{Rational, Scalar};
use crate::localmaps::{DomainSet, Interval, MapError, MoebiusMap, PartialMap, Space};
use crate::pseudogroup::{orbit_ball, word_metric, EngineError, Generator, GeneratorSystem};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("orbit mismatch: {x} and {y} are connected at distance {d} in one system but not within {budget} in the other")]
    OrbitMismatch { x: Scalar, y: Scalar, d: usize, budget: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Debug)]
pub struct HitEntry {
    pub seed: Scalar,
    pub hit: Option<usize>,
    /// First window point reached, with the BFS word length `hit`.
    pub witness: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct RecurrenceProfile {
    pub window: DomainSet,
    pub rmax: usize,
    pub entries: Vec<HitEntry>,
}

impl RecurrenceProfile {
    /// Largest hitting distance, or `None` if some seed never hits.
    pub fn max_hit(&self) -> Option<usize> {
        self.entries.iter().map(|e| e.hit).try_fold(0, |acc, h| h.map(|h| acc.max(h)))
    }
}

/// Hitting distance `d_E(x, U ∩ orbit(x))` for each seed, up to `rmax`.
pub fn recurrence_profile(
    sys: &GeneratorSystem,
    window: &DomainSet,
    seeds: &[Scalar],
    rmax: usize,
) -> Result<RecurrenceProfile, RecurrenceError> {
    let entries = seeds
        .par_iter()
        .map(|x| hit_distance(sys, window, x, rmax))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RecurrenceProfile { window: window.clone(), rmax, entries })
}

fn hit_distance(sys: &GeneratorSystem, window: &DomainSet, x: &Scalar, rmax: usize) -> Result<HitEntry, EngineError> {
    let x = sys.space().reduce(x);
    if window.contains(&x) {
        return Ok(HitEntry { seed: x.clone(), hit: Some(0), witness: Some(x) });
    }
    let mut seen = HashSet::from([x.clone()]);
    let mut frontier = vec![x.clone()];
    for d in 1..=rmax {
        let mut next = Vec::new();
        for p in &frontier {
            for (_, q) in sys.neighbours(p) {
                if !seen.insert(q.clone()) {
                    continue;
                }
                if window.contains(&q) {
                    return Ok(HitEntry { seed: x, hit: Some(d), witness: Some(q) });
                }
                if seen.len() > sys.node_cap() {
                    return Err(EngineError::NodeCap { cap: sys.node_cap(), radius: rmax });
                }
                next.push(q);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(HitEntry { seed: x, hit: None, witness: None })
}

type Witness = (Scalar, Scalar, usize, usize);

#[derive(Clone, Debug)]
pub struct BiLipschitzReport {
    /// `max(d_E/d_F, d_F/d_E)` over the sampled pairs (1 when none).
    pub c: Rational,
    pub witness: Option<(Scalar, Scalar, usize, usize)>,
    /// Per seed, the largest ratio seen from that seed.
    pub per_seed: Vec<(Scalar, Rational)>,
    pub pairs_checked: usize,
}

/// Empirical comparison constant between two word metrics.
///
/// Pairs are `(x, z)` with `z` in the radius-`radius` ball of either system
/// around a seed `x`; the other system's distance is searched up to `budget`.
pub fn bilipschitz_audit(
    sys_e: &GeneratorSystem,
    sys_f: &GeneratorSystem,
    seeds: &[Scalar],
    radius: usize,
    budget: usize,
) -> Result<BiLipschitzReport, RecurrenceError> {
    let per: Vec<(Scalar, Rational, Option<Witness>, usize)> = seeds
        .par_iter()
        .map(|x| {
            let mut best = Rational::one();
            let mut wit = None;
            let mut count = 0;
            for (a, b, flip) in [(sys_e, sys_f, false), (sys_f, sys_e, true)] {
                let ball = orbit_ball(a, x, radius)?;
                for n in ball.nodes().iter().skip(1) {
                    let d_other = word_metric(b, &ball.base, &n.point, budget)?.ok_or_else(|| {
                        RecurrenceError::OrbitMismatch {
                            x: ball.base.clone(),
                            y: n.point.clone(),
                            d: n.dist,
                            budget,
                        }
                    })?;
                    count += 1;
                    let (de, df) = if flip { (d_other, n.dist) } else { (n.dist, d_other) };
                    let r = ratio(de, df);
                    if r > best {
                        best = r;
                        wit = Some((ball.base.clone(), n.point.clone(), de, df));
                    }
                }
            }
            Ok((x.clone(), best, wit, count))
        })
        .collect::<Result<_, RecurrenceError>>()?;
    let mut report = BiLipschitzReport { c: Rational::one(), witness: None, per_seed: Vec::new(), pairs_checked: 0 };
    for (x, r, w, n) in per {
        report.pairs_checked += n;
        if r > report.c {
            report.c = r.clone();
            report.witness = w;
        }
        report.per_seed.push((x, r));
    }
    Ok(report)
}

fn ratio(a: usize, b: usize) -> Rational {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    BigRational::new(BigInt::from(hi), BigInt::from(lo.max(1)))
}

/// `a < a′ < a″ < b″ < b′ < b` and the multiplier `λ > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonRecurrentParams {
    pub a: Scalar,
    pub a1: Scalar,
    pub a2: Scalar,
    pub b2: Scalar,
    pub b1: Scalar,
    pub b: Scalar,
    pub lambda: Rational,
}

impl NonRecurrentParams {
    /// The instance `0, 1, 2, 3, 4, 5` with `λ = 3/2`.
    pub fn standard() -> Self {
        NonRecurrentParams {
            a: Scalar::from_int(0),
            a1: Scalar::from_int(1),
            a2: Scalar::from_int(2),
            b2: Scalar::from_int(3),
            b1: Scalar::from_int(4),
            b: Scalar::from_int(5),
            lambda: BigRational::new(BigInt::from(3), BigInt::from(2)),
        }
    }
}

/// The assembled example.
#[derive(Clone, Debug)]
pub struct NonRecurrentExample {
    pub params: NonRecurrentParams,
    pub phi: PartialMap,
    pub g1_ext: PartialMap,
    pub g2_ext: PartialMap,
    /// `E = {g₁, g₂, g₁⁻¹, g₂⁻¹}` on `U`, with bars `g̃₁, g̃₂`.
    pub system: GeneratorSystem,
    pub u: Interval,
    pub v: Interval,
    pub notes: Vec<String>,
}

fn inval(msg: impl Into<String>) -> RecurrenceError {
    RecurrenceError::InvalidParams(msg.into())
}

/// Hyperbolic map with fixed points `a < b` multiplying `(x − a)/(b − x)` by `λ`.
fn hyperbolic(a: &Scalar, b: &Scalar, lambda: &Scalar) -> Result<MoebiusMap, MapError> {
    let one = Scalar::one();
    MoebiusMap::new(
        b * lambda - a,
        a * b * &(&one - lambda),
        lambda - &one,
        b - &(lambda * a),
    )
}

/// Left end piece of `φ`: fixes `a″` with `φ(−∞) = a`, `φ(a) = a′`.
fn phi_left(p: &NonRecurrentParams) -> Result<(MoebiusMap, Scalar), RecurrenceError> {
    let big_d = &p.a2 - &p.a;
    let small_d = &p.a2 - &p.a1;
    let c = &big_d * &(&big_d - &small_d) / small_d.clone();
    let k = &small_d / &(&big_d - &small_d);
    let m = MoebiusMap::new(
        &(&k * &c) - &p.a2,
        &p.a2 * &(&(&c + &p.a2) - &(&k * &c)),
        -Scalar::one(),
        &c + &p.a2,
    )?;
    Ok((m, k))
}

/// Right end piece, the mirror image: `φ(+∞) = b`, `φ(b) = b′`.
fn phi_right(p: &NonRecurrentParams) -> Result<(MoebiusMap, Scalar), RecurrenceError> {
    let big_e = &p.b - &p.b2;
    let small_e = &p.b1 - &p.b2;
    let c = &big_e * &(&big_e - &small_e) / small_e.clone();
    let k = &small_e / &(&big_e - &small_e);
    let m = MoebiusMap::new(
        &p.b2 + &(&k * &c),
        &p.b2 * &(&(&c - &p.b2) - &(&k * &c)),
        Scalar::one(),
        &c - &p.b2,
    )?;
    Ok((m, k))
}

/// Builds `φ`, `g̃₁`, `g̃₂` and the system `E`, checking every defining
/// property exactly.
pub fn build_nonrecurrent_example(p: &NonRecurrentParams) -> Result<NonRecurrentExample, RecurrenceError> {
    let chain = [&p.a, &p.a1, &p.a2, &p.b2, &p.b1, &p.b];
    if chain.windows(2).any(|w| w[0] >= w[1]) {
        return Err(inval("need a < a' < a'' < b'' < b' < b"));
    }
    if p.lambda <= Rational::one() {
        return Err(inval("the multiplier must exceed 1 (g1(x) > x on (a,b))"));
    }
    let lambda = Scalar::rational(p.lambda.clone());
    let one = Scalar::one();
    let mut notes = Vec::new();

    let h = hyperbolic(&p.a, &p.b, &lambda)?;
    let g1_ext = PartialMap::new(
        Space::Line,
        vec![
            (Interval::below(p.a.clone(), false), MoebiusMap::identity()),
            (Interval::open(p.a.clone(), p.b.clone()), h.clone()),
            (Interval::above(p.b.clone(), false), MoebiusMap::identity()),
        ],
    )?;
    let g1_a2 = g1_ext.apply(&p.a2)?;
    if g1_a2 >= p.b2 {
        return Err(inval(format!("g1(a'') = {g1_a2} is not below b'' = {}", p.b2)));
    }
    notes.push(format!("g1(a'') = {g1_a2} < b'' = {}", p.b2));

    let (left, k) = phi_left(p)?;
    let (right, k2) = phi_right(p)?;
    if k > one {
        return Err(inval(format!("phi(x) > x on (-inf, a'') fails: left slope {k} exceeds 1")));
    }
    if k2 > one {
        return Err(inval(format!("phi(x) < x on (b'', inf) fails: right slope {k2} exceeds 1")));
    }
    let phi = PartialMap::new(
        Space::Line,
        vec![
            (Interval::below(p.a2.clone(), true), left),
            (Interval::closed(p.a2.clone(), p.b2.clone()), MoebiusMap::identity()),
            (Interval::above(p.b2.clone(), true), right),
        ],
    )?;
    let u = Interval::open(p.a.clone(), p.b.clone());
    let v = Interval::open(p.a1.clone(), p.b.clone());
    if phi.image() != DomainSet::from_interval(u.clone()) {
        return Err(inval(format!("phi has image {}, not (a,b)", phi.image())));
    }
    if phi.apply(&p.a)? != p.a1 || phi.apply(&p.b)? != p.b1 {
        return Err(inval("phi(a) = a' and phi(b) = b' fail"));
    }

    let conj = phi.compose(&g1_ext).compose(&phi.invert());
    let outside = DomainSet::from_intervals(vec![Interval::below(p.a.clone(), false), Interval::above(p.b.clone(), false)]);
    let g2_ext = conj.combine(&PartialMap::identity(Space::Line, &outside))?;
    let fixed = DomainSet::from_intervals(vec![Interval::below(p.a1.clone(), false), Interval::above(p.b1.clone(), false)]);
    for iv in fixed.intervals() {
        if !g2_ext.is_identity_on(iv)? {
            return Err(inval(format!("g2 is not the identity on {iv}")));
        }
    }

    let ud = DomainSet::from_interval(u.clone());
    let g1 = g1_ext.restrict(&ud);
    let g2 = g2_ext.restrict(&ud);
    let system = GeneratorSystem::new(
        Space::Line,
        ud,
        vec![
            Generator::new("g1", g1).with_bar(g1_ext.clone()),
            Generator::new("g2", g2).with_bar(g2_ext.clone()),
        ],
    )?;
    Ok(NonRecurrentExample { params: p.clone(), phi, g1_ext, g2_ext, system, u, v, notes })
}

impl NonRecurrentExample {
    /// `ν(x) = min{n ≥ 0 : g₁ⁿ(x) ∈ V}`, for `x ∈ U`.
    pub fn nu(&self, x: &Scalar) -> Option<usize> {
        if !self.u.contains(x) {
            return None;
        }
        let mut y = x.clone();
        let mut n = 0;
        while !self.v.contains(&y) {
            y = self.g1_ext.apply(&y).ok()?;
            n += 1;
        }
        Some(n)
    }

    /// `g₁ᵏ(x)` for any integer `k`.
    pub fn g1_power(&self, k: i64, x: &Scalar) -> Scalar {
        let f = if k >= 0 { self.g1_ext.clone() } else { self.g1_ext.invert() };
        let mut y = x.clone();
        for _ in 0..k.unsigned_abs() {
            y = f.apply(&y).expect("g1 is a homeomorphism of the line");
        }
        y
    }

    /// `U_n = g₁ⁿ(a″, b″)`.
    pub fn u_n(&self, n: i64) -> Interval {
        Interval::open(self.g1_power(n, &self.params.a2), self.g1_power(n, &self.params.b2))
    }

    /// `E` enlarged by `f = φ|_U`, which sends all of `U` into `V` in one step.
    pub fn recurrent_system(&self) -> Result<GeneratorSystem, RecurrenceError> {
        let ud = DomainSet::from_interval(self.u.clone());
        let f = self.phi.restrict(&ud);
        let m = self.system.members();
        let gens = vec![
            Generator::new("g1", m[0].map.clone()).with_bar(self.g1_ext.clone()),
            Generator::new("g2", m[1].map.clone()).with_bar(self.g2_ext.clone()),
            Generator::new("f", f).with_bar(self.phi.clone()),
        ];
        Ok(GeneratorSystem::new(Space::Line, ud, gens)?)
    }

    /// Members of the system by name, for building words.
    pub fn member(&self, name: &str) -> usize {
        self.system.index_of(name).expect("member exists")
    }
}

/// Hitting distances grouped by `ν`, for growth plots.
pub fn growth_by_nu(example: &NonRecurrentExample, profile: &RecurrenceProfile) -> Vec<(usize, Option<usize>)> {
    let mut by: HashMap<usize, Option<usize>> = HashMap::new();
    for e in &profile.entries {
        if let Some(n) = example.nu(&e.seed) {
            let slot = by.entry(n).or_insert(e.hit);
            *slot = match (*slot, e.hit) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
        }
    }
    let mut v: Vec<_> = by.into_iter().collect();
    v.sort();
    v
}

/// Seeds `g₁⁻ᵏ(x)` for `k = 1..=n`, marching toward `a`.
pub fn seeds_toward_a(example: &NonRecurrentExample, x: &Scalar, n: usize) -> Vec<Scalar> {
    let inv = example.g1_ext.invert();
    let mut out = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        y = inv.apply(&y).expect("g1 is a homeomorphism of the line");
        out.push(y.clone());
    }
    out
}

/// Geometric seeds `c + (x − c)·qᵏ` for `k = 0..n`.
pub fn geometric_seeds(toward: &Scalar, start: &Scalar, ratio: &Rational, n: usize) -> Vec<Scalar> {
    let q = Scalar::rational(ratio.clone());
    let mut out = Vec::with_capacity(n);
    let mut off = start - toward;
    for _ in 0..n {
        out.push(toward + &off);
        off = &off * &q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    /// ν through the coordinate `u = (x − a)/(b − x)`, where `g₁` is `u ↦ λu`.
    fn nu_oracle(x: &Rational) -> usize {
        let u = x / (rat(5, 1) - x);
        let ua1 = rat(1, 4);
        let mut n = 0;
        let mut u = u;
        while u <= ua1 {
            u *= rat(3, 2);
            n += 1;
        }
        n
    }

    fn example() -> NonRecurrentExample {
        build_nonrecurrent_example(&NonRecurrentParams::standard()).unwrap()
    }

    #[test]
    fn closed_forms_on_instance() {
        let ex = example();
        let x = Scalar::frac(7, 3);
        // g1(x) = 15x/(x+10)
        assert_eq!(ex.g1_ext.apply(&x).unwrap(), Scalar::frac(105, 37));
        assert_eq!(ex.g1_ext.apply(&Scalar::from_int(2)).unwrap(), Scalar::frac(5, 2));
        // φ(x) = 4/(4 − x) on the left, (5x − 9)/(x − 1) on the right
        assert_eq!(ex.phi.apply(&-Scalar::from_int(4)).unwrap(), Scalar::frac(1, 2));
        assert_eq!(ex.phi.apply(&Scalar::from_int(7)).unwrap(), Scalar::frac(13, 3));
        assert_eq!(ex.phi.apply(&Scalar::frac(5, 2)).unwrap(), Scalar::frac(5, 2));
        assert_eq!(ex.system.len(), 4);
        assert!(ex.system.has_bars());
    }

    #[test]
    fn g2_matches_conjugate_at_samples() {
        let ex = example();
        let g2 = &ex.system.members()[1].map;
        // oracle: φ(g1(φ⁻¹(x))) with the closed forms written out by hand
        let phi_inv = |y: &Rational| -> Rational {
            if y < &rat(2, 1) {
                rat(4, 1) - rat(4, 1) / y
            } else if y <= &rat(3, 1) {
                y.clone()
            } else {
                (y - rat(9, 1)) / (y - rat(5, 1))
            }
        };
        let phi = |x: &Rational| -> Rational {
            if x < &rat(2, 1) {
                rat(4, 1) / (rat(4, 1) - x)
            } else if x <= &rat(3, 1) {
                x.clone()
            } else {
                (rat(5, 1) * x - rat(9, 1)) / (x - rat(1, 1))
            }
        };
        let g1 = |x: &Rational| -> Rational {
            if x > &rat(0, 1) && x < &rat(5, 1) {
                rat(15, 1) * x / (x + rat(10, 1))
            } else {
                x.clone()
            }
        };
        for k in 1..=20 {
            let x = rat(k, 4) - rat(1, 8);
            let expect = phi(&g1(&phi_inv(&x)));
            assert_eq!(g2.apply(&Scalar::rational(x.clone())).unwrap(), Scalar::rational(expect), "x = {x}");
        }
    }

    #[test]
    fn g2_identity_pieces() {
        let ex = example();
        let g2 = &ex.system.members()[1].map;
        assert!(g2.is_identity_on(&Interval::open(Scalar::from_int(4), Scalar::from_int(5))).unwrap());
        assert!(g2.is_identity_on(&Interval::open(Scalar::zero(), Scalar::one())).unwrap());
        assert!(!g2.is_identity_on(&Interval::open(Scalar::one(), Scalar::from_int(2))).unwrap());
    }

    #[test]
    fn phi_is_word_on_un() {
        let ex = example();
        let g1 = ex.member("g1");
        let g2 = ex.member("g2");
        let g1i = ex.system.inverse(g1);
        for n in 1..=3usize {
            let un = ex.u_n(n as i64);
            let x = un.midpoint().unwrap();
            let mut w = vec![g1i; n];
            w.extend(std::iter::repeat_n(g2, n));
            assert_eq!(ex.system.evaluate_word(&w, &x).unwrap(), ex.phi.apply(&x).unwrap());
            let word_map = ex.system.word_map(&w);
            assert!(word_map.germ_equal(&ex.phi, &x).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn nu_properties() {
        let ex = example();
        let mut prev = usize::MAX;
        for k in 1..60 {
            let x = rat(k, 12);
            let n = ex.nu(&Scalar::rational(x.clone())).unwrap();
            assert_eq!(n, nu_oracle(&x));
            assert_eq!(n == 0, x > rat(1, 1));
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn nu_of_backward_orbit() {
        // oracle values, not the naive k: g1⁻¹(3/2) = 10/9 already lies in V
        let ex = example();
        let seeds = seeds_toward_a(&ex, &Scalar::frac(3, 2), 10);
        assert_eq!(seeds[0], Scalar::frac(10, 9));
        for (k, s) in seeds.iter().enumerate() {
            let oracle = nu_oracle(s.as_rational().unwrap());
            assert_eq!(ex.nu(s).unwrap(), oracle);
            assert_eq!(oracle, k);
        }
    }

    #[test]
    fn hitting_distance_dominates_nu() {
        let ex = example();
        let v = DomainSet::from_interval(ex.v.clone());
        let seeds = seeds_toward_a(&ex, &Scalar::frac(3, 2), 8);
        let prof = recurrence_profile(&ex.system, &v, &seeds, 20).unwrap();
        for e in &prof.entries {
            let n = ex.nu(&e.seed).unwrap();
            assert!(e.hit.unwrap() >= n);
        }
        let growth = growth_by_nu(&ex, &prof);
        assert_eq!(growth.len(), 8);
    }

    #[test]
    fn translation_profile() {
        // x ↦ x + 1 on (0, 10)
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::open(Scalar::zero(), Scalar::from_int(10))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap();
        let w = DomainSet::from_interval(Interval::open(Scalar::zero(), Scalar::one()));
        let prof = recurrence_profile(&sys, &w, &[Scalar::frac(11, 2), Scalar::frac(1, 2)], 10).unwrap();
        assert_eq!(prof.entries[0].hit, Some(5));
        assert_eq!(prof.entries[1].hit, Some(0));
        let short = recurrence_profile(&sys, &w, &[Scalar::frac(11, 2)], 4).unwrap();
        assert_eq!(short.entries[0].hit, None);
        assert_eq!(short.max_hit(), None);
    }

    #[test]
    fn recurrent_enlargement_hits_in_one_step() {
        let ex = example();
        let f = ex.recurrent_system().unwrap();
        let v = DomainSet::from_interval(ex.v.clone());
        let seeds = seeds_toward_a(&ex, &Scalar::frac(3, 2), 10);
        let prof = recurrence_profile(&f, &v, &seeds, 3).unwrap();
        assert!(prof.entries.iter().all(|e| e.hit.unwrap() <= 1));
    }

    #[test]
    fn audit_identity_and_enlargement() {
        let r = PartialMap::rotation(&(Scalar::sqrt(2).unwrap() - Scalar::one()));
        let w = crate::pseudogroup::full_domain(Space::Circle);
        let e = GeneratorSystem::new(Space::Circle, w.clone(), vec![Generator::new("r", r.clone())]).unwrap();
        let seeds = [Scalar::zero(), Scalar::frac(1, 3)];
        let rep = bilipschitz_audit(&e, &e, &seeds, 5, 5).unwrap();
        assert_eq!(rep.c, Rational::one());
        let e2 = GeneratorSystem::new(
            Space::Circle,
            w,
            vec![Generator::new("r", r.clone()), Generator::new("rr", r.compose(&r))],
        )
        .unwrap();
        let rep = bilipschitz_audit(&e, &e2, &seeds, 4, 8).unwrap();
        assert!(rep.c >= Rational::one());
        assert_eq!(rep.c, rat(2, 1));
    }

    #[test]
    fn invalid_params_are_named() {
        let mut p = NonRecurrentParams::standard();
        p.lambda = rat(4, 1);
        let err = build_nonrecurrent_example(&p).unwrap_err();
        assert!(err.to_string().contains("a''"), "{err}");
        let mut p = NonRecurrentParams::standard();
        p.a1 = Scalar::frac(1, 4);
        assert!(build_nonrecurrent_example(&p).unwrap_err().to_string().contains("slope"));
        let mut p = NonRecurrentParams::standard();
        p.a1 = Scalar::frac(3, 2);
        assert!(build_nonrecurrent_example(&p).is_ok());
    }
}
