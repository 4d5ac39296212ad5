//! Equicontinuity audits on sampled point pairs: expansion moduli over
//! composites of bounded length, bar-extension of words, the A/B
//! propagation property, and orbit density radii.

use rayon::prelude::*;

use crate::exactnum::Scalar;
use crate::localmaps::{DomainSet, Interval, MapError, MoebiusMap, PartialMap, Space};
use crate::pseudogroup::{closure_within, full_domain, orbit_ball, EngineError, Generator, GeneratorSystem, Word};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EquicontError {
    #[error("extension of `{word}` does not contain the window (failing prefix of length {prefix})")]
    ExtensionUndefined { word: String, prefix: usize },
    #[error("{0} is not in the window")]
    NotInWindow(Scalar),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not {eps}-dense within radius {rmax} (largest gap {gap})")]
    NotDense { eps: Scalar, rmax: usize, gap: Scalar },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Calls `visit(word, f(x), f(y))` for every freely reduced non-empty word
/// of length `≤ max_len` defined at both points. Errors once more than the
/// node cap of words has been visited.
fn for_each_common_word<F>(sys: &GeneratorSystem, x: &Scalar, y: &Scalar, max_len: usize, mut visit: F) -> Result<(), EngineError>
where
    F: FnMut(&[usize], &Scalar, &Scalar),
{
    let cap = sys.node_cap();
    let mut count = 0usize;
    let mut stack: Vec<(Word, Scalar, Scalar)> = vec![(Vec::new(), sys.space().reduce(x), sys.space().reduce(y))];
    while let Some((w, fx, fy)) = stack.pop() {
        if !w.is_empty() {
            count += 1;
            if count > cap {
                return Err(EngineError::NodeCap { cap, radius: w.len() });
            }
            visit(&w, &fx, &fy);
        }
        if w.len() == max_len {
            continue;
        }
        for m in (0..sys.len()).rev() {
            if w.last().is_some_and(|&l| sys.inverse(l) == m) {
                continue;
            }
            let (Some(gx), Some(gy)) = (sys.step(m, &fx), sys.step(m, &fy)) else { continue };
            let mut w2 = w.clone();
            w2.push(m);
            stack.push((w2, gx, gy));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusRow {
    pub eps: Scalar,
    /// Candidate `δ(ε)`: the smallest source separation among instances
    /// with image separation `≥ ε`. `None` when no instance reaches `ε`.
    pub delta: Option<Scalar>,
    /// Candidate `δ(ε)` using only words of length `≤ ℓ`, for `ℓ = 1..=L`.
    pub delta_by_len: Vec<Option<Scalar>>,
    pub within_eps: bool,
    /// The candidate strictly decreased as the length budget grew.
    pub shrinking: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusTable {
    pub max_len: usize,
    pub instances: usize,
    pub rows: Vec<ModulusRow>,
}

impl ModulusTable {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| match (&w[0].delta, &w[1].delta) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        })
    }
}

fn min_opt(a: &mut Option<Scalar>, v: &Scalar) {
    if a.as_ref().is_none_or(|c| v < c) {
        *a = Some(v.clone());
    }
}

/// Estimates `δ(ε)` over all composites of length `1..=max_len` defined at
/// both points of each sample pair. `eps` should be increasing.
pub fn modulus_estimate(
    sys: &GeneratorSystem,
    max_len: usize,
    eps: &[Scalar],
    pairs: &[(Scalar, Scalar)],
) -> Result<ModulusTable, EquicontError> {
    if max_len == 0 {
        return Err(EquicontError::Precondition("word length budget must be at least 1".into()));
    }
    let space = sys.space();
    // per pair: (instances, [eps][len] minimum source separation)
    let parts = pairs
        .par_iter()
        .map(|(x, y)| {
            let d0 = space.distance(x, y);
            let mut best: Vec<Vec<Option<Scalar>>> = vec![vec![None; max_len]; eps.len()];
            let mut n = 0usize;
            for_each_common_word(sys, x, y, max_len, |w, fx, fy| {
                n += 1;
                let d1 = space.distance(fx, fy);
                for (k, e) in eps.iter().enumerate() {
                    if d1 >= *e {
                        min_opt(&mut best[k][w.len() - 1], &d0);
                    }
                }
            })?;
            Ok((n, best))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    let mut instances = 0;
    let mut merged: Vec<Vec<Option<Scalar>>> = vec![vec![None; max_len]; eps.len()];
    for (n, best) in parts {
        instances += n;
        for (k, row) in best.into_iter().enumerate() {
            for (l, v) in row.into_iter().enumerate() {
                if let Some(v) = v {
                    min_opt(&mut merged[k][l], &v);
                }
            }
        }
    }
    let rows = eps
        .iter()
        .zip(merged)
        .map(|(e, per_len)| {
            let mut acc: Option<Scalar> = None;
            let delta_by_len: Vec<Option<Scalar>> = per_len
                .iter()
                .map(|v| {
                    if let Some(v) = v {
                        min_opt(&mut acc, v);
                    }
                    acc.clone()
                })
                .collect();
            let delta = acc.clone();
            let shrinking = delta_by_len.windows(2).any(|w| match (&w[0], &w[1]) {
                (None, Some(_)) => true,
                (Some(a), Some(b)) => b < a,
                _ => false,
            });
            let within_eps = delta.as_ref().is_some_and(|d| d <= e);
            ModulusRow { eps: e.clone(), delta, delta_by_len, within_eps, shrinking }
        })
        .collect();
    Ok(ModulusTable { max_len, instances, rows })
}

/// The translation-pseudogroup map on two intervals: the identity on
/// `(a, a+r)` and a shift carrying `(a+r, a+2r)` onto `(b−r, b)`.
#[derive(Clone, Debug)]
pub struct SplitTranslation {
    pub a: Scalar,
    pub b: Scalar,
    pub r: Scalar,
    pub h: PartialMap,
}

impl SplitTranslation {
    pub fn new(a: Scalar, b: Scalar, r: Scalar) -> Result<Self, EquicontError> {
        let three = Scalar::from_int(3);
        if !r.is_positive() || &r * &three >= &b - &a {
            return Err(EquicontError::Precondition("need 0 < r < (b - a)/3".into()));
        }
        let ar = &a + &r;
        let ar2 = &ar + &r;
        let shift = &(&b - &a) - &(&r + &r);
        let h = PartialMap::new(
            Space::Line,
            vec![
                (Interval::open(a.clone(), ar.clone()), MoebiusMap::identity()),
                (Interval::open(ar, ar2), MoebiusMap::translation(shift)),
            ],
        )?;
        Ok(Self { a, b, r, h })
    }

    /// `x_n = a + (n−1)r/n`, `y_n = a + (n+1)r/n` for `n = 2..=n_max`.
    pub fn pairs(&self, n_max: i64) -> Vec<(Scalar, Scalar)> {
        (2..=n_max)
            .map(|n| {
                let x = &self.a + &(&self.r * &Scalar::frac(n - 1, n));
                let y = &self.a + &(&self.r * &Scalar::frac(n + 1, n));
                (x, y)
            })
            .collect()
    }

    pub fn system(&self) -> Result<GeneratorSystem, EquicontError> {
        Ok(GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("h", self.h.clone())])?)
    }
}

/// Composes the bar extensions along `w` and checks that the result is
/// defined on all of `v`. Members without a bar use their own map, so a
/// system without bars models "bar = base".
pub fn extend_word_over(sys: &GeneratorSystem, w: &[usize], x: &Scalar, v: &Interval) -> Result<PartialMap, EquicontError> {
    let x = sys.space().reduce(x);
    if !v.contains(&x) {
        return Err(EquicontError::NotInWindow(x));
    }
    sys.evaluate_word(w, &x)?;
    let mut acc = PartialMap::identity(sys.space(), &full_domain(sys.space()));
    for (k, &m) in w.iter().enumerate() {
        let mem = &sys.members()[m];
        acc = mem.bar.as_ref().unwrap_or(&mem.map).compose(&acc);
        if !acc.domain().contains_interval(v) {
            return Err(EquicontError::ExtensionUndefined { word: sys.word_name(w), prefix: k + 1 });
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbViolation {
    pub x: Scalar,
    pub y: Scalar,
    pub word: String,
    pub fx: Scalar,
    pub fy: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbReport {
    pub instances: usize,
    pub violations: Vec<AbViolation>,
    /// Largest separation among pairs without any violation.
    pub max_clean_separation: Option<Scalar>,
}

/// Checks `f(x) ∈ A ⟹ f(y) ∈ B` for every word of length `≤ max_len`
/// defined at both points of each pair.
pub fn ab_propagation_check(
    sys: &GeneratorSystem,
    a: &DomainSet,
    b: &DomainSet,
    pairs: &[(Scalar, Scalar)],
    max_len: usize,
) -> Result<AbReport, EquicontError> {
    let space = sys.space();
    let bounded = a.intervals().iter().all(|iv| iv.lo.is_finite() && iv.hi.is_finite());
    if !bounded || !closure_within(a, b, space) {
        return Err(EquicontError::Precondition("the closure of A must be compact and inside B".into()));
    }
    let parts = pairs
        .par_iter()
        .map(|(x, y)| {
            let mut n = 0usize;
            let mut bad = Vec::new();
            for_each_common_word(sys, x, y, max_len, |w, fx, fy| {
                n += 1;
                if a.contains(fx) && !b.contains(fy) {
                    bad.push(AbViolation { x: x.clone(), y: y.clone(), word: sys.word_name(w), fx: fx.clone(), fy: fy.clone() });
                }
            })?;
            Ok((space.distance(x, y), n, bad))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    let mut report = AbReport { instances: 0, violations: Vec::new(), max_clean_separation: None };
    for (d, n, bad) in parts {
        report.instances += n;
        if bad.is_empty() {
            if report.max_clean_separation.as_ref().is_none_or(|c| d > *c) {
                report.max_clean_separation = Some(d);
            }
        } else {
            report.violations.extend(bad);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub radius: usize,
    pub max_gap: Scalar,
    pub points: usize,
}

/// Largest gap left by `pts` in `region`; cyclic when the region is the
/// whole circle.
fn max_gap(space: Space, region: &Interval, pts: &mut [Scalar]) -> Option<Scalar> {
    pts.sort();
    let cyclic = space == Space::Circle && *region == Interval::unit();
    if cyclic {
        let first = pts.first()?;
        let wrap = &(first + &Scalar::one()) - pts.last()?;
        return Some(pts.windows(2).map(|w| &w[1] - &w[0]).fold(wrap, std::cmp::max));
    }
    let lo = region.lo.finite()?.clone();
    let hi = region.hi.finite()?.clone();
    let mut prev = lo;
    let mut gap = Scalar::zero();
    for p in pts.iter() {
        gap = gap.max(p - &prev);
        prev = p.clone();
    }
    Some(gap.max(&hi - &prev))
}

/// Smallest `R ≤ rmax` such that every open subinterval of `region` of
/// length `2ε` meets the orbit ball `B(x, R)`.
pub fn orbit_density(sys: &GeneratorSystem, x: &Scalar, region: &Interval, eps: &Scalar, rmax: usize) -> Result<DensityReport, EquicontError> {
    let space = sys.space();
    if !eps.is_positive() || !region.lo.is_finite() || !region.hi.is_finite() || region.is_empty() {
        return Err(EquicontError::Precondition("need a bounded non-empty region and eps > 0".into()));
    }
    let two_eps = eps + eps;
    let ball = orbit_ball(sys, x, rmax)?;
    let nodes = ball.nodes();
    let mut pts: Vec<Scalar> = Vec::new();
    let mut k = 0;
    let mut gap = &region.hi.finite().expect("bounded").clone() - region.lo.finite().expect("bounded");
    for r in 0..=rmax {
        let before = k;
        while k < nodes.len() && nodes[k].dist == r {
            if region.contains(&nodes[k].point) {
                pts.push(nodes[k].point.clone());
            }
            k += 1;
        }
        if k == before && r > 0 {
            // the orbit is exhausted
            break;
        }
        if let Some(g) = max_gap(space, region, &mut pts) {
            gap = g;
        }
        if gap < two_eps {
            return Ok(DensityReport { radius: r, max_gap: gap, points: pts.len() });
        }
    }
    Err(EquicontError::NotDense { eps: eps.clone(), rmax, gap })
}

/// Smallest `R ≤ rmax` with a point of `B(x, R)` within `ε` of `y`.
pub fn approach_radius(sys: &GeneratorSystem, x: &Scalar, y: &Scalar, eps: &Scalar, rmax: usize) -> Result<Option<usize>, EquicontError> {
    let ball = orbit_ball(sys, x, rmax)?;
    let space = sys.space();
    Ok(ball.nodes().iter().find(|n| space.distance(&n.point, y) < *eps).map(|n| n.dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, Rational};
    use crate::recurrence::{build_nonrecurrent_example, NonRecurrentParams};
    use proptest::prelude::*;

    fn rotation(alpha: Scalar) -> GeneratorSystem {
        let r = PartialMap::rotation(&alpha);
        GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r.clone()).with_bar(r)]).unwrap()
    }

    fn sqrt2_rotation() -> GeneratorSystem {
        rotation(Scalar::sqrt(2).unwrap() - Scalar::one())
    }

    #[test]
    fn rotation_modulus_is_identity() {
        let sys = sqrt2_rotation();
        let eps: Vec<Scalar> = [1, 2, 5, 10].iter().map(|&k| Scalar::frac(k, 100)).collect();
        let pairs: Vec<(Scalar, Scalar)> = eps.iter().map(|e| (Scalar::frac(1, 7), &Scalar::frac(1, 7) + e)).collect();
        for l in [1, 3] {
            let t = modulus_estimate(&sys, l, &eps, &pairs).unwrap();
            assert!(t.is_monotone());
            for row in &t.rows {
                assert_eq!(row.delta.as_ref(), Some(&row.eps));
                assert!(row.within_eps && !row.shrinking);
            }
        }
    }

    #[test]
    fn split_translation_modulus_collapses() {
        let ex = SplitTranslation::new(Scalar::zero(), Scalar::from_int(4), Scalar::one()).unwrap();
        let sys = ex.system().unwrap();
        let eps = vec![Scalar::one()];
        for n in [10i64, 100] {
            let pairs = ex.pairs(n);
            for (x, y) in &pairs {
                // h(y) − h(x) = 2r/n + b − a − 2r
                let jump = ex.h.apply(y).unwrap() - ex.h.apply(x).unwrap();
                assert!(jump > Scalar::from_int(2));
            }
            let t = modulus_estimate(&sys, 1, &eps, &pairs).unwrap();
            assert_eq!(t.rows[0].delta, Some(Scalar::frac(2, n)));
        }
        assert!(SplitTranslation::new(Scalar::zero(), Scalar::from_int(3), Scalar::one()).is_err());
    }

    #[test]
    fn nonrecurrent_modulus_against_composites() {
        let ex = build_nonrecurrent_example(&NonRecurrentParams::standard()).unwrap();
        let sys = &ex.system;
        let eps: Vec<Scalar> = [1, 4, 16].iter().map(|&k| Scalar::frac(k, 16)).collect();
        let pairs: Vec<(Scalar, Scalar)> =
            [(rat(1, 2), rat(5, 8)), (rat(3, 2), rat(13, 8)), (rat(5, 2), rat(21, 8)), (rat(9, 10), rat(1, 1))]
                .into_iter()
                .map(|(a, b)| (Scalar::rational(a), Scalar::rational(b)))
                .collect();
        let l = 4;
        let t = modulus_estimate(sys, l, &eps, &pairs).unwrap();
        // oracle: composite maps of every reduced word
        let mut words: Vec<Word> = vec![vec![]];
        let mut all = Vec::new();
        for _ in 0..l {
            let mut next = Vec::new();
            for w in &words {
                for m in 0..sys.len() {
                    if w.last().is_some_and(|&p| sys.inverse(p) == m) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(m);
                    next.push(w2);
                }
            }
            all.extend(next.iter().cloned());
            words = next;
        }
        for row in &t.rows {
            let mut want: Option<Scalar> = None;
            for w in &all {
                let f = sys.word_map(w);
                for (x, y) in &pairs {
                    if let (Some(fx), Some(fy)) = (f.try_apply(x), f.try_apply(y)) {
                        if Space::Line.distance(&fx, &fy) >= row.eps {
                            min_opt(&mut want, &Space::Line.distance(x, y));
                        }
                    }
                }
            }
            assert_eq!(row.delta, want);
        }
        assert!(t.rows.iter().all(|r| r.delta.as_ref().is_none_or(|d| d.is_positive())));
    }

    #[test]
    fn extension_of_inverse_powers() {
        let ex = build_nonrecurrent_example(&NonRecurrentParams::standard()).unwrap();
        let sys = &ex.system;
        let gi = sys.index_of("g1^-1").unwrap();
        assert!(extend_word_over(sys, &[], &Scalar::frac(3, 2), &Interval::open(Scalar::one(), Scalar::from_int(2))).unwrap().is_identity_on(&Interval::real_line()).unwrap());
        // u = x/(5−x) conjugates g1⁻¹ to u ↦ 2u/3
        let oracle = |n: u32, x: &Rational| {
            let u = x / (rat(5, 1) - x);
            let u = u * num_rational::BigRational::new(2.into(), 3.into()).pow(n as i32);
            &u * rat(5, 1) / (rat(1, 1) + &u)
        };
        for n in 1..=5usize {
            let x = ex.g1_power(-(n as i64) + 1, &Scalar::frac(3, 2));
            let lo = &x - &Scalar::frac(1, 100);
            let hi = &x + &Scalar::frac(1, 100);
            let w = vec![gi; n];
            let m = extend_word_over(sys, &w, &x, &Interval::open(lo.clone(), hi.clone())).unwrap();
            for p in [lo, x.clone(), hi] {
                let q = p.as_rational().unwrap();
                assert_eq!(m.apply(&p).unwrap(), Scalar::rational(oracle(n as u32, q)));
            }
            assert_eq!(m.apply(&x).unwrap(), sys.evaluate_word(&w, &x).unwrap());
        }
    }

    #[test]
    fn base_as_bar_fails_at_first_prefix() {
        let t = PartialMap::translation(Space::Line, Scalar::one(), Interval::open(Scalar::zero(), Scalar::from_int(2))).unwrap();
        let sys = GeneratorSystem::new(Space::Line, DomainSet::empty(), vec![Generator::new("t", t)]).unwrap();
        let err = extend_word_over(&sys, &[0, 0], &Scalar::frac(1, 2), &Interval::open(Scalar::from_int(-1), Scalar::one())).unwrap_err();
        assert!(matches!(err, EquicontError::ExtensionUndefined { prefix: 1, .. }), "{err}");
    }

    #[test]
    fn ab_propagation_on_rotation() {
        let sys = sqrt2_rotation();
        let a = DomainSet::from_interval(Interval::open(Scalar::frac(2, 10), Scalar::frac(3, 10)));
        let b = DomainSet::from_interval(Interval::open(Scalar::frac(1, 10), Scalar::frac(4, 10)));
        let close: Vec<(Scalar, Scalar)> = (0..20).map(|k| (Scalar::frac(k, 20), &Scalar::frac(k, 20) + &Scalar::frac(k % 5, 100))).collect();
        let rep = ab_propagation_check(&sys, &a, &b, &close, 8).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.max_clean_separation, Some(Scalar::frac(4, 100)));
        let same: Vec<(Scalar, Scalar)> = vec![(Scalar::frac(1, 3), Scalar::frac(1, 3))];
        assert!(ab_propagation_check(&sys, &a, &b, &same, 8).unwrap().violations.is_empty());
        let far: Vec<(Scalar, Scalar)> = (0..20).map(|k| (Scalar::frac(k, 20), &Scalar::frac(k, 20) + &Scalar::frac(1, 4))).collect();
        assert!(!ab_propagation_check(&sys, &a, &b, &far, 8).unwrap().violations.is_empty());
        assert!(ab_propagation_check(&sys, &b, &a, &close, 2).is_err());
    }

    #[test]
    fn density_examples() {
        let sys = sqrt2_rotation();
        let x = Scalar::zero();
        let tiny = Interval::open(Scalar::frac(-1, 1000), Scalar::frac(1, 1000));
        let sys_line = GeneratorSystem::new(
            Space::Line,
            DomainSet::empty(),
            vec![Generator::new("t", PartialMap::translation(Space::Line, Scalar::one(), Interval::real_line()).unwrap())],
        )
        .unwrap();
        assert_eq!(orbit_density(&sys_line, &x, &tiny, &Scalar::frac(1, 100), 3).unwrap().radius, 0);
        let r = orbit_density(&sys, &x, &Interval::unit(), &Scalar::frac(1, 100), 400).unwrap();
        assert!(r.radius > 0);
        let third = rotation(Scalar::frac(1, 3));
        let err = orbit_density(&third, &x, &Interval::unit(), &Scalar::frac(1, 100), 400).unwrap_err();
        assert!(matches!(err, EquicontError::NotDense { .. }));
    }

    #[test]
    fn approach_is_symmetric_for_rotation() {
        let sys = sqrt2_rotation();
        let (x, y) = (Scalar::frac(1, 5), Scalar::frac(2, 3));
        let e = Scalar::frac(1, 50);
        assert_eq!(approach_radius(&sys, &x, &y, &e, 200).unwrap(), approach_radius(&sys, &y, &x, &e, 200).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn density_radius_antitone_in_eps(a in 2i64..40, b in 2i64..40) {
            let sys = sqrt2_rotation();
            let (small, large) = (a.min(b), a.max(b));
            let r_small = orbit_density(&sys, &Scalar::zero(), &Interval::unit(), &Scalar::frac(1, large), 300).unwrap().radius;
            let r_large = orbit_density(&sys, &Scalar::zero(), &Interval::unit(), &Scalar::frac(1, small), 300).unwrap().radius;
            prop_assert!(r_large <= r_small);
        }

        #[test]
        fn density_radius_drops_with_more_generators(k in 2i64..30) {
            let alpha = Scalar::sqrt(2).unwrap() - Scalar::one();
            let r = PartialMap::rotation(&alpha);
            let r2 = r.compose(&r);
            let small = GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r.clone())]).unwrap();
            let big = GeneratorSystem::new(Space::Circle, full_domain(Space::Circle), vec![Generator::new("r", r), Generator::new("s", r2)]).unwrap();
            let eps = Scalar::frac(1, k);
            let a = orbit_density(&small, &Scalar::zero(), &Interval::unit(), &eps, 300).unwrap().radius;
            let b = orbit_density(&big, &Scalar::zero(), &Interval::unit(), &eps, 300).unwrap().radius;
            prop_assert!(b <= a);
        }

        #[test]
        fn extension_agrees_with_evaluation(n in 1usize..4, num in 1i64..9) {
            let ex = build_nonrecurrent_example(&NonRecurrentParams::standard()).unwrap();
            let sys = &ex.system;
            let x = Scalar::frac(num, 2);
            let g = sys.index_of("g1").unwrap();
            let w = vec![g; n];
            prop_assume!(sys.evaluate_word(&w, &x).is_ok());
            let v = Interval::open(&x - &Scalar::frac(1, 10), &x + &Scalar::frac(1, 10));
            let m = extend_word_over(sys, &w, &x, &v).unwrap();
            for k in 0..=4 {
                let p = &(&x - &Scalar::frac(1, 10)) + &Scalar::frac(k, 20);
                if let Ok(direct) = sys.evaluate_word(&w, &p) {
                    prop_assert_eq!(m.apply(&p).unwrap(), direct);
                }
            }
        }
    }
}
