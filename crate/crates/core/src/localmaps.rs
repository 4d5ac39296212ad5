//! Orientation-preserving partial homeomorphisms of the line and circle.
//!
//! A [`PartialMap`] is a finite list of pieces, each an interval carrying a
//! Möbius map `x ↦ (αx + β)/(γx + δ)` with `αδ − βγ > 0`. The circle is
//! `ℝ/ℤ` with representatives in `[0, 1)`; every circle piece maps into
//! `[0, 1)`, so a rotation is stored as two translations.
//!
//! Maps are kept canonical: pieces are sorted, a boundary point shared by two
//! pieces belongs to the right-hand one, and adjacent pieces carrying the
//! same normalized Möbius map are merged. Two canonical maps are equal as
//! partial maps exactly when they are equal as values.

use std::cmp::Ordering;
use std::fmt;

use crate::exactnum::{ExtScalar, Scalar};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("point {0} is outside the domain")]
    OutsideDomain(Scalar),
    #[error("interval {0} is not contained in the domain")]
    IntervalNotInDomain(Interval),
    #[error("invalid interval: {0}")]
    BadInterval(String),
    #[error("invalid Moebius map: {0}")]
    BadMoebius(String),
    #[error("invalid piece list: {0}")]
    BadPieces(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Line,
    Circle,
}

impl Space {
    /// Canonical representative of a point.
    pub fn reduce(self, x: &Scalar) -> Scalar {
        match self {
            Space::Line => x.clone(),
            Space::Circle => x.fract(),
        }
    }

    /// Ambient distance: `|x − y|` on the line, arc length on the circle.
    pub fn distance(self, x: &Scalar, y: &Scalar) -> Scalar {
        let d = (x - y).abs();
        match self {
            Space::Line => d,
            Space::Circle => {
                let d = d.fract();
                let e = Scalar::one() - &d;
                if e < d {
                    e
                } else {
                    d
                }
            }
        }
    }
}

/// Lower endpoints compare with closed before open at equal values.
fn cmp_lower(a: (&ExtScalar, bool), b: (&ExtScalar, bool)) -> Ordering {
    a.0.cmp(b.0).then(a.1.cmp(&b.1))
}

/// Upper endpoints compare with open before closed at equal values.
fn cmp_upper(a: (&ExtScalar, bool), b: (&ExtScalar, bool)) -> Ordering {
    a.0.cmp(b.0).then(b.1.cmp(&a.1))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: ExtScalar,
    pub hi: ExtScalar,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: ExtScalar, hi: ExtScalar, lo_open: bool, hi_open: bool) -> Result<Self, MapError> {
        let lo_open = lo_open || !lo.is_finite();
        let hi_open = hi_open || !hi.is_finite();
        if lo == ExtScalar::PosInf || hi == ExtScalar::NegInf {
            return Err(MapError::BadInterval(format!("endpoints {lo}, {hi}")));
        }
        let iv = Interval { lo, hi, lo_open, hi_open };
        if iv.is_empty() {
            return Err(MapError::BadInterval(format!("{iv} is empty")));
        }
        Ok(iv)
    }

    fn raw(lo: ExtScalar, hi: ExtScalar, lo_open: bool, hi_open: bool) -> Self {
        Interval { lo, hi, lo_open, hi_open }
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo < hi, "open interval needs lo < hi");
        Self::raw(lo.into(), hi.into(), true, true)
    }

    pub fn closed(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo <= hi, "closed interval needs lo <= hi");
        Self::raw(lo.into(), hi.into(), false, false)
    }

    /// `[lo, hi)`.
    pub fn closed_open(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo < hi);
        Self::raw(lo.into(), hi.into(), false, true)
    }

    pub fn point(x: Scalar) -> Self {
        Self::raw(x.clone().into(), x.into(), false, false)
    }

    pub fn real_line() -> Self {
        Self::raw(ExtScalar::NegInf, ExtScalar::PosInf, true, true)
    }

    /// `[0, 1)`, the circle's fundamental domain.
    pub fn unit() -> Self {
        Self::closed_open(Scalar::zero(), Scalar::one())
    }

    pub fn below(hi: Scalar, hi_open: bool) -> Self {
        Self::raw(ExtScalar::NegInf, hi.into(), true, hi_open)
    }

    pub fn above(lo: Scalar, lo_open: bool) -> Self {
        Self::raw(lo.into(), ExtScalar::PosInf, lo_open, true)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => self.lo_open || self.hi_open,
            Ordering::Greater => true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_open(&self) -> bool {
        self.lo_open && self.hi_open
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let x = ExtScalar::Finite(x.clone());
        let lo_ok = match self.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => !self.lo_open,
            Ordering::Greater => false,
        };
        let hi_ok = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => !self.hi_open,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// True when `x` lies strictly between the endpoints.
    pub fn interior_contains(&self, x: &Scalar) -> bool {
        let x = ExtScalar::Finite(x.clone());
        self.lo < x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = if cmp_lower((&self.lo, self.lo_open), (&other.lo, other.lo_open))
            == Ordering::Less
        {
            (&other.lo, other.lo_open)
        } else {
            (&self.lo, self.lo_open)
        };
        let (hi, hi_open) = if cmp_upper((&self.hi, self.hi_open), (&other.hi, other.hi_open))
            == Ordering::Greater
        {
            (&other.hi, other.hi_open)
        } else {
            (&self.hi, self.hi_open)
        };
        let iv = Interval::raw(lo.clone(), hi.clone(), lo_open, hi_open);
        (!iv.is_empty()).then_some(iv)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        cmp_lower((&other.lo, other.lo_open), (&self.lo, self.lo_open)) != Ordering::Greater
            && cmp_upper((&self.hi, self.hi_open), (&other.hi, other.hi_open)) != Ordering::Greater
    }

    /// The closure lies in the interior of `other` (compact inclusion for
    /// bounded intervals).
    pub fn closure_inside_interior(&self, other: &Interval) -> bool {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return false;
        }
        other.lo < self.lo && self.hi < other.hi
    }

    /// Length for bounded intervals.
    pub fn length(&self) -> Option<Scalar> {
        Some(self.hi.finite()? - self.lo.finite()?)
    }

    /// Midpoint of a bounded interval.
    pub fn midpoint(&self) -> Option<Scalar> {
        Some((self.lo.finite()? + self.hi.finite()?) * Scalar::frac(1, 2))
    }

    fn lower_cmp(&self, other: &Interval) -> Ordering {
        cmp_lower((&self.lo, self.lo_open), (&other.lo, other.lo_open))
    }

    /// `self` ends exactly where `next` starts and the shared point is
    /// covered by at least one of them.
    fn touches(&self, next: &Interval) -> bool {
        self.hi.is_finite() && self.hi == next.lo && (!self.hi_open || !next.lo_open)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite union of disjoint, non-touching intervals, sorted by lower end.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DomainSet {
    intervals: Vec<Interval>,
}

impl DomainSet {
    pub fn empty() -> Self {
        DomainSet { intervals: Vec::new() }
    }

    pub fn from_interval(iv: Interval) -> Self {
        Self::from_intervals(vec![iv])
    }

    /// Union of arbitrary intervals.
    pub fn from_intervals(mut ivs: Vec<Interval>) -> Self {
        ivs.retain(|i| !i.is_empty());
        ivs.sort_by(|a, b| a.lower_cmp(b));
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            if let Some(last) = out.last_mut() {
                let overlaps = last.intersect(&iv).is_some() || last.touches(&iv);
                if overlaps {
                    if cmp_upper((&iv.hi, iv.hi_open), (&last.hi, last.hi_open)) == Ordering::Greater {
                        last.hi = iv.hi;
                        last.hi_open = iv.hi_open;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        DomainSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn contains_interval(&self, iv: &Interval) -> bool {
        self.intervals.iter().any(|c| iv.is_subset_of(c))
    }

    pub fn is_subset_of(&self, other: &DomainSet) -> bool {
        self.intervals.iter().all(|i| other.contains_interval(i))
    }

    pub fn union(&self, other: &DomainSet) -> DomainSet {
        let mut v = self.intervals.clone();
        v.extend(other.intervals.iter().cloned());
        Self::from_intervals(v)
    }

    pub fn intersect(&self, other: &DomainSet) -> DomainSet {
        let mut v = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(c) = a.intersect(b) {
                    v.push(c);
                }
            }
        }
        Self::from_intervals(v)
    }

    /// Openness in the topology of `space`. On the circle a component
    /// closed at 0 is fine when the set also reaches up to 1.
    pub fn is_open(&self, space: Space) -> bool {
        let one = ExtScalar::Finite(Scalar::one());
        let zero = ExtScalar::Finite(Scalar::zero());
        let wraps = self.intervals.last().is_some_and(|l| l.hi == one && l.hi_open);
        self.intervals.iter().enumerate().all(|(k, iv)| {
            let lo_ok = iv.lo_open
                || (space == Space::Circle && k == 0 && iv.lo == zero && (wraps || iv.hi == one));
            lo_ok && iv.hi_open
        })
    }
}

impl fmt::Display for DomainSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

impl fmt::Debug for DomainSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `x ↦ (αx + β)/(γx + δ)`, normalized so that `γ = 1` when `γ ≠ 0` and
/// `δ = 1` otherwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MoebiusMap {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
}

impl MoebiusMap {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, MapError> {
        let det = &a * &d - &b * &c;
        if !det.is_positive() {
            return Err(MapError::BadMoebius(format!(
                "determinant {det} of ({a}, {b}, {c}, {d}) is not positive"
            )));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        let s = if c.is_zero() { d.clone() } else { c.clone() };
        if s == Scalar::one() {
            return MoebiusMap { a, b, c, d };
        }
        let inv = s.checked_inv().expect("normalizer is non-zero");
        MoebiusMap { a: &a * &inv, b: &b * &inv, c: &c * &inv, d: &d * &inv }
    }

    pub fn identity() -> Self {
        MoebiusMap { a: Scalar::one(), b: Scalar::zero(), c: Scalar::zero(), d: Scalar::one() }
    }

    pub fn translation(t: Scalar) -> Self {
        MoebiusMap { a: Scalar::one(), b: t, c: Scalar::zero(), d: Scalar::one() }
    }

    /// `x ↦ s·x + t` with `s > 0`.
    pub fn affine(s: Scalar, t: Scalar) -> Result<Self, MapError> {
        Self::new(s, t, Scalar::zero(), Scalar::one())
    }

    pub fn coefficients(&self) -> [&Scalar; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn pole(&self) -> Option<Scalar> {
        (!self.c.is_zero()).then(|| -(&self.d / &self.c))
    }

    /// Value at a finite point; `None` at the pole.
    pub fn apply(&self, x: &Scalar) -> Option<Scalar> {
        let den = &self.c * x + &self.d;
        if den.is_zero() {
            return None;
        }
        Some((&self.a * x + &self.b) / den)
    }

    /// Limit from the right at a lower endpoint.
    pub fn lower_limit(&self, x: &ExtScalar) -> ExtScalar {
        match x {
            ExtScalar::NegInf | ExtScalar::PosInf if self.c.is_zero() => x.clone(),
            ExtScalar::NegInf | ExtScalar::PosInf => ExtScalar::Finite(&self.a / &self.c),
            ExtScalar::Finite(v) => match self.apply(v) {
                Some(y) => ExtScalar::Finite(y),
                None => ExtScalar::NegInf,
            },
        }
    }

    /// Limit from the left at an upper endpoint.
    pub fn upper_limit(&self, x: &ExtScalar) -> ExtScalar {
        match x {
            ExtScalar::NegInf | ExtScalar::PosInf if self.c.is_zero() => x.clone(),
            ExtScalar::NegInf | ExtScalar::PosInf => ExtScalar::Finite(&self.a / &self.c),
            ExtScalar::Finite(v) => match self.apply(v) {
                Some(y) => ExtScalar::Finite(y),
                None => ExtScalar::PosInf,
            },
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MoebiusMap) -> MoebiusMap {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&inner.a, &inner.b, &inner.c, &inner.d);
        Self::normalized(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::normalized(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Solves `m(x) = y`; `None` when `y` is the value at infinity.
    pub fn preimage(&self, y: &Scalar) -> Option<Scalar> {
        self.inverse().apply(y)
    }

    /// Whether the pole avoids the interval (it may sit at an open end).
    pub fn regular_on(&self, iv: &Interval) -> bool {
        match self.pole() {
            None => true,
            Some(p) => !iv.contains(&p) && !iv.interior_contains(&p),
        }
    }

    /// Image of an interval on which the map is regular.
    pub fn image(&self, iv: &Interval) -> Interval {
        Interval::raw(self.lower_limit(&iv.lo), self.upper_limit(&iv.hi), iv.lo_open, iv.hi_open)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}*x + {})/({}*x + {})", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Piece {
    pub interval: Interval,
    pub map: MoebiusMap,
}

impl Piece {
    pub fn image(&self) -> Interval {
        self.map.image(&self.interval)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialMap {
    space: Space,
    pieces: Vec<Piece>,
}

impl PartialMap {
    /// Validating constructor. Circle pieces must lie in `[0, 1)`; their
    /// images are cut at integers and shifted back into `[0, 1)`.
    pub fn new(space: Space, pieces: Vec<(Interval, MoebiusMap)>) -> Result<Self, MapError> {
        let mut raw = Vec::new();
        for (iv, m) in pieces {
            if iv.is_empty() {
                return Err(MapError::BadPieces(format!("empty piece interval {iv}")));
            }
            if !m.regular_on(&iv) {
                return Err(MapError::BadPieces(format!("{m} has a pole inside {iv}")));
            }
            match space {
                Space::Line => raw.push(Piece { interval: iv, map: m }),
                Space::Circle => {
                    if !iv.is_subset_of(&Interval::unit()) {
                        return Err(MapError::BadPieces(format!("circle piece {iv} leaves [0,1)")));
                    }
                    raw.extend(wrap_piece(&iv, &m)?);
                }
            }
        }
        let map = Self::from_pieces(space, raw);
        map.validate()?;
        Ok(map)
    }

    /// Canonicalizes without validation; used by the closed operations.
    fn from_pieces(space: Space, mut pieces: Vec<Piece>) -> Self {
        pieces.retain(|p| !p.interval.is_empty());
        pieces.sort_by(|a, b| a.interval.lower_cmp(&b.interval));
        // absorb point pieces into a neighbour, preferring the right one
        let mut k = 0;
        while k < pieces.len() {
            if pieces[k].interval.is_degenerate() && pieces.len() > 1 {
                let x = pieces[k].interval.lo.clone();
                if k + 1 < pieces.len() && pieces[k + 1].interval.lo == x {
                    pieces[k + 1].interval.lo_open = false;
                    pieces.remove(k);
                    continue;
                }
                if k > 0 && pieces[k - 1].interval.hi == x {
                    pieces[k - 1].interval.hi_open = false;
                    pieces.remove(k);
                    k -= 1;
                    continue;
                }
            }
            k += 1;
        }
        // shared boundary points go right
        for k in 1..pieces.len() {
            let (l, r) = pieces.split_at_mut(k);
            let left = &mut l[k - 1].interval;
            let right = &mut r[0].interval;
            if left.touches(right) && !left.hi_open {
                left.hi_open = true;
                right.lo_open = false;
            }
        }
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if let Some(last) = out.last_mut() {
                if last.map == p.map && last.interval.touches(&p.interval) {
                    last.interval.hi = p.interval.hi;
                    last.interval.hi_open = p.interval.hi_open;
                    continue;
                }
            }
            out.push(p);
        }
        PartialMap { space, pieces: out }
    }

    fn validate(&self) -> Result<(), MapError> {
        for w in self.pieces.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            if p.interval.intersect(&q.interval).is_some() {
                return Err(MapError::BadPieces(format!(
                    "pieces {} and {} overlap",
                    p.interval, q.interval
                )));
            }
            if p.interval.hi == q.interval.lo && p.interval.touches(&q.interval) {
                let left = p.map.upper_limit(&p.interval.hi);
                let right = q.map.lower_limit(&q.interval.lo);
                let continuous = match (left.finite(), right.finite()) {
                    (Some(l), Some(r)) => match self.space {
                        Space::Line => l == r,
                        Space::Circle => (l - r).fract().is_zero(),
                    },
                    _ => false,
                };
                if !continuous {
                    return Err(MapError::BadPieces(format!(
                        "discontinuity at {}: {left} vs {right}",
                        p.interval.hi
                    )));
                }
            }
        }
        let dom = self.domain();
        if !dom.is_open(self.space) {
            return Err(MapError::BadPieces(format!("domain {dom} is not open")));
        }
        let mut images: Vec<Interval> = self.pieces.iter().map(|p| p.image()).collect();
        images.sort_by(|a, b| a.lower_cmp(b));
        for w in images.windows(2) {
            if w[0].intersect(&w[1]).is_some() {
                return Err(MapError::BadPieces(format!(
                    "not injective: images {} and {} overlap",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    pub fn empty(space: Space) -> Self {
        PartialMap { space, pieces: Vec::new() }
    }

    pub fn identity(space: Space, dom: &DomainSet) -> Self {
        let pieces = dom
            .intervals()
            .iter()
            .map(|iv| Piece { interval: iv.clone(), map: MoebiusMap::identity() })
            .collect();
        Self::from_pieces(space, pieces)
    }

    /// A single Möbius map on one interval.
    pub fn moebius(space: Space, iv: Interval, m: MoebiusMap) -> Result<Self, MapError> {
        Self::new(space, vec![(iv, m)])
    }

    pub fn translation(space: Space, t: Scalar, iv: Interval) -> Result<Self, MapError> {
        Self::moebius(space, iv, MoebiusMap::translation(t))
    }

    /// Rotation of the whole circle by `alpha`.
    pub fn rotation(alpha: &Scalar) -> Self {
        let t = alpha.fract();
        Self::moebius(Space::Circle, Interval::unit(), MoebiusMap::translation(t))
            .expect("rotations are valid circle maps")
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn domain(&self) -> DomainSet {
        DomainSet::from_intervals(self.pieces.iter().map(|p| p.interval.clone()).collect())
    }

    pub fn image(&self) -> DomainSet {
        DomainSet::from_intervals(self.pieces.iter().map(|p| p.image()).collect())
    }

    fn piece_at(&self, x: &Scalar) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.interval.contains(x))
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.piece_at(&self.space.reduce(x)).is_some()
    }

    pub fn apply(&self, x: &Scalar) -> Result<Scalar, MapError> {
        self.try_apply(x).ok_or_else(|| MapError::OutsideDomain(x.clone()))
    }

    pub fn try_apply(&self, x: &Scalar) -> Option<Scalar> {
        let x = self.space.reduce(x);
        self.piece_at(&x)?.map.apply(&x)
    }

    /// `self ∘ g` on its maximal domain `g⁻¹(dom self)`.
    pub fn compose(&self, g: &PartialMap) -> PartialMap {
        assert_eq!(self.space, g.space, "composing maps of different spaces");
        let mut out = Vec::new();
        for gp in &g.pieces {
            let img = gp.image();
            let inv = gp.map.inverse();
            for fp in &self.pieces {
                if let Some(meet) = img.intersect(&fp.interval) {
                    out.push(Piece {
                        interval: inv.image(&meet),
                        map: fp.map.compose(&gp.map),
                    });
                }
            }
        }
        Self::from_pieces(self.space, out)
    }

    pub fn invert(&self) -> PartialMap {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { interval: p.image(), map: p.map.inverse() })
            .collect();
        Self::from_pieces(self.space, pieces)
    }

    pub fn restrict(&self, dom: &DomainSet) -> PartialMap {
        let mut out = Vec::new();
        for p in &self.pieces {
            for iv in dom.intervals() {
                if let Some(meet) = p.interval.intersect(iv) {
                    out.push(Piece { interval: meet, map: p.map.clone() });
                }
            }
        }
        Self::from_pieces(self.space, out)
    }

    /// Combination of two maps that agree where both are defined.
    pub fn combine(&self, other: &PartialMap) -> Result<PartialMap, MapError> {
        let common = self.domain().intersect(&other.domain());
        if self.restrict(&common) != other.restrict(&common) {
            return Err(MapError::BadPieces("maps disagree on the common domain".into()));
        }
        let rest = DomainSet::from_intervals(
            other
                .domain()
                .intervals()
                .iter()
                .flat_map(|iv| complement_pieces(iv, &self.domain()))
                .collect(),
        );
        let mut pieces = self.pieces.clone();
        pieces.extend(other.restrict(&rest).pieces);
        let out = Self::from_pieces(self.space, pieces);
        out.validate()?;
        Ok(out)
    }

    /// Pieces governing points just right and just left of `x`.
    fn germ_pieces(&self, x: &Scalar) -> (Option<&MoebiusMap>, Option<&MoebiusMap>) {
        let ex = ExtScalar::Finite(x.clone());
        let right = self
            .pieces
            .iter()
            .find(|p| p.interval.lo <= ex && ex < p.interval.hi)
            .map(|p| &p.map);
        let left_at = if self.space == Space::Circle && x.is_zero() {
            ExtScalar::Finite(Scalar::one())
        } else {
            ex
        };
        let left = self
            .pieces
            .iter()
            .find(|p| p.interval.lo < left_at && left_at <= p.interval.hi)
            .map(|p| &p.map);
        (left, right)
    }

    /// Whether `self` and `g` agree on a neighbourhood of `x`.
    pub fn germ_equal(&self, g: &PartialMap, x: &Scalar) -> Result<bool, MapError> {
        let x = self.space.reduce(x);
        if !self.contains(&x) || !g.contains(&x) {
            return Err(MapError::OutsideDomain(x));
        }
        let (fl, fr) = self.germ_pieces(&x);
        let (gl, gr) = g.germ_pieces(&x);
        Ok(fl == gl && fr == gr)
    }

    /// Whether the germ at `x` is the identity germ.
    pub fn germ_is_identity(&self, x: &Scalar) -> Result<bool, MapError> {
        let x = self.space.reduce(x);
        if !self.contains(&x) {
            return Err(MapError::OutsideDomain(x));
        }
        let (l, r) = self.germ_pieces(&x);
        Ok(l.is_some_and(|m| m.is_identity()) && r.is_some_and(|m| m.is_identity()))
    }

    pub fn is_identity_on(&self, iv: &Interval) -> Result<bool, MapError> {
        if !self.domain().contains_interval(iv) {
            return Err(MapError::IntervalNotInDomain(iv.clone()));
        }
        Ok(self.pieces.iter().all(|p| match p.interval.intersect(iv) {
            None => true,
            // a single shared endpoint only needs to be fixed
            Some(m) if m.is_degenerate() => {
                let x = m.lo.finite().expect("degenerate intervals are finite");
                p.map.apply(x).as_ref() == Some(x)
            }
            Some(_) => p.map.is_identity(),
        }))
    }

    /// Whether `self` coincides with `other` on all of `dom self`.
    pub fn is_restriction_of(&self, other: &PartialMap) -> bool {
        other.restrict(&self.domain()) == *self
    }
}

/// Parts of `iv` not covered by `dom`.
fn complement_pieces(iv: &Interval, dom: &DomainSet) -> Vec<Interval> {
    let mut rest = vec![iv.clone()];
    for c in dom.intervals() {
        let mut next = Vec::new();
        for r in rest {
            let left = Interval::raw(ExtScalar::NegInf, c.lo.clone(), true, !c.lo_open);
            let right = Interval::raw(c.hi.clone(), ExtScalar::PosInf, !c.hi_open, true);
            for side in [left, right] {
                if side.is_empty() {
                    continue;
                }
                if let Some(m) = r.intersect(&side) {
                    next.push(m);
                }
            }
        }
        rest = next;
    }
    rest
}

/// Cuts a circle piece where its image crosses an integer and shifts each
/// part back into `[0, 1)`.
fn wrap_piece(iv: &Interval, m: &MoebiusMap) -> Result<Vec<Piece>, MapError> {
    let img = m.image(iv);
    let (lo, hi) = match (img.lo.finite(), img.hi.finite()) {
        (Some(l), Some(h)) => (l.clone(), h.clone()),
        _ => return Err(MapError::BadPieces(format!("circle piece {iv} has unbounded image"))),
    };
    if &hi - &lo > Scalar::one() {
        return Err(MapError::BadPieces(format!("circle piece {iv} wraps more than once")));
    }
    let inv = m.inverse();
    let mut out = Vec::new();
    let k0 = lo.floor();
    let k1 = hi.floor();
    let mut k = k0;
    while k <= k1 {
        let ks = Scalar::rational(crate::exactnum::Rational::from_integer(k.clone()));
        let band = Interval::closed_open(ks.clone(), &ks + &Scalar::one());
        if let Some(part) = img.intersect(&band) {
            out.push(Piece {
                interval: inv.image(&part),
                map: MoebiusMap::translation(-ks).compose(m),
            });
        }
        k += 1;
    }
    Ok(out)
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "<empty map>");
        }
        let parts: Vec<String> =
            self.pieces.iter().map(|p| format!("{} -> {}", p.interval, p.map)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{self}]", self.space)
    }
}
