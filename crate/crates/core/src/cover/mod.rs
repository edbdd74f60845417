//! Cover families and certificates.
//!
//! A [`CoverCertificate`] claims that its families are `d`-disjoint
//! (distinct sets of one family are at distance strictly greater than `d`)
//! and `R`-bounded, and that together they cover a region. Families are
//! either symbolic ([`IntervalFamily`], [`ProductFamily`] on `Zⁿ` with unit
//! weights) with closed-form membership, separation and diameter, or
//! explicit finite point sets.

mod extend;
mod solver;
mod verify;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupElement, Homomorphism};
use crate::metric::{MetricContext, Preimage};

pub use extend::{extend_cover_by_cosets, ExtensionReport};
pub use solver::{
    coloring_certificate, exhaustive_cover_oracle, lattice_ball_table, solve_min_diameter, MetricTable, SolveResult,
    ORACLE_MAX_POINTS,
};
pub use verify::{
    verify_families, verify_on_region, BoundViolation, DisjointnessViolation, SymbolicCheck, VerifyReport,
};

/// The sets `[kP + o, kP + o + L) ∩ Z` for `k ∈ Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalFamily {
    length: u64,
    period: u64,
    offset: i64,
}

impl IntervalFamily {
    pub fn new(length: u64, period: u64, offset: i64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidCover("block length must be positive".into()));
        }
        if period <= length {
            return Err(Error::InvalidCover(format!(
                "period {period} must exceed block length {length}"
            )));
        }
        if period > i64::MAX as u64 {
            return Err(Error::Overflow("interval period"));
        }
        Ok(IntervalFamily { length, period, offset })
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Index `k` of the block containing `n`, if any.
    pub fn block_of(&self, n: i64) -> Option<i64> {
        let p = self.period as i128;
        let shifted = n as i128 - self.offset as i128;
        let k = shifted.div_euclid(p);
        (shifted - k * p < self.length as i128).then_some(k as i64)
    }

    /// First and last integer of block `k`.
    pub fn block_bounds(&self, k: i64) -> (i128, i128) {
        let start = k as i128 * self.period as i128 + self.offset as i128;
        (start, start + self.length as i128 - 1)
    }

    /// Diameter of every block in the unit word metric.
    pub fn diameter(&self) -> u64 {
        self.length - 1
    }

    /// Least distance between points of distinct blocks.
    pub fn separation(&self) -> u64 {
        self.period - self.length + 1
    }
}

/// Products of one interval family per coordinate of `Zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductFamily {
    factors: Vec<IntervalFamily>,
}

impl ProductFamily {
    pub fn new(factors: Vec<IntervalFamily>) -> Self {
        ProductFamily { factors }
    }

    pub fn factors(&self) -> &[IntervalFamily] {
        &self.factors
    }

    /// Sum of the factor diameters (ℓ¹ metric).
    pub fn diameter(&self) -> u64 {
        self.factors.iter().map(IntervalFamily::diameter).sum()
    }

    /// Minimum of the factor separations; `None` for the single point of
    /// `Z⁰`.
    pub fn separation(&self) -> Option<u64> {
        self.factors.iter().map(IntervalFamily::separation).min()
    }

    /// Number of points in every set.
    pub fn set_size(&self) -> u128 {
        self.factors.iter().map(|f| f.length as u128).product()
    }
}

/// Pairwise-disjoint finite point sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitFamily {
    sets: Vec<BTreeSet<GroupElement>>,
    index: HashMap<GroupElement, usize>,
}

impl ExplicitFamily {
    pub fn new(sets: Vec<BTreeSet<GroupElement>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidCover(format!("set {i} is empty")));
            }
            for x in s {
                if let Some(j) = index.insert(x.clone(), i) {
                    return Err(Error::InvalidCover(format!("element {x} lies in sets {j} and {i}")));
                }
            }
        }
        Ok(ExplicitFamily { sets, index })
    }

    pub fn sets(&self) -> &[BTreeSet<GroupElement>] {
        &self.sets
    }

    pub fn set_of(&self, x: &GroupElement) -> Option<usize> {
        self.index.get(x).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Interval(IntervalFamily),
    Product(ProductFamily),
    Explicit(ExplicitFamily),
}

/// Identifies one set of a family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetKey {
    Block(Vec<i64>),
    Index(usize),
}

impl Family {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Family::Interval(_) => "interval",
            Family::Product(_) => "product",
            Family::Explicit(_) => "explicit",
        }
    }

    /// Key of the set containing `x`, or `None` when `x` is in no set.
    pub fn set_of(&self, x: &GroupElement) -> Result<Option<SetKey>> {
        match self {
            Family::Interval(f) => match x {
                GroupElement::Vector(v) if v.len() == 1 => Ok(f.block_of(v[0]).map(|k| SetKey::Block(vec![k]))),
                _ => Err(Error::KindMismatch(format!("interval families live on Z, got {x}"))),
            },
            Family::Product(f) => match x {
                GroupElement::Vector(v) if v.len() == f.factors.len() => Ok(f
                    .factors
                    .iter()
                    .zip(v)
                    .map(|(g, &n)| g.block_of(n))
                    .collect::<Option<Vec<_>>>()
                    .map(SetKey::Block)),
                _ => Err(Error::KindMismatch(format!(
                    "product family lives on Z^{}, got {x}",
                    f.factors.len()
                ))),
            },
            Family::Explicit(f) => Ok(f.set_of(x).map(SetKey::Index)),
        }
    }

    /// Closed-form `(diameter, separation)` for symbolic families.
    pub fn closed_form(&self) -> Option<(u64, Option<u64>)> {
        match self {
            Family::Interval(f) => Some((f.diameter(), Some(f.separation()))),
            Family::Product(f) => Some((f.diameter(), f.separation())),
            Family::Explicit(_) => None,
        }
    }

    /// Number of points of each set, for symbolic families.
    fn set_size(&self) -> Option<u128> {
        match self {
            Family::Interval(f) => Some(f.length as u128),
            Family::Product(f) => Some(f.set_size()),
            Family::Explicit(_) => None,
        }
    }

    fn factors(&self) -> Option<Vec<IntervalFamily>> {
        match self {
            Family::Interval(f) => Some(vec![f.clone()]),
            Family::Product(f) => Some(f.factors.clone()),
            Family::Explicit(_) => None,
        }
    }
}

/// Families claimed `scale`-disjoint and `bound`-bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    scale: BigRational,
    bound: BigRational,
    families: Vec<Family>,
}

impl CoverCertificate {
    pub fn new(scale: BigRational, bound: BigRational, families: Vec<Family>) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidCover("scale d must be positive".into()));
        }
        if bound.is_negative() {
            return Err(Error::InvalidCover("bound R must be nonnegative".into()));
        }
        if families.is_empty() {
            return Err(Error::InvalidCover("a cover needs at least one family".into()));
        }
        Ok(CoverCertificate { scale, bound, families })
    }

    /// The one-point cover of `Z⁰`, neutral for [`product_cover`].
    pub fn point() -> Self {
        CoverCertificate {
            scale: BigRational::from_integer(BigInt::from(1)),
            bound: BigRational::zero(),
            families: vec![Family::Product(ProductFamily::new(Vec::new()))],
        }
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn bound(&self) -> &BigRational {
        &self.bound
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn with_bound(mut self, bound: BigRational) -> Result<Self> {
        if bound.is_negative() {
            return Err(Error::InvalidCover("bound R must be nonnegative".into()));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn with_scale(mut self, scale: BigRational) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidCover("scale d must be positive".into()));
        }
        self.scale = scale;
        Ok(self)
    }

    /// Rank `n` when every family is symbolic on `Zⁿ`.
    pub fn symbolic_rank(&self) -> Option<usize> {
        let ranks: Option<Vec<usize>> = self.families.iter().map(|f| f.factors().map(|v| v.len())).collect();
        let ranks = ranks?;
        let first = *ranks.first()?;
        ranks.iter().all(|&r| r == first).then_some(first)
    }
}

/// Two interval families of blocks of `d + 1` integers with period
/// `2(d + 1)`, offset by `d + 1`: a `d`-disjoint, `d`-bounded cover of Z.
pub fn make_interval_cover(d: u64) -> Result<CoverCertificate> {
    if d == 0 {
        return Err(Error::InvalidCover("d must be at least 1".into()));
    }
    let len = d.checked_add(1).ok_or(Error::Overflow("interval length"))?;
    let period = len.checked_mul(2).ok_or(Error::Overflow("interval period"))?;
    let offset = i64::try_from(len).map_err(|_| Error::Overflow("interval offset"))?;
    CoverCertificate::new(
        BigRational::from_integer(BigInt::from(d)),
        BigRational::from_integer(BigInt::from(d)),
        vec![
            Family::Interval(IntervalFamily::new(len, period, 0)?),
            Family::Interval(IntervalFamily::new(len, period, offset)?),
        ],
    )
}

/// Product cover of `Z^{p+q}` from covers of `Zᵖ` and `Z^q`: families
/// indexed by pairs in row-major order, scale the smaller scale, bound the
/// sum of bounds. A rank-zero factor is neutral.
pub fn product_cover(a: &CoverCertificate, b: &CoverCertificate) -> Result<CoverCertificate> {
    let ra = a
        .symbolic_rank()
        .ok_or_else(|| Error::Unsupported("product covers need symbolic families of a common rank".into()))?;
    let rb = b
        .symbolic_rank()
        .ok_or_else(|| Error::Unsupported("product covers need symbolic families of a common rank".into()))?;
    let scale = match (ra, rb) {
        (0, _) => b.scale.clone(),
        (_, 0) => a.scale.clone(),
        _ => a.scale.clone().min(b.scale.clone()),
    };
    let mut families = Vec::with_capacity(a.families.len() * b.families.len());
    for fa in &a.families {
        for fb in &b.families {
            let mut factors = fa.factors().expect("symbolic");
            factors.extend(fb.factors().expect("symbolic"));
            families.push(Family::Product(ProductFamily::new(factors)));
        }
    }
    CoverCertificate::new(scale, &a.bound + &b.bound, families)
}

/// Pushes a cover of the source group forward along an injective abelian
/// homomorphism, as explicit families on the target ball of `radius`. Scale
/// and bound are copied; the caller restates them in the target metric.
pub fn transport_cover(
    cert: &CoverCertificate,
    hom: &Homomorphism,
    ctx: &MetricContext,
    radius: &BigRational,
) -> Result<CoverCertificate> {
    if hom.target() != ctx.group() {
        return Err(Error::KindMismatch(
            "homomorphism target differs from the metric's group".into(),
        ));
    }
    let pre = Preimage::new(hom)
        .ok_or_else(|| Error::Unsupported("transport needs an injective homomorphism between abelian groups".into()))?;
    let ball = ctx.ball_with_norms(radius)?;
    let mut sets: Vec<BTreeMap<SetKey, BTreeSet<GroupElement>>> = vec![BTreeMap::new(); cert.families.len()];
    for y in ball.elements() {
        let Some(x) = pre.preimage(y)? else { continue };
        for (family, out) in cert.families.iter().zip(sets.iter_mut()) {
            if let Some(key) = family.set_of(&x)? {
                out.entry(key).or_default().insert(y.clone());
            }
        }
    }
    let families = sets
        .into_iter()
        .map(|m| ExplicitFamily::new(m.into_values().collect()).map(Family::Explicit))
        .collect::<Result<Vec<_>>>()?;
    CoverCertificate::new(cert.scale.clone(), cert.bound.clone(), families)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::rational::int;
    use GroupElement::Vector;

    #[test]
    fn interval_membership() {
        let f = IntervalFamily::new(6, 12, 6).unwrap();
        assert_eq!(f.block_of(5), None);
        assert_eq!(f.block_of(6), Some(0));
        assert_eq!(f.block_of(11), Some(0));
        assert_eq!(f.block_of(-1), Some(-1));
        assert_eq!(f.block_of(-7), None);
        assert_eq!(f.block_bounds(-1), (-6, -1));
        assert_eq!((f.diameter(), f.separation()), (5, 7));
        assert!(IntervalFamily::new(3, 3, 0).is_err());
    }

    #[test]
    fn interval_cover_partitions_z() {
        for d in [1u64, 2, 5] {
            let c = make_interval_cover(d).unwrap();
            for n in -100..=100 {
                let hits = c
                    .families()
                    .iter()
                    .filter(|f| f.set_of(&Vector(vec![n])).unwrap().is_some())
                    .count();
                assert_eq!(hits, 1, "d={d} n={n}");
            }
        }
        let c = make_interval_cover(1).unwrap();
        match &c.families()[0] {
            Family::Interval(f) => assert_eq!((f.length(), f.period()), (2, 4)),
            _ => unreachable!(),
        }
        assert_eq!(c.bound(), &int(1));
    }

    #[test]
    fn product_rules() {
        let a = make_interval_cover(5).unwrap();
        let p = product_cover(&a, &a).unwrap();
        assert_eq!(p.families().len(), 4);
        assert_eq!((p.scale().clone(), p.bound().clone()), (int(5), int(10)));
        assert_eq!(p.symbolic_rank(), Some(2));

        let q = product_cover(&CoverCertificate::point(), &a).unwrap();
        assert_eq!(q.families().len(), 2);
        assert_eq!((q.scale().clone(), q.bound().clone()), (int(5), int(5)));

        let b = make_interval_cover(2).unwrap();
        let c = make_interval_cover(3).unwrap();
        let left = product_cover(&product_cover(&a, &b).unwrap(), &c).unwrap();
        let right = product_cover(&a, &product_cover(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn explicit_sets_must_be_disjoint() {
        let s = |v: &[i64]| v.iter().map(|&n| Vector(vec![n])).collect::<BTreeSet<_>>();
        assert!(ExplicitFamily::new(vec![s(&[0, 1]), s(&[1, 2])]).is_err());
        assert!(ExplicitFamily::new(vec![s(&[])]).is_err());
        let f = ExplicitFamily::new(vec![s(&[0, 1]), s(&[5])]).unwrap();
        assert_eq!(f.set_of(&Vector(vec![5])), Some(1));
    }

    #[test]
    fn transport_along_multiplication() {
        let z = GroupSpec::FreeAbelian { rank: 1 };
        let times5 = Homomorphism::new(z.clone(), z.clone(), vec![Vector(vec![5])]).unwrap();
        let ctx = MetricContext::standard(z).unwrap();
        let cert = make_interval_cover(1).unwrap();
        let moved = transport_cover(&cert, &times5, &ctx, &int(12)).unwrap();
        let sets = |i: usize| -> Vec<Vec<i64>> {
            let Family::Explicit(f) = &moved.families()[i] else {
                unreachable!()
            };
            f.sets()
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|x| match x {
                            Vector(v) => v[0],
                            _ => unreachable!(),
                        })
                        .collect()
                })
                .collect()
        };
        assert_eq!(sets(0), vec![vec![0, 5]]);
        assert_eq!(sets(1), vec![vec![-10, -5], vec![10]]);
    }
}
