//! Extending a cover of the subgroup generated by short generators to the
//! whole group by translating it along coset representatives.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::{verify_families, verify_on_region, CoverCertificate, ExplicitFamily, Family, SetKey, VerifyReport};
use crate::abelian::{IntegerMatrix, PresentedAbelian};
use crate::error::{Error, Result};
use crate::group::{abelian_coords, AbelianCoords, GroupElement};
use crate::metric::MetricContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    /// Generators of weight at most the scale.
    pub short_generators: Vec<GroupElement>,
    /// Minimal-norm representative of each coset meeting the region, in
    /// ball order.
    pub representatives: Vec<GroupElement>,
    /// The input cover checked on the subgroup within twice the radius.
    pub input_report: VerifyReport,
    pub certificate: CoverCertificate,
    pub output_report: VerifyReport,
    /// Set when the short generators generate the whole group.
    pub degenerate: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CosetKey {
    Element(GroupElement),
    Coords(Vec<BigInt>),
    Whole,
}

enum CosetKeyer {
    Trivial,
    Whole,
    Abelian {
        coords: AbelianCoords,
        quotient: PresentedAbelian,
    },
}

impl CosetKeyer {
    fn new(ctx: &MetricContext, short: &[GroupElement]) -> Result<Self> {
        let group = ctx.group();
        if short.is_empty() {
            return Ok(CosetKeyer::Trivial);
        }
        if short.len() == ctx.weights().entries().len() {
            return Ok(CosetKeyer::Whole);
        }
        let coords = abelian_coords(group).ok_or_else(|| {
            Error::Unsupported(format!(
                "coset keys for a proper subgroup of {} are only available for abelian groups",
                group.kind_name()
            ))
        })?;
        let m = coords.dimension();
        if m == 0 {
            return Ok(CosetKeyer::Whole);
        }
        let mut rows: Vec<Vec<BigInt>> = short
            .iter()
            .map(|t| coords.coords(t).ok_or_else(|| Error::KindMismatch(format!("{t}"))))
            .collect::<Result<_>>()?;
        rows.extend(coords.lattice.to_rows());
        let quotient = PresentedAbelian::new(m, IntegerMatrix::from_rows(m, &rows)?)?;
        Ok(CosetKeyer::Abelian { coords, quotient })
    }

    fn key(&self, x: &GroupElement) -> Result<CosetKey> {
        Ok(match self {
            CosetKeyer::Trivial => CosetKey::Element(x.clone()),
            CosetKeyer::Whole => CosetKey::Whole,
            CosetKeyer::Abelian { coords, quotient } => {
                let c = coords.coords(x).ok_or_else(|| Error::KindMismatch(format!("{x}")))?;
                CosetKey::Coords(quotient.canonicalize(&c))
            }
        })
    }
}

/// Builds families `{zU}` from a cover of `F = ⟨T⟩`, `T` the generators of
/// weight at most `d`, with `z` ranging over minimal-norm coset
/// representatives, clipped to the ball of radius `radius`. Points of
/// distinct cosets are then more than `d` apart.
///
/// The input is first verified on `F ∩ B_{2·radius}` (every translate
/// `z⁻¹y` of a region point lies there), then the output on the ball.
pub fn extend_cover_by_cosets(
    ctx: &MetricContext,
    d: &BigRational,
    input: &CoverCertificate,
    radius: &BigRational,
) -> Result<ExtensionReport> {
    if !d.is_positive() {
        return Err(Error::InvalidArgument("scale d must be positive".into()));
    }
    if radius.is_negative() {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    let group = ctx.group();
    let short = ctx.weights().generators_within(d);
    let keyer = CosetKeyer::new(ctx, &short)?;
    let degenerate = matches!(keyer, CosetKeyer::Whole)
        .then(|| "the short generators generate the whole group: a single coset".to_string());

    let home = keyer.key(&group.identity())?;
    let double = radius * BigRational::from_integer(BigInt::from(2));
    let wide = ctx.ball_with_norms(&double)?;
    let mut subgroup_region = Vec::new();
    for x in wide.elements() {
        if keyer.key(x)? == home {
            subgroup_region.push(x.clone());
        }
    }
    let input_cert = input.clone().with_scale(d.clone())?;
    let input_report = verify_on_region(&input_cert, ctx, &subgroup_region)?;

    let ball = ctx.ball_with_norms(radius)?;
    let mut rep_of: HashMap<CosetKey, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut out: Vec<BTreeMap<(usize, SetKey), BTreeSet<GroupElement>>> = vec![BTreeMap::new(); input.families().len()];
    for y in ball.elements() {
        let key = keyer.key(y)?;
        let r = *rep_of.entry(key).or_insert_with(|| {
            representatives.push(y.clone());
            representatives.len() - 1
        });
        let z = &representatives[r];
        let u = group.multiply(&group.invert(z)?, y)?;
        for (family, sets) in input.families().iter().zip(out.iter_mut()) {
            if let Some(k) = family.set_of(&u)? {
                sets.entry((r, k)).or_default().insert(y.clone());
            }
        }
    }
    let families = out
        .into_iter()
        .map(|m| ExplicitFamily::new(m.into_values().collect()).map(Family::Explicit))
        .collect::<Result<Vec<_>>>()?;
    let certificate = CoverCertificate::new(d.clone(), input.bound().clone(), families)?;
    let output_report = verify_families(&certificate, ctx, radius)?;
    Ok(ExtensionReport {
        short_generators: short,
        representatives,
        input_report,
        certificate,
        output_report,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{make_interval_cover, transport_cover};
    use crate::group::{GroupSpec, Homomorphism};
    use crate::metric::WeightFunction;
    use crate::rational::{frac, int};
    use GroupElement::{Rational, Vector};

    #[test]
    fn five_z_inside_z() {
        let z = GroupSpec::FreeAbelian { rank: 1 };
        let w = WeightFunction::new(z.clone(), vec![(Vector(vec![5]), int(1)), (Vector(vec![1]), int(10))]).unwrap();
        let ctx = MetricContext::new(w);
        let incl = Homomorphism::new(z.clone(), z, vec![Vector(vec![5])]).unwrap();
        let input = transport_cover(&make_interval_cover(5).unwrap(), &incl, &ctx, &int(120))
            .unwrap()
            .with_bound(int(25))
            .unwrap();
        let rep = extend_cover_by_cosets(&ctx, &int(5), &input, &int(60)).unwrap();
        assert_eq!(rep.short_generators, vec![Vector(vec![-5]), Vector(vec![5])]);
        assert!(rep.input_report.is_clean(), "{:?}", rep.input_report);
        assert!(rep.output_report.is_clean(), "{:?}", rep.output_report);
        let mut reps: Vec<i64> = rep
            .representatives
            .iter()
            .map(|x| match x {
                Vector(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        reps.sort();
        assert_eq!(reps, vec![-2, -1, 0, 1, 2]);
        assert!(rep.degenerate.is_none());
    }

    #[test]
    fn truncated_rationals_half_integers() {
        let q3 = GroupSpec::RationalsTruncated { depth: 3 };
        let ctx = MetricContext::intrinsic(WeightFunction::standard(q3.clone()).unwrap());
        let half = Homomorphism::new(GroupSpec::FreeAbelian { rank: 1 }, q3, vec![Rational(frac(1, 2))]).unwrap();
        let input = transport_cover(&make_interval_cover(3).unwrap(), &half, &ctx, &int(16)).unwrap();
        let rep = extend_cover_by_cosets(&ctx, &frac(5, 2), &input, &int(8)).unwrap();
        assert_eq!(rep.short_generators.len(), 4);
        assert!(rep.input_report.is_clean(), "{:?}", rep.input_report);
        assert!(rep.output_report.is_clean(), "{:?}", rep.output_report);
        assert_eq!(rep.representatives.len(), 3);
    }

    #[test]
    fn scale_below_every_weight_gives_singletons() {
        let z = GroupSpec::FreeAbelian { rank: 1 };
        let ctx = MetricContext::standard(z).unwrap();
        let point = ExplicitFamily::new(vec![[Vector(vec![0])].into_iter().collect()]).unwrap();
        let input = CoverCertificate::new(frac(1, 2), int(0), vec![Family::Explicit(point)]).unwrap();
        let rep = extend_cover_by_cosets(&ctx, &frac(1, 2), &input, &int(4)).unwrap();
        assert!(rep.output_report.is_clean());
        assert_eq!(rep.representatives.len(), 9);
        let Family::Explicit(f) = &rep.certificate.families()[0] else {
            unreachable!()
        };
        assert!(f.sets().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn whole_group_is_degenerate_but_legal() {
        let z = GroupSpec::FreeAbelian { rank: 1 };
        let ctx = MetricContext::standard(z).unwrap();
        let rep = extend_cover_by_cosets(&ctx, &int(2), &make_interval_cover(2).unwrap(), &int(20)).unwrap();
        assert!(rep.degenerate.is_some());
        assert_eq!(rep.representatives.len(), 1);
        assert!(rep.output_report.is_clean());
    }

    #[test]
    fn nonabelian_proper_subgroup_is_unsupported() {
        let w = WeightFunction::new(
            GroupSpec::Heisenberg,
            vec![
                (GroupElement::Triple(1, 0, 0), int(1)),
                (GroupElement::Triple(0, 1, 0), int(3)),
            ],
        )
        .unwrap();
        let ctx = MetricContext::new(w);
        let r = extend_cover_by_cosets(&ctx, &int(2), &CoverCertificate::point(), &int(2));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
