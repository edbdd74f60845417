//! Pointwise verification of cover certificates on finite regions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{CoverCertificate, SetKey};
use crate::error::Result;
use crate::group::GroupElement;
use crate::metric::MetricContext;

/// Two points of distinct sets of one family at distance at most the scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessViolation {
    pub family: usize,
    pub x: GroupElement,
    pub y: GroupElement,
    pub distance: BigRational,
}

/// A set whose diameter (restricted to the region) exceeds the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub family: usize,
    /// Least element of the set within the region.
    pub representative: GroupElement,
    pub diameter: BigRational,
}

/// Closed-form values of a symbolic family against values measured in the
/// region. Measured diameters use sets lying entirely inside the region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicCheck {
    pub family: usize,
    pub closed_diameter: BigRational,
    pub measured_diameter: Option<BigRational>,
    pub closed_separation: Option<BigRational>,
    pub measured_separation: Option<BigRational>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub region_size: usize,
    pub scale: BigRational,
    pub bound: BigRational,
    /// Pairs at distance `≤ d`: violations of strict `d`-disjointness.
    pub disjointness_violations: Vec<DisjointnessViolation>,
    /// Pairs at distance `< d`: violations of the non-strict convention.
    pub nonstrict_violations: usize,
    pub max_diameter: BigRational,
    pub bound_violations: Vec<BoundViolation>,
    pub coverage_gaps: Vec<GroupElement>,
    pub symbolic_checks: Vec<SymbolicCheck>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.disjointness_violations.is_empty()
            && self.bound_violations.is_empty()
            && self.coverage_gaps.is_empty()
            && self.symbolic_checks.iter().all(|c| c.agrees)
    }
}

/// Verifies `cert` on the closed ball of radius `radius` at the identity.
pub fn verify_families(cert: &CoverCertificate, ctx: &MetricContext, radius: &BigRational) -> Result<VerifyReport> {
    let ball = ctx.ball_with_norms(radius)?;
    let region: Vec<GroupElement> = ball.elements().cloned().collect();
    verify_on_region(cert, ctx, &region)
}

/// Verifies `cert` on an arbitrary finite region: disjointness and diameters
/// are measured between region points only, and every region point must lie
/// in some set.
pub fn verify_on_region(cert: &CoverCertificate, ctx: &MetricContext, region: &[GroupElement]) -> Result<VerifyReport> {
    let group = ctx.group();
    for x in region {
        group.check(x)?;
    }
    let position: HashMap<&GroupElement, usize> = region.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let scale = cert.scale();
    let near = ctx.ball_with_norms(scale)?;

    let keys: Vec<Vec<Option<SetKey>>> = cert
        .families()
        .iter()
        .map(|f| region.par_iter().map(|x| f.set_of(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let coverage_gaps: Vec<GroupElement> = region
        .iter()
        .enumerate()
        .filter(|(i, _)| keys.iter().all(|k| k[*i].is_none()))
        .map(|(_, x)| x.clone())
        .collect();

    let mut disjointness_violations = Vec::new();
    let mut nonstrict_violations = 0;
    for (fi, fkeys) in keys.iter().enumerate() {
        let found: Vec<Vec<(usize, BigRational)>> = region
            .par_iter()
            .enumerate()
            .map(|(i, x)| -> Result<Vec<(usize, BigRational)>> {
                let Some(kx) = &fkeys[i] else { return Ok(Vec::new()) };
                let mut out = Vec::new();
                for (g, w) in near.entries() {
                    if w.is_zero() {
                        continue;
                    }
                    let y = group.multiply(x, g)?;
                    if let Some(&j) = position.get(&y) {
                        if j > i && fkeys[j].as_ref().is_some_and(|ky| ky != kx) {
                            out.push((j, w.clone()));
                        }
                    }
                }
                out.sort_by_key(|&(j, _)| j);
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for (i, pairs) in found.into_iter().enumerate() {
            for (j, w) in pairs {
                if &w < scale {
                    nonstrict_violations += 1;
                }
                disjointness_violations.push(DisjointnessViolation {
                    family: fi,
                    x: region[i].clone(),
                    y: region[j].clone(),
                    distance: w,
                });
            }
        }
    }

    let mut max_diameter = BigRational::zero();
    let mut bound_violations = Vec::new();
    let mut symbolic_checks = Vec::new();
    for (fi, (family, fkeys)) in cert.families().iter().zip(&keys).enumerate() {
        let mut sets: BTreeMap<&SetKey, Vec<usize>> = BTreeMap::new();
        for (i, k) in fkeys.iter().enumerate() {
            if let Some(k) = k {
                sets.entry(k).or_default().push(i);
            }
        }
        let full_size = family.set_size();
        let mut full_diameter: Option<BigRational> = None;
        for members in sets.values() {
            let diam = set_diameter(ctx, region, members)?;
            if full_size == Some(members.len() as u128) {
                full_diameter = Some(full_diameter.map_or(diam.clone(), |m| m.max(diam.clone())));
            }
            if &diam > cert.bound() {
                let representative = members.iter().map(|&i| &region[i]).min().expect("nonempty").clone();
                bound_violations.push(BoundViolation {
                    family: fi,
                    representative,
                    diameter: diam.clone(),
                });
            }
            if diam > max_diameter {
                max_diameter = diam;
            }
        }
        if let Some((closed_diam, closed_sep)) = family.closed_form() {
            let closed_diameter = BigRational::from_integer(BigInt::from(closed_diam));
            let closed_separation = closed_sep.map(|s| BigRational::from_integer(BigInt::from(s)));
            let measured_separation = match &closed_separation {
                Some(sep) => measured_separation(ctx, region, &position, fkeys, sep)?,
                None => None,
            };
            let agrees = full_diameter.as_ref().is_none_or(|m| *m == closed_diameter)
                && measured_separation
                    .as_ref()
                    .is_none_or(|m| Some(m) == closed_separation.as_ref());
            symbolic_checks.push(SymbolicCheck {
                family: fi,
                closed_diameter,
                measured_diameter: full_diameter,
                closed_separation,
                measured_separation,
                agrees,
            });
        }
    }
    bound_violations.sort_by(|a, b| (a.family, &a.representative).cmp(&(b.family, &b.representative)));

    Ok(VerifyReport {
        region_size: region.len(),
        scale: scale.clone(),
        bound: cert.bound().clone(),
        disjointness_violations,
        nonstrict_violations,
        max_diameter,
        bound_violations,
        coverage_gaps,
        symbolic_checks,
    })
}

fn set_diameter(ctx: &MetricContext, region: &[GroupElement], members: &[usize]) -> Result<BigRational> {
    let g = ctx.group();
    let mut best = BigRational::zero();
    let inverses: Vec<GroupElement> = members.iter().map(|&i| g.invert(&region[i])).collect::<Result<_>>()?;
    let norms: Vec<BigRational> = members
        .iter()
        .map(|&i| ctx.norm_within(&region[i], &norm_cap(ctx, &region[i])?))
        .collect::<Result<_>>()?;
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            let cap = &norms[a] + &norms[b];
            let d = ctx.norm_within(&g.multiply(&inverses[a], &region[members[b]])?, &cap)?;
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// A cap certainly above `‖x‖`: the explored ball grows until `x` settles.
fn norm_cap(ctx: &MetricContext, x: &GroupElement) -> Result<BigRational> {
    let mut cap = ctx
        .weights()
        .min_weight()
        .cloned()
        .unwrap_or_else(|| BigRational::from_integer(BigInt::from(1)));
    loop {
        if let crate::metric::CappedNorm::Exact(v) = ctx.norm(x, &cap)? {
            return Ok(v);
        }
        cap = &cap * BigRational::from_integer(BigInt::from(2));
    }
}

/// Least distance between region points of distinct sets, searched up to
/// `limit`; `None` when no such pair is that close.
fn measured_separation(
    ctx: &MetricContext,
    region: &[GroupElement],
    position: &HashMap<&GroupElement, usize>,
    keys: &[Option<SetKey>],
    limit: &BigRational,
) -> Result<Option<BigRational>> {
    let group = ctx.group();
    let near = ctx.ball_unchecked(limit)?;
    let mins: Vec<Option<BigRational>> = region
        .par_iter()
        .enumerate()
        .map(|(i, x)| -> Result<Option<BigRational>> {
            let Some(kx) = &keys[i] else { return Ok(None) };
            for (g, w) in near.entries() {
                if w.is_zero() {
                    continue;
                }
                let y = group.multiply(x, g)?;
                if let Some(&j) = position.get(&y) {
                    if keys[j].as_ref().is_some_and(|ky| ky != kx) {
                        // entries are sorted by norm, so the first hit is minimal
                        return Ok(Some(w.clone()));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(mins.into_iter().flatten().min())
}
