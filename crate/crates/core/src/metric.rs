//! Weighted word norms, closed balls, coarse-equivalence profiles and
//! R-stabilizers.
//!
//! A [`WeightFunction`] assigns positive rational weights to a symmetric
//! finite generating set. The norm of `x` is the least total weight of a
//! factorization of `x` into generators; it is computed by best-first search
//! over the implicit weighted Cayley graph (right multiplication by
//! generators), ordered by exact cost with ties broken by the canonical
//! element key. The search state is kept inside the [`MetricContext`] and
//! extended monotonically, so repeated queries only pay for new territory.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::abelian::{left_kernel, matrix_rank, solve_left};
use crate::error::{Error, Result};
use crate::group::{abelian_coords, GroupElement, GroupSpec, Homomorphism};
use crate::rational::format_rational;

/// Upper limit on settled states per context.
pub const DEFAULT_STATE_LIMIT: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    group: GroupSpec,
    entries: Vec<(GroupElement, BigRational)>,
    symmetrized: bool,
    /// Lower bound on the weight of any generator omitted by a truncated
    /// rational generating set; `None` when nothing is truncated.
    omitted_floor: Option<BigRational>,
}

impl WeightFunction {
    /// Builds a weight function from `(generator, weight)` pairs, adding
    /// missing inverses with the same weight.
    pub fn new(group: GroupSpec, entries: Vec<(GroupElement, BigRational)>) -> Result<Self> {
        group.validate()?;
        let mut table: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
        for (g, w) in &entries {
            insert_weight(&group, &mut table, g, w)?;
        }
        let given = table.len();
        for (g, w) in entries {
            let inv = group.invert(&g)?;
            insert_weight(&group, &mut table, &inv, &w)?;
        }
        let symmetrized = table.len() != given;
        let entries: Vec<_> = table.into_iter().collect();
        if entries.is_empty() && group.generators().iter().any(|g| *g != group.identity()) {
            return Err(Error::InvalidWeights("empty generating set".into()));
        }
        let omitted_floor = if contains_truncated_rationals(&group) {
            check_truncation_order(&group, &entries)?;
            entries.iter().map(|(_, w)| w.clone()).max()
        } else {
            None
        };
        Ok(WeightFunction {
            group,
            entries,
            symmetrized,
            omitted_floor,
        })
    }

    /// Default generating set with default weights: unit weights, except
    /// `w(±1/n!) = n` on truncated rationals.
    pub fn standard(group: GroupSpec) -> Result<Self> {
        Self::standard_scaled(group, BigRational::one())
    }

    /// Default generating set with every default weight multiplied by
    /// `factor`.
    pub fn standard_scaled(group: GroupSpec, factor: BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidWeights("weights must be positive".into()));
        }
        let mut entries = Vec::new();
        default_entries(&group, &mut entries, &group.identity(), &mut |x| Ok(x.clone()))?;
        let entries: Vec<_> = entries
            .into_iter()
            .filter(|(g, _)| *g != group.identity())
            .map(|(g, w)| (g, w * &factor))
            .collect();
        let mut wf = Self::new(group.clone(), entries)?;
        wf.omitted_floor = default_floor(&group).map(|f| f * &factor);
        Ok(wf)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Symmetric generating set with weights, sorted by element key.
    pub fn entries(&self) -> &[(GroupElement, BigRational)] {
        &self.entries
    }

    /// Whether inverses had to be added to the given entries.
    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn omitted_floor(&self) -> Option<&BigRational> {
        self.omitted_floor.as_ref()
    }

    pub fn weight_of(&self, g: &GroupElement) -> Option<&BigRational> {
        self.entries.iter().find(|(s, _)| s == g).map(|(_, w)| w)
    }

    pub fn min_weight(&self) -> Option<&BigRational> {
        self.entries.iter().map(|(_, w)| w).min()
    }

    /// Generators of weight at most `d`.
    pub fn generators_within(&self, d: &BigRational) -> Vec<GroupElement> {
        self.entries
            .iter()
            .filter(|(_, w)| w <= d)
            .map(|(g, _)| g.clone())
            .collect()
    }
}

fn insert_weight(
    group: &GroupSpec,
    table: &mut BTreeMap<GroupElement, BigRational>,
    g: &GroupElement,
    w: &BigRational,
) -> Result<()> {
    group
        .check(g)
        .map_err(|_| Error::InvalidWeights(format!("generator {g} is not an element of {}", group.kind_name())))?;
    if *g == group.identity() {
        return Err(Error::InvalidWeights("the identity cannot be a generator".into()));
    }
    if !w.is_positive() {
        return Err(Error::InvalidWeights("weights must be positive".into()));
    }
    match table.get(g) {
        Some(existing) if existing != w => Err(Error::InvalidWeights(format!(
            "generator {g} has conflicting weights {} and {} (weights must satisfy w(s⁻¹) = w(s))",
            format_rational(existing),
            format_rational(w)
        ))),
        Some(_) => Ok(()),
        None => {
            table.insert(g.clone(), w.clone());
            Ok(())
        }
    }
}

fn contains_truncated_rationals(group: &GroupSpec) -> bool {
    match group {
        GroupSpec::RationalsTruncated { .. } => true,
        GroupSpec::DirectProduct(fs) => fs.iter().any(contains_truncated_rationals),
        _ => false,
    }
}

fn default_floor(group: &GroupSpec) -> Option<BigRational> {
    match group {
        GroupSpec::RationalsTruncated { depth } => Some(BigRational::from_integer(BigInt::from(depth + 1))),
        GroupSpec::DirectProduct(fs) => fs.iter().filter_map(default_floor).min(),
        _ => None,
    }
}

/// Smallest `n` with `denominator | n!`.
fn truncation_index(q: &BigRational) -> u32 {
    use num_integer::Integer;
    let mut n = 1u32;
    let mut fact = BigInt::one();
    while !fact.is_multiple_of(q.denom()) {
        n += 1;
        fact *= BigInt::from(n);
    }
    n
}

/// Rational components must get strictly larger weights at deeper
/// truncation indices: the finite shadow of `w → ∞`.
fn check_truncation_order(group: &GroupSpec, entries: &[(GroupElement, BigRational)]) -> Result<()> {
    let GroupSpec::RationalsTruncated { .. } = group else {
        return Ok(());
    };
    let indexed: Vec<(u32, &BigRational, &GroupElement)> = entries
        .iter()
        .map(|(g, w)| match g {
            GroupElement::Rational(q) => (truncation_index(q), w, g),
            _ => unreachable!("checked by insert_weight"),
        })
        .collect();
    for (i, wi, gi) in &indexed {
        for (j, wj, gj) in &indexed {
            if i < j && wi >= wj {
                return Err(Error::InvalidWeights(format!(
                    "weights must increase with the truncation index: w({gi}) = {} but w({gj}) = {}",
                    format_rational(wi),
                    format_rational(wj)
                )));
            }
        }
    }
    Ok(())
}

fn default_entries(
    group: &GroupSpec,
    out: &mut Vec<(GroupElement, BigRational)>,
    _id: &GroupElement,
    embed: &mut dyn FnMut(&GroupElement) -> Result<GroupElement>,
) -> Result<()> {
    let one = BigRational::one();
    match group {
        GroupSpec::RationalsTruncated { .. } => {
            for (n, g) in group.generators().iter().enumerate() {
                let w = BigRational::from_integer(BigInt::from(n as u64 + 1));
                out.push((embed(g)?, w.clone()));
                out.push((embed(&group.invert(g)?)?, w));
            }
        }
        GroupSpec::DirectProduct(fs) => {
            let ids: Vec<GroupElement> = fs.iter().map(GroupSpec::identity).collect();
            for (i, f) in fs.iter().enumerate() {
                let mut local = Vec::new();
                default_entries(f, &mut local, &f.identity(), &mut |x| Ok(x.clone()))?;
                for (g, w) in local {
                    if g == f.identity() {
                        continue;
                    }
                    let mut t = ids.clone();
                    t[i] = g;
                    out.push((embed(&GroupElement::Tuple(t))?, w));
                }
            }
        }
        _ => {
            for g in group.generators() {
                if g == group.identity() {
                    continue;
                }
                out.push((embed(&g)?, one.clone()));
                out.push((embed(&group.invert(&g)?)?, one.clone()));
            }
        }
    }
    Ok(())
}

/// Whether `ball` checks that the truncated rational generating set is deep
/// enough for the requested radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationPolicy {
    /// Treat truncated rationals as a window onto Q: refuse radii at which an
    /// omitted generator could be shorter than the radius.
    Checked,
    /// Treat the truncated group as a group in its own right.
    Intrinsic,
}

/// Result of a capped norm or distance query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CappedNorm {
    Exact(BigRational),
    ExceedsCap,
}

impl CappedNorm {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            CappedNorm::Exact(v) => Some(v),
            CappedNorm::ExceedsCap => None,
        }
    }
}

/// A closed ball at the identity: elements with their norms, sorted by
/// `(norm, element key)`.
#[derive(Debug)]
pub struct Ball {
    radius: BigRational,
    entries: Vec<(GroupElement, BigRational)>,
    index: HashMap<GroupElement, usize>,
}

impl Ball {
    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn entries(&self) -> &[(GroupElement, BigRational)] {
        &self.entries
    }

    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.entries.iter().map(|(g, _)| g)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, x: &GroupElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn norm_of(&self, x: &GroupElement) -> Option<&BigRational> {
        self.position(x).map(|i| &self.entries[i].1)
    }

    /// Largest norm occurring in the ball.
    pub fn max_norm(&self) -> BigRational {
        self.entries
            .last()
            .map(|(_, n)| n.clone())
            .unwrap_or_else(BigRational::zero)
    }
}

struct Explorer {
    generators: Vec<(GroupElement, BigRational)>,
    best: HashMap<GroupElement, BigRational>,
    settled: HashMap<GroupElement, BigRational>,
    order: Vec<(BigRational, GroupElement)>,
    frontier: BinaryHeap<Reverse<(BigRational, GroupElement)>>,
    state_limit: usize,
}

impl Explorer {
    fn new(group: &GroupSpec, generators: Vec<(GroupElement, BigRational)>) -> Self {
        let e = group.identity();
        let mut frontier = BinaryHeap::new();
        frontier.push(Reverse((BigRational::zero(), e.clone())));
        let mut best = HashMap::new();
        best.insert(e, BigRational::zero());
        Explorer {
            generators,
            best,
            settled: HashMap::new(),
            order: Vec::new(),
            frontier,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }

    /// Cost of the cheapest unsettled frontier state.
    fn peek_cost(&mut self) -> Option<BigRational> {
        while let Some(Reverse((_, x))) = self.frontier.peek() {
            if self.settled.contains_key(x) {
                self.frontier.pop();
            } else {
                break;
            }
        }
        self.frontier.peek().map(|Reverse((c, _))| c.clone())
    }

    fn step(&mut self, group: &GroupSpec) -> Result<()> {
        let Some(Reverse((cost, x))) = self.frontier.pop() else {
            return Ok(());
        };
        if self.settled.contains_key(&x) {
            return Ok(());
        }
        if self.settled.len() >= self.state_limit {
            return Err(Error::SearchLimit(format!(
                "more than {} group elements explored",
                self.state_limit
            )));
        }
        for (s, w) in &self.generators {
            let y = group.multiply(&x, s)?;
            if self.settled.contains_key(&y) {
                continue;
            }
            let c = &cost + w;
            if self.best.get(&y).is_none_or(|b| c < *b) {
                self.best.insert(y.clone(), c.clone());
                self.frontier.push(Reverse((c, y)));
            }
        }
        self.best.remove(&x);
        self.settled.insert(x.clone(), cost.clone());
        self.order.push((cost, x));
        Ok(())
    }

    fn explore_through(&mut self, group: &GroupSpec, radius: &BigRational) -> Result<()> {
        while let Some(c) = self.peek_cost() {
            if c > *radius {
                break;
            }
            self.step(group)?;
        }
        Ok(())
    }
}

/// A group together with a weight function, its metric, and a cache of the
/// explored Cayley graph.
pub struct MetricContext {
    weights: WeightFunction,
    policy: TruncationPolicy,
    explorer: Mutex<Explorer>,
    balls: Mutex<BTreeMap<BigRational, Arc<Ball>>>,
}

impl std::fmt::Debug for MetricContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricContext")
            .field("weights", &self.weights)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl MetricContext {
    /// Context whose balls refuse radii the truncation cannot support.
    pub fn new(weights: WeightFunction) -> Self {
        Self::with_policy(weights, TruncationPolicy::Checked)
    }

    /// Context treating a truncated group as a group in its own right.
    pub fn intrinsic(weights: WeightFunction) -> Self {
        Self::with_policy(weights, TruncationPolicy::Intrinsic)
    }

    pub fn with_policy(weights: WeightFunction, policy: TruncationPolicy) -> Self {
        let explorer = Explorer::new(weights.group(), weights.entries().to_vec());
        MetricContext {
            weights,
            policy,
            explorer: Mutex::new(explorer),
            balls: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn standard(group: GroupSpec) -> Result<Self> {
        Ok(Self::new(WeightFunction::standard(group)?))
    }

    pub fn group(&self) -> &GroupSpec {
        self.weights.group()
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    /// Raises or lowers the limit on explored states.
    pub fn set_state_limit(&self, limit: usize) {
        self.explorer.lock().expect("explorer lock").state_limit = limit;
    }

    /// Minimal total weight of a factorization of `x`, or `ExceedsCap` when
    /// every factorization costs more than `cap`.
    pub fn norm(&self, x: &GroupElement, cap: &BigRational) -> Result<CappedNorm> {
        self.group().check(x)?;
        if cap.is_negative() {
            return Err(Error::InvalidArgument("cap must be nonnegative".into()));
        }
        let mut ex = self.explorer.lock().expect("explorer lock");
        if let Some(v) = ex.settled.get(x) {
            return Ok(if v <= cap {
                CappedNorm::Exact(v.clone())
            } else {
                CappedNorm::ExceedsCap
            });
        }
        loop {
            match ex.peek_cost() {
                Some(c) if c <= *cap => {
                    ex.step(self.group())?;
                    if let Some(v) = ex.settled.get(x) {
                        return Ok(CappedNorm::Exact(v.clone()));
                    }
                }
                _ => return Ok(CappedNorm::ExceedsCap),
            }
        }
    }

    /// `d(x, y) = ‖x⁻¹y‖`.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement, cap: &BigRational) -> Result<CappedNorm> {
        let g = self.group();
        g.check(x)?;
        g.check(y)?;
        self.norm(&g.multiply(&g.invert(x)?, y)?, cap)
    }

    /// Norm of an element known to lie within `cap`; anything else is an
    /// internal inconsistency.
    pub(crate) fn norm_within(&self, x: &GroupElement, cap: &BigRational) -> Result<BigRational> {
        match self.norm(x, cap)? {
            CappedNorm::Exact(v) => Ok(v),
            CappedNorm::ExceedsCap => Err(Error::SearchLimit(format!(
                "norm of {x} exceeds the bound {}",
                format_rational(cap)
            ))),
        }
    }

    fn check_truncation(&self, r: &BigRational) -> Result<()> {
        if self.policy == TruncationPolicy::Checked {
            if let Some(floor) = self.weights.omitted_floor() {
                if r > floor {
                    return Err(Error::TruncationTooShallow {
                        radius: format_rational(r),
                        floor: format_rational(floor),
                    });
                }
            }
        }
        Ok(())
    }

    /// Closed ball of radius `r` at the identity, sorted by
    /// `(norm, element key)`.
    pub fn ball(&self, r: &BigRational) -> Result<Vec<GroupElement>> {
        Ok(self.ball_with_norms(r)?.elements().cloned().collect())
    }

    /// Cached closed ball with norms.
    pub fn ball_with_norms(&self, r: &BigRational) -> Result<Arc<Ball>> {
        if r.is_negative() {
            return Err(Error::InvalidArgument("radius must be nonnegative".into()));
        }
        self.check_truncation(r)?;
        self.ball_unchecked(r)
    }

    pub(crate) fn ball_unchecked(&self, r: &BigRational) -> Result<Arc<Ball>> {
        if let Some(b) = self.balls.lock().expect("ball cache lock").get(r) {
            return Ok(Arc::clone(b));
        }
        let entries: Vec<(GroupElement, BigRational)> = {
            let mut ex = self.explorer.lock().expect("explorer lock");
            ex.explore_through(self.group(), r)?;
            // settle order is sorted by (cost, key) because weights are positive
            ex.order
                .iter()
                .take_while(|(c, _)| c <= r)
                .map(|(c, x)| (x.clone(), c.clone()))
                .collect()
        };
        let index = entries.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect();
        let ball = Arc::new(Ball {
            radius: r.clone(),
            entries,
            index,
        });
        self.balls
            .lock()
            .expect("ball cache lock")
            .insert(r.clone(), Arc::clone(&ball));
        Ok(ball)
    }
}

/// One row of a coarse-equivalence profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoRow {
    pub t: BigRational,
    /// `min d'(e, z)` over `z` with `d(e, z) ≥ t`; `None` when no such `z`
    /// lies in the search ball.
    pub rho1: Option<BigRational>,
    /// Every element outside the search ball provably has `d'` at least
    /// `rho1`.
    pub rho1_certified: bool,
    /// `max d'(e, z)` over `z` with `d(e, z) ≤ t`.
    pub rho2: BigRational,
}

/// Unique preimages under an injective abelian homomorphism.
pub(crate) struct Preimage {
    map: crate::abelian::IntegerMatrix,
    stacked: crate::abelian::IntegerMatrix,
    source: crate::group::AbelianCoords,
    target: crate::group::AbelianCoords,
}

impl Preimage {
    pub(crate) fn new(hom: &Homomorphism) -> Option<Self> {
        let source = abelian_coords(hom.source())?;
        let target = abelian_coords(hom.target())?;
        let (m, _) = crate::group::abelian_presentation(hom.source())?;
        // coordinates of the source must be the generator exponents
        if source.dimension() != m || source.lattice.rows() != 0 {
            return None;
        }
        let map = hom.matrix()?;
        let stacked = map.stack(&target.lattice);
        let ker = left_kernel(&stacked);
        let injective = (0..ker.rows()).all(|i| ker.row(i)[..m].iter().all(Zero::is_zero));
        if !injective || matrix_rank(&map) != m {
            return None;
        }
        Some(Preimage {
            map,
            stacked,
            source,
            target,
        })
    }

    pub(crate) fn preimage(&self, y: &GroupElement) -> Result<Option<GroupElement>> {
        let c = self
            .target
            .coords(y)
            .ok_or_else(|| Error::KindMismatch(format!("{y}")))?;
        Ok(match solve_left(&self.stacked, &c) {
            Some(sol) => Some(self.source.element(&sol[..self.map.rows()])?),
            None => None,
        })
    }
}

fn check_pair(ctx_d: &MetricContext, ctx_dprime: &MetricContext, hom: Option<&Homomorphism>) -> Result<()> {
    match hom {
        None if ctx_d.group() != ctx_dprime.group() => {
            Err(Error::KindMismatch("both metrics must live on the same group".into()))
        }
        Some(h) if h.source() != ctx_d.group() || h.target() != ctx_dprime.group() => Err(Error::KindMismatch(
            "homomorphism must map the first context's group into the second's".into(),
        )),
        _ => Ok(()),
    }
}

fn map_element(hom: Option<&Homomorphism>, x: &GroupElement) -> Result<GroupElement> {
    match hom {
        Some(h) => h.apply(x),
        None => Ok(x.clone()),
    }
}

/// `max_s ‖φ(s)‖' / w(s)` over the generators of the first context, so
/// that `d'(φx, φy) ≤ L · d(x, y)`.
fn lipschitz_constant(
    ctx_d: &MetricContext,
    ctx_dprime: &MetricContext,
    hom: Option<&Homomorphism>,
) -> Result<BigRational> {
    let mut best = BigRational::zero();
    let search_cap = ctx_dprime
        .weights()
        .entries()
        .iter()
        .map(|(_, w)| w.clone())
        .fold(BigRational::zero(), |a, b| a + b)
        * BigRational::from_integer(BigInt::from(1_000_000));
    for (s, w) in ctx_d.weights().entries() {
        let image = map_element(hom, s)?;
        let n = ctx_dprime.norm_within(&image, &search_cap)?;
        let ratio = n / w;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// The distortion functions `ρ₁(t) = min{d'(e,z) : d(e,z) ≥ t}` and
/// `ρ₂(t) = max{d'(e,z) : d(e,z) ≤ t}` for the identity map between two
/// metrics on one group, or for a homomorphism between two groups.
///
/// `ρ₂` is exact. `ρ₁` is the minimum over the search ball; it is
/// certified when every element with smaller `d'` lies inside that ball.
pub fn rho_profile(
    ctx_d: &MetricContext,
    ctx_dprime: &MetricContext,
    hom: Option<&Homomorphism>,
    t_values: &[BigRational],
    search_radius: &BigRational,
) -> Result<Vec<RhoRow>> {
    check_pair(ctx_d, ctx_dprime, hom)?;
    if let Some(t) = t_values.iter().find(|t| *t > search_radius || t.is_negative()) {
        return Err(Error::InvalidArgument(format!(
            "t = {} lies outside [0, search radius {}]",
            format_rational(t),
            format_rational(search_radius)
        )));
    }
    let ball = ctx_d.ball_with_norms(search_radius)?;
    let lip = lipschitz_constant(ctx_d, ctx_dprime, hom)?;
    let mut table: Vec<(BigRational, BigRational)> = Vec::with_capacity(ball.len());
    for (z, dz) in ball.entries() {
        let image = map_element(hom, z)?;
        let dp = ctx_dprime.norm_within(&image, &(&lip * dz))?;
        table.push((dz.clone(), dp));
    }

    let mut rows = Vec::with_capacity(t_values.len());
    for t in t_values {
        let rho2 = table
            .iter()
            .filter(|(d, _)| d <= t)
            .map(|(_, dp)| dp.clone())
            .max()
            .unwrap_or_else(BigRational::zero);
        let rho1 = table.iter().filter(|(d, _)| d >= t).map(|(_, dp)| dp.clone()).min();
        rows.push(RhoRow {
            t: t.clone(),
            rho1,
            rho1_certified: false,
            rho2,
        });
    }

    // Certification: every z' with d'(e, φ z') < v must already be in the
    // search ball. Enumerate the d'-ball just below the largest v once.
    let Some(vmax) = rows.iter().filter_map(|r| r.rho1.clone()).max() else {
        return Ok(rows);
    };
    let preimage = match hom {
        Some(h) => match Preimage::new(h) {
            Some(p) => Some(p),
            None => return Ok(rows),
        },
        None => None,
    };
    let target_ball = ctx_dprime.ball_unchecked(&vmax)?;
    // smallest d'-value among elements escaping the search ball
    let mut escape: Option<BigRational> = None;
    for (y, dy) in target_ball.entries() {
        if escape.as_ref().is_some_and(|e| dy >= e) {
            break;
        }
        let source = match &preimage {
            Some(p) => p.preimage(y)?,
            None => Some(y.clone()),
        };
        if let Some(z) = source {
            if ball.position(&z).is_none() {
                escape = Some(dy.clone());
            }
        }
    }
    for row in &mut rows {
        if let Some(v) = &row.rho1 {
            row.rho1_certified = escape.as_ref().is_none_or(|e| e >= v);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichViolation {
    pub x: GroupElement,
    pub y: GroupElement,
    pub d: BigRational,
    pub d_prime: BigRational,
    pub rho1: Option<BigRational>,
    pub rho2: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    pub pairs_checked: usize,
    /// Search radius at which the `ρ₁` values were taken.
    pub search_radius: BigRational,
    pub rho1_certified: bool,
    pub violations: Vec<SandwichViolation>,
}

/// Checks `ρ₁(d(x,y)) ≤ d'(φx,φy) ≤ ρ₂(d(x,y))` for every pair in the ball
/// of radius `verify_radius`. With `hom = None` the map is the identity.
pub fn check_coarse_sandwich(
    ctx_d: &MetricContext,
    ctx_dprime: &MetricContext,
    hom: Option<&Homomorphism>,
    verify_radius: &BigRational,
) -> Result<SandwichReport> {
    check_pair(ctx_d, ctx_dprime, hom)?;
    let ball = ctx_d.ball_with_norms(verify_radius)?;
    let points: Vec<&GroupElement> = ball.elements().collect();
    let images: Vec<GroupElement> = points.iter().map(|x| map_element(hom, x)).collect::<Result<_>>()?;
    let lip = lipschitz_constant(ctx_d, ctx_dprime, hom)?;
    let two_r = verify_radius * BigRational::from_integer(BigInt::from(2));

    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i..points.len() {
            let d = ctx_d.norm_within(
                &ctx_d.group().multiply(&ctx_d.group().invert(points[i])?, points[j])?,
                &two_r,
            )?;
            let tg = ctx_dprime.group();
            let dp = ctx_dprime.norm_within(&tg.multiply(&tg.invert(&images[i])?, &images[j])?, &(&lip * &d))?;
            pairs.push((i, j, d, dp));
        }
    }
    let mut ts: Vec<BigRational> = pairs.iter().map(|p| p.2.clone()).collect();
    ts.sort();
    ts.dedup();
    let max_t = ts.last().cloned().unwrap_or_else(BigRational::zero);

    let mut search = if max_t.is_zero() {
        BigRational::one()
    } else {
        max_t.clone()
    };
    let limit = &search * BigRational::from_integer(BigInt::from(16));
    let profile = loop {
        let rows = rho_profile(ctx_d, ctx_dprime, hom, &ts, &search)?;
        let certified = rows.iter().all(|r| r.rho1.is_none() || r.rho1_certified);
        if certified || search >= limit {
            break rows;
        }
        search = &search * BigRational::from_integer(BigInt::from(2));
    };
    let certified = profile.iter().all(|r| r.rho1.is_some() && r.rho1_certified);
    let lookup: HashMap<&BigRational, &RhoRow> = profile.iter().map(|r| (&r.t, r)).collect();

    let mut violations = Vec::new();
    for (i, j, d, dp) in &pairs {
        let row = lookup[d];
        let low_ok = row.rho1.as_ref().is_none_or(|r1| r1 <= dp);
        if !low_ok || *dp > row.rho2 {
            violations.push(SandwichViolation {
                x: points[*i].clone(),
                y: points[*j].clone(),
                d: d.clone(),
                d_prime: dp.clone(),
                rho1: row.rho1.clone(),
                rho2: row.rho2.clone(),
            });
        }
    }
    Ok(SandwichReport {
        pairs_checked: pairs.len(),
        search_radius: search,
        rho1_certified: certified,
        violations,
    })
}

/// `W_R(x₀) = {g : d(φ(g)·x₀, x₀) ≤ R}` restricted to the ball of radius
/// `search_radius` in the acting group, for the action of Γ on the Cayley
/// graph of H by left translation through `action: Γ → H`.
pub fn r_stabilizer(
    action: &Homomorphism,
    ctx_h: &MetricContext,
    x0: &GroupElement,
    radius: &BigRational,
    ctx_gamma: &MetricContext,
    search_radius: &BigRational,
) -> Result<Vec<GroupElement>> {
    if action.source() != ctx_gamma.group() || action.target() != ctx_h.group() {
        return Err(Error::KindMismatch(
            "action must map the acting group into the group being acted on".into(),
        ));
    }
    ctx_h.group().check(x0)?;
    if radius.is_negative() {
        return Err(Error::InvalidArgument("R must be nonnegative".into()));
    }
    let ball = ctx_gamma.ball_with_norms(search_radius)?;
    let h = ctx_h.group();
    let mut out = Vec::new();
    for g in ball.elements() {
        let moved = h.multiply(&action.apply(g)?, x0)?;
        if let CappedNorm::Exact(_) = ctx_h.distance(&moved, x0, radius)? {
            out.push(g.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use std::collections::VecDeque;
    use GroupElement::*;

    fn z() -> GroupSpec {
        GroupSpec::FreeAbelian { rank: 1 }
    }

    fn z_with(gens: &[(i64, i64)]) -> MetricContext {
        let entries = gens.iter().map(|&(g, w)| (Vector(vec![g]), int(w))).collect();
        MetricContext::new(WeightFunction::new(z(), entries).unwrap())
    }

    /// Breadth-first search depth on the unweighted Cayley graph.
    fn bfs_depths(group: &GroupSpec, gens: &[GroupElement], depth: usize) -> HashMap<GroupElement, usize> {
        let mut seen = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(group.identity(), 0);
        queue.push_back(group.identity());
        while let Some(x) = queue.pop_front() {
            let d = seen[&x];
            if d == depth {
                continue;
            }
            for s in gens {
                let y = group.multiply(&x, s).unwrap();
                seen.entry(y.clone()).or_insert_with(|| {
                    queue.push_back(y);
                    d + 1
                });
            }
        }
        seen
    }

    #[test]
    fn norm_examples() {
        let unit = z_with(&[(1, 1)]);
        assert_eq!(
            unit.norm(&Vector(vec![7]), &int(100)).unwrap(),
            CappedNorm::Exact(int(7))
        );
        assert_eq!(unit.norm(&Vector(vec![7]), &int(6)).unwrap(), CappedNorm::ExceedsCap);

        let three = z_with(&[(1, 1), (3, 1)]);
        let oracle = bfs_depths(
            &z(),
            &[Vector(vec![1]), Vector(vec![-1]), Vector(vec![3]), Vector(vec![-3])],
            10,
        );
        assert_eq!(oracle[&Vector(vec![7])], 3);
        assert_eq!(
            three.norm(&Vector(vec![7]), &int(100)).unwrap(),
            CappedNorm::Exact(int(3))
        );

        let q3 = GroupSpec::RationalsTruncated { depth: 3 };
        let w = WeightFunction::new(
            q3,
            vec![
                (Rational(int(1)), int(1)),
                (Rational(frac(1, 2)), int(2)),
                (Rational(frac(1, 6)), int(3)),
            ],
        )
        .unwrap();
        let ctx = MetricContext::new(w);
        // 5/6 = 1 − 1/6
        assert_eq!(
            ctx.norm(&Rational(frac(5, 6)), &int(10)).unwrap(),
            CappedNorm::Exact(int(4))
        );
    }

    #[test]
    fn rational_norm_matches_enumeration() {
        // all factorizations of cost ≤ 10 with generators ±1 (1), ±1/2 (2), ±1/6 (3)
        let gens = [(frac(1, 1), 1), (frac(1, 2), 2), (frac(1, 6), 3)];
        let target = frac(5, 6);
        let mut best: Option<i64> = None;
        for a in -10i64..=10 {
            for b in -5i64..=5 {
                for c in -3i64..=3 {
                    let cost = a.abs() * gens[0].1 + b.abs() * gens[1].1 + c.abs() * gens[2].1;
                    if cost > 10 {
                        continue;
                    }
                    let v = int(a) * &gens[0].0 + int(b) * &gens[1].0 + int(c) * &gens[2].0;
                    if v == target {
                        best = Some(best.map_or(cost, |b: i64| b.min(cost)));
                    }
                }
            }
        }
        assert_eq!(best, Some(4));
    }

    #[test]
    fn distance_examples() {
        let unit = z_with(&[(1, 1)]);
        assert_eq!(
            unit.distance(&Vector(vec![3]), &Vector(vec![10]), &int(10)).unwrap(),
            CappedNorm::Exact(int(7))
        );
        assert_eq!(
            unit.distance(&Vector(vec![4]), &Vector(vec![4]), &int(1)).unwrap(),
            CappedNorm::Exact(int(0))
        );

        let h = MetricContext::standard(GroupSpec::Heisenberg).unwrap();
        assert_eq!(
            h.distance(&Triple(0, 0, 0), &Triple(1, 1, 1), &int(5)).unwrap(),
            CappedNorm::Exact(int(2))
        );
    }

    #[test]
    fn ball_examples() {
        let unit = z_with(&[(1, 1)]);
        let b = unit.ball(&int(2)).unwrap();
        let expect: Vec<_> = [0, -1, 1, -2, 2].iter().map(|&n| Vector(vec![n])).collect();
        assert_eq!(b, expect);
        assert_eq!(unit.ball(&int(0)).unwrap(), vec![Vector(vec![0])]);

        let h = MetricContext::standard(GroupSpec::Heisenberg).unwrap();
        let b2 = h.ball(&int(2)).unwrap();
        let gens = h.weights().entries().iter().map(|(g, _)| g.clone()).collect::<Vec<_>>();
        let oracle = bfs_depths(&GroupSpec::Heisenberg, &gens, 2);
        assert_eq!(oracle.len(), 17);
        assert_eq!(b2.len(), 17);
        assert!(b2.iter().all(|x| oracle.contains_key(x)));
    }

    #[test]
    fn truncation_policy() {
        let q3 = GroupSpec::RationalsTruncated { depth: 3 };
        let checked = MetricContext::standard(q3.clone()).unwrap();
        assert!(checked.ball(&int(4)).is_ok());
        assert!(matches!(checked.ball(&int(5)), Err(Error::TruncationTooShallow { .. })));
        let intrinsic = MetricContext::intrinsic(WeightFunction::standard(q3).unwrap());
        assert!(intrinsic.ball(&int(8)).is_ok());
    }

    #[test]
    fn weight_validation() {
        let bad = WeightFunction::new(z(), vec![(Vector(vec![1]), int(0))]);
        assert!(matches!(bad, Err(Error::InvalidWeights(m)) if m.contains("must be positive")));
        let bad = WeightFunction::new(z(), vec![(Vector(vec![0]), int(1))]);
        assert!(bad.is_err());
        let bad = WeightFunction::new(z(), vec![(Vector(vec![1]), int(1)), (Vector(vec![-1]), int(2))]);
        assert!(bad.is_err());
        let w = WeightFunction::new(z(), vec![(Vector(vec![2]), int(1))]).unwrap();
        assert!(w.symmetrized());
        assert_eq!(w.entries().len(), 2);
        // weights must grow with the truncation index
        let bad = WeightFunction::new(
            GroupSpec::RationalsTruncated { depth: 2 },
            vec![(Rational(int(1)), int(2)), (Rational(frac(1, 2)), int(2))],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn rho_profile_examples() {
        let d = z_with(&[(1, 1)]);
        let dp = z_with(&[(1, 1), (3, 1)]);
        let rows = rho_profile(&d, &dp, None, &[int(0), int(3)], &int(30)).unwrap();
        assert_eq!(rows[0].rho1, Some(int(0)));
        assert_eq!(rows[1].rho1, Some(int(1)));
        assert_eq!(rows[1].rho2, int(2));
        assert!(rows.iter().all(|r| r.rho1_certified));

        let same = rho_profile(&d, &z_with(&[(1, 1)]), None, &[int(5)], &int(30)).unwrap();
        assert_eq!(same[0].rho2, int(5));
        assert_eq!(same[0].rho1, Some(int(5)));
    }

    #[test]
    fn rho_profile_flags_an_uncertified_minimum() {
        // d' is very cheap far away: ±10 of weight 1
        let d = z_with(&[(1, 1)]);
        let dp = z_with(&[(1, 1), (10, 1)]);
        let rows = rho_profile(&d, &dp, None, &[int(3)], &int(5)).unwrap();
        // within the search ball the minimum is 2 (at |z| = 3,4,5 → d' = 3, 4, 5?)
        // but z = 10 has d' = 1 and lies outside
        assert!(!rows[0].rho1_certified);
        let rows = rho_profile(&d, &dp, None, &[int(3)], &int(20)).unwrap();
        assert_eq!(rows[0].rho1, Some(int(1)));
        assert!(rows[0].rho1_certified);
    }

    #[test]
    fn sandwich_examples() {
        let d = z_with(&[(1, 1)]);
        let dp = z_with(&[(1, 1), (3, 1)]);
        let report = check_coarse_sandwich(&d, &dp, None, &int(20)).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.rho1_certified);
        assert_eq!(report.pairs_checked, 41 * 42 / 2);

        // 5Z ⊂ Z: intrinsic metric on a copy of Z, induced metric through 1 ↦ 5
        let sub = z_with(&[(1, 1)]);
        let ambient = z_with(&[(1, 1)]);
        let incl = Homomorphism::new(z(), z(), vec![Vector(vec![5])]).unwrap();
        let report = check_coarse_sandwich(&sub, &ambient, Some(&incl), &int(10)).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.rho1_certified);
    }

    #[test]
    fn r_stabilizer_examples() {
        let z2 = GroupSpec::FreeAbelian { rank: 2 };
        let proj = Homomorphism::new(z2.clone(), z(), vec![Vector(vec![1]), Vector(vec![0])]).unwrap();
        let ctx_g = MetricContext::standard(z2).unwrap();
        let ctx_h = z_with(&[(1, 1)]);
        let w = r_stabilizer(&proj, &ctx_h, &Vector(vec![0]), &int(3), &ctx_g, &int(5)).unwrap();
        let expected = ctx_g
            .ball(&int(5))
            .unwrap()
            .into_iter()
            .filter(|x| matches!(x, Vector(v) if v[0].abs() <= 3))
            .collect::<Vec<_>>();
        assert_eq!(w, expected);

        let id = Homomorphism::identity(z()).unwrap();
        let w = r_stabilizer(&id, &ctx_h, &Vector(vec![0]), &int(2), &ctx_h, &int(10)).unwrap();
        assert_eq!(w.len(), 5);
    }
}
