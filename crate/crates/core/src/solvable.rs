//! Hirsch length and asymptotic-dimension bounds for groups given by a
//! subnormal series with abelian quotients.
//!
//! Every derived [`BoundInterval`] carries a trace tree whose nodes name
//! the rule applied; [`replay`] re-evaluates a trace bottom-up and checks
//! that it reproduces every stored interval.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::abelian::{rank_and_torsion, PresentedAbelian};
use crate::error::{Error, Result};
use crate::group::cyclic_generator;
use crate::rational::format_rational;

/// A value in `N ∪ {∞}`; addition absorbs into `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn plus(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.checked_add(b).map_or(Bound::Infinite, Bound::Finite),
            _ => Bound::Infinite,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Bound::Finite(n) => Some(n),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl std::iter::Sum for Bound {
    fn sum<I: Iterator<Item = Bound>>(iter: I) -> Bound {
        iter.fold(Bound::Finite(0), Bound::plus)
    }
}

/// One abelian quotient of a subnormal series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientSpec {
    /// A finitely generated abelian group given by a presentation.
    Presented(PresentedAbelian),
    /// A quotient known only through its rational rank.
    DeclaredRank {
        rank: Bound,
        torsion_only: bool,
        justification: String,
    },
}

impl QuotientSpec {
    pub fn declared(rank: Bound, justification: impl Into<String>) -> Self {
        QuotientSpec::DeclaredRank {
            rank,
            torsion_only: false,
            justification: justification.into(),
        }
    }

    pub fn torsion(justification: impl Into<String>) -> Self {
        QuotientSpec::DeclaredRank {
            rank: Bound::Finite(0),
            torsion_only: true,
            justification: justification.into(),
        }
    }

    pub fn free(rank: usize) -> Result<Self> {
        Ok(QuotientSpec::Presented(PresentedAbelian::free(rank)?))
    }

    fn validate(&self) -> Result<()> {
        match self {
            QuotientSpec::DeclaredRank {
                rank,
                torsion_only: true,
                ..
            } if *rank != Bound::Finite(0) => Err(Error::InvalidSeries(format!(
                "a torsion quotient has rank 0, not {rank}"
            ))),
            _ => Ok(()),
        }
    }

    /// `dim_Q(A ⊗ Q)`.
    pub fn rank(&self) -> Bound {
        match self {
            QuotientSpec::Presented(p) => Bound::Finite(rank_and_torsion(p).rank as u64),
            QuotientSpec::DeclaredRank { rank, .. } => *rank,
        }
    }

    pub fn is_presented(&self) -> bool {
        matches!(self, QuotientSpec::Presented(_))
    }

    /// Trace node giving the exact asymptotic dimension of the quotient.
    pub fn node(&self) -> TraceNode {
        match self {
            QuotientSpec::Presented(p) => {
                let rt = rank_and_torsion(p);
                let torsion: Vec<String> = rt.torsion.iter().map(ToString::to_string).collect();
                let note = format!(
                    "presented abelian group on {} generator{}: rank {}, torsion [{}]",
                    p.generators(),
                    if p.generators() == 1 { "" } else { "s" },
                    rt.rank,
                    torsion.join(", ")
                );
                let r = Bound::Finite(rt.rank as u64);
                if rt.rank == 0 {
                    TraceNode::leaf(Rule::TorsionZero, Bound::Finite(0), Bound::Finite(0), note)
                } else {
                    TraceNode::leaf(Rule::AbelianExact, r, r, note)
                }
            }
            QuotientSpec::DeclaredRank {
                torsion_only: true,
                justification,
                ..
            } => TraceNode::leaf(
                Rule::TorsionZero,
                Bound::Finite(0),
                Bound::Finite(0),
                format!("torsion abelian group: {justification}"),
            ),
            QuotientSpec::DeclaredRank {
                rank, justification, ..
            } => TraceNode {
                rule: Rule::AbelianExact,
                lower: *rank,
                upper: *rank,
                note: format!("abelian group of rational rank {rank}"),
                children: vec![TraceNode::leaf(Rule::Declared, *rank, *rank, justification.clone())],
            },
        }
    }
}

/// A declared free abelian subgroup of the given rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub rank: u64,
    pub justification: String,
}

/// A subnormal series `1 = G₀ ⊂ G₁ ⊂ … ⊂ Gₙ = Γ` with abelian quotients,
/// listed bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    name: String,
    quotients: Vec<QuotientSpec>,
    polycyclic: bool,
    witness: Option<Witness>,
}

impl SeriesSpec {
    pub fn new(
        name: impl Into<String>,
        quotients: Vec<QuotientSpec>,
        polycyclic: bool,
        witness: Option<Witness>,
    ) -> Result<Self> {
        for q in &quotients {
            q.validate()?;
        }
        if polycyclic && !quotients.iter().all(QuotientSpec::is_presented) {
            return Err(Error::InvalidSeries(
                "a polycyclic series needs every quotient finitely generated (presented)".into(),
            ));
        }
        Ok(SeriesSpec {
            name: name.into(),
            quotients,
            polycyclic,
            witness,
        })
    }

    /// One-step series of an abelian group.
    pub fn abelian(name: impl Into<String>, p: PresentedAbelian) -> Self {
        SeriesSpec {
            name: name.into(),
            quotients: vec![QuotientSpec::Presented(p)],
            polycyclic: true,
            witness: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quotients(&self) -> &[QuotientSpec] {
        &self.quotients
    }

    pub fn polycyclic_flag(&self) -> bool {
        self.polycyclic
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// Declared flag, or every quotient finitely generated.
    pub fn is_polycyclic(&self) -> bool {
        self.polycyclic || self.quotients.iter().all(QuotientSpec::is_presented)
    }

    /// The series of `self` followed by the quotients of `top`.
    pub fn concat(&self, top: &SeriesSpec) -> Result<SeriesSpec> {
        let mut quotients = self.quotients.clone();
        quotients.extend(top.quotients.iter().cloned());
        SeriesSpec::new(
            format!("{}.{}", self.name, top.name),
            quotients,
            self.polycyclic && top.polycyclic,
            None,
        )
    }
}

/// Rule tags of trace nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    SubgroupMono,
    Hurewicz,
    Action,
    CountableSup,
    AbelianExact,
    TorsionZero,
    SesAdd,
    HirschUb,
    PolycyclicEq,
    /// Trusted input: a declared rank, witness or bound.
    Declared,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::SubgroupMono,
        Rule::Hurewicz,
        Rule::Action,
        Rule::CountableSup,
        Rule::AbelianExact,
        Rule::TorsionZero,
        Rule::SesAdd,
        Rule::HirschUb,
        Rule::PolycyclicEq,
        Rule::Declared,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::SubgroupMono => "SUBGROUP_MONO",
            Rule::Hurewicz => "HUREWICZ",
            Rule::Action => "ACTION",
            Rule::CountableSup => "COUNTABLE_SUP",
            Rule::AbelianExact => "ABELIAN_EXACT",
            Rule::TorsionZero => "TORSION_ZERO",
            Rule::SesAdd => "SES_ADD",
            Rule::HirschUb => "HIRSCH_UB",
            Rule::PolycyclicEq => "POLYCYCLIC_EQ",
            Rule::Declared => "DECLARED",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.tag() == tag)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub rule: Rule,
    pub lower: Bound,
    pub upper: Bound,
    pub note: String,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    fn leaf(rule: Rule, lower: Bound, upper: Bound, note: impl Into<String>) -> Self {
        TraceNode {
            rule,
            lower,
            upper,
            note: note.into(),
            children: Vec::new(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TraceNode::size).sum::<usize>()
    }
}

/// Bounds `lower ≤ asdim ≤ upper` with their derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundInterval {
    pub lower: Bound,
    pub upper: Bound,
    pub trace: TraceNode,
}

impl BoundInterval {
    fn from_node(trace: TraceNode) -> Self {
        BoundInterval {
            lower: trace.lower,
            upper: trace.upper,
            trace,
        }
    }

    /// The interval `[value, value]` from a declared fact.
    pub fn declared(value: Bound, justification: impl Into<String>) -> Self {
        Self::from_node(TraceNode::leaf(Rule::Declared, value, value, justification))
    }

    /// The interval `[0, upper]` from a declared upper bound.
    pub fn declared_upper(upper: Bound, justification: impl Into<String>) -> Self {
        Self::from_node(TraceNode::leaf(Rule::Declared, Bound::Finite(0), upper, justification))
    }

    /// The interval `[lower, upper]` from declared bounds.
    pub fn declared_range(lower: Bound, upper: Bound, justification: impl Into<String>) -> Result<Self> {
        if lower > upper {
            return Err(Error::InconsistentBounds(format!(
                "declared lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(Self::from_node(TraceNode::leaf(
            Rule::Declared,
            lower,
            upper,
            justification,
        )))
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }
}

impl fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// `h(Γ) = Σ dim_Q(Gᵢ₊₁/Gᵢ ⊗ Q)`.
pub fn hirsch_length(series: &SeriesSpec) -> Bound {
    series.quotients.iter().map(QuotientSpec::rank).sum()
}

/// Bounds on the asymptotic dimension of the group presented by a series.
///
/// A one-step series is an abelian group, whose dimension is its rank.
/// Otherwise the upper bound is the Hirsch length, attained when the
/// series is polycyclic; the lower bound comes from the declared free
/// abelian witness, or is 0.
pub fn asdim_bounds(series: &SeriesSpec) -> Result<BoundInterval> {
    let core = if series.quotients.len() == 1 {
        series.quotients[0].node()
    } else {
        let children: Vec<TraceNode> = series.quotients.iter().map(QuotientSpec::node).collect();
        let h = children.iter().map(|c| c.upper).sum();
        let hub = TraceNode {
            rule: Rule::HirschUb,
            lower: Bound::Finite(0),
            upper: h,
            note: format!("Hirsch length of {} is {h}", series.name),
            children,
        };
        if series.is_polycyclic() {
            TraceNode {
                rule: Rule::PolycyclicEq,
                lower: h,
                upper: h,
                note: if series.polycyclic {
                    "declared polycyclic".into()
                } else {
                    "every quotient finitely generated".into()
                },
                children: vec![hub],
            }
        } else {
            hub
        }
    };
    let Some(w) = &series.witness else {
        return Ok(BoundInterval::from_node(core));
    };
    let wb = Bound::Finite(w.rank);
    if wb > core.upper {
        return Err(Error::InconsistentBounds(format!(
            "declared free abelian subgroup of rank {} exceeds the upper bound {}",
            w.rank, core.upper
        )));
    }
    if wb <= core.lower {
        return Ok(BoundInterval::from_node(core));
    }
    let witness = TraceNode {
        rule: Rule::AbelianExact,
        lower: wb,
        upper: wb,
        note: format!("free abelian group of rank {}", w.rank),
        children: vec![TraceNode::leaf(Rule::Declared, wb, wb, w.justification.clone())],
    };
    Ok(BoundInterval::from_node(TraceNode {
        rule: Rule::SubgroupMono,
        lower: wb,
        upper: core.upper,
        note: format!("Z^{} is a subgroup of {}", w.rank, series.name),
        children: vec![witness, core],
    }))
}

/// `asdim G ≤ asdim H + asdim K` for an extension `1 → H → G → K → 1`.
pub fn hurewicz_bound(ub_kernel: Bound, ub_quotient: Bound) -> Bound {
    ub_kernel.plus(ub_quotient)
}

/// `asdim Γ ≤ n + asdim X` when every R-stabilizer has dimension at most
/// `n`.
pub fn action_bound(stabilizer_bound: Bound, ub_space: Bound) -> Bound {
    stabilizer_bound.plus(ub_space)
}

/// Traced form of [`hurewicz_bound`].
pub fn hurewicz(kernel: &BoundInterval, quotient: &BoundInterval) -> BoundInterval {
    let upper = hurewicz_bound(kernel.upper, quotient.upper);
    BoundInterval::from_node(TraceNode {
        rule: Rule::Hurewicz,
        lower: Bound::Finite(0),
        upper,
        note: "extension of the quotient by the kernel".into(),
        children: vec![kernel.trace.clone(), quotient.trace.clone()],
    })
}

/// Traced form of [`action_bound`].
pub fn action(stabilizers: &BoundInterval, space: &BoundInterval) -> BoundInterval {
    let upper = action_bound(stabilizers.upper, space.upper);
    BoundInterval::from_node(TraceNode {
        rule: Rule::Action,
        lower: Bound::Finite(0),
        upper,
        note: "isometric action with bounded R-stabilizers".into(),
        children: vec![stabilizers.trace.clone(), space.trace.clone()],
    })
}

/// `asdim A = asdim B + asdim C` for a short exact sequence of abelian
/// groups.
pub fn ses_add(kernel: &BoundInterval, quotient: &BoundInterval) -> BoundInterval {
    BoundInterval::from_node(TraceNode {
        rule: Rule::SesAdd,
        lower: kernel.lower.plus(quotient.lower),
        upper: kernel.upper.plus(quotient.upper),
        note: "short exact sequence of abelian groups".into(),
        children: vec![kernel.trace.clone(), quotient.trace.clone()],
    })
}

/// Supremum over finitely generated subgroups. The empty family gives the
/// trivial group's `[0, 0]`.
pub fn countable_sup(bounds: &[BoundInterval]) -> BoundInterval {
    sup_node(bounds, None)
}

/// Supremum over a family whose upper bounds are unbounded, e.g. `[n, n]`
/// for every `n`; `bounds` lists the sampled members.
pub fn countable_sup_unbounded(bounds: &[BoundInterval], justification: impl Into<String>) -> BoundInterval {
    sup_node(
        bounds,
        Some(TraceNode::leaf(
            Rule::Declared,
            Bound::Infinite,
            Bound::Infinite,
            justification,
        )),
    )
}

fn sup_node(bounds: &[BoundInterval], tail: Option<TraceNode>) -> BoundInterval {
    let mut children: Vec<TraceNode> = bounds.iter().map(|b| b.trace.clone()).collect();
    children.extend(tail);
    let lower = children.iter().map(|c| c.lower).max().unwrap_or(Bound::Finite(0));
    let upper = children.iter().map(|c| c.upper).max().unwrap_or(Bound::Finite(0));
    BoundInterval::from_node(TraceNode {
        rule: Rule::CountableSup,
        lower,
        upper,
        note: format!("supremum over {} finitely generated subgroups", bounds.len()),
        children,
    })
}

/// The finitely generated subgroup of Q generated by `elements` is cyclic;
/// its dimension is 1, or 0 when it is trivial.
pub fn rational_subgroup_bounds(elements: &[BigRational]) -> BoundInterval {
    let g = cyclic_generator(elements);
    let listed: Vec<String> = elements.iter().map(format_rational).collect();
    if g.is_zero() {
        BoundInterval::from_node(TraceNode::leaf(
            Rule::TorsionZero,
            Bound::Finite(0),
            Bound::Finite(0),
            format!("<{}> is trivial", listed.join(", ")),
        ))
    } else {
        BoundInterval::from_node(TraceNode::leaf(
            Rule::AbelianExact,
            Bound::Finite(1),
            Bound::Finite(1),
            format!("<{}> = <{}>, infinite cyclic", listed.join(", "), format_rational(&g)),
        ))
    }
}

/// Re-evaluates a trace bottom-up, checking every stored interval.
pub fn replay(node: &TraceNode) -> Result<(Bound, Bound)> {
    let kids: Vec<(Bound, Bound)> = node.children.iter().map(replay).collect::<Result<_>>()?;
    let arity = |n: usize| -> Result<()> {
        if kids.len() == n {
            Ok(())
        } else {
            Err(Error::InconsistentBounds(format!(
                "{} node needs {n} children, has {}",
                node.rule,
                kids.len()
            )))
        }
    };
    let zero = Bound::Finite(0);
    let computed = match node.rule {
        Rule::Declared => {
            arity(0)?;
            (node.lower, node.upper)
        }
        Rule::AbelianExact => match kids.as_slice() {
            [] => (node.lower, node.upper),
            [(l, u)] if l == u => (*l, *u),
            _ => return Err(Error::InconsistentBounds("ABELIAN_EXACT takes one exact rank".into())),
        },
        Rule::TorsionZero => {
            arity(0)?;
            (zero, zero)
        }
        Rule::HirschUb => (zero, kids.iter().map(|k| k.1).sum()),
        Rule::PolycyclicEq => {
            arity(1)?;
            if node.children[0].rule != Rule::HirschUb {
                return Err(Error::InconsistentBounds("POLYCYCLIC_EQ must rest on HIRSCH_UB".into()));
            }
            (kids[0].1, kids[0].1)
        }
        Rule::SubgroupMono => {
            arity(2)?;
            (kids[0].0.max(kids[1].0), kids[1].1)
        }
        Rule::Hurewicz | Rule::Action => {
            arity(2)?;
            (zero, kids[0].1.plus(kids[1].1))
        }
        Rule::SesAdd => {
            arity(2)?;
            (kids[0].0.plus(kids[1].0), kids[0].1.plus(kids[1].1))
        }
        Rule::CountableSup => (
            kids.iter().map(|k| k.0).max().unwrap_or(zero),
            kids.iter().map(|k| k.1).max().unwrap_or(zero),
        ),
    };
    if computed != (node.lower, node.upper) {
        return Err(Error::InconsistentBounds(format!(
            "{} node stores [{}, {}] but its children give [{}, {}]",
            node.rule, node.lower, node.upper, computed.0, computed.1
        )));
    }
    if computed.0 > computed.1 {
        return Err(Error::InconsistentBounds(format!(
            "{} node has lower bound {} above upper bound {}",
            node.rule, computed.0, computed.1
        )));
    }
    Ok(computed)
}
