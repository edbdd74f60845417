//! Supported group kinds, canonical elements and homomorphisms.
//!
//! Every element is stored in a canonical form, so element equality is
//! structural equality and elements can be used directly as set and map
//! keys. The derived `Ord` on [`GroupElement`] is the canonical element key
//! used to break ties deterministically.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::{to_i64, IntegerMatrix, PresentedAbelian};
use crate::error::{Error, Result};
use crate::rational::{factorial, format_rational};

pub const MAX_RANK: usize = 64;
pub const MAX_DEPTH: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    FreeAbelian {
        rank: usize,
    },
    Free {
        rank: usize,
    },
    FiniteCyclic {
        order: u64,
    },
    PresentedAbelian(PresentedAbelian),
    /// Integer triples with `(a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b')`.
    Heisenberg,
    DirectProduct(Vec<GroupSpec>),
    /// The subgroup of Q generated by `1/1!, 1/2!, …, 1/depth!`.
    RationalsTruncated {
        depth: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Free abelian coordinates, or canonical coordinates of a presented
    /// abelian group.
    Vector(Vec<i64>),
    /// Reduced word of signed, 1-based generator indices.
    Word(Vec<i32>),
    Residue(u64),
    Triple(i64, i64, i64),
    Tuple(Vec<GroupElement>),
    Rational(BigRational),
}

impl GroupSpec {
    /// Checks the declared bounds recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::FreeAbelian { rank } | GroupSpec::Free { rank } if *rank > MAX_RANK => Err(Error::InvalidSpec(
                format!("rank {rank} exceeds the supported maximum {MAX_RANK}"),
            )),
            GroupSpec::FiniteCyclic { order } if *order == 0 || *order > i64::MAX as u64 => {
                Err(Error::InvalidSpec(format!("cyclic order {order} out of range")))
            }
            GroupSpec::PresentedAbelian(p) if p.generators() > MAX_RANK => Err(Error::InvalidSpec(format!(
                "{} generators exceed the supported maximum {MAX_RANK}",
                p.generators()
            ))),
            GroupSpec::DirectProduct(fs) => {
                if fs.is_empty() {
                    return Err(Error::InvalidSpec("direct product needs at least one factor".into()));
                }
                fs.iter().try_for_each(GroupSpec::validate)
            }
            GroupSpec::RationalsTruncated { depth } if *depth == 0 || *depth > MAX_DEPTH => Err(Error::InvalidSpec(
                format!("truncation depth {depth} outside 1..={MAX_DEPTH}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupSpec::FreeAbelian { .. } => "free_abelian",
            GroupSpec::Free { .. } => "free",
            GroupSpec::FiniteCyclic { .. } => "finite_cyclic",
            GroupSpec::PresentedAbelian(_) => "presented_abelian",
            GroupSpec::Heisenberg => "heisenberg",
            GroupSpec::DirectProduct(_) => "direct_product",
            GroupSpec::RationalsTruncated { .. } => "rationals_truncated",
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupSpec::Free { rank } => *rank <= 1,
            GroupSpec::Heisenberg => false,
            GroupSpec::DirectProduct(fs) => fs.iter().all(GroupSpec::is_abelian),
            _ => true,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
            GroupSpec::Free { .. } => GroupElement::Word(Vec::new()),
            GroupSpec::FiniteCyclic { .. } => GroupElement::Residue(0),
            GroupSpec::PresentedAbelian(p) => GroupElement::Vector(vec![0; p.generators()]),
            GroupSpec::Heisenberg => GroupElement::Triple(0, 0, 0),
            GroupSpec::DirectProduct(fs) => GroupElement::Tuple(fs.iter().map(GroupSpec::identity).collect()),
            GroupSpec::RationalsTruncated { .. } => GroupElement::Rational(BigRational::zero()),
        }
    }

    /// Full membership test, including canonical-form invariants.
    pub fn contains(&self, x: &GroupElement) -> bool {
        match (self, x) {
            (GroupSpec::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            (GroupSpec::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|&i| i != 0 && (i.unsigned_abs() as usize) <= *rank) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupSpec::FiniteCyclic { order }, GroupElement::Residue(r)) => r < order,
            (GroupSpec::PresentedAbelian(p), GroupElement::Vector(v)) => {
                p.is_canonical(&v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
            }
            (GroupSpec::Heisenberg, GroupElement::Triple(..)) => true,
            (GroupSpec::DirectProduct(fs), GroupElement::Tuple(xs)) => {
                fs.len() == xs.len() && fs.iter().zip(xs).all(|(f, x)| f.contains(x))
            }
            (GroupSpec::RationalsTruncated { depth }, GroupElement::Rational(q)) => {
                factorial(*depth).is_multiple_of(q.denom())
            }
            _ => false,
        }
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::KindMismatch(format!(
                "{x} is not an element of {}",
                self.kind_name()
            )))
        }
    }

    fn mismatch(&self, x: &GroupElement, y: &GroupElement) -> Error {
        Error::KindMismatch(format!("{x} and {y} are not both elements of {}", self.kind_name()))
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (self, x, y) {
            (GroupSpec::FreeAbelian { rank }, Vector(a), Vector(b)) if a.len() == *rank && b.len() == *rank => {
                add_vectors(a, b).map(Vector)
            }
            (GroupSpec::Free { .. }, Word(a), Word(b)) => {
                let mut out = a.clone();
                for &letter in b {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                Ok(Word(out))
            }
            (GroupSpec::FiniteCyclic { order }, Residue(a), Residue(b)) => {
                Ok(Residue(((*a as u128 + *b as u128) % *order as u128) as u64))
            }
            (GroupSpec::PresentedAbelian(p), Vector(a), Vector(b))
                if a.len() == p.generators() && b.len() == p.generators() =>
            {
                reduce_presented(p, &add_vectors(a, b)?).map(Vector)
            }
            (GroupSpec::Heisenberg, Triple(a, b, c), Triple(a2, b2, c2)) => {
                let ab = a.checked_mul(*b2).ok_or(Error::Overflow("heisenberg product"))?;
                Ok(Triple(
                    a.checked_add(*a2).ok_or(Error::Overflow("heisenberg product"))?,
                    b.checked_add(*b2).ok_or(Error::Overflow("heisenberg product"))?,
                    c.checked_add(*c2)
                        .and_then(|s| s.checked_add(ab))
                        .ok_or(Error::Overflow("heisenberg product"))?,
                ))
            }
            (GroupSpec::DirectProduct(fs), Tuple(xs), Tuple(ys)) if xs.len() == fs.len() && ys.len() == fs.len() => fs
                .iter()
                .zip(xs.iter().zip(ys))
                .map(|(f, (x, y))| f.multiply(x, y))
                .collect::<Result<_>>()
                .map(Tuple),
            (GroupSpec::RationalsTruncated { .. }, Rational(a), Rational(b)) => Ok(Rational(a + b)),
            _ => Err(self.mismatch(x, y)),
        }
    }

    pub fn invert(&self, x: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (self, x) {
            (GroupSpec::FreeAbelian { rank }, Vector(a)) if a.len() == *rank => negate(a).map(Vector),
            (GroupSpec::Free { .. }, Word(w)) => Ok(Word(w.iter().rev().map(|&i| -i).collect())),
            (GroupSpec::FiniteCyclic { order }, Residue(r)) => Ok(Residue((order - r % order) % order)),
            (GroupSpec::PresentedAbelian(p), Vector(a)) if a.len() == p.generators() => {
                reduce_presented(p, &negate(a)?).map(Vector)
            }
            (GroupSpec::Heisenberg, Triple(a, b, c)) => {
                let ab = a.checked_mul(*b).ok_or(Error::Overflow("heisenberg inverse"))?;
                Ok(Triple(
                    -a,
                    -b,
                    ab.checked_sub(*c).ok_or(Error::Overflow("heisenberg inverse"))?,
                ))
            }
            (GroupSpec::DirectProduct(fs), Tuple(xs)) if xs.len() == fs.len() => fs
                .iter()
                .zip(xs)
                .map(|(f, x)| f.invert(x))
                .collect::<Result<_>>()
                .map(Tuple),
            (GroupSpec::RationalsTruncated { .. }, Rational(q)) => Ok(Rational(-q)),
            _ => Err(Error::KindMismatch(format!(
                "{x} is not an element of {}",
                self.kind_name()
            ))),
        }
    }

    /// `x^n` by repeated squaring.
    pub fn power(&self, x: &GroupElement, n: i64) -> Result<GroupElement> {
        let mut base = if n < 0 { self.invert(x)? } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.multiply(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// `x y x⁻¹ y⁻¹`
    pub fn commutator(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        let xy = self.multiply(x, y)?;
        let xyx = self.multiply(&xy, &self.invert(x)?)?;
        self.multiply(&xyx, &self.invert(y)?)
    }

    /// The standard (non-symmetrized) generating list. Homomorphisms are
    /// specified by the images of these, in this order.
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            GroupSpec::FreeAbelian { rank } => (0..*rank).map(|i| unit_vector(*rank, i)).collect(),
            GroupSpec::Free { rank } => (1..=*rank as i32).map(|i| GroupElement::Word(vec![i])).collect(),
            GroupSpec::FiniteCyclic { order } => vec![GroupElement::Residue(1 % order)],
            GroupSpec::PresentedAbelian(p) => (0..p.generators())
                .map(|j| {
                    let e: Vec<BigInt> = (0..p.generators()).map(|i| BigInt::from((i == j) as i64)).collect();
                    let y = p.canonicalize(&e);
                    GroupElement::Vector(y.iter().map(|c| c.to_i64().expect("reduced coordinate")).collect())
                })
                .collect(),
            GroupSpec::Heisenberg => vec![GroupElement::Triple(1, 0, 0), GroupElement::Triple(0, 1, 0)],
            GroupSpec::DirectProduct(fs) => {
                let ids: Vec<GroupElement> = fs.iter().map(GroupSpec::identity).collect();
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    for g in f.generators() {
                        let mut t = ids.clone();
                        t[i] = g;
                        out.push(GroupElement::Tuple(t));
                    }
                }
                out
            }
            GroupSpec::RationalsTruncated { depth } => (1..=*depth)
                .map(|n| GroupElement::Rational(BigRational::new(BigInt::one(), factorial(n))))
                .collect(),
        }
    }
}

fn unit_vector(n: usize, i: usize) -> GroupElement {
    let mut v = vec![0; n];
    v[i] = 1;
    GroupElement::Vector(v)
}

fn add_vectors(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("vector sum")))
        .collect()
}

fn negate(a: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .map(|x| x.checked_neg().ok_or(Error::Overflow("negation")))
        .collect()
}

fn reduce_presented(p: &PresentedAbelian, y: &[i64]) -> Result<Vec<i64>> {
    let reduced = p.reduce(y.iter().map(|&c| BigInt::from(c)).collect());
    reduced
        .iter()
        .map(|c| to_i64(c, "presented abelian coordinate"))
        .collect()
}

/// Canonical element of a presented abelian group with the given generator
/// exponents.
pub fn presented_element(p: &PresentedAbelian, exponents: &[BigInt]) -> Result<GroupElement> {
    if exponents.len() != p.generators() {
        return Err(Error::KindMismatch(format!(
            "{} exponents for {} generators",
            exponents.len(),
            p.generators()
        )));
    }
    let y = p.canonicalize(exponents);
    Ok(GroupElement::Vector(
        y.iter()
            .map(|c| to_i64(c, "presented abelian coordinate"))
            .collect::<Result<_>>()?,
    ))
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
            items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
        }
        match self {
            GroupElement::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            GroupElement::Vector(v) => write!(f, "({})", join(v, ",")),
            GroupElement::Word(w) => write!(f, "[{}]", join(w, ",")),
            GroupElement::Residue(r) => write!(f, "{r}"),
            GroupElement::Triple(a, b, c) => write!(f, "({a},{b},{c})"),
            GroupElement::Tuple(xs) => write!(f, "<{}>", join(xs, ", ")),
            GroupElement::Rational(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// A homomorphism given by the images of the source's standard generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: GroupSpec,
    target: GroupSpec,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Validates the images and checks that every defining relation of the
    /// source maps to the identity.
    pub fn new(source: GroupSpec, target: GroupSpec, images: Vec<GroupElement>) -> Result<Self> {
        source.validate()?;
        target.validate()?;
        let expected = source.generators().len();
        if images.len() != expected {
            return Err(Error::InvalidHomomorphism(format!(
                "{} images given for {} source generators",
                images.len(),
                expected
            )));
        }
        for g in &images {
            if !target.contains(g) {
                return Err(Error::InvalidHomomorphism(format!(
                    "image {g} is not an element of the target {}",
                    target.kind_name()
                )));
            }
        }
        check_relations(&source, &images, &target)?;
        Ok(Homomorphism { source, target, images })
    }

    pub fn identity(group: GroupSpec) -> Result<Self> {
        let images = group.generators();
        Homomorphism::new(group.clone(), group, images)
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        self.source.check(x)?;
        evaluate(&self.source, x, &self.images, &self.target)
    }

    /// Integer matrix form for maps between abelian groups: row `j` holds
    /// the target coordinates of the image of generator `j`.
    pub fn matrix(&self) -> Option<IntegerMatrix> {
        let coords = abelian_coords(&self.target)?;
        if !self.source.is_abelian() {
            return None;
        }
        let rows: Vec<Vec<BigInt>> = self.images.iter().map(|g| coords.coords(g)).collect::<Option<_>>()?;
        IntegerMatrix::from_rows(coords.dimension(), &rows).ok()
    }
}

fn pow_exp(target: &GroupSpec, g: &GroupElement, e: &BigInt) -> Result<GroupElement> {
    target.power(g, to_i64(e, "homomorphism exponent")?)
}

fn evaluate(spec: &GroupSpec, x: &GroupElement, images: &[GroupElement], target: &GroupSpec) -> Result<GroupElement> {
    use GroupElement::*;
    let mut acc = target.identity();
    match (spec, x) {
        (GroupSpec::FreeAbelian { .. }, Vector(v)) => {
            for (g, &e) in images.iter().zip(v) {
                acc = target.multiply(&acc, &target.power(g, e)?)?;
            }
        }
        (GroupSpec::Free { .. }, Word(w)) => {
            for &letter in w {
                let g = &images[letter.unsigned_abs() as usize - 1];
                let g = if letter < 0 { target.invert(g)? } else { g.clone() };
                acc = target.multiply(&acc, &g)?;
            }
        }
        (GroupSpec::FiniteCyclic { .. }, Residue(r)) => {
            acc = target.power(&images[0], *r as i64)?;
        }
        (GroupSpec::PresentedAbelian(p), Vector(v)) => {
            let y: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
            for (g, e) in images.iter().zip(p.exponents(&y)) {
                acc = target.multiply(&acc, &pow_exp(target, g, &e)?)?;
            }
        }
        (GroupSpec::Heisenberg, Triple(a, b, c)) => {
            // (a,b,c) = A^a · B^b · [A,B]^(c - ab)
            let z = target.commutator(&images[0], &images[1])?;
            let central = c
                .checked_sub(a.checked_mul(*b).ok_or(Error::Overflow("heisenberg normal form"))?)
                .ok_or(Error::Overflow("heisenberg normal form"))?;
            acc = target.multiply(&target.power(&images[0], *a)?, &target.power(&images[1], *b)?)?;
            acc = target.multiply(&acc, &target.power(&z, central)?)?;
        }
        (GroupSpec::DirectProduct(fs), Tuple(xs)) => {
            let mut offset = 0;
            for (f, xi) in fs.iter().zip(xs) {
                let n = f.generators().len();
                let part = evaluate(f, xi, &images[offset..offset + n], target)?;
                acc = target.multiply(&acc, &part)?;
                offset += n;
            }
        }
        (GroupSpec::RationalsTruncated { depth }, Rational(q)) => {
            let m = q * BigRational::from_integer(factorial(*depth));
            acc = pow_exp(target, &images[*depth as usize - 1], &m.to_integer())?;
        }
        _ => {
            return Err(Error::KindMismatch(format!(
                "{x} is not an element of {}",
                spec.kind_name()
            )))
        }
    }
    Ok(acc)
}

fn require_identity(target: &GroupSpec, g: &GroupElement, what: impl FnOnce() -> String) -> Result<()> {
    if *g == target.identity() {
        Ok(())
    } else {
        Err(Error::InvalidHomomorphism(format!(
            "{} maps to {g}, not the identity",
            what()
        )))
    }
}

fn commute(target: &GroupSpec, images: &[GroupElement]) -> Result<()> {
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let c = target.commutator(&images[i], &images[j])?;
            require_identity(target, &c, || {
                format!("commutator of generators {} and {}", i + 1, j + 1)
            })?;
        }
    }
    Ok(())
}

fn check_relations(spec: &GroupSpec, images: &[GroupElement], target: &GroupSpec) -> Result<()> {
    match spec {
        GroupSpec::FreeAbelian { .. } => commute(target, images),
        GroupSpec::Free { .. } => Ok(()),
        GroupSpec::FiniteCyclic { order } => {
            let g = target.power(&images[0], *order as i64)?;
            require_identity(target, &g, || format!("generator to the power {order}"))
        }
        GroupSpec::PresentedAbelian(p) => {
            commute(target, images)?;
            for row in p.relations().to_rows() {
                let mut acc = target.identity();
                for (g, e) in images.iter().zip(&row) {
                    acc = target.multiply(&acc, &pow_exp(target, g, e)?)?;
                }
                require_identity(target, &acc, || format!("relation {row:?}"))?;
            }
            Ok(())
        }
        GroupSpec::Heisenberg => {
            let z = target.commutator(&images[0], &images[1])?;
            for (k, g) in images.iter().enumerate() {
                let c = target.commutator(&z, g)?;
                require_identity(target, &c, || format!("[[a,b], generator {}]", k + 1))?;
            }
            Ok(())
        }
        GroupSpec::DirectProduct(fs) => {
            let mut offset = 0;
            let mut blocks = Vec::new();
            for f in fs {
                let n = f.generators().len();
                check_relations(f, &images[offset..offset + n], target)?;
                blocks.push(offset..offset + n);
                offset += n;
            }
            for (bi, a) in blocks.iter().enumerate() {
                for b in &blocks[bi + 1..] {
                    for i in a.clone() {
                        for j in b.clone() {
                            let c = target.commutator(&images[i], &images[j])?;
                            require_identity(target, &c, || {
                                format!(
                                    "commutator of generators {} and {} from different factors",
                                    i + 1,
                                    j + 1
                                )
                            })?;
                        }
                    }
                }
            }
            Ok(())
        }
        GroupSpec::RationalsTruncated { depth } => {
            for n in 2..=*depth as usize {
                let g = target.power(&images[n - 1], n as i64)?;
                if g != images[n - 2] {
                    return Err(Error::InvalidHomomorphism(format!(
                        "{n}·(1/{n}!) = 1/{}! is not respected",
                        n - 1
                    )));
                }
            }
            Ok(())
        }
    }
}

/// An abelian group viewed as `Z^dimension / rowspace(lattice)`, with a map
/// from canonical elements to coordinates and back.
#[derive(Clone, Debug)]
pub struct AbelianCoords {
    spec: GroupSpec,
    pub lattice: IntegerMatrix,
}

/// Coordinates for abelian kinds; `None` for non-abelian groups.
pub fn abelian_coords(spec: &GroupSpec) -> Option<AbelianCoords> {
    let lattice = match spec {
        GroupSpec::FreeAbelian { rank } => IntegerMatrix::zeros(0, *rank),
        GroupSpec::Free { rank } if *rank <= 1 => IntegerMatrix::zeros(0, *rank),
        GroupSpec::FiniteCyclic { order } => IntegerMatrix::from_rows(1, &[vec![*order as i64]]).ok()?,
        GroupSpec::PresentedAbelian(p) => {
            let n = p.generators();
            let rows: Vec<Vec<BigInt>> = p
                .moduli()
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_zero())
                .map(|(i, m)| {
                    (0..n)
                        .map(|j| if i == j { m.clone() } else { BigInt::zero() })
                        .collect()
                })
                .collect();
            IntegerMatrix::from_rows(n, &rows).ok()?
        }
        GroupSpec::RationalsTruncated { .. } => IntegerMatrix::zeros(0, 1),
        GroupSpec::DirectProduct(fs) => {
            let parts: Vec<AbelianCoords> = fs.iter().map(abelian_coords).collect::<Option<_>>()?;
            block_diagonal(parts.iter().map(|p| &p.lattice))
        }
        _ => return None,
    };
    Some(AbelianCoords {
        spec: spec.clone(),
        lattice,
    })
}

fn block_diagonal<'a>(blocks: impl Iterator<Item = &'a IntegerMatrix> + Clone) -> IntegerMatrix {
    let rows: usize = blocks.clone().map(IntegerMatrix::rows).sum();
    let cols: usize = blocks.clone().map(IntegerMatrix::cols).sum();
    let mut out = IntegerMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out
}

impl AbelianCoords {
    pub fn dimension(&self) -> usize {
        self.lattice.cols()
    }

    pub fn coords(&self, x: &GroupElement) -> Option<Vec<BigInt>> {
        coords_of(&self.spec, x)
    }

    /// The canonical element with the given coordinates.
    pub fn element(&self, c: &[BigInt]) -> Result<GroupElement> {
        if c.len() != self.dimension() {
            return Err(Error::KindMismatch(format!(
                "{} coordinates for a group of dimension {}",
                c.len(),
                self.dimension()
            )));
        }
        element_of(&self.spec, c)
    }
}

fn coords_of(spec: &GroupSpec, x: &GroupElement) -> Option<Vec<BigInt>> {
    if !spec.contains(x) {
        return None;
    }
    match (spec, x) {
        (GroupSpec::FreeAbelian { .. } | GroupSpec::PresentedAbelian(_), GroupElement::Vector(v)) => {
            Some(v.iter().map(|&c| BigInt::from(c)).collect())
        }
        (GroupSpec::Free { rank }, GroupElement::Word(w)) => {
            let s: i64 = w.iter().map(|&l| l.signum() as i64).sum();
            Some(if *rank == 0 { vec![] } else { vec![BigInt::from(s)] })
        }
        (GroupSpec::FiniteCyclic { .. }, GroupElement::Residue(r)) => Some(vec![BigInt::from(*r)]),
        (GroupSpec::RationalsTruncated { depth }, GroupElement::Rational(q)) => {
            Some(vec![(q * BigRational::from_integer(factorial(*depth))).to_integer()])
        }
        (GroupSpec::DirectProduct(fs), GroupElement::Tuple(xs)) => {
            let mut out = Vec::new();
            for (f, xi) in fs.iter().zip(xs) {
                out.extend(coords_of(f, xi)?);
            }
            Some(out)
        }
        _ => None,
    }
}

fn element_of(spec: &GroupSpec, c: &[BigInt]) -> Result<GroupElement> {
    match spec {
        GroupSpec::FreeAbelian { .. } => Ok(GroupElement::Vector(
            c.iter().map(|x| to_i64(x, "coordinate")).collect::<Result<_>>()?,
        )),
        GroupSpec::PresentedAbelian(p) => {
            let y = p.reduce(c.to_vec());
            Ok(GroupElement::Vector(
                y.iter().map(|x| to_i64(x, "coordinate")).collect::<Result<_>>()?,
            ))
        }
        GroupSpec::Free { .. } => {
            let n = c.first().map_or(Ok(0), |x| to_i64(x, "coordinate"))?;
            let letter = if n < 0 { -1 } else { 1 };
            Ok(GroupElement::Word(vec![letter; n.unsigned_abs() as usize]))
        }
        GroupSpec::FiniteCyclic { order } => Ok(GroupElement::Residue(
            c[0].mod_floor(&BigInt::from(*order)).to_u64().expect("residue fits"),
        )),
        GroupSpec::RationalsTruncated { depth } => Ok(GroupElement::Rational(BigRational::new(
            c[0].clone(),
            factorial(*depth),
        ))),
        GroupSpec::DirectProduct(fs) => {
            let mut offset = 0;
            let mut parts = Vec::with_capacity(fs.len());
            for f in fs {
                let dim = abelian_coords(f)
                    .ok_or_else(|| Error::Unsupported("non-abelian factor".into()))?
                    .dimension();
                parts.push(element_of(f, &c[offset..offset + dim])?);
                offset += dim;
            }
            Ok(GroupElement::Tuple(parts))
        }
        GroupSpec::Heisenberg => Err(Error::Unsupported("heisenberg group is not abelian".into())),
    }
}

/// Presentation `(generator count, relation rows)` of an abelian group in
/// terms of its standard generators.
pub fn abelian_presentation(spec: &GroupSpec) -> Option<(usize, IntegerMatrix)> {
    match spec {
        GroupSpec::FreeAbelian { rank } => Some((*rank, IntegerMatrix::zeros(0, *rank))),
        GroupSpec::Free { rank } if *rank <= 1 => Some((*rank, IntegerMatrix::zeros(0, *rank))),
        GroupSpec::FiniteCyclic { order } => Some((1, IntegerMatrix::from_rows(1, &[vec![*order as i64]]).ok()?)),
        GroupSpec::PresentedAbelian(p) => Some((p.generators(), p.relations().clone())),
        GroupSpec::RationalsTruncated { depth } => {
            let k = *depth as usize;
            let rows: Vec<Vec<i64>> = (2..=k)
                .map(|n| {
                    let mut r = vec![0; k];
                    r[n - 1] = n as i64;
                    r[n - 2] = -1;
                    r
                })
                .collect();
            Some((k, IntegerMatrix::from_rows(k, &rows).ok()?))
        }
        GroupSpec::DirectProduct(fs) => {
            let parts: Vec<(usize, IntegerMatrix)> = fs.iter().map(abelian_presentation).collect::<Option<_>>()?;
            let n = parts.iter().map(|p| p.0).sum();
            Some((n, block_diagonal(parts.iter().map(|p| &p.1))))
        }
        _ => None,
    }
}

/// Positive generator of the cyclic subgroup of Q generated by `elements`
/// (zero for the trivial subgroup).
pub fn cyclic_generator(elements: &[BigRational]) -> BigRational {
    elements
        .iter()
        .fold(BigRational::zero(), |g, x| crate::rational::rational_gcd(&g, x))
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use GroupElement::*;

    #[test]
    fn heisenberg_law() {
        let h = GroupSpec::Heisenberg;
        assert_eq!(h.multiply(&Triple(1, 0, 0), &Triple(0, 1, 0)).unwrap(), Triple(1, 1, 1));
        assert_eq!(h.multiply(&Triple(0, 1, 0), &Triple(1, 0, 0)).unwrap(), Triple(1, 1, 0));
        let x = Triple(3, -2, 5);
        // (a,b,c)⁻¹ = (−a,−b,−c+ab)
        assert_eq!(h.invert(&x).unwrap(), Triple(-3, 2, -5 + 3 * -2));
        assert_eq!(h.multiply(&x, &h.invert(&x).unwrap()).unwrap(), h.identity());
        assert_eq!(
            h.commutator(&Triple(1, 0, 0), &Triple(0, 1, 0)).unwrap(),
            Triple(0, 0, 1)
        );
    }

    #[test]
    fn simple_laws() {
        let z2 = GroupSpec::FreeAbelian { rank: 2 };
        assert_eq!(
            z2.multiply(&Vector(vec![1, 2]), &Vector(vec![3, -2])).unwrap(),
            Vector(vec![4, 0])
        );
        let f2 = GroupSpec::Free { rank: 2 };
        assert_eq!(
            f2.multiply(&Word(vec![1, 2]), &Word(vec![-2, 1])).unwrap(),
            Word(vec![1, 1])
        );
        let c5 = GroupSpec::FiniteCyclic { order: 5 };
        assert_eq!(c5.invert(&Residue(2)).unwrap(), Residue(3));
        let q3 = GroupSpec::RationalsTruncated { depth: 3 };
        assert_eq!(q3.invert(&Rational(frac(5, 6))).unwrap(), Rational(frac(-5, 6)));
        assert!(q3.contains(&Rational(frac(5, 6))));
        assert!(!q3.contains(&Rational(frac(1, 4))));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let z2 = GroupSpec::FreeAbelian { rank: 2 };
        assert!(matches!(
            z2.multiply(&Vector(vec![1]), &Vector(vec![1, 2])),
            Err(Error::KindMismatch(_))
        ));
        assert!(matches!(
            GroupSpec::Heisenberg.invert(&Residue(1)),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn free_words_are_reduced() {
        let f2 = GroupSpec::Free { rank: 2 };
        assert!(f2.contains(&Word(vec![1, 2, -1])));
        assert!(!f2.contains(&Word(vec![1, -1])));
        assert!(!f2.contains(&Word(vec![3])));
        let w = Word(vec![1, 2, -1]);
        assert_eq!(f2.multiply(&w, &f2.invert(&w).unwrap()).unwrap(), Word(vec![]));
    }

    #[test]
    fn homomorphism_examples() {
        let z2 = GroupSpec::FreeAbelian { rank: 2 };
        let z = GroupSpec::FreeAbelian { rank: 1 };
        let proj = Homomorphism::new(z2.clone(), z.clone(), vec![Vector(vec![1]), Vector(vec![0])]).unwrap();
        assert_eq!(proj.apply(&Vector(vec![3, 7])).unwrap(), Vector(vec![3]));

        let red = Homomorphism::new(z, GroupSpec::FiniteCyclic { order: 5 }, vec![Residue(1)]).unwrap();
        assert_eq!(red.apply(&Vector(vec![12])).unwrap(), Residue(2));

        let ab = Homomorphism::new(
            GroupSpec::Free { rank: 2 },
            z2.clone(),
            vec![Vector(vec![1, 0]), Vector(vec![0, 1])],
        )
        .unwrap();
        assert_eq!(ab.apply(&Word(vec![1, 2, -1])).unwrap(), Vector(vec![0, 1]));

        let heis_ab =
            Homomorphism::new(GroupSpec::Heisenberg, z2, vec![Vector(vec![1, 0]), Vector(vec![0, 1])]).unwrap();
        assert_eq!(heis_ab.apply(&Triple(2, 3, 17)).unwrap(), Vector(vec![2, 3]));
    }

    #[test]
    fn relations_are_checked() {
        // Z/5 → Z/3 sending 1 to 1 does not respect 5·1 = 0
        let bad = Homomorphism::new(
            GroupSpec::FiniteCyclic { order: 5 },
            GroupSpec::FiniteCyclic { order: 3 },
            vec![Residue(1)],
        );
        assert!(matches!(bad, Err(Error::InvalidHomomorphism(_))));
        // Z² → F₂ with non-commuting images
        let bad = Homomorphism::new(
            GroupSpec::FreeAbelian { rank: 2 },
            GroupSpec::Free { rank: 2 },
            vec![Word(vec![1]), Word(vec![2])],
        );
        assert!(bad.is_err());
        // Q_3 → Q_3 scaling by 2 is fine
        let q3 = GroupSpec::RationalsTruncated { depth: 3 };
        let doubled: Vec<_> = q3.generators().iter().map(|g| q3.power(g, 2).unwrap()).collect();
        let h = Homomorphism::new(q3.clone(), q3.clone(), doubled).unwrap();
        assert_eq!(h.apply(&Rational(frac(5, 6))).unwrap(), Rational(frac(5, 3)));
    }

    #[test]
    fn rational_subgroups_are_cyclic() {
        assert_eq!(cyclic_generator(&[frac(1, 2), frac(1, 3)]), frac(1, 6));
        assert_eq!(cyclic_generator(&[frac(-4, 6), frac(2, 1)]), frac(2, 3));
        assert_eq!(cyclic_generator(&[]), BigRational::zero());
    }

    #[test]
    fn abelian_coordinates_round_trip() {
        let spec = GroupSpec::DirectProduct(vec![
            GroupSpec::FiniteCyclic { order: 4 },
            GroupSpec::RationalsTruncated { depth: 3 },
            GroupSpec::FreeAbelian { rank: 2 },
        ]);
        let c = abelian_coords(&spec).unwrap();
        assert_eq!(c.dimension(), 4);
        let x = Tuple(vec![Residue(3), Rational(frac(5, 6)), Vector(vec![-1, 2])]);
        let v = c.coords(&x).unwrap();
        assert_eq!(v, vec![3, 5, -1, 2].into_iter().map(BigInt::from).collect::<Vec<_>>());
        assert_eq!(c.element(&v).unwrap(), x);
        assert!(abelian_coords(&GroupSpec::Heisenberg).is_none());
    }
}
