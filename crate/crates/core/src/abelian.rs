//! Exact integer linear algebra: Smith normal form, ranks, kernels and
//! finitely presented abelian groups.
//!
//! The rank of a finitely generated abelian group `A = Z^n / rowspace(R)` is
//! `dim_Q(A ⊗ Q) = n - rank(R)`, which is also its asymptotic dimension;
//! torsion contributes nothing.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{abelian_coords, abelian_presentation, Homomorphism};

/// Dense row-major integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows, all of which must have `cols` entries.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidSpec(format!(
                    "matrix row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    cols
                )));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "matrix dimensions do not agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += xi * &self[(i, j)];
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        IntegerMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(source, j)] * factor;
            self[(target, j)] += v;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, source)] * factor;
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    /// Inverse of `v`, maintained alongside it.
    pub v_inv: IntegerMatrix,
}

impl SnfResult {
    /// Diagonal of `D`, `min(rows, cols)` entries.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Checks every postcondition exactly against the input matrix.
    pub fn verify(&self, a: &IntegerMatrix) -> std::result::Result<(), String> {
        if self.u.mul(a).mul(&self.v) != self.d {
            return Err("U·A·V != D".into());
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return Err(format!("D has off-diagonal entry at ({i},{j})"));
                }
            }
        }
        let diag = self.diagonal();
        if diag.iter().any(Signed::is_negative) {
            return Err("negative diagonal entry".into());
        }
        for w in diag.windows(2) {
            let ok = if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            };
            if !ok {
                return Err(format!("divisibility chain broken: {} does not divide {}", w[0], w[1]));
            }
        }
        if !self.u.determinant().abs().is_one() {
            return Err("U is not unimodular".into());
        }
        if !self.v.determinant().abs().is_one() {
            return Err("V is not unimodular".into());
        }
        if self.v.mul(&self.v_inv) != IntegerMatrix::identity(self.v.rows()) {
            return Err("V_inv is not the inverse of V".into());
        }
        Ok(())
    }
}

static SNF_CALLS: AtomicUsize = AtomicUsize::new(0);
static SNF_VERIFIED: AtomicUsize = AtomicUsize::new(0);

/// Number of Smith decompositions computed so far.
pub fn snf_calls() -> usize {
    SNF_CALLS.load(Ordering::Relaxed)
}

/// Number of Smith decompositions whose postconditions were checked by exact
/// multiplication so far (debug builds check every call).
pub fn snf_verified_calls() -> usize {
    SNF_VERIFIED.load(Ordering::Relaxed)
}

/// Smith normal form with smallest-absolute-value pivoting.
///
/// The diagonal of `D` is canonical; `U` and `V` are deterministic for a
/// fixed input but not unique.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    SNF_CALLS.fetch_add(1, Ordering::Relaxed);
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    let mut v_inv = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&d, (t..m).flat_map(|i| (t..n).map(move |j| (i, j)))) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            // reduce column t and row t modulo the pivot
            for i in t + 1..m {
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    let neg = -q;
                    d.add_row(i, t, &neg);
                    u.add_row(i, t, &neg);
                }
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    let neg = -&q;
                    d.add_col(j, t, &neg);
                    v.add_col(j, t, &neg);
                    v_inv.add_row(t, j, &q);
                }
            }

            let remainders = (t + 1..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
            if let Some((i, j)) = min_abs_entry(&d, remainders) {
                // a nonzero remainder is strictly smaller than the pivot
                if i != t {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                } else {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    v_inv.swap_rows(t, j);
                }
                continue;
            }

            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    let result = SnfResult { u, d, v, v_inv };
    if cfg!(debug_assertions) {
        if let Err(e) = result.verify(a) {
            panic!("Smith normal form postcondition failed: {e}");
        }
        SNF_VERIFIED.fetch_add(1, Ordering::Relaxed);
    }
    result
}

/// Position of the nonzero entry of least absolute value among `cells`,
/// first in scan order on ties.
fn min_abs_entry(d: &IntegerMatrix, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let x = &d[(i, j)];
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if best.as_ref().is_none_or(|(_, b)| a < *b) {
            best = Some(((i, j), a));
        }
    }
    best.map(|(p, _)| p)
}

/// Rank of an integer matrix (over Q).
pub fn matrix_rank(a: &IntegerMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Basis (as rows) of the left kernel `{x : x·A = 0}`.
pub fn left_kernel(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let rows: Vec<Vec<BigInt>> = (r..a.rows()).map(|i| snf.u.row(i).to_vec()).collect();
    IntegerMatrix::from_rows(a.rows(), &rows).expect("kernel rows have the right width")
}

/// Solves `x·A = y` over the integers. Returns one solution (the one with
/// zero kernel component in Smith coordinates) or `None`.
pub fn solve_left(a: &IntegerMatrix, y: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(y.len(), a.cols());
    let snf = smith_normal_form(a);
    let yv = snf.v.left_apply(y);
    let diag = snf.diagonal();
    let mut w = vec![BigInt::zero(); a.rows()];
    for (j, target) in yv.iter().enumerate() {
        let dj = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if dj.is_zero() {
            if !target.is_zero() {
                return None;
            }
        } else {
            let (q, r) = target.div_rem(&dj);
            if !r.is_zero() {
                return None;
            }
            w[j] = q;
        }
    }
    Some(snf.u.left_apply(&w))
}

/// Canonical coordinates for `Z^n / rowspace(R)` derived from the Smith
/// decomposition `U·R·V = D`: an element `x` maps to `x·V` reduced modulo the
/// diagonal entries.
#[derive(Debug)]
struct AbelianNormalForm {
    moduli: Vec<BigInt>,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

/// A finitely presented abelian group `Z^generators / rowspace(relations)`.
///
/// The Smith decomposition of the relations is computed once at
/// construction and shared by clones.
#[derive(Clone)]
pub struct PresentedAbelian {
    generators: usize,
    relations: IntegerMatrix,
    normal: Arc<AbelianNormalForm>,
}

impl PresentedAbelian {
    pub fn new(generators: usize, relations: IntegerMatrix) -> Result<Self> {
        if generators == 0 {
            return Err(Error::InvalidSpec(
                "presented abelian group needs at least one generator".into(),
            ));
        }
        if relations.cols() != generators {
            return Err(Error::InvalidSpec(format!(
                "relation matrix has {} columns but the presentation has {} generators",
                relations.cols(),
                generators
            )));
        }
        let snf = smith_normal_form(&relations);
        let diag = snf.diagonal();
        let moduli = (0..generators)
            .map(|i| diag.get(i).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        Ok(PresentedAbelian {
            generators,
            relations,
            normal: Arc::new(AbelianNormalForm {
                moduli,
                v: snf.v,
                v_inv: snf.v_inv,
            }),
        })
    }

    pub fn free(generators: usize) -> Result<Self> {
        Self::new(generators, IntegerMatrix::zeros(0, generators))
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntegerMatrix {
        &self.relations
    }

    /// Per canonical coordinate: 0 for a free coordinate, otherwise the
    /// modulus the coordinate is reduced by (1 means always zero).
    pub fn moduli(&self) -> &[BigInt] {
        &self.normal.moduli
    }

    /// Canonical form of the element with generator exponents `x`.
    pub fn canonicalize(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.normal.v.left_apply(x);
        self.reduce(y)
    }

    /// Reduces a vector already in canonical coordinates.
    pub fn reduce(&self, mut y: Vec<BigInt>) -> Vec<BigInt> {
        for (c, m) in y.iter_mut().zip(&self.normal.moduli) {
            if !m.is_zero() {
                *c = c.mod_floor(m);
            }
        }
        y
    }

    /// Generator exponents of some representative of a canonical element.
    pub fn exponents(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.normal.v_inv.left_apply(y)
    }

    pub fn is_canonical(&self, y: &[BigInt]) -> bool {
        y.len() == self.generators && self.reduce(y.to_vec()) == y
    }

    pub fn rank_and_torsion(&self) -> RankTorsion {
        RankTorsion {
            rank: self.normal.moduli.iter().filter(|m| m.is_zero()).count(),
            torsion: self
                .normal
                .moduli
                .iter()
                .filter(|m| !m.is_zero() && !m.is_one())
                .cloned()
                .collect(),
        }
    }
}

impl PartialEq for PresentedAbelian {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.relations == other.relations
    }
}

impl Eq for PresentedAbelian {}

impl fmt::Debug for PresentedAbelian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PresentedAbelian")
            .field("generators", &self.generators)
            .field("relations", &self.relations)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTorsion {
    /// `dim_Q(A ⊗ Q)`.
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

pub fn rank_and_torsion(p: &PresentedAbelian) -> RankTorsion {
    p.rank_and_torsion()
}

/// Asymptotic dimension of a finitely generated abelian group: its rank.
pub fn asdim_abelian(p: &PresentedAbelian) -> usize {
    p.rank_and_torsion().rank
}

/// Presentation of `A × B` from presentations of the factors.
pub fn direct_sum(a: &PresentedAbelian, b: &PresentedAbelian) -> Result<PresentedAbelian> {
    let n = a.generators + b.generators;
    let mut rel = IntegerMatrix::zeros(a.relations.rows() + b.relations.rows(), n);
    for i in 0..a.relations.rows() {
        for j in 0..a.generators {
            rel[(i, j)] = a.relations[(i, j)].clone();
        }
    }
    for i in 0..b.relations.rows() {
        for j in 0..b.generators {
            rel[(a.relations.rows() + i, a.generators + j)] = b.relations[(i, j)].clone();
        }
    }
    PresentedAbelian::new(n, rel)
}

/// Ranks in the exact sequence `0 → ker f → A → im f → 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SesReport {
    pub rank_a: usize,
    pub rank_b: usize,
    pub rank_c: usize,
    pub additive: bool,
}

/// Computes the ranks of source, kernel and image of an abelian
/// homomorphism. Additivity always holds for a correct implementation, so a
/// `false` flag indicates a bug.
pub fn ses_additivity_check(f: &Homomorphism) -> Result<SesReport> {
    let (m, rel_a) = abelian_presentation(f.source())
        .ok_or_else(|| Error::Unsupported("source of the homomorphism is not abelian".into()))?;
    let target_lattice = abelian_coords(f.target())
        .ok_or_else(|| Error::Unsupported("target of the homomorphism is not abelian".into()))?
        .lattice;
    let images: Vec<Vec<BigInt>> = f
        .images()
        .iter()
        .map(|g| abelian_coords(f.target()).and_then(|c| c.coords(g)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::KindMismatch("image is not an element of the target".into()))?;
    let n = target_lattice.cols();
    let map = IntegerMatrix::from_rows(n, &images)?;

    // x·M ∈ rowspace(L_T): kernel of the stacked matrix, projected onto x.
    let stacked = map.stack(&target_lattice);
    let ker = left_kernel(&stacked);
    let ker_rows: Vec<Vec<BigInt>> = (0..ker.rows()).map(|i| ker.row(i)[..m].to_vec()).collect();
    let ker_x = IntegerMatrix::from_rows(m, &ker_rows)?;

    let rank_rel_a = matrix_rank(&rel_a);
    let rank_a = m - rank_rel_a;
    let rank_b = matrix_rank(&ker_x) - rank_rel_a;
    let rank_c = matrix_rank(&stacked) - matrix_rank(&target_lattice);
    Ok(SesReport {
        rank_a,
        rank_b,
        rank_c,
        additive: rank_a == rank_b + rank_c,
    })
}

/// Converts to `i64`, reporting overflow.
pub(crate) fn to_i64(x: &BigInt, what: &'static str) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow(what))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(cols: usize, rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(cols, rows).unwrap()
    }

    fn diag(a: &IntegerMatrix) -> Vec<i64> {
        smith_normal_form(a)
            .diagonal()
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn snf_small_cases() {
        // gcd of entries is 2 and |det| = 8
        assert_eq!(diag(&mat(2, &[vec![2, 4], vec![6, 8]])), vec![2, 4]);
        assert_eq!(diag(&IntegerMatrix::zeros(2, 3)), vec![0, 0]);
        assert_eq!(diag(&IntegerMatrix::identity(3)), vec![1, 1, 1]);
        assert_eq!(diag(&mat(2, &[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert_eq!(diag(&mat(3, &[vec![-4, 6, 10]])), vec![2]);
    }

    #[test]
    fn snf_empty_shapes() {
        let r = smith_normal_form(&IntegerMatrix::zeros(0, 3));
        assert_eq!(r.rank(), 0);
        assert_eq!(r.v.rows(), 3);
        let r = smith_normal_form(&IntegerMatrix::zeros(2, 0));
        assert_eq!(r.u.rows(), 2);
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(mat(2, &[vec![2, 4], vec![6, 8]]).determinant(), BigInt::from(-8));
        assert_eq!(
            mat(3, &[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).determinant(),
            BigInt::from(-2)
        );
    }

    #[test]
    fn rank_and_torsion_examples() {
        let p = PresentedAbelian::new(3, mat(3, &[vec![2, 0, 0]])).unwrap();
        let rt = p.rank_and_torsion();
        assert_eq!(rt.rank, 2);
        assert_eq!(rt.torsion, vec![BigInt::from(2)]);

        let z6 = PresentedAbelian::new(1, mat(1, &[vec![6]])).unwrap();
        assert_eq!(z6.rank_and_torsion().torsion, vec![BigInt::from(6)]);
        assert_eq!(asdim_abelian(&z6), 0);

        assert_eq!(asdim_abelian(&PresentedAbelian::free(3).unwrap()), 3);
        let z2_z4 = PresentedAbelian::new(3, mat(3, &[vec![0, 0, 4]])).unwrap();
        assert_eq!(asdim_abelian(&z2_z4), 2);
    }

    #[test]
    fn canonical_forms_identify_cosets() {
        // Z/2 ⊕ Z/3 ≅ Z/6
        let p = PresentedAbelian::new(2, mat(2, &[vec![2, 0], vec![0, 3]])).unwrap();
        let a = p.canonicalize(&[BigInt::from(1), BigInt::from(1)]);
        let b = p.canonicalize(&[BigInt::from(7), BigInt::from(-5)]);
        assert_eq!(a, b);
        let c = p.canonicalize(&[BigInt::from(1), BigInt::from(0)]);
        assert_ne!(a, c);
        assert!(p.is_canonical(&a));
        // exponents give back a representative of the same class
        let x = p.exponents(&a);
        assert_eq!(p.canonicalize(&x), a);
    }

    #[test]
    fn solve_and_kernel() {
        let a = mat(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let k = left_kernel(&a);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&a).is_zero());

        let five = mat(1, &[vec![5]]);
        assert_eq!(solve_left(&five, &[BigInt::from(15)]), Some(vec![BigInt::from(3)]));
        assert_eq!(solve_left(&five, &[BigInt::from(7)]), None);
    }

    #[test]
    fn direct_sum_adds_ranks() {
        let a = PresentedAbelian::new(2, mat(2, &[vec![0, 4]])).unwrap();
        let b = PresentedAbelian::free(2).unwrap();
        assert_eq!(asdim_abelian(&direct_sum(&a, &b).unwrap()), 3);
    }
}
