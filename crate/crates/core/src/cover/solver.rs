//! Minimal-diameter cover search on finite metric tables.
//!
//! A coloring of the points with `k` colors induces `k` families: the sets
//! of family `c` are the `d`-components of color class `c` (classes of the
//! transitive closure of "same color and distance ≤ d"). Such families are
//! `d`-disjoint by construction, and every `d`-disjoint cover by `k`
//! families arises this way. The solver minimizes the largest component
//! diameter.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{CoverCertificate, ExplicitFamily, Family};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::metric::MetricContext;

/// Largest instance accepted by [`exhaustive_cover_oracle`].
pub const ORACLE_MAX_POINTS: usize = 16;

/// Exact pairwise distances between finitely many labelled points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTable {
    ids: Vec<String>,
    dist: Vec<BigRational>,
    elements: Option<Vec<GroupElement>>,
}

impl MetricTable {
    /// Builds a table from the upper triangle `d(0,1), d(0,2), …, d(n-2,n-1)`.
    pub fn new(ids: Vec<String>, upper: Vec<BigRational>) -> Result<Self> {
        let n = ids.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidInstance(format!(
                "{n} points need {} distances, got {}",
                n * n.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(Error::InvalidInstance(format!("duplicate point id {id}")));
            }
        }
        let mut dist = vec![BigRational::zero(); n * n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().expect("length checked");
                if !v.is_positive() {
                    return Err(Error::InvalidInstance(format!(
                        "distance between {} and {} must be positive",
                        ids[i], ids[j]
                    )));
                }
                dist[i * n + j] = v.clone();
                dist[j * n + i] = v;
            }
        }
        Ok(MetricTable {
            ids,
            dist,
            elements: None,
        })
    }

    /// The closed ball of radius `r` in ball order, with exact distances.
    pub fn from_ball(ctx: &MetricContext, r: &BigRational) -> Result<Self> {
        let ball = ctx.ball_with_norms(r)?;
        let elements: Vec<GroupElement> = ball.elements().cloned().collect();
        let g = ctx.group();
        let n = elements.len();
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, (x, nx)) in ball.entries().iter().enumerate() {
            let inv = g.invert(x)?;
            for (y, ny) in &ball.entries()[i + 1..] {
                upper.push(ctx.norm_within(&g.multiply(&inv, y)?, &(nx + ny))?);
            }
        }
        let mut table = Self::new(elements.iter().map(ToString::to_string).collect(), upper)?;
        table.elements = Some(elements);
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn elements(&self) -> Option<&[GroupElement]> {
        self.elements.as_deref()
    }

    pub fn distance(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i * self.len() + j]
    }

    /// Distances in upper-triangular row-major order.
    pub fn upper_triangular(&self) -> Vec<BigRational> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j).clone())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// Best maximal component diameter found; optimal when `exact`.
    pub r_star: BigRational,
    pub exact: bool,
    /// Proven lower bound on the optimum; equals `r_star` when `exact`.
    pub lower_bound: BigRational,
    /// Color of each point; lexicographically least among optimal
    /// colorings when `exact`.
    pub coloring: Vec<usize>,
    pub nodes: u64,
}

/// Distances replaced by their rank among the distinct values, rank 0 being
/// distance zero.
struct Ranked {
    n: usize,
    rank: Vec<u32>,
    near: Vec<bool>,
    values: Vec<BigRational>,
}

impl Ranked {
    fn new(table: &MetricTable, d: &BigRational) -> Self {
        let n = table.len();
        let mut values: Vec<BigRational> = table.dist.clone();
        values.push(BigRational::zero());
        values.sort();
        values.dedup();
        let index: HashMap<&BigRational, u32> = values.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let rank = table.dist.iter().map(|v| index[v]).collect();
        let near = table.dist.iter().map(|v| v <= d).collect();
        Ranked { n, rank, near, values }
    }

    fn rank(&self, i: usize, j: usize) -> u32 {
        self.rank[i * self.n + j]
    }

    fn near(&self, i: usize, j: usize) -> bool {
        self.near[i * self.n + j]
    }
}

struct Search<'a> {
    r: &'a Ranked,
    k: usize,
    color: Vec<usize>,
    label: Vec<usize>,
    incumbent: u32,
    best: Vec<usize>,
    found: bool,
    budget: u64,
    nodes: u64,
    aborted: bool,
    open_bound: u32,
}

impl Search<'_> {
    /// Diameter of the component `p` would join with color `c`, given points
    /// `0..p` colored.
    fn joined_diameter(&self, p: usize, c: usize, scratch: &mut Vec<usize>) -> u32 {
        scratch.clear();
        let mut labels: Vec<usize> = Vec::new();
        for q in 0..p {
            if self.color[q] == c && self.r.near(p, q) && !labels.contains(&self.label[q]) {
                labels.push(self.label[q]);
            }
        }
        for q in 0..p {
            if self.color[q] == c && labels.contains(&self.label[q]) {
                scratch.push(q);
            }
        }
        scratch.push(p);
        let mut diam = 0;
        for (a, &x) in scratch.iter().enumerate() {
            for &y in &scratch[a + 1..] {
                diam = diam.max(self.r.rank(x, y));
            }
        }
        diam
    }

    fn pruned(&self, value: u32) -> bool {
        if self.found {
            value >= self.incumbent
        } else {
            value > self.incumbent
        }
    }

    fn dfs(&mut self, p: usize, current: u32, used: usize) {
        if p == self.r.n {
            if !self.pruned(current) {
                self.incumbent = current;
                self.best = self.color.clone();
                self.found = true;
            }
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            self.open_bound = self.open_bound.min(current);
            return;
        }
        let mut scratch = Vec::with_capacity(self.r.n);
        let top = used.min(self.k - 1);
        for c in 0..=top {
            let value = current.max(self.joined_diameter(p, c, &mut scratch));
            if self.aborted {
                self.open_bound = self.open_bound.min(value);
                continue;
            }
            if self.pruned(value) {
                continue;
            }
            let saved: Vec<(usize, usize)> = scratch[..scratch.len() - 1]
                .iter()
                .map(|&q| (q, self.label[q]))
                .collect();
            for &(q, _) in &saved {
                self.label[q] = p;
            }
            self.color[p] = c;
            self.label[p] = p;
            self.dfs(p + 1, value, used.max(c + 1));
            for (q, l) in saved {
                self.label[q] = l;
            }
        }
    }
}

/// Greedy first-fit: each point takes the color keeping its component
/// smallest, lowest color on ties.
fn greedy(r: &Ranked, k: usize) -> (u32, Vec<usize>) {
    let mut s = Search {
        r,
        k,
        color: vec![0; r.n],
        label: (0..r.n).collect(),
        incumbent: 0,
        best: Vec::new(),
        found: false,
        budget: 0,
        nodes: 0,
        aborted: false,
        open_bound: 0,
    };
    let mut scratch = Vec::new();
    let mut value = 0;
    for p in 0..r.n {
        let (c, v) = (0..k)
            .map(|c| (c, s.joined_diameter(p, c, &mut scratch)))
            .min_by_key(|&(c, v)| (v, c))
            .expect("k ≥ 1");
        s.joined_diameter(p, c, &mut scratch);
        for &q in &scratch[..scratch.len() - 1] {
            s.label[q] = p;
        }
        s.color[p] = c;
        s.label[p] = p;
        value = value.max(v);
    }
    (value, normalize(&s.color))
}

/// Relabels colors in order of first appearance.
fn normalize(coloring: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    coloring
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Branch-and-bound search for a `k`-coloring minimizing the largest
/// `d`-component diameter. Points are branched on in table order, colors
/// in increasing order under first-appearance symmetry breaking; subtrees
/// whose partial diameter cannot beat the incumbent are pruned. `budget`
/// limits the number of search nodes.
pub fn solve_min_diameter(table: &MetricTable, k: usize, d: &BigRational, budget: u64) -> Result<SolveResult> {
    if k == 0 {
        return Err(Error::InvalidInstance("k must be at least 1".into()));
    }
    if !d.is_positive() {
        return Err(Error::InvalidInstance("d must be positive".into()));
    }
    let r = Ranked::new(table, d);
    if r.n == 0 {
        return Ok(SolveResult {
            r_star: BigRational::zero(),
            exact: true,
            lower_bound: BigRational::zero(),
            coloring: Vec::new(),
            nodes: 0,
        });
    }
    let (greedy_value, greedy_coloring) = greedy(&r, k);
    let mut s = Search {
        r: &r,
        k,
        color: vec![0; r.n],
        label: (0..r.n).collect(),
        incumbent: greedy_value,
        best: greedy_coloring,
        found: false,
        budget,
        nodes: 0,
        aborted: false,
        open_bound: u32::MAX,
    };
    s.dfs(0, 0, 0);
    let r_star = r.values[s.incumbent as usize].clone();
    let lower_bound = if s.aborted {
        r.values[s.open_bound.min(s.incumbent) as usize].clone()
    } else {
        r_star.clone()
    };
    Ok(SolveResult {
        r_star,
        exact: !s.aborted,
        lower_bound,
        coloring: s.best,
        nodes: s.nodes,
    })
}

/// Exact optimum by enumerating all `k^n` colorings in lexicographic
/// order; returns the optimum and the first coloring attaining it.
pub fn exhaustive_cover_oracle(table: &MetricTable, k: usize, d: &BigRational) -> Result<(BigRational, Vec<usize>)> {
    let n = table.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::InvalidInstance(format!(
            "the exhaustive oracle accepts at most {ORACLE_MAX_POINTS} points, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInstance("k must be at least 1".into()));
    }
    let mut coloring = vec![0usize; n];
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    loop {
        let value = coloring_diameter(table, &coloring, d);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, coloring.clone()));
        }
        // odometer with the last point as the least significant digit
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best.unwrap_or((BigRational::zero(), Vec::new())));
            }
            i -= 1;
            coloring[i] += 1;
            if coloring[i] < k {
                break;
            }
            coloring[i] = 0;
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// `d`-components of each color class, as point index lists in increasing
/// order, grouped by color.
pub(crate) fn components(table: &MetricTable, coloring: &[usize], d: &BigRational) -> Vec<Vec<usize>> {
    let n = table.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if coloring[i] == coloring[j] && table.distance(i, j) <= d {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

fn coloring_diameter(table: &MetricTable, coloring: &[usize], d: &BigRational) -> BigRational {
    let mut best = BigRational::zero();
    for comp in components(table, coloring, d) {
        for (a, &i) in comp.iter().enumerate() {
            for &j in &comp[a + 1..] {
                if table.distance(i, j) > &best {
                    best = table.distance(i, j).clone();
                }
            }
        }
    }
    best
}

/// The `k` families induced by a coloring of a ball table: family `c`
/// holds the `d`-components of color `c`.
pub fn coloring_certificate(
    table: &MetricTable,
    coloring: &[usize],
    k: usize,
    d: &BigRational,
    bound: &BigRational,
) -> Result<CoverCertificate> {
    let elements = table
        .elements()
        .ok_or_else(|| Error::InvalidInstance("table has no group elements attached".into()))?;
    if coloring.len() != table.len() || coloring.iter().any(|&c| c >= k) {
        return Err(Error::InvalidInstance("coloring does not match the table".into()));
    }
    let mut families: Vec<Vec<BTreeSet<GroupElement>>> = vec![Vec::new(); k];
    for comp in components(table, coloring, d) {
        let c = coloring[comp[0]];
        families[c].push(comp.iter().map(|&i| elements[i].clone()).collect());
    }
    let families = families
        .into_iter()
        .map(|sets| ExplicitFamily::new(sets).map(Family::Explicit))
        .collect::<Result<Vec<_>>>()?;
    CoverCertificate::new(d.clone(), bound.clone(), families)
}

/// Ball table of `Zⁿ` with unit weights, used by tests and examples.
#[doc(hidden)]
pub fn lattice_ball_table(rank: usize, radius: i64) -> Result<MetricTable> {
    let ctx = MetricContext::standard(crate::group::GroupSpec::FreeAbelian { rank })?;
    MetricTable::from_ball(&ctx, &BigRational::from_integer(BigInt::from(radius)))
}
