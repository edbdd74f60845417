//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (accepted from anything whose `str()` is `p` or `p/q`), integers as
//! Python ints and `∞` as the string `"inf"`.

use asdim_core::abelian::{self, IntegerMatrix, PresentedAbelian};
use asdim_core::cover::{self, CoverCertificate, MetricTable};
use asdim_core::group::{GroupElement, GroupSpec, Homomorphism};
use asdim_core::metric::{self, MetricContext};
use asdim_core::rational::parse_rational;
use asdim_core::solvable::{self, Bound as DimBound, SeriesSpec};
use asdim_core::workbench::{self, format_element, parse_element, SectionKind};
use asdim_core::{BigInt, BigRational};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

create_exception!(asdim, AsdimError, PyValueError, "Domain error raised by a computation.");
create_exception!(
    asdim,
    WorkbenchParseError,
    PyValueError,
    "Malformed workbench text or unknown section."
);

fn domain(e: asdim_core::Error) -> PyErr {
    AsdimError::new_err(e.to_string())
}

fn parse_err(message: impl Into<String>) -> PyErr {
    WorkbenchParseError::new_err(message.into())
}

fn to_rational(value: &Bound<'_, PyAny>, what: &str) -> PyResult<BigRational> {
    let text = value.str()?.to_string();
    parse_rational(&text).ok_or_else(|| PyValueError::new_err(format!("{what}: '{text}' is not a rational")))
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.numer().clone(), q.denom().clone()))
}

fn opt_fraction<'py>(py: Python<'py>, q: Option<&BigRational>) -> PyResult<Bound<'py, PyAny>> {
    match q {
        Some(q) => fraction(py, q),
        None => Ok(py.None().into_bound(py)),
    }
}

fn bound<'py>(py: Python<'py>, b: DimBound) -> PyResult<Bound<'py, PyAny>> {
    match b {
        DimBound::Finite(n) => Ok(n.into_pyobject(py)?.into_any()),
        DimBound::Infinite => Ok("inf".into_pyobject(py)?.into_any()),
    }
}

fn matrix(rows: &[Vec<BigInt>], cols: Option<usize>) -> PyResult<IntegerMatrix> {
    let width = match (cols, rows.first()) {
        (Some(c), _) => c,
        (None, Some(r)) => r.len(),
        (None, None) => return Err(PyValueError::new_err("matrix has no rows; pass the column count")),
    };
    IntegerMatrix::from_rows(width, rows).map_err(domain)
}

/// Parsed workbench file: groups, weights, homomorphisms, covers and series.
#[pyclass(frozen, module = "asdim")]
struct Workbench {
    inner: workbench::Workbench,
}

impl Workbench {
    fn context(&self, weights: &str) -> PyResult<MetricContext> {
        self.inner
            .weights(weights)
            .map(|w| w.context())
            .ok_or_else(|| parse_err(format!("no weights section named '{weights}'")))
    }

    fn hom(&self, name: Option<&str>) -> PyResult<Option<&Homomorphism>> {
        match name {
            None => Ok(None),
            Some(n) => self
                .inner
                .hom(n)
                .map(|h| Some(&h.hom))
                .ok_or_else(|| parse_err(format!("no hom section named '{n}'"))),
        }
    }

    fn series_named(&self, name: &str) -> PyResult<&SeriesSpec> {
        self.inner
            .series(name)
            .ok_or_else(|| parse_err(format!("no series section named '{name}'")))
    }
}

fn element(ctx: &MetricContext, text: &str) -> PyResult<GroupElement> {
    parse_element(ctx.group(), text).map_err(parse_err)
}

#[pymethods]
impl Workbench {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = workbench::parse(text).map_err(|e| parse_err(e.to_string()))?;
        Ok(Workbench { inner })
    }

    /// Reads and parses a workbench file.
    #[staticmethod]
    fn open(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("cannot read {path}: {e}")))?;
        Self::new(&text)
    }

    /// Section names of one kind: group, weights, cover, series or hom.
    fn names(&self, kind: &str) -> PyResult<Vec<String>> {
        let kind = match kind {
            "group" => SectionKind::Group,
            "weights" => SectionKind::Weights,
            "cover" => SectionKind::Cover,
            "series" => SectionKind::Series,
            "hom" => SectionKind::Hom,
            other => return Err(PyValueError::new_err(format!("unknown section kind '{other}'"))),
        };
        Ok(self.inner.names(kind).into_iter().map(String::from).collect())
    }

    /// Canonical text; parsing it gives back an equal workbench.
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Weighted word norm, or `None` above `cap`.
    fn norm<'py>(
        &self,
        py: Python<'py>,
        weights: &str,
        element_text: &str,
        cap: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ctx = self.context(weights)?;
        let x = element(&ctx, element_text)?;
        let n = ctx.norm(&x, &to_rational(cap, "cap")?).map_err(domain)?;
        opt_fraction(py, n.value())
    }

    /// Distance between two elements, or `None` above `cap`.
    fn distance<'py>(
        &self,
        py: Python<'py>,
        weights: &str,
        x: &str,
        y: &str,
        cap: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ctx = self.context(weights)?;
        let (x, y) = (element(&ctx, x)?, element(&ctx, y)?);
        let n = ctx.distance(&x, &y, &to_rational(cap, "cap")?).map_err(domain)?;
        opt_fraction(py, n.value())
    }

    /// Closed ball at the identity as `(element, norm)` pairs in norm order.
    fn ball<'py>(&self, py: Python<'py>, weights: &str, radius: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyList>> {
        let ctx = self.context(weights)?;
        let ball = ctx.ball_with_norms(&to_rational(radius, "radius")?).map_err(domain)?;
        let items = PyList::empty(py);
        for (x, n) in ball.entries() {
            items.append((format_element(ctx.group(), x), fraction(py, n)?))?;
        }
        Ok(items)
    }

    /// Rows `{t, rho1, rho1_certified, rho2}` of the distortion profile.
    #[pyo3(signature = (d, dprime, t_values, search, hom=None))]
    fn rho_profile<'py>(
        &self,
        py: Python<'py>,
        d: &str,
        dprime: &str,
        t_values: Vec<Bound<'py, PyAny>>,
        search: &Bound<'py, PyAny>,
        hom: Option<&str>,
    ) -> PyResult<Bound<'py, PyList>> {
        let (ctx_d, ctx_dp) = (self.context(d)?, self.context(dprime)?);
        let ts = t_values
            .iter()
            .map(|t| to_rational(t, "t"))
            .collect::<PyResult<Vec<_>>>()?;
        let rows = metric::rho_profile(&ctx_d, &ctx_dp, self.hom(hom)?, &ts, &to_rational(search, "search")?)
            .map_err(domain)?;
        let out = PyList::empty(py);
        for r in rows {
            let row = PyDict::new(py);
            row.set_item("t", fraction(py, &r.t)?)?;
            row.set_item("rho1", opt_fraction(py, r.rho1.as_ref())?)?;
            row.set_item("rho1_certified", r.rho1_certified)?;
            row.set_item("rho2", fraction(py, &r.rho2)?)?;
            out.append(row)?;
        }
        Ok(out)
    }

    /// Pairwise sandwich check on a ball: `{pairs_checked, rho1_certified,
    /// violations}` with violations as `(x, y)` element pairs.
    #[pyo3(signature = (d, dprime, radius, hom=None))]
    fn sandwich<'py>(
        &self,
        py: Python<'py>,
        d: &str,
        dprime: &str,
        radius: &Bound<'py, PyAny>,
        hom: Option<&str>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let (ctx_d, ctx_dp) = (self.context(d)?, self.context(dprime)?);
        let r = metric::check_coarse_sandwich(&ctx_d, &ctx_dp, self.hom(hom)?, &to_rational(radius, "radius")?)
            .map_err(domain)?;
        let g = ctx_d.group();
        let out = PyDict::new(py);
        out.set_item("pairs_checked", r.pairs_checked)?;
        out.set_item("rho1_certified", r.rho1_certified)?;
        let violations: Vec<(String, String)> = r
            .violations
            .iter()
            .map(|v| (format_element(g, &v.x), format_element(g, &v.y)))
            .collect();
        out.set_item("violations", violations)?;
        Ok(out)
    }

    /// Verifies a cover section on a ball. Without `weights` the cover's own
    /// weights are used, else unit weights for symbolic covers.
    #[pyo3(signature = (cover, radius, weights=None))]
    fn verify_cover<'py>(
        &self,
        py: Python<'py>,
        cover: &str,
        radius: &Bound<'py, PyAny>,
        weights: Option<&str>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let def = self
            .inner
            .cover(cover)
            .ok_or_else(|| parse_err(format!("no cover section named '{cover}'")))?;
        let ctx = match weights.or(def.weights.as_deref()) {
            Some(w) => self.context(w)?,
            None => match def.certificate.symbolic_rank() {
                Some(n) => MetricContext::standard(GroupSpec::FreeAbelian { rank: n }).map_err(domain)?,
                None => return Err(parse_err(format!("cover '{cover}' names no weights"))),
            },
        };
        let r = cover::verify_families(&def.certificate, &ctx, &to_rational(radius, "radius")?).map_err(domain)?;
        verify_dict(py, ctx.group(), &r)
    }

    /// Hirsch length of a series section, `"inf"` when unbounded.
    fn hirsch_length<'py>(&self, py: Python<'py>, series: &str) -> PyResult<Bound<'py, PyAny>> {
        bound(py, solvable::hirsch_length(self.series_named(series)?))
    }

    /// `(lower, upper)` asymptotic dimension bounds of a series section.
    fn bounds<'py>(&self, py: Python<'py>, series: &str) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
        let b = solvable::asdim_bounds(self.series_named(series)?).map_err(domain)?;
        Ok((bound(py, b.lower)?, bound(py, b.upper)?))
    }

    /// Derivation of the bounds as nested `{rule, lower, upper, note,
    /// children}` dicts.
    fn trace<'py>(&self, py: Python<'py>, series: &str) -> PyResult<Bound<'py, PyDict>> {
        let b = solvable::asdim_bounds(self.series_named(series)?).map_err(domain)?;
        trace_dict(py, &b.trace)
    }

    fn __repr__(&self) -> String {
        format!("Workbench({} sections)", self.inner.items().count())
    }
}

fn trace_dict<'py>(py: Python<'py>, node: &solvable::TraceNode) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("rule", node.rule.tag())?;
    out.set_item("lower", bound(py, node.lower)?)?;
    out.set_item("upper", bound(py, node.upper)?)?;
    out.set_item("note", &node.note)?;
    let children = PyList::empty(py);
    for c in &node.children {
        children.append(trace_dict(py, c)?)?;
    }
    out.set_item("children", children)?;
    Ok(out)
}

fn verify_dict<'py>(py: Python<'py>, g: &GroupSpec, r: &cover::VerifyReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("clean", r.is_clean())?;
    out.set_item("region_size", r.region_size)?;
    out.set_item("max_diameter", fraction(py, &r.max_diameter)?)?;
    let pairs: Vec<(usize, String, String)> = r
        .disjointness_violations
        .iter()
        .map(|v| (v.family, format_element(g, &v.x), format_element(g, &v.y)))
        .collect();
    out.set_item("disjointness_violations", pairs)?;
    out.set_item("nonstrict_violations", r.nonstrict_violations)?;
    out.set_item("bound_violations", r.bound_violations.len())?;
    let gaps: Vec<String> = r.coverage_gaps.iter().map(|x| format_element(g, x)).collect();
    out.set_item("coverage_gaps", gaps)?;
    out.set_item("symbolic_agree", r.symbolic_checks.iter().all(|c| c.agrees))?;
    Ok(out)
}

/// Smith normal form `U·A·V = D` as `{diagonal, u, d, v}`.
#[pyfunction]
#[pyo3(signature = (rows, cols=None))]
fn smith_normal_form<'py>(
    py: Python<'py>,
    rows: Vec<Vec<BigInt>>,
    cols: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let a = matrix(&rows, cols)?;
    let r = abelian::smith_normal_form(&a);
    r.verify(&a).map_err(AsdimError::new_err)?;
    let out = PyDict::new(py);
    out.set_item("diagonal", r.diagonal())?;
    out.set_item("u", r.u.to_rows())?;
    out.set_item("d", r.d.to_rows())?;
    out.set_item("v", r.v.to_rows())?;
    Ok(out)
}

fn presented(generators: usize, relations: &[Vec<BigInt>]) -> PyResult<PresentedAbelian> {
    PresentedAbelian::new(generators, matrix(relations, Some(generators))?).map_err(domain)
}

/// `(rank, torsion)` of the abelian group on `generators` with relation rows.
#[pyfunction]
fn rank_and_torsion(generators: usize, relations: Vec<Vec<BigInt>>) -> PyResult<(usize, Vec<BigInt>)> {
    let rt = abelian::rank_and_torsion(&presented(generators, &relations)?);
    Ok((rt.rank, rt.torsion))
}

/// Asymptotic dimension of a finitely generated abelian group (its rank).
#[pyfunction]
fn asdim_abelian(generators: usize, relations: Vec<Vec<BigInt>>) -> PyResult<usize> {
    Ok(abelian::asdim_abelian(&presented(generators, &relations)?))
}

/// Minimal largest component diameter over `k`-colorings of a metric table
/// given by point ids and the upper triangle of distances in row-major
/// order. Returns `{r_star, exact, lower_bound, nodes, coloring}`.
#[pyfunction]
#[pyo3(signature = (ids, distances, k, d, budget=100_000_000))]
fn solve_min_diameter<'py>(
    py: Python<'py>,
    ids: Vec<String>,
    distances: Vec<Bound<'py, PyAny>>,
    k: usize,
    d: &Bound<'py, PyAny>,
    budget: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let upper = distances
        .iter()
        .map(|x| to_rational(x, "distance"))
        .collect::<PyResult<Vec<_>>>()?;
    let table = MetricTable::new(ids, upper).map_err(domain)?;
    let r = cover::solve_min_diameter(&table, k, &to_rational(d, "d")?, budget).map_err(domain)?;
    let out = PyDict::new(py);
    out.set_item("r_star", fraction(py, &r.r_star)?)?;
    out.set_item("exact", r.exact)?;
    out.set_item("lower_bound", fraction(py, &r.lower_bound)?)?;
    out.set_item("nodes", r.nodes)?;
    out.set_item("coloring", r.coloring.clone())?;
    Ok(out)
}

/// Exact optimum of [`solve_min_diameter`] by exhaustive enumeration (at
/// most 16 points).
#[pyfunction]
fn exhaustive_cover_oracle<'py>(
    py: Python<'py>,
    ids: Vec<String>,
    distances: Vec<Bound<'py, PyAny>>,
    k: usize,
    d: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let upper = distances
        .iter()
        .map(|x| to_rational(x, "distance"))
        .collect::<PyResult<Vec<_>>>()?;
    let table = MetricTable::new(ids, upper).map_err(domain)?;
    let (best, _) = cover::exhaustive_cover_oracle(&table, k, &to_rational(d, "d")?).map_err(domain)?;
    fraction(py, &best)
}

/// Interval cover of Z at scale `d`, or its product cover of Z^rank, as
/// `{scale, bound, families}`.
#[pyfunction]
#[pyo3(signature = (d, rank=1))]
fn interval_cover<'py>(py: Python<'py>, d: u64, rank: usize) -> PyResult<Bound<'py, PyDict>> {
    let base = cover::make_interval_cover(d).map_err(domain)?;
    let mut cert = CoverCertificate::point();
    for _ in 0..rank {
        cert = cover::product_cover(&cert, &base).map_err(domain)?;
    }
    let out = PyDict::new(py);
    out.set_item("scale", fraction(py, cert.scale())?)?;
    out.set_item("bound", fraction(py, cert.bound())?)?;
    out.set_item("families", cert.families().len())?;
    Ok(out)
}

/// `(computed, verified)` counts of Smith decompositions in this process.
#[pyfunction]
fn snf_counts() -> (usize, usize) {
    (abelian::snf_calls(), abelian::snf_verified_calls())
}

#[pymodule]
pub fn asdim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AsdimError", m.py().get_type::<AsdimError>())?;
    m.add("WorkbenchParseError", m.py().get_type::<WorkbenchParseError>())?;
    m.add_class::<Workbench>()?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(rank_and_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(asdim_abelian, m)?)?;
    m.add_function(wrap_pyfunction!(solve_min_diameter, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_cover_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(interval_cover, m)?)?;
    m.add_function(wrap_pyfunction!(snf_counts, m)?)?;
    Ok(())
}
