//! JSON views of core results. Rationals are strings `"p/q"`, integers are
//! exact JSON numbers and `∞` is the string `"inf"`.

use asdim_core::abelian::{RankTorsion, SnfResult};
use asdim_core::cover::{CoverCertificate, ExtensionReport, Family, IntervalFamily, SolveResult, VerifyReport};
use asdim_core::group::{GroupElement, GroupSpec};
use asdim_core::metric::{Ball, RhoRow, SandwichReport};
use asdim_core::rational::format_rational;
use asdim_core::solvable::{Bound, BoundInterval, TraceNode};
use asdim_core::workbench::format_element;
use asdim_core::{BigInt, BigRational};
use serde_json::{json, Number, Value};

pub fn rational(q: &BigRational) -> Value {
    Value::String(format_rational(q))
}

pub fn opt_rational(q: Option<&BigRational>) -> Value {
    q.map_or(Value::Null, rational)
}

pub fn integer(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("integer literal"))
}

pub fn bound(b: Bound) -> Value {
    match b {
        Bound::Finite(n) => json!(n),
        Bound::Infinite => json!("inf"),
    }
}

pub fn matrix(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(integer).collect()))
            .collect(),
    )
}

/// Element text in the workbench syntax when the group is known.
pub fn element(group: Option<&GroupSpec>, x: &GroupElement) -> Value {
    Value::String(match group {
        Some(g) => format_element(g, x),
        None => x.to_string(),
    })
}

pub fn ball(group: &GroupSpec, b: &Ball) -> Value {
    json!({
        "radius": rational(b.radius()),
        "size": b.len(),
        "elements": b
            .entries()
            .iter()
            .map(|(x, n)| json!({"element": element(Some(group), x), "norm": rational(n)}))
            .collect::<Vec<_>>(),
    })
}

pub fn rho_rows(rows: &[RhoRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "t": rational(&r.t),
                    "rho1": opt_rational(r.rho1.as_ref()),
                    "rho1_certified": r.rho1_certified,
                    "rho2": rational(&r.rho2),
                })
            })
            .collect(),
    )
}

pub fn sandwich(source: &GroupSpec, r: &SandwichReport) -> Value {
    json!({
        "pairs_checked": r.pairs_checked,
        "search_radius": rational(&r.search_radius),
        "rho1_certified": r.rho1_certified,
        "violation_count": r.violations.len(),
        "violations": r
            .violations
            .iter()
            .map(|v| json!({
                "x": element(Some(source), &v.x),
                "y": element(Some(source), &v.y),
                "d": rational(&v.d),
                "d_prime": rational(&v.d_prime),
                "rho1": opt_rational(v.rho1.as_ref()),
                "rho2": rational(&v.rho2),
            }))
            .collect::<Vec<_>>(),
    })
}

fn interval(f: &IntervalFamily) -> Value {
    json!({
        "length": f.length(),
        "period": f.period(),
        "offset": f.offset(),
    })
}

pub fn family(group: Option<&GroupSpec>, f: &Family) -> Value {
    match f {
        Family::Interval(i) => {
            let mut v = interval(i);
            v["kind"] = json!("interval");
            v["diameter"] = json!(i.diameter());
            v["separation"] = json!(i.separation());
            v
        }
        Family::Product(p) => json!({
            "kind": "product",
            "factors": p.factors().iter().map(interval).collect::<Vec<_>>(),
            "diameter": p.diameter(),
            "separation": p.separation(),
        }),
        Family::Explicit(e) => json!({
            "kind": "explicit",
            "sets": e
                .sets()
                .iter()
                .map(|s| s.iter().map(|x| element(group, x)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
    }
}

pub fn certificate(group: Option<&GroupSpec>, c: &CoverCertificate) -> Value {
    json!({
        "scale": rational(c.scale()),
        "bound": rational(c.bound()),
        "families": c.families().iter().map(|f| family(group, f)).collect::<Vec<_>>(),
    })
}

pub fn verify(group: &GroupSpec, r: &VerifyReport) -> Value {
    let g = Some(group);
    json!({
        "clean": r.is_clean(),
        "region_size": r.region_size,
        "scale": rational(&r.scale),
        "bound": rational(&r.bound),
        "max_diameter": rational(&r.max_diameter),
        "disjointness_violation_count": r.disjointness_violations.len(),
        "nonstrict_violation_count": r.nonstrict_violations,
        "disjointness_violations": r
            .disjointness_violations
            .iter()
            .map(|v| json!({
                "family": v.family,
                "x": element(g, &v.x),
                "y": element(g, &v.y),
                "distance": rational(&v.distance),
            }))
            .collect::<Vec<_>>(),
        "bound_violations": r
            .bound_violations
            .iter()
            .map(|v| json!({
                "family": v.family,
                "representative": element(g, &v.representative),
                "diameter": rational(&v.diameter),
            }))
            .collect::<Vec<_>>(),
        "coverage_gaps": r.coverage_gaps.iter().map(|x| element(g, x)).collect::<Vec<_>>(),
        "symbolic_checks": r
            .symbolic_checks
            .iter()
            .map(|c| json!({
                "family": c.family,
                "closed_diameter": rational(&c.closed_diameter),
                "measured_diameter": opt_rational(c.measured_diameter.as_ref()),
                "closed_separation": opt_rational(c.closed_separation.as_ref()),
                "measured_separation": opt_rational(c.measured_separation.as_ref()),
                "agrees": c.agrees,
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn extension(group: &GroupSpec, r: &ExtensionReport) -> Value {
    let g = Some(group);
    json!({
        "clean": r.input_report.is_clean() && r.output_report.is_clean(),
        "degenerate": r.degenerate,
        "short_generators": r.short_generators.iter().map(|x| element(g, x)).collect::<Vec<_>>(),
        "representatives": r.representatives.iter().map(|x| element(g, x)).collect::<Vec<_>>(),
        "input_report": verify(group, &r.input_report),
        "certificate": certificate(g, &r.certificate),
        "output_report": verify(group, &r.output_report),
    })
}

pub fn solve(ids: &[String], r: &SolveResult, oracle: Option<&BigRational>) -> Value {
    let mut v = json!({
        "points": ids.len(),
        "r_star": rational(&r.r_star),
        "exact": r.exact,
        "lower_bound": rational(&r.lower_bound),
        "nodes": r.nodes,
        "coloring": ids
            .iter()
            .zip(&r.coloring)
            .map(|(id, c)| json!({"point": id, "color": c}))
            .collect::<Vec<_>>(),
    });
    if let Some(o) = oracle {
        v["oracle_r_star"] = rational(o);
    }
    v
}

pub fn snf(r: &SnfResult, verified: bool) -> Value {
    json!({
        "diagonal": r.diagonal().iter().map(integer).collect::<Vec<_>>(),
        "rank": r.rank(),
        "u": matrix(&r.u.to_rows()),
        "d": matrix(&r.d.to_rows()),
        "v": matrix(&r.v.to_rows()),
        "verified": verified,
    })
}

pub fn rank(rt: &RankTorsion) -> Value {
    json!({
        "rank": rt.rank,
        "torsion": rt.torsion.iter().map(integer).collect::<Vec<_>>(),
        "asdim": rt.rank,
    })
}

pub fn trace(node: &TraceNode) -> Value {
    json!({
        "rule": node.rule.tag(),
        "lower": bound(node.lower),
        "upper": bound(node.upper),
        "note": node.note,
        "children": node.children.iter().map(trace).collect::<Vec<_>>(),
    })
}

pub fn interval_bounds(name: &str, b: &BoundInterval) -> Value {
    json!({
        "series": name,
        "lower": bound(b.lower),
        "upper": bound(b.upper),
        "trace": trace(&b.trace),
    })
}
