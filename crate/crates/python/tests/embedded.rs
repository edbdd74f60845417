use ::asdim::asdim;
use pyo3::ffi::c_str;
use pyo3::prelude::*;

fn with_module<F: FnOnce(Python<'_>)>(f: F) {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        pyo3::append_to_inittab!(asdim);
        Python::initialize();
    });
    Python::attach(f);
}

#[test]
fn workbench_round_trip_and_norms() {
    with_module(|py| {
        py.run(
            c_str!(
                r#"
import asdim
from fractions import Fraction
text = "[group:Z2]\nkind = free_abelian\nrank = 2\n\n[weights:w]\ngroup = Z2\n"
wb = asdim.Workbench(text)
assert asdim.Workbench(wb.to_text()).to_text() == wb.to_text()
assert wb.norm("w", "(3,4)", 100) == 7
assert wb.norm("w", "(3,4)", Fraction(13, 2)) is None
assert len(wb.ball("w", 1)) == 5
"#
            ),
            None,
            None,
        )
        .unwrap();
    });
}

#[test]
fn algebra_and_solver() {
    with_module(|py| {
        py.run(
            c_str!(
                r#"
import asdim
assert asdim.rank_and_torsion(3, [[2, 0, 0]]) == (2, [2])
assert asdim.smith_normal_form([[0, 0]], cols=2)["diagonal"] == [0]
ids = ["a", "b", "c", "d"]
assert asdim.solve_min_diameter(ids, [1, 2, 3, 1, 2, 1], 1, 1)["r_star"] == 3
"#
            ),
            None,
            None,
        )
        .unwrap();
    });
}

#[test]
fn errors_map_to_exceptions() {
    with_module(|py| {
        py.run(
            c_str!(
                r#"
import asdim
try:
    asdim.Workbench("[weights:w]\ngroup = missing\n")
except asdim.WorkbenchParseError as e:
    assert "unresolved reference" in str(e), str(e)
else:
    raise AssertionError("parse error expected")
assert issubclass(asdim.AsdimError, ValueError)
"#
            ),
            None,
            None,
        )
        .unwrap();
    });
}
