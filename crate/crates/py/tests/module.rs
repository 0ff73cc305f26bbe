use hullsweep_py::hullsweep_module;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::attach(|py| {
        let m = PyModule::new(py, "hullsweep").unwrap();
        hullsweep_module(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("hs", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).unwrap();
    });
}

#[test]
fn design_and_helpers() {
    run(r#"
d = hs.Design(24.0, 4.5)
assert d.id == "d24.0_h4.5", d.id
assert abs(d.column_radius - 10.808) < 0.01
assert 19.0 < d.draft < 21.0
assert d.to_dict()["shape"]["draft"] == d.draft
assert abs(hs.plate_cd(0.0) - 15.0) < 1e-12
x = hs.jonswap_elevation(3.0, 9.5, 7, 600.0, 0.5)
assert x == hs.jonswap_elevation(3.0, 9.5, 7, 600.0, 0.5)
assert hs.rainflow_del([0.0, 1.0, -1.0, 1.0, -1.0, 0.0], 1.0) > 0.0
s = hs.Settings()
assert len(s.grid()) == 30 and len(s.cases()) == 21
"#);
}

#[test]
fn errors_map_to_value_error() {
    run(r#"
for bad in [lambda: hs.Design(-1.0, 4.5), lambda: hs.Settings.from_toml("seed = 'x'"), lambda: hs.plate_cd(-1.0)]:
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError("no error")
"#);
}

#[test]
fn evaluate_returns_record() {
    run(r#"
s = hs.Settings.from_toml("""
[[load_cases]]
wind_speed = 13.9
hs = 3.0
tp = 9.5
weight = 1.0
""")
r = hs.evaluate(hs.Design(24.0, 4.5, s), s)
assert r["failures"] == [], r["failures"]
assert r["freq"]["signals"]["tower_base_moment"]["del"] > 0.0
"#);
}
