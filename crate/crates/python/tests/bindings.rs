use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run_python(code: &str) {
    Python::attach(|py| {
        let m = PyModule::new(py, "pyblockconv").unwrap();
        pyblockconv::pyblockconv(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("bc", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.display(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn block_process_matches_direct() {
    run_python(
        r#"
h = bc.fixture("table2_h")
x = [complex(i % 5 - 2, (i * 7) % 3) for i in range(40)]
d = bc.direct_convolve(h, x)
for m in ("ola", "ols"):
    y = bc.block_process(h, x, m, 4, 10)
    assert len(y) == len(d)
    assert max(abs(a - b) for a, b in zip(y, d)) < 1e-12
"#,
    );
}

#[test]
fn engine_streams_blocks() {
    run_python(
        r#"
h = [1.0, 0.5, 0.25]
e = bc.Engine(h, "ols", 4)
assert (e.method, e.filter_len, e.step, e.dft_len) == ("ols", 3, 4, 6)
assert e.is_exact()
out = e.push_block([1, 0, 0, 0]) + e.push_block([0, 0, 0, 0]) + e.flush()
assert [round(v.real, 12) for v in out[:3]] == [1.0, 0.5, 0.25]
try:
    e.push_block([1, 2])
    raise SystemExit("expected a length error")
except bc.BlockconvError:
    pass
"#,
    );
}

#[test]
fn ptvir_routes_and_properties() {
    run_python(
        r#"
h = bc.fixture("table2_h")
spec = bc.QuantizationSpec(8, ["h"])
assert spec.targets == ["h"]
sets = [bc.ptvir_set(h, "ola", 4, 10, spec, r) for r in ("bank", "closed_form", "probe")]
assert all(sets[0].max_deviation(s) < 1e-12 for s in sets)
assert sets[0].effective_lengths() == [12, 12, 8, 8]
assert sets[0].circular_shift()[0] is False
ols = bc.ptvir_set(h, "ols", 4, 10, spec)
assert ols.effective_lengths() == [10, 10, 10, 10]
assert ols.circular_shift()[0] is True
assert len(ols.h(2)) == len(ols.d(2)) + 2
"#,
    );
}

#[test]
fn aliasing_vanishes_for_exact_configs() {
    run_python(
        r#"
omegas, v = bc.distortion_aliasing(bc.fixture("table2_h"), "ola", 4, grid=64)
assert len(v) == 4 and len(omegas) == len(v[0])
assert max(abs(z) for vp in v[1:] for z in vp) < 1e-10
"#,
    );
}

#[test]
fn complexity_and_interpolation() {
    run_python(
        r#"
assert abs(bc.rate_fd(7, 16, "real") - 4.4) < 1e-12
assert bc.best_pow2_n(128, "real")[0] == 1024
root, _ = bc.newton_optimal_n(128)
assert abs(root - 855.1385) < 1e-3
rows = bc.savings_sweep(2, 40, "real_symmetric")
assert [r.filter_len for r in rows if r.savings > 0][:2] == [9, 11]
import cmath, math
cfg = bc.InterpConfig(2, 32)
assert sum(1 for c in cfg.coefficients() if c != 0) == 16
w = 2 * math.pi * 3 / 32
x = [cmath.exp(1j * 2 * w * t) for t in range(16 * 8)]
y = bc.zero_pad_interpolate(x, cfg)
ref = [cmath.exp(1j * w * t) for t in range(len(y))]
assert bc.sndr(y, ref, 32) > 200
s = bc.sndr_sweep(cfg, 80.0, [w], blocks=16, seed=1)
assert abs(s[0] - 80.0) < 1.5
"#,
    );
}

#[test]
fn bad_arguments_raise() {
    run_python(
        r#"
for call in (
    lambda: bc.block_process([1.0], [1.0], "fft", 1),
    lambda: bc.QuantizationSpec(8, ["x"]),
    lambda: bc.InterpConfig(3, 32),
    lambda: bc.fixture("nope"),
):
    try:
        call()
        raise SystemExit("expected ValueError")
    except ValueError:
        pass
"#,
    );
}
