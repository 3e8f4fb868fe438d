#!/usr/bin/env python3
"""End-to-end smoke test for the xrtrace_py extension module.

Builds nothing itself: it expects `cargo build -p xrtrace-py` (or
`--release`) to have produced libxrtrace_py.so, copies it next to a
temporary directory under the importable name, and runs a miniature
version of the full pipeline.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        ROOT / "target" / "release" / "libxrtrace_py.so",
        ROOT / "target" / "debug" / "libxrtrace_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("libxrtrace_py.so not found; run `cargo build -p xrtrace-py` first")
    tmp = Path(tempfile.mkdtemp(prefix="xrtrace_py_"))
    shutil.copy(lib, tmp / "xrtrace_py.so")
    sys.path.insert(0, str(tmp))
    import xrtrace_py

    return xrtrace_py


def main():
    xr = import_module()

    # Sensor data-rate arithmetic.
    rate = xr.raw_data_rate(640, 480, 8, 30, sensors=4)
    assert rate["bits_per_second"] == 294_912_000, rate
    display = xr.raw_data_rate(2048, 1080, 24, 60)
    assert abs(display["gibit_per_second"] - 2.966) < 5e-4, display

    # Generate a synthetic trace and analyze it end to end.
    pcap = xr.generate_trace(seed=1, duration_s=3.0)
    analysis = xr.analyze_trace(pcap)
    assert analysis["orphan_bursts"] == 0, analysis["orphan_bursts"]
    n = analysis["frame_count"]
    assert 150 <= n <= 210, n
    mean_interval = sum(analysis["frame_intervals_us"]) / len(analysis["frame_intervals_us"])
    assert abs(mean_interval - 16_667) < 500, mean_interval

    # Distribution fitting reproduces the normal conclusion.
    best, fits = xr.fit_select([float(s) for s in analysis["sizes"]])
    assert best == "normal", best
    assert max(f["linearity"] for f in fits) > 0.99

    # Quantiles.
    assert abs(xr.theoretical_quantile("logistic", 0.75) - math.log(3)) < 1e-12
    assert abs(xr.theoretical_quantile("normal", 0.975) - 1.959964) < 1e-5

    # ARMA: fit, forecast, evaluate on a known model.
    series = [float(s) for s in analysis["sizes"]]
    adf = xr.adf_test(series)
    assert adf["reject_unit_root"], adf
    model = xr.fit_arma(series, 1, 0)
    assert model.is_stationary()
    one_step = model.forecast(series, [0.0] * max(1, model.q), 1)
    assert len(one_step) == 1
    round_trip = xr.ArmaModel.from_json(model.to_json())
    assert round_trip.p == model.p and abs(round_trip.c - model.c) < 1e-12

    report = xr.evaluate_arma(series, 1, 0, split=0.7)
    assert len(report["predictions"]) == len(report["actuals"])

    # QoE: all-minima case is exactly -u * e.
    qoe = xr.qoe_total([30.0], [1000.0], [40.0], f_min=30.0, r_min=1000.0, l_min=40.0, u=1.0)
    assert abs(qoe["total"] + math.e) < 1e-9, qoe["total"]

    scenarios = json.dumps(
        [
            {"name": "fast", "fps": [60.0], "pixels": [2211840.0], "latency_ms": [50.0]},
            {"name": "slow", "fps": [15.0], "pixels": [2211840.0], "latency_ms": [100.0]},
        ]
    )
    ranked = xr.compare_scenarios(scenarios)
    assert ranked[0]["name"] == "fast", ranked

    print("smoke test OK:", n, "frames analyzed, best family", best)


if __name__ == "__main__":
    main()
