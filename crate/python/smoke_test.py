#!/usr/bin/env python3
"""Smoke test for the coblotto_py extension module.

Builds nothing itself: expects `cargo build --release -p coblotto-py`
to have produced target/release/libcoblotto_py.so. Copies the shared
object next to itself under the importable name and exercises the API.
"""
import math
import shutil
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def ensure_module():
    target = HERE / "coblotto_py.so"
    candidates = [
        ROOT / "target" / "release" / "libcoblotto_py.so",
        ROOT / "target" / "debug" / "libcoblotto_py.so",
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build --release -p coblotto-py")
    if not target.exists() or built.stat().st_mtime > target.stat().st_mtime:
        shutil.copy2(built, target)
    sys.path.insert(0, str(HERE))


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    ensure_module()
    import coblotto_py as cb

    g = cb.Game(1.2, 1.0, 1.5, 2.0)
    assert g.case() == "C1a"
    assert g.region() == "A1"
    assert g.allocation() == (1.0, 0.0)
    assert approx(g.payoffs()[0], 0.8) and approx(g.payoffs()[1], 1.0)
    d1, d2 = g.deltas(tau_v=0.35)
    assert approx(d1, 0.05) and approx(d2, 0.0125)

    assert g.in_gv()
    certs = g.certificates()
    assert certs[0]["prop"] == 4
    assert approx(certs[0]["lo"], 1.0 / 3.0) and approx(certs[0]["hi"], 0.4)
    assert not g.in_gb()
    assert g.joint_direction() is not None

    m = g.membership()
    assert m["in_gv"] and not m["in_gb"] and m["joint"] and not m["measure_zero"]

    intervals = g.search_valuation(n=4001)
    assert len(intervals) == 1
    lo, hi = intervals[0]
    assert abs(lo - 1 / 3) < 2e-3 and abs(hi - 0.4) < 2e-3
    assert g.search_budget(n=4001) == []

    sym = cb.Game(1.0, 1.0, 1.0, 1.0)
    assert sym.case() == "C4"
    assert not sym.in_gv() and not sym.in_gb()
    assert sym.in_measure_zero()
    assert sym.payoffs() == (0.75, 0.75)

    assert approx(cb.front_payoff(1.2, 1.5, 1.0), 0.8)
    assert cb.front_payoff(1.0, 0.3, 0.0) == 1.0

    gradients = cb.Game(1.2, 1.0, 0.2, 0.3).gradients()
    assert approx(gradients[0][0], 0.7118033988749895, 1e-12)
    assert approx(gradients[1][1], 0.16118033988749895, 1e-12)

    try:
        cb.Game(1.2, 1.0, 0.0, 2.0)
    except ValueError as e:
        assert "x1" in str(e)
    else:
        raise AssertionError("invalid game must raise ValueError")

    assert not math.isnan(g.search_joint()[0])
    print("coblotto_py smoke test: OK")


if __name__ == "__main__":
    main()
