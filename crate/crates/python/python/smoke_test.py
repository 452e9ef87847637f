"""Builds the extension with cargo, imports it, and exercises each entry point."""

import importlib
import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[3]


def load_module():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "radial-gauge-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libradial_gauge_py.so"
    staging = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(built, staging / "radial_gauge_py.so")
    sys.path.insert(0, str(staging))
    return importlib.import_module("radial_gauge_py")


def close(a, b, tol):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def main():
    rg = load_module()
    tight = rg.Integrator("rk45", atol=1e-13, rtol=1e-12)

    scalar = rg.Connection.from_expressions([-3.0], [3.0], [[["x1"]]])
    out = rg.transport(scalar, [2.0], [1.0], tight)
    assert abs(out["y"][0] - math.exp(-2.0)) < 1e-10, out

    rot = rg.Connection.builtin("rotation", 2, [-1, -1], [1, 1], omega=1.0)
    assert rot.family == "rotation" and rot.n == 2 and rot.k == 2
    z2 = 0.5
    y = rg.transport(rot, [0.1, z2], [1.0, 0.0], tight)["y"]
    assert close(y, [math.cos(z2), -math.sin(z2)], 1e-10), y

    sphere = rg.Connection.builtin("sphere_levicivita", 2, [-1, -1], [1, 1])
    u = [0.6, 0.8]
    r = 0.7
    z = [r * c for c in u]
    y0 = [1.0, -0.5]
    radial = rg.transport(sphere, z, y0, tight)["y"]
    assert close(radial, rg.polar(sphere, u, r, y0, tight), 1e-9)
    assert close(radial, rg.pullback(sphere, z, y0, tight), 1e-9)
    assert close(radial, rg.curve(sphere, [[0, 0], z], y0, tight), 1e-9)

    p = rg.frame(sphere, z, tight)
    assert close([p[0][0] * y0[0] + p[0][1] * y0[1]], [radial[0]], 1e-10)

    values = rg.grid(scalar, [1.0], [[-1.0], [0.0], [1.0]], tight)
    assert close([v[0] for v in values], [math.exp(-0.5), 1.0, math.exp(-0.5)], 1e-10)

    assert max(abs(v) for v in rg.residual(sphere, z, y0, 1e-4, tight)) < 1e-6
    assert rg.gauge(sphere, z, 1e-4, tight)["value"] < 1e-6

    report = json.loads(rg.check(rot, [1.0, 0.0], json.dumps({"samples": 5, "directions": 4}), tight))
    assert report["verdict"] == "pass", report

    assert rg.parse_tree("x1+x2", 2) == "Add\n  Var x1\n  Var x2\n"
    assert rg.evaluate("-2^2", [0.0]) == -4.0

    for bad in (
        lambda: rg.transport(rot, [2.0, 0.0], [1.0, 0.0]),
        lambda: rg.parse_tree("sin(", 1),
        lambda: rg.Integrator("euler"),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
