"""Smoke test for the hyperthin Python extension.

Build it first with `pip install --no-build-isolation -e crates/py`.
"""

import math
import tempfile
from pathlib import Path

import hyperthin


def main():
    value, alpha0 = hyperthin.eta0()
    assert abs(value - hyperthin.ETA0) < 1e-12
    assert abs(math.cos(alpha0) - (math.sqrt(5) - 1) / 2) < 1e-9
    assert abs(hyperthin.isoceles_ratio(alpha0) - value) < 1e-12

    # equilateral triangle of side 1: thinness is the altitude from a side midpoint
    delta = hyperthin.euclid_triangle_delta([0, 0], [1, 0], [0.5, math.sqrt(3) / 2])
    assert abs(delta - math.sqrt(3) / 4) < 1e-6

    square = hyperthin.Graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
    assert square.vertex_count == 4
    assert square.distance(0, 2) == 2.0
    assert square.shortest_path(0, 2) == [0, 1, 2]
    assert square.rips_delta(0, 1, 2) == 0.0

    hexagon = hyperthin.Graph.generate("cycle:6")
    assert hexagon.rips_delta(0, 2, 4) == 1.0
    assert not square.is_tree()

    tree = hyperthin.Graph.generate("random_tree:60", seed=3)
    assert tree.is_tree()
    report = tree.analyze(samples=None)
    assert report["verdict"]["ratio_sup"] == 0.0

    grid = hyperthin.Graph.generate("grid_plane:20")
    detours = grid.detour_profile([2.0, 3.0], samples=200)
    assert all(e["g_hat"] >= 2 * e["t"] for e in detours["profile"]["entries"])

    tower = hexagon.tower_check(levels=3, samples=500)
    assert tower["ratio"]["sup_tower"] <= tower["ratio"]["sup_base"] + 0.01

    try:
        square.distance(0, 99)
    except ValueError as e:
        print("rejected bad vertex:", e)
    else:
        raise AssertionError("expected ValueError")

    with tempfile.TemporaryDirectory() as out:
        rep = hyperthin.run("euclid", out)
        assert (Path(out) / "report.json").exists()
        assert abs(rep["result"]["eta0"] - value) < 1e-12

    print("hyperthin", hyperthin.__version__, "smoke test passed:", repr(grid))


if __name__ == "__main__":
    main()
