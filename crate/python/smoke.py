"""Smoke test for the dnspectra extension module."""

import json
import math

import dnspectra

INTERVAL = """
domain = interval{a=0, b=1}
h = 0.001953125
"""

SQUARE_CONVEX = """
domain = rect{x0=-1, x1=1, y0=-1, y1=1}
rho = shifted_power{c=1, alpha=2}
theorem = convex_density
k = 1
r = 1, 2
h = 0.25
levels = 3
"""


def main():
    mesh = dnspectra.Mesh("disk{cx=0, cy=0, r=1}", 0.2)
    assert mesh.dim == 2 and mesh.n_nodes > 50, mesh

    spec = dnspectra.solve(INTERVAL, bc="dirichlet", count=5)
    for k, lam in enumerate(spec.eigenvalues, start=1):
        assert abs(lam / (k * math.pi) ** 2 - 1) < 1e-4, (k, lam)
    neu = dnspectra.solve(INTERVAL, bc="neumann", count=3)
    assert abs(neu.eigenvalues[0]) < 1e-9
    assert spec.to_csv().startswith("index,eigenvalue,residual,cluster_id")

    report = json.loads(dnspectra.run_config(SQUARE_CONVEX))
    assert report["success"], report["errors"]
    verdicts = [r["verdict"] for r in report["inequalities"]]
    assert all(v in ("holds", "holds-within-tolerance") for v in verdicts), verdicts

    ibp = json.loads(dnspectra.ibp("disk{r=1}", "bubble", (1.0, 0.0), 0.125, 2))
    assert abs(ibp["reports"][-1]["lhs"] / (4 * math.pi) - 1) < 1e-2

    assert abs(dnspectra.first_zero_j0() - 2.404825557695773) < 1e-10
    assert abs(dnspectra.first_zero_j1_prime() - 1.841183781340659) < 1e-10

    try:
        dnspectra.run_config("domain = rect\nbogus = 1\n")
    except ValueError as e:
        assert "line 2" in str(e), e
    else:
        raise AssertionError("malformed config accepted")

    print("dnspectra smoke test passed:", verdicts)


if __name__ == "__main__":
    main()
