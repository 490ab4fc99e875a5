"""Regenerate the golden fixtures from independent oracles.

Run from the repository root::

    python3 tests/oracles/make_goldens.py

Nothing here imports the package under test.  The 2x2 mean is computed in
50-digit arithmetic from closed-form eigendecompositions; the chain slacks
use plain ``numpy.linalg.eigh`` and a 10^4-interval trapezoid rule.
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

A_GOLDEN = [[2, 1], [1, 2]]
B_GOLDEN = [[3, 0], [0, 1]]


def _eig2(m):
    """Closed-form eigenpairs of a real symmetric 2x2 matrix (mpmath)."""
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    mid = (a + c) / 2
    rad = mp.sqrt(((a - c) / 2) ** 2 + b**2)
    vals = [mid - rad, mid + rad]
    vecs = []
    for lam in vals:
        if b != 0:
            v = mp.matrix([b, lam - a])
        else:
            v = mp.matrix([1, 0]) if abs(lam - a) <= abs(lam - c) else mp.matrix([0, 1])
        vecs.append(v / mp.norm(v))
    return vals, vecs


def _fn2(m, f):
    vals, vecs = _eig2(m)
    out = mp.zeros(2, 2)
    for lam, v in zip(vals, vecs):
        out += f(lam) * (v * v.T)
    return out


def gmean_2x2(A, B, t):
    A, B = mp.matrix(A), mp.matrix(B)
    a_half = _fn2(A, mp.sqrt)
    a_mhalf = _fn2(A, lambda x: 1 / mp.sqrt(x))
    M = a_mhalf * B * a_mhalf
    M = (M + M.T) / 2
    return a_half * _fn2(M, lambda x: x**t) * a_half


def _np_fn(m, f):
    w, v = np.linalg.eigh(m)
    return (v * f(w)) @ v.T


def _np_gmean(A, B, t):
    ah = _np_fn(A, np.sqrt)
    amh = _np_fn(A, lambda w: 1 / np.sqrt(w))
    M = amh @ B @ amh
    return ah @ _np_fn(0.5 * (M + M.T), lambda w: w**t) @ ah


def _trapezoid(g, n=10_000):
    ts = np.linspace(0.0, 1.0, n + 1)
    vals = np.array([g(t) for t in ts])
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    return np.tensordot(w, vals, axes=1)


def hh_mr_slacks(A, B):
    A, B = np.array(A, float), np.array(B, float)
    inv = np.linalg.inv
    first = inv(_np_gmean(A, B, 0.5))
    middle = _trapezoid(lambda t: inv(_np_gmean(A, B, t)))
    last = _trapezoid(lambda t: _np_gmean(inv(A), inv(B), t))

    def lmin(m):
        return float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])

    return {"link_0": lmin(middle - first), "link_1": lmin(last - middle)}


def main():
    FIXTURES.mkdir(exist_ok=True)
    mp.mp.dps = 50
    G = gmean_2x2(A_GOLDEN, B_GOLDEN, mp.mpf(1) / 2)
    lines = ["2"] + [" ".join(mp.nstr(G[i, j], 17, strip_zeros=False) for j in range(2)) for i in range(2)]
    (FIXTURES / "golden_gmean.mat").write_text("\n".join(lines) + "\n")
    slacks = hh_mr_slacks(A_GOLDEN, B_GOLDEN)
    payload = {
        "A": A_GOLDEN,
        "B": B_GOLDEN,
        "f": "inv",
        "oracle": "numpy eigh + 10^4-interval trapezoid",
        "oracle_abs_err": 1e-8,
        "slacks": slacks,
    }
    (FIXTURES / "golden_hh_mr.json").write_text(json.dumps(payload, indent=2) + "\n")
    print((FIXTURES / "golden_gmean.mat").read_text())
    print(json.dumps(slacks, indent=2))


if __name__ == "__main__":
    main()
