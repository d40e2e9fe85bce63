import numpy as np
import pytest

from pbssp import _fallback, kernels

compiled = pytest.importorskip("pbssp._kernels")
E, U = _fallback.ENTROPIC, _fallback.EUCLID
EMPTY = np.zeros((0, 0))


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("geom", ["entropic", "euclid_box"])
def test_extragradient_agrees(geom):
    rng = np.random.default_rng(0)
    B = rng.uniform(size=(4, 6))
    z4, z6 = np.zeros(4), np.zeros(6)
    if geom == "entropic":
        args = (EMPTY, EMPTY, B, z4, z6, E, _fallback.SIMPLEX, None, None, 0.0, z4, 0.05, z4,
                E, _fallback.SIMPLEX, None, None, 0.0, z6, 0.05, z6, np.full(4, 0.25), np.full(6, 1 / 6))
    else:
        lo4, hi4, lo6, hi6 = -np.ones(4), np.ones(4), -np.ones(6), np.ones(6)
        args = (np.eye(4), np.eye(6), B, rng.normal(size=4), rng.normal(size=6),
                U, _fallback.BOX, lo4, hi4, 0.0, z4, 0.0, z4,
                U, _fallback.BOX, lo6, hi6, 0.0, z6, 0.0, z6, z4, z6)
    a = _fallback.eg_solve(*args, 0.2, 1e-10, 100_000)
    b = compiled.eg_solve(*args, 0.2, 1e-10, 100_000)
    assert a[2] == b[2] and a[4] and b[4]
    assert np.allclose(a[0], b[0], atol=1e-13) and np.allclose(a[1], b[1], atol=1e-13)


def test_speg_agrees():
    rng = np.random.default_rng(1)
    B1, B2 = rng.uniform(size=(2, 50, 3, 5))
    outs = []
    for mod in (_fallback, compiled):
        sx, sy = np.zeros(3), np.zeros(5)
        x, y = mod.speg_run(B1, B2, np.full(3, 1 / 3), np.full(5, 0.2), 0.01, np.zeros(3),
                            0.01, np.zeros(5), 0.4, sx, sy)
        outs.append((x, y, sx, sy))
    for u, v in zip(*outs):
        assert np.allclose(u, v, atol=1e-13)


def test_ogda_agrees():
    rng = np.random.default_rng(2)
    Q = np.diag([1.0, 2.0, 3.0])
    B = rng.normal(size=(3, 3))
    nx, ny = rng.normal(size=(2, 200, 3))
    outs = [mod.ogda_run(Q, Q, B, np.ones(3), np.ones(3), 0.5, np.ones(3), 0.0, np.zeros(3),
                         nx, ny, np.zeros(3), np.zeros(3), 0.05) for mod in (_fallback, compiled)]
    assert np.allclose(outs[0][0], outs[1][0], atol=1e-13)
    assert np.allclose(outs[0][1], outs[1][1], atol=1e-13)
