"""Time the compiled kernels against the numpy fallback and check they agree.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from pbssp import _fallback

try:
    from pbssp import _kernels
except ImportError:
    _kernels = None

E, S = _fallback.ENTROPIC, _fallback.SIMPLEX
EMPTY = np.zeros((0, 0))


def _game(rng, nx=30, ny=50):
    B = rng.uniform(size=(nx, ny))
    return B, np.full(nx, 1 / nx), np.full(ny, 1 / ny)


def case_eg(mod, rng):
    B, x0, y0 = _game(rng)
    wx, wy = 0.01 / (4 * np.log(30)), 0.01 / (4 * np.log(50))
    z = np.zeros
    return mod.eg_solve(EMPTY, EMPTY, B, z(30), z(50),
                        E, S, None, None, 0.0, z(30), wx, z(30),
                        E, S, None, None, 0.0, z(50), wy, z(50),
                        x0, y0, 0.5 / np.abs(B).max(), 1e-9, 200_000)[:2]


def case_speg(mod, rng):
    B, x0, y0 = _game(rng)
    noise = rng.standard_normal((2, 2000) + B.shape) * 0.3
    B1, B2 = B + noise[0], B + noise[1]
    sx, sy = np.zeros(30), np.zeros(50)
    mod.speg_run(B1, B2, x0, y0, 0.001, np.zeros(30), 0.001, np.zeros(50), 0.5, sx, sy)
    return sx / 2000, sy / 2000


def case_ogda(mod, rng):
    d = 20
    Q = np.eye(d) * 2.0
    B = rng.standard_normal((d, d)) * 0.3
    nx, ny = rng.standard_normal((2, 20000, d)) * 0.1
    return mod.ogda_run(Q, Q, B, np.ones(d), np.ones(d), 0.0, np.zeros(d), 0.0, np.zeros(d),
                        nx, ny, np.zeros(d), np.zeros(d), 0.05)


def timed(fn, mod, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(mod, np.random.default_rng(7))
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':<8} {'python s':>10} {'compiled s':>11} {'speedup':>8} {'max diff':>10}")
    for name, fn in [("eg", case_eg), ("speg", case_speg), ("ogda", case_ogda)]:
        tp, outp = timed(fn, _fallback, args.repeat)
        if _kernels is None:
            print(f"{name:<8} {tp:>10.4f} {'-':>11} {'-':>8} {'-':>10}")
            continue
        tc, outc = timed(fn, _kernels, args.repeat)
        diff = max(float(np.max(np.abs(np.asarray(u) - np.asarray(v)))) for u, v in zip(outp, outc))
        print(f"{name:<8} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x {diff:>10.2e}")


if __name__ == "__main__":
    main()
