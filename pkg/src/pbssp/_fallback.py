"""Pure-numpy versions of the compiled kernels; identical signatures."""

import numpy as np

EUCLID = 0
ENTROPIC = 1

REALS, BOX, SIMPLEX = 0, 1, 2


def _proj_simplex(v):
    v = v - v.max()
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _step(geom, dom, z, lz, g, eta, wq, s, W, l, lo, hi):
    if geom == ENTROPIC:
        t = (lz - eta * g + eta * l) / (1.0 + eta * W)
        m = t.max()
        t = t - (m + np.log(np.sum(np.exp(t - m))))
        return np.exp(t), t
    t = (z - eta * g + eta * s) / (1.0 + eta * wq)
    if dom == BOX:
        t = np.minimum(np.maximum(t, lo), hi)
    elif dom == SIMPLEX:
        t = _proj_simplex(t)
    return t, lz


def _mv(M, z):
    return M @ z if M.shape[0] else 0.0


def eg_solve(Q, R, B, a, b,
             xgeom, xdom, xlo, xhi, xwq, xs, xW, xl,
             ygeom, ydom, ylo, yhi, ywq, ys, yW, yl,
             x0, y0, eta, tol, max_iters):
    """Extragradient on the descent operator (grad_x, -grad_y).

    Returns (x, y, iterations, residual, converged). The residual is the
    gradient-mapping norm |z - T(z)| / eta at the returned point.
    """
    x = np.array(x0, dtype=float)
    y = np.array(y0, dtype=float)
    lx = np.log(np.maximum(x, 1e-300)) if xgeom == ENTROPIC else x
    ly = np.log(np.maximum(y, 1e-300)) if ygeom == ENTROPIC else y
    res = np.inf
    for it in range(max_iters):
        gx = _mv(Q, x) + B @ y + a
        gy = _mv(R, y) - B.T @ x - b
        xh, lxh = _step(xgeom, xdom, x, lx, gx, eta, xwq, xs, xW, xl, xlo, xhi)
        yh, lyh = _step(ygeom, ydom, y, ly, gy, eta, ywq, ys, yW, yl, ylo, yhi)
        dx = x - xh
        dy = y - yh
        res = np.sqrt(dx @ dx + dy @ dy) / eta
        if res <= tol:
            return x, y, it, res, True
        gx = _mv(Q, xh) + B @ yh + a
        gy = _mv(R, yh) - B.T @ xh - b
        x, lx = _step(xgeom, xdom, x, lx, gx, eta, xwq, xs, xW, xl, xlo, xhi)
        y, ly = _step(ygeom, ydom, y, ly, gy, eta, ywq, ys, yW, yl, ylo, yhi)
    return x, y, max_iters, res, False


def speg_run(B1, B2, x, y, xW, xl, yW, yl, eta, sum_x, sum_y):
    """Stochastic extragradient with KL proximity on two simplices.

    ``B1[t]`` and ``B2[t]`` are the independent mini-batch payoff means for
    the two half-steps of iteration t. Updates ``sum_x``/``sum_y`` in place
    and returns the last iterate.
    """
    x = np.array(x, dtype=float)
    y = np.array(y, dtype=float)
    lx = np.log(np.maximum(x, 1e-300))
    ly = np.log(np.maximum(y, 1e-300))
    for t in range(B1.shape[0]):
        xh, _ = _step(ENTROPIC, SIMPLEX, x, lx, B1[t] @ y, eta, 0.0, None, xW, xl, None, None)
        yh, _ = _step(ENTROPIC, SIMPLEX, y, ly, -(B1[t].T @ x), eta, 0.0, None, yW, yl, None, None)
        x, lx = _step(ENTROPIC, SIMPLEX, x, lx, B2[t] @ yh, eta, 0.0, None, xW, xl, None, None)
        y, ly = _step(ENTROPIC, SIMPLEX, y, ly, -(B2[t].T @ xh), eta, 0.0, None, yW, yl, None, None)
        sum_x += x
        sum_y += y
    return x, y


def ogda_run(Q, R, B, a, b, xwq, xs, ywq, ys, noise_x, noise_y, x, y, eta):
    """Optimistic gradient steps z <- z - eta (2 F_k - F_{k-1}) with noisy F.

    ``noise_x[k]``/``noise_y[k]`` are added to the linear coefficients at
    step k. The previous operator value starts equal to the first one.
    """
    x = np.array(x, dtype=float)
    y = np.array(y, dtype=float)
    px = py = None
    for k in range(noise_x.shape[0]):
        fx = _mv(Q, x) + B @ y + a + noise_x[k] + xwq * x - xs
        fy = _mv(R, y) - B.T @ x - b - noise_y[k] + ywq * y - ys
        if px is None:
            px, py = fx, fy
        x = x - eta * (2.0 * fx - px)
        y = y - eta * (2.0 * fy - py)
        px, py = fx, fy
    return x, y
