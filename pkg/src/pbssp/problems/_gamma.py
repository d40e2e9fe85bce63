"""Gamma noise with prescribed mean and variance."""

import numpy as np


def gamma_params(mean, var):
    """Shape, scale and additive shift so that shift + Gamma(shape, scale) has the given moments.

    With a positive mean the shift is zero and shape = mean^2/var. A nonpositive
    mean is served by a unit-mean gamma with the requested variance moved
    down by (1 - mean).
    """
    mean = np.asarray(mean, dtype=float)
    var = np.broadcast_to(np.asarray(var, dtype=float), mean.shape)
    base = np.where(mean > 0, mean, 1.0)
    shape = base**2 / var
    scale = var / base
    shift = mean - base
    return shape, scale, shift


def gamma_mean_of(n, shape, scale, shift, rng, size=None):
    """Exact draw of the mean of n i.i.d. shifted gammas (sum of gammas is gamma)."""
    if size is None:
        return shift + rng.gamma(n * shape, scale / n)
    return shift + rng.gamma(n * shape, scale / n, size=size)
