"""Independent reference computations the tests compare against.

The iterated-fold oracle composes transition operators by straight
Gauss-Legendre matrix algebra, sharing no code with the fold machinery in the
package: the only package calls are the pointwise conditional CDF and density
evaluations of the base copula.
"""

import numpy as np

GL_ORDER = 48


def gl_unit_rule(order: int = GL_ORDER):
    """Gauss-Legendre nodes and weights transplanted from [-1, 1] to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def iterated_fold_grid(c, n, xs, ys, order: int = GL_ORDER):
    """CDF of the n-step fold of an absolutely continuous copula on a grid.

    Uses the kernel representation of the n-fold product: one conditional on
    each side and n-2 density kernels in between, every integral replaced by
    the same quadrature rule.  Exact for polynomial kernels like FGM.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if n == 1:
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return c.cdf_raw(gx, gy)
    t, w = gl_unit_rule(order)
    gx, gt = np.meshgrid(xs, t, indexing="ij")
    left = c.cond_v_raw(gx, gt)
    gt2, gy = np.meshgrid(t, ys, indexing="ij")
    right = c.cond_u_raw(gt2, gy)
    ga, gb = np.meshgrid(t, t, indexing="ij")
    kernel = w[:, None] * c.density_raw(ga, gb)
    middle = np.eye(len(t))
    for _ in range(n - 2):
        middle = middle @ kernel
    return left @ middle @ (w[:, None] * right)
