"""Bivariate copula families and their fold-product algebra.

The fold product of two copulas,

    (C1 * C2)(x, y) = integral over t in (0, 1) of  d2 C1(x, t) . d1 C2(t, y) dt,

is the two-step transition law of a stationary Markov chain whose one-step
law is a copula; folding is associative, and the n-fold power of the chain's
copula gives the lag-n joint law.  ``fold`` returns a closed-form result for
the pairs that stay inside the family algebra (independence absorbs, the
comonotone copula is the identity, FGM and Mardia are closed) and otherwise
wraps both factors in :class:`NumericFold`, which evaluates the integral by
composite Gauss-Legendre quadrature.

Parameter conventions:

* ``Fgm(theta)``        C(u,v) = uv + theta uv(1-u)(1-v), theta in [-1, 1]
* ``Mardia(a, b)``      a M + b W + (1-a-b) Pi with a, b >= 0, a + b <= 1
* ``Frechet(theta)``    Mardia with a = theta^2(1+theta)/2, b = theta^2(1-theta)/2
* ``Gaussian(r)``       normal-scores correlation r in (-1, 1)
* ``Amh(theta)``        C(u,v) = uv / (1 - theta(1-u)(1-v)), theta in [-1, 1]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import owens_t

from .errors import (
    ConfigError,
    DensityUnavailableError,
    DomainError,
    EvaluationError,
    FoldDepthError,
    UnsupportedCopulaError,
)
from .normal import norm_cdf, norm_ppf
from .quadrature import unit_rule

MAX_NUMERIC_FOLD_DEPTH = 8
WEIGHT_TOL = 1e-12
GAUSS_EDGE = 1e-15

_CHUNK_BUDGET = 1 << 21  # max elements * quadrature nodes held at once


def _prep(u, v):
    """Broadcast the two arguments and remember whether both were scalars."""
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    scalar = ua.ndim == 0 and va.ndim == 0
    ua, va = np.broadcast_arrays(np.atleast_1d(ua), np.atleast_1d(va))
    return np.ascontiguousarray(ua), np.ascontiguousarray(va), scalar


def _ret(out, scalar):
    return float(out[0]) if scalar else out


class Copula:
    """Abstract base for copula specifications.

    Subclasses implement raw vectorized hooks; the module-level functions
    ``cdf``, ``density`` and ``conditional_cdf`` add domain validation.
    """

    # -- raw evaluation hooks (arguments already validated and broadcast) --

    def cdf_raw(self, u, v):
        raise NotImplementedError

    def density_raw(self, u, v):
        raise DensityUnavailableError(f"{type(self).__name__} has no computable density")

    def cond_u_raw(self, u, v):
        """d/du C(u, v): the conditional CDF of the next state given u."""
        raise UnsupportedCopulaError(f"{type(self).__name__} has no conditional CDF")

    def cond_v_raw(self, u, v):
        """d/dv C(u, v)."""
        raise UnsupportedCopulaError(f"{type(self).__name__} has no v-partial")

    # -- structure --

    @property
    def is_absolutely_continuous(self) -> bool:
        return True

    @property
    def has_kinks(self) -> bool:
        """True when the partials are only piecewise smooth in t."""
        return False

    def kinks_left(self, x: float) -> tuple[float, ...]:
        """Breakpoints of t -> d2 C(x, t), for quadrature splitting."""
        return ()

    def kinks_right(self, y: float) -> tuple[float, ...]:
        """Breakpoints of t -> d1 C(t, y)."""
        return ()


@dataclass(frozen=True)
class Independence(Copula):
    """Product copula Pi(u, v) = uv."""

    def cdf_raw(self, u, v):
        return u * v

    def density_raw(self, u, v):
        return np.ones_like(u)

    def cond_u_raw(self, u, v):
        return v + 0.0 * u

    def cond_v_raw(self, u, v):
        return u + 0.0 * v


@dataclass(frozen=True)
class Comonotone(Copula):
    """Upper Frechet-Hoeffding bound M(u, v) = min(u, v)."""

    def cdf_raw(self, u, v):
        return np.minimum(u, v)

    def density_raw(self, u, v):
        # all mass sits on the diagonal; the AC part is zero
        return np.zeros_like(u)

    def cond_u_raw(self, u, v):
        return np.where(u <= v, 1.0, 0.0)

    def cond_v_raw(self, u, v):
        return np.where(v <= u, 1.0, 0.0)

    @property
    def is_absolutely_continuous(self) -> bool:
        return False

    @property
    def has_kinks(self) -> bool:
        return True

    def kinks_left(self, x):
        return (x,)

    def kinks_right(self, y):
        return (y,)


@dataclass(frozen=True)
class Countermonotone(Copula):
    """Lower Frechet-Hoeffding bound W(u, v) = max(u + v - 1, 0)."""

    def cdf_raw(self, u, v):
        return np.maximum(u + v - 1.0, 0.0)

    def density_raw(self, u, v):
        return np.zeros_like(u)

    def cond_u_raw(self, u, v):
        return np.where(u + v >= 1.0, 1.0, 0.0)

    def cond_v_raw(self, u, v):
        return np.where(u + v >= 1.0, 1.0, 0.0)

    @property
    def is_absolutely_continuous(self) -> bool:
        return False

    @property
    def has_kinks(self) -> bool:
        return True

    def kinks_left(self, x):
        return (1.0 - x,)

    def kinks_right(self, y):
        return (1.0 - y,)


@dataclass(frozen=True)
class Fgm(Copula):
    """Farlie-Gumbel-Morgenstern copula, theta in [-1, 1]."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        if not -1.0 <= self.theta <= 1.0:
            raise DomainError(f"FGM theta must lie in [-1, 1], got {self.theta}")

    def cdf_raw(self, u, v):
        return u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v))

    def density_raw(self, u, v):
        return 1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)

    def cond_u_raw(self, u, v):
        return v + self.theta * (1.0 - 2.0 * u) * v * (1.0 - v)

    def cond_v_raw(self, u, v):
        return u + self.theta * (1.0 - 2.0 * v) * u * (1.0 - u)


@dataclass(frozen=True)
class Mardia(Copula):
    """Mardia family a M + b W + (1 - a - b) Pi with a, b >= 0, a + b <= 1."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.a < 0.0 or self.b < 0.0 or self.a + self.b > 1.0 + WEIGHT_TOL:
            raise DomainError(f"Mardia needs a, b >= 0 and a + b <= 1, got ({self.a}, {self.b})")

    def cdf_raw(self, u, v):
        pi_w = 1.0 - self.a - self.b
        return (self.a * np.minimum(u, v)
                + self.b * np.maximum(u + v - 1.0, 0.0)
                + pi_w * u * v)

    def density_raw(self, u, v):
        # the M and W parts are singular; only the Pi part has a density
        return np.full_like(np.asarray(u, dtype=float), 1.0 - self.a - self.b)

    def cond_u_raw(self, u, v):
        pi_w = 1.0 - self.a - self.b
        return (pi_w * v
                + self.a * np.where(u <= v, 1.0, 0.0)
                + self.b * np.where(u + v >= 1.0, 1.0, 0.0))

    def cond_v_raw(self, u, v):
        return self.cond_u_raw(v, u)

    @property
    def is_absolutely_continuous(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    @property
    def has_kinks(self) -> bool:
        return self.a > 0.0 or self.b > 0.0

    def kinks_left(self, x):
        return (x, 1.0 - x)

    def kinks_right(self, y):
        return (y, 1.0 - y)


@dataclass(frozen=True, init=False)
class Frechet(Mardia):
    """One-parameter Frechet subfamily of Mardia, |theta| <= 1.

    Weights are a = theta^2 (1 + theta) / 2 on M and b = theta^2 (1 - theta) / 2
    on W, so the dependence parameter theta multiplies under folding.
    """

    theta: float

    def __init__(self, theta: float):
        theta = float(theta)
        if not -1.0 <= theta <= 1.0:
            raise DomainError(f"Frechet theta must lie in [-1, 1], got {theta}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "a", theta * theta * (1.0 + theta) / 2.0)
        object.__setattr__(self, "b", theta * theta * (1.0 - theta) / 2.0)


@dataclass(frozen=True)
class Gaussian(Copula):
    """Gaussian copula with normal-scores correlation r in (-1, 1)."""

    r: float

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        if not -1.0 < self.r < 1.0:
            raise DomainError(f"Gaussian correlation must lie in (-1, 1), got {self.r}")

    def _edge_guard(self, *vals):
        for w in vals:
            if np.any((w < GAUSS_EDGE) | (w > 1.0 - GAUSS_EDGE)):
                raise EvaluationError(
                    "Gaussian copula density requires arguments "
                    f"farther than {GAUSS_EDGE} from 0 and 1")

    def cdf_raw(self, u, v):
        if self.r == 0.0:
            return u * v
        ub, vb = np.broadcast_arrays(np.atleast_1d(np.asarray(u, dtype=float)),
                                     np.atleast_1d(np.asarray(v, dtype=float)))
        out = np.where(ub <= vb, ub, vb).astype(float)  # boundary rows reduce to min(u, v)
        inner = (ub > 0.0) & (ub < 1.0) & (vb > 0.0) & (vb < 1.0)
        if np.any(inner):
            out[inner] = self._bvn(norm_ppf(ub[inner]), norm_ppf(vb[inner]))
        shape = np.broadcast_shapes(np.shape(u), np.shape(v))
        return out.reshape(shape) if shape else out

    def _bvn(self, h, k):
        """P(X <= h, Y <= k) for standard bivariate normal, via Owen's T."""
        rho = self.r
        s = math.sqrt(1.0 - rho * rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            a1 = (k - rho * h) / (h * s)
            a2 = (h - rho * k) / (k * s)
        hk = h * k
        beta = np.where((hk > 0.0) | ((hk == 0.0) & (h + k >= 0.0)), 0.0, 0.5)
        out = 0.5 * (norm_cdf(h) + norm_cdf(k)) - owens_t(h, a1) - owens_t(k, a2) - beta
        both_zero = (h == 0.0) & (k == 0.0)
        if np.any(both_zero):
            out = np.where(both_zero, 0.25 + math.asin(rho) / (2.0 * math.pi), out)
        return np.clip(out, 0.0, 1.0)

    def density_raw(self, u, v):
        self._edge_guard(u, v)
        rho = self.r
        one_m = 1.0 - rho * rho
        x = norm_ppf(u)
        y = norm_ppf(v)
        expo = -(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * one_m)
        return np.exp(expo) / math.sqrt(one_m)

    def cond_u_raw(self, u, v):
        rho = self.r
        s = math.sqrt(1.0 - rho * rho)
        ub, vb = np.broadcast_arrays(np.atleast_1d(np.asarray(u, dtype=float)),
                                     np.atleast_1d(np.asarray(v, dtype=float)))
        out = np.where(vb >= 1.0, 1.0, 0.0)
        inner = (vb > 0.0) & (vb < 1.0)
        if np.any(inner):
            x = norm_ppf(ub[inner])
            y = norm_ppf(vb[inner])
            out[inner] = norm_cdf((y - rho * x) / s)
        shape = np.broadcast_shapes(np.shape(u), np.shape(v))
        return out.reshape(shape) if shape else out

    def cond_v_raw(self, u, v):
        return self.cond_u_raw(v, u)


@dataclass(frozen=True)
class Amh(Copula):
    """Ali-Mikhail-Haq copula, theta in [-1, 1]."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        if not -1.0 <= self.theta <= 1.0:
            raise DomainError(f"AMH theta must lie in [-1, 1], got {self.theta}")

    def _den(self, u, v):
        return 1.0 - self.theta * (1.0 - u) * (1.0 - v)

    def cdf_raw(self, u, v):
        d = self._den(u, v)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = u * v / d
        # d vanishes only at theta = 1, u = v = 0, where C = 0
        return np.where(d == 0.0, 0.0, out)

    def density_raw(self, u, v):
        th = self.theta
        d = self._den(u, v)
        return ((1.0 - th) * d + 2.0 * th * u * v) / d ** 3

    def cond_u_raw(self, u, v):
        return v * (1.0 - self.theta * (1.0 - v)) / self._den(u, v) ** 2

    def cond_v_raw(self, u, v):
        return self.cond_u_raw(v, u)


@dataclass(frozen=True)
class Convex(Copula):
    """Finite convex combination of copulas.

    Nested combinations are flattened and identical components merged at
    construction, so a ``Convex`` instance is always a flat list of distinct
    components with strictly positive weights summing to one.
    """

    weights: tuple[float, ...]
    components: tuple[Copula, ...]

    def __post_init__(self):
        ws = tuple(float(w) for w in self.weights)
        comps = tuple(self.components)
        if not comps or len(ws) != len(comps):
            raise DomainError("Convex needs matching, nonempty weights and components")
        if any(w <= 0.0 for w in ws):
            raise DomainError("Convex weights must be strictly positive")
        if abs(sum(ws) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"Convex weights must sum to 1, got {sum(ws)!r}")
        merged: dict[Copula, float] = {}
        for w, comp in zip(ws, comps):
            if isinstance(comp, Convex):
                for wi, ci in zip(comp.weights, comp.components):
                    merged[ci] = merged.get(ci, 0.0) + w * wi
            elif isinstance(comp, Copula):
                merged[comp] = merged.get(comp, 0.0) + w
            else:
                raise DomainError(f"Convex component is not a copula: {comp!r}")
        object.__setattr__(self, "weights", tuple(merged.values()))
        object.__setattr__(self, "components", tuple(merged.keys()))

    def _mix(self, attr, u, v):
        out = None
        for w, comp in zip(self.weights, self.components):
            term = w * getattr(comp, attr)(u, v)
            out = term if out is None else out + term
        return out

    def cdf_raw(self, u, v):
        return self._mix("cdf_raw", u, v)

    def density_raw(self, u, v):
        return self._mix("density_raw", u, v)

    def cond_u_raw(self, u, v):
        return self._mix("cond_u_raw", u, v)

    def cond_v_raw(self, u, v):
        return self._mix("cond_v_raw", u, v)

    @property
    def is_absolutely_continuous(self) -> bool:
        return all(c.is_absolutely_continuous for c in self.components)

    @property
    def has_kinks(self) -> bool:
        return any(c.has_kinks for c in self.components)

    def kinks_left(self, x):
        out: tuple[float, ...] = ()
        for c in self.components:
            out += c.kinks_left(x)
        return out

    def kinks_right(self, y):
        out: tuple[float, ...] = ()
        for c in self.components:
            out += c.kinks_right(y)
        return out


@dataclass(frozen=True)
class NumericFold(Copula):
    """Fold product evaluated by quadrature instead of a closed form.

    The CDF integrates the product of the left factor's v-partial and the
    right factor's u-partial.  Partials and the density additionally need the
    corresponding factor to be absolutely continuous; otherwise the
    differentiation-under-the-integral step is invalid and the operation
    raises instead of silently dropping singular mass.
    """

    left: Copula
    right: Copula

    def __post_init__(self):
        if not isinstance(self.left, Copula) or not isinstance(self.right, Copula):
            raise DomainError("NumericFold factors must be copulas")

    def cdf_raw(self, u, v):
        return _fold_quad(self.left.cond_v_raw, self.right.cond_u_raw, u, v,
                          kinks_x=self.left.kinks_left if self.left.has_kinks else None,
                          kinks_y=self.right.kinks_right if self.right.has_kinks else None)

    def density_raw(self, u, v):
        if not (self.left.is_absolutely_continuous and self.right.is_absolutely_continuous):
            raise DensityUnavailableError(
                "density of a numeric fold needs absolutely continuous factors")
        return _fold_quad(self.left.density_raw, self.right.density_raw, u, v)

    def cond_u_raw(self, u, v):
        if not self.left.is_absolutely_continuous:
            raise UnsupportedCopulaError(
                "conditional CDF of a numeric fold needs an absolutely continuous left factor")
        return _fold_quad(self.left.density_raw, self.right.cond_u_raw, u, v,
                          kinks_y=self.right.kinks_right if self.right.has_kinks else None)

    def cond_v_raw(self, u, v):
        if not self.right.is_absolutely_continuous:
            raise UnsupportedCopulaError(
                "v-partial of a numeric fold needs an absolutely continuous right factor")
        return _fold_quad(self.left.cond_v_raw, self.right.density_raw, u, v,
                          kinks_x=self.left.kinks_left if self.left.has_kinks else None)

    @property
    def is_absolutely_continuous(self) -> bool:
        return self.left.is_absolutely_continuous and self.right.is_absolutely_continuous


def _fold_quad(f_left, g_right, u, v, kinks_x=None, kinks_y=None):
    """Evaluate integral over t of f_left(x, t) * g_right(t, y) elementwise."""
    xb, yb = np.broadcast_arrays(np.atleast_1d(np.asarray(u, dtype=float)),
                                 np.atleast_1d(np.asarray(v, dtype=float)))
    x = xb.ravel()
    y = yb.ravel()
    out = np.empty_like(x)
    if kinks_x is None and kinks_y is None:
        t, wts = unit_rule()
        step = max(1, _CHUNK_BUDGET // t.size)
        for i in range(0, x.size, step):
            xs = x[i:i + step, None]
            ys = y[i:i + step, None]
            vals = f_left(xs, t[None, :]) * g_right(t[None, :], ys)
            out[i:i + step] = vals @ wts
    else:
        for i in range(x.size):
            cuts: tuple[float, ...] = ()
            if kinks_x is not None:
                cuts += kinks_x(float(x[i]))
            if kinks_y is not None:
                cuts += kinks_y(float(y[i]))
            t, wts = unit_rule(tuple(sorted(set(cuts))))
            out[i] = np.dot(wts, f_left(x[i], t) * g_right(t, y[i]))
    shape = np.broadcast_shapes(np.shape(u), np.shape(v))
    return out.reshape(shape) if shape else out


# module-level instances of the parameterless families
PI = Independence()
M = Comonotone()
W = Countermonotone()


# ---------------------------------------------------------------------------
# validated evaluation entry points
# ---------------------------------------------------------------------------

def cdf(c: Copula, u, v):
    """C(u, v) for u, v in [0, 1]."""
    ua, va, scalar = _prep(u, v)
    if np.any((ua < 0.0) | (ua > 1.0) | (va < 0.0) | (va > 1.0)):
        raise DomainError("cdf arguments must lie in [0, 1]")
    return _ret(c.cdf_raw(ua, va), scalar)


def density(c: Copula, u, v):
    """Absolutely continuous density on the open unit square.

    For copulas with a singular part this is the density of the AC part
    only (zero for M and W).  Raises ``DensityUnavailableError`` for numeric
    folds with a singular factor.
    """
    ua, va, scalar = _prep(u, v)
    if np.any((ua <= 0.0) | (ua >= 1.0) | (va <= 0.0) | (va >= 1.0)):
        raise DomainError("density arguments must lie strictly inside (0, 1)")
    return _ret(c.density_raw(ua, va), scalar)


def conditional_cdf(c: Copula, u, v):
    """P(next <= v | previous = u), the u-partial of the CDF."""
    ua, va, scalar = _prep(u, v)
    if np.any((ua <= 0.0) | (ua >= 1.0)):
        raise DomainError("conditioning point must lie strictly inside (0, 1)")
    if np.any((va < 0.0) | (va > 1.0)):
        raise DomainError("conditional_cdf target must lie in [0, 1]")
    return _ret(c.cond_u_raw(ua, va), scalar)


@dataclass(frozen=True)
class Rect:
    """Half-open rectangle (u_lo, u_hi] x (v_lo, v_hi] inside the unit square."""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        for name in ("u_lo", "u_hi", "v_lo", "v_hi"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (0.0 <= self.u_lo < self.u_hi <= 1.0 and 0.0 <= self.v_lo < self.v_hi <= 1.0):
            raise DomainError(f"degenerate or out-of-range rectangle: {self}")


def rectangle_probability(c: Copula, rect: Rect) -> float:
    """Copula mass of ``rect`` by inclusion-exclusion of corner CDF values."""
    corners = np.array([[rect.u_hi, rect.v_hi], [rect.u_lo, rect.v_hi],
                        [rect.u_hi, rect.v_lo], [rect.u_lo, rect.v_lo]])
    vals = c.cdf_raw(corners[:, 0], corners[:, 1])
    return float(vals[0] - vals[1] - vals[2] + vals[3])


def reflect_u(c: Copula):
    """Copula of (1 - U, V) when it has a closed form, else None.

    Flipping one coordinate avoids evaluating CDFs at arguments like
    1 - epsilon, which keeps corner probabilities exact for small epsilon.
    """
    if isinstance(c, Independence):
        return c
    if isinstance(c, Comonotone):
        return W
    if isinstance(c, Countermonotone):
        return M
    if isinstance(c, Fgm):
        return Fgm(-c.theta)
    if isinstance(c, Frechet):
        return Frechet(-c.theta)
    if isinstance(c, Mardia):
        return _canonical_mardia(c.b, c.a)
    if isinstance(c, Gaussian):
        return Gaussian(-c.r)
    if isinstance(c, Convex):
        parts = [reflect_u(comp) for comp in c.components]
        if any(p is None for p in parts):
            return None
        return Convex(c.weights, tuple(parts))
    if isinstance(c, NumericFold):
        left = reflect_u(c.left)
        return None if left is None else NumericFold(left, c.right)
    return None


def reflect_v(c: Copula):
    """Copula of (U, 1 - V) when it has a closed form, else None."""
    if isinstance(c, NumericFold):
        right = reflect_v(c.right)
        return None if right is None else NumericFold(c.left, right)
    if isinstance(c, Convex):
        parts = [reflect_v(comp) for comp in c.components]
        if any(p is None for p in parts):
            return None
        return Convex(c.weights, tuple(parts))
    # every other closed-form family here is exchangeable, so flipping V
    # produces the same family member as flipping U
    return reflect_u(c)


# ---------------------------------------------------------------------------
# fold algebra
# ---------------------------------------------------------------------------

def _mardia_params(c: Copula):
    if isinstance(c, Mardia):
        return c.a, c.b
    if isinstance(c, Comonotone):
        return 1.0, 0.0
    if isinstance(c, Countermonotone):
        return 0.0, 1.0
    if isinstance(c, Independence):
        return 0.0, 0.0
    return None


def _canonical_mardia(a: float, b: float) -> Copula:
    if a == 0.0 and b == 0.0:
        return PI
    if a == 1.0 and b == 0.0:
        return M
    if a == 0.0 and b == 1.0:
        return W
    return Mardia(a, b)


def _convex_terms(c: Copula):
    if isinstance(c, Convex):
        return list(zip(c.weights, c.components))
    return [(1.0, c)]


def _merge_terms(terms) -> Copula:
    merged: dict[Copula, float] = {}
    for w, comp in terms:
        merged[comp] = merged.get(comp, 0.0) + w
    if len(merged) == 1:
        return next(iter(merged))
    total = sum(merged.values())
    return Convex(tuple(w / total for w in merged.values()), tuple(merged.keys()))


def fold(c1: Copula, c2: Copula) -> Copula:
    """Fold product C1 * C2.

    Closed-form rules: Pi absorbs, M is the identity, FGM folds to
    FGM(theta1 * theta2 / 3), the Mardia weights compose as
    (a1 a2 + b1 b2, a1 b2 + a2 b1), and convex combinations distribute
    termwise.  Any other pair becomes a :class:`NumericFold`.
    """
    if isinstance(c1, Independence) or isinstance(c2, Independence):
        return PI
    if isinstance(c1, Comonotone):
        return c2
    if isinstance(c2, Comonotone):
        return c1
    if isinstance(c1, Convex) or isinstance(c2, Convex):
        terms = [(w1 * w2, fold(a, b))
                 for w1, a in _convex_terms(c1)
                 for w2, b in _convex_terms(c2)]
        return _merge_terms(terms)
    if isinstance(c1, Fgm) and isinstance(c2, Fgm):
        return Fgm(c1.theta * c2.theta / 3.0)
    p1 = _mardia_params(c1)
    p2 = _mardia_params(c2)
    if p1 is not None and p2 is not None:
        a1, b1 = p1
        a2, b2 = p2
        return _canonical_mardia(a1 * a2 + b1 * b2, a1 * b2 + a2 * b1)
    return NumericFold(c1, c2)


def numeric_fold_depth(c: Copula) -> int:
    """Maximum NumericFold nesting depth inside a specification."""
    if isinstance(c, NumericFold):
        return 1 + max(numeric_fold_depth(c.left), numeric_fold_depth(c.right))
    if isinstance(c, Convex):
        return max(numeric_fold_depth(comp) for comp in c.components)
    return 0


def n_fold(c: Copula, n: int, max_depth: int = MAX_NUMERIC_FOLD_DEPTH) -> Copula:
    """n-step fold power of ``c`` (the lag-n copula of its chain).

    Closed forms: FGM(theta) -> FGM(3 (theta/3)^n); Mardia iterates its
    weight composition; a two-term convex combination with Pi keeps its
    non-Pi part with weight (1 - alpha)^n.  The general path iterates
    ``fold`` and raises ``FoldDepthError`` once the NumericFold nesting
    exceeds ``max_depth``.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n_fold requires n >= 1, got {n}")
    if n == 1:
        return c
    if isinstance(c, Fgm):
        return Fgm(3.0 * (c.theta / 3.0) ** n)
    params = _mardia_params(c)
    if params is not None:
        a, b = params
        acc_a, acc_b = a, b
        for _ in range(n - 1):
            acc_a, acc_b = acc_a * a + acc_b * b, acc_a * b + acc_b * a
        return _canonical_mardia(acc_a, acc_b)
    if isinstance(c, Convex) and len(c.components) == 2:
        flags = [isinstance(comp, Independence) for comp in c.components]
        if any(flags):
            # perturbation toward independence: the non-Pi part survives a
            # fold power only when every step picks it
            i_pi = flags.index(True)
            i_other = 1 - i_pi
            keep = c.weights[i_other] ** n
            powered = n_fold(c.components[i_other], n, max_depth)
            return _merge_terms([(keep, powered), (1.0 - keep, PI)])
    acc = c
    for _ in range(n - 1):
        acc = fold(acc, c)
        depth = numeric_fold_depth(acc)
        if depth > max_depth:
            raise FoldDepthError(
                f"numeric fold nesting reached depth {depth} > cap {max_depth}")
    return acc


def perturb_pi(c: Copula, alpha: float) -> Copula:
    """Mix toward independence: (1 - alpha) C + alpha Pi."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"perturbation weight must lie in [0, 1], got {alpha}")
    if isinstance(c, Fgm):
        return Fgm(c.theta * (1.0 - alpha))
    if alpha == 0.0:
        return c
    if alpha == 1.0:
        return PI
    return _merge_terms([(1.0 - alpha, c), (alpha, PI)])


def perturb_m(c: Copula, alpha: float) -> Copula:
    """Mix toward comonotone dependence: (1 - alpha) C + alpha M."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"perturbation weight must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return c
    if alpha == 1.0:
        return M
    return _merge_terms([(1.0 - alpha, c), (alpha, M)])


# ---------------------------------------------------------------------------
# grids and diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityGrid:
    """AC density sampled at cell midpoints ((i+1/2)/m, (j+1/2)/m)."""

    resolution: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.resolution, self.resolution):
            raise DomainError("density grid shape must match its resolution")
        if np.any(self.values < 0.0):
            raise DomainError("density values must be nonnegative")

    @property
    def riemann_sum(self) -> float:
        return float(self.values.sum()) / (self.resolution * self.resolution)


def midpoints(m: int) -> np.ndarray:
    return (np.arange(m) + 0.5) / m


def density_grid(c: Copula, m: int) -> DensityGrid:
    if m < 1:
        raise DomainError("grid resolution must be positive")
    t = midpoints(m)
    vals = c.density_raw(t[:, None], t[None, :])
    vals = np.broadcast_to(np.asarray(vals, dtype=float), (m, m)).copy()
    return DensityGrid(m, vals)


def is_quadrature_backed(c: Copula) -> bool:
    if isinstance(c, NumericFold):
        return True
    if isinstance(c, Convex):
        return any(is_quadrature_backed(comp) for comp in c.components)
    return False


@dataclass(frozen=True)
class AxiomReport:
    """Lattice check of the copula axioms at one resolution."""

    resolution: int
    grounded_max_abs: float
    margin_max_abs: float
    min_cell_mass: float
    margin_tolerance: float
    cell_tolerance: float
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_copula_axioms(c: Copula, m: int = 32) -> AxiomReport:
    """Verify groundedness, margins, and 2-increasingness on an (m+1)^2 lattice.

    Closed-form specifications must satisfy the boundary conditions to 1e-12;
    quadrature-backed ones get 1e-8 on the margins.  Every lattice cell must
    carry mass >= -1e-12.
    """
    if m < 1:
        raise DomainError("lattice resolution must be positive")
    xs = np.linspace(0.0, 1.0, m + 1)
    uu, vv = np.meshgrid(xs, xs, indexing="ij")
    grid = c.cdf_raw(uu, vv)
    margin_tol = 1e-8 if is_quadrature_backed(c) else 1e-12
    cell_tol = -1e-12

    grounded = max(float(np.abs(grid[0, :]).max()), float(np.abs(grid[:, 0]).max()))
    margin = max(float(np.abs(grid[-1, :] - xs).max()), float(np.abs(grid[:, -1] - xs).max()))
    cells = grid[1:, 1:] - grid[:-1, 1:] - grid[1:, :-1] + grid[:-1, :-1]
    min_mass = float(cells.min())

    violations = []
    if grounded > margin_tol:
        violations.append(f"grounding error {grounded:.3e} exceeds {margin_tol:.1e}")
    if margin > margin_tol:
        violations.append(f"margin error {margin:.3e} exceeds {margin_tol:.1e}")
    if min_mass < cell_tol:
        i, j = np.unravel_index(int(np.argmin(cells)), cells.shape)
        violations.append(
            f"negative cell mass {min_mass:.3e} at cell ({i}, {j}) of {m}x{m} lattice")
    return AxiomReport(m, grounded, margin, min_mass, margin_tol, cell_tol, tuple(violations))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def to_dict(c: Copula) -> dict:
    if isinstance(c, Independence):
        return {"family": "independence"}
    if isinstance(c, Comonotone):
        return {"family": "m"}
    if isinstance(c, Countermonotone):
        return {"family": "w"}
    if isinstance(c, Fgm):
        return {"family": "fgm", "theta": c.theta}
    if isinstance(c, Frechet):
        return {"family": "frechet", "theta": c.theta}
    if isinstance(c, Mardia):
        return {"family": "mardia", "a": c.a, "b": c.b}
    if isinstance(c, Gaussian):
        return {"family": "gaussian", "r": c.r}
    if isinstance(c, Amh):
        return {"family": "amh", "theta": c.theta}
    if isinstance(c, Convex):
        return {"family": "convex",
                "weights": list(c.weights),
                "components": [to_dict(comp) for comp in c.components]}
    if isinstance(c, NumericFold):
        return {"family": "numeric_fold", "left": to_dict(c.left), "right": to_dict(c.right)}
    raise UnsupportedCopulaError(f"cannot serialize {type(c).__name__}")


def from_dict(d: dict) -> Copula:
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigError(f"copula specification must be an object with a 'family': {d!r}")
    fam = d["family"]
    try:
        if fam == "independence":
            return PI
        if fam == "m":
            return M
        if fam == "w":
            return W
        if fam == "fgm":
            return Fgm(d["theta"])
        if fam == "frechet":
            return Frechet(d["theta"])
        if fam == "mardia":
            return Mardia(d["a"], d["b"])
        if fam == "gaussian":
            return Gaussian(d["r"])
        if fam == "amh":
            return Amh(d["theta"])
        if fam == "convex":
            return Convex(tuple(d["weights"]), tuple(from_dict(x) for x in d["components"]))
        if fam == "numeric_fold":
            return NumericFold(from_dict(d["left"]), from_dict(d["right"]))
    except KeyError as exc:
        raise ConfigError(f"copula specification for '{fam}' is missing field {exc}") from exc
    raise ConfigError(f"unknown copula family: {fam!r}")


def to_json(c: Copula) -> str:
    return json.dumps(to_dict(c), separators=(", ", ": "))


def from_json(text: str) -> Copula:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid copula JSON: {exc}") from exc
    return from_dict(data)
