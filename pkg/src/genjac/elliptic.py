"""Weierstrass functions, quasi-periods and the differentials used on a torus.

Conventions (kept in one place on purpose)
------------------------------------------
* Period basis ``omega1 = 1``, ``omega2 = tau``; the lattice is ``Z + tau Z``.
* Quasi-periods ``eta_k = 2 zeta(omega_k / 2)`` so ``zeta(z + omega_k) = zeta(z) + eta_k``.
* Legendre relation in the form ``eta1 * tau - eta2 = 2 pi i``.
* ``sigma(z + omega_k) = -sigma(z) exp(eta_k (z + omega_k / 2))``.
* The alpha cycle based at a corner ``b`` is the segment ``[b, b + 1]``,
  the beta cycle is ``[b, b + tau]``; small circles run anticlockwise.

Evaluation uses q-series on an SL(2, Z)-reduced period ratio ``tau'`` where
``|q| <= exp(-pi sqrt 3)``.  The lattice is ``lam * (Z + tau' Z)`` with
``lam = c tau + d`` and everything is rescaled back.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import AccuracyError, CapabilityError, DomainError, PathError, PoleError
from .lattice import Lattice, TorusPoint, reduce_fundamental_domain

PI = math.pi
TWO_PI_I = 2j * math.pi
_POLE_EPS = 1e-13


def _needed_terms(qabs, tol, scale=16 * PI ** 3):
    # tail of sum n^3 |q|^(n/2): the slowest family (eta2 from zeta(tau/2))
    r = math.sqrt(qabs)
    n = 1
    while scale * (n ** 3) * r ** n / (1 - r) > tol * 1e-3:
        n += 1
        if n > 10_000:
            break
    return n


# ===================
# Weierstrass context
# ===================

@dataclass(frozen=True, eq=False)
class WeierstrassContext:
    """Invariants and quasi-periods of ``Z + tau Z`` plus series data."""

    lattice: Lattice
    g2: complex
    g3: complex
    eta1: complex
    eta2: complex
    nterms: int
    tol: float
    # reduced-lattice data
    tau_r: complex
    transform: tuple
    lam: complex
    eta1_r: complex
    eta2_r: complex
    _coef: dict = field(repr=False, default_factory=dict)

    @property
    def tau(self):
        return self.lattice.tau

    def legendre_residual(self):
        return abs(self.eta1 * self.tau - self.eta2 - TWO_PI_I)

    def quasi_period(self, m, n):
        """``eta(m + n tau)`` with ``zeta(z + w) = zeta(z) + eta(w)``."""
        return m * self.eta1 + n * self.eta2


def make_context(lattice, truncation=None, tol=1e-13):
    """Build the context.  ``truncation`` is the number of q-series terms;
    ``None`` picks it from ``tol``.  A fixed truncation too small for ``tol``
    raises :class:`AccuracyError`."""
    if not isinstance(lattice, Lattice):
        lattice = Lattice(lattice)
    tau_r, m = reduce_fundamental_domain(lattice.tau)
    (a, b), (c, d) = m
    lam = c * lattice.tau + d
    q = cmath.exp(TWO_PI_I * tau_r)
    need = _needed_terms(abs(q), tol)
    if truncation is None:
        nterms = need
    else:
        nterms = int(truncation)
        if nterms < need:
            raise AccuracyError(
                f"truncation {nterms} cannot reach tol {tol:g} (needs {need} terms)")
    n = np.arange(1, nterms + 1)
    qn = q ** n
    lam_n = qn / (1 - qn)
    # reduced-lattice invariants
    sig3 = np.array([sum(d ** 3 for d in range(1, k + 1) if k % d == 0) for k in n])
    sig5 = np.array([sum(d ** 5 for d in range(1, k + 1) if k % d == 0) for k in n])
    e2 = 1 - 24 * np.sum(n * lam_n)
    e4 = 1 + 240 * np.sum(sig3 * qn)
    e6 = 1 - 504 * np.sum(sig5 * qn)
    g2r = (4 * PI ** 4 / 3) * e4
    g3r = (8 * PI ** 6 / 27) * e6
    eta1r = (PI ** 2 / 3) * e2
    coef = {"n": n, "qn": qn, "lam": lam_n}
    # eta2' = 2 zeta'(tau'/2) straight from the series (Legendre is then a check)
    h = tau_r / 2
    eta2r = 2 * (eta1r * h + PI / cmath.tan(PI * h)
                 + 4 * PI * np.sum(lam_n * np.sin(2 * PI * n * h)))
    g2 = complex(g2r / lam ** 4)
    g3 = complex(g3r / lam ** 6)
    eta1 = complex((a * eta1r - c * eta2r) / lam)
    eta2 = complex((-b * eta1r + d * eta2r) / lam)
    return WeierstrassContext(lattice, g2, g3, eta1, eta2, nterms, tol,
                              tau_r, m, lam, complex(eta1r), complex(eta2r), coef)


# ============================
# q-series on the reduced lattice
# ============================

def _reduce_arg(ctx, z):
    """Write ``z / lam = u0 + m + n tau'`` with ``u0`` centred."""
    u = np.asarray(z, dtype=complex) / ctx.lam
    tr = ctx.tau_r
    n = np.rint(u.imag / tr.imag)
    m = np.rint((u - n * tr).real)
    u0 = u - m - n * tr
    return u0, m, n


def _check_pole(u0, order, what):
    if np.any(np.abs(u0) < _POLE_EPS):
        raise PoleError(f"{what} has a pole of order {order} at lattice points", order)


def _series(ctx, u0, kind):
    n = ctx._coef["n"]
    lam_n = ctx._coef["lam"]
    arg = 2 * PI * np.multiply.outer(u0, n)
    if kind == "wp":
        return -8 * PI ** 2 * np.sum(n * lam_n * np.cos(arg), axis=-1)
    if kind == "wpp":
        return 16 * PI ** 3 * np.sum(n ** 2 * lam_n * np.sin(arg), axis=-1)
    return 4 * PI * np.sum(lam_n * np.sin(arg), axis=-1)


def _out(val):
    return complex(val) if np.ndim(val) == 0 else val


def wp(ctx, z):
    u0, _, _ = _reduce_arg(ctx, z)
    _check_pole(u0, 2, "wp")
    s = np.sin(PI * u0)
    val = -ctx.eta1_r + PI ** 2 / s ** 2 + _series(ctx, u0, "wp")
    return _out(val / ctx.lam ** 2)


def wp_prime(ctx, z):
    u0, _, _ = _reduce_arg(ctx, z)
    _check_pole(u0, 3, "wp'")
    s = np.sin(PI * u0)
    val = -2 * PI ** 3 * np.cos(PI * u0) / s ** 3 + _series(ctx, u0, "wpp")
    return _out(val / ctx.lam ** 3)


def zeta_fn(ctx, z):
    u0, m, n = _reduce_arg(ctx, z)
    _check_pole(u0, 1, "zeta")
    val = (ctx.eta1_r * u0 + PI / np.tan(PI * u0) + _series(ctx, u0, "zeta")
           + m * ctx.eta1_r + n * ctx.eta2_r)
    return _out(val / ctx.lam)


def sigma_fn(ctx, z):
    u0, m, n = _reduce_arg(ctx, z)
    qn = ctx._coef["qn"]
    e = np.exp(TWO_PI_I * np.asarray(u0))[..., None]
    prod = np.prod((1 - qn * e) * (1 - qn / e) / (1 - qn) ** 2, axis=-1)
    base = np.sin(PI * u0) / PI * np.exp(ctx.eta1_r * u0 ** 2 / 2) * prod
    # quasi-periodicity for the shift w = m + n tau'
    w = m + n * ctx.tau_r
    eta_w = m * ctx.eta1_r + n * ctx.eta2_r
    mi, ni = m.astype(np.int64), n.astype(np.int64)
    sign = np.where((mi + ni + mi * ni) % 2 == 0, 1.0, -1.0)
    val = sign * base * np.exp(eta_w * (u0 + w / 2))
    return _out(ctx.lam * val)


def wp_derivative(ctx, z, k):
    """k-th derivative of wp written as a polynomial in (wp, wp')."""
    if k == 0:
        return wp(ctx, z)
    if k == 1:
        return wp_prime(ctx, z)
    poly = _wp_poly(k, ctx.g2)
    p, dp = np.asarray(wp(ctx, z)), np.asarray(wp_prime(ctx, z))
    val = sum(c * p ** i * dp ** j for (i, j), c in poly.items())
    return _out(val)


def _wp_poly(k, g2):
    # d/dz wp = wp',  d/dz wp' = 6 wp^2 - g2/2
    poly = {(1, 0): 1.0 + 0j}
    for _ in range(k):
        new = {}
        for (i, j), c in poly.items():
            if i:
                new[(i - 1, j + 1)] = new.get((i - 1, j + 1), 0) + c * i
            if j:
                new[(i + 2, j - 1)] = new.get((i + 2, j - 1), 0) + 6 * c * j
                new[(i, j - 1)] = new.get((i, j - 1), 0) - c * j * g2 / 2
        poly = new
    return poly


def ode_residual(ctx, z):
    """Residual of ``wp'^2 = 4 wp^3 - g2 wp - g3`` relative to the size of
    its terms (so it does not depend on how the lattice is scaled)."""
    p = np.asarray(wp(ctx, z))
    dp = np.asarray(wp_prime(ctx, z))
    res = np.abs(dp ** 2 - (4 * p ** 3 - ctx.g2 * p - ctx.g3))
    scale = np.abs(dp) ** 2 + 4 * np.abs(p) ** 3 + abs(ctx.g2) * np.abs(p) + abs(ctx.g3)
    return res / np.maximum(1.0, scale)


# ========================
# differentials and cycles
# ========================

class Alpha:
    def __init__(self, base=0j):
        self.base = complex(base)

    def __repr__(self):
        return f"Alpha(base={self.base})"


class Beta:
    def __init__(self, base=0j):
        self.base = complex(base)

    def __repr__(self):
        return f"Beta(base={self.base})"


class SmallCircle:
    def __init__(self, center, radius):
        self.center = center.rep if isinstance(center, TorusPoint) else complex(center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise DomainError("radius must be positive")

    def __repr__(self):
        return f"SmallCircle({self.center}, r={self.radius})"


class Segment:
    """Straight path (used for Abel integrals and the period map)."""

    def __init__(self, start, end):
        self.start, self.end = complex(start), complex(end)


class Polyline:
    def __init__(self, points):
        self.points = [complex(p) for p in points]


@dataclass(frozen=True, eq=False)
class Differential:
    """``f(z) dz`` on the torus.

    kind is ``"holomorphic"``, ``"third"`` (poles ``z1``, ``z2``) or
    ``"second"`` (pole ``z0`` of ``order``).  ``c`` is the coefficient of the
    added ``dz`` term, chosen so the alpha period based at ``corner`` is 0
    (the holomorphic ``dz`` is left with alpha period 1).
    """

    ctx: WeierstrassContext
    kind: str
    points: tuple = ()
    order: int = 0
    c: complex = 0j
    corner: complex = 0j

    def coefficient(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "holomorphic":
            return _out(np.ones_like(z))
        if self.kind == "third":
            z1, z2 = self.points
            v = zeta_fn(self.ctx, z - z1) - zeta_fn(self.ctx, z - z2) + self.c
            return _out(np.asarray(v) / TWO_PI_I)
        (z0,) = self.points
        return _out(np.asarray(wp_derivative(self.ctx, z - z0, self.order - 2)) + self.c)

    __call__ = coefficient

    def poles(self):
        """``[(point, order, residue)]`` with representatives as stored."""
        if self.kind == "third":
            z1, z2 = self.points
            return [(z1, 1, 1 / TWO_PI_I), (z2, 1, -1 / TWO_PI_I)]
        if self.kind == "second":
            return [(self.points[0], self.order, 0j)]
        return []

    def residue(self, point):
        lat = self.ctx.lattice
        for p, _, r in self.poles():
            if lat.distance(complex(point) - p) < 1e-9:
                return r
        return 0j


def holomorphic_differential(ctx):
    return Differential(ctx, "holomorphic")


def _rep(ctx, p, corner):
    if isinstance(p, TorusPoint):
        return p.rep_in(corner)
    return ctx.lattice.reduce_mod(complex(p), corner)


def third_kind_differential(ctx, z1, z2, corner=0j):
    """``(1/2 pi i)(zeta(z - z1) - zeta(z - z2) + c) dz`` with zero alpha period
    on ``[corner, corner + 1]``.  With both poles represented in
    ``corner + F`` the beta period is ``z1 - z2``."""
    corner = complex(corner)
    w1, w2 = _rep(ctx, z1, corner), _rep(ctx, z2, corner)
    if ctx.lattice.distance(w1 - w2) < 1e-12:
        raise DomainError("third-kind differential needs two distinct points")
    # The alpha integral of zeta(z - w1) - zeta(z - w2) is eta1 (w2 - w1) up to
    # 2 pi i times an integer fixed by the path; a coarse quadrature pins it.
    raw = Differential(ctx, "third", (w1, w2), 1, 0j, corner)
    approx = TWO_PI_I * period_integral(ctx, raw, Alpha(corner), tol=1e-6)
    k = round(((approx - ctx.eta1 * (w2 - w1)) / TWO_PI_I).real)
    c = -(ctx.eta1 * (w2 - w1) + TWO_PI_I * k)
    return Differential(ctx, "third", (w1, w2), 1, complex(c), corner)


def second_kind_differential(ctx, z0, order=2, corner=0j):
    """Residue-free differential with a pole of order ``order`` at ``z0``.

    Order 2 is ``(wp(z - z0) + eta1) dz``; higher orders use
    ``wp^(order-2)(z - z0) dz``, an exact form.  The alpha period is 0."""
    order = int(order)
    if order < 2:
        raise CapabilityError(f"second-kind differential of order {order} is not supported")
    corner = complex(corner)
    w0 = _rep(ctx, z0, corner)
    c = ctx.eta1 if order == 2 else 0j
    return Differential(ctx, "second", (w0,), order, complex(c), corner)


def closed_periods(d):
    """Alpha/beta periods of ``d`` in closed form (used as an oracle)."""
    ctx = d.ctx
    if d.kind == "holomorphic":
        return 1 + 0j, ctx.tau
    if d.kind == "third":
        z1, z2 = d.points
        return 0j, z1 - z2
    if d.order == 2:
        return 0j, ctx.eta1 * ctx.tau - ctx.eta2
    return 0j, 0j


# ===========
# integration
# ===========

def _quad_segment(f, a, b, tol):
    d = b - a
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(lambda t: f(a + t * d), 0.0, 1.0, complex_func=True,
                                      epsabs=tol, epsrel=tol, limit=400, full_output=0)
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"quadrature tolerance unmet on [{a}, {b}]: {exc}") from None
    return complex(val) * d


def _segment_hits_pole(ctx, d, a, b, margin):
    lat = ctx.lattice
    for p, _, _ in d.poles():
        # distance from every lattice translate of p near the segment
        seg = b - a
        for t in np.linspace(0, 1, 65):
            if lat.distance(a + t * seg - p) < margin:
                # refine: exact distance to the nearest translate
                w, _ = lat.nearest_point(a + t * seg - p)
                q = p + w
                tt = min(1.0, max(0.0, ((q - a) * seg.conjugate()).real / abs(seg) ** 2))
                if abs(a + tt * seg - q) < margin:
                    return True
    return False


def period_integral(ctx, d, cycle, tol=1e-10, circle_points=None):
    """Integrate ``d`` over an :class:`Alpha`, :class:`Beta`, :class:`SmallCircle`,
    :class:`Segment` or :class:`Polyline`."""
    if isinstance(cycle, SmallCircle):
        return _circle_integral(ctx, d, cycle, tol, circle_points)
    if isinstance(cycle, Alpha):
        pts = [cycle.base, cycle.base + 1]
    elif isinstance(cycle, Beta):
        pts = [cycle.base, cycle.base + ctx.tau]
    elif isinstance(cycle, Segment):
        pts = [cycle.start, cycle.end]
    elif isinstance(cycle, Polyline):
        pts = cycle.points
    else:
        raise DomainError(f"unknown cycle {cycle!r}")
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        if abs(b - a) == 0:
            continue
        if _segment_hits_pole(ctx, d, a, b, 1e-8):
            raise PathError(f"path [{a}, {b}] runs through a pole")
        total += _quad_segment(d.coefficient, a, b, tol)
    return total


def _circle_integral(ctx, d, circle, tol, npts=None):
    lat = ctx.lattice
    center, r = circle.center, circle.radius
    for p, _, _ in d.poles():
        dist = lat.distance(p - center)
        if dist > 1e-12 and dist <= r * 1.05:
            raise PathError(f"circle of radius {r} at {center} reaches pole {p}")
        if dist <= 1e-12:
            continue
    # trapezoid on a circle is geometrically convergent; double until stable
    n = npts or 64
    prev = None
    while True:
        th = 2 * PI * np.arange(n) / n
        zs = center + r * np.exp(1j * th)
        val = complex(np.mean(np.asarray(d.coefficient(zs)) * 1j * r * np.exp(1j * th)) * 2 * PI)
        if npts is not None:
            return val
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n > 1 << 16:
            raise AccuracyError("circle quadrature did not converge")
        prev = val
        n *= 2


def abel_integral(ctx, start, end, corner=0j):
    """``int_start^end dz`` inside the cut domain ``corner + F``: the
    difference of the in-domain representatives."""
    return _rep(ctx, end, corner) - _rep(ctx, start, corner)
