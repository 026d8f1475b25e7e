"""Divisors of elliptic functions, the congruence f = c mod m, the period map
and a forward numeric check of the generalized Abel theorem (g = 1)."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import elliptic as ell
from .albanese import build_period_matrix_numeric, numeric_forms
from .curve import SingularCurveSpec, genus
from .divisor import Divisor, Multiconstant
from .errors import AccuracyError, DomainError, PathError, PoleError, RadiusError
from .lattice import Lattice, TorusPoint
from .mero import Binary, Const, Leaf, MeroExpr, check_well_formed, evaluate, evaluate_dual, is_constant, parse

TWO_PI_I = 2j * np.pi
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL_X = (_GL_X + 1) / 2
_GL_W = _GL_W / 2


def _as_expr(expr):
    return parse(expr) if isinstance(expr, str) else expr


def _ctx_for(ctx_or_spec):
    if isinstance(ctx_or_spec, ell.WeierstrassContext):
        return ctx_or_spec
    if isinstance(ctx_or_spec, SingularCurveSpec):
        return _context(complex(ctx_or_spec.tau))
    return _context(complex(ctx_or_spec))


@functools.lru_cache(maxsize=32)
def _context(tau):
    return ell.make_context(Lattice(tau))


# ==============================
# log-derivative and edge moments
# ==============================

class _Retry(Exception):
    pass


def _logderiv(expr, ctx, z):
    with np.errstate(all="ignore"):
        try:
            v, dv = evaluate_dual(expr, ctx, z)
        except PoleError:
            raise _Retry() from None
        out = np.asarray(dv) / np.asarray(v)
    if not np.all(np.isfinite(out)):
        raise _Retry()
    return out


def _edge_batch(expr, ctx, za, zb, origin):
    """Gauss-Legendre moments (k = 0, 1, 2) of ``(z-origin)^k f'/f`` on many
    edges at once; returns (coarse, fine) estimates, shape (E, 3)."""
    za, zb = np.asarray(za), np.asarray(zb)
    d = zb - za
    def rule(lo, hi):
        t = lo[:, None] + (hi - lo)[:, None] * _GL_X[None, :]
        z = za[:, None] + d[:, None] * t
        g = _logderiv(expr, ctx, z)
        w = _GL_W[None, :] * (hi - lo)[:, None] * d[:, None]
        u = z - origin
        return np.stack([np.sum(w * g * u ** k, axis=1) for k in range(3)], axis=1)
    zero, half, one = np.zeros(len(za)), np.full(len(za), 0.5), np.ones(len(za))
    coarse = rule(zero, one)
    fine = rule(zero, half) + rule(half, one)
    return coarse, fine


def _edge_adaptive(expr, ctx, za, zb, origin, tol, depth=0):
    coarse, fine = _edge_batch(expr, ctx, np.array([za]), np.array([zb]), origin)
    if np.max(np.abs(coarse - fine)) <= tol or depth > 30:
        if depth > 30:
            raise _Retry()
        return fine[0]
    mid = (za + zb) / 2
    return (_edge_adaptive(expr, ctx, za, mid, origin, tol, depth + 1)
            + _edge_adaptive(expr, ctx, mid, zb, origin, tol, depth + 1))


def _edges(expr, ctx, za, zb, origin, tol):
    coarse, fine = _edge_batch(expr, ctx, za, zb, origin)
    bad = np.max(np.abs(coarse - fine), axis=1) > tol
    for i in np.nonzero(bad)[0]:
        fine[i] = _edge_adaptive(expr, ctx, za[i], zb[i], origin, tol)
    return fine


# ==========
# divisor_of
# ==========

def divisor_of(expr, ctx, tol=1e-9, seed=0, attempts=5, max_depth=40) -> Divisor:
    """Zeros and poles of an elliptic function in F = {s + t tau : 0 <= s, t < 1}.

    Argument-principle counting on an 8 x 8 grid with jittered lines (the
    moments of z^k f'/f for k = 0, 1, 2 decide whether a cell holds exactly one
    point), recursive subdivision up to ``max_depth``, Newton polishing.  A
    point on a grid line shows up as a non-integer count and triggers a retry
    with fresh jitter.  Keys of the returned divisor are representatives in F."""
    expr = _as_expr(expr)
    ctx = _ctx_for(ctx)
    if is_constant(expr):
        if evaluate(expr, ctx, 0.5) == 0:
            raise DomainError("expression is identically zero")
        return Divisor()
    check_well_formed(expr, ctx)
    last = None
    for attempt in range(attempts):
        rng = np.random.default_rng(seed + 7919 * attempt)
        try:
            pts = _scan(expr, ctx, rng, tol, max_depth)
        except _Retry as exc:
            last = exc
            continue
        lat = ctx.lattice
        w = {}
        for z, n in pts:
            key = _canonical(lat, z)
            for k in list(w):
                if lat.distance(k - key) < 1e-7:
                    key = k
                    break
            w[key] = w.get(key, 0) + n
        if sum(w.values()) != 0:
            raise DomainError("expression is not elliptic: its divisor has nonzero degree")
        return Divisor(dict(sorted(w.items(), key=lambda kv: (kv[0].real, kv[0].imag))))
    raise AccuracyError("argument-principle scan kept hitting singularities on cell edges") from last


def _canonical(lat, z, eps=1e-12):
    # representative in F with coordinates snapped away from 1 and from -0
    s, t = lat.coords(complex(z))
    s, t = s - np.floor(s), t - np.floor(t)
    s = 0.0 if s < eps or s > 1 - eps else s
    t = 0.0 if t < eps or t > 1 - eps else t
    w = s + t * lat.tau
    return complex(w.real if abs(w.real) > 1e-15 else 0.0, w.imag if abs(w.imag) > 1e-15 else 0.0)


def _scan(expr, ctx, rng, tol, max_depth):
    tau = ctx.tau
    n = 8
    base = 0.013 * (rng.random() + rng.random() * tau) - 0.0065 * (1 + tau)
    jit = lambda: np.concatenate([[0.0], np.arange(1, n) / n + rng.uniform(-0.012, 0.012, n - 1), [1.0]])
    sl, tl = jit(), jit()
    zf = lambda s, t: base + s + t * tau
    origin = zf(0.5, 0.5)
    etol = 1e-12
    # horizontal edges h[i, j]: (s_i, t_j) -> (s_{i+1}, t_j); vertical v[i, j]: (s_i, t_j) -> (s_i, t_{j+1})
    ha, hb, va, vb = [], [], [], []
    for j in range(n + 1):
        for i in range(n):
            ha.append(zf(sl[i], tl[j]))
            hb.append(zf(sl[i + 1], tl[j]))
    for j in range(n):
        for i in range(n + 1):
            va.append(zf(sl[i], tl[j]))
            vb.append(zf(sl[i], tl[j + 1]))
    hm = _edges(expr, ctx, np.array(ha), np.array(hb), origin, etol).reshape(n + 1, n, 3)
    vm = _edges(expr, ctx, np.array(va), np.array(vb), origin, etol).reshape(n, n + 1, 3)
    found = []
    for j in range(n):
        for i in range(n):
            mom = hm[j, i] + vm[j, i + 1] - hm[j + 1, i] - vm[j, i]
            found += _cell(expr, ctx, (sl[i], sl[i + 1], tl[j], tl[j + 1]), mom / TWO_PI_I,
                           zf, origin, etol, 0, max_depth)
    return found


def _cell(expr, ctx, box, mom, zf, origin, etol, depth, max_depth):
    s0, s1, t0, t1 = box
    count = mom[0].real
    if abs(mom[0] - round(count)) > 1e-5:
        raise _Retry()
    nz = int(round(count))
    c = zf((s0 + s1) / 2, (t0 + t1) / 2) - origin
    m1 = mom[1] - c * mom[0]
    m2 = mom[2] - 2 * c * mom[1] + c * c * mom[0]
    h = abs(zf(s1, t1) - zf(s0, t0)) + abs(zf(s1, t0) - zf(s0, t1))
    if nz == 0 and abs(m1) < 1e-7 * h and abs(m2) < 1e-7 * h * h:
        return []
    if nz != 0 and abs(nz * m2 - m1 * m1) < 1e-7 * h * h:
        w = origin + c + m1 / nz
        w = _polish(expr, ctx, w, nz, h)
        return [(w, nz)]
    if depth >= max_depth:
        raise AccuracyError("subdivision depth exceeded")
    sm, tm = (s0 + s1) / 2, (t0 + t1) / 2
    # subdivide: new edges are the two mid-lines (split in halves) and the
    # halves of the outer edges computed afresh for simplicity
    boxes = [(s0, sm, t0, tm), (sm, s1, t0, tm), (s0, sm, tm, t1), (sm, s1, tm, t1)]
    out = []
    for b in boxes:
        a0, a1, b0, b1 = b
        za = np.array([zf(a0, b0), zf(a1, b0), zf(a0, b1), zf(a0, b0)])
        zb = np.array([zf(a1, b0), zf(a1, b1), zf(a1, b1), zf(a0, b1)])
        e = _edges(expr, ctx, za, zb, origin, etol)
        sub = (e[0] + e[1] - e[2] - e[3]) / TWO_PI_I
        out += _cell(expr, ctx, b, sub, zf, origin, etol, depth + 1, max_depth)
    return out


def _polish(expr, ctx, w, n, h):
    z = w
    for _ in range(8):
        try:
            v, dv = evaluate_dual(expr, ctx, z)
        except PoleError:
            return z
        v, dv = complex(v), complex(dv)
        if dv == 0 or not np.isfinite(v) or not np.isfinite(dv):
            return z
        step = n * v / dv
        if abs(step) > 0.25 * h:
            return w
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def divisor_matches(d: Divisor, zeros, poles, lattice, tol=1e-7):
    """True iff d has exactly the given zeros/poles (lists with repetition)."""
    want = {}
    for sign, pts in ((1, zeros), (-1, poles)):
        for p in pts:
            z = p.rep if isinstance(p, TorusPoint) else complex(p)
            key = None
            for k in want:
                if lattice.distance(k - z) < tol:
                    key = k
            key = z if key is None else key
            want[key] = want.get(key, 0) + sign
    want = {k: v for k, v in want.items() if v}
    if len(want) != len(d):
        return False
    used = set()
    for k, v in want.items():
        hit = [q for q, m in d if lattice.distance(q - k) < tol and m == v and q not in used]
        if not hit:
            return False
        used.add(hit[0])
    return True


# ================
# local expansions
# ================

@functools.lru_cache(maxsize=64)
def _poles_cached(expr, ctx):
    return [q for q, m in divisor_of(expr, ctx) if m < 0]


def _nearest_singularity(expr, ctx, z0, exclude_center=True):
    lat = ctx.lattice
    ds = []
    for q in _poles_cached(expr, ctx):
        d = lat.distance(q - z0)
        if exclude_center and d < 1e-9:
            # the other translates of the same pole
            ds.append(min(1.0, abs(ctx.tau), lat.distance(ctx.tau) or 1.0))
            continue
        ds.append(d)
    return min(ds) if ds else None


def local_expansion(expr, ctx, z0, order, radius=None, npts=None):
    """Laurent coefficients ``c_{-order} .. c_{order}`` at z0 (index -order
    first) from Cauchy integrals on a circle.  ``radius`` defaults to half the
    distance to the nearest other pole."""
    expr = _as_expr(expr)
    ctx = _ctx_for(ctx)
    z0 = z0.rep if isinstance(z0, TorusPoint) else complex(z0)
    order = int(order)
    if is_constant(expr):
        near = None
    else:
        near = _nearest_singularity(expr, ctx, z0)
    if radius is None:
        radius = 0.25 if near is None else 0.5 * near
    elif near is not None and radius >= near * (1 - 1e-9):
        raise RadiusError(f"circle of radius {radius} reaches another singularity at distance {near}")
    n = npts or max(256, 8 * order + 8)
    th = 2 * np.pi * np.arange(n) / n
    w = np.exp(1j * th)
    f = np.asarray(evaluate(expr, ctx, z0 + radius * w))
    ks = np.arange(-order, order + 1)
    coef = np.array([np.mean(f * w ** (-k)) / radius ** k for k in ks])
    return coef


def taylor_check(expr, ctx, z0, upto, radius=None):
    """(|a_k| r^k for k = 1..upto, max |f| on the circle, r)."""
    expr = _as_expr(expr)
    near = _nearest_singularity(expr, ctx, z0) if not is_constant(expr) else None
    r = radius or (0.25 if near is None else 0.5 * near)
    n = max(256, 8 * upto + 8)
    w = np.exp(2j * np.pi * np.arange(n) / n)
    f = np.asarray(evaluate(expr, ctx, z0 + r * w))
    vals = [abs(np.mean(f * w ** (-k))) for k in range(1, upto + 1)]
    return vals, float(np.max(np.abs(f))), r


# ===================
# function_with_divisor
# ===================

def function_with_divisor(ctx, zeros, poles, tol=1e-9) -> MeroExpr:
    """``prod sigma(z - a_i) / prod sigma(z - b_j)``; the last pole's
    representative is moved by a lattice vector so the sums agree."""
    ctx = _ctx_for(ctx)
    lat = ctx.lattice
    zs = [p.rep if isinstance(p, TorusPoint) else complex(p) for p in zeros]
    ps = [p.rep if isinstance(p, TorusPoint) else complex(p) for p in poles]
    if len(zs) != len(ps):
        raise DomainError("zeros and poles must have equal counts")
    if not zs:
        return MeroExpr(Const(1), "1")
    diff = sum(zs) - sum(ps)
    if lat.distance(diff) > tol:
        raise DomainError("Abel condition fails: sum of zeros minus sum of poles is not a period")
    # zeros equal to poles on the torus: the constant 1
    left = list(ps)
    for z in zs:
        hit = [k for k, q in enumerate(left) if lat.distance(q - z) < tol]
        if not hit:
            break
        left.pop(hit[0])
    else:
        return MeroExpr(Const(1), "1")
    ps[-1] = sum(zs) - sum(ps[:-1])
    num = _product([Leaf("sigma", z) for z in zs])
    den = _product([Leaf("sigma", p) for p in ps])
    expr = MeroExpr(Binary("/", num, den))
    _check_elliptic(expr, ctx)
    return expr


def _product(nodes):
    out = nodes[0]
    for nd in nodes[1:]:
        out = Binary("*", out, nd)
    return out


def _check_elliptic(expr, ctx, z=0.3711 + 0.2293j):
    z = z * (1 + ctx.tau) / 1.5
    f0 = evaluate(expr, ctx, z)
    for w in (1, ctx.tau):
        f1 = evaluate(expr, ctx, z + w)
        if abs(f1 - f0) > 1e-8 * max(1.0, abs(f0)):
            raise AccuracyError("constructed function is not periodic to 1e-8")


def periodicity_residual(expr, ctx, samples=5, seed=0):
    rng = np.random.default_rng(seed)
    out = 0.0
    for _ in range(samples):
        z = rng.random() + rng.random() * ctx.tau
        f0 = evaluate(expr, ctx, z)
        for w in (1, ctx.tau):
            out = max(out, abs(evaluate(expr, ctx, z + w) - f0) / max(1.0, abs(f0)))
    return out


# ==================
# f = c(S-bar) mod m
# ==================

def check_mod_m(expr, spec: SingularCurveSpec, tol=1e-9, ctx=None) -> Optional[Multiconstant]:
    """The multiconstant c with f = c mod m, or None.

    Per class: the values at its points must agree (relative tol) and be
    nonzero; at a point with m(P) >= 2 the Taylor coefficients 1..m(P)-1 must
    vanish, measured as ``|a_k| r^k <= tol * max|f|`` on the Cauchy circle."""
    expr = _as_expr(expr)
    ctx = ctx or _ctx_for(spec)
    vals = {}
    for pid in spec.points:
        try:
            v = evaluate(expr, ctx, spec.positions[pid])
        except PoleError:
            raise DomainError(f"f has a pole at the point {pid} of S") from None
        if not np.isfinite(v) or abs(v) < 1e-300:
            raise DomainError(f"f has a zero or pole at the point {pid} of S")
        vals[pid] = v
    out = {}
    for cls in spec.classes:
        c = vals[cls[0]]
        for pid in cls:
            if abs(vals[pid] - c) > tol * max(1.0, abs(c)):
                return None
        for pid in cls:
            m = spec.modulus[pid]
            if m >= 2:
                coeffs, scale, r = taylor_check(expr, ctx, spec.positions[pid], m - 1)
                if any(a * 1.0 > tol * max(1.0, scale) for a in coeffs):
                    return None
        out[cls] = c
    return Multiconstant(out)


# ==========
# period map
# ==========

def _route(ctx, start, end, obstacles, margin, corner):
    """Polyline from start to end inside corner + F keeping ``margin`` away
    from the obstacles; waypoints are tried on both sides of each blocker."""
    lat = ctx.lattice

    def inside(z):
        s, t = lat.coords(z - corner)
        return 0 < s < 1 and 0 < t < 1

    def clear(a, b):
        seg = b - a
        for q in obstacles:
            if abs(seg) == 0:
                if abs(a - q) < margin:
                    return False
                continue
            t = min(1.0, max(0.0, ((q - a) * seg.conjugate()).real / abs(seg) ** 2))
            if abs(a + t * seg - q) < margin:
                return False
        return True

    if clear(start, end):
        return [start, end]
    seg = end - start
    normal = 1j * seg / abs(seg)
    for q in sorted(obstacles, key=lambda q: abs(q - start)):
        t = ((q - start) * seg.conjugate()).real / abs(seg) ** 2
        foot = start + t * seg
        for k in (2, -2, 3, -3, 4, -4, 6, -6):
            wp = foot + k * margin * normal
            if inside(wp) and clear(start, wp) and clear(wp, end):
                return [start, wp, end]
            for wq in (wp + 3 * margin * seg / abs(seg), wp - 3 * margin * seg / abs(seg)):
                if inside(wq) and clear(start, wq) and clear(wq, end):
                    return [start, wq, end]
    raise PathError("could not route the integration path around S")


@dataclass
class PeriodMapper:
    """Caches the differentials of a spec so many points can be mapped."""

    spec: SingularCurveSpec
    ctx: ell.WeierstrassContext = None
    forms: list = None
    tol: float = 1e-11

    def __post_init__(self):
        if self.spec.base_genus != 1:
            raise DomainError("the period map is implemented for an elliptic base")
        if self.ctx is None:
            self.ctx = _ctx_for(self.spec)
        if self.forms is None:
            self.ctx, self.forms = numeric_forms(self.spec, self.ctx)
        self.corner = self.spec.corner()
        self.p0 = self.spec.p0()
        self.obstacles = [self.spec.representative(p) for p in self.spec.points]
        lat = self.ctx.lattice
        ds = [lat.distance(a - b) for a, b in itertools.combinations(self.obstacles, 2)]
        self.margin = 0.05 * min(ds + [min(1.0, abs(lat.tau))])

    @property
    def gamma(self):
        """Numeric period lattice (compact columns), computed once."""
        if getattr(self, "_gamma", None) is None:
            self._gamma = build_period_matrix_numeric(self.spec).compact().entries
        return self._gamma

    def __call__(self, P, route_margin=None):
        lat = self.ctx.lattice
        z = P.rep if isinstance(P, TorusPoint) else complex(P)
        z = lat.reduce_mod(z, self.corner)
        for q in self.obstacles:
            if lat.distance(z - q) < 1e-9:
                raise DomainError("the period map is not defined at points of S")
        margin = route_margin or min(self.margin, 0.5 * min(abs(z - q) for q in self.obstacles))
        path = _route(self.ctx, self.p0, z, self.obstacles, margin, self.corner)
        out = [z - self.p0]
        for f in self.forms[1:]:
            out.append(ell.period_integral(self.ctx, f, ell.Polyline(path), tol=self.tol))
        return np.array(out, dtype=complex)

    def via(self, P, waypoint):
        """Same map along start -> waypoint -> P (for path-dependence tests)."""
        lat = self.ctx.lattice
        z = lat.reduce_mod(complex(P), self.corner)
        path = [self.p0, complex(waypoint), z]
        out = [z - self.p0]
        for f in self.forms[1:]:
            out.append(ell.period_integral(self.ctx, f, ell.Polyline(path), tol=self.tol))
        return np.array(out, dtype=complex)


def period_map(spec: SingularCurveSpec, P, mapper: PeriodMapper = None):
    """phi(P) = (int_{P0}^P of each basis form) along a path in the cut domain."""
    mapper = mapper or PeriodMapper(spec)
    return mapper(P)


def nearest_lattice_point(v, gamma, bound=20):
    """Integer c (|c_j| <= bound) minimising |v - gamma c|; returns (c, residual vector)."""
    g = np.asarray(gamma, dtype=complex)
    v = np.asarray(v, dtype=complex)
    r = np.vstack([g.real, g.imag])
    y = np.concatenate([v.real, v.imag])
    c0 = np.linalg.lstsq(r, y, rcond=None)[0]
    base = np.rint(c0)
    best = None
    n = g.shape[1]
    for delta in itertools.product((-1, 0, 1), repeat=n):
        c = base + np.array(delta)
        if np.any(np.abs(c) > bound):
            continue
        res = y - r @ c
        nr = np.linalg.norm(res)
        if best is None or nr < best[0] - 1e-15:
            best = (nr, c)
    if best is None:
        return None, v
    c = best[1].astype(np.int64)
    return c, v - g @ c


@dataclass
class AbelReport:
    divisor: Divisor
    multiconstant: Optional[Multiconstant]
    period_map_value: np.ndarray
    passes: bool
    residual: float = 0.0
    lattice_coefficients: Optional[np.ndarray] = None
    reduced: Optional[np.ndarray] = None
    residue_components: list = field(default_factory=list)

    def to_dict(self):
        cpx = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {
            "divisor": [{"point": cpx(k), "order": v} for k, v in self.divisor],
            "multiconstant": None if self.multiconstant is None else
            [{"class": list(k), "value": cpx(v)} for k, v in self.multiconstant.values.items()],
            "period_map_value": [cpx(z) for z in self.period_map_value],
            "reduced": None if self.reduced is None else [cpx(z) for z in self.reduced],
            "lattice_coefficients": None if self.lattice_coefficients is None
            else [int(c) for c in self.lattice_coefficients],
            "residual": self.residual, "passes": self.passes,
        }


def abel_verify(spec: SingularCurveSpec, expr, tol=1e-7, force=False, mapper=None,
                bound=20) -> AbelReport:
    """Forward check: for f = c mod m, sum_P ord_P(f) phi(P) must lie in Gamma.

    Gamma is the numerically integrated period matrix (the same differentials
    the period map uses).  ``force`` skips the f = c mod m precondition, so the
    non-vanishing for other functions can be inspected."""
    expr = _as_expr(expr)
    mapper = mapper or PeriodMapper(spec)
    ctx = mapper.ctx
    mc = check_mod_m(expr, spec, ctx=ctx)
    if mc is None and not force:
        raise DomainError("f is not congruent to a multiconstant mod m; use force to override")
    d = divisor_of(expr, ctx)
    gd = genus(spec)
    value = np.zeros(gd.pi, dtype=complex)
    for z, n in d:
        value = value + n * mapper(z)
    c, red = nearest_lattice_point(value, mapper.gamma, bound)
    resid = float(np.linalg.norm(red)) if c is not None else float("inf")
    comps = [abs(x) for x in red[gd.g:gd.g + gd.k]]
    return AbelReport(d, mc, value, resid < tol, resid, c, red, comps)


# ==================
# symmetric functions
# ==================

def symmetric_values(spec: SingularCurveSpec, x, y, points, ctx=None):
    """(xi_1..xi_pi, eta_1..eta_pi) with prod (X - x(P_i)) = X^pi + xi_1 X^(pi-1) + ..."""
    x, y = _as_expr(x), _as_expr(y)
    ctx = ctx or _ctx_for(spec)
    pi = genus(spec).pi
    if len(points) != pi:
        raise DomainError(f"need exactly pi = {pi} points")
    lat = ctx.lattice
    zs = [p.rep if isinstance(p, TorusPoint) else complex(p) for p in points]
    for z in zs:
        for pid in spec.points:
            if lat.distance(z - spec.positions[pid]) < 1e-9:
                raise DomainError("sample points must avoid S")
    xv = [evaluate(x, ctx, z) for z in zs]
    yv = [evaluate(y, ctx, z) for z in zs]
    xi = tuple(complex(c) for c in np.poly(xv)[1:])
    eta = tuple(complex(c) for c in np.poly(yv)[1:])
    return xi, eta
