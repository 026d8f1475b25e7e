"""Period matrices of Alb(X_m) and classification of the quotient group.

Column layout used everywhere: ``alpha_1..alpha_g, beta_1..beta_g,
gamma_1..gamma_{s-1}`` where ``gamma_j`` is a small anticlockwise circle
around the j-th point of S (the last point is left out, the circles sum to
zero in homology).  Rows are: the g holomorphic forms, one third-kind form per
residue pair, then one second-kind form per excess multiplicity.

For the node this gives ``[[1, tau, 0], [0, a, 1]]``; the column order
``(gamma_1, alpha_1, beta_1)`` turns it into ``[[0, 1, tau], [1, 0, a]]``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import elliptic as ell
from .curve import (SingularCurveSpec, genus, residue_pairing, second_kind_poles,
                    validate)
from .errors import CapabilityError, ClassificationError, DomainError
from .lattice import column_hnf, integer_kernel, reduce_fundamental_domain, row_basis

DEFAULT_TOL = 1e-9
DENOM_BOUND = 10 ** 6


# ============
# PeriodMatrix
# ============

@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    entries: np.ndarray
    labels: tuple = ()
    provenance: str = "input"

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim == 1:
            e = e.reshape(1, -1)
        if e.ndim != 2:
            raise DomainError("period matrix must be two-dimensional")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        labels = tuple(self.labels) or tuple(f"c{j + 1}" for j in range(e.shape[1]))
        if len(labels) != e.shape[1]:
            raise DomainError("one label per column is required")
        object.__setattr__(self, "labels", labels)

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    def reorder(self, labels):
        idx = [self.labels.index(x) for x in labels]
        return PeriodMatrix(self.entries[:, idx], [self.labels[i] for i in idx], self.provenance)

    def compact(self):
        """Drop gamma columns that are integer combinations of the others,
        leaving a Z-basis of the gamma part (2g + k columns for closed-form data)."""
        gam = [j for j, l in enumerate(self.labels) if l.startswith("gamma")]
        if not gam:
            return self
        other = [j for j in range(self.cols) if j not in gam]
        sub = self.entries[:, gam]
        ints = np.rint(sub.real).astype(np.int64)
        if not (np.allclose(sub, ints, atol=1e-6)):
            return self
        keep, cur = [], np.zeros((self.rows, 0))
        for j, col in zip(gam, ints.T):
            trial = np.column_stack([cur, col])
            if np.linalg.matrix_rank(trial) > cur.shape[1]:
                keep.append(j)
                cur = trial
        # greedy pick must generate the full gamma lattice (unit index)
        h_all = row_basis(ints.T.tolist())
        h_keep = row_basis(cur.T.astype(np.int64).tolist())
        def index(b):
            b = np.array(b, float)
            return round(np.sqrt(abs(np.linalg.det(b @ b.T)))) if len(b) else 1
        if index(h_all) != index(h_keep):
            return self
        idx = other + keep
        return PeriodMatrix(self.entries[:, idx], [self.labels[i] for i in idx], self.provenance)

    def to_dict(self):
        return {
            "rows": self.rows, "cols": self.cols,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
            "labels": list(self.labels), "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            ent = np.array([[complex(x[0], x[1]) for x in row] for row in doc["entries"]])
            labels = doc.get("labels") or ()
            pm = cls(ent, labels, doc.get("provenance", "input"))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise DomainError(f"malformed period matrix document: {exc}") from None
        if "rows" in doc and doc["rows"] != pm.rows or "cols" in doc and doc["cols"] != pm.cols:
            raise DomainError("rows/cols do not match the entries")
        return pm

    def to_json(self):
        return json.dumps(self.to_dict())


def column_labels(g, s):
    return ([f"alpha{i + 1}" for i in range(g)] + [f"beta{i + 1}" for i in range(g)]
            + [f"gamma{j + 1}" for j in range(s - 1)])


def nodal_matrix(tau, a):
    """``[[0, 1, tau], [1, 0, a]]`` (columns gamma1, alpha1, beta1)."""
    return PeriodMatrix([[0, 1, tau], [1, 0, a]], ["gamma1", "alpha1", "beta1"])


# =============================
# closed form and numeric build
# =============================

def _h_values(spec):
    """``h(P)`` for every point: supplied values or cut-domain representatives."""
    if spec.supplied_h is not None:
        return {p: np.array(spec.supplied_h[p]) for p in spec.points}
    if spec.base_genus == 1:
        base = spec.p0()
        return {p: np.array([spec.representative(p) - base]) for p in spec.points}
    if spec.base_genus == 0:
        return {p: np.zeros(0) for p in spec.points}
    raise CapabilityError(
        f"genus {spec.base_genus} base needs supplied_h (Abel-map values at S)")


def build_period_matrix(spec: SingularCurveSpec) -> PeriodMatrix:
    validate(spec)
    g = spec.base_genus
    gd = genus(spec)
    pairs = residue_pairing(spec)
    h = _h_values(spec)
    s = spec.s
    ncol = 2 * g + s - 1
    out = np.zeros((gd.pi, ncol), dtype=complex)
    out[:g, :g] = np.eye(g)
    out[:g, g:2 * g] = spec.tau_matrix()
    col = {p: 2 * g + j for j, p in enumerate(spec.points[:-1])}
    for i, (a, b) in enumerate(pairs):
        r = g + i
        out[r, g:2 * g] = h[a] - h[b]
        if a in col:
            out[r, col[a]] += 1
        if b in col:
            out[r, col[b]] -= 1
    return PeriodMatrix(out, column_labels(g, s), "closed")


def circle_radius(spec):
    lat = spec.lattice
    pos = [spec.positions[p] for p in spec.points]
    ds = [lat.distance(a - b) for a, b in itertools.combinations(pos, 2)]
    tr, _ = reduce_fundamental_domain(lat.tau)
    shortest = min(1.0, abs(lat.tau), lat.distance(lat.tau) or 1.0)
    return 0.3 * min(ds + [shortest])


def numeric_forms(spec, ctx=None):
    """The differentials behind each row: dz, third kind per pair, second kind
    per (point, order)."""
    ctx = ctx or ell.make_context(spec.lattice)
    b = spec.corner()
    forms = [ell.holomorphic_differential(ctx)]
    for p, q in residue_pairing(spec):
        forms.append(ell.third_kind_differential(ctx, spec.representative(p),
                                                 spec.representative(q), corner=b))
    for p, order in second_kind_poles(spec):
        forms.append(ell.second_kind_differential(ctx, spec.representative(p), order, corner=b))
    return ctx, forms


def build_period_matrix_numeric(spec: SingularCurveSpec, tol=1e-11) -> PeriodMatrix:
    """Integrate every form over every cycle (g = 1 only)."""
    validate(spec)
    if spec.base_genus != 1 or np.ndim(spec.tau) != 0:
        raise CapabilityError("the numeric pipeline needs an elliptic base curve")
    ctx, forms = numeric_forms(spec)
    b = spec.corner()
    radius = circle_radius(spec)
    cycles = [ell.Alpha(b), ell.Beta(b)]
    cycles += [ell.SmallCircle(spec.representative(p), radius) for p in spec.points[:-1]]
    out = np.array([[ell.period_integral(ctx, f, c, tol=tol) for c in cycles] for f in forms])
    return PeriodMatrix(out, column_labels(1, spec.s), "numeric")


def verify(spec: SingularCurveSpec, tol=1e-8):
    """Run both builders and compare.  Rows of second-kind forms are reported
    separately: the closed form puts 0 in their beta entry, the numeric value
    and the Legendre-relation oracle ``eta1 tau - eta2`` (order 2) do not."""
    closed = build_period_matrix(spec)
    numeric = build_period_matrix_numeric(spec)
    gd = genus(spec)
    diff = np.abs(closed.entries - numeric.entries)
    nres = gd.g + gd.k
    report = {
        "closed": closed, "numeric": numeric,
        "max_deviation": float(diff.max()) if diff.size else 0.0,
        "max_deviation_residue_rows": float(diff[:nres].max()) if nres else 0.0,
        "agree": bool(diff.max() < tol) if diff.size else True,
        "second_kind": [],
    }
    ctx = ell.make_context(spec.lattice)
    for i, (p, order) in enumerate(second_kind_poles(spec)):
        r = nres + i
        beta = complex(numeric.entries[r, 1])
        oracle = ctx.eta1 * ctx.tau - ctx.eta2 if order == 2 else 0j
        report["second_kind"].append({
            "point": p, "order": order, "beta_numeric": beta, "beta_oracle": oracle,
            "oracle_agrees": abs(beta - oracle) < tol,
            "closed_form_value": 0j, "closed_form_agrees": abs(beta) < tol,
        })
    report["residue_rows_agree"] = report["max_deviation_residue_rows"] < tol
    return report


# ============
# discreteness
# ============

def _real_stack(p):
    p = np.asarray(p, dtype=complex)
    return np.vstack([p.real, p.imag])


def discreteness_check(P, bound=50, tol=DEFAULT_TOL, max_candidates=5 * 10 ** 7):
    """Bounded certificate: True iff no nonzero integer vector c with
    ``|c_j| <= bound`` gives ``|P c| < tol``.

    If the columns are R-independent with smallest singular value >= tol the
    answer is True for every bound (``|P c| >= s_min |c| >= s_min``) and no
    search is needed; otherwise the coefficient box is scanned."""
    m = P.entries if isinstance(P, PeriodMatrix) else np.asarray(P, dtype=complex)
    r = _real_stack(m)
    n = r.shape[1]
    if n == 0:
        return True
    if r.shape[0] >= n:
        smin = np.linalg.svd(r, compute_uv=False)[-1]
        if smin >= tol:
            return True
    return _box_scan(r, bound, tol, max_candidates) is None


def _box_scan(r, bound, tol, max_candidates=5 * 10 ** 7):
    """First nonzero c in the box with ``|r c| < tol`` (exhaustive), or None."""
    n = r.shape[1]
    side = 2 * bound + 1
    if side ** n > max_candidates:
        raise CapabilityError(f"box of {side}^{n} candidates is too large for exhaustive search")
    vals = np.arange(-bound, bound + 1)
    tail = min(n, 4)
    tail_grid = np.array(list(itertools.product(vals, repeat=tail)), dtype=float)
    head_r, tail_r = r[:, :n - tail], r[:, n - tail:]
    tail_img = tail_grid @ tail_r.T
    for head in itertools.product(vals, repeat=n - tail):
        base = head_r @ np.array(head, dtype=float) if n - tail else 0.0
        norms = np.linalg.norm(tail_img + base, axis=1)
        hits = np.nonzero(norms < tol)[0]
        for h in hits:
            c = np.concatenate([np.array(head, dtype=float), tail_grid[h]])
            if np.any(c):
                return c.astype(np.int64)
    return None


# ===========
# rationality
# ===========

def effective_denominator_bound(denom_bound, tol):
    """Every real number is within ``1/q^2`` of some p/q, so a denominator bound
    D is only meaningful while ``D^2 tol`` is small; D is capped at
    ``0.1 / sqrt(tol)``."""
    return max(1, min(int(denom_bound), int(0.1 / np.sqrt(tol))))


def as_rational(x, denom_bound=DENOM_BOUND, tol=DEFAULT_TOL):
    """Fraction with denominator <= bound within tol of real x, or None.
    The bound is capped by :func:`effective_denominator_bound`."""
    if isinstance(x, Fraction):
        return x if x.denominator <= denom_bound else None
    x = float(x)
    f = Fraction(x).limit_denominator(effective_denominator_bound(denom_bound, tol))
    return f if abs(float(f) - x) <= tol * max(1.0, abs(x)) else None


def _rational_matrix(a, denom_bound, tol):
    out = []
    for row in np.atleast_2d(a):
        fr = [as_rational(x, denom_bound, tol) for x in row]
        if any(f is None for f in fr):
            return None
        out.append(fr)
    return out


def _integerize_rows(rows):
    """Scale each rational row to a primitive integer row."""
    out = []
    for row in rows:
        den = 1
        for f in row:
            den = den * f.denominator // np.gcd(den, f.denominator)
        ints = [int(f * den) for f in row]
        g = 0
        for v in ints:
            g = np.gcd(g, abs(v))
        out.append([v // g for v in ints] if g else ints)
    return out


def _null_space(a, tol):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    ncols = a.shape[1]
    if a.size == 0:
        return np.eye(ncols)
    u, sv, vt = np.linalg.svd(a)
    scale = sv[0] if sv.size and sv[0] > 1 else 1.0
    rank = int(np.sum(sv > tol * scale))
    return vt[rank:].T


def _rref(a, tol=1e-12):
    a = np.array(a, dtype=float)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[piv, c]) < tol:
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] /= a[r, c]
        for i in range(rows):
            if i != r:
                a[i] -= a[i, c] * a[r]
        r += 1
    return a[:r]


def rational_subspace_basis(null_basis, denom_bound=1000, tol=1e-9):
    """Integer row basis of a real subspace given by orthonormal columns, or
    None when the subspace is not rational at this denominator bound."""
    if null_basis.shape[1] == 0:
        return []
    red = _rref(null_basis.T)
    rat = _rational_matrix(red, denom_bound, tol)
    if rat is None:
        return None
    ints = _integerize_rows(rat)
    # saturate: all integer points of the rational span
    kern = integer_kernel(ints) if ints and len(ints) < len(ints[0]) else []
    if not kern:
        return row_basis(ints) if ints else []
    return integer_kernel(kern)


def integer_forms(T, bound=6, denom_bound=DENOM_BOUND, tol=DEFAULT_TOL):
    """Z-basis (rows) of ``{sigma in Z^r : sigma T in Z^c}`` for complex T.

    Exact route: sigma lies in the left kernel of Im T; when that kernel is a
    rational subspace with integer basis W, sigma = y W and y (W Re T) must be
    integral, solved exactly when W Re T is rational.  Parts that are not
    rational fall back to a bounded search (|entries| <= bound), which is a
    certificate only."""
    t = np.atleast_2d(np.asarray(T, dtype=complex))
    r, c = t.shape
    if c == 0:
        return [list(row) for row in np.eye(r, dtype=int)]
    v0 = _null_space(t.imag.T, tol)              # columns span {sigma: sigma Im T = 0}
    if v0.shape[1] == 0:
        return []
    w = rational_subspace_basis(v0, 1000, 1e-9)
    if w is None:
        return _bounded_forms(t, np.eye(r, dtype=np.int64), bound, tol)
    if not w:
        return []
    w = np.array(w, dtype=np.int64)
    x = w @ t.real                                # y X must be integral
    rat = _rational_matrix(x, denom_bound, tol)
    if rat is None:
        return _bounded_forms(t, w, bound, tol)
    # y N = D t over the integers, N/D = X with a common denominator D
    den = 1
    for row in rat:
        for f in row:
            den = den * f.denominator // np.gcd(den, f.denominator)
    nmat = [[int(f * den) for f in row] for row in rat]   # w x c
    nw = len(nmat)
    system = [[nmat[i][j] for i in range(nw)] + [-den if k == j else 0 for k in range(c)]
              for j in range(c)]
    kern = integer_kernel(system)
    ys = row_basis([v[:nw] for v in kern]) if kern else []
    if not ys:
        return []
    sig = np.array(ys, dtype=object) .dot(np.array(w, dtype=object))
    return row_basis(sig.tolist())


def _bounded_forms(t, w, bound, tol):
    """Bounded search over y in Z^w with (y W) T integral."""
    wdim = w.shape[0]
    vals = np.arange(-bound, bound + 1)
    grid = np.array(list(itertools.product(vals, repeat=wdim)), dtype=np.int64)
    grid = grid[np.any(grid != 0, axis=1)]
    sig = grid @ w
    img = sig @ t
    ok = np.all((np.abs(img.imag) < tol) & (np.abs(img.real - np.rint(img.real)) < tol), axis=1)
    found = sig[ok]
    if not len(found):
        return []
    return row_basis(found.tolist())


# ==========
# toroidality
# ==========

def _nodal_parts(m):
    """(tau, a) if m is a node matrix in either documented column order."""
    if m.shape != (2, 3):
        return None
    e = m
    if np.allclose(e[:, 0], [0, 1]) and np.allclose(e[:, 1], [1, 0]):
        return e[0, 2], e[1, 2]
    if np.allclose(e[:, 0], [1, 0]) and np.allclose(e[:, 2], [0, 1]):
        return e[0, 1], e[1, 1]
    return None


def toroidal_test(P, denom_bound=DENOM_BOUND, tol=DEFAULT_TOL, bound=6):
    """True when no nonzero integral complex-linear form exists on the lattice
    (the group is toroidal), False otherwise.

    Node shape: split ``a = r + q tau`` over the reals; not toroidal iff r and
    q are rational with denominators <= denom_bound.  Other shapes go through
    :func:`integer_forms` (bounded fallback, a certificate)."""
    m = P.entries if isinstance(P, PeriodMatrix) else np.atleast_2d(np.asarray(P, complex))
    parts = _nodal_parts(m)
    if parts is not None:
        tau, a = complex(parts[0]), complex(parts[1])
        q = a.imag / tau.imag
        r = a.real - q * tau.real
        rr, qq = as_rational(r, denom_bound, tol), as_rational(q, denom_bound, tol)
        return not (rr is not None and qq is not None)
    pm = P if isinstance(P, PeriodMatrix) else PeriodMatrix(m)
    basis, _ = _z_basis(pm.entries, tol)
    red = _rows_compress(basis, tol)[0]
    piv, t = _identity_split(red, tol)
    return not integer_forms(t, bound, denom_bound, tol)


# ===============
# canonical form
# ===============

@dataclass(frozen=True, eq=False)
class CanonicalForm:
    p: int
    q: int
    toroidal_block: Optional[PeriodMatrix]
    kind0: bool
    compact: bool = False
    description: str = ""
    witness: Optional[dict] = field(default=None, repr=False)

    @property
    def block_dim(self):
        return 0 if self.toroidal_block is None else self.toroidal_block.rows

    def to_dict(self):
        return {
            "p": self.p, "q": self.q, "kind0": self.kind0, "compact": self.compact,
            "block_dim": self.block_dim, "description": self.description,
            "toroidal_block": None if self.toroidal_block is None else self.toroidal_block.to_dict(),
        }


def _rank_gap(sv, tol):
    """Numerical rank; raise when a singular value sits in the grey zone."""
    if sv.size == 0:
        return 0
    scale = max(1.0, sv[0])
    small = sv < tol * scale
    big = sv > 1e3 * tol * scale
    if np.any(~small & ~big):
        raise ClassificationError(
            "numeric rank is ambiguous at this tolerance; supply higher-precision entries")
    return int(np.sum(big))


def _rows_compress(m, tol):
    """Pick C-independent rows greedily; return (rows, M) with M m = [rows; ~0]."""
    n = m.shape[0]
    sv = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
    rank = _rank_gap(sv, tol)
    chosen = []
    for i in range(n):
        trial = chosen + [i]
        if np.linalg.matrix_rank(m[trial], tol=1e3 * tol * max(1.0, sv[0] if sv.size else 1)) == len(trial):
            chosen = trial
        if len(chosen) == rank:
            break
    others = [i for i in range(n) if i not in chosen]
    mm = np.zeros((n, n), dtype=complex)
    for k, i in enumerate(chosen):
        mm[k, i] = 1
    if others and chosen:
        # other rows = C * chosen rows
        coef = np.linalg.lstsq(m[chosen].T, m[others].T, rcond=None)[0].T
        for k, i in enumerate(others):
            mm[len(chosen) + k, i] = 1
            mm[len(chosen) + k, chosen] = -coef[k]
    elif others:
        for k, i in enumerate(others):
            mm[k, i] = 1
    return m[chosen], mm


def _z_basis(m, tol, denom_bound=1000):
    """Unimodular U with m U = [B | ~0]; B has R-independent columns.
    Raises ClassificationError when the columns are not discrete."""
    n = m.shape[1]
    r = _real_stack(m)
    nb = _null_space(r, tol)
    if nb.shape[1] == 0:
        return m, np.eye(n, dtype=np.int64)
    rel = rational_subspace_basis(nb, denom_bound, 1e-7)
    if rel is None or len(rel) != nb.shape[1]:
        raise ClassificationError("columns satisfy an irrational real relation: not discrete")
    rel = np.array(rel, dtype=np.int64)
    # check the relations really vanish at tol
    if np.max(np.abs(m @ rel.T)) > 1e3 * tol * max(1.0, np.abs(m).max()):
        raise ClassificationError("integer relations do not vanish to tolerance")
    comp = integer_kernel(rel.tolist()) if rel.shape[0] < n else []
    if comp:
        _, u, rank = column_hnf(comp)
    else:
        u, rank = np.eye(n, dtype=np.int64).tolist(), 0
    u = np.array(u, dtype=np.int64)
    return m @ u[:, :rank], u


def _independent_cols(m, tol, prefer=None):
    order = list(prefer) if prefer is not None else list(range(m.shape[1]))
    chosen = []
    for j in order:
        trial = chosen + [j]
        sv = np.linalg.svd(m[:, trial], compute_uv=False)
        if sv[-1] > 1e3 * tol * max(1.0, sv[0]):
            chosen = trial
        if len(chosen) == m.shape[0]:
            break
    return chosen


def _identity_split(m, tol):
    piv = _independent_cols(m, tol)
    rest = [j for j in range(m.shape[1]) if j not in piv]
    inv = np.linalg.inv(m[:, piv])
    return piv, inv @ m[:, rest]


def _fibre_forms(block, tol):
    """Complex forms real on every column: an (n-m) x n matrix."""
    n = block.shape[0]
    rows = np.hstack([block.imag.T, block.real.T])     # coefficient vector (Re c, Im c)
    ns = _null_space(rows, tol)
    return (ns[:n] + 1j * ns[n:]).T


def _is_normal(block, m, tol):
    n = block.shape[0]
    if block.shape[1] < n:
        return False
    want = np.zeros((n, n), dtype=complex)
    want[:m, n - m:] = np.eye(m)
    want[m:, :n - m] = np.eye(n - m)
    mask = np.zeros((n, n), dtype=bool)
    mask[:m, :] = True
    mask[m:, :n - m] = True
    return bool(np.all(np.abs(block[:, :n] - want)[mask] < tol))


def _normal_candidates(block, phi, psi_all, tol):
    n, cols = block.shape
    m = cols - n
    for c1 in itertools.combinations(range(cols), n - m):
        c1 = list(c1)
        vals = (phi @ block[:, c1]).real if n - m else np.zeros((0, 0))
        if n - m and abs(np.linalg.det(vals)) <= 1e-6:
            continue
        ph = np.linalg.inv(phi @ block[:, c1]) @ phi if n - m else phi
        psi = _null_space_complex(block[:, c1].T, tol) if c1 else psi_all
        rest = [j for j in range(cols) if j not in c1]
        for c2 in itertools.combinations(rest, m):
            c2 = list(c2)
            v = psi @ block[:, c2]
            if m and abs(np.linalg.det(v)) <= 1e-6:
                continue
            ps = np.linalg.inv(v) @ psi if m else psi
            c3 = [j for j in rest if j not in c2]
            left = np.vstack([ps, ph]) if n - m else ps
            yield left, c1 + c2 + c3


def _normal_form(block, tol):
    """Column order and left transform giving (0 I_m T; I_{n-m} R1 R2).

    A block already in that shape is kept as is.  Otherwise every choice of
    fibre and torus columns is scored by how many entries come out integral;
    the best one wins, ties going to the first in column order."""
    n, cols = block.shape
    m = cols - n
    phi = _fibre_forms(block, tol)
    if phi.shape[0] != n - m:
        raise ClassificationError("toroidal block has unexpected real rank")
    if _is_normal(block, m, 1e-12):
        return np.eye(n, dtype=complex), list(range(cols)), m
    best = None
    for left, perm in _normal_candidates(block, phi, np.eye(n, dtype=complex), tol):
        nf = left @ block[:, perm]
        score = int(np.sum(np.abs(nf - np.round(nf.real)) < 1e-9))
        if best is None or score > best[0]:
            best = (score, left, perm)
    if best is None:
        raise ClassificationError("no normal form found for the toroidal block")
    return best[1], best[2], m


def _null_space_complex(a, tol):
    a = np.atleast_2d(a)
    u, sv, vh = np.linalg.svd(a)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
    return vh[rank:].conj()


def canonical_form(P, tol=DEFAULT_TOL, base_tau=None, bound=6, denom_bound=DENOM_BOUND):
    """Remmert-Morimoto splitting C^p x (C*)^q x (toroidal block).

    Only left multiplication by invertible complex matrices and right
    multiplication by unimodular integer matrices are used; the full chain is
    returned as ``witness = {"M", "A", "normalized"}`` with
    ``normalized = M P A``."""
    pm = P if isinstance(P, PeriodMatrix) else PeriodMatrix(P)
    orig = pm.entries
    pi, ncols = orig.shape
    # a node matrix in (alpha, beta, gamma) order is moved to the customary
    # (gamma, alpha, beta) order first, so the block comes out as (0 1 tau; 1 0 a)
    pre = np.eye(ncols, dtype=np.int64)
    if _nodal_parts(orig) is not None and np.allclose(orig[:, 0], [1, 0]):
        pre = pre[:, [2, 0, 1]]
    m0 = orig @ pre
    # 1. complex rank -> p
    red, m_rows = _rows_compress(m0, tol)
    r = red.shape[0]
    p = pi - r
    # 2. Z-basis of the columns
    basis, u1 = _z_basis(red, tol)
    rho = basis.shape[1]
    if rho == 0 or r == 0:
        cf = CanonicalForm(p, 0, None, False, False, _describe(p, 0, None, False, False, base_tau),
                           {"M": m_rows, "A": pre @ u1, "normalized": m_rows @ m0 @ u1})
        return cf
    # 3. (I_r | T)
    piv, t = _identity_split(basis, tol)
    rest = [j for j in range(rho) if j not in piv]
    perm1 = np.eye(rho, dtype=np.int64)[:, piv + rest]
    left1 = np.linalg.inv(basis[:, piv])
    # 4. integral forms -> q
    forms = integer_forms(t, bound, denom_bound, tol)
    q = len(forms)
    cur = left1 @ basis @ perm1                     # (I_r | T)
    a2 = np.eye(rho, dtype=np.int64)
    left2 = np.eye(r, dtype=complex)
    if q:
        s = np.array(forms, dtype=float)
        k = np.rint((s.astype(complex) @ cur).real).astype(np.int64)
        h, u, rank = column_hnf(k.tolist())
        h = np.array(h, dtype=np.int64)
        u = np.array(u, dtype=np.int64)
        hq = h[:, :q]
        hinv = np.rint(np.linalg.inv(hq)).astype(np.int64)
        if not np.array_equal(hq @ hinv, np.eye(q, dtype=np.int64)):
            raise ClassificationError("integral forms do not form a saturated basis")
        u[:, :q] = u[:, :q] @ hinv
        a2 = u
        cur = cur @ a2
        # coordinates (l_1..l_q) plus a coordinate subset of ker l, using
        # the splitting C^r = span(v_1..v_q) + ker l
        ell_rows = s.astype(complex)
        coords = _kernel_coords(ell_rows, tol)
        v = cur[:, :q]
        proj = np.eye(r, dtype=complex) - v @ ell_rows      # projector onto ker l along span v
        left2 = np.vstack([ell_rows] + ([(np.eye(r)[coords] @ proj)] if coords else []))
        cur = left2 @ cur
    n_t = r - q
    block = cur[q:, q:] if q < rho else np.zeros((n_t, 0))
    left3 = np.eye(r, dtype=complex)
    a3 = np.eye(rho, dtype=np.int64)
    kind0 = False
    compact = False
    tb = None
    if n_t > 0:
        left_nf, perm, m = _normal_form(block, tol)
        nf = left_nf @ block[:, perm]
        compact = (m == n_t)
        # make Im T positive definite when only the sign is off
        tmat = nf[: m, n_t:] if m else np.zeros((0, 0))
        flip = False
        if m:
            ev = np.linalg.eigvalsh((tmat.imag + tmat.imag.T) / 2)
            if np.all(ev < 0):
                flip = True
                nf[:, n_t:] *= -1
                tmat = nf[: m, n_t:]
            sym = np.allclose(tmat, tmat.T, atol=1e3 * tol)
            pd = bool(np.all(np.linalg.eigvalsh((tmat.imag + tmat.imag.T) / 2) > tol))
            kind0 = bool(sym and pd)
        left3[q:, q:] = left_nf
        pm_block = np.eye(n_t + m, dtype=np.int64)[:, perm]
        if flip:
            pm_block[:, n_t:] *= -1
        a3[q:, q:] = pm_block
        labels = [f"t{j + 1}" for j in range(nf.shape[1])]
        tb = PeriodMatrix(nf, labels, "normal_form")
    # total witness: normalized = M P A
    lt = np.eye(pi, dtype=complex)
    lt[:r, :r] = left3 @ left2 @ left1
    m_total = lt @ m_rows
    a_inner = perm1 @ a2 @ a3
    a_total = u1.copy()
    a_total[:, :rho] = u1[:, :rho] @ a_inner
    a_total = pre @ a_total
    normalized = m_total @ orig @ a_total
    desc = _describe(p, q, tb, kind0, compact, base_tau)
    return CanonicalForm(p, q, tb, kind0, compact, desc,
                         {"M": m_total, "A": a_total, "normalized": normalized})


def _kernel_coords(ell_rows, tol):
    """Coordinate indices whose restriction to ker(l) is an isomorphism."""
    q, r = ell_rows.shape
    for combo in itertools.combinations(range(r), r - q):
        others = [j for j in range(r) if j not in combo]
        if abs(np.linalg.det(ell_rows[:, others])) > 1e-9:
            return list(combo)
    raise ClassificationError("integral forms are not independent")


def _same_elliptic_curve(block, base_tau, tol):
    if block is None or block.rows != 1 or block.cols != 2 or base_tau is None:
        return False
    e = block.entries[0]
    t = e[1] / e[0]
    if abs(t.imag) < tol:
        return False
    if t.imag < 0:
        t = -t
    a, _ = reduce_fundamental_domain(t)
    b, _ = reduce_fundamental_domain(complex(base_tau))
    return abs(a - b) < 1e-7


def _describe(p, q, block, kind0, compact, base_tau):
    parts = []
    if p:
        parts.append("C" if p == 1 else f"C^{p}")
    if q:
        parts.append("C*" if q == 1 else f"(C*)^{q}")
    if block is not None:
        if compact and _same_elliptic_curve(block, base_tau, 1e-9):
            parts.append("J(X)")
        elif compact:
            parts.append("torus")
        elif kind0:
            parts.append("quasi-abelian, kind 0")
        else:
            parts.append("toroidal group")
    return " x ".join(parts) if parts else "point"
