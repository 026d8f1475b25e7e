"""Rank-2 complex lattices, SL(2,Z) reduction and integer matrix utilities.

Conventions
-----------
* A lattice is ``Z + tau Z`` with ``Im(tau) > 0``.
* The fundamental parallelogram is ``{s + t tau : 0 <= s, t < 1}``.
* The reduced fundamental domain is ``-1/2 <= Re(tau) < 1/2``, ``|tau| >= 1``,
  and on the arc ``|tau| = 1`` only ``Re(tau) <= 0`` is kept (points with
  ``Re(tau) > 0`` on the arc are moved by ``tau -> -1/tau``).
"""

from __future__ import annotations

import cmath
import enum
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-9
RHO = cmath.exp(2j * math.pi / 3)
_EDGE_EPS = 1e-13


# ============
# Lattice data
# ============

@dataclass(frozen=True)
class Lattice:
    """The lattice ``Z + tau Z``."""

    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise DomainError(f"Im(tau) must be positive, got {tau}")
        object.__setattr__(self, "tau", tau)

    def coords(self, z):
        """Real coordinates ``(s, t)`` with ``z = s + t tau`` (vectorised)."""
        z = np.asarray(z, dtype=complex)
        t = z.imag / self.tau.imag
        s = z.real - t * self.tau.real
        return s, t

    def point(self, m, n):
        return m + n * self.tau

    def reduce_mod(self, z, corner=0j):
        """Representative of ``z`` in ``corner + F`` (vectorised)."""
        z = np.asarray(z, dtype=complex)
        s, t = self.coords(z - corner)
        ds, dt = np.floor(s), np.floor(t)
        # guard the half-open edges against rounding up to 1.0
        ds = np.where(s - ds >= 1.0, ds + 1, ds)
        dt = np.where(t - dt >= 1.0, dt + 1, dt)
        out = z - ds - dt * self.tau
        return out if out.ndim else complex(out)

    def nearest_point(self, z):
        """Lattice point closest to ``z`` (Euclidean), and its integer coords."""
        s, t = self.coords(complex(z))
        best = None
        for m in range(int(math.floor(s)) - 1, int(math.floor(s)) + 3):
            for n in range(int(math.floor(t)) - 1, int(math.floor(t)) + 3):
                d = abs(z - m - n * self.tau)
                if best is None or d < best[0]:
                    best = (d, m, n)
        return best[1] + best[2] * self.tau, (best[1], best[2])

    def distance(self, z):
        """Distance from ``z`` to the lattice."""
        return abs(z - self.nearest_point(z)[0])

    def covering_radius(self):
        """Largest distance from a point of C to the lattice (circumradius of
        the acute Delaunay triangle of the reduced basis)."""
        tr, _ = reduce_fundamental_domain(self.tau)
        a, b, c = 1.0, abs(tr), abs(tr - 1)
        area = abs(tr.imag) / 2
        return a * b * c / (4 * area)


@dataclass(frozen=True)
class TorusPoint:
    """A point ``[z]`` of ``C / (Z + tau Z)``; ``rep`` is canonicalised into F."""

    rep: complex
    lattice: Lattice

    def __post_init__(self):
        object.__setattr__(self, "rep", self.lattice.reduce_mod(complex(self.rep)))

    def rep_in(self, corner=0j):
        """Representative in the parallelogram ``corner + F``."""
        return self.lattice.reduce_mod(self.rep, corner)

    def __sub__(self, other):
        return TorusPoint(self.rep - other.rep, self.lattice)

    def __add__(self, other):
        return TorusPoint(self.rep + other.rep, self.lattice)

    def is_close(self, other, tol=DEFAULT_TOL):
        return congruent_mod_lattice(self.rep, other.rep, self.lattice, tol)


class LatticeType(enum.Enum):
    SQUARE = "square"
    HEXAGONAL = "hexagonal"
    GENERIC = "generic"


# =====================
# SL(2, Z) reduction
# =====================

def _mobius(m, tau):
    (a, b), (c, d) = m
    return (a * tau + b) / (c * tau + d)


def _matmul2(x, y):
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


def reduce_fundamental_domain(tau, max_iter=10_000):
    """Reduce ``tau`` into the standard fundamental domain of SL(2, Z).

    Returns ``(tau_reduced, ((a, b), (c, d)))`` with ``ad - bc = 1`` and
    ``tau_reduced = (a tau + b) / (c tau + d)``.  The reduced value is
    recomputed from the accumulated integer matrix so the Mobius relation
    holds to rounding.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"Im(tau) must be positive, got {tau}")
    m = ((1, 0), (0, 1))
    cur = tau
    for _ in range(max_iter):
        n = math.floor(cur.real + 0.5)
        if n:
            m = _matmul2(((1, -n), (0, 1)), m)
            cur = _mobius(m, tau)
        r = abs(cur)
        if r < 1 - _EDGE_EPS:
            m = _matmul2(((0, -1), (1, 0)), m)
            cur = _mobius(m, tau)
            continue
        if abs(r - 1) <= _EDGE_EPS and cur.real > _EDGE_EPS:
            m = _matmul2(((0, -1), (1, 0)), m)
            cur = _mobius(m, tau)
            # -1/tau on the arc has Re <= 0 and stays in [-1/2, 1/2)
        break
    else:  # pragma: no cover - reduction always terminates for Im tau > 0
        raise DomainError("reduction did not terminate")
    if m[1][0] < 0 or (m[1][0] == 0 and m[1][1] < 0):
        m = tuple(tuple(-x for x in row) for row in m)
    return _mobius(m, tau), m


def lattice_type(tau, tol=DEFAULT_TOL):
    tr, _ = reduce_fundamental_domain(tau)
    if abs(tr - 1j) <= tol:
        return LatticeType.SQUARE
    # e^{pi i/3} = rho + 1 can survive reduction when Re is 1/2 minus rounding
    if abs(tr - RHO) <= tol or abs(tr - (RHO + 1)) <= tol:
        return LatticeType.HEXAGONAL
    return LatticeType.GENERIC


def automorphism_multipliers(tau, tol=DEFAULT_TOL):
    """Multipliers ``gamma`` of automorphisms ``z -> gamma z + z0`` of the torus."""
    kind = lattice_type(tau, tol)
    if kind is LatticeType.SQUARE:
        return (1 + 0j, -1 + 0j, 1j, -1j)
    if kind is LatticeType.HEXAGONAL:
        return tuple(complex(round(w.real, 15), round(w.imag, 15))
                     for w in (cmath.exp(1j * math.pi * k / 3) for k in range(6)))
    return (1 + 0j, -1 + 0j)


def congruent_mod_lattice(z, w, lattice, tol=DEFAULT_TOL):
    """True iff ``z - w`` lies within ``tol`` of a point ``m + n tau``."""
    d = complex(z) - complex(w)
    if abs(d) <= tol:
        return True
    return lattice.distance(d) <= tol


# ==========================
# unimodular integer matrices
# ==========================

def _ranked_values(bound):
    """Entry ordering used by every enumeration: 0, 1, -1, 2, -2, ..."""
    vals = [0]
    for k in range(1, bound + 1):
        vals += [k, -k]
    return vals


def _det_batch(mats):
    n = mats.shape[-1]
    if n == 1:
        return mats[:, 0, 0]
    if n == 2:
        return mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    if n == 3:
        a = mats
        return (a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
                - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
                + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0]))
    return np.rint(np.linalg.det(mats.astype(float))).astype(np.int64)


def unimodular_batches(n, bound, chunk_rows=1):
    """Stream det +-1 integer ``n x n`` matrices with ``|entries| <= bound``.

    Matrices are ordered lexicographically over their row-major entries, where
    entry values are ranked ``0 < 1 < -1 < 2 < -2 < ...``.  Each yielded batch
    is an ``(k, n, n)`` int64 array; batches are produced by fixing the first
    ``chunk_rows`` rows, so nothing beyond one batch is held in memory.
    """
    if n < 1 or bound < 1:
        raise DomainError("need n >= 1 and bound >= 1")
    vals = np.array(_ranked_values(bound), dtype=np.int64)
    v = len(vals)
    chunk_rows = min(chunk_rows, n - 1) if n > 1 else 0
    head = chunk_rows * n
    tail = n * n - head
    tail_idx = np.indices((v,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), int)
    tail_vals = vals[tail_idx]
    for prefix in itertools.product(range(v), repeat=head):
        pre = np.broadcast_to(vals[list(prefix)], (len(tail_vals), head))
        mats = np.concatenate([pre, tail_vals], axis=1).reshape(-1, n, n)
        dets = _det_batch(mats)
        keep = np.abs(dets) == 1
        if keep.any():
            yield mats[keep]


def enumerate_unimodular(n, bound) -> Iterator[np.ndarray]:
    """Yield every integer ``n x n`` matrix with ``|a_ij| <= bound`` and det +-1,
    each once, in the order documented in :func:`unimodular_batches`."""
    for batch in unimodular_batches(n, bound):
        for mat in batch:
            yield mat.copy()


@functools.lru_cache(maxsize=8)
def unimodular_array(n, bound):
    """All of :func:`enumerate_unimodular` as one read-only array (cached);
    meant for vectorised searches that scan the whole space anyway."""
    parts = list(unimodular_batches(n, bound))
    out = np.concatenate(parts) if parts else np.zeros((0, n, n), np.int64)
    out.setflags(write=False)
    return out


def integer_det(mat):
    """Exact determinant of a small integer matrix (Bareiss)."""
    a = [[int(x) for x in row] for row in mat]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def is_unimodular(mat):
    mat = np.asarray(mat)
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1] and abs(integer_det(mat)) == 1


def column_hnf(a):
    """Column-style Hermite reduction with transform.

    Returns ``(H, U, rank)`` as lists of Python ints with ``A U = H``, ``U``
    unimodular, and the first ``rank`` columns of ``H`` in lower echelon form
    (positive pivots), the remaining columns zero.  Columns ``rank:`` of ``U``
    are a Z-basis of the integer kernel of ``A``.
    """
    h = [[int(x) for x in row] for row in a]
    m = len(h)
    n = len(h[0]) if m else 0
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap(i, j):
        for row in h:
            row[i], row[j] = row[j], row[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    def addmul(dst, src, k):
        # column dst -= k * column src
        for row in h:
            row[dst] -= k * row[src]
        for row in u:
            row[dst] -= k * row[src]

    c = 0
    for i in range(m):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if h[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(h[i][j]))
            if piv != c:
                swap(piv, c)
            done = True
            for j in range(c + 1, n):
                if h[i][j]:
                    addmul(j, c, h[i][j] // h[i][c])
                    if h[i][j]:
                        done = False
            if done:
                break
        if not any(h[i][j] for j in range(c, n)):
            continue
        if h[i][c] < 0:
            for row in h:
                row[c] = -row[c]
            for row in u:
                row[c] = -row[c]
        for j in range(c):
            addmul(j, c, h[i][j] // h[i][c])
        c += 1
    return h, u, c


def integer_kernel(a):
    """Z-basis (as rows) of ``{x in Z^n : A x = 0}``."""
    a = [[int(x) for x in row] for row in a]
    n = len(a[0])
    _, u, rank = column_hnf(a)
    return [[u[i][j] for i in range(n)] for j in range(rank, n)]


def row_basis(vectors):
    """Z-basis (as rows) of the lattice generated by integer row vectors."""
    vectors = [[int(x) for x in v] for v in vectors]
    if not vectors:
        return []
    # columns of A^T are the vectors; reduce them column-wise
    at = [list(col) for col in zip(*vectors)]
    h, _, rank = column_hnf(at)
    return [[h[i][j] for i in range(len(h))] for j in range(rank)]
