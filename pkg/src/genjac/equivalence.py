"""Equivalence P = M P' A of period matrices and nodal genus-2 curves.

For the 2 x 3 shape ``(0 1 tau'; 1 s' t')`` write ``P' A`` as
``[[A11, A12, A13], [A21, A22, A23]]``.  With the second row of M kept
real-preserving (``m21 = 0``) one gets

    M = [[-A21/det, A11/det], [0, 1/A21]],   det = A11 A22 - A12 A21,

and ``P = M P' A = (0 1 tau; 1 s t)`` with ``s = A22/A21``, ``t = A23/A21``,
``tau = (A11 A23 - A13 A21)/det``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .albanese import PeriodMatrix, _nodal_parts, nodal_matrix
from .errors import DomainError, WitnessError
from .lattice import (Lattice, TorusPoint, automorphism_multipliers, congruent_mod_lattice,
                      is_unimodular, unimodular_array)

DEFAULT_TOL = 1e-9
A0 = np.array([[1, 0, 1], [0, -1, 0], [0, 0, -1]])


@dataclass(frozen=True, eq=False)
class EquivalenceWitness:
    M: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", np.array(self.M, dtype=complex))
        a = np.array(self.A)
        if not np.all(a == np.rint(a)):
            raise WitnessError("A must be an integer matrix")
        a = a.astype(np.int64)
        if not is_unimodular(a):
            raise WitnessError("A must be unimodular")
        object.__setattr__(self, "A", a)

    def to_dict(self):
        return {"M": [[[float(z.real), float(z.imag)] for z in row] for row in self.M],
                "A": self.A.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls([[complex(x[0], x[1]) for x in row] for row in doc["M"]], doc["A"])


def _mat(p):
    return p.entries if isinstance(p, PeriodMatrix) else np.atleast_2d(np.asarray(p, dtype=complex))


def check_witness(P, P_prime, M, A, tol=DEFAULT_TOL) -> bool:
    """Entrywise ``|P - M P' A| < tol``."""
    p, pp = _mat(P), _mat(P_prime)
    m = np.atleast_2d(np.asarray(M, dtype=complex))
    a = np.atleast_2d(np.asarray(A))
    if m.shape != (p.shape[0], pp.shape[0]) or a.shape != (pp.shape[1], p.shape[1]):
        raise DomainError("witness dimensions do not match the matrices")
    if m.shape[0] != m.shape[1]:
        raise WitnessError("M must be square")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size and sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise WitnessError("M is singular")
    return bool(np.max(np.abs(p - m @ pp @ a), initial=0.0) < tol)


def _a_blocks(a, tau_p, s_p, t_p):
    """The six quantities A_ij for one matrix or a stack of them."""
    a = np.asarray(a)
    a1, a2, a3 = a[..., 0, :], a[..., 1, :], a[..., 2, :]
    top = a2 + a3 * tau_p            # A11, A12, A13
    bot = a1 + a2 * s_p + a3 * t_p   # A21, A22, A23
    return top, bot


def derived_params(A, tau_p, s_p, t_p, tol=1e-12):
    """(s, t, tau) of ``M P' A`` for ``P' = (0 1 tau'; 1 s' t')``."""
    a = np.asarray(A)
    if a.shape != (3, 3) or not is_unimodular(a):
        raise WitnessError("A must be a unimodular 3 x 3 integer matrix")
    top, bot = _a_blocks(a, complex(tau_p), complex(s_p), complex(t_p))
    a11, a12, a13 = top
    a21, a22, a23 = bot
    if abs(a21) < tol:
        raise WitnessError("A21 = 0")
    det = a11 * a22 - a12 * a21
    if abs(det) < tol:
        raise WitnessError("A11 A22 - A12 A21 = 0")
    return complex(a22 / a21), complex(a23 / a21), complex((a11 * a23 - a13 * a21) / det)


def witness_M(A, tau_p, s_p, t_p):
    """The M of the module docstring, so that ``M P' A`` is in toroidal form."""
    top, bot = _a_blocks(np.asarray(A), complex(tau_p), complex(s_p), complex(t_p))
    a11, a12, _ = top
    a21, a22, _ = bot
    det = a11 * a22 - a12 * a21
    if abs(a21) < 1e-12 or abs(det) < 1e-12:
        raise WitnessError("A gives no toroidal-form M")
    return np.array([[-a21 / det, a11 / det], [0, 1 / a21]], dtype=complex)


def _nodal(p):
    if isinstance(p, (tuple, list)) and len(p) == 2 and np.ndim(p[0]) == 0:
        return complex(p[0]), complex(p[1])
    parts = _nodal_parts(_mat(p))
    if parts is None:
        raise DomainError("matrix is not in the nodal shape (0 1 tau; 1 0 a)")
    return complex(parts[0]), complex(parts[1])


def nodal_witnesses(P_a, P_b, entry_bound=2, tol=DEFAULT_TOL, first_only=False):
    """Every A (|entries| <= entry_bound, in enumeration order) for which
    ``derived_params(A, tau, 0, b) = (0, a, tau)`` within tol."""
    tau, a = _nodal(P_a)
    tau_b, b = _nodal(P_b)
    if abs(tau - tau_b) > tol:
        raise DomainError("nodal matrices must share tau")
    mats = unimodular_array(3, int(entry_bound))
    top, bot = _a_blocks(mats, tau, 0.0, b)
    a11, a12, a13 = top[:, 0], top[:, 1], top[:, 2]
    a21, a22, a23 = bot[:, 0], bot[:, 1], bot[:, 2]
    det = a11 * a22 - a12 * a21
    ok = (np.abs(a21) > 1e-12) & (np.abs(det) > 1e-12)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(ok, a22 / a21, np.inf)
        t = np.where(ok, a23 / a21, np.inf)
        tt = np.where(ok, (a11 * a23 - a13 * a21) / det, np.inf)
    hit = ok & (np.abs(s) < tol) & (np.abs(t - a) < tol) & (np.abs(tt - tau) < tol)
    idx = np.nonzero(hit)[0]
    if first_only:
        idx = idx[:1]
    out = []
    for i in idx:
        A = mats[i].copy()
        out.append(EquivalenceWitness(witness_M(A, tau, 0.0, b), A))
    return out


def equivalent_nodal(P_a, P_b, entry_bound=2, tol=DEFAULT_TOL) -> Optional[EquivalenceWitness]:
    """First witness with ``P_a = M P_b A`` in enumeration order, or None.

    Meant for real a, b in (0, 1); complex a is handled by check_witness with
    user-supplied candidates."""
    found = nodal_witnesses(P_a, P_b, entry_bound, tol, first_only=True)
    return found[0] if found else None


# =========================
# nodal genus-2 curves
# =========================

@dataclass(frozen=True)
class NodalGenus2Curve:
    tau: complex
    z1: complex
    z2: complex

    def __post_init__(self):
        lat = Lattice(complex(self.tau))
        object.__setattr__(self, "tau", lat.tau)
        z1 = self.z1.rep if isinstance(self.z1, TorusPoint) else complex(self.z1)
        z2 = self.z2.rep if isinstance(self.z2, TorusPoint) else complex(self.z2)
        if congruent_mod_lattice(z1, z2, lat):
            raise DomainError("z1 and z2 must be distinct on the torus")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @property
    def lattice(self):
        return Lattice(self.tau)

    @property
    def a(self):
        return self.z1 - self.z2

    def period_matrix(self):
        return nodal_matrix(self.tau, self.a)


class Biholomorphism(NamedTuple):
    biholomorphic: bool
    gamma: Optional[complex]


def nodal_biholomorphic(c1: NodalGenus2Curve, c2: NodalGenus2Curve, tol=DEFAULT_TOL):
    """``z1' - z2' = gamma (z1 - z2) mod Gamma_tau`` for an automorphism
    multiplier gamma; returns the first such gamma (1, -1, then the rest)."""
    if abs(c1.tau - c2.tau) > tol:
        raise DomainError("the curves are built on different base tori")
    lat = c1.lattice
    for g in automorphism_multipliers(c1.tau, tol):
        if congruent_mod_lattice(c2.a, g * c1.a, lat, tol):
            return Biholomorphism(True, g)
    return Biholomorphism(False, None)
