"""Independent reference computations used by the tests.

Nothing here imports the package's numerics: theta-function formulas via
mpmath, brute-force enumerations, exact Fractions.
"""

import itertools
from fractions import Fraction

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def _nome(tau):
    return mp.exp(1j * mp.pi * mp.mpc(tau))


def theta_invariants(tau):
    """(g2, g3, e1, e2, e3) of the lattice Z + tau Z from Jacobi thetas."""
    q = _nome(tau)
    t2, t3, t4 = (mp.jtheta(k, 0, q) for k in (2, 3, 4))
    c = mp.pi ** 2 / 3
    e1 = c * (t3 ** 4 + t4 ** 4)
    e2 = c * (t2 ** 4 - t4 ** 4)
    e3 = -c * (t2 ** 4 + t3 ** 4)
    g2 = 2 * (e1 ** 2 + e2 ** 2 + e3 ** 2)
    g3 = 4 * e1 * e2 * e3
    return complex(g2), complex(g3), complex(e1), complex(e2), complex(e3)


def theta_wp(tau, z):
    q = _nome(tau)
    t2, t3 = mp.jtheta(2, 0, q), mp.jtheta(3, 0, q)
    u = mp.pi * mp.mpc(z)
    val = (mp.pi * t2 * t3 * mp.jtheta(4, u, q) / mp.jtheta(1, u, q)) ** 2
    return complex(val - mp.pi ** 2 / 3 * (t2 ** 4 + t3 ** 4))


def theta_eta1(tau):
    """zeta(z + 1) - zeta(z)."""
    q = _nome(tau)
    return complex(-mp.pi ** 2 / 3 * mp.jtheta(1, 0, q, 3) / mp.jtheta(1, 0, q, 1))


def theta_sigma(tau, z):
    q = _nome(tau)
    z = mp.mpc(z)
    eta1 = -mp.pi ** 2 / 3 * mp.jtheta(1, 0, q, 3) / mp.jtheta(1, 0, q, 1)
    return complex(mp.exp(eta1 * z ** 2 / 2) * mp.jtheta(1, mp.pi * z, q)
                   / (mp.pi * mp.jtheta(1, 0, q, 1)))


def theta_zeta(tau, z):
    return complex(mp.diff(lambda w: mp.log(theta_sigma_mp(tau, w)), mp.mpc(z)))


def theta_sigma_mp(tau, z):
    q = _nome(tau)
    eta1 = -mp.pi ** 2 / 3 * mp.jtheta(1, 0, q, 3) / mp.jtheta(1, 0, q, 1)
    return mp.exp(eta1 * z ** 2 / 2) * mp.jtheta(1, mp.pi * z, q) / (mp.pi * mp.jtheta(1, 0, q, 1))


def lattice_sum_g2(tau, n):
    """Truncated Eisenstein sum 60 sum' w^-4 over |m|, |k| <= n."""
    m, k = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1))
    w = (m + k * tau).ravel()
    w = w[w != 0]
    return 60 * np.sum(w ** -4.0)


def richardson_g2(tau, n=200):
    """Square-box truncation error is O(n^-2); one Richardson step."""
    a, b = lattice_sum_g2(tau, n), lattice_sum_g2(tau, 2 * n)
    return (4 * b - a) / 3


def mobius(m, tau):
    (a, b), (c, d) = m
    return (a * tau + b) / (c * tau + d)


def brute_unimodular(n, bound):
    vals = range(-bound, bound + 1)
    out = []
    for entries in itertools.product(vals, repeat=n * n):
        a = np.array(entries).reshape(n, n)
        if round(abs(np.linalg.det(a))) == 1:
            out.append(a)
    return out


def brute_small_combination(cols, bound, tol):
    """True iff some nonzero integer combination (|c| <= bound) has norm < tol."""
    cols = np.asarray(cols, dtype=complex)
    n = cols.shape[1]
    for c in itertools.product(range(-bound, bound + 1), repeat=n):
        if not any(c):
            continue
        if np.linalg.norm(cols @ np.array(c)) < tol:
            return True
    return False


def rational_with_small_denominator(x, denom_bound, tol):
    """Exhaustive: is |x - p/q| < tol for some q <= denom_bound?"""
    for q in range(1, denom_bound + 1):
        if abs(x * q - round(x * q)) < tol * q:
            return Fraction(round(x * q), q)
    return None


def poly_from_roots(roots):
    """Coefficients of prod (X - r), leading 1, by repeated multiplication."""
    coef = [1 + 0j]
    for r in roots:
        nxt = [0j] * (len(coef) + 1)
        for i, c in enumerate(coef):
            nxt[i] += c
            nxt[i + 1] -= c * r
        coef = nxt
    return coef
