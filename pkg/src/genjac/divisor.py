"""Divisors prime to S, extended divisors and the Riemann-Roch count."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .curve import GenusData, SingularCurveSpec
from .errors import DivisorError, DomainError, ParseError


@dataclass(frozen=True)
class Divisor:
    """Finitely supported integer weights.  Keys are point identifiers (or,
    for divisors found numerically on a torus, complex representatives)."""

    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        w = {}
        for k, v in dict(self.weights).items():
            if int(v) != v:
                raise DomainError(f"weight of {k!r} is not an integer")
            if v:
                w[k] = int(v)
        object.__setattr__(self, "weights", w)

    def __getitem__(self, key):
        return self.weights.get(key, 0)

    def __iter__(self):
        return iter(self.weights.items())

    def __len__(self):
        return len(self.weights)

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return Divisor({k: -v for k, v in self.weights.items()})

    def __sub__(self, other):
        return add(self, -other)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.weights == other.weights

    def __hash__(self):
        return hash(frozenset(self.weights.items()))

    @property
    def support(self):
        return set(self.weights)

    def zeros(self):
        return {k: v for k, v in self.weights.items() if v > 0}

    def poles(self):
        return {k: -v for k, v in self.weights.items() if v < 0}

    def __str__(self):
        return format_divisor(self)


def degree(d: Divisor) -> int:
    return sum(d.weights.values())


def add(d1: Divisor, d2: Divisor) -> Divisor:
    w = dict(d1.weights)
    for k, v in d2.weights.items():
        w[k] = w.get(k, 0) + v
    return Divisor(w)


def geq(d1: Divisor, d2: Divisor) -> bool:
    """``d1 >= d2`` pointwise."""
    keys = d1.support | d2.support
    return all(d1[k] >= d2[k] for k in keys)


def is_strictly_positive(d: Divisor) -> bool:
    return geq(d, Divisor()) and len(d) > 0


def check_prime_to(d: Divisor, spec: SingularCurveSpec, tol=1e-9):
    """Raise :class:`DivisorError` unless the support of ``d`` misses S."""
    bad = [k for k in d.support if k in spec.points]
    if not bad and spec.base_genus == 1 and spec.positions:
        lat = spec.lattice
        for k in d.support:
            if isinstance(k, (complex, float, int)):
                for pid in spec.points:
                    if lat.distance(complex(k) - spec.positions[pid]) < tol:
                        bad.append(k)
    if bad:
        raise DivisorError(f"divisor is not prime to S: {bad}")
    return d


# ============
# Riemann-Roch
# ============

@dataclass(frozen=True)
class RRResult:
    chi: int
    h0: Optional[int] = None
    h1: Optional[int] = None

    def __post_init__(self):
        if self.h0 is not None and self.h1 is not None and self.h0 - self.h1 != self.chi:
            raise DomainError("h0 - h1 must equal chi")

    def as_dict(self):
        return {"chi": self.chi, "h0": self.h0, "h1": self.h1}


def rr_chi(d: Divisor, genus_data: GenusData, spec: SingularCurveSpec = None) -> RRResult:
    """``chi = deg D + 1 - pi``, with the dimensions filled in only where they
    are known exactly: D = 0 gives (1, pi), deg D < 0 gives h0 = 0.

    By duality h1(D) = h0(Omega_m(-D)); that identity is not evaluated."""
    if spec is not None:
        check_prime_to(d, spec)
    pi = genus_data.pi
    chi = degree(d) + 1 - pi
    if len(d) == 0:
        return RRResult(chi, 1, pi)
    if degree(d) < 0:
        return RRResult(chi, 0, -chi)
    return RRResult(chi)


# ==================
# extended divisors
# ==================

@dataclass(frozen=True)
class ExtendedDivisor:
    off_S: Divisor
    at_classes: Mapping[tuple, tuple]

    def __post_init__(self):
        object.__setattr__(self, "at_classes",
                           {tuple(k): tuple(int(x) for x in v) for k, v in self.at_classes.items()})


def validate_extended(e: ExtendedDivisor, spec: SingularCurveSpec) -> bool:
    """True iff every class with a nonzero entry has ``|n_P| >= m(P)`` for all
    its points and all ``n_P`` of one sign."""
    classes = set(spec.classes)
    for cls, ns in e.at_classes.items():
        if cls not in classes:
            # accept a permutation of a class, re-ordering n accordingly
            match = [c for c in classes if set(c) == set(cls)]
            if not match:
                raise DivisorError(f"{cls} is not a class of the curve")
        if len(ns) != len(cls):
            raise DivisorError(f"class {cls} needs {len(cls)} entries, got {len(ns)}")
    check_prime_to(e.off_S, spec)
    for cls, ns in e.at_classes.items():
        if not any(ns):
            continue
        for pid, n in zip(cls, ns):
            if abs(n) < spec.modulus[pid]:
                return False
        if not (all(n > 0 for n in ns) or all(n < 0 for n in ns)):
            return False
    return True


@dataclass(frozen=True)
class Multiconstant:
    values: Mapping[tuple, complex]

    def __post_init__(self):
        vals = {tuple(k): complex(v) for k, v in self.values.items()}
        if any(v == 0 for v in vals.values()):
            raise DomainError("multiconstant values must be nonzero")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, cls):
        return self.values[tuple(cls)]


# ================
# divisor literals
# ================

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*]))")


def parse_divisor(text: str) -> Divisor:
    """Parse ``"2*A - B + C"``; ``"0"`` or an empty string is the zero divisor."""
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        col = m.start(kind) + 1
        toks.append((kind, m.group(kind), col))
        pos = m.end()
    if not toks or toks == [("int", "0", toks[0][2])]:
        return Divisor()
    weights = {}
    i = 0
    first = True
    end_col = len(text) + 1
    while i < len(toks):
        sign = 1
        if toks[i][0] == "op" and toks[i][1] in "+-":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError("missing operator", toks[i][2], "'+' or '-'")
        first = False
        coef = 1
        if i < len(toks) and toks[i][0] == "int":
            coef = int(toks[i][1])
            i += 1
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "*":
                i += 1
            elif i >= len(toks) or toks[i][0] != "id":
                if coef == 0:
                    continue
                col = toks[i][2] if i < len(toks) else end_col
                raise ParseError("coefficient without a point", col, "'*' and a point name")
        if i >= len(toks) or toks[i][0] != "id":
            col = toks[i][2] if i < len(toks) else end_col
            raise ParseError("expected a point name", col, "identifier")
        name = toks[i][1]
        weights[name] = weights.get(name, 0) + sign * coef
        i += 1
    return Divisor(weights)


def format_divisor(d: Divisor) -> str:
    if not len(d):
        return "0"
    parts = []
    for k, v in sorted(d.weights.items(), key=lambda kv: str(kv[0])):
        name = k if isinstance(k, str) else f"[{k}]"
        mag = abs(v)
        term = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(term if v > 0 else f"-{term}")
        else:
            parts.append(("+ " if v > 0 else "- ") + term)
    return " ".join(parts)
