"""Singular curves X_m built from (X, S, R, m) and their genus bookkeeping.

A spec lists the points of S with their multiplicities, a partition of S into
classes (each class becomes one singular point), and base-curve data: the
period ratio tau for an elliptic base, or a Siegel matrix plus the values of
the Abel map at S for higher genus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (CapabilityError, CurveValidationError, DegenerateModulusError,
                     MalformedPartitionError, OverlappingPointsError)
from .lattice import Lattice, TorusPoint

_OVERLAP_TOL = 1e-9


@dataclass(frozen=True)
class ModulusSpec:
    entries: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    @property
    def degree(self):
        return sum(self.entries.values())

    def __getitem__(self, pid):
        return self.entries[pid]


@dataclass(frozen=True)
class SingularCurveSpec:
    """(X, S, R, m).

    ``points`` fixes the order of S; ``positions`` maps ids to complex
    positions on the torus (g = 1); ``supplied_h`` maps ids to the vector
    ``(h_1(P), ..., h_g(P))`` and is required for g >= 2.
    """

    base_genus: int
    points: tuple
    classes: tuple
    modulus: ModulusSpec
    tau: object = None
    positions: Mapping[str, complex] = field(default_factory=dict)
    supplied_h: Optional[Mapping[str, tuple]] = None
    cut_corner: Optional[complex] = None
    base_point: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        if not isinstance(self.modulus, ModulusSpec):
            object.__setattr__(self, "modulus", ModulusSpec(self.modulus))
        object.__setattr__(self, "positions", {k: complex(v) for k, v in self.positions.items()})
        if self.supplied_h is not None:
            object.__setattr__(self, "supplied_h",
                               {k: tuple(complex(x) for x in np.atleast_1d(v))
                                for k, v in self.supplied_h.items()})

    # -- convenience --------------------------------------------------------
    @property
    def s(self):
        return len(self.points)

    @property
    def lattice(self):
        if self.base_genus != 1:
            raise CapabilityError("an explicit lattice exists only for an elliptic base")
        return Lattice(complex(self.tau))

    def tau_matrix(self):
        g = self.base_genus
        if g == 0:
            return np.zeros((0, 0), complex)
        if g == 1 and np.ndim(self.tau) == 0:
            return np.array([[complex(self.tau)]])
        return np.asarray(self.tau, dtype=complex).reshape(g, g)

    def class_of(self, pid):
        for c in self.classes:
            if pid in c:
                return c
        raise KeyError(pid)

    def torus_point(self, pid):
        return TorusPoint(self.positions[pid], self.lattice)

    def corner(self):
        """Corner b of the cut domain b + F (g = 1)."""
        if self.cut_corner is not None:
            return complex(self.cut_corner)
        return choose_cut_corner(self.lattice, [self.positions[p] for p in self.points])

    def representative(self, pid):
        """In-cut-domain representative of a point of S."""
        return self.lattice.reduce_mod(self.positions[pid], self.corner())

    def p0(self):
        if self.base_point is not None:
            return self.lattice.reduce_mod(complex(self.base_point), self.corner())
        return choose_base_point(self.lattice, self.corner(),
                                 [self.positions[p] for p in self.points])


@dataclass(frozen=True)
class GenusData:
    delta_per_class: Mapping[tuple, int]
    delta: int
    pi: int
    k: int
    p: int
    s: int
    g: int = 0
    n_classes: int = 0

    def as_dict(self):
        return {
            "g": self.g, "s": self.s, "classes": self.n_classes,
            "delta_per_class": [{"class": list(c), "delta": d}
                                for c, d in self.delta_per_class.items()],
            "delta": self.delta, "pi": self.pi, "k": self.k, "p": self.p,
        }


# ==========
# validation
# ==========

def validate(spec: SingularCurveSpec) -> SingularCurveSpec:
    if spec.base_genus < 0:
        raise CurveValidationError("base genus must be nonnegative")
    ids = list(spec.points)
    if len(set(ids)) != len(ids):
        raise OverlappingPointsError("point identifiers are not unique")
    if not ids:
        raise DegenerateModulusError("S is empty")
    # modulus
    if set(spec.modulus.entries) != set(ids):
        raise MalformedPartitionError("support of the modulus must equal S")
    for pid, m in spec.modulus.entries.items():
        if int(m) != m or m < 1:
            raise DegenerateModulusError(f"m({pid}) = {m} is not a positive integer")
    if spec.modulus.degree < 2:
        raise DegenerateModulusError("deg m must be at least 2")
    # partition
    seen = []
    for c in spec.classes:
        if not c:
            raise MalformedPartitionError("empty class")
        seen.extend(c)
    if len(seen) != len(set(seen)):
        raise MalformedPartitionError("classes are not disjoint")
    if set(seen) != set(ids):
        raise MalformedPartitionError("classes must cover S exactly")
    # base data
    g = spec.base_genus
    if g >= 1 and spec.tau is None:
        raise CurveValidationError("tau is required for a base of positive genus")
    if g == 1 and np.ndim(spec.tau) == 0:
        if not complex(spec.tau).imag > 0:
            raise CurveValidationError("Im(tau) must be positive")
        if set(spec.positions) != set(ids):
            raise CurveValidationError("every point needs a position on the torus")
        lat = spec.lattice
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if lat.distance(spec.positions[a] - spec.positions[b]) < _OVERLAP_TOL:
                    raise OverlappingPointsError(f"points {a} and {b} coincide on the torus")
    elif g >= 1:
        t = spec.tau_matrix()
        if not np.allclose(t, t.T, atol=1e-10):
            raise CurveValidationError("tau must be symmetric")
        if np.min(np.linalg.eigvalsh((t.imag + t.imag.T) / 2)) <= 0:
            raise CurveValidationError("Im(tau) must be positive definite")
    if spec.supplied_h is not None:
        if set(spec.supplied_h) != set(ids):
            raise CurveValidationError("supplied_h must give a vector for every point")
        if any(len(v) != g for v in spec.supplied_h.values()):
            raise CurveValidationError(f"supplied_h vectors must have length g = {g}")
    return spec


# ================
# genus invariants
# ================

def genus(spec: SingularCurveSpec) -> GenusData:
    per = {c: sum(spec.modulus[p] for p in c) - 1 for c in spec.classes}
    delta = spec.modulus.degree - len(spec.classes)
    s = spec.s
    k = s - len(spec.classes)
    p = spec.modulus.degree - s
    return GenusData(per, delta, spec.base_genus + delta, k, p, s,
                     spec.base_genus, len(spec.classes))


def residue_pairing(spec: SingularCurveSpec):
    """Star pairs (first, other) inside every class, in input order."""
    pairs = []
    for c in spec.classes:
        pairs.extend((c[0], other) for other in c[1:])
    return pairs


def second_kind_poles(spec: SingularCurveSpec):
    """``[(point, order)]``: one residue-free form for each excess order
    ``2..m(P)`` at every P, giving deg m - s forms in total."""
    out = []
    for pid in spec.points:
        out.extend((pid, order) for order in range(2, spec.modulus[pid] + 1))
    return out


# =====================
# cut domain for g = 1
# =====================

def _clearance(lat, corner, zs):
    if not zs:
        return 1.0
    s, t = lat.coords(np.asarray(zs) - corner)
    s, t = s - np.floor(s), t - np.floor(t)
    return float(np.min(np.minimum.reduce([s, 1 - s, t, 1 - t])))


def _clearance_as_given(lat, corner, zs):
    s, t = lat.coords(np.asarray(zs) - corner)
    return float(np.min(np.minimum.reduce([s, 1 - s, t, 1 - t])))


def choose_cut_corner(lattice, positions, margin=0.05):
    """Corner of the cut domain b + F.

    Corner 0 if every point of S is at least ``margin`` (lattice coordinates)
    inside F as given.  Otherwise a grid corner ``i/16 + j/16 tau`` (|i|, |j| <= 16)
    that keeps the given positions themselves inside b + F with the largest
    clearance, so that representatives are the user's positions.  If no such
    corner clears ``margin``, the corner with the largest clearance mod the lattice."""
    if not positions or _clearance_as_given(lattice, 0j, positions) >= margin:
        return 0j
    best, best_c = None, -1.0
    for i in range(-16, 17):
        for j in range(-16, 17):
            b = i / 16 + j / 16 * lattice.tau
            c = _clearance_as_given(lattice, b, positions)
            if c > best_c + 1e-12:
                best, best_c = b, c
    if best_c >= margin:
        return best
    best, best_c = None, -1.0
    for i in range(16):
        for j in range(16):
            b = i / 16 + j / 16 * lattice.tau
            c = _clearance(lattice, b, positions)
            if c > best_c + 1e-12:
                best, best_c = b, c
    return best


def choose_base_point(lattice, corner, positions):
    """Grid point of ``corner + F`` farthest from S and from the edges."""
    best, best_d = None, -1.0
    tau = lattice.tau
    scale = min(1.0, abs(tau)) * tau.imag / abs(tau)
    for i in range(8):
        for j in range(8):
            z = corner + (i + 0.5) / 8 + (j + 0.5) / 8 * tau
            d = min([lattice.distance(z - w) for w in positions]
                    + [min(i + .5, 7.5 - i, j + .5, 7.5 - j) / 8 * scale])
            if d > best_d + 1e-12:
                best, best_d = z, d
    return best


# ===========
# descriptors
# ===========

def _c(v):
    if isinstance(v, (list, tuple)) and len(v) == 2 and not isinstance(v[0], (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise CurveValidationError(f"expected a complex number as [re, im], got {v!r}")


def _cpair(z):
    z = complex(z)
    return [z.real, z.imag]


def spec_from_dict(doc) -> SingularCurveSpec:
    """Build and validate a spec from a curve descriptor document."""
    if not isinstance(doc, dict):
        raise CurveValidationError("descriptor must be a JSON object")
    try:
        g = int(doc["base_genus"])
        pts = doc["points"]
        classes = doc["classes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveValidationError(f"descriptor is missing a field: {exc}") from None
    tau = doc.get("tau")
    if tau is not None:
        if g == 1 and not isinstance(tau[0], (list, tuple)):
            tau = _c(tau)
        elif g == 1 and len(tau) == 1 and isinstance(tau[0][0], (list, tuple)):
            tau = _c(tau[0][0])
        else:
            tau = np.array([[_c(x) for x in row] for row in tau])
    ids, positions, modulus = [], {}, {}
    for p in pts:
        try:
            pid = str(p["id"])
            modulus[pid] = int(p.get("multiplicity", 1))
        except (KeyError, TypeError, ValueError):
            raise CurveValidationError(f"bad point entry {p!r}") from None
        ids.append(pid)
        if "position" in p:
            positions[pid] = _c(p["position"])
    h = doc.get("supplied_h")
    if h is not None:
        if isinstance(h, dict):
            h = {str(k): [_c(x) for x in v] for k, v in h.items()}
        else:
            if len(h) != len(ids):
                raise CurveValidationError("supplied_h needs one row per point")
            h = {pid: [_c(x) for x in row] for pid, row in zip(ids, h)}
    corner = doc.get("cut_corner")
    bp = doc.get("base_point")
    spec = SingularCurveSpec(
        base_genus=g, points=ids, classes=[[str(x) for x in c] for c in classes],
        modulus=modulus, tau=tau, positions=positions, supplied_h=h,
        cut_corner=None if corner is None else _c(corner),
        base_point=None if bp is None else _c(bp))
    return validate(spec)


def spec_to_dict(spec: SingularCurveSpec):
    doc = {"base_genus": spec.base_genus}
    if spec.tau is not None:
        if np.ndim(spec.tau) == 0:
            doc["tau"] = _cpair(spec.tau)
        else:
            doc["tau"] = [[_cpair(x) for x in row] for row in spec.tau_matrix()]
    doc["points"] = []
    for pid in spec.points:
        entry = {"id": pid, "multiplicity": spec.modulus[pid]}
        if pid in spec.positions:
            entry["position"] = _cpair(spec.positions[pid])
        doc["points"].append(entry)
    doc["classes"] = [list(c) for c in spec.classes]
    if spec.supplied_h is not None:
        doc["supplied_h"] = [[_cpair(x) for x in spec.supplied_h[p]] for p in spec.points]
    if spec.cut_corner is not None:
        doc["cut_corner"] = _cpair(spec.cut_corner)
    if spec.base_point is not None:
        doc["base_point"] = _cpair(spec.base_point)
    return doc


def load_spec(path_or_text):
    """Read a descriptor from a path, ``-`` (stdin) or a JSON string."""
    import sys
    if path_or_text == "-":
        text = sys.stdin.read()
    elif path_or_text.lstrip().startswith("{"):
        text = path_or_text
    else:
        with open(path_or_text) as fh:
            text = fh.read()
    return spec_from_dict(json.loads(text))


# small constructors, mostly for tests and demos
def node_spec(tau, z1, z2, **kw):
    return validate(SingularCurveSpec(1, ["P1", "P2"], [["P1", "P2"]], {"P1": 1, "P2": 1},
                                      tau=complex(tau), positions={"P1": z1, "P2": z2}, **kw))


def cusp_spec(tau, z, **kw):
    return validate(SingularCurveSpec(1, ["P"], [["P"]], {"P": 2}, tau=complex(tau),
                                      positions={"P": z}, **kw))


def torus_spec(tau, positions: Sequence[complex], classes, multiplicities=None, **kw):
    ids = [f"P{i + 1}" for i in range(len(positions))]
    mult = multiplicities or [1] * len(ids)
    cls = [[ids[i] for i in c] for c in classes]
    return validate(SingularCurveSpec(1, ids, cls, dict(zip(ids, mult)), tau=complex(tau),
                                      positions=dict(zip(ids, positions)), **kw))
