"""Minkowski algebra on finite integer point sets.

Dilation by a structuring element is a union-preserving map on point
sets; erosion is its adjoint.  The pooled perception of two structuring
elements is the dilation by their intersection, which is verified both
as a subset-enumeration identity and, on a small finite module, against
the abstract function-meet oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import DimMismatch, EmptyStructuringElement, TooLarge
from .lattice import FiniteLattice, powerset_lattice
from .spaces import SpaceFunction, function_meet_oracle

Vector = tuple[int, ...]


@dataclass(frozen=True)
class PointSet:
    """A finite set of integer vectors of a fixed dimension."""

    dim: int
    points: frozenset[Vector]

    def __post_init__(self):
        if self.dim < 1:
            raise DimMismatch("dimension must be positive")
        pts = frozenset(tuple(int(c) for c in p) for p in self.points)
        for p in pts:
            if len(p) != self.dim:
                raise DimMismatch(f"point {p} does not have dimension {self.dim}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, dim: int, points: Iterable) -> "PointSet":
        return cls(dim, frozenset(tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in points))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.points

    def sorted_points(self) -> list[Vector]:
        return sorted(self.points)

    def __repr__(self) -> str:
        return f"PointSet(dim={self.dim}, {{{', '.join(map(str, self.sorted_points()))}}})"


def _same_dim(*sets: PointSet) -> int:
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise DimMismatch(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def _add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _neg(u: Vector) -> Vector:
    return tuple(-a for a in u)


def minkowski_sum(a: PointSet, b: PointSet) -> PointSet:
    """Element-wise vector sums of the two sets."""
    dim = _same_dim(a, b)
    return PointSet(dim, frozenset(_add(u, v) for u in a.points for v in b.points))


def intersection(a: PointSet, b: PointSet) -> PointSet:
    dim = _same_dim(a, b)
    return PointSet(dim, a.points & b.points)


def union(a: PointSet, b: PointSet) -> PointSet:
    dim = _same_dim(a, b)
    return PointSet(dim, a.points | b.points)


def translate(x: PointSet, u: Vector) -> PointSet:
    return PointSet(x.dim, frozenset(_add(p, u) for p in x.points))


def dilate(se: PointSet, x: PointSet) -> PointSet:
    """Dilation of x by the structuring element: their Minkowski sum."""
    return minkowski_sum(x, se)


def erode(se: PointSet, x: PointSet) -> PointSet:
    """Erosion of x by the structuring element.

    Computed by both defining formulas, the intersection of negative
    translates and the translation-containment form, which must agree.
    The empty structuring element is rejected: its erosion would be the
    whole (infinite) carrier.
    """
    dim = _same_dim(se, x)
    if not se.points:
        raise EmptyStructuringElement("erosion by the empty set is the whole carrier")
    by_translates: frozenset[Vector] | None = None
    for u in se.points:
        shifted = frozenset(_add(p, _neg(u)) for p in x.points)
        by_translates = shifted if by_translates is None else by_translates & shifted
    some = next(iter(se.points))
    candidates = frozenset(_add(p, _neg(some)) for p in x.points)
    by_containment = frozenset(
        u for u in candidates if all(_add(v, u) in x.points for v in se.points)
    )
    assert by_translates == by_containment, "erosion formulas disagree"
    return PointSet(dim, by_containment)


def distributed_dilation(a: PointSet, b: PointSet, x: PointSet) -> PointSet:
    """Pooled dilation of two structuring elements: dilation by their
    intersection."""
    _same_dim(a, b, x)
    return dilate(intersection(a, b), x)


def oplus_law_rhs(x: PointSet, a: PointSet, b: PointSet, *, max_subset: int = 20) -> PointSet:
    """Literal subset-enumeration side of the intersection law:
    intersect, over every subset y of x, (y + a) union ((x minus y) + b)."""
    dim = _same_dim(x, a, b)
    pts = x.sorted_points()
    if len(pts) > max_subset:
        raise TooLarge(f"2^{len(pts)} subsets exceeds the cap of 2^{max_subset}")
    acc: frozenset[Vector] | None = None
    for r in range(len(pts) + 1):
        for chosen in itertools.combinations(pts, r):
            y = PointSet(dim, frozenset(chosen))
            rest = PointSet(dim, x.points - y.points)
            term = minkowski_sum(y, a).points | minkowski_sum(rest, b).points
            acc = term if acc is None else acc & term
    return PointSet(dim, acc if acc is not None else frozenset())


def scale(r: int, x: PointSet) -> PointSet:
    """Scalar multiple of every vector in the set."""
    return PointSet(x.dim, frozenset(tuple(r * c for c in p) for p in x.points))


def origin(dim: int) -> PointSet:
    return PointSet(dim, frozenset({(0,) * dim}))


# -- finite-module bridge to the abstract theory ------------------------------------


@dataclass
class SmallModuleReport:
    pairs_checked: int
    mismatches: list[tuple[int, int]]
    lattice: FiniteLattice

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        if self.ok:
            return (
                f"pooled dilation equals intersected-brush dilation on all "
                f"{self.pairs_checked} structuring-element pairs"
            )
        a, b = self.mismatches[0]
        return (
            f"{len(self.mismatches)} mismatching pairs out of {self.pairs_checked}; "
            f"first masks ({a:04b}, {b:04b})"
        )


def theorem_check_small_module() -> SmallModuleReport:
    """Cross-module consistency check on the 2x2 torus grid.

    The carrier is the four-point module with per-coordinate addition mod
    2, so the powerset lattice (ordered by inclusion: join is union and
    the empty set is the bottom) is finite and the enumeration oracle
    applies.  For every pair of structuring elements the oracle meet of
    their dilations must be the dilation by the intersection.
    """
    module = [(0, 0), (0, 1), (1, 0), (1, 1)]
    index = {p: i for i, p in enumerate(module)}
    n_masks = 1 << len(module)
    lattice = powerset_lattice([f"({r},{c})" for r, c in module])

    def add_mod2(u, v):
        return ((u[0] + v[0]) % 2, (u[1] + v[1]) % 2)

    def dilation_images(se_mask: int) -> tuple[int, ...]:
        se = [module[i] for i in range(4) if se_mask >> i & 1]
        images = []
        for x_mask in range(n_masks):
            xs = [module[i] for i in range(4) if x_mask >> i & 1]
            out = 0
            for u in xs:
                for v in se:
                    out |= 1 << index[add_mod2(u, v)]
            images.append(out)
        return tuple(images)

    dilations = [SpaceFunction(lattice, dilation_images(m)) for m in range(n_masks)]
    mismatches = []
    pairs = 0
    for a_mask in range(n_masks):
        for b_mask in range(n_masks):
            pairs += 1
            pooled = function_meet_oracle(lattice, [dilations[a_mask], dilations[b_mask]])
            if pooled.images != dilations[a_mask & b_mask].images:
                mismatches.append((a_mask, b_mask))
    return SmallModuleReport(pairs, mismatches, lattice)
