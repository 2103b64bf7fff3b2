"""Finite complete lattices with precomputed join/meet tables.

Element identity is a dense integer id; labels appear only at I/O
boundaries.  The order relation follows the information-order
convention: the bottom element plays the role of "true" (empty
information) and the top element the role of "false" (inconsistent
information).  Validation is eager: a constructed lattice has been
checked exhaustively, so every later query may assume a valid lattice.
Instances are immutable after construction (derived tables are cached
lazily but idempotently), so unsynchronized concurrent reads are safe.
"""

from __future__ import annotations

import itertools
import json
from functools import reduce

import numpy as np

from .errors import InvalidElement, NotALattice, NotAntisymmetric, TooLarge

DEFAULT_MAX_ELEMENTS = 4096


def _pack_rows(mat: np.ndarray) -> np.ndarray:
    """Pack each boolean row into bytes for fast hashing/intersection."""
    return np.packbits(mat.astype(np.uint8), axis=1)


class FiniteLattice:
    """A validated finite complete lattice.

    Attributes:
        labels: element labels, indexed by element id.
        leq: read-only boolean matrix, leq[a, b] iff a is below b.
        join_table, meet_table: int matrices of pairwise lubs/glbs.
        bottom_id, top_id: ids of the least and greatest elements.
    """

    def __init__(self, labels, leq, *, max_elements: int = DEFAULT_MAX_ELEMENTS):
        labels = tuple(str(x) for x in labels)
        n = len(labels)
        if n == 0:
            raise NotALattice("a lattice needs at least one element")
        if n > max_elements:
            raise TooLarge(f"{n} elements exceeds the cap of {max_elements}")
        if len(set(labels)) != n:
            raise InvalidElement("element labels must be distinct")
        leq = np.asarray(leq, dtype=bool)
        if leq.shape != (n, n):
            raise NotALattice(f"order relation must be {n}x{n}, got {leq.shape}")

        if not leq[np.diag_indices(n)].all():
            raise NotAntisymmetric("order relation is not reflexive")
        sym = leq & leq.T
        if int(sym.sum()) != n:
            a, b = map(int, np.argwhere(sym & ~np.eye(n, dtype=bool))[0])
            raise NotAntisymmetric(
                f"cycle through {labels[a]!r} and {labels[b]!r}"
            )
        closure = (leq.astype(np.uint32) @ leq.astype(np.uint32)) > 0
        if (closure & ~leq).any():
            a, b = map(int, np.argwhere(closure & ~leq)[0])
            raise NotALattice(
                f"order relation is not transitive at ({labels[a]!r}, {labels[b]!r})"
            )

        leq = leq.copy()
        leq.flags.writeable = False
        self.labels = labels
        self.leq = leq
        self.n = n
        self._label_to_id = {lab: i for i, lab in enumerate(labels)}

        self.join_table = self._bound_table(leq, "least upper")
        self.meet_table = self._bound_table(leq.T.copy(), "greatest lower")
        self.bottom_id = self._extreme(least=True)
        self.top_id = self._extreme(least=False)

        self._is_distributive: bool | None = None
        self._distributivity_witness: tuple[int, int, int] | None = None
        self._subtract_table: np.ndarray | None = None
        self._caches: dict[str, object] = {}

    # -- construction helpers ------------------------------------------------

    def _bound_table(self, above: np.ndarray, kind: str) -> np.ndarray:
        """Table of unique least upper bounds w.r.t. the rows of `above`.

        above[x] is the set of elements weakly above x; the lub of {a, b}
        is the unique element whose above-set equals above[a] & above[b].
        Called with the transposed relation it yields the glb table.
        """
        n = self.n
        packed = _pack_rows(above)
        row_id = {packed[i].tobytes(): i for i in range(n)}
        table = np.zeros((n, n), dtype=np.int32)
        for a in range(n):
            common = packed[a] & packed
            for b in range(a, n):
                key = common[b].tobytes()
                bound = row_id.get(key)
                if bound is None:
                    raise NotALattice(
                        f"pair ({self.labels[a]!r}, {self.labels[b]!r}) has no "
                        f"unique {kind} bound"
                    )
                table[a, b] = table[b, a] = bound
        table.flags.writeable = False
        return table

    def _extreme(self, *, least: bool) -> int:
        counts = self.leq.sum(axis=1 if least else 0)
        ids = np.nonzero(counts == self.n)[0]
        if len(ids) != 1:
            which = "bottom" if least else "top"
            raise NotALattice(f"expected a unique {which} element, found {len(ids)}")
        return int(ids[0])

    # -- basic queries -------------------------------------------------------

    def __repr__(self) -> str:
        return f"FiniteLattice(n={self.n}, bottom={self.labels[self.bottom_id]!r})"

    def check_id(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise InvalidElement(f"element id {x} out of range 0..{self.n - 1}")
        return int(x)

    def id_of(self, label: str) -> int:
        try:
            return self._label_to_id[label]
        except KeyError:
            raise InvalidElement(f"unknown element label {label!r}") from None

    def leq_ids(self, a: int, b: int) -> bool:
        return bool(self.leq[self.check_id(a), self.check_id(b)])

    def join_of(self, ids) -> int:
        """Least upper bound of a set of ids; the empty join is bottom."""
        ids = [self.check_id(x) for x in ids]
        return reduce(lambda a, b: int(self.join_table[a, b]), ids, self.bottom_id)

    def meet_of(self, ids) -> int:
        """Greatest lower bound of a set of ids; the empty meet is top."""
        ids = [self.check_id(x) for x in ids]
        return reduce(lambda a, b: int(self.meet_table[a, b]), ids, self.top_id)

    def up_ids(self, x: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.leq[self.check_id(x)])[0]]

    def down_ids(self, x: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.leq[:, self.check_id(x)])[0]]

    # -- cached derived structure ---------------------------------------------

    def _cached(self, key: str, make):
        if key not in self._caches:
            self._caches[key] = make()
        return self._caches[key]

    @property
    def cover(self) -> np.ndarray:
        """cover[a, b] iff b covers a (a strictly below b, nothing between)."""

        def make():
            lt = self.leq & ~np.eye(self.n, dtype=bool)
            between = (lt.astype(np.uint32) @ lt.astype(np.uint32)) > 0
            c = lt & ~between
            c.flags.writeable = False
            return c

        return self._cached("cover", make)

    @property
    def irreducibles(self) -> tuple[int, ...]:
        """Join-irreducible elements: exactly one lower cover."""

        def make():
            counts = self.cover.sum(axis=0)
            return tuple(int(i) for i in range(self.n) if counts[i] == 1)

        return self._cached("irreducibles", make)

    @property
    def join_rows(self) -> list[list[int]]:
        return self._cached("join_rows", lambda: self.join_table.tolist())

    @property
    def meet_rows(self) -> list[list[int]]:
        return self._cached("meet_rows", lambda: self.meet_table.tolist())

    @property
    def leq_rows(self) -> list[list[bool]]:
        return self._cached("leq_rows", lambda: self.leq.tolist())

    @property
    def down_packed(self) -> np.ndarray:
        """down_packed[x]: packed bitset of elements weakly below x."""

        def make():
            packed = _pack_rows(self.leq.T.copy())
            packed.flags.writeable = False
            return packed

        return self._cached("down_packed", make)

    @property
    def down_packed_lookup(self) -> dict[bytes, int]:
        def make():
            packed = self.down_packed
            return {packed[i].tobytes(): i for i in range(self.n)}

        return self._cached("down_lookup", make)

    # -- distributivity and subtraction ---------------------------------------

    def distributivity(self) -> tuple[bool, tuple[int, int, int] | None]:
        """Triple-scan distributivity test; returns (flag, witness or None).

        The witness (a, b, c) satisfies a one (b meet c) != (a one b) meet
        (a one c).  Cached after the first call.
        """
        if self._is_distributive is None:
            jt, mt = self.join_table, self.meet_table
            self._is_distributive = True
            for a in range(self.n):
                lhs = jt[a, mt]
                rhs = mt[np.ix_(jt[a], jt[a])]
                diff = lhs != rhs
                if diff.any():
                    b, c = map(int, np.argwhere(diff)[0])
                    self._is_distributive = False
                    self._distributivity_witness = (a, b, c)
                    break
        return self._is_distributive, self._distributivity_witness

    @property
    def is_distributive(self) -> bool:
        return self.distributivity()[0]

    def subtract(self, d: int, c: int) -> int:
        """Weakest e whose join with c derives d: meet of {e | c join e >= d}.

        Defined on every lattice; the residuation laws are only guaranteed
        on distributive ones.
        """
        d, c = self.check_id(d), self.check_id(c)
        joined = self.join_table[c]
        candidates = np.nonzero(self.leq[d, joined])[0]
        return self.meet_of(candidates)

    @property
    def subtract_table(self) -> np.ndarray:
        """Full n x n table of subtract(d, c), built on first use."""
        if self._subtract_table is None:
            n = self.n
            down = self.down_packed
            lookup = self.down_packed_lookup
            table = np.empty((n, n), dtype=np.int32)
            for c in range(n):
                joined = self.join_table[c]
                mask = self.leq[:, joined]  # mask[d, e]: c join e >= d
                for d in range(n):
                    acc = np.bitwise_and.reduce(down[mask[d]], axis=0)
                    table[d, c] = lookup[acc.tobytes()]
            table.flags.writeable = False
            self._subtract_table = table
        return self._subtract_table

    # -- derived lattices ------------------------------------------------------

    def dual(self) -> "FiniteLattice":
        """The same elements under the reversed order (joins become meets)."""
        return FiniteLattice(self.labels, self.leq.T, max_elements=self.n)

    # -- serialization ----------------------------------------------------------

    def cover_pairs(self) -> list[tuple[str, str]]:
        c = self.cover
        return [
            (self.labels[a], self.labels[b])
            for a in range(self.n)
            for b in range(self.n)
            if c[a, b]
        ]

    def to_json(self) -> dict:
        return {
            "elements": list(self.labels),
            "covers": [[lo, hi] for lo, hi in self.cover_pairs()],
        }

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")

    @classmethod
    def from_json(cls, doc: dict, *, max_elements: int = DEFAULT_MAX_ELEMENTS):
        try:
            labels = doc["elements"]
            covers = [tuple(pair) for pair in doc["covers"]]
        except (KeyError, TypeError) as exc:
            raise InvalidElement(f"malformed lattice document: {exc}") from None
        return build_lattice(labels, covers, max_elements=max_elements)

    @classmethod
    def load(cls, path, *, max_elements: int = DEFAULT_MAX_ELEMENTS):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), max_elements=max_elements)


def build_lattice(labels, covers, *, max_elements: int = DEFAULT_MAX_ELEMENTS) -> FiniteLattice:
    """Build a lattice from its cover relation (pairs of labels, low first).

    The reflexive-transitive closure is computed here; the constructor then
    checks the order axioms and that all pairwise bounds exist and are unique.
    """
    labels = [str(x) for x in labels]
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise InvalidElement("element labels must be distinct")
    n = len(labels)
    leq = np.eye(n, dtype=bool)
    for lo, hi in covers:
        if lo not in index or hi not in index:
            raise InvalidElement(f"cover ({lo!r}, {hi!r}) references unknown labels")
        leq[index[lo], index[hi]] = True
    # Warshall closure; antisymmetry violations surface in the constructor.
    for k in range(n):
        leq |= leq[:, k : k + 1] & leq[k : k + 1, :]
    return FiniteLattice(labels, leq, max_elements=max_elements)


def subset_labels(ground, masks) -> list[str]:
    ground = list(ground)
    out = []
    for mask in masks:
        members = [ground[i] for i in range(len(ground)) if mask >> i & 1]
        out.append("{" + ",".join(members) + "}")
    return out


def powerset_lattice(
    ground,
    *,
    max_ground: int = 16,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> FiniteLattice:
    """Powerset of `ground` ordered by inclusion; join is union.

    Element ids are subset bitmasks over the ground order, so id 0 is the
    empty set (the bottom).
    """
    ground = [str(x) for x in ground]
    if len(set(ground)) != len(ground):
        raise InvalidElement("ground labels must be distinct")
    if len(ground) > max_ground:
        raise TooLarge(f"ground of {len(ground)} exceeds the cap of {max_ground}")
    n = 1 << len(ground)
    if n > max_elements:
        raise TooLarge(f"powerset would have {n} elements, cap is {max_elements}")
    masks = np.arange(n, dtype=np.int64)
    leq = (masks[:, None] & ~masks[None, :]) == 0
    return FiniteLattice(subset_labels(ground, range(n)), leq, max_elements=max_elements)


def chain_lattice(k: int) -> FiniteLattice:
    """The k-element chain 0 < 1 < ... < k-1."""
    if k < 1:
        raise InvalidElement("a chain needs at least one element")
    labels = [str(i) for i in range(k)]
    return build_lattice(labels, [(labels[i], labels[i + 1]) for i in range(k - 1)])


def downset_lattice(poset_leq: np.ndarray, *, max_elements: int = DEFAULT_MAX_ELEMENTS) -> FiniteLattice:
    """Lattice of downward-closed subsets of a poset, ordered by inclusion.

    Always distributive; used to generate distributive test lattices from
    small random posets.
    """
    poset_leq = np.asarray(poset_leq, dtype=bool)
    k = poset_leq.shape[0]
    downsets = []
    for mask in range(1 << k):
        ok = all(
            not (mask >> j & 1) or (mask >> i & 1)
            for i in range(k)
            for j in range(k)
            if poset_leq[i, j]
        )
        if ok:
            downsets.append(mask)
    n = len(downsets)
    arr = np.array(downsets, dtype=np.int64)
    leq = (arr[:, None] & ~arr[None, :]) == 0
    labels = subset_labels([f"e{i}" for i in range(k)], downsets)
    return FiniteLattice(labels, leq, max_elements=max_elements)


_HERBRAND_TERMS = ("x", "y", "a", "b")
_HERBRAND_CONSTANTS = {"a", "b"}


def _herbrand_close(pairs: frozenset) -> frozenset | None:
    """Deductive closure of a set of term equalities; None if inconsistent.

    Closure classes are computed by merging; two distinct constants in one
    class is a contradiction.
    """
    parent = {t: t for t in _HERBRAND_TERMS}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for s, t in pairs:
        parent[find(s)] = find(t)
    classes: dict[str, set[str]] = {}
    for t in _HERBRAND_TERMS:
        classes.setdefault(find(t), set()).add(t)
    for members in classes.values():
        if len(members & _HERBRAND_CONSTANTS) > 1:
            return None
    order = _HERBRAND_TERMS.index
    closed = set()
    for members in classes.values():
        for s, t in itertools.combinations(sorted(members, key=order), 2):
            closed.add((s, t))
    return frozenset(closed)


def herbrand_xy_ab() -> FiniteLattice:
    """Syntactic-equality lattice over variables x, y and constants a, b.

    Elements are deductively closed consistent equality sets plus a single
    inconsistent top; the order is entailment (set inclusion of closures).
    Not distributive.
    """
    all_pairs = [
        (s, t) for s, t in itertools.combinations(sorted(_HERBRAND_TERMS), 2)
    ]
    closures = set()
    for r in range(len(all_pairs) + 1):
        for chosen in itertools.combinations(all_pairs, r):
            closures.add(_herbrand_close(frozenset(chosen)))
    order = _HERBRAND_TERMS.index

    def pair_key(pair):
        return (order(pair[0]), order(pair[1]))

    consistent = sorted(
        (c for c in closures if c is not None),
        key=lambda c: (len(c), sorted(pair_key(p) for p in c)),
    )

    def label(pairs):
        if not pairs:
            return "true"
        return ",".join(f"{s}={t}" for s, t in sorted(pairs, key=pair_key))

    labels = [label(c) for c in consistent] + ["false"]
    n = len(labels)
    leq = np.zeros((n, n), dtype=bool)
    for i, ci in enumerate(consistent):
        for j, cj in enumerate(consistent):
            leq[i, j] = ci <= cj
        leq[i, n - 1] = True
    leq[n - 1, n - 1] = True
    return FiniteLattice(labels, leq)


def random_distributive_lattice(rng, *, max_points: int = 4) -> FiniteLattice:
    """Downset lattice of a seeded random poset on at most `max_points` points."""
    k = rng.randint(1, max_points)
    leq = np.eye(k, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < 0.4:
                leq[i, j] = True
    for m in range(k):  # transitive closure keeps it a partial order
        leq |= leq[:, m : m + 1] & leq[m : m + 1, :]
    return downset_lattice(leq)


def fixtures() -> dict[str, FiniteLattice]:
    """Named canonical lattices used across the test and selfcheck suites."""
    m2 = build_lattice(
        ["p∨¬p", "p", "¬p", "p∧¬p"],
        [("p∨¬p", "p"), ("p∨¬p", "¬p"), ("p", "p∧¬p"), ("¬p", "p∧¬p")],
    )
    m3 = build_lattice(
        ["a", "b", "c", "d", "e"],
        [("a", "b"), ("a", "c"), ("a", "d"), ("b", "e"), ("c", "e"), ("d", "e")],
    )
    n5 = build_lattice(
        ["0", "p", "q", "r", "1"],
        [("0", "p"), ("p", "q"), ("q", "1"), ("0", "r"), ("r", "1")],
    )
    return {
        "M2": m2,
        "M3": m3,
        "N5": n5,
        "herbrand-xy-ab": herbrand_xy_ab(),
        "chain3": chain_lattice(3),
    }
