"""Distributed spaces: greatest space functions below a group's agents.

Three mutually checking computations are provided: the pair/tuple
formula (meet over all information combinations deriving each element,
valid on distributive lattices), the subtraction recursion (same value
through the residual), and the enumeration oracle (exact on every
finite lattice).  Group and join projections are the adjoint side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .errors import NotDistributive, TooLarge
from .lattice import FiniteLattice
from .spaces import (
    AxiomViolation,
    Scs,
    SpaceFunction,
    agent_projection,
    enumerate_space_functions,
    function_meet_oracle,
    top_function,
    validate_space_function,
)

DEFAULT_MAX_TUPLES = 10**7

METHODS = ("tuple", "subtract", "oracle")


def _require_distributive(lattice: FiniteLattice) -> None:
    ok, witness = lattice.distributivity()
    if not ok:
        a, b, c = (lattice.labels[x] for x in witness)
        raise NotDistributive(
            f"lattice is not distributive (witness triple {a!r}, {b!r}, {c!r}); "
            "use the oracle method or the raw pair formula"
        )


def pair_formula_images(lattice: FiniteLattice, f_images, g_images) -> list[int]:
    """Raw pair formula: for each c, the meet of f(a) join g(b) over all
    pairs whose join derives c.

    Computable on any lattice; it equals the function meet only on
    distributive ones.  Pairs are grouped by their join value x, whose
    group meets are then combined over the up-set of each c.
    """
    n = lattice.n
    jt = lattice.join_table
    down = lattice.down_packed
    lookup = lattice.down_packed_lookup
    fa = np.asarray(f_images, dtype=np.int32)
    gb = np.asarray(g_images, dtype=np.int32)
    fg = jt[np.ix_(fa, gb)]

    flat_join = jt.ravel()
    flat_val = fg.ravel()
    order = np.argsort(flat_join, kind="stable")
    sorted_join = flat_join[order]
    sorted_val = flat_val[order]
    starts = np.searchsorted(sorted_join, np.arange(n), side="left")
    ends = np.searchsorted(sorted_join, np.arange(n), side="right")

    group_meet = np.empty((n, down.shape[1]), dtype=down.dtype)
    for x in range(n):  # (x, x) joins to x, so every group is non-empty
        group_meet[x] = np.bitwise_and.reduce(down[sorted_val[starts[x] : ends[x]]], axis=0)

    images = []
    leq = lattice.leq
    for c in range(n):
        acc = np.bitwise_and.reduce(group_meet[leq[c]], axis=0)
        images.append(lookup[acc.tobytes()])
    return images


def delta_pair_raw(
    lattice: FiniteLattice, f: SpaceFunction, g: SpaceFunction
) -> tuple[list[int], AxiomViolation | None]:
    """Research entry point: pair formula on an arbitrary lattice.

    Returns the raw images together with the validation verdict (None
    when the result happens to satisfy the space axioms).
    """
    images = pair_formula_images(lattice, f.images, g.images)
    return images, validate_space_function(lattice, images)


def delta_pair(lattice: FiniteLattice, f: SpaceFunction, g: SpaceFunction) -> SpaceFunction:
    """Meet of two space functions in the function lattice (distributive case)."""
    _require_distributive(lattice)
    return SpaceFunction(lattice, tuple(pair_formula_images(lattice, f.images, g.images)))


def delta_pair_subtract(
    lattice: FiniteLattice, f: SpaceFunction, g: SpaceFunction
) -> SpaceFunction:
    """Same function as delta_pair, through the subtraction recursion:
    for each c, the meet of f(a) join g(c minus a) over a below c."""
    _require_distributive(lattice)
    sub = lattice.subtract_table
    join = lattice.join_rows
    meet = lattice.meet_rows
    fi, gi = f.images, g.images
    images = []
    for c in range(lattice.n):
        acc = lattice.top_id
        for a in lattice.down_ids(c):
            acc = meet[acc][join[fi[a]][gi[sub[c][a]]]]
        images.append(acc)
    return SpaceFunction(lattice, tuple(images))


def delta_tuples_direct(
    scs: Scs,
    group,
    c: int,
    *,
    max_tuples: int = DEFAULT_MAX_TUPLES,
) -> int:
    """Literal tuple-formula value at one element, by full enumeration.

    Meet over every |group|-tuple of elements whose join derives c of the
    join of the agents' images.  Exponential; the small-size oracle for
    delta_group.
    """
    names = scs.group(group)
    lattice = scs.lattice
    c = lattice.check_id(c)
    n = lattice.n
    m = len(names)
    if n**m > max_tuples:
        raise TooLarge(f"{n}^{m} tuples exceeds the cap of {max_tuples}")
    images = [scs.agent(name).images for name in names]
    join = lattice.join_rows
    meet = lattice.meet_rows
    leq = lattice.leq_rows
    bot = lattice.bottom_id
    acc = lattice.top_id
    for assignment in itertools.product(range(n), repeat=m):
        joined = bot
        for a in assignment:
            joined = join[joined][a]
        if not leq[c][joined]:
            continue
        value = bot
        for k in range(m):
            value = join[value][images[k][assignment[k]]]
        acc = meet[acc][value]
        if acc == bot:
            break
    return acc


def delta_general(
    lattice: FiniteLattice,
    fs: Sequence[SpaceFunction],
    *,
    max_candidates: int | None = None,
) -> SpaceFunction:
    """Exact distributed space on arbitrary finite lattices (oracle route)."""
    return function_meet_oracle(lattice, list(fs), max_candidates=max_candidates)


@dataclass
class DeltaFamily:
    """Write-once cache of distributed spaces, keyed by agent-name set."""

    scs: Scs
    method: str = "tuple"
    cache: dict[frozenset, SpaceFunction] = field(default_factory=dict)

    def get(self, group) -> SpaceFunction:
        return delta_group(self.scs, group, method=self.method, family=self)


def delta_group(
    scs: Scs,
    group,
    method: str = "tuple",
    *,
    family: DeltaFamily | None = None,
) -> SpaceFunction:
    """Distributed space of a group of agents.

    The empty group gets the least space; a singleton gets the agent's own
    function; larger groups left-fold the pairwise meet over the agents in
    canonical (sorted) name order, which is sound because the meet is
    associative and commutative in the function lattice.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    names = scs.group(group)
    key = frozenset(names)
    if family is not None and key in family.cache:
        return family.cache[key]

    lattice = scs.lattice
    if not names:
        result = top_function(lattice)
    elif len(names) == 1:
        result = scs.agent(names[0])
    elif method == "oracle":
        result = delta_general(lattice, [scs.agent(x) for x in names])
    else:
        step = delta_pair if method == "tuple" else delta_pair_subtract
        result = reduce(
            lambda acc, name: step(lattice, acc, scs.agent(name)),
            names[1:],
            scs.agent(names[0]),
        )
    if family is not None:
        family.cache[key] = result
    return result


# -- projections ----------------------------------------------------------------


def join_projection(scs: Scs, group, c: int) -> int:
    """Join of the individual agent projections: what the group derives
    by pooling each member's separately extracted information."""
    names = scs.group(group)
    c = scs.lattice.check_id(c)
    return scs.lattice.join_of([agent_projection(scs.agent(i), c) for i in names])


def group_projection(scs: Scs, group, c: int, method: str = "tuple") -> int:
    """Join of every element the group's distributed space derives from c."""
    lattice = scs.lattice
    c = lattice.check_id(c)
    dfun = delta_group(scs, group, method=method)
    img = np.asarray(dfun.images, dtype=np.int32)
    derivable = np.nonzero(lattice.leq[img, c])[0]
    return lattice.join_of(derivable)


# -- distribution-candidate verification ------------------------------------------


@dataclass
class GdcReport:
    ok: bool
    failures: list[str]
    checked_subsets: int
    maximality_checked: bool

    def __str__(self) -> str:
        if self.ok:
            extra = " incl. maximality" if self.maximality_checked else ""
            return f"gdc ok over {self.checked_subsets} groups{extra}"
        return "gdc FAILED: " + "; ".join(self.failures)


def verify_gdc(
    scs: Scs,
    family: Mapping | DeltaFamily,
    *,
    max_agents: int = 5,
    check_maximality: bool = True,
    max_candidates: int | None = None,
) -> GdcReport:
    """Check the distribution-candidate axioms on a family of functions.

    D.1 each member is a space function; D.2 singleton members equal the
    agent functions; D.3 members shrink as groups grow.  When requested,
    each member is also compared against the enumeration oracle for
    maximality.  Expects a family entry for every subset of the agents.
    """
    if len(scs.agents) > max_agents:
        raise TooLarge(f"{len(scs.agents)} agents exceeds the cap of {max_agents}")
    cache = family.cache if isinstance(family, DeltaFamily) else dict(family)
    entries: dict[frozenset, object] = {frozenset(k): v for k, v in cache.items()}
    lattice = scs.lattice
    failures: list[str] = []

    names = sorted(scs.agents)
    subsets = [
        frozenset(combo)
        for r in range(len(names) + 1)
        for combo in itertools.combinations(names, r)
    ]
    missing = [s for s in subsets if s not in entries]
    if missing:
        failures.append(f"family has no entry for group {sorted(missing[0])}")
        return GdcReport(False, failures, 0, False)

    def images_of(value) -> tuple[int, ...]:
        if isinstance(value, SpaceFunction):
            return value.images
        return tuple(int(x) for x in value)

    # D.1
    for key in subsets:
        violation = validate_space_function(lattice, images_of(entries[key]))
        if violation is not None:
            failures.append(
                f"D.1 fails for group {sorted(key)}: {violation.describe(lattice)}"
            )
            break
    # D.2
    if not failures:
        for name in names:
            if images_of(entries[frozenset([name])]) != scs.agent(name).images:
                failures.append(f"D.2 fails: entry for [{name!r}] is not the agent function")
                break
    # D.3
    if not failures:
        leq = lattice.leq
        for small, large in itertools.combinations(subsets, 2):
            if small <= large:
                a = images_of(entries[small])
                b = images_of(entries[large])
                if not all(leq[y, x] for x, y in zip(a, b)):
                    failures.append(
                        f"D.3 fails: entry for {sorted(large)} is not below entry "
                        f"for {sorted(small)}"
                    )
                    break

    maximality_checked = False
    if not failures and check_maximality:
        try:
            for key in subsets:
                exact = function_meet_oracle(
                    lattice, [scs.agent(i) for i in sorted(key)], max_candidates=max_candidates
                )
                if images_of(entries[key]) != exact.images:
                    failures.append(
                        f"maximality fails for group {sorted(key)}: entry differs "
                        "from the enumerated meet"
                    )
                    break
            else:
                maximality_checked = True
        except TooLarge:
            maximality_checked = False

    return GdcReport(not failures, failures, len(subsets), maximality_checked)


# -- survey of the pair formula on non-distributive lattices -----------------------


@dataclass
class TupleFormulaSurvey:
    """Outcome of scanning every space-function pair with the pair formula."""

    lattice_name: str
    function_count: int
    pair_count: int
    monotone_everywhere: bool
    violations: list[tuple[SpaceFunction, SpaceFunction, list[int], AxiomViolation]]

    @property
    def found_counterexample(self) -> bool:
        return bool(self.violations)

    def summary(self) -> str:
        head = (
            f"{self.lattice_name}: {self.function_count} space functions, "
            f"{self.pair_count} pairs scanned; pair formula monotone on all pairs: "
            f"{self.monotone_everywhere}"
        )
        if not self.violations:
            return head + "; no pair makes the formula violate the space axioms"
        f, g, images, violation = self.violations[0]
        lat = f.lattice
        arrows = ", ".join(
            f"{lat.labels[i]}→{lat.labels[y]}" for i, y in enumerate(images)
        )
        return (
            head
            + f"; {len(self.violations)} violating pair(s); first: f={f!r}, g={g!r}, "
            + f"formula=({arrows}) {violation.describe(lat)}"
        )


def survey_tuple_formula(
    lattice: FiniteLattice,
    name: str = "lattice",
    *,
    max_candidates: int | None = None,
) -> TupleFormulaSurvey:
    """Apply the raw pair formula to every unordered pair of space functions.

    Records every pair whose formula output breaks the space axioms (such
    pairs witness that distributivity is needed for the formula to compute
    function meets) and whether the output stayed monotone throughout.
    """
    fs = enumerate_space_functions(lattice, max_candidates=max_candidates)
    violations = []
    monotone = True
    pair_count = 0
    leq = lattice.leq
    for i in range(len(fs)):
        for j in range(i, len(fs)):
            pair_count += 1
            images = pair_formula_images(lattice, fs[i].images, fs[j].images)
            img = np.asarray(images, dtype=np.int32)
            if (leq & ~leq[np.ix_(img, img)]).any():
                monotone = False
            violation = validate_space_function(lattice, images)
            if violation is not None:
                violations.append((fs[i], fs[j], images, violation))
    return TupleFormulaSurvey(name, len(fs), pair_count, monotone, violations)
