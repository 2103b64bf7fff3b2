"""Deterministic invariant suite behind the `selfcheck` CLI command.

Every property prints one PASS/FAIL line; random instances are drawn
from a seeded generator so runs are reproducible, and the seed is part
of the output.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable

from . import distributed, epistemic, morphology
from .lattice import fixtures, powerset_lattice, random_distributive_lattice
from .spaces import (
    Scs,
    SpaceFunction,
    agent_projection,
    bottom_function,
    classify,
    enumerate_space_functions,
    function_leq,
    function_meet_oracle,
    pointwise_join,
    pointwise_meet_raw,
    random_space_function,
    top_function,
    validate_space_function,
)

DEFAULT_SEED = 7


def _fixture_scs_m2() -> Scs:
    m2 = fixtures()["M2"]
    swap = SpaceFunction(m2, (0, 2, 1, 3))
    collapse = SpaceFunction(m2, (0, 3, 2, 3))
    return Scs(m2, {"1": swap, "2": collapse})


def check_lattice_axioms(_rng) -> tuple[bool, str]:
    for name, lat in fixtures().items():
        jt, mt, leq = lat.join_table, lat.meet_table, lat.leq
        for a in range(lat.n):
            for b in range(lat.n):
                j, m = jt[a, b], mt[a, b]
                if not (leq[a, j] and leq[b, j] and leq[m, a] and leq[m, b]):
                    return False, f"{name}: bound laws fail at ({a},{b})"
                if jt[a, mt[a, b]] != a or mt[a, jt[a, b]] != a:
                    return False, f"{name}: absorption fails at ({a},{b})"
        if lat.join_of([]) != lat.bottom_id or lat.meet_of([]) != lat.top_id:
            return False, f"{name}: empty join/meet conventions broken"
    return True, "bounds, absorption, empty join/meet on all fixtures"


def check_subtraction_laws(_rng) -> tuple[bool, str]:
    lats = {
        "M2": fixtures()["M2"],
        "chain3": fixtures()["chain3"],
        "powerset3": powerset_lattice(["a", "b", "c"]),
    }
    for name, lat in lats.items():
        assert lat.is_distributive
        for c in range(lat.n):
            for d in range(lat.n):
                e = lat.subtract(d, c)
                if lat.join_of([c, e]) != lat.join_of([c, d]):
                    return False, f"{name}: residual law fails at ({c},{d})"
                if not lat.leq[e, d]:
                    return False, f"{name}: subtraction above its argument at ({c},{d})"
                if (e == lat.bottom_id) != bool(lat.leq[d, c]):
                    return False, f"{name}: emptiness law fails at ({c},{d})"
    return True, "residual laws on M2, chain3, powerset(3)"


def check_distributivity_verdicts(_rng) -> tuple[bool, str]:
    fx = fixtures()
    want = {"M2": True, "M3": False, "N5": False, "herbrand-xy-ab": False, "chain3": True}
    for name, flag in want.items():
        if fx[name].is_distributive != flag:
            return False, f"{name}: expected distributive={flag}"
    for k in range(5):
        if not powerset_lattice([f"g{i}" for i in range(k)]).is_distributive:
            return False, f"powerset({k}) reported non-distributive"
    return True, "fixture verdicts and powerset(0..4)"


def check_m2_delta_table(_rng) -> tuple[bool, str]:
    scs = _fixture_scs_m2()
    lat = scs.lattice
    want = (0, 2, 0, 2)  # bottom, not-p, bottom, not-p
    f, g = scs.agent("1"), scs.agent("2")
    results = {
        "pair": distributed.delta_pair(lat, f, g).images,
        "subtract": distributed.delta_pair_subtract(lat, f, g).images,
        "direct": tuple(
            distributed.delta_tuples_direct(scs, ["1", "2"], c) for c in range(lat.n)
        ),
        "oracle": function_meet_oracle(lat, [f, g]).images,
    }
    for how, got in results.items():
        if got != want:
            return False, f"{how} method yields {got}, expected {want}"
    return True, "two-agent pooled table agreed across all four methods"


def check_m2_raw_meet_fails(_rng) -> tuple[bool, str]:
    scs = _fixture_scs_m2()
    raw = pointwise_meet_raw([scs.agent("1"), scs.agent("2")])
    violation = validate_space_function(scs.lattice, raw)
    if violation is None:
        return False, "point-wise meet unexpectedly satisfied the axioms"
    if violation.axiom != "S.2" or set(violation.witness) != {1, 2}:
        return False, f"unexpected violation {violation}"
    return True, "point-wise meet breaks join preservation at (p, ¬p)"


def check_oracle_equivalence(rng) -> tuple[bool, str]:
    for trial in range(25):
        lat = random_distributive_lattice(rng)
        fs = [random_space_function(lat, rng) for _ in range(rng.randint(2, 3))]
        scs = Scs(lat, {str(i + 1): f for i, f in enumerate(fs)})
        names = sorted(scs.agents)
        exact = function_meet_oracle(lat, fs).images
        for method in ("tuple", "subtract"):
            got = distributed.delta_group(scs, names, method=method).images
            if got != exact:
                return False, f"trial {trial}: {method} disagrees with the oracle"
        for c in range(lat.n):
            if distributed.delta_tuples_direct(scs, names, c) != exact[c]:
                return False, f"trial {trial}: direct tuples disagree at element {c}"
    return True, "tuple, subtract, direct and oracle agree on 25 random lattices"


def check_gdc(rng) -> tuple[bool, str]:
    lat = powerset_lattice(["a", "b", "c"])
    scs = Scs(lat, {str(i + 1): random_space_function(lat, rng) for i in range(3)})
    family = distributed.DeltaFamily(scs)
    for r in range(4):
        for combo in itertools.combinations(sorted(scs.agents), r):
            family.get(combo)
    report = distributed.verify_gdc(scs, family)
    if not report.ok:
        return False, str(report)
    bogus = dict(family.cache)
    bogus[frozenset(["1", "2", "3"])] = bottom_function(lat)
    bad = distributed.verify_gdc(scs, bogus)
    if bad.ok or not any("maximality" in f for f in bad.failures):
        return False, "constant-bottom family was not caught by the maximality check"
    return True, str(report)


def check_agent_galois(_rng) -> tuple[bool, str]:
    for name in ("M2", "M3", "chain3"):
        lat = fixtures()[name]
        for f in enumerate_space_functions(lat):
            for c in range(lat.n):
                proj = agent_projection(f, c)
                for e in range(lat.n):
                    if bool(lat.leq[f.images[e], c]) != bool(lat.leq[e, proj]):
                        return False, f"{name}: adjunction fails at (c={c}, e={e})"
    return True, "agent-level adjunction exhaustive on M2, M3, chain3"


def check_group_galois(rng) -> tuple[bool, str]:
    cases = [_fixture_scs_m2()]
    lat3 = powerset_lattice(["a", "b", "c"])
    cases.append(Scs(lat3, {str(i + 1): random_space_function(lat3, rng) for i in range(2)}))
    for scs in cases:
        lat = scs.lattice
        names = sorted(scs.agents)
        dfun = distributed.delta_group(scs, names)
        for c in range(lat.n):
            proj = distributed.group_projection(scs, names, c)
            joinp = distributed.join_projection(scs, names, c)
            if not lat.leq[joinp, proj]:
                return False, "group projection below join projection"
            for e in range(lat.n):
                if bool(lat.leq[dfun.images[e], c]) != bool(lat.leq[e, proj]):
                    return False, f"group adjunction fails at (c={c}, e={e})"
    return True, "group-level adjunction on M2 and powerset(3)"


def check_projection_monotone(rng) -> tuple[bool, str]:
    scs = _fixture_scs_m2()
    lat = scs.lattice
    groups = [[], ["1"], ["2"], ["1", "2"]]
    for small, large in itertools.combinations(groups, 2):
        if not set(small) <= set(large):
            continue
        for c in range(lat.n):
            a = distributed.group_projection(scs, small, c)
            b = distributed.group_projection(scs, large, c)
            if not lat.leq[a, b]:
                return False, f"projection shrank from {small} to {large} at {c}"
    return True, "group projections grow with the group on M2"


def check_kripke_equivalence(rng) -> tuple[bool, str]:
    for trial in range(25):
        models = epistemic.random_kripke_models(rng)
        ks = epistemic.kripke_to_scs(models)
        agents = sorted(ks.scs.agents)
        for r in range(1, len(agents) + 1):
            for group in itertools.combinations(agents, r):
                dfun = ks.delta(group)
                for mask in range(1 << len(ks.pointed)):
                    members = ks.set_of(mask)
                    want = epistemic.kripke_dk(models, group, members)
                    if ks.set_of(dfun.images[mask]) != want:
                        return False, f"trial {trial}: group {group} differs at {mask}"
    return True, "pooled space equals relation-intersection knowledge, 25 model sets"


def check_aumann_equivalence(rng) -> tuple[bool, str]:
    for trial in range(25):
        struct = epistemic.random_aumann(rng)
        ascs = epistemic.aumann_to_scs(struct)
        agents = sorted(ascs.scs.agents)
        for f in ascs.scs.agents.values():
            kind = classify(f)
            if not (kind.idempotent and kind.extensive):
                return False, f"trial {trial}: knowledge map is not a closure operator"
        for r in range(1, len(agents) + 1):
            for group in itertools.combinations(agents, r):
                dfun = distributed.delta_group(ascs.scs, group)
                for mask in range(1 << len(struct.states)):
                    event = ascs.set_of(mask)
                    want = epistemic.aumann_dk(struct, group, event)
                    if ascs.set_of(dfun.images[mask]) != want:
                        return False, f"trial {trial}: group {group} differs at {mask}"
    return True, "pooled space equals block-intersection knowledge, 25 structures"


def _random_pointset(rng, dim: int, max_size: int = 5, span: int = 3) -> morphology.PointSet:
    pts = frozenset(
        tuple(rng.randint(-span, span) for _ in range(dim))
        for _ in range(rng.randint(0, max_size))
    )
    return morphology.PointSet(dim, pts)


def check_minkowski_monoid(rng) -> tuple[bool, str]:
    for dim in (1, 2):
        ident = morphology.origin(dim)
        empty = morphology.PointSet(dim, frozenset())
        for _ in range(50):
            a, b, c = (_random_pointset(rng, dim) for _ in range(3))
            s = morphology.minkowski_sum
            if s(a, b) != s(b, a):
                return False, "sum not commutative"
            if s(s(a, b), c) != s(a, s(b, c)):
                return False, "sum not associative"
            if s(a, ident) != a or s(a, empty) != empty:
                return False, "identity/zero laws fail"
            if s(c, morphology.union(a, b)) != morphology.union(s(c, a), s(c, b)):
                return False, "sum does not distribute over union"
    return True, "monoid and union-distribution laws, 100 random triples"


def check_morphology_galois(rng) -> tuple[bool, str]:
    for dim in (1, 2):
        for _ in range(50):
            se = _random_pointset(rng, dim, max_size=3)
            if not se.points:
                se = morphology.origin(dim)
            x = _random_pointset(rng, dim)
            y = _random_pointset(rng, dim)
            lhs = morphology.dilate(se, x).points <= y.points
            rhs = x.points <= morphology.erode(se, y).points
            if lhs != rhs:
                return False, f"adjunction fails for se={se}, x={x}, y={y}"
            if not x.points <= morphology.erode(se, morphology.dilate(se, x)).points:
                return False, "unit of the adjunction fails"
    return True, "dilation/erosion adjunction, 100 random instances"


def check_oplus_law(rng) -> tuple[bool, str]:
    x1 = morphology.PointSet.of(1, [0, 1])
    a1 = morphology.PointSet.of(1, [1])
    b1 = morphology.PointSet.of(1, [2])
    if morphology.distributed_dilation(a1, b1, x1).points != frozenset():
        return False, "1-d instance: pooled dilation is not empty"
    if morphology.oplus_law_rhs(x1, a1, b1).points != frozenset():
        return False, "1-d instance: subset enumeration is not empty"
    for _ in range(50):
        x = _random_pointset(rng, 2, max_size=5)
        a = _random_pointset(rng, 2, max_size=4)
        b = _random_pointset(rng, 2, max_size=4)
        if morphology.distributed_dilation(a, b, x) != morphology.oplus_law_rhs(x, a, b):
            return False, f"law fails for x={x}, a={a}, b={b}"
    return True, "intersection law on the 1-d instance and 50 random triples"


def check_small_module(_rng) -> tuple[bool, str]:
    report = morphology.theorem_check_small_module()
    return report.ok, report.summary()


def check_tuple_formula_survey(_rng) -> tuple[bool, str]:
    fx = fixtures()
    lines = []
    for name in ("M3", "N5"):
        survey = distributed.survey_tuple_formula(fx[name], name)
        if not survey.monotone_everywhere:
            return False, f"{name}: pair formula produced a non-monotone map"
        lines.append(survey.summary())
    return True, " | ".join(lines)


def check_function_lattice(rng) -> tuple[bool, str]:
    for name in ("M2", "M3"):
        lat = fixtures()[name]
        fs = enumerate_space_functions(lat)
        lo, hi = bottom_function(lat), top_function(lat)
        for f in fs:
            if not (function_leq(lo, f) and function_leq(f, hi)):
                return False, f"{name}: extremes are not extreme"
        for _ in range(20):
            f, g = rng.choice(fs), rng.choice(fs)
            j = pointwise_join([f, g])
            if not (function_leq(f, j) and function_leq(g, j)):
                return False, f"{name}: point-wise join is not an upper bound"
    return True, "function-lattice extremes and joins on M2, M3"


CHECKS: list[tuple[str, Callable]] = [
    ("lattice-axioms", check_lattice_axioms),
    ("subtraction-laws", check_subtraction_laws),
    ("distributivity-verdicts", check_distributivity_verdicts),
    ("function-lattice", check_function_lattice),
    ("two-agent-delta-table", check_m2_delta_table),
    ("raw-meet-not-a-space", check_m2_raw_meet_fails),
    ("oracle-equivalence", check_oracle_equivalence),
    ("distribution-candidate-axioms", check_gdc),
    ("agent-galois", check_agent_galois),
    ("group-galois", check_group_galois),
    ("projection-monotone", check_projection_monotone),
    ("kripke-distributed-knowledge", check_kripke_equivalence),
    ("aumann-distributed-knowledge", check_aumann_equivalence),
    ("minkowski-monoid", check_minkowski_monoid),
    ("morphology-galois", check_morphology_galois),
    ("minkowski-intersection-law", check_oplus_law),
    ("small-module-bridge", check_small_module),
    ("tuple-formula-survey", check_tuple_formula_survey),
]


def run_selfcheck(seed: int = DEFAULT_SEED, emit=print) -> int:
    emit(f"selfcheck seed={seed}")
    failures = 0
    for name, check in CHECKS:
        rng = random.Random(f"{seed}:{name}")
        try:
            ok, detail = check(rng)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        emit(f"{status} {name}: {detail}")
    emit(f"{len(CHECKS) - failures}/{len(CHECKS)} properties hold")
    return 0 if failures == 0 else 1
