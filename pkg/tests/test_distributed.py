import itertools
import random

import pytest

import latspace as ls
from latspace.distributed import pair_formula_images
from latspace.errors import NotDistributive, TooLarge, UnknownAgent


def naive_pair_formula(lat, f, g):
    """Independent cubic evaluation of the pair formula."""
    out = []
    for c in range(lat.n):
        acc = lat.top_id
        for a in range(lat.n):
            for b in range(lat.n):
                if lat.leq[c, lat.join_table[a, b]]:
                    val = lat.join_table[f.images[a], g.images[b]]
                    acc = lat.meet_table[acc, val]
        out.append(int(acc))
    return out


FROZEN_M2_TABLE = (0, 2, 0, 2)  # bottom, ¬p, bottom, ¬p


def test_delta_pair_reproduces_the_m2_table(m2_scs):
    got = ls.delta_pair(m2_scs.lattice, m2_scs.agent("1"), m2_scs.agent("2"))
    assert got.images == FROZEN_M2_TABLE
    assert ls.function_leq(got, m2_scs.agent("1"))
    assert ls.function_leq(got, m2_scs.agent("2"))


def test_delta_pair_subtract_matches(m2_scs):
    got = ls.delta_pair_subtract(m2_scs.lattice, m2_scs.agent("1"), m2_scs.agent("2"))
    assert got.images == FROZEN_M2_TABLE


def test_delta_pair_with_least_space_is_identity_of_meet(m2_scs):
    lat = m2_scs.lattice
    f = m2_scs.agent("1")
    assert ls.delta_pair(lat, f, ls.top_function(lat)).images == f.images


def test_delta_pair_idempotent(canonical):
    rng = random.Random(1)
    for _ in range(10):
        lat = ls.random_distributive_lattice(rng)
        f = ls.random_space_function(lat, rng)
        assert ls.delta_pair(lat, f, f).images == f.images


def test_delta_pair_requires_distributive(m3):
    fs = ls.enumerate_space_functions(m3)
    with pytest.raises(NotDistributive):
        ls.delta_pair(m3, fs[0], fs[1])
    with pytest.raises(NotDistributive):
        ls.delta_pair_subtract(m3, fs[0], fs[1])


def test_raw_pair_formula_matches_naive_everywhere(canonical):
    rng = random.Random(2)
    lats = [canonical["M2"], canonical["M3"], canonical["N5"]]
    for _ in range(10):
        lats.append(ls.random_distributive_lattice(rng))
    for lat in lats:
        fs = ls.enumerate_space_functions(lat)
        for _ in range(8):
            f, g = rng.choice(fs), rng.choice(fs)
            assert pair_formula_images(lat, f.images, g.images) == naive_pair_formula(
                lat, f, g
            )


def test_delta_pair_raw_reports_verdict(m3):
    collapse_to_b = ls.SpaceFunction(m3, (0, 1, 1, 1, 1))
    ident = ls.identity_function(m3)
    images, verdict = ls.delta_pair_raw(m3, collapse_to_b, ident)
    assert verdict is not None and verdict.axiom == "S.2"
    # the counterexample shape: both atoms map below their join's image
    c, d = verdict.witness
    jt = m3.join_table
    assert images[jt[c, d]] != jt[images[c], images[d]]


def test_swap_collapse_pair_on_m3_gives_constant_bottom(m3):
    # swap two atoms / send one atom to the top: the formula collapses
    swap_cd = ls.SpaceFunction(m3, (0, 1, 3, 2, 4))
    b_to_top = ls.SpaceFunction(m3, (0, 4, 2, 3, 4))
    images, verdict = ls.delta_pair_raw(m3, swap_cd, b_to_top)
    assert images == [m3.bottom_id] * m3.n
    assert verdict is None  # constantly-bottom IS a space function


# -- group fold --------------------------------------------------------------------


def test_delta_group_empty_is_least_space(m2_scs):
    got = ls.delta_group(m2_scs, [])
    assert got.images == ls.top_function(m2_scs.lattice).images


def test_delta_group_singleton_is_the_agent(m2_scs):
    assert ls.delta_group(m2_scs, ["2"]).images == m2_scs.agent("2").images


def test_delta_group_unknown_agent(m2_scs):
    with pytest.raises(UnknownAgent):
        ls.delta_group(m2_scs, ["1", "9"])


def test_delta_group_method_validation(m2_scs):
    with pytest.raises(ValueError):
        ls.delta_group(m2_scs, ["1"], method="bogus")


def test_delta_group_refuses_nondistributive_folds(m3):
    fs = ls.enumerate_space_functions(m3)
    scs = ls.Scs(m3, {"1": fs[3], "2": fs[5]})
    for method in ("tuple", "subtract"):
        with pytest.raises(NotDistributive):
            ls.delta_group(scs, ["1", "2"], method=method)
    # the oracle route still works and sits below both agents
    meet = ls.delta_group(scs, ["1", "2"], method="oracle")
    assert ls.function_leq(meet, fs[3]) and ls.function_leq(meet, fs[5])


def test_delta_group_order_independent():
    rng = random.Random(17)
    lat = ls.powerset_lattice(["a", "b", "c"])
    agents = {str(i): ls.random_space_function(lat, rng) for i in range(1, 5)}
    scs = ls.Scs(lat, agents)
    names = list(agents)
    reference = ls.delta_group(scs, names).images
    for _ in range(5):
        rng.shuffle(names)
        assert ls.delta_group(scs, names).images == reference


def test_delta_family_caches(m2_scs):
    family = ls.DeltaFamily(m2_scs)
    first = family.get(["1", "2"])
    assert family.get(["2", "1"]) is first
    assert frozenset(["1", "2"]) in family.cache


def test_delta_tuples_direct_values(m2_scs):
    lat = m2_scs.lattice
    for c in range(lat.n):
        assert ls.delta_tuples_direct(m2_scs, ["1"], c) == m2_scs.agent("1").images[c]
        assert (
            ls.delta_tuples_direct(m2_scs, ["1", "2"], c) == FROZEN_M2_TABLE[c]
        )
    assert ls.delta_tuples_direct(m2_scs, ["1", "2"], lat.top_id) == lat.id_of("¬p")


def test_delta_tuples_direct_cap(m2_scs):
    with pytest.raises(TooLarge):
        ls.delta_tuples_direct(m2_scs, ["1", "2"], 0, max_tuples=3)


def test_delta_general_matches_fold_on_distributive():
    rng = random.Random(23)
    for _ in range(10):
        lat = ls.random_distributive_lattice(rng)
        fs = [ls.random_space_function(lat, rng) for _ in range(2)]
        scs = ls.Scs(lat, {"1": fs[0], "2": fs[1]})
        assert (
            ls.delta_general(lat, fs).images
            == ls.delta_group(scs, ["1", "2"]).images
        )


def test_delta_general_below_inputs_on_n5(n5):
    fs = ls.enumerate_space_functions(n5)
    rng = random.Random(4)
    for _ in range(10):
        f, g = rng.choice(fs), rng.choice(fs)
        meet = ls.delta_general(n5, [f, g])
        assert ls.function_leq(meet, f)
        assert ls.function_leq(meet, g)


def test_direct_tuple_scan_matches_pair_formula_on_m3(m3):
    fs = ls.enumerate_space_functions(m3)
    rng = random.Random(13)
    for _ in range(10):
        f, g = rng.choice(fs), rng.choice(fs)
        scs = ls.Scs(m3, {"1": f, "2": g})
        direct = [ls.delta_tuples_direct(scs, ["1", "2"], c) for c in range(m3.n)]
        assert direct == pair_formula_images(m3, f.images, g.images)


def test_m3_general_vs_raw_formula(m3):
    # on the non-distributive fixture the raw formula may sit strictly
    # above the true meet; the oracle is the ground truth
    collapse_to_b = ls.SpaceFunction(m3, (0, 1, 1, 1, 1))
    ident = ls.identity_function(m3)
    exact = ls.delta_general(m3, [collapse_to_b, ident])
    raw, verdict = ls.delta_pair_raw(m3, collapse_to_b, ident)
    assert verdict is not None
    assert all(m3.leq[e, r] for e, r in zip(exact.images, raw))
    assert exact.images != tuple(raw)


# -- projections -------------------------------------------------------------------


def test_group_projection_matches_agent_projection_on_singletons(m2_scs):
    lat = m2_scs.lattice
    for name in m2_scs.agents:
        for c in range(lat.n):
            assert ls.group_projection(m2_scs, [name], c) == ls.agent_projection(
                m2_scs.agent(name), c
            )


def test_group_projection_sees_disjunctive_information(m2_scs):
    lat = m2_scs.lattice
    notp = lat.id_of("¬p")
    d = lat.meet_of([m2_scs.agent("1").images[notp], m2_scs.agent("2").images[notp]])
    assert d == lat.bottom_id
    # the group recovers ¬p from the empty information ...
    assert lat.leq[notp, ls.group_projection(m2_scs, ["1", "2"], d)]
    # ... but joined individual projections do not
    assert ls.join_projection(m2_scs, ["1", "2"], d) == lat.bottom_id


def test_join_projection_singleton(m2_scs):
    lat = m2_scs.lattice
    for c in range(lat.n):
        assert ls.join_projection(m2_scs, ["1"], c) == ls.agent_projection(
            m2_scs.agent("1"), c
        )


def test_group_dominates_join_projection(m2_scs):
    lat = m2_scs.lattice
    for r in range(3):
        for group in itertools.combinations(sorted(m2_scs.agents), r):
            if not group:
                continue
            for c in range(lat.n):
                jp = ls.join_projection(m2_scs, group, c)
                gp = ls.group_projection(m2_scs, group, c)
                assert lat.leq[jp, gp]


def test_group_projection_monotone_in_group(m2_scs):
    lat = m2_scs.lattice
    groups = [[], ["1"], ["2"], ["1", "2"]]
    for small, large in itertools.combinations(groups, 2):
        if set(small) <= set(large):
            for c in range(lat.n):
                assert lat.leq[
                    ls.group_projection(m2_scs, small, c),
                    ls.group_projection(m2_scs, large, c),
                ]


def test_group_galois_exhaustive(m2_scs):
    lat = m2_scs.lattice
    rng = random.Random(31)
    ps3 = ls.powerset_lattice(["a", "b", "c"])
    systems = [
        m2_scs,
        ls.Scs(ps3, {str(i): ls.random_space_function(ps3, rng) for i in (1, 2)}),
    ]
    for scs in systems:
        lat = scs.lattice
        names = sorted(scs.agents)
        dfun = ls.delta_group(scs, names)
        for c in range(lat.n):
            proj = ls.group_projection(scs, names, c)
            for e in range(lat.n):
                assert bool(lat.leq[dfun.images[e], c]) == bool(lat.leq[e, proj])


# -- compositionality ---------------------------------------------------------------


def _family_over(scs):
    family = ls.DeltaFamily(scs)
    names = sorted(scs.agents)
    for r in range(len(names) + 1):
        for combo in itertools.combinations(names, r):
            family.get(combo)
    return family


def test_subgroup_composition_equation():
    rng = random.Random(41)
    for _ in range(5):
        lat = ls.random_distributive_lattice(rng)
        scs = ls.Scs(
            lat, {str(i): ls.random_space_function(lat, rng) for i in (1, 2, 3)}
        )
        family = _family_over(scs)
        dj = family.get(["1"]).images
        dk = family.get(["2", "3"]).images
        di = family.get(["1", "2", "3"]).images
        for c in range(lat.n):
            vals = [
                lat.join_of([dj[a], dk[b]])
                for a in range(lat.n)
                for b in range(lat.n)
                if lat.leq[c, lat.join_table[a, b]]
            ]
            assert lat.meet_of(vals) == di[c]


def test_subgroup_bound_property(m2_scs):
    # joining subgroup values always dominates the full group at the join
    family = _family_over(m2_scs)
    lat = m2_scs.lattice
    groups = [frozenset(), frozenset(["1"]), frozenset(["2"]), frozenset(["1", "2"])]
    full = frozenset(["1", "2"])
    for j in groups:
        for k in groups:
            if not (j <= full and k <= full):
                continue
            dj, dk = family.cache[j].images, family.cache[k].images
            di = family.cache[full].images
            for a in range(lat.n):
                for b in range(lat.n):
                    lhs = lat.join_of([dj[a], dk[b]])
                    assert lat.leq[di[lat.join_table[a, b]], lhs]


def test_subgroup_bound_property_powerset3():
    rng = random.Random(43)
    lat = ls.powerset_lattice(["a", "b", "c"])
    scs = ls.Scs(lat, {str(i): ls.random_space_function(lat, rng) for i in (1, 2)})
    family = _family_over(scs)
    full = frozenset(["1", "2"])
    subsets = [frozenset(), frozenset(["1"]), frozenset(["2"]), full]
    di = family.cache[full].images
    for j in subsets:
        for k in subsets:
            dj, dk = family.cache[j].images, family.cache[k].images
            for a in range(lat.n):
                for b in range(lat.n):
                    assert lat.leq[
                        di[lat.join_table[a, b]], lat.join_of([dj[a], dk[b]])
                    ]


# -- gdc verification ----------------------------------------------------------------


def test_verify_gdc_accepts_the_computed_family(m2_scs):
    report = ls.verify_gdc(m2_scs, _family_over(m2_scs))
    assert report.ok and report.maximality_checked
    assert report.checked_subsets == 4


def test_verify_gdc_flags_constant_bottom_family(m2_scs):
    family = _family_over(m2_scs)
    entries = dict(family.cache)
    entries[frozenset(["1", "2"])] = ls.bottom_function(m2_scs.lattice)
    report = ls.verify_gdc(m2_scs, entries)
    assert not report.ok
    assert any("maximality" in f for f in report.failures)


def test_verify_gdc_flags_d3_violation(m2_scs):
    family = _family_over(m2_scs)
    entries = dict(family.cache)
    entries[frozenset(["1", "2"])] = ls.top_function(m2_scs.lattice)
    report = ls.verify_gdc(m2_scs, entries, check_maximality=False)
    assert not report.ok
    assert any("D.3" in f for f in report.failures)


def test_verify_gdc_flags_d1_violation(m2_scs):
    family = _family_over(m2_scs)
    entries = {k: v.images for k, v in family.cache.items()}
    entries[frozenset(["1", "2"])] = (0, 1, 0, 3)  # breaks join preservation
    report = ls.verify_gdc(m2_scs, entries, check_maximality=False)
    assert not report.ok
    assert any("D.1" in f for f in report.failures)


def test_verify_gdc_flags_d2_violation(m2_scs):
    family = _family_over(m2_scs)
    entries = dict(family.cache)
    entries[frozenset(["1"])] = ls.identity_function(m2_scs.lattice)
    report = ls.verify_gdc(m2_scs, entries, check_maximality=False)
    assert not report.ok
    assert any("D.2" in f for f in report.failures)


def test_verify_gdc_missing_entry(m2_scs):
    report = ls.verify_gdc(m2_scs, {})
    assert not report.ok


def test_verify_gdc_agent_cap(m2):
    agents = {str(i): ls.identity_function(m2) for i in range(6)}
    scs = ls.Scs(m2, agents)
    with pytest.raises(TooLarge):
        ls.verify_gdc(scs, {})


# -- the survey ------------------------------------------------------------------------


def test_survey_finds_counterexamples_on_m3(m3):
    survey = ls.survey_tuple_formula(m3, "M3")
    assert survey.function_count == 50
    assert survey.pair_count == 50 * 51 // 2
    assert survey.monotone_everywhere
    assert survey.found_counterexample
    assert len(survey.violations) == 216  # frozen by the exhaustive scan
    f, g, images, verdict = survey.violations[0]
    assert ls.validate_space_function(m3, images) == verdict
    assert "violates S.2" in survey.summary()


def test_survey_finds_counterexamples_on_n5(n5):
    survey = ls.survey_tuple_formula(n5, "N5")
    assert survey.monotone_everywhere
    assert survey.found_counterexample
    assert len(survey.violations) == 30  # frozen by the exhaustive scan


def test_survey_clean_on_distributive(m2):
    survey = ls.survey_tuple_formula(m2, "M2")
    assert not survey.found_counterexample
    assert survey.monotone_everywhere
    assert "no pair" in survey.summary()
