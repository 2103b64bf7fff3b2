"""Epistemic instantiations: boolean assignments, Kripke and Aumann models.

Each model induces an agent system on a reverse-inclusion powerset
lattice (the empty set is the inconsistent top, the full universe the
empty-information bottom).  The induced agent maps are the standard
knowledge operators; their distributed spaces coincide with the classic
distributed-knowledge operators, which the test suite verifies
exhaustively on random instances.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .distributed import DeltaFamily
from .errors import InvalidElement, TooLarge, UnknownAgent, UnknownProp
from .lattice import FiniteLattice, powerset_lattice
from .spaces import Scs, SpaceFunction

MAX_POINTED_STATES = 4
MAX_BOOLEAN_PROPS = 4


# -- formulas ------------------------------------------------------------------


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    agent: str
    arg: Formula


@dataclass(frozen=True, slots=True)
class Dk(Formula):
    agents: frozenset[str]
    arg: Formula


_TOKEN = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<neg>~)|(?P<and>&)|(?P<or>\|)"
    r"|(?P<box>\[\]\s*\w+)|(?P<dk>D\{[^}]*\})|(?P<name>\w+))"
)


def parse_formula(text: str) -> Formula:
    """Parse the surface syntax: p, ~f, f & g, f | g, []i f, D{1,2} f, T, F.

    Negation and the modalities bind tighter than &, which binds tighter
    than |.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise InvalidElement(f"cannot tokenize formula at {text[pos:]!r}")
            break
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind).strip()))
    idx = 0

    def peek():
        return tokens[idx][0] if idx < len(tokens) else None

    def take(kind):
        nonlocal idx
        if peek() != kind:
            raise InvalidElement(f"expected {kind} in formula {text!r}")
        tok = tokens[idx][1]
        idx += 1
        return tok

    def parse_or():
        node = parse_and()
        while peek() == "or":
            take("or")
            node = Or(node, parse_and())
        return node

    def parse_and():
        node = parse_unary()
        while peek() == "and":
            take("and")
            node = And(node, parse_unary())
        return node

    def parse_unary():
        kind = peek()
        if kind == "neg":
            take("neg")
            return Not(parse_unary())
        if kind == "box":
            agent = take("box")[2:].strip()
            return Box(agent, parse_unary())
        if kind == "dk":
            body = take("dk")[2:-1]
            agents = frozenset(a.strip() for a in body.split(",") if a.strip())
            if not agents:
                raise InvalidElement("D{} needs at least one agent")
            return Dk(agents, parse_unary())
        if kind == "lpar":
            take("lpar")
            node = parse_or()
            take("rpar")
            return node
        if kind == "name":
            name = take("name")
            if name == "T":
                return Top()
            if name == "F":
                return Bottom()
            return Atom(name)
        raise InvalidElement(f"unexpected end of formula {text!r}")

    node = parse_or()
    if idx != len(tokens):
        raise InvalidElement(f"trailing tokens in formula {text!r}")
    return node


# -- reverse-inclusion powerset scaffolding --------------------------------------


class SetLattice:
    """A powerset-of-universe lattice under reverse inclusion.

    Element ids are subset bitmasks over the universe order, so the
    complement (formula negation) stays inside the lattice.
    """

    def __init__(self, universe_labels: Sequence[str], *, max_universe: int = MAX_POINTED_STATES):
        if len(universe_labels) > max_universe:
            raise TooLarge(
                f"universe of {len(universe_labels)} exceeds the cap of "
                f"{max_universe} (lattice would have 2^{len(universe_labels)} elements)"
            )
        self.universe = tuple(universe_labels)
        self.lattice = powerset_lattice(self.universe).dual()
        self.full_mask = (1 << len(self.universe)) - 1
        self._index = {lab: i for i, lab in enumerate(self.universe)}

    def element_of(self, members: Iterable[str]) -> int:
        mask = 0
        for m in members:
            if m not in self._index:
                raise InvalidElement(f"unknown universe member {m!r}")
            mask |= 1 << self._index[m]
        return mask

    def set_of(self, element: int) -> frozenset[str]:
        self.lattice.check_id(element)
        return frozenset(
            lab for i, lab in enumerate(self.universe) if element >> i & 1
        )

    def complement(self, element: int) -> int:
        self.lattice.check_id(element)
        return self.full_mask ^ element


# -- boolean constraint system -----------------------------------------------------


@dataclass
class BooleanCs:
    """All truth assignments over the props, as a reverse-inclusion lattice."""

    props: tuple[str, ...]
    sets: SetLattice

    @property
    def lattice(self) -> FiniteLattice:
        return self.sets.lattice

    def assignment_label(self, bits: int) -> str:
        return "".join(str(bits >> i & 1) for i in range(len(self.props)))

    def evaluate(self, formula: Formula) -> int:
        """Interpret a propositional formula as the set of its models."""
        if isinstance(formula, Atom):
            if formula.name not in self.props:
                raise UnknownProp(f"unknown proposition {formula.name!r}")
            i = self.props.index(formula.name)
            members = [
                self.assignment_label(bits)
                for bits in range(1 << len(self.props))
                if bits >> i & 1
            ]
            return self.sets.element_of(members)
        if isinstance(formula, Top):
            return self.sets.full_mask
        if isinstance(formula, Bottom):
            return 0
        if isinstance(formula, Not):
            return self.sets.complement(self.evaluate(formula.arg))
        if isinstance(formula, And):
            return self.lattice.join_of(
                [self.evaluate(formula.left), self.evaluate(formula.right)]
            )
        if isinstance(formula, Or):
            return self.lattice.meet_of(
                [self.evaluate(formula.left), self.evaluate(formula.right)]
            )
        raise InvalidElement(f"not a propositional formula: {formula!r}")


def boolean_cs(props: Sequence[str], *, max_props: int = MAX_BOOLEAN_PROPS) -> BooleanCs:
    """Powerset of all truth assignments ordered by reverse inclusion.

    The lattice has 2^(2^k) elements, so only tiny prop sets are
    representable; with default caps k <= 2 builds directly and k = 3
    needs the element cap raised.
    """
    props = tuple(str(p) for p in props)
    if len(set(props)) != len(props):
        raise InvalidElement("propositions must be distinct")
    if len(props) > max_props:
        raise TooLarge(f"{len(props)} props exceeds the cap of {max_props}")
    count = 1 << len(props)
    labels = ["".join(str(b >> i & 1) for i in range(len(props))) for b in range(count)]
    # The lattice has 2^count elements; the powerset element cap still applies.
    return BooleanCs(props, SetLattice(labels, max_universe=16))


# -- Kripke models --------------------------------------------------------------


@dataclass
class KripkeModel:
    """States, valuation and per-agent accessibility relations."""

    states: tuple[str, ...]
    props: tuple[str, ...]
    valuation: dict[str, dict[str, int]]
    relations: dict[str, frozenset[tuple[str, str]]]

    def __post_init__(self):
        states = set(self.states)
        if len(states) != len(self.states) or not states:
            raise InvalidElement("states must be distinct and non-empty")
        for agent, pairs in self.relations.items():
            for s, t in pairs:
                if s not in states or t not in states:
                    raise InvalidElement(
                        f"relation of agent {agent!r} references unknown state "
                        f"({s!r}, {t!r})"
                    )
        for s in self.states:
            row = self.valuation.setdefault(s, {})
            for p in self.props:
                row.setdefault(p, 0)

    def successors(self, agent: str, state: str) -> frozenset[str]:
        pairs = self.relations.get(agent, frozenset())
        return frozenset(t for s, t in pairs if s == state)

    @classmethod
    def from_json(cls, doc: dict) -> "KripkeModel":
        try:
            states = tuple(str(s) for s in doc["states"])
            props = tuple(str(p) for p in doc.get("props", []))
            val = {
                str(s): {str(p): int(v) for p, v in row.items()}
                for s, row in doc.get("val", {}).items()
            }
            rel = {
                str(agent): frozenset((str(s), str(t)) for s, t in pairs)
                for agent, pairs in doc.get("rel", {}).items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidElement(f"malformed Kripke document: {exc}") from None
        return cls(states, props, val, rel)

    @classmethod
    def load(cls, path) -> "KripkeModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


PointedState = tuple[int, str]  # (model index, state)


def _model_agents(models: Sequence[KripkeModel]) -> set[str]:
    agents: set[str] = set()
    for m in models:
        agents |= set(m.relations)
    return agents


def pointed_states(models: Sequence[KripkeModel]) -> list[PointedState]:
    return [(i, s) for i, m in enumerate(models) for s in m.states]


def kripke_box(
    models: Sequence[KripkeModel], agent: str, x: frozenset[PointedState]
) -> frozenset[PointedState]:
    """States whose every agent-accessible successor lies in x."""
    if agent not in _model_agents(models):
        raise UnknownAgent(f"unknown agent {agent!r}")
    out = []
    for i, m in enumerate(models):
        for s in m.states:
            if all((i, t) in x for t in m.successors(agent, s)):
                out.append((i, s))
    return frozenset(out)


def kripke_dk(
    models: Sequence[KripkeModel], group, x: frozenset[PointedState]
) -> frozenset[PointedState]:
    """Box along the intersection of the group's accessibility relations.

    The empty group intersects to the universal relation of each model.
    """
    agents = _model_agents(models)
    names = sorted({str(g) for g in group})
    for name in names:
        if name not in agents:
            raise UnknownAgent(f"unknown agent {name!r}")
    out = []
    for i, m in enumerate(models):
        for s in m.states:
            if names:
                successors = set(m.states)
                for name in names:
                    successors &= m.successors(name, s)
            else:
                successors = set(m.states)
            if all((i, t) in x for t in successors):
                out.append((i, s))
    return frozenset(out)


@dataclass
class KripkeScs:
    """Induced agent system over the pointed-state powerset (reversed)."""

    models: tuple[KripkeModel, ...]
    pointed: tuple[PointedState, ...]
    sets: SetLattice
    scs: Scs
    _families: dict[str, DeltaFamily] = field(default_factory=dict)

    @property
    def lattice(self) -> FiniteLattice:
        return self.scs.lattice

    def pointed_label(self, p: PointedState) -> str:
        i, s = p
        return s if len(self.models) == 1 else f"m{i}:{s}"

    def element_of(self, members: Iterable[PointedState]) -> int:
        return self.sets.element_of([self.pointed_label(p) for p in members])

    def set_of(self, element: int) -> frozenset[PointedState]:
        labels = self.sets.set_of(element)
        return frozenset(p for p in self.pointed if self.pointed_label(p) in labels)

    def delta(self, group) -> SpaceFunction:
        family = self._families.setdefault("tuple", DeltaFamily(self.scs, "tuple"))
        return family.get(group)

    def evaluate(self, formula: Formula) -> int:
        """Interpret a modal formula as its set of satisfying pointed states."""
        if isinstance(formula, Atom):
            members = []
            for i, m in enumerate(self.models):
                if formula.name not in m.props:
                    raise UnknownProp(f"unknown proposition {formula.name!r}")
                members.extend(
                    (i, s) for s in m.states if m.valuation[s][formula.name]
                )
            return self.element_of(members)
        if isinstance(formula, Top):
            return self.sets.full_mask
        if isinstance(formula, Bottom):
            return 0
        if isinstance(formula, Not):
            return self.sets.complement(self.evaluate(formula.arg))
        if isinstance(formula, And):
            return self.lattice.join_of(
                [self.evaluate(formula.left), self.evaluate(formula.right)]
            )
        if isinstance(formula, Or):
            return self.lattice.meet_of(
                [self.evaluate(formula.left), self.evaluate(formula.right)]
            )
        if isinstance(formula, Box):
            return self.scs.agent(formula.agent).images[self.evaluate(formula.arg)]
        if isinstance(formula, Dk):
            return self.delta(formula.agents).images[self.evaluate(formula.arg)]
        raise InvalidElement(f"unsupported formula node {formula!r}")


def kripke_to_scs(
    models: Sequence[KripkeModel], *, max_pointed: int = MAX_POINTED_STATES
) -> KripkeScs:
    """Build the induced agent system of a set of Kripke models.

    The universe is the disjoint union of pointed states; each agent map
    is the box operator, which validates against the space axioms.
    """
    models = tuple(models)
    if not models:
        raise InvalidElement("need at least one Kripke model")
    pts = pointed_states(models)
    if len(pts) > max_pointed:
        raise TooLarge(
            f"{len(pts)} pointed states exceeds the cap of {max_pointed}"
        )
    labels = [
        (s if len(models) == 1 else f"m{i}:{s}") for i, s in pts
    ]
    sets = SetLattice(labels)
    agents = {}
    for agent in sorted(_model_agents(models)):
        images = []
        for mask in range(1 << len(pts)):
            members = frozenset(p for i, p in enumerate(pts) if mask >> i & 1)
            box = kripke_box(models, agent, members)
            images.append(
                sum(1 << i for i, p in enumerate(pts) if p in box)
            )
        agents[agent] = SpaceFunction(sets.lattice, tuple(images))
    return KripkeScs(models, tuple(pts), sets, Scs(sets.lattice, agents))


# -- Aumann structures -------------------------------------------------------------


@dataclass
class AumannStructure:
    """States with one information partition per agent."""

    states: tuple[str, ...]
    partitions: dict[str, tuple[frozenset[str], ...]]

    def __post_init__(self):
        states = set(self.states)
        if len(states) != len(self.states) or not states:
            raise InvalidElement("states must be distinct and non-empty")
        for agent, blocks in self.partitions.items():
            seen: set[str] = set()
            for block in blocks:
                if not block:
                    raise InvalidElement(f"agent {agent!r} has an empty block")
                if block & seen:
                    raise InvalidElement(f"agent {agent!r} has overlapping blocks")
                if not block <= states:
                    raise InvalidElement(
                        f"agent {agent!r} block references unknown states"
                    )
                seen |= block
            if seen != states:
                raise InvalidElement(f"partition of agent {agent!r} does not cover")

    def block_of(self, agent: str, state: str) -> frozenset[str]:
        if agent not in self.partitions:
            raise UnknownAgent(f"unknown agent {agent!r}")
        for block in self.partitions[agent]:
            if state in block:
                return block
        raise InvalidElement(f"unknown state {state!r}")

    @classmethod
    def from_json(cls, doc: dict) -> "AumannStructure":
        try:
            states = tuple(str(s) for s in doc["states"])
            partitions = {
                str(agent): tuple(frozenset(str(s) for s in block) for block in blocks)
                for agent, blocks in doc["partitions"].items()
            }
        except (KeyError, TypeError) as exc:
            raise InvalidElement(f"malformed Aumann document: {exc}") from None
        return cls(states, partitions)

    @classmethod
    def load(cls, path) -> "AumannStructure":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def aumann_know(a: AumannStructure, agent: str, event: frozenset[str]) -> frozenset[str]:
    """States whose whole information block lies inside the event."""
    return frozenset(s for s in a.states if a.block_of(agent, s) <= event)


def aumann_dk(a: AumannStructure, group, event: frozenset[str]) -> frozenset[str]:
    """Knowledge along intersected blocks; the empty group intersects to
    the full state space."""
    names = sorted({str(g) for g in group})
    out = []
    for s in a.states:
        common = set(a.states)
        for name in names:
            common &= a.block_of(name, s)
        if common <= event:
            out.append(s)
    return frozenset(out)


@dataclass
class AumannScs:
    structure: AumannStructure
    sets: SetLattice
    scs: Scs

    @property
    def lattice(self) -> FiniteLattice:
        return self.scs.lattice

    def element_of(self, event: Iterable[str]) -> int:
        return self.sets.element_of(event)

    def set_of(self, element: int) -> frozenset[str]:
        return self.sets.set_of(element)


def aumann_to_scs(
    a: AumannStructure, *, max_states: int = MAX_POINTED_STATES
) -> AumannScs:
    """Induced agent system: events under reverse inclusion, knowledge maps."""
    if len(a.states) > max_states:
        raise TooLarge(f"{len(a.states)} states exceeds the cap of {max_states}")
    sets = SetLattice(list(a.states))
    agents = {}
    for agent in sorted(a.partitions):
        images = []
        for mask in range(1 << len(a.states)):
            event = frozenset(s for i, s in enumerate(a.states) if mask >> i & 1)
            known = aumann_know(a, agent, event)
            images.append(sum(1 << i for i, s in enumerate(a.states) if s in known))
        agents[agent] = SpaceFunction(sets.lattice, tuple(images))
    return AumannScs(a, sets, Scs(sets.lattice, agents))


# -- seeded random instances ---------------------------------------------------------


def random_kripke_models(rng, *, max_models: int = 2, max_states: int = 4) -> list[KripkeModel]:
    """A seeded random model set with at most `max_states` pointed states."""
    total = rng.randint(2, max_states)
    count = 1 if total < 2 or max_models == 1 else rng.choice([1, 1, 2])
    if count == 1:
        split = [total]
    else:
        k = rng.randint(1, total - 1)
        split = [k, total - k]
    agents = [str(i + 1) for i in range(rng.randint(1, 3))]
    props = ["p", "q"]
    models = []
    for mi, size in enumerate(split):
        states = tuple(f"s{mi}{j}" for j in range(size))
        val = {
            s: {p: rng.randint(0, 1) for p in props} for s in states
        }
        rel = {}
        for agent in agents:
            pairs = frozenset(
                (s, t)
                for s in states
                for t in states
                if rng.random() < 0.45
            )
            rel[agent] = pairs
        models.append(KripkeModel(states, tuple(props), val, rel))
    return models


def random_partition(rng, states: Sequence[str]) -> tuple[frozenset[str], ...]:
    order = list(states)
    rng.shuffle(order)
    blocks: list[list[str]] = []
    for s in order:
        if blocks and rng.random() < 0.5:
            rng.choice(blocks).append(s)
        else:
            blocks.append([s])
    return tuple(frozenset(b) for b in blocks)


def random_aumann(rng, *, max_states: int = 4) -> AumannStructure:
    states = tuple(f"s{i}" for i in range(rng.randint(2, max_states)))
    agents = [str(i + 1) for i in range(rng.randint(1, 3))]
    return AumannStructure(
        states, {a: random_partition(rng, states) for a in agents}
    )


def load_kripke_models(paths: Sequence[str]) -> list[KripkeModel]:
    return [KripkeModel.load(os.fspath(p)) for p in paths]
