"""Constructibility of subsketch inclusions A -> B.

The state of a construction is a set of items of ``B``: objects, arrows,
commutativities and convergences, each named by a stable text id.  Six
procedures enlarge the state:

* ``P1`` include conditions already expressible in the state;
* ``P2`` include an arrow ``f`` together with a condition ``f = g_n...g_1``;
* ``P3``/``P4`` introduce a new (co)limit apex with its legs and condition;
* ``P5``/``P6`` include an arrow induced into a limit / out of a colimit,
  together with the conditions ``c_H . f = x_H`` (resp. ``f . c_H = x_H``).

Only ``P3``/``P4`` can block later steps (their apex must be new), so the
certifier saturates the other procedures greedily and backtracks over the
order in which apexes are introduced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .errors import BudgetExceeded, PreconditionError
from .kernel import (
    COLIMIT,
    LIMIT,
    Commutativity,
    Convergence,
    Path,
    Sketch,
    conditions_equivalent,
    dualize_sketch,
    is_subsketch_inclusion,
)

P1, P2, P3, P4, P5, P6 = "P1", "P2", "P3", "P4", "P5", "P6"
PROCEDURES = (P1, P2, P3, P4, P5, P6)
DUAL_PROCEDURE = {P1: P1, P2: P2, P3: P4, P4: P3, P5: P6, P6: P5}

DEFAULT_BUDGET = 100_000


@dataclass(frozen=True)
class ConstructStep:
    procedure: str
    items: tuple[str, ...]
    premises: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"procedure": self.procedure, "items": list(self.items), "premises": list(self.premises)}

    @classmethod
    def from_json(cls, data: dict) -> ConstructStep:
        return cls(data["procedure"], tuple(data["items"]), tuple(data.get("premises", ())))


@dataclass(frozen=True)
class ConstructibilityCertificate:
    """Either a derivation (``ok``) or a refusal with its frontier."""

    start: str
    end: str
    steps: tuple[ConstructStep, ...] = ()
    ok: bool = True
    frontier: tuple[tuple[str, ...], ...] = ()
    missing: tuple[str, ...] = ()
    explored: int = field(default=0, compare=False)

    def to_json(self) -> dict:
        out = {"start": self.start, "end": self.end, "constructible": self.ok,
               "steps": [s.to_json() for s in self.steps]}
        if not self.ok:
            out["frontier"] = [list(f) for f in self.frontier]
            out["missing"] = list(self.missing)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> ConstructibilityCertificate:
        return cls(
            data["start"], data["end"],
            tuple(ConstructStep.from_json(s) for s in data.get("steps", ())),
            data.get("constructible", True),
            tuple(tuple(f) for f in data.get("frontier", ())),
            tuple(data.get("missing", ())),
        )

    @classmethod
    def loads(cls, text: str) -> ConstructibilityCertificate:
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# Item universe of B
# ---------------------------------------------------------------------------


def object_id(v: str) -> str:
    return f"object:{v}"


def arrow_id(e: str) -> str:
    return f"arrow:{e}"


class _Universe:
    """Items of ``b`` as bit positions, plus the precomputed procedure templates."""

    def __init__(self, b: Sketch):
        self.b = b
        ids: list[str] = []
        self.pos: dict[str, int] = {}

        def add(item: str) -> int:
            if item not in self.pos:
                self.pos[item] = len(ids)
                ids.append(item)
            return self.pos[item]

        self.vbit = {v: add(object_id(v)) for v in b.vertices}
        self.ebit = {e.name: add(arrow_id(e.name)) for e in b.edges}
        self.comm_bit: dict[tuple, int] = {}
        self.comms: list[tuple[int, Commutativity]] = []
        for c in b.commutativities:
            if c.key not in self.comm_bit:
                bit = add(c.render())
                self.comm_bit[c.key] = bit
                self.comms.append((bit, c))
        self.convs: list[tuple[int, Convergence]] = []
        for c in b.convergences:
            if any(conditions_equivalent(c, d) for _, d in self.convs):
                continue
            self.convs.append((add(c.render()), c))
        self.ids = ids
        self.full = (1 << len(ids)) - 1
        self.edge = b.graph.edge_map

        self.cond_need: dict[int, int] = {}
        for bit, c in self.comms:
            self.cond_need[bit] = self._mask_path(c.lhs) | self._mask_path(c.rhs)
        for bit, c in self.convs:
            self.cond_need[bit] = self._mask_conv(c)
        self._build_p2()
        self._build_p34()
        self._build_p56()

    # masks -------------------------------------------------------------

    def _mask_path(self, p: Path) -> int:
        m = 1 << self.vbit[p.start]
        for e in p.edges:
            m |= 1 << self.ebit[e]
        return m

    def _mask_diagram(self, c: Convergence) -> int:
        m = 0
        for _, v in c.nodes:
            m |= 1 << self.vbit[v]
        for _, e in c.arrows:
            m |= 1 << self.ebit[e]
        return m

    def _mask_conv(self, c: Convergence) -> int:
        m = self._mask_diagram(c) | (1 << self.vbit[c.apex])
        for _, e in c.legs:
            m |= 1 << self.ebit[e]
        return m

    def comm_lookup(self, p: Path, q: Path) -> int | None:
        """Bit of the commutativity p = q in b; -1 when p and q coincide."""
        if p == q:
            return -1
        return self.comm_bit.get(Commutativity(p, q).key)

    def mask(self, items) -> int:
        m = 0
        for i in items:
            m |= 1 << self.pos[i]
        return m

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.ids[i] for i in range(len(self.ids)) if mask >> i & 1)

    # templates ---------------------------------------------------------

    def _build_p2(self):
        # (arrow bit, condition bit, premises mask)
        self.p2 = []
        for bit, c in self.comms:
            for single, other in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
                if len(single.edges) != 1:
                    continue
                f = single.edges[0]
                if f in other.edges:
                    continue
                e = self.edge[f]
                need = self._mask_path(other) | (1 << self.vbit[e.source]) | (1 << self.vbit[e.target])
                self.p2.append((self.ebit[f], bit, need))

    def _build_p34(self):
        # (procedure, condition bit, apex bit, leg mask, diagram mask)
        self.p34 = []
        for bit, c in self.convs:
            legs = 0
            for _, e in c.legs:
                legs |= 1 << self.ebit[e]
            proc = P3 if c.kind == LIMIT else P4
            self.p34.append((proc, bit, 1 << self.vbit[c.apex], legs, self._mask_diagram(c)))

    def _build_p56(self):
        # (procedure, convergence bit, arrow bit, added comm mask, premise mask, premise bits)
        self.p56 = []
        for cbit, c in self.convs:
            limit = c.kind == LIMIT
            for f in self.b.edges:
                if (f.target if limit else f.source) != c.apex:
                    continue
                other = f.source if limit else f.target
                options = []
                for h, leg in c.legs:
                    found = []
                    node = c.node_map[h]
                    for bit, cond in self.comms:
                        for p, q in ((cond.lhs, cond.rhs), (cond.rhs, cond.lhs)):
                            want = (f.name, leg) if limit else (leg, f.name)
                            start = other if limit else node
                            if p.start != start or p.edges != want or len(q.edges) > 1:
                                continue
                            end = node if limit else other
                            q_end = self.edge[q.edges[0]].target if q.edges else q.start
                            if q.start == start and q_end == end:
                                found.append((q, bit))
                    options.append(found)
                for family in product(*options):
                    x = {h: q for (h, _), (q, _) in zip(c.legs, family)}
                    added = 0
                    for _, bit in family:
                        added |= 1 << bit
                    need = 1 << self.vbit[other]
                    for q in x.values():
                        need |= self._mask_path(q)
                    premise_bits = []
                    ok = True
                    for s in c.shape.edges:
                        d = c.arrow_map[s.name]
                        if limit:
                            lhs = Path(other, x[s.source].edges + (d,))
                            rhs = x[s.target]
                        else:
                            lhs = Path(c.node_map[s.source], (d,) + x[s.target].edges)
                            rhs = x[s.source]
                        pb = self.comm_lookup(lhs, rhs)
                        if pb is None:
                            ok = False
                            break
                        if pb >= 0:
                            premise_bits.append(pb)
                    if not ok:
                        continue
                    pmask = 0
                    for pb in premise_bits:
                        pmask |= 1 << pb
                    self.p56.append((P5 if limit else P6, cbit, self.ebit[f.name], added,
                                     need | pmask | (1 << cbit), tuple(sorted(set(premise_bits)))))


def _initial_mask(u: _Universe, a: Sketch) -> int:
    m = 0
    for v in a.vertices:
        m |= 1 << u.vbit[v]
    for e in a.edges:
        m |= 1 << u.ebit[e.name]
    for c in a.commutativities:
        m |= 1 << u.comm_bit[c.key]
    for c in a.convergences:
        for bit, d in u.convs:
            if conditions_equivalent(c, d):
                m |= 1 << bit
                break
    return m


def _check_inclusion(a: Sketch, b: Sketch) -> None:
    if not is_subsketch_inclusion(a, b):
        raise PreconditionError(f"{a.name} is not a subsketch of {b.name}")


# ---------------------------------------------------------------------------
# Single steps
# ---------------------------------------------------------------------------


def _p1_candidates(u: _Universe, state: int) -> list[int]:
    return [bit for bit, need in u.cond_need.items() if not state >> bit & 1 and need & ~state == 0]


def _step_masks(u: _Universe, state: int, kinds) -> list[tuple[str, int, int]]:
    """Legal non-P1 steps as ``(procedure, added mask, premise mask)``, deterministic order."""
    out = []
    if P2 in kinds:
        for fbit, cbit, need in u.p2:
            if not state >> fbit & 1 and not state >> cbit & 1 and need & ~state == 0:
                out.append((P2, (1 << fbit) | (1 << cbit), need))
    if P3 in kinds or P4 in kinds:
        for proc, cbit, apex, legs, dmask in u.p34:
            if proc in kinds and not state & apex and dmask & ~state == 0:
                out.append((proc, apex | legs | (1 << cbit), dmask))
    if P5 in kinds or P6 in kinds:
        for proc, cbit, fbit, added, need, _ in u.p56:
            if proc in kinds and not state >> fbit & 1 and need & ~state == 0:
                out.append((proc, (1 << fbit) | added, need))
    return out


def _premises(u: _Universe, proc: str, need: int) -> tuple[str, ...]:
    """Conditions among the premises worth recording in a certificate."""
    if proc in (P5, P6):
        cond_bits = set(u.cond_need)
        return tuple(u.ids[i] for i in range(len(u.ids)) if need >> i & 1 and i in cond_bits)
    return ()


def applicable_steps(state: Sketch | frozenset | set, b: Sketch) -> list[ConstructStep]:
    """Every legal single step from ``state`` toward ``b`` (P1 steps one condition at a time)."""
    u = _Universe(b)
    if isinstance(state, Sketch):
        _check_inclusion(state, b)
        mask = _initial_mask(u, state)
    else:
        mask = u.mask(state)
    out = [ConstructStep(P1, (u.ids[bit],)) for bit in sorted(_p1_candidates(u, mask))]
    for proc, added, need in _step_masks(u, mask, PROCEDURES):
        out.append(ConstructStep(proc, _ordered(u, added), _premises(u, proc, need)))
    return out


def _ordered(u: _Universe, mask: int) -> tuple[str, ...]:
    return u.names(mask)


# ---------------------------------------------------------------------------
# Certifier
# ---------------------------------------------------------------------------


def _saturate(u: _Universe, state: int, steps: list[ConstructStep]) -> int:
    while True:
        changed = False
        p1 = _p1_candidates(u, state)
        if p1:
            m = 0
            for bit in p1:
                m |= 1 << bit
            steps.append(ConstructStep(P1, u.names(m)))
            state |= m
            changed = True
        for proc, added, need in _step_masks(u, state, (P2, P5, P6)):
            if added & state:  # arrow already brought in by an earlier step this round
                continue
            if need & ~state:
                continue
            steps.append(ConstructStep(proc, u.names(added), _premises(u, proc, need)))
            state |= added
            changed = True
        if not changed:
            return state


def certify_constructible(a: Sketch, b: Sketch, budget: int = DEFAULT_BUDGET) -> ConstructibilityCertificate:
    """Search a derivation of ``b`` from ``a``.

    Returns a certificate with ``ok=True`` or a refusal listing the maximal
    dead-end states; raises :class:`BudgetExceeded` after ``budget`` branch
    states.
    """
    _check_inclusion(a, b)
    u = _Universe(b)
    start = _initial_mask(u, a)
    dead: set[int] = set()
    ends: list[int] = []
    explored = 0

    def search(state: int, steps: list[ConstructStep]):
        nonlocal explored
        explored += 1
        if explored > budget:
            raise BudgetExceeded(f"constructibility of {a.name} -> {b.name}", budget)
        state = _saturate(u, state, steps)
        if state == u.full:
            return steps
        if state in dead:
            return None
        branches = _step_masks(u, state, (P3, P4))
        for proc, added, need in branches:
            found = search(state | added, steps + [ConstructStep(proc, u.names(added))])
            if found is not None:
                return found
        dead.add(state)
        if not branches:
            ends.append(state)
        return None

    found = search(start, [])
    if found is not None:
        return ConstructibilityCertificate(a.name, b.name, tuple(found), True, explored=explored)
    maximal = [s for s in ends if not any(t != s and s & t == s for t in ends)]
    maximal = sorted(set(maximal), key=lambda s: (-bin(s).count("1"), s))
    best = maximal[0] if maximal else start
    return ConstructibilityCertificate(
        a.name, b.name, (), False,
        frontier=tuple(u.names(s) for s in maximal),
        missing=u.names(u.full & ~best),
        explored=explored,
    )


def dual_certificate(cert: ConstructibilityCertificate, b: Sketch) -> ConstructibilityCertificate:
    """The certificate for the dual inclusion: P3/P4 and P5/P6 swap, items are renamed."""
    u, du = _Universe(b), _Universe(dualize_sketch(b))
    rename = dict(zip(u.ids, du.ids))
    steps = tuple(
        ConstructStep(DUAL_PROCEDURE[st.procedure],
                      tuple(rename[i] for i in st.items),
                      tuple(rename[i] for i in st.premises))
        for st in cert.steps
    )
    return ConstructibilityCertificate(
        cert.start, cert.end, steps, cert.ok,
        tuple(tuple(rename[i] for i in f) for f in cert.frontier),
        tuple(rename[i] for i in cert.missing),
        cert.explored,
    )


def is_constructible(a: Sketch, b: Sketch, budget: int = DEFAULT_BUDGET) -> bool:
    return certify_constructible(a, b, budget).ok


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def _legal(u: _Universe, state: int, step: ConstructStep) -> int | None:
    """New state after ``step``, or None when the step is illegal."""
    try:
        added = u.mask(step.items)
    except KeyError:
        return None
    if not added or added & state:
        return None
    if step.procedure == P1:
        cond = set(u.cond_need)
        for i in range(len(u.ids)):
            if added >> i & 1 and (i not in cond or u.cond_need[i] & ~state):
                return None
        return state | added
    if step.procedure not in PROCEDURES:
        return None
    kinds = (step.procedure,)
    for proc, m, need in _step_masks(u, state, kinds):
        if m == added:
            if step.premises and u.mask(step.premises) & ~state:
                return None
            return state | added
    return None


def replay_certificate(cert: ConstructibilityCertificate, a: Sketch, b: Sketch) -> bool:
    if not cert.ok or not is_subsketch_inclusion(a, b):
        return False
    u = _Universe(b)
    state = _initial_mask(u, a)
    for step in cert.steps:
        try:
            nxt = _legal(u, state, step)
        except KeyError:
            return False
        if nxt is None:
            return False
        state = nxt
    return state == u.full
