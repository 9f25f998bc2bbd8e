"""Structures (models of sketches in finite categories) and their morphisms.

A structure is a graph map sketch -> category sending commutativity
conditions to equations and convergence conditions to actual (co)limit
cones.  Enumeration goes through the search kernel in ``_kernels``;
convergence conditions are filtered afterwards with the exhaustive
oracles of :mod:`sketchkit.fincat`.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from . import _kernels
from .errors import BudgetExceeded, NotInvertible, PreconditionError, ResolutionError
from .fincat import Cone, Diagram, FiniteCategory, inverse, is_universal_cone
from .kernel import (
    Convergence,
    Sketch,
    SketchMorphism,
    ValidationReport,
    Violation,
    dualize_sketch,
)

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    """Search budget in visited candidates; ``SKETCHKIT_BUDGET`` overrides."""
    raw = os.environ.get("SKETCHKIT_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Structure:
    """A graph map from ``sketch`` into ``category``.

    Equality and hashing use the sketch name, category name and both maps;
    the optional declaration ``name`` is ignored.
    """

    sketch: Sketch
    category: FiniteCategory
    objects: tuple[tuple[str, str], ...]
    arrows: tuple[tuple[str, str], ...]
    name: str = ""

    @classmethod
    def from_mapping(cls, sketch: Sketch, category: FiniteCategory, mapping: Mapping[str, str],
                     name: str = "") -> Structure:
        """Build from one dict covering vertices and edges by name."""
        missing = [v for v in sketch.vertices if v not in mapping]
        missing += [e.name for e in sketch.edges if e.name not in mapping]
        if missing:
            raise ResolutionError([f"structure {name or '?'} does not map {m!r}" for m in missing])
        return cls(
            sketch,
            category,
            tuple((v, mapping[v]) for v in sketch.vertices),
            tuple((e.name, mapping[e.name]) for e in sketch.edges),
            name,
        )

    @property
    def key(self) -> tuple:
        return (self.sketch.name, self.category.name, self.objects, self.arrows)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def object_map(self) -> dict[str, str]:
        return dict(self.objects)

    @cached_property
    def arrow_map(self) -> dict[str, str]:
        return dict(self.arrows)

    def __call__(self, item: str) -> str:
        if item in self.object_map:
            return self.object_map[item]
        return self.arrow_map[item]

    def mapping(self) -> dict[str, str]:
        return {**self.object_map, **self.arrow_map}

    def renamed(self, name: str) -> Structure:
        return Structure(self.sketch, self.category, self.objects, self.arrows, name)

    def path_value(self, path) -> str:
        return self.category.compose_path(self.object_map[path.start], (self.arrow_map[e] for e in path.edges))

    def convergence_instance(self, cond: Convergence) -> tuple[Diagram, Cone]:
        d = Diagram(
            cond.shape,
            tuple((h, self.object_map[v]) for h, v in cond.nodes),
            tuple((h, self.arrow_map[e]) for h, e in cond.arrows),
        )
        cone = Cone(
            self.object_map[cond.apex],
            tuple((h, self.arrow_map[e]) for h, e in cond.legs),
            cond.kind,
        )
        return d, cone


def validate_structure(F: Structure) -> ValidationReport:
    out: list[Violation] = []
    s, c = F.sketch, F.category
    where = f"structure {F.name or '?'}: {s.name} in {c.name}"
    om, am = F.object_map, F.arrow_map
    unresolved = [v for v in s.vertices if v not in om] + [e.name for e in s.edges if e.name not in am]
    unresolved += [o for o in om.values() if o not in c.object_index]
    unresolved += [a for a in am.values() if a not in c.arrow_map]
    if unresolved:
        raise ResolutionError([f"{where}: cannot resolve {u!r}" for u in unresolved])
    for e in s.edges:
        a = c.arrow_map[am[e.name]]
        if (a.source, a.target) != (om[e.source], om[e.target]):
            out.append(Violation(f"{where} / arrow {e.name}",
                                 f"{a.name} goes {a.source} -> {a.target}, "
                                 f"expected {om[e.source]} -> {om[e.target]}"))
    if out:
        return ValidationReport(tuple(out))
    for cond in s.commutativities:
        lhs, rhs = F.path_value(cond.lhs), F.path_value(cond.rhs)
        if lhs != rhs:
            out.append(Violation(f"{where} / {cond.render()}", f"{lhs} != {rhs}"))
    for cond in s.convergences:
        d, cone = F.convergence_instance(cond)
        if not is_universal_cone(c, d, cone):
            out.append(Violation(f"{where} / {cond.kind} {cond.apex}",
                                 f"cone at {cone.vertex} is not a {cond.kind}"))
    return ValidationReport(tuple(out))


def dualize_structure(F: Structure) -> Structure:
    return Structure(dualize_sketch(F.sketch), F.category.dual(), F.objects, F.arrows, F.name)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def _ints(values) -> array:
    return array("i", values)


class HomPlan:
    """Integer encoding of a structure search for ``_kernels.search_homs``."""

    __slots__ = (
        "var_kind", "var_ref", "dom_ptr", "dom_idx", "edge_src", "edge_tgt", "edge_fixed",
        "chk_ptr", "chk_idx", "comm_start", "lhs_ptr", "lhs_idx", "rhs_ptr", "rhs_idx",
        "n_vertices", "n_edges",
    )

    def __init__(self, z: Sketch, c: FiniteCategory, domains: Mapping[str, list[str]],
                 fixed_arrows: Mapping[str, str]):
        vi = {v: i for i, v in enumerate(z.vertices)}
        ei = {e.name: i for i, e in enumerate(z.edges)}
        oi, ai = c.object_index, c.arrow_index
        self.n_vertices = len(z.vertices)
        self.n_edges = len(z.edges)
        dom_ptr, dom_idx = [0], []
        for v in z.vertices:
            dom_idx.extend(oi[o] for o in domains.get(v, c.objects))
            dom_ptr.append(len(dom_idx))
        self.dom_ptr, self.dom_idx = _ints(dom_ptr), _ints(dom_idx)
        self.edge_src = _ints(vi[e.source] for e in z.edges)
        self.edge_tgt = _ints(vi[e.target] for e in z.edges)
        self.edge_fixed = _ints(ai[fixed_arrows[e.name]] if e.name in fixed_arrows else -1 for e in z.edges)

        # most constrained vertices first; each edge right after both endpoints
        sizes = [dom_ptr[i + 1] - dom_ptr[i] for i in range(self.n_vertices)]
        vorder = sorted(range(self.n_vertices), key=lambda i: (sizes[i], i))
        kinds, refs = [], []
        placed = set()
        position = {}
        pending = list(range(self.n_edges))
        for v in vorder:
            kinds.append(0)
            refs.append(v)
            placed.add(v)
            position[("v", v)] = len(refs) - 1
            rest = []
            for e in pending:
                if self.edge_src[e] in placed and self.edge_tgt[e] in placed:
                    kinds.append(1)
                    refs.append(e)
                    position[("e", e)] = len(refs) - 1
                else:
                    rest.append(e)
            pending = rest
        self.var_kind, self.var_ref = _ints(kinds), _ints(refs)

        checks = [[] for _ in refs]
        starts, lp, li, rp, ri = [], [0], [], [0], []
        for k, cond in enumerate(z.commutativities):
            starts.append(vi[cond.lhs.start])
            li.extend(ei[e] for e in cond.lhs.edges)
            lp.append(len(li))
            ri.extend(ei[e] for e in cond.rhs.edges)
            rp.append(len(ri))
            at = [position[("v", vi[cond.lhs.start])]]
            at += [position[("e", ei[e])] for e in cond.edge_names()]
            checks[max(at)].append(k)
        ptr, idx = [0], []
        for ch in checks:
            idx.extend(ch)
            ptr.append(len(idx))
        self.chk_ptr, self.chk_idx = _ints(ptr), _ints(idx)
        self.comm_start = _ints(starts)
        self.lhs_ptr, self.lhs_idx = _ints(lp), _ints(li)
        self.rhs_ptr, self.rhs_idx = _ints(rp), _ints(ri)


def search_structures(z: Sketch, c: FiniteCategory, *, fixed: Mapping[str, str] | None = None,
                      domains: Mapping[str, list[str]] | None = None,
                      budget: int | None = None) -> list[Structure]:
    """All ``z``-structures in ``c`` agreeing with ``fixed`` and drawing objects from ``domains``.

    Results are sorted by (object indices, arrow indices) in declaration order.
    """
    budget = default_budget() if budget is None else budget
    fixed = dict(fixed or {})
    doms: dict[str, list[str]] = {v: list(ds) for v, ds in (domains or {}).items()}
    for v in z.vertices:
        if v in fixed:
            allowed = doms.get(v, c.objects)
            doms[v] = [fixed[v]] if fixed[v] in allowed else []
    fixed_arrows = {e.name: fixed[e.name] for e in z.edges if e.name in fixed}
    for v, ds in doms.items():
        for o in ds:
            if o not in c.object_index:
                raise ResolutionError(f"unknown object {o!r} in {c.name}")
    for a in fixed_arrows.values():
        if a not in c.arrow_index:
            raise ResolutionError(f"unknown arrow {a!r} in {c.name}")

    plan = HomPlan(z, c, doms, fixed_arrows)
    raw, _nodes = _kernels.search_homs(plan, c.tables, budget)
    if raw is None:
        raise BudgetExceeded(f"structures of {z.name} in {c.name}", budget)
    raw.sort()

    nv = len(z.vertices)
    vi = {v: i for i, v in enumerate(z.vertices)}
    ei = {e.name: nv + i for i, e in enumerate(z.edges)}
    conv_plans = []
    for k, cond in enumerate(z.convergences):
        conv_plans.append((
            k, cond,
            [vi[v] for _, v in cond.nodes],
            [ei[e] for _, e in cond.arrows],
            vi[cond.apex],
            [ei[e] for _, e in cond.legs],
        ))
    objects = c.objects
    arrows = [a.name for a in c.arrows]
    verdicts: dict[tuple, bool] = {}
    out = []
    for row in raw:
        good = True
        for k, cond, nodes, darrs, apex, legs in conv_plans:
            key = (k, tuple(row[i] for i in nodes), tuple(row[i] for i in darrs), row[apex],
                   tuple(row[i] for i in legs))
            v = verdicts.get(key)
            if v is None:
                d = Diagram(
                    cond.shape,
                    tuple((h, objects[row[i]]) for (h, _), i in zip(cond.nodes, nodes)),
                    tuple((h, arrows[row[i]]) for (h, _), i in zip(cond.arrows, darrs)),
                )
                cone = Cone(objects[row[apex]],
                            tuple((h, arrows[row[i]]) for (h, _), i in zip(cond.legs, legs)),
                            cond.kind)
                v = verdicts[key] = is_universal_cone(c, d, cone)
            if not v:
                good = False
                break
        if good:
            out.append(Structure(
                z, c,
                tuple((v, objects[row[i]]) for i, v in enumerate(z.vertices)),
                tuple((e.name, arrows[row[nv + i]]) for i, e in enumerate(z.edges)),
            ))
    return out


def enumerate_structures(z: Sketch, c: FiniteCategory, budget: int | None = None) -> list[Structure]:
    return search_structures(z, c, budget=budget)


def _fixed_from(phi: SketchMorphism, G: Structure) -> dict[str, str] | None:
    """Values forced on the target sketch by ``H . phi = G``; None when inconsistent."""
    fixed: dict[str, str] = {}
    for v, w in phi.vertices:
        val = G.object_map[v]
        if fixed.setdefault(w, val) != val:
            return None
    for e, f in phi.edges:
        val = G.arrow_map[e]
        if fixed.setdefault(f, val) != val:
            return None
    return fixed


def restrict_structure(phi: SketchMorphism, G: Structure) -> Structure:
    """``G . phi`` as a structure over ``phi.source``."""
    src = phi.source
    if src is None:
        raise PreconditionError("restriction needs a morphism with a known source sketch")
    vm, em = phi.vertex_map, phi.edge_map
    return Structure(
        src,
        G.category,
        tuple((v, G.object_map[vm[v]]) for v in src.vertices),
        tuple((e.name, G.arrow_map[em[e.name]]) for e in src.edges),
    )


def fibre(phi: SketchMorphism, G: Structure, budget: int | None = None) -> list[Structure]:
    """All ``phi.target``-structures H with ``H . phi = G`` on the nose."""
    if phi.target is None:
        raise PreconditionError("fibre needs a morphism with a known target sketch")
    fixed = _fixed_from(phi, G)
    if fixed is None:
        return []
    return search_structures(phi.target, G.category, fixed=fixed, budget=budget)


# ---------------------------------------------------------------------------
# Natural transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NatTransformation:
    source: Structure
    target: Structure
    components: tuple[tuple[str, str], ...]

    @cached_property
    def component_map(self) -> dict[str, str]:
        return dict(self.components)

    def __getitem__(self, vertex: str) -> str:
        return self.component_map[vertex]


def _check_parallel(F: Structure, G: Structure) -> None:
    if F.sketch.name != G.sketch.name or F.category.name != G.category.name:
        raise PreconditionError(
            f"structures live over different sketches/categories: "
            f"{F.sketch.name} in {F.category.name} vs {G.sketch.name} in {G.category.name}"
        )


def is_natural(t: NatTransformation) -> bool:
    F, G, c = t.source, t.target, t.source.category
    comp = t.component_map
    for v in F.sketch.vertices:
        a = c.arrow_map.get(comp.get(v, ""))
        if a is None or (a.source, a.target) != (F.object_map[v], G.object_map[v]):
            return False
    for e in F.sketch.edges:
        if c.compose(G.arrow_map[e.name], comp[e.source]) != c.compose(comp[e.target], F.arrow_map[e.name]):
            return False
    return True


def enumerate_nat_transformations(F: Structure, G: Structure,
                                  fixed: Mapping[str, str] | None = None) -> list[NatTransformation]:
    """All natural transformations F => G (optionally with some components prescribed)."""
    _check_parallel(F, G)
    c = F.category
    z = F.sketch
    fixed = fixed or {}
    order = list(z.vertices)
    pos = {v: i for i, v in enumerate(order)}
    checks: list[list] = [[] for _ in order]
    for e in z.edges:
        checks[max(pos[e.source], pos[e.target])].append(e)
    cands = []
    for v in order:
        hom = c.hom(F.object_map[v], G.object_map[v])
        if v in fixed:
            hom = [fixed[v]] if fixed[v] in hom else []
        cands.append(hom)
    out = []
    chosen: dict[str, str] = {}

    def search(i: int):
        if i == len(order):
            out.append(NatTransformation(F, G, tuple((v, chosen[v]) for v in order)))
            return
        v = order[i]
        for a in cands[i]:
            chosen[v] = a
            if all(
                c.compose(G.arrow_map[e.name], chosen[e.source])
                == c.compose(chosen[e.target], F.arrow_map[e.name])
                for e in checks[i]
            ):
                search(i + 1)
        chosen.pop(v, None)

    search(0)
    return out


def identity_nat(F: Structure) -> NatTransformation:
    c = F.category
    return NatTransformation(F, F, tuple((v, c.identity(o)) for v, o in F.objects))


def compose_nat(t2: NatTransformation, t1: NatTransformation) -> NatTransformation:
    """``t2 . t1``."""
    if t1.target != t2.source:
        raise PreconditionError("natural transformations are not composable")
    c = t1.source.category
    return NatTransformation(
        t1.source, t2.target,
        tuple((v, c.compose(t2[v], a)) for v, a in t1.components),
    )


def inverse_nat(t: NatTransformation) -> NatTransformation:
    c = t.source.category
    comps = []
    for v, a in t.components:
        b = inverse(c, a)
        if b is None:
            raise NotInvertible(f"component at {v} ({a}) has no inverse")
        comps.append((v, b))
    return NatTransformation(t.target, t.source, tuple(comps))


def is_nat_iso(t: NatTransformation) -> bool:
    c = t.source.category
    return all(inverse(c, a) is not None for _, a in t.components)


def restrict_nat(phi: SketchMorphism, t: NatTransformation) -> NatTransformation:
    src = phi.source
    if src is None:
        raise PreconditionError("restriction needs a morphism with a known source sketch")
    vm = phi.vertex_map
    return NatTransformation(
        restrict_structure(phi, t.source),
        restrict_structure(phi, t.target),
        tuple((v, t[vm[v]]) for v in src.vertices),
    )


def find_isomorphism(F: Structure, G: Structure) -> NatTransformation | None:
    """Some natural isomorphism F => G, or None."""
    _check_parallel(F, G)
    c = F.category
    z = F.sketch
    order = list(z.vertices)
    pos = {v: i for i, v in enumerate(order)}
    checks: list[list] = [[] for _ in order]
    for e in z.edges:
        checks[max(pos[e.source], pos[e.target])].append(e)
    cands = [[a for a in c.hom(F.object_map[v], G.object_map[v]) if inverse(c, a) is not None]
             for v in order]
    chosen: dict[str, str] = {}

    def search(i: int):
        if i == len(order):
            return NatTransformation(F, G, tuple((v, chosen[v]) for v in order))
        v = order[i]
        for a in cands[i]:
            chosen[v] = a
            if all(
                c.compose(G.arrow_map[e.name], chosen[e.source])
                == c.compose(chosen[e.target], F.arrow_map[e.name])
                for e in checks[i]
            ):
                found = search(i + 1)
                if found is not None:
                    return found
        chosen.pop(v, None)
        return None

    return search(0)


# ---------------------------------------------------------------------------
# Transport along an isomorphism
# ---------------------------------------------------------------------------


def transport_along_iso(beta: SketchMorphism, H: Structure,
                        i: NatTransformation) -> tuple[Structure, NatTransformation]:
    """Replace H by an isomorphic E whose restriction along ``beta`` is exactly ``i.target``.

    ``i`` must be an isomorphism ``H . beta => G``.  On objects, E takes the
    value of G on the image of ``beta`` and of H elsewhere; ``j`` is ``i`` on
    that image and identities elsewhere; ``E(b) = j_B2 . H(b) . j_B1^-1``.
    """
    if not beta.is_injective_on_objects():
        raise PreconditionError("beta must be injective on objects")
    if beta.target is None or beta.source is None:
        raise PreconditionError("beta must carry its source and target sketches")
    c = H.category
    G = i.target
    if i.source != restrict_structure(beta, H):
        raise PreconditionError("i does not start at the restriction of H along beta")
    image = {w: v for v, w in beta.vertices}
    j: dict[str, str] = {}
    j_inv: dict[str, str] = {}
    E_obj: dict[str, str] = {}
    for b in beta.target.vertices:
        if b in image:
            a = image[b]
            comp = i[a]
            inv = inverse(c, comp)
            if inv is None:
                raise NotInvertible(f"component of i at {a} ({comp}) is not invertible")
            E_obj[b] = G.object_map[a]
            j[b] = comp
            j_inv[b] = inv
        else:
            E_obj[b] = H.object_map[b]
            j[b] = j_inv[b] = c.identity(H.object_map[b])
    E_arr = {}
    for e in beta.target.edges:
        E_arr[e.name] = c.compose(j[e.target], c.compose(H.arrow_map[e.name], j_inv[e.source]))
    E = Structure(
        beta.target, c,
        tuple((b, E_obj[b]) for b in beta.target.vertices),
        tuple((e.name, E_arr[e.name]) for e in beta.target.edges),
    )
    jt = NatTransformation(H, E, tuple((b, j[b]) for b in beta.target.vertices))
    return E, jt
