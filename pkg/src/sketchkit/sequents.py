"""Exactness sequents X -> A -> B and the deciders for their verifications."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .errors import BudgetExceeded, CapExceeded, PreconditionError
from .fincat import FiniteCategory, extract_category, isomorphic_objects
from .kernel import (
    Sketch,
    SketchMorphism,
    ValidationReport,
    Violation,
    dualize_sketch,
    is_subsketch_inclusion,
)
from .models import (
    NatTransformation,
    Structure,
    compose_nat,
    dualize_structure,
    enumerate_nat_transformations,
    fibre,
    find_isomorphism,
    identity_nat,
    restrict_structure,
    search_structures,
)

STRICT = "strict"
UPTO_ISO = "iso"
FUNCTORIAL = "functorial"
MODES = (STRICT, UPTO_ISO, FUNCTORIAL)

DEFAULT_CAP = 10**5


@dataclass(frozen=True)
class ExactnessSequent:
    name: str
    x: Sketch
    a: Sketch
    b: Sketch

    @cached_property
    def alpha(self) -> SketchMorphism:
        return SketchMorphism.inclusion(self.x, self.a)

    @cached_property
    def beta(self) -> SketchMorphism:
        return SketchMorphism.inclusion(self.a, self.b)


@dataclass(frozen=True)
class VerificationDecision:
    holds: bool
    mode: str
    witnesses: tuple[tuple[Structure, Structure], ...] = ()
    counterexample: Structure | None = None
    delegated: bool = False
    note: str = ""
    explored: int = field(default=0, compare=False)

    def witness_for(self, G: Structure) -> Structure | None:
        for g, h in self.witnesses:
            if g == G:
                return h
        return None


def validate_sequent(s: ExactnessSequent) -> ValidationReport:
    out = []
    if not is_subsketch_inclusion(s.x, s.a):
        out.append(Violation(f"sequent {s.name} / alpha", f"{s.x.name} is not a subsketch of {s.a.name}"))
    if not is_subsketch_inclusion(s.a, s.b):
        out.append(Violation(f"sequent {s.name} / beta", f"{s.a.name} is not a subsketch of {s.b.name}"))
    return ValidationReport(tuple(out))


def is_unconditional_finite_kind(s: ExactnessSequent) -> bool:
    """Is ``alpha`` unconditional of finite kind?

    ``A`` must be the underlying sketch of a finite category, and whatever it
    carries beyond that (residual commutativities, convergences) must
    already be a condition of ``X``.
    """
    ex = extract_category(s.a)
    if not ex.ok:
        return False
    if not all(s.x.has_commutativity(c) for c in ex.residue):
        return False
    return all(s.x.has_convergence(c) for c in s.a.convergences)


def dualize_sequent(s: ExactnessSequent) -> ExactnessSequent:
    return ExactnessSequent(s.name, dualize_sketch(s.x), dualize_sketch(s.a), dualize_sketch(s.b))


def _check_input(s: ExactnessSequent, F: Structure, c: FiniteCategory) -> None:
    if F.sketch != s.x:
        raise PreconditionError(f"structure is over {F.sketch.name}, sequent {s.name} expects {s.x.name}")
    if F.category.name != c.name:
        raise PreconditionError(f"structure lives in {F.category.name}, not {c.name}")


def lifts(s: ExactnessSequent, F: Structure, budget: int | None = None) -> list[Structure]:
    """The fibre of alpha at F: the A-structures extending F."""
    return fibre(s.alpha, F, budget)


# ---------------------------------------------------------------------------
# Strict and up-to-iso deciders
# ---------------------------------------------------------------------------


def exists_verification(s: ExactnessSequent, F: Structure, c: FiniteCategory,
                        budget: int | None = None) -> VerificationDecision:
    """Does every A-extension G of F extend strictly to B?"""
    _check_input(s, F, c)
    witnesses = []
    for G in lifts(s, F, budget):
        ext = fibre(s.beta, G, budget)
        if not ext:
            return VerificationDecision(False, STRICT, counterexample=G)
        witnesses.append((G, ext[0]))
    return VerificationDecision(True, STRICT, tuple(witnesses))


def iso_extensions(s: ExactnessSequent, G: Structure, budget: int | None = None) -> list[Structure]:
    """B-structures H with H . beta isomorphic to G."""
    c = G.category
    domains = {v: isomorphic_objects(c, o) for v, o in G.objects}
    out = []
    for H in search_structures(s.b, c, domains=domains, budget=budget):
        if find_isomorphism(restrict_structure(s.beta, H), G) is not None:
            out.append(H)
    return out


def exists_verification_upto_iso(s: ExactnessSequent, F: Structure, c: FiniteCategory,
                                 budget: int | None = None) -> VerificationDecision:
    _check_input(s, F, c)
    witnesses = []
    for G in lifts(s, F, budget):
        ext = iso_extensions(s, G, budget)
        if not ext:
            return VerificationDecision(False, UPTO_ISO, counterexample=G)
        witnesses.append((G, ext[0]))
    return VerificationDecision(True, UPTO_ISO, tuple(witnesses))


# ---------------------------------------------------------------------------
# Functorial verification
# ---------------------------------------------------------------------------


def fibre_morphisms(s: ExactnessSequent, objs: list[Structure]) -> list[tuple[int, int, NatTransformation]]:
    """Arrows of the fibre category of alpha: transformations that are identities on X."""
    xs = s.x.vertices
    out = []
    for i, G1 in enumerate(objs):
        for j, G2 in enumerate(objs):
            fixed = {v: G1.category.identity(G1.object_map[v]) for v in xs}
            for m in enumerate_nat_transformations(G1, G2, fixed):
                out.append((i, j, m))
    return out


class _Counter:
    def __init__(self, cap: int):
        self.cap = cap
        self.n = 0

    def tick(self, what: str) -> None:
        self.n += 1
        if self.n > self.cap:
            raise CapExceeded(what, self.cap)


def _functorial_section(s: ExactnessSequent, objs, fibres, morphs, counter: _Counter):
    """Search a section on objects plus lifts of every morphism forming a functor."""
    index = {}
    for k, (i, j, m) in enumerate(morphs):
        index[(i, j, m.components)] = k
    comps = []  # (k2, k1, k21): m_k2 . m_k1 = m_k21
    for k1, (i, j, m1) in enumerate(morphs):
        for k2, (j2, l, m2) in enumerate(morphs):
            if j2 != j:
                continue
            m21 = compose_nat(m2, m1)
            comps.append((k2, k1, index[(i, l, m21.components)]))
    ids = {k for k, (i, j, m) in enumerate(morphs) if i == j and m == identity_nat(objs[i])}
    b_only = [v for v in s.b.vertices if v not in set(s.a.vertices)]

    for choice in product(*fibres):
        counter.tick("functorial sections")
        section = list(choice)
        cands = []
        ok = True
        for k, (i, j, m) in enumerate(morphs):
            Hi, Hj = section[i], section[j]
            if k in ids:
                cands.append([identity_nat(Hi)])
                continue
            fixed = dict(m.components)
            opts = enumerate_nat_transformations(Hi, Hj, fixed)
            if not opts:
                ok = False
                break
            cands.append(opts)
        if not ok:
            continue
        checks: list[list] = [[] for _ in morphs]
        for k2, k1, k21 in comps:
            checks[max(k2, k1, k21)].append((k2, k1, k21))
        chosen: list = [None] * len(morphs)

        def search(k: int) -> bool:
            if k == len(morphs):
                return True
            for t in cands[k]:
                counter.tick("functorial lifts")
                chosen[k] = t
                if all(_agree(compose_nat(chosen[a], chosen[b]), chosen[ab], b_only)
                       for a, b, ab in checks[k]):
                    if search(k + 1):
                        return True
            chosen[k] = None
            return False

        if search(0):
            return section
    return None


def _agree(t: NatTransformation, u: NatTransformation, vertices) -> bool:
    return all(t[v] == u[v] for v in vertices)


def exists_functorial_verification(s: ExactnessSequent, F: Structure, c: FiniteCategory,
                                   cap: int = DEFAULT_CAP, force_generic: bool = False,
                                   budget: int | None = None) -> VerificationDecision:
    """Is there a functor section of restriction along beta over the fibre of alpha at F?

    When beta carries a constructibility certificate the strict answer is
    returned (with ``delegated=True``) unless ``force_generic`` is set.
    """
    _check_input(s, F, c)
    if not force_generic:
        from .construct import certify_constructible

        try:
            cert = certify_constructible(s.a, s.b)
        except BudgetExceeded:
            cert = None
        if cert is not None and cert.ok:
            d = exists_verification(s, F, c, budget)
            return VerificationDecision(d.holds, FUNCTORIAL, d.witnesses, d.counterexample, delegated=True,
                                        note="beta is constructible; strict decision reused")

    objs = lifts(s, F, budget)
    fibres = []
    for G in objs:
        ext = fibre(s.beta, G, budget)
        if not ext:
            return VerificationDecision(False, FUNCTORIAL, counterexample=G, note="empty fibre")
        fibres.append(ext)
    counter = _Counter(cap)
    morphs = fibre_morphisms(s, objs)
    section = _functorial_section(s, objs, fibres, morphs, counter)
    if section is None:
        return VerificationDecision(False, FUNCTORIAL, note="no section extends to a functor",
                                    explored=counter.n)
    return VerificationDecision(True, FUNCTORIAL, tuple(zip(objs, section)), explored=counter.n)


def decide(s: ExactnessSequent, F: Structure, c: FiniteCategory, mode: str = STRICT,
           cap: int = DEFAULT_CAP, budget: int | None = None) -> VerificationDecision:
    if mode == STRICT:
        return exists_verification(s, F, c, budget)
    if mode == UPTO_ISO:
        return exists_verification_upto_iso(s, F, c, budget)
    if mode == FUNCTORIAL:
        return exists_functorial_verification(s, F, c, cap, budget=budget)
    raise ValueError(f"unknown mode {mode!r}")


def dual_decision_input(s: ExactnessSequent, F: Structure, c: FiniteCategory):
    """The dual triple (sequent, structure, category)."""
    return dualize_sequent(s), dualize_structure(F), c.dual()
