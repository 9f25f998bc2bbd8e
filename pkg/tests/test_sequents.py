import pytest

from sketchkit.errors import CapExceeded, PreconditionError
from sketchkit.kernel import EMPTY_SKETCH, dualize_sketch
from sketchkit.models import Structure, enumerate_structures, fibre, find_isomorphism, restrict_structure
from sketchkit.sequents import (
    FUNCTORIAL,
    STRICT,
    UPTO_ISO,
    ExactnessSequent,
    decide,
    dual_decision_input,
    dualize_sequent,
    exists_functorial_verification,
    exists_verification,
    exists_verification_upto_iso,
    fibre_morphisms,
    is_unconditional_finite_kind,
    lifts,
    validate_sequent,
)


def F(corpus, name):
    return corpus.structure(name)


def test_corpus_sequents_are_valid(corpus):
    for s in corpus.sequents.values():
        assert validate_sequent(s).ok, s.name


def test_malformed_sequents(seq, sk):
    s = seq("MonoSeq")
    assert not validate_sequent(ExactnessSequent("swap", s.x, s.b, s.a)).ok
    assert not validate_sequent(ExactnessSequent("bad-x", sk("Pair"), s.a, s.b)).ok


def test_unconditional_examples(seq):
    assert is_unconditional_finite_kind(seq("MonoSeq"))
    assert is_unconditional_finite_kind(seq("ReflSeq1"))
    assert not is_unconditional_finite_kind(seq("ChoiceSeq"))


def test_unconditional_is_self_dual(corpus):
    for s in corpus.sequents.values():
        assert is_unconditional_finite_kind(s) == is_unconditional_finite_kind(dualize_sequent(s))


def test_iso_sequent(corpus, seq, cat):
    d = exists_verification(seq("IsoSeq"), F(corpus, "F_iso2"), cat("Iso2"))
    assert d.holds and len(d.witnesses) == 1
    d = exists_verification(seq("IsoSeq"), F(corpus, "F_two"), cat("Two"))
    assert not d.holds
    G = d.counterexample
    assert G.sketch.name == "ArrowCat" and G.arrow_map["f"] == "f"


def test_mono_sequent(corpus, seq, cat):
    assert not exists_verification(seq("MonoSeq"), F(corpus, "F_parfork_h"), cat("ParFork")).holds
    assert exists_verification(seq("MonoSeq"), F(corpus, "F_parfork_g1"), cat("ParFork")).holds
    assert not exists_verification_upto_iso(seq("MonoSeq"), F(corpus, "F_parfork_h"), cat("ParFork")).holds


def test_identity_beta_always_holds(corpus):
    for s in corpus.sequents.values():
        t = ExactnessSequent("id", s.x, s.a, s.a)
        for cname in ("Two", "Iso2", "B2"):
            c = corpus.category(cname)
            for Fx in enumerate_structures(s.x, c)[:5]:
                for mode in (STRICT, UPTO_ISO, FUNCTORIAL):
                    d = decide(t, Fx, c, mode)
                    assert d.holds
                    if mode == STRICT:
                        assert all(g == h for g, h in d.witnesses)
                    else:
                        assert all(find_isomorphism(g, h) is not None for g, h in d.witnesses)


def test_product_sequent_on_posets(seq, cat):
    s = seq("ProdSeq")
    for cname, want in (("B2", True), ("Vee", False), ("One", True)):
        c = cat(cname)
        F0 = Structure(EMPTY_SKETCH, c, (), ())
        for mode in (STRICT, UPTO_ISO, FUNCTORIAL):
            assert decide(s, F0, c, mode).holds is want, (cname, mode)


def test_witness_restricts_to_g(corpus, seq, cat):
    s = seq("ProdSeq")
    d = exists_verification(s, Structure(EMPTY_SKETCH, cat("B2"), (), ()), cat("B2"))
    assert len(d.witnesses) == 16
    for G, H in d.witnesses:
        assert restrict_structure(s.beta, H) == G
        assert d.witness_for(G) == H


def test_functorial_delegates_when_constructible(corpus, seq, cat):
    d = exists_functorial_verification(seq("IsoSeq"), F(corpus, "F_iso2"), cat("Iso2"))
    assert d.delegated and d.holds
    g = exists_functorial_verification(seq("IsoSeq"), F(corpus, "F_iso2"), cat("Iso2"), force_generic=True)
    assert not g.delegated and g.holds


def test_functorial_on_nonconstructible_sequent(seq, cat):
    s = seq("ReflSeq1")
    c = cat("Two")
    for Fx in enumerate_structures(s.x, c):
        d = exists_functorial_verification(s, Fx, c)
        assert not d.delegated
        if d.holds:
            assert exists_verification(s, Fx, c).holds


def test_functorial_cap(seq, cat):
    s = seq("ProdSeq")
    c = cat("B2")
    with pytest.raises(CapExceeded):
        exists_functorial_verification(s, Structure(EMPTY_SKETCH, c, (), ()), c, cap=3, force_generic=True)


def test_fibre_morphisms_fix_x(seq, cat):
    s = seq("MonoSeq")
    c = cat("Iso2")
    Fx = Structure.from_mapping(s.x, c, {"A": "X", "B": "Y", "f": "f"})
    objs = lifts(s, Fx)
    for i, j, m in fibre_morphisms(s, objs):
        for v in s.x.vertices:
            assert m[v] == c.identity(Fx.object_map[v])


def test_input_mismatch(corpus, seq, cat):
    with pytest.raises(PreconditionError):
        exists_verification(seq("ProdSeq"), F(corpus, "F_iso2"), cat("Iso2"))
    with pytest.raises(PreconditionError):
        exists_verification(seq("IsoSeq"), F(corpus, "F_iso2"), cat("Two"))


def test_dual_sequents(seq, sk):
    d = dualize_sequent(seq("ProdSeq"))
    assert d.b == dualize_sketch(sk("ProdB"))
    assert dualize_sequent(d) == seq("ProdSeq")


def test_duality_of_verification(corpus):
    for s in corpus.sequents.values():
        for cname in ("Two", "Iso2", "ParFork", "B2", "Vee"):
            c = corpus.category(cname)
            for Fx in enumerate_structures(s.x, c)[:6]:
                ds, dF, dc = dual_decision_input(s, Fx, c)
                assert exists_verification(s, Fx, c).holds == exists_verification(ds, dF, dc).holds


def test_witnesses_unique_up_to_iso(corpus, seq):
    s = seq("ProdSeq")
    for cname in ("B2", "Iso2", "ParFork"):
        c = corpus.category(cname)
        for G in lifts(s, Structure(EMPTY_SKETCH, c, (), ())):
            hs = fibre(s.beta, G)
            for H in hs[1:]:
                assert find_isomorphism(hs[0], H) is not None
