import runpy
from pathlib import Path

import pytest

from sketchkit import _kernels
from sketchkit.fincat import Diagram, DiagramPlan, enumerate_cones, is_universal_cone
from sketchkit.kernel import COLIMIT, strip_convergence
from sketchkit.models import HomPlan, enumerate_structures

BACKENDS = _kernels.available_backends()
pytestmark = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def _diagram_instances(corpus, limit_per_pair=15):
    """(category, diagram, orientation, apex index, legs) for every convergence under small structures."""
    for z in corpus.sketches.values():
        if not z.convergences or len(z.vertices) > 4:
            continue
        bare = strip_convergence(z)
        for c in corpus.categories.values():
            if len(c.objects) > 4:
                continue
            for F in enumerate_structures(bare, c)[:limit_per_pair]:
                for cond in z.convergences:
                    d = Diagram(cond.shape,
                                tuple((h, F.object_map[v]) for h, v in cond.nodes),
                                tuple((h, F.arrow_map[e]) for h, e in cond.arrows))
                    yield c, d, cond.kind, F.object_map[cond.apex], [F.arrow_map[e] for _, e in cond.legs]


def test_backend_switching():
    names = [b.BACKEND for b in BACKENDS]
    assert names == ["python", "cython"]
    prev = _kernels.use_backend("python")
    try:
        assert _kernels.BACKEND == "python"
    finally:
        _kernels.use_backend(prev)
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")


def test_search_homs_agree(corpus):
    checked = 0
    for z in corpus.sketches.values():
        for c in corpus.categories.values():
            if len(c.objects) ** len(z.vertices) > 5000:
                continue
            plan = HomPlan(z, c, {}, {})
            results = []
            for b in BACKENDS:
                raw, nodes = b.search_homs(plan, c.tables, 10**7)
                results.append((sorted(map(tuple, raw)), nodes))
            assert results[0] == results[1], (z.name, c.name)
            checked += 1
    assert checked > 200


def test_search_homs_budget_agrees(corpus):
    z, c = corpus.sketch("RegEpiRawB"), corpus.category("B2")
    plan = HomPlan(z, c, {}, {})
    for budget in (0, 5, 50):
        got = [b.search_homs(plan, c.tables, budget)[0] is None for b in BACKENDS]
        assert got[0] == got[1]


def test_cone_kernels_agree(corpus):
    n = 0
    for c, d, kind, apex, legs in _diagram_instances(corpus):
        reverse = kind == COLIMIT
        plan = DiagramPlan(c, d, reverse)
        tables = c.dual_tables if reverse else c.tables
        cones = [sorted((x, tuple(l)) for x, l in b.enumerate_cones(plan, tables, -1)) for b in BACKENDS]
        assert cones[0] == cones[1]
        ai = [c.arrow_index[a] for a in legs]
        verdicts = [bool(b.is_limit(plan, tables, c.object_index[apex], ai)) for b in BACKENDS]
        assert verdicts[0] == verdicts[1]
        n += 1
    assert n > 100


def test_public_results_identical_under_each_backend(corpus):
    def snapshot():
        out = []
        for c, d, kind, _apex, _legs in _diagram_instances(corpus, 5):
            out.append([(k, is_universal_cone(c, d, k)) for k in enumerate_cones(c, d, kind)])
        return out

    prev = _kernels.BACKEND
    try:
        results = {}
        for b in BACKENDS:
            _kernels.use_backend(b.BACKEND)
            for c in corpus.categories.values():
                c.__dict__.pop("_universal_cache", None)
            results[b.BACKEND] = snapshot()
        assert results["python"] == results["cython"]
    finally:
        _kernels.use_backend(prev)
        for c in corpus.categories.values():
            c.__dict__.pop("_universal_cache", None)


def test_benchmark_runs(capsys):
    bench = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    bench["main"](["--repeat", "1"])
    out = capsys.readouterr().out
    assert "search_homs" in out and "is_limit" in out
