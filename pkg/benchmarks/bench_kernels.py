"""Time the pure-Python and compiled search kernels on corpus workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

from sketchkit import _kernels, load
from sketchkit.cli import corpus_path
from sketchkit.fincat import Diagram, DiagramPlan
from sketchkit.kernel import COLIMIT, strip_convergence
from sketchkit.models import HomPlan, enumerate_structures


def hom_workload(doc):
    jobs = []
    for z in doc.sketches.values():
        for c in doc.categories.values():
            if len(c.objects) ** len(z.vertices) <= 5000:
                jobs.append((HomPlan(z, c, {}, {}), c.tables))
    return jobs


def cone_workload(doc):
    jobs = []
    for z in doc.sketches.values():
        if not z.convergences:
            continue
        bare = strip_convergence(z)
        for c in doc.categories.values():
            for F in enumerate_structures(bare, c)[:20]:
                for cond in z.convergences:
                    d = Diagram(cond.shape,
                                tuple((h, F.object_map[v]) for h, v in cond.nodes),
                                tuple((h, F.arrow_map[e]) for h, e in cond.arrows))
                    rev = cond.kind == COLIMIT
                    legs = [c.arrow_index[F.arrow_map[e]] for _, e in cond.legs]
                    jobs.append((DiagramPlan(c, d, rev), c.dual_tables if rev else c.tables,
                                 c.object_index[F.object_map[cond.apex]], legs))
    return jobs


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    doc = load(corpus_path())
    homs, cones = hom_workload(doc), cone_workload(doc)
    print(f"{len(homs)} structure searches, {len(cones)} cone problems, best of {args.repeat}")

    cases = {
        "search_homs": lambda b: [b.search_homs(p, t, 10**8) for p, t in homs],
        "enumerate_cones": lambda b: [b.enumerate_cones(p, t, -1) for p, t, _, _ in cones],
        "is_limit": lambda b: [b.is_limit(p, t, a, l) for p, t, a, l in cones],
    }
    backends = _kernels.available_backends()
    if len(backends) < 2:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'kernel':<16}" + "".join(f"{b.BACKEND:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        times = [min(timeit.repeat(lambda b=b: fn(b), number=1, repeat=args.repeat)) for b in backends]
        row = f"{name:<16}" + "".join(f"{t * 1000:>10.1f}ms" for t in times)
        if len(times) > 1:
            row += f"   {times[0] / times[1]:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
