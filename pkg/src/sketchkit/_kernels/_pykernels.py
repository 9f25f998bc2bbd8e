"""Pure-Python search kernels.

These are the reference implementations; ``_ckernels.pyx`` mirrors them
line for line with typed locals.  Inputs are flat integer arrays (see
``sketchkit._kernels.plans`` for the layout); outputs are plain tuples.
"""

BACKEND = "python"


def search_homs(plan, tables, budget):
    """Enumerate graph maps sketch -> category satisfying every commutativity.

    Returns ``(results, nodes)``; ``results`` is ``None`` when more than
    ``budget`` search nodes were visited.
    """
    var_kind = plan.var_kind
    var_ref = plan.var_ref
    dom_ptr = plan.dom_ptr
    dom_idx = plan.dom_idx
    edge_src = plan.edge_src
    edge_tgt = plan.edge_tgt
    edge_fixed = plan.edge_fixed
    chk_ptr = plan.chk_ptr
    chk_idx = plan.chk_idx
    comm_start = plan.comm_start
    lhs_ptr = plan.lhs_ptr
    lhs_idx = plan.lhs_idx
    rhs_ptr = plan.rhs_ptr
    rhs_idx = plan.rhs_idx
    n_vertices = plan.n_vertices
    n_edges = plan.n_edges
    n_vars = n_vertices + n_edges

    n_obj = tables.n_obj
    n_arr = tables.n_arr
    comp = tables.comp
    ident = tables.ident
    hom_ptr = tables.hom_ptr
    hom_idx = tables.hom_idx

    obj = [-1] * n_vertices
    arr = [-1] * n_edges
    results = []
    nodes = 0
    if n_vars == 0:
        return [()], 0

    lo = [0] * n_vars
    hi = [0] * n_vars
    cur = [0] * n_vars

    def enter(level):
        ref = var_ref[level]
        if var_kind[level] == 0:
            lo[level] = dom_ptr[ref]
            hi[level] = dom_ptr[ref + 1]
        else:
            s = obj[edge_src[ref]]
            t = obj[edge_tgt[ref]]
            p = s * n_obj + t
            fixed = edge_fixed[ref]
            if fixed >= 0:
                lo[level] = 0
                hi[level] = 0
                for k in range(hom_ptr[p], hom_ptr[p + 1]):
                    if hom_idx[k] == fixed:
                        hi[level] = 1
                        break
            else:
                lo[level] = hom_ptr[p]
                hi[level] = hom_ptr[p + 1]
        cur[level] = lo[level]

    level = 0
    enter(0)
    while level >= 0:
        if cur[level] >= hi[level]:
            ref = var_ref[level]
            if var_kind[level] == 0:
                obj[ref] = -1
            else:
                arr[ref] = -1
            level -= 1
            if level >= 0:
                cur[level] += 1
            continue
        ref = var_ref[level]
        if var_kind[level] == 0:
            obj[ref] = dom_idx[cur[level]]
        else:
            fixed = edge_fixed[ref]
            arr[ref] = fixed if fixed >= 0 else hom_idx[cur[level]]
        nodes += 1
        if nodes > budget:
            return None, nodes
        ok = True
        for k in range(chk_ptr[level], chk_ptr[level + 1]):
            ci = chk_idx[k]
            a = ident[obj[comm_start[ci]]]
            for j in range(lhs_ptr[ci], lhs_ptr[ci + 1]):
                a = comp[arr[lhs_idx[j]] * n_arr + a]
            b = ident[obj[comm_start[ci]]]
            for j in range(rhs_ptr[ci], rhs_ptr[ci + 1]):
                b = comp[arr[rhs_idx[j]] * n_arr + b]
            if a != b or a < 0:
                ok = False
                break
        if not ok:
            cur[level] += 1
            continue
        if level == n_vars - 1:
            results.append(tuple(obj) + tuple(arr))
            cur[level] += 1
            continue
        level += 1
        enter(level)
    return results, nodes


def _cone_families(diag, tables, x, out, limit):
    """Append to ``out`` every cone family from object ``x``; stop after ``limit``."""
    n_nodes = diag.n_nodes
    node_obj = diag.node_obj
    e_src = diag.e_src
    e_tgt = diag.e_tgt
    e_arr = diag.e_arr
    chk_ptr = diag.chk_ptr
    chk_idx = diag.chk_idx
    n_obj = tables.n_obj
    n_arr = tables.n_arr
    comp = tables.comp
    hom_ptr = tables.hom_ptr
    hom_idx = tables.hom_idx

    if n_nodes == 0:
        out.append(())
        return
    legs = [-1] * n_nodes
    lo = [0] * n_nodes
    hi = [0] * n_nodes
    cur = [0] * n_nodes
    level = 0
    p = x * n_obj + node_obj[0]
    lo[0] = hom_ptr[p]
    hi[0] = hom_ptr[p + 1]
    cur[0] = lo[0]
    while level >= 0:
        if cur[level] >= hi[level]:
            legs[level] = -1
            level -= 1
            if level >= 0:
                cur[level] += 1
            continue
        legs[level] = hom_idx[cur[level]]
        ok = True
        for k in range(chk_ptr[level], chk_ptr[level + 1]):
            e = chk_idx[k]
            if comp[e_arr[e] * n_arr + legs[e_src[e]]] != legs[e_tgt[e]]:
                ok = False
                break
        if not ok:
            cur[level] += 1
            continue
        if level == n_nodes - 1:
            out.append(tuple(legs))
            if len(out) >= limit:
                return
            cur[level] += 1
            continue
        level += 1
        p = x * n_obj + node_obj[level]
        lo[level] = hom_ptr[p]
        hi[level] = hom_ptr[p + 1]
        cur[level] = lo[level]


def enumerate_cones(diag, tables, apex):
    """All limit-orientation cones over ``diag``; ``apex < 0`` means every object."""
    out = []
    apexes = range(tables.n_obj) if apex < 0 else (apex,)
    for x in apexes:
        fams = []
        _cone_families(diag, tables, x, fams, 1 << 62)
        out.extend((x, f) for f in fams)
    return out


def is_limit(diag, tables, apex, legs):
    """Universality of a limit-orientation cone, assuming it commutes.

    For each object X the map ``u -> (leg_H . u)_H`` from hom(X, apex) into
    the cones from X must be a bijection.
    """
    n_nodes = diag.n_nodes
    n_obj = tables.n_obj
    n_arr = tables.n_arr
    comp = tables.comp
    hom_ptr = tables.hom_ptr
    hom_idx = tables.hom_idx
    for x in range(n_obj):
        p = x * n_obj + apex
        n_hom = hom_ptr[p + 1] - hom_ptr[p]
        seen = set()
        for k in range(hom_ptr[p], hom_ptr[p + 1]):
            u = hom_idx[k]
            seen.add(tuple(comp[legs[i] * n_arr + u] for i in range(n_nodes)))
        if len(seen) != n_hom:
            return False
        fams = []
        _cone_families(diag, tables, x, fams, n_hom + 1)
        if len(fams) != n_hom:
            return False
    return True
