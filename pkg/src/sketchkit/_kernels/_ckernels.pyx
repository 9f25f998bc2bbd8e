# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; same contracts as ``_pykernels``."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free

BACKEND = "cython"


cdef int* _ints(Py_ssize_t n) except NULL:
    cdef int* p = <int*> PyMem_Malloc((n if n > 0 else 1) * sizeof(int))
    if p == NULL:
        raise MemoryError()
    return p


def search_homs(plan, tables, long long budget):
    cdef const int[:] var_kind = plan.var_kind
    cdef const int[:] var_ref = plan.var_ref
    cdef const int[:] dom_ptr = plan.dom_ptr
    cdef const int[:] dom_idx = plan.dom_idx
    cdef const int[:] edge_src = plan.edge_src
    cdef const int[:] edge_tgt = plan.edge_tgt
    cdef const int[:] edge_fixed = plan.edge_fixed
    cdef const int[:] chk_ptr = plan.chk_ptr
    cdef const int[:] chk_idx = plan.chk_idx
    cdef const int[:] comm_start = plan.comm_start
    cdef const int[:] lhs_ptr = plan.lhs_ptr
    cdef const int[:] lhs_idx = plan.lhs_idx
    cdef const int[:] rhs_ptr = plan.rhs_ptr
    cdef const int[:] rhs_idx = plan.rhs_idx
    cdef int n_vertices = plan.n_vertices
    cdef int n_edges = plan.n_edges
    cdef int n_vars = n_vertices + n_edges

    cdef int n_obj = tables.n_obj
    cdef int n_arr = tables.n_arr
    cdef const int[:] comp = tables.comp
    cdef const int[:] ident = tables.ident
    cdef const int[:] hom_ptr = tables.hom_ptr
    cdef const int[:] hom_idx = tables.hom_idx

    if n_vars == 0:
        return [()], 0

    cdef int* obj = _ints(n_vertices)
    cdef int* arr = _ints(n_edges)
    cdef int* lo = _ints(n_vars)
    cdef int* hi = _ints(n_vars)
    cdef int* cur = _ints(n_vars)
    cdef int level, ref, s, t, p, k, j, ci, a, b, fixed, i
    cdef bint ok
    cdef long long nodes = 0
    results = []
    try:
        for i in range(n_vertices):
            obj[i] = -1
        for i in range(n_edges):
            arr[i] = -1
        level = 0
        # enter(0)
        ref = var_ref[0]
        if var_kind[0] == 0:
            lo[0] = dom_ptr[ref]
            hi[0] = dom_ptr[ref + 1]
        else:
            lo[0] = 0
            hi[0] = 0
        cur[0] = lo[0]
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
                if fixed >= 0:
                    arr[ref] = fixed
                else:
                    arr[ref] = hom_idx[cur[level]]
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
                results.append(
                    tuple([obj[i] for i in range(n_vertices)])
                    + tuple([arr[i] for i in range(n_edges)])
                )
                cur[level] += 1
                continue
            level += 1
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
        return results, nodes
    finally:
        PyMem_Free(obj)
        PyMem_Free(arr)
        PyMem_Free(lo)
        PyMem_Free(hi)
        PyMem_Free(cur)


cdef Py_ssize_t _cone_families(diag, tables, int x, list out, Py_ssize_t limit) except -1:
    cdef int n_nodes = diag.n_nodes
    cdef const int[:] node_obj = diag.node_obj
    cdef const int[:] e_src = diag.e_src
    cdef const int[:] e_tgt = diag.e_tgt
    cdef const int[:] e_arr = diag.e_arr
    cdef const int[:] chk_ptr = diag.chk_ptr
    cdef const int[:] chk_idx = diag.chk_idx
    cdef int n_obj = tables.n_obj
    cdef int n_arr = tables.n_arr
    cdef const int[:] comp = tables.comp
    cdef const int[:] hom_ptr = tables.hom_ptr
    cdef const int[:] hom_idx = tables.hom_idx
    cdef int level, p, k, e, i
    cdef bint ok

    if n_nodes == 0:
        out.append(())
        return 1
    cdef int* legs = _ints(n_nodes)
    cdef int* hi = _ints(n_nodes)
    cdef int* cur = _ints(n_nodes)
    try:
        level = 0
        p = x * n_obj + node_obj[0]
        cur[0] = hom_ptr[p]
        hi[0] = hom_ptr[p + 1]
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
                out.append(tuple([legs[i] for i in range(n_nodes)]))
                if len(out) >= limit:
                    return len(out)
                cur[level] += 1
                continue
            level += 1
            p = x * n_obj + node_obj[level]
            cur[level] = hom_ptr[p]
            hi[level] = hom_ptr[p + 1]
        return len(out)
    finally:
        PyMem_Free(legs)
        PyMem_Free(hi)
        PyMem_Free(cur)


def enumerate_cones(diag, tables, int apex):
    cdef int x
    out = []
    apexes = range(tables.n_obj) if apex < 0 else (apex,)
    for x in apexes:
        fams = []
        _cone_families(diag, tables, x, fams, 1 << 62)
        out.extend([(x, f) for f in fams])
    return out


def is_limit(diag, tables, int apex, legs):
    cdef int n_nodes = diag.n_nodes
    cdef int n_obj = tables.n_obj
    cdef int n_arr = tables.n_arr
    cdef const int[:] comp = tables.comp
    cdef const int[:] hom_ptr = tables.hom_ptr
    cdef const int[:] hom_idx = tables.hom_idx
    cdef int x, p, k, u, i, n_hom
    cdef list fams
    for x in range(n_obj):
        p = x * n_obj + apex
        n_hom = hom_ptr[p + 1] - hom_ptr[p]
        seen = set()
        for k in range(hom_ptr[p], hom_ptr[p + 1]):
            u = hom_idx[k]
            seen.add(tuple([comp[<int> legs[i] * n_arr + u] for i in range(n_nodes)]))
        if len(seen) != n_hom:
            return False
        fams = []
        _cone_families(diag, tables, x, fams, n_hom + 1)
        if len(fams) != n_hom:
            return False
    return True
