# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels: the per-pixel hot loops.

Connected-component labeling (two-pass union-find), exact squared Euclidean
distance transform (column sweep + row-wise lower envelope of parabolas),
overlap contingency counting, and inner-boundary extraction. Contracts match
the numpy fallback in ``_numpy``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline cnp.int32_t _find(cnp.int32_t* parent, cnp.int32_t x) noexcept nogil:
    cdef cnp.int32_t root = x
    cdef cnp.int32_t cur, nxt
    while parent[root] != root:
        root = parent[root]
    cur = x
    while parent[cur] != root:
        nxt = parent[cur]
        parent[cur] = root
        cur = nxt
    return root


def label_components(mask, int connectivity=8):
    """Label connected foreground regions.

    Returns ``(labels, count)`` where labels run 1..count in raster order of
    each component's first pixel.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity!r}")
    m_arr = np.ascontiguousarray(np.asarray(mask) != 0, dtype=np.uint8)
    if m_arr.ndim != 2:
        raise ValueError("mask must be 2D")
    cdef cnp.uint8_t[:, ::1] m = m_arr
    cdef Py_ssize_t h = m.shape[0]
    cdef Py_ssize_t w = m.shape[1]
    out_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] out = out_arr
    if h == 0 or w == 0:
        return out_arr, 0
    # at most one provisional label per two pixels in a raster row
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    final_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    cdef cnp.int32_t[::1] final = final_arr
    cdef cnp.int32_t nprov = 0, nfinal = 0
    cdef cnp.int32_t best, r
    cdef cnp.int32_t[4] roots
    cdef int nroots, k
    cdef Py_ssize_t i, j
    cdef bint eight = connectivity == 8

    with nogil:
        for i in range(h):
            for j in range(w):
                if m[i, j] == 0:
                    continue
                nroots = 0
                if j > 0 and m[i, j - 1]:
                    roots[nroots] = _find(&parent[0], out[i, j - 1])
                    nroots += 1
                if i > 0:
                    if m[i - 1, j]:
                        roots[nroots] = _find(&parent[0], out[i - 1, j])
                        nroots += 1
                    if eight:
                        if j > 0 and m[i - 1, j - 1]:
                            roots[nroots] = _find(&parent[0], out[i - 1, j - 1])
                            nroots += 1
                        if j < w - 1 and m[i - 1, j + 1]:
                            roots[nroots] = _find(&parent[0], out[i - 1, j + 1])
                            nroots += 1
                if nroots == 0:
                    nprov += 1
                    parent[nprov] = nprov
                    out[i, j] = nprov
                else:
                    best = roots[0]
                    for k in range(1, nroots):
                        if roots[k] < best:
                            best = roots[k]
                    out[i, j] = best
                    for k in range(nroots):
                        if roots[k] != best:
                            parent[roots[k]] = best

        # second pass: sequential final labels in first-occurrence raster order
        for i in range(h):
            for j in range(w):
                if out[i, j] == 0:
                    continue
                r = _find(&parent[0], out[i, j])
                if final[r] == 0:
                    nfinal += 1
                    final[r] = nfinal
                out[i, j] = final[r]

    return out_arr, int(nfinal)


def sq_edt(mask):
    """Exact squared Euclidean distance to the nearest True pixel (int64)."""
    m_arr = np.ascontiguousarray(np.asarray(mask) != 0, dtype=np.uint8)
    if m_arr.ndim != 2:
        raise ValueError("mask must be 2D")
    if not m_arr.any():
        raise ValueError("sq_edt requires at least one foreground pixel")
    cdef cnp.uint8_t[:, ::1] m = m_arr
    cdef Py_ssize_t h = m.shape[0]
    cdef Py_ssize_t w = m.shape[1]
    g_arr = np.empty((h, w), dtype=np.int64)
    out_arr = np.empty((h, w), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] g = g_arr
    cdef cnp.int64_t[:, ::1] out = out_arr
    v_arr = np.empty(w, dtype=np.intp)
    z_arr = np.empty(w + 1, dtype=np.float64)
    cdef Py_ssize_t[::1] v = v_arr
    cdef double[::1] z = z_arr
    cdef cnp.int64_t sentinel = <cnp.int64_t>(h + w + 1)
    cdef cnp.int64_t d, fq, fv, dq
    cdef Py_ssize_t i, j, q, k
    cdef double s, inf = np.inf

    with nogil:
        # vertical pass: row distance to nearest foreground within each column
        for j in range(w):
            d = sentinel
            for i in range(h):
                if m[i, j]:
                    d = 0
                elif d < sentinel:
                    d = d + 1
                g[i, j] = d
            d = sentinel
            for i in range(h - 1, -1, -1):
                if m[i, j]:
                    d = 0
                elif d < sentinel:
                    d = d + 1
                if d < g[i, j]:
                    g[i, j] = d

        # horizontal pass: lower envelope of parabolas j' -> (j-j')^2 + g^2
        for i in range(h):
            k = 0
            v[0] = 0
            z[0] = -inf
            z[1] = inf
            for q in range(1, w):
                fq = g[i, q] * g[i, q]
                while True:
                    fv = g[i, v[k]] * g[i, v[k]]
                    s = (<double>(fq - fv) + <double>(q * q - v[k] * v[k])) / <double>(2 * (q - v[k]))
                    if s <= z[k]:
                        k -= 1
                    else:
                        break
                k += 1
                v[k] = q
                z[k] = s
                z[k + 1] = inf
            k = 0
            for q in range(w):
                while z[k + 1] < q:
                    k += 1
                dq = q - v[k]
                out[i, q] = dq * dq + g[i, v[k]] * g[i, v[k]]

    return out_arr


def overlap_counts(gt, seg):
    """Sparse contingency of positive-label overlaps.

    Returns ``(gt_labels, seg_labels, counts)`` int64 arrays sorted
    lexicographically by (gt label, seg label); zero overlaps are absent.
    """
    g_arr = np.ascontiguousarray(gt, dtype=np.int32)
    s_arr = np.ascontiguousarray(seg, dtype=np.int32)
    if g_arr.shape != s_arr.shape or g_arr.ndim != 2:
        raise ValueError("gt and seg must be 2D arrays of identical shape")
    cdef const cnp.int32_t[:, ::1] g = g_arr
    cdef const cnp.int32_t[:, ::1] s = s_arr
    cdef Py_ssize_t h = g.shape[0]
    cdef Py_ssize_t w = g.shape[1]
    cdef cnp.int64_t gmax = 0, smax = 0
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(h):
            for j in range(w):
                if g[i, j] > gmax:
                    gmax = g[i, j]
                if s[i, j] > smax:
                    smax = s[i, j]
    empty = np.empty(0, dtype=np.int64)
    if gmax == 0 or smax == 0:
        return empty, empty, empty
    cdef cnp.int64_t base = smax + 1
    if (gmax + 1) * base <= (1 << 24):
        return _overlap_dense(g, s, gmax, base)
    # rare huge-label-range path
    pairs = {}
    for i in range(h):
        for j in range(w):
            if g[i, j] > 0 and s[i, j] > 0:
                key = (g[i, j], s[i, j])
                pairs[key] = pairs.get(key, 0) + 1
    items = sorted(pairs.items())
    gi = np.array([p[0][0] for p in items], dtype=np.int64)
    sj = np.array([p[0][1] for p in items], dtype=np.int64)
    cnt = np.array([p[1] for p in items], dtype=np.int64)
    return gi, sj, cnt


cdef _overlap_dense(const cnp.int32_t[:, ::1] g, const cnp.int32_t[:, ::1] s,
                    cnp.int64_t gmax, cnp.int64_t base):
    cdef Py_ssize_t h = g.shape[0]
    cdef Py_ssize_t w = g.shape[1]
    dense_arr = np.zeros((gmax + 1) * base, dtype=np.int64)
    cdef cnp.int64_t[::1] dense = dense_arr
    cdef Py_ssize_t i, j
    cdef cnp.int64_t code, nnz = 0
    with nogil:
        for i in range(h):
            for j in range(w):
                if g[i, j] > 0 and s[i, j] > 0:
                    code = <cnp.int64_t>g[i, j] * base + s[i, j]
                    if dense[code] == 0:
                        nnz += 1
                    dense[code] += 1
    gi_arr = np.empty(nnz, dtype=np.int64)
    sj_arr = np.empty(nnz, dtype=np.int64)
    cnt_arr = np.empty(nnz, dtype=np.int64)
    cdef cnp.int64_t[::1] gi = gi_arr
    cdef cnp.int64_t[::1] sj = sj_arr
    cdef cnp.int64_t[::1] cnt = cnt_arr
    cdef cnp.int64_t a, b, pos = 0
    with nogil:
        for a in range(1, gmax + 1):
            for b in range(1, base):
                code = a * base + b
                if dense[code] > 0:
                    gi[pos] = a
                    sj[pos] = b
                    cnt[pos] = dense[code]
                    pos += 1
    return gi_arr, sj_arr, cnt_arr


def inner_boundary(labels):
    """Mask of positive pixels with a 4-neighbor of different value or on the
    image edge."""
    lab_arr = np.ascontiguousarray(labels, dtype=np.int32)
    if lab_arr.ndim != 2:
        raise ValueError("labels must be 2D")
    cdef const cnp.int32_t[:, ::1] lab = lab_arr
    cdef Py_ssize_t h = lab.shape[0]
    cdef Py_ssize_t w = lab.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef cnp.int32_t c
    with nogil:
        for i in range(h):
            for j in range(w):
                c = lab[i, j]
                if c <= 0:
                    continue
                if (i == 0 or i == h - 1 or j == 0 or j == w - 1
                        or lab[i - 1, j] != c or lab[i + 1, j] != c
                        or lab[i, j - 1] != c or lab[i, j + 1] != c):
                    out[i, j] = 1
    return out_arr.view(np.bool_)
