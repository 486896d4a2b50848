"""Exact minimum-weight perfect matching on dense complete graphs.

This is a flat-array port of Galil's O(n^3) primal-dual blossom algorithm in
the van Rantwijk formulation, specialized to complete graphs with integer
weights, compiled with numba.  Minimum-weight perfect matching is obtained by
the standard transform w' = C - d with C large enough that every maximum-
weight matching is perfect; weights are doubled so all dual arithmetic stays
integral.

Vertex ids are 0..n-1; nontrivial blossoms occupy slots n..2n-1 managed by a
free list.  ``mate[v]`` is v's matched partner (-1 while single).  The
labeling, dual-update, and blossom bookkeeping follow the reference
formulation step for step; the two recursive pieces (blossom expansion and
augmentation) are converted to explicit work stacks, which is safe because a
sub-blossom's internal rematching touches only its own vertices.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _solve(W):  # noqa: C901 - single large kernel by design
    n = W.shape[0]
    NB = 2 * n
    INF = np.int64(1) << 62

    mate = np.full(n, -1, dtype=np.int64)
    label = np.zeros(NB, dtype=np.int64)
    le_v = np.full(NB, -1, dtype=np.int64)  # labeledge first endpoint
    le_w = np.full(NB, -1, dtype=np.int64)  # labeledge second endpoint
    inblossom = np.arange(n, dtype=np.int64)
    blossomparent = np.full(NB, -1, dtype=np.int64)
    blossombase = np.full(NB, -1, dtype=np.int64)
    blossombase[:n] = np.arange(n, dtype=np.int64)
    be_v = np.full(NB, -1, dtype=np.int64)  # bestedge
    be_w = np.full(NB, -1, dtype=np.int64)
    dualvar = np.full(n, W.max(), dtype=np.int64)
    blossomdual = np.zeros(NB, dtype=np.int64)
    used = np.zeros(NB, dtype=np.bool_)
    used[:n] = True
    allow = np.zeros((n, n), dtype=np.bool_)

    childs = np.full((NB, n + 2), -1, dtype=np.int64)
    childs_len = np.zeros(NB, dtype=np.int64)
    bedge_v = np.full((NB, n + 2), -1, dtype=np.int64)
    bedge_w = np.full((NB, n + 2), -1, dtype=np.int64)

    mbe_v = np.full((NB, NB), -1, dtype=np.int64)  # mybestedges lists
    mbe_w = np.full((NB, NB), -1, dtype=np.int64)
    mbe_len = np.full(NB, -1, dtype=np.int64)  # -1 means "not computed"

    queue = np.zeros(4 * NB + 16, dtype=np.int64)
    qlen = np.zeros(1, dtype=np.int64)

    freeslots = np.arange(n, NB, dtype=np.int64)[::-1].copy()
    fs_len = np.zeros(1, dtype=np.int64)
    fs_len[0] = n

    leaf_buf = np.zeros(n, dtype=np.int64)
    leaf_stack = np.zeros(NB + n, dtype=np.int64)
    path_buf = np.zeros(NB, dtype=np.int64)
    tmp_child = np.zeros(n + 2, dtype=np.int64)
    tmp_ev = np.zeros(n + 2, dtype=np.int64)
    tmp_ew = np.zeros(n + 2, dtype=np.int64)
    besteto_v = np.full(NB, -1, dtype=np.int64)
    besteto_w = np.full(NB, -1, dtype=np.int64)
    rot_buf = np.zeros(n + 2, dtype=np.int64)
    work_b = np.zeros(NB + n, dtype=np.int64)
    work_v = np.zeros(NB + n, dtype=np.int64)
    exp_stack = np.zeros(NB, dtype=np.int64)

    def slack(v, w):
        return dualvar[v] + dualvar[w] - 2 * W[v, w]

    def collect_leaves(b):
        """Write the leaf vertices of (possibly trivial) blossom b into
        leaf_buf; returns the count.  Order matches a stack walk of childs."""
        if b < n:
            leaf_buf[0] = b
            return 1
        cnt = 0
        sp = 0
        for i in range(childs_len[b]):
            leaf_stack[sp] = childs[b, i]
            sp += 1
        while sp > 0:
            sp -= 1
            t = leaf_stack[sp]
            if t < n:
                leaf_buf[cnt] = t
                cnt += 1
            else:
                for i in range(childs_len[t]):
                    leaf_stack[sp] = childs[t, i]
                    sp += 1
        return cnt

    def assign_label(w0, t, v0):
        b = inblossom[w0]
        assert label[w0] == 0 and label[b] == 0
        label[w0] = t
        label[b] = t
        if v0 >= 0:
            le_v[w0] = v0
            le_w[w0] = w0
            le_v[b] = v0
            le_w[b] = w0
        else:
            le_v[w0] = -1
            le_w[w0] = -1
            le_v[b] = -1
            le_w[b] = -1
        be_v[w0] = -1
        be_v[b] = -1
        if t == 1:
            cnt = collect_leaves(b)
            for i in range(cnt):
                queue[qlen[0]] = leaf_buf[i]
                qlen[0] += 1
        elif t == 2:
            base = blossombase[b]
            w1 = mate[base]
            assert w1 >= 0
            b1 = inblossom[w1]
            assert label[w1] == 0 and label[b1] == 0
            label[w1] = 1
            label[b1] = 1
            le_v[w1] = base
            le_w[w1] = w1
            le_v[b1] = base
            le_w[b1] = w1
            be_v[w1] = -1
            be_v[b1] = -1
            cnt = collect_leaves(b1)
            for i in range(cnt):
                queue[qlen[0]] = leaf_buf[i]
                qlen[0] += 1

    def scan_blossom(v, w):
        pc = 0
        base = -1
        while v != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = blossombase[b]
                break
            assert label[b] == 1
            path_buf[pc] = b
            pc += 1
            label[b] = 5
            if le_v[b] == -1:
                assert mate[blossombase[b]] == -1
                v = -1
            else:
                assert le_v[b] == mate[blossombase[b]]
                v = le_v[b]
                b = inblossom[v]
                assert label[b] == 2
                v = le_v[b]
            if w != -1:
                v, w = w, v
        for i in range(pc):
            label[path_buf[i]] = 1
        return base

    def add_blossom(base, v0, w0):
        bb = inblossom[base]
        bv = inblossom[v0]
        bw = inblossom[w0]
        fs_len[0] -= 1
        b = freeslots[fs_len[0]]
        used[b] = True
        blossombase[b] = base
        blossomparent[b] = -1
        blossomparent[bb] = b

        # Trace back from v to base, collecting sub-blossoms and edges.
        v = v0
        k1 = 0
        while bv != bb:
            blossomparent[bv] = b
            tmp_child[k1] = bv
            tmp_ev[k1] = le_v[bv]
            tmp_ew[k1] = le_w[bv]
            k1 += 1
            v = le_v[bv]
            bv = inblossom[v]
        # childs = [bb] + reversed(trace); edges = reversed(trace edges) + [(v0, w0)]
        childs[b, 0] = bb
        for i in range(k1):
            childs[b, 1 + i] = tmp_child[k1 - 1 - i]
            bedge_v[b, i] = tmp_ev[k1 - 1 - i]
            bedge_w[b, i] = tmp_ew[k1 - 1 - i]
        bedge_v[b, k1] = v0
        bedge_w[b, k1] = w0
        clen = k1 + 1
        # Trace back from w to base, appending directly.
        w = w0
        while bw != bb:
            blossomparent[bw] = b
            childs[b, clen] = bw
            bedge_v[b, clen] = le_w[bw]
            bedge_w[b, clen] = le_v[bw]
            clen += 1
            w = le_v[bw]
            bw = inblossom[w]
        childs_len[b] = clen

        assert label[bb] == 1
        label[b] = 1
        le_v[b] = le_v[bb]
        le_w[b] = le_w[bb]
        blossomdual[b] = 0
        cnt = collect_leaves(b)
        for i in range(cnt):
            if label[inblossom[leaf_buf[i]]] == 2:
                queue[qlen[0]] = leaf_buf[i]
                qlen[0] += 1
            inblossom[leaf_buf[i]] = b

        # Compute the new blossom's least-slack edges to other S-blossoms.
        for i in range(NB):
            besteto_v[i] = -1
            besteto_w[i] = -1
        for ci in range(clen):
            bv2 = childs[b, ci]
            if bv2 >= n and mbe_len[bv2] >= 0:
                for k in range(mbe_len[bv2]):
                    i0 = mbe_v[bv2, k]
                    j0 = mbe_w[bv2, k]
                    if inblossom[j0] == b:
                        i0, j0 = j0, i0
                    bj = inblossom[j0]
                    if bj != b and label[bj] == 1:
                        if besteto_v[bj] == -1 or slack(i0, j0) < slack(
                            besteto_v[bj], besteto_w[bj]
                        ):
                            besteto_v[bj] = i0
                            besteto_w[bj] = j0
                mbe_len[bv2] = -1
            else:
                cnt2 = collect_leaves(bv2)
                for li in range(cnt2):
                    i0 = leaf_buf[li]
                    for j0 in range(n):
                        if j0 == i0:
                            continue
                        bj = inblossom[j0]
                        if bj != b and label[bj] == 1:
                            if besteto_v[bj] == -1 or slack(i0, j0) < slack(
                                besteto_v[bj], besteto_w[bj]
                            ):
                                besteto_v[bj] = i0
                                besteto_w[bj] = j0
            be_v[bv2] = -1
        mlen = 0
        for i in range(NB):
            if besteto_v[i] != -1:
                mbe_v[b, mlen] = besteto_v[i]
                mbe_w[b, mlen] = besteto_w[i]
                mlen += 1
        mbe_len[b] = mlen
        be_v[b] = -1
        be_w[b] = -1
        best = INF
        for k in range(mlen):
            ks = slack(mbe_v[b, k], mbe_w[b, k])
            if ks < best:
                best = ks
                be_v[b] = mbe_v[b, k]
                be_w[b] = mbe_w[b, k]

    def expand_blossom(b0, endstage):
        esp = 0
        exp_stack[esp] = b0
        esp += 1
        while esp > 0:
            esp -= 1
            b = exp_stack[esp]
            clen = childs_len[b]
            for i in range(clen):
                s = childs[b, i]
                blossomparent[s] = -1
                if s < n:
                    inblossom[s] = s
                elif endstage and blossomdual[s] == 0:
                    exp_stack[esp] = s
                    esp += 1
                else:
                    cnt = collect_leaves(s)
                    for li in range(cnt):
                        inblossom[leaf_buf[li]] = s
            if (not endstage) and label[b] == 2:
                entrychild = inblossom[le_w[b]]
                j = 0
                for i in range(clen):
                    if childs[b, i] == entrychild:
                        j = i
                        break
                i_entry = j
                if j & 1:
                    j -= clen
                    jstep = 1
                else:
                    jstep = -1
                v = le_v[b]
                w = le_w[b]
                while j != 0:
                    if jstep == 1:
                        p = bedge_v[b, j % clen]
                        q = bedge_w[b, j % clen]
                    else:
                        q = bedge_v[b, (j - 1) % clen]
                        p = bedge_w[b, (j - 1) % clen]
                    label[w] = 0
                    label[q] = 0
                    assign_label(w, 2, v)
                    allow[p, q] = True
                    allow[q, p] = True
                    j += jstep
                    if jstep == 1:
                        v = bedge_v[b, j % clen]
                        w = bedge_w[b, j % clen]
                    else:
                        w = bedge_v[b, (j - 1) % clen]
                        v = bedge_w[b, (j - 1) % clen]
                    allow[v, w] = True
                    allow[w, v] = True
                    j += jstep
                bw = childs[b, j % clen]
                label[w] = 2
                label[bw] = 2
                le_v[w] = v
                le_w[w] = w
                le_v[bw] = v
                le_w[bw] = w
                be_v[bw] = -1
                j += jstep
                while childs[b, j % clen] != entrychild:
                    bv = childs[b, j % clen]
                    if label[bv] == 1:
                        j += jstep
                        continue
                    vv = -1
                    if bv >= n:
                        cnt = collect_leaves(bv)
                        for li in range(cnt):
                            vv = leaf_buf[li]
                            if label[vv] != 0:
                                break
                    else:
                        vv = bv
                    if vv >= 0 and label[vv] != 0:
                        assert label[vv] == 2
                        assert inblossom[vv] == bv
                        label[vv] = 0
                        label[mate[blossombase[bv]]] = 0
                        assign_label(vv, 2, le_v[vv])
                    j += jstep
            # Remove the expanded blossom.
            label[b] = 0
            le_v[b] = -1
            le_w[b] = -1
            be_v[b] = -1
            blossomparent[b] = -1
            blossombase[b] = -1
            blossomdual[b] = 0
            mbe_len[b] = -1
            used[b] = False
            childs_len[b] = 0
            freeslots[fs_len[0]] = b
            fs_len[0] += 1

    def augment_blossom(b0, v0):
        wsp = 0
        work_b[wsp] = b0
        work_v[wsp] = v0
        wsp += 1
        while wsp > 0:
            wsp -= 1
            b = work_b[wsp]
            v = work_v[wsp]
            # Bubble up from v to an immediate sub-blossom of b.
            t = v
            while blossomparent[t] != b:
                t = blossomparent[t]
            if t >= n:
                work_b[wsp] = t
                work_v[wsp] = v
                wsp += 1
            clen = childs_len[b]
            i_start = 0
            for i in range(clen):
                if childs[b, i] == t:
                    i_start = i
                    break
            j = i_start
            if i_start & 1:
                j -= clen
                jstep = 1
            else:
                jstep = -1
            while j != 0:
                j += jstep
                t = childs[b, j % clen]
                if jstep == 1:
                    ww = bedge_v[b, j % clen]
                    xx = bedge_w[b, j % clen]
                else:
                    xx = bedge_v[b, (j - 1) % clen]
                    ww = bedge_w[b, (j - 1) % clen]
                if t >= n:
                    work_b[wsp] = t
                    work_v[wsp] = ww
                    wsp += 1
                j += jstep
                t = childs[b, j % clen]
                if t >= n:
                    work_b[wsp] = t
                    work_v[wsp] = xx
                    wsp += 1
                mate[ww] = xx
                mate[xx] = ww
            # Rotate childs/edges so the new base child is first.
            if i_start > 0:
                for i in range(clen):
                    rot_buf[i] = childs[b, (i_start + i) % clen]
                for i in range(clen):
                    childs[b, i] = rot_buf[i]
                for i in range(clen):
                    rot_buf[i] = bedge_v[b, (i_start + i) % clen]
                for i in range(clen):
                    bedge_v[b, i] = rot_buf[i]
                for i in range(clen):
                    rot_buf[i] = bedge_w[b, (i_start + i) % clen]
                for i in range(clen):
                    bedge_w[b, i] = rot_buf[i]
            # Deferred-recursion equivalent of base = blossombase[childs[0]]:
            # each work item's postcondition is blossombase[b] == v.
            blossombase[b] = v

    def augment_matching(v0, w0):
        for half in range(2):
            if half == 0:
                s = v0
                j = w0
            else:
                s = w0
                j = v0
            while True:
                bs = inblossom[s]
                assert label[bs] == 1
                if le_v[bs] == -1:
                    assert mate[blossombase[bs]] == -1
                else:
                    assert le_v[bs] == mate[blossombase[bs]]
                if bs >= n:
                    augment_blossom(bs, s)
                mate[s] = j
                if le_v[bs] == -1:
                    break
                t = le_v[bs]
                bt = inblossom[t]
                assert label[bt] == 2
                s = le_v[bt]
                j = le_w[bt]
                assert blossombase[bt] == t
                if bt >= n:
                    augment_blossom(bt, j)
                mate[j] = s

    # ------------------------------------------------------------------
    # main loop: one stage per augmentation
    # ------------------------------------------------------------------
    while True:
        label[:] = 0
        le_v[:] = -1
        le_w[:] = -1
        be_v[:] = -1
        be_w[:] = -1
        mbe_len[:] = -1
        allow[:, :] = False
        qlen[0] = 0

        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                assign_label(v, 1, -1)

        augmented = False
        while True:
            while qlen[0] > 0 and not augmented:
                qlen[0] -= 1
                v = queue[qlen[0]]
                assert label[inblossom[v]] == 1
                for w in range(n):
                    if w == v:
                        continue
                    bv = inblossom[v]
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = INF
                    if not allow[v, w]:
                        kslack = slack(v, w)
                        if kslack <= 0:
                            allow[v, w] = True
                            allow[w, v] = True
                    if allow[v, w]:
                        if label[bw] == 0:
                            assign_label(w, 2, v)
                        elif label[bw] == 1:
                            base = scan_blossom(v, w)
                            if base >= 0:
                                add_blossom(base, v, w)
                            else:
                                augment_matching(v, w)
                                augmented = True
                                break
                        elif label[w] == 0:
                            assert label[bw] == 2
                            label[w] = 2
                            le_v[w] = v
                            le_w[w] = w
                    elif label[bw] == 1:
                        if be_v[bv] == -1 or kslack < slack(be_v[bv], be_w[bv]):
                            be_v[bv] = v
                            be_w[bv] = w
                    elif label[w] == 0:
                        if be_v[w] == -1 or kslack < slack(be_v[w], be_w[w]):
                            be_v[w] = v
                            be_w[w] = w
            if augmented:
                break

            deltatype = 1
            delta = dualvar[0]
            for v in range(1, n):
                if dualvar[v] < delta:
                    delta = dualvar[v]
            deltaedge_v = -1
            deltaedge_w = -1
            deltablossom = -1
            for v in range(n):
                if label[inblossom[v]] == 0 and be_v[v] != -1:
                    d = slack(be_v[v], be_w[v])
                    if d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge_v = be_v[v]
                        deltaedge_w = be_w[v]
            for b in range(NB):
                if (
                    used[b]
                    and blossomparent[b] == -1
                    and label[b] == 1
                    and be_v[b] != -1
                ):
                    ks = slack(be_v[b], be_w[b])
                    assert ks % 2 == 0
                    d = ks // 2
                    if d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge_v = be_v[b]
                        deltaedge_w = be_w[b]
            for b in range(n, NB):
                if (
                    used[b]
                    and blossomparent[b] == -1
                    and label[b] == 2
                    and blossomdual[b] < delta
                ):
                    delta = blossomdual[b]
                    deltatype = 4
                    deltablossom = b

            for v in range(n):
                lab = label[inblossom[v]]
                if lab == 1:
                    dualvar[v] -= delta
                elif lab == 2:
                    dualvar[v] += delta
            for b in range(n, NB):
                if used[b] and blossomparent[b] == -1:
                    if label[b] == 1:
                        blossomdual[b] += delta
                    elif label[b] == 2:
                        blossomdual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allow[deltaedge_v, deltaedge_w] = True
                allow[deltaedge_w, deltaedge_v] = True
                queue[qlen[0]] = deltaedge_v
                qlen[0] += 1
            elif deltatype == 3:
                allow[deltaedge_v, deltaedge_w] = True
                allow[deltaedge_w, deltaedge_v] = True
                queue[qlen[0]] = deltaedge_v
                qlen[0] += 1
            else:
                expand_blossom(deltablossom, False)

        for v in range(n):
            if mate[v] >= 0:
                assert mate[mate[v]] == v

        if not augmented:
            break

        for b in range(n, NB):
            if (
                used[b]
                and blossomparent[b] == -1
                and label[b] == 1
                and blossomdual[b] == 0
            ):
                expand_blossom(b, True)

    return mate


def min_weight_perfect_matching(dist: np.ndarray) -> np.ndarray:
    """Exact minimum-weight perfect matching of a complete graph.

    dist: symmetric (n, n) integer distance matrix, n even.  Returns mate[v],
    the partner of each vertex.  Raises if no perfect matching results (which
    cannot happen for even n on a complete graph).
    """
    dist = np.ascontiguousarray(dist, dtype=np.int64)
    n = dist.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n % 2:
        raise ValueError("perfect matching needs an even number of vertices")
    dmax = int(dist.max()) if n > 1 else 0
    shift = (n + 2) * (dmax + 1)
    W = 2 * (shift - dist)
    np.fill_diagonal(W, 0)
    mate = _solve(W)
    if (mate < 0).any():
        raise RuntimeError("matching is not perfect; this is a bug")
    return mate
