"""Exact maximum-weight matching (blossom algorithm) compiled with numba.

Flat-array port of the classic publicly documented O(n^3) algorithm with
the endpoint representation: edge k owns endpoints 2k and 2k+1, and
neighbend lists, labels, dual variables, and nested blossom structure
are all kept in preallocated integer arrays so the whole solver runs in
nopython mode.  Recursion in blossom expansion/augmentation is replaced
by explicit stacks.  Edge weights are doubled internally so every dual
variable stays integral.

Used by the decoder for minimum-weight perfect matching via the usual
complement transform; exactness is pinned by the factorial brute-force
oracle and a networkx cross-check in the tests.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# pair_cost entries at or above this mean "no edge" in dp_match
DP_INF = 1 << 60


@njit(cache=True)
def _leaves_into(b, nvertex, childs, childs_len, out):
    """Collect the vertices inside blossom b into out; returns count."""
    if b < nvertex:
        out[0] = b
        return 1
    n_out = 0
    stack = np.empty(childs.shape[1] * 2 + 4, dtype=np.int64)
    stack_len = 0
    stack[stack_len] = b
    stack_len += 1
    while stack_len > 0:
        stack_len -= 1
        t = stack[stack_len]
        if t < nvertex:
            out[n_out] = t
            n_out += 1
        else:
            for i in range(childs_len[t]):
                c = childs[t, i]
                if c < nvertex:
                    out[n_out] = c
                    n_out += 1
                else:
                    if stack_len >= stack.shape[0]:
                        grown = np.empty(stack.shape[0] * 2, dtype=np.int64)
                        grown[: stack.shape[0]] = stack
                        stack = grown
                    stack[stack_len] = c
                    stack_len += 1
    return n_out


@njit(cache=True)
def max_weight_matching(n, eu, ev, ew_in, maxcardinality):
    """mate[v] = partner vertex or -1.  Weights may be any integers."""
    nedge = eu.shape[0]
    mate = np.full(n, -1, dtype=np.int64)
    if n == 0 or nedge == 0:
        return mate
    ew = ew_in * 2  # keep duals integral

    maxweight = 0
    for k in range(nedge):
        if ew[k] > maxweight:
            maxweight = ew[k]

    endpoint = np.empty(2 * nedge, dtype=np.int64)
    for k in range(nedge):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]

    # CSR adjacency of endpoints p with endpoint[p ^ 1] == v
    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(nedge):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    for v in range(n):
        deg[v + 1] += deg[v]
    nb_start = deg
    nb_dat = np.empty(2 * nedge, dtype=np.int64)
    fill = nb_start[:n].copy()
    for k in range(nedge):
        nb_dat[fill[eu[k]]] = 2 * k + 1
        fill[eu[k]] += 1
        nb_dat[fill[ev[k]]] = 2 * k
        fill[ev[k]] += 1

    two_n = 2 * n
    label = np.zeros(two_n, dtype=np.int64)
    labelend = np.full(two_n, -1, dtype=np.int64)
    inblossom = np.arange(n, dtype=np.int64)
    blossomparent = np.full(two_n, -1, dtype=np.int64)
    width = n + 2
    childs = np.zeros((two_n, width), dtype=np.int64)
    childs_len = np.zeros(two_n, dtype=np.int64)
    endps = np.zeros((two_n, width), dtype=np.int64)
    blossombase = np.full(two_n, -1, dtype=np.int64)
    for v in range(n):
        blossombase[v] = v
    bestedge = np.full(two_n, -1, dtype=np.int64)
    bbe = np.zeros((two_n, n + 1), dtype=np.int64)
    bbe_len = np.full(two_n, -1, dtype=np.int64)  # -1 means unset
    unused = np.empty(n, dtype=np.int64)
    unused_len = 0
    for b in range(2 * n - 1, n - 1, -1):
        unused[unused_len] = b
        unused_len += 1
    dualvar = np.zeros(two_n, dtype=np.int64)
    for v in range(n):
        dualvar[v] = maxweight
    allowedge = np.zeros(nedge, dtype=np.bool_)
    queue = np.empty(4 * n + 16, dtype=np.int64)
    qlen = 0

    leaves_buf = np.empty(n, dtype=np.int64)
    leaves_buf2 = np.empty(n, dtype=np.int64)
    scan_path = np.empty(two_n, dtype=np.int64)
    exp_stack = np.empty(two_n, dtype=np.int64)
    aug_stack = np.empty((two_n, 2), dtype=np.int64)
    rot_tmp = np.empty(width, dtype=np.int64)

    for _stage in range(n):
        for i in range(two_n):
            label[i] = 0
            bestedge[i] = -1
        for b in range(n, two_n):
            bbe_len[b] = -1
        for k in range(nedge):
            allowedge[k] = False
        qlen = 0

        # ---- local helper logic is inlined below; the loop structure
        # mirrors the reference implementation stage by stage ----

        # assignLabel(v, 1, -1) for all exposed vertices
        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                # inline assign_label(v, 1, -1)
                w_ = v
                t_ = 1
                p_ = -1
                while True:
                    b_ = inblossom[w_]
                    label[w_] = t_
                    label[b_] = t_
                    labelend[w_] = p_
                    labelend[b_] = p_
                    bestedge[w_] = -1
                    bestedge[b_] = -1
                    if t_ == 1:
                        cnt = _leaves_into(b_, n, childs, childs_len, leaves_buf)
                        for li in range(cnt):
                            if qlen >= queue.shape[0]:
                                grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                                grown[:qlen] = queue[:qlen]
                                queue = grown
                            queue[qlen] = leaves_buf[li]
                            qlen += 1
                        break
                    else:
                        base_ = blossombase[b_]
                        w_ = endpoint[mate[base_]]
                        p_ = mate[base_] ^ 1
                        t_ = 1

        augmented = False
        while True:
            while qlen > 0 and not augmented:
                qlen -= 1
                v = queue[qlen]
                for pi in range(nb_start[v], nb_start[v + 1]):
                    p = nb_dat[pi]
                    k = p >> 1
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    kslack = dualvar[eu[k]] + dualvar[ev[k]] - 2 * ew[k]
                    if not allowedge[k]:
                        if kslack <= 0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[w]] == 0:
                            # assign_label(w, 2, p ^ 1): T then S on the mate
                            w_ = w
                            t_ = 2
                            p_ = p ^ 1
                            while True:
                                b_ = inblossom[w_]
                                label[w_] = t_
                                label[b_] = t_
                                labelend[w_] = p_
                                labelend[b_] = p_
                                bestedge[w_] = -1
                                bestedge[b_] = -1
                                if t_ == 1:
                                    cnt = _leaves_into(b_, n, childs, childs_len, leaves_buf)
                                    for li in range(cnt):
                                        if qlen >= queue.shape[0]:
                                            grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                                            grown[:qlen] = queue[:qlen]
                                            queue = grown
                                        queue[qlen] = leaves_buf[li]
                                        qlen += 1
                                    break
                                else:
                                    base_ = blossombase[b_]
                                    w_ = endpoint[mate[base_]]
                                    p_ = mate[base_] ^ 1
                                    t_ = 1
                        elif label[inblossom[w]] == 1:
                            # scanBlossom(v, w)
                            pv = v
                            pw = w
                            base = -1
                            path_len = 0
                            while pv != -1 or pw != -1:
                                b_ = inblossom[pv]
                                if label[b_] & 4:
                                    base = blossombase[b_]
                                    break
                                scan_path[path_len] = b_
                                path_len += 1
                                label[b_] = 5
                                if labelend[b_] == -1:
                                    pv = -1
                                else:
                                    pv = endpoint[labelend[b_]]
                                    b_ = inblossom[pv]
                                    pv = endpoint[labelend[b_]]
                                if pw != -1:
                                    tmp_ = pv
                                    pv = pw
                                    pw = tmp_
                            for si in range(path_len):
                                label[scan_path[si]] = 1

                            if base >= 0:
                                # addBlossom(base, k)
                                bv_ = inblossom[eu[k]]
                                bw_ = inblossom[ev[k]]
                                bb = inblossom[base]
                                unused_len -= 1
                                b = unused[unused_len]
                                blossombase[b] = base
                                blossomparent[b] = -1
                                blossomparent[bb] = b
                                # trace from v-side back to base
                                plen = 0
                                elen = 0
                                node = bv_
                                vv = eu[k]
                                while node != bb:
                                    blossomparent[node] = b
                                    childs[b, plen] = node
                                    plen += 1
                                    endps[b, elen] = labelend[node]
                                    elen += 1
                                    vv = endpoint[labelend[node]]
                                    node = inblossom[vv]
                                childs[b, plen] = bb
                                plen += 1
                                # reverse childs/endps collected so far
                                for i2 in range(plen // 2):
                                    t3 = childs[b, i2]
                                    childs[b, i2] = childs[b, plen - 1 - i2]
                                    childs[b, plen - 1 - i2] = t3
                                for i2 in range(elen // 2):
                                    t3 = endps[b, i2]
                                    endps[b, i2] = endps[b, elen - 1 - i2]
                                    endps[b, elen - 1 - i2] = t3
                                endps[b, elen] = 2 * k
                                elen += 1
                                # trace from w-side back to base
                                node = bw_
                                ww = ev[k]
                                while node != bb:
                                    blossomparent[node] = b
                                    childs[b, plen] = node
                                    plen += 1
                                    endps[b, elen] = labelend[node] ^ 1
                                    elen += 1
                                    ww = endpoint[labelend[node]]
                                    node = inblossom[ww]
                                childs_len[b] = plen
                                label[b] = 1
                                labelend[b] = labelend[bb]
                                dualvar[b] = 0
                                cnt = _leaves_into(b, n, childs, childs_len, leaves_buf)
                                for li in range(cnt):
                                    lv = leaves_buf[li]
                                    if label[inblossom[lv]] == 2:
                                        if qlen >= queue.shape[0]:
                                            grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                                            grown[:qlen] = queue[:qlen]
                                            queue = grown
                                        queue[qlen] = lv
                                        qlen += 1
                                    inblossom[lv] = b
                                # recompute best edges of the new blossom
                                bestedgeto = np.full(two_n, -1, dtype=np.int64)
                                for ci in range(plen):
                                    bv2 = childs[b, ci]
                                    if bbe_len[bv2] < 0:
                                        cnt2 = _leaves_into(bv2, n, childs, childs_len, leaves_buf2)
                                        for li2 in range(cnt2):
                                            lv2 = leaves_buf2[li2]
                                            for pj in range(nb_start[lv2], nb_start[lv2 + 1]):
                                                k2 = nb_dat[pj] >> 1
                                                j2 = ev[k2] if inblossom[ev[k2]] != b else eu[k2]
                                                bj = inblossom[j2]
                                                if bj != b and label[bj] == 1:
                                                    sl2 = dualvar[eu[k2]] + dualvar[ev[k2]] - 2 * ew[k2]
                                                    old = bestedgeto[bj]
                                                    if old == -1 or sl2 < dualvar[eu[old]] + dualvar[ev[old]] - 2 * ew[old]:
                                                        bestedgeto[bj] = k2
                                    else:
                                        for li2 in range(bbe_len[bv2]):
                                            k2 = bbe[bv2, li2]
                                            j2 = ev[k2] if inblossom[ev[k2]] != b else eu[k2]
                                            bj = inblossom[j2]
                                            if bj != b and label[bj] == 1:
                                                sl2 = dualvar[eu[k2]] + dualvar[ev[k2]] - 2 * ew[k2]
                                                old = bestedgeto[bj]
                                                if old == -1 or sl2 < dualvar[eu[old]] + dualvar[ev[old]] - 2 * ew[old]:
                                                    bestedgeto[bj] = k2
                                    bbe_len[bv2] = -1
                                    bestedge[bv2] = -1
                                m = 0
                                for bj in range(two_n):
                                    if bestedgeto[bj] != -1:
                                        bbe[b, m] = bestedgeto[bj]
                                        m += 1
                                bbe_len[b] = m
                                bestedge[b] = -1
                                for li2 in range(m):
                                    k2 = bbe[b, li2]
                                    sl2 = dualvar[eu[k2]] + dualvar[ev[k2]] - 2 * ew[k2]
                                    old = bestedge[b]
                                    if old == -1 or sl2 < dualvar[eu[old]] + dualvar[ev[old]] - 2 * ew[old]:
                                        bestedge[b] = k2
                            else:
                                # augmentMatching(k)
                                for side in range(2):
                                    if side == 0:
                                        s = eu[k]
                                        p2 = 2 * k + 1
                                    else:
                                        s = ev[k]
                                        p2 = 2 * k
                                    while True:
                                        bs = inblossom[s]
                                        if bs >= n:
                                            # augmentBlossom(bs, s) via stack
                                            asl = 0
                                            aug_stack[asl, 0] = bs
                                            aug_stack[asl, 1] = s
                                            asl += 1
                                            while asl > 0:
                                                asl -= 1
                                                ab = aug_stack[asl, 0]
                                                av = aug_stack[asl, 1]
                                                t2 = av
                                                while blossomparent[t2] != ab:
                                                    t2 = blossomparent[t2]
                                                if t2 >= n:
                                                    aug_stack[asl, 0] = t2
                                                    aug_stack[asl, 1] = av
                                                    asl += 1
                                                L = childs_len[ab]
                                                i0 = 0
                                                for ci in range(L):
                                                    if childs[ab, ci] == t2:
                                                        i0 = ci
                                                        break
                                                j = i0
                                                if i0 & 1:
                                                    j -= L
                                                    jstep = 1
                                                    endptrick = 0
                                                else:
                                                    jstep = -1
                                                    endptrick = 1
                                                while j != 0:
                                                    j += jstep
                                                    tt = childs[ab, j % L]
                                                    pp = endps[ab, (j - endptrick) % L] ^ endptrick
                                                    if tt >= n:
                                                        aug_stack[asl, 0] = tt
                                                        aug_stack[asl, 1] = endpoint[pp]
                                                        asl += 1
                                                    j += jstep
                                                    tt = childs[ab, j % L]
                                                    if tt >= n:
                                                        aug_stack[asl, 0] = tt
                                                        aug_stack[asl, 1] = endpoint[pp ^ 1]
                                                        asl += 1
                                                    mate[endpoint[pp]] = pp ^ 1
                                                    mate[endpoint[pp ^ 1]] = pp
                                                # rotate childs/endps so t2 comes first
                                                for ci in range(L):
                                                    rot_tmp[ci] = childs[ab, (i0 + ci) % L]
                                                for ci in range(L):
                                                    childs[ab, ci] = rot_tmp[ci]
                                                for ci in range(L):
                                                    rot_tmp[ci] = endps[ab, (i0 + ci) % L]
                                                for ci in range(L):
                                                    endps[ab, ci] = rot_tmp[ci]
                                                # re-rooting leaves av exposed, so it is the new base
                                                blossombase[ab] = av
                                        mate[s] = p2
                                        if labelend[bs] == -1:
                                            break
                                        t2 = endpoint[labelend[bs]]
                                        bt = inblossom[t2]
                                        s = endpoint[labelend[bt]]
                                        j2 = endpoint[labelend[bt] ^ 1]
                                        if bt >= n:
                                            asl = 0
                                            aug_stack[asl, 0] = bt
                                            aug_stack[asl, 1] = j2
                                            asl += 1
                                            while asl > 0:
                                                asl -= 1
                                                ab = aug_stack[asl, 0]
                                                av = aug_stack[asl, 1]
                                                t3 = av
                                                while blossomparent[t3] != ab:
                                                    t3 = blossomparent[t3]
                                                if t3 >= n:
                                                    aug_stack[asl, 0] = t3
                                                    aug_stack[asl, 1] = av
                                                    asl += 1
                                                L = childs_len[ab]
                                                i0 = 0
                                                for ci in range(L):
                                                    if childs[ab, ci] == t3:
                                                        i0 = ci
                                                        break
                                                j = i0
                                                if i0 & 1:
                                                    j -= L
                                                    jstep = 1
                                                    endptrick = 0
                                                else:
                                                    jstep = -1
                                                    endptrick = 1
                                                while j != 0:
                                                    j += jstep
                                                    tt = childs[ab, j % L]
                                                    pp = endps[ab, (j - endptrick) % L] ^ endptrick
                                                    if tt >= n:
                                                        aug_stack[asl, 0] = tt
                                                        aug_stack[asl, 1] = endpoint[pp]
                                                        asl += 1
                                                    j += jstep
                                                    tt = childs[ab, j % L]
                                                    if tt >= n:
                                                        aug_stack[asl, 0] = tt
                                                        aug_stack[asl, 1] = endpoint[pp ^ 1]
                                                        asl += 1
                                                    mate[endpoint[pp]] = pp ^ 1
                                                    mate[endpoint[pp ^ 1]] = pp
                                                for ci in range(L):
                                                    rot_tmp[ci] = childs[ab, (i0 + ci) % L]
                                                for ci in range(L):
                                                    childs[ab, ci] = rot_tmp[ci]
                                                for ci in range(L):
                                                    rot_tmp[ci] = endps[ab, (i0 + ci) % L]
                                                for ci in range(L):
                                                    endps[ab, ci] = rot_tmp[ci]
                                                blossombase[ab] = av
                                        mate[j2] = labelend[bt]
                                        p2 = labelend[bt] ^ 1
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b_ = inblossom[v]
                        old = bestedge[b_]
                        if old == -1 or kslack < dualvar[eu[old]] + dualvar[ev[old]] - 2 * ew[old]:
                            bestedge[b_] = k
                    elif label[w] == 0:
                        old = bestedge[w]
                        if old == -1 or kslack < dualvar[eu[old]] + dualvar[ev[old]] - 2 * ew[old]:
                            bestedge[w] = k

            if augmented:
                break

            deltatype = -1
            delta = 0
            deltaedge = -1
            deltablossom = -1
            if not maxcardinality:
                deltatype = 1
                delta = dualvar[0]
                for v in range(n):
                    if dualvar[v] < delta:
                        delta = dualvar[v]
                if delta < 0:
                    delta = 0
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    k2 = bestedge[v]
                    d = dualvar[eu[k2]] + dualvar[ev[k2]] - 2 * ew[k2]
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = k2
            for b in range(two_n):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    k2 = bestedge[b]
                    ks = dualvar[eu[k2]] + dualvar[ev[k2]] - 2 * ew[k2]
                    d = ks // 2
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = k2
            for b in range(n, two_n):
                if (blossombase[b] >= 0 and blossomparent[b] == -1 and label[b] == 2
                        and (deltatype == -1 or dualvar[b] < delta)):
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                deltatype = 1
                delta = dualvar[0]
                for v in range(n):
                    if dualvar[v] < delta:
                        delta = dualvar[v]
                if delta < 0:
                    delta = 0

            for v in range(n):
                lab = label[inblossom[v]]
                if lab == 1:
                    dualvar[v] -= delta
                elif lab == 2:
                    dualvar[v] += delta
            for b in range(n, two_n):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i2 = eu[deltaedge]
                if label[inblossom[i2]] == 0:
                    i2 = ev[deltaedge]
                if qlen >= queue.shape[0]:
                    grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                    grown[:qlen] = queue[:qlen]
                    queue = grown
                queue[qlen] = i2
                qlen += 1
            elif deltatype == 3:
                allowedge[deltaedge] = True
                if qlen >= queue.shape[0]:
                    grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                    grown[:qlen] = queue[:qlen]
                    queue = grown
                queue[qlen] = eu[deltaedge]
                qlen += 1
            else:
                # expandBlossom(deltablossom, endstage=False)
                b = deltablossom
                esl = 0
                exp_stack[esl] = b
                esl += 1
                while esl > 0:
                    esl -= 1
                    bb = exp_stack[esl]
                    for ci in range(childs_len[bb]):
                        s2 = childs[bb, ci]
                        blossomparent[s2] = -1
                        if s2 < n:
                            inblossom[s2] = s2
                        else:
                            cnt = _leaves_into(s2, n, childs, childs_len, leaves_buf)
                            for li in range(cnt):
                                inblossom[leaves_buf[li]] = s2
                    if label[bb] == 2:
                        entrychild = inblossom[endpoint[labelend[bb] ^ 1]]
                        L = childs_len[bb]
                        j = 0
                        for ci in range(L):
                            if childs[bb, ci] == entrychild:
                                j = ci
                                break
                        if j & 1:
                            j -= L
                            jstep = 1
                            endptrick = 0
                        else:
                            jstep = -1
                            endptrick = 1
                        p = labelend[bb]
                        while j != 0:
                            label[endpoint[p ^ 1]] = 0
                            label[endpoint[endps[bb, (j - endptrick) % L] ^ endptrick ^ 1]] = 0
                            # assign_label(endpoint[p ^ 1], 2, p)
                            w_ = endpoint[p ^ 1]
                            t_ = 2
                            p_ = p
                            while True:
                                b_ = inblossom[w_]
                                label[w_] = t_
                                label[b_] = t_
                                labelend[w_] = p_
                                labelend[b_] = p_
                                bestedge[w_] = -1
                                bestedge[b_] = -1
                                if t_ == 1:
                                    cnt = _leaves_into(b_, n, childs, childs_len, leaves_buf)
                                    for li in range(cnt):
                                        if qlen >= queue.shape[0]:
                                            grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                                            grown[:qlen] = queue[:qlen]
                                            queue = grown
                                        queue[qlen] = leaves_buf[li]
                                        qlen += 1
                                    break
                                else:
                                    base_ = blossombase[b_]
                                    w_ = endpoint[mate[base_]]
                                    p_ = mate[base_] ^ 1
                                    t_ = 1
                            allowedge[endps[bb, (j - endptrick) % L] >> 1] = True
                            j += jstep
                            p = endps[bb, (j - endptrick) % L] ^ endptrick
                            allowedge[p >> 1] = True
                            j += jstep
                        # relabel the base child from the last edge walked,
                        # not from the expanding blossom's own entry edge
                        bv2 = childs[bb, j % L]
                        label[endpoint[p ^ 1]] = 2
                        label[bv2] = 2
                        labelend[endpoint[p ^ 1]] = p
                        labelend[bv2] = p
                        bestedge[bv2] = -1
                        j += jstep
                        while childs[bb, j % L] != entrychild:
                            bv2 = childs[bb, j % L]
                            if label[bv2] == 1:
                                j += jstep
                                continue
                            cnt = _leaves_into(bv2, n, childs, childs_len, leaves_buf)
                            lv = -1
                            for li in range(cnt):
                                if label[leaves_buf[li]] != 0:
                                    lv = leaves_buf[li]
                                    break
                            if lv >= 0:
                                label[lv] = 0
                                label[endpoint[mate[blossombase[bv2]]]] = 0
                                # assign_label(lv, 2, labelend[lv])
                                w_ = lv
                                t_ = 2
                                p_ = labelend[lv]
                                while True:
                                    b_ = inblossom[w_]
                                    label[w_] = t_
                                    label[b_] = t_
                                    labelend[w_] = p_
                                    labelend[b_] = p_
                                    bestedge[w_] = -1
                                    bestedge[b_] = -1
                                    if t_ == 1:
                                        cnt2 = _leaves_into(b_, n, childs, childs_len, leaves_buf2)
                                        for li2 in range(cnt2):
                                            if qlen >= queue.shape[0]:
                                                grown = np.empty(queue.shape[0] * 2, dtype=np.int64)
                                                grown[:qlen] = queue[:qlen]
                                                queue = grown
                                            queue[qlen] = leaves_buf2[li2]
                                            qlen += 1
                                        break
                                    else:
                                        base_ = blossombase[b_]
                                        w_ = endpoint[mate[base_]]
                                        p_ = mate[base_] ^ 1
                                        t_ = 1
                            j += jstep
                    # recycle bb
                    label[bb] = -1
                    labelend[bb] = -1
                    childs_len[bb] = 0
                    blossombase[bb] = -1
                    bbe_len[bb] = -1
                    bestedge[bb] = -1
                    unused[unused_len] = bb
                    unused_len += 1

        if not augmented:
            break

        # expand all S-blossoms with zero dual at stage end
        for b in range(n, two_n):
            if (blossomparent[b] == -1 and blossombase[b] >= 0
                    and label[b] == 1 and dualvar[b] == 0):
                esl = 0
                exp_stack[esl] = b
                esl += 1
                while esl > 0:
                    esl -= 1
                    bb = exp_stack[esl]
                    for ci in range(childs_len[bb]):
                        s2 = childs[bb, ci]
                        blossomparent[s2] = -1
                        if s2 < n:
                            inblossom[s2] = s2
                        elif dualvar[s2] == 0:
                            exp_stack[esl] = s2
                            esl += 1
                        else:
                            cnt = _leaves_into(s2, n, childs, childs_len, leaves_buf)
                            for li in range(cnt):
                                inblossom[leaves_buf[li]] = s2
                    label[bb] = -1
                    labelend[bb] = -1
                    childs_len[bb] = 0
                    blossombase[bb] = -1
                    bbe_len[bb] = -1
                    bestedge[bb] = -1
                    unused[unused_len] = bb
                    unused_len += 1

    out = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if mate[v] >= 0:
            out[v] = endpoint[mate[v]]
    return out


@njit(cache=True)
def dp_match(k, pair_cost, boundary_cost):
    """Optimal matching of k events by bitmask DP, each event either paired
    (pair_cost[i, j], entries >= DP_INF meaning no edge) or sent to its
    boundary (boundary_cost[i], must be finite).  Cost ties break toward
    more pair matches (a pair can be one fault mechanism, two boundaries
    are always two), then toward the lowest partner index.
    partner[i] = j or -1 for boundary."""
    INF = np.int64(1) << 60
    # scaled costs: pair edges get a -1 bonus; k+1 exceeds any possible
    # pair count, so real cost stays the primary criterion
    scale = np.int64(k + 1)
    size = 1 << k
    f = np.empty(size, dtype=np.int64)
    f[0] = 0
    for mask in range(1, size):
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask & ~(1 << i)
        best = scale * boundary_cost[i] + f[rest]
        m = rest
        while m:
            j = 0
            while not (m >> j) & 1:
                j += 1
            m &= m - 1
            w = pair_cost[i, j]
            if w < INF:
                c = scale * w - 1 + f[rest & ~(1 << j)]
                if c < best:
                    best = c
        f[mask] = best

    partner = np.full(k, -1, dtype=np.int64)
    mask = size - 1
    while mask:
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask & ~(1 << i)
        matched = False
        m = rest
        while m:
            j = 0
            while not (m >> j) & 1:
                j += 1
            m &= m - 1
            w = pair_cost[i, j]
            if w < INF and scale * w - 1 + f[rest & ~(1 << j)] == f[mask]:
                partner[i] = j
                partner[j] = i
                mask = rest & ~(1 << j)
                matched = True
                break
        if not matched:
            mask = rest
    return partner


@njit(cache=True)
def min_weight_perfect_matching(n, eu, ev, ew):
    """Minimum-weight perfect matching via the complement transform.
    Requires a perfect matching to exist on the given edges."""
    if n == 0:
        return np.full(0, -1, dtype=np.int64)
    big = 1
    for k in range(ew.shape[0]):
        if ew[k] + 1 > big:
            big = ew[k] + 1
    flipped = np.empty_like(ew)
    for k in range(ew.shape[0]):
        flipped[k] = big - ew[k]
    mate = max_weight_matching(n, eu, ev, flipped, True)
    for v in range(n):
        if mate[v] < 0:
            raise ValueError("graph admits no perfect matching")
    return mate
