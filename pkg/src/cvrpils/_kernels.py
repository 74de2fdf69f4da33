"""Compiled kernels for route mutation, move evaluation and the search passes.

Solutions are stored as doubly linked lists over an extended node index space:
0 is the real depot (never linked), 1..n are customers, and n+1+r is the head
sentinel of route r.  Sentinels map to vertex 0 for all distance and demand
lookups.  Mutable scalars travel in ``st`` (int64[3] = cost, total excess,
number of route slots).  ``pos``/``pld`` hold the position and prefix load of
every node inside its route and are rebuilt after each structural change.

All kernels are deterministic; randomness stays in the Python layer.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Move kind codes, shared with the Python layer.
SHIFT_INTER = 1
SWAP_STAR = 2
CROSS = 3
SHIFT_INTRA = 4
SWAP_INTRA = 5
TWO_OPT = 6

NULL_DELTA = np.int64(1) << np.int64(60)


@njit(cache=True, inline="always")
def _dist(coords, a, b):
    dx = coords[a, 0] - coords[b, 0]
    dy = coords[a, 1] - coords[b, 1]
    return np.int64(math.sqrt(dx * dx + dy * dy) + 0.5)


@njit(cache=True, inline="always")
def _rid(x, n):
    # real vertex id of a linked node (sentinels act as the depot)
    return 0 if x > n else x


@njit(cache=True, inline="always")
def _relu(x):
    return x if x > 0 else 0


@njit(cache=True)
def _rebuild(n, r, nxt, rte, pos, pld, demand):
    h = n + 1 + r
    rte[h] = r
    pos[h] = 0
    pld[h] = 0
    a = nxt[h]
    p = 0
    acc = 0
    while a != h:
        p += 1
        acc += demand[a]
        rte[a] = r
        pos[a] = p
        pld[a] = acc
        a = nxt[a]


@njit(cache=True)
def _detach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v):
    r = rte[v]
    p = prv[v]
    s = nxt[v]
    rp = _rid(p, n)
    rs = _rid(s, n)
    st[0] -= _dist(coords, rp, v) + _dist(coords, v, rs) - _dist(coords, rp, rs)
    st[1] -= _relu(load[r] - cap)
    load[r] -= demand[v]
    st[1] += _relu(load[r] - cap)
    nxt[p] = s
    prv[s] = p
    rte[v] = -1
    nxt[v] = -1
    prv[v] = -1
    _rebuild(n, r, nxt, rte, pos, pld, demand)


@njit(cache=True)
def _attach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, aft):
    r = rte[aft]
    b = nxt[aft]
    ra = _rid(aft, n)
    rb = _rid(b, n)
    st[0] += _dist(coords, ra, v) + _dist(coords, v, rb) - _dist(coords, ra, rb)
    st[1] -= _relu(load[r] - cap)
    load[r] += demand[v]
    st[1] += _relu(load[r] - cap)
    nxt[aft] = v
    prv[v] = aft
    nxt[v] = b
    prv[b] = v
    rte[v] = r
    _rebuild(n, r, nxt, rte, pos, pld, demand)


@njit(cache=True)
def _ev_relocate(n, coords, nxt, prv, v, aft):
    # delta of moving customer v to the position right after node aft
    if aft == v or nxt[aft] == v:
        return NULL_DELTA
    p = _rid(prv[v], n)
    s = _rid(nxt[v], n)
    rem = _dist(coords, p, v) + _dist(coords, v, s) - _dist(coords, p, s)
    ra = _rid(aft, n)
    rb = _rid(nxt[aft], n)
    add = _dist(coords, ra, v) + _dist(coords, v, rb) - _dist(coords, ra, rb)
    return add - rem


@njit(cache=True)
def _ev_swap1(n, coords, nxt, prv, v, u):
    if nxt[v] == u:
        p = _rid(prv[v], n)
        s = _rid(nxt[u], n)
        return (_dist(coords, p, u) + _dist(coords, v, s)
                - _dist(coords, p, v) - _dist(coords, u, s))
    if nxt[u] == v:
        p = _rid(prv[u], n)
        s = _rid(nxt[v], n)
        return (_dist(coords, p, v) + _dist(coords, u, s)
                - _dist(coords, p, u) - _dist(coords, v, s))
    p1 = _rid(prv[v], n)
    s1 = _rid(nxt[v], n)
    p2 = _rid(prv[u], n)
    s2 = _rid(nxt[u], n)
    return (_dist(coords, p1, u) + _dist(coords, u, s1)
            + _dist(coords, p2, v) + _dist(coords, v, s2)
            - _dist(coords, p1, v) - _dist(coords, v, s1)
            - _dist(coords, p2, u) - _dist(coords, u, s2))


@njit(cache=True)
def _ev_two_opt(n, coords, nxt, pos, v, u):
    # reverse the segment between the successor edges of v and u (same route)
    if pos[v] > pos[u]:
        v, u = u, v
    a = nxt[v]
    if a == u:
        return NULL_DELTA  # adjacent pair: reversal is a no-op
    c = nxt[u]
    ra = _rid(a, n)
    rc = _rid(c, n)
    return (_dist(coords, v, u) + _dist(coords, ra, rc)
            - _dist(coords, v, ra) - _dist(coords, u, rc))


@njit(cache=True)
def _ev_cross(n, coords, nxt, pld, load, rte, v, u):
    # exchange the tails after v and after u (distinct routes)
    sv = _rid(nxt[v], n)
    su = _rid(nxt[u], n)
    dc = (_dist(coords, v, su) + _dist(coords, u, sv)
          - _dist(coords, v, sv) - _dist(coords, u, su))
    rv = rte[v]
    ru = rte[u]
    tail_v = load[rv] - pld[v]
    tail_u = load[ru] - pld[u]
    new_lv = pld[v] + tail_u
    new_lu = pld[u] + tail_v
    return dc, new_lv, new_lu


@njit(cache=True)
def _ev_swapstar(n, coords, demand, nxt, prv, rte, load, v, u):
    # v goes to the cheapest position of u's route (u removed) and vice versa
    pv_ = _rid(prv[v], n)
    sv_ = _rid(nxt[v], n)
    rem_v = _dist(coords, pv_, v) + _dist(coords, v, sv_) - _dist(coords, pv_, sv_)
    pu_ = _rid(prv[u], n)
    su_ = _rid(nxt[u], n)
    rem_u = _dist(coords, pu_, u) + _dist(coords, u, su_) - _dist(coords, pu_, su_)

    hu = n + 1 + rte[u]
    best_cv = NULL_DELTA
    best_pv = -1
    a = hu
    while True:
        if a != u:
            b = nxt[a]
            if b == u:
                b = nxt[u]
            ra = _rid(a, n)
            rb = _rid(b, n)
            c = _dist(coords, ra, v) + _dist(coords, v, rb) - _dist(coords, ra, rb)
            if c < best_cv:
                best_cv = c
                best_pv = a
        a = nxt[a]
        if a == hu:
            break

    hv = n + 1 + rte[v]
    best_cu = NULL_DELTA
    best_pu = -1
    a = hv
    while True:
        if a != v:
            b = nxt[a]
            if b == v:
                b = nxt[v]
            ra = _rid(a, n)
            rb = _rid(b, n)
            c = _dist(coords, ra, u) + _dist(coords, u, rb) - _dist(coords, ra, rb)
            if c < best_cu:
                best_cu = c
                best_pu = a
        a = nxt[a]
        if a == hv:
            break

    dc = best_cv + best_cu - rem_v - rem_u
    new_lv = load[rte[v]] - demand[v] + demand[u]
    new_lu = load[rte[u]] - demand[u] + demand[v]
    return dc, best_pv, best_pu, new_lv, new_lu


@njit(cache=True)
def _ap_swap1(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, u):
    r = rte[v]
    if nxt[v] == u:
        p = prv[v]
        s = nxt[u]
        st[0] += (_dist(coords, _rid(p, n), u) + _dist(coords, v, _rid(s, n))
                  - _dist(coords, _rid(p, n), v) - _dist(coords, u, _rid(s, n)))
        nxt[p] = u
        prv[u] = p
        nxt[u] = v
        prv[v] = u
        nxt[v] = s
        prv[s] = v
    elif nxt[u] == v:
        p = prv[u]
        s = nxt[v]
        st[0] += (_dist(coords, _rid(p, n), v) + _dist(coords, u, _rid(s, n))
                  - _dist(coords, _rid(p, n), u) - _dist(coords, v, _rid(s, n)))
        nxt[p] = v
        prv[v] = p
        nxt[v] = u
        prv[u] = v
        nxt[u] = s
        prv[s] = u
    else:
        p1 = prv[v]
        s1 = nxt[v]
        p2 = prv[u]
        s2 = nxt[u]
        st[0] += (_dist(coords, _rid(p1, n), u) + _dist(coords, u, _rid(s1, n))
                  + _dist(coords, _rid(p2, n), v) + _dist(coords, v, _rid(s2, n))
                  - _dist(coords, _rid(p1, n), v) - _dist(coords, v, _rid(s1, n))
                  - _dist(coords, _rid(p2, n), u) - _dist(coords, u, _rid(s2, n)))
        nxt[p1] = u
        prv[u] = p1
        nxt[u] = s1
        prv[s1] = u
        nxt[p2] = v
        prv[v] = p2
        nxt[v] = s2
        prv[s2] = v
    _rebuild(n, r, nxt, rte, pos, pld, demand)


@njit(cache=True)
def _ap_two_opt(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, u, seg):
    if pos[v] > pos[u]:
        v, u = u, v
    a = nxt[v]
    c = nxt[u]
    st[0] += (_dist(coords, v, u) + _dist(coords, _rid(a, n), _rid(c, n))
              - _dist(coords, v, _rid(a, n)) - _dist(coords, u, _rid(c, n)))
    # collect segment a..u then relink reversed: v -> u -> ... -> a -> c
    k = 0
    x = a
    while True:
        seg[k] = x
        k += 1
        if x == u:
            break
        x = nxt[x]
    prev = v
    for t in range(k - 1, -1, -1):
        node = seg[t]
        nxt[prev] = node
        prv[node] = prev
        prev = node
    nxt[prev] = c
    prv[c] = prev
    _rebuild(n, rte[v], nxt, rte, pos, pld, demand)


@njit(cache=True)
def _ap_cross(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, u):
    rv = rte[v]
    ru = rte[u]
    hv = n + 1 + rv
    hu = n + 1 + ru
    sv = nxt[v]
    su = nxt[u]
    last_v = prv[hv]
    last_u = prv[hu]
    st[0] += (_dist(coords, v, _rid(su, n)) + _dist(coords, u, _rid(sv, n))
              - _dist(coords, v, _rid(sv, n)) - _dist(coords, u, _rid(su, n)))
    st[1] -= _relu(load[rv] - cap) + _relu(load[ru] - cap)
    tail_v = load[rv] - pld[v]
    tail_u = load[ru] - pld[u]
    load[rv] = pld[v] + tail_u
    load[ru] = pld[u] + tail_v
    st[1] += _relu(load[rv] - cap) + _relu(load[ru] - cap)
    # route rv becomes prefix..v + (su..last_u); route ru becomes prefix..u + (sv..last_v)
    if su != hu:
        nxt[v] = su
        prv[su] = v
        nxt[last_u] = hv
        prv[hv] = last_u
    else:
        nxt[v] = hv
        prv[hv] = v
    if sv != hv:
        nxt[u] = sv
        prv[sv] = u
        nxt[last_v] = hu
        prv[hu] = last_v
    else:
        nxt[u] = hu
        prv[hu] = u
    _rebuild(n, rv, nxt, rte, pos, pld, demand)
    _rebuild(n, ru, nxt, rte, pos, pld, demand)


@njit(cache=True)
def _ap_swapstar(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, u, pv, pu):
    _detach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v)
    _detach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, u)
    _attach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, pv)
    _attach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, u, pu)


@njit(cache=True)
def _apply_move(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, seg,
                kind, v, a1, a2, a3):
    if kind == SHIFT_INTER or kind == SHIFT_INTRA:
        _detach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v)
        _attach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, a1)
    elif kind == SWAP_INTRA:
        _ap_swap1(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, a1)
    elif kind == TWO_OPT:
        _ap_two_opt(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, a1, seg)
    elif kind == CROSS:
        _ap_cross(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, a1)
    elif kind == SWAP_STAR:
        _ap_swapstar(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, a1, a2, a3)


@njit(cache=True)
def _optimize_pass(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos, pld,
                   load, st, seg, log, log_cnt):
    """One best-improvement pass over customers in index order.

    For each customer the best strictly improving, feasibility-preserving move
    over its anchor pairs (its neighbor list plus the depot) is applied
    immediately.  Returns the number of applied moves; a return of 0 certifies
    a local optimum of the composite neighborhood.
    """
    applied = 0
    m = st[2]
    for v in range(1, n + 1):
        rv = rte[v]
        qv = demand[v]
        best = np.int64(0)
        bk = 0
        ba = -1
        bb = -1
        bc = -1
        banchor = -1
        for t in range(nn_cnt[v]):
            u = nn[v, t]
            ru = rte[u]
            if ru == rv:
                dc = _ev_relocate(n, coords, nxt, prv, v, u)
                if dc < best:
                    best = dc; bk = SHIFT_INTRA; ba = u; banchor = u
                dc = _ev_relocate(n, coords, nxt, prv, v, prv[u])
                if dc < best:
                    best = dc; bk = SHIFT_INTRA; ba = prv[u]; banchor = u
                dc = _ev_swap1(n, coords, nxt, prv, v, u)
                if dc < best:
                    best = dc; bk = SWAP_INTRA; ba = u; banchor = u
                dc = _ev_two_opt(n, coords, nxt, pos, v, u)
                if dc < best:
                    best = dc; bk = TWO_OPT; ba = u; banchor = u
            else:
                if load[ru] + qv <= cap:
                    dc = _ev_relocate(n, coords, nxt, prv, v, u)
                    if dc < best:
                        best = dc; bk = SHIFT_INTER; ba = u; banchor = u
                    dc = _ev_relocate(n, coords, nxt, prv, v, prv[u])
                    if dc < best:
                        best = dc; bk = SHIFT_INTER; ba = prv[u]; banchor = u
                qu = demand[u]
                if load[ru] - qu + qv <= cap and load[rv] - qv + qu <= cap:
                    dc, pv_, pu_, lv_, lu_ = _ev_swapstar(
                        n, coords, demand, nxt, prv, rte, load, v, u)
                    if dc < best:
                        best = dc; bk = SWAP_STAR; ba = u; bb = pv_; bc = pu_; banchor = u
                dc, lv_, lu_ = _ev_cross(n, coords, nxt, pld, load, rte, v, u)
                if lv_ <= cap and lu_ <= cap and dc < best:
                    best = dc; bk = CROSS; ba = u; banchor = u
        # depot anchor: positions adjacent to the depot (route ends, one empty route)
        seen_empty = False
        for r in range(m):
            if r == rv:
                continue
            h = n + 1 + r
            first = nxt[h]
            if first == h:
                if seen_empty:
                    continue
                seen_empty = True
                dc = _ev_relocate(n, coords, nxt, prv, v, h)
                if dc < best:
                    best = dc; bk = SHIFT_INTER; ba = h; banchor = 0
            elif load[r] + qv <= cap:
                dc = _ev_relocate(n, coords, nxt, prv, v, h)
                if dc < best:
                    best = dc; bk = SHIFT_INTER; ba = h; banchor = 0
                dc = _ev_relocate(n, coords, nxt, prv, v, prv[h])
                if dc < best:
                    best = dc; bk = SHIFT_INTER; ba = prv[h]; banchor = 0
        if bk != 0:
            _apply_move(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st,
                        seg, bk, v, ba, bb, bc)
            applied += 1
            if log.shape[0] > 0 and log_cnt[0] < log.shape[0]:
                log[log_cnt[0], 0] = bk
                log[log_cnt[0], 1] = v
                log[log_cnt[0], 2] = banchor
                log[log_cnt[0], 3] = best
                log_cnt[0] += 1
    return applied


@njit(cache=True)
def run_local_search(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos, pld,
                     load, st, seg, log, log_cnt):
    total = 0
    while True:
        a = _optimize_pass(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos,
                           pld, load, st, seg, log, log_cnt)
        total += a
        if a == 0:
            break
    return total


@njit(cache=True)
def _repair_pass(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos, pld,
                 load, st, seg, log, log_cnt):
    """One repair pass: customers of overloaded routes, key (excess delta, cost delta).

    Only moves that strictly reduce total excess are applied; intra-route kinds
    cannot change loads and are skipped.
    """
    applied = 0
    m = st[2]
    for v in range(1, n + 1):
        rv = rte[v]
        if load[rv] <= cap:
            continue
        qv = demand[v]
        best_ex = np.int64(0)
        best_dc = NULL_DELTA
        bk = 0
        ba = -1
        bb = -1
        bc = -1
        banchor = -1
        for t in range(nn_cnt[v]):
            u = nn[v, t]
            ru = rte[u]
            if ru == rv:
                continue
            qu = demand[u]
            base_ex = _relu(load[rv] - cap) + _relu(load[ru] - cap)
            # shift v next to u (both sides)
            exd = (_relu(load[rv] - qv - cap) + _relu(load[ru] + qv - cap)) - base_ex
            if exd < 0 and exd <= best_ex:
                dc = _ev_relocate(n, coords, nxt, prv, v, u)
                if dc < NULL_DELTA and (exd < best_ex or dc < best_dc):
                    best_ex = exd; best_dc = dc; bk = SHIFT_INTER; ba = u
                    bb = -1; bc = -1; banchor = u
                dc = _ev_relocate(n, coords, nxt, prv, v, prv[u])
                if dc < NULL_DELTA and (exd < best_ex or dc < best_dc):
                    best_ex = exd; best_dc = dc; bk = SHIFT_INTER; ba = prv[u]
                    bb = -1; bc = -1; banchor = u
            # swap*
            exd = (_relu(load[rv] - qv + qu - cap) + _relu(load[ru] - qu + qv - cap)) - base_ex
            if exd < 0 and exd <= best_ex:
                dc, pv_, pu_, lv_, lu_ = _ev_swapstar(
                    n, coords, demand, nxt, prv, rte, load, v, u)
                if exd < best_ex or dc < best_dc:
                    best_ex = exd; best_dc = dc; bk = SWAP_STAR; ba = u
                    bb = pv_; bc = pu_; banchor = u
            # cross
            dc, lv_, lu_ = _ev_cross(n, coords, nxt, pld, load, rte, v, u)
            exd = (_relu(lv_ - cap) + _relu(lu_ - cap)) - base_ex
            if exd < 0 and (exd < best_ex or (exd == best_ex and dc < best_dc)):
                best_ex = exd; best_dc = dc; bk = CROSS; ba = u
                bb = -1; bc = -1; banchor = u
        seen_empty = False
        for r in range(m):
            if r == rv:
                continue
            h = n + 1 + r
            first = nxt[h]
            base_ex = _relu(load[rv] - cap) + _relu(load[r] - cap)
            exd = (_relu(load[rv] - qv - cap) + _relu(load[r] + qv - cap)) - base_ex
            if not (exd < 0 and exd <= best_ex):
                continue
            if first == h:
                if seen_empty:
                    continue
                seen_empty = True
                dc = _ev_relocate(n, coords, nxt, prv, v, h)
                if exd < best_ex or dc < best_dc:
                    best_ex = exd; best_dc = dc; bk = SHIFT_INTER; ba = h
                    bb = -1; bc = -1; banchor = 0
            else:
                dc = _ev_relocate(n, coords, nxt, prv, v, h)
                if exd < best_ex or dc < best_dc:
                    best_ex = exd; best_dc = dc; bk = SHIFT_INTER; ba = h
                    bb = -1; bc = -1; banchor = 0
                dc = _ev_relocate(n, coords, nxt, prv, v, prv[h])
                if exd < best_ex or dc < best_dc:
                    best_ex = exd; best_dc = dc; bk = SHIFT_INTER; ba = prv[h]
                    bb = -1; bc = -1; banchor = 0
        if bk != 0 and best_ex < 0:
            _apply_move(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st,
                        seg, bk, v, ba, bb, bc)
            applied += 1
            if log.shape[0] > 0 and log_cnt[0] < log.shape[0]:
                log[log_cnt[0], 0] = bk
                log[log_cnt[0], 1] = v
                log[log_cnt[0], 2] = banchor
                log[log_cnt[0], 3] = best_dc
                log_cnt[0] += 1
    return applied


@njit(cache=True)
def run_repair(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos, pld,
               load, st, seg, log, log_cnt):
    """Drive repair passes until total excess reaches zero.

    When a pass finds no excess-reducing move, an empty route is added and the
    search restarts; moving any customer out of an overloaded route into it
    strictly reduces excess, so termination is guaranteed.  Returns 0 on
    success, -1 if route slots are exhausted (cannot happen for valid inputs).
    """
    m_cap = load.shape[0]
    while st[1] > 0:
        a = _repair_pass(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, pos,
                         pld, load, st, seg, log, log_cnt)
        if st[1] <= 0:
            break
        if a == 0:
            if st[2] >= m_cap:
                return -1
            r = st[2]
            h = n + 1 + r
            nxt[h] = h
            prv[h] = h
            rte[h] = r
            pos[h] = 0
            pld[h] = 0
            load[r] = 0
            st[2] += 1
    return 0


@njit(cache=True)
def _forbidden(pa, pb, fa, fb):
    if fa < 0:
        return False
    return (pa == fa and pb == fb) or (pa == fb and pb == fa)


@njit(cache=True)
def _global_cheapest(n, coords, nxt, rte, st, v):
    # cheapest position over every route, no restrictions (fallback path)
    best_c = NULL_DELTA
    best_aft = -1
    for u in range(1, n + 1):
        if rte[u] < 0 or u == v:
            continue
        b = _rid(nxt[u], n)
        c = _dist(coords, u, v) + _dist(coords, v, b) - _dist(coords, u, b)
        if c < best_c:
            best_c = c
            best_aft = u
    m = st[2]
    seen_empty = False
    for r in range(m):
        h = n + 1 + r
        first = nxt[h]
        if first == h:
            if seen_empty:
                continue
            seen_empty = True
        b = _rid(first, n)
        c = _dist(coords, 0, v) + _dist(coords, v, b) - _dist(coords, 0, b)
        if c < best_c:
            best_c = c
            best_aft = h
    return best_aft


@njit(cache=True)
def best_insert(n, cap, coords, demand, nn, nn_cnt, nxt, prv, rte, load, st,
                v, use_a2, forb_a, forb_b, require_cap):
    """Pick the insertion position for an unrouted customer v.

    Cost-based mode scans positions whose predecessor is in v's neighbor list
    or the depot (route starts; a single empty route counts once), minimising
    c(p, succ(p), v) = d(p,v) + d(v,succ(p)) - d(p,succ(p)).  Distance-based
    mode places v beside its nearest routed customer on the cheaper side (ties
    go to the trailing side).  Positions recreating both of v's former
    neighbors (forb_a, forb_b) are excluded; if every candidate is forbidden
    (or, under require_cap, over capacity) the globally cheapest position wins
    regardless of restrictions.  Returns the node to insert after.
    """
    qv = demand[v]
    if use_a2:
        u0 = -1
        for t in range(nn_cnt[v]):
            if rte[nn[v, t]] >= 0:
                u0 = nn[v, t]
                break
        if u0 >= 0:
            b = nxt[u0]
            rb = _rid(b, n)
            c_after = _dist(coords, u0, v) + _dist(coords, v, rb) - _dist(coords, u0, rb)
            ok_after = not _forbidden(u0, rb, forb_a, forb_b)
            a = prv[u0]
            ra = _rid(a, n)
            c_before = _dist(coords, ra, v) + _dist(coords, v, u0) - _dist(coords, ra, u0)
            ok_before = not _forbidden(ra, u0, forb_a, forb_b)
            if ok_after and (not ok_before or c_after <= c_before):
                return u0
            if ok_before:
                return a
        return _global_cheapest(n, coords, nxt, rte, st, v)

    best_c = NULL_DELTA
    best_aft = -1
    for t in range(nn_cnt[v]):
        u = nn[v, t]
        ru = rte[u]
        if ru < 0:
            continue
        if require_cap and load[ru] + qv > cap:
            continue
        b = _rid(nxt[u], n)
        if _forbidden(u, b, forb_a, forb_b):
            continue
        c = _dist(coords, u, v) + _dist(coords, v, b) - _dist(coords, u, b)
        if c < best_c:
            best_c = c
            best_aft = u
    m = st[2]
    seen_empty = False
    for r in range(m):
        h = n + 1 + r
        first = nxt[h]
        if first == h:
            if seen_empty:
                continue
            seen_empty = True
        if require_cap and load[r] + qv > cap:
            continue
        b = _rid(first, n)
        if _forbidden(0, b, forb_a, forb_b):
            continue
        c = _dist(coords, 0, v) + _dist(coords, v, b) - _dist(coords, 0, b)
        if c < best_c:
            best_c = c
            best_aft = h
    if best_aft >= 0:
        return best_aft
    return _global_cheapest(n, coords, nxt, rte, st, v)


@njit(cache=True)
def attach_customer(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, aft):
    _attach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v, aft)


@njit(cache=True)
def detach_customer(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v):
    _detach(n, cap, coords, demand, nxt, prv, rte, pos, pld, load, st, v)


@njit(cache=True)
def compact_routes(n, demand, nxt, prv, rte, pos, pld, load, st):
    """Pack non-empty routes into slots 0..k-1 (order kept) and leave one empty slot."""
    m = st[2]
    w = 0
    for r in range(m):
        h = n + 1 + r
        if nxt[h] == h:
            continue
        if w != r:
            hw = n + 1 + w
            first = nxt[h]
            last = prv[h]
            nxt[hw] = first
            prv[first] = hw
            nxt[last] = hw
            prv[hw] = last
            load[w] = load[r]
            _rebuild(n, w, nxt, rte, pos, pld, demand)
        w += 1
    h = n + 1 + w
    nxt[h] = h
    prv[h] = h
    rte[h] = w
    pos[h] = 0
    pld[h] = 0
    load[w] = 0
    st[2] = w + 1


@njit(cache=True)
def collect_edge_keys(n, nxt, st, out):
    """Write the (min*K+max) key of every route edge into out; returns the count."""
    m = st[2]
    k = np.int64(n + 1)
    cnt = 0
    for r in range(m):
        h = n + 1 + r
        a = h
        while True:
            b = nxt[a]
            ra = _rid(a, n)
            rb = _rid(b, n)
            if not (ra == 0 and rb == 0):
                lo = ra if ra < rb else rb
                hi = rb if ra < rb else ra
                out[cnt] = np.int64(lo) * k + np.int64(hi)
                cnt += 1
            a = b
            if a == h:
                break
    return cnt


@njit(cache=True)
def recompute_cost(n, coords, nxt, st):
    m = st[2]
    total = np.int64(0)
    for r in range(m):
        h = n + 1 + r
        a = h
        while True:
            b = nxt[a]
            total += _dist(coords, _rid(a, n), _rid(b, n))
            a = b
            if a == h:
                break
    return total
