"""Compiled inner loops shared by the lattice, Monte Carlo and enumeration code.

Grids are indexed ``grid[x, y]`` relative to the lower-left corner of their
domain. Sites outside the array are permanently vacant.
"""

import numpy as np
from numba import njit

NEVER = -1


@njit(cache=True, nogil=True)
def activation_times(occ, modified):
    """First time each site enters B^t(occ), or NEVER.

    FIFO processing keeps pops in nondecreasing time order, so a site's
    activation time is one more than the pop that completes its rule.
    """
    w, h = occ.shape
    times = np.full((w, h), NEVER, dtype=np.int64)
    cnt_x = np.zeros((w, h), dtype=np.int8)
    cnt_y = np.zeros((w, h), dtype=np.int8)
    qx = np.empty(w * h, dtype=np.int64)
    qy = np.empty(w * h, dtype=np.int64)
    head = 0
    tail = 0
    for x in range(w):
        for y in range(h):
            if occ[x, y]:
                times[x, y] = 0
                qx[tail] = x
                qy[tail] = y
                tail += 1
    while head < tail:
        x = qx[head]
        y = qy[head]
        head += 1
        t = times[x, y]
        for k in range(4):
            if k == 0:
                nx, ny, horiz = x - 1, y, True
            elif k == 1:
                nx, ny, horiz = x + 1, y, True
            elif k == 2:
                nx, ny, horiz = x, y - 1, False
            else:
                nx, ny, horiz = x, y + 1, False
            if nx < 0 or nx >= w or ny < 0 or ny >= h:
                continue
            if times[nx, ny] != NEVER:
                continue
            if horiz:
                cnt_x[nx, ny] += 1
            else:
                cnt_y[nx, ny] += 1
            if modified:
                fire = cnt_x[nx, ny] >= 1 and cnt_y[nx, ny] >= 1
            else:
                fire = cnt_x[nx, ny] + cnt_y[nx, ny] >= 2
            if fire:
                times[nx, ny] = t + 1
                qx[tail] = nx
                qy[tail] = ny
                tail += 1
    return times


@njit(cache=True, nogil=True)
def _spread(active, cnt_x, cnt_y, qx, qy, tail, modified):
    # drains the stack; returns number of newly activated sites (incl. seeds)
    w, h = active.shape
    added = tail
    while tail > 0:
        tail -= 1
        x = qx[tail]
        y = qy[tail]
        for k in range(4):
            if k == 0:
                nx, ny, horiz = x - 1, y, True
            elif k == 1:
                nx, ny, horiz = x + 1, y, True
            elif k == 2:
                nx, ny, horiz = x, y - 1, False
            else:
                nx, ny, horiz = x, y + 1, False
            if nx < 0 or nx >= w or ny < 0 or ny >= h:
                continue
            if active[nx, ny]:
                continue
            if horiz:
                cnt_x[nx, ny] += 1
            else:
                cnt_y[nx, ny] += 1
            if modified:
                fire = cnt_x[nx, ny] >= 1 and cnt_y[nx, ny] >= 1
            else:
                fire = cnt_x[nx, ny] + cnt_y[nx, ny] >= 2
            if fire:
                active[nx, ny] = True
                qx[tail] = nx
                qy[tail] = ny
                tail += 1
                added += 1
    return added


@njit(cache=True, nogil=True)
def first_spanning_level(uniforms, p_grid, modified):
    """Index of the first ``p_grid`` entry at which the box is internally spanned.

    ``uniforms`` has shape (w, h) and occupancy at level p is ``uniforms < p``;
    ``p_grid`` must be increasing. Sites are added in grid-bucket order and the
    closure is grown incrementally, which is valid because the closure does not
    depend on the order in which occupied sites are introduced. Returns
    ``len(p_grid)`` when the box is not spanned even at the last level.
    """
    w, h = uniforms.shape
    n = w * h
    g = p_grid.shape[0]
    top = p_grid[g - 1]
    bucket_count = np.zeros(g + 1, dtype=np.int64)
    bucket_of = np.full(n, -1, dtype=np.int64)
    for x in range(w):
        for y in range(h):
            u = uniforms[x, y]
            if u < top:
                b = np.searchsorted(p_grid, u, side="right")
                bucket_of[x * h + y] = b
                bucket_count[b + 1] += 1
    for b in range(g):
        bucket_count[b + 1] += bucket_count[b]
    order = np.empty(bucket_count[g], dtype=np.int64)
    fill = bucket_count[:g].copy()
    for s in range(n):
        b = bucket_of[s]
        if b >= 0:
            order[fill[b]] = s
            fill[b] += 1

    active = np.zeros((w, h), dtype=np.bool_)
    cnt_x = np.zeros((w, h), dtype=np.int8)
    cnt_y = np.zeros((w, h), dtype=np.int8)
    qx = np.empty(n, dtype=np.int64)
    qy = np.empty(n, dtype=np.int64)
    n_active = 0
    for b in range(g):
        tail = 0
        for i in range(bucket_count[b], bucket_count[b + 1]):
            s = order[i]
            x = s // h
            y = s % h
            if not active[x, y]:
                active[x, y] = True
                qx[tail] = x
                qy[tail] = y
                tail += 1
        if tail > 0:
            n_active += _spread(active, cnt_x, cnt_y, qx, qy, tail, modified)
        if n_active == n:
            return b
    return g


@njit(cache=True, nogil=True)
def bitboard_closure(mask, m, n, modified):
    """Closure of an occupancy bitmask on an m x n box (bit x + m*y)."""
    full = (np.uint64(1) << np.uint64(m * n)) - np.uint64(1)
    col0 = np.uint64(0)
    col_last = np.uint64(0)
    for y in range(n):
        col0 |= np.uint64(1) << np.uint64(m * y)
        col_last |= np.uint64(1) << np.uint64(m * y + m - 1)
    one = np.uint64(1)
    mm = np.uint64(m)
    s = np.uint64(mask)
    while True:
        from_west = (s << one) & ~col0 & full
        from_east = (s >> one) & ~col_last
        from_south = (s << mm) & full
        from_north = s >> mm
        if modified:
            fire = (from_west | from_east) & (from_south | from_north)
        else:
            a, b, c, d = from_west, from_east, from_south, from_north
            fire = (a & b) | (a & c) | (a & d) | (b & c) | (b & d) | (c & d)
        new = s | fire
        if new == s:
            return s
        s = new


@njit(cache=True, nogil=True)
def _popcount(v):
    c = 0
    while v:
        v &= v - np.uint64(1)
        c += 1
    return c


@njit(cache=True, nogil=True)
def span_counts(m, n, modified, start, stop):
    """Spanned-configuration counts by cardinality over Gray codes start..stop-1."""
    size = m * n
    full = (np.uint64(1) << np.uint64(size)) - np.uint64(1)
    counts = np.zeros(size + 1, dtype=np.int64)
    for i in range(start, stop):
        ui = np.uint64(i)
        mask = ui ^ (ui >> np.uint64(1))
        if bitboard_closure(mask, m, n, modified) == full:
            counts[_popcount(mask)] += 1
    return counts


@njit(cache=True, nogil=True)
def grid_shortest_path(h_w, v_w, d_w):
    """Min-cost monotone path from (0, 0) to (nx, ny) on a weighted grid.

    ``h_w[i, j]`` is the cost of (i, j) -> (i+1, j), ``v_w[i, j]`` of
    (i, j) -> (i, j+1) and ``d_w[i, j]`` of (i, j) -> (i+1, j+1).
    """
    nx = h_w.shape[0]
    ny = v_w.shape[1]
    cost = np.empty((nx + 1, ny + 1))
    cost[0, 0] = 0.0
    for i in range(1, nx + 1):
        cost[i, 0] = cost[i - 1, 0] + h_w[i - 1, 0]
    for j in range(1, ny + 1):
        cost[0, j] = cost[0, j - 1] + v_w[0, j - 1]
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            best = cost[i - 1, j] + h_w[i - 1, j]
            c = cost[i, j - 1] + v_w[i, j - 1]
            if c < best:
                best = c
            c = cost[i - 1, j - 1] + d_w[i - 1, j - 1]
            if c < best:
                best = c
            cost[i, j] = best
    return cost


@njit(cache=True, nogil=True)
def _rect_tables(m, n, modified):
    nr = (m * (m + 1) // 2) * (n * (n + 1) // 2)
    rmask = np.zeros(nr, dtype=np.uint64)
    bounds = np.zeros((nr, 4), dtype=np.int64)
    rid = -np.ones((m, n, m, n), dtype=np.int64)
    k = 0
    for x0 in range(m):
        for x1 in range(x0, m):
            for y0 in range(n):
                for y1 in range(y0, n):
                    msk = np.uint64(0)
                    for x in range(x0, x1 + 1):
                        for y in range(y0, y1 + 1):
                            msk |= np.uint64(1) << np.uint64(x + m * y)
                    rmask[k] = msk
                    bounds[k, 0] = x0
                    bounds[k, 1] = y0
                    bounds[k, 2] = x1
                    bounds[k, 3] = y1
                    rid[x0, y0, x1, y1] = k
                    k += 1
    return rmask, bounds, rid


@njit(cache=True, nogil=True)
def spanned_pair_search(m, n, modified):
    """Classify every configuration that internally spans the m x n box.

    For each such K (with at least two sites in the box) looks for two
    disjoint subsets of K spanning strict sub-rectangles R', R'' with
    <R' u R''> = box. Returns (masks with no such pair, masks where every such
    pair has R' and R'' intersecting).
    """
    size = m * n
    full = (np.uint64(1) << np.uint64(size)) - np.uint64(1)
    rmask, bounds, rid = _rect_tables(m, n, modified)
    nr = rmask.shape[0]
    words = (nr + 63) // 64
    box_id = rid[0, 0, m - 1, n - 1]
    # partner tables: b spans the box with a; disjoint variant needs empty intersection
    any_p = np.zeros((nr, words), dtype=np.uint64)
    dis_p = np.zeros((nr, words), dtype=np.uint64)
    for a in range(nr):
        if a == box_id:
            continue
        for b in range(nr):
            if b == box_id or b == a:
                continue
            if bitboard_closure(rmask[a] | rmask[b], m, n, modified) != full:
                continue
            w, bit = b // 64, np.uint64(1) << np.uint64(b % 64)
            any_p[a, w] |= bit
            if rmask[a] & rmask[b] == 0:
                dis_p[a, w] |= bit
    n_masks = 1 << size
    own = -np.ones(n_masks, dtype=np.int64)
    reach = np.zeros((n_masks, words), dtype=np.uint64)
    for M in range(1, n_masks):
        um = np.uint64(M)
        x0, y0, x1, y1 = m, n, -1, -1
        for i in range(size):
            if (M >> i) & 1:
                x, y = i % m, i // m
                x0 = min(x0, x)
                x1 = max(x1, x)
                y0 = min(y0, y)
                y1 = max(y1, y)
        r = rid[x0, y0, x1, y1]
        if bitboard_closure(um, m, n, modified) == rmask[r]:
            own[M] = r
            reach[M, r // 64] |= np.uint64(1) << np.uint64(r % 64)
        for i in range(size):
            if (M >> i) & 1:
                for w in range(words):
                    reach[M, w] |= reach[M ^ (1 << i), w]
    missing = []
    forced = []
    for K in range(1, n_masks):
        if own[K] != box_id or size < 2:
            continue
        found_any = False
        found_disjoint = False
        S = (K - 1) & K
        while S > 0:
            a = own[S]
            if a >= 0 and a != box_id:
                rest = K ^ S
                for w in range(words):
                    if reach[rest, w] & dis_p[a, w]:
                        found_disjoint = True
                    if reach[rest, w] & any_p[a, w]:
                        found_any = True
                if found_disjoint:
                    break
            S = (S - 1) & K
        if not found_any:
            missing.append(K)
        elif not found_disjoint:
            forced.append(K)
    return np.array(missing, dtype=np.int64), np.array(forced, dtype=np.int64)


@njit(cache=True, nogil=True)
def traverse_counts(m, n, east):
    """Horizontally (or East-) traversable configurations of m x n, by cardinality."""
    size = m * n
    counts = np.zeros(size + 1, dtype=np.int64)
    cols = np.zeros(m, dtype=np.uint64)
    for x in range(m):
        for y in range(n):
            cols[x] |= np.uint64(1) << np.uint64(x + m * y)
    for i in range(1 << size):
        mask = np.uint64(i)
        ok = True
        prev_occ = True
        for x in range(m):
            occ = (mask & cols[x]) != 0
            if not occ and not prev_occ:
                ok = False
                break
            prev_occ = occ
        if ok and east and not prev_occ:
            ok = False
        if ok:
            counts[_popcount(mask)] += 1
    return counts
