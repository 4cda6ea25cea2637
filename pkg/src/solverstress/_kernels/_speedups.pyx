# Compiled versions of the hot kernels. Mirrors fallback.py operation for
# operation (same loop structure, same float accumulation order) so results
# are bit-identical across backends. Keep the two in sync.

import numpy as np

cdef double CAP_EPS = 1e-9
cdef double INF = float("inf")


def dag_schedule(double[::1] durations, double[::1] resources,
                 long long[::1] n_parents, long long[::1] succ_indptr,
                 long long[::1] succ_list, long long[::1] priority):
    cdef Py_ssize_t n = durations.shape[0]
    starts_arr = np.zeros(n, dtype=np.float64)
    finishes_arr = np.zeros(n, dtype=np.float64)
    npar_arr = np.array(n_parents, copy=True)
    state_arr = np.zeros(n, dtype=np.int8)
    cdef double[::1] starts = starts_arr
    cdef double[::1] finishes = finishes_arr
    cdef long long[::1] npar = npar_arr
    cdef signed char[::1] state = state_arr
    cdef double cap = 1.0
    cdef double t = 0.0
    cdef double tmin
    cdef Py_ssize_t n_finished = 0, n_running = 0
    cdef Py_ssize_t i, job, v, k
    while n_finished < n:
        for i in range(n):
            job = priority[i]
            if state[job] == 0 and npar[job] == 0 and resources[job] <= cap + CAP_EPS:
                state[job] = 1
                starts[job] = t
                finishes[job] = t + durations[job]
                cap -= resources[job]
                n_running += 1
        if n_running == 0:
            raise RuntimeError("scheduler stalled; instance violates invariants")
        tmin = INF
        for v in range(n):
            if state[v] == 1 and finishes[v] < tmin:
                tmin = finishes[v]
        t = tmin
        for v in range(n):
            if state[v] == 1 and finishes[v] == tmin:
                state[v] = 2
                cap += resources[v]
                n_finished += 1
                n_running -= 1
                for k in range(succ_indptr[v], succ_indptr[v + 1]):
                    npar[succ_list[k]] -= 1
    return starts_arr, finishes_arr


def atsp_tour_cost(double[:, ::1] dist, long long[::1] tour):
    cdef Py_ssize_t n = tour.shape[0]
    if n <= 1:
        return 0.0
    cdef double c = 0.0
    cdef Py_ssize_t i
    for i in range(n - 1):
        c += dist[tour[i], tour[i + 1]]
    c += dist[tour[n - 1], tour[0]]
    return c


def atsp_nearest_neighbour(double[:, ::1] dist):
    cdef Py_ssize_t n = dist.shape[0]
    tour_arr = np.zeros(n, dtype=np.int64)
    visited_arr = np.zeros(n, dtype=np.int8)
    cdef long long[::1] tour = tour_arr
    cdef signed char[::1] visited = visited_arr
    cdef Py_ssize_t cur = 0, step, j, best
    cdef double best_d
    visited[0] = 1
    for step in range(1, n):
        best = -1
        best_d = INF
        for j in range(n):
            if not visited[j] and dist[cur, j] < best_d:
                best_d = dist[cur, j]
                best = j
        tour[step] = best
        visited[best] = 1
        cur = best
    return tour_arr


def atsp_furthest_insertion(double[:, ::1] dist):
    cdef Py_ssize_t n = dist.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    tour_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] tour = tour_arr
    in_tour_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] in_tour = in_tour_arr
    mind_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] mind = mind_arr
    cdef Py_ssize_t m = 1, c, p, pick, best_pos, a, b, q
    cdef double pick_d, best_inc, inc, sym
    in_tour[0] = 1
    for c in range(n):
        if c != 0:
            mind[c] = (dist[0, c] + dist[c, 0]) / 2.0
    while m < n:
        pick = -1
        pick_d = -INF
        for c in range(n):
            if not in_tour[c] and mind[c] > pick_d:
                pick_d = mind[c]
                pick = c
        best_pos = 0
        best_inc = INF
        for p in range(m):
            a = tour[p]
            b = tour[(p + 1) % m]
            if m == 1:
                inc = dist[a, pick] + dist[pick, a]
            else:
                inc = dist[a, pick] + dist[pick, b] - dist[a, b]
            if inc < best_inc:
                best_inc = inc
                best_pos = p
        for q in range(m, best_pos + 1, -1):
            tour[q] = tour[q - 1]
        tour[best_pos + 1] = pick
        m += 1
        in_tour[pick] = 1
        for c in range(n):
            if not in_tour[c]:
                sym = (dist[pick, c] + dist[c, pick]) / 2.0
                if sym < mind[c]:
                    mind[c] = sym
    return tour_arr


cdef bint _next_perm(long long[::1] a, Py_ssize_t m):
    cdef Py_ssize_t i = m - 2, j, lo, hi
    cdef long long tmp
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = m - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]; a[i] = a[j]; a[j] = tmp
    lo = i + 1
    hi = m - 1
    while lo < hi:
        tmp = a[lo]; a[lo] = a[hi]; a[hi] = tmp
        lo += 1
        hi -= 1
    return True


def atsp_brute_force(double[:, ::1] dist):
    cdef Py_ssize_t n = dist.shape[0]
    if n <= 1:
        return np.arange(n, dtype=np.int64), 0.0
    perm_arr = np.arange(1, n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] perm = perm_arr
    cdef long long[::1] best = best_arr
    cdef Py_ssize_t m = n - 1, i, prev
    cdef double best_cost = INF, c
    while True:
        prev = perm[0]
        c = dist[0, prev]
        for i in range(1, m):
            c += dist[prev, perm[i]]
            prev = perm[i]
        c += dist[prev, 0]
        if c < best_cost:
            best_cost = c
            for i in range(m):
                best[i + 1] = perm[i]
        if not _next_perm(perm, m):
            break
    return best_arr, best_cost


def coverage_stats(long long[::1] indptr, long long[::1] members,
                   double[::1] weights, unsigned char[::1] is_white,
                   long long[::1] selection):
    covered_arr = np.zeros(weights.shape[0], dtype=np.int8)
    cdef signed char[::1] covered = covered_arr
    cdef double black = 0.0
    cdef long long whites = 0
    cdef Py_ssize_t si, k, e, s
    for si in range(selection.shape[0]):
        s = selection[si]
        for k in range(indptr[s], indptr[s + 1]):
            e = members[k]
            if not covered[e]:
                covered[e] = 1
                if is_white[e]:
                    whites += 1
                else:
                    black += weights[e]
    return black, int(whites)


def mc_greedy(long long[::1] indptr, long long[::1] members,
              double[::1] weights, Py_ssize_t n_elements, Py_ssize_t k):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    covered_arr = np.zeros(n_elements, dtype=np.int8)
    chosen_arr = np.zeros(m, dtype=np.int8)
    picks_arr = np.zeros(m if m < k else k, dtype=np.int64)
    cdef signed char[::1] covered = covered_arr
    cdef signed char[::1] chosen = chosen_arr
    cdef long long[::1] picks = picks_arr
    cdef Py_ssize_t n_picks = 0, it, s, kk, best, e
    cdef double best_gain, gain
    for it in range(k):
        best = -1
        best_gain = 0.0
        for s in range(m):
            if chosen[s]:
                continue
            gain = 0.0
            for kk in range(indptr[s], indptr[s + 1]):
                e = members[kk]
                if not covered[e]:
                    gain += weights[e]
            if gain > best_gain:
                best_gain = gain
                best = s
        if best < 0:
            break
        chosen[best] = 1
        picks[n_picks] = best
        n_picks += 1
        for kk in range(indptr[best], indptr[best + 1]):
            covered[members[kk]] = 1
    return picks_arr[:n_picks].copy()


def mcscc_local(long long[::1] indptr, long long[::1] members,
                unsigned char[::1] is_white, long long k_white):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    covered_arr = np.zeros(is_white.shape[0], dtype=np.int8)
    picks_arr = np.zeros(m, dtype=np.int64)
    cdef signed char[::1] covered = covered_arr
    cdef long long[::1] picks = picks_arr
    cdef Py_ssize_t n_picks = 0, s, k, e
    cdef long long white_count = 0, new_whites
    for s in range(m):
        new_whites = 0
        for k in range(indptr[s], indptr[s + 1]):
            e = members[k]
            if is_white[e] and not covered[e]:
                new_whites += 1
        if white_count + new_whites > k_white:
            continue
        picks[n_picks] = s
        n_picks += 1
        white_count += new_whites
        for k in range(indptr[s], indptr[s + 1]):
            covered[members[k]] = 1
    return picks_arr[:n_picks].copy()


def mcscc_greedy_average(long long[::1] indptr, long long[::1] members,
                         double[::1] weights, unsigned char[::1] is_white,
                         long long k_white):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    covered_arr = np.zeros(is_white.shape[0], dtype=np.int8)
    chosen_arr = np.zeros(m, dtype=np.int8)
    picks_arr = np.zeros(m, dtype=np.int64)
    cdef signed char[::1] covered = covered_arr
    cdef signed char[::1] chosen = chosen_arr
    cdef long long[::1] picks = picks_arr
    cdef Py_ssize_t n_picks = 0, s, k, e, best
    cdef long long white_count = 0, dw, best_dw
    cdef double db, best_key, ratio
    cdef bint best_inf
    while True:
        best = -1
        best_inf = False
        best_key = -INF
        best_dw = 0
        for s in range(m):
            if chosen[s]:
                continue
            db = 0.0
            dw = 0
            for k in range(indptr[s], indptr[s + 1]):
                e = members[k]
                if not covered[e]:
                    if is_white[e]:
                        dw += 1
                    else:
                        db += weights[e]
            if db <= 0.0 or white_count + dw > k_white:
                continue
            if dw == 0:
                if not best_inf or db > best_key:
                    best = s
                    best_inf = True
                    best_key = db
                    best_dw = 0
            elif not best_inf:
                ratio = db / (<double> dw)
                if ratio > best_key:
                    best = s
                    best_key = ratio
                    best_dw = dw
        if best < 0:
            break
        chosen[best] = 1
        picks[n_picks] = best
        n_picks += 1
        white_count += best_dw
        for k in range(indptr[best], indptr[best + 1]):
            covered[members[k]] = 1
    return picks_arr[:n_picks].copy()
