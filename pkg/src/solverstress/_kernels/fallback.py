"""Pure-Python reference implementations of the hot kernels.

The compiled module (`_speedups`) mirrors these functions operation for
operation: identical loop structure, identical float accumulation order, so
both backends produce bit-identical results. Keep the two in sync.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

CAP_EPS = 1e-9  # slack for resource-capacity checks (sums of doubles drift)


def dag_schedule(durations, resources, n_parents, succ_indptr, succ_list, priority):
    """Event-driven list scheduling on one resource pool of capacity 1.0.

    At time 0 and after every finish event, ready jobs are scanned in
    priority order and started while they fit the remaining capacity.
    Returns (starts, finishes) as float64 arrays.
    """
    n = int(len(durations))
    dur = durations.tolist()
    res = resources.tolist()
    npar = n_parents.tolist()
    sip = succ_indptr.tolist()
    sl = succ_list.tolist()
    prio = priority.tolist()

    starts = [0.0] * n
    finishes = [0.0] * n
    state = [0] * n  # 0 unstarted, 1 running, 2 finished
    cap = 1.0
    t = 0.0
    n_finished = 0
    n_running = 0
    while n_finished < n:
        for job in prio:
            if state[job] == 0 and npar[job] == 0 and res[job] <= cap + CAP_EPS:
                state[job] = 1
                starts[job] = t
                finishes[job] = t + dur[job]
                cap -= res[job]
                n_running += 1
        if n_running == 0:
            raise RuntimeError("scheduler stalled; instance violates invariants")
        tmin = math.inf
        for v in range(n):
            if state[v] == 1 and finishes[v] < tmin:
                tmin = finishes[v]
        t = tmin
        for v in range(n):
            if state[v] == 1 and finishes[v] == tmin:
                state[v] = 2
                cap += res[v]
                n_finished += 1
                n_running -= 1
                for k in range(sip[v], sip[v + 1]):
                    npar[sl[k]] -= 1
    return np.asarray(starts, dtype=np.float64), np.asarray(finishes, dtype=np.float64)


def atsp_tour_cost(dist, tour):
    """Directed cycle cost including the closing edge; 0.0 for n <= 1."""
    n = len(tour)
    if n <= 1:
        return 0.0
    d = dist
    c = 0.0
    for i in range(n - 1):
        c += d[tour[i], tour[i + 1]]
    c += d[tour[n - 1], tour[0]]
    return float(c)


def atsp_nearest_neighbour(dist):
    n = dist.shape[0]
    d = dist.tolist()
    visited = [False] * n
    tour = [0]
    visited[0] = True
    cur = 0
    for _ in range(n - 1):
        best = -1
        best_d = math.inf
        row = d[cur]
        for j in range(n):
            if not visited[j] and row[j] < best_d:
                best_d = row[j]
                best = j
        tour.append(best)
        visited[best] = True
        cur = best
    return np.asarray(tour, dtype=np.int64)


def atsp_furthest_insertion(dist):
    n = dist.shape[0]
    d = dist.tolist()
    if n == 0:
        return np.asarray([], dtype=np.int64)
    tour = [0]
    in_tour = [False] * n
    in_tour[0] = True
    # min symmetrized distance from each outside city to the current tour
    mind = [0.0] * n
    for c in range(n):
        if c != 0:
            mind[c] = (d[0][c] + d[c][0]) / 2.0
    for _ in range(n - 1):
        pick = -1
        pick_d = -math.inf
        for c in range(n):
            if not in_tour[c] and mind[c] > pick_d:
                pick_d = mind[c]
                pick = c
        # insert at the position with the smallest tour-length increase
        m = len(tour)
        best_pos = 0
        best_inc = math.inf
        for p in range(m):
            a = tour[p]
            b = tour[(p + 1) % m]
            if m == 1:
                inc = d[a][pick] + d[pick][a]
            else:
                inc = d[a][pick] + d[pick][b] - d[a][b]
            if inc < best_inc:
                best_inc = inc
                best_pos = p
        tour.insert(best_pos + 1, pick)
        in_tour[pick] = True
        for c in range(n):
            if not in_tour[c]:
                sym = (d[pick][c] + d[c][pick]) / 2.0
                if sym < mind[c]:
                    mind[c] = sym
    return np.asarray(tour, dtype=np.int64)


def atsp_brute_force(dist):
    """Exact optimum by enumerating all (n-1)! tours anchored at city 0."""
    n = dist.shape[0]
    if n <= 1:
        return np.asarray(list(range(n)), dtype=np.int64), 0.0
    d = dist.tolist()
    best_cost = math.inf
    best = None
    for perm in itertools.permutations(range(1, n)):
        prev = perm[0]
        c = d[0][prev]
        for city in perm[1:]:
            c += d[prev][city]
            prev = city
        c += d[prev][0]
        if c < best_cost:
            best_cost = c
            best = perm
    return np.asarray((0,) + best, dtype=np.int64), float(best_cost)


def coverage_stats(indptr, members, weights, is_white, selection):
    """(covered black weight, covered white count) for the selected sets."""
    ip = indptr.tolist()
    mem = members.tolist()
    w = weights.tolist()
    iw = is_white.tolist()
    covered = bytearray(len(w))
    black = 0.0
    whites = 0
    for s in selection:
        for k in range(ip[s], ip[s + 1]):
            e = mem[k]
            if not covered[e]:
                covered[e] = 1
                if iw[e]:
                    whites += 1
                else:
                    black += w[e]
    return float(black), int(whites)


def mc_greedy(indptr, members, weights, n_elements, k):
    """Pick up to k sets, each maximizing newly covered weight (ties: low id)."""
    ip = indptr.tolist()
    mem = members.tolist()
    w = weights.tolist()
    m = len(ip) - 1
    covered = bytearray(n_elements)
    chosen = bytearray(m)
    picks = []
    for _ in range(k):
        best = -1
        best_gain = 0.0
        for s in range(m):
            if chosen[s]:
                continue
            gain = 0.0
            for kk in range(ip[s], ip[s + 1]):
                e = mem[kk]
                if not covered[e]:
                    gain += w[e]
            if gain > best_gain:
                best_gain = gain
                best = s
        if best < 0:
            break
        chosen[best] = 1
        picks.append(best)
        for kk in range(ip[best], ip[best + 1]):
            covered[mem[kk]] = 1
    return np.asarray(picks, dtype=np.int64)


def mcscc_local(indptr, members, is_white, k_white):
    """Scan sets in id order, adding each whose white coverage stays within cap."""
    ip = indptr.tolist()
    mem = members.tolist()
    iw = is_white.tolist()
    m = len(ip) - 1
    covered = bytearray(len(iw))
    picks = []
    white_count = 0
    for s in range(m):
        new_whites = 0
        for k in range(ip[s], ip[s + 1]):
            e = mem[k]
            if iw[e] and not covered[e]:
                new_whites += 1
        if white_count + new_whites > k_white:
            continue
        picks.append(s)
        white_count += new_whites
        for k in range(ip[s], ip[s + 1]):
            covered[mem[k]] = 1
    return np.asarray(picks, dtype=np.int64)


def mcscc_greedy_average(indptr, members, weights, is_white, k_white):
    """Repeatedly add the most cost-effective set (black gain / new whites).

    Zero-new-white sets rank as infinite ratio, ordered among themselves by
    larger black gain; all ties break to the lower set id. Stops when no
    admissible set adds black weight.
    """
    ip = indptr.tolist()
    mem = members.tolist()
    w = weights.tolist()
    iw = is_white.tolist()
    m = len(ip) - 1
    covered = bytearray(len(iw))
    chosen = bytearray(m)
    picks = []
    white_count = 0
    while True:
        best = -1
        best_inf = False
        best_key = -math.inf  # black gain if best_inf else ratio
        best_dw = 0
        for s in range(m):
            if chosen[s]:
                continue
            db = 0.0
            dw = 0
            for k in range(ip[s], ip[s + 1]):
                e = mem[k]
                if not covered[e]:
                    if iw[e]:
                        dw += 1
                    else:
                        db += w[e]
            if db <= 0.0 or white_count + dw > k_white:
                continue
            if dw == 0:
                if not best_inf or db > best_key:
                    best = s
                    best_inf = True
                    best_key = db
                    best_dw = 0
            elif not best_inf:
                ratio = db / dw
                if ratio > best_key:
                    best = s
                    best_key = ratio
                    best_dw = dw
        if best < 0:
            break
        chosen[best] = 1
        picks.append(best)
        white_count += best_dw
        for k in range(ip[best], ip[best + 1]):
            covered[mem[k]] = 1
    return np.asarray(picks, dtype=np.int64)


def tmat_close(dist):
    """Close a positive matrix under the triangle inequality in place.

    Repeats the d[i][j] <- min(d[i][j], d[i][k] + d[k][j]) relaxation sweep
    until a fixpoint; the diagonal stays zero.
    """
    n = dist.shape[0]
    while True:
        changed = False
        for k in range(n):
            # vectorized min-plus relaxation for one intermediate city
            alt = dist[:, k, None] + dist[None, k, :]
            mask = alt < dist
            if mask.any():
                dist[mask] = alt[mask]
                changed = True
        if not changed:
            return dist
