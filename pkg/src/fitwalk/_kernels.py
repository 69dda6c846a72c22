"""Compiled hot loops.

Every kernel draws uniforms from the same counter-based stream as
``fitwalk.rng`` (SplitMix64 finalizer of ``seed + (counter + 1) * GOLDEN``),
so kernel output is bit-reproducible against the pure-Python simulators.
Probability comparisons use 53-bit integer thresholds (``rng.threshold53``),
which reproduce the float comparison ``u < x`` exactly while skipping the
integer-to-float conversion.

The random-walk samplers consume raw hash bits (64 walk steps per counter)
and use an exact word-skip: while the walker is 65 or more sites away from
zero, 64 steps cannot reach zero, so a whole word is folded in via popcount.
The trajectory is identical to bit-by-bit stepping; intermediate positions
are simply never materialized.
"""

import numpy as np
from numba import njit, prange

U64 = np.uint64
ONE = U64(1)
TWO = U64(2)
GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX_A = U64(0xBF58476D1CE4E5B9)
_MIX_B = U64(0x94D049BB133111EB)
_PC_M1 = U64(0x5555555555555555)
_PC_M2 = U64(0x3333333333333333)
_PC_M4 = U64(0x0F0F0F0F0F0F0F0F)
_PC_H = U64(0x0101010101010101)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX_A
    z = (z ^ (z >> U64(27))) * _MIX_B
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _draw53(seed, ctr):
    # 53-bit integer draw; (value * 2**-53) is the uniform the Python side sees
    return _mix64(seed + (ctr + ONE) * GOLDEN) >> U64(11)


@njit(cache=True, inline="always")
def _word(seed, ctr):
    return _mix64(seed + (ctr + ONE) * GOLDEN)


@njit(cache=True, inline="always")
def _derive(master, idx):
    return _mix64(master + _mix64((idx + ONE) * GOLDEN))


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> ONE) & _PC_M1)
    x = (x & _PC_M2) + ((x >> U64(2)) & _PC_M2)
    x = (x + (x >> U64(4))) & _PC_M4
    return (x * _PC_H) >> U64(56)


# ---------------------------------------------------------------------------
# chain trajectories (pair stream: step n uses counters 2n and 2n+1)
# ---------------------------------------------------------------------------


@njit(cache=True)
def reduced_trajectory(seed, tq, tf, checkpoints):
    """Counters (X, L, B, eta, C) at each checkpoint of one reduced run."""
    ncp = len(checkpoints)
    out = np.zeros((ncp, 5), dtype=np.int64)
    X = 0
    L = 0
    B = 0
    eta = 0
    C = 0
    ci = 0
    c = U64(0)
    n = checkpoints[ncp - 1] if ncp else 0
    for step in range(n):
        while ci < ncp and checkpoints[ci] == step:
            out[ci, 0] = X
            out[ci, 1] = L
            out[ci, 2] = B
            out[ci, 3] = eta
            out[ci, 4] = C
            ci += 1
        m0 = _draw53(seed, c)
        if m0 < tq:
            if L == 0:
                eta += 1
                if X == 0:
                    C += 1
                else:
                    X -= 1
            else:
                X -= 1
                L -= 1
        else:
            m1 = _draw53(seed, c + ONE)
            X += 1
            if m1 < tf:
                L += 1
            else:
                B += 1
        c += TWO
    while ci < ncp:
        out[ci, 0] = X
        out[ci, 1] = L
        out[ci, 2] = B
        out[ci, 3] = eta
        out[ci, 4] = C
        ci += 1
    return out


@njit(cache=True, parallel=True)
def terminal_counters_batch(master, tq, tf, n, replicas):
    """Terminal (X, L, B, eta, C) of ``replicas`` independent reduced runs."""
    out = np.zeros((replicas, 5), dtype=np.int64)
    for r in prange(replicas):
        seed = _derive(master, U64(r))
        X = 0
        L = 0
        B = 0
        eta = 0
        C = 0
        c = U64(0)
        for _ in range(n):
            m0 = _draw53(seed, c)
            if m0 < tq:
                if L == 0:
                    eta += 1
                    if X == 0:
                        C += 1
                    else:
                        X -= 1
                else:
                    X -= 1
                    L -= 1
            else:
                m1 = _draw53(seed, c + ONE)
                X += 1
                if m1 < tf:
                    L += 1
                else:
                    B += 1
            c += TWO
        out[r, 0] = X
        out[r, 1] = L
        out[r, 2] = B
        out[r, 3] = eta
        out[r, 4] = C
    return out


@njit(cache=True)
def delta_increments(seed, tq, tf, n, max_records):
    """Death-surplus jump history of one reduced run.

    Returns (count, steps, values, terminal) where steps[i] is the first step
    index at which delta took values[i].  count == -1 signals a record
    overflow (never expected at the preallocated sizes).
    """
    steps = np.zeros(max_records, dtype=np.int64)
    vals = np.zeros(max_records, dtype=np.int64)
    term = np.zeros(5, dtype=np.int64)
    k = 0
    X = 0
    L = 0
    B = 0
    eta = 0
    C = 0
    delta = 0
    c = U64(0)
    for step in range(n):
        m0 = _draw53(seed, c)
        if m0 < tq:
            if L == 0:
                eta += 1
                if X == 0:
                    C += 1
                else:
                    X -= 1
                    delta += 1
                    if k >= max_records:
                        return -1, steps, vals, term
                    steps[k] = step + 1
                    vals[k] = delta
                    k += 1
            else:
                X -= 1
                L -= 1
        else:
            m1 = _draw53(seed, c + ONE)
            X += 1
            if m1 < tf:
                L += 1
            else:
                B += 1
        c += TWO
    term[0] = X
    term[1] = L
    term[2] = B
    term[3] = eta
    term[4] = C
    return k, steps, vals, term


@njit(cache=True)
def sandwich_path(seed, tq, tf, checkpoints, mu_cap, tail_cap):
    """Occupation count eta and excursion decomposition from one shared stream.

    Simulates the below-threshold count L to the last checkpoint, recording
    (eta, completed excursions N) at every checkpoint and the per-excursion
    zero-phase death counts mu.  After the horizon the open excursion's
    holding phase is completed (consuming further stream steps) so that the
    (N+1)-th mu value is final.  Returns (status, n_mu, mu, etas, Ns) with
    status 0 on success, 1 if the tail guard tripped, 2 on mu overflow.
    """
    ncp = len(checkpoints)
    mu = np.zeros(mu_cap, dtype=np.int64)
    etas = np.zeros(ncp, dtype=np.int64)
    ns = np.zeros(ncp, dtype=np.int64)
    n = checkpoints[ncp - 1] if ncp else 0
    L = 0
    eta = 0
    k = 0
    cur_mu = 0
    pending_mu = 0
    ci = 0
    c = U64(0)
    for step in range(n):
        while ci < ncp and checkpoints[ci] == step:
            etas[ci] = eta
            ns[ci] = k
            ci += 1
        m0 = _draw53(seed, c)
        if L == 0:
            if m0 < tq:
                eta += 1
                cur_mu += 1
            else:
                m1 = _draw53(seed, c + ONE)
                if m1 < tf:
                    L = 1
                    pending_mu = cur_mu
                    cur_mu = 0
        else:
            if m0 < tq:
                L -= 1
                if L == 0:
                    if k >= mu_cap:
                        return 2, k, mu, etas, ns
                    mu[k] = pending_mu
                    k += 1
            else:
                m1 = _draw53(seed, c + ONE)
                if m1 < tf:
                    L += 1
        c += TWO
    while ci < ncp:
        etas[ci] = eta
        ns[ci] = k
        ci += 1
    if k >= mu_cap:
        return 2, k, mu, etas, ns
    if L == 0:
        # still in the holding phase of excursion k+1: run it to completion
        # (post-horizon steps must not touch eta)
        for _ in range(tail_cap):
            m0 = _draw53(seed, c)
            if m0 < tq:
                cur_mu += 1
            else:
                m1 = _draw53(seed, c + ONE)
                c += TWO
                if m1 < tf:
                    mu[k] = cur_mu
                    return 0, k + 1, mu, etas, ns
                continue
            c += TWO
        return 1, k, mu, etas, ns
    mu[k] = pending_mu
    return 0, k + 1, mu, etas, ns


@njit(cache=True)
def l_occupation(seed, tq, tf, n, gap, max_state):
    """Thinned occupation histogram of L plus its zero-return count.

    Samples L every ``gap`` steps (skipping step 0); counts[max_state + 1]
    is the overflow bin.  Returns (counts, completed returns to 0, L_n).
    """
    counts = np.zeros(max_state + 2, dtype=np.int64)
    returns = 0
    L = 0
    c = U64(0)
    for step in range(n):
        if gap > 0 and step > 0 and step % gap == 0:
            idx = L if L <= max_state else max_state + 1
            counts[idx] += 1
        m0 = _draw53(seed, c)
        if m0 < tq:
            if L > 0:
                L -= 1
                if L == 0:
                    returns += 1
        else:
            m1 = _draw53(seed, c + ONE)
            if m1 < tf:
                L += 1
        c += TWO
    return counts, returns, L


# ---------------------------------------------------------------------------
# excursion samplers (pair stream)
# ---------------------------------------------------------------------------


@njit(cache=True)
def excursion_batch(seed, tq, tf, m, cap):
    """``m`` complete excursions of L from one sequential stream.

    Excursions whose total duration reaches ``cap`` are abandoned, counted as
    censored and not recorded; the stream simply continues with the next
    excursion.  Returns (start, h_tilde, alpha, tau, mu, censored).
    """
    start = np.zeros(m, dtype=np.int64)
    h_arr = np.zeros(m, dtype=np.int64)
    a_arr = np.zeros(m, dtype=np.int64)
    t_arr = np.zeros(m, dtype=np.int64)
    mu_arr = np.zeros(m, dtype=np.int64)
    censored = 0
    k = 0
    c = U64(0)
    while k < m:
        sigma = np.int64(c >> ONE)
        h = 0
        mu = 0
        ok = True
        # holding phase at zero; ends with the step that moves L to 1
        while True:
            m0 = _draw53(seed, c)
            if m0 < tq:
                mu += 1
                h += 1
                c += TWO
            else:
                m1 = _draw53(seed, c + ONE)
                c += TWO
                h += 1
                if m1 < tf:
                    break
            if h >= cap:
                ok = False
                break
        if not ok:
            censored += 1
            continue
        # return phase from 1 back to 0
        L = 1
        alpha = 0
        tau = 1
        total = h
        while L > 0:
            m0 = _draw53(seed, c)
            if m0 < tq:
                L -= 1
                tau += 1
            else:
                m1 = _draw53(seed, c + ONE)
                if m1 < tf:
                    L += 1
                    tau += 1
            c += TWO
            alpha += 1
            total += 1
            if total >= cap and L > 0:
                ok = False
                break
        if not ok:
            censored += 1
            continue
        start[k] = sigma
        h_arr[k] = h
        a_arr[k] = alpha
        t_arr[k] = tau
        mu_arr[k] = mu
        k += 1
    return start, h_arr, a_arr, t_arr, mu_arr, censored


@njit(cache=True)
def mu_batch(seed, tq, tf, m):
    """Zero-phase death counts of ``m`` consecutive holding phases.

    The return leg of an excursion contributes nothing to mu and is
    independent of every later holding phase, so only the holding phases are
    simulated; the mu law is identical to full-path sampling.
    """
    out = np.zeros(m, dtype=np.int64)
    c = U64(0)
    for k in range(m):
        mu = 0
        while True:
            m0 = _draw53(seed, c)
            if m0 < tq:
                mu += 1
                c += TWO
            else:
                m1 = _draw53(seed, c + ONE)
                c += TWO
                if m1 < tf:
                    break
        out[k] = mu
    return out


# ---------------------------------------------------------------------------
# simple symmetric random walk (bit stream: 64 walk steps per counter)
# ---------------------------------------------------------------------------


@njit(cache=True)
def srw_return_times(seed, m, cap):
    """``m`` return times to 0 of the simple symmetric walk, by direct stepping.

    Walks reaching ``cap`` steps are abandoned (censored) and redrawn.
    Returns (times, censored count).
    """
    out = np.zeros(m, dtype=np.int64)
    censored = 0
    c = U64(0)
    k = 0
    while k < m:
        pos = np.int64(1)  # first step is +-1; by symmetry take +1
        t = np.int64(1)
        done = False
        while not done:
            bits = _word(seed, c)
            c += ONE
            if pos >= 65 and t + 64 <= cap:
                pos += 2 * np.int64(_popcount(bits)) - 64
                t += 64
                continue
            for _ in range(64):
                if bits & ONE:
                    pos += 1
                else:
                    pos -= 1
                bits >>= ONE
                t += 1
                if pos == 0:
                    out[k] = t
                    k += 1
                    done = True
                    break
                if t >= cap:
                    censored += 1
                    done = True
                    break
    return out, censored


@njit(cache=True)
def srw_ladder(seed, height, cap):
    """First-passage epochs of the walk to levels 1 .. height.

    Returns (gamma, reached); gamma[i] is the first time level i+1 is hit.
    Stops early at ``cap`` steps, reporting how many levels were reached.
    """
    gamma = np.zeros(height, dtype=np.int64)
    pos = np.int64(0)
    t = np.int64(0)
    best = 0
    c = U64(0)
    while best < height and t < cap:
        bits = _word(seed, c)
        c += ONE
        for _ in range(64):
            if bits & ONE:
                pos += 1
            else:
                pos -= 1
            bits >>= ONE
            t += 1
            if pos > best:
                best = pos
                gamma[best - 1] = t
                if best >= height:
                    break
            if t >= cap:
                break
    return gamma, best


@njit(cache=True, parallel=True)
def stable_T_batch(master, m, replicas, cap):
    """Total skeleton length of ``m`` walk excursions, per replica.

    Each replica sums ``m`` return times drawn on its own derived stream;
    capped walks are censored and redrawn.  Returns (totals, censored).
    """
    totals = np.zeros(replicas, dtype=np.int64)
    censored = np.zeros(replicas, dtype=np.int64)
    for r in prange(replicas):
        seed = _derive(master, U64(r))
        c = U64(0)
        total = np.int64(0)
        k = 0
        while k < m:
            pos = np.int64(1)
            t = np.int64(1)
            done = False
            while not done:
                bits = _word(seed, c)
                c += ONE
                if pos >= 65 and t + 64 <= cap:
                    pos += 2 * np.int64(_popcount(bits)) - 64
                    t += 64
                    continue
                for _ in range(64):
                    if bits & ONE:
                        pos += 1
                    else:
                        pos -= 1
                    bits >>= ONE
                    t += 1
                    if pos == 0:
                        total += t
                        k += 1
                        done = True
                        break
                    if t >= cap:
                        censored[r] += 1
                        done = True
                        break
        totals[r] = total
    return totals, censored
