"""Per-tick simulation kernels.

The functions here operate on flat numpy arrays only so they compile under
``numba.njit``.  Set ``CCTF_DISABLE_NUMBA=1`` to run the identical source as
plain Python (slow, but useful for debugging and for cross-checking the
compiled path).  Both backends consume the same uniform draws in the same
slots and use only exact integer logic plus ``u < p`` / ``int(u * k)``
comparisons, so their results are bit-identical.

Uniform row layout for one tick, width ``n + 4 * team_size``::

    [0, n)                    vulnerability draw for router i
    [n + 2a, n + 2a + 1]      attacker a: target pick, success draw
                              (scouts are attackers 0..s-1, exploiters after)
    [n + 2N + 2j, ... + 1]    detector j: target pick, success draw

Slots are consumed whether or not the agent has an eligible target.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("CCTF_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba

    jit = numba.njit(cache=True, nogil=True)
    BACKEND = "numba"
except ImportError:
    BACKEND = "python"

    def jit(func):
        return func


# iparams
I_N = 0
I_SCOUTS = 1
I_EXPLOITERS = 2
I_DETECTORS = 3
I_INTERCEPTORS = 4
I_DELTA = 5
I_ISOLATE = 6
I_CENTRAL = 7
N_IPARAMS = 8

# fparams
F_VUL_RATE = 0
F_P_SCOUT = 1
F_P_EXPLOITER = 2
F_P_DET_VULN = 3
F_P_DET_EXPL = 4
N_FPARAMS = 5

# per-tick output columns
T_NEW_VULNERABLE = 0
T_SCOUT_FINDS = 1
T_EXPLOITS = 2
T_DETECT_EXPLOITED = 3
T_DETECT_VULNERABLE = 4
T_RECOVERIES_STARTED = 5
T_PATCHES_STARTED = 6
T_RECOVERIES_DONE = 7
T_PATCHES_DONE = 8
T_COMPROMISED = 9  # sampled after interceptors act
T_OFFLINE = 10  # sampled after interceptors act
T_CENTER = 11  # sampled after interceptors act
T_KNOWN = 12  # end of tick
T_QUEUE = 13  # end of tick
N_TRACE = 14

REASON_EXPLOITED = 0
REASON_VULNERABLE = 1


def row_width(n_routers, team_size):
    return n_routers + 4 * team_size


@jit
def offline_mask(recovery, parent, order, out):
    """out[v] = 1 iff v or an ancestor toward the central router is recovering."""
    for k in range(order.shape[0]):
        v = order[k]
        p = parent[v]
        if recovery[v] > 0:
            out[v] = 1
        elif p >= 0 and out[p] == 1:
            out[v] = 1
        else:
            out[v] = 0


@jit
def is_offline(v, recovery, parent):
    while v >= 0:
        if recovery[v] > 0:
            return True
        v = parent[v]
    return False


@jit
def accessible_mask(indptr, indices, peripheral, compromised, offline, out):
    n = peripheral.shape[0]
    for v in range(n):
        out[v] = 0
    for v in range(n):
        if offline[v] == 1:
            continue
        if peripheral[v] == 1:
            out[v] = 1
        if compromised[v] == 1:
            out[v] = 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if offline[w] == 0:
                    out[w] = 1


@jit
def _enqueue(v, reason, qr, qk, qmeta, inq):
    slot = 2 * v + reason
    if inq[slot] == 1:
        return False
    cap = qr.shape[0]
    pos = (qmeta[0] + qmeta[1]) % cap
    qr[pos] = v
    qk[pos] = reason
    qmeta[1] += 1
    inq[slot] = 1
    return True


@jit
def tick_kernel(
    indptr, indices, peripheral, parent, order,
    iparams, fparams, u,
    vulnerable, compromised, known, recovery, patch, busy,
    qr, qk, qmeta, inq,
    scratch_a, scratch_b, elig, out,
):
    """Advance the state by one tick, in place, writing counters into ``out``."""
    n = iparams[I_N]
    scouts = iparams[I_SCOUTS]
    exploiters = iparams[I_EXPLOITERS]
    detectors = iparams[I_DETECTORS]
    interceptors = iparams[I_INTERCEPTORS]
    delta = iparams[I_DELTA]
    isolate = iparams[I_ISOLATE]
    central = iparams[I_CENTRAL]
    team = scouts + exploiters
    offline = scratch_a
    acc = scratch_b

    for c in range(N_TRACE):
        out[c] = 0

    # 1. vulnerability generation
    offline_mask(recovery, parent, order, offline)
    vul_rate = fparams[F_VUL_RATE]
    for v in range(n):
        if offline[v] == 0 and vulnerable[v] == 0 and compromised[v] == 0:
            if u[v] < vul_rate:
                vulnerable[v] = 1
                out[T_NEW_VULNERABLE] += 1

    # 2. scouts
    accessible_mask(indptr, indices, peripheral, compromised, offline, acc)
    k = 0
    for v in range(n):
        if acc[v] == 1:
            elig[k] = v
            k += 1
    p_scout = fparams[F_P_SCOUT]
    for a in range(scouts):
        base = n + 2 * a
        if k == 0:
            continue
        v = elig[int(u[base] * k)]
        if vulnerable[v] == 1 and compromised[v] == 0 and u[base + 1] < p_scout:
            if known[v] == 0:
                known[v] = 1
                out[T_SCOUT_FINDS] += 1

    # 3. exploiters
    p_exploiter = fparams[F_P_EXPLOITER]
    for a in range(scouts, team):
        base = n + 2 * a
        k = 0
        for v in range(n):
            if known[v] == 1 and acc[v] == 1 and vulnerable[v] == 1 and compromised[v] == 0:
                elig[k] = v
                k += 1
        if k == 0:
            continue
        v = elig[int(u[base] * k)]
        if u[base + 1] < p_exploiter:
            compromised[v] = 1
            known[v] = 0
            out[T_EXPLOITS] += 1
            accessible_mask(indptr, indices, peripheral, compromised, offline, acc)

    # 4. detectors
    k = 0
    for v in range(n):
        if offline[v] == 0:
            elig[k] = v
            k += 1
    p_dv = fparams[F_P_DET_VULN]
    p_de = fparams[F_P_DET_EXPL]
    for j in range(detectors):
        base = n + 2 * team + 2 * j
        if k == 0:
            continue
        v = elig[int(u[base] * k)]
        if compromised[v] == 1:
            if u[base + 1] < p_de:
                if _enqueue(v, REASON_EXPLOITED, qr, qk, qmeta, inq):
                    out[T_DETECT_EXPLOITED] += 1
        elif vulnerable[v] == 1:
            if u[base + 1] < p_dv:
                if _enqueue(v, REASON_VULNERABLE, qr, qk, qmeta, inq):
                    out[T_DETECT_VULNERABLE] += 1

    # 5. interceptors
    cap = qr.shape[0]
    for j in range(interceptors):
        if busy[j] > 0:
            continue
        while qmeta[1] > 0:
            pos = qmeta[0]
            v = qr[pos]
            reason = qk[pos]
            qmeta[0] = (pos + 1) % cap
            qmeta[1] -= 1
            inq[2 * v + reason] = 0
            if is_offline(v, recovery, parent):
                continue
            if reason == REASON_EXPLOITED:
                if compromised[v] == 0:
                    continue
                compromised[v] = 0
                vulnerable[v] = 0
                known[v] = 0
                patch[v] = 0
                recovery[v] = delta
                out[T_RECOVERIES_STARTED] += 1
            else:
                if vulnerable[v] == 0 or compromised[v] == 1 or patch[v] > 0:
                    continue
                patch[v] = delta
                out[T_PATCHES_STARTED] += 1
            busy[j] = delta
            break

    # sample network status
    offline_mask(recovery, parent, order, offline)
    n_comp = 0
    n_off = 0
    for v in range(n):
        n_comp += compromised[v]
        n_off += offline[v]
    out[T_COMPROMISED] = n_comp
    out[T_OFFLINE] = n_off
    out[T_CENTER] = compromised[central]

    # 6. timers
    for v in range(n):
        if recovery[v] > 0 and isolate == 0:
            recovery[v] -= 1
            if recovery[v] == 0:
                vulnerable[v] = 0
                compromised[v] = 0
                patch[v] = 0
                out[T_RECOVERIES_DONE] += 1
        if patch[v] > 0:
            patch[v] -= 1
            if patch[v] == 0:
                vulnerable[v] = 0
                out[T_PATCHES_DONE] += 1
    for j in range(interceptors):
        if busy[j] > 0:
            busy[j] -= 1
    offline_mask(recovery, parent, order, offline)
    accessible_mask(indptr, indices, peripheral, compromised, offline, acc)
    n_known = 0
    for v in range(n):
        if known[v] == 1:
            if vulnerable[v] == 0 or compromised[v] == 1 or acc[v] == 0:
                known[v] = 0
            else:
                n_known += 1
    out[T_KNOWN] = n_known
    out[T_QUEUE] = qmeta[1]


@jit
def run_kernel(
    indptr, indices, peripheral, parent, order,
    iparams, fparams, uniforms,
    vulnerable, compromised, known, recovery, patch, busy,
    qr, qk, qmeta, inq,
    trace,
):
    """Run ``uniforms.shape[0]`` ticks, one trace row per tick."""
    n = iparams[I_N]
    scratch_a = np.zeros(n, dtype=np.uint8)
    scratch_b = np.zeros(n, dtype=np.uint8)
    elig = np.zeros(n, dtype=np.int64)
    for t in range(uniforms.shape[0]):
        tick_kernel(
            indptr, indices, peripheral, parent, order,
            iparams, fparams, uniforms[t],
            vulnerable, compromised, known, recovery, patch, busy,
            qr, qk, qmeta, inq,
            scratch_a, scratch_b, elig, trace[t],
        )
