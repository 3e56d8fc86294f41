"""Todd-Coxeter kernels (numba).

Cosets are 0-based rows, -1 marks an undefined entry, column 2i is generator
i and column 2i+1 its inverse.  Words are flattened arrays of column indices
with start offsets.
"""

from __future__ import annotations

import numpy as np

from ._bsgs import njit

OK = 0
OVERFLOW = 1


@njit(cache=True)
def _rep(p, k):
    r = k
    while p[r] != r:
        r = p[r]
    while p[k] != r:
        nxt = p[k]
        p[k] = r
        k = nxt
    return r


@njit(cache=True)
def _merge(p, q, qlen, k, l):
    k = _rep(p, k)
    l = _rep(p, l)
    if k == l:
        return qlen, 0
    if k > l:
        k, l = l, k
    p[l] = k
    q[qlen] = l
    return qlen + 1, 1


@njit(cache=True)
def _coincidence(table, p, q, inv, a, b, ded, dtop, dmax):
    """Identify cosets a and b and everything forced by it.

    Returns (number of cosets killed, new deduction-stack top); dtop = -1
    signals a deduction-stack overflow.
    """
    ncol = table.shape[1]
    qlen, killed = _merge(p, q, 0, a, b)
    i = 0
    while i < qlen:
        e = q[i]
        i += 1
        for x in range(ncol):
            f = table[e, x]
            if f >= 0:
                ix = inv[x]
                if table[f, ix] == e:
                    table[f, ix] = -1
                e1 = _rep(p, e)
                f1 = _rep(p, f)
                if table[e1, x] >= 0:
                    qlen, k = _merge(p, q, qlen, f1, table[e1, x])
                    killed += k
                elif table[f1, ix] >= 0:
                    qlen, k = _merge(p, q, qlen, e1, table[f1, ix])
                    killed += k
                else:
                    table[e1, x] = f1
                    table[f1, ix] = e1
                    if dtop >= 0:
                        if dtop < dmax:
                            ded[dtop, 0] = e1
                            ded[dtop, 1] = x
                            dtop += 1
                        else:
                            dtop = -1
    # entries of surviving cosets may still point at dead ones
    return killed, dtop


@njit(cache=True)
def _scan(table, p, q, inv, alpha, w, lo, hi, define, n, cap, ded, dtop, dmax):
    """Scan the relator w[lo:hi] at alpha, filling gaps when ``define``.

    Returns (n, killed, dtop, status).
    """
    killed = 0
    f = alpha
    b = alpha
    i = lo
    j = hi - 1
    while True:
        while i <= j and table[f, w[i]] >= 0:
            f = table[f, w[i]]
            i += 1
        if i > j:
            if f != b:
                k, dtop = _coincidence(table, p, q, inv, f, b, ded, dtop, dmax)
                killed += k
            return n, killed, dtop, OK
        while j >= i and table[b, inv[w[j]]] >= 0:
            b = table[b, inv[w[j]]]
            j -= 1
        if j < i:
            k, dtop = _coincidence(table, p, q, inv, f, b, ded, dtop, dmax)
            killed += k
            return n, killed, dtop, OK
        if i == j:
            table[f, w[i]] = b
            table[b, inv[w[i]]] = f
            if dtop >= 0:
                if dtop < dmax:
                    ded[dtop, 0] = f
                    ded[dtop, 1] = w[i]
                    dtop += 1
                else:
                    dtop = -1
            return n, killed, dtop, OK
        if not define:
            return n, killed, dtop, OK
        if n >= cap:
            return n, killed, dtop, OVERFLOW
        table[n, :] = -1
        p[n] = n
        table[f, w[i]] = n
        table[n, inv[w[i]]] = f
        n += 1


@njit(cache=True)
def _compact(table, p, n, alpha):
    """Renumber live cosets 0..k-1 in order; returns (k, new alpha)."""
    newidx = np.full(n, -1, dtype=np.int64)
    k = 0
    new_alpha = -1
    for c in range(n):
        if p[c] == c:
            if new_alpha < 0 and c >= alpha:
                new_alpha = k
            newidx[c] = k
            k += 1
    if new_alpha < 0:
        new_alpha = k
    for c in range(n):
        if p[c] == c:
            r = newidx[c]
            for x in range(table.shape[1]):
                t = table[c, x]
                table[r, x] = -1 if t < 0 else newidx[_rep(p, t)]
    for c in range(k):
        p[c] = c
    return k, new_alpha


@njit(cache=True)
def _process_deductions(table, p, q, inv, ded, dtop, dmax, cw, cstart, cend, first_index, first_count, n, cap):
    """Felsch deduction processing over all cyclic conjugates."""
    killed = 0
    while dtop > 0:
        dtop -= 1
        c = ded[dtop, 0]
        x = ded[dtop, 1]
        if p[c] != c:
            continue
        for t in range(first_count[x]):
            r = first_index[x, t]
            n, k, dtop, st = _scan(table, p, q, inv, c, cw, cstart[r], cend[r], False, n, cap, ded, dtop, dmax)
            killed += k
            if dtop < 0:
                return n, killed, dtop
            if p[c] != c:
                break
    return n, killed, dtop


@njit(cache=True)
def _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax):
    killed = 0
    for c in range(n):
        if p[c] != c:
            continue
        for r in range(rstart.shape[0]):
            n, k, d, st = _scan(table, p, q, inv, c, rw, rstart[r], rend[r], False, n, cap, ded, -1, dmax)
            killed += k
            if p[c] != c:
                break
    return killed


@njit(cache=True)
def enumerate_cosets(ncol, inv, rw, rstart, rend, sw, sstart, send, cw, cstart, cend, first_index, first_count,
                     cap, switch_at):
    """HLT with lookahead; Felsch-style definitions once live cosets exceed switch_at.

    Returns (status, table, p, n, live).
    """
    table = np.full((cap + 1, ncol), -1, dtype=np.int64)
    p = np.arange(cap + 1)
    q = np.empty(cap + 1, dtype=np.int64)
    dmax = 4 * cap + 64
    ded = np.empty((dmax, 2), dtype=np.int64)
    n = 1
    live = 1
    for s in range(sstart.shape[0]):
        n, k, d, st = _scan(table, p, q, inv, 0, sw, sstart[s], send[s], True, n, cap, ded, -1, dmax)
        live = n - _count_dead(p, n)
        if st == OVERFLOW:
            return OVERFLOW, table, p, n, live
    felsch = False
    alpha = 0
    while alpha < n:
        if p[alpha] != alpha:
            alpha += 1
            continue
        if not felsch:
            overflowed = False
            for r in range(rstart.shape[0]):
                n, k, d, st = _scan(table, p, q, inv, alpha, rw, rstart[r], rend[r], True, n, cap, ded, -1, dmax)
                if st == OVERFLOW:
                    overflowed = True
                    break
                if p[alpha] != alpha:
                    break
            if overflowed:
                _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax)
                n, alpha = _compact(table, p, n, alpha)
                if n >= cap:
                    return OVERFLOW, table, p, n, n
                continue
            if p[alpha] != alpha:
                alpha += 1
                continue
        # fill the row of alpha
        restart = False
        for x in range(ncol):
            if p[alpha] != alpha:
                break
            if table[alpha, x] >= 0:
                continue
            if n >= cap:
                _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax)
                n, alpha = _compact(table, p, n, alpha)
                if n >= cap:
                    return OVERFLOW, table, p, n, n
                restart = True
                break
            table[n, :] = -1
            p[n] = n
            table[alpha, x] = n
            table[n, inv[x]] = alpha
            n += 1
            if felsch:
                ded[0, 0] = alpha
                ded[0, 1] = x
                n, k, dtop = _process_deductions(table, p, q, inv, ded, 1, dmax, cw, cstart, cend,
                                                 first_index, first_count, n, cap)
                if dtop < 0:
                    _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax)
        if restart:
            continue
        if not felsch and n - _count_dead(p, n) > switch_at:
            felsch = True
            # bring the table up to date before relying on deductions only
            _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax)
            n, alpha = _compact(table, p, n, alpha)
            # rows before alpha are complete and scanned; rescan everything once more lazily
            alpha = 0
            continue
        alpha += 1
    # a full scan of every relator at every coset certifies closure
    while _lookahead(table, p, q, inv, rw, rstart, rend, n, cap, ded, dmax) > 0:
        pass
    n, alpha = _compact(table, p, n, 0)
    return OK, table, p, n, n


@njit(cache=True)
def _count_dead(p, n):
    d = 0
    for c in range(n):
        if p[c] != c:
            d += 1
    return d
