"""Loop-form kernels compiled with numba.

Each function must match its counterpart in ``_np`` to roundoff.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _matmul(a, b, out):
    d = a.shape[0]
    for i in range(d):
        for k in range(d):
            acc = 0j
            for j in range(d):
                acc += a[i, j] * b[j, k]
            out[i, k] = acc


@njit(cache=True)
def nested_commutators(h, u, nmax):
    d = u.shape[0]
    out = np.empty((nmax + 1, d, d), dtype=np.complex128)
    out[0] = u
    left = np.empty((d, d), dtype=np.complex128)
    right = np.empty((d, d), dtype=np.complex128)
    for n in range(1, nmax + 1):
        prev = out[n - 1]
        _matmul(h, prev, left)
        _matmul(prev, h, right)
        for i in range(d):
            for j in range(d):
                out[n, i, j] = left[i, j] - right[i, j]
    return out


@njit(cache=True)
def twirl_sum(elements, x):
    g = elements.shape[0]
    d = x.shape[0]
    acc = np.zeros((d, d), dtype=np.complex128)
    ux = np.empty((d, d), dtype=np.complex128)
    for e in range(g):
        u = elements[e]
        _matmul(u, x, ux)
        for i in range(d):
            for l in range(d):
                s = 0j
                for k in range(d):
                    s += ux[i, k] * np.conj(u[l, k])
                acc[i, l] += s
    return acc / g


@njit(cache=True)
def find_match(elements, count, cand, tol):
    d = cand.shape[0]
    for e in range(count):
        ok = True
        for i in range(d):
            for j in range(d):
                if abs(elements[e, i, j] - cand[i, j]) >= tol:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return e
    return -1


@njit(cache=True)
def controlled_apply(mats, state):
    g, d = state.shape
    out = np.empty((g, d), dtype=np.complex128)
    for e in range(g):
        for i in range(d):
            acc = 0j
            for j in range(d):
                acc += mats[e, i, j] * state[e, j]
            out[e, i] = acc
    return out


@njit(cache=True)
def _rotate(psi, n, q, m00, m01, m10, m11):
    dim = psi.shape[0]
    bit = 1 << (n - 1 - q)
    for i in range(dim):
        if i & bit == 0:
            a = psi[i]
            b = psi[i | bit]
            psi[i] = m00 * a + m01 * b
            psi[i | bit] = m10 * a + m11 * b


@njit(cache=True)
def ansatz_states(thetas, n, layers, pairs):
    nb = thetas.shape[0]
    dim = 1 << n
    out = np.zeros((nb, dim), dtype=np.complex128)
    psi = np.empty(dim, dtype=np.complex128)
    for b in range(nb):
        psi[:] = 0
        psi[0] = 1.0
        p = 0
        for layer in range(layers):
            for q in range(n):
                hy = thetas[b, p] / 2
                hz = thetas[b, p + 1] / 2
                p += 2
                c = math.cos(hy)
                s = math.sin(hy)
                ph = complex(math.cos(hz), -math.sin(hz))
                phc = complex(math.cos(hz), math.sin(hz))
                _rotate(psi, n, q, ph * c, -ph * s, phc * s, phc * c)
            for k in range(pairs.shape[0]):
                ba = 1 << (n - 1 - pairs[k, 0])
                bc = 1 << (n - 1 - pairs[k, 1])
                for i in range(dim):
                    if (i & ba) and (i & bc):
                        psi[i] = -psi[i]
        out[b] = psi
    return out


@njit(cache=True)
def count_accepts(xs, us, probs):
    hits = 0
    for k in range(xs.shape[0]):
        if us[k] < probs[xs[k]]:
            hits += 1
    return hits
