"""Vectorized numpy implementations of the hot kernels.

Signatures mirror ``_jit`` exactly; ``symtest._kernels`` picks one of them.
"""
import numpy as np


def nested_commutators(h, u, nmax):
    out = np.empty((nmax + 1,) + u.shape, dtype=np.complex128)
    out[0] = u
    for n in range(1, nmax + 1):
        c = out[n - 1]
        out[n] = h @ c - c @ h
    return out


def twirl_sum(elements, x):
    # sum_g U X U^dag / |G|
    return np.einsum("gij,jk,glk->il", elements, x, elements.conj()) / elements.shape[0]


def find_match(elements, count, cand, tol):
    if count == 0:
        return -1
    diff = np.abs(elements[:count] - cand[None]).reshape(count, -1).max(axis=1)
    hits = np.flatnonzero(diff < tol)
    return int(hits[0]) if hits.size else -1


def controlled_apply(mats, state):
    return np.einsum("gij,gj->gi", mats, state)


def ansatz_states(thetas, n, layers, pairs):
    b = thetas.shape[0]
    psi = np.zeros((b, 2**n), dtype=np.complex128)
    psi[:, 0] = 1.0
    psi = psi.reshape((b,) + (2,) * n)
    th = thetas.reshape(b, layers, n, 2)
    for layer in range(layers):
        for q in range(n):
            half_y = th[:, layer, q, 0] / 2
            half_z = th[:, layer, q, 1] / 2
            c, s = np.cos(half_y), np.sin(half_y)
            ph = np.exp(-1j * half_z)
            # RZ @ RY
            m = np.empty((b, 2, 2), dtype=np.complex128)
            m[:, 0, 0] = ph * c
            m[:, 0, 1] = -ph * s
            m[:, 1, 0] = ph.conj() * s
            m[:, 1, 1] = ph.conj() * c
            moved = np.moveaxis(psi, q + 1, -1)
            moved = np.einsum("bij,b...j->b...i", m, moved)
            psi = np.moveaxis(moved, -1, q + 1)
        for a, c2 in pairs:
            idx = [slice(None)] * (n + 1)
            idx[a + 1] = 1
            idx[c2 + 1] = 1
            psi = psi.copy()
            psi[tuple(idx)] *= -1
    return np.ascontiguousarray(psi.reshape(b, 2**n))


def count_accepts(xs, us, probs):
    return int(np.count_nonzero(us < probs[xs]))
