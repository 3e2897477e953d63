"""Brute-force reference computations.

Everything here is written with explicit Python loops over indices and
shares no code with the package, so it can serve as an independent check.
"""

import itertools

import numpy as np


def inversion_parity(perm):
    """Sign of a permutation by counting inversions."""
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def levi_civita(n, scalar):
    out = np.zeros((n,) * n, dtype=complex)
    for idx in itertools.product(range(n), repeat=n):
        if len(set(idx)) == n:
            out[idx] = inversion_parity(idx) * scalar
    return out


def outer(x, y):
    out = np.zeros((len(x), len(y)), dtype=complex)
    for i in range(len(x)):
        for j in range(len(y)):
            out[i, j] = x[i] * y[j]
    return out


def trace_pair(t, up_axis, down_axis):
    """Sum over a repeated index of a dense tensor, loop by loop."""
    t = np.asarray(t)
    rest = [ax for ax in range(t.ndim) if ax not in (up_axis, down_axis)]
    out = np.zeros(tuple(t.shape[ax] for ax in rest), dtype=complex)
    for idx in itertools.product(*(range(t.shape[ax]) for ax in rest)):
        total = 0j
        for k in range(t.shape[up_axis]):
            full = [0] * t.ndim
            for ax, v in zip(rest, idx):
                full[ax] = v
            full[up_axis] = full[down_axis] = k
            total += t[tuple(full)]
        out[idx] = total
    return out


def hermitian_pairing(D, x, y):
    n = len(x)
    total = 0j
    for i in range(n):
        for j in range(n):
            total += D[i][j] * np.conj(x[j]) * y[i]
    return total


def skew2_lower(delta):
    return [[0, delta], [-delta, 0]]


def skew2_upper(delta):
    """Inverse matrix of [[0, delta], [-delta, 0]] found by solving the 2x2 system by hand."""
    # [[a, b], [c, e]] @ [[0, delta], [-delta, 0]] = I  ->  -b delta = 1, a delta = 0, ...
    return [[0, -1 / delta], [1 / delta, 0]]


def raised_hermitian(D, delta):
    up = skew2_upper(delta)
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for p in range(2):
                for q in range(2):
                    out[i, j] += up[i][p] * np.conj(up[j][q]) * D[p][q]
    return out


def concordance_residual_2d(D, delta):
    """Both inverse identities between the raised and the lower Hermitian metric."""
    up = raised_hermitian(D, delta)
    worst = 0.0
    for i in range(2):
        for j in range(2):
            s1 = sum(up[i, a] * D[j][a] for a in range(2))
            s2 = sum(D[a][j] * up[a, i] for a in range(2))
            target = 1.0 if i == j else 0.0
            worst = max(worst, abs(s1 - target), abs(s2 - target))
    return worst


def concordance_lhs_3d(D, delta):
    b = levi_civita(3, 1 / delta)
    lhs = np.zeros((3, 3, 3), dtype=complex)
    for a in range(3):
        for bb in range(3):
            for c in range(3):
                total = 0j
                for i in range(3):
                    for j in range(3):
                        for k in range(3):
                            total += b[i, j, k] * D[i][a] * D[j][bb] * D[k][c]
                lhs[a, bb, c] = total
    return lhs


def concordance_residual_3d(D, delta):
    lhs = concordance_lhs_3d(D, delta)
    rhs = np.conj(levi_civita(3, delta))
    return float(np.abs(lhs - rhs).max()), float(max(np.abs(lhs).max(), np.abs(rhs).max()))


def transform_hermitian(D, S):
    n = len(D)
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for p in range(n):
                for q in range(n):
                    out[i, j] += S[p][i] * np.conj(S[q][j]) * D[p][q]
    return out


def transform_covariant_form(form, S):
    """Components of a fully covariant tensor after the frame change S."""
    form = np.asarray(form)
    n, r = form.shape[0], form.ndim
    out = np.zeros(form.shape, dtype=complex)
    for new in itertools.product(range(n), repeat=r):
        total = 0j
        for old in itertools.product(range(n), repeat=r):
            coeff = 1
            for o, nw in zip(old, new):
                coeff *= S[o][nw]
            total += coeff * form[old]
        out[new] = total
    return out


def lower_vector(delta, x):
    d = skew2_lower(delta)
    return [sum(d[i][j] * x[j] for j in range(2)) for i in range(2)]
