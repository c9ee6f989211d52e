"""Numeric hot loops: batch polynomial evaluation, projected time stepping,
vertex-tensor folding, and the simplex-method pivot loop.

Each kernel exists in two functionally identical forms: a pure-numpy one and
a numba ``@njit`` compilation of the same source.  The active backend is
chosen at import time by the environment variable ``COPOLYAP_NUMBA``
("0" forces the numpy fallback; anything else, or unset, uses numba when it
is importable).  Both forms stay reachable through ``IMPLS`` so the backends
can be benchmarked against each other in one process.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("COPOLYAP_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# kernel sources (written so the same code compiles under nopython mode and
# runs vectorized enough as plain numpy)
# ---------------------------------------------------------------------------


def _eval_many(exps, coefs, points):
    """Evaluate sum_m coefs[m] * prod_j x_j**exps[m,j] at each row of points."""
    npts = points.shape[0]
    nmono = exps.shape[0]
    nvar = exps.shape[1]
    out = np.zeros(npts)
    for m in range(nmono):
        term = np.full(npts, coefs[m])
        for j in range(nvar):
            e = exps[m, j]
            for _ in range(e):
                term = term * points[:, j]
        out += term
    return out


def _eval_field(exps, coefs, x, out):
    """Evaluate a vector field given as (exps, coefs[i,m]) at a single point."""
    nout = coefs.shape[0]
    nmono = exps.shape[0]
    nvar = exps.shape[1]
    for i in range(nout):
        acc = 0.0
        for m in range(nmono):
            c = coefs[i, m]
            if c != 0.0:
                t = c
                for j in range(nvar):
                    e = exps[m, j]
                    for _ in range(e):
                        t *= x[j]
                acc += t
        out[i] = acc


def _simulate_path(exps, coefs, x0, dt, nsteps, blow_norm, act_tol):
    """Projected explicit Euler for xdot = f(x) + eta on the orthant.

    Returns (states, etas, stop) where stop is the index of the last computed
    state (== nsteps unless the norm exceeded blow_norm earlier).  etas[k] is
    the per-step multiplier estimate for the step leaving state k; the final
    row holds the instantaneous multiplier at the last state.
    """
    n = x0.shape[0]
    nmono = exps.shape[0]
    states = np.zeros((nsteps + 1, n))
    etas = np.zeros((nsteps + 1, n))
    x = np.zeros(n)
    for j in range(n):
        x[j] = x0[j] if x0[j] > 0.0 else 0.0
    states[0] = x
    fx = np.zeros(n)
    stop = nsteps
    for k in range(nsteps + 1):
        for i in range(n):
            acc = 0.0
            for m in range(nmono):
                c = coefs[i, m]
                if c != 0.0:
                    t = c
                    for j in range(n):
                        e = exps[m, j]
                        for _ in range(e):
                            t *= x[j]
                    acc += t
            fx[i] = acc
        if k == stop:
            break
        sq = 0.0
        for j in range(n):
            y = x[j] + dt * fx[j]
            xn = y if y > 0.0 else 0.0
            etas[k, j] = (xn - x[j]) / dt - fx[j]
            x[j] = xn
            sq += xn * xn
        states[k + 1] = x
        if sq > blow_norm * blow_norm:
            stop = k + 1
    for j in range(n):
        if states[stop, j] <= act_tol and fx[j] < 0.0:
            etas[stop, j] = -fx[j]
        else:
            etas[stop, j] = 0.0
    return states, etas, stop


def _fold_tuple_values(dense, verts, order, combo_flat):
    """Multilinear vertex-tuple values for a stack of symmetric forms.

    dense: (K, nvar**order) flattened symmetric tensors.
    verts: (S, p, nvar) vertex matrices, one per simplex.
    combo_flat: (T,) flat indices sum_t j_t * p**(order-1-t) of the wanted
    vertex tuples.  Returns values of shape (S, T, K).
    """
    nsimp = verts.shape[0]
    p = verts.shape[1]
    nvar = verts.shape[2]
    K = dense.shape[0]
    T = combo_flat.shape[0]
    out = np.zeros((nsimp, T, K))
    for s in range(nsimp):
        V = verts[s]
        for k in range(K):
            buf = dense[k].copy()
            done = 1
            for _ in range(order):
                cols = buf.shape[0] // nvar
                mat = buf.reshape(nvar, cols)
                folded = np.dot(V, mat)  # (p, cols)
                buf = np.ascontiguousarray(folded.T).reshape(cols * p)
                done *= p
            for t in range(T):
                out[s, t, k] = buf[combo_flat[t]]
    return out


def _lp_pivot_loop(tab, basis, tol, maxiter):
    """Primal simplex iterations on a dense tableau.

    Pricing is Dantzig (most-negative reduced cost) while progress is made;
    after 25 consecutive degenerate pivots it switches to Bland's
    anti-cycling rule (lowest-index entering, lowest basis index among exact
    minimum-ratio ties) until the objective strictly improves.  Deterministic
    for a fixed tableau layout.

    tab has the objective (reduced-cost) row last and the rhs column last.
    Returns 0 = optimal, 1 = unbounded, 2 = iteration limit.
    """
    nrows = tab.shape[0] - 1
    ncols = tab.shape[1] - 1
    stall = 0
    for _ in range(maxiter):
        use_bland = stall >= 25
        enter = -1
        if use_bland:
            for j in range(ncols):
                if tab[nrows, j] < -tol:
                    enter = j
                    break
        else:
            most_neg = -tol
            for j in range(ncols):
                if tab[nrows, j] < most_neg:
                    most_neg = tab[nrows, j]
                    enter = j
        if enter < 0:
            return 0
        best = np.inf
        for i in range(nrows):
            a = tab[i, enter]
            if a > tol:
                ratio = tab[i, ncols] / a
                if ratio < best:
                    best = ratio
        if best == np.inf:
            return 1
        leave = -1
        best_var = 1 << 62
        for i in range(nrows):
            a = tab[i, enter]
            if a > tol:
                ratio = tab[i, ncols] / a
                if ratio <= best and basis[i] < best_var:
                    leave = i
                    best_var = basis[i]
        stall = stall + 1 if best <= 0.0 else 0
        piv = tab[leave, enter]
        tab[leave, :] /= piv
        pivrow = tab[leave, :].copy()
        for i in range(nrows + 1):
            if i != leave:
                f = tab[i, enter]
                if f != 0.0:
                    tab[i, :] -= f * pivrow
        basis[leave] = enter
    return 2


_PY_IMPLS = {
    "eval_many": _eval_many,
    "eval_field": _eval_field,
    "simulate_path": _simulate_path,
    "fold_tuple_values": _fold_tuple_values,
    "lp_pivot_loop": _lp_pivot_loop,
}

if HAVE_NUMBA:
    _NB_IMPLS = {
        name: numba.njit(cache=True)(fn) for name, fn in _PY_IMPLS.items()
    }
else:  # pragma: no cover
    _NB_IMPLS = {}

#: both backends, keyed by name, for benchmarks and cross-checks
IMPLS = {"numpy": _PY_IMPLS, "numba": _NB_IMPLS}

_ACTIVE = _NB_IMPLS if USE_NUMBA else _PY_IMPLS
BACKEND = "numba" if USE_NUMBA else "numpy"

eval_many = _ACTIVE["eval_many"]
eval_field = _ACTIVE["eval_field"]
simulate_path = _ACTIVE["simulate_path"]
fold_tuple_values = _ACTIVE["fold_tuple_values"]
lp_pivot_loop = _ACTIVE["lp_pivot_loop"]


def warmup():
    """Trigger jit compilation of every kernel on tiny inputs."""
    exps = np.array([[1, 0], [0, 1]], dtype=np.int64)
    coefs = np.array([1.0, -1.0])
    eval_many(exps, coefs, np.array([[1.0, 2.0]]))
    fcoefs = np.array([[1.0, 0.0], [0.0, -1.0]])
    simulate_path(exps, fcoefs, np.array([1.0, 1.0]), 1e-3, 2, 1e12, 1e-9)
    dense = np.array([[1.0, 0.0, 0.0, 1.0]])
    verts = np.array([[[1.0, 0.0], [0.0, 1.0]]])
    fold_tuple_values(dense, verts, 2, np.array([0, 1, 3], dtype=np.int64))
    tab = np.array([[1.0, 1.0, 1.0], [-1.0, 0.0, 0.0]])
    lp_pivot_loop(tab, np.array([1], dtype=np.int64), 1e-9, 10)
