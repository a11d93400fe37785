"""Distributions and column-stochastic matrices.

Orientation is fixed everywhere: ``P[j, i]`` is the weight moved from node
``i`` to node ``j``, so a distribution ``x`` evolves as ``P @ x``.
Distances are plain L1 (not halved); the mixing threshold is 1/2 of that.
"""

from __future__ import annotations

import numpy as np

from localmix.errors import DegenerateConditioningError, InvalidInputError
from localmix.graphs import as_mask

SUM_TOL = 1e-9
CLAMP_TOL = 1e-12


def as_dist(x, n: int | None = None) -> np.ndarray:
    """Validate a probability vector; tiny negatives from roundoff become 0."""
    x = np.array(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError(f"distribution must be a non-empty vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise InvalidInputError(f"distribution has {x.size} entries, expected {n}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("distribution has non-finite entries")
    if x.min() < -CLAMP_TOL:
        raise InvalidInputError(f"negative probability {x.min():.3g}")
    x[x < 0] = 0.0
    if abs(x.sum() - 1.0) > SUM_TOL:
        raise InvalidInputError(f"distribution sums to {x.sum():.12g}, not 1")
    return x


def as_stochastic(P, n: int | None = None) -> np.ndarray:
    """Validate a column-stochastic matrix."""
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidInputError(f"stochastic matrix must be square, got shape {P.shape}")
    if n is not None and P.shape[0] != n:
        raise InvalidInputError(f"matrix is {P.shape[0]}x{P.shape[0]}, expected {n}x{n}")
    if not np.all(np.isfinite(P)):
        raise InvalidInputError("matrix has non-finite entries")
    if P.min() < -CLAMP_TOL:
        raise InvalidInputError(f"negative matrix entry {P.min():.3g}")
    P[P < 0] = 0.0
    sums = P.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > SUM_TOL)
    if bad.size:
        raise InvalidInputError(
            f"column {int(bad[0])} sums to {sums[bad[0]]:.12g}; matrix must be column-stochastic"
        )
    return P


def is_stochastic(P) -> bool:
    try:
        as_stochastic(P)
    except InvalidInputError:
        return False
    return True


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def dirac(i: int, n: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def l1_distance(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InvalidInputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.abs(x - y).sum())


def mass(x, W) -> float:
    x = np.asarray(x, dtype=float)
    return float(x[as_mask(W, x.size)].sum())


def condition(x, W) -> np.ndarray:
    """``x`` conditioned on landing in ``W``."""
    x = np.asarray(x, dtype=float)
    mask = as_mask(W, x.size)
    total = x[mask].sum()
    if total <= 0.0:
        raise DegenerateConditioningError("cannot condition on a set of zero mass")
    out = np.where(mask, x, 0.0)
    return out / total


def apply(P, x) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    x = np.asarray(x, dtype=float)
    if P.ndim != 2 or P.shape[1] != x.shape[0]:
        raise InvalidInputError(f"cannot apply {P.shape} matrix to vector of length {x.shape[0]}")
    y = P @ x
    y[y < 0] = 0.0
    return y


def leaves_invariant(P, pi, tol: float = SUM_TOL) -> bool:
    return l1_distance(apply(P, pi), pi) <= tol


def shift_matrix(n: int, step: int = 1) -> np.ndarray:
    """Cyclic permutation sending node ``i`` to ``i + step (mod n)``."""
    return np.roll(np.eye(n), step, axis=0)


# --- plain-text matrix and vector formats -----------------------------------

def matrix_to_csv(P) -> str:
    """Row-major CSV; the first line holds ``n``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    lines = [str(P.shape[-1])]
    lines += [",".join(repr(float(v)) for v in row) for row in P]
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise InvalidInputError("empty CSV")
    try:
        n = int(rows[0])
        data = np.array([[float(v) for v in ln.split(",")] for ln in rows[1:]])
    except ValueError as exc:
        raise InvalidInputError(f"malformed matrix CSV: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != n:
        raise InvalidInputError(f"CSV rows must have {n} columns")
    if data.shape[0] == 1:
        return data[0]
    if data.shape[0] != n:
        raise InvalidInputError(f"CSV holds {data.shape[0]} rows, expected 1 or {n}")
    return data
