"""Minimum-distance computation for stacked codes.

Exact distances come from full enumeration of the kernel, organized as
(logical class) x (stabilizer span) over bit-packed vectors; this is the
replacement for an integer-programming solver and is feasible up to
roughly rank(H) + k = 26.  Larger codes get randomized information-set
upper bounds with the same "<= d" reporting convention the parameter
tables use.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .codes import StackedCode

_EXACT_BUDGET_BITS = 26


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed the documented exact-distance budget."""


@dataclass(frozen=True)
class DistanceResult:
    """Distance estimate with its achieving logical operator.

    d_upper is exact when exact=True; otherwise it is the best upper
    bound found within the effort budget.
    """

    d_upper: int
    exact: bool
    witness: np.ndarray
    effort: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NotFoundBelow:
    """distance_exact outcome when no logical has weight <= w_max."""

    w_max: int


def _check_witness(code: StackedCode, witness: np.ndarray, weight: int) -> None:
    assert not gf2.matmul(code.H, witness[:, None]).any()
    assert not code.row_basis.contains(witness)
    assert int(witness.sum()) == weight


def _span_packed(rows: np.ndarray, nwords: int) -> np.ndarray:
    """All 2^r GF(2) combinations of r packed rows, by doubling."""
    span = np.zeros((1, nwords), dtype=np.uint64)
    for row in rows:
        span = np.concatenate([span, span ^ row])
    return span


def distance_exact(code: StackedCode, w_max: int | None = None):
    """Exact minimum weight of a logical operator.

    Args:
        code: the stacked code.
        w_max: optional cutoff; if the true distance exceeds it, a
            NotFoundBelow record is returned instead of a result.

    Returns:
        DistanceResult with exact=True, or NotFoundBelow.

    Raises:
        BudgetExceeded: if rank(H) + k is too large to enumerate.
    """
    r, k = code.rank_h, code.k
    if k == 0:
        raise ValueError("k = 0 code has no logical operators")
    if r + k > _EXACT_BUDGET_BITS:
        raise BudgetExceeded(
            f"rank + k = {r} + {k} exceeds the exact budget of "
            f"{_EXACT_BUDGET_BITS} bits; use distance_randomized"
        )
    nwords = max(1, (code.n + 63) // 64)
    stab_span = _span_packed(code.row_basis.packed, nwords)
    classes = _span_packed(gf2.pack_rows(code.logicals_z), nwords)

    # Class index 0 is the pure-stabilizer coset, which holds no logical;
    # drop it up front.  Iterate over the smaller factor so the
    # vectorized popcount runs over the larger one.
    classes = classes[1:]
    best = code.n + 1
    best_pair = None
    if stab_span.shape[0] <= classes.shape[0]:
        outer, inner = stab_span, classes
    else:
        outer, inner = classes, stab_span
    for i, vec in enumerate(outer):
        weights = gf2.popcount_rows(inner ^ vec)
        j = int(np.argmin(weights))
        w = int(weights[j])
        if w < best:
            best = w
            best_pair = (i, j)
    effort = {"enumerated": int(stab_span.shape[0]) * int(classes.shape[0])}
    if w_max is not None and best > w_max:
        return NotFoundBelow(w_max)
    i, j = best_pair
    packed = outer[i] ^ inner[j]
    witness = gf2.unpack_rows(packed[None, :], code.n)[0]
    _check_witness(code, witness, best)
    return DistanceResult(d_upper=best, exact=True, witness=witness, effort=effort)


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:distance:{batch}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def distance_randomized(
    code: StackedCode,
    iters: int,
    seed: int,
    initial: np.ndarray | None = None,
    batch_size: int = 16,
) -> DistanceResult:
    """Randomized information-set upper bound on the distance.

    Each iteration row-reduces the kernel basis of H under a fresh random
    column permutation and scores the resulting rows and their pairwise
    sums, keeping any vector outside rowspace(H).  Iterations are grouped
    into batches with independent RNG streams derived from (seed, batch),
    so results are deterministic for a fixed seed and adding iterations
    can only tighten the bound.

    Args:
        code: the stacked code.
        iters: number of information-set draws (>= 1).
        seed: RNG seed; every stream is derived from it.
        initial: optional known logical operator used as the starting
            bound (e.g. a witness from distance_exact).
        batch_size: iterations per RNG stream.

    Returns:
        DistanceResult with exact=False.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if code.k == 0:
        raise ValueError("k = 0 code has no logical operators")
    kernel = np.concatenate(
        [
            gf2.unpack_rows(code.row_basis.packed, code.n),
            code.logicals_z,
        ],
        axis=0,
    )
    best = code.n + 1
    witness = None
    if initial is not None:
        initial = gf2.asbin(initial)
        _check_witness(code, initial, int(initial.sum()))
        best = int(initial.sum())
        witness = initial.copy()

    checked = 0
    for batch_start in range(0, iters, batch_size):
        rng = _batch_rng(seed, batch_start // batch_size)
        for _ in range(min(batch_size, iters - batch_start)):
            perm = rng.permutation(code.n)
            reduced, _ = gf2.rref(kernel[:, perm])
            rows = np.zeros_like(reduced)
            rows[:, perm] = reduced
            candidates = [rows]
            idx_a, idx_b = np.triu_indices(rows.shape[0], k=1)
            candidates.append(rows[idx_a] ^ rows[idx_b])
            for block in candidates:
                weights = block.sum(axis=1)
                order = np.argsort(weights, kind="stable")
                for idx in order:
                    w = int(weights[idx])
                    if w >= best:
                        break
                    checked += 1
                    if not code.row_basis.contains(block[idx]):
                        best = w
                        witness = block[idx].copy()
    if witness is None:
        # Fall back to the stored representatives so a result always exists.
        weights = code.logicals_z.sum(axis=1)
        idx = int(np.argmin(weights))
        witness = code.logicals_z[idx].copy()
        best = int(weights[idx])
    _check_witness(code, witness, best)
    return DistanceResult(
        d_upper=best,
        exact=False,
        witness=witness,
        effort={"iters": iters, "membership_checks": checked},
    )
