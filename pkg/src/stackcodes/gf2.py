"""Dense GF(2) linear algebra on numpy uint8 matrices.

Matrices are 2-D numpy arrays with values in {0, 1} (dtype uint8); vectors
are 1-D.  Elimination kernels operate on rows packed into uint64 words,
which keeps rank/nullspace/rowspace tests fast enough for the distance
search, where they are the inner loop.  All public functions leave their
inputs untouched.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "asbin",
    "identity",
    "zeros",
    "weight",
    "matmul",
    "kron",
    "rank",
    "rref",
    "nullspace_basis",
    "in_rowspace",
    "solve",
    "RowBasis",
    "pack_rows",
    "unpack_rows",
    "popcount_rows",
]


def asbin(m) -> np.ndarray:
    """Coerce to a uint8 array reduced mod 2."""
    a = np.asarray(m)
    if a.dtype != np.uint8:
        a = (a % 2).astype(np.uint8)
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.uint8)


def weight(v) -> int:
    """Hamming weight of a binary vector."""
    return int(np.count_nonzero(asbin(v)))


def matmul(a, b) -> np.ndarray:
    """Matrix product over GF(2).

    Raises:
        ValueError: on inner-dimension mismatch.
    """
    a = asbin(a)
    b = asbin(b)
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


def kron(a, b) -> np.ndarray:
    """Kronecker product over GF(2)."""
    return (np.kron(asbin(a), asbin(b)) % 2).astype(np.uint8)


# ---------------------------------------------------------------------------
# Packed representation: each row is cols bits stored little-endian in uint64
# words.  Requires a little-endian host (checked on import).

if np.little_endian is False:  # pragma: no cover
    raise ImportError("packed GF(2) kernels assume a little-endian host")


def pack_rows(m) -> np.ndarray:
    """Pack a (r, c) binary matrix into (r, ceil(c/64)) uint64 words."""
    m = np.ascontiguousarray(asbin(np.atleast_2d(m)))
    r, c = m.shape
    nwords = max(1, (c + 63) // 64)
    packed_bytes = np.packbits(m, axis=1, bitorder="little")
    buf = np.zeros((r, nwords * 8), dtype=np.uint8)
    buf[:, : packed_bytes.shape[1]] = packed_bytes
    return buf.view(np.uint64)


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of pack_rows."""
    packed = np.atleast_2d(packed)
    bits = np.unpackbits(packed.view(np.uint8), axis=1, bitorder="little")
    return np.ascontiguousarray(bits[:, :cols])


def popcount_rows(packed: np.ndarray) -> np.ndarray:
    """Hamming weight of each packed row."""
    return np.bitwise_count(np.atleast_2d(packed)).sum(axis=1, dtype=np.int64)


def _eliminate(rows: np.ndarray, cols: int, pivot_cols_limit: int | None = None):
    """In-place RREF of packed rows.

    Pivoting is deterministic: first set bit per column, columns left to
    right.  Eliminates both above and below each pivot.

    Returns:
        List of pivot column indices.
    """
    nrows = rows.shape[0]
    if pivot_cols_limit is None:
        pivot_cols_limit = cols
    pivots: list[int] = []
    r = 0
    one = np.uint64(1)
    for c in range(pivot_cols_limit):
        if r == nrows:
            break
        w, b = divmod(c, 64)
        bit = np.uint64(b)
        col = (rows[r:, w] >> bit) & one
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            rows[[r, piv]] = rows[[piv, r]]
        hits = np.nonzero((rows[:, w] >> bit) & one)[0]
        hits = hits[hits != r]
        if hits.size:
            rows[hits] ^= rows[r]
        pivots.append(c)
        r += 1
    return pivots


def rref(m):
    """Reduced row-echelon form over GF(2).

    Returns:
        (R, pivots): R is uint8 of the same shape, pivots the list of
        pivot column indices (len(pivots) == rank).
    """
    m = np.atleast_2d(asbin(m))
    packed = pack_rows(m)
    pivots = _eliminate(packed, m.shape[1])
    return unpack_rows(packed, m.shape[1]), pivots


def rank(m) -> int:
    """GF(2) row rank."""
    m = np.atleast_2d(asbin(m))
    packed = pack_rows(m)
    return len(_eliminate(packed, m.shape[1]))


def nullspace_basis(m) -> np.ndarray:
    """Basis of {v : m v = 0} as rows of a (cols - rank, cols) matrix."""
    m = np.atleast_2d(asbin(m))
    ncols = m.shape[1]
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = np.zeros((len(free_cols), ncols), dtype=np.uint8)
    for i, f in enumerate(free_cols):
        basis[i, f] = 1
        for row_idx, p in enumerate(pivots):
            basis[i, p] = red[row_idx, f]
    return basis


class RowBasis:
    """Row space of a matrix in reduced echelon form, for repeated
    membership tests and reductions.

    Thread-safe after construction (no mutation).
    """

    def __init__(self, m):
        m = np.atleast_2d(asbin(m))
        self.cols = m.shape[1]
        packed = pack_rows(m)
        self.pivots = _eliminate(packed, self.cols)
        self.packed = packed[: len(self.pivots)].copy()

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce_packed(self, v: np.ndarray) -> np.ndarray:
        """Reduce a packed row vector modulo the row space."""
        v = v.copy()
        one = np.uint64(1)
        for i, c in enumerate(self.pivots):
            w, b = divmod(c, 64)
            if (v[w] >> np.uint64(b)) & one:
                v ^= self.packed[i]
        return v

    def reduce(self, v) -> np.ndarray:
        v = asbin(v)
        if v.shape[-1] != self.cols:
            raise ValueError(f"length mismatch: {v.shape[-1]} != {self.cols}")
        return unpack_rows(self.reduce_packed(pack_rows(v)[0]), self.cols)[0]

    def contains_packed(self, v: np.ndarray) -> bool:
        return not self.reduce_packed(v).any()

    def contains(self, v) -> bool:
        v = asbin(v)
        if v.shape[-1] != self.cols:
            raise ValueError(f"length mismatch: {v.shape[-1]} != {self.cols}")
        return self.contains_packed(pack_rows(v)[0])


class IncrementalBasis:
    """Growing echelonized basis of packed row vectors.

    add() reduces a vector against the current basis and absorbs it if
    independent; used for logical-operator extraction and coset filtering.
    """

    def __init__(self, cols: int):
        self.cols = cols
        self.nwords = max(1, (cols + 63) // 64)
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        one = np.uint64(1)
        for piv, row in zip(self.pivots, self.rows):
            w, b = divmod(piv, 64)
            if (v[w] >> np.uint64(b)) & one:
                v ^= row
        return v

    def add(self, v: np.ndarray) -> bool:
        """Absorb packed vector v; True iff it enlarged the span."""
        v = self._reduce(v.copy())
        if not v.any():
            return False
        # Leading (lowest-index) set bit becomes the pivot.
        w = int(np.nonzero(v)[0][0])
        self.pivots.append(w * 64 + _lowest_bit(int(v[w])))
        self.rows.append(v)
        return True

    def contains(self, v: np.ndarray) -> bool:
        return not self._reduce(v.copy()).any()


def _lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def in_rowspace(m, v) -> bool:
    """Whether v is a GF(2) combination of the rows of m.

    Raises:
        ValueError: if len(v) != m.cols.
    """
    return RowBasis(m).contains(v)


def solve(m, s):
    """One solution x of m x = s over GF(2), or None if inconsistent."""
    m = np.atleast_2d(asbin(m))
    s = asbin(s).reshape(-1)
    if s.shape[0] != m.shape[0]:
        raise ValueError("right-hand side length mismatch")
    aug = np.concatenate([m, s[:, None]], axis=1)
    packed = pack_rows(aug)
    pivots = _eliminate(packed, aug.shape[1], pivot_cols_limit=m.shape[1])
    red = unpack_rows(packed, aug.shape[1])
    nrows = m.shape[0]
    # Any leftover nonzero RHS below the pivot rows means no solution.
    if red[len(pivots):, -1].any():
        return None
    x = np.zeros(m.shape[1], dtype=np.uint8)
    for row_idx, p in enumerate(pivots):
        x[p] = red[row_idx, -1]
    return x
