"""Translation, twisted-translation, and reflection generators on an
l x m lattice, and evaluation of monomial polynomials into GF(2) matrices.

The generators act on one lm-dimensional sublattice block; column index
within a block is row-major with the y coordinate fastest (idx = jx*m + jy).
Also computes the dimension of the double-layer quotient ring, which counts
excitation types (the code built from u has twice that many logical qubits).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gf2


class SpecError(ValueError):
    """Invalid lattice or polynomial specification."""


@dataclass(frozen=True)
class LatticeSpec:
    """An l x m lattice with optional twisted boundary or reflections.

    twist = 0 means fully periodic; twist > 0 imposes x^l = y^twist
    instead of x^l = 1.  Reflections and twists are mutually exclusive.
    """

    l: int
    m: int = 1
    twist: int = 0
    allow_reflection: bool = False

    def __post_init__(self):
        if self.l < 1 or self.m < 1:
            raise SpecError(f"lattice sizes must be >= 1, got l={self.l}, m={self.m}")
        if self.twist < 0:
            raise SpecError("twist must be >= 0")
        if self.twist > 0:
            if self.twist >= self.m:
                raise SpecError(f"twist {self.twist} must be < m={self.m}")
            if self.allow_reflection:
                raise SpecError("twisted lattices cannot carry reflections")

    @property
    def block_size(self) -> int:
        return self.l * self.m

    @property
    def translation_only(self) -> bool:
        return not self.allow_reflection


@dataclass(frozen=True)
class MonomialTerm:
    """One monomial x^ex [p] y^ey [q]; factor order is fixed as written."""

    ex: int = 0
    ey: int = 0
    px: bool = False
    qy: bool = False

    def key(self):
        return (self.ex, self.px, self.ey, self.qy)


@dataclass(frozen=True)
class PolySpec:
    """A GF(2) sum of distinct monomial terms."""

    terms: tuple[MonomialTerm, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        keys = [t.key() for t in terms]
        if len(set(keys)) != len(keys):
            raise SpecError(f"duplicate monomial terms (would cancel over GF(2)): {keys}")

    @property
    def has_reflections(self) -> bool:
        return any(t.px or t.qy for t in self.terms)

    def normalized(self, spec: LatticeSpec) -> "PolySpec":
        """Reduce all exponents modulo the lattice relations.

        Out-of-range exponents are folded in with a warning; terms that
        collide after reduction are a spec error, matching the distinct-term
        invariant.
        """
        reduced = []
        for t in self.terms:
            if (t.px or t.qy) and not spec.allow_reflection:
                raise SpecError("reflection factors on a translation-only lattice")
            ex, ey = reduce_exponents(spec, t.ex, t.ey)
            if (ex, ey) != (t.ex, t.ey):
                warnings.warn(
                    f"term x^{t.ex}y^{t.ey} reduced to x^{ex}y^{ey} by the "
                    f"lattice relations (l={spec.l}, m={spec.m}, twist={spec.twist})",
                    stacklevel=2,
                )
            reduced.append(MonomialTerm(ex, ey, t.px, t.qy))
        return PolySpec(tuple(reduced))


@dataclass(frozen=True)
class StackPolynomial:
    """u = f + z * antipode(g) describing a double-layer stacking."""

    f: PolySpec
    g: PolySpec

    def __post_init__(self):
        if self.f.has_reflections or self.g.has_reflections:
            raise SpecError("stack polynomials are defined for translation lattices only")


def reduce_exponents(spec: LatticeSpec, ex: int, ey: int) -> tuple[int, int]:
    """Fold (ex, ey) into canonical range using the lattice relations.

    Periodic: x^l = 1, y^m = 1.  Twisted: x^l = y^twist, y^m = 1, so each
    wrap of x contributes a y^twist factor.
    """
    wraps, ex = divmod(ex, spec.l)
    ey = (ey + wraps * spec.twist) % spec.m
    return ex, ey


def group_mul(spec: LatticeSpec, a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    """Product of translation-group elements x^ax y^ay * x^bx y^by."""
    return reduce_exponents(spec, a[0] + b[0], a[1] + b[1])


def group_inv(spec: LatticeSpec, a: tuple[int, int]) -> tuple[int, int]:
    """Inverse of a translation-group element."""
    ax, ay = a
    if ax == 0:
        return (0, (-ay) % spec.m)
    # x^(l-ax) supplies the wrap, which costs an extra y^twist.
    return (spec.l - ax, (-ay - spec.twist) % spec.m)


def shift_matrix(l: int) -> np.ndarray:
    """l x l cyclic shift: row j has its one in column (j+1) mod l."""
    if l < 1:
        raise SpecError("shift matrix size must be >= 1")
    s = np.zeros((l, l), dtype=np.uint8)
    for j in range(l):
        s[j, (j + 1) % l] = 1
    return s


def reflection_matrix(l: int) -> np.ndarray:
    """Anti-diagonal involution: entry (i, j) = 1 iff i + j = l + 1 (1-based)."""
    return np.eye(l, dtype=np.uint8)[::-1].copy()


def generator_matrices(spec: LatticeSpec) -> dict[str, np.ndarray]:
    """The lm x lm matrices realizing x, y (and p, q for reflections)."""
    l, m = spec.l, spec.m
    y = gf2.kron(gf2.identity(l), shift_matrix(m))
    if spec.twist > 0:
        # Block cyclic structure with a twisted seam: the wrap-around block
        # carries S_m^twist instead of the identity.
        x = np.zeros((l * m, l * m), dtype=np.uint8)
        eye = gf2.identity(m)
        seam = np.linalg.matrix_power(shift_matrix(m).astype(int), spec.twist) % 2
        for i in range(l - 1):
            x[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = eye
        x[(l - 1) * m : l * m, 0:m] = seam.astype(np.uint8)
    else:
        x = gf2.kron(shift_matrix(l), gf2.identity(m))
    out = {"x": x, "y": y}
    if spec.allow_reflection:
        out["p"] = gf2.kron(reflection_matrix(l), gf2.identity(m))
        out["q"] = gf2.kron(gf2.identity(l), reflection_matrix(m))
    return out


class _PowerCache:
    def __init__(self, base: np.ndarray):
        self.base = base
        self.powers = {0: gf2.identity(base.shape[0]), 1: base}

    def __call__(self, e: int) -> np.ndarray:
        if e not in self.powers:
            self.powers[e] = gf2.matmul(self(e - 1), self.base)
        return self.powers[e]


def eval_poly(spec: LatticeSpec, poly: PolySpec) -> np.ndarray:
    """Evaluate a polynomial into its lm x lm matrix.

    Factor order within each term is x-power, p, y-power, q; reflections do
    not commute with translations so the order is load-bearing.
    """
    gens = generator_matrices(spec)
    xp = _PowerCache(gens["x"])
    yp = _PowerCache(gens["y"])
    n = spec.block_size
    acc = np.zeros((n, n), dtype=np.uint8)
    for t in poly.terms:
        if (t.px or t.qy) and not spec.allow_reflection:
            raise SpecError("reflection factor on a translation-only lattice")
        if not (0 <= t.ex < spec.l) or not (0 <= t.ey < spec.m):
            raise SpecError(
                f"exponent out of range for l={spec.l}, m={spec.m}: "
                f"x^{t.ex}y^{t.ey} (normalize the PolySpec first)"
            )
        mat = xp(t.ex)
        if t.px:
            mat = gf2.matmul(mat, gens["p"])
        mat = gf2.matmul(mat, yp(t.ey))
        if t.qy:
            mat = gf2.matmul(mat, gens["q"])
        acc ^= mat
    return acc


def antipode(spec: LatticeSpec, poly: PolySpec) -> PolySpec:
    """Map every variable to its inverse (translation lattices only)."""
    if poly.has_reflections:
        raise SpecError("antipode is undefined for reflection terms")
    terms = []
    for t in poly.terms:
        ex, ey = group_inv(spec, reduce_exponents(spec, t.ex, t.ey))
        terms.append(MonomialTerm(ex, ey))
    return PolySpec(tuple(terms))


def _stack_monomials(spec: LatticeSpec, u: StackPolynomial) -> list[tuple[int, int, int]]:
    """Monomials (ex, ey, ez) of u = f + z*antipode(g), exponents reduced."""
    mono = []
    for t in u.f.normalized(spec).terms:
        mono.append((t.ex, t.ey, 0))
    for t in antipode(spec, u.g.normalized(spec)).terms:
        mono.append((t.ex, t.ey, 1))
    return mono


def quotient_dim(spec: LatticeSpec, u: StackPolynomial) -> int:
    """Dimension of the double-layer group algebra modulo the ideal of u.

    The algebra is spanned by monomials x^a y^b z^c with z^2 = 1, so it has
    dimension 2*l*m; the ideal is the span of all monomial translates of u
    and of its antipode.  Computed as 2lm - rank of the translate matrix.
    """
    if not spec.translation_only:
        raise SpecError("quotient dimension is defined for translation lattices only")
    l, m = spec.l, spec.m
    dim = 2 * l * m

    def index(ex: int, ey: int, ez: int) -> int:
        return (ex * m + ey) * 2 + ez

    u_mono = _stack_monomials(spec, u)
    # antipode of u: z is self-inverse, so ubar = antipode(f) + z*g.
    ubar_mono = [
        (*group_inv(spec, (ex, ey)), ez) for (ex, ey, ez) in u_mono
    ]

    rows = []
    for mono in (u_mono, ubar_mono):
        if not mono:
            continue
        for a in range(l):
            for b in range(m):
                for c in (0, 1):
                    row = np.zeros(dim, dtype=np.uint8)
                    for ex, ey, ez in mono:
                        px, py = group_mul(spec, (a, b), (ex, ey))
                        row[index(px, py, (c + ez) % 2)] ^= 1
                    rows.append(row)
    if not rows:
        return dim
    return dim - gf2.rank(np.array(rows, dtype=np.uint8))
