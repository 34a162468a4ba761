"""Randomized/exhaustive search for good stacked codes ranked by kd^2/n.

Candidates are weight-2w polynomial pairs over a family's lattice range.
Evaluation is two-stage: k from a rank computation first (cheap), then a
distance bound only for candidates that could still improve the frontier.
The figure of merit kd^2/n is kept as an exact Fraction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator

import numpy as np

from .codes import (
    CodeSpec,
    CommutatorViolation,
    build_code,
    classify_parity,
)
from .distance import distance_exact, distance_randomized
from .groupalg import LatticeSpec, MonomialTerm, PolySpec, SpecError, group_inv

# Per-lattice candidate spaces at most this large are walked systematically;
# anything bigger is sampled without replacement from a seeded stream.
_EXHAUSTIVE_LIMIT = 150_000


@dataclass(frozen=True)
class SearchSpace:
    """Parameter ranges for one search run.

    An empty range is allowed and yields an empty candidate stream.  When
    pinned is non-empty the ranges are ignored and exactly those specs are
    streamed, which also bypasses the reflection pre-filter so published
    codes that violate the strong commutator conditions can be scored.
    """

    family: str
    l_values: tuple[int, ...] = ()
    m_values: tuple[int, ...] = (1,)
    gamma_values: tuple[int, ...] = (0,)
    terms: int = 2
    parity: str = "any"
    budget: int = 1000
    seed: int = 0
    pinned: tuple[CodeSpec, ...] = ()

    def __post_init__(self):
        if self.terms < 1:
            raise SpecError("terms must be >= 1")
        if self.parity not in ("any", "odd", "even"):
            raise SpecError(f"bad parity filter {self.parity!r}")
        if self.budget < 0:
            raise SpecError("budget must be >= 0")


@dataclass(frozen=True)
class SearchHit:
    """One evaluated candidate with its figure of merit."""

    spec: CodeSpec
    n: int
    k: int
    d_upper: int
    exact: bool
    parity: str
    figure_of_merit: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "figure_of_merit", Fraction(self.k * self.d_upper**2, self.n)
        )


def _lattices(space: SearchSpace) -> Iterator[LatticeSpec]:
    for l in space.l_values:
        for m in space.m_values:
            if space.family == "bicycle" and m != 1:
                continue
            if space.family == "bb" and m == 1:
                continue
            for gamma in space.gamma_values:
                if (space.family == "twisted-bb") != (gamma > 0):
                    continue
                if gamma >= m:
                    continue
                try:
                    yield LatticeSpec(
                        l=l,
                        m=m,
                        twist=gamma,
                        allow_reflection=(space.family == "reflection"),
                    )
                except SpecError:
                    continue


def _monomials(family: str, lattice: LatticeSpec) -> list[MonomialTerm]:
    out = []
    for ex in range(lattice.l):
        for ey in range(lattice.m):
            if family == "reflection":
                for px in (False, True):
                    for qy in (False, True):
                        out.append(MonomialTerm(ex, ey, px, qy))
            else:
                out.append(MonomialTerm(ex, ey))
    return out


def raw_count(space: SearchSpace) -> int:
    """Candidate (A, B) pairs before symmetry reduction."""
    total = 0
    for lattice in _lattices(space):
        per_poly = comb(len(_monomials(space.family, lattice)), space.terms)
        total += per_poly * per_poly
    return total


def _translated_keys(lattice: LatticeSpec, terms) -> tuple:
    """Minimal sorted key tuple over all global translations of the terms."""
    best = None
    for t in terms:
        shift = group_inv(lattice, (t.ex, t.ey))
        moved = []
        for u in terms:
            ex = (u.ex + shift[0]) % lattice.l
            wraps = (u.ex + shift[0]) // lattice.l
            ey = (u.ey + shift[1] + wraps * lattice.twist) % lattice.m
            moved.append((ex, ey))
        key = tuple(sorted(moved))
        if best is None or key < best:
            best = key
    return best


def _inverted(lattice: LatticeSpec, terms):
    return [MonomialTerm(*group_inv(lattice, (t.ex, t.ey))) for t in terms]


def canonical_key(spec: CodeSpec) -> tuple:
    """Equivalence-class key: global translation of each polynomial and the
    simultaneous inversion x -> x^-1, y -> y^-1 map codes to equivalent
    codes, so candidates are deduplicated modulo both.

    Reflection polynomials do not commute with translations; their key is
    just the sorted term tuple.
    """
    lat = spec.lattice
    if spec.family == "reflection":
        key = tuple(sorted(t.key() for t in spec.a.terms + spec.b.terms))
        return (lat.l, lat.m, "r", key)
    variants = []
    for a_terms, b_terms in (
        (spec.a.terms, spec.b.terms),
        (_inverted(lat, spec.a.terms), _inverted(lat, spec.b.terms)),
    ):
        variants.append(
            (_translated_keys(lat, a_terms), _translated_keys(lat, b_terms))
        )
    return (lat.l, lat.m, lat.twist, min(variants))


def _spec_for(space: SearchSpace, lattice: LatticeSpec, a_terms, b_terms):
    try:
        return CodeSpec(
            family=space.family,
            lattice=lattice,
            a=PolySpec(tuple(a_terms)),
            b=PolySpec(tuple(b_terms)),
        )
    except SpecError:
        return None


def _strong_valid(spec: CodeSpec) -> bool:
    """Pre-filter reflection candidates through the base-code commutators."""
    from .codes import validate_base
    from .groupalg import eval_poly

    try:
        validate_base(
            eval_poly(spec.lattice, spec.a), eval_poly(spec.lattice, spec.b)
        )
    except CommutatorViolation:
        return False
    return True


def enumerate_candidates(space: SearchSpace) -> Iterator[CodeSpec]:
    """Deterministic stream of candidate specs, deduplicated by
    canonical_key, at most space.budget items."""
    seen: set = set()
    emitted = 0
    if space.pinned:
        for spec in space.pinned:
            if emitted >= space.budget:
                return
            key = canonical_key(spec)
            if key in seen:
                continue
            seen.add(key)
            emitted += 1
            yield spec
        return
    for lattice in _lattices(space):
        monos = _monomials(space.family, lattice)
        if len(monos) < space.terms:
            continue
        per_poly = comb(len(monos), space.terms)
        if per_poly**2 <= _EXHAUSTIVE_LIMIT:
            pair_stream = (
                (a, b)
                for a in combinations(monos, space.terms)
                for b in combinations(monos, space.terms)
            )
        else:
            pair_stream = _sampled_pairs(space, lattice, monos)
        for a_terms, b_terms in pair_stream:
            if emitted >= space.budget:
                return
            spec = _spec_for(space, lattice, a_terms, b_terms)
            if spec is None:
                continue
            key = canonical_key(spec)
            if key in seen:
                continue
            seen.add(key)
            if space.family == "reflection" and not _strong_valid(spec):
                continue
            emitted += 1
            yield spec


def _sampled_pairs(space: SearchSpace, lattice: LatticeSpec, monos):
    digest = hashlib.sha256(
        f"{space.seed}:search:{lattice.l}:{lattice.m}:{lattice.twist}".encode()
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    # Oversample; duplicates are filtered by the caller's canonical set.
    for _ in range(space.budget * 4):
        a_idx = rng.choice(len(monos), size=space.terms, replace=False)
        b_idx = rng.choice(len(monos), size=space.terms, replace=False)
        yield (
            tuple(monos[i] for i in sorted(a_idx)),
            tuple(monos[i] for i in sorted(b_idx)),
        )


def evaluate(
    spec: CodeSpec, distance_iters: int, seed: int, exact_threshold: int = 26
) -> SearchHit | None:
    """Build and score one candidate; None when k == 0 or the pair does
    not stack into a valid code."""
    try:
        code = build_code(spec)
    except CommutatorViolation:
        return None
    if code.k == 0:
        return None
    if code.rank_h + code.k <= exact_threshold:
        res = distance_exact(code)
    else:
        res = distance_randomized(code, iters=distance_iters, seed=seed)
    return SearchHit(
        spec=spec,
        n=code.n,
        k=code.k,
        d_upper=res.d_upper,
        exact=res.exact,
        parity=classify_parity(code),
    )


def search(
    space: SearchSpace,
    distance_iters: int = 100,
    top: int = 10,
    plausible_d: int = 20,
) -> list[SearchHit]:
    """Evaluate the candidate stream and return the merit frontier.

    k is computed for every candidate; the distance stage is skipped when
    even a distance of plausible_d could not lift the candidate onto the
    current frontier.
    """
    frontier: list[SearchHit] = []
    for spec in enumerate_candidates(space):
        try:
            code = build_code(spec)
        except CommutatorViolation:
            continue
        if code.k == 0:
            continue
        par = classify_parity(code)
        if space.parity != "any" and par != space.parity:
            continue
        if len(frontier) >= top:
            ceiling = Fraction(code.k * plausible_d**2, code.n)
            if ceiling <= frontier[-1].figure_of_merit:
                continue
        if code.rank_h + code.k <= 26:
            res = distance_exact(code)
        else:
            res = distance_randomized(code, iters=distance_iters, seed=space.seed)
        hit = SearchHit(
            spec=spec,
            n=code.n,
            k=code.k,
            d_upper=res.d_upper,
            exact=res.exact,
            parity=par,
        )
        frontier.append(hit)
        frontier.sort(key=lambda h: (-h.figure_of_merit, h.n))
        del frontier[top:]
    return frontier
