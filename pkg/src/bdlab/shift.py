"""Operator layer over the partial shift map on coded elements.

The combinatorial step (image of a single element, computed eagerly at
intern time so the universe is always closed under it) lives in the
universe module.  Here we expose everything built on top of it:

* a read-only snapshot of the image/preimage table with its structural
  invariants (rank and weight preserved, age never up, preimages
  consistent),
* the functional-side operator: coordinate pushforward through the map,
  with the same rule in either coordinate basis,
* the space-side operator: coordinate pullback, which on any closed
  materialized universe agrees exactly with summing basis vectors over
  preimages,
* nilpotency of pointwise orbits (every orbit dies within k steps),
* the k x k upper-triangular Toeplitz picture of shift polynomials, and
  the l1 witnesses separating the powers of the shift.

All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    D_BASIS,
    E_BASIS,
    AlgebraError,
    Functional,
    Vector,
    e_star,
    l1_norm,
)
from .elements import BASE, Candidate, t1_candidate
from .universe import Universe, UniverseError


def f_map(universe: Universe, gid: int) -> Optional[int]:
    """Image id of one shift step, or None where the map is undefined."""
    return universe.f_image_of(gid)


@dataclass(frozen=True)
class FMapTable:
    """Immutable snapshot of the shift map restricted to a universe."""

    image: tuple[Optional[int], ...]
    preimages: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_universe(universe: Universe) -> "FMapTable":
        image = tuple(universe.f_image_of(g) for g in universe.ids())
        pre = tuple(universe.f_preimages_of(g) for g in universe.ids())
        return FMapTable(image=image, preimages=pre)

    def check(self, universe: Universe) -> list[str]:
        """Structural violations (empty list = all invariants hold)."""
        bad: list[str] = []
        for gid in universe.ids():
            img = self.image[gid]
            if img is None:
                continue
            src = universe.element(gid)
            dst = universe.element(img)
            if dst.rank != src.rank:
                bad.append(f"rank changed along {gid}->{img}")
            if dst.weight_idx != src.weight_idx:
                bad.append(f"weight changed along {gid}->{img}")
            if dst.age > src.age:
                bad.append(f"age increased along {gid}->{img}")
            if gid not in self.preimages[img]:
                bad.append(f"preimage table misses {gid}->{img}")
        for gid in universe.ids():
            for pre in self.preimages[gid]:
                if self.image[pre] != gid:
                    bad.append(f"stale preimage {pre} recorded under {gid}")
                if universe.element(pre).rank != universe.element(gid).rank:
                    bad.append(f"preimage {pre} of {gid} has a different rank")
        return bad


# -- the operator on functionals ------------------------------------------------


def s_star(universe: Universe, f: Functional) -> Functional:
    """Push coordinates through the shift map (same rule in both bases).

    Unit coordinates map to the unit coordinate of the image element and
    vanish where the map is undefined; colliding images add.  The rule is
    identical on the biorthogonal coordinates, and the two routes agree
    exactly on a materialized universe.
    """
    out: dict[int, Fraction] = {}
    for gid, coeff in f.coords.items():
        img = universe.f_image_of(gid)
        if img is None:
            continue
        out[img] = out.get(img, Fraction(0)) + coeff
    return Functional(f.basis, out)


def s_star_power(universe: Universe, f: Functional, power: int) -> Functional:
    if power < 0:
        raise AlgebraError("negative operator power")
    for _ in range(power):
        f = s_star(universe, f)
    return f


# -- the operator on vectors ----------------------------------------------------


def s_apply(universe: Universe, x: Vector) -> Vector:
    """Space-side shift: the coordinate at gamma reads x at gamma's image.

    This is exactly the transpose of the coordinate pushforward, and on a
    closed materialized universe it sends each basis vector d_delta to the
    sum of d_gamma over the preimages of delta.
    """
    coords: dict[int, Fraction] = {}
    for gid in universe.ids():
        if universe.element(gid).rank > x.horizon:
            continue
        img = universe.f_image_of(gid)
        if img is None:
            continue
        value = x.at(img)
        if value != 0:
            coords[gid] = value
    return Vector(coords, x.horizon)


def s_apply_power(universe: Universe, x: Vector, power: int) -> Vector:
    if power < 0:
        raise AlgebraError("negative operator power")
    for _ in range(power):
        x = s_apply(universe, x)
    return x


def shift_polynomial(
    universe: Universe, lambdas: Sequence[Fraction | int], x: Vector
) -> Vector:
    """Apply sum(lambdas[i] * S^i) to a vector."""
    total = Vector({}, x.horizon)
    cur = x
    for lam in lambdas:
        lam = Fraction(lam)
        if lam != 0:
            total = total.plus(cur.scaled(lam))
        cur = s_apply(universe, cur)
    return total


# -- nilpotency ------------------------------------------------------------------


def nilpotency_index(universe: Universe, gid: int) -> int:
    """Minimal l >= 1 such that the l-th iterate of the map is undefined."""
    steps = 0
    cur: Optional[int] = gid
    while True:
        cur = universe.f_image_of(cur)
        if cur is None:
            return steps + 1
        steps += 1
        if steps > universe.config.k:
            raise UniverseError(f"orbit of {gid} exceeds nilpotency bound k")


def max_nilpotency(universe: Universe) -> int:
    return max(nilpotency_index(universe, g) for g in universe.ids())


def shift_power_family_rank(universe: Universe) -> int:
    """Rank of {S^0, ..., S^(k-1)} as matrices over the truncation.

    The unit-coordinate matrix of the l-th power has a 1 in row gamma,
    column (l-th iterate of gamma) wherever the iterate is defined.  The
    matrices are flattened to sparse vectors and reduced by exact
    elimination; full rank k is the finite shadow of the powers being
    independent modulo compacts.
    """
    k = universe.config.k
    pivots: dict[tuple[int, int], dict[tuple[int, int], Fraction]] = {}
    rank = 0
    for power in range(k):
        entries: dict[tuple[int, int], Fraction] = {}
        for gid in universe.ids():
            img = universe.f_iterate(gid, power)
            if img is not None:
                entries[(gid, img)] = Fraction(1)
        for key, row in pivots.items():
            c = entries.get(key)
            if c:
                for kk, vv in row.items():
                    nv = entries.get(kk, Fraction(0)) - c * vv
                    if nv == 0:
                        entries.pop(kk, None)
                    else:
                        entries[kk] = nv
        if not entries:
            continue
        pivot_key = min(entries)
        pivot_val = entries[pivot_key]
        pivots[pivot_key] = {kk: vv / pivot_val for kk, vv in entries.items()}
        rank += 1
    return rank


# -- Toeplitz representation -----------------------------------------------------


@dataclass(frozen=True)
class ToeplitzMatrix:
    """k x k upper-triangular Toeplitz matrix; lambdas[i] fills diagonal i."""

    lambdas: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.lambdas)

    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        k = self.k
        zero = Fraction(0)
        return tuple(
            tuple(self.lambdas[c - r] if c >= r else zero for c in range(k))
            for r in range(k)
        )

    def multiply(self, other: "ToeplitzMatrix") -> "ToeplitzMatrix":
        """Honest matrix product (then read back off the first row)."""
        if other.k != self.k:
            raise AlgebraError("size mismatch in Toeplitz product")
        a, b = self.rows(), other.rows()
        k = self.k
        prod = [
            [sum((a[r][t] * b[t][c] for t in range(k)), Fraction(0)) for c in range(k)]
            for r in range(k)
        ]
        for r in range(k):
            for c in range(k):
                expected = prod[0][c - r] if c >= r else Fraction(0)
                if prod[r][c] != expected:
                    raise AlgebraError("product left the Toeplitz algebra")
        return ToeplitzMatrix(tuple(prod[0]))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.lambdas)


def toeplitz_repr(lambdas: Sequence[Fraction | int]) -> ToeplitzMatrix:
    return ToeplitzMatrix(tuple(Fraction(c) for c in lambdas))


def jordan_block(k: int) -> ToeplitzMatrix:
    coeffs = [Fraction(0)] * k
    if k >= 2:
        coeffs[1] = Fraction(1)
    return ToeplitzMatrix(tuple(coeffs))


def truncated_poly_product(
    a: Sequence[Fraction | int], b: Sequence[Fraction | int], k: int
) -> tuple[Fraction, ...]:
    """Coefficient convolution chopped at degree k (the nilpotent algebra)."""
    out = [Fraction(0)] * k
    for i, ai in enumerate(a):
        ai = Fraction(ai)
        if ai == 0 or i >= k:
            continue
        for j, bj in enumerate(b):
            if i + j < k:
                out[i + j] += ai * Fraction(bj)
    return tuple(out)


# -- separating witnesses ---------------------------------------------------------


def witness_candidate(universe: Universe, rank: int, j: int) -> Candidate:
    """The j-indexed separating element at a given rank.

    Age-1 shape at the second weight, window starting at zero, carrying the
    unit functional of the j-th rank-one element; under singleton nets these
    are always part of the canonical enumeration.
    """
    if not 0 <= j < universe.config.k:
        raise UniverseError(f"witness family index {j} outside 0..k-1")
    base_gid = universe.level(1)[j]
    from .elements import BFunctional  # local to avoid widening module surface

    return t1_candidate(rank, 0, 2, BFunctional.singleton(base_gid))


def witness_id(universe: Universe, rank: int, j: int) -> int:
    """Id of the witness element, raising if it was never materialized."""
    if rank > universe.max_rank:
        raise UniverseError(f"witness rank {rank} beyond materialized {universe.max_rank}")
    cand = witness_candidate(universe, rank, j)
    gid = universe.lookup(cand)
    if gid is None:
        raise UniverseError(
            f"witness element (rank {rank}, family {j}) not materialized; "
            "use a singleton-net config or a larger level cap"
        )
    return gid


def compact_witness(
    universe: Universe,
    j: int,
    rank_n: int,
    rank_m: int,
    lambdas: Sequence[Fraction | int],
) -> Fraction:
    """l1 mass of (sum of lambda_i times the i-th pushforward power) applied
    to the difference of the two unit functionals of the j-family witnesses
    at distinct ranks.  Equals twice the partial sum of |lambda_i| for i <= j;
    in particular the family at j = 0 reads off 2|lambda_0| exactly.
    """
    if rank_n == rank_m:
        raise UniverseError("witness ranks must differ")
    diff = e_star(witness_id(universe, rank_n, j)).plus(
        e_star(witness_id(universe, rank_m, j)).scaled(-1)
    )
    total = Functional(E_BASIS)
    cur = diff
    for lam in lambdas:
        lam = Fraction(lam)
        if lam != 0:
            total = total.plus(cur.scaled(lam))
        cur = s_star(universe, cur)
    return l1_norm(universe, total)
