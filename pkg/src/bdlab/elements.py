"""Coded index-set elements and the finite functional combinations they carry.

Every element of the index set is one of three shapes:

* ``base``   -- the k seed elements of rank 1, indexed 0..k-1;
* ``t1``     -- an age-1 element coding a window start ``p``, a weight index,
                and a finite combination ``b`` of unit functionals supported
                strictly between rank ``p`` and its own rank;
* ``t2``     -- an age-extension of an element ``xi`` of strictly smaller
                rank (gap at least 2), inheriting the weight of ``xi``.

Elements are value objects; identity within a universe is the interned id.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

BASE = "base"
TYPE1 = "t1"
TYPE2 = "t2"

_KIND_TAG = {BASE: 0, TYPE1: 1, TYPE2: 2}


@dataclass(frozen=True)
class BFunctional:
    """A finite rational combination of unit functionals, stored sorted.

    ``terms`` maps interned element ids to nonzero coefficients; it is kept
    as a tuple of (id, coefficient) pairs ordered by id so that equal
    combinations are structurally equal.
    """

    terms: tuple[tuple[int, Fraction], ...] = ()

    @staticmethod
    def zero() -> "BFunctional":
        return BFunctional(())

    @staticmethod
    def singleton(eta: int, coeff: Fraction | int = 1) -> "BFunctional":
        coeff = Fraction(coeff)
        if coeff == 0:
            return BFunctional(())
        return BFunctional(((eta, coeff),))

    @staticmethod
    def from_dict(coords: dict[int, Fraction]) -> "BFunctional":
        terms = tuple(
            (eta, Fraction(c)) for eta, c in sorted(coords.items()) if c != 0
        )
        return BFunctional(terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> tuple[int, ...]:
        return tuple(eta for eta, _ in self.terms)

    def l1(self) -> Fraction:
        return sum((abs(c) for _, c in self.terms), Fraction(0))

    def coeffs(self) -> dict[int, Fraction]:
        return {eta: c for eta, c in self.terms}

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.terms)

    def key(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((eta, c.numerator, c.denominator) for eta, c in self.terms)


@dataclass(frozen=True)
class Candidate:
    """An element shape prior to interning (no id, no age)."""

    kind: str
    rank: int
    index: int = -1        # base only
    p: int = -1            # t1 only: window start, 0 <= p < rank - 1
    xi: int = -1           # t2 only: id of the extended element
    weight_idx: int = 0    # 0 for base, else 1-indexed into the m-sequence
    b: BFunctional = BFunctional()

    def key(self) -> tuple:
        if self.kind == BASE:
            return (self.rank, 0, self.index)
        if self.kind == TYPE1:
            return (self.rank, 1, self.p, self.weight_idx, self.b.key())
        return (self.rank, 2, self.xi, self.weight_idx, self.b.key())


@dataclass(frozen=True)
class GammaElement:
    """An interned element: a Candidate plus id and computed age."""

    gid: int
    kind: str
    rank: int
    index: int = -1
    p: int = -1
    xi: int = -1
    weight_idx: int = 0
    b: BFunctional = BFunctional()
    age: int = 0

    @property
    def is_base(self) -> bool:
        return self.kind == BASE

    @property
    def has_weight(self) -> bool:
        return self.weight_idx > 0

    @property
    def odd_weight(self) -> bool:
        return self.weight_idx % 2 == 1

    @property
    def even_weight(self) -> bool:
        return self.has_weight and self.weight_idx % 2 == 0

    def window_start(self) -> int:
        """Rank below which the element's own b-functional may not reach."""
        if self.kind == TYPE1:
            return self.p
        if self.kind == TYPE2:
            return -1  # resolved by the universe (rank of xi)
        return 0

    def key(self) -> tuple:
        if self.kind == BASE:
            return (self.rank, 0, self.index)
        if self.kind == TYPE1:
            return (self.rank, 1, self.p, self.weight_idx, self.b.key())
        return (self.rank, 2, self.xi, self.weight_idx, self.b.key())


def base_candidate(index: int) -> Candidate:
    return Candidate(kind=BASE, rank=1, index=index)


def t1_candidate(rank: int, p: int, weight_idx: int, b: BFunctional) -> Candidate:
    return Candidate(kind=TYPE1, rank=rank, p=p, weight_idx=weight_idx, b=b)


def t2_candidate(rank: int, xi: int, weight_idx: int, b: BFunctional) -> Candidate:
    return Candidate(kind=TYPE2, rank=rank, xi=xi, weight_idx=weight_idx, b=b)


def candidate_of(element: GammaElement) -> Candidate:
    return Candidate(
        kind=element.kind,
        rank=element.rank,
        index=element.index,
        p=element.p,
        xi=element.xi,
        weight_idx=element.weight_idx,
        b=element.b,
    )


def describe(element: GammaElement) -> str:
    """One-line human description used by reports and error messages."""
    if element.kind == BASE:
        return f"#{element.gid} base[{element.index}] rank 1"
    head = f"#{element.gid} {element.kind} rank {element.rank} w{element.weight_idx}"
    if element.kind == TYPE1:
        head += f" p={element.p}"
    else:
        head += f" xi=#{element.xi} age={element.age}"
    if element.b.is_zero:
        return head + " b=0"
    body = ",".join(f"{c}@{eta}" for eta, c in element.b.items())
    return head + f" b=[{body}]"
