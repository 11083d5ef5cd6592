"""Exact sparse linear algebra over the two dual coordinate systems.

Functionals live in one of two bases: the unit coordinates ``e*`` (one per
element) or the biorthogonal coordinates ``d*`` given by
``d*_gamma = e*_gamma - c*_gamma`` where ``c*_gamma`` is the coding
functional determined by the element's shape.  The change of basis is
unitriangular in rank order, so conversions are back-substitutions, never
general solves.  Rank-window projections act as coordinate restrictions in
the ``d*`` basis; a window ``(p, q)`` always means ranks r with p < r <= q.

Vectors are coordinate arrays over the materialized universe up to a stated
horizon.  They are synthesized from prescribed ``d``-coordinates by one
upward sweep (each new coordinate is the pairing of the element's coding
functional with the part already built), which is also how local data on a
rank-window extends to the whole truncation.

Everything is a Fraction; there is no tolerance anywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .elements import BASE, TYPE1, TYPE2, BFunctional, GammaElement
from .universe import Universe

E_BASIS = "e*"
D_BASIS = "d*"

Coords = dict[int, Fraction]


class AlgebraError(ValueError):
    pass


def _clean(coords: Coords) -> Coords:
    return {gid: c for gid, c in coords.items() if c != 0}


@dataclass
class Functional:
    """A finitely supported functional tagged with its coordinate basis."""

    basis: str
    coords: Coords = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.basis not in (E_BASIS, D_BASIS):
            raise AlgebraError(f"unknown basis {self.basis!r}")
        self.coords = _clean(self.coords)

    def support(self) -> list[int]:
        return sorted(self.coords)

    def scaled(self, factor: Fraction | int) -> "Functional":
        factor = Fraction(factor)
        return Functional(self.basis, {g: c * factor for g, c in self.coords.items()})

    def plus(self, other: "Functional") -> "Functional":
        if other.basis != self.basis:
            raise AlgebraError("cannot add functionals in different bases")
        out = dict(self.coords)
        for g, c in other.coords.items():
            out[g] = out.get(g, Fraction(0)) + c
        return Functional(self.basis, out)

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Functional)
            and self.basis == other.basis
            and self.coords == other.coords
        )


@dataclass
class Vector:
    """Coordinates over the materialized elements of rank <= horizon."""

    coords: Coords
    horizon: int

    def __post_init__(self) -> None:
        self.coords = _clean(self.coords)

    def at(self, gid: int) -> Fraction:
        return self.coords.get(gid, Fraction(0))

    def scaled(self, factor: Fraction | int) -> "Vector":
        factor = Fraction(factor)
        return Vector({g: c * factor for g, c in self.coords.items()}, self.horizon)

    def plus(self, other: "Vector") -> "Vector":
        out = dict(self.coords)
        for g, c in other.coords.items():
            out[g] = out.get(g, Fraction(0)) + c
        return Vector(out, min(self.horizon, other.horizon))


def e_star(gid: int) -> Functional:
    return Functional(E_BASIS, {gid: Fraction(1)})


def b_as_functional(b: BFunctional) -> Functional:
    return Functional(E_BASIS, dict(b.items()))


# -- coding functionals and the basis change ---------------------------------


def c_star(universe: Universe, gid: int) -> Functional:
    """The coding functional of an element, in e*-coordinates (cached)."""
    cached = universe._cstar_cache.get(gid)
    if cached is None:
        el = universe.element(gid)
        cached = _compute_cstar(universe, el).coords
        universe._cstar_cache[gid] = cached
    return Functional(E_BASIS, dict(cached))


def _compute_cstar(universe: Universe, el: GammaElement) -> Functional:
    if el.kind == BASE:
        return Functional(E_BASIS)
    beta = universe.config.weight(el.weight_idx)
    if el.kind == TYPE1:
        lo = el.p
        head = Functional(E_BASIS)
    else:
        lo = universe.element(el.xi).rank
        head = e_star(el.xi)
    tail = project_star(universe, lo, None, b_as_functional(el.b)).scaled(beta)
    return head.plus(tail)


def d_star(universe: Universe, gid: int) -> Functional:
    """e*_gid minus the coding functional, in e*-coordinates."""
    return e_star(gid).plus(c_star(universe, gid).scaled(-1))


def to_d_basis(universe: Universe, f: Functional) -> Functional:
    """Back-substitute from the top rank down (unitriangular system)."""
    if f.basis == D_BASIS:
        return Functional(D_BASIS, dict(f.coords))
    work = dict(f.coords)
    out: Coords = {}
    while work:
        top = max(universe.element(g).rank for g in work)
        layer = sorted(g for g in work if universe.element(g).rank == top)
        for gid in layer:
            a = work.pop(gid)
            if a == 0:
                continue
            out[gid] = a
            for h, c in c_star(universe, gid).coords.items():
                work[h] = work.get(h, Fraction(0)) + a * c
    return Functional(D_BASIS, out)


def to_e_basis(universe: Universe, f: Functional) -> Functional:
    if f.basis == E_BASIS:
        return Functional(E_BASIS, dict(f.coords))
    out: Coords = {}
    for gid, a in f.coords.items():
        out[gid] = out.get(gid, Fraction(0)) + a
        for h, c in c_star(universe, gid).coords.items():
            out[h] = out.get(h, Fraction(0)) - a * c
    return Functional(E_BASIS, out)


def change_basis(universe: Universe, f: Functional, basis: str) -> Functional:
    if basis == D_BASIS:
        return to_d_basis(universe, f)
    if basis == E_BASIS:
        return to_e_basis(universe, f)
    raise AlgebraError(f"unknown basis {basis!r}")


def project_star(
    universe: Universe, lo: int, hi: Optional[int], f: Functional
) -> Functional:
    """Restrict to ranks in (lo, hi] in d*-coordinates; hi=None means no top."""
    d = to_d_basis(universe, f)
    kept = {
        g: c
        for g, c in d.coords.items()
        if lo < universe.element(g).rank and (hi is None or universe.element(g).rank <= hi)
    }
    restricted = Functional(D_BASIS, kept)
    if f.basis == E_BASIS:
        return to_e_basis(universe, restricted)
    return restricted


# -- vectors ------------------------------------------------------------------


def _ids_by_rank(universe: Universe, lo: int, hi: int) -> Iterable[int]:
    for rank in range(lo, hi + 1):
        for gid in sorted(universe.level(rank)):
            yield gid


def synthesize(universe: Universe, d_coords: Coords, horizon: Optional[int] = None) -> Vector:
    """Vector with the given d-coordinates, materialized up to horizon.

    One upward sweep: the coordinate at each element is its prescribed
    d-coordinate plus the pairing of its coding functional with the part of
    the vector already built.
    """
    top = universe.max_rank if horizon is None else horizon
    coords: Coords = {}
    for gid in _ids_by_rank(universe, 1, top):
        value = d_coords.get(gid, Fraction(0))
        for h, c in c_star(universe, gid).coords.items():
            if c != 0:
                hv = coords.get(h)
                if hv is not None:
                    value += c * hv
        if value != 0:
            coords[gid] = value
    return Vector(coords, top)


def d_vector(universe: Universe, gid: int, horizon: Optional[int] = None) -> Vector:
    """The biorthogonal basis vector of an element, as a coordinate array."""
    return synthesize(universe, {gid: Fraction(1)}, horizon)


def extend(universe: Universe, data: Coords, q: int, horizon: Optional[int] = None) -> Vector:
    """Extend coordinates prescribed on ranks <= q to the truncation.

    Returns the unique vector supported by biorthogonal vectors of rank <= q
    whose restriction to ranks <= q equals ``data``.
    """
    top = universe.max_rank if horizon is None else horizon
    coords: Coords = {}
    for gid in _ids_by_rank(universe, 1, q):
        v = data.get(gid, Fraction(0))
        if v != 0:
            coords[gid] = v
    for gid in _ids_by_rank(universe, q + 1, top):
        value = Fraction(0)
        for h, c in c_star(universe, gid).coords.items():
            hv = coords.get(h)
            if hv is not None:
                value += c * hv
        if value != 0:
            coords[gid] = value
    return Vector(coords, top)


def extend_vector(universe: Universe, x: Vector, horizon: int) -> Vector:
    """Re-extend a vector upward after the universe grew past its horizon."""
    if horizon <= x.horizon:
        return Vector(dict(x.coords), x.horizon)
    return extend(universe, dict(x.coords), x.horizon, horizon)


def d_coords_of(universe: Universe, x: Vector) -> Coords:
    """Read off d-coordinates: at each element, coordinate minus coding pairing."""
    out: Coords = {}
    for gid in _ids_by_rank(universe, 1, x.horizon):
        value = x.at(gid)
        for h, c in c_star(universe, gid).coords.items():
            hv = x.coords.get(h)
            if hv is not None:
                value -= c * hv
        if value != 0:
            out[gid] = value
    return out


def vector_range(universe: Universe, x: Vector) -> Optional[tuple[int, int]]:
    """Smallest rank interval whose biorthogonal vectors span x (None if x=0)."""
    d = d_coords_of(universe, x)
    if not d:
        return None
    ranks = [universe.element(g).rank for g in d]
    return (min(ranks), max(ranks))


def project_vector(universe: Universe, lo: int, hi: int, x: Vector) -> Vector:
    """Restrict the d-coordinates of x to ranks in (lo, hi] and resynthesize."""
    d = d_coords_of(universe, x)
    kept = {
        g: c for g, c in d.items() if lo < universe.element(g).rank <= hi
    }
    return synthesize(universe, kept, x.horizon)


# -- pairings and norms ---------------------------------------------------------


def pairing(universe: Universe, f: Functional, x: Vector) -> Fraction:
    fe = to_e_basis(universe, f)
    total = Fraction(0)
    for gid, c in fe.coords.items():
        if universe.element(gid).rank > x.horizon:
            raise AlgebraError(
                f"functional support id {gid} lies beyond vector horizon {x.horizon}"
            )
        total += c * x.at(gid)
    return total


def l1_norm(universe: Universe, f: Functional) -> Fraction:
    fe = to_e_basis(universe, f)
    return sum((abs(c) for c in fe.coords.values()), Fraction(0))


def sup_norm(x: Vector) -> Fraction:
    return max((abs(c) for c in x.coords.values()), default=Fraction(0))


def op_norm_l1(
    universe: Universe, column: Callable[[int], Functional], ids: Iterable[int]
) -> Fraction:
    """Exact operator norm on the summable side: max column l1 mass."""
    best = Fraction(0)
    for gid in ids:
        mass = l1_norm(universe, column(gid))
        if mass > best:
            best = mass
    return best


# -- evaluation analysis ---------------------------------------------------------


@dataclass(frozen=True)
class AnalysisStep:
    p: int              # rank of the chain element
    b: BFunctional      # the step's carried combination
    xi: int             # id of the chain element


@dataclass(frozen=True)
class EvaluationAnalysis:
    gid: int
    weight_idx: int
    p0: int
    steps: tuple[AnalysisStep, ...]

    @property
    def age(self) -> int:
        return len(self.steps)

    def cut_points(self) -> list[int]:
        return [self.p0] + [s.p for s in self.steps]


def evaluation_analysis(universe: Universe, gid: int) -> EvaluationAnalysis:
    """Unwind an element's age chain into its step-by-step analysis data."""
    el = universe.element(gid)
    if el.kind == BASE:
        raise AlgebraError("base elements have no evaluation analysis")
    steps: list[AnalysisStep] = []
    cur = el
    while cur.kind == TYPE2:
        steps.append(AnalysisStep(p=cur.rank, b=cur.b, xi=cur.gid))
        cur = universe.element(cur.xi)
    assert cur.kind == TYPE1
    steps.append(AnalysisStep(p=cur.rank, b=cur.b, xi=cur.gid))
    steps.reverse()
    return EvaluationAnalysis(
        gid=gid, weight_idx=el.weight_idx, p0=cur.p, steps=tuple(steps)
    )


def analysis_functional(
    universe: Universe,
    analysis: EvaluationAnalysis,
    windowed: bool,
    start: int = 0,
) -> Functional:
    """Rebuild e*_gamma from analysis data.

    With ``start == t > 0`` the first t steps collapse into e* of the t-th
    chain element (the partial form).  ``windowed`` selects bounded rank
    windows (p_{r-1}, p_r] for the carried combinations instead of
    (p_{r-1}, infinity); the two agree because each step's combination is
    supported strictly below its own cut.
    """
    if not 0 <= start < analysis.age:
        raise AlgebraError(f"partial index {start} outside 0..{analysis.age - 1}")
    beta = universe.config.weight(analysis.weight_idx)
    cuts = analysis.cut_points()
    if start == 0:
        total = Functional(E_BASIS)
    else:
        total = e_star(analysis.steps[start - 1].xi)
    for r in range(start, analysis.age):
        step = analysis.steps[r]
        total = total.plus(d_star(universe, step.xi))
        hi = cuts[r + 1] if windowed else None
        piece = project_star(universe, cuts[r], hi, b_as_functional(step.b))
        total = total.plus(piece.scaled(beta))
    return total
