"""Block-sequence laboratory: certificates, calibrated pairs, linked chains.

Everything here is evaluated over a materialized universe, exactly:

* rapid-increase certificates for block sequences (uniform bound, cut
  growth, weight decay), checked exhaustively over the materialized
  elements, with the minimal certifying constant computable;
* calibrated vector/element pairs: a full per-condition report for a
  claimed pair, and a constructor that interns a chain of same-weight
  elements over prescribed rank cuts and returns the weighted sum with
  its element, asserting the shifted-orbit vanishing identities with no
  tolerance;
* linked chains of odd-weight elements built from supplied pairs, where
  each step's required weight index is dictated by the numbering of the
  previous chain element;
* the inequality-type diagnostics: each left-hand side is evaluated over
  every materialized element (and every subinterval where the statement
  quantifies over intervals) and compared against the configured bound,
  reporting exact rational margins and witnesses, never rounding.

Constructors report structured failures naming the first clause they
cannot satisfy; nothing is ever silently weakened.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from .algebra import (
    AlgebraError,
    Vector,
    b_as_functional,
    d_coords_of,
    d_vector,
    evaluation_analysis,
    extend_vector,
    pairing,
    project_vector,
    sup_norm,
    vector_range,
)
from .config import STRICT
from .elements import BFunctional, t1_candidate, t2_candidate
from .serialize import format_rational
from .shift import s_apply, s_apply_power
from .universe import InadmissibleElement, InvariantFault, Universe, UniverseError

PASS = "PASS"
FAIL = "FAIL"
WARN = "WARN"
INFO = "INFO"

IDENTITY = "identity"
MAGNITUDE = "magnitude"


class ConstructionFailure(UniverseError):
    """A constructor could not satisfy a clause; the clause is named."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}" if detail else clause)


class SupplierExhausted(ConstructionFailure):
    """A pair supplier cannot produce the requested pair."""


@dataclass(frozen=True)
class ClauseResult:
    """One evaluated condition with its exact numbers.

    ``kind`` separates identity-level conditions (exact equalities that
    must hold on any truncation) from magnitude conditions (inequalities
    whose derivations assume uncapped parameters).
    """

    name: str
    status: str
    kind: str = MAGNITUDE
    lhs: str = ""
    rhs: str = ""
    margin: str = ""
    witness: str = ""

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "status": self.status, "kind": self.kind}
        for key in ("lhs", "rhs", "margin", "witness"):
            value = getattr(self, key)
            if value:
                out[key] = value
        return out


def _identity_clause(name: str, ok: bool, detail: str = "") -> ClauseResult:
    return ClauseResult(
        name=name,
        status=PASS if ok else FAIL,
        kind=IDENTITY,
        witness=detail if not ok else "",
    )


def _bound_clause(
    name: str,
    lhs: Fraction,
    rhs: Fraction,
    witness: str = "",
    vacuous: bool = False,
) -> ClauseResult:
    if vacuous:
        return ClauseResult(name=name, status=PASS, kind=MAGNITUDE, witness="no instances")
    return ClauseResult(
        name=name,
        status=PASS if lhs <= rhs else FAIL,
        kind=MAGNITUDE,
        lhs=format_rational(lhs),
        rhs=format_rational(rhs),
        margin=format_rational(rhs - lhs),
        witness=witness,
    )


def worst_status(clauses: Iterable[ClauseResult]) -> str:
    order = {INFO: 0, PASS: 1, WARN: 2, FAIL: 3}
    worst = INFO
    for clause in clauses:
        if order[clause.status] > order[worst]:
            worst = clause.status
    return worst


# -- block sequences ---------------------------------------------------------


@dataclass(frozen=True)
class BlockSequence:
    """Vectors with their rank ranges; zero vectors are tolerated (range None)."""

    vectors: tuple[Vector, ...]
    ranges: tuple[Optional[tuple[int, int]], ...]

    @property
    def is_block(self) -> bool:
        prev_max: Optional[int] = None
        for rng in self.ranges:
            if rng is None:
                continue
            if prev_max is not None and rng[0] <= prev_max:
                return False
            prev_max = rng[1]
        return True

    @property
    def is_skipped(self) -> bool:
        """Block with at least one untouched rank between consecutive ranges."""
        prev_max: Optional[int] = None
        for rng in self.ranges:
            if rng is None:
                continue
            if prev_max is not None and rng[0] < prev_max + 2:
                return False
            prev_max = rng[1]
        return True

    def __len__(self) -> int:
        return len(self.vectors)


def block_sequence(universe: Universe, vectors: Sequence[Vector]) -> BlockSequence:
    vecs = tuple(vectors)
    return BlockSequence(vecs, tuple(vector_range(universe, x) for x in vecs))


def shifted_sequence(universe: Universe, seq: BlockSequence) -> BlockSequence:
    return block_sequence(universe, [s_apply(universe, x) for x in seq.vectors])


# -- rapid-increase certificates -----------------------------------------------


@dataclass(frozen=True)
class RISCertificate:
    constant: Fraction
    j_seq: tuple[int, ...]
    violations: tuple[str, ...] = ()

    @property
    def certifies(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "constant": format_rational(self.constant),
            "j_seq": list(self.j_seq),
            "violations": list(self.violations),
            "certifies": self.certifies,
        }


def greedy_j_seq(universe: Universe, seq: BlockSequence) -> tuple[int, ...]:
    """The minimal increasing index sequence compatible with the cut-growth rule."""
    out: list[int] = []
    prev = 0
    for rng in seq.ranges:
        j = max(prev + 1, 1)
        out.append(j)
        prev = max(j, rng[1] if rng else 0)
    return tuple(out)


def _weighted_ids(universe: Universe) -> list[tuple[int, int]]:
    """(weight index, id) for every materialized element carrying a weight."""
    out = []
    for gid in universe.ids():
        widx = universe.element(gid).weight_idx
        if widx > 0:
            out.append((widx, gid))
    return out


def validate_ris(
    universe: Universe,
    seq: BlockSequence,
    constant: Fraction | int,
    j_seq: Optional[Sequence[int]] = None,
) -> RISCertificate:
    """Exhaustive rapid-increase check; violations are named, never raised."""
    constant = Fraction(constant)
    js = tuple(j_seq) if j_seq is not None else greedy_j_seq(universe, seq)
    bad: list[str] = []
    if len(js) != len(seq):
        bad.append("index sequence length mismatch")
        return RISCertificate(constant, js, tuple(bad))
    if not seq.is_block:
        bad.append("block structure: ranges out of order")
    if any(js[i] >= js[i + 1] for i in range(len(js) - 1)):
        bad.append("index growth: sequence not strictly increasing")
    for k, (x, rng) in enumerate(zip(seq.vectors, seq.ranges)):
        norm = sup_norm(x)
        if norm > constant:
            bad.append(
                f"(1) uniform bound: vector {k + 1} has norm {format_rational(norm)}"
            )
        if k + 1 < len(js) and rng is not None and js[k + 1] <= rng[1]:
            bad.append(
                f"(2) cut growth: index {js[k + 1]} not beyond range top {rng[1]}"
            )
    weighted = _weighted_ids(universe)
    for k, x in enumerate(seq.vectors):
        jk = js[k]
        for widx, gid in weighted:
            if widx < jk:
                bound = constant * universe.config.weight(widx)
                value = abs(x.at(gid))
                if value > bound:
                    bad.append(
                        f"(3) weight decay: vector {k + 1} at element {gid} "
                        f"(weight index {widx}) has |coordinate| {format_rational(value)} "
                        f"> {format_rational(bound)}"
                    )
    return RISCertificate(constant, js, tuple(bad))


def minimal_ris_constant(
    universe: Universe,
    seq: BlockSequence,
    j_seq: Optional[Sequence[int]] = None,
) -> Fraction:
    """Smallest constant under which the sequence certifies (structure permitting)."""
    js = tuple(j_seq) if j_seq is not None else greedy_j_seq(universe, seq)
    best = Fraction(0)
    for x in seq.vectors:
        best = max(best, sup_norm(x))
    weighted = _weighted_ids(universe)
    for k, x in enumerate(seq.vectors):
        jk = js[k] if k < len(js) else 1
        for widx, gid in weighted:
            if widx < jk:
                best = max(best, abs(x.at(gid)) / universe.config.weight(widx))
    return best


# -- exact pairs -----------------------------------------------------------------


def _orbit_value(universe: Universe, x: Vector, eta: int, power: int) -> Fraction:
    """Coordinate of the power-shifted vector at an element, via the pullback."""
    target = universe.f_iterate(eta, power)
    if target is None:
        return Fraction(0)
    if universe.element(target).rank > x.horizon:
        raise AlgebraError("pair element beyond vector horizon")
    return x.at(target)


@dataclass(frozen=True)
class ExactPairReport:
    constant: Fraction
    j: int
    delta: int
    epsilon: Optional[Fraction]
    clauses: tuple[ClauseResult, ...]

    @property
    def weak(self) -> bool:
        return self.epsilon is not None

    @property
    def identity_ok(self) -> bool:
        return all(c.status == PASS for c in self.clauses if c.kind == IDENTITY)

    @property
    def certifies(self) -> bool:
        return all(c.status in (PASS, INFO) for c in self.clauses)

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "constant": format_rational(self.constant),
            "j": self.j,
            "delta": self.delta,
            "clauses": [c.to_json_dict() for c in self.clauses],
            "certifies": self.certifies,
        }
        if self.epsilon is not None:
            out["epsilon"] = format_rational(self.epsilon)
        return out


def check_exact_pair(
    universe: Universe,
    x: Vector,
    eta: int,
    constant: Fraction | int,
    j: int,
    delta: int = 0,
    epsilon: Optional[Fraction] = None,
) -> ExactPairReport:
    """Evaluate every pair condition exactly over the materialized elements.

    ``epsilon`` switches the orbit-vanishing condition to its weak form
    (orbit values bounded by constant * epsilon instead of exactly zero).
    The windowed tail estimates that follow the definition are evaluated
    report-only and never affect certification.
    """
    C = Fraction(constant)
    if delta not in (0, 1):
        raise AlgebraError("delta must be 0 or 1")
    cfg = universe.config
    k = cfg.k
    clauses: list[ClauseResult] = []

    clauses.append(_bound_clause("(1) norm bound", sup_norm(x), C))

    worst = Fraction(0)
    worst_id = None
    for gid, coeff in d_coords_of(universe, x).items():
        if abs(coeff) > worst:
            worst, worst_id = abs(coeff), gid
    clauses.append(
        _bound_clause(
            "(2) biorthogonal coefficients",
            worst,
            C * cfg.weight(j),
            witness="" if worst_id is None else f"element {worst_id}",
        )
    )

    eta_el = universe.element(eta)
    clauses.append(
        _identity_clause(
            "(3) weight",
            eta_el.weight_idx == j,
            f"element {eta} has weight index {eta_el.weight_idx}, wanted {j}",
        )
    )

    if epsilon is None:
        value = _orbit_value(universe, x, eta, 0)
        clauses.append(
            _identity_clause(
                "(4) value at the element",
                value == delta,
                f"coordinate is {format_rational(value)}, wanted {delta}",
            )
        )
        for power in range(1, k):
            value = _orbit_value(universe, x, eta, power)
            clauses.append(
                _identity_clause(
                    f"(4) shifted orbit vanishes [power {power}]",
                    value == 0,
                    f"coordinate is {format_rational(value)}",
                )
            )
    else:
        eps = Fraction(epsilon)
        start = 0
        if delta == 1:
            value = _orbit_value(universe, x, eta, 0)
            clauses.append(
                _identity_clause(
                    "(4'') value at the element",
                    value == 1,
                    f"coordinate is {format_rational(value)}",
                )
            )
            start = 1
        for power in range(start, k):
            clauses.append(
                _bound_clause(
                    f"(4') weak orbit bound [power {power}]",
                    abs(_orbit_value(universe, x, eta, power)),
                    C * eps,
                )
            )

    lo_worst = (Fraction(0), None)
    hi_worst = (Fraction(0), None)
    for widx, gid in _weighted_ids(universe):
        if widx == j or universe.element(gid).rank > x.horizon:
            continue
        value = abs(x.at(gid))
        if widx < j:
            # compare against C * m_widx^{-1}: track the worst normalized value
            if lo_worst[1] is None or value / cfg.weight(widx) > lo_worst[0]:
                lo_worst = (value / cfg.weight(widx), gid)
        else:
            if hi_worst[1] is None or value > hi_worst[0]:
                hi_worst = (value, gid)
    clauses.append(
        _bound_clause(
            "(5) off-weight coordinates, lower indices",
            lo_worst[0],
            C,
            witness="" if lo_worst[1] is None else f"element {lo_worst[1]}",
            vacuous=lo_worst[1] is None,
        )
    )
    clauses.append(
        _bound_clause(
            "(5) off-weight coordinates, higher indices",
            hi_worst[0],
            C * cfg.weight(j),
            witness="" if hi_worst[1] is None else f"element {hi_worst[1]}",
            vacuous=hi_worst[1] is None,
        )
    )

    clauses.append(_tail_estimate_clause(universe, x, j, C))
    return ExactPairReport(C, j, delta, Fraction(epsilon) if epsilon is not None else None, tuple(clauses))


def _tail_estimate_clause(universe: Universe, x: Vector, j: int, C: Fraction) -> ClauseResult:
    """Report-only: tail projections against six times the pair bounds."""
    cfg = universe.config
    worst_ratio = Fraction(0)
    worst_note = ""
    for s in range(0, x.horizon + 1):
        tail = project_vector(universe, s, x.horizon, x)
        for widx, gid in _weighted_ids(universe):
            if widx == j or universe.element(gid).rank > x.horizon:
                continue
            coeff = cfg.weight(widx) if widx < j else cfg.weight(j)
            bound = 6 * C * coeff
            value = abs(tail.at(gid))
            if bound == 0:
                continue
            ratio = value / bound
            if ratio > worst_ratio:
                worst_ratio = ratio
                worst_note = (
                    f"|tail past {s} at element {gid}| = {format_rational(value)} "
                    f"vs {format_rational(bound)}"
                )
    held = worst_ratio <= 1
    return ClauseResult(
        name="windowed tail estimate (reported)",
        status=INFO,
        kind="info",
        lhs=format_rational(worst_ratio),
        rhs="1",
        witness=(worst_note + ("" if held else " [exceeded]")) or "no instances",
    )


def minimal_pair_constant(
    universe: Universe,
    x: Vector,
    eta: int,
    j: int,
    delta: int = 0,
    epsilon: Optional[Fraction] = None,
) -> Fraction:
    """Smallest constant at which every magnitude condition of the pair holds.

    Identity conditions are ignored here; they either hold or no constant
    can repair them.
    """
    cfg = universe.config
    need = sup_norm(x)
    for coeff in d_coords_of(universe, x).values():
        need = max(need, abs(coeff) / cfg.weight(j))
    if epsilon is not None and Fraction(epsilon) > 0:
        eps = Fraction(epsilon)
        for power in range(0 if delta == 0 else 1, cfg.k):
            need = max(need, abs(_orbit_value(universe, x, eta, power)) / eps)
    for widx, gid in _weighted_ids(universe):
        if widx == j or universe.element(gid).rank > x.horizon:
            continue
        value = abs(x.at(gid))
        coeff = cfg.weight(widx) if widx < j else cfg.weight(j)
        need = max(need, value / coeff)
    return need


# -- pair construction over prescribed cuts ---------------------------------------


@dataclass(frozen=True)
class PairConstruction:
    z: Vector
    eta: int
    chain: tuple[int, ...]
    cuts: tuple[int, ...]
    scale: Fraction
    j: int
    clauses: tuple[ClauseResult, ...]
    report: ExactPairReport
    # d-coordinates of z, so the certificate is replayable without the universe
    z_d_coords: tuple[tuple[int, Fraction], ...] = ()

    @property
    def identity_ok(self) -> bool:
        return all(c.status == PASS for c in self.clauses if c.kind == IDENTITY)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "element": self.eta,
            "chain": list(self.chain),
            "cuts": list(self.cuts),
            "scale": format_rational(self.scale),
            "j": self.j,
            "vector_d_coords": _coords_json(dict(self.z_d_coords)),
            "clauses": [c.to_json_dict() for c in self.clauses],
            "pair_report": self.report.to_json_dict(),
        }


def _coords_json(coords: dict[int, Fraction]) -> dict[str, str]:
    return {str(gid): format_rational(c) for gid, c in sorted(coords.items())}


def build_exact_pair(
    universe: Universe,
    xs: Sequence[Vector],
    cuts: Sequence[int],
    bs: Sequence[BFunctional],
    j: int,
    constant: Optional[Fraction | int] = None,
) -> PairConstruction:
    """Intern the chain over the given rank cuts and return the weighted pair.

    Preconditions are checked before anything is interned: the cuts bracket
    the vector ranges with room for the chain, each carried combination is
    supported strictly inside its window, and each combination annihilates
    its vector together with the vector's whole shifted orbit.  The
    construction then asserts -- exactly, no tolerance -- that the weighted
    sum vanishes at the final element through every shift power.
    """
    a = len(xs)
    if a == 0:
        raise ConstructionFailure("length", "no vectors supplied")
    if len(cuts) != a + 1:
        raise ConstructionFailure("cuts", f"need {a + 1} cuts for {a} vectors")
    if len(bs) != a:
        raise ConstructionFailure("combinations", f"need {a} carried combinations")
    cfg = universe.config
    widx = 2 * j
    if j < 1 or widx > cfg.num_weights:
        raise ConstructionFailure(
            "weight cap", f"weight index {widx} outside configured 1..{cfg.num_weights}"
        )
    if a > cfg.n(widx):
        raise ConstructionFailure(
            "age cap", f"chain length {a} exceeds the cap {cfg.n(widx)}"
        )
    cuts = tuple(int(q) for q in cuts)
    if cuts[0] < 0 or any(cuts[i + 1] < cuts[i] + 2 for i in range(a)):
        raise ConstructionFailure(
            "cuts", "cuts must increase with room for a rank strictly between"
        )
    for idx, (x, b) in enumerate(zip(xs, bs), start=1):
        rng = vector_range(universe, x)
        if rng is not None and not (cuts[idx - 1] < rng[0] and rng[1] < cuts[idx]):
            raise ConstructionFailure(
                "vector ranges",
                f"vector {idx} has range {rng}, not inside ({cuts[idx - 1]}, {cuts[idx]})",
            )
        for gid, _ in b.items():
            rank = universe.element(gid).rank
            if not cuts[idx - 1] < rank <= cuts[idx] - 1:
                raise ConstructionFailure(
                    "window",
                    f"combination {idx} touches rank {rank} outside "
                    f"({cuts[idx - 1]}, {cuts[idx] - 1}]",
                )
    for idx, (x, b) in enumerate(zip(xs, bs), start=1):
        f = b_as_functional(b)
        for power in range(cfg.k):
            value = pairing(universe, f, s_apply_power(universe, x, power))
            if value != 0:
                raise ConstructionFailure(
                    "orthogonality",
                    f"combination {idx} pairs to {format_rational(value)} "
                    f"with shift power {power} of its vector",
                )

    chain: list[int] = []
    for idx in range(1, a + 1):
        if idx == 1:
            cand = t1_candidate(cuts[1], cuts[0], widx, bs[0])
        else:
            cand = t2_candidate(cuts[idx], chain[-1], widx, bs[idx - 1])
        try:
            chain.append(universe.intern(cand))
        except InadmissibleElement as err:
            raise ConstructionFailure(
                "chain admissibility", "; ".join(err.violations)
            ) from err
    eta = chain[-1]

    top = universe.max_rank
    total = Vector({}, top)
    for x in xs:
        total = total.plus(extend_vector(universe, x, top))
    scale = cfg.m(widx) / a
    z = total.scaled(scale)

    clauses: list[ClauseResult] = []
    for power in range(cfg.k):
        value = _orbit_value(universe, z, eta, power)
        if value != 0:
            raise InvariantFault(
                f"weighted sum fails to vanish at shift power {power}: "
                f"{format_rational(value)}"
            )
        clauses.append(
            _identity_clause(f"orbit vanishing [power {power}]", True)
        )
    analysis = evaluation_analysis(universe, eta)
    echo_ok = (
        analysis.p0 == cuts[0]
        and analysis.age == a
        and all(
            step.p == cuts[idx + 1] and step.xi == chain[idx] and step.b == bs[idx]
            for idx, step in enumerate(analysis.steps)
        )
    )
    clauses.append(
        _identity_clause(
            "analysis echo",
            echo_ok,
            "recorded chain data differs from the element's analysis",
        )
    )

    if constant is None:
        constant = 16 * minimal_ris_constant(universe, block_sequence(universe, list(xs)))
    report = check_exact_pair(universe, z, eta, Fraction(constant), widx, delta=0)
    return PairConstruction(
        z=z,
        eta=eta,
        chain=tuple(chain),
        cuts=cuts,
        scale=scale,
        j=widx,
        clauses=tuple(clauses),
        report=report,
        z_d_coords=tuple(sorted(d_coords_of(universe, z).items())),
    )


# -- pair suppliers and dependent chains -------------------------------------------


@dataclass(frozen=True)
class SuppliedPair:
    x: Vector
    eta: int
    constant: Fraction


class DefaultPairSupplier:
    """Interns fresh helper elements above the current top rank.

    The element is an age-1 carrier of the requested weight with an empty
    combination (so its whole shift orbit is undefined), and the vector is
    the biorthogonal vector of a one-rank-higher helper; the pair
    conditions then hold with the orbit values identically zero.  Only
    delta = 0 pairs are supplied.
    """

    def supply(
        self,
        universe: Universe,
        min_p: int,
        weight_index: int,
        delta: int = 0,
        epsilon: Optional[Fraction] = None,
    ) -> SuppliedPair:
        cfg = universe.config
        if delta != 0:
            raise SupplierExhausted(
                "delta", "the default supplier only produces delta = 0 pairs"
            )
        if weight_index > cfg.num_weights:
            raise SupplierExhausted(
                "weight cap",
                f"chain step needs weight index {weight_index} but the config "
                f"has only {cfg.num_weights} weights",
            )
        rank_eta = max(universe.max_rank, min_p, weight_index, 1) + 1
        try:
            eta = universe.intern(
                t1_candidate(rank_eta, 0, weight_index, BFunctional.zero())
            )
            theta = universe.intern(
                t1_candidate(rank_eta + 1, 0, 2, BFunctional.zero())
            )
        except InadmissibleElement as err:
            raise SupplierExhausted(
                "helper admissibility", "; ".join(err.violations)
            ) from err
        x = d_vector(universe, theta)
        constant = minimal_pair_constant(universe, x, eta, weight_index, delta, epsilon)
        return SuppliedPair(x=x, eta=eta, constant=constant)


@dataclass(frozen=True)
class DependentSequenceCertificate:
    j0: int
    delta: int
    weak: bool
    epsilon: Optional[Fraction]
    constant: Fraction
    p_seq: tuple[int, ...]          # p_0 .. p_L
    xi_chain: tuple[int, ...]
    eta_seq: tuple[int, ...]
    weight_indices: tuple[int, ...]  # the 4j weight index used at each step
    vectors: tuple[Vector, ...]
    clauses: tuple[ClauseResult, ...]
    pair_reports: tuple[ExactPairReport, ...]
    # d-coordinates of the vectors, so the certificate is replayable later
    raw_d_coords: tuple[tuple[tuple[int, Fraction], ...], ...] = ()

    @property
    def identity_ok(self) -> bool:
        return all(c.status == PASS for c in self.clauses if c.kind == IDENTITY) and all(
            r.identity_ok for r in self.pair_reports
        )

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "j0": self.j0,
            "delta": self.delta,
            "weak": self.weak,
            "epsilon": None if self.epsilon is None else format_rational(self.epsilon),
            "constant": format_rational(self.constant),
            "p_seq": list(self.p_seq),
            "xi_chain": list(self.xi_chain),
            "eta_seq": list(self.eta_seq),
            "weight_indices": list(self.weight_indices),
            "vectors_d_coords": [_coords_json(dict(d)) for d in self.raw_d_coords],
            "clauses": [c.to_json_dict() for c in self.clauses],
            "pair_reports": [r.to_json_dict() for r in self.pair_reports],
        }


def build_dependent_sequence(
    universe: Universe,
    supplier: Any = None,
    j0: int = 1,
    length: int = 1,
    delta: int = 0,
    weak: bool = False,
    epsilon: Optional[Fraction] = None,
    constant: Optional[Fraction | int] = None,
) -> DependentSequenceCertificate:
    """Build a linked chain of odd-weight elements from supplied pairs.

    The first step picks the smallest admissible weight index of the form
    4*j; every later step is forced: its weight index is four times the
    numbering of the previous chain element.  Chain elements are interned
    and must be admissible; every clause of the chain definition is
    recorded in the certificate with exact values.
    """
    supplier = supplier or DefaultPairSupplier()
    cfg = universe.config
    odd_widx = 2 * j0 - 1
    if j0 < 1 or odd_widx > cfg.num_weights:
        raise ConstructionFailure(
            "weight cap",
            f"chain weight index {odd_widx} outside configured 1..{cfg.num_weights}",
        )
    if length < 1:
        raise ConstructionFailure("length", "chain length must be positive")
    if length > cfg.n(odd_widx):
        raise ConstructionFailure(
            "age cap", f"length {length} exceeds the cap {cfg.n(odd_widx)}"
        )
    if weak and epsilon is None:
        epsilon = Fraction(1, cfg.n(odd_widx))

    n_bound = Fraction(cfg.n(odd_widx)) ** 2
    j1 = None
    for j in range(1, cfg.num_weights // 4 + 1):
        if cfg.regime == STRICT and not cfg.m(4 * j) > n_bound:
            continue
        j1 = j
        break
    if j1 is None:
        raise SupplierExhausted(
            "odd-weight magnitude" if cfg.num_weights >= 4 else "weight cap",
            "no weight index of the form 4j is admissible for the first step",
        )

    p_seq = [0]
    xi_chain: list[int] = []
    eta_seq: list[int] = []
    weight_indices: list[int] = []
    vectors: list[Vector] = []
    for i in range(1, length + 1):
        w = 4 * j1 if i == 1 else 4 * universe.sigma(xi_chain[-1])
        if w > cfg.num_weights:
            raise SupplierExhausted(
                "weight cap",
                f"step {i} needs weight index {w} but the config has only "
                f"{cfg.num_weights} weights",
            )
        supplied = supplier.supply(
            universe, min_p=p_seq[-1], weight_index=w, delta=delta, epsilon=epsilon
        )
        eta_el = universe.element(supplied.eta)
        if eta_el.weight_idx != w:
            raise ConstructionFailure(
                "supplied weight",
                f"supplier produced weight index {eta_el.weight_idx}, wanted {w}",
            )
        rng = vector_range(universe, supplied.x)
        if rng is not None and rng[0] <= p_seq[-1]:
            raise ConstructionFailure(
                "vector ranges", f"supplied vector reaches down to rank {rng[0]}"
            )
        top = max(eta_el.rank, rng[1] if rng else 0, p_seq[-1] + 1)
        p_i = top + 1
        if i == 1:
            cand = t1_candidate(p_i, 0, odd_widx, BFunctional.singleton(supplied.eta))
        else:
            cand = t2_candidate(
                p_i, xi_chain[-1], odd_widx, BFunctional.singleton(supplied.eta)
            )
        try:
            xi = universe.intern(cand)
        except InadmissibleElement as err:
            raise ConstructionFailure(
                "chain admissibility", "; ".join(err.violations)
            ) from err
        p_seq.append(p_i)
        xi_chain.append(xi)
        eta_seq.append(supplied.eta)
        weight_indices.append(w)
        vectors.append(supplied.x)

    top = universe.max_rank
    vectors = [extend_vector(universe, x, top) for x in vectors]
    if constant is None:
        constant = max(
            (
                minimal_pair_constant(
                    universe, x, eta, w, delta, epsilon if weak else None
                )
                for x, eta, w in zip(vectors, eta_seq, weight_indices)
            ),
            default=Fraction(1),
        )
    C = Fraction(constant)

    clauses: list[ClauseResult] = []
    clauses.append(
        _identity_clause(
            "cut ordering",
            all(p_seq[i] < p_seq[i + 1] for i in range(length)) and p_seq[0] == 0,
        )
    )
    ranges_ok = True
    for i, x in enumerate(vectors, start=1):
        rng = vector_range(universe, x)
        if rng is not None and not (p_seq[i - 1] < rng[0] and rng[1] < p_seq[i]):
            ranges_ok = False
    clauses.append(_identity_clause("(1) vector ranges", ranges_ok))
    windows_ok = all(
        p_seq[i - 1] < universe.element(eta).rank <= p_seq[i] - 1
        for i, eta in enumerate(eta_seq, start=1)
    )
    clauses.append(_identity_clause("element windows", windows_ok))
    tail = universe.element(xi_chain[-1])
    clauses.append(
        _identity_clause(
            "(2) chain weight",
            tail.weight_idx == odd_widx and tail.rank == p_seq[-1],
        )
    )
    analysis = evaluation_analysis(universe, xi_chain[-1])
    echo_ok = (
        analysis.p0 == 0
        and analysis.age == length
        and all(
            step.p == p_seq[idx + 1]
            and step.xi == xi_chain[idx]
            and step.b == BFunctional.singleton(eta_seq[idx])
            for idx, step in enumerate(analysis.steps)
        )
    )
    clauses.append(_identity_clause("analysis echo", echo_ok))
    linkage_ok = all(
        weight_indices[i] == 4 * universe.sigma(xi_chain[i - 1])
        for i in range(1, length)
    )
    clauses.append(_identity_clause("(4) numbering linkage", linkage_ok))
    decreasing = all(
        weight_indices[i] < weight_indices[i + 1] for i in range(length - 1)
    )
    clauses.append(
        _identity_clause(
            "decreasing element weights",
            decreasing,
            "carried element weights do not strictly decrease",
        )
    )
    worst_m = min((cfg.m(w) for w in weight_indices), default=None)
    if worst_m is None:
        clauses.append(ClauseResult("odd-weight magnitude", PASS, MAGNITUDE, witness="no instances"))
    else:
        magnitude = _bound_clause(
            "odd-weight magnitude",
            n_bound,
            worst_m,  # require n^2 < m(4j): lhs strictly below rhs
        )
        # strict inequality: equality is a violation
        if magnitude.status == PASS and n_bound == worst_m:
            magnitude = ClauseResult(
                name=magnitude.name,
                status=FAIL,
                kind=MAGNITUDE,
                lhs=magnitude.lhs,
                rhs=magnitude.rhs,
                margin="0",
                witness="bound met with equality; strict inequality required",
            )
        clauses.append(magnitude)

    reports = tuple(
        check_exact_pair(
            universe, x, eta, C, w, delta=delta, epsilon=epsilon if weak else None
        )
        for x, eta, w in zip(vectors, eta_seq, weight_indices)
    )
    cert = DependentSequenceCertificate(
        j0=j0,
        delta=delta,
        weak=weak,
        epsilon=Fraction(epsilon) if epsilon is not None else None,
        constant=C,
        p_seq=tuple(p_seq),
        xi_chain=tuple(xi_chain),
        eta_seq=tuple(eta_seq),
        weight_indices=tuple(weight_indices),
        vectors=tuple(vectors),
        clauses=tuple(clauses),
        pair_reports=reports,
        raw_d_coords=tuple(
            tuple(sorted(d_coords_of(universe, x).items())) for x in vectors
        ),
    )
    return cert


# -- lower-bound witness search ----------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    witness: Optional[int]
    lhs: Fraction
    rhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.witness is not None and self.lhs >= self.rhs


def lower_bound_search(
    universe: Universe, xs: Sequence[Vector], j: int
) -> SearchResult:
    """Exhaustively search the materialized elements of the given even weight
    for one where the plain sum of the vectors attains the lower bound
    (half the weight times the summed norms)."""
    cfg = universe.config
    widx = 2 * j
    rhs = cfg.weight(widx) / 2 * sum((sup_norm(x) for x in xs), Fraction(0))
    best: tuple[Fraction, Optional[int]] = (Fraction(0), None)
    for cand_widx, gid in _weighted_ids(universe):
        if cand_widx != widx:
            continue
        if any(universe.element(gid).rank > x.horizon for x in xs):
            continue
        value = sum((x.at(gid) for x in xs), Fraction(0))
        if best[1] is None or value > best[0]:
            best = (value, gid)
    return SearchResult(witness=best[1], lhs=best[0], rhs=rhs)


# -- shifted pairs ------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftedPairOutcome:
    found: bool
    gamma: Optional[int]
    eta: Optional[int]
    shifted: Optional[Vector]
    delta_bound: Fraction
    clauses: tuple[ClauseResult, ...]
    report: Optional[ExactPairReport]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "found": self.found,
            "gamma": self.gamma,
            "eta": self.eta,
            "delta_bound": format_rational(self.delta_bound),
            "clauses": [c.to_json_dict() for c in self.clauses],
            "pair_report": None if self.report is None else self.report.to_json_dict(),
        }


def build_shifted_exact_pair(
    universe: Universe,
    xs: Sequence[Vector],
    j: int,
    hypothesis_power: int,
    constant: Optional[Fraction | int] = None,
    epsilon: Optional[Fraction] = None,
) -> ShiftedPairOutcome:
    """Locate a witness for the shifted-pair construction and evaluate it.

    ``hypothesis_power`` is the m of the hypothesis: the witness element is
    pulled back m-1 steps.  With m = k the resulting pair is checked in its
    special form; for 2 <= m < k the weak form applies and the decay of the
    m-th shifted orbit is evaluated as a hypothesis clause.  Hypotheses are
    evaluated and reported, never assumed.
    """
    cfg = universe.config
    k = cfg.k
    m = hypothesis_power
    if not 2 <= m <= k:
        raise ConstructionFailure("hypothesis", f"power {m} outside 2..{k}")
    a = len(xs)
    if a == 0:
        raise ConstructionFailure("length", "no vectors supplied")
    seq = block_sequence(universe, xs)
    C = Fraction(constant) if constant is not None else minimal_ris_constant(universe, seq)

    clauses: list[ClauseResult] = []
    clauses.append(_identity_clause("skipped-block structure", seq.is_skipped))
    second_min = seq.ranges[1][0] if a >= 2 and seq.ranges[1] else None
    clauses.append(
        _identity_clause(
            "weight below second range",
            second_min is None or 2 * j < second_min,
            f"2j = {2 * j} not below {second_min}",
        )
    )
    shifted_once = [s_apply_power(universe, x, m - 1) for x in xs]
    delta_bound = min((sup_norm(sx) for sx in shifted_once), default=Fraction(0))
    clauses.append(
        ClauseResult(
            name=f"orbit norms at power {m - 1}",
            status=PASS if delta_bound > 0 else FAIL,
            kind=MAGNITUDE,
            lhs=format_rational(delta_bound),
            rhs="0",
            witness="uniform lower bound over the sequence",
        )
    )
    if m < k:
        if epsilon is None:
            raise ConstructionFailure(
                "hypothesis", "epsilon is required for powers below the nilpotency degree"
            )
        eps = Fraction(epsilon)
        decay = max(
            (sup_norm(s_apply_power(universe, x, m)) for x in xs), default=Fraction(0)
        )
        clauses.append(
            _bound_clause(
                f"orbit decay at power {m}", decay, C * cfg.weight(2 * j) * eps
            )
        )
    else:
        eps = None

    search = lower_bound_search(universe, shifted_once, j)
    scale = cfg.m(2 * j) / a
    if search.witness is None:
        return ShiftedPairOutcome(
            found=False,
            gamma=None,
            eta=None,
            shifted=None,
            delta_bound=delta_bound,
            clauses=tuple(clauses),
            report=None,
        )
    gamma = search.witness
    value_at_gamma = search.lhs * scale
    clauses.append(
        _bound_clause(
            "witness value",
            delta_bound / 2,
            value_at_gamma,
            witness=f"element {gamma}",
        )
    )
    eta = universe.f_iterate(gamma, m - 1)
    clauses.append(
        _identity_clause(
            "pulled-back element defined",
            eta is not None,
            f"element {gamma} dies before {m - 1} steps",
        )
    )
    if eta is None:
        return ShiftedPairOutcome(
            found=False,
            gamma=gamma,
            eta=None,
            shifted=None,
            delta_bound=delta_bound,
            clauses=tuple(clauses),
            report=None,
        )
    total = Vector({}, xs[0].horizon)
    for x in xs:
        total = total.plus(x)
    sx = s_apply(universe, total.scaled(scale))
    report = check_exact_pair(
        universe, sx, eta, 16 * C, 2 * j, delta=0, epsilon=eps
    )
    return ShiftedPairOutcome(
        found=True,
        gamma=gamma,
        eta=eta,
        shifted=sx,
        delta_bound=delta_bound,
        clauses=tuple(clauses),
        report=report,
    )


# -- inequality diagnostics ----------------------------------------------------------


@dataclass(frozen=True)
class EstimateReport:
    name: str
    clauses: tuple[ClauseResult, ...]
    notes: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return worst_status(self.clauses)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "clauses": [c.to_json_dict() for c in self.clauses],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class RISInstance:
    """A block sequence packaged with its certificate data for diagnostics."""

    vectors: tuple[Vector, ...]
    constant: Fraction
    j0: int


def _capping_notes(universe: Universe, a: int, idx: int) -> tuple[str, ...]:
    expected = universe.config.n(idx)
    if a != expected:
        return (
            f"length {a} substitutes for the configured {expected}; "
            "inequality-type conclusions lose their derivation at capped length",
        )
    return ()


def estimate_ris_averages(
    universe: Universe, xs: Sequence[Vector], constant: Fraction | int, j0: int
) -> EstimateReport:
    """Average-coordinate bounds for rapid-increase sequences, by weight case."""
    C = Fraction(constant)
    cfg = universe.config
    a = len(xs)
    avg_coeff = Fraction(1, a)
    low = (Fraction(0), Fraction(1), None)   # lhs, rhs, witness for h < j0
    high = (Fraction(0), Fraction(1), None)  # for h >= j0
    very_high = (Fraction(0), Fraction(1), None)  # for h > j0
    for widx, gid in _weighted_ids(universe):
        if any(universe.element(gid).rank > x.horizon for x in xs):
            continue
        value = abs(sum((x.at(gid) for x in xs), Fraction(0))) * avg_coeff
        if widx < j0:
            rhs = 16 * C * cfg.weight(j0) * cfg.weight(widx)
            if low[2] is None or value - rhs > low[0] - low[1]:
                low = (value, rhs, gid)
        else:
            rhs = 4 * C / cfg.n(j0) + 6 * C * cfg.weight(widx)
            if high[2] is None or value - rhs > high[0] - high[1]:
                high = (value, rhs, gid)
            if widx > j0:
                rhs2 = 10 * C * cfg.weight(j0) ** 2
                if very_high[2] is None or value - rhs2 > very_high[0] - very_high[1]:
                    very_high = (value, rhs2, gid)
    clauses = [
        _bound_clause(
            "weights below the sequence index",
            low[0],
            low[1],
            witness="" if low[2] is None else f"element {low[2]}",
            vacuous=low[2] is None,
        ),
        _bound_clause(
            "weights at or above the sequence index",
            high[0],
            high[1],
            witness="" if high[2] is None else f"element {high[2]}",
            vacuous=high[2] is None,
        ),
        _bound_clause(
            "weights strictly above the sequence index",
            very_high[0],
            very_high[1],
            witness="" if very_high[2] is None else f"element {very_high[2]}",
            vacuous=very_high[2] is None,
        ),
    ]
    total = Vector({}, min(x.horizon for x in xs))
    for x in xs:
        total = total.plus(x)
    clauses.append(
        _bound_clause(
            "average norm",
            sup_norm(total.scaled(avg_coeff)),
            10 * C * cfg.weight(j0),
        )
    )
    return EstimateReport(
        name="ris-averages",
        clauses=tuple(clauses),
        notes=_capping_notes(universe, a, j0),
    )


def estimate_ris_weighted_averages(
    universe: Universe,
    xs: Sequence[Vector],
    lambdas: Sequence[Fraction | int],
    constant: Fraction | int,
    j0: int,
) -> EstimateReport:
    """Weighted-average norm bound, with its interval hypothesis evaluated."""
    C = Fraction(constant)
    cfg = universe.config
    a = len(xs)
    lams = [Fraction(c) for c in lambdas]
    if len(lams) != a:
        raise ConstructionFailure("scalars", "one scalar per vector required")
    hyp_worst = (Fraction(0), Fraction(1), "")
    for widx, gid in _weighted_ids(universe):
        if widx != j0 or any(universe.element(gid).rank > x.horizon for x in xs):
            continue
        values = [lam * x.at(gid) for lam, x in zip(lams, xs)]
        prefix = [Fraction(0)]
        for v in values:
            prefix.append(prefix[-1] + v)
        for lo in range(a):
            for hi in range(lo + 1, a + 1):
                lhs = abs(prefix[hi] - prefix[lo])
                cap = max(abs(l) for l in lams[lo:hi])
                rhs = C * cap
                if not hyp_worst[2] or lhs - rhs > hyp_worst[0] - hyp_worst[1]:
                    hyp_worst = (lhs, rhs, f"element {gid}, interval [{lo + 1}, {hi}]")
    hyp = ClauseResult(
        name="interval hypothesis (evaluated)",
        status=INFO,
        kind="info",
        lhs=format_rational(hyp_worst[0]),
        rhs=format_rational(hyp_worst[1]),
        margin=format_rational(hyp_worst[1] - hyp_worst[0]),
        witness=hyp_worst[2] or "no instances",
    )
    total = Vector({}, min(x.horizon for x in xs))
    for lam, x in zip(lams, xs):
        total = total.plus(x.scaled(lam))
    conclusion = _bound_clause(
        "weighted average norm",
        sup_norm(total.scaled(Fraction(1, a))),
        10 * C * cfg.weight(j0) ** 2,
    )
    return EstimateReport(
        name="ris-weighted-averages",
        clauses=(hyp, conclusion),
        notes=_capping_notes(universe, a, j0),
    )


def _interval_extremes(values: list[Fraction], signs: bool = False) -> Fraction:
    """Max over subintervals of |sum|, via prefix extremes (exact)."""
    prefix = Fraction(0)
    lo = hi = Fraction(0)
    sign = 1
    for v in values:
        prefix += (sign * v) if signs else v
        if signs:
            sign = -sign
        lo = min(lo, prefix)
        hi = max(hi, prefix)
    return hi - lo


def estimate_interval_sums(
    universe: Universe, xs: Sequence[Vector], constant: Fraction | int, j0: int
) -> EstimateReport:
    """Interval sums of a linked chain's vectors at the chain weight (7C)."""
    C = Fraction(constant)
    widx = 2 * j0 - 1
    worst = (Fraction(0), None)
    for cand_widx, gid in _weighted_ids(universe):
        if cand_widx != widx:
            continue
        if any(universe.element(gid).rank > x.horizon for x in xs):
            continue
        spread = _interval_extremes([x.at(gid) for x in xs])
        if worst[1] is None or spread > worst[0]:
            worst = (spread, gid)
    clause = _bound_clause(
        "interval sums at the chain weight",
        worst[0],
        7 * C,
        witness="" if worst[1] is None else f"element {worst[1]}",
        vacuous=worst[1] is None,
    )
    return EstimateReport(name="interval-sums", clauses=(clause,))


def estimate_dependent_average(
    universe: Universe, xs: Sequence[Vector], constant: Fraction | int, j0: int
) -> EstimateReport:
    """Norm of the chain average against 70C times the squared chain weight."""
    C = Fraction(constant)
    cfg = universe.config
    a = len(xs)
    total = Vector({}, min(x.horizon for x in xs))
    for x in xs:
        total = total.plus(x)
    clause = _bound_clause(
        "chain average norm",
        sup_norm(total.scaled(Fraction(1, a))),
        70 * C * cfg.weight(2 * j0 - 1) ** 2,
    )
    return EstimateReport(
        name="dependent-average",
        clauses=(clause,),
        notes=_capping_notes(universe, a, 2 * j0 - 1),
    )


def estimate_alternating_sums(
    universe: Universe, xs: Sequence[Vector], constant: Fraction | int, j0: int
) -> EstimateReport:
    """Alternating interval sums (7C) plus the paired norm displays."""
    C = Fraction(constant)
    cfg = universe.config
    widx = 2 * j0 - 1
    a = len(xs)
    worst = (Fraction(0), None)
    for cand_widx, gid in _weighted_ids(universe):
        if cand_widx != widx:
            continue
        if any(universe.element(gid).rank > x.horizon for x in xs):
            continue
        spread = _interval_extremes([x.at(gid) for x in xs], signs=True)
        if worst[1] is None or spread > worst[0]:
            worst = (spread, gid)
    clauses = [
        _bound_clause(
            "alternating interval sums at the chain weight",
            worst[0],
            7 * C,
            witness="" if worst[1] is None else f"element {worst[1]}",
            vacuous=worst[1] is None,
        )
    ]
    plain = Vector({}, min(x.horizon for x in xs))
    alt = Vector({}, plain.horizon)
    for i, x in enumerate(xs, start=1):
        plain = plain.plus(x)
        alt = alt.plus(x.scaled(-1 if i % 2 else 1))
    clauses.append(
        _bound_clause(
            "average norm lower display",
            cfg.weight(widx),
            sup_norm(plain.scaled(Fraction(1, a))),
        )
    )
    clauses.append(
        _bound_clause(
            "alternating average norm",
            sup_norm(alt.scaled(Fraction(1, a))),
            70 * C * cfg.weight(widx) ** 2,
        )
    )
    return EstimateReport(
        name="alternating-sums",
        clauses=tuple(clauses),
        notes=_capping_notes(universe, a, widx),
    )


def estimate_lower_bound(
    universe: Universe, xs: Sequence[Vector], j: int
) -> EstimateReport:
    """Witness search for the skipped-block lower norm estimate."""
    seq = block_sequence(universe, xs)
    cfg = universe.config
    clauses: list[ClauseResult] = [
        _identity_clause("skipped-block structure", seq.is_skipped),
        _identity_clause(
            "length within cap",
            len(xs) <= cfg.n(2 * j),
            f"length {len(xs)} exceeds {cfg.n(2 * j)}",
        ),
    ]
    if len(xs) >= 2 and seq.ranges[1] is not None:
        clauses.append(
            _identity_clause(
                "weight below second range",
                2 * j < seq.ranges[1][0],
                f"2j = {2 * j} not below {seq.ranges[1][0]}",
            )
        )
    search = lower_bound_search(universe, xs, j)
    if search.witness is None:
        clauses.append(
            ClauseResult(
                name="witness search",
                status=FAIL,
                kind=MAGNITUDE,
                rhs=format_rational(search.rhs),
                witness="no materialized element of the required weight",
            )
        )
    else:
        clauses.append(
            ClauseResult(
                name="witness search",
                status=PASS if search.satisfied else FAIL,
                kind=MAGNITUDE,
                lhs=format_rational(search.lhs),
                rhs=format_rational(search.rhs),
                margin=format_rational(search.lhs - search.rhs),
                witness=f"element {search.witness}",
            )
        )
    total = Vector({}, min(x.horizon for x in xs))
    for x in xs:
        total = total.plus(x)
    clauses.append(
        _bound_clause("norm lower display", search.rhs, sup_norm(total))
    )
    return EstimateReport(name="lower-bound-search", clauses=tuple(clauses))


def evaluate_estimates(universe: Universe, subject: Any) -> tuple[EstimateReport, ...]:
    """Dispatch the inequality diagnostics appropriate to the subject."""
    if isinstance(subject, DependentSequenceCertificate):
        xs = subject.vectors
        C = subject.constant
        reports = [
            estimate_interval_sums(universe, xs, C, subject.j0),
            estimate_dependent_average(universe, xs, C, subject.j0),
        ]
        if subject.delta == 1:
            reports.append(estimate_alternating_sums(universe, xs, C, subject.j0))
        return tuple(reports)
    if isinstance(subject, RISInstance):
        return (
            estimate_ris_averages(universe, subject.vectors, subject.constant, subject.j0),
            estimate_lower_bound(universe, subject.vectors, subject.j0),
        )
    raise ConstructionFailure(
        "subject", f"no diagnostics defined for {type(subject).__name__}"
    )
