"""The materialized index set: validation, interning, level enumeration.

A universe is built level by level.  Rank 1 holds the k seed elements; each
higher level is populated either by the canonical enumerator (a capped but
deterministic sweep of the admissible shapes) or by explicit interning, which
the sequence-construction machinery uses to extend a universe upward.

Interning is single-writer and idempotent.  Every successful intern
immediately computes the element's shift image; when the image is a new
element it is interned recursively, so the materialized set is always closed
under the shift map.  Ids are assigned sequentially, and the sigma counter
(sigma = max(counter, rank) + 1) runs in intern order, which the enumerator
keeps canonical.

A capped universe is itself a legitimate finite instance of the construction
(every window, age cap and sigma-set constraint refers to materialized
elements only), which is why the exact identities verified downstream hold
with no tolerance even under aggressive caps.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .config import ConstructionConfig, RELAXED, STRICT
from .elements import (
    BASE,
    BFunctional,
    Candidate,
    GammaElement,
    TYPE1,
    TYPE2,
    base_candidate,
    describe,
    t1_candidate,
    t2_candidate,
)
from .serialize import format_rational, stable_hash


class UniverseError(RuntimeError):
    """Level discipline, horizon, or budget violations."""


class DanglingReference(UniverseError):
    """A candidate refers to an id that was never interned (structural)."""


class InadmissibleElement(UniverseError):
    """Interning was attempted for a candidate that fails validation."""

    def __init__(self, violations: list[str]):
        super().__init__("inadmissible candidate: " + "; ".join(violations))
        self.violations = violations


class InvariantFault(UniverseError):
    """A shift image failed validation; the construction invariant is broken."""


class Universe:
    def __init__(self, config: ConstructionConfig):
        self.config = config
        self.elements: list[GammaElement] = []
        self._key_to_id: dict[tuple, int] = {}
        self._levels: dict[int, list[int]] = {}
        self._sigma: dict[int, int] = {}
        self._sigma_counter = 0
        self._f_image: dict[int, Optional[int]] = {}
        self._f_preimages: dict[int, list[int]] = {}
        self._enumerated_to = 0
        self.interior_interns = 0
        self.notes: list[str] = list(config.notes)
        self._cstar_cache: dict[int, dict[int, Fraction]] = {}

    # -- read API ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, gid: int) -> GammaElement:
        try:
            return self.elements[gid]
        except IndexError:
            raise DanglingReference(f"no element with id {gid}") from None

    def ids(self) -> range:
        return range(len(self.elements))

    @property
    def max_rank(self) -> int:
        return max(self._levels) if self._levels else 0

    def level(self, rank: int) -> tuple[int, ...]:
        return tuple(self._levels.get(rank, ()))

    def level_counts(self) -> dict[int, int]:
        return {rank: len(ids) for rank, ids in sorted(self._levels.items())}

    def ids_in_window(self, lo: int, hi: int) -> list[int]:
        """Ids with lo < rank <= hi, ascending by id."""
        out = [
            gid
            for rank in range(lo + 1, hi + 1)
            for gid in self._levels.get(rank, ())
        ]
        out.sort()
        return out

    def lookup(self, cand: Candidate) -> Optional[int]:
        """Id of an already-interned candidate shape, or None."""
        return self._key_to_id.get(cand.key())

    def sigma(self, gid: int) -> int:
        return self._sigma[gid]

    def f_image_of(self, gid: int) -> Optional[int]:
        return self._f_image[gid]

    def f_preimages_of(self, gid: int) -> tuple[int, ...]:
        return tuple(self._f_preimages.get(gid, ()))

    def f_iterate(self, gid: int, steps: int) -> Optional[int]:
        cur: Optional[int] = gid
        for _ in range(steps):
            if cur is None:
                return None
            cur = self._f_image[cur]
        return cur

    def sigma_set(self, gid: int) -> frozenset[int]:
        """sigma of the element plus sigma of every iterated shift preimage."""
        self.element(gid)
        members = {self._sigma[gid]}
        frontier = [gid]
        for _ in range(self.config.k - 1):
            frontier = [p for g in frontier for p in self._f_preimages.get(g, ())]
            members.update(self._sigma[g] for g in frontier)
        return frozenset(members)

    def weight_of(self, gid: int) -> Optional[Fraction]:
        el = self.element(gid)
        if el.weight_idx == 0:
            return None
        return self.config.weight(el.weight_idx)

    def fingerprint(self) -> str:
        return stable_hash(self.dump_lines())

    # -- validation -----------------------------------------------------------

    def validate_candidate(self, cand: Candidate) -> list[str]:
        """Return the list of violated admissibility clauses (empty = admissible).

        Structural problems (references to ids that do not exist) raise
        DanglingReference instead of being reported as violations.
        """
        cfg = self.config
        if cand.kind == BASE:
            bad: list[str] = []
            if cand.rank != 1:
                bad.append("rank window: base elements have rank 1")
            if not 0 <= cand.index < cfg.k:
                bad.append(f"rank window: base index {cand.index} outside 0..{cfg.k - 1}")
            if not cand.b.is_zero:
                bad.append("net membership: base elements carry no b-functional")
            return bad
        if cand.kind == TYPE1:
            return self._validate_t1(cand)
        if cand.kind == TYPE2:
            return self._validate_t2(cand)
        return [f"rank window: unknown element kind {cand.kind!r}"]

    def _check_weight_idx(self, cand: Candidate, bad: list[str]) -> bool:
        cfg = self.config
        if cand.weight_idx < 1:
            bad.append("weight cap: missing weight index")
            return False
        if cand.weight_idx > cand.rank:
            bad.append(
                f"weight cap: weight index {cand.weight_idx} exceeds rank {cand.rank}"
            )
            return False
        if cand.weight_idx > cfg.num_weights:
            bad.append(
                f"weight cap: weight index {cand.weight_idx} beyond configured sequence"
            )
            return False
        return True

    def _check_b(self, cand: Candidate, lo: int, bad: list[str]) -> None:
        """Window, net-membership and odd-weight form checks for cand.b."""
        cfg = self.config
        hi = cand.rank - 1
        for eta, _ in cand.b.items():
            el = self.element(eta)  # raises DanglingReference
            if not lo < el.rank <= hi:
                bad.append(
                    f"window: support id {eta} (rank {el.rank}) outside ({lo},{hi}]"
                )
        if cand.b.is_zero:
            return
        if cand.weight_idx % 2 == 1:
            # odd weight: b is 0 or a single positive unit functional
            terms = cand.b.terms
            if len(terms) != 1 or terms[0][1] != 1:
                bad.append("odd-weight form: b must be 0 or a unit singleton")
                return
            if cfg.max_support < 1:
                bad.append("net membership: net is empty, singleton unavailable")
            eta = terms[0][0]
            eta_el = self.element(eta)
            if eta_el.weight_idx == 0 or eta_el.weight_idx % 4 != 0:
                bad.append(
                    "odd-weight form: support weight index must be divisible by 4"
                )
                return
            if cfg.regime == STRICT:
                quarter = eta_el.weight_idx // 4
                if not cfg.m(4 * quarter) > cfg.n(cand.weight_idx) ** 2:
                    bad.append(
                        "odd-weight magnitude: m[4i] <= n[weight]^2 "
                        f"(m[{4 * quarter}]={format_rational(cfg.m(4 * quarter))})"
                    )
            if cand.kind == TYPE2:
                quarter = eta_el.weight_idx // 4
                if quarter not in self.sigma_set(cand.xi):
                    bad.append(
                        f"sigma membership: {quarter} not in sigma-set of xi #{cand.xi}"
                    )
        else:
            # even weight: any net combination
            if len(cand.b.terms) > cfg.max_support:
                bad.append(
                    f"net membership: support size {len(cand.b.terms)} exceeds cap {cfg.max_support}"
                )
            for _, coeff in cand.b.items():
                if cfg.denominator_bound % coeff.denominator != 0:
                    bad.append(
                        f"net membership: denominator {coeff.denominator} does not divide {cfg.denominator_bound}"
                    )
                    break
            if cand.b.l1() > 1:
                bad.append("net membership: l1 mass exceeds 1")

    def _validate_t1(self, cand: Candidate) -> list[str]:
        bad: list[str] = []
        if cand.rank < 2:
            bad.append("rank window: age-1 elements need rank at least 2")
            return bad
        if not 0 <= cand.p <= cand.rank - 2:
            bad.append(f"rank window: p={cand.p} outside 0..{cand.rank - 2}")
            return bad
        if not self._check_weight_idx(cand, bad):
            return bad
        self._check_b(cand, cand.p, bad)
        return bad

    def _validate_t2(self, cand: Candidate) -> list[str]:
        bad: list[str] = []
        xi = self.element(cand.xi)  # raises DanglingReference
        if cand.rank < 3:
            bad.append("rank window: age extensions need rank at least 3")
            return bad
        if not 1 <= xi.rank <= cand.rank - 2:
            bad.append(
                f"rank window: xi rank {xi.rank} outside 1..{cand.rank - 2}"
            )
            return bad
        if xi.weight_idx == 0:
            bad.append("weight mismatch: xi carries no weight")
            return bad
        if cand.weight_idx != xi.weight_idx:
            bad.append(
                f"weight mismatch: {cand.weight_idx} != weight index {xi.weight_idx} of xi"
            )
            return bad
        if not self._check_weight_idx(cand, bad):
            return bad
        if xi.age + 1 > self.config.n(cand.weight_idx):
            bad.append(
                f"age cap: age {xi.age + 1} exceeds n[{cand.weight_idx}]"
            )
        self._check_b(cand, xi.rank, bad)
        return bad

    # -- interning -------------------------------------------------------------

    def intern(self, cand: Candidate) -> int:
        """Add an element (idempotent); returns its id.

        New ranks at or above the current maximum extend the universe and
        keep the sigma counter rank-monotone.  Interning strictly below the
        current maximum is permitted for sequence constructions but breaks
        the cross-rank sigma ordering; such interns are counted so reports
        can disclose them.
        """
        key = cand.key()
        found = self._key_to_id.get(key)
        if found is not None:
            return found
        violations = self.validate_candidate(cand)
        if violations:
            raise InadmissibleElement(violations)
        if len(self.elements) >= self.config.max_elements:
            raise UniverseError(
                f"element budget exceeded ({self.config.max_elements})"
            )
        if self._levels and cand.rank < self.max_rank:
            self.interior_interns += 1

        gid = len(self.elements)
        if cand.kind == BASE:
            age = 0
        elif cand.kind == TYPE1:
            age = 1
        else:
            age = self.element(cand.xi).age + 1
        element = GammaElement(
            gid=gid,
            kind=cand.kind,
            rank=cand.rank,
            index=cand.index,
            p=cand.p,
            xi=cand.xi,
            weight_idx=cand.weight_idx,
            b=cand.b,
            age=age,
        )
        self.elements.append(element)
        self._key_to_id[key] = gid
        self._levels.setdefault(cand.rank, []).append(gid)
        self._sigma[gid] = max(self._sigma_counter, cand.rank) + 1
        self._sigma_counter = self._sigma[gid]

        image = shift_image_candidate(self, element)
        if image is None:
            self._f_image[gid] = None
        else:
            img_violations = self.validate_candidate(image)
            if img_violations:
                raise InvariantFault(
                    f"shift image of {describe(element)} is inadmissible: "
                    + "; ".join(img_violations)
                )
            img_id = self.intern(image)  # recursion depth bounded by k
            self._f_image[gid] = img_id
            self._f_preimages.setdefault(img_id, []).append(gid)
        return gid

    # -- enumeration -------------------------------------------------------------

    def enumerate_level(self, rank: int) -> list[int]:
        """Materialize one level of the canonical (capped) enumeration."""
        if rank != self._enumerated_to + 1:
            raise UniverseError(
                f"levels enumerate consecutively; expected {self._enumerated_to + 1}, got {rank}"
            )
        if rank > self.config.horizon:
            raise UniverseError(
                f"horizon exceeded: level {rank} > horizon {self.config.horizon}"
            )
        if self.max_rank >= rank:
            raise UniverseError(f"level {rank} already holds interned elements")

        if rank == 1:
            selected: list[Candidate] = [base_candidate(i) for i in range(self.config.k)]
        else:
            selected = self._select_level_candidates(rank)
        if len(self.elements) + len(selected) > self.config.max_elements:
            raise UniverseError(
                f"element budget exceeded ({self.config.max_elements})"
            )
        before = len(self.elements)
        for cand in sorted(selected, key=lambda c: c.key()):
            assert not self.validate_candidate(cand), "enumerator produced inadmissible candidate"
            self.intern(cand)
        self._enumerated_to = rank
        return list(range(before, len(self.elements)))

    def build(self, horizon: Optional[int] = None) -> "Universe":
        target = self.config.horizon if horizon is None else horizon
        while self._enumerated_to < target:
            self.enumerate_level(self._enumerated_to + 1)
        return self

    def _select_level_candidates(self, rank: int) -> list[Candidate]:
        """Pull candidates from the four shape strata, round-robin under the cap.

        Streams yield in canonical order within each stratum, so the selected
        set is a deterministic function of the config alone.
        """
        cap = self.config.level_cap
        streams = [
            self._stream_t1_even(rank),
            self._stream_t1_odd(rank),
            self._stream_t2_even(rank),
            self._stream_t2_odd(rank),
        ]
        selected: list[Candidate] = []
        live = list(streams)
        while live and (cap == 0 or len(selected) < cap):
            next_round = []
            for stream in live:
                nxt = next(stream, None)
                if nxt is None:
                    continue
                selected.append(nxt)
                next_round.append(stream)
                if cap and len(selected) >= cap:
                    break
            live = next_round
        return selected

    def _even_weights(self, rank: int) -> list[int]:
        top = min(rank, self.config.num_weights)
        return [w for w in range(2, top + 1, 2)]

    def _odd_weights(self, rank: int) -> list[int]:
        top = min(rank, self.config.num_weights)
        return [w for w in range(1, top + 1, 2)]

    def _stream_t1_even(self, rank: int) -> Iterator[Candidate]:
        for p in range(rank - 1):
            pool = self.ids_in_window(p, rank - 1)
            for widx in self._even_weights(rank):
                for b in iter_net(pool, self.config.max_support, self.config.denominator_bound):
                    yield t1_candidate(rank, p, widx, b)

    def _stream_t1_odd(self, rank: int) -> Iterator[Candidate]:
        for p in range(rank - 1):
            pool = self.ids_in_window(p, rank - 1)
            for widx in self._odd_weights(rank):
                yield t1_candidate(rank, p, widx, BFunctional.zero())
                if self.config.max_support < 1:
                    continue
                for eta in self._odd_support_pool(pool, widx):
                    yield t1_candidate(rank, p, widx, BFunctional.singleton(eta))

    def _stream_t2_even(self, rank: int) -> Iterator[Candidate]:
        for xi in self._extension_roots(rank, parity=0):
            el = self.element(xi)
            pool = self.ids_in_window(el.rank, rank - 1)
            for b in iter_net(pool, self.config.max_support, self.config.denominator_bound):
                yield t2_candidate(rank, xi, el.weight_idx, b)

    def _stream_t2_odd(self, rank: int) -> Iterator[Candidate]:
        for xi in self._extension_roots(rank, parity=1):
            el = self.element(xi)
            pool = self.ids_in_window(el.rank, rank - 1)
            yield t2_candidate(rank, xi, el.weight_idx, BFunctional.zero())
            if self.config.max_support < 1:
                continue
            allowed = self.sigma_set(xi)
            for eta in self._odd_support_pool(pool, el.weight_idx):
                if self.element(eta).weight_idx // 4 in allowed:
                    yield t2_candidate(rank, xi, el.weight_idx, BFunctional.singleton(eta))

    def _extension_roots(self, rank: int, parity: int) -> list[int]:
        roots = []
        for p in range(1, rank - 1):
            for xi in self._levels.get(p, ()):
                el = self.elements[xi]
                if el.weight_idx == 0 or el.weight_idx % 2 != parity:
                    continue
                if el.age + 1 > self.config.n(el.weight_idx):
                    continue
                roots.append(xi)
        roots.sort()
        return roots

    def _odd_support_pool(self, pool: Iterable[int], widx: int) -> list[int]:
        """Support choices for odd-weight singletons within a window pool."""
        cfg = self.config
        out = []
        for eta in pool:
            el = self.elements[eta]
            if el.weight_idx == 0 or el.weight_idx % 4 != 0:
                continue
            if cfg.regime == STRICT and not cfg.m(el.weight_idx) > cfg.n(widx) ** 2:
                continue
            out.append(eta)
        return out

    # -- dump --------------------------------------------------------------------

    def dump_lines(self) -> list[str]:
        """Line-oriented deterministic dump, one element per line.

        Format: ``id rank variant weight_idx age p_or_xi b_terms sigma``;
        b terms are ``num/den@id`` joined by commas, ``0`` when empty.
        """
        lines = [
            "# bdlab universe dump v1",
            f"# k={self.config.k} horizon={self.config.horizon} regime={self.config.regime}",
        ]
        for el in self.elements:
            if el.kind == BASE:
                anchor = el.index
            elif el.kind == TYPE1:
                anchor = el.p
            else:
                anchor = el.xi
            if el.b.is_zero:
                b_text = "0"
            else:
                b_text = ",".join(
                    f"{format_rational(c)}@{eta}" for eta, c in el.b.items()
                )
            lines.append(
                f"{el.gid} {el.rank} {el.kind} {el.weight_idx} {el.age} {anchor} {b_text} {self._sigma[el.gid]}"
            )
        return lines


def build_universe(config: ConstructionConfig) -> Universe:
    return Universe(config).build()


# -- net enumeration -------------------------------------------------------------


def iter_net(pool: list[int], max_support: int, denominator_bound: int) -> Iterator[BFunctional]:
    """Nonzero net combinations over a support pool, in canonical key order.

    Coefficients are z / denominator_bound with total |z| mass at most the
    bound; depth-first emission over sorted supports matches the lexicographic
    order of BFunctional keys, letting callers truncate lazily.
    """
    if max_support < 1 or not pool:
        return
    pool = sorted(pool)

    def coeff_choices(budget: int) -> list[Fraction]:
        opts = {
            Fraction(z, denominator_bound)
            for z in range(-budget, budget + 1)
            if z != 0
        }
        return sorted(opts, key=lambda f: (f.numerator, f.denominator))

    def walk(start: int, budget: int, terms: list[tuple[int, Fraction]]) -> Iterator[BFunctional]:
        for pos in range(start, len(pool)):
            for coeff in coeff_choices(budget):
                used = abs(coeff.numerator) * (denominator_bound // coeff.denominator)
                head = terms + [(pool[pos], coeff)]
                yield BFunctional(tuple(head))
                if len(head) < max_support and budget - used >= 1:
                    yield from walk(pos + 1, budget - used, head)

    yield from walk(0, denominator_bound, [])


# -- shift image (the combinatorial half of the shift operator) -------------------


def shift_image_candidate(universe: Universe, element: GammaElement) -> Optional[Candidate]:
    """One step of the shift map on coded elements, or None when it vanishes.

    Base elements step down their index.  For the other shapes the carried
    b-functional is pushed through the map coordinate-wise (coefficients of
    colliding images add); the image element keeps the same rank and weight,
    and its age never increases.
    """
    if element.kind == BASE:
        if element.index == 0:
            return None
        return base_candidate(element.index - 1)

    mapped = _push_b(universe, element.b)
    if element.kind == TYPE1:
        if mapped.is_zero:
            return None
        return t1_candidate(element.rank, element.p, element.weight_idx, mapped)

    xi_image = universe.f_image_of(element.xi)
    if xi_image is None:
        if mapped.is_zero:
            return None
        # age collapses to 1; the window starts where xi's rank was
        return t1_candidate(
            element.rank, universe.element(element.xi).rank, element.weight_idx, mapped
        )
    return t2_candidate(element.rank, xi_image, element.weight_idx, mapped)


def _push_b(universe: Universe, b: BFunctional) -> BFunctional:
    out: dict[int, Fraction] = {}
    for eta, coeff in b.items():
        image = universe.f_image_of(eta)
        if image is None:
            continue
        out[image] = out.get(image, Fraction(0)) + coeff
    return BFunctional.from_dict(out)
