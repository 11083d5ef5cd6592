"""Command-line interface.

Verbs:

* ``enumerate`` -- materialize the coded index set for a configuration and
  print it (text dump or structured JSON);
* ``verify``    -- run the verification suites against a fresh universe;
* ``pair``      -- construct a calibrated pair over helper vectors and print
  its certificate;
* ``depseq``    -- build a linked chain from the default pair supplier and
  print its certificate;
* ``report``    -- everything above in one document.

Exit status: 0 when nothing identity-level failed, 1 when a verification
suite or certificate reports FAIL, 2 for unusable configurations or
unsatisfiable construction requests.  All numeric output is exact rational
text; reports are byte-identical across reruns unless ``--timing`` is given.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Any, Optional

from .algebra import d_vector
from .config import (
    HORIZON_ENV_VAR,
    ConfigError,
    ConstructionConfig,
    desk_relaxed,
    desk_strict,
    load_config_file,
    validate_config,
)
from .elements import BASE, TYPE1, BFunctional, t1_candidate
from .sequences import (
    ConstructionFailure,
    DefaultPairSupplier,
    build_dependent_sequence,
    build_exact_pair,
    check_exact_pair,
    minimal_pair_constant,
)
from .serialize import format_rational, stable_json
from .universe import InvariantFault, Universe, UniverseError, build_universe
from .verify import FAIL, PASS, run_verification

BUNDLED = {"desk-strict": desk_strict, "desk-relaxed": desk_relaxed}


def resolve_config(name_or_path: str) -> ConstructionConfig:
    """A bundled fixture name or a JSON config path, with the env override."""
    factory = BUNDLED.get(name_or_path)
    if factory is None:
        return load_config_file(name_or_path)
    cfg = factory()
    env_horizon = os.environ.get(HORIZON_ENV_VAR)
    if env_horizon is None:
        return cfg
    try:
        horizon = int(env_horizon)
    except ValueError as exc:
        raise ConfigError(f"{HORIZON_ENV_VAR} must be an integer") from exc
    return validate_config(
        ConstructionConfig(
            k=cfg.k,
            m_seq=cfg.m_seq,
            n_seq=cfg.n_seq,
            horizon=horizon,
            max_support=cfg.max_support,
            denominator_bound=cfg.denominator_bound,
            level_cap=cfg.level_cap,
            regime=cfg.regime,
            max_elements=cfg.max_elements,
        )
    )


def _emit(args: argparse.Namespace, payload: dict[str, Any], lines: list[str]) -> None:
    if args.format == "json":
        text = stable_json(payload)
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _element_json(universe: Universe, gid: int) -> dict[str, Any]:
    el = universe.element(gid)
    if el.kind == BASE:
        anchor: dict[str, Any] = {"index": el.index}
    elif el.kind == TYPE1:
        anchor = {"p": el.p}
    else:
        anchor = {"xi": el.xi}
    return {
        "id": gid,
        "rank": el.rank,
        "kind": el.kind,
        **anchor,
        "weight_index": el.weight_idx,
        "age": el.age,
        "b": {str(g): format_rational(c) for g, c in el.b.items()},
        "sigma": universe.sigma(gid),
        "image": universe.f_image_of(gid),
    }


def _clause_lines(clauses: Any) -> list[str]:
    lines = []
    for c in clauses:
        body = c.name
        if c.lhs or c.rhs:
            body += f": {c.lhs or '0'} vs {c.rhs or '0'}"
        if c.margin:
            body += f" (margin {c.margin})"
        if c.witness:
            body += f" -- {c.witness}"
        lines.append(f"  [{c.status}] {body}")
    return lines


# -- verbs ------------------------------------------------------------------------


def cmd_enumerate(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    universe = build_universe(cfg)
    payload = {
        "schema": "bdlab.enumerate/1",
        "config": cfg.to_json_dict(),
        "element_count": len(universe),
        "level_counts": {str(r): c for r, c in universe.level_counts().items()},
        "fingerprint": universe.fingerprint(),
        "elements": [_element_json(universe, g) for g in universe.ids()],
        "notes": list(universe.notes),
    }
    _emit(args, payload, universe.dump_lines())
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    suites = [s.strip() for s in args.suites.split(",")] if args.suites else None
    report = run_verification(cfg, suites=suites, seed=args.seed, timings=args.timing)
    _emit(args, report.to_json_dict(), report.text_lines())
    return 1 if report.has_fail else 0


def _helper_pair_parts(
    universe: Universe, count: int, j: int
) -> tuple[list, tuple[int, ...], list[BFunctional]]:
    """Fresh helper vectors, cuts, and carried combinations above the top rank."""
    base_rank = universe.max_rank
    base0 = universe.level(1)[0]
    xs = []
    bs = []
    cuts = [base_rank + 1]
    for i in range(1, count + 1):
        rank = base_rank + 2 * i
        phi = universe.intern(t1_candidate(rank, 0, 2, BFunctional.zero()))
        theta = universe.intern(
            t1_candidate(rank, 0, 2, BFunctional.singleton(base0))
        )
        xs.append(d_vector(universe, theta))
        bs.append(BFunctional.singleton(phi))
        cuts.append(rank + 1)
    return xs, tuple(cuts), bs


def cmd_pair(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    universe = build_universe(cfg)
    xs, cuts, bs = _helper_pair_parts(universe, args.count, args.j)
    built = build_exact_pair(universe, xs, cuts, bs, args.j)
    minimal = minimal_pair_constant(universe, built.z, built.eta, built.j)
    at_minimal = check_exact_pair(universe, built.z, built.eta, minimal, built.j)
    payload = {
        "schema": "bdlab.pair/1",
        "config": cfg.to_json_dict(),
        "construction": built.to_json_dict(),
        "minimal_constant": format_rational(minimal),
        "certifies_at_minimal": at_minimal.certifies,
        "interned_below_top": universe.interior_interns,
    }
    lines = [
        f"pair element: {built.eta}",
        f"chain: {' '.join(str(g) for g in built.chain)}",
        f"cuts: {' '.join(str(q) for q in built.cuts)}",
        f"scale: {format_rational(built.scale)}",
        "identity clauses:",
        *_clause_lines(built.clauses),
        f"report at constant {format_rational(built.report.constant)}:",
        *_clause_lines(built.report.clauses),
        f"minimal certifying constant: {format_rational(minimal)}",
        f"result: {'PASS' if built.identity_ok else 'FAIL'}",
    ]
    _emit(args, payload, lines)
    return 0 if built.identity_ok else 1


def cmd_depseq(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    universe = build_universe(cfg)
    cert = build_dependent_sequence(
        universe,
        DefaultPairSupplier(),
        j0=args.j0,
        length=args.length,
        weak=args.weak,
    )
    payload = {
        "schema": "bdlab.depseq/1",
        "config": cfg.to_json_dict(),
        "certificate": cert.to_json_dict(),
    }
    lines = [
        f"chain elements: {' '.join(str(g) for g in cert.xi_chain)}",
        f"carried elements: {' '.join(str(g) for g in cert.eta_seq)}",
        f"weight indices: {' '.join(str(w) for w in cert.weight_indices)}",
        f"cuts: {' '.join(str(p) for p in cert.p_seq)}",
        f"constant: {format_rational(cert.constant)}",
        "clauses:",
        *_clause_lines(cert.clauses),
    ]
    for i, report in enumerate(cert.pair_reports, start=1):
        lines.append(f"pair {i} report:")
        lines.extend(_clause_lines(report.clauses))
    lines.append(f"result: {'PASS' if cert.identity_ok else 'FAIL'}")
    _emit(args, payload, lines)
    return 0 if cert.identity_ok else 1


def cmd_report(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    verification = run_verification(cfg, seed=args.seed, timings=args.timing)

    pair_universe = build_universe(cfg)
    pair_json: dict[str, Any]
    pair_ok = True
    try:
        xs, cuts, bs = _helper_pair_parts(pair_universe, 2, 1)
        built = build_exact_pair(pair_universe, xs, cuts, bs, 1)
        pair_ok = built.identity_ok
        pair_json = built.to_json_dict()
    except ConstructionFailure as err:
        pair_json = {"unsatisfiable": err.clause, "detail": err.detail}

    chain_universe = build_universe(cfg)
    chain_json: dict[str, Any]
    chain_ok = True
    try:
        cert = build_dependent_sequence(chain_universe, DefaultPairSupplier(), j0=1, length=1)
        chain_ok = cert.identity_ok
        chain_json = cert.to_json_dict()
    except ConstructionFailure as err:
        chain_json = {"unsatisfiable": err.clause, "detail": err.detail}

    failed = verification.has_fail or not pair_ok or not chain_ok
    payload = {
        "schema": "bdlab.report/1",
        "config": cfg.to_json_dict(),
        "verification": verification.to_json_dict(),
        "pair": pair_json,
        "chain": chain_json,
        "result": FAIL if failed else PASS,
    }
    lines = verification.text_lines()
    lines.append(f"pair construction: {'PASS' if pair_ok else 'FAIL'}")
    lines.append(f"chain construction: {'PASS' if chain_ok else 'FAIL'}")
    lines.append(f"overall: {'FAIL' if failed else 'PASS'}")
    _emit(args, payload, lines)
    return 1 if failed else 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdlab",
        description="exact finite laboratory for coded index sets and their operators",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--config",
            default="desk-strict",
            help="bundled fixture name (desk-strict, desk-relaxed) or JSON path",
        )
        p.add_argument("--out", default=None, help="write output to this file")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument(
            "--timing", action="store_true", help="include wall-clock timings (breaks byte-identical reruns)"
        )

    p_enum = sub.add_parser("enumerate", help="materialize and print the index set")
    common(p_enum)
    p_enum.set_defaults(func=cmd_enumerate)

    p_verify = sub.add_parser("verify", help="run verification suites")
    common(p_verify)
    p_verify.add_argument(
        "--suites",
        default=None,
        help="comma-separated subset of gamma,functional,shift,sequence",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_pair = sub.add_parser("pair", help="construct a calibrated pair certificate")
    common(p_pair)
    p_pair.add_argument("--count", type=int, default=2, help="number of helper vectors")
    p_pair.add_argument("--j", type=int, default=1, help="half the even weight index")
    p_pair.set_defaults(func=cmd_pair)

    p_chain = sub.add_parser("depseq", help="build a linked chain certificate")
    common(p_chain)
    p_chain.add_argument("--j0", type=int, default=1, help="half of (odd weight index + 1)")
    p_chain.add_argument("--length", type=int, default=1, help="chain length")
    p_chain.add_argument("--weak", action="store_true", help="use the weak pair conditions")
    p_chain.set_defaults(func=cmd_depseq)

    p_report = sub.add_parser("report", help="full verification + construction document")
    common(p_report)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ConstructionFailure as err:
        print(f"unsatisfiable request ({err.clause}): {err.detail}", file=sys.stderr)
        return 2
    except InvariantFault as err:
        print(f"identity violation: {err}", file=sys.stderr)
        return 1
    except UniverseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
