from __future__ import annotations

import pytest

from bdlab.config import desk_relaxed, desk_strict, make_config
from bdlab.universe import Universe, build_universe


@pytest.fixture(scope="session")
def strict_universe() -> Universe:
    """Shared desk-strict universe.  Read-only: tests that intern build their own."""
    return build_universe(desk_strict())


@pytest.fixture(scope="session")
def relaxed_universe() -> Universe:
    """Shared desk-relaxed universe.  Read-only."""
    return build_universe(desk_relaxed())


def micro_config(k: int = 3, horizon: int = 2, **overrides):
    """A small hand-enumerable config: singleton net, two weights, no cap."""
    kwargs = dict(
        k=k,
        m_seq=(4, 16),
        n_seq=(16, 18),
        horizon=horizon,
        max_support=1,
        denominator_bound=1,
        level_cap=0,
    )
    kwargs.update(overrides)
    return make_config(**kwargs)


@pytest.fixture()
def micro_universe() -> Universe:
    return build_universe(micro_config())
