"""Shared fixtures: seeded random-position generation and cached lemma runs."""

from __future__ import annotations

import random

import pytest

from multimove.board import Move, Position, TurnConfig, initial_position
from multimove.verifier import verify_lemma

_CONFIG_POOL = [(1, 1), (2, 1), (1, 2), (2, 3), (3, 2), (3, 3), (4, 1), (2, 4)]


def random_playout_positions(count: int, seed: int, max_plies: int = 70,
                             ep_rule: str = "strict"):
    """Reachable positions sampled from random legal playouts (terminal
    positions excluded)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        wi, bj = rng.choice(_CONFIG_POOL)
        pos = initial_position(TurnConfig(wi, bj, ep_rule))
        plies = rng.randint(1, max_plies)
        for _ in range(plies):
            moves = pos.gen_moves()
            if not moves:
                break
            pos.make(rng.choice(moves))
            if pos.winner is not None:
                break
        if pos.winner is None:
            out.append(pos.copy())
    return out


@pytest.fixture(scope="session")
def random_positions_1000():
    return random_playout_positions(1000, seed=20260810)


@pytest.fixture(scope="session")
def random_positions_500():
    return random_playout_positions(500, seed=4242, max_plies=40)


class _CertCache:
    def __init__(self):
        self._certs = {}

    def get(self, lemma: str, ep_rule: str = "strict"):
        key = (lemma, ep_rule)
        if key not in self._certs:
            self._certs[key] = verify_lemma(lemma, ep_rule=ep_rule)
        return self._certs[key]


@pytest.fixture(scope="session")
def lemma_certs():
    """Session-wide cache so the heavy verifications run exactly once."""
    return _CertCache()
