"""Deterministic random-stream derivation.

One master seed fans out into any number of independent streams, each
addressed by a (role, index) pair.  Every randomized component owns its
stream exclusively, so results do not depend on scheduling or on how
work is split across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UsageError

# Stream roles.  Keeping them distinct guarantees that e.g. base tree b and
# shadow tree b never share a stream under the same master seed.
ROLE_BASE = 0
ROLE_SHADOW = 1
ROLE_DATA = 2
ROLE_TEST = 3
ROLE_REP = 4
ROLE_FOLD = 5
ROLE_LABEL = 6
ROLE_REBUILD = 7

_MAX_SEED = 2**64


@dataclass(frozen=True)
class RngSpec:
    """A master seed from which all streams are derived.

    Identical (master_seed, role, index) triples yield identical streams
    on every platform; distinct triples yield statistically independent
    streams.
    """

    master_seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.master_seed, (int, np.integer)):
            raise ConfigError("master_seed must be an integer")
        if not 0 <= int(self.master_seed) < _MAX_SEED:
            raise ConfigError(
                f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}"
            )

    def stream(self, index: int, role: int = ROLE_BASE) -> np.random.Generator:
        return derive_stream(self, index, role=role)


def _seed_sequence(spec: RngSpec, key: tuple[int, ...]) -> np.random.SeedSequence:
    for part in key:
        if part < 0:
            raise UsageError(f"stream key parts must be non-negative, got {key}")
    return np.random.SeedSequence(int(spec.master_seed), spawn_key=key)


def derive_stream(spec: RngSpec, index: int, role: int = ROLE_BASE) -> np.random.Generator:
    """Return the generator addressed by (master_seed, role, index).

    Pure function: repeated calls with the same arguments return fresh
    generators that produce identical sequences.
    """
    ss = _seed_sequence(spec, (int(role), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(spec: RngSpec, *key: int) -> int:
    """Derive a 64-bit seed from the master seed and an integer key path."""
    ss = _seed_sequence(spec, tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def child_spec(spec: RngSpec, *key: int) -> RngSpec:
    """Derive an independent sub-spec, e.g. one per replication."""
    return RngSpec(child_seed(spec, *key))
