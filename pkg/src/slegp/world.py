"""Closed-circuit mobility and radio reachability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from slegp.errors import ConfigurationError, ContractViolation


@dataclass(frozen=True, eq=False)
class WorldState:
    """Arc positions on a loop of length ``circuit_length``.

    Devices ``0..n-1`` move with direction +1 and ``n..2n-1`` with -1.
    Arrays are read-only; ``advance`` returns a new state.
    """

    circuit_length: float
    positions: np.ndarray
    directions: np.ndarray
    speed: float

    def __post_init__(self) -> None:
        if self.positions.shape != self.directions.shape:
            raise ContractViolation("positions and directions must cover the same devices")
        self.positions.setflags(write=False)
        self.directions.setflags(write=False)

    def __len__(self) -> int:
        return len(self.positions)


def initial_world(n: int, L: float = 1000.0, D: float = 20.0, v: float = 1.0) -> WorldState:
    if n < 1:
        raise ConfigurationError(f"n must be >= 1 (got {n})")
    if not L > 0:
        raise ConfigurationError(f"circuit length must be > 0 (got {L})")
    if not D > 0:
        raise ConfigurationError(f"spacing must be > 0 (got {D})")
    if v < 0:
        raise ConfigurationError(f"speed must be >= 0 (got {v})")
    if n * D > L:
        raise ConfigurationError(f"n * spacing must not exceed circuit length ({n} * {D} > {L})")
    k = np.arange(n, dtype=float)
    clockwise = np.mod(k * D, L)
    counter = np.mod(k * D + D / 2.0, L)
    positions = np.concatenate([clockwise, counter])
    directions = np.concatenate([np.ones(n, dtype=np.int8), -np.ones(n, dtype=np.int8)])
    return WorldState(float(L), positions, directions, float(v))


def advance(world: WorldState, dt: float) -> WorldState:
    if not dt > 0:
        raise ContractViolation(f"dt must be > 0 (got {dt})")
    L = world.circuit_length
    moved = np.mod(world.positions + world.directions * (world.speed * dt), L)
    # fmod of a tiny negative can round up to exactly L
    moved[moved >= L] = 0.0
    return WorldState(L, moved, world.directions.copy(), world.speed)


def circuit_distance(a: float, b: float, L: float) -> float:
    d = abs(a - b)
    return min(d, L - d)


def distance_matrix(world: WorldState) -> np.ndarray:
    p = world.positions
    d = np.abs(p[:, None] - p[None, :])
    return np.minimum(d, world.circuit_length - d)


def reachability(world: WorldState, radio_range: float) -> np.ndarray:
    """Boolean adjacency matrix, no self loops."""
    adj = distance_matrix(world) <= radio_range
    np.fill_diagonal(adj, False)
    return adj


def neighbors(world: WorldState, device: int, radio_range: float) -> List[int]:
    if not 0 <= device < len(world):
        raise ContractViolation(f"unknown device {device}")
    p = world.positions
    d = np.abs(p - p[device])
    d = np.minimum(d, world.circuit_length - d)
    mask = d <= radio_range
    mask[device] = False
    return np.flatnonzero(mask).tolist()
