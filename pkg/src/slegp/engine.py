"""Discrete-time simulation of the circuit benchmark.

One tick is one second. Each step moves the world, repairs groups against
reachability, lets owners and attached members transmit, and finally runs
the random mode switches.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, fields
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from slegp.errors import ConfigurationError, ContractViolation
from slegp.metrics import DeliveryLedger, total_deliveries
from slegp.protocol import (
    MEMBER_SEARCHING,
    DeviceState,
    Message,
    MessageId,
    Role,
    attached_to,
    choose_group_owner,
    integrate_message,
    maybe_switch_mode,
    take_send_slot,
)
from slegp.world import WorldState, advance, initial_world, reachability


@dataclass(frozen=True)
class SimConfig:
    """Parameter vector of one run. Defaults are the circuit benchmark's."""

    n: int = 50
    circuit_length: float = 1000.0
    spacing: float = 20.0
    speed: float = 1.0
    messages: int = 1
    min_go: int = 9
    min_gm: int = 7
    switch_prob: float = 0.5
    radio_range: float = 200.0
    bandwidth: int = 1
    total_ticks: int = 1000
    seed: int = 0
    max_members: int = 0
    join_delay: int = 0

    def validate(self) -> "SimConfig":
        def need(ok: bool, what: str) -> None:
            if not ok:
                raise ConfigurationError(f"constraint violated: {what}")

        need(self.n >= 1, f"n >= 1 (got n={self.n})")
        need(self.circuit_length > 0, f"circuit_length > 0 (got {self.circuit_length})")
        need(self.spacing > 0, f"spacing > 0 (got {self.spacing})")
        need(self.speed >= 0, f"speed >= 0 (got {self.speed})")
        need(self.messages >= 1, f"messages >= 1 (got {self.messages})")
        need(self.min_go >= 0, f"min_go >= 0 (got {self.min_go})")
        need(self.min_gm >= 0, f"min_gm >= 0 (got {self.min_gm})")
        need(0.0 <= self.switch_prob <= 1.0, f"0 <= switch_prob <= 1 (got {self.switch_prob})")
        need(self.radio_range > 0, f"range > 0 (got {self.radio_range})")
        need(self.bandwidth >= 1, f"bandwidth >= 1 (got {self.bandwidth})")
        need(self.max_members >= 0, f"max_members >= 0 (got {self.max_members})")
        need(self.join_delay >= 0, f"join_delay >= 0 (got {self.join_delay})")
        need(self.total_ticks >= 0, f"total_ticks >= 0 (got {self.total_ticks})")
        need(0 <= self.seed < 2**64, f"seed is a 64-bit unsigned integer (got {self.seed})")
        need(
            self.n * self.spacing <= self.circuit_length,
            f"n * spacing <= circuit_length ({self.n} * {self.spacing} > {self.circuit_length})",
        )
        return self

    @property
    def device_count(self) -> int:
        return 2 * self.n

    @property
    def possible_deliveries(self) -> int:
        return total_deliveries(self.n, self.messages)

    def as_dict(self) -> dict:
        return asdict(self)


CONFIG_FIELDS = tuple(f.name for f in fields(SimConfig))


class SeriesPoint(NamedTuple):
    tick: int
    delivered: int
    throughput: float


class Transmission(NamedTuple):
    tick: int
    sender: int
    source: str  # PERSONAL or RELAY queue
    message_id: Optional[MessageId]  # None for a forfeited slot
    audience: int


class Simulation:
    """Mutable state of one run; ``step`` advances it by one tick.

    With ``trace=True`` every consumed send slot is appended to
    ``transmissions``.
    """

    def __init__(
        self,
        config: SimConfig,
        world: WorldState,
        devices: Sequence[DeviceState],
        rng: random.Random,
        tick: int = 0,
        ledger: Optional[DeliveryLedger] = None,
        trace: bool = False,
    ) -> None:
        if len(devices) != len(world):
            raise ContractViolation("one device state per world position required")
        if any(d.id != i for i, d in enumerate(devices)):
            raise ContractViolation("device ids must be 0..N-1 in order")
        self.config = config
        self.world = world
        self.devices: List[DeviceState] = list(devices)
        self.rng = rng
        self.tick = tick
        self.ledger = ledger if ledger is not None else DeliveryLedger()
        self.transmissions: Optional[List[Transmission]] = [] if trace else None
        # tick stamp at which each member last attached
        self._attached_at = {}

    @classmethod
    def from_config(cls, config: SimConfig, trace: bool = False) -> "Simulation":
        config.validate()
        world = initial_world(config.n, config.circuit_length, config.spacing, config.speed)
        rng = random.Random(config.seed)
        devices = []
        for device_id in range(config.device_count):
            state = DeviceState(device_id, MEMBER_SEARCHING, rng.randint(0, config.min_gm))
            for k in range(config.messages):
                state.seed_personal(Message(MessageId(device_id, k)))
            devices.append(state)
        return cls(config, world, devices, rng, trace=trace)

    @property
    def finished(self) -> bool:
        return self.tick >= self.config.total_ticks

    @property
    def delivered(self) -> int:
        return len(self.ledger)

    def throughput(self) -> float:
        return len(self.ledger) / self.config.possible_deliveries

    def groups(self) -> dict:
        """Owner id -> ascending list of attached member ids (owners without
        members included)."""
        out = {d.id: [] for d in self.devices if d.mode.is_owner}
        for d in self.devices:
            if d.mode.is_attached:
                out[d.mode.owner].append(d.id)
        return out

    def _deliver(self, message: Message, recipient: int, stamp: int) -> None:
        if integrate_message(self.devices[recipient], message):
            self.ledger.record_delivery(message.id, recipient, stamp)

    def _send(self, sender: DeviceState, audience: int, stamp: int) -> Optional[Message]:
        source, message = take_send_slot(sender)
        if self.transmissions is not None and source is not None:
            mid = message.id if message is not None else None
            self.transmissions.append(Transmission(stamp, sender.id, source, mid, audience))
        return message

    def step(self) -> "Simulation":
        if self.finished:
            raise ContractViolation(
                f"simulation already ran its {self.config.total_ticks} ticks"
            )
        cfg = self.config
        devices = self.devices
        rng = self.rng
        stamp = self.tick + 1

        # (1) motion
        if cfg.speed > 0:
            self.world = advance(self.world, 1.0)
        reach = reachability(self.world, cfg.radio_range)

        # (2) drop members whose owner is gone or out of range
        for dev in devices:
            if dev.mode.is_attached:
                owner = dev.mode.owner
                if not devices[owner].mode.is_owner or not reach[dev.id, owner]:
                    dev.set_mode(MEMBER_SEARCHING)

        # (3) searching members pick among reachable owners
        owner_mask = np.fromiter((d.mode.is_owner for d in devices), bool, len(devices))
        cap = cfg.max_members
        if cap:
            sizes = dict.fromkeys(np.flatnonzero(owner_mask).tolist(), 0)
            for dev in devices:
                if dev.mode.is_attached:
                    sizes[dev.mode.owner] += 1
        for dev in devices:
            if dev.mode.role is Role.MEMBER_SEARCHING:
                candidates = np.flatnonzero(reach[dev.id] & owner_mask).tolist()
                if cap:
                    candidates = [c for c in candidates if sizes[c] < cap]
                if candidates:
                    owner_id = choose_group_owner(candidates, rng.random())
                    dev.set_mode(attached_to(owner_id))
                    self._attached_at[dev.id] = stamp
                    if cap:
                        sizes[owner_id] += 1

        groups = self.groups()
        linked = groups
        if cfg.join_delay:
            ready = stamp - cfg.join_delay
            linked = {
                g: [m for m in members if self._attached_at[m] <= ready]
                for g, members in groups.items()
            }

        # (4) transmissions: owners broadcast to members, members broadcast
        # through their owner to the whole group
        for owner_id, members in linked.items():
            owner = devices[owner_id]
            for _ in range(cfg.bandwidth):
                message = self._send(owner, len(members), stamp)
                if message is not None:
                    for m in members:
                        self._deliver(message, m, stamp)
        senders = sorted(m for members in linked.values() for m in members)
        for member_id in senders:
            dev = devices[member_id]
            owner_id = dev.mode.owner
            for _ in range(cfg.bandwidth):
                message = self._send(dev, len(linked[owner_id]), stamp)
                if message is None:
                    continue
                self._deliver(message, owner_id, stamp)
                for m in linked[owner_id]:
                    if m != member_id:
                        self._deliver(message, m, stamp)

        # (5) random mode switches; a departing owner dissolves its group
        for dev in devices:
            new_mode = maybe_switch_mode(dev, cfg.min_go, cfg.min_gm, cfg.switch_prob, rng.random())
            if new_mode is dev.mode:
                continue
            if dev.mode.is_owner:
                for m in groups[dev.id]:
                    member = devices[m]
                    if member.mode.is_attached and member.mode.owner == dev.id:
                        member.set_mode(MEMBER_SEARCHING)
            dev.set_mode(new_mode)

        # (6) clocks
        for dev in devices:
            dev.ticks_in_mode += 1
        self.tick += 1
        return self


@dataclass
class RunResult:
    config: SimConfig
    ledger: DeliveryLedger
    series: List[SeriesPoint]

    @property
    def final_throughput(self) -> float:
        return self.series[-1].throughput if self.series else 0.0

    def throughput_by_tick(self) -> List[float]:
        """Throughput indexed by tick, starting with 0.0 at tick 0."""
        return [0.0] + [p.throughput for p in self.series]


def run(config: SimConfig, stop_when_complete: bool = False) -> RunResult:
    """Run ``config`` for ``total_ticks`` ticks.

    With ``stop_when_complete`` the loop ends once every delivery happened and
    the remaining series points are filled with the (final) full value.
    """
    sim = Simulation.from_config(config)
    total = config.possible_deliveries
    series: List[SeriesPoint] = []
    while not sim.finished:
        sim.step()
        delivered = len(sim.ledger)
        series.append(SeriesPoint(sim.tick, delivered, delivered / total))
        if stop_when_complete and delivered == total:
            series.extend(
                SeriesPoint(t, total, 1.0) for t in range(sim.tick + 1, config.total_ticks + 1)
            )
            break
    return RunResult(config, sim.ledger, series)
