"""Per-device protocol state machine.

Devices alternate between group owner and group member roles. Nothing in
here knows about geometry or the simulation clock; the engine feeds in
reachability, random draws and tick counts.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Sequence, Set

from slegp.errors import ContractViolation


class MessageId(NamedTuple):
    origin: int
    sequence: int


@dataclass(frozen=True, slots=True)
class Message:
    id: MessageId
    utility: float = 1.0
    size_units: float = 1.0
    created_tick: int = 0

    def __post_init__(self) -> None:
        if self.utility < 0:
            raise ContractViolation(f"utility must be >= 0, got {self.utility}")
        if not self.size_units > 0:
            raise ContractViolation(f"size_units must be > 0, got {self.size_units}")
        if self.created_tick < 0:
            raise ContractViolation(f"created_tick must be >= 0, got {self.created_tick}")

    @property
    def origin(self) -> int:
        return self.id.origin


class Role(enum.Enum):
    GROUP_OWNER = "owner"
    MEMBER_SEARCHING = "searching"
    MEMBER_ATTACHED = "attached"


@dataclass(frozen=True, slots=True)
class Mode:
    role: Role
    owner: Optional[int] = None

    def __post_init__(self) -> None:
        if (self.role is Role.MEMBER_ATTACHED) != (self.owner is not None):
            raise ContractViolation("only an attached member names an owner")

    @property
    def is_owner(self) -> bool:
        return self.role is Role.GROUP_OWNER

    @property
    def is_member(self) -> bool:
        return self.role is not Role.GROUP_OWNER

    @property
    def is_attached(self) -> bool:
        return self.role is Role.MEMBER_ATTACHED

    def __repr__(self) -> str:
        if self.owner is None:
            return f"Mode({self.role.name})"
        return f"Mode({self.role.name}, owner={self.owner})"


GROUP_OWNER = Mode(Role.GROUP_OWNER)
MEMBER_SEARCHING = Mode(Role.MEMBER_SEARCHING)


def attached_to(owner: int) -> Mode:
    return Mode(Role.MEMBER_ATTACHED, owner)


@dataclass
class DeviceState:
    """Protocol state of one device.

    ``personal_queue`` holds the device's own messages and ``relay_queue``
    everything it learned from others. ``personal_slot_debt`` is the deficit
    counter that keeps personal messages at no less than half of the send
    slots; it stays in {-1, 0}.
    """

    id: int
    mode: Mode = MEMBER_SEARCHING
    ticks_in_mode: int = 0
    database: Dict[MessageId, Message] = field(default_factory=dict)
    personal_queue: deque = field(default_factory=deque)
    relay_queue: deque = field(default_factory=deque)
    sent_marks: Set[MessageId] = field(default_factory=set)
    personal_slot_debt: int = 0

    def set_mode(self, mode: Mode) -> None:
        """Change mode; the residence clock restarts only when the coarse
        GO/GM role flips (searching and attached share the GM clock)."""
        if mode.is_owner != self.mode.is_owner:
            self.ticks_in_mode = 0
        self.mode = mode

    def seed_personal(self, message: Message) -> None:
        if message.origin != self.id:
            raise ContractViolation(
                f"device {self.id} cannot own a message originated by {message.origin}"
            )
        integrate_message(self, message)


def maybe_switch_mode(
    state: DeviceState,
    min_go: float,
    min_gm: float,
    switch_prob: float,
    random_draw: float,
) -> Mode:
    """Return the mode the device should be in after this tick's switch check.

    Switching is gated by a strict ``ticks_in_mode > minimum`` test, then
    happens when ``random_draw < switch_prob``.
    """
    minimum = min_go if state.mode.is_owner else min_gm
    if state.ticks_in_mode > minimum and random_draw < switch_prob:
        return MEMBER_SEARCHING if state.mode.is_owner else GROUP_OWNER
    return state.mode


PERSONAL = "personal"
RELAY = "relay"


class Slot(NamedTuple):
    source: Optional[str]  # PERSONAL, RELAY, or None when both queues are empty
    message: Optional[Message]


def _pick_queue(state: DeviceState) -> Optional[str]:
    personal, relay = state.personal_queue, state.relay_queue
    if personal and (state.personal_slot_debt >= 0 or not relay):
        state.personal_slot_debt = max(state.personal_slot_debt - 1, -1)
        return PERSONAL
    if relay:
        if personal:
            state.personal_slot_debt += 1
        return RELAY
    return None


def take_send_slot(state: DeviceState) -> Slot:
    """Consume one send slot of ``state``.

    The head of the chosen queue is rotated to the tail. A head that already
    carries a sent-mark loses the mark and the slot is forfeited.
    """
    source = _pick_queue(state)
    if source is None:
        return Slot(None, None)
    queue = state.personal_queue if source == PERSONAL else state.relay_queue
    message_id = queue[0]
    queue.rotate(-1)
    if message_id in state.sent_marks:
        state.sent_marks.discard(message_id)
        return Slot(source, None)
    state.sent_marks.add(message_id)
    return Slot(source, state.database[message_id])


def select_message_to_broadcast(state: DeviceState) -> Optional[Message]:
    return take_send_slot(state).message


def integrate_message(state: DeviceState, message: Message) -> bool:
    """Store ``message`` if new. Returns True iff the database grew."""
    if message.id in state.database:
        return False
    state.database[message.id] = message
    if message.origin == state.id:
        state.personal_queue.append(message.id)
    else:
        state.relay_queue.append(message.id)
    return True


def choose_group_owner(
    candidates: Sequence[int],
    random_draw: float,
    weights: Optional[Sequence[float]] = None,
) -> Optional[int]:
    """Pick an owner among reachable candidates.

    Uniform by default (index ``floor(draw * count)``); with ``weights`` the
    pick is proportional to them.
    """
    if weights is not None:
        if len(weights) != len(candidates):
            raise ContractViolation(
                f"{len(weights)} weights given for {len(candidates)} candidates"
            )
        if any(w < 0 for w in weights):
            raise ContractViolation("weights must be non-negative")
    if not candidates:
        return None
    if weights is None:
        index = min(int(random_draw * len(candidates)), len(candidates) - 1)
        return candidates[index]
    total = math.fsum(weights)
    if total <= 0:
        raise ContractViolation("weights must not all be zero")
    threshold = random_draw * total
    acc = 0.0
    chosen = None
    for candidate, w in zip(candidates, weights):
        if w <= 0:
            continue
        chosen = candidate
        acc += w
        if threshold < acc:
            break
    return chosen


def recommended_gm_min_time(reachable_count: int, target_groups: int, min_go: float) -> float:
    """GM minimum residence sized to sustain ``target_groups`` groups among
    ``reachable_count`` devices: ``min_go * (N - 1) / c``, never below ``min_go``."""
    if reachable_count < 1 or target_groups < 1 or min_go < 0:
        raise ContractViolation("need reachable_count >= 1, target_groups >= 1, min_go >= 0")
    factor = (reachable_count - 1) / target_groups
    return min_go * max(factor, 1.0)


@dataclass(frozen=True)
class QueueProfile:
    u_M: float
    B_s: float
    P_reload: float
    v_M: float
    A: float = 0.0
    B: float = 0.0

    def __post_init__(self) -> None:
        if self.u_M < 0 or self.A < 0 or self.B < 0:
            raise ContractViolation("u_M, A and B must be non-negative")
        if not (self.B_s > 0 and self.P_reload > 0 and self.v_M > 0):
            raise ContractViolation("B_s, P_reload and v_M must be positive")


def queue_utility_rate(profile: QueueProfile) -> float:
    """Utility per second of serving a queue: u_M * (A * B_s / P_reload + B * v_M)."""
    p = profile
    return p.u_M * (p.A * p.B_s / p.P_reload + p.B * p.v_M)
