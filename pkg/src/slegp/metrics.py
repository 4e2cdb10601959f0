"""Delivery bookkeeping and the throughput statistic."""
from __future__ import annotations

from typing import Dict, Iterator, NamedTuple, Optional, Sequence, Tuple

from slegp.errors import ContractViolation
from slegp.protocol import MessageId


class DeliveryRecord(NamedTuple):
    message_id: MessageId
    device_id: int
    tick: int


def total_deliveries(n: int, M: int) -> int:
    """Number of possible first-time deliveries: 2n devices each missing
    the (2n - 1) * M messages of the others, i.e. (4n^2 - 2n) M."""
    return (4 * n * n - 2 * n) * M


class DeliveryLedger:
    """First-time (message, recipient) deliveries with their tick stamps."""

    def __init__(self) -> None:
        self._ticks: Dict[Tuple[MessageId, int], int] = {}

    def record_delivery(self, message_id: MessageId, device_id: int, tick: int) -> bool:
        if device_id == message_id.origin:
            raise ContractViolation(f"self-delivery of {message_id} to its origin")
        key = (message_id, device_id)
        if key in self._ticks:
            return False
        self._ticks[key] = tick
        return True

    def count_up_to(self, tick: int) -> int:
        return sum(1 for t in self._ticks.values() if t <= tick)

    def __len__(self) -> int:
        return len(self._ticks)

    def __contains__(self, key: object) -> bool:
        return key in self._ticks

    def __iter__(self) -> Iterator[DeliveryRecord]:
        for (mid, dev), tick in self._ticks.items():
            yield DeliveryRecord(mid, dev, tick)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DeliveryLedger):
            return NotImplemented
        return self._ticks == other._ticks

    def __repr__(self) -> str:
        return f"DeliveryLedger({len(self)} records)"


def throughput(ledger: DeliveryLedger, n: int, M: int, up_to_tick: int) -> float:
    if n < 1 or M < 1:
        raise ContractViolation("throughput needs n >= 1 and M >= 1")
    return ledger.count_up_to(up_to_tick) / total_deliveries(n, M)


def time_to_fraction(series: Sequence[float], target: float) -> Optional[int]:
    """First index (tick) at which ``series`` reaches ``target``."""
    if not 0.0 <= target <= 1.0:
        raise ContractViolation(f"target must be in [0, 1], got {target}")
    for tick, value in enumerate(series):
        if value >= target:
            return tick
    return None
