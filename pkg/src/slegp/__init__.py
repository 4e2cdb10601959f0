"""Short-lived ephemeral groups gossip protocol and circuit benchmark."""

from slegp.engine import RunResult, SeriesPoint, SimConfig, Simulation, run
from slegp.errors import ConfigurationError, ContractViolation
from slegp.metrics import DeliveryLedger, throughput, time_to_fraction
from slegp.protocol import (
    DeviceState,
    Message,
    MessageId,
    Mode,
    QueueProfile,
    Role,
    choose_group_owner,
    integrate_message,
    maybe_switch_mode,
    queue_utility_rate,
    recommended_gm_min_time,
    select_message_to_broadcast,
)
from slegp.world import WorldState, advance, circuit_distance, initial_world, neighbors

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ContractViolation",
    "DeliveryLedger",
    "DeviceState",
    "Message",
    "MessageId",
    "Mode",
    "QueueProfile",
    "Role",
    "RunResult",
    "SeriesPoint",
    "SimConfig",
    "Simulation",
    "WorldState",
    "advance",
    "choose_group_owner",
    "circuit_distance",
    "initial_world",
    "integrate_message",
    "maybe_switch_mode",
    "neighbors",
    "queue_utility_rate",
    "recommended_gm_min_time",
    "run",
    "select_message_to_broadcast",
    "throughput",
    "time_to_fraction",
]
