"""LTE resource-block arithmetic and Erlang-B blocking.

Units follow the call-level model: call rate ``s`` in calls/min per user,
holding time ``t_h`` in minutes, capacities in kbps per subcarrier.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real

SLOT_US = 500  # one resource block lasts 0.5 ms
SYMBOLS_PER_SLOT = 7  # normal cyclic prefix


class Modulation(str, enum.Enum):
    QPSK = "qpsk"
    QAM16 = "qam16"

    @property
    def bits_per_symbol(self) -> int:
        return {Modulation.QPSK: 2, Modulation.QAM16: 4}[self]

    @classmethod
    def parse(cls, name) -> Modulation:
        if isinstance(name, Modulation):
            return name
        key = str(name).lower().replace("-", "")
        if key == "16qam":
            key = "qam16"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown modulation {name!r}") from None


def rb_bitrate(mod: Modulation | str) -> int:
    """Bit rate of one RB on one subcarrier, in kbps (28 for QPSK)."""
    bits_per_slot = Modulation.parse(mod).bits_per_symbol * SYMBOLS_PER_SLOT
    return bits_per_slot * 1000 // SLOT_US


@dataclass(frozen=True)
class RbArrival:
    lambda_T: float  # RB per ms
    t_h_ms: float

    def __post_init__(self):
        if self.lambda_T < 0 or self.t_h_ms < 0:
            raise ValueError("arrival rate and service time must be non-negative")


def aggregate_offered_rb_traffic(arr: RbArrival) -> float:
    return arr.lambda_T * arr.t_h_ms


@dataclass(frozen=True)
class TrafficScenario:
    users_M: Real
    rb_per_call_m: int
    call_rate_s: Real
    holding_th: Real
    modulation: Modulation = Modulation.QPSK
    capacity_C: int = 0  # kbps per subcarrier

    def __post_init__(self):
        object.__setattr__(self, "modulation", Modulation.parse(self.modulation))
        if not isinstance(self.rb_per_call_m, int) or self.rb_per_call_m < 1:
            raise ValueError("rb_per_call_m must be an integer >= 1")
        for name in ("users_M", "call_rate_s", "holding_th"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.capacity_C < 0:
            raise ValueError("capacity_C must be non-negative")

    @property
    def channels(self) -> int:
        return channel_count(simultaneous_rb(self.capacity_C, self.modulation), self.rb_per_call_m)


def simultaneous_rb(capacity_C: int, mod: Modulation | str = Modulation.QPSK) -> int:
    """RBs the network carries at once: ``floor(C / rb_bitrate)``."""
    if capacity_C < 0:
        raise ValueError("capacity must be non-negative")
    return int(capacity_C // rb_bitrate(mod))


def channel_count(N: int, m: int) -> int:
    """Call channels out of ``N`` simultaneous RBs at ``m`` RB per call."""
    if m < 1:
        raise ValueError("RB per call must be at least 1")
    if N < 0:
        raise ValueError("RB count must be non-negative")
    return N // m


def offered_traffic(sc: TrafficScenario):
    """Total offered load ``A = s * m * t_h * M`` in Erlangs.

    Exact when the inputs are ints/Fractions (e.g. ``s = Fraction(1, 60)``).
    """
    return sc.call_rate_s * sc.rb_per_call_m * sc.holding_th * sc.users_M


def erlang_b(A: float, k: int) -> float:
    """Erlang-B blocking probability for load ``A`` on ``k`` channels.

    Evaluated with the recurrence ``B_j = A B_{j-1} / (j + A B_{j-1})``,
    which never forms ``A**k`` or ``k!``.
    """
    if A < 0:
        raise ValueError("offered traffic must be non-negative")
    if k < 0 or int(k) != k:
        raise ValueError("channel count must be a non-negative integer")
    A = float(A)
    b = 1.0
    for j in range(1, int(k) + 1):
        ab = A * b
        b = ab / (j + ab)
    return b


def weighted_blocking(B: float, ser: float, rule: str = "complement-product") -> float:
    """Probability a call fails by blocking or by symbol corruption."""
    if rule != "complement-product":
        raise ValueError(f"unknown weighting rule {rule!r}")
    for name, p in (("B", B), ("ser", ser)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    return 1.0 - (1.0 - B) * (1.0 - ser)


def _q(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def awgn_ser(mod: Modulation | str, snr_db: float) -> float:
    """Symbol error rate of Gray-coded QPSK / square 16-QAM on AWGN.

    ``snr_db`` is Es/N0. Not part of the traffic model proper; offered as an
    optional input to :func:`weighted_blocking`.
    """
    mod = Modulation.parse(mod)
    es_n0 = 10.0 ** (snr_db / 10.0)
    order = 2 ** mod.bits_per_symbol
    side = math.isqrt(order)
    p_axis = 2.0 * (1.0 - 1.0 / side) * _q(math.sqrt(3.0 * es_n0 / (order - 1)))
    return 1.0 - (1.0 - p_axis) ** 2
