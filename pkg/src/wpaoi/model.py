"""Physical scenario parameters and the statistics derived from them.

Everything downstream of this module is driven by two dimensionless numbers
computed here from the physical scenario:

* ``beta``, the mean number of extra slots needed to fill the capacitor, and
* ``pi``, the per-attempt decode success probability under Rayleigh fading.

All internal computation uses linear SI units (watts and joules). dBm appears
only at interface boundaries via the conversion helpers. The slot duration is
normalized to one time unit, so energy in joules and power in watts coincide
numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SystemParams",
    "DerivedParams",
    "dbm_to_watts",
    "watts_to_dbm",
    "channel_rate_from_distance",
    "derive",
    "build_params",
]


def dbm_to_watts(x_dbm: float) -> float:
    """Convert a power level in dBm to watts."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_w: float) -> float:
    """Convert watts to dBm. Inverse of :func:`dbm_to_watts`."""
    if x_w <= 0.0:
        raise ValueError(f"power must be positive, got {x_w}")
    return 10.0 * math.log10(x_w) + 30.0


def channel_rate_from_distance(d_m: float, alpha: float, c0: float = 1e3) -> float:
    """Exponential rate of the channel power gain from a distance power law.

    The link budget maps distance to the rate lambda of the exponentially
    distributed channel power gains as ``lambda = c0 * d**alpha``. Larger
    lambda means a weaker channel (the mean gain is 1/lambda).

    Parameters
    ----------
    d_m : float
        Distance in meters, > 0.
    alpha : float
        Path-loss exponent, > 0.
    c0 : float, optional
        Reference gain constant at 1 m.

    Returns
    -------
    float
        Rate parameter lambda of the channel power gain distribution.
    """
    if d_m <= 0.0:
        raise ValueError(f"distance must be positive, got {d_m}")
    if alpha <= 0.0:
        raise ValueError(f"path-loss exponent must be positive, got {alpha}")
    if c0 <= 0.0:
        raise ValueError(f"reference constant must be positive, got {c0}")
    return c0 * d_m**alpha


@dataclass(frozen=True)
class SystemParams:
    """Physical description of one operating point of the link.

    Attributes
    ----------
    power_w : float
        Transmit power P of the energy source in watts.
    efficiency : float
        RF-to-DC conversion efficiency eta, in (0, 1].
    noise_w : float
        Receiver noise variance sigma^2 in watts.
    rate_bpcu : float
        Spectral efficiency r in bits per channel use. The value 0 is
        accepted as a degenerate boundary (the decode threshold vanishes
        and every transmission succeeds); it is useful for exact tests.
    capacitor_j : float
        Capacitor size B in joules. A transmission happens with full
        discharge whenever the stored energy reaches B.
    channel_rate : float
        Rate lambda of the exponentially distributed power gains of both
        the energy link and the information link.
    """

    power_w: float
    efficiency: float
    noise_w: float
    rate_bpcu: float
    capacitor_j: float
    channel_rate: float

    def __post_init__(self) -> None:
        if self.power_w <= 0.0:
            raise ValueError(f"power_w must be positive, got {self.power_w}")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")
        if self.noise_w <= 0.0:
            raise ValueError(f"noise_w must be positive, got {self.noise_w}")
        if self.rate_bpcu < 0.0:
            raise ValueError(f"rate_bpcu must be non-negative, got {self.rate_bpcu}")
        if self.capacitor_j <= 0.0:
            raise ValueError(f"capacitor_j must be positive, got {self.capacitor_j}")
        if self.channel_rate <= 0.0:
            raise ValueError(f"channel_rate must be positive, got {self.channel_rate}")


@dataclass(frozen=True)
class DerivedParams:
    """The two sufficient statistics of the model.

    beta = lambda * B / (eta * P) is the mean number of extra slots needed to
    charge the capacitor. pi = exp(-lambda * (2**r - 1) * sigma^2 / B) is the
    probability that a single transmission attempt is decoded.
    """

    beta: float
    pi: float

    def __post_init__(self) -> None:
        if self.beta < 0.0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if not 0.0 < self.pi <= 1.0:
            raise ValueError(f"pi must be in (0, 1], got {self.pi}")


def derive(params: SystemParams) -> DerivedParams:
    """Compute (beta, pi) for a physical operating point.

    Raises ValueError if the success probability underflows to zero, which
    happens when the decode threshold is astronomically unlikely to be met;
    the interarrival moments diverge there and no downstream quantity is
    meaningful.
    """
    beta = params.channel_rate * params.capacitor_j / (params.efficiency * params.power_w)
    exponent = (
        params.channel_rate
        * (2.0**params.rate_bpcu - 1.0)
        * params.noise_w
        / params.capacitor_j
    )
    pi = math.exp(-exponent)
    if pi <= 0.0:
        raise ValueError(
            f"success probability underflows to zero (threshold exponent {exponent:.3g})"
        )
    return DerivedParams(beta=beta, pi=pi)


def build_params(
    power_w: float,
    capacitor_j: float,
    efficiency: float = 0.5,
    noise_w: float = 1e-8,
    rate_bpcu: float = 0.05,
    distance_m: float | None = None,
    alpha: float = 2.2,
    c0: float = 1e3,
    channel_rate: float | None = None,
) -> tuple[SystemParams, str | None]:
    """Assemble a SystemParams, resolving the channel rate.

    The channel rate may be given directly via ``channel_rate`` or through the
    distance power law via ``distance_m`` (with ``alpha`` and ``c0``). If both
    are supplied the direct rate wins and a warning string is returned as the
    second element; otherwise the second element is None.
    """
    warning = None
    if channel_rate is not None:
        if distance_m is not None:
            warning = (
                "both channel_rate and distance supplied; using channel_rate "
                f"{channel_rate!r} and ignoring distance {distance_m!r}"
            )
        lam = channel_rate
    elif distance_m is not None:
        lam = channel_rate_from_distance(distance_m, alpha, c0)
    else:
        raise ValueError("one of channel_rate or distance_m is required")
    params = SystemParams(
        power_w=power_w,
        efficiency=efficiency,
        noise_w=noise_w,
        rate_bpcu=rate_bpcu,
        capacitor_j=capacitor_j,
        channel_rate=lam,
    )
    return params, warning
