"""Transverse-field Ising chain in momentum space.

The chain of ``N`` spins maps onto ``N/2`` independent ``(k, -k)`` channels,
one per positive half-integer-quantized momentum. Everything else in the
package is computed from the Bogoliubov angle of each channel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidSizeError


def check_size(N):
    """Validate ``N`` as a positive even integer and return it as ``int``."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidSizeError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 2 or N % 2:
        raise InvalidSizeError(f"N must be even and >= 2, got {N}")
    return N


@dataclass(frozen=True)
class ModelParams:
    """Problem definition: ``N`` spins, transverse field ``g``, energy unit ``J``."""

    N: int
    g: float
    J: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "N", check_size(self.N))
        g = float(self.g)
        J = float(self.J)
        if not np.isfinite(g) or g < 0:
            raise DomainError(f"g must be finite and >= 0, got {self.g!r}")
        if not np.isfinite(J) or J <= 0:
            raise DomainError(f"J must be finite and > 0, got {self.J!r}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)

    @property
    def n_channels(self):
        return self.N // 2


@dataclass(frozen=True)
class MomentumGrid:
    N: int
    positive_momenta: np.ndarray

    @property
    def spacing(self):
        return 2 * np.pi / self.N

    def __len__(self):
        return len(self.positive_momenta)


def momentum_grid(N):
    """Positive momenta ``k_m = pi (2m - 1) / N`` for ``m = 1 .. N/2``, increasing."""
    N = check_size(N)
    m = np.arange(1, N // 2 + 1)
    return MomentumGrid(N, np.pi * (2 * m - 1) / N)


def bogoliubov_angle(g, k):
    """Ground-state mixing angle ``theta = atan2(sin k, g - cos k)``.

    Vectorized over ``g`` and ``k``. The two-argument form puts ``theta`` in
    ``(0, pi)`` for ``k`` in ``(0, pi)`` and selects the branch with
    ``(g - cos k) cos(theta) + sin(k) sin(theta) > 0``, i.e. channel energy
    ``-E(k)``.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0) or np.any(k >= np.pi):
        raise DomainError("momentum must lie strictly inside (0, pi)")
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise DomainError("g must be >= 0")
    theta = np.arctan2(np.sin(k), g - np.cos(k))
    return theta if theta.ndim else float(theta)


def dispersion(g, k, J=1.0):
    """Quasiparticle energy ``2 J sqrt(g^2 - 2 g cos k + 1)``."""
    if J <= 0:
        raise DomainError(f"J must be > 0, got {J!r}")
    # (g - cos k)^2 + sin^2 k avoids cancellation near g = 1, k = 0
    g = np.asarray(g, dtype=float)
    k = np.asarray(k, dtype=float)
    e = 2.0 * J * np.hypot(g - np.cos(k), np.sin(k))
    return e if e.ndim else float(e)


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Per-channel BCS data, stored as parallel arrays indexed by channel."""

    k: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    abs_cos: np.ndarray
    abs_sin: np.ndarray

    def __len__(self):
        return len(self.k)


def amplitudes_from_theta(k, theta, energy):
    theta = np.asarray(theta, dtype=float)
    return ChannelAmplitudes(
        k=np.asarray(k, dtype=float),
        theta=theta,
        u=np.cos(theta / 2),
        v=np.sin(theta / 2),
        energy=np.asarray(energy, dtype=float),
        abs_cos=np.abs(np.cos(theta)),
        abs_sin=np.abs(np.sin(theta)),
    )


def channel_amplitudes(params):
    """BCS amplitudes for every positive momentum of ``params``."""
    k = momentum_grid(params.N).positive_momenta
    theta = bogoliubov_angle(params.g, k)
    return amplitudes_from_theta(k, theta, dispersion(params.g, k, params.J))
