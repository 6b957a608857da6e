"""Pure states, fidelity metrics, and Haar-uniform sampling.

A pure state of a d-level system is a unit-norm vector of complex
amplitudes.  Global phase is physically irrelevant but is not removed:
two states differing by a phase compare equal under ``fidelity`` while
their amplitude arrays differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroVector

NORM_ATOL = 1e-12

# Norms below this cannot be divided out without amplifying noise.
_MIN_NORM = 1e-300


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector of dimension d >= 2."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] < 2:
            raise ValueError("amplitudes must be a 1-d complex vector with d >= 2")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(
                f"amplitude norm {norm:.17g} deviates from 1 by more than {NORM_ATOL}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def normalize(raw) -> PureState:
    """Scale a raw complex vector onto the unit sphere.

    Raises ZeroVector if the norm is too small (or not finite) for the
    division to be meaningful.
    """
    arr = np.asarray(raw, dtype=np.complex128)
    norm = float(np.linalg.norm(arr))
    if not np.isfinite(norm) or norm < _MIN_NORM:
        raise ZeroVector(f"cannot normalize vector with norm {norm:.3g}")
    return PureState(arr / norm)


def fidelity(a: PureState, b: PureState) -> float:
    """Squared overlap |<a|b>|^2, clipped into [0, 1]."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    val = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(val, 0.0), 1.0))


def infidelity(a: PureState, b: PureState) -> float:
    """1 - fidelity(a, b)."""
    return 1.0 - fidelity(a, b)


def haar_random_state(d: int, rng: np.random.Generator) -> PureState:
    """Draw a state uniformly from the Haar measure on the unit sphere.

    Normalizing a vector of i.i.d. standard complex Gaussians gives the
    unitarily invariant distribution.  The squared overlap with any fixed
    state is then Beta(1, d - 1) distributed with mean 1/d.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return normalize(z)
