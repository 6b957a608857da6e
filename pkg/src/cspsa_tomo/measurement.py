"""Projective measurements around a candidate state.

Each iteration measures in an orthonormal basis that contains the
candidate as its first element, so the frequency of outcome 0 estimates
the fidelity with the true state and 1 - freq_0 estimates the
infidelity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionMismatch, InvalidDistribution
from .states import PureState

# Negative probability entries beyond this are treated as malformed
# rather than rounding noise.
_NEG_TOL = 1e-12
_SUM_TOL = 1e-9
_UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal basis stored as matrix columns; column 0 is the candidate."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("basis matrix must be square with d >= 2")
        gram = m.conj().T @ m
        dev = float(np.max(np.abs(gram - np.eye(m.shape[0]))))
        if dev > _UNITARITY_TOL:
            raise ValueError(f"basis columns deviate from orthonormality by {dev:.3g}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.matrix[:, i]


@dataclass(frozen=True)
class CountRecord:
    """Outcome counts from one measurement of ``shots`` copies."""

    basis: MeasurementBasis
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.shape[0] != self.basis.dim:
            raise ValueError("counts length must match the basis dimension")
        if counts.min() < 0:
            raise ValueError("counts must be non-negative")
        if int(counts.sum()) != int(self.shots):
            raise ValueError(
                f"counts sum {int(counts.sum())} does not equal shots {self.shots}"
            )
        if self.shots < 1:
            raise ValueError("shots must be positive")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)


def complete_basis(psi: PureState) -> MeasurementBasis:
    """Deterministic orthonormal basis whose first vector is ``psi``.

    Uses a Householder reflector with the sign convention that avoids
    cancellation, so the same input always produces the same matrix and
    column 0 equals the amplitudes of ``psi`` exactly.
    """
    matrix = _backend.kernels.householder_basis(psi.amplitudes)
    return MeasurementBasis(matrix)


def outcome_probabilities(basis: MeasurementBasis, truth: PureState) -> np.ndarray:
    """Born probabilities p_i = |<basis_i|truth>|^2."""
    if basis.dim != truth.dim:
        raise DimensionMismatch(f"dimensions differ: {basis.dim} vs {truth.dim}")
    c = basis.matrix.conj().T @ truth.amplitudes
    return c.real * c.real + c.imag * c.imag


def simulate_counts(probabilities, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial draw decomposed into conditional binomials.

    The sequential decomposition makes the stream consumption explicit:
    exactly d - 1 binomial draws per call, in outcome order.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise InvalidDistribution("probability vector must be 1-d with d >= 2")
    if float(p.min()) < -_NEG_TOL:
        raise InvalidDistribution(f"negative probability {float(p.min()):.3g}")
    if abs(float(p.sum()) - 1.0) > _SUM_TOL:
        raise InvalidDistribution(f"probabilities sum to {float(p.sum()):.17g}")
    if shots < 1:
        raise ValueError("shots must be positive")
    d = p.shape[0]
    counts = np.zeros(d, dtype=np.int64)
    remaining = int(shots)
    tail = 1.0
    for i in range(d - 1):
        cond = 0.0 if tail <= 0.0 else min(max(float(p[i]) / tail, 0.0), 1.0)
        drawn = int(rng.binomial(remaining, cond))
        counts[i] = drawn
        remaining -= drawn
        tail -= float(p[i])
    counts[d - 1] = remaining
    return counts


def estimate_infidelity(record: CountRecord) -> float:
    """Fraction of shots that did not land on the candidate outcome."""
    return 1.0 - float(record.counts[0]) / float(record.shots)
