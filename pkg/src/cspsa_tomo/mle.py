"""Maximum-likelihood refinement over accumulated measurement records.

Every measurement performed so far contributes to one running
log-likelihood

    L(psi) = sum_records sum_i n_i log max(|<b_i|psi>|^2, eps),

maximized over unit vectors.  The floor eps only guards log(0); terms
with n_i = 0 vanish identically and are dropped before the kernels run,
which changes neither the value nor the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _backend
from .errors import DimensionMismatch, EmptyData
from .measurement import CountRecord
from .states import PureState

DEFAULT_PROBABILITY_FLOOR = 1e-12

_STRATEGIES = ("gradient", "fixed_point")


@dataclass(frozen=True)
class MleConfig:
    """Inner-solver settings for ``refine``."""

    max_inner_iterations: int = 500
    convergence_tol: float = 1e-10
    probability_floor: float = DEFAULT_PROBABILITY_FLOOR
    strategy: str = "gradient"

    def __post_init__(self):
        if self.max_inner_iterations < 1:
            raise ValueError("max_inner_iterations must be at least 1")
        if not self.convergence_tol > 0.0:
            raise ValueError("convergence_tol must be positive")
        if not 0.0 < self.probability_floor <= 1e-6:
            raise ValueError("probability_floor must lie in (0, 1e-6]")
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"strategy must be one of {_STRATEGIES}")


class AccumulatedData:
    """Ordered list of count records feeding the running likelihood."""

    def __init__(self, records: Iterable[CountRecord] = ()):
        self._records: list[CountRecord] = []
        self._stack = None
        for rec in records:
            self.add(rec)

    def add(self, record: CountRecord) -> None:
        if self._records and record.basis.dim != self.dim:
            raise DimensionMismatch(
                f"record dimension {record.basis.dim} does not match {self.dim}"
            )
        self._records.append(record)
        self._stack = None

    @property
    def records(self) -> tuple[CountRecord, ...]:
        return tuple(self._records)

    @property
    def dim(self) -> int:
        if not self._records:
            raise EmptyData("no records accumulated")
        return self._records[0].basis.dim

    def __len__(self) -> int:
        return len(self._records)

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """All nonzero-count outcomes as (bras, counts) arrays.

        Row j of ``bras`` is the conjugated basis vector <b_j| so that
        bras @ psi gives the overlaps in one product.
        """
        if not self._records:
            raise EmptyData("no records accumulated")
        if self._stack is None or self._stack[0] != len(self._records):
            bra_rows = []
            count_vals = []
            for rec in self._records:
                mask = rec.counts > 0
                if not mask.any():
                    continue
                bra_rows.append(rec.basis.matrix[:, mask].conj().T)
                count_vals.append(rec.counts[mask].astype(np.float64))
            bras = np.ascontiguousarray(np.vstack(bra_rows))
            counts = np.concatenate(count_vals)
            self._stack = (len(self._records), bras, counts)
        return self._stack[1], self._stack[2]


def log_likelihood(
    data: AccumulatedData, psi: PureState, floor: float = DEFAULT_PROBABILITY_FLOOR
) -> float:
    """Accumulated log-likelihood of ``psi``; non-positive by construction."""
    if len(data) == 0:
        raise EmptyData("no records accumulated")
    if data.dim != psi.dim:
        raise DimensionMismatch(f"dimensions differ: {data.dim} vs {psi.dim}")
    bras, counts = data.stacked()
    return _backend.kernels.log_likelihood(bras, counts, psi.amplitudes, floor)


def likelihood_gradient(
    data: AccumulatedData, psi: PureState, floor: float = DEFAULT_PROBABILITY_FLOOR
) -> np.ndarray:
    """Conjugate (Wirtinger) gradient sum_j n_j <b_j|psi> / p_j |b_j>."""
    if len(data) == 0:
        raise EmptyData("no records accumulated")
    if data.dim != psi.dim:
        raise DimensionMismatch(f"dimensions differ: {data.dim} vs {psi.dim}")
    bras, counts = data.stacked()
    return _backend.kernels.likelihood_gradient(bras, counts, psi.amplitudes, floor)


def refine(
    data: AccumulatedData, start: PureState, config: Optional[MleConfig] = None
) -> PureState:
    """Unit-norm maximizer of the accumulated likelihood, warm started.

    The solver only ever accepts objective-improving steps, so the
    result is never worse than ``start``.
    """
    if len(data) == 0:
        raise EmptyData("no records accumulated")
    if data.dim != start.dim:
        raise DimensionMismatch(f"dimensions differ: {data.dim} vs {start.dim}")
    if config is None:
        config = MleConfig()
    bras, counts = data.stacked()
    # Gradient entries scale with the total shot count; 1/total makes
    # the first trial step O(1) in the state.
    init_step = 1.0 / float(counts.sum())
    amps, _ = _backend.kernels.refine_pure_state(
        bras,
        counts,
        start.amplitudes,
        config.max_inner_iterations,
        config.convergence_tol,
        config.probability_floor,
        init_step,
        config.strategy,
        False,
    )
    return PureState(amps)
