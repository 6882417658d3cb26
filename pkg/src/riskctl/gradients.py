"""Relative-risk gradient matrices over safety modes and activities.

A matrix stores, for every ordered pair of modes, the expected change in
risk level when switching from the row mode to the column mode: positive
means an improvement, negative a worsening.  Only symmetric changes are
modelled, so the matrix is skew-diagonal and can be given as its lower-left
triangle; the upper right is mirrored with flipped sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .diagnostics import ModelError, SourcePos

if TYPE_CHECKING:
    from .model import Model, RiskFactor
    from .riskspace import RiskState


@dataclass
class GradientMatrix:
    dimension: str
    labels: list[str]
    values: list[list[int]]  # full square matrix, row = from, column = to
    pos: SourcePos | None = field(default=None, compare=False)

    def __post_init__(self):
        self._index = {label: i for i, label in enumerate(self.labels)}

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def gradient(self, from_label: str, to_label: str) -> int:
        for label in (from_label, to_label):
            if label not in self._index:
                raise ModelError(f"unknown {self.dimension} label {label}", self.pos)
        return self.values[self._index[from_label]][self._index[to_label]]

    def lower_left(self) -> list[list[int]]:
        return [row[: i + 1] for i, row in enumerate(self.values)]


def complete_matrix(dimension: str, labels: list[str],
                    rows: list[list[int]],
                    pos: SourcePos | None = None) -> GradientMatrix:
    """Build a full skew-diagonal matrix from triangular (or full) rows.

    Row k may have k+1 entries (lower-left triangle) or n entries (full
    row); full rows must already be consistent with skew-diagonality.
    Diagonal entries must be zero.
    """

    n = len(labels)
    if len(rows) != n:
        raise ModelError(f"{dimension} matrix has {len(rows)} rows for {n} labels", pos)
    full = [[0] * n for _ in range(n)]
    given = [[False] * n for _ in range(n)]
    for i, row in enumerate(rows):
        if len(row) not in (i + 1, n):
            raise ModelError(
                f"{dimension} row {labels[i]} has {len(row)} entries, "
                f"expected {i + 1} (triangle) or {n} (full)", pos)
        for j, value in enumerate(row):
            full[i][j] = value
            given[i][j] = True
    for i in range(n):
        if full[i][i] != 0:
            raise ModelError(f"nonzero diagonal for {labels[i]} in {dimension} matrix", pos)
        for j in range(i + 1, n):
            if given[i][j]:
                if given[j][i] and full[i][j] != -full[j][i]:
                    raise ModelError(
                        f"{dimension} matrix not skew-diagonal at "
                        f"({labels[i]},{labels[j]})", pos)
            else:
                full[i][j] = -full[j][i]
    return GradientMatrix(dimension, list(labels), full, pos)


def gradient(matrix: GradientMatrix, from_label: str, to_label: str) -> int:
    return matrix.gradient(from_label, to_label)


def override_target(factor: RiskFactor, state: RiskState, current_mode: str,
                    model: Model) -> str:
    """Safety-mode target for switching away from `factor`, possibly
    overridden by the demands of concurrently unresolved factors.

    Collects the safmod targets of the mitigation options of every other
    factor that is active or mitigated in `state`; if any exist, returns
    the one whose gradient back to `current_mode` is largest (i.e. the
    least restrictive mode still demanded), ties broken by mode
    declaration order.  With no concurrent demands the factor's own
    declared target is returned.
    """

    from .riskspace import Phase

    matrix = model.matrices.get("safmod")
    if matrix is None:
        raise ModelError("no safmod gradient matrix declared")
    declared = _declared_safmod_target(factor, model)
    if declared is None:
        raise ModelError(f"factor {factor.name} has no safmod target to override")
    if declared not in matrix:
        raise ModelError(f"declared target {declared} of {factor.name} "
                         "missing from the safmod matrix")

    demanded: list[str] = []  # mode declaration order
    demanding = {name for name, phase in state.phases.items()
                 if name != factor.name and phase in (Phase.ACT, Phase.MIT)}
    for mode_name, mode in model.modes.items():
        if mode.target is None or mode.target[0] != "safmod":
            continue
        target = mode.target[1]
        if target in demanded:
            continue
        for other_name in demanding:
            other = model.factors[other_name]
            if any(ref.name == mode_name for ref in other.mitigated_by):
                demanded.append(target)
                break
    if not demanded:
        return declared

    best = demanded[0]
    best_gradient = matrix.gradient(best, current_mode)
    for cand in demanded[1:]:
        g = matrix.gradient(cand, current_mode)
        if g > best_gradient:
            best, best_gradient = cand, g
    return best


def _declared_safmod_target(factor: RiskFactor, model: Model) -> str | None:
    for refs in (factor.resumed_by, factor.mitigated_by):
        for ref in refs:
            mode = model.modes.get(ref.name)
            if mode is not None and mode.target is not None and mode.target[0] == "safmod":
                return mode.target[1]
    return None
