"""Detection and elimination of redundant hidden units.

A parameter is reducible when some unit satisfies one of four conditions:

    i    a_i = 0                         (unit has no output)
    ii   b_i = 0                         (unit is constant)
    iii  (b_i, c_i) = (b_j, c_j),  i != j  (duplicated unit)
    iv   (b_i, c_i) = -(b_j, c_j), i != j  (negated duplicate)

All equalities are checked componentwise within ``weight_tol``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import AbstractSet

import numpy as np

from .core import DEFAULT_TOL, Parameter, ToleranceConfig
from .errors import WitnessError

__all__ = [
    "Condition",
    "Witness",
    "Reduction",
    "find_redundancy",
    "holds",
    "reduce_once",
    "reduce_in_place",
    "reduce_to_fixpoint",
    "reduce_fully",
    "rank",
]


class Condition(str, enum.Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"

    @property
    def pairwise(self) -> bool:
        return self in (Condition.III, Condition.IV)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Witness:
    """Which condition fires, at unit ``i`` (and partner ``j`` for iii/iv).

    Unit ``i`` is the one that gets eliminated; for iii/iv its outgoing
    weight is merged into unit ``j``.
    """

    condition: Condition
    i: int
    j: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))
        if self.condition.pairwise:
            if self.j is None or self.j == self.i:
                raise ValueError(f"condition {self.condition} needs two distinct units")
        elif self.j is not None:
            raise ValueError(f"condition {self.condition} takes a single unit")


def _zero(v: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(v) <= tol))


def _bc(w: Parameter) -> np.ndarray:
    return np.concatenate([w.b, w.c[:, None]], axis=1)


def holds(w: Parameter, witness: Witness, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``witness`` is currently true for ``w``."""
    i, j = witness.i, witness.j
    for k in (i, j):
        if k is not None and not 0 <= k < w.h:
            return False
    cond = witness.condition
    if cond is Condition.I:
        return _zero(w.a[i], tol.weight_tol)
    if cond is Condition.II:
        return _zero(w.b[i], tol.weight_tol)
    bc = _bc(w)
    if cond is Condition.III:
        return _zero(bc[i] - bc[j], tol.weight_tol)
    return _zero(bc[i] + bc[j], tol.weight_tol)


def find_redundancy(
    w: Parameter,
    zeroed: AbstractSet[int] = frozenset(),
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Witness | None:
    """First witness among units outside ``zeroed``, or None if irreducible.

    Scan order: condition i by smallest unit, then ii, then iii by smallest
    pair (i, j) with i < j, then iv likewise.
    """
    eps = tol.weight_tol
    live = [k for k in range(w.h) if k not in zeroed]
    for k in live:
        if _zero(w.a[k], eps):
            return Witness(Condition.I, k)
    for k in live:
        if _zero(w.b[k], eps):
            return Witness(Condition.II, k)
    if len(live) < 2:
        return None
    bc = _bc(w)[live]
    diff = np.max(np.abs(bc[:, None, :] - bc[None, :, :]), axis=2)
    summ = np.max(np.abs(bc[:, None, :] + bc[None, :, :]), axis=2)
    for cond, table in ((Condition.III, diff), (Condition.IV, summ)):
        for p in range(len(live)):
            for q in range(p + 1, len(live)):
                if table[p, q] <= eps:
                    return Witness(cond, live[p], live[q])
    return None


def _require(w: Parameter, witness: Witness, tol: ToleranceConfig) -> None:
    if not holds(w, witness, tol):
        raise WitnessError(f"witness {witness} does not hold for this parameter")


def reduce_once(w: Parameter, witness: Witness, tol: ToleranceConfig = DEFAULT_TOL) -> Parameter:
    """Functionally equivalent parameter with unit ``witness.i`` removed."""
    _require(w, witness, tol)
    a, b, c, d = w.arrays()
    i, j = witness.i, witness.j
    if witness.condition is Condition.II:
        d = d + a[i] * np.tanh(c[i])
    elif witness.condition is Condition.III:
        a[j] = a[j] + a[i]
    elif witness.condition is Condition.IV:
        a[j] = a[j] - a[i]
    keep = [k for k in range(w.h) if k != i]
    return Parameter(a[keep], b[keep], c[keep], d)


def reduce_in_place(
    w: Parameter,
    witness: Witness,
    zeroed: AbstractSet[int] = frozenset(),
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[Parameter, frozenset[int]]:
    """One iteration of the zeroing reduction; the unit count is unchanged.

    Unit ``witness.i`` ends up blank (all weights and bias exactly zero) and
    is added to ``zeroed``.  The values that the condition requires to be
    zero are snapped to exact zeros rather than left at tolerance level.
    """
    if witness.i in zeroed or (witness.j is not None and witness.j in zeroed):
        raise WitnessError(f"witness {witness} refers to an already zeroed unit")
    _require(w, witness, tol)
    a, b, c, d = w.arrays()
    i, j = witness.i, witness.j
    cond = witness.condition
    if cond is Condition.II:
        d = d + a[i] * np.tanh(c[i])
    elif cond is Condition.III:
        a[j] = a[j] + a[i]
    elif cond is Condition.IV:
        a[j] = a[j] - a[i]
    a[i], b[i], c[i] = 0.0, 0.0, 0.0
    return Parameter(a, b, c, d), frozenset(zeroed) | {i}


@dataclass(frozen=True)
class Reduction:
    """Fixpoint of the zeroing reduction.

    ``parameter`` has the same unit count as the input; units in ``zeroed``
    are blank.  ``steps`` lists the witnesses applied, in order.
    """

    parameter: Parameter
    zeroed: frozenset[int]
    steps: tuple[Witness, ...] = field(default=())

    @property
    def rank(self) -> int:
        return self.parameter.h - len(self.zeroed)


def reduce_to_fixpoint(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> Reduction:
    zeroed: frozenset[int] = frozenset()
    steps = []
    while (witness := find_redundancy(w, zeroed, tol)) is not None:
        w, zeroed = reduce_in_place(w, witness, zeroed, tol)
        steps.append(witness)
    return Reduction(w, zeroed, tuple(steps))


def reduce_fully(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> Parameter:
    """Minimal equivalent parameter, with ``rank(w)`` hidden units."""
    while (witness := find_redundancy(w, frozenset(), tol)) is not None:
        w = reduce_once(w, witness, tol)
    return w


def rank(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Minimal number of hidden units needed to implement f_w."""
    return reduce_to_fixpoint(w, tol).rank
