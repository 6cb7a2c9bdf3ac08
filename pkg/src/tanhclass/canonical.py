"""Canonical representatives of functional equivalence classes.

Canonicalisation runs in three stages:

1. reduce to the zeroing fixpoint, leaving every redundant unit blank;
2. negate each surviving unit whose incoming weight vector is
   lexicographically negative;
3. stably sort units by decreasing incoming weights, ties broken by
   decreasing bias.  Blank units end up trailing.

Two parameters of the same shape are functionally equivalent exactly when
their canonical forms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, Parameter, ToleranceConfig, lex_sign
from .errors import ShapeError
from .reducibility import Reduction, reduce_to_fixpoint

__all__ = ["CanonicalisationRecord", "canonicalise", "canonical_form", "equivalent"]


@dataclass(frozen=True)
class CanonicalisationRecord:
    """Result of canonicalisation together with what each stage did.

    ``signs[k]`` is the stage-2 factor applied to input unit ``k``.
    ``permutation[p]`` is the input unit that lands at canonical position
    ``p``.  ``reduction`` is the full stage-1 result.
    """

    canonical: Parameter
    zeroed: frozenset[int]
    signs: tuple[int, ...]
    permutation: tuple[int, ...]
    reduction: Reduction

    @property
    def rank(self) -> int:
        return self.canonical.h - len(self.zeroed)

    def position_of(self, unit: int) -> int:
        """Canonical position of input unit ``unit``."""
        return self.permutation.index(unit)


def canonicalise(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalisationRecord:
    reduction = reduce_to_fixpoint(w, tol)
    zeroed = reduction.zeroed
    a, b, c, d = reduction.parameter.arrays()

    signs = [1] * w.h
    for k in range(w.h):
        if k in zeroed:
            continue
        s = lex_sign(b[k])
        if s < 0:
            signs[k] = -1
            a[k], b[k], c[k] = -a[k], -b[k], -c[k]

    # Python's sort is stable, so equal keys keep their input order.
    perm = sorted(range(w.h), key=lambda k: (*(-b[k]), -c[k]))
    # Adding 0.0 turns any -0.0 into 0.0 so serialised forms are unique.
    canonical = Parameter(a[perm] + 0.0, b[perm] + 0.0, c[perm] + 0.0, d + 0.0)
    return CanonicalisationRecord(canonical, zeroed, tuple(signs), tuple(perm), reduction)


def canonical_form(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> Parameter:
    return canonicalise(w, tol).canonical


def equivalent(w: Parameter, w2: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Decide functional equivalence by comparing canonical forms."""
    if w.shape != w2.shape:
        raise ShapeError(f"parameters have different shapes: {w.shape} vs {w2.shape}")
    v, v2 = canonical_form(w, tol), canonical_form(w2, tol)
    return bool(np.max(np.abs(v.flatten() - v2.flatten())) <= tol.weight_tol)
