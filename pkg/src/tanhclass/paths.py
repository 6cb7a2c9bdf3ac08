"""Piecewise-linear paths that stay inside a functional equivalence class.

All constructions here work on reducible parameters, which always have at
least one blank unit after reduction.  A blank unit can be used as
temporary storage: the *blank-exchange* manoeuvre moves the weights of a
unit ``i`` into a blank unit ``k`` in three segments

1. copy (b_i, c_i) into unit k while a_k is still zero;
2. move the outgoing weight from unit i to unit k (both units compute the
   same hidden activation, so only their sum matters);
3. zero (b_i, c_i) now that a_i is zero.

Every segment either changes only weights that multiply a zero outgoing
weight, or changes only outgoing weights and the output bias, in which case
the network output is linear along the segment.  Chaining manoeuvres gives
unit negations and transpositions, and hence a path to the canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .canonical import CanonicalisationRecord, canonicalise
from .core import (
    DEFAULT_TOL,
    Parameter,
    ToleranceConfig,
    evaluate_batch,
    sample_inputs,
)
from .errors import DiscreteClassError, EquivalenceError, PreconditionError, ShapeError
from .reducibility import Witness, reduce_in_place

__all__ = [
    "PiecewiseLinearPath",
    "PathVerificationReport",
    "PRUNE_EPS",
    "blank_exchange_path",
    "negation_path",
    "transposition_path",
    "reduction_subpath",
    "path_to_canonical",
    "connect",
    "seven_segment_path",
    "verify_path",
]

PRUNE_EPS = 1e-15


def _close(w: Parameter, w2: Parameter, eps: float) -> bool:
    return bool(np.max(np.abs(w.flatten() - w2.flatten()), initial=0.0) <= eps)


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Sequence of waypoints joined by straight segments in parameter space."""

    waypoints: tuple[Parameter, ...]

    def __post_init__(self):
        waypoints = tuple(self.waypoints)
        if not waypoints:
            raise ValueError("a path needs at least one waypoint")
        shape = waypoints[0].shape
        for wp in waypoints[1:]:
            if wp.shape != shape:
                raise ShapeError(f"waypoint shapes differ: {shape} vs {wp.shape}")
        object.__setattr__(self, "waypoints", waypoints)

    @property
    def segment_count(self) -> int:
        return len(self.waypoints) - 1

    @property
    def start(self) -> Parameter:
        return self.waypoints[0]

    @property
    def end(self) -> Parameter:
        return self.waypoints[-1]

    def point(self, segment: int, t: float) -> Parameter:
        w0, w1 = self.waypoints[segment], self.waypoints[segment + 1]
        flat = (1.0 - t) * w0.flatten() + t * w1.flatten()
        return Parameter.from_flat(w0.shape, flat)

    def reversed(self) -> PiecewiseLinearPath:
        return PiecewiseLinearPath(self.waypoints[::-1])

    def then(self, other: PiecewiseLinearPath) -> PiecewiseLinearPath:
        """Concatenate; a shared join point is kept once."""
        rest = other.waypoints
        if self.end == other.start:
            rest = rest[1:]
        return PiecewiseLinearPath(self.waypoints + rest)

    def pruned(self, eps: float = PRUNE_EPS) -> PiecewiseLinearPath:
        """Drop zero-length segments.  The two endpoints are kept bit-exact."""
        first, last = self.waypoints[0], self.waypoints[-1]
        kept = [first]
        for wp in self.waypoints[1:-1]:
            if not _close(kept[-1], wp, eps):
                kept.append(wp)
        if len(self.waypoints) > 1:
            if len(kept) > 1 and _close(kept[-1], last, eps):
                kept[-1] = last
            elif not (len(kept) == 1 and last == first):
                kept.append(last)
        return PiecewiseLinearPath(tuple(kept))


def _build(w: Parameter, a=None, b=None, c=None, d=None) -> Parameter:
    return Parameter(
        w.a if a is None else a,
        w.b if b is None else b,
        w.c if c is None else c,
        w.d if d is None else d,
    )


def _finish(waypoints: Sequence[Parameter], prune: bool) -> PiecewiseLinearPath:
    path = PiecewiseLinearPath(tuple(waypoints))
    return path.pruned() if prune else path


def _check_index(w: Parameter, *indices: int) -> None:
    for k in indices:
        if not 0 <= k < w.h:
            raise IndexError(f"unit index {k} out of range for h={w.h}")


def _blank_exchange_waypoints(w: Parameter, i: int, k: int, negate: bool) -> list[Parameter]:
    s = -1.0 if negate else 1.0
    a, b, c, d = w.arrays()
    b[k], c[k] = s * b[i], s * c[i]
    w1 = Parameter(a.copy(), b.copy(), c.copy(), d)
    a[k], a[i] = s * a[i], 0.0
    w2 = Parameter(a.copy(), b.copy(), c.copy(), d)
    b[i], c[i] = 0.0, 0.0
    w3 = Parameter(a, b, c, d)
    return [w, w1, w2, w3]


def blank_exchange_path(
    w: Parameter,
    i: int,
    k: int,
    negate: bool = False,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
) -> PiecewiseLinearPath:
    """Three-segment move of unit ``i`` into blank unit ``k`` (negated if asked).

    At the end unit ``i`` is blank and unit ``k`` holds ``±(a_i, b_i, c_i)``.
    """
    _check_index(w, i, k)
    if i == k:
        raise ValueError("blank-exchange needs two distinct units")
    if not w.is_blank(k, tol.weight_tol):
        raise PreconditionError(f"unit {k} is not blank")
    return _finish(_blank_exchange_waypoints(w, i, k, negate), prune)


def _lowest_blank(w: Parameter, exclude: Sequence[int], tol: ToleranceConfig) -> int:
    for k in range(w.h):
        if k not in exclude and w.is_blank(k, tol.weight_tol):
            return k
    raise PreconditionError("no blank unit available for temporary storage")


def negation_path(
    w: Parameter,
    i: int,
    k: int | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
) -> PiecewiseLinearPath:
    """Six-segment path negating unit ``i`` by way of blank unit ``k``."""
    _check_index(w, i)
    if k is None:
        k = _lowest_blank(w, [i], tol)
    there = blank_exchange_path(w, i, k, False, tol, prune=False)
    back = blank_exchange_path(there.end, k, i, True, tol, prune=False)
    return _finish(there.then(back).waypoints, prune)


def transposition_path(
    w: Parameter,
    i: int,
    j: int,
    k: int | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
) -> PiecewiseLinearPath:
    """Path swapping units ``i`` and ``j``.

    Three segments if one side is blank, nine (via blank unit ``k``) if
    neither is, and no segments if both are blank.
    """
    _check_index(w, i, j)
    if i == j:
        raise ValueError("transposition needs two distinct units")
    eps = tol.weight_tol
    i_blank, j_blank = w.is_blank(i, eps), w.is_blank(j, eps)
    if i_blank and j_blank:
        return PiecewiseLinearPath((w,))
    if j_blank:
        return blank_exchange_path(w, i, j, False, tol, prune)
    if i_blank:
        return blank_exchange_path(w, j, i, False, tol, prune)
    if k is None:
        k = _lowest_blank(w, [i, j], tol)
    path = blank_exchange_path(w, i, k, False, tol, prune=False)
    path = path.then(blank_exchange_path(path.end, j, i, False, tol, prune=False))
    path = path.then(blank_exchange_path(path.end, k, j, False, tol, prune=False))
    return _finish(path.waypoints, prune)


def reduction_subpath(
    w: Parameter,
    witness: Witness,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
) -> PiecewiseLinearPath:
    """Path realising one zeroing reduction step.

    Condition i takes one segment (zero the incoming weights and bias).  The
    other conditions take two: first move the outgoing weight of unit ``i``
    into the output bias or the partner unit, then zero its incoming
    weights and bias.  The endpoint is exactly ``reduce_in_place``'s result.
    """
    end, _ = reduce_in_place(w, witness, frozenset(), tol)
    if witness.condition == "i":
        return _finish([w, end], prune)
    i = witness.i
    b, c = end.b.copy(), end.c.copy()
    b[i], c[i] = w.b[i], w.c[i]
    mid = _build(end, b=b, c=c)
    return _finish([w, mid, end], prune)


def _permutation_swaps(perm: Sequence[int]) -> list[tuple[int, int]]:
    """Position swaps turning arrangement ``range(h)`` into ``perm``.

    Position ``p`` must end up holding the unit that started at ``perm[p]``.
    Positions are fixed in increasing order, which walks each cycle from its
    smallest position.
    """
    at = list(range(len(perm)))
    where = list(range(len(perm)))
    swaps = []
    for p, unit in enumerate(perm):
        q = where[unit]
        if q != p:
            swaps.append((p, q))
            at[p], at[q] = at[q], at[p]
            where[at[p]], where[at[q]] = p, q
    return swaps


def path_to_canonical(
    w: Parameter,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
    record: CanonicalisationRecord | None = None,
) -> PiecewiseLinearPath:
    """Path from reducible ``w`` to its canonical form, following each stage.

    Raises DiscreteClassError for irreducible ``w``.
    """
    if record is None:
        record = canonicalise(w, tol)
    if record.rank == w.h:
        raise DiscreteClassError()
    path = PiecewiseLinearPath((w,))
    for step in record.reduction.steps:
        path = path.then(reduction_subpath(path.end, step, tol, prune=False))
    for k, s in enumerate(record.signs):
        if s < 0:
            path = path.then(negation_path(path.end, k, tol=tol, prune=False))
    for p, q in _permutation_swaps(record.permutation):
        path = path.then(transposition_path(path.end, p, q, tol=tol, prune=False))
    if not path.end == record.canonical:
        raise RuntimeError("path construction did not reach the canonical form")
    path = PiecewiseLinearPath(path.waypoints[:-1] + (record.canonical,))
    return path.pruned() if prune else path


def _canonical_match(rec: CanonicalisationRecord, rec2: CanonicalisationRecord, tol: ToleranceConfig) -> bool:
    v, v2 = rec.canonical, rec2.canonical
    return bool(np.max(np.abs(v.flatten() - v2.flatten()), initial=0.0) <= tol.weight_tol)


def connect(w: Parameter, w2: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> PiecewiseLinearPath:
    """Path from ``w`` to ``w2`` through their shared canonical form."""
    if w.shape != w2.shape:
        raise ShapeError(f"shapes differ: {w.shape} vs {w2.shape}")
    if w == w2:
        return PiecewiseLinearPath((w,))
    rec, rec2 = canonicalise(w, tol), canonicalise(w2, tol)
    if not _canonical_match(rec, rec2, tol):
        raise EquivalenceError("parameters are not functionally equivalent")
    if rec.rank == w.h:
        if w.allclose(w2, tol.weight_tol):
            return PiecewiseLinearPath((w, w2))
        raise DiscreteClassError()
    there = path_to_canonical(w, tol, record=rec)
    back = path_to_canonical(w2, tol, record=rec2).reversed()
    return there.then(back).pruned()


def seven_segment_path(
    w: Parameter,
    w2: Parameter,
    tol: ToleranceConfig = DEFAULT_TOL,
    prune: bool = True,
) -> PiecewiseLinearPath:
    """At most seven segments from ``w`` to ``w2`` when rank(w) <= h / 2.

    Waypoints:

    1. outgoing weights and output bias jump to their reduced values;
    2. blank units drop their incoming weights, except selected storage
       units (blank on both sides) which load copies of the live units
       that are also live on the far side;
    3. those live units hand their outgoing weights to the storage units;
    4. units live on the far side load their reduced incoming weights;
    5. outgoing weights and output bias move to the far side's reduced
       values, reassigning every live unit to its counterpart;
    6. units blank on the far side load the target's incoming weights;
    7. outgoing weights and output bias jump to the target's values.
    """
    if w.shape != w2.shape:
        raise ShapeError(f"shapes differ: {w.shape} vs {w2.shape}")
    if w == w2:
        return PiecewiseLinearPath((w,))
    rec, rec2 = canonicalise(w, tol), canonicalise(w2, tol)
    if not _canonical_match(rec, rec2, tol):
        raise EquivalenceError("parameters are not functionally equivalent")
    h, r = w.h, rec.rank
    if 2 * r > h:
        raise PreconditionError(f"rank {r} exceeds h/2 = {h / 2:g}")
    if rec2.rank != r:
        raise PreconditionError(f"ranks differ under tolerance: {r} vs {rec2.rank}")

    u, u2 = rec.reduction.parameter, rec2.reduction.parameter
    Z, Z2 = rec.zeroed, rec2.zeroed
    live, live2 = set(range(h)) - Z, set(range(h)) - Z2
    shared = sorted(live & live2)
    pool = sorted(Z & Z2)
    if len(pool) < len(shared):
        raise RuntimeError(
            f"storage assignment impossible: {len(shared)} shared live units, {len(pool)} shared blanks"
        )
    storage = dict(zip(shared, pool))
    _check_correspondence(rec, rec2, tol)

    a, b, c, d = w.arrays()
    a, d = u.a.copy(), u.d.copy()
    w1 = Parameter(a, b, c, d)

    b, c = b.copy(), c.copy()
    for j in Z:
        b[j], c[j] = 0.0, 0.0
    for i, j in storage.items():
        b[j], c[j] = u.b[i], u.c[i]
    w2_ = Parameter(a, b, c, d)

    a = a.copy()
    for i, j in storage.items():
        a[j], a[i] = u.a[i], 0.0
    w3 = Parameter(a, b, c, d)

    b, c = b.copy(), c.copy()
    for i in live2:
        b[i], c[i] = u2.b[i], u2.c[i]
    w4 = Parameter(a, b, c, d)

    a, d = u2.a.copy(), u2.d.copy()
    w5 = Parameter(a, b, c, d)

    b, c = b.copy(), c.copy()
    for i in Z2:
        b[i], c[i] = w2.b[i], w2.c[i]
    w6 = Parameter(a, b, c, d)

    return _finish([w, w1, w2_, w3, w4, w5, w6, w2], prune)


def _check_correspondence(rec: CanonicalisationRecord, rec2: CanonicalisationRecord, tol: ToleranceConfig) -> None:
    """Each live unit of one reduced form must be a signed copy of one on the other side."""
    u, u2 = rec.reduction.parameter, rec2.reduction.parameter
    eps = tol.weight_tol
    for p in range(rec.rank):
        k, k2 = rec.permutation[p], rec2.permutation[p]
        s = rec.signs[k] * rec2.signs[k2]
        ok = (
            np.all(np.abs(u2.b[k2] - s * u.b[k]) <= eps)
            and abs(u2.c[k2] - s * u.c[k]) <= eps
            and np.all(np.abs(u2.a[k2] - s * u.a[k]) <= eps)
        )
        if not ok:
            raise RuntimeError(f"units {k} and {k2} do not correspond at canonical position {p}")


@dataclass(frozen=True)
class PathVerificationReport:
    ok: bool
    max_deviation: float
    worst_segment: int | None
    samples_per_segment: int
    segment_deviations: tuple[float, ...] = field(default=())

    def summary(self) -> str:
        verdict = "ok" if self.ok else "FAILED"
        worst = "-" if self.worst_segment is None else str(self.worst_segment)
        return (
            f"{verdict}: segments={len(self.segment_deviations)} "
            f"max_deviation={self.max_deviation:.3e} worst_segment={worst}"
        )


def _t_values(samples_per_segment: int) -> np.ndarray:
    if samples_per_segment < 3:
        raise ValueError("need at least 3 samples per segment (t = 0, 0.5, 1)")
    ts = np.linspace(0.0, 1.0, samples_per_segment)
    if not np.any(ts == 0.5):
        ts = np.sort(np.append(ts, 0.5))
    return ts


def verify_path(
    path: PiecewiseLinearPath,
    reference: Parameter,
    tol: ToleranceConfig = DEFAULT_TOL,
    samples_per_segment: int = 9,
    seed: int = 0,
) -> PathVerificationReport:
    """Sample every segment and compare outputs against ``reference``."""
    if path.start.shape != reference.shape:
        raise ShapeError(f"path shape {path.start.shape} differs from reference {reference.shape}")
    xs = sample_inputs(reference.shape.n, tol, seed)
    target = evaluate_batch(reference, xs)

    def deviation(p: Parameter) -> float:
        return float(np.max(np.abs(evaluate_batch(p, xs) - target)))

    ts = _t_values(samples_per_segment)
    if path.segment_count == 0:
        dev = deviation(path.start)
        return PathVerificationReport(dev <= tol.func_tol, dev, None, len(ts), ())

    per_segment = []
    shape = reference.shape
    flats = [wp.flatten() for wp in path.waypoints]
    for s in range(path.segment_count):
        f0, f1 = flats[s], flats[s + 1]
        worst = max(deviation(Parameter.from_flat(shape, (1.0 - t) * f0 + t * f1)) for t in ts)
        per_segment.append(worst)
    worst_segment = int(np.argmax(per_segment))
    max_dev = per_segment[worst_segment]
    return PathVerificationReport(
        max_dev <= tol.func_tol, max_dev, worst_segment, len(ts), tuple(per_segment)
    )
