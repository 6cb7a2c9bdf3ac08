"""Unit symmetries, canonicalisation traces and full equivalence classes.

A trace ``(sigma, tau)`` of order ``r`` on ``h`` units describes one way the
units of a parameter can be negated, merged, folded into the output bias and
permuted on the way to the canonical form ``v``:

* ``sigma[i]`` is the relative sign of unit ``i``;
* ``tau[i]`` is the canonical position that unit ``i`` contributes to, or
  ``None`` when the unit is constant and folded into the output bias.

Positions ``0..r-1`` are the live canonical units; every one of them must be
hit.  Positions ``r..h-1`` are blank in ``v``, so units mapped there must
cancel each other out.  The equivalence class of ``v`` is the union over all
traces of the parameters satisfying the trace's block conditions.
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .canonical import canonical_form, canonicalise
from .core import (
    DEFAULT_TOL,
    Parameter,
    Shape,
    ToleranceConfig,
    lex_sign,
    random_parameter,
)
from .errors import CapacityError, ShapeError
from .reducibility import Condition, find_redundancy, rank

__all__ = [
    "Negate",
    "Exchange",
    "UnitTransform",
    "negate_unit",
    "exchange_units",
    "apply_transforms",
    "random_transforms",
    "Trace",
    "count_traces",
    "enumerate_traces",
    "random_trace",
    "canonicalisation_trace",
    "trace_membership",
    "in_class_bruteforce",
    "sample_class_member",
    "pad_blank",
    "generate_instance",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 4


def _check_unit(w: Parameter, i: int) -> None:
    if not 0 <= i < w.h:
        raise IndexError(f"unit index {i} out of range for h={w.h}")


def negate_unit(w: Parameter, i: int) -> Parameter:
    _check_unit(w, i)
    return w.replace_unit(i, a=-w.a[i], b=-w.b[i], c=-w.c[i])


def exchange_units(w: Parameter, i: int, j: int) -> Parameter:
    _check_unit(w, i)
    _check_unit(w, j)
    if i == j:
        raise ValueError("exchange needs two distinct units")
    perm = list(range(w.h))
    perm[i], perm[j] = j, i
    return Parameter(w.a[perm], w.b[perm], w.c[perm], w.d)


@dataclass(frozen=True)
class Negate:
    i: int

    def apply(self, w: Parameter) -> Parameter:
        return negate_unit(w, self.i)


@dataclass(frozen=True)
class Exchange:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("exchange needs two distinct units")

    def apply(self, w: Parameter) -> Parameter:
        return exchange_units(w, self.i, self.j)


UnitTransform = Negate | Exchange


def apply_transforms(w: Parameter, transforms: Sequence[UnitTransform]) -> Parameter:
    for t in transforms:
        w = t.apply(w)
    return w


def random_transforms(h: int, count: int, rng: np.random.Generator) -> list[UnitTransform]:
    """``count`` random negations/exchanges on ``h`` units (exchanges need h >= 2)."""
    out: list[UnitTransform] = []
    if h == 0:
        return out
    for _ in range(count):
        if h >= 2 and rng.random() < 0.5:
            i, j = rng.choice(h, size=2, replace=False)
            out.append(Exchange(int(i), int(j)))
        else:
            out.append(Negate(int(rng.integers(h))))
    return out


# traces


@dataclass(frozen=True)
class Trace:
    sigma: tuple[int, ...]
    tau: tuple[int | None, ...]
    order: int

    def __post_init__(self):
        h = len(self.sigma)
        if len(self.tau) != h:
            raise ValueError("sigma and tau must have the same length")
        if any(s not in (1, -1) for s in self.sigma):
            raise ValueError("sigma entries must be +1 or -1")
        if any(t is not None and not 0 <= t < h for t in self.tau):
            raise ValueError(f"tau values must be None or in 0..{h - 1}")
        if not 0 <= self.order <= h:
            raise ValueError(f"order {self.order} outside 0..{h}")
        missing = set(range(self.order)) - set(self.tau)
        if missing:
            raise ValueError(f"tau misses live positions {sorted(missing)}")

    @property
    def h(self) -> int:
        return len(self.sigma)

    def block(self, label: int | None) -> list[int]:
        """Units mapped to ``label`` (a canonical position, or None for the bias)."""
        return [i for i, t in enumerate(self.tau) if t == label]

    @classmethod
    def identity(cls, h: int, r: int) -> Trace:
        return cls((1,) * h, tuple(range(h)), r)

    def to_dict(self) -> dict:
        return {"sigma": list(self.sigma), "tau": list(self.tau), "order": self.order}


def _covering_maps(h: int, r: int) -> Iterator[tuple[int | None, ...]]:
    labels = (None, *range(h))
    needed = set(range(r))
    for tau in itertools.product(labels, repeat=h):
        if needed.issubset(tau):
            yield tau


def count_traces(h: int, r: int) -> int:
    """Number of traces of order r on h units, by inclusion-exclusion."""
    if not 0 <= r <= h:
        raise ValueError(f"order {r} outside 0..{h}")
    maps = sum((-1) ** k * comb(r, k) * (h + 1 - k) ** h for k in range(r + 1))
    return 2**h * maps


def enumerate_traces(h: int, r: int, fix_bias_signs: bool = False) -> Iterator[Trace]:
    """Every trace of order ``r`` on ``h`` units, each exactly once.

    With ``fix_bias_signs`` the sign of units folded into the bias is pinned
    to +1, since the block conditions ignore it.
    """
    if not 0 <= r <= h:
        raise ValueError(f"order {r} outside 0..{h}")
    for tau in _covering_maps(h, r):
        choices = [(1,) if fix_bias_signs and t is None else (1, -1) for t in tau]
        for sigma in itertools.product(*choices):
            yield Trace(tuple(sigma), tau, r)


def random_trace(h: int, r: int, rng: np.random.Generator) -> Trace:
    if not 0 <= r <= h:
        raise ValueError(f"order {r} outside 0..{h}")
    order = rng.permutation(h)
    tau: list[int | None] = [None] * h
    for p in range(r):
        tau[order[p]] = p
    labels = [None, *range(h)]
    for k in order[r:]:
        tau[k] = labels[int(rng.integers(len(labels)))]
    sigma = tuple(int(s) for s in rng.choice([1, -1], size=h))
    return Trace(sigma, tuple(tau), r)


def canonicalisation_trace(w: Parameter, tol: ToleranceConfig = DEFAULT_TOL) -> Trace:
    """The trace recorded by running canonicalisation on ``w``.

    ``w`` satisfies the block conditions of this trace against its own
    canonical form.
    """
    record = canonicalise(w, tol)
    sigma = tuple(-1 if lex_sign(w.b[k]) < 0 else 1 for k in range(w.h))
    tau: list[int | None] = list(range(w.h))
    for step in record.reduction.steps:
        if step.condition is Condition.II:
            tau[step.i] = None
        elif step.condition.pairwise:
            tau = [step.j if t == step.i else t for t in tau]
    position = {unit: p for p, unit in enumerate(record.permutation)}
    tau = [None if t is None else position[t] for t in tau]
    return Trace(sigma, tuple(tau), record.rank)


def _live_count(canonical: Parameter, tol: ToleranceConfig) -> int:
    return sum(not canonical.is_blank(k, tol.weight_tol) for k in range(canonical.h))


def _close(x: np.ndarray, y: np.ndarray, eps: float) -> bool:
    return bool(np.all(np.abs(x - y) <= eps))


def trace_membership(
    candidate: Parameter,
    canonical: Parameter,
    trace: Trace,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Whether ``candidate`` satisfies every block condition of ``trace``.

    Folded units need zero incoming weights and must restore the canonical
    output bias; each live block must sign-match the canonical unit's
    incoming weights and bias and sum to its outgoing weight; each blank
    block must be internally sign-matched with outgoing weights summing to
    zero.
    """
    if candidate.shape != canonical.shape:
        raise ShapeError(f"shapes differ: {candidate.shape} vs {canonical.shape}")
    if trace.h != canonical.h:
        raise ValueError(f"trace is on {trace.h} units, parameter has {canonical.h}")
    r = _live_count(canonical, tol)
    if trace.order != r:
        raise ValueError(f"trace order {trace.order} does not match canonical rank {r}")

    eps = tol.weight_tol
    sigma = np.array(trace.sigma, dtype=np.float64)
    signed_bc = sigma[:, None] * np.concatenate([candidate.b, candidate.c[:, None]], axis=1)
    signed_a = sigma[:, None] * candidate.a
    canon_bc = np.concatenate([canonical.b, canonical.c[:, None]], axis=1)

    folded = trace.block(None)
    if folded and not np.all(np.abs(candidate.b[folded]) <= eps):
        return False
    bias = candidate.d + candidate.a[folded].T @ np.tanh(candidate.c[folded])
    if not _close(bias, canonical.d, tol.func_tol):
        return False

    for p in range(canonical.h):
        members = trace.block(p)
        if p < r:
            if not members:
                return False
            if not _close(signed_bc[members], canon_bc[p], eps):
                return False
            if not _close(signed_a[members].sum(axis=0), canonical.a[p], eps):
                return False
        elif members:
            if not _close(signed_bc[members], signed_bc[members[0]], eps):
                return False
            if not _close(signed_a[members].sum(axis=0), 0.0, eps):
                return False
    return True


def in_class_bruteforce(
    candidate: Parameter,
    w: Parameter,
    tol: ToleranceConfig = DEFAULT_TOL,
    cap: int = ENUMERATION_CAP,
) -> bool:
    """Membership of ``candidate`` in the class of ``w`` by trying every trace."""
    if candidate.shape != w.shape:
        raise ShapeError(f"shapes differ: {candidate.shape} vs {w.shape}")
    if w.h > cap:
        raise CapacityError(f"h={w.h} exceeds the trace enumeration cap of {cap}")
    canonical = canonical_form(w, tol)
    r = rank(w, tol)
    return any(
        trace_membership(candidate, canonical, trace, tol)
        for trace in enumerate_traces(w.h, r)
    )


def sample_class_member(
    canonical: Parameter,
    trace: Trace,
    seed: int | np.random.Generator,
    spread: float = 1.0,
) -> Parameter:
    """Random parameter satisfying exactly the block conditions of ``trace``.

    Free values are drawn uniformly from ``[-2 spread, 2 spread]``; one
    outgoing weight per block (or the output bias, for folded units) is then
    solved so that the block sums come out right.  With ``spread=0`` and the
    identity trace this returns ``canonical`` itself.
    """
    if trace.h != canonical.h:
        raise ValueError(f"trace is on {trace.h} units, parameter has {canonical.h}")
    r = trace.order
    live = _live_count(canonical, DEFAULT_TOL)
    if r != live:
        raise ValueError(f"trace order {r} does not match canonical rank {live}")
    rng = np.random.default_rng(seed)
    shape = canonical.shape

    def draw(*size):
        return spread * rng.uniform(-2.0, 2.0, size=size)

    a = np.zeros((shape.h, shape.m))
    b = np.zeros((shape.h, shape.n))
    c = np.zeros(shape.h)
    sigma = trace.sigma

    for p in range(shape.h):
        members = trace.block(p)
        if not members:
            if p < r:
                raise ValueError(f"trace leaves live canonical unit {p} without units")
            continue
        if p < r:
            bc_b, bc_c, total = canonical.b[p], canonical.c[p], canonical.a[p]
        else:
            bc_b, bc_c, total = draw(shape.n), float(draw()), np.zeros(shape.m)
        partial = np.zeros(shape.m)
        for i in members[:-1]:
            a[i] = draw(shape.m)
            partial += sigma[i] * a[i]
        last = members[-1]
        a[last] = sigma[last] * (total - partial)
        for i in members:
            b[i] = sigma[i] * bc_b
            c[i] = sigma[i] * bc_c

    folded = trace.block(None)
    for i in folded:
        a[i] = draw(shape.m)
        c[i] = float(draw())
    d = canonical.d - a[folded].T @ np.tanh(c[folded])
    return Parameter(a, b, c, d)


def pad_blank(w: Parameter, h: int) -> Parameter:
    """Append blank units to ``w`` until it has ``h`` units."""
    if h < w.h:
        raise ValueError(f"cannot pad {w.h} units down to {h}")
    extra = h - w.h
    return Parameter(
        np.vstack([w.a, np.zeros((extra, w.shape.m))]),
        np.vstack([w.b, np.zeros((extra, w.shape.n))]),
        np.concatenate([w.c, np.zeros(extra)]),
        w.d,
    )


def generate_instance(
    shape: Shape,
    target_rank: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_attempts: int = 100,
) -> Parameter:
    """Random parameter of the given shape whose rank is exactly ``target_rank``.

    An irreducible core with ``target_rank`` units is canonicalised inside
    ``shape`` and a random member of its class is drawn along a random trace.
    """
    if not 0 <= target_rank <= shape.h:
        raise ValueError(f"rank {target_rank} outside 0..{shape.h}")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        core = random_parameter(shape.with_h(target_rank), int(rng.integers(2**63)))
        if find_redundancy(core, tol=tol) is not None:
            continue
        canonical = canonical_form(pad_blank(core, shape.h), tol)
        trace = random_trace(shape.h, target_rank, rng)
        member = sample_class_member(canonical, trace, rng)
        if rank(member, tol) == target_rank:
            return member
    raise RuntimeError(f"no rank-{target_rank} instance found in {max_attempts} attempts")
