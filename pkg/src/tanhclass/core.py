"""Parameters of single-hidden-layer tanh networks and basic operations on them.

A parameter with ``n`` inputs, ``m`` outputs and ``h`` hidden units computes

    f(x) = d + sum_i a_i * tanh(b_i . x + c_i)

where ``a_i`` (length m) is the outgoing weight vector of unit ``i``, ``b_i``
(length n) its incoming weight vector and ``c_i`` its bias.  Units are indexed
from 0 throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ShapeError

__all__ = [
    "Shape",
    "Unit",
    "Parameter",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "evaluate",
    "evaluate_batch",
    "sample_inputs",
    "max_deviation",
    "functions_equal",
    "interpolate",
    "lex_compare",
    "lex_sign",
    "random_parameter",
    "plant_redundancy",
]


@dataclass(frozen=True)
class Shape:
    n: int
    m: int
    h: int

    def __post_init__(self):
        for name in ("n", "m", "h"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ShapeError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n < 1 or self.m < 1 or self.h < 0:
            raise ShapeError(f"invalid shape n={self.n}, m={self.m}, h={self.h}")

    @property
    def size(self) -> int:
        """Length of the flattened parameter vector, (n + m + 1) h + m."""
        return (self.n + self.m + 1) * self.h + self.m

    def with_h(self, h: int) -> Shape:
        return Shape(self.n, self.m, h)


class Unit(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    c: float


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances for every approximate comparison in the package.

    ``weight_tol`` applies to comparisons between weights, ``func_tol`` to
    comparisons between network outputs.  Function comparisons sample
    ``sample_count`` inputs from the cube ``[-sample_radius, sample_radius]^n``.
    """

    weight_tol: float = 1e-9
    func_tol: float = 1e-7
    sample_count: int = 128
    sample_radius: float = 5.0

    def __post_init__(self):
        if self.weight_tol < 0 or self.func_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not self.sample_radius > 0:
            raise ValueError("sample_radius must be positive")


DEFAULT_TOL = ToleranceConfig()


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Parameter:
    """Immutable network parameter stored as stacked per-unit arrays.

    ``a`` has shape (h, m), ``b`` shape (h, n), ``c`` shape (h,) and ``d``
    shape (m,).  Row ``i`` of ``a``, ``b``, ``c`` is hidden unit ``i``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise ShapeError(f"d must be a non-empty vector, got shape {d.shape}")
        a = np.array(self.a, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64)
        c = np.array(self.c, dtype=np.float64)
        if a.size == 0 and a.ndim < 2:
            a = a.reshape(0, d.size)
        if a.ndim != 2 or b.ndim != 2 or c.ndim != 1:
            raise ShapeError(
                f"expected a (h, m), b (h, n), c (h,); got {a.shape}, {b.shape}, {c.shape}"
            )
        h = a.shape[0]
        if b.shape[0] != h or c.shape[0] != h:
            raise ShapeError(f"unit count mismatch: a {a.shape}, b {b.shape}, c {c.shape}")
        if a.shape[1] != d.size:
            raise ShapeError(f"outgoing weights have length {a.shape[1]}, output bias {d.size}")
        if b.shape[1] < 1:
            raise ShapeError("incoming weight vectors must be non-empty")
        for name, array in (("a", a), ("b", b), ("c", c), ("d", d)):
            if not np.all(np.isfinite(array)):
                raise ValueError(f"parameter component {name} is not finite")
            object.__setattr__(self, name, _frozen(array))

    # construction helpers

    @classmethod
    def from_units(
        cls,
        units: Iterable[tuple],
        d: float | Sequence[float],
        n: int | None = None,
    ) -> Parameter:
        """Build a parameter from ``(a, b, c)`` triples.

        Scalars are accepted for ``a``, ``b`` and ``d`` when the corresponding
        dimension is 1.  ``n`` is needed only when ``units`` is empty.
        """
        d = np.atleast_1d(np.asarray(d, dtype=np.float64))
        rows = [(np.atleast_1d(np.asarray(a, float)), np.atleast_1d(np.asarray(b, float)), float(c))
                for a, b, c in units]
        if not rows:
            if n is None:
                n = 1
            return cls(np.zeros((0, d.size)), np.zeros((0, n)), np.zeros(0), d)
        return cls(
            np.stack([r[0] for r in rows]),
            np.stack([r[1] for r in rows]),
            np.array([r[2] for r in rows]),
            d,
        )

    @classmethod
    def blank(cls, shape: Shape) -> Parameter:
        return cls(
            np.zeros((shape.h, shape.m)),
            np.zeros((shape.h, shape.n)),
            np.zeros(shape.h),
            np.zeros(shape.m),
        )

    @classmethod
    def from_flat(cls, shape: Shape, vector: np.ndarray) -> Parameter:
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (shape.size,):
            raise ShapeError(f"flat vector has shape {vector.shape}, expected ({shape.size},)")
        n, m, h = shape.n, shape.m, shape.h
        units = vector[: (n + m + 1) * h].reshape(h, n + m + 1)
        return cls(units[:, :m], units[:, m : m + n], units[:, m + n], vector[(n + m + 1) * h :])

    # views

    @property
    def shape(self) -> Shape:
        return Shape(self.b.shape[1], self.d.size, self.a.shape[0])

    @property
    def h(self) -> int:
        return self.a.shape[0]

    @property
    def units(self) -> tuple[Unit, ...]:
        return tuple(self.unit(i) for i in range(self.h))

    def unit(self, i: int) -> Unit:
        return Unit(self.a[i], self.b[i], float(self.c[i]))

    def is_blank(self, i: int, tol: float = 0.0) -> bool:
        """True if unit ``i`` has all-zero weights and bias (within ``tol``)."""
        return (
            np.all(np.abs(self.a[i]) <= tol)
            and np.all(np.abs(self.b[i]) <= tol)
            and abs(self.c[i]) <= tol
        )

    def flatten(self) -> np.ndarray:
        """Flat vector in the order (a_0, b_0, c_0, ..., a_{h-1}, b_{h-1}, c_{h-1}, d)."""
        units = np.concatenate([self.a, self.b, self.c[:, None]], axis=1)
        return np.concatenate([units.ravel(), self.d])

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Writable copies of (a, b, c, d)."""
        return self.a.copy(), self.b.copy(), self.c.copy(), self.d.copy()

    def replace_unit(self, i: int, a=None, b=None, c=None) -> Parameter:
        if not 0 <= i < self.h:
            raise IndexError(f"unit index {i} out of range for h={self.h}")
        A, B, C, d = self.arrays()
        if a is not None:
            A[i] = a
        if b is not None:
            B[i] = b
        if c is not None:
            C[i] = c
        return Parameter(A, B, C, d)

    # comparisons

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Parameter):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.d, other.d)
        )

    __hash__ = None

    def allclose(self, other: Parameter, atol: float) -> bool:
        """Componentwise absolute comparison; False for differing shapes."""
        if self.shape != other.shape:
            return False
        return bool(np.max(np.abs(self.flatten() - other.flatten()), initial=0.0) <= atol)

    def __repr__(self) -> str:
        units = ", ".join(
            f"({_fmt(u.a)}, {_fmt(u.b)}, {u.c:.6g})" for u in self.units
        )
        return f"Parameter(units=[{units}], d={_fmt(self.d)})"


def _fmt(v: np.ndarray) -> str:
    if v.size == 1:
        return f"{v[0]:.6g}"
    return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"


def evaluate_batch(w: Parameter, xs: np.ndarray) -> np.ndarray:
    """Evaluate ``w`` on the rows of ``xs`` (shape (k, n)); returns (k, m)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != w.shape.n:
        raise ShapeError(f"inputs of shape {xs.shape} do not match n={w.shape.n}")
    return w.d + np.tanh(xs @ w.b.T + w.c) @ w.a


def evaluate(w: Parameter, x) -> np.ndarray:
    """Network output f_w(x) for a single input vector of length n."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.size != w.shape.n:
        raise ShapeError(f"input of length {x.size} does not match n={w.shape.n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input is not finite")
    return evaluate_batch(w, x[None, :])[0]


def sample_inputs(n: int, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton inputs in ``[-radius, radius]^n``.

    Every second point is shrunk towards the origin by a factor of 5 so that
    half the sample sits where tanh is far from saturation.
    """
    sampler = qmc.Halton(d=n, scramble=True, seed=np.random.default_rng(seed))
    xs = (2.0 * sampler.random(tol.sample_count) - 1.0) * tol.sample_radius
    xs[1::2] *= 0.2
    return xs


def _check_io_dims(w: Parameter, w2: Parameter) -> None:
    if w.shape.n != w2.shape.n or w.shape.m != w2.shape.m:
        raise ShapeError(f"input/output dimensions differ: {w.shape} vs {w2.shape}")


def max_deviation(w: Parameter, w2: Parameter, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> float:
    """Largest max-norm output difference over the sampled inputs."""
    _check_io_dims(w, w2)
    xs = sample_inputs(w.shape.n, tol, seed)
    return float(np.max(np.abs(evaluate_batch(w, xs) - evaluate_batch(w2, xs))))


def functions_equal(w: Parameter, w2: Parameter, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> bool:
    """Sampled surrogate for f_w == f_w2.  Hidden-unit counts may differ."""
    return max_deviation(w, w2, tol, seed) <= tol.func_tol


def interpolate(w0: Parameter, w1: Parameter, t: float) -> Parameter:
    """Point ``(1 - t) w0 + t w1`` on the segment between two parameters."""
    if w0.shape != w1.shape:
        raise ShapeError(f"cannot interpolate between {w0.shape} and {w1.shape}")
    flat = (1.0 - t) * w0.flatten() + t * w1.flatten()
    return Parameter.from_flat(w0.shape, flat)


def lex_compare(u, v) -> int:
    """Lexicographic comparison: -1 if u < v, 0 if equal, +1 if u > v."""
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    if u.shape != v.shape:
        raise ShapeError(f"cannot compare vectors of shapes {u.shape} and {v.shape}")
    differ = np.flatnonzero(u != v)
    if differ.size == 0:
        return 0
    k = differ[0]
    return -1 if u[k] < v[k] else 1


def lex_sign(v) -> int:
    """Sign of the first nonzero component of ``v`` (0 for the zero vector)."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    return lex_compare(v, np.zeros_like(v))


def random_parameter(shape: Shape, seed: int) -> Parameter:
    """Pseudo-random parameter with all components uniform in [-2, 2]."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(-2.0, 2.0, size=(shape.h, shape.m))
    b = rng.uniform(-2.0, 2.0, size=(shape.h, shape.n))
    c = rng.uniform(-2.0, 2.0, size=shape.h)
    d = rng.uniform(-2.0, 2.0, size=shape.m)
    return Parameter(a, b, c, d)


def plant_redundancy(w: Parameter, condition: str, units: Sequence[int]) -> Parameter:
    """Edit ``w`` so that reducibility condition ``condition`` holds exactly.

    ``condition`` is one of "i", "ii", "iii", "iv".  Conditions i and ii take
    one unit index: i zeroes its outgoing weights, ii its incoming weights.
    Conditions iii and iv take two indices ``(i, j)``: iii copies (b_j, c_j)
    into unit i, iv writes (-b_i, -c_i) into unit j.
    """
    condition = str(getattr(condition, "value", condition))
    units = [int(k) for k in units]
    expected = {"i": 1, "ii": 1, "iii": 2, "iv": 2}
    if condition not in expected:
        raise ValueError(f"unknown reducibility condition {condition!r}")
    if len(units) != expected[condition]:
        raise IndexError(f"condition {condition} needs {expected[condition]} unit indices")
    for k in units:
        if not 0 <= k < w.h:
            raise IndexError(f"unit index {k} out of range for h={w.h}")
    if len(units) == 2 and units[0] == units[1]:
        raise IndexError("condition needs two distinct units")

    a, b, c, d = w.arrays()
    if condition == "i":
        a[units[0]] = 0.0
    elif condition == "ii":
        b[units[0]] = 0.0
    elif condition == "iii":
        i, j = units
        b[i], c[i] = b[j], c[j]
    else:
        i, j = units
        b[j], c[j] = -b[i], -c[i]
    return Parameter(a, b, c, d)
