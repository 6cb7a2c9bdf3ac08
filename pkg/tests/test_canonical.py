import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P, planted
from tanhclass.canonical import canonical_form, canonicalise, equivalent
from tanhclass.characterisation import (
    apply_transforms,
    exchange_units,
    generate_instance,
    negate_unit,
    random_transforms,
)
from tanhclass.core import Shape, evaluate, functions_equal, lex_compare, lex_sign, random_parameter
from tanhclass.errors import ShapeError
from tanhclass.reducibility import rank


class TestCanonicalise:
    def test_merge_example(self):
        rec = canonicalise(P([(1, 2, 0.5), (1, 2, 0.5)], 0))
        assert rec.canonical == P([(2, 2, 0.5), (0, 0, 0)], 0)
        assert rec.zeroed == {0}
        assert rec.signs == (1, 1)
        assert rec.permutation == (1, 0)

    def test_sign_flip(self):
        assert canonical_form(P([(0.5, -1, 0.3)])) == P([(-0.5, 1, -0.3)])

    def test_sort(self):
        rec = canonicalise(P([(1, 1, 0), (1, 2, 0)]))
        assert rec.canonical == P([(1, 2, 0), (1, 1, 0)])
        assert rec.permutation == (1, 0)

    def test_multidim_lex_sort(self):
        w = P([([1], [0, 3], 0), ([1], [0, -5], 1), ([1], [1, -9], 0)])
        v = canonical_form(w)
        np.testing.assert_array_equal(v.b, [[1, -9], [0, 5], [0, 3]])
        np.testing.assert_array_equal(v.a[:, 0], [1, -1, 1])

    def test_tie_broken_by_decreasing_bias(self):
        v = canonical_form(P([(1, 1, 0.1), (1, 1, 0.7)]))
        np.testing.assert_array_equal(v.c, [0.7, 0.1])

    def test_empty(self):
        w = P([], d=[1.5])
        assert canonical_form(w) == w

    def test_no_negative_zero(self):
        v = canonical_form(P([(0, -0.0, -0.0), (1, -1, 0.0)]))
        flat = v.flatten()
        assert not np.any(np.signbit(flat[flat == 0]))

    @pytest.mark.parametrize("seed", range(40))
    def test_layout_invariants(self, seed):
        rng = np.random.default_rng(seed)
        shape = Shape(int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(0, 7)))
        w = generate_instance(shape, int(rng.integers(0, shape.h + 1)), seed)
        rec = canonicalise(w)
        v, r = rec.canonical, rank(w)
        assert rec.rank == r
        for k in range(v.h):
            if k < r:
                assert lex_sign(v.b[k]) == 1
            else:
                assert v.is_blank(k)
        for k in range(r - 1):
            key = lex_compare(v.b[k], v.b[k + 1])
            assert key > 0 or (key == 0 and v.c[k] >= v.c[k + 1])
        assert sorted(rec.permutation) == list(range(v.h))
        assert functions_equal(w, v)

    def test_idempotent(self):
        for seed in range(50):
            w = planted(Shape(2, 2, 5), seed, plants=seed % 4)
            v = canonical_form(w)
            rec = canonicalise(v)
            assert rec.canonical == v
            assert rec.permutation == tuple(range(v.h))
            assert rec.signs == (1,) * v.h
            assert rec.reduction.parameter == v


class TestEquivalent:
    def test_exchange(self):
        w = random_parameter(Shape(1, 1, 3), 0)
        assert equivalent(w, exchange_units(w, 0, 1))

    def test_negation(self):
        w = random_parameter(Shape(2, 1, 3), 0)
        assert equivalent(w, negate_unit(w, 0))

    def test_shifted_bias(self):
        w = random_parameter(Shape(1, 1, 3), 0)
        a, b, c, d = w.arrays()
        w2 = type(w)(a, b, c, d + 1)
        assert abs(evaluate(w, [0])[0] - evaluate(w2, [0])[0]) == pytest.approx(1.0)
        assert not equivalent(w, w2)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            equivalent(random_parameter(Shape(1, 1, 2), 0), random_parameter(Shape(1, 1, 3), 0))

    def test_consistency_under_transforms(self, rng):
        for seed in range(100):
            shape = Shape(int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 7)))
            w = generate_instance(shape, int(rng.integers(0, shape.h + 1)), seed)
            t = random_transforms(w.h, 10, rng)
            assert canonical_form(w).allclose(canonical_form(apply_transforms(w, t)), 1e-12)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 3),
    m=st.integers(1, 3),
    h=st.integers(0, 5),
    seed=st.integers(0, 2**32 - 1),
    plants=st.integers(0, 4),
)
def test_soundness_property(n, m, h, seed, plants):
    w = planted(Shape(n, m, h), seed, plants)
    v = canonical_form(w)
    assert functions_equal(w, v)
    assert canonical_form(v) == v
