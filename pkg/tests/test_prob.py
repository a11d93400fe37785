import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from localmix.errors import DegenerateConditioningError, InvalidInputError
from localmix.prob import (apply, as_dist, as_stochastic, condition, dirac, is_stochastic, l1_distance,
                           leaves_invariant, mass, matrix_from_csv, matrix_to_csv, shift_matrix, uniform)


def test_condition_on_left_clique_of_dumbbell():
    x = condition(uniform(12), range(6))
    assert np.allclose(x[:6], 1 / 6) and np.allclose(x[6:], 0)


def test_condition_on_empty_mass_fails():
    with pytest.raises(DegenerateConditioningError):
        condition(dirac(0, 3), [1, 2])


def test_plain_l1_is_not_halved():
    assert l1_distance(dirac(0, 2), dirac(1, 2)) == pytest.approx(2.0)


def test_validation():
    with pytest.raises(InvalidInputError):
        as_dist([0.5, 0.6])
    with pytest.raises(InvalidInputError):
        as_dist([1.5, -0.5])
    with pytest.raises(InvalidInputError):
        as_dist([0.5, 0.5], 3)
    with pytest.raises(InvalidInputError):
        as_stochastic([[0.5, 0.5], [0.4, 0.5]])
    assert not is_stochastic(np.ones((2, 3)) / 2)


def test_shift_moves_forward():
    S = shift_matrix(4)
    assert np.array_equal(apply(S, dirac(0, 4)), dirac(1, 4))
    assert leaves_invariant(S, uniform(4))


def test_csv_round_trip():
    P = np.array([[0.1, 0.7], [0.9, 0.3]])
    assert np.array_equal(matrix_from_csv(matrix_to_csv(P)), P)
    assert np.array_equal(matrix_from_csv("2\n0.25,0.75\n"), [0.25, 0.75])
    with pytest.raises(InvalidInputError):
        matrix_from_csv("3\n1,0\n0,1\n")


def _stochastic(raw):
    raw = np.abs(raw) + 1e-3
    return raw / raw.sum(axis=0, keepdims=True)


finite = st.floats(0, 10, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(arrays(float, (5, 5), elements=finite), arrays(float, 5, elements=finite))
def test_apply_keeps_a_distribution(raw, v):
    P = _stochastic(raw)
    x = _stochastic(v[:, None])[:, 0]
    y = apply(P, x)
    assert y.min() >= 0 and y.sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(float, (4, 4), elements=finite), arrays(float, 4, elements=finite), arrays(float, 4, elements=finite))
def test_stochastic_maps_contract_l1(raw, a, b):
    P = _stochastic(raw)
    x, y = _stochastic(a[:, None])[:, 0], _stochastic(b[:, None])[:, 0]
    assert l1_distance(apply(P, x), apply(P, y)) <= l1_distance(x, y) + 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(float, 6, elements=finite), st.sets(st.integers(0, 5), min_size=1))
def test_conditioning_is_supported_on_w(v, W):
    x = _stochastic(v[:, None])[:, 0]
    c = condition(x, sorted(W))
    assert mass(c, sorted(W)) == pytest.approx(1.0)
