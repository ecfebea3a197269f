import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmr.design import delta_bound, design_bounds, index_bounds, regime_check
from qmr.errors import DomainError


def test_index_bound_examples():
    assert index_bounds(1e-3, 0.5, 2.0) == (4, 6)
    assert index_bounds(1e-2, 0.9, 1.2) == (21, 14)
    assert index_bounds(0.05, 0.9, 1.2) == (13, 9)


def test_index_bound_clamp():
    b = design_bounds(0.5, 0.5, 2.0)
    assert b.n1 == 1 and b.n1_clamped
    assert b.beta is None  # eps_loc < gamma1 is violated


def test_delta_bound_examples():
    beta = delta_bound(1e-3, 0.5, 2.0)
    first = 2 * math.log(0.5) / (math.log(1e-3) - math.log(0.5))
    second = 2 * math.log(2) / (3 * math.log(2) - math.log(1e-3))
    assert first == pytest.approx(0.22307, abs=1e-5)
    assert beta == pytest.approx(second, rel=1e-15)
    assert beta == pytest.approx(0.1542521421, abs=1e-10)
    assert delta_bound(1e-300, 0.5, 2.0) < 0.01
    assert delta_bound(1e-3, 1 - 1e-9, 2.0) < 1e-8


def test_input_errors():
    with pytest.raises(DomainError):
        index_bounds(1.5, 0.5, 2.0)
    with pytest.raises(DomainError):
        index_bounds(0.1, 1.5, 2.0)
    with pytest.raises(DomainError):
        index_bounds(0.1, 0.5, 0.9)
    with pytest.raises(DomainError):
        delta_bound(0.6, 0.5, 2.0)
    with pytest.raises(DomainError):
        regime_check(0, 0.5, 0.1, 0.5, 2.0)
    with pytest.raises(DomainError):
        regime_check(3, 1.0, 0.1, 0.5, 2.0)


def test_regime_examples():
    f = regime_check(13, 0.28, 0.05, 0.9, 1.2)
    assert f.thm41 and f.prop41 and f.thm42 and f.thm31
    assert not regime_check(3, 0.5, 0.01, 0.9, 1.2).prop41
    assert regime_check(4, 0.5, 0.01, 0.9, 1.2).prop41


def test_exact_reciprocal_comparisons():
    # 0.1 in binary is slightly above 1/10, so n = 10 satisfies n·δ ≥ 1 exactly
    assert regime_check(10, 0.1, 0.1, 0.5, 2.0).prop43
    assert not regime_check(9, 0.1, 0.1, 0.5, 2.0).prop43
    # 0.25² = 1/16 exactly
    assert regime_check(16, 0.25, 0.1, 0.5, 2.0).prop41
    assert not regime_check(15, 0.25, 0.1, 0.5, 2.0).prop41


def test_thresholds_nondecreasing_as_eps_shrinks():
    for g1, g2 in ((0.5, 2.0), (0.9, 1.2), (0.7, 1.05)):
        prev = (0, 0)
        for eps in np.logspace(-0.1, -12, 80):
            cur = index_bounds(float(eps), g1, g2)
            assert cur[0] >= prev[0] and cur[1] >= prev[1]
            prev = cur


@settings(max_examples=1000, deadline=None)
@given(
    n=st.integers(1, 400),
    delta=st.floats(1e-4, 0.999),
    eps=st.floats(1e-8, 0.99),
    g1=st.floats(0.05, 0.99),
    g2=st.floats(1.01, 5.0),
)
def test_flag_implications(n, delta, eps, g1, g2):
    f = regime_check(n, delta, eps, g1, g2)
    assert not f.thm41 or f.prop41
    assert not f.thm42 or f.prop43
    assert not f.prop41 or f.prop43
    assert not f.cor32 or f.prop43
    assert f.prop44 == f.cor32
