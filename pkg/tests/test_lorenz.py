"""Lorenz-curve tests against closed forms.

Oracles used here, all derivable by hand and independent of the package
code path (which goes through quantile and partial_moment):

  Uniform(a, b):   LC(p) = (2ap + (b-a)p^2) / (a+b), Gini (b-a)/(3(a+b))
  Exponential:     LC(p) = p + (1-p)ln(1-p), Gini 1/2 (rate drops out)
  Pareto(shape a): LC(p) = 1 - (1-p)^(1-1/a), Gini 1/(2a-1)
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdbp.distributions import (
    Constant,
    Empirical,
    Exponential,
    NearDegenerate,
    Pareto,
    Uniform,
)
from rdbp.lorenz import (
    AnalyticLorenz,
    LineOfEquality,
    PerfectInequality,
    PiecewiseLinearLorenz,
    Relation,
    curve_of,
    gini,
    lc_dominates,
    lc_empirical,
    lc_eval,
    lc_inverse,
    lorenz_table,
)

_GRID = np.linspace(0.0, 1.0, 1025)


def _uniform_lc(a, b):
    return lambda p: (2 * a * p + (b - a) * p * p) / (a + b)


def _exponential_lc(p):
    return p + (1.0 - p) * math.log1p(-p) if p < 1.0 else 1.0


def _pareto_lc(shape):
    return lambda p: 1.0 - (1.0 - p) ** (1.0 - 1.0 / shape)


CLOSED_FORMS = [
    (Uniform(0.0, 1.0), lambda p: p * p),
    (Uniform(2.0, 5.0), _uniform_lc(2.0, 5.0)),
    (Exponential(1.0), _exponential_lc),
    (Exponential(0.3), _exponential_lc),
    (Pareto(1.0, 2.0), _pareto_lc(2.0)),
    (Pareto(3.0, 4.0), _pareto_lc(4.0)),
]


@pytest.mark.parametrize("dist,closed", CLOSED_FORMS, ids=lambda x: repr(x))
def test_analytic_curve_matches_closed_form(dist, closed):
    curve = curve_of(dist)
    for p in _GRID:
        assert curve.evaluate(float(p)) == pytest.approx(closed(float(p)),
                                                         abs=1e-12)


@pytest.mark.parametrize("dist", [d for d, _ in CLOSED_FORMS], ids=repr)
def test_curve_shape_invariants(dist):
    vals = curve_of(dist).evaluate_grid(_GRID)
    assert vals[0] == 0.0
    assert vals[-1] == 1.0
    # nondecreasing, convex, and below the diagonal
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all(np.diff(vals, 2) >= -1e-12)
    assert np.all(vals <= _GRID + 1e-12)


GINI_ORACLES = [
    (Uniform(0.0, 1.0), 1.0 / 3.0),
    (Uniform(2.0, 5.0), 3.0 / 21.0),
    (Exponential(1.0), 0.5),
    (Exponential(4.0), 0.5),
    (Pareto(1.0, 2.0), 1.0 / 3.0),
    (Pareto(2.0, 3.5), 1.0 / 6.0),
]


@pytest.mark.parametrize("dist,expected", GINI_ORACLES, ids=lambda x: repr(x))
def test_gini_closed_forms(dist, expected):
    # Trapezoid error at 1025 points is dominated by the curve's endpoint
    # slope (unbounded for Pareto), hence the 2e-5 budget at the default
    # grid; refining the grid must tighten it below 1e-6.
    assert gini(curve_of(dist)) == pytest.approx(expected, abs=2e-5)
    assert gini(curve_of(dist), grid_points=16385) == pytest.approx(
        expected, abs=1e-6)


def test_gini_extremes():
    assert gini(LineOfEquality()) == pytest.approx(0.0, abs=1e-12)
    # grid trapezoid puts half a cell under the final jump
    assert gini(PerfectInequality()) == pytest.approx(1.0, abs=1e-3)


def test_near_degenerate_is_nearly_equal():
    g = gini(curve_of(NearDegenerate(0.5, 1e-3)))
    assert 0.0 < g < 1e-3


def test_constant_curve_is_the_diagonal():
    assert isinstance(curve_of(Constant(2.0)), LineOfEquality)


# -- empirical curves --------------------------------------------------------

def test_empirical_curve_knots_are_exact():
    curve = lc_empirical([4.0, 1.0, 3.0, 2.0])
    # sorted 1,2,3,4, total 10; knots at k/4
    assert curve.evaluate(0.25) == pytest.approx(0.1)
    assert curve.evaluate(0.5) == pytest.approx(0.3)
    assert curve.evaluate(0.75) == pytest.approx(0.6)
    assert curve.evaluate(1.0) == 1.0
    # linear interpolation between knots
    assert curve.evaluate(0.375) == pytest.approx(0.2)


def test_empirical_distribution_uses_its_exact_curve():
    dist = Empirical([1.0, 2.0, 3.0, 4.0])
    a = curve_of(dist)
    b = lc_empirical([1.0, 2.0, 3.0, 4.0])
    ps = np.linspace(0, 1, 101)
    assert np.allclose(a.evaluate_grid(ps), b.evaluate_grid(ps), atol=0)


@given(st.lists(st.floats(0.01, 50.0), min_size=1, max_size=60))
def test_empirical_curve_invariants(sample):
    vals = lc_empirical(sample).evaluate_grid(np.linspace(0, 1, 257))
    assert vals[0] == 0.0
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all(vals <= np.linspace(0, 1, 257) + 1e-9)


def test_empirical_rejects_degenerate_samples():
    with pytest.raises(ValueError):
        lc_empirical([])
    with pytest.raises(ValueError):
        lc_empirical([0.0, 0.0])
    with pytest.raises(ValueError):
        lc_empirical([1.0, -1.0])


# -- inverse -----------------------------------------------------------------

@pytest.mark.parametrize("dist", [Uniform(0.0, 1.0), Exponential(1.0),
                                  Pareto(1.0, 2.0)], ids=repr)
def test_inverse_round_trip(dist):
    curve = curve_of(dist)
    for p in np.arange(0.1, 1.0, 0.1):
        y = lc_eval(curve, float(p))
        assert lc_inverse(curve, y) == pytest.approx(float(p), abs=1e-9)


def test_inverse_at_flat_segment_returns_smallest_p():
    # two zero claims flatten the curve on [0, 2/3]
    curve = lc_empirical([0.0, 0.0, 3.0])
    assert lc_inverse(curve, 0.0) == 0.0
    # just above the flat: the answer leaves the flat's right edge
    assert lc_inverse(curve, 1e-9) == pytest.approx(2.0 / 3.0, abs=1e-6)


def test_inverse_edges():
    curve = curve_of(Uniform(0.0, 1.0))
    assert lc_inverse(curve, 0.0) == 0.0
    assert lc_inverse(curve, 1.0) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        lc_inverse(curve, 1.5)


# -- dominance ---------------------------------------------------------------

def test_uniform_dominates_exponential():
    # p^2 >= p + (1-p)log(1-p) everywhere: uniform claims are more equal
    verdict = lc_dominates(curve_of(Uniform(0.0, 1.0)),
                           curve_of(Exponential(1.0)))
    assert verdict.relation is Relation.DOMINATES
    assert verdict.max_above > 0.09
    assert verdict.max_below >= -1e-12
    assert verdict.witness_below is None


def test_dominated_is_the_mirror():
    verdict = lc_dominates(curve_of(Exponential(1.0)),
                           curve_of(Uniform(0.0, 1.0)))
    assert verdict.relation is Relation.DOMINATED_BY
    assert verdict.witness_above is None


def test_equivalent_curves():
    verdict = lc_dominates(curve_of(Exponential(1.0)),
                           curve_of(Exponential(5.0)))
    assert verdict.relation is Relation.EQUIVALENT


def test_crossing_curves_carry_witnesses():
    a = PiecewiseLinearLorenz(np.array([0.0, 0.5, 1.0]),
                              np.array([0.0, 0.1, 1.0]))
    b = PiecewiseLinearLorenz(np.array([0.0, 0.25, 1.0]),
                              np.array([0.0, 0.0, 1.0]))
    verdict = lc_dominates(a, b)
    assert verdict.relation is Relation.CROSSES
    assert verdict.witness_above is not None
    assert verdict.witness_below is not None
    assert a.evaluate(verdict.witness_above) > b.evaluate(verdict.witness_above)
    assert a.evaluate(verdict.witness_below) < b.evaluate(verdict.witness_below)


def test_line_of_equality_dominates_everything():
    for dist in (Uniform(0.0, 1.0), Exponential(2.0), Pareto(1.0, 3.0),
                 Empirical([1.0, 5.0])):
        verdict = lc_dominates(LineOfEquality(), curve_of(dist))
        assert verdict.relation is Relation.DOMINATES


# -- table output ------------------------------------------------------------

def test_lorenz_table_grid():
    rows = lorenz_table(curve_of(Uniform(0.0, 1.0)), 11)
    assert len(rows) == 11
    ps = [p for p, _ in rows]
    assert ps == pytest.approx(list(np.linspace(0, 1, 11)))
    for p, v in rows:
        assert v == pytest.approx(p * p, abs=1e-12)
