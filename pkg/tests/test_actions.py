"""Action events, windowing, and kernel adapters."""

from fractions import Fraction

import numpy as np
import pytest

from rtiac.actions import (
    OUT_OF_ORDER_TOL,
    SIGMA2_DEFAULT,
    SIGMA2_MAX,
    SIGMA2_MIN,
    ActionEvent,
    ActionWindow,
    EventQueue,
    Features,
    PiecewiseLikelihood,
    continuous_adapter,
    discrete_adapter,
    timed_adapter,
    window_update,
)
from rtiac.belief import BeliefState, bayes_update
from rtiac.langmodel import ConfigurationError


def cursor(t, x, y):
    return ActionEvent(t=t, kind="cursor", x=x, y=y)


def press(t, aid=0):
    return ActionEvent(t=t, kind="press", action_id=aid)


# -- events and features -------------------------------------------------


def test_event_validation():
    with pytest.raises(ValueError):
        ActionEvent(t=0.0, kind="cursor", x=0.5)
    with pytest.raises(ValueError):
        ActionEvent(t=0.0, kind="press")
    with pytest.raises(ValueError):
        ActionEvent(t=0.0, kind="wiggle", x=0.0, y=0.0)


def test_features_hand_oracle():
    w = ActionWindow(events=(
        cursor(0.0, 0.0, 0.0),
        press(0.1, 3),
        cursor(0.2, 0.1, 0.4),
        cursor(0.4, 0.5, 0.2),
    ))
    f = w.features
    assert f is not None
    assert f.mean_pos == pytest.approx((0.2, 0.2))
    assert f.mean_vel == pytest.approx(((0.5 - 0.0) / 0.4, (0.2 - 0.0) / 0.4))
    assert f.last_pos == pytest.approx((0.5, 0.2))
    assert f.n_cursor == 3
    assert f.last_press == 3
    assert f.as_vector().shape == (Features.dim(),)


def test_features_none_without_cursor():
    assert ActionWindow(events=(press(0.0),)).features is None
    assert ActionWindow().features is None


def test_features_single_sample_zero_velocity():
    f = ActionWindow(events=(cursor(1.0, 0.3, 0.7),)).features
    assert f.mean_vel == pytest.approx((0.0, 0.0))


# -- windowing -----------------------------------------------------------


def test_window_evicts_expired():
    w = ActionWindow(horizon=0.5)
    for t in (0.0, 0.2, 0.4, 0.9):
        w = window_update(w, cursor(t, 0.5, 0.5), now=t)
    assert [e.t for e in w.events] == [0.9]  # 0.4 is exactly at the edge


def test_window_repairs_mild_reordering():
    w = ActionWindow(horizon=5.0)
    w = window_update(w, cursor(1.00, 0.1, 0.1), now=1.0)
    w = window_update(w, cursor(0.97, 0.2, 0.2), now=1.0)
    assert [e.t for e in w.events] == [0.97, 1.00]


def test_window_drops_very_late_events():
    w = ActionWindow(horizon=5.0)
    w = window_update(w, cursor(1.0, 0.1, 0.1), now=1.0)
    late = cursor(1.0 - OUT_OF_ORDER_TOL - 0.01, 0.2, 0.2)
    w = window_update(w, late, now=1.0)
    assert [e.t for e in w.events] == [1.0]


def test_window_rejects_future_events():
    with pytest.raises(ValueError):
        window_update(ActionWindow(), cursor(2.0, 0.1, 0.1), now=1.0)


def test_window_none_just_evicts():
    w = ActionWindow(horizon=0.5, events=(cursor(0.0, 0.1, 0.1),
                                          cursor(0.6, 0.2, 0.2)))
    w = window_update(w, None, now=1.0)
    assert [e.t for e in w.events] == [0.6]


# -- queue ---------------------------------------------------------------


def test_queue_overflow_drops_oldest():
    q = EventQueue(capacity=4)
    for t in range(6):
        q.push(cursor(float(t), 0.5, 0.5))
    assert q.dropped == 2
    assert len(q) == 4
    assert [e.t for e in q.drain()] == [2.0, 3.0, 4.0, 5.0]
    assert q.drain() == []


# -- continuous adapter --------------------------------------------------


def test_continuous_adapter_empty_window():
    assert continuous_adapter(ActionWindow()) is None


def test_continuous_adapter_default_trusts_cursor():
    w = ActionWindow(events=(cursor(0.0, 0.2, 0.8), cursor(0.1, 0.4, 0.6)))
    k = continuous_adapter(w)
    assert k is not None
    assert k.center == pytest.approx((0.3, 0.7))
    assert k.variance == SIGMA2_DEFAULT
    assert k.metric == "euclidean"


class StubEstimator:
    def __init__(self, var):
        self.var = var

    def predict(self, features):
        return features.last_pos, self.var


def test_continuous_adapter_clips_estimator_variance():
    w = ActionWindow(events=(cursor(0.0, 0.2, 0.8),))
    hi = continuous_adapter(w, StubEstimator(1e9))
    lo = continuous_adapter(w, StubEstimator(1e-9))
    assert hi.variance == SIGMA2_MAX
    assert lo.variance == SIGMA2_MIN
    assert hi.center == pytest.approx((0.2, 0.8))


# -- timed adapter -------------------------------------------------------


def test_timed_adapter_rolls_back_bias():
    k = timed_adapter(press(1.0), (0.1, 0.5), (0.3, 0.2))
    # center = (0.1 - 0.5 * 0.3) mod 1, variance = (0.5 * 0.2)^2
    assert k.center == pytest.approx([0.95])
    assert k.variance == pytest.approx(0.01)
    assert k.metric == "circular"


def test_timed_adapter_without_scan_is_ignored():
    assert timed_adapter(press(1.0), None, (0.0, 0.1)) is None


def test_timed_adapter_validates_speed():
    with pytest.raises(ValueError):
        timed_adapter(press(1.0), (0.5, 0.0), (0.0, 0.1))


def test_timed_adapter_clips_variance():
    k = timed_adapter(press(1.0), (0.5, 10.0), (0.0, 5.0))
    assert k.variance == SIGMA2_MAX
    k = timed_adapter(press(1.0), (0.5, 1.0), (0.0, 1e-9))
    assert k.variance == SIGMA2_MIN


# -- discrete adapter ----------------------------------------------------


def test_discrete_adapter_column_and_boundary():
    conf = np.array([[0.9, 0.1], [0.2, 0.8]])
    lik = discrete_adapter(press(0.0, aid=0), [0.0, 0.5, 1.0], conf)
    assert isinstance(lik, PiecewiseLikelihood)
    assert lik(0.2) == pytest.approx(0.9)
    assert lik(0.7) == pytest.approx(0.2)
    assert lik(0.5) == pytest.approx(0.2)  # boundary belongs to the right piece
    assert lik([0.1, 0.9]) == pytest.approx([0.9, 0.2])


def test_discrete_adapter_bayes_posterior_oracle():
    # uniform prior halves, press 0 with columns (.9, .2):
    # posterior left mass = 9/20 / (9/20 + 2/20) = 9/11
    conf = np.array([[0.9, 0.1], [0.2, 0.8]])
    lik = discrete_adapter(press(0.0, aid=0), [0.0, 0.5, 1.0], conf)
    b = BeliefState(np.array([0.0, 0.5, 1.0]), np.array([1.0, 1.0]), ("a", "b"))
    out = bayes_update(b, lik.breakpoints, lik.values)
    want = Fraction(9, 20) / (Fraction(9, 20) + Fraction(2, 20))
    assert out.mass_between(0.0, 0.5) == pytest.approx(float(want), abs=1e-12)
    assert float(want) == pytest.approx(0.8181818181818182)


def test_discrete_adapter_validation():
    good_conf = np.array([[0.9, 0.1], [0.2, 0.8]])
    with pytest.raises(ConfigurationError):
        discrete_adapter(press(0.0, 0), [0.1, 0.5, 1.0], good_conf)
    with pytest.raises(ConfigurationError):
        discrete_adapter(press(0.0, 0), [0.0, 0.5, 0.9], good_conf)
    with pytest.raises(ConfigurationError):
        discrete_adapter(press(0.0, 0), [0.0, 0.5, 1.0], np.eye(3))
    with pytest.raises(ConfigurationError):
        discrete_adapter(press(0.0, 0), [0.0, 0.5, 1.0],
                         np.array([[0.9, 0.2], [0.2, 0.8]]))
    with pytest.raises(ConfigurationError):
        discrete_adapter(press(0.0, 5), [0.0, 0.5, 1.0], good_conf)
