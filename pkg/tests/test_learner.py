"""Pointing-model learning: parametric fit, symmetries, KDE, harvesting."""

import math

import numpy as np
import pytest
from scipy.special import digamma

from rtiac.actions import ActionWindow, ActionEvent
from rtiac.learner import (
    FEATURE_DIM,
    KdeEstimator,
    ParametricEstimator,
    ReflectionSymmetry,
    RotationSymmetry,
    TrainingPair,
    anneal,
    fit_parametric,
    linear_anneal_schedule,
    record_pairs,
    symmetry_from_json,
)

A_TRUE = np.array([[0.8, 0.0, 0.05, 0.0, 0.1, 0.0],
                   [0.0, 0.9, 0.0, 0.05, 0.0, 0.1]])
B_TRUE = np.array([0.05, -0.02])


def synth_pairs(n, noise, rng, asym=False):
    feats = rng.uniform(0.0, 1.0, size=(n, FEATURE_DIM))
    targets = feats @ A_TRUE.T + B_TRUE
    if asym:
        targets[:, 1] += 0.3 * feats[:, 0] ** 2
    targets += noise * rng.standard_normal(targets.shape)
    return [TrainingPair(y_final=float(rng.uniform(0, 1)), features=f,
                         display_target=t)
            for f, t in zip(feats, targets)]


def test_training_pair_validation(rng):
    with pytest.raises(ValueError):
        TrainingPair(y_final=1.0, features=np.zeros(6), display_target=np.zeros(2))
    with pytest.raises(ValueError):
        TrainingPair(y_final=0.5, features=np.zeros(5), display_target=np.zeros(2))


# -- parametric fit ------------------------------------------------------


def test_fit_recovers_exact_linear_model(rng):
    est = fit_parametric(synth_pairs(200, 0.0, rng))
    assert np.allclose(est.A, A_TRUE, atol=1e-8)
    assert np.allclose(est.b, B_TRUE, atol=1e-8)


def test_fit_recovers_noisy_model(rng):
    est = fit_parametric(synth_pairs(2000, 0.1, rng))
    assert np.allclose(est.A, A_TRUE, atol=0.05)
    assert np.allclose(est.b, B_TRUE, atol=0.05)


def test_fit_variance_model_unbiased(rng):
    # homoscedastic noise: the variance model should predict sigma^2
    # itself, which requires removing E[log chi^2_2] = digamma(1) + log 2
    # from the intercept.  Evaluate at the feature mean, where the
    # regression is anchored; the intercept alone extrapolates to f=0.
    sigma = 0.1
    pairs = synth_pairs(2000, sigma, rng)
    est = fit_parametric(pairs)
    f_mean = np.mean([p.features for p in pairs], axis=0)
    got = float(est.variance_vector(f_mean))
    assert got == pytest.approx(sigma * sigma, rel=0.1)
    assert abs(digamma(1.0) + math.log(2.0) - 0.1159315) < 1e-6


def test_fit_predict_matches_vector_form(rng):
    est = fit_parametric(synth_pairs(50, 0.01, rng))
    f = rng.uniform(0, 1, FEATURE_DIM)
    w = ActionWindow(events=(ActionEvent(t=0.0, kind="cursor", x=0.1, y=0.2),))
    feats = w.features
    center, var = est.predict(feats)
    assert center == pytest.approx(est.predict_vector(feats.as_vector()))
    assert var == pytest.approx(float(est.variance_vector(feats.as_vector())))
    assert est.predict_vector(f[None, :]).shape == (1, 2)


def test_fit_input_validation(rng):
    pairs = synth_pairs(20, 0.0, rng)
    with pytest.raises(ValueError):
        fit_parametric(pairs, lam=1.5)
    with pytest.raises(ValueError):
        fit_parametric(pairs[:4])


# -- symmetries ----------------------------------------------------------


def mirror_feats(sym, feats):
    return sym.variants(feats, np.zeros((len(feats), 2)))[0][0]


def test_full_weight_reflection_commutes(rng):
    sym = ReflectionSymmetry("vertical")
    est = fit_parametric(synth_pairs(300, 0.02, rng, asym=True), sym, lam=1.0)
    f = rng.uniform(0, 1, size=(10, FEATURE_DIM))
    pred_mirrored = est.predict_vector(mirror_feats(sym, f))
    assert np.allclose(pred_mirrored, sym.apply_point(est.predict_vector(f)),
                       atol=1e-6)


def test_zero_weight_reflection_is_unconstrained(rng):
    pairs = synth_pairs(300, 0.02, rng, asym=True)
    free = fit_parametric(pairs, ReflectionSymmetry("vertical"), lam=0.0)
    plain = fit_parametric(pairs)
    assert np.allclose(free.A, plain.A)


def test_reflection_axes():
    v = ReflectionSymmetry("vertical")
    h = ReflectionSymmetry("horizontal")
    p = np.array([0.2, 0.7])
    assert v.apply_point(p) == pytest.approx((0.2, 0.3))
    assert h.apply_point(p) == pytest.approx((0.8, 0.7))
    assert v.apply_velocity(np.array([0.5, 0.5])) == pytest.approx((0.5, -0.5))
    with pytest.raises(ValueError):
        ReflectionSymmetry("diagonal")


def test_rotation_symmetry_orbit():
    sym = RotationSymmetry(n_fold=4)
    feats = np.zeros((1, FEATURE_DIM))
    feats[0, 0:2] = (0.9, 0.5)
    variants = sym.variants(feats, np.array([[0.9, 0.5]]))
    assert len(variants) == 3
    # quarter turn about (0.5, 0.5): (0.9, 0.5) -> (0.5, 0.9)
    assert variants[0][1][0] == pytest.approx((0.5, 0.9))
    with pytest.raises(ValueError):
        RotationSymmetry(n_fold=1)


def test_symmetry_json_roundtrip():
    for sym in (ReflectionSymmetry("horizontal"), RotationSymmetry(6, (0.4, 0.6))):
        back = symmetry_from_json(sym.to_json())
        assert back == sym
    assert symmetry_from_json(None) is None
    with pytest.raises(ValueError):
        symmetry_from_json({"kind": "translation"})


# -- annealing -----------------------------------------------------------


def test_anneal_schedule_endpoints():
    sched = linear_anneal_schedule(100)
    assert sched(0) == 1.0
    assert sched(50) == 0.5
    assert sched(100) == 0.0
    assert sched(200) == 0.0


def test_anneal_refits_on_large_moves(rng):
    pairs = synth_pairs(300, 0.02, rng, asym=True)
    sym = ReflectionSymmetry("vertical")
    est0 = fit_parametric(pairs, sym, lam=0.0)
    est1 = anneal(est0, lambda t: 1.0, tick=0)
    assert est1.lam == 1.0
    assert not np.allclose(est1.A, est0.A)  # asymmetric data: fit moved
    f = rng.uniform(0, 1, size=(5, FEATURE_DIM))
    assert np.allclose(est1.predict_vector(mirror_feats(sym, f)),
                       sym.apply_point(est1.predict_vector(f)), atol=1e-6)


def test_anneal_small_move_only_records(rng):
    est0 = fit_parametric(synth_pairs(50, 0.02, rng), lam=0.0)
    est1 = anneal(est0, lambda t: 0.04, tick=0)
    assert est1.lam == 0.04
    assert np.array_equal(est1.A, est0.A)


def test_anneal_without_pairs_records_only(rng):
    est0 = fit_parametric(synth_pairs(50, 0.02, rng),
                          ReflectionSymmetry("vertical"), lam=0.0)
    bare = ParametricEstimator.from_json(est0.to_json())
    assert bare.pairs == ()
    est1 = anneal(bare, lambda t: 1.0, tick=0)
    assert est1.lam == 1.0
    assert np.allclose(est1.A, est0.A)


# -- serialization -------------------------------------------------------


def test_parametric_json_roundtrip(rng, tmp_path):
    est = fit_parametric(synth_pairs(50, 0.05, rng),
                         RotationSymmetry(4), lam=0.3)
    est.save(tmp_path / "model.json")
    back = ParametricEstimator.load(tmp_path / "model.json")
    assert np.allclose(back.A, est.A)
    assert np.allclose(back.b, est.b)
    assert np.allclose(back.sigma_w, est.sigma_w)
    assert back.sigma_c == pytest.approx(est.sigma_c)
    assert back.symmetry == est.symmetry
    assert back.lam == pytest.approx(0.3)


def test_parametric_json_rejects_unknown_spec(rng):
    doc = fit_parametric(synth_pairs(50, 0.05, rng)).to_json()
    doc["feature_spec"] = "cursor9-v2"
    with pytest.raises(ValueError):
        ParametricEstimator.from_json(doc)


# -- KDE -----------------------------------------------------------------


def kde_pairs(n, rng, *, correlated=True, uniform_y=False):
    if uniform_y:
        ys = rng.uniform(0.001, 0.999, n)
    else:
        ys = np.clip(rng.normal(0.5, 0.15, n), 0.001, 0.999)
    feats = rng.uniform(0, 1, size=(n, FEATURE_DIM))
    if correlated:
        feats[:, 0] = ys + 0.05 * rng.standard_normal(n)
    return [TrainingPair(y_final=float(y), features=f, display_target=np.zeros(2))
            for y, f in zip(ys, feats)]


def test_kde_bandwidth_formula(rng):
    kde = KdeEstimator()
    pairs = kde_pairs(50, rng)
    kde.add_pairs(pairs)
    data = np.column_stack([[p.y_final for p in pairs],
                            [p.features for p in pairs]])
    d = data.shape[1]
    factor = (4.0 / (d + 2.0)) ** (1.0 / (d + 4.0)) * 50 ** (-1.0 / (d + 4.0))
    assert np.allclose(kde.bandwidths, factor * data.std(axis=0, ddof=1))


def test_kde_single_sample_density(rng):
    kde = KdeEstimator()
    kde.add_pairs(kde_pairs(1, rng))
    y0 = kde._y[0]
    grid, dens = kde.conditional(np.zeros(FEATURE_DIM))
    want = np.exp(-0.5 * ((grid - y0) / 0.1) ** 2)
    want /= want.sum() / len(grid)
    assert np.allclose(dens, want)


def test_kde_conditional_tracks_features(rng):
    kde = KdeEstimator()
    kde.add_pairs(kde_pairs(400, rng))
    lo_f = np.full(FEATURE_DIM, 0.5)
    hi_f = lo_f.copy()
    lo_f[0], hi_f[0] = 0.25, 0.75
    grid, d_lo = kde.conditional(lo_f)
    _, d_hi = kde.conditional(hi_f)
    assert grid[np.argmax(d_lo)] < 0.5 < grid[np.argmax(d_hi)]
    assert d_lo.sum() / len(grid) == pytest.approx(1.0)


def test_kde_reweighted_marginal_is_flat(rng):
    # raw y-marginal is a bump; dividing the joint by it must flatten
    # the implied marginal up to Monte Carlo error
    kde = KdeEstimator()
    kde.add_pairs(kde_pairs(400, rng))
    _, raw = kde.marginal_y()
    assert raw.max() / raw.min() > 1.5
    _, flat = kde.reweighted_marginal(n_draws=4000, rng=np.random.default_rng(3))
    assert np.max(np.abs(flat - 1.0)) < 0.05


def test_kde_average_conditional_flat_when_independent(rng):
    # y uniform so every grid cell is populated; independent features
    # carry no information, so the averaged conditional must be flat
    kde = KdeEstimator()
    kde.add_pairs(kde_pairs(1000, rng, correlated=False, uniform_y=True))
    grid, avg = kde.average_conditional(max_queries=1000)
    assert np.max(np.abs(avg - 1.0)) < 0.05


def test_kde_degenerate_spread_raises():
    kde = KdeEstimator()
    pair = TrainingPair(y_final=0.5, features=np.full(FEATURE_DIM, 0.3),
                        display_target=np.zeros(2))
    with pytest.raises(ValueError):
        kde.add_pairs([pair, pair])


def test_kde_empty_queries_raise():
    kde = KdeEstimator()
    with pytest.raises(ValueError):
        kde.conditional(np.zeros(FEATURE_DIM))
    with pytest.raises(ValueError):
        kde.bandwidths


# -- harvesting from logs ------------------------------------------------


def test_record_pairs_from_logged_session(corpus_model, tmp_path):
    from rtiac.session_log import read_session
    from rtiac.sim import SimulatedUser, run_session

    path = tmp_path / "session.jsonl"
    rec = run_session(corpus_model, "hi", SimulatedUser(), seed=3,
                      log_path=path)
    assert rec.completed
    session = read_session(path)
    pairs = record_pairs(session)
    assert len(pairs) >= 10
    n_feat_ticks = sum(1 for t in session.ticks if t.get("features"))
    assert len(pairs) <= n_feat_ticks
    for p in pairs:
        assert 0.0 <= p.y_final < 1.0
        assert p.features.shape == (FEATURE_DIM,)
        assert 0.0 <= p.display_target[0] <= 1.0
        assert p.display_target[0] >= 0.5  # linear frame: x = 1 - q/2
        assert p.session == session.name
    # enough to refit a pointing model end to end
    est = fit_parametric(pairs)
    assert np.all(np.isfinite(est.A))
