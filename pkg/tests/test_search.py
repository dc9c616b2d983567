import numpy as np
import pytest

from su11 import (
    CoefficientSequence,
    ExponentPair,
    QuadratureConfig,
    SearchConfig,
    ZeroSequenceError,
    hy_ratio,
    local_search,
    multi_start,
    p_sweep,
    random_sequence,
)
from su11.extremizer_search import _WalkEvaluator, _rng_for_start, sequence_digest

FAST_QUAD = QuadratureConfig(initial_grid=128, max_grid=2**16, rel_tol=1e-8)


def test_walk_evaluator_matches_canonical_ratio():
    """The walk's fast objective agrees with hy_ratio to coarse tolerance."""
    rng = np.random.default_rng(1)
    e = ExponentPair(1.9)
    for _ in range(15):
        n = int(rng.integers(1, 9))
        vals = rng.uniform(0, 0.06, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        seq = CoefficientSequence(0, tuple(vals))
        if seq.is_zero():
            continue
        ev = _WalkEvaluator(0, n, e, rel_tol=1e-7, max_grid=2**16)
        fast = ev.ratio(np.array(vals))
        slow = hy_ratio(seq, e, QuadratureConfig()).ratio
        assert abs(fast - slow) <= 1e-6 * max(1.0, slow)


def small_config(**kw):
    base = dict(
        window=(0, 3),
        l1_cap=0.5,
        starts=2,
        max_iters=40,
        init_step=0.1,
        shrink=0.5,
        seed=1234,
        quadrature=FAST_QUAD,
    )
    base.update(kw)
    return SearchConfig(**base)


def test_search_config_validation():
    with pytest.raises(ValueError):
        small_config(l1_cap=1.0)
    with pytest.raises(ValueError):
        small_config(shrink=1.0)
    with pytest.raises(ValueError):
        small_config(window=(3, 1))
    with pytest.raises(ValueError):
        small_config(starts=0)


# ---------------------------------------------------------------------------
# draws


def test_random_sequence_respects_caps():
    rng = _rng_for_start(7, 0)
    for _ in range(20):
        seq = random_sequence(rng, (-2, 5), 0.5)
        mods = seq.moduli()
        assert mods.sum() <= 0.5 + 1e-12
        assert np.all(mods < 1.0)


def test_random_sequence_deterministic():
    a = random_sequence(_rng_for_start(42, 3), (0, 7), 0.4)
    b = random_sequence(_rng_for_start(42, 3), (0, 7), 0.4)
    assert a == b


def test_random_sequence_window_one_is_spike():
    seq = random_sequence(_rng_for_start(5, 0), (4, 4), 0.5)
    assert len(seq.values) == 1
    assert seq.offset == 4


# ---------------------------------------------------------------------------
# local search


def test_spike_is_locally_optimal_exhaustive_scan():
    """Oracle: a coarse exhaustive scan over two-coordinate perturbations of
    a spike never pushes the ratio above 1, so the search from a spike must
    come back with ratio ~ 1."""
    e = ExponentPair(1.5)
    base = 0.1
    best_scan = -np.inf
    deltas = (-2e-3, -1e-3, 0.0, 1e-3, 2e-3)
    for d0r in deltas:
        for d0i in deltas:
            for d1r in deltas:
                for d1i in deltas:
                    vals = (base + d0r + 1j * d0i, d1r + 1j * d1i)
                    seq = CoefficientSequence(0, vals)
                    if seq.is_zero():
                        continue
                    r = hy_ratio(seq, e, FAST_QUAD).ratio
                    best_scan = max(best_scan, r)
    assert best_scan <= 1.0 + 1e-9

    res = local_search(
        CoefficientSequence(0, (base, 0j)), e, small_config(max_iters=25)
    )
    assert res.best_ratio == pytest.approx(1.0, abs=1e-9)


def test_local_search_zero_iters_returns_start():
    start = CoefficientSequence(0, (0.2, 0.1j))
    cfg = small_config(max_iters=0)
    res = local_search(start, ExponentPair(1.5), cfg)
    assert res.best_F == start
    assert res.iters_used == 0
    ref = hy_ratio(start, ExponentPair(1.5), cfg.quadrature).ratio
    assert res.best_ratio == pytest.approx(ref, rel=1e-12)


def test_local_search_never_regresses():
    start = CoefficientSequence(0, (0.15, 0.1, 0.05j))
    cfg = small_config(max_iters=10)
    e = ExponentPair(1.7)
    res = local_search(start, e, cfg)
    start_ratio = hy_ratio(start, e, cfg.quadrature).ratio
    assert res.best_ratio >= start_ratio - 1e-12


def test_local_search_trace_monotone():
    start = CoefficientSequence(0, (0.1, 0.08, 0.02j, 0.05))
    res = local_search(start, ExponentPair(1.9), small_config(max_iters=15))
    ratios = [r for _, r in res.trace]
    assert all(b >= a for a, b in zip(ratios[:-1], ratios[1:]))


def test_local_search_rejects_zero_start():
    with pytest.raises(ZeroSequenceError):
        local_search(CoefficientSequence(0, (0j,)), ExponentPair(1.5), small_config())


def test_projection_forced_past_caps():
    """Large steps must be pulled back inside the entry guard and l1 ball."""
    start = CoefficientSequence(0, (0.49, 0j))
    cfg = small_config(init_step=0.9, max_iters=3, l1_cap=0.5)
    res = local_search(start, ExponentPair(1.5), cfg)
    mods = res.best_F.moduli()
    assert mods.sum() <= 0.5 + 1e-12
    assert np.all(mods <= 1 - 1e-12 + 1e-15)


def test_result_ratio_reproducible_from_best_f():
    cfg = small_config(max_iters=20)
    res = local_search(
        CoefficientSequence(0, (0.1, 0.05, 0.02)), ExponentPair(1.5), cfg
    )
    again = hy_ratio(res.best_F, ExponentPair(1.5), cfg.quadrature).ratio
    assert abs(again - res.best_ratio) <= 1e-9 * max(1.0, abs(again))


# ---------------------------------------------------------------------------
# multi-start


def test_multi_start_single_start_matches_local_search():
    cfg = small_config(starts=1)
    e = ExponentPair(1.5)
    res = multi_start(e, cfg)
    rng = _rng_for_start(cfg.seed, 0)
    start = random_sequence(rng, cfg.window, cfg.l1_cap)
    ref = local_search(start, e, cfg, start_index=0, keep_trace=False)
    assert res.best_F == ref.best_F
    assert res.best_ratio == ref.best_ratio


def test_multi_start_thread_count_invariance():
    cfg = small_config(starts=4, max_iters=15)
    e = ExponentPair(1.9)
    seq_1 = multi_start(e, cfg, workers=1)
    seq_4 = multi_start(e, cfg, workers=4)
    assert seq_1.best_F == seq_4.best_F
    assert seq_1.best_ratio == seq_4.best_ratio
    assert seq_1.start_index == seq_4.start_index


def test_multi_start_under_small_l1_obeys_bound():
    cfg = small_config(starts=3, max_iters=25, l1_cap=0.5)
    res = multi_start(ExponentPair(1.3), cfg)
    assert res.best_ratio <= 2.5 + 1e-6


# ---------------------------------------------------------------------------
# p sweep


def test_p_sweep_rows():
    cfg = small_config(starts=1, max_iters=5)
    rows = p_sweep((1.3, 1.7), cfg)
    assert [r.p for r in rows] == [1.3, 1.7]
    for row in rows:
        assert row.q == pytest.approx(row.p / (row.p - 1.0), rel=1e-15)
        assert row.spike_ratio == pytest.approx(1.0, abs=1e-12)
        # the spike reference keeps every row at ratio >= 1
        assert row.best_ratio >= 1.0 - 1e-9
        assert row.best_ratio >= row.search_ratio
        assert row.best_ratio <= 1 + 3 * cfg.l1_cap + 1e-6
        assert row.digest == sequence_digest(row.best_F)


def test_p_sweep_zero_iters_echoes_draw():
    cfg = small_config(starts=1, max_iters=0)
    (row,) = p_sweep((1.5,), cfg)
    rng = _rng_for_start(cfg.seed, 0)
    start = random_sequence(rng, cfg.window, cfg.l1_cap)
    ref = hy_ratio(start, ExponentPair(1.5), cfg.quadrature).ratio
    assert row.search_ratio == pytest.approx(ref, rel=1e-12)
