"""Derivative-free search for large nonlinear Hausdorff-Young ratios.

Coordinate-wise hill climbing over the real and imaginary parts of the
entries, re-projected after every trial step to keep the l1 norm capped and
every modulus inside the guarded unit disk.  Multi-start runs own derived
seeds per start, so the reduction is independent of scheduling and results
reproduce bit for bit at any worker count.

The search produces empirical lower bounds for the sharp constants only; it
cannot decide the open uniformity questions, and any bound violation it
uncovers is surfaced as a counterexample, never swallowed.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroSequenceError
from .nft_core import CoefficientSequence, sequence_to_text, _log_a_sq
from .spectral_norms import ExponentPair, QuadratureConfig, _pow_q
from .inequality_harness import hy_ratio

_ENTRY_CAP = 1.0 - 1e-12
_MIN_STEP = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    window: tuple[int, int] = (0, 7)
    l1_cap: float = 0.5
    starts: int = 8
    max_iters: int = 150
    init_step: float = 0.1
    shrink: float = 0.5
    seed: int = 0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    coarse_rel_tol: float = 1e-7  # quadrature tolerance during the walk

    def __post_init__(self):
        if not 0.0 < self.l1_cap < 1.0:
            raise ValueError("l1_cap must lie in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
        if self.window[1] < self.window[0]:
            raise ValueError("empty window")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")


@dataclass(frozen=True)
class SearchResult:
    best_F: CoefficientSequence
    best_ratio: float
    exponents: ExponentPair
    iters_used: int
    start_index: int
    trace: tuple[tuple[int, float], ...] | None = None

    def to_dict(self, config: SearchConfig | None = None) -> dict:
        d = {
            "best_F": self.best_F.to_json_dict(),
            "best_ratio": self.best_ratio,
            "p": self.exponents.p,
            "q": self.exponents.q,
            "iters_used": self.iters_used,
            "start_index": self.start_index,
        }
        if self.trace is not None:
            d["trace"] = [list(x) for x in self.trace]
        if config is not None:
            d["seed"] = config.seed
            d["config_digest"] = config_digest(config)
        return d


def config_digest(cfg: SearchConfig) -> str:
    return hashlib.sha256(repr(cfg).encode()).hexdigest()[:12]


def sequence_digest(seq: CoefficientSequence) -> str:
    return hashlib.sha256(sequence_to_text(seq).encode()).hexdigest()[:12]


def _rng_for_start(seed: int, start_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(start_index,)))


def random_sequence(
    rng: np.random.Generator, window: tuple[int, int], l1_cap: float
) -> CoefficientSequence:
    """Uniform phases and magnitudes, rescaled so the l1 norm equals a
    uniform fraction of the cap.  Deterministic per generator state."""
    lo, hi = window
    count = hi - lo + 1
    if count < 1:
        raise ValueError("empty window")
    mags = rng.uniform(0.0, 1.0, count)
    phases = rng.uniform(0.0, 2.0 * np.pi, count)
    target = rng.uniform(0.0, 1.0) * l1_cap
    vals = mags * np.exp(1j * phases)
    total = float(np.abs(vals).sum())
    if total > 0:
        vals *= target / total
    return CoefficientSequence(lo, tuple(vals))


def _project(vals: np.ndarray, l1_cap: float) -> np.ndarray:
    """Clip each modulus under the disk guard, then rescale uniformly into
    the l1 ball (phases and shape preserved)."""
    out = vals.copy()
    mods = np.abs(out)
    over = mods > _ENTRY_CAP
    if over.any():
        out[over] *= _ENTRY_CAP / mods[over]
    total = float(np.abs(out).sum())
    if total > l1_cap:
        out *= l1_cap / total
    return out


class _WalkEvaluator:
    """Coarse-tolerance ratio evaluations for the inner loop of the walk.

    Runs the same product recurrence and trapezoid refinement as the
    canonical path, but on raw arrays with the per-index phase tables
    precomputed once, since every candidate shares the window.  The walk's
    final answer is always re-certified through hy_ratio at full tolerance.
    """

    def __init__(self, offset: int, count: int, exponents: ExponentPair,
                 rel_tol: float, max_grid: int, initial_grid: int = 256):
        self.offset = offset
        self.count = count
        self.q = exponents.q
        self.p = exponents.p
        self.rel_tol = rel_tol
        self.grids = []
        grid = min(initial_grid, max_grid)
        while grid <= max_grid:
            self.grids.append(grid)
            grid *= 2
        self._phase: dict[int, np.ndarray] = {}

    def _phases(self, grid: int) -> np.ndarray:
        tab = self._phase.get(grid)
        if tab is None:
            ts = np.arange(grid, dtype=float) / grid
            tab = np.empty((self.count, grid), dtype=complex)
            for k in range(self.count):
                tab[k] = np.exp(2j * np.pi * np.mod(float(self.offset + k) * ts, 1.0))
            self._phase[grid] = tab
        return tab

    def _lhs_on_grid(self, vals: np.ndarray, grid: int) -> float:
        tab = self._phases(grid)
        a = np.ones(grid, dtype=complex)
        b = np.zeros(grid, dtype=complex)
        for k in range(self.count):
            v = vals[k]
            if v == 0:
                continue
            m = abs(v)
            big_a = 1.0 / math.sqrt((1.0 - m) * (1.0 + m))
            big_b = v * big_a
            e = tab[k]
            a, b = a * big_a + b * np.conj(big_b) * np.conj(e), a * big_b * e + b * big_a
        w = np.sqrt(np.log1p(np.abs(b) ** 2))
        mean = float(np.mean(_pow_q(w, self.q)))
        return mean ** (1.0 / self.q) if mean > 0 else 0.0

    def ratio(self, vals: np.ndarray) -> float:
        weights = [math.sqrt(_log_a_sq(abs(v))) for v in vals if v != 0]
        rhs = float(np.sum(np.asarray(weights) ** self.p)) ** (1.0 / self.p)
        prev = None
        lhs = 0.0
        for grid in self.grids:
            lhs = self._lhs_on_grid(vals, grid)
            if prev is not None and abs(lhs - prev) <= self.rel_tol * max(lhs, 1e-300):
                break
            prev = lhs
        return lhs / rhs


def local_search(
    start: CoefficientSequence,
    exponents: ExponentPair,
    cfg: SearchConfig,
    start_index: int = -1,
    keep_trace: bool = True,
) -> SearchResult:
    """Hill-climb the ratio by axis steps on one coordinate at a time.

    Every full sweep without an accepted move shrinks the step; the walk
    stops after ``max_iters`` sweeps or once the step drops below 1e-12.
    The returned ratio is re-evaluated at the full quadrature tolerance and
    never falls below the starting ratio by more than 1e-12.
    """
    if start.is_zero():
        raise ZeroSequenceError("local_search needs a nonzero start")
    offset = start.offset
    vals = np.array(start.values, dtype=complex)
    coarse = _WalkEvaluator(
        offset, vals.size, exponents,
        rel_tol=max(cfg.coarse_rel_tol, cfg.quadrature.rel_tol),
        max_grid=cfg.quadrature.max_grid,
    )
    best = coarse.ratio(vals)
    trace = [(0, best)] if keep_trace else None
    step = cfg.init_step
    sweeps = 0
    while sweeps < cfg.max_iters and step >= _MIN_STEP:
        improved = False
        for k in range(vals.size):
            for delta in (step, -step, 1j * step, -1j * step):
                cand = vals.copy()
                cand[k] += delta
                cand = _project(cand, cfg.l1_cap)
                if not np.any(cand != 0):
                    continue
                r = coarse.ratio(cand)
                if r > best:
                    best, vals = r, cand
                    improved = True
        sweeps += 1
        if keep_trace and improved:
            trace.append((sweeps, best))
        if not improved:
            step *= cfg.shrink
    final_seq = CoefficientSequence(offset, tuple(vals))
    final_ratio = hy_ratio(final_seq, exponents, cfg.quadrature).ratio
    start_ratio = hy_ratio(start, exponents, cfg.quadrature).ratio
    if final_ratio < start_ratio:
        final_seq, final_ratio = start, start_ratio
    return SearchResult(
        best_F=final_seq,
        best_ratio=final_ratio,
        exponents=exponents,
        iters_used=sweeps,
        start_index=start_index,
        trace=tuple(trace) if keep_trace else None,
    )


def _one_start(args):
    exponents, cfg, idx = args
    rng = _rng_for_start(cfg.seed, idx)
    start = random_sequence(rng, cfg.window, cfg.l1_cap)
    if start.is_zero():
        # measure-zero draw; nudge deterministically to the window center
        mid = (cfg.window[0] + cfg.window[1]) // 2
        vals = [0j] * (cfg.window[1] - cfg.window[0] + 1)
        vals[mid - cfg.window[0]] = 0.5 * cfg.l1_cap
        start = CoefficientSequence(cfg.window[0], tuple(vals))
    return local_search(start, exponents, cfg, start_index=idx, keep_trace=False)


def multi_start(
    exponents: ExponentPair, cfg: SearchConfig, workers: int = 1
) -> SearchResult:
    """Best of ``cfg.starts`` independent local searches.

    Start i draws its initial point from a generator seeded with
    (cfg.seed, i); the maximum is taken with ties broken by the smaller
    start index, so the result does not depend on worker count.  Extra
    workers run starts in separate processes; if the platform refuses,
    the run silently degrades to sequential with identical output.
    """
    jobs = [(exponents, cfg, i) for i in range(cfg.starts)]
    if workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_one_start, jobs))
        except (OSError, PermissionError):
            results = [_one_start(j) for j in jobs]
    else:
        results = [_one_start(j) for j in jobs]
    best = results[0]
    for r in results[1:]:
        if r.best_ratio > best.best_ratio:
            best = r
    return best


@dataclass(frozen=True)
class SweepRow:
    """One exponent of a sweep.

    ``search_ratio`` is the raw multi-start outcome; ``best_ratio`` folds in
    the single-spike reference point (ratio 1), so every row reports the
    best ratio actually witnessed and never sits below 1.
    """

    p: float
    q: float
    best_ratio: float
    search_ratio: float
    digest: str
    best_F: CoefficientSequence
    spike_ratio: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "best_ratio": self.best_ratio,
            "search_ratio": self.search_ratio,
            "digest": self.digest,
            "spike_ratio": self.spike_ratio,
            "best_F": self.best_F.to_json_dict(),
        }


def p_sweep(p_values, cfg: SearchConfig, workers: int = 1) -> list[SweepRow]:
    """One multi-start row per exponent, each checked against the
    single-spike reference (ratio identically 1)."""
    rows = []
    spike = CoefficientSequence(
        (cfg.window[0] + cfg.window[1]) // 2, (0.5 * cfg.l1_cap,)
    )
    for p in p_values:
        e = ExponentPair(float(p))
        res = multi_start(e, cfg, workers=workers)
        spike_ratio = hy_ratio(spike, e, cfg.quadrature).ratio
        if res.best_ratio >= spike_ratio:
            best, best_f = res.best_ratio, res.best_F
        else:
            best, best_f = spike_ratio, spike
        rows.append(
            SweepRow(
                p=e.p,
                q=e.q,
                best_ratio=best,
                search_ratio=res.best_ratio,
                digest=sequence_digest(best_f),
                best_F=best_f,
                spike_ratio=spike_ratio,
            )
        )
    return rows
