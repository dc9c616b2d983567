"""Two-sided evaluation of the Hausdorff-Young family of inequalities.

Every check reports a signed margin (nonnegative means the inequality held)
in absolute and rhs-relative form, together with the quadrature that
produced the torus side.  The nine-entry proof ledger walks the full
estimate chain behind the small-sequence bound and the sharp-constant
criterion on one concrete input, recording per-entry hypothesis failures
instead of aborting, so a single run documents exactly which hypotheses an
input meets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFitError,
    PreconditionFailed,
    ZeroSequenceError,
)
from .nft_core import (
    CoefficientSequence,
    linear_fourier_on_grid,
    product_on_grid_arrays,
    _log_a_sq,
)
from .spectral_norms import (
    ExponentPair,
    NormResult,
    QuadratureConfig,
    WeightSampler,
    lp_sequence_norm,
    lq_norm_periodic,
    nl_weight_sequence,
)

_TINY = 1e-300

# Relative margin below which a check is declared violated (binary64 path).
DEFAULT_MARGIN_TOL = 1e-9
# Counterpart for the extended-precision path (>= 30 significant digits).
EXTENDED_MARGIN_TOL = 1e-20

CSV_HEADER = "check_id,p,q,lhs,rhs,ratio,bound,margin,converged,context"


@dataclass(frozen=True)
class CCParameters:
    """Constants (c, gamma, eta) of the sharpened linear Hausdorff-Young
    bound for sequences far from single-spike extremizers.

    No explicit admissible values are known; (1, 1, 1) is the documented
    placeholder used by the verification suites, and every report echoes the
    triple it was computed with.
    """

    c: float
    gamma: float
    eta: float

    def __post_init__(self):
        for name in ("c", "gamma", "eta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.c > 0 and self.gamma > 0 and self.eta > 0):
            raise ValueError("c, gamma, eta must all be positive")
        if self.eta > 1:
            raise ValueError("eta must lie in (0, 1]")

    def label(self) -> str:
        return f"cc=({self.c!r},{self.gamma!r},{self.eta!r})"


@dataclass(frozen=True)
class HyReport:
    """One inequality evaluation: both sides, their ratio, and margins."""

    exponents: ExponentPair
    lhs: NormResult
    rhs: float
    ratio: float
    bound_label: str
    bound: float | None = None
    margin: float | None = None
    margin_rel: float | None = None
    corollary_margin: float | None = None
    refined_margin: float | None = None
    cc: CCParameters | None = None
    context: str = ""

    def to_dict(self) -> dict:
        d = {
            "p": self.exponents.p,
            "q": self.exponents.q,
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs,
            "ratio": self.ratio,
            "bound_label": self.bound_label,
            "bound": self.bound,
            "margin": self.margin,
            "margin_rel": self.margin_rel,
            "context": self.context,
        }
        if self.corollary_margin is not None:
            d["corollary_margin"] = self.corollary_margin
        if self.refined_margin is not None:
            d["refined_margin"] = self.refined_margin
        if self.cc is not None:
            d["cc"] = [self.cc.c, self.cc.gamma, self.cc.eta]
        return d

    def to_csv_row(self) -> str:
        return _csv_row(
            self.bound_label,
            self.exponents.p,
            self.exponents.q,
            self.lhs.value,
            self.rhs,
            self.ratio,
            self.bound,
            self.margin,
            self.lhs.converged,
            self.context,
        )


@dataclass(frozen=True)
class LedgerEntry:
    """One link of the estimate chain, evaluated on a concrete input."""

    check_id: str
    holds: bool
    margin: float
    context: str = ""
    margin_rel: float = math.nan
    lhs: float | None = None
    rhs: float | None = None
    converged: bool = True
    precondition_failed: bool = False

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "holds": self.holds,
            "margin": self.margin,
            "margin_rel": self.margin_rel,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "converged": self.converged,
            "precondition_failed": self.precondition_failed,
            "context": self.context,
        }

    def to_csv_row(self) -> str:
        context = self.context
        if self.precondition_failed:
            context = ("precondition-failed; " + context).rstrip("; ")
        return _csv_row(
            self.check_id,
            None,
            None,
            self.lhs,
            self.rhs,
            None,
            None,
            self.margin,
            self.converged,
            context,
        )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def _csv_row(*cells) -> str:
    out = []
    for c in cells:
        s = _fmt(c)
        if "," in s or '"' in s:
            s = '"' + s.replace('"', '""') + '"'
        out.append(s)
    return ",".join(out)


# ---------------------------------------------------------------------------
# scalar helpers


def _l1(seq: CoefficientSequence) -> float:
    return float(np.sum(seq.moduli()))


def _require_nonzero(seq: CoefficientSequence):
    if seq.is_zero():
        raise ZeroSequenceError("the zero sequence has no ratio")


def weight_rhs(seq: CoefficientSequence, p: float) -> float:
    """Sequence side of the nonlinear inequality: lp norm of the weights."""
    return lp_sequence_norm(nl_weight_sequence(seq), p)


# ---------------------------------------------------------------------------
# core reports


def hy_ratio(
    seq: CoefficientSequence,
    exponents: ExponentPair,
    cfg: QuadratureConfig,
    sampler: WeightSampler | None = None,
) -> HyReport:
    """Empirical constant lhs/rhs of the nonlinear Hausdorff-Young inequality.

    lhs is the torus L^q norm of (log|a|^2)^(1/2), rhs the sequence l^p
    norm of (log A_n^2)^(1/2).  Single-spike sequences give ratio 1 exactly.
    """
    _require_nonzero(seq)
    if sampler is None:
        sampler = WeightSampler(seq)
    lhs = lq_norm_periodic(sampler, exponents.q, cfg)
    rhs = weight_rhs(seq, exponents.p)
    return HyReport(
        exponents=exponents,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs.value / rhs,
        bound_label="ratio",
    )


def linear_hy_margin(
    values, exponents: ExponentPair, cfg: QuadratureConfig
) -> HyReport:
    """Sharp linear Hausdorff-Young on the integers: ||Ghat||_q <= ||G||_p.

    ``values`` is any finitely supported complex sequence (no unit-disk
    restriction); the index offset is irrelevant to both norms.  A negative
    margin beyond tolerance signals an implementation bug, not a discovery.
    """
    arr = np.asarray(list(values), dtype=complex)
    if arr.size == 0 or not np.any(arr != 0):
        raise ZeroSequenceError("linear ratio undefined for the zero sequence")

    class _AbsHat:
        def __init__(self):
            self._cache = {}

        def on_grid(self, grid_size):
            out = self._cache.get(grid_size)
            if out is None:
                ts = np.arange(grid_size, dtype=float) / grid_size
                acc = np.zeros(grid_size, dtype=complex)
                for n, g in enumerate(arr):
                    if g != 0:
                        acc += g * np.exp(2j * np.pi * np.mod(n * ts, 1.0))
                out = np.abs(acc)
                self._cache[grid_size] = out
            return out

    lhs = lq_norm_periodic(_AbsHat(), exponents.q, cfg)
    rhs = lp_sequence_norm(np.abs(arr), exponents.p)
    margin = rhs - lhs.value
    return HyReport(
        exponents=exponents,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs.value / rhs,
        bound_label="linear-hy",
        bound=1.0,
        margin=margin,
        margin_rel=margin / max(rhs, _TINY),
    )


def theorem1_margin(
    seq: CoefficientSequence,
    exponents: ExponentPair,
    cfg: QuadratureConfig,
    sampler: WeightSampler | None = None,
) -> HyReport:
    """Small-sequence bound lhs <= (1 + 3 l1) rhs, valid for l1 <= 1/2.

    Also reports the margin against the uniform-in-p corollary constant 5/2.
    """
    _require_nonzero(seq)
    l1 = _l1(seq)
    if l1 > 0.5:
        raise PreconditionFailed(f"l1 norm {l1!r} exceeds 1/2")
    base = hy_ratio(seq, exponents, cfg, sampler=sampler)
    bound = 1.0 + 3.0 * l1
    margin = bound * base.rhs - base.lhs.value
    return HyReport(
        exponents=exponents,
        lhs=base.lhs,
        rhs=base.rhs,
        ratio=base.ratio,
        bound_label="1+3*l1",
        bound=bound,
        margin=margin,
        margin_rel=margin / max(base.rhs, _TINY),
        corollary_margin=2.5 * base.rhs - base.lhs.value,
        context=f"l1={l1!r}",
    )


def alpha_delta(cc: CCParameters) -> tuple[float, float]:
    """(alpha, delta) derived from the (c, gamma, eta) triple:

    alpha = max(1, gamma),
    delta = min(1/6, c eta^gamma / 3, (3 + (3/c)^(1/gamma))^(-alpha)).

    delta never exceeds 1/6.
    """
    alpha = max(1.0, cc.gamma)
    delta = min(
        1.0 / 6.0,
        cc.c * cc.eta**cc.gamma / 3.0,
        (3.0 + (3.0 / cc.c) ** (1.0 / cc.gamma)) ** (-alpha),
    )
    return alpha, delta


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of the smallness-vs-spread condition l1 <= delta (1 - r)^alpha
    with r = linf/lp; margin = rhs - l1."""

    holds: bool
    margin: float
    l1: float
    rhs: float
    alpha: float
    delta: float


def condition_check(
    seq: CoefficientSequence, exponents: ExponentPair, cc: CCParameters
) -> ConditionCheck:
    """Check whether the sequence is small and spread enough for the sharp
    constant: single spikes always fail (the right-hand side vanishes)."""
    _require_nonzero(seq)
    alpha, delta = alpha_delta(cc)
    mods = seq.moduli()
    l1 = float(np.sum(mods))
    ratio = lp_sequence_norm(mods, math.inf) / lp_sequence_norm(mods, exponents.p)
    rhs = delta * (1.0 - ratio) ** alpha
    margin = rhs - l1
    return ConditionCheck(margin >= 0.0, margin, l1, rhs, alpha, delta)


def theorem2_margin(
    seq: CoefficientSequence,
    exponents: ExponentPair,
    cc: CCParameters,
    cfg: QuadratureConfig,
    sampler: WeightSampler | None = None,
) -> HyReport:
    """Sharp-constant bound lhs <= rhs under the smallness-vs-spread
    condition, plus the refined margin against (1 - 9 l1^2) rhs."""
    _require_nonzero(seq)
    cond = condition_check(seq, exponents, cc)
    if not cond.holds:
        raise PreconditionFailed(
            f"condition margin {cond.margin!r} < 0 ({cc.label()})"
        )
    base = hy_ratio(seq, exponents, cfg, sampler=sampler)
    margin = base.rhs - base.lhs.value
    refined_factor = 1.0 - 9.0 * cond.l1**2
    return HyReport(
        exponents=exponents,
        lhs=base.lhs,
        rhs=base.rhs,
        ratio=base.ratio,
        bound_label="sharp-1",
        bound=1.0,
        margin=margin,
        margin_rel=margin / max(base.rhs, _TINY),
        refined_margin=refined_factor * base.rhs - base.lhs.value,
        cc=cc,
        context=f"l1={cond.l1!r}; refined_factor={refined_factor!r}",
    )


# ---------------------------------------------------------------------------
# proof ledger


class _TraceGrids:
    """Shared uniform-grid samples feeding the ledger's row norms.

    For each grid size the recurrences are run once, vectorized over t,
    capturing for every truncation index N in [N_min - 1, N_max]:

      red[k]  = |ra_N(t)| + |rb_N(t)|   (reduced pair moduli)
      lin[k]  = |sum_{n <= N} F_n e^{2 pi i n t}|

    plus the weight samples and |b| of the full product.
    """

    def __init__(self, seq: CoefficientSequence):
        self.seq = seq
        self.entries = seq.window_entries()
        self._cache: dict[int, dict] = {}

    def level(self, grid_size: int) -> dict:
        lv = self._cache.get(grid_size)
        if lv is None:
            ts = np.arange(grid_size, dtype=float) / grid_size
            ra = np.zeros(grid_size, dtype=complex)
            rb = np.zeros(grid_size, dtype=complex)
            lin = np.zeros(grid_size, dtype=complex)
            red_rows = [np.zeros(grid_size)]
            lin_rows = [np.zeros(grid_size)]
            for n, v in self.entries:
                e = np.exp(2j * np.pi * np.mod(float(n) * ts, 1.0))
                ra, rb = (
                    ra + rb * np.conj(v) * np.conj(e),
                    rb + v * e + ra * v * e,
                )
                lin = lin + v * e
                red_rows.append(np.abs(ra) + np.abs(rb))
                lin_rows.append(np.abs(lin))
            _, b = product_on_grid_arrays(self.seq, ts)
            b_abs = np.abs(b)
            lv = {
                "red": np.array(red_rows),
                "lin": np.array(lin_rows),
                # log|a|^2 = log(1 + |b|^2) on the group, stable at zeros
                "w": np.sqrt(np.log1p(b_abs**2)),
                "b_abs": b_abs,
            }
            self._cache[grid_size] = lv
        return lv

    def row(self, kind: str, index: int):
        grids = self

        class _Row:
            def on_grid(self, grid_size):
                return grids.level(grid_size)[kind][index]

        return _Row()

    def scalar(self, kind: str):
        grids = self

        class _Scalar:
            def on_grid(self, grid_size):
                return grids.level(grid_size)[kind]

        return _Scalar()


def _entry(check_id, lhs, rhs, scale, tol, context="", converged=True) -> LedgerEntry:
    margin = rhs - lhs
    rel = margin / max(abs(scale), _TINY)
    return LedgerEntry(
        check_id=check_id,
        holds=rel >= -tol,
        margin=margin,
        margin_rel=rel,
        lhs=lhs,
        rhs=rhs,
        converged=converged,
        context=context,
    )


def _skipped(check_id, reason) -> LedgerEntry:
    return LedgerEntry(
        check_id=check_id,
        holds=False,
        margin=math.nan,
        margin_rel=math.nan,
        precondition_failed=True,
        context=reason,
    )


def proof_ledger(
    seq: CoefficientSequence,
    exponents: ExponentPair,
    cc: CCParameters,
    cfg: QuadratureConfig,
    t_samples: int = 16,
    margin_tol: float = DEFAULT_MARGIN_TOL,
) -> list[LedgerEntry]:
    """Evaluate the nine-link estimate chain on one input.

    L1  sequence lp norm is dominated by the weight lp norm
    L2  running product of A_n vs (1 - l1^2)^(-1/2), and vs 1 + l1^2 when
        l1 <= 1/2
    L3  pointwise crucial iteration at t_samples uniform points, all N
    L4  bootstrapped L^q inequality for the reduced rows, all N
    L5  induction bound ||row_N||_q <= ||F||_p / (1 - l1), all N
    L6  weight norm <= ||b||_q <= (prod A) ||F||_p / (1 - l1)
    L7  weight norm <= (1 + 3 l1) sup_N of the truncated-transform norms
    L8  every truncated-transform norm <= (1 - 3 l1) ||F||_p, with the
        case split per truncation recorded (requires the spread condition)
    L9  scalar comparison 3 l1 + (3 l1 / c)^(1/gamma) <= (l1/delta)^(1/alpha)
        (requires the spread condition)

    Hypothesis failures are recorded per entry, never raised.
    """
    _require_nonzero(seq)
    p, q = exponents.p, exponents.q
    mods = seq.moduli()
    l1 = float(np.sum(mods))
    lp_f = lp_sequence_norm(mods, p)
    weights = nl_weight_sequence(seq)
    lp_w = lp_sequence_norm(weights, p)
    log_prod_a = 0.5 * float(sum(_log_a_sq(m) for m in mods))
    prod_a = math.exp(log_prod_a)
    grids = _TraceGrids(seq)
    entries = grids.entries
    n_rows = len(entries) + 1  # truncations N_min-1 .. N_max
    n_first = entries[0][0] - 1

    out: list[LedgerEntry] = []

    # L1
    out.append(_entry("L1", lp_f, lp_w, lp_w, margin_tol))

    # L2
    if l1 >= 1.0:
        out.append(_skipped("L2", f"l1={l1!r} >= 1"))
    else:
        # For l1 <= 1/2 the bound 1 + l1^2 is the tighter of the two, so
        # checking it also certifies (1 - l1^2)^(-1/2).
        if l1 <= 0.5:
            rhs2, context = 1.0 + l1 * l1, "bound=1+l1^2 (implies the other)"
        else:
            rhs2, context = (1.0 - l1 * l1) ** -0.5, "bound=(1-l1^2)^(-1/2)"
        out.append(_entry("L2", prod_a, rhs2, max(rhs2, 1.0), margin_tol, context))

    # L3: pointwise at t_samples uniform points
    lv = grids.level(t_samples)
    red, lin = lv["red"], lv["lin"]
    absf = np.array([abs(v) for _, v in entries])
    bind3 = None
    scale3 = 1.0
    for k in range(1, n_rows):
        # rows 0..k-1 pair with |F| of entries 0..k-1
        rhs_row = absf[:k] @ red[:k] + lin[k]
        scale3 = max(scale3, float(rhs_row.max(initial=0.0)))
        diff = rhs_row - red[k]
        j = int(np.argmin(diff))
        if bind3 is None or diff[j] < bind3[0]:
            bind3 = (float(diff[j]), float(red[k][j]), float(rhs_row[j]),
                     f"N={n_first + k}, t={j}/{t_samples}")
    out.append(
        _entry(
            "L3",
            bind3[1],
            bind3[2],
            scale3,
            margin_tol,
            context=f"binding at {bind3[3]}; {t_samples} t-points",
        )
    )

    # Row norms under shared refinement
    red_norms = [lq_norm_periodic(grids.row("red", k), q, cfg) for k in range(n_rows)]
    lin_norms = [lq_norm_periodic(grids.row("lin", k), q, cfg) for k in range(n_rows)]
    conv = all(r.converged for r in red_norms + lin_norms)
    red_vals = np.array([r.value for r in red_norms])
    lin_vals = np.array([r.value for r in lin_norms])

    # L4: bootstrap in norm, every N
    bind4 = None
    for k in range(1, n_rows):
        rhs4 = float(absf[:k] @ red_vals[:k]) + lp_f
        diff = rhs4 - float(red_vals[k])
        if bind4 is None or diff < bind4[0]:
            bind4 = (diff, float(red_vals[k]), rhs4, n_first + k)
    out.append(
        _entry(
            "L4",
            bind4[1],
            bind4[2],
            max(lp_f, 1.0),
            margin_tol,
            context=f"binding N={bind4[3]}",
            converged=conv,
        )
    )

    # L5: induction bound, every N
    if l1 >= 1.0:
        out.append(_skipped("L5", f"l1={l1!r} >= 1"))
    else:
        cap5 = lp_f / (1.0 - l1)
        j5 = int(np.argmax(red_vals))
        out.append(
            _entry(
                "L5",
                float(red_vals[j5]),
                cap5,
                max(cap5, _TINY),
                margin_tol,
                context=f"binding N={n_first + j5}",
                converged=conv,
            )
        )

    # L6: weight norm <= ||b||_q <= prod_a ||F||_p / (1 - l1)
    w_norm = lq_norm_periodic(grids.scalar("w"), q, cfg)
    if l1 >= 1.0:
        out.append(_skipped("L6", f"l1={l1!r} >= 1"))
    else:
        b_norm = lq_norm_periodic(grids.scalar("b_abs"), q, cfg)
        cap6 = prod_a * lp_f / (1.0 - l1)
        m_a = b_norm.value - w_norm.value
        m_b = cap6 - b_norm.value
        if m_a <= m_b:
            lhs6, rhs6, side = w_norm.value, b_norm.value, "weight<=||b||"
        else:
            lhs6, rhs6, side = b_norm.value, cap6, "||b||<=cap"
        out.append(
            _entry(
                "L6",
                lhs6,
                rhs6,
                max(cap6, _TINY),
                margin_tol,
                context=f"binding side: {side}",
                converged=conv and w_norm.converged and b_norm.converged,
            )
        )

    # L7: weight norm <= (1 + 3 l1) sup_N of truncated-transform norms
    sup_lin = float(lin_vals.max())
    if l1 > 0.5:
        out.append(_skipped("L7", f"l1={l1!r} > 1/2"))
    else:
        cap7 = (1.0 + 3.0 * l1) * sup_lin
        out.append(
            _entry(
                "L7",
                w_norm.value,
                cap7,
                max(cap7, _TINY),
                margin_tol,
                context=f"sup_N at N={n_first + int(np.argmax(lin_vals))}",
                converged=conv and w_norm.converged,
            )
        )

    # L8 / L9 require the smallness-vs-spread condition
    cond = condition_check(seq, exponents, cc)
    if not cond.holds:
        reason = f"condition fails: margin={cond.margin!r} ({cc.label()})"
        out.append(_skipped("L8", reason))
        out.append(_skipped("L9", reason))
        return out

    # L8: truncated sharpened linear bound, every N, with case split
    cap8 = (1.0 - 3.0 * l1) * lp_f
    cases = []
    for k in range(1, n_rows):
        trunc_lp = lp_sequence_norm(mods[:k], p)
        cases.append("1" if trunc_lp <= cap8 else "2")
    diffs8 = cap8 - lin_vals[1:]
    j8 = int(np.argmin(diffs8))
    case_note = f"cases(1/2)={''.join(cases)}; binding N={n_first + 1 + j8} (case {cases[j8]})"
    out.append(
        _entry(
            "L8",
            float(lin_vals[1 + j8]),
            cap8,
            max(lp_f, _TINY),
            margin_tol,
            context=case_note,
            converged=conv,
        )
    )

    # L9: scalar comparison behind the case split
    lhs9 = 3.0 * l1 + (3.0 * l1 / cc.c) ** (1.0 / cc.gamma)
    rhs9 = (l1 / cond.delta) ** (1.0 / cond.alpha)
    out.append(_entry("L9", lhs9, rhs9, max(rhs9, _TINY), margin_tol))
    return out


# ---------------------------------------------------------------------------
# linearization probe


@dataclass(frozen=True)
class ProbeResult:
    """Fitted scaling exponent of the deviation between b and the linear
    transform along a family of shrinking inputs."""

    slope: float
    scales: tuple[float, ...]
    deviations: tuple[float, ...]


def quadratic_error_probe(
    seq: CoefficientSequence,
    scales,
    cfg: QuadratureConfig | None = None,
    grid_size: int = 512,
) -> ProbeResult:
    """Slope of log max|b_{eps F} - eps Fhat| against log eps.

    Uses a fixed uniform grid of ``grid_size`` points for the max.  At least
    three scales spanning a decade are required.  Because b is odd in F the
    deviation scales cubically for generic inputs; anything at or above
    slope 2 - 0.1 is accepted downstream.
    """
    scales = tuple(float(s) for s in scales)
    if len(scales) < 3:
        raise ValueError("need at least 3 scales")
    if not all(0 < s <= 1 for s in scales):
        raise ValueError("scales must lie in (0, 1]")
    # a 5x span keeps the log-log fit conditioned; the canonical octave
    # ladder 0.1 .. 0.0125 spans 8x
    if max(scales) / min(scales) < 5.0 - 1e-12:
        raise ValueError("scales must span at least a factor of 5")
    ts = np.arange(grid_size, dtype=float) / grid_size
    hat = linear_fourier_on_grid(seq, None, grid_size)
    devs = []
    for s in scales:
        scaled = seq.scaled(s)
        _, b = product_on_grid_arrays(scaled, ts)
        devs.append(float(np.max(np.abs(b - s * hat))))
    if all(d < 1e-14 for d in devs):
        raise DegenerateFitError("all deviations below 1e-14")
    xs = np.log([s for s, d in zip(scales, devs) if d > 0])
    ys = np.log([d for d in devs if d > 0])
    if xs.size < 2:
        raise DegenerateFitError("fewer than two nonzero deviations")
    slope = float(np.polyfit(xs, ys, 1)[0])
    return ProbeResult(slope, scales, tuple(devs))
