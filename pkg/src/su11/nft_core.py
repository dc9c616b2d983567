"""Core SU(1,1)-valued trigonometric products of coefficient sequences.

A coefficient sequence is a finitely supported, doubly indexed complex
sequence F with every |F_n| < 1.  Each index n contributes the matrix

    [[ A_n,                B_n e^{2 pi i n t} ],
     [ conj(B_n) e^{-2 pi i n t},        A_n ]],

with A_n = (1 - |F_n|^2)^(-1/2) and B_n = F_n * A_n, and the product over
increasing n defines the pair (a(t), b(t)) with |a|^2 - |b|^2 = 1.  Only the
first row (a, b) is ever stored; the second row is its conjugate.

All functions here are pure; the dataclasses are frozen and safe to share
across threads.  Grid evaluation and scalar evaluation run through the same
vectorized kernel, so ``evaluate_on_grid(F, M)[j]`` is bitwise equal to
``evaluate_product(F, j / M)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptySequenceError

# Entries with modulus >= 1 - MODULUS_GUARD are rejected: A_n would exceed
# ~7e5 and downstream logs lose precision.
MODULUS_GUARD = 1e-12

_DET_TOL = 1e-12
_ABS_FLOOR = 1e-12


@dataclass(frozen=True)
class CoefficientSequence:
    """Finitely supported complex sequence with entries in the open unit disk.

    ``values[k]`` stores the entry at index ``offset + k``.  Exact zeros may
    be stored anywhere; the support window queries ignore leading and
    trailing zeros, while zeros inside the window are kept as identity
    factors.
    """

    offset: int
    values: tuple[complex, ...]
    guard: float = field(default=MODULUS_GUARD, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "offset", int(self.offset))
        cap = 1.0 - self.guard
        for k, v in enumerate(vals):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise DomainError(f"entry {self.offset + k} is not finite")
            if abs(v) >= cap:
                raise DomainError(
                    f"entry {self.offset + k} has modulus {abs(v)!r} >= {cap!r}"
                )

    # -- support window -------------------------------------------------

    def support(self) -> tuple[int, int] | None:
        """(N_min, N_max) of the nonzero entries, or None if all zero."""
        nz = [k for k, v in enumerate(self.values) if v != 0]
        if not nz:
            return None
        return self.offset + nz[0], self.offset + nz[-1]

    @property
    def n_min(self) -> int:
        s = self.support()
        if s is None:
            raise EmptySequenceError("sequence has no nonzero entry")
        return s[0]

    @property
    def n_max(self) -> int:
        s = self.support()
        if s is None:
            raise EmptySequenceError("sequence has no nonzero entry")
        return s[1]

    def is_zero(self) -> bool:
        return self.support() is None

    def __getitem__(self, n: int) -> complex:
        k = n - self.offset
        if 0 <= k < len(self.values):
            return self.values[k]
        return 0j

    def window_entries(self) -> list[tuple[int, complex]]:
        """(n, F_n) for n across the trimmed support window, zeros included."""
        s = self.support()
        if s is None:
            return []
        return [(n, self[n]) for n in range(s[0], s[1] + 1)]

    def moduli(self) -> np.ndarray:
        """|F_n| over the trimmed window (empty array for the zero sequence)."""
        return np.array([abs(v) for _, v in self.window_entries()], dtype=float)

    def scaled(self, factor: float) -> "CoefficientSequence":
        return CoefficientSequence(self.offset, tuple(factor * v for v in self.values))

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "offset": self.offset,
            "values": [[v.real, v.imag] for v in self.values],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoefficientSequence":
        vals = tuple(complex(re, im) for re, im in d["values"])
        return cls(int(d["offset"]), vals)


def sequence_to_text(seq: CoefficientSequence) -> str:
    """Plain-text form: ``offset <int>`` then one ``<re> <im>`` line per entry.

    Floats are written with repr so the text round-trips exactly.
    """
    lines = [f"offset {seq.offset}"]
    for v in seq.values:
        lines.append(f"{v.real!r} {v.imag!r}")
    return "\n".join(lines) + "\n"


def sequence_from_text(text: str) -> CoefficientSequence:
    """Parse the plain-text format; errors carry the offending line number."""
    lines = [ln for ln in text.splitlines()]
    offset = None
    vals: list[complex] = []
    for i, raw in enumerate(lines, start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        if offset is None:
            parts = ln.split()
            if len(parts) != 2 or parts[0] != "offset":
                raise ValueError(f"line {i}: expected 'offset <integer>'")
            try:
                offset = int(parts[1])
            except ValueError:
                raise ValueError(f"line {i}: bad offset {parts[1]!r}") from None
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {i}: expected '<re> <im>'")
        try:
            v = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ValueError(f"line {i}: bad entry {ln!r}") from None
        if abs(v) >= 1.0 - MODULUS_GUARD:
            raise DomainError(f"line {i}: modulus {abs(v)!r} outside the unit disk")
        vals.append(v)
    if offset is None:
        raise ValueError("line 1: missing 'offset <integer>' header")
    return CoefficientSequence(offset, tuple(vals))


@dataclass(frozen=True)
class DerivedCoefficients:
    """Per-entry (A_n, B_n) aligned to the source sequence's offset."""

    offset: int
    a_diag: tuple[float, ...]
    b_off: tuple[complex, ...]


@dataclass(frozen=True)
class Su11Element:
    """First row (a, b) of an SU(1,1) matrix: |a|^2 - |b|^2 = 1, |a| >= 1.

    The group constraint is validated at construction to ``tol`` relative to
    max(1, |a|^2).
    """

    a: complex
    b: complex
    tol: float = field(default=_DET_TOL, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        asq = abs(self.a) ** 2
        det = asq - abs(self.b) ** 2
        if abs(det - 1.0) > self.tol * max(1.0, asq):
            raise ValueError(f"not in SU(1,1): |a|^2-|b|^2 = {det!r}")
        if abs(self.a) < 1.0 - _ABS_FLOOR:
            raise ValueError(f"|a| = {abs(self.a)!r} < 1")

    def det_residual(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0


@dataclass(frozen=True)
class TransformTrace:
    """Partial products and reduced quantities along the support window.

    ``partials[k]`` and ``reduced[k]`` correspond to truncation index
    ``n_first + k`` where ``n_first = N_min - 1``; the first slot holds the
    identity (1, 0) and (0, 0) respectively.
    """

    t: float
    n_first: int
    partials: tuple[Su11Element, ...]
    reduced: tuple[tuple[complex, complex], ...]


# ---------------------------------------------------------------------------
# derived coefficients


def _log_a_sq(mod: float) -> float:
    """log A_n^2 = -log(1 - |F_n|^2), branch-accurate at both ends."""
    if mod < 0.5:
        return -math.log1p(-mod * mod)
    return -math.log((1.0 - mod) * (1.0 + mod))


def derive_coefficients(seq: CoefficientSequence) -> DerivedCoefficients:
    """A_n = (1-|F_n|^2)^(-1/2), B_n = F_n A_n over the stored entries.

    Raises DomainError for any entry outside the guarded unit disk (already
    enforced at construction; rechecked here so raw tuples can be used too).
    """
    a_diag = []
    b_off = []
    for v in seq.values:
        m = abs(v)
        if m >= 1.0 - seq.guard:
            raise DomainError(f"modulus {m!r} outside the unit disk")
        A = 1.0 / math.sqrt((1.0 - m) * (1.0 + m))
        a_diag.append(A)
        b_off.append(v * A)
    return DerivedCoefficients(seq.offset, tuple(a_diag), tuple(b_off))


# ---------------------------------------------------------------------------
# product evaluation


def _phases(n: int, ts: np.ndarray) -> np.ndarray:
    """e^{2 pi i n t} with the argument reduced before scaling by 2 pi."""
    frac = np.mod(float(n) * ts, 1.0)
    return np.exp(2j * np.pi * frac)


def product_on_grid_arrays(
    seq: CoefficientSequence, ts: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (a(t), b(t)) over an array of t values.

    This is the single kernel behind both the scalar and the grid entry
    points, accumulated left to right in the two-complex-number
    representation.
    """
    ts = np.asarray(ts, dtype=float)
    a = np.ones(ts.shape, dtype=complex)
    b = np.zeros(ts.shape, dtype=complex)
    for n, v in seq.window_entries():
        if v == 0:
            continue  # identity factor
        m = abs(v)
        A = 1.0 / math.sqrt((1.0 - m) * (1.0 + m))
        B = v * A
        e = _phases(n, ts)
        a, b = a * A + b * np.conj(B) * np.conj(e), a * B * e + b * A
    return a, b


def evaluate_product(seq: CoefficientSequence, t: float) -> Su11Element:
    """The ordered product over the support window at a single t.

    The empty (or identically zero) sequence gives the identity (1, 0).
    """
    if not math.isfinite(t):
        raise ValueError(f"t = {t!r} is not finite")
    a, b = product_on_grid_arrays(seq, np.array([t], dtype=float))
    return Su11Element(complex(a[0]), complex(b[0]))


def evaluate_on_grid(seq: CoefficientSequence, grid_size: int) -> list[Su11Element]:
    """Products at the uniform grid t_j = j / grid_size, j = 0..grid_size-1."""
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    ts = np.arange(grid_size, dtype=float) / grid_size
    a, b = product_on_grid_arrays(seq, ts)
    return [Su11Element(complex(a[j]), complex(b[j])) for j in range(grid_size)]


def transform_trace(seq: CoefficientSequence, t: float) -> TransformTrace:
    """Partial products and reduced quantities at every truncation index.

    Partials follow
        a_N = a_{N-1} A_N + b_{N-1} conj(B_N) e^{-2 pi i N t},
        b_N = a_{N-1} B_N e^{2 pi i N t} + b_{N-1} A_N,
    and the reduced pair (running product divided by the accumulated A's,
    with 1 subtracted on the diagonal) follows
        ra_N = ra_{N-1} + rb_{N-1} conj(F_N) e^{-2 pi i N t},
        rb_N = rb_{N-1} + F_N e^{2 pi i N t} + ra_{N-1} F_N e^{2 pi i N t}.
    """
    entries = seq.window_entries()
    if not entries:
        raise EmptySequenceError("transform_trace requires a nonzero sequence")
    a, b = 1 + 0j, 0j
    ra, rb = 0j, 0j
    partials = [Su11Element(a, b)]
    reduced = [(ra, rb)]
    for n, v in entries:
        m = abs(v)
        A = 1.0 / math.sqrt((1.0 - m) * (1.0 + m))
        B = v * A
        e = cmath.exp(2j * math.pi * math.fmod(float(n) * t, 1.0))
        a, b = a * A + b * B.conjugate() * e.conjugate(), a * B * e + b * A
        ra, rb = ra + rb * v.conjugate() * e.conjugate(), rb + v * e + ra * v * e
        partials.append(Su11Element(a, b))
        reduced.append((ra, rb))
    return TransformTrace(
        t=float(t),
        n_first=entries[0][0] - 1,
        partials=tuple(partials),
        reduced=tuple(reduced),
    )


def to_verblunsky(seq: CoefficientSequence) -> CoefficientSequence:
    """The index-shifted negated sequence n -> -F_{n+1}.

    These are the Verblunsky coefficients of the orthogonal-polynomial
    recursion on the unit circle.  The recursion's matrix form is the
    transpose of the partial product here, left-multiplied by the diagonal
    phase matrix diag(e^{2 pi i n t}, e^{-2 pi i n t}) and viewed in the
    variable z = e^{2 pi i t}; only the coefficient map is implemented
    because nothing downstream consumes the matrix form.
    """
    return CoefficientSequence(seq.offset - 1, tuple(-v for v in seq.values))


def linear_fourier_truncated(
    seq: CoefficientSequence, n_cut: int | float | None, t: float
) -> complex:
    """Sum of F_n e^{2 pi i n t} over n <= n_cut (everything for inf/None)."""
    if n_cut is None:
        n_cut = math.inf
    total = 0j
    for k, v in enumerate(seq.values):
        n = seq.offset + k
        if n > n_cut or v == 0:
            continue
        total += v * cmath.exp(2j * math.pi * math.fmod(float(n) * t, 1.0))
    return total


def linear_fourier_on_grid(
    seq: CoefficientSequence, n_cut: int | float | None, grid_size: int
) -> np.ndarray:
    """Vectorized truncated transform on the uniform grid j / grid_size."""
    if n_cut is None:
        n_cut = math.inf
    ts = np.arange(grid_size, dtype=float) / grid_size
    total = np.zeros(grid_size, dtype=complex)
    for k, v in enumerate(seq.values):
        n = seq.offset + k
        if n > n_cut or v == 0:
            continue
        total += v * _phases(n, ts)
    return total
