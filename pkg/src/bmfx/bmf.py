"""Boolean matrix factorization over the OR/AND semiring.

``M ~ B o C`` where ``(B o C)[i, j] = OR_t (B[i, t] AND C[t, j])``. For a
truth table M (2^k x m), B is the compressor truth table (2^k x f) and C
(f x m) wires compressor outputs into the OR-network decompressor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, TooLarge

EXHAUSTIVE_BUDGET_BITS = 24
DEFAULT_TAU_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


class BooleanMatrix:
    """Dense 0/1 matrix backed by a numpy bool array (one byte per cell)."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim != 2:
            raise ValueError("BooleanMatrix needs a 2-D array")
        self.bits = arr.astype(bool, copy=True)
        self.bits.setflags(write=False)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BooleanMatrix":
        return cls(np.zeros((n_rows, n_cols), dtype=bool))

    @classmethod
    def identity(cls, n: int) -> "BooleanMatrix":
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def from_text(cls, text: str) -> "BooleanMatrix":
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip().replace(" ", "").replace(",", "")
            if not line:
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"matrix rows may only hold 0/1: {line!r}")
            rows.append([c == "1" for c in line])
        if not rows:
            raise ValueError("empty matrix")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix rows")
        return cls(np.array(rows, dtype=bool))

    def to_text(self) -> str:
        return "\n".join("".join("1" if b else "0" for b in row) for row in self.bits)

    @property
    def n_rows(self) -> int:
        return self.bits.shape[0]

    @property
    def n_cols(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def column(self, j: int) -> np.ndarray:
        return self.bits[:, j]

    def ones(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, BooleanMatrix):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"BooleanMatrix({self.n_rows}x{self.n_cols})"


def _as_bits(x) -> np.ndarray:
    return x.bits if isinstance(x, BooleanMatrix) else np.asarray(x, dtype=bool)


def bool_product(B, C) -> BooleanMatrix:
    b, c = _as_bits(B), _as_bits(C)
    if b.shape[1] != c.shape[0]:
        raise DimensionMismatch(f"cannot multiply {b.shape} by {c.shape}")
    return BooleanMatrix(b.astype(np.int32) @ c.astype(np.int32) > 0)


def factorization_error(M, B, C) -> int:
    m = _as_bits(M)
    p = bool_product(B, C).bits
    if m.shape != p.shape:
        raise DimensionMismatch(f"M is {m.shape}, product is {p.shape}")
    return int(np.count_nonzero(m ^ p))


@dataclass(frozen=True)
class AssoParams:
    tau: float = 1.0
    w_plus: float = 1.0
    w_minus: float = 1.0
    tau_grid: tuple[float, ...] = field(default=DEFAULT_TAU_GRID)

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.w_plus <= 0 or self.w_minus <= 0:
            raise ValueError("ASSO weights must be positive")
        for t in self.tau_grid:
            if not 0 < t <= 1:
                raise ValueError(f"tau grid value {t} outside (0, 1]")


def association_matrix(M, tau: float) -> np.ndarray:
    """A[i, j] = conf(col i => col j) >= tau, with 0/0 read as 0."""
    x = _as_bits(M).astype(np.float64)
    co = x.T @ x
    support = np.diag(co).copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        conf = np.where(support[:, None] > 0, co / np.where(support > 0, support, 1)[:, None], 0.0)
    # tolerate float noise right at the threshold
    return conf >= tau - 1e-12


def asso(M, f: int, params: AssoParams | None = None, tau: float | None = None):
    """Greedy ASSO factorization; returns (B, C).

    Candidate basis vectors are rows of the association matrix. Each round
    picks the candidate whose positive per-row gains sum highest, and uses it
    on exactly the rows where that gain is positive. Rounds never uncover a
    cell, so error is non-increasing in ``f``.
    """
    params = params or AssoParams()
    tau = params.tau if tau is None else tau
    if f < 1:
        raise ValueError("factorization degree must be >= 1")
    m_bits = _as_bits(M)
    n, m = m_bits.shape
    if n == 0 or m == 0:
        raise ValueError("empty matrix")
    A = association_matrix(m_bits, tau)
    cand = A.astype(np.float64)
    weight = np.where(m_bits, params.w_plus, -params.w_minus)
    covered = np.zeros((n, m), dtype=bool)
    B = np.zeros((n, f), dtype=bool)
    C = np.zeros((f, m), dtype=bool)
    for t in range(f):
        W = np.where(covered, 0.0, weight)
        row_gain = W @ cand.T  # n x candidates
        total = np.clip(row_gain, 0, None).sum(axis=0)
        best = int(np.argmax(total))
        if total[best] <= 0:
            break
        use = row_gain[:, best] > 0
        B[:, t] = use
        C[t] = A[best]
        covered |= np.outer(use, A[best])
    return BooleanMatrix(B), BooleanMatrix(C)


def asso_sweep(M, f: int, tau_grid: Sequence[float] | None = None, params: AssoParams | None = None):
    """Run ASSO for each tau and keep the lowest-error factorization.

    Ties go to the smaller tau.
    """
    params = params or AssoParams()
    grid = tuple(params.tau_grid if tau_grid is None else tau_grid)
    if not grid:
        raise ValueError("empty tau grid")
    best = None
    for tau in sorted(grid):
        B, C = asso(M, f, params, tau=tau)
        err = factorization_error(M, B, C)
        if best is None or err < best[0]:
            best = (err, B, C)
    return best[1], best[2]


def _rows_of_all_patterns(width: int) -> np.ndarray:
    """All 0/1 vectors of ``width`` bits in ascending integer order, bit 0 first."""
    idx = np.arange(1 << width)
    return ((idx[:, None] >> np.arange(width)) & 1).astype(bool)


def exhaustive_bmf(M, f: int):
    """Globally optimal (B, C) by enumeration.

    Once one factor is fixed, the other decomposes into independent rows (or
    columns), each solved by trying all 2^f patterns. Only the smaller factor
    is enumerated, which bounds the search at ``2^(f * min(n, m))`` outer
    candidates. Ties keep the first optimum in ascending-integer order of the
    enumerated factor, then the lowest-valued pattern per row/column.
    """
    m_bits = _as_bits(M)
    n, m = m_bits.shape
    if f < 1:
        raise ValueError("factorization degree must be >= 1")
    if f >= m:
        B = np.zeros((n, f), dtype=bool)
        B[:, :m] = m_bits
        C = np.zeros((f, m), dtype=bool)
        C[:m] = np.eye(m, dtype=bool)
        return BooleanMatrix(B), BooleanMatrix(C)
    if f * min(n, m) > EXHAUSTIVE_BUDGET_BITS:
        raise TooLarge(f"search over 2^{f * min(n, m)} factors exceeds 2^{EXHAUSTIVE_BUDGET_BITS}")
    if m <= n:
        B, C = _enumerate_c(m_bits, f)
        return BooleanMatrix(B), BooleanMatrix(C)
    Ct, Bt = _enumerate_c(m_bits.T, f)
    return BooleanMatrix(Bt.T), BooleanMatrix(Ct.T)


def _enumerate_c(M: np.ndarray, f: int):
    n, m = M.shape
    patterns = _rows_of_all_patterns(f)  # 2^f x f, candidate rows of B
    best_err, best = None, None
    width = f * m
    shifts = np.arange(width)
    # process in chunks to bound memory
    chunk = max(1, (1 << 18) // (len(patterns) * n * m))
    for start in range(0, 1 << width, chunk):
        idx = np.arange(start, min(start + chunk, 1 << width))
        Cs = ((idx[:, None] >> shifts) & 1).astype(bool).reshape(-1, f, m)  # c x f x m
        prods = np.einsum("pf,cfm->cpm", patterns.astype(np.int32), Cs.astype(np.int32)) > 0
        # c x p x n errors per row choice
        errs = (prods[:, :, None, :] != M[None, None, :, :]).sum(axis=3)
        row_best = errs.min(axis=1)  # c x n
        totals = row_best.sum(axis=1)
        c = int(np.argmin(totals))
        if best_err is None or totals[c] < best_err:
            best_err = int(totals[c])
            choice = errs[c].argmin(axis=0)  # first min = lowest pattern
            best = (patterns[choice], Cs[c].copy())
    return best


def identity_factorization(M):
    """B = M, C = I_m: exact for any f >= m."""
    m_bits = _as_bits(M)
    return BooleanMatrix(m_bits), BooleanMatrix.identity(m_bits.shape[1])
