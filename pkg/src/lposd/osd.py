"""Ordered-statistics rounding of soft decoder output.

Qubits are sorted by how unreliable the soft information says they are;
the first rank(H_X) linearly independent columns in that order form the
committed set, which is inverted against the syndrome.  The zero-order
variant stops there; the combination-sweep variant additionally tries
every weight-1 pattern on the leftover set and every weight-2 pattern on
its first ``lam`` positions, keeping the lightest syndrome-consistent
candidate.  Either way the output reproduces the syndrome exactly, which
independent rounding cannot promise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codes import CssCode, bfs_distance_to_flipped
from .errors import InvalidParameter, SingularSubmatrix
from .gf2 import BinaryMatrix, rank
from .lp import build_syndrome_lp, is_integral, round_independent, solve_lp

__all__ = [
    "OsdConfig",
    "QubitOrdering",
    "DecodeResult",
    "order_qubits",
    "osd0",
    "osd_cs",
    "lp_osd_decode",
    "lp_round_decode",
]

# Soft values are snapped to a grid before sorting so that solver noise far
# below any meaningful signal cannot reorder genuinely tied qubits.
_SOFT_QUANTUM = 1e-9


@dataclass
class OsdConfig:
    order: str = "osd_cs"  # "osd0" | "osd_cs"
    lam: int = 60
    tie_break: str = "distance"  # "distance" | "random"
    seed: int | None = None

    def __post_init__(self):
        if self.order not in ("osd0", "osd_cs"):
            raise InvalidParameter(f"unknown OSD order {self.order!r}")
        if self.lam < 0:
            raise InvalidParameter("lam must be >= 0")
        if self.tie_break not in ("distance", "random"):
            raise InvalidParameter(f"unknown tie_break {self.tie_break!r}")


@dataclass
class QubitOrdering:
    """Sorted qubits split into the committed set and the remainder.

    ``committed`` holds the first rank(H_X) qubits whose columns are
    linearly independent, in permutation order; ``remainder`` is every
    other qubit, also in permutation order.
    """

    permutation: np.ndarray
    committed: np.ndarray
    remainder: np.ndarray


@dataclass
class DecodeResult:
    correction: np.ndarray
    stage: str
    diagnostics: dict = field(default_factory=dict)


class _OsdContext:
    """Per-code cache: packed H_X columns and the matrix rank."""

    __slots__ = ("columns", "rank")

    def __init__(self, code: CssCode):
        hx = code.hx
        cols = [0] * code.n
        for r in range(hx.n_rows):
            bit = 1 << r
            for q in hx.row_support(r):
                cols[q] |= bit
        self.columns = cols
        self.rank = rank(hx)


def _context(code: CssCode) -> _OsdContext:
    if code._osd_context is None:
        code._osd_context = _OsdContext(code)
    return code._osd_context


def order_qubits(soft, code: CssCode, s, cfg: OsdConfig,
                 rng: np.random.Generator | None = None) -> QubitOrdering:
    """Sort qubits by descending soft value and pick the committed set.

    Ties break by ascending distance to the nearest flipped check (with
    unreachable qubits last) or by a seeded shuffle; the final tie-break is
    ascending qubit index, so the ordering is deterministic.
    """
    soft_arr = np.asarray(soft, dtype=float)
    n = code.n
    if soft_arr.shape != (n,):
        raise ValueError(f"soft vector must have length {n}")
    quantized = np.round(soft_arr / _SOFT_QUANTUM)
    if cfg.tie_break == "distance":
        tie_key = bfs_distance_to_flipped(code, s)
    else:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        tie_key = rng.random(n)
    perm = np.lexsort((np.arange(n), tie_key, -quantized))

    ctx = _context(code)
    cols = ctx.columns
    committed: list[int] = []
    committed_mask = np.zeros(n, dtype=bool)
    basis: dict[int, int] = {}
    for q in perm:
        if len(committed) == ctx.rank:
            break
        v = cols[q]
        while v:
            p = v.bit_length() - 1
            if p not in basis:
                basis[p] = v
                committed.append(int(q))
                committed_mask[q] = True
                break
            v ^= basis[p]
    if len(committed) != ctx.rank:
        raise SingularSubmatrix("could not assemble a full-rank committed set")
    remainder = perm[~committed_mask[perm]]
    return QubitOrdering(
        permutation=perm,
        committed=np.asarray(committed, dtype=np.int64),
        remainder=np.asarray(remainder, dtype=np.int64),
    )


def _eliminate(code: CssCode, ordering: QubitOrdering, s) -> tuple[np.ndarray, np.ndarray]:
    """Reduce [H_committed | s | H_remainder] in one pass.

    Returns (base, reach): ``base`` is the committed-set solution of
    H·e = s with the remainder forced to zero; ``reach`` maps each
    remainder column into committed coordinates, so flipping remainder
    qubit t changes the committed part by reach[:, t].  Both are expressed
    in committed order.
    """
    hx = code.hx
    m = hx.n_rows
    r = ordering.committed.size
    t_cols = ordering.remainder
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    dense = np.zeros((m, hx.n_cols), dtype=np.uint8)
    for row in range(m):
        dense[row, list(hx.row_support(row))] = 1
    aug = np.empty((m, r + 1 + t_cols.size), dtype=np.uint8)
    aug[:, :r] = dense[:, ordering.committed]
    aug[:, r] = s_arr
    aug[:, r + 1:] = dense[:, t_cols]

    pivot_row_of = np.empty(r, dtype=np.int64)
    next_row = 0
    for col in range(r):
        hit = np.flatnonzero(aug[next_row:, col])
        if hit.size == 0:
            raise SingularSubmatrix(f"committed column {col} became dependent")
        piv = next_row + hit[0]
        if piv != next_row:
            aug[[next_row, piv]] = aug[[piv, next_row]]
        others = np.flatnonzero(aug[:, col])
        others = others[others != next_row]
        aug[others] ^= aug[next_row]
        pivot_row_of[col] = next_row
        next_row += 1
    if next_row < m and aug[next_row:, r:].any():
        raise SingularSubmatrix("syndrome outside the check-matrix column space")
    base = aug[pivot_row_of, r].astype(np.uint8)
    reach = aug[pivot_row_of, r + 1:].astype(np.uint8)
    return base, reach


def _scatter(code: CssCode, ordering: QubitOrdering,
             committed_bits: np.ndarray, remainder_picks: Sequence[int]) -> np.ndarray:
    out = np.zeros(code.n, dtype=np.uint8)
    out[ordering.committed] = committed_bits
    for t in remainder_picks:
        out[ordering.remainder[t]] = 1
    return out


def osd0(code: CssCode, s, ordering: QubitOrdering) -> np.ndarray:
    """Zero-order correction: invert the committed set against s."""
    base, _ = _eliminate(code, ordering, s)
    return _scatter(code, ordering, base, ())


def osd_cs(code: CssCode, s, ordering: QubitOrdering, lam: int = 60) -> np.ndarray:
    """Combination-sweep correction.

    Candidates, in enumeration order: the zero-order solution, every
    weight-1 pattern on the remainder, and every weight-2 pattern within
    the first min(lam, |remainder|) remainder positions (lexicographic).
    The lightest candidate wins; ties go to the earliest enumerated.
    """
    base, reach = _eliminate(code, ordering, s)
    n_t = ordering.remainder.size
    base_weight = int(base.sum())
    if n_t == 0:
        return _scatter(code, ordering, base, ())
    col_weight = reach.sum(axis=0, dtype=np.int64)
    overlap = base.astype(np.int64) @ reach
    weights_1 = base_weight + col_weight - 2 * overlap + 1

    lam_eff = min(lam, n_t)
    if lam_eff >= 2:
        window = reach[:, :lam_eff].astype(np.int64)
        gram = window.T @ window
        base_gram = (window * base[:, None]).T @ window
        ca = col_weight[:lam_eff]
        ua = overlap[:lam_eff]
        pair_a, pair_b = np.triu_indices(lam_eff, k=1)
        xor_weight = ca[pair_a] + ca[pair_b] - 2 * gram[pair_a, pair_b]
        xor_overlap = ua[pair_a] + ua[pair_b] - 2 * base_gram[pair_a, pair_b]
        weights_2 = base_weight + xor_weight - 2 * xor_overlap + 2
    else:
        pair_a = pair_b = np.empty(0, dtype=np.int64)
        weights_2 = np.empty(0, dtype=np.int64)

    all_weights = np.concatenate(([base_weight], weights_1, weights_2))
    winner = int(np.argmin(all_weights))
    if winner == 0:
        return _scatter(code, ordering, base, ())
    if winner <= n_t:
        t = winner - 1
        return _scatter(code, ordering, base ^ reach[:, t], (t,))
    p = winner - 1 - n_t
    t1, t2 = int(pair_a[p]), int(pair_b[p])
    return _scatter(code, ordering, base ^ reach[:, t1] ^ reach[:, t2], (t1, t2))


def osd_postprocess(code: CssCode, s, soft, cfg: OsdConfig,
                    rng: np.random.Generator | None = None) -> tuple[np.ndarray, str]:
    """Order by the soft vector, then run the configured OSD stage."""
    ordering = order_qubits(soft, code, s, cfg, rng=rng)
    if cfg.order == "osd0":
        return osd0(code, s, ordering), "osd-0"
    return osd_cs(code, s, ordering, cfg.lam), "osd-cs"


def lp_osd_decode(code: CssCode, s, cfg: OsdConfig | None = None, *,
                  solver: str = "embedded", weights=None,
                  rng: np.random.Generator | None = None) -> DecodeResult:
    """Full decode: solve the syndrome LP, return integral solutions
    directly, and hand fractional ones to OSD.

    An integral LP optimum is a certified minimum-weight correction (with
    unit objective weights).  The all-zero syndrome short-circuits without
    touching the solver.
    """
    cfg = cfg or OsdConfig()
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    if not s_arr.any():
        return DecodeResult(
            correction=np.zeros(code.n, dtype=np.uint8),
            stage="integral-lp",
            diagnostics={"objective": 0.0, "fractional": False, "lp_iterations": 0},
        )
    sol = solve_lp(build_syndrome_lp(code, s_arr, weights), solver=solver)
    diag = {
        "objective": sol.objective,
        "lp_iterations": sol.iterations,
        "solver": sol.solver,
    }
    if is_integral(sol):
        correction = round_independent(sol.x())
        diag["fractional"] = False
        return DecodeResult(correction=correction, stage="integral-lp", diagnostics=diag)
    diag["fractional"] = True
    correction, stage = osd_postprocess(code, s_arr, sol.x(), cfg, rng)
    return DecodeResult(correction=correction, stage=stage, diagnostics=diag)


def lp_round_decode(code: CssCode, s, *, solver: str = "embedded",
                    weights=None) -> DecodeResult:
    """LP followed by independent per-bit rounding (no syndrome guarantee)."""
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    if not s_arr.any():
        return DecodeResult(
            correction=np.zeros(code.n, dtype=np.uint8),
            stage="integral-lp",
            diagnostics={"objective": 0.0, "fractional": False, "lp_iterations": 0},
        )
    sol = solve_lp(build_syndrome_lp(code, s_arr, weights), solver=solver)
    fractional = not is_integral(sol)
    return DecodeResult(
        correction=round_independent(sol.x()),
        stage="rounded-lp" if fractional else "integral-lp",
        diagnostics={
            "objective": sol.objective,
            "fractional": fractional,
            "lp_iterations": sol.iterations,
            "solver": sol.solver,
        },
    )
