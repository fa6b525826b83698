"""Min-sum belief propagation baseline.

Syndrome-based message passing on the X Tanner graph with a flooding
schedule.  Check-to-qubit messages at iteration t are scaled by
1 - 2^-t, so early iterations are damped and the factor approaches 1.
The decoder stops as soon as its running hard decision reproduces the
syndrome; non-convergence within the iteration budget is reported as a
flag, never an error.  Reliabilities suitable for OSD ordering are the
posterior error probabilities 1/(1+exp(L_i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .codes import CssCode
from .errors import InvalidParameter
from .osd import DecodeResult, OsdConfig, osd_postprocess

__all__ = ["BpConfig", "BpResult", "min_sum_bp", "bp_osd_decode"]

_CLAMP = 50.0


@dataclass
class BpConfig:
    channel_p: float = 0.05
    max_iterations: int | None = None  # None means the block length

    def __post_init__(self):
        if not 0.0 < self.channel_p < 0.5:
            raise InvalidParameter("channel_p must lie in (0, 1/2)")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InvalidParameter("max_iterations must be >= 1")


@dataclass
class BpResult:
    hard: np.ndarray
    soft: np.ndarray
    converged: bool
    iterations: int


class _BpContext:
    """Per-code cache of the edge arrays used by the flooding schedule."""

    __slots__ = ("edge_check", "edge_qubit", "check_ptr", "n_edges")

    def __init__(self, code: CssCode):
        edges = code.tanner.x_edges  # ordered by check, then qubit
        self.n_edges = len(edges)
        self.edge_qubit = np.asarray([q for q, _ in edges], dtype=np.int64)
        self.edge_check = np.asarray([j for _, j in edges], dtype=np.int64)
        ptr = np.searchsorted(self.edge_check, np.arange(code.hx.n_rows))
        self.check_ptr = ptr


def _bp_context(code: CssCode) -> _BpContext:
    if code._bp_context is None:
        code._bp_context = _BpContext(code)
    return code._bp_context


def min_sum_bp(code: CssCode, s, cfg: BpConfig) -> BpResult:
    """Run scaled min-sum BP against syndrome s; see the module docstring."""
    ctx = _bp_context(code)
    n = code.n
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    max_iter = cfg.max_iterations if cfg.max_iterations is not None else n
    prior = math.log((1.0 - cfg.channel_p) / cfg.channel_p)
    syn_sign = 1.0 - 2.0 * s_arr[ctx.edge_check]

    eq, ec, ptr = ctx.edge_qubit, ctx.edge_check, ctx.check_ptr
    edge_index = np.arange(ctx.n_edges)
    c2v = np.zeros(ctx.n_edges)
    posterior = np.full(n, prior)
    hard = np.zeros(n, dtype=np.uint8)
    for t in range(1, max_iter + 1):
        alpha = 1.0 - 2.0 ** (-t)
        totals = np.bincount(eq, weights=c2v, minlength=n)
        v2c = np.clip(prior + totals[eq] - c2v, -_CLAMP, _CLAMP)

        # per-check sign product and two smallest magnitudes
        sg = np.where(v2c < 0.0, -1.0, 1.0)  # sign(0) counts as +
        neg = np.add.reduceat((sg < 0.0).astype(np.int64), ptr)
        prod_sign = 1.0 - 2.0 * (neg & 1)
        mag = np.abs(v2c)
        min1 = np.minimum.reduceat(mag, ptr)
        first_min = np.minimum.reduceat(
            np.where(mag == min1[ec], edge_index, ctx.n_edges), ptr
        )
        masked = mag.copy()
        masked[first_min] = np.inf
        min2 = np.minimum.reduceat(masked, ptr)
        out_mag = min1[ec].copy()
        out_mag[first_min] = min2
        c2v = np.clip(alpha * syn_sign * prod_sign[ec] * sg * out_mag,
                      -_CLAMP, _CLAMP)

        posterior = prior + np.bincount(eq, weights=c2v, minlength=n)
        hard = (posterior < 0.0).astype(np.uint8)
        if np.array_equal(code.syndrome(hard), s_arr):
            return BpResult(hard=hard, soft=expit(-posterior), converged=True,
                            iterations=t)
    return BpResult(hard=hard, soft=expit(-posterior), converged=False,
                    iterations=max_iter)


def bp_osd_decode(code: CssCode, s, bp_cfg: BpConfig | None = None,
                  osd_cfg: OsdConfig | None = None, *,
                  rng: np.random.Generator | None = None) -> DecodeResult:
    """BP first; on non-convergence, OSD over the BP reliabilities.

    The OSD tie-break defaults to random here (the distance heuristic is
    tuned to LP soft output).
    """
    bp_cfg = bp_cfg or BpConfig()
    osd_cfg = osd_cfg or OsdConfig(tie_break="random")
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    result = min_sum_bp(code, s_arr, bp_cfg)
    diag = {"bp_converged": result.converged, "bp_iterations": result.iterations}
    if result.converged:
        return DecodeResult(correction=result.hard, stage="bp-converged",
                            diagnostics=diag)
    correction, stage = osd_postprocess(code, s_arr, result.soft, osd_cfg, rng)
    return DecodeResult(correction=correction, stage=stage, diagnostics=diag)
