"""Monte Carlo estimation of logical error rates across decoders.

Six decoder pipelines share two expensive front ends: the LP relaxation
("lp-round", "lp-osd0", "lp-osdcs") and min-sum message passing ("bp",
"bp-osd0", "bp-osdcs").  A trial solves each front end once and fans the
result out, so joint runs cost one solve per family, not one per decoder.
Random streams are keyed by (seed, point index, trial index) plus a fixed
per-decoder tag, which makes every decoder's outcome independent of which
other decoders share the run and of the worker count.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bp import BpConfig, min_sum_bp
from .codes import CssCode, sample_random_hgp
from .errors import EnumerationTooLarge, InvalidParameter, IterationLimit
from .gf2 import in_rowspace
from .lp import build_syndrome_lp, is_integral, round_independent, solve_lp
from .osd import OsdConfig, osd_postprocess

__all__ = [
    "DECODER_NAMES",
    "DecoderSpec",
    "SimConfig",
    "PointResult",
    "EnsembleResult",
    "SweepRow",
    "sample_error",
    "is_success",
    "decode_syndrome",
    "run_point",
    "run_ensemble",
    "exhaustive_sweep",
    "wilson_interval",
    "write_results",
    "read_results",
]

logger = logging.getLogger(__name__)

DECODER_NAMES = ("lp-round", "lp-osd0", "lp-osdcs", "bp", "bp-osd0", "bp-osdcs")
_DECODER_TAG = {name: idx for idx, name in enumerate(DECODER_NAMES)}

_WILSON_Z = 1.959963984540054  # two-sided 95%
_SWEEP_GUARD = 10_000_000


@dataclass(frozen=True)
class DecoderSpec:
    """Names a decoding pipeline and configures its stages.

    ``tie_break=None`` picks the pipeline default: BFS distance to the
    nearest flipped check after an LP front end, a seeded shuffle after
    message passing.  ``bp_channel_p=None`` uses the simulated physical
    error rate as the channel prior; ``bp_iteration_cap=None`` runs up to
    the block length.  ``label`` distinguishes two configurations of the
    same pipeline within one run (defaults to the pipeline name).
    """

    name: str
    lam: int = 60
    tie_break: str | None = None
    solver: str = "embedded"
    bp_iteration_cap: int | None = None
    bp_channel_p: float | None = None
    label: str | None = None

    def __post_init__(self):
        if self.name not in DECODER_NAMES:
            raise InvalidParameter(
                f"unknown decoder {self.name!r}; expected one of {DECODER_NAMES}")
        if self.tie_break not in (None, "distance", "random"):
            raise InvalidParameter(f"unknown tie_break {self.tie_break!r}")

    @property
    def tag(self) -> int:
        return _DECODER_TAG[self.name]

    @property
    def key(self) -> str:
        return self.label if self.label is not None else self.name

    @property
    def uses_lp(self) -> bool:
        return self.name.startswith("lp")

    def resolved_tie_break(self) -> str:
        if self.tie_break is not None:
            return self.tie_break
        return "distance" if self.uses_lp else "random"

    def osd_config(self) -> OsdConfig | None:
        if self.name.endswith("osd0"):
            order = "osd0"
        elif self.name.endswith("osdcs"):
            order = "osd_cs"
        else:
            return None
        return OsdConfig(order=order, lam=self.lam,
                         tie_break=self.resolved_tie_break())

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "label": self.key,
            "lam": self.lam,
            "tie_break": self.resolved_tie_break(),
            "solver": self.solver,
            "bp_iteration_cap": self.bp_iteration_cap,
            "bp_channel_p": self.bp_channel_p,
        }


def as_decoder(spec) -> DecoderSpec:
    if isinstance(spec, DecoderSpec):
        return spec
    if isinstance(spec, str):
        return DecoderSpec(name=spec)
    raise InvalidParameter(f"cannot interpret {spec!r} as a decoder")


@dataclass(frozen=True)
class SimConfig:
    """One simulation request: a code source, decoders, and sweep points."""

    code: str
    decoders: tuple[DecoderSpec, ...]
    ps: tuple[float, ...]
    trials: int
    seed: int = 0
    workers: int = 1
    n_codes: int = 1
    trials_per_code: int = 10

    def __post_init__(self):
        for p in self.ps:
            if not 0.0 < p < 0.5:
                raise InvalidParameter(f"physical error rate {p} outside (0, 1/2)")
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if self.workers < 1:
            raise InvalidParameter("workers must be >= 1")
        if self.n_codes < 1 or self.trials_per_code < 1:
            raise InvalidParameter("ensemble sizes must be >= 1")

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "decoders": [d.to_record() for d in self.decoders],
            "ps": list(self.ps),
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "n_codes": self.n_codes,
            "trials_per_code": self.trials_per_code,
        }


@dataclass
class PointResult:
    """Aggregated outcome of one (code, decoder, p) sweep point."""

    code_name: str
    decoder: str
    pipeline: str
    p: float
    trials: int
    failures: int
    p_l: float
    ci_low: float
    ci_high: float
    wrong_syndrome: int
    p_ws: float
    fractional: int
    solver_faults: int
    stage_counts: dict[str, int]
    mean_decode_seconds: float
    seed: int
    point_index: int

    @property
    def ws_ratio(self) -> float | None:
        """p_ws / p_L, or None when no failures occurred."""
        if self.failures == 0:
            return None
        return self.wrong_syndrome / self.failures

    def to_record(self) -> dict:
        return {
            "code": self.code_name,
            "decoder": self.decoder,
            "pipeline": self.pipeline,
            "p": self.p,
            "trials": self.trials,
            "failures": self.failures,
            "p_l": self.p_l,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "wrong_syndrome": self.wrong_syndrome,
            "p_ws": self.p_ws,
            "ws_ratio": self.ws_ratio,
            "fractional": self.fractional,
            "solver_faults": self.solver_faults,
            "stage_counts": dict(sorted(self.stage_counts.items())),
            "mean_decode_seconds": self.mean_decode_seconds,
            "seed": self.seed,
            "point_index": self.point_index,
        }


@dataclass
class EnsembleResult:
    """Pooled outcome over an ensemble of random codes at one (decoder, p)."""

    decoder: str
    pipeline: str
    p: float
    n_codes: int
    trials: int
    failures: int
    p_l: float
    ci_low: float
    ci_high: float
    per_code_failures: tuple[int, ...]
    trials_per_code: int
    seed: int

    def to_record(self) -> dict:
        return {
            "decoder": self.decoder,
            "pipeline": self.pipeline,
            "p": self.p,
            "n_codes": self.n_codes,
            "trials": self.trials,
            "failures": self.failures,
            "p_l": self.p_l,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "per_code_failures": list(self.per_code_failures),
            "trials_per_code": self.trials_per_code,
            "seed": self.seed,
        }


@dataclass
class SweepRow:
    weight: int
    n_errors: int
    n_failures: int


def wilson_interval(failures: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if not 0 <= failures <= trials:
        raise InvalidParameter("failures must lie in [0, trials]")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if failures == 0 else max(0.0, center - half)
    high = 1.0 if failures == trials else min(1.0, center + half)
    return low, high


def sample_error(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent bit flips, each with probability p."""
    if not 0.0 < p < 1.0:
        raise InvalidParameter(f"error probability {p} outside (0, 1)")
    return (rng.random(n) < p).astype(np.uint8)


def is_success(code: CssCode, error, correction) -> bool:
    """True when the residual error acts trivially, i.e. is a Z stabilizer."""
    e = np.asarray(error, dtype=np.uint8) & 1
    e_hat = np.asarray(correction, dtype=np.uint8) & 1
    if e.shape != e_hat.shape:
        raise InvalidParameter("error and correction lengths differ")
    return in_rowspace(code.hz, e ^ e_hat)


def _error_rng(seed: int, point_index: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(point_index, trial))
    return np.random.Generator(np.random.PCG64(ss))


def _decoder_rng(seed: int, point_index: int, trial: int, tag: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(point_index, trial, tag))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class _Tally:
    trials: int = 0
    failures: int = 0
    wrong_syndrome: int = 0
    fractional: int = 0
    solver_faults: int = 0
    stage_counts: dict = field(default_factory=dict)
    decode_seconds: float = 0.0

    def merge(self, other: "_Tally") -> None:
        self.trials += other.trials
        self.failures += other.failures
        self.wrong_syndrome += other.wrong_syndrome
        self.fractional += other.fractional
        self.solver_faults += other.solver_faults
        for stage, count in other.stage_counts.items():
            self.stage_counts[stage] = self.stage_counts.get(stage, 0) + count
        self.decode_seconds += other.decode_seconds


@dataclass
class _TrialOutcome:
    correction: np.ndarray
    stage: str
    fractional: bool
    faulted: bool
    seconds: float


def _decode_all(code: CssCode, specs: Sequence[DecoderSpec], s: np.ndarray,
                p: float, rng_for: Mapping[str, np.random.Generator],
                ) -> dict[str, _TrialOutcome]:
    """Run every pipeline on one syndrome, sharing front-end solves.

    A front end's wall time is charged to every pipeline that consumed it,
    so per-decoder times match what a standalone run would measure.
    """
    out: dict[str, _TrialOutcome] = {}
    zeros = np.zeros(code.n, dtype=np.uint8)
    if not s.any():
        for spec in specs:
            stage = "integral-lp" if spec.uses_lp else "bp-converged"
            out[spec.key] = _TrialOutcome(zeros, stage, False, False, 0.0)
        return out

    lp_cache: dict[str, tuple[object, float]] = {}
    bp_cache: dict[tuple, tuple[object, float]] = {}
    for spec in specs:
        if spec.uses_lp:
            if spec.solver not in lp_cache:
                start = time.perf_counter()
                try:
                    sol = solve_lp(build_syndrome_lp(code, s), solver=spec.solver)
                except IterationLimit:
                    sol = None
                lp_cache[spec.solver] = (sol, time.perf_counter() - start)
            sol, front_secs = lp_cache[spec.solver]
            start = time.perf_counter()
            if sol is None:
                outcome = _TrialOutcome(zeros, "solver-fault", False, True, 0.0)
            elif is_integral(sol):
                outcome = _TrialOutcome(round_independent(sol.x()),
                                        "integral-lp", False, False, 0.0)
            elif spec.name == "lp-round":
                outcome = _TrialOutcome(round_independent(sol.x()),
                                        "rounded-lp", True, False, 0.0)
            else:
                correction, stage = osd_postprocess(
                    code, s, sol.x(), spec.osd_config(), rng=rng_for[spec.key])
                outcome = _TrialOutcome(correction, stage, True, False, 0.0)
            outcome.seconds = front_secs + (time.perf_counter() - start)
        else:
            channel_p = spec.bp_channel_p if spec.bp_channel_p is not None else p
            key = (channel_p, spec.bp_iteration_cap)
            if key not in bp_cache:
                cfg = BpConfig(channel_p=channel_p,
                               max_iterations=spec.bp_iteration_cap)
                start = time.perf_counter()
                bp_cache[key] = (min_sum_bp(code, s, cfg),
                                 time.perf_counter() - start)
            result, front_secs = bp_cache[key]
            start = time.perf_counter()
            if result.converged:
                outcome = _TrialOutcome(result.hard, "bp-converged", False, False, 0.0)
            elif spec.name == "bp":
                outcome = _TrialOutcome(result.hard, "bp-stalled", False, False, 0.0)
            else:
                correction, stage = osd_postprocess(
                    code, s, result.soft, spec.osd_config(), rng=rng_for[spec.key])
                outcome = _TrialOutcome(correction, stage, False, False, 0.0)
            outcome.seconds = front_secs + (time.perf_counter() - start)
        out[spec.key] = outcome
    return out


def decode_syndrome(code: CssCode, decoder, s, p: float = 0.05,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """One-shot decode of a syndrome with a named pipeline."""
    spec = as_decoder(decoder)
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    if rng is None:
        rng = np.random.default_rng(0)
    outcome = _decode_all(code, [spec], s_arr, p, {spec.key: rng})[spec.key]
    return outcome.correction


def _run_trials(code: CssCode, specs: Sequence[DecoderSpec], p: float,
                seed: int, point_index: int, start: int, stop: int,
                ) -> dict[str, _Tally]:
    tallies = {spec.key: _Tally() for spec in specs}
    for trial in range(start, stop):
        err_rng = _error_rng(seed, point_index, trial)
        error = sample_error(code.n, p, err_rng)
        s = code.syndrome(error)
        rng_for = {
            spec.key: _decoder_rng(seed, point_index, trial, spec.tag)
            for spec in specs
        }
        outcomes = _decode_all(code, specs, s, p, rng_for)
        for spec in specs:
            outcome = outcomes[spec.key]
            tally = tallies[spec.key]
            tally.trials += 1
            tally.decode_seconds += outcome.seconds
            tally.stage_counts[outcome.stage] = (
                tally.stage_counts.get(outcome.stage, 0) + 1)
            if outcome.fractional:
                tally.fractional += 1
            if outcome.faulted:
                tally.solver_faults += 1
            if not is_success(code, error, outcome.correction):
                tally.failures += 1
                if (code.syndrome(outcome.correction) != s).any():
                    tally.wrong_syndrome += 1
    return tallies


def _worker_entry(args) -> dict[str, _Tally]:
    return _run_trials(*args)


def _chunk_ranges(trials: int, workers: int) -> list[tuple[int, int]]:
    chunk = max(1, math.ceil(trials / workers))
    return [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]


def run_point(code: CssCode, decoder, p: float, trials: int, seed: int = 0, *,
              point_index: int = 0, workers: int = 1):
    """Estimate failure statistics for one physical error rate.

    ``decoder`` may be a single name/spec or a sequence; a sequence shares
    the LP and message-passing front ends across pipelines and returns one
    result per entry.  Results are independent of ``workers``.
    """
    single = isinstance(decoder, (str, DecoderSpec))
    specs = [as_decoder(decoder)] if single else [as_decoder(d) for d in decoder]
    if len({spec.key for spec in specs}) != len(specs):
        raise InvalidParameter("duplicate decoder labels in one run")
    if not 0.0 < p < 0.5:
        raise InvalidParameter(f"physical error rate {p} outside (0, 1/2)")
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")

    if workers > 1 and trials > 1:
        import multiprocessing

        ranges = _chunk_ranges(trials, workers)
        args = [(code, specs, p, seed, point_index, lo, hi) for lo, hi in ranges]
        with multiprocessing.Pool(min(workers, len(ranges))) as pool:
            partials = pool.map(_worker_entry, args)
        tallies = {spec.key: _Tally() for spec in specs}
        for part in partials:
            for name, tally in part.items():
                tallies[name].merge(tally)
    else:
        tallies = _run_trials(code, specs, p, seed, point_index, 0, trials)

    results = []
    for spec in specs:
        tally = tallies[spec.key]
        if tally.solver_faults:
            logger.warning("%s: %d solver faults at p=%g counted as failures",
                           spec.key, tally.solver_faults, p)
        low, high = wilson_interval(tally.failures, tally.trials)
        results.append(PointResult(
            code_name=code.name or f"css-n{code.n}",
            decoder=spec.key,
            pipeline=spec.name,
            p=p,
            trials=tally.trials,
            failures=tally.failures,
            p_l=tally.failures / tally.trials,
            ci_low=low,
            ci_high=high,
            wrong_syndrome=tally.wrong_syndrome,
            p_ws=tally.wrong_syndrome / tally.trials,
            fractional=tally.fractional,
            solver_faults=tally.solver_faults,
            stage_counts=dict(tally.stage_counts),
            mean_decode_seconds=tally.decode_seconds / tally.trials,
            seed=seed,
            point_index=point_index,
        ))
    return results[0] if single else results


def _bootstrap_interval(per_code_failures: Sequence[int], trials_per_code: int,
                        seed: int, resamples: int = 1000) -> tuple[float, float]:
    """Percentile bootstrap over codes of the pooled failure rate."""
    counts = np.asarray(per_code_failures, dtype=np.int64)
    n_codes = counts.size
    if n_codes == 1:
        return wilson_interval(int(counts[0]), trials_per_code)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed, spawn_key=(987654321,))))
    picks = rng.integers(0, n_codes, size=(resamples, n_codes))
    rates = counts[picks].sum(axis=1) / (n_codes * trials_per_code)
    return float(np.percentile(rates, 2.5)), float(np.percentile(rates, 97.5))


def run_ensemble(s: int, decoder, p: float, n_codes: int,
                 trials_per_code: int = 10, seed: int = 0, *,
                 workers: int = 1, resamples: int = 1000,
                 code_factory=None):
    """Pool failures over an ensemble of random product codes.

    ``s`` scales the random family (block length grows with s^2).  Codes are
    drawn from seeds derived from ``seed``; each code decodes its own error
    batch.  The confidence interval resamples codes with replacement.
    ``decoder`` may again be one spec or a sequence.
    """
    single = isinstance(decoder, (str, DecoderSpec))
    specs = [as_decoder(decoder)] if single else [as_decoder(d) for d in decoder]
    if n_codes < 1:
        raise InvalidParameter("n_codes must be >= 1")
    factory = code_factory if code_factory is not None else sample_random_hgp

    per_code: dict[str, list[int]] = {spec.key: [] for spec in specs}
    for idx in range(n_codes):
        code_seed = int(np.random.SeedSequence(
            seed, spawn_key=(idx,)).generate_state(1)[0])
        code = factory(s, code_seed)
        point = run_point(code, specs, p, trials_per_code, seed,
                          point_index=idx, workers=workers)
        for res in point:
            per_code[res.decoder].append(res.failures)

    results = []
    total_trials = n_codes * trials_per_code
    for spec in specs:
        failures = per_code[spec.key]
        total_failures = sum(failures)
        low, high = _bootstrap_interval(failures, trials_per_code, seed,
                                        resamples=resamples)
        results.append(EnsembleResult(
            decoder=spec.key,
            pipeline=spec.name,
            p=p,
            n_codes=n_codes,
            trials=total_trials,
            failures=total_failures,
            p_l=total_failures / total_trials,
            ci_low=low,
            ci_high=high,
            per_code_failures=tuple(failures),
            trials_per_code=trials_per_code,
            seed=seed,
        ))
    return results[0] if single else results


def exhaustive_sweep(code: CssCode, decoder, max_weight: int, *,
                     seed: int = 0) -> list[SweepRow]:
    """Decode every error of weight up to ``max_weight`` and count failures.

    The enumeration is guarded at ten million patterns.
    """
    if max_weight < 0:
        raise InvalidParameter("max_weight must be >= 0")
    total = sum(math.comb(code.n, w) for w in range(max_weight + 1))
    if total > _SWEEP_GUARD:
        raise EnumerationTooLarge(
            f"{total} error patterns exceed the guard of {_SWEEP_GUARD}")
    spec = as_decoder(decoder)
    rows = []
    for weight in range(max_weight + 1):
        n_errors = 0
        n_failures = 0
        for idx, support in enumerate(itertools.combinations(range(code.n), weight)):
            error = np.zeros(code.n, dtype=np.uint8)
            error[list(support)] = 1
            s = code.syndrome(error)
            rng = _decoder_rng(seed, weight, idx, spec.tag)
            outcome = _decode_all(code, [spec], s, 0.05,
                                  {spec.key: rng})[spec.key]
            n_errors += 1
            if not is_success(code, error, outcome.correction):
                n_failures += 1
        rows.append(SweepRow(weight=weight, n_errors=n_errors,
                             n_failures=n_failures))
    return rows


def write_results(path, records: Iterable[Mapping]) -> None:
    """One JSON record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_results(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
