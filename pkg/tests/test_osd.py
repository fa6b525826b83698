"""Tests for ordered-statistics post-processing and the LP decode pipelines."""

import numpy as np
import pytest

from lposd import (
    BinaryMatrix,
    CssCode,
    InvalidParameter,
    OsdConfig,
    SingularSubmatrix,
    hgp_layout,
    build_overlap_pattern,
    lp_osd_decode,
    lp_round_decode,
    order_qubits,
    osd_postprocess,
)
from lposd.gf2 import rank
from lposd.osd import osd0, osd_cs


@pytest.fixture(scope="module")
def toy_pattern(toy22):
    code, h1, h2 = toy22
    lay = hgp_layout(h1, h2)
    dense_hz = code.hz.to_dense()
    return code, build_overlap_pattern(
        code, dense_hz[lay.z_check(0, 1)], dense_hz[lay.z_check(1, 1)]
    )


def committed_submatrix_rank(code, committed):
    dense = code.hx.to_dense()
    return rank(BinaryMatrix.from_dense(dense[:, committed]))


# ---------------------------------------------------------------------------
# configuration and ordering
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(InvalidParameter):
        OsdConfig(order="osd7")
    with pytest.raises(InvalidParameter):
        OsdConfig(lam=-1)
    with pytest.raises(InvalidParameter):
        OsdConfig(tie_break="alphabetical")
    cfg = OsdConfig()
    assert cfg.order == "osd_cs"
    assert cfg.lam == 60
    assert cfg.tie_break == "distance"


def test_ordering_structure(surface3):
    code = surface3
    rng = np.random.default_rng(1)
    soft = rng.random(code.n)
    s = np.zeros(code.hx.n_rows, dtype=np.uint8)
    s[0] = 1
    ordering = order_qubits(soft, code, s, OsdConfig())
    assert sorted(ordering.permutation) == list(range(code.n))
    r = rank(code.hx)
    assert ordering.committed.size == r
    assert committed_submatrix_rank(code, ordering.committed) == r
    together = np.concatenate([ordering.committed, ordering.remainder])
    assert sorted(together) == list(range(code.n))
    # descending soft value along the permutation
    values = soft[ordering.permutation]
    assert np.all(np.diff(np.round(values / 1e-9)) <= 0)


def test_ordering_deterministic_with_distance_ties(surface3):
    code = surface3
    soft = np.full(code.n, 0.5)
    s = np.zeros(code.hx.n_rows, dtype=np.uint8)
    s[2] = 1
    cfg = OsdConfig(tie_break="distance")
    first = order_qubits(soft, code, s, cfg)
    second = order_qubits(soft, code, s, cfg)
    assert np.array_equal(first.permutation, second.permutation)
    # all-tied soft values: the first qubit must sit on the flipped check
    assert first.permutation[0] in code.tanner.x_supports[2]


def test_ordering_random_ties_reproducible(surface3):
    code = surface3
    soft = np.full(code.n, 0.25)
    s = np.zeros(code.hx.n_rows, dtype=np.uint8)
    s[1] = 1
    a = order_qubits(soft, code, s, OsdConfig(tie_break="random", seed=5))
    b = order_qubits(soft, code, s, OsdConfig(tie_break="random", seed=5))
    assert np.array_equal(a.permutation, b.permutation)
    rng1 = np.random.default_rng(9)
    rng2 = np.random.default_rng(9)
    c = order_qubits(soft, code, s, OsdConfig(tie_break="random"), rng=rng1)
    d = order_qubits(soft, code, s, OsdConfig(tie_break="random"), rng=rng2)
    assert np.array_equal(c.permutation, d.permutation)


def test_soft_noise_below_quantum_cannot_reorder(surface3):
    code = surface3
    s = np.zeros(code.hx.n_rows, dtype=np.uint8)
    s[0] = 1
    base = np.full(code.n, 0.5)
    jitter = base + np.linspace(0, 1e-12, code.n)
    cfg = OsdConfig(tie_break="distance")
    assert np.array_equal(
        order_qubits(base, code, s, cfg).permutation,
        order_qubits(jitter, code, s, cfg).permutation,
    )


# ---------------------------------------------------------------------------
# the two OSD stages
# ---------------------------------------------------------------------------


def test_osd0_reproduces_syndrome(surface3):
    code = surface3
    rng = np.random.default_rng(17)
    for _ in range(25):
        e = (rng.random(code.n) < 0.15).astype(np.uint8)
        s = code.syndrome(e)
        soft = rng.random(code.n)
        ordering = order_qubits(soft, code, s, OsdConfig())
        out = osd0(code, s, ordering)
        assert np.array_equal(code.syndrome(out), s)


def test_osd_cs_never_heavier_than_osd0(surface3):
    code = surface3
    rng = np.random.default_rng(19)
    for _ in range(25):
        e = (rng.random(code.n) < 0.2).astype(np.uint8)
        s = code.syndrome(e)
        soft = rng.random(code.n)
        ordering = order_qubits(soft, code, s, OsdConfig())
        zero_order = osd0(code, s, ordering)
        sweep = osd_cs(code, s, ordering, lam=60)
        assert np.array_equal(code.syndrome(sweep), s)
        assert sweep.sum() <= zero_order.sum()


def test_osd_cs_small_lambda_still_consistent(surface3):
    code = surface3
    rng = np.random.default_rng(23)
    e = (rng.random(code.n) < 0.3).astype(np.uint8)
    s = code.syndrome(e)
    soft = rng.random(code.n)
    ordering = order_qubits(soft, code, s, OsdConfig())
    for lam in (0, 1, 2):
        out = osd_cs(code, s, ordering, lam=lam)
        assert np.array_equal(code.syndrome(out), s)


def test_perfect_soft_information_recovers_error(surface3):
    code = surface3
    dense = code.hx.to_dense()
    rng = np.random.default_rng(29)
    recovered = 0
    for _ in range(20):
        support = rng.choice(code.n, size=2, replace=False)
        e = np.zeros(code.n, dtype=np.uint8)
        e[support] = 1
        if rank(BinaryMatrix.from_dense(dense[:, support])) != 2:
            continue
        s = code.syndrome(e)
        ordering = order_qubits(e.astype(float), code, s, OsdConfig())
        out = osd0(code, s, ordering)
        assert np.array_equal(out, e)
        recovered += 1
    assert recovered >= 10


def test_unreachable_syndrome_raises(surface3):
    hx = BinaryMatrix.from_entries(2, 3, [(0, 0), (0, 1), (1, 0), (1, 1)])
    code = CssCode(hx, BinaryMatrix([], 3), name="dup-check")
    s = np.array([1, 0], dtype=np.uint8)
    ordering = order_qubits(np.zeros(3), code, s, OsdConfig())
    with pytest.raises(SingularSubmatrix):
        osd0(code, s, ordering)


def test_postprocess_dispatches_on_order(surface3):
    code = surface3
    rng = np.random.default_rng(31)
    e = (rng.random(code.n) < 0.2).astype(np.uint8)
    s = code.syndrome(e)
    soft = rng.random(code.n)
    zero, stage0 = osd_postprocess(code, s, soft, OsdConfig(order="osd0"))
    sweep, stage_cs = osd_postprocess(code, s, soft, OsdConfig(order="osd_cs"))
    assert stage0 == "osd-0"
    assert stage_cs == "osd-cs"
    ordering = order_qubits(soft, code, s, OsdConfig())
    assert np.array_equal(zero, osd0(code, s, ordering))
    assert np.array_equal(sweep, osd_cs(code, s, ordering, lam=60))


# ---------------------------------------------------------------------------
# full decode pipelines
# ---------------------------------------------------------------------------


def test_zero_syndrome_short_circuits(surface3):
    code = surface3
    s = np.zeros(code.hx.n_rows, dtype=np.uint8)
    for decode in (lp_osd_decode, lp_round_decode):
        res = decode(code, s)
        assert res.stage == "integral-lp"
        assert not res.correction.any()
        assert res.diagnostics["objective"] == 0.0
        assert res.diagnostics["lp_iterations"] == 0


def test_integral_lp_decodes_directly(surface3):
    code = surface3
    e = np.zeros(code.n, dtype=np.uint8)
    e[4] = 1
    s = code.syndrome(e)
    res = lp_osd_decode(code, s)
    assert res.stage == "integral-lp"
    assert res.diagnostics["fractional"] is False
    assert np.array_equal(code.syndrome(res.correction), s)
    assert res.correction.sum() == 1


def test_fractional_pattern_goes_to_osd(toy_pattern):
    code, pattern = toy_pattern
    s = pattern.syndrome
    sweep = lp_osd_decode(code, s, solver="scipy")
    assert sweep.stage == "osd-cs"
    assert sweep.diagnostics["fractional"] is True
    assert np.array_equal(code.syndrome(sweep.correction), s)
    zero = lp_osd_decode(code, s, OsdConfig(order="osd0"), solver="scipy")
    assert zero.stage == "osd-0"
    assert np.array_equal(code.syndrome(zero.correction), s)
    assert sweep.correction.sum() <= zero.correction.sum()


def test_fractional_pattern_rounding_has_no_guarantee(toy_pattern):
    code, pattern = toy_pattern
    res = lp_round_decode(code, pattern.syndrome, solver="scipy")
    assert res.stage == "rounded-lp"
    assert res.diagnostics["fractional"] is True
    assert res.diagnostics["objective"] == pytest.approx(4.0, abs=1e-7)


def test_decode_is_deterministic(toy_pattern):
    code, pattern = toy_pattern
    a = lp_osd_decode(code, pattern.syndrome, solver="scipy")
    b = lp_osd_decode(code, pattern.syndrome, solver="scipy")
    assert np.array_equal(a.correction, b.correction)
    assert a.stage == b.stage
