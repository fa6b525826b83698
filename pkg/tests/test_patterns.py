"""Tests for uncorrectable-pattern construction and exact certificates."""

import dataclasses
import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from lposd import (
    BinaryMatrix,
    InvalidParameter,
    PreconditionViolated,
    ZCycle,
    build_cycle_pattern,
    build_overlap_pattern,
    build_syndrome_lp,
    check_poison,
    hgp_cycle,
    hgp_layout,
    hypergraph_product,
    in_rowspace,
    is_reduced,
    rank,
    read_patterns,
    repetition_parity_check,
    search_patterns,
    solve_lp,
    stabilizers_within,
    verify_certificate,
    verify_hgp_cycle,
    write_patterns,
)
from lposd.codes import rotated_surface_code
from lposd.patterns import pattern_to_record, record_to_pattern


@pytest.fixture(scope="module")
def toy_pattern(toy22):
    code, h1, h2 = toy22
    lay = hgp_layout(h1, h2)
    dz = code.hz.to_dense()
    pattern = build_overlap_pattern(
        code, dz[lay.z_check(0, 1)], dz[lay.z_check(1, 1)]
    )
    return code, pattern


@pytest.fixture(scope="module")
def ring_pattern(ring108):
    code, h_ring, h_c9 = ring108
    lay = hgp_layout(h_ring, h_c9)
    dz = code.hz.to_dense()
    gens = [dz[lay.z_check(b, 0)] for b in range(4)]
    return code, build_cycle_pattern(code, gens)


def span_rows(vectors, n):
    dense = np.zeros((len(vectors), n), dtype=np.uint8)
    for i, v in enumerate(vectors):
        dense[i] = v
    return BinaryMatrix.from_dense(dense)


def flow_lp_status(code, e):
    """Feasibility LP of the simplified dual flow conditions.

    Variables are one free value per X Tanner edge; a qubit's incident
    values must sum to at most +1 (clean) or -1 (in the error), and every
    pair of values at a check must have nonnegative sum.
    """
    tan = code.tanner
    edges = list(tan.x_edges)
    col = {edge: i for i, edge in enumerate(edges)}
    rows_ub, rhs = [], []
    for q in range(code.n):
        row = np.zeros(len(edges))
        for j in tan.x_checks_of_qubit[q]:
            row[col[(q, j)]] = 1.0
        rows_ub.append(row)
        rhs.append(1.0 - 2.0 * float(e[q]))
    for j in range(code.hx.n_rows):
        for a, b in itertools.combinations(tan.x_supports[j], 2):
            row = np.zeros(len(edges))
            row[col[(a, j)]] = -1.0
            row[col[(b, j)]] = -1.0
            rows_ub.append(row)
            rhs.append(0.0)
    res = linprog(
        np.zeros(len(edges)),
        A_ub=np.array(rows_ub),
        b_ub=np.array(rhs),
        bounds=[(None, None)] * len(edges),
        method="highs",
    )
    return res, edges


# ---------------------------------------------------------------------------
# overlap construction
# ---------------------------------------------------------------------------


def test_overlap_pattern_on_toy_code(toy_pattern):
    code, pattern = toy_pattern
    assert pattern.kind == "overlap"
    assert pattern.weight == 5
    assert pattern.claimed_objective == Fraction(4)
    assert pattern.reduced_verified == "yes"
    assert len(pattern.link_qubits) == 2
    assert pattern.corrupted_link in pattern.link_qubits
    union = set().union(*pattern.generators)
    assert set(np.flatnonzero(pattern.error)) <= union
    assert pattern.syndrome.any()
    assert np.array_equal(code.syndrome(pattern.error), pattern.syndrome)
    report = verify_certificate(code, pattern)
    assert report.ok, report.violations
    assert report.objective == Fraction(4)


def test_certificate_structure(toy_pattern):
    code, pattern = toy_pattern
    cert = pattern.certificate
    assert all(v == Fraction(1, 2) for v in cert.x.values())
    assert len(cert.x) == 8
    assert sum(cert.x.values()) == Fraction(4)
    for (j, subset), val in cert.w.items():
        assert val in (Fraction(1, 2), Fraction(1))
        assert tuple(sorted(subset)) == subset
        assert len(subset) % 2 == int(pattern.syndrome[j])
    # every check contributes exactly unit mass
    mass = {}
    for (j, _), val in cert.w.items():
        mass[j] = mass.get(j, Fraction(0)) + val
    assert set(mass) == set(range(code.hx.n_rows))
    assert all(total == 1 for total in mass.values())


def test_lp_strictly_prefers_fractional_point(toy_pattern):
    code, pattern = toy_pattern
    sol = solve_lp(build_syndrome_lp(code, pattern.syndrome), solver="scipy")
    assert sol.objective <= float(pattern.claimed_objective) + 1e-7
    assert sol.objective < pattern.weight - 1e-6


def test_certificate_mutations_are_caught(toy_pattern):
    code, pattern = toy_pattern
    cert = pattern.certificate

    shifted_x = dict(cert.x)
    first = next(iter(shifted_x))
    shifted_x[first] = Fraction(1, 4)
    bad_x = dataclasses.replace(pattern, certificate=dataclasses.replace(
        cert, x=shifted_x))
    assert not verify_certificate(code, bad_x).ok

    dropped_w = dict(cert.w)
    dropped_w.pop(next(iter(dropped_w)))
    bad_w = dataclasses.replace(pattern, certificate=dataclasses.replace(
        cert, w=dropped_w))
    assert not verify_certificate(code, bad_w).ok

    wrong_parity = dict(cert.w)
    j = int(np.flatnonzero(pattern.syndrome)[0])
    support = code.tanner.x_supports[j]
    wrong_parity[(j, tuple(sorted(support[:2])))] = Fraction(0)
    bad_parity = dataclasses.replace(pattern, certificate=dataclasses.replace(
        cert, w=wrong_parity))
    report = verify_certificate(code, bad_parity)
    assert not report.ok
    assert any("parity" in v for v in report.violations)

    bad_claim = dataclasses.replace(pattern,
                                    claimed_objective=Fraction(7, 2))
    assert not verify_certificate(code, bad_claim).ok


def test_overlap_preconditions(toy22, ring108):
    code, h1, h2 = toy22
    lay = hgp_layout(h1, h2)
    dz = code.hz.to_dense()
    odd = dz[lay.z_check(0, 0)]
    assert odd.sum() % 2 == 1
    even = dz[lay.z_check(0, 1)]
    with pytest.raises(PreconditionViolated):
        build_overlap_pattern(code, odd, even)
    not_stab = np.zeros(code.n, dtype=np.uint8)
    not_stab[[0, 1]] = 1
    assert not in_rowspace(code.hz, not_stab)
    with pytest.raises(PreconditionViolated):
        build_overlap_pattern(code, not_stab, even)

    rcode, h_ring, h_c9 = ring108
    rlay = hgp_layout(h_ring, h_c9)
    rdz = rcode.hz.to_dense()
    disjoint = [rdz[rlay.z_check(0, 0)], rdz[rlay.z_check(2, 0)]]
    with pytest.raises(PreconditionViolated):
        build_overlap_pattern(rcode, *disjoint)
    single_link = [rdz[rlay.z_check(0, 0)], rdz[rlay.z_check(1, 0)]]
    with pytest.raises(PreconditionViolated):
        build_overlap_pattern(rcode, *single_link)


# ---------------------------------------------------------------------------
# ring construction
# ---------------------------------------------------------------------------


def test_cycle_pattern_on_ring_code(ring_pattern):
    code, pattern = ring_pattern
    assert pattern.kind == "cycle"
    assert pattern.weight == 9
    assert pattern.claimed_objective == Fraction(8)
    assert pattern.reduced_verified == "unchecked"
    assert len(set(pattern.link_qubits)) == 4
    assert pattern.corrupted_link in pattern.link_qubits
    report = verify_certificate(code, pattern)
    assert report.ok, report.violations
    sol = solve_lp(build_syndrome_lp(code, pattern.syndrome), solver="scipy")
    assert sol.objective == pytest.approx(8.0, abs=1e-7)


def test_two_generators_dispatch_to_overlap(toy22):
    code, h1, h2 = toy22
    lay = hgp_layout(h1, h2)
    dz = code.hz.to_dense()
    gens = [dz[lay.z_check(0, 1)], dz[lay.z_check(1, 1)]]
    pattern = build_cycle_pattern(code, gens)
    assert pattern.kind == "overlap"
    assert pattern.weight == 5


def test_cycle_preconditions(ring108):
    code, h_ring, h_c9 = ring108
    lay = hgp_layout(h_ring, h_c9)
    dz = code.hz.to_dense()
    with pytest.raises(PreconditionViolated):
        build_cycle_pattern(code, [dz[lay.z_check(0, 0)]])
    broken = [dz[lay.z_check(b, 0)] for b in (0, 1, 2)]
    with pytest.raises(PreconditionViolated):
        build_cycle_pattern(code, broken)


def test_cycle_rejects_corner_blocked_square():
    # A 4-ring whose links alternate between the two qubit blocks: the X
    # check at each corner sees a link but not the generator sum, so the
    # certificate cannot exist and the builder must refuse.
    h6 = BinaryMatrix.from_entries(
        6, 6, [(i, (i + d) % 6) for i in range(6) for d in range(3)])
    code = hypergraph_product(h6, h6, name="square36")
    lay = hgp_layout(h6, h6)
    dz = code.hz.to_dense()
    gens = [dz[lay.z_check(0, 0)], dz[lay.z_check(2, 0)],
            dz[lay.z_check(2, 2)], dz[lay.z_check(0, 2)]]
    with pytest.raises(PreconditionViolated):
        build_cycle_pattern(code, gens)


# ---------------------------------------------------------------------------
# flow conditions
# ---------------------------------------------------------------------------


def test_check_poison_accepts_hand_built_flow():
    hx = BinaryMatrix.from_entries(1, 2, [(0, 0), (0, 1)])
    from lposd import CssCode

    code = CssCode(hx, BinaryMatrix([], 2), name="twin")
    e = np.array([1, 0], dtype=np.uint8)
    good = {(0, 0): -1.0, (1, 0): 1.0}
    assert check_poison(code, e, good).ok

    unbalanced = {(0, 0): -1.0, (1, 0): 0.5}
    report = check_poison(code, e, unbalanced)
    assert not report.ok
    assert any("check 0" in v for v in report.violations)

    slack = {(0, 0): 0.0, (1, 0): 0.0}
    report = check_poison(code, e, slack)
    assert not report.ok
    assert any("qubit 0" in v for v in report.violations)

    with pytest.raises(InvalidParameter):
        check_poison(code, e, {(0, 0): -1.0})


def test_zero_flow_certifies_zero_error(surface3):
    code = surface3
    tau = {edge: 0.0 for edge in code.tanner.x_edges}
    assert check_poison(code, np.zeros(code.n, dtype=np.uint8), tau).ok


def test_flow_system_solvable_exactly_off_pattern(surface3, toy_pattern):
    code, pattern = toy_pattern
    res, _ = flow_lp_status(code, pattern.error)
    assert res.status == 2  # infeasible: nothing can certify the pattern

    e = np.zeros(surface3.n, dtype=np.uint8)
    e[4] = 1
    res, edges = flow_lp_status(surface3, e)
    assert res.status == 0
    tau = {edge: float(res.x[i]) for i, edge in enumerate(edges)}
    assert check_poison(surface3, e, tau).ok


# ---------------------------------------------------------------------------
# reducedness
# ---------------------------------------------------------------------------


def test_is_reduced_tri_state(toy_pattern, ring_pattern):
    toy_code, toy_pat = toy_pattern
    ring_code, ring_pat = ring_pattern

    assert is_reduced(toy_code, np.zeros(toy_code.n, dtype=np.uint8)).status == "yes"

    stab = toy_code.hz.to_dense()[0]
    verdict = is_reduced(toy_code, stab, budget=1)
    assert verdict.status == "no"
    assert verdict.witness is not None
    assert verdict.witness.sum() < stab.sum()
    assert in_rowspace(toy_code.hz, verdict.witness ^ stab)

    assert is_reduced(toy_code, toy_pat.error).status == "yes"
    assert is_reduced(ring_code, ring_pat.error).status == "unchecked"
    assert is_reduced(ring_code, ring_pat.error, exhaustive=False).status == "unchecked"

    with pytest.raises(InvalidParameter):
        is_reduced(toy_code, toy_pat.error, budget=-1)


# ---------------------------------------------------------------------------
# rings inside hypergraph products
# ---------------------------------------------------------------------------


def test_hgp_cycle_short_form():
    h_g4 = BinaryMatrix.from_entries(
        2, 4, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 3)])
    h5 = repetition_parity_check(5)
    code = hypergraph_product(h_g4, h5, name="g4rep5")
    cycle = hgp_cycle(h_g4, h5, ((0, 0, 1, 1), 0))
    assert len(cycle.checks) == 2
    verify_hgp_cycle(code, cycle)
    dz = code.hz.to_dense()
    pattern = build_cycle_pattern(code, [dz[c] for c in cycle.checks])
    assert pattern.kind == "overlap"
    assert verify_certificate(code, pattern).ok


def test_hgp_cycle_long_form():
    h7 = BinaryMatrix.from_entries(
        7, 7, [(i, (i + d) % 7) for i in range(7) for d in range(3)])
    code = hypergraph_product(h7, h7, name="c7sq")
    cycle = hgp_cycle(h7, h7, ((0, 2, 2, 4, 4), (0, 0, 2, 2, 4)))
    assert len(cycle.checks) == 8
    assert len(set(cycle.checks)) == 8
    verify_hgp_cycle(code, cycle)
    dz = code.hz.to_dense()
    pattern = build_cycle_pattern(code, [dz[c] for c in cycle.checks])
    assert pattern.kind == "cycle"
    assert pattern.weight == 17
    assert pattern.claimed_objective == Fraction(16)
    assert verify_certificate(code, pattern).ok


def test_hgp_cycle_rejects_bad_walks():
    h7 = BinaryMatrix.from_entries(
        7, 7, [(i, (i + d) % 7) for i in range(7) for d in range(3)])
    with pytest.raises(InvalidParameter):
        hgp_cycle(h7, h7, ((0, 1, 2),))
    with pytest.raises(PreconditionViolated):
        hgp_cycle(h7, h7, ((0, 0, 1), 0))  # odd-length walk
    with pytest.raises(PreconditionViolated):
        hgp_cycle(h7, h7, ((0, 0, 1, 1), 99))  # bit out of range
    with pytest.raises(PreconditionViolated):
        hgp_cycle(h7, h7, ((0, 5, 1, 6), 0))  # edge (0,5) absent
    with pytest.raises(PreconditionViolated):
        hgp_cycle(h7, h7, ((0, 2, 2, 4, 4), (0, 0, 0, 2, 4)))  # repeats a vertex


def test_verify_hgp_cycle_detects_wrong_links(ring108):
    code, h_ring, h_c9 = ring108
    lay = hgp_layout(h_ring, h_c9)
    checks = tuple(lay.z_check(b, 0) for b in range(4))
    good_links = []
    dz = code.hz.to_dense()
    for idx in range(4):
        shared = np.flatnonzero(dz[checks[idx]] & dz[checks[(idx + 1) % 4]])
        good_links.append(int(shared[0]))
    verify_hgp_cycle(code, ZCycle(checks=checks, qubits=tuple(good_links)))
    rotated = tuple(good_links[1:] + good_links[:1])
    with pytest.raises(PreconditionViolated):
        verify_hgp_cycle(code, ZCycle(checks=checks, qubits=rotated))


# ---------------------------------------------------------------------------
# search and serialization
# ---------------------------------------------------------------------------


def test_search_patterns_finds_verified_patterns(ring108):
    code, _, _ = ring108
    found = search_patterns(code, max_cycle_len=8, limit=3)
    assert 1 <= len(found) <= 3
    for pattern in found:
        assert verify_certificate(code, pattern).ok
        assert pattern.claimed_objective == pattern.weight - 1
        assert np.array_equal(code.syndrome(pattern.error), pattern.syndrome)


def test_search_respects_limit(ring108):
    code, _, _ = ring108
    found = search_patterns(code, max_cycle_len=8, limit=1)
    assert len(found) == 1


def test_serialization_round_trip(tmp_path, ring_pattern, ring108):
    code, pattern = ring_pattern
    extra = search_patterns(code, max_cycle_len=8, limit=1)
    patterns = [pattern] + extra
    path = tmp_path / "patterns.jsonl"
    write_patterns(patterns, path, code_ref="ring108")
    loaded = read_patterns(path, code)
    assert len(loaded) == len(patterns)
    for before, after in zip(patterns, loaded):
        assert before.kind == after.kind
        assert np.array_equal(before.error, after.error)
        assert np.array_equal(before.syndrome, after.syndrome)
        assert before.generators == after.generators
        assert before.link_qubits == after.link_qubits
        assert before.corrupted_link == after.corrupted_link
        assert before.claimed_objective == after.claimed_objective
        assert before.reduced_verified == after.reduced_verified
        assert before.certificate.x == after.certificate.x
        assert before.certificate.w == after.certificate.w
        assert verify_certificate(code, after).ok


def test_record_preserves_exact_fractions(ring_pattern):
    code, pattern = ring_pattern
    record = pattern_to_record(pattern, code_ref="ring108")
    rebuilt = record_to_pattern(record, code)
    assert rebuilt.certificate.objective == Fraction(8)
    assert all(isinstance(v, Fraction) for v in rebuilt.certificate.x.values())


# ---------------------------------------------------------------------------
# stabilizers inside a support
# ---------------------------------------------------------------------------


def test_stabilizers_within_pattern_support(toy_pattern):
    code, pattern = toy_pattern
    union = sorted(set().union(*pattern.generators))
    inside = stabilizers_within(code, union)
    gen_span = span_rows(
        [np.isin(np.arange(code.n), list(g)).astype(np.uint8)
         for g in pattern.generators],
        code.n,
    )
    mask = np.zeros(code.n, dtype=bool)
    mask[union] = True
    for vec in inside:
        assert in_rowspace(code.hz, vec)
        assert not vec[~mask].any()
        assert in_rowspace(gen_span, vec)


def test_stabilizers_within_full_support_recovers_everything(toy_pattern):
    code, pattern = toy_pattern
    everything = stabilizers_within(code, range(code.n))
    assert len(everything) == rank(code.hz)
    gen_span = span_rows(
        [np.isin(np.arange(code.n), list(g)).astype(np.uint8)
         for g in pattern.generators],
        code.n,
    )
    assert any(not in_rowspace(gen_span, vec) for vec in everything)
