"""Construction of error patterns that defeat relaxation-based decoders.

The constructions take even-weight Z stabilizers whose supports overlap in
a controlled way, pick an error containing half of each stabilizer plus one
extra qubit, and attach an exact rational witness: a feasible fractional
assignment for the relaxed decoding problem whose objective is one less
than the error weight.  Any decoder that trusts the relaxation optimum
therefore never returns an error equivalent to the constructed one, no
matter how ties are broken.

Two shapes are supported.  The overlap pattern uses two stabilizers whose
supports share at least two qubits.  The ring pattern uses a cyclic chain
of stabilizers in which adjacent members share exactly one qubit (a link)
and non-adjacent members are disjoint.  Both produce an :class:`ErrorPattern`
carrying the error, its syndrome, the witness, and a reducedness report.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .codes import CssCode, HgpLayout, ZCycle, hgp_layout
from .errors import (
    InvalidParameter,
    LposdError,
    PreconditionViolated,
    SamplingExhausted,
)
from .gf2 import (
    BinaryMatrix,
    bits_to_vector,
    in_rowspace,
    kernel_basis,
    rank,
    row_reduce,
    vector_to_bits,
)

_EXHAUSTIVE_RANK_LIMIT = 20
_POISON_TOL = 1e-9


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Exact rational witness for the relaxed decoding problem.

    ``x`` maps qubit index to its (nonzero) value; ``w`` maps a
    (check, subset) pair to the weight placed on that parity-consistent
    subset of the check's support.  Entries absent from either map are
    zero.  ``objective`` is the witnessed cost, the sum of all ``x``.
    """

    x: dict[int, Fraction]
    w: dict[tuple[int, tuple[int, ...]], Fraction]
    objective: Fraction


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of an exact certificate check."""

    ok: bool
    violations: tuple[str, ...]
    objective: Fraction


@dataclass(frozen=True)
class ReducedCheck:
    """Tri-state reducedness answer with an optional lighter witness.

    ``status`` is one of ``"yes"`` (exhaustively verified minimal in its
    stabilizer coset), ``"no"`` (``witness`` is a strictly lighter
    equivalent error), or ``"unchecked"``.
    """

    status: str
    witness: np.ndarray | None = None


@dataclass(frozen=True)
class PoisonReport:
    """Outcome of checking a flow assignment against the dual conditions."""

    ok: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class PoisonAssignment:
    """Flow values on Tanner edges of the X graph, keyed (qubit, check)."""

    edge_values: dict[tuple[int, int], float] = field(default_factory=dict)


@dataclass(frozen=True)
class ErrorPattern:
    """A provably undecodable error together with its fractional witness.

    ``generators`` holds the stabilizer supports used by the construction,
    ``link_qubits`` the shared qubits between consecutive generators, and
    ``corrupted_link`` the one shared qubit placed into the error.  The
    ``claimed_objective`` equals the error weight minus one; the attached
    certificate achieves it, so the relaxation strictly prefers the
    fractional point over every error equivalent to this one.
    """

    kind: str
    error: np.ndarray
    generators: tuple[tuple[int, ...], ...]
    link_qubits: tuple[int, ...]
    corrupted_link: int
    syndrome: np.ndarray
    certificate: Certificate
    claimed_objective: Fraction
    reduced_verified: str

    @property
    def weight(self) -> int:
        return int(self.error.sum())


# ---------------------------------------------------------------------------
# input normalization
# ---------------------------------------------------------------------------


def _as_error_vector(n: int, obj) -> np.ndarray:
    """Coerce a support iterable or a 0/1 vector to a length-n uint8 vector.

    A sequence of length exactly n whose entries are all 0/1 is taken as a
    vector; anything else is treated as a set of qubit indices.
    """
    arr = np.asarray(list(obj) if not isinstance(obj, np.ndarray) else obj)
    if arr.ndim != 1:
        raise InvalidParameter("error/stabilizer input must be one-dimensional")
    if arr.size == n and arr.size > 0 and np.isin(arr, (0, 1)).all():
        return arr.astype(np.uint8)
    out = np.zeros(n, dtype=np.uint8)
    for idx in arr.astype(int):
        if not 0 <= idx < n:
            raise InvalidParameter(f"qubit index {idx} out of range for n={n}")
        out[idx] = 1
    return out


def _support(v: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(v))


# ---------------------------------------------------------------------------
# certificate construction
# ---------------------------------------------------------------------------


def _build_certificate(code: CssCode, half_set: Iterable[int],
                       syndrome: np.ndarray) -> Certificate:
    """Assemble the fractional witness for a half-set of qubits.

    Qubit values are 1/2 exactly on ``half_set``.  Each check splits its
    unit of subset weight according to how its support meets the half set:
    no shared qubits puts everything on the empty subset, an unflipped
    check splits between the empty subset and the full shared set, and a
    flipped check splits between its smallest shared qubit and the rest.
    """
    half = frozenset(int(i) for i in half_set)
    tan = code.tanner
    x = {i: Fraction(1, 2) for i in sorted(half)}
    w: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for j in range(code.hx.n_rows):
        shared = sorted(half.intersection(tan.x_supports[j]))
        s_j = int(syndrome[j])
        if len(shared) % 2 != 0:
            raise PreconditionViolated(
                f"check {j} meets the half set an odd number of times; "
                "inputs must commute with every X check"
            )
        if not shared:
            if s_j:
                raise PreconditionViolated(
                    f"check {j} is flipped but disjoint from the half set"
                )
            w[(j, ())] = Fraction(1)
        elif s_j == 0:
            w[(j, tuple(shared))] = Fraction(1, 2)
            w[(j, ())] = Fraction(1, 2)
        else:
            anchor = shared[0]
            rest = tuple(shared[1:])
            w[(j, (anchor,))] = Fraction(1, 2)
            w[(j, rest)] = Fraction(1, 2)
    objective = Fraction(len(half), 2)
    return Certificate(x=x, w=w, objective=objective)


def verify_certificate(code: CssCode, pattern: ErrorPattern) -> CertificateReport:
    """Check a pattern's witness exactly, in rational arithmetic.

    Verifies that every subset key is a parity-consistent subset of its
    check's support, that each check's subset weights sum to one, that for
    every Tanner edge the subset weights containing the qubit sum to the
    qubit's value, and that the witnessed objective equals the claimed
    value, which must be one less than the error weight.
    """
    cert = pattern.certificate
    tan = code.tanner
    syndrome = pattern.syndrome
    violations: list[str] = []

    for i, val in cert.x.items():
        if not 0 <= i < code.n:
            violations.append(f"x[{i}]: qubit index out of range")
        if not 0 <= val <= 1:
            violations.append(f"x[{i}] = {val} outside [0, 1]")

    per_check: dict[int, Fraction] = {}
    for (j, subset), val in cert.w.items():
        if not 0 <= j < code.hx.n_rows:
            violations.append(f"w[{j}, {subset}]: check index out of range")
            continue
        support = set(tan.x_supports[j])
        if tuple(sorted(subset)) != tuple(subset) or not set(subset) <= support:
            violations.append(
                f"w[{j}, {subset}]: not a sorted subset of the check support"
            )
            continue
        if len(subset) % 2 != int(syndrome[j]):
            violations.append(
                f"w[{j}, {subset}]: subset parity {len(subset) % 2} does not "
                f"match syndrome bit {int(syndrome[j])}"
            )
        if val < 0:
            violations.append(f"w[{j}, {subset}] = {val} is negative")
        per_check[j] = per_check.get(j, Fraction(0)) + val

    for j in range(code.hx.n_rows):
        total = per_check.get(j, Fraction(0))
        if total != 1:
            violations.append(f"check {j}: subset weights sum to {total}, not 1")

    edge_sums: dict[tuple[int, int], Fraction] = {}
    for (j, subset), val in cert.w.items():
        for i in subset:
            key = (int(i), j)
            edge_sums[key] = edge_sums.get(key, Fraction(0)) + val
    for q, j in tan.x_edges:
        got = edge_sums.get((q, j), Fraction(0))
        want = cert.x.get(q, Fraction(0))
        if got != want:
            violations.append(
                f"edge (qubit {q}, check {j}): subset weights sum to {got}, "
                f"qubit value is {want}"
            )

    total_x = sum(cert.x.values(), Fraction(0))
    if total_x != cert.objective:
        violations.append(
            f"stored objective {cert.objective} != sum of qubit values {total_x}"
        )
    if total_x != pattern.claimed_objective:
        violations.append(
            f"claimed objective {pattern.claimed_objective} != witnessed {total_x}"
        )
    if pattern.claimed_objective != pattern.weight - 1:
        violations.append(
            f"claimed objective {pattern.claimed_objective} != weight-1 "
            f"= {pattern.weight - 1}"
        )
    return CertificateReport(
        ok=not violations, violations=tuple(violations), objective=total_x
    )


# ---------------------------------------------------------------------------
# flow-condition check
# ---------------------------------------------------------------------------


def check_poison(code: CssCode, error,
                 tau: Mapping[tuple[int, int], float] | PoisonAssignment,
                 tol: float = _POISON_TOL) -> PoisonReport:
    """Check a Tanner-edge flow against the simplified dual conditions.

    The flow must supply a value for every edge of the X check graph,
    keyed (qubit, check).  Feasibility requires, per qubit, that its edge
    values sum to at most +1 when the qubit is clean and -1 when it is in
    the error, and, per check, that every pair of incident edge values has
    a nonnegative sum.  A feasible flow with positive total check revenue
    exhibits the corrupted qubits as sources that clean qubits cannot
    absorb, which is what dooms the relaxation on the constructed patterns.
    """
    if isinstance(tau, PoisonAssignment):
        tau = tau.edge_values
    e = _as_error_vector(code.n, error)
    tan = code.tanner
    missing = [edge for edge in tan.x_edges if edge not in tau]
    if missing:
        raise InvalidParameter(
            f"flow assignment missing {len(missing)} edges, first {missing[0]}"
        )
    violations: list[str] = []
    for q in range(code.n):
        total = sum(tau[(q, j)] for j in tan.x_checks_of_qubit[q])
        gamma = 1.0 - 2.0 * float(e[q])
        if total > gamma + tol:
            violations.append(
                f"qubit {q}: edge values sum to {total:.12g} > {gamma:+g}"
            )
    for j in range(code.hx.n_rows):
        support = tan.x_supports[j]
        for a, b in itertools.combinations(support, 2):
            pair = tau[(a, j)] + tau[(b, j)]
            if pair < -tol:
                violations.append(
                    f"check {j}: edges ({a},{j}) and ({b},{j}) sum to "
                    f"{pair:.12g} < 0"
                )
    return PoisonReport(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# reducedness
# ---------------------------------------------------------------------------


def is_reduced(code: CssCode, error, budget: int = 2,
               exhaustive: bool = True) -> ReducedCheck:
    """Decide whether an error is minimum weight within its stabilizer coset.

    First tries every GF(2) combination of up to ``budget`` rows of the Z
    check matrix; finding any strictly lighter equivalent yields ``"no"``
    with that lighter error as witness.  When nothing lighter is found,
    ``exhaustive`` is set, and the Z matrix rank is at most 20, the full
    coset is enumerated with a Gray-code walk and the answer is
    definitive.  Otherwise the result is ``"unchecked"``.
    """
    if budget < 0:
        raise InvalidParameter("budget must be nonnegative")
    e = _as_error_vector(code.n, error)
    n = code.n
    e_bits = vector_to_bits(e, n)
    weight = e_bits.bit_count()
    if weight == 0:
        return ReducedCheck(status="yes")

    rows = [code.hz.row_bits(i) for i in range(code.hz.n_rows)]
    for size in range(1, budget + 1):
        for combo in itertools.combinations(range(len(rows)), size):
            cand = e_bits
            for idx in combo:
                cand ^= rows[idx]
            if cand.bit_count() < weight:
                return ReducedCheck(status="no", witness=bits_to_vector(cand, n))

    reduction = row_reduce(code.hz)
    r = reduction.rank
    if not exhaustive or r > _EXHAUSTIVE_RANK_LIMIT:
        return ReducedCheck(status="unchecked")
    basis = [reduction.reduced.row_bits(i) for i in range(r)]
    cur = e_bits
    for t in range(1, 1 << r):
        cur ^= basis[(t & -t).bit_length() - 1]
        if cur.bit_count() < weight:
            return ReducedCheck(status="no", witness=bits_to_vector(cur, n))
    return ReducedCheck(status="yes")


# ---------------------------------------------------------------------------
# pattern builders
# ---------------------------------------------------------------------------


def _check_stabilizer(code: CssCode, g: np.ndarray, name: str) -> None:
    w = int(g.sum())
    if w == 0:
        raise PreconditionViolated(f"{name} is empty")
    if w % 2 != 0:
        raise PreconditionViolated(f"{name} has odd weight {w}")
    if not in_rowspace(code.hz, g):
        raise PreconditionViolated(f"{name} is not a Z stabilizer of the code")


def _check_flipped_checks_touch(code: CssCode, inside: Iterable[int],
                                half: frozenset[int], what: str) -> None:
    tan = code.tanner
    for q in inside:
        for j in tan.x_checks_of_qubit[q]:
            if half.isdisjoint(tan.x_supports[j]):
                raise PreconditionViolated(
                    f"X check {j} sees {what} qubit {q} but is disjoint from "
                    "the symmetric-difference support"
                )


def _finalize_pattern(code: CssCode, kind: str, e: np.ndarray,
                      generators: tuple[tuple[int, ...], ...],
                      link_qubits: tuple[int, ...], corrupted: int,
                      half: frozenset[int], reduced_status: str) -> ErrorPattern:
    syndrome = code.syndrome(e)
    weight = int(e.sum())
    certificate = _build_certificate(code, half, syndrome)
    claimed = Fraction(weight - 1)
    if certificate.objective != claimed:
        raise LposdError(
            f"internal error: witness objective {certificate.objective} != "
            f"weight-1 = {claimed}"
        )
    pattern = ErrorPattern(
        kind=kind,
        error=e,
        generators=generators,
        link_qubits=link_qubits,
        corrupted_link=corrupted,
        syndrome=syndrome,
        certificate=certificate,
        claimed_objective=claimed,
        reduced_verified=reduced_status,
    )
    report = verify_certificate(code, pattern)
    if not report.ok:
        raise LposdError(
            "internal error: witness failed verification: "
            + "; ".join(report.violations[:3])
        )
    return pattern


def build_overlap_pattern(code: CssCode, g, g2, rng_seed: int = 0, *,
                          max_resamples: int = 200,
                          reduce_budget: int = 2) -> ErrorPattern:
    """Build an undecodable error from two stabilizers sharing >= 2 qubits.

    The error takes half of each private region (rounding down in the
    first, up in the second) plus exactly one shared qubit.  Requires both
    supports even, both in the Z stabilizer group, an overlap of at least
    two qubits, and that every X check meeting the overlap also meets the
    symmetric difference.  Sampled picks that an up-to-``reduce_budget``
    row search proves non-reduced are rejected and resampled; exceeding
    ``max_resamples`` raises SamplingExhausted.
    """
    ga = _as_error_vector(code.n, g)
    gb = _as_error_vector(code.n, g2)
    _check_stabilizer(code, ga, "first stabilizer")
    _check_stabilizer(code, gb, "second stabilizer")
    overlap = np.flatnonzero(ga & gb)
    if overlap.size < 2:
        raise PreconditionViolated(
            f"stabilizer supports share {overlap.size} qubits, need >= 2"
        )
    diff = ga ^ gb
    if not diff.any():
        raise PreconditionViolated("stabilizers have identical supports")
    half = frozenset(_support(diff))
    _check_flipped_checks_touch(code, (int(q) for q in overlap), half, "overlap")

    a_only = np.flatnonzero(ga & ~gb)
    b_only = np.flatnonzero(gb & ~ga)
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_resamples):
        e = np.zeros(code.n, dtype=np.uint8)
        picked_a = rng.choice(a_only, size=len(a_only) // 2, replace=False) \
            if len(a_only) else np.array([], dtype=int)
        picked_b = rng.choice(b_only, size=(len(b_only) + 1) // 2, replace=False) \
            if len(b_only) else np.array([], dtype=int)
        corrupted = int(rng.choice(overlap))
        e[picked_a] = 1
        e[picked_b] = 1
        e[corrupted] = 1
        if is_reduced(code, e, budget=reduce_budget, exhaustive=False).status == "no":
            continue
        grade = is_reduced(code, e, budget=reduce_budget)
        return _finalize_pattern(
            code, "overlap", e,
            generators=(_support(ga), _support(gb)),
            link_qubits=tuple(int(q) for q in overlap),
            corrupted=corrupted, half=half, reduced_status=grade.status,
        )
    raise SamplingExhausted(
        f"no reduced pick found in {max_resamples} overlap samples"
    )


def build_cycle_pattern(code: CssCode, generators: Sequence, rng_seed: int = 0, *,
                        max_resamples: int = 200,
                        reduce_budget: int = 2) -> ErrorPattern:
    """Build an undecodable error from a ring of stabilizers.

    Consecutive generators (cyclically) must share exactly one qubit, the
    link; non-adjacent generators must be disjoint; every support must be
    even and in the Z stabilizer group; and every X check meeting a link
    must meet the sum of the generators.  The error takes one link plus
    half-minus-one qubits from each generator's interior.  Two generators
    dispatch to the overlap construction, since their shared qubits then
    play the role of two links.
    """
    gens = [_as_error_vector(code.n, g) for g in generators]
    if len(gens) < 2:
        raise PreconditionViolated("need at least two generators")
    if len(gens) == 2:
        return build_overlap_pattern(
            code, gens[0], gens[1], rng_seed,
            max_resamples=max_resamples, reduce_budget=reduce_budget,
        )
    k_count = len(gens)
    for idx, gv in enumerate(gens):
        _check_stabilizer(code, gv, f"generator {idx}")

    links: list[int] = []
    for idx in range(k_count):
        nxt = (idx + 1) % k_count
        shared = np.flatnonzero(gens[idx] & gens[nxt])
        if shared.size != 1:
            raise PreconditionViolated(
                f"generators {idx} and {nxt} share {shared.size} qubits, need "
                "exactly 1"
            )
        links.append(int(shared[0]))
    if len(set(links)) != k_count:
        raise PreconditionViolated("link qubits are not distinct")
    for idx, other in itertools.combinations(range(k_count), 2):
        if (other - idx) % k_count in (1, k_count - 1):
            continue
        if np.any(gens[idx] & gens[other]):
            raise PreconditionViolated(
                f"non-adjacent generators {idx} and {other} are not disjoint"
            )

    sigma = np.zeros(code.n, dtype=np.uint8)
    for gv in gens:
        sigma ^= gv
    half = frozenset(_support(sigma))
    _check_flipped_checks_touch(code, links, half, "link")

    link_set = set(links)
    interiors = [
        np.array([q for q in _support(gv) if q not in link_set], dtype=int)
        for gv in gens
    ]
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_resamples):
        e = np.zeros(code.n, dtype=np.uint8)
        corrupted = int(rng.choice(np.array(links)))
        e[corrupted] = 1
        for idx, interior in enumerate(interiors):
            take = int(gens[idx].sum()) // 2 - 1
            if take > len(interior):
                raise PreconditionViolated(
                    f"generator {idx} interior too small for its half weight"
                )
            if take:
                e[rng.choice(interior, size=take, replace=False)] = 1
        if is_reduced(code, e, budget=reduce_budget, exhaustive=False).status == "no":
            continue
        grade = is_reduced(code, e, budget=reduce_budget)
        return _finalize_pattern(
            code, "cycle", e,
            generators=tuple(_support(gv) for gv in gens),
            link_qubits=tuple(links), corrupted=corrupted,
            half=half, reduced_status=grade.status,
        )
    raise SamplingExhausted(
        f"no reduced pick found in {max_resamples} ring samples"
    )


def stabilizers_within(code: CssCode, support) -> list[np.ndarray]:
    """Basis of the Z stabilizers supported entirely inside a qubit set.

    Computes the row combinations of the Z check matrix that vanish on the
    complement of ``support`` and returns their images as stabilizer
    vectors (zero rows excluded).  A pattern's support union hides no
    stabilizers beyond its own generators exactly when every returned
    vector lies in the span of those generators.
    """
    mask = np.zeros(code.n, dtype=bool)
    for q in _support(_as_error_vector(code.n, support)):
        mask[q] = True
    comp = np.flatnonzero(~mask)
    dense = code.hz.to_dense()
    restricted = BinaryMatrix.from_dense(dense[:, comp])
    out: list[np.ndarray] = []
    for coeff in kernel_basis(restricted.transpose()):
        image = code.hz.transpose().mat_vec(coeff)
        if image.any():
            out.append(image.astype(np.uint8))
    return out


# ---------------------------------------------------------------------------
# ring construction inside hypergraph products
# ---------------------------------------------------------------------------


def _hgp_path_edges_ok(h: BinaryMatrix, check: int, bit: int) -> bool:
    return 0 <= check < h.n_rows and 0 <= bit < h.n_cols and h.get(check, bit) == 1


def _verify_ring_intersections(code: CssCode, checks: Sequence[int],
                               qubits: Sequence[int]) -> None:
    supports = [set(code.hz.row_support(c)) for c in checks]
    _verify_pairwise_links(supports, checks, qubits)


def _verify_pairwise_links(supports: Sequence[set[int]], checks: Sequence[int],
                           qubits: Sequence[int]) -> None:
    k_count = len(checks)
    for idx, other in itertools.combinations(range(k_count), 2):
        inter = supports[idx] & supports[other]
        step = (other - idx) % k_count
        if k_count == 2:
            expected = set(qubits)
        elif step in (1, k_count - 1):
            expected = {qubits[idx] if step == 1 else qubits[other]}
        else:
            expected = set()
        if inter != expected:
            raise PreconditionViolated(
                f"Z checks {checks[idx]} and {checks[other]} share qubits "
                f"{sorted(inter)}, expected {sorted(expected)}"
            )


def hgp_cycle(h1: BinaryMatrix, h2: BinaryMatrix, paths) -> ZCycle:
    """Locate a ring of Z checks inside the product of two classical codes.

    Two forms.  The long form takes ``paths = (p, p2)`` where ``p`` is a
    five-vertex walk (check, bit, check, bit, check) in the first code's
    Tanner graph and ``p2`` a five-vertex walk (bit, check, bit, check,
    bit) in the second; it yields a ring of eight Z checks built from the
    walk endpoints, usable even when both factor graphs have high girth.
    The short form takes ``paths = (cycle, bit2)`` with ``cycle`` an
    alternating closed walk (check, bit, ..., check, bit) in the first
    factor and ``bit2`` a bit index of the second; the factor cycle is
    replicated at that bit.  Returns the ring as Z check indices plus the
    link qubits, after verifying that consecutive checks share exactly the
    links and all other pairs share nothing.
    """
    if len(paths) != 2:
        raise InvalidParameter("paths must have exactly two elements")
    layout = hgp_layout(h1, h2)
    first, second = paths

    if isinstance(second, (int, np.integer)):
        walk = tuple(int(v) for v in first)
        bit2 = int(second)
        if len(walk) < 4 or len(walk) % 2 != 0:
            raise PreconditionViolated(
                "short form needs an alternating closed walk of even length "
                ">= 4"
            )
        if not 0 <= bit2 < h2.n_cols:
            raise PreconditionViolated(f"bit {bit2} out of range in second code")
        cycle_checks = walk[0::2]
        cycle_bits = walk[1::2]
        r = len(cycle_checks)
        if len(set(cycle_checks)) != r or len(set(cycle_bits)) != r:
            raise PreconditionViolated("closed walk repeats a vertex")
        for t in range(r):
            c_here, c_next = cycle_checks[t], cycle_checks[(t + 1) % r]
            bit = cycle_bits[t]
            if not (_hgp_path_edges_ok(h1, c_here, bit)
                    and _hgp_path_edges_ok(h1, c_next, bit)):
                raise PreconditionViolated(
                    f"walk edge between checks {c_here},{c_next} and bit {bit} "
                    "is absent from the first code"
                )
        checks = tuple(layout.z_check(c, bit2) for c in cycle_checks)
        qubits = tuple(layout.qubit_aa(v, bit2) for v in cycle_bits)
    else:
        p = tuple(int(v) for v in first)
        p2 = tuple(int(v) for v in second)
        if len(p) != 5 or len(p2) != 5:
            raise PreconditionViolated("long form needs two five-vertex walks")
        b1, a1, b2, a2, b3 = p
        a1p, b1p, a2p, b2p, a3p = p2
        if len({b1, b2, b3}) != 3 or a1 == a2:
            raise PreconditionViolated("first walk repeats a vertex")
        if len({a1p, a2p, a3p}) != 3 or b1p == b2p:
            raise PreconditionViolated("second walk repeats a vertex")
        for check, bit in ((b1, a1), (b2, a1), (b2, a2), (b3, a2)):
            if not _hgp_path_edges_ok(h1, check, bit):
                raise PreconditionViolated(
                    f"edge (check {check}, bit {bit}) absent from first code"
                )
        for check, bit in ((b1p, a1p), (b1p, a2p), (b2p, a2p), (b2p, a3p)):
            if not _hgp_path_edges_ok(h2, check, bit):
                raise PreconditionViolated(
                    f"edge (check {check}, bit {bit}) absent from second code"
                )
        checks = (
            layout.z_check(b1, a1p), layout.z_check(b2, a1p),
            layout.z_check(b3, a1p), layout.z_check(b3, a2p),
            layout.z_check(b3, a3p), layout.z_check(b2, a3p),
            layout.z_check(b1, a3p), layout.z_check(b1, a2p),
        )
        qubits = (
            layout.qubit_aa(a1, a1p), layout.qubit_aa(a2, a1p),
            layout.qubit_bb(b3, b1p), layout.qubit_bb(b3, b2p),
            layout.qubit_aa(a2, a3p), layout.qubit_aa(a1, a3p),
            layout.qubit_bb(b1, b2p), layout.qubit_bb(b1, b1p),
        )

    h2t = h2.transpose()
    supports = []
    for check_idx in checks:
        b, a2_ = divmod(check_idx, h2.n_cols)
        sup = {layout.qubit_aa(a, a2_) for a in h1.row_support(b)}
        sup |= {layout.qubit_bb(b, c2) for c2 in h2t.row_support(a2_)}
        supports.append(sup)
    _verify_pairwise_links(supports, checks, qubits)
    return ZCycle(checks=checks, qubits=qubits)


def verify_hgp_cycle(code: CssCode, cycle: ZCycle) -> None:
    """Check that a ring's pairwise support intersections are exactly its links.

    Raises PreconditionViolated when consecutive Z checks share anything
    besides their designated link, or non-adjacent checks share anything.
    """
    _verify_ring_intersections(code, cycle.checks, cycle.qubits)


# ---------------------------------------------------------------------------
# pattern search
# ---------------------------------------------------------------------------


def _cycles_through_edges(code: CssCode, max_len: int,
                          cap: int) -> list[ZCycle]:
    """Distinct short cycles of the Z Tanner graph, one BFS per edge."""
    tan = code.tanner
    found: list[ZCycle] = []
    seen: set[frozenset[int]] = set()
    depth_cap = max_len - 1
    for k in range(code.hz.n_rows):
        for q in tan.z_supports[k]:
            path = _bfs_cycle_path(tan, k, q, depth_cap)
            if path is None:
                continue
            checks = tuple(idx for is_check, idx in path if is_check)
            qubits = tuple(idx for is_check, idx in path if not is_check)
            key = frozenset(checks)
            if key in seen:
                continue
            seen.add(key)
            found.append(ZCycle(checks=checks, qubits=qubits))
            if len(found) >= cap:
                return found
    return found


def _bfs_cycle_path(tan, start_check: int, goal_qubit: int,
                    depth_cap: int) -> list[tuple[bool, int]] | None:
    skip_edge = (start_check, goal_qubit)
    parent: dict[tuple[bool, int], tuple[bool, int] | None] = {
        (True, start_check): None
    }
    frontier = deque([((True, start_check), 0)])
    while frontier:
        (is_check, v), depth = frontier.popleft()
        if depth >= depth_cap:
            continue
        neighbors = tan.z_supports[v] if is_check else tan.z_checks_of_qubit[v]
        for u in neighbors:
            key = (not is_check, u)
            edge = (v, u) if is_check else (u, v)
            if edge == skip_edge or key in parent:
                continue
            parent[key] = (is_check, v)
            if key == (False, goal_qubit):
                path: list[tuple[bool, int]] = [key]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            frontier.append((key, depth + 1))
    return None


def _compose_even(code: CssCode, gens: list[np.ndarray]) -> list[np.ndarray] | None:
    """Merge adjacent odd-weight ring members pairwise until all are even.

    Merging neighbors keeps the ring structure: their shared link cancels
    and the merged support meets each remaining neighbor in the original
    single link.  Returns None when the odd members cannot be paired up.
    """
    out: list[np.ndarray] = []
    pending: np.ndarray | None = None
    for gv in gens:
        if pending is not None:
            out.append(pending ^ gv)
            pending = None
        elif int(gv.sum()) % 2 != 0:
            pending = gv
        else:
            out.append(gv)
    if pending is not None or len(out) < 2:
        return None
    return out


def search_patterns(code: CssCode, max_cycle_len: int = 12, limit: int = 10,
                    rng_seed: int = 0, *, reduce_budget: int = 2,
                    max_resamples: int = 200) -> list[ErrorPattern]:
    """Harvest undecodable patterns from short cycles of the Z check graph.

    Each distinct short cycle yields a candidate ring of Z generators;
    rings with odd-weight members are repaired by merging adjacent odd
    pairs.  Candidates that violate the ring preconditions or never
    produce a reduced pick are skipped.  Returns up to ``limit`` patterns.
    """
    cycles = _cycles_through_edges(code, max_cycle_len, cap=max(limit * 8, 64))
    patterns: list[ErrorPattern] = []
    for idx, cycle in enumerate(cycles):
        gens: list[np.ndarray] = [
            _as_error_vector(code.n, code.hz.row_support(c))
            for c in cycle.checks
        ]
        if any(int(gv.sum()) % 2 for gv in gens):
            repaired = _compose_even(code, gens)
            if repaired is None:
                continue
            gens = repaired
        try:
            pattern = build_cycle_pattern(
                code, gens, rng_seed=rng_seed * 100003 + idx,
                max_resamples=max_resamples, reduce_budget=reduce_budget,
            )
        except (PreconditionViolated, SamplingExhausted):
            continue
        patterns.append(pattern)
        if len(patterns) >= limit:
            break
    return patterns


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def pattern_to_record(pattern: ErrorPattern, code_ref: str = "") -> dict:
    """Flatten a pattern to a JSON-compatible dict with exact rationals."""
    cert = pattern.certificate
    return {
        "code": code_ref,
        "kind": pattern.kind,
        "generators": [list(g) for g in pattern.generators],
        "link_qubits": list(pattern.link_qubits),
        "corrupted_link": pattern.corrupted_link,
        "error_support": [int(i) for i in np.flatnonzero(pattern.error)],
        "syndrome_support": [int(j) for j in np.flatnonzero(pattern.syndrome)],
        "claimed_objective": str(pattern.claimed_objective),
        "reduced_verified": pattern.reduced_verified,
        "certificate": {
            "x": [[i, str(v)] for i, v in sorted(cert.x.items())],
            "w": [[j, list(subset), str(v)]
                  for (j, subset), v in sorted(cert.w.items())],
            "objective": str(cert.objective),
        },
    }


def record_to_pattern(record: dict, code: CssCode) -> ErrorPattern:
    """Rebuild a pattern from its serialized record, given the code."""
    error = np.zeros(code.n, dtype=np.uint8)
    error[record["error_support"]] = 1
    syndrome = np.zeros(code.hx.n_rows, dtype=np.uint8)
    syndrome[record["syndrome_support"]] = 1
    cert_rec = record["certificate"]
    certificate = Certificate(
        x={int(i): Fraction(v) for i, v in cert_rec["x"]},
        w={(int(j), tuple(int(q) for q in subset)): Fraction(v)
           for j, subset, v in cert_rec["w"]},
        objective=Fraction(cert_rec["objective"]),
    )
    return ErrorPattern(
        kind=record["kind"],
        error=error,
        generators=tuple(tuple(int(q) for q in g) for g in record["generators"]),
        link_qubits=tuple(int(q) for q in record["link_qubits"]),
        corrupted_link=int(record["corrupted_link"]),
        syndrome=syndrome,
        certificate=certificate,
        claimed_objective=Fraction(record["claimed_objective"]),
        reduced_verified=record["reduced_verified"],
    )


def write_patterns(patterns: Sequence[ErrorPattern], path, code_ref: str = "") -> None:
    """Write one JSON record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for pattern in patterns:
            fh.write(json.dumps(pattern_to_record(pattern, code_ref)) + "\n")


def read_patterns(path, code: CssCode) -> list[ErrorPattern]:
    with open(path, encoding="utf-8") as fh:
        return [record_to_pattern(json.loads(line), code)
                for line in fh if line.strip()]
