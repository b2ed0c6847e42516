"""Constructive witnesses: decomposition, disjointification, subsequences."""

import numpy as np
import pytest

from unlattice.constructive import (
    kp_disjointify,
    kp_disjointify_positive,
    norm_to_order_subsequence,
    riesz_decompose,
    uo_extract,
)
from unlattice.convergence import (
    NULL,
    ToleranceSpec,
    VectorSequence,
    un_tail_qip,
)
from unlattice.errors import (
    HorizonExhausted,
    NegativeInput,
    NotADecomposition,
    SelectionStalled,
    ValidationError,
)
from unlattice.gallery import overlap_seq, std_units, typewriter
from unlattice.spaces import (
    DirectSumVector,
    LatticeVector,
    MeasureModel,
    StepFunction,
    c0,
    is_disjoint,
    linf,
    lp,
    lp_step,
    unit,
    zero,
)

TS = ToleranceSpec()


# ---------------------------------------------------------------------------
# Riesz decomposition
# ---------------------------------------------------------------------------

def _assert_witness_ok(x, u, v, rtol=1e-12):
    w = riesz_decompose(x, u, v)
    residuals = w.identity_residuals(x, u, v)
    worst = max(residuals.values())
    assert worst <= rtol, residuals


def test_riesz_trivial_split():
    x = LatticeVector(lp(2), {1: 3.0, 2: -1.0})
    w = riesz_decompose(x, x.abs(), zero(lp(2)))
    assert w.y.coords == x.coords
    assert w.z.is_zero()


def test_riesz_crossed_split():
    tag = lp(1)
    x = LatticeVector(tag, {1: 1.0, 2: -1.0})
    u = unit(tag, 1)
    v = unit(tag, 2)
    w = riesz_decompose(x, u, v)
    assert w.y.coords == {1: 1.0}
    assert w.z.coords == {2: -1.0}
    _assert_witness_ok(x, u, v)


def test_riesz_step_function():
    tag = lp_step(2, MeasureModel(1, (0.3, 0.7)))
    x = StepFunction(tag, 2, np.array([1.5, -2.0, 0.0, 3.0]))
    u = x.abs().scale(0.25)
    v = x.abs() - u
    _assert_witness_ok(x, u, v)


def test_riesz_direct_sum():
    x = DirectSumVector(LatticeVector(lp(1), {1: -2.0}),
                        LatticeVector(linf(), {3: 1.0}))
    u = x.abs().scale(0.5)
    v = x.abs() - u
    _assert_witness_ok(x, u, v)


def test_riesz_randomized():
    rng = np.random.default_rng(17)
    tag = lp(2)
    for _ in range(300):
        support = rng.choice(np.arange(1, 30), size=6, replace=False)
        x = LatticeVector(tag, {int(i): float(v) for i, v in
                                zip(support, rng.uniform(-3, 3, 6))})
        t = rng.uniform(0.0, 1.0, 6)
        u = LatticeVector(tag, {int(i): float(ti) * abs(x[int(i)])
                                for i, ti in zip(support, t)})
        v = x.abs() - u
        _assert_witness_ok(x, u, v)


def test_riesz_rejects_bad_split():
    x = LatticeVector(lp(2), {1: 1.0})
    with pytest.raises(NotADecomposition):
        riesz_decompose(x, x.abs(), x.abs())
    with pytest.raises(NegativeInput):
        riesz_decompose(x, x.abs().scale(-1.0), x.abs().scale(2.0))


# ---------------------------------------------------------------------------
# greedy disjointification
# ---------------------------------------------------------------------------

def test_kp_positive_already_disjoint():
    seq = std_units(lp(2), 32)
    res = kp_disjointify_positive(seq, 6, TS, check_un_null=False)
    assert res.selected_indices == [1, 2, 3, 4, 5, 6]
    assert res.residual_norms == [0.0] * 6
    for part, n in zip(res.disjoint_parts, res.selected_indices):
        assert part.coords == seq.at(n).coords
    assert all(v == 0.0 for v in res.meet_matrix.values())


def test_kp_positive_overlap_bounds():
    seq = overlap_seq(lp(2), 512)
    res = kp_disjointify_positive(seq, 6, TS, check_un_null=False)
    for (i, k), m in res.meet_matrix.items():
        assert m <= 2.0 ** -(i + k)
    for k, (n, dk, r) in enumerate(zip(res.selected_indices, res.disjoint_parts,
                                       res.residual_norms), start=1):
        assert r < 2.0 ** -k
        assert dk.leq(seq.at(n))
    parts = res.disjoint_parts
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            assert is_disjoint(parts[i], parts[j], tol=1e-12)


def test_kp_positive_constant_sequence_exhausts():
    tag = lp(2)
    seq = VectorSequence(tag, 16, lambda n: unit(tag, 1))
    with pytest.raises(HorizonExhausted) as exc:
        kp_disjointify_positive(seq, 3, TS, check_un_null=False)
    assert exc.value.step == 2
    assert exc.value.partial.selected_indices == [1]


def test_kp_positive_rejects_signed_terms():
    tag = lp(2)
    seq = VectorSequence(tag, 8, lambda n: unit(tag, n).scale(-1.0))
    with pytest.raises(NegativeInput):
        kp_disjointify_positive(seq, 2, TS, check_un_null=False)


def test_kp_advisory_warning_on_non_un_null_input():
    seq = std_units(linf(), 64)
    res = kp_disjointify_positive(seq, 4, TS)
    assert res.warnings and "not un-null" in res.warnings[0]
    with pytest.raises(ValidationError):
        kp_disjointify_positive(seq, 4, TS, require_un_null=True)


def test_kp_signed_preserves_signs():
    tag = lp(2)
    seq = VectorSequence(tag, 16, lambda n: unit(tag, n).scale((-1.0) ** n))
    res = kp_disjointify(seq, 5, TS, check_un_null=False)
    for n, part in zip(res.selected_indices, res.disjoint_parts):
        assert part.coords == seq.at(n).coords
    assert res.residual_norms == [0.0] * 5


def test_kp_signed_overlap():
    base = overlap_seq(lp(2), 256)
    seq = VectorSequence(base.tag, base.length,
                         lambda n: base.at(n).scale((-1.0) ** n))
    res = kp_disjointify(seq, 5, TS, check_un_null=False)
    for k, (n, dk, r) in enumerate(zip(res.selected_indices, res.disjoint_parts,
                                       res.residual_norms), start=1):
        assert r < 2.0 ** -k
        assert dk.abs().leq(seq.at(n).abs(), slack=1e-12)
        # the surviving part keeps the sign of the original term
        x = seq.at(n)
        assert all(v * x[i] > 0 for i, v in dk.coords.items())
    parts = res.disjoint_parts
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            assert is_disjoint(parts[i], parts[j], tol=1e-12)


def test_kp_subsequence_stays_un_null():
    seq = overlap_seq(lp(2), 512)
    res = kp_disjointify_positive(seq, 6, TS, check_un_null=False)
    sub = seq.subsequence(res.selected_indices)
    report = un_tail_qip(sub, zero(seq.tag), ToleranceSpec(tol=1e-2, window=2))
    assert report.verdict == NULL


# ---------------------------------------------------------------------------
# uo-subsequence extraction
# ---------------------------------------------------------------------------

def test_uo_extract_units():
    seq = std_units(c0(), 32)
    out = uo_extract(seq, TS)
    assert out.test_vector.coords == {n: 2.0 ** -n for n in range(1, 33)}
    assert out.subindices == list(range(1, 33))
    for k, m in enumerate(out.meet_norms, start=1):
        assert m <= 2.0 ** -k
    assert out.report.verdict == NULL
    assert not out.degenerate


def test_uo_extract_typewriter():
    out = uo_extract(typewriter(10), ToleranceSpec(tol=1e-2, window=2))
    for k, m in enumerate(out.meet_norms, start=1):
        assert m <= 2.0 ** -k
    assert out.subindices == sorted(out.subindices)
    assert out.report.quantity == "uo-subsequence-unsettled-mass"
    assert out.report.verdict == NULL


def test_uo_extract_zero_sequence_degenerate():
    seq = VectorSequence(lp(2), 8, lambda n: zero(lp(2)))
    out = uo_extract(seq, TS)
    assert out.degenerate
    assert out.test_vector.is_zero()
    assert out.report.verdict == NULL


def test_uo_extract_target_count_stalls():
    seq = std_units(c0(), 16)
    out = uo_extract(seq, TS, target_count=10)
    assert len(out.subindices) == 10
    with pytest.raises(SelectionStalled) as exc:
        uo_extract(seq, TS, target_count=20)
    assert len(exc.value.partial) == 16


# ---------------------------------------------------------------------------
# norm-null -> order-null subsequence
# ---------------------------------------------------------------------------

def test_norm_to_order_geometric():
    tag = lp(2)
    seq = VectorSequence(tag, 64, lambda n: unit(tag, 1).scale(2.0 ** -n))
    out = norm_to_order_subsequence(seq, TS)
    assert out.subindices[:4] == [1, 2, 3, 4]
    for m, c in enumerate(out.certificate_norms, start=1):
        assert c <= 2.0 ** -(m - 1)


def test_norm_to_order_certificate_dominates():
    tag = lp(1)
    rng = np.random.default_rng(23)
    scales = 2.0 ** -np.arange(1, 65) * rng.uniform(0.3, 1.0, 64)
    seq = VectorSequence(tag, 64,
                         lambda n: unit(tag, n % 5 + 1).scale(float(scales[n - 1])))
    out = norm_to_order_subsequence(seq, TS)
    for m in range(1, len(out.subindices) + 1):
        tail = zero(tag)
        for n in out.subindices[m - 1:]:
            tail = tail + seq.at(n).abs()
        assert tail.norm() == pytest.approx(out.certificate_norms[m - 1])
        for n in out.subindices[m - 1:]:
            assert seq.at(n).abs().leq(tail, slack=1e-12)


def test_norm_to_order_slow_decay():
    tag = lp(2)
    seq = VectorSequence(tag, 4096, lambda n: unit(tag, 1).scale(1.0 / n))
    out = norm_to_order_subsequence(seq, ToleranceSpec(tol=1e-2))
    assert out.subindices == [2 ** k for k in range(1, 13)]
    with pytest.raises(SelectionStalled):
        norm_to_order_subsequence(seq, ToleranceSpec(tol=1e-2), target_count=20)


def test_norm_to_order_requires_norm_null():
    seq = std_units(lp(2), 32)
    with pytest.raises(ValidationError):
        norm_to_order_subsequence(seq, TS)
