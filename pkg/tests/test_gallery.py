"""Named sequence gallery: generators and the pinned verdict table."""

import numpy as np
import pytest

from unlattice.errors import RefinementOverflow, ValidationError
from unlattice.gallery import (
    GALLERY,
    direct_sum_seq,
    direct_sum_witness,
    get_entry,
    list_entries,
    overlap_seq,
    rademacher,
    rademacher_modulated,
    std_units,
    typewriter,
)
from unlattice.runner import build_gallery_sequence, run_diagnostic
from unlattice.spaces import (
    StepFunction,
    c0,
    is_disjoint,
    linf,
    lp,
    lp_step,
)


# ---------------------------------------------------------------------------
# the pinned verdict table
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(GALLERY))
def test_entry_reproduces_pinned_verdicts(name):
    entry = get_entry(name)
    seq = entry.build()
    for check in entry.checks:
        report = run_diagnostic(seq, check.diagnostic, check.tolerance)
        assert report.verdict == check.verdict, (name, check.diagnostic)


def test_listing_and_lookup():
    assert list_entries() == sorted(GALLERY)
    assert len(GALLERY) == 8
    with pytest.raises(ValidationError):
        get_entry("nope")
    with pytest.raises(ValidationError):
        build_gallery_sequence("nope")


def test_builders_match_entry_names():
    for name in GALLERY:
        seq = build_gallery_sequence(name)
        assert seq.length >= 1


# ---------------------------------------------------------------------------
# generator structure
# ---------------------------------------------------------------------------

def test_std_units_structure():
    seq = std_units(lp(2), 16)
    assert seq.at(5).coords == {5: 1.0}
    assert is_disjoint(seq.at(3), seq.at(7))
    with pytest.raises(ValidationError):
        std_units(lp_step(1))


def test_typewriter_block_layout():
    seq = typewriter(4)
    assert seq.length == 15
    for n in range(1, 16):
        f = seq.at(n)
        k = n.bit_length() - 1
        assert f.level == k
        assert f.norm() == 2.0 ** -k  # one cell of mass 2**-k
        assert f.values.sum() == 1.0
    # same-level blocks are disjoint and sweep the whole interval
    level3 = [seq.at(n) for n in range(8, 16)]
    for i in range(8):
        for j in range(i + 1, 8):
            assert is_disjoint(level3[i], level3[j])
    total = level3[0]
    for f in level3[1:]:
        total = total + f
    assert total.values.tolist() == [1.0] * 8
    with pytest.raises(ValidationError):
        typewriter(0)


def test_rademacher_structure():
    tag = lp_step(1)
    r2 = rademacher(tag, 2)
    assert r2.values.tolist() == [1.0, -1.0, 1.0, -1.0]
    x = StepFunction(tag, 1, np.array([2.0, 3.0]))
    seq = rademacher_modulated(x, horizon=6)
    for n in range(1, 7):
        assert seq.at(n).abs().approx_eq(x)  # constant modulus
    with pytest.raises(ValidationError):
        rademacher_modulated(StepFunction(tag, 0, np.array([-1.0])))
    with pytest.raises(RefinementOverflow):
        rademacher_modulated(x, horizon=20)


def test_overlap_pairwise_meets():
    seq = overlap_seq(linf(), 16)
    for n in range(2, 10):
        for m in range(n + 1, 12):
            meet = seq.at(n).meet(seq.at(m))
            assert meet.norm() == 2.0 ** -m  # sup-norm meet = 2**-max(n,m)
    assert seq.at(4).coords == {1: 0.0625, 2: 0.0625, 3: 0.0625, 4: 1.0}


def test_direct_sum_witness_shape():
    u = direct_sum_witness(horizon=8)
    assert u.left.is_zero()
    assert u.right.coords == {n: 1.0 for n in range(1, 9)}
    seq = direct_sum_seq(8)
    assert seq.at(3).left.coords == {3: 1.0}
    assert seq.at(3).right.coords == {3: 1.0}


def test_gallery_dump_shape():
    entry = get_entry("typewriter")
    assert entry.provenance
    assert all(c.verdict in ("NULL", "NOT_NULL") for c in entry.checks)


def test_build_gallery_sequence_params():
    seq = build_gallery_sequence("std_units_c0", {"horizon": 12})
    assert seq.length == 12
    assert seq.tag == c0()
    with pytest.raises(ValidationError):
        build_gallery_sequence("rademacher", {"horizon": 3})
