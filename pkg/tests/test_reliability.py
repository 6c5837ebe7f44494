import pytest
from hypothesis import given, strategies as st

from sfckit.errors import DomainError
from sfckit.reliability import (
    chain_backup_reliability,
    chain_reliability,
    dedicated_backup_reliability,
    mixed_mm1_reliability,
    mixed_mmm_reliability,
    reliability_ceiling,
    subchain_mm1_reliability,
    subchain_mmm_reliability,
)

P5 = [0.9] * 5
NODE = [0.999]


def test_bare_chain_catalog_value():
    assert chain_reliability(P5, NODE) == pytest.approx(0.58990, abs=5e-6)


def test_bare_chain_identity():
    assert chain_reliability([1.0, 1.0], [1.0]) == 1.0


def test_bare_chain_direct_product():
    assert chain_reliability([0.9, 0.8], [1.0]) == pytest.approx(0.72)


def test_dedicated_backups_one_each():
    assert dedicated_backup_reliability(P5, [1] * 5, NODE) == \
        pytest.approx(0.95004, abs=5e-6)


def test_dedicated_backups_zero_reduces_to_bare():
    assert dedicated_backup_reliability(P5, [0] * 5, NODE) == \
        pytest.approx(chain_reliability(P5, NODE), rel=1e-12)


def test_dedicated_backups_two_on_single_vnf():
    assert dedicated_backup_reliability([0.9], [2], [1.0]) == \
        pytest.approx(0.999)


def test_chain_backup_values():
    assert chain_backup_reliability(P5, 1, NODE) == pytest.approx(0.83147, abs=5e-6)
    assert chain_backup_reliability(P5, 2, NODE) == pytest.approx(0.93040, abs=1e-5)
    assert chain_backup_reliability(P5, 0, NODE) == \
        pytest.approx(chain_reliability(P5, NODE), rel=1e-12)


def test_subchain_mm1_values():
    assert subchain_mm1_reliability(P5, 3, NODE) == pytest.approx(0.93040, abs=1e-5)
    assert subchain_mm1_reliability(P5, 1, NODE) == pytest.approx(0.58990, abs=5e-6)
    assert subchain_mm1_reliability(P5, 4, NODE) == pytest.approx(0.97090, abs=1e-5)


def test_subchain_mm1_equals_chain_backup_bit_for_bit():
    for l in range(1, 12):
        assert subchain_mm1_reliability(P5, l, NODE) == \
            chain_backup_reliability(P5, l - 1, NODE)


def test_subchain_mmm_values():
    assert subchain_mmm_reliability(P5, 2, NODE) == pytest.approx(0.95004, abs=5e-6)
    assert subchain_mmm_reliability(P5, 3, NODE) == pytest.approx(0.99401, abs=5e-6)
    assert subchain_mmm_reliability(P5, 1, NODE) == pytest.approx(0.58990, abs=5e-6)


def test_mixed_mm1_no_backups_collapses_to_subchains():
    for l in (1, 2, 3):
        assert mixed_mm1_reliability(P5, l, 2, 0, set(), NODE) == \
            pytest.approx(subchain_mm1_reliability(P5, l, NODE), rel=1e-12)


def test_mixed_mm1_first_backup_value():
    # frozen from the exhaustive structure-enumeration oracle
    assert mixed_mm1_reliability(P5, 2, 2, 0, {0}, NODE) == \
        pytest.approx(0.8556262331741102, rel=1e-12)


def test_mixed_mm1_fully_backed_value():
    # both subchains carrying one backup per VNF (10 extras total)
    assert mixed_mm1_reliability(P5, 2, 2, 1, {0, 1, 2, 3, 4}, NODE) == \
        pytest.approx(0.9966004267664046, rel=1e-12)


def test_mixed_mmm_reductions():
    assert mixed_mmm_reliability(P5, 2, set(), NODE) == \
        pytest.approx(subchain_mmm_reliability(P5, 2, NODE), rel=1e-12)
    assert mixed_mmm_reliability(P5, 2, {0, 1, 2, 3, 4}, NODE) == \
        pytest.approx(subchain_mmm_reliability(P5, 3, NODE), rel=1e-12)


def test_mixed_mmm_catalog_value():
    assert mixed_mmm_reliability(P5, 2, {0, 1, 2, 3, 4}, NODE) == \
        pytest.approx(0.99401, abs=5e-6)


def test_reliability_ceiling():
    assert reliability_ceiling([0.999]) == pytest.approx(0.999)
    assert reliability_ceiling([1.0, 1.0]) == 1.0
    assert reliability_ceiling([0.999, 0.999]) == pytest.approx(0.998001)


def test_domain_errors():
    with pytest.raises(DomainError):
        chain_reliability([0.0], NODE)
    with pytest.raises(DomainError):
        chain_reliability([1.2], NODE)
    with pytest.raises(DomainError):
        dedicated_backup_reliability(P5, [-1] * 5, NODE)
    with pytest.raises(DomainError):
        chain_backup_reliability(P5, -1, NODE)
    with pytest.raises(DomainError):
        subchain_mm1_reliability(P5, 0, NODE)
    with pytest.raises(DomainError):
        mixed_mm1_reliability(P5, 2, 1, 0, set(), NODE)
    with pytest.raises(DomainError):
        mixed_mm1_reliability(P5, 2, 2, 2, set(), NODE)
    with pytest.raises(DomainError):
        mixed_mmm_reliability(P5, 0, set(), NODE)


probs = st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=1,
                 max_size=8)
small_counts = st.integers(min_value=1, max_value=6)


@given(p=probs, l=small_counts)
def test_outputs_bounded_by_ceiling(p, l):
    node = [0.995]
    ceiling = reliability_ceiling(node)
    for value in (
        chain_reliability(p, node),
        subchain_mm1_reliability(p, l, node),
        subchain_mmm_reliability(p, l, node),
    ):
        assert 0.0 < value <= ceiling + 1e-15


@given(p=probs, l=small_counts)
def test_monotone_in_subchain_count(p, l):
    node = [0.999]
    assert subchain_mm1_reliability(p, l + 1, node) >= \
        subchain_mm1_reliability(p, l, node)
    assert subchain_mmm_reliability(p, l + 1, node) >= \
        subchain_mmm_reliability(p, l, node)


@given(p=probs, l=st.integers(min_value=2, max_value=6))
def test_pooled_beats_whole_chain_split(p, l):
    # per-VNF pooling dominates whole-chain replication at equal depth;
    # strictly so once two or more stages fail with non-negligible odds
    # (a probability within an ulp of 1 makes the gap vanish in floats)
    node = [0.999]
    mmm = subchain_mmm_reliability(p, l, node)
    mm1 = subchain_mm1_reliability(p, l, node)
    assert mmm >= mm1
    if sum(1 for x in p if x <= 0.99) >= 2:
        assert mmm > mm1


@given(p=probs, b=st.integers(min_value=0, max_value=4))
def test_monotone_in_backup_count(p, b):
    node = [0.999]
    counts = [b] * len(p)
    more = [b + 1] * len(p)
    assert dedicated_backup_reliability(p, more, node) >= \
        dedicated_backup_reliability(p, counts, node)
    assert chain_backup_reliability(p, b + 1, node) >= \
        chain_backup_reliability(p, b, node)


@given(p=probs)
def test_monotone_in_vnf_probability(p):
    node = [0.999]
    bumped = [min(1.0, x + 0.05) for x in p]
    assert chain_reliability(bumped, node) >= chain_reliability(p, node)


@given(p=probs, l=st.integers(min_value=2, max_value=4),
       u=st.integers(min_value=2, max_value=3))
def test_mixed_mm1_monotone_in_upgrades(p, l, u):
    node = [0.999]
    prev = None
    for k in range(len(p) + 1):
        value = mixed_mm1_reliability(p, l, u, 0, set(range(k)), node)
        if prev is not None:
            assert value >= prev - 1e-15
        prev = value


@given(p=probs, l=small_counts)
def test_mixed_mmm_monotone_in_deepened(p, l):
    node = [0.999]
    prev = None
    for k in range(len(p) + 1):
        value = mixed_mmm_reliability(p, l, set(range(k)), node)
        if prev is not None:
            assert value >= prev - 1e-15
        prev = value


@given(p=probs, node=st.floats(min_value=0.5, max_value=0.999))
def test_monotone_in_node_probability(p, node):
    lower = chain_reliability(p, [node])
    higher = chain_reliability(p, [min(1.0, node + 0.001)])
    assert higher >= lower
