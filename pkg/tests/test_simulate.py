import pytest

from sfckit.errors import DomainError, InstabilityError, SizeError
from sfckit.queueing import QueueSetting, chain_response
from sfckit.reliability import (
    chain_reliability,
    mixed_mm1_reliability,
    subchain_mm1_reliability,
    subchain_mmm_reliability,
)
from sfckit.simulate import (
    DesConfig,
    des_tandem,
    exact_structure_reliability,
    mc_structure_reliability,
)
from sfckit.structures import (
    RedundancyStructure,
    bare_chain,
    chain_backup_structure,
    dedicated_backup_structure,
    mixed_mm1_structure,
    mixed_mmm_structure,
    mm1_subchain_structure,
    mmm_pool_structure,
)

P5 = [0.9] * 5
NODE = [0.999]
FIVE = (200.0,) * 5


# --- exhaustive structure oracle -------------------------------------------

def test_exact_bare_chain():
    assert exact_structure_reliability(bare_chain(P5, NODE)) == \
        pytest.approx(0.58990, abs=5e-6)


def test_exact_two_parallel_chains():
    assert exact_structure_reliability(chain_backup_structure(P5, 1, NODE)) == \
        pytest.approx(0.83147, abs=5e-6)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_exact_matches_mm1_closed_form(l):
    closed = subchain_mm1_reliability(P5, l, NODE)
    oracle = exact_structure_reliability(mm1_subchain_structure(P5, l, NODE))
    assert oracle == pytest.approx(closed, abs=1e-12)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_exact_matches_mmm_closed_form(l):
    closed = subchain_mmm_reliability(P5, l, NODE)
    oracle = exact_structure_reliability(mmm_pool_structure(P5, l, NODE))
    assert oracle == pytest.approx(closed, abs=1e-12)


def test_exact_matches_mixed_closed_form():
    closed = mixed_mm1_reliability(P5, 2, 2, 0, {0}, NODE)
    oracle = exact_structure_reliability(
        mixed_mm1_structure(P5, 2, 2, 0, {0}, NODE))
    assert oracle == pytest.approx(closed, abs=1e-12)
    assert oracle == pytest.approx(0.8556262331741102, abs=1e-12)


def test_exact_heterogeneous_probabilities():
    probs = [0.7, 0.85, 0.9, 0.95]
    closed = subchain_mmm_reliability(probs, 3, [0.99, 0.999])
    oracle = exact_structure_reliability(
        mmm_pool_structure(probs, 3, [0.99, 0.999]))
    assert oracle == pytest.approx(closed, abs=1e-12)


def test_exact_size_limit():
    with pytest.raises(SizeError):
        exact_structure_reliability(mm1_subchain_structure(P5, 6, NODE))


# --- Monte-Carlo oracle ------------------------------------------------------

def test_mc_bare_chain_within_four_sigma():
    closed = chain_reliability(P5, NODE)
    est = mc_structure_reliability(bare_chain(P5, NODE), 10**6, seed=3)
    sigma = est.half_width_95 / 1.96
    assert abs(est.mean - closed) <= 4 * sigma


def test_mc_degenerate_all_up():
    s = RedundancyStructure((((1.0,), (1.0,)),))
    est = mc_structure_reliability(s, 1000, seed=0)
    assert est.mean == 1.0
    assert est.half_width_95 == 0.0


def test_mc_large_structure_matches_closed_form():
    # 50 components: beyond the exhaustive limit
    closed = subchain_mm1_reliability(P5, 10, NODE)
    est = mc_structure_reliability(mm1_subchain_structure(P5, 10, NODE),
                                   10**6, seed=7)
    sigma = est.half_width_95 / 1.96
    assert abs(est.mean - closed) <= 4 * sigma


def test_mc_deterministic_given_seed():
    s = mixed_mmm_structure(P5, 2, {0, 1}, NODE)
    a = mc_structure_reliability(s, 50_000, seed=11)
    b = mc_structure_reliability(s, 50_000, seed=11)
    assert a == b


def test_mc_interval_coverage():
    # the 95% interval should contain the closed form in >= 90% of seeds
    closed = chain_reliability(P5, NODE)
    s = bare_chain(P5, NODE)
    hits = 0
    for seed in range(100):
        est = mc_structure_reliability(s, 20_000, seed=seed)
        if abs(est.mean - closed) <= est.half_width_95:
            hits += 1
    assert hits >= 90


def test_mc_rejects_bad_trials():
    with pytest.raises(DomainError):
        mc_structure_reliability(bare_chain(P5, NODE), 0)


# --- discrete-event simulator ------------------------------------------------

def test_des_mm1_agrees_with_formula():
    cfg = DesConfig(QueueSetting.MM1, FIVE, 100.0, 1, arrivals=100_000, seed=5)
    est = des_tandem(cfg)
    analytic = chain_response(QueueSetting.MM1, FIVE, 100.0, 1)
    assert abs(est.mean - analytic) / analytic < 0.03


def test_des_mmm_pool_agrees_with_formula():
    cfg = DesConfig(QueueSetting.MMM, FIVE, 100.0, 2, arrivals=100_000, seed=5)
    est = des_tandem(cfg)
    analytic = chain_response(QueueSetting.MMM, FIVE, 100.0, 2)
    assert abs(est.mean - analytic) / analytic < 0.03


def test_des_service_time_only_limit():
    cfg = DesConfig(QueueSetting.MM1, FIVE, 0.001, 1, arrivals=20_000, seed=1)
    est = des_tandem(cfg)
    assert est.mean == pytest.approx(sum(1.0 / mu for mu in FIVE), rel=0.05)


def test_des_deterministic_given_seed():
    cfg = DesConfig(QueueSetting.MMM, FIVE, 100.0, 3, arrivals=30_000, seed=9)
    assert des_tandem(cfg) == des_tandem(cfg)


def test_des_round_robin_option_runs():
    cfg = DesConfig(QueueSetting.MM1, FIVE, 100.0, 2, arrivals=20_000, seed=2,
                    routing="round_robin")
    est = des_tandem(cfg)
    assert est.mean > 0
    assert est.samples == 18_000  # default warmup discards the first 10%


def test_des_instability_rejected():
    with pytest.raises(InstabilityError):
        DesConfig(QueueSetting.MM1, (90.0,), 100.0, 1)


def test_des_config_validation():
    with pytest.raises(DomainError):
        DesConfig(QueueSetting.MM1, FIVE, 100.0, 0)
    with pytest.raises(DomainError):
        DesConfig(QueueSetting.MM1, FIVE, 100.0, 1, arrivals=100, warmup=100)
    with pytest.raises(DomainError):
        DesConfig(QueueSetting.MM1, FIVE, 100.0, 1, routing="hash")
