
import pytest
from hypothesis import given, strategies as st

from sfckit.errors import DomainError, InstabilityError
from sfckit.queueing import (
    QueueSetting,
    chain_response,
    mm1_chain_response,
    mmm_chain_response,
    mmm_stage_response,
    waiting_probability,
    within_budget,
)

FIVE_STAGES = [200.0] * 5


def test_mm1_single_chain_matches_tandem_formula():
    assert mm1_chain_response(FIVE_STAGES, 100.0, 1) == pytest.approx(0.050)


def test_mm1_two_subchains_doubles_delay():
    assert mm1_chain_response(FIVE_STAGES, 100.0, 2) == pytest.approx(0.100)


def test_mm1_empty_queue_limit_is_pure_service_time():
    assert mm1_chain_response([200.0], 1e-9, 1) == pytest.approx(0.005, rel=1e-6)


def test_mmm_single_server_reduces_to_mm1():
    assert mmm_stage_response(200.0, 100.0, 1) == pytest.approx(
        1.0 / (200.0 - 100.0), rel=1e-12)


def test_mmm_two_server_stage_and_chain():
    stage = mmm_stage_response(200.0, 100.0, 2)
    assert stage == pytest.approx(0.013333, abs=5e-7)
    assert mmm_chain_response(FIVE_STAGES, 100.0, 2) == pytest.approx(
        0.066667, abs=5e-5)


def test_mmm_three_subchain_chain():
    assert mmm_chain_response(FIVE_STAGES, 100.0, 3) == pytest.approx(
        0.0868, abs=5e-5)


def test_chain_response_dispatch():
    assert chain_response(QueueSetting.MM1, FIVE_STAGES, 100.0, 3) == \
        pytest.approx(0.150)
    assert chain_response(QueueSetting.MMM, FIVE_STAGES, 100.0, 4) == \
        pytest.approx(0.1087, abs=5e-5)


def test_settings_coincide_at_one_subchain():
    mm1 = chain_response(QueueSetting.MM1, FIVE_STAGES, 100.0, 1)
    mmm = chain_response(QueueSetting.MMM, FIVE_STAGES, 100.0, 1)
    assert mm1 == pytest.approx(mmm, rel=1e-12)
    assert mm1 == pytest.approx(0.050)


def test_instability_raises():
    with pytest.raises(InstabilityError):
        mm1_chain_response([100.0], 100.0, 1)
    with pytest.raises(InstabilityError):
        mmm_stage_response(90.0, 100.0, 2)


def test_bad_subchain_count_raises():
    with pytest.raises(DomainError):
        mm1_chain_response(FIVE_STAGES, 100.0, 0)
    with pytest.raises(DomainError):
        mmm_stage_response(200.0, 100.0, -1)


def test_heterogeneous_stages():
    delay = mm1_chain_response([150.0, 300.0], 100.0, 2)
    assert delay == pytest.approx(2 * (1 / 50 + 1 / 200))


rates = st.floats(min_value=1.0, max_value=1e4)
loads = st.floats(min_value=0.01, max_value=0.95)
counts = st.integers(min_value=1, max_value=200)


@given(mu=rates, load=loads)
def test_mmm_single_server_identity_property(mu, load):
    lam = mu * load
    assert mmm_stage_response(mu, lam, 1) == pytest.approx(
        1.0 / (mu - lam), rel=1e-12)


@given(mu=rates, load=loads, l=counts)
def test_mm1_exactly_linear_in_subchains(mu, load, l):
    lam = mu * load
    assert mm1_chain_response([mu], lam, l) == l * mm1_chain_response([mu], lam, 1)


@given(mu=rates, load=loads, l=st.integers(min_value=2, max_value=200))
def test_mmm_pool_beats_split_mm1(mu, load, l):
    lam = mu * load
    assert mmm_stage_response(mu, lam, l) < l / (mu - lam)


@given(mu=rates, load=loads, l=counts)
def test_waiting_probability_in_unit_interval(mu, load, l):
    lam = mu * load
    rho = waiting_probability(mu, lam, l)
    assert 0.0 < rho < 1.0


def test_within_budget_inclusive_at_boundary():
    # a 100 ms design against a 100 ms budget must be admitted
    delay = mm1_chain_response(FIVE_STAGES, 100.0, 2)
    assert within_budget(delay, 0.1)
    assert not within_budget(delay + 1e-6, 0.1)
