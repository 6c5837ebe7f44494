"""Closed-form response times for subchained service chains.

Two deployment settings are modelled.  Splitting a chain into ``l``
parallel replicas of reduced-capacity VNFs gives a tandem of M/M/1
queues per replica, with the traffic divided evenly: each stage then
behaves as an M/M/1 queue with service rate mu/l fed at rate lambda/l.
Alternatively the l replicas of each stage can pool the full arrival
stream, which makes every stage an M/M/m queue with m = l servers of
rate mu/l each.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .errors import DomainError, InstabilityError

# Delay-budget comparisons are inclusive; this guards the exact-boundary
# case (e.g. a 100 ms design against a 100 ms budget) from float noise.
DELAY_TOLERANCE = 1e-9


class QueueSetting(Enum):
    """Queueing model used when a chain is split into subchains."""

    MM1 = "mm1"
    MMM = "mmm"


def _check_stage(mu: float, lam: float) -> None:
    if lam <= 0:
        raise DomainError(f"arrival rate must be positive, got {lam}")
    if mu <= 0:
        raise DomainError(f"service rate must be positive, got {mu}")
    if mu <= lam:
        raise InstabilityError(
            f"unstable stage: service rate {mu} <= arrival rate {lam}"
        )


def _check_subchains(subchains: int) -> None:
    if not isinstance(subchains, int) or subchains < 1:
        raise DomainError(f"subchain count must be an integer >= 1, got {subchains}")


def mm1_chain_response(stage_rates: Sequence[float], arrival_rate: float,
                       subchains: int = 1) -> float:
    """Mean response time of a chain split into parallel M/M/1 subchains.

    Each subchain stage serves at mu/l and receives lambda/l, so the
    per-stage sojourn is 1/(mu/l - lambda/l) = l/(mu - lambda); the total
    is linear in the subchain count.
    """
    _check_subchains(subchains)
    base = 0.0
    for mu in stage_rates:
        _check_stage(mu, arrival_rate)
        base += 1.0 / (mu - arrival_rate)
    # one multiply keeps D(l) == l * D(1) exact, not just approximate
    return subchains * base


def waiting_probability(service_rate: float, arrival_rate: float,
                        servers: int) -> float:
    """Probability an arrival must queue in an M/M/m pool (Erlang C).

    The pool has ``servers`` servers of rate service_rate/servers fed by
    the full arrival stream.  Computed through the Erlang-B recurrence,
    which stays in [0, 1] throughout and never overflows, unlike the
    direct factorial form.
    """
    _check_subchains(servers)
    _check_stage(service_rate, arrival_rate)
    offered = servers * arrival_rate / service_rate  # load in Erlangs
    utilization = arrival_rate / service_rate
    blocking = 1.0
    for k in range(1, servers + 1):
        blocking = offered * blocking / (k + offered * blocking)
    return blocking / (1.0 - utilization * (1.0 - blocking))


def mmm_stage_response(service_rate: float, arrival_rate: float,
                       subchains: int = 1) -> float:
    """Mean response time of one chain stage run as an M/M/m pool.

    m = subchains servers of rate mu/l share the whole stream: the mean
    sojourn is l/mu + C/(mu - lambda) with C the Erlang-C waiting
    probability.  At l=1 this reduces exactly to the M/M/1 value
    1/(mu - lambda).
    """
    wait = waiting_probability(service_rate, arrival_rate, subchains)
    return subchains / service_rate + wait / (service_rate - arrival_rate)


def mmm_chain_response(stage_rates: Sequence[float], arrival_rate: float,
                       subchains: int = 1) -> float:
    """Mean response time of a chain whose stages are M/M/m pools."""
    return sum(
        mmm_stage_response(mu, arrival_rate, subchains) for mu in stage_rates
    )


def chain_response(setting: QueueSetting, stage_rates: Sequence[float],
                   arrival_rate: float, subchains: int = 1) -> float:
    """Dispatch to the response-time model for ``setting``."""
    if setting is QueueSetting.MM1:
        return mm1_chain_response(stage_rates, arrival_rate, subchains)
    if setting is QueueSetting.MMM:
        return mmm_chain_response(stage_rates, arrival_rate, subchains)
    raise DomainError(f"unknown queue setting: {setting!r}")


def within_budget(delay: float, budget: float) -> bool:
    """Inclusive delay-budget check with an absolute float tolerance."""
    return delay <= budget + DELAY_TOLERANCE
