"""Reliable chain design: subchaining, incremental backups, baselines.

The pipeline has two steps.  First the chain is split into as many
parallel subchains as the delay budget allows, stopping early once the
reliability target is met.  If subchaining alone is not enough, backups
are then added one slot at a time, always to the least reliable VNF not
yet covered in the current sweep, cycling subchain by subchain (MM1) or
across the per-stage pools (MMM) until the target is reached.

A hosting ceiling guards the backup loop: no amount of VNF redundancy
can push chain reliability above the product of the hosting-node
reliabilities, so targets at or above that product are flagged
infeasible instead of looping forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import queueing, reliability
from .errors import DomainError, InfeasibleError
from .queueing import QueueSetting

CEILING_EPSILON = 1e-9
# Safety net: stop if a whole sweep of backups moves reliability by less
# than this (floating-point saturation).
MIN_SWEEP_GAIN = 1e-12


@dataclass(frozen=True)
class VnfDescriptor:
    kind: str
    reliability: float
    service_rate: float
    vcpus: int

    def __post_init__(self):
        if not 0.0 < self.reliability <= 1.0:
            raise DomainError(
                f"VNF reliability must lie in (0, 1], got {self.reliability}"
            )
        if self.service_rate <= 0:
            raise DomainError("VNF service rate must be positive")
        if self.vcpus < 1:
            raise DomainError("VNF vCPU demand must be >= 1")


@dataclass(frozen=True)
class ChainSpec:
    """One service request: an ordered chain plus its SLA."""

    service_name: str
    vnfs: tuple
    arrival_rate: float
    delay_budget: float
    reliability_target: float

    def __post_init__(self):
        if not self.vnfs:
            raise DomainError("a chain needs at least one VNF")
        if self.arrival_rate <= 0:
            raise DomainError("arrival rate must be positive")
        if self.delay_budget <= 0:
            raise DomainError("delay budget must be positive")
        if not 0.0 < self.reliability_target < 1.0:
            raise DomainError("reliability target must lie in (0, 1)")

    @property
    def vnf_probs(self) -> tuple:
        return tuple(v.reliability for v in self.vnfs)

    @property
    def stage_rates(self) -> tuple:
        return tuple(v.service_rate for v in self.vnfs)

    @property
    def demands(self) -> tuple:
        return tuple(v.vcpus for v in self.vnfs)


class SubchainPlan(NamedTuple):
    reliability: float
    subchains: int
    delay: float


@dataclass(frozen=True)
class DesignOutcome:
    """A finished redundancy design for one chain."""

    service_name: str
    setting: QueueSetting
    subchains: int
    # MM1: {(subchain, vnf): extra copies}; MMM / full-backup: {vnf: extras}
    slot_backups: dict = field(default_factory=dict)
    achieved_reliability: float = 0.0
    achieved_delay: float = 0.0
    total_backups: int = 0
    vcpus: int = 0
    feasible: bool = True
    note: str = ""


def subchain_design(spec: ChainSpec, setting: QueueSetting,
                    node_probs: Sequence[float]) -> SubchainPlan:
    """Split the chain into the most subchains the delay budget allows.

    Stops early at the first count whose reliability already meets the
    target; otherwise keeps the largest count whose response time stays
    within the (inclusive) budget.
    """
    probs = spec.vnf_probs
    rates = spec.stage_rates

    def rel(l: int) -> float:
        if setting is QueueSetting.MM1:
            return reliability.subchain_mm1_reliability(probs, l, node_probs)
        return reliability.subchain_mmm_reliability(probs, l, node_probs)

    count = 1
    best_rel = reliability.chain_reliability(probs, node_probs)
    best_delay = queueing.chain_response(setting, rates, spec.arrival_rate, 1)
    while best_rel < spec.reliability_target:
        delay = queueing.chain_response(setting, rates, spec.arrival_rate,
                                        count + 1)
        if not queueing.within_budget(delay, spec.delay_budget):
            break
        count += 1
        best_delay = delay
        best_rel = rel(count)
    return SubchainPlan(best_rel, count, best_delay)


def vcpu_bill(demands: Sequence[int], subchains: int,
              backups_per_vnf: Sequence[int] | None = None) -> int:
    """Total vCPUs for a subchained deployment plus its backups.

    Splitting a VNF of demand c into l replicas costs ceil(c/l) each, so
    primaries bill ceil(c/l) * l per VNF and every backup slot bills one
    more ceil(c/l) replica.
    """
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    total = 0
    for v, c in enumerate(demands):
        if c < 1:
            raise DomainError("vCPU demand must be >= 1")
        replica = math.ceil(c / subchains)
        extras = backups_per_vnf[v] if backups_per_vnf else 0
        if extras < 0:
            raise DomainError("backup count must be >= 0")
        total += replica * subchains + replica * extras
    return total


def _backup_order(spec: ChainSpec) -> list:
    """VNF indices in backup-assignment order: least reliable first,
    earlier chain position breaking ties."""
    return sorted(range(len(spec.vnfs)),
                  key=lambda v: (spec.vnfs[v].reliability, v))


def _per_vnf_counts(outcome_slots: dict, n: int,
                    keyed_by_pair: bool) -> list:
    counts = [0] * n
    for key, extra in outcome_slots.items():
        v = key[1] if keyed_by_pair else key
        counts[v] += extra
    return counts


def guarantee_reliability(spec: ChainSpec, setting: QueueSetting,
                          node_probs: Sequence[float],
                          subchains: int | None = None) -> DesignOutcome:
    """Add backups one at a time until the reliability target is met.

    ``subchains`` defaults to the subchaining step's output.  Raises
    :class:`InfeasibleError` (with the best outcome attached) when the
    target is at or above the hosting ceiling, or when a full sweep of
    backups no longer improves reliability.
    """
    plan = subchain_design(spec, setting, node_probs)
    l = subchains if subchains is not None else plan.subchains
    if l < 1:
        raise DomainError(f"subchain count must be >= 1, got {l}")
    if subchains is not None and subchains != plan.subchains:
        plan = SubchainPlan(
            reliability=(
                reliability.subchain_mm1_reliability(spec.vnf_probs, l, node_probs)
                if setting is QueueSetting.MM1
                else reliability.subchain_mmm_reliability(spec.vnf_probs, l, node_probs)
            ),
            subchains=l,
            delay=queueing.chain_response(setting, spec.stage_rates,
                                          spec.arrival_rate, l),
        )

    probs = spec.vnf_probs
    n = len(probs)
    order = _backup_order(spec)

    def finish(slots, achieved, total, feasible, note=""):
        per_vnf = _per_vnf_counts(slots, n, setting is QueueSetting.MM1)
        return DesignOutcome(
            service_name=spec.service_name,
            setting=setting,
            subchains=l,
            slot_backups=dict(slots),
            achieved_reliability=achieved,
            achieved_delay=plan.delay,
            total_backups=total,
            vcpus=vcpu_bill(spec.demands, l, per_vnf),
            feasible=feasible,
            note=note,
        )

    if plan.reliability >= spec.reliability_target:
        return finish({}, plan.reliability, 0, True)

    ceiling = reliability.reliability_ceiling(node_probs)
    if spec.reliability_target >= ceiling - CEILING_EPSILON:
        note = (
            f"target {spec.reliability_target} is at or above the hosting "
            f"ceiling {ceiling:.6f}; unreachable by VNF redundancy"
        )
        outcome = finish({}, plan.reliability, 0, False, note)
        raise InfeasibleError(note, outcome=outcome)

    slots: dict = {}
    achieved = plan.reliability
    total = 0
    sweep_start = achieved

    if setting is QueueSetting.MM1:
        depth, filled, j = 2, 0, 0
        upgraded: set = set()
        while achieved < spec.reliability_target:
            v = order[j]
            upgraded.add(v)
            # assignment, not +=: a deeper sweep revisits the slot and
            # supersedes the extras recorded at the previous depth
            slots[(filled, v)] = depth - 1
            achieved = reliability.mixed_mm1_reliability(
                probs, l, depth, filled, upgraded, node_probs)
            total += 1
            j += 1
            if j == n:
                j = 0
                filled += 1
                upgraded = set()
                if achieved - sweep_start < MIN_SWEEP_GAIN:
                    note = ("reliability saturated below the target "
                            f"{spec.reliability_target}")
                    outcome = finish(slots, achieved, total, False, note)
                    raise InfeasibleError(note, outcome=outcome)
                sweep_start = achieved
            if filled == l:
                filled = 0
                depth += 1
    else:
        pool, j = l, 0
        deepened: set = set()
        while achieved < spec.reliability_target:
            v = order[j]
            deepened.add(v)
            slots[v] = slots.get(v, 0) + 1
            achieved = reliability.mixed_mmm_reliability(
                probs, pool, deepened, node_probs)
            total += 1
            j += 1
            if j == n:
                j = 0
                pool += 1
                deepened = set()
                if achieved - sweep_start < MIN_SWEEP_GAIN:
                    note = ("reliability saturated below the target "
                            f"{spec.reliability_target}")
                    outcome = finish(slots, achieved, total, False, note)
                    raise InfeasibleError(note, outcome=outcome)
                sweep_start = achieved

    return finish(slots, achieved, total, True)


class BaselineResult(NamedTuple):
    reliability: float
    vcpus: int
    delay: float


def scb1_baseline(spec: ChainSpec, backups_per_vnf: int | Sequence[int],
                  node_probs: Sequence[float]) -> BaselineResult:
    """Dedicated full-capacity backups behind every VNF.

    Standbys do not serve traffic, so the delay is the bare chain's.
    """
    if isinstance(backups_per_vnf, int):
        counts = [backups_per_vnf] * len(spec.vnfs)
    else:
        counts = list(backups_per_vnf)
    rel = reliability.dedicated_backup_reliability(spec.vnf_probs, counts,
                                                   node_probs)
    vcpus = sum((b + 1) * c for b, c in zip(counts, spec.demands))
    delay = queueing.chain_response(QueueSetting.MM1, spec.stage_rates,
                                    spec.arrival_rate, 1)
    return BaselineResult(rel, vcpus, delay)


def scb2_baseline(spec: ChainSpec, chain_backups: int,
                  node_probs: Sequence[float]) -> BaselineResult:
    """Whole standby chains behind the primary chain."""
    rel = reliability.chain_backup_reliability(spec.vnf_probs, chain_backups,
                                               node_probs)
    vcpus = (chain_backups + 1) * sum(spec.demands)
    delay = queueing.chain_response(QueueSetting.MM1, spec.stage_rates,
                                    spec.arrival_rate, 1)
    return BaselineResult(rel, vcpus, delay)


def full_backup_baseline(spec: ChainSpec,
                         node_probs: Sequence[float]) -> DesignOutcome:
    """Reference scheme: full-capacity dedicated backups, no subchaining.

    Repeatedly grants one backup to the currently least reliable VNF
    (judged by its whole parallel group) until the target is met.  Each
    backup bills the full per-VNF demand.
    """
    probs = spec.vnf_probs
    n = len(probs)
    delay = queueing.chain_response(QueueSetting.MM1, spec.stage_rates,
                                    spec.arrival_rate, 1)
    counts = [0] * n

    def group_rel(v: int) -> float:
        return 1.0 - (1.0 - probs[v]) ** (counts[v] + 1)

    def finish(achieved, feasible, note=""):
        vcpus = sum((b + 1) * c for b, c in zip(counts, spec.demands))
        return DesignOutcome(
            service_name=spec.service_name,
            setting=QueueSetting.MM1,
            subchains=1,
            slot_backups={v: counts[v] for v in range(n) if counts[v]},
            achieved_reliability=achieved,
            achieved_delay=delay,
            total_backups=sum(counts),
            vcpus=vcpus,
            feasible=feasible,
            note=note,
        )

    achieved = reliability.chain_reliability(probs, node_probs)
    if achieved >= spec.reliability_target:
        return finish(achieved, True)

    ceiling = reliability.reliability_ceiling(node_probs)
    if spec.reliability_target >= ceiling - CEILING_EPSILON:
        note = (
            f"target {spec.reliability_target} is at or above the hosting "
            f"ceiling {ceiling:.6f}; unreachable by VNF redundancy"
        )
        outcome = finish(achieved, False, note)
        raise InfeasibleError(note, outcome=outcome)

    sweep_start = achieved
    added = 0
    while achieved < spec.reliability_target:
        weakest = min(range(n), key=lambda v: (group_rel(v), v))
        counts[weakest] += 1
        achieved = reliability.dedicated_backup_reliability(probs, counts,
                                                            node_probs)
        added += 1
        if added % n == 0:
            if achieved - sweep_start < MIN_SWEEP_GAIN:
                note = ("reliability saturated below the target "
                        f"{spec.reliability_target}")
                outcome = finish(achieved, False, note)
                raise InfeasibleError(note, outcome=outcome)
            sweep_start = achieved
    return finish(achieved, True)
