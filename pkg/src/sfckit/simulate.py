"""Independent oracles: a discrete-event tandem-queue simulator and
exhaustive / Monte-Carlo evaluators for series-parallel structures.

Nothing here reuses the closed forms from :mod:`sfckit.queueing` or
:mod:`sfckit.reliability`; these paths exist to check them.  All
randomness comes from numpy's PCG64 generator seeded explicitly, so a
given seed reproduces results bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError, InstabilityError, SizeError
from .queueing import QueueSetting
from .structures import RedundancyStructure

EXHAUSTIVE_COMPONENT_LIMIT = 25
_BATCHES = 20
_T95_19DF = 2.093  # two-sided 95% Student-t quantile, 19 degrees of freedom
_ENUM_BLOCK = 1 << 20
_MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class DesConfig:
    """One tandem-queue simulation run."""

    setting: QueueSetting
    stage_rates: tuple
    arrival_rate: float
    subchains: int
    arrivals: int = 1_000_000
    warmup: int | None = None  # None -> first 10% of arrivals
    seed: int = 0
    routing: str = "random"  # "random" | "round_robin" (MM1 split only)

    def __post_init__(self):
        if self.subchains < 1:
            raise DomainError(f"subchain count must be >= 1, got {self.subchains}")
        if self.arrivals < 1:
            raise DomainError("arrivals must be positive")
        warm = self.effective_warmup
        if not 0 <= warm < self.arrivals:
            raise DomainError("warmup must satisfy 0 <= warmup < arrivals")
        if self.routing not in ("random", "round_robin"):
            raise DomainError(f"unknown routing {self.routing!r}")
        if self.arrival_rate <= 0:
            raise DomainError("arrival rate must be positive")
        for mu in self.stage_rates:
            if mu <= self.arrival_rate:
                raise InstabilityError(
                    f"unstable stage: service rate {mu} <= arrival rate "
                    f"{self.arrival_rate}"
                )

    @property
    def effective_warmup(self) -> int:
        if self.warmup is None:
            return self.arrivals // 10
        return self.warmup


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    half_width_95: float
    samples: int


@njit(cache=True)
def _pool_departures(arrivals, services, servers):  # pragma: no cover - jitted
    free = np.zeros(servers)
    out = np.empty(arrivals.size)
    for i in range(arrivals.size):
        k = 0
        for j in range(1, servers):
            if free[j] < free[k]:
                k = j
        start = arrivals[i] if arrivals[i] > free[k] else free[k]
        out[i] = start + services[i]
        free[k] = out[i]
    return out


def _fifo_departures(arrivals, services):
    # D_i = max(A_i, D_{i-1}) + S_i, unrolled to a running maximum so the
    # whole scan stays in numpy.
    csum = np.cumsum(services)
    offset = arrivals - np.concatenate(([0.0], csum[:-1]))
    return csum + np.maximum.accumulate(offset)


def _batch_half_width(samples: np.ndarray) -> float:
    usable = (samples.size // _BATCHES) * _BATCHES
    if usable < _BATCHES:
        return float("inf")
    means = samples[:usable].reshape(_BATCHES, -1).mean(axis=1)
    return _T95_19DF * means.std(ddof=1) / np.sqrt(_BATCHES)


def des_tandem(cfg: DesConfig) -> SimEstimate:
    """Simulate a chain deployment and estimate the mean response time.

    MM1 setting: arrivals are split across ``subchains`` independent
    tandem lines of single-server queues at rate mu/l.  MMM setting: all
    traffic flows through every stage, each a FIFO pool of ``subchains``
    servers at rate mu/l; jobs can overtake inside a pool, so stage
    arrivals are re-sorted between stages.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.arrivals
    arrivals = np.cumsum(rng.exponential(1.0 / cfg.arrival_rate, n))
    l = cfg.subchains

    if cfg.setting is QueueSetting.MM1:
        if l == 1:
            route = np.zeros(n, dtype=np.int64)
        elif cfg.routing == "random":
            route = rng.integers(0, l, n)
        else:
            route = np.arange(n, dtype=np.int64) % l
        done = np.empty(n)
        for c in range(l):
            mask = route == c
            arr = arrivals[mask]
            if arr.size == 0:
                continue
            t = arr
            for mu in cfg.stage_rates:
                services = rng.exponential(l / mu, arr.size)
                t = _fifo_departures(t, services)
            done[mask] = t
    else:
        t = arrivals
        for mu in cfg.stage_rates:
            services = rng.exponential(l / mu, n)
            if l == 1:
                dep = _fifo_departures(t, services)
            else:
                order = np.argsort(t, kind="stable")
                dep_sorted = _pool_departures(t[order], services, l)
                dep = np.empty(n)
                dep[order] = dep_sorted
            t = dep
        done = t

    sojourn = done - arrivals
    kept = sojourn[cfg.effective_warmup:]
    return SimEstimate(
        mean=float(kept.mean()),
        half_width_95=float(_batch_half_width(kept)),
        samples=int(kept.size),
    )


def _delivery_masks(structure: RedundancyStructure):
    """Bit layout plus per-stage leaf masks for state enumeration."""
    probs = []
    chains = []
    bit = 0
    for chain in structure.subchains:
        stages = []
        for stage in chain:
            mask = 0
            for p in stage:
                probs.append(p)
                mask |= 1 << bit
                bit += 1
            stages.append(mask)
        chains.append(stages)
    return np.array(probs), chains


def exact_structure_reliability(structure: RedundancyStructure) -> float:
    """Delivery probability by summing over every component state.

    A stage delivers if any of its components is up; a subchain delivers
    if all its stages do; the structure delivers if any subchain does.
    Node reliabilities multiply on afterwards.  Exponential in the
    component count, hence the hard size limit.
    """
    k = structure.component_count
    if k > EXHAUSTIVE_COMPONENT_LIMIT:
        raise SizeError(
            f"{k} components exceed the exhaustive limit of "
            f"{EXHAUSTIVE_COMPONENT_LIMIT}"
        )
    probs, chains = _delivery_masks(structure)
    total = 0.0
    n_states = 1 << k
    for start in range(0, n_states, _ENUM_BLOCK):
        states = np.arange(start, min(start + _ENUM_BLOCK, n_states),
                           dtype=np.uint64)
        weight = np.ones(states.size)
        for i, p in enumerate(probs):
            up = (states >> np.uint64(i)) & np.uint64(1)
            weight *= np.where(up == 1, p, 1.0 - p)
        delivered = np.zeros(states.size, dtype=bool)
        for stages in chains:
            chain_up = np.ones(states.size, dtype=bool)
            for mask in stages:
                chain_up &= (states & np.uint64(mask)) != 0
            delivered |= chain_up
        total += float(weight[delivered].sum())
    node = 1.0
    for p in structure.node_probs:
        node *= p
    return total * node


def mc_structure_reliability(structure: RedundancyStructure, trials: int,
                             seed: int = 0) -> SimEstimate:
    """Bernoulli-sample component states and count delivering trials.

    Returns the estimated delivery probability times the node factor,
    with a binomial 95% half-width scaled the same way.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    probs, chains = _delivery_masks(structure)
    rng = np.random.default_rng(seed)
    delivered = 0
    remaining = trials
    while remaining > 0:
        block = min(_MC_BLOCK, remaining)
        up = rng.random((block, probs.size)) < probs
        ok = np.zeros(block, dtype=bool)
        col = 0
        for stages in chains:
            chain_up = np.ones(block, dtype=bool)
            for mask in stages:
                width = mask.bit_count()
                chain_up &= up[:, col:col + width].any(axis=1)
                col += width
            ok |= chain_up
        delivered += int(ok.sum())
        remaining -= block
    node = 1.0
    for p in structure.node_probs:
        node *= p
    p_hat = delivered / trials
    half = 1.96 * np.sqrt(p_hat * (1.0 - p_hat) / trials)
    return SimEstimate(mean=p_hat * node, half_width_95=float(half * node),
                       samples=trials)
