"""Explicit series-parallel component graphs for redundancy topologies.

The oracles in :mod:`sfckit.simulate` evaluate these structures without
using the closed forms, so every shape the design pipeline can produce
has a builder here.  A structure is a parallel bank of subchains; a
subchain is a series of stages; a stage is a parallel group of component
reliabilities.  Hosting-node reliabilities are kept separate because
they are a plain series factor shared by all subchains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Set, Tuple

from .errors import DomainError

Stage = Tuple[float, ...]
Subchain = Tuple[Stage, ...]


@dataclass(frozen=True)
class RedundancyStructure:
    subchains: Tuple[Subchain, ...]
    node_probs: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.subchains:
            raise DomainError("a structure needs at least one subchain")
        for chain in self.subchains:
            if not chain:
                raise DomainError("a subchain needs at least one stage")
            for stage in chain:
                if not stage:
                    raise DomainError("a stage needs at least one component")
                for p in stage:
                    if not 0.0 < p <= 1.0:
                        raise DomainError(
                            f"component reliability must lie in (0, 1], got {p}"
                        )
        for p in self.node_probs:
            if not 0.0 < p <= 1.0:
                raise DomainError(f"node reliability must lie in (0, 1], got {p}")

    @property
    def component_count(self) -> int:
        return sum(len(stage) for chain in self.subchains for stage in chain)


def bare_chain(vnf_probs: Sequence[float],
               node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """Single chain, one component per stage."""
    chain = tuple((p,) for p in vnf_probs)
    return RedundancyStructure((chain,), tuple(node_probs))


def dedicated_backup_structure(vnf_probs: Sequence[float],
                               backups: Sequence[int],
                               node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """One chain whose stage v holds 1 + backups[v] parallel copies."""
    if len(backups) != len(vnf_probs):
        raise DomainError("one backup count per VNF is required")
    chain = tuple(
        tuple([p] * (b + 1)) for p, b in zip(vnf_probs, backups)
    )
    return RedundancyStructure((chain,), tuple(node_probs))


def chain_backup_structure(vnf_probs: Sequence[float], chain_backups: int,
                           node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """1 + chain_backups identical whole chains in parallel."""
    if chain_backups < 0:
        raise DomainError(f"chain backup count must be >= 0, got {chain_backups}")
    chain = tuple((p,) for p in vnf_probs)
    return RedundancyStructure(tuple([chain] * (chain_backups + 1)), tuple(node_probs))


def mm1_subchain_structure(vnf_probs: Sequence[float], subchains: int,
                           node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """``subchains`` reduced-capacity chains in parallel."""
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    return chain_backup_structure(vnf_probs, subchains - 1, node_probs)


def mmm_pool_structure(vnf_probs: Sequence[float], subchains: int,
                       node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """One chain whose every stage is a pool of ``subchains`` copies."""
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    chain = tuple(tuple([p] * subchains) for p in vnf_probs)
    return RedundancyStructure((chain,), tuple(node_probs))


def mixed_mm1_structure(vnf_probs: Sequence[float], subchains: int, depth: int,
                        filled: int, upgraded: Set[int],
                        node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """Parallel subchains mid-way through incremental backup assignment.

    Mirrors the three-shape state of the backup loop: ``filled``
    subchains fully at ``depth``, one in-progress subchain at ``depth``
    only on ``upgraded`` stages, the rest at depth - 1.
    """
    if not 0 <= filled <= subchains - 1:
        raise DomainError(
            f"filled subchain count must lie in [0, {subchains - 1}], got {filled}"
        )
    if depth < 2:
        raise DomainError(f"backup depth must be >= 2, got {depth}")
    full = tuple(tuple([p] * depth) for p in vnf_probs)
    shallow = tuple(tuple([p] * (depth - 1)) for p in vnf_probs)
    partial = tuple(
        tuple([p] * (depth if v in upgraded else depth - 1))
        for v, p in enumerate(vnf_probs)
    )
    chains = [full] * filled + [partial] + [shallow] * (subchains - 1 - filled)
    return RedundancyStructure(tuple(chains), tuple(node_probs))


def mixed_mmm_structure(vnf_probs: Sequence[float], pool_size: int,
                        deepened: Set[int],
                        node_probs: Sequence[float] = ()) -> RedundancyStructure:
    """Per-VNF pools where stages in ``deepened`` carry one extra copy."""
    if pool_size < 1:
        raise DomainError(f"pool size must be >= 1, got {pool_size}")
    chain = tuple(
        tuple([p] * (pool_size + 1 if v in deepened else pool_size))
        for v, p in enumerate(vnf_probs)
    )
    return RedundancyStructure((chain,), tuple(node_probs))


def structure_from_slots(vnf_probs: Sequence[float], subchains: int,
                         slot_backups: Mapping, node_probs: Sequence[float] = (),
                         pooled: bool = False) -> RedundancyStructure:
    """Build the structure described by a design outcome's backup map.

    ``slot_backups`` is keyed (subchain, vnf) for parallel-subchain
    deployments and by vnf index for pooled ones, holding extra copies
    beyond the first.
    """
    n = len(vnf_probs)
    if pooled:
        chain = tuple(
            tuple([p] * (subchains + slot_backups.get(v, 0)))
            for v, p in enumerate(vnf_probs)
        )
        return RedundancyStructure((chain,), tuple(node_probs))
    chains = []
    for c in range(subchains):
        chains.append(tuple(
            tuple([vnf_probs[v]] * (1 + slot_backups.get((c, v), 0)))
            for v in range(n)
        ))
    return RedundancyStructure(tuple(chains), tuple(node_probs))
