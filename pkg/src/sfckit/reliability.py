"""Closed-form reliability of chains under every supported redundancy shape.

A chain delivers service only if every stage delivers and every hosting
node is up, so node reliabilities multiply into each expression as a
plain series factor.  Redundancy appears in two flavours: parallel
copies of an individual VNF (1 - (1-p)^k per stage) and parallel copies
of a whole chain (1 - (1-prod p)^k).

All arithmetic is plain double precision in natural order; chains here
are short enough that log-space accumulation would buy nothing.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Set

from .errors import DomainError


def _check_probs(values: Iterable[float], what: str) -> None:
    for p in values:
        if not 0.0 < p <= 1.0:
            raise DomainError(f"{what} must lie in (0, 1], got {p}")


def _node_factor(node_probs: Sequence[float]) -> float:
    _check_probs(node_probs, "node reliability")
    out = 1.0
    for p in node_probs:
        out *= p
    return out


def chain_reliability(vnf_probs: Sequence[float],
                      node_probs: Sequence[float] = ()) -> float:
    """Reliability of a bare chain: product of all VNF and node terms."""
    _check_probs(vnf_probs, "VNF reliability")
    out = 1.0
    for p in vnf_probs:
        out *= p
    return out * _node_factor(node_probs)


def dedicated_backup_reliability(vnf_probs: Sequence[float],
                                 backups: Sequence[int],
                                 node_probs: Sequence[float] = ()) -> float:
    """Reliability with ``backups[v]`` standby copies behind each VNF."""
    _check_probs(vnf_probs, "VNF reliability")
    if len(backups) != len(vnf_probs):
        raise DomainError("one backup count per VNF is required")
    out = 1.0
    for p, b in zip(vnf_probs, backups):
        if b < 0:
            raise DomainError(f"backup count must be >= 0, got {b}")
        out *= 1.0 - (1.0 - p) ** (b + 1)
    return out * _node_factor(node_probs)


def chain_backup_reliability(vnf_probs: Sequence[float], chain_backups: int,
                             node_probs: Sequence[float] = ()) -> float:
    """Reliability with ``chain_backups`` whole standby chains in parallel."""
    _check_probs(vnf_probs, "VNF reliability")
    if chain_backups < 0:
        raise DomainError(f"chain backup count must be >= 0, got {chain_backups}")
    alive = 1.0
    for p in vnf_probs:
        alive *= p
    return (1.0 - (1.0 - alive) ** (chain_backups + 1)) * _node_factor(node_probs)


def subchain_mm1_reliability(vnf_probs: Sequence[float], subchains: int,
                             node_probs: Sequence[float] = ()) -> float:
    """Reliability of ``subchains`` parallel reduced-capacity chains.

    Structurally identical to whole-chain standbys with one fewer copy,
    so this delegates to keep the two bit-for-bit equal.
    """
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    return chain_backup_reliability(vnf_probs, subchains - 1, node_probs)


def subchain_mmm_reliability(vnf_probs: Sequence[float], subchains: int,
                             node_probs: Sequence[float] = ()) -> float:
    """Reliability when each VNF runs as a pool of ``subchains`` replicas."""
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    _check_probs(vnf_probs, "VNF reliability")
    out = 1.0
    for p in vnf_probs:
        out *= 1.0 - (1.0 - p) ** subchains
    return out * _node_factor(node_probs)


def mixed_mm1_reliability(vnf_probs: Sequence[float], subchains: int,
                          depth: int, filled: int, upgraded: Set[int],
                          node_probs: Sequence[float] = ()) -> float:
    """Reliability mid-way through backing up parallel M/M/1 subchains.

    Backups are added one VNF slot at a time, so at any instant the
    subchains fall into three shapes: ``filled`` subchains already carry
    ``depth`` copies of every VNF, one in-progress subchain carries
    ``depth`` copies for the indices in ``upgraded`` and depth-1
    elsewhere, and the remaining subchains still sit at depth-1.
    """
    if subchains < 1:
        raise DomainError(f"subchain count must be >= 1, got {subchains}")
    if depth < 2:
        raise DomainError(f"backup depth must be >= 2, got {depth}")
    if not 0 <= filled <= subchains - 1:
        raise DomainError(
            f"filled subchain count must lie in [0, {subchains - 1}], got {filled}"
        )
    _check_probs(vnf_probs, "VNF reliability")
    indices = range(len(vnf_probs))
    if not set(upgraded) <= set(indices):
        raise DomainError("upgraded indices must reference chain positions")

    full = 1.0      # subchain with `depth` copies everywhere
    partial = 1.0   # the in-progress subchain
    shallow = 1.0   # subchain still at depth - 1
    for v in indices:
        p = vnf_probs[v]
        at_depth = 1.0 - (1.0 - p) ** depth
        at_prev = 1.0 - (1.0 - p) ** (depth - 1)
        full *= at_depth
        shallow *= at_prev
        partial *= at_depth if v in upgraded else at_prev

    fail = ((1.0 - full) ** filled) * (1.0 - partial) \
        * ((1.0 - shallow) ** (subchains - 1 - filled))
    return (1.0 - fail) * _node_factor(node_probs)


def mixed_mmm_reliability(vnf_probs: Sequence[float], pool_size: int,
                          deepened: Set[int],
                          node_probs: Sequence[float] = ()) -> float:
    """Reliability of per-VNF pools where ``deepened`` got one extra copy."""
    if pool_size < 1:
        raise DomainError(f"pool size must be >= 1, got {pool_size}")
    _check_probs(vnf_probs, "VNF reliability")
    indices = range(len(vnf_probs))
    if not set(deepened) <= set(indices):
        raise DomainError("deepened indices must reference chain positions")
    out = 1.0
    for v in indices:
        p = vnf_probs[v]
        copies = pool_size + 1 if v in deepened else pool_size
        out *= 1.0 - (1.0 - p) ** copies
    return out * _node_factor(node_probs)


def reliability_ceiling(node_probs: Sequence[float]) -> float:
    """Best reliability any amount of VNF redundancy can approach.

    The hosting nodes are a series factor no parallel VNF copy can mask,
    so their product bounds every design from above.
    """
    return _node_factor(node_probs)
