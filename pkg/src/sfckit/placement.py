"""Placing designed chains onto substrate nodes with few active nodes.

Four strategies share one outcome type: an exact branch-and-bound
bin packer, a modified many-to-one deferred-acceptance matcher that
lets rejected chains propose again, the classical matcher as a
baseline, and first-fit-decreasing (also the exact solver's incumbent).

Preference construction follows the resource-packing rule: nodes rank
chains by descending demand (tightest packing first), chains rank nodes
by reliability, then capacity, then identifier.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import CapacityExhaustedError, DomainError, UnplaceableError


class PlacementMethod(Enum):
    ExactILP = "ilp"
    MMA = "mma"
    MDM = "mdm"
    FFD = "ffd"


@dataclass(frozen=True)
class SubstrateNode:
    node_id: str
    capacity: int
    reliability: float = 1.0

    def __post_init__(self):
        if self.capacity < 1:
            raise DomainError("node capacity must be >= 1")
        if not 0.0 < self.reliability <= 1.0:
            raise DomainError("node reliability must lie in (0, 1]")


@dataclass(frozen=True)
class PlacementRequest:
    sfc_id: str
    vcpus: int
    origin: object = None  # optional DesignOutcome provenance

    def __post_init__(self):
        if self.vcpus < 1:
            raise DomainError("request demand must be >= 1")


@dataclass(frozen=True)
class PreferenceTables:
    """Strict complete orders, best first."""

    node_order: Dict[str, Tuple[str, ...]]  # sfc_id -> node ids
    sfc_order: Dict[str, Tuple[str, ...]]   # node_id -> sfc ids


@dataclass
class PlacementOutcome:
    assignment: Dict[str, str]
    active_nodes: int
    residuals: Dict[str, int]
    method: PlacementMethod
    proposal_count: Optional[int] = None
    search_nodes: int = 0  # exact solver: B&B nodes expanded


def _check_inputs(requests: Sequence[PlacementRequest],
                  nodes: Sequence[SubstrateNode]) -> None:
    if not nodes:
        raise DomainError("at least one substrate node is required")
    ids = [r.sfc_id for r in requests]
    if len(set(ids)) != len(ids):
        raise DomainError("request ids must be unique")
    node_ids = [n.node_id for n in nodes]
    if len(set(node_ids)) != len(node_ids):
        raise DomainError("node ids must be unique")
    biggest = max(n.capacity for n in nodes)
    for r in requests:
        if r.vcpus > biggest:
            raise UnplaceableError(
                f"request {r.sfc_id} needs {r.vcpus} vCPUs but the largest "
                f"node offers {biggest}"
            )
    if sum(r.vcpus for r in requests) > sum(n.capacity for n in nodes):
        raise CapacityExhaustedError(
            "total demand exceeds total substrate capacity"
        )


def build_preferences(requests: Sequence[PlacementRequest],
                      nodes: Sequence[SubstrateNode]) -> PreferenceTables:
    """Node lists rank chains by descending demand; chain lists rank
    nodes by descending reliability, then capacity, then id."""
    if not requests or not nodes:
        raise DomainError("preferences need non-empty request and node sets")
    sfc_ranked = sorted(requests, key=lambda r: (-r.vcpus, r.sfc_id))
    sfc_ids = tuple(r.sfc_id for r in sfc_ranked)
    node_ranked = sorted(
        nodes, key=lambda n: (-n.reliability, -n.capacity, n.node_id))
    node_ids = tuple(n.node_id for n in node_ranked)
    return PreferenceTables(
        node_order={r.sfc_id: node_ids for r in requests},
        sfc_order={n.node_id: sfc_ids for n in nodes},
    )


def _outcome(assignment: Dict[str, str], nodes: Sequence[SubstrateNode],
             requests: Sequence[PlacementRequest], method: PlacementMethod,
             proposals: Optional[int] = None,
             search_nodes: int = 0) -> PlacementOutcome:
    demand = {r.sfc_id: r.vcpus for r in requests}
    residuals = {n.node_id: n.capacity for n in nodes}
    for sfc, node in assignment.items():
        residuals[node] -= demand[sfc]
        if residuals[node] < 0:
            raise DomainError(f"capacity violated on node {node}")
    active = sum(1 for n in nodes
                 if residuals[n.node_id] < n.capacity)
    return PlacementOutcome(
        assignment=dict(assignment),
        active_nodes=active,
        residuals=residuals,
        method=method,
        proposal_count=proposals,
        search_nodes=search_nodes,
    )


# ---------------------------------------------------------------------------
# first-fit decreasing
# ---------------------------------------------------------------------------

def ffd_place(requests: Sequence[PlacementRequest],
              nodes: Sequence[SubstrateNode]) -> PlacementOutcome:
    """First node (in id order) with room, items by descending demand."""
    _check_inputs(requests, nodes)
    ordered_nodes = sorted(nodes, key=lambda n: n.node_id)
    residual = {n.node_id: n.capacity for n in ordered_nodes}
    assignment: Dict[str, str] = {}
    for r in sorted(requests, key=lambda r: (-r.vcpus, r.sfc_id)):
        for n in ordered_nodes:
            if residual[n.node_id] >= r.vcpus:
                residual[n.node_id] -= r.vcpus
                assignment[r.sfc_id] = n.node_id
                break
        else:
            raise CapacityExhaustedError(
                f"first-fit could not place request {r.sfc_id}"
            )
    return _outcome(assignment, nodes, requests, PlacementMethod.FFD)


# ---------------------------------------------------------------------------
# exact solver: pairing reduction + branch and bound
# ---------------------------------------------------------------------------

def _l2_bound(demands: Sequence[int], cap: int) -> int:
    """Martello-Toth L2 lower bound for identical capacities."""
    best = ceil(sum(demands) / cap)
    half = cap // 2
    thresholds = sorted({d for d in demands if d <= half} | {0})
    for k in thresholds:
        big = mid_cnt = 0
        mid_sum = small_sum = 0
        for d in demands:
            if d > cap - k:
                big += 1
            elif d * 2 > cap:
                mid_cnt += 1
                mid_sum += d
            elif d >= k:
                small_sum += d
        extra = max(0, ceil((small_sum - (mid_cnt * cap - mid_sum)) / cap))
        best = max(best, big + mid_cnt + extra)
    return best


def _reduce_pairs(items: List[Tuple[int, str]], cap: int):
    """Safely close bins while the largest item can host at most one partner.

    When no two remaining items fit beside the largest one, pairing it
    with its largest feasible partner is optimal (swapping that partner
    into any other arrangement never costs a bin), so the pair can be
    committed without search.
    """
    rest = sorted(items)  # ascending (demand, id)
    bins: List[List[Tuple[int, str]]] = []
    while rest:
        top = rest[-1]
        if len(rest) >= 3 and top[0] + rest[0][0] + rest[1][0] <= cap:
            break
        rest.pop()
        content = [top]
        j = bisect_right(rest, cap - top[0], key=lambda item: item[0]) - 1
        if j >= 0:
            content.append(rest.pop(j))
        bins.append(content)
    return bins, rest


def _search_bins(demands: List[Tuple[int, str]],
                 cap: int) -> Tuple[List[List[Tuple[int, str]]], int]:
    """Branch and bound over identical bins; returns (bins, nodes expanded)."""
    order = sorted(demands, reverse=True)
    n = len(order)
    best_bins: List[List[Tuple[int, str]]] = []
    explored = 0
    residuals: List[int] = []
    contents: List[List[Tuple[int, str]]] = []

    # FFD incumbent in this item order
    ffd_assign: List[List[Tuple[int, str]]] = []
    ffd_res: List[int] = []
    for item in order:
        for i, r in enumerate(ffd_res):
            if r >= item[0]:
                ffd_res[i] -= item[0]
                ffd_assign[i].append(item)
                break
        else:
            ffd_res.append(cap - item[0])
            ffd_assign.append([item])
    best = len(ffd_assign)
    best_bins = [list(b) for b in ffd_assign]
    root_lb = _l2_bound([d for d, _ in order], cap)
    if best == root_lb:
        return best_bins, 0

    def rec(i: int, used: int):
        nonlocal best, best_bins, explored
        explored += 1
        if i == n:
            if used < best:
                best = used
                best_bins = [list(b) for b in contents]
            return
        if used >= best:
            return
        # bound treats each open bin's load as an indivisible chunk
        chunk_lb = _l2_bound(
            [d for d, _ in order[i:]] + [cap - r for r in residuals if r < cap],
            cap)
        if chunk_lb >= best:
            return
        d, ident = order[i]
        exact = [b for b, r in enumerate(residuals) if r == d]
        if exact:
            b = exact[0]
            residuals[b] -= d
            contents[b].append(order[i])
            rec(i + 1, used)
            contents[b].pop()
            residuals[b] += d
            return  # a perfect fit dominates every other branch
        seen = set()
        for r, b in sorted((r, b) for b, r in enumerate(residuals) if r >= d):
            if r in seen:
                continue
            seen.add(r)
            residuals[b] -= d
            contents[b].append(order[i])
            rec(i + 1, used)
            contents[b].pop()
            residuals[b] += d
        if used + 1 < best:
            residuals.append(cap - d)
            contents.append([order[i]])
            rec(i + 1, used + 1)
            contents.pop()
            residuals.pop()

    rec(0, 0)
    return best_bins, explored


def _search_hetero(demands: List[Tuple[int, str]],
                   nodes: Sequence[SubstrateNode]) -> Tuple[Dict[str, str], int]:
    """Exact search over concrete nodes when capacities differ."""
    order = sorted(demands, reverse=True)
    node_list = sorted(nodes, key=lambda n: (-n.capacity, n.node_id))
    residual = {n.node_id: n.capacity for n in node_list}
    best_assign: Dict[str, str] = {}
    best = len(node_list) + 1
    explored = 0
    current: Dict[str, str] = {}

    def rec(i: int, used: int):
        nonlocal best, best_assign, explored
        explored += 1
        if used >= best:
            return
        if i == len(order):
            best = used
            best_assign = dict(current)
            return
        d, ident = order[i]
        opened_caps = set()
        for n in node_list:
            r = residual[n.node_id]
            if r < d:
                continue
            fresh = r == n.capacity
            if fresh:
                # identical fresh nodes are interchangeable
                if n.capacity in opened_caps:
                    continue
                opened_caps.add(n.capacity)
            residual[n.node_id] -= d
            current[ident] = n.node_id
            rec(i + 1, used + (1 if fresh else 0))
            del current[ident]
            residual[n.node_id] += d

    rec(0, 0)
    if len(best_assign) != len(order):
        raise CapacityExhaustedError(
            "no assignment fits the request set on the given nodes"
        )
    return best_assign, explored


def ilp_exact_place(requests: Sequence[PlacementRequest],
                    nodes: Sequence[SubstrateNode]) -> PlacementOutcome:
    """Provably minimum active-node placement.

    Identical capacities (the common case) go through a safe pairing
    reduction and then branch and bound with an FFD incumbent, perfect-
    fit dominance and a chunk-augmented L2 bound.  Mixed capacities fall
    back to exact search over the concrete node list.
    """
    _check_inputs(requests, nodes)
    caps = {n.capacity for n in nodes}
    items = [(r.vcpus, r.sfc_id) for r in requests]
    if not items:
        return _outcome({}, nodes, requests, PlacementMethod.ExactILP, None, 0)

    if len(caps) > 1:
        assignment, explored = _search_hetero(items, nodes)
        return _outcome(assignment, nodes, requests, PlacementMethod.ExactILP,
                        None, explored)

    cap = caps.pop()
    closed, rest = _reduce_pairs(items, cap)
    explored = 0
    all_bins = closed
    if rest:
        searched, explored = _search_bins(rest, cap)
        all_bins = closed + searched
    if len(all_bins) > len(nodes):
        raise CapacityExhaustedError(
            f"optimal packing needs {len(all_bins)} nodes but only "
            f"{len(nodes)} exist"
        )
    assignment: Dict[str, str] = {}
    ordered_nodes = sorted(nodes, key=lambda n: n.node_id)
    for node, content in zip(ordered_nodes, all_bins):
        for _, ident in content:
            assignment[ident] = node.node_id
    return _outcome(assignment, nodes, requests, PlacementMethod.ExactILP,
                    None, explored)


# ---------------------------------------------------------------------------
# deferred-acceptance matchers
# ---------------------------------------------------------------------------

class _MatchState:
    def __init__(self, requests, nodes, prefs):
        self.demand = {r.sfc_id: r.vcpus for r in requests}
        self.capacity = {n.node_id: n.capacity for n in nodes}
        self.residual = dict(self.capacity)
        self.seat: Dict[str, Optional[str]] = {r.sfc_id: None for r in requests}
        self.accepted: Dict[str, set] = {n.node_id: set() for n in nodes}
        self.rank = {
            node: {sfc: i for i, sfc in enumerate(order)}
            for node, order in prefs.sfc_order.items()
        }
        self.node_order = prefs.node_order
        self.proposals = 0

    def lesser_accepted(self, node: str, sfc: str) -> List[str]:
        """Accepted chains the node ranks strictly below ``sfc``,
        least preferred first."""
        r = self.rank[node]
        worse = [x for x in self.accepted[node] if r[x] > r[sfc]]
        worse.sort(key=lambda x: r[x], reverse=True)
        return worse

    def seat_sfc(self, sfc: str, node: str) -> None:
        self.accepted[node].add(sfc)
        self.seat[sfc] = node
        self.residual[node] -= self.demand[sfc]

    def unseat_sfc(self, sfc: str) -> str:
        node = self.seat[sfc]
        self.accepted[node].remove(sfc)
        self.seat[sfc] = None
        self.residual[node] += self.demand[sfc]
        return node


def _proposal_cap(n_requests: int, n_nodes: int) -> int:
    return 10 * n_requests * n_requests * n_nodes + 1000


def mma_place(requests: Sequence[PlacementRequest],
              nodes: Sequence[SubstrateNode],
              prefs: Optional[PreferenceTables] = None) -> PlacementOutcome:
    """Modified deferred acceptance with reclamation and re-proposal.

    Unassigned chains propose in rounds, ascending id, each to its most
    preferred node it holds no live rejection from.  A node accepts
    within residual capacity, or evicts strictly lesser-preferred chains
    (least preferred first, stopping as soon as the proposer fits) after
    checking the reclaimable total up front.  A rejection marks the node
    for that chain; the mark lapses if the node's residual later grows,
    because the rejection reasoning no longer holds, and the chain --
    even one already seated elsewhere -- may then propose there again.
    At termination every surviving mark certifies the node still cannot
    admit its chain, which is exactly the no-blocking-pair condition.
    """
    _check_inputs(requests, nodes)
    if not requests:
        return _outcome({}, nodes, requests, PlacementMethod.MMA, 0)
    if prefs is None:
        prefs = build_preferences(requests, nodes)
    st = _MatchState(requests, nodes, prefs)
    # mark value = node residual-growth version at rejection time; the
    # mark is live only while the node's version is unchanged
    version = {n.node_id: 0 for n in nodes}
    marks: Dict[str, Dict[str, int]] = {r.sfc_id: {} for r in requests}
    budget = _proposal_cap(len(requests), len(nodes))
    sfc_ids = sorted(st.seat)

    def live_mark(sfc: str, node: str) -> bool:
        stamp = marks[sfc].get(node)
        return stamp is not None and stamp >= version[node]

    def propose(sfc: str, node: str) -> bool:
        st.proposals += 1
        if st.proposals > budget:
            raise RuntimeError(
                "matching exceeded its proposal budget without converging"
            )
        need = st.demand[sfc]
        if st.residual[node] >= need:
            st.seat_sfc(sfc, node)
            marks[sfc].pop(node, None)
            return True
        worse = st.lesser_accepted(node, sfc)
        reclaimable = sum(st.demand[x] for x in worse)
        if worse and st.residual[node] + reclaimable >= need:
            for x in worse:
                if st.residual[node] >= need:
                    break
                st.unseat_sfc(x)
                version[node] += 1
                marks[x].pop(node, None)
            st.seat_sfc(sfc, node)
            marks[sfc].pop(node, None)
            return True
        marks[sfc][node] = version[node]
        return False

    while True:
        # proposal rounds: every unassigned chain proposes once per round
        while True:
            waiting = [s for s in sfc_ids if st.seat[s] is None]
            if not waiting:
                break
            for sfc in waiting:
                if st.seat[sfc] is not None:
                    continue
                target = next(
                    (n for n in st.node_order[sfc] if not live_mark(sfc, n)),
                    None)
                if target is None:
                    raise CapacityExhaustedError(
                        f"request {sfc} was rejected by every node"
                    )
                propose(sfc, target)
        # a seated chain whose mark on a preferred node lapsed proposes
        # again; a successful move frees its old seat and re-settles
        moved = False
        for sfc in sfc_ids:
            home = st.seat[sfc]
            order = st.node_order[sfc]
            for node in order[:order.index(home)]:
                if live_mark(sfc, node):
                    continue
                old = st.unseat_sfc(sfc)
                if propose(sfc, node):
                    version[old] += 1
                    moved = True
                else:
                    st.seat_sfc(sfc, old)
                if moved:
                    break
            if moved:
                break
        if not moved:
            break

    assignment = {s: n for s, n in st.seat.items() if n is not None}
    return _outcome(assignment, nodes, requests, PlacementMethod.MMA,
                    st.proposals)


def mdm_place(requests: Sequence[PlacementRequest],
              nodes: Sequence[SubstrateNode],
              prefs: Optional[PreferenceTables] = None) -> PlacementOutcome:
    """Classical many-to-one deferred acceptance baseline.

    On a conflict with a higher-ranked proposer the node rejects every
    lesser-preferred accepted chain at once, and any rejection is final:
    the rejected chain never proposes to that node again.
    """
    _check_inputs(requests, nodes)
    if not requests:
        return _outcome({}, nodes, requests, PlacementMethod.MDM, 0)
    if prefs is None:
        prefs = build_preferences(requests, nodes)
    st = _MatchState(requests, nodes, prefs)
    marked: Dict[str, set] = {r.sfc_id: set() for r in requests}
    budget = _proposal_cap(len(requests), len(nodes))
    sfc_ids = sorted(st.seat)

    def propose(sfc: str, node: str) -> None:
        st.proposals += 1
        if st.proposals > budget:
            raise RuntimeError(
                "matching exceeded its proposal budget without converging"
            )
        need = st.demand[sfc]
        if st.residual[node] >= need:
            st.seat_sfc(sfc, node)
            return
        worse = st.lesser_accepted(node, sfc)
        if worse:
            for x in worse:
                st.unseat_sfc(x)
                marked[x].add(node)
            if st.residual[node] >= need:
                st.seat_sfc(sfc, node)
            else:
                marked[sfc].add(node)
        else:
            marked[sfc].add(node)

    while True:
        waiting = [s for s in sfc_ids if st.seat[s] is None]
        if not waiting:
            break
        for sfc in waiting:
            if st.seat[sfc] is not None:
                continue
            target = next(
                (n for n in st.node_order[sfc] if n not in marked[sfc]),
                None)
            if target is None:
                raise CapacityExhaustedError(
                    f"request {sfc} was rejected by every node"
                )
            propose(sfc, target)

    assignment = {s: n for s, n in st.seat.items() if n is not None}
    return _outcome(assignment, nodes, requests, PlacementMethod.MDM,
                    st.proposals)


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

def find_blocking_pairs(outcome: PlacementOutcome, prefs: PreferenceTables,
                        requests: Sequence[PlacementRequest]
                        ) -> List[Tuple[str, str]]:
    """All (sfc, node) pairs that would rather be matched together.

    A pair blocks when the chain prefers the node to its assignment and
    the node could admit it, either inside its residual capacity or by
    evicting strictly lesser-preferred chains whose demand covers the
    shortfall.
    """
    demand = {r.sfc_id: r.vcpus for r in requests}
    occupants: Dict[str, List[str]] = {}
    for sfc, node in outcome.assignment.items():
        occupants.setdefault(node, []).append(sfc)
    ranks = {
        node: {s: i for i, s in enumerate(order)}
        for node, order in prefs.sfc_order.items()
    }
    pairs = []
    for sfc, home in sorted(outcome.assignment.items()):
        order = prefs.node_order[sfc]
        for node in order[:order.index(home)]:
            rank = ranks[node]
            free = outcome.residuals.get(node, 0)
            if free >= demand[sfc]:
                pairs.append((sfc, node))
                continue
            reclaimable = sum(
                demand[x] for x in occupants.get(node, [])
                if rank[x] > rank[sfc]
            )
            if free + reclaimable >= demand[sfc]:
                pairs.append((sfc, node))
    return pairs


def verify_stability(outcome: PlacementOutcome, prefs: PreferenceTables,
                     requests: Sequence[PlacementRequest]) -> bool:
    """True iff the outcome admits no blocking pair."""
    if not outcome.assignment:
        return True
    return not find_blocking_pairs(outcome, prefs, requests)
