"""Report generation: drives the design, placement and validation flows
for a scenario and renders diff-friendly CSV tables.

Wall-clock timings appear only in the bench report; every other table
is a deterministic function of (scenario, seed) so the files can serve
as golden outputs.
"""

from __future__ import annotations

import csv
import dataclasses
import time
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import design, placement, queueing, reliability, simulate, structures
from .design import ChainSpec, DesignOutcome
from .errors import InfeasibleError, SfcError
from .placement import PlacementMethod, PlacementRequest, SubstrateNode
from .queueing import QueueSetting
from .scenario import Scenario

DESIGN_COLUMNS = ("method", "setting", "service", "subchains", "backups",
                  "reliability", "delay_ms", "vcpus", "feasible", "note")
PLACE_COLUMNS = ("method", "request_count", "active_nodes", "proposal_count",
                 "stable", "note")
SIM_COLUMNS = ("service", "setting", "subchains", "analytic_ms", "sim_ms",
               "sim_hw95_ms", "rel_err_pct", "reliability", "vcpus",
               "full_capacity_vcpus", "arrivals", "seed")
VALIDATE_COLUMNS = ("check", "setting", "subject", "expected", "observed",
                    "criterion", "status")
BENCH_COLUMNS = ("request_count", "method", "wall_time_s", "active_nodes",
                 "proposal_count", "search_nodes", "note")

DES_AGREEMENT_PCT = 3.0
EXACT_ORACLE_TOL = 1e-12
MC_SIGMA_FACTOR = 4.0


def write_csv(path, rows: Iterable[dict], columns: Sequence[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _fmt_rel(value: float) -> str:
    return f"{value:.4f}"


def _fmt_ms(seconds: float) -> str:
    return f"{seconds * 1000.0:.4f}"


def _design_row(method: str, setting: str, service: str, outcome: DesignOutcome,
                note: str = "") -> dict:
    return {
        "method": method,
        "setting": setting,
        "service": service,
        "subchains": outcome.subchains,
        "backups": outcome.total_backups,
        "reliability": _fmt_rel(outcome.achieved_reliability),
        "delay_ms": _fmt_ms(outcome.achieved_delay),
        "vcpus": outcome.vcpus,
        "feasible": "yes" if outcome.feasible else "no",
        "note": note or outcome.note,
    }


def design_outcome(spec: ChainSpec, setting: QueueSetting,
                   node_probs: Sequence[float]) -> DesignOutcome:
    """Run the full design pipeline, capturing infeasibility in the outcome."""
    try:
        return design.guarantee_reliability(spec, setting, node_probs)
    except InfeasibleError as exc:
        return exc.outcome


def full_backup_outcome(spec: ChainSpec,
                        node_probs: Sequence[float]) -> DesignOutcome:
    try:
        return design.full_backup_baseline(spec, node_probs)
    except InfeasibleError as exc:
        return exc.outcome


def _error_row(method: str, setting: str, service: str, exc: Exception) -> dict:
    return {
        "method": method, "setting": setting, "service": service,
        "subchains": "", "backups": "", "reliability": "", "delay_ms": "",
        "vcpus": "", "feasible": "no",
        "note": f"error: {exc}",
    }


def design_report(scenario: Scenario,
                  settings: Optional[Sequence[QueueSetting]] = None) -> list:
    """Design rows per service per setting, plus baseline rows.

    Errors (an unstable arrival rate, say) are recorded in the affected
    row rather than aborting the report.
    """
    if settings is None:
        settings = (QueueSetting.MM1, QueueSetting.MMM)
    node_probs = scenario.node_probs
    rows = []
    for entry in scenario.services:
        spec = entry.spec
        for setting in settings:
            try:
                outcome = design_outcome(spec, setting, node_probs)
                rows.append(_design_row("subchain", setting.value,
                                        spec.service_name, outcome))
            except SfcError as exc:
                rows.append(_error_row("subchain", setting.value,
                                       spec.service_name, exc))
        try:
            scb1 = design.scb1_baseline(spec, 1, node_probs)
            rows.append({
                "method": "scb1", "setting": "-", "service": spec.service_name,
                "subchains": 1, "backups": len(spec.vnfs),
                "reliability": _fmt_rel(scb1.reliability),
                "delay_ms": _fmt_ms(scb1.delay), "vcpus": scb1.vcpus,
                "feasible": "yes" if scb1.reliability >= spec.reliability_target
                            else "no",
                "note": "one dedicated backup per VNF",
            })
            scb2 = design.scb2_baseline(spec, 1, node_probs)
            rows.append({
                "method": "scb2", "setting": "-", "service": spec.service_name,
                "subchains": 1, "backups": 1,
                "reliability": _fmt_rel(scb2.reliability),
                "delay_ms": _fmt_ms(scb2.delay), "vcpus": scb2.vcpus,
                "feasible": "yes" if scb2.reliability >= spec.reliability_target
                            else "no",
                "note": "one standby chain",
            })
            full = full_backup_outcome(spec, node_probs)
            rows.append(_design_row("full-backup", "-", spec.service_name,
                                    full))
        except SfcError as exc:
            rows.append(_error_row("baseline", "-", spec.service_name, exc))
    return rows


def generate_requests(scenario: Scenario) -> list:
    """Request set for placement experiments.

    Explicit ``request_demands`` win; otherwise demands are drawn
    uniformly from ``demand_range`` with the scenario seed.
    """
    if scenario.request_demands is not None:
        demands = list(scenario.request_demands)
    else:
        rng = np.random.default_rng(scenario.seed)
        lo, hi = scenario.demand_range
        demands = rng.integers(lo, hi + 1, scenario.request_count)
    width = len(str(scenario.request_count))
    return [
        PlacementRequest(sfc_id=f"r{i + 1:0{width}d}", vcpus=int(d))
        for i, d in enumerate(demands)
    ]


def substrate_nodes(scenario: Scenario) -> list:
    width = len(str(scenario.substrate.node_count))
    return [
        SubstrateNode(node_id=f"n{i + 1:0{width}d}",
                      capacity=scenario.substrate.capacity,
                      reliability=scenario.substrate.reliability)
        for i in range(scenario.substrate.node_count)
    ]


_PLACERS = {
    PlacementMethod.ExactILP: placement.ilp_exact_place,
    PlacementMethod.FFD: placement.ffd_place,
}


def run_method(method: PlacementMethod, requests, nodes, prefs):
    if method is PlacementMethod.MMA:
        return placement.mma_place(requests, nodes, prefs)
    if method is PlacementMethod.MDM:
        return placement.mdm_place(requests, nodes, prefs)
    return _PLACERS[method](requests, nodes)


def place_report(scenario: Scenario, methods: Sequence[PlacementMethod],
                 exact_limit: int = 60) -> list:
    """Active-node counts per method on the scenario's seeded request set.

    The exact solver is skipped (with a notice row) above
    ``exact_limit`` requests.
    """
    requests = generate_requests(scenario)
    nodes = substrate_nodes(scenario)
    prefs = placement.build_preferences(requests, nodes)
    rows = []
    for method in methods:
        if (method is PlacementMethod.ExactILP
                and scenario.request_count > exact_limit):
            rows.append({
                "method": method.value, "request_count": len(requests),
                "active_nodes": "", "proposal_count": "", "stable": "",
                "note": f"skipped: request_count > exact limit {exact_limit}",
            })
            continue
        try:
            outcome = run_method(method, requests, nodes, prefs)
        except SfcError as exc:
            rows.append({
                "method": method.value, "request_count": len(requests),
                "active_nodes": "", "proposal_count": "", "stable": "",
                "note": f"error: {exc}",
            })
            continue
        stable = ""
        if method in (PlacementMethod.MMA, PlacementMethod.MDM):
            stable = ("yes" if placement.verify_stability(outcome, prefs,
                                                          requests)
                      else "no")
        rows.append({
            "method": method.value,
            "request_count": len(requests),
            "active_nodes": outcome.active_nodes,
            "proposal_count": ("" if outcome.proposal_count is None
                               else outcome.proposal_count),
            "stable": stable,
            "note": "",
        })
    return rows


def max_subchains_in_budget(spec: ChainSpec, setting: QueueSetting,
                            cap: int = 10) -> int:
    """Largest split whose response time stays inside the delay budget."""
    best = 1
    for l in range(2, cap + 1):
        delay = queueing.chain_response(setting, spec.stage_rates,
                                        spec.arrival_rate, l)
        if not queueing.within_budget(delay, spec.delay_budget):
            break
        best = l
    return best


def simulate_report(scenario: Scenario,
                    settings: Optional[Sequence[QueueSetting]] = None,
                    arrivals: int = 200_000,
                    seed: Optional[int] = None) -> list:
    """Subchain-count sweep per service and setting.

    Each row pairs the simulated response time with the closed form and
    carries the matching reliability and vCPU series, so the CSV plots
    directly as subchains versus delay, reliability or resources.
    ``full_capacity_vcpus`` is the cost of reaching the same redundancy
    with full-capacity standbys instead of reduced-capacity replicas.
    """
    if settings is None:
        settings = (QueueSetting.MM1, QueueSetting.MMM)
    if seed is None:
        seed = scenario.seed
    node_probs = scenario.node_probs
    rows = []
    for entry in scenario.services:
        spec = entry.spec
        for setting in settings:
            top = max_subchains_in_budget(spec, setting)
            for l in range(1, top + 1):
                analytic = queueing.chain_response(
                    setting, spec.stage_rates, spec.arrival_rate, l)
                est = simulate.des_tandem(simulate.DesConfig(
                    setting=setting, stage_rates=spec.stage_rates,
                    arrival_rate=spec.arrival_rate, subchains=l,
                    arrivals=arrivals, seed=seed))
                if setting is QueueSetting.MM1:
                    rel = reliability.subchain_mm1_reliability(
                        spec.vnf_probs, l, node_probs)
                else:
                    rel = reliability.subchain_mmm_reliability(
                        spec.vnf_probs, l, node_probs)
                rows.append({
                    "service": spec.service_name,
                    "setting": setting.value,
                    "subchains": l,
                    "analytic_ms": _fmt_ms(analytic),
                    "sim_ms": _fmt_ms(est.mean),
                    "sim_hw95_ms": _fmt_ms(est.half_width_95),
                    "rel_err_pct":
                        f"{abs(est.mean - analytic) / analytic * 100.0:.3f}",
                    "reliability": _fmt_rel(rel),
                    "vcpus": design.vcpu_bill(spec.demands, l),
                    "full_capacity_vcpus": l * sum(spec.demands),
                    "arrivals": arrivals,
                    "seed": seed,
                })
    return rows


def outcome_structure(spec: ChainSpec, outcome: DesignOutcome,
                      node_probs: Sequence[float]):
    return structures.structure_from_slots(
        spec.vnf_probs, outcome.subchains, outcome.slot_backups, node_probs,
        pooled=outcome.setting is QueueSetting.MMM)


def validate_report(scenario: Scenario, arrivals: int = 200_000,
                    mc_trials: int = 200_000,
                    seed: Optional[int] = None,
                    settings: Optional[Sequence[QueueSetting]] = None) -> tuple:
    """Cross-check closed forms against the independent oracles.

    Returns (rows, all_passed).
    """
    if seed is None:
        seed = scenario.seed
    if settings is None:
        settings = (QueueSetting.MM1, QueueSetting.MMM)
    node_probs = scenario.node_probs
    rows = []
    ok = True

    def add(check, setting, subject, expected, observed, criterion, passed):
        nonlocal ok
        ok = ok and passed
        rows.append({
            "check": check, "setting": setting, "subject": subject,
            "expected": f"{expected:.6f}", "observed": f"{observed:.6f}",
            "criterion": criterion, "status": "pass" if passed else "FAIL",
        })

    for entry in scenario.services:
        spec = entry.spec
        for setting in settings:
            try:
                outcome = design_outcome(spec, setting, node_probs)
                # response time: simulator vs closed form at the designed split
                analytic = queueing.chain_response(
                    setting, spec.stage_rates, spec.arrival_rate,
                    outcome.subchains)
                est = simulate.des_tandem(simulate.DesConfig(
                    setting=setting, stage_rates=spec.stage_rates,
                    arrival_rate=spec.arrival_rate,
                    subchains=outcome.subchains,
                    arrivals=arrivals, seed=seed))
                err = abs(est.mean - analytic) / analytic * 100.0
                add("delay-des", setting.value, spec.service_name, analytic,
                    est.mean, f"rel err {err:.2f}% <= {DES_AGREEMENT_PCT}%",
                    err <= DES_AGREEMENT_PCT)
                # reliability: exhaustive or Monte-Carlo oracle vs closed form
                structure = outcome_structure(spec, outcome, node_probs)
                closed = outcome.achieved_reliability
                if (structure.component_count
                        <= simulate.EXHAUSTIVE_COMPONENT_LIMIT):
                    oracle = simulate.exact_structure_reliability(structure)
                    add("reliability-exact", setting.value, spec.service_name,
                        closed, oracle,
                        f"|diff| <= {EXACT_ORACLE_TOL}",
                        abs(oracle - closed) <= EXACT_ORACLE_TOL)
                else:
                    mc = simulate.mc_structure_reliability(structure,
                                                           mc_trials, seed)
                    sigma = (mc.half_width_95 / 1.96
                             if mc.half_width_95 else 0.0)
                    bound = MC_SIGMA_FACTOR * sigma
                    add("reliability-mc", setting.value, spec.service_name,
                        closed, mc.mean,
                        f"|diff| <= {MC_SIGMA_FACTOR} sigma",
                        abs(mc.mean - closed) <= max(bound, 1e-9))
            except SfcError as exc:
                ok = False
                rows.append({
                    "check": "error", "setting": setting.value,
                    "subject": spec.service_name, "expected": "",
                    "observed": "", "criterion": str(exc), "status": "FAIL",
                })
    return rows, ok


def bench_report(scenario: Scenario, sizes: Sequence[int],
                 methods: Sequence[PlacementMethod],
                 exact_limit: int = 60) -> list:
    """Wall-clock comparison across request counts (machine dependent)."""
    rows = []
    for size in sizes:
        # resizing invalidates any fixed demand list; fall back to the draw
        sub = dataclasses.replace(scenario, request_count=size,
                                  request_demands=None)
        requests = generate_requests(sub)
        nodes = substrate_nodes(sub)
        prefs = placement.build_preferences(requests, nodes)
        for method in methods:
            if method is PlacementMethod.ExactILP and size > exact_limit:
                rows.append({
                    "request_count": size, "method": method.value,
                    "wall_time_s": "", "active_nodes": "",
                    "proposal_count": "", "search_nodes": "",
                    "note": f"skipped: size > exact limit {exact_limit}",
                })
                continue
            start = time.perf_counter()
            try:
                outcome = run_method(method, requests, nodes, prefs)
            except SfcError as exc:
                rows.append({
                    "request_count": size, "method": method.value,
                    "wall_time_s": "", "active_nodes": "",
                    "proposal_count": "", "search_nodes": "",
                    "note": f"error: {exc}",
                })
                continue
            elapsed = time.perf_counter() - start
            rows.append({
                "request_count": size,
                "method": method.value,
                "wall_time_s": f"{elapsed:.6f}",
                "active_nodes": outcome.active_nodes,
                "proposal_count": ("" if outcome.proposal_count is None
                                   else outcome.proposal_count),
                "search_nodes": outcome.search_nodes,
                "note": "",
            })
    return rows
