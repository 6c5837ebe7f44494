"""Scenario files: the JSON schema the CLI consumes.

Schema (version 1), all fields required unless noted:

{
  "schema_version": 1,
  "name": "table3",
  "setting": "mm1" | "mmm",
  "seed": 1,
  "request_count": 50,
  "substrate": {"node_count": 400, "capacity": 56, "reliability": 0.999},
  "demand_range": [20, 40],          # optional, vCPUs per generated request
  "request_demands": [15, 10, ...],  # optional, explicit request demands
                                     # (length must equal request_count)
  "services": [
    {
      "name": "web-service",
      "traffic_share": 0.182,
      "arrival_rate": 100.0,
      "delay_budget": 0.5,
      "reliability_target": 0.90,
      "vnfs": [
        {"kind": "NAT", "reliability": 0.9, "service_rate": 200.0, "vcpus": 4},
        ...
      ]
    }, ...
  ]
}

Unknown fields are rejected everywhere.  Traffic shares must sum to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .design import ChainSpec, VnfDescriptor
from .errors import DomainError, ParseError, ValidationError
from .queueing import QueueSetting

SCHEMA_VERSION = 1
SHARE_TOLERANCE = 1e-9
DEFAULT_DEMAND_RANGE = (20, 40)


@dataclass(frozen=True)
class ServiceEntry:
    spec: ChainSpec
    traffic_share: float


@dataclass(frozen=True)
class Substrate:
    node_count: int
    capacity: int
    reliability: float


@dataclass(frozen=True)
class Scenario:
    name: str
    setting: QueueSetting
    seed: int
    request_count: int
    substrate: Substrate
    services: tuple
    demand_range: tuple = DEFAULT_DEMAND_RANGE
    request_demands: tuple | None = None  # explicit demands override the draw

    @property
    def node_probs(self) -> tuple:
        """Hosting reliability for one chain (same-node placement)."""
        return (self.substrate.reliability,)


def _expect_keys(obj: dict, where: str, required: set, optional: set,
                 problems: list) -> bool:
    if not isinstance(obj, dict):
        problems.append(f"{where}: expected an object")
        return False
    unknown = set(obj) - required - optional
    missing = required - set(obj)
    for key in sorted(unknown):
        problems.append(f"{where}: unknown field {key!r}")
    for key in sorted(missing):
        problems.append(f"{where}: missing field {key!r}")
    return not missing


def scenario_from_dict(raw: dict) -> Scenario:
    """Validate a parsed scenario, reporting every violation at once."""
    problems: list = []
    ok = _expect_keys(
        raw, "scenario",
        {"schema_version", "name", "setting", "seed", "request_count",
         "substrate", "services"},
        {"demand_range", "request_demands"}, problems)
    if not ok:
        raise ValidationError(problems)

    if raw["schema_version"] != SCHEMA_VERSION:
        problems.append(
            f"scenario: unsupported schema_version {raw['schema_version']!r}"
        )
    setting = None
    try:
        setting = QueueSetting(raw["setting"])
    except ValueError:
        problems.append(f"scenario: setting must be 'mm1' or 'mmm', "
                        f"got {raw['setting']!r}")
    if not isinstance(raw["seed"], int) or isinstance(raw["seed"], bool):
        problems.append("scenario: seed must be an integer")
    if not isinstance(raw["request_count"], int) or raw["request_count"] < 1:
        problems.append("scenario: request_count must be an integer >= 1")

    substrate = None
    if _expect_keys(raw["substrate"], "substrate",
                    {"node_count", "capacity", "reliability"}, set(),
                    problems):
        sub = raw["substrate"]
        try:
            substrate = Substrate(int(sub["node_count"]), int(sub["capacity"]),
                                  float(sub["reliability"]))
            if substrate.node_count < 1:
                problems.append("substrate: node_count must be >= 1")
            if substrate.capacity < 1:
                problems.append("substrate: capacity must be >= 1")
            if not 0.0 < substrate.reliability <= 1.0:
                problems.append("substrate: reliability must lie in (0, 1]")
        except (TypeError, ValueError):
            problems.append("substrate: node_count, capacity and reliability "
                            "must be numbers")

    demand_range = DEFAULT_DEMAND_RANGE
    if "demand_range" in raw:
        dr = raw["demand_range"]
        if (not isinstance(dr, list) or len(dr) != 2
                or not all(isinstance(x, int) for x in dr) or dr[0] > dr[1]
                or dr[0] < 1):
            problems.append("scenario: demand_range must be [low, high] "
                            "integers with 1 <= low <= high")
        else:
            demand_range = (dr[0], dr[1])

    request_demands = None
    if "request_demands" in raw:
        rd = raw["request_demands"]
        if (not isinstance(rd, list) or not rd
                or not all(isinstance(x, int) and x >= 1 for x in rd)):
            problems.append("scenario: request_demands must be a non-empty "
                            "list of integers >= 1")
        elif isinstance(raw["request_count"], int) \
                and len(rd) != raw["request_count"]:
            problems.append("scenario: request_demands length must equal "
                            "request_count")
        else:
            request_demands = tuple(rd)

    services = []
    if not isinstance(raw["services"], list) or not raw["services"]:
        problems.append("scenario: services must be a non-empty list")
    else:
        for i, svc in enumerate(raw["services"]):
            where = f"services[{i}]"
            if not _expect_keys(
                    svc, where,
                    {"name", "traffic_share", "arrival_rate", "delay_budget",
                     "reliability_target", "vnfs"},
                    set(), problems):
                continue
            vnfs = []
            if not isinstance(svc["vnfs"], list) or not svc["vnfs"]:
                problems.append(f"{where}: vnfs must be a non-empty list")
            else:
                for j, vnf in enumerate(svc["vnfs"]):
                    if not _expect_keys(
                            vnf, f"{where}.vnfs[{j}]",
                            {"kind", "reliability", "service_rate", "vcpus"},
                            set(), problems):
                        continue
                    try:
                        vnfs.append(VnfDescriptor(
                            kind=str(vnf["kind"]),
                            reliability=float(vnf["reliability"]),
                            service_rate=float(vnf["service_rate"]),
                            vcpus=int(vnf["vcpus"]),
                        ))
                    except (DomainError, TypeError, ValueError) as exc:
                        problems.append(f"{where}.vnfs[{j}]: {exc}")
            if not vnfs:
                continue
            try:
                spec = ChainSpec(
                    service_name=str(svc["name"]),
                    vnfs=tuple(vnfs),
                    arrival_rate=float(svc["arrival_rate"]),
                    delay_budget=float(svc["delay_budget"]),
                    reliability_target=float(svc["reliability_target"]),
                )
                services.append(ServiceEntry(spec, float(svc["traffic_share"])))
            except (DomainError, TypeError, ValueError) as exc:
                problems.append(f"{where}: {exc}")

    if services and len(services) == len(raw.get("services", [])):
        total_share = sum(s.traffic_share for s in services)
        if abs(total_share - 1.0) > SHARE_TOLERANCE:
            problems.append(
                f"scenario: traffic shares sum to {total_share!r}, expected 1.0"
            )
        names = [s.spec.service_name for s in services]
        if len(set(names)) != len(names):
            problems.append("scenario: service names must be unique")

    if problems:
        raise ValidationError(problems)
    return Scenario(
        name=str(raw["name"]),
        setting=setting,
        seed=raw["seed"],
        request_count=raw["request_count"],
        substrate=substrate,
        services=tuple(services),
        demand_range=demand_range,
        request_demands=request_demands,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "name": scenario.name,
        "setting": scenario.setting.value,
        "seed": scenario.seed,
        "request_count": scenario.request_count,
        "substrate": {
            "node_count": scenario.substrate.node_count,
            "capacity": scenario.substrate.capacity,
            "reliability": scenario.substrate.reliability,
        },
        "demand_range": list(scenario.demand_range),
        "services": [
            {
                "name": entry.spec.service_name,
                "traffic_share": entry.traffic_share,
                "arrival_rate": entry.spec.arrival_rate,
                "delay_budget": entry.spec.delay_budget,
                "reliability_target": entry.spec.reliability_target,
                "vnfs": [
                    {
                        "kind": v.kind,
                        "reliability": v.reliability,
                        "service_rate": v.service_rate,
                        "vcpus": v.vcpus,
                    }
                    for v in entry.spec.vnfs
                ],
            }
            for entry in scenario.services
        ],
    }
    if scenario.request_demands is not None:
        out["request_demands"] = list(scenario.request_demands)
    return out


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(raw)


def write_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2) + "\n",
        encoding="utf-8")


def bundled_scenario_path() -> Path:
    """The packaged four-service default scenario."""
    return Path(__file__).parent / "data" / "table3.json"


def default_scenario() -> Scenario:
    return load_scenario(bundled_scenario_path())
