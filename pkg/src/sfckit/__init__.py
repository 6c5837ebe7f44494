"""Reliability-guaranteed, delay-bounded service chain design and placement.

The toolkit splits chains into parallel subchains for redundancy, tops
them up with minimal incremental backups, and packs the resulting
requests onto substrate nodes with an exact solver or a stable-matching
heuristic, all validated by independent simulation oracles.
"""

from .design import (
    BaselineResult,
    ChainSpec,
    DesignOutcome,
    SubchainPlan,
    VnfDescriptor,
    full_backup_baseline,
    guarantee_reliability,
    scb1_baseline,
    scb2_baseline,
    subchain_design,
    vcpu_bill,
)
from .errors import (
    CapacityExhaustedError,
    DomainError,
    InfeasibleError,
    InstabilityError,
    ParseError,
    SfcError,
    SizeError,
    UnplaceableError,
    ValidationError,
)
from .placement import (
    PlacementMethod,
    PlacementOutcome,
    PlacementRequest,
    PreferenceTables,
    SubstrateNode,
    build_preferences,
    ffd_place,
    find_blocking_pairs,
    ilp_exact_place,
    mdm_place,
    mma_place,
    verify_stability,
)
from .queueing import (
    QueueSetting,
    chain_response,
    mm1_chain_response,
    mmm_chain_response,
    mmm_stage_response,
    waiting_probability,
)
from .reliability import (
    chain_backup_reliability,
    chain_reliability,
    dedicated_backup_reliability,
    mixed_mm1_reliability,
    mixed_mmm_reliability,
    reliability_ceiling,
    subchain_mm1_reliability,
    subchain_mmm_reliability,
)
from .scenario import Scenario, default_scenario, load_scenario, write_scenario
from .simulate import (
    DesConfig,
    SimEstimate,
    des_tandem,
    exact_structure_reliability,
    mc_structure_reliability,
)
from .structures import RedundancyStructure

__version__ = "0.1.0"
