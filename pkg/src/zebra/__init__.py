"""Zero-error broadcast rate regions from per-user confusion graphs."""
from .capacity import CapacityBound, capacity_lower_bound, independence_number, known_capacity
from .entropy_region import (
    EntropyRegion,
    RegionCertificate,
    boundary_trace_2user,
    joint_partition,
    region_membership,
)
from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    DimensionMismatch,
    LimitExceeded,
    NotCliquePartition,
    RetriesExhausted,
    SizeLimitExceeded,
    UnknownObservation,
    ZebraError,
)
from .graph import (
    CliquePartition,
    ConfusionGraph,
    clique_partition,
    complement,
    complete_graph,
    empty_graph,
    strong_power,
    strong_product,
)
from .oracle import EncodingScheme, MessageVector, SearchResult, frontier, is_feasible
from .random_coder import build_scheme, decode, validate_scheme

__version__ = "0.1.0"
