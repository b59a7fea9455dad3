"""Graph-structured hyperdimensional computing for small tabular classification."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError, DataError, DimensionError, EmptyAggregateError, EmptyClassError,
    GraphHDCError, GraphSpecError, NumericalError,
)
from .hdc import (  # noqa: E402
    RandomBasis, bind, bundle, cosine_matrix, cosine_sim, cosine_sim_flagged, nbundle,
    normalize, random_projection_encode,
)
from .encoder import ScalerStats, encode_parameter, fit_scaler, scale  # noqa: E402
from .graph import GraphSpec, Group, compose, graph_bind, group_hv, sample_hv, validate  # noqa: E402
from .memory import (  # noqa: E402
    ComponentMemoryBank, PrototypeMemory, build_component_memories, build_prototypes,
    retrain_step, retrieve,
)
from .trainer import ModelState, TrainConfig, backward, forward, prototype_stability, train  # noqa: E402
from .explain import (  # noqa: E402
    AttributionReport, MasReport, aggregate_attributions, attribution, component_affinity, mas,
    sample_embedding, within_group_attribution,
)
from .evaluation import SplitPlan, SweepGrid, evaluate, make_splits, sweep  # noqa: E402
from .data import DatasetTable, aed, binarize, clip_censored, gap_threshold, load_csv  # noqa: E402
