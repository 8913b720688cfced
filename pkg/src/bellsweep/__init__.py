"""Entanglement detection for pure multipartite states by sweeping projected
CHSH inequalities, plus single-copy distillability witnesses."""

__version__ = "0.1.0"

from .chsh import correlation_matrix, evaluate_bell, horodecki_max_violation, seesaw_optimize
from .concurrence import (
    concurrence_decomposition,
    multipartite_concurrence,
    pure_bipartite_concurrence,
    wootters_concurrence,
)
from .distill import build_projectors, distillability_witness, ppt_check
from .engine import entanglement_verdict, random_trials, sweep
from .generators import (
    Generator,
    MeasurementSetting,
    bell_operator,
    embed_observable,
    enumerate_generators,
    tilde_observable,
)
from .linalg import hermitian_eigen, kron, partial_trace, partial_transpose
from .projection import Bipartition, enumerate_bipartitions, project_two_qubit, split_state
from .states import (
    AcinParams,
    DensityMatrix,
    PureState,
    haar_random_pure,
    make_named_state,
    parse_state,
    serialize_state,
)
