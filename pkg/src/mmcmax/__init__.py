"""Maximum M/M/c queue length: clumping approximations, simulation, Erlang formulas."""

__version__ = "0.1.0"

from .clumping import (  # noqa: E402
    EULER_GAMMA,
    GumbelMoments,
    MaxCdfApprox,
    Order,
    cdf_high_order,
    cdf_low_order,
    clump_rate_constant,
    gumbel_moments,
    mean_estimate,
    pmf,
)
from .errors import (  # noqa: E402
    NumericLimitError,
    OracleScaleError,
    UnstableQueueError,
    ValidationError,
)
from .queue_model import (  # noqa: E402
    QueueParams,
    erlang_a_all_busy,
    erlang_b_blocking,
    erlang_c_all_busy,
    incomplete_gamma_A,
    pi0_inverse_closed,
    pi0_inverse_series,
)
from .simulator import (  # noqa: E402
    BACKEND,
    CountConvention,
    SimConfig,
    SimResult,
    exact_max_cdf,
    simulate_once,
)
from .harness import (  # noqa: E402
    ComparisonReport,
    EmpiricalMaxDistribution,
    ExperimentSpec,
    compare,
    emit_report,
    run_experiment,
)
