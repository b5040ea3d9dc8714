"""Series solutions of a cubic Schrodinger-type equation near a movable
singularity: jet arithmetic, coefficient recursion, verification, batch CLI."""

from .jets import BaseMismatchError, InsufficientOrderError, Jet
from .potential import (
    PotentialExpansion,
    PotentialSpec,
    expand_potential,
    identity_defect,
)
from .recursion import (
    FreeData,
    InternalInconsistencyError,
    ResonanceDiagnostics,
    WTCSeries,
    cubic_convolution,
    generate,
    plan_order_budget,
)
from .verify import (
    GridError,
    GridSpec,
    GrowthEstimate,
    VerificationReport,
    build_report,
    coefficient_residual,
    conjugacy_defect,
    estimate_growth,
    pointwise_residual,
)

__version__ = "0.1.0"
