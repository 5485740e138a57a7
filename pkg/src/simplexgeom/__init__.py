"""Information geometry of the finite probability simplex.

Strictly positive probability functions on a finite sample space form the
open simplex; attaching to each point the space of random variables with
zero mean under it yields the statistical bundle.  This package implements
the calculus that lives there: fiber inner products and scores, exponential,
mixture and Hilbert parallel transports, natural-gradient flows with
closed-form oracles, accelerations and affine atlases, Fisher information in
solid coordinates, and deformed (Tsallis-style) logarithms with their
q-scores and entropies.

Everything is an immutable value and every operation is pure.
"""

from .errors import (
    BaseMismatch,
    DomainError,
    DomainEscape,
    GeometryError,
    NormError,
    NumericalBlowup,
    OutOfInterval,
    RangeError,
    SpaceMismatch,
    TangencyError,
)
from .simplex import (
    FiberVector,
    ProbabilityVector,
    RandomVariable,
    SampleSpace,
    center,
    entropy,
    inner_product,
    kl,
    probability_from_json,
    probability_to_json,
    score_of_curve,
)
from .transports import e_transport, h_transport, m_transport
from .flows import (
    CumulantRecord,
    FlowReport,
    FlowSpec,
    Section,
    Trajectory,
    e_transport_section,
    entropy_flow_curve,
    entropy_section,
    exp_family_curve,
    expected_value_section,
    flow_from_config,
    grad_entropy,
    grad_kl_first,
    grad_kl_second,
    h_flow_curve,
    h_transport_section,
    integrate_flow,
    kl_forward_section,
    kl_relaxation_curve,
    kl_reverse_section,
    m_transport_section,
    mixture_flow_curve,
    mixture_interval,
    monitor_gradient_flow,
    natural_gradient,
)
from .second_order import (
    ChartImage,
    curve_zoo,
    e_acceleration,
    e_chart,
    e_patch,
    e_transition,
    m_acceleration,
    m_chart,
    m_hessian_quadratic_form,
    m_patch,
    m_transition,
    taylor_remainder,
    zoo_curve_weights,
    zoo_ex4_score,
    zoo_report,
)
from .parametric import (
    FisherMatrix,
    SolidCoordinates,
    amari_natural_gradient,
    exponential_parametrization,
    fisher_inverse,
    fisher_inverse_det,
    fisher_matrix,
    fisher_rao_metric,
    simplex_to_solid,
    solid_to_simplex,
)
from .deformed import (
    DeformedLog,
    QFiberVector,
    exp_A,
    log_A,
    q_score,
    tsallis_entropy,
)

__version__ = "0.1.0"
