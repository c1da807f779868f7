"""Minimum-energy joint-space motion generation for serial-chain robots.

The configuration space of a rigid serial chain, equipped with the
mass-inertia matrix as a Riemannian metric, turns zero-effort motion into
geometry: minimum-energy joint trajectories are geodesics, fully determined
by an initial configuration and velocity (a geodesic synergy), and synergies
combine by weighted velocity sums after parallel transport to a common base
point.
"""

from .analytic import PlanarChainForm, has_analytic_form, planar_form
from .bundled import BUNDLED_MODELS, bundled_model_text, load_bundled
from .errors import (
    BaseMismatchError,
    ConvergenceError,
    DivergenceError,
    GeomotionError,
    InputError,
    ModelError,
    NumericalError,
    SingularMetricError,
)
from .geodesic import (
    GeodesicTrajectory,
    check_trajectory,
    connect,
    geodesic_acceleration,
    passive_dynamics_oracle,
    read_trajectory_csv,
    riemannian_length,
    shoot,
    straight_line_path,
    trajectory_diagnostics,
    trajectory_to_csv,
    write_trajectory_csv,
)
from .metric import (
    ChristoffelFirst,
    MetricDerivatives,
    MetricTensor,
    christoffel_first,
    coriolis_vector,
    inner_product,
    kinetic_energy,
    metric_at,
    metric_derivatives,
)
from .model import (
    Configuration,
    Joint,
    Link,
    RobotModel,
    TangentVector,
    attach_payload,
    forward_kinematics,
    limit_violations,
    load_model,
    load_model_file,
    load_urdf,
    mass_matrix,
)
from .synergy import (
    GeodesicSynergy,
    SynergyBasis,
    combine_at,
    combine_same_base,
    decompose,
    execute,
    orthonormal_basis,
    read_synergies,
    write_synergies,
)
from .transport import TransportResult, transport_along, transport_many, transport_to
from .validate import CheckResult, render_report, run_validation

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
