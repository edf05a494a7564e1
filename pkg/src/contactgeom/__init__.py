"""Contact-angle and moving-frame numerics for surfaces in the unit 3-sphere.

The package computes adapted frames and the signed contact angle of
parametric surfaces immersed in S^3, verifies the curvature, Laplacian and
connection identities those frames satisfy on minimal surfaces by grid
refinement, and probes the rigidity of the flat minimal torus with a
squared-mean-curvature descent.
"""

from .ambient import (AmbientFrame, AmbientVector, UnitSpherePoint,
                      canonical_frame, contact_project, frame_derivative_check,
                      hermitian, inner, perp, reeb)
from .calculus import (IdentityReport, MetricField, ShapeOperatorField,
                       build_analysis, first_fundamental_form, frame_gradient,
                       gaussian_curvature_extrinsic, gaussian_curvature_intrinsic,
                       laplace_beltrami, refinement_study, shape_operator,
                       verify_connection_identity, verify_curvature_identity,
                       verify_gauss_agreement, verify_laplacian_identity,
                       verify_minimality)
from .catalog import (CatalogEntry, clifford, geodesic_sphere, load_samples,
                      perturb, r_torus)
from .errors import (AmplitudeTooLarge, ContactGeomError, DegenerateContact,
                     DegenerateMetric, DegenerateParametrization, NotConverged,
                     NotTangent, OffSphere, ParseError, RangeError, StepTooLarge)
from .flow import (FlowConfig, FlowReport, area, descend, descend_r_family,
                   flow_step, theorem_probe, willmore_energy)
from .surface import (AdaptedFramePoint, FrameField, GridSpec, SurfaceGrid,
                      adapted_frame, contact_angle_field, sample, tangent_fields,
                      tangent_pair)

__version__ = "0.1.0"
