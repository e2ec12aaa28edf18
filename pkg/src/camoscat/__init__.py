"""Scattering by an object buried beneath a rough coating over a periodic
micro-structured half-space, through homogenisation, thin-layer transmission
conditions and a boundary-integral solver, with a finite-volume reference
solver for validation."""

__version__ = "0.1.0"

from .errors import (AssemblySingular, CamoscatError, DegenerateDispersion, GeometryViolated,  # noqa: F401
                     NearBoundary, NonConvergence, NumericalError, QuadratureFailure, ResidualTooHigh,
                     ScaleSeparationViolated, SingularInterfaceSystem, TruncationTooTight,
                     ValidationError, WindowOutsideGrid)
from .model import (Ellipse, IncidentWave, LayerProfile, MaterialSet, Polygon, StarCurve,  # noqa: F401
                    Stripe, UnitCell, load_scene, scene_from_dict, validate_scene)
