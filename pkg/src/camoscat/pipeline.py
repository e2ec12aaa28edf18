"""End-to-end effective-model pipeline for a validated scene.

homogenize the cell -> solve the strip problem -> transmission
coefficients -> plane-wave background -> boundary-integral solve for the
buried object -> field on an observation grid.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bem import BoundaryMesh, FieldGrid, LayerDensities, assemble_system, solve_densities, total_field
from .homogenization import EffectiveMedium, homogenize
from .layered import BackgroundField, LayeredMedium, background_field
from .model import ValidatedScene
from .strip import StripSolution, TransmissionCoefficients, layer_coefficients, solve_strip

DEFAULT_CELL_GRID = (256, 256)
DEFAULT_STRIP_GRID = (64, 16)
DEFAULT_NODES = 128
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ObservationWindow:
    """Tensor grid of observation points ``x1 x x2``."""

    x1: np.ndarray
    x2: np.ndarray

    @classmethod
    def above_layer(cls, scene: ValidatedScene, width=2.0, n1=41, n2=11):
        """A window one upper-medium wavelength above the layer, ``width`` wavelengths wide."""
        lam = scene.lambda_plus
        half = 0.5 * width * lam
        return cls(np.linspace(-half, half, n1), np.linspace(lam, 1.5 * lam, n2))

    def to_dict(self):
        return {"x1": [float(self.x1[0]), float(self.x1[-1]), int(self.x1.size)],
                "x2": [float(self.x2[0]), float(self.x2[-1]), int(self.x2.size)]}


@dataclass
class PipelineResult:
    scene: ValidatedScene
    effective: EffectiveMedium
    strip: StripSolution
    coeffs: TransmissionCoefficients
    medium: LayeredMedium
    background: BackgroundField
    densities: LayerDensities
    field: FieldGrid
    timings: dict = field(default_factory=dict)

    def report(self):
        d = self.densities
        return {
            "effective": self.effective.to_dict(),
            "coefficients": self.coeffs.to_dict(),
            "background": self.background.to_dict(),
            "bem": {"nodes": int(d.system.mesh.n), "residual": d.residual, "condition": d.condition},
            "near_boundary_points": int(self.field.meta.get("near_boundary", 0)),
        }


def effective_stage(scene: ValidatedScene, n_grid=DEFAULT_CELL_GRID) -> EffectiveMedium:
    return homogenize(scene.cell, scene.materials, n_grid)


def layer_stage(scene: ValidatedScene, effective: EffectiveMedium, strip_L=None,
                n_grid=DEFAULT_STRIP_GRID):
    strip = solve_strip(scene.profile, scene.materials, effective.A, L=strip_L, n_grid=n_grid)
    coeffs = layer_coefficients(strip, scene.profile, scene.materials, effective.A,
                                omega=scene.wave.omega)
    return strip, coeffs


def run_pipeline(scene: ValidatedScene, window: ObservationWindow | None = None,
                 n_grid=DEFAULT_CELL_GRID, n_nodes=DEFAULT_NODES, tol=DEFAULT_TOL,
                 strip_L=None, strip_grid=DEFAULT_STRIP_GRID) -> PipelineResult:
    """Effective-model total field of ``scene`` on ``window``."""
    window = window or ObservationWindow.above_layer(scene)
    times = {}
    t = time.perf_counter()
    eff = effective_stage(scene, n_grid)
    times["homogenize_s"] = time.perf_counter() - t
    t = time.perf_counter()
    strip, coeffs = layer_stage(scene, eff, strip_L, strip_grid)
    times["strip_s"] = time.perf_counter() - t
    t = time.perf_counter()
    medium = LayeredMedium.build(scene.materials, eff, coeffs, scene.wave.omega)
    bg = background_field(scene.wave, medium)
    mesh = BoundaryMesh.from_shape(scene.inclusion, n_nodes)
    system = assemble_system(mesh, bg, scene.materials, tol=tol)
    dens = solve_densities(system)
    times["bem_s"] = time.perf_counter() - t
    t = time.perf_counter()
    grid = total_field(dens, window.x1, window.x2)
    times["field_s"] = time.perf_counter() - t
    return PipelineResult(scene, eff, strip, coeffs, medium, bg, dens, grid, times)
