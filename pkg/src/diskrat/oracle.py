"""Brute-force verification of the closed-form minima.

Three independent routes certify the exact formulas at desk scale:

* discrete least squares over the competitor class for the quadratic
  functional, solved both through the orthonormal structure (coefficients are
  discrete inner products) and through the normal equations - the agreement of
  the two routes is itself the statement that discrete orthonormality holds on
  fine grids;
* seeded random competitor scans probing the uniform infimum;
* exhaustive grid minimization of the smallest nontrivial quadratic instance.

Randomness comes exclusively from numpy's seeded PCG64 generator so every
report is reproducible byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bergman_approx import (
    build_approximant,
    competitor_function,
    nu_functional,
    nu_min_closed_form,
    random_competitor_coefficients,
)
from .circlequad import CircleGrid, circle_grid, sample_on_nodes
from .errors import IllConditioned
from .expansion import fourier_coefficient
from .kernels import KernelSpec
from .tm_basis import PoleSequence, TMBasis

__all__ = [
    "LeastSquaresProblem",
    "LsqResult",
    "lsq_minimize",
    "ScanReport",
    "uniform_competitor_scan",
    "SmallInstanceReport",
    "small_instance_exhaustive",
]

CONDITION_LIMIT = 1e8


@dataclass
class LeastSquaresProblem:
    """Discrete minimization of |K_alpha - sum c_m phi_m|^2 over the grid."""

    spec: KernelSpec
    basis: TMBasis
    grid: CircleGrid
    design: np.ndarray
    target: np.ndarray
    gram: np.ndarray
    condition: float

    @classmethod
    def build(
        cls, spec: KernelSpec, basis: TMBasis, grid: CircleGrid | None = None
    ) -> "LeastSquaresProblem":
        if grid is None:
            grid = circle_grid(4096)
        design = basis.design_matrix(grid)
        target = sample_on_nodes(spec.bergman, grid.nodes)
        gram = (np.conj(design).T @ design) * grid.weight
        condition = float(np.linalg.cond(gram))
        return cls(spec, basis, grid, design, target, gram, condition)


@dataclass
class LsqResult:
    coefficients: np.ndarray  # normal-equations route
    inner_coefficients: np.ndarray  # discrete inner-product route
    minimum: float
    route_gap: float
    condition: float
    orthogonality_residual: float

    def to_json_dict(self) -> dict:
        return {
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "minimum": self.minimum,
            "route_gap": self.route_gap,
            "condition": self.condition,
            "orthogonality_residual": self.orthogonality_residual,
        }


def lsq_minimize(problem: LeastSquaresProblem, extended: bool = False) -> LsqResult:
    """Minimize the discrete quadratic functional via both solver routes.

    Route one treats the discrete Gram as the identity and takes inner
    products; route two solves the normal equations.  The discrete minimum is
    evaluated from the normal-equations solution; with extended=True the
    residual is re-evaluated in long-double arithmetic, which keeps minima far
    below double cancellation noise meaningful (the solve stays in doubles).
    """
    if not np.isfinite(problem.condition) or problem.condition > CONDITION_LIMIT:
        raise IllConditioned(problem.condition)
    weight = problem.grid.weight
    rhs = (np.conj(problem.design).T @ problem.target) * weight
    inner = rhs.copy()
    coefficients = np.linalg.solve(problem.gram, rhs)
    residual = problem.target - problem.design @ coefficients
    if extended:
        grid_ext = circle_grid(problem.grid.node_count, extended=True)
        design_ext = problem.basis.design_matrix(grid_ext)
        target_ext = sample_on_nodes(problem.spec.bergman, grid_ext.nodes)
        residual_ext = target_ext - design_ext @ coefficients
        minimum = float(np.mean(np.abs(residual_ext) ** 2))
    else:
        minimum = float(np.mean(np.abs(residual) ** 2))
    route_gap = float(np.max(np.abs(coefficients - inner)))
    orthogonality = float(
        np.max(np.abs((np.conj(problem.design).T @ residual) * weight))
    )
    return LsqResult(
        coefficients=coefficients,
        inner_coefficients=inner,
        minimum=minimum,
        route_gap=route_gap,
        condition=problem.condition,
        orthogonality_residual=orthogonality,
    )


@dataclass
class ScanReport:
    seed: int
    trials: int
    min_nu: float
    argmin_trial: int
    argmin_coefficients: np.ndarray
    closed_form: float
    margin: float
    generator: str = "numpy PCG64"

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "min_nu": self.min_nu,
            "argmin_trial": self.argmin_trial,
            "argmin_coefficients": [
                [c.real, c.imag] for c in self.argmin_coefficients
            ],
            "closed_form": self.closed_form,
            "margin": self.margin,
            "generator": self.generator,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def uniform_competitor_scan(
    spec: KernelSpec,
    basis: TMBasis,
    trials: int,
    seed: int,
    grid: CircleGrid | None = None,
    noise_scale: float = 0.1,
) -> ScanReport:
    """Evaluate the uniform functional on random members of the competitor
    class; trial 0 is the unperturbed optimum, odd trials perturb it, even
    trials draw fully random coefficients.  The observed minimum can never
    fall below the closed-form infimum (up to evaluation noise)."""
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if grid is None:
        grid = circle_grid(4096)
    free = basis.poles.prefix(basis.max_index - spec.alpha)
    approx = build_approximant(spec, free)
    rng = np.random.default_rng(seed)
    optimum = approx.coefficients
    scale = float(np.max(np.abs(optimum)))
    best = np.inf
    best_trial = 0
    best_coeffs = optimum
    for trial in range(trials):
        if trial == 0:
            coeffs = optimum
        elif trial % 2 == 1:
            coeffs = random_competitor_coefficients(approx, rng, noise_scale)
        else:
            coeffs = scale * (
                rng.standard_normal(len(optimum))
                + 1j * rng.standard_normal(len(optimum))
            )
        value = nu_functional(spec, competitor_function(basis, spec.w, coeffs), grid)
        if value < best:
            best = value
            best_trial = trial
            best_coeffs = coeffs
    closed = nu_min_closed_form(spec, free)
    return ScanReport(
        seed=int(seed),
        trials=trials,
        min_nu=float(best),
        argmin_trial=best_trial,
        argmin_coefficients=np.asarray(best_coeffs),
        closed_form=closed,
        margin=float(best - closed),
    )


@dataclass
class SmallInstanceReport:
    w: complex
    grid_points: int
    half_width: float
    resolution: float
    center: complex
    grid_minimum: float
    argmin: complex
    closed_form: float

    def to_json_dict(self) -> dict:
        return {
            "w": [self.w.real, self.w.imag],
            "grid_points": self.grid_points,
            "half_width": self.half_width,
            "resolution": self.resolution,
            "center": [self.center.real, self.center.imag],
            "grid_minimum": self.grid_minimum,
            "argmin": [self.argmin.real, self.argmin.imag],
            "closed_form": self.closed_form,
        }


def small_instance_exhaustive(
    spec: KernelSpec,
    grid_points: int = 201,
    half_width: float = 0.5,
    quad_grid: CircleGrid | None = None,
) -> SmallInstanceReport:
    """Desk-scale sanity for the smallest nontrivial case alpha = 0, n = 0,
    single pole at w: sweep the lone complex coefficient over a square grid
    centered at its quadrature value and take the smallest quadratic error.
    The functional is exactly quadratic in the coefficient, so the grid
    minimum sits within (grid resolution)^2 of the closed form."""
    if spec.alpha != 0:
        raise ValueError("the exhaustive instance is defined for alpha = 0")
    if quad_grid is None:
        quad_grid = circle_grid(4096)
    basis = TMBasis(PoleSequence([spec.w]))
    center = fourier_coefficient(spec.bergman, basis, 0, quad_grid)
    steps = np.linspace(-half_width, half_width, int(grid_points))
    candidates = (center.real + steps)[:, None] + 1j * (center.imag + steps)[None, :]
    candidates = candidates.ravel()
    kernel = spec.bergman(quad_grid.nodes)
    phi0 = basis.eval(0, quad_grid.nodes)
    best = np.inf
    best_c = center
    chunk = 512
    for start in range(0, len(candidates), chunk):
        block = candidates[start : start + chunk]
        err = kernel[None, :] - block[:, None] * phi0[None, :]
        mu = np.mean(np.abs(err) ** 2, axis=1)
        j = int(np.argmin(mu))
        if mu[j] < best:
            best = float(mu[j])
            best_c = complex(block[j])
    resolution = 2.0 * half_width / (int(grid_points) - 1)
    closed = 0.0
    if spec.w != 0:
        ww = abs(spec.w) ** 2
        closed = float(ww / (1.0 - ww) ** 3)
    return SmallInstanceReport(
        w=spec.w,
        grid_points=int(grid_points),
        half_width=float(half_width),
        resolution=resolution,
        center=center,
        grid_minimum=best,
        argmin=best_c,
        closed_form=closed,
    )
