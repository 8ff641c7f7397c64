"""Closed-form best rational approximants of weighted Bergman kernels.

With the trailing alpha+1 poles of the sequence pinned to the kernel point w,
the function

    r(x; w) = (1 - x conj(w)) * S_{n+1}(K_alpha)(x; w)

is simultaneously the minimizer of the quadratic functional

    mu(R) = integral |K_alpha(x; w) - R(x) / (1 - x conj(w))|^2 d(sigma)

and of the uniform functional

    nu(R) = sup_{|x|=1} |(1 - x conj(w))^-(1+alpha) - R(x)|

over the fixed-pole competitor class, with exact minima

    mu_min = |w|^(2a+2) (1-|w|^2)^-(2a+3) |B(w)|^2,
    nu_min = (|w| / (1-|w|^2))^(1+a) |B(w)|,

where B is the Blaschke product over the free poles.  This module holds the
closed-form evaluator of r, its interpolation conditions, the two functionals,
the exact minima, and the closed form of the kernel-remainder integral.

The uniform error at the optimum has constant modulus on the circle (the error
is a constant times a Blaschke product); that equimodularity is checked here
as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .circlequad import (
    CircleGrid,
    _as_point,
    circle_grid,
    derivative_at,
    require_in_disk,
    sample_on_nodes,
)
from .errors import OrderTooSmall
from .expansion import (
    FourierExpansion,
    default_grid_size,
    expand_function,
    expand_kernel,
    validate_trailing_poles,
)
from .kernels import KernelSpec
from .tm_basis import BlaschkeProduct, PoleSequence, TMBasis

__all__ = [
    "Approximant",
    "build_approximant",
    "mu_functional",
    "mu_min_closed_form",
    "nu_functional",
    "nu_min_closed_form",
    "closed_form_J",
    "closed_form_J_tm_phase",
    "competitor_function",
    "random_competitor_coefficients",
    "ratio_coefficients",
    "equimodularity_variation",
    "interpolation_target",
    "ErrorReport",
    "build_error_report",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _rising_factorial(alpha: int, count: int) -> float:
    """(alpha+1)(alpha+2)...(alpha+count); empty product for count = 0.

    This is (alpha+count)!/alpha!, the coefficient produced by differentiating
    (1 - z c)^-(1+alpha) count times.
    """
    out = 1.0
    for i in range(1, count + 1):
        out *= alpha + i
    return out


def interpolation_target(spec: KernelSpec, point: complex, multiplicity: int) -> complex:
    """Right-hand side of the interpolation condition of order multiplicity-1
    at the given pole: the (multiplicity-1)-st derivative of the Cauchy-power
    kernel (1 - z conj(w))^-(1+alpha) there."""
    s = int(multiplicity)
    cw = np.conj(spec.w)
    return complex(
        _rising_factorial(spec.alpha, s - 1)
        * cw ** (s - 1)
        / (1.0 - cw * point) ** (spec.alpha + s)
    )


@dataclass
class Approximant:
    """r(x; w) = (1 - x conj(w)) S_{n+1}(K_alpha)(x; w) over a trailing-w basis."""

    spec: KernelSpec
    free_poles: PoleSequence
    basis: TMBasis
    expansion: FourierExpansion
    free_blaschke: BlaschkeProduct

    @property
    def n(self) -> int:
        return self.basis.max_index

    @property
    def coefficients(self) -> np.ndarray:
        return self.expansion.coefficients

    def eval(self, z):
        """Constructive route: multiplier times the full partial sum."""
        z = np.asarray(z)
        out = (1.0 - z * np.conj(self.spec.w)) * self.expansion.partial_sum(
            self.n + 1, z
        )
        return complex(out) if np.ndim(out) == 0 else out

    def eval_closed_form(self, z):
        """Closed form

            [(1-|w|^2)^(a+1) + (-1)^a (conj(w)(w - z))^(a+1) B(z) conj(B(w))]
            / [(1-|w|^2)^(a+1) (1 - conj(w) z)^(a+1)]

        with B the Blaschke product over the free poles.  Only the
        phase-invariant combination B(z) conj(B(w)) enters, so the stored
        product's unimodular constant is immaterial.
        """
        spec = self.spec
        z = np.asarray(z)
        a1 = spec.alpha + 1
        cw = np.conj(spec.w)
        disc = (1.0 - abs(spec.w) ** 2) ** a1
        pair = self.free_blaschke(z) * np.conj(self.free_blaschke(spec.w))
        numerator = disc + (-1.0) ** spec.alpha * (cw * (spec.w - z)) ** a1 * pair
        denominator = disc * (1.0 - cw * z) ** a1
        out = numerator / denominator
        return complex(out) if np.ndim(out) == 0 else out

    def uniform_error(self, z):
        """(1 - z conj(w))^-(1+alpha) - r(z), via the constructive route."""
        return self.spec.cauchy_power(z) - self.eval(z)

    def interpolation_residuals(self) -> list[float]:
        """|r^(s_m - 1)(a_m) - target| for every pole of the full sequence.

        Derivatives are extracted by contour quadrature from the closed-form
        evaluator; s_m is the running multiplicity within the prefix.
        """
        residuals = []
        for m, a in enumerate(self.basis.poles):
            s = self.basis.poles.multiplicity_in_prefix(m)
            value = derivative_at(self.eval_closed_form, a, order=s - 1)
            residuals.append(abs(value - interpolation_target(self.spec, a, s)))
        return residuals

    def membership_residual(self, sample_count: int | None = None) -> float:
        """Relative fit residual of r against the partial-fraction competitor
        basis {1} + {(1 - conj(a_j) x)^-s_j}  (monomials x^s_j at zero poles),
        j over the first n poles; small iff r lies in the competitor class."""
        n = self.n
        if sample_count is None:
            sample_count = 4 * (n + 1) + 9
        # offset keeps samples away from grid symmetries
        x = np.exp(2j * np.pi * (np.arange(sample_count) + 0.37) / sample_count)
        columns = [np.ones_like(x)]
        for j in range(n):
            a = self.basis.poles[j]
            s = self.basis.poles.multiplicity_in_prefix(j)
            if a == 0:
                columns.append(x**s)
            else:
                columns.append((1.0 - np.conj(a) * x) ** (-float(s)))
        design = np.stack(columns, axis=1)
        target = self.eval(x)
        solution, *_ = np.linalg.lstsq(design, target, rcond=None)
        scale = max(float(np.linalg.norm(target)), 1e-300)
        return float(np.linalg.norm(target - design @ solution)) / scale

    def with_blaschke_tau(self, tau: complex) -> "Approximant":
        """Copy with a phase-injected free Blaschke product (convention probe)."""
        return replace(self, free_blaschke=self.free_blaschke.with_tau(tau))

    def to_json_dict(self) -> dict:
        data = self.expansion.to_json_dict()
        data["alpha"] = self.spec.alpha
        data["w"] = [self.spec.w.real, self.spec.w.imag]
        data["free_poles"] = [[p.real, p.imag] for p in self.free_poles]
        return data


def build_approximant(
    spec: KernelSpec,
    free_poles: PoleSequence | list[complex],
    grid: CircleGrid | None = None,
) -> Approximant:
    """Assemble the full pole sequence (free poles then alpha+1 copies of w),
    the basis, the kernel expansion, and the approximant of order
    n = len(free_poles) + alpha."""
    if not isinstance(free_poles, PoleSequence):
        free_poles = PoleSequence(free_poles)
    full = free_poles.with_trailing(spec.w, spec.alpha + 1)
    basis = TMBasis(full)
    expansion = expand_kernel(spec, basis, grid)
    return Approximant(
        spec=spec,
        free_poles=free_poles,
        basis=basis,
        expansion=expansion,
        free_blaschke=BlaschkeProduct(free_poles),
    )


def mu_functional(
    spec: KernelSpec, rational: Callable, grid: CircleGrid, extended: bool = False
) -> float:
    """Quadrature of |K_alpha(x; w) - R(x) / (1 - x conj(w))|^2 over the circle.

    With extended=True the integrand is evaluated in long-double arithmetic;
    near-optimal R makes the integrand a difference of O(1) quantities, and the
    extra mantissa keeps tiny minima meaningful.
    """
    nodes = circle_grid(grid.node_count, extended=True).nodes if extended else grid.nodes
    values = sample_on_nodes(rational, nodes)
    kernel = spec.bergman(nodes)
    error = kernel - values / (1.0 - nodes * np.conj(spec.w))
    return float(np.mean(np.abs(error) ** 2))


def mu_min_closed_form(spec: KernelSpec, free_poles: PoleSequence | list[complex]) -> float:
    """Exact quadratic minimum |w|^(2a+2) (1-|w|^2)^-(2a+3) |B(w)|^2."""
    if spec.w == 0:
        return 0.0
    if not isinstance(free_poles, PoleSequence):
        free_poles = PoleSequence(free_poles)
    b = abs(BlaschkeProduct(free_poles)(spec.w))
    ww = abs(spec.w) ** 2
    return float(ww ** (spec.alpha + 1) / (1.0 - ww) ** (2 * spec.alpha + 3) * b * b)


def _golden_max(f: Callable[[float], float], lo: float, hi: float, iters: int) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
    return max(fc, fd)


def nu_functional(
    spec: KernelSpec,
    rational: Callable,
    grid: CircleGrid,
    refine: bool = True,
    refine_iters: int = 60,
) -> float:
    """Grid maximum of |(1 - x conj(w))^-(1+alpha) - R(x)| on the circle,
    refined by golden-section maximization over the two arcs adjacent to the
    best node.  The error modulus is smooth on the circle and near-constant at
    the optimum, so grid resolution dominates and the refinement is local."""
    values = sample_on_nodes(rational, grid.nodes)
    error = np.abs(spec.cauchy_power(grid.nodes) - values)
    j = int(np.argmax(error))
    best = float(error[j])
    if not refine:
        return best
    step = 2.0 * np.pi / grid.node_count
    theta = step * j

    def modulus(t: float) -> float:
        x = complex(np.cos(t), np.sin(t))
        return abs(spec.cauchy_power(x) - rational(x))

    left = _golden_max(modulus, theta - step, theta, refine_iters)
    right = _golden_max(modulus, theta, theta + step, refine_iters)
    return max(best, left, right)


def nu_min_closed_form(spec: KernelSpec, free_poles: PoleSequence | list[complex]) -> float:
    """Exact uniform minimum (|w| / (1-|w|^2))^(1+alpha) |B(w)|."""
    if spec.w == 0:
        return 0.0
    if not isinstance(free_poles, PoleSequence):
        free_poles = PoleSequence(free_poles)
    b = abs(BlaschkeProduct(free_poles)(spec.w))
    return float((abs(spec.w) / (1.0 - abs(spec.w) ** 2)) ** (spec.alpha + 1) * b)


def closed_form_J(spec: KernelSpec, basis: TMBasis, n: int, z) -> complex:
    """Closed form of the kernel-remainder integral, phase-aligned to the
    tau = 1 Blaschke convention used by the quadrature route:

        J(z; w) = (conj(w) / (1-|w|^2))^(alpha+1) conj(B(w)) / (1 - conj(w) z)

    with B over the free poles.  Extends continuously to 0 at w = 0."""
    validate_trailing_poles(spec, basis.poles, n)
    z = require_in_disk(_as_point(z))
    if spec.w == 0:
        return 0.0j
    a1 = spec.alpha + 1
    cw = np.conj(spec.w)
    b_free = basis.blaschke(int(n) - spec.alpha)
    return complex(
        (cw / (1.0 - abs(spec.w) ** 2)) ** a1
        * np.conj(b_free(spec.w))
        / (1.0 - cw * z)
    )


def closed_form_J_tm_phase(
    spec: KernelSpec, basis: TMBasis, n: int, z
) -> tuple[complex, complex]:
    """Diagnostic companion of closed_form_J: the same value expressed in the
    phase convention the orthonormal system inherits, together with the
    unimodular constant that maps it back to the tau = 1 value

        J_tau1 = constant * J_tm,   constant = prod(-|a_m|/a_m) * (-|w|/w)^(a+1)

    over the free poles.  Undefined factors at w = 0 never form: the w = 0
    case short-circuits to (0, 1)."""
    validate_trailing_poles(spec, basis.poles, n)
    z = require_in_disk(_as_point(z))
    if spec.w == 0:
        return 0.0j, 1.0 + 0.0j
    degree = int(n) - spec.alpha
    b_free = basis.blaschke(degree)
    constant = b_free.tm_phase() * (-abs(spec.w) / spec.w) ** (spec.alpha + 1)
    magnitude = (abs(spec.w) / (1.0 - abs(spec.w) ** 2)) ** (spec.alpha + 1)
    b_tm = np.conj(b_free.tm_phase() * b_free(spec.w))
    value = (
        (-1.0) ** spec.alpha * magnitude * b_tm / (np.conj(spec.w) * z - 1.0)
    )
    return complex(value), complex(constant)


def competitor_function(basis: TMBasis, w: complex, coefficients) -> Callable:
    """Member of the competitor class: R(x) = (1 - x conj(w)) sum c_m phi_m(x)."""
    coefficients = np.asarray(coefficients, dtype=complex)
    count = len(coefficients)

    def rational(x):
        x = np.asarray(x)
        phi = basis.eval_all(x, count=count)
        out = (1.0 - x * np.conj(w)) * np.tensordot(coefficients, phi, axes=1)
        return complex(out) if np.ndim(out) == 0 else out

    return rational


def random_competitor_coefficients(
    approx: Approximant, rng: np.random.Generator, noise_scale: float = 0.1
) -> np.ndarray:
    """Optimal coefficients plus complex Gaussian noise of scale
    noise_scale * max|c|: probes the neighborhood of the optimum where
    minimality violations would be most visible."""
    c = approx.coefficients
    scale = noise_scale * float(np.max(np.abs(c)))
    noise = rng.standard_normal(len(c)) + 1j * rng.standard_normal(len(c))
    return c + scale * noise


def ratio_coefficients(
    rational: Callable, w: complex, basis: TMBasis, grid: CircleGrid
) -> np.ndarray:
    """Basis coefficients of R(x) / (1 - x conj(w)) by quadrature."""
    expansion = expand_function(
        lambda x: rational(x) / (1.0 - x * np.conj(w)), basis, grid,
        source="competitor_ratio",
    )
    return expansion.coefficients


def equimodularity_variation(
    spec: KernelSpec, rational: Callable, grid: CircleGrid
) -> float:
    """Relative variation (max - min)/max of the uniform-error modulus on the
    grid; vanishes exactly at the optimum where the error is a constant times
    a Blaschke product."""
    values = sample_on_nodes(rational, grid.nodes)
    error = np.abs(spec.cauchy_power(grid.nodes) - values)
    top = float(np.max(error))
    if top == 0.0:
        return 0.0
    return float((top - float(np.min(error))) / top)


@dataclass
class ErrorReport:
    """Side-by-side quadrature and closed-form error values for one configuration."""

    alpha: int
    n: int
    w: complex
    free_poles: PoleSequence
    mu_quadrature: float
    mu_closed_form: float
    nu_grid: float
    nu_closed_form: float
    max_interp_residual: float
    free_pole_matches_w: bool = False
    degenerate_w_zero: bool = False

    CSV_HEADER = (
        "n,alpha,w_re,w_im,mu_quad,mu_closed,nu_grid,nu_closed,max_interp_residual"
    )

    def validate(self):
        values = (
            self.mu_quadrature,
            self.mu_closed_form,
            self.nu_grid,
            self.nu_closed_form,
            self.max_interp_residual,
        )
        if not all(math.isfinite(v) and v >= 0.0 for v in values):
            raise ValueError(f"non-finite or negative error values: {values}")

    def csv_row(self) -> str:
        cells = [str(self.n), str(self.alpha)]
        cells += [
            f"{v:.17g}"
            for v in (
                self.w.real,
                self.w.imag,
                self.mu_quadrature,
                self.mu_closed_form,
                self.nu_grid,
                self.nu_closed_form,
                self.max_interp_residual,
            )
        ]
        return ",".join(cells)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "w": [self.w.real, self.w.imag],
            "free_poles": [[p.real, p.imag] for p in self.free_poles],
            "mu_quad": self.mu_quadrature,
            "mu_closed": self.mu_closed_form,
            "nu_grid": self.nu_grid,
            "nu_closed": self.nu_closed_form,
            "max_interp_residual": self.max_interp_residual,
            "free_pole_matches_w": self.free_pole_matches_w,
            "degenerate_w_zero": self.degenerate_w_zero,
        }


def build_error_report(
    spec: KernelSpec,
    free_poles: PoleSequence | list[complex],
    mu_grid: CircleGrid | None = None,
    nu_grid_size: int = 2**16,
    include_interpolation: bool = True,
) -> ErrorReport:
    """Build the approximant and evaluate both error functionals against their
    closed forms.  w = 0 short-circuits to exact zeros: the kernel degenerates
    to the constant 1 and the approximant is identically 1."""
    if not isinstance(free_poles, PoleSequence):
        free_poles = PoleSequence(free_poles)
    n = len(free_poles) + spec.alpha
    matches = any(p == spec.w for p in free_poles)
    if spec.w == 0:
        return ErrorReport(
            alpha=spec.alpha,
            n=n,
            w=spec.w,
            free_poles=free_poles,
            mu_quadrature=0.0,
            mu_closed_form=0.0,
            nu_grid=0.0,
            nu_closed_form=0.0,
            max_interp_residual=0.0,
            free_pole_matches_w=matches,
            degenerate_w_zero=True,
        )
    approx = build_approximant(spec, free_poles, mu_grid)
    if mu_grid is None:
        mu_grid = circle_grid(approx.expansion.grid_size)
    mu_closed = mu_min_closed_form(spec, free_poles)
    # tiny minima sit below double-precision cancellation noise; evaluate the
    # integrand in long double there
    mu_quad = mu_functional(
        spec, approx.eval, mu_grid, extended=mu_closed < 1e-9
    )
    nu_grid = nu_functional(spec, approx.eval, circle_grid(int(nu_grid_size)))
    nu_closed = nu_min_closed_form(spec, free_poles)
    interp = max(approx.interpolation_residuals()) if include_interpolation else 0.0
    report = ErrorReport(
        alpha=spec.alpha,
        n=n,
        w=spec.w,
        free_poles=free_poles,
        mu_quadrature=mu_quad,
        mu_closed_form=mu_closed,
        nu_grid=nu_grid,
        nu_closed_form=nu_closed,
        max_interp_residual=interp,
        free_pole_matches_w=matches,
    )
    report.validate()
    return report
