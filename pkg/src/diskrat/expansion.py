"""Fourier expansions of boundary functions in the orthonormal rational system.

Coefficients are plain quadratures c_m(f) = integral of f conj(phi_m) against
normalized Lebesgue measure; partial sums, the Blaschke-weighted remainder of
the Hardy-space representation

    f(z) = sum_{m<n} c_m(f) phi_m(z)
           + B_n(z) * integral conj(B_n(t)) f(t) / (1 - z conj(t)) d(sigma),

and the kernel-remainder integral used by the closed forms all live here.
Boundary functions are supplied as callables evaluated at grid nodes.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .circlequad import CircleGrid, _as_point, circle_grid, require_in_disk, sample_on_nodes
from .errors import CountOutOfRange, IndexOutOfRange, OrderTooSmall, TrailingPolesMismatch
from .kernels import KernelSpec
from .tm_basis import PoleSequence, TMBasis

__all__ = [
    "default_grid_size",
    "fourier_coefficient",
    "FourierExpansion",
    "expand_function",
    "expand_kernel",
    "cauchy_integral",
    "h2_remainder",
    "remainder_integral_J",
]


def _next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1)).bit_length()


def default_grid_size(n: int, rho: float = 0.0) -> int:
    """Grid size for expansions of order n with singularity radius rho.

    Base size max(4096, 64*(n+1)); integrand smoothness degrades as the poles
    or the kernel point approach the circle, so for rho >= 0.8 the size is
    escalated until the geometric quadrature decay rho^N is driven far below
    double precision, rounded up to a power of two.
    """
    size = max(4096, 64 * (int(n) + 1))
    rho = float(rho)
    if rho >= 0.8:
        needed = int(math.ceil(120.0 / -math.log10(rho)))
        size = max(size, _next_pow2(needed))
    return size


def fourier_coefficient(f: Callable, basis: TMBasis, m: int, grid: CircleGrid) -> complex:
    """c_m(f): quadrature of f(t) conj(phi_m(t))."""
    if not 0 <= int(m) <= basis.max_index:
        raise IndexOutOfRange(f"coefficient index {m} outside 0..{basis.max_index}")
    values = sample_on_nodes(f, grid.nodes)
    phi = basis.eval(int(m), grid.nodes)
    return complex(np.mean(values * np.conj(phi)))


class FourierExpansion:
    """Coefficients c_0..c_n of a boundary function over a TM basis."""

    def __init__(self, basis: TMBasis, coefficients, source: str, grid_size: int):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim != 1 or len(coefficients) > basis.size:
            raise ValueError("coefficient vector does not fit the basis")
        coefficients.setflags(write=False)
        self.basis = basis
        self.coefficients = coefficients
        self.source = str(source)
        self.grid_size = int(grid_size)

    def __len__(self):
        return len(self.coefficients)

    def partial_sum(self, count: int, z):
        """sum_{m<count} c_m phi_m(z); the empty sum is 0."""
        count = int(count)
        if not 0 <= count <= len(self.coefficients):
            raise CountOutOfRange(
                f"requested {count} terms, stored {len(self.coefficients)}"
            )
        z = np.asarray(z)
        if count == 0:
            zero = np.zeros(z.shape, dtype=complex)
            return complex(zero) if zero.ndim == 0 else zero
        phi = self.basis.eval_all(z, count=count)
        out = np.tensordot(self.coefficients[:count], phi, axes=1)
        return complex(out) if np.ndim(out) == 0 else out

    def squared_coefficient_sums(self) -> np.ndarray:
        """Running Bessel sums sum_{m<=k} |c_m|^2, non-decreasing in k."""
        return np.cumsum(np.abs(self.coefficients) ** 2)

    def to_json_dict(self) -> dict:
        return {
            "poles": [[p.real, p.imag] for p in self.basis.poles],
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "source": self.source,
        }

    @classmethod
    def from_json_dict(cls, data: dict, grid_size: int = 0) -> "FourierExpansion":
        basis = TMBasis(PoleSequence(complex(re, im) for re, im in data["poles"]))
        coeffs = [complex(re, im) for re, im in data["coefficients"]]
        return cls(basis, coeffs, data.get("source", ""), grid_size)


def expand_function(
    f: Callable, basis: TMBasis, grid: CircleGrid | None = None, source: str = ""
) -> FourierExpansion:
    """Expand f over the whole basis; all coefficients in one design-matrix pass."""
    if grid is None:
        grid = circle_grid(default_grid_size(basis.max_index, basis.poles.max_modulus))
    values = sample_on_nodes(f, grid.nodes)
    design = basis.design_matrix(grid)
    coefficients = (np.conj(design).T @ values) * grid.weight
    return FourierExpansion(basis, coefficients, source, grid.node_count)


def expand_kernel(
    spec: KernelSpec, basis: TMBasis, grid: CircleGrid | None = None
) -> FourierExpansion:
    if grid is None:
        rho = max(basis.poles.max_modulus, abs(spec.w))
        grid = circle_grid(default_grid_size(basis.max_index, rho))
    source = f"bergman_kernel(alpha={spec.alpha}, w={spec.w!r})"
    return expand_function(spec.bergman, basis, grid, source)


def cauchy_integral(f: Callable, z, grid: CircleGrid) -> complex:
    """f(z) for z in the disk, reconstructed from boundary values of an H2 function."""
    z = require_in_disk(_as_point(z))
    values = sample_on_nodes(f, grid.nodes)
    return complex(np.mean(values / (1.0 - z * np.conj(grid.nodes))))


def h2_remainder(f: Callable, basis: TMBasis, n: int, z, grid: CircleGrid) -> complex:
    """B_n(z) * quadrature of conj(B_n(t)) f(t) / (1 - z conj(t)).

    Together with the n-term partial sum this reconstructs f(z) exactly (up to
    quadrature accuracy) for boundary traces of H2 functions; n = 0 degenerates
    to the plain Cauchy integral.
    """
    n = int(n)
    if not 0 <= n <= basis.size:
        raise CountOutOfRange(f"remainder order {n} outside 0..{basis.size}")
    z = require_in_disk(_as_point(z))
    values = sample_on_nodes(f, grid.nodes)
    b = basis.blaschke(n)
    integrand = np.conj(b(grid.nodes)) * values / (1.0 - z * np.conj(grid.nodes))
    return complex(b(z) * np.mean(integrand))


def validate_trailing_poles(spec: KernelSpec, poles: PoleSequence, n: int) -> None:
    """Require a_{n-alpha} .. a_n all equal to w (exact complex equality)."""
    n = int(n)
    if n < spec.alpha:
        raise OrderTooSmall(f"n = {n} is smaller than alpha = {spec.alpha}")
    if n >= len(poles):
        raise IndexOutOfRange(f"pole sequence of length {len(poles)} has no index {n}")
    block = poles[n - spec.alpha : n + 1]
    if any(p != spec.w for p in block):
        raise TrailingPolesMismatch(
            f"poles a_{n - spec.alpha}..a_{n} = {list(block)} != w = {spec.w}"
        )


def remainder_integral_J(
    spec: KernelSpec, basis: TMBasis, n: int, z, grid: CircleGrid
) -> complex:
    """Quadrature of conj(B_{n+1}(t)) K_alpha(t; w) / (1 - z conj(t)).

    Requires the trailing alpha+1 poles of the sequence to equal w and
    n >= alpha.  Computed in the tau = 1 Blaschke convention.
    """
    validate_trailing_poles(spec, basis.poles, n)
    z = require_in_disk(_as_point(z))
    b = basis.blaschke(int(n) + 1)
    values = spec.bergman(grid.nodes)
    integrand = np.conj(b(grid.nodes)) * values / (1.0 - z * np.conj(grid.nodes))
    return complex(np.mean(integrand))
