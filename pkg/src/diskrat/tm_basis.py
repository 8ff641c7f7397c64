"""Pole sequences, Blaschke products, and the orthonormal rational system.

For a sequence a_0, a_1, ... of points in the open unit disk the system is

    phi_0(z) = sqrt(1 - |a_0|^2) / (1 - conj(a_0) z),
    phi_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z)
               * prod_{j<k} (-|a_j|/a_j) (z - a_j) / (1 - conj(a_j) z),

with the convention that the factor (-|a_j|/a_j) is +1 when a_j = 0, so the
all-zero sequence reproduces the monomials z^k.  The system is orthonormal on
the unit circle against normalized Lebesgue measure.

Blaschke products here carry a free unimodular constant tau, fixed to 1 by
default; every downstream identity consumes only phase-cancelling combinations
such as conj(B(z)) B(zeta), so the choice is immaterial and is probed by the
phase-freedom tests.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .circlequad import CircleGrid, _as_point, require_in_disk
from .errors import IndexOutOfRange

__all__ = [
    "PoleSequence",
    "BlaschkeProduct",
    "TMBasis",
    "christoffel_darboux_residual",
]


class PoleSequence:
    """Ordered points of the open unit disk with multiplicity bookkeeping.

    Repetitions are allowed (including zeros).  Multiplicities are counted by
    exact complex equality of the stored values on purpose: tolerance-based
    clustering would silently change interpolation multiplicities, so callers
    who mean "equal poles" must pass bitwise-equal values.
    """

    def __init__(self, points: Iterable[complex]):
        self._points = tuple(require_in_disk(p) for p in points)

    @property
    def points(self) -> tuple[complex, ...]:
        return self._points

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    def __getitem__(self, index):
        return self._points[index]

    def __eq__(self, other):
        return isinstance(other, PoleSequence) and self._points == other._points

    def __hash__(self):
        return hash(self._points)

    def __repr__(self):
        return f"PoleSequence({list(self._points)!r})"

    def multiplicity_in_prefix(self, m: int) -> int:
        """s_m: occurrences of a_m among a_0..a_m."""
        a = self._points[m]
        return sum(1 for p in self._points[: m + 1] if p == a)

    def multiplicity_through(self, m: int, n: int) -> int:
        """p_m(n): occurrences of a_m among a_0..a_n."""
        a = self._points[m]
        return sum(1 for p in self._points[: n + 1] if p == a)

    def s_values(self) -> list[int]:
        return [self.multiplicity_in_prefix(m) for m in range(len(self))]

    @property
    def max_modulus(self) -> float:
        return max((abs(p) for p in self._points), default=0.0)

    def prefix(self, count: int) -> "PoleSequence":
        return PoleSequence(self._points[:count])

    def with_trailing(self, w: complex, count: int) -> "PoleSequence":
        return PoleSequence(self._points + (complex(w),) * count)

    def to_json(self) -> str:
        """JSON array of [re, im] pairs; ordering is significant."""
        return json.dumps([[p.real, p.imag] for p in self._points])

    @classmethod
    def from_json(cls, text: str) -> "PoleSequence":
        return cls(complex(re, im) for re, im in json.loads(text))

    @classmethod
    def random(
        cls,
        count: int,
        seed: int | None = None,
        max_modulus: float = 0.9,
        min_modulus: float = 0.0,
        rng: np.random.Generator | None = None,
    ) -> "PoleSequence":
        """Area-uniform draw from the annulus min_modulus <= |a| <= max_modulus."""
        if rng is None:
            rng = np.random.default_rng(seed)
        radii = np.sqrt(rng.uniform(min_modulus**2, max_modulus**2, size=count))
        angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
        return cls(complex(r * np.cos(t), r * np.sin(t)) for r, t in zip(radii, angles))


def _tm_factor(a: complex, z):
    """One product factor of phi_k, equal to z when the pole sits at 0."""
    if a == 0:
        return z
    return (-abs(a) / a) * (z - a) / (1.0 - np.conj(a) * z)


class BlaschkeProduct:
    """Finite Blaschke product tau * prod (z - a_j) / (1 - conj(a_j) z).

    Unimodular on the circle, of modulus < 1 inside the disk, with zeros at
    the poles of the generating sequence.  The degree-0 product is identically
    tau (= 1 by default).
    """

    def __init__(self, poles: PoleSequence | Sequence[complex], tau: complex = 1.0):
        if not isinstance(poles, PoleSequence):
            poles = PoleSequence(poles)
        tau = complex(tau)
        if abs(abs(tau) - 1.0) > 1e-12:
            raise ValueError("tau must be unimodular")
        self.poles = poles
        self.tau = tau

    @property
    def degree(self) -> int:
        return len(self.poles)

    def with_tau(self, tau: complex) -> "BlaschkeProduct":
        return BlaschkeProduct(self.poles, tau)

    def __call__(self, z):
        z = np.asarray(z)
        out = np.full(z.shape, self.tau, dtype=np.result_type(z, np.complex128))
        for a in self.poles:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return complex(out) if out.ndim == 0 else out

    def numerator_poly(self, z):
        """pi(z) = prod (a_j - z)."""
        z = np.asarray(z)
        out = np.ones(z.shape, dtype=complex)
        for a in self.poles:
            out = out * (a - z)
        return complex(out) if out.ndim == 0 else out

    def denominator_poly(self, z):
        """tau(z) = prod (1 - conj(a_j) z)."""
        z = np.asarray(z)
        out = np.ones(z.shape, dtype=complex)
        for a in self.poles:
            out = out * (1.0 - np.conj(a) * z)
        return complex(out) if out.ndim == 0 else out

    def tm_phase(self) -> complex:
        """prod (-|a_j|/a_j), the unimodular constant relating tau = 1 to the
        phase convention the orthonormal system inherits; +1 at zero poles."""
        phase = 1.0 + 0.0j
        for a in self.poles:
            if a != 0:
                phase *= -abs(a) / a
        return phase


class TMBasis:
    """Evaluator for phi_0..phi_n bound to a pole sequence.

    All poles of every phi_k lie at the circle reflections 1/conj(a_j), so the
    functions are analytic on the closed unit disk.
    """

    def __init__(self, poles: PoleSequence | Sequence[complex]):
        if not isinstance(poles, PoleSequence):
            poles = PoleSequence(poles)
        if len(poles) == 0:
            raise ValueError("a basis needs at least one pole")
        self.poles = poles

    @property
    def size(self) -> int:
        return len(self.poles)

    @property
    def max_index(self) -> int:
        return len(self.poles) - 1

    def _check_index(self, k: int) -> int:
        k = int(k)
        if not 0 <= k <= self.max_index:
            raise IndexOutOfRange(
                f"basis index {k} outside 0..{self.max_index}"
            )
        return k

    def eval(self, k: int, z):
        """phi_k(z) by running products of the unimodular-safe factors."""
        k = self._check_index(k)
        z = np.asarray(z)
        running = np.ones(z.shape, dtype=np.result_type(z, np.complex128))
        for a in self.poles[:k]:
            running = running * _tm_factor(a, z)
        a_k = self.poles[k]
        out = np.sqrt(1.0 - abs(a_k) ** 2) / (1.0 - np.conj(a_k) * z) * running
        return complex(out) if out.ndim == 0 else out

    def eval_all(self, z, count: int | None = None) -> np.ndarray:
        """Stack [phi_0(z), ..., phi_{count-1}(z)] along a new leading axis."""
        if count is None:
            count = self.size
        if not 0 <= count <= self.size:
            raise IndexOutOfRange(f"requested {count} functions, have {self.size}")
        z = np.asarray(z)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z)
        out = np.empty((count,) + zz.shape, dtype=np.result_type(zz, np.complex128))
        running = np.ones(zz.shape, dtype=out.dtype)
        for k in range(count):
            a = self.poles[k]
            out[k] = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * zz) * running
            running = running * _tm_factor(a, zz)
        return out[:, 0] if scalar else out

    def design_matrix(self, grid: CircleGrid, count: int | None = None) -> np.ndarray:
        """Node-by-function matrix A[j, k] = phi_k(node_j)."""
        return self.eval_all(grid.nodes, count=count).T

    def gram_matrix(self, grid: CircleGrid) -> np.ndarray:
        """Discrete Gram <phi_k, phi_l> under the grid's quadrature."""
        a = self.design_matrix(grid)
        return (a.T @ np.conj(a)) * grid.weight

    def blaschke(self, degree: int, tau: complex = 1.0) -> BlaschkeProduct:
        """Blaschke product over the first `degree` poles."""
        if not 0 <= degree <= self.size:
            raise IndexOutOfRange(
                f"Blaschke degree {degree} outside 0..{self.size}"
            )
        return BlaschkeProduct(self.poles.prefix(degree), tau)


def tm_eval(basis: TMBasis, k: int, z):
    return basis.eval(k, z)


def blaschke_eval(product: BlaschkeProduct, z):
    return product(z)


def christoffel_darboux_residual(
    basis: TMBasis, n: int, z, zeta, tau: complex = 1.0
) -> float:
    """Residual of the partial-reproducing-kernel identity

        1/(1 - conj(z) zeta) = sum_{k<n} conj(phi_k(z)) phi_k(zeta)
                               + conj(B_n(z)) B_n(zeta) / (1 - conj(z) zeta)

    for z, zeta in the open disk and 1 <= n <= max_index + 1.  The optional
    tau probes phase freedom: the result must not depend on it.
    """
    n = int(n)
    if not 1 <= n <= basis.max_index + 1:
        raise IndexOutOfRange(f"n = {n} outside 1..{basis.max_index + 1}")
    z = require_in_disk(_as_point(z))
    zeta = require_in_disk(_as_point(zeta))
    cauchy = 1.0 / (1.0 - np.conj(z) * zeta)
    phi_z = basis.eval_all(z, count=n)
    phi_zeta = basis.eval_all(zeta, count=n)
    kernel_sum = np.sum(np.conj(phi_z) * phi_zeta)
    b = basis.blaschke(n, tau)
    remainder = np.conj(b(z)) * b(zeta) * cauchy
    return float(abs(cauchy - kernel_sum - remainder))
