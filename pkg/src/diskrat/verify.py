"""Named verification checks behind the `verify` command and the test suite.

Each check pins its tolerance here; callers may override individual bounds
(useful for demonstrating the failure-reporting path) but nothing is deferred
to later calibration.  All randomness is seeded, so repeated runs produce
identical results byte for byte.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bergman_approx import (
    build_approximant,
    build_error_report,
    closed_form_J,
    closed_form_J_tm_phase,
    competitor_function,
    equimodularity_variation,
    mu_functional,
    mu_min_closed_form,
    nu_functional,
    nu_min_closed_form,
    random_competitor_coefficients,
)
from .circlequad import circle_grid, require_in_disk
from .errors import PointNotInDisk
from .expansion import remainder_integral_J
from .kernels import KernelSpec
from .oracle import LeastSquaresProblem, lsq_minimize, uniform_competitor_scan
from .tm_basis import PoleSequence, TMBasis, christoffel_darboux_residual

__all__ = ["CheckResult", "DEFAULT_TOLERANCES", "ALL_CHECK_NAMES", "run_checks", "verdict_dict"]

DEFAULT_TOLERANCES = {
    "orthonormality": 1e-12,
    "christoffel_darboux": 1e-12,
    "quadratic_exactness": 1e-10,
    "oracle_equivalence": 1e-8,
    "oracle_routes": 1e-9,
    "uniform_exactness": 1e-6,
    "equimodularity": 1e-9,
    "competitor_scan": 1e-9,
    "approximant_closed_form": 1e-12,
    "interpolation": 1e-8,
    "remainder_identity": 1e-10,
    "remainder_modulus": 1e-10,
    "quadratic_uniform_bound": 1e-12,
    "parseval_gap": 1e-10,
    "degenerate_w_zero": 0.0,
    "boundary_mu": 1e-8,
    "boundary_nu": 1e-5,
    "boundary_rejection": 0.0,
}

#: Long-double integrand evaluation kicks in below this quadratic minimum;
#: smaller minima drown in double-precision cancellation noise.
EXTENDED_MU_CUTOFF = 1e-7

_ORTHO_SEED = 7000
_CD_SEED = 7100
_LATTICE_SEED = 20260810


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={self.value:.6e} bound={self.bound:.6e}"


def _tol(tolerances: dict, name: str) -> float:
    return float(tolerances.get(name, DEFAULT_TOLERANCES[name]))


def _disk_points(rng: np.random.Generator, count: int, max_modulus: float) -> np.ndarray:
    radii = max_modulus * np.sqrt(rng.uniform(0.0, 1.0, count))
    return radii * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, count))


def _random_w(rng: np.random.Generator, modulus: float) -> complex:
    return complex(modulus * np.exp(2j * np.pi * rng.uniform()))


def _check_orthonormality(tolerances: dict) -> list[CheckResult]:
    bound = _tol(tolerances, "orthonormality")
    grid = circle_grid(4096)
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(_ORTHO_SEED + i)
        count = int(rng.integers(1, 22))  # up to index n = 20
        basis = TMBasis(PoleSequence.random(count, rng=rng, max_modulus=0.9))
        gram = basis.gram_matrix(grid)
        worst = max(worst, float(np.max(np.abs(gram - np.eye(count)))))
    return [CheckResult("orthonormality", worst < bound, worst, bound,
                        {"sequences": 20, "grid": 4096})]


def _check_christoffel(tolerances: dict) -> list[CheckResult]:
    bound = _tol(tolerances, "christoffel_darboux")
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(_CD_SEED + i)
        count = int(rng.integers(1, 22))
        basis = TMBasis(PoleSequence.random(count, rng=rng, max_modulus=0.9))
        zs = _disk_points(rng, 100, 0.8)
        zetas = _disk_points(rng, 100, 0.8)
        n = basis.size
        phi_z = basis.eval_all(zs, count=n)
        phi_zeta = basis.eval_all(zetas, count=n)
        cauchy = 1.0 / (1.0 - np.conj(zs) * zetas)
        kernel_sum = np.sum(np.conj(phi_z) * phi_zeta, axis=0)
        b = basis.blaschke(n)
        remainder = np.conj(b(zs)) * b(zetas) * cauchy
        worst = max(worst, float(np.max(np.abs(cauchy - kernel_sum - remainder))))
    return [CheckResult("christoffel_darboux", worst < bound, worst, bound,
                        {"sequences": 20, "pairs_per_sequence": 100})]


def _quadratic_lattice():
    for alpha in (0, 1, 2, 3):
        for n in range(alpha, alpha + 11):
            for w_index, modulus in enumerate((0.1, 0.3, 0.5, 0.7)):
                for draw in range(3):
                    yield alpha, n, w_index, modulus, draw


def _check_quadratic_group(tolerances: dict) -> list[CheckResult]:
    t1_bound = _tol(tolerances, "quadratic_exactness")
    lsq_bound = _tol(tolerances, "oracle_equivalence")
    route_bound = _tol(tolerances, "oracle_routes")
    worst_rel = 0.0
    worst_lsq = 0.0
    worst_route = 0.0
    worst_cond = 1.0
    configs = 0
    for alpha, n, w_index, modulus, draw in _quadratic_lattice():
        rng = np.random.default_rng([_LATTICE_SEED, alpha, n, w_index, draw])
        spec = KernelSpec(alpha, _random_w(rng, modulus))
        free = PoleSequence.random(n - alpha, rng=rng, max_modulus=0.85)
        approx = build_approximant(spec, free)
        grid = circle_grid(approx.expansion.grid_size)
        mu_closed = mu_min_closed_form(spec, free)
        mu_quad = mu_functional(
            spec, approx.eval, grid, extended=mu_closed < EXTENDED_MU_CUTOFF
        )
        worst_rel = max(worst_rel, abs(mu_quad - mu_closed) / mu_closed)
        problem = LeastSquaresProblem.build(spec, approx.basis, circle_grid(4096))
        result = lsq_minimize(problem, extended=mu_closed < EXTENDED_MU_CUTOFF)
        worst_lsq = max(worst_lsq, abs(result.minimum - mu_closed) / mu_closed)
        worst_route = max(worst_route, result.route_gap)
        worst_cond = max(worst_cond, result.condition)
        configs += 1
    # spot value: alpha=0, n=1, free pole 0, w=0.5 gives exactly 4/27
    spot = mu_min_closed_form(KernelSpec(0, 0.5), PoleSequence([0j]))
    worst_rel = max(worst_rel, abs(spot - 4.0 / 27.0) / (4.0 / 27.0))
    detail = {"configurations": configs, "spot_mu": spot, "max_condition": worst_cond}
    return [
        CheckResult("quadratic_exactness", worst_rel < t1_bound, worst_rel, t1_bound, detail),
        CheckResult("oracle_equivalence", worst_lsq < lsq_bound, worst_lsq, lsq_bound, detail),
        CheckResult("oracle_routes", worst_route < route_bound, worst_route, route_bound, detail),
    ]


def _check_uniform_group(tolerances: dict) -> list[CheckResult]:
    nu_bound = _tol(tolerances, "uniform_exactness")
    eq_bound = _tol(tolerances, "equimodularity")
    scan_bound = _tol(tolerances, "competitor_scan")
    nu_grid = circle_grid(2**16)
    worst_nu = 0.0
    configs = 0
    for alpha in (0, 1, 2, 3):
        for offset in (0, 2, 5):
            for w_index, modulus in enumerate((0.3, 0.5, 0.7)):
                for draw in range(2):
                    n = alpha + offset
                    rng = np.random.default_rng(
                        [_LATTICE_SEED + 1, alpha, n, w_index, draw]
                    )
                    spec = KernelSpec(alpha, _random_w(rng, modulus))
                    free = PoleSequence.random(
                        n - alpha, rng=rng, max_modulus=0.8, min_modulus=0.1
                    )
                    approx = build_approximant(spec, free)
                    nu_val = nu_functional(spec, approx.eval, nu_grid)
                    nu_closed = nu_min_closed_form(spec, free)
                    worst_nu = max(worst_nu, abs(nu_val - nu_closed) / nu_closed)
                    configs += 1
    spot = nu_min_closed_form(KernelSpec(0, 0.5), PoleSequence([0j]))
    worst_nu = max(worst_nu, abs(spot - 1.0 / 3.0) / (1.0 / 3.0))

    eq_grid = circle_grid(2**14)
    worst_eq = 0.0
    for alpha in (0, 1, 2, 3):
        rng = np.random.default_rng([_LATTICE_SEED + 2, alpha])
        spec = KernelSpec(alpha, _random_w(rng, 0.55))
        free = PoleSequence.random(2, rng=rng, max_modulus=0.6, min_modulus=0.2)
        approx = build_approximant(spec, free)
        worst_eq = max(worst_eq, equimodularity_variation(spec, approx.eval, eq_grid))

    scan_configs = [
        (KernelSpec(0, 0.5), PoleSequence([0j]), 42),
        (KernelSpec(1, 0.4j), PoleSequence([0.2]), 43),
        (KernelSpec(2, complex(-0.3, 0.2)), PoleSequence([0.25, -0.3j]), 44),
    ]
    worst_scan = 0.0
    for spec, free, seed in scan_configs:
        basis = TMBasis(free.with_trailing(spec.w, spec.alpha + 1))
        report = uniform_competitor_scan(spec, basis, trials=100, seed=seed)
        worst_scan = max(worst_scan, max(0.0, -report.margin))

    detail = {"configurations": configs, "spot_nu": spot, "nu_grid": 2**16}
    return [
        CheckResult("uniform_exactness", worst_nu < nu_bound, worst_nu, nu_bound, detail),
        CheckResult("equimodularity", worst_eq < eq_bound, worst_eq, eq_bound,
                    {"grid": 2**14}),
        CheckResult("competitor_scan", worst_scan < scan_bound, worst_scan, scan_bound,
                    {"trials": 100, "seeds": [s for *_, s in scan_configs]}),
    ]


def _approximant_configs():
    w1 = 0.5 + 0.0j
    w2 = -0.4j
    w3 = complex(0.45 * np.cos(1.1), 0.45 * np.sin(1.1))
    for alpha in (0, 1, 2):
        yield alpha, w1, [0.3, 0.3, 0.3]          # multiplicity-3 free pole
        yield alpha, w2, [0.3, 0.3]               # duplicated free pole
        yield alpha, w3, [0.2, -0.5j, 0.35]       # generic free poles
        yield alpha, w1, []                       # pure trailing block
        yield alpha, w1, [0.3, w1]                # free pole equal to w (flagged)


def _check_approximant_group(tolerances: dict) -> list[CheckResult]:
    cf_bound = _tol(tolerances, "approximant_closed_form")
    interp_bound = _tol(tolerances, "interpolation")
    rng = np.random.default_rng(_LATTICE_SEED + 3)
    disk_pts = _disk_points(rng, 25, 0.9)
    circle_pts = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 25))
    points = np.concatenate([disk_pts, circle_pts])
    worst_cf = 0.0
    worst_interp = 0.0
    flagged = 0
    for alpha, w, free in _approximant_configs():
        spec = KernelSpec(alpha, w)
        approx = build_approximant(spec, PoleSequence(free))
        direct = approx.eval(points)
        closed = approx.eval_closed_form(points)
        worst_cf = max(worst_cf, float(np.max(np.abs(direct - closed))))
        worst_interp = max(worst_interp, max(approx.interpolation_residuals()))
        if any(p == w for p in approx.free_poles):
            flagged += 1
    detail = {"points": len(points), "free_pole_equals_w_configs": flagged}
    return [
        CheckResult("approximant_closed_form", worst_cf < cf_bound, worst_cf, cf_bound, detail),
        CheckResult("interpolation", worst_interp < interp_bound, worst_interp,
                    interp_bound, detail),
    ]


def _check_remainder_group(tolerances: dict) -> list[CheckResult]:
    rem_bound = _tol(tolerances, "remainder_identity")
    mod_bound = _tol(tolerances, "remainder_modulus")
    rng = np.random.default_rng(_LATTICE_SEED + 4)
    zs = _disk_points(rng, 50, 0.85)
    configs = [
        (0, 0.5 + 0.0j, [0.3]),
        (1, 0.4j, [0.2]),
        (2, complex(-0.3, 0.2), [0.25, -0.35j, 0.15]),
    ]
    worst_rem = 0.0
    worst_mod = 0.0
    worst_phase = 0.0
    for alpha, w, free in configs:
        spec = KernelSpec(alpha, w)
        approx = build_approximant(spec, PoleSequence(free))
        basis = approx.basis
        n = approx.n
        grid = circle_grid(approx.expansion.grid_size)
        b_full = basis.blaschke(n + 1)
        for z in zs:
            z = complex(z)
            j_quad = remainder_integral_J(spec, basis, n, z, grid)
            j_closed = closed_form_J(spec, basis, n, z)
            lhs = spec.bergman(z) - approx.expansion.partial_sum(n + 1, z)
            rhs = b_full(z) * j_quad
            worst_rem = max(worst_rem, abs(lhs - rhs))
            worst_mod = max(
                worst_mod, abs(abs(j_quad) - abs(j_closed)) / abs(j_closed)
            )
            worst_phase = max(worst_phase, abs(j_quad - j_closed) / abs(j_closed))
        # the phase-convention diagnostic: the aligned value must coincide
        j_tm, constant = closed_form_J_tm_phase(spec, basis, n, complex(zs[0]))
        aligned = constant * j_tm
        worst_phase = max(
            worst_phase,
            abs(aligned - closed_form_J(spec, basis, n, complex(zs[0])))
            / abs(aligned),
        )
    detail = {"points": len(zs), "phase_aligned_residual": worst_phase}
    return [
        CheckResult("remainder_identity", worst_rem < rem_bound, worst_rem, rem_bound, detail),
        CheckResult("remainder_modulus", worst_mod < mod_bound, worst_mod, mod_bound, detail),
    ]


def _check_inequality_group(tolerances: dict) -> list[CheckResult]:
    ineq_bound = _tol(tolerances, "quadratic_uniform_bound")
    gap_bound = _tol(tolerances, "parseval_gap")
    configs = [
        (0, 0.3 + 0.0j, [0.2]),
        (0, 0.5 + 0.0j, [0j]),
        (1, complex(0.5 * np.cos(np.pi / 5), 0.5 * np.sin(np.pi / 5)), [0.3, -0.2j]),
        (2, 0.6j, [0.25]),
    ]
    mu_grid = circle_grid(4096)
    nu_grid = circle_grid(2**14)
    worst_ineq = -np.inf
    worst_gap = 0.0
    for index, (alpha, w, free) in enumerate(configs):
        spec = KernelSpec(alpha, w)
        approx = build_approximant(spec, PoleSequence(free))
        basis = approx.basis
        rng = np.random.default_rng([_LATTICE_SEED + 5, index])
        design = basis.design_matrix(mu_grid)
        ratio_factor = 1.0 / (1.0 - mu_grid.nodes * np.conj(w))
        mu_at_optimum = mu_functional(spec, approx.eval, mu_grid)
        optimum = approx.coefficients
        one_minus = 1.0 - abs(w) ** 2
        for trial in range(100):
            if trial == 0:
                coeffs = optimum
            elif trial % 2 == 1:
                coeffs = random_competitor_coefficients(approx, rng)
            else:
                scale = float(np.max(np.abs(optimum)))
                coeffs = scale * (
                    rng.standard_normal(len(optimum))
                    + 1j * rng.standard_normal(len(optimum))
                )
            rational = competitor_function(basis, w, coeffs)
            mu_val = mu_functional(spec, rational, mu_grid)
            nu_val = nu_functional(spec, rational, nu_grid)
            worst_ineq = max(worst_ineq, mu_val * one_minus - nu_val**2)
            # Parseval gap against quadrature-recovered ratio coefficients
            ratio_values = rational(mu_grid.nodes) * ratio_factor
            recovered = (np.conj(design).T @ ratio_values) * mu_grid.weight
            gap = mu_val - mu_at_optimum
            sq = float(np.sum(np.abs(recovered - optimum) ** 2))
            worst_gap = max(worst_gap, abs(gap - sq))
    detail = {"configurations": len(configs), "trials_per_config": 100}
    return [
        CheckResult("quadratic_uniform_bound", worst_ineq < ineq_bound, float(worst_ineq),
                    ineq_bound, detail),
        CheckResult("parseval_gap", worst_gap < gap_bound, worst_gap, gap_bound, detail),
    ]


def _check_degenerate_group(tolerances: dict) -> list[CheckResult]:
    zero_bound = _tol(tolerances, "degenerate_w_zero")
    mu_bound = _tol(tolerances, "boundary_mu")
    nu_bound = _tol(tolerances, "boundary_nu")
    rej_bound = _tol(tolerances, "boundary_rejection")

    report = build_error_report(KernelSpec(1, 0j), PoleSequence([0.3, -0.2j]))
    zero_value = max(
        abs(report.mu_quadrature),
        abs(report.mu_closed_form),
        abs(report.nu_grid),
        abs(report.nu_closed_form),
        abs(report.max_interp_residual),
    )

    worst_mu = 0.0
    worst_nu = 0.0
    grids = []
    for alpha in (0, 2):
        spec = KernelSpec(alpha, 0.95 + 0.0j)
        free = PoleSequence([0.3, -0.25j])
        approx = build_approximant(spec, free)
        grids.append(approx.expansion.grid_size)
        grid = circle_grid(approx.expansion.grid_size)
        mu_closed = mu_min_closed_form(spec, free)
        mu_quad = mu_functional(spec, approx.eval, grid)
        worst_mu = max(worst_mu, abs(mu_quad - mu_closed) / mu_closed)
        nu_val = nu_functional(spec, approx.eval, circle_grid(2**16))
        nu_closed = nu_min_closed_form(spec, free)
        worst_nu = max(worst_nu, abs(nu_val - nu_closed) / nu_closed)

    failures = 0
    for bad in (1.0 - 1e-10, 1.0, 1.5):
        try:
            require_in_disk(bad)
            failures += 1
        except PointNotInDisk:
            pass
        try:
            KernelSpec(0, bad)
            failures += 1
        except PointNotInDisk:
            pass
        try:
            PoleSequence([bad * 1j])
            failures += 1
        except PointNotInDisk:
            pass
    try:
        require_in_disk(0.95)
        KernelSpec(3, -0.95j)
    except PointNotInDisk:
        failures += 1

    return [
        CheckResult("degenerate_w_zero", zero_value <= zero_bound, zero_value,
                    zero_bound, {"report": report.to_json_dict()}),
        CheckResult("boundary_mu", worst_mu < mu_bound, worst_mu, mu_bound,
                    {"escalated_grids": grids}),
        CheckResult("boundary_nu", worst_nu < nu_bound, worst_nu, nu_bound,
                    {"escalated_grids": grids}),
        CheckResult("boundary_rejection", failures <= rej_bound, float(failures),
                    rej_bound, {}),
    ]


CHECK_GROUPS = [
    (("orthonormality",), _check_orthonormality),
    (("christoffel_darboux",), _check_christoffel),
    (("quadratic_exactness", "oracle_equivalence", "oracle_routes"), _check_quadratic_group),
    (("uniform_exactness", "equimodularity", "competitor_scan"), _check_uniform_group),
    (("approximant_closed_form", "interpolation"), _check_approximant_group),
    (("remainder_identity", "remainder_modulus"), _check_remainder_group),
    (("quadratic_uniform_bound", "parseval_gap"), _check_inequality_group),
    (
        ("degenerate_w_zero", "boundary_mu", "boundary_nu", "boundary_rejection"),
        _check_degenerate_group,
    ),
]

ALL_CHECK_NAMES = [name for names, _ in CHECK_GROUPS for name in names]


def run_checks(
    only: list[str] | None = None, tolerances: dict | None = None
) -> list[CheckResult]:
    """Run all (or the selected) checks in registry order."""
    tolerances = dict(tolerances or {})
    for name in tolerances:
        if name not in DEFAULT_TOLERANCES:
            raise ValueError(f"unknown tolerance name: {name}")
    if only is not None:
        unknown = set(only) - set(ALL_CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown check names: {sorted(unknown)}")
    results = []
    for names, group_fn in CHECK_GROUPS:
        if only is not None and not set(names) & set(only):
            continue
        started = time.perf_counter()
        group_results = group_fn(tolerances)
        elapsed = time.perf_counter() - started
        for result in group_results:
            if only is None or result.name in only:
                result.detail.setdefault("group_seconds", round(elapsed, 3))
                results.append(result)
    return results


def verdict_dict(results: list[CheckResult]) -> dict:
    """Machine-readable verdict: {check_name: {pass, value, bound}}."""
    return {
        r.name: {"pass": r.passed, "value": r.value, "bound": r.bound}
        for r in results
    }
