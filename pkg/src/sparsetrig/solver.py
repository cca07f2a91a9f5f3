"""Equality-constrained complex l1 minimization and dual certificates.

The solver is an operator-splitting iteration: alternate exact Euclidean
projection onto the interpolation constraint (through a cached factorization
of the small Gram matrix of the sampling rows) with complex soft
thresholding, plus the usual residual-balancing penalty adaptation.  The
dual-certificate construction solves the support Gram system and checks the
off-support magnitudes; a certified report guarantees the polynomial is the
unique l1 minimizer for its own samples.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import FrequencyGrid, SamplingSet, SparseTrigPoly, fourier_matrix

__all__ = [
    "BPProblem",
    "SolverOptions",
    "BPSolution",
    "CertificateReport",
    "solve_basis_pursuit",
    "dual_certificate",
    "gram_deviation_power_norm",
]

_GRAM_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class BPProblem:
    """``min ||c||_1 subject to matrix @ c == rhs`` over complex vectors."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        rhs = np.asarray(self.rhs, dtype=complex).ravel()
        if mat.ndim != 2 or mat.size == 0:
            raise ValueError("matrix must be a nonempty 2-D array")
        if rhs.shape[0] != mat.shape[0]:
            raise ValueError(
                f"rhs length {rhs.shape[0]} does not match {mat.shape[0]} rows"
            )
        if not (np.all(np.isfinite(mat.view(float))) and np.all(np.isfinite(rhs.view(float)))):
            raise ValueError("matrix and rhs must be finite")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "rhs", rhs)


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 50_000
    primal_tolerance: float = 1e-9   # relative constraint residual
    dual_tolerance: float = 1e-9     # relative iterate change
    penalty: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.primal_tolerance <= 0 or self.dual_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.penalty <= 0:
            raise ValueError("penalty must be positive")


@dataclass
class BPSolution:
    coeffs: np.ndarray
    objective: float
    constraint_residual: float
    iterations: int
    converged: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "coeffs": [{"re": c.real, "im": c.imag} for c in self.coeffs],
                "objective": self.objective,
                "constraint_residual": self.constraint_residual,
                "iterations": self.iterations,
                "converged": self.converged,
            }
        )


def _shrink(v: np.ndarray, threshold: float) -> np.ndarray:
    # complex block soft threshold: scale each modulus toward zero
    mag = np.abs(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > threshold, 1.0 - threshold / mag, 0.0)
    return v * scale


def _affine_projector(matrix: np.ndarray, rhs: np.ndarray):
    """Euclidean projection onto ``{c : matrix @ c == rhs}``.

    Uses a Cholesky factorization of the row Gram matrix when it is
    numerically positive definite, otherwise a pseudoinverse.
    """
    adjoint = matrix.conj().T
    gram = matrix @ adjoint
    try:
        factor = scipy.linalg.cho_factor(gram)

        def project(v):
            return v - adjoint @ scipy.linalg.cho_solve(factor, matrix @ v - rhs)

    except scipy.linalg.LinAlgError:
        pinv = np.linalg.pinv(matrix)

        def project(v):
            return v - pinv @ (matrix @ v - rhs)

    return project


def solve_basis_pursuit(problem: BPProblem, opts: SolverOptions | None = None) -> BPSolution:
    """Minimize the sum of coefficient moduli subject to exact interpolation.

    Returns the affinely projected iterate, so the reported constraint
    residual is at the level of the projection arithmetic.  Non-convergence
    within the iteration budget is reported through the flag, never raised.
    """
    if opts is None:
        opts = SolverOptions()
    matrix, rhs = problem.matrix, problem.rhs
    n_rows, dim = matrix.shape
    project = _affine_projector(matrix, rhs)
    rhs_scale = max(1.0, float(np.linalg.norm(rhs)))

    rho = opts.penalty
    z = np.zeros(dim, dtype=complex)
    u = np.zeros(dim, dtype=complex)
    c = z
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        c = project(z - u)
        z_new = _shrink(c + u, 1.0 / rho)
        u = u + c - z_new
        primal_gap = float(np.linalg.norm(c - z_new))
        dual_gap = rho * float(np.linalg.norm(z_new - z))
        z = z_new

        change = max(primal_gap, dual_gap) / max(1.0, float(np.linalg.norm(z)))
        if change <= opts.dual_tolerance:
            residual = float(np.linalg.norm(matrix @ c - rhs)) / rhs_scale
            if residual <= opts.primal_tolerance:
                converged = True
                break
        # residual balancing keeps the two gaps comparable; adapt only early
        # so the fixed-penalty convergence theory applies afterwards
        if iterations <= 100:
            if primal_gap > 10.0 * dual_gap:
                rho *= 2.0
                u /= 2.0
            elif dual_gap > 10.0 * primal_gap:
                rho /= 2.0
                u *= 2.0

    residual = float(np.linalg.norm(matrix @ c - rhs)) / rhs_scale
    objective = float(np.sum(np.abs(c)))
    return BPSolution(
        coeffs=c,
        objective=objective,
        constraint_residual=residual,
        iterations=iterations,
        converged=converged and residual <= opts.primal_tolerance,
    )


@dataclass
class CertificateReport:
    """Dual certificate for unique l1 recovery.

    ``vector`` matches the coefficient signs on the support; certification
    additionally requires an invertible support Gram system and all
    off-support magnitudes strictly below one.
    """

    vector: np.ndarray
    sup_off_support: float
    gram_condition_ok: bool
    certified: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "P": [{"re": v.real, "im": v.imag} for v in self.vector],
                "sup_off_support": self.sup_off_support,
                "gram_condition_ok": self.gram_condition_ok,
                "certified": self.certified,
            }
        )


def dual_certificate(samples: SamplingSet, grid: FrequencyGrid,
                     poly: SparseTrigPoly) -> CertificateReport:
    """Construct the least-squares dual vector for the polynomial's support
    and report whether it certifies unique recovery.

    The vector interpolates the coefficient signs on the support through the
    support Gram system and extends to the full grid through the adjoint of
    the sampling operator.  A certified report guarantees the polynomial is
    the unique l1-minimizing interpolant of its own sample values.
    """
    support = poly.sorted_support()
    if not support:
        raise ValueError("the polynomial must have nonempty support")
    on_support = fourier_matrix(samples, support)
    gram = on_support.conj().T @ on_support
    signs = np.array([poly.coeffs[k] / abs(poly.coeffs[k]) for k in support])

    cond = float(np.linalg.cond(gram))
    gram_ok = bool(np.isfinite(cond) and cond < _GRAM_CONDITION_LIMIT)
    if gram_ok:
        y = np.linalg.solve(gram, signs)
    else:
        y = np.linalg.lstsq(gram, signs, rcond=None)[0]

    full = fourier_matrix(samples, grid.frequencies())
    vector = full.conj().T @ (on_support @ y)

    support_idx = {grid.index_of(k) for k in support}
    off_mask = np.ones(grid.size, dtype=bool)
    off_mask[list(support_idx)] = False
    sup_off = float(np.max(np.abs(vector[off_mask]))) if off_mask.any() else 0.0

    on_idx = [grid.index_of(k) for k in support]
    signs_match = bool(np.max(np.abs(vector[on_idx] - signs)) <= 1e-8)

    return CertificateReport(
        vector=vector,
        sup_off_support=sup_off,
        gram_condition_ok=gram_ok,
        certified=gram_ok and sup_off < 1.0 and signs_match,
    )


def gram_deviation_power_norm(samples: SamplingSet, support, power: int) -> float:
    """Frobenius norm of the ``power``-th matrix power of the support Gram
    deviation ``N*I - F*F`` (``F`` the support columns of the sampling
    matrix).  The deviation is self-adjoint with zero diagonal.
    """
    support = list(support)
    if not support:
        raise ValueError("support must be nonempty")
    if power < 1:
        raise ValueError("power must be at least 1")
    on_support = fourier_matrix(samples, support)
    deviation = samples.count * np.eye(len(support)) - on_support.conj().T @ on_support
    return float(np.linalg.norm(np.linalg.matrix_power(deviation, power), "fro"))
