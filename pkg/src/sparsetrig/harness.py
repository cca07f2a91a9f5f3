"""Monte Carlo recovery experiments and bound-curve emission.

A trial draws a random support, random coefficients, and a random sampling
set from per-trial sub-seeds, solves the l1 interpolation problem, and
compares against the ground truth.  Record emission is deterministic: the
same configuration and master seed always produce byte-identical CSV (wall
times are kept on the records but never persisted).
"""

from __future__ import annotations

import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds as _bounds
from .model import (
    FixedSize,
    Bernoulli,
    FrequencyGrid,
    derive_seed,
    draw_coefficients,
    draw_sampling_set,
    draw_support,
    fourier_matrix,
)
from .solver import BPProblem, SolverOptions, dual_certificate, solve_basis_pursuit

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "run_montecarlo",
    "emit_trial_records",
    "emit_failure_curve",
    "emit_bound_curves",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of a recovery phase-transition experiment.

    Exactly one of ``sparsity`` (fixed support size) or ``tau`` (independent
    inclusion probability) selects the support model.  ``recovery_tolerance``
    is relative to ``max(1, linf norm of the true coefficients)``.
    """

    q: int
    d: int
    sample_counts: tuple[int, ...]
    trials_per_count: int
    master_seed: int
    sparsity: int | None = None
    tau: float | None = None
    recovery_tolerance: float = 1e-4
    certify: bool = False
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "sample_counts", tuple(int(n) for n in self.sample_counts))
        if not self.sample_counts or any(n < 1 for n in self.sample_counts):
            raise ValueError("sample_counts must be nonempty positive integers")
        if self.trials_per_count < 1:
            raise ValueError("trials_per_count must be positive")
        if (self.sparsity is None) == (self.tau is None):
            raise ValueError("set exactly one of sparsity or tau")
        if self.recovery_tolerance <= 0:
            raise ValueError("recovery_tolerance must be positive")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(q=self.q, d=self.d)

    def support_model(self):
        return FixedSize(self.sparsity) if self.sparsity is not None else Bernoulli(self.tau)

    def to_json(self) -> str:
        doc = {
            "q": self.q,
            "d": self.d,
            "sample_counts": list(self.sample_counts),
            "trials_per_count": self.trials_per_count,
            "master_seed": self.master_seed,
            "sparsity": self.sparsity,
            "tau": self.tau,
            "recovery_tolerance": self.recovery_tolerance,
            "certify": self.certify,
            "solver": {
                "max_iterations": self.solver.max_iterations,
                "primal_tolerance": self.solver.primal_tolerance,
                "dual_tolerance": self.solver.dual_tolerance,
                "penalty": self.solver.penalty,
            },
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        solver = SolverOptions(**doc.get("solver", {}))
        return cls(
            q=int(doc["q"]),
            d=int(doc["d"]),
            sample_counts=tuple(doc["sample_counts"]),
            trials_per_count=int(doc["trials_per_count"]),
            master_seed=int(doc["master_seed"]),
            sparsity=doc.get("sparsity"),
            tau=doc.get("tau"),
            recovery_tolerance=float(doc.get("recovery_tolerance", 1e-4)),
            certify=bool(doc.get("certify", False)),
            solver=solver,
        )


@dataclass
class TrialRecord:
    sample_count: int
    trial_index: int
    seed: int
    recovered: bool
    linf_error: float
    certificate_sup: float | None
    solver_iterations: int
    solver_converged: bool
    wall_time_ms: float


def _run_trial(config: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    grid = config.grid
    seed = derive_seed(config.master_seed, "trial", n, trial)
    started = time.perf_counter()

    support = draw_support(grid, config.support_model(), seed)
    poly = draw_coefficients(grid, support, seed)
    samples = draw_sampling_set(grid, n, seed)

    truth = poly.dense()
    if support:
        rhs = fourier_matrix(samples, poly.sorted_support()) @ np.array(
            [poly.coeffs[k] for k in poly.sorted_support()]
        )
    else:
        rhs = np.zeros(samples.count, dtype=complex)
    problem = BPProblem(matrix=fourier_matrix(samples, grid.frequencies()), rhs=rhs)
    solution = solve_basis_pursuit(problem, config.solver)

    linf = float(np.max(np.abs(solution.coeffs - truth)))
    threshold = config.recovery_tolerance * max(1.0, float(np.max(np.abs(truth), initial=0.0)))
    certificate_sup = None
    if config.certify and support:
        certificate_sup = dual_certificate(samples, grid, poly).sup_off_support

    return TrialRecord(
        sample_count=n,
        trial_index=trial,
        seed=seed,
        recovered=linf <= threshold,
        linf_error=linf,
        certificate_sup=certificate_sup,
        solver_iterations=solution.iterations,
        solver_converged=solution.converged,
        wall_time_ms=(time.perf_counter() - started) * 1e3,
    )


def _trial_task(args):
    config_json, n, trial = args
    return _run_trial(ExperimentConfig.from_json(config_json), n, trial)


def run_montecarlo(config: ExperimentConfig, workers: int = 1) -> list[TrialRecord]:
    """Run every trial of the configuration and return records sorted by
    ``(sample_count, trial_index)``.  Trials are independent; solver
    non-convergence is recorded on the trial, never raised.
    """
    jobs = [
        (n, t)
        for n in config.sample_counts
        for t in range(config.trials_per_count)
    ]
    if workers > 1:
        cfg = config.to_json()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_task, [(cfg, n, t) for n, t in jobs]))
    else:
        records = [_run_trial(config, n, t) for n, t in jobs]
    records.sort(key=lambda r: (r.sample_count, r.trial_index))
    return records


def emit_trial_records(records) -> str:
    """Per-trial CSV.  Wall times are deliberately omitted so identical
    seeds yield byte-identical output."""
    out = io.StringIO()
    out.write("N,trial,seed,recovered,linf_error,certificate_sup,iterations,converged\n")
    for r in records:
        cert = "" if r.certificate_sup is None else repr(r.certificate_sup)
        out.write(
            f"{r.sample_count},{r.trial_index},{r.seed},{int(r.recovered)},"
            f"{r.linf_error!r},{cert},{r.solver_iterations},{int(r.solver_converged)}\n"
        )
    return out.getvalue()


def emit_failure_curve(records) -> str:
    """Aggregate CSV ``N,trials,failures,failure_rate`` sorted by N."""
    if not records:
        raise ValueError("no records to aggregate")
    by_n: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_n.setdefault(r.sample_count, []).append(r)
    out = io.StringIO()
    out.write("N,trials,failures,failure_rate\n")
    for n in sorted(by_n):
        group = by_n[n]
        failures = sum(not r.recovered for r in group)
        out.write(f"{n},{len(group)},{failures},{failures / len(group)!r}\n")
    return out.getvalue()


_CURVE_HEADER = "N,failure_bound,term1,term2,term3,n,beta,kappa,alpha\n"


def emit_bound_curves(theorem: int, size, dimension: int, sample_counts,
                      orders=None, censuses: "_bounds.CensusSet | None" = None) -> str:
    """Failure-bound curves, one row per (moment order, sample count).

    ``size`` is the sparsity (theorem 1) or the expected support size
    (theorem 2).  For each order and N the remaining parameters are
    optimized; term columns follow the bound's breakdown order (offsupport,
    gram, tail), with alpha empty for theorem 1.
    """
    if theorem == 1:
        orders = tuple(orders) if orders is not None else tuple(range(3, 8))
    elif theorem == 2:
        orders = tuple(orders) if orders is not None else (2, 3, 4)
        if censuses is None:
            censuses = _bounds.CensusSet.for_orders(orders)
    else:
        raise ValueError("theorem must be 1 or 2")
    out = io.StringIO()
    out.write(_CURVE_HEADER)
    for n in orders:
        for N in sample_counts:
            report = _bounds.optimize_bound(
                theorem, size, int(N), dimension, orders=(n,), censuses=censuses
            )
            terms = report.term_breakdown
            t1 = terms.get("offsupport", terms.get("trivial", 0.0))
            t2 = terms.get("gram", 0.0)
            t3 = terms.get("tail", 0.0)
            p = report.params
            beta = repr(p.beta) if p is not None else ""
            kappa = repr(p.kappa) if p is not None else ""
            alpha = repr(p.alpha) if getattr(p, "alpha", None) is not None else ""
            out.write(
                f"{int(N)},{report.failure_bound!r},{t1!r},{t2!r},{t3!r},"
                f"{n},{beta},{kappa},{alpha}\n"
            )
    return out.getvalue()
