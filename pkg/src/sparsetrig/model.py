"""Sparse trigonometric polynomials and seeded random instance generation.

Frequencies live on the symmetric integer cube of order ``q`` in dimension
``d``; polynomials are sparse complex coefficient maps on that grid.  All
randomness flows through named sub-streams derived by hashing
``(seed, role, indices)`` with BLAKE2b into a ``numpy`` ``SeedSequence``
feeding PCG64, so every draw is a pure function of its arguments and
distinct roles never share a stream.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TWO_PI",
    "FrequencyGrid",
    "SparseTrigPoly",
    "SamplingSet",
    "FixedSize",
    "Bernoulli",
    "derive_seed",
    "substream",
    "evaluate",
    "draw_sampling_set",
    "draw_support",
    "draw_coefficients",
    "fourier_matrix",
    "instance_to_json",
    "instance_from_json",
]

TWO_PI = 2.0 * math.pi

_SEED_MASK = (1 << 64) - 1


def derive_seed(seed: int, role: str, *indices: int) -> int:
    """A 64-bit sub-seed obtained by hashing the master seed, a role label,
    and optional integer indices.  Stable across platforms and runs.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed) & _SEED_MASK).encode())
    h.update(b"/")
    h.update(role.encode())
    for i in indices:
        h.update(b"/")
        h.update(str(int(i)).encode())
    return int.from_bytes(h.digest(), "little")


def substream(seed: int, role: str, *indices: int) -> np.random.Generator:
    """PCG64 generator for the named sub-stream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(derive_seed(seed, role, *indices)))


@dataclass(frozen=True)
class FrequencyGrid:
    """The frequency cube ``[-q, q]^d`` with a fixed enumeration order.

    Enumeration is lexicographic over coordinates, each ascending from
    ``-q`` to ``q``, so column orders, permutations, and serialized output
    are reproducible.  ``size`` is ``(2q+1)**d`` computed in exact integer
    arithmetic.
    """

    q: int
    d: int

    def __post_init__(self):
        if self.q < 0 or self.d < 1:
            raise ValueError("need q >= 0 and d >= 1")

    @property
    def size(self) -> int:
        return (2 * self.q + 1) ** self.d

    def contains(self, k) -> bool:
        return len(k) == self.d and all(-self.q <= c <= self.q for c in k)

    def index_of(self, k) -> int:
        """Position of the frequency tuple in the fixed enumeration."""
        if not self.contains(k):
            raise ValueError(f"{k} outside the grid")
        width = 2 * self.q + 1
        idx = 0
        for c in k:
            idx = idx * width + (c + self.q)
        return idx

    def frequency_at(self, idx: int) -> tuple[int, ...]:
        """Inverse of ``index_of``."""
        if not 0 <= idx < self.size:
            raise IndexError(idx)
        width = 2 * self.q + 1
        out = []
        for _ in range(self.d):
            idx, rem = divmod(idx, width)
            out.append(rem - self.q)
        return tuple(reversed(out))

    def frequencies(self) -> list[tuple[int, ...]]:
        """All grid frequencies in enumeration order."""
        return [self.frequency_at(i) for i in range(self.size)]


def _as_frequency(k) -> tuple[int, ...]:
    if isinstance(k, (int, np.integer)):
        return (int(k),)
    return tuple(int(c) for c in k)


@dataclass(frozen=True)
class SparseTrigPoly:
    """A trigonometric polynomial ``sum_k c_k exp(i k.x)`` with sparse
    coefficients on a frequency grid.  Only nonzero coefficients are stored.
    """

    grid: FrequencyGrid
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for k, c in self.coeffs.items():
            kk = _as_frequency(k)
            if not self.grid.contains(kk):
                raise ValueError(f"frequency {kk} outside grid")
            c = complex(c)
            if c != 0:
                clean[kk] = c
        object.__setattr__(self, "coeffs", clean)

    @property
    def support(self) -> frozenset:
        return frozenset(self.coeffs)

    def sorted_support(self) -> list[tuple[int, ...]]:
        return sorted(self.coeffs, key=self.grid.index_of)

    def dense(self) -> np.ndarray:
        """Coefficient vector on the full grid, enumeration order."""
        out = np.zeros(self.grid.size, dtype=complex)
        for k, c in self.coeffs.items():
            out[self.grid.index_of(k)] = c
        return out

    def norm_l1(self) -> float:
        return float(sum(abs(c) for c in self.coeffs.values()))

    def norm_linf(self) -> float:
        return float(max((abs(c) for c in self.coeffs.values()), default=0.0))


@dataclass(frozen=True)
class SamplingSet:
    """``N`` sampling points in ``[0, 2*pi)^d`` with the seed that produced
    them (or -1 when constructed from explicit points).
    """

    points: np.ndarray
    seed: int = -1

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.size == 0:
            raise ValueError("points must form a nonempty N x d array")
        if np.any(pts < 0) or np.any(pts >= TWO_PI) or not np.all(np.isfinite(pts)):
            raise ValueError("coordinates must lie in [0, 2*pi)")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class FixedSize:
    """Support model: exactly ``size`` frequencies, drawn as the prefix of a
    uniform permutation of the whole grid."""

    size: int


@dataclass(frozen=True)
class Bernoulli:
    """Support model: each frequency joins the support independently with
    probability ``tau``."""

    tau: float

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")


def evaluate(poly: SparseTrigPoly, x) -> complex:
    """Evaluate the polynomial at one point (empty support gives 0)."""
    x = np.asarray(x, dtype=float)
    total = 0j
    for k, c in poly.coeffs.items():
        total += c * np.exp(1j * float(np.dot(k, x)))
    return total


def draw_sampling_set(grid: FrequencyGrid, n: int, seed: int) -> SamplingSet:
    """``n`` i.i.d. points uniform on ``[0, 2*pi)^d``; identical seeds
    reproduce identical points bit for bit."""
    if n < 1:
        raise ValueError("need at least one sampling point")
    rng = substream(seed, "sampling")
    return SamplingSet(points=rng.random((n, grid.d)) * TWO_PI, seed=seed)


def draw_support(grid: FrequencyGrid, model, seed: int) -> set:
    """Random support per the given model.

    ``FixedSize`` takes the first ``size`` entries of a uniform permutation
    of the grid enumeration (Fisher-Yates); ``Bernoulli`` includes each
    frequency independently.
    """
    rng = substream(seed, "support")
    if isinstance(model, FixedSize):
        if not 0 <= model.size <= grid.size:
            raise ValueError(f"support size {model.size} exceeds grid size {grid.size}")
        chosen = rng.permutation(grid.size)[: model.size]
        return {grid.frequency_at(int(i)) for i in chosen}
    if isinstance(model, Bernoulli):
        mask = rng.random(grid.size) < model.tau
        return {grid.frequency_at(i) for i in np.flatnonzero(mask)}
    raise TypeError(f"unknown support model {model!r}")


def draw_coefficients(grid: FrequencyGrid, support, seed: int) -> SparseTrigPoly:
    """Coefficients with independent standard normal real and imaginary
    parts on the given support, assigned in grid enumeration order."""
    ordered = sorted((_as_frequency(k) for k in support), key=grid.index_of)
    rng = substream(seed, "coefficients")
    vals = rng.standard_normal((len(ordered), 2))
    coeffs = {k: complex(re, im) for k, (re, im) in zip(ordered, vals)}
    return SparseTrigPoly(grid=grid, coeffs=coeffs)


def fourier_matrix(samples: SamplingSet, frequencies) -> np.ndarray:
    """The ``N x len(frequencies)`` matrix with entries
    ``exp(i k . x_j)``, columns in the given frequency order."""
    freq = np.asarray([_as_frequency(k) for k in frequencies], dtype=float)
    if freq.size == 0:
        return np.zeros((samples.count, 0), dtype=complex)
    phases = samples.points @ freq.T
    return np.exp(1j * phases)


# ---------------------------------------------------------------------------
# JSON interchange
#
# One document carries a polynomial, a sampling set, or both:
# {"q": .., "d": .., "coeffs": [{"k": [..], "re": .., "im": ..}],
#  "points": [[..]], "seed": ..}


def instance_to_json(poly: SparseTrigPoly | None = None,
                     samples: SamplingSet | None = None) -> str:
    if poly is None and samples is None:
        raise ValueError("nothing to serialize")
    doc = {}
    if poly is not None:
        doc["q"] = poly.grid.q
        doc["d"] = poly.grid.d
        doc["coeffs"] = [
            {"k": list(k), "re": poly.coeffs[k].real, "im": poly.coeffs[k].imag}
            for k in poly.sorted_support()
        ]
    if samples is not None:
        doc["points"] = [list(row) for row in samples.points]
        doc["seed"] = samples.seed
    return json.dumps(doc)


def instance_from_json(text: str, grid: FrequencyGrid | None = None):
    """Parse a JSON document into ``(poly, samples)``; either may be None
    when its fields are absent.  ``grid`` overrides the document's grid for
    samples-only documents."""
    doc = json.loads(text)
    poly = None
    if "coeffs" in doc:
        g = FrequencyGrid(q=int(doc["q"]), d=int(doc["d"]))
        coeffs = {
            tuple(int(c) for c in entry["k"]): complex(entry["re"], entry["im"])
            for entry in doc["coeffs"]
        }
        poly = SparseTrigPoly(grid=g, coeffs=coeffs)
    samples = None
    if "points" in doc:
        samples = SamplingSet(
            points=np.asarray(doc["points"], dtype=float),
            seed=int(doc.get("seed", -1)),
        )
    return poly, samples
