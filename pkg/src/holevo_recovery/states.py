"""Density operators, positive operators and random instance generation."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BadRank, NotPositiveDefinite, NotPSD, ShapeMismatch
from .numkernel import (
    CLIP_TOL,
    SUPPORT_THRESHOLD,
    HermitianEigensystem,
    as_matrix,
    hermitian_eig,
    hermitize,
)

PSD_TOL = 1e-10
TRACE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PositiveOperator:
    """Hermitian positive semi-definite matrix, not necessarily of unit trace."""

    matrix: np.ndarray
    support_threshold: float = field(default=SUPPORT_THRESHOLD, repr=False)

    def __post_init__(self):
        M = hermitize(self.matrix)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        lam = self.eig.eigenvalues
        if lam.size and lam[0] < -PSD_TOL * max(1.0, abs(lam[-1])):
            raise NotPSD(f"minimum eigenvalue {lam[0]:.3e} is negative")

    @cached_property
    def eig(self) -> HermitianEigensystem:
        return hermitian_eig(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eig.eigenvalues[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eig.eigenvalues[-1])

    @property
    def _cutoff(self) -> float:
        return self.support_threshold * max(abs(self.max_eigenvalue), 0.0)

    @property
    def rank(self) -> int:
        return int(np.sum(self.eig.eigenvalues > self._cutoff))

    @property
    def strictly_positive(self) -> bool:
        return self.rank == self.dim and self.min_eigenvalue > 0

    @property
    def min_nonzero_eigenvalue(self) -> float:
        lam = self.eig.eigenvalues
        nz = lam[lam > self._cutoff]
        if nz.size == 0:
            raise NotPSD("operator is numerically zero")
        return float(nz[0])

    def power(self, p: float) -> np.ndarray:
        """``M**p``; non-positive powers are restricted to the support."""
        return _cached_power(self, p)

    def sqrt(self) -> np.ndarray:
        return self.power(0.5)

    def inv_sqrt(self) -> np.ndarray:
        return self.power(-0.5)

    def inv(self) -> np.ndarray:
        return self.power(-1.0)

    def require_strictly_positive(self) -> "PositiveOperator":
        if not self.strictly_positive:
            raise NotPositiveDefinite(
                f"operator is singular (min eigenvalue {self.min_eigenvalue:.3e})"
            )
        return self

    def scaled(self, c: float) -> "PositiveOperator":
        return PositiveOperator(c * self.matrix, self.support_threshold)


def _cached_power(op: PositiveOperator, p: float) -> np.ndarray:
    cache = op.__dict__.setdefault("_powers", {})
    if p not in cache:
        from .numkernel import matrix_function

        out = matrix_function(
            op.matrix,
            lambda x: x**p,
            op.support_threshold,
            support_only=True,
            psd=True,
            clip_tol=CLIP_TOL,
            eig=op.eig,
        )
        out.setflags(write=False)
        cache[p] = out
    return cache[p]


@dataclass(frozen=True, eq=False)
class DensityOperator(PositiveOperator):
    """Positive operator with unit trace."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.trace - 1.0) > TRACE_TOL:
            raise NotPSD(f"density operator must have unit trace, got {self.trace!r}")


def as_positive(X) -> PositiveOperator:
    if isinstance(X, PositiveOperator):
        return X
    return PositiveOperator(as_matrix(X))


def as_density(X) -> DensityOperator:
    if isinstance(X, DensityOperator):
        return X
    return DensityOperator(as_matrix(X))


@dataclass(frozen=True, eq=False)
class PurifiedVector:
    vector: np.ndarray
    base_dim: int


# -- random generation -----------------------------------------------------


def derive_seed(master_seed: int, *keys: int) -> int:
    """Deterministic 64-bit seed for the ``keys``-indexed child of ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed) % 2**64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def tag_key(tag: str) -> int:
    return zlib.crc32(tag.encode())


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) seeded from an int or a tuple of ints."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        ss = np.random.SeedSequence([int(s) % 2**64 for s in seed])
    else:
        ss = np.random.SeedSequence(int(seed) % 2**64)
    return np.random.Generator(np.random.Philox(ss))


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(dim: int, rank: int | None = None, seed=0) -> DensityOperator:
    """Hilbert-Schmidt induced random state ``G G^dag / Tr(G G^dag)`` with ``G`` of size dim x rank."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise BadRank(f"rank must lie in [1, {dim}], got {rank}")
    rng = make_rng(seed)
    G = ginibre(dim, rank, rng)
    rho = G @ G.conj().T
    return DensityOperator(rho / np.real(np.trace(rho)))


def random_positive(dim: int, seed=0, scale_range=(0.5, 2.0), epsilon: float | None = None) -> PositiveOperator:
    """Full-rank random state rescaled by a log-uniform factor, optionally regularised."""
    rng = make_rng(seed)
    rho = random_density(dim, dim, rng)
    sigma: PositiveOperator = rho
    if epsilon is not None:
        sigma = regularize_pd(sigma, epsilon)
    lo, hi = scale_range
    c = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
    return sigma.scaled(c)


def random_unitary(dim: int, seed=0) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    rng = make_rng(seed)
    Q, R = np.linalg.qr(ginibre(dim, dim, rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def regularize_pd(sigma, epsilon: float) -> PositiveOperator:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    sigma = as_positive(sigma)
    d = sigma.dim
    M = (1 - epsilon) * sigma.matrix + epsilon * sigma.trace * np.eye(d) / d
    return PositiveOperator(M, sigma.support_threshold)


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalised ``sum_i |i>|i>``; reshaping to d x d gives the identity."""
    if d < 1:
        raise ShapeMismatch("dimension must be positive")
    return np.eye(d, dtype=complex).reshape(d * d)


def canonical_purification(sigma) -> PurifiedVector:
    sigma = as_positive(sigma)
    d = sigma.dim
    # (S (x) I)|Gamma> is the row-major vectorisation of S.
    vec = np.ascontiguousarray(sigma.sqrt()).reshape(d * d).copy()
    return PurifiedVector(vec, d)
