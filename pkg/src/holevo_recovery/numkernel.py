"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Composite
systems use the row-major index convention: for systems ordered ``(A, B)``
the basis vector ``|a>|b>`` sits at index ``a * d_B + b``, which is exactly
what :func:`numpy.kron` produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConvergenceFailure,
    DomainError,
    LabelMismatch,
    NotHermitian,
    ShapeMismatch,
)

SUPPORT_THRESHOLD = 1e-12
CLIP_TOL = 1e-10
HERMITICITY_TOL = 1e-9


@dataclass(frozen=True)
class BipartiteShape:
    """Factorisation ``d = dim_a * dim_b`` of a composite space."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise ShapeMismatch(f"dimensions must be positive, got {self}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def check(self, M: np.ndarray) -> None:
        if M.shape != (self.dim, self.dim):
            raise ShapeMismatch(
                f"operator of shape {M.shape} does not match {self.dim_a}x{self.dim_b}"
            )


class HermitianEigensystem(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        lam = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return (U * lam) @ U.conj().T


def as_matrix(X) -> np.ndarray:
    """Return the underlying complex array of ``X``.

    Accepts bare arrays as well as the operator wrappers from
    :mod:`holevo_recovery.states` (anything with a ``matrix`` attribute).
    """
    X = getattr(X, "matrix", X)
    X = np.asarray(X, dtype=complex)
    if not np.all(np.isfinite(X)):
        raise DomainError("matrix has non-finite entries")
    return X


def dagger(X: np.ndarray) -> np.ndarray:
    return X.conj().T


def hermiticity_defect(H: np.ndarray) -> float:
    return float(np.max(np.abs(H - H.conj().T), initial=0.0))


def hermitize(H, hermiticity_tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Symmetrise ``H`` to ``(H + H^dag)/2`` after checking it is nearly Hermitian."""
    H = as_matrix(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
    if hermiticity_defect(H) > hermiticity_tol * scale:
        raise NotHermitian(
            f"max |H - H^dag| = {hermiticity_defect(H):.3e} exceeds tolerance"
        )
    return 0.5 * (H + H.conj().T)


def hermitian_eig(H, hermiticity_tol: float = HERMITICITY_TOL) -> HermitianEigensystem:
    H = hermitize(H, hermiticity_tol)
    try:
        w, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return HermitianEigensystem(w, U)


def matrix_function(
    H,
    f: Callable[[np.ndarray], np.ndarray],
    support_threshold: float = SUPPORT_THRESHOLD,
    *,
    support_only: bool = False,
    psd: bool = False,
    clip_tol: float = CLIP_TOL,
    eig: HermitianEigensystem | None = None,
) -> np.ndarray:
    """Apply the real function ``f`` to the spectrum of a Hermitian matrix.

    Args:
        H: Hermitian matrix.
        f: vectorised scalar function.
        support_threshold: eigenvalues with ``|lam| <= support_threshold * lam_max``
            count as zero.
        support_only: evaluate ``f`` only on eigenvalues above the threshold
            and put 0 on the complement (for functions undefined at 0 such
            as ``x**-0.5``).
        psd: treat ``H`` as positive semi-definite; eigenvalues in
            ``[-clip_tol * lam_max, 0)`` are clipped to 0 and numerically zero
            eigenvalues are set exactly to 0.
        eig: precomputed eigensystem of ``H``.

    Raises:
        DomainError: if a negative eigenvalue lies below the allowed noise floor.
    """
    if eig is None:
        eig = hermitian_eig(H)
    lam = eig.eigenvalues.copy()
    scale = float(np.max(np.abs(lam), initial=0.0))
    if psd:
        if np.any(lam < -clip_tol * scale):
            raise DomainError(
                f"PSD input has eigenvalue {lam.min():.3e} below -{clip_tol:g}*lam_max"
            )
        lam[lam <= support_threshold * scale] = 0.0
    if support_only:
        if np.any(lam < -support_threshold * scale):
            raise DomainError(
                f"function evaluated on negative eigenvalue {lam.min():.3e}"
            )
        on = lam > support_threshold * scale
        out = np.zeros_like(lam)
        out[on] = f(lam[on])
    else:
        out = np.asarray(f(lam), dtype=float)
    if not np.all(np.isfinite(out)):
        raise DomainError("matrix function produced non-finite values")
    return eig.reconstruct(out)


def psd_power(H, p: float, support_threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    """``H**p`` for PSD ``H``; non-positive powers are taken on the support only."""
    return matrix_function(
        H, lambda x: x**p, support_threshold, support_only=True, psd=True
    )


def psd_sqrt(H, support_threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    return psd_power(H, 0.5, support_threshold)


def psd_inv_sqrt(H, support_threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    return psd_power(H, -0.5, support_threshold)


def psd_inv(H, support_threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    return psd_power(H, -1.0, support_threshold)


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not mats:
        raise ShapeMismatch("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def partial_trace(M, shape: BipartiteShape, traced_system: str = "B") -> np.ndarray:
    M = as_matrix(M)
    shape.check(M)
    T = M.reshape(shape.dim_a, shape.dim_b, shape.dim_a, shape.dim_b)
    if traced_system == "B":
        return np.einsum("ibjb->ij", T)
    if traced_system == "A":
        return np.einsum("aiaj->ij", T)
    raise ValueError(f"traced_system must be 'A' or 'B', got {traced_system!r}")


def permute_systems(
    x,
    current_order: Sequence,
    target_order: Sequence,
    dims: Sequence[int],
) -> np.ndarray:
    """Reorder the tensor factors of a vector or square matrix.

    ``dims[k]`` is the dimension of system ``current_order[k]``.
    """
    current_order = list(current_order)
    target_order = list(target_order)
    if (
        len(set(current_order)) != len(current_order)
        or sorted(map(str, current_order)) != sorted(map(str, target_order))
        or len(target_order) != len(current_order)
    ):
        raise LabelMismatch(f"{target_order} is not a permutation of {current_order}")
    if len(dims) != len(current_order):
        raise LabelMismatch("need one dimension per system label")
    x = np.asarray(x, dtype=complex)
    total = int(np.prod(dims))
    perm = [current_order.index(label) for label in target_order]
    n = len(dims)
    if x.ndim == 1:
        if x.shape[0] != total:
            raise ShapeMismatch(f"vector of length {x.shape[0]} vs dims {list(dims)}")
        return x.reshape(dims).transpose(perm).reshape(total)
    if x.shape != (total, total):
        raise ShapeMismatch(f"matrix of shape {x.shape} vs dims {list(dims)}")
    T = x.reshape(list(dims) * 2).transpose(perm + [p + n for p in perm])
    return T.reshape(total, total)


def singular_values(X) -> np.ndarray:
    X = as_matrix(X)
    try:
        return np.linalg.svd(X, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def schatten_norm(X, kind: str = "trace") -> float:
    s = singular_values(X)
    if kind == "trace":
        return float(np.sum(s))
    if kind == "hilbert_schmidt":
        return float(np.sqrt(np.sum(s**2)))
    if kind == "operator":
        return float(np.max(s, initial=0.0))
    raise ValueError(f"unknown norm kind {kind!r}")


def polar_unitary(X) -> np.ndarray:
    """Unitary ``U`` with ``Tr(X U^dag) = ||X||_1`` (the unitary polar factor of ``X``)."""
    X = as_matrix(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {X.shape}")
    try:
        W, _, Vh = np.linalg.svd(X)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return W @ Vh
