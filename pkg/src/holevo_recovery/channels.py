"""Kraus-form channels, Stinespring dilations and Petz recovery maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidChannel, ShapeMismatch
from .numkernel import (
    SUPPORT_THRESHOLD,
    BipartiteShape,
    as_matrix,
    hermitian_eig,
    partial_trace,
    permute_systems,
    schatten_norm,
)
from .states import PositiveOperator, as_positive, ginibre, make_rng, max_entangled_vector

TP_TOL = 1e-9
ISOMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausMap:
    """Completely positive map ``X -> sum_i K_i X K_i^dag``."""

    kraus_operators: tuple

    def __post_init__(self):
        ks = tuple(np.asarray(K, dtype=complex) for K in self.kraus_operators)
        if not ks:
            raise InvalidChannel("need at least one Kraus operator")
        shape = ks[0].shape
        if len(shape) != 2 or any(K.shape != shape for K in ks):
            raise InvalidChannel("Kraus operators must be matrices of equal shape")
        object.__setattr__(self, "kraus_operators", ks)

    @property
    def in_dim(self) -> int:
        return self.kraus_operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus_operators[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_operators)

    def __call__(self, X) -> np.ndarray:
        return apply_channel(self, X)

    def adjoint(self, Y) -> np.ndarray:
        return adjoint_apply(self, Y)

    def trace_defect(self) -> float:
        K = self.stacked
        S = np.einsum("kji,kjl->il", K.conj(), K)
        return schatten_norm(S - np.eye(self.in_dim), "operator")


@dataclass(frozen=True, eq=False)
class QuantumChannel(KrausMap):
    """Trace-preserving :class:`KrausMap`."""

    def __post_init__(self):
        super().__post_init__()
        defect = self.trace_defect()
        if defect > TP_TOL:
            raise InvalidChannel(f"sum K^dag K deviates from identity by {defect:.3e}")


@dataclass(frozen=True, eq=False)
class Isometry:
    matrix: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.matrix, dtype=complex)
        big, small = V.shape
        if big < small:
            raise ShapeMismatch(f"isometry cannot map {small} dims into {big}")
        object.__setattr__(self, "matrix", V)

    @property
    def defect(self) -> float:
        V = self.matrix
        return float(np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))))


class CPTPReport(NamedTuple):
    trace_defect: float
    choi_min_eigenvalue: float
    passed: bool


def _check_input(channel: KrausMap, X, dim: int) -> np.ndarray:
    X = as_matrix(X)
    if X.shape != (dim, dim):
        raise ShapeMismatch(f"expected a {dim}x{dim} operator, got {X.shape}")
    return X


def apply_channel(channel: KrausMap, X) -> np.ndarray:
    X = _check_input(channel, X, channel.in_dim)
    K = channel.stacked
    return np.einsum("kij,jl,kml->im", K, X, K.conj())


def adjoint_apply(channel: KrausMap, Y) -> np.ndarray:
    Y = _check_input(channel, Y, channel.out_dim)
    K = channel.stacked
    return np.einsum("kji,jl,klm->im", K.conj(), Y, K)


def choi_matrix(channel: KrausMap) -> np.ndarray:
    """``sum_ij |i><j| (x) N(|i><j|)`` ordered (input, output)."""
    # Row-major vec of K^T over (in, out) gives the (I (x) K)|Gamma> vector.
    vecs = np.stack([K.T.reshape(-1) for K in channel.kraus_operators])
    return vecs.T @ vecs.conj()


def validate_cptp(channel: KrausMap, tol: float = 1e-8) -> CPTPReport:
    defect = channel.trace_defect()
    lam_min = float(hermitian_eig(choi_matrix(channel)).eigenvalues[0])
    return CPTPReport(defect, lam_min, defect <= tol and lam_min >= -tol)


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel((np.eye(d),))


def partial_trace_channel(shape: BipartiteShape, traced_system: str = "B") -> QuantumChannel:
    """Kraus form ``{I_A (x) <b|}_b`` of the partial trace."""
    if traced_system == "A":
        eye = np.eye(shape.dim_b)
        return QuantumChannel(tuple(np.kron(e[None, :], eye) for e in np.eye(shape.dim_a)))
    eye = np.eye(shape.dim_a)
    return QuantumChannel(tuple(np.kron(eye, e[None, :]) for e in np.eye(shape.dim_b)))


def random_channel(in_dim: int, out_dim: int, n_kraus: int, seed=0) -> QuantumChannel:
    """Channel whose Stinespring isometry is the first ``in_dim`` columns of a Haar unitary."""
    rng = make_rng(seed)
    big = out_dim * n_kraus
    if big < in_dim:
        raise InvalidChannel("out_dim * n_kraus must be at least in_dim")
    Q, R = np.linalg.qr(ginibre(big, in_dim, rng))
    d = np.diag(R)
    U = Q * (d / np.abs(d))
    kraus = U.reshape(out_dim, n_kraus, in_dim).transpose(1, 0, 2)
    return QuantumChannel(tuple(kraus))


def stinespring_isometry(channel: KrausMap) -> Isometry:
    """``U|psi> = sum_i K_i|psi> (x) |i>_E`` with environment dimension = number of Kraus operators."""
    report = validate_cptp(channel, 1e-8)
    if not report.passed:
        raise InvalidChannel(f"not CPTP: {report}")
    U = channel.stacked.transpose(1, 0, 2).reshape(
        channel.out_dim * len(channel.kraus_operators), channel.in_dim
    )
    return Isometry(U)


def _marginal_a(sigma_AB: PositiveOperator, shape: BipartiteShape) -> PositiveOperator:
    shape.check(sigma_AB.matrix)
    return PositiveOperator(partial_trace(sigma_AB.matrix, shape, "B"), sigma_AB.support_threshold)


def petz_partial_trace_map(sigma_AB, shape: BipartiteShape) -> KrausMap:
    """Petz map for ``Tr_B`` without a definiteness requirement.

    Inverse square roots are support restricted, so on a singular ``sigma_AB``
    the result is trace preserving only on the support of ``sigma_A``.
    """
    sigma_AB = as_positive(sigma_AB)
    sigma_A = _marginal_a(sigma_AB, shape)
    left = sigma_AB.sqrt()
    right = sigma_A.inv_sqrt()
    kraus = []
    for e in np.eye(shape.dim_b):
        # sigma_AB^{1/2} (sigma_A^{-1/2} (x) |b>)
        kraus.append(left @ np.kron(right, e[:, None]))
    return KrausMap(tuple(kraus))


def petz_recovery_partial_trace(sigma_AB, shape: BipartiteShape) -> QuantumChannel:
    """Petz recovery channel ``A -> AB`` for ``sigma_AB`` and the partial trace over ``B``."""
    sigma_AB = as_positive(sigma_AB).require_strictly_positive()
    return QuantumChannel(petz_partial_trace_map(sigma_AB, shape).kraus_operators)


def petz_action_partial_trace(sigma_AB, shape: BipartiteShape, X) -> np.ndarray:
    """Superoperator form ``sigma_AB^{1/2}[sigma_A^{-1/2} X sigma_A^{-1/2} (x) I_B]sigma_AB^{1/2}``."""
    sigma_AB = as_positive(sigma_AB)
    sigma_A = _marginal_a(sigma_AB, shape)
    s = sigma_AB.sqrt()
    r = sigma_A.inv_sqrt()
    return s @ np.kron(r @ as_matrix(X) @ r, np.eye(shape.dim_b)) @ s


def gamma_embedding(shape: BipartiteShape) -> np.ndarray:
    """Matrix of ``|a, a'> -> |a> (x) |Gamma>_{B B'} (x) |a'>`` ordered ``(A, B, A', B')``."""
    dA, dB = shape.dim_a, shape.dim_b
    cols = []
    gamma_b = max_entangled_vector(dB)
    for a in range(dA):
        for ap in range(dA):
            v = np.kron(np.kron(np.eye(dA)[a], np.eye(dA)[ap]), gamma_b)  # (A, A', B, B')
            cols.append(permute_systems(v, "A a B b".split(), "A B a b".split(), [dA, dA, dB, dB]))
    return np.stack(cols, axis=1)


def petz_isometric_extension_V(sigma_AB, shape: BipartiteShape) -> Isometry:
    """``V = sigma_AB^{1/2} (sigma_A^{-1/2} (x) I_A') |Gamma>_{B B'}``, domain (A, A'), codomain (A, B, A', B')."""
    sigma_AB = as_positive(sigma_AB).require_strictly_positive()
    sigma_A = _marginal_a(sigma_AB, shape)
    dA, dB = shape.dim_a, shape.dim_b
    left = np.kron(sigma_AB.sqrt(), np.eye(dA * dB))
    right = np.kron(sigma_A.inv_sqrt(), np.eye(dA))
    return Isometry(left @ gamma_embedding(shape) @ right)


def petz_recovery_general(tau, channel: KrausMap, support_threshold: float = SUPPORT_THRESHOLD) -> KrausMap:
    """Petz map ``Y -> tau^{1/2} N^dag[N(tau)^{-1/2} Y N(tau)^{-1/2}] tau^{1/2}``.

    Kraus operators are ``tau^{1/2} K_i^dag N(tau)^{-1/2}``; the map is trace
    preserving on the support of ``N(tau)``.
    """
    tau = as_positive(tau)
    if tau.dim != channel.in_dim:
        raise ShapeMismatch(f"tau has dimension {tau.dim}, channel expects {channel.in_dim}")
    n_tau = PositiveOperator(apply_channel(channel, tau.matrix), support_threshold)
    left = tau.sqrt()
    right = n_tau.inv_sqrt()
    return KrausMap(tuple(left @ K.conj().T @ right for K in channel.kraus_operators))


def dephasing_channel(p: float) -> QuantumChannel:
    Z = np.diag([1.0, -1.0])
    return QuantumChannel((np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * Z))

