"""Fidelities, trace distance, Petz quasi-entropies and the x**alpha weight functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, QuadratureDivergence
from .numkernel import (
    as_matrix,
    kron,
    matrix_function,
    schatten_norm,
)
from .states import PositiveOperator, as_positive, canonical_purification

SPECTRAL = "spectral"
PURIFICATION = "purification"
QUADRATURE = "quadrature"


@dataclass(frozen=True)
class AlphaParameter:
    alpha: float

    def __post_init__(self):
        if not 0.0 < float(self.alpha) < 1.0:
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {self.alpha}")

    def __float__(self):
        return float(self.alpha)


def _alpha(alpha) -> float:
    return float(AlphaParameter(float(alpha)))


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre rule for the integral defining ``nu(X)``.

    ``scheme="log"`` integrates over ``y = ln t`` between cut-offs chosen so the
    analytic tail bounds stay below ``tail_tol`` relative to ``lam_min**alpha``.
    ``scheme="sqrt"`` substitutes ``t = u**2`` on ``[0, truncation_upper * ||X||]``
    and reports the (often large) tail bound beyond it.
    """

    node_count: int = 64
    nodes_per_panel: int = 16
    truncation_upper: float | None = None
    scheme: str = "log"
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.node_count < 8:
            raise ValueError("node_count must be at least 8")
        if self.truncation_upper is not None and self.truncation_upper <= 1:
            raise ValueError("truncation_upper must exceed 1")
        if self.scheme not in ("log", "sqrt"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


def holevo_fidelity(rho, sigma) -> tuple[float, float]:
    """Return ``(Tr{sqrt(rho) sqrt(sigma)}, its square)``."""
    rho, sigma = as_positive(rho), as_positive(sigma)
    root = float(np.real(np.trace(rho.sqrt() @ sigma.sqrt())))
    return root, root**2


def uhlmann_fidelity(rho, sigma) -> float:
    rho, sigma = as_positive(rho), as_positive(sigma)
    return schatten_norm(rho.sqrt() @ sigma.sqrt(), "trace") ** 2


def trace_distance(rho, sigma) -> float:
    return 0.5 * schatten_norm(as_matrix(rho) - as_matrix(sigma), "trace")


def _require_pd(sigma: PositiveOperator) -> PositiveOperator:
    if not sigma.strictly_positive:
        raise NotPositiveDefinite(
            f"quasi-entropy needs a positive definite sigma (min eigenvalue {sigma.min_eigenvalue:.3e})"
        )
    return sigma


def quasi_entropy_alpha(rho, sigma, alpha, route: str = SPECTRAL) -> float:
    """Petz quasi-entropy for ``f(x) = -x**alpha``.

    The spectral route evaluates ``-sum_ij q_i |<i|j>|^2 (p_j/q_i)**alpha`` over
    the eigenpairs of sigma (``q_i``) and rho (``p_j``).  The purification route
    evaluates ``<phi^sigma| f(sigma^{-1} (x) rho^T) |phi^sigma>`` directly.
    """
    a = _alpha(alpha)
    rho, sigma = as_positive(rho), _require_pd(as_positive(sigma))
    if route == SPECTRAL:
        q, U = sigma.eig
        p, W = rho.eig
        p = np.where(p > rho.support_threshold * max(rho.max_eigenvalue, 0.0), p, 0.0)
        overlap = np.abs(U.conj().T @ W) ** 2
        keep = q > sigma.support_threshold * sigma.max_eigenvalue
        terms = q[keep, None] ** (1 - a) * p[None, :] ** a * overlap[keep]
        return -float(np.sum(terms))
    if route == PURIFICATION:
        delta = kron(sigma.inv(), rho.matrix.T)
        f_delta = matrix_function(delta, lambda x: -(x**a), psd=True)
        phi = canonical_purification(sigma).vector
        return float(np.real(phi.conj() @ f_delta @ phi))
    raise ValueError(f"unknown route {route!r}")


def nu_alpha(X, alpha, route: str = SPECTRAL, quad: QuadratureConfig | None = None) -> np.ndarray:
    """``nu(X) = int dmu(t) t (1/t - (t + X)^{-1})`` for ``dmu = sin(a pi)/pi t^(a-1) dt``, i.e. ``X**alpha``."""
    a = _alpha(alpha)
    X = as_matrix(X)
    op = PositiveOperator(X)
    if route == SPECTRAL:
        return op.power(a)
    if route == QUADRATURE:
        if not op.strictly_positive:
            raise NotPositiveDefinite("quadrature route needs a positive definite X")
        return _nu_quadrature(op.matrix, a, quad or QuadratureConfig())
    raise ValueError(f"unknown route {route!r}")


def _gauss_panels(lo: float, hi: float, panels: int, per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _resolvent_term(X: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Stack of ``X (t + X)^{-1}`` for each ``t``."""
    d = X.shape[0]
    shifted = X[None, :, :] + t[:, None, None] * np.eye(d)[None, :, :]
    return np.linalg.solve(shifted, np.broadcast_to(X, shifted.shape))


def _nu_quadrature(X: np.ndarray, a: float, quad: QuadratureConfig) -> np.ndarray:
    c = math.sin(a * math.pi) / math.pi
    norm = float(np.linalg.norm(X, 2))
    lam_min = 1.0 / float(np.linalg.norm(np.linalg.inv(X), 2))
    target = quad.tail_tol * lam_min**a
    if quad.scheme == "log":
        # Integrand in y = ln t: c * e^{a y} X (e^y + X)^{-1}.  Tails:
        #   y < y0:  <= c e^{a y0} / a
        #   y > y1:  <= c ||X|| e^{(a-1) y1} / (1 - a)
        y0 = math.log(0.5 * target * a / c) / a
        if quad.truncation_upper is not None:
            y1 = math.log(quad.truncation_upper * norm)
        else:
            y1 = math.log(0.5 * target * (1 - a) / (c * norm)) / (a - 1)
        tail = c * math.exp(a * y0) / a + c * norm * math.exp((a - 1) * y1) / (1 - a)
        y, w = _gauss_panels(y0, y1, quad.node_count, quad.nodes_per_panel)
        t = np.exp(y)
        weights = c * w * t**a
    else:
        t_max = (quad.truncation_upper or 1e4) * norm
        # t = u^2, dt = 2u du: integrand 2 c u^{2a-1} X (u^2 + X)^{-1}
        u, w = _gauss_panels(0.0, math.sqrt(t_max), quad.node_count, quad.nodes_per_panel)
        t = u**2
        weights = 2 * c * w * u ** (2 * a - 1)
        tail = c * norm * t_max ** (a - 1) / (1 - a)
    if tail > target * (1 + 1e-9):
        raise QuadratureDivergence(
            f"tail bound {tail:.3e} exceeds tolerance {target:.3e}"
        )
    terms = _resolvent_term(X, t)
    out = np.einsum("k,kij->ij", weights, terms)
    return 0.5 * (out + out.conj().T)


def mu_mass(alpha, T: float) -> float:
    """``mu([0, T]) = sin(a pi)/(a pi) * T**a``."""
    a = _alpha(alpha)
    return math.sin(a * math.pi) / (a * math.pi) * T**a


def g_bound(alpha, c: float, T: float) -> float:
    """Upper bound ``sin(a pi) c / (pi T**(1-a) (1-a))`` on ``int_T^inf dmu(t) / (1 + t/c)``."""
    a = _alpha(alpha)
    return math.sin(a * math.pi) * c / (math.pi * T ** (1 - a) * (1 - a))


def weight_functions(alpha, T: float, c: float) -> tuple[float, float]:
    if T <= 0 or c <= 0:
        raise ValueError("T and c must be positive")
    return mu_mass(alpha, T), g_bound(alpha, c, T)
