"""Recoverability bounds for the Holevo fidelity and their numerical certificates.

Every check returns a :class:`BoundReport` whose ``slack`` is ``rhs - lhs`` of
the binding inequality; a check passes iff ``slack >= -tol``.  Equality-type
checks are phrased the same way with ``lhs`` a deviation and ``rhs`` the
allowed deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    KrausMap,
    apply_channel,
    petz_isometric_extension_V,
    petz_partial_trace_map,
    petz_recovery_general,
    petz_recovery_partial_trace,
    stinespring_isometry,
    validate_cptp,
)
from .divergences import (
    SPECTRAL,
    QuadratureConfig,
    holevo_fidelity,
    nu_alpha,
    quasi_entropy_alpha,
    weight_functions,
)
from .errors import NegativeGap, NotPositiveDefinite, SupportViolation, ZeroGap
from .numkernel import (
    BipartiteShape,
    kron,
    partial_trace,
    permute_systems,
    schatten_norm,
)
from .states import (
    PositiveOperator,
    as_density,
    as_positive,
    canonical_purification,
    max_entangled_vector,
)

TWO_NORM_CONSTANT = math.pi**2 / 54
TRACE_NORM_CONSTANT = math.pi**2 / 432
GAP_FLOOR = 1e-12
NEGATIVE_GAP_TOL = 1e-9
VACUOUS_REMAINDER = 1e-8
DEFAULT_TOL = 1e-9


@dataclass
class BoundReport:
    lhs: float
    rhs: float
    slack: float
    passed: bool
    components: dict = field(default_factory=dict)

    @classmethod
    def from_sides(cls, sides, tol: float = DEFAULT_TOL, components=None, extra_ok: bool = True):
        """Build a report from ``{name: (lhs, rhs)}``; the smallest ``rhs - lhs`` binds."""
        components = dict(components or {})
        slacks = {name: rhs - lhs for name, (lhs, rhs) in sides.items()}
        binding = min(slacks, key=slacks.get)
        for name, s in slacks.items():
            components[f"slack_{name}"] = s
        lhs, rhs = sides[binding]
        slack = rhs - lhs
        return cls(float(lhs), float(rhs), float(slack), bool(slack >= -tol and extra_ok), components)


@dataclass
class DeltaPair:
    delta_big: np.ndarray
    delta_small: np.ndarray
    op_norm_big: float
    op_norm_small: float


@dataclass
class _Bipartite:
    """Cached marginals and matrix powers for one ``(rho_AB, sigma_AB)`` instance."""

    rho_AB: PositiveOperator
    sigma_AB: PositiveOperator
    shape: BipartiteShape
    rho_A: PositiveOperator = field(init=False)
    sigma_A: PositiveOperator = field(init=False)

    def __post_init__(self):
        self.shape.check(self.rho_AB.matrix)
        self.shape.check(self.sigma_AB.matrix)
        self.rho_A = PositiveOperator(partial_trace(self.rho_AB.matrix, self.shape))
        self.sigma_A = PositiveOperator(
            partial_trace(self.sigma_AB.matrix, self.shape), self.sigma_AB.support_threshold
        )
        if abs(self.sigma_A.trace - self.sigma_AB.trace) > 1e-12 * max(1.0, self.sigma_AB.trace):
            raise ArithmeticError("partial trace changed the trace of sigma")


def _instance(rho_AB, sigma_AB, shape: BipartiteShape, *, pd: bool = True) -> _Bipartite:
    sigma = as_positive(sigma_AB)
    if pd and not sigma.strictly_positive:
        raise NotPositiveDefinite(f"sigma_AB is singular (min eigenvalue {sigma.min_eigenvalue:.3e})")
    return _Bipartite(as_density(rho_AB), sigma, shape)


def build_delta_operators(rho_AB, sigma_AB, shape: BipartiteShape) -> DeltaPair:
    """``sigma_AB^{-1} (x) rho_AB^T`` on (A, B, A', B') and ``sigma_A^{-1} (x) rho_A^T`` on (A, A')."""
    inst = _instance(rho_AB, sigma_AB, shape)
    return _deltas(inst)


def _deltas(inst: _Bipartite) -> DeltaPair:
    big = kron(inst.sigma_AB.inv(), inst.rho_AB.matrix.T)
    small = kron(inst.sigma_A.inv(), inst.rho_A.matrix.T)
    return DeltaPair(big, small, schatten_norm(big, "operator"), schatten_norm(small, "operator"))


def gamma_abab(shape: BipartiteShape) -> np.ndarray:
    """``|Gamma>_{A A'} (x) |Gamma>_{B B'}`` reordered to (A, B, A', B')."""
    dA, dB = shape.dim_a, shape.dim_b
    v = kron(max_entangled_vector(dA), max_entangled_vector(dB))
    return permute_systems(v, "A a B b".split(), "A B a b".split(), [dA, dA, dB, dB])


def _embed_small(M: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    """``M_{A A'} (x) I_{B B'}`` as an operator on (A, B, A', B')."""
    dA, dB = shape.dim_a, shape.dim_b
    full = kron(M, np.eye(dB * dB))
    return permute_systems(full, "A a B b".split(), "A B a b".split(), [dA, dA, dB, dB])


def q_gap(inst: _Bipartite, alpha) -> float:
    """``Q_alpha(rho_AB||sigma_AB) - Q_alpha(rho_A||sigma_A)``, clipped at 0 within tolerance."""
    gap = quasi_entropy_alpha(inst.rho_AB, inst.sigma_AB, alpha) - quasi_entropy_alpha(
        inst.rho_A, inst.sigma_A, alpha
    )
    if gap < -NEGATIVE_GAP_TOL:
        raise NegativeGap(f"quasi-entropy difference {gap:.3e} is negative")
    return max(gap, 0.0)


def _lemma1_rhs(alpha, T: float, gap: float, norm_big: float, tr_sigma_a: float) -> tuple[float, float, float]:
    mu, g = weight_functions(alpha, T, norm_big)
    return math.sqrt(mu) * math.sqrt(gap) + 2 * g * tr_sigma_a, mu, g


def lemma1_lhs(inst: _Bipartite, alpha, nu_route: str = SPECTRAL, quad: QuadratureConfig | None = None) -> float:
    """Two-norm of the lemma's operator difference applied to ``|Gamma>_{A A' B B'}``, built by direct embedding."""
    deltas = _deltas(inst)
    shape = inst.shape
    dA = shape.dim_a
    dAB = shape.dim
    nu_small = nu_alpha(deltas.delta_small, alpha, nu_route, quad)
    nu_big = nu_alpha(deltas.delta_big, alpha, nu_route, quad)
    sandwiched = kron(inst.sigma_A.inv_sqrt(), np.eye(dA)) @ nu_small @ kron(inst.sigma_A.sqrt(), np.eye(dA))
    sqrt_sigma_ab = kron(inst.sigma_AB.sqrt(), np.eye(dAB))
    op = sqrt_sigma_ab @ _embed_small(sandwiched, shape) - nu_big @ sqrt_sigma_ab
    return float(np.linalg.norm(op @ gamma_abab(shape)))


def lemma1_check(
    rho_AB,
    sigma_AB,
    shape: BipartiteShape,
    alpha,
    T: float,
    tol: float = DEFAULT_TOL,
    nu_route: str = SPECTRAL,
    quad: QuadratureConfig | None = None,
) -> BoundReport:
    inst = _instance(rho_AB, sigma_AB, shape)
    deltas = _deltas(inst)
    lhs = lemma1_lhs(inst, alpha, nu_route, quad)
    gap = q_gap(inst, alpha)
    rhs, mu, g = _lemma1_rhs(alpha, T, gap, deltas.op_norm_big, inst.sigma_A.trace)
    vacuous = gap <= GAP_FLOOR
    return BoundReport.from_sides(
        {"lemma1": (lhs, rhs)},
        tol,
        dict(
            alpha=float(alpha), T=T, q_gap=gap, mu_mass=mu, g_bound=g,
            op_norm_big=deltas.op_norm_big, tr_sigma_a=inst.sigma_A.trace,
            vacuous=float(vacuous),
        ),
        extra_ok=not vacuous or lhs < VACUOUS_REMAINDER,
    )


def alpha_half_rhs(T: float, gap: float, norm_big: float, tr_sigma_a: float) -> float:
    """``(2/pi)^{1/2} T^{1/4} gap^{1/2} + 4 ||Delta|| Tr(sigma_A) / (pi T^{1/2})``."""
    return math.sqrt(2 / math.pi) * T**0.25 * math.sqrt(gap) + 4 * norm_big * tr_sigma_a / (math.pi * math.sqrt(T))


def optimal_T_from(gap: float, norm_big: float, tr_sigma_a: float) -> float:
    if gap <= GAP_FLOOR:
        raise ZeroGap(f"quasi-entropy gap {gap:.3e} is numerically zero; rhs decreases without bound in T")
    return (8 * norm_big * tr_sigma_a / (math.sqrt(2 * math.pi) * math.sqrt(gap))) ** (4 / 3)


def optimal_T(rho_AB, sigma_AB, shape: BipartiteShape) -> float:
    """Minimiser over ``T`` of the alpha = 1/2 right-hand side."""
    inst = _instance(rho_AB, sigma_AB, shape)
    return optimal_T_from(q_gap(inst, 0.5), _deltas(inst).op_norm_big, inst.sigma_A.trace)


def _main_scalars(inst: _Bipartite, recovery: KrausMap) -> dict:
    shape = inst.shape
    root_a, _ = holevo_fidelity(inst.rho_A, inst.sigma_A)
    root_ab, _ = holevo_fidelity(inst.rho_AB, inst.sigma_AB)
    X = inst.sigma_AB.sqrt() @ kron(inst.sigma_A.inv_sqrt() @ inst.rho_A.sqrt(), np.eye(shape.dim_b))
    two_norm = schatten_norm(X - inst.rho_AB.sqrt(), "hilbert_schmidt")
    recovered = apply_channel(recovery, inst.rho_A.matrix)
    trace_norm = schatten_norm(recovered - inst.rho_AB.matrix, "trace")
    return dict(
        root_fh_a=root_a,
        root_fh_ab=root_ab,
        fidelity_gap=root_a - root_ab,
        two_norm_remainder=two_norm,
        trace_norm_remainder=trace_norm,
        lambda_min=inst.sigma_AB.min_nonzero_eigenvalue,
        tr_sigma_a=inst.sigma_A.trace,
    )


def main_inequality_check(rho_AB, sigma_AB, shape: BipartiteShape, tol: float = DEFAULT_TOL) -> BoundReport:
    """Both cubic remainder forms of the refined data-processing inequality for ``Tr_B``."""
    inst = _instance(rho_AB, sigma_AB, shape)
    sc = _main_scalars(inst, petz_recovery_partial_trace(inst.sigma_AB, shape))
    ratio = sc["lambda_min"] / sc["tr_sigma_a"]
    a, b, c = sc["fidelity_gap"], sc["two_norm_remainder"], sc["trace_norm_remainder"]
    sc["op_norm_big"] = _deltas(inst).op_norm_big
    sc["two_norm_bound"] = TWO_NORM_CONSTANT * ratio * b**3
    sc["trace_norm_bound"] = TRACE_NORM_CONSTANT * ratio * c**3
    vacuous = a <= GAP_FLOOR
    sc["vacuous"] = float(vacuous)
    return BoundReport.from_sides(
        {
            "two_norm": (sc["two_norm_bound"], a),
            "trace_norm": (sc["trace_norm_bound"], a),
            "bridge": (c, 2 * b),
        },
        tol,
        sc,
        extra_ok=not vacuous or max(b, c) < VACUOUS_REMAINDER,
    )


def alpha_inequality_check(
    rho_AB, sigma_AB, shape: BipartiteShape, alpha, T: float, tol: float = DEFAULT_TOL
) -> BoundReport:
    """Closed-form x**alpha specialisation, with the left side built through the isometry V."""
    a = float(alpha)
    inst = _instance(rho_AB, sigma_AB, shape)
    deltas = _deltas(inst)
    V = petz_isometric_extension_V(inst.sigma_AB, shape).matrix
    phi_a = canonical_purification(inst.sigma_A).vector
    phi_ab = canonical_purification(inst.sigma_AB).vector
    vec = V @ (nu_alpha(deltas.delta_small, a) @ phi_a) - nu_alpha(deltas.delta_big, a) @ phi_ab
    lhs = float(np.linalg.norm(vec))
    gap = q_gap(inst, a)
    s = math.sin(a * math.pi)
    tr = inst.sigma_A.trace
    rhs = math.sqrt(s / (a * math.pi) * T**a) * math.sqrt(gap) + 2 * s * deltas.op_norm_big * tr / (
        math.pi * T ** (1 - a) * (1 - a)
    )
    vacuous = gap <= GAP_FLOOR
    return BoundReport.from_sides(
        {"alpha_bound": (lhs, rhs)},
        tol,
        dict(alpha=a, T=T, q_gap=gap, op_norm_big=deltas.op_norm_big, tr_sigma_a=tr, vacuous=float(vacuous)),
        extra_ok=not vacuous or lhs < VACUOUS_REMAINDER,
    )


def _support_projector(op: PositiveOperator) -> np.ndarray:
    lam, U = op.eig
    keep = lam > op.support_threshold * max(op.max_eigenvalue, 0.0)
    return U[:, keep] @ U[:, keep].conj().T


def general_channel_check(omega, tau, channel: KrausMap, tol: float = DEFAULT_TOL) -> BoundReport:
    """Refined data processing for an arbitrary channel with the Petz map of ``tau``."""
    omega, tau = as_density(omega), as_positive(tau)
    proj = _support_projector(tau)
    outside = float(np.real(np.trace(omega.matrix - proj @ omega.matrix @ proj)))
    if abs(outside) > 1e-10:
        raise SupportViolation(f"omega has weight {outside:.3e} outside the support of tau")
    n_omega = PositiveOperator(apply_channel(channel, omega.matrix))
    n_tau = PositiveOperator(apply_channel(channel, tau.matrix))
    root_out, _ = holevo_fidelity(n_omega, n_tau)
    root_in, _ = holevo_fidelity(omega, tau)
    recovery = petz_recovery_general(tau, channel)
    remainder = schatten_norm(apply_channel(recovery, n_omega.matrix) - omega.matrix, "trace")
    lam = tau.min_nonzero_eigenvalue
    bound = TRACE_NORM_CONSTANT * lam / tau.trace * remainder**3
    comps = dict(
        root_fh_out=root_out,
        root_fh_in=root_in,
        fidelity_gap=root_out - root_in,
        trace_norm_remainder=remainder,
        lambda_min=lam,
        tr_tau=tau.trace,
        trace_norm_bound=bound,
    )
    return BoundReport.from_sides({"general_channel": (root_in + bound, root_out)}, tol, comps)


def dilation_consistency_check(omega, tau, channel: KrausMap, tol: float = DEFAULT_TOL) -> BoundReport:
    """The Stinespring reduction preserves the fidelity, lambda_min and the recovery error."""
    omega, tau = as_density(omega), as_positive(tau)
    if not tau.strictly_positive:
        raise NotPositiveDefinite("tau must be positive definite")
    U = stinespring_isometry(channel).matrix
    shape = BipartiteShape(channel.out_dim, len(channel.kraus_operators))
    rho_AB = PositiveOperator(U @ omega.matrix @ U.conj().T)
    sigma_AB = PositiveOperator(U @ tau.matrix @ U.conj().T, tau.support_threshold)
    inst = _Bipartite(rho_AB, sigma_AB, shape)

    fh_dilated = holevo_fidelity(rho_AB, sigma_AB)[1]
    fh_direct = holevo_fidelity(omega, tau)[1]
    lam_dilated = sigma_AB.min_nonzero_eigenvalue
    lam_direct = tau.min_nonzero_eigenvalue
    dilated_err = schatten_norm(
        apply_channel(petz_partial_trace_map(sigma_AB, shape), inst.rho_A.matrix) - rho_AB.matrix, "trace"
    )
    recovery = petz_recovery_general(tau, channel)
    direct_err = schatten_norm(
        apply_channel(recovery, apply_channel(channel, omega.matrix)) - omega.matrix, "trace"
    )

    def mixed(x, y, t):
        return t + t * max(abs(x), abs(y))

    sides = {
        "fidelity": (abs(fh_dilated - fh_direct), mixed(fh_dilated, fh_direct, 1e-9)),
        "lambda_min": (abs(lam_dilated - lam_direct), mixed(lam_dilated, lam_direct, 1e-9)),
        "remainder": (abs(dilated_err - direct_err), 1e-8),
    }
    comps = dict(
        fh_dilated=fh_dilated, fh_direct=fh_direct, lambda_min_dilated=lam_dilated,
        lambda_min_direct=lam_direct, remainder_dilated=dilated_err, remainder_direct=direct_err,
    )
    return BoundReport.from_sides(sides, tol, comps)


def v_sandwich_check(rho_AB, sigma_AB, shape: BipartiteShape, tol: float = DEFAULT_TOL, eq_tol: float = 1e-9) -> BoundReport:
    """Isometry, purification-transfer and sandwich identities for V, plus the norm ordering of the Deltas."""
    inst = _instance(rho_AB, sigma_AB, shape)
    deltas = _deltas(inst)
    V = petz_isometric_extension_V(inst.sigma_AB, shape).matrix
    iso = float(np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))))
    phi_a = canonical_purification(inst.sigma_A).vector
    phi_ab = canonical_purification(inst.sigma_AB).vector
    transfer = float(np.max(np.abs(V @ phi_a - phi_ab)))
    sandwich = V.conj().T @ deltas.delta_big @ V - deltas.delta_small
    scale = max(1.0, float(np.max(np.abs(deltas.delta_small))))
    sandwich_dev = float(np.max(np.abs(sandwich)))
    comps = dict(
        isometry_defect=iso, purification_defect=transfer, sandwich_defect=sandwich_dev,
        op_norm_small=deltas.op_norm_small, op_norm_big=deltas.op_norm_big,
    )
    return BoundReport.from_sides(
        {
            "isometry": (iso, eq_tol),
            "purification": (transfer, eq_tol),
            "sandwich": (sandwich_dev, eq_tol * scale),
            "norm_order": (deltas.op_norm_small, deltas.op_norm_big),
        },
        tol,
        comps,
    )


def petz_fixed_point_check(sigma_AB, shape: BipartiteShape, tau, channel: KrausMap, tol: float = DEFAULT_TOL) -> BoundReport:
    """Both Petz constructions return their anchor and are CPTP (on the relevant support)."""
    sigma_AB, tau = as_positive(sigma_AB), as_positive(tau)
    R = petz_recovery_partial_trace(sigma_AB, shape)
    sigma_A = partial_trace(sigma_AB.matrix, shape)
    dev_pt = float(np.max(np.abs(apply_channel(R, sigma_A) - sigma_AB.matrix)))
    report = validate_cptp(R, 1e-8)
    P = petz_recovery_general(tau, channel)
    dev_gen = float(np.max(np.abs(apply_channel(P, apply_channel(channel, tau.matrix)) - tau.matrix)))
    cptp_dev = max(report.trace_defect, -report.choi_min_eigenvalue)
    return BoundReport.from_sides(
        {
            "partial_trace_fixed_point": (dev_pt, 1e-9),
            "general_fixed_point": (dev_gen, 1e-9),
            "cptp": (cptp_dev, 1e-8),
        },
        tol,
        dict(partial_trace_defect=dev_pt, general_defect=dev_gen,
             trace_defect=report.trace_defect, choi_min_eigenvalue=report.choi_min_eigenvalue),
    )
