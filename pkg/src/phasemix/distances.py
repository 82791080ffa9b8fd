"""Replacement-error calculus for a single Z-phase gate.

A target gate Z_alpha is replaced by the mixed channel that applies the
identity with probability ``p`` and the over-rotation Z_theta otherwise.  The
worst-case (diamond) distance of that replacement has the closed form

    d = |B|,   B = exp(-i*alpha) - exp(-i*theta)*(1 - p) - p,

and the over-rotation minimizing it is

    theta_opt = 2*atan2(sin(alpha), cos(alpha) - p + sqrt(1 + p^2 - 2 p cos(alpha))).

Several Haar-averaged distances are exact multiples of d: the mean Frobenius
distance is pi/(4*sqrt(2)) * d, the mean trace distance pi/4 * d, and the
Choi-based average-case distance 1/(2*sqrt(2)) * d.  The module also carries
a brute-force maximizer over doubled-space pure states that serves as an
independent oracle for the closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .rng import stream

FROBENIUS_RATIO = math.pi / (4 * math.sqrt(2))
TRACE_AVG_RATIO = math.pi / 4
AVG_CASE_RATIO = 1 / (2 * math.sqrt(2))


@dataclass(frozen=True, slots=True)
class ReplacementChannelParams:
    """Target angle, over-rotation, and identity weight of one replacement."""

    alpha: float
    theta: float
    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.theta)):
            raise ValueError("angles must be finite")
        if abs(self.alpha) > math.pi / 4 + 1e-12:
            raise ValueError(f"target angle must be normalized, got {self.alpha}")


def _abs_b(alpha: float, theta, p: float):
    """|B| for scalar or array theta; B is the off-diagonal channel defect."""
    re = np.cos(alpha) - (1 - p) * np.cos(theta) - p
    im = -np.sin(alpha) + (1 - p) * np.sin(theta)
    return np.hypot(re, im)


def diamond_distance_single(params: ReplacementChannelParams) -> float:
    """Worst-case distance of one replacement; equals the radical form exactly."""
    return float(_abs_b(params.alpha, params.theta, params.p))


def diamond_distance_radical(params: ReplacementChannelParams) -> float:
    """The same distance via the explicit radical; numerically worse near zero."""
    a, t, p = params.alpha, params.theta, params.p
    inner = (
        (p - 1) * math.sin(a) * math.sin(t)
        + p * p
        - p
        + 1
        + (p - 1) * (math.cos(a) - p) * math.cos(t)
        - p * math.cos(a)
    )
    return math.sqrt(2) * math.sqrt(max(inner, 0.0))


def optimal_theta(alpha: float, p: float) -> float:
    """Over-rotation minimizing the replacement distance; 0 at alpha == 0.

    Stable half-angle form of the arctangent expression; the sign follows
    sin(alpha).  At p == 1 the mixture puts no weight on the rotation and the
    returned value is irrelevant to the distance.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if alpha == 0.0:
        return 0.0
    root = math.sqrt(1 + p * p - 2 * p * math.cos(alpha))
    return 2.0 * math.atan2(math.sin(alpha), math.cos(alpha) - p + root)


def min_diamond_distance(alpha: float, p: float) -> float:
    """Distance at the optimal over-rotation, in a cancellation-free form.

    Rationalizing the radical gives the algebraically identical

        d = 2*sqrt(2)*p*s^2 / sqrt(q^2 + 2 p s^2 + q*sqrt(q^2 + 4 p s^2)),

    with s = sin(alpha/2) and q = 1 - p, which stays fully accurate for small
    angles where the direct radical loses all precision.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if alpha == 0.0 or p == 0.0:
        return 0.0
    s2 = math.sin(alpha / 2) ** 2
    q = 1.0 - p
    denom = q * q + 2 * p * s2 + q * math.sqrt(q * q + 4 * p * s2)
    return 2 * math.sqrt(2) * p * s2 / math.sqrt(denom)


def frobenius_avg_single(params: ReplacementChannelParams) -> float:
    """Haar-mean Frobenius distance: pi/(4*sqrt(2)) times the diamond distance."""
    return FROBENIUS_RATIO * diamond_distance_single(params)


def trace_avg_single(params: ReplacementChannelParams) -> float:
    """Haar-mean trace distance: pi/4 times the diamond distance."""
    return TRACE_AVG_RATIO * diamond_distance_single(params)


def avg_case_single(params: ReplacementChannelParams) -> float:
    """Choi-based average-case distance: 1/(2*sqrt(2)) times the diamond distance."""
    return AVG_CASE_RATIO * diamond_distance_single(params)


def _sample_state_ensemble(n_samples: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Haar qubit states as (amplitude0, amplitude1) column arrays."""
    a = rng.random(n_samples)
    phi1 = rng.random(n_samples) * 2 * math.pi
    phi2 = rng.random(n_samples) * 2 * math.pi
    c0 = np.sqrt(a) * np.exp(1j * phi1)
    c1 = np.sqrt(1 - a) * np.exp(1j * phi2)
    return c0, c1


def _delta_rho_entries(params: ReplacementChannelParams, c0, c1):
    """Entries of Z_alpha rho Z_alpha^dag - E_theta_p(rho) for pure rho.

    The difference of the two channel outputs is off-diagonal for any input,
    so only the (0, 1) entry is needed; (1, 0) is its conjugate.
    """
    rho01 = c0 * np.conj(c1)
    kappa = (
        cmath.exp(1j * params.alpha)
        - params.p
        - (1 - params.p) * cmath.exp(1j * params.theta)
    )
    return kappa * rho01


def haar_frobenius_mc_single(
    params: ReplacementChannelParams, n_samples: int, seed: int = 0
) -> tuple[float, float]:
    """Monte-Carlo Haar average of the Frobenius distance; returns (mean, stderr)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = stream(seed, "haar-frobenius")
    c0, c1 = _sample_state_ensemble(n_samples, rng)
    off = _delta_rho_entries(params, c0, c1)
    values = math.sqrt(2) * np.abs(off)  # Frobenius norm of the off-diagonal matrix
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return mean, stderr


def haar_trace_mc_single(
    params: ReplacementChannelParams, n_samples: int, seed: int = 0
) -> tuple[float, float]:
    """Monte-Carlo Haar average of the trace distance; returns (mean, stderr)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = stream(seed, "haar-trace")
    c0, c1 = _sample_state_ensemble(n_samples, rng)
    off = _delta_rho_entries(params, c0, c1)
    values = 2.0 * np.abs(off)  # trace norm: eigenvalues come in a +/-|off| pair
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return mean, stderr


# --- brute-force oracle on the doubled space ---------------------------------


def _channel_difference_maps(params: ReplacementChannelParams):
    """Forward and adjoint actions of (Z_alpha - E_theta_p) tensored with I_2."""
    za = np.kron(np.diag([1.0, np.exp(1j * params.alpha)]), np.eye(2))
    zt = np.kron(np.diag([1.0, np.exp(1j * params.theta)]), np.eye(2))
    p = params.p

    def forward(m: np.ndarray) -> np.ndarray:
        return za @ m @ za.conj().T - p * m - (1 - p) * (zt @ m @ zt.conj().T)

    def adjoint(w: np.ndarray) -> np.ndarray:
        return za.conj().T @ w @ za - p * w - (1 - p) * (zt.conj().T @ w @ zt)

    return forward, adjoint


def _trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def _ascend(forward, adjoint, u: np.ndarray, tol: float, max_iters: int = 200) -> tuple[float, np.ndarray]:
    """Alternating maximization of ||forward(|u><u|)||_1 over unit vectors."""
    value = -1.0
    for _ in range(max_iters):
        a = forward(np.outer(u, u.conj()))
        eigvals, eigvecs = np.linalg.eigh(a)
        new_value = float(np.sum(np.abs(eigvals)))
        witness = (eigvecs * np.sign(eigvals)) @ eigvecs.conj().T
        grad = adjoint(witness)
        gvals, gvecs = np.linalg.eigh(grad)
        u = gvecs[:, -1]
        if new_value - value < tol:
            value = new_value
            break
        value = new_value
    return value, u


def _coordinate_polish(forward, u: np.ndarray, value: float, tol: float) -> tuple[float, np.ndarray]:
    """Gradient-free polish: perturb each real/imaginary coordinate, keep gains."""
    step = 1e-4
    while step > tol:
        improved = False
        for idx in range(u.size):
            for delta in (step, -step, 1j * step, -1j * step):
                trial = u.copy()
                trial[idx] += delta
                trial /= np.linalg.norm(trial)
                trial_value = _trace_norm(forward(np.outer(trial, trial.conj())))
                if trial_value > value + 1e-15:
                    u, value, improved = trial, trial_value, True
        if not improved:
            step /= 4
    return value, u


def _brute_force_diamond_state(
    params: ReplacementChannelParams,
    n_restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-9,
) -> tuple[float, np.ndarray]:
    forward, adjoint = _channel_difference_maps(params)
    rng = stream(seed, "diamond-ascent")
    best_value, best_u = -1.0, None
    for _ in range(max(1, n_restarts)):
        u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        u /= np.linalg.norm(u)
        value, u = _ascend(forward, adjoint, u, tol)
        if value > best_value:
            best_value, best_u = value, u
    best_value, best_u = _coordinate_polish(forward, best_u, best_value, tol)
    return best_value, best_u


def brute_force_diamond_single(
    params: ReplacementChannelParams,
    n_restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-9,
) -> float:
    """Maximize the doubled-space trace-norm defect over pure inputs.

    Any feasible point certifies a lower bound on the diamond distance; at the
    optimum the value matches the closed form, making this the independent
    oracle for :func:`diamond_distance_single`.
    """
    value, _ = _brute_force_diamond_state(params, n_restarts, seed, tol)
    return value
