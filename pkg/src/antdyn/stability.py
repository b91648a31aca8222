"""Equilibria, Jacobians and local stability classification.

Every model has exactly one equilibrium per path, of the form
``mu_i * e_i`` with ``phi(mu_i e_i) = alpha / (beta d_i)``.  For the
reciprocal-sum and reciprocal-max saturations the scale has the closed
form ``mu_i = beta d_i / alpha``; a bracketed monotone solver covers any
other strictly decreasing single-axis saturation profile.

At an equilibrium the Jacobian has a single nontrivial row, so its
spectrum can be read off exactly instead of going through a dense
eigensolver.  ``jacobian`` itself returns the true derivative of the
vector field at an arbitrary admissible point and is validated against
central finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .models import (
    GKind,
    ModelSpec,
    PhiKind,
    UnsupportedDerivativeError,
    g_eval,
    g_prime,
    phi_eval,
    phi_grad,
    require_admissible,
    vector_field,
)

__all__ = [
    "Equilibrium",
    "EquilibriumReport",
    "SolverError",
    "StabilityLabel",
    "classify",
    "equilibrium_report",
    "find_equilibria",
    "jacobian",
    "solve_scale",
    "spectrum_at_equilibrium",
]

CLASSIFY_TOL = 1e-9

SCALE_BRACKET = (1e-12, 1e12)


class SolverError(RuntimeError):
    """Root finding failed or the root is not bracketed."""


class StabilityLabel(str, Enum):
    LOCALLY_ASYMPTOTICALLY_STABLE = "locally-asymptotically-stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """Single-axis equilibrium ``mu * e_index`` (canonical index)."""

    index: int
    mu: float
    point: np.ndarray
    residual: float


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    """All equilibria of a model with spectra and stability labels."""

    equilibria: tuple[Equilibrium, ...]
    spectra: tuple[np.ndarray, ...]
    labels: tuple[StabilityLabel, ...]
    tol: float
    notes: tuple[str, ...]


def solve_scale(
    profile: Callable[[float], float],
    target: float,
    bracket: tuple[float, float] = SCALE_BRACKET,
    rtol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Solve ``profile(mu) = target`` for a strictly decreasing profile.

    ``profile`` is the saturation evaluated along one axis,
    ``mu -> phi(mu e_i)``.  Bisection runs on log(mu), so the default
    bracket spanning 24 decades still converges well inside the
    iteration budget.

    Raises
    ------
    SolverError
        If the target is not bracketed or the iteration stalls.
    """
    lo, hi = bracket
    f_lo = profile(lo) - target
    f_hi = profile(hi) - target
    if f_lo < 0.0 or f_hi > 0.0:
        raise SolverError(
            f"target {target!r} not bracketed on [{lo!r}, {hi!r}] "
            f"(profile endpoints {profile(lo)!r}, {profile(hi)!r})"
        )
    log_lo, log_hi = np.log(lo), np.log(hi)
    mu = np.exp(0.5 * (log_lo + log_hi))
    for _ in range(max_iter):
        value = profile(mu) - target
        if abs(value) <= rtol * abs(target):
            return mu
        if value > 0.0:
            log_lo = np.log(mu)
        else:
            log_hi = np.log(mu)
        mu = np.exp(0.5 * (log_lo + log_hi))
        if log_hi - log_lo <= np.finfo(float).eps:
            return mu
    raise SolverError(f"no convergence after {max_iter} iterations (last mu={mu!r})")


def _axis_profile(model: ModelSpec, index: int) -> Callable[[float], float]:
    def profile(mu: float) -> float:
        point = np.zeros(model.n)
        point[index] = mu
        return phi_eval(model.phi_kind, point)

    return profile


def _equilibrium_residual(model: ModelSpec, point: np.ndarray) -> float:
    # The signum output is +-1 for any rounding-level argument, so for that
    # response the residual is measured on the inner switching argument
    # scaled to field units; smooth responses use the field itself.
    if model.g_kind is GKind.SIGNUM:
        saturation = phi_eval(model.phi_kind, point)
        a = -model.alpha + model.beta * saturation * model.paths.d
        return float(np.max(np.abs(model.gamma * a * point)))
    return float(np.max(np.abs(vector_field(model, point))))


def find_equilibria(model: ModelSpec) -> list[Equilibrium]:
    """All equilibria of a model, one per canonical path index.

    Closed form ``mu_i = beta d_i / alpha`` for the sum and max
    saturations, generic bracketed solve otherwise.
    """
    out = []
    for i in range(model.n):
        d_i = float(model.paths.d[i])
        target = model.alpha / (model.beta * d_i)
        if model.phi_kind in (PhiKind.SUM, PhiKind.MAX):
            mu = model.beta * d_i / model.alpha
        else:  # pragma: no cover - no third saturation shipped yet
            mu = solve_scale(_axis_profile(model, i), target)
        point = np.zeros(model.n)
        point[i] = mu
        out.append(
            Equilibrium(index=i, mu=mu, point=point, residual=_equilibrium_residual(model, point))
        )
    return out


def jacobian(model: ModelSpec, x) -> np.ndarray:
    """Derivative of the vector field at an admissible state.

    With ``a_i(x) = -alpha + beta phi(x) d_i`` the field is
    ``gamma g(a_i) x_i`` and the derivative is

        J = gamma * (diag(g(a)) + diag(g'(a)) * (beta D x) grad_phi^T)

    which for the identity response reduces to
    ``gamma * (-alpha I + beta phi(x) D + beta D x grad_phi(x)^T)``.

    Raises
    ------
    UnsupportedDerivativeError
        For the signum response (distributional derivative).
    NondifferentiablePointError
        For phi=max at a tied maximum.
    """
    arr = require_admissible(x)
    gp = g_prime(model.g_kind, 0.0)  # raises early for signum
    del gp
    saturation = phi_eval(model.phi_kind, arr)
    grad = phi_grad(model.phi_kind, arr)
    a = -model.alpha + model.beta * saturation * model.paths.d
    diag = np.diag(g_eval(model.g_kind, a))
    rank_one = (g_prime(model.g_kind, a) * model.beta * model.paths.d * arr)[:, None] * grad[None, :]
    return model.gamma * (diag + rank_one)


def spectrum_at_equilibrium(model: ModelSpec, eq: Equilibrium) -> np.ndarray:
    """Exact Jacobian spectrum at a single-axis equilibrium.

    At ``mu_k e_k`` the Jacobian is diagonal except for row k, so the
    eigenvalues are the diagonal entries: ``gamma * g(alpha (d_j/d_k - 1))``
    for j != k and, in slot k,
    ``gamma * g'(0) * beta d_k mu_k * (grad phi)_k`` which evaluates to
    ``-gamma g'(0) alpha`` for both shipped saturations.
    """
    if model.g_kind is GKind.SIGNUM:
        raise UnsupportedDerivativeError(
            "signum response has no Jacobian; spectra are undefined at its equilibria"
        )
    d = model.paths.d
    k = eq.index
    eigs = model.gamma * g_eval(model.g_kind, model.alpha * (d / d[k] - 1.0))
    grad_k = phi_grad(model.phi_kind, eq.point)[k]
    g_prime_zero = float(g_prime(model.g_kind, 0.0))
    eigs[k] = model.gamma * g_prime_zero * model.beta * d[k] * eq.mu * grad_k
    return eigs


def classify(spectra: Sequence[np.ndarray], tol: float = CLASSIFY_TOL) -> list[StabilityLabel]:
    """Label each spectrum by the signs of its real parts.

    All real parts below ``-tol``: locally asymptotically stable.  Any
    real part above ``+tol``: unstable.  Otherwise marginal, which is
    also what equilibria of a tied-leading set receive, since the tie
    contributes an exactly zero eigenvalue.
    """
    labels = []
    for spectrum in spectra:
        real = np.real(np.asarray(spectrum))
        if np.all(real < -tol):
            labels.append(StabilityLabel.LOCALLY_ASYMPTOTICALLY_STABLE)
        elif np.any(real > tol):
            labels.append(StabilityLabel.UNSTABLE)
        else:
            labels.append(StabilityLabel.MARGINAL)
    return labels


def equilibrium_report(
    model: ModelSpec, tol: float = CLASSIFY_TOL, equilibria: Optional[Sequence[Equilibrium]] = None
) -> EquilibriumReport:
    """Equilibria with exact spectra and stability labels.

    Not available for the signum response, whose linearization is
    distributional; callers can still use :func:`find_equilibria` there.
    """
    if equilibria is None:
        equilibria = find_equilibria(model)
    spectra = tuple(spectrum_at_equilibrium(model, eq) for eq in equilibria)
    labels = tuple(classify(spectra, tol))
    notes = []
    leading = model.paths.groups[0]
    if len(leading) > 1:
        paths = ", ".join(str(i) for i in leading)
        notes.append(
            f"paths {paths} share the largest preference weight: their equilibria are "
            "individually marginal and the long-run statement applies to their sum"
        )
    return EquilibriumReport(
        equilibria=tuple(equilibria),
        spectra=spectra,
        labels=labels,
        tol=tol,
        notes=tuple(notes),
    )
