"""Closed-form moment dynamics of the thermal-loss model and the homodyne
signal-to-noise figures built on them.

All functions here are pure; parameter sweeps may run concurrently.
Frequency estimation is evaluated in the rotating frame at working point
``omega = 0``: the analytic signal derivative is taken there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import (
    GaussianState,
    HamiltonianKind,
    LindbladModel,
    ParameterTag,
)
from .optimize import golden_section_maximize

ProbeFamily = Union[GaussianState, Callable[[float], GaussianState]]


@dataclass(frozen=True)
class SnrResult:
    """Signal-to-noise ratio of an x-homodyne readout at time ``t``."""

    t: float
    snr: float

    @property
    def rate(self) -> float:
        return self.snr / self.t if self.t > 0 else 0.0


def _rotation(angle: float) -> np.ndarray:
    # phase-space rotation matching <a> -> e^{-i angle} <a>
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def evolve_moments(state: GaussianState, model: LindbladModel,
                   t: float) -> GaussianState:
    """Exact first/second moments after time ``t`` of thermal-loss evolution.

    Supports the free, frequency and displacement-drive Hamiltonians; the
    two-photon (squeezing) drive has no closed Gaussian form here and is
    rejected.
    """
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    kind = model.hamiltonian.kind
    if kind is HamiltonianKind.SQUEEZING:
        raise ValueError("moment evolution not provided for the two-photon "
                         "drive; use the Fock-space integrator")
    g, n_env = model.gamma, model.n_env
    decay = math.exp(-0.5 * g * t)
    rot = np.eye(2)
    mean = decay * state.mean
    if kind is HamiltonianKind.FREQUENCY:
        rot = _rotation(model.hamiltonian.coefficient * t)
        mean = decay * (rot @ state.mean)
    elif kind is HamiltonianKind.DISPLACEMENT:
        # <x> gains 2 alpha (1 - e^{-gt/2}) / (g/2)
        drive = model.hamiltonian.coefficient
        mean = mean + np.array(
            [2.0 * drive * (-math.expm1(-0.5 * g * t)) / (0.5 * g), 0.0]
        )
    relax = -math.expm1(-g * t)  # 1 - e^{-gt}
    cov = ((1.0 - relax) * rot @ state.cov @ rot.T
           + relax * (1.0 + 2.0 * n_env) * np.eye(2))
    return GaussianState(mean=mean, cov=cov)


def _x_variance(probe: GaussianState, model: LindbladModel,
                t: float) -> float:
    relax = -math.expm1(-model.gamma * t)
    return ((1.0 - relax) * probe.cov[0, 0]
            + relax * (1.0 + 2.0 * model.n_env))


def homodyne_snr(probe: GaussianState, model: LindbladModel,
                 t: float) -> SnrResult:
    """Error-propagation SNR ``|d<x(t)>/d(target)|^2 / Var x(t)``.

    Signal derivatives are analytic per target, taken at the rotating-frame
    working point for frequency.  The optimal probe alignment is
    p-displaced for frequency, anything for displacement, and x-displaced
    (optionally x-squeezed) for loss.
    """
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    target = model.target
    if target in (ParameterTag.SQUEEZING, ParameterTag.TEMPERATURE):
        raise ValueError(
            f"homodyne mean carries no first-order {target.value} "
            "information; use a photon-statistics strategy instead"
        )
    g = model.gamma
    decay = math.exp(-0.5 * g * t)
    if target is ParameterTag.FREQUENCY:
        dmean = decay * t * probe.mean[1]
    elif target is ParameterTag.DISPLACEMENT:
        dmean = 2.0 * (-math.expm1(-0.5 * g * t)) / (0.5 * g)
    else:  # loss rate
        dmean = -0.5 * t * decay * probe.mean[0]
    snr = dmean * dmean / _x_variance(probe, model, t)
    return SnrResult(t=float(t), snr=float(snr))


def optimize_iteration_time(probe: ProbeFamily, model: LindbladModel,
                            t_range: tuple[float, float] | None = None,
                            ) -> tuple[float, float]:
    """Single-iteration time maximizing the homodyne SNR per unit time.

    ``probe`` is either a fixed state or a callable ``t -> state``.  The
    search uses a 64-point log-grid unimodality pre-scan followed by
    golden-section refinement to relative tolerance 1e-8; a
    :class:`~bosonic_metrology.optimize.NonUnimodalError` advises the
    dense-grid fallback.

    Returns ``(t_star, rate_star)``.
    """
    if t_range is None:
        t_range = (1e-4 / model.gamma, 20.0 / model.gamma)
    lo, hi = t_range
    if not (0 < lo < hi):
        raise ValueError("t_range must satisfy 0 < lo < hi")

    def rate(t: float) -> float:
        state = probe(t) if callable(probe) else probe
        return homodyne_snr(state, model, t).rate

    return golden_section_maximize(rate, lo, hi, rel_tol=1e-8)


def effective_thermal_photons(sigma2: float, gamma: float,
                              t: float) -> float:
    """Thermal occupation equivalent to an isotropic random drive.

    A displacement drive whose complex amplitude is Gaussian with variance
    ``sigma2`` is indistinguishable, after time ``t``, from raising the
    environment occupation by

        n(t) = sigma2 * [2 (1 - e^{-t g/2}) / (g/2)]^2 / (1 - e^{-t g})
             = (16 sigma2 / g^2) * tanh(g t / 4),

    which is the continuous extension 0 at ``t = 0``.
    """
    if sigma2 < 0:
        raise ValueError("variance must be >= 0")
    if t < 0:
        raise ValueError("time must be >= 0")
    if t == 0.0:
        return 0.0
    return 16.0 * sigma2 / gamma**2 * math.tanh(0.25 * gamma * t)
