"""Shared domain types for a single lossy bosonic mode.

Quadrature convention (single source of truth for the whole package):

    x = a + a^dag,   p = -i (a - a^dag)

so the vacuum covariance matrix is the 2x2 identity.  The default unit
system sets the coupling rate ``gamma = 1``, which defines the time unit;
all other rates are quoted in units of ``gamma``.

The dissipative model is a mode coupled to a thermal environment with
jump operators ``L1 = sqrt(gamma (1 + n_env)) a`` and
``L2 = sqrt(gamma n_env) a^dag`` (the second one is absent at
``n_env = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

#: Default truncation tail tolerance used across the package.
TAIL_TOL = 1e-8

#: Probability entries above this (negative) floor are clamped to zero.
PROB_CLAMP = 1e-12


class TruncationError(RuntimeError):
    """Raised when a Fock-space cutoff is too small for the requested task."""


class NumericalAccuracyError(RuntimeError):
    """Raised when a self-consistency accuracy check fails."""


class ParameterTag(Enum):
    """Which scalar of the model is being estimated."""

    FREQUENCY = "frequency"
    DISPLACEMENT = "displacement"
    SQUEEZING = "squeezing"
    LOSS = "loss"
    TEMPERATURE = "temperature"

    @property
    def is_hamiltonian(self) -> bool:
        """True for parameters that enter through the Hamiltonian."""
        return self in (
            ParameterTag.FREQUENCY,
            ParameterTag.DISPLACEMENT,
            ParameterTag.SQUEEZING,
        )


class HamiltonianKind(Enum):
    NONE = "none"
    FREQUENCY = "frequency"
    DISPLACEMENT = "displacement"
    SQUEEZING = "squeezing"


@dataclass(frozen=True)
class Hamiltonian:
    """One of the supported single-mode Hamiltonians with its coefficient.

    The generators are ``omega a^dag a`` (frequency), ``i alpha (a^dag - a)``
    (displacement drive, real alpha) and ``eps (a^2 + a^dag^2)`` (two-photon
    squeezing drive).  Coefficients are angular frequencies in units of the
    loss rate.
    """

    kind: HamiltonianKind
    coefficient: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError("Hamiltonian coefficient must be finite")
        if self.kind is HamiltonianKind.NONE and self.coefficient != 0.0:
            raise ValueError("HamiltonianKind.NONE carries no coefficient")

    @classmethod
    def none(cls) -> "Hamiltonian":
        return cls(HamiltonianKind.NONE)

    @classmethod
    def frequency(cls, omega: float) -> "Hamiltonian":
        return cls(HamiltonianKind.FREQUENCY, float(omega))

    @classmethod
    def displacement(cls, alpha_drive: float) -> "Hamiltonian":
        return cls(HamiltonianKind.DISPLACEMENT, float(alpha_drive))

    @classmethod
    def squeezing(cls, epsilon: float) -> "Hamiltonian":
        return cls(HamiltonianKind.SQUEEZING, float(epsilon))


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space with cached dense mode operators.

    The arrays are read-only and may be shared freely across threads.
    ``lowering[n-1, n] = sqrt(n)``, ``raising`` is its conjugate transpose
    and ``number`` is diagonal with entries ``0 .. cutoff-1``.
    """

    cutoff: int
    lowering: np.ndarray = field(repr=False, compare=False)
    raising: np.ndarray = field(repr=False, compare=False)
    number: np.ndarray = field(repr=False, compare=False)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.cutoff, dtype=complex)


def build_fock_space(cutoff: int) -> FockSpace:
    """Construct a :class:`FockSpace` of dimension ``cutoff`` (>= 2)."""
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    a = np.diag(np.sqrt(np.arange(1.0, cutoff)), 1).astype(complex)
    ad = a.conj().T.copy()
    n = ad @ a
    for arr in (a, ad, n):
        arr.flags.writeable = False
    return FockSpace(cutoff=int(cutoff), lowering=a, raising=ad, number=n)


def default_cutoff(mean_photons: float) -> int:
    """Heuristic truncation dimension for states of given mean occupation.

    Sized for coherent/thermal-like tails; strongly squeezed states need a
    larger cutoff (pass one explicitly).  Validated downstream by the
    truncation-tail checks of the integrators.
    """
    n = max(float(mean_photons), 0.0)
    return int(math.ceil(n + 10.0 * math.sqrt(n + 1.0) + 20.0))


@dataclass(frozen=True)
class LindbladModel:
    """Thermal-loss Lindblad model with a tagged estimation target.

    The jump operators are fixed to ``sqrt(gamma (1+n_env)) a`` and
    ``sqrt(gamma n_env) a^dag``; ``target`` says which scalar the
    derivative operators differentiate against.
    """

    hamiltonian: Hamiltonian
    target: ParameterTag
    gamma: float = 1.0
    n_env: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (self.n_env >= 0.0 and math.isfinite(self.n_env)):
            raise ValueError(f"n_env must be >= 0, got {self.n_env}")

    @property
    def n_jump_ops(self) -> int:
        return 1 if self.n_env == 0.0 else 2

    def jump_ops(self, space: FockSpace) -> list[np.ndarray]:
        ops = [math.sqrt(self.gamma * (1.0 + self.n_env)) * space.lowering]
        if self.n_env > 0.0:
            ops.append(math.sqrt(self.gamma * self.n_env) * space.raising)
        return ops

    def jump_op_derivatives(self, space: FockSpace) -> list[np.ndarray]:
        """d L_j / d(target); zero matrices for Hamiltonian targets."""
        zero = np.zeros((space.cutoff, space.cutoff), dtype=complex)
        if self.target.is_hamiltonian:
            return [zero.copy() for _ in range(self.n_jump_ops)]
        if self.target is ParameterTag.LOSS:
            # d/dgamma sqrt(gamma c) = L / (2 gamma)
            return [L / (2.0 * self.gamma) for L in self.jump_ops(space)]
        # temperature: d/dn sqrt(g(1+n)) a = L1/(2(1+n)); d/dn sqrt(g n) a^dag
        out = [
            math.sqrt(self.gamma / (1.0 + self.n_env)) / 2.0 * space.lowering
        ]
        if self.n_env > 0.0:
            out.append(
                math.sqrt(self.gamma / self.n_env) / 2.0 * space.raising
            )
        else:
            raise ValueError(
                "temperature derivative diverges at n_env = 0 "
                "(jump operator sqrt(gamma n_env) a^dag is degenerate)"
            )
        return out

    def hamiltonian_matrix(self, space: FockSpace) -> np.ndarray:
        k, c = self.hamiltonian.kind, self.hamiltonian.coefficient
        if k is HamiltonianKind.NONE:
            return np.zeros((space.cutoff, space.cutoff), dtype=complex)
        if k is HamiltonianKind.FREQUENCY:
            return c * space.number
        if k is HamiltonianKind.DISPLACEMENT:
            return 1j * c * (space.raising - space.lowering)
        return c * (space.lowering @ space.lowering
                    + space.raising @ space.raising)

    def generator_derivative(self, space: FockSpace) -> np.ndarray:
        """dH / d(target); zero for noise targets."""
        t = self.target
        if t is ParameterTag.FREQUENCY:
            return space.number.astype(complex)
        if t is ParameterTag.DISPLACEMENT:
            return 1j * (space.raising - space.lowering)
        if t is ParameterTag.SQUEEZING:
            return (space.lowering @ space.lowering
                    + space.raising @ space.raising)
        return np.zeros((space.cutoff, space.cutoff), dtype=complex)


_TARGET_KIND = {
    ParameterTag.FREQUENCY: HamiltonianKind.FREQUENCY,
    ParameterTag.DISPLACEMENT: HamiltonianKind.DISPLACEMENT,
    ParameterTag.SQUEEZING: HamiltonianKind.SQUEEZING,
}


def model_for_target(target: ParameterTag, gamma: float = 1.0,
                     n_env: float = 0.0,
                     coefficient: float = 0.0) -> LindbladModel:
    """Model whose Hamiltonian matches the estimation target.

    Noise targets (loss, temperature) get ``H = 0``.  Hamiltonian targets
    default to working-point coefficient 0 (rotating-frame convention).
    """
    kind = _TARGET_KIND.get(target)
    ham = (Hamiltonian.none() if kind is None
           else Hamiltonian(kind, float(coefficient)))
    return LindbladModel(hamiltonian=ham, target=target,
                         gamma=gamma, n_env=n_env)


# --------------------------------------------------------------------------
# Gaussian states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianState:
    """First and second moments of one mode: ``mean=(⟨x⟩,⟨p⟩)``, 2x2 ``cov``.

    Vacuum has ``mean = 0`` and ``cov = I``.  Validity (symmetry and the
    single-mode uncertainty relation ``det cov >= 1``) is enforced to
    tolerance 1e-10 at construction.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2).copy()
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2).copy()
        if abs(cov[0, 1] - cov[1, 0]) > 1e-10:
            raise ValueError("covariance matrix must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.det(cov) < 1.0 - 1e-10:
            raise ValueError(
                f"unphysical covariance: det = {np.linalg.det(cov)} < 1"
            )
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(mean=np.zeros(2), cov=np.eye(2))

    @property
    def photon_number(self) -> float:
        return photon_number(self)


def photon_number(state: GaussianState) -> float:
    """Mean occupation ``(⟨x⟩² + ⟨p⟩²)/4 + (tr cov - 2)/4``."""
    mean, cov = state.mean, state.cov
    return float((mean @ mean) / 4.0 + (np.trace(cov) - 2.0) / 4.0)


def make_gaussian(alpha: complex, r: float,
                  squeeze_axis: float = 0.0) -> GaussianState:
    """Displaced squeezed vacuum with displacement ``alpha``.

    ``r >= 0`` squeezes the quadrature along ``squeeze_axis`` (angle from
    the x axis), so ``squeeze_axis = 0`` gives ``cov = diag(e^-2r, e^2r)``.
    The mean is ``(2 Re alpha, 2 Im alpha)``.
    """
    if r < 0:
        raise ValueError("squeeze magnitude r must be >= 0")
    alpha = complex(alpha)
    mean = np.array([2.0 * alpha.real, 2.0 * alpha.imag])
    c, s = math.cos(squeeze_axis), math.sin(squeeze_axis)
    rot = np.array([[c, -s], [s, c]])
    cov = rot @ np.diag([math.exp(-2.0 * r), math.exp(2.0 * r)]) @ rot.T
    return GaussianState(mean=mean, cov=cov)


# --------------------------------------------------------------------------
# Dense-operator validation helpers
# --------------------------------------------------------------------------

def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def check_hermitian(m: np.ndarray, tol: float = 1e-10,
                    name: str = "operator") -> None:
    dev = np.linalg.norm(m - m.conj().T)
    if dev > tol:
        raise ValueError(f"{name} is not hermitian (deviation {dev:.3e})")


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-8,
                         eig_tol: float = 1e-10) -> None:
    """Validate hermiticity, unit trace and positivity of ``rho``."""
    check_hermitian(rho, tol=herm_tol, name="density matrix")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    lo = np.linalg.eigvalsh(hermitize(rho)).min()
    if lo < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


# --------------------------------------------------------------------------
# Measurement outcome distributions
# --------------------------------------------------------------------------

class FisherDivergenceError(RuntimeError):
    """An outcome has zero probability but a nonzero derivative."""


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome probabilities with their parameter derivative.

    Tiny negative probability entries (above ``-1e-12``) are clamped to
    zero; anything more negative signals an insufficient cutoff or
    integrator step and raises.  The probabilities may sum to slightly
    less than one (truncated tail below ``tail_tol``).
    """

    labels: np.ndarray
    probs: np.ndarray
    dprobs: np.ndarray
    tail_tol: float = TAIL_TOL

    def __post_init__(self):
        labels = np.asarray(self.labels).copy()
        probs = np.asarray(self.probs, dtype=float).copy()
        dprobs = np.asarray(self.dprobs, dtype=float).copy()
        if not (labels.shape == probs.shape == dprobs.shape):
            raise ValueError("labels, probs and dprobs must share a shape")
        worst = probs.min(initial=0.0)
        if worst < -PROB_CLAMP:
            raise ValueError(
                f"probability {worst:.3e} below clamp threshold "
                f"-{PROB_CLAMP:g}: increase the cutoff or integrator accuracy"
            )
        probs[probs < 0.0] = 0.0
        total = probs.sum()
        if not (1.0 - self.tail_tol <= total <= 1.0 + PROB_CLAMP):
            raise ValueError(
                f"probabilities sum to {total}, outside "
                f"[1 - {self.tail_tol:g}, 1]"
            )
        dsum = dprobs.sum()
        if abs(dsum) > self.tail_tol:
            raise ValueError(
                f"derivative entries sum to {dsum:.3e}, beyond the "
                f"truncation tolerance {self.tail_tol:g}"
            )
        for arr in (labels, probs, dprobs):
            arr.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "dprobs", dprobs)

    def merged(self, keys) -> "OutcomeDistribution":
        """Coarse-grain outcomes that share a key (e.g. parity bits)."""
        keys = np.asarray(keys)
        uniq = np.unique(keys)
        probs = np.array([self.probs[keys == k].sum() for k in uniq])
        dprobs = np.array([self.dprobs[keys == k].sum() for k in uniq])
        return OutcomeDistribution(labels=uniq, probs=probs, dprobs=dprobs,
                                   tail_tol=self.tail_tol)
