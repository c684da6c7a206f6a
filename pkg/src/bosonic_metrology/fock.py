"""Truncated Fock-space machinery: master-equation integration of the
thermal-loss model, the beamsplitter/thermal-channel combinatorics,
classical Fisher information of counting measurements, and SLD-based QFI.

Density matrices are plain complex ndarrays; validation helpers live in
:mod:`bosonic_metrology.core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.special import gammaln

from .core import (
    TAIL_TOL,
    FisherDivergenceError,
    FockSpace,
    HamiltonianKind,
    LindbladModel,
    NumericalAccuracyError,
    OutcomeDistribution,
    ParameterTag,
    TruncationError,
    check_hermitian,
    default_cutoff,
    hermitize,
)

# --------------------------------------------------------------------------
# state constructors
# --------------------------------------------------------------------------


def fock_vector(n: int, space: FockSpace) -> np.ndarray:
    if not 0 <= n < space.cutoff:
        raise ValueError(f"Fock level {n} outside cutoff {space.cutoff}")
    v = np.zeros(space.cutoff, dtype=complex)
    v[n] = 1.0
    return v


def coherent_vector(alpha: complex, space: FockSpace,
                    renorm: bool = True) -> np.ndarray:
    """Truncated coherent-state amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    alpha = complex(alpha)
    n = np.arange(space.cutoff)
    mag2 = abs(alpha) ** 2
    if alpha == 0:
        v = np.zeros(space.cutoff, dtype=complex)
        v[0] = 1.0
        return v
    logmag = -0.5 * mag2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    phase = np.exp(1j * n * np.angle(alpha))
    v = np.exp(logmag) * phase
    if renorm:
        v = v / np.linalg.norm(v)
    return v


def coherent_tail(alpha: complex, cutoff: int) -> float:
    """Probability weight of a coherent state beyond the cutoff."""
    n = np.arange(cutoff)
    mag2 = abs(complex(alpha)) ** 2
    if mag2 == 0:
        return 0.0
    logp = -mag2 + n * math.log(mag2) - gammaln(n + 1.0)
    return float(max(1.0 - np.exp(logp).sum(), 0.0))


def squeezed_vacuum_vector(r: float, space: FockSpace) -> np.ndarray:
    """x-squeezed vacuum, variance ``e^{-2r}`` along x; normalized."""
    if r < 0:
        raise ValueError("squeeze magnitude must be >= 0")
    v = np.zeros(space.cutoff, dtype=complex)
    th = math.tanh(r)
    for m in range((space.cutoff - 1) // 2 + 1):
        if 2 * m >= space.cutoff:
            break
        logmag = (0.5 * gammaln(2 * m + 1.0) - gammaln(m + 1.0)
                  - m * math.log(2.0))
        v[2 * m] = (-th) ** m * math.exp(logmag)
    v /= math.sqrt(math.cosh(r))
    norm = np.linalg.norm(v)
    if 1.0 - norm**2 > TAIL_TOL:
        raise TruncationError(
            f"squeezed-vacuum tail {1 - norm**2:.2e} exceeds {TAIL_TOL:g} "
            f"at cutoff {space.cutoff}; increase the cutoff"
        )
    return v / norm


def squeezed_cutoff(r: float, tail_tol: float = TAIL_TOL,
                    headroom: int = 10) -> int:
    """Smallest even-friendly cutoff keeping the squeezed-vacuum tail below
    ``tail_tol`` (geometric-tail estimate plus headroom levels).

    Squeezed tails decay like ``tanh(r)^{2m}`` per photon pair, much slower
    than coherent tails, so the generic heuristic undershoots badly."""
    if r <= 0:
        return max(2 + headroom, 2)
    th2 = math.tanh(r) ** 2
    # sum_{m>M} tanh^{2m}/sqrt(pi m) / cosh r < tol
    m = 2
    while (th2 ** m / (1.0 - th2) / math.sqrt(math.pi * m)
           / math.cosh(r)) > 0.1 * tail_tol:
        m += 1
    return 2 * m + headroom


def displacement_matrix(alpha: complex, space: FockSpace) -> np.ndarray:
    alpha = complex(alpha)
    return expm(alpha * space.raising - np.conj(alpha) * space.lowering)


def displaced_squeezed_vector(alpha: complex, r: float,
                              space: FockSpace) -> np.ndarray:
    """``D(alpha) S(r) |0>`` with x-axis squeezing."""
    return displacement_matrix(alpha, space) @ squeezed_vacuum_vector(
        r, space)


def density_from_vector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def thermal_density(n_env: float, space: FockSpace) -> np.ndarray:
    """Diagonal thermal state ``p_n = n_env^n / (n_env+1)^(n+1)`` (truncated,
    not renormalized; the tail must satisfy the package tolerance)."""
    if n_env < 0:
        raise ValueError("n_env must be >= 0")
    n = np.arange(space.cutoff)
    if n_env == 0:
        p = np.zeros(space.cutoff)
        p[0] = 1.0
    else:
        p = np.exp(n * math.log(n_env) - (n + 1) * math.log(n_env + 1.0))
    if 1.0 - p.sum() > TAIL_TOL:
        raise TruncationError(
            f"thermal tail {1 - p.sum():.2e} exceeds {TAIL_TOL:g} at cutoff "
            f"{space.cutoff}"
        )
    return np.diag(p.astype(complex))


def thermal_density_derivative(n_env: float, space: FockSpace) -> np.ndarray:
    """d(thermal state)/d n_env, analytic and diagonal."""
    if n_env <= 0:
        raise ValueError("derivative requires n_env > 0")
    n = np.arange(space.cutoff)
    p = np.exp(n * math.log(n_env) - (n + 1) * math.log(n_env + 1.0))
    return np.diag((p * (n / n_env - (n + 1) / (n_env + 1.0))).astype(complex))


def moments_from_density(rho: np.ndarray,
                         space: FockSpace) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature mean vector and covariance matrix of ``rho``."""
    a = space.lowering
    x = a + space.raising
    p = -1j * (a - space.raising)
    mx = np.trace(rho @ x).real
    mp = np.trace(rho @ p).real
    vxx = np.trace(rho @ x @ x).real - mx * mx
    vpp = np.trace(rho @ p @ p).real - mp * mp
    vxp = 0.5 * np.trace(rho @ (x @ p + p @ x)).real - mx * mp
    return np.array([mx, mp]), np.array([[vxx, vxp], [vxp, vpp]])


# --------------------------------------------------------------------------
# master equation
# --------------------------------------------------------------------------


def lindblad_rhs(rho: np.ndarray, model: LindbladModel,
                 space: FockSpace) -> np.ndarray:
    """Right-hand side ``-i[H,rho] + sum_j D[L_j] rho`` of the model."""
    if rho.shape != (space.cutoff, space.cutoff):
        raise ValueError(
            f"state dimension {rho.shape} does not match cutoff "
            f"{space.cutoff}"
        )
    h = model.hamiltonian_matrix(space)
    out = -1j * (h @ rho - rho @ h)
    for L in model.jump_ops(space):
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def _derivative_rhs(rho: np.ndarray, model: LindbladModel,
                    space: FockSpace) -> np.ndarray:
    """d/d(target) of the Lindblad generator, applied to ``rho``."""
    target = model.target
    if target.is_hamiltonian:
        hdot = model.generator_derivative(space)
        return -1j * (hdot @ rho - rho @ hdot)
    a, ad = space.lowering, space.raising

    def dissipator(L):
        Ld = L.conj().T
        LdL = Ld @ L
        return L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)

    if target is ParameterTag.LOSS:
        out = (1.0 + model.n_env) * dissipator(a)
        if model.n_env > 0:
            out += model.n_env * dissipator(ad)
        return out
    # temperature: coefficients gamma(1+n) and gamma n both slope gamma
    return model.gamma * (dissipator(a) + dissipator(ad))


def _check_tail(rho: np.ndarray, space: FockSpace, tail_tol: float) -> None:
    top = np.real(np.diag(rho))[-2:].sum()
    if top > tail_tol:
        mean_n = float(np.real(np.trace(space.number @ rho)))
        needed = max(default_cutoff(mean_n), int(1.5 * space.cutoff))
        raise TruncationError(
            f"top two Fock levels carry population {top:.2e} > "
            f"{tail_tol:g}; rerun with cutoff >= {needed}"
        )


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma)))
                       .sum())


def integrate_master_equation(rho0: np.ndarray, model: LindbladModel,
                              t: float, space: FockSpace,
                              rtol: float = 1e-10, atol: float = 1e-12,
                              tail_tol: float = TAIL_TOL,
                              verify: bool = False) -> np.ndarray:
    """Adaptive Runge-Kutta propagation of the master equation to time ``t``.

    The trace is never renormalized during the run (its drift is a
    diagnostic); hermiticity is restored by symmetrization at the end and
    the density-matrix invariants are then enforced to 1e-8.  With
    ``verify=True`` the run is repeated at sharply reduced tolerances and
    the two results must agree to 1e-8 in trace distance.

    Raises:
        TruncationError: if population reaches the top two Fock levels.
        NumericalAccuracyError: on trace drift or failed verification.
    """
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    if rho0.shape != (space.cutoff, space.cutoff):
        raise ValueError("state dimension does not match the Fock space")
    if t == 0:
        return rho0.astype(complex).copy()

    def rhs(_, y):
        return lindblad_rhs(y.reshape(space.cutoff, space.cutoff),
                            model, space).ravel()

    sol = solve_ivp(rhs, (0.0, t), rho0.astype(complex).ravel(),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalAccuracyError(f"integrator failed: {sol.message}")
    rho = hermitize(sol.y[:, -1].reshape(space.cutoff, space.cutoff))
    drift = abs(np.trace(rho).real - np.trace(rho0).real)
    if drift > 1e-8:
        raise NumericalAccuracyError(
            f"trace drifted by {drift:.2e} (> 1e-8); tighten tolerances"
        )
    _check_tail(rho, space, tail_tol)
    if verify:
        ref = integrate_master_equation(rho0, model, t, space,
                                        rtol=rtol / 16.0, atol=atol / 16.0,
                                        tail_tol=tail_tol, verify=False)
        dist = trace_distance(rho, ref)
        if dist > 1e-8:
            raise NumericalAccuracyError(
                f"step-halving self-check failed: trace distance {dist:.2e}"
            )
    return rho


def master_equation_trajectory(rho0: np.ndarray, model: LindbladModel,
                               times: np.ndarray, space: FockSpace,
                               with_derivative: bool = False,
                               rtol: float = 1e-10, atol: float = 1e-12,
                               tail_tol: float = TAIL_TOL):
    """States (optionally with their target-derivatives) on a time grid.

    With ``with_derivative=True`` the sensitivity equation
    ``d(drho)/dt = L drho + (dL/dphi) rho`` is co-integrated from
    ``drho(0) = 0`` and the return value is ``(rhos, drhos)``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ValueError("times must be strictly increasing and >= 0")
    d = space.cutoff
    nflat = d * d

    if with_derivative:
        def rhs(_, y):
            rho = y[:nflat].reshape(d, d)
            sig = y[nflat:].reshape(d, d)
            drho = lindblad_rhs(rho, model, space)
            dsig = (lindblad_rhs(sig, model, space)
                    + _derivative_rhs(rho, model, space))
            return np.concatenate([drho.ravel(), dsig.ravel()])

        y0 = np.concatenate([rho0.astype(complex).ravel(),
                             np.zeros(nflat, dtype=complex)])
    else:
        def rhs(_, y):
            return lindblad_rhs(y.reshape(d, d), model, space).ravel()

        y0 = rho0.astype(complex).ravel()

    t0 = times[0]
    eval_times = times if t0 > 0 else times[1:]
    sol = solve_ivp(rhs, (0.0, times[-1]), y0, method="DOP853",
                    t_eval=eval_times if len(eval_times) else None,
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalAccuracyError(f"integrator failed: {sol.message}")
    rhos, drhos = [], []
    cols = list(sol.y.T)
    if t0 == 0:
        cols.insert(0, y0)
    for col in cols:
        rho = hermitize(col[:nflat].reshape(d, d))
        _check_tail(rho, space, tail_tol)
        rhos.append(rho)
        if with_derivative:
            drhos.append(hermitize(col[nflat:].reshape(d, d)))
    return (rhos, drhos) if with_derivative else rhos


# --------------------------------------------------------------------------
# beamsplitter / thermal channel combinatorics
# --------------------------------------------------------------------------


def beamsplitter_transition(nprime: int, n: int, m: int,
                            kappa: float) -> float:
    """Probability of ``n`` system and ``m`` environment photons scattering
    to ``nprime`` system photons on a beamsplitter of transmissivity
    ``kappa`` (photon number is conserved, so the environment takes the
    remaining ``n + m - nprime``).

    The alternating amplitude sum cancels catastrophically in floats, so
    it is evaluated in exact integer arithmetic: the float ``kappa`` is a
    dyadic rational, every power is an integer, and only the final value
    is rounded.  Log-space assembly covers the deep-attenuation tail.
    """
    if min(nprime, n, m) < 0:
        raise ValueError("photon numbers must be >= 0")
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    mprime = n + m - nprime
    if mprime < 0:
        return 0.0
    if kappa == 1.0:
        return 1.0 if nprime == n else 0.0
    if kappa == 0.0:
        return 1.0 if nprime == m else 0.0
    lo = max(0, n - nprime)
    hi = min(n, mprime)
    if lo > hi:
        return 0.0
    d = nprime - n
    # factor sqrt(kappa)^a sqrt(1-kappa)^b out of the sum; the remainder is
    # a polynomial in kappa with integer coefficients, summed exactly
    knum, kden = kappa.as_integer_ratio()  # kappa = knum / kden, kden = 2^s
    qnum = kden - knum
    acc = 0
    for i in range(lo, hi + 1):
        j = i + d
        term = (math.comb(n, i) * math.comb(m, j)
                * knum ** (hi - i) * qnum ** (i - lo))
        acc += -term if j % 2 else term
    if acc == 0:
        return 0.0
    exp_k = n + m - d - 2 * hi  # leftover power of sqrt(kappa), squared ->
    exp_q = 2 * lo + d          # powers of kappa and (1 - kappa) below
    log_ratio = (gammaln(nprime + 1) + gammaln(mprime + 1)
                 - gammaln(n + 1) - gammaln(m + 1))
    poly_log = 2.0 * (math.log(abs(acc)) - (hi - lo) * math.log(kden))
    log_p = (log_ratio + exp_k * math.log(kappa)
             + exp_q * math.log1p(-kappa) + poly_log)
    if log_p < -700.0:
        return 0.0
    if log_p < -600.0:
        return math.exp(log_p)
    # safe range: assemble from correctly-rounded pieces
    ratio = float(Fraction(math.factorial(nprime) * math.factorial(mprime),
                           math.factorial(n) * math.factorial(m)))
    poly = float(Fraction(acc, kden ** (hi - lo)))
    return (ratio * kappa ** exp_k * (1.0 - kappa) ** exp_q * poly * poly)


@dataclass(frozen=True)
class ChannelSpec:
    """Thermal-loss channel: transmissivity, environment occupation and the
    environment Fock cutoff used in the mixture sum."""

    kappa: float
    n_env: float
    env_cutoff: int

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError("kappa must lie in (0, 1]")
        if self.n_env < 0:
            raise ValueError("n_env must be >= 0")
        if self.env_cutoff < 2:
            raise ValueError("env_cutoff must be >= 2")


def thermal_env_cutoff(n_env: float, tail_tol: float = TAIL_TOL) -> int:
    """Smallest environment cutoff keeping both the thermal weight tail and
    its n_env-derivative tail below ``tail_tol``."""
    if n_env == 0:
        return 2
    ratio = n_env / (n_env + 1.0)
    m = max(int(math.ceil(math.log(tail_tol) / math.log(ratio))), 2)
    while m * ratio ** (m - 1) / (n_env + 1.0) ** 2 > 0.5 * tail_tol:
        m += 1
    return m


def channel_for(model: LindbladModel, t: float,
                tail_tol: float = TAIL_TOL) -> ChannelSpec:
    """Channel equivalent to free thermal-loss evolution for time ``t``."""
    if model.hamiltonian.kind is not HamiltonianKind.NONE:
        raise ValueError("channel picture requires a free Hamiltonian")
    kappa = math.exp(-model.gamma * t)
    return ChannelSpec(kappa=kappa, n_env=model.n_env,
                       env_cutoff=thermal_env_cutoff(model.n_env, tail_tol))


def thermal_weights(n_env: float, env_cutoff: int
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Thermal occupation weights and their n_env-derivative.

    At ``n_env = 0`` the derivative branch keeps the two terms that
    survive the limit (weight flowing from m=0 to m=1).
    """
    m = np.arange(env_cutoff)
    if n_env == 0:
        p = np.zeros(env_cutoff)
        p[0] = 1.0
        dp = np.zeros(env_cutoff)
        dp[0] = -1.0
        dp[1] = 1.0
        return p, dp
    p = np.exp(m * math.log(n_env) - (m + 1) * math.log(n_env + 1.0))
    dp = p * (m / n_env - (m + 1) / (n_env + 1.0))
    return p, dp


def thermal_mix_distribution(n_in: int, spec: ChannelSpec,
                             tail_tol: float = TAIL_TOL
                             ) -> OutcomeDistribution:
    """Photon-number statistics of a Fock state sent through the channel.

    Probabilities are the thermal mixture of beamsplitter transitions;
    derivative entries (with respect to the environment occupation) are
    analytic through the thermal weights.
    """
    if n_in < 0:
        raise ValueError("input photon number must be >= 0")
    if n_in > 60:
        raise ValueError("combinatorial evaluation is limited to n_in <= 60")
    M = spec.env_cutoff
    p_m, dp_m = thermal_weights(spec.n_env, M)
    labels = np.arange(n_in + M)
    probs = np.zeros(n_in + M)
    dprobs = np.zeros(n_in + M)
    for nprime in labels:
        trans = np.array([
            beamsplitter_transition(int(nprime), n_in, m, spec.kappa)
            for m in range(M)
        ])
        probs[nprime] = p_m @ trans
        dprobs[nprime] = dp_m @ trans
    return OutcomeDistribution(labels=labels, probs=probs, dprobs=dprobs,
                               tail_tol=tail_tol)


# --------------------------------------------------------------------------
# Fisher information
# --------------------------------------------------------------------------


def classical_fisher(dist: OutcomeDistribution) -> float:
    """Classical Fisher information ``sum_i dprobs_i^2 / probs_i``.

    Outcomes with probability below 1e-14 are skipped after checking that
    their derivative is below 1e-10 (otherwise the information formally
    diverges, which signals a modeling mistake).
    """
    fi = 0.0
    for p, dp in zip(dist.probs, dist.dprobs):
        if p < 1e-14:
            if abs(dp) > 1e-10:
                raise FisherDivergenceError(
                    f"outcome with probability {p:.2e} carries derivative "
                    f"{dp:.2e}; Fisher information diverges"
                )
            continue
        fi += dp * dp / p
    return float(fi)


def number_distribution_after_loss(rho0: np.ndarray, model: LindbladModel,
                                   t: float, space: FockSpace,
                                   rtol: float = 1e-11, atol: float = 1e-13
                                   ) -> OutcomeDistribution:
    """Photon-number statistics at time ``t`` with loss-rate derivative.

    With a free Hamiltonian the generator is proportional to ``gamma``, so
    the state depends on ``gamma`` and ``t`` only through their product and
    ``d p / d gamma = (t / gamma) d p / d t`` is available exactly from the
    equation of motion (no finite differences).
    """
    if model.hamiltonian.kind is not HamiltonianKind.NONE:
        raise ValueError("loss-rate derivative shortcut requires H = 0")
    if model.target is not ParameterTag.LOSS:
        raise ValueError("distribution derivative is taken against loss")
    rho = integrate_master_equation(rho0, model, t, space,
                                    rtol=rtol, atol=atol)
    probs = np.real(np.diag(rho))
    dprobs = (t / model.gamma) * np.real(
        np.diag(lindblad_rhs(rho, model, space)))
    return OutcomeDistribution(labels=np.arange(space.cutoff), probs=probs,
                               dprobs=dprobs)


@dataclass(frozen=True)
class ParityFisherResult:
    fisher: float
    short_time_prediction: float
    p_odd: float
    probe_photons: float


def parity_fisher_squeezed_vacuum(r: float, model: LindbladModel, t: float,
                                  space: FockSpace) -> ParityFisherResult:
    """Loss-rate Fisher information of a parity readout on squeezed vacuum.

    The squeezed probe is propagated through the master equation, photon
    counting is coarse-grained to parity, and the classical Fisher
    information is returned together with the analytic short-time value
    ``t [N(1+2n_env) + n_env] / gamma``.
    """
    if model.target is not ParameterTag.LOSS:
        raise ValueError("parity strategy estimates the loss rate")
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    probe = squeezed_vacuum_vector(r, space)
    n_probe = float(math.sinh(r) ** 2)
    prediction = (t * (n_probe * (1.0 + 2.0 * model.n_env) + model.n_env)
                  / model.gamma)
    if t == 0:
        return ParityFisherResult(0.0, prediction, 0.0, n_probe)
    dist = number_distribution_after_loss(density_from_vector(probe), model,
                                          t, space)
    parity = dist.merged(dist.labels % 2)
    fisher = classical_fisher(parity)
    p_odd = float(parity.probs[parity.labels == 1][0])
    return ParityFisherResult(fisher, prediction, p_odd, n_probe)


# --------------------------------------------------------------------------
# quantum Fisher information
# --------------------------------------------------------------------------


def sld_qfi(rho: np.ndarray, drho: np.ndarray,
            sld_tol_factor: float = 1e-12) -> tuple[float, np.ndarray]:
    """QFI and symmetric logarithmic derivative of a state family.

    Solves ``(rho L + L rho)/2 = drho`` in the eigenbasis of ``rho``;
    eigenvalue pairs with ``l_i + l_j <= sld_tol_factor * l_max`` are
    discarded (rank-deficient states from pure inputs).

    Returns ``(qfi, sld)`` with ``qfi = tr(rho sld^2)``.
    """
    check_hermitian(drho, tol=1e-8, name="state derivative")
    vals, vecs = np.linalg.eigh(hermitize(rho))
    vals = np.clip(vals, 0.0, None)
    tol = sld_tol_factor * max(vals.max(), 1e-300)
    d_eig = vecs.conj().T @ drho @ vecs
    denom = vals[:, None] + vals[None, :]
    mask = denom > tol
    sld_eig = np.zeros_like(d_eig)
    sld_eig[mask] = 2.0 * d_eig[mask] / denom[mask]
    qfi = float(np.sum(2.0 * np.abs(d_eig[mask]) ** 2 / denom[mask]))
    sld = vecs @ sld_eig @ vecs.conj().T
    return qfi, hermitize(sld)


def max_snr_check(rho: np.ndarray, drho: np.ndarray,
                  observable: np.ndarray) -> float:
    """Error-propagation SNR ``|tr(drho O)|^2 / Var O`` of an observable.

    Bounded above by the SLD QFI, with equality when the observable is the
    symmetric logarithmic derivative itself.
    """
    check_hermitian(observable, tol=1e-8, name="observable")
    mean = np.trace(rho @ observable).real
    var = np.trace(rho @ observable @ observable).real - mean * mean
    scale = max(np.linalg.norm(observable) ** 2, 1e-300)
    if var <= 1e-14 * scale:
        raise ValueError("observable has (numerically) zero variance")
    signal = np.trace(drho @ observable).real
    return float(signal * signal / var)
