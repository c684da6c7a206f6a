"""Fundamental precision-rate bounds for the thermal-loss model.

Implements the quadratic (coherent-evolution) bound, the span test that
decides whether quadratic scaling survives the noise, the linear rate
bound obtained by minimizing the expectation of a correction-dressed
jump-operator quadratic form, the noise-parameter bounds, the general
QFI-growth rate inequality, and two literature comparison bounds for
passive temperature estimation.

The correction variable ``h`` is a scalar/vector/matrix triple
``(h00, hvec, hmat)`` reparametrizing equivalent Lindblad representations:

    b(h) = Hdot - (i/2)(Ldot^dag L - L^dag Ldot)
           + h00 I + hvec^dag L + L^dag hvec + L^dag hmat L
    a(h) = (i Ldot + hmat L + hvec I)^dag . (i Ldot + hmat L + hvec I)

(the ``Ldot`` pieces drop for Hamiltonian targets).  Any ``h`` with
``b(h) = 0`` yields a valid rate bound ``I/t <= 4 <a(h)>_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .core import (
    TAIL_TOL,
    FockSpace,
    LindbladModel,
    ParameterTag,
    build_fock_space,
    check_density_matrix,
)

HNLS_TOL = 1e-6


class InfeasibleConstraintError(RuntimeError):
    """No correction ``h`` can cancel the generator: the bound is infinite."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class IndeterminateCutoffError(RuntimeError):
    """The truncation is too small to decide the span test."""


@dataclass(frozen=True)
class HCorrection:
    """Correction triple: real scalar, complex J-vector, hermitian JxJ."""

    h00: float
    hvec: np.ndarray
    hmat: np.ndarray

    def __post_init__(self):
        hvec = np.asarray(self.hvec, dtype=complex).reshape(-1).copy()
        j = hvec.shape[0]
        hmat = np.asarray(self.hmat, dtype=complex).reshape(j, j).copy()
        hmat = 0.5 * (hmat + hmat.conj().T)  # hermitian by construction
        hvec.flags.writeable = False
        hmat.flags.writeable = False
        object.__setattr__(self, "hvec", hvec)
        object.__setattr__(self, "hmat", hmat)

    @classmethod
    def zero(cls, n_jump_ops: int) -> "HCorrection":
        return cls(0.0, np.zeros(n_jump_ops, dtype=complex),
                   np.zeros((n_jump_ops, n_jump_ops), dtype=complex))


@dataclass(frozen=True)
class BoundReport:
    """A precision-rate bound with its crossover-time estimate."""

    target: ParameterTag
    rate_bound: float
    tau: float | None = None
    unbounded: bool = False
    components: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.unbounded and not self.rate_bound >= 0:
            raise ValueError("rate bound must be >= 0 unless unbounded")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("crossover time must be positive when defined")


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------


def interior_margin(model: LindbladModel) -> int:
    """Fock levels to discard at the truncation edge: two per ladder power
    appearing in the constraint operators (quadratic terms couple n to
    n +/- 2, so edge rows are truncation artifacts)."""
    quadratic = (model.n_env > 0
                 or model.target is ParameterTag.SQUEEZING)
    return 4 if quadratic else 2


def ab_operators(h: HCorrection, model: LindbladModel, space: FockSpace,
                 general: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """The quadratic-form operator ``a(h)`` and constraint operator ``b(h)``.

    With ``general=False`` the jump-operator derivatives are omitted
    (Hamiltonian-parameter form); with ``general=True`` the full form used
    by the QFI-growth inequality is built.
    """
    jump = model.jump_ops(space)
    j = len(jump)
    if h.hvec.shape[0] != j:
        raise ValueError(
            f"correction dimension {h.hvec.shape[0]} does not match the "
            f"model's {j} jump operators"
        )
    d = space.cutoff
    eye = np.eye(d, dtype=complex)
    ldot = (model.jump_op_derivatives(space) if general
            else [np.zeros((d, d), dtype=complex)] * j)

    b_op = model.generator_derivative(space) + h.h00 * eye
    if general:
        for L, Ld_ in zip(jump, ldot):
            b_op = b_op - 0.5j * (Ld_.conj().T @ L - L.conj().T @ Ld_)
    for k, L in enumerate(jump):
        b_op = b_op + np.conj(h.hvec[k]) * L + h.hvec[k] * L.conj().T
    for p in range(j):
        for q in range(j):
            b_op = b_op + h.hmat[p, q] * (jump[p].conj().T @ jump[q])

    a_op = np.zeros((d, d), dtype=complex)
    for p in range(j):
        m = 1j * ldot[p] + h.hvec[p] * eye
        for q in range(j):
            m = m + h.hmat[p, q] * jump[q]
        a_op = a_op + m.conj().T @ m
    return a_op, b_op


# --------------------------------------------------------------------------
# span test
# --------------------------------------------------------------------------


def _span_residual(model: LindbladModel, space: FockSpace) -> float:
    jump = model.jump_ops(space)
    basis = [space.identity]
    basis += jump
    basis += [L.conj().T for L in jump]
    basis += [a.conj().T @ b for a in jump for b in jump]
    cut = space.cutoff - interior_margin(model)
    target = model.generator_derivative(space)[:cut, :cut].ravel()
    mat = np.stack([b[:cut, :cut].ravel() for b in basis], axis=1)
    coef, *_ = np.linalg.lstsq(mat, target, rcond=None)
    res = np.linalg.norm(mat @ coef - target)
    return float(res / max(np.linalg.norm(target), 1e-300))


def hnls_test(model: LindbladModel, space: FockSpace,
              hnls_tol: float = HNLS_TOL) -> bool:
    """Whether the free generator escapes the jump-operator span.

    True means the derivative generator is not a linear combination of
    ``{I, L_i, L_i^dag, L_i^dag L_j}`` (checked on the truncation interior
    by least squares), so quadratic-in-time information growth survives
    the noise and no finite linear rate bound exists.

    The verdict must agree across two cutoffs with clear margin from the
    threshold, else :class:`IndeterminateCutoffError` is raised.
    """
    if not model.target.is_hamiltonian:
        raise ValueError("span test applies to Hamiltonian parameters")
    residuals = [
        _span_residual(model, space),
        _span_residual(model, build_fock_space(space.cutoff + 8)),
    ]
    verdicts = [r > hnls_tol for r in residuals]
    in_band = any(0.5 * hnls_tol <= r <= 2.0 * hnls_tol for r in residuals)
    if in_band or verdicts[0] != verdicts[1]:
        raise IndeterminateCutoffError(
            f"span residuals {residuals} sit too close to the threshold "
            f"{hnls_tol:g}; increase the cutoff"
        )
    return verdicts[0]


# --------------------------------------------------------------------------
# closed-form correction minimizers
# --------------------------------------------------------------------------


def closed_form_h(model: LindbladModel, mean_photons: float
                  ) -> tuple[HCorrection, float]:
    """Analytic minimizer of ``<a(h)>`` under ``b(h) = 0`` and its value.

    The expectation is taken on a photon-number budget ``<a^dag a> =
    mean_photons`` (Fock-diagonal worst case).  Closed forms:

    * frequency:     ``N / (g (1 + 2n - n/(N+1)))``
    * displacement:  ``1 / (g (1 + 2n))``
    * two-photon:    ``((1 + 2n) N + n) / (g n (1 + n))``

    The two-photon constraint admits no solution at ``n_env = 0`` (single
    jump operator), which raises :class:`InfeasibleConstraintError`.
    """
    n_ph = float(mean_photons)
    if n_ph < 0:
        raise ValueError("mean photon number must be >= 0")
    g, n = model.gamma, model.n_env
    j = model.n_jump_ops
    target = model.target
    if target is ParameterTag.FREQUENCY:
        a_val = n_ph / (g * (1.0 + 2.0 * n - n / (n_ph + 1.0)))
        if j == 1:
            hmat = np.array([[-1.0 / g]], dtype=complex)
            return HCorrection(0.0, np.zeros(1, complex), hmat), a_val
        h11 = -a_val / n_ph if n_ph > 0 else -1.0 / (g * (1.0 + n))
        h22 = -a_val / (n_ph + 1.0)
        h00 = g * n * a_val / (n_ph + 1.0)
        hmat = np.diag([h11, h22]).astype(complex)
        return HCorrection(h00, np.zeros(2, complex), hmat), a_val
    if target is ParameterTag.DISPLACEMENT:
        a_val = 1.0 / (g * (1.0 + 2.0 * n))
        denom = g * (1.0 + 2.0 * n)
        hvec = [-1j * math.sqrt(g * (1.0 + n)) / denom]
        if j == 2:
            hvec.append(1j * math.sqrt(g * n) / denom)
        hvec = np.array(hvec, dtype=complex)
        return HCorrection(0.0, hvec, np.zeros((j, j), complex)), a_val
    if target is ParameterTag.SQUEEZING:
        if n == 0:
            raise InfeasibleConstraintError(
                "the two-photon generator cannot be cancelled with a single "
                "jump operator (n_env = 0): the rate bound is infinite"
            )
        z = -1.0 / (g * math.sqrt(n * (1.0 + n)))
        hmat = np.array([[0.0, z], [z, 0.0]], dtype=complex)
        a_val = ((1.0 + 2.0 * n) * n_ph + n) / (g * n * (1.0 + n))
        return HCorrection(0.0, np.zeros(2, complex), hmat), a_val
    raise ValueError(f"no closed-form correction for target {target}")


# --------------------------------------------------------------------------
# numeric correction optimization (equality-constrained least squares)
# --------------------------------------------------------------------------


def _real_parameter_basis(j: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Unit directions of the real parametrization ``(h00, hvec, hmat)``.

    Returns per-parameter ``(hvec_dir, hmat_dir)`` pairs; the scalar h00
    direction is prepended implicitly by the callers (it only enters b).
    """
    dirs: list[tuple[np.ndarray, np.ndarray]] = []
    for k in range(j):
        for unit in (1.0, 1j):
            hv = np.zeros(j, complex)
            hv[k] = unit
            dirs.append((hv, np.zeros((j, j), complex)))
    for k in range(j):  # real diagonal
        hm = np.zeros((j, j), complex)
        hm[k, k] = 1.0
        dirs.append((np.zeros(j, complex), hm))
    for p in range(j):  # hermitian off-diagonal pairs
        for q in range(p + 1, j):
            for unit in (1.0, 1j):
                hm = np.zeros((j, j), complex)
                hm[p, q] = unit
                hm[q, p] = np.conj(unit)
                dirs.append((np.zeros(j, complex), hm))
    return dirs


def _assemble(params: np.ndarray, j: int) -> HCorrection:
    dirs = _real_parameter_basis(j)
    hvec = np.zeros(j, complex)
    hmat = np.zeros((j, j), complex)
    for x, (dv, dm) in zip(params[1:], dirs):
        hvec = hvec + x * dv
        hmat = hmat + x * dm
    return HCorrection(float(params[0]), hvec, hmat)


@dataclass(frozen=True)
class HOptimizationResult:
    h: HCorrection
    a_expect: float
    constraint_residual: float


def numeric_h_optimization(model: LindbladModel, rho: np.ndarray,
                           space: FockSpace, general: bool | None = None,
                           ) -> HOptimizationResult:
    """Minimize ``tr(rho a(h))`` subject to ``b(h) = 0`` on the interior.

    The objective is a positive-semidefinite quadratic form in the real
    parametrization of ``(hvec, hmat)`` and the constraint is linear in
    all of ``(h00, hvec, hmat)``, so the problem reduces to an
    equality-constrained least-squares solve: the constraint block is
    rank-revealed by SVD and the reduced KKT system is solved by dense
    factorization.  Infeasibility (relative residual above 1e-8 at the
    optimum) raises :class:`InfeasibleConstraintError`.
    """
    # guard only: trajectory states interpolated by the integrator may be
    # indefinite at the 1e-7 level without harming the quadratic form
    check_density_matrix(rho, eig_tol=1e-6, trace_tol=1e-6)
    if general is None:
        general = not model.target.is_hamiltonian
    margin = interior_margin(model)
    pops = np.real(np.diag(rho))
    edge = pops[space.cutoff - margin - 2:].sum()
    if edge > TAIL_TOL:
        raise ValueError(
            f"state population {edge:.2e} within {margin + 2} levels of the "
            "cutoff; enlarge the space before optimizing"
        )
    j = model.n_jump_ops
    dirs = _real_parameter_basis(j)
    n_par = 1 + len(dirs)
    cut = space.cutoff - margin

    zero_h = HCorrection.zero(j)
    _, b0 = ab_operators(zero_h, model, space, general=general)
    cols = []
    eye = np.eye(space.cutoff, dtype=complex)
    cols.append(eye[:cut, :cut].ravel())  # h00 direction
    jump = model.jump_ops(space)
    for dv, dm in dirs:
        direction = np.zeros((space.cutoff, space.cutoff), complex)
        for k, L in enumerate(jump):
            direction += np.conj(dv[k]) * L + dv[k] * L.conj().T
        for p in range(j):
            for q in range(j):
                if dm[p, q] != 0:
                    direction += dm[p, q] * (jump[p].conj().T @ jump[q])
        cols.append(direction[:cut, :cut].ravel())
    amat_c = np.stack(cols, axis=1)
    amat = np.vstack([amat_c.real, amat_c.imag])
    rhs = -np.concatenate([b0[:cut, :cut].ravel().real,
                           b0[:cut, :cut].ravel().imag])

    u, sing, vt = np.linalg.svd(amat, full_matrices=False)
    rank = int((sing > max(sing[0], 1e-300) * 1e-10).sum())
    x_part = vt[:rank].T @ ((u[:, :rank].T @ rhs) / sing[:rank])
    scale = max(np.linalg.norm(rhs), 1.0)
    residual = np.linalg.norm(amat @ x_part - rhs) / scale
    if residual > 1e-8:
        raise InfeasibleConstraintError(
            f"constraint residual {residual:.3e} > 1e-8: no correction "
            "cancels the generator; the rate bound is infinite",
            residual=residual,
        )
    null = vt[rank:].T  # (n_par, n_null)

    # objective: sum_j tr(rho M_j(x)^dag M_j(x)) with affine M_j
    ldot = (model.jump_op_derivatives(space) if general
            else [np.zeros_like(eye)] * j)
    const_m = [1j * ldot[p] for p in range(j)]
    dir_m: list[list[np.ndarray]] = [[np.zeros_like(eye)] * j]  # h00: none
    for dv, dm in dirs:
        ms = []
        for p in range(j):
            m = dv[p] * eye
            for q in range(j):
                if dm[p, q] != 0:
                    m = m + dm[p, q] * jump[q]
            ms.append(m)
        dir_m.append(ms)

    def ip(a_, b_):
        return np.trace(rho @ a_.conj().T @ b_)

    quad = np.zeros((n_par, n_par))
    lin = np.zeros(n_par)
    const = 0.0
    for p in range(j):
        const += ip(const_m[p], const_m[p]).real
        for i in range(n_par):
            lin[i] += ip(const_m[p], dir_m[i][p]).real
            for k in range(i, n_par):
                val = ip(dir_m[i][p], dir_m[k][p]).real
                quad[i, k] += val
                if k != i:
                    quad[k, i] += val

    if null.shape[1]:
        hred = null.T @ quad @ null
        gred = null.T @ (quad @ x_part + lin)
        z, *_ = np.linalg.lstsq(hred, -gred, rcond=None)
        x_opt = x_part + null @ z
    else:
        x_opt = x_part
    a_expect = float(x_opt @ quad @ x_opt + 2.0 * lin @ x_opt + const)
    final_res = np.linalg.norm(amat @ x_opt - rhs) / scale
    return HOptimizationResult(h=_assemble(x_opt, j), a_expect=a_expect,
                               constraint_residual=float(final_res))


# --------------------------------------------------------------------------
# rate bounds
# --------------------------------------------------------------------------

_REFERENCE_NOTE = (
    "reference columns quote the large-N summary constants; the two-photon "
    "entry 4(2N+1)/(g sqrt(n(1+n))) understates the constrained optimum, "
    "which evaluates to 4((1+2n)N+n)/(g n(1+n))"
)


def reference_bound_constant(target: ParameterTag, photons: float,
                             gamma: float, n_env: float) -> float:
    """Published large-N quantum-bound constants used for comparison."""
    n_ph, g, n = photons, gamma, n_env
    if target is ParameterTag.FREQUENCY:
        return 4.0 * n_ph / (g * (1.0 + 2.0 * n))
    if target is ParameterTag.DISPLACEMENT:
        return 4.0 / g
    if target is ParameterTag.SQUEEZING:
        if n == 0:
            return math.inf
        return 4.0 * (2.0 * n_ph + 1.0) / (g * math.sqrt(n * (1.0 + n)))
    if target is ParameterTag.LOSS:
        return n_ph * (1.0 + 2.0 * n) / g
    if n == 0:
        return math.inf
    return n_ph * g * (1.0 + 2.0 * n) / (n * (1.0 + n))


def reference_classical_constant(target: ParameterTag, photons: float,
                                 gamma: float, n_env: float) -> float | None:
    """Published optimal coherent-light constants; None where no classical
    strategy exists (the two-photon drive creates the nonclassicality)."""
    n_ph, g, n = photons, gamma, n_env
    inv_e = 1.0 / math.e
    if target is ParameterTag.FREQUENCY:
        return inv_e * 4.0 * n_ph / (g * (1.0 + 2.0 * n))
    if target is ParameterTag.DISPLACEMENT:
        return 0.82 * 4.0 / g
    if target is ParameterTag.SQUEEZING:
        return None
    if target is ParameterTag.LOSS:
        return inv_e * n_ph / (g * (1.0 + 2.0 * n))
    return math.inf if n == 0 else g / n


def hamiltonian_rate_bound(model: LindbladModel,
                           mean_photons: float) -> BoundReport:
    """Linear rate bound ``4 <a(h*)>`` for a Hamiltonian target, with the
    crossover-time estimate where the quadratic bound stops being tighter."""
    if not model.target.is_hamiltonian:
        raise ValueError("use noise_rate_bound for noise targets")
    g, n = model.gamma, model.n_env
    n_ph = float(mean_photons)
    ref = reference_bound_constant(model.target, n_ph, g, n)
    try:
        _, a_val = closed_form_h(model, n_ph)
    except InfeasibleConstraintError as err:
        return BoundReport(
            target=model.target, rate_bound=math.inf, unbounded=True,
            components={"reference_large_n": ref},
            notes=(str(err),
                   "HNLS regime: quadratic time scaling is unobstructed"),
        )
    tau = None
    if model.target is ParameterTag.FREQUENCY:
        tau = 1.0 / (2.0 * (n_ph + 1.0) * g * (1.0 + 2.0 * n))
    elif model.target is ParameterTag.DISPLACEMENT:
        tau = 1.0 / ((4.0 * n_ph + 2.0) * g * (1.0 + 2.0 * n))
    notes = ()
    if model.target is ParameterTag.SQUEEZING:
        notes = (_REFERENCE_NOTE,)
    return BoundReport(
        target=model.target, rate_bound=4.0 * a_val, tau=tau,
        components={"a_expect": a_val, "reference_large_n": ref},
        notes=notes,
    )


def noise_rate_bound(model: LindbladModel,
                     mean_photons: float) -> BoundReport:
    """Rate bound ``4 <Ldot^dag Ldot>`` for the loss and temperature targets.

    Loss:        ``N (1 + 2n)/g + n/g``.
    Temperature: ``g (1 + 2n) N / (n (1+n)) + g / n`` (unbounded at n = 0).
    """
    n_ph = float(mean_photons)
    g, n = model.gamma, model.n_env
    note = ("normalization follows the per-parameter rate "
            "4 <Ldot^dag Ldot>",)
    if model.target is ParameterTag.LOSS:
        energy = n_ph * (1.0 + 2.0 * n) / g
        additive = n / g
        return BoundReport(
            target=model.target, rate_bound=energy + additive,
            components={"energy_term": energy, "additive_term": additive,
                        "large_n_term": energy,
                        "reference_large_n": reference_bound_constant(
                            model.target, n_ph, g, n)},
            notes=note,
        )
    if model.target is ParameterTag.TEMPERATURE:
        if n == 0:
            return BoundReport(
                target=model.target, rate_bound=math.inf, unbounded=True,
                components={},
                notes=("temperature information diverges at n_env = 0",),
            )
        energy = g * (1.0 + 2.0 * n) * n_ph / (n * (1.0 + n))
        additive = g / n
        return BoundReport(
            target=model.target, rate_bound=energy + additive,
            components={"energy_term": energy, "additive_term": additive,
                        "large_n_term": energy,
                        "reference_large_n": reference_bound_constant(
                            model.target, n_ph, g, n)},
            notes=note + ("the large-N reference omits the additive g/n "
                          "term",),
        )
    raise ValueError("use hamiltonian_rate_bound for Hamiltonian targets")


def rate_bound(model: LindbladModel, mean_photons: float) -> BoundReport:
    if model.target.is_hamiltonian:
        return hamiltonian_rate_bound(model, mean_photons)
    return noise_rate_bound(model, mean_photons)


# --------------------------------------------------------------------------
# quadratic bound and QFI growth rate
# --------------------------------------------------------------------------


def quadratic_bound(variance_profile, t: float) -> float:
    """Coherent-evolution bound ``4 (int_0^t sqrt(Var Hdot) dt')^2``.

    ``variance_profile`` is either a constant (shortcut ``4 t^2 Var``) or a
    callable ``t' -> Var Hdot(t')`` integrated by adaptive quadrature at
    relative tolerance 1e-8.
    """
    if t < 0:
        raise ValueError("time must be >= 0")
    if not callable(variance_profile):
        var = float(variance_profile)
        if var < 0:
            raise ValueError("variance must be >= 0")
        return 4.0 * t * t * var
    if t == 0:
        return 0.0

    def integrand(s: float) -> float:
        v = variance_profile(s)
        if v < 0:
            raise ValueError(f"variance profile negative at t={s}: {v}")
        return math.sqrt(v)

    total, _ = quad(integrand, 0.0, t, epsrel=1e-8, limit=200)
    return 4.0 * total * total


def theorem1_rate(rho_t: np.ndarray, h: HCorrection, model: LindbladModel,
                  qfi_now: float, space: FockSpace) -> float:
    """QFI growth-rate bound ``4 (<a(h)> + sqrt(<b(h)^2> I))`` at one state.

    Valid for any ``h``; tight choices make ``b(h)`` vanish.  Uses the
    general operator form (jump-operator derivatives included).
    """
    if qfi_now < 0:
        raise ValueError("current QFI must be >= 0")
    if rho_t.shape != (space.cutoff, space.cutoff):
        raise ValueError("state dimension does not match the Fock space")
    a_op, b_op = ab_operators(h, model, space, general=True)
    a_val = np.trace(rho_t @ a_op).real
    b2 = np.trace(rho_t @ b_op @ b_op).real
    return float(4.0 * (a_val + math.sqrt(max(b2, 0.0) * qfi_now)))


def theorem1_rate_optimized(rho_t: np.ndarray, model: LindbladModel,
                            qfi_now: float, space: FockSpace) -> float:
    """Best available growth-rate bound at one state.

    Takes the minimum over two valid corrections: the constrained
    least-squares minimizer (``b = 0``) when feasible, and the
    mean-adjusted scalar correction whose bound reproduces the derivative
    of the quadratic bound.
    """
    candidates = []
    try:
        opt = numeric_h_optimization(model, rho_t, space)
        candidates.append(theorem1_rate(rho_t, opt.h, model, qfi_now, space))
    except InfeasibleConstraintError:
        pass
    gdot = model.generator_derivative(space)
    mean = np.trace(rho_t @ gdot).real
    h0 = HCorrection(-float(mean), np.zeros(model.n_jump_ops, complex),
                     np.zeros((model.n_jump_ops,) * 2, complex))
    candidates.append(theorem1_rate(rho_t, h0, model, qfi_now, space))
    return min(candidates)


# --------------------------------------------------------------------------
# passive temperature comparison bounds
# --------------------------------------------------------------------------


def passive_temperature_bounds(n_env: float, photons: float,
                               kappa: float) -> tuple[float, float]:
    """Single-shot and channel-purification bounds for passive temperature
    estimation through a transmissivity-``kappa`` thermal channel.

    Returns ``(single_shot, purification)`` with

        single_shot  = 1 / (n (1+n))
        purification = 1 / (n (n + 1/(1-k)))
                       + k N (2n+1)(1-k) / (n (n+1) (n(1-k)+1)^2)

    and the continuous extension ``purification -> 0`` at ``kappa = 1``.
    """
    if n_env <= 0:
        raise ValueError("passive temperature bounds require n_env > 0")
    if not 0.0 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0, 1]")
    n = n_env
    single = 1.0 / (n * (1.0 + n))
    if kappa == 1.0:
        return single, 0.0
    q = 1.0 - kappa
    purification = (1.0 / (n * (n + 1.0 / q))
                    + kappa * photons * (2.0 * n + 1.0) * q
                    / (n * (n + 1.0) * (n * q + 1.0) ** 2))
    return single, purification
