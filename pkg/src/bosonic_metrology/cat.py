"""Cat-code strategy for estimating the two-photon drive strength, and the
static code-space verification for the error-corrected variant.

A logical qubit lives in superpositions of coherent states ``|+-alpha>``
and ``|+-i alpha>`` of a definite photon parity.  Photon loss flips the
parity without destroying the logical phase, so a nondemolition parity
record keeps track of jumps while the drive accumulates a phase
``2 eps Re(alpha^2)`` of opposite sign on the two logical axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TAIL_TOL, FockSpace, TruncationError
from .fock import coherent_tail, coherent_vector
from .optimize import golden_section_maximize


class CodeProjectionError(RuntimeError):
    """Projected generator deviates from the two-level model beyond the
    finite-amplitude corrections."""


@dataclass(frozen=True)
class CatCode:
    """Normalized code pair ``|C_alpha>``, ``|C_{i alpha}>`` of one parity.

    ``basis`` has the two vectors as columns.  Normalization uses the
    exact constants ``[2 (1 +- e^{-2|alpha|^2})]^{-1/2}``, not the
    large-amplitude approximation.
    """

    alpha: complex
    parity: int
    space: FockSpace
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex).copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)


def normalization_constant(alpha: complex, parity: int) -> float:
    """Exact cat normalization ``[2 (1 + parity e^{-2|alpha|^2})]^{-1/2}``."""
    return 1.0 / math.sqrt(2.0 * (1.0 + parity
                                  * math.exp(-2.0 * abs(alpha) ** 2)))


def build_cat_code(alpha: complex, parity: int, space: FockSpace) -> CatCode:
    """Construct the two code vectors for the given amplitude and parity."""
    if parity not in (+1, -1):
        raise ValueError("parity must be +1 or -1")
    alpha = complex(alpha)
    tail = coherent_tail(alpha, space.cutoff)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"coherent tail {tail:.2e} beyond cutoff {space.cutoff} exceeds "
            f"{TAIL_TOL:g}; enlarge the space"
        )
    cols = []
    dead = slice(1, None, 2) if parity == +1 else slice(0, None, 2)
    for amp in (alpha, 1j * alpha):
        v = (coherent_vector(amp, space, renorm=False)
             + parity * coherent_vector(-amp, space, renorm=False))
        v[dead] = 0.0  # these entries vanish identically; drop float junk
        cols.append(v / np.linalg.norm(v))
    return CatCode(alpha=alpha, parity=parity, space=space,
                   basis=np.stack(cols, axis=1))


def _lowdin_pair(basis: np.ndarray) -> np.ndarray:
    """Symmetric orthonormalization of two near-orthogonal columns."""
    overlap = basis.conj().T @ basis
    vals, vecs = np.linalg.eigh(overlap)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    return basis @ inv_sqrt


def projected_hamiltonian(code: CatCode, epsilon: float) -> np.ndarray:
    """Two-photon drive projected onto the code space, as a 2x2 matrix.

    The code pair is symmetrically orthonormalized first.  The result is
    asserted to sit within the finite-amplitude corrections of the ideal
    ``2 eps Re(alpha^2) diag(+1, -1)``.
    """
    space = code.space
    k = space.lowering @ space.lowering + space.raising @ space.raising
    ortho = _lowdin_pair(code.basis)
    mat = epsilon * (ortho.conj().T @ k @ ortho)
    mat = 0.5 * (mat + mat.conj().T)
    mag2 = abs(code.alpha) ** 2
    ideal = 2.0 * epsilon * (code.alpha ** 2).real * np.diag([1.0, -1.0])
    # residual operator norm sqrt(4|a|^2+2) times the overlap smallness
    tol = (abs(epsilon) * math.sqrt(4.0 * mag2 + 2.0)
           * (6.0 * math.exp(-mag2) + 1e-9) + 1e-12)
    dev = np.linalg.norm(mat - ideal, ord=2)
    if dev > tol:
        raise CodeProjectionError(
            f"projected generator deviates by {dev:.3e} "
            f"(allowance {tol:.3e}) at |alpha|^2 = {mag2:.3f}"
        )
    return mat


def accumulated_phase(epsilon: float, photons: float, gamma: float,
                      t: float) -> float:
    """Logical phase ``2 eps N (1 - e^{-g t}) / g`` gathered while the
    amplitude decays deterministically (``alpha -> alpha e^{-g t/2}``)."""
    return 2.0 * epsilon * photons * (-math.expm1(-gamma * t)) / gamma


def protocol_qfi(photons: float, gamma: float, t: float) -> float:
    """Effective-qubit QFI ``16 N^2 (1 - e^{-g t})^2 / g^2`` of the cat
    protocol with a monitored jump record.

    Valid while the leakage margin ``t eps sqrt(4N+2)`` stays small; the
    margin is reported separately by :func:`protocol_validity_margin`, not
    enforced here.
    """
    if t < 0:
        raise ValueError("time must be >= 0")
    return (16.0 * photons ** 2 * (-math.expm1(-gamma * t)) ** 2
            / gamma ** 2)


def protocol_validity_margin(t: float, epsilon: float,
                             photons: float) -> float:
    """Leakage smallness parameter ``t eps sqrt(4N+2)``; the two-level
    description is trustworthy while this stays well below one."""
    return t * epsilon * math.sqrt(4.0 * photons + 2.0)


def protocol_rate_optimum(photons: float,
                          gamma: float) -> tuple[float, float]:
    """Iteration time maximizing ``protocol_qfi(t)/t`` and the maximum."""
    t_star, rate = golden_section_maximize(
        lambda t: protocol_qfi(photons, gamma, t) / t,
        1e-3 / gamma, 20.0 / gamma, rel_tol=1e-10)
    return t_star, rate


# --------------------------------------------------------------------------
# leakage
# --------------------------------------------------------------------------


def leakage_bound(t: float, epsilon: float, photons: float) -> float:
    """Worst-case distance ``t eps sqrt(4N+2)`` between the true evolved
    state and its code-space two-level approximation (no dissipation)."""
    if min(t, photons) < 0 or epsilon < 0:
        raise ValueError("inputs must be nonnegative")
    return t * epsilon * math.sqrt(4.0 * photons + 2.0)


def leakage_numeric_deviation(alpha: complex, epsilon: float, t: float,
                              space: FockSpace) -> tuple[float, float]:
    """Exact deviation of the driven state from the two-level picture.

    Evolves ``(|C_alpha^+> + |C_{i alpha}^+>)/norm`` under the full
    two-photon generator (exact eigendecomposition, no dissipation) and
    under the projected two-level generator, and returns
    ``(deviation, bound)`` with the bound evaluated at ``N = |alpha|^2``.
    """
    code = build_cat_code(alpha, +1, space)
    ortho = _lowdin_pair(code.basis)
    psi0 = code.basis[:, 0] + code.basis[:, 1]
    psi0 = psi0 / np.linalg.norm(psi0)

    k = space.lowering @ space.lowering + space.raising @ space.raising
    vals, vecs = np.linalg.eigh(k)
    psi_exact = vecs @ (np.exp(-1j * epsilon * t * vals)
                        * (vecs.conj().T @ psi0))

    theta = 2.0 * epsilon * (complex(alpha) ** 2).real * t
    coeff = ortho.conj().T @ psi0
    psi_code = (np.exp(-1j * theta) * coeff[0] * ortho[:, 0]
                + np.exp(+1j * theta) * coeff[1] * ortho[:, 1])
    deviation = float(np.linalg.norm(psi_exact - psi_code))
    return deviation, leakage_bound(t, epsilon, abs(alpha) ** 2)


# --------------------------------------------------------------------------
# static code-space verification (error-corrected variant)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QecReport:
    """Verification of the two-level code built on ``|N-2>``, ``|N>`` with a
    two-state ancilla, against a single-jump (zero-temperature) loss model.

    ``implied_qfi_coefficient`` is the quadratic-time QFI coefficient
    ``4 g^2`` obtained from the projected generator's eigengap ``2 g``.
    """

    n_fock: int
    passed: bool
    violations: tuple[str, ...]
    projected_generator: np.ndarray
    signal_gap: float
    implied_qfi_coefficient: float
    jump_scalar: complex
    jump_norm_scalar: float
    degenerate_signal: bool


def qec_code_check(n_fock: int, space: FockSpace,
                   gamma: float = 1.0, tol: float = 1e-10) -> QecReport:
    """Verify the three code-space conditions and report the implied QFI.

    Conditions: the projected generator must not be proportional to the
    identity, the projected jump operator must be a scalar, and the
    projected ``L^dag L`` must be a scalar (here ``gamma (N-1) I``).
    """
    if n_fock < 2:
        raise ValueError("code requires n_fock >= 2")
    if space.cutoff < n_fock + 3:
        raise ValueError("cutoff must exceed n_fock + 2")
    d = space.cutoff
    eye_anc = np.eye(2, dtype=complex)
    k_sys = (space.lowering @ space.lowering
             + space.raising @ space.raising)
    k = np.kron(k_sys, eye_anc)
    jump = math.sqrt(gamma) * np.kron(space.lowering, eye_anc)

    basis_sys = np.eye(d, dtype=complex)
    anc0 = np.array([1.0, 0.0], dtype=complex)
    anc1 = np.array([0.0, 1.0], dtype=complex)
    c0 = np.kron((basis_sys[n_fock - 2] + basis_sys[n_fock]) / math.sqrt(2),
                 anc0)
    c1 = np.kron((basis_sys[n_fock - 2] - basis_sys[n_fock]) / math.sqrt(2),
                 anc1)
    code = np.stack([c0, c1], axis=1)

    def project(op: np.ndarray) -> np.ndarray:
        return code.conj().T @ op @ code

    gen = project(k)
    jump_p = project(jump)
    jump_norm_p = project(jump.conj().T @ jump)

    violations: list[str] = []
    lam = complex(np.trace(jump_p) / 2.0)
    if np.linalg.norm(jump_p - lam * np.eye(2)) > tol:
        violations.append("projected jump operator is not a scalar")
    mu = float(np.trace(jump_norm_p).real / 2.0)
    if np.linalg.norm(jump_norm_p - mu * np.eye(2)) > tol:
        violations.append("projected L^dag L is not a scalar")
    traceless = gen - (np.trace(gen) / 2.0) * np.eye(2)
    signal_gap = 2.0 * float(np.linalg.norm(traceless, ord=2))
    degenerate = signal_gap <= tol
    if degenerate:
        violations.append("projected generator is proportional to the "
                          "identity (no signal)")
    if abs(gen[0, 1]) > tol or abs(np.trace(gen)) > tol:
        violations.append("projected generator is not sigma_z-like")

    return QecReport(
        n_fock=n_fock,
        passed=not violations,
        violations=tuple(violations),
        projected_generator=gen,
        signal_gap=signal_gap,
        implied_qfi_coefficient=float(signal_gap ** 2),
        jump_scalar=lam,
        jump_norm_scalar=mu,
        degenerate_signal=degenerate,
    )
