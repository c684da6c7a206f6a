"""Quick invariant suite behind the ``selftest`` CLI command.

Each check is a cheap, seeded spot check of one package invariant; the
full property coverage lives in the pytest suite.
"""

from __future__ import annotations

import math

import numpy as np

from .bounds import closed_form_h, numeric_h_optimization
from .cat import build_cat_code
from .core import (
    ParameterTag,
    build_fock_space,
    make_gaussian,
    model_for_target,
    photon_number,
)
from .fock import (
    ChannelSpec,
    beamsplitter_transition,
    density_from_vector,
    fock_vector,
    integrate_master_equation,
    max_snr_check,
    sld_qfi,
    thermal_env_cutoff,
    thermal_mix_distribution,
)
from .gaussian import evolve_moments, homodyne_snr
from .reports import RunConfig, summary_table, write_csv


def _random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def run_selftest(seed: int = 7041) -> tuple[bool, list[str]]:
    """Run the spot checks; returns (all_passed, report_lines)."""
    rng = np.random.default_rng(seed)
    lines: list[str] = []
    ok = True

    def check(name: str, passed: bool, detail: str = "") -> None:
        nonlocal ok
        ok = ok and passed
        status = "PASS" if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        lines.append(f"selftest {name}: {status}{suffix}")

    space = build_fock_space(24)
    comm = space.lowering @ space.raising - space.raising @ space.lowering
    dev = np.linalg.norm(comm[:-1, :-1] - np.eye(23))
    check("fock-commutator", dev < 1e-12, f"deviation {dev:.1e}")

    worst = 0.0
    for _ in range(20):
        alpha = rng.standard_normal() + 1j * rng.standard_normal()
        r = abs(rng.standard_normal())
        axis = rng.uniform(0, math.pi)
        n = photon_number(make_gaussian(alpha, r, axis))
        worst = max(worst, abs(n - (abs(alpha) ** 2 + math.sinh(r) ** 2)))
    check("gaussian-photon-number", worst < 1e-12, f"max err {worst:.1e}")

    model = model_for_target(ParameterTag.FREQUENCY, n_env=0.3)
    state = make_gaussian(0.4 + 0.2j, 0.5)
    t1, t2 = 0.31, 0.47
    one = evolve_moments(state, model, t1 + t2)
    two = evolve_moments(evolve_moments(state, model, t1), model, t2)
    dev = max(np.abs(one.mean - two.mean).max(),
              np.abs(one.cov - two.cov).max())
    check("moment-semigroup", dev < 1e-12, f"deviation {dev:.1e}")

    probe = make_gaussian(1j * 2.0, 0.7)
    t = 0.8
    snr = homodyne_snr(probe, model, t).snr
    closed = (4.0 * 4.0 * t * t
              / (math.exp(-1.4) + (math.exp(t) - 1.0) * 1.6))
    check("homodyne-frequency-identity",
          abs(snr - closed) < 1e-12 * closed, f"snr {snr:.6g}")

    loss = model_for_target(ParameterTag.LOSS, n_env=0.2)
    sp = build_fock_space(30)
    rho_t = integrate_master_equation(
        density_from_vector(fock_vector(3, sp)), loss, 0.3, sp)
    spec = ChannelSpec(kappa=math.exp(-0.3), n_env=0.2,
                       env_cutoff=thermal_env_cutoff(0.2))
    dist = thermal_mix_distribution(3, spec)
    dev = np.abs(np.real(np.diag(rho_t))[:len(dist.probs)]
                 - dist.probs).max()
    check("channel-vs-master-equation", dev < 1e-6, f"max err {dev:.1e}")

    rho = _random_density(rng, 8)
    g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    g = 0.5 * (g + g.conj().T)
    drho = -1j * (g @ rho - rho @ g)
    qfi, sld = sld_qfi(rho, drho)
    dev = abs(max_snr_check(rho, drho, sld) - qfi)
    check("sld-max-snr-identity", dev < 1e-8 * max(qfi, 1.0),
          f"qfi {qfi:.6g}")

    freq = model_for_target(ParameterTag.FREQUENCY, n_env=0.1)
    _, a_closed = closed_form_h(freq, 5.0)
    sp80 = build_fock_space(80)
    rho_diag = density_from_vector(fock_vector(5, sp80))
    a_num = numeric_h_optimization(freq, rho_diag, sp80).a_expect
    dev = abs(a_closed - a_num) / a_closed
    check("closed-vs-numeric-correction", dev < 1e-6, f"rel dev {dev:.1e}")

    total = sum(beamsplitter_transition(k, 7, 4, 0.37) for k in range(12))
    check("beamsplitter-normalization", abs(total - 1.0) < 1e-10,
          f"sum {total:.12f}")

    code = build_cat_code(2.5, +1, build_fock_space(40))
    jumped = build_fock_space(40).lowering @ code.basis[:, 0]
    jumped /= np.linalg.norm(jumped)
    odd = build_cat_code(2.5, -1, build_fock_space(40)).basis[:, 0]
    overlap = abs(np.vdot(odd, jumped))
    check("cat-jump-parity-flip", overlap > 1.0 - 1e-10,
          f"overlap {overlap:.12f}")

    import tempfile
    from pathlib import Path

    cfg = RunConfig(n_env=0.1, photons=5.0, seed=seed)
    with tempfile.TemporaryDirectory() as tmp:
        p1, p2 = Path(tmp) / "a.csv", Path(tmp) / "b.csv"
        write_csv(summary_table(cfg), p1)
        write_csv(summary_table(cfg), p2)
        check("table-determinism", p1.read_bytes() == p2.read_bytes())

    return ok, lines
