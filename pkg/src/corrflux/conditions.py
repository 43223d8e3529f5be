"""Sufficient conditions for dissipation that moves no local energy.

Two residuals are monitored:

  (i)  || [Hhat_A (x) I + I (x) Hhat_B, V] ||_F, the coherent leak between
       the local accounts and the correlation account (state dependent,
       because the effective Hamiltonians depend on the marginals), and
  (ii) || D#_A[H] + D#_B[H] ||_F, the dissipative drive on total energy
       (state independent).

When both vanish, total energy and the product-part energy are frozen:
the only dynamics left in the ledger is a redistribution that this module
can certify by direct integration (verify_theorem). The converse is not
claimed; the residuals are sufficient, not necessary.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from . import dynamics, energetics, model
from .linalg import commutator, embed_A, embed_B, frobenius_norm, kron, random_density_matrix

__all__ = [
    "ConditionReport",
    "TheoremReport",
    "commutator_residual",
    "adjoint_residual",
    "check_conditions",
    "check_conditions_sampled",
    "verify_theorem",
    "valid_c_range",
]

DEFAULT_TOL = 1e-10
ENERGY_DRIFT_TOL = 1e-7
DEFAULT_SAMPLES = 50


def commutator_residual(system: model.BipartiteSystem, rho: np.ndarray) -> float:
    """Residual (i) at the given state: ||[Hhat_A + Hhat_B (embedded), V]||_F."""
    dec = energetics.decompose(rho, system.shape)
    eff = energetics.effective_hamiltonians(system, dec)
    local_sum = embed_A(eff.H_hat_A, system.shape) + embed_B(eff.H_hat_B, system.shape)
    return frobenius_norm(commutator(local_sum, system.V))


def adjoint_residual(system: model.BipartiteSystem) -> float:
    """Residual (ii), state independent: ||D#_A[H] + D#_B[H]||_F."""
    H = model.total_hamiltonian(system)
    return frobenius_norm(dynamics.adjoint_generator(system, H))


@dataclass(frozen=True)
class ConditionReport:
    """Residuals of the two sufficient conditions and their verdicts."""

    commutator_residual: float
    adjoint_residual: float
    state_dependent: bool
    tol: float
    samples: int | None = None
    seed: int | None = None

    @property
    def commutator_ok(self) -> bool:
        return self.commutator_residual <= self.tol

    @property
    def adjoint_ok(self) -> bool:
        return self.adjoint_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.commutator_ok and self.adjoint_ok

    def to_json(self) -> dict:
        data = {
            "commutator_residual": self.commutator_residual,
            "adjoint_residual": self.adjoint_residual,
            "condition_i_pass": self.commutator_ok,
            "condition_ii_pass": self.adjoint_ok,
            "state_dependent": self.state_dependent,
            "tol": self.tol,
        }
        if self.samples is not None:
            data["samples"] = self.samples
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def check_conditions(
    system: model.BipartiteSystem, rho: np.ndarray, tol: float = DEFAULT_TOL
) -> ConditionReport:
    """Evaluate both residuals at one state."""
    return ConditionReport(
        commutator_residual=commutator_residual(system, rho),
        adjoint_residual=adjoint_residual(system),
        state_dependent=True,
        tol=tol,
    )


def check_conditions_sampled(
    system: model.BipartiteSystem,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> ConditionReport:
    """Report the worst residual (i) over random product states.

    Random sampling is a proxy for state independence, not a proof; the
    seed is recorded so the draw is reproducible.
    """
    if samples < 1:
        raise model.ValidationError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        rho_A = random_density_matrix(system.shape.d_A, rng)
        rho_B = random_density_matrix(system.shape.d_B, rng)
        worst = max(worst, commutator_residual(system, kron(rho_A, rho_B)))
    return ConditionReport(
        commutator_residual=worst,
        adjoint_residual=adjoint_residual(system),
        state_dependent=False,
        tol=tol,
        samples=samples,
        seed=seed,
    )


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of the direct conservation check.

    applicable is False when a supplied state fails the sufficient
    conditions; the drift tuples then stay empty. Otherwise each entry is
    the largest |U(t) - U(0)| (total) or |U_prod(t) - U_prod(0)| (product
    part) seen along the integrated trajectory of one state.
    """

    applicable: bool
    total_energy_drifts: tuple[float, ...]
    product_energy_drifts: tuple[float, ...]
    drift_tol: float
    condition_tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return False
        drifts = self.total_energy_drifts + self.product_energy_drifts
        return all(d <= self.drift_tol for d in drifts)


def verify_theorem(
    system: model.BipartiteSystem,
    states,
    dt: float,
    horizon: float,
    condition_tol: float = DEFAULT_TOL,
    drift_tol: float = ENERGY_DRIFT_TOL,
    record_every: int = 10,
) -> TheoremReport:
    """Certify energy conservation by integrating the supplied states.

    First checks both sufficient conditions at every state; any failure
    yields a not-applicable report instead of an exception. Then each state
    is propagated over the horizon and the total and product-part energies
    are compared against their initial values at every record.
    """
    states = [np.asarray(s, dtype=complex) for s in states]
    if not states:
        raise model.ValidationError("verify_theorem needs at least one state")
    for i, rho in enumerate(states):
        report = check_conditions(system, rho, tol=condition_tol)
        if not report.passed:
            return TheoremReport(
                applicable=False,
                total_energy_drifts=(),
                product_energy_drifts=(),
                drift_tol=drift_tol,
                condition_tol=condition_tol,
                detail=(
                    f"state {i}: commutator residual {report.commutator_residual:.3e}, "
                    f"adjoint residual {report.adjoint_residual:.3e} "
                    f"(tol {condition_tol:.1e})"
                ),
            )

    H = model.total_hamiltonian(system)
    shape = system.shape

    def product_energy(rho):
        dec = energetics.decompose(rho, shape)
        return np.trace(kron(dec.rho_A, dec.rho_B) @ H).real

    total_drifts = []
    product_drifts = []
    for rho in states:
        traj = dynamics.integrate(system, rho, horizon, dt, record_every=record_every)
        U0 = np.trace(rho @ H).real
        P0 = product_energy(rho)
        u_drift = 0.0
        p_drift = 0.0
        for state in traj.states:
            u_drift = max(u_drift, abs(np.trace(state @ H).real - U0))
            p_drift = max(p_drift, abs(product_energy(state) - P0))
        total_drifts.append(u_drift)
        product_drifts.append(p_drift)

    return TheoremReport(
        applicable=True,
        total_energy_drifts=tuple(total_drifts),
        product_energy_drifts=tuple(product_drifts),
        drift_tol=drift_tol,
        condition_tol=condition_tol,
    )


def valid_c_range(
    beta_A: float, omega_A: float, beta_B: float, omega_B: float
) -> tuple[float, float]:
    """Exact positivity window for thermal-product states with a zz tilt.

    For pi(beta, omega) = diag(p0, p1) with p0 = exp(-beta omega)/Z,
    p1 = exp(+beta omega)/Z, Z = 2 cosh(beta omega), the state
    pi_A (x) pi_B + c sz (x) sz has diagonal entries
    (pA0 pB0 + c, pA0 pB1 - c, pA1 pB0 - c, pA1 pB1 + c), so positivity
    holds exactly on [-min(pA0 pB0, pA1 pB1), min(pA0 pB1, pA1 pB0)].
    Note the bounds carry the 1/(Z_A Z_B) normalization of the populations.
    """
    for name, value in (("beta_A", beta_A), ("omega_A", omega_A), ("beta_B", beta_B), ("omega_B", omega_B)):
        if not np.isfinite(value) or value < 0:
            raise model.ValidationError(f"{name} must be nonnegative, got {value}")

    def populations(x: float) -> tuple[float, float]:
        z = 2.0 * np.cosh(x)
        return float(np.exp(-x) / z), float(np.exp(x) / z)

    pA0, pA1 = populations(beta_A * omega_A)
    pB0, pB1 = populations(beta_B * omega_B)
    c_min = -min(pA0 * pB0, pA1 * pB1)
    c_max = min(pA0 * pB1, pA1 * pB0)
    return c_min, c_max
