"""Markovian dynamics: generator application, time stepping, steady states.

The master equation is (hbar = 1)

    d rho / dt = -i [H, rho] + sum_k gamma_k (L_k rho L_k† - (1/2){L_k†L_k, rho})

with H the full Hamiltonian of a BipartiteSystem and the sum running over
its jump channels. The Hilbert-Schmidt adjoint of the dissipative part,

    D#[O] = sum_k gamma_k (L_k† O L_k - (1/2){O, L_k†L_k}),

drives observable expectations: d<O>/dt = Tr[D#[O] rho] for [H, O] = 0.
Integration is fixed-step classical RK4 with no renormalization; trace and
positivity are monitored per record and reported, never silently repaired.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import model
from .linalg import frobenius_norm, identity, kron

__all__ = [
    "NonUniqueSteadyStateError",
    "TrajectoryDiagnosticsWarning",
    "Trajectory",
    "dissipator",
    "gkls_generator",
    "adjoint_generator",
    "rk4_step",
    "integrate",
    "superoperator_matrix",
    "steady_state",
]

# Per-record sanity level: beyond this the trajectory is flagged.
TRACE_FLAG_TOL = 1e-8
EIG_FLAG_TOL = -1e-8
# Hard diagnostic breach: the run is still returned but carries a warning
# status, and the command line front end signals it through its exit code.
TRACE_BREACH_TOL = 1e-6
EIG_BREACH_TOL = -1e-6

KERNEL_GAP_TOL = 1e-8
STEADY_STATE_RESIDUAL_TOL = 1e-9


class NonUniqueSteadyStateError(RuntimeError):
    """The generator kernel is not one dimensional."""


class TrajectoryDiagnosticsWarning(UserWarning):
    """A trajectory breached its trace or positivity diagnostics."""


def _channel_terms(system: model.BipartiteSystem, side: str | None):
    if side not in (None, "A", "B"):
        raise ValueError(f"side must be 'A', 'B' or None, got {side!r}")
    terms = []
    for ch in system.channels:
        if side is not None and ch.bath_tag != side:
            continue
        L = ch.operator
        Ld = L.conj().T
        terms.append((ch.rate, L, Ld, Ld @ L))
    return terms


def dissipator(system: model.BipartiteSystem, rho: np.ndarray, side: str | None = None) -> np.ndarray:
    """Dissipative part sum_k gamma_k (L rho L† - (1/2){L†L, rho}).

    side selects channels with that bath_tag; None sums over all channels.
    """
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for rate, L, Ld, LdL in _channel_terms(system, side):
        out += rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def gkls_generator(system: model.BipartiteSystem, rho: np.ndarray) -> np.ndarray:
    """Full right-hand side -i[H, rho] + dissipator(rho)."""
    rho = np.asarray(rho, dtype=complex)
    H = model.total_hamiltonian(system)
    return -1j * (H @ rho - rho @ H) + dissipator(system, rho)


def adjoint_generator(
    system: model.BipartiteSystem, observable: np.ndarray, side: str | None = None
) -> np.ndarray:
    """Hilbert-Schmidt adjoint of the dissipative part applied to an observable.

    Returns sum_k gamma_k (L† O L - (1/2){O, L†L}) over the channels of the
    requested side (or all channels for side=None). The Hamiltonian part is
    deliberately excluded; it never moves Tr[O rho] for O = H.
    """
    O = np.asarray(observable, dtype=complex)
    out = np.zeros_like(O)
    for rate, L, Ld, LdL in _channel_terms(system, side):
        out += rate * (Ld @ O @ L - 0.5 * (LdL @ O + O @ LdL))
    return out


def _compiled_rhs(system: model.BipartiteSystem):
    """Close over precomputed arrays so the hot loop avoids rebuilding them."""
    H = model.total_hamiltonian(system)
    terms = _channel_terms(system, None)

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * (H @ rho - rho @ H)
        for rate, L, Ld, LdL in terms:
            out += rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    return rhs


def _rk4_advance(rhs, rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(rho)
    k2 = rhs(rho + (0.5 * dt) * k1)
    k3 = rhs(rho + (0.5 * dt) * k2)
    k4 = rhs(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(system: model.BipartiteSystem, rho: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of the master equation; dt may be negative."""
    return _rk4_advance(_compiled_rhs(system), np.asarray(rho, dtype=complex), dt)


@dataclass(eq=False)
class Trajectory:
    """Recorded states of one integration run plus per-record diagnostics.

    trace_drift is |Tr rho - 1|, hermiticity_residual is max |rho - rho†|,
    min_eigenvalue is the smallest eigenvalue of the hermitized state.
    """

    times: np.ndarray
    states: list[np.ndarray]
    trace_drift: np.ndarray
    hermiticity_residual: np.ndarray
    min_eigenvalue: np.ndarray

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def flagged(self) -> bool:
        """Any record outside the 1e-8 sanity band."""
        return bool(
            (self.trace_drift > TRACE_FLAG_TOL).any()
            or (self.min_eigenvalue < EIG_FLAG_TOL).any()
        )

    @property
    def breached(self) -> bool:
        """Any record outside the hard 1e-6 diagnostic band."""
        return bool(
            (self.trace_drift > TRACE_BREACH_TOL).any()
            or (self.min_eigenvalue < EIG_BREACH_TOL).any()
        )


def _diagnose(rho: np.ndarray) -> tuple[float, float, float]:
    tr_drift = abs(np.trace(rho) - 1.0)
    herm = float(np.abs(rho - rho.conj().T).max())
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return float(tr_drift), herm, min_eig


def integrate(
    system: model.BipartiteSystem,
    rho0: np.ndarray,
    t_final: float,
    dt: float,
    record_every: int = 1,
) -> Trajectory:
    """Propagate rho0 with fixed-step RK4 and record along the way.

    Records the state every record_every steps (the initial state always,
    the final state always). t_final that is not an integer multiple of dt
    gets one trailing shorter step so the run lands exactly on t_final.
    Diagnostic breaches emit a TrajectoryDiagnosticsWarning and mark the
    trajectory; they never raise.
    """
    if not np.isfinite(dt) or dt <= 0:
        raise model.ValidationError(f"dt must be positive, got {dt}")
    if not np.isfinite(t_final) or t_final < 0:
        raise model.ValidationError(f"t_final must be nonnegative, got {t_final}")
    if record_every < 1:
        raise model.ValidationError(f"record_every must be >= 1, got {record_every}")
    rho = np.array(
        model.require_density_matrix(rho0, "initial state"), dtype=complex
    )
    if rho.shape[0] != system.shape.dim:
        raise model.ValidationError(
            f"initial state dim {rho.shape[0]} does not match system dim {system.shape.dim}"
        )

    rhs = _compiled_rhs(system)
    n_full = int(np.floor(t_final / dt + 1e-12))
    remainder = t_final - n_full * dt
    if remainder < 1e-12 * max(dt, 1.0):
        remainder = 0.0
    n_steps = n_full + (1 if remainder else 0)

    times = [0.0]
    states = [rho.copy()]
    diagnostics = [_diagnose(rho)]
    for step in range(1, n_steps + 1):
        if step <= n_full:
            rho = _rk4_advance(rhs, rho, dt)
            t = step * dt if step < n_steps else t_final
        else:
            rho = _rk4_advance(rhs, rho, remainder)
            t = t_final
        if step % record_every == 0 or step == n_steps:
            times.append(t)
            states.append(rho.copy())
            diagnostics.append(_diagnose(rho))

    tr, herm, eig = (np.array(col) for col in zip(*diagnostics))
    traj = Trajectory(
        times=np.array(times),
        states=states,
        trace_drift=tr,
        hermiticity_residual=herm,
        min_eigenvalue=eig,
    )
    if traj.breached:
        warnings.warn(
            f"trajectory diagnostics breached: max trace drift {tr.max():.3e}, "
            f"min eigenvalue {eig.min():.3e}",
            TrajectoryDiagnosticsWarning,
            stacklevel=2,
        )
    return traj


def superoperator_matrix(system: model.BipartiteSystem) -> np.ndarray:
    """Dense d^2 x d^2 matrix of the generator on row-major vectorized states.

    With vec stacking rows, vec(A X B) = (A kron B^T) vec(X), so the
    Hamiltonian part is -i (H kron I - I kron H^T) and each channel adds
    gamma (L kron conj(L) - (1/2)(L†L kron I + I kron (L†L)^T)).
    """
    d = system.shape.dim
    H = model.total_hamiltonian(system)
    eye = identity(d)
    sup = -1j * (kron(H, eye) - kron(eye, H.T))
    for rate, L, Ld, LdL in _channel_terms(system, None):
        sup += rate * (kron(L, L.conj()) - 0.5 * (kron(LdL, eye) + kron(eye, LdL.T)))
    return sup


def steady_state(system: model.BipartiteSystem, kernel_gap_tol: float = KERNEL_GAP_TOL) -> np.ndarray:
    """Extract the unique stationary state from the vectorized generator.

    Takes the right singular vector of the smallest singular value of the
    superoperator (its null vector), reshapes, hermitizes and normalizes.
    Raises NonUniqueSteadyStateError when the second-smallest singular value
    is below kernel_gap_tol, i.e. the kernel is not one dimensional.
    """
    d = system.shape.dim
    sup = superoperator_matrix(system)
    _, svals, vh = np.linalg.svd(sup)
    if len(svals) > 1 and svals[-2] < kernel_gap_tol:
        raise NonUniqueSteadyStateError(
            f"generator kernel is not one dimensional "
            f"(second-smallest singular value {svals[-2]:.3e} < {kernel_gap_tol:.1e})"
        )
    candidate = vh[-1].conj().reshape(d, d)
    candidate = 0.5 * (candidate + candidate.conj().T)
    tr = np.trace(candidate).real
    if abs(tr) < 1e-12:
        raise NonUniqueSteadyStateError("null vector of the generator is traceless")
    rho_ss = candidate / tr
    residual = frobenius_norm(gkls_generator(system, rho_ss))
    if residual > STEADY_STATE_RESIDUAL_TOL:
        raise RuntimeError(
            f"steady-state residual {residual:.3e} exceeds {STEADY_STATE_RESIDUAL_TOL:.1e}"
        )
    return rho_ss
