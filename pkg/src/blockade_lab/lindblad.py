"""Dense Liouvillian assembly, steady-state solving, and time evolution.

Vectorization is column-stacking: vec(rho) concatenates the columns of rho,
so vec(A rho B) = (B^T kron A) vec(rho). The master equation used everywhere
is the standard form with full rates,

    drho/dt = -i[H, rho] + kappa D[a](rho) + gamma D[sigma-](rho),
    D[c](rho) = c rho c' - (c'c rho + rho c'c) / 2,

under which an undriven empty cavity loses photon number at exactly kappa.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateSteadyStateError,
    NoDissipationError,
    SolverError,
    StepTooLargeError,
)
from .quantum_core import HilbertConfig, SystemParams, build_hamiltonian, lowering_operators

# Stability bound for the fixed-step integrator: ||L||_inf * dt must stay below this.
MAX_STEP_FACTOR = 0.1


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a density matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of vectorize."""
    return np.asarray(vec, dtype=complex).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """A Hamiltonian plus weighted collapse channels, all on one space.

    channels is a tuple of (operator, rate) pairs; here always
    ((a, kappa), (sigma-, gamma)).
    """

    hamiltonian: np.ndarray
    channels: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        d = self.hamiltonian.shape[0]
        if self.hamiltonian.shape != (d, d):
            raise ValueError("hamiltonian must be square")
        for op, rate in self.channels:
            if op.shape != (d, d):
                raise ValueError("collapse operator dimension mismatch")
            if rate < 0:
                raise ValueError("collapse rates must be nonnegative")


def model_for(p: SystemParams, h: HilbertConfig) -> LindbladModel:
    """Convenience constructor wiring the two physical collapse channels."""
    a, sm = lowering_operators(h)
    return LindbladModel(build_hamiltonian(p, h), ((a, p.kappa), (sm, p.gamma)))


def _hamiltonian_superop(ham: np.ndarray) -> np.ndarray:
    d = ham.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, ham) - np.kron(ham.T, eye))


def _dissipator_superop(c: np.ndarray) -> np.ndarray:
    d = c.shape[0]
    eye = np.eye(d, dtype=complex)
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)


def build_liouvillian(model: LindbladModel) -> np.ndarray:
    """Superoperator L with vec(drho/dt) = L vec(rho)."""
    liou = _hamiltonian_superop(model.hamiltonian)
    for op, rate in model.channels:
        if rate != 0.0:
            liou = liou + rate * _dissipator_superop(op)
    return liou


class LiouvillianBasis:
    """Per-truncation cache of the six unit-parameter superoperators.

    L is linear in every field of SystemParams, so a sweep can assemble the
    Liouvillian at each grid point as a weighted sum of fixed matrices instead
    of rebuilding Kronecker products. Summation order is fixed, which keeps
    sweep output bit-reproducible.
    """

    _H_FIELDS = ("delta_a", "delta", "g", "eta")

    def __init__(self, h: HilbertConfig):
        self.hilbert = h
        zero = SystemParams(g=0, kappa=0, gamma=0, eta=0, delta_a=0, delta=0)
        self._parts = {}
        for field in self._H_FIELDS:
            unit = replace(zero, **{field: 1.0})
            self._parts[field] = _hamiltonian_superop(build_hamiltonian(unit, h))
        a, sm = lowering_operators(h)
        self._parts["kappa"] = _dissipator_superop(a)
        self._parts["gamma"] = _dissipator_superop(sm)

    def assemble(self, p: SystemParams) -> np.ndarray:
        liou = np.zeros_like(self._parts["g"])
        for field in (*self._H_FIELDS, "kappa", "gamma"):
            weight = getattr(p, field)
            if weight != 0.0:
                liou += weight * self._parts[field]
        return liou


def steady_state(liou: np.ndarray, gap_check: bool = True) -> np.ndarray:
    """Unique trace-one fixed point of the Liouvillian.

    The first row of L is replaced by the vectorized trace functional and the
    resulting system solved against (1, 0, ..., 0). That system is nonsingular
    whenever the null space of L is one dimensional, which the singular-value
    gap test verifies when gap_check is on.

    Raises
    ------
    NoDissipationError
        If L is anti-Hermitian (purely unitary generator, all rates zero).
    DegenerateSteadyStateError
        If the numerical null space has dimension > 1.
    SolverError
        If the solve succeeds but the residual is not small.
    """
    d2 = liou.shape[0]
    d = int(round(np.sqrt(d2)))
    if d * d != d2:
        raise ValueError("Liouvillian dimension is not a perfect square")

    scale = float(np.max(np.abs(liou)))
    if scale == 0.0 or float(np.max(np.abs(liou + liou.conj().T))) <= 1e-12 * scale:
        raise NoDissipationError("no dissipative part; steady state is not unique")

    if gap_check:
        s = np.linalg.svd(liou, compute_uv=False)
        if s[-2] < 1e6 * s[-1] or s[-2] <= 1e-12 * s[0]:
            raise DegenerateSteadyStateError(
                f"null-space gap too small: s[-2]={s[-2]:.3e}, s[-1]={s[-1]:.3e}"
            )

    mat = liou.copy()
    mat[0, :] = 0.0
    mat[0, np.arange(d) * d + np.arange(d)] = 1.0
    rhs = np.zeros(d2, dtype=complex)
    rhs[0] = 1.0
    try:
        vec = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSteadyStateError(f"trace-constrained solve failed: {exc}") from exc

    residual = float(np.max(np.abs(liou @ vec)))
    if residual > 1e-6 * max(1.0, scale):
        raise SolverError(f"steady-state residual too large: {residual:.3e}")
    rho = unvectorize(vec, d)
    # The exact fixed point is Hermitian; the solve leaves anti-Hermitian noise
    # that later gets amplified by 1/<n>^2 in weak-drive correlation ratios.
    return 0.5 * (rho + rho.conj().T)


def default_step(p: SystemParams) -> float:
    """Integration step keeping the fastest rate or detuning well resolved."""
    return 0.01 / max(p.kappa, p.gamma, p.g, abs(p.delta_a), abs(p.delta), 1.0)


def _check_step(liou: np.ndarray, dt: float) -> None:
    if dt <= 0:
        raise ValueError("dt must be positive")
    norm = float(np.linalg.norm(liou, np.inf))
    if norm * dt > MAX_STEP_FACTOR:
        raise StepTooLargeError(
            f"||L||_inf * dt = {norm * dt:.3g} exceeds {MAX_STEP_FACTOR}; reduce dt"
        )


def _rk4_span(liou: np.ndarray, vec: np.ndarray, duration: float, dt: float) -> np.ndarray:
    """Advance vec(rho) by `duration` with fixed RK4 steps of size dt.

    A shortened final step lands exactly on the requested time.
    """
    n_full = int(duration / dt)
    remainder = duration - n_full * dt
    if remainder <= 1e-9 * dt:
        remainder = 0.0
    for _ in range(n_full):
        k1 = liou @ vec
        k2 = liou @ (vec + 0.5 * dt * k1)
        k3 = liou @ (vec + 0.5 * dt * k2)
        k4 = liou @ (vec + dt * k3)
        vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if remainder > 0.0:
        k1 = liou @ vec
        k2 = liou @ (vec + 0.5 * remainder * k1)
        k3 = liou @ (vec + 0.5 * remainder * k2)
        k4 = liou @ (vec + remainder * k3)
        vec = vec + (remainder / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return vec


def evolve(liou: np.ndarray, rho0: np.ndarray, t_final: float, dt: float) -> np.ndarray:
    """Propagate a density matrix to t_final with fixed-step RK4.

    No renormalization is applied; the trace is monitored and a drift beyond
    1e-8 (relative to the initial trace) raises, since the generator preserves
    the trace exactly and any drift signals an unstable step.
    """
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    _check_step(liou, dt)
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    trace0 = complex(np.trace(rho0))
    vec = _rk4_span(liou, vectorize(rho0), t_final, dt)
    rho = unvectorize(vec, d)
    drift = abs(complex(np.trace(rho)) - trace0)
    if drift > 1e-8 * max(1.0, abs(trace0)):
        raise SolverError(f"trace drift {drift:.3e} over the run; step too coarse")
    return rho
