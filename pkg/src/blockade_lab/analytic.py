"""Truncated analytic branch: the two-excitation amplitude model.

With at most two excitations kept, the pure-state ansatz

    |psi> = c0g |0,g> + c1g |1,g> + c0e |0,e> + c2g |2,g> + c1e |1,e>

closes under the non-Hermitian effective evolution once c0g is frozen at 1.
Everything here is expressed through the two complex half-width detunings

    alpha = gamma/2 + i delta,     beta = kappa/2 + i delta_a,

and the recurring denominators D1 = g^2 + alpha beta and
D2 = g^2 + beta^2 + alpha beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotConvergedError, SingularDenominatorError
from .quantum_core import HilbertConfig, SystemParams, basis_ket

_SQRT2 = math.sqrt(2.0)


def alpha_beta(p: SystemParams) -> tuple[complex, complex]:
    """The complex rates alpha = gamma/2 + i delta, beta = kappa/2 + i delta_a."""
    return complex(p.gamma / 2.0, p.delta), complex(p.kappa / 2.0, p.delta_a)


@dataclass(frozen=True)
class DressedLevel:
    """Energies of the n-excitation dressed doublet at equal detunings."""

    n: int
    energy_plus: float
    energy_minus: float


def dressed_energies(p: SystemParams, n: int) -> DressedLevel:
    """Dressed-state energies n*Delta +/- g*sqrt(n).

    Only defined when the two detunings coincide (delta_a = delta = Delta);
    otherwise the doublet is not symmetric and this form does not apply.
    """
    if p.delta_a != p.delta:
        raise ValueError(
            f"unequal detunings: delta_a={p.delta_a}, delta={p.delta}"
        )
    if n < 1:
        raise ValueError("excitation number must be >= 1")
    center = n * p.delta_a
    split = p.g * math.sqrt(n)
    return DressedLevel(n=n, energy_plus=center + split, energy_minus=center - split)


@dataclass(frozen=True)
class AmplitudeSet:
    """The five ansatz amplitudes with c0g first."""

    c0g: complex
    c1g: complex
    c0e: complex
    c2g: complex
    c1e: complex

    @property
    def p1(self) -> float:
        """One-photon probability |c1g|^2."""
        return abs(self.c1g) ** 2

    @property
    def p2(self) -> float:
        """Two-photon probability |c2g|^2."""
        return abs(self.c2g) ** 2


def ansatz_ket(amps: AmplitudeSet, h: HilbertConfig) -> np.ndarray:
    """Unnormalized composite-space ket carrying the five amplitudes."""
    if h.n_max < 2:
        raise ValueError("ansatz needs n_max >= 2")
    return (
        amps.c0g * basis_ket(h, 0, 0)
        + amps.c1g * basis_ket(h, 0, 1)
        + amps.c0e * basis_ket(h, 1, 0)
        + amps.c2g * basis_ket(h, 0, 2)
        + amps.c1e * basis_ket(h, 1, 1)
    )


def _denominators(p: SystemParams) -> tuple[complex, complex, complex, complex]:
    alpha, beta = alpha_beta(p)
    d1 = p.g**2 + alpha * beta
    d2 = p.g**2 + beta**2 + alpha * beta
    if min(abs(d1), abs(d2)) < 1e-12:
        raise SingularDenominatorError(
            f"|D1|={abs(d1):.3e}, |D2|={abs(d2):.3e}; lossless parameters"
        )
    return alpha, beta, d1, d2


def steady_amplitudes(p: SystemParams) -> AmplitudeSet:
    """Closed-form steady amplitudes of the truncated model, c0g frozen at 1.

    The g = 0 limit reproduces a coherent state up to two photons:
    c1g = -i eta / beta and c2g = c1g^2 / sqrt(2).
    """
    alpha, beta, d1, d2 = _denominators(p)
    eta = p.eta
    c1g = -1j * eta * alpha / d1
    c0e = -p.g * eta / d1
    c2g = eta**2 * (p.g**2 - alpha**2 - alpha * beta) / (_SQRT2 * d1 * d2)
    c1e = 1j * p.g * eta**2 * (alpha + beta) / (d1 * d2)
    return AmplitudeSet(c0g=1.0 + 0.0j, c1g=c1g, c0e=c0e, c2g=c2g, c1e=c1e)


def _ode_matrix(p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Generator and drive vector for the amplitude vector (c1g, c0e, c2g, c1e)."""
    alpha, beta = alpha_beta(p)
    g, eta = p.g, p.eta
    mat = np.array(
        [
            [-beta, -1j * g, -_SQRT2 * 1j * eta, 0.0],
            [-1j * g, -alpha, 0.0, -1j * eta],
            [-_SQRT2 * 1j * eta, 0.0, -2.0 * beta, -_SQRT2 * 1j * g],
            [0.0, -1j * eta, -_SQRT2 * 1j * g, -(alpha + beta)],
        ],
        dtype=complex,
    )
    drive = np.array([-1j * eta, 0.0, 0.0, 0.0], dtype=complex)
    return mat, drive


def _rk4_amplitudes(mat: np.ndarray, drive: np.ndarray, u: np.ndarray,
                    duration: float, dt: float) -> np.ndarray:
    n_full = int(duration / dt)
    remainder = duration - n_full * dt
    if remainder <= 1e-9 * dt:
        remainder = 0.0
    steps = [dt] * n_full + ([remainder] if remainder > 0.0 else [])
    for step in steps:
        k1 = mat @ u + drive
        k2 = mat @ (u + 0.5 * step * k1) + drive
        k3 = mat @ (u + 0.5 * step * k2) + drive
        k4 = mat @ (u + step * k3) + drive
        u = u + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


def integrate_amplitude_odes(p: SystemParams, t_final: float, dt: float,
                             check_convergence: bool = True) -> AmplitudeSet:
    """RK4 integration of the amplitude equations from the vacuum.

    Initial condition is |0,g>, i.e. all excited amplitudes zero and c0g = 1
    (held fixed throughout). With check_convergence on, a relative change of
    the amplitude vector above 1e-6 over the final tenth of the run raises
    NotConvergedError; pass False when evaluating a transient on purpose.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    mat, drive = _ode_matrix(p)
    u = np.zeros(4, dtype=complex)
    t_mark = 0.9 * t_final
    u = _rk4_amplitudes(mat, drive, u, t_mark, dt)
    u_mark = u.copy()
    u = _rk4_amplitudes(mat, drive, u, t_final - t_mark, dt)
    if check_convergence:
        drift = float(np.max(np.abs(u - u_mark))) / max(float(np.max(np.abs(u))), 1e-30)
        if drift > 1e-6:
            raise NotConvergedError(
                f"amplitude drift {drift:.3e} over the final 10% of t={t_final:g}"
            )
    return AmplitudeSet(c0g=1.0 + 0.0j, c1g=u[0], c0e=u[1], c2g=u[2], c1e=u[3])


def g2_zero_analytic(p: SystemParams) -> float:
    """Closed-form weak-drive g2(0).

    Assembled as x*y/z with x = |D1|^2, y = |g^2 - alpha(alpha+beta)|^2 and
    z = |alpha|^4 |D2|^2, kept as complex products so cancellation is explicit;
    the imaginary residue is checked before the real part is returned. The
    drive amplitude cancels exactly. Equals 2 p2 / p1^2 of the closed-form
    amplitudes, and reduces to 1 identically at g = 0.
    """
    alpha, beta, d1, d2 = _denominators(p)
    x = d1 * d1.conjugate()
    w = p.g**2 - alpha * (alpha + beta)
    y = w * w.conjugate()
    z = (alpha * alpha.conjugate()) ** 2 * (d2 * d2.conjugate())
    if abs(z) < 1e-300 * max(1.0, abs(x * y)):
        raise SingularDenominatorError(f"|z|={abs(z):.3e} too small (alpha ~ 0)")
    val = x * y / z
    if abs(val.imag) > 1e-12 * abs(val):
        raise ValueError(f"g2 imaginary residue {val.imag:.3e} too large")
    return float(val.real)


def atom_rho_from_amplitudes(amps: AmplitudeSet) -> np.ndarray:
    """Reduced 2x2 atomic state of the ansatz, normalized by its trace."""
    gg = abs(amps.c0g) ** 2 + abs(amps.c1g) ** 2 + abs(amps.c2g) ** 2
    ee = abs(amps.c0e) ** 2 + abs(amps.c1e) ** 2
    ge = amps.c0g * np.conjugate(amps.c0e) + amps.c1g * np.conjugate(amps.c1e)
    rho = np.array([[gg, ge], [np.conjugate(ge), ee]], dtype=complex)
    return rho / rho.trace().real


def atom_coherence_analytic(p: SystemParams) -> float:
    """Leading-order l1 coherence of the atom, 2 g eta / |D1|.

    Linear in the drive amplitude by construction; vanishes at g = 0 (the
    atom decouples) and at eta = 0 (nothing to excite).
    """
    _, _, d1, _ = _denominators(p)
    return float(2.0 * p.g * p.eta / abs(d1))
