"""Numerical oracle for the band-crossing problem: direct integration of the
time-dependent few-level Schrodinger equation under a linearly swept momentum.

The linear potential is equivalent to a constant force in momentum space, so
a single longitudinal mode obeys

    i hbar d(psi)/dt = [c hbar kx(t) Cx + m~ c^2 Cz~] psi,
    kx(t) = kx_start - (g / hbar) t,

with the sweep starting and ending far from the crossing.  The state begins
in an adiabatic eigenstate at ``kx_start`` and is projected onto the
adiabatic eigenbasis at ``kx_end``; bare spinor components would be wrong at
finite ``|kx|`` where the bands still mix.

The mass axis ``Cz~`` may be a unit combination ``ny Cy + nz Cz``: any such
axis is unitarily equivalent to the pure-``Cz`` form (a rotation about the
x-axis preserves both the spectrum and the ``Cx`` coupling), so the default
integrates with ``Cz`` and a flag retains the literal combination for
cross-checking.

Integration is fixed-step classical Runge-Kutta (RK4) on the complex
amplitudes, always run twice (dt and dt/2) as a built-in convergence check.
No closed-form transition probabilities enter anywhere here, which is what
makes this module an independent check of the analytic formulas in
:mod:`maxwellsim.landau_zener`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NumericalGuardError
from .landau_zener import TransitionProbabilities, effective_mass
from .spin_algebra import PhysicalParams, SpinAlgebra, adiabatic_projectors

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

__all__ = ["SweepProblem", "sweep_problem", "integrate_sweep", "transition_matrix"]

# Sweep endpoints must satisfy c*hbar*|kx| >= this multiple of the gap.
_MIN_ENDPOINT_FACTOR = 20.0
# Default endpoint multiple; chosen so that doubling it moves the final
# populations by well under 1e-3.
_DEFAULT_ENDPOINT_FACTOR = 30.0
# Default dt in units of hbar / max|H|; keeps RK4 norm drift below 1e-8
# over the longest sweeps used in practice.
_DEFAULT_DT_FACTOR = 0.01

_NORM_DRIFT_TOL = 1e-8
_CONVERGENCE_TOL = 1e-4


@dataclass(frozen=True)
class SweepProblem:
    """One momentum sweep through the band crossing.

    ``tilde_axis = (ny, nz)`` fixes the mass-term direction in the y-z spin
    plane; the default is the pure-z axis.  ``initial_band`` is one of the
    labels of ``algebra.band_labels``.
    """

    algebra: SpinAlgebra
    params: PhysicalParams
    mtilde_c2: float
    kx_start: float
    kx_end: float
    initial_band: str = "+"
    tilde_axis: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if not self.kx_start > 0 > self.kx_end:
            raise ValueError("sweep must run from kx_start > 0 to kx_end < 0")
        if self.mtilde_c2 < 0:
            raise ValueError("effective rest energy must be nonnegative")
        chbar = self.params.c * self.params.hbar
        closest = min(self.kx_start, -self.kx_end)
        if chbar * closest < _MIN_ENDPOINT_FACTOR * self.mtilde_c2:
            raise ValueError(
                f"sweep endpoints too close to the crossing: need c*hbar*|kx| >= "
                f"{_MIN_ENDPOINT_FACTOR} * mtilde_c2 at both ends"
            )
        if self.initial_band not in self.algebra.band_labels:
            raise ValueError(f"unknown initial band {self.initial_band!r}")
        ny, nz = self.tilde_axis
        if abs(ny**2 + nz**2 - 1.0) > 1e-12:
            raise ValueError("tilde_axis must be a unit vector (ny, nz)")
        if self.params.g <= 0:
            raise ValueError("sweep requires a positive slope g")


def sweep_problem(
    algebra: SpinAlgebra,
    params: PhysicalParams,
    mtilde_c2: float | None = None,
    *,
    ky: float = 0.0,
    endpoint_factor: float = _DEFAULT_ENDPOINT_FACTOR,
    initial_band: str = "+",
    literal_tilde_axis: bool = False,
) -> SweepProblem:
    """Build a :class:`SweepProblem` with symmetric endpoints.

    If ``mtilde_c2`` is omitted it is computed from ``params`` and ``ky``.
    Endpoints are placed at ``endpoint_factor`` times the larger of the gap
    scale ``mtilde_c2`` and the sweep scale ``sqrt(hbar c g)``, so massless
    problems still get a finite sweep window.
    """
    if mtilde_c2 is None:
        mtilde_c2 = effective_mass(params, ky)
    chbar = params.c * params.hbar
    energy_scale = max(mtilde_c2, math.sqrt(params.hbar * params.c * params.g))
    kx_start = endpoint_factor * energy_scale / chbar
    if literal_tilde_axis:
        if mtilde_c2 == 0:
            raise ValueError("literal tilde axis undefined for a massless sweep")
        ny = params.hbar * ky * params.c / mtilde_c2
        nz = params.rest_energy / mtilde_c2
        axis = (ny, nz)
    else:
        axis = (0.0, 1.0)
    return SweepProblem(
        algebra, params, mtilde_c2, kx_start, -kx_start, initial_band, axis
    )


if _HAVE_NUMBA:

    @njit(cache=True)
    def _deriv(a, b, y, kval, inv_hbar, out):
        d, m = y.shape
        for i in range(d):
            for col in range(m):
                acc = 0.0 + 0.0j
                for j in range(d):
                    acc += (kval * a[i, j] + b[i, j]) * y[j, col]
                out[i, col] = -1j * inv_hbar * acc

    @njit(cache=True)
    def _rk4_sweep(a, b, psi0, kx_start, rate, dt, n_steps, inv_hbar):
        d, m = psi0.shape
        y = psi0.copy()
        k1 = np.empty((d, m), np.complex128)
        k2 = np.empty((d, m), np.complex128)
        k3 = np.empty((d, m), np.complex128)
        k4 = np.empty((d, m), np.complex128)
        tmp = np.empty((d, m), np.complex128)
        for step in range(n_steps):
            t0 = step * dt
            _deriv(a, b, y, kx_start - rate * t0, inv_hbar, k1)
            for i in range(d):
                for col in range(m):
                    tmp[i, col] = y[i, col] + 0.5 * dt * k1[i, col]
            k_mid = kx_start - rate * (t0 + 0.5 * dt)
            _deriv(a, b, tmp, k_mid, inv_hbar, k2)
            for i in range(d):
                for col in range(m):
                    tmp[i, col] = y[i, col] + 0.5 * dt * k2[i, col]
            _deriv(a, b, tmp, k_mid, inv_hbar, k3)
            for i in range(d):
                for col in range(m):
                    tmp[i, col] = y[i, col] + dt * k3[i, col]
            _deriv(a, b, tmp, kx_start - rate * (t0 + dt), inv_hbar, k4)
            for i in range(d):
                for col in range(m):
                    y[i, col] += (dt / 6.0) * (
                        k1[i, col] + 2.0 * k2[i, col] + 2.0 * k3[i, col] + k4[i, col]
                    )
        return y

else:  # pragma: no cover - exercised only when numba is unavailable

    def _rk4_sweep(a, b, psi0, kx_start, rate, dt, n_steps, inv_hbar):
        y = psi0.copy()
        for step in range(n_steps):
            t0 = step * dt
            h_0 = (kx_start - rate * t0) * a + b
            h_m = (kx_start - rate * (t0 + 0.5 * dt)) * a + b
            h_1 = (kx_start - rate * (t0 + dt)) * a + b
            k1 = -1j * inv_hbar * (h_0 @ y)
            k2 = -1j * inv_hbar * (h_m @ (y + 0.5 * dt * k1))
            k3 = -1j * inv_hbar * (h_m @ (y + 0.5 * dt * k2))
            k4 = -1j * inv_hbar * (h_1 @ (y + dt * k3))
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return y


def _coupling_and_mass(problem: SweepProblem) -> tuple[np.ndarray, np.ndarray]:
    cx, cy, cz = problem.algebra.coupling_matrices
    ny, nz = problem.tilde_axis
    a = problem.params.c * problem.params.hbar * cx
    b = problem.mtilde_c2 * (ny * cy + nz * cz)
    return a, b


def _edge_projectors(problem: SweepProblem, kx: float) -> tuple[np.ndarray, ...]:
    a, b = _coupling_and_mass(problem)
    h = kx * a + b
    e_plus = math.sqrt((problem.params.c * problem.params.hbar * kx) ** 2
                       + problem.mtilde_c2**2)
    return adiabatic_projectors(h, e_plus)


def _band_states(projectors) -> np.ndarray:
    """One normalized eigenvector per band, columns ordered as the projectors.

    Each state is extracted by projecting the basis vector with the largest
    in-band weight (the projector's largest diagonal entry), which is
    deterministic and avoids eigen-solver phase conventions.
    """
    columns = []
    for p in projectors:
        j = int(np.argmax(np.real(np.diagonal(p))))
        v = p[:, j]
        columns.append(v / np.linalg.norm(v))
    return np.column_stack(columns)


def _integrate_all_bands(problem: SweepProblem, dt: float | None) -> np.ndarray:
    """Populations matrix ``w[final, initial]`` from the dt/2 run.

    Runs the sweep at dt and dt/2 and raises :class:`ConvergenceError` when
    any population moves by more than the convergence tolerance between the
    two resolutions.
    """
    a, b = _coupling_and_mass(problem)
    chbar = problem.params.c * problem.params.hbar
    k_extreme = max(problem.kx_start, -problem.kx_end)
    e_max = math.sqrt((chbar * k_extreme) ** 2 + problem.mtilde_c2**2)
    if dt is None:
        dt = _DEFAULT_DT_FACTOR * problem.params.hbar / e_max
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt * e_max / problem.params.hbar >= 0.1:
        raise ValueError("dt too large: require dt * max|H| / hbar < 0.1")

    rate = problem.params.g / problem.params.hbar
    total_time = (problem.kx_start - problem.kx_end) / rate
    n_steps = max(1, math.ceil(total_time / dt))
    dt_eff = total_time / n_steps

    psi0 = _band_states(_edge_projectors(problem, problem.kx_start)).astype(complex)
    end_projectors = _edge_projectors(problem, problem.kx_end)
    inv_hbar = 1.0 / problem.params.hbar

    def populations(step: float, count: int) -> tuple[np.ndarray, float]:
        psi = _rk4_sweep(a, b, psi0, problem.kx_start, rate, step, count, inv_hbar)
        norms = np.sum(np.abs(psi) ** 2, axis=0)
        w = np.empty((len(end_projectors), psi.shape[1]))
        for fi, p in enumerate(end_projectors):
            w[fi] = np.real(np.einsum("ic,ij,jc->c", psi.conj(), p, psi))
        return w, float(np.max(np.abs(norms - 1.0)))

    w_coarse, _ = populations(dt_eff, n_steps)
    w_fine, drift = populations(dt_eff / 2.0, 2 * n_steps)
    if np.max(np.abs(w_fine - w_coarse)) > _CONVERGENCE_TOL:
        raise ConvergenceError(
            f"halving dt moved populations by "
            f"{np.max(np.abs(w_fine - w_coarse)):.3e} (> {_CONVERGENCE_TOL}); "
            "the requested dt is too coarse"
        )
    if drift > _NORM_DRIFT_TOL:
        raise NumericalGuardError(
            f"norm drift {drift:.3e} exceeds {_NORM_DRIFT_TOL}; reduce dt"
        )
    return w_fine


def transition_matrix(problem: SweepProblem, dt: float | None = None) -> np.ndarray:
    """Full matrix ``w[final, initial]`` of sweep transition probabilities.

    Band order follows ``problem.algebra.band_labels``.
    """
    return np.clip(_integrate_all_bands(problem, dt), 0.0, 1.0)


def integrate_sweep(
    problem: SweepProblem, dt: float | None = None
) -> TransitionProbabilities:
    """Sweep transition probabilities out of ``problem.initial_band``.

    For the two-level algebra the flat-band slot is identically zero.  The
    returned fields hold the final-band occupations (+, 0, -) for the chosen
    initial band, normalized by the conserved state norm (which itself is
    guarded at 1e-8).
    """
    w = _integrate_all_bands(problem, dt)
    labels = problem.algebra.band_labels
    col = labels.index(problem.initial_band)
    weights = w[:, col] / np.sum(w[:, col])
    if problem.algebra.dimension == 2:
        return TransitionProbabilities(weights[0], 0.0, weights[1])
    return TransitionProbabilities(weights[0], weights[1], weights[2])
