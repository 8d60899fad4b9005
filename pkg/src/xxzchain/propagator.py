"""Krylov time evolution exp(-iHt)|psi> via restarted Lanczos.

Each substep builds a fresh Lanczos basis of dimension <= m from the
current state, exponentiates the tridiagonal projection through its
eigendecomposition, and advances by the largest substep whose a-posteriori
residual estimate beta_m |e_m^T y(dt)| stays within the error budget
(halving, then bisecting, the trial substep).  A basis is reused for every
grid time it can reach, so densely sampled grids cost no extra matrix
products.  Happy breakdown (beta below 1e-14) means the Krylov space is
invariant and the result is exact.

The projected propagator is unitary on the Krylov space, so norm and
energy are conserved to rounding regardless of the substep error.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .hamiltonian import EigenDecomposition, SparseHamiltonian
from .hilbert import sector_decomposition

BREAKDOWN = 1e-13
REORTH_POLICIES = ("full", "none")


@dataclass(frozen=True)
class KrylovConfig:
    """Lanczos propagator knobs.

    ``tolerance`` bounds the estimated error per unit norm of one
    :func:`lanczos_expv` call; :func:`evolve_on_grid` applies it per unit
    time.  ``reorth`` chooses full reorthogonalization of each new basis
    vector (default; guards against ghost Ritz values) or none.
    """

    m: int = 30
    tolerance: float = 1e-10
    max_substeps: int = 1_000_000
    reorth: str = "full"

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("Krylov dimension must be >= 2")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.reorth not in REORTH_POLICIES:
            raise ValueError(f"reorth must be one of {REORTH_POLICIES}")


class PropagationError(RuntimeError):
    """Krylov propagation failed to converge.

    Carries the achieved local error estimate and, when raised from a grid
    evolution, the failing time interval.
    """

    def __init__(self, message, error_estimate=None, interval=None):
        super().__init__(message)
        self.error_estimate = error_estimate
        self.interval = interval


def _as_csr(h) -> sp.csr_matrix:
    matrix = h.matrix if isinstance(h, SparseHamiltonian) else h
    if matrix.dtype == np.complex128:
        return matrix
    return matrix.astype(np.complex128)


class _KrylovWalker:
    """Forward evolution of one vector with basis reuse across targets."""

    def __init__(self, matrix: sp.csr_matrix, psi: np.ndarray, rate: float, cfg: KrylovConfig):
        self.matrix = matrix
        self.psi = np.array(psi, dtype=np.complex128)
        self.rate = rate
        self.cfg = cfg
        self.t = 0.0
        self.basis = None
        self.dt_hint = None
        self.substeps = 0

    def _build_basis(self):
        cfg = self.cfg
        dim = self.psi.shape[0]
        m = min(cfg.m, dim)
        reorth = cfg.reorth == "full"
        basis_vecs = np.empty((m, dim), dtype=np.complex128)
        alpha = np.empty(m)
        beta = np.empty(m)
        nrm = sqrt(np.vdot(self.psi, self.psi).real)
        basis_vecs[0] = self.psi
        basis_vecs[0] /= nrm
        happy = False
        b = 0.0
        k = m
        for j in range(m):
            w = self.matrix @ basis_vecs[j]
            a = np.vdot(basis_vecs[j], w).real
            alpha[j] = a
            w -= a * basis_vecs[j]
            if j > 0:
                w -= beta[j - 1] * basis_vecs[j - 1]
            if reorth:
                c = (basis_vecs[: j + 1] @ w.conj()).conj()
                w -= c @ basis_vecs[: j + 1]
            b = sqrt(np.vdot(w, w).real)
            if b < BREAKDOWN:
                happy = True
                k = j + 1
                break
            if j < m - 1:
                beta[j] = b
                basis_vecs[j + 1] = w
                basis_vecs[j + 1] /= b
        if k > 1:
            theta, small = eigh_tridiagonal(alpha[:k], beta[: k - 1])
        else:
            theta, small = alpha[:1].copy(), np.ones((1, 1))
        residual = 0.0 if happy else b
        self.basis = (basis_vecs[:k], theta, small, small[0].conj(), nrm, residual)
        self.substeps += 1
        if self.substeps > self.cfg.max_substeps:
            raise PropagationError(
                f"no convergence within {self.cfg.max_substeps} substeps",
                error_estimate=residual,
            )

    def _coeffs(self, dt: float) -> np.ndarray:
        _, theta, small, small0, _, _ = self.basis
        return small @ (np.exp(-1j * dt * theta) * small0)

    def _err(self, dt: float) -> float:
        residual = self.basis[5]
        if residual == 0.0:
            return 0.0
        return residual * abs(self._coeffs(dt)[-1])

    def _state_at(self, dt: float) -> np.ndarray:
        vecs, _, _, _, nrm, _ = self.basis
        return nrm * (self._coeffs(dt) @ vecs)

    def advance_to(self, t_target: float) -> np.ndarray:
        while True:
            dt = t_target - self.t
            if dt <= 0.0:
                return self.psi.copy()
            if self.basis is None:
                self._build_basis()
            budget = self.rate
            if self._err(dt) <= budget * dt:
                return self._state_at(dt)
            # largest acceptable substep: warm-started doubling, then bisection
            d = self.dt_hint if self.dt_hint and self.dt_hint < dt else dt
            if self._err(d) <= budget * d:
                lo, hi = d, min(2.0 * d, dt)
                while hi < dt and self._err(hi) <= budget * hi:
                    lo, hi = hi, min(2.0 * hi, dt)
            else:
                hi = d
                while self._err(d) > budget * d:
                    d /= 2.0
                    if d < 1e-12 * max(abs(t_target), 1.0):
                        raise PropagationError(
                            "Krylov substep underflow: residual estimate "
                            f"{self._err(d):.3e} at dt={d:.3e}",
                            error_estimate=self._err(d),
                        )
                lo = d
            for _ in range(3):
                mid = 0.5 * (lo + hi)
                if self._err(mid) <= budget * mid:
                    lo = mid
                else:
                    hi = mid
            self.psi = self._state_at(lo)
            self.t += lo
            self.dt_hint = 1.1 * lo
            self.basis = None


def lanczos_expv(
    h: SparseHamiltonian | sp.csr_matrix,
    psi: np.ndarray,
    tau: float,
    cfg: KrylovConfig | None = None,
) -> np.ndarray:
    """Approximate exp(-i H tau) |psi> with estimated error <= cfg.tolerance.

    ``tau`` may span many internal substeps; the error budget is split
    across them in proportion to their length.  Negative ``tau`` evolves
    backwards.
    """
    cfg = cfg or KrylovConfig()
    if not np.isfinite(tau):
        raise ValueError("time step must be finite")
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"input state not normalized: |psi| = {nrm!r}")
    if tau == 0.0:
        return psi.copy()
    matrix = _as_csr(h)
    if tau < 0.0:
        matrix = -matrix
        tau = -tau
    walker = _KrylovWalker(matrix, psi, rate=cfg.tolerance / tau, cfg=cfg)
    return walker.advance_to(tau)


def exact_expv(eig: EigenDecomposition, psi: np.ndarray, t: float) -> np.ndarray:
    """Dense-oracle evolution V exp(-i Lambda t) V^dagger |psi>."""
    psi = np.asarray(psi)
    if psi.shape != (eig.dimension,):
        raise ValueError(f"state shape {psi.shape} does not match dimension {eig.dimension}")
    coeff = eig.eigenvectors.conj().T @ psi
    return eig.eigenvectors @ (np.exp(-1j * eig.eigenvalues * t) * coeff)


def _check_grid(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-d array")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be sorted ascending with times[0] >= 0")
    return times


def evolve_on_grid(
    h: SparseHamiltonian | sp.csr_matrix,
    psi0: np.ndarray,
    times: np.ndarray,
    observer=None,
    cfg: KrylovConfig | None = None,
    sector_blocked: bool = False,
) -> list:
    """Evolve from t=0 and invoke ``observer(t, psi)`` at every grid time.

    Returns the list of observer results (``(t, psi)`` pairs by default).
    The error budget is ``cfg.tolerance`` per unit time.  With
    ``sector_blocked`` the state is split into total-magnetization
    components that evolve independently in their blocks and are recombined
    before each observation; results agree with full-space evolution within
    tolerance.
    """
    cfg = cfg or KrylovConfig()
    times = _check_grid(times)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if observer is None:
        observer = lambda t, psi: (t, psi)
    matrix = _as_csr(h)

    if not sector_blocked:
        walker = _KrylovWalker(matrix, psi0, rate=cfg.tolerance, cfg=cfg)
        results = []
        for tt in times:
            try:
                state = walker.advance_to(tt)
            except PropagationError as exc:
                raise PropagationError(
                    f"propagation failed in interval ending at t={tt!r}: {exc}",
                    error_estimate=exc.error_estimate,
                    interval=(walker.t, float(tt)),
                ) from exc
            results.append(observer(float(tt), state))
        return results

    length = psi0.shape[0].bit_length() - 1
    decomposition = sector_decomposition(length)
    walkers = []
    for _, indices in decomposition.sectors:
        component = psi0[indices]
        if sqrt(np.vdot(component, component).real) < 1e-14:
            continue
        block = matrix[indices][:, indices].tocsr()
        walkers.append((indices, _KrylovWalker(block, component, rate=cfg.tolerance, cfg=cfg)))
    results = []
    full = np.zeros_like(psi0)
    for tt in times:
        full[:] = 0.0
        for indices, walker in walkers:
            try:
                full[indices] = walker.advance_to(tt)
            except PropagationError as exc:
                raise PropagationError(
                    f"sector propagation failed in interval ending at t={tt!r}: {exc}",
                    error_estimate=exc.error_estimate,
                    interval=(walker.t, float(tt)),
                ) from exc
        results.append(observer(float(tt), full.copy()))
    return results
