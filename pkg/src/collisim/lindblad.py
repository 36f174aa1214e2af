"""GKSL generator induced by the collision coupling, and its steady states.

The second-order expansion of the collision unitary gives
    drho/dt = -i[H_S, rho] + sum_jk gamma_jk (S_j rho S_k^dag
              - (1/2){S_k^dag S_j, rho}),
with jumps S_j the Pauli system factors of the interaction and rates
    gamma_jk = Tr[A_k^dag A_j rho_A^th],   A_j = sum_m J_jm sigma_m,
the thermal auto-correlations of the ancilla factors (g0 absorbed in J).
The rate matrix is a Gram matrix in a state-weighted inner product, hence
Hermitian and positive semidefinite: the generator is a valid GKSL one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import clamp_to_density, dagger, hermitize, kron, unvec, vec
from .model import PAULIS, AncillaPrep, CouplingSpec, QubitHamiltonian
from .observables import SteadyStateReport, make_report

# Two smallest superoperator singular values below this mark a degenerate
# (non-unique, initial-state dependent) steady-state family.
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GKSLGenerator:
    """Coherent part, jump operators, and Hermitian PSD rate matrix."""

    h_sys: np.ndarray
    jumps: tuple[np.ndarray, ...]
    rates: np.ndarray

    def __post_init__(self):
        if len(self.jumps) != self.rates.shape[0]:
            raise ValueError("rate matrix size must match the jump list")
        if self.rates.size == 0:
            return
        if np.max(np.abs(self.rates - self.rates.conj().T)) > 1e-12:
            raise ValueError("rate matrix must be Hermitian")
        w = np.linalg.eigvalsh(self.rates)
        if w.min() < -1e-10:
            raise ValueError(f"rate matrix not PSD: eigenvalue {w.min():.3e}")


def build_generator(coupling: CouplingSpec, hs: QubitHamiltonian,
                    ancilla: AncillaPrep) -> GKSLGenerator:
    """Generator induced by a coupling spec on a thermal ancilla.

    Jumps are the Pauli system factors with a nonzero row in J; rows that
    vanish are pruned. Expects g0-level (sqrt_dt-scaled) couplings so that
    the rates are dt-independent.
    """
    rho_th = ancilla.state()
    rows = [l for l in range(3) if np.any(coupling.j[l] != 0.0)]
    jumps = tuple(PAULIS[l] for l in rows)
    a_ops = [sum(coupling.j[l, m] * PAULIS[m] for m in range(3)) for l in rows]
    n = len(rows)
    rates = np.zeros((n, n), dtype=complex)
    for jj in range(n):
        for kk in range(n):
            rates[jj, kk] = np.trace(dagger(a_ops[kk]) @ a_ops[jj] @ rho_th)
    rates = (rates + rates.conj().T) / 2
    return GKSLGenerator(h_sys=hs.matrix(), jumps=jumps, rates=rates)


def apply_generator(gen: GKSLGenerator, rho: np.ndarray) -> np.ndarray:
    """L(rho): traceless Hermitian time derivative of the state."""
    out = -1j * (gen.h_sys @ rho - rho @ gen.h_sys)
    for jj, s_j in enumerate(gen.jumps):
        for kk, s_k in enumerate(gen.jumps):
            g = gen.rates[jj, kk]
            if g == 0:
                continue
            sks = dagger(s_k) @ s_j
            out = out + g * (s_j @ rho @ dagger(s_k) - 0.5 * (sks @ rho + rho @ sks))
    return out


@dataclass(frozen=True, eq=False)
class Superoperator:
    """d^2 x d^2 matrix acting on column-stacked states."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(math.sqrt(self.matrix.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))


def vectorize(gen: GKSLGenerator) -> Superoperator:
    """Column-stacking representation: vec(A rho B) = (B^T kron A) vec(rho)."""
    d = gen.h_sys.shape[0]
    eye = np.eye(d, dtype=complex)
    h = gen.h_sys
    m = -1j * (kron(eye, h) - kron(h.T, eye))
    for jj, s_j in enumerate(gen.jumps):
        for kk, s_k in enumerate(gen.jumps):
            g = gen.rates[jj, kk]
            if g == 0:
                continue
            sks = dagger(s_k) @ s_j
            m = m + g * (kron(dagger(s_k).T, s_j)
                         - 0.5 * (kron(eye, sks) + kron(sks.T, eye)))
    return Superoperator(matrix=m)


def steady_state_kernel(superop: Superoperator,
                        hs: QubitHamiltonian | None = None) -> SteadyStateReport:
    """Steady state as the kernel of the generator, via SVD.

    The right-singular vector of the smallest singular value, Hermitized and
    trace-normalized, is rho*. When the two smallest singular values both
    fall below DEGENERACY_TOL the steady state is non-unique and the report
    is flagged degenerate (pick by iteration from a definite initial state
    instead).
    """
    m = superop.matrix
    _, s, vh = np.linalg.svd(m)
    v = vh.conj().T[:, -1]
    raw = unvec(v)
    raw = hermitize(raw)
    tr = np.trace(raw).real
    if abs(tr) < 1e-12:
        raise ValueError("kernel vector has vanishing trace; cannot normalize to a state")
    rho = clamp_to_density(raw / tr)
    degenerate = bool(s[-1] < DEGENERACY_TOL and s[-2] < DEGENERACY_TOL)
    residual = float(np.max(np.abs(superop.apply(rho))))
    if hs is None:
        hs = QubitHamiltonian(0.0)
    return make_report(rho, hs, method="kernel", residual=residual,
                       degenerate=degenerate)


def steady_state_of(coupling: CouplingSpec, hs: QubitHamiltonian,
                    ancilla: AncillaPrep) -> SteadyStateReport:
    """Convenience: build, vectorize, and solve the kernel in one call."""
    return steady_state_kernel(vectorize(build_generator(coupling, hs, ancilla)), hs)


def evolve_continuous(gen: GKSLGenerator, rho0: np.ndarray, t: float) -> np.ndarray:
    """exp(t L) applied to rho0.

    Uses the general-matrix exponential of the vectorized generator
    (scipy.linalg.expm: Al-Mohy/Higham scaling-and-squaring with degree-13
    Pade approximant).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    prop = scipy.linalg.expm(t * vectorize(gen).matrix)
    return clamp_to_density(unvec(prop @ vec(rho0.astype(complex))))
