"""Physical ingredients: qubit Hamiltonians, thermal ancillas, couplings.

Basis convention: the qubit basis is (|e>, |g>) with sigma_z = diag(+1, -1),
so H = (omega/2) sigma_z puts the excited state at energy +omega/2 and the
thermal state diag((1 - tanh(beta omega/2))/2, (1 + tanh(beta omega/2))/2)
has the smaller entry first. Figure labels |1> and |0> map to |e> and |g>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import exp_minus_i, hermitize, kron

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |e><g|
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
PAULI_LABELS = ("x", "y", "z")

KET_E = np.array([1, 0], dtype=complex)
KET_G = np.array([0, 1], dtype=complex)


@dataclass(frozen=True)
class QubitHamiltonian:
    """Free qubit Hamiltonian (omega/2) sigma_z, hbar = 1."""

    omega: float

    def __post_init__(self):
        if not math.isfinite(self.omega):
            raise ValueError("omega must be finite")

    def matrix(self) -> np.ndarray:
        return (self.omega / 2) * SIGMA_Z


@dataclass(frozen=True)
class AncillaPrep:
    """Thermal ancilla preparation: inverse temperature and frequency.

    beta may be +-inf (zero-temperature limits); omega_a must be finite.
    """

    beta: float
    omega_a: float = 1.0

    def __post_init__(self):
        if math.isnan(self.beta):
            raise ValueError("beta must be a real number or +-inf")
        if not math.isfinite(self.omega_a):
            raise ValueError("omega_a must be finite")

    def hamiltonian(self) -> QubitHamiltonian:
        return QubitHamiltonian(self.omega_a)

    def state(self) -> np.ndarray:
        return gibbs_state(QubitHamiltonian(self.omega_a), self.beta)


@dataclass(frozen=True, eq=False)
class CouplingSpec:
    """Two-body coupling sum_lm J_lm sigma_l (x) sigma_m with collision time dt.

    The J_lm are the g0-level constants; with scaling='sqrt_dt' the built
    interaction carries the extra dt**-0.5 so the induced master equation is
    dt-independent. scaling='none' uses the J_lm verbatim.
    """

    j: np.ndarray            # 3x3 real, (x,y,z) x (x,y,z)
    dt: float
    scaling: str = "sqrt_dt"

    def __post_init__(self):
        jm = np.array(self.j, dtype=float)
        if jm.shape != (3, 3):
            raise ValueError("j must be a 3x3 real matrix")
        if not np.all(np.isfinite(jm)):
            raise ValueError("all J_lm must be finite")
        object.__setattr__(self, "j", jm)
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.scaling not in ("sqrt_dt", "none"):
            raise ValueError(f"unknown scaling {self.scaling!r}")
        self.j.setflags(write=False)

    @property
    def scale(self) -> float:
        return self.dt ** -0.5 if self.scaling == "sqrt_dt" else 1.0

    def with_dt(self, dt: float) -> "CouplingSpec":
        return CouplingSpec(self.j.copy(), dt, self.scaling)

    def zero_odd_moments(self) -> bool:
        """True when every ancilla factor has zero thermal average.

        Holds exactly when the sigma_z ancilla column vanishes (no J_lz
        entries); the three named interaction families all satisfy it.
        """
        return bool(np.all(self.j[:, 2] == 0.0))


def diagonal_coupling(j_x: float, j_y: float, dt: float, scaling: str = "sqrt_dt") -> CouplingSpec:
    """J_x sigma_x sigma_x + J_y sigma_y sigma_y family."""
    j = np.zeros((3, 3))
    j[0, 0], j[1, 1] = j_x, j_y
    return CouplingSpec(j, dt, scaling)


def ssc_coupling(j_x: float, j_y: float, j_zy: float, dt: float,
                 scaling: str = "sqrt_dt") -> CouplingSpec:
    """Coherence-generating family: diagonal XX+YY plus a sigma_z sigma_y term."""
    j = np.zeros((3, 3))
    j[0, 0], j[1, 1], j[2, 1] = j_x, j_y, j_zy
    return CouplingSpec(j, dt, scaling)


@dataclass(frozen=True)
class SscAngles:
    """Angle parameterization of the coherence-generating coupling.

    J_x = m cos(alpha) cos(gamma), J_y = m cos(alpha) sin(gamma),
    J_zy = m sin(alpha); alpha in [0, pi/2) measures the weight of the
    dephasing (parallel) term against the diagonal (perpendicular) one.
    """

    alpha: float
    gamma: float
    magnitude: float = 1.0

    def __post_init__(self):
        if not 0 <= self.alpha < np.pi / 2:
            raise ValueError("alpha must lie in [0, pi/2)")
        if not -np.pi <= self.gamma <= np.pi:
            raise ValueError("gamma must lie in [-pi, pi]")

    def j_values(self) -> tuple[float, float, float]:
        m = self.magnitude
        return (m * np.cos(self.alpha) * np.cos(self.gamma),
                m * np.cos(self.alpha) * np.sin(self.gamma),
                m * np.sin(self.alpha))


def ssc_to_coupling(angles: SscAngles, dt: float, scaling: str = "sqrt_dt") -> CouplingSpec:
    """CouplingSpec with exactly the three SSC entries set."""
    j_x, j_y, j_zy = angles.j_values()
    return ssc_coupling(j_x, j_y, j_zy, dt, scaling)


def coupling_to_ssc(spec: CouplingSpec) -> SscAngles:
    """Recover (alpha, gamma, magnitude) from an SSC-family CouplingSpec."""
    j_x, j_y, j_zy = spec.j[0, 0], spec.j[1, 1], spec.j[2, 1]
    perp = math.hypot(j_x, j_y)
    alpha = math.atan2(j_zy, perp)
    gamma = math.atan2(j_y, j_x)
    return SscAngles(alpha, gamma, math.hypot(perp, j_zy))


def gibbs_state(h, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H)/Z of a Hamiltonian.

    Accepts a QubitHamiltonian or any Hermitian matrix. beta = +inf returns
    the normalized ground-space projector (-inf the top eigenspace); a
    degenerate extremal eigenspace at infinite beta is an error because the
    limit depends on the approach path.
    """
    hm = h.matrix() if isinstance(h, QubitHamiltonian) else np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh(hm)
    if math.isinf(beta):
        target = w[0] if beta > 0 else w[-1]
        sel = np.abs(w - target) <= 1e-12 * max(1.0, np.max(np.abs(w)))
        if np.count_nonzero(sel) > 1:
            raise ValueError("ill-defined zero-temperature limit: extremal eigenspace degenerate")
        p = (v[:, sel] @ v[:, sel].conj().T)
        return p / np.trace(p).real
    # subtract the max exponent for overflow safety at large |beta|
    x = -beta * w
    x = x - np.max(x)
    pops = np.exp(x)
    pops /= pops.sum()
    return (v * pops) @ v.conj().T


def build_interaction(spec: CouplingSpec) -> np.ndarray:
    """4x4 interaction Hamiltonian s * sum_lm J_lm sigma_l (x) sigma_m."""
    v = np.zeros((4, 4), dtype=complex)
    for l in range(3):
        for m in range(3):
            c = spec.j[l, m]
            if c != 0.0:
                v = v + c * kron(PAULIS[l], PAULIS[m])
    return hermitize(v) * spec.scale


def total_hamiltonian(hs: QubitHamiltonian, ha: QubitHamiltonian,
                      hsa: np.ndarray) -> np.ndarray:
    return kron(hs.matrix(), I2) + kron(I2, ha.matrix()) + hsa


def collision_unitary(hs: QubitHamiltonian, ha: QubitHamiltonian,
                      hsa: np.ndarray, dt: float) -> np.ndarray:
    """Joint propagator exp(-i dt (H_S + H_A + H_SA)) of one collision."""
    if hsa.shape != (4, 4):
        raise ValueError("interaction must act on the 4-dimensional joint space")
    return exp_minus_i(total_hamiltonian(hs, ha, hsa), dt)


def bloch_state(x: float, y: float, z: float) -> np.ndarray:
    """rho = (I + x sx + y sy + z sz)/2; the Bloch vector must have norm <= 1."""
    n = math.sqrt(x * x + y * y + z * z)
    if n > 1 + 1e-12:
        raise ValueError(f"Bloch vector norm {n} exceeds 1")
    return (I2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z) / 2


def pure_state(theta: float, phi: float = 0.0) -> np.ndarray:
    """|psi><psi| with |psi> = cos(theta)|e> + e^{i phi} sin(theta)|g>."""
    ket = np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)], dtype=complex)
    return np.outer(ket, ket.conj())


# Initial state of the transient figure panels: cos(15pi/16)|1> + sin(15pi/16)|0>.
FIG3_THETA = 15 * np.pi / 16

NAMED_STATES = {
    "ground": lambda: np.outer(KET_G, KET_G.conj()),
    "excited": lambda: np.outer(KET_E, KET_E.conj()),
    "plus": lambda: pure_state(np.pi / 4),
    "maximally_mixed": lambda: I2 / 2,
    "fig3": lambda: pure_state(FIG3_THETA),
}
