"""Thermodynamic ledger of the collision dynamics.

Sign conventions (fixed once, used everywhere):
  * W(dt) = Tr[(H_SA - U^dag H_SA U) rho_S (x) rho_A] is the energy injected
    by the agent that switches the interaction on and off; positive when the
    switching costs work.
  * Q(dt) = Tr[(U^dag H_A U - H_A) rho_S (x) rho_A] is the energy gained by
    the ancilla; positive when heat is dumped into the environment.
  * First law: dE_S = W - Q, exact for every unitary collision.
  * dS = S(after) - S(before); entropy production Sigma = dS + beta * Q,
    equal to the relative entropy between the post-collision joint state and
    the product of its system marginal with a fresh thermal ancilla.

All entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import dagger, hermitize, kron, partial_trace
from .model import I2, AncillaPrep, CouplingSpec, QubitHamiltonian, build_interaction, gibbs_state


def entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy -Tr[rho ln rho] in nats."""
    w = np.linalg.eigvalsh(hermitize(rho))
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def _log_psd(rho: np.ndarray) -> tuple[np.ndarray, bool]:
    """Matrix log restricted to the support; flags rank deficiency."""
    w, v = np.linalg.eigh(hermitize(rho))
    deficient = bool(np.any(w <= 1e-14))
    w = np.clip(w, 1e-300, None)
    return (v * np.log(w)) @ v.conj().T, deficient


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D(rho || sigma) = Tr[rho (ln rho - ln sigma)], +inf on support mismatch."""
    wr, vr = np.linalg.eigh(hermitize(rho))
    ws, vs = np.linalg.eigh(hermitize(sigma))
    # support check: rho must not populate the kernel of sigma
    ker = np.abs(ws) <= 1e-14
    if np.any(ker):
        overlap = vs[:, ker].conj().T @ hermitize(rho) @ vs[:, ker]
        if np.max(np.abs(overlap)) > 1e-12:
            return math.inf
    log_sigma, _ = _log_psd(sigma)
    s_rho = -float(np.sum(wr[wr > 0] * np.log(wr[wr > 0])))
    return float(-s_rho - np.trace(hermitize(rho) @ log_sigma).real)


def mutual_information(joint: np.ndarray, dims: tuple[int, int]) -> float:
    """I(S:A) = S(rho_S) + S(rho_A) - S(rho_SA) >= 0."""
    rho_s = partial_trace(joint, dims, "S")
    rho_a = partial_trace(joint, dims, "A")
    return entropy(rho_s) + entropy(rho_a) - entropy(joint)


def collision_work(u: np.ndarray, h_sa: np.ndarray, rho_s: np.ndarray,
                   rho_a: np.ndarray) -> float:
    """Switching work of one collision: decrease of the interaction energy."""
    joint = kron(rho_s, rho_a)
    m = h_sa - dagger(u) @ h_sa @ u
    return float(np.trace(m @ joint).real)


def collision_heat(u: np.ndarray, h_a: np.ndarray, rho_s: np.ndarray,
                   rho_a: np.ndarray) -> float:
    """Heat dissipated into the ancilla during one collision (h_a is 2x2)."""
    joint = kron(rho_s, rho_a)
    ha_full = kron(I2, h_a)
    m = dagger(u) @ ha_full @ u - ha_full
    return float(np.trace(m @ joint).real)


def _current_kernel(v: np.ndarray, h: np.ndarray) -> np.ndarray:
    """V H V - (1/2){V^2, H}; equals -(1/2)[V,[V,H]]."""
    v2 = v @ v
    return v @ h @ v - 0.5 * (v2 @ h + h @ v2)


def work_current(coupling: CouplingSpec, hs: QubitHamiltonian, ancilla: AncillaPrep,
                 rho_s: np.ndarray) -> float:
    """Continuous-limit work current at state rho_s (g0-level J units)."""
    v = build_interaction(CouplingSpec(coupling.j, coupling.dt, "none"))
    h0 = kron(hs.matrix(), I2) + kron(I2, ancilla.hamiltonian().matrix())
    k = _current_kernel(v, h0)
    joint = kron(rho_s, ancilla.state())
    return float(np.trace(k @ joint).real)


def heat_current(coupling: CouplingSpec, ancilla: AncillaPrep, rho_s: np.ndarray) -> float:
    """Continuous-limit heat current into the ancilla at state rho_s."""
    v = build_interaction(CouplingSpec(coupling.j, coupling.dt, "none"))
    ha = kron(I2, ancilla.hamiltonian().matrix())
    k = _current_kernel(v, ha)
    joint = kron(rho_s, ancilla.state())
    return float(np.trace(k @ joint).real)


def current_evaluators(coupling: CouplingSpec, hs: QubitHamiltonian,
                       ancilla: AncillaPrep):
    """Precomputed (work, heat) current evaluator for repeated calls.

    Returns f(rho_s) -> (w_dot, q_dot), identical to work_current and
    heat_current but with the operator kernels built once.
    """
    v = build_interaction(CouplingSpec(coupling.j, coupling.dt, "none"))
    h0 = kron(hs.matrix(), I2) + kron(I2, ancilla.hamiltonian().matrix())
    ha = kron(I2, ancilla.hamiltonian().matrix())
    k_w = _current_kernel(v, h0)
    k_q = _current_kernel(v, ha)
    rho_th = ancilla.state()

    def currents(rho_s: np.ndarray) -> tuple[float, float]:
        joint = kron(rho_s, rho_th)
        return (float(np.trace(k_w @ joint).real),
                float(np.trace(k_q @ joint).real))

    return currents


def entropy_production_collision(rho_s_before: np.ndarray, joint_after: np.ndarray,
                                 ancilla: AncillaPrep,
                                 check_identities: bool = True) -> tuple[float, dict]:
    """Entropy production of one collision, with its two equivalent forms.

    Returns (sigma, checks) where sigma = dS_sys + beta * Q and checks
    carries the joint-relative-entropy and mutual-information evaluations
    (empty when check_identities is False or the ancilla is at infinite
    beta, where the relative entropies are +inf).
    """
    rho_th = ancilla.state()
    rho_s_after = partial_trace(joint_after, (2, 2), "S")
    rho_a_after = partial_trace(joint_after, (2, 2), "A")
    ds = entropy(rho_s_after) - entropy(rho_s_before)
    q = float(np.trace(ancilla.hamiltonian().matrix() @ (rho_a_after - rho_th)).real)
    if math.isinf(ancilla.beta):
        # beta*Q diverges for any real heat exchange; round-off-sized Q is 0
        sigma = ds if abs(q) <= 1e-14 else math.inf
        return sigma, {"skipped": "infinite beta: relative entropy support mismatch"}
    sigma = ds + ancilla.beta * q
    checks: dict = {}
    if check_identities:
        checks["joint_relative_entropy"] = relative_entropy(
            joint_after, kron(rho_s_after, rho_th))
        checks["mutual_information_form"] = (
            mutual_information(joint_after, (2, 2))
            + relative_entropy(rho_a_after, rho_th))
    return sigma, checks


def weak_coupling_sigma_rate(traj, hs: QubitHamiltonian, beta: float,
                             dt: float | None = None) -> np.ndarray:
    """Weak-coupling diagnostic rate -d/dt D(rho_S(t) || gibbs(beta, H_S)).

    Finite-difference estimate (central in the interior) on a uniformly
    sampled trajectory; accepts a Trajectory or a list of states plus dt.
    Only valid as the entropy production rate in the weak-coupling limit;
    for the collision ledger it is a diagnostic, and the comparison against
    the per-collision sigma exposes where the weak-coupling formulas stop
    applying.
    """
    if hasattr(traj, "states"):
        states, dt = traj.states, traj.dt
    else:
        states = traj
        if dt is None:
            raise ValueError("dt required when passing a bare state list")
    ref = gibbs_state(hs, beta)
    d = np.array([relative_entropy(rho, ref) for rho in states])
    return -np.gradient(d, dt)


@dataclass
class ThermoLedger:
    """Per-collision thermodynamic records and their cumulative sums."""

    dt: float
    beta: float
    w: list[float] = field(default_factory=list)
    q: list[float] = field(default_factory=list)
    de_s: list[float] = field(default_factory=list)
    ds: list[float] = field(default_factory=list)
    sigma: list[float] = field(default_factory=list)

    def record(self, w: float, q: float, de_s: float, ds: float) -> None:
        self.w.append(w)
        self.q.append(q)
        self.de_s.append(de_s)
        self.ds.append(ds)
        self.sigma.append(ds + self.beta * q)

    @property
    def n(self) -> int:
        return len(self.w)

    def cumulative(self, key: str) -> np.ndarray:
        return np.cumsum(getattr(self, key))

    def rates(self, key: str) -> np.ndarray:
        return np.asarray(getattr(self, key)) / self.dt

    def first_law_residuals(self) -> np.ndarray:
        """dE_S - W + Q per collision; zero up to round-off by unitarity."""
        return (np.asarray(self.de_s) - np.asarray(self.w) + np.asarray(self.q))
