"""Numerical integration of the extended equations of motion.

    phi'^a  = omega^{ab} d_b H
    c'^a    = A^a_b c^b                       A^a_b = omega^{ac} d_c d_b H
    cb'_b   = -cb_a A^a_b
    lam'_b  = -A^a_b lam_a - i cb_a omega^{ac} d_c d_d d_b H c^d

Matrix mode evolves the fundamental solutions J (for c) and Kbar (for cb)
as real matrices and drops the ghost-bilinear source of the lam equation.
Grassmann mode carries c, cb, lam as numeric Grassmann numbers and keeps
every term, with lam complexified for the explicit -i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .algebra import GradedPolynomial, Var, partial_even
from .charges import PhaseModel
from .grassmann import GrassmannAlgebra

__all__ = [
    "ExtendedStateMatrix",
    "ExtendedStateGrassmann",
    "Trajectory",
    "CompiledHamiltonian",
    "matrix_state",
    "grassmann_state",
    "rhs",
    "integrate",
    "monitor",
    "flow_map",
    "jacobi_vs_finite_difference",
    "order_check",
]


class CompiledHamiltonian:
    """Gradient, Hessian and third derivatives of H as vectorized polynomials."""

    def __init__(self, model: PhaseModel):
        H = model.H
        if not H.is_real():
            raise ValueError("the Hamiltonian must have real coefficients for numerical integration")
        N = model.N
        self.model = model
        self.N = N
        d = lambda p, a: partial_even(p, Var("phi", a + 1))  # noqa: E731
        grad = [d(H, a) for a in range(N)]
        hess = [[d(g, b) for b in range(N)] for g in grad]
        third = [[[d(h, c) for c in range(N)] for h in row] for row in hess]
        polys: List[GradedPolynomial] = [H] + grad
        polys += [h for row in hess for h in row]
        polys += [t for plane in third for row in plane for t in row]
        monomials: Dict[tuple, int] = {}
        for p in polys:
            for exps, _ in p.terms:
                monomials.setdefault(exps[:N], len(monomials))
        if not monomials:
            monomials[(0,) * N] = 0
        self.exponents = np.array(list(monomials), dtype=int).reshape(len(monomials), N)
        coeffs = np.zeros((len(polys), len(monomials)))
        for row, p in enumerate(polys):
            for (exps, _), c in p.terms.items():
                coeffs[row, monomials[exps[:N]]] += float(c.re)
        self._C_H = coeffs[0]
        self._C_grad = coeffs[1:1 + N]
        self._C_hess = coeffs[1 + N:1 + N + N * N]
        self._C_third = coeffs[1 + N + N * N:]
        self.omega = np.array([[float(x) for x in row] for row in model.table.omega_upper])
        self.omega_lower = np.array([[float(x) for x in row] for row in model.table.omega_lower])
        self.max_power = int(self.exponents.max(initial=0))

    # -- real evaluation ----------------------------------------------
    def monomials(self, x: np.ndarray) -> np.ndarray:
        return np.prod(x[None, :] ** self.exponents, axis=1)

    def energy(self, x: np.ndarray) -> float:
        return float(self._C_H @ self.monomials(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self._C_grad @ self.monomials(x)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        return (self._C_hess @ self.monomials(x)).reshape(self.N, self.N)

    def third(self, x: np.ndarray) -> np.ndarray:
        return (self._C_third @ self.monomials(x)).reshape(self.N, self.N, self.N)

    def flow(self, x: np.ndarray) -> np.ndarray:
        return self.omega @ self.gradient(x)

    def generator(self, x: np.ndarray) -> np.ndarray:
        """``A^a_b = omega^{ac} d_c d_b H``."""
        return self.omega @ self.hessian(x)

    # -- Grassmann evaluation -----------------------------------------
    def grassmann_monomials(self, alg: GrassmannAlgebra, phi: np.ndarray) -> np.ndarray:
        """Monomial values at Grassmann-valued phi (shape (N, S)) -> (M, S)."""
        powers = [[alg.one()] for _ in range(self.N)]
        for a in range(self.N):
            for _ in range(self.max_power):
                powers[a].append(alg.mul(powers[a][-1], phi[a]))
        out = np.empty((len(self.exponents), alg.size), dtype=complex)
        for m, exps in enumerate(self.exponents):
            value = alg.one()
            for a, e in enumerate(exps):
                if e:
                    value = alg.mul(value, powers[a][e])
            out[m] = value
        return out


@dataclass
class ExtendedStateMatrix:
    t: float
    phi: np.ndarray
    lam: np.ndarray
    J: np.ndarray
    Kbar: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate([self.phi, self.lam, self.J.ravel(), self.Kbar.ravel()])

    @classmethod
    def unpack(cls, t: float, y: np.ndarray, N: int) -> "ExtendedStateMatrix":
        return cls(t, y[:N], y[N:2 * N], y[2 * N:2 * N + N * N].reshape(N, N),
                   y[2 * N + N * N:].reshape(N, N))


@dataclass
class ExtendedStateGrassmann:
    """Each field is an (N, 2**G) complex array of Grassmann coefficients."""

    t: float
    G: int
    phi: np.ndarray
    lam: np.ndarray
    c: np.ndarray
    cbar: np.ndarray
    standard_seeds: bool = False

    def pack(self) -> np.ndarray:
        return np.stack([self.phi, self.lam, self.c, self.cbar])

    @classmethod
    def unpack(cls, t: float, y: np.ndarray, G: int, standard: bool) -> "ExtendedStateGrassmann":
        return cls(t, G, y[0], y[1], y[2], y[3], standard)


def matrix_state(model: PhaseModel, phi0: Sequence[float], lam0: Optional[Sequence[float]] = None,
                 t0: float = 0.0) -> ExtendedStateMatrix:
    N = model.N
    phi = np.asarray(phi0, dtype=float)
    if phi.shape != (N,):
        raise ValueError(f"phi0 must have {N} entries")
    lam = np.zeros(N) if lam0 is None else np.asarray(lam0, dtype=float)
    return ExtendedStateMatrix(t0, phi, lam, np.eye(N), np.eye(N))


def grassmann_state(model: PhaseModel, phi0: Sequence[float], lam0: Optional[Sequence[float]] = None,
                    c0: Optional[np.ndarray] = None, cbar0: Optional[np.ndarray] = None,
                    G: Optional[int] = None, t0: float = 0.0) -> ExtendedStateGrassmann:
    """Grassmann initial data; by default ``c^a = theta_a`` and ``cb_a = theta_{N+a}``."""
    N = model.N
    standard = c0 is None and cbar0 is None
    if G is None:
        G = 2 * N if standard else None
        if G is None:
            raise ValueError("pass G when supplying explicit ghost initial data")
    alg = GrassmannAlgebra.of(G)
    phi = np.zeros((N, alg.size), dtype=complex)
    phi[:, 0] = np.asarray(phi0, dtype=float)
    lam = np.zeros((N, alg.size), dtype=complex)
    if lam0 is not None:
        lam[:, 0] = np.asarray(lam0, dtype=float)
    if standard:
        if G < 2 * N:
            raise ValueError(f"standard seeding needs G >= {2 * N}")
        c0 = np.array([alg.seed(a + 1) for a in range(N)])
        cbar0 = np.array([alg.seed(N + a + 1) for a in range(N)])
    c0 = np.zeros((N, alg.size), dtype=complex) if c0 is None else np.asarray(c0, dtype=complex)
    cbar0 = np.zeros((N, alg.size), dtype=complex) if cbar0 is None else np.asarray(cbar0, dtype=complex)
    if c0.shape != (N, alg.size) or cbar0.shape != (N, alg.size):
        raise ValueError(f"ghost data must have shape ({N}, {alg.size})")
    return ExtendedStateGrassmann(t0, G, phi, lam, c0, cbar0, standard)


def _rhs_matrix(ham: CompiledHamiltonian, y: np.ndarray) -> np.ndarray:
    N = ham.N
    s = ExtendedStateMatrix.unpack(0.0, y, N)
    A = ham.generator(s.phi)
    return np.concatenate([
        ham.flow(s.phi),
        -A.T @ s.lam,
        (A @ s.J).ravel(),
        (-A.T @ s.Kbar).ravel(),
    ])


def _rhs_grassmann(ham: CompiledHamiltonian, alg: GrassmannAlgebra, y: np.ndarray) -> np.ndarray:
    phi, lam, c, cb = y
    mono = ham.grassmann_monomials(alg, phi)
    N = ham.N
    grad = ham._C_grad @ mono
    hess = (ham._C_hess @ mono).reshape(N, N, alg.size)
    third = (ham._C_third @ mono).reshape(N, N, N, alg.size)
    omega = ham.omega
    A = np.einsum("ac,cbs->abs", omega, hess)
    T3 = np.einsum("ac,cdbs->adbs", omega, third)
    dphi = omega @ grad
    dc = alg.mul(A, c[None, :, :]).sum(axis=1)
    dcb = -alg.mul(cb[:, None, :], A).sum(axis=0)
    dlam = -alg.mul(A, lam[:, None, :]).sum(axis=0)
    # cb_a T3^a_{db} c^d, kept in that order
    left = alg.mul(cb[:, None, None, :], T3).sum(axis=0)
    source = alg.mul(left, c[:, None, :]).sum(axis=0)
    dlam = dlam - 1j * source
    return np.stack([dphi, dlam, dc, dcb])


def rhs(model: PhaseModel, state, ham: Optional[CompiledHamiltonian] = None):
    """Time derivative of a matrix or Grassmann state, returned as the same state type."""
    ham = ham or CompiledHamiltonian(model)
    if isinstance(state, ExtendedStateMatrix):
        return ExtendedStateMatrix.unpack(1.0, _rhs_matrix(ham, state.pack()), ham.N)
    alg = GrassmannAlgebra.of(state.G)
    return ExtendedStateGrassmann.unpack(1.0, _rhs_grassmann(ham, alg, state.pack()),
                                         state.G, state.standard_seeds)


def _rk4(f, y0: np.ndarray, dt: float, steps: int) -> np.ndarray:
    out = np.empty((steps + 1,) + y0.shape, dtype=y0.dtype)
    out[0] = y = y0
    half = dt / 2
    for k in range(steps):
        k1 = f(y)
        k2 = f(y + half * k1)
        k3 = f(y + half * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y
    return out


@dataclass
class Trajectory:
    mode: str
    model: PhaseModel
    times: np.ndarray
    states: np.ndarray
    G: int = 0
    standard_seeds: bool = False
    ham: CompiledHamiltonian = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    def state(self, k: int):
        if self.mode == "matrix":
            return ExtendedStateMatrix.unpack(self.times[k], self.states[k], self.model.N)
        return ExtendedStateGrassmann.unpack(self.times[k], self.states[k], self.G, self.standard_seeds)

    @property
    def phi(self) -> np.ndarray:
        N = self.model.N
        if self.mode == "matrix":
            return self.states[:, :N]
        return self.states[:, 0, :, 0].real

    @property
    def lam(self) -> np.ndarray:
        N = self.model.N
        if self.mode == "matrix":
            return self.states[:, N:2 * N]
        return self.states[:, 1]

    def jacobians(self):
        """(J, Kbar) stacks; Grassmann mode reads them off the seed-linear coefficients."""
        N = self.model.N
        if self.mode == "matrix":
            J = self.states[:, 2 * N:2 * N + N * N].reshape(-1, N, N)
            K = self.states[:, 2 * N + N * N:].reshape(-1, N, N)
            return J, K
        if not self.standard_seeds:
            raise ValueError("Jacobi matrices need the standard seeding c^a = theta_a, cb_a = theta_{N+a}")
        c = self.states[:, 2]
        cb = self.states[:, 3]
        J = np.stack([c[:, :, 1 << k] for k in range(N)], axis=-1).real
        K = np.stack([cb[:, :, 1 << (N + k)] for k in range(N)], axis=-1).real
        return J, K


def integrate(model: PhaseModel, state0, dt: float, steps: int, mode: Optional[str] = None) -> Trajectory:
    """Fixed-step classical RK4, sampled every step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    ham = CompiledHamiltonian(model)
    inferred = "matrix" if isinstance(state0, ExtendedStateMatrix) else "grassmann"
    if mode is not None and mode != inferred:
        raise ValueError(f"mode {mode!r} does not match a {inferred} state")
    if inferred == "matrix":
        y = _rk4(lambda v: _rhs_matrix(ham, v), state0.pack(), dt, steps)
        return Trajectory("matrix", model, state0.t + dt * np.arange(steps + 1), y, ham=ham)
    alg = GrassmannAlgebra.of(state0.G)
    y = _rk4(lambda v: _rhs_grassmann(ham, alg, v), state0.pack(), dt, steps)
    return Trajectory("grassmann", model, state0.t + dt * np.arange(steps + 1), y,
                      G=state0.G, standard_seeds=state0.standard_seeds, ham=ham)


MONITOR_KEYS = ("energy_drift", "symplectic_defect", "duality_defect", "nh_defect", "k_defect")


def monitor_series(traj: Trajectory) -> Dict[str, np.ndarray]:
    """Per-sample defects; ``monitor`` reports their maxima."""
    ham = traj.ham or CompiledHamiltonian(traj.model)
    phi = traj.phi
    J, K = traj.jacobians()
    N = traj.model.N
    w = ham.omega_lower
    eye = np.eye(N)
    energy = np.array([ham.energy(x) for x in phi])
    grads = np.array([ham.gradient(x) for x in phi])
    symp = np.abs(np.einsum("tba,bc,tcd->tad", J, w, J) - w).max(axis=(1, 2))
    dual = np.abs(np.einsum("tba,tbc->tac", K, J) - eye).max(axis=(1, 2))
    nh = np.einsum("ta,tak->tk", grads, J)
    pair = np.einsum("tak,ab,tbl->tkl", J, w, J)
    return {
        "energy_drift": np.abs(energy - energy[0]),
        "symplectic_defect": symp,
        "duality_defect": dual,
        "nh_defect": np.abs(nh - nh[0]).max(axis=1),
        "k_defect": np.abs(pair - pair[0]).max(axis=(1, 2)),
    }


def monitor(model: PhaseModel, traj: Trajectory) -> Dict[str, float]:
    if traj.model is not model and traj.model.H != model.H:
        raise ValueError("trajectory was produced by a different model")
    return {k: float(v.max()) for k, v in monitor_series(traj).items()}


def flow_map(model: PhaseModel, phi0: Sequence[float], dt: float, steps: int,
             ham: Optional[CompiledHamiltonian] = None) -> np.ndarray:
    """phi after ``steps`` RK4 steps of the plain Hamilton equations."""
    ham = ham or CompiledHamiltonian(model)
    y = np.asarray(phi0, dtype=float)
    half = dt / 2
    f = ham.flow
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + half * k1)
        k3 = f(y + half * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _steps_for(t: float, dt: float) -> int:
    steps = max(1, int(round(t / dt)))
    return steps


def jacobi_vs_finite_difference(model: PhaseModel, phi0: Sequence[float], delta: float, t: float,
                                dt: float = 1e-3) -> float:
    """Max |J(t) e_k - central difference of the flow map| over basis directions."""
    ham = CompiledHamiltonian(model)
    steps = _steps_for(t, dt)
    h = t / steps
    traj = integrate(model, matrix_state(model, phi0), h, steps)
    J = traj.jacobians()[0][-1]
    phi0 = np.asarray(phi0, dtype=float)
    worst = 0.0
    for k in range(model.N):
        e = np.zeros(model.N)
        e[k] = delta
        fd = (flow_map(model, phi0 + e, h, steps, ham) - flow_map(model, phi0 - e, h, steps, ham)) / (2 * delta)
        worst = max(worst, float(np.abs(fd - J[:, k]).max()))
    return worst


def order_check(model: PhaseModel, phi0: Sequence[float], t: float, dt: float) -> Dict[str, float]:
    """Ratios of errors between step sizes dt and dt/2; about 16 for a fourth-order scheme.

    ``state`` uses self-convergence: |y(dt) - y(dt/2)| / |y(dt/2) - y(dt/4)|.
    The defect ratios compare each monitor maximum at dt and dt/2.
    """
    runs = []
    for k in range(3):
        h = dt / 2 ** k
        steps = _steps_for(t, h)
        traj = integrate(model, matrix_state(model, phi0), t / steps, steps)
        runs.append((traj.states[-1], monitor(model, traj)))
    e1 = np.abs(runs[0][0] - runs[1][0]).max()
    e2 = np.abs(runs[1][0] - runs[2][0]).max()
    out = {"state": float(e1 / e2)}
    for key in ("energy_drift", "symplectic_defect", "duality_defect"):
        out[key] = runs[0][1][key] / runs[1][1][key] if runs[1][1][key] else float("inf")
    return out
