"""Resonantly driven three-level Lambda atom.

Levels are ordered ``(a, b, c)``: ``|a>`` is the excited level, ``|b>`` and
``|c>`` the two ground levels.  Units have hbar = 1, so level energies and
Rabi frequencies share one unit (rad / time) and the QFI comes out in time^2.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import InvalidParams, NonNormalizedState, StepTooLarge, UnknownParameter

PARAMETERS = ("wa", "wb", "wc")
LEVEL_INDEX = {"wa": 0, "wb": 1, "wc": 2}

_ALIASES = {
    "wa": "wa", "a": "wa", "omega_a": "wa", "ω_a": "wa",
    "wb": "wb", "b": "wb", "omega_b": "wb", "ω_b": "wb",
    "wc": "wc", "c": "wc", "omega_c": "wc", "ω_c": "wc",
}


def parameter_id(name: str) -> str:
    """Canonical id (``"wa"``, ``"wb"`` or ``"wc"``) for a level-energy parameter."""
    key = str(name).strip()
    try:
        return _ALIASES[key.lower()]
    except KeyError:
        raise UnknownParameter(f"unknown parameter {name!r}; expected one of {', '.join(PARAMETERS)}") from None


def reduce_angle(x: float) -> float:
    """Map an angle onto (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


@dataclass(frozen=True)
class LambdaParams:
    omega_R1: float = 1.0
    omega_R2: float = 1.0
    phi1: float = 0.0
    phi2: float = 0.0
    psi: float = 0.0
    theta: float = math.pi / 2
    omega_a: float = 1.0
    omega_b: float = 0.0
    omega_c: float = 0.5
    hbar: float = field(default=1.0, init=False, repr=False)

    def __post_init__(self):
        for name in ("omega_R1", "omega_R2", "phi1", "phi2", "psi", "theta", "omega_a", "omega_b", "omega_c"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega_R1 < 0 or self.omega_R2 < 0:
            raise InvalidParams("Rabi frequencies must be non-negative")
        if self.omega_R1 == 0 and self.omega_R2 == 0:
            raise InvalidParams("at least one Rabi frequency must be non-zero")

    @property
    def Omega(self) -> float:
        """Generalized Rabi frequency sqrt(omega_R1^2 + omega_R2^2)."""
        return math.hypot(self.omega_R1, self.omega_R2)

    @property
    def alpha(self) -> float:
        """Relative phase phi1 - phi2 - psi reduced to (-pi, pi]."""
        return reduce_angle(self.phi1 - self.phi2 - self.psi)

    @property
    def nu1(self) -> float:
        return self.omega_a - self.omega_b

    @property
    def nu2(self) -> float:
        return self.omega_a - self.omega_c

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.omega_a, self.omega_b, self.omega_c])

    @property
    def equal_rabi(self) -> bool:
        return abs(self.omega_R1 - self.omega_R2) <= 1e-12 * self.Omega

    def with_alpha(self, alpha: float) -> "LambdaParams":
        """Same lasers, initial phase psi chosen so that the relative phase equals ``alpha``."""
        return replace(self, psi=self.phi1 - self.phi2 - alpha)

    def replace(self, **changes) -> "LambdaParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    time: float

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class StateDerivative:
    parameter: str
    components: np.ndarray


def initial_state(params: LambdaParams) -> np.ndarray:
    half = params.theta / 2
    return np.array([0.0, math.cos(half), np.exp(-1j * params.psi) * math.sin(half)], dtype=complex)


def slow_amplitudes(params: LambdaParams, t: float) -> np.ndarray:
    """Interaction-picture amplitudes (c_a, c_b, c_c) at time ``t``."""
    r1, r2 = params.omega_R1, params.omega_R2
    W = params.Omega
    W2 = W * W
    ch, sh = math.cos(params.theta / 2), math.sin(params.theta / 2)
    s_half = math.sin(W * t / 2)
    c_half = math.cos(W * t / 2)
    s_quarter_sq = math.sin(W * t / 4) ** 2
    e1 = np.exp(-1j * params.phi1)
    e2psi = np.exp(-1j * (params.phi2 + params.psi))
    # 1/W prefactor: unit norm and the short-time limit of i dc_a/dt = H c both require it
    ca = 1j * s_half / W * (r1 * e1 * ch + r2 * e2psi * sh)
    cb = ((r2 * r2 + r1 * r1 * c_half) * ch
          - 2 * r1 * r2 * np.exp(1j * (params.phi1 - params.phi2 - params.psi)) * s_quarter_sq * sh) / W2
    cc = (-2 * r1 * r2 * np.exp(-1j * (params.phi1 - params.phi2)) * s_quarter_sq * ch
          + (r1 * r1 + r2 * r2 * c_half) * np.exp(-1j * params.psi) * sh) / W2
    return np.array([ca, cb, cc], dtype=complex)


def evolve(params: LambdaParams, t: float) -> PureState:
    """Closed-form state at time ``t``, free-evolution phases exp(-i w_k t) included."""
    if t < 0:
        raise InvalidParams(f"time must be non-negative, got {t}")
    amps = slow_amplitudes(params, t) * np.exp(-1j * params.energies * t)
    return PureState(amplitudes=amps, time=float(t))


def state_derivative(params: LambdaParams, t: float, k: str) -> StateDerivative:
    """d|psi(t)>/d w_k.

    The slow amplitudes do not depend on the level energies at resonance, so
    only the free phase of level k contributes.
    """
    return derivative_of_state(evolve(params, t), k)


def derivative_of_state(state: PureState, k: str) -> StateDerivative:
    """d|psi>/d w_k from an already evolved state."""
    k = parameter_id(k)
    idx = LEVEL_INDEX[k]
    comp = np.zeros(3, dtype=complex)
    comp[idx] = -1j * state.time * state.amplitudes[idx]
    return StateDerivative(parameter=k, components=comp)


def density_matrix(state: PureState) -> np.ndarray:
    psi = np.asarray(state.amplitudes, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NonNormalizedState(f"state norm is {norm!r}, expected 1")
    return np.outer(psi, psi.conj())


def density_derivative(state: PureState, deriv: StateDerivative) -> np.ndarray:
    """d rho / d w_k = |d psi><psi| + |psi><d psi| for a pure state."""
    outer = np.outer(deriv.components, np.conj(state.amplitudes))
    return outer + outer.conj().T


def interaction_hamiltonian(params: LambdaParams) -> np.ndarray:
    """Rotating-frame coupling -(1/2)(W_R1 e^{-i phi1}|a><b| + W_R2 e^{-i phi2}|a><c|) + h.c."""
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = -0.5 * params.omega_R1 * np.exp(-1j * params.phi1)
    h[0, 2] = -0.5 * params.omega_R2 * np.exp(-1j * params.phi2)
    h[1, 0] = np.conj(h[0, 1])
    h[2, 0] = np.conj(h[0, 2])
    return h


def full_hamiltonian(params: LambdaParams, t: float) -> np.ndarray:
    """Lab-frame H_0 + H_1(t) with the resonant field frequencies."""
    h = np.diag(params.energies).astype(complex)
    h[0, 1] = -0.5 * params.omega_R1 * np.exp(-1j * (params.phi1 + params.nu1 * t))
    h[0, 2] = -0.5 * params.omega_R2 * np.exp(-1j * (params.phi2 + params.nu2 * t))
    h[1, 0] = np.conj(h[0, 1])
    h[2, 0] = np.conj(h[0, 2])
    return h


def max_oracle_step(params: LambdaParams) -> float:
    return 1e-3 * max(1.0, 2 * math.pi / params.Omega)


def evolve_numeric_oracle(params: LambdaParams, t: float, dt: float | None = None) -> PureState:
    """Fixed-step RK4 integration of i d|phi>/dt = H_int |phi> from the initial state.

    The rotating-frame Hamiltonian is constant, so one RK4 step is the linear
    map given by the fourth-order Taylor polynomial of exp(-i H dt).  The
    ``n`` steps are applied by repeated squaring of that step matrix, which is
    the same arithmetic as stepping but O(log n) matrix products.
    """
    if dt is None:
        dt = 1e-4 / params.Omega
    if dt <= 0:
        raise StepTooLarge(f"step must be positive, got {dt}")
    if dt > max_oracle_step(params) * (1 + 1e-12):
        raise StepTooLarge(f"step {dt} exceeds {max_oracle_step(params)}")
    if t < 0:
        raise InvalidParams(f"time must be non-negative, got {t}")
    phi = initial_state(params)
    if t > 0:
        n = max(1, math.ceil(t / dt - 1e-9))
        h = t / n
        a = -1j * h * interaction_hamiltonian(params)
        a2 = a @ a
        step = np.eye(3) + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24
        phi = np.linalg.matrix_power(step, n) @ phi
    return PureState(amplitudes=phi * np.exp(-1j * params.energies * t), time=float(t))


def rk4_propagate(hamiltonian, psi0: np.ndarray, t: float, n_steps: int) -> np.ndarray:
    """Plain RK4 for i d|psi>/dt = H(t)|psi> with a time-dependent Hamiltonian callable."""
    psi = np.asarray(psi0, dtype=complex)
    h = t / n_steps
    s = 0.0
    for _ in range(n_steps):
        k1 = -1j * hamiltonian(s) @ psi
        k2 = -1j * hamiltonian(s + h / 2) @ (psi + h / 2 * k1)
        k3 = -1j * hamiltonian(s + h / 2) @ (psi + h / 2 * k2)
        k4 = -1j * hamiltonian(s + h) @ (psi + h * k3)
        psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    return psi


def is_cpt(params: LambdaParams, tol: float = 1e-9) -> bool:
    """True at coherent population trapping: equal Rabi, theta = pi/2, alpha = +-pi."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if abs(params.omega_R1 - params.omega_R2) > tol * params.Omega:
        return False
    if abs(params.theta - math.pi / 2) > tol:
        return False
    a = params.alpha
    return abs(a - math.pi) <= tol or abs(a + math.pi) <= tol


def cpt_params(omega: float = 1.0, phi1: float = 0.0, phi2: float = 0.0, **energies) -> LambdaParams:
    """Equal-Rabi, theta = pi/2 parameters with psi chosen so that alpha = pi."""
    return LambdaParams(omega_R1=omega, omega_R2=omega, phi1=phi1, phi2=phi2,
                        psi=phi1 - phi2 - math.pi, theta=math.pi / 2, **energies)
