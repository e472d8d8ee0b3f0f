"""Quantum and classical Fisher information, HSS and Cramer-Rao bounds.

Two routes to the QFI are provided and kept separate on purpose:

* the SLD route (:func:`sld`, :func:`qfi_single`, :func:`qfim`) diagonalizes
  rho, solves the Lyapunov-type SLD equation in its eigenbasis and takes
  ``F_ij = Re Tr[rho L_i L_j]``; it works for any density matrix;
* the pure-state route (:func:`qfi_pure`, :func:`qfim_pure`) uses
  ``F_ij = 4 Re(<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>)``.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import model
from .errors import (
    DimensionMismatch,
    DuplicateParameter,
    InvalidPOVM,
    InvalidState,
    MetrologyError,
    NonHermitianInput,
    SingularMatrix,
    SingularQFIM,
    ZeroDiagonal,
)
from .linalg import RANK_TOL, commutator_trace, hermitian_deviation, herm_eig, mat_inverse
from .model import LambdaParams

STATE_TOL = 1e-10
PROB_FLOOR = 1e-12
# relative to the largest QFIM entry
ZERO_TOL = 1e-10
DIAGONAL_TOL = 1e-10


def parse_subset(subset) -> tuple[str, ...]:
    """Normalize ``"wa+wb"`` or ``["wa", "wb"]`` to an ordered tuple of canonical ids."""
    if isinstance(subset, str):
        items = [s for s in subset.replace(",", "+").split("+") if s.strip()]
    else:
        items = list(subset)
    ids = tuple(model.parameter_id(s) for s in items)
    if not ids:
        raise MetrologyError("parameter subset is empty")
    if len(set(ids)) != len(ids):
        raise DuplicateParameter(f"parameter subset {'+'.join(ids)} contains duplicates")
    return ids


@dataclass(frozen=True)
class SLDOperator:
    parameter: str | None
    matrix: np.ndarray


@dataclass(frozen=True)
class QFIMatrix:
    parameters: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.entries, dtype=float)
        if f.shape != (len(self.parameters), len(self.parameters)):
            raise DimensionMismatch(f"QFIM shape {f.shape} does not match parameters {self.parameters}")
        scale = max(1.0, float(np.max(np.abs(f)))) if f.size else 1.0
        if np.max(np.abs(f - f.T)) > 1e-10 * scale:
            raise NonHermitianInput(float(np.max(np.abs(f - f.T))))
        object.__setattr__(self, "entries", 0.5 * (f + f.T))

    @property
    def p(self) -> int:
        return len(self.parameters)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    def __getitem__(self, key) -> float:
        i, j = key
        if isinstance(i, str):
            i = self.parameters.index(model.parameter_id(i))
        if isinstance(j, str):
            j = self.parameters.index(model.parameter_id(j))
        return float(self.entries[i, j])


@dataclass(frozen=True)
class POVM:
    elements: tuple

    def __post_init__(self):
        elems = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not elems:
            raise InvalidPOVM("POVM has no elements")
        dim = elems[0].shape
        total = np.zeros(dim, dtype=complex)
        for n, e in enumerate(elems):
            if e.shape != dim or len(dim) != 2 or dim[0] != dim[1]:
                raise InvalidPOVM(f"element {n} has shape {e.shape}, expected {dim}")
            if hermitian_deviation(e) > 1e-10:
                raise InvalidPOVM(f"element {n} is not Hermitian")
            lo = herm_eig(0.5 * (e + e.conj().T), tol=np.inf).eigenvalues[0]
            if lo < -1e-12:
                raise InvalidPOVM(f"element {n} is not positive (eigenvalue {lo:.3e})")
            total += e
        dev = float(np.max(np.abs(total - np.eye(dim[0]))))
        if dev > 1e-10:
            raise InvalidPOVM(f"elements do not sum to identity (max deviation {dev:.3e})")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def projective(cls, basis) -> "POVM":
        """Rank-one projectors onto the columns of a unitary ``basis``."""
        basis = np.asarray(basis, dtype=complex)
        return cls(tuple(np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1])))

    @classmethod
    def eigenbasis(cls, operator) -> "POVM":
        """Projective measurement in the eigenbasis of a Hermitian operator (e.g. an SLD)."""
        return cls.projective(herm_eig(operator, tol=1e-8).eigenvectors)


@dataclass(frozen=True)
class EstimationConfig:
    """``M`` repetitions of the experiment; the number of parameters p comes from the QFIM."""

    M: int = 1

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise MetrologyError(f"M must be a positive integer, got {self.M!r}")


@dataclass(frozen=True)
class VarianceBounds:
    parameters: tuple[str, ...]
    delta_independent: float
    delta_simultaneous: float
    per_parameter_simultaneous: tuple[float, ...]


def _check_state(rho: np.ndarray):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    dev = hermitian_deviation(rho)
    if dev > STATE_TOL:
        raise InvalidState(f"density matrix not Hermitian (deviation {dev:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > STATE_TOL:
        raise InvalidState(f"density matrix trace is {tr.real:.12g}, expected 1")


def sld(rho, drho, rank_tol: float = RANK_TOL, parameter: str | None = None, eig=None,
        check: bool = True) -> SLDOperator:
    """Symmetric logarithmic derivative solving d rho = (L rho + rho L) / 2.

    In the eigenbasis of rho, ``L_mn = 2 drho_mn / (p_m + p_n)`` wherever
    ``p_m + p_n > rank_tol`` and zero elsewhere.  ``eig`` may carry a
    precomputed decomposition of ``rho``; ``check=False`` skips input
    validation for callers that built rho and drho themselves.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if check:
        _check_state(rho)
        if drho.shape != rho.shape:
            raise DimensionMismatch(f"drho shape {drho.shape} differs from rho shape {rho.shape}")
        if hermitian_deviation(drho) > STATE_TOL:
            raise NonHermitianInput(hermitian_deviation(drho))
        if abs(np.trace(drho)) > STATE_TOL * max(1.0, float(np.max(np.abs(drho)))):
            raise InvalidState(f"drho is not traceless (trace {np.trace(drho):.3e})")
    if eig is None:
        eig = herm_eig(rho)
    p, v = eig.eigenvalues, eig.eigenvectors
    if p[0] < -STATE_TOL:
        raise InvalidState(f"density matrix has negative eigenvalue {p[0]:.3e}")
    d = v.conj().T @ drho @ v
    denom = p[:, None] + p[None, :]
    support = denom > rank_tol
    ld = np.zeros_like(d)
    ld[support] = 2.0 * d[support] / denom[support]
    L = v @ ld @ v.conj().T
    return SLDOperator(parameter=parameter, matrix=0.5 * (L + L.conj().T))


def sld_residual(rho, drho, L) -> float:
    """max |drho - (L rho + rho L)/2| restricted to the support of rho."""
    rho = np.asarray(rho, dtype=complex)
    eig = herm_eig(rho)
    proj_v = eig.eigenvectors[:, eig.eigenvalues > RANK_TOL]
    r = np.asarray(drho) - 0.5 * (L @ rho + rho @ L)
    # only pairs with at least one index on the support are constrained
    return float(max(np.max(np.abs(proj_v.conj().T @ r)), np.max(np.abs(r @ proj_v))))


def model_slds(params: LambdaParams, t: float, subset, rank_tol: float = RANK_TOL):
    """rho(t) and the SLDs of the requested level energies, sharing one eigendecomposition."""
    ids = parse_subset(subset)
    state = model.evolve(params, t)
    rho = model.density_matrix(state)
    eig = herm_eig(rho)
    out = {}
    for k in ids:
        drho = model.density_derivative(state, model.derivative_of_state(state, k))
        out[k] = sld(rho, drho, rank_tol=rank_tol, parameter=k, eig=eig, check=False)
    return rho, out


def qfi_from_sld(rho, L: SLDOperator) -> float:
    return max(float(np.trace(rho @ L.matrix @ L.matrix).real), 0.0)


def qfi_single(params: LambdaParams, t: float, k: str) -> float:
    """QFI of level energy ``k`` via the SLD route, Tr[rho L_k^2]."""
    rho, ls = model_slds(params, t, [k])
    return qfi_from_sld(rho, ls[model.parameter_id(k)])


def qfi_pure(params: LambdaParams, t: float, k: str) -> float:
    """Pure-state QFI 4(<d psi|d psi> - |<psi|d psi>|^2)."""
    psi = model.evolve(params, t).amplitudes
    d = model.state_derivative(params, t, k).components
    return max(4.0 * float((np.vdot(d, d) - abs(np.vdot(psi, d)) ** 2).real), 0.0)


def qfim(params: LambdaParams, t: float, subset) -> QFIMatrix:
    """F_ij = (1/2) Tr[rho {L_i, L_j}] over an ordered subset of level energies."""
    ids = parse_subset(subset)
    rho, ls = model_slds(params, t, ids)
    n = len(ids)
    f = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            li, lj = ls[ids[i]].matrix, ls[ids[j]].matrix
            f[i, j] = f[j, i] = 0.5 * np.trace(rho @ (li @ lj + lj @ li)).real
    return QFIMatrix(parameters=ids, entries=f)


def qfim_pure(params: LambdaParams, t: float, subset) -> QFIMatrix:
    ids = parse_subset(subset)
    psi = model.evolve(params, t).amplitudes
    ds = [model.state_derivative(params, t, k).components for k in ids]
    n = len(ids)
    f = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            val = np.vdot(ds[i], ds[j]) - np.vdot(ds[i], psi) * np.vdot(psi, ds[j])
            f[i, j] = f[j, i] = 4.0 * val.real
    return QFIMatrix(parameters=ids, entries=f)


def classical_fisher(rho, drhos: Sequence, povm: POVM, prob_floor: float = PROB_FLOOR) -> np.ndarray:
    """CFIM sum_x (d_i p_x)(d_j p_x) / p_x with p_x = Tr[Pi_x rho], d_i p_x = Tr[Pi_x d_i rho].

    Outcomes with p_x <= ``prob_floor`` contribute nothing.
    """
    rho = np.asarray(rho, dtype=complex)
    if povm.elements[0].shape != rho.shape:
        raise DimensionMismatch(f"POVM acts on {povm.elements[0].shape}, state is {rho.shape}")
    n = len(drhos)
    out = np.zeros((n, n))
    for e in povm.elements:
        px = np.trace(e @ rho).real
        if px <= prob_floor:
            continue
        dp = np.array([np.trace(e @ d).real for d in drhos])
        out += np.outer(dp, dp) / px
    return out


def cfim(params: LambdaParams, t: float, povm: POVM, subset, prob_floor: float = PROB_FLOOR) -> np.ndarray:
    """CFIM of the model state for ``povm``, probabilities differentiated analytically."""
    ids = parse_subset(subset)
    state = model.evolve(params, t)
    rho = model.density_matrix(state)
    drhos = [model.density_derivative(state, model.derivative_of_state(state, k)) for k in ids]
    return classical_fisher(rho, drhos, povm, prob_floor)


def hilbert_schmidt_speed(drho) -> float:
    """sqrt((1/2) Tr[(d rho)^2]); needs no diagonalization."""
    drho = np.asarray(drho, dtype=complex)
    return float(np.sqrt(max(0.5 * np.sum(np.abs(drho) ** 2), 0.0)))


def hss(params: LambdaParams, t: float, k: str) -> float:
    state = model.evolve(params, t)
    drho = model.density_derivative(state, model.derivative_of_state(state, k))
    return hilbert_schmidt_speed(drho)


def saturability_witness(params: LambdaParams, t: float, subset) -> float:
    """max over pairs |Tr(rho [L_i, L_j])|; zero means the multi-parameter QCRB is attainable."""
    ids = parse_subset(subset)
    if len(ids) < 2:
        raise MetrologyError("saturability witness needs at least two parameters")
    rho, ls = model_slds(params, t, ids)
    worst = 0.0
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            worst = max(worst, abs(commutator_trace(rho, ls[ids[i]].matrix, ls[ids[j]].matrix)))
    return worst


def _scale(F: QFIMatrix) -> float:
    return float(np.max(np.abs(F.entries))) if F.entries.size else 0.0


def _check_diagonal(F: QFIMatrix):
    scale = _scale(F)
    for j, k in enumerate(F.parameters):
        if scale == 0.0 or F.entries[j, j] <= ZERO_TOL * scale:
            raise ZeroDiagonal(k, F.entries[j, j])


def variance_bounds(F: QFIMatrix, cfg: EstimationConfig = EstimationConfig()) -> VarianceBounds:
    """Independent and simultaneous total-variance bounds.

    ``delta_independent`` is sum_j 1/(M F_jj); ``per_parameter_simultaneous``
    holds [F^-1]_jj / M; ``delta_simultaneous`` is Tr(F^-1)/(M p), the
    simultaneous total variance credited with the factor-p resource saving.
    """
    _check_diagonal(F)
    M = cfg.M
    diag = np.diagonal(F.entries)
    delta_i = float(np.sum(1.0 / (M * diag)))
    try:
        inv = mat_inverse(F.entries, mode="exact", rank_tol=RANK_TOL * _scale(F))
    except SingularMatrix as exc:
        raise SingularQFIM(exc.eigenvalue, exc.eigenvector, F.parameters) from None
    per = tuple(float(x) / M for x in np.diagonal(inv))
    return VarianceBounds(
        parameters=F.parameters,
        delta_independent=delta_i,
        delta_simultaneous=float(np.trace(inv)) / (M * F.p),
        per_parameter_simultaneous=per,
    )


def is_diagonal(F: QFIMatrix, tol: float = DIAGONAL_TOL) -> bool:
    off = F.entries - np.diag(np.diagonal(F.entries))
    return bool(np.all(np.abs(off) <= tol * _scale(F)))


def performance_ratio(F: QFIMatrix, cfg: EstimationConfig = EstimationConfig()) -> float:
    """R = delta_independent / delta_simultaneous, in [0, p].

    A diagonal QFIM gives R = p exactly.  That also covers the decoupled case
    where some F_jj vanishes together with its row: both total variances
    diverge through the same 1/F_jj term and their ratio tends to p.
    """
    if _scale(F) == 0.0:
        raise ZeroDiagonal(F.parameters[0], 0.0)
    if is_diagonal(F):
        return float(F.p)
    b = variance_bounds(F, cfg)
    return b.delta_independent / b.delta_simultaneous
