"""Small dense complex linear algebra.

Matrices are plain ``numpy.ndarray`` objects.  The Hermitian eigensolver is a
cyclic complex Jacobi iteration, which is plenty for the 3x3 (and at most
16x16) operators used here and keeps the SLD machinery free of LAPACK.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput, SingularMatrix

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10
MAX_DIM = 16
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class HermitianEigen:
    """Eigenvalues in ascending order, eigenvectors as the columns of a unitary."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_deviation(a: np.ndarray) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - dagger(a))))


def _square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def herm_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the usual real symmetric Jacobi rotation.  Ties in the returned
    ordering keep the solver's column order.
    """
    a = _square(np.array(a, dtype=complex))
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatch(f"dimension {n} exceeds {MAX_DIM}")
    dev = hermitian_deviation(a)
    if dev > tol:
        raise NonHermitianInput(dev)
    a = (0.5 * (a + a.conj().T)).tolist()
    v = np.eye(n, dtype=complex).tolist()
    # scalar loops: far cheaper than numpy slicing at n <= 16
    scale = math.sqrt(sum(abs(x) ** 2 for row in a for x in row))
    if scale > 0.0:
        for _ in range(_MAX_SWEEPS):
            off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
            if off <= 1e-16 * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p][q]
                    g = abs(apq)
                    if g <= 1e-300:
                        continue
                    ph = apq / g
                    tau = (a[q][q].real - a[p][p].real) / (2.0 * g)
                    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    # rotation acting on columns p, q: [[c, s], [-s*conj(ph), c*conj(ph)]]
                    r10 = -s * ph.conjugate()
                    r11 = c * ph.conjugate()
                    for row in a:
                        x, y = row[p], row[q]
                        row[p] = c * x + r10 * y
                        row[q] = s * x + r11 * y
                    rp, rq = a[p], a[q]
                    r10c, r11c = r10.conjugate(), r11.conjugate()
                    for j in range(n):
                        x, y = rp[j], rq[j]
                        rp[j] = c * x + r10c * y
                        rq[j] = s * x + r11c * y
                    rp[q] = rq[p] = 0j
                    rp[p] = complex(rp[p].real, 0.0)
                    rq[q] = complex(rq[q].real, 0.0)
                    for row in v:
                        x, y = row[p], row[q]
                        row[p] = c * x + r10 * y
                        row[q] = s * x + r11 * y
    a = np.array(a, dtype=complex)
    v = np.array(v, dtype=complex)

    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigen(eigenvalues=w[order], eigenvectors=v[:, order])


def mat_inverse(a, mode: str = "exact", rank_tol: float = RANK_TOL) -> np.ndarray:
    """Inverse (``mode="exact"``) or Moore-Penrose pseudo-inverse of a real symmetric matrix.

    ``exact`` requires every eigenvalue above ``rank_tol`` and raises
    :class:`SingularMatrix` with the offending eigenpair otherwise.  ``pseudo``
    drops eigenvalues with modulus at or below ``rank_tol``.
    """
    a = _square(np.asarray(a, dtype=float))
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    dev = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if dev > HERMITIAN_TOL * scale:
        raise NonHermitianInput(dev)
    eig = herm_eig(0.5 * (a + a.T), tol=np.inf)
    w = eig.eigenvalues
    v = eig.eigenvectors.real
    if mode == "exact":
        if w[0] <= rank_tol:
            raise SingularMatrix(w[0], v[:, 0])
        inv_w = 1.0 / w
    elif mode == "pseudo":
        keep = np.abs(w) > rank_tol
        inv_w = np.zeros_like(w)
        inv_w[keep] = 1.0 / w[keep]
    else:
        raise ValueError(f"unknown inversion mode {mode!r}")
    out = (v * inv_w) @ v.T
    return 0.5 * (out + out.T)


def commutator_trace(rho, l1, l2) -> complex:
    """``Tr(rho [l1, l2])``; purely imaginary when all three are Hermitian."""
    rho, l1, l2 = (np.asarray(m, dtype=complex) for m in (rho, l1, l2))
    for name, m in (("rho", rho), ("L1", l1), ("L2", l2)):
        _square(m, name)
    if not rho.shape == l1.shape == l2.shape:
        raise DimensionMismatch(f"shapes {rho.shape}, {l1.shape}, {l2.shape} are not conformable")
    return complex(np.trace(rho @ (l1 @ l2 - l2 @ l1)))
