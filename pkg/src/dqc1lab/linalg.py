"""Dense complex matrix kernel used by every other module.

Matrices are plain ``numpy.ndarray`` objects with dtype complex128. All
functions are pure and never mutate their inputs, so values can be shared
freely across threads. The qubit convention throughout the package is that
the logical qubit is tensor factor 0 (the leftmost factor).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10


def as_cmatrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex128 array, rejecting NaN/Inf entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def unitarity_residual(u) -> float:
    """``||U^dag U - I||_F``; zero for exactly unitary ``u``."""
    u = np.asarray(u, dtype=complex)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def require_unitary(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    u = as_cmatrix(u)
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    res = unitarity_residual(u)
    if res > tol:
        raise ValueError(f"matrix is not unitary (residual {res:.3e} > {tol:.1e})")
    return u


def hermiticity_residual(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m - m.conj().T))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with block ordering (a (x) b)[i*rb+k, j*cb+l] = a[i,j] b[k,l]."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def partial_trace(m, dim_keep: int, dim_drop: int, keep_first: bool = True) -> np.ndarray:
    """Trace out one tensor factor of a square matrix.

    ``m`` must be square of side ``dim_keep * dim_drop``. With
    ``keep_first=True`` the kept factor is the leftmost one (global index
    ``i_keep * dim_drop + i_drop``). Implemented as an explicit sum over the
    dropped index so the index bookkeeping stays auditable.
    """
    m = as_cmatrix(m)
    side = dim_keep * dim_drop
    if m.shape != (side, side):
        raise ValueError(
            f"matrix side {m.shape} does not match dim_keep*dim_drop = {side}"
        )
    out = np.zeros((dim_keep, dim_keep), dtype=complex)
    if keep_first:
        for k in range(dim_drop):
            out += m[k::dim_drop, k::dim_drop]
    else:
        for k in range(dim_drop):
            block = slice(k * dim_keep, (k + 1) * dim_keep)
            out += m[block, block]
    return out


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; the columns of ``eigenvectors``
    are the matching orthonormal eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(m) -> HermitianEig:
    """Eigendecomposition for Hermitian input; rejects non-Hermitian matrices."""
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if hermiticity_residual(m) > HERMITICITY_TOL * max(1.0, frobenius(m)):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed random unitary, deterministic under a fixed seed.

    A complex standard-normal matrix is orthonormalized by QR and the R
    diagonal's phases are folded back into Q, which makes the distribution
    exactly Haar (plain QR alone is not). ``seed`` may be an integer or a
    ``numpy.random.Generator``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def matrix_to_json(m) -> dict:
    """Matrix JSON object: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major."""
    m = as_cmatrix(m)
    data = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if len(data) != rows * cols:
        raise ValueError(
            f"matrix JSON data length {len(data)} does not equal rows*cols = {rows * cols}"
        )
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    return as_cmatrix(flat.reshape(rows, cols))
