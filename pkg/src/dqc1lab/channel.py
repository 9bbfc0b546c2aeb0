"""The logical-qubit dynamics of a DQC1 circuit as a quantum channel.

A channel is held as its Stinespring dilation: a unitary ``V`` on the
(n+1)-qubit register together with an environment state on the ancillas
(maximally mixed unless stated otherwise),

    E(rho) = tr_env{ V (rho (x) env) V^dag }.

Conventions fixed here and relied on by the tests:

* the logical qubit is tensor factor 0, the environment factors follow;
* Kraus operators are indexed by environment basis pairs (i, j) with
  K_ij = sqrt(b_j) <i|V|j>; for a maximally mixed environment the
  computational basis is used (the eigenbasis is degenerate there);
* the Choi matrix uses the unnormalized Bell state |phi> = |00> + |11>,
  assembled as Choi[2i+k, 2j+l] = E(|i><j|)[k, l], so tr(Choi) = 2 and
  ``choi_apply`` reproduces ``DQC1Channel.apply``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_cmatrix,
    frobenius,
    hermitian_eig,
    hermiticity_residual,
    partial_trace,
    require_unitary,
    tensor,
)
from .register import ancillas_of, trace_estimation_unitary

FORWARD = "forward"
REVERSE = "reverse"

COMPLETENESS_TOL = 1e-10
CHOI_PSD_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-10

#: Dense 2^(n+1) matrices cap the register size at desk scale.
MAX_ANCILLAS = 11


def _validate_density(rho, side: int, what: str) -> np.ndarray:
    rho = as_cmatrix(rho)
    if rho.shape != (side, side):
        raise ValueError(f"{what} must have shape {(side, side)}, got {rho.shape}")
    if hermiticity_residual(rho) > 1e-10 * max(1.0, frobenius(rho)):
        raise ValueError(f"{what} must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10 or abs(np.trace(rho).imag) > 1e-10:
        raise ValueError(f"{what} must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-12:
        raise ValueError(f"{what} must be positive semidefinite")
    return rho


@dataclass(frozen=True)
class DQC1Channel:
    """A dilation (V, n, direction) with the environment state on the ancillas."""

    dilation_unitary: np.ndarray
    n: int
    direction: str = FORWARD
    env_state: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ANCILLAS:
            raise ValueError(f"n must be in [1, {MAX_ANCILLAS}], got {self.n}")
        v = require_unitary(self.dilation_unitary)
        if v.shape[0] != 2 ** (self.n + 1):
            raise ValueError(
                f"dilation side {v.shape[0]} does not match 2^(n+1) for n={self.n}"
            )
        object.__setattr__(self, "dilation_unitary", v)
        dn = 2**self.n
        env = self.env_state
        env = np.eye(dn, dtype=complex) / dn if env is None else _validate_density(env, dn, "env_state")
        object.__setattr__(self, "env_state", env)
        if self.direction not in (FORWARD, REVERSE):
            raise ValueError(f"direction must be {FORWARD!r} or {REVERSE!r}")

    @property
    def env_dim(self) -> int:
        return 2**self.n

    def apply(self, rho) -> np.ndarray:
        """E(rho) = tr_env{V (rho (x) env) V^dag} for any 2x2 input operator."""
        rho = as_cmatrix(rho)
        if rho.shape != (2, 2):
            raise ValueError(f"input operator must be 2x2, got {rho.shape}")
        v = self.dilation_unitary
        g = v @ tensor(rho, self.env_state) @ v.conj().T
        return partial_trace(g, 2, self.env_dim, keep_first=True)

    def reverse(self) -> "DQC1Channel":
        """Time-reversed channel: dilation V^dag with the same environment.

        Reversing twice returns the original dilation exactly.
        """
        flipped = REVERSE if self.direction == FORWARD else FORWARD
        return DQC1Channel(
            dilation_unitary=self.dilation_unitary.conj().T,
            n=self.n,
            direction=flipped,
            env_state=self.env_state,
        )

    def kraus(self) -> "KrausSet":
        return kraus_from_dilation(self.dilation_unitary, self.env_state)


def trace_estimation_channel(u, env_state=None) -> DQC1Channel:
    """Forward channel of the Hadamard-sandwiched controlled-U trace circuit."""
    v = trace_estimation_unitary(u)
    return DQC1Channel(dilation_unitary=v, n=ancillas_of(v), env_state=env_state)


@dataclass(frozen=True)
class KrausSet:
    """Operator-sum representation; trace preservation is checked on construction.

    ``labels`` are environment (i, j) index pairs for dilation-derived sets
    and single eigenvalue indices for Choi-derived sets.
    """

    operators: tuple[np.ndarray, ...]
    labels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.operators) != len(self.labels):
            raise ValueError("operators and labels must have equal length")
        defect = self.completeness_defect()
        if defect > COMPLETENESS_TOL:
            raise ValueError(
                f"Kraus set is not trace preserving (||sum K^dag K - I||_F = {defect:.3e})"
            )

    def completeness_defect(self) -> float:
        """||sum_k K^dag K - I||_F (trace-preservation direction)."""
        dim = self.operators[0].shape[0]
        acc = np.zeros((dim, dim), dtype=complex)
        for k in self.operators:
            acc += k.conj().T @ k
        return frobenius(acc - np.eye(dim))

    def apply(self, rho) -> np.ndarray:
        rho = as_cmatrix(rho)
        out = np.zeros_like(rho)
        for k in self.operators:
            out += k @ rho @ k.conj().T
        return out


def kraus_from_dilation(v, env_state=None) -> KrausSet:
    """Kraus operators K_ij = sqrt(b_j) <i|V|j> over the environment eigenbasis.

    For a maximally mixed environment the (degenerate) eigenbasis is fixed to
    the computational basis, which reproduces the textbook table
    K_ij = 2^(-n/2) <i|V|j> entry for entry.
    """
    v = require_unitary(v)
    side = v.shape[0]
    if side % 2 != 0 or side < 4:
        raise ValueError(f"dilation side must be 2 * env_dim >= 4, got {side}")
    denv = side // 2
    if env_state is None:
        env_state = np.eye(denv, dtype=complex) / denv
    env_state = _validate_density(env_state, denv, "env_state")

    uniform = frobenius(env_state - np.eye(denv) / denv) <= 1e-12
    if uniform:
        weights = np.full(denv, 1.0 / denv)
        vt = v
    else:
        eig = hermitian_eig(env_state)
        weights = np.clip(eig.eigenvalues, 0.0, None)
        basis = np.kron(np.eye(2, dtype=complex), eig.eigenvectors)
        vt = basis.conj().T @ v @ basis

    blocks = vt.reshape(2, denv, 2, denv)
    operators = []
    labels = []
    for i in range(denv):
        for j in range(denv):
            operators.append(np.sqrt(weights[j]) * np.ascontiguousarray(blocks[:, i, :, j]))
            labels.append((i, j))
    return KrausSet(operators=tuple(operators), labels=tuple(labels))


def unitality_defect(ks: KrausSet) -> float:
    """||sum_k K K^dag - I||_F; zero iff the Kraus set is unital.

    Note the K K^dag ordering: this is the unitality direction, not the
    trace-preservation one.
    """
    dim = ks.operators[0].shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for k in ks.operators:
        acc += k @ k.conj().T
    return frobenius(acc - np.eye(dim))


@dataclass(frozen=True)
class ChoiMatrix:
    """4x4 Choi matrix in the unnormalized Bell convention (trace 2)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        if m.shape != (4, 4):
            raise ValueError(f"Choi matrix must be 4x4, got {m.shape}")
        if hermiticity_residual(m) > 1e-10:
            raise ValueError("Choi matrix must be Hermitian")
        if np.linalg.eigvalsh(m).min() < -CHOI_PSD_TOL:
            raise ValueError("Choi matrix must be positive semidefinite")
        if abs(np.trace(m).real - 2.0) > 1e-10:
            raise ValueError("Choi matrix must have trace 2 (unnormalized Bell convention)")
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, tol: float = DEFAULT_RANK_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def choi_numeric(ch: DQC1Channel) -> ChoiMatrix:
    """Choi matrix assembled from the channel's action on the four basis operators."""
    c = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis_op = np.zeros((2, 2), dtype=complex)
            basis_op[i, j] = 1.0
            image = ch.apply(basis_op)
            c[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = image
    return ChoiMatrix((c + c.conj().T) / 2.0)


def choi_closed_form(re_tr: float, im_tr: float, n: int) -> ChoiMatrix:
    """Closed-form Choi matrix of the trace-estimation channel.

    Only the normalized trace contributions t = re_tr/2^n and s = im_tr/2^n
    enter; everything else cancels through the Frobenius identity
    sum |u_ij|^2 = 2^n for unitary U.
    """
    bound = float(2 ** (2 * n))
    if re_tr**2 + im_tr**2 > bound * (1.0 + 1e-9):
        raise ValueError(
            f"|tr U|^2 = {re_tr ** 2 + im_tr ** 2:.6g} exceeds the unitary bound {bound:.6g}"
        )
    t = re_tr / 2**n
    s = im_tr / 2**n
    hi, lo = (1.0 + t) / 2.0, (1.0 - t) / 2.0
    ys = 1j * s / 2.0
    m = np.array(
        [
            [hi, ys, ys, hi],
            [-ys, lo, lo, -ys],
            [-ys, lo, lo, -ys],
            [hi, ys, ys, hi],
        ],
        dtype=complex,
    )
    return ChoiMatrix(m)


def choi_apply(choi: ChoiMatrix, rho) -> np.ndarray:
    """Act with the channel through its Choi matrix: tr_in{(rho^T (x) I) Choi}."""
    rho = as_cmatrix(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"input operator must be 2x2, got {rho.shape}")
    m = tensor(rho.T, np.eye(2, dtype=complex)) @ choi.matrix
    return partial_trace(m, 2, 2, keep_first=False)


def kraus_from_choi(choi: ChoiMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> KrausSet:
    """Minimal Kraus set from the Choi eigendecomposition.

    One operator per eigenvalue above ``rank_tol``; an eigenpair (lam, w)
    contributes K[k, i] = sqrt(lam) * w[2i + k].
    """
    eig = hermitian_eig(choi.matrix)
    operators = []
    labels = []
    idx = 0
    for lam, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam > rank_tol:
            operators.append(np.sqrt(lam) * vec.reshape(2, 2).T)
            labels.append((idx,))
            idx += 1
    return KrausSet(operators=tuple(operators), labels=tuple(labels))
