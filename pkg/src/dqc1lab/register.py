"""One-clean-qubit register states, circuits and measurement statistics.

A register is one logical qubit with polarization ``alpha`` (Bloch-z
coefficient, 1 = clean, 0 = maximally mixed) followed by ``n`` maximally
mixed ancilla qubits. The logical qubit is always tensor factor 0. Exact
statistics (``mu_of``, ``p_zero``) and finite-shot trace estimation
(``sample_trace``) both refer only to sigma^z measurements on the logical
qubit; estimating the imaginary part of a trace is done by modifying the
circuit, not the observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HADAMARD,
    ID2,
    PAULI_Z,
    as_cmatrix,
    haar_unitary,
    matrix_from_json,
    require_unitary,
    tensor,
)

BASIS_Z = "z"
BASIS_Y = "y"

#: Polarizations below this are treated as exactly alpha = 0.
ALPHA_FLOOR = 1e-9

MAX_ANCILLAS = 11


class InfiniteTemperatureError(ValueError):
    """Trace estimation is undefined for an unpolarized (alpha = 0) logical qubit."""


def parse_scalar(token: str) -> float:
    """Parse a real scalar, allowing a trailing 'pi' factor ("2pi", "-0.5pi", "pi")."""
    text = token.strip().lower()
    if text.endswith("pi"):
        coef = text[:-2].strip()
        if coef in ("", "+"):
            return math.pi
        if coef == "-":
            return -math.pi
        return float(coef) * math.pi
    return float(text)


@dataclass(frozen=True)
class RegisterSpec:
    """Physical description of a DQC1 instance: ancilla count, polarization,
    logical-qubit frequency and the ancilla frequencies entering H_A."""

    n: int
    alpha: float
    omega: float = 1.0
    ancilla_freqs: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ANCILLAS:
            raise ValueError(f"n must be in [1, {MAX_ANCILLAS}], got {self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        freqs = tuple(self.ancilla_freqs) or (1.0,) * self.n
        if len(freqs) != self.n or any(f <= 0.0 for f in freqs):
            raise ValueError("ancilla_freqs must hold n positive frequencies")
        object.__setattr__(self, "ancilla_freqs", freqs)

    @property
    def dim(self) -> int:
        return 2 ** (self.n + 1)


def logical_state(alpha: float) -> np.ndarray:
    """(I + alpha sigma^z)/2 for the logical qubit alone."""
    return (ID2 + alpha * PAULI_Z) / 2.0


def initial_state(spec: RegisterSpec) -> np.ndarray:
    """Register density matrix ((I + alpha sigma^z)/2) (x) I_{2^n}/2^n."""
    dn = 2**spec.n
    return tensor(logical_state(spec.alpha), np.eye(dn, dtype=complex) / dn)


def iswap(theta: float) -> np.ndarray:
    """Parameterized two-qubit iSWAP family; its normalized real trace is cos^2(theta/4)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, 1j * s, 0],
            [0, 1j * s, c, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )


def named_unitary(source: str) -> tuple[np.ndarray, int]:
    """Resolve a named target-unitary family to (matrix, ancilla count).

    Families: "iswap:theta" (2 ancillas), "identity:n", "haar:n:seed".
    """
    parts = source.split(":")
    kind = parts[0].strip().lower()
    try:
        if kind == "iswap" and len(parts) == 2:
            return iswap(parse_scalar(parts[1])), 2
        if kind == "identity" and len(parts) == 2:
            n = int(parts[1])
            return np.eye(2**n, dtype=complex), n
        if kind == "haar" and len(parts) == 3:
            n, seed = int(parts[1]), int(parts[2])
            return haar_unitary(2**n, seed), n
    except ValueError as exc:
        raise ValueError(f"malformed unitary family {source!r}: {exc}") from exc
    raise ValueError(
        f"unknown unitary family {source!r}; expected iswap:theta, identity:n or haar:n:seed"
    )


def trace_estimation_unitary(u, basis: str = BASIS_Z) -> np.ndarray:
    """Dilation V = (H (x) I)(|0><0| (x) I + |1><1| (x) U)(H (x) I).

    For ``basis="y"`` a phase gate diag(1, -i) is inserted on the logical
    qubit before the final Hadamard, so that the sigma^z statistics of the
    modified circuit equal the sigma^y statistics of the plain one (and the
    estimator reads off Im{tr U} instead of Re{tr U}).
    """
    u = require_unitary(u)
    dn = u.shape[0]
    cu = np.zeros((2 * dn, 2 * dn), dtype=complex)
    cu[:dn, :dn] = np.eye(dn)
    cu[dn:, dn:] = u
    hn = tensor(HADAMARD, np.eye(dn, dtype=complex))
    if basis == BASIS_Z:
        return hn @ cu @ hn
    if basis == BASIS_Y:
        phase = tensor(np.diag([1.0, -1.0j]), np.eye(dn, dtype=complex))
        return hn @ phase @ cu @ hn
    raise ValueError(f"basis must be {BASIS_Z!r} or {BASIS_Y!r}, got {basis!r}")


def ancillas_of(v) -> int:
    """Ancilla count n for a register unitary of side 2^(n+1)."""
    side = np.asarray(v).shape[0]
    n = int(round(math.log2(side))) - 1
    if n < 0 or 2 ** (n + 1) != side:
        raise ValueError(f"matrix side {side} is not 2^(n+1) for integer n >= 0")
    return n


def mu_of(v, n: int) -> float:
    """mu = tr{V sigma^z_1 V^dag sigma^z_1} / 2^(n+1), a real number in [-1, 1]."""
    v = require_unitary(v)
    if v.shape[0] != 2 ** (n + 1):
        raise ValueError(f"expected side {2 ** (n + 1)} for n={n}, got {v.shape[0]}")
    z1 = tensor(PAULI_Z, np.eye(2**n, dtype=complex))
    val = np.trace(v @ z1 @ v.conj().T @ z1) / 2 ** (n + 1)
    return float(val.real)


def p_zero(mu: float, alpha: float) -> float:
    """Probability of measuring 0 on the logical qubit: (1 + alpha*mu)/2."""
    if abs(mu) > 1.0 + 1e-12:
        raise ValueError(f"|mu| must be <= 1, got {mu}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return min(1.0, max(0.0, (1.0 + alpha * mu) / 2.0))


@dataclass(frozen=True)
class TraceEstimate:
    """Finite-shot estimate of Re{tr U} (basis z) or Im{tr U} (basis y).

    ``estimate`` is the unnormalized trace estimate, bounded by 2^n; the
    underlying Bernoulli mean alpha*estimate/2^n lies in [-1, 1].
    ``std_error`` is the per-shot sample standard deviation over sqrt(shots).
    """

    shots: int
    estimate: float
    std_error: float
    basis: str


def sample_trace(spec: RegisterSpec, u, basis: str, shots: int, seed) -> TraceEstimate:
    """Simulate ``shots`` single-qubit measurements and invert the estimator.

    Each shot yields +-1 (plus for outcome 0) with P[0] = (1+alpha*mu)/2;
    the per-shot estimate is the outcome times 2^n/alpha. Deterministic for
    a fixed (seed, shots) pair.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if spec.alpha < ALPHA_FLOOR:
        raise InfiniteTemperatureError(
            "trace is unestimable at infinite temperature (alpha = 0): "
            "the measurement statistics carry no signal"
        )
    u = require_unitary(u)
    if u.shape[0] != 2**spec.n:
        raise ValueError(f"target unitary side {u.shape[0]} does not match n={spec.n}")
    v = trace_estimation_unitary(u, basis)
    mu = mu_of(v, spec.n)
    p = p_zero(mu, spec.alpha)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    outcomes = np.where(rng.random(shots) < p, 1.0, -1.0)
    scale = 2**spec.n / spec.alpha
    values = outcomes * scale
    estimate = float(values.mean())
    std_error = 0.0 if shots == 1 else float(values.std(ddof=1) / math.sqrt(shots))
    return TraceEstimate(shots=shots, estimate=estimate, std_error=std_error, basis=basis)


def load_target_unitary(path: str) -> np.ndarray:
    """Read a target unitary from a Matrix JSON file."""
    import json

    with open(path, encoding="utf-8") as fh:
        u = matrix_from_json(json.load(fh))
    return require_unitary(as_cmatrix(u))
