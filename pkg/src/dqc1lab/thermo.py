"""Effective-temperature bookkeeping, TPM work statistics and Crooks ratios.

The logical qubit carries the Hamiltonian H_C = -omega * sigma^z at both
endpoints of the protocol, so two-point-measurement work values live on
{-2 omega, 0, +2 omega}. Its polarization alpha maps to an effective inverse
temperature through beta * omega = arctanh(alpha); the arctanh form is the
one consistent with the thermal populations (1 +- alpha)/2.

TPM conditionals are defined through the channel action on energy
projectors, p(m|n) = <m|E(|n><n|)|m>, which makes the first moment of the
work distribution equal to the energy change of the logical qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import DQC1Channel
from .register import logical_state

#: Work values closer than this are merged into one support point.
SUPPORT_MERGE_TOL = 1e-12

#: Probabilities at or below this are treated as absent from the support.
PROB_FLOOR = 1e-15


def effective_beta(alpha: float, omega: float) -> float:
    """Inverse temperature from beta*omega = arctanh(alpha); inf at alpha=1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if alpha == 1.0:
        return math.inf
    return math.atanh(alpha) / omega


@dataclass(frozen=True)
class ThermalFrame:
    """Initial/final effective-temperature data for one trace estimation.

    ``omega_prime`` is the final precession frequency an external agent
    would need for an isothermal reading of the process; it is NaN in the
    degenerate alpha = 1 frame where beta is infinite.
    """

    alpha: float
    omega: float
    t: float
    beta: float
    omega_prime: float

    @property
    def degenerate(self) -> bool:
        return not math.isfinite(self.beta)


def thermal_frame(alpha: float, omega: float, t: float) -> ThermalFrame:
    """Build the frame for polarization alpha and normalized real trace t."""
    if abs(t) > 1.0 + 1e-12:
        raise ValueError(f"|t| must be <= 1, got {t}")
    t = min(1.0, max(-1.0, t))
    beta = effective_beta(alpha, omega)
    if alpha == 1.0:
        omega_prime = math.nan
    elif alpha == 0.0:
        # Limit of omega * arctanh(alpha*t)/arctanh(alpha) as alpha -> 0.
        omega_prime = omega * t
    else:
        omega_prime = omega * math.atanh(alpha * t) / math.atanh(alpha)
    return ThermalFrame(alpha=alpha, omega=omega, t=t, beta=beta, omega_prime=omega_prime)


def mean_work(alpha: float, omega: float, t: float) -> float:
    """Average work on the logical qubit: alpha * omega * (1 - t)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if abs(t) > 1.0 + 1e-12:
        raise ValueError(f"|t| must be <= 1, got {t}")
    return alpha * omega * (1.0 - t)


@dataclass(frozen=True)
class WorkDistribution:
    """Finite discrete work distribution from the TPM scheme.

    ``points`` are (work value, probability) pairs sorted by work value;
    zero-probability support points arising from the enumeration are kept.
    """

    points: tuple[tuple[float, float], ...]
    hamiltonian_gap: float

    def __post_init__(self):
        total = sum(p for _, p in self.points)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        if any(p < -1e-15 for _, p in self.points):
            raise ValueError("probabilities must be nonnegative")
        gap = self.hamiltonian_gap
        for w, _ in self.points:
            if min(abs(w), abs(w - gap), abs(w + gap)) > 1e-9:
                raise ValueError(f"work value {w} outside the support {{0, +-{gap}}}")

    def probability_of(self, work: float) -> float:
        for w, p in self.points:
            if abs(w - work) <= SUPPORT_MERGE_TOL:
                return p
        return 0.0

    def mean(self) -> float:
        return moment(self, 1)

    def variance(self) -> float:
        mu = self.mean()
        return moment(self, 2) - mu * mu


def _channel_action(ch):
    return ch.apply if isinstance(ch, DQC1Channel) else ch


def work_distribution(alpha: float, omega: float, ch) -> WorkDistribution:
    """TPM work distribution of the logical qubit under a channel.

    ``ch`` may be a DQC1Channel or any callable acting on 2x2 operators.
    Initial probabilities are the thermal populations of (I + alpha sigma^z)/2;
    conditionals are p(m|n) = <m|E(|n><n|)|m> with H_C = -omega sigma^z fixed
    at both endpoints.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    action = _channel_action(ch)
    populations = ((1.0 + alpha) / 2.0, (1.0 - alpha) / 2.0)
    energies = (-omega, +omega)

    accumulated: list[tuple[float, float]] = []
    for n_idx, p_n in enumerate(populations):
        projector = np.zeros((2, 2), dtype=complex)
        projector[n_idx, n_idx] = 1.0
        image = action(projector)
        for m_idx in range(2):
            conditional = max(0.0, float(image[m_idx, m_idx].real))
            work = energies[m_idx] - energies[n_idx]
            accumulated.append((work, p_n * conditional))

    merged: list[list[float]] = []
    for work, prob in sorted(accumulated):
        if merged and abs(work - merged[-1][0]) <= SUPPORT_MERGE_TOL:
            merged[-1][1] += prob
        else:
            merged.append([work, prob])
    points = tuple((w, p) for w, p in merged)
    return WorkDistribution(points=points, hamiltonian_gap=2.0 * omega)


def moment(wd: WorkDistribution, k: int) -> float:
    """k-th raw moment of the work distribution."""
    if k < 1:
        raise ValueError(f"moment order must be >= 1, got {k}")
    return float(sum(p * w**k for w, p in wd.points))


@dataclass(frozen=True)
class CrooksReport:
    """Forward/reverse TPM comparison for one (alpha, channel) instance.

    ``max_ratio_deviation`` is the asserted quantity
    max_W |P_F(W)/P_R(-W) - exp(beta W)| over support points where both
    probabilities exceed the floor. ``paper_form_values`` carries the
    companion isothermal-frame forms exp(beta (W - dF)) and exp(dS_C),
    reported for inspection only.
    """

    alpha: float
    omega: float
    beta: float
    status: str
    thermal: bool
    support: tuple[float, ...] = ()
    ratios: dict = field(default_factory=dict)
    max_ratio_deviation: float = math.nan
    forward: tuple[tuple[float, float], ...] = ()
    reverse: tuple[tuple[float, float], ...] = ()
    paper_form_values: dict = field(default_factory=dict)


def crooks_check(alpha: float, omega: float, ch: DQC1Channel) -> CrooksReport:
    """Check the detailed fluctuation relation P_F(W)/P_R(-W) = exp(beta W).

    The forward distribution takes the thermal state through ``ch``; the
    reverse one takes the same thermal state through ``ch.reverse()``, both
    measured against the fixed H_C. For alpha in {0, 1} beta degenerates and
    the check is skipped with an explicit status.
    """
    if alpha in (0.0, 1.0) or not 0.0 < alpha < 1.0:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        return CrooksReport(
            alpha=alpha,
            omega=omega,
            beta=effective_beta(alpha, omega),
            status="skipped_degenerate_beta",
            thermal=True,
        )

    beta = effective_beta(alpha, omega)
    rho_prime = ch.apply(logical_state(alpha))
    off_diag = abs(rho_prime[0, 1]) + abs(rho_prime[1, 0])
    thermal = bool(off_diag <= 1e-10)

    forward = work_distribution(alpha, omega, ch)
    reversed_dist = work_distribution(alpha, omega, ch.reverse())

    ratios: dict[float, float] = {}
    deviations = []
    support = []
    for w, p_f in forward.points:
        p_r = reversed_dist.probability_of(-w)
        if p_f > PROB_FLOOR and p_r > PROB_FLOOR:
            ratio = p_f / p_r
            ratios[w] = ratio
            deviations.append(abs(ratio - math.exp(beta * w)))
            support.append(w)

    # Companion forms in the isothermal omega' frame; only meaningful for
    # real-trace inputs where the final state stays diagonal.
    alpha_t = float(rho_prime[0, 0].real - rho_prime[1, 1].real)
    t = alpha_t / alpha
    aux: dict[str, object] = {}
    if thermal and abs(t) <= 1.0 + 1e-9:
        t = min(1.0, max(-1.0, t))
        frame = thermal_frame(alpha, omega, t)
        delta_f = -math.log(math.cosh(beta * frame.omega_prime) / math.cosh(beta * omega)) / beta
        h2 = lambda x: 0.0 if x in (0.0, 1.0) else -(1 - x) * math.log(1 - x) - x * math.log(x)
        delta_s = h2((1.0 - alpha * t) / 2.0) - h2((1.0 - alpha) / 2.0)
        aux = {
            "t": t,
            "omega_prime": frame.omega_prime,
            "delta_F": delta_f,
            "delta_S_C": delta_s,
            "exp_delta_S_C": math.exp(delta_s),
            "exp_beta_w_minus_dF": {w: math.exp(beta * (w - delta_f)) for w in support},
        }

    return CrooksReport(
        alpha=alpha,
        omega=omega,
        beta=beta,
        status="ok",
        thermal=thermal,
        support=tuple(support),
        ratios=ratios,
        max_ratio_deviation=max(deviations) if deviations else 0.0,
        forward=forward.points,
        reverse=reversed_dist.points,
        paper_form_values=aux,
    )
