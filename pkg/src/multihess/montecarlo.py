"""Monte Carlo cross-validation of chain probabilities.

Trials are driven by a counter-based scheme: every trial owns an
independent xorshift64* stream whose state is derived from (seed, trial
index), so the result is a pure function of the inputs — independent of
chunk size, execution order, or platform — and reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .rng import splitmix64

_MULT = np.uint64(0x2545F4914F6CDD1D)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_INV53 = 1.0 / float(1 << 53)


def _xorshift_step(state: np.ndarray) -> np.ndarray:
    """Advance an array of xorshift64* states in place; return uniforms."""
    state ^= state >> np.uint64(12)
    state ^= state << np.uint64(25)
    state ^= state >> np.uint64(27)
    return ((state * _MULT) >> np.uint64(11)).astype(np.float64) * _INV53


@dataclass(frozen=True)
class SimulationReport:
    """Deterministic outcome of a chain simulation.

    counts[s] is the number of trials ending in state s after the given
    number of steps; reference holds the exact probabilities from the
    n-step matrix power, and z_scores the binomial normal deviates of the
    empirical frequencies against them.
    """

    seed: int
    start: int
    steps: int
    trials: int
    counts: np.ndarray
    reference: np.ndarray
    z_scores: np.ndarray

    def __post_init__(self):
        for a in (self.counts, self.reference, self.z_scores):
            a.setflags(write=False)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials

    def max_abs_z(self) -> float:
        return float(np.abs(self.z_scores[self.reference > 0.0]).max())


def simulate_chain(P: np.ndarray, start: int, steps: int, trials: int,
                   seed: int, chunk: int = 1 << 16) -> SimulationReport:
    """Simulate `trials` independent paths of the chain P from `start`.

    Each step draws a uniform per trial and inverts the row CDF.  The
    reference probabilities come from a plain dense matrix power, a route
    independent of the spectral formulas.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if P.shape != (n, n):
        raise InvalidInputError("transition matrix must be square")
    if not 0 <= start < n:
        raise InvalidInputError("start state out of range")
    if steps < 0 or trials <= 0:
        raise InvalidInputError("steps must be >= 0 and trials positive")
    if np.abs(P.sum(axis=1) - 1.0).max() > 1e-12 or P.min() < 0.0:
        raise InvalidInputError("matrix is not stochastic to tolerance")
    cdf = np.cumsum(P, axis=1)
    cdf[:, -1] = 1.0
    counts = np.zeros(n, dtype=np.int64)
    for base in range(0, trials, chunk):
        m = min(chunk, trials - base)
        state = splitmix64(seed, m, offset=base)
        state[state == 0] = _GAMMA
        where = np.full(m, start, dtype=np.intp)
        for _ in range(steps):
            u = _xorshift_step(state)
            where = (cdf[where] <= u[:, None]).sum(axis=1)
        counts += np.bincount(where, minlength=n)
    reference = np.linalg.matrix_power(P, steps)[start]
    freq = counts / trials
    with np.errstate(divide="ignore", invalid="ignore"):
        sd = np.sqrt(reference * (1.0 - reference) / trials)
        z = np.where(sd > 0.0, (freq - reference) / sd, 0.0)
    return SimulationReport(seed=seed, start=start, steps=steps,
                            trials=trials, counts=counts,
                            reference=reference, z_scores=z)
