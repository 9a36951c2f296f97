"""Error and fidelity metrics: overlap estimates, entanglement fidelity,
Haar-averaged Monte Carlo error, and coarse per-branch bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .hilbert import (
    ATOL_ALGEBRA,
    DensityOperator,
    StateVector,
)


@dataclass(frozen=True, eq=False)
class ErrorEstimate:
    """Split of an output state into gamma * reference + orthogonal error."""

    gamma: complex
    epsilon: float
    error_term: StateVector


def error_estimate_pure(output: StateVector, reference: StateVector) -> ErrorEstimate:
    """Decompose output = gamma * reference + error with error orthogonal.

    epsilon is the squared norm of the error term; for a normalized output it
    equals 1 - |gamma|^2.  The output may be subnormalized (a branch).
    """
    if output.dims != reference.dims:
        raise ValueError("states live on different spaces")
    gamma = reference.overlap(output)
    err = output.amplitudes - gamma * reference.amplitudes
    eps = float(np.vdot(err, err).real)
    return ErrorEstimate(gamma, eps, StateVector(output.dims, err))


def mixture_error(branches, reference: StateVector) -> float:
    """Probability-weighted error of a mixture given as (prob, pure state) pairs."""
    total = 0.0
    for prob, state in branches:
        if prob < -ATOL_ALGEBRA:
            raise ValueError(f"negative branch probability {prob}")
        total += prob * error_estimate_pure(state, reference).epsilon
    return total


def fidelity_mixed(rho: DensityOperator, reference: StateVector) -> float:
    """<ref| rho |ref>, clamped to [0, 1]."""
    if rho.dims != reference.dims:
        raise ValueError("states live on different spaces")
    f = float(np.real(np.vdot(reference.amplitudes, rho.matrix @ reference.amplitudes)))
    return min(max(f, 0.0), 1.0)


def _maximally_entangled(d: int, ref_unitary: np.ndarray | None = None) -> np.ndarray:
    amps = np.zeros(d * d, dtype=complex)
    for i in range(d):
        amps[i * d + i] = 1.0 / math.sqrt(d)
    if ref_unitary is not None:
        amps = np.kron(ref_unitary, np.eye(d)) @ amps
    return amps


def entanglement_fidelity(ch: KrausChannel) -> float:
    """Overlap of a maximally entangled pair with itself after one-sided noise.

    Built explicitly: a reference copy is attached, the channel acts on the
    system half only, and the overlap is evaluated.  The result is checked
    against a second choice of maximally entangled state (Fourier-rotated
    reference), from which it must not deviate.
    """
    d = ch.dim
    fourier = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d) / math.sqrt(d)
    results = []
    for ref_u in (None, fourier):
        bell = _maximally_entangled(d, ref_u)
        f = 0.0
        for _, a in ch.ops:
            big = np.kron(np.eye(d), a)
            f += abs(np.vdot(bell, big @ bell)) ** 2
        results.append(f)
    if abs(results[0] - results[1]) > ATOL_ALGEBRA:
        raise RuntimeError("entanglement fidelity depended on the entangled state choice")
    return float(results[0])


def average_error_from_entanglement(eps_e: float, k: int) -> float:
    """Haar-average error from entanglement error on k qubits: scale by 2^k/(2^k+1)."""
    d = 2 ** k
    return d / (d + 1.0) * eps_e


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int

    @property
    def ci95(self) -> float:
        return 1.96 * self.std_error


_MC_BLOCK = 1024


def _haar_block(d: int, count: int, seed: int, block_index: int) -> np.ndarray:
    """Deterministic batch of Haar-random state rows from a counter-derived stream."""
    bitgen = np.random.Philox(key=seed, counter=block_index * 2 ** 64)
    g = np.random.Generator(bitgen)
    z = g.standard_normal((count, d, 2))
    psi = z[..., 0] + 1j * z[..., 1]
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def average_error_monte_carlo(ch: KrausChannel, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Estimate the Haar-average input-output error of a channel.

    Each trial draws a Haar-random pure state psi and evaluates
    1 - <psi| ch(psi) |psi>.  Trials are grouped into fixed-size blocks, each
    with its own counter-derived stream from the single seed, so the result
    does not depend on how blocks are scheduled.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    d = ch.dim
    mats = [a for _, a in ch.ops]
    total = 0.0
    total_sq = 0.0
    done = 0
    block_index = 0
    while done < trials:
        count = min(_MC_BLOCK, trials - done)
        psi = _haar_block(d, count, seed, block_index)
        fid = np.zeros(count)
        for a in mats:
            amp = np.einsum("nd,de,ne->n", psi.conj(), a, psi)
            fid += np.abs(amp) ** 2
        err = 1.0 - fid
        total += float(err.sum())
        total_sq += float((err ** 2).sum())
        done += count
        block_index += 1
    mean = total / trials
    var = max(total_sq / trials - mean ** 2, 0.0)
    if trials > 1:
        var *= trials / (trials - 1.0)
    return MonteCarloEstimate(mean, math.sqrt(var / trials), trials, seed)


def bad_branch_probability(ch: KrausChannel, psi: StateVector,
                           bad_labels=None) -> float:
    """Exact probability of landing in a flagged branch from a pure input."""
    bad = frozenset(bad_labels) if bad_labels is not None else ch.bad_labels
    total = 0.0
    for label, a in ch.ops:
        if label in bad:
            v = a @ psi.amplitudes
            total += float(np.vdot(v, v).real)
    return total


def bad_branch_error_bound(ch: KrausChannel, bad_labels=None) -> float:
    """State-independent upper bound on the flagged-branch probability.

    Sums the operator norms of the flagged operators and squares: valid for
    every input, tight when a single flagged operator is proportional to a
    unitary.
    """
    bad = frozenset(bad_labels) if bad_labels is not None else ch.bad_labels
    total = 0.0
    for label, a in ch.ops:
        if label in bad:
            total += float(np.linalg.norm(a, ord=2))
    return total ** 2
