"""Radar response, clutter-plus-noise covariance, and SCNR metrics.

The two-way response of a scatterer at position p is the rank-one matrix
A(p) = a(p) a(p)^T built from the near-field steering vector (plain transpose:
the same aperture phases apply on transmit and receive). A snapshot received
while transmitting x is

    s = alpha_0 A(p_t) x + sum_l alpha_l A(p_l) x + n,      n ~ CN(0, I),

with clutter amplitudes alpha_l drawn CN(0, sigma_l^2). Averaging over symbols
and clutter gives the interference-plus-noise covariance

    W = sum_l sigma_l^2 A_l R_x A_l^H + I,

which is Hermitian positive definite with eigenvalues >= 1, so all solves go
through its Cholesky factor; no explicit inverses are formed anywhere.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .array_geometry import ArrayConfig, PolarPosition, steering_vector
from .comm_link import BeamformerSet
from .propagation import Scene

__all__ = [
    "response_matrix",
    "transmit_covariance",
    "clutter_covariance",
    "scnr",
    "optimal_receive_beamformer",
    "scnr_at_optimum",
    "average_scnr",
    "draw_symbols",
    "waveform_from_symbols",
    "transmit_waveform",
    "radar_snapshot",
    "radar_snapshot_batch",
]


def response_matrix(cfg: ArrayConfig, pos: PolarPosition) -> np.ndarray:
    """Two-way array response A = a a^T (symmetric, rank one)."""
    a = steering_vector(cfg, pos)
    return np.outer(a, a)


def transmit_covariance(beams: BeamformerSet) -> np.ndarray:
    """Waveform covariance R_x = sum_k u_k u_k^H + v v^H for unit-power symbols."""
    r = np.outer(beams.radar_beam, beams.radar_beam.conj())
    for u in beams.comm_beams:
        r = r + np.outer(u, u.conj())
    return r


def clutter_covariance(cfg: ArrayConfig, scene: Scene, r_x: np.ndarray) -> np.ndarray:
    """Interference-plus-noise covariance W = sum_l sigma_l^2 A_l R_x A_l^H + I."""
    n = cfg.n_antennas
    if r_x.shape != (n, n):
        raise ValueError(f"R_x shape {r_x.shape} does not match the {n}-element array")
    w = np.eye(n, dtype=complex)
    for el in scene.clutter:
        a_l = response_matrix(cfg, el.position)
        w = w + el.amplitude_scale**2 * (a_l @ r_x @ a_l.conj().T)
    # the sum is Hermitian in exact arithmetic; symmetrize away rounding skew
    return (w + w.conj().T) / 2.0


def scnr(w: np.ndarray, alpha0: complex, a_target: np.ndarray, cov: np.ndarray, x: np.ndarray) -> float:
    """Output SCNR |alpha_0|^2 |w^H A x|^2 / (w^H W w) for a receive beamformer w.

    a_target is the target steering vector; A = a a^T collapses the numerator
    to (w^H a)(a^T x).
    """
    denom = np.vdot(w, cov @ w).real
    if denom <= 0.0:
        raise ValueError("receive beamformer must be nonzero")
    signal = abs(alpha0) ** 2 * abs(np.vdot(w, a_target) * np.dot(a_target, x)) ** 2
    return float(signal / denom)


def optimal_receive_beamformer(a_target: np.ndarray, cov: np.ndarray, x: np.ndarray) -> np.ndarray:
    """SCNR-optimal receive beamformer w* = W^-1 (A x), unnormalized."""
    y = a_target * np.dot(a_target, x)
    cho = scipy.linalg.cho_factor(cov)
    return scipy.linalg.cho_solve(cho, y)


def scnr_at_optimum(alpha0: complex, a_target: np.ndarray, cov: np.ndarray, x: np.ndarray) -> float:
    """SCNR attained by w*: |alpha_0|^2 (A x)^H W^-1 (A x)."""
    y = a_target * np.dot(a_target, x)
    cho = scipy.linalg.cho_factor(cov)
    return float(abs(alpha0) ** 2 * np.vdot(y, scipy.linalg.cho_solve(cho, y)).real)


def average_scnr(
    cfg: ArrayConfig,
    beams: BeamformerSet,
    alpha0: complex,
    a_target: np.ndarray,
    scene: Scene,
) -> float:
    """Symbol-averaged optimal SCNR |alpha_0|^2 tr(A^H W^-1 A R_x).

    With A = a a^T the trace factors into (a^H W^-1 a)(a^T R_x conj(a)).
    """
    r_x = transmit_covariance(beams)
    cov = clutter_covariance(cfg, scene, r_x)
    cho = scipy.linalg.cho_factor(cov)
    whitened = np.vdot(a_target, scipy.linalg.cho_solve(cho, a_target)).real
    c = np.conj(a_target)
    loading = np.vdot(c, r_x @ c).real
    return float(abs(alpha0) ** 2 * whitened * loading)


def draw_symbols(n_beams: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-power complex Gaussian symbols, one per beam (data beams then radar)."""
    return (rng.standard_normal(n_beams) + 1j * rng.standard_normal(n_beams)) / np.sqrt(2.0)


def waveform_from_symbols(beams: BeamformerSet, symbols: np.ndarray) -> np.ndarray:
    """Transmit snapshot x = sum_k u_k s_k + v s_0 for the given symbol draw."""
    if len(symbols) != len(beams.comm_beams) + 1:
        raise ValueError("need one symbol per data beam plus one for the radar beam")
    x = symbols[-1] * beams.radar_beam
    for u, s in zip(beams.comm_beams, symbols[:-1]):
        x = x + s * u
    return x


def transmit_waveform(beams: BeamformerSet, rng: np.random.Generator) -> np.ndarray:
    """One random transmit snapshot (fresh symbols)."""
    return waveform_from_symbols(beams, draw_symbols(len(beams.comm_beams) + 1, rng))


def radar_snapshot_batch(
    cfg: ArrayConfig,
    scene: Scene,
    beams: BeamformerSet,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    """(count, N) receive snapshots with fresh symbols, clutter draws, and noise.

    Draw order is fixed — symbols, clutter amplitudes, noise — so a given
    stream yields the same batch on every platform.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    n = cfg.n_antennas
    n_beams = len(beams.comm_beams) + 1
    symbols = (rng.standard_normal((count, n_beams)) + 1j * rng.standard_normal((count, n_beams))) / np.sqrt(2.0)
    directions = np.vstack(list(beams.comm_beams) + [beams.radar_beam])
    x = symbols @ directions  # (count, N)
    a_t = steering_vector(cfg, scene.target)
    s = scene.alpha0 * (x @ a_t)[:, None] * a_t[None, :]
    if scene.clutter:
        sigmas = np.array([el.amplitude_scale for el in scene.clutter])
        amps = sigmas * (
            rng.standard_normal((count, len(sigmas))) + 1j * rng.standard_normal((count, len(sigmas)))
        ) / np.sqrt(2.0)
        for l, el in enumerate(scene.clutter):
            a_l = steering_vector(cfg, el.position)
            s = s + (amps[:, l] * (x @ a_l))[:, None] * a_l[None, :]
    noise = (rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))) / np.sqrt(2.0)
    return s + noise


def radar_snapshot(
    cfg: ArrayConfig,
    scene: Scene,
    beams: BeamformerSet,
    rng: np.random.Generator,
) -> np.ndarray:
    """One receive snapshot s = alpha_0 A x + sum_l alpha_l A_l x + n."""
    return radar_snapshot_batch(cfg, scene, beams, rng, 1)[0]
