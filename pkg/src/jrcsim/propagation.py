"""Path loss, channel synthesis, target reflectivity, and clutter scenes.

Conventions: path loss is returned in dB; amplitude gains are 10^(-PL/20).
The radar receive noise is unit variance by convention, so absolute levels are
carried entirely by channel gains and the reflectivity scale.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .array_geometry import ArrayConfig, PolarPosition, steering_vector

__all__ = [
    "PathLossKind",
    "PathLossModel",
    "Fading",
    "TargetPhase",
    "ClutterElement",
    "Scene",
    "ChannelSet",
    "path_loss_db",
    "amplitude_gain",
    "separation",
    "synthesize_comm_channel",
    "synthesize_scalar_channel",
    "target_reflectivity",
    "make_clutter_scene",
]


class PathLossKind(enum.Enum):
    FREE_SPACE = "free_space"
    TR38901_UMI_LOS = "tr38901_umi_los"


class Fading(enum.Enum):
    LOS = "los"
    RAYLEIGH = "rayleigh"


class TargetPhase(enum.Enum):
    ZERO = "zero"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class PathLossModel:
    """Path-loss law selector plus the constants the selected law needs.

    The TR 38.901 UMi street-canyon LoS law takes the input distance as ground
    distance and folds in the antenna-height offset; heights below 1 m would
    put the breakpoint at zero, so both must exceed it.
    """

    kind: PathLossKind = PathLossKind.FREE_SPACE
    h_bs_m: float = 10.0
    h_ut_m: float = 1.5

    def __post_init__(self) -> None:
        if self.kind is PathLossKind.TR38901_UMI_LOS:
            if self.h_bs_m <= 1.0 or self.h_ut_m <= 1.0:
                raise ValueError("TR 38.901 UMi heights must exceed 1 m")


@dataclass(frozen=True)
class ClutterElement:
    """One clutter scatterer: position and amplitude scale sigma_l (>= 0)."""

    position: PolarPosition
    amplitude_scale: float

    def __post_init__(self) -> None:
        if self.amplitude_scale < 0.0:
            raise ValueError(f"amplitude_scale must be >= 0, got {self.amplitude_scale}")


@dataclass(frozen=True)
class Scene:
    """Radar scene: the target (position + complex reflectivity) and clutter."""

    target: PolarPosition
    alpha0: complex
    clutter: tuple[ClutterElement, ...] = ()


@dataclass(frozen=True)
class ChannelSet:
    """Communication channels: source->destination and source->relay vectors,
    scalar relay->destination link, and the receiver noise variances."""

    h_sd: np.ndarray
    h_sr: np.ndarray
    h_rd: complex
    noise_var_dest: float
    noise_var_relay: float

    def __post_init__(self) -> None:
        if np.shape(self.h_sd) != np.shape(self.h_sr):
            raise ValueError("h_sd and h_sr must have the same shape")
        if self.noise_var_dest <= 0.0 or self.noise_var_relay <= 0.0:
            raise ValueError("noise variances must be positive")


def path_loss_db(model: PathLossModel, carrier_freq: float, distance: float) -> float:
    """One-way path loss in dB at the given carrier frequency (Hz) and distance (m)."""
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    if carrier_freq <= 0.0:
        raise ValueError(f"carrier_freq must be positive, got {carrier_freq}")
    if model.kind is PathLossKind.FREE_SPACE:
        return 20.0 * np.log10(4.0 * np.pi * distance * carrier_freq / SPEED_OF_LIGHT)
    # TR 38.901 Table 7.4.1-1, UMi street canyon LoS, dual slope around the
    # effective breakpoint d_bp = 4 (h_bs - 1)(h_ut - 1) f / c.
    f_ghz = carrier_freq / 1e9
    dh = model.h_bs_m - model.h_ut_m
    d3d = np.hypot(distance, dh)
    d_bp = 4.0 * (model.h_bs_m - 1.0) * (model.h_ut_m - 1.0) * carrier_freq / SPEED_OF_LIGHT
    if distance <= d_bp:
        return 32.4 + 21.0 * np.log10(d3d) + 20.0 * np.log10(f_ghz)
    return (
        32.4
        + 40.0 * np.log10(d3d)
        + 20.0 * np.log10(f_ghz)
        - 9.5 * np.log10(d_bp * d_bp + dh * dh)
    )


def amplitude_gain(model: PathLossModel, carrier_freq: float, distance: float) -> float:
    """One-way amplitude gain 10^(-PL/20)."""
    return 10.0 ** (-path_loss_db(model, carrier_freq, distance) / 20.0)


def separation(a: PolarPosition, b: PolarPosition) -> float:
    """Straight-line distance between two polar positions sharing the origin."""
    return float(
        np.sqrt(
            a.range_m**2
            + b.range_m**2
            - 2.0 * a.range_m * b.range_m * np.cos(a.angle_rad - b.angle_rad)
        )
    )


def synthesize_comm_channel(
    cfg: ArrayConfig,
    model: PathLossModel,
    pos: PolarPosition,
    fading: Fading = Fading.LOS,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Array channel toward a terminal at ``pos``.

    LoS: amplitude gain times the near-field steering vector, so the expected
    squared norm is N g^2 exactly. Rayleigh: i.i.d. entries CN(0, g^2), same
    mean squared norm.
    """
    g = amplitude_gain(model, cfg.carrier_freq, pos.range_m)
    if fading is Fading.LOS:
        return g * steering_vector(cfg, pos)
    if rng is None:
        raise ValueError("Rayleigh fading requires an rng")
    n = cfg.n_antennas
    return g * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def synthesize_scalar_channel(
    cfg: ArrayConfig,
    model: PathLossModel,
    distance: float,
    fading: Fading = Fading.LOS,
    rng: np.random.Generator | None = None,
) -> complex:
    """Single-antenna channel over the given link distance."""
    g = amplitude_gain(model, cfg.carrier_freq, distance)
    if fading is Fading.LOS:
        return complex(g * np.exp(-2j * np.pi * distance / cfg.wavelength))
    if rng is None:
        raise ValueError("Rayleigh fading requires an rng")
    return complex(g * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0))


def target_reflectivity(
    model: PathLossModel,
    carrier_freq: float,
    target_range: float,
    rcs_scale: float = 1.0,
    phase: TargetPhase = TargetPhase.ZERO,
    rng: np.random.Generator | None = None,
) -> complex:
    """Two-way target reflectivity alpha_0.

    Magnitude is rcs_scale * 10^(-2 PL_oneway / 20); the phase convention is
    either zero (deterministic sweeps) or uniform on [0, 2 pi).
    """
    if rcs_scale < 0.0:
        raise ValueError(f"rcs_scale must be >= 0, got {rcs_scale}")
    mag = rcs_scale * 10.0 ** (-2.0 * path_loss_db(model, carrier_freq, target_range) / 20.0)
    if phase is TargetPhase.ZERO:
        return complex(mag)
    if rng is None:
        raise ValueError("uniform phase requires an rng")
    return complex(mag * np.exp(2j * np.pi * rng.uniform()))


def make_clutter_scene(
    rng: np.random.Generator,
    count: int,
    max_range: float,
    sigma_c: float,
    angle_exclusion: float,
    target_angle: float,
    min_range: float = 0.5,
) -> tuple[ClutterElement, ...]:
    """Random clutter placements around (but never on top of) the target bearing.

    Ranges are uniform on (min_range, max_range]; angles are uniform on (0, pi)
    minus the +- angle_exclusion window about the target angle. Draw order is
    fixed (range then angle, per element) so a given stream always yields the
    same scene.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if max_range <= min_range:
        raise ValueError(f"max_range must exceed {min_range}, got {max_range}")
    if sigma_c < 0.0:
        raise ValueError(f"sigma_c must be >= 0, got {sigma_c}")
    if angle_exclusion < 0.0:
        raise ValueError(f"angle_exclusion must be >= 0, got {angle_exclusion}")
    lo = max(0.0, target_angle - angle_exclusion)
    hi = min(np.pi, target_angle + angle_exclusion)
    mass = lo + (np.pi - hi)
    if mass <= 0.0:
        raise ValueError("angle exclusion window covers all of (0, pi)")
    elements = []
    for _ in range(count):
        # map u in [0, 1) to (min, max] so the lower endpoint stays open
        r = max_range - rng.uniform() * (max_range - min_range)
        while True:
            t = rng.uniform() * mass
            angle = t if t < lo else hi + (t - lo)
            if 0.0 < angle < np.pi:
                break
        elements.append(
            ClutterElement(position=PolarPosition(r, angle), amplitude_scale=sigma_c)
        )
    return tuple(elements)
