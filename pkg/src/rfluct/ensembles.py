"""Seeded sampling of resonance ladders.

Level spacings follow the Wigner surmise for GOE-type level repulsion and
partial widths follow scaled chi-squared distributions (one degree of
freedom gives the Porter-Thomas case).  Ladders are deterministic
functions of their spec: spacings and widths draw from independent
substreams of the spec seed, so changing a width mean never perturbs the
sampled positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelConsistencyError, ParameterError

# Generous margin so levels just outside an analysis window still feed
# their tails into it.
DEFAULT_PAD_WIDTHS = 10.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for sampling one ladder of resonance levels.

    Widths are split between two explicitly treated channels, each with
    mean ``mean_width_main``, plus a constant ``eliminated_width`` shared
    by all remaining decay modes.
    """

    n_levels: int
    mean_spacing: float
    mean_width_main: float
    eliminated_width: float
    width_dof: int
    seed: int
    window: tuple[float, float]

    def __post_init__(self):
        if self.n_levels < 1:
            raise ParameterError("n_levels must be at least 1")
        if self.mean_spacing <= 0:
            raise ParameterError("mean_spacing must be positive")
        if self.mean_width_main <= 0:
            raise ParameterError("mean_width_main must be positive")
        if self.eliminated_width < 0:
            raise ParameterError("eliminated_width must be non-negative")
        if int(self.width_dof) != self.width_dof or self.width_dof < 1:
            raise ParameterError("width_dof must be a positive integer")
        lo, hi = self.window
        if not lo < hi:
            raise ParameterError("window must satisfy lo < hi")

    @property
    def mean_total_width(self) -> float:
        """Mean total width: two main channels plus the eliminated share."""
        return 2.0 * self.mean_width_main + self.eliminated_width

    @property
    def strength_ratio(self) -> float:
        """Spec-implied mean width over mean spacing."""
        return self.mean_total_width / self.mean_spacing


@dataclass(frozen=True)
class Level:
    """One resonance: a position and its partial-width budget."""

    position: float
    width_elastic: float
    width_inelastic: float
    width_eliminated: float
    width_total: float

    def __post_init__(self):
        for name in ("width_elastic", "width_inelastic", "width_eliminated"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")
        expected = self.width_elastic + self.width_inelastic + self.width_eliminated
        if self.width_total != expected:
            raise ModelConsistencyError(
                "width_total must equal the sum of the partial widths; "
                f"got {self.width_total!r}, expected {expected!r}"
            )

    @classmethod
    def from_partial_widths(cls, position, elastic, inelastic, eliminated) -> "Level":
        """Build a Level with the total computed from its parts."""
        elastic = float(elastic)
        inelastic = float(inelastic)
        eliminated = float(eliminated)
        return cls(
            position=float(position),
            width_elastic=elastic,
            width_inelastic=inelastic,
            width_eliminated=eliminated,
            width_total=elastic + inelastic + eliminated,
        )


def wigner_spacing_pdf(s, mean_spacing: float):
    """Wigner surmise density (pi*s / 2<D>^2) * exp(-pi*s^2 / 4<D>^2)."""
    if mean_spacing <= 0:
        raise ParameterError("mean_spacing must be positive")
    s = np.asarray(s, dtype=float)
    d2 = mean_spacing * mean_spacing
    return (np.pi * s / (2.0 * d2)) * np.exp(-np.pi * s * s / (4.0 * d2))


def sample_wigner_spacings(n: int, mean_spacing: float, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. nearest-neighbor spacings from the Wigner surmise.

    Uses inverse-CDF sampling: with u uniform on [0, 1),
    s = <D> * sqrt(-(4/pi) * ln(1 - u)), which has mean <D> and
    variance (4/pi - 1) <D>^2.

    Parameters
    ----------
    n : int
        Number of spacings to draw (0 gives an empty array).
    mean_spacing : float
        Mean spacing <D>, must be positive.
    rng : numpy.random.Generator
        Source of uniforms; the caller owns seeding.

    Returns
    -------
    numpy.ndarray
        Strictly positive spacings, length n.
    """
    if mean_spacing <= 0:
        raise ParameterError("mean_spacing must be positive")
    if n < 0:
        raise ParameterError("n must be non-negative")
    u = rng.random(int(n))
    s = mean_spacing * np.sqrt(-4.0 / np.pi * np.log1p(-u))
    # u == 0 draws (probability 2^-53 each) would yield zero spacings.
    while np.any(s <= 0.0):
        redo = np.flatnonzero(s <= 0.0)
        u = rng.random(redo.size)
        s[redo] = mean_spacing * np.sqrt(-4.0 / np.pi * np.log1p(-u))
    return s


def sample_scaled_chi2(mean: float, dof: int, rng: np.random.Generator, size=None):
    """Draw widths as (mean/dof) * X with X chi-squared with ``dof`` degrees.

    dof = 1 is the Porter-Thomas case; the sample mean converges to
    ``mean`` for any dof.

    Parameters
    ----------
    mean : float
        Target mean width, must be positive.
    dof : int
        Degrees of freedom, a positive integer.
    rng : numpy.random.Generator
        Source of randomness.
    size : int or None
        None returns a scalar float, otherwise an array of that length.

    Returns
    -------
    float or numpy.ndarray
    """
    if mean <= 0:
        raise ParameterError("mean must be positive")
    if int(dof) != dof or dof < 1:
        raise ParameterError("dof must be a positive integer")
    draws = rng.chisquare(int(dof), size=size)
    scaled = (mean / float(dof)) * draws
    if size is None:
        return float(scaled)
    return scaled


def build_level_ladder(spec: EnsembleSpec) -> list[Level]:
    """Sample a full ladder of levels from an EnsembleSpec.

    Positions are cumulative sums of Wigner spacings, centered on the
    window midpoint; the two main widths are scaled chi-squared draws and
    the eliminated width is the constant from the spec.  Spacings and
    widths consume independent substreams spawned from the seed, so equal
    (spec, seed) gives a bit-identical ladder and ladders that differ only
    in width parameters share positions exactly.
    """
    root = np.random.SeedSequence(spec.seed)
    spacing_seq, width_seq = root.spawn(2)
    spacing_rng = np.random.default_rng(spacing_seq)
    width_rng = np.random.default_rng(width_seq)

    spacings = sample_wigner_spacings(spec.n_levels, spec.mean_spacing, spacing_rng)
    positions = np.cumsum(spacings)
    lo, hi = spec.window
    positions = positions + (0.5 * (lo + hi) - 0.5 * (positions[0] + positions[-1]))

    elastic = sample_scaled_chi2(spec.mean_width_main, spec.width_dof, width_rng, size=spec.n_levels)
    inelastic = sample_scaled_chi2(spec.mean_width_main, spec.width_dof, width_rng, size=spec.n_levels)

    return [
        Level.from_partial_widths(positions[i], elastic[i], inelastic[i], spec.eliminated_width)
        for i in range(spec.n_levels)
    ]


def n_levels_to_cover(window: tuple[float, float], mean_spacing: float,
                      mean_total_width: float, pad_widths: float = DEFAULT_PAD_WIDTHS) -> int:
    """Level count whose ladder span covers the window plus tail padding.

    The padding extends the window by ``pad_widths`` mean total widths on
    each side so that distant-level tails still contribute inside it.
    """
    if mean_spacing <= 0:
        raise ParameterError("mean_spacing must be positive")
    span = (window[1] - window[0]) + 2.0 * pad_widths * mean_total_width
    return max(1, int(np.ceil(span / mean_spacing)) + 1)


def empirical_strength_ratio(levels: list[Level]) -> float:
    """Mean total width over mean adjacent spacing, measured from a ladder."""
    if len(levels) < 2:
        raise ParameterError("need at least two levels to measure spacing")
    positions = np.array([lv.position for lv in levels])
    totals = np.array([lv.width_total for lv in levels])
    mean_spacing = (positions.max() - positions.min()) / (positions.size - 1)
    return float(totals.mean() / mean_spacing)
