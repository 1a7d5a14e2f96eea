"""Synthetic intraday index sessions built from resonance-ladder components.

A session is an additive superposition of fine, intermediate and gross
structure components on a common time grid, each generated from its own
seeded level ladder and characterized by its mean width over mean spacing.
Components are normalized to unit mean before their amplitude scale is
applied so that scales stay comparable across overlap regimes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, build_level_ladder, n_levels_to_cover
from .errors import CorrelationWarning, ParameterError, ResolutionError, ResolutionWarning
from .rfunction import ReactionConfig, evaluate_spectrum
from .series import SpectrumSeries

COMPONENT_LABELS = ("fine", "intermediate", "gross")

# Share of the mean total width carried by the eliminated channels; the
# two explicit channels split the remainder equally.
DEFAULT_ELIMINATED_FRACTION = 0.5

# Validated sampling regime; finer grids only draw a warning.
MIN_VALIDATED_RESOLUTION = 10.0

# Broad gross structure is represented by at most this many levels.
_MAX_GROSS_LEVELS = 3


@dataclass(frozen=True)
class StructureSpec:
    """One index component: its time scales, width dof, and amplitude."""

    label: str
    mean_spacing: float
    mean_width: float
    width_dof: int = 1
    amplitude_scale: float = 1.0
    seed: int | None = None
    eliminated_fraction: float = DEFAULT_ELIMINATED_FRACTION

    def __post_init__(self):
        if self.label not in COMPONENT_LABELS:
            raise ParameterError(f"label must be one of {COMPONENT_LABELS}")
        if self.mean_spacing <= 0:
            raise ParameterError("mean_spacing must be positive")
        if self.mean_width <= 0:
            raise ParameterError("mean_width must be positive")
        if self.amplitude_scale < 0:
            raise ParameterError("amplitude_scale must be non-negative")
        if not 0.0 <= self.eliminated_fraction < 1.0:
            raise ParameterError("eliminated_fraction must lie in [0, 1)")

    @property
    def strength_ratio(self) -> float:
        return self.mean_width / self.mean_spacing


@dataclass(frozen=True)
class IndexModel:
    """A session recipe: components plus baseline, cadence and length."""

    components: tuple[StructureSpec, ...] = ()
    baseline: float = 0.0
    resolution: float = 10.0
    session_length: float = 23400.0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.resolution <= 0:
            raise ParameterError("resolution must be positive")
        if self.session_length <= 0:
            raise ParameterError("session_length must be positive")
        n = self.session_length / self.resolution
        if abs(n - round(n)) > 1e-9:
            raise ParameterError("session_length must be a multiple of resolution")
        if self.resolution < MIN_VALIDATED_RESOLUTION:
            warnings.warn(
                f"resolution {self.resolution} s is below the validated "
                f"{MIN_VALIDATED_RESOLUTION:.0f} s regime",
                ResolutionWarning,
                stacklevel=2,
            )

    @property
    def n_samples(self) -> int:
        return int(round(self.session_length / self.resolution))

    def time_grid(self) -> np.ndarray:
        """Sample times in seconds from session open, half-open [0, length)."""
        return self.resolution * np.arange(self.n_samples)


def ensemble_for_component(spec: StructureSpec, window: tuple[float, float],
                           seed: int) -> EnsembleSpec:
    """Translate a StructureSpec into a level-ladder recipe on a window.

    Gross structure is deliberately sparse (one to three broad levels);
    the other labels get enough levels to cover the window plus tail
    padding.
    """
    lo, hi = window
    elim = spec.eliminated_fraction * spec.mean_width
    main = 0.5 * (spec.mean_width - elim)
    if spec.label == "gross":
        n = int(np.clip(round((hi - lo) / spec.mean_spacing), 1, _MAX_GROSS_LEVELS))
    else:
        n = n_levels_to_cover(window, spec.mean_spacing, spec.mean_width)
    return EnsembleSpec(
        n_levels=n,
        mean_spacing=spec.mean_spacing,
        mean_width_main=main,
        eliminated_width=elim,
        width_dof=spec.width_dof,
        seed=seed,
        window=window,
    )


def synthesize_component(spec: StructureSpec, grid: np.ndarray, seed: int | None = None) -> SpectrumSeries:
    """Generate one component's series on a uniform time grid.

    The underlying ladder is evaluated through the collision-element
    spectrum, normalized to unit mean, then scaled by the component's
    amplitude.  A grid coarser than the mean width is rejected; between
    one and two samples per width a warning is issued.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ParameterError("grid must be a 1-D array with at least two samples")
    step = grid[1] - grid[0]
    if step <= 0:
        raise ParameterError("grid must be increasing")
    if step > spec.mean_width:
        raise ResolutionError(
            f"grid step {step} s cannot resolve mean width {spec.mean_width} s"
        )
    if step > 0.5 * spec.mean_width:
        warnings.warn(
            f"fewer than 2 samples per mean width ({spec.mean_width} s at {step} s step)",
            ResolutionWarning,
            stacklevel=2,
        )
    use_seed = spec.seed if spec.seed is not None else seed
    if use_seed is None:
        raise ParameterError(f"component '{spec.label}' has no seed")

    if spec.amplitude_scale == 0.0:
        return SpectrumSeries(start=float(grid[0]), step=float(step), values=np.zeros(grid.size))

    espec = ensemble_for_component(spec, (float(grid[0]), float(grid[-1])), int(use_seed))
    levels = build_level_ladder(espec)
    config = ReactionConfig(
        grid=(float(grid[0]), float(grid[-1]), grid.size),
        wave_number=1.0,
        include_prefactor=False,
    )
    raw = evaluate_spectrum(levels, config)
    mean = raw.values.mean()
    if mean == 0.0:
        values = np.zeros(grid.size)
    else:
        values = spec.amplitude_scale * (raw.values / mean)
    return SpectrumSeries(start=float(grid[0]), step=float(step), values=values)


def compose_index(model: IndexModel, rng: np.random.Generator | None = None,
                  return_components: bool = False):
    """Sum the baseline and all synthesized components over the session grid.

    Components with explicit seeds are independent of one another and of
    list order; components without a seed draw one from ``rng``.  Repeated
    seeds are allowed but draw a correlation warning, since those
    components then share underlying states.
    """
    grid = model.time_grid()
    seeds = [c.seed for c in model.components if c.seed is not None]
    if len(seeds) != len(set(seeds)):
        warnings.warn(
            "components share a seed; their underlying states are correlated",
            CorrelationWarning,
            stacklevel=2,
        )
    parts: list[tuple[StructureSpec, SpectrumSeries]] = []
    total = np.zeros(grid.size)
    for comp in model.components:
        seed = comp.seed
        if seed is None:
            if rng is None:
                raise ParameterError(
                    f"component '{comp.label}' has no seed and no rng was supplied"
                )
            seed = int(rng.integers(0, 2**63 - 1))
        part = synthesize_component(comp, grid, seed=seed)
        total = total + part.values
        parts.append((comp, part))
    # baseline applied last so a baseline shift changes values by exactly b
    composed = SpectrumSeries(start=0.0, step=model.resolution,
                              values=total + model.baseline)
    if return_components:
        return composed, parts
    return composed
