"""Coherent multi-level collision amplitudes and the two-channel cross section.

Each level contributes amplitude terms divided by a complex denominator
``position - E - i * width_eliminated / 2``: the eliminated channels act
as a damping width on every level.  The collision element combines the
three coherent sums (mixed, elastic, inelastic) into

    N / D,  N = S_mixed,
    D = (1 - i S_elastic) (1 - i S_inelastic) + S_mixed^2,

and the inelastic cross section is |N/D|^2, optionally scaled by
``4 pi / k^2``.  For a single level the algebra collapses exactly to a
Breit-Wigner amplitude with the full total width in the denominator.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensembles import Level
from .errors import (
    ModelConsistencyError,
    ParameterError,
    PoleError,
    SingularDenominatorError,
)
from .series import SpectrumSeries

# |D| floor below which the collision element is treated as singular.
SINGULAR_FLOOR = 1e-30
# Pole collision tolerance, as a fraction of the grid width.
POLE_TOL_FRACTION = 1e-14

_EVAL_CHUNK = 512


@dataclass(frozen=True)
class ReactionConfig:
    """Reaction constants and the evaluation grid.

    ``grid`` is (lo, hi, n_points); the wave number is treated as constant
    over the window, so with the prefactor off the cross section comes out
    in units of 4 pi / k^2.
    """

    grid: tuple[float, float, int]
    wave_number: float = 1.0
    include_prefactor: bool = True

    def __post_init__(self):
        if self.wave_number <= 0:
            raise ParameterError("wave_number must be positive")
        lo, hi, n = self.grid
        if not lo < hi:
            raise ParameterError("grid must satisfy lo < hi")
        if int(n) != n or n < 2:
            raise ParameterError("grid must have at least 2 points")

    @property
    def grid_step(self) -> float:
        lo, hi, n = self.grid
        return (hi - lo) / (int(n) - 1)

    @property
    def grid_points(self) -> np.ndarray:
        lo, _, n = self.grid
        return lo + self.grid_step * np.arange(int(n))

    @property
    def prefactor(self) -> float:
        if self.include_prefactor:
            return 4.0 * np.pi / (self.wave_number * self.wave_number)
        return 1.0


@dataclass(frozen=True)
class AmplitudeTriple:
    """The three coherent level sums entering the collision element."""

    mixed: complex
    elastic: complex
    inelastic: complex


def eliminated_width(level: Level) -> float:
    """Total width minus the two main-channel widths.

    Raises if the subtraction would come out negative beyond rounding;
    sub-epsilon negatives from float re-association are clamped to zero.
    """
    diff = level.width_total - level.width_elastic - level.width_inelastic
    if diff < 0.0:
        guard = 1e-12 * max(level.width_total, 1.0)
        if diff < -guard:
            raise ModelConsistencyError(
                "total width is smaller than the sum of the main-channel widths"
            )
        diff = 0.0
    return diff


def _sorted_level_arrays(levels, signs=None):
    if not levels:
        raise ParameterError("at least one level is required")
    positions = np.array([lv.position for lv in levels], dtype=float)
    order = np.argsort(positions, kind="stable")
    pos = positions[order]
    elastic = np.array([levels[i].width_elastic for i in order], dtype=float)
    inelastic = np.array([levels[i].width_inelastic for i in order], dtype=float)
    elim = np.array([levels[i].width_eliminated for i in order], dtype=float)
    if signs is None:
        sgn = np.ones(pos.size)
    else:
        sgn = np.asarray(signs, dtype=float)
        if sgn.shape != (pos.size,):
            raise ParameterError("signs must have one entry per level")
        if not np.all(np.abs(sgn) == 1.0):
            raise ParameterError("signs must be +1 or -1")
        sgn = sgn[order]
    return pos, elastic, inelastic, elim, sgn


def sample_amplitude_signs(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random +/-1 per level, for randomizing mixed-amplitude signs."""
    if n < 0:
        raise ParameterError("n must be non-negative")
    return np.where(rng.random(int(n)) < 0.5, -1.0, 1.0)


def amplitude_sums(levels, energy: float, signs=None) -> AmplitudeTriple:
    """Evaluate the three coherent sums over all levels at one abscissa.

    Each level divides by ``position - energy - i * width_eliminated / 2``;
    the mixed sum carries sqrt(elastic/2) * sqrt(inelastic/2), optionally
    sign-flipped per level, while the diagonal sums carry the half widths
    themselves.  Levels are accumulated in position order.
    """
    pos, elastic, inelastic, elim, sgn = _sorted_level_arrays(levels, signs)
    if np.any((elim == 0.0) & (pos == energy)):
        raise PoleError(
            f"abscissa {energy!r} coincides with an undamped level position"
        )
    denom = pos - energy - 0.5j * elim
    inv = 1.0 / denom
    s_elastic = complex(np.sum(0.5 * elastic * inv))
    s_inelastic = complex(np.sum(0.5 * inelastic * inv))
    s_mixed = complex(np.sum(sgn * 0.5 * np.sqrt(elastic * inelastic) * inv))
    return AmplitudeTriple(mixed=s_mixed, elastic=s_elastic, inelastic=s_inelastic)


def collision_element(triple: AmplitudeTriple) -> complex:
    """Combine the three sums into the transition amplitude N / D."""
    den = (1.0 - 1j * triple.elastic) * (1.0 - 1j * triple.inelastic) + triple.mixed * triple.mixed
    if abs(den) < SINGULAR_FLOOR:
        raise SingularDenominatorError(f"|denominator| = {abs(den):.3e} below floor")
    return triple.mixed / den


def inelastic_cross_section(levels, config: ReactionConfig, energy: float, signs=None) -> float:
    """Cross section at one abscissa: prefactor times |collision element|^2."""
    elem = collision_element(amplitude_sums(levels, energy, signs))
    value = elem.real * elem.real + elem.imag * elem.imag
    return config.prefactor * value


def evaluate_spectrum(levels, config: ReactionConfig, signs=None, workers: int = 1) -> SpectrumSeries:
    """Cross section over the whole configured grid.

    Levels are canonically sorted by position and summed in that fixed
    order at every grid point, so the result does not depend on the input
    ordering or on ``workers``: the grid is processed in fixed-size chunks
    and parallel runs produce bitwise-identical output to serial ones.
    """
    pos, elastic, inelastic, elim, sgn = _sorted_level_arrays(levels, signs)
    a_elastic = 0.5 * elastic
    a_inelastic = 0.5 * inelastic
    a_mixed = sgn * 0.5 * np.sqrt(elastic * inelastic)

    lo, hi, n = config.grid
    n = int(n)
    step = config.grid_step
    grid = lo + step * np.arange(n)
    prefactor = config.prefactor
    pole_tol = POLE_TOL_FRACTION * (hi - lo)
    undamped = pos[elim == 0.0]

    out = np.empty(n, dtype=float)

    def eval_chunk(i0: int) -> None:
        e = grid[i0: i0 + _EVAL_CHUNK]
        if undamped.size:
            dist = np.abs(undamped[None, :] - e[:, None]).min(axis=1)
            hit = np.flatnonzero(dist < pole_tol)
            if hit.size:
                raise PoleError(
                    f"grid point {e[hit[0]]!r} collides with an undamped level position"
                )
        f = pos[None, :] - e[:, None] - 0.5j * elim[None, :]
        inv = 1.0 / f
        s_el = (inv * a_elastic[None, :]).sum(axis=1)
        s_in = (inv * a_inelastic[None, :]).sum(axis=1)
        s_mx = (inv * a_mixed[None, :]).sum(axis=1)
        den = (1.0 - 1j * s_el) * (1.0 - 1j * s_in) + s_mx * s_mx
        bad = np.flatnonzero(np.abs(den) < SINGULAR_FLOOR)
        if bad.size:
            raise SingularDenominatorError(
                f"denominator vanished at abscissa {e[bad[0]]!r}"
            )
        amp = s_mx / den
        out[i0: i0 + _EVAL_CHUNK] = prefactor * (amp.real * amp.real + amp.imag * amp.imag)

    starts = range(0, n, _EVAL_CHUNK)
    if workers <= 1:
        for i0 in starts:
            eval_chunk(i0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # consume to surface any chunk errors
            list(pool.map(eval_chunk, starts))

    return SpectrumSeries(start=lo, step=step, values=out)
