"""Synthetic data sources: the two-Gaussian grid and the 2-moons sample."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import LabeledEnsemble
from .linalg import ValidationError


@dataclass(frozen=True)
class GaussianGrid:
    """Two class-conditional Gaussians discretized on a shared input grid."""

    ensemble: LabeledEnsemble     # joint distribution over the raw grid
    angles: np.ndarray            # grid affinely rescaled to [0, 2*pi]
    window: tuple[float, float]
    truncated_mass: float         # largest per-class probability mass cut off
    mass_warning: bool            # True when more than 1% of a class is cut

    def angle_ensemble(self) -> LabeledEnsemble:
        """Same joint distribution, with inputs usable by the angle encoding."""
        return self.ensemble.with_inputs(self.angles)


def gaussian_ensemble(mean0: float = -10.0, mean1: float = 10.0, std: float = 7.0,
                      grid_n: int = 400,
                      x_window: tuple[float, float] = (-31.0, 31.0)) -> GaussianGrid:
    """Discretize two equal-prior Gaussian class conditionals on a grid.

    Grid weights are renormalized to sum to one per class; the fraction of
    continuum mass falling outside the window is reported, with a warning
    flag once either class loses more than 1%.
    """
    if grid_n < 2:
        raise ValidationError("grid needs at least 2 points")
    lo, hi = float(x_window[0]), float(x_window[1])
    if not hi > lo:
        raise ValidationError(f"empty window {x_window}")
    xs = np.linspace(lo, hi, grid_n)

    def tail_mass(mean):
        from math import erf, sqrt
        cdf = lambda v: 0.5 * (1.0 + erf((v - mean) / (std * sqrt(2.0))))
        return (1.0 - cdf(hi)) + cdf(lo)

    weights = []
    for mean in (mean0, mean1):
        g = np.exp(-0.5 * ((xs - mean) / std) ** 2)
        weights.append(g / g.sum())
    truncated = max(tail_mass(mean0), tail_mass(mean1))

    classes = np.repeat([0, 1], grid_n)
    inputs = np.concatenate([xs, xs])
    joint = 0.5 * np.concatenate(weights)
    ens = LabeledEnsemble(classes, inputs, joint)
    angles = (xs - lo) / (hi - lo) * 2.0 * np.pi
    return GaussianGrid(ensemble=ens, angles=angles, window=(lo, hi),
                        truncated_mass=truncated, mass_warning=truncated > 0.01)


def two_moons(n_per_class: int, noise: float,
              rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Interleaving half-circle sample with isotropic Gaussian jitter.

    Class 0 sits on (cos t, sin t) and class 1 on (1 - cos t, 1/2 - sin t)
    for t uniform in [0, pi]; both coordinates then receive N(0, noise^2).
    Returns the (2n, 2) points, class 0 rows first, and the (2n,) labels.
    """
    if n_per_class < 1:
        raise ValidationError("need at least one point per class")
    t0 = rng.uniform(0.0, np.pi, n_per_class)
    t1 = rng.uniform(0.0, np.pi, n_per_class)
    pts = np.vstack([
        np.stack([np.cos(t0), np.sin(t0)], axis=1),
        np.stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)], axis=1),
    ])
    pts = pts + noise * rng.standard_normal(pts.shape)
    labels = np.repeat([0, 1], n_per_class)
    return pts, labels
