"""Smooth dyadic partition of unity and the associated frequency projections.

The bank is built from a single C-infinity step so the partition identity
holds exactly by construction: with G(u) = exp(-1/u) for u > 0 and the step
T(u) = G(u) / (G(u) + G(1-u)), let theta(xi) = 1 for |xi| <= 1, 0 for
|xi| >= 2, and 1 - T(|xi|-1) in between.  Then

    psi0(xi)   = theta(2 xi)                  (support (-1, 1))
    psi(xi)    = theta(xi) - theta(2 xi)      (support (-2,-1/2) u (1/2,2))
    psi_k(xi)  = psi(xi / 2^(k-1))
    psi0 + sum_{k=1..K} psi_k = theta(xi / 2^(K-1)) = 1 on |xi| <= 2^(K-1).

The wide cutoff psi_tilde(xi) = theta(xi/2) * (1 - theta(4 xi)) is 1 on the
support of psi and supported in (-4,-1/4) u (1/4,4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AliasingError
from .spectral import SampledSignal, forward_transform, inverse_transform, SpectralCoefficients


def _smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly increasing between."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        g_up = np.where(u > 0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        g_dn = np.where(u < 1, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
    return g_up / (g_up + g_dn)


def _theta(xi):
    """1 on |xi| <= 1, 0 on |xi| >= 2, smooth monotone transition."""
    axi = np.abs(np.asarray(xi, dtype=float))
    return 1.0 - _smooth_step(axi - 1.0)


@dataclass(frozen=True)
class DyadicFilterBank:
    """Immutable bank psi0, psi, psi_k, psi_tilde up to band K."""

    max_band: int
    psi_sq_mass: float  # int psi^2 over the real line, used by the TT* kernel

    def psi0(self, xi):
        return _theta(2.0 * np.asarray(xi, dtype=float))

    def psi(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _theta(xi) - _theta(2.0 * xi)

    def psi_k(self, k, xi):
        if not 1 <= k <= self.max_band:
            raise ValueError(f"band index {k} outside [1, {self.max_band}]")
        return self.psi(np.asarray(xi, dtype=float) / 2.0 ** (k - 1))

    def psi_wide(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _theta(xi / 2.0) * (1.0 - _theta(4.0 * xi))

    def psi_wide_k(self, k, xi):
        if not 1 <= k <= self.max_band:
            raise ValueError(f"band index {k} outside [1, {self.max_band}]")
        return self.psi_wide(np.asarray(xi, dtype=float) / 2.0 ** (k - 1))

    def band_multiplier(self, k, xi):
        """psi0 for k = 0, psi_k for k >= 1."""
        return self.psi0(xi) if k == 0 else self.psi_k(k, xi)


def build_filter_bank(max_band: int) -> DyadicFilterBank:
    if not 1 <= max_band <= 30:
        raise ValueError(f"max_band must lie in [1, 30], got {max_band}")
    psi = lambda xi: _theta(xi) - _theta(2.0 * xi)
    mass, _ = quad(lambda u: psi(u) ** 2, 0.5, 2.0, epsabs=1e-13, epsrel=1e-13)
    return DyadicFilterBank(max_band=max_band, psi_sq_mass=2.0 * mass)


def _shell_top(k: int, wide: bool) -> float:
    if k == 0:
        return 1.0
    return 2.0 ** (k + 1) if wide else 2.0 ** k


def _apply_band(f: SampledSignal, k: int, bank: DyadicFilterBank, wide: bool) -> SampledSignal:
    if not 0 <= k <= bank.max_band:
        raise ValueError(f"band index {k} outside [0, {bank.max_band}]")
    c = forward_transform(f)
    top = _shell_top(k, wide)
    if top > c.nyquist * (1 + 1e-12):
        raise AliasingError(
            f"shell for k={k} reaches |xi|={top:g} beyond the grid Nyquist {c.nyquist:g}"
        )
    if k == 0:
        mult = bank.psi0(c.frequencies)
    elif wide:
        mult = bank.psi_wide_k(k, c.frequencies)
    else:
        mult = bank.psi_k(k, c.frequencies)
    return inverse_transform(SpectralCoefficients(c.half_width, mult * c.coeffs))


def project(f: SampledSignal, k: int, bank: DyadicFilterBank) -> SampledSignal:
    """Littlewood-Paley projection P_k (P_0 uses psi0)."""
    return _apply_band(f, k, bank, wide=False)


def project_wide(f: SampledSignal, k: int, bank: DyadicFilterBank) -> SampledSignal:
    """Wide projection with multiplier identically 1 on the k-th shell."""
    if k == 0:
        raise ValueError("wide projection is defined for k >= 1")
    return _apply_band(f, k, bank, wide=True)


def filters_to_csv(bank: DyadicFilterBank, xi: np.ndarray) -> str:
    cols = [bank.psi0(xi)] + [bank.psi_k(k, xi) for k in range(1, bank.max_band + 1)]
    header = "xi," + ",".join(f"psi{k}" for k in range(bank.max_band + 1))
    lines = [header]
    for i, x in enumerate(xi):
        lines.append(f"{x:.17g}," + ",".join(f"{col[i]:.17g}" for col in cols))
    return "\n".join(lines) + "\n"
