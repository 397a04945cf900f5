"""Two-point propagators of the dressed mode in frequency and time.

All eight standard propagators (retarded, advanced, Feynman, Dyson, the
two Wightman functions, Hadamard and Pauli-Jordan) share the denominator
``[-w^2 + W0^2 + H_R]^2 + H_I^2`` where ``W0`` is the oscillator frequency
and ``H`` the dressing kernel.  They can be built either from a
:class:`~qbm_modes.spectral.KernelSet` or from a retarded/Hadamard
self-energy table; the two routes are related by an exact dictionary (see
:mod:`qbm_modes.correspond`) and must agree to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, ValidationError
from .spectral import FrequencyGrid, KernelSet

__all__ = [
    "ModeSpec",
    "SelfEnergyTable",
    "PropagatorSet",
    "retarded_propagator",
    "propagator_set_from_kernels",
    "propagator_set_from_self_energy",
    "to_time_domain",
    "from_time_domain",
]


@dataclass(frozen=True)
class ModeSpec:
    """Oscillator frequency of the mode, optionally in field-theory form.

    ``omega0`` is the bare frequency of the reduced mode.  When the mode
    descends from a field of mass ``m`` at momentum ``|p|`` the dispersion
    base ``m^2 + p^2`` may differ from ``omega0^2``; both are kept.
    """

    omega0: float
    mass: float | None = None
    momentum: float | None = None

    def __post_init__(self):
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise ValidationError(f"omega0 must be finite and > 0, got {self.omega0}")
        if self.mass is not None and self.mass < 0:
            raise ValidationError("mass must be >= 0")

    @property
    def dispersion_base(self) -> float:
        """m^2 + p^2 when given, else omega0^2."""
        if self.mass is None and self.momentum is None:
            return self.omega0**2
        m = self.mass or 0.0
        p = self.momentum or 0.0
        return m * m + p * p


@dataclass(frozen=True)
class SelfEnergyTable:
    """Retarded and Hadamard self-energy samples at fixed |p|.

    ``noise_equiv`` stores the real noise kernel N = i*Sigma_hadamard/2;
    the Hadamard self-energy itself is purely imaginary in these
    conventions, so keeping the real N avoids phase bookkeeping.
    """

    grid: FrequencyGrid
    momentum: float
    re_sigma_r: np.ndarray
    im_sigma_r: np.ndarray
    noise_equiv: np.ndarray

    def __post_init__(self):
        n = self.grid.count
        for name in ("re_sigma_r", "im_sigma_r", "noise_equiv"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValidationError(f"{name} must have shape ({n},)")
            object.__setattr__(self, name, arr)
        w = self.grid.samples
        if np.any(self.im_sigma_r * w > 1e-12 * np.max(np.abs(self.im_sigma_r), initial=1e-300)):
            raise ValidationError("im_sigma_r must satisfy im_sigma_r(w)*w <= 0 (dissipative sign)")
        if np.any(self.noise_equiv < 0):
            raise ValidationError("noise_equiv must be >= 0")


PROPAGATOR_NAMES = (
    "g_ret",
    "g_adv",
    "g_feyn",
    "g_dyson",
    "g_plus",
    "g_minus",
    "g_hadamard",
    "g_pj",
)


@dataclass(frozen=True)
class PropagatorSet:
    """The eight two-point functions sampled on a frequency grid."""

    grid: FrequencyGrid
    g_ret: np.ndarray
    g_adv: np.ndarray
    g_feyn: np.ndarray
    g_dyson: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray
    g_hadamard: np.ndarray
    g_pj: np.ndarray

    def __post_init__(self):
        n = self.grid.count
        for name in PROPAGATOR_NAMES:
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (n,):
                raise ValidationError(f"{name} must have shape ({n},)")
            object.__setattr__(self, name, arr)

    def by_name(self, name: str) -> np.ndarray:
        if name not in PROPAGATOR_NAMES:
            raise KeyError(name)
        return getattr(self, name)


def _regulated_denominator(
    grid: FrequencyGrid,
    re_l: np.ndarray,
    im_l: np.ndarray,
    omega0: float,
    epsilon: float | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the -i*w*eps prescription where the intrinsic damping is weak.

    Returns the (possibly) regulated imaginary part and the common real
    denominator re_l^2 + im_l^2.  The regulator is only active at points
    where |Im L| < eps*omega0, so dissipative spectra are untouched.
    """
    w = grid.samples
    eps = 10.0 * grid.delta if epsilon is None else float(epsilon)
    if eps > 0:
        weak = np.abs(im_l) < eps * omega0
        im_reg = np.where(weak, im_l - w * eps, im_l)
    else:
        im_reg = im_l
    den = re_l**2 + im_reg**2
    if np.any(den == 0.0):
        bad = w[den == 0.0]
        raise SingularityError(
            f"propagator denominator vanishes exactly at omega={bad[:3]} with zero regulator"
        )
    return im_reg, den


def retarded_propagator(
    mode: ModeSpec,
    kernels: KernelSet,
    epsilon: float | None = None,
) -> np.ndarray:
    """G_R(w) = -i / (-w^2 + omega0^2 + H(w)) on the kernel grid.

    ``epsilon`` overrides the default pole regulator 10*delta (used only
    where the intrinsic damping H_I is negligible; pass 0 to disable).
    """
    w = kernels.grid.samples
    re_l = -(w**2) + mode.omega0**2 + kernels.h_re
    im_reg, den = _regulated_denominator(kernels.grid, re_l, kernels.h_im, mode.omega0, epsilon)
    return -1j / (re_l + 1j * im_reg)


def _assemble(grid, re_l, im_reg, den, noise, h_im):
    """Build the full set from the common denominator and raw numerators."""
    g_ret = -1j / (re_l + 1j * im_reg)
    g_adv = np.conj(g_ret)
    g_feyn = (-1j * re_l + noise) / den
    g_dyson = (1j * re_l + noise) / den
    g_minus = (noise + h_im) / den + 0j
    g_plus = (noise - h_im) / den + 0j
    g_hadamard = 2.0 * noise / den + 0j
    g_pj = -2.0 * h_im / den + 0j
    return PropagatorSet(
        grid=grid,
        g_ret=g_ret,
        g_adv=g_adv,
        g_feyn=g_feyn,
        g_dyson=g_dyson,
        g_plus=g_plus,
        g_minus=g_minus,
        g_hadamard=g_hadamard,
        g_pj=g_pj,
    )


def propagator_set_from_kernels(
    mode: ModeSpec,
    kernels: KernelSet,
    epsilon: float | None = None,
) -> PropagatorSet:
    """All eight propagators from the noise/dissipation kernels.

    The numerators are the raw kernels; only the shared denominator uses
    the regulated H_I, so the identities g_feyn + g_dyson = g_plus +
    g_minus = g_hadamard and g_hadamard = 2 N |g_ret|^2 hold exactly.
    """
    w = kernels.grid.samples
    re_l = -(w**2) + mode.omega0**2 + kernels.h_re
    im_reg, den = _regulated_denominator(kernels.grid, re_l, kernels.h_im, mode.omega0, epsilon)
    return _assemble(kernels.grid, re_l, im_reg, den, kernels.noise, kernels.h_im)


def propagator_set_from_self_energy(
    mode: ModeSpec,
    sigma: SelfEnergyTable,
    epsilon: float | None = None,
) -> PropagatorSet:
    """All eight propagators from a self-energy table.

    Uses the dispersion base m^2 + p^2 uniformly in the denominator, with
    Im Sigma_R in the role of H_I and N = i*Sigma_hadamard/2 in the role
    of the noise kernel.
    """
    w = sigma.grid.samples
    re_l = -(w**2) + mode.dispersion_base + sigma.re_sigma_r
    im_reg, den = _regulated_denominator(sigma.grid, re_l, sigma.im_sigma_r, mode.omega0, epsilon)
    return _assemble(sigma.grid, re_l, im_reg, den, sigma.noise_equiv, sigma.im_sigma_r)


def to_time_domain(grid: FrequencyGrid, samples: np.ndarray) -> np.ndarray:
    """Transform frequency samples to the conjugate time grid.

    Discretizes ``G(t) = (1/2pi) int dw e^{-iwt} G(w)`` on ``grid.times``;
    the round trip through :func:`from_time_domain` is exact to machine
    precision.  No windowing is applied.
    """
    samples = np.asarray(samples, dtype=complex)
    n = grid.count
    if samples.shape != (n,):
        raise ValidationError(f"samples must have shape ({n},)")
    j = np.arange(n)
    # w_j t_m = 2 pi (j - (n-1)/2)(m - n/2)/n; fold the offsets into phases
    signed = samples * np.where(j % 2 == 0, 1.0, -1.0)
    ft = np.fft.fft(signed)
    phase_m = np.exp(1j * np.pi * j * (n - 1) / n)
    const = np.exp(-1j * np.pi * (n - 1) / 2.0)
    return (grid.delta / (2.0 * np.pi)) * const * phase_m * ft


def from_time_domain(grid: FrequencyGrid, samples: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_time_domain` (time samples -> frequency)."""
    samples = np.asarray(samples, dtype=complex)
    n = grid.count
    if samples.shape != (n,):
        raise ValidationError(f"samples must have shape ({n},)")
    m = np.arange(n)
    phase_m = np.exp(-1j * np.pi * m * (n - 1) / n)
    const = np.exp(1j * np.pi * (n - 1) / 2.0)
    pre = samples * phase_m * const
    ift = np.fft.ifft(pre) * n  # plain conjugate-kernel sum
    signed = ift * np.where(m % 2 == 0, 1.0, -1.0)
    return grid.time_step * signed


def negative_time_mass(grid: FrequencyGrid, freq_samples: np.ndarray) -> float:
    """Relative L1 mass of the time-domain transform at t < 0.

    Causality figure of merit for retarded quantities: exact retarded
    propagators give values limited only by band truncation.
    """
    gt = to_time_domain(grid, freq_samples)
    mass = np.abs(gt)
    total = float(np.sum(mass))
    if total == 0.0:
        return 0.0
    neg = float(np.sum(mass[grid.times < 0]))
    return neg / total
