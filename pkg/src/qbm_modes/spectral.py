"""Effective environments and their noise/dissipation kernels.

An environment is specified by a coupling constant ``g``, a spectral
density ``I(omega)`` (dimensionless, even, non-negative) and an occupation
profile ``n(omega)``.  On a symmetric frequency grid the environment is
condensed into three real kernels:

* the dissipation amplitude ``d(omega) = (g^2/2) * omega * I(omega)``
  (the full dissipation kernel is ``D = i*d``),
* the noise kernel ``N(omega) = (1 + 2 n(|omega|)) * |d(omega)|``,
* the complex dressing kernel ``H = H_R + i*H_I`` with ``H_I = -d`` and
  ``H_R`` the principal-value (Kramers-Kronig) transform of ``H_I`` plus an
  optional constant frequency shift.

Every grid deliberately excludes ``omega = 0``: grids have an even number
of uniformly spaced points placed symmetrically about zero, so ratios like
``d(omega)/omega`` and ``coth(omega/2T)`` are never evaluated at the
removable singularity.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import sici

from .errors import (
    DomainError,
    RangeError,
    ResolutionWarning,
    ValidationError,
)

__all__ = [
    "FrequencyGrid",
    "SpectralDensity",
    "OccupationProfile",
    "EnvironmentSpec",
    "KernelSet",
    "TimeDomainKernels",
    "Diagnostic",
    "eval_spectral_density",
    "eval_occupation",
    "build_kernels",
    "verify_fdt",
    "kramers_kronig",
    "time_domain_kernels",
    "load_table_csv",
]


@dataclass(frozen=True)
class Diagnostic:
    """Structured, non-fatal finding attached to a computed object."""

    code: str
    message: str


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform symmetric frequency grid on [-omega_max, +omega_max].

    ``count`` must be even, which places all samples at half-integer
    multiples of the spacing and keeps ``omega = 0`` off the grid.

    Attributes
    ----------
    omega_max : float
        Largest sampled frequency (the grid endpoints are +-omega_max).
    count : int
        Number of samples; even, at least 8.
    """

    omega_max: float
    count: int

    def __post_init__(self):
        if not (self.omega_max > 0 and math.isfinite(self.omega_max)):
            raise ValidationError(f"omega_max must be finite and > 0, got {self.omega_max}")
        if self.count < 8 or self.count % 2 != 0:
            raise ValidationError(f"count must be even and >= 8, got {self.count}")

    @property
    def delta(self) -> float:
        """Grid spacing 2*omega_max/(count-1)."""
        return 2.0 * self.omega_max / (self.count - 1)

    @property
    def samples(self) -> np.ndarray:
        return np.linspace(-self.omega_max, self.omega_max, self.count)

    @property
    def positive(self) -> np.ndarray:
        """The omega > 0 half of the grid, ascending."""
        return self.samples[self.count // 2:]

    @property
    def time_step(self) -> float:
        """Spacing of the conjugate uniform time grid."""
        return 2.0 * np.pi / (self.count * self.delta)

    @property
    def times(self) -> np.ndarray:
        """Conjugate time grid, ``count`` points centred on t = 0."""
        n = self.count
        return (np.arange(n) - n // 2) * self.time_step

    def matches(self, other: "FrequencyGrid") -> bool:
        return self.count == other.count and np.isclose(
            self.omega_max, other.omega_max, rtol=1e-12, atol=0.0
        )


def _as_table(omegas, values, what: str) -> tuple[np.ndarray, np.ndarray]:
    om = np.asarray(omegas, dtype=float)
    val = np.asarray(values, dtype=float)
    if om.ndim != 1 or om.shape != val.shape or om.size < 2:
        raise ValidationError(f"{what} table needs two equal-length 1-d columns with >= 2 rows")
    if not np.all(np.isfinite(om)) or not np.all(np.isfinite(val)):
        raise ValidationError(f"{what} table contains non-finite entries")
    if np.any(np.diff(om) <= 0):
        raise ValidationError(f"{what} table omegas must be strictly increasing")
    if om[0] < 0:
        raise ValidationError(f"{what} table omegas must be >= 0 (evaluated at |omega|)")
    if np.any(val < 0):
        raise ValidationError(f"{what} table values must be >= 0")
    return om, val


def _interp_strict(x: float, om: np.ndarray, val: np.ndarray, what: str) -> float:
    if x < om[0] or x > om[-1]:
        raise RangeError(
            f"{what} queried at |omega|={x:g} outside table range [{om[0]:g}, {om[-1]:g}]"
        )
    return float(np.interp(x, om, val))


@dataclass(frozen=True)
class SpectralDensity:
    """Distribution of environment frequencies I(omega); even and >= 0.

    Kinds: ``ohmic`` (I = 1), ``ohmic-drude`` (I = cutoff^2/(omega^2+cutoff^2))
    and ``tabulated`` (linear interpolation, no extrapolation).
    """

    kind: str
    cutoff: float | None = None
    table_omega: np.ndarray | None = None
    table_value: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "ohmic":
            pass
        elif self.kind == "ohmic-drude":
            if self.cutoff is None or not (self.cutoff > 0 and math.isfinite(self.cutoff)):
                raise ValidationError("ohmic-drude density needs a finite cutoff > 0")
        elif self.kind == "tabulated":
            om, val = _as_table(self.table_omega, self.table_value, "spectral density")
            object.__setattr__(self, "table_omega", om)
            object.__setattr__(self, "table_value", val)
        else:
            raise ValidationError(f"unknown spectral density kind {self.kind!r}")

    @staticmethod
    def ohmic() -> "SpectralDensity":
        return SpectralDensity("ohmic")

    @staticmethod
    def drude(cutoff: float) -> "SpectralDensity":
        return SpectralDensity("ohmic-drude", cutoff=cutoff)

    @staticmethod
    def tabulated(omegas, values) -> "SpectralDensity":
        return SpectralDensity("tabulated", table_omega=omegas, table_value=values)

    def __call__(self, omega):
        return eval_spectral_density(self, omega)


@dataclass(frozen=True)
class OccupationProfile:
    """Mean occupation n(omega) of the environment modes, for omega > 0.

    Kinds: ``vacuum`` (n = 0), ``thermal`` (Bose-Einstein at temperature T)
    and ``tabulated``.
    """

    kind: str
    temperature: float | None = None
    table_omega: np.ndarray | None = None
    table_value: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "vacuum":
            pass
        elif self.kind == "thermal":
            if self.temperature is None or not (
                self.temperature > 0 and math.isfinite(self.temperature)
            ):
                raise ValidationError("thermal occupation needs a finite temperature > 0")
        elif self.kind == "tabulated":
            om, val = _as_table(self.table_omega, self.table_value, "occupation")
            object.__setattr__(self, "table_omega", om)
            object.__setattr__(self, "table_value", val)
        else:
            raise ValidationError(f"unknown occupation kind {self.kind!r}")

    @staticmethod
    def vacuum() -> "OccupationProfile":
        return OccupationProfile("vacuum")

    @staticmethod
    def thermal(temperature: float) -> "OccupationProfile":
        return OccupationProfile("thermal", temperature=temperature)

    @staticmethod
    def tabulated(omegas, values) -> "OccupationProfile":
        return OccupationProfile("tabulated", table_omega=omegas, table_value=values)

    def __call__(self, omega):
        return eval_occupation(self, omega)


@dataclass(frozen=True)
class EnvironmentSpec:
    """Effective linear environment: coupling g, density I, occupation n."""

    g: float
    density: SpectralDensity
    occupation: OccupationProfile

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise ValidationError(f"coupling g must be finite, got {self.g}")


def eval_spectral_density(density: SpectralDensity, omega) -> float | np.ndarray:
    """Evaluate I(omega); even in omega, >= 0.

    Tabulated densities are linearly interpolated; querying outside the
    table range raises :class:`RangeError` rather than clamping.
    """
    om = np.abs(np.asarray(omega, dtype=float))
    if not np.all(np.isfinite(om)):
        raise DomainError("omega must be finite")
    if density.kind == "ohmic":
        out = np.ones_like(om)
    elif density.kind == "ohmic-drude":
        lam2 = density.cutoff**2
        out = lam2 / (om**2 + lam2)
    else:
        to, tv = density.table_omega, density.table_value
        if np.any(om < to[0]) or np.any(om > to[-1]):
            raise RangeError(
                f"spectral density queried outside table range [{to[0]:g}, {to[-1]:g}]"
            )
        out = np.interp(om, to, tv)
    return out if np.ndim(omega) else float(out)


def eval_occupation(occ: OccupationProfile, omega) -> float | np.ndarray:
    """Evaluate n(omega) for omega > 0; thermal kind is Bose-Einstein."""
    om = np.asarray(omega, dtype=float)
    if np.any(~np.isfinite(om)) or np.any(om <= 0):
        raise DomainError("occupation is defined for omega > 0 only")
    if occ.kind == "vacuum":
        out = np.zeros_like(om)
    elif occ.kind == "thermal":
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(om / occ.temperature)
    else:
        to, tv = occ.table_omega, occ.table_value
        if np.any(om < to[0]) or np.any(om > to[-1]):
            raise RangeError(
                f"occupation queried outside table range [{to[0]:g}, {to[-1]:g}]"
            )
        out = np.interp(om, to, tv)
    return out if np.ndim(omega) else float(out)


@dataclass(frozen=True)
class KernelSet:
    """Noise, dissipation and dressing kernels sampled on a grid.

    ``d`` is the real dissipation amplitude (full kernel D = i*d), ``noise``
    the even non-negative noise kernel, and ``h_re + i*h_im`` the dressing
    kernel with ``h_im = -d`` by construction.  ``freq_shift`` is the
    constant actually added to the principal-value transform when building
    ``h_re`` (0 means the pure transform).
    """

    grid: FrequencyGrid
    d: np.ndarray
    noise: np.ndarray
    h_re: np.ndarray
    h_im: np.ndarray
    freq_shift: float = 0.0
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    def __post_init__(self):
        n = self.grid.count
        for name in ("d", "noise", "h_re", "h_im"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValidationError(f"kernel array {name} must have shape ({n},)")
            object.__setattr__(self, name, arr)

    @property
    def h(self) -> np.ndarray:
        """Complex dressing kernel H(omega) = H_R + i H_I."""
        return self.h_re + 1j * self.h_im


def kramers_kronig(grid: FrequencyGrid, h_im: np.ndarray) -> np.ndarray:
    """Principal-value transform of H_I on the grid.

    Implements ``H_R(w_j) = -(1/pi) * sum_{k != j} H_I(w_k) / (j - k)``,
    skipping the singular term, plus the excluded-cell correction
    ``(delta/pi) * H_I'(w_j)`` (the principal value across the skipped cell
    of width ``delta`` is ``-H_I'(w_j)*delta``, not zero).  With the
    correction the rule is second-order accurate; without it the slope at
    the singular point leaks in at first order.  The sum is a discrete
    convolution, evaluated with an FFT.
    """
    h_im = np.asarray(h_im, dtype=float)
    n = grid.count
    if h_im.shape != (n,):
        raise ValidationError(f"h_im must have shape ({n},)")
    offsets = np.arange(-(n - 1), n, dtype=float)
    kern = np.zeros(2 * n - 1)
    nz = offsets != 0
    kern[nz] = 1.0 / offsets[nz]
    conv = fftconvolve(h_im, kern, mode="full")[n - 1 : 2 * n - 1]
    slope = np.gradient(h_im, grid.delta)
    return (-conv + grid.delta * slope) / np.pi


def build_kernels(
    env: EnvironmentSpec,
    grid: FrequencyGrid,
    freq_shift: float = 0.0,
) -> KernelSet:
    """Sample the dissipation, noise and dressing kernels of ``env``.

    Parameters
    ----------
    env : EnvironmentSpec
        Coupling, spectral density and occupation.
    grid : FrequencyGrid
        Output grid; for a Drude density the spacing should resolve the
        cutoff (a :class:`ResolutionWarning` diagnostic is attached when
        ``delta > cutoff/10``).
    freq_shift : float
        Constant added to the principal-value transform when forming H_R.
        The transform itself is formally divergent only through this
        constant, which can always be absorbed into the oscillator
        frequency; the default keeps the pure transform.
    """
    w = grid.samples
    dens = eval_spectral_density(env.density, w)
    d = 0.5 * env.g**2 * w * dens
    occ = eval_occupation(env.occupation, np.abs(w))
    noise = np.abs(d) * (1.0 + 2.0 * occ)
    h_im = -d
    h_re = kramers_kronig(grid, h_im) + freq_shift

    diags = []
    if env.density.kind == "ohmic-drude" and grid.delta > env.density.cutoff / 10.0:
        diags.append(
            Diagnostic(
                "resolution",
                f"grid spacing {grid.delta:.3g} exceeds cutoff/10 = "
                f"{env.density.cutoff / 10.0:.3g}; kernels under-resolve the Drude knee",
            )
        )
        warnings.warn(diags[-1].message, ResolutionWarning, stacklevel=2)

    return KernelSet(
        grid=grid,
        d=d,
        noise=noise,
        h_re=h_re,
        h_im=h_im,
        freq_shift=freq_shift,
        diagnostics=tuple(diags),
    )


def verify_fdt(kernels: KernelSet, temperature: float) -> float:
    """Maximum relative deviation from N = coth(|w|/2T) |d|.

    Grid points with |omega| < 2*delta are excluded (removable-singularity
    neighbourhood), as are points where d vanishes; if every point is
    excluded the deviation is 0 by convention.
    """
    if not (temperature > 0 and math.isfinite(temperature)):
        raise DomainError(f"temperature must be finite and > 0, got {temperature}")
    w = kernels.grid.samples
    keep = np.abs(w) >= 2.0 * kernels.grid.delta
    dmax = float(np.max(np.abs(kernels.d)))
    if dmax == 0.0:
        return 0.0
    keep &= np.abs(kernels.d) > 1e-15 * dmax
    if not np.any(keep):
        return 0.0
    x = np.abs(w[keep]) / (2.0 * temperature)
    expected = np.abs(kernels.d[keep]) / np.tanh(x)
    return float(np.max(np.abs(kernels.noise[keep] - expected) / expected))


@dataclass(frozen=True)
class TimeDomainKernels:
    """Real time-domain dissipation and noise kernels on a uniform grid.

    ``dissipation[k]`` approximates the odd kernel at ``tau = k*dt`` (the
    full time-domain dissipation kernel; the memory kernel of the Langevin
    equation is ``-2 * dissipation`` for tau > 0).  ``noise[k]`` is the even
    time-domain noise kernel.
    """

    dt: float
    taus: np.ndarray
    dissipation: np.ndarray
    noise: np.ndarray

    @property
    def span(self) -> float:
        return float(self.taus[-1])


def _halfline_samples(kernels: KernelSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positive-half samples with an omega = 0 anchor prepended."""
    n = kernels.grid.count
    wp = kernels.grid.positive
    dp = kernels.d[n // 2:]
    npos = kernels.noise[n // 2:]
    # even extrapolation of N to 0 from the two half-offset samples
    n0 = max(0.0, (9.0 * npos[0] - npos[1]) / 8.0)
    w = np.concatenate(([0.0], wp))
    dline = np.concatenate(([0.0], dp))
    nline = np.concatenate(([n0], npos))
    return w, dline, nline


def _tail_coefficients(w: np.ndarray, f: np.ndarray) -> tuple[float, float]:
    """Fit f ~ c1/w + c3/w^3 at roughly W/2 and exactly W."""
    ia = w.size // 2
    wa, wb = w[ia], w[-1]
    fa, fb = f[ia], f[-1]
    mat = np.array([[1.0 / wa, 1.0 / wa**3], [1.0 / wb, 1.0 / wb**3]])
    c1, c3 = np.linalg.solve(mat, np.array([fa, fb]))
    return float(c1), float(c3)


def _tail_sin(x: np.ndarray, wmax: float, c1: float, c3: float) -> np.ndarray:
    """int_W^inf sin(w*tau) (c1/w + c3/w^3) dw at x = W*tau."""
    si, _ = sici(x)
    rest = 0.5 * np.pi - si
    cubic = np.sin(x) / (2.0 * x**2) + np.cos(x) / (2.0 * x) - 0.5 * rest
    return c1 * rest + c3 * (x / wmax) ** 2 * cubic


def _tail_cos(x: np.ndarray, wmax: float, c1: float, c3: float) -> np.ndarray:
    """int_W^inf cos(w*tau) (c1/w + c3/w^3) dw at x = W*tau."""
    si, ci = sici(x)
    cubic = np.cos(x) / (2.0 * x**2) - np.sin(x) / (2.0 * x) + 0.5 * ci
    return -c1 * ci + c3 * (x / wmax) ** 2 * cubic


def time_domain_kernels(kernels: KernelSet, dt: float, count: int) -> TimeDomainKernels:
    """Fourier-transform the kernels to a uniform time grid.

    The transforms are cosine/sine integrals over the sampled band plus an
    analytic ``c1/omega + c3/omega^3`` tail matched to the samples at the
    band edge.  The tail term removes the Gibbs ringing a sharp band cut
    would imprint on the time-domain kernels; without it the ringing floor
    sits far above the truncation threshold used by the memory
    integrators.

    The noise kernel of a thermal environment diverges logarithmically at
    tau = 0; the value stored at tau = 0 is the band-limited one.
    """
    if dt <= 0 or count < 2:
        raise ValidationError("need dt > 0 and count >= 2")
    w, dline, nline = _halfline_samples(kernels)
    wmax = w[-1]
    dmax = float(np.max(np.abs(dline)))
    if dmax > 0 and abs(dline[-1]) > 0.5 * dmax:
        warnings.warn(
            "dissipation kernel does not decay at the band edge; "
            "time-domain kernels are cutoff dominated (strict-ohmic case)",
            ResolutionWarning,
            stacklevel=2,
        )
    c1d, c3d = _tail_coefficients(w[1:], dline[1:])
    c1n, c3n = _tail_coefficients(w[1:], nline[1:])
    dw = w[2] - w[1]  # uniform spacing; w[0] is the omega = 0 anchor
    d_slope = (dline[-1] - dline[-2]) / dw
    n_slope = (nline[-1] - nline[-2]) / dw
    taus = np.arange(count) * dt
    dis = np.empty(count)
    noi = np.empty(count)
    # band-limited tau = 0 values; the dissipation kernel is odd so it is 0
    dis[0] = 0.0
    noi[0] = np.trapezoid(nline, w) / np.pi
    em = dw**2 / 12.0  # Euler-Maclaurin boundary correction weight
    chunk = max(1, int(2e6) // (w.size + 1))
    for lo in range(1, count, chunk):
        hi = min(count, lo + chunk)
        t = taus[lo:hi]
        phase = w[None, :] * t[:, None]
        x = wmax * t
        sin_x, cos_x = np.sin(x), np.cos(x)
        dis[lo:hi] = (
            np.trapezoid(np.sin(phase) * dline[None, :], w, axis=1)
            - em * (t * cos_x * dline[-1] + sin_x * d_slope)
            + _tail_sin(x, wmax, c1d, c3d)
        ) / np.pi
        noi[lo:hi] = (
            np.trapezoid(np.cos(phase) * nline[None, :], w, axis=1)
            - em * (-t * sin_x * nline[-1] + cos_x * n_slope)
            + _tail_cos(x, wmax, c1n, c3n)
        ) / np.pi
    return TimeDomainKernels(dt=dt, taus=taus, dissipation=dis, noise=noi)


def load_table_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``omega,value`` CSV table (strictly increasing omega)."""
    omegas: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["omega", "value"]:
            raise ValidationError(f"{path}: expected header 'omega,value'")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}: expected two columns, got {row!r}")
            omegas.append(float(row[0]))
            values.append(float(row[1]))
    return np.asarray(omegas), np.asarray(values)
