"""Antenna gain patterns: circular-aperture beams and 3-sector macro panels.

The aperture beam follows the classic Airy form G(theta) ~ |2 J1(u)/u|^2 with
u = k*a*sin(theta); the sector pattern is the parabolic azimuth/elevation
attenuation model of TR 36.873 table 7.1-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Hankel asymptotic coefficients a_k for J1, a_k = a_{k-1} * (4 - (2k-1)^2) / (8k).
_J1_P = (1.0, 0.1171875, -0.144195556640625, 0.6765925884246826, -6.883914268109947)
_J1_Q = (0.375, -0.1025390625, 0.2775764465332031, -1.993531733751297)
_SERIES_CUTOFF = 20.0

FIRST_J1_ZERO = 3.8317059702075125  # u at the edge of the aperture main lobe


def bessel_j1(x):
    """Bessel function of the first kind, order one.

    Power series for |x| <= 20, Hankel asymptotic expansion beyond; absolute
    error stays below 1e-8 across |x| <= 50 (checked against an independent
    reference in the tests). Vectorized; scalar in, scalar out.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    ax = np.abs(np.atleast_1d(arr))
    out = np.empty_like(ax)

    small = ax <= _SERIES_CUTOFF
    if np.any(small):
        xs = ax[small]
        half = 0.5 * xs
        neg_q = -half * half
        term = half.copy()
        total = half.copy()
        # |term_60| < 1e-20 * J1 scale at x = 20; plain summation suffices
        for k in range(1, 60):
            term *= neg_q / (k * (k + 1.0))
            total += term
        out[small] = total

    if np.any(~small):
        xl = ax[~small]
        z = 1.0 / (xl * xl)
        p = _J1_P[0] + z * (_J1_P[1] + z * (_J1_P[2] + z * (_J1_P[3] + z * _J1_P[4])))
        q = (_J1_Q[0] + z * (_J1_Q[1] + z * (_J1_Q[2] + z * _J1_Q[3]))) / xl
        chi = xl - 0.75 * math.pi
        out[~small] = np.sqrt(2.0 / (math.pi * xl)) * (
            p * np.cos(chi) - q * np.sin(chi)
        )

    out = np.where(np.atleast_1d(arr) < 0.0, -out, out)  # J1 is odd
    return float(out[0]) if scalar else out.reshape(arr.shape)


@dataclass(frozen=True)
class AperturePattern:
    """Axially symmetric aperture beam.

    `ka` is the normalized aperture radius (wavenumber * radius) that sets the
    beamwidth; gain never drops more than `floor_db` below the peak (sidelobe
    floor standing in for everything the Airy nulls would otherwise zero out).
    By default only the main lobe is rendered and everything past the first
    null sits on that floor — a tapered-illumination stand-in, since literal
    uniform-disc sidelobes (first peak only 17.6 dB down) badly overstate the
    off-axis radiation of a practical beam. Set `bessel_sidelobes` to keep the
    full Airy ring structure instead.
    """

    peak_gain_dbi: float
    ka: float
    beamwidth_3db_deg: float
    floor_db: float = 30.0
    bessel_sidelobes: bool = False

    def __post_init__(self):
        if self.ka <= 0.0:
            raise ValueError("ka must be positive")
        if self.floor_db <= 0.0:
            raise ValueError("floor_db must be positive")


def aperture_gain_dbi(theta_off_axis_deg, pattern: AperturePattern):
    """Gain (dBi) of an aperture beam at the given off-axis angle(s).

    Relative pattern 10*log10(|2 J1(u)/u|^2), u = ka*sin(theta), clamped at
    peak - floor_db; past the first null the clamp is the whole story unless
    the pattern asks for literal sidelobes. Symmetric in theta; exact peak at
    boresight.
    """
    theta = np.asarray(theta_off_axis_deg, dtype=float)
    scalar = theta.ndim == 0
    u = pattern.ka * np.sin(np.radians(np.atleast_1d(theta)))
    au = np.abs(u)
    rel = np.ones_like(au)
    big = au > 1e-9
    ub = au[big]
    rel[big] = (2.0 * bessel_j1(ub) / ub) ** 2
    if not pattern.bessel_sidelobes:
        rel[au > FIRST_J1_ZERO] = 0.0
    floor_lin = 10.0 ** (-pattern.floor_db / 10.0)
    rel_db = 10.0 * np.log10(np.maximum(rel, floor_lin))
    gain = pattern.peak_gain_dbi + rel_db
    return float(gain[0]) if scalar else gain.reshape(theta.shape)


def solve_ka_for_beamwidth(
    beamwidth_3db_deg: float, tol_db: float = 0.01, max_iter: int = 100
) -> float:
    """Normalized aperture radius whose pattern is 3 dB down at half the
    given beamwidth. Bisection on the monotone main lobe; raises if the
    half-beamwidth target cannot be bracketed or bisection stalls.
    """
    if not 1.0 <= beamwidth_3db_deg <= 90.0:
        raise ValueError("3 dB beamwidth must lie in [1, 90] degrees")
    half_rad = math.radians(0.5 * beamwidth_3db_deg)
    sin_half = math.sin(half_rad)

    def rel_db(u: float) -> float:
        if u < 1e-12:
            return 0.0
        return 10.0 * math.log10((2.0 * bessel_j1(u) / u) ** 2)

    lo, hi = 1e-6, 3.8317  # main lobe ends at the first J1 zero
    if rel_db(hi * 0.9999) > -3.0:
        raise RuntimeError("cannot bracket the -3 dB point")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = rel_db(mid)
        if abs(f + 3.0) <= tol_db:
            return mid / sin_half
        if f > -3.0:
            lo = mid
        else:
            hi = mid
    raise RuntimeError(
        f"-3 dB bisection did not converge to {tol_db} dB in {max_iter} iterations"
    )


def make_aperture_pattern(
    beamwidth_3db_deg: float,
    peak_gain_dbi: float = 16.5,
    floor_db: float = 30.0,
    bessel_sidelobes: bool = False,
) -> AperturePattern:
    return AperturePattern(
        peak_gain_dbi=peak_gain_dbi,
        ka=solve_ka_for_beamwidth(beamwidth_3db_deg),
        beamwidth_3db_deg=beamwidth_3db_deg,
        floor_db=floor_db,
        bessel_sidelobes=bessel_sidelobes,
    )


@dataclass(frozen=True)
class SectorPattern:
    """TR 36.873-style parabolic sector pattern (single element, no array)."""

    peak_gain_dbi: float = 17.0
    h_hpbw_deg: float = 65.0
    v_hpbw_deg: float = 10.0
    front_back_db: float = 30.0  # A_max, also caps the combined attenuation
    sla_db: float = 30.0  # vertical sidelobe limit
    downtilt_deg: float = 6.0  # positive = boresight below horizon

    def __post_init__(self):
        if self.h_hpbw_deg <= 0.0 or self.v_hpbw_deg <= 0.0:
            raise ValueError("beamwidths must be positive")


def sector_gain_dbi(az_off_deg, depression_deg, pattern: SectorPattern):
    """Gain (dBi) of a sector antenna.

    `az_off_deg` is azimuth relative to boresight (wrapped to [-180, 180]);
    `depression_deg` is the link's angle below the horizontal at the antenna,
    positive downward, matched against the mechanical downtilt.
    """
    az = np.asarray(az_off_deg, dtype=float)
    el = np.asarray(depression_deg, dtype=float)
    az = (az + 180.0) % 360.0 - 180.0
    a_h = np.minimum(12.0 * (az / pattern.h_hpbw_deg) ** 2, pattern.front_back_db)
    a_v = np.minimum(
        12.0 * ((el - pattern.downtilt_deg) / pattern.v_hpbw_deg) ** 2, pattern.sla_db
    )
    att = np.minimum(a_h + a_v, pattern.front_back_db)
    return pattern.peak_gain_dbi - att
