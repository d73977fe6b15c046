"""Deployment geometry on a local flat-Earth frame.

All positions live in a right-handed east/north/up frame, in meters, with the
service-area center at the origin and z measured above ground. Distances of a
few tens of km at 20 km platform height keep flat-Earth errors well below the
channel-model uncertainty, so no Earth curvature correction is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Hexagonal axial-coordinate step directions, counterclockwise.
_HEX_DIRECTIONS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@dataclass(frozen=True)
class Position:
    """Point in the local frame: x east, y north, z above ground (m)."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("position coordinates must be finite")
        if self.z < 0.0:
            raise ValueError(f"position must be at or above ground, got z={self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def _as_xyz(p) -> np.ndarray:
    if isinstance(p, Position):
        return p.as_array()
    return np.asarray(p, dtype=float)


def slant_distance(a, b) -> float | np.ndarray:
    """Euclidean separation between two points (or arrays of points), m."""
    pa, pb = _as_xyz(a), _as_xyz(b)
    return np.linalg.norm(pb - pa, axis=-1)


def elevation_angle_deg(ground, platform) -> float | np.ndarray:
    """Elevation of `platform` as seen from `ground`, degrees in (0, 90].

    Requires the platform strictly above the ground point; 90 deg when the
    platform is at zenith.
    """
    pg, pp = _as_xyz(ground), _as_xyz(platform)
    dz = pp[..., 2] - pg[..., 2]
    if np.any(dz <= 0.0):
        raise ValueError("platform must be strictly above the ground point")
    horiz = np.hypot(pp[..., 0] - pg[..., 0], pp[..., 1] - pg[..., 1])
    return np.degrees(np.arctan2(dz, horiz))


def off_axis_angle_deg(v_boresight, v_link) -> float | np.ndarray:
    """Angle between a boresight vector and a link direction, degrees [0, 180]."""
    a = np.asarray(v_boresight, dtype=float)
    b = np.asarray(v_link, dtype=float)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise ValueError("zero-length vector has no direction")
    cosang = np.sum(a * b, axis=-1) / (na * nb)
    return np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))


@dataclass(frozen=True)
class HibsLayout:
    """Platform position plus the hex grid of beam centers on the ground.

    Beam centers are ordered center first, then ring 1 (6 cells), ring 2
    (12 cells), each ring sorted by azimuth. `ring_index[i]` gives the ring
    (0, 1, 2, ...) of beam i.
    """

    platform_position: Position
    beam_centers: np.ndarray = field(repr=False)  # (n_beams, 3), z = 0
    ring_index: np.ndarray = field(repr=False)  # (n_beams,) int
    footprint_diameter_m: float
    service_radius_m: float

    @property
    def n_beams(self) -> int:
        return self.beam_centers.shape[0]


def service_disk_radius_m(service_area_km2: float) -> float:
    """Radius of a disk with the given area (km^2 in, m out)."""
    if service_area_km2 <= 0.0:
        raise ValueError("service area must be positive")
    return math.sqrt(service_area_km2 * 1e6 / math.pi)


def build_hibs_layout(
    footprint_diameter_m: float = 10_000.0,
    n_rings: int = 2,
    altitude_m: float = 20_000.0,
    service_area_km2: float = 4_000.0,
) -> HibsLayout:
    """Hexagonal multi-beam layout from a single platform over the area center.

    Adjacent beam centers sit one footprint diameter apart, so 2 rings give
    the 19-beam pattern with the outermost centers 2 diameters from nadir.
    """
    if footprint_diameter_m <= 0.0 or altitude_m <= 0.0:
        raise ValueError("footprint diameter and altitude must be positive")
    if n_rings < 0:
        raise ValueError("n_rings must be >= 0")
    s = footprint_diameter_m
    centers = [(0.0, 0.0)]
    rings = [0]
    for ring in range(1, n_rings + 1):
        # walk the hex ring starting from corner (ring, 0) in axial coordinates
        q, r = ring, 0
        pts = []
        for dq, dr in _HEX_DIRECTIONS[2:] + _HEX_DIRECTIONS[:2]:
            for _ in range(ring):
                x = s * (q + 0.5 * r)
                y = s * (math.sqrt(3.0) / 2.0) * r
                pts.append((x, y))
                q, r = q + dq, r + dr
        pts.sort(key=lambda xy: math.atan2(xy[1], xy[0]) % (2.0 * math.pi))
        centers.extend(pts)
        rings.extend([ring] * len(pts))
    beam_centers = np.zeros((len(centers), 3))
    beam_centers[:, :2] = np.asarray(centers)
    return HibsLayout(
        platform_position=Position(0.0, 0.0, altitude_m),
        beam_centers=beam_centers,
        ring_index=np.asarray(rings, dtype=int),
        footprint_diameter_m=footprint_diameter_m,
        service_radius_m=service_disk_radius_m(service_area_km2),
    )


@dataclass(frozen=True)
class TerrestrialLayout:
    """Ring of 3-sector macro sites around the service-area center.

    `sector_azimuth_deg[k]` is the boresight azimuth (degrees CCW from +x) of
    sector k; `sector_site[k]` indexes into `site_positions`.
    """

    site_positions: np.ndarray = field(repr=False)  # (n_sites, 3)
    sector_azimuth_deg: np.ndarray = field(repr=False)  # (3 * n_sites,)
    sector_site: np.ndarray = field(repr=False)  # (3 * n_sites,) int
    isd_m: float
    ring_radius_m: float

    @property
    def n_sites(self) -> int:
        return self.site_positions.shape[0]

    @property
    def n_sectors(self) -> int:
        return self.sector_azimuth_deg.shape[0]


def ring_radius_for_isd(isd_m: float, n_sites: int) -> float:
    """Radius at which `n_sites` sites, equally spaced on a circle, have the
    given chord distance between neighbors."""
    if isd_m <= 0.0:
        raise ValueError("inter-site distance must be positive")
    if n_sites < 2:
        raise ValueError("need at least 2 sites on a ring")
    return isd_m / (2.0 * math.sin(math.pi / n_sites))


def build_tn_ring_layout(
    isd_m: float = 9_000.0,
    n_sites: int = 12,
    site_height_m: float = 30.0,
    sector_rotation_deg: float = 0.0,
) -> TerrestrialLayout:
    """Equally spaced sites on one ring, three sectors per site.

    Sector boresights point at site_bearing + rotation + {0, 120, 240} deg,
    so with rotation 0 one sector of every site faces radially outward.
    """
    if site_height_m <= 0.0:
        raise ValueError("site height must be positive")
    radius = ring_radius_for_isd(isd_m, n_sites)
    bearings = 360.0 * np.arange(n_sites) / n_sites
    sites = np.zeros((n_sites, 3))
    sites[:, 0] = radius * np.cos(np.radians(bearings))
    sites[:, 1] = radius * np.sin(np.radians(bearings))
    sites[:, 2] = site_height_m
    az = (bearings[:, None] + sector_rotation_deg + np.array([0.0, 120.0, 240.0])) % 360.0
    return TerrestrialLayout(
        site_positions=sites,
        sector_azimuth_deg=az.ravel(),
        sector_site=np.repeat(np.arange(n_sites), 3),
        isd_m=isd_m,
        ring_radius_m=radius,
    )


def drop_users(
    count: int,
    rng: np.random.Generator,
    radius_m: float,
    inner_radius_m: float = 0.0,
    height_m: float = 1.5,
) -> np.ndarray:
    """Uniform user positions on a disk (or annulus), returned as (count, 3).

    Uniform in area: r = sqrt(U(inner^2, outer^2)). A zero-area region is
    rejected rather than silently returning duplicates.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if inner_radius_m < 0.0 or radius_m <= inner_radius_m:
        raise ValueError(
            f"empty drop region: inner={inner_radius_m} outer={radius_m}"
        )
    r = np.sqrt(rng.uniform(inner_radius_m**2, radius_m**2, size=count))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
    out = np.empty((count, 3))
    out[:, 0] = r * np.cos(theta)
    out[:, 1] = r * np.sin(theta)
    out[:, 2] = height_m
    return out
