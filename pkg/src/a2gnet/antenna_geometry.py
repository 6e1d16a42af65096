"""3D placement, link geometry, and the two antenna models.

Conventions: x east, y north, h up (meters). Azimuth is measured from north
(+y), clockwise toward east, in radians. Elevation is positive above the
horizon. The conical UAV antenna keeps its opening angle in degrees because
the 29000/phi_B^2 gain idiom presumes degrees; every other angle is radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    h: float  # height above ground, m

    def __post_init__(self):
        if self.h < 0:
            raise DomainError("height must be >= 0")


@dataclass(frozen=True)
class LinkGeometry:
    """Derived link geometry between an aerial/UE node and a ground node.

    theta = atan((h_uav - h_g)/d_h); it is negative when the UE-side node
    sits below the ground-side node (e.g. a street-level user under a mast).
    """

    d_h: float
    d_3d: float
    h_uav: float
    h_g: float
    theta: float


def link_geometry(aerial: Position3D, ground: Position3D) -> LinkGeometry:
    """Build a LinkGeometry with `aerial` on the UE/UAV side of the model."""
    dx = aerial.x - ground.x
    dy = aerial.y - ground.y
    dz = aerial.h - ground.h
    d_h = math.hypot(dx, dy)
    d_3d = math.sqrt(d_h * d_h + dz * dz)
    if d_3d == 0.0:
        raise DomainError("link endpoints coincide")
    theta = math.atan2(dz, d_h)
    return LinkGeometry(d_h=d_h, d_3d=d_3d, h_uav=aerial.h, h_g=ground.h, theta=theta)


def azimuth_elevation(frm: Position3D, to: Position3D):
    """(azimuth, elevation) of the direction from `frm` toward `to`."""
    dx = to.x - frm.x
    dy = to.y - frm.y
    dz = to.h - frm.h
    d_h = math.hypot(dx, dy)
    if d_h == 0.0 and dz == 0.0:
        raise DomainError("direction between coincident points is undefined")
    return math.atan2(dx, dy), math.atan2(dz, d_h)


# ---------------------------------------------------------------------------
# Tilted sector base-station antenna
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorAntenna:
    """Separable azimuth/elevation sector pattern with downtilt.

    Attenuation in each plane is min(12 (off/bw)^2, floor) dB and the total
    is floored at `sidelobe_floor_db` below the peak. When the elevation
    beamwidth is not given it is estimated from gain and azimuth beamwidth
    via the 31000/(G0 phi3) rule used for sectoral reference patterns.
    """

    azimuth: float = 0.0                      # rad, boresight bearing
    electrical_tilt: float = math.radians(8)  # rad, downward positive
    mechanical_tilt: float = 0.0              # rad, downward positive
    max_gain_dbi: float = 16.0
    beamwidth_3db: float = math.radians(65)   # rad, azimuth plane
    sidelobe_floor_db: float = 20.0           # max attenuation below peak
    elevation_beamwidth_3db: Optional[float] = None  # rad; None -> estimated

    def __post_init__(self):
        if self.beamwidth_3db <= 0:
            raise DomainError("beamwidth must be positive")
        if self.sidelobe_floor_db <= 0:
            raise DomainError("sidelobe floor must be positive dB")

    @property
    def elevation_beamwidth(self) -> float:
        if self.elevation_beamwidth_3db is not None:
            return self.elevation_beamwidth_3db
        phi3_deg = math.degrees(self.beamwidth_3db)
        theta3_deg = 31000.0 * 10.0 ** (-self.max_gain_dbi / 10.0) / phi3_deg
        return math.radians(min(max(theta3_deg, 2.0), phi3_deg))

    @property
    def downtilt(self) -> float:
        return self.electrical_tilt + self.mechanical_tilt

    @property
    def main_gain(self) -> float:
        """G_M, linear."""
        return 10.0 ** (self.max_gain_dbi / 10.0)

    @property
    def side_gain(self) -> float:
        """G_m, linear (peak minus the sidelobe floor)."""
        return 10.0 ** ((self.max_gain_dbi - self.sidelobe_floor_db) / 10.0)


def _wrap_angle(a):
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def bs_gain_db(ant: SectorAntenna, azimuth, elevation):
    """Sector gain (dBi) toward a direction given as (azimuth, elevation).

    Accepts scalars or arrays; the pattern peak sits at the antenna azimuth
    and `downtilt` below the horizon, and never drops below
    max_gain_dbi - sidelobe_floor_db.
    """
    daz = _wrap_angle(np.asarray(azimuth, dtype=float) - ant.azimuth)
    dele = np.asarray(elevation, dtype=float) + ant.downtilt
    a_az = np.minimum(12.0 * (daz / ant.beamwidth_3db) ** 2, ant.sidelobe_floor_db)
    a_el = np.minimum(12.0 * (dele / ant.elevation_beamwidth) ** 2, ant.sidelobe_floor_db)
    att = np.minimum(a_az + a_el, ant.sidelobe_floor_db)
    out = ant.max_gain_dbi - att
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# UAV-side antenna
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OmniUav:
    gain_dbi: float = 2.15

    @property
    def gain_linear(self) -> float:
        return 10.0 ** (self.gain_dbi / 10.0)


@dataclass(frozen=True)
class ConeUav:
    """Ideal cone: gain 29000/phi_B^2 inside the main lobe, zero outside.

    phi_b_deg is the full opening angle in degrees; phi_t tilts the cone
    axis away from straight down, toward `tilt_azimuth`. The idealized
    pattern radiates about 55% of the spherical power budget at every
    opening angle, so it never claims over-unity directivity.
    """

    phi_b_deg: float
    phi_t: float = 0.0         # rad from nadir
    tilt_azimuth: float = 0.0  # rad

    def __post_init__(self):
        if not 0.0 < self.phi_b_deg <= 180.0:
            raise DomainError("cone opening angle must be in (0, 180] degrees")

    @property
    def gain_linear(self) -> float:
        return 29000.0 / self.phi_b_deg ** 2

    @property
    def axis_elevation(self) -> float:
        return self.phi_t - 0.5 * math.pi


UavAntenna = Union[OmniUav, ConeUav]


def uav_gain_linear(ant: UavAntenna, azimuth, elevation):
    """UAV antenna gain (linear) toward (azimuth, elevation) directions."""
    if isinstance(ant, OmniUav):
        shape = np.broadcast(np.asarray(azimuth), np.asarray(elevation)).shape
        g = np.full(shape, ant.gain_linear)
        return float(g) if g.ndim == 0 else g
    if not isinstance(ant, ConeUav):
        raise DomainError(f"unknown UAV antenna {ant!r}")
    az = np.asarray(azimuth, dtype=float)
    el = np.asarray(elevation, dtype=float)
    el_axis = ant.axis_elevation
    cos_sep = (np.sin(el) * math.sin(el_axis)
               + np.cos(el) * math.cos(el_axis) * np.cos(az - ant.tilt_azimuth))
    sep = np.arccos(np.clip(cos_sep, -1.0, 1.0))
    inside = sep <= math.radians(ant.phi_b_deg) / 2.0
    g = np.where(inside, ant.gain_linear, 0.0)
    return float(g) if g.ndim == 0 else g
