"""Spherical-Earth slant ranges between platforms on a shared line of sight."""

from __future__ import annotations

import math

EARTH_RADIUS_KM = 6371.0
MAX_ALTITUDE_KM = 40_000.0


def check_elevation(alpha_deg: float) -> float:
    if not (0.0 < alpha_deg <= 90.0):
        raise ValueError(f"elevation angle must lie in (0, 90] deg, got {alpha_deg}")
    return float(alpha_deg)


def check_altitude(h_km: float) -> float:
    if not (0.0 <= h_km <= MAX_ALTITUDE_KM):
        raise ValueError(f"altitude must lie in [0, {MAX_ALTITUDE_KM:g}] km, got {h_km}")
    return float(h_km)


def slant_range(h_low: float, h_high: float, alpha_deg: float) -> float:
    """Line-of-sight distance from the lower platform to the higher one.

    Parameters
    ----------
    h_low, h_high : float
        Endpoint altitudes above mean sea level in km, ``h_high > h_low``.
    alpha_deg : float
        Elevation angle at the lower endpoint, in (0, 90] degrees.

    Returns
    -------
    float
        Slant range in km. Equals ``h_high - h_low`` at zenith.
    """
    check_altitude(h_low)
    check_altitude(h_high)
    check_elevation(alpha_deg)
    if h_high <= h_low:
        raise ValueError(f"h_high ({h_high}) must exceed h_low ({h_low})")
    if alpha_deg == 90.0:
        return h_high - h_low
    r_low = EARTH_RADIUS_KM + h_low
    s = r_low * math.sin(math.radians(alpha_deg))
    # (h_high - h_low)(h_high + h_low + 2R) == r_high^2 - r_low^2 without cancellation
    span = (h_high - h_low) * (h_high + h_low + 2.0 * EARTH_RADIUS_KM)
    # d = sqrt(s^2 + span) - s, rearranged to avoid cancellation when s >> span
    return span / (math.sqrt(s * s + span) + s)
