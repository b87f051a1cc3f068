"""Segment-crossing predicate and incident-edge angle helpers.

The crossing predicate counts proper interior intersections of closed
segments; touching at an endpoint does not count, collinear overlap of
positive length does.
"""

from __future__ import annotations

import numpy as np


def _cross(ox: np.ndarray, oy: np.ndarray, ax: np.ndarray, ay: np.ndarray,
           bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    return (ax - ox) * (by - oy) - (bx - ox) * (ay - oy)


def crossing_mask(a1: np.ndarray, a2: np.ndarray,
                  b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Vectorized crossing test of segment (a1, a2) against segments (b1[i], b2[i]).

    All arrays are float; a1/a2 are (2,), b1/b2 are (M, 2). Returns (M,) bool.
    """
    d1 = _cross(a1[0], a1[1], a2[0], a2[1], b1[:, 0], b1[:, 1])
    d2 = _cross(a1[0], a1[1], a2[0], a2[1], b2[:, 0], b2[:, 1])
    d3 = _cross(b1[:, 0], b1[:, 1], b2[:, 0], b2[:, 1], a1[0], a1[1])
    d4 = _cross(b1[:, 0], b1[:, 1], b2[:, 0], b2[:, 1], a2[0], a2[1])

    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & \
             (((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0)))

    collinear = (d1 == 0) & (d2 == 0) & (d3 == 0) & (d4 == 0)
    if collinear.any():
        axis = a2 - a1
        span = float(axis @ axis)
        if span == 0.0:
            return proper
        t1 = (b1 - a1) @ axis
        t2 = (b2 - a1) @ axis
        lo = np.maximum(np.minimum(t1, t2), 0.0)
        hi = np.minimum(np.maximum(t1, t2), span)
        proper = proper | (collinear & (hi > lo))
    return proper


def segments_cross(a1, a2, b1, b2) -> bool:
    """Scalar convenience wrapper around crossing_mask."""
    return bool(crossing_mask(np.asarray(a1, dtype=float), np.asarray(a2, dtype=float),
                              np.asarray([b1], dtype=float), np.asarray([b2], dtype=float))[0])


def incident_angles(v: int, pos: np.ndarray, neighbors) -> np.ndarray:
    """Direction angles of the edges leaving v, zero-length edges dropped."""
    if len(neighbors) == 0:
        return np.empty(0)
    vec = pos[list(neighbors)] - pos[v]
    lengths = np.linalg.norm(vec, axis=-1)
    vec = vec[lengths > 0]
    if vec.shape[0] == 0:
        return np.empty(0)
    return np.arctan2(vec[:, 1], vec[:, 0])


def angular_gaps(angles: np.ndarray) -> np.ndarray:
    """Consecutive gaps between sorted angles (wraparound included); sums to 2*pi."""
    if angles.size < 2:
        return np.full(angles.size, 2.0 * np.pi) if angles.size == 1 else np.empty(0)
    ordered = np.sort(angles)
    gaps = np.diff(ordered, append=ordered[0] + 2.0 * np.pi)
    return gaps
