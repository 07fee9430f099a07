#!/usr/bin/env python3
"""Generate the 62-channel 10-10 layout on an idealized spherical head.

Rows sit on sagittal latitudes (FP at the equator, C at the vertex); each
row's lateral electrodes are evenly spaced along the great-circle arc from
the row's midline electrode to its equatorial end point.
"""
import math
import sys

RADIUS_CM = 10.0

# Row: (inclination of midline electrode from vertex, signed toward the nose,
#       azimuth of the equatorial end point in degrees from the nose)
ROWS = {
    "AF": (67.5, 36.0),
    "F": (45.0, 54.0),
    "FC": (22.5, 72.0),
    "C": (0.0, 90.0),
    "CP": (-22.5, 108.0),
    "P": (-45.0, 126.0),
    "PO": (-67.5, 144.0),
}
# End-point names on the equator for each row (left side; right mirrors).
ENDS = {"AF": "AF7", "F": "F7", "FC": "FT7", "C": "T7", "CP": "TP7", "P": "P7", "PO": "PO7"}

ORDER = [
    "FP1", "FPZ", "FP2", "AF3", "AF4",
    "F7", "F5", "F3", "F1", "FZ", "F2", "F4", "F6", "F8",
    "FT7", "FC5", "FC3", "FC1", "FCZ", "FC2", "FC4", "FC6", "FT8",
    "T7", "C5", "C3", "C1", "CZ", "C2", "C4", "C6", "T8",
    "TP7", "CP5", "CP3", "CP1", "CPZ", "CP2", "CP4", "CP6", "TP8",
    "P7", "P5", "P3", "P1", "PZ", "P2", "P4", "P6", "P8",
    "PO7", "PO5", "PO3", "POZ", "PO4", "PO6", "PO8",
    "CB1", "O1", "OZ", "O2", "CB2",
]


def unit(incl_deg, az_deg):
    """x: right, y: nose, z: vertex. Azimuth measured from the nose toward the left."""
    t, a = math.radians(incl_deg), math.radians(az_deg)
    return (-math.sin(t) * math.sin(a), math.sin(t) * math.cos(a), math.cos(t))


def slerp(p, q, f):
    dot = max(-1.0, min(1.0, sum(a * b for a, b in zip(p, q))))
    om = math.acos(dot)
    if om < 1e-12:
        return p
    s0, s1 = math.sin((1 - f) * om) / math.sin(om), math.sin(f * om) / math.sin(om)
    return tuple(s0 * a + s1 * b for a, b in zip(p, q))


def midline(incl_signed):
    return unit(abs(incl_signed), 0.0 if incl_signed >= 0 else 180.0)


def positions():
    pos = {}
    pos["FPZ"] = unit(90.0, 0.0)
    pos["OZ"] = unit(90.0, 180.0)
    pos["FP1"] = unit(90.0, 18.0)
    pos["O1"] = unit(90.0, 162.0)
    pos["CB1"] = unit(112.5, 153.0)
    for row, (incl, end_az) in ROWS.items():
        mid = midline(incl)
        end = unit(90.0, end_az)
        pos[row + "Z"] = mid
        pos[ENDS[row]] = end
        for k, idx in enumerate((1, 3, 5), start=1):
            pos[f"{row}{idx}"] = slerp(mid, end, k / 4.0)
    # mirror left (odd) to right (even)
    for name in list(pos):
        digits = "".join(ch for ch in name if ch.isdigit())
        if digits and int(digits) % 2 == 1:
            mate = name[: len(name) - len(digits)] + str(int(digits) + 1)
            x, y, z = pos[name]
            pos[mate] = (-x, y, z)
    return pos


def main():
    pos = positions()
    out = sys.stdout
    out.write("# 62-channel 10-10 layout, idealized sphere of radius 10 cm\n")
    out.write("# x: toward right ear, y: toward nasion, z: toward vertex (cm)\n")
    for name in ORDER:
        x, y, z = (RADIUS_CM * c for c in pos[name])
        out.write(f"{name:<4} {x: .4f} {y: .4f} {z: .4f}\n")


if __name__ == "__main__":
    main()
