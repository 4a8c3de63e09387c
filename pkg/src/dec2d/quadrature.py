"""Fixed quadrature rules used by the de Rham map and by test oracles."""
import numpy as np

# Symmetric 6-point rule on the reference triangle, exact for degree <= 4.
_A = 0.44594849091596488632
_B = 0.091576213509770743460
_WA = 0.22338158967801146570
_WB = 0.10995174365532186764

TRIANGLE_BARY = np.array([
    [1 - 2 * _A, _A, _A],
    [_A, 1 - 2 * _A, _A],
    [_A, _A, 1 - 2 * _A],
    [1 - 2 * _B, _B, _B],
    [_B, 1 - 2 * _B, _B],
    [_B, _B, 1 - 2 * _B],
])
# weights sum to 1; multiply by the triangle area
TRIANGLE_WEIGHTS = np.array([_WA, _WA, _WA, _WB, _WB, _WB])

_gx, _gw = np.polynomial.legendre.leggauss(5)
# 5-point Gauss on [0, 1]
LINE_POINTS = 0.5 * (_gx + 1.0)
LINE_WEIGHTS = 0.5 * _gw


def triangle_points(p0, p1, p2):
    """Physical quadrature points for the triangle (p0, p1, p2)."""
    P = np.array([p0, p1, p2], dtype=float)
    return TRIANGLE_BARY @ P


def integrate_triangle(func, p0, p1, p2, area):
    """Integrate a scalar function over a triangle of the given area."""
    vals = np.array([func(x) for x in triangle_points(p0, p1, p2)], dtype=float)
    return area * float(TRIANGLE_WEIGHTS @ vals)


def integrate_segment(func, a, b):
    """Integrate a scalar function over the parameter t in [0, 1] of a->b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    vals = np.array([func(a + t * (b - a)) for t in LINE_POINTS], dtype=float)
    return float(LINE_WEIGHTS @ vals)
