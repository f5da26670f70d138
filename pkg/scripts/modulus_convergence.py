#!/usr/bin/env python3
"""Convergence table for the grid conformal modulus.

Rasterizes the round annulus at a sweep of spacings and prints the
computed modulus, the canonical inner radius, and the relative error
against log(1/r) / (2 pi).

Usage: python scripts/modulus_convergence.py [INNER_RADIUS]
"""

import math
import sys
import time

from invmetrics.domains import grid_annulus
from invmetrics.modulus import (
    bounded_complement_label,
    canonical_annulus_radius,
    conformal_modulus,
)

R = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
SPACINGS = [0.04, 0.02, 0.01, 0.005]


def main():
    exact = math.log(1.0 / R) / (2 * math.pi)
    print(f"annulus inner radius {R}, exact modulus {exact:.6f}")
    print(f"{'spacing':>8} {'modulus':>10} {'rel err':>9} {'rhat':>8} {'secs':>6}")
    for h in SPACINGS:
        grid = grid_annulus(R, h)
        inner = bounded_complement_label(grid)
        start = time.perf_counter()
        value = conformal_modulus(grid, inner, 3 - inner)
        elapsed = time.perf_counter() - start
        rhat = canonical_annulus_radius(value)
        print(f"{h:8.3f} {value:10.6f} {abs(value - exact) / exact:9.2e} "
              f"{rhat:8.4f} {elapsed:6.2f}")


if __name__ == "__main__":
    main()
