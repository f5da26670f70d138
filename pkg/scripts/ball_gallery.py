#!/usr/bin/env python3
"""Render a small gallery of metric-ball rasters as SVG files.

Shows the wrapping transition of annulus balls: below the half-core
length the ball is a disk-like blob, above it the ball surrounds the
hole and picks up connectivity.

Usage: python scripts/ball_gallery.py [OUTDIR]
"""

import math
import sys
from pathlib import Path

from invmetrics.domains import Annulus, Disk, rasterize
from invmetrics.kobayashi import kob_ball_raster
from invmetrics.render import render_ball_svg
from invmetrics.topology import connectivity_number

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("gallery")
SPACING = 0.02


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    s = math.sqrt(0.1)
    jobs = [
        ("disk_r1.0", Disk(), 0.2 + 0.1j, 1.0),
        ("annulus_r0.5", Annulus(0.1), s, 0.5),
        ("annulus_r1.5", Annulus(0.1), s, 1.5),
        ("annulus_r2.5_wrapping", Annulus(0.1), s, 2.5),
    ]
    for name, domain, center, radius in jobs:
        ball = kob_ball_raster(domain, center, radius, SPACING)
        domain_mask = rasterize(domain, SPACING).mask
        conn = connectivity_number(ball.mask)
        path = OUT / f"{name}.svg"
        path.write_text(render_ball_svg(domain_mask, ball.mask))
        print(f"{path}  cells={ball.cell_count()}  connectivity={conn}")


if __name__ == "__main__":
    main()
