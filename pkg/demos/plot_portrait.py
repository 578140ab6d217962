"""
Phase portrait on the Poincare disc
===================================

Render the first-quadrant portrait as SVG.
"""

import sys

from flagflow import make_model
from flagflow.report import PortraitOptions, render_portrait, write_atomic

out = sys.argv[1] if len(sys.argv) > 1 else "portrait_I_2_2.svg"
svg = render_portrait(make_model("I", 2, 2), PortraitOptions(n_stream_seeds=32))
write_atomic(out, svg)
print(f"wrote {out} ({len(svg)} bytes)")
