"""Write a synthetic three-group dataset with 34, 75 and 142 subjects.

The group sizes mirror a typical screening study (healthy, early-stage and
advanced disease). The marker is drawn from overlapping normal distributions
chosen to give a VUS of roughly 0.7, and values are rounded to two decimals so
that ties occur, as they do in real lab measurements.

Run from the repository root:

    python3 demos/00_make_synthetic_data.py
"""

from pathlib import Path

import numpy as np

from elroc3 import ThreeClassSample, vus_estimate, vus_estimate_ties
from elroc3.io import write_dataset

OUT = Path(__file__).parent / "data" / "synthetic_three_group.csv"

rng = np.random.default_rng(20240611)
x = ThreeClassSample.from_arrays(
    np.round(rng.normal(0.0, 0.5, 34), 2),
    np.round(rng.normal(0.75, 0.55, 75), 2),
    np.round(rng.normal(1.6, 0.7, 142), 2),
)
OUT.parent.mkdir(exist_ok=True)
write_dataset(x, OUT)
print(f"wrote {OUT} with sizes {x.sizes}")
print(f"VUS {vus_estimate(x):.3f} (tie-corrected {vus_estimate_ties(x):.3f})")
