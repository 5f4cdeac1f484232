"""Sensitivity for the middle group at fixed outer-group fractions.

Fix the fraction of healthy subjects classified healthy (TCF1) and the
fraction of advanced cases classified advanced (TCF3) at 0.8 each. The
thresholds follow from those choices, and the question becomes: what
fraction of early-stage subjects fall between them (TCF2)?

    python3 demos/02_tcf2_interval.py
"""

from pathlib import Path

from elroc3 import interval_tcf2, load_dataset
from elroc3.pivots import plugin_thresholds

DATA = Path(__file__).parent / "data" / "synthetic_three_group.csv"
x = load_dataset(DATA)

t1, t2 = plugin_thresholds(x, 0.8, 0.8)
print(f"plug-in thresholds t1 = {t1:.2f}, t2 = {t2:.2f}")

print(f"{'level':>6}  {'estimate':>8}  {'interval':>18}  w_hat")
for alpha in (0.10, 0.05, 0.01):
    ci = interval_tcf2(x, 0.8, 0.8, alpha=alpha, B=500, seed=11)
    print(f"{ci.level:>6.2f}  {ci.point_estimate:>8.3f}  [{ci.lower:.3f}, {ci.upper:.3f}]  {ci.w_hat:.3f}")

# Asking for outer fractions the data cannot support yields an empty interval,
# reported with a reason rather than an exception.
ci = interval_tcf2(x, 0.99, 0.99, B=200, seed=11)
print(f"TCF1 = TCF3 = 0.99: empty={ci.empty}, reason={ci.diagnostic}")
