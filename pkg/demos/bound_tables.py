"""Threshold tables for the family bounds, printed as exact rationals or enclosures."""

from padicfam import bounds
from padicfam.exactnum import format_bound


def show(rep):
    t = rep.threshold_str()
    print(f"  {rep.name:<14} threshold {t:<48} min_n {rep.min_n}")


print("stable-curve bound on M_g (r = g-3, s = 3g-3):")
for g in (4, 5, 6, 10, 20):
    show(bounds.mg_bound(g, g - 3))

print("\nS-unit bound by rank s (valid only for s > 5):")
for s in (4, 6, 8, 12):
    rep = bounds.sunit_bound(s)
    print(f"  s={s:<3} valid={rep.valid!s:<5} threshold {format_bound(rep.threshold)}")

print("\nclassical comparison rows at g = 4, s = 1:")
for rep in bounds.classical_rows(1, 4):
    show(rep)
