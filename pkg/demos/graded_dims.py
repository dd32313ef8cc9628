"""Graded dimensions of the free and one-relator Lie algebras, with envelopes."""

from padicfam import liedims

p1 = liedims.PuncturedLine()
e = liedims.graded_dims(p1, 12).e
print("punctured line, e_n for n <= 12:", e)

g2 = liedims.ProjectiveGenus(2)
e2 = liedims.graded_dims(g2, 10).e
c = liedims.filip_chi(2, 10)
print("genus 2, e_n:", e2)
print("genus 2, chi_n(c):", [int(x) for x in c.chi_c])
print("genus 2, dim V_n^c:", [int(x) for x in c.v_fixed])

print("\nleast depth with positive defect against the closed-form bound (punctured line):")
for s in (6, 8, 12, 30, 80):
    t = liedims.min_depth(p1, 2 * s)
    flag = "" if t.exact_min <= t.paper_bound else "  <- bound too small"
    print(f"  s={s:<3} exact {t.exact_min:<3} bound {t.paper_bound}{flag}")
