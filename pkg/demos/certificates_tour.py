"""Build the three families of constructions and check what can be certified at finite depth.

Run time is about half a minute; the largest wandering set has about half a
million tuples.
"""
from fractions import Fraction

from cfactions import certificates as cert
from cfactions.cylinders import Cylinder
from cfactions.schema import build_theorem01, build_theorem02, build_theorem03, validate


def show(label, obj):
    out = cert.check_any(obj)
    frac = out.data.get("fraction", out.data.get("bound"))
    print(f"  {label:<34} {out.verdict.value:<12} {frac}")


rigid = build_theorem01(1, 1, 5)
zero_type = build_theorem02(1, 1, 5)
index_two = build_theorem03(1, 3, (20, 40, 80))
for name, s in [("rigid, k=1", rigid), ("zero type, k=1", zero_type), ("index two", index_two)]:
    rep = validate(s)
    print(f"{name}: copies per level {[len(s.c(n)) for n in range(1, s.depth + 1)]}, "
          f"validator {'all pass' if rep.all_pass else rep.failures()}")

print("\nconservativity of T x T^-1 (swap map)")
for n in range(3):
    show(f"level {n}", cert.build_thm04_swap_witness(rigid, n))

z = ((0,),)
print("\nergodicity and conservativity witnesses")
show("first-hit map, k=1", cert.build_thm01_ergodicity_witness(rigid, z, z))
show("diagonal first hit, k+1 = 2", cert.build_thm02_conservativity_witness(zero_type, 1, 5))
targets = cert.thm03_default_targets(index_two, 1)
show("index two, T x T", cert.build_thm03_ergodicity_witness(index_two, *targets, 1))

print("\nsets whose orbit avoids a cylinder (exact lower bounds on their measure)")
show("T x T not ergodic (k=1)", cert.build_thm01_nonergodicity_certificate(rigid))
show("T x T wanders (k=1)", cert.build_thm02_wandering_certificate(zero_type))
show("T x T^-1 not ergodic", cert.build_thm03_nonergodicity_certificate(index_two))
show("T x T x T wanders", cert.build_thm03_wandering_certificate(index_two))

deep = build_theorem01(1, 1, 6)
A = Cylinder(deep, 2, [((0,),)])
prof = cert.rigidity_profile(deep, A, [3, 4, 5])
print("\nrigidity: mu(T_w A ∩ A)/mu(A) along w_3, w_4, w_5 =", ", ".join(map(str, prof)))

print("\nzero type: largest return ratio per level vs (k+1)^2/#C_n")
small = build_theorem02(1, 1, 4)
for n in range(1, 5):
    scan = cert.zero_type_scan(small, [(0,)], n)
    print(f"  level {n}: {scan.max_ratio} < {scan.bound}")
