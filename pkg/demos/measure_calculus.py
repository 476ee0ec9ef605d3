"""Walk through cylinder arithmetic on a two-level toy construction.

F_0 = {0}, C_1 = {0, 10}, F_1 = 0..19, C_2 = {0, 100, 200}, F_2 = 0..299.
Every number printed is an exact rational.
"""
from cfactions.cylinders import (
    Cylinder, Deferred, PointPrefix, apply_point, lift, measure, meet_measure, translate,
)
from cfactions.schema import toy_schema

s = toy_schema()
A = Cylinder.from_sets(s, 1, range(5))
print("[0..4]_1 has measure", measure(A))

# A cylinder keeps its measure when rewritten one level down.
print("lifted to level 2:", len(lift(A, 2)), "tuples, measure", measure(lift(A, 2)))

# Small translations stay at level 1; larger ones need the next level.
print("translate by 5 :", sorted(x for ((x,),) in translate(A, 5).tuples))
out = translate(A, 18)
assert isinstance(out, Deferred)
print(f"translate by 18: deferred, fits {out.extra} level further down")

print("\n g  mu(T_g A ∩ A)")
for g in (0, 1, 2, 4, 5, 10, 20):
    print(f"{g:2d}  {meet_measure(A, g, None, A)}")

x = PointPrefix(1, (3,), ((100,),))
print("\nT_18 of the point (f=3, c_2=100):", apply_point(s, x, 18))
