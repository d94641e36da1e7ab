"""Shapes are typed terms; closed shapes evaluate to coend quotients.

The lens shape below reads: take A in, fork into a residual and an X
output, accept a Y input, join with the residual, and produce B. Its
evaluation over any monoidal oracle is the lens set of that type.
"""

from coendcheck.fixtures import build
from coendcheck.optics import lens_set
from coendcheck.shapelang import Env, class_count, parse_shape_script

sig = parse_shape_script("""
(category C)
(object A C) (object B C) (object X C) (object Y C)
(shape lens
  (seq (inport A) (fork C)
       (par (id C) (outport X))
       (par (id C) (inport Y))
       (junction C) (outport B)))
""")

for name in ("z2", "meet-lattice-2"):
    mon = build(name)
    c = mon.base
    print(f"-- {name}")
    for a in c.objects:
        env = Env(sig, {"C": mon}, objs={"A": a, "B": a, "X": a, "Y": a})
        shape_count = class_count(sig.shapes["lens"], env)
        direct = lens_set(mon, a, a, a, a).class_count
        print(f"  type ({c.obj_name(a)},...): shape eval {shape_count}, "
              f"direct coend {direct}")
        assert shape_count == direct
