"""Build the finite oracles and watch the validator reject a broken one.

Every semantic check in this package runs inside a fully explicit finite
category: objects and morphisms are interned ids, composition is a table,
and validation loops over every instance of every law.
"""

from coendcheck import validate_category, validate_monoidal
from coendcheck.fixtures import build

# a thin cartesian oracle: the two-element meet-semilattice
meet = build("meet-lattice-2")
print(meet.base)
print(validate_category(meet.base))
print(validate_monoidal(meet))

# a non-thin, non-cartesian oracle: Z/2 as a one-object category
z2 = build("z2")
print(z2.base)
print("morphisms:", [z2.base.mor_name(m) for m in z2.base.morphisms])

# tamper with one composition entry and the laws break loudly
z2.base._compose[(z2.base.mor_id("0"), z2.base.mor_id("1"))] = z2.base.mor_id("0")
report = validate_category(z2.base)
print(report)
