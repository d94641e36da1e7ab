#!/usr/bin/env python3
"""Regenerate the shipped fixture JSON files from the programmatic builders,
plus the five mutated negative fixtures."""

import copy
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from coendcheck import dump_fixture
from coendcheck.fixtures import FIXTURE_NAMES, build

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "coendcheck",
                   "data", "fixtures")


def write(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print("wrote", path)


def main():
    os.makedirs(os.path.join(OUT, "bad"), exist_ok=True)
    dumps = {}
    for name in FIXTURE_NAMES:
        mon = build(name)
        data = dump_fixture(mon.base, mon)
        dumps[name] = data
        write(os.path.join(OUT, f"{name}.json"), data)

    # one mutated fixture per shipped oracle, each breaking a different law
    bad = {}

    d = copy.deepcopy(dumps["meet-lattice-2"])
    d["name"] = "bad-meet-compose"
    # send id_0 ; 0<1 to id_1: the composite leaves its hom-set
    d["compose"] = [[f, g, ("id_1" if (f, g) == ("id_0", "0<1") else h)]
                    for f, g, h in d["compose"]]
    bad["bad-meet-compose"] = d

    d = copy.deepcopy(dumps["z2"])
    d["name"] = "bad-z2-identity"
    # 0;1 = 0 breaks the left identity law
    d["compose"] = [[f, g, ("0" if (f, g) == ("0", "1") else h)]
                    for f, g, h in d["compose"]]
    bad["bad-z2-identity"] = d

    d = copy.deepcopy(dumps["join-lattice-2"])
    d["name"] = "bad-join-interchange"
    # tensoring 0<1 with itself must give 0<1; id_1 breaks typing/interchange
    d["monoidal"]["tensor_mor"] = [[f, g, ("id_1" if (f, g) == ("0<1", "0<1") else h)]
                                   for f, g, h in d["monoidal"]["tensor_mor"]]
    bad["bad-join-interchange"] = d

    d = copy.deepcopy(dumps["prod-l2-z2"])
    d["name"] = "bad-prod-braiding"
    # a non-identity braiding component breaks the symmetry equation
    d["monoidal"]["braiding"]["(1|x),(1|x)"] = "(id_1|1)"
    bad["bad-prod-braiding"] = d

    d = copy.deepcopy(dumps["diamond"])
    d["name"] = "bad-diamond-cartesian"
    # swap the projections out of a^b: proj1 then lands in b, not a
    w = d["monoidal"]["cartesian"]
    w["proj1"]["a,b"], w["proj2"]["a,b"] = w["proj2"]["a,b"], w["proj1"]["a,b"]
    bad["bad-diamond-cartesian"] = d

    for name, data in bad.items():
        write(os.path.join(OUT, "bad", f"{name}.json"), data)


if __name__ == "__main__":
    main()
