import json

import pytest

from coendcheck.fincat import (FixtureError, load_fixture, dump_fixture,
                               from_comm_monoid, from_lattice, opposite,
                               opposite_monoidal, product, product_monoidal,
                               terminal_category, validate_category,
                               validate_functor, validate_monoidal, FinFunctor)
from coendcheck.fixtures import (FIXTURE_NAMES, bad_fixture_names,
                                 bad_fixture_path, build, fixture)
from coendcheck import load_fixture_file


@pytest.fixture(scope="module")
def oracles():
    return {name: build(name) for name in FIXTURE_NAMES}


def test_shipped_fixtures_validate(oracles):
    for name, mon in oracles.items():
        assert validate_category(mon.base).ok, name
        assert validate_monoidal(mon).ok, name


def test_loaded_fixtures_match_builders(oracles):
    for name in FIXTURE_NAMES:
        loaded = fixture(name)
        assert dump_fixture(loaded.base, loaded) == dump_fixture(
            oracles[name].base, oracles[name])
        assert validate_category(loaded.base).ok
        assert validate_monoidal(loaded).ok


def test_chain_category_laws():
    mon = build("meet-lattice-2")
    c = mon.base
    assert len(list(c.objects)) == 2
    assert len(list(c.morphisms)) == 3
    assert len(c.hom(c.obj_id("0"), c.obj_id("1"))) == 1
    assert len(c.hom(c.obj_id("1"), c.obj_id("0"))) == 0


def test_z2_category_laws():
    c = build("z2").base
    assert validate_category(c).ok
    one = c.mor_id("1")
    assert c.compose(one, one) == c.mor_id("0")


def test_tampered_identity_reports_violation():
    c = build("z2").base
    # mutate the table in place: 0;1 becomes 0
    c._compose[(c.mor_id("0"), c.mor_id("1"))] = c.mor_id("0")
    rep = validate_category(c)
    assert not rep.ok
    assert any(v.kind == "identity" for v in rep.violations)


def test_every_single_table_mutation_is_caught():
    # any single composition entry swap on z2 breaks the category laws or,
    # failing that, interchange against the untouched tensor table
    base = build("z2").base
    for key in list(base._compose):
        for wrong in base.morphisms:
            if wrong == base._compose[key]:
                continue
            mon = build("z2")
            mon.base._compose[key] = wrong
            ok = validate_category(mon.base).ok and validate_monoidal(mon).ok
            assert not ok, (key, wrong)


def test_monoidal_violations_reported():
    mon = build("z2")
    mon.tensor_mor[(1, 1)] = 1
    rep = validate_monoidal(mon)
    assert not rep.ok
    kinds = {v.kind for v in rep.violations}
    assert "interchange" in kinds or "strictness" in kinds


def test_meet_lattice_monoidal():
    mon = build("meet-lattice-2")
    assert mon.base.obj_name(mon.unit) == "1"
    assert mon.cartesian is not None and mon.cocartesian is None
    assert validate_monoidal(mon).ok


def test_join_lattice_monoidal():
    mon = build("join-lattice-2")
    assert mon.base.obj_name(mon.unit) == "0"
    assert mon.cocartesian is not None and mon.cartesian is None
    assert validate_monoidal(mon).ok


def test_z2_monoidal_symmetric_no_witnesses():
    mon = build("z2")
    assert validate_monoidal(mon).ok
    assert mon.braiding is not None
    assert mon.cartesian is None and mon.cocartesian is None


def test_trivial_monoid_is_terminal_oracle():
    mon = from_comm_monoid("triv", ["e"], {("e", "e"): "e"}, "e")
    assert validate_monoidal(mon).ok
    assert len(list(mon.base.morphisms)) == 1


def test_noncommutative_monoid_rejected():
    # S3 via two generators is enough: compose two transpositions both ways
    elems = list(range(6))  # permutations of 3 elements, tabulated

    def perm(i):
        return [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)][i]

    def mul(i, j):
        pi, pj = perm(i), perm(j)
        composite = tuple(pi[pj[k]] for k in range(3))
        return next(k for k in elems if perm(k) == composite)

    op = {(a, b): mul(a, b) for a in elems for b in elems}
    assert op[(1, 2)] != op[(2, 1)]
    with pytest.raises(FixtureError):
        from_comm_monoid("s3", elems, op, 0)


def test_non_lattice_rejected():
    # two incomparable tops: {bot, a, b} with a,b maximal has no join(a,b)... use
    # 4 elements where (a, b) has two minimal upper bounds
    elems = ["a", "b", "t1", "t2"]
    order = {(x, x) for x in elems}
    order |= {("a", "t1"), ("a", "t2"), ("b", "t1"), ("b", "t2")}
    with pytest.raises(FixtureError) as e:
        from_lattice("bad", elems, order, "join")
    assert "join" in str(e.value) or "bottom" in str(e.value)


def test_from_lattice_hom_sizes():
    mon = build("diamond")
    c = mon.base
    for a in c.objects:
        for b in c.objects:
            assert len(c.hom(a, b)) in (0, 1)


def test_opposite_involution(oracles):
    for mon in oracles.values():
        c = mon.base
        assert opposite(opposite(c)) is c
        assert validate_category(opposite(c)).ok


def test_opposite_chain_hom_reversal():
    c = build("meet-lattice-2").base
    oc = opposite(c)
    assert len(oc.hom(oc.obj_id("1"), oc.obj_id("0"))) == 1
    assert len(oc.hom(oc.obj_id("0"), oc.obj_id("1"))) == 0


def test_opposite_z2_isomorphic_to_itself():
    c = build("z2").base
    oc = opposite(c)
    assert oc._compose == {(g, f): h for (f, g), h in c._compose.items()}
    # commutative, so the table coincides with the original
    assert oc._compose == c._compose


def test_opposite_monoidal_swaps_witnesses():
    m = opposite_monoidal(build("meet-lattice-2"))
    assert m.cocartesian is not None and m.cartesian is None
    assert validate_monoidal(m).ok


def test_product_with_terminal_is_self():
    c = build("meet-lattice-2").base
    t = terminal_category()
    assert len(list(t.objects)) == 1 and len(list(t.morphisms)) == 1
    # the terminal category contributes no factors, so the product collapses
    assert product(c, t) is c
    assert product(t, c) is c


def test_product_hom_sizes_multiply(oracles):
    c = oracles["meet-lattice-2"].base
    d = oracles["z2"].base
    p = product(c, d)
    assert len(list(p.objects)) == 2
    sizes = set()
    for a in p.objects:
        for b in p.objects:
            ta, tb = p.obj_tuple(a), p.obj_tuple(b)
            assert len(p.hom(a, b)) == len(c.hom(ta[0], tb[0])) * len(d.hom(ta[1], tb[1]))
            sizes.add(len(p.hom(a, b)))
    assert sizes == {0, 2}
    assert validate_category(p).ok


def test_product_is_interned():
    c = build("z2").base
    assert product(c, c) is product(c, c)
    assert product(product(c, c), c) is product(c, product(c, c))


def test_product_monoidal_validates(oracles):
    mon = product_monoidal(oracles["meet-lattice-2"], oracles["z2"])
    assert validate_monoidal(mon).ok
    assert mon.braiding is not None


def test_functor_validation():
    l2 = build("meet-lattice-2").base
    z2 = build("z2").base
    f = FinFunctor("F", l2, z2,
                   {o: 0 for o in l2.objects},
                   {l2.mor_id("id_0"): z2.mor_id("0"),
                    l2.mor_id("id_1"): z2.mor_id("0"),
                    l2.mor_id("0<1"): z2.mor_id("1")})
    assert validate_functor(f).ok
    bad = FinFunctor("bad", z2, z2, {0: 0},
                     {z2.mor_id("0"): z2.mor_id("1"),
                      z2.mor_id("1"): z2.mor_id("0")})
    rep = validate_functor(bad)
    assert not rep.ok and any(v.kind == "functoriality" for v in rep.violations)


def test_bad_fixture_files_rejected():
    names = bad_fixture_names()
    assert len(names) == 5
    for name in names:
        cat, mon = load_fixture_file(bad_fixture_path(name))
        rep = validate_category(cat)
        if rep.ok:
            rep = validate_monoidal(mon)
        assert not rep.ok, name


def test_fixture_roundtrip(oracles):
    for name, mon in oracles.items():
        data = dump_fixture(mon.base, mon)
        cat2, mon2 = load_fixture(json.dumps(data))
        assert dump_fixture(cat2, mon2) == data


def test_duplicate_names_within_hom_rejected():
    data = {
        "name": "dup", "objects": ["a"],
        "homs": {"a->a": ["f", "f"]},
        "compose": [["f", "f", "f"]],
        "identities": {"a": "f"},
    }
    with pytest.raises(FixtureError):
        load_fixture(json.dumps(data))
