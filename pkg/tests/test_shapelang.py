import pytest

from coendcheck.fixtures import build
from coendcheck.shapelang import (Env, Gen, Id, Par, Seq,
                                  ShapeSyntaxError, ShapeTypeError,
                                  StructureMissing, boundary, class_count,
                                  eval_closed, norm, parse_shape_script,
                                  parse_term, print_term, read_sexprs)

LENS_SCRIPT = """
; the monoidal lens shape and friends
(category C)
(object A C) (object B C) (object X C) (object Y C)
(shape arrow (seq (inport A) (outport B)))
(shape lens
  (seq (inport A) (fork C)
       (par (id C) (outport X))
       (par (id C) (inport Y))
       (junction C) (outport B)))
(shape feedback
  (seq (cap C)
       (par (id (op C) C) (inport X))
       (par (id (op C)) (junction C))
       (par (id (op C)) (fork C))
       (par (id (op C) C) (outport Y))
       (sym (op C) C)
       (cup C)))
"""


@pytest.fixture(scope="module")
def sig():
    return parse_shape_script(LENS_SCRIPT)


def env_for(sig, name, objs=None):
    mon = build(name)
    return Env(sig, {"C": mon}, objs=objs)


def naive_quotient_count(pairs, relations):
    classes = [{p} for p in pairs]
    changed = True
    while changed:
        changed = False
        for (x, y) in relations:
            cx = next(c for c in classes if x in c)
            cy = next(c for c in classes if y in c)
            if cx is not cy:
                cx |= cy
                classes.remove(cy)
                changed = True
    return len(classes)


def lens_count_oracle(mon, a, b, x, y):
    c = mon.base
    pairs = [(m, (g, f)) for m in c.objects
             for g in c.hom(a, mon.tensor(m, x))
             for f in c.hom(mon.tensor(m, y), b)]
    rels = []
    for mo in c.morphisms:
        m1, m2 = c.dom(mo), c.cod(mo)
        for g in c.hom(a, mon.tensor(m1, x)):
            for f in c.hom(mon.tensor(m2, y), b):
                left = (m2, (c.compose(g, mon.tensor_m(mo, c.identity(x))), f))
                right = (m1, (g, c.compose(mon.tensor_m(mo, c.identity(y)), f)))
                rels.append((left, right))
    return naive_quotient_count(pairs, rels)


def feedback_count_oracle(mon, x, y):
    c = mon.base
    pairs = [(m, h) for m in c.objects
             for h in c.hom(mon.tensor(m, x), mon.tensor(m, y))]
    rels = []
    for mo in c.morphisms:
        m1, m2 = c.dom(mo), c.cod(mo)
        for q in c.hom(mon.tensor(m2, x), mon.tensor(m1, y)):
            left = (m1, c.compose(mon.tensor_m(mo, c.identity(x)), q))
            right = (m2, c.compose(q, mon.tensor_m(mo, c.identity(y))))
            rels.append((left, right))
    return naive_quotient_count(pairs, rels)


# -- parsing -------------------------------------------------------------------


def test_parse_simple_closed(sig):
    t = sig.shapes["arrow"]
    assert boundary(t, sig) == ((), ())


def test_parse_roundtrip(sig):
    for name, t in sig.shapes.items():
        text = print_term(t)
        assert parse_term(read_sexprs(text)[0], sig) == t, name


def test_parse_rejects_unknown_generator(sig):
    with pytest.raises(ShapeSyntaxError):
        parse_term(read_sexprs("(wobble C)")[0], sig)


def test_parse_rejects_unknown_symbol(sig):
    with pytest.raises(ShapeSyntaxError):
        parse_term(read_sexprs("(inport Q)")[0], sig)


def test_parse_rejects_bad_arity(sig):
    with pytest.raises(ShapeSyntaxError):
        parse_term(read_sexprs("(inport A B)")[0], sig)


def test_boundary_mismatch_has_path(sig):
    t = Seq((Gen("inport", ("A",)), Gen("inport", ("B",))))
    with pytest.raises(ShapeTypeError) as e:
        boundary(t, sig)
    assert e.value.path == (1,)


def test_fork_junction_boundary(sig):
    t = parse_term(read_sexprs("(seq (fork C) (junction C))")[0], sig)
    from coendcheck.shapelang import Wire
    assert boundary(t, sig) == ((Wire("C"),), (Wire("C"),))


def test_lens_shape_closed(sig):
    assert boundary(sig.shapes["lens"], sig) == ((), ())


def test_feedback_shape_closed(sig):
    assert boundary(sig.shapes["feedback"], sig) == ((), ())


def test_cup_variance_error(sig):
    t = Seq((Gen("fork", ("C",)), Gen("cup", ("C",))))
    with pytest.raises(ShapeTypeError):
        boundary(t, sig)


# -- normalization -------------------------------------------------------------


def test_seq_flattening_and_id_dropping(sig):
    a = sig.shapes["arrow"]
    t1 = parse_term(read_sexprs(
        "(seq (seq (inport A) (id C)) (outport B))")[0], sig)
    assert t1 == a
    t2 = parse_term(read_sexprs(
        "(seq (inport A) (seq (id C) (outport B)))")[0], sig)
    assert t2 == a


def test_labeled_id_is_kept(sig):
    t = parse_term(read_sexprs("(seq (inport A) (id C @h) (outport B))")[0], sig)
    assert isinstance(t, Seq) and len(t.parts) == 3


def test_par_id_merge(sig):
    t = norm(Par(Id((), None), Gen("inport", ("A",))))
    assert t == Gen("inport", ("A",))
    t = parse_term(read_sexprs("(par (id C) (id C))")[0], sig)
    assert isinstance(t, Id) and len(t.wires) == 2


# -- evaluation ----------------------------------------------------------------


def test_arrow_counts_on_chain(sig):
    env = env_for(sig, "meet-lattice-2")
    c = env.cats["C"]
    for a in c.objects:
        for b in c.objects:
            e = Env(sig, {"C": env.mons["C"]}, objs={"A": a, "B": b})
            assert class_count(sig.shapes["arrow"], e) == len(c.hom(a, b))


def test_arrow_eval_invariant_under_id_insertion(sig):
    env = env_for(sig, "meet-lattice-2", objs={"A": 0, "B": 1})
    t1 = sig.shapes["arrow"]
    t2 = parse_term(read_sexprs("(seq (inport A) (id C) (id C) (outport B))")[0], sig)
    assert t1 == t2
    assert eval_closed(t1, env) == eval_closed(t2, env)


def test_lens_counts_match_direct_formula(sig):
    # over the join lattice the same shape counts prisms (the dual case)
    for fixture in ("meet-lattice-2", "z2", "prod-l2-z2", "join-lattice-2"):
        mon = build(fixture)
        c = mon.base
        for a in c.objects:
            for b in c.objects:
                for x in c.objects:
                    for y in c.objects:
                        env = Env(sig, {"C": mon},
                                  objs={"A": a, "B": b, "X": x, "Y": y})
                        assert class_count(sig.shapes["lens"], env) == \
                            lens_count_oracle(mon, a, b, x, y), (fixture, a, b, x, y)


def test_lens_over_z2_has_two_classes(sig):
    env = env_for(sig, "z2", objs={"A": 0, "B": 0, "X": 0, "Y": 0})
    assert class_count(sig.shapes["lens"], env) == 2


def test_feedback_counts_match_direct_formula(sig):
    for fixture in ("meet-lattice-2", "z2"):
        mon = build(fixture)
        c = mon.base
        for x in c.objects:
            for y in c.objects:
                env = Env(sig, {"C": mon},
                          objs={"A": 0, "B": 0, "X": x, "Y": y})
                assert class_count(sig.shapes["feedback"], env) == \
                    feedback_count_oracle(mon, x, y), (fixture, x, y)


def test_feedback_over_z2_two_classes(sig):
    env = env_for(sig, "z2", objs={"A": 0, "B": 0, "X": 0, "Y": 0})
    assert class_count(sig.shapes["feedback"], env) == 2


def test_structure_missing_for_junction_without_monoidal(sig):
    mon = build("meet-lattice-2")
    env = Env(sig, {"C": mon.base}, objs={"A": 0, "B": 0, "X": 0, "Y": 0})
    with pytest.raises(StructureMissing):
        eval_closed(sig.shapes["lens"], env)


def test_free_symbol_sweep(sig):
    env = env_for(sig, "meet-lattice-2")
    assert sorted(env.free_objects()) == ["A", "B", "X", "Y"]
    assert sum(1 for _ in env.assignments()) == 16
