"""Every optics operation factors through its shipped derivation script:
the direct class-level implementation and the script's composed semantic
map agree pointwise, checked by transporting points through the scripts."""

import itertools

import pytest

from coendcheck.demos import DEMOS, load_scripts, run_demo
from coendcheck.fixtures import build
from coendcheck.optics import (apply_lens, compose_optic,
                               compose_optic_crossed, learner_reduce,
                               learner_set, learner_triples, lens_set,
                               lens_to_feedback, lens_to_pair,
                               lenses_to_learner, prism_to_pair)
from coendcheck.pointed import OpenDiagram, lift_many
from coendcheck.profunctor import split_obj2
from coendcheck.rewrite import strip_labels
from coendcheck.shapelang import Env, Evaluator


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo_runs_clean(name):
    report = run_demo(name)
    assert report.ok, report.text()


def _ids(c, *objs):
    return [c.identity(o) for o in objs]


def _lens_assignment(mon, lens, x):
    c = mon.base
    return {"g": lens.fwd,
            "s": (c.identity(mon.tensor(lens.residual, x)), (lens.residual, x)),
            "f": lens.bwd}


def test_lens_reduction_script_computes_lens_to_pair():
    sig, script = load_scripts("lens_reduction.deriv")
    mon = build("meet-lattice-2")
    c = mon.base
    steps = script.main.steps
    for a, b, x, y in itertools.product(c.objects, repeat=4):
        env = Env(sig, {"C": mon}, objs={"A": a, "B": b, "X": x, "Y": y})
        ev = Evaluator(env)
        space = lens_set(mon, a, b, x, y)
        for lens in space.all():
            d = OpenDiagram.from_values(sig, env, sig.shapes["lens"],
                                        _lens_assignment(mon, lens, x), ev)
            out = lift_many(steps, d, sig, env, ev)
            view, update = lens_to_pair(lens, mon)
            expected = OpenDiagram.from_values(
                sig, env, sig.shapes["lens-pair"],
                {"p1": view, "p3": update}, ev)
            assert strip_labels(out.shape) == strip_labels(expected.shape)
            assert out.point == expected.point


def test_prism_reduction_script_computes_prism_to_pair():
    sig, script = load_scripts("prism_reduction.deriv")
    mon = build("join-lattice-2")
    c = mon.base
    steps = script.main.steps
    for a, b, x, y in itertools.product(c.objects, repeat=4):
        env = Env(sig, {"C": mon}, objs={"A": a, "B": b, "X": x, "Y": y})
        ev = Evaluator(env)
        space = lens_set(mon, a, b, x, y)
        for prism in space.all():
            d = OpenDiagram.from_values(sig, env, sig.shapes["lens"],
                                        _lens_assignment(mon, prism, x), ev)
            out = lift_many(steps, d, sig, env, ev)
            match, bld = prism_to_pair(prism, mon)
            expected = OpenDiagram.from_values(
                sig, env, sig.shapes["prism-pair"],
                {"p1": match, "p3": bld}, ev)
            assert strip_labels(out.shape) == strip_labels(expected.shape)
            assert out.point == expected.point


def test_lens_apply_script_computes_apply_lens():
    sig, script = load_scripts("lens_apply.deriv")
    steps = script.main.steps
    for name in ("meet-lattice-2", "prod-l2-z2", "z2"):
        mon = build(name)
        c = mon.base
        for a, b, x, y in itertools.product(c.objects, repeat=4):
            env = Env(sig, {"C": mon}, objs={"A": a, "B": b, "X": x, "Y": y})
            ev = Evaluator(env)
            space = lens_set(mon, a, b, x, y)
            for lens in space.all():
                for h in c.hom(x, y):
                    assignment = _lens_assignment(mon, lens, x)
                    assignment["h1"] = h
                    d = OpenDiagram.from_values(
                        sig, env, sig.shapes["lens-applied"], assignment, ev)
                    out = lift_many(steps, d, sig, env, ev)
                    m, g, f = out.point
                    assert c.compose(g, f) == apply_lens(lens, h, mon)


def test_optic_category_script_computes_compose_optic():
    sig, script = load_scripts("optic_category.deriv")
    steps = script.main.steps
    for name in ("z2", "meet-lattice-2"):
        mon = build(name)
        c = mon.base
        objs = list(c.objects)
        for a, b, x, y, u, v in itertools.product(objs, repeat=6):
            env = Env(sig, {"C": mon},
                      objs=dict(zip("ABXYUV", (a, b, x, y, u, v))))
            ev = Evaluator(env)
            s1 = lens_set(mon, a, b, x, y)
            s2 = lens_set(mon, x, y, u, v)
            for l1 in s1.all():
                for l2 in s2.all():
                    assignment = {
                        "g1": l1.fwd,
                        "s1": (c.identity(mon.tensor(l1.residual, x)),
                               (l1.residual, x)),
                        "y1": c.identity(y), "j1": None, "f1": l1.bwd,
                        "g2": l2.fwd,
                        "s2": (c.identity(mon.tensor(l2.residual, u)),
                               (l2.residual, u)),
                        "v2": c.identity(v), "j2": None, "y2": l2.bwd,
                    }
                    assignment = {k: w for k, w in assignment.items()
                                  if w is not None}
                    d = OpenDiagram.from_values(
                        sig, env, sig.shapes["lens-composite"], assignment, ev)
                    out = lift_many(steps, d, sig, env, ev)
                    comp = compose_optic(l1, l2, mon)
                    # the composite lens written on the reduced shape
                    m, n = l1.residual, l2.residual
                    expected = OpenDiagram.from_values(
                        sig, env, sig.shapes["composite-reduced"],
                        {"g1": comp.fwd,
                         "s1": (c.identity(mon.tensor(mon.tensor(m, n), u)),
                                (m, mon.tensor(n, u))),
                         "s2": (c.identity(mon.tensor(n, u)), (n, u)),
                         "f1": comp.bwd}, ev)
                    assert strip_labels(out.shape) == strip_labels(expected.shape)
                    assert out.point == expected.point


def test_optic_crossed_script_computes_crossed_composition():
    sig, script = load_scripts("optic_crossed.deriv")
    steps = script.main.steps
    mon = build("z2")
    c = mon.base
    env = Env(sig, {"C": mon}, objs={k: 0 for k in "ABXYUV"})
    ev = Evaluator(env)
    s1 = lens_set(mon, 0, 0, 0, 0)
    for l1 in s1.all():
        for l2 in s1.all():
            m, n = l1.residual, l2.residual
            assignment = {
                "g1": l1.fwd,
                "s1": (c.identity(mon.tensor(m, 0)), (m, 0)),
                "s2": (c.identity(mon.tensor(n, 0)), (n, 0)),
                "j1": None, "yo": l1.bwd, "yi": c.identity(0),
                "uo": c.identity(0), "vi": c.identity(0),
                "f2": l2.bwd,
            }
            assignment = {k: w for k, w in assignment.items() if w is not None}
            d = OpenDiagram.from_values(sig, env, sig.shapes["crossed"],
                                        assignment, ev)
            out = lift_many(steps, d, sig, env, ev)
            comp = compose_optic_crossed(l1, l2, mon)
            mn = mon.tensor(m, n)
            expected = OpenDiagram.from_values(
                sig, env, sig.shapes["crossed-reduced"],
                {"g1": comp.fwd,
                 "s1": (c.identity(mon.tensor(mn, 0)), (m, mon.tensor(n, 0))),
                 "s2": (c.identity(mon.tensor(n, 0)), (n, 0)),
                 "f2": c.compose(mon.tensor_m(mon.braid(n, m), c.identity(0)),
                                 comp.bwd)}, ev)
            assert strip_labels(out.shape) == strip_labels(expected.shape)
            assert out.point == expected.point


def test_lens_to_dynamics_script_computes_lens_to_feedback():
    sig, script = load_scripts("lens_to_dynamics.deriv")
    steps = script.main.steps
    for name in ("z2", "meet-lattice-2"):
        mon = build(name)
        c = mon.base
        for a, x, y in itertools.product(c.objects, repeat=3):
            env = Env(sig, {"C": mon}, objs={"A": a, "X": x, "Y": y})
            ev = Evaluator(env)
            space = lens_set(mon, a, a, x, y)
            for lens in space.all():
                m = lens.residual
                d = OpenDiagram.from_values(
                    sig, env, sig.shapes["dynamics"],
                    {"st": c.identity(m), "yi": c.identity(y),
                     "j": c.identity(mon.tensor(m, y)),
                     "fo": lens.bwd, "gi": lens.fwd,
                     "s": (c.identity(mon.tensor(m, x)), (m, x)),
                     "xo": c.identity(x)}, ev)
                out = lift_many(steps, d, sig, env, ev)
                fm, fh = lens_to_feedback(lens, mon)
                expected = OpenDiagram.from_values(
                    sig, env, sig.shapes["dynamics-reduced"],
                    {"st": c.identity(fm), "yi": c.identity(y),
                     "j": c.identity(mon.tensor(fm, y)),
                     "s": (fh, (fm, x)), "xo": c.identity(x)}, ev)
                assert strip_labels(out.shape) == strip_labels(expected.shape)
                assert out.point == expected.point


def _learner_assignment(mon, p, q, h1, h2, a, b):
    c = mon.base
    return {"cp": c.identity(p), "a1": c.identity(a),
            "j1": c.identity(mon.tensor(p, a)), "s1": (h1, (q, b)),
            "b1": c.identity(b), "cq": c.identity(q), "cuq": c.identity(q),
            "a2": c.identity(b), "j2": c.identity(mon.tensor(q, b)),
            "s2": (h2, (p, a)), "b2": c.identity(a), "cu": c.identity(p)}


def test_learner_reduction_script_computes_learner_reduce():
    sig, script = load_scripts("learner_reduction.deriv")
    steps = script.main.steps
    mon = build("meet-lattice-2")
    c = mon.base
    for a, b in itertools.product(c.objects, repeat=2):
        env = Env(sig, {"C": mon}, objs={"A": a, "B": b})
        ev = Evaluator(env)
        ls = learner_set(mon, a, b)
        ts = learner_triples(mon, a, b)
        for (s, (h1, h2)) in ls.coend.reps:
            p, q = split_obj2(ls.pair_cat, c, c, s)
            d = OpenDiagram.from_values(
                sig, env, sig.shapes["learner"],
                _learner_assignment(mon, p, q, h1, h2, a, b), ev)
            out = lift_many(steps, d, sig, env, ev)
            tp, (ti, tr, tu) = learner_reduce(mon, a, b, (s, (h1, h2)), ls, ts)
            pa = mon.tensor(tp, a)
            expected = OpenDiagram.from_values(
                sig, env, sig.shapes["learner-reduced"],
                {"cp": c.identity(tp), "a1": c.identity(a),
                 "j1": c.identity(pa), "s1": (c.identity(pa), ti),
                 "b1": c.identity(b), "a2": c.identity(b),
                 "j2": c.identity(mon.tensor(pa, b)),
                 "s2": (tu, tr), "b2": c.identity(a),
                 "cu": c.identity(tp)}, ev)
            assert strip_labels(out.shape) == strip_labels(expected.shape)
            assert out.point == expected.point


def test_lenses_to_learner_script_computes_the_operation():
    sig, script = load_scripts("lenses_to_learner.deriv")
    steps = script.main.steps
    for name in ("meet-lattice-2", "z2"):
        mon = build(name)
        c = mon.base
        objs = list(c.objects)
        for u, v, a, b in itertools.product(objs, repeat=4):
            env = Env(sig, {"C": mon},
                      objs={"A": a, "B": b, "U": u, "V": v})
            ev = Evaluator(env)
            s1 = lens_set(mon, u, v, a, a)
            s2 = lens_set(mon, v, u, b, b)
            ls = learner_set(mon, a, b)
            for l1 in s1.all():
                for l2 in s2.all():
                    m, n = l1.residual, l2.residual
                    d = OpenDiagram.from_values(
                        sig, env, sig.shapes["learner-from-lenses"],
                        {"cp": c.identity(m), "a1": c.identity(a),
                         "j1": c.identity(mon.tensor(m, a)),
                         "vo": l1.bwd, "vi": c.identity(v),
                         "s1": (l2.fwd, (n, b)), "b1": c.identity(b),
                         "cq": c.identity(n), "cuq": c.identity(n),
                         "a2": c.identity(b),
                         "j2": c.identity(mon.tensor(n, b)),
                         "uo": l2.bwd, "ui": c.identity(u),
                         "s2": (l1.fwd, (m, a)), "b2": c.identity(a),
                         "cu": c.identity(m)}, ev)
                    out = lift_many(steps, d, sig, env, ev)
                    (s, (h1, h2)) = lenses_to_learner(l1, l2, mon, ls)
                    lp, lq = split_obj2(ls.pair_cat, c, c, s)
                    expected = OpenDiagram.from_values(
                        sig, env, sig.shapes["learner"],
                        _learner_assignment(mon, lp, lq, h1, h2, a, b), ev)
                    assert strip_labels(out.shape) == strip_labels(expected.shape)
                    assert out.point == expected.point


def test_learner_shape_eval_matches_direct_formula():
    sig, _ = load_scripts("learner_reduction.deriv")
    from coendcheck.shapelang import class_count
    for name in ("meet-lattice-2", "z2"):
        mon = build(name)
        c = mon.base
        for a, b in itertools.product(c.objects, repeat=2):
            env = Env(sig, {"C": mon}, objs={"A": a, "B": b,
                                             "U": 0, "V": 0})
            got = class_count(sig.shapes["learner"], env)
            assert got == learner_set(mon, a, b).class_count, (name, a, b)


def test_lens_reduction_demo_prints_16_confirmations():
    report = run_demo("lens_reduction")
    assert report.ok
    confirms = [l for l in report.lines if l.startswith("  confirmed:")]
    assert len(confirms) == 16


def test_validate_on_build_flag():
    from coendcheck import profunctor as pf
    c = build("z2").base
    bad_act = lambda f, g, v: 1 - v if f or g else v
    pf.VALIDATE_ON_BUILD = True
    try:
        with pytest.raises(pf.ProfunctorError):
            pf.ConcreteProf(c, c, lambda a, b: (0, 1), bad_act, name="bad")
        ok_p = pf.hom_prof(c)
        assert ok_p.fiber(0, 0)
    finally:
        pf.VALIDATE_ON_BUILD = False
