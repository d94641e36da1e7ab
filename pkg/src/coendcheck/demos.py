"""The shipped demo registry: each demo is a shape script and a derivation
script checked end to end over named fixture bindings, with a per-demo
confirmation pass (count formulas and composite-map bijections)."""

from __future__ import annotations

from importlib import resources

from .fixtures import fixture
from .rewrite import (CheckAborted, Report, check_derivation_once,
                      parse_derivation_script, script_object_symbols,
                      _check_points)
from .shapelang import Env, parse_shape_script


def demo_dir():
    return resources.files("coendcheck") / "data" / "demos"


def load_scripts(deriv_name):
    """Parse a packaged derivation script together with its shape script."""
    droot = demo_dir()
    text = (droot / deriv_name).read_text(encoding="utf-8")
    shapes_ref = None
    for line in text.splitlines():
        line = line.split(";", 1)[0].strip()
        if line.startswith("use "):
            shapes_ref = line[4:].strip()
            break
    if shapes_ref is None:
        raise ValueError(f"{deriv_name} does not reference a shape script")
    sig = parse_shape_script((droot / shapes_ref).read_text(encoding="utf-8"))
    script = parse_derivation_script(text, sig)
    return sig, script


def _fiber_count(env, sig, term):
    from .shapelang import Evaluator
    node = Evaluator(env).node(term)
    return sum(len(node.prof.fiber(a, b))
               for a in node.prof.source.objects
               for b in node.prof.target.objects)


def _composite_bijection(report, env, sig, terms, maps, label):
    """Compose the per-step class maps of the main derivation and report
    whether the composite is a bijection at every fiber."""
    from .shapelang import Evaluator
    ev = Evaluator(env)
    src = ev.node(terms[0])
    dst = ev.node(terms[-1])
    total = bij = True
    n_src = n_dst = 0
    for a in src.prof.source.objects:
        for b in src.prof.target.objects:
            image = []
            for rep in src.prof.fiber(a, b):
                v = rep
                for fwd in maps:
                    v = fwd[(a, b)][v]
                image.append(v)
            n_src += len(image)
            dstf = dst.prof.fiber(a, b)
            n_dst += len(dstf)
            if len(set(image)) != len(image) or set(image) != set(dstf):
                bij = False
    desc = env.describe_objs()
    tag = "bijection" if bij else "map"
    report.line(f"  composite {tag}: {n_src} -> {n_dst} classes"
                f"{' for ' + desc if desc else ''} [{label}]")
    return bij


def _expect(report, cond, text):
    if cond:
        report.line("  confirmed: " + text)
    else:
        report.fail("expected: " + text)


def _epilogue_lens_reduction(report, env, sig, terms, maps):
    c = env.cats["C"]
    mon = env.monoidal("C")
    a, b = env.objs["A"], env.objs["B"]
    x, y = env.objs["X"], env.objs["Y"]
    want = len(c.hom(a, x)) * len(c.hom(mon.tensor(a, y), b))
    got = _fiber_count(env, sig, terms[-1])
    ok = _composite_bijection(report, env, sig, terms, maps, "view/update pair")
    _expect(report, ok and got == want,
            f"|pairs| = |C(A,X)|*|C(A(x)Y,B)| = {want} at {env.describe_objs()}")


def _epilogue_prism_reduction(report, env, sig, terms, maps):
    c = env.cats["C"]
    mon = env.monoidal("C")
    a, b = env.objs["A"], env.objs["B"]
    x, y = env.objs["X"], env.objs["Y"]
    want = len(c.hom(y, b)) * len(c.hom(a, mon.tensor(b, x)))
    got = _fiber_count(env, sig, terms[-1])
    ok = _composite_bijection(report, env, sig, terms, maps, "match/build pair")
    _expect(report, ok and got == want,
            f"|pairs| = |C(Y,B)|*|C(A,B(+)X)| = {want} at {env.describe_objs()}")


def _epilogue_lens_apply(report, env, sig, terms, maps):
    c = env.cats["C"]
    a, b = env.objs["A"], env.objs["B"]
    got = _fiber_count(env, sig, terms[-1])
    _expect(report, got == len(c.hom(a, b)),
            f"final classes = |C(A,B)| = {len(c.hom(a, b))} at {env.describe_objs()}")


def _epilogue_learner_reduction(report, env, sig, terms, maps):
    from .optics import learner_triples
    mon = env.monoidal("C")
    a, b = env.objs["A"], env.objs["B"]
    want = learner_triples(mon, a, b).class_count
    got = _fiber_count(env, sig, terms[-1])
    ok = _composite_bijection(report, env, sig, terms, maps, "triple reduction")
    _expect(report, ok and got == want,
            f"final classes = |triples| = {want} at {env.describe_objs()}")


def _epilogue_feedback(report, env, sig, terms, maps):
    from .optics import feedback_set
    mon = env.monoidal("C")
    x, y = env.objs["X"], env.objs["Y"]
    want = feedback_set(mon, x, y).class_count
    got = _fiber_count(env, sig, terms[0])
    _expect(report, got == want,
            f"feedback classes = {want} at {env.describe_objs()}")


DEMOS = {
    "lens_reduction": {
        "script": "lens_reduction.deriv",
        "bindings": [{"C": "meet-lattice-2"}],
        "epilogue": _epilogue_lens_reduction,
        "blurb": "cartesian lenses are view/update pairs",
    },
    "prism_reduction": {
        "script": "prism_reduction.deriv",
        "bindings": [{"C": "join-lattice-2"}],
        "epilogue": _epilogue_prism_reduction,
        "blurb": "cocartesian lenses are match/build pairs",
    },
    "lens_apply": {
        "script": "lens_apply.deriv",
        "bindings": [{"C": "meet-lattice-2"}, {"C": "prod-l2-z2"}],
        "epilogue": _epilogue_lens_apply,
        "blurb": "plugging a morphism into a lens yields a morphism",
    },
    "optic_category": {
        "script": "optic_category.deriv",
        "bindings": [{"C": "z2"}, {"C": "meet-lattice-2"}],
        "blurb": "plugged optics contract to the composite optic",
    },
    "optic_crossed": {
        "script": "optic_crossed.deriv",
        "bindings": [{"C": "z2"}],
        "blurb": "the crossed composition and braid slides",
    },
    "feedback": {
        "script": "feedback.deriv",
        "bindings": [{"C": "z2"}, {"C": "meet-lattice-2"}],
        "epilogue": _epilogue_feedback,
        "blurb": "stateful processes modulo sliding the state",
    },
    "lens_to_dynamics": {
        "script": "lens_to_dynamics.deriv",
        "bindings": [{"C": "z2"}, {"C": "meet-lattice-2"}],
        "blurb": "a lens with matching types is a dynamical system",
    },
    "learner_reduction": {
        "script": "learner_reduction.deriv",
        "bindings": [{"C": "meet-lattice-2"}],
        "epilogue": _epilogue_learner_reduction,
        "blurb": "monoidal learners reduce to implement/request/update",
    },
    "lenses_to_learner": {
        "script": "lenses_to_learner.deriv",
        "bindings": [{"C": "meet-lattice-2"}, {"C": "z2"}],
        "blurb": "a pair of lenses defines a learner",
    },
    "adjunctions": {
        "script": "adjunctions.deriv",
        "bindings": [{"C": "meet-lattice-2", "D": "z2"}],
        "blurb": "all unit/counit triangles compose to the identity",
    },
    "points": {
        "script": "points.deriv",
        "bindings": [{"C": "z2"}],
        "blurb": "element tracking: sliding, unitors and embeddings",
    },
}


def run_demo(name, fail_fast=False) -> Report:
    if name not in DEMOS:
        raise KeyError(f"unknown demo {name!r}; known: {', '.join(sorted(DEMOS))}")
    spec = DEMOS[name]
    sig, script = load_scripts(spec["script"])
    report = Report(fail_fast)
    report.line(f"demo {name}: {spec['blurb']}")
    try:
        for binding in spec["bindings"]:
            mons = {sym: fixture(fx) for sym, fx in binding.items()}
            rendered = " ".join(f"{s}={f}" for s, f in sorted(binding.items()))
            report.line(f"oracle {rendered}")
            env = Env(sig, mons)
            used = script_object_symbols(script, sig)
            for env_a in env.assignments(only=used):
                desc = env_a.describe_objs()
                report.line(f"assignment: {desc}" if desc else "assignment: (none)")
                named_results = {}
                for dname, deriv in list(script.named.items()) + (
                        [("main", script.main)] if script.main else []):
                    report.line(f" derivation {dname} from {deriv.shape}:")
                    out = check_derivation_once(deriv, sig, env_a, report)
                    if out is None:
                        continue
                    named_results[dname] = out
                    if dname == "main" and spec.get("epilogue"):
                        spec["epilogue"](report, env_a, sig, *out)
                _check_points(script, sig, env_a, named_results, report)
    except CheckAborted:
        pass
    report.line(f"result: {'ok' if report.ok else 'FAILURE'}")
    return report
