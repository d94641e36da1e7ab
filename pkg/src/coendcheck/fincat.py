"""Explicit finite categories with strict monoidal structure.

Everything downstream is verified by brute force inside these small
universes: objects and morphisms are interned integer ids, composition is
a table, and every law is checked by exhaustive loops.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

_UID = itertools.count()


class FixtureError(Exception):
    """Malformed fixture data (bad names, missing tables)."""


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"[{self.kind}] {self.detail}"


@dataclass
class ValidationReport:
    subject: str
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, detail):
        self.violations.append(Violation(kind, detail))

    def __str__(self):
        head = f"validation of {self.subject}: "
        if self.ok:
            return head + "ok"
        lines = [head + f"{len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


class FinCategory:
    """A finite category given by explicit tables.

    Objects are ids 0..n-1, morphisms ids 0..m-1.  `compose(f, g)` is in
    diagrammatic order: f: A->B composed with g: B->C gives A->C.
    """

    def __init__(self, name, obj_names, mor_names, dom, cod, compose_table,
                 identities):
        self.uid = next(_UID)
        self.name = name
        self.obj_names = tuple(obj_names)
        self.mor_names = tuple(mor_names)
        self._dom = tuple(dom)
        self._cod = tuple(cod)
        self._compose = dict(compose_table)
        self._identity = tuple(identities)
        self._hom = {}
        for m in range(len(mor_names)):
            self._hom.setdefault((dom[m], cod[m]), []).append(m)
        self._hom = {k: tuple(v) for k, v in self._hom.items()}
        self._obj_by_name = {}
        for o, n in enumerate(obj_names):
            if n in self._obj_by_name:
                raise FixtureError(f"duplicate object name {n!r}")
            self._obj_by_name[n] = o
        # product/opposite bookkeeping, populated by the constructions below
        self.factors = None        # tuple of FinCategory for product categories
        self._obj_tuple = None     # obj id -> tuple of factor obj ids
        self._obj_pack = None
        self._mor_tuple = None
        self._mor_pack = None
        self.op_of = None
        self._op_cache = None

    # -- basic accessors ---------------------------------------------------

    @property
    def objects(self):
        return range(len(self.obj_names))

    @property
    def morphisms(self):
        return range(len(self.mor_names))

    def obj_name(self, o):
        return self.obj_names[o]

    def obj_id(self, name):
        try:
            return self._obj_by_name[name]
        except KeyError:
            raise FixtureError(f"unknown object {name!r} in {self.name}")

    def mor_name(self, m):
        return self.mor_names[m]

    def mors_named(self, name):
        return tuple(m for m in self.morphisms if self.mor_names[m] == name)

    def mor_id(self, name):
        ms = self.mors_named(name)
        if not ms:
            raise FixtureError(f"unknown morphism {name!r} in {self.name}")
        if len(ms) > 1:
            raise FixtureError(f"ambiguous morphism name {name!r} in {self.name}")
        return ms[0]

    def dom(self, m):
        return self._dom[m]

    def cod(self, m):
        return self._cod[m]

    def hom(self, a, b):
        return self._hom.get((a, b), ())

    def identity(self, o):
        return self._identity[o]

    def compose(self, f, g):
        """Diagrammatic composition: f then g."""
        try:
            return self._compose[(f, g)]
        except KeyError:
            raise FixtureError(
                f"no composition entry for {self.mor_name(f)};{self.mor_name(g)}"
                f" in {self.name}")

    def compose_chain(self, *ms):
        out = ms[0]
        for m in ms[1:]:
            out = self.compose(out, m)
        return out

    # -- product packing ---------------------------------------------------

    def obj_tuple(self, o):
        if self._obj_tuple is None:
            return (o,)
        return self._obj_tuple[o]

    def pack_obj(self, parts):
        if self._obj_pack is None:
            (o,) = parts
            return o
        return self._obj_pack[tuple(parts)]

    def mor_tuple(self, m):
        if self._mor_tuple is None:
            return (m,)
        return self._mor_tuple[m]

    def pack_mor(self, parts):
        if self._mor_pack is None:
            (m,) = parts
            return m
        return self._mor_pack[tuple(parts)]

    def __repr__(self):
        return (f"FinCategory({self.name!r}, {len(self.obj_names)} objects, "
                f"{len(self.mor_names)} morphisms)")


@dataclass
class CartesianWitness:
    proj1: dict      # (A, B) -> morphism A(x)B -> A
    proj2: dict
    pairing: dict    # (h1: X->A, h2: X->B) -> X -> A(x)B
    terminal: dict   # X -> the morphism X -> I


@dataclass
class CocartesianWitness:
    inj1: dict       # (A, B) -> morphism A -> A(+)B
    inj2: dict
    copairing: dict  # (h1: A->Y, h2: B->Y) -> A(+)B -> Y
    initial: dict    # X -> the morphism I -> X


@dataclass
class MonoidalStructure:
    base: FinCategory
    tensor_obj: dict          # (A, B) -> object
    tensor_mor: dict          # (f, g) -> morphism
    unit: int
    braiding: dict = None     # (A, B) -> morphism A(x)B -> B(x)A
    cartesian: CartesianWitness = None
    cocartesian: CocartesianWitness = None

    def tensor(self, a, b):
        return self.tensor_obj[(a, b)]

    def tensor_m(self, f, g):
        return self.tensor_mor[(f, g)]

    def braid(self, a, b):
        if self.braiding is None:
            raise FixtureError(f"{self.base.name} carries no braiding")
        return self.braiding[(a, b)]


@dataclass
class FinFunctor:
    name: str
    source: FinCategory
    target: FinCategory
    obj_map: dict
    mor_map: dict

    def obj(self, o):
        return self.obj_map[o]

    def mor(self, m):
        return self.mor_map[m]


# ---------------------------------------------------------------------------
# validation


def validate_category(c: FinCategory) -> ValidationReport:
    rep = ValidationReport(c.name)
    n_obj, n_mor = len(c.obj_names), len(c.mor_names)
    for m in c.morphisms:
        if not (0 <= c.dom(m) < n_obj and 0 <= c.cod(m) < n_obj):
            rep.add("malformed", f"morphism {c.mor_name(m)} has dangling endpoint")
    for o in c.objects:
        i = c.identity(o)
        if not (0 <= i < n_mor):
            rep.add("malformed", f"identity of {c.obj_name(o)} is a dangling id")
        elif c.dom(i) != o or c.cod(i) != o:
            rep.add("malformed", f"identity of {c.obj_name(o)} is not an endomorphism")
    for (f, g), h in c._compose.items():
        if not (0 <= h < n_mor):
            rep.add("malformed", f"composite of ({f},{g}) is a dangling id")
    if not rep.ok:
        return rep
    # totality and typing of composition
    for f in c.morphisms:
        for g in c.morphisms:
            if c.cod(f) != c.dom(g):
                continue
            if (f, g) not in c._compose:
                rep.add("malformed",
                        f"missing composite {c.mor_name(f)};{c.mor_name(g)}")
                continue
            h = c._compose[(f, g)]
            if c.dom(h) != c.dom(f) or c.cod(h) != c.cod(g):
                rep.add("malformed",
                        f"composite {c.mor_name(f)};{c.mor_name(g)} lands in the wrong hom-set")
    if not rep.ok:
        return rep
    for f in c.morphisms:
        if c.compose(c.identity(c.dom(f)), f) != f:
            rep.add("identity", f"id;{c.mor_name(f)} != {c.mor_name(f)}")
        if c.compose(f, c.identity(c.cod(f))) != f:
            rep.add("identity", f"{c.mor_name(f)};id != {c.mor_name(f)}")
    for f in c.morphisms:
        for g in c.morphisms:
            if c.cod(f) != c.dom(g):
                continue
            fg = c.compose(f, g)
            for h in c.morphisms:
                if c.cod(g) != c.dom(h):
                    continue
                if c.compose(fg, h) != c.compose(f, c.compose(g, h)):
                    rep.add("associativity",
                            f"({c.mor_name(f)};{c.mor_name(g)});{c.mor_name(h)} != "
                            f"{c.mor_name(f)};({c.mor_name(g)};{c.mor_name(h)})")
    return rep


def validate_monoidal(m: MonoidalStructure) -> ValidationReport:
    c = m.base
    rep = ValidationReport(f"monoidal structure on {c.name}")
    objs = list(c.objects)
    # totality
    for a in objs:
        for b in objs:
            if (a, b) not in m.tensor_obj:
                rep.add("malformed", f"tensor_obj missing at ({c.obj_name(a)},{c.obj_name(b)})")
    for f in c.morphisms:
        for g in c.morphisms:
            if (f, g) not in m.tensor_mor:
                rep.add("malformed", f"tensor_mor missing at ({c.mor_name(f)},{c.mor_name(g)})")
    if not rep.ok:
        return rep
    # strict associativity / unitality on objects
    for a in objs:
        if m.tensor(m.unit, a) != a or m.tensor(a, m.unit) != a:
            rep.add("strictness", f"unit law fails on object {c.obj_name(a)}")
        for b in objs:
            for d in objs:
                if m.tensor(m.tensor(a, b), d) != m.tensor(a, m.tensor(b, d)):
                    rep.add("strictness",
                            f"object associativity fails at ({c.obj_name(a)},{c.obj_name(b)},{c.obj_name(d)})")
    iu = c.identity(m.unit)
    for f in c.morphisms:
        tf = m.tensor_m(f, iu)
        ft = m.tensor_m(iu, f)
        if tf != f or ft != f:
            rep.add("strictness", f"morphism unit law fails at {c.mor_name(f)}")
        for g in c.morphisms:
            t = m.tensor_m(f, g)
            if c.dom(t) != m.tensor(c.dom(f), c.dom(g)) or \
               c.cod(t) != m.tensor(c.cod(f), c.cod(g)):
                rep.add("strictness", f"tensor_mor typing fails at ({c.mor_name(f)},{c.mor_name(g)})")
            for h in c.morphisms:
                if m.tensor_m(m.tensor_m(f, g), h) != m.tensor_m(f, m.tensor_m(g, h)):
                    rep.add("strictness",
                            f"morphism associativity fails at ({c.mor_name(f)},{c.mor_name(g)},{c.mor_name(h)})")
    for a in objs:
        for b in objs:
            if m.tensor_m(c.identity(a), c.identity(b)) != c.identity(m.tensor(a, b)):
                rep.add("strictness",
                        f"tensor of identities is not the identity at ({c.obj_name(a)},{c.obj_name(b)})")
    if not rep.ok:
        # typing is broken; the law loops below would chase dangling entries
        return rep
    # interchange
    for f1 in c.morphisms:
        for f2 in c.morphisms:
            if c.cod(f1) != c.dom(f2):
                continue
            for g1 in c.morphisms:
                for g2 in c.morphisms:
                    if c.cod(g1) != c.dom(g2):
                        continue
                    lhs = m.tensor_m(c.compose(f1, f2), c.compose(g1, g2))
                    rhs = c.compose(m.tensor_m(f1, g1), m.tensor_m(f2, g2))
                    if lhs != rhs:
                        rep.add("interchange",
                                f"interchange fails at ({c.mor_name(f1)};{c.mor_name(f2)}, "
                                f"{c.mor_name(g1)};{c.mor_name(g2)})")
    if m.braiding is not None:
        _validate_braiding(m, rep)
    if m.cartesian is not None:
        _validate_cartesian(m, rep)
    if m.cocartesian is not None:
        _validate_cocartesian(m, rep)
    return rep


def _validate_braiding(m, rep):
    c = m.base
    for a in c.objects:
        for b in c.objects:
            if (a, b) not in m.braiding:
                rep.add("malformed", f"braiding missing at ({c.obj_name(a)},{c.obj_name(b)})")
                continue
            s = m.braiding[(a, b)]
            if c.dom(s) != m.tensor(a, b) or c.cod(s) != m.tensor(b, a):
                rep.add("braiding", f"braiding at ({c.obj_name(a)},{c.obj_name(b)}) has wrong type")
    if not rep.ok:
        return
    for a in c.objects:
        if m.braiding[(a, m.unit)] != c.identity(a) or \
           m.braiding[(m.unit, a)] != c.identity(a):
            rep.add("braiding", f"unit braiding at {c.obj_name(a)} is not the identity")
        for b in c.objects:
            s = m.braiding[(a, b)]
            if c.compose(s, m.braiding[(b, a)]) != c.identity(m.tensor(a, b)):
                rep.add("braiding", f"symmetry fails at ({c.obj_name(a)},{c.obj_name(b)})")
    # naturality
    for f in c.morphisms:
        for g in c.morphisms:
            a, a1 = c.dom(f), c.cod(f)
            b, b1 = c.dom(g), c.cod(g)
            lhs = c.compose(m.tensor_m(f, g), m.braiding[(a1, b1)])
            rhs = c.compose(m.braiding[(a, b)], m.tensor_m(g, f))
            if lhs != rhs:
                rep.add("braiding", f"naturality fails at ({c.mor_name(f)},{c.mor_name(g)})")
    # strict hexagons
    for a in c.objects:
        for b in c.objects:
            for d in c.objects:
                s = m.braiding
                lhs = s[(a, m.tensor(b, d))]
                rhs = c.compose(m.tensor_m(s[(a, b)], c.identity(d)),
                                m.tensor_m(c.identity(b), s[(a, d)]))
                if lhs != rhs:
                    rep.add("braiding", f"hexagon fails at ({c.obj_name(a)},{c.obj_name(b)},{c.obj_name(d)})")
                lhs = s[(m.tensor(a, b), d)]
                rhs = c.compose(m.tensor_m(c.identity(a), s[(b, d)]),
                                m.tensor_m(s[(a, d)], c.identity(b)))
                if lhs != rhs:
                    rep.add("braiding", f"co-hexagon fails at ({c.obj_name(a)},{c.obj_name(b)},{c.obj_name(d)})")


def _validate_cartesian(m, rep):
    c, w = m.base, m.cartesian
    for a in c.objects:
        for b in c.objects:
            ab = m.tensor(a, b)
            for key, tgt, tab in (("proj1", a, w.proj1), ("proj2", b, w.proj2)):
                if (a, b) not in tab:
                    rep.add("malformed", f"{key} missing at ({c.obj_name(a)},{c.obj_name(b)})")
                    continue
                p = tab[(a, b)]
                if c.dom(p) != ab or c.cod(p) != tgt:
                    rep.add("cartesian", f"{key} at ({c.obj_name(a)},{c.obj_name(b)}) has wrong type")
    if not rep.ok:
        return
    for x in c.objects:
        if x not in w.terminal:
            rep.add("malformed", f"terminal point missing at {c.obj_name(x)}")
            continue
        t = w.terminal[x]
        if c.dom(t) != x or c.cod(t) != m.unit:
            rep.add("cartesian", f"terminal point at {c.obj_name(x)} has wrong type")
        elif c.hom(x, m.unit) != (t,):
            rep.add("cartesian", f"unit is not terminal at {c.obj_name(x)}")
        for a in c.objects:
            for b in c.objects:
                p1, p2 = w.proj1[(a, b)], w.proj2[(a, b)]
                for h1 in c.hom(x, a):
                    for h2 in c.hom(x, b):
                        if (h1, h2) not in w.pairing:
                            rep.add("malformed",
                                    f"pairing missing for ({c.mor_name(h1)},{c.mor_name(h2)})")
                            continue
                        p = w.pairing[(h1, h2)]
                        cands = [q for q in c.hom(x, m.tensor(a, b))
                                 if c.compose(q, p1) == h1 and c.compose(q, p2) == h2]
                        if cands != [p]:
                            rep.add("cartesian",
                                    f"pairing of ({c.mor_name(h1)},{c.mor_name(h2)}) is not the "
                                    f"unique mediating morphism")


def _validate_cocartesian(m, rep):
    c, w = m.base, m.cocartesian
    for a in c.objects:
        for b in c.objects:
            ab = m.tensor(a, b)
            for key, src, tab in (("inj1", a, w.inj1), ("inj2", b, w.inj2)):
                if (a, b) not in tab:
                    rep.add("malformed", f"{key} missing at ({c.obj_name(a)},{c.obj_name(b)})")
                    continue
                p = tab[(a, b)]
                if c.dom(p) != src or c.cod(p) != ab:
                    rep.add("cocartesian", f"{key} at ({c.obj_name(a)},{c.obj_name(b)}) has wrong type")
    if not rep.ok:
        return
    for x in c.objects:
        if x not in w.initial:
            rep.add("malformed", f"initial point missing at {c.obj_name(x)}")
            continue
        t = w.initial[x]
        if c.dom(t) != m.unit or c.cod(t) != x:
            rep.add("cocartesian", f"initial point at {c.obj_name(x)} has wrong type")
        elif c.hom(m.unit, x) != (t,):
            rep.add("cocartesian", f"unit is not initial at {c.obj_name(x)}")
        for a in c.objects:
            for b in c.objects:
                i1, i2 = w.inj1[(a, b)], w.inj2[(a, b)]
                for h1 in c.hom(a, x):
                    for h2 in c.hom(b, x):
                        if (h1, h2) not in w.copairing:
                            rep.add("malformed",
                                    f"copairing missing for ({c.mor_name(h1)},{c.mor_name(h2)})")
                            continue
                        p = w.copairing[(h1, h2)]
                        cands = [q for q in c.hom(m.tensor(a, b), x)
                                 if c.compose(i1, q) == h1 and c.compose(i2, q) == h2]
                        if cands != [p]:
                            rep.add("cocartesian",
                                    f"copairing of ({c.mor_name(h1)},{c.mor_name(h2)}) is not the "
                                    f"unique mediating morphism")


def validate_functor(fn: FinFunctor) -> ValidationReport:
    rep = ValidationReport(f"functor {fn.name}")
    s, t = fn.source, fn.target
    for o in s.objects:
        if o not in fn.obj_map:
            rep.add("malformed", f"object map missing at {s.obj_name(o)}")
    for m in s.morphisms:
        if m not in fn.mor_map:
            rep.add("malformed", f"morphism map missing at {s.mor_name(m)}")
    if not rep.ok:
        return rep
    for m in s.morphisms:
        fm = fn.mor_map[m]
        if t.dom(fm) != fn.obj_map[s.dom(m)] or t.cod(fm) != fn.obj_map[s.cod(m)]:
            rep.add("functoriality", f"image of {s.mor_name(m)} has wrong type")
    if not rep.ok:
        return rep
    for o in s.objects:
        if fn.mor_map[s.identity(o)] != t.identity(fn.obj_map[o]):
            rep.add("functoriality", f"identity at {s.obj_name(o)} not preserved")
    for f in s.morphisms:
        for g in s.morphisms:
            if s.cod(f) != s.dom(g):
                continue
            if fn.mor_map[s.compose(f, g)] != t.compose(fn.mor_map[f], fn.mor_map[g]):
                rep.add("functoriality",
                        f"composition not preserved at ({s.mor_name(f)},{s.mor_name(g)})")
    return rep


def compose_functors(f: FinFunctor, g: FinFunctor) -> FinFunctor:
    """Diagrammatic composite: f then g."""
    if f.target is not g.source:
        raise FixtureError(f"functors {f.name} and {g.name} are not composable")
    return FinFunctor(f"{f.name};{g.name}", f.source, g.target,
                      {o: g.obj_map[fo] for o, fo in f.obj_map.items()},
                      {m: g.mor_map[fm] for m, fm in f.mor_map.items()})


# ---------------------------------------------------------------------------
# constructions


def opposite(c: FinCategory) -> FinCategory:
    """Reverse all morphisms.  Morphism ids are shared with the base."""
    if c._op_cache is not None:
        return c._op_cache
    op = FinCategory(f"op({c.name})", c.obj_names, c.mor_names,
                     c._cod, c._dom,
                     {(g, f): h for (f, g), h in c._compose.items()},
                     c._identity)
    op.op_of = c
    op._op_cache = c
    c._op_cache = op
    return op


def opposite_monoidal(m: MonoidalStructure) -> MonoidalStructure:
    op = opposite(m.base)
    braiding = None
    if m.braiding is not None:
        braiding = {(a, b): m.braiding[(b, a)] for (a, b) in m.braiding}
    cart = cocart = None
    if m.cocartesian is not None:
        w = m.cocartesian
        cart = CartesianWitness(dict(w.inj1), dict(w.inj2), dict(w.copairing),
                                dict(w.initial))
    if m.cartesian is not None:
        w = m.cartesian
        cocart = CocartesianWitness(dict(w.proj1), dict(w.proj2), dict(w.pairing),
                                    dict(w.terminal))
    return MonoidalStructure(op, dict(m.tensor_obj), dict(m.tensor_mor), m.unit,
                             braiding, cart, cocart)


_PRODUCT_CACHE = {}


def product(*cats: FinCategory) -> FinCategory:
    """The n-ary product category, flattened over product factors.

    Products are interned per flat factor list, so any two boundaries with
    the same wire list resolve to the identical category object.
    """
    flat = []
    for c in cats:
        flat.extend(c.factors if c.factors is not None else [c])
    key = tuple(c.uid for c in flat)
    if key in _PRODUCT_CACHE:
        return _PRODUCT_CACHE[key]
    if len(flat) == 1:
        _PRODUCT_CACHE[key] = flat[0]
        return flat[0]
    name = "(" + "*".join(c.name for c in flat) + ")" if flat else "1"
    obj_tuples = list(itertools.product(*[c.objects for c in flat]))
    obj_names = ["(" + "|".join(c.obj_name(o) for c, o in zip(flat, t)) + ")"
                 for t in obj_tuples]
    if not flat:
        obj_tuples, obj_names = [()], ["*"]
    obj_pack = {t: i for i, t in enumerate(obj_tuples)}
    mor_tuples = list(itertools.product(*[c.morphisms for c in flat]))
    if not flat:
        mor_tuples = [()]
    mor_pack = {t: i for i, t in enumerate(mor_tuples)}
    mor_names = ["(" + "|".join(c.mor_name(m) for c, m in zip(flat, t)) + ")"
                 for t in mor_tuples] if flat else ["id*"]
    dom = [obj_pack[tuple(c.dom(m) for c, m in zip(flat, t))] for t in mor_tuples]
    cod = [obj_pack[tuple(c.cod(m) for c, m in zip(flat, t))] for t in mor_tuples]
    compose_table = {}
    for i, t1 in enumerate(mor_tuples):
        for j, t2 in enumerate(mor_tuples):
            if cod[i] != dom[j]:
                continue
            compose_table[(i, j)] = mor_pack[
                tuple(c.compose(m1, m2) for c, m1, m2 in zip(flat, t1, t2))]
    identities = [mor_pack[tuple(c.identity(o) for c, o in zip(flat, t))]
                  for t in obj_tuples]
    if not flat:
        compose_table = {(0, 0): 0}
        identities = [0]
    p = FinCategory(name, obj_names, mor_names, dom, cod, compose_table, identities)
    p.factors = tuple(flat)
    p._obj_tuple = {i: t for i, t in enumerate(obj_tuples)}
    p._obj_pack = obj_pack
    p._mor_tuple = {i: t for i, t in enumerate(mor_tuples)}
    p._mor_pack = mor_pack
    _PRODUCT_CACHE[key] = p
    return p


def terminal_category() -> FinCategory:
    return product()


def product_monoidal(m1: MonoidalStructure, m2: MonoidalStructure) -> MonoidalStructure:
    c = product(m1.base, m2.base)
    t_obj, t_mor = {}, {}
    for a in c.objects:
        for b in c.objects:
            ta, tb = c.obj_tuple(a), c.obj_tuple(b)
            t_obj[(a, b)] = c.pack_obj((m1.tensor(ta[0], tb[0]), m2.tensor(ta[1], tb[1])))
    for f in c.morphisms:
        for g in c.morphisms:
            tf, tg = c.mor_tuple(f), c.mor_tuple(g)
            t_mor[(f, g)] = c.pack_mor((m1.tensor_m(tf[0], tg[0]), m2.tensor_m(tf[1], tg[1])))
    unit = c.pack_obj((m1.unit, m2.unit))
    braiding = None
    if m1.braiding is not None and m2.braiding is not None:
        braiding = {}
        for a in c.objects:
            for b in c.objects:
                ta, tb = c.obj_tuple(a), c.obj_tuple(b)
                braiding[(a, b)] = c.pack_mor((m1.braiding[(ta[0], tb[0])],
                                               m2.braiding[(ta[1], tb[1])]))
    return MonoidalStructure(c, t_obj, t_mor, unit, braiding)


# ---------------------------------------------------------------------------
# builders


def build_category(name, objects, homs, compose, identities) -> FinCategory:
    """Build from name-level data.

    objects: list of object names.  homs: {(a, b): [morphism names]}.
    compose: {(f_name, g_name): h_name} in diagrammatic order.
    identities: {obj_name: morphism name}.
    Duplicate morphism names within one hom-set are rejected; duplicates
    across hom-sets are resolved by typing.
    """
    obj_ids = {n: i for i, n in enumerate(objects)}
    mor_names, dom, cod = [], [], []
    for (a, b), names in homs.items():
        if len(set(names)) != len(names):
            raise FixtureError(f"duplicate morphism name in hom({a},{b})")
        for n in names:
            mor_names.append(n)
            dom.append(obj_ids[a])
            cod.append(obj_ids[b])
    by_name = {}
    for i, n in enumerate(mor_names):
        by_name.setdefault(n, []).append(i)

    def resolve(n, d=None, c=None):
        # a globally unique name stands on its own (so a tampered table can
        # still load and then fail validation); otherwise fall back to the
        # expected hom-set to disambiguate
        cands = by_name.get(n, ())
        if len(cands) != 1:
            cands = [i for i in cands
                     if (d is None or dom[i] == d) and (c is None or cod[i] == c)]
        if len(cands) != 1:
            raise FixtureError(f"morphism name {n!r} is {'unknown' if not cands else 'ambiguous'}")
        return cands[0]

    table = {}
    for (fn, gn), hn in compose.items():
        pairs = [(i, j) for i in by_name.get(fn, ()) for j in by_name.get(gn, ())
                 if cod[i] == dom[j]]
        if len(pairs) != 1:
            raise FixtureError(f"composition entry ({fn},{gn}) is "
                               f"{'unknown' if not pairs else 'ambiguous'}")
        i, j = pairs[0]
        table[(i, j)] = resolve(hn, dom[i], cod[j])
    idents = [resolve(identities[n], obj_ids[n], obj_ids[n]) for n in objects]
    return FinCategory(name, objects, mor_names, dom, cod, table, idents)


def from_lattice(name, elements, order, mode) -> MonoidalStructure:
    """Thin category from a finite lattice; meet gives a cartesian oracle,
    join a cocartesian one.

    order is the set of pairs (a, b) with a <= b, reflexive and transitive.
    """
    if mode not in ("meet", "join"):
        raise FixtureError(f"mode must be 'meet' or 'join', got {mode!r}")
    n = len(elements)
    idx = {e: i for i, e in enumerate(elements)}
    leq = [[False] * n for _ in range(n)]
    for (a, b) in order:
        leq[idx[a]][idx[b]] = True
    for i in range(n):
        if not leq[i][i]:
            raise FixtureError(f"order is not reflexive at {elements[i]}")
    for i in range(n):
        for j in range(n):
            if leq[i][j] and leq[j][i] and i != j:
                raise FixtureError(f"order is not antisymmetric at ({elements[i]},{elements[j]})")
            for k in range(n):
                if leq[i][j] and leq[j][k] and not leq[i][k]:
                    raise FixtureError(f"order is not transitive at ({elements[i]},{elements[k]})")

    def bound(i, j):
        if mode == "meet":
            cands = [k for k in range(n) if leq[k][i] and leq[k][j]]
            best = [k for k in cands if all(leq[c][k] for c in cands)]
        else:
            cands = [k for k in range(n) if leq[i][k] and leq[j][k]]
            best = [k for k in cands if all(leq[k][c] for c in cands)]
        if len(best) != 1:
            raise FixtureError(f"no {mode} for ({elements[i]},{elements[j]})")
        return best[0]

    units = [k for k in range(n)
             if all((leq[i][k] if mode == "meet" else leq[k][i]) for i in range(n))]
    if len(units) != 1:
        raise FixtureError(f"lattice has no {'top' if mode == 'meet' else 'bottom'} element")
    unit = units[0]

    homs = {}
    for i in range(n):
        for j in range(n):
            if leq[i][j]:
                nm = f"id_{elements[i]}" if i == j else f"{elements[i]}<{elements[j]}"
                homs[(elements[i], elements[j])] = [nm]
    compose = {}
    for (a, b), (f,) in homs.items():
        for (b2, c2), (g,) in homs.items():
            if b == b2:
                compose[(f, g)] = homs[(a, c2)][0]
    identities = {e: homs[(e, e)][0] for e in elements}
    cat = build_category(name, list(elements), homs, compose, identities)

    def arrow(i, j):
        return cat.hom(i, j)[0]

    t_obj = {(i, j): bound(i, j) for i in range(n) for j in range(n)}
    t_mor = {}
    for f in cat.morphisms:
        for g in cat.morphisms:
            t_mor[(f, g)] = arrow(bound(cat.dom(f), cat.dom(g)),
                                  bound(cat.cod(f), cat.cod(g)))
    braiding = {(i, j): cat.identity(bound(i, j)) for i in range(n) for j in range(n)}
    mon = MonoidalStructure(cat, t_obj, t_mor, unit, braiding)
    if mode == "meet":
        mon.cartesian = CartesianWitness(
            proj1={(i, j): arrow(bound(i, j), i) for i in range(n) for j in range(n)},
            proj2={(i, j): arrow(bound(i, j), j) for i in range(n) for j in range(n)},
            pairing={(h1, h2): arrow(cat.dom(h1), bound(cat.cod(h1), cat.cod(h2)))
                     for h1 in cat.morphisms for h2 in cat.morphisms
                     if cat.dom(h1) == cat.dom(h2)},
            terminal={i: arrow(i, unit) for i in range(n)})
    else:
        mon.cocartesian = CocartesianWitness(
            inj1={(i, j): arrow(i, bound(i, j)) for i in range(n) for j in range(n)},
            inj2={(i, j): arrow(j, bound(i, j)) for i in range(n) for j in range(n)},
            copairing={(h1, h2): arrow(bound(cat.dom(h1), cat.dom(h2)), cat.cod(h1))
                       for h1 in cat.morphisms for h2 in cat.morphisms
                       if cat.cod(h1) == cat.cod(h2)},
            initial={i: arrow(unit, i) for i in range(n)})
    return mon


def from_comm_monoid(name, elements, op, unit) -> MonoidalStructure:
    """One-object oracle from a commutative monoid; tensor on morphisms is
    the monoid operation, so interchange is Eckmann-Hilton-tight.
    """
    n = len(elements)
    idx = {e: i for i, e in enumerate(elements)}
    for a in elements:
        for b in elements:
            if op[(a, b)] != op[(b, a)]:
                raise FixtureError(f"operation is not commutative at ({a},{b})")
            if (op[(a, b)]) not in idx:
                raise FixtureError(f"operation leaves the carrier at ({a},{b})")
            for c in elements:
                if op[(op[(a, b)], c)] != op[(a, op[(b, c)])]:
                    raise FixtureError(f"operation is not associative at ({a},{b},{c})")
        if op[(unit, a)] != a:
            raise FixtureError(f"unit law fails at {a}")
    homs = {("x", "x"): [str(e) for e in elements]}
    compose = {(str(a), str(b)): str(op[(a, b)]) for a in elements for b in elements}
    cat = build_category(name, ["x"], homs, compose, {"x": str(unit)})
    t_mor = {(idx[a], idx[b]): idx[op[(a, b)]] for a in elements for b in elements}
    return MonoidalStructure(cat, {(0, 0): 0}, t_mor, 0,
                             braiding={(0, 0): cat.identity(0)})


# ---------------------------------------------------------------------------
# fixture file format (JSON syntax)


def _split_pair(key):
    parts = key.split("->")
    if len(parts) != 2:
        raise FixtureError(f"bad hom key {key!r}, expected 'A->B'")
    return parts[0], parts[1]


def load_fixture(data) -> tuple:
    """Load a category fixture from parsed JSON data.

    Returns (FinCategory, MonoidalStructure or None).
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        objects = list(data["objects"])
        homs = {_split_pair(k): list(v) for k, v in data["homs"].items()}
        compose = {(f, g): h for f, g, h in data["compose"]}
        identities = dict(data["identities"])
    except KeyError as e:
        raise FixtureError(f"fixture is missing key {e}")
    name = data.get("name", "fixture")
    cat = build_category(name, objects, homs, compose, identities)
    if "monoidal" not in data:
        return cat, None
    mb = data["monoidal"]
    t_obj = {(cat.obj_id(a), cat.obj_id(b)): cat.obj_id(v)
             for (a, b), v in ((_split_comma(k), v) for k, v in mb["tensor_obj"].items())}
    t_mor = {}
    for f, g, h in mb["tensor_mor"]:
        pairs = [(i, j) for i in cat.mors_named(f) for j in cat.mors_named(g)]
        if len(pairs) != 1:
            raise FixtureError(f"tensor_mor entry ({f},{g}) is ambiguous")
        t_mor[pairs[0]] = cat.mor_id(h)
    mon = MonoidalStructure(cat, t_obj, t_mor, cat.obj_id(mb["unit"]))
    if "braiding" in mb:
        mon.braiding = {_obj_pair(cat, k): cat.mor_id(v)
                        for k, v in mb["braiding"].items()}
    if "cartesian" in mb:
        w = mb["cartesian"]
        mon.cartesian = CartesianWitness(
            proj1={_obj_pair(cat, k): cat.mor_id(v) for k, v in w["proj1"].items()},
            proj2={_obj_pair(cat, k): cat.mor_id(v) for k, v in w["proj2"].items()},
            pairing={(cat.mor_id(f), cat.mor_id(g)): cat.mor_id(h)
                     for f, g, h in w["pairing"]},
            terminal={cat.obj_id(k): cat.mor_id(v) for k, v in w["terminal"].items()})
    if "cocartesian" in mb:
        w = mb["cocartesian"]
        mon.cocartesian = CocartesianWitness(
            inj1={_obj_pair(cat, k): cat.mor_id(v) for k, v in w["inj1"].items()},
            inj2={_obj_pair(cat, k): cat.mor_id(v) for k, v in w["inj2"].items()},
            copairing={(cat.mor_id(f), cat.mor_id(g)): cat.mor_id(h)
                       for f, g, h in w["copairing"]},
            initial={cat.obj_id(k): cat.mor_id(v) for k, v in w["initial"].items()})
    return cat, mon


def _split_comma(key):
    parts = key.split(",")
    if len(parts) != 2:
        raise FixtureError(f"bad pair key {key!r}, expected 'A,B'")
    return parts[0], parts[1]


def _obj_pair(cat, key):
    a, b = _split_comma(key)
    return cat.obj_id(a), cat.obj_id(b)


def load_fixture_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise FixtureError(f"{path}: not valid JSON ({e})")
    return load_fixture(data)


def dump_fixture(cat: FinCategory, mon: MonoidalStructure = None) -> dict:
    """Serialize back to the fixture file format."""
    data = {
        "name": cat.name,
        "objects": list(cat.obj_names),
        "homs": {f"{cat.obj_name(a)}->{cat.obj_name(b)}":
                 [cat.mor_name(m) for m in ms]
                 for (a, b), ms in sorted(cat._hom.items())},
        "compose": sorted([cat.mor_name(f), cat.mor_name(g), cat.mor_name(h)]
                          for (f, g), h in cat._compose.items()),
        "identities": {cat.obj_name(o): cat.mor_name(cat.identity(o))
                       for o in cat.objects},
    }
    if mon is None:
        return data
    mb = {
        "tensor_obj": {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.obj_name(v)
                       for (a, b), v in sorted(mon.tensor_obj.items())},
        "tensor_mor": sorted([cat.mor_name(f), cat.mor_name(g), cat.mor_name(h)]
                             for (f, g), h in mon.tensor_mor.items()),
        "unit": cat.obj_name(mon.unit),
    }
    if mon.braiding is not None:
        mb["braiding"] = {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.mor_name(v)
                          for (a, b), v in sorted(mon.braiding.items())}
    if mon.cartesian is not None:
        w = mon.cartesian
        mb["cartesian"] = {
            "proj1": {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.mor_name(v)
                      for (a, b), v in sorted(w.proj1.items())},
            "proj2": {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.mor_name(v)
                      for (a, b), v in sorted(w.proj2.items())},
            "pairing": sorted([cat.mor_name(f), cat.mor_name(g), cat.mor_name(h)]
                              for (f, g), h in w.pairing.items()),
            "terminal": {cat.obj_name(o): cat.mor_name(v)
                         for o, v in sorted(w.terminal.items())},
        }
    if mon.cocartesian is not None:
        w = mon.cocartesian
        mb["cocartesian"] = {
            "inj1": {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.mor_name(v)
                     for (a, b), v in sorted(w.inj1.items())},
            "inj2": {f"{cat.obj_name(a)},{cat.obj_name(b)}": cat.mor_name(v)
                     for (a, b), v in sorted(w.inj2.items())},
            "copairing": sorted([cat.mor_name(f), cat.mor_name(g), cat.mor_name(h)]
                                for (f, g), h in w.copairing.items()),
            "initial": {cat.obj_name(o): cat.mor_name(v)
                        for o, v in sorted(w.initial.items())},
        }
    data["monoidal"] = mb
    return data
