"""Set-valued profunctors between finite categories, with coends computed
as union-find coequalizers.

Element values are nested tuples over leaves (interned morphism ids, or
short strings for singleton fibers).  A global key function flattens tuple
trees left-to-right, which makes canonical class representatives
independent of enumeration order.
"""

from __future__ import annotations

from .fincat import FinCategory, opposite, product, terminal_category

VALIDATE_ON_BUILD = False


class ProfunctorError(Exception):
    pass


def value_key(v):
    """Deterministic total order on element values, flattening tuples."""
    if isinstance(v, tuple):
        return tuple(k for x in v for k in value_key(x))
    if isinstance(v, int):
        return ((0, v),)
    return ((1, str(v)),)


def _tag_key(tagged):
    x, v = tagged
    return (x,) + value_key(v)


class ConcreteProf:
    """A profunctor source^op x target -> Set with explicit finite fibers.

    fiber_fn(a, b) returns the element values at (a, b); act_fn(f, g, v)
    is the two-sided action for f: a'->a in source and g: b->b' in target.
    """

    def __init__(self, source: FinCategory, target: FinCategory, fiber_fn,
                 act_fn, name="P", render=None):
        self.source = source
        self.target = target
        self._fiber_fn = fiber_fn
        self._act_fn = act_fn
        self.name = name
        self._render = render
        self._fibers = {}
        if VALIDATE_ON_BUILD:
            rep = validate_prof(self)
            if rep:
                raise ProfunctorError(f"{name}: {rep[0]}")

    def fiber(self, a, b):
        key = (a, b)
        if key not in self._fibers:
            self._fibers[key] = tuple(self._fiber_fn(a, b))
        return self._fibers[key]

    def act(self, f, g, v):
        return self._act_fn(f, g, v)

    def render(self, v):
        if self._render is not None:
            return self._render(v)
        return render_generic(v)

    def fiber_sizes(self):
        return {(a, b): len(self.fiber(a, b))
                for a in self.source.objects for b in self.target.objects}

    def __repr__(self):
        return f"ConcreteProf({self.name})"


def render_generic(v):
    if isinstance(v, tuple):
        return "(" + ",".join(render_generic(x) for x in v) + ")"
    return str(v)


def validate_prof(p: ConcreteProf, max_checks=None):
    """Exhaustive identity and functoriality check; returns a list of
    violation strings (empty iff the actions are lawful)."""
    out = []
    src, tgt = p.source, p.target
    for a in src.objects:
        for b in tgt.objects:
            fib = p.fiber(a, b)
            ida, idb = src.identity(a), tgt.identity(b)
            for v in fib:
                if p.act(ida, idb, v) != v:
                    out.append(f"identity action fails at ({a},{b}) on {p.render(v)}")
            for f in src.morphisms:
                if src.cod(f) != a:
                    continue
                for g in tgt.morphisms:
                    if tgt.dom(g) != b:
                        continue
                    for v in fib:
                        w = p.act(f, g, v)
                        if w not in p.fiber(src.dom(f), tgt.cod(g)):
                            out.append(f"action leaves the fiber at ({a},{b})")
                            continue
                        # composite actions agree with acting twice
                        for f2 in src.morphisms:
                            if src.cod(f2) != src.dom(f):
                                continue
                            if p.act(src.compose(f2, f), g, v) != p.act(f2, tgt.identity(tgt.cod(g)), w):
                                out.append(
                                    f"left functoriality fails at ({a},{b}) on {p.render(v)}")
                        for g2 in tgt.morphisms:
                            if tgt.dom(g2) != tgt.cod(g):
                                continue
                            if p.act(f, tgt.compose(g, g2), v) != p.act(src.identity(src.dom(f)), g2, w):
                                out.append(
                                    f"right functoriality fails at ({a},{b}) on {p.render(v)}")
    return out


# ---------------------------------------------------------------------------
# coends


class CoendSet:
    """The coequalizer of the two morphism actions on the diagonal of a
    profunctor with equal endpoints (a coend over the base category).

    Tagged elements are pairs (object, value); classes are represented by
    the least tagged element under the global order.
    """

    def __init__(self, p: ConcreteProf):
        if p.source is not p.target:
            raise ProfunctorError("coend needs equal source and target")
        self.prof = p
        self.cat = p.source
        cat = self.cat
        self.index = [(x, v) for x in cat.objects for v in p.fiber(x, x)]
        parent = {t: t for t in self.index}

        def find(t):
            root = t
            while parent[root] != root:
                root = parent[root]
            while parent[t] != root:
                parent[t], t = root, parent[t]
            return root

        for f in cat.morphisms:
            x, y = cat.dom(f), cat.cod(f)
            idx, idy = cat.identity(x), cat.identity(y)
            for q in p.fiber(y, x):
                left = (x, p.act(f, idx, q))
                right = (y, p.act(idy, f, q))
                ra, rb = find(left), find(right)
                if ra != rb:
                    parent[ra] = rb
        classes = {}
        for t in self.index:
            classes.setdefault(find(t), []).append(t)
        self._rep_of = {}
        self._members = {}
        for group in classes.values():
            rep = min(group, key=_tag_key)
            self._members[rep] = sorted(group, key=_tag_key)
            for t in group:
                self._rep_of[t] = rep
        self.reps = sorted(self._members, key=_tag_key)

    @property
    def class_count(self):
        return len(self.reps)

    def rep(self, x, v):
        try:
            return self._rep_of[(x, v)]
        except KeyError:
            raise ProfunctorError(
                f"({x},{self.prof.render(v)}) is not an element of the coend index")

    def members(self, rep):
        return self._members[rep]

    def same_class(self, t1, t2):
        return self._rep_of[t1] is self._rep_of[t2] or self._rep_of[t1] == self._rep_of[t2]


def coend(p: ConcreteProf) -> CoendSet:
    return CoendSet(p)


# ---------------------------------------------------------------------------
# basic constructors


def _factors(c: FinCategory):
    return c.factors if c.factors is not None else (c,)


def _split_obj(total: FinCategory, left: FinCategory, right: FinCategory, o):
    parts = total.obj_tuple(o)
    k = len(_factors(left))
    return left.pack_obj(parts[:k]), right.pack_obj(parts[k:])


def _split_mor(total: FinCategory, left: FinCategory, right: FinCategory, m):
    parts = total.mor_tuple(m)
    k = len(_factors(left))
    return left.pack_mor(parts[:k]), right.pack_mor(parts[k:])


def _join_obj(total: FinCategory, left: FinCategory, right: FinCategory, a, b):
    return total.pack_obj(left.obj_tuple(a) + right.obj_tuple(b))


def join_objs(total: FinCategory, pairs):
    """Pack per-wire objects into a flattened product object; each entry is
    (wire category, object id)."""
    return total.pack_obj(tuple(x for cat, o in pairs for x in cat.obj_tuple(o)))


def join_mors(total: FinCategory, pairs):
    return total.pack_mor(tuple(x for cat, m in pairs for x in cat.mor_tuple(m)))


def split_obj2(total, left, right, o):
    return _split_obj(total, left, right, o)


def split_mor2(total, left, right, m):
    return _split_mor(total, left, right, m)



def hom_prof(c: FinCategory) -> ConcreteProf:
    return ConcreteProf(
        c, c,
        lambda a, b: c.hom(a, b),
        lambda f, g, v: c.compose(f, c.compose(v, g)),
        name=f"hom({c.name})",
        render=c.mor_name)


def representable_in(c: FinCategory, a) -> ConcreteProf:
    """C(a, -), a profunctor from the terminal category to c."""
    if a not in c.objects:
        raise ProfunctorError(f"unknown object id {a} in {c.name}")
    t = terminal_category()
    return ConcreteProf(
        t, c,
        lambda _, b: c.hom(a, b),
        lambda _, g, v: c.compose(v, g),
        name=f"{c.name}({c.obj_name(a)},-)",
        render=c.mor_name)


def representable_out(c: FinCategory, a) -> ConcreteProf:
    """C(-, a), a profunctor from c to the terminal category."""
    if a not in c.objects:
        raise ProfunctorError(f"unknown object id {a} in {c.name}")
    t = terminal_category()
    return ConcreteProf(
        c, t,
        lambda b, _: c.hom(b, a),
        lambda f, _, v: c.compose(f, v),
        name=f"{c.name}(-,{c.obj_name(a)})",
        render=c.mor_name)


def junction(m) -> ConcreteProf:
    """C((-)(x)(-), -) from the product category to the base."""
    c = m.base
    cc = product(c, c)

    def fib(s, y):
        a, b = _split_obj(cc, c, c, s)
        return c.hom(m.tensor(a, b), y)

    def act(fp, g, v):
        f1, f2 = _split_mor(cc, c, c, fp)
        return c.compose(m.tensor_m(f1, f2), c.compose(v, g))

    return ConcreteProf(cc, c, fib, act, name=f"junction({c.name})",
                        render=c.mor_name)


def fork(m) -> ConcreteProf:
    """C(-, (-)(x)(-)) from the base to the product category."""
    c = m.base
    cc = product(c, c)

    def fib(x, t):
        a, b = _split_obj(cc, c, c, t)
        return c.hom(x, m.tensor(a, b))

    def act(f, gp, v):
        g1, g2 = _split_mor(cc, c, c, gp)
        return c.compose(f, c.compose(v, m.tensor_m(g1, g2)))

    return ConcreteProf(c, cc, fib, act, name=f"fork({c.name})",
                        render=c.mor_name)


def unit_in(m) -> ConcreteProf:
    return representable_in(m.base, m.unit)


def unit_out(m) -> ConcreteProf:
    return representable_out(m.base, m.unit)


def copy_prof(c: FinCategory) -> ConcreteProf:
    """The canonical pseudocomonoid C(-,-^1) x C(-,-^2): copies on the right."""
    cc = product(c, c)

    def fib(x, t):
        a, b = _split_obj(cc, c, c, t)
        return tuple((p, q) for p in c.hom(x, a) for q in c.hom(x, b))

    def act(f, gp, v):
        g1, g2 = _split_mor(cc, c, c, gp)
        p, q = v
        return (c.compose(f, c.compose(p, g1)), c.compose(f, c.compose(q, g2)))

    return ConcreteProf(c, cc, fib, act, name=f"copy({c.name})")


def merge_prof(c: FinCategory) -> ConcreteProf:
    """The canonical pseudomonoid C(-^1,-) x C(-^2,-): merges on the left."""
    cc = product(c, c)

    def fib(s, y):
        a, b = _split_obj(cc, c, c, s)
        return tuple((p, q) for p in c.hom(a, y) for q in c.hom(b, y))

    def act(fp, g, v):
        f1, f2 = _split_mor(cc, c, c, fp)
        p, q = v
        return (c.compose(f1, c.compose(p, g)), c.compose(f2, c.compose(q, g)))

    return ConcreteProf(cc, c, fib, act, name=f"merge({c.name})")


def discard_prof(c: FinCategory) -> ConcreteProf:
    t = terminal_category()
    return ConcreteProf(c, t, lambda a, _: ("*",), lambda f, _, v: "*",
                        name=f"discard({c.name})")


def codiscard_prof(c: FinCategory) -> ConcreteProf:
    t = terminal_category()
    return ConcreteProf(t, c, lambda _, b: ("*",), lambda _, g, v: "*",
                        name=f"codiscard({c.name})")


def swap_prof(c1: FinCategory, c2: FinCategory) -> ConcreteProf:
    """The braiding 1-cell of the profunctor bicategory on c1 x c2."""
    src = product(c1, c2)
    tgt = product(c2, c1)

    def fib(s, t):
        a, b = _split_obj(src, c1, c2, s)
        b2, a2 = _split_obj(tgt, c2, c1, t)
        return tuple((u, v) for u in c1.hom(a, a2) for v in c2.hom(b, b2))

    def act(fp, gp, val):
        f1, f2 = _split_mor(src, c1, c2, fp)
        g2, g1 = _split_mor(tgt, c2, c1, gp)
        u, v = val
        return (c1.compose(f1, c1.compose(u, g1)), c2.compose(f2, c2.compose(v, g2)))

    return ConcreteProf(src, tgt, fib, act, name=f"swap({c1.name},{c2.name})")


def cup_prof(c: FinCategory) -> ConcreteProf:
    """Counit of the compact closure: consumes a wire and its dual."""
    src = product(c, opposite(c))
    t = terminal_category()

    def fib(s, _):
        x, y = _split_obj(src, c, opposite(c), s)
        return c.hom(x, y)

    def act(fp, _, v):
        f, gop = _split_mor(src, c, opposite(c), fp)
        # gop: y' -> y in op(c), i.e. g: y -> y' in c
        return c.compose(f, c.compose(v, gop))

    return ConcreteProf(src, t, fib, act, name=f"cup({c.name})", render=c.mor_name)


def cap_prof(c: FinCategory) -> ConcreteProf:
    """Unit of the compact closure: emits a dual wire and a wire."""
    tgt = product(opposite(c), c)
    t = terminal_category()

    def fib(_, s):
        y, x = _split_obj(tgt, opposite(c), c, s)
        return c.hom(y, x)

    def act(_, gp, v):
        uop, g = _split_mor(tgt, opposite(c), c, gp)
        # uop: y -> y'' in op(c), i.e. u: y'' -> y in c
        return c.compose(uop, c.compose(v, g))

    return ConcreteProf(t, tgt, fib, act, name=f"cap({c.name})", render=c.mor_name)


def box_prof(fn) -> ConcreteProf:
    """D(F-, -): the companion of a functor F: C -> D."""
    c, d = fn.source, fn.target
    return ConcreteProf(
        c, d,
        lambda x, y: d.hom(fn.obj(x), y),
        lambda f, g, v: d.compose(fn.mor(f), d.compose(v, g)),
        name=f"box({fn.name})", render=d.mor_name)


def cobox_prof(fn) -> ConcreteProf:
    """D(-, F-): the conjoint of a functor F: C -> D."""
    c, d = fn.source, fn.target
    return ConcreteProf(
        d, c,
        lambda y, x: d.hom(y, fn.obj(x)),
        lambda g, f, v: d.compose(g, d.compose(v, fn.mor(f))),
        name=f"cobox({fn.name})", render=d.mor_name)


def constant_prof(c: FinCategory, values=("p0", "p1")) -> ConcreteProf:
    """A constant (hence non-representable for |values| != |hom|) profunctor
    from the terminal category; actions are trivial."""
    t = terminal_category()
    return ConcreteProf(t, c, lambda _, b: tuple(values), lambda _, g, v: v,
                        name=f"const({c.name})")


def empty_prof(c: FinCategory, d: FinCategory) -> ConcreteProf:
    return ConcreteProf(c, d, lambda a, b: (), lambda f, g, v: v, name="empty")


# ---------------------------------------------------------------------------
# tensor and composition


def tensor_prof(p1: ConcreteProf, p2: ConcreteProf) -> ConcreteProf:
    """Parallel composition: fibers are cartesian products, actions are
    componentwise.  Sources and targets are the flattened products."""
    src = product(p1.source, p2.source)
    tgt = product(p1.target, p2.target)

    def fib(a, b):
        a1, a2 = _split_obj(src, p1.source, p2.source, a)
        b1, b2 = _split_obj(tgt, p1.target, p2.target, b)
        return tuple((v1, v2) for v1 in p1.fiber(a1, b1) for v2 in p2.fiber(a2, b2))

    def act(f, g, v):
        f1, f2 = _split_mor(src, p1.source, p2.source, f)
        g1, g2 = _split_mor(tgt, p1.target, p2.target, g)
        return (p1.act(f1, g1, v[0]), p2.act(f2, g2, v[1]))

    def render(v):
        return f"({p1.render(v[0])},{p2.render(v[1])})"

    return ConcreteProf(src, tgt, fib, act,
                        name=f"({p1.name}(x){p2.name})", render=render)


class ComposedProf(ConcreteProf):
    """Sequential composition (P ; Q)(a, c) = coend over the middle category
    of P(a, -) x Q(-, c).

    Elements are canonical representatives (m, u, w): the middle object tag
    and the pair of component values.  Actions act on representatives and
    re-canonicalize.
    """

    def __init__(self, p: ConcreteProf, q: ConcreteProf):
        if p.target is not q.source:
            raise ProfunctorError(
                f"cannot compose {p.name} with {q.name}: middle categories differ")
        self.p, self.q = p, q
        self.mid = p.target
        self._coends = {}
        super().__init__(p.source, q.target, self._fib, self._act,
                         name=f"({p.name};{q.name})", render=self._render_elem)

    def coend_at(self, a, c) -> CoendSet:
        key = (a, c)
        if key not in self._coends:
            p, q, mid = self.p, self.q, self.mid
            pair = ConcreteProf(
                mid, mid,
                lambda b1, b2: tuple((u, w) for u in p.fiber(a, b2)
                                     for w in q.fiber(b1, c)),
                lambda f, g, v: (p.act(p.source.identity(a), g, v[0]),
                                 q.act(f, q.target.identity(c), v[1])),
                name=f"pair({self.name})")
            self._coends[key] = CoendSet(pair)
        return self._coends[key]

    def _fib(self, a, c):
        ce = self.coend_at(a, c)
        return tuple((x, v[0], v[1]) for (x, v) in ce.reps)

    def classify(self, a, c, m, u, w):
        """Canonical representative of the class of the raw tagged element."""
        x, v = self.coend_at(a, c).rep(m, (u, w))
        return (x, v[0], v[1])

    def _act(self, f, g, val):
        m, u, w = val
        a2 = self.source.dom(f)
        c2 = self.target.cod(g)
        u2 = self.p.act(f, self.mid.identity(m), u)
        w2 = self.q.act(self.mid.identity(m), g, w)
        return self.classify(a2, c2, m, u2, w2)

    def _render_elem(self, val):
        m, u, w = val
        return (f"[{self.mid.obj_name(m)}: {self.p.render(u)}, {self.q.render(w)}]")

    def members(self, a, c):
        """All raw (m, u, w) index elements at the fiber, grouped by class."""
        ce = self.coend_at(a, c)
        return {(r[0], r[1][0], r[1][1]):
                [(x, v[0], v[1]) for (x, v) in ce.members(r)]
                for r in ce.reps}


def compose_prof(p: ConcreteProf, q: ConcreteProf) -> ComposedProf:
    return ComposedProf(p, q)


# ---------------------------------------------------------------------------
# natural families


class NatFamily:
    """A family of per-fiber maps between two parallel profunctors."""

    def __init__(self, components):
        # components: (a, b) -> dict value -> value, or a callable (a, b, v) -> v
        self.components = components

    def at(self, a, b, v):
        if callable(self.components):
            return self.components(a, b, v)
        comp = self.components.get((a, b))
        if comp is None:
            raise ProfunctorError(f"missing component at ({a},{b})")
        return comp[v]


def check_natural(p: ConcreteProf, q: ConcreteProf, fam: NatFamily) -> bool:
    """Exhaustively check every naturality square."""
    if p.source is not q.source or p.target is not q.target:
        raise ProfunctorError("naturality needs parallel profunctors")
    src, tgt = p.source, p.target
    for a in src.objects:
        for b in tgt.objects:
            for v in p.fiber(a, b):
                fv = fam.at(a, b, v)
                if fv not in q.fiber(a, b):
                    raise ProfunctorError(
                        f"component at ({a},{b}) leaves the target fiber")
                for f in src.morphisms:
                    if src.cod(f) != a:
                        continue
                    for g in tgt.morphisms:
                        if tgt.dom(g) != b:
                            continue
                        lhs = fam.at(src.dom(f), tgt.cod(g), p.act(f, g, v))
                        rhs = q.act(f, g, fv)
                        if lhs != rhs:
                            return False
    return True
