"""The typed term language for shapes: string diagrams over profunctor
oracles.

Surface syntax is s-expressions.  Sequential composition is evaluated by
composing profunctors, parallel composition by tensoring; a closed shape
evaluates to the coend-quotient set with canonical representatives.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import profunctor as pf
from .fincat import FinCategory, FinFunctor, MonoidalStructure, opposite, product
from .profunctor import ConcreteProf, compose_prof, tensor_prof


class ShapeSyntaxError(Exception):
    pass


class ShapeTypeError(Exception):
    def __init__(self, msg, path=()):
        super().__init__(f"at {'.'.join(map(str, path)) or 'root'}: {msg}")
        self.path = path


class StructureMissing(Exception):
    pass


class EvalError(Exception):
    pass


# ---------------------------------------------------------------------------
# wires and terms


@dataclass(frozen=True)
class Wire:
    cat: str
    op: bool = False

    def flip(self):
        return Wire(self.cat, not self.op)

    def __str__(self):
        return f"(op {self.cat})" if self.op else self.cat


@dataclass(frozen=True)
class Id:
    wires: tuple
    label: str = None


@dataclass(frozen=True)
class Gen:
    kind: str
    args: tuple
    label: str = None


@dataclass(frozen=True)
class Seq:
    parts: tuple


@dataclass(frozen=True)
class Par:
    top: object
    bottom: object


def is_plain_id(t):
    return isinstance(t, Id) and t.label is None


def norm(t):
    """Silent normalization: flatten nested Seq, drop unlabelled identity
    parts, merge parallel unlabelled identities, drop empty-boundary units.
    Par re-association and interchange are explicit rewrite rules, never
    applied here.
    """
    if isinstance(t, Seq):
        flat = []
        for p in t.parts:
            p = norm(p)
            if isinstance(p, Seq):
                flat.extend(p.parts)
            else:
                flat.append(p)
        kept = [p for p in flat if not is_plain_id(p)]
        if not kept:
            if not flat:
                raise ShapeSyntaxError("empty seq")
            kept = [flat[0]]
        if len(kept) == 1:
            return kept[0]
        return Seq(tuple(kept))
    if isinstance(t, Par):
        top, bottom = norm(t.top), norm(t.bottom)
        if is_plain_id(top) and is_plain_id(bottom):
            return Id(top.wires + bottom.wires)
        if is_plain_id(top) and not top.wires:
            return bottom
        if is_plain_id(bottom) and not bottom.wires:
            return top
        return Par(top, bottom)
    return t


def objects_in(term):
    """Object symbols referenced by a term's generators."""
    out = set()

    def expr(e):
        if isinstance(e, tuple):
            if e[0] == "tensor":
                expr(e[1])
                expr(e[2])
            return
        out.add(e)

    for _, leaf in leaves(term):
        if isinstance(leaf, Gen) and leaf.kind in ("inport", "outport"):
            expr(leaf.args[0])
    return out


def subterm(t, path):
    for i, step in enumerate(path):
        if isinstance(t, Seq):
            if not 0 <= step < len(t.parts):
                raise ShapeTypeError(f"path step {step} out of range", path[:i + 1])
            t = t.parts[step]
        elif isinstance(t, Par):
            if step not in (0, 1):
                raise ShapeTypeError(f"path step {step} not a par side", path[:i + 1])
            t = t.top if step == 0 else t.bottom
        else:
            raise ShapeTypeError("path descends into a leaf", path[:i + 1])
    return t


def leaves(t, path=()):
    """Generator leaves (ports, junctions, hom wires, ...) in reading order."""
    if isinstance(t, Seq):
        for i, p in enumerate(t.parts):
            yield from leaves(p, path + (i,))
    elif isinstance(t, Par):
        yield from leaves(t.top, path + (0,))
        yield from leaves(t.bottom, path + (1,))
    else:
        yield path, t


# ---------------------------------------------------------------------------
# s-expression reader


def tokenize(text):
    tokens = []
    i, n, line = 0, len(text), 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch in " \t\r":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append((ch, line))
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ShapeSyntaxError(f"line {line}: unterminated string")
            tokens.append((("str", text[i + 1:j]), line))
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            tokens.append((text[i:j], line))
            i = j
    return tokens


def read_sexprs(text):
    tokens = tokenize(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ShapeSyntaxError("unexpected end of input")
        tok, line = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise ShapeSyntaxError(f"line {line}: unclosed '('")
                if tokens[pos][0] == ")":
                    pos += 1
                    return items
                items.append(read())
        if tok == ")":
            raise ShapeSyntaxError(f"line {line}: unexpected ')'")
        if isinstance(tok, tuple):
            return tok  # ("str", value)
        return tok

    out = []
    while pos < len(tokens):
        out.append(read())
    return out


def _name_of(x):
    if isinstance(x, tuple) and x[0] == "str":
        return x[1]
    if isinstance(x, str):
        return x
    raise ShapeSyntaxError(f"expected a name, got {x!r}")


# ---------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    categories: tuple = ()
    objects: dict = None    # sym -> (cat sym, pinned object name or None)
    functors: dict = None   # sym -> (src, dst, {obj name: obj name}, {mor: mor})
    profs: dict = None      # name -> (left wires, right wires)
    shapes: dict = None     # name -> term

    def __post_init__(self):
        self.objects = self.objects or {}
        self.functors = self.functors or {}
        self.profs = self.profs or {}
        self.shapes = self.shapes or {}

    def obj_cat(self, sym):
        if sym not in self.objects:
            raise ShapeSyntaxError(f"unknown object symbol {sym!r}")
        return self.objects[sym][0]


def _parse_wire(x, sig):
    if isinstance(x, list):
        if len(x) == 2 and x[0] == "op":
            return Wire(_check_cat(x[1], sig), True)
        raise ShapeSyntaxError(f"bad wire {x!r}")
    return Wire(_check_cat(x, sig), False)


def _check_cat(x, sig):
    x = _name_of(x)
    if x not in sig.categories:
        raise ShapeSyntaxError(f"unknown category symbol {x!r}")
    return x


def _parse_obj_expr(x, sig):
    if isinstance(x, list):
        if len(x) == 3 and x[0] == "tensor":
            e1 = _parse_obj_expr(x[1], sig)
            e2 = _parse_obj_expr(x[2], sig)
            if obj_expr_cat(e1, sig) != obj_expr_cat(e2, sig):
                raise ShapeSyntaxError(f"tensor of objects from different categories")
            return ("tensor", e1, e2)
        if len(x) == 2 and x[0] == "unit":
            return ("unit", _check_cat(x[1], sig))
        raise ShapeSyntaxError(f"bad object expression {x!r}")
    x = _name_of(x)
    sig.obj_cat(x)
    return x


def obj_expr_cat(e, sig):
    if isinstance(e, tuple):
        if e[0] == "tensor":
            return obj_expr_cat(e[1], sig)
        if e[0] == "unit":
            return e[1]
    return sig.obj_cat(e)


def _parse_functor_expr(x, sig):
    if isinstance(x, list):
        if len(x) == 3 and x[0] == "fcomp":
            return ("fcomp", _parse_functor_expr(x[1], sig),
                    _parse_functor_expr(x[2], sig))
        raise ShapeSyntaxError(f"bad functor expression {x!r}")
    x = _name_of(x)
    if x not in sig.functors:
        raise ShapeSyntaxError(f"unknown functor symbol {x!r}")
    return x


def functor_expr_sig(e, sig):
    """(source cat sym, target cat sym) of a functor expression."""
    if isinstance(e, tuple) and e[0] == "fcomp":
        s1, t1 = functor_expr_sig(e[1], sig)
        s2, t2 = functor_expr_sig(e[2], sig)
        if t1 != s2:
            raise ShapeSyntaxError("functor composition mismatch")
        return (s1, t2)
    return sig.functors[e][0], sig.functors[e][1]


_NULLARY = {"junction", "fork", "copy", "merge", "discard", "codiscard",
            "unit-in", "unit-out", "cup", "cap"}


def parse_term(x, sig):
    if not isinstance(x, list) or not x:
        raise ShapeSyntaxError(f"expected a term, got {x!r}")
    head = x[0]
    args = x[1:]
    label = None
    if args and isinstance(args[-1], str) and args[-1].startswith("@"):
        label = args[-1][1:]
        args = args[:-1]
    if head == "seq":
        if not args:
            raise ShapeSyntaxError("(seq) needs at least one part")
        return norm(Seq(tuple(parse_term(a, sig) for a in args)))
    if head == "par":
        if len(args) < 2:
            raise ShapeSyntaxError("(par) needs at least two parts")
        t = parse_term(args[0], sig)
        for a in args[1:]:
            t = Par(t, parse_term(a, sig))
        return norm(t)
    if head == "id":
        return Id(tuple(_parse_wire(a, sig) for a in args), label)
    if head in ("inport", "outport"):
        if len(args) != 1:
            raise ShapeSyntaxError(f"({head}) takes one object")
        return Gen(head, (_parse_obj_expr(args[0], sig),), label)
    if head in _NULLARY:
        if len(args) != 1:
            raise ShapeSyntaxError(f"({head}) takes a category symbol")
        return Gen(head, (_check_cat(args[0], sig),), label)
    if head == "sym":
        if len(args) != 2:
            raise ShapeSyntaxError("(sym) takes two wires")
        return Gen("sym", (_parse_wire(args[0], sig), _parse_wire(args[1], sig)),
                   label)
    if head in ("box", "cobox"):
        if len(args) != 1:
            raise ShapeSyntaxError(f"({head}) takes a functor")
        return Gen(head, (_parse_functor_expr(args[0], sig),), label)
    if head == "named":
        if len(args) != 1:
            raise ShapeSyntaxError("(named) takes a profunctor name")
        name = _name_of(args[0])
        if name not in sig.profs:
            raise ShapeSyntaxError(f"unknown profunctor name {name!r}")
        return Gen("named", (name,), label)
    raise ShapeSyntaxError(f"unknown generator {head!r}")


def parse_shape_script(text) -> Signature:
    sig = Signature()
    cats = []
    for form in read_sexprs(text):
        if not isinstance(form, list) or not form:
            raise ShapeSyntaxError(f"bad toplevel form {form!r}")
        head = form[0]
        if head == "category":
            cats.append(_name_of(form[1]))
            sig.categories = tuple(cats)
        elif head == "object":
            if len(form) not in (3, 4):
                raise ShapeSyntaxError("(object A C [name]) expected")
            sym = _name_of(form[1])
            cat = _check_cat(form[2], sig)
            pin = _name_of(form[3]) if len(form) == 4 else None
            sig.objects[sym] = (cat, pin)
        elif head == "functor":
            if len(form) != 6:
                raise ShapeSyntaxError("(functor F C D (obj ...) (mor ...)) expected")
            name = _name_of(form[1])
            src, dst = _check_cat(form[2], sig), _check_cat(form[3], sig)
            obj_map, mor_map = {}, {}
            for tag, table in ((form[4], obj_map), (form[5], mor_map)):
                if not isinstance(tag, list) or tag[0] not in ("obj", "mor"):
                    raise ShapeSyntaxError("functor maps are (obj (a b)...) (mor (f g)...)")
                for pair in tag[1:]:
                    if not isinstance(pair, list) or len(pair) != 2:
                        raise ShapeSyntaxError(f"bad map entry {pair!r}")
                    table[_name_of(pair[0])] = _name_of(pair[1])
            sig.functors[name] = (src, dst, obj_map, mor_map)
        elif head == "prof":
            if len(form) != 4:
                raise ShapeSyntaxError("(prof K (wires) (wires)) expected")
            name = _name_of(form[1])
            left = tuple(_parse_wire(w, sig) for w in form[2])
            right = tuple(_parse_wire(w, sig) for w in form[3])
            sig.profs[name] = (left, right)
        elif head == "shape":
            name = _name_of(form[1])
            if len(form) != 3:
                raise ShapeSyntaxError("(shape name term) expected")
            sig.shapes[name] = parse_term(form[2], sig)
        else:
            raise ShapeSyntaxError(f"unknown declaration {head!r}")
    return sig


# ---------------------------------------------------------------------------
# printing (round-trips through the parser)


def print_obj_expr(e):
    if isinstance(e, tuple):
        if e[0] == "tensor":
            return f"(tensor {print_obj_expr(e[1])} {print_obj_expr(e[2])})"
        if e[0] == "unit":
            return f"(unit {e[1]})"
    return e


def print_functor_expr(e):
    if isinstance(e, tuple) and e[0] == "fcomp":
        return f"(fcomp {print_functor_expr(e[1])} {print_functor_expr(e[2])})"
    return e


def print_term(t):
    lbl = ""
    if isinstance(t, (Id, Gen)) and t.label:
        lbl = f" @{t.label}"
    if isinstance(t, Id):
        ws = " ".join(str(w) for w in t.wires)
        return f"(id{' ' + ws if ws else ''}{lbl})"
    if isinstance(t, Seq):
        return "(seq " + " ".join(print_term(p) for p in t.parts) + ")"
    if isinstance(t, Par):
        return f"(par {print_term(t.top)} {print_term(t.bottom)})"
    kind, args = t.kind, t.args
    if kind in ("inport", "outport"):
        body = print_obj_expr(args[0])
    elif kind in _NULLARY:
        body = args[0]
    elif kind == "sym":
        body = f"{args[0]} {args[1]}"
    elif kind in ("box", "cobox"):
        body = print_functor_expr(args[0])
    else:
        body = args[0]
    return f"({kind} {body}{lbl})"


# ---------------------------------------------------------------------------
# typechecking


def boundary(t, sig, path=()):
    """Return (left wires, right wires) or raise ShapeTypeError with the
    offending path."""
    if isinstance(t, Id):
        return (t.wires, t.wires)
    if isinstance(t, Seq):
        left, right = boundary(t.parts[0], sig, path + (0,))
        for i, p in enumerate(t.parts[1:], start=1):
            l2, r2 = boundary(p, sig, path + (i,))
            if right != l2:
                raise ShapeTypeError(
                    f"boundary mismatch: ...{_ws(right)} then {_ws(l2)}...",
                    path + (i,))
            right = r2
        return (left, right)
    if isinstance(t, Par):
        l1, r1 = boundary(t.top, sig, path + (0,))
        l2, r2 = boundary(t.bottom, sig, path + (1,))
        return (l1 + l2, r1 + r2)
    kind, args = t.kind, t.args
    if kind == "inport":
        return ((), (Wire(obj_expr_cat(args[0], sig)),))
    if kind == "outport":
        return ((Wire(obj_expr_cat(args[0], sig)),), ())
    if kind in ("junction", "merge"):
        w = Wire(args[0])
        return ((w, w), (w,))
    if kind in ("fork", "copy"):
        w = Wire(args[0])
        return ((w,), (w, w))
    if kind == "unit-in":
        return ((), (Wire(args[0]),))
    if kind == "unit-out":
        return ((Wire(args[0]),), ())
    if kind == "discard":
        return ((Wire(args[0]),), ())
    if kind == "codiscard":
        return ((), (Wire(args[0]),))
    if kind == "sym":
        return ((args[0], args[1]), (args[1], args[0]))
    if kind == "cup":
        w = Wire(args[0])
        return ((w, w.flip()), ())
    if kind == "cap":
        w = Wire(args[0])
        return ((), (w.flip(), w))
    if kind == "box":
        s, d = functor_expr_sig(args[0], sig)
        return ((Wire(s),), (Wire(d),))
    if kind == "cobox":
        s, d = functor_expr_sig(args[0], sig)
        return ((Wire(d),), (Wire(s),))
    if kind == "named":
        return sig.profs[args[0]]
    raise ShapeTypeError(f"unknown generator {kind!r}", path)


def _ws(wires):
    return "<" + ",".join(str(w) for w in wires) + ">"


# ---------------------------------------------------------------------------
# evaluation environment


class Env:
    """Oracle bindings for one evaluation: category symbols to validated
    monoidal fixtures, object symbols to object ids, plus functors and
    named profunctors."""

    def __init__(self, sig: Signature, bindings: dict, objs: dict = None,
                 profs: dict = None):
        self.sig = sig
        self.mons = {}
        self.cats = {}
        for sym in sig.categories:
            if sym not in bindings:
                raise EvalError(f"category symbol {sym!r} is unbound")
            b = bindings[sym]
            if isinstance(b, MonoidalStructure):
                self.mons[sym] = b
                self.cats[sym] = b.base
            else:
                self.mons[sym] = None
                self.cats[sym] = b
        self.objs = {}
        for sym, (catsym, pin) in sig.objects.items():
            if pin is not None:
                self.objs[sym] = self.cats[catsym].obj_id(pin)
        for sym, o in (objs or {}).items():
            if sym not in sig.objects:
                raise EvalError(f"unknown object symbol {sym!r}")
            self.objs[sym] = o
        self.functors = {}
        for name, (src, dst, omap, mmap) in sig.functors.items():
            cs, cd = self.cats[src], self.cats[dst]
            fn = FinFunctor(name, cs, cd,
                            {cs.obj_id(a): cd.obj_id(b) for a, b in omap.items()},
                            {cs.mor_id(f): cd.mor_id(g) for f, g in mmap.items()})
            self.functors[name] = fn
        self.profs = dict(profs or {})

    def free_objects(self, only=None):
        return [sym for sym in self.sig.objects
                if sym not in self.objs and (only is None or sym in only)]

    def assignments(self, only=None):
        """Deterministic sweep over all values of the free object symbols,
        optionally restricted to the symbols a script actually uses."""
        free = self.free_objects(only)
        if not free:
            yield self
            return
        import itertools
        ranges = [list(self.cats[self.sig.objects[sym][0]].objects) for sym in free]
        for combo in itertools.product(*ranges):
            env = Env(self.sig, {s: (self.mons[s] or self.cats[s])
                                 for s in self.sig.categories},
                      objs={**self.objs, **dict(zip(free, combo))},
                      profs=self.profs)
            yield env

    def monoidal(self, catsym) -> MonoidalStructure:
        m = self.mons.get(catsym)
        if m is None:
            raise StructureMissing(f"category {catsym!r} carries no monoidal structure")
        return m

    def wire_cat(self, w: Wire) -> FinCategory:
        c = self.cats[w.cat]
        return opposite(c) if w.op else c

    def boundary_cat(self, wires) -> FinCategory:
        return product(*[self.wire_cat(w) for w in wires])

    def resolve_obj(self, expr):
        if isinstance(expr, tuple):
            if expr[0] == "tensor":
                catsym = obj_expr_cat(expr[1], self.sig)
                m = self.monoidal(catsym)
                return m.tensor(self.resolve_obj(expr[1]), self.resolve_obj(expr[2]))
            if expr[0] == "unit":
                return self.monoidal(expr[1]).unit
        if expr not in self.objs:
            raise EvalError(f"object symbol {expr!r} is unassigned")
        return self.objs[expr]

    def resolve_functor(self, expr) -> FinFunctor:
        if isinstance(expr, tuple) and expr[0] == "fcomp":
            from .fincat import compose_functors
            return compose_functors(self.resolve_functor(expr[1]),
                                    self.resolve_functor(expr[2]))
        return self.functors[expr]

    def describe_objs(self):
        parts = []
        for sym in sorted(self.sig.objects):
            if sym in self.objs:
                cat = self.cats[self.sig.objects[sym][0]]
                parts.append(f"{sym}={cat.obj_name(self.objs[sym])}")
        return " ".join(parts)


# ---------------------------------------------------------------------------
# evaluation


class EvalNode:
    kind = "gen"

    def __init__(self, term, bnd, prof):
        self.term = term
        self.boundary = bnd
        self.prof = prof


class EvalPar(EvalNode):
    kind = "par"

    def __init__(self, term, bnd, prof, top, bottom):
        super().__init__(term, bnd, prof)
        self.top = top
        self.bottom = bottom

    def split_value(self, fiber, value):
        a, b = fiber
        src, tgt = self.prof.source, self.prof.target
        ts, bs = self.top.prof.source, self.bottom.prof.source
        tt, bt = self.top.prof.target, self.bottom.prof.target
        a1, a2 = pf._split_obj(src, ts, bs, a)
        b1, b2 = pf._split_obj(tgt, tt, bt, b)
        return ((a1, b1), value[0]), ((a2, b2), value[1])

    def join_obj_left(self, a1, a2):
        return pf._join_obj(self.prof.source, self.top.prof.source,
                            self.bottom.prof.source, a1, a2)

    def join_obj_right(self, b1, b2):
        return pf._join_obj(self.prof.target, self.top.prof.target,
                            self.bottom.prof.target, b1, b2)


class EvalSeq(EvalNode):
    kind = "seq"

    def __init__(self, term, bnd, prof, children, cums):
        super().__init__(term, bnd, prof)
        self.children = children
        self.cums = cums  # cums[k]: composite of children[0..k]; cums[0] is children[0].prof

    def unfold(self, fiber, value):
        """Peel the left fold: part values and the middle objects between them."""
        n = len(self.children)
        vals = [None] * n
        mids = [None] * (n - 1)
        v = value
        for k in range(n - 1, 0, -1):
            m, u, w = v
            vals[k] = w
            mids[k - 1] = m
            v = u
        vals[0] = v
        return vals, mids

    def refold(self, fiber, vals, mids):
        a, b = fiber
        v = vals[0]
        for k in range(1, len(vals)):
            right = mids[k] if k < len(vals) - 1 else b
            v = self.cums[k].classify(a, right, mids[k - 1], v, vals[k])
        return v

    def child_fibers(self, fiber, mids):
        a, b = fiber
        ends = [a] + list(mids) + [b]
        return list(zip(ends[:-1], ends[1:]))


class Evaluator:
    def __init__(self, env: Env):
        self.env = env
        self.sig = env.sig
        self._memo = {}

    def node(self, term) -> EvalNode:
        if term in self._memo:
            return self._memo[term]
        node = self._build(term)
        self._memo[term] = node
        return node

    def prof(self, term) -> ConcreteProf:
        return self.node(term).prof

    def _build(self, term):
        env = self.env
        bnd = boundary(term, self.sig)
        if isinstance(term, Seq):
            children = [self.node(p) for p in term.parts]
            cums = [children[0].prof]
            for ch in children[1:]:
                cums.append(compose_prof(cums[-1], ch.prof))
            return EvalSeq(term, bnd, cums[-1], children, cums)
        if isinstance(term, Par):
            top, bottom = self.node(term.top), self.node(term.bottom)
            return EvalPar(term, bnd, tensor_prof(top.prof, bottom.prof),
                           top, bottom)
        if isinstance(term, Id):
            return EvalNode(term, bnd, pf.hom_prof(env.boundary_cat(term.wires)))
        return EvalNode(term, bnd, self._gen_prof(term))

    def _gen_prof(self, t: Gen):
        env, kind, args = self.env, t.kind, t.args
        if kind == "inport":
            catsym = obj_expr_cat(args[0], self.sig)
            return pf.representable_in(env.cats[catsym], env.resolve_obj(args[0]))
        if kind == "outport":
            catsym = obj_expr_cat(args[0], self.sig)
            return pf.representable_out(env.cats[catsym], env.resolve_obj(args[0]))
        if kind == "junction":
            return pf.junction(env.monoidal(args[0]))
        if kind == "fork":
            return pf.fork(env.monoidal(args[0]))
        if kind == "unit-in":
            return pf.unit_in(env.monoidal(args[0]))
        if kind == "unit-out":
            return pf.unit_out(env.monoidal(args[0]))
        if kind == "copy":
            return pf.copy_prof(env.cats[args[0]])
        if kind == "merge":
            return pf.merge_prof(env.cats[args[0]])
        if kind == "discard":
            return pf.discard_prof(env.cats[args[0]])
        if kind == "codiscard":
            return pf.codiscard_prof(env.cats[args[0]])
        if kind == "sym":
            return pf.swap_prof(env.wire_cat(args[0]), env.wire_cat(args[1]))
        if kind == "cup":
            return pf.cup_prof(env.cats[args[0]])
        if kind == "cap":
            return pf.cap_prof(env.cats[args[0]])
        if kind == "box":
            return pf.box_prof(env.resolve_functor(args[0]))
        if kind == "cobox":
            return pf.cobox_prof(env.resolve_functor(args[0]))
        if kind == "named":
            if args[0] not in env.profs:
                raise EvalError(f"named profunctor {args[0]!r} is unbound")
            return env.profs[args[0]]
        raise EvalError(f"unknown generator {kind!r}")


def eval_closed(term, env: Env):
    """Canonical class representatives of a closed shape."""
    ev = Evaluator(env)
    node = ev.node(term)
    if node.boundary != ((), ()):
        raise EvalError("shape is not closed")
    return node.prof.fiber(0, 0)


def class_count(term, env: Env) -> int:
    return len(eval_closed(term, env))
