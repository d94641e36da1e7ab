"""The catalog of rewrite rules on shape terms and the derivation checker.

Each rule has a syntactic side (replacing a subterm, a slice of a
sequential composite, or inserting at a boundary point) and an executable
semantic action on evaluated elements.  The checker verifies every applied
step against the oracle: totality, well-definedness on coend classes,
bijectivity for invertible rules, and declared identity obligations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import FixtureError
from .profunctor import join_mors, join_objs, split_obj2
from .shapelang import (Env, Evaluator, Gen, Id, Par, Seq, ShapeTypeError,
                        StructureMissing, Wire, boundary, is_plain_id, norm,
                        obj_expr_cat, functor_expr_sig, print_term)


class RewriteError(Exception):
    pass


class MatchError(RewriteError):
    pass


class DirectionError(RewriteError):
    pass


class PathError(RewriteError):
    pass


@dataclass
class Step:
    rule: str
    path: tuple
    backward: bool = False
    inst: dict = field(default_factory=dict)

    def __str__(self):
        s = f"step {self.rule} at {'.'.join(map(str, self.path)) or 'root'}"
        if self.backward:
            s += " backward"
        if self.inst:
            body = ", ".join(f"{k} := {_inst_str(v)}" for k, v in sorted(self.inst.items()))
            s += " with {" + body + "}"
        return s


def _inst_str(v):
    if isinstance(v, tuple):
        return "(" + " ".join(_inst_str(x) for x in v) + ")"
    return str(v)


class Adapter:
    """Marker: a slice collapsed to an identity-wire morphism."""

    def __init__(self, mor):
        self.mor = mor


@dataclass
class SliceOutcome:
    consumed: int
    parts: tuple
    transform: object          # (vals, fibers, lobj, robj, tc) -> (vals, mids) | Adapter
    inverse_inst: dict = field(default_factory=dict)


@dataclass
class NodeOutcome:
    term: object
    transform: object          # (fiber, value, tc) -> value
    inverse_inst: dict = field(default_factory=dict)


class TCtx:
    """Shared context for semantic transforms."""

    def __init__(self, ev: Evaluator):
        self.ev = ev
        self.env = ev.env
        self.sig = ev.sig

    def node(self, term):
        return self.ev.node(term)

    def act(self, term, f, g, v):
        return self.node(term).prof.act(f, g, v)


# ---------------------------------------------------------------------------
# value assembly mirroring term normalization


def build_seq_value(tc: TCtx, items, fiber):
    """Value of norm(Seq(terms)) given per-item values and fiber ends.

    items: list of (term, value, left_obj, right_obj).  Mirrors the silent
    normalization: nested composites unfold, identity wires are absorbed
    into their neighbours by the profunctor actions.
    """
    flat = []
    for (t, v, l, r) in items:
        if isinstance(t, Seq):
            node = tc.node(t)
            vals, mids = node.unfold((l, r), v)
            ends = [l] + mids + [r]
            for k, p in enumerate(t.parts):
                flat.append((p, vals[k], ends[k], ends[k + 1]))
        else:
            flat.append((t, v, l, r))
    out = []
    pend = None  # (morphism, left end) of pending identity wires
    for (t, v, l, r) in flat:
        if is_plain_id(t):
            if pend is None:
                pend = [v, l]
            else:
                cat = tc.env.boundary_cat(t.wires)
                pend[0] = cat.compose(pend[0], v)
        else:
            if pend is not None:
                prof = tc.node(t).prof
                v = prof.act(pend[0], prof.target.identity(r), v)
                l = pend[1]
                pend = None
            out.append([t, v, l, r])
    if pend is not None:
        if not out:
            return pend[0]  # the whole composite is an identity wire
        t, v, l, r = out[-1]
        prof = tc.node(t).prof
        out[-1][1] = prof.act(prof.source.identity(l), pend[0], v)
        out[-1][3] = None  # right end moves to the fiber end
    if len(out) == 1:
        return out[0][1]
    terms = tuple(it[0] for it in out)
    vals = [it[1] for it in out]
    mids = [it[3] for it in out[:-1]]
    return tc.node(Seq(terms)).refold(fiber, vals, mids)


def par_value(tc: TCtx, top_term, v_top, bottom_term, v_bottom):
    """Value of norm(Par(top, bottom)) from the component values."""
    if is_plain_id(top_term) and is_plain_id(bottom_term):
        ct = tc.env.boundary_cat(top_term.wires)
        cb = tc.env.boundary_cat(bottom_term.wires)
        cc = tc.env.boundary_cat(top_term.wires + bottom_term.wires)
        return cc.pack_mor(ct.mor_tuple(v_top) + cb.mor_tuple(v_bottom))
    if is_plain_id(top_term) and not top_term.wires:
        return v_bottom
    if is_plain_id(bottom_term) and not bottom_term.wires:
        return v_top
    return (v_top, v_bottom)


# ---------------------------------------------------------------------------
# term surgery with transport


def _slice_wires(sig, seqterm, parts, i):
    if i < len(parts):
        return boundary(parts[i], sig)[0]
    if parts:
        return boundary(parts[-1], sig)[1]
    return boundary(seqterm, sig)[0]


def _seq_level(tc, term, i, outcome: SliceOutcome, sig):
    """Replace parts[i : i+consumed] of a sequential composite."""
    parts = term.parts if isinstance(term, Seq) else (term,)
    j = i + outcome.consumed
    if not (0 <= i and j <= len(parts)):
        raise PathError(f"slice {i}..{j} out of range")
    new_parts = parts[:i] + tuple(outcome.parts) + parts[j:]
    if not new_parts:
        new_term = Id(boundary(term, sig)[0])
    elif len(new_parts) == 1:
        new_term = new_parts[0]
    else:
        new_term = norm(Seq(new_parts))
    wires_at = _slice_wires(sig, term, parts, i)

    def transport(fiber, value):
        if isinstance(term, Seq):
            node = tc.node(term)
            vals, mids = node.unfold(fiber, value)
            ends = [fiber[0]] + mids + [fiber[1]]
        else:
            vals, ends = [value], [fiber[0], fiber[1]]
        slice_vals = vals[i:j]
        slice_fibers = list(zip(ends[i:j], ends[i + 1:j + 1]))
        res = outcome.transform(slice_vals, slice_fibers, ends[i], ends[j], tc)
        if isinstance(res, Adapter):
            rep_items = [(Id(wires_at), res.mor, ends[i], ends[j])]
        else:
            rep_vals, rep_mids = res
            rends = [ends[i]] + list(rep_mids) + [ends[j]]
            rep_items = [(outcome.parts[k], rep_vals[k], rends[k], rends[k + 1])
                         for k in range(len(outcome.parts))]
        items = [(parts[k], vals[k], ends[k], ends[k + 1]) for k in range(i)]
        items += rep_items
        items += [(parts[k], vals[k], ends[k], ends[k + 1])
                  for k in range(j, len(parts))]
        return build_seq_value(tc, items, fiber)

    return new_term, transport


def rewrite_at(tc: TCtx, term, path, rule, inst, backward):
    sig = tc.sig
    if rule.site == "node":
        if not path:
            out = rule.apply_node(tc, term, inst, backward)
            return out.term, out.transform, out.inverse_inst
    else:
        if len(path) == 1:
            i = path[0]
            out = rule.apply_slice(
                tc, term.parts if isinstance(term, Seq) else (term,), i,
                inst, backward, term)
            new_term, transport = _seq_level(tc, term, i, out, sig)
            return new_term, transport, out.inverse_inst
    if not path:
        raise PathError(f"rule {rule.name} needs a {rule.site} position")
    k, rest = path[0], path[1:]
    if isinstance(term, Seq):
        if not 0 <= k < len(term.parts):
            raise PathError(f"no part {k} in sequential composite")
        child = term.parts[k]
        new_child, child_tr, inv = rewrite_at(tc, child, rest, rule, inst, backward)

        # express the child replacement through the splice machinery
        def transform(vals, fibers, lobj, robj, tc2, child_tr=child_tr,
                      new_child=new_child):
            v = child_tr(fibers[0], vals[0])
            if is_plain_id(new_child):
                return Adapter(v)
            return ([v], [])
        out = SliceOutcome(1, () if is_plain_id(new_child) else (new_child,),
                           transform)
        new_term, transport = _seq_level(tc, term, k, out, sig)
        return new_term, transport, inv
    if isinstance(term, Par):
        if k not in (0, 1):
            raise PathError("par sides are 0 and 1")
        child = term.top if k == 0 else term.bottom
        other = term.bottom if k == 0 else term.top
        new_child, child_tr, inv = rewrite_at(tc, child, rest, rule, inst, backward)
        new_top, new_bottom = ((new_child, other) if k == 0 else (other, new_child))
        new_term = norm(Par(new_top, new_bottom))

        def transport(fiber, value, term=term, k=k):
            node = tc.node(term)
            (f_top, v_top), (f_bot, v_bot) = node.split_value(fiber, value)
            if k == 0:
                v_top = child_tr(f_top, v_top)
            else:
                v_bot = child_tr(f_bot, v_bot)
            return par_value(tc, new_top, v_top, new_bottom, v_bot)

        return new_term, transport, inv
    raise PathError(f"path descends into a leaf {print_term(term)}")


def apply_step(term, step: Step, sig, env, ev: Evaluator = None):
    """Apply one rewrite step; returns (new term, element transport).

    The transport maps an element of eval(term) at a fiber to the
    corresponding element of eval(new term); it is total on raw coend index
    elements, not just canonical representatives.
    """
    rule = RULES.get(step.rule)
    if rule is None:
        raise RewriteError(f"unknown rule {step.rule!r}")
    if step.backward and rule.tag == "directed":
        raise DirectionError(f"{rule.name} is directed; backward use rejected")
    tc = TCtx(ev or Evaluator(env))
    new_term, transport, inv = rewrite_at(tc, term, tuple(step.path), rule,
                                          step.inst, step.backward)
    b_old = boundary(term, sig)
    b_new = boundary(new_term, sig)
    if b_old != b_new:
        raise RewriteError(
            f"{rule.name} changed the boundary: {b_old} -> {b_new}")
    return new_term, transport, inv


def semantic_map(term, step: Step, sig, env, ev: Evaluator = None):
    """The induced element map between eval(term) and eval(apply_step(term))."""
    new_term, transport, _ = apply_step(term, step, sig, env, ev)
    return new_term, transport


# ---------------------------------------------------------------------------
# rule implementations


class Rule:
    name = "?"
    tag = "iso"
    site = "slice"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        raise MatchError(f"{self.name} is not a slice rule")

    def apply_node(self, tc, term, inst, backward):
        raise MatchError(f"{self.name} is not a node rule")


def _want(cond, msg):
    if not cond:
        raise MatchError(msg)


def _part(parts, i, msg="rule site"):
    if not 0 <= i < len(parts):
        raise MatchError(f"{msg}: no part at offset {i}")
    return parts[i]


def _resolve_obj(tc, expr):
    return tc.env.resolve_obj(expr)


def _mon_for_obj(tc, expr):
    return tc.env.monoidal(obj_expr_cat(expr, tc.sig))


def _gate_cartesian(tc, catsym):
    m = tc.env.monoidal(catsym)
    if m.cartesian is None:
        raise StructureMissing(f"oracle for {catsym!r} has no cartesian witness")
    return m


def _gate_cocartesian(tc, catsym):
    m = tc.env.monoidal(catsym)
    if m.cocartesian is None:
        raise StructureMissing(f"oracle for {catsym!r} has no cocartesian witness")
    return m


def _gate_braiding(tc, catsym):
    m = tc.env.monoidal(catsym)
    if m.braiding is None:
        raise StructureMissing(f"oracle for {catsym!r} has no braiding")
    return m


class YonedaL(Rule):
    """hom ; P  =>  P  (and back): the left unitor."""
    name = "R-YONEDA-L"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            t = _part(parts, i)
            lw = boundary(t, tc.sig)[0]
            label = inst.get("label")
            new_id = Id(lw, label)
            _want(label is not None, "backward R-YONEDA-L needs a label "
                  "(an unlabelled identity would normalize away)")

            def tf(vals, fibers, lobj, robj, tc2):
                cat = tc2.env.boundary_cat(lw)
                return ([cat.identity(lobj), vals[0]], [lobj])

            return SliceOutcome(1, (new_id, t), tf)
        idt = _part(parts, i)
        t = _part(parts, i + 1)
        _want(isinstance(idt, Id), "R-YONEDA-L expects an identity wire first")
        _want(boundary(t, tc.sig)[0] == idt.wires, "wire mismatch")

        def tf(vals, fibers, lobj, robj, tc2, t=t):
            f, v = vals
            prof = tc2.node(t).prof
            return ([prof.act(f, prof.target.identity(robj), v)], [])

        return SliceOutcome(2, (t,), tf, inverse_inst={"label": idt.label})


class YonedaR(Rule):
    """P ; hom  =>  P  (and back): the right unitor."""
    name = "R-YONEDA-R"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            t = _part(parts, i)
            rw = boundary(t, tc.sig)[1]
            label = inst.get("label")
            _want(label is not None, "backward R-YONEDA-R needs a label")
            new_id = Id(rw, label)

            def tf(vals, fibers, lobj, robj, tc2):
                cat = tc2.env.boundary_cat(rw)
                return ([vals[0], cat.identity(robj)], [robj])

            return SliceOutcome(1, (t, new_id), tf)
        t = _part(parts, i)
        idt = _part(parts, i + 1)
        _want(isinstance(idt, Id), "R-YONEDA-R expects an identity wire second")
        _want(boundary(t, tc.sig)[1] == idt.wires, "wire mismatch")

        def tf(vals, fibers, lobj, robj, tc2, t=t):
            v, g = vals
            prof = tc2.node(t).prof
            return ([prof.act(prof.source.identity(lobj), g, v)], [])

        return SliceOutcome(2, (t,), tf, inverse_inst={"label": idt.label})


class Assoc(Rule):
    """Par re-bracketing: ((a|b)|c) <=> (a|(b|c)); elements re-bracket."""
    name = "R-ASSOC"
    tag = "iso"
    site = "node"

    def apply_node(self, tc, term, inst, backward):
        _want(isinstance(term, Par), "R-ASSOC expects a parallel composite")
        if not backward:
            _want(isinstance(term.top, Par), "R-ASSOC forward expects ((a|b)|c)")
            a, b, c = term.top.top, term.top.bottom, term.bottom
            new_term = norm(Par(a, Par(b, c)))

            def tf(fiber, value, tc2=tc):
                node = tc2.node(term)
                (ft, vt), (fc, vc) = node.split_value(fiber, value)
                inner = tc2.node(term.top)
                (fa, va), (fb, vb) = inner.split_value(ft, vt)
                vbc = par_value(tc2, b, vb, c, vc)
                return par_value(tc2, a, va, norm(Par(b, c)), vbc)

            return NodeOutcome(new_term, tf)
        _want(isinstance(term.bottom, Par), "R-ASSOC backward expects (a|(b|c))")
        a, b, c = term.top, term.bottom.top, term.bottom.bottom
        new_term = norm(Par(Par(a, b), c))

        def tf(fiber, value, tc2=tc):
            node = tc2.node(term)
            (fa, va), (fbc, vbc) = node.split_value(fiber, value)
            inner = tc2.node(term.bottom)
            (fb, vb), (fc, vc) = inner.split_value(fbc, vbc)
            vab = par_value(tc2, a, va, b, vb)
            return par_value(tc2, norm(Par(a, b)), vab, c, vc)

        return NodeOutcome(new_term, tf)


def _cut_pieces(tc, term, cut):
    """Split a term (viewed as its part list) at a cut position."""
    parts = term.parts if isinstance(term, Seq) else (term,)
    if not 0 <= cut <= len(parts):
        raise MatchError(f"cut {cut} out of range")
    lw, rw = boundary(term, tc.sig)
    first = parts[:cut]
    second = parts[cut:]
    bnd_mid = boundary(first[-1], tc.sig)[1] if first else lw

    def piece(ps, wires):
        if not ps:
            return Id(wires)
        return norm(Seq(ps)) if len(ps) > 1 else ps[0]

    return piece(first, bnd_mid), piece(second, bnd_mid), parts


class Interchange(Rule):
    """Seq of Pars <=> Par of Seqs; elements re-bracket through the middle.

    Forward sites are two columns; a column is normally a parallel
    composite, but span instantiations let a column be a run of parts with
    an empty top leg (the form a unit leg takes after normalization).
    """
    name = "R-INTERCHANGE"
    tag = "iso"

    def _column(self, tc, parts, lo, hi):
        if hi - lo == 1 and isinstance(parts[lo], Par):
            p = parts[lo]
            return p.top, p.bottom, parts[lo:hi]
        run = parts[lo:hi]
        if not run:
            raise MatchError("empty interchange column")
        b = norm(Seq(run)) if len(run) > 1 else run[0]
        if boundary(b, tc.sig)[0] != () or boundary(b, tc.sig)[1] != ():
            raise MatchError("a spanned interchange column must be closed")
        return Id(()), b, run

    def apply_slice(self, tc, parts, i, inst, backward, container):
        sig = tc.sig
        if not backward:
            n1 = int(inst.get("span1", 1))
            n2 = int(inst.get("span2", 1))
            a, b, run1 = self._column(tc, parts, i, i + n1)
            c, d, run2 = self._column(tc, parts, i + n1, i + n1 + n2)
            ra, lc = boundary(a, sig)[1], boundary(c, sig)[0]
            rb, ld = boundary(b, sig)[1], boundary(d, sig)[0]
            _want(ra == lc and rb == ld,
                  "R-INTERCHANGE legs do not split the middle boundary")
            ac, bd = norm(Seq((a, c))), norm(Seq((b, d)))
            new_par = norm(Par(ac, bd))
            _want(not is_plain_id(new_par),
                  "R-INTERCHANGE would collapse to an identity wire")
            cut1 = len(a.parts) if isinstance(a, Seq) else (0 if is_plain_id(a) else 1)
            cut2 = len(b.parts) if isinstance(b, Seq) else (0 if is_plain_id(b) else 1)

            def column_values(tc2, run, vals, fibers):
                if len(run) == 1 and isinstance(run[0], Par):
                    node = tc2.node(run[0])
                    return node.split_value(fibers[0], vals[0])
                # empty top leg: the top value is the unit identity
                items = [(t, v, f[0], f[1]) for t, v, f in zip(run, vals, fibers)]
                vb = build_seq_value(tc2, items, (fibers[0][0], fibers[-1][1]))
                return ((0, 0), 0), ((fibers[0][0], fibers[-1][1]), vb)

            def tf(vals, fibers, lobj, robj, tc2):
                (fa, va), (fb, vb) = column_values(tc2, run1,
                                                   vals[:n1], fibers[:n1])
                (fc, vc), (fd, vd) = column_values(tc2, run2,
                                                   vals[n1:], fibers[n1:])
                v_ac = build_seq_value(tc2, [(a, va, fa[0], fa[1]),
                                             (c, vc, fc[0], fc[1])],
                                       (fa[0], fc[1]))
                v_bd = build_seq_value(tc2, [(b, vb, fb[0], fb[1]),
                                             (d, vd, fd[0], fd[1])],
                                       (fb[0], fd[1]))
                return ([par_value(tc2, ac, v_ac, bd, v_bd)], [])

            return SliceOutcome(n1 + n2, (new_par,), tf,
                                inverse_inst={"cut1": cut1, "cut2": cut2})
        # backward: split one Par node into Seq of two Pars at the given cuts
        p = _part(parts, i)
        _want(isinstance(p, Par), "backward R-INTERCHANGE expects a parallel composite")
        _want("cut1" in inst and "cut2" in inst,
              "backward R-INTERCHANGE needs cut1 and cut2")
        top, bottom = p.top, p.bottom
        a, c, tparts = _cut_pieces(tc, top, int(inst["cut1"]))
        b, d, bparts = _cut_pieces(tc, bottom, int(inst["cut2"]))
        q1, q2 = norm(Par(a, b)), norm(Par(c, d))
        if is_plain_id(q1) or is_plain_id(q2):
            raise MatchError("backward R-INTERCHANGE cut produces a bare "
                             "identity column")
        span1 = len(q1.parts) if isinstance(q1, Seq) else 1
        span2 = len(q2.parts) if isinstance(q2, Seq) else 1

        def tf(vals, fibers, lobj, robj, tc2):
            node = tc2.node(p)
            (ft, vt), (fb_, vb) = node.split_value(fibers[0], vals[0])
            va, ma, vc = _split_seq_value(tc2, top, int(inst["cut1"]), ft, vt)
            vb2, mb, vd = _split_seq_value(tc2, bottom, int(inst["cut2"]), fb_, vb)
            v1 = par_value(tc2, a, va, b, vb2)
            v2 = par_value(tc2, c, vc, d, vd)
            mid = _join_objs(tc2, a, b, ma, mb)
            return ([v1, v2], [mid])

        return SliceOutcome(1, (q1, q2), tf,
                            inverse_inst={"span1": span1, "span2": span2})


def _split_seq_value(tc, term, cut, fiber, value):
    """Split a composite value at a cut: (left piece value, cut object,
    right piece value); identity pieces carry identity morphisms."""
    parts = term.parts if isinstance(term, Seq) else (term,)
    if isinstance(term, Seq):
        node = tc.node(term)
        vals, mids = node.unfold(fiber, value)
        ends = [fiber[0]] + mids + [fiber[1]]
    else:
        vals, ends = [value], [fiber[0], fiber[1]]
    mid_obj = ends[cut]
    lw = boundary(term, tc.sig)[0]
    bnd_mid = boundary(parts[cut - 1], tc.sig)[1] if cut > 0 else lw

    def assemble(ps, vs, es):
        if not ps:
            cat = tc.env.boundary_cat(bnd_mid)
            return cat.identity(mid_obj)
        items = [(ps[k], vs[k], es[k], es[k + 1]) for k in range(len(ps))]
        return build_seq_value(tc, items, (es[0], es[-1]))

    left_v = assemble(parts[:cut], vals[:cut], ends[:cut + 1])
    right_v = assemble(parts[cut:], vals[cut:], ends[cut:])
    return left_v, mid_obj, right_v


def _join_objs(tc, term_a, term_b, oa, ob):
    ca = tc.env.boundary_cat(boundary(term_a, tc.sig)[1])
    cb = tc.env.boundary_cat(boundary(term_b, tc.sig)[1])
    cc = tc.env.boundary_cat(boundary(term_a, tc.sig)[1] + boundary(term_b, tc.sig)[1])
    return cc.pack_obj(ca.obj_tuple(oa) + cb.obj_tuple(ob))


class PortFuse(Rule):
    """Two parallel ports into a junction (or out of a fork) fuse to the
    port of the tensor object."""
    name = "R-PORT-FUSE"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            return self._backward(tc, parts, i, inst)
        p1 = _part(parts, i)
        p2 = _part(parts, i + 1)
        if (isinstance(p1, Par) and isinstance(p1.top, Gen)
                and p1.top.kind == "inport" and isinstance(p1.bottom, Gen)
                and p1.bottom.kind == "inport" and isinstance(p2, Gen)
                and p2.kind == "junction"):
            ea, eb = p1.top.args[0], p1.bottom.args[0]
            mon = tc.env.monoidal(p2.args[0])
            fused = Gen("inport", (("tensor", ea, eb),))

            def tf(vals, fibers, lobj, robj, tc2):
                (f, g), j = vals
                c = mon.base
                return ([c.compose(mon.tensor_m(f, g), j)], [])

            return SliceOutcome(2, (fused,), tf,
                                inverse_inst={"A": ea, "B": eb, "side": "in"})
        if (isinstance(p1, Gen) and p1.kind == "fork" and isinstance(p2, Par)
                and isinstance(p2.top, Gen) and p2.top.kind == "outport"
                and isinstance(p2.bottom, Gen) and p2.bottom.kind == "outport"):
            ea, eb = p2.top.args[0], p2.bottom.args[0]
            mon = tc.env.monoidal(p1.args[0])
            fused = Gen("outport", (("tensor", ea, eb),))

            def tf(vals, fibers, lobj, robj, tc2):
                h, (f, g) = vals
                c = mon.base
                return ([c.compose(h, mon.tensor_m(f, g))], [])

            return SliceOutcome(2, (fused,), tf,
                                inverse_inst={"A": ea, "B": eb, "side": "out"})
        raise MatchError("R-PORT-FUSE expects parallel ports beside a junction "
                         "or fork")

    def _backward(self, tc, parts, i, inst):
        t = _part(parts, i)
        _want("A" in inst and "B" in inst, "backward R-PORT-FUSE needs A and B")
        ea, eb = inst["A"], inst["B"]
        catsym = obj_expr_cat(ea, tc.sig)
        mon = tc.env.monoidal(catsym)
        a_id, b_id = _resolve_obj(tc, ea), _resolve_obj(tc, eb)
        _want(isinstance(t, Gen) and t.kind in ("inport", "outport"),
              "backward R-PORT-FUSE expects a port")
        _want(_resolve_obj(tc, t.args[0]) == mon.tensor(a_id, b_id),
              "port object is not the tensor of the instantiation")
        c = mon.base
        if t.kind == "inport":
            rep = (Par(Gen("inport", (ea,)), Gen("inport", (eb,))),
                   Gen("junction", (catsym,)))

            def tf(vals, fibers, lobj, robj, tc2):
                h = vals[0]
                mid = _pack_pair(tc2, catsym, a_id, b_id)
                return ([(c.identity(a_id), c.identity(b_id)), h], [mid])

            return SliceOutcome(1, rep, tf)
        rep = (Gen("fork", (catsym,)),
               Par(Gen("outport", (ea,)), Gen("outport", (eb,))))

        def tf(vals, fibers, lobj, robj, tc2):
            h = vals[0]
            mid = _pack_pair(tc2, catsym, a_id, b_id)
            return ([h, (c.identity(a_id), c.identity(b_id))], [mid])

        return SliceOutcome(1, rep, tf)


def _pack_pair(tc, catsym, a, b):
    w = Wire(catsym)
    c = tc.env.cats[catsym]
    cc = tc.env.boundary_cat((w, w))
    return join_objs(cc, [(c, a), (c, b)])


class EtaPort(Rule):
    """Insert inport(A); outport(A) at an empty boundary point."""
    name = "R-ETA-A"
    tag = "directed"
    site = "insert"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        _want("A" in inst, "R-ETA-A needs an object A")
        ea = inst["A"]
        a = _resolve_obj(tc, ea)
        c = tc.env.cats[obj_expr_cat(ea, tc.sig)]
        rep = (Gen("inport", (ea,)), Gen("outport", (ea,)))

        def tf(vals, fibers, lobj, robj, tc2):
            return ([c.identity(a), c.identity(a)], [a])

        return SliceOutcome(0, rep, tf)


class EpsPort(Rule):
    """outport(A); inport(A) collapses by composing through A."""
    name = "R-EPS-A"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Gen) and p1.kind == "outport"
              and isinstance(p2, Gen) and p2.kind == "inport",
              "R-EPS-A expects outport then inport")
        a1 = _resolve_obj(tc, p1.args[0])
        a2 = _resolve_obj(tc, p2.args[0])
        _want(a1 == a2, "R-EPS-A ports disagree on the object")
        c = tc.env.cats[obj_expr_cat(p1.args[0], tc.sig)]

        def tf(vals, fibers, lobj, robj, tc2):
            f, g = vals
            return Adapter(c.compose(f, g))

        return SliceOutcome(2, (), tf)


class EtaTensor(Rule):
    """Insert junction; fork at a two-wire boundary point."""
    name = "R-ETA-TENSOR"
    tag = "directed"
    site = "insert"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        wires = _slice_wires(tc.sig, container, parts, i)
        _want(len(wires) == 2 and wires[0] == wires[1] and not wires[0].op,
              "R-ETA-TENSOR needs a C,C boundary point")
        catsym = wires[0].cat
        mon = tc.env.monoidal(catsym)
        rep = (Gen("junction", (catsym,)), Gen("fork", (catsym,)))

        def tf(vals, fibers, lobj, robj, tc2):
            cc = tc2.env.boundary_cat(wires)
            m, n = split_obj2(cc, mon.base, mon.base, lobj)
            t = mon.tensor(m, n)
            return ([mon.base.identity(t), mon.base.identity(t)], [t])

        return SliceOutcome(0, rep, tf)


class EpsTensor(Rule):
    """fork; junction collapses by composing through the tensor."""
    name = "R-EPS-TENSOR"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Gen) and p1.kind == "fork"
              and isinstance(p2, Gen) and p2.kind == "junction"
              and p1.args == p2.args,
              "R-EPS-TENSOR expects fork then junction")
        c = tc.env.cats[p1.args[0]]

        def tf(vals, fibers, lobj, robj, tc2):
            h, j = vals
            return Adapter(c.compose(h, j))

        return SliceOutcome(2, (), tf)


class CartFork(Rule):
    """fork <=> copy over a cartesian oracle (universal property of the
    product, witnessed by projections and pairing)."""
    name = "R-CART-FORK"
    tag = "iso"
    site = "node"

    def apply_node(self, tc, term, inst, backward):
        if not backward:
            _want(isinstance(term, Gen) and term.kind == "fork",
                  "R-CART-FORK forward expects a fork")
            mon = _gate_cartesian(tc, term.args[0])
            new_term = Gen("copy", term.args, term.label)

            def tf(fiber, value, tc2=tc):
                cc = tc2.env.boundary_cat((Wire(term.args[0]),) * 2)
                m, n = split_obj2(cc, mon.base, mon.base, fiber[1])
                w = mon.cartesian
                c = mon.base
                return (c.compose(value, w.proj1[(m, n)]),
                        c.compose(value, w.proj2[(m, n)]))

            return NodeOutcome(new_term, tf)
        _want(isinstance(term, Gen) and term.kind == "copy",
              "R-CART-FORK backward expects a copy")
        mon = _gate_cartesian(tc, term.args[0])
        new_term = Gen("fork", term.args, term.label)

        def tf(fiber, value, tc2=tc):
            return mon.cartesian.pairing[value]

        return NodeOutcome(new_term, tf)


class CartCounit(Rule):
    """outport(I) <=> discard over a cartesian oracle (I terminal)."""
    name = "R-CART-COUNIT"
    tag = "iso"
    site = "node"

    def apply_node(self, tc, term, inst, backward):
        if not backward:
            _want(isinstance(term, Gen) and term.kind in ("outport", "unit-out"),
                  "R-CART-COUNIT forward expects a unit outport")
            if term.kind == "outport":
                catsym = obj_expr_cat(term.args[0], tc.sig)
                mon = _gate_cartesian(tc, catsym)
                _want(_resolve_obj(tc, term.args[0]) == mon.unit,
                      "R-CART-COUNIT needs the unit object")
            else:
                catsym = term.args[0]
                mon = _gate_cartesian(tc, catsym)
            new_term = Gen("discard", (catsym,), term.label)
            return NodeOutcome(new_term, lambda fiber, value: "*",
                               inverse_inst={})
        _want(isinstance(term, Gen) and term.kind == "discard",
              "R-CART-COUNIT backward expects a discard")
        mon = _gate_cartesian(tc, term.args[0])
        new_term = Gen("unit-out", term.args, term.label)

        def tf(fiber, value):
            return mon.cartesian.terminal[fiber[0]]

        return NodeOutcome(new_term, tf)


class CocartJunction(Rule):
    """junction <=> merge over a cocartesian oracle."""
    name = "R-COCART-JUNCTION"
    tag = "iso"
    site = "node"

    def apply_node(self, tc, term, inst, backward):
        if not backward:
            _want(isinstance(term, Gen) and term.kind == "junction",
                  "R-COCART-JUNCTION forward expects a junction")
            mon = _gate_cocartesian(tc, term.args[0])
            new_term = Gen("merge", term.args, term.label)

            def tf(fiber, value, tc2=tc):
                cc = tc2.env.boundary_cat((Wire(term.args[0]),) * 2)
                m, n = split_obj2(cc, mon.base, mon.base, fiber[0])
                w = mon.cocartesian
                c = mon.base
                return (c.compose(w.inj1[(m, n)], value),
                        c.compose(w.inj2[(m, n)], value))

            return NodeOutcome(new_term, tf)
        _want(isinstance(term, Gen) and term.kind == "merge",
              "R-COCART-JUNCTION backward expects a merge")
        mon = _gate_cocartesian(tc, term.args[0])
        new_term = Gen("junction", term.args, term.label)

        def tf(fiber, value):
            return mon.cocartesian.copairing[value]

        return NodeOutcome(new_term, tf)


class CocartUnit(Rule):
    """inport(I) <=> codiscard over a cocartesian oracle (I initial)."""
    name = "R-COCART-UNIT"
    tag = "iso"
    site = "node"

    def apply_node(self, tc, term, inst, backward):
        if not backward:
            _want(isinstance(term, Gen) and term.kind in ("inport", "unit-in"),
                  "R-COCART-UNIT forward expects a unit inport")
            if term.kind == "inport":
                catsym = obj_expr_cat(term.args[0], tc.sig)
                mon = _gate_cocartesian(tc, catsym)
                _want(_resolve_obj(tc, term.args[0]) == mon.unit,
                      "R-COCART-UNIT needs the unit object")
            else:
                catsym = term.args[0]
                mon = _gate_cocartesian(tc, catsym)
            new_term = Gen("codiscard", (catsym,), term.label)
            return NodeOutcome(new_term, lambda fiber, value: "*")
        _want(isinstance(term, Gen) and term.kind == "codiscard",
              "R-COCART-UNIT backward expects a codiscard")
        mon = _gate_cocartesian(tc, term.args[0])
        new_term = Gen("unit-in", term.args, term.label)

        def tf(fiber, value):
            return mon.cocartesian.initial[fiber[1]]

        return NodeOutcome(new_term, tf)


class Sym(Rule):
    """Slide the braiding through junctions, forks and ports; cancel a
    double crossing."""
    name = "R-SYM"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            return self._backward(tc, parts, i, inst, container)
        p1 = _part(parts, i)
        p2 = _part(parts, i + 1)
        # (sym ; junction) => junction, precomposing the braiding
        if (isinstance(p1, Gen) and p1.kind == "sym" and isinstance(p2, Gen)
                and p2.kind == "junction"):
            w1, w2 = p1.args
            _want(w1 == w2 == Wire(p2.args[0]), "R-SYM wires must match the junction")
            mon = _gate_braiding(tc, p2.args[0])
            c = mon.base

            def tf(vals, fibers, lobj, robj, tc2):
                (u, v), j = vals
                cc = tc2.env.boundary_cat((w1, w1))
                m, n = split_obj2(cc, c, c, fibers[0][0])
                return ([c.compose(mon.braid(m, n),
                                   c.compose(mon.tensor_m(v, u), j))], [])

            return SliceOutcome(2, (p2,), tf, inverse_inst={"config": "junction"})
        # (fork ; sym) => fork, postcomposing the braiding
        if (isinstance(p1, Gen) and p1.kind == "fork" and isinstance(p2, Gen)
                and p2.kind == "sym"):
            w1, w2 = p2.args
            _want(w1 == w2 == Wire(p1.args[0]), "R-SYM wires must match the fork")
            mon = _gate_braiding(tc, p1.args[0])
            c = mon.base

            def tf(vals, fibers, lobj, robj, tc2):
                h, (u, v) = vals
                # u: m->m2 on the first emitted wire, v: n->n2 on the second
                return ([c.compose(h, c.compose(mon.tensor_m(u, v),
                                                mon.braid(c.cod(u), c.cod(v))))],
                        [])

            return SliceOutcome(2, (p1,), tf, inverse_inst={"config": "fork"})
        # (par of sources ; sym) => par swapped
        if (isinstance(p1, Par) and isinstance(p2, Gen) and p2.kind == "sym"):
            a, b = p1.top, p1.bottom
            la, lb = boundary(a, tc.sig)[0], boundary(b, tc.sig)[0]
            _want(la == () and lb == (), "R-SYM port slide needs source legs")
            swapped = norm(Par(b, a))

            def tf(vals, fibers, lobj, robj, tc2):
                node = tc2.node(_part(parts, i))
                (fa, va), (fb, vb) = node.split_value(fibers[0], vals[0])
                (u, v) = vals[1]
                pa, pb = tc2.node(a).prof, tc2.node(b).prof
                va2 = pa.act(pa.source.identity(fa[0]), u, va)
                vb2 = pb.act(pb.source.identity(fb[0]), v, vb)
                return ([par_value(tc2, b, vb2, a, va2)], [])

            return SliceOutcome(2, (swapped,), tf, inverse_inst={"config": "par"})
        # (sym ; sym) cancels
        if (isinstance(p1, Gen) and p1.kind == "sym" and isinstance(p2, Gen)
                and p2.kind == "sym"):
            _want(p1.args == (p2.args[1], p2.args[0]),
                  "R-SYM cancellation needs opposite crossings")

            def tf(vals, fibers, lobj, robj, tc2):
                (u, v), (v2, u2) = vals
                c1 = tc2.env.wire_cat(p1.args[0])
                c2 = tc2.env.wire_cat(p1.args[1])
                cc = tc2.env.boundary_cat(p1.args)
                return Adapter(join_mors(cc, [(c1, c1.compose(u, u2)),
                                              (c2, c2.compose(v, v2))]))

            return SliceOutcome(2, (), tf, inverse_inst={"config": "cancel"})
        raise MatchError("R-SYM does not match this site")

    def _backward(self, tc, parts, i, inst, container):
        config = inst.get("config")
        if config == "junction":
            p = _part(parts, i)
            _want(isinstance(p, Gen) and p.kind == "junction",
                  "backward R-SYM (junction) expects a junction")
            mon = _gate_braiding(tc, p.args[0])
            c = mon.base
            w = Wire(p.args[0])
            rep = (Gen("sym", (w, w)), p)

            def tf(vals, fibers, lobj, robj, tc2):
                j = vals[0]
                cc = tc2.env.boundary_cat((w, w))
                m, n = split_obj2(cc, c, c, lobj)
                mid = join_objs(cc, [(c, n), (c, m)])
                return ([(c.identity(m), c.identity(n)),
                         c.compose(mon.braid(n, m), j)], [mid])

            return SliceOutcome(1, rep, tf)
        if config == "fork":
            p = _part(parts, i)
            _want(isinstance(p, Gen) and p.kind == "fork",
                  "backward R-SYM (fork) expects a fork")
            mon = _gate_braiding(tc, p.args[0])
            c = mon.base
            w = Wire(p.args[0])
            rep = (p, Gen("sym", (w, w)))

            def tf(vals, fibers, lobj, robj, tc2):
                h = vals[0]
                cc = tc2.env.boundary_cat((w, w))
                m, n = split_obj2(cc, c, c, robj)
                mid = join_objs(cc, [(c, n), (c, m)])
                return ([c.compose(h, mon.braid(m, n)),
                         (c.identity(n), c.identity(m))], [mid])

            return SliceOutcome(1, rep, tf)
        if config == "par":
            p = _part(parts, i)
            _want(isinstance(p, Par), "backward R-SYM (par) expects a par")
            b, a = p.top, p.bottom
            wa = boundary(a, tc.sig)[1]
            wb = boundary(b, tc.sig)[1]
            _want(len(wa) == 1 and len(wb) == 1, "one output wire per leg")
            rep = (norm(Par(a, b)), Gen("sym", (wa[0], wb[0])))

            def tf(vals, fibers, lobj, robj, tc2):
                node = tc2.node(p)
                (fb, vb), (fa, va) = node.split_value(fibers[0], vals[0])
                ca = tc2.env.wire_cat(wa[0])
                cb = tc2.env.wire_cat(wb[0])
                cc = tc2.env.boundary_cat((wa[0], wb[0]))
                mid = join_objs(cc, [(ca, fa[1]), (cb, fb[1])])
                return ([par_value(tc2, a, va, b, vb),
                         (ca.identity(fa[1]), cb.identity(fb[1]))], [mid])

            return SliceOutcome(1, rep, tf)
        if config == "cancel":
            wires = _slice_wires(tc.sig, container, parts, i)
            _want(len(wires) == 2, "R-SYM cancellation insertion needs two wires")
            w1, w2 = wires
            rep = (Gen("sym", (w1, w2)), Gen("sym", (w2, w1)))

            def tf(vals, fibers, lobj, robj, tc2):
                c1, c2 = tc2.env.wire_cat(w1), tc2.env.wire_cat(w2)
                cc = tc2.env.boundary_cat((w1, w2))
                ccs = tc2.env.boundary_cat((w2, w1))
                x, y = split_obj2(cc, c1, c2, lobj)
                mid = join_objs(ccs, [(c2, y), (c1, x)])
                return ([(c1.identity(x), c2.identity(y)),
                         (c2.identity(y), c1.identity(x))], [mid])

            return SliceOutcome(0, rep, tf)
        raise MatchError("backward R-SYM needs a config instantiation")


class LaxCopy(Rule):
    """A pointwise source is laxly copied through the canonical copy."""
    name = "R-LAX-COPY"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        t = _part(parts, i)
        p2 = _part(parts, i + 1)
        _want(isinstance(p2, Gen) and p2.kind == "copy",
              "R-LAX-COPY expects a copy second")
        lb, rb = boundary(t, tc.sig)
        _want(lb == () and len(rb) == 1, "R-LAX-COPY needs a one-wire source leg")
        rep = norm(Par(t, t))

        def tf(vals, fibers, lobj, robj, tc2):
            v, (f1, f2) = vals
            prof = tc2.node(t).prof
            z = prof.source.identity(0)
            return ([(prof.act(z, f1, v), prof.act(z, f2, v))], [])

        return SliceOutcome(2, (rep,), tf)


class LaxMerge(Rule):
    """Dual lax structure: a pointwise sink is laxly merged."""
    name = "R-LAX-MERGE"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        p1 = _part(parts, i)
        t = _part(parts, i + 1)
        _want(isinstance(p1, Gen) and p1.kind == "merge",
              "R-LAX-MERGE expects a merge first")
        lb, rb = boundary(t, tc.sig)
        _want(rb == () and len(lb) == 1, "R-LAX-MERGE needs a one-wire sink leg")
        rep = norm(Par(t, t))

        def tf(vals, fibers, lobj, robj, tc2):
            (f1, f2), v = vals
            prof = tc2.node(t).prof
            z = prof.target.identity(0)
            return ([(prof.act(f1, z, v), prof.act(f2, z, v))], [])

        return SliceOutcome(2, (rep,), tf)


class LaxDiscard(Rule):
    """A pointwise source or sink is discarded."""
    name = "R-LAX-DISCARD"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        p1 = _part(parts, i)
        p2 = _part(parts, i + 1)
        if (isinstance(p2, Gen) and p2.kind == "discard"
                and boundary(p1, tc.sig)[0] == ()):
            pass
        elif (isinstance(p1, Gen) and p1.kind == "codiscard"
              and boundary(p2, tc.sig)[1] == ()):
            pass
        else:
            raise MatchError("R-LAX-DISCARD expects a source into a discard "
                             "or a codiscard into a sink")

        def tf(vals, fibers, lobj, robj, tc2):
            from .fincat import terminal_category
            return Adapter(terminal_category().identity(0))

        return SliceOutcome(2, (), tf)


class ZigzagCup(Rule):
    """The snake on a forward wire: (id | cap) ; (cup | id) collapses."""
    name = "R-ZIGZAG-CUP"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            wires = _slice_wires(tc.sig, container, parts, i)
            _want(len(wires) == 1 and not wires[0].op,
                  "backward R-ZIGZAG-CUP needs a single forward wire")
            catsym = wires[0].cat
            w = Wire(catsym)
            rep = (Par(Id((w,)), Gen("cap", (catsym,))),
                   Par(Gen("cup", (catsym,)), Id((w,))))

            def tf(vals, fibers, lobj, robj, tc2):
                c = tc2.env.cats[catsym]
                fwd_c, op_c = tc2.env.wire_cat(w), tc2.env.wire_cat(w.flip())
                mid = join_objs(tc2.env.boundary_cat((w, w.flip(), w)),
                                [(fwd_c, lobj), (op_c, lobj), (fwd_c, lobj)])
                e = c.identity(lobj)
                return ([(e, e), (e, e)], [mid])

            return SliceOutcome(0, rep, tf)
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Par) and is_plain_id(p1.top)
              and len(p1.top.wires) == 1 and not p1.top.wires[0].op
              and isinstance(p1.bottom, Gen) and p1.bottom.kind == "cap",
              "R-ZIGZAG-CUP expects (id | cap) first")
        _want(isinstance(p2, Par) and isinstance(p2.top, Gen)
              and p2.top.kind == "cup" and is_plain_id(p2.bottom),
              "R-ZIGZAG-CUP expects (cup | id) second")
        catsym = p1.bottom.args[0]
        _want(p1.top.wires[0].cat == catsym == p2.top.args[0],
              "R-ZIGZAG-CUP wires must agree")
        c = tc.env.cats[catsym]

        def tf(vals, fibers, lobj, robj, tc2):
            (f, cel), (uel, v) = vals
            return Adapter(c.compose_chain(f, uel, cel, v))

        return SliceOutcome(2, (), tf, inverse_inst={})


class ZigzagCap(Rule):
    """The snake on a dual wire: (cap | id) ; (id | cup) collapses."""
    name = "R-ZIGZAG-CAP"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            wires = _slice_wires(tc.sig, container, parts, i)
            _want(len(wires) == 1 and wires[0].op,
                  "backward R-ZIGZAG-CAP needs a single dual wire")
            catsym = wires[0].cat
            w = Wire(catsym, True)
            rep = (Par(Gen("cap", (catsym,)), Id((w,))),
                   Par(Id((w,)), Gen("cup", (catsym,))))

            def tf(vals, fibers, lobj, robj, tc2):
                c = tc2.env.cats[catsym]
                w1, w2 = tc2.env.wire_cat(w), tc2.env.wire_cat(w.flip())
                mid = join_objs(tc2.env.boundary_cat((w, w.flip(), w)),
                                [(w1, lobj), (w2, lobj), (w1, lobj)])
                e = c.identity(lobj)
                return ([(e, e), (e, e)], [mid])

            return SliceOutcome(0, rep, tf)
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Par) and isinstance(p1.top, Gen)
              and p1.top.kind == "cap" and is_plain_id(p1.bottom)
              and len(p1.bottom.wires) == 1 and p1.bottom.wires[0].op,
              "R-ZIGZAG-CAP expects (cap | id) first")
        _want(isinstance(p2, Par) and is_plain_id(p2.top)
              and isinstance(p2.bottom, Gen) and p2.bottom.kind == "cup",
              "R-ZIGZAG-CAP expects (id | cup) second")
        catsym = p1.top.args[0]
        c = tc.env.cats[catsym]

        def tf(vals, fibers, lobj, robj, tc2):
            (cel, f), (g, uel) = vals
            # all values are base-category morphisms; the op-wire composite
            # reads right to left in the base
            return Adapter(c.compose_chain(g, cel, uel, f))

        return SliceOutcome(2, (), tf, inverse_inst={})


class FunctorFuse(Rule):
    """Consecutive functor boxes fuse to the composite functor."""
    name = "R-FUNCTOR-FUSE"
    tag = "iso"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        if backward:
            t = _part(parts, i)
            _want(isinstance(t, Gen) and t.kind == "box",
                  "backward R-FUNCTOR-FUSE expects a functor box")
            _want("F" in inst and "G" in inst,
                  "backward R-FUNCTOR-FUSE needs F and G")
            ef, eg = inst["F"], inst["G"]
            fused = tc.env.resolve_functor(("fcomp", ef, eg))
            given = tc.env.resolve_functor(t.args[0])
            _want(fused.obj_map == given.obj_map and fused.mor_map == given.mor_map,
                  "instantiation does not compose to the fused functor")
            fnF = tc.env.resolve_functor(ef)
            d = fnF.target
            rep = (Gen("box", (ef,)), Gen("box", (eg,)))

            def tf(vals, fibers, lobj, robj, tc2):
                w = vals[0]
                fx = fnF.obj(fibers[0][0])
                return ([d.identity(fx), w], [fx])

            return SliceOutcome(1, rep, tf)
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Gen) and p1.kind == "box"
              and isinstance(p2, Gen) and p2.kind == "box",
              "R-FUNCTOR-FUSE expects two functor boxes")
        _want(functor_expr_sig(p1.args[0], tc.sig)[1]
              == functor_expr_sig(p2.args[0], tc.sig)[0],
              "functor boxes are not composable")
        fnG = tc.env.resolve_functor(p2.args[0])
        e = fnG.target
        fused = Gen("box", (("fcomp", p1.args[0], p2.args[0]),))

        def tf(vals, fibers, lobj, robj, tc2):
            u, v = vals
            return ([e.compose(fnG.mor(u), v)], [])

        return SliceOutcome(2, (fused,), tf,
                            inverse_inst={"F": p1.args[0], "G": p2.args[0]})


class FunctorEta(Rule):
    """Insert box(F); cobox(F) at a source-category wire point."""
    name = "R-FUNCTOR-ADJ-ETA"
    tag = "directed"
    site = "insert"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        _want("F" in inst, "R-FUNCTOR-ADJ-ETA needs a functor F")
        ef = inst["F"]
        fn = tc.env.resolve_functor(ef)
        rep = (Gen("box", (ef,)), Gen("cobox", (ef,)))

        def tf(vals, fibers, lobj, robj, tc2):
            fx = fn.obj(lobj)
            e = fn.target.identity(fx)
            return ([e, e], [fx])

        return SliceOutcome(0, rep, tf)


class FunctorEps(Rule):
    """cobox(F); box(F) collapses by composing through the image."""
    name = "R-FUNCTOR-ADJ-EPS"
    tag = "directed"

    def apply_slice(self, tc, parts, i, inst, backward, container):
        p1, p2 = _part(parts, i), _part(parts, i + 1)
        _want(isinstance(p1, Gen) and p1.kind == "cobox"
              and isinstance(p2, Gen) and p2.kind == "box"
              and p1.args == p2.args,
              "R-FUNCTOR-ADJ-EPS expects cobox then box of one functor")
        fn = tc.env.resolve_functor(p1.args[0])
        d = fn.target

        def tf(vals, fibers, lobj, robj, tc2):
            p, q = vals
            return Adapter(d.compose(p, q))

        return SliceOutcome(2, (), tf)


RULES = {r.name: r for r in [
    YonedaL(), YonedaR(), Assoc(), Interchange(), PortFuse(),
    EtaPort(), EpsPort(), EtaTensor(), EpsTensor(),
    CartFork(), CartCounit(), CocartJunction(), CocartUnit(),
    Sym(), LaxCopy(), LaxMerge(), LaxDiscard(),
    ZigzagCup(), ZigzagCap(), FunctorFuse(), FunctorEta(), FunctorEps(),
]}


# ---------------------------------------------------------------------------
# derivations and the checker


def strip_labels(t):
    if isinstance(t, Seq):
        return Seq(tuple(strip_labels(p) for p in t.parts))
    if isinstance(t, Par):
        return Par(strip_labels(t.top), strip_labels(t.bottom))
    if isinstance(t, Id):
        return Id(t.wires)
    return Gen(t.kind, t.args)


@dataclass
class Derivation:
    name: str
    shape: str
    steps: list = field(default_factory=list)
    obligations: list = field(default_factory=list)  # (first, last), 1-based


@dataclass
class PointDecl:
    name: str
    shape: str
    assignment: dict


@dataclass
class AssertDecl:
    left: str
    right: str
    via: str  # derivation name, or "-" for the empty deformation


@dataclass
class DerivationScript:
    shapes_ref: str
    main: Derivation
    named: dict
    points: list
    asserts: list


class Report:
    """Accumulates deterministic, line-oriented output."""

    def __init__(self, fail_fast=False):
        self.lines = []
        self.failures = []
        self.fail_fast = fail_fast

    @property
    def ok(self):
        return not self.failures

    def line(self, text):
        self.lines.append(text)

    def fail(self, text):
        self.failures.append(text)
        self.lines.append("FAIL " + text)
        if self.fail_fast:
            raise CheckAborted(text)

    def text(self):
        return "\n".join(self.lines) + "\n"

    def data(self):
        return {"ok": self.ok, "lines": list(self.lines),
                "failures": list(self.failures)}


class CheckAborted(Exception):
    pass


def _fiber_members(node):
    """All raw index elements of the evaluated term, grouped per class and
    per fiber: {(a, b): {rep: [raw elements]}}."""
    prof = node.prof
    out = {}
    for a in prof.source.objects:
        for b in prof.target.objects:
            if hasattr(prof, "members"):
                groups = prof.members(a, b)
            else:
                groups = {v: [v] for v in prof.fiber(a, b)}
            if groups:
                out[(a, b)] = groups
    return out


def _count(node):
    return sum(len(node.prof.fiber(a, b))
               for a in node.prof.source.objects
               for b in node.prof.target.objects)


def check_step(tc: TCtx, term, step: Step, report: Report, idx, sig, env):
    """Apply and semantically verify one step.  Returns
    (new term, class map {fiber: {src rep: dst rep}}) or None on failure."""
    try:
        new_term, transport, inv_inst = apply_step(term, step, sig, env, tc.ev)
    except (RewriteError, StructureMissing, ShapeTypeError, FixtureError) as e:
        report.fail(f"step {idx} {step.rule}: {e}")
        return None
    src = tc.node(term)
    dst = tc.node(new_term)
    fwd = {}
    for fiber, groups in _fiber_members(src).items():
        dst_fiber = set(dst.prof.fiber(*fiber))
        fmap = {}
        for rep, members in groups.items():
            images = set()
            for m in members:
                try:
                    images.add(transport(fiber, m))
                except Exception as e:
                    report.fail(f"step {idx} {step.rule}: action failed on a "
                                f"representative at fiber {fiber}: {e}")
                    return None
            if len(images) != 1:
                report.fail(f"step {idx} {step.rule}: not well-defined on the "
                            f"class of {src.prof.render(rep)} at fiber {fiber}")
                return None
            img = images.pop()
            if img not in dst_fiber:
                report.fail(f"step {idx} {step.rule}: image outside the target "
                            f"set at fiber {fiber} (internal consistency failure)")
                return None
            fmap[rep] = img
        fwd[fiber] = fmap
    rule = RULES[step.rule]
    note = ""
    if rule.tag == "iso":
        # the syntactic inverse exists unless the rewrite dissolved the
        # structure enclosing the site (for example a snake whose parallel
        # wrapper merged into an identity); bijectivity is still enforced
        inv_step = Step(step.rule, step.path, not step.backward, inv_inst)
        back_tr = None
        try:
            back_term, back_tr, _ = apply_step(new_term, inv_step, sig, env, tc.ev)
            if strip_labels(back_term) != strip_labels(term):
                back_tr = None
        except (PathError, MatchError):
            back_tr = None
        except (RewriteError, StructureMissing, ShapeTypeError, FixtureError) as e:
            report.fail(f"step {idx} {step.rule}: inverse application failed: {e}")
            return None
        if back_tr is None:
            note = " (inverse site collapsed; bijectivity verified)"
        for fiber, groups in _fiber_members(dst).items():
            if fiber not in fwd and groups:
                report.fail(f"step {idx} {step.rule}: not a bijection at fiber "
                            f"{fiber} (source side is empty)")
                return None
        for fiber, fmap in fwd.items():
            dst_reps = list(dst.prof.fiber(*fiber))
            if sorted(map(_render_key, fmap.values())) != sorted(map(_render_key, dst_reps)):
                report.fail(f"step {idx} {step.rule}: not a bijection at fiber "
                            f"{fiber} ({len(set(fmap.values()))} of "
                            f"{len(dst_reps)} classes hit)")
                return None
            if back_tr is None:
                continue
            for rep, img in fmap.items():
                back = back_tr(fiber, img)
                if back != rep:
                    report.fail(f"step {idx} {step.rule}: backward(forward) is "
                                f"not the identity on {src.prof.render(rep)}")
                    return None
            for drep in dst_reps:
                b = back_tr(fiber, drep)
                if transport(fiber, b) != drep:
                    report.fail(f"step {idx} {step.rule}: forward(backward) is "
                                f"not the identity on {dst.prof.render(drep)}")
                    return None
    report.line(f"  step {idx} {step.rule} ok: classes {_count(src)} -> "
                f"{_count(dst)}{note}")
    return new_term, fwd


def _render_key(v):
    from .profunctor import value_key
    return value_key(v)


def check_derivation_once(deriv: Derivation, sig, env, report: Report):
    """Run all steps and obligations of one derivation under one full
    object assignment.  Returns (terms, per-step class maps) or None."""
    if deriv.shape not in sig.shapes:
        report.fail(f"unknown shape {deriv.shape!r}")
        return None
    tc = TCtx(Evaluator(env))
    term = sig.shapes[deriv.shape]
    try:
        boundary(term, sig)
    except ShapeTypeError as e:
        report.fail(f"shape {deriv.shape} does not typecheck: {e}")
        return None
    terms = [term]
    maps = []
    for idx, step in enumerate(deriv.steps, 1):
        out = check_step(tc, terms[-1], step, report, idx, sig, env)
        if out is None:
            return None
        new_term, fwd = out
        terms.append(new_term)
        maps.append(fwd)
    for (first, last) in deriv.obligations:
        if not (1 <= first <= last <= len(deriv.steps)):
            report.fail(f"obligation {first}..{last} out of range")
            return None
        t0, t1 = terms[first - 1], terms[last]
        if strip_labels(t0) != strip_labels(t1):
            report.fail(f"obligation {first}..{last}: terms differ, composite "
                        f"cannot be an identity")
            return None
        node = tc.node(t0)
        ok = True
        for fiber in _fiber_members(node):
            for rep in node.prof.fiber(*fiber):
                v = rep
                for k in range(first - 1, last):
                    v = maps[k][fiber][v]
                if v != rep:
                    report.fail(f"obligation {first}..{last}: composite moves "
                                f"{node.prof.render(rep)} at fiber {fiber}")
                    ok = False
                    break
            if not ok:
                break
        if ok:
            report.line(f"  obligation identity {first}..{last} ok")
    return terms, maps


def compose_step_maps(maps, fiber, value):
    for fwd in maps:
        value = fwd[fiber][value]
    return value


def script_object_symbols(script: DerivationScript, sig):
    """Object symbols used by any shape a script touches (others are not
    swept)."""
    from .shapelang import objects_in
    used = set()
    shapes = [d.shape for d in script.named.values()]
    if script.main:
        shapes.append(script.main.shape)
    shapes += [p.shape for p in script.points]
    for name in shapes:
        if name in sig.shapes:
            used |= objects_in(sig.shapes[name])
    return used


def check_derivation(script: DerivationScript, sig, env: Env,
                     fail_fast=False) -> Report:
    """Check every derivation of the script over every assignment of the
    free object symbols, then the point assertions."""
    report = Report(fail_fast)
    used = script_object_symbols(script, sig)
    try:
        for env_a in env.assignments(only=used):
            desc = env_a.describe_objs()
            report.line(f"assignment: {desc}" if desc else "assignment: (none)")
            named_results = {}
            for name, deriv in list(script.named.items()) + (
                    [("main", script.main)] if script.main else []):
                report.line(f" derivation {name} from {deriv.shape}:")
                out = check_derivation_once(deriv, sig, env_a, report)
                if out is None:
                    continue
                named_results[name] = out
            _check_points(script, sig, env_a, named_results, report)
    except CheckAborted:
        pass
    report.line(f"result: {'ok' if report.ok else 'FAILURE'}")
    return report


def _check_points(script, sig, env, named_results, report):
    if not script.points and not script.asserts:
        return
    from . import pointed
    diagrams = {}
    for decl in script.points:
        try:
            d = pointed.OpenDiagram.from_names(sig, env, sig.shapes[decl.shape],
                                               decl.assignment)
        except Exception as e:
            report.fail(f"point {decl.name}: {e}")
            continue
        diagrams[decl.name] = d
        report.line(f"  point {decl.name}: {d.describe()}")
    for a in script.asserts:
        if a.left not in diagrams or a.right not in diagrams:
            report.fail(f"assert-equal: unknown point {a.left} or {a.right}")
            continue
        d1, d2 = diagrams[a.left], diagrams[a.right]
        if a.via == "-":
            deformation = []
        else:
            if a.via not in script.named:
                report.fail(f"assert-equal: unknown derivation {a.via!r}")
                continue
            deformation = script.named[a.via].steps
        try:
            eq = pointed.equal_up_to(d1, d2, deformation, sig, env)
        except Exception as e:
            report.fail(f"assert-equal {a.left} {a.right}: {e}")
            continue
        if eq:
            report.line(f"  assert-equal {a.left} {a.right} via {a.via} ok")
        else:
            report.fail(f"assert-equal {a.left} {a.right} via {a.via}: points differ")


# ---------------------------------------------------------------------------
# derivation script parsing


def _parse_path(text):
    if text == "root":
        return ()
    try:
        return tuple(int(p) for p in text.split("."))
    except ValueError:
        raise RewriteError(f"bad path {text!r}")


def _split_top_commas(body):
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur and "".join(cur).strip():
        parts.append("".join(cur))
    return parts


def _parse_inst_value(text, sig):
    from .shapelang import read_sexprs, _parse_obj_expr, _parse_functor_expr
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    if text.startswith("("):
        (form,) = read_sexprs(text)
        if isinstance(form, list) and form and form[0] in ("tensor", "unit"):
            return _parse_obj_expr(form, sig)
        if isinstance(form, list) and form and form[0] == "fcomp":
            return _parse_functor_expr(form, sig)
        return _sexp_tuple(form)
    if text.startswith('"') and text.endswith('"'):
        return text[1:-1]
    return text


def _sexp_tuple(form):
    if isinstance(form, list):
        return tuple(_sexp_tuple(x) for x in form)
    if isinstance(form, tuple) and form[0] == "str":
        return form[1]
    return form


def _parse_bindings(text, sig):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise RewriteError(f"bindings must be braced: {text!r}")
    out = {}
    for item in _split_top_commas(text[1:-1]):
        if not item.strip():
            continue
        if ":=" not in item:
            raise RewriteError(f"binding {item!r} needs ':='")
        k, v = item.split(":=", 1)
        out[k.strip()] = _parse_inst_value(v, sig)
    return out


def _parse_step_line(rest, sig):
    toks = rest.split(None, 2)
    if len(toks) < 3 or toks[1] != "at":
        raise RewriteError(f"malformed step line: step {rest!r}")
    rule, _, tail = toks
    tail = tail.strip()
    backward = False
    inst = {}
    if tail.endswith("}") and " with " in tail:
        tail, bindings = tail.split(" with ", 1)
        inst = _parse_bindings(bindings, sig)
        tail = tail.strip()
    if tail.endswith(" backward"):
        backward = True
        tail = tail[:-len(" backward")].strip()
    elif tail == "backward":
        raise RewriteError("step needs a path before 'backward'")
    path = _parse_path(tail.split()[0])
    if len(tail.split()) > 1:
        if tail.split()[1] == "backward":
            backward = True
        else:
            raise RewriteError(f"unexpected token after path: {tail!r}")
    return Step(rule, path, backward, inst)


def parse_derivation_script(text, sig) -> DerivationScript:
    shapes_ref = None
    main = None
    named = {}
    points = []
    asserts = []
    current = None  # a named derivation being filled
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "use":
            shapes_ref = rest
        elif head == "derive":
            if main is not None:
                raise RewriteError("only one main derivation per script")
            main = Derivation("main", rest)
            current = main
        elif head == "derivation":
            toks = rest.split()
            if len(toks) != 3 or toks[1] != "from":
                raise RewriteError(f"malformed derivation header: {line!r}")
            current = Derivation(toks[0], toks[2])
            named[toks[0]] = current
        elif head == "end":
            current = main
        elif head == "step":
            if current is None:
                raise RewriteError("step before any 'derive' or 'derivation'")
            current.steps.append(_parse_step_line(rest, sig))
        elif head == "obligation":
            toks = rest.split()
            if len(toks) != 3 or toks[0] != "identity":
                raise RewriteError(f"malformed obligation: {line!r}")
            if current is None:
                raise RewriteError("obligation before any derivation")
            current.obligations.append((int(toks[1]), int(toks[2])))
        elif head == "point":
            name, _, tail = rest.partition(" ")
            shape, _, braced = tail.strip().partition(" ")
            assignment = _parse_bindings(braced.strip(), sig) if braced.strip() else {}
            points.append(PointDecl(name, shape, assignment))
        elif head == "assert-equal":
            toks = rest.split()
            if len(toks) != 4 or toks[2] != "via":
                raise RewriteError(f"malformed assert-equal: {line!r}")
            asserts.append(AssertDecl(toks[0], toks[1], toks[3]))
        else:
            raise RewriteError(f"unknown directive {head!r}")
    if main is None and not named:
        raise RewriteError("script declares no derivation")
    return DerivationScript(shapes_ref, main, named, points, asserts)
