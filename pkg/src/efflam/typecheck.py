"""Bidirectional type checking with effect-row subsumption.

Synthesis computes the least type of a term: injections get the empty
effect row and handlers get exactly the operations their scrutinee and
clauses can still perform.  Subsumption widens rows wherever a term is
checked against an expected type, so a pure computation can be used
anywhere a more effectful one is allowed.

Bare lambdas synthesize no type of their own (`annotationRequired`),
but they are accepted in every checking position: under an ascription,
as an argument, as a handler clause, as an operation parameter, and in
the function slot of an immediately applied redex.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .syntax import (
    Abs,
    Ann,
    App,
    Atom,
    Cherry,
    Comp,
    EMPTY_ROW,
    Eta,
    Exchange,
    Fun,
    Handler,
    Op,
    RowError,
    Signature,
    Term,
    Type,
    UNIT,
    Var,
)
from .syntax import Const as ConstTerm

Path = tuple[int, ...]


class TypeCheckError(Exception):
    """A typing failure, tagged with a kind and the path to the offender.

    Kinds: mismatch, unknownName, rowNotDisjoint, rowNotEmpty,
    notAFunction, notAComputation, clauseShape, annotationRequired.
    """

    def __init__(self, kind: str, path: Path, message: str):
        self.kind = kind
        self.path = path
        super().__init__(message)

    def __str__(self) -> str:
        at = ".".join(str(i) for i in self.path) if self.path else "root"
        return f"{self.kind} at {at}: {self.args[0]}"


def _fail(kind: str, path: Path, message: str) -> "TypeCheckError":
    raise TypeCheckError(kind, path, message)


@dataclass
class Context:
    """Declared atoms, constants, and operations, plus bound variables."""

    atoms: frozenset[str]
    constants: dict[str, Type]
    operations: Signature
    vars: dict[str, Type] = field(default_factory=dict)

    @staticmethod
    def initial(
        atoms: set[str] | frozenset[str],
        constants: dict[str, Type],
        operations: Signature,
    ) -> "Context":
        """Context with the ambient unit type and unit value included."""
        return Context(
            atoms=frozenset(atoms) | {UNIT.name},
            constants={"*": UNIT, **constants},
            operations=operations,
        )

    def bind(self, name: str, ty: Type) -> "Context":
        return replace(self, vars={**self.vars, name: ty})


def disjoint_union(left: Signature, right: Signature, path: Path = ()) -> Signature:
    """Union of operation rows sharing no names.

    The inference rules themselves can never produce a name collision,
    because every row entry is drawn from the one declared operation
    table; this helper guards rows composed programmatically.
    """
    try:
        return left.disjoint_union(right)
    except RowError as err:
        _fail("rowNotDisjoint", path, str(err))


# ---------------------------------------------------------------------------
# Subtyping: rows may widen, functions are contravariant in their domain.


def subtype(s: Type, t: Type) -> bool:
    match s, t:
        case (Atom(a), Atom(b)):
            return a == b
        case (Fun(d1, c1), Fun(d2, c2)):
            return subtype(d2, d1) and subtype(c1, c2)
        case (Comp(e1, v1), Comp(e2, v2)):
            return e1.subset_of(e2) and subtype(v1, v2)
    return False


def well_formed(ctx: Context, ty: Type, path: Path = ()) -> None:
    """Reject types naming undeclared atoms or misdeclared operations."""
    match ty:
        case Atom(name):
            if name not in ctx.atoms:
                _fail("unknownName", path, f"atom {name} is not declared")
        case Fun(dom, cod):
            well_formed(ctx, dom, path)
            well_formed(ctx, cod, path)
        case Comp(effects, value):
            for name, inp, out in effects:
                declared = ctx.operations.get(name)
                if declared is None:
                    _fail("unknownName", path, f"operation {name} is not declared")
                if declared != (inp, out):
                    _fail(
                        "mismatch",
                        path,
                        f"operation {name} used at a type other than its declaration",
                    )
            well_formed(ctx, value, path)


# ---------------------------------------------------------------------------
# Synthesis


def synthesize(ctx: Context, t: Term) -> Type:
    return _synth(ctx, t, ())


def _show(ty: Type) -> str:
    from .surface import print_type

    return print_type(ty)


def _synth(ctx: Context, t: Term, path: Path) -> Type:
    match t:
        case Var(name):
            if name in ctx.vars:
                return ctx.vars[name]
            _fail("unknownName", path, f"unbound variable {name}")
        case ConstTerm(name):
            if name in ctx.constants:
                return ctx.constants[name]
            _fail("unknownName", path, f"unknown constant {name}")
        case Ann(inner, ty):
            well_formed(ctx, ty, path)
            _check(ctx, inner, ty, path)
            return ty
        case Abs(_, _):
            _fail("annotationRequired", path, "cannot synthesize a type for a bare lambda")
        case App(fn, arg):
            if isinstance(fn, Abs):
                # immediately applied lambda: type the argument, then the body
                arg_ty = _synth(ctx, arg, path + (1,))
                return _synth(ctx.bind(fn.binder, arg_ty), fn.body, path + (0, 0))
            fn_ty = _synth(ctx, fn, path + (0,))
            if not isinstance(fn_ty, Fun):
                _fail("notAFunction", path + (0,), f"applied term has type {_show(fn_ty)}")
            _check(ctx, arg, fn_ty.dom, path + (1,))
            return fn_ty.cod
        case Eta(value):
            return Comp(EMPTY_ROW, _synth(ctx, value, path + (0,)))
        case Op(op, param, binder, cont):
            entry = ctx.operations.get(op)
            if entry is None:
                _fail("unknownName", path, f"operation {op} is not declared")
            inp, out = entry
            _check(ctx, param, inp, path + (0,))
            cont_ty = _synth(ctx.bind(binder, out), cont, path + (1,))
            if not isinstance(cont_ty, Comp):
                _fail(
                    "notAComputation",
                    path + (1,),
                    f"operation continuation has type {_show(cont_ty)}",
                )
            row = cont_ty.effects.union(Signature.of({op: entry}))
            return Comp(row, cont_ty.value)
        case Handler(_, _, _):
            return _synth_handler(ctx, t, path)
        case Cherry(comp):
            comp_ty = _synth(ctx, comp, path + (0,))
            if not isinstance(comp_ty, Comp):
                _fail("notAComputation", path + (0,), f"extraction from type {_show(comp_ty)}")
            if not comp_ty.effects.is_empty():
                _fail(
                    "rowNotEmpty",
                    path + (0,),
                    "extraction requires an empty effect row, found "
                    f"{{{', '.join(comp_ty.effects.names())}}}",
                )
            return comp_ty.value
        case Exchange(fn):
            fn_ty = _synth(ctx, fn, path + (0,))
            if not isinstance(fn_ty, Fun):
                _fail("notAFunction", path + (0,), f"commuted term has type {_show(fn_ty)}")
            if not isinstance(fn_ty.cod, Comp):
                _fail(
                    "notAComputation",
                    path + (0,),
                    f"commuted function returns {_show(fn_ty.cod)}",
                )
            return Comp(fn_ty.cod.effects, Fun(fn_ty.dom, fn_ty.cod.value))
    raise TypeError(f"not a term: {t!r}")


def _fun_to_comp(ctx: Context, f: Term, dom: Type, path: Path) -> tuple[Type, Signature]:
    """Value type and row of `f dom` for a clause-position function term."""
    match f:
        case Ann(_, Fun(d, Comp(effects, value))) if subtype(dom, d):
            return value, effects
        case Abs(binder, body):
            body_ty = _synth(ctx.bind(binder, dom), body, path + (0,))
            if not isinstance(body_ty, Comp):
                _fail("clauseShape", path, f"clause returns {_show(body_ty)}, not a computation")
            return body_ty.value, body_ty.effects
        case _:
            f_ty = _synth(ctx, f, path)
            if not (isinstance(f_ty, Fun) and isinstance(f_ty.cod, Comp) and subtype(dom, f_ty.dom)):
                _fail("clauseShape", path, f"clause has type {_show(f_ty)}")
            return f_ty.cod.value, f_ty.cod.effects


def _clause_row_estimate(
    ctx: Context, clause: Term, inp: Type, resume: Type
) -> Signature | None:
    """Row a handler clause introduces, or None when it cannot be read off."""
    match clause:
        case Ann(_, Fun(_, Fun(_, Comp(effects, _)))):
            return effects
        case Abs(x, Abs(k, body)):
            try:
                body_ty = _synth(ctx.bind(x, inp).bind(k, resume), body, ())
            except TypeCheckError:
                return None
            return body_ty.effects if isinstance(body_ty, Comp) else None
        case _:
            try:
                ty = _synth(ctx, clause, ())
            except TypeCheckError:
                return None
            match ty:
                case Fun(_, Fun(_, Comp(effects, _))):
                    return effects
            return None


def _synth_handler(ctx: Context, t: Handler, path: Path) -> Type:
    n = len(t.clauses)
    scrut_path = path + (n + 1,)
    scrut_ty = _synth(ctx, t.scrutinee, scrut_path)
    if not isinstance(scrut_ty, Comp):
        _fail("notAComputation", scrut_path, f"handled term has type {_show(scrut_ty)}")
    entries: list[tuple[Type, Type]] = []
    for i, (op, _) in enumerate(t.clauses):
        entry = ctx.operations.get(op)
        if entry is None:
            _fail("unknownName", path + (i,), f"operation {op} is not declared")
        entries.append(entry)
    handled = {op for op, _ in t.clauses}
    residual = scrut_ty.effects.without(handled)
    gamma = scrut_ty.value

    # the eta clause fixes the result value type and seeds the row
    delta, row = _fun_to_comp(ctx, t.eta_clause, gamma, path + (n,))
    row = residual.union(row)

    # operation clauses may perform further operations; grow to a fixpoint
    while True:
        grown = row
        for (op, clause), (inp, out) in zip(t.clauses, entries):
            est = _clause_row_estimate(ctx, clause, inp, Fun(out, Comp(row, delta)))
            if est is not None:
                grown = grown.union(est)
        if grown == row:
            break
        row = grown

    result = Comp(row, delta)
    for i, ((op, clause), (inp, out)) in enumerate(zip(t.clauses, entries)):
        _check(ctx, clause, Fun(inp, Fun(Fun(out, result), result)), path + (i,))
    _check(ctx, t.eta_clause, Fun(gamma, result), path + (n,))
    return result


# ---------------------------------------------------------------------------
# Checking


def check_against(ctx: Context, t: Term, ty: Type) -> None:
    _check(ctx, t, ty, ())


def _check(ctx: Context, t: Term, want: Type, path: Path) -> None:
    match t:
        case Ann(inner, ty):
            well_formed(ctx, ty, path)
            if not subtype(ty, want):
                _fail("mismatch", path, f"ascription {_show(ty)} does not fit {_show(want)}")
            _check(ctx, inner, ty, path)
            return
        case Abs(binder, body):
            if not isinstance(want, Fun):
                _fail("mismatch", path, f"lambda checked against {_show(want)}")
            _check(ctx.bind(binder, want.dom), body, want.cod, path + (0,))
            return
        case Eta(value) if isinstance(want, Comp):
            _check(ctx, value, want.value, path + (0,))
            return
        case Op(op, param, binder, cont) if isinstance(want, Comp):
            entry = ctx.operations.get(op)
            if entry is None:
                _fail("unknownName", path, f"operation {op} is not declared")
            if want.effects.get(op) != entry:
                _fail(
                    "mismatch",
                    path,
                    f"operation {op} is not available in row "
                    f"{{{', '.join(want.effects.names())}}}",
                )
            _check(ctx, param, entry[0], path + (0,))
            _check(ctx.bind(binder, entry[1]), cont, want, path + (1,))
            return
        case Handler(clauses, eta_clause, scrutinee) if isinstance(want, Comp):
            # A synthesized result is exact; the structural push below
            # would force the wanted row into the resumption types,
            # where it sits contravariantly and may not fit.
            try:
                got = _synth_handler(ctx, t, path)
            except TypeCheckError:
                pass
            else:
                if not subtype(got, want):
                    _fail("mismatch", path, f"expected {_show(want)}, found {_show(got)}")
                return
            n = len(clauses)
            scrut_path = path + (n + 1,)
            scrut_ty = _synth(ctx, scrutinee, scrut_path)
            if not isinstance(scrut_ty, Comp):
                _fail("notAComputation", scrut_path, f"handled term has type {_show(scrut_ty)}")
            handled = {op for op, _ in clauses}
            residual = scrut_ty.effects.without(handled)
            if not residual.subset_of(want.effects):
                missing = set(residual.names()) - set(want.effects.names())
                _fail(
                    "mismatch",
                    scrut_path,
                    f"unhandled operations {{{', '.join(sorted(missing))}}} "
                    f"do not appear in row {{{', '.join(want.effects.names())}}}",
                )
            for i, (op, clause) in enumerate(clauses):
                entry = ctx.operations.get(op)
                if entry is None:
                    _fail("unknownName", path + (i,), f"operation {op} is not declared")
                inp, out = entry
                _check(ctx, clause, Fun(inp, Fun(Fun(out, want), want)), path + (i,))
            _check(ctx, eta_clause, Fun(scrut_ty.value, want), path + (n,))
            return
        case Cherry(comp):
            _check(ctx, comp, Comp(EMPTY_ROW, want), path + (0,))
            return
        case Exchange(fn) if isinstance(want, Comp) and isinstance(want.value, Fun):
            _check(ctx, fn, Fun(want.value.dom, Comp(want.effects, want.value.cod)), path + (0,))
            return
        case App(fn, arg) if isinstance(fn, Abs):
            arg_ty = _synth(ctx, arg, path + (1,))
            _check(ctx.bind(fn.binder, arg_ty), fn.body, want, path + (0, 0))
            return
    got = _synth(ctx, t, path)
    if not subtype(got, want):
        _fail("mismatch", path, f"expected {_show(want)}, found {_show(got)}")
