"""Parse-time type tracking: deciding which identifiers name types.

A :class:`TypeStack` cell holds a record per visible type: the name plus
the type's private classes (its inner classes and those of its
ancestors), which stop being visible once the defining body ends.

The combinators here keep that stack transactional while carving out
scopes: :func:`new_type` registers names introduced by classes and
aliases, :func:`scoped` drops the types a code block introduced,
:func:`class_def` rebuilds the defining class's record from a diff of
everything its body (and superclass) contributed, and :func:`class_guard`
peeks ahead to steer the grammar by whether an identifier names a type.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..combinators import ahead, ast_stack, predicate, seq
from ..core import SUCCESS, ContractViolationError, ParseContext, Parser, ParseResult
from ..states import MonotonicStack, StackState

__all__ = [
    "AnonClassInherit",
    "ClassDef",
    "EnclosingClasses",
    "NewType",
    "Scoped",
    "TypeRecord",
    "TypeStack",
    "anon_class_inherit",
    "class_def",
    "class_guard",
    "inherit",
    "is_type",
    "new_type",
    "priv_of",
    "scoped",
]


@dataclass(frozen=True)
class TypeRecord:
    """A visible type: its name and its private classes."""

    name: str
    priv: tuple = ()


class TypeStack(MonotonicStack):
    """Every type currently visible, innermost on top."""


class EnclosingClasses(StackState):
    """Names of the classes whose bodies the parse is currently inside."""


def is_type(ctx: ParseContext, iden: str) -> bool:
    """Does any visible type bear this name?"""
    return any(r.name == iden for r in ctx.state(TypeStack).values())


def priv_of(ctx: ParseContext, iden: str) -> tuple:
    """Private classes of the topmost type with this name; () if absent."""
    for r in ctx.state(TypeStack).values():
        if r.name == iden:
            return r.priv
    return ()


def inherit(ctx: ParseContext, name: str) -> None:
    """Make ``name``'s private classes visible by pushing them."""
    for r in priv_of(ctx, name):
        ctx.state(TypeStack).push(r)


def _expect_name(value, what: str) -> str:
    if not isinstance(value, str):
        raise ContractViolationError(
            f"{what}: expected an identifier on the AST stack, got {value!r}"
        )
    return value


class NewType(Parser):
    """Register the identifier the child just pushed as a type.

    In alias mode the AST stack holds (aliased name on top, new name
    below); the new name starts out with the aliased type's private
    classes.  A plain introduction reads the top and starts empty: a
    class's own record is completed later by :class:`ClassDef`.
    """

    def __init__(self, child: Parser, alias: bool = False):
        self.children = (child,)
        self.alias = alias

    def parse(self, ctx: ParseContext) -> ParseResult:
        r = self.children[0].parse(ctx)
        if not r.ok:
            return r
        ast = ast_stack(ctx)
        if self.alias:
            source = _expect_name(ast.at(0), "alias registration")
            name = _expect_name(ast.at(1), "alias registration")
            priv = priv_of(ctx, source)
        else:
            name = _expect_name(ast.at(0), "type registration")
            priv = ()
        ctx.state(TypeStack).push(TypeRecord(name, priv))
        return SUCCESS


class Scoped(Parser):
    """Forget the types the child introduced once it succeeds."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        types = ctx.state(TypeStack)
        size = types.size
        r = self.children[0].parse(ctx)
        if r.ok:
            types.truncate(size)
        return r


class ClassDef(Parser):
    """Complete a class definition around its body.

    At entry the AST stack holds the superclass option on top and the
    class name below it, and the TypeStack top is the class's own empty
    record.  The body runs with the superclass's private classes made
    visible; afterwards everything pushed since entry — inherited plus
    body-introduced — becomes the class's private-class list, and the
    placeholder record is replaced by the finished one.

    Inheriting from a class whose body we are inside is rejected here,
    before any state is touched.
    """

    def __init__(self, body: Parser):
        self.children = (body,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        ast = ast_stack(ctx)
        parent: Optional[str] = ast.at(0)
        if parent is not None:
            parent = _expect_name(parent, "class definition superclass")
        name = _expect_name(ast.at(1), "class definition")
        enclosing = ctx.state(EnclosingClasses)
        if parent is not None and parent in enclosing.values():
            return ctx.fail(
                ctx.position,
                f"class {name!r} cannot inherit from enclosing class {parent!r}",
            )
        types = ctx.state(TypeStack)
        snap = types.cell_snapshot()
        enclosing.push(name)
        if parent is not None:
            inherit(ctx, parent)
        r = self.children[0].parse(ctx)
        if not r.ok:
            types.cell_restore(snap)
            enclosing.pop()
            return r
        priv = types.cell_diff(snap)
        types.cell_restore(snap)
        types.pop()
        types.push(TypeRecord(name, priv))
        enclosing.pop()
        return SUCCESS


class AnonClassInherit(Parser):
    """Open a superclass's private classes for an anonymous class body.

    Zero-width; reads the superclass name one below the AST stack top (the
    argument list sits on top by the time the body starts).  No record is
    created: the anonymous class has no name to bind.
    """

    def parse(self, ctx: ParseContext) -> ParseResult:
        name = _expect_name(ast_stack(ctx).at(1), "anonymous class body")
        inherit(ctx, name)
        return SUCCESS


def new_type(child: Parser, alias: bool = False) -> Parser:
    return NewType(child, alias)


def scoped(child: Parser) -> Parser:
    return Scoped(child)


def class_def(body: Parser) -> Parser:
    return ClassDef(body)


def anon_class_inherit() -> Parser:
    return AnonClassInherit()


def _top_names_a_type(ctx: ParseContext) -> bool:
    name = _expect_name(ast_stack(ctx).peek(), "type guard")
    return is_type(ctx, name)


def class_guard(iden: Parser) -> Parser:
    """Zero-width: an identifier parses here and names a visible type.

    The identifier's AST push happens inside the lookahead and is rolled
    back along with the position.
    """
    return ahead(seq(iden, predicate(
        _top_names_a_type,
        lambda ctx: f"{ast_stack(ctx).peek()!r} does not name a type",
    )))
