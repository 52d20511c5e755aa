"""Parsing expression combinators over the transactional context.

Every combinator honors one contract: succeed with its effects in place,
or fail with the position and every state cell exactly as they were at
entry.  Sequences snapshot and restore; alternatives need nothing extra
because their children already clean up after themselves; lookahead
restores even on success.  Custom parsers written against the same
contract compose freely with everything here.

AST construction is parse state like any other: matched text, nodes and
collected lists live on a dedicated stack cell (:class:`AstStack`), so
speculative parses that fail drop their half-built output for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Union

from .core import (
    SUCCESS,
    ContractViolationError,
    Failure,
    ParseContext,
    ParseResult,
    Parser,
)
from .states import MonotonicStack

__all__ = [
    "AstNode",
    "AstStack",
    "Ahead",
    "AndDo",
    "Build",
    "Capture",
    "CharPred",
    "Choice",
    "Collect",
    "EndOfInput",
    "Literal",
    "Not",
    "OneMore",
    "Opt",
    "OptValue",
    "Perform",
    "Predicate",
    "Seq",
    "Until",
    "Whitespace",
    "Word",
    "ZeroMore",
    "ahead",
    "and_do",
    "ast_stack",
    "build",
    "capture",
    "char_pred",
    "choice",
    "collect",
    "end_of_input",
    "literal",
    "node",
    "not_",
    "one_more",
    "opt",
    "opt_value",
    "perform",
    "predicate",
    "seq",
    "success_after",
    "until",
    "whitespace",
    "word",
    "zero_more",
]


@dataclass
class AstNode:
    """A syntax tree node: a kind tag, child values, and a text span.

    Children may be nodes, strings, lists or None; ``span`` is the
    half-open [start, end) range of input the node was built from.
    """

    kind: str
    children: tuple = ()
    span: Optional[tuple] = None


class AstStack(MonotonicStack):
    """The conventional cell for AST output.

    Parsers push onto it and only ever pop what they pushed themselves,
    which keeps its diffs graftable: exactly what left recursion and
    memoizing features need to replay build effects.
    """


def ast_stack(ctx: ParseContext) -> AstStack:
    """The context's AST stack cell."""
    return ctx.state(AstStack)


def node(kind: str) -> Callable[..., AstNode]:
    """A ``make`` function for :func:`build`: wraps values in a node."""
    return lambda *values: AstNode(kind, values)


# ---------------------------------------------------------------------------
# Sequencing and alternation.


class Seq(Parser):
    """Children in order; one failure rewinds the whole sequence."""

    def __init__(self, *children: Parser):
        self.children = children

    def parse(self, ctx: ParseContext) -> ParseResult:
        snap = ctx.snapshot()
        for child in self.children:
            r = child.parse(ctx)
            if not r.ok:
                ctx.restore(snap)
                return r
        return SUCCESS


class Choice(Parser):
    """First succeeding child wins; no cleanup needed between attempts,
    failed children have already undone their own work."""

    def __init__(self, *children: Parser):
        self.children = children

    def parse(self, ctx: ParseContext) -> ParseResult:
        for child in self.children:
            r = child.parse(ctx)
            if r.ok:
                return r
        return ctx.fail(ctx.position, "no alternative matched")


class Opt(Parser):
    """Try the child; succeed either way."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        self.children[0].parse(ctx)
        return SUCCESS


def _guard_progress(ctx: ParseContext, snap, parser: Parser) -> None:
    # A repetition step that succeeds while moving nothing would loop
    # forever; surface it as a broken contract rather than hanging.
    if ctx.unchanged_since(snap):
        raise ContractViolationError(
            f"{parser!r} iteration succeeded without consuming input "
            f"or changing state at position {ctx.position}"
        )


class ZeroMore(Parser):
    """Repeat the child until it fails; always succeeds."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        child = self.children[0]
        while True:
            snap = ctx.snapshot()
            if not child.parse(ctx).ok:
                return SUCCESS
            _guard_progress(ctx, snap, self)


class OneMore(Parser):
    """Like :class:`ZeroMore` but the first iteration must succeed."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        child = self.children[0]
        snap = ctx.snapshot()
        r = child.parse(ctx)
        if not r.ok:
            return r
        _guard_progress(ctx, snap, self)
        while True:
            snap = ctx.snapshot()
            if not child.parse(ctx).ok:
                return SUCCESS
            _guard_progress(ctx, snap, self)


class Until(Parser):
    """Repeat ``item`` until ``terminator`` matches.

    The terminator is tried first on every iteration and its effects are
    kept when it matches.  If the item fails before the terminator is
    seen, the whole parser fails and rewinds everything, matched items
    included.
    """

    def __init__(self, item: Parser, terminator: Parser):
        self.children = (item, terminator)

    def parse(self, ctx: ParseContext) -> ParseResult:
        item, terminator = self.children
        entry = ctx.snapshot()
        while True:
            if terminator.parse(ctx).ok:
                return SUCCESS
            snap = ctx.snapshot()
            r = item.parse(ctx)
            if not r.ok:
                ctx.restore(entry)
                return r
            _guard_progress(ctx, snap, self)


# ---------------------------------------------------------------------------
# Lookahead.


class Ahead(Parser):
    """Succeed iff the child would, consuming nothing and keeping no
    state changes either way."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        snap = ctx.snapshot()
        r = self.children[0].parse(ctx)
        if r.ok:
            ctx.restore(snap)
            return SUCCESS
        return r


class Not(Parser):
    """Succeed iff the child fails; state-neutral in both directions."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        snap = ctx.snapshot()
        # The child's failures are this parser's successes; keep them out
        # of the diagnostic record.
        ctx.mute_failures()
        try:
            r = self.children[0].parse(ctx)
        finally:
            ctx.unmute_failures()
        if not r.ok:
            return SUCCESS
        ctx.restore(snap)
        child = self.children[0]
        return ctx.fail(ctx.position, lambda: f"unexpected {child!r}")


# ---------------------------------------------------------------------------
# Terminals.


class CharPred(Parser):
    """Match one character satisfying a predicate.

    The appended NUL sentinel is passed to the predicate like any other
    character; the usual character classes reject it, so only a predicate
    written to accept NUL can match at end of input.
    """

    def __init__(self, pred: Callable[[str], bool], label: Optional[str] = None):
        self.pred = pred
        self.label = label

    def parse(self, ctx: ParseContext) -> ParseResult:
        pos = ctx.position
        if pos < len(ctx.text) and self.pred(ctx.text[pos]):
            ctx.position = pos + 1
            return SUCCESS
        return ctx.fail(pos, lambda: f"expected {self!r}")

    def __repr__(self):
        return self.label if self.label else "char_pred"


class Literal(Parser):
    """Match an exact string."""

    def __init__(self, string: str):
        self.string = string

    def parse(self, ctx: ParseContext) -> ParseResult:
        pos = ctx.position
        if ctx.text.startswith(self.string, pos):
            ctx.position = pos + len(self.string)
            return SUCCESS
        return ctx.fail(pos, lambda: f"expected {self.string!r}")

    def __repr__(self):
        return f"literal({self.string!r})"


#: Whitespace skipped after tokens unless a grammar supplies its own.
DEFAULT_WHITESPACE: Parser


class Whitespace(Parser):
    """Invoke the parse-wide whitespace parser (or the default).

    Whitespace is expected to always succeed; a failing custom whitespace
    parser is treated as matching nothing.
    """

    def parse(self, ctx: ParseContext) -> ParseResult:
        ws = ctx.whitespace if ctx.whitespace is not None else DEFAULT_WHITESPACE
        # Scanner probing is not diagnostic; it must not claim the
        # furthest-failure record.
        ctx.mute_failures()
        try:
            ws.parse(ctx)
        finally:
            ctx.unmute_failures()
        return SUCCESS


class EndOfInput(Parser):
    """Succeed exactly at the end of the input, consuming nothing."""

    def parse(self, ctx: ParseContext) -> ParseResult:
        if ctx.position >= ctx.input_length:
            return SUCCESS
        return ctx.fail(ctx.position, "expected end of input")


class Word(Parser):
    """Match a literal, then skip trailing whitespace: a token."""

    def __init__(self, string: str):
        self.string = string

    def parse(self, ctx: ParseContext) -> ParseResult:
        pos = ctx.position
        if not ctx.text.startswith(self.string, pos):
            return ctx.fail(pos, lambda: f"expected {self.string!r}")
        ctx.position = pos + len(self.string)
        ws = ctx.whitespace if ctx.whitespace is not None else DEFAULT_WHITESPACE
        ws.parse(ctx)
        return SUCCESS

    def __repr__(self):
        return f"word({self.string!r})"


# ---------------------------------------------------------------------------
# Semantic actions and conditions.


class Predicate(Parser):
    """Succeed iff a condition on the context holds; consumes nothing.

    ``message`` may be a string or a function of the context, called only
    on failure, while the state that produced the verdict is still in
    place.
    """

    def __init__(self, cond: Callable[[ParseContext], bool],
                 message: Union[str, Callable[[ParseContext], str]] = "condition not met"):
        self.cond = cond
        self.message = message

    def parse(self, ctx: ParseContext) -> ParseResult:
        if self.cond(ctx):
            return SUCCESS
        msg = self.message(ctx) if callable(self.message) else self.message
        return ctx.fail(ctx.position, msg)


class Perform(Parser):
    """Run a state-mutating effect and succeed."""

    def __init__(self, effect: Callable[[ParseContext], Any]):
        self.effect = effect

    def parse(self, ctx: ParseContext) -> ParseResult:
        self.effect(ctx)
        return SUCCESS


class AndDo(Parser):
    """Run the child; on success, apply an effect as well."""

    def __init__(self, child: Parser, effect: Callable[[ParseContext], Any]):
        self.children = (child,)
        self.effect = effect

    def parse(self, ctx: ParseContext) -> ParseResult:
        r = self.children[0].parse(ctx)
        if not r.ok:
            return r
        self.effect(ctx)
        return SUCCESS


# ---------------------------------------------------------------------------
# AST building.


class Capture(Parser):
    """Run the child; on success push the matched slice of input."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        start = ctx.position
        r = self.children[0].parse(ctx)
        if not r.ok:
            return r
        ast_stack(ctx).push(ctx.text[start:ctx.position])
        return SUCCESS


class Collect(Parser):
    """Gather everything the child pushed into one list, oldest first."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        ast = ast_stack(ctx)
        depth = ast.size
        r = self.children[0].parse(ctx)
        if not r.ok:
            return r
        ast.push(ast.take_above(depth))
        return SUCCESS


class Build(Parser):
    """Pop a fixed number of values and push one node built from them.

    ``make`` receives the values in the order they were pushed; the node's
    span covers the child's whole match.  Popping more than the child
    pushed would steal someone else's output, so that raises.
    """

    def __init__(self, child: Parser, arity: int, make: Callable[..., AstNode]):
        self.children = (child,)
        self.arity = arity
        self.make = make

    def parse(self, ctx: ParseContext) -> ParseResult:
        ast = ast_stack(ctx)
        start = ctx.position
        depth = ast.size
        r = self.children[0].parse(ctx)
        if not r.ok:
            return r
        if ast.size - depth < self.arity:
            raise ContractViolationError(
                f"build needs {self.arity} values but the child pushed {ast.size - depth}"
            )
        values = ast.take_above(ast.size - self.arity)
        made = self.make(*values)
        if isinstance(made, AstNode) and made.span is None:
            made.span = (start, ctx.position)
        ast.push(made)
        return SUCCESS


class OptValue(Parser):
    """An option on the AST stack: the child's one value, or None.

    The child must push exactly one value when it succeeds; when it fails,
    None is pushed in its place and the whole parser still succeeds, so a
    consumer downstream can rely on the stack depth.
    """

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        ast = ast_stack(ctx)
        depth = ast.size
        if self.children[0].parse(ctx).ok:
            if ast.size != depth + 1:
                raise ContractViolationError(
                    "opt_value child must push exactly one value"
                )
            return SUCCESS
        ast.push(None)
        return SUCCESS


# ---------------------------------------------------------------------------
# Factory surface.  Grammars read better built from functions.


def seq(*children: Parser) -> Parser:
    return Seq(*children)


def choice(*children: Parser) -> Parser:
    return Choice(*children)


def opt(child: Parser) -> Parser:
    return Opt(child)


def zero_more(child: Parser) -> Parser:
    return ZeroMore(child)


def one_more(child: Parser) -> Parser:
    return OneMore(child)


def until(item: Parser, terminator: Parser) -> Parser:
    return Until(item, terminator)


def ahead(child: Parser) -> Parser:
    return Ahead(child)


def not_(child: Parser) -> Parser:
    return Not(child)


def char_pred(pred: Callable[[str], bool], label: Optional[str] = None) -> Parser:
    return CharPred(pred, label)


def literal(string: str) -> Parser:
    return Literal(string)


def word(string: str) -> Parser:
    return Word(string)


def end_of_input() -> Parser:
    return EndOfInput()


def whitespace() -> Parser:
    return Whitespace()


def predicate(cond, message="condition not met") -> Parser:
    return Predicate(cond, message)


def perform(effect) -> Parser:
    return Perform(effect)


def success_after(effect) -> Parser:
    """Alias of :func:`perform`: run an effect and report success."""
    return Perform(effect)


def and_do(child: Parser, effect) -> Parser:
    return AndDo(child, effect)


def capture(child: Parser) -> Parser:
    return Capture(child)


def collect(child: Parser) -> Parser:
    return Collect(child)


def build(child: Parser, arity: int, make) -> Parser:
    return Build(child, arity, make)


def opt_value(child: Parser) -> Parser:
    return OptValue(child)


DEFAULT_WHITESPACE = ZeroMore(CharPred(str.isspace, "whitespace"))
