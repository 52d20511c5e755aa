"""Significant-whitespace machinery: indentation tracking as parse state.

Two cells cooperate.  :class:`IndentMap` is inert, derived data: a per-line
table of indentation widths (tabs expanded to stops at multiples of 4) and
of the offset where each line's indentation ends, filled once at parse
start by the :func:`build_indent_map` parser.  :class:`IndentStack` is live
state: the indentation widths of the enclosing blocks, pushed by
:func:`indent` and popped by :func:`dedent`, and therefore restored
automatically whenever the parse backtracks out of a block.

The token layer consumes newlines as ordinary whitespace; line structure
is recovered from the map, not from the character stream.  :func:`newline`
is a zero-width check that the current position sits at the start of a
line's content (or at end of input), which is where a position lands after
crossing a line break under that whitespace convention.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from ..combinators import predicate
from ..core import SUCCESS, ParseContext, Parser, ParseResult
from ..states import InertState, StackState

__all__ = [
    "IndentEntry",
    "IndentMap",
    "IndentStack",
    "aligned",
    "build_indent_map",
    "build_indent_table",
    "dedent",
    "indent",
    "newline",
]

TAB_WIDTH = 4


@dataclass(frozen=True)
class IndentEntry:
    """One line's indentation: expanded width and where it ends."""

    count: int
    end: int


def build_indent_table(text: str, tab: int = TAB_WIDTH) -> tuple[list[IndentEntry], list[int]]:
    """Per-line indentation entries plus line start offsets.

    Splits on newline only; every other character, the position sentinel
    included, belongs to its line.  A line's count is the length of its
    space/tab prefix after expanding tabs to stops at multiples of
    ``tab``; its end is the absolute offset just past that prefix.
    """
    entries: list[IndentEntry] = []
    starts: list[int] = []
    pos = 0
    for line in text.split("\n"):
        starts.append(pos)
        i = 0
        while i < len(line) and line[i] in " \t":
            i += 1
        prefix = line[:i]
        entries.append(IndentEntry(len(prefix.expandtabs(tab)), pos + i))
        pos += len(line) + 1
    return entries, starts


class IndentMap(InertState):
    """Line-number → :class:`IndentEntry`, built once, read-only after.

    Inert on purpose: the table is a pure function of the input, so
    backtracking has nothing to undo.
    """

    def __init__(self):
        self.entries: list[IndentEntry] = []
        self._starts: list[int] = []

    def build(self, text: str, tab: int = TAB_WIDTH) -> None:
        self.entries, self._starts = build_indent_table(text, tab)

    def line_of(self, offset: int) -> int:
        return bisect_right(self._starts, offset) - 1

    def entry_at(self, offset: int) -> IndentEntry:
        return self.entries[self.line_of(offset)]


class IndentStack(StackState):
    """Indentation widths of the enclosing blocks; empty means width 0."""


def _current_count(ctx: ParseContext) -> int:
    return ctx.state(IndentMap).entry_at(ctx.position).count


class BuildIndentMap(Parser):
    """Fill the indentation map from the whole input; never moves."""

    def parse(self, ctx: ParseContext) -> ParseResult:
        ctx.state(IndentMap).build(ctx.text)
        return SUCCESS


class Indent(Parser):
    """Enter a block: the current line must be indented past the top."""

    def parse(self, ctx: ParseContext) -> ParseResult:
        new = _current_count(ctx)
        stack = ctx.state(IndentStack)
        old = stack.peek(0)
        if new > old:
            stack.push(new)
            return SUCCESS
        return ctx.fail(ctx.position,
                        lambda: f"expecting indentation > {old} positions")


class Dedent(Parser):
    """Leave a block: a shallower line, or the end of the input."""

    def parse(self, ctx: ParseContext) -> ParseResult:
        stack = ctx.state(IndentStack)
        old = stack.peek(0)
        if ctx.position >= ctx.input_length or _current_count(ctx) < old:
            stack.pop()
            return SUCCESS
        return ctx.fail(ctx.position,
                        lambda: f"expecting indentation < {old} positions")


def build_indent_map() -> Parser:
    return BuildIndentMap()


def indent() -> Parser:
    return Indent()


def dedent() -> Parser:
    return Dedent()


def _at_line_start(ctx: ParseContext) -> bool:
    if ctx.position >= ctx.input_length:
        return True
    return ctx.state(IndentMap).entry_at(ctx.position).end == ctx.position


def newline() -> Parser:
    """Zero-width check: at a line's content start or at end of input."""
    return predicate(_at_line_start, "expecting a line break")


def _is_aligned(ctx: ParseContext) -> bool:
    if ctx.position >= ctx.input_length:
        return True
    entry = ctx.state(IndentMap).entry_at(ctx.position)
    if entry.end != ctx.position:
        return False
    return entry.count == ctx.state(IndentStack).peek(0)


def aligned() -> Parser:
    """Zero-width check: at a line's content start whose width matches the
    innermost open block.

    Items of a block start aligned; anything shallower belongs to an outer
    block and anything deeper to a nested construct, so a failed deeper
    parse cannot be reinterpreted one level up.
    """
    return predicate(_is_aligned, lambda ctx: (
        f"expecting indentation = {ctx.state(IndentStack).peek(0)} positions"
    ))
