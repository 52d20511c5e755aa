"""Left recursion by seed growing, on top of the transaction machinery.

A :class:`LeftRec` wrapper runs its body once with recursive re-entry
blocked to obtain a seed: the aggregate delta from its entry to the end of
that run.  It then re-runs the body repeatedly, letting each left-recursive
re-entry consume the current seed (merge the delta, jump to its end), and
keeps the run as the new seed while the end position still grows.  Seeds
are ordinary aggregate deltas, so AST effects replay along with the
position, and they live in a map cell keyed by (parser, position), which
means backtracking rolls the bookkeeping back like any other state.

The companion :func:`check_recursion_annotated` runs at grammar freeze:
any cycle of invocations that can come back to the same parser at the same
input position must pass through a :class:`LeftRec` node, otherwise the
grammar would recurse without bound and is rejected with the offending
cycle named.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .combinators import (
    Ahead,
    AndDo,
    Build,
    Capture,
    CharPred,
    Choice,
    Collect,
    Literal,
    Not,
    OneMore,
    Opt,
    OptValue,
    Perform,
    Predicate,
    Seq,
    Until,
    Whitespace,
    Word,
    ZeroMore,
)
from .core import (
    SUCCESS,
    ConfigurationError,
    Failure,
    ParseContext,
    ParseResult,
    Parser,
)
from .states import MapState

__all__ = [
    "LeftRec",
    "LeftRecTable",
    "check_recursion_annotated",
    "leftrec",
]


class LeftRecTable(MapState):
    """Per-parse table of in-flight left-recursive invocations.

    Maps (parser id, position) to either the blocked marker or the current
    seed delta.  Being an ordinary map cell, entries are snapshot and
    restored together with everything else.
    """


_BLOCKED = object()


class LeftRec(Parser):
    """Allow the wrapped parser to invoke itself at its own position."""

    def __init__(self, child: Parser):
        self.children = (child,)

    def parse(self, ctx: ParseContext) -> ParseResult:
        table = ctx.state(LeftRecTable)
        key = (id(self), ctx.position)
        entry = table.get(key)
        if entry is not None:
            if entry is _BLOCKED:
                # Deliberate control flow, not a diagnosable user error:
                # bypass the furthest-failure record.
                return Failure(ctx.position, "left-recursive invocation blocked")
            ctx.merge(entry)
            return SUCCESS

        body = self.children[0]
        entry_snap = ctx.snapshot()
        table.put(key, _BLOCKED)
        r = body.parse(ctx)
        if not r.ok:
            table.remove(key)
            return r
        best = ctx.diff(entry_snap)
        while True:
            ctx.restore(entry_snap)
            table.put(key, best)
            if not body.parse(ctx).ok:
                break
            grown = ctx.diff(entry_snap)
            if grown.end_position > best.end_position:
                best = grown
            else:
                break
        ctx.restore(entry_snap)
        ctx.merge(best)
        table.remove(key)
        return SUCCESS


def leftrec(child: Parser) -> Parser:
    return LeftRec(child)


# ---------------------------------------------------------------------------
# Freeze-time check.
#
# The dangerous graph is not every reference cycle: a parser that calls
# itself only after consuming input unwinds fine.  What must not exist is a
# cycle in the left-call graph, whose edges connect a parser to the
# children it can invoke at its own entry position.  Sequences contribute
# edges up to and including their first non-nullable element; alternation
# contributes all branches; repetition, lookahead and the wrappers
# contribute their bodies.  LeftRec nodes are excised before looking for
# cycles, which is exactly what "annotated" means.

_ZERO_WIDTH = (Opt, ZeroMore, Ahead, Not, Predicate, Perform, Whitespace, OptValue)


def _all_nodes(roots: Iterable[Parser]) -> list[Parser]:
    seen: dict[int, Parser] = {}
    stack = list(roots)
    while stack:
        p = stack.pop()
        if p is None or id(p) in seen:
            continue
        seen[id(p)] = p
        stack.extend(p.children)
    return list(seen.values())


def _nullability(nodes: list[Parser]) -> dict[int, bool]:
    # Least fixpoint: start from "consumes input" everywhere and grow.
    nullable = {id(p): False for p in nodes}

    def evaluate(p: Parser) -> bool:
        if isinstance(p, _ZERO_WIDTH):
            return True
        if isinstance(p, (Literal, Word)):
            return p.string == ""
        if isinstance(p, CharPred):
            return False
        if isinstance(p, Seq):
            return all(nullable[id(c)] for c in p.children)
        if isinstance(p, Choice):
            return any(nullable[id(c)] for c in p.children)
        if isinstance(p, Until):
            return nullable[id(p.children[1])]
        if isinstance(p, (OneMore, AndDo, Capture, Collect, Build, LeftRec)):
            return nullable[id(p.children[0])]
        # Unknown parser classes: zero-width when childless, otherwise
        # assume they can pass any child through unconsumed.
        if not p.children:
            return True
        return any(nullable[id(c)] for c in p.children)

    changed = True
    while changed:
        changed = False
        for p in nodes:
            v = evaluate(p)
            if v and not nullable[id(p)]:
                nullable[id(p)] = True
                changed = True
    return nullable


def _left_children(p: Parser, nullable: dict[int, bool]) -> tuple:
    if isinstance(p, Seq):
        out = []
        for c in p.children:
            out.append(c)
            if not nullable[id(c)]:
                break
        return tuple(out)
    # Everything else can invoke each child at its entry position.
    return p.children


def check_recursion_annotated(rules: dict[str, Parser],
                              extra_roots: Iterable[Parser] = ()) -> None:
    """Reject grammars whose left-call graph cycles outside LeftRec.

    ``rules`` maps names to resolved rule bodies; names appear in the
    error message when a cycle is found.
    """
    roots = list(rules.values()) + list(extra_roots)
    nodes = _all_nodes(roots)
    nullable = _nullability(nodes)
    names = {}
    for name, body in rules.items():
        names.setdefault(id(body), name)

    def describe(path: list[Parser]) -> str:
        parts = [names.get(id(p), repr(p)) for p in path]
        compact = [parts[0]]
        for part in parts[1:]:
            if part != compact[-1]:
                compact.append(part)
        return " -> ".join(compact)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {id(p): WHITE for p in nodes}
    for start in nodes:
        if color[id(start)] != WHITE or isinstance(start, LeftRec):
            continue
        # Iterative DFS keeping the gray path for cycle reporting.
        stack: list[tuple[Parser, Iterable]] = [
            (start, iter(_left_children(start, nullable)))
        ]
        color[id(start)] = GRAY
        path = [start]
        while stack:
            parent, children = stack[-1]
            advanced = False
            for child in children:
                if isinstance(child, LeftRec):
                    continue
                c = color[id(child)]
                if c == GRAY:
                    cycle = path[path.index(child):] + [child]
                    raise ConfigurationError(
                        "left-recursive cycle without a leftrec annotation: "
                        + describe(cycle)
                    )
                if c == WHITE:
                    color[id(child)] = GRAY
                    path.append(child)
                    stack.append((child, iter(_left_children(child, nullable))))
                    advanced = True
                    break
            if not advanced:
                color[id(parent)] = BLACK
                path.pop()
                stack.pop()
