"""Grammar assembly: named rules, references, freezing, and the driver.

A grammar is a mapping from rule names to parser bodies plus a root name.
Bodies refer to other rules through :func:`ref` stubs; :meth:`GrammarDef.freeze`
resolves every stub against the rule map, runs the left-recursion check,
and returns a :class:`FrozenGrammar` ready to parse.  Because composition
is nothing more than building a new rule map out of existing bodies,
grammars can be merged or extended without touching the bodies themselves.

:func:`run_parse` owns the per-parse plumbing: fresh state cells, the AST
stack and the left-recursion table, leading whitespace, and the full-match
discipline.  Its outcome carries either the final AST stack or the
furthest failure mapped to line and column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .combinators import AstStack, Whitespace
from .core import ConfigurationError, ContractViolationError, ParseContext, Parser, ParseResult
from .leftrec import LeftRecTable, check_recursion_annotated

__all__ = [
    "FrozenGrammar",
    "GrammarDef",
    "ParseError",
    "ParseOutcome",
    "RuleRef",
    "line_col",
    "ref",
    "run_parse",
]


class RuleRef(Parser):
    """A by-name reference to another rule; a stub until freeze binds it."""

    def __init__(self, name: str):
        self.name = name
        self.target: Optional[Parser] = None

    @property
    def children(self) -> tuple:
        return (self.target,) if self.target is not None else ()

    def parse(self, ctx: ParseContext) -> ParseResult:
        if self.target is None:
            raise ContractViolationError(
                f"reference to rule {self.name!r} invoked before freeze"
            )
        return self.target.parse(ctx)

    def __repr__(self):
        return f"ref({self.name!r})"


def ref(name: str) -> RuleRef:
    return RuleRef(name)


class FrozenGrammar:
    """A resolved, checked grammar; treat as immutable."""

    def __init__(self, rules: dict, root: str, whitespace: Optional[Parser],
                 cell_factories: tuple):
        self.rules = rules
        self.root = root
        self.root_parser = rules[root]
        self.whitespace = whitespace
        self.cell_factories = cell_factories


@dataclass
class GrammarDef:
    """An unfrozen grammar under construction.

    ``cells`` lists factories (usually just cell classes) for the state
    the grammar's parsers expect; each parse instantiates them fresh.
    """

    rules: dict
    root: str
    whitespace: Optional[Parser] = None
    cells: tuple = ()

    def freeze(self) -> FrozenGrammar:
        """Resolve every rule reference and validate recursion.

        Unknown rule names and unannotated left-recursive cycles are
        configuration errors.  Freezing twice is harmless: resolution is
        idempotent over the same rule map.
        """
        if self.root not in self.rules:
            raise ConfigurationError(f"root rule {self.root!r} is not defined")
        roots = list(self.rules.values())
        if self.whitespace is not None:
            roots.append(self.whitespace)
        seen: set[int] = set()
        stack = list(roots)
        while stack:
            p = stack.pop()
            if id(p) in seen:
                continue
            seen.add(id(p))
            if isinstance(p, RuleRef):
                target = self.rules.get(p.name)
                if target is None:
                    known = ", ".join(sorted(self.rules))
                    raise ConfigurationError(
                        f"unresolved reference {p.name!r} (defined rules: {known})"
                    )
                p.target = target
            stack.extend(p.children)
        check_recursion_annotated(self.rules, extra_roots=roots)
        return FrozenGrammar(dict(self.rules), self.root, self.whitespace,
                             tuple(self.cells))


@dataclass(frozen=True)
class ParseError:
    """The furthest failure, located for humans: 1-based line and column."""

    position: int
    line: int
    column: int
    message: str


@dataclass
class ParseOutcome:
    """What a driver run produced.

    On success, ``ast`` holds the final AST stack bottom first (one root
    value for conventional grammars).  On failure, ``error`` locates the
    furthest failure.  ``end_position`` is where the parse stopped.
    """

    success: bool
    ast: Optional[list] = None
    end_position: int = 0
    error: Optional[ParseError] = None


def line_col(text: str, offset: int) -> tuple[int, int]:
    """Map an offset into 1-based (line, column)."""
    line = text.count("\n", 0, offset) + 1
    col = offset - text.rfind("\n", 0, offset)
    return line, col


def run_parse(grammar: FrozenGrammar, text: str, partial: bool = False,
              trace: Optional[Callable[[str], None]] = None) -> ParseOutcome:
    """Parse ``text`` with a frozen grammar.

    Builds a context with fresh cells (adding the AST stack and the
    left-recursion table unless the grammar supplied its own), consumes
    leading whitespace, invokes the root, and unless ``partial`` demands
    that the whole input was consumed.
    """
    cells = [factory() for factory in grammar.cell_factories]
    present = {type(c) for c in cells}
    if AstStack not in present:
        cells.append(AstStack())
    if LeftRecTable not in present:
        cells.append(LeftRecTable())
    ctx = ParseContext(text, cells=cells, whitespace=grammar.whitespace,
                       trace=trace)
    Whitespace().parse(ctx)
    result = grammar.root_parser.parse(ctx)
    if result.ok and (partial or ctx.position >= ctx.input_length):
        ast = ctx.state(AstStack)
        values = ast.values()
        values.reverse()
        return ParseOutcome(True, ast=values, end_position=ctx.position)
    if result.ok:
        result = ctx.fail(ctx.position, "expected end of input")
    furthest = ctx.furthest_failure()
    if furthest is None or result.position > furthest[0]:
        position, message = result.position, result.message
    else:
        position, message = furthest
    position = min(position, ctx.input_length)
    line, col = line_col(ctx.text, position)
    return ParseOutcome(
        False,
        end_position=ctx.position,
        error=ParseError(position, line, col, message),
    )
