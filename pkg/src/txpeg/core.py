"""Core engine: parse results, state cells, transactions, the parse context.

A parse runs over a :class:`ParseContext` holding the input text, the
current position, and a fixed registry of mutable state cells.  Every
parser invocation is transactional: it either succeeds, or it fails having
restored the position and every cell to their values at its entry.  The
context offers the four aggregate operations that make the discipline
cheap to follow:

* :meth:`ParseContext.snapshot` captures position plus every cell,
* :meth:`ParseContext.restore` rewinds to a snapshot,
* :meth:`ParseContext.diff` packages the work done since a snapshot,
* :meth:`ParseContext.merge` replays such a package later.

Cells opt into the scheme by implementing the four corresponding cell-level
operations (:class:`StateCell`); the context simply fans out to them in
registration order, treating the position as one more piece of state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

__all__ = [
    "SENTINEL",
    "SUCCESS",
    "AggregateDelta",
    "AggregateSnapshot",
    "ConfigurationError",
    "ContractViolationError",
    "Failure",
    "ParseContext",
    "ParseResult",
    "Parser",
    "StateCell",
    "Success",
]

# One NUL is appended to the input so parsers can inspect text[position]
# without bounds checks; no other position may sit past it.
SENTINEL = "\x00"


class ContractViolationError(Exception):
    """A parser or cell broke the transactional discipline."""


class ConfigurationError(Exception):
    """A grammar or context was assembled inconsistently."""


class ParseResult:
    __slots__ = ()
    ok = False


class Success(ParseResult):
    __slots__ = ()
    ok = True

    def __repr__(self):
        return "Success"


#: The shared success result; parsers return this singleton.
SUCCESS = Success()


class Failure(ParseResult):
    """A failed invocation: where it failed plus a lazily built message.

    Messages are often interpolated from parse state; building them only
    when someone asks keeps the failure path cheap.
    """

    __slots__ = ("position", "_message")
    ok = False

    def __init__(self, position: int, message: Union[str, Callable[[], str]]):
        self.position = position
        self._message = message

    @property
    def message(self) -> str:
        if callable(self._message):
            self._message = self._message()
        return self._message

    def __repr__(self):
        return f"Failure({self.position}, {self.message!r})"


class StateCell:
    """A unit of mutable parse state.

    Subclasses hold whatever content they like and expose it through their
    own mutators; the four ``cell_*`` methods below are how the context
    rolls that content back and forth.  The contract: for any run of
    mutations, ``s = cell_snapshot(); ...mutations...; d = cell_diff(s);
    cell_restore(s); cell_merge(d)`` must leave the observable content as
    it was after the mutations (subject to each cell's documented
    ``cell_diff`` precondition).
    """

    def cell_snapshot(self):
        raise NotImplementedError

    def cell_restore(self, snapshot) -> None:
        raise NotImplementedError

    def cell_diff(self, snapshot):
        raise NotImplementedError

    def cell_merge(self, delta) -> None:
        raise NotImplementedError

    def summary(self) -> str:
        """One short token describing the content, for trace logs."""
        return type(self).__name__


@dataclass(frozen=True)
class AggregateSnapshot:
    """Position plus one snapshot per registered cell, in registry order."""

    position: int
    cells: tuple
    registry: tuple


@dataclass(frozen=True)
class AggregateDelta:
    """The work done since a snapshot: end position plus per-cell deltas."""

    end_position: int
    cells: tuple
    registry: tuple


class Parser:
    """Base class for parsers.

    A parser is an immutable description; all per-parse mutation lives in
    the context.  ``parse`` must uphold the transaction contract: return
    ``SUCCESS`` with any effects in place, or a :class:`Failure` with the
    position and every cell exactly as they were at entry.
    """

    children: tuple = ()

    def parse(self, ctx: "ParseContext") -> ParseResult:
        raise NotImplementedError

    def __repr__(self):
        return type(self).__name__


class ParseContext:
    """Everything a parse mutates: text cursor, cells, failure record.

    The cell registry is fixed at construction; cells are looked up by
    their exact class, so a grammar addresses "the indentation stack" as
    ``ctx.state(IndentStack)``.  The furthest-failure record is
    deliberately outside the transaction: backtracking must not erase the
    best diagnostic seen so far.
    """

    def __init__(self, text: str, cells: Iterable[StateCell] = (),
                 whitespace: Optional[Parser] = None,
                 trace: Optional[Callable[[str], None]] = None):
        self.text = text + SENTINEL
        self.position = 0
        self.whitespace = whitespace
        self.trace = trace
        self._cells = tuple(cells)
        self._by_type: dict[type, StateCell] = {}
        for cell in self._cells:
            t = type(cell)
            if t in self._by_type:
                raise ConfigurationError(f"duplicate state cell class {t.__name__}")
            self._by_type[t] = cell
        # Furthest failure: (position, message or factory), never restored.
        self.furthest: Optional[tuple] = None
        self._muted = 0

    @property
    def input_length(self) -> int:
        """Length of the original input, excluding the sentinel."""
        return len(self.text) - 1

    def state(self, cell_class: type) -> StateCell:
        """Return the registered cell of exactly ``cell_class``."""
        try:
            return self._by_type[cell_class]
        except KeyError:
            raise ConfigurationError(
                f"no state cell of class {cell_class.__name__} registered"
            ) from None

    # -- failure bookkeeping ------------------------------------------------

    def fail(self, position: int, message: Union[str, Callable[[], str]]) -> Failure:
        """Build a failure and fold it into the furthest-failure record."""
        if not self._muted and (self.furthest is None or position >= self.furthest[0]):
            self.furthest = (position, message)
        return Failure(position, message)

    def mute_failures(self) -> None:
        """Pause furthest-failure recording.

        Whitespace skipping and inverted predicates probe the input with
        parsers whose failures are expected, not diagnostic; recording
        them would bury the real error under scanner noise.
        """
        self._muted += 1

    def unmute_failures(self) -> None:
        self._muted -= 1

    def furthest_failure(self) -> Optional[tuple[int, str]]:
        """The deepest failure seen, as (position, message), if any."""
        if self.furthest is None:
            return None
        pos, msg = self.furthest
        return pos, msg() if callable(msg) else msg

    # -- aggregate transactions ---------------------------------------------

    def snapshot(self) -> AggregateSnapshot:
        snap = AggregateSnapshot(
            self.position,
            tuple(c.cell_snapshot() for c in self._cells),
            self._cells,
        )
        self._emit("snapshot")
        return snap

    def restore(self, snap: AggregateSnapshot) -> None:
        if snap.registry is not self._cells:
            raise ContractViolationError("snapshot belongs to a different context")
        self.position = snap.position
        for cell, s in zip(self._cells, snap.cells):
            cell.cell_restore(s)
        self._emit("restore")

    def diff(self, snap: AggregateSnapshot) -> AggregateDelta:
        if snap.registry is not self._cells:
            raise ContractViolationError("snapshot belongs to a different context")
        delta = AggregateDelta(
            self.position,
            tuple(cell.cell_diff(s) for cell, s in zip(self._cells, snap.cells)),
            self._cells,
        )
        self._emit("diff")
        return delta

    def merge(self, delta: AggregateDelta) -> None:
        if delta.registry is not self._cells:
            raise ContractViolationError("delta belongs to a different context")
        self.position = delta.end_position
        for cell, d in zip(self._cells, delta.cells):
            cell.cell_merge(d)
        self._emit("merge")

    def unchanged_since(self, snap: AggregateSnapshot) -> bool:
        """True when position and every cell still match the snapshot.

        Used by repetition combinators to detect iterations that succeed
        while doing nothing at all, which would otherwise loop forever.
        """
        if self.position != snap.position:
            return False
        return all(
            cell.cell_snapshot() == s
            for cell, s in zip(self._cells, snap.cells)
        )

    def _emit(self, op: str) -> None:
        if self.trace is not None:
            cells = " ".join(c.summary() for c in self._cells)
            self.trace(f"{op} pos={self.position}" + (f" {cells}" if cells else ""))
