"""Reference model of transactional state, used by the test suite.

The model represents parse state as an append-only log of opaque change
labels.  A state is simply the tuple of every change applied so far, a
snapshot is the state itself, and a delta is a suffix of the log.  The four
transactional operations then have one-line definitions whose algebra is
easy to check exhaustively:

* ``model_snapshot`` is the identity,
* ``model_restore`` returns the snapshot,
* ``model_diff`` chops a known prefix off the log,
* ``model_merge`` appends a delta.

Real state cells are compared against this model: driving a cell and the
log with the same change sequence must leave both observably equivalent.
The model is deliberately inefficient; it exists to be obviously correct,
not to be fast.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

__all__ = [
    "LogState",
    "ModelError",
    "ModelParser",
    "compose_two",
    "model_apply_change",
    "model_call",
    "model_diff",
    "model_merge",
    "model_restore",
    "model_snapshot",
    "reduce_n",
]

# A state is a tuple of opaque, hashable change labels.
LogState = tuple

Transform = Callable[[LogState], LogState]


class ModelError(Exception):
    """A model operation was applied outside its stated precondition."""


def model_snapshot(state: LogState) -> LogState:
    """Return a snapshot of ``state``; in the log model, the state itself."""
    return state


def model_apply_change(change, state: LogState) -> LogState:
    """Append one change to the log."""
    return state + (change,)


def model_restore(snapshot: LogState, state: LogState) -> LogState:
    """Rewind to ``snapshot``, discarding everything applied after it."""
    return snapshot


def model_diff(snapshot: LogState, state: LogState) -> LogState:
    """Return the changes applied since ``snapshot``.

    ``snapshot`` must be a prefix of ``state``; a snapshot that the current
    log did not grow out of has no meaningful difference and raises
    :class:`ModelError`.
    """
    n = len(snapshot)
    if state[:n] != snapshot:
        raise ModelError("snapshot is not a prefix of the current state")
    return state[n:]


def model_merge(delta: LogState, state: LogState) -> LogState:
    """Replay ``delta`` on top of ``state`` by appending it to the log."""
    return state + delta


def compose_two(f: Transform, g: Transform) -> Transform:
    """Compose two state transforms, applying ``f`` first."""
    return lambda state: g(f(state))


def reduce_n(transforms: Iterable[Transform]) -> Transform:
    """Fold transforms into one, left to right; identity when empty."""
    acc: Transform = lambda state: state
    for t in transforms:
        acc = compose_two(acc, t)
    return acc


class ModelParser:
    """A parser as the model sees it: a verdict plus a trace of transforms.

    ``result`` maps a state to a boolean verdict; ``trace`` maps a state to
    the sequence of state transforms the parser would perform from there.
    """

    def __init__(self, result: Callable[[LogState], bool],
                 trace: Callable[[LogState], Sequence[Transform]]):
        self.result = result
        self.trace = trace


def model_call(parser: ModelParser, state: LogState) -> LogState:
    """Invoke ``parser`` on ``state``.

    A successful invocation applies the parser's whole trace, composed left
    to right; a failed one leaves the state exactly as it was.
    """
    if not parser.result(state):
        return state
    return reduce_n(parser.trace(state))(state)
