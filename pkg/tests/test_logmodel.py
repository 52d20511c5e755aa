"""Unit checks for the log-based reference model."""

import pytest

from txpeg.logmodel import (
    ModelError,
    ModelParser,
    model_apply_change,
    model_call,
    model_diff,
    model_merge,
    model_restore,
    model_snapshot,
)
from support import check_log_model_laws


def test_snapshot_is_identity():
    assert model_snapshot(()) == ()
    assert model_snapshot(("a", "b")) == ("a", "b")


def test_apply_change_appends():
    assert model_apply_change("c", ()) == ("c",)
    assert model_apply_change("c", ("a", "b")) == ("a", "b", "c")


def test_restore_returns_snapshot():
    assert model_restore((), ("a", "b")) == ()
    assert model_restore(("a",), ("a", "b", "c")) == ("a",)


def test_diff_returns_suffix():
    assert model_diff(("a",), ("a", "b", "c")) == ("b", "c")
    assert model_diff((), ("x",)) == ("x",)
    assert model_diff(("a", "b"), ("a", "b")) == ()


def test_diff_rejects_non_prefix():
    with pytest.raises(ModelError):
        model_diff(("b",), ("a", "b"))
    with pytest.raises(ModelError):
        model_diff(("a", "x"), ("a", "b", "c"))
    # A longer log is never a prefix of a shorter one.
    with pytest.raises(ModelError):
        model_diff(("a", "b", "c"), ("a", "b"))


def test_merge_appends():
    assert model_merge(("b", "c"), ("a",)) == ("a", "b", "c")
    assert model_merge((), ("a",)) == ("a",)
    # Merging onto a state other than the diff's origin still appends.
    assert model_merge(("b",), ("x", "y")) == ("x", "y", "b")


def test_round_trip_reproduces_state():
    st = ("a", "b", "c", "a")
    sn = st[:2]
    d = model_diff(sn, st)
    assert model_merge(d, model_restore(sn, st)) == st


def test_call_failure_is_noop():
    p = ModelParser(result=lambda s: False,
                    trace=lambda s: [lambda x: x + ("boom",)])
    assert model_call(p, ("a",)) == ("a",)


def test_call_empty_trace_is_identity():
    p = ModelParser(result=lambda s: True, trace=lambda s: [])
    assert model_call(p, ("a", "b")) == ("a", "b")


def test_call_folds_trace_in_order():
    p = ModelParser(
        result=lambda s: True,
        trace=lambda s: [lambda x: x + ("1",), lambda x: x + ("2",)],
    )
    assert model_call(p, ()) == ("1", "2")


def test_exhaustive_laws_small():
    # The full-size run lives in the acceptance suite; keep a smaller
    # instance here so this file stays fast on its own.
    stats = check_log_model_laws(alphabet=("a", "b"), max_len=3)
    assert stats["states"] == 15
    assert stats["checks"] > 0
