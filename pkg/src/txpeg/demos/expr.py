"""Left-associative subtraction over integers.

The natural way to write left-associative syntax is a rule whose first
step is itself.  That is rejected by default; annotating the rule lifts
the restriction and the seed-growing evaluation produces trees that lean
left, so "1-2-3" means (1-2)-3.
"""

from __future__ import annotations

from ..combinators import (
    build,
    capture,
    char_pred,
    choice,
    node,
    one_more,
    seq,
    whitespace,
    word,
)
from ..grammar import FrozenGrammar, GrammarDef, ref
from ..leftrec import leftrec

__all__ = ["expr_grammar", "expr_rules"]


def expr_rules() -> dict:
    number = seq(
        build(capture(one_more(char_pred(str.isdigit, "digit"))), 1, node("num")),
        whitespace(),
    )
    return {
        "expression": leftrec(choice(
            build(seq(ref("expression"), word("-"), ref("number")), 2, node("sub")),
            ref("number"),
        )),
        "number": number,
    }


def expr_grammar() -> FrozenGrammar:
    return GrammarDef(expr_rules(), "expression").freeze()
