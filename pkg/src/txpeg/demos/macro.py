"""A small macro-definition language, written with no knowledge of the
indentation language, plus the grammar that composes the two.

The macro grammar is a self-contained rule map: a file is a sequence of
``macro name = <rhs>`` declarations where the right-hand side is a flat
template of words, numbers, strings, splices like ``$arg`` and
parenthesised groups.

Composition happens purely in the combined rule map.  The host grammar's
``declaration_body`` entry gains ``macro_decl`` as one more alternative,
and the macro grammar's ``macro_rhs`` extension point gains the host's
indented statement blocks.  No rule body from either side is edited; the
only new code is glue that keeps inline templates from running past the
end of their line, which matters only once lines mean something.
"""

from __future__ import annotations

from ..combinators import (
    AstNode,
    build,
    capture,
    char_pred,
    choice,
    collect,
    end_of_input,
    literal,
    node,
    not_,
    one_more,
    seq,
    until,
    whitespace,
    word,
    zero_more,
)
from ..grammar import FrozenGrammar, GrammarDef, ref
from .examply import examply_cells, examply_rules
from .indent import newline

__all__ = [
    "composed_grammar",
    "composed_rules",
    "macro_grammar",
    "macro_rules",
]


def _iden_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _iden_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def _raw_iden():
    return seq(char_pred(_iden_start, "identifier"),
               zero_more(char_pred(_iden_char, "identifier character")))


def _kw_macro():
    return seq(literal("macro"), not_(char_pred(_iden_char, "identifier character")),
               whitespace())


def _iden_token():
    return seq(not_(_kw_macro()), capture(_raw_iden()), whitespace())


def _str_node(s: str) -> AstNode:
    # The capture includes the quotes.
    return AstNode("str", (s[1:-1],))


def _string_token():
    body = zero_more(char_pred(lambda c: c not in '"\n\x00', "string character"))
    raw = seq(literal('"'), body, literal('"'))
    return seq(build(capture(raw), 1, _str_node), whitespace())


def macro_rules() -> dict:
    atom_int = seq(
        build(capture(one_more(char_pred(str.isdigit, "digit"))), 1, node("int")),
        whitespace(),
    )
    atom_word = build(_iden_token(), 1, node("word"))
    splice = build(seq(literal("$"), _iden_token()), 1, node("splice"))
    group = build(
        collect(seq(word("("), zero_more(ref("macro_atom")), word(")"))),
        1, node("group"),
    )
    return {
        "macro_file": until(ref("macro_decl"), end_of_input()),
        "macro_decl": build(
            seq(_kw_macro(), _iden_token(), word("="), ref("macro_rhs")),
            2, node("macro"),
        ),
        # Extension point: what a macro expands to.
        "macro_rhs": ref("macro_template"),
        "macro_template": build(collect(one_more(ref("macro_atom"))),
                                1, node("template")),
        "macro_atom": choice(ref("macro_splice"), ref("macro_group"),
                             atom_int, _string_token(), atom_word),
        "macro_splice": splice,
        "macro_group": group,
    }


def macro_grammar() -> FrozenGrammar:
    return GrammarDef(macro_rules(), "macro_file").freeze()


def composed_rules(host: dict = None, guest: dict = None) -> dict:
    if host is None:
        host = examply_rules()
    if guest is None:
        guest = macro_rules()
    rules = dict(host)
    for name, body in guest.items():
        rules[name] = body
    # Macro declarations become one more kind of declaration.
    rules["declaration_body"] = choice(ref("macro_decl"),
                                       host["declaration_body"])
    # A macro body may be an indented statement block instead of an
    # inline template.
    rules["macro_rhs"] = choice(ref("stmt_block"), ref("macro_template"))
    # Inline templates must stop at the end of their own line now that
    # the surrounding language is line-oriented.
    rules["macro_atom"] = seq(not_(newline()), guest["macro_atom"])
    return rules


def composed_grammar() -> FrozenGrammar:
    return GrammarDef(composed_rules(), "program",
                      cells=examply_cells()).freeze()
