"""Demonstration grammars built on the library.

``indent`` and ``namespaces`` hold the reusable context-sensitive
machinery (significant whitespace, parse-time type tracking); ``examply``
assembles them into a small language; ``smoke`` carries the classic
context-sensitivity micro-grammars; ``expr`` shows left recursion;
``macro`` is an independent mini-grammar used to demonstrate composition.
"""
