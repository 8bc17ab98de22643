"""Parser for the group-spec mini-language.

    spec    := "perm:" gens | product
    product := atom (("x" | "×") atom)*
    atom    := NAME "(" INT ("," INT)* ")" | "(" product ")"
    gens    := cycles ("," cycles)*
    cycles  := ("(" INT* ")")+

Cycle points are 1-based in the text and 0-based in the result.  Error
positions are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

import re

from ..errors import InvalidParameters, PseudofreeError
from ..group.families import ARITY, Family, PermList, Product, _generators


class GroupSpecError(PseudofreeError):
    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        self.text = text
        super().__init__(f"{message} at byte {self.offset}")


class GroupSpecSyntaxError(GroupSpecError, SyntaxError):
    pass


class GroupSpecSemanticError(GroupSpecError, InvalidParameters):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<times>x(?![a-z]))|(?P<name>[A-Za-z]+)|(?P<punct>[(),:×]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise GroupSpecSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            got = tok[1] or "end of input"
            if kind == "end":
                raise GroupSpecSyntaxError(f"unexpected {got!r}", self.text, tok[2])
            raise GroupSpecSyntaxError(f"expected {value or kind!r}, found {got!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        tok = self.peek()
        if tok[0] == "name" and tok[1] == "perm":
            self.take()
            self.take("punct", ":")
            node = self.perm_list()
        else:
            node = self.product()
        self.take("end")
        return node

    def product(self):
        factors = [self.atom()]
        while True:
            tok = self.peek()
            if tok[1] in ("x", "×"):
                self.take()
                factors.append(self.atom())
            else:
                break
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def atom(self):
        tok = self.peek()
        if tok[1] == "(":
            self.take()
            node = self.product()
            self.take("punct", ")")
            return node
        if tok[0] != "name":
            raise GroupSpecSyntaxError(f"expected a group family, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        name = tok[1]
        if name not in ARITY:
            raise GroupSpecSyntaxError(f"unknown family {name!r}", self.text, tok[2])
        self.take()
        self.take("punct", "(")
        params = [int(self.take("int")[1])]
        while self.peek()[1] == ",":
            self.take()
            params.append(int(self.take("int")[1]))
        self.take("punct", ")")
        node = Family(name, tuple(params))
        if len(params) != ARITY[name]:
            raise GroupSpecSemanticError(f"{name} takes {ARITY[name]} parameter(s), got {len(params)}", self.text, tok[2])
        try:
            _generators(node)
        except InvalidParameters as exc:
            raise GroupSpecSemanticError(str(exc), self.text, tok[2]) from None
        return node

    def perm_list(self):
        gens = [self.cycles()]
        while self.peek()[1] == ",":
            self.take()
            gens.append(self.cycles())
        return PermList(tuple(gens))

    def cycles(self):
        out = []
        self.take("punct", "(")
        while True:
            cyc = []
            while self.peek()[0] == "int":
                _, val, pos = self.take()
                v = int(val)
                if v < 1:
                    raise GroupSpecSemanticError(f"cycle points are 1-based, got {v}", self.text, pos)
                cyc.append(v - 1)
            close = self.take("punct", ")")
            if len(set(cyc)) != len(cyc):
                raise GroupSpecSemanticError("repeated point inside a cycle", self.text, close[2])
            if len(cyc) > 1:
                out.append(tuple(cyc))
            if self.peek()[1] == "(":
                self.take()
                continue
            return tuple(out)


def parse_group_spec(text: str):
    """Parse a group spec into a Family, Product or PermList node.

    >>> parse_group_spec("C(2) x C(2)")
    Product(factors=(Family(name='C', params=(2,)), Family(name='C', params=(2,))))
    >>> parse_group_spec("perm: (1 2 3), (1 2)")
    PermList(generators=(((0, 1, 2),), ((0, 1),)))
    """
    return _Parser(text).parse()
