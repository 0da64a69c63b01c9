"""Parsing and canonical rendering of polynomials and series.

Grammar (lowercase q/p for classical symbols, uppercase Q/P for operators):

    expr     := term { ("+" | "-") term }
    term     := [ "-" ] factor { "*" factor }
    factor   := base [ "^" integer ]        negative exponents only on hbar
    base     := rational | "i" | "hbar" | var | "(" expr ")"
    var      := ("q"|"p") index  |  ("Q"|"P") index
    rational := integer [ "/" positive-integer ]

In classical text ``*`` is the pointwise product; in operator text it is
the ordered operator product and the result is brought to normal form.
"""

from __future__ import annotations

import csv
import io
import json
import re
from typing import NamedTuple

from gmpy2 import mpq

from ._poly import TermPolynomial
from .errors import StructuralError, SymcmError
from .scalars import GaussianRational, rational_str, to_rational


class ParseError(SymcmError, ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")


class FormatError(SymcmError, ValueError):
    """Requested output format does not apply to the value."""


class Token(NamedTuple):
    kind: str  # int, name, op, end
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])")
_VAR = re.compile(r"([qpQP])(\d+)$")


def tokenize(text: str) -> list:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                tokens.append(Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, cls, dof: int, upper: bool):
        self.tokens = tokenize(text)
        self.pos = 0
        self.cls = cls
        self.dof = dof
        self.var_letters = "QP" if upper else "qp"

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, expected):
        t = self.tok
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {got}", t.line, t.column, expected)

    def at_op(self, op: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == op

    def base_expected(self):
        v = self.var_letters
        return {"integer", "'i'", "'hbar'", f"'{v[0]}<index>'", f"'{v[1]}<index>'", "'('"}

    def parse(self):
        value = self.expr()
        if self.tok.kind != "end":
            self.fail({"'+'", "'-'", "'*'", "'^'", "end of input"})
        return value

    def expr(self):
        value = self.term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        negate = False
        if self.at_op("-"):
            self.advance()
            negate = True
        value = self.factor()
        while self.at_op("*"):
            self.advance()
            value = value * self.factor()
        return -value if negate else value

    def factor(self):
        is_hbar = self.tok.kind == "name" and self.tok.text == "hbar"
        value = self.base()
        if self.at_op("^"):
            self.advance()
            negative = False
            if self.at_op("-"):
                if not is_hbar:
                    self.fail({"integer"})
                self.advance()
                negative = True
            if self.tok.kind != "int":
                self.fail({"integer"} if negative or not is_hbar else {"integer", "'-'"})
            n = int(self.advance().text)
            if is_hbar:
                return self.cls.hbar(self.dof, -n if negative else n)
            return value**n
        return value

    def base(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            num = int(t.text)
            if self.at_op("/"):
                self.advance()
                d = self.tok
                if d.kind != "int" or int(d.text) == 0:
                    self.fail({"positive integer"})
                self.advance()
                return self.cls.constant(mpq(num, int(d.text)), self.dof)
            return self.cls.constant(num, self.dof)
        if t.kind == "name":
            if t.text == "i":
                self.advance()
                return self.cls.constant(GaussianRational(0, 1), self.dof)
            if t.text == "hbar":
                self.advance()
                return self.cls.hbar(self.dof)
            m = _VAR.match(t.text)
            if m and m.group(1) in self.var_letters:
                self.advance()
                index = int(m.group(2))
                if index >= self.dof:
                    raise StructuralError(
                        f"line {t.line}, column {t.column}: variable {t.text} out of range for dof={self.dof}"
                    )
                offset = 0 if m.group(1) in "qQ" else self.dof
                return self.cls.variable(offset + index, self.dof)
            self.fail(self.base_expected())
        if self.at_op("("):
            self.advance()
            value = self.expr()
            if not self.at_op(")"):
                self.fail({"')'", "'+'", "'-'", "'*'"})
            self.advance()
            return value
        self.fail(self.base_expected())


def parse_classical(text: str, dof: int = 1):
    from .phase import PhasePolynomial

    return _Parser(text, PhasePolynomial, dof, upper=False).parse()


def parse_operator(text: str, dof: int = 1):
    from .operators import OperatorPolynomial

    return _Parser(text, OperatorPolynomial, dof, upper=True).parse()


# -- rendering ----------------------------------------------------------------


def _term_text(exps, k, re_, im, letters) -> tuple:
    n = len(exps) // 2
    factors = []
    if k == 1:
        factors.append("hbar")
    elif k != 0:
        factors.append(f"hbar^{k}")
    for j, e in enumerate(exps):
        if e:
            name = f"{letters[0] if j < n else letters[1]}{j % n}"
            factors.append(name if e == 1 else f"{name}^{e}")
    if im == 0:
        sign, mag = ("-" if re_ < 0 else "+"), abs(re_)
        coef = "" if mag == 1 and factors else rational_str(mag)
    elif re_ == 0:
        sign, mag = ("-" if im < 0 else "+"), abs(im)
        coef = "i" if mag == 1 else f"{rational_str(mag)}*i"
    else:
        sign = "+"
        coef = f"({GaussianRational._from_pair((re_, im))})"
    body = "*".join([coef] + factors if coef else factors)
    return sign, body


def render_text(poly: TermPolynomial) -> str:
    items = poly.raw_items()
    if not items:
        return "0"
    out = []
    for idx, ((exps, k), (re_, im)) in enumerate(items):
        sign, body = _term_text(exps, k, re_, im, poly.letters)
        if idx == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def to_json_obj(poly: TermPolynomial) -> dict:
    n = poly.dof
    return {
        "dof": n,
        "terms": [
            {
                "q": list(exps[:n]),
                "p": list(exps[n:]),
                "hbar": k,
                "re": rational_str(re_),
                "im": rational_str(im),
            }
            for (exps, k), (re_, im) in poly.raw_items()
        ],
    }


def from_json_obj(obj: dict, cls):
    dof = int(obj["dof"])
    terms = {}
    for t in obj["terms"]:
        key = (tuple(t["q"]) + tuple(t["p"]), int(t["hbar"]))
        if key in terms:
            raise ValueError(f"duplicate term {key}")
        terms[key] = GaussianRational(to_rational(t["re"]), to_rational(t["im"]))
    return cls(dof, terms)


def series_to_json_obj(series) -> dict:
    return {
        "dof": series.dof,
        "order": series.order,
        "coefficients": [to_json_obj(c) for c in series.coefficients],
    }


def series_to_csv(series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "term_index", "q_exps", "p_exps", "hbar_pow", "re", "im"])
    n = series.dof
    for order, coeff in enumerate(series.coefficients):
        for idx, ((exps, k), (re_, im)) in enumerate(coeff.raw_items()):
            w.writerow([
                order,
                idx,
                " ".join(map(str, exps[:n])),
                " ".join(map(str, exps[n:])),
                k,
                rational_str(re_),
                rational_str(im),
            ])
    return buf.getvalue()


def trajectory_to_csv(rows) -> str:
    """Rows of (t, moyal_value, poisson_value)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "moyal_value", "poisson_value"])
    for t, a, b in rows:
        w.writerow([rational_str(t), str(a), str(b)])
    return buf.getvalue()


def render(value, fmt: str = "text") -> str:
    """Deterministic rendering of a polynomial or series in text, json or csv."""
    from .series import EvolutionSeries

    if fmt not in ("text", "json", "csv"):
        raise FormatError(f"unknown format {fmt!r}")
    if isinstance(value, EvolutionSeries):
        if fmt == "csv":
            return series_to_csv(value)
        if fmt == "json":
            return json.dumps(series_to_json_obj(value), indent=2) + "\n"
        return "".join(f"t^{n}: {render_text(c)}\n" for n, c in enumerate(value.coefficients))
    if isinstance(value, TermPolynomial):
        if fmt == "csv":
            raise FormatError("csv output is only defined for series")
        if fmt == "json":
            return json.dumps(to_json_obj(value), indent=2) + "\n"
        return render_text(value) + "\n"
    if isinstance(value, GaussianRational):
        if fmt == "csv":
            raise FormatError("csv output is only defined for series")
        if fmt == "json":
            return json.dumps({"re": rational_str(value.re), "im": rational_str(value.im)}) + "\n"
        return f"{value}\n"
    raise FormatError(f"cannot render {type(value).__name__}")
