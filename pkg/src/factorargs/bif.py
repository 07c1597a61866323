"""Reader and writer for the discrete subset of the BIF 0.3 format.

Covers the dialect used by the bnlearn repository: a ``network`` block,
``variable`` blocks with ``type discrete``, and ``probability`` blocks with
either a flat ``table`` or one entry row per parent configuration.  Flat
tables list the child's states slowest (one block of parent configurations
per child state), matching the common reader convention.

One extension: names may be double-quoted, which allows display names with
spaces ("XRay Result").  Unquoted names parse exactly as in standard files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import BifParseError, ValidationError
from .factors import Factor, Variable
from .network import BayesianNetwork

_WORD = re.compile(r"[A-Za-z0-9_\.\+%&/-]+")
_PUNCT = set("{}()[]|,;=")


@dataclass
class _Token:
    text: str
    kind: str  # "word" | "string" | "punct"
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            end = text.find("\n", i)
            i = n if end < 0 else end
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise BifParseError("unterminated comment", line, col)
            skipped = text[i : end + 2]
            line += skipped.count("\n")
            col = 1 if "\n" in skipped else col + len(skipped)
            i = end + 2
            continue
        if ch == '"':
            end = text.find('"', i + 1)
            if end < 0 or "\n" in text[i:end]:
                raise BifParseError("unterminated string", line, col)
            tokens.append(_Token(text[i + 1 : end], "string", line, col))
            col += end + 1 - i
            i = end + 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, "punct", line, col))
            i += 1
            col += 1
            continue
        m = _WORD.match(text, i)
        if not m:
            raise BifParseError(f"unexpected character {ch!r}", line, col)
        tokens.append(_Token(m.group(), "word", line, col))
        col += m.end() - i
        i = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def _err(self, msg: str) -> BifParseError:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            return BifParseError(msg, t.line, t.col)
        last = self.tokens[-1] if self.tokens else None
        return BifParseError(
            f"{msg} (unexpected end of input)",
            last.line if last else 1,
            last.col if last else 1,
        )

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise self._err("expected a token")
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == "string":
            raise BifParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def name(self) -> str:
        tok = self.next()
        if tok.kind == "punct":
            raise BifParseError(f"expected a name, found {tok.text!r}", tok.line, tok.col)
        return tok.text

    def number(self) -> float:
        tok = self.next()
        try:
            return float(tok.text)
        except ValueError:
            raise BifParseError(f"expected a number, found {tok.text!r}", tok.line, tok.col) from None

    def skip_block(self) -> None:
        """Skip a balanced { ... } block (network properties etc.)."""
        self.expect("{")
        depth = 1
        while depth:
            tok = self.next()
            if tok.text == "{" and tok.kind == "punct":
                depth += 1
            elif tok.text == "}" and tok.kind == "punct":
                depth -= 1

    def skip_statement(self) -> None:
        """Skip tokens through the next ';' (property statements)."""
        while True:
            tok = self.next()
            if tok.kind == "punct" and tok.text == ";":
                return


def parse_bif(text: str) -> BayesianNetwork:
    """Parse a BIF document into a validated network.

    Variable and state order are preserved from the file.  Raises
    :class:`BifParseError` with source position on syntax errors, and
    :class:`ValidationError` describing the offending block on semantic ones.
    """
    p = _Parser(_tokenize(text))
    net_name = "unknown"
    variables: list[Variable] = []
    by_name: dict[str, Variable] = {}
    cpt_specs: list[tuple[str, list[str], _Token, dict | list]] = []

    while p.peek() is not None:
        tok = p.next()
        if tok.kind == "word" and tok.text == "network":
            nm = p.peek()
            if nm is not None and nm.kind != "punct":
                net_name = p.name()
            else:
                while p.peek() is not None and p.peek().text != "{":
                    p.next()
            p.skip_block()
        elif tok.kind == "word" and tok.text == "variable":
            var_tok = p.peek()
            vname = p.name()
            if vname in by_name:
                raise BifParseError(f"variable {vname!r} declared twice", var_tok.line, var_tok.col)
            p.expect("{")
            states: list[str] | None = None
            while True:
                inner = p.next()
                if inner.kind == "punct" and inner.text == "}":
                    break
                if inner.kind == "word" and inner.text == "type":
                    kind = p.name()
                    if kind != "discrete":
                        raise BifParseError(
                            f"unsupported variable type {kind!r}", inner.line, inner.col
                        )
                    p.expect("[")
                    count = int(p.number())
                    p.expect("]")
                    p.expect("{")
                    states = []
                    while True:
                        tok2 = p.next()
                        if tok2.kind == "punct" and tok2.text == "}":
                            break
                        if tok2.kind == "punct" and tok2.text == ",":
                            continue
                        states.append(tok2.text)
                    p.expect(";")
                    if len(states) != count:
                        raise BifParseError(
                            f"variable {vname!r} declares {count} states but lists {len(states)}",
                            inner.line,
                            inner.col,
                        )
                elif inner.kind == "word" and inner.text == "property":
                    p.skip_statement()
                else:
                    raise BifParseError(
                        f"unexpected token {inner.text!r} in variable block",
                        inner.line,
                        inner.col,
                    )
            if states is None:
                raise BifParseError(f"variable {vname!r} has no type declaration", var_tok.line, var_tok.col)
            try:
                var = Variable(vname, tuple(states))
            except ValidationError as exc:
                raise BifParseError(str(exc), var_tok.line, var_tok.col) from None
            variables.append(var)
            by_name[vname] = var
        elif tok.kind == "word" and tok.text == "probability":
            p.expect("(")
            head_tok = p.peek()
            child = p.name()
            parents: list[str] = []
            tok2 = p.next()
            if tok2.text == "|" and tok2.kind == "punct":
                while True:
                    parents.append(p.name())
                    tok3 = p.next()
                    if tok3.text == ")" and tok3.kind == "punct":
                        break
                    if not (tok3.text == "," and tok3.kind == "punct"):
                        raise BifParseError(
                            f"expected ',' or ')', found {tok3.text!r}", tok3.line, tok3.col
                        )
            elif not (tok2.text == ")" and tok2.kind == "punct"):
                raise BifParseError(f"expected '|' or ')', found {tok2.text!r}", tok2.line, tok2.col)
            p.expect("{")
            entries: dict | list | None = None
            while True:
                inner = p.next()
                if inner.kind == "punct" and inner.text == "}":
                    break
                if inner.kind == "word" and inner.text == "table":
                    values: list[float] = []
                    while True:
                        tok4 = p.next()
                        if tok4.kind == "punct" and tok4.text == ";":
                            break
                        if tok4.kind == "punct" and tok4.text == ",":
                            continue
                        try:
                            values.append(float(tok4.text))
                        except ValueError:
                            raise BifParseError(
                                f"expected a number, found {tok4.text!r}", tok4.line, tok4.col
                            ) from None
                    entries = values
                elif inner.kind == "punct" and inner.text == "(":
                    key: list[str] = []
                    while True:
                        tok4 = p.next()
                        if tok4.kind == "punct" and tok4.text == ")":
                            break
                        if tok4.kind == "punct" and tok4.text == ",":
                            continue
                        key.append(tok4.text)
                    values = []
                    while True:
                        tok4 = p.next()
                        if tok4.kind == "punct" and tok4.text == ";":
                            break
                        if tok4.kind == "punct" and tok4.text == ",":
                            continue
                        try:
                            values.append(float(tok4.text))
                        except ValueError:
                            raise BifParseError(
                                f"expected a number, found {tok4.text!r}", tok4.line, tok4.col
                            ) from None
                    if entries is None:
                        entries = {}
                    if not isinstance(entries, dict):
                        raise BifParseError(
                            "cannot mix 'table' and per-row entries", inner.line, inner.col
                        )
                    entries[tuple(key)] = values
                elif inner.kind == "word" and inner.text == "property":
                    p.skip_statement()
                else:
                    raise BifParseError(
                        f"unexpected token {inner.text!r} in probability block",
                        inner.line,
                        inner.col,
                    )
            if entries is None:
                raise BifParseError(
                    f"probability block for {child!r} has no entries",
                    head_tok.line,
                    head_tok.col,
                )
            cpt_specs.append((child, parents, head_tok, entries))
        else:
            raise BifParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)

    # -- semantic assembly --------------------------------------------------
    cpts: dict[str, Factor] = {}
    for child, parents, head_tok, entries in cpt_specs:
        if child not in by_name:
            raise ValidationError(f"probability block for unknown variable {child!r}")
        for pname in parents:
            if pname not in by_name:
                raise ValidationError(
                    f"probability block for {child!r} names unknown parent {pname!r}"
                )
        if child in cpts:
            raise ValidationError(f"duplicate probability block for {child!r}")
        cvar = by_name[child]
        pvars = tuple(by_name[n] for n in parents)
        if isinstance(entries, dict):
            rows = {}
            for key, values in entries.items():
                if len(values) != cvar.cardinality:
                    raise ValidationError(
                        f"probability row {key} for {child!r} lists {len(values)} values, "
                        f"expected {cvar.cardinality}"
                    )
                rows[key] = values
            cpts[child] = Factor.from_cpt(cvar, pvars, rows)
        else:
            expected = cvar.cardinality * int(
                np.prod([v.cardinality for v in pvars], dtype=np.int64)
            )
            if len(entries) != expected:
                raise ValidationError(
                    f"table for {child!r} lists {len(entries)} values, expected {expected}"
                )
            # child slowest in the file: reshape and move the child axis last
            arr = np.asarray(entries, dtype=np.float64).reshape(
                (cvar.cardinality,) + tuple(v.cardinality for v in pvars)
            )
            arr = np.moveaxis(arr, 0, -1)
            cpts[child] = Factor.from_cpt(cvar, pvars, arr)

    if not variables:
        raise ValidationError("document declares no variables")
    missing = [v.name for v in variables if v.name not in cpts]
    if missing:
        raise ValidationError(f"variables without a probability block: {missing}")
    return BayesianNetwork(net_name, variables, cpts)


def _fmt_name(name: str) -> str:
    return name if _WORD.fullmatch(name) else f'"{name}"'


def _fmt_value(x: float) -> str:
    return repr(float(x))


def serialize_bif(bn: BayesianNetwork) -> str:
    """Write a network back to BIF text; parsing the result is a fixed point."""
    out: list[str] = [f"network {_fmt_name(bn.name)} {{", "}"]
    for v in bn.variables:
        out.append(f"variable {_fmt_name(v.name)} {{")
        states = ", ".join(_fmt_name(s) for s in v.states)
        out.append(f"  type discrete [ {v.cardinality} ] {{ {states} }};")
        out.append("}")
    for v in bn.variables:
        cpt = bn.cpt(v.name)
        parents = cpt.scope[:-1]
        if parents:
            head = f"{_fmt_name(v.name)} | " + ", ".join(_fmt_name(p.name) for p in parents)
        else:
            head = _fmt_name(v.name)
        out.append(f"probability ( {head} ) {{")
        if parents:
            table = cpt.values.reshape(-1, v.cardinality)
            configs = np.stack(
                np.meshgrid(*[np.arange(p.cardinality) for p in parents], indexing="ij"),
                axis=-1,
            ).reshape(-1, len(parents))
            for cfg, row in zip(configs, table):
                key = ", ".join(
                    _fmt_name(p.states[int(i)]) for p, i in zip(parents, cfg)
                )
                vals = ", ".join(_fmt_value(x) for x in row)
                out.append(f"  ({key}) {vals};")
        else:
            vals = ", ".join(_fmt_value(x) for x in cpt.flat())
            out.append(f"  table {vals};")
        out.append("}")
    return "\n".join(out) + "\n"
