"""Parser and printer for the risk-modelling language.

The concrete syntax is block-structured with `;`-terminated attribute
lists.  A model may span several files; an `Activity` block without a name
takes its file's stem as the activity name.  Embedded guard/update strings
are kept opaque here and only parsed by the guarded-command engine on
demand.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import DslSyntaxError, SourcePos
from .gradients import complete_matrix
from .model import (Activity, Item, Mode, ModeRef, Model, RiskFactor,
                    WeightTable)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}();:,=|.])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, number, string, punct, eof
    value: str
    pos: SourcePos


def tokenize(filename: str, text: str) -> list[Token]:
    tokens: list[Token] = []
    index = 0
    line = 1
    line_start = 0
    while index < len(text):
        match = _TOKEN_RE.match(text, index)
        if match is None:
            pos = SourcePos(filename, line, index - line_start + 1)
            raise DslSyntaxError(f"unexpected character {text[index]!r}", pos)
        kind = match.lastgroup
        value = match.group()
        pos = SourcePos(filename, line, index - line_start + 1)
        if kind not in ("ws", "comment"):
            if kind == "string":
                value = value[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            tokens.append(Token(kind, value, pos))
        newlines = match.group().count("\n")
        if newlines:
            line += newlines
            line_start = match.end() - (len(match.group()) - match.group().rindex("\n") - 1)
        index = match.end()
    tokens.append(Token("eof", "", SourcePos(filename, line, index - line_start + 1)))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.tok
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None, what: str = "") -> Token:
        if self.at(kind, value):
            return self.advance()
        wanted = what or value or kind
        raise DslSyntaxError(f"expected {wanted}, found {self.tok.value!r}", self.tok.pos)


def parse_model(sources: list[tuple[str, str]]) -> Model:
    """Parse one or more (filename, text) sources into a single Model."""

    model = Model()
    for filename, text in sources:
        _parse_file(model, filename, text)
    model.weights.finalize()
    return model


def parse_files(paths: list[str | Path]) -> Model:
    sources = [(str(p), Path(p).read_text(encoding="utf-8")) for p in paths]
    return parse_model(sources)


def _declare(table: dict, name: str, value, kind: str, pos: SourcePos) -> None:
    if name in table:
        raise DslSyntaxError(f"duplicate {kind} declaration {name}", pos)
    table[name] = value


def _parse_file(model: Model, filename: str, text: str) -> None:
    cur = _Cursor(tokenize(filename, text))
    stem = Path(filename).stem
    while not cur.at("eof"):
        tok = cur.expect("ident", what="declaration")
        if tok.value == "Activity":
            _parse_activity(model, cur, tok.pos, stem)
        elif tok.value == "mode":
            _parse_mode(model, cur)
        elif tok.value == "Application":
            _parse_application(model, cur)
        elif tok.value == "Weights":
            _parse_weights(model, cur)
        elif tok.value == "Distances":
            _parse_distances(model, cur)
        elif cur.at("punct", "{"):
            raise DslSyntaxError(f"unknown block keyword {tok.value}", tok.pos)
        elif cur.at("ident", "type"):
            _parse_item(model, cur, tok)
        else:
            _parse_factor(model, cur, tok)


def _parse_activity(model: Model, cur: _Cursor, pos: SourcePos, stem: str) -> None:
    name = stem
    if cur.at("ident"):
        name = cur.advance().value
    act = Activity(name=name, pos=pos)
    cur.expect("punct", "{")
    while not cur.accept("punct", "}"):
        attr = cur.expect("ident", what="activity attribute")
        target = cur.expect("ident").value
        cur.expect("punct", ";")
        if attr.value == "include":
            act.includes.append(target)
        elif attr.value == "successor":
            act.successors.append(target)
        elif attr.value == "hazard":
            act.factors.append(target)
        else:
            raise DslSyntaxError(f"unknown activity attribute {attr.value}", attr.pos)
    _declare(model.activities, name, act, "activity", pos)


def _parse_mode_ref(cur: _Cursor) -> ModeRef:
    if cur.accept("punct", "."):
        name = cur.expect("ident").value
        return ModeRef(name, "")
    first = cur.expect("ident").value
    if cur.accept("punct", "."):
        name = cur.expect("ident").value
        return ModeRef(name, first)
    return ModeRef(first, None)


def _parse_name_list(cur: _Cursor) -> list[str]:
    cur.expect("punct", "(")
    names = [cur.expect("ident").value]
    while cur.accept("punct", ","):
        names.append(cur.expect("ident").value)
    cur.expect("punct", ")")
    return names


def _parse_mode_ref_list(cur: _Cursor) -> list[ModeRef]:
    cur.expect("punct", "(")
    refs = [_parse_mode_ref(cur)]
    while cur.accept("punct", ","):
        refs.append(_parse_mode_ref(cur))
    cur.expect("punct", ")")
    return refs


def _parse_factor(model: Model, cur: _Cursor, name_tok: Token) -> None:
    fac = RiskFactor(name=name_tok.value, pos=name_tok.pos)
    while not cur.accept("punct", ";"):
        attr = cur.expect("ident", what="factor attribute")
        if attr.value == "desc":
            fac.desc = cur.expect("string").value
        elif attr.value == "guard":
            fac.guard = cur.expect("string").value
        elif attr.value == "detectedBy":
            fac.detected_by = _parse_mode_ref_list(cur)
        elif attr.value == "mitigatedBy":
            fac.mitigated_by = _parse_mode_ref_list(cur)
        elif attr.value == "resumedBy":
            fac.resumed_by = _parse_mode_ref_list(cur)
        elif attr.value == "requires":
            fac.requires = _parse_name_list(cur)
        elif attr.value == "prevents":
            fac.prevents = _parse_name_list(cur)
        elif attr.value == "mitPreventsMit":
            fac.mit_prevents_mit = _parse_name_list(cur)
        elif attr.value == "requiresNOf":
            cur.expect("punct", "(")
            n_tok = cur.expect("number")
            cur.expect("punct", "|")
            names = [cur.expect("ident").value]
            while cur.accept("punct", ","):
                names.append(cur.expect("ident").value)
            cur.expect("punct", ")")
            try:
                n = int(n_tok.value)
            except ValueError:
                raise DslSyntaxError("requiresNOf threshold must be an integer", n_tok.pos)
            fac.requires_n_of = (n, tuple(names))
        elif attr.value == "mis":
            cur.expect("punct", "=")
            fac.mis = cur.expect("string").value
        elif attr.value == "prob":
            cur.expect("punct", "=")
            fac.prob = float(cur.expect("number").value)
        elif attr.value == "sev":
            cur.expect("punct", "=")
            fac.sev = float(cur.expect("number").value)
        elif attr.value == "final":
            if cur.accept("punct", "="):
                word = cur.expect("ident")
                if word.value not in ("true", "false"):
                    raise DslSyntaxError("final expects true or false", word.pos)
                fac.final = word.value == "true"
            else:
                fac.final = True
        elif attr.value == "hook":
            cur.expect("punct", "=")
            if cur.at("string"):
                fac.hook = cur.advance().value
            else:
                fac.hook = cur.expect("ident").value
        else:
            raise DslSyntaxError(f"unknown factor attribute {attr.value}", attr.pos)
    _declare(model.factors, fac.name, fac, "factor", name_tok.pos)


def _parse_mode(model: Model, cur: _Cursor) -> None:
    name_tok = cur.expect("ident", what="mode name")
    mode = Mode(name=name_tok.value, pos=name_tok.pos)
    while not cur.accept("punct", ";"):
        attr = cur.expect("ident", what="mode attribute")
        if attr.value == "desc":
            mode.desc = cur.expect("string").value
        elif attr.value == "guard":
            mode.guard = cur.expect("string").value
        elif attr.value == "update":
            mode.update = cur.expect("string").value
        elif attr.value == "target":
            cur.expect("punct", "(")
            var = cur.expect("ident").value
            cur.expect("punct", "=")
            if cur.at("number"):
                value = cur.advance().value
            else:
                value = cur.expect("ident").value
            cur.expect("punct", ")")
            mode.target = (var, value)
        elif attr.value == "embodiedBy":
            mode.embodied_by = [cur.expect("ident").value]
            while cur.accept("punct", ","):
                mode.embodied_by.append(cur.expect("ident").value)
        elif attr.value in ("disruption", "nuisance", "effort"):
            cur.expect("punct", "=")
            mode.params[attr.value] = cur.expect("number").value
        else:
            raise DslSyntaxError(f"unknown mode attribute {attr.value}", attr.pos)
    _declare(model.modes, mode.name, mode, "mode", name_tok.pos)


def _parse_item(model: Model, cur: _Cursor, name_tok: Token) -> None:
    cur.expect("ident", "type")
    kind_tok = cur.expect("ident", what="AGENT or CONTROLLER")
    if kind_tok.value not in ("AGENT", "CONTROLLER"):
        raise DslSyntaxError(f"unknown item kind {kind_tok.value}", kind_tok.pos)
    item = Item(name=name_tok.value, kind=kind_tok.value, pos=name_tok.pos)
    while not cur.accept("punct", ";"):
        attr = cur.expect("ident", what="item attribute")
        cur.expect("punct", "=")
        value = cur.expect("string").value
        if attr.value == "validActs":
            item.valid_acts = [a for a in value.split("|") if a]
        else:
            if attr.value in item.local_vars:
                raise DslSyntaxError(f"duplicate variable {attr.value} in item {item.name}", attr.pos)
            item.local_vars[attr.value] = value
    _declare(model.items, item.name, item, "item", name_tok.pos)


def _parse_application(model: Model, cur: _Cursor) -> None:
    name_tok = cur.expect("ident", what="application name")
    if model.application_name == "app":
        model.application_name = name_tok.value
    cur.expect("punct", "{")
    while not cur.accept("punct", "}"):
        entry = cur.expect("ident", what="formula name")
        cur.expect("punct", "=")
        text = cur.expect("string").value
        cur.expect("punct", ";")
        if entry.value in model.application:
            raise DslSyntaxError(f"duplicate application formula {entry.value}", entry.pos)
        model.application[entry.value] = text


def _parse_weights(model: Model, cur: _Cursor) -> None:
    cur.expect("ident", what="weights block name")
    cur.expect("punct", "{")
    guard_tok = cur.expect("ident", what="guard column")
    if guard_tok.value != "guard":
        raise DslSyntaxError("first weights column must be guard", guard_tok.pos)
    columns: list[str] = []
    while not cur.accept("punct", ";"):
        columns.append(cur.expect("ident", what="column name").value)
    rows: list[tuple[str, str, list[str], SourcePos | None]] = []
    while not cur.accept("punct", "}"):
        action = cur.expect("ident", what="action name")
        cur.expect("punct", ":")
        guard = cur.expect("string").value
        values = [cur.expect("string").value for _ in columns]
        cur.expect("punct", ";")
        rows.append((action.value, guard, values, action.pos))
    for diag in model.weights.merge_block(columns, rows):
        raise DslSyntaxError(diag.message, diag.pos)


def _parse_distances(model: Model, cur: _Cursor) -> None:
    dim_tok = cur.expect("ident", what="matrix dimension")
    cur.expect("punct", "{")
    labels: list[str] = []
    rows: list[list[int]] = []
    while not cur.accept("punct", "}"):
        label = cur.expect("ident", what="matrix label")
        cur.expect("punct", ":")
        entries: list[int] = []
        while not cur.accept("punct", ";"):
            num = cur.expect("number")
            try:
                entries.append(int(num.value))
            except ValueError:
                raise DslSyntaxError("matrix entries must be integers", num.pos)
        labels.append(label.value)
        rows.append(entries)
    matrix = complete_matrix(dim_tok.value, labels, rows, dim_tok.pos)
    _declare(model.matrices, dim_tok.value, matrix, "matrix", dim_tok.pos)


# -- printing -----------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _fmt_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def print_model(model: Model) -> str:
    """Canonical text form; parsing it back yields a structurally equal
    model (the parse-print-parse fixpoint)."""

    out: list[str] = []
    for act in model.activities.values():
        out.append(f"Activity {act.name} {{")
        for inc in act.includes:
            out.append(f"  include {inc};")
        for suc in act.successors:
            out.append(f"  successor {suc};")
        for fac in act.factors:
            out.append(f"  hazard {fac};")
        out.append("}")
        out.append("")

    for fac in model.factors.values():
        lines = [fac.name]
        if fac.desc:
            lines[0] += f" desc {_quote(fac.desc)}"
        if fac.guard is not None:
            lines.append(f"  guard {_quote(fac.guard)}")
        for attr, refs in (("detectedBy", fac.detected_by),
                           ("mitigatedBy", fac.mitigated_by),
                           ("resumedBy", fac.resumed_by)):
            if refs:
                lines.append(f"  {attr} ({','.join(str(r) for r in refs)})")
        for attr, names in (("requires", fac.requires),
                            ("prevents", fac.prevents),
                            ("mitPreventsMit", fac.mit_prevents_mit)):
            if names:
                lines.append(f"  {attr} ({','.join(names)})")
        if fac.requires_n_of is not None:
            n, names = fac.requires_n_of
            lines.append(f"  requiresNOf ({n}|{','.join(names)})")
        if fac.mis is not None:
            lines.append(f"  mis={_quote(fac.mis)}")
        if fac.prob is not None:
            lines.append(f"  prob={_fmt_number(fac.prob)}")
        if fac.sev is not None:
            lines.append(f"  sev={_fmt_number(fac.sev)}")
        if fac.final:
            lines.append("  final")
        if fac.hook is not None:
            lines.append(f"  hook={fac.hook}")
        out.append("\n".join(lines) + ";")
        out.append("")

    for mode in model.modes.values():
        lines = [f"mode {mode.name}"]
        if mode.desc:
            lines[0] += f" desc {_quote(mode.desc)}"
        if mode.guard is not None:
            lines.append(f"  guard {_quote(mode.guard)}")
        if mode.update is not None:
            lines.append(f"  update {_quote(mode.update)}")
        if mode.target is not None:
            lines.append(f"  target ({mode.target[0]}={mode.target[1]})")
        if mode.embodied_by:
            lines.append(f"  embodiedBy {','.join(mode.embodied_by)}")
        for param, value in mode.params.items():
            lines.append(f"  {param}={value}")
        out.append("\n".join(lines) + ";")
        out.append("")

    if model.application:
        out.append(f"Application {model.application_name} {{")
        for name, text in model.application.items():
            out.append(f"  {name} = {_quote(text)};")
        out.append("}")
        out.append("")

    for item in model.items.values():
        lines = [f"{item.name} type {item.kind}"]
        if item.valid_acts:
            lines.append(f"  validActs={_quote('|'.join(item.valid_acts))}")
        for var, decl in item.local_vars.items():
            lines.append(f"  {var}={_quote(decl)}")
        out.append("\n".join(lines) + ";")
        out.append("")

    if model.weights.rows or model.weights.columns:
        out.append("Weights rewards {")
        out.append("  guard " + " ".join(model.weights.columns) + ";")
        for action, row in model.weights.rows.items():
            values = " ".join(_quote(row.values[c]) for c in model.weights.columns)
            out.append(f"  {action}: {_quote(row.guard)} {values};")
        out.append("}")
        out.append("")

    for matrix in model.matrices.values():
        out.append(f"Distances {matrix.dimension} {{")
        for label, row in zip(matrix.labels, matrix.lower_left()):
            out.append(f"  {label}: {' '.join(str(v) for v in row)};")
        out.append("}")
        out.append("")

    return "\n".join(out)
