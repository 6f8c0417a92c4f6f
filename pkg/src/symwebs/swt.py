"""Reading and writing the line-oriented ``.swt`` web format.

::

    # comment
    field F 3          (or: field Q)
    m 2
    n 1
    matrix 0
    1 0
    0 0
    matrix 1
    ...

Blank lines and ``#`` comments are ignored.  Rendering is canonical, so
render(parse(text)) is a fixed point.
"""
from __future__ import annotations

from pathlib import Path

from .errors import DimensionMismatch, FormatError
from .exactfield import FieldSpec
from .symweb import SymWeb


def _lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()


def parse_swt(text: str) -> SymWeb:
    lines = list(_lines(text))
    if len(lines) < 3:
        raise FormatError("truncated web file")
    head = lines[0]
    if head[0] != "field" or len(head) not in (2, 3):
        raise FormatError("first line must be 'field F <p>' or 'field Q'")
    if head[1:] == ["Q"]:
        field = FieldSpec.rationals()
    elif len(head) == 3 and head[1] == "F":
        field = FieldSpec.parse(head[2])
    else:
        raise FormatError(f"bad field line {' '.join(head)!r}")
    try:
        if lines[1][0] != "m" or lines[2][0] != "n" or len(lines[1]) != 2 or len(lines[2]) != 2:
            raise ValueError
        m, n = int(lines[1][1]), int(lines[2][1])
    except ValueError:
        raise FormatError("expected 'm <int>' and 'n <int>' lines") from None
    if m < 2 or n < 1:
        raise FormatError(f"need m >= 2 and n >= 1, got m={m}, n={n}")
    body = lines[3:]
    block = n + 2
    if len(body) != (m + 1) * block:
        raise FormatError(f"expected {m + 1} matrix blocks of {n + 1} rows")
    mats = []
    for i in range(m + 1):
        chunk = body[i * block:(i + 1) * block]
        if chunk[0] != ["matrix", str(i)]:
            raise FormatError(f"expected 'matrix {i}', got {' '.join(chunk[0])!r}")
        rows = chunk[1:]
        if any(len(r) != n + 1 for r in rows):
            raise FormatError(f"matrix {i} rows must have {n + 1} entries")
        mats.append([[field.parse_scalar(x) for x in r] for r in rows])
    try:
        return SymWeb(field, mats)
    except DimensionMismatch as exc:
        raise FormatError(str(exc)) from None


def render_swt(M: SymWeb) -> str:
    F = M.field
    out = ["field Q" if F.p is None else f"field F {F.p}", f"m {M.m}", f"n {M.n}"]
    for i, mat in enumerate(M.mats):
        out.append(f"matrix {i}")
        out.extend(" ".join(F.render(x) for x in row) for row in mat)
    return "\n".join(out) + "\n"


def read_swt(path) -> SymWeb:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not UTF-8") from exc
    return parse_swt(text)


def write_swt(path, M: SymWeb) -> None:
    Path(path).write_text(render_swt(M), encoding="utf-8")
