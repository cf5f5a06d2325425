"""Input parsing and the on-disk formats (digit JSON, CSV tables, run manifests)."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .cf import DigitSeq, InvalidDigits
from .dynamics import NAMED_CONSTANTS, named_constant
from .geometric import HPoint
from .scalars import GaussianInt, to_bigfloat

FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed user input; ``position`` is the 1-based column of the offending token."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        where = f" at column {position}" if position is not None else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))
        self.position = position
        self.text = text


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _tokens(text: str, sep: str = ","):
    pos = 0
    for part in text.split(sep):
        lead = len(part) - len(part.lstrip())
        yield part.strip(), pos + lead + 1
        pos += len(part) + 1


def parse_scalar(token: str, position: int = 1):
    """``a/b``, an integer or a decimal (all exact), or a named constant (returned as its name)."""
    low = token.lower()
    if low in NAMED_CONSTANTS:
        return low
    if _RATIONAL.match(token):
        try:
            return Fraction(token)
        except ZeroDivisionError:
            raise ParseError("zero denominator", token, position) from None
    if _DECIMAL.match(token):
        return Fraction(token)
    raise ParseError("expected a rational a/b, a decimal or one of " + ", ".join(NAMED_CONSTANTS),
                     token, position)


@dataclass(frozen=True)
class PointSpec:
    """A parsed seed: exact rationals, or named constants to evaluate at a precision."""

    text: str
    coords: tuple

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coords)

    def evaluate(self, precision: int = 256) -> HPoint:
        if self.exact:
            return HPoint(*(_simplify(c) for c in self.coords))
        return HPoint(*(named_constant(c, precision) if isinstance(c, str) else to_bigfloat(c, precision)
                        for c in self.coords))


def _simplify(c: Fraction):
    return int(c) if c.denominator == 1 else c


def parse_point(text: str) -> PointSpec:
    """Parse ``x,y,t``; errors name the column of the bad coordinate."""
    toks = list(_tokens(text))
    if len(toks) != 3:
        raise ParseError(f"expected 3 comma-separated coordinates, got {len(toks)}", text, 1)
    coords = []
    for tok, pos in toks:
        if not tok:
            raise ParseError("empty coordinate", text, pos)
        coords.append(parse_scalar(tok, pos))
    return PointSpec(text, tuple(coords))


def parse_lattice_point(text: str, position: int = 1) -> HPoint:
    toks = list(_tokens(text))
    if len(toks) != 3:
        raise ParseError("a digit needs 3 integer coordinates", text, position)
    out = []
    for tok, pos in toks:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError("digit coordinates must be integers", tok, position + pos - 1) from None
    return HPoint(*out)


def parse_word(text: str) -> list[HPoint]:
    """Digits separated by ``;``, e.g. ``1,0,0;2,0,0``."""
    out = []
    pos = 1
    for part in text.split(";"):
        if part.strip():
            out.append(parse_lattice_point(part, pos))
        pos += len(part) + 1
    if not out:
        raise ParseError("empty digit word", text, 1)
    return out


def parse_grid(text: str) -> tuple[int, int, int]:
    toks = list(_tokens(text))
    if len(toks) != 3:
        raise ParseError("grid needs three sizes", text, 1)
    out = []
    for tok, pos in toks:
        if not tok.isdigit() or int(tok) < 1:
            raise ParseError("grid sizes must be positive integers", tok, pos)
        out.append(int(tok))
    return tuple(out)


def fmt_scalar(c) -> str:
    """Exact scalars as ``a/b``; mpmath values with all significant digits."""
    if isinstance(c, int):
        return str(c)
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    ctx = getattr(c, "context", None)
    if ctx is not None:
        return ctx.nstr(c, max(15, int(ctx.prec * 0.30103)))
    return repr(float(c))


def fmt_point(h: HPoint) -> list[str]:
    return [fmt_scalar(c) for c in h]


def gint_json(g: GaussianInt) -> list[int]:
    return [g.re, g.im]


@dataclass
class RunManifest:
    """Everything needed to re-run a command and reproduce its outputs."""

    command: str
    seed: str | None = None
    domain: str | None = None
    iterations: int | None = None
    precision: int | None = None
    tail: bool | None = None
    grid: list[int] | None = None
    outputs: list[str] = field(default_factory=list)
    options: dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION
    library_version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def digits_to_json(d: DigitSeq, **extra) -> dict:
    gamma0, digits = d.as_lists()
    doc = {"format_version": FORMAT_VERSION, "gamma0": gamma0, "digits": digits,
           "finite": d.finite, "certificates": extra.pop("certificates", [])}
    doc.update(extra)
    return doc


def digits_from_json(doc: dict) -> DigitSeq:
    """Validate and decode a digit document; zero digits are rejected with their index."""
    if not isinstance(doc, dict):
        raise ParseError("digit document must be a JSON object")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported digit format version {version}")
    for key in ("gamma0", "digits"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    g0 = _triple(doc["gamma0"], "gamma0")
    if not isinstance(doc["digits"], list):
        raise ParseError("'digits' must be a list of integer triples")
    digits = tuple(_triple(x, f"digits[{i}]") for i, x in enumerate(doc["digits"]))
    return DigitSeq(g0, digits, bool(doc.get("finite", True)))


def _triple(v, where: str) -> HPoint:
    if (not isinstance(v, list) or len(v) != 3
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in v)):
        raise ParseError(f"{where} must be a triple of integers", json.dumps(v))
    return HPoint(*v)


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}", position=exc.colno) from None


def write_json(path: str | Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence], manifest: RunManifest) -> None:
    """CSV with the run manifest embedded as a leading ``#`` comment line."""
    with open(path, "w", newline="") as fh:
        fh.write("# manifest: " + json.dumps(manifest.to_dict(), separators=(",", ":")) + "\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def read_csv(path: str | Path) -> tuple[dict | None, list[str], list[list[str]]]:
    manifest = None
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# manifest: "):
            manifest = json.loads(line[len("# manifest: "):])
        elif not line.startswith("#"):
            body.append(line)
    rows = list(csv.reader(body))
    return manifest, rows[0], rows[1:]
