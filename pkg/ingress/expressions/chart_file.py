"""
Text formats for charts and Christoffel dumps.

Chart files hold one statement per line:

    u1 = x1 + x3^2          forward map, a polynomial in x1..xn
    inv x1 = u1 - u3^2      inverse map, a polynomial in u1..un
    base = 0,0,0            optional centre (origin by default)

Blank lines and `#` comments are ignored. A chart with only `u` lines or only `inv` lines is formal.
"""
import re
from pathlib import Path

from kernel.connection import Connection
from kernel.errors import ParseError
from kernel.exterior import Chart
from kernel.ratpoly import Poly

from .parser import parse_point, parse_poly


_FORWARD = re.compile(r"^u(\d+)\s*=\s*(.+)$")
_INVERSE = re.compile(r"^inv\s+x(\d+)\s*=\s*(.+)$")
_BASE = re.compile(r"^base\s*=\s*(.+)$")
_GAMMA = re.compile(r"^Gamma\[(\d+)\]\[(\d+)\]\[(\d+)\]\s*=\s*(.+)$")


def _statements(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line


def _infer_dimension(text: str) -> int:
    indices = [int(k) for k in re.findall(r"(?:^|\s)(?:u|inv\s+x)(\d+)\s*=", text, re.MULTILINE)]
    if not indices:
        raise ParseError("Chart file declares no coordinates")
    return max(indices)


def parse_chart(text: str, n: int | None = None) -> Chart:
    if n is None:
        n = _infer_dimension(text)

    forward: dict[int, Poly] = {}
    inverse: dict[int, Poly] = {}
    base = None

    for number, line in _statements(text):
        if match := _FORWARD.match(line):
            target, expression = forward, match.group(2)
        elif match := _INVERSE.match(line):
            target, expression = inverse, match.group(2)
        elif match := _BASE.match(line):
            base = parse_point(match.group(1), n)
            continue
        else:
            raise ParseError(f"Line {number}: unrecognised chart statement {line!r}")

        k = int(match.group(1))
        if not 1 <= k <= n:
            raise ParseError(f"Line {number}: coordinate {k} out of range 1..{n}")
        if k in target:
            raise ParseError(f"Line {number}: coordinate {k} defined twice")
        try:
            target[k] = parse_poly(expression, n)
        except ParseError as e:
            raise ParseError(f"Line {number}: {e}") from e

    def collect(component: dict[int, Poly], name: str):
        if not component:
            return None
        missing = [k for k in range(1, n + 1) if k not in component]
        if missing:
            raise ParseError(f"Chart {name} map is missing coordinates {missing}")
        return tuple(component[k] for k in range(1, n + 1))

    return Chart(n, collect(forward, "forward"), collect(inverse, "inverse"), base)


def render_chart(chart: Chart) -> str:
    lines = []
    if chart.forward is not None:
        lines += [f"u{k} = {u.render('x')}" for k, u in enumerate(chart.forward, start=1)]
    if chart.inverse is not None:
        lines += [f"inv x{k} = {x.render('u')}" for k, x in enumerate(chart.inverse, start=1)]
    if any(chart.base):
        lines.append("base = " + ",".join(str(c) for c in chart.base))
    return "\n".join(lines) + "\n"


def load_chart(path: Path, n: int | None = None) -> Chart:
    with open(path, "r") as f:
        return parse_chart(f.read(), n)


def parse_gamma(text: str, n: int) -> Connection:
    """Parse a Christoffel dump of `Gamma[a][b][c] = <poly>` lines; absent symbols are zero."""
    gamma = {}
    for number, line in _statements(text):
        match = _GAMMA.match(line)
        if match is None:
            raise ParseError(f"Line {number}: expected 'Gamma[a][b][c] = <poly>', got {line!r}")
        key = tuple(int(match.group(i)) for i in (1, 2, 3))
        if any(not 1 <= k <= n for k in key):
            raise ParseError(f"Line {number}: index {key} out of range 1..{n}")
        gamma[key] = parse_poly(match.group(4), n)
    return Connection(n, gamma)
