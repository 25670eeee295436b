"""Line-oriented definition files for systems, integrals and triples.

System file layout (key = value within ``[section]`` headers)::

    [system]
    name = kepler3d
    dim = 3
    coords = r1, r2, r3
    params = mu = 1.0, u1 = 0.3, u2 = -0.2, u3 = 0.5
    lagrangian = (r1dot^2 + r2dot^2 + r3dot^2)/2 + mu/sqrt(r1^2+r2^2+r3^2)
    singular = r1^2+r2^2+r3^2
    [integral]
    name = lrl_u
    expr = ...

Optional keys: ``opaque`` (function names), ``singular_threshold``, and
``range_<var> = lo, hi`` sampling overrides.  Triple files use a ``[triple]``
section with ``tau``, ``xi`` (comma-separated components), ``f``, ``form``.
All expressions use the grammar of :mod:`noetherkit.dsl`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dsl import parse, print_expr
from .expressions import Alphabet, Exclusion
from .mechanics import LagrangianSystem, build_system
from .noether import Triple

__all__ = ["SystemFileError", "SystemFile", "read_system_file", "write_system_file",
           "read_triple_file", "write_triple_file"]


class SystemFileError(ValueError):
    """Malformed definition file; message carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class SystemFile:
    system: LagrangianSystem
    integrals: dict[str, "sp.Expr"] = field(default_factory=dict)
    triples: dict[str, Triple] = field(default_factory=dict)


def _split_top_level(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        parts.append(tail)
    return parts


def _sections(text: str) -> list[tuple[str, dict[str, tuple[str, int]]]]:
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip().lower(), {})
            sections.append(current)
            continue
        if "=" not in line:
            raise SystemFileError(f"expected key = value, got {line!r}", lineno)
        if current is None:
            raise SystemFileError("key outside of any [section]", lineno)
        key, _, value = line.partition("=")
        current[1][key.strip().lower()] = (value.strip(), lineno)
    return sections


def _get(body: dict, key: str, default=None):
    if key in body:
        return body[key][0]
    return default


def _require(body: dict, key: str, section: str):
    if key not in body:
        raise SystemFileError(f"missing key {key!r} in [{section}] section")
    return body[key][0]


def _parse_params(text: str) -> dict[str, float]:
    values = {}
    if not text:
        return values
    for item in _split_top_level(text):
        name, _, val = item.partition("=")
        name = name.strip()
        if not name or not val.strip():
            raise SystemFileError(f"malformed parameter entry {item!r}")
        try:
            values[name] = float(val)
        except ValueError as err:
            raise SystemFileError(f"non-numeric parameter value in {item!r}") from err
    return values


def read_system_file(path) -> SystemFile:
    """Parse a system definition file and build the system it describes."""
    text = Path(path).read_text()
    system = None
    integrals = {}
    triples = {}
    alphabet = None
    for section, body in _sections(text):
        if section == "system":
            name = _get(body, "name", Path(path).stem)
            dim = int(_require(body, "dim", section))
            coords = tuple(_split_top_level(_require(body, "coords", section)))
            if len(coords) != dim:
                raise SystemFileError(
                    f"dim = {dim} but {len(coords)} coordinate name(s) given"
                )
            params = _parse_params(_get(body, "params", ""))
            opaque = tuple(
                s for s in _split_top_level(_get(body, "opaque", "")) if s
            )
            alphabet = Alphabet(coords=coords, params=tuple(params), opaque=opaque)
            L = parse(_require(body, "lagrangian", section), alphabet)
            threshold = float(_get(body, "singular_threshold", "1e-3"))
            exclusions = tuple(
                Exclusion(parse(s, alphabet), threshold)
                for s in _split_top_level(_get(body, "singular", ""))
                if s
            )
            var_ranges = {}
            for key, (value, lineno) in body.items():
                if key.startswith("range_"):
                    bounds = _split_top_level(value)
                    if len(bounds) != 2:
                        raise SystemFileError(f"range needs two bounds", lineno)
                    var_ranges[key.removeprefix("range_")] = (
                        float(bounds[0]), float(bounds[1]),
                    )
            system = build_system(
                L, alphabet, name=name, param_values=params,
                exclusions=exclusions, var_ranges=var_ranges,
            )
        elif section == "integral":
            if alphabet is None:
                raise SystemFileError("[integral] section before [system]")
            name = _require(body, "name", section)
            integrals[name] = parse(_require(body, "expr", section), alphabet)
        elif section == "triple":
            if alphabet is None:
                raise SystemFileError("[triple] section before [system]")
            name = _get(body, "name", f"triple{len(triples) + 1}")
            triples[name] = _triple_from_body(body, alphabet)
        else:
            raise SystemFileError(f"unknown section [{section}]")
    if system is None:
        raise SystemFileError("no [system] section found")
    return SystemFile(system=system, integrals=integrals, triples=triples)


def _triple_from_body(body: dict, alphabet: Alphabet) -> Triple:
    tau = parse(_require(body, "tau", "triple"), alphabet)
    xi = tuple(
        parse(s, alphabet) for s in _split_top_level(_require(body, "xi", "triple"))
    )
    f = parse(_require(body, "f", "triple"), alphabet)
    form = _get(body, "form", "onflow")
    return Triple(tau=tau, xi=xi, f=f, form=form)


def read_triple_file(path, alphabet: Alphabet) -> dict[str, Triple]:
    """Parse a standalone triple file against a known alphabet."""
    triples = {}
    for section, body in _sections(Path(path).read_text()):
        if section != "triple":
            raise SystemFileError(f"unexpected section [{section}] in triple file")
        name = _get(body, "name", f"triple{len(triples) + 1}")
        triples[name] = _triple_from_body(body, alphabet)
    if not triples:
        raise SystemFileError("no [triple] section found")
    return triples


def write_system_file(
    path,
    system: LagrangianSystem,
    integrals: dict | None = None,
    triples: dict[str, Triple] | None = None,
) -> None:
    """Emit a definition file that round-trips through read_system_file."""
    lines = ["[system]", f"name = {system.name or Path(path).stem}"]
    lines.append(f"dim = {system.n}")
    lines.append("coords = " + ", ".join(system.alphabet.coords))
    if system.param_values:
        lines.append(
            "params = "
            + ", ".join(f"{k} = {v!r}" for k, v in system.param_values.items())
        )
    if system.alphabet.opaque:
        lines.append("opaque = " + ", ".join(system.alphabet.opaque))
    lines.append(f"lagrangian = {print_expr(system.L)}")
    if system.exclusions:
        lines.append(
            "singular = " + ", ".join(print_expr(ex.expr) for ex in system.exclusions)
        )
        lines.append(f"singular_threshold = {system.exclusions[0].threshold!r}")
    for var, (lo, hi) in system.var_ranges.items():
        lines.append(f"range_{var} = {lo!r}, {hi!r}")
    for name, expr in (integrals or {}).items():
        lines += ["[integral]", f"name = {name}", f"expr = {print_expr(expr)}"]
    for name, tr in (triples or {}).items():
        lines += _triple_lines(name, tr)
    Path(path).write_text("\n".join(lines) + "\n")


def _triple_lines(name: str, tr: Triple) -> list[str]:
    return [
        "[triple]",
        f"name = {name}",
        f"tau = {print_expr(tr.tau)}",
        "xi = " + ", ".join(print_expr(x) for x in tr.xi),
        f"f = {print_expr(tr.f)}",
        f"form = {tr.form}",
    ]


def write_triple_file(path, triples: dict[str, Triple]) -> None:
    lines = []
    for name, tr in triples.items():
        lines += _triple_lines(name, tr)
    Path(path).write_text("\n".join(lines) + "\n")
