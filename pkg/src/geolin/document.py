"""System description files.

A document is an INI-like UTF-8 text with a `[system]` header naming
the equations and their shape, a `[coefficients]` table, and optional
`[transformation]`, `[metric]`, and `[gauge]` blocks.  Expression
values are double-quoted; `#` starts a comment; omitted coefficients
are zero.  Unknown sections or keys are hard errors so that a typo can
never silently weaken a check.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

from .criteria import Linear2, Quadratic2
from .geometry import Christoffel, Geodesic2Coefficients, Metric
from .kernel import Expr, ParseError, parse
from .projection import (
    ScalarCubic,
    ScalarGauge,
    SystemCubic2,
    SystemGauge,
    ZERO_SCALAR_GAUGE,
    ZERO_SYSTEM_GAUGE,
)
from .transform import GeneralSystem2, Transformation


class DocumentError(ValueError):
    """Malformed or inconsistent system description."""


def _field_names(cls) -> Tuple[str, ...]:
    return tuple(f.name for f in dataclasses.fields(cls))


_CHRISTOFFEL3_KEYS = tuple(
    f"G{i}_{j}{k}"
    for i in (1, 2, 3)
    for (j, k) in ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
)

COEFFICIENT_KEYS: Dict[str, Tuple[str, ...]] = {
    "scalar-cubic": _field_names(ScalarCubic),
    "cubic-2": _field_names(SystemCubic2),
    "quadratic-2": _field_names(Quadratic2),
    "linear-2": _field_names(Linear2),
    "geodesic-2": _field_names(Geodesic2Coefficients),
    "geodesic-3": _CHRISTOFFEL3_KEYS,
    "general-2": (
        "J2_2", "J2_3", "J3_2", "J3_3", "G2_23", "G3_23",
        "Del2_222", "Del2_223", "Del2_233", "Del2_333",
        "Del3_222", "Del3_223", "Del3_233", "Del3_333",
        "Lam2_22", "Lam2_23", "Lam2_33", "Lam3_22", "Lam3_23", "Lam3_33",
        "Om2_2", "Om2_3", "Om3_2", "Om3_3", "E2", "E3",
    ),
}

KIND_DIMENSION = {
    "scalar-cubic": 2,
    "geodesic-2": 2,
    "cubic-2": 3,
    "quadratic-2": 3,
    "linear-2": 3,
    "geodesic-3": 3,
    "general-2": 3,
}

GAUGE_KEYS = {
    "scalar-cubic": _field_names(ScalarGauge),
    "cubic-2": _field_names(SystemGauge),
    "quadratic-2": _field_names(SystemGauge),
    "linear-2": _field_names(SystemGauge),
}

_COORDS = {2: ("x", "y"), 3: ("x", "y", "z")}
_MAP_KEYS = {2: ("u", "v"), 3: ("u", "v", "w")}
_METRIC_KEYS = ("p", "q", "r")
_SECTIONS = ("system", "coefficients", "transformation", "metric", "gauge")

_KEY_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SystemDocument:
    """Parsed description: name, kind, and the raw expression tables."""

    name: str
    kind: str
    coefficients: Dict[str, Expr]
    transformation_components: Optional[Dict[str, Expr]] = None
    metric_entries: Optional[Dict[str, Expr]] = None
    gauge_entries: Optional[Dict[str, Expr]] = None

    @property
    def dim(self) -> int:
        return KIND_DIMENSION[self.kind]

    def system(self):
        """Build the typed coefficient object the kind declares."""
        kind, table = self.kind, self.coefficients
        if kind == "scalar-cubic":
            return ScalarCubic.make(**table)
        if kind == "cubic-2":
            return SystemCubic2.make(**table)
        if kind == "quadratic-2":
            return Quadratic2.make(**table)
        if kind == "linear-2":
            return Linear2.make(**table)
        if kind == "geodesic-2":
            return Geodesic2Coefficients.make(**table)
        if kind == "geodesic-3":
            components = {}
            for key, value in table.items():
                i, j, k = int(key[1]), int(key[3]), int(key[4])
                components[(i, j, k)] = value
            return Christoffel.from_components(3, components)
        if kind == "general-2":
            return GeneralSystem2.make(**table)
        raise DocumentError(f"unsupported kind {kind!r}")

    def transformation(self) -> Optional[Transformation]:
        if self.transformation_components is None:
            return None
        keys = _MAP_KEYS[self.dim]
        return Transformation.make(
            *(self.transformation_components[k] for k in keys))

    def metric(self) -> Optional[Metric]:
        if self.metric_entries is None:
            return None
        zero = parse("0")
        return Metric.plane(*(self.metric_entries.get(k, zero)
                              for k in _METRIC_KEYS))

    def gauge(self, overrides: Optional[Dict[str, Expr]] = None
              ) -> Union[ScalarGauge, SystemGauge, None]:
        """Gauge block merged with command-line overrides; zero gauge
        when the kind supports one and nothing was given."""
        keys = GAUGE_KEYS.get(self.kind)
        if keys is None:
            if self.gauge_entries or overrides:
                raise DocumentError(
                    f"kind {self.kind!r} does not take a gauge")
            return None
        table = dict(self.gauge_entries or {})
        for key, value in (overrides or {}).items():
            if key not in keys:
                raise DocumentError(
                    f"unknown gauge key {key!r} for kind {self.kind!r}")
            table[key] = value
        cls = ScalarGauge if self.kind == "scalar-cubic" else SystemGauge
        return cls.make(**table)


def load_document(path: str) -> SystemDocument:
    with open(path, encoding="utf-8") as handle:
        return parse_document(handle.read(), label=path)


def parse_document(text: str, label: str = "<string>") -> SystemDocument:
    sections = _split_sections(text, label)
    if "system" not in sections:
        raise DocumentError(f"{label}: missing [system] section")
    head = dict(sections["system"])
    name = head.pop("name", None)
    kind = head.pop("kind", None)
    coords = head.pop("coordinates", None)
    if head:
        raise DocumentError(
            f"{label}: unknown [system] keys {sorted(head)}")
    if not name:
        raise DocumentError(f"{label}: [system] needs a name")
    if kind not in COEFFICIENT_KEYS:
        raise DocumentError(
            f"{label}: unknown kind {kind!r}; expected one of "
            + ", ".join(sorted(COEFFICIENT_KEYS)))
    dim = KIND_DIMENSION[kind]
    if coords is not None and tuple(coords.split()) != _COORDS[dim]:
        raise DocumentError(
            f"{label}: kind {kind!r} uses coordinates "
            + " ".join(_COORDS[dim]))

    coefficients = _expression_table(
        sections.get("coefficients", []), COEFFICIENT_KEYS[kind],
        "coefficient", label)
    transformation = None
    if "transformation" in sections:
        transformation = _expression_table(
            sections["transformation"], _MAP_KEYS[dim],
            "transformation", label)
        missing = [k for k in _MAP_KEYS[dim] if k not in transformation]
        if missing:
            raise DocumentError(
                f"{label}: transformation block is missing {missing}")
    metric = None
    if "metric" in sections:
        if dim != 2:
            raise DocumentError(
                f"{label}: metric blocks apply to two-coordinate kinds only")
        metric = _expression_table(
            sections["metric"], _METRIC_KEYS, "metric", label)
    gauge = None
    if "gauge" in sections:
        keys = GAUGE_KEYS.get(kind)
        if keys is None:
            raise DocumentError(
                f"{label}: kind {kind!r} does not take a gauge block")
        gauge = _expression_table(sections["gauge"], keys, "gauge", label)
    return SystemDocument(
        name=name, kind=kind, coefficients=coefficients,
        transformation_components=transformation,
        metric_entries=metric, gauge_entries=gauge)


def _split_sections(text: str, label: str):
    sections: Dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise DocumentError(f"{label}:{lineno}: unterminated section header")
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise DocumentError(
                    f"{label}:{lineno}: unknown section [{section}]")
            if section in sections:
                raise DocumentError(
                    f"{label}:{lineno}: duplicate section [{section}]")
            sections[section] = []
            current = section
            continue
        if current is None:
            raise DocumentError(
                f"{label}:{lineno}: content before any section header")
        if "=" not in line:
            raise DocumentError(f"{label}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise DocumentError(f"{label}:{lineno}: bad key {key!r}")
        if any(k == key for k, _, _ in sections[current]):
            raise DocumentError(f"{label}:{lineno}: duplicate key {key!r}")
        sections[current].append((key, value, lineno))
    head = sections.get("system")
    if head is not None:
        sections["system"] = [(k, _unquote(v), n) for k, v, n in head]
        sections["system"] = {k: v for k, v, _ in sections["system"]}
    return sections


def _strip_comment(line: str) -> str:
    in_quotes = False
    for pos, char in enumerate(line):
        if char == '"':
            in_quotes = not in_quotes
        elif char == "#" and not in_quotes:
            return line[:pos]
    return line


def _unquote(value: str) -> str:
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1]
    return value


def _expression_table(entries, allowed, what, label) -> Dict[str, Expr]:
    table: Dict[str, Expr] = {}
    for key, value, lineno in entries:
        if key not in allowed:
            raise DocumentError(
                f"{label}:{lineno}: unknown {what} key {key!r}; expected "
                "one of " + ", ".join(allowed))
        if not (value.startswith('"') and value.endswith('"') and len(value) >= 2):
            raise DocumentError(
                f"{label}:{lineno}: {what} values must be double-quoted")
        try:
            table[key] = parse(value[1:-1])
        except ParseError as err:
            raise DocumentError(
                f"{label}:{lineno}: bad expression for {key}: {err}") from err
    return table
