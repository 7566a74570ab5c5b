"""Scenario files: JSON descriptions of a space, a bundle, and named sections.

The format (UTF-8 JSON, all complex numbers as ``[re, im]`` pairs):

.. code-block:: json

    {
      "space": [{"atom": "w0", "weight": 1.0}, {"atom": "w1", "weight": 0.5}],
      "fibers": {
        "w0": {"kind": "scalar"},
        "w1": {"kind": "matrix", "size": 2}
      },
      "sections": {
        "x": {"w0": [2.0, 0.0], "w1": [[1,0],[0,0],[0,0],[1,0]]}
      },
      "commands": [{"command": "invert", "section": "x"}]
    }

Fiber literals: a scalar value is one ``[re, im]`` pair; a matrix value is
a flat row-major list of ``size * size`` pairs; a function value is a list
of ``size`` pairs.  Every section must supply a value for every atom.

Parse failures raise :class:`ScenarioError` carrying the JSON field path,
e.g. ``sections.x.w1``, so a malformed literal names both the section and
the atom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .bundle import Bundle, Section
from .errors import ScenarioError
from .fibers import FiberDescriptor, FiberElement
from .measure import AtomicMeasureSpace, EFunction

__all__ = [
    "Scenario",
    "COMMAND_NAMES",
    "load_scenario",
    "parse_scenario",
    "decode_complex",
    "encode_complex",
    "decode_fiber_value",
    "encode_fiber_value",
    "decode_section",
    "encode_section",
    "encode_efunction",
]

COMMAND_NAMES = (
    "norms",
    "invert",
    "perturb",
    "spectrum",
    "reconstruct",
    "gelfand-mazur",
    "reverse-bound",
    "verify",
)


@dataclass(frozen=True)
class Scenario:
    source: str
    space: AtomicMeasureSpace
    bundle: Bundle
    sections: dict[str, Section] = field(default_factory=dict)
    commands: tuple[dict, ...] = ()


def _expect(obj, kind, path: str, what: str):
    if not isinstance(obj, kind):
        raise ScenarioError(f"expected {what}, got {type(obj).__name__}", path)
    return obj


def decode_complex(obj, path: str) -> complex:
    """A complex literal is a two-element ``[re, im]`` list of numbers."""
    pair = _expect(obj, list, path, "an [re, im] pair")
    if len(pair) != 2:
        raise ScenarioError(f"expected 2 entries, got {len(pair)}", path)
    for part in pair:
        if isinstance(part, bool) or not isinstance(part, Real):
            raise ScenarioError("entries must be real numbers", path)
    return complex(float(pair[0]), float(pair[1]))


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_fiber_value(descriptor: FiberDescriptor, obj, path: str) -> FiberElement:
    if descriptor.kind == "scalar":
        return FiberElement.scalar(decode_complex(obj, path))
    entries = _expect(obj, list, path, "a list of [re, im] pairs")
    if descriptor.kind == "matrix":
        n = descriptor.size
        if len(entries) != n * n:
            raise ScenarioError(
                f"matrix({n}) literal needs {n * n} row-major entries, got {len(entries)}",
                path,
            )
        flat = [decode_complex(e, f"{path}[{i}]") for i, e in enumerate(entries)]
        return FiberElement(descriptor, np.array(flat).reshape(n, n))
    if len(entries) != descriptor.size:
        raise ScenarioError(
            f"function({descriptor.size}) literal needs {descriptor.size} entries, "
            f"got {len(entries)}",
            path,
        )
    flat = [decode_complex(e, f"{path}[{i}]") for i, e in enumerate(entries)]
    return FiberElement(descriptor, np.array(flat))


def encode_fiber_value(element: FiberElement):
    if element.descriptor.kind == "scalar":
        return encode_complex(complex(element.data))
    return [encode_complex(z) for z in np.asarray(element.data).reshape(-1)]


def decode_section(bundle: Bundle, obj, path: str) -> Section:
    table = _expect(obj, dict, path, "an atom-to-literal object")
    extra = set(table) - set(bundle.space.atoms)
    if extra:
        raise ScenarioError(
            f"unknown atom {sorted(extra)[0]!r}", f"{path}.{sorted(extra)[0]}"
        )
    values = {}
    for atom in bundle.space.atoms:
        if atom not in table:
            raise ScenarioError(f"missing value for atom {atom!r}", path)
        values[atom] = decode_fiber_value(
            bundle.descriptor(atom), table[atom], f"{path}.{atom}"
        )
    return bundle.section(values)


def encode_section(section: Section) -> dict:
    return {
        atom: encode_fiber_value(value)
        for atom, value in zip(section.bundle.space.atoms, section.values)
    }


def encode_efunction(fn: EFunction) -> dict:
    return {
        atom: encode_complex(z) for atom, z in zip(fn.space.atoms, fn.values)
    }


def _decode_space(obj) -> AtomicMeasureSpace:
    rows = _expect(obj, list, "space", "a list of {atom, weight} objects")
    if not rows:
        raise ScenarioError("at least one atom is required", "space")
    atoms, weights = [], []
    for i, row in enumerate(rows):
        row = _expect(row, dict, f"space[{i}]", "an {atom, weight} object")
        extra = set(row) - {"atom", "weight"}
        if extra:
            raise ScenarioError(f"unknown key {sorted(extra)[0]!r}", f"space[{i}]")
        atom = _expect(row.get("atom"), str, f"space[{i}].atom", "a string")
        weight = row.get("weight")
        if isinstance(weight, bool) or not isinstance(weight, Real):
            raise ScenarioError("expected a positive number", f"space[{i}].weight")
        if atom in atoms:
            raise ScenarioError(f"duplicate atom {atom!r}", f"space[{i}].atom")
        if not float(weight) > 0.0:
            raise ScenarioError("weights must be positive", f"space[{i}].weight")
        atoms.append(atom)
        weights.append(float(weight))
    return AtomicMeasureSpace(tuple(atoms), tuple(weights))


def _decode_descriptor(obj, path: str) -> FiberDescriptor:
    row = _expect(obj, dict, path, "a {kind, size} object")
    extra = set(row) - {"kind", "size"}
    if extra:
        raise ScenarioError(f"unknown key {sorted(extra)[0]!r}", path)
    kind = _expect(row.get("kind"), str, f"{path}.kind", "a string")
    if kind == "scalar":
        if "size" in row and row["size"] != 1:
            raise ScenarioError("scalar fibers have no size", f"{path}.size")
        return FiberDescriptor.scalar()
    size = row.get("size")
    if isinstance(size, bool) or not isinstance(size, int):
        raise ScenarioError("expected an integer size", f"{path}.size")
    try:
        if kind == "matrix":
            return FiberDescriptor.matrix(size)
        if kind == "function":
            return FiberDescriptor.function(size)
    except Exception as exc:
        raise ScenarioError(str(exc), path) from exc
    raise ScenarioError(f"unknown fiber kind {kind!r}", f"{path}.kind")


_KNOWN_PARAMS = {
    "norms": {"section"},
    "invert": {"section", "tolerance"},
    "perturb": {"section", "perturbation", "tolerance"},
    "spectrum": {"section", "tolerance", "cap"},
    "reconstruct": {"sections", "samples"},
    "gelfand-mazur": {"samples", "tolerance"},
    "reverse-bound": {"samples", "tolerance", "bound"},
    "verify": {"seed", "samples", "tolerance", "cap"},
}


def _decode_command(obj, path: str, scenario_sections: dict, space) -> dict:
    row = _expect(obj, dict, path, "a command object")
    name = row.get("command")
    if not isinstance(name, str) or name not in COMMAND_NAMES:
        raise ScenarioError(
            f"unknown command {name!r}; expected one of {', '.join(COMMAND_NAMES)}",
            f"{path}.command",
        )
    extra = set(row) - _KNOWN_PARAMS[name] - {"command"}
    if extra:
        raise ScenarioError(f"unknown key {sorted(extra)[0]!r}", f"{path}.{sorted(extra)[0]}")

    def need_section(key):
        ref = row.get(key)
        if ref is not None and ref not in scenario_sections:
            raise ScenarioError(f"unknown section {ref!r}", f"{path}.{key}")

    if name in ("norms", "invert", "perturb", "spectrum"):
        if not isinstance(row.get("section"), str):
            raise ScenarioError("a section name is required", f"{path}.section")
        need_section("section")
    if name == "perturb":
        if not isinstance(row.get("perturbation"), str):
            raise ScenarioError("a perturbation section name is required", f"{path}.perturbation")
        need_section("perturbation")
    if name == "reconstruct" and "sections" in row:
        refs = _expect(row["sections"], list, f"{path}.sections", "a list of section names")
        for i, ref in enumerate(refs):
            if ref not in scenario_sections:
                raise ScenarioError(f"unknown section {ref!r}", f"{path}.sections[{i}]")
    if name == "reverse-bound" and "bound" in row:
        table = _expect(row["bound"], dict, f"{path}.bound", "an atom-to-number object")
        for atom, value in table.items():
            if atom not in space.atoms:
                raise ScenarioError(f"unknown atom {atom!r}", f"{path}.bound.{atom}")
            if isinstance(value, bool) or not isinstance(value, Real):
                raise ScenarioError("expected a real number", f"{path}.bound.{atom}")
        missing = set(space.atoms) - set(table)
        if missing:
            raise ScenarioError(
                f"missing value for atom {sorted(missing)[0]!r}", f"{path}.bound"
            )
    for key in ("tolerance",):
        if key in row and (isinstance(row[key], bool) or not isinstance(row[key], Real)):
            raise ScenarioError("expected a number", f"{path}.{key}")
    for key in ("samples", "cap", "seed"):
        if key in row and (isinstance(row[key], bool) or not isinstance(row[key], int)):
            raise ScenarioError("expected an integer", f"{path}.{key}")
    return dict(row)


def parse_scenario(data, source: str = "<memory>") -> Scenario:
    """Build a scenario from an already-decoded JSON object."""
    top = _expect(data, dict, "", "a JSON object")
    extra = set(top) - {"space", "fibers", "sections", "commands"}
    if extra:
        raise ScenarioError(f"unknown key {sorted(extra)[0]!r}", sorted(extra)[0])
    if "space" not in top:
        raise ScenarioError("a space is required", "space")
    space = _decode_space(top["space"])

    fibers = _expect(top.get("fibers"), dict, "fibers", "an atom-to-descriptor object")
    extra = set(fibers) - set(space.atoms)
    if extra:
        raise ScenarioError(f"unknown atom {sorted(extra)[0]!r}", f"fibers.{sorted(extra)[0]}")
    missing = set(space.atoms) - set(fibers)
    if missing:
        raise ScenarioError(f"missing fiber for atom {sorted(missing)[0]!r}", "fibers")
    descriptors = {
        atom: _decode_descriptor(fibers[atom], f"fibers.{atom}") for atom in space.atoms
    }
    bundle = Bundle.of(space, descriptors)

    sections: dict[str, Section] = {}
    raw_sections = top.get("sections", {})
    raw_sections = _expect(raw_sections, dict, "sections", "a name-to-values object")
    for name, obj in raw_sections.items():
        sections[name] = decode_section(bundle, obj, f"sections.{name}")

    raw_commands = top.get("commands", [])
    raw_commands = _expect(raw_commands, list, "commands", "a list of command objects")
    commands = tuple(
        _decode_command(obj, f"commands[{i}]", sections, space)
        for i, obj in enumerate(raw_commands)
    )
    return Scenario(source, space, bundle, sections, commands)


def load_scenario(path: str) -> Scenario:
    """Read and parse a scenario file."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScenarioError(str(exc), path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", path
        ) from exc
    return parse_scenario(data, source=path)
