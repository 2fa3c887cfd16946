"""Line-oriented .crn text format and the JSON manifest sidecar.

Format (whitespace-tolerant, '#' comments)::

    input X1 X2
    output Y
    voter L1=yes L0=no        # deciders only
    init  L=1 Yp=3            # initial context
    rxn 2 X -> Y
    rxn A -> 0                # '0' is the empty side
    rxn X -> 2 Y @ k=1        # optional rate constant, default 1

Species are declared implicitly by use. Serialization is canonical:
sections in the order above, reactions in declaration order, reaction
sides sorted by species name, single spaces between tokens, so that a
parse/serialize round trip is byte-stable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import Crc, Crd, Crn, Reaction, Species, valid_species_name
from .errors import FormatError

_RATE_RE = re.compile(r"^\s*k\s*=\s*([0-9.eE+-]+)\s*$")


def _parse_side(text: str, where: str) -> list[tuple[str, int]]:
    text = text.strip()
    if text == "0":
        return []
    terms = []
    for raw in text.split("+"):
        toks = raw.split()
        if len(toks) == 1:
            coeff, name = 1, toks[0]
        elif len(toks) == 2:
            try:
                coeff = int(toks[0])
            except ValueError:
                raise FormatError(f"{where}: bad stoichiometry {toks[0]!r}") from None
            name = toks[1]
        else:
            raise FormatError(f"{where}: cannot parse term {raw.strip()!r}")
        if coeff <= 0:
            raise FormatError(f"{where}: stoichiometry must be positive")
        if not valid_species_name(name):
            raise FormatError(f"{where}: invalid species name {name!r}")
        terms.append((name, coeff))
    return terms


def parse_reaction_line(text: str) -> Reaction:
    """Parse the body of a 'rxn' line, e.g. '2 X -> Y @ k=2'."""
    rate = 1.0
    if "@" in text:
        text, rate_part = text.split("@", 1)
        m = _RATE_RE.match(rate_part)
        if not m:
            raise FormatError(f"bad rate annotation {rate_part.strip()!r}")
        rate = float(m.group(1))
    if "->" not in text:
        raise FormatError(f"reaction {text.strip()!r} has no '->'")
    left, right = text.split("->", 1)
    return Reaction(_parse_side(left, "reactants"), _parse_side(right, "products"), rate)


@dataclass
class ParsedCrn:
    """Raw sections of a .crn file, before semantic wrapping."""

    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    voters: dict[str, int] = field(default_factory=dict)
    init: dict[str, int] = field(default_factory=dict)
    reactions: list[Reaction] = field(default_factory=list)

    def species_order(self) -> list[str]:
        """Deterministic species order: first appearance across sections."""
        order: list[str] = []
        seen = set()

        def add(name):
            if name not in seen:
                seen.add(name)
                order.append(name)

        for name in self.inputs:
            add(name)
        for name in self.outputs:
            add(name)
        for name in self.voters:
            add(name)
        for name in self.init:
            add(name)
        for rxn in self.reactions:
            for name, _ in rxn.reactants:
                add(name)
            for name, _ in rxn.products:
                add(name)
        return order

    def crn(self) -> Crn:
        return Crn([Species(n) for n in self.species_order()], self.reactions)

    def to_machine(self, count_bound=None, bounded: bool = True):
        """Wrap as Crd (voter section present) or Crc (output section) or Crn."""
        if self.voters and self.outputs:
            raise FormatError("file declares both voters and outputs")
        for name in self.init:
            if name in self.inputs:
                raise FormatError(f"init assigns input species {name!r}")
        crn = self.crn()
        context = dict(self.init)
        if self.voters:
            return Crd(crn, tuple(self.inputs), self.voters, context)
        if self.outputs:
            return Crc(
                crn,
                tuple(self.inputs),
                tuple(self.outputs),
                context,
                declared_count_bound=count_bound,
                bounded=bounded,
            )
        return crn


def parse(text: str) -> ParsedCrn:
    doc = ParsedCrn()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "input":
            for name in rest.split():
                if not valid_species_name(name):
                    raise FormatError(f"{where}: invalid species name {name!r}")
                if name in doc.inputs:
                    raise FormatError(f"{where}: duplicate input {name!r}")
                doc.inputs.append(name)
        elif key == "output":
            for name in rest.split():
                if not valid_species_name(name):
                    raise FormatError(f"{where}: invalid species name {name!r}")
                if name in doc.outputs:
                    raise FormatError(f"{where}: duplicate output {name!r}")
                doc.outputs.append(name)
        elif key == "voter":
            for item in rest.split():
                name, _, val = item.partition("=")
                if val not in ("yes", "no"):
                    raise FormatError(f"{where}: voter value must be yes or no")
                if not valid_species_name(name):
                    raise FormatError(f"{where}: invalid species name {name!r}")
                doc.voters[name] = 1 if val == "yes" else 0
        elif key == "init":
            for item in rest.split():
                name, _, val = item.partition("=")
                try:
                    count = int(val)
                except ValueError:
                    raise FormatError(f"{where}: bad count {val!r}") from None
                if count < 0:
                    raise FormatError(f"{where}: negative count")
                if not valid_species_name(name):
                    raise FormatError(f"{where}: invalid species name {name!r}")
                doc.init[name] = count
        elif key == "rxn":
            try:
                doc.reactions.append(parse_reaction_line(rest))
            except FormatError as exc:
                raise FormatError(f"{where}: {exc}") from None
        else:
            raise FormatError(f"{where}: unknown section {key!r}")
    return doc


def _side_str(terms) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{c} {n}" if c != 1 else n for n, c in terms)


def serialize(machine: Crn | Crd | Crc) -> str:
    """Canonical .crn text for a network or machine."""
    lines: list[str] = []
    if isinstance(machine, (Crd, Crc)):
        crn = machine.crn
        if machine.input_species:
            lines.append("input " + " ".join(machine.input_species))
        if isinstance(machine, Crc):
            lines.append("output " + " ".join(machine.output_species))
        else:
            votes = " ".join(
                f"{n}={'yes' if b else 'no'}" for n, b in sorted(machine.voters.items())
            )
            lines.append("voter " + votes)
        context = {n: c for n, c in machine.initial_context.items() if c > 0}
        if context:
            lines.append("init " + " ".join(f"{n}={c}" for n, c in sorted(context.items())))
    else:
        crn = machine
    for rxn in crn.reactions:
        line = f"rxn {_side_str(rxn.reactants)} -> {_side_str(rxn.products)}"
        if rxn.rate_constant != 1.0:
            line += f" @ k={rxn.rate_constant:g}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def manifest_path(crn_path: str | Path) -> Path:
    p = Path(crn_path)
    return p.with_suffix(p.suffix + ".manifest.json")


def write_manifest(crn_path: str | Path, machine: Crd | Crc, extra: dict | None = None) -> Path:
    """JSON sidecar mapping interface roles to species names."""
    doc: dict = {"inputs": list(machine.input_species)}
    if isinstance(machine, Crc):
        doc["kind"] = "crc"
        doc["outputs"] = list(machine.output_species)
        doc["count_bound"] = (
            list(machine.declared_count_bound) if machine.declared_count_bound else None
        )
        doc["bounded"] = machine.bounded
    else:
        doc["kind"] = "crd"
        doc["voters"] = {n: int(b) for n, b in sorted(machine.voters.items())}
    if extra:
        doc.update(extra)
    path = manifest_path(crn_path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def save(crn_path: str | Path, machine: Crn | Crd | Crc, extra: dict | None = None) -> None:
    Path(crn_path).write_text(serialize(machine))
    if isinstance(machine, (Crd, Crc)):
        write_manifest(crn_path, machine, extra)


def load(crn_path: str | Path):
    """Load a .crn file, applying its manifest sidecar when present."""
    text = Path(crn_path).read_text()
    doc = parse(text)
    count_bound = None
    bounded = True
    mpath = manifest_path(crn_path)
    if mpath.exists():
        manifest = json.loads(mpath.read_text())
        raw = manifest.get("count_bound")
        count_bound = tuple(raw) if raw else None
        bounded = bool(manifest.get("bounded", True))
    return doc.to_machine(count_bound=count_bound, bounded=bounded)
