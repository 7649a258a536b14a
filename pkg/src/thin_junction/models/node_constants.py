"""Junction constants consumed by the expansion recursion."""

import re
from dataclasses import dataclass, field
from typing import Any

from ..utils.exceptions import ValidationError

_KEY_PATTERN = re.compile(r"^\(\s*-?\d+(\s*,\s*-?\d+)*\s*\)$")

DeltaKey = tuple[int, int, int]  # (k, p, edge)
MassKey = tuple[int, int]  # (k, p)


def parse_key(text: str) -> tuple[int, ...]:
    """Parse a table key such as ``"(1,2)"``."""
    if not _KEY_PATTERN.match(text.strip()):
        raise ValidationError(f"Malformed table key '{text}'", field="node", value=text)
    return tuple(int(part) for part in text.strip()[1:-1].split(","))


def _edge_key(text: str) -> DeltaKey:
    parts = parse_key(text)
    if len(parts) == 2:
        k, i = parts
        p = 0
    elif len(parts) == 3:
        k, p, i = parts
    else:
        raise ValidationError(f"Edge table key must be (k,i) or (k,p,i): '{text}'", field="node")
    if i not in (1, 2, 3):
        raise ValidationError(f"Edge index must be 1, 2 or 3 in '{text}'", field="node", value=i)
    return (k, p, i)


def _mass_key(text: str) -> MassKey:
    parts = parse_key(text)
    if len(parts) == 1:
        return (parts[0], 0)
    if len(parts) == 2:
        return (parts[0], parts[1])
    raise ValidationError(f"Mass table key must be (k) or (k,p): '{text}'", field="node")


def format_edge_key(key: DeltaKey) -> str:
    k, p, i = key
    return f"({k},{i})" if p == 0 else f"({k},{p},{i})"


def format_mass_key(key: MassKey) -> str:
    k, p = key
    return f"({k})" if p == 0 else f"({k},{p})"


@dataclass(frozen=True)
class NodeConstants:
    """
    Tables of junction functionals, keyed by the exponent k - p*alpha.

    Attributes:
        delta: (k, p, i) -> vertex jump delta on edge i
        mass: (k, p) -> node integral of rho0 times the bounded part of N
        tails: (k, p, i) -> outlet integral of N - G on edge i
        provenance: table label -> "config" or "computed(...)"
    """

    delta: dict[DeltaKey, float] = field(default_factory=dict)
    mass: dict[MassKey, float] = field(default_factory=dict)
    tails: dict[DeltaKey, float] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for (k, p, i), value in self.delta.items():
            if k == 0 and p == 0 and value != 0.0:
                raise ValidationError(
                    f"delta at exponent 0 must vanish, got {value} on edge {i}",
                    field="delta_table",
                    value=value,
                )

    @property
    def is_empty(self) -> bool:
        return not (self.delta or self.mass or self.tails)

    def merged(self, other: "NodeConstants") -> "NodeConstants":
        """Entries of ``other`` override entries of ``self``."""
        return NodeConstants(
            delta={**self.delta, **other.delta},
            mass={**self.mass, **other.mass},
            tails={**self.tails, **other.tails},
            provenance={**self.provenance, **other.provenance},
        )

    def to_tables(self) -> dict[str, Any]:
        """Tables in the configuration's node schema (sorted keys)."""
        data: dict[str, Any] = {}
        if self.delta:
            data["delta_table"] = {
                format_edge_key(key): self.delta[key] for key in sorted(self.delta)
            }
        if self.mass:
            data["mass_table"] = {format_mass_key(key): self.mass[key] for key in sorted(self.mass)}
        if self.tails:
            data["tail_table"] = {
                format_edge_key(key): self.tails[key] for key in sorted(self.tails)
            }
        return data

    def to_dict(self) -> dict[str, Any]:
        data = self.to_tables()
        if self.provenance:
            data["provenance"] = {label: self.provenance[label] for label in sorted(self.provenance)}
        return data

    @classmethod
    def from_tables(cls, data: dict[str, Any], source: str = "config") -> "NodeConstants":
        """
        Read the tables of a node block.

        Provenance recorded in ``data["provenance"]`` is kept; other entries
        are attributed to ``source``.
        """
        delta = {_edge_key(k): float(v) for k, v in data.get("delta_table", {}).items()}
        mass = {_mass_key(k): float(v) for k, v in data.get("mass_table", {}).items()}
        tails = {_edge_key(k): float(v) for k, v in data.get("tail_table", {}).items()}

        recorded = dict(data.get("provenance", {}))
        provenance = {}
        for table, keys, fmt in (
            ("delta_table", delta, format_edge_key),
            ("mass_table", mass, format_mass_key),
            ("tail_table", tails, format_edge_key),
        ):
            for key in keys:
                label = f"{table}{fmt(key)}"
                provenance[label] = recorded.get(label, source)

        return cls(delta=delta, mass=mass, tails=tails, provenance=provenance)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NodeConstants":
        return cls.from_tables(data, source="config")


@dataclass(frozen=True)
class InnerRequest:
    """
    Data of one inner junction problem, as known to the recursion.

    Attributes:
        label: Exponent label used in messages
        provenance: (k, p) of the exponent k - p*alpha
        outlet_slopes: Linear growth of N along each outlet
        node_coefficient: Factor multiplying rho0 in the node source
    """

    label: str
    provenance: tuple[int, int]
    outlet_slopes: tuple[float, float, float] = (0.0, 0.0, 0.0)
    node_coefficient: float = 0.0


@dataclass(frozen=True)
class InnerConstants:
    """
    Junction functionals of one exponent.

    Attributes:
        delta: (delta_2, delta_3)
        mass_remainder: Node integral of rho0 times the bounded part of N,
            None when no table supplies it
        tails: Outlet integrals of N - G, None where unknown
        source: "config" or "computed(...)"
    """

    delta: tuple[float, float]
    mass_remainder: float | None = 0.0
    tails: tuple[float | None, float | None, float | None] = (None, None, None)
    source: str = "config"

    @property
    def tail_sum(self) -> float:
        return sum(t for t in self.tails if t is not None)

    @property
    def tails_complete(self) -> bool:
        return all(t is not None for t in self.tails)
