"""Star graph geometry: edges, radius profiles and the node."""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..utils.exceptions import ValidationError
from .node_constants import NodeConstants

EDGE_COUNT = 3
FLAT_MARGIN_FRACTION = 0.05
MIN_RADIUS_SAMPLES = 8


@dataclass(frozen=True)
class ConstantRadius:
    """Cross-section radius constant along the edge."""

    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValidationError(f"Radius must be positive, got {self.h}", field="radius", value=self.h)

    def value(self, x: np.ndarray | float, length: float) -> np.ndarray:
        return np.full_like(np.asarray(x, dtype=float), self.h)

    def derivative(self, x: np.ndarray | float, length: float) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    def to_dict(self) -> dict[str, Any]:
        return {"const": self.h}


@dataclass(frozen=True)
class SampledRadius:
    """
    Radius given by uniform samples on [0, length].

    Samples are interpolated with a monotone cubic (PCHIP), which keeps the
    flat end margins exactly flat.
    """

    samples: tuple[float, ...]

    def __post_init__(self):
        values = np.asarray(self.samples, dtype=float)
        if values.size < MIN_RADIUS_SAMPLES:
            raise ValidationError(
                f"Sampled radius needs at least {MIN_RADIUS_SAMPLES} samples",
                field="radius.samples",
                value=values.size,
            )
        if not np.all(values > 0):
            raise ValidationError("Radius samples must be strictly positive", field="radius.samples")

        # flat on at least 5% of the edge at both ends
        intervals = values.size - 1
        margin = math.ceil(FLAT_MARGIN_FRACTION * intervals)
        scale = float(np.max(values))
        head = values[: margin + 1]
        tail = values[-(margin + 1) :]
        if np.ptp(head) > 1e-12 * scale or np.ptp(tail) > 1e-12 * scale:
            raise ValidationError(
                f"Sampled radius must be constant on the first and last "
                f"{FLAT_MARGIN_FRACTION:.0%} of the edge",
                field="radius.samples",
            )

    def _interpolant(self, length: float) -> PchipInterpolator:
        grid = np.linspace(0.0, length, len(self.samples))
        return PchipInterpolator(grid, np.asarray(self.samples, dtype=float))

    def value(self, x: np.ndarray | float, length: float) -> np.ndarray:
        return self._interpolant(length)(np.asarray(x, dtype=float))

    def derivative(self, x: np.ndarray | float, length: float) -> np.ndarray:
        return self._interpolant(length).derivative()(np.asarray(x, dtype=float))

    def to_dict(self) -> dict[str, Any]:
        return {"samples": list(self.samples)}


RadiusProfile = ConstantRadius | SampledRadius


def radius_from_dict(data: dict[str, Any]) -> RadiusProfile:
    """Parse ``{"const": h}`` or ``{"samples": [...]}``."""
    if "const" in data:
        return ConstantRadius(float(data["const"]))
    if "samples" in data:
        return SampledRadius(tuple(float(v) for v in data["samples"]))
    raise ValidationError("Radius must be {'const': h} or {'samples': [...]}", field="radius")


@dataclass(frozen=True)
class EdgeSpec:
    """
    One edge of the star.

    Attributes:
        length: Edge length, at least 1
        radius: Cross-section radius profile h(x)
    """

    length: float
    radius: RadiusProfile

    def __post_init__(self):
        if not self.length >= 1.0:
            raise ValidationError(
                f"Edge length must be at least 1, got {self.length}",
                field="length",
                value=self.length,
            )

    @property
    def is_constant(self) -> bool:
        return isinstance(self.radius, ConstantRadius)

    def h(self, x: np.ndarray | float) -> np.ndarray:
        return self.radius.value(x, self.length)

    def dh(self, x: np.ndarray | float) -> np.ndarray:
        return self.radius.derivative(x, self.length)

    @property
    def h0(self) -> float:
        """Radius at the vertex."""
        return float(self.h(0.0))

    def to_dict(self) -> dict[str, Any]:
        return {"length": self.length, "radius": self.radius.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EdgeSpec":
        return cls(length=float(data["length"]), radius=radius_from_dict(data["radius"]))


@dataclass(frozen=True)
class DensityProfile:
    """
    Node density rho0(xi) given by a small expression grammar.

    ``{"constant": c}`` or
    ``{"gaussian": {"center": [x, y, z], "width": w, "amplitude": a}}``.
    """

    kind: str
    amplitude: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "gaussian"):
            raise ValidationError(f"Unknown density kind '{self.kind}'", field="rho0", value=self.kind)
        if not self.amplitude > 0:
            raise ValidationError("Density amplitude must be positive", field="rho0", value=self.amplitude)
        if self.kind == "gaussian" and not self.width > 0:
            raise ValidationError("Gaussian width must be positive", field="rho0", value=self.width)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on an array of shape (..., 3)."""
        points = np.asarray(points, dtype=float)
        if self.kind == "constant":
            return np.full(points.shape[:-1], self.amplitude)
        r2 = np.sum((points - np.asarray(self.center)) ** 2, axis=-1)
        return self.amplitude * np.exp(-r2 / (2.0 * self.width**2))

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "constant":
            return {"constant": self.amplitude}
        return {
            "gaussian": {
                "center": list(self.center),
                "width": self.width,
                "amplitude": self.amplitude,
            }
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DensityProfile":
        if "constant" in data:
            return cls("constant", float(data["constant"]))
        if "gaussian" in data:
            g = data["gaussian"]
            center = tuple(float(c) for c in g.get("center", (0.0, 0.0, 0.0)))
            if len(center) != 3:
                raise ValidationError("Gaussian center must have 3 coordinates", field="rho0")
            return cls(
                "gaussian",
                amplitude=float(g["amplitude"]),
                center=center,
                width=float(g["width"]),
            )
        raise ValidationError("rho0 must be {'constant': c} or {'gaussian': {...}}", field="rho0")


@dataclass(frozen=True)
class JunctionSettings:
    """
    Parameters of the truncated junction solves.

    Attributes:
        spacing: Voxel size (ell0 / 8 if None)
        length: Truncation length of each outlet
        profile: Cut-off smoothstep, "quintic" or "septic"
    """

    spacing: float | None = None
    length: float = 6.0
    profile: str = "quintic"

    def __post_init__(self):
        if self.spacing is not None and not self.spacing > 0:
            raise ValidationError("Junction spacing must be positive", field="junction.spacing")
        if self.profile not in ("quintic", "septic"):
            raise ValidationError(
                f"Unknown cut-off profile '{self.profile}'",
                field="junction.profile",
                value=self.profile,
            )

    def to_dict(self) -> dict[str, Any]:
        return {"spacing": self.spacing, "length": self.length, "profile": self.profile}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "JunctionSettings":
        spacing = data.get("spacing")
        return cls(
            spacing=float(spacing) if spacing is not None else None,
            length=float(data.get("length", 6.0)),
            profile=data.get("profile", "quintic"),
        )


@dataclass(frozen=True)
class NodeSpec:
    """
    The junction node.

    Attributes:
        ell0: Node half-size, in (0, 1/3)
        mass_integral: Integral of rho0 over the node
        node_volume: Volume of the rescaled node
        density_bounds: Optional (c0, c1) bounds on rho0
        constants: Node constants supplied by the configuration
        rho0: Optional density expression for the junction solves
        junction: Optional junction solve parameters
    """

    ell0: float
    mass_integral: float
    node_volume: float
    density_bounds: tuple[float, float] | None = None
    constants: NodeConstants = field(default_factory=NodeConstants)
    rho0: DensityProfile | None = None
    junction: JunctionSettings | None = None

    def __post_init__(self):
        if not (0.0 < self.ell0 < 1.0 / 3.0):
            raise ValidationError(
                f"ell0 out of range (0, 1/3): {self.ell0}", field="ell0", value=self.ell0
            )
        if not self.mass_integral >= 0:
            raise ValidationError(
                "mass_integral must be nonnegative", field="mass_integral", value=self.mass_integral
            )
        if not self.node_volume > 0:
            raise ValidationError(
                "node_volume must be positive", field="node_volume", value=self.node_volume
            )
        if self.density_bounds is not None:
            c0, c1 = self.density_bounds
            mean = self.mass_integral / self.node_volume
            if not (0 < c0 <= c1):
                raise ValidationError(
                    "density_bounds must satisfy 0 < c0 <= c1", field="density_bounds"
                )
            if not (c0 <= mean <= c1):
                raise ValidationError(
                    f"mean density {mean} outside density_bounds [{c0}, {c1}]",
                    field="density_bounds",
                    value=mean,
                )

    def density(self) -> DensityProfile:
        """rho0 expression, defaulting to the constant mean density."""
        if self.rho0 is not None:
            return self.rho0
        return DensityProfile("constant", self.mass_integral / self.node_volume)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "ell0": self.ell0,
            "mass_integral": self.mass_integral,
            "node_volume": self.node_volume,
        }
        if self.density_bounds is not None:
            data["density_bounds"] = list(self.density_bounds)
        data.update(self.constants.to_dict())
        if self.rho0 is not None:
            data["rho0"] = self.rho0.to_dict()
        if self.junction is not None:
            data["junction"] = self.junction.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NodeSpec":
        bounds = data.get("density_bounds")
        return cls(
            ell0=float(data["ell0"]),
            mass_integral=float(data["mass_integral"]),
            node_volume=float(data["node_volume"]),
            density_bounds=(float(bounds[0]), float(bounds[1])) if bounds is not None else None,
            constants=NodeConstants.from_tables(data, source="config"),
            rho0=DensityProfile.from_dict(data["rho0"]) if "rho0" in data else None,
            junction=JunctionSettings.from_dict(data["junction"]) if "junction" in data else None,
        )


@dataclass(frozen=True)
class StarGraph:
    """
    Metric star graph with three edges meeting at the node.

    Edge i runs from the vertex (x = 0) to its Dirichlet end (x = length).
    """

    edges: tuple[EdgeSpec, EdgeSpec, EdgeSpec]
    node: NodeSpec

    def __post_init__(self):
        if len(self.edges) != EDGE_COUNT:
            raise ValidationError(
                f"Star graph needs exactly {EDGE_COUNT} edges, got {len(self.edges)}",
                field="edges",
                value=len(self.edges),
            )

    @classmethod
    def constant(
        cls,
        lengths: tuple[float, float, float],
        radii: tuple[float, float, float],
        node: NodeSpec,
    ) -> "StarGraph":
        """Star graph with constant cross-sections."""
        return cls(
            edges=tuple(
                EdgeSpec(float(length), ConstantRadius(float(h)))
                for length, h in zip(lengths, radii, strict=True)
            ),
            node=node,
        )

    @property
    def lengths(self) -> np.ndarray:
        return np.array([edge.length for edge in self.edges])

    @cached_property
    def vertex_weights(self) -> np.ndarray:
        """h_i(0)^2 for the Kirchhoff sums."""
        return np.array([edge.h0**2 for edge in self.edges])

    @property
    def is_constant_radius(self) -> bool:
        return all(edge.is_constant for edge in self.edges)

    @property
    def mass(self) -> float:
        return self.node.mass_integral

    def vertex_mass_coefficient(self, has_vertex_mass: bool) -> float:
        """beta = m/pi when the vertex carries mass, otherwise 0."""
        return self.mass / math.pi if has_vertex_mass else 0.0

    def with_node(self, **changes) -> "StarGraph":
        return replace(self, node=replace(self.node, **changes))

    def to_dict(self) -> dict[str, Any]:
        return {
            "edges": [edge.to_dict() for edge in self.edges],
            "node": self.node.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StarGraph":
        return cls(
            edges=tuple(EdgeSpec.from_dict(edge) for edge in data["edges"]),
            node=NodeSpec.from_dict(data["node"]),
        )
