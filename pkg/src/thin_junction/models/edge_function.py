"""Functions on a single edge and the weighted inner products of the graph."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P

from ..utils.exceptions import ValidationError
from .graph import EdgeSpec

QUADRATURE_POINTS = 128
MIN_GRID_POINTS = 5

_GL_NODES, _GL_WEIGHTS = legendre.leggauss(QUADRATURE_POINTS)

# one-sided fourth-order first derivative
_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def _trim(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.atleast_1d(coeffs)
    nonzero = np.flatnonzero(coeffs)
    return coeffs[: nonzero[-1] + 1] if nonzero.size else coeffs[:0]


@dataclass(frozen=True, eq=False)
class AnalyticEdgeFunction:
    """
    Closed-form edge function.

    With t = length - x (distance to the Dirichlet end) the function is
    Re(Z(t) exp(i omega t)) + R(t), Z a complex and R a real polynomial in t
    (ascending coefficients). A pure eigenfunction is Z = -i A, R = 0, i.e.
    A sin(omega (length - x)).
    """

    length: float
    omega: float
    trig: tuple[complex, ...] = ()
    poly: tuple[float, ...] = ()

    @classmethod
    def sine(cls, length: float, omega: float, amplitude: float) -> "AnalyticEdgeFunction":
        return cls(length, omega, trig=(-1j * amplitude,))

    @classmethod
    def zero(cls, length: float, omega: float) -> "AnalyticEdgeFunction":
        return cls(length, omega)

    @classmethod
    def from_arrays(
        cls, length: float, omega: float, trig: np.ndarray, poly: np.ndarray
    ) -> "AnalyticEdgeFunction":
        trig = _trim(np.asarray(trig, dtype=complex))
        poly = _trim(np.asarray(poly, dtype=float))
        return cls(length, omega, tuple(complex(c) for c in trig), tuple(float(c) for c in poly))

    @property
    def trig_coeffs(self) -> np.ndarray:
        return np.asarray(self.trig, dtype=complex) if self.trig else np.zeros(1, dtype=complex)

    @property
    def poly_coeffs(self) -> np.ndarray:
        return np.asarray(self.poly, dtype=float) if self.poly else np.zeros(1)

    @property
    def amplitude(self) -> float:
        """A of A sin(omega (length - x)); meaningful for pure sine functions."""
        return float((1j * self.trig_coeffs[0]).real)

    def _in_t(self, t: np.ndarray, order: int) -> np.ndarray:
        z = self.trig_coeffs
        for _ in range(order):
            z = P.polyadd(P.polyder(z), 1j * self.omega * z)
        r = P.polyder(self.poly_coeffs, order) if order else self.poly_coeffs
        return (P.polyval(t, z) * np.exp(1j * self.omega * t)).real + P.polyval(t, r)

    def value(self, x: np.ndarray | float) -> np.ndarray:
        return self._in_t(self.length - np.asarray(x, dtype=float), 0)

    def derivative(self, x: np.ndarray | float, order: int = 1) -> np.ndarray:
        return (-1) ** order * self._in_t(self.length - np.asarray(x, dtype=float), order)

    def vertex_trace(self) -> tuple[float, float]:
        return float(self.value(0.0)), float(self.derivative(0.0))

    def end_value(self) -> float:
        return float(self.value(self.length))

    def end_derivative(self) -> float:
        return float(self.derivative(self.length))

    def sample(self, points: int) -> "GridEdgeFunction":
        x = np.linspace(0.0, self.length, points)
        return GridEdgeFunction(self.length, self.value(x))

    def _check_compatible(self, other: "AnalyticEdgeFunction"):
        if other.length != self.length or other.omega != self.omega:
            raise ValueError("Analytic edge functions live on different edges or frequencies")

    def __add__(self, other: "AnalyticEdgeFunction") -> "AnalyticEdgeFunction":
        self._check_compatible(other)
        return AnalyticEdgeFunction.from_arrays(
            self.length,
            self.omega,
            P.polyadd(self.trig_coeffs, other.trig_coeffs),
            P.polyadd(self.poly_coeffs, other.poly_coeffs),
        )

    def __sub__(self, other: "AnalyticEdgeFunction") -> "AnalyticEdgeFunction":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "AnalyticEdgeFunction":
        return AnalyticEdgeFunction.from_arrays(
            self.length, self.omega, scalar * self.trig_coeffs, scalar * self.poly_coeffs
        )

    __rmul__ = __mul__

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "analytic",
            "length": self.length,
            "omega": self.omega,
            "trig": [[c.real, c.imag] for c in self.trig],
            "poly": list(self.poly),
        }


@dataclass(frozen=True, eq=False)
class GridEdgeFunction:
    """Edge function given by samples on a uniform grid over [0, length]."""

    length: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValidationError("Grid edge function needs a 1-D array of samples", field="values")
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls, length: float, points: int) -> "GridEdgeFunction":
        return cls(length, np.zeros(points))

    @property
    def points(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return self.length / (self.values.size - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.values.size)

    def _require_stencil(self):
        if self.values.size < MIN_GRID_POINTS:
            raise ValidationError(
                f"Grid edge function needs at least {MIN_GRID_POINTS} samples for boundary "
                f"derivatives, got {self.values.size}",
                field="values",
                value=self.values.size,
            )

    def value(self, x: np.ndarray | float) -> np.ndarray:
        return np.interp(x, self.grid, self.values)

    def derivative(self, x: np.ndarray | float) -> np.ndarray:
        slopes = np.gradient(self.values, self.spacing, edge_order=2)
        return np.interp(x, self.grid, slopes)

    def vertex_trace(self) -> tuple[float, float]:
        self._require_stencil()
        return float(self.values[0]), float(_STENCIL @ self.values[:5] / self.spacing)

    def end_value(self) -> float:
        return float(self.values[-1])

    def end_derivative(self) -> float:
        self._require_stencil()
        return float(-(_STENCIL @ self.values[::-1][:5]) / self.spacing)

    def sample(self, points: int) -> "GridEdgeFunction":
        if points == self.values.size:
            return self
        x = np.linspace(0.0, self.length, points)
        return GridEdgeFunction(self.length, self.value(x))

    def _check_compatible(self, other: "GridEdgeFunction"):
        if other.length != self.length or other.values.size != self.values.size:
            raise ValueError("Grid edge functions live on different grids")

    def __add__(self, other: "GridEdgeFunction") -> "GridEdgeFunction":
        self._check_compatible(other)
        return GridEdgeFunction(self.length, self.values + other.values)

    def __sub__(self, other: "GridEdgeFunction") -> "GridEdgeFunction":
        self._check_compatible(other)
        return GridEdgeFunction(self.length, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridEdgeFunction":
        return GridEdgeFunction(self.length, scalar * self.values)

    __rmul__ = __mul__

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "grid", "length": self.length, "values": self.values.tolist()}


EdgeFunction = AnalyticEdgeFunction | GridEdgeFunction
EdgeTriple = tuple[EdgeFunction, EdgeFunction, EdgeFunction]


def vertex_trace(f: EdgeFunction) -> tuple[float, float]:
    """Value and derivative of an edge function at the vertex (x = 0)."""
    return f.vertex_trace()


def edge_function_from_dict(data: dict[str, Any]) -> EdgeFunction:
    if data["kind"] == "analytic":
        return AnalyticEdgeFunction(
            float(data["length"]),
            float(data["omega"]),
            tuple(complex(re, im) for re, im in data["trig"]),
            tuple(float(c) for c in data["poly"]),
        )
    return GridEdgeFunction(float(data["length"]), np.asarray(data["values"], dtype=float))


def _as_common_grid(f: EdgeFunction, g: EdgeFunction) -> tuple[GridEdgeFunction, GridEdgeFunction]:
    points = max(
        (fn.points for fn in (f, g) if isinstance(fn, GridEdgeFunction)),
        default=None,
    )
    return f.sample(points), g.sample(points)


def edge_integral(edge: EdgeSpec, f: EdgeFunction, g: EdgeFunction, kind: str = "mass") -> float:
    """
    Weighted integral of a product on one edge.

    Args:
        kind: "energy" for the integral of h^2 f' g', "mass" for h^2 f g and
            "plain" for f g

    Grid functions use the P1 finite-element forms with h^2 at element
    midpoints, so the products match the assembled stiffness and mass
    matrices exactly.
    """
    if isinstance(f, AnalyticEdgeFunction) and isinstance(g, AnalyticEdgeFunction):
        x = 0.5 * edge.length * (_GL_NODES + 1.0)
        weights = 0.5 * edge.length * _GL_WEIGHTS
        h2 = edge.h(x) ** 2 if kind != "plain" else 1.0
        if kind == "energy":
            integrand = f.derivative(x) * g.derivative(x)
        else:
            integrand = f.value(x) * g.value(x)
        return float(np.sum(weights * h2 * integrand))

    fg, gg = _as_common_grid(f, g)
    a, b = fg.values, gg.values
    step = fg.spacing
    midpoints = 0.5 * (fg.grid[:-1] + fg.grid[1:])
    h2 = edge.h(midpoints) ** 2 if kind != "plain" else np.ones_like(midpoints)
    if kind == "energy":
        return float(np.sum(h2 * np.diff(a) * np.diff(b)) / step)
    a0, a1, b0, b1 = a[:-1], a[1:], b[:-1], b[1:]
    return float(
        np.sum(h2 * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1)) * step / 6.0
    )


def energy_product(edges: Sequence[EdgeSpec], u: Sequence[EdgeFunction], v: Sequence[EdgeFunction]) -> float:
    """Sum over edges of the integral of h^2 u' v'."""
    return sum(edge_integral(e, a, b, "energy") for e, a, b in zip(edges, u, v, strict=True))


def mass_product(edges: Sequence[EdgeSpec], u: Sequence[EdgeFunction], v: Sequence[EdgeFunction]) -> float:
    """Sum over edges of the integral of h^2 u v."""
    return sum(edge_integral(e, a, b, "mass") for e, a, b in zip(edges, u, v, strict=True))


def plain_product(edges: Sequence[EdgeSpec], u: Sequence[EdgeFunction], v: Sequence[EdgeFunction]) -> float:
    """Sum over edges of the integral of u v."""
    return sum(edge_integral(e, a, b, "plain") for e, a, b in zip(edges, u, v, strict=True))
