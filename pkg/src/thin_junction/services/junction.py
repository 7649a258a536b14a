"""
Inner junction problems on a voxel model of the node and its outlets.

The rescaled junction is a cube around the origin with three square outlets
along the positive coordinate axes, truncated at length R. Fields are cell
averages of a finite-volume Neumann Laplacian; outlet caps carry prescribed
fluxes.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from ..models.graph import DensityProfile, JunctionSettings, StarGraph
from ..models.node_constants import InnerConstants, InnerRequest
from ..utils.exceptions import (
    CompatibilityError,
    ConvergenceError,
    MeshResolutionError,
    ValidationError,
)
from .base import BaseService

logger = logging.getLogger(__name__)

CG_TOLERANCE = 1e-8
RESIDUAL_LIMIT = 10 * CG_TOLERANCE
MAX_CG_ITERATIONS = 20000
AREA_TOLERANCE = 0.02
COMPATIBILITY_TOLERANCE = 1e-6
FIT_WINDOW = 2.0
CUTOFF_CLEARANCE = 4.0
CUTOFF_PROFILES = ("quintic", "septic")


def smoothstep(profile: str, t: np.ndarray) -> np.ndarray:
    """Monotone step from 0 at t <= 0 to 1 at t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    if profile == "quintic":
        return t**3 * (10.0 - 15.0 * t + 6.0 * t**2)
    if profile == "septic":
        return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)
    raise ValidationError(f"Unknown cut-off profile '{profile}'", field="profile", value=profile)


def _block_faces(index: np.ndarray) -> list[np.ndarray]:
    """Neighbour pairs inside a 3D block of cell indices."""
    return [
        np.stack([index[:-1].ravel(), index[1:].ravel()], axis=1),
        np.stack([index[:, :-1].ravel(), index[:, 1:].ravel()], axis=1),
        np.stack([index[:, :, :-1].ravel(), index[:, :, 1:].ravel()], axis=1),
    ]


@dataclass(frozen=True, eq=False)
class JunctionMesh:
    """
    Voxel model of the truncated junction.

    Cells are numbered block by block: the node cube first, then outlets
    1, 2 and 3. Outlet i runs along axis i; its cells are stored as
    (layer, u, v) with (u, v) the remaining axes in increasing order.

    Attributes:
        spacing: Voxel size
        length: Realized truncation length R
        half_width: Realized node half-width c
        outlet_cells: Half side of each outlet, in cells
        areas: Realized outlet cross-section areas
        target_areas: pi * h_i(0)^2
        centers: Cell centres, shape (N, 3)
        region: 0 for node cells, i for outlet i
        axial: Coordinate along the own outlet axis (0 in the node)
        layer: Layer index inside the outlet (-1 in the node)
        faces: Neighbour pairs, shape (F, 2)
        profile: Cut-off profile
    """

    spacing: float
    length: float
    half_width: float
    outlet_cells: tuple[int, int, int]
    areas: tuple[float, float, float]
    target_areas: tuple[float, float, float]
    centers: np.ndarray = field(repr=False)
    region: np.ndarray = field(repr=False)
    axial: np.ndarray = field(repr=False)
    layer: np.ndarray = field(repr=False)
    faces: np.ndarray = field(repr=False)
    profile: str = "quintic"

    @classmethod
    def build(
        cls,
        graph: StarGraph,
        spacing: float | None = None,
        length: float | None = None,
        profile: str | None = None,
    ) -> "JunctionMesh":
        """
        Mesh the junction of ``graph``.

        Raises:
            ValidationError: If R leaves no room for the cut-off support
            MeshResolutionError: If an outlet area misses pi h^2 by more than 2%
        """
        settings = graph.node.junction or JunctionSettings()
        ell0 = graph.node.ell0
        spacing = spacing or settings.spacing or ell0 / 8.0
        length = length or settings.length
        profile = profile or settings.profile
        if profile not in CUTOFF_PROFILES:
            raise ValidationError(f"Unknown cut-off profile '{profile}'", field="profile", value=profile)

        halves = tuple(
            max(1, round(math.sqrt(math.pi) * edge.h0 / (2.0 * spacing))) for edge in graph.edges
        )
        nc = max(math.ceil(ell0 / spacing - 1e-9), max(halves))
        n_len = round(length / spacing)
        half_width = nc * spacing
        if n_len * spacing < half_width + CUTOFF_CLEARANCE - 1e-9:
            raise ValidationError(
                f"Outlet length {n_len * spacing:g} must be at least {half_width + CUTOFF_CLEARANCE:g}",
                field="junction.length",
                value=length,
            )

        target_areas = tuple(math.pi * edge.h0**2 for edge in graph.edges)
        areas = tuple((2 * h * spacing) ** 2 for h in halves)
        for i, (area, target) in enumerate(zip(areas, target_areas, strict=True), start=1):
            if abs(area - target) > AREA_TOLERANCE * target:
                raise MeshResolutionError(
                    f"Outlet {i} area {area:.6g} misses pi*h^2 = {target:.6g} at spacing {spacing:g}",
                    solver="junction",
                    operation="build_mesh",
                )

        n = 2 * nc
        coords = (np.arange(n) - nc + 0.5) * spacing
        cube = np.arange(n**3).reshape(n, n, n)
        grids = np.meshgrid(coords, coords, coords, indexing="ij")
        centers = [np.stack(grids, axis=-1).reshape(-1, 3)]
        region = [np.zeros(n**3, dtype=np.int8)]
        axial = [np.zeros(n**3)]
        layer = [np.full(n**3, -1, dtype=np.int64)]
        faces = _block_faces(cube)

        offset = n**3
        layers = n_len - nc
        for i, h in enumerate(halves):
            m = 2 * h
            block = offset + np.arange(layers * m * m).reshape(layers, m, m)
            t = (np.arange(layers) + nc + 0.5) * spacing
            u = (np.arange(m) - h + 0.5) * spacing
            T, U, V = np.meshgrid(t, u, u, indexing="ij")
            points = [(T, U, V), (U, T, V), (U, V, T)][i]
            centers.append(np.stack(points, axis=-1).reshape(-1, 3))
            region.append(np.full(block.size, i + 1, dtype=np.int8))
            axial.append(T.ravel())
            layer.append(np.repeat(np.arange(layers), m * m))
            faces.extend(_block_faces(block))

            s = slice(nc - h, nc + h)
            face = [cube[n - 1, s, s], cube[s, n - 1, s], cube[s, s, n - 1]][i]
            faces.append(np.stack([face.ravel(), block[0].ravel()], axis=1))
            offset += block.size

        mesh = cls(
            spacing=spacing,
            length=n_len * spacing,
            half_width=half_width,
            outlet_cells=halves,
            areas=areas,
            target_areas=target_areas,
            centers=np.concatenate(centers),
            region=np.concatenate(region),
            axial=np.concatenate(axial),
            layer=np.concatenate(layer),
            faces=np.concatenate(faces),
            profile=profile,
        )
        logger.debug(
            f"Junction mesh: {mesh.size} cells, spacing {spacing:g}, R {mesh.length:g}, c {half_width:g}"
        )
        return mesh

    def with_profile(self, profile: str) -> "JunctionMesh":
        if profile not in CUTOFF_PROFILES:
            raise ValidationError(f"Unknown cut-off profile '{profile}'", field="profile", value=profile)
        return replace(self, profile=profile)

    @property
    def size(self) -> int:
        return len(self.region)

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    @property
    def layer_count(self) -> int:
        return int(self.layer.max()) + 1

    @cached_property
    def node_cells(self) -> np.ndarray:
        return np.flatnonzero(self.region == 0)

    @property
    def node_volume(self) -> float:
        return len(self.node_cells) * self.cell_volume

    def outlet(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.region == i)

    def cap(self, i: int) -> np.ndarray:
        return np.flatnonzero((self.region == i) & (self.layer == self.layer_count - 1))

    def cutoff(self) -> np.ndarray:
        """chi_i on outlet i, supported on [1 + c, 2 + c]; zero on the node."""
        chi = smoothstep(self.profile, self.axial - (1.0 + self.half_width))
        chi[self.region == 0] = 0.0
        return chi

    def cross_section_means(self, values: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Layer positions along outlet i and the mean of ``values`` on each layer."""
        cells = self.outlet(i)
        counts = np.bincount(self.layer[cells], minlength=self.layer_count)
        sums = np.bincount(self.layer[cells], weights=values[cells], minlength=self.layer_count)
        positions = (np.arange(self.layer_count) + 0.5) * self.spacing + self.half_width
        return positions, sums / counts

    def swap_permutation(self) -> np.ndarray:
        """
        Index map of the reflection exchanging axes 2 and 3.

        ``field[perm]`` is the reflected field. Requires equal outlets 2 and 3.
        """
        if self.outlet_cells[1] != self.outlet_cells[2]:
            raise ValidationError("Outlets 2 and 3 differ; no 2-3 symmetry", field="junction")
        n = round(2 * self.half_width / self.spacing)
        cube = np.arange(n**3).reshape(n, n, n).transpose(0, 2, 1).ravel()
        offsets = np.cumsum([n**3] + [len(self.outlet(i)) for i in (1, 2, 3)])
        layers = self.layer_count
        m1 = 2 * self.outlet_cells[0]
        first = offsets[0] + np.arange(layers * m1 * m1).reshape(layers, m1, m1).transpose(0, 2, 1)
        second = np.arange(offsets[1], offsets[2])
        third = np.arange(offsets[2], offsets[3])
        return np.concatenate([cube, first.ravel(), third, second])

    @cached_property
    def _degree(self) -> np.ndarray:
        p, q = self.faces[:, 0], self.faces[:, 1]
        return np.bincount(p, minlength=self.size) + np.bincount(q, minlength=self.size)

    def apply_laplacian(self, u: np.ndarray) -> np.ndarray:
        """Cell-integrated -Laplace(u) over the face stencil."""
        p, q = self.faces[:, 0], self.faces[:, 1]
        diff = u[p] - u[q]
        out = np.bincount(p, weights=diff, minlength=self.size)
        out -= np.bincount(q, weights=diff, minlength=self.size)
        return self.spacing * out

    def laplacian(self) -> tuple[LinearOperator, LinearOperator]:
        """The Neumann operator and its Jacobi preconditioner."""
        diagonal = self.spacing * self._degree
        op = LinearOperator((self.size, self.size), matvec=self.apply_laplacian, dtype=float)
        jacobi = LinearOperator((self.size, self.size), matvec=lambda x: x / diagonal, dtype=float)
        return op, jacobi

    def cap_vector(self, fluxes) -> np.ndarray:
        """Load of total outward flux ``fluxes[i-1]`` spread over cap i."""
        b = np.zeros(self.size)
        for i, flux in enumerate(fluxes, start=1):
            cells = self.cap(i)
            b[cells] += flux / len(cells)
        return b

    def to_dict(self) -> dict:
        return {
            "spacing": self.spacing,
            "length": self.length,
            "half_width": self.half_width,
            "cells": self.size,
            "areas": list(self.areas),
            "target_areas": list(self.target_areas),
            "profile": self.profile,
        }


@dataclass(frozen=True)
class InnerForcing:
    """
    Forcing of an inner problem.

    The field grows like ``outlet_slopes[i-1] * xi_i`` along outlet i and the
    node carries the source ``node_coefficient * density``. Without a
    density the node is massless.
    """

    outlet_slopes: tuple[float, float, float] = (0.0, 0.0, 0.0)
    node_coefficient: float = 0.0
    density: DensityProfile | None = None

    def source(self, mesh: JunctionMesh) -> np.ndarray:
        """Cell-integrated node source."""
        s = np.zeros(mesh.size)
        if self.density is not None and self.node_coefficient != 0.0:
            cells = mesh.node_cells
            s[cells] = self.node_coefficient * self.density(mesh.centers[cells]) * mesh.cell_volume
        return s

    def growth(self, mesh: JunctionMesh) -> np.ndarray:
        """sum_i psi_i xi_i chi_i on the mesh."""
        slopes = np.asarray(self.outlet_slopes, dtype=float)
        g = np.zeros(mesh.size)
        outlets = mesh.region > 0
        g[outlets] = slopes[mesh.region[outlets] - 1] * mesh.axial[outlets]
        return g * mesh.cutoff()

    def residual(self, mesh: JunctionMesh) -> np.ndarray:
        """
        Cell-integrated forcing of the bounded remainder.

        Node source plus the discrete Laplacian of the cut-off growth. It is
        supported on the node and the cut-off annuli.
        """
        caps = mesh.cap_vector(np.asarray(self.outlet_slopes) * np.asarray(mesh.areas))
        return self.source(mesh) + caps - mesh.apply_laplacian(self.growth(mesh))

    def compatibility_residual(self, mesh: JunctionMesh) -> float:
        """|int source + sum a_i psi_i| relative to the size of both terms."""
        total = self.source(mesh).sum()
        fluxes = np.asarray(self.outlet_slopes) * np.asarray(mesh.areas)
        scale = abs(total) + np.abs(fluxes).sum()
        return abs(total + fluxes.sum()) / scale if scale > 0 else 0.0


@dataclass(eq=False)
class NField:
    """
    Field on a junction mesh with its fitted outlet asymptotics.

    Attributes:
        mesh: The mesh
        values: Cell values
        slopes: Fitted slope per outlet
        offsets: Fitted offset per outlet
        flux_residual: Relative discrete divergence-theorem residual
        iterations: CG iterations
        label: Name used in logs and reports
    """

    mesh: JunctionMesh
    values: np.ndarray
    slopes: np.ndarray
    offsets: np.ndarray
    flux_residual: float
    iterations: int
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "slopes": self.slopes.tolist(),
            "offsets": self.offsets.tolist(),
            "flux_residual": self.flux_residual,
            "iterations": self.iterations,
        }


def _fit_outlets(mesh: JunctionMesh, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    slopes = np.zeros(3)
    offsets = np.zeros(3)
    for i in (1, 2, 3):
        positions, means = mesh.cross_section_means(values, i)
        window = positions >= mesh.length - FIT_WINDOW
        slopes[i - 1], offsets[i - 1] = np.polyfit(positions[window], means[window], 1)
    return slopes, offsets


def _flux_residual(mesh: JunctionMesh, slopes: np.ndarray, source_total: float) -> float:
    fluxes = slopes * np.asarray(mesh.areas)
    scale = np.abs(fluxes).sum() + abs(source_total)
    return float(abs(fluxes.sum() + source_total) / scale) if scale > 0 else 0.0


def solve_neumann(mesh: JunctionMesh, load: np.ndarray) -> tuple[np.ndarray, int]:
    """
    Mean-free solution of the discrete Neumann problem ``L u = load``.

    Raises:
        ConvergenceError: If CG stops above the residual limit
    """
    norm = np.linalg.norm(load)
    if norm == 0.0:
        return np.zeros(mesh.size), 0
    b = load - load.mean()

    op, jacobi = mesh.laplacian()
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    x, info = cg(op, b, rtol=CG_TOLERANCE, maxiter=MAX_CG_ITERATIONS, M=jacobi, callback=count)
    residual = np.linalg.norm(b - op.matvec(x)) / np.linalg.norm(b)
    if info != 0 or residual > RESIDUAL_LIMIT:
        raise ConvergenceError(
            f"CG stopped at relative residual {residual:.3e} after {iterations} iterations",
            solver="cg",
            operation="solve_neumann",
        )
    logger.debug(f"CG converged in {iterations} iterations, residual {residual:.2e}")
    return x - x.mean(), iterations


def solve_homogeneous(mesh: JunctionMesh, which: int) -> NField:
    """
    Harmonic field with unit flux in through outlet 1 and out through ``which``.

    Slopes tend to -1/a_1 on outlet 1 and +1/a_which on outlet ``which``.
    The constant is fixed so that the fitted offset on outlet 1 vanishes.
    """
    if which not in (2, 3):
        raise ValidationError("which must be 2 or 3", field="which", value=which)
    fluxes = np.zeros(3)
    fluxes[0] = -1.0
    fluxes[which - 1] = 1.0
    return solve_cap_problem(mesh, fluxes, label=f"N{which}")


def solve_cap_problem(mesh: JunctionMesh, fluxes, label: str = "") -> NField:
    """Harmonic field with prescribed total outward flux on each cap."""
    fluxes = np.asarray(fluxes, dtype=float)
    values, iterations = solve_neumann(mesh, mesh.cap_vector(fluxes))
    slopes, offsets = _fit_outlets(mesh, values)
    values = values - offsets[0]
    offsets = offsets - offsets[0]
    result = NField(
        mesh=mesh,
        values=values,
        slopes=slopes,
        offsets=offsets,
        flux_residual=_flux_residual(mesh, slopes, 0.0),
        iterations=iterations,
        label=label,
    )
    logger.info(f"{label or 'cap field'}: slopes {np.round(slopes, 8).tolist()}, {iterations} iterations")
    return result


def delta_constant(
    mesh: JunctionMesh, n2: NField, n3: NField, forcing: InnerForcing
) -> tuple[float, float]:
    """
    Outlet jumps (delta_2, delta_3) of the bounded inner solution.

    Pairs the homogeneous fields with the forcing of the remainder. The
    pairing equals the difference of the remainder's cap averages on outlet
    i and outlet 1.
    """
    for n in (n2, n3):
        if n.mesh.size != mesh.size:
            raise MeshResolutionError(
                "Forcing and homogeneous fields live on different meshes",
                solver="junction",
                operation="delta_constant",
            )
    r = forcing.residual(mesh)
    return float(n2.values @ r), float(n3.values @ r)


@dataclass(eq=False)
class InnerSolution:
    """
    Bounded part of an inhomogeneous inner solution and its functionals.

    Attributes:
        field: The remainder, vanishing at the far end of outlet 1
        mass_remainder: Node integral of the density times the remainder
        tails: Outlet integrals of N - G
        delta: Cap-average jumps of the remainder on outlets 2 and 3
    """

    field: NField
    mass_remainder: float
    tails: tuple[float, float, float]
    delta: tuple[float, float]


def _tail_extrapolation(positions: np.ndarray, means: np.ndarray, area: float) -> float:
    """Integral beyond R of an exponentially decaying mean, 0 if no decay is visible."""
    if len(means) < 3 or not (np.all(means > 0) or np.all(means < 0)):
        return 0.0
    rate, _ = np.polyfit(positions, np.log(np.abs(means)), 1)
    if rate >= 0.0:
        return 0.0
    return float(area * means[-1] / -rate)


def solve_inner_inhomogeneous(
    mesh: JunctionMesh, forcing: InnerForcing, label: str = "inner"
) -> InnerSolution:
    """
    Solve for the bounded remainder of N with the given growth and node source.

    Raises:
        CompatibilityError: If the node source and cap fluxes do not balance
    """
    mismatch = forcing.compatibility_residual(mesh)
    if mismatch > COMPATIBILITY_TOLERANCE:
        raise CompatibilityError(
            f"Inner data violate the solvability condition (relative residual {mismatch:.3e})",
            solver="junction",
            operation="solve_inner_inhomogeneous",
        )

    source = forcing.source(mesh)
    values, iterations = solve_neumann(mesh, forcing.residual(mesh))
    values -= values[mesh.cap(1)].mean()
    delta = tuple(float(values[mesh.cap(i)].mean()) for i in (2, 3))

    growth = forcing.growth(mesh)
    slopes, offsets = _fit_outlets(mesh, values + growth)
    node = mesh.node_cells
    if forcing.density is not None:
        mass = float(forcing.density(mesh.centers[node]) @ values[node] * mesh.cell_volume)
    else:
        mass = 0.0

    # N - G on outlet i is the remainder minus its limit and the missing growth.
    chi = mesh.cutoff()
    slopes_in = np.asarray(forcing.outlet_slopes, dtype=float)
    tails = []
    for i in (1, 2, 3):
        limit = 0.0 if i == 1 else delta[i - 2]
        cells = mesh.outlet(i)
        excess = values[cells] - limit - slopes_in[i - 1] * mesh.axial[cells] * (1.0 - chi[cells])
        positions, means = mesh.cross_section_means(values - limit, i)
        window = positions >= mesh.length - FIT_WINDOW
        beyond = _tail_extrapolation(positions[window], means[window], mesh.areas[i - 1])
        tails.append(float(excess.sum() * mesh.cell_volume + beyond))

    result = NField(
        mesh=mesh,
        values=values,
        slopes=slopes,
        offsets=offsets,
        flux_residual=_flux_residual(mesh, slopes, source.sum()),
        iterations=iterations,
        label=label,
    )
    logger.info(f"{label}: mass remainder {mass:.6e}, delta {delta}, {iterations} iterations")
    return InnerSolution(field=result, mass_remainder=mass, tails=tuple(tails), delta=delta)


class JunctionService(BaseService):
    """
    Junction constants for the expansion recursion.

    Meshes and their homogeneous fields are cached per geometry. The two
    homogeneous solves run concurrently.
    """

    def __init__(
        self,
        max_workers: int = 2,
        spacing: float | None = None,
        length: float | None = None,
        profile: str | None = None,
    ):
        super().__init__()
        self.max_workers = max_workers
        self.spacing = spacing
        self.length = length
        self.profile = profile
        self._lock = threading.Lock()
        self._meshes: dict[tuple, JunctionMesh] = {}
        self._homogeneous: dict[tuple, tuple[NField, NField]] = {}

    def _do_initialize(self) -> None:
        logger.debug("Junction service ready")

    def _mesh_key(self, graph: StarGraph, profile: str | None) -> tuple:
        settings = graph.node.junction or JunctionSettings()
        return (
            self.spacing or settings.spacing or graph.node.ell0 / 8.0,
            self.length or settings.length,
            profile or self.profile or settings.profile,
            graph.node.ell0,
            tuple(edge.h0 for edge in graph.edges),
        )

    def mesh(self, graph: StarGraph, profile: str | None = None) -> JunctionMesh:
        self.initialize()
        key = self._mesh_key(graph, profile)
        with self._lock:
            if key not in self._meshes:
                spacing, length, chosen, _, _ = key
                self._meshes[key] = JunctionMesh.build(graph, spacing, length, chosen)
            return self._meshes[key]

    def homogeneous_fields(self, graph: StarGraph, profile: str | None = None) -> tuple[NField, NField]:
        """(N2, N3), solved once per geometry."""
        key = self._mesh_key(graph, profile)
        mesh = self.mesh(graph, profile)
        with self._lock:
            cached = self._homogeneous.get(key)
        if cached is not None:
            return cached
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            fields = tuple(executor.map(lambda which: solve_homogeneous(mesh, which), (2, 3)))
        with self._lock:
            self._homogeneous[key] = fields
        return fields

    def forcing(self, graph: StarGraph, mesh: JunctionMesh, request: InnerRequest) -> InnerForcing:
        """
        Mesh forcing of a request.

        Slopes are rescaled to the realized outlet areas and the density to
        total mass m on the mesh node, so that graph-level balance carries over.
        """
        slopes = tuple(
            psi * target / area
            for psi, target, area in zip(
                request.outlet_slopes, mesh.target_areas, mesh.areas, strict=True
            )
        )
        if graph.mass == 0.0:
            return InnerForcing(outlet_slopes=slopes)
        density = graph.node.density()
        weight = density(mesh.centers[mesh.node_cells]).sum() * mesh.cell_volume
        density = replace(density, amplitude=density.amplitude * graph.mass / weight)
        return InnerForcing(
            outlet_slopes=slopes, node_coefficient=request.node_coefficient, density=density
        )

    def inner_constants(
        self, graph: StarGraph, request: InnerRequest, profile: str | None = None
    ) -> InnerConstants:
        """delta by the Green pairing, with the node mass and tail integrals."""
        mesh = self.mesh(graph, profile)
        n2, n3 = self.homogeneous_fields(graph, profile)
        forcing = self.forcing(graph, mesh, request)
        delta = delta_constant(mesh, n2, n3, forcing)
        inner = solve_inner_inhomogeneous(mesh, forcing, label=f"N[{request.label}]")
        return InnerConstants(
            delta=delta,
            mass_remainder=inner.mass_remainder,
            tails=inner.tails,
            source=f"computed(spacing={mesh.spacing:g},length={mesh.length:g})",
        )

    def profile_spread(self, graph: StarGraph, request: InnerRequest) -> dict:
        """Largest delta difference between the cut-off profiles."""
        deltas = {
            profile: self.inner_constants(graph, request, profile).delta
            for profile in CUTOFF_PROFILES
        }
        first, second = (np.asarray(deltas[p]) for p in CUTOFF_PROFILES)
        return {
            **{f"delta_{p}": list(deltas[p]) for p in CUTOFF_PROFILES},
            "spread": float(np.max(np.abs(first - second))),
        }
