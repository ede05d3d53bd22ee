"""Grid classification, component labeling, boundary tracing, rendering.

Pixels are classified at their centers by escape time; escaping pixels are
grouped with 4-connectivity into Fatou-component approximations whose outer
boundaries are walked along pixel cracks (the 8-connected contour walk dual
to 4-connected regions).  The per-pixel kernels are written so that the
vectorized paths reproduce the scalar `dynamics.escape_time` bit for bit.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .dynamics import MapSpec, escape_time
from .errors import DegenerateComponent

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        return deco if not (args and callable(args[0])) else args[0]


BOUNDED = -1  # label value for pixels that never escape within budget

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int8)


@dataclass(frozen=True)
class GridSpec:
    """Viewport and iteration budget for one raster.

    center is the viewport midpoint in the plane; width/height are plane
    lengths; nx/ny pixel counts; max_iter and escape_radius the orbit budget.
    """

    center: complex
    width: float
    height: float
    nx: int
    ny: int
    max_iter: int
    escape_radius: float

    def validate(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport width and height must be positive")
        if self.nx < 16 or self.ny < 16:
            raise ValueError("resolution must be at least 16 pixels per side")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    @property
    def dx(self) -> float:
        return self.width / self.nx

    @property
    def dy(self) -> float:
        return self.height / self.ny

    @property
    def x_min(self) -> float:
        return self.center.real - self.width / 2.0

    @property
    def y_max(self) -> float:
        return self.center.imag + self.height / 2.0

    def pixel_centers(self) -> np.ndarray:
        """(ny, nx) array of pixel-center points, top row first."""
        xs = self.x_min + (np.arange(self.nx) + 0.5) * self.dx
        ys = self.y_max - (np.arange(self.ny) + 0.5) * self.dy
        return xs[None, :] + 1j * ys[:, None]

    def vertex_to_plane(self, r, c) -> complex | np.ndarray:
        """Map a pixel-corner lattice vertex (row r, col c) to the plane."""
        return (self.x_min + np.asarray(c) * self.dx) + 1j * (
            self.y_max - np.asarray(r) * self.dy
        )


@dataclass(frozen=True)
class ClassifiedGrid:
    """A raster with per-pixel labels: BOUNDED (-1) or the escape index n >= 0."""

    spec: GridSpec
    labels: np.ndarray  # (ny, nx) int32

    def __post_init__(self):
        if self.labels.shape != (self.spec.ny, self.spec.nx):
            raise ValueError("label array shape must match the grid resolution")

    @property
    def escaping_mask(self) -> np.ndarray:
        return self.labels >= 0

    @property
    def bounded_fraction(self) -> float:
        return float(np.count_nonzero(self.labels == BOUNDED)) / self.labels.size


@dataclass(frozen=True)
class Component:
    """One 4-connected escaping region: pixel index arrays and metadata."""

    id: int
    rows: np.ndarray
    cols: np.ndarray
    clipped: bool

    @property
    def area(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class PeripheralCurve:
    """Closed outer contour of a component, as a pixel-crack polyline.

    pixel_vertices is a (k, 2) integer array of (row, col) lattice corners
    with first == last; vertices holds the same polyline in plane
    coordinates.  pixel_area is the component's pixel count.
    """

    component_id: int
    vertices: np.ndarray        # (k,) complex, closed
    pixel_vertices: np.ndarray  # (k, 2) int, closed
    pixel_area: int
    clipped: bool

    @property
    def points(self) -> np.ndarray:
        """Distinct polyline vertices (closing duplicate dropped)."""
        return self.vertices[:-1]

    def enclosed_pixel_area(self) -> float:
        """Shoelace area of the contour in pixel units (exact for lattice paths)."""
        r = self.pixel_vertices[:, 0].astype(np.int64)
        c = self.pixel_vertices[:, 1].astype(np.int64)
        s = np.sum(c[:-1] * r[1:] - c[1:] * r[:-1])
        return abs(float(s)) / 2.0


if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _mcmullen_rows(z0, d, lam, max_iter, radius, pole_tol, out):
        for i in range(z0.shape[0]):
            for j in range(z0.shape[1]):
                z = z0[i, j]
                label = BOUNDED
                for n in range(max_iter + 1):
                    if abs(z) > radius:
                        label = n
                        break
                    if abs(z) <= pole_tol:
                        label = n + 1  # pole maps straight to infinity
                        break
                    if n == max_iter:
                        break
                    zd = z
                    for _ in range(d - 1):
                        zd = zd * z
                    z = zd + lam / zd
                out[i, j] = label

    @njit(cache=True, nogil=True)
    def _param_rows(lams, d, max_iter, pole_tol, out):
        two_d = 2 * d
        for i in range(lams.shape[0]):
            for j in range(lams.shape[1]):
                lam = lams[i, j]
                if lam == 0:
                    out[i, j] = 0
                    continue
                radius = max(2.0, 2.0 * abs(lam) ** (1.0 / d), 2.0 ** (1.0 / (d - 1)))
                rho = abs(lam) ** (1.0 / two_d)
                base = cmath.phase(lam) / two_d
                z = rho * cmath.exp(1j * base)
                label = BOUNDED
                for n in range(max_iter + 1):
                    if abs(z) > radius:
                        label = n
                        break
                    if abs(z) <= pole_tol:
                        label = n + 1
                        break
                    if n == max_iter:
                        break
                    zd = z
                    for _ in range(d - 1):
                        zd = zd * z
                    z = zd + lam / zd
                out[i, j] = label


def _scalar_rows(spec: MapSpec, z0: np.ndarray, max_iter: int, radius: float, out: np.ndarray):
    for i in range(z0.shape[0]):
        for j in range(z0.shape[1]):
            outcome = escape_time(spec, z0[i, j], max_iter, radius).fold_pole()
            out[i, j] = outcome.n if outcome.escaped else BOUNDED


def _run_row_blocks(kernel, ny: int, workers: int):
    """Run kernel(lo, hi) over disjoint row blocks; merge is positional, so
    the result is independent of the worker count."""
    if workers <= 1:
        kernel(0, ny)
        return
    block = max(1, math.ceil(ny / (workers * 4)))
    spans = [(lo, min(lo + block, ny)) for lo in range(0, ny, block)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda s: kernel(*s), spans))


def classify_grid(spec: MapSpec, grid: GridSpec, workers: int = 1) -> ClassifiedGrid:
    """Classify every pixel center by escape time (poles folded to escaping)."""
    grid.validate()
    z0 = grid.pixel_centers()
    out = np.empty((grid.ny, grid.nx), dtype=np.int32)
    if spec.family == "mcmullen" and _HAVE_NUMBA:
        def kernel(lo, hi):
            _mcmullen_rows(
                z0[lo:hi], spec.d, spec.lam, grid.max_iter,
                grid.escape_radius, spec.pole_tol, out[lo:hi],
            )
    else:
        def kernel(lo, hi):
            _scalar_rows(spec, z0[lo:hi], grid.max_iter, grid.escape_radius, out[lo:hi])

    _run_row_blocks(kernel, grid.ny, workers)
    return ClassifiedGrid(spec=grid, labels=out)


def classify_parameter_plane(
    d: int, region: GridSpec, max_iter: int | None = None, workers: int = 1
) -> ClassifiedGrid:
    """Empirical non-escaping locus: a parameter pixel is Bounded iff the free
    critical orbit of its map stays within the certified escape radius for the
    whole budget.  The pixel cell containing 0 is marked escaping by convention.
    """
    if d < 2:
        raise ValueError("degree must be >= 2")
    region.validate()
    budget = region.max_iter if max_iter is None else max_iter
    lams = region.pixel_centers()
    out = np.empty((region.ny, region.nx), dtype=np.int32)
    pole_tol = 1e-12

    if _HAVE_NUMBA:
        def kernel(lo, hi):
            _param_rows(lams[lo:hi], d, budget, pole_tol, out[lo:hi])
    else:
        from .dynamics import free_critical_escape

        def kernel(lo, hi):
            for i in range(lo, hi):
                for j in range(region.nx):
                    lam = lams[i, j]
                    if lam == 0:
                        out[i, j] = 0
                        continue
                    spec = MapSpec.mcmullen(d, lam)
                    out[i, j] = 0 if free_critical_escape(spec, budget) else BOUNDED

    _run_row_blocks(kernel, region.ny, workers)

    # mark the cell containing lambda = 0 escaping by convention
    j0 = int(math.floor((0.0 - region.x_min) / region.dx))
    i0 = int(math.floor((region.y_max - 0.0) / region.dy))
    if 0 <= i0 < region.ny and 0 <= j0 < region.nx:
        out[i0, j0] = 0
    return ClassifiedGrid(spec=region, labels=out)


def label_components(cg: ClassifiedGrid) -> list[Component]:
    """4-connected components of the escaping pixel set, ordered by the
    row-major position of each component's first pixel."""
    mask = cg.escaping_mask
    labeled, n = ndimage.label(mask, structure=_FOUR_CONN)
    if n == 0:
        return []
    ny, nx = mask.shape
    flat = labeled.ravel()
    nz = np.flatnonzero(flat)
    labs = flat[nz]
    # group pixel indices by label; stable sort keeps row-major order per group
    grouped = nz[np.argsort(labs, kind="stable")]
    counts = np.bincount(labs)[1:]
    offsets = np.concatenate(([0], np.cumsum(counts)))
    firsts = grouped[offsets[:-1]]
    order = np.argsort(firsts, kind="stable")
    comps = []
    for new_id, k in enumerate(order):
        idx = grouped[offsets[k]:offsets[k + 1]]
        rows, cols = idx // nx, idx % nx
        clipped = bool(
            rows.min() == 0 or rows.max() == ny - 1 or cols.min() == 0 or cols.max() == nx - 1
        )
        comps.append(Component(id=new_id, rows=rows, cols=cols, clipped=clipped))
    return comps


def filter_components(
    components: list[Component], min_area: int = 1, exclude_clipped: bool = False
) -> list[Component]:
    """Keep components with pixel area >= min_area, optionally dropping
    viewport-clipped ones."""
    return [
        c for c in components
        if c.area >= min_area and not (exclude_clipped and c.clipped)
    ]


# direction encoding for the crack walk: E, S, W, N in image coordinates
_DIRS = ((0, 1), (1, 0), (0, -1), (-1, 0))
# pixels adjacent to a vertex on the forward left/right of each direction,
# as offsets (dr, dc) of the pixel's top-left index from the vertex
_LEFT_PIX = ((-1, 0), (0, 0), (0, -1), (-1, -1))   # E, S, W, N
_RIGHT_PIX = ((0, 0), (0, -1), (-1, -1), (-1, 0))  # E, S, W, N


def trace_boundary(cg: ClassifiedGrid, component: Component) -> PeripheralCurve:
    """Outer contour of a component as a closed pixel-crack polyline.

    Walks lattice cracks keeping the component on the right-hand side,
    starting at the top-left corner of the topmost-leftmost pixel. Vertices
    are emitted at every lattice corner along the path.
    """
    if component.area < 1:
        raise DegenerateComponent("component has no pixels")
    ny, nx = cg.labels.shape
    mask = np.zeros((ny, nx), dtype=bool)
    mask[component.rows, component.cols] = True

    r0 = int(component.rows.min())
    c0 = int(component.cols[component.rows == r0].min())

    def inside(r, c):
        return 0 <= r < ny and 0 <= c < nx and mask[r, c]

    start = (r0, c0)
    d = 0  # east
    verts = [start]
    v = start
    limit = 4 * component.area + 8
    for _ in range(limit):
        v = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
        verts.append(v)
        lr, lc = _LEFT_PIX[d]
        rr, rc = _RIGHT_PIX[d]
        left_in = inside(v[0] + lr, v[1] + lc)
        right_in = inside(v[0] + rr, v[1] + rc)
        if not right_in:
            d = (d + 1) % 4  # turn right
        elif left_in:
            d = (d - 1) % 4  # turn left
        # else continue straight
        if v == start and d == 0:
            break
    else:
        raise DegenerateComponent("contour walk failed to close")

    if len(verts) < 5:
        raise DegenerateComponent("contour has fewer than 4 distinct vertices")

    pix = np.array(verts, dtype=np.int64)
    plane = cg.spec.vertex_to_plane(pix[:, 0], pix[:, 1]).astype(np.complex128)
    return PeripheralCurve(
        component_id=component.id,
        vertices=plane,
        pixel_vertices=pix,
        pixel_area=component.area,
        clipped=component.clipped,
    )


def render_image(cg: ClassifiedGrid, palette: str = "two-tone") -> bytes:
    """Binary PPM (P6) bytes: bounded pixels black; escaping pixels white
    (two-tone) or shaded by escape time (gradient).  Output is a pure
    function of the label array."""
    if palette not in ("two-tone", "gradient"):
        raise ValueError(f"unknown palette {palette!r}")
    labels = cg.labels
    ny, nx = labels.shape
    header = f"P6\n{nx} {ny}\n255\n".encode("ascii")
    rgb = np.zeros((ny, nx, 3), dtype=np.uint8)
    esc = labels >= 0
    if palette == "two-tone":
        rgb[esc] = 255
    else:
        max_n = int(labels.max()) if esc.any() else 0
        n = labels[esc].astype(np.int64)
        shade = (55 + (200 * n) // max(max_n, 1)).astype(np.uint8)
        rgb[esc, 0] = shade
        rgb[esc, 1] = shade
        rgb[esc, 2] = 255
    return header + rgb.tobytes()
