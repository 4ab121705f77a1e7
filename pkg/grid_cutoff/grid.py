"""
Uniform tensor grids on the truncated cubes ``[-n, n]^d``.

The cube replaces the ball ``{|x| < n}`` as computational domain; the nodes on
the cube boundary carry the homogeneous Dirichlet condition. Coordinates are
computed as ``(i - cells/2) * h`` so that two grids sharing ``h`` and nested in
one another produce bit-identical coordinates at coinciding nodes, which keeps
zero extension exact.
"""

from functools import cached_property

import numpy as np

from utils.errors import GridError, GridMismatchError

_DIVISIBILITY_TOL = 1e-9


class Grid:
    """Uniform grid on ``[-radius, radius]^dimension``.

    Parameters
    ----------
    dimension : int
        Spatial dimension, 1 or 2.
    radius : float
        Half side length ``n`` of the cube.
    spacing : float
        Grid spacing ``h``; must divide ``2 * radius``.

    Raises
    ------
    GridError
        If the dimension is unsupported, the radius or spacing is not
        positive, or ``h`` does not divide ``2n``.
    """

    def __init__(self, dimension, radius, spacing):
        if dimension not in (1, 2):
            raise GridError(f"dimension must be 1 or 2, got {dimension}")
        if not radius > 0:
            raise GridError(f"radius must be positive, got {radius}")
        if not spacing > 0:
            raise GridError(f"spacing must be positive, got {spacing}")

        cells = 2.0 * radius / spacing
        cells_rounded = int(round(cells))
        if abs(cells - cells_rounded) > _DIVISIBILITY_TOL * max(1.0, cells):
            raise GridError(f"spacing {spacing} does not divide 2 * radius = {2.0 * radius}")
        if cells_rounded < 2:
            raise GridError("grid needs at least one interior node per axis")

        self.dimension = int(dimension)
        self.radius = float(radius)
        self.spacing = float(spacing)
        self.cells_per_axis = cells_rounded
        self.points_per_axis = cells_rounded + 1
        self.shape = (self.points_per_axis,) * self.dimension

    def __repr__(self):
        return f"Grid(dimension={self.dimension}, radius={self.radius}, spacing={self.spacing})"

    # ------------------------------------------------------------------
    # Coordinates
    # ------------------------------------------------------------------

    @cached_property
    def axis(self):
        """1-D node coordinates shared by every axis."""
        index = np.arange(self.points_per_axis, dtype=float)
        axis = (index - self.cells_per_axis / 2.0) * self.spacing
        axis.setflags(write=False)
        return axis

    @cached_property
    def coords(self):
        """Node coordinates, shape ``(*shape, dimension)``."""
        mesh = np.meshgrid(*([self.axis] * self.dimension), indexing="ij")
        coords = np.stack(mesh, axis=-1)
        coords.setflags(write=False)
        return coords

    @cached_property
    def radius_map(self):
        """Euclidean norm ``|x|`` of every node, shape ``shape``."""
        radius_map = np.sqrt(np.sum(self.coords**2, axis=-1))
        radius_map.setflags(write=False)
        return radius_map

    @cached_property
    def descending_radius_order(self):
        """Flat node indices sorted by decreasing ``|x|`` (stable)."""
        flat = self.radius_map.ravel()
        order = np.argsort(-flat, kind="stable")
        order.setflags(write=False)
        return order

    # ------------------------------------------------------------------
    # Boundary and quadrature
    # ------------------------------------------------------------------

    @cached_property
    def boundary_mask(self):
        """Boolean mask of the Dirichlet nodes on the cube boundary."""
        mask = np.zeros(self.shape, dtype=bool)
        for ax in range(self.dimension):
            edge = [slice(None)] * self.dimension
            edge[ax] = 0
            mask[tuple(edge)] = True
            edge[ax] = -1
            mask[tuple(edge)] = True
        mask.setflags(write=False)
        return mask

    @property
    def interior_slices(self):
        return (slice(1, -1),) * self.dimension

    @property
    def interior_shape(self):
        return (self.points_per_axis - 2,) * self.dimension

    @cached_property
    def quadrature_weights(self):
        """Tensor-product trapezoid weights, shape ``shape``."""
        weights_1d = np.full(self.points_per_axis, self.spacing)
        weights_1d[0] = weights_1d[-1] = 0.5 * self.spacing
        weights = weights_1d
        for _ in range(self.dimension - 1):
            weights = np.multiply.outer(weights, weights_1d)
        weights.setflags(write=False)
        return weights

    @property
    def laplacian_spectral_bound(self):
        """Upper bound ``4d/h^2`` of the discrete Dirichlet Laplacian spectrum."""
        return 4.0 * self.dimension / self.spacing**2

    # ------------------------------------------------------------------
    # Frames and nesting
    # ------------------------------------------------------------------

    def same_frame(self, other):
        return (
            isinstance(other, Grid)
            and self.dimension == other.dimension
            and self.cells_per_axis == other.cells_per_axis
            and self.spacing == other.spacing
        )

    def is_nested_in(self, larger):
        try:
            self.offset_in(larger)
        except GridMismatchError:
            return False
        return True

    def offset_in(self, larger):
        """Index offset of this grid's first node inside ``larger``.

        Raises
        ------
        GridMismatchError
            If the grids do not share dimension and spacing, or this grid
            is not nested symmetrically inside ``larger``.
        """
        if self.dimension != larger.dimension:
            raise GridMismatchError("grids have different dimensions")
        if self.spacing != larger.spacing:
            raise GridMismatchError(
                f"grids have different spacings ({self.spacing} vs {larger.spacing})"
            )
        extra = larger.cells_per_axis - self.cells_per_axis
        if extra < 0 or extra % 2:
            raise GridMismatchError(
                f"grid of radius {self.radius} is not nested in grid of radius {larger.radius}"
            )
        return extra // 2

    def nested_slices(self, larger):
        offset = self.offset_in(larger)
        return (slice(offset, offset + self.points_per_axis),) * self.dimension


def make_grid(d, n, h):
    """Build the uniform grid covering ``[-n, n]^d`` with spacing ``h``.

    Examples
    --------
    >>> make_grid(1, 4, 0.5).shape
    (17,)
    >>> make_grid(2, 2, 1.0).shape
    (5, 5)
    """
    return Grid(d, n, h)
