"""
Immutable R^3-valued fields on a :class:`grid_cutoff.Grid`.

A field is the spin polarisation ``u = (u1, u2, u3)`` sampled at every node;
values are stored as a read-only array of shape ``(*grid.shape, 3)``.
"""

import numpy as np

from utils.errors import BlowUpError, GridMismatchError


class VectorField:
    """Discrete map from grid nodes to R^3.

    Parameters
    ----------
    grid : Grid
        Grid the field lives on.
    values : array_like
        Array of shape ``(*grid.shape, 3)``; copied and frozen.
    """

    def __init__(self, grid, values):
        values = np.array(values, dtype=float)
        expected = grid.shape + (3,)
        if values.shape != expected:
            raise GridMismatchError(f"field values have shape {values.shape}, grid expects {expected}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def __repr__(self):
        return f"VectorField({self.grid!r})"

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape + (3,)))

    @classmethod
    def constant(cls, grid, vector):
        vector = np.asarray(vector, dtype=float)
        return cls(grid, np.broadcast_to(vector, grid.shape + (3,)))

    def with_values(self, values):
        return VectorField(self.grid, values)

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------

    def check_same_grid(self, other):
        if not self.grid.same_frame(other.grid):
            raise GridMismatchError(f"{self.grid!r} and {other.grid!r} differ")

    def __add__(self, other):
        self.check_same_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self.check_same_grid(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def pointwise_norm(self):
        return np.sqrt(np.sum(self.values**2, axis=-1))

    # ------------------------------------------------------------------
    # Embedding
    # ------------------------------------------------------------------

    def embed(self, larger):
        """Zero-extend onto a grid this grid is nested in."""
        slices = self.grid.nested_slices(larger)
        values = np.zeros(larger.shape + (3,))
        values[slices] = self.values
        return VectorField(larger, values)

    def restrict(self, smaller):
        """Restrict onto a grid nested in this one."""
        slices = smaller.nested_slices(self.grid)
        return VectorField(smaller, self.values[slices])

    def boundary_values(self):
        return self.values[self.grid.boundary_mask]

    # ------------------------------------------------------------------
    # Sanity
    # ------------------------------------------------------------------

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def assert_finite(self, context="field"):
        if not self.is_finite():
            raise BlowUpError(f"{context} has non-finite components", float("nan"))
        return self
