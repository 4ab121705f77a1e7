"""
Implicit part of the semi-implicit step.

Solves ``((1 + dt) I - dt Lap_h) u = rhs`` on the interior nodes with the
homogeneous Dirichlet values folded into the stencil. Factorisations are
cached per step size, since the step-size monitor uses ``dt / 2**k``.
"""

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import splu


def interior_laplacian(grid):
    """Sparse Dirichlet Laplacian on the interior nodes (C-order flattening)."""
    m = grid.points_per_axis - 2
    off = np.ones(m - 1)
    one_d = sps.diags([off, -2.0 * np.ones(m), off], offsets=[-1, 0, 1], format="csr")
    one_d = one_d / grid.spacing**2
    if grid.dimension == 1:
        return one_d.tocsc()
    eye = sps.identity(m, format="csr")
    return (sps.kron(one_d, eye) + sps.kron(eye, one_d)).tocsc()


class ImplicitSolver:
    """Factorised ``(1 + dt) I - dt Lap_h`` for one grid.

    Instances are not shared between worker threads; every ensemble block
    builds its own.
    """

    def __init__(self, grid):
        self.grid = grid
        self.laplacian = interior_laplacian(grid)
        self._factors = {}

    def factor(self, dt):
        if dt not in self._factors:
            size = self.laplacian.shape[0]
            matrix = (1.0 + dt) * sps.identity(size, format="csc") - dt * self.laplacian
            self._factors[dt] = splu(matrix.tocsc())
        return self._factors[dt]

    def solve(self, rhs, dt):
        """Solve for a batch of fields.

        Parameters
        ----------
        rhs : numpy.ndarray
            Full-grid values of shape ``(B, *grid.shape, 3)``; boundary
            entries are ignored.
        dt : float
            Step size.

        Returns
        -------
        numpy.ndarray
            Solution with the boundary nodes set to zero.
        """
        grid = self.grid
        d = grid.dimension
        interior = rhs[(slice(None),) + grid.interior_slices]
        batch = interior.shape[0]
        # spatial axes first so every (member, component) pair is one column
        columns = np.moveaxis(interior, 0, d).reshape(-1, batch * 3)
        solved = self.factor(dt).solve(np.ascontiguousarray(columns))
        solved = np.moveaxis(solved.reshape(grid.interior_shape + (batch, 3)), d, 0)
        out = np.zeros_like(rhs)
        out[(slice(None),) + grid.interior_slices] = solved
        return out
