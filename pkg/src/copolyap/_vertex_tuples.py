"""Vertex-tuple values of symmetric forms over simplicial partitions.

For a homogeneous polynomial (or coefficient template) of degree d and a
partition cell with vertex set Q, the constraint data are the multilinear
values G[q_1, ..., q_d] over all multisets of d vertices drawn from Q.  The
heavy lifting (folding the dense symmetric tensor against each cell's vertex
matrix) lives in the kernels module.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np

from . import _kernels
from .poly import Polynomial, multinomial, _distinct_permutations
from .simplex import SimplicialPartition
from .synth import CoefficientTemplate


def tuple_index_array(num_vertices: int, order: int) -> np.ndarray:
    """Flat indices of all sorted vertex multisets, for the fold kernel."""
    combos = list(combinations_with_replacement(range(num_vertices), order))
    strides = np.array(
        [num_vertices ** (order - 1 - t) for t in range(order)], dtype=np.int64
    )
    return np.array([int(np.dot(strides, c)) for c in combos], dtype=np.int64)


def partition_vertex_stack(partition: SimplicialPartition) -> np.ndarray:
    """(num_cells, p, ambient) array of cell vertices."""
    return np.ascontiguousarray(
        np.array([s.vertices for s in partition.simplices], dtype=float)
    )


def template_dense_stack(t: CoefficientTemplate, degree: int) -> np.ndarray:
    """Dense symmetric tensors of each affine-form slot, shape (m+1, n**degree).

    Row k < m is the tensor of the polynomial multiplying decision variable k;
    the last row is the constant part.
    """
    n = t.nvars
    width = t.num_coeffs + 1
    out = np.zeros((width, n**degree))
    strides = np.array([n ** (degree - 1 - k) for k in range(degree)], dtype=np.int64)
    for mono, vec in t.terms.items():
        if sum(mono) != degree:
            raise ValueError(f"term {mono} does not have degree {degree}")
        idx = []
        for j, e in enumerate(mono):
            idx.extend([j] * e)
        w = vec / multinomial(mono)
        for perm in _distinct_permutations(tuple(idx)):
            out[:, int(np.dot(strides, perm))] = w
    return out


def poly_dense_stack(p: Polynomial, degree: int) -> np.ndarray:
    return p.dense_tensor(degree).reshape(1, -1)


def tuple_values(dense_stack: np.ndarray, verts: np.ndarray, order: int) -> np.ndarray:
    """Values of shape (num_cells, num_tuples, stack_width)."""
    num_vertices = verts.shape[1]
    flat = tuple_index_array(num_vertices, order)
    return _kernels.fold_tuple_values(
        np.ascontiguousarray(dense_stack), verts, order, flat
    )
