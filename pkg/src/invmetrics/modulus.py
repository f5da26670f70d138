"""Conformal modulus of doubly-connected grid domains.

The harmonic potential with value 1 on the bounded complement component
and 0 on the unbounded one is solved with the 5-point Laplacian; the
modulus is the reciprocal Dirichlet energy, normalized so the round
annulus r < |z| < 1 gives log(1/r) / (2 pi).

Boundary values are imposed on the complement cells adjacent to the
domain, with doubled conductance on the cut edges so the effective
boundary sits at the edge midpoints; pinning values on domain cells
instead shifts every boundary half a cell inward, which already costs
about 2% of the modulus at a spacing of 0.01.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import cg

from .domains import GridDomain, STRUCT_4
from .errors import NonPositive, SolverDivergence, ValidationError, WrongConnectivity

_CG_RTOL = 1e-10
_CG_MAXITER = 1_000_000


def conformal_modulus(grid: GridDomain, inner_label: int, outer_label: int) -> float:
    """Modulus of a grid domain whose complement has exactly two components."""
    labels, count, unbounded = grid.complement_labels
    if count != 2:
        raise WrongConnectivity(
            f"domain complement has {count} components, need exactly 2")
    if {inner_label, outer_label} != {1, 2}:
        raise ValidationError(
            f"labels must identify the two complement components, got "
            f"{inner_label} and {outer_label}")
    if outer_label != unbounded:
        raise ValidationError(f"label {outer_label} is not the unbounded component")

    mask = grid.mask
    h, w = mask.shape
    near_domain = ndimage.binary_dilation(mask, STRUCT_4)
    inner_ghost = (labels == inner_label) & near_domain
    outer_ghost = (labels == outer_label) & near_domain
    values = np.zeros((h, w))
    values[inner_ghost] = 1.0
    ghost = inner_ghost | outer_ghost

    index = -np.ones((h, w), dtype=np.int64)
    n_unknown = int(mask.sum())
    index[mask] = np.arange(n_unknown)
    rows, cols, data = [], [], []
    rhs = np.zeros(n_unknown)
    degree = np.zeros(n_unknown)
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        src = (slice(max(0, -dy), h - max(0, dy)),
               slice(max(0, -dx), w - max(0, dx)))
        dst = (slice(max(0, dy), h - max(0, -dy)),
               slice(max(0, dx), w - max(0, -dx)))
        # domain-domain edges, conductance 1
        pair = mask[src] & mask[dst]
        i = index[src][pair]
        j = index[dst][pair]
        rows.append(i)
        cols.append(j)
        data.append(-np.ones(len(i)))
        np.add.at(degree, i, 1.0)
        # domain-ghost cut edges, conductance 2 (boundary at the midpoint)
        cut = mask[src] & ghost[dst]
        i2 = index[src][cut]
        np.add.at(degree, i2, 2.0)
        np.add.at(rhs, i2, 2.0 * values[dst][cut])
    rows.append(np.arange(n_unknown))
    cols.append(np.arange(n_unknown))
    data.append(degree)
    matrix = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknown, n_unknown)).tocsr()
    solution, info = cg(matrix, rhs, rtol=_CG_RTOL, maxiter=_CG_MAXITER)
    if info != 0:
        raise SolverDivergence(f"conjugate gradients stopped with code {info}")
    values[mask] = solution

    energy = 0.0
    for dy, dx in ((0, 1), (1, 0)):
        src = (slice(0, h - dy), slice(0, w - dx))
        dst = (slice(dy, h), slice(dx, w))
        pair = mask[src] & mask[dst]
        diff = values[src][pair] - values[dst][pair]
        energy += float((diff * diff).sum())
        for a, b in ((src, dst), (dst, src)):
            cut = mask[a] & ghost[b]
            diff = values[a][cut] - values[b][cut]
            energy += 2.0 * float((diff * diff).sum())
    if energy <= 0:
        raise SolverDivergence("Dirichlet energy vanished; degenerate input")
    return 1.0 / energy


def canonical_annulus_radius(modulus: float) -> float:
    """Inner radius of the round annulus with the given modulus."""
    if not (modulus > 0) or not math.isfinite(modulus):
        raise NonPositive(f"modulus must be positive and finite: {modulus!r}")
    return math.exp(-2.0 * math.pi * modulus)


def bounded_complement_label(grid: GridDomain) -> int:
    """Label of the single bounded complement component of a ring domain."""
    labels, count, unbounded = grid.complement_labels
    if count != 2:
        raise WrongConnectivity(
            f"domain complement has {count} components, need exactly 2")
    return 1 if unbounded == 2 else 2
