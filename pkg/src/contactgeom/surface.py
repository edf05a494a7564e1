"""Parametric immersions into S^3 on structured grids and their adapted frames.

The adapted frame at a non-degenerate surface point consists of

* e1: unit generator of the intersection of the tangent plane with the
  contact plane, sign fixed globally by a continuity flood fill seeded so
  that <e1, Xu> >= 0 at the seed node;
* e2: unit tangent orthogonal to e1, with (e1, e2) positively oriented
  relative to (Xu, Xv);
* e3: the surface normal inside T S^3 completing (e1, e2, e3) to the
  orientation of the canonical frame (z_perp, i z_perp, i z).

The contact angle is stored as the smooth signed angle

    beta = atan2(<xi, e3>, <xi, e2>),

unwrapped along the flood fill, so that cos(beta) = <xi, e2> and
sin(beta) = <xi, e3> hold exactly and beta is differentiable wherever the
surface stays away from contact degeneracy.  Folding beta into [0, pi]
would destroy differentiability wherever the signed angle crosses zero
(the great sphere's equator, for instance), which is why the signed field
is the primitive object here.

Everything in this module is a pure function of its inputs; the only
sequential piece is the sign/unwrap propagation, which follows a fixed
spanning tree, so results never depend on evaluation order.
"""

import collections
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import ambient
from .errors import DegenerateContact, DegenerateParametrization, OffSphere
from .gridops import GridCalc

OFF_SPHERE_TOL = 1e-6
GRAM_DET_TOL = 1e-10
DEGENERACY_TOL = 1e-9   # mask when |<xi, n>| > 1 - DEGENERACY_TOL

_TOPOLOGIES = ("periodic", "chart")


@dataclass(frozen=True)
class GridSpec:
    """Parameter rectangle and node counts for a structured grid.

    Periodic axes exclude the right endpoint (step = span / n); chart axes
    include both endpoints (step = span / (n - 1)).
    """

    n_u: int
    n_v: int
    u_range: tuple = (0.0, 2.0 * np.pi)
    v_range: tuple = (0.0, 2.0 * np.pi)
    topology_u: str = "periodic"
    topology_v: str = "periodic"

    def __post_init__(self):
        if self.n_u < 8 or self.n_v < 8:
            raise ValueError("grids need at least 8 nodes per axis")
        if self.topology_u not in _TOPOLOGIES or self.topology_v not in _TOPOLOGIES:
            raise ValueError(f"topology must be one of {_TOPOLOGIES}")
        if not (self.u_range[1] > self.u_range[0] and self.v_range[1] > self.v_range[0]):
            raise ValueError("parameter ranges must be increasing")

    @property
    def h_u(self):
        span = self.u_range[1] - self.u_range[0]
        return span / self.n_u if self.topology_u == "periodic" else span / (self.n_u - 1)

    @property
    def h_v(self):
        span = self.v_range[1] - self.v_range[0]
        return span / self.n_v if self.topology_v == "periodic" else span / (self.n_v - 1)

    @property
    def us(self):
        return self.u_range[0] + self.h_u * np.arange(self.n_u)

    @property
    def vs(self):
        return self.v_range[0] + self.h_v * np.arange(self.n_v)

    def mesh(self):
        return np.meshgrid(self.us, self.vs, indexing="ij")


class SurfaceGrid:
    """Grid of unit-sphere points with optional analytic parameter derivatives.

    partials, when present, is a dict with keys "fu", "fv" (and optionally
    "fuu", "fuv", "fvv"), each an (n_u, n_v, 4) array of derivatives of the
    point map.
    """

    def __init__(self, spec, points, partials=None, label=""):
        points = np.asarray(points, float)
        if points.shape != (spec.n_u, spec.n_v, 4):
            raise ValueError(f"points shape {points.shape} does not match spec")
        self.spec = spec
        self.points = points
        self.partials = partials
        self.label = label
        self._tangents = None

    @cached_property
    def calc(self):
        return GridCalc(self.spec)

    def with_points(self, points, partials=None, label=None):
        return SurfaceGrid(self.spec, points, partials,
                           self.label if label is None else label)

    @property
    def n_nodes(self):
        return self.spec.n_u * self.spec.n_v


def sample(definition, spec, label=None):
    """Evaluate an immersion definition on a grid and normalize onto S^3.

    definition is either a callable (U, V) -> (..., 4) or an object with a
    .point(U, V) method and optional .d1(U, V) -> (fu, fv) and
    .d2(U, V) -> (fuu, fuv, fvv) methods for analytic partials.

    Raises OffSphere when any evaluated point deviates from unit norm by
    more than 1e-6 before normalization.
    """
    U, V = spec.mesh()
    point = getattr(definition, "point", definition)
    pts = np.asarray(point(U, V), float)
    norms = np.linalg.norm(pts, axis=-1)
    dev = np.abs(norms - 1.0)
    if np.any(dev > OFF_SPHERE_TOL):
        ij = np.unravel_index(np.argmax(dev), dev.shape)
        raise OffSphere(
            f"node {tuple(int(k) for k in ij)} is off S^3 by {dev[ij]:.3e} "
            f"(norm {norms[ij]:.6f}) before normalization",
            node=tuple(int(k) for k in ij))
    pts = pts / norms[..., None]

    partials = None
    d1 = getattr(definition, "d1", None)
    if d1 is not None:
        fu, fv = d1(U, V)
        partials = {"fu": np.asarray(fu, float), "fv": np.asarray(fv, float)}
        for key in ("fu", "fv"):
            tang = np.abs(np.sum(partials[key] * pts, axis=-1))
            if np.any(tang > 1e-10):
                raise OffSphere("analytic partials are not tangent to the sampled "
                                f"points (max |<df, f>| = {tang.max():.3e})")
        d2 = getattr(definition, "d2", None)
        if d2 is not None:
            fuu, fuv, fvv = d2(U, V)
            partials.update(fuu=np.asarray(fuu, float),
                            fuv=np.asarray(fuv, float),
                            fvv=np.asarray(fvv, float))
    if label is None:
        label = getattr(definition, "name", getattr(definition, "__name__", "surface"))
    return SurfaceGrid(spec, pts, partials, label)


def tangent_fields(grid):
    """Per-node tangent pair (Xu, Xv), analytic when stored, else 4th-order FD.

    Both routes project onto T_z S^3.  Raises DegenerateParametrization if
    the Gram determinant drops below 1e-10 anywhere.
    """
    if grid._tangents is not None:
        return grid._tangents
    if grid.partials is not None:
        Xu = grid.partials["fu"]
        Xv = grid.partials["fv"]
    else:
        Xu = grid.calc.du(grid.points)
        Xv = grid.calc.dv(grid.points)
    z = grid.points
    Xu = Xu - np.sum(Xu * z, axis=-1, keepdims=True) * z
    Xv = Xv - np.sum(Xv * z, axis=-1, keepdims=True) * z
    E = np.sum(Xu * Xu, -1)
    F = np.sum(Xu * Xv, -1)
    G = np.sum(Xv * Xv, -1)
    det = E * G - F * F
    if np.any(det < GRAM_DET_TOL):
        ij = np.unravel_index(np.argmin(det), det.shape)
        raise DegenerateParametrization(
            f"tangent Gram determinant {det[ij]:.3e} at node "
            f"{tuple(int(k) for k in ij)}", node=tuple(int(k) for k in ij))
    grid._tangents = (Xu, Xv)
    return grid._tangents


def tangent_pair(grid, i, j):
    """Tangent pair at one node."""
    Xu, Xv = tangent_fields(grid)
    return Xu[i, j], Xv[i, j]


@dataclass(frozen=True)
class AdaptedFramePoint:
    """Adapted frame and signed contact angle at one surface point."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    beta: float
    degenerate: bool = False


@dataclass
class FrameField:
    """Adapted frames over a grid.

    coeff1/coeff2 hold the (Xu, Xv)-coordinates of e1/e2, used to take
    directional derivatives along frame legs with parameter-space stencils.
    mask flags contact-degenerate nodes (frames meaningless there).
    """

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    beta: np.ndarray
    coeff1: np.ndarray
    coeff2: np.ndarray
    mask: np.ndarray
    cos_beta: np.ndarray
    sin_beta: np.ndarray
    n_masked: int = 0
    seed_sign: int = 1
    sign_mismatches: int = field(default=0)  # flood-fill cross-edge holonomy count

    @property
    def xi_e2(self):
        return self.cos_beta

    @property
    def xi_e3(self):
        return self.sin_beta


def _raw_frames(z, Xu, Xv):
    """Vectorized pre-gauge frame construction.

    Returns (e1, e2, e3, mask, (E, F, G), xi) where e1's sign is arbitrary
    per node (fixed later by the flood fill) and e2 already carries the
    (Xu, Xv)-orientation relative to this e1.

    e3 is the normalized 4D cross product of (z, Xu, Xv): because (e1, e2)
    is positively oriented against (Xu, Xv), that vector automatically
    satisfies det[z, e1, e2, e3] = +1, i.e. the canonical-frame
    orientation, and it stays continuous across contact degeneracies.
    At masked nodes e1/e2 are replaced by the contact-plane legs of the
    canonical frame so downstream stencils see bounded values.
    """
    xi = ambient.jmul(z)
    nraw = ambient.cross4(z, Xu, Xv)
    nn = np.linalg.norm(nraw, axis=-1)
    e3 = nraw / np.maximum(nn, 1e-300)[..., None]
    xin = np.sum(xi * e3, -1)
    mask = np.abs(xin) > 1.0 - DEGENERACY_TOL

    a = np.sum(Xu * xi, -1)
    b = np.sum(Xv * xi, -1)
    w = b[..., None] * Xu - a[..., None] * Xv
    wn = np.linalg.norm(w, axis=-1)
    mask = mask | (wn < 1e-14)
    f1 = ambient.perp(z)
    e1 = np.where(mask[..., None], f1,
                  w / np.maximum(wn, 1e-300)[..., None])

    cand = ambient.cross4(z, e3, e1)
    orient = (np.sum(Xu * e1, -1) * np.sum(Xv * cand, -1)
              - np.sum(Xu * cand, -1) * np.sum(Xv * e1, -1))
    e2 = np.where(orient[..., None] >= 0, cand, -cand)

    E = np.sum(Xu * Xu, -1)
    F = np.sum(Xu * Xv, -1)
    G = np.sum(Xv * Xv, -1)
    return e1, e2, e3, mask, (E, F, G), xi


def adapted_frame(z, Xu, Xv):
    """Adapted frame at a single point.

    The local sign rule <e1, Xu> >= 0 replaces the grid flood fill; a
    DegenerateContact is raised when the tangent plane coincides with the
    contact plane.
    """
    z = np.asarray(getattr(z, "vec", z), float)
    Xu = np.asarray(getattr(Xu, "vec", Xu), float)
    Xv = np.asarray(getattr(Xv, "vec", Xv), float)
    e1, e2, e3, mask, _, xi = _raw_frames(z, Xu, Xv)
    if bool(np.any(mask)):
        raise DegenerateContact("tangent plane equals the contact plane; "
                                "e1 is not determined")
    if float(np.sum(e1 * Xu, -1)) < 0:
        e1, e2 = -e1, -e2
    beta = float(np.arctan2(np.sum(xi * e3, -1), np.sum(xi * e2, -1)))
    return AdaptedFramePoint(e1=e1, e2=e2, e3=e3, beta=beta, degenerate=False)


def _grid_neighbors(spec):
    """Neighbor index maps (+u, -u, +v, -v) honoring each axis topology."""
    n, m = spec.n_u, spec.n_v
    iu = np.arange(n)
    iv = np.arange(m)
    if spec.topology_u == "periodic":
        up, um = (iu + 1) % n, (iu - 1) % n
    else:
        up = np.minimum(iu + 1, n - 1)
        um = np.maximum(iu - 1, 0)
    if spec.topology_v == "periodic":
        vp, vm = (iv + 1) % m, (iv - 1) % m
    else:
        vp = np.minimum(iv + 1, m - 1)
        vm = np.maximum(iv - 1, 0)
    return up, um, vp, vm


def _flood_order(spec, mask):
    """Deterministic BFS visit order with parents, skipping masked nodes.

    New components are seeded at their smallest (i, j) in row-major order.
    """
    n, m = spec.n_u, spec.n_v
    up, um, vp, vm = _grid_neighbors(spec)
    seen = mask.copy()
    order = []
    parents = []
    queue = collections.deque()
    for i0 in range(n):
        for j0 in range(m):
            if seen[i0, j0]:
                continue
            seen[i0, j0] = True
            order.append((i0, j0))
            parents.append(None)
            queue.append((i0, j0))
            while queue:
                i, j = queue.popleft()
                for ni, nj in ((up[i], j), (um[i], j), (i, vp[j]), (i, vm[j])):
                    if not seen[ni, nj]:
                        seen[ni, nj] = True
                        order.append((int(ni), int(nj)))
                        parents.append((i, j))
                        queue.append((int(ni), int(nj)))
    return order, parents


def _fill_signs_fast(e1, e1_dot_xu):
    """Vectorized continuity sign fill for fully unmasked grids.

    Spanning tree: down the first column, then along each row; identical to
    the BFS result for that tree.
    """
    n, m = e1.shape[:2]
    seed = 1.0 if e1_dot_xu[0, 0] >= 0 else -1.0
    d0 = np.where(np.sum(e1[1:, 0] * e1[:-1, 0], -1) >= 0, 1.0, -1.0)
    col0 = seed * np.concatenate([[1.0], np.cumprod(d0)])
    dr = np.where(np.sum(e1[:, 1:] * e1[:, :-1], -1) >= 0, 1.0, -1.0)
    sign = col0[:, None] * np.concatenate(
        [np.ones((n, 1)), np.cumprod(dr, axis=1)], axis=1)
    return sign, int(seed)


def _unwrap_fast(beta):
    """Continuity unwrap along the same first-column-then-rows tree."""
    out = beta.copy()
    out[:, 0] = np.unwrap(beta[:, 0])
    return np.unwrap(out, axis=1)


def contact_angle_field(grid, max_masked_fraction=0.2):
    """Adapted frames and signed contact angle over a whole grid.

    e1's sign propagates by continuity from a seed chosen so that
    <e1, Xu> >= 0 there; beta is then unwrapped along the same tree so the
    field is continuous wherever the frames are.  Contact-degenerate nodes
    are masked; the call fails only if more than max_masked_fraction of the
    nodes are masked.
    """
    Xu, Xv = tangent_fields(grid)
    e1, e2, e3, mask, _, xi = _raw_frames(grid.points, Xu, Xv)

    n_masked = int(mask.sum())
    if n_masked > max_masked_fraction * mask.size:
        raise DegenerateContact(
            f"{n_masked} of {mask.size} nodes are contact-degenerate "
            f"(> {max_masked_fraction:.0%})")

    e1_dot_xu = np.sum(e1 * Xu, -1)
    if n_masked == 0:
        sign, seed_sign = _fill_signs_fast(e1, e1_dot_xu)
        e1 = sign[..., None] * e1
        e2 = sign[..., None] * e2
        beta = np.arctan2(np.sum(xi * e3, -1), np.sum(xi * e2, -1))
        beta = _unwrap_fast(beta)
    else:
        order, parents = _flood_order(grid.spec, mask)
        sign = np.ones(mask.shape)
        seed_sign = 1
        for (node, par) in zip(order, parents):
            if par is None:
                s = 1.0 if e1_dot_xu[node] >= 0 else -1.0
                sign[node] = s
                if node == order[0]:
                    seed_sign = int(s)
            else:
                d = float(np.sum(e1[node] * e1[par], -1)) * sign[par]
                sign[node] = 1.0 if d >= 0 else -1.0

        e1 = sign[..., None] * e1
        e2 = sign[..., None] * e2
        beta = np.arctan2(np.sum(xi * e3, -1), np.sum(xi * e2, -1))

        # unwrap along the same tree (2 pi jumps only; masked nodes untouched)
        two_pi = 2.0 * np.pi
        for (node, par) in zip(order, parents):
            if par is not None:
                beta[node] += two_pi * np.round((beta[par] - beta[node]) / two_pi)

    # holonomy diagnostic: cross edges where the propagated signs disagree
    up, um, vp, vm = _grid_neighbors(grid.spec)
    d_u = np.sum(e1 * e1[up, :], -1)
    d_v = np.sum(e1 * e1[:, vp], -1)
    good = ~mask
    mismatches = int(np.sum((d_u < 0) & good & good[up, :]))
    mismatches += int(np.sum((d_v < 0) & good & good[:, vp]))

    cos_b = np.sum(xi * e2, -1)
    sin_b = np.sum(xi * e3, -1)

    # (Xu, Xv)-coordinates of e1, e2 through the inverse metric
    E = np.sum(Xu * Xu, -1)
    F = np.sum(Xu * Xv, -1)
    G = np.sum(Xv * Xv, -1)
    det = E * G - F * F
    def coords(e):
        r1 = np.sum(Xu * e, -1)
        r2 = np.sum(Xv * e, -1)
        return np.stack([(G * r1 - F * r2) / det, (E * r2 - F * r1) / det], axis=-1)

    ff = FrameField(e1=e1, e2=e2, e3=e3, beta=beta,
                    coeff1=coords(e1), coeff2=coords(e2),
                    mask=mask, cos_beta=cos_b, sin_beta=sin_b,
                    n_masked=n_masked, seed_sign=seed_sign,
                    sign_mismatches=mismatches)
    return ff
