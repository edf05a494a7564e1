"""Discrete differential operators in the adapted frame and identity checks.

Sign and convention summary (fixed by the orientation decisions in
`surface`):

* shape operator reported in the Weingarten sign, S_ij = -<D_{e_i} e3, e_j>,
  so the flat minimal torus comes out as [[0,-1],[-1,0]];
* Gauss equation in S^3: K = 1 + det S (det is sign-blind, so the reported
  sign does not affect it);
* connection form theta_2^1 evaluated as <D_{e_k} e2, e1>.

The verified identities, with beta the signed contact angle and
beta_1 = d beta(e1), beta_2 = d beta(e2):

    K = 1 - (beta_1 + 1)^2 - beta_2^2
    Lap(beta) = -tan(beta) ((beta_1 + 2)^2 + beta_2^2)
    <D_{e1} e2, e1> = tan(beta) beta_2
    <D_{e2} e2, e1> = -tan(beta) (beta_1 + 2)

The Laplacian and connection checks exclude nodes inside a configurable
band around the tan poles beta = +-pi/2 and report how many were excluded.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric
from .surface import contact_angle_field, tangent_fields

TAN_BAND_DEFAULT = 1e-3


@dataclass
class MetricField:
    """First fundamental form in the (Xu, Xv) basis."""

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        det = self.det
        if np.any(det <= 1e-12):
            ij = np.unravel_index(np.argmin(det), det.shape)
            raise DegenerateMetric(
                f"metric determinant {det[ij]:.3e} at node {ij} is not positive")

    @property
    def det(self):
        return self.E * self.G - self.F * self.F

    @property
    def inv(self):
        d = self.det
        return self.G / d, -self.F / d, self.E / d  # g^uu, g^uv, g^vv

    @property
    def sqrt_det(self):
        return np.sqrt(self.det)


def first_fundamental_form(grid):
    """Gram matrix of the tangent pair at every node."""
    Xu, Xv = tangent_fields(grid)
    return MetricField(E=np.sum(Xu * Xu, -1),
                       F=np.sum(Xu * Xv, -1),
                       G=np.sum(Xv * Xv, -1))


@dataclass
class ShapeOperatorField:
    """Shape operator in the orthonormal frame (e1, e2), Weingarten sign."""

    S: np.ndarray          # (..., 2, 2)
    mask: np.ndarray

    @property
    def H(self):
        return 0.5 * (self.S[..., 0, 0] + self.S[..., 1, 1])

    @property
    def det(self):
        return (self.S[..., 0, 0] * self.S[..., 1, 1]
                - self.S[..., 0, 1] * self.S[..., 1, 0])

    @property
    def symmetry_defect(self):
        d = np.abs(self.S[..., 0, 1] - self.S[..., 1, 0])
        return float(np.max(np.where(self.mask, 0.0, d)))


def shape_operator(grid, frames):
    """S_ij = -<D_{e_i} e3, e_j> by differentiating the constructed e3 field.

    Directional derivatives use the (Xu, Xv)-coordinates of the frame legs;
    inner products against tangent frame legs discard ambient normal parts.
    """
    calc = grid.calc
    de3_u = calc.du(frames.e3)
    de3_v = calc.dv(frames.e3)
    S = np.empty(frames.beta.shape + (2, 2))
    for i, coeff in enumerate((frames.coeff1, frames.coeff2)):
        D = coeff[..., 0, None] * de3_u + coeff[..., 1, None] * de3_v
        S[..., i, 0] = -np.sum(D * frames.e1, -1)
        S[..., i, 1] = -np.sum(D * frames.e2, -1)
    S = np.where(frames.mask[..., None, None], 0.0, S)
    return ShapeOperatorField(S=S, mask=frames.mask)


def gaussian_curvature_extrinsic(shape):
    """Gauss equation in S^3: K = 1 + det S."""
    return 1.0 + shape.det


def gaussian_curvature_intrinsic(metric, grid):
    """Brioschi formula: K from the metric components alone."""
    calc = grid.calc
    E, F, G = metric.E, metric.F, metric.G
    Eu, Ev = calc.du(E), calc.dv(E)
    Gu, Gv = calc.du(G), calc.dv(G)
    Fu, Fv = calc.du(F), calc.dv(F)
    Evv = calc.dvv(E)
    Guu = calc.duu(G)
    Fuv = calc.du(calc.dv(F))

    def det3(row0, row1, row2):
        a, b, c = row0
        d, e, f = row1
        g, h, i = row2
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    m1 = det3((-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev),
              (Fv - 0.5 * Gu, E, F),
              (0.5 * Gv, F, G))
    m2 = det3((np.zeros_like(E), 0.5 * Ev, 0.5 * Gu),
              (0.5 * Ev, E, F),
              (0.5 * Gu, F, G))
    return (m1 - m2) / metric.det ** 2


@dataclass
class FrameGradient:
    """Directional derivatives of a scalar field along (e1, e2)."""

    beta1: np.ndarray
    beta2: np.ndarray

    @property
    def norm2(self):
        return self.beta1 ** 2 + self.beta2 ** 2


def frame_gradient(fieldvals, frames, grid):
    """(d f(e1), d f(e2)) from parameter-space derivatives and frame coords."""
    calc = grid.calc
    fu = calc.du(fieldvals)
    fv = calc.dv(fieldvals)
    b1 = frames.coeff1[..., 0] * fu + frames.coeff1[..., 1] * fv
    b2 = frames.coeff2[..., 0] * fu + frames.coeff2[..., 1] * fv
    return FrameGradient(beta1=b1, beta2=b2)


def laplace_beltrami(fieldvals, metric, grid):
    """Conservative Laplace-Beltrami: (1/sqrt g) d_i(sqrt g g^ij d_j f)."""
    calc = grid.calc
    iuu, iuv, ivv = metric.inv
    sg = metric.sqrt_det
    fu = calc.du(fieldvals)
    fv = calc.dv(fieldvals)
    pu = sg * (iuu * fu + iuv * fv)
    pv = sg * (iuv * fu + ivv * fv)
    return (calc.du(pu) + calc.dv(pv)) / sg


def tan_pole_distance(beta):
    """Distance of the signed angle to the nearest tan pole (odd multiple of pi/2)."""
    return np.abs(np.remainder(beta, math.pi) - math.pi / 2.0)


def _pole_band_mask(beta, band):
    return tan_pole_distance(beta) < band


@dataclass
class IdentityReport:
    """Residual norms for one identity, optionally across refinement levels."""

    name: str
    linf: float
    l2: float
    n_excluded: int = 0
    residual: np.ndarray = None
    levels: list = field(default_factory=list)   # [(n, linf, l2, excluded), ...]
    order: float = None
    at_floor: bool = False

    def to_dict(self):
        d = {
            "identity": self.name,
            "linf": self.linf,
            "l2": self.l2,
            "excluded": self.n_excluded,
        }
        if self.levels:
            d["levels"] = [{"n": n, "linf": li, "l2": l2, "excluded": ex}
                           for (n, li, l2, ex) in self.levels]
            d["observed_order"] = self.order
            d["at_floor"] = self.at_floor
        return d


def _norms(residual, valid):
    vals = residual[valid]
    if vals.size == 0:
        return 0.0, 0.0
    return float(np.max(np.abs(vals))), float(np.sqrt(np.mean(vals ** 2)))


@dataclass
class SurfaceAnalysis:
    """Everything the verifiers and reports need, computed once per grid."""

    grid: object
    frames: object
    metric: MetricField
    shape: ShapeOperatorField
    K_int: np.ndarray
    K_ext: np.ndarray
    grad_beta: FrameGradient
    lap_beta: np.ndarray
    tan_band: np.ndarray
    res_curvature: np.ndarray
    res_laplacian: np.ndarray
    res_connection: tuple
    band: float

    @property
    def valid(self):
        return ~self.frames.mask

    @property
    def valid_off_band(self):
        return self.valid & ~self.tan_band


def build_analysis(grid, band=TAN_BAND_DEFAULT):
    """Frames, curvature, gradients, Laplacian and residual fields for a grid."""
    frames = contact_angle_field(grid)
    metric = first_fundamental_form(grid)
    shape = shape_operator(grid, frames)
    K_int = gaussian_curvature_intrinsic(metric, grid)
    K_ext = gaussian_curvature_extrinsic(shape)
    gb = frame_gradient(frames.beta, frames, grid)
    lap = laplace_beltrami(frames.beta, metric, grid)
    tan_band = _pole_band_mask(frames.beta, band)

    res_curv = K_int - (1.0 - (gb.beta1 + 1.0) ** 2 - gb.beta2 ** 2)
    tan_beta = np.where(tan_band, 0.0, np.tan(frames.beta))
    res_lap = lap + tan_beta * ((gb.beta1 + 2.0) ** 2 + gb.beta2 ** 2)

    res_conn = _connection_residuals(grid, frames, gb, tan_beta)
    return SurfaceAnalysis(grid=grid, frames=frames, metric=metric, shape=shape,
                           K_int=K_int, K_ext=K_ext, grad_beta=gb, lap_beta=lap,
                           tan_band=tan_band, res_curvature=res_curv,
                           res_laplacian=res_lap, res_connection=res_conn,
                           band=band)


def _connection_residuals(grid, frames, gb, tan_beta):
    calc = grid.calc
    de2_u = calc.du(frames.e2)
    de2_v = calc.dv(frames.e2)
    comp = []
    for coeff in (frames.coeff1, frames.coeff2):
        D = coeff[..., 0, None] * de2_u + coeff[..., 1, None] * de2_v
        comp.append(np.sum(D * frames.e1, -1))
    res1 = comp[0] - tan_beta * gb.beta2
    res2 = comp[1] - (-tan_beta * (gb.beta1 + 2.0))
    return res1, res2


def verify_curvature_identity(grid, analysis=None):
    """Residual of K = 1 - |grad beta + e1|^2 against the intrinsic K."""
    an = analysis if analysis is not None else build_analysis(grid)
    linf, l2 = _norms(an.res_curvature, an.valid)
    return IdentityReport("curvature", linf, l2,
                          n_excluded=an.frames.n_masked,
                          residual=an.res_curvature)


def verify_laplacian_identity(grid, band=0.05, analysis=None):
    """Residual of Lap(beta) = -tan(beta)((beta_1+2)^2 + beta_2^2).

    Nodes within `band` of a tan pole are excluded and counted.
    """
    an = analysis if analysis is not None else build_analysis(grid, band=band)
    pole = _pole_band_mask(an.frames.beta, band)
    valid = an.valid & ~pole
    tan_beta = np.where(pole, 0.0, np.tan(an.frames.beta))
    res = an.lap_beta + tan_beta * ((an.grad_beta.beta1 + 2.0) ** 2
                                    + an.grad_beta.beta2 ** 2)
    linf, l2 = _norms(res, valid)
    return IdentityReport("laplacian", linf, l2,
                          n_excluded=int(np.sum(pole & an.valid)) + an.frames.n_masked,
                          residual=res)


def verify_connection_identity(grid, band=0.05, analysis=None):
    """Residuals of theta_2^1(e_k) against tan(beta)beta_2 and -tan(beta)(beta_1+2)."""
    an = analysis if analysis is not None else build_analysis(grid, band=band)
    pole = _pole_band_mask(an.frames.beta, band)
    valid = an.valid & ~pole
    tan_beta = np.where(pole, 0.0, np.tan(an.frames.beta))
    res1, res2 = _connection_residuals(grid, an.frames, an.grad_beta, tan_beta)
    res = np.maximum(np.abs(res1), np.abs(res2))
    linf, l2 = _norms(res, valid)
    return IdentityReport("connection", linf, l2,
                          n_excluded=int(np.sum(pole & an.valid)) + an.frames.n_masked,
                          residual=res)


def verify_gauss_agreement(grid, analysis=None):
    """|K_intrinsic - K_extrinsic| as a residual report."""
    an = analysis if analysis is not None else build_analysis(grid)
    res = an.K_int - an.K_ext
    linf, l2 = _norms(res, an.valid)
    return IdentityReport("gauss", linf, l2,
                          n_excluded=an.frames.n_masked, residual=res)


def verify_minimality(grid, analysis=None):
    """Per-node |H| with max/mean summary."""
    an = analysis if analysis is not None else build_analysis(grid)
    absH = np.abs(an.shape.H)
    vals = absH[an.valid]
    return {"field": absH,
            "max": float(vals.max()),
            "mean": float(vals.mean()),
            "n_masked": an.frames.n_masked}


IDENTITY_VERIFIERS = {
    "curvature": verify_curvature_identity,
    "laplacian": verify_laplacian_identity,
    "connection": verify_connection_identity,
    "gauss": verify_gauss_agreement,
}

# finest-level L-infinity bounds an identity must meet for a verify run to
# pass (measured with generous headroom on the analytic catalog surfaces)
IDENTITY_BOUNDS = {
    "curvature": 1e-4,
    "laplacian": 1e-3,
    "connection": 1e-3,
    "gauss": 5e-5,
}

ORDER_THRESHOLD = 1.7
FLOOR = 1e-10


def observed_order(ns, norms):
    """Least-squares slope of log(norm) against log(1/n) across levels."""
    ns = np.asarray(ns, float)
    norms = np.asarray(norms, float)
    if np.all(norms < FLOOR):
        return None  # at the roundoff floor; order is meaningless
    safe = np.maximum(norms, 1e-300)
    slope = np.polyfit(np.log(1.0 / ns), np.log(safe), 1)[0]
    return float(slope)


def refinement_study(entry, identity, levels, band=0.05):
    """Run one identity across nested grids and report norms plus order.

    entry is a catalog entry (or anything sample() accepts with a
    default_spec method); levels are per-axis node counts, at least three.
    """
    if len(levels) < 3:
        raise ValueError("refinement needs at least 3 grid levels")
    if identity not in IDENTITY_VERIFIERS:
        raise KeyError(f"unknown identity {identity!r}")
    rows = []
    last = None
    for n in levels:
        grid = entry.sample(entry.default_spec(int(n)))
        if identity in ("laplacian", "connection"):
            rep = IDENTITY_VERIFIERS[identity](grid, band=band)
        else:
            rep = IDENTITY_VERIFIERS[identity](grid)
        rows.append((int(n), rep.linf, rep.l2, rep.n_excluded))
        last = rep
    order = observed_order([r[0] for r in rows], [r[1] for r in rows])
    at_floor = order is None
    return IdentityReport(identity,
                          linf=rows[-1][1], l2=rows[-1][2],
                          n_excluded=rows[-1][3], residual=last.residual,
                          levels=rows, order=order, at_floor=at_floor)


def refinement_passed(report):
    """Exit criterion: order >= 1.7 (or at the floor) and finest Linf in bounds."""
    bound = IDENTITY_BOUNDS[report.name]
    order_ok = report.at_floor or (report.order is not None
                                   and report.order >= ORDER_THRESHOLD)
    return bool(order_ok and report.linf <= bound)
