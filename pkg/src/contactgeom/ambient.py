"""Exact geometry of C^2 and the unit 3-sphere.

Points and vectors are stored as real 4-vectors in the order
(x1, y1, x2, y2) with z_k = x_k + i*y_k, so the real-coordinate view is
exact rather than reconstructed from complex parts.  All functions accept
plain arrays of shape (..., 4) and broadcast; the small dataclasses at the
bottom provide a typed single-point API on top of the same kernels.

Conventions fixed here and used everywhere else:

* multiplication by i is the linear map J: (x1,y1,x2,y2) -> (-y1,x1,-y2,x2)
* the Reeb field is xi(z) = i z
* z_perp = (-conj(z2), conj(z1)), i.e. (-x2, y2, x1, -y1)
* canonical frame of T_z S^3: f1 = z_perp, f2 = i z_perp, f3 = i z
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotTangent, OffSphere

EXACT_TOL = 1e-12       # tolerance for closed-form identities
TANGENT_TOL = 1e-8      # tolerance for tangency preconditions


def _vec(x):
    v = np.asarray(getattr(x, "vec", x), dtype=float)
    if v.shape[-1] != 4:
        raise ValueError(f"expected trailing dimension 4, got shape {v.shape}")
    return v


def dot(a, b):
    """Euclidean inner product <a, b> = Re (a, b), broadcasting over leading axes."""
    return np.sum(_vec(a) * _vec(b), axis=-1)


def norm(a):
    return np.linalg.norm(_vec(a), axis=-1)


def jmul(v):
    """Multiply by i: the complex structure J on R^4 = C^2."""
    v = _vec(v)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    out[..., 2] = -v[..., 3]
    out[..., 3] = v[..., 2]
    return out


def complex_view(v):
    """Return (z1, z2) complex components of a real 4-vector."""
    v = _vec(v)
    return v[..., 0] + 1j * v[..., 1], v[..., 2] + 1j * v[..., 3]


def from_complex(z1, z2):
    """Assemble a real 4-vector from complex components."""
    z1 = np.asarray(z1, complex)
    z2 = np.asarray(z2, complex)
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)


def hermitian(z, w):
    """Hermitian product (z, w) = z1 conj(w1) + z2 conj(w2)."""
    z1, z2 = complex_view(z)
    w1, w2 = complex_view(w)
    return z1 * np.conj(w1) + z2 * np.conj(w2)


def inner(z, w):
    """Real inner product <z, w> = Re (z, w); equals the R^4 dot product."""
    return dot(z, w)


def reeb(z):
    """Reeb field xi(z) = i z; unit and tangent to S^3 for unit z."""
    return jmul(z)


def perp(z):
    """z_perp = (-conj(z2), conj(z1)); unit, Hermitian-orthogonal to z."""
    v = _vec(z)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 2]
    out[..., 1] = v[..., 3]
    out[..., 2] = v[..., 0]
    out[..., 3] = -v[..., 1]
    return out


def canonical_frame_vectors(z):
    """The frame (f1, f2, f3) = (z_perp, i z_perp, i z) of T_z S^3 as arrays."""
    f1 = perp(z)
    return f1, jmul(f1), jmul(z)


def contact_project(z, v):
    """Project a tangent vector onto the contact plane delta_z = ker <xi, .>.

    Raises NotTangent when |<v, z>| exceeds the tangency tolerance.
    """
    z = _vec(z)
    v = _vec(v)
    if np.any(np.abs(dot(v, z)) > TANGENT_TOL):
        raise NotTangent("vector is not tangent to S^3 at the base point")
    xi = reeb(z)
    return v - dot(v, xi)[..., None] * xi


def frame_derivative_check(z, v, h):
    """Residual of the structural derivative D f3 = -w2 f1 + w1 f2.

    Differentiates f3 = i z numerically along the great circle
    t -> cos(t) z + sin(t) v (which stays on S^3 exactly for unit tangent v),
    takes the part tangent to S^3, and subtracts
    -<v,f2> f1 + <v,f1> f2.  The residual decays as O(h^2).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    z = _vec(z)
    v = _vec(v)
    zp = math.cos(h) * z + math.sin(h) * v
    zm = math.cos(h) * z - math.sin(h) * v
    d = (reeb(zp) - reeb(zm)) / (2.0 * h)
    d_tan = d - dot(d, z)[..., None] * z
    f1, f2, _ = canonical_frame_vectors(z)
    expected = -dot(v, f2)[..., None] * f1 + dot(v, f1)[..., None] * f2
    return float(norm(d_tan - expected))


def _det3_cols(a, b, c, cols):
    i, j, k = cols
    return (a[..., i] * (b[..., j] * c[..., k] - b[..., k] * c[..., j])
            - a[..., j] * (b[..., i] * c[..., k] - b[..., k] * c[..., i])
            + a[..., k] * (b[..., i] * c[..., j] - b[..., j] * c[..., i]))


def cross4(a, b, c):
    """Generalized cross product on R^4 with <cross4(a,b,c), x> = det[a; b; c; x].

    For an orthonormal triple the result is the unit vector completing it to a
    positively oriented basis of R^4 (rows in the listed order).
    """
    a, b, c = _vec(a), _vec(b), _vec(c)
    shape = np.broadcast(a, b, c).shape
    d = np.empty(shape, float)
    d[..., 0] = -_det3_cols(a, b, c, (1, 2, 3))
    d[..., 1] = +_det3_cols(a, b, c, (0, 2, 3))
    d[..., 2] = -_det3_cols(a, b, c, (0, 1, 3))
    d[..., 3] = +_det3_cols(a, b, c, (0, 1, 2))
    return d


# ---------------------------------------------------------------------------
# typed single-point layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitSpherePoint:
    """A point z in C^2 with (z, z) = 1."""

    z1: complex
    z2: complex

    def __post_init__(self):
        if abs(self.norm2 - 1.0) > EXACT_TOL:
            raise OffSphere(f"|z|^2 = {self.norm2!r} deviates from 1 beyond {EXACT_TOL}")

    @property
    def norm2(self):
        return abs(self.z1) ** 2 + abs(self.z2) ** 2

    @property
    def vec(self):
        return np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])

    # real-coordinate view
    @property
    def x1(self):
        return self.z1.real

    @property
    def y1(self):
        return self.z1.imag

    @property
    def x2(self):
        return self.z2.real

    @property
    def y2(self):
        return self.z2.imag

    @classmethod
    def from_vec(cls, v):
        v = np.asarray(v, float)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    @classmethod
    def project(cls, v):
        """Normalize an off-sphere 4-vector onto S^3 and wrap it."""
        v = np.asarray(v, float)
        n = np.linalg.norm(v)
        if n == 0:
            raise OffSphere("cannot project the zero vector onto S^3")
        return cls.from_vec(v / n)


@dataclass(frozen=True)
class AmbientVector:
    """A vector of C^2 attached at a base point."""

    v1: complex
    v2: complex

    @property
    def vec(self):
        return np.array([self.v1.real, self.v1.imag, self.v2.real, self.v2.imag])

    @classmethod
    def from_vec(cls, v):
        v = np.asarray(v, float)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    def check_tangent_at(self, z, tol=EXACT_TOL):
        return abs(float(dot(self.vec, _vec(z)))) <= tol


@dataclass(frozen=True)
class AmbientFrame:
    """Orthonormal frame (f1, f2, f3) of T_z S^3 with coframe w^i(v) = <v, f_i>."""

    base: UnitSpherePoint
    f1: AmbientVector
    f2: AmbientVector
    f3: AmbientVector

    def coframe(self, v):
        v = _vec(v)
        return (float(dot(v, self.f1.vec)),
                float(dot(v, self.f2.vec)),
                float(dot(v, self.f3.vec)))

    def gram(self):
        m = np.stack([self.f1.vec, self.f2.vec, self.f3.vec])
        return m @ m.T


def canonical_frame(z):
    """Canonical frame at z as a typed AmbientFrame."""
    base = z if isinstance(z, UnitSpherePoint) else UnitSpherePoint.from_vec(_vec(z))
    f1, f2, f3 = canonical_frame_vectors(base.vec)
    return AmbientFrame(base,
                        AmbientVector.from_vec(f1),
                        AmbientVector.from_vec(f2),
                        AmbientVector.from_vec(f3))
