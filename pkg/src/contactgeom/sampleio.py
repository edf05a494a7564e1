"""Versioned file formats: native sample files and the analyzer's fields.csv.

Native format (diff-friendly, self-describing):

    S3SAMPLES v1 <nu> <nv> <topo_u> <topo_v> <u0> <u1> <v0> <v1>
    <u> <v> <x1> <y1> <x2> <y2>          (nu*nv rows, v-index fastest)

All floats are written as %.12e.  read_samples also accepts the analyzer's
fields.csv (recognized by its header line); grid shape is inferred from the
u/v columns and an axis is treated as periodic when its node spacing wraps
the range to 2*pi.
"""

import numpy as np

from .errors import OffSphere, ParseError

FORMAT_MAGIC = "S3SAMPLES"
FORMAT_VERSION = "v1"
FLOAT_FMT = "%.12e"
FIELDS_CSV_HEADER = "u,v,x1,y1,x2,y2,beta,K,H,res_curvature,res_laplacian,masked"

_OFF_SPHERE_TOL = 1e-6


def write_samples(grid, path):
    """Write a SurfaceGrid in the native sample format."""
    spec = grid.spec
    header = " ".join([
        FORMAT_MAGIC, FORMAT_VERSION,
        str(spec.n_u), str(spec.n_v), spec.topology_u, spec.topology_v,
        FLOAT_FMT % spec.u_range[0], FLOAT_FMT % spec.u_range[1],
        FLOAT_FMT % spec.v_range[0], FLOAT_FMT % spec.v_range[1],
    ])
    us, vs = spec.us, spec.vs
    lines = [header]
    for i in range(spec.n_u):
        for j in range(spec.n_v):
            p = grid.points[i, j]
            lines.append(" ".join(
                FLOAT_FMT % x for x in (us[i], vs[j], p[0], p[1], p[2], p[3])))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(tokens, lineno):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"bad float: {exc}", line=lineno) from None


def _check_on_sphere(points):
    dev = np.abs(np.linalg.norm(points, axis=-1) - 1.0)
    if np.any(dev > _OFF_SPHERE_TOL):
        ij = np.unravel_index(np.argmax(dev), dev.shape)
        raise OffSphere(
            f"node {tuple(int(k) for k in ij)} has norm deviating by "
            f"{dev[ij]:.3e} from 1", node=tuple(int(k) for k in ij))


def _grid_from_columns(u, v, pts4, lineno_base=1):
    """Reconstruct a grid (nu, nv, ranges, topologies) from flat u/v columns."""
    from .surface import GridSpec, SurfaceGrid

    total = len(u)
    nv = 1
    while nv < total and u[nv] == u[0]:
        nv += 1
    if nv < 2 or total % nv != 0:
        raise ParseError("rows do not form a rectangular u-major grid",
                         line=lineno_base + nv)
    nu = total // nv
    U = u.reshape(nu, nv)
    V = v.reshape(nu, nv)
    if not (np.all(U == U[:, :1]) and np.all(V == V[:1, :])):
        raise ParseError("u/v columns are not a tensor-product grid",
                         line=lineno_base + 1)
    us, vs = U[:, 0], V[0, :]

    def axis(vals):
        h = vals[1] - vals[0]
        steps = np.diff(vals)
        if np.any(np.abs(steps - h) > 1e-9 * max(1.0, abs(h))):
            raise ParseError("non-uniform node spacing", line=lineno_base + 1)
        span_wrap = vals[-1] - vals[0] + h
        if abs(span_wrap - 2.0 * np.pi) < 1e-6:
            return "periodic", (vals[0], vals[0] + 2.0 * np.pi)
        return "chart", (vals[0], vals[-1])

    topo_u, u_range = axis(us)
    topo_v, v_range = axis(vs)
    spec = GridSpec(nu, nv, u_range, v_range, topo_u, topo_v)
    points = pts4.reshape(nu, nv, 4)
    _check_on_sphere(points)
    return SurfaceGrid(spec, points / np.linalg.norm(points, axis=-1, keepdims=True))


def read_samples(path):
    """Parse a native sample file or a fields.csv export into a SurfaceGrid."""
    from .surface import GridSpec, SurfaceGrid

    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)

    first = lines[0].strip()
    if first == FIELDS_CSV_HEADER:
        rows = [ln for ln in lines[1:] if ln.strip()]
        data = []
        for k, ln in enumerate(rows, start=2):
            toks = ln.split(",")
            if len(toks) != 12:
                raise ParseError(f"expected 12 columns, found {len(toks)}", line=k)
            data.append(_parse_floats(toks[:6], k))
        arr = np.asarray(data, float)
        if len(arr) < 4:
            raise ParseError("too few rows for a grid", line=len(lines))
        return _grid_from_columns(arr[:, 0], arr[:, 1], arr[:, 2:6])

    head = first.split()
    if len(head) != 10 or head[0] != FORMAT_MAGIC:
        raise ParseError(f"expected '{FORMAT_MAGIC} {FORMAT_VERSION} ...' header "
                         "or a fields.csv header", line=1)
    if head[1] != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {head[1]!r}", line=1)
    try:
        nu, nv = int(head[2]), int(head[3])
    except ValueError:
        raise ParseError("node counts must be integers", line=1) from None
    topo_u, topo_v = head[4], head[5]
    u0, u1, v0, v1 = _parse_floats(head[6:10], 1)
    try:
        spec = GridSpec(nu, nv, (u0, u1), (v0, v1), topo_u, topo_v)
    except ValueError as exc:
        raise ParseError(str(exc), line=1) from None

    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != nu * nv:
        raise ParseError(f"expected {nu * nv} rows, found {len(rows)}",
                         line=len(lines))
    points = np.empty((nu * nv, 4))
    for k, ln in enumerate(rows, start=2):
        toks = ln.split()
        if len(toks) != 6:
            raise ParseError(f"expected 6 columns, found {len(toks)}", line=k)
        vals = _parse_floats(toks, k)
        points[k - 2] = vals[2:6]
    points = points.reshape(nu, nv, 4)
    _check_on_sphere(points)
    points = points / np.linalg.norm(points, axis=-1, keepdims=True)
    return SurfaceGrid(spec, points, label=f"samples:{path}")
