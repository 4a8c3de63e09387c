"""Reading and writing complexes as ASCII OFF or JSON."""
import json
from pathlib import Path

import numpy as np

from .errors import ParseError, UnsupportedFormat
from .mesh import build_complex

__all__ = ["mesh_io", "read_mesh", "write_mesh"]

FORMATS = ("OFF", "JSON")


def _format_for(path, fmt):
    if fmt is None:
        fmt = Path(path).suffix.lstrip(".")
    fmt = str(fmt).upper()
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"unsupported mesh format {fmt!r}; use OFF or JSON")
    return fmt


def _num(x):
    return f"{float(x):.17g}"


def _coords_3d(cplx):
    p = cplx.vertex_coords
    if p.shape[1] == 2:
        p = np.c_[p, np.zeros(len(p))]
    return p


def write_mesh(cplx, path, fmt=None):
    fmt = _format_for(path, fmt)
    tris = cplx.oriented_triangles()
    if fmt == "OFF":
        p = _coords_3d(cplx)
        lines = ["OFF", f"{cplx.n0} {cplx.n2} {cplx.n1}"]
        lines += [" ".join(_num(v) for v in row) for row in p]
        lines += ["3 " + " ".join(str(int(i)) for i in t) for t in tris]
        text = "\n".join(lines) + "\n"
    else:
        # float() repr is the shortest string that round-trips exactly
        doc = {"vertices": [[float(v) for v in row] for row in cplx.vertex_coords],
               "triangles": [[int(i) for i in t] for t in tris]}
        text = json.dumps(doc, indent=1) + "\n"
    Path(path).write_text(text)
    return Path(path)


def _tokens(text):
    """Yield (line_number, tokens) for non-empty, non-comment lines."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _read_off(text):
    lines = list(_tokens(text))
    if not lines:
        raise ParseError("empty file", 1)
    no, head = lines[0]
    if head[0] != "OFF":
        raise ParseError("missing 'OFF' header", no)
    counts = head[1:]
    rest = lines[1:]
    if not counts:
        if not rest:
            raise ParseError("missing counts line", no + 1)
        no, counts = rest[0]
        rest = rest[1:]
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("counts line must hold 'nvertices nfaces nedges'", no) from None
    if len(rest) < nv + nf:
        last = rest[-1][0] if rest else no
        raise ParseError(f"file truncated: expected {nv} vertices and {nf} faces", last + 1)
    verts = []
    for no, tok in rest[:nv]:
        if len(tok) != 3:
            raise ParseError("vertex line needs 3 coordinates", no)
        try:
            verts.append([float(t) for t in tok])
        except ValueError:
            raise ParseError("bad vertex coordinate", no) from None
    faces = []
    for no, tok in rest[nv:nv + nf]:
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise ParseError("bad face index", no) from None
        if len(vals) != 4 or vals[0] != 3:
            raise ParseError("only triangular faces '3 i j k' are supported", no)
        if min(vals[1:]) < 0 or max(vals[1:]) >= nv:
            raise ParseError("face index out of range", no)
        faces.append(vals[1:])
    if len(rest) > nv + nf:
        raise ParseError("unexpected trailing data", rest[nv + nf][0])
    verts = np.array(verts)
    if np.all(verts[:, 2] == 0.0):
        verts = verts[:, :2]
    return build_complex(verts, faces)


def _read_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "vertices" not in doc or "triangles" not in doc:
        raise ParseError("expected an object with 'vertices' and 'triangles'", 1)
    try:
        verts = np.array(doc["vertices"], dtype=float)
        tris = np.array(doc["triangles"], dtype=np.int64)
    except (TypeError, ValueError):
        raise ParseError("malformed vertex or triangle arrays", 1) from None
    if verts.ndim != 2 or verts.shape[1] not in (2, 3) or tris.ndim != 2 or tris.shape[1] != 3:
        raise ParseError("vertices must be [[x,y(,z)],...] and triangles [[i,j,k],...]", 1)
    return build_complex(verts, tris)


def read_mesh(path, fmt=None):
    fmt = _format_for(path, fmt)
    text = Path(path).read_text()
    return _read_off(text) if fmt == "OFF" else _read_json(text)


def mesh_io(path, direction, fmt=None, complex=None):
    """Read or write a mesh file.

    Parameters
    ----------
    path : str or Path
    direction : {"read", "write"}
    fmt : {"OFF", "JSON"}, optional
        Defaults to the file suffix.
    complex : SimplicialComplex2
        Required when writing.
    """
    if direction == "read":
        return read_mesh(path, fmt)
    if direction == "write":
        if complex is None:
            raise ValueError("writing needs a complex")
        return write_mesh(complex, path, fmt)
    raise ValueError(f"direction must be 'read' or 'write', got {direction!r}")
