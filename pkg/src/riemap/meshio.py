"""OFF and OBJ reading/writing for planar triangle meshes.

Only vertices and triangular faces are handled.  A z coordinate is accepted
on read and written as 0.  OBJ texture/normal references (``f 1/2/3``) are
stripped on read and never written.
"""
from pathlib import Path

import numpy as np

from .errors import MeshFormatError
from .mesh import build_mesh

FLOAT_FMT = "%.17g"


def _tokens(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_off(text):
    it = _tokens(text)
    try:
        lineno, head = next(it)
    except StopIteration:
        raise MeshFormatError("empty OFF file") from None
    if head[0] != "OFF":
        raise MeshFormatError(f"line {lineno}: expected 'OFF' header")
    counts = head[1:]
    if not counts:
        lineno, counts = next(it, (lineno, []))
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise MeshFormatError(f"line {lineno}: expected vertex and face counts") from None
    verts, faces = [], []
    for _ in range(nv):
        lineno, tok = next(it, (None, None))
        if tok is None:
            raise MeshFormatError("unexpected end of file in vertex block")
        try:
            xyz = [float(t) for t in tok[:3]]
        except ValueError:
            raise MeshFormatError(f"line {lineno}: bad vertex") from None
        if len(xyz) < 2:
            raise MeshFormatError(f"line {lineno}: vertex needs at least 2 coordinates")
        verts.append(xyz[:2])
    for _ in range(nf):
        lineno, tok = next(it, (None, None))
        if tok is None:
            raise MeshFormatError("unexpected end of file in face block")
        try:
            k = int(tok[0])
            idx = [int(t) for t in tok[1:1 + k]]
        except ValueError:
            raise MeshFormatError(f"line {lineno}: bad face") from None
        if k != 3 or len(idx) != 3:
            raise MeshFormatError(f"line {lineno}: only triangles are supported")
        faces.append(idx)
    return np.array(verts, dtype=float).reshape(-1, 2), np.array(faces, dtype=np.int64).reshape(-1, 3)


def parse_obj(text):
    verts, faces = [], []
    for lineno, tok in _tokens(text):
        if tok[0] == "v":
            try:
                verts.append([float(tok[1]), float(tok[2])])
            except (IndexError, ValueError):
                raise MeshFormatError(f"line {lineno}: bad vertex") from None
        elif tok[0] == "f":
            if len(tok) != 4:
                raise MeshFormatError(f"line {lineno}: only triangles are supported")
            try:
                idx = [int(t.split("/")[0]) for t in tok[1:]]
            except ValueError:
                raise MeshFormatError(f"line {lineno}: bad face") from None
            # negative indices count back from the latest vertex
            faces.append([i - 1 if i > 0 else len(verts) + i for i in idx])
    return np.array(verts, dtype=float).reshape(-1, 2), np.array(faces, dtype=np.int64).reshape(-1, 3)


def format_off(vertices, faces):
    lines = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    lines += [f"{FLOAT_FMT % x} {FLOAT_FMT % y} 0" for x, y in vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in faces]
    return "\n".join(lines) + "\n"


def format_obj(vertices, faces):
    lines = [f"v {FLOAT_FMT % x} {FLOAT_FMT % y} 0" for x, y in vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in faces]
    return "\n".join(lines) + "\n"


def read_arrays(path):
    path = Path(path)
    text = path.read_text()
    suffix = path.suffix.lower()
    if suffix == ".off":
        return parse_off(text)
    if suffix == ".obj":
        return parse_obj(text)
    raise MeshFormatError(f"unknown mesh format {suffix!r}")


def read_mesh(path, strict=False):
    verts, faces = read_arrays(path)
    return build_mesh(verts, faces, strict=strict)


def write_arrays(path, vertices, faces):
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".off":
        text = format_off(vertices, faces)
    elif suffix == ".obj":
        text = format_obj(vertices, faces)
    else:
        raise MeshFormatError(f"unknown mesh format {suffix!r}")
    path.write_text(text)


def write_mesh(path, mesh):
    write_arrays(path, mesh.vertices, mesh.faces)
