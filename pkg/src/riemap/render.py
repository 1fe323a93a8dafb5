"""SVG checkerboard pullbacks.

A black-and-white grid defined on the target plane is pulled back through a
PL map: each domain face (or each piece of a visual subdivision of it) is
filled with the grid colour at the image of its barycenter.
"""
import numpy as np

SVG_HEADER = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
              '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              'width="{w:.0f}" height="{h:.0f}" viewBox="0 0 {w:.0f} {h:.0f}">\n')


def _reference_subdivision(depth):
    """Barycentric coordinates (k, 3, 3) of the 4**depth children of the reference triangle."""
    tris = [np.eye(3)]
    for _ in range(depth):
        nxt = []
        for t in tris:
            a, b, c = t
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            nxt += [np.array(x) for x in ([a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca])]
        tris = nxt
    return np.array(tris)


def checker_parity(points, lo, size, density):
    """0/1 checkerboard colour of target-plane points; ``density`` cells span ``size``."""
    s = (np.asarray(points) - lo) / size * density
    return (np.floor(s[:, 0]).astype(np.int64) + np.floor(s[:, 1]).astype(np.int64)) % 2


def render_checkerboard(mesh, images, target_corners=None, density=8, subdivide=0,
                        width=800.0, margin=10.0, outline=True):
    """Return an SVG document (str) of the checkerboard pulled back onto the domain."""
    images = np.asarray(images, dtype=float)
    ref = images if target_corners is None else np.asarray(target_corners, dtype=float)
    lo = ref.min(axis=0)
    size = float(np.max(ref.max(axis=0) - lo))

    sub = _reference_subdivision(subdivide)  # (k, 3, 3)
    f = mesh.faces
    dom = np.einsum("kij,mjd->mkid", sub, mesh.vertices[f]).reshape(-1, 3, 2)
    img = np.einsum("kij,mjd->mkid", sub, images[f]).reshape(-1, 3, 2)
    dark = checker_parity(img.mean(axis=1), lo, size, density) == 1

    vlo = mesh.vertices.min(axis=0)
    vhi = mesh.vertices.max(axis=0)
    span = vhi - vlo
    scale = (width - 2 * margin) / max(span[0], span[1])
    w = span[0] * scale + 2 * margin
    h = span[1] * scale + 2 * margin

    def xy(p):
        return (p[..., 0] - vlo[0]) * scale + margin, (vhi[1] - p[..., 1]) * scale + margin

    X, Y = xy(dom[dark])
    parts = []
    for xs, ys in zip(X, Y):
        parts.append("M{:.3f} {:.3f}L{:.3f} {:.3f}L{:.3f} {:.3f}Z".format(
            xs[0], ys[0], xs[1], ys[1], xs[2], ys[2]))
    out = [SVG_HEADER.format(w=w, h=h)]
    out.append(f'<rect x="0" y="0" width="{w:.0f}" height="{h:.0f}" fill="#ffffff"/>\n')
    # white faces are drawn too so the domain silhouette shows against the page
    Xw, Yw = xy(dom[~dark])
    white = ["M{:.3f} {:.3f}L{:.3f} {:.3f}L{:.3f} {:.3f}Z".format(
        xs[0], ys[0], xs[1], ys[1], xs[2], ys[2]) for xs, ys in zip(Xw, Yw)]
    if white:
        out.append('<path fill="#f4f4f4" stroke="none" d="' + "".join(white) + '"/>\n')
    if parts:
        out.append('<path fill="#000000" stroke="none" d="' + "".join(parts) + '"/>\n')
    if outline:
        bx, by = xy(mesh.vertices[mesh.boundary_loop])
        pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(bx, by))
        out.append(f'<polygon fill="none" stroke="#808080" stroke-width="0.5" points="{pts}"/>\n')
    out.append("</svg>\n")
    return "".join(out)
