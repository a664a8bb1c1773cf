"""Orthographic flat-shaded renders of a TriMesh (numpy z-buffer)."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMesh, IoFailure

BACKGROUND = (255, 255, 255)
BASE_COLOR = np.array([176.0, 196.0, 222.0])
AMBIENT = 0.25

_UNIT_CORNERS = np.array(np.meshgrid([0, 1], [0, 1], [0, 1], indexing="ij")).reshape(3, -1).T.astype(float)


@dataclass
class Camera:
    name: str
    direction: tuple  # viewing direction (camera -> scene)
    up: tuple


VIEWS = (
    Camera("front", (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
    Camera("top", (0.0, 0.0, -1.0), (0.0, 1.0, 0.0)),
    Camera("right", (-1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    Camera("angled", (-1.0, 1.0, -1.0), (0.0, 0.0, 1.0)),
)


@dataclass
class RenderImage:
    name: str
    pixels: np.ndarray  # (height, width, 3) uint8, top row first

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def nonbackground_fraction(self) -> float:
        return float(np.any(self.pixels != np.array(BACKGROUND, np.uint8), axis=2).mean())


def camera_basis(cam: Camera):
    d = np.asarray(cam.direction, float)
    d /= np.linalg.norm(d)
    up = np.asarray(cam.up, float)
    right = np.cross(d, up)
    right /= np.linalg.norm(right)
    up = np.cross(right, d)
    return right, up, d


def render(mesh, cam: Camera, size: int = 512, chunk: int = 1 << 20) -> RenderImage:
    """Rasterize with pixel-centre sampling; ties in depth go to the lower
    triangle index, so output is independent of evaluation order."""
    if len(mesh.triangles) == 0:
        raise EmptyMesh("nothing to render")
    right, up, d = camera_basis(cam)
    M = np.stack([right, up, d])
    # frame the projected unit cell so views of different structures line up
    box = _UNIT_CORNERS @ M.T
    lo, hi = box.min(axis=0), box.max(axis=0)
    ext = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    mid = 0.5 * (lo[:2] + hi[:2])
    P = mesh.vertices @ M.T
    px = (P[:, 0] - mid[0]) / ext * size + 0.5 * size
    py = (mid[1] - P[:, 1]) / ext * size + 0.5 * size
    depth = P[:, 2]

    T = mesh.triangles
    shade = np.abs(mesh.normals @ d)
    X, Y, Z = px[T], py[T], depth[T]
    # pixel (i, j) has centre (j + .5, i + .5)
    j0 = np.clip(np.ceil(X.min(1) - 0.5), 0, size).astype(np.int64)
    j1 = np.clip(np.floor(X.max(1) - 0.5), -1, size - 1).astype(np.int64)
    i0 = np.clip(np.ceil(Y.min(1) - 0.5), 0, size).astype(np.int64)
    i1 = np.clip(np.floor(Y.max(1) - 0.5), -1, size - 1).astype(np.int64)
    w = np.maximum(j1 - j0 + 1, 0)
    h = np.maximum(i1 - i0 + 1, 0)
    count = w * h
    area = (X[:, 1] - X[:, 0]) * (Y[:, 2] - Y[:, 0]) - (X[:, 2] - X[:, 0]) * (Y[:, 1] - Y[:, 0])
    keep = (count > 0) & (np.abs(area) > 1e-12)

    zbuf = np.full(size * size, np.inf)
    owner = np.full(size * size, -1, dtype=np.int64)
    tri_ids = np.nonzero(keep)[0]
    csum = np.cumsum(count[tri_ids])
    start = 0
    while start < len(tri_ids):
        base = csum[start - 1] if start else 0
        stop = int(np.searchsorted(csum, base + chunk, side="right"))
        stop = max(stop, start + 1)
        ids = tri_ids[start:stop]
        n = count[ids]
        t = np.repeat(ids, n)
        local = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
        jj = j0[t] + local % w[t]
        ii = i0[t] + local // w[t]
        cx, cy = jj + 0.5, ii + 0.5
        x0, y0 = X[t, 0], Y[t, 0]
        e1x, e1y = X[t, 1] - x0, Y[t, 1] - y0
        e2x, e2y = X[t, 2] - x0, Y[t, 2] - y0
        a = area[t]
        b1 = ((cx - x0) * e2y - (cy - y0) * e2x) / a
        b2 = (e1x * (cy - y0) - e1y * (cx - x0)) / a
        b0 = 1.0 - b1 - b2
        eps = -1e-9
        hit = (b0 >= eps) & (b1 >= eps) & (b2 >= eps)
        pix = (ii * size + jj)[hit]
        z = (b0 * Z[t, 0] + b1 * Z[t, 1] + b2 * Z[t, 2])[hit]
        tt = t[hit]
        _zmerge(zbuf, owner, pix, z, tt)
        start = stop

    img = np.empty((size * size, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    got = owner >= 0
    s = shade[owner[got]]
    img[got] = np.clip(np.rint(BASE_COLOR * (AMBIENT + (1.0 - AMBIENT) * s[:, None])), 0, 254).astype(np.uint8)
    return RenderImage(cam.name, img.reshape(size, size, 3))


def _zmerge(zbuf, owner, pix, z, tri):
    if not len(pix):
        return
    # per pixel: nearest depth, then lowest triangle id
    order = np.lexsort((tri, z, pix))
    pix, z, tri = pix[order], z[order], tri[order]
    first = np.ones(len(pix), dtype=bool)
    first[1:] = pix[1:] != pix[:-1]
    pix, z, tri = pix[first], z[first], tri[first]
    cur_z, cur_t = zbuf[pix], owner[pix]
    better = (z < cur_z) | ((z == cur_z) & (tri < cur_t))
    zbuf[pix[better]] = z[better]
    owner[pix[better]] = tri[better]


def render_views(mesh, size: int = 512) -> list:
    """front, top, right and angled views, in that order."""
    return [render(mesh, cam, size) for cam in VIEWS]


def save_png(image: RenderImage, path) -> None:
    from PIL import Image
    try:
        Image.fromarray(image.pixels, "RGB").save(os.fspath(path), format="PNG", optimize=False)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def save_ppm(image: RenderImage, path) -> None:
    try:
        with open(os.fspath(path), "wb") as fh:
            fh.write(f"P6\n{image.width} {image.height}\n255\n".encode("ascii"))
            fh.write(image.pixels.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None
