"""Periodic linear-elastic homogenization on a voxel grid.

Each voxel is a trilinear hexahedron (2x2x2 Gauss).  Displacements live on
the R^3 periodic node lattice; the operator is applied matrix-free as one
GEMM over all elements, scaled per element by its stiffness factor.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError, SingularSystem, SolverNoConvergence

log = logging.getLogger(__name__)

# node n of an element sits at offset CORNERS[n] (x fastest)
CORNERS = np.array([(a, b, c) for c in (0, 1) for b in (0, 1) for a in (0, 1)])
E_VOID = 1e-9
TOL = 1e-6
MAX_ITER = 5000
# residual reference never drops below this fraction of the load scale, so
# load cases whose right-hand side is pure round-off still terminate
RESIDUAL_FLOOR = 1e-8
# bytes allowed for the gathered element displacements in one GEMM
GEMM_BUDGET = 256 << 20


@dataclass(frozen=True)
class BaseMaterial:
    E_base: float = 1.0
    nu_base: float = 0.45
    rho_base: float = 1.0

    def stiffness(self) -> np.ndarray:
        return isotropic_stiffness(self.E_base, self.nu_base)


BASE = BaseMaterial()


def isotropic_stiffness(E: float, nu: float) -> np.ndarray:
    """6x6 Voigt stiffness (11,22,33,23,13,12) with engineering shear strains."""
    lam = E * nu / ((1 + nu) * (1 - 2 * nu))
    mu = E / (2 * (1 + nu))
    D = np.zeros((6, 6))
    D[:3, :3] = lam
    D[np.arange(3), np.arange(3)] += 2 * mu
    D[3:, 3:] = mu * np.eye(3)
    return D


def element_stiffness(D: np.ndarray, h: float) -> np.ndarray:
    """24x24 stiffness of an h-cube, dofs ordered (node, component)."""
    g = (np.array([-1.0, 1.0]) / np.sqrt(3.0) + 1.0) / 2.0
    Ke = np.zeros((24, 24))
    sgn = np.where(CORNERS == 1, 1.0, -1.0)
    for qx in g:
        for qy in g:
            for qz in g:
                q = np.array([qx, qy, qz])
                f = np.where(CORNERS == 1, q, 1.0 - q)  # per-node 1-D factors
                dN = sgn * np.stack([f[:, 1] * f[:, 2], f[:, 0] * f[:, 2], f[:, 0] * f[:, 1]], 1) / h
                B = np.zeros((6, 24))
                for n in range(8):
                    x, y, z = dN[n]
                    B[0, 3 * n], B[1, 3 * n + 1], B[2, 3 * n + 2] = x, y, z
                    B[3, 3 * n + 1], B[3, 3 * n + 2] = z, y
                    B[4, 3 * n], B[4, 3 * n + 2] = z, x
                    B[5, 3 * n], B[5, 3 * n + 1] = y, x
                Ke += B.T @ D @ B * (h ** 3 / 8.0)
    return Ke


def unit_strain_displacements(h: float) -> np.ndarray:
    """(24, 6) element nodal displacements of the six unit macro strains."""
    X = CORNERS * h
    eps = np.zeros((6, 3, 3))
    for i in range(3):
        eps[i, i, i] = 1.0
    for k, (i, j) in zip((3, 4, 5), ((1, 2), (0, 2), (0, 1))):
        eps[k, i, j] = eps[k, j, i] = 0.5
    return np.stack([X @ eps[k].T for k in range(6)], axis=-1).reshape(24, 6)


class PeriodicOperator:
    """u (3, m, R, R, R) -> K u with periodic node wrapping."""

    def __init__(self, scale: np.ndarray, Ke: np.ndarray):
        self.scale = scale
        self.Ke = Ke
        self.R = scale.shape[0]

    def gather(self, u: np.ndarray) -> np.ndarray:
        """Element nodal values (8, 3, m, R, R, R)."""
        R = self.R
        up = np.empty(u.shape[:2] + (R + 1,) * 3)
        up[..., :R, :R, :R] = u
        up[..., R, :, :] = up[..., 0, :, :]
        up[..., :, R, :] = up[..., :, 0, :]
        up[..., :, :, R] = up[..., :, :, 0]
        return np.stack([up[..., a:a + R, b:b + R, c:c + R] for a, b, c in CORNERS])

    def scatter(self, F: np.ndarray) -> np.ndarray:
        """Sum element nodal forces (8, 3, m, R, R, R) back onto nodes."""
        R = self.R
        fp = np.zeros(F.shape[1:3] + (R + 1,) * 3)
        for n, (a, b, c) in enumerate(CORNERS):
            fp[..., a:a + R, b:b + R, c:c + R] += F[n]
        fp[..., 0, :, :] += fp[..., R, :, :]
        fp[..., :, 0, :] += fp[..., :, R, :]
        fp[..., :, :, 0] += fp[..., :, :, R]
        return fp[..., :R, :R, :R]

    def __call__(self, u: np.ndarray) -> np.ndarray:
        m = u.shape[1]
        per_case = 24 * self.R ** 3 * 8
        step = max(1, GEMM_BUDGET // per_case)
        out = np.empty_like(u)
        for s in range(0, m, step):
            part = u[:, s:s + step]
            G = self.gather(part)
            F = (self.Ke @ G.reshape(24, -1)).reshape(G.shape)
            F *= self.scale
            out[:, s:s + step] = self.scatter(F)
        return out

    def diagonal(self) -> np.ndarray:
        """(3, R, R, R) diagonal of the assembled matrix."""
        dK = np.diag(self.Ke).reshape(8, 3)
        F = np.stack([dK[n][:, None, None, None] * self.scale for n in range(8)])[:, :, None]
        return self.scatter(F)[:, 0]


@dataclass
class SolveInfo:
    iterations: int
    residuals: np.ndarray


def pcg(op: PeriodicOperator, b: np.ndarray, ref: np.ndarray, tol: float = TOL,
        max_iter: int = MAX_ITER):
    """Diagonally preconditioned CG, one column per load case (axis 1).

    Column j stops updating once ||r_j|| < tol * ref_j.
    """
    Minv = 1.0 / op.diagonal()[:, None]
    m = b.shape[1]

    def dot(a, c):
        return np.einsum("imxyz,imxyz->m", a, c)

    x = np.zeros_like(b)
    r = b.copy()
    z = Minv * r
    p = z.copy()
    rz = dot(r, z)
    res = np.sqrt(dot(r, r)) / ref
    active = res >= tol
    it = 0
    while active.any():
        if it >= max_iter:
            raise SolverNoConvergence(
                f"PCG did not reach relative residual {tol:g} in {max_iter} iterations "
                f"(worst {res.max():.3g})", iterations=it, residual=float(res.max()))
        Ap = op(p)
        pAp = dot(p, Ap)
        ok = active & (pAp > 0)
        alpha = np.where(ok, rz / np.where(ok, pAp, 1.0), 0.0)
        shape = (1, m, 1, 1, 1)
        x += alpha.reshape(shape) * p
        r -= alpha.reshape(shape) * Ap
        res = np.sqrt(dot(r, r)) / ref
        active &= res >= tol
        active &= ok
        z = Minv * r
        rz_new = dot(r, z)
        beta = np.where(active, rz_new / np.where(rz != 0, rz, 1.0), 0.0)
        p = z + beta.reshape(shape) * p
        rz = rz_new
        it += 1
    return x, SolveInfo(it, res)


def _scale_field(occupancy: np.ndarray, e_void: float) -> np.ndarray:
    return np.where(occupancy, 1.0, e_void)


def homogenize(grid, base: BaseMaterial = BASE, e_void: float = E_VOID, tol: float = TOL,
               max_iter: int = MAX_ITER, check_singular: bool = True, info: dict = None) -> np.ndarray:
    """Homogenized 6x6 stiffness of a periodic voxel grid (unit cell volume 1).

    ``grid`` is a VoxelGrid or a boolean R^3 array.  Void voxels carry
    ``e_void`` times the base stiffness.  With ``check_singular`` a diagonal
    entry below 10 * e_void * E_base raises SingularSystem.
    """
    occ = np.asarray(getattr(grid, "occupancy", grid), dtype=bool)
    if occ.ndim != 3 or len(set(occ.shape)) != 1 or occ.shape[0] < 2:
        raise PreconditionError(f"expected a cubic grid with R >= 2, got shape {occ.shape}")
    if not occ.any():
        raise PreconditionError("grid has no occupied voxel")
    R = occ.shape[0]
    h = 1.0 / R
    Ke = element_stiffness(base.stiffness(), h)
    scale = _scale_field(occ, e_void)
    op = PeriodicOperator(scale, Ke)
    U0 = unit_strain_displacements(h)
    KU0 = Ke @ U0  # (24, 6)
    Fe = KU0.reshape(8, 3, 6)[..., None, None, None] * scale  # (8, 3, 6, R, R, R)
    b = op.scatter(Fe)
    load_scale = np.sqrt(np.sum(scale ** 2)) * np.linalg.norm(KU0, axis=0)
    ref = np.maximum(np.sqrt(np.einsum("imxyz,imxyz->m", b, b)), RESIDUAL_FLOOR * load_scale)
    x, sinfo = pcg(op, b, ref, tol, max_iter)
    log.debug("homogenize R=%d: %d iterations", R, sinfo.iterations)
    if info is not None:
        info.update(iterations=sinfo.iterations, residuals=sinfo.residuals.tolist())
    # corrected element displacements W = U0 - chi; C_kl = sum_e W_k^T Ke W_l
    G = op.gather(x)  # (8, 3, 6, R, R, R)
    W = U0.reshape(8, 3, 6)[..., None, None, None] - G
    W = W.reshape(24, 6, -1)
    C = np.zeros((6, 6))
    s = scale.ravel()
    for k in range(6):
        KW = (Ke @ W[:, k, :]) * s
        C[k] = np.einsum("iml,il->m", W, KW)
    C = 0.5 * (C + C.T)
    if check_singular:
        _check_singular(C, e_void * base.E_base)
    return C


def _check_singular(C: np.ndarray, e_void: float) -> None:
    d = np.diag(C)
    weak = [i for i in range(6) if d[i] < 10.0 * e_void]
    if weak:
        names = ["C11", "C22", "C33", "C44", "C55", "C66"]
        raise SingularSystem("structure is not load-bearing: " + ", ".join(
            f"{names[i]}={d[i]:.3g}" for i in weak), entries=[names[i] for i in weak])
