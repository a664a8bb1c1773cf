"""Independent closed-form references used by several test modules."""
import numpy as np


def lame(E, nu):
    return E * nu / ((1 + nu) * (1 - 2 * nu)), E / (2 * (1 + nu))


def iso_closed_form(E, nu):
    """(C11, C12, C44) of an isotropic solid."""
    lam, mu = lame(E, nu)
    return lam + 2 * mu, lam, mu


def iso_tensor(E, nu):
    c11, c12, c44 = iso_closed_form(E, nu)
    C = np.full((3, 3), c12)
    np.fill_diagonal(C, c11)
    out = np.zeros((6, 6))
    out[:3, :3] = C
    out[3:, 3:] = np.eye(3) * c44
    return out


def backus(phases, fractions):
    """Exact effective tensor of a z-stacked laminate of isotropic phases.

    Layer-wise: in-plane strains and normal/shear tractions on z planes are
    continuous, which gives series averages for the stacking-direction terms
    and parallel averages of the z-relaxed in-plane stiffness.
    """
    f = np.asarray(fractions, float)
    Cs = [iso_tensor(E, nu) for E, nu in phases]
    avg = lambda g: sum(fi * g(C) for fi, C in zip(f, Cs))
    c33 = 1 / avg(lambda C: 1 / C[2, 2])
    r13 = avg(lambda C: C[0, 2] / C[2, 2])
    c44 = 1 / avg(lambda C: 1 / C[3, 3])
    c66 = avg(lambda C: C[5, 5])
    c11 = avg(lambda C: C[0, 0] - C[0, 2] ** 2 / C[2, 2]) + r13 ** 2 * c33
    c12 = avg(lambda C: C[0, 1] - C[0, 2] ** 2 / C[2, 2]) + r13 ** 2 * c33
    out = np.zeros((6, 6))
    out[0, 0] = out[1, 1] = c11
    out[0, 1] = out[1, 0] = c12
    out[0, 2] = out[2, 0] = out[1, 2] = out[2, 1] = r13 * c33
    out[2, 2] = c33
    out[3, 3] = out[4, 4] = c44
    out[5, 5] = c66
    return out


def laminate_grid(R):
    occ = np.zeros((R, R, R), bool)
    occ[:, :, : R // 2] = True
    return occ
