import numpy as np
import pytest

from metagen.discretize import grid_from_array
from metagen.errors import IllConditioned, PreconditionError, SingularSystem
from metagen.homogenize import (BASE, E_VOID, PropertyVector, element_stiffness, extract_properties,
                                homogenize, isotropic_stiffness, round_2sf, round_props, vrh)

from oracles import backus, iso_closed_form, iso_tensor, laminate_grid


def test_isotropic_stiffness_closed_form():
    D = isotropic_stiffness(1.0, 0.45)
    c11, c12, c44 = iso_closed_form(1.0, 0.45)
    assert D[0, 0] == pytest.approx(c11) and D[0, 1] == pytest.approx(c12)
    assert D[3, 3] == pytest.approx(c44)


def test_element_stiffness_rigid_modes():
    Ke = element_stiffness(BASE.stiffness(), 0.25)
    assert np.allclose(Ke, Ke.T)
    w = np.linalg.eigvalsh(Ke)
    assert np.sum(np.abs(w) < 1e-10 * w.max()) == 6
    assert w.min() > -1e-10 * w.max()
    # translations carry no force
    for k in range(3):
        u = np.zeros(24)
        u[k::3] = 1.0
        assert np.abs(Ke @ u).max() < 1e-12


def test_solid_cube_is_base_material():
    C = homogenize(np.ones((8, 8, 8), bool))
    assert np.allclose(C, iso_tensor(1.0, 0.45), rtol=1e-6, atol=1e-9)
    p = extract_properties(C, 1.0)
    assert p.E == pytest.approx(1.0, rel=1e-6) and p.nu == pytest.approx(0.45, rel=1e-6)
    assert abs(p.A) < 1e-6


@pytest.fixture(scope="module")
def laminate():
    return homogenize(laminate_grid(16), check_singular=False)


def test_laminate_matches_exact_layered_tensor(laminate):
    ref = backus([(1.0, 0.45), (E_VOID, 0.45)], [0.5, 0.5])
    for i, j in [(0, 0), (1, 1), (0, 1), (2, 2), (5, 5), (3, 3), (4, 4)]:
        assert laminate[i, j] == pytest.approx(ref[i, j], rel=0.05), (i, j)


def test_laminate_is_transversely_isotropic(laminate):
    assert laminate[0, 0] == pytest.approx(laminate[1, 1], rel=1e-8)
    assert laminate[3, 3] == pytest.approx(laminate[4, 4], rel=1e-8)


def test_singular_detector_flags_laminate():
    with pytest.raises(SingularSystem):
        homogenize(laminate_grid(8))


def test_empty_grid_rejected():
    with pytest.raises(PreconditionError):
        homogenize(np.zeros((4, 4, 4), bool))
    with pytest.raises(PreconditionError):
        homogenize(np.ones((4, 4, 3), bool))


def test_rods_are_orthotropic_and_bounded():
    occ = np.zeros((12, 12, 12), bool)
    occ[4:8, 4:8, :] = True
    occ[4:8, :, 4:8] = True
    occ[:, 4:8, 4:8] = True
    C = homogenize(grid_from_array(occ))
    p = extract_properties(C, occ.mean())
    assert p.E1 == pytest.approx(p.E2, rel=1e-6) == pytest.approx(p.E3, rel=1e-6)
    m = vrh(C)
    assert m["KR"] <= m["KV"] + 1e-12 and m["GR"] <= m["GV"] + 1e-12
    assert 0 < p.E < 1 and p.A > 0
    assert np.all(np.linalg.eigvalsh(C) > 0)


def test_vrh_isotropic():
    E, nu = 2.0, 0.3
    m = vrh(iso_tensor(E, nu))
    assert m["KV"] == pytest.approx(E / (3 * (1 - 2 * nu)))
    assert m["KR"] == pytest.approx(m["KV"])
    assert m["GV"] == pytest.approx(E / (2 * (1 + nu)))
    assert m["GR"] == pytest.approx(m["GV"])


def test_poisson_convention():
    # stiff along x only: loading along x contracts y/z per nu_12 = -S21/S11
    C = iso_tensor(1.0, 0.3)
    p = extract_properties(C, 0.5)
    assert p.nu12 == pytest.approx(0.3) and p.nu31 == pytest.approx(0.3)
    S = np.linalg.inv(C)
    assert p.E1 == pytest.approx(1 / S[0, 0])


def test_ill_conditioned():
    with pytest.raises(IllConditioned):
        extract_properties(np.diag([1, 1, 1, 1, 1, 1e-14]), 0.5)
    with pytest.raises(IllConditioned):
        extract_properties(np.full((6, 6), np.nan), 0.5)


def test_property_vector_roundtrip():
    p = extract_properties(iso_tensor(1.0, 0.3), 0.25)
    d = p.to_dict()
    assert len(d) == 18 and d["E_1"] == p.E1
    assert PropertyVector.from_dict(d) == p


@pytest.mark.parametrize("x,expected", [(0.995, 1.0), (0.0175, 0.018), (-0.125, -0.13),
                                        (123.4, 120.0), (0.0, 0.0), (1e-9, 1e-9)])
def test_round_2sf(x, expected):
    assert round_2sf(x) == expected


def test_round_props():
    assert round_props({"E": 0.01234, "nu": -0.2678}) == {"E": 0.012, "nu": -0.27}


def test_scaling_homogeneity():
    C = iso_tensor(1.0, 0.45)
    p, q = extract_properties(C, 1.0), extract_properties(0.5 * C, 1.0)
    for k in ("E", "G", "K"):
        assert getattr(q, k) == pytest.approx(0.5 * getattr(p, k))
    assert q.nu == pytest.approx(p.nu) and q.A == pytest.approx(p.A, abs=1e-12)


def test_cubic_anisotropy_closed_form():
    c11, c12, c44 = 1.0, 0.3, 0.2
    C = np.zeros((6, 6))
    C[:3, :3] = c12
    np.fill_diagonal(C[:3, :3], c11)
    C[3:, 3:] = np.eye(3) * c44
    d = c11 - c12
    GV = (d + 3 * c44) / 5
    GR = 5 * d * c44 / (4 * c44 + 3 * d)
    assert extract_properties(C, 0.5).A == pytest.approx(5 * GV / GR - 5, rel=1e-12)


def test_axis_permutation_permutes_moduli():
    occ = np.zeros((10, 10, 10), bool)
    occ[3:7, 3:7, :] = True
    occ[:, 2:6, 4:8] = True
    occ[1:4, :, 1:9] = True
    base = extract_properties(homogenize(occ), occ.mean())
    perm = (2, 0, 1)  # new axis i is old axis perm[i]
    p = extract_properties(homogenize(np.transpose(occ, perm)), occ.mean())
    E = [base.E1, base.E2, base.E3]
    assert [p.E1, p.E2, p.E3] == pytest.approx([E[i] for i in perm], rel=1e-4)
    G = {frozenset((1, 2)): base.G23, frozenset((0, 2)): base.G13, frozenset((0, 1)): base.G12}
    new = [p.G23, p.G13, p.G12]
    for val, (i, j) in zip(new, ((1, 2), (0, 2), (0, 1))):
        assert val == pytest.approx(G[frozenset((perm[i], perm[j]))], rel=1e-4)
