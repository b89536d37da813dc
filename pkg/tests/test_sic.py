import numpy as np
import pytest

from qdesign.sic import (
    Fiducial,
    InvalidCandidate,
    SearchConfig,
    SicCandidate,
    default_threshold,
    frame_potential,
    search_fiducial,
    sic_dim2_exact,
    tetrahedron_bloch,
    verify_sic,
    wh_displacements,
    wh_orbit,
)

PAULI = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]),
         np.array([[1, 0], [0, -1]])]


def equal_up_to_phase(a, b):
    # unitaries of size n agree up to phase iff |Tr(a^dag b)| = n
    return abs(abs(np.trace(a.conj().T @ b)) - len(a)) < 1e-12


def test_qubit_displacements_are_paulis():
    D = wh_displacements(2)
    assert np.allclose(D[0], np.eye(2))
    for P in PAULI[1:]:
        assert sum(equal_up_to_phase(d, P) for d in D[1:]) == 1


def test_displacements_unitary():
    D = wh_displacements(5)
    assert np.allclose(D[0], np.eye(5))
    for d in D:
        assert np.abs(d.conj().T @ d - np.eye(5)).max() < 1e-12


def test_shift_convention():
    D = wh_displacements(3)
    X = D[1 * 3 + 0]
    assert np.allclose(X @ np.eye(3)[0], np.eye(3)[1])


def test_orbit_of_tetrahedron_pole():
    f = sic_dim2_exact().vectors[0]
    c = wh_orbit(f)
    assert verify_sic(c, 1e-12).passed
    assert np.allclose(c.vectors[0], f)


def test_qutrit_fiducial_orbit():
    c = wh_orbit(np.array([0, 1, -1]) / np.sqrt(2))
    G = c.overlaps()
    off = ~np.eye(9, dtype=bool)
    assert np.allclose(G[off], 0.25, atol=1e-14)


def test_frame_potential_examples():
    assert frame_potential(sic_dim2_exact()) < 1e-12
    # orbit of |0>: two pairs of coincident vectors, the rest orthogonal
    c = wh_orbit(np.array([1.0, 0.0]))
    assert frame_potential(c) == pytest.approx(2 * (2 / 3) ** 2 + 4 * (1 / 3) ** 2)
    N = 3
    same = SicCandidate(N, np.tile(np.array([1, 0, 0], dtype=complex), (9, 1)))
    assert frame_potential(same) == pytest.approx(N**2 * (N**2 - 1) / 2 * (1 - 1 / (N + 1)) ** 2)


def test_frame_potential_invariances():
    rng = np.random.default_rng(3)
    f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    c = wh_orbit(f)
    U, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    phases = np.exp(2j * np.pi * rng.random(16))
    for v in (c.vectors @ U.T, c.vectors * phases[:, None]):
        assert frame_potential(SicCandidate(4, v)) == pytest.approx(frame_potential(c), rel=1e-10)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_overlaps_depend_only_on_displacement_difference(N):
    rng = np.random.default_rng(N)
    f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    c = wh_orbit(f)
    G = c.overlaps()
    base = G[0]
    for a in range(N * N):
        for b in range(N * N):
            ja, ka = divmod(a, N)
            jb, kb = divmod(b, N)
            d = ((jb - ja) % N) * N + (kb - ka) % N
            assert G[a, b] == pytest.approx(base[d], abs=1e-12)


def test_tetrahedron():
    n = tetrahedron_bloch()
    off = ~np.eye(4, dtype=bool)
    assert np.allclose((n @ n.T)[off], -1 / 3)
    c = sic_dim2_exact()
    assert np.allclose(c.projectors().sum(axis=0) / 2, np.eye(2), atol=1e-15)
    rep = verify_sic(c, 1e-12)
    assert rep.passed and rep.gram_rank == 4
    assert np.allclose(c.overlaps()[off], 1 / 3)


def test_repeated_projectors_not_informationally_complete():
    v = np.repeat(np.eye(3, dtype=complex), 3, axis=0)
    rep = verify_sic(SicCandidate(3, v))
    assert rep.gram_rank < 9 and not rep.informationally_complete and not rep.passed


def test_candidate_validation():
    with pytest.raises(InvalidCandidate):
        SicCandidate(2, np.ones((4, 2)))
    with pytest.raises(InvalidCandidate):
        SicCandidate(2, np.eye(2))


def test_json_round_trip():
    c = sic_dim2_exact()
    back = SicCandidate.from_json(c.to_json())
    assert np.array_equal(back.vectors, c.vectors)


def test_thresholds():
    assert default_threshold(5) == 1e-10 and default_threshold(6) == 1e-8


@pytest.mark.parametrize("N,restarts", [(2, 20), (3, 50)])
def test_search_small(N, restarts):
    fid = search_fiducial(N, SearchConfig(restarts=restarts, seed=1))
    assert fid.residual < 1e-10
    assert verify_sic(fid.orbit(), 1e-8).passed


def test_search_dim4_round_trip():
    fid = search_fiducial(4, SearchConfig(seed=7))
    rep = verify_sic(fid.orbit(), 1e-8)
    assert rep.passed and rep.gram_rank == 16


def test_search_dim7():
    fid = search_fiducial(7, SearchConfig(restarts=200, seed=0))
    assert fid.residual < 1e-8
    assert verify_sic(fid.orbit(), 1e-8).passed


def test_search_reproducible_and_independent_of_jobs():
    cfg = SearchConfig(restarts=6, seed=11, early_stop=False)
    a = search_fiducial(3, cfg)
    b = search_fiducial(3, cfg)
    c = search_fiducial(3, SearchConfig(restarts=6, seed=11, early_stop=False, jobs=2))
    assert np.array_equal(a.vector, b.vector) and np.array_equal(a.vector, c.vector)
    assert a.restart == c.restart and a.residual == c.residual


def test_early_stop_takes_first_success():
    late = search_fiducial(5, SearchConfig(restarts=4, seed=2, early_stop=False))
    early = search_fiducial(5, SearchConfig(restarts=4, seed=2))
    assert early.residual < default_threshold(5)
    assert early.restart <= late.restart or late.residual < default_threshold(5)


def test_fiducial_vector_is_phase_normalized():
    fid = search_fiducial(3, SearchConfig(seed=4))
    k = np.argmax(np.abs(fid.vector) > 1e-12)
    assert abs(fid.vector[k].imag) < 1e-15 and fid.vector[k].real > 0
    assert isinstance(fid, Fiducial) and fid.seed == 4
