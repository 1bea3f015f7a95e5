import random

import numpy as np
import pytest

from cuntzkrieger.ck_algebra import equals, p, s, unit, unit_classes, word
from cuntzkrieger.cyclotomic import RootScalar
from cuntzkrieger.errors import DimensionMismatch, NotAnEndomorphism, NotFiniteOrder, NotUnitary, OrderViolation
from cuntzkrieger.matrix_graph import validate
from cuntzkrieger.numeric_oracle import TruncatedRep, oracle_check, represent
from cuntzkrieger.quasifree import (
    ActionSpec,
    EndoSpec,
    QFUnitary,
    commutant_blocks,
    convolution_unitary,
    diagonal_unitary,
    diagonalize_commuting_family,
    element_from_blocks,
    endo_of_unitary,
    fixed_point_core_basis,
    identity_endo,
    is_diagonal_quasi_free,
    is_unitary,
    lambda_apply,
    random_qf_unitary,
    spectral_projections,
    unitary_of_endo,
    verify_action,
    verify_endo,
)

from conftest import FULL3, MIXED3


@pytest.mark.parametrize("rows", [[[1, 1], [1, 0]], [[1, 1], [1, 1]], MIXED3, FULL3])
def test_roundtrip_and_homomorphism(rows):
    A = validate(rows)
    rng = random.Random(7)
    for _ in range(8):
        u = random_qf_unitary(A, rng)
        w = random_qf_unitary(A, rng)
        assert QFUnitary.checked(u.element)
        sigma = endo_of_unitary(u)
        verify_endo(sigma)
        assert equals(unitary_of_endo(sigma).element, u.element)
        uw = u.element * w.element
        for i in range(1, A.n + 1):
            assert equals(lambda_apply(u, lambda_apply(w, s(A, i))), lambda_apply(uw, s(A, i)))
        conv = convolution_unitary(sigma, endo_of_unitary(w))
        assert equals(conv.element, lambda_apply(u, w.element) * u.element)


def test_lambda_against_path_space(full2):
    u = random_qf_unitary(full2, random.Random(1))
    rep = TruncatedRep(full2, 10)
    U = represent(u.element, 10, rep)
    for i in (1, 2):
        img = lambda_apply(u, s(full2, i))
        diff = (represent(img, 10, rep) - U @ rep.shifts[i]).tocsr()
        idx = rep.interior(2)
        sub = diff[idx][:, idx]
        assert sub.nnz == 0 or np.max(np.abs(sub.data)) < 1e-9


def test_not_endomorphisms(fib):
    with pytest.raises(NotAnEndomorphism):
        verify_endo(EndoSpec([s(fib, 2), s(fib, 1)]))
    with pytest.raises(NotAnEndomorphism):
        verify_endo(EndoSpec([s(fib, 1), s(fib, 1)]))
    verify_endo(identity_endo(fib))
    with pytest.raises(NotUnitary):
        QFUnitary.checked(p(fib, 1))


def test_diagonal_quasi_free(fib):
    u = diagonal_unitary(fib, [RootScalar.root(1, 4), RootScalar.rational(-1)])
    assert is_diagonal_quasi_free(endo_of_unitary(u))
    # lambda_u on words: eta_mu conj(eta_nu)
    x = word(fib, (1, 1), (2,))
    assert equals(lambda_apply(u, x), x.scale(RootScalar.root(2, 4) * RootScalar.rational(-1)))


def test_actions_frozen(fib):
    act = verify_action(fib, ActionSpec.from_exponents([2], [[0, 1]]))
    assert equals(act.unitaries[0].element, p(fib, 1) - p(fib, 2))
    assert len(fixed_point_core_basis(act, 2)) == 5
    assert len(fixed_point_core_basis(act, 2, commutant=True)) == 3
    with pytest.raises(OrderViolation):
        verify_action(fib, ActionSpec.from_exponents([2], [["1/3", 0]]))
    with pytest.raises(DimensionMismatch):
        verify_action(fib, ActionSpec.from_exponents([2], [[0, 1, 1]]))
    both = verify_action(fib, ActionSpec.from_exponents([2, 3], [[1, 0], [1, 2]]))
    assert both.spec.field_order == 6


def test_spectral_projections(full2):
    rng = random.Random(4)
    w = random_qf_unitary(full2, rng).element
    d = diagonal_unitary(full2, [RootScalar.root(3, 8), RootScalar.root(6, 8)])
    u = w * d * w.adjoint()
    projs = spectral_projections(u, 8)
    assert sorted(projs) == [3, 6]
    assert equals(sum(projs.values(), unit(full2).scale(0)), unit(full2))
    recon = sum((P.scale(RootScalar.root(a, 8)) for a, P in projs.items()), unit(full2).scale(0))
    assert equals(recon, u)
    for P in projs.values():
        assert equals(P * P, P)
    with pytest.raises(NotFiniteOrder):
        spectral_projections(diagonal_unitary(full2, [RootScalar.root(1, 3), RootScalar.root(0, 1)]), 2)


def test_diagonalization_recovers_conjugator(full3):
    rng = random.Random(11)
    w = random_qf_unitary(full3, rng).element
    ds = [diagonal_unitary(full3, [RootScalar.root(rng.randrange(6), 6) for _ in range(3)]) for _ in range(2)]
    family = [w * d * w.adjoint() for d in ds]
    res = diagonalize_commuting_family(family, 6)
    assert res.off_diagonal_mass < 1e-10
    for u in family:
        for c, mat in commutant_blocks(u).items():
            W = res.blocks[c]
            assert np.allclose(W @ W.conj().T, np.eye(len(c)))


def test_element_from_blocks_is_unitary(mixed3):
    from cuntzkrieger.quasifree import random_block_unitary

    rng = random.Random(2)
    # letters 1 and 2 share a column but not a row: no 2 x 2 unit block
    assert unit_classes(mixed3) == [[1], [2], [3]]
    good = {(1,): random_block_unitary(1, rng), (2,): random_block_unitary(1, rng), (3,): random_block_unitary(1, rng)}
    assert is_unitary(element_from_blocks(mixed3, good))
    bad = {(1, 2): random_block_unitary(2, rng), (3,): random_block_unitary(1, rng)}
    assert not is_unitary(element_from_blocks(mixed3, bad))
