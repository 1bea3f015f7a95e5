import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cuntzkrieger.ck_algebra import core_norm, equals, expand_to_level, p, unit
from cuntzkrieger.cocycle_rokhlin import (
    CocycleChain,
    _LevelGeometry,
    block_model,
    build_averaged_unitary,
    chain_identities,
    closed_form_chain,
    cocycle_chain,
    innerness_defect,
    path_lipschitz_ratio,
    scalar_model,
    unitary_path,
    witness_search,
)
from cuntzkrieger.cyclotomic import RootScalar
from cuntzkrieger.errors import IdentityFailed, ModelInvariantViolated, NotFiniteOrder, NotUnitary
from cuntzkrieger.literals import format_element
from cuntzkrieger.quasifree import ActionSpec, commutant_blocks, diagonal_unitary, random_qf_unitary, verify_action
from cuntzkrieger.shift_dilation import phi


def test_chain_frozen(fib):
    u = diagonal_unitary(fib, [RootScalar.root(1, 3), RootScalar.rational(1)])
    chain = cocycle_chain(u, 3)
    # u_2 = sum over W^2 of eta_mu s_mu s_mu^*
    assert format_element(chain.entries[2], 3) == "(-1 - z)*11.11* + z*12.12* + z*2.2*"
    assert equals(chain.entries[1], u)
    assert equals(chain.entries[0], unit(fib))


@pytest.mark.parametrize(
    "rows,orders,exps",
    [([[1, 1], [1, 0]], [2], [[0, 1]]), ([[1, 1], [1, 1]], [3], [[1, 1]]), ([[1, 1], [1, 1]], [4], [[1, 3]])],
)
def test_chain_identities(rows, orders, exps):
    from cuntzkrieger.matrix_graph import validate

    A = validate(rows)
    act = verify_action(A, ActionSpec.from_exponents(orders, exps))
    chain = cocycle_chain(act.unitaries[0], 4)
    report = chain_identities(chain, orders[0])
    assert report == {k: True for k in ("order", "cocycle", "commutation", "intertwining", "closed_form")}


def test_chain_identities_nondiagonal(full2):
    # a finite-order non-diagonal unitary: the swap s1.2* + s2.1*
    from cuntzkrieger.ck_algebra import word

    u = word(full2, (1,), (2,)) + word(full2, (2,), (1,))
    chain = cocycle_chain(u, 3)
    report = chain_identities(chain, 2)
    assert all(report.values()) and "closed_form" not in report


def test_identity_failure_is_reported(fib):
    u = diagonal_unitary(fib, [RootScalar.rational(1), RootScalar.rational(-1)])
    chain = cocycle_chain(u, 2)
    broken = CocycleChain(u, [chain.entries[0], chain.entries[1], chain.entries[1]])
    with pytest.raises(IdentityFailed):
        chain_identities(broken, 2)
    report = chain_identities(broken, 2, raise_on_failure=False)
    assert not report["cocycle"]


def test_closed_form_requires_diagonal(full2):
    from cuntzkrieger.ck_algebra import word

    with pytest.raises(ValueError):
        closed_form_chain(word(full2, (1,), (2,)) + word(full2, (2,), (1,)), 1)


def test_exact_path(fib):
    u = diagonal_unitary(fib, [RootScalar.root(1, 3), RootScalar.rational(-1)])
    assert equals(unitary_path(u, 0, 6), u)
    assert equals(unitary_path(u, 1, 6), unit(fib))
    # eigenvalue zeta_3 = exp(2 pi i / 3) has H = 1/3, eigenvalue -1 has H = 1/2
    half = unitary_path(u, Fraction(1, 2), 6)
    expected = diagonal_unitary(fib, [RootScalar.root(1, 6), RootScalar.root(1, 4)])
    assert equals(half, expected)
    with pytest.raises(NotFiniteOrder):
        unitary_path(u, 0, 4)


def test_exact_and_numeric_paths_agree(full2):
    rng = random.Random(3)
    w = random_qf_unitary(full2, rng).element
    d = diagonal_unitary(full2, [RootScalar.root(1, 5), RootScalar.root(3, 5)])
    u = w * d * w.adjoint()
    U = commutant_blocks(u)[(1, 2)]
    for t in (Fraction(0), Fraction(1, 3), Fraction(3, 4)):
        Z = commutant_blocks(unitary_path(u, t, 5))[(1, 2)]
        assert np.allclose(Z, unitary_path(U, float(t), 5), atol=1e-12)


def test_path_lipschitz():
    model = block_model(4, 5, seed=1)
    assert path_lipschitz_ratio(model.u, 5, grid=40) <= 2 * math.pi + 1e-9


def test_scalar_model_frozen():
    rep = build_averaged_unitary(scalar_model(10, 2))
    assert rep.defect == pytest.approx(2 * math.sin(math.pi / 20), abs=1e-9)
    shifted = build_averaged_unitary(scalar_model(10, 2), sampling="shifted")
    assert shifted.defect == pytest.approx(2 * math.sin(math.pi / 22), abs=1e-9)
    assert rep.passed and shifted.passed


@pytest.mark.parametrize("r", [3, 5, 10, 20])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_averaging_bound(r, n):
    for model in (scalar_model(r, n), block_model(r, n, seed=r * 10 + n)):
        for sampling in ("uniform", "shifted"):
            rep = build_averaged_unitary(model, sampling)
            assert rep.defect <= 2 * math.pi / r + 1e-12


def test_z_alpha_z_against_direct_formula():
    model = scalar_model(3, 2)
    rep = build_averaged_unitary(model)
    # scalar order-2 model: u = -1 everywhere; z alpha(z)^* is a phase per point
    diff = rep.z * np.conj(model.alpha(rep.z)) - model.u
    assert np.max(np.abs(diff)) == pytest.approx(rep.defect)


def test_model_invariants():
    model = scalar_model(4, 3)
    model.validate()
    bad = scalar_model(4, 3)
    bad.perm = bad.perm[::-1].copy()
    with pytest.raises(ModelInvariantViolated):
        bad.validate()
    wrong_order = scalar_model(4, 3)
    wrong_order.order = 2
    with pytest.raises(ModelInvariantViolated):
        wrong_order.validate()


def test_innerness_defect(fib):
    act = verify_action(fib, ActionSpec.from_exponents([2], [[0, 1]]))
    u = act.unitaries[0]
    rep = innerness_defect(unit(fib), u)
    assert rep.ad_matches_lambda
    assert rep.defect == pytest.approx(2.0)
    w = diagonal_unitary(fib, [RootScalar.rational(1), RootScalar.rational(-1)])
    rep = innerness_defect(w, u)
    assert rep.ad_matches_lambda
    assert rep.defect == pytest.approx(core_norm(u.element - w * phi(w).adjoint()))
    with pytest.raises(NotUnitary):
        innerness_defect(p(fib, 1), u)


def test_witness_evaluator_matches_exact_defect(full2):
    act = verify_action(full2, ActionSpec.from_exponents([2], [[1, 1]]))
    u = act.unitaries[0].element
    rng = random.Random(8)
    for _ in range(3):
        w = random_qf_unitary(full2, rng).element
        geo = _LevelGeometry(act, 2, u)
        index = {word: k for k, word in enumerate(geo.words)}
        W = np.zeros((len(geo.words), len(geo.words)), dtype=complex)
        for (m, v), c in expand_to_level(w, 2).terms.items():
            W[index[m], index[v]] = complex(c)
        assert geo.defect(W) == pytest.approx(innerness_defect(w, u).defect, abs=1e-9)


def test_witness_trace_monotone(fib):
    act = verify_action(fib, ActionSpec.from_exponents([2], [[0, 1]]))
    trace = witness_search(act, 0, 4, eps=0.1, budget=300, seed=0)
    d = trace.defects
    assert d[0] == 2.0
    assert all(b <= a for a, b in zip(d, d[1:]))
    again = witness_search(act, 0, 4, eps=0.1, budget=300, seed=0)
    assert again.defects == d
