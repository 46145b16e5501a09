import random
from dataclasses import replace
from fractions import Fraction

import pytest

from jcdecomp import (
    QQ,
    AnnihilatorError,
    Decomposition,
    FieldMismatchError,
    DimensionMismatchError,
    IterationMode,
    Mat,
    NonConvergenceError,
    Poly,
    PrimeField,
    SidecarParseError,
    SquareFreeCert,
    block_diag,
    companion,
    compose_mod,
    divides,
    eval_poly,
    is_squarefree,
    iteration_trace,
    jordan_block,
    jordan_chevalley,
    minimal_polynomial,
    random_matrix,
    read_decomposition,
    squarefree_from_roots,
    squarefree_part,
    verify,
    write_decomposition,
)
from jcdecomp.chevalley import _eval_many_mod

F2 = PrimeField(2)
F5 = PrimeField(5)

# J_2(0) + J_2(1): the smallest matrix where the iteration actually moves
A44 = Mat(QQ, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]])


# ---------------------------------------------------------------------------
# worked examples


def test_nilpotent_plus_diagonalizable_4x4():
    dec = jordan_chevalley(A44)
    assert dec.D == Mat.diag(QQ, [0, 0, 1, 1])
    assert dec.N == A44 - dec.D
    assert dec.k_used == 1 and dec.k0 == 1
    assert dec.cert.g == Poly(QQ, [0, -1, 1])
    assert dec.cert.m == 2
    assert dec.cert.gtilde == Poly(QQ, [-1, 2])
    assert dec.cert.gtilde_prime == Poly(QQ, [-4])
    assert dec.f_used == minimal_polynomial(A44)
    assert dec.p_D == Poly(QQ, [0, 0, 3, -2])
    assert verify(A44, dec).passed()


def test_semisimple_without_eigenvalues_in_the_field():
    # X^2 + 1 has no rational roots, yet D = A is certified semisimple
    A = Mat(QQ, [[0, -1], [1, 0]])
    dec = jordan_chevalley(A)
    assert dec.D == A and dec.N.is_zero()
    assert dec.k_used == 0
    assert dec.cert.g == Poly(QQ, [1, 0, 1]) and dec.cert.m == 1
    assert dec.p_D == Poly.x(QQ)
    assert verify(A, dec).passed()


def test_pure_jordan_block():
    A = jordan_block(QQ, 5, 0)
    dec = jordan_chevalley(A, f=Poly.monomial(QQ, 5))
    assert dec.D.is_zero() and dec.N == A
    assert dec.cert.g == Poly.x(QQ) and dec.cert.m == 5
    assert dec.k0 == 3 and dec.k_used <= 3
    assert verify(A, dec).passed()


def test_diagonal_with_repeats_is_its_own_semisimple_part():
    A = Mat.diag(F5, [2, 2, 3])
    dec = jordan_chevalley(A)
    assert dec.D == A and dec.N.is_zero() and dec.k_used == 0
    assert verify(A, dec).passed()


def test_one_by_one():
    A = Mat(PrimeField(7), [[5]])
    dec = jordan_chevalley(A)
    assert dec.D == A and dec.N.is_zero()
    assert dec.f_used == Poly(PrimeField(7), [-5, 1])
    assert dec.k0 == 0 and dec.k_used == 0
    assert verify(A, dec).passed()


def test_uniqueness_against_exhaustive_search():
    # the commuting semisimple/nilpotent splitting is unique; check that by
    # enumerating every candidate D over F_2 (all of n <= 2, a sample at n = 3)
    import itertools

    def all_mats(n):
        return [
            Mat(F2, [list(bits[i * n : (i + 1) * n]) for i in range(n)])
            for bits in itertools.product((0, 1), repeat=n * n)
        ]

    rng = random.Random(199)
    for n, inputs in ((1, None), (2, None), (3, 40)):
        candidates = all_mats(n)
        semisimple = [is_squarefree(minimal_polynomial(D)) for D in candidates]
        targets = candidates if inputs is None else rng.sample(candidates, inputs)
        for A in targets:
            dec = jordan_chevalley(A)
            valid = [
                D
                for D, ok in zip(candidates, semisimple)
                if ok and ((A - D) ** n).is_zero() and D @ (A - D) == (A - D) @ D
            ]
            assert valid == [dec.D]


def test_outputs_commute_and_sum():
    rng = random.Random(211)
    for field in (F2, F5, QQ):
        for _ in range(10):
            n = rng.randint(1, 8 if isinstance(field, PrimeField) else 5)
            A = random_matrix(field, n, rng)
            dec = jordan_chevalley(A)
            assert dec.D + dec.N == A
            assert dec.D @ dec.N == dec.N @ dec.D
            assert eval_poly(dec.cert.g, dec.D).is_zero()
            assert (dec.N ** min(dec.cert.m, A.n)).is_zero()


# ---------------------------------------------------------------------------
# the iteration itself


def test_trace_shape_and_residues():
    trace = iteration_trace(A44)
    assert [s.k for s in trace] == [0, 1]
    assert [s.g_is_zero for s in trace] == [False, True]
    # quotient mode carries residues, starting from X mod f
    f = minimal_polynomial(A44)
    assert trace[0].residue == Poly.x(QQ) % f
    assert trace[-1].residue == Poly(QQ, [0, 0, 3, -2])

    mtrace = iteration_trace(A44, mode=IterationMode.MATRIX)
    assert [s.k for s in mtrace] == [0, 1]
    assert all(s.residue is None for s in mtrace)


def test_trace_of_semisimple_has_single_step():
    trace = iteration_trace(Mat(QQ, [[0, -1], [1, 0]]))
    assert len(trace) == 1 and trace[0].g_is_zero


def test_iteration_doubles_the_guaranteed_exponent():
    # f = x^4 (x+1)^2 (x^2+x+1)^3 over F_2; after step k each factor q_i
    # must divide g(a_k) at least min(2^k, e_i) times
    x = Poly.x(F2)
    qs = [x, x + Poly.one(F2), Poly(F2, [1, 1, 1])]
    es = [4, 2, 3]
    f = Poly.one(F2)
    for q, e in zip(qs, es):
        f = f * q ** e
    A = companion(f)
    cert = squarefree_part(f)
    trace = iteration_trace(A, f=f)
    for step in trace:
        g_at = compose_mod(cert.g, step.residue, f)
        for q, e in zip(qs, es):
            want = q ** min(2 ** step.k, e)
            assert g_at.is_zero() or divides(want, g_at)
    assert trace[-1].g_is_zero


def test_modes_agree_exactly():
    rng = random.Random(223)
    for field in (F2, F5, QQ):
        for _ in range(8):
            n = rng.randint(1, 7 if isinstance(field, PrimeField) else 5)
            A = random_matrix(field, n, rng)
            dq = jordan_chevalley(A, mode=IterationMode.QUOTIENT)
            dm = jordan_chevalley(A, mode=IterationMode.MATRIX)
            assert dq.D == dm.D and dq.N == dm.N
            assert dq.k_used == dm.k_used and dq.k0 == dm.k0
            # matrix mode makes no p_D claim
            assert dm.p_D is None and dq.p_D is not None


def test_matrix_mode_on_worked_example():
    dec = jordan_chevalley(A44, mode=IterationMode.MATRIX)
    assert dec.D == Mat.diag(QQ, [0, 0, 1, 1])
    assert dec.p_D is None
    report = verify(A44, dec)
    assert report.passed() and report.polynomial_ok is None


# ---------------------------------------------------------------------------
# annihilator handling


def test_any_multiple_of_the_minimal_polynomial_works():
    mu = minimal_polynomial(A44)
    base = jordan_chevalley(A44)
    for extra in (Poly(QQ, [-3, 1]), Poly(QQ, [1, 0, 1]), mu):
        dec = jordan_chevalley(A44, f=mu * extra)
        assert dec.D == base.D and dec.N == base.N
        assert dec.f_used == (mu * extra).monic()


def test_non_annihilating_polynomial_rejected():
    with pytest.raises(AnnihilatorError):
        jordan_chevalley(A44, f=Poly(QQ, [-1, 1]))
    with pytest.raises(AnnihilatorError):
        jordan_chevalley(A44, f=Poly.constant(QQ, 2))


def test_annihilator_over_wrong_field_rejected():
    with pytest.raises(FieldMismatchError):
        jordan_chevalley(A44, f=Poly.x(F5))


def test_annihilator_is_normalized_to_monic():
    mu = minimal_polynomial(A44)
    dec = jordan_chevalley(A44, f=mu * Poly.constant(QQ, Fraction(2, 3)))
    assert dec.f_used == mu


def test_explicit_certificate_is_used():
    A = Mat.diag(F5, [0, 0, 1, 1])
    cert = squarefree_from_roots(F5, [(0, 1), (1, 1)])
    dec = jordan_chevalley(A, f=cert.g, cert=cert)
    assert dec.D == A and dec.N.is_zero()
    assert dec.cert is cert


def test_certificate_without_bezout_data_gets_completed():
    f = minimal_polynomial(A44)
    bare = SquareFreeCert(g=Poly(QQ, [0, -1, 1]), m=2)
    dec = jordan_chevalley(A44, f=f, cert=bare)
    assert dec.cert.gtilde is not None and dec.cert.gtilde_prime is not None
    assert dec.D == Mat.diag(QQ, [0, 0, 1, 1])


def test_inconsistent_certificate_fails_loudly():
    # claims m = 1 (so zero iterations are allowed) for a non-semisimple A
    bad = SquareFreeCert(g=Poly(QQ, [0, -1, 1]), m=1)
    with pytest.raises(NonConvergenceError):
        jordan_chevalley(A44, f=minimal_polynomial(A44), cert=bad)
    with pytest.raises(NonConvergenceError):
        jordan_chevalley(A44, f=minimal_polynomial(A44), cert=bad, mode=IterationMode.MATRIX)


# ---------------------------------------------------------------------------
# verification


def test_verify_catches_tampering():
    dec = jordan_chevalley(A44)

    bad_D = Mat(QQ, [[1 if (i, j) == (0, 0) else dec.D[i, j].raw for j in range(4)] for i in range(4)])
    r = verify(A44, replace(dec, D=bad_D))
    assert not r.passed() and not r.sum_ok

    # D' = A, N' = 0: sums fine, but A is not semisimple
    r = verify(A44, replace(dec, D=A44, N=Mat.zero(QQ, 4)))
    assert r.sum_ok and r.commute_ok and not r.semisimple_ok
    assert "g square-free and g(D) = 0" in r.failures()

    # swap in a non-square-free certificate polynomial
    bad_cert = SquareFreeCert(g=Poly(QQ, [0, 0, 1]), m=2)
    r = verify(A44, replace(dec, cert=bad_cert))
    assert not r.semisimple_ok

    # claim a too-small nilpotency exponent
    r = verify(A44, replace(dec, cert=SquareFreeCert(g=dec.cert.g, m=1)))
    assert not r.nilpotent_ok

    # tamper with the polynomial claim
    r = verify(A44, replace(dec, p_D=Poly.x(QQ)))
    assert not r.polynomial_ok
    assert r.failures() == ["p_D(A) = D"]


def test_verify_requires_matching_shapes():
    dec = jordan_chevalley(A44)
    with pytest.raises(DimensionMismatchError):
        verify(Mat.identity(QQ, 3), dec)
    with pytest.raises(FieldMismatchError):
        verify(Mat.identity(F5, 4), dec)


def test_verify_handles_zero_g_without_crashing():
    dec = jordan_chevalley(A44)
    r = verify(A44, replace(dec, cert=SquareFreeCert(g=Poly.zero(QQ), m=2)))
    assert not r.semisimple_ok


# ---------------------------------------------------------------------------
# the shared-table modular evaluator


def test_eval_many_mod_matches_compose_mod():
    rng = random.Random(229)
    for field in (QQ, F2, F5):
        for _ in range(60):
            deg_f = rng.randint(1, 10)
            f = Poly(field, [field.random_raw(rng) for _ in range(deg_f)] + [field.one()])
            b = Poly(field, [field.random_raw(rng) for _ in range(rng.randint(1, 10))])
            hs = [
                Poly(field, [field.random_raw(rng) for _ in range(rng.randint(1, 12))])
                for _ in range(rng.randint(1, 3))
            ]
            got = _eval_many_mod(hs, b, f)
            assert got == [compose_mod(h, b, f) for h in hs]
    assert _eval_many_mod([], Poly.x(QQ), Poly.monomial(QQ, 2)) == []


# ---------------------------------------------------------------------------
# serialization


def test_round_trip(tmp_path):
    dec = jordan_chevalley(A44)
    write_decomposition(dec, tmp_path)
    assert (tmp_path / "D.mat").exists()
    assert (tmp_path / "N.mat").exists()
    assert (tmp_path / "decomposition.txt").exists()

    back = read_decomposition(tmp_path)
    assert back.D == dec.D and back.N == dec.N
    assert back.cert.g == dec.cert.g and back.cert.m == dec.cert.m
    assert back.k_used == dec.k_used and back.k0 == dec.k0
    assert back.p_D == dec.p_D
    assert back.f_used is None
    assert verify(A44, back).passed()


def test_round_trip_without_p_d(tmp_path):
    dec = jordan_chevalley(A44, mode=IterationMode.MATRIX)
    write_decomposition(dec, tmp_path)
    sidecar = (tmp_path / "decomposition.txt").read_text()
    assert "p_D none" in sidecar
    back = read_decomposition(tmp_path)
    assert back.p_D is None
    report = verify(A44, back)
    assert report.passed() and report.polynomial_ok is None


def test_sidecar_format(tmp_path):
    write_decomposition(jordan_chevalley(A44), tmp_path)
    lines = (tmp_path / "decomposition.txt").read_text().splitlines()
    assert lines == [
        "g X^2 - X",
        "m 2",
        "k_used 1",
        "k0 1",
        "p_D -2*X^3 + 3*X^2",
    ]


def test_prime_field_round_trip(tmp_path):
    rng = random.Random(233)
    A = random_matrix(F5, 9, rng)
    dec = jordan_chevalley(A)
    write_decomposition(dec, tmp_path)
    back = read_decomposition(tmp_path)
    assert back.D == dec.D and back.N == dec.N
    assert verify(A, back).passed()


def test_sidecar_errors(tmp_path):
    dec = jordan_chevalley(A44)
    write_decomposition(dec, tmp_path)
    sidecar = tmp_path / "decomposition.txt"
    good = sidecar.read_text()

    sidecar.write_text("g X^2 - X\nm 2\n")
    with pytest.raises(SidecarParseError):
        read_decomposition(tmp_path)

    sidecar.write_text(good.replace("m 2", "m two"))
    with pytest.raises(SidecarParseError):
        read_decomposition(tmp_path)

    sidecar.write_text(good.replace("g X^2 - X", "g X^"))
    with pytest.raises(SidecarParseError):
        read_decomposition(tmp_path)


def test_tampered_files_fail_verification(tmp_path):
    dec = jordan_chevalley(A44)
    write_decomposition(dec, tmp_path)
    d_file = tmp_path / "D.mat"
    original = d_file.read_text()
    assert "0 0 0 1" in original
    d_file.write_text(original.replace("0 0 0 1", "0 0 0 2"))
    back = read_decomposition(tmp_path)
    report = verify(A44, back)
    assert not report.passed() and not report.sum_ok
