import numpy as np
import pytest

from positla.linalg import matrix as mx
from positla.linalg import routines as rt
from positla.posit import core

ONE, NAR = 0x40000000, 0x80000000
NEG_ONE = 0xC0000000


def P(a):
    return mx.to_posit(np.asfortranarray(np.asarray(a, dtype=np.float64)))


def F(p):
    return mx.posit_to_f64(p)


def rand_posit(rng, *shape):
    return P(rng.standard_normal(shape))


# scalar oracles built directly on the reference ops ---------------------------

def gemm_oracle(A, B, alpha, beta, C):
    m, k = A.shape
    out = C.copy()
    for i in range(m):
        for j in range(B.shape[1]):
            t = 0
            for kk in range(k):
                t = core.add(t, core.mul(int(A[i, kk]), int(B[kk, j])))
            out[i, j] = core.add(core.mul(alpha, t), core.mul(beta, int(C[i, j])))
    return out


def solve_oracle(M, B, lower, unit):
    """M X = B by substitution; per-element subtraction order follows k."""
    m = M.shape[0]
    X = B.copy()
    rows = range(m) if lower else range(m - 1, -1, -1)
    for j in range(B.shape[1]):
        for i in rows:
            ks = range(i) if lower else range(m - 1, i, -1)
            x = int(X[i, j])
            for k in ks:
                x = core.sub(x, core.mul(int(M[i, k]), int(X[k, j])))
            if not unit:
                x = core.div(x, int(M[i, i]))
            X[i, j] = x
    return X


class TestGemm:
    def test_identity(self):
        rng = np.random.default_rng(0)
        B = rand_posit(rng, 5, 4)
        C = np.zeros((5, 4), dtype=np.uint32, order="F")
        rt.rgemm("N", "N", ONE, P(np.eye(5)), B, 0, C)
        assert np.array_equal(C, B)

    def test_alpha_zero_beta_one(self):
        rng = np.random.default_rng(1)
        A, B, C = rand_posit(rng, 3, 4), rand_posit(rng, 4, 2), rand_posit(rng, 3, 2)
        C0 = C.copy()
        rt.rgemm("N", "N", 0, A, B, ONE, C)
        assert np.array_equal(C, C0)

    def test_small_integers(self):
        C = np.zeros((2, 2), dtype=np.uint32, order="F")
        rt.rgemm("N", "N", ONE, P([[1, 2], [3, 4]]), P([[5, 6], [7, 8]]), 0, C)
        assert np.array_equal(F(C), [[19, 22], [43, 50]])

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(2)
        A, B, C = rand_posit(rng, 4, 6), rand_posit(rng, 6, 3), rand_posit(rng, 4, 3)
        alpha, beta = core.from_f64(-1.5), core.from_f64(0.75)
        want = gemm_oracle(A, B, alpha, beta, C)
        rt.rgemm("N", "N", alpha, A, B, beta, C, 2)
        assert np.array_equal(C, want)

    @pytest.mark.parametrize("ta,tb", [("N", "N"), ("T", "N"), ("N", "T"), ("T", "T")])
    def test_transpose_coherence(self, ta, tb):
        rng = np.random.default_rng(3)
        A, B = rand_posit(rng, 7, 9), rand_posit(rng, 9, 5)
        ref = np.zeros((7, 5), dtype=np.uint32, order="F")
        rt.rgemm("N", "N", ONE, A, B, 0, ref)
        Aop = np.asfortranarray(A.T) if ta == "T" else A
        Bop = np.asfortranarray(B.T) if tb == "T" else B
        C = np.zeros((7, 5), dtype=np.uint32, order="F")
        rt.rgemm(ta, tb, ONE, Aop, Bop, 0, C)
        assert np.array_equal(C, ref)

    def test_block_and_thread_invariance(self):
        rng = np.random.default_rng(4)
        A, B, C0 = rand_posit(rng, 40, 33), rand_posit(rng, 33, 37), rand_posit(rng, 40, 37)
        outs = []
        for block, threads in [(1, 1), (8, 1), (32, 1), (64, 1), (8, 3)]:
            C = C0.copy(order="F")
            rt.rgemm("N", "N", NEG_ONE, A, B, ONE, C, block, threads)
            outs.append(C)
        naive = C0.copy(order="F")
        rt.posit_routines.gemm_naive("N", "N", NEG_ONE, A, B, ONE, naive)
        for C in outs:
            assert np.array_equal(C, naive)

    def test_nar_poisons_row_and_column(self):
        rng = np.random.default_rng(5)
        A, B = rand_posit(rng, 4, 3), rand_posit(rng, 3, 5)
        A[2, 1] = NAR
        B[0, 3] = NAR
        C = np.zeros((4, 5), dtype=np.uint32, order="F")
        rt.rgemm("N", "N", ONE, A, B, 0, C)
        bad = C == NAR
        expect = np.zeros((4, 5), dtype=bool)
        expect[2, :] = True
        expect[:, 3] = True
        assert np.array_equal(bad, expect)

    def test_alpha_zero_does_not_hide_nar(self):
        A = P([[1.0]])
        A[0, 0] = NAR
        C = P([[2.0]])
        rt.rgemm("N", "N", 0, A, P([[1.0]]), ONE, C)
        assert C[0, 0] == NAR

    def test_shape_errors(self):
        with pytest.raises(rt.DimensionError):
            rt.rgemm("N", "N", ONE, P(np.ones((2, 3))), P(np.ones((2, 2))), 0, P(np.ones((2, 2))))
        with pytest.raises(TypeError):
            rt.rgemm("N", "N", ONE, np.ones((2, 2)), P(np.ones((2, 2))), 0, P(np.ones((2, 2))))
        with pytest.raises(ValueError):
            rt.rgemm("X", "N", ONE, P(np.ones((2, 2))), P(np.ones((2, 2))), 0, P(np.ones((2, 2))))

    def test_binary32_identity(self):
        B = np.asfortranarray(np.arange(6, dtype=np.float32).reshape(2, 3))
        C = np.zeros((2, 3), dtype=np.float32, order="F")
        rt.sgemm("N", "N", 1.0, np.eye(2, dtype=np.float32, order="F"), B, 0.0, C)
        assert np.array_equal(C, B)


class TestTrsm:
    def test_identity_scales(self):
        B = P([[1.0, 2.0], [3.0, 4.0]])
        rt.rtrsm("L", "L", "N", "N", core.from_f64(2.0), P(np.eye(2)), B)
        assert np.array_equal(F(B), [[2, 4], [6, 8]])

    def test_diagonal(self):
        B = P([[2.0], [4.0]])
        rt.rtrsm("L", "L", "N", "N", ONE, P(np.diag([2.0, 4.0])), B)
        assert np.array_equal(F(B), [[1], [1]])

    @pytest.mark.parametrize("side", "LR")
    @pytest.mark.parametrize("uplo", "LU")
    @pytest.mark.parametrize("trans", "NT")
    @pytest.mark.parametrize("diag", "UN")
    def test_against_substitution(self, side, uplo, trans, diag):
        rng = np.random.default_rng([ord(c) for c in side + uplo + trans + diag])
        T = rng.standard_normal((8, 8)) + 4 * np.eye(8)
        T = np.tril(T) if uplo == "L" else np.triu(T)
        A = P(T)
        # junk in the unused triangle must be ignored
        other = np.triu_indices(8, 1) if uplo == "L" else np.tril_indices(8, -1)
        A[other] = core.from_f64(99.0)
        B = rand_posit(rng, 8, 3) if side == "L" else rand_posit(rng, 3, 8)
        M = P(T.T if trans == "T" else T)
        lower = (uplo == "L") != (trans == "T")
        if side == "L":
            want = solve_oracle(M, B, lower, diag == "U")
        else:
            want = solve_oracle(np.asfortranarray(M.T), np.asfortranarray(B.T), not lower,
                                diag == "U").T
        got = B.copy(order="F")
        rt.rtrsm(side, uplo, trans, diag, ONE, A, got)
        assert np.array_equal(got, want)

    def test_zero_diagonal_reports_column(self):
        with pytest.raises(rt.SingularMatrixError) as err:
            rt.rtrsm("L", "L", "N", "N", ONE, P([[1.0, 0.0], [1.0, 0.0]]), P([[1.0], [1.0]]))
        assert err.value.column == 2


def residual_chol(A, L):
    L = np.tril(L)
    return np.linalg.norm(A - L @ L.T) / np.linalg.norm(A)


def residual_lu(A, LU, ipiv):
    n = A.shape[0]
    L = np.tril(LU, -1) + np.eye(n)
    U = np.triu(LU)
    PA = A.copy()
    for i, p in enumerate(ipiv):
        PA[[i, p - 1]] = PA[[p - 1, i]]
    return np.linalg.norm(PA - L @ U) / np.linalg.norm(A)


@pytest.fixture(scope="module")
def spd64():
    X = np.random.default_rng(7).standard_normal((64, 64))
    return np.asfortranarray(X.T @ X)


@pytest.fixture(scope="module")
def gen64():
    return np.asfortranarray(np.random.default_rng(8).standard_normal((64, 64)))


class TestPotrf:
    def test_identity(self):
        A = P(np.eye(4))
        assert rt.rpotrf(A) == 0
        assert np.array_equal(F(np.tril(A)), np.eye(4))

    def test_diag(self):
        A = P(np.diag([4.0, 9.0]))
        assert rt.rpotrf(A) == 0
        assert np.array_equal(F(A), np.diag([2.0, 3.0]))
        S = np.diag([4.0, 9.0]).astype(np.float32, order="F")
        assert rt.spotrf(S) == 0
        assert np.array_equal(S, np.diag([2.0, 3.0]))

    def test_residual(self, spd64):
        A = P(spd64)
        assert rt.rpotrf(A) == 0
        assert residual_chol(spd64, F(A)) < 10 * 2.0 ** -27
        S = mx.to_binary32(spd64)
        assert rt.spotrf(S) == 0
        assert residual_chol(spd64, S.astype(np.float64)) < 10 * 2.0 ** -23

    def test_block_invariance(self, spd64):
        outs = []
        for block in (1, 8, 32, 64):
            A = P(spd64)
            rt.rpotrf(A, block)
            outs.append(np.tril(A))
        assert all(np.array_equal(o, outs[0]) for o in outs)

    def test_not_positive_definite(self):
        assert rt.rpotrf(P(np.diag([1.0, -1.0, 1.0]))) == 2
        assert rt.spotrf(np.diag([1.0, 0.0]).astype(np.float32, order="F")) == 2

    def test_nar_input_rejected(self):
        A = P(np.eye(2))
        A[1, 0] = NAR
        with pytest.raises(rt.LinalgError):
            rt.rpotrf(A)

    def test_matches_binary32_when_exact(self):
        L = np.array([[2, 0, 0, 0], [1, 1, 0, 0], [3, -2, 4, 0], [0, 1, -1, 2]], dtype=np.float64)
        A = L @ L.T
        Pa, Sa = P(A), mx.to_binary32(A)
        assert rt.rpotrf(Pa, 2) == 0 and rt.spotrf(Sa, 2) == 0
        assert np.array_equal(F(np.tril(Pa)), np.tril(Sa).astype(np.float64))
        assert np.array_equal(np.tril(Sa), L)

    def test_solve(self):
        A = P(np.diag([4.0, 9.0]))
        rt.rpotrf(A)
        x = rt.rpotrs(A, P([[4.0], [9.0]]))
        assert np.array_equal(F(x), [[1.0], [1.0]])
        x = rt.rpotrs(P(np.eye(3)), P([[1.0], [-2.0], [5.0]]))
        assert np.array_equal(F(x), [[1.0], [-2.0], [5.0]])

    def test_solve_backward_error(self, spd64):
        xs = np.full((64, 1), 0.125)
        b = spd64 @ xs
        A = P(spd64)
        rt.rpotrf(A)
        x = F(rt.rpotrs(A, P(b)))
        assert np.linalg.norm(b - spd64 @ x) / np.linalg.norm(b) < 1e-6


class TestGetrf:
    def test_identity(self):
        A = P(np.eye(3))
        ipiv, info = rt.rgetrf(A)
        assert info == 0
        assert list(ipiv) == [1, 2, 3]
        assert np.array_equal(F(A), np.eye(3))

    def test_one_swap(self):
        A = P([[0.0, 1.0], [2.0, 3.0]])
        ipiv, info = rt.rgetrf(A)
        assert info == 0 and list(ipiv) == [2, 2]
        assert np.array_equal(F(np.triu(A)), [[2, 3], [0, 1]])
        assert F(A)[1, 0] == 0.0

    def test_residual(self, gen64):
        A = P(gen64)
        ipiv, info = rt.rgetrf(A)
        assert info == 0
        assert ipiv.min() >= 1 and ipiv.max() <= 64
        assert residual_lu(gen64, F(A), ipiv) < 10 * 2.0 ** -27
        S = mx.to_binary32(gen64)
        ipiv, info = rt.sgetrf(S)
        assert residual_lu(gen64, S.astype(np.float64), ipiv) < 10 * 2.0 ** -23

    def test_block_invariance(self, gen64):
        outs = []
        for block in (1, 8, 32, 64):
            A = P(gen64)
            ipiv, _ = rt.rgetrf(A, block)
            outs.append((A, ipiv))
        for A, ipiv in outs[1:]:
            assert np.array_equal(A, outs[0][0]) and np.array_equal(ipiv, outs[0][1])

    def test_zero_pivot_continues(self):
        A = P([[1.0, 2.0, 3.0], [2.0, 4.0, 1.0], [1.0, 2.0, 5.0]])
        ipiv, info = rt.rgetrf(A)
        assert info == 2
        assert len(ipiv) == 3

    def test_tie_breaks_to_first_row(self):
        A = P([[-2.0, 1.0], [2.0, 5.0]])
        ipiv, _ = rt.rgetrf(A)
        assert ipiv[0] == 1

    def test_solve(self, gen64):
        xs = np.full((64, 1), 0.125)
        b = gen64 @ xs
        A = P(gen64)
        ipiv, _ = rt.rgetrf(A)
        x = F(rt.rgetrs(A, ipiv, P(b)))
        assert np.linalg.norm(b - gen64 @ x) / np.linalg.norm(b) < 1e-6
        with pytest.raises(rt.DimensionError):
            rt.rgetrs(A, ipiv[:3], P(b))


class TestMatrixFiles:
    @pytest.mark.parametrize("kind", ["posit32", "f32", "f64"])
    def test_roundtrip(self, tmp_path, kind):
        D = np.random.default_rng(9).standard_normal((5, 3))
        a = {"posit32": P(D), "f32": mx.to_binary32(D), "f64": np.asfortranarray(D)}[kind]
        path = tmp_path / "m.pmat"
        mx.save_matrix(path, a)
        got_kind, b = mx.load_matrix(path)
        assert got_kind == kind
        assert b.dtype == a.dtype and np.array_equal(a, b)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "m.pmat"
        mx.save_matrix(path, P([[1.0, 2.0]]))
        raw = path.read_bytes()
        assert raw[:5] == b"PMAT1" and raw[5] == 0
        assert int.from_bytes(raw[6:14], "little") == 1
        assert int.from_bytes(raw[14:22], "little") == 2
        assert raw[22:26] == (0x40000000).to_bytes(4, "little")

    def test_bad_files(self, tmp_path):
        path = tmp_path / "bad.pmat"
        path.write_bytes(b"NOPE!" + bytes(17))
        with pytest.raises(mx.MatrixFormatError):
            mx.load_matrix(path)
        mx.save_matrix(path, P([[1.0, 2.0]]))
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(mx.MatrixFormatError):
            mx.load_matrix(path)
