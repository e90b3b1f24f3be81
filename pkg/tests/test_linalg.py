import numpy as np
from hypothesis import given, strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from expsum_lab import linalg
from expsum_lab.ffield import FieldSpec

matrices = st.tuples(st.sampled_from([2, 3, 5, 7]), st.integers(1, 7), st.integers(1, 7),
                     st.randoms(use_true_random=False)).map(
    lambda t: (t[0], np.array([[t[3].randrange(t[0]) for _ in range(t[2])] for _ in range(t[1])], dtype=np.int64)))


def sympy_rank(A, p):
    return DomainMatrix([[GF(p)(int(v)) for v in row] for row in A], A.shape, GF(p)).rank()


@given(matrices)
def test_rank_matches_sympy(pA):
    p, A = pA
    assert linalg.rank(A, FieldSpec(p)) == sympy_rank(A, p)


@given(matrices)
def test_nullspace(pA):
    p, A = pA
    F = FieldSpec(p)
    N = linalg.nullspace(A, F)
    assert N.shape == (A.shape[1], A.shape[1] - linalg.rank(A, F))
    assert not linalg.matmul(A, N, F).any()
    assert linalg.rank(N.T, F) == N.shape[1]


@given(matrices)
def test_rref_pivots(pA):
    p, A = pA
    F = FieldSpec(p)
    R, piv = linalg.rref(A, F)
    assert len(piv) == linalg.rank(A, F)
    for k, c in enumerate(piv):
        assert R[k, c] == 1 and not np.delete(R[:, c], k).any()


def test_extension_field_rank():
    F = FieldSpec(2, 2)
    A = np.array([[1, 2], [2, F.mul(2, 2)]])  # second row = 2 * first
    assert linalg.rank(A, F) == 1
    assert linalg.in_span(A[:1], A[1], F)
