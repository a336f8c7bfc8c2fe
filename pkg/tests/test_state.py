import numpy as np
import pytest

from cmvroots.companion import initial_state
from cmvroots.poly import gen_P5
from cmvroots.state import (
    BAND_LOW,
    band_from_dense,
    formula_rows,
    in_profile,
    lower_col,
    reconstruct_entry,
    upper_col,
)


def test_profile_small():
    assert [lower_col(i) for i in range(6)] == [0, 0, 1, 1, 3, 3]
    assert formula_rows(8) == 4
    assert [upper_col(i, 8) for i in range(8)] == [3, 3, 5, 5, 7, 7, 7, 7]


def test_reconstruct_matches_dense_everywhere():
    st = initial_state(gen_P5(10, 4))
    a = st.to_dense()
    for i in range(10):
        for j in range(10):
            assert reconstruct_entry(st, i, j) == a[i, j]


def test_band_values_verbatim_and_rank_two_formula():
    st = initial_state(gen_P5(11, 2))
    for i in range(11):
        for j in range(11):
            v = reconstruct_entry(st, i, j)
            if in_profile(i, j, 11):
                assert v == st.band[i, j - i - BAND_LOW]
            elif j > i and i > 0:
                # z = e_1 at the start, so only the f g^H term survives
                assert v == -st.f[i] * np.conj(st.g[j]) / st.sigma


def test_band_from_dense_round_trip():
    st = initial_state(gen_P5(9, 9))
    assert np.array_equal(band_from_dense(st.to_dense()), st.band)


def test_reconstruct_entry_outside_window():
    st = initial_state(gen_P5(9, 1))
    with pytest.raises(IndexError):
        reconstruct_entry(st, 9, 0)
    st.qst = 2
    with pytest.raises(IndexError):
        reconstruct_entry(st, 7, 7)
    assert reconstruct_entry(st, 6, 6) == st.band[6, -BAND_LOW]


def test_copy_is_independent():
    st = initial_state(gen_P5(8, 1))
    cp = st.copy()
    cp.band[0, 2] = 99
    cp.z[0] = 5
    assert st.band[0, 2] != 99 and st.z[0] == 1
