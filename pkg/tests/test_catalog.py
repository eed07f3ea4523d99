import numpy as np
import pytest

from nclab.catalog import (
    catalog_entry,
    catalog_names,
    chirality_blocks,
    list_catalog,
    matrix_even_triple,
)
from nclab.checks import verify
from nclab.constructions import normality_residual


def test_names_and_provenance():
    entries = {e.name: e for e in list_catalog()}
    assert {"two-point", "tensor-4x4", "matrix-even-n2"} <= set(entries)
    assert entries["matrix-even-n2"].provenance.startswith("derived stand-in")
    assert catalog_names() == [e.name for e in list_catalog()]


def test_matrix_even_deterministic():
    a, b = matrix_even_triple(2, 11), matrix_even_triple(2, 11)
    np.testing.assert_array_equal(a.D, b.D)
    assert not np.array_equal(a.D, matrix_even_triple(2, 12).D)


@pytest.mark.parametrize("n", [2, 3])
def test_matrix_even_flat(n):
    t = matrix_even_triple(n, 4)
    dp, dm = chirality_blocks(t)
    np.testing.assert_allclose(dm, dp.conj().T)
    assert normality_residual(dp) < 1e-14
    assert verify(t).overall


def test_matrix_even_upper_plus():
    a, b = matrix_even_triple(2, 5), matrix_even_triple(2, 5, upper="plus")
    dpa, dma = chirality_blocks(a)
    dpb, dmb = chirality_blocks(b)
    np.testing.assert_allclose(dmb, dpa, atol=1e-15)
    assert verify(b).overall
    with pytest.raises(ValueError):
        matrix_even_triple(2, 5, upper="left")
    with pytest.raises(ValueError):
        matrix_even_triple(1)


def test_entry_lookup():
    assert catalog_entry("matrix-even-n3", seed=2).triple.dim == 18
    with pytest.raises(KeyError):
        catalog_entry("nope")
