"""Sign quantization, norms, and the 4-QAM codec."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from airvote.core import (
    QamSymbolBlock,
    l1_norm,
    qam_decode,
    qam_encode,
    sign_quantize,
    validate_signs,
)

sign_vectors = st.lists(st.sampled_from([-1.0, 1.0]), min_size=1, max_size=64).map(
    np.array
)


class TestSignQuantize:
    def test_zero_breaks_to_plus_one(self):
        np.testing.assert_array_equal(
            sign_quantize([-0.3, 0.0, 2.1]), [-1.0, 1.0, 1.0]
        )

    def test_single_positive(self):
        np.testing.assert_array_equal(sign_quantize([5.0]), [1.0])

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        g = rng.standard_normal(100)
        once = sign_quantize(g)
        np.testing.assert_array_equal(sign_quantize(once), once)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            sign_quantize([1.0, np.nan])
        with pytest.raises(ValueError):
            sign_quantize([np.inf, 0.0])

    def test_never_emits_zero_and_keeps_length(self):
        rng = np.random.default_rng(11)
        g = rng.standard_normal(257)
        g[::5] = 0.0
        out = sign_quantize(g)
        assert out.shape == g.shape
        assert np.all(np.abs(out) == 1.0)


class TestL1Norm:
    def test_zero_vector(self):
        assert l1_norm([0.0, 0.0, 0.0]) == 0.0

    def test_mixed_signs(self):
        assert l1_norm([1.0, -2.0, 3.0]) == 6.0

    def test_matches_elementwise_summation_oracle(self):
        rng = np.random.default_rng(3)
        g = rng.standard_normal(500)
        oracle = sum(abs(float(x)) for x in g)
        assert l1_norm(g) == pytest.approx(oracle, rel=1e-12)

    def test_positive_unless_zero(self):
        assert l1_norm([0.0, 1e-300]) > 0.0


class TestQamCodec:
    def test_even_pair_mapping(self):
        block = qam_encode([1.0, -1.0])
        np.testing.assert_allclose(
            block.symbols, [(1.0 - 1.0j) / np.sqrt(2.0)], atol=1e-15
        )
        assert not block.padded

    def test_odd_padding(self):
        block = qam_encode([1.0, 1.0, -1.0])
        np.testing.assert_allclose(
            block.symbols,
            [(1.0 + 1.0j) / np.sqrt(2.0), (-1.0 + 1.0j) / np.sqrt(2.0)],
            atol=1e-15,
        )
        assert block.padded
        np.testing.assert_array_equal(qam_decode(block), [1.0, 1.0, -1.0])

    def test_round_trip_random(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            q = int(rng.integers(1, 40))
            signs = np.where(rng.random(q) < 0.5, -1.0, 1.0)
            np.testing.assert_array_equal(qam_decode(qam_encode(signs)), signs)

    @given(sign_vectors)
    def test_round_trip_property(self, signs):
        np.testing.assert_array_equal(qam_decode(qam_encode(signs)), signs)

    @given(sign_vectors)
    def test_unit_symbol_energy(self, signs):
        block = qam_encode(signs)
        np.testing.assert_allclose(np.abs(block.symbols), 1.0, atol=1e-12)

    def test_malformed_pad_rejected(self):
        bad = QamSymbolBlock(
            symbols=np.array([(1.0 - 1.0j) / np.sqrt(2.0)]), n_signs=1
        )
        with pytest.raises(ValueError, match="pad"):
            qam_decode(bad)

    def test_inconsistent_symbol_count_rejected(self):
        with pytest.raises(ValueError):
            QamSymbolBlock(symbols=np.full(3, (1 + 1j) / np.sqrt(2)), n_signs=2)

    def test_non_constellation_symbols_rejected(self):
        with pytest.raises(ValueError):
            QamSymbolBlock(symbols=np.array([0.5 + 0.5j]), n_signs=2)

    def test_rejects_non_sign_input(self):
        with pytest.raises(ValueError):
            qam_encode([1.0, 0.5])


def test_validate_signs_rejects_zero():
    with pytest.raises(ValueError):
        validate_signs([1.0, 0.0])
