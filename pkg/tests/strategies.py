"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st


def taus(min_im=0.8, max_im=1.5, max_re=0.5):
    return st.builds(complex, st.floats(-max_re, max_re), st.floats(min_im, max_im))


def small_z(radius=0.45):
    return st.builds(complex, st.floats(-radius, radius), st.floats(-radius, radius))


rationals = st.builds(Fraction, st.integers(-7, 7), st.sampled_from([1, 2, 3, 4, 6]))


@st.composite
def sl2z(draw, max_len=5):
    """Random words in S and T."""
    from jmf.formspec import GammaElement

    g = GammaElement(1, 0, 0, 1)
    for _ in range(draw(st.integers(0, max_len))):
        if draw(st.booleans()):
            g = g @ GammaElement(0, -1, 1, 0)
        else:
            k = draw(st.integers(-2, 2))
            g = g @ GammaElement(1, k, 0, 1)
    return g
