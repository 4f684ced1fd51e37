import numpy as np
import pytest
from hypothesis import given, strategies as st

from colpitts_sync.backstepping import (
    ControlVariant,
    Gains,
    closed_loop_matrix,
    control_law,
    inverse_transform,
    lyapunov_values,
    transform_error,
)
from colpitts_sync.model import OscillatorParams, error_derivative
from colpitts_sync.sim import integrate

finite = st.floats(-50, 50, allow_nan=False)
gain_k1 = st.floats(0, 0.79)
gain_k3 = st.floats(0, 20)


def char_poly(k1, k3, p):
    # det(lambda I - A) expanded by hand along the first row
    pp, q = k1 + p.d, p.b - k1
    inner = np.polyadd(np.polymul([1, q], [1, k3]), [1])
    return np.polyadd(np.polymul([1, pp], inner), [1, k3])


def routh_hurwitz_stable(c):
    _, a2, a1, a0 = c
    return a2 > 0 and a0 > 0 and a2 * a1 > a0


class TestGains:
    def test_defaults(self):
        g = Gains(0.0, 2.4982)
        assert g.k2 == 0.0

    @pytest.mark.parametrize("k1,k3", [(-0.1, 1.0), (0.1, -1.0), (np.nan, 1.0), (0.0, np.inf)])
    def test_rejects_negative_or_nonfinite(self, k1, k3):
        with pytest.raises(ValueError):
            Gains(k1, k3)

    def test_rejects_nonzero_k2(self):
        with pytest.raises(ValueError, match="k2"):
            Gains(0.1, 1.0, k2=0.5)

    @pytest.mark.parametrize("k1", [0.8, 0.9])
    def test_k1_must_stay_below_b(self, typical, k1):
        with pytest.raises(ValueError, match="below b"):
            Gains.checked(k1, 1.0, typical)

    def test_checked_accepts_valid(self, typical):
        assert Gains.checked(0.79, 1.0, typical).k1 == 0.79


@pytest.mark.parametrize(
    "err,k1,expected",
    [((1, 2, 3), 0.0, (3, 2, 1)), ((1, 2, 3), 0.5, (3, 3.5, 1)), ((0, 0, 0), 0.3, (0, 0, 0))],
)
def test_transform_error(err, k1, expected):
    assert transform_error(err, Gains(k1, 1.0)) == expected


@pytest.mark.parametrize("k1", [0.0, 0.5, 0.25])
@given(err=st.tuples(finite, finite, finite))
def test_transform_round_trip_exact(k1, err):
    g = Gains(k1, 1.0)
    # exact when k1*e3 is representable, i.e. k1 a short binary fraction and e3 integral
    err = tuple(float(round(v)) for v in err)
    assert inverse_transform(transform_error(err, g), g) == err


class TestControlLaw:
    def test_zero_error_gives_zero(self, typical):
        assert control_law((0, 0, 0), 5.0, Gains(0.3, 2.0), typical) == 0.0

    def test_linear_region(self, typical):
        assert control_law((1, 2, 3), 20.0, Gains(0.0, 2.4982), typical) == pytest.approx(2.4982, abs=1e-15)

    def test_drive_terms(self, typical):
        # -30 F(5) + 30 F(4) = -120 + 150, plus k3 * e1
        assert control_law((1, 0, 1), 5.0, Gains(0.0, 1.0), typical) == pytest.approx(31.0, abs=1e-12)

    def test_printed_coefficients(self, typical):
        k1, k3 = 0.5, 1.5
        b, d = typical.b, typical.d
        e1, e2, e3 = 0.4, -0.3, 0.2
        w2 = e2 + k1 * e3
        expected = (
            k3 * e1
            + (k1**2 - b * k1 + d * k1) * w2
            + (d * k1 - k1 + b * k1**2 - k1**3 - 2 * d * k1**2 - d**2 * k1) * e3
        )
        # z_master far above the breakpoint: drive terms vanish
        assert control_law((e1, e2, e3), 30.0, Gains(k1, k3), typical) == pytest.approx(expected, abs=1e-15)

    def test_corrected_variant(self, typical):
        g = Gains(0.5, 1.5)
        u = control_law((0.4, -0.3, 0.2), 30.0, g, typical, ControlVariant.CORRECTED)
        assert u == pytest.approx(-0.5 * 0.2 + 1.5 * 0.4, abs=1e-15)

    @given(zm=finite, k1=gain_k1, k3=gain_k3, variant=st.sampled_from(list(ControlVariant)))
    def test_zero_error_property(self, zm, k1, k3, variant):
        assert control_law((0, 0, 0), zm, Gains(k1, k3), OscillatorParams(), variant) == 0.0

    def test_variants_agree_at_k1_zero(self, typical):
        g = Gains(0.0, 2.0)
        for err, zm in [((1, 2, 3), 4.0), ((-2, 0.5, 7), 8.5)]:
            assert control_law(err, zm, g, typical, "printed") == control_law(err, zm, g, typical, "corrected")


@given(
    err=st.tuples(finite, finite, finite),
    zm=finite,
    k1=gain_k1,
    k3=gain_k3,
)
def test_corrected_variant_closes_third_row(err, zm, k1, k3):
    # with the corrected law, d(w3)/dt = w2 - k3 w3 exactly
    p = OscillatorParams()
    g = Gains(k1, k3)
    u = control_law(err, zm, g, p, ControlVariant.CORRECTED)
    de1 = error_derivative(err, zm, p, u)[0]
    _, w2, w3 = transform_error(err, g)
    assert de1 == pytest.approx(w2 - k3 * w3, abs=1e-9 * (1 + abs(w2) + abs(k3 * w3) + 30 * abs(err[2])))


class TestClosedLoop:
    def test_matrix(self, typical):
        np.testing.assert_array_equal(
            closed_loop_matrix(Gains(0, 0), typical),
            [[-0.08, 1, 0], [-1, -0.8, -1], [0, 1, 0]],
        )

    def test_char_poly_oracle_matches_matrix(self, typical):
        for k1, k3 in [(0, 2.4982), (0.3, 1.0), (0.7, 5.0)]:
            np.testing.assert_allclose(
                np.poly(closed_loop_matrix(Gains(k1, k3), typical)), char_poly(k1, k3, typical), atol=1e-12
            )

    def test_eigenvalues_at_tuned_gains(self, typical):
        # roots of the hand-expanded characteristic polynomial, frozen
        expected = np.array([-1.88914722 + 0j, -0.74452639 + 0.94607428j, -0.74452639 - 0.94607428j])
        lam = np.linalg.eigvals(closed_loop_matrix(Gains(0, 2.4982), typical))
        np.testing.assert_allclose(np.sort_complex(lam), np.sort_complex(expected), atol=1e-7)
        assert routh_hurwitz_stable(char_poly(0, 2.4982, typical))
        assert lam.real.max() < 0

    def test_k3_zero_keeps_nonpositive_spectrum(self, typical):
        lam = np.linalg.eigvals(closed_loop_matrix(Gains(0, 0), typical))
        assert lam.real.max() == pytest.approx(-0.03939165, abs=1e-7)

    @pytest.mark.parametrize("k3", [0.5, 1, 2, 2.5, 3])
    def test_stability_grid(self, typical, k3):
        assert routh_hurwitz_stable(char_poly(0, k3, typical))
        assert np.linalg.eigvals(closed_loop_matrix(Gains(0, k3), typical)).real.max() < 0


@pytest.mark.parametrize(
    "t,expected", [((0, 0, 0), (0, 0, 0)), ((1, 1, 1), (0.5, 1.0, 1.5)), ((2, 0, 0), (2, 2, 2))]
)
def test_lyapunov_values(t, expected):
    assert lyapunov_values(t) == expected


# magnitudes whose squares do not underflow
coord = st.one_of(st.just(0.0), st.floats(1e-100, 50), st.floats(-50, -1e-100))


@given(t=st.tuples(coord, coord, coord))
def test_lyapunov_ordering(t):
    v1, v2, v3 = lyapunov_values(t)
    assert 0 <= v1 <= v2 <= v3
    assert (v3 == 0) == all(x == 0 for x in t)


def test_nonlinear_closed_loop_equals_linear_at_k1_zero(typical):
    g = Gains(0.0, 2.4982)
    A = closed_loop_matrix(g, typical)
    zm = 4.0  # drive active for the master; F terms must still cancel
    err0 = np.array([1.5, -0.7, 2.0])

    def nonlinear(e):
        return np.array(error_derivative(e, zm, typical, control_law(e, zm, g, typical)))

    def linear(t):
        return A @ t

    errs = integrate(nonlinear, err0, 1e-2, 500)
    lin = integrate(linear, np.array(transform_error(err0, g)), 1e-2, 500)
    back = np.array([inverse_transform(t, g) for t in lin])
    assert np.abs(errs - back).max() < 1e-10
