import math

import numpy as np
import pytest

import robusteq as rq
from robusteq.errors import SteepnessError, UnsupportedPairError
from robusteq.regularizers import KERNELS, supports_pair


@pytest.fixture(params=["quadratic", "entropic", "sqrt"])
def kernel(request):
    return rq.get_kernel(request.param)


def test_kernel_strict_convexity_spot_check(kernel):
    # second difference of theta stays positive on a grid
    h = 1e-4
    for z in np.linspace(0.05, 2.0, 25):
        second = (kernel.theta(z + h) - 2 * kernel.theta(z) + kernel.theta(z - h)) / (h * h)
        assert second > 0


def test_kernel_inverse_round_trip(kernel):
    for z in np.linspace(0.05, 3.0, 40):
        w = kernel.theta_prime(float(z))
        assert kernel.theta_prime_inv(w) == pytest.approx(z, abs=1e-10)


def test_steepness_flags():
    assert not rq.get_kernel("quadratic").steep
    assert rq.get_kernel("entropic").steep
    assert rq.get_kernel("sqrt").steep
    assert rq.get_kernel("euclidean").name == "quadratic"


def test_mirror_closed_form_examples():
    d1 = rq.product(rq.interval(0.0, 1.0))
    d3 = rq.product(rq.simplex(3))
    ent1 = rq.RegularizerSpec.uniform("entropic", 1)
    assert rq.mirror(ent1, d1, [0.0])[0] == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert rq.mirror(ent1, d1, [5.0])[0] == 1.0
    sqrt1 = rq.RegularizerSpec.uniform("sqrt", 1)
    assert rq.mirror(sqrt1, d1, [-2.0])[0] == pytest.approx(0.25, abs=1e-15)
    assert rq.mirror(sqrt1, d1, [-0.5])[0] == 1.0
    ent3 = rq.RegularizerSpec.uniform("entropic", 1)
    assert np.allclose(rq.mirror(ent3, d3, [0.0, 0.0, 0.0]), [1 / 3] * 3)
    quad3 = rq.RegularizerSpec.uniform("quadratic", 1)
    assert np.allclose(rq.mirror(quad3, d3, [0.8, 0.6, -0.2]), [0.6, 0.4, 0.0], atol=1e-12)
    quad1 = rq.RegularizerSpec.uniform("quadratic", 1)
    assert rq.mirror(quad1, d1, [-3.0])[0] == 0.0


def test_unregistered_pair_raises():
    d3 = rq.product(rq.simplex(3))
    with pytest.raises(UnsupportedPairError):
        rq.mirror(rq.RegularizerSpec.uniform("sqrt", 1), d3, [0.0, 0.0, 0.0])
    assert not supports_pair(rq.get_kernel("sqrt"), rq.simplex(3))


@pytest.mark.parametrize(
    "reg_name,dom_maker",
    [
        ("quadratic", lambda: rq.product(rq.interval(0.0, 1.0))),
        ("entropic", lambda: rq.product(rq.interval(0.0, 1.0))),
        ("sqrt", lambda: rq.product(rq.interval(0.0, 1.0))),
        ("quadratic", lambda: rq.product(rq.box([0.0, -1.0], [1.0, 2.0]))),
        ("quadratic", lambda: rq.product(rq.simplex(3))),
        ("entropic", lambda: rq.product(rq.simplex(3))),
    ],
)
def test_mirror_matches_bruteforce(reg_name, dom_maker):
    dom = dom_maker()
    reg = rq.RegularizerSpec.uniform(reg_name, 1)
    rng = np.random.default_rng(5)
    step = 1e-3 if dom.total_dim <= 2 else 2e-3
    for _ in range(25):
        y = rng.uniform(-4, 4, dom.total_dim)
        xm = rq.mirror(reg, dom, y)
        xb = rq.mirror_bruteforce(reg, dom, y, step)
        assert np.max(np.abs(xm - xb)) <= 2 * step
        assert dom.contains(xm, 1e-12)


def test_mirror_bruteforce_saturation_branches():
    d1 = rq.product(rq.interval(0.0, 1.0))
    ent = rq.RegularizerSpec.uniform("entropic", 1)
    assert rq.mirror_bruteforce(ent, d1, [5.0], 1e-3)[0] == 1.0
    quad = rq.RegularizerSpec.uniform("quadratic", 1)
    assert rq.mirror_bruteforce(quad, d1, [-3.0], 1e-3)[0] == 0.0


def test_mirror_monotone_in_dual(kernel):
    dom = rq.product(rq.simplex(3)) if kernel.name != "sqrt" else rq.product(rq.interval(0, 1))
    reg = rq.RegularizerSpec(kernels=(kernel,))
    rng = np.random.default_rng(11)
    for _ in range(100):
        y1 = rng.uniform(-5, 5, dom.total_dim)
        y2 = rng.uniform(-5, 5, dom.total_dim)
        gap = float((y1 - y2) @ (rq.mirror(reg, dom, y1) - rq.mirror(reg, dom, y2)))
        assert gap >= -1e-12


def test_steep_outputs_stay_positive_quadratic_hits_boundary():
    d3 = rq.product(rq.simplex(3))
    ent = rq.RegularizerSpec.uniform("entropic", 1)
    quad = rq.RegularizerSpec.uniform("quadratic", 1)
    rng = np.random.default_rng(2)
    hit_boundary = False
    for _ in range(200):
        y = rng.uniform(-30, 30, 3)
        xe = rq.mirror(ent, d3, y)
        assert np.all(xe > 0.0)
        xq = rq.mirror(quad, d3, y)
        hit_boundary = hit_boundary or np.any(xq == 0.0)
    assert hit_boundary
    d1 = rq.product(rq.interval(0.0, 1.0))
    for y in (-50.0, -5.0, 0.5):
        assert rq.mirror(ent, d1, [y])[0] > 0.0


def test_grad_h_examples_and_round_trip():
    d2 = rq.product(rq.box([0.0, 0.0], [1.0, 1.0]))
    quad = rq.RegularizerSpec.uniform("quadratic", 1)
    assert np.allclose(rq.grad_h(quad, d2, [0.3, 0.7]), [0.3, 0.7])
    d1 = rq.product(rq.interval(0.0, 1.0))
    ent = rq.RegularizerSpec.uniform("entropic", 1)
    assert rq.grad_h(ent, d1, [math.exp(-1.0)])[0] == pytest.approx(0.0, abs=1e-14)
    d3 = rq.product(rq.simplex(3))
    y = rq.grad_h(ent, d3, [1 / 3, 1 / 3, 1 / 3])
    assert np.allclose(y, math.log(1 / 3) + 1.0)
    assert np.allclose(rq.mirror(ent, d3, y), [1 / 3] * 3, atol=1e-12)


def test_grad_h_round_trip_interior(kernel):
    dom = rq.product(rq.interval(0.0, 1.0))
    reg = rq.RegularizerSpec(kernels=(kernel,))
    for x in (0.05, 0.3, 0.9):
        y = rq.grad_h(reg, dom, [x])
        assert rq.mirror(reg, dom, y)[0] == pytest.approx(x, abs=1e-9)


def test_grad_h_steepness_error_at_boundary():
    d1 = rq.product(rq.interval(0.0, 1.0))
    for name in ("entropic", "sqrt"):
        with pytest.raises(SteepnessError):
            rq.grad_h(rq.RegularizerSpec.uniform(name, 1), d1, [0.0])
    # non-steep kernels take the one-sided value instead
    quad = rq.RegularizerSpec.uniform("quadratic", 1)
    assert rq.grad_h(quad, d1, [0.0])[0] == 0.0


def test_rate_function_examples():
    ent = rq.get_kernel("entropic")
    assert rq.rate_function(ent, -5.0) == pytest.approx(math.exp(-6.0), rel=1e-12)
    quad = rq.get_kernel("quadratic")
    assert rq.rate_function(quad, -1.0) == 0.0
    assert rq.rate_function(quad, 0.5) == 0.5
    sq = rq.get_kernel("sqrt")
    assert rq.rate_function(sq, -10.0) == pytest.approx(0.01, rel=1e-12)


def test_rate_function_shape(kernel):
    zs = np.linspace(-40, -0.5, 200)
    vals = [rq.rate_function(kernel, z) for z in zs]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))  # nondecreasing
    if kernel.steep:
        assert rq.rate_function(kernel, -1e6) < 1e-8  # vanishes in the tail
    else:
        cutoff = kernel.theta_prime_at_zero
        assert rq.rate_function(kernel, cutoff) == 0.0
        assert rq.rate_function(kernel, cutoff - 1e-9) == 0.0
        assert rq.rate_function(kernel, cutoff + 1e-9) > 0.0


def test_custom_kernel_registration():
    # theta(z) = z^2 (twice the quadratic), non-steep with theta'(0+) = 0
    k = rq.Kernel(
        name="double_quad",
        theta=lambda z: z * z,
        theta_prime=lambda z: 2.0 * z,
        theta_prime_inv=lambda w: w / 2.0,
        theta_prime_at_zero=0.0,
    )
    rq.register_kernel(k)
    try:
        d1 = rq.product(rq.interval(0.0, 1.0))
        reg = rq.RegularizerSpec.uniform("double_quad", 1)
        assert rq.mirror(reg, d1, [1.0])[0] == pytest.approx(0.5, abs=1e-12)
        xb = rq.mirror_bruteforce(reg, d1, [1.0], 1e-3)
        assert abs(xb[0] - 0.5) <= 2e-3
    finally:
        KERNELS.pop("double_quad", None)
