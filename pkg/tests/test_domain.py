import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from revealib.domain import (
    Domain,
    Instance,
    ParameterPoint,
    ParameterSpace,
    UtilityForm,
    c_map,
    dumps_stream,
    eval_f,
    loads_stream,
    read_stream,
    write_stream,
)
from revealib.errors import DomainError
from revealib.instances import GenConfig, gen_instance_stream, obscuring_stream


def test_c_map_sign_conventions():
    assert_array_equal(c_map([1.0, 2.0], UtilityForm.quad_diag([1.0, 1.0])), [-1.0, -2.0])
    assert_array_equal(c_map([1.0, 2.0], UtilityForm.ces()), [1.0, 4.0])
    assert_array_equal(c_map([3.0, 5.0], UtilityForm.bilinear()), [-3.0, -5.0])
    assert_allclose(c_map([1.0, np.e], UtilityForm.cobb_douglas()), [0.0, -1.0])


def test_c_map_obscuring_agent():
    utility = UtilityForm.custom_1d("obscuring")
    assert_array_equal(c_map([0.0], utility), [-1.0])
    assert_array_equal(c_map([0.5], utility), [0.0])


def test_c_map_cobb_douglas_rejects_nonpositive():
    with pytest.raises(DomainError):
        c_map([1.0, 0.0], UtilityForm.cobb_douglas())


def test_c_map_cobb_douglas_floors_tiny_coordinates():
    utility = UtilityForm.cobb_douglas()
    assert_allclose(c_map([1e-15, 1.0], utility), [-np.log(1e-12), 0.0])
    assert_allclose(c_map([1e-15, 1.0], utility, log_floor=1e-6), [-np.log(1e-6), 0.0])
    assert_allclose(c_map([1e-9, 1.0], utility), [-np.log(1e-9), 0.0])


def test_eval_f_examples():
    quad = Instance(1, UtilityForm.quad_diag([1.0, 1.0]), Domain.cont_knapsack([1.0, 1.0], 2.0))
    assert eval_f([1.0, 1.0], ParameterPoint([0.5, 0.5]), quad) == pytest.approx(0.0)

    ces = Instance(1, UtilityForm.ces(), Domain.eq_knapsack([1.0, 1.0], 2.0))
    assert eval_f([2.0, 0.0], ParameterPoint([0.25, 0.75]), ces) == pytest.approx(1.0)

    bilinear = Instance(1, UtilityForm.bilinear(), Domain.cont_knapsack([1.0, 1.0], 8.0))
    assert eval_f([3.0, 5.0], ParameterPoint([1.0, 0.0]), bilinear) == pytest.approx(-3.0)


@pytest.mark.parametrize("utility", [
    UtilityForm.quad_diag([0.2, 0.3, 0.5]),
    UtilityForm.ces(),
    UtilityForm.bilinear(),
    UtilityForm.cobb_douglas(),
])
def test_decomposition_is_theta_free(rng, utility):
    domain = Domain.eq_knapsack([1.0, 2.0, 3.0], 4.0)
    inst = Instance(1, utility, domain)
    for _ in range(20):
        x = rng.uniform(0.1, 2.0, size=3)
        theta_a, theta_b = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        rest_a = eval_f(x, theta_a, inst) - np.dot(theta_a, c_map(x, utility))
        rest_b = eval_f(x, theta_b, inst) - np.dot(theta_b, c_map(x, utility))
        assert abs(rest_a - rest_b) <= 1e-12


def test_parameter_point_invariants():
    ParameterPoint([0.25, 0.75])
    with pytest.raises(DomainError):
        ParameterPoint([0.5, 0.6])
    with pytest.raises(DomainError):
        ParameterPoint([-0.1, 1.1])
    with pytest.raises(DomainError):
        ParameterPoint([4.0], ParameterSpace.box(-3, 3))
    point = ParameterPoint.on_simplex([2.0, 6.0])
    assert_allclose(point.values, [0.25, 0.75])


def test_parameter_space_helpers():
    assert_allclose(ParameterSpace.simplex().center(4).values, np.full(4, 0.25))
    assert_allclose(ParameterSpace.box(-3, 3).center(1).values, [0.0])
    assert ParameterSpace.simplex().vertices_min([2.0, -1.0, 0.0]) == -1.0
    assert ParameterSpace.box(-1, 2).vertices_min([1.0, -1.0]) == -1.0 - 2.0


def test_domain_validation():
    with pytest.raises(DomainError):
        Domain.cont_knapsack([1.0, -1.0], 1.0)
    with pytest.raises(DomainError):
        Domain.bin_knapsack([1.5, 2.0], 3.0)
    with pytest.raises(DomainError):
        Domain.interval(1.0, -1.0)
    with pytest.raises(DomainError):
        Instance(1, UtilityForm.quad_diag([1.0]), Domain.cont_knapsack([1.0, 1.0], 1.0))
    with pytest.raises(DomainError):
        Instance(1, UtilityForm.custom_1d("obscuring"), Domain.cont_knapsack([1.0], 1.0))


def test_domain_feasibility_and_sampling(rng):
    polytope = Domain.polytope([[1.0, 2.0], [3.0, 1.0]], [4.0, 6.0])
    assert_allclose(polytope.coordinate_upper_bounds(), [2.0, 2.0])
    assert polytope.feasibility_residual([1.0, 1.0]) == 0.0
    assert polytope.feasibility_residual([2.0, 2.0]) == pytest.approx(2.0)

    for domain in (polytope, Domain.cont_knapsack([1.0, 2.0, 3.0], 2.0), Domain.eq_knapsack([2.0, 5.0], 3.0)):
        for _ in range(50):
            assert domain.is_feasible(domain.sample_feasible(rng))

    with pytest.raises(DomainError):
        Domain.bin_knapsack([1.0, 2.0], 2.0).sample_feasible(rng)


def test_stream_text_round_trip(tmp_path):
    for cfg in (GenConfig(n=3, T=4, instance_count=1), GenConfig(n=2, m=3, T=3, domain="cp", instance_count=1)):
        stream = gen_instance_stream(cfg)
        text = dumps_stream(stream)
        assert text.endswith("\n") and text.startswith("stream ")
        again = loads_stream(text)
        assert dumps_stream(again) == text
        assert_array_equal(again.theta_true.values, stream.theta_true.values)

    scripted = obscuring_stream(3)
    path = tmp_path / "obscuring.txt"
    write_stream(path, scripted)
    back = read_stream(path)
    assert back.T == 3
    assert back.utility.custom == "obscuring"
    assert back.theta_true.space == ParameterSpace.box(-3.0, 3.0)
