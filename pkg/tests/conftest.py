import numpy as np
import pytest

import stochastic_billiards as sb


@pytest.fixture(scope="session")
def circle():
    return sb.Ball([0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def sphere():
    return sb.Ball([0.0, 0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def ellipse():
    return sb.Ellipsoid([2.0, 1.0])


@pytest.fixture(scope="session")
def stadium():
    return sb.Capsule(2, 2.0, 1.0)


@pytest.fixture(scope="session")
def rounded_square():
    return sb.RoundedPolytope(
        [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
        [1.0, 1.0, 1.0, 1.0],
        0.5,
    )


@pytest.fixture(scope="session")
def all_bodies(circle, sphere, ellipse, stadium, rounded_square):
    return [
        circle,
        sphere,
        ellipse,
        sb.Ellipsoid([2.0, 1.0, 1.5]),
        stadium,
        sb.Capsule(5, 3.0, 1.0),
        rounded_square,
    ]


def random_boundary_points(body, count, seed=123):
    """Deterministic boundary points from random interior-ray directions."""
    rng = sb.RngStream(seed, body.dim)
    dirs = sb.sample_unit_ball(body.dim, rng, size=count)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return np.array(
        [sb.boundary_point_from_direction(body, u).position for u in dirs]
    )
