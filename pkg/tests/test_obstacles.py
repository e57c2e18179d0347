import numpy as np
import pytest

from conecbf.errors import AxisVelocityError, DomainError
from conecbf.obstacles import (
    Cylinder,
    Ellipsoid,
    Obstacle,
    ObstacleState,
    PlanarEllipse,
    advance,
    classify_shape,
    effective_radius,
    ellipsoid_as_cylinder,
)


def make_obstacle(center, velocity, shape=None):
    return Obstacle(
        shape=shape or PlanarEllipse(0.5, 0.5),
        state=ObstacleState(center=center, velocity=velocity),
    )


class TestEffectiveRadius:
    def test_planar_ellipse(self):
        assert effective_radius(PlanarEllipse(1.2, 0.55), 0.4) == pytest.approx(1.4)

    def test_sphere(self):
        assert effective_radius(Ellipsoid(0.5, 0.5, 0.5), 0.2) == pytest.approx(0.6)

    def test_elongated_ellipsoid_as_cylinder(self):
        # second-largest semi-axis becomes the cross-section radius
        cyl = ellipsoid_as_cylinder(Ellipsoid(0.3, 0.4, 5.0))
        assert cyl.height == pytest.approx(5.0)
        assert np.allclose(cyl.axis, [0, 0, 1])
        assert effective_radius(cyl, 0.2) == pytest.approx(0.5)

    def test_monotone(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            c1, c2 = rng.uniform(0.2, 2.0, 2)
            w = rng.uniform(0, 1)
            base = effective_radius(PlanarEllipse(c1, c2), w)
            grow = rng.uniform(0, 1, 3)
            assert effective_radius(PlanarEllipse(c1 + grow[0], c2), w) >= base
            assert effective_radius(PlanarEllipse(c1, c2 + grow[1]), w) >= base
            assert effective_radius(PlanarEllipse(c1, c2), w + grow[2]) >= base

    def test_negative_width_rejected(self):
        with pytest.raises(DomainError):
            effective_radius(PlanarEllipse(1, 1), -0.1)


class TestAdvance:
    def test_translation(self):
        ob = make_obstacle([0, 0, 0], [1, 0, 0])
        assert np.allclose(advance(ob, 0.5).center, [0.5, 0, 0])

    def test_zero_dt_identity(self):
        ob = make_obstacle([1, 2, 3], [4, 5, 6])
        assert np.allclose(advance(ob, 0.0).center, ob.center)

    def test_composition(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            ob = make_obstacle(rng.uniform(-5, 5, 3), rng.uniform(-2, 2, 3))
            dt = rng.uniform(0, 2)
            twice = advance(advance(ob, dt), dt).center
            once = advance(ob, 2 * dt).center
            assert np.max(np.abs(twice - once)) < 1e-12

    def test_preserves_cylinder_axis_orthogonality(self):
        shape = Cylinder(axis=[0, 0, 1], height=3.0, radii=(0.4, 0.4))
        ob = make_obstacle([0, 0, 0], [1, 0.5, 0], shape=shape)
        moved = advance(ob, 1.7)
        assert abs(float(moved.velocity @ shape.axis)) < 1e-12


class TestClassify:
    def test_sphere_like(self):
        assert classify_shape(1, 1, 1, 3.0) == "sphere"

    def test_cylinder_like(self):
        assert classify_shape(0.3, 0.4, 5.0, 3.0) == "cylinder"

    def test_boundary(self):
        assert classify_shape(1, 1, 2.9, 3.0) == "sphere"


class TestInvariants:
    def test_cylinder_axis_must_be_unit(self):
        with pytest.raises(DomainError):
            Cylinder(axis=[0, 0, 2], height=1.0, radii=(0.4, 0.4))

    def test_cylinder_velocity_must_be_perpendicular(self):
        shape = Cylinder(axis=[0, 0, 1], height=3.0, radii=(0.4, 0.4))
        with pytest.raises(AxisVelocityError):
            make_obstacle([0, 0, 0], [0, 0, 1], shape=shape)

    def test_semi_axes_positive(self):
        with pytest.raises(DomainError):
            PlanarEllipse(0.0, 1.0)
