import numpy as np

from projconvex.convex import Cone


def random_polytopal_cone(dim_ambient, rng, count=None, spread=0.6):
    """Conic hull of random points around e_0 in the chart x_0 = 1."""
    count = count or dim_ambient + 3
    x = np.hstack([np.ones((count, 1)), spread * rng.normal(size=(count, dim_ambient - 1))])
    return Cone(dim_ambient, generators=x)


def random_body(dim, rng, spread=0.6):
    return random_polytopal_cone(dim + 1, rng, spread=spread).to_body()
