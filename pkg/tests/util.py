"""Shared fixtures: canonical operators and the seeded spec generator."""

import numpy as np

from jacobi_reflect import Background, JacobiSpec


def free_spec():
    return JacobiSpec()


def single_site_spec():
    # b_0 = 1 on the free chain
    return JacobiSpec(b_override=(1.0,))


def period2_spec():
    return JacobiSpec(background=Background.periodic((1.0, 0.5), (0.0, 0.0)))


def random_spec(rng):
    """Finite perturbation of the free chain, window length <= 8."""
    length = int(rng.integers(1, 9))
    offset = int(rng.integers(-4, 5 - length))
    a = rng.uniform(0.5, 2.0, size=length)
    b = rng.uniform(-1.0, 1.0, size=length)
    return JacobiSpec(background=Background.free(), offset=offset,
                      a_override=tuple(a), b_override=tuple(b))


def seeded_specs(master, count):
    return [random_spec(np.random.default_rng((master, i))) for i in range(count)]
