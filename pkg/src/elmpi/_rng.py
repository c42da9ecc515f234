"""Seeded random number generation.

Every stochastic routine in the package draws from a Philox-4x64
counter-based bit generator (numpy's ``Philox``), so a seed produces the
same stream on every platform numpy supports.
"""

import numpy as np


def make_rng(seed):
    """Return a ``numpy.random.Generator`` backed by Philox.

    ``seed`` may be an int, a ``SeedSequence`` or an existing Generator
    (returned unchanged).
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def derive_seeds(seed, n):
    """Split one integer seed into ``n`` independent integer seeds."""
    state = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint32)
    return [int(s) for s in state]
