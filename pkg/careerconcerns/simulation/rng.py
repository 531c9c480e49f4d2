"""Counter-based random streams, one per simulated path."""
from typing import Iterable

import numpy as np
import numpy.typing as npt

from careerconcerns.errors import DomainError

MAX_SEED = 2 ** 64


class PathStreams:
    """
    Derives an independent Philox stream for every path from (seed, path). A path's draws depend on
    nothing else, so results do not change with the number of paths or the order they are run in.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < MAX_SEED:
            raise DomainError(f'Seed must be an unsigned 64-bit integer, got {seed}')
        self._seed = seed

    @property
    def seed(self) -> int:
        return self._seed

    def fork(self, path: int) -> np.random.Generator:
        if path < 0:
            raise DomainError(f'Path index must be non-negative, got {path}')
        return np.random.Generator(np.random.Philox(key=self._seed, counter=[0, 0, path, 0]))

    def uniforms(self, paths: Iterable[int], size: int) -> npt.NDArray[np.float64]:
        """``size`` uniform draws per path, one row per path."""
        rows = [self.fork(path).random(size) for path in paths]
        return np.stack(rows) if rows else np.empty((0, size))
