"""Reproducible Gaussian streams.

Each stream is a Philox-4x64 counter-based generator keyed by
``(seed, stream)``, so streams with different ids are independent and any
stream can be regenerated without replaying the others. Uniforms keep the top
53 bits of each 64-bit output; normals come from the Box-Muller transform,
two per pair of uniforms, in the order ``(cos branch, sin branch)``.
"""
import numpy as np

MASK64 = (1 << 64) - 1


class GaussianStream:
    def __init__(self, seed, stream=0):
        key = np.array([int(seed) & MASK64, int(stream) & MASK64], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)

    def uniform53(self, size):
        """Uniforms on ``[0, 1)`` with 53 random bits each."""
        raw = self._bitgen.random_raw(size)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def standard_normal(self, size):
        shape = (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape))
        pairs = (count + 1) // 2
        u = self.uniform53(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u is in (0, 1]
        angle = 2.0 * np.pi * u[:, 1]
        z = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).ravel()
        return z[:count].reshape(shape)
