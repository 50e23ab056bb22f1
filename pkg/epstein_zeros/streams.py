"""Counter-based random streams built on AES in counter mode."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from hashlib import sha256
import logging
from typing import Final

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
import numpy as np
from scipy.special import ndtri

_LOGGER = logging.getLogger(__name__)

_BLOCKSIZE: Final = 16
_WORD: Final = 8
_MANTISSA_SCALE: Final = 2.0**-53
# Rows per keystream in normal_rows.
_ROW_BATCH: Final = 4096


class KeyedStream:
    """Deterministic uniform stream keyed by (seed, domain, index).

    Index i (a sample number) selects an independent keystream: the AES counter
    block starts at i * 2^64, so word k of stream i depends only on
    (seed, domain, i, k) and samples can be drawn in any order.
    """

    def __init__(self, seed: int, domain: str = "") -> None:
        self.seed = int(seed)
        self.domain = domain
        self._key = sha256(f"{self.seed}:{domain}".encode("utf-8")).digest()[:_BLOCKSIZE]

    def words(self, index: int, count: int) -> np.ndarray:
        """count uint64 words of stream index."""
        if index < 0:
            raise ValueError(f"Stream index must be non-negative, got {index}")
        nonce = (int(index) << 64).to_bytes(_BLOCKSIZE, "big")
        encryptor = Cipher(algorithms.AES(self._key), modes.CTR(nonce)).encryptor()
        raw = encryptor.update(b"\x00" * (_WORD * count)) + encryptor.finalize()
        return np.frombuffer(raw, dtype="<u8")

    def uniforms(self, index: int, count: int) -> np.ndarray:
        """Uniform doubles in [0, 1) with 53 random bits."""
        return (self.words(index, count) >> np.uint64(11)).astype(np.float64) * _MANTISSA_SCALE

    def normals(self, index: int, count: int) -> np.ndarray:
        """Standard normal variates by inversion."""
        return ndtri(self.uniforms(index, count) + _MANTISSA_SCALE / 2)

    def normal_rows(self, n_rows: int, n_cols: int, threads: int = 1) -> np.ndarray:
        """(n_rows, n_cols) standard normals; row r depends only on (seed, domain, r, n_cols)."""
        batches = range(0, n_rows, _ROW_BATCH)

        def draw(first: int) -> np.ndarray:
            rows = min(_ROW_BATCH, n_rows - first)
            return self.normals(first // _ROW_BATCH, rows * n_cols).reshape(rows, n_cols)

        if threads <= 1:
            parts = [draw(first) for first in batches]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(draw, batches))
        if not parts:
            return np.zeros((0, n_cols))
        return np.concatenate(parts, axis=0)

    def child(self, domain: str) -> KeyedStream:
        return KeyedStream(self.seed, f"{self.domain}/{domain}")

    def __repr__(self) -> str:
        return f"KeyedStream(seed={self.seed}, domain={self.domain!r})"
