"""Counter-based random streams.

Every source of randomness in the package is a named Philox stream keyed
by (seed, stream name). Streams are independent, order-free and cheap to
construct, so scenario i of a Monte Carlo run can be regenerated in
isolation without replaying the first i-1 scenarios.

Derivation rule (logged by the CLI): the 128-bit Philox key is
``seed | blake2b_64(name) << 64`` with the seed truncated to 64 bits.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_key(name: str) -> int:
    """Stable 64-bit digest of a stream name."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, name: str) -> np.random.Generator:
    """Generator for the (seed, name) stream."""
    key = (int(seed) & _MASK64) | (stream_key(name) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, index) -> int:
    """Child seed for a sub-experiment, e.g. one Monte Carlo scenario."""
    return stream_key(f"{int(seed) & _MASK64}/{index}")


def derivation_rule() -> str:
    """Human-readable statement of the seed derivation, for run logs."""
    return (
        "philox key = seed | blake2b64(stream) << 64; "
        "scenario i seed = blake2b64('{seed}/{i}')"
    )
