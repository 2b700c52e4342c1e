"""Non-uniform quantum Fourier transform laboratory.

Classical low-rank factorization of the non-uniform DFT, bit-exact
fixed-point register arithmetic, gate-level circuit constructions with a
statevector simulator, a block-encoding algebra over explicit matrices, and
the parameter-selection / error-verification layer that ties them together.
"""

from . import analysis, blockenc, chebfact, fxp, qcirc

__all__ = ["analysis", "blockenc", "chebfact", "fxp", "qcirc"]
__version__ = "0.1.0"
