"""Channel codes: convolutional/Viterbi, turbo, LDPC."""

from .convolutional import DEFAULT_TRELLIS, TrellisSpec, conv_encode, viterbi_decode
from .kernels import BACKEND, HAVE_COMPILED
from .ldpc import LdpcCode, LdpcResult, default_ldpc_code, ldpc_decode, ldpc_encode, ldpc_generate
from .turbo import InterleaverSpec, interleaver, turbo_decode, turbo_decode_llr, turbo_encode

__all__ = [
    "BACKEND", "HAVE_COMPILED", "DEFAULT_TRELLIS", "TrellisSpec", "conv_encode", "viterbi_decode",
    "InterleaverSpec", "interleaver", "turbo_encode", "turbo_decode", "turbo_decode_llr",
    "LdpcCode", "LdpcResult", "ldpc_generate", "ldpc_encode", "ldpc_decode", "default_ldpc_code",
]
