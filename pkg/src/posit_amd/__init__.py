"""Bit-accurate model of a posit <N,2> unified multiply / approximate-divide unit."""
from .muldiv_unit import DIV, MUL, OpMode, execute, execute_array, exception_detect
from .oracle import exact_div, exact_mul, ulp_distance
from .posit_core import P16, P32, PositConfig, PositWord, decode, encode, to_real
from .recip_approx import EcLut, approx_reciprocal, build_ec_lut

__all__ = [
    "DIV", "MUL", "OpMode", "execute", "execute_array", "exception_detect",
    "exact_div", "exact_mul", "ulp_distance",
    "P16", "P32", "PositConfig", "PositWord", "decode", "encode", "to_real",
    "EcLut", "approx_reciprocal", "build_ec_lut",
]
__version__ = "0.1.0"
