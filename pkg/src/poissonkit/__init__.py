"""Executable checks for Poisson manifolds, Poisson Lie groups, Lie bialgebras,
momentum maps and Poisson reduction, on explicit coordinate charts."""

from .exprcore import Chart, is_zero, parse, simplify
from .manifest import load_fixture, load_manifest, resolve
from .multivec import MultivectorField, bivector, schouten, vector_field, wedge
from .poisson import PoissonChart, bracket, check_jacobi

__all__ = [
    "Chart",
    "MultivectorField",
    "PoissonChart",
    "bivector",
    "bracket",
    "check_jacobi",
    "is_zero",
    "load_fixture",
    "load_manifest",
    "parse",
    "resolve",
    "schouten",
    "simplify",
    "vector_field",
    "wedge",
]

__version__ = "0.1.0"
