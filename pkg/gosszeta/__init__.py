"""
Goss zeta functions in characteristic p: direct sums over monic
polynomials, Fredholm determinants of Dwork matrices and the
minimal-permutation slope predictor.
"""
import logging

from .config import Config

__version__ = '0.1.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())
