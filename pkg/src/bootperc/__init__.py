"""Bootstrap percolation on the square lattice: sharp-threshold machinery.

Submodules
----------
lattice      rectangles, configurations, update rules, closure, traversability
analytic     f, g, beta, double-gap probabilities, threshold integrals
variational  the path functional w and its infimum W
spanning     rectangle merging and disjoint spanning pairs
hierarchy    good hierarchies with their energy bounds
montecarlo   reproducible estimates and threshold scans
oracle       exhaustive enumeration on small rectangles
estimators   scikit-learn style wrappers
cli          command-line entry point
"""

from bootperc.analytic import LAMBDA, LAMBDA_MODIFIED, RateParams, f, g
from bootperc.lattice import Configuration, Direction, Model, Rect, Site, closure, is_internally_spanned

__version__ = "0.1.0"

__all__ = ["LAMBDA", "LAMBDA_MODIFIED", "RateParams", "f", "g", "Configuration", "Direction", "Model",
           "Rect", "Site", "closure", "is_internally_spanned", "__version__"]
