"""Certified small prime quadratic, cubic and biquadratic residues modulo a prime."""

from .arith import factorize, is_prime, mod_inverse, mod_pow, mod_sqrt, primes_up_to
from .construct import (
    Branch,
    PipelineConfig,
    ResidueCertificate,
    SievePolynomial,
    build_cubic_poly,
    build_quadratic_poly,
    build_quartic_poly,
    count_report,
    root_count,
    run_pipeline,
)
from .errors import DomainError, IntegrityError, NotInvertibleError, RangeError
from .reciprocity import (
    cubic_criterion,
    euler_oracle,
    legendre,
    quartic_criterion,
    smallest_prime_residue,
)
from .represent import (
    QuadraticForm,
    Representation,
    max_a_form,
    reduced_forms,
    represent_cubic,
    represent_quartic,
)

__version__ = "0.1.0"
