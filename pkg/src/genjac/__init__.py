"""Generalized Jacobians of singular curves built from a compact Riemann
surface and a modulus: period matrices, classification of the quotient
group, equivalence of period matrices and a numeric Abel check."""

from .errors import (AccuracyError, CapabilityError, ClassificationError, CurveValidationError,
                     DivisorError, DomainError, GenJacError, ParseError, PathError, PoleError,
                     RadiusError, WitnessError)
from .lattice import (Lattice, LatticeType, TorusPoint, automorphism_multipliers,
                      congruent_mod_lattice, enumerate_unimodular, lattice_type,
                      reduce_fundamental_domain)
from .elliptic import (WeierstrassContext, make_context, period_integral, sigma_fn, wp,
                       wp_prime, zeta_fn)
from .curve import (GenusData, ModulusSpec, SingularCurveSpec, cusp_spec, genus, load_spec,
                    node_spec, residue_pairing, spec_from_dict, torus_spec, validate)
from .divisor import (Divisor, ExtendedDivisor, Multiconstant, RRResult, degree, parse_divisor,
                      rr_chi, validate_extended)
from .albanese import (CanonicalForm, PeriodMatrix, build_period_matrix,
                       build_period_matrix_numeric, canonical_form, discreteness_check,
                       toroidal_test)
from .equivalence import (EquivalenceWitness, NodalGenus2Curve, check_witness, equivalent_nodal,
                          nodal_biholomorphic)
from .mero import MeroExpr, evaluate, parse
from .abel import (AbelReport, abel_verify, check_mod_m, divisor_of, function_with_divisor,
                   local_expansion, period_map, symmetric_values)

__version__ = "0.1.0"
