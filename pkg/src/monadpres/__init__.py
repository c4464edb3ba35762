"""Finitary monads presented by signatures and equations, explored on finite carriers."""

from .algebra import FiniteAlgebra, em_law_check, enumerate_algebras, eval_term
from .catalog import catalog_get, catalog_names, instantiate_rig_theory
from .colimit import canonical_presentation, coequalizer, coproduct, pushout, verify_algebraic
from .dsl import ParseError, parse_alg, parse_pres, print_alg, print_pres
from .equality import Distinct, Equal, EqualityBudget, Unknown, equal_mod_E, normal_form
from .errors import BudgetExceeded, ContractViolation, NotFound
from .presentation import Equation, Presentation, enumerate_models, model_counts, satisfies
from .terms import App, OpSymbol, Signature, SignatureMorphism, Var, enumerate_terms, subst

__version__ = "0.1.0"
