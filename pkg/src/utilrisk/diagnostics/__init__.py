"""Well-posedness classification, Gaussian witnesses, scaling probes and axiom checks."""

from .axioms import AxiomReport, axiom_harness
from .classify import Classification, classify_wellposedness, table_matrix
from .probes import ProbeTrace, scaling_probe
from .witness import GaussianWitness, NotApplicable, gaussian_witness

__all__ = [
    "AxiomReport",
    "Classification",
    "GaussianWitness",
    "NotApplicable",
    "ProbeTrace",
    "axiom_harness",
    "classify_wellposedness",
    "gaussian_witness",
    "scaling_probe",
    "table_matrix",
]
