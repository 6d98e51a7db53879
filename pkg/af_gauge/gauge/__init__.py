"""
Gauge-field layer: field configurations, the Higgs potential and masses.

Main Components:
- fields: inherited and free field configurations on the target blocks
- potential: V = 1/2 sum |[B_a, B_b] - C^c_ab B_c|^2 with analytic gradient
- masses: the mass form, its labelled spectrum and degeneracy clusters
- action: inherited action terms and gauge transformations of fields
"""

from .fields import BlockFields, FieldConfiguration, basis_configuration, null_configuration
from .masses import MassSpectrum, mass_form, mass_spectrum, spectrum_at
from .potential import HiggsModel, higgs_gradient, higgs_potential

__all__ = [
    'FieldConfiguration',
    'BlockFields',
    'basis_configuration',
    'null_configuration',
    'HiggsModel',
    'higgs_potential',
    'higgs_gradient',
    'MassSpectrum',
    'mass_form',
    'mass_spectrum',
    'spectrum_at',
]
