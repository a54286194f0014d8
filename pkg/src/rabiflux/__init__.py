"""rabiflux: quantized-field oscillation simulators and ESR spectrum tooling.

Subpackages group by physics: ``cavity`` (k-space discreteness and phonon
kinetics), ``jcm`` (collapse/revival of a single qubit), ``chain``
(coupled-site Rabi-wave dynamics), ``synth`` (swept/modulated spectrum
synthesis), ``analysis`` (peak/splitting/lineshape extraction), ``fluxon``
(perturbed sine-Gordon junction), plus the ``cli`` front end.
"""

__version__ = "0.1.0"
