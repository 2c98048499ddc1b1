"""supercartan: exact Cartan-type Lie superalgebras, integral forms, and supergroups.

The package constructs the four families of finite-dimensional Cartan-type Lie
superalgebras over the integers, verifies their Chevalley-basis and divided-power
integral structure, and realizes the corresponding supergroups as groups of
points over explicit test superalgebras, entirely in exact arithmetic.
"""

__version__ = "0.1.0"
