"""Physical constants used across the simulator (SI units)."""

SPEED_OF_LIGHT = 299792458.0
"Speed of light in vacuum, m/s."

BOLTZMANN = 1.380649e-23
"Boltzmann constant, J/K."

FREE_SPACE_IMPEDANCE = 376.730313668
"Characteristic impedance of free space, Ohm."
