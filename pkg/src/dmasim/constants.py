"""Physical constants used across the simulator (SI units)."""

BOLTZMANN = 1.380649e-23  # J/K
SPEED_OF_LIGHT = 299792458.0  # m/s
FREE_SPACE_IMPEDANCE = 376.730313668  # ohm
