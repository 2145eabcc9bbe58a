"""
Contains reference parameter sets.

All values are angular frequencies in rad/s unless noted.
"""

import math

TWO_PI = 2.0 * math.pi

# End-field chain and router blocks
REFERENCE_H = TWO_PI * 100.0
REFERENCE_J = TWO_PI * 10.0
REFERENCE_G = TWO_PI * 100.0

# Best CNOT parameters found by a genetic search on the six-spin architecture.
CNOT_REFERENCE_OPTIMUM = {
    "J": -78.2278,
    "h": (304.2089, 58.5906, -749.6377, 196.3780, 64.4191, 61.9356),
    "t": 30.9105,
}
CNOT_REFERENCE_COST = 0.0111
CNOT_REFERENCE_OVERLAP = 0.9868
