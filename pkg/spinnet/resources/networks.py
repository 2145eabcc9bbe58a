"""
Contains network file documentation and published topologies.
"""

from spinnet.common.utils import generate_md_table

# Lines of a network file: (form, meaning)
NETWORK_FILE_DIRECTIVES = [
    ("Line", "Meaning"),
    (
        "i j coupling",
        """
        Undirected edge between sites i and j with the given coupling in rad/s.
        Each unordered pair may appear once.
        """,
    ),
    ("field i value", "Zeeman field of site i in rad/s. Sites without a field line get 0."),
    (
        "sites n",
        """
        Optional spin count. Without it the largest site index mentioned is used.
        """,
    ),
    ("# text", "Comment, also allowed after the values on any line."),
]

NETWORK_FILE_GRAMMAR = """Network files

Plain text, one directive per line, blank lines ignored. Sites are numbered
from 1. All couplings and fields are angular frequencies in rad/s; a value
quoted as "2pi * 100" is written 628.3185307.

""" + generate_md_table(NETWORK_FILE_DIRECTIVES) + """

Example (3-spin chain, J = 2pi*10, end fields 2pi*100):

    # chain
    1 2 62.83185307
    2 3 62.83185307
    field 1 628.3185307
    field 3 628.3185307
"""

# Nine-spin tree used for long-range transport between sites 1 and 9.
ARBITRARY_TOPOLOGY_EDGES = ((1, 2), (2, 3), (2, 4), (4, 5), (4, 6), (4, 7), (7, 8), (7, 9))

# Six-spin CNOT architecture: logical control on (1, 2), logical target on (5, 6).
CNOT_ARCHITECTURE_EDGES = ((1, 3), (2, 3), (3, 4), (4, 5), (4, 6))

# Chain 1-2-3 fused to a four-spin router with input 3, hub 4 and outputs 5, 6.
COMPOSITE_EDGES = ((1, 2), (2, 3), (3, 4), (4, 5), (4, 6))
