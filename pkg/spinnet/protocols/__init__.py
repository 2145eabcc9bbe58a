"""
Protocols built on the spin core: filtered star engineering, chain transport,
routers, modular networks and gate synthesis.
"""
