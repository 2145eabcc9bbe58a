"""
Dense spin operators, Hamiltonian builders and exact time evolution.
"""
