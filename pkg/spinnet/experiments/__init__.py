"""
Experiments, one CLI subcommand per *Experiment class.
"""
