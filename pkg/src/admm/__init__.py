"""
TLSM ADMM solver.

The solver is organized like a small state machine: ``state`` defines the
configuration and the variables, ``nodes`` hold one update step each,
``conditions`` decides when to stop and ``workflow`` runs the loop.
"""
