"""ADMM update steps (X, Z, D1/D2, multipliers)."""
