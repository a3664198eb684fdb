"""Dense density-matrix simulation primitives."""
